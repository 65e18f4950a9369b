//! Hex dump of the derived lookup tables for one field: the full product
//! table, inverses, the split nibble tables the byte-permute kernels use,
//! and the bit-plane factors the multiply kernels use.
//!
//! Usage: `cargo run --example table_dump [q]` with q in {2, 4, 16, 256};
//! defaults to GF(16). Piping through `less` helps for GF(256).

use gf_rlnc::{Field, FieldId};

fn main() {
    let q: u16 = std::env::args().nth(1).map_or(16, |s| {
        s.parse().unwrap_or_else(|_| {
            eprintln!("table_dump: not a field size: {s}");
            std::process::exit(1);
        })
    });
    let Some(id) = FieldId::from_q(q) else {
        eprintln!("table_dump: no field of size {q} (expected 2, 4, 16 or 256)");
        std::process::exit(1);
    };
    print!("{}", Field::new(id).tables().dump());
}

//! Word-level arithmetic in the four binary extension fields: addition,
//! multiplication, inverses, packing, and custom reduction polynomials.

use gf_rlnc::{FieldId, FieldSpec};

fn main() {
    for id in FieldId::ALL {
        let spec = FieldSpec::new(id);
        println!(
            "{id}: {} bits per word, {} words per byte, reduction polynomial {:#x}",
            spec.word_bits(),
            spec.words_per_byte(),
            spec.poly()
        );
    }

    // Addition is XOR: every element is its own negative.
    let gf16 = FieldSpec::new(FieldId::Gf16);
    let (a, b) = (0x9, 0x3);
    println!("\nGF(16): {a:#x} + {b:#x} = {:#x}", gf16.add(a, b));
    println!("GF(16): {a:#x} * {b:#x} = {:#x}", gf16.poly_mul(a, b));

    // Every nonzero element has an inverse; multiplying back gives 1.
    for v in 1..gf16.q() as u8 {
        let inv = gf16.inv(v).unwrap();
        assert_eq!(gf16.poly_mul(v, inv), 1);
    }
    println!("GF(16): inv({:#x}) = {:#x}", 0x2, gf16.inv(0x2).unwrap());

    // Sub-byte fields pack several words per byte, low bits first.
    let gf4 = FieldSpec::new(FieldId::Gf4);
    let packed = gf4.pack_words(&[3, 2, 1, 0]).unwrap()[0];
    println!("\nGF(4): words [3, 2, 1, 0] pack to {packed:#04x}");
    assert_eq!(gf4.unpack_words(&[packed]), vec![3, 2, 1, 0]);

    // Byte-wise multiply applies the word multiply to every packed lane.
    println!("GF(4): 2 * {packed:#04x} = {:#04x} lane-wise", gf4.mul_byte(2, packed));

    // Any monic irreducible polynomial of the right degree works; the
    // field is the same up to isomorphism but the bit patterns differ.
    let alt = FieldSpec::with_poly(FieldId::Gf256, 0x11D).unwrap();
    println!(
        "\nGF(256): 2 * 0x80 = {:#04x} under 0x11B, {:#04x} under 0x11D",
        FieldSpec::new(FieldId::Gf256).poly_mul(2, 0x80),
        alt.poly_mul(2, 0x80)
    );

    // Reducible or non-monic polynomials are rejected outright.
    println!("x^2 + 1 over GF(4): {:?}", FieldSpec::with_poly(FieldId::Gf4, 0b101));
    println!("degree-7 poly for GF(256): {:?}", FieldSpec::with_poly(FieldId::Gf256, 0x9D));
}

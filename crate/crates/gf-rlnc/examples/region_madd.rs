//! Region operations: 64-byte aligned/padded buffers, multiply-and-add
//! with packed words, the trivial-coefficient fast paths, and the
//! guarantee that every kernel computes the identical result.

use gf_rlnc::{Field, FieldId, Region, BLOCK_BYTES};

fn main() {
    let field = Field::new(FieldId::Gf16);

    // Regions round up to whole 64-byte blocks and start aligned.
    let src = Region::from_bytes(b"region payloads are padded to whole blocks");
    println!(
        "{} payload bytes occupy {} region bytes, {}-byte aligned",
        42,
        src.len(),
        BLOCK_BYTES
    );
    assert_eq!(src.len() % BLOCK_BYTES, 0);
    assert_eq!(src.as_ptr() as usize % BLOCK_BYTES, 0);

    // b ^= c * a over packed GF(16) words, one kernel pass per call.
    let kernel = field.select_kernel(None).unwrap();
    let mut acc = Region::zeroed(src.len());
    field.madd_region(kernel, &mut acc, &src, 0x7).unwrap();
    println!("after acc ^= 7 * src: acc[..8] = {:02x?}", &acc[..8]);

    // Adding the same product again cancels it: XOR addition.
    field.madd_region(kernel, &mut acc, &src, 0x7).unwrap();
    assert!(acc.iter().all(|&b| b == 0));
    println!("adding the product again zeroes the accumulator");

    // c = 0 leaves the destination untouched; c = 1 is a plain XOR. Both
    // short-circuit before any table work.
    let before = acc.clone();
    field.madd_region(kernel, &mut acc, &src, 0).unwrap();
    assert_eq!(acc, before);
    field.madd_region(kernel, &mut acc, &src, 1).unwrap();
    assert_eq!(&acc[..], &src[..]);

    // In-place scaling, and scaling back via the inverse.
    let c = 0x5;
    let c_inv = field.spec().inv(c).unwrap();
    let snapshot = acc.clone();
    field.mul_region(kernel, &mut acc, c).unwrap();
    field.mul_region(kernel, &mut acc, c_inv).unwrap();
    assert_eq!(acc, snapshot);
    println!("scaling by {c:#x} then {c_inv:#x} round-trips");

    // Every supported kernel produces byte-identical output.
    let mut outputs = Vec::new();
    for kernel in field.supported_kernels() {
        let mut b = Region::zeroed(src.len());
        field.madd_region(kernel, &mut b, &src, 0x9).unwrap();
        outputs.push((kernel, b));
    }
    let (first_kernel, reference) = &outputs[0];
    for (kernel, out) in &outputs[1..] {
        assert_eq!(out, reference, "{kernel} disagrees with {first_kernel}");
    }
    println!("{} kernels agree on c = 9: {:02x?}...", outputs.len(), &reference[..4]);
}

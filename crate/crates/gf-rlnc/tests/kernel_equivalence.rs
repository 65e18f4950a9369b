//! Every kernel supported on this machine must compute byte-identical
//! results, leave sources untouched, and respect the field axioms that
//! make region operations composable.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use gf_rlnc::{Field, FieldId, Region};

const LENS: [usize; 6] = [64, 128, 192, 320, 4096, 8192];

fn random_region(rng: &mut ChaCha8Rng, len: usize) -> Region {
    let mut r = Region::zeroed(len);
    r.fill_random(rng);
    r
}

fn coefficients(field: &Field, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let q = field.spec().q();
    if q <= 16 {
        (0..q as u8).collect()
    } else {
        let mut cs: Vec<u8> = vec![0, 1, 2, 255];
        cs.extend((0..12).map(|_| (rng.next_u32() & 0xFF) as u8));
        cs
    }
}

#[test]
fn all_supported_kernels_agree_with_scalar() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in FieldId::ALL {
        let field = Field::new(id);
        let scalar = "scalar".parse().unwrap();
        for &len in &LENS {
            let a = random_region(&mut rng, len);
            let b0 = random_region(&mut rng, len);
            for c in coefficients(&field, &mut rng) {
                let mut want_madd = b0.clone();
                field.madd_region(scalar, &mut want_madd, &a, c).unwrap();
                let mut want_mul = a.clone();
                field.mul_region(scalar, &mut want_mul, c).unwrap();

                for kernel in field.supported_kernels() {
                    let mut b = b0.clone();
                    field.madd_region(kernel, &mut b, &a, c).unwrap();
                    assert_eq!(
                        b, want_madd,
                        "{id} {kernel} madd disagrees with scalar at len {len}, c {c:#x}"
                    );
                    let mut m = a.clone();
                    field.mul_region(kernel, &mut m, c).unwrap();
                    assert_eq!(
                        m, want_mul,
                        "{id} {kernel} mul disagrees with scalar at len {len}, c {c:#x}"
                    );
                }
            }
        }
    }
}

#[test]
fn madd_composes_like_field_addition() {
    // b ^= c1*a then b ^= c2*a must equal b ^= (c1+c2)*a; addition in a
    // characteristic-2 field is XOR on words.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for id in [FieldId::Gf4, FieldId::Gf16, FieldId::Gf256] {
        let field = Field::new(id);
        let q = field.spec().q();
        let a = random_region(&mut rng, 256);
        let b0 = random_region(&mut rng, 256);
        for kernel in field.supported_kernels() {
            for c1 in 0..q.min(16) as u8 {
                for c2 in 0..q.min(16) as u8 {
                    let mut two_step = b0.clone();
                    field.madd_region(kernel, &mut two_step, &a, c1).unwrap();
                    field.madd_region(kernel, &mut two_step, &a, c2).unwrap();
                    let mut one_step = b0.clone();
                    field.madd_region(kernel, &mut one_step, &a, c1 ^ c2).unwrap();
                    assert_eq!(two_step, one_step, "{id} {kernel} c1 {c1:#x} c2 {c2:#x}");
                }
            }
        }
    }
}

#[test]
fn mul_composes_like_field_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for id in [FieldId::Gf4, FieldId::Gf16, FieldId::Gf256] {
        let field = Field::new(id);
        let a = random_region(&mut rng, 192);
        for kernel in field.supported_kernels() {
            for c1 in [2u8, 3] {
                for c2 in [2u8, (field.spec().q() - 1) as u8] {
                    let mut two_step = a.clone();
                    field.mul_region(kernel, &mut two_step, c1).unwrap();
                    field.mul_region(kernel, &mut two_step, c2).unwrap();
                    let mut one_step = a.clone();
                    let c12 = field.spec().poly_mul(c1, c2);
                    field.mul_region(kernel, &mut one_step, c12).unwrap();
                    assert_eq!(two_step, one_step, "{id} {kernel} c1 {c1:#x} c2 {c2:#x}");
                }
            }
        }
    }
}

#[test]
fn sources_are_never_written() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for id in FieldId::ALL {
        let field = Field::new(id);
        let a = random_region(&mut rng, 320);
        let snapshot = a.clone();
        for kernel in field.supported_kernels() {
            let mut b = random_region(&mut rng, 320);
            for c in [0u8, 1, (field.spec().q() - 1) as u8] {
                field.madd_region(kernel, &mut b, &a, c).unwrap();
                assert_eq!(a, snapshot, "{id} {kernel} modified its source at c {c:#x}");
            }
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for id in [FieldId::Gf2, FieldId::Gf256] {
        let field = Field::new(id);
        let a = random_region(&mut rng, 8192);
        let b0 = random_region(&mut rng, 8192);
        let c = (field.spec().q() - 1) as u8;
        for kernel in field.supported_kernels() {
            let mut first = b0.clone();
            field.madd_region(kernel, &mut first, &a, c).unwrap();
            for _ in 0..3 {
                let mut again = b0.clone();
                field.madd_region(kernel, &mut again, &a, c).unwrap();
                assert_eq!(again, first, "{id} {kernel} is not deterministic");
            }
        }
    }
}

//! Precomputed lookup tables for one field.
//!
//! [`FieldTables::build`] materializes everything the region kernels need:
//!
//! * `mul`: the full `q x q` product table, used by the byte-wise scalar
//!   kernel over GF(256).
//! * `inv`: multiplicative inverses, used by the decoder to normalize pivot
//!   rows. `inv[0]` stores 0 as a sentinel; callers must never divide by it.
//! * `tl`, `th`: per-coefficient nibble tables. `tl[c][v]` is the packed
//!   product of `c` with the byte value `v` (`v < 16`), `th[c][v]` the packed
//!   product of `c` with `v << 4`. Any byte `b` then satisfies
//!   `c * b = tl[c][b & 0x0F] ^ th[c][b >> 4]`, which is exactly the lookup
//!   the byte-shuffle kernels perform 16, 32 or 64 lanes at a time.
//! * `pow`: `pow[c][k] = c * x^k` for `k < w`. The integer-multiply kernels
//!   use these as per-bit-plane factors; each entry fits in `w` bits, which
//!   is what keeps their partial products from carrying into neighbors.
//!
//! Table construction is deterministic: it derives every entry from
//! [`FieldSpec::poly_mul`] in index order, so two builds for equal specs are
//! bit-identical.

use std::fmt::Write as _;

use crate::field::{FieldSpec, Word};

/// Multiplication, inverse, nibble and bit-plane tables for one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTables {
    spec: FieldSpec,
    mul: Box<[Word]>,    // q * q, row-major: mul[c * q + v]
    inv: Box<[Word]>,    // q entries, inv[0] = 0
    tl: Box<[[u8; 16]]>, // q rows
    th: Box<[[u8; 16]]>, // q rows
    pow: Box<[Word]>,    // q * w, row-major: pow[c * w + k]
}

impl FieldTables {
    /// Derive all tables from the field's reference multiplication.
    pub fn build(spec: &FieldSpec) -> FieldTables {
        let q = spec.q() as usize;
        let w = spec.word_bits() as usize;

        let mut mul = vec![0; q * q].into_boxed_slice();
        for c in 0..q {
            for v in 0..q {
                mul[c * q + v] = spec.poly_mul(c as Word, v as Word);
            }
        }

        let mut inv = vec![0; q].into_boxed_slice();
        for v in 1..q {
            inv[v] = spec.inv(v as Word).expect("nonzero element has an inverse");
        }

        let mut tl = vec![[0u8; 16]; q].into_boxed_slice();
        let mut th = vec![[0u8; 16]; q].into_boxed_slice();
        for c in 0..q {
            for v in 0..16u8 {
                tl[c][v as usize] = spec.mul_byte(c as Word, v);
                th[c][v as usize] = spec.mul_byte(c as Word, v << 4);
            }
        }

        let mut pow = vec![0; q * w].into_boxed_slice();
        for c in 0..q {
            for k in 0..w {
                let p = spec.poly_mul(c as Word, 1 << k);
                debug_assert!(spec.contains(p));
                pow[c * w + k] = p;
            }
        }

        FieldTables { spec: *spec, mul, inv, tl, th, pow }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Product `c * v` from the full table.
    pub fn mul(&self, c: Word, v: Word) -> Word {
        self.mul[c as usize * self.spec.q() as usize + v as usize]
    }

    /// Row of all products of `c`, indexed by the other factor.
    pub fn mul_row(&self, c: Word) -> &[Word] {
        let q = self.spec.q() as usize;
        &self.mul[c as usize * q..(c as usize + 1) * q]
    }

    /// Multiplicative inverse of `v`; returns the 0 sentinel for `v = 0`.
    pub fn inv(&self, v: Word) -> Word {
        self.inv[v as usize]
    }

    /// Low-nibble product table for coefficient `c`.
    pub fn tl(&self, c: Word) -> &[u8; 16] {
        &self.tl[c as usize]
    }

    /// High-nibble product table for coefficient `c`, pre-shifted so the
    /// kernel can index it with the nibble moved down to bits 0..4.
    pub fn th(&self, c: Word) -> &[u8; 16] {
        &self.th[c as usize]
    }

    /// Bit-plane factors `[c * x^k]` for `k < w`.
    pub fn pow(&self, c: Word) -> &[Word] {
        let w = self.spec.word_bits() as usize;
        &self.pow[c as usize * w..(c as usize + 1) * w]
    }

    /// Copy with one `mul` entry replaced, bypassing validation.
    ///
    /// Support hook for exercising verification paths against a table that
    /// is wrong on purpose; not for production use.
    pub fn with_mul_entry(&self, c: Word, v: Word, value: Word) -> FieldTables {
        let mut t = self.clone();
        t.mul[c as usize * self.spec.q() as usize + v as usize] = value;
        t
    }

    /// Copy with one low-nibble entry replaced, bypassing validation.
    /// See [`FieldTables::with_mul_entry`].
    pub fn with_tl_entry(&self, c: Word, v: u8, value: u8) -> FieldTables {
        let mut t = self.clone();
        t.tl[c as usize][v as usize] = value;
        t
    }

    /// Copy with one high-nibble entry replaced, bypassing validation.
    /// See [`FieldTables::with_mul_entry`].
    pub fn with_th_entry(&self, c: Word, v: u8, value: u8) -> FieldTables {
        let mut t = self.clone();
        t.th[c as usize][v as usize] = value;
        t
    }

    /// Copy with one bit-plane factor replaced, bypassing validation.
    /// See [`FieldTables::with_mul_entry`].
    pub fn with_pow_entry(&self, c: Word, k: u32, value: Word) -> FieldTables {
        let mut t = self.clone();
        t.pow[c as usize * self.spec.word_bits() as usize + k as usize] = value;
        t
    }

    /// Hex dump of every table, one section per table, one row per
    /// coefficient. The format is stable so dumps can be diffed across
    /// builds and machines.
    pub fn dump(&self) -> String {
        let q = self.spec.q();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} tables, reduction polynomial {:#x}",
            self.spec.field(),
            self.spec.poly()
        );
        let _ = writeln!(
            out,
            "# q = {q}, word_bits = {}, words_per_byte = {}",
            self.spec.word_bits(),
            self.spec.words_per_byte()
        );

        out.push_str("\n[mul]\n");
        for c in 0..q {
            push_row(&mut out, c, self.mul_row(c as Word));
        }

        out.push_str("\n[inv]\n");
        for chunk in self.inv.chunks(16) {
            push_bytes(&mut out, chunk);
            out.push('\n');
        }

        out.push_str("\n[tl]\n");
        for c in 0..q {
            push_row(&mut out, c, self.tl(c as Word));
        }

        out.push_str("\n[th]\n");
        for c in 0..q {
            push_row(&mut out, c, self.th(c as Word));
        }

        out.push_str("\n[pow]\n");
        for c in 0..q {
            push_row(&mut out, c, self.pow(c as Word));
        }

        out
    }
}

fn push_row(out: &mut String, c: u16, row: &[u8]) {
    let _ = write!(out, "c={c:02x}:");
    for &v in row {
        let _ = write!(out, " {v:02x}");
    }
    out.push('\n');
}

fn push_bytes(out: &mut String, bytes: &[u8]) {
    for (i, &v) in bytes.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:02x}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldId;

    #[test]
    fn mul_table_matches_reference_for_all_fields() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let t = FieldTables::build(&spec);
            for c in 0..spec.q() {
                for v in 0..spec.q() {
                    assert_eq!(t.mul(c as Word, v as Word), spec.poly_mul(c as Word, v as Word));
                }
            }
        }
    }

    #[test]
    fn inv_table_has_sentinel_and_true_inverses() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let t = FieldTables::build(&spec);
            assert_eq!(t.inv(0), 0);
            for v in 1..spec.q() {
                let v = v as Word;
                assert_eq!(spec.poly_mul(v, t.inv(v)), 1, "{f}: inv({v:#x})");
            }
        }
    }

    #[test]
    fn nibble_tables_reproduce_every_byte_product() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let t = FieldTables::build(&spec);
            for c in 0..spec.q() {
                let c = c as Word;
                for b in 0..=255u8 {
                    let via_nibbles = t.tl(c)[(b & 0x0F) as usize] ^ t.th(c)[(b >> 4) as usize];
                    assert_eq!(via_nibbles, spec.mul_byte(c, b), "{f}: c={c:#x} b={b:#x}");
                }
            }
        }
    }

    #[test]
    fn high_nibble_table_is_shifted_low_table_for_subbyte_fields() {
        // Sub-byte products stay inside their nibble, so the high table is
        // exactly the low table moved up four bits. Not true for GF(256),
        // where the shift can push products through the reduction.
        for f in [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16] {
            let spec = FieldSpec::new(f);
            let t = FieldTables::build(&spec);
            for c in 0..spec.q() {
                for v in 0..16 {
                    assert_eq!(t.th(c as Word)[v], t.tl(c as Word)[v] << 4);
                }
            }
        }
        let gf256 = FieldTables::build(&FieldSpec::new(FieldId::Gf256));
        assert_ne!(gf256.th(2)[8], gf256.tl(2)[8] << 4);
    }

    #[test]
    fn pow_rows_hold_shifted_coefficients() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let t = FieldTables::build(&spec);
            for c in 0..spec.q() {
                let c = c as Word;
                for k in 0..spec.word_bits() {
                    let p = t.pow(c)[k as usize];
                    assert!(spec.contains(p));
                    assert_eq!(p, spec.poly_mul(c, 1 << k));
                }
            }
        }
        let gf16 = FieldTables::build(&FieldSpec::new(FieldId::Gf16));
        assert_eq!(gf16.pow(2), &[0x2, 0x4, 0x8, 0x3]);
        let gf4 = FieldTables::build(&FieldSpec::new(FieldId::Gf4));
        assert_eq!(gf4.pow(2), &[0x2, 0x3]);
    }

    #[test]
    fn build_is_deterministic() {
        let spec = FieldSpec::new(FieldId::Gf256);
        assert_eq!(FieldTables::build(&spec), FieldTables::build(&spec));
    }

    #[test]
    fn corruption_hooks_change_exactly_one_entry() {
        let t = FieldTables::build(&FieldSpec::new(FieldId::Gf4));
        let bad = t.with_tl_entry(2, 7, 0x42);
        assert_ne!(t, bad);
        assert_eq!(bad.tl(2)[7], 0x42);
        assert_eq!(t.tl(2)[7], 0x09);
        assert_eq!(bad.th(2), t.th(2));
        let bad = t.with_mul_entry(3, 3, 0);
        assert_eq!(bad.mul(3, 3), 0);
        assert_eq!(t.mul(3, 3), 2);
    }

    #[test]
    fn dump_is_stable_and_complete() {
        let t = FieldTables::build(&FieldSpec::new(FieldId::Gf4));
        let dump = t.dump();
        assert!(dump.starts_with("# GF(4) tables, reduction polynomial 0x7\n"));
        for section in ["[mul]", "[inv]", "[tl]", "[th]", "[pow]"] {
            assert!(dump.contains(section), "missing {section}");
        }
        // Row of doubled products and the inverse row, frozen.
        assert!(dump.contains("c=02: 00 02 03 01\n"));
        assert!(dump.contains("\n00 01 03 02\n"));
        // Low-nibble row for c = 2 over all 16 byte values.
        assert!(dump.contains("c=02: 00 02 03 01 08 0a 0b 09 0c 0e 0f 0d 04 06 07 05\n"));
        assert_eq!(t.dump(), dump);
    }
}

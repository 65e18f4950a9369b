//! Scalar arithmetic for the binary extension fields GF(2), GF(4), GF(16)
//! and GF(256).
//!
//! Field elements ("words") are polynomials over GF(2) of degree below `w`,
//! stored in the low `w` bits of a `u8`. Addition is carryless, so it is a
//! plain XOR. Multiplication is carryless polynomial multiplication reduced
//! modulo an irreducible polynomial of degree `w`.
//!
//! Words are packed into bytes least significant first: word `i` of a byte
//! occupies bits `[i*w, (i+1)*w)`. A byte therefore holds `8/w` words, and
//! any byte value is a valid packed group for every field.
//!
//! [`FieldSpec::poly_mul`] is deliberately the simplest correct shift-and-add
//! loop. Everything faster in this crate (lookup tables, SIMD kernels) is
//! checked against it.

use std::fmt;
use thiserror::Error;

/// Word type for field elements and packed bytes. Every supported field fits
/// an element in one byte.
pub type Word = u8;

/// The four supported field sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldId {
    Gf2,
    Gf4,
    Gf16,
    Gf256,
}

impl FieldId {
    /// All supported fields, smallest first.
    pub const ALL: [FieldId; 4] = [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16, FieldId::Gf256];

    /// Bits per field element: 1, 2, 4 or 8.
    pub const fn word_bits(self) -> u32 {
        match self {
            FieldId::Gf2 => 1,
            FieldId::Gf4 => 2,
            FieldId::Gf16 => 4,
            FieldId::Gf256 => 8,
        }
    }

    /// Field order `q = 2^w`.
    pub const fn q(self) -> u16 {
        1 << self.word_bits()
    }

    /// Field elements per byte: `8 / w`.
    pub const fn words_per_byte(self) -> u32 {
        8 / self.word_bits()
    }

    /// Default reduction polynomial, bit `i` holding the coefficient of `x^i`.
    ///
    /// GF(4) uses `x^2 + x + 1`, GF(16) uses `x^4 + x + 1` and GF(256) uses
    /// `x^8 + x^4 + x^3 + x + 1` (the AES polynomial). GF(2) needs no
    /// reduction; `x + 1` is carried along so every spec has a valid monic
    /// irreducible polynomial of degree `w`.
    pub const fn default_poly(self) -> u16 {
        match self {
            FieldId::Gf2 => 0b11,
            FieldId::Gf4 => 0b111,
            FieldId::Gf16 => 0b1_0011,
            FieldId::Gf256 => 0x11B,
        }
    }

    /// Look a field up by its order. Returns `None` for anything but
    /// 2, 4, 16 or 256.
    pub fn from_q(q: u16) -> Option<FieldId> {
        FieldId::ALL.into_iter().find(|f| f.q() == q)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q())
    }
}

/// Errors from field construction and element packing.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// The reduction polynomial is not monic of degree `w`.
    #[error("polynomial {poly:#x} is not monic of degree {degree}")]
    BadDegree { poly: u16, degree: u32 },
    /// The reduction polynomial has a nontrivial factor, so the quotient ring
    /// is not a field.
    #[error("polynomial {poly:#x} is reducible")]
    Reducible { poly: u16 },
    /// Zero has no multiplicative inverse.
    #[error("0 has no multiplicative inverse")]
    ZeroInverse,
    /// A word does not fit the field.
    #[error("word {word:#x} out of range for GF({q})")]
    WordOutOfRange { word: Word, q: u16 },
    /// A word count that does not fill whole bytes.
    #[error("word count {count} is not a multiple of {words_per_byte} (GF({q}))")]
    PartialByte { count: usize, words_per_byte: u32, q: u16 },
}

/// A concrete field: size plus reduction polynomial.
///
/// Construct with [`FieldSpec::new`] for the default polynomial or
/// [`FieldSpec::with_poly`] for a custom one; `with_poly` rejects anything
/// that is not monic, degree `w` and irreducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    field: FieldId,
    poly: u16,
}

impl FieldSpec {
    /// Field with its default reduction polynomial.
    pub const fn new(field: FieldId) -> FieldSpec {
        FieldSpec { field, poly: field.default_poly() }
    }

    /// Field with a caller-chosen reduction polynomial.
    pub fn with_poly(field: FieldId, poly: u16) -> Result<FieldSpec, FieldError> {
        let degree = field.word_bits();
        if poly >> degree != 1 {
            return Err(FieldError::BadDegree { poly, degree });
        }
        if !is_irreducible(poly, degree) {
            return Err(FieldError::Reducible { poly });
        }
        Ok(FieldSpec { field, poly })
    }

    pub const fn field(&self) -> FieldId {
        self.field
    }

    /// Field order `q = 2^w`.
    pub const fn q(&self) -> u16 {
        self.field.q()
    }

    /// Bits per field element.
    pub const fn word_bits(&self) -> u32 {
        self.field.word_bits()
    }

    /// Field elements per packed byte.
    pub const fn words_per_byte(&self) -> u32 {
        self.field.words_per_byte()
    }

    /// Reduction polynomial, bit `i` holding the coefficient of `x^i`.
    pub const fn poly(&self) -> u16 {
        self.poly
    }

    /// Largest representable element, `q - 1`. Doubles as the word mask.
    pub const fn max_word(&self) -> Word {
        (self.q() - 1) as Word
    }

    /// True if `word` is an element of this field.
    pub const fn contains(&self, word: Word) -> bool {
        (word as u16) < self.q()
    }

    /// Field addition: carryless, so plain XOR.
    pub fn add(&self, a: Word, b: Word) -> Word {
        debug_assert!(self.contains(a) && self.contains(b));
        a ^ b
    }

    /// Field multiplication by shift-and-add with stepwise reduction.
    ///
    /// This is the reference implementation every table and kernel in the
    /// crate is validated against, so it favors obviousness over speed:
    /// double `a` once per bit of `b`, reduce whenever bit `w` appears, and
    /// accumulate `a` wherever `b` has a set bit.
    pub fn poly_mul(&self, a: Word, b: Word) -> Word {
        debug_assert!(self.contains(a) && self.contains(b));
        let w = self.word_bits();
        let mut a = a as u16;
        let mut b = b as u16;
        let mut acc = 0u16;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> w != 0 {
                a ^= self.poly;
            }
        }
        acc as Word
    }

    /// Multiplicative inverse by exhaustive search. Errors on zero.
    pub fn inv(&self, a: Word) -> Result<Word, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        debug_assert!(self.contains(a));
        // q is at most 256 and inversion sits on no hot path, so a scan
        // beats carrying around extended-Euclid or log tables here.
        (1..self.q())
            .map(|x| x as Word)
            .find(|&x| self.poly_mul(a, x) == 1)
            .ok_or(FieldError::ZeroInverse)
    }

    /// Multiply every word packed in `byte` by `c`, keeping each product in
    /// its slot. For GF(256) this is an ordinary product.
    pub fn mul_byte(&self, c: Word, byte: u8) -> u8 {
        debug_assert!(self.contains(c));
        let w = self.word_bits();
        let mask = self.max_word();
        let mut out = 0u8;
        for i in 0..self.words_per_byte() {
            let word = (byte >> (i * w)) & mask;
            out |= self.poly_mul(c, word) << (i * w);
        }
        out
    }

    /// Pack words into bytes, least significant word first. Every word must
    /// fit the field and the count must fill whole bytes.
    pub fn pack_words(&self, words: &[Word]) -> Result<Vec<u8>, FieldError> {
        let per = self.words_per_byte();
        if !words.len().is_multiple_of(per as usize) {
            return Err(FieldError::PartialByte {
                count: words.len(),
                words_per_byte: per,
                q: self.q(),
            });
        }
        if let Some(&word) = words.iter().find(|&&word| !self.contains(word)) {
            return Err(FieldError::WordOutOfRange { word, q: self.q() });
        }
        let w = self.word_bits();
        Ok(words
            .chunks_exact(per as usize)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |byte, (i, &word)| byte | word << (i as u32 * w))
            })
            .collect())
    }

    /// Unpack bytes into words, least significant word first. Total
    /// inverse of [`FieldSpec::pack_words`].
    pub fn unpack_words(&self, bytes: &[u8]) -> Vec<Word> {
        let w = self.word_bits();
        let mask = self.max_word();
        bytes
            .iter()
            .flat_map(|&byte| (0..self.words_per_byte()).map(move |i| (byte >> (i * w)) & mask))
            .collect()
    }

    /// 64-bit mask selecting bit `k` of every word slot, replicated across
    /// all eight bytes. Used by the integer-multiply kernels to split packed
    /// operands into bit planes.
    pub(crate) fn plane_mask64(&self, k: u32) -> u64 {
        debug_assert!(k < self.word_bits());
        let base: u64 = match self.field {
            FieldId::Gf2 => 0xFFFF_FFFF_FFFF_FFFF,
            FieldId::Gf4 => 0x5555_5555_5555_5555,
            FieldId::Gf16 => 0x1111_1111_1111_1111,
            FieldId::Gf256 => 0x0101_0101_0101_0101,
        };
        base << k
    }
}

/// Carryless remainder of `a` divided by `b` (`b >= 2`).
fn poly_rem(mut a: u32, b: u32) -> u32 {
    debug_assert!(b >= 2);
    let db = 31 - b.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division over GF(2): a polynomial of degree `d >= 1` is irreducible
/// iff no polynomial of degree 1..=d/2 divides it.
fn is_irreducible(poly: u16, degree: u32) -> bool {
    if degree == 1 {
        return true;
    }
    (2u32..1 << (degree / 2 + 1)).all(|d| poly_rem(poly as u32, d) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_id_parameters() {
        assert_eq!(FieldId::Gf2.q(), 2);
        assert_eq!(FieldId::Gf4.q(), 4);
        assert_eq!(FieldId::Gf16.q(), 16);
        assert_eq!(FieldId::Gf256.q(), 256);
        for f in FieldId::ALL {
            assert_eq!(f.word_bits() * f.words_per_byte(), 8);
            assert_eq!(FieldId::from_q(f.q()), Some(f));
        }
        assert_eq!(FieldId::from_q(8), None);
        assert_eq!(FieldId::Gf16.to_string(), "GF(16)");
    }

    #[test]
    fn default_polys_accepted() {
        for f in FieldId::ALL {
            let spec = FieldSpec::with_poly(f, f.default_poly()).unwrap();
            assert_eq!(spec, FieldSpec::new(f));
        }
    }

    #[test]
    fn bad_polys_rejected() {
        // Degree too low, degree too high, missing top bit.
        assert_eq!(
            FieldSpec::with_poly(FieldId::Gf16, 0b111),
            Err(FieldError::BadDegree { poly: 0b111, degree: 4 })
        );
        assert_eq!(
            FieldSpec::with_poly(FieldId::Gf4, 0b1111),
            Err(FieldError::BadDegree { poly: 0b1111, degree: 2 })
        );
        // x^2 + 1 = (x + 1)^2 over GF(2).
        assert_eq!(
            FieldSpec::with_poly(FieldId::Gf4, 0b101),
            Err(FieldError::Reducible { poly: 0b101 })
        );
        // x^8 + x^4 + x^3 + x^2 has no constant term, so x divides it.
        assert_eq!(
            FieldSpec::with_poly(FieldId::Gf256, 0x11C),
            Err(FieldError::Reducible { poly: 0x11C })
        );
    }

    #[test]
    fn alternate_irreducible_poly_accepted() {
        // x^8 + x^4 + x^3 + x^2 + 1, the classic Reed-Solomon choice.
        let spec = FieldSpec::with_poly(FieldId::Gf256, 0x11D).unwrap();
        assert_eq!(spec.poly(), 0x11D);
        // Same product, different result than under 0x11B.
        assert_eq!(spec.poly_mul(0x02, 0x80), 0x1D);
        assert_eq!(FieldSpec::new(FieldId::Gf256).poly_mul(0x02, 0x80), 0x1B);
    }

    #[test]
    fn known_products() {
        let gf2 = FieldSpec::new(FieldId::Gf2);
        assert_eq!(gf2.poly_mul(1, 1), 1);
        assert_eq!(gf2.poly_mul(1, 0), 0);

        let gf4 = FieldSpec::new(FieldId::Gf4);
        // x * x = x + 1 under x^2 + x + 1.
        assert_eq!(gf4.poly_mul(2, 2), 3);
        assert_eq!(gf4.poly_mul(2, 3), 1);
        assert_eq!(gf4.poly_mul(3, 3), 2);

        let gf16 = FieldSpec::new(FieldId::Gf16);
        // (x^3 + 1)(x + 1) = x^4 + x^3 + x + 1 = x^3 under x^4 + x + 1.
        assert_eq!(gf16.poly_mul(0x9, 0x3), 0x8);
        assert_eq!(gf16.poly_mul(0x2, 0x9), 0x1);

        let gf256 = FieldSpec::new(FieldId::Gf256);
        assert_eq!(gf256.poly_mul(0x53, 0xCA), 0x01);
        assert_eq!(gf256.poly_mul(0x02, 0x80), 0x1B);
        assert_eq!(gf256.poly_mul(0xFF, 0x01), 0xFF);
    }

    #[test]
    fn inverse_matches_exhaustive_product() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            assert_eq!(spec.inv(0), Err(FieldError::ZeroInverse));
            for a in 1..spec.q() {
                let a = a as Word;
                let inv = spec.inv(a).unwrap();
                assert_eq!(spec.poly_mul(a, inv), 1, "{f}: {a:#x} * {inv:#x}");
            }
        }
        assert_eq!(FieldSpec::new(FieldId::Gf4).inv(2), Ok(3));
        assert_eq!(FieldSpec::new(FieldId::Gf16).inv(2), Ok(9));
        assert_eq!(FieldSpec::new(FieldId::Gf256).inv(0x53), Ok(0xCA));
    }

    #[test]
    fn mul_byte_multiplies_every_slot() {
        let gf4 = FieldSpec::new(FieldId::Gf4);
        // 0x1B packs [3, 2, 1, 0]; doubling each gives [1, 3, 2, 0] = 0x2D.
        assert_eq!(gf4.mul_byte(2, 0x1B), 0x2D);
        assert_eq!(gf4.mul_byte(0, 0x1B), 0x00);
        assert_eq!(gf4.mul_byte(1, 0x1B), 0x1B);

        let gf16 = FieldSpec::new(FieldId::Gf16);
        // 0x91 packs [1, 9]; doubling gives [2, 1] = 0x12.
        assert_eq!(gf16.mul_byte(2, 0x91), 0x12);

        let gf256 = FieldSpec::new(FieldId::Gf256);
        assert_eq!(gf256.mul_byte(0x02, 0x80), 0x1B);
    }

    #[test]
    fn pack_unpack_round_trip() {
        let gf4 = FieldSpec::new(FieldId::Gf4);
        assert_eq!(gf4.pack_words(&[3, 2, 1, 0]).unwrap(), vec![0x1B]);
        assert_eq!(gf4.unpack_words(&[0x1B]), vec![3, 2, 1, 0]);

        let gf2 = FieldSpec::new(FieldId::Gf2);
        assert_eq!(gf2.pack_words(&[1, 0, 1, 1, 0, 0, 0, 1]).unwrap(), vec![0x8D]);

        let gf256 = FieldSpec::new(FieldId::Gf256);
        assert_eq!(gf256.pack_words(&[0xAB, 0xCD]).unwrap(), vec![0xAB, 0xCD]);

        // Every byte value survives unpack/pack for every field.
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let bytes: Vec<u8> = (0..=255).collect();
            let words = spec.unpack_words(&bytes);
            assert_eq!(words.len(), 256 * spec.words_per_byte() as usize);
            assert!(words.iter().all(|&w| spec.contains(w)));
            assert_eq!(spec.pack_words(&words).unwrap(), bytes);
        }
    }

    #[test]
    fn pack_rejects_bad_input() {
        let gf16 = FieldSpec::new(FieldId::Gf16);
        assert_eq!(
            gf16.pack_words(&[1, 2, 3]),
            Err(FieldError::PartialByte { count: 3, words_per_byte: 2, q: 16 })
        );
        assert_eq!(
            gf16.pack_words(&[1, 16]),
            Err(FieldError::WordOutOfRange { word: 16, q: 16 })
        );
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for f in [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16] {
            let spec = FieldSpec::new(f);
            let q = spec.q();
            for a in 0..q {
                let a = a as Word;
                for b in 0..q {
                    let b = b as Word;
                    assert_eq!(spec.poly_mul(a, b), spec.poly_mul(b, a));
                    for c in 0..q {
                        let c = c as Word;
                        assert_eq!(
                            spec.poly_mul(a, spec.poly_mul(b, c)),
                            spec.poly_mul(spec.poly_mul(a, b), c)
                        );
                        assert_eq!(
                            spec.poly_mul(a, spec.add(b, c)),
                            spec.add(spec.poly_mul(a, b), spec.poly_mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn plane_masks_tile_the_word() {
        for f in FieldId::ALL {
            let spec = FieldSpec::new(f);
            let mut union = 0u64;
            for k in 0..spec.word_bits() {
                let m = spec.plane_mask64(k);
                assert_eq!(union & m, 0, "planes must not overlap");
                union |= m;
            }
            assert_eq!(union, u64::MAX, "planes must cover all bits");
        }
    }
}

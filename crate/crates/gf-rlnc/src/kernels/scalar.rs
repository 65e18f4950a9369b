//! Portable kernel backends: plain table lookups and 64-bit bit-plane
//! multiplication. These are the fallbacks every wider kernel degrades to
//! when its instruction set is missing, and the behavior every SIMD backend
//! must reproduce bit for bit.

use crate::field::{FieldId, FieldSpec, Word};
use crate::tables::FieldTables;

/// Per-coefficient constants for the integer-multiply kernels.
///
/// For bit plane `k < w`, `masks[k]` selects bit `k` of every word slot and
/// `pows[k] = c * x^k`. A packed operand `x` then satisfies
///
/// ```text
/// c * x = XOR over k of ((x & masks[k]) >> k) * pows[k]
/// ```
///
/// with ordinary integer multiplication: after the shift each selected bit
/// sits at a word-slot base, and each factor is below `2^w`, so every
/// partial product stays inside its own slot and no carries cross word
/// boundaries. The masks are byte-replicated, which keeps the identity
/// independent of lane width and byte order.
pub(super) struct BitPlanes {
    pub count: usize,
    pub masks: [u64; 8],
    pub pows: [u64; 8],
}

/// [`BitPlanes`] narrowed to the 32-bit lanes the vector multiply uses.
pub(super) struct BitPlanes32 {
    pub count: usize,
    pub masks: [u32; 8],
    pub pows: [u32; 8],
}

impl BitPlanes {
    pub fn for_coefficient(spec: &FieldSpec, tables: &FieldTables, c: Word) -> BitPlanes {
        let w = spec.word_bits() as usize;
        let pow = tables.pow(c);
        let mut planes = BitPlanes { count: w, masks: [0; 8], pows: [0; 8] };
        for (k, &p) in pow.iter().enumerate() {
            planes.masks[k] = spec.plane_mask64(k as u32);
            planes.pows[k] = u64::from(p);
        }
        planes
    }

    /// Truncating the byte-replicated masks keeps the same per-byte pattern.
    pub fn narrow(&self) -> BitPlanes32 {
        let mut n = BitPlanes32 { count: self.count, masks: [0; 8], pows: [0; 8] };
        for k in 0..self.count {
            n.masks[k] = self.masks[k] as u32;
            n.pows[k] = self.pows[k] as u32;
        }
        n
    }
}

/// `b ^= c * a`, one byte at a time through the lookup tables. GF(256) uses
/// the full product table; sub-byte fields use the nibble tables, which
/// multiply all words packed in a byte at once.
pub(super) fn madd_scalar_table(tables: &FieldTables, b: &mut [u8], a: &[u8], c: Word) {
    if tables.spec().field() == FieldId::Gf256 {
        let row = tables.mul_row(c);
        for (bb, &aa) in b.iter_mut().zip(a) {
            *bb ^= row[aa as usize];
        }
    } else {
        let tl = tables.tl(c);
        let th = tables.th(c);
        for (bb, &aa) in b.iter_mut().zip(a) {
            *bb ^= tl[(aa & 0x0F) as usize] ^ th[(aa >> 4) as usize];
        }
    }
}

/// `b = c * b`, one byte at a time through the lookup tables.
pub(super) fn mul_scalar_table(tables: &FieldTables, b: &mut [u8], c: Word) {
    if tables.spec().field() == FieldId::Gf256 {
        let row = tables.mul_row(c);
        for bb in b.iter_mut() {
            *bb = row[*bb as usize];
        }
    } else {
        let tl = tables.tl(c);
        let th = tables.th(c);
        for bb in b.iter_mut() {
            *bb = tl[(*bb & 0x0F) as usize] ^ th[(*bb >> 4) as usize];
        }
    }
}

/// `b ^= c * a` on 64-bit lanes via the bit-plane identity.
pub(super) fn madd_imul64(spec: &FieldSpec, tables: &FieldTables, b: &mut [u8], a: &[u8], c: Word) {
    let planes = BitPlanes::for_coefficient(spec, tables, c);
    for (bb, aa) in b.chunks_exact_mut(8).zip(a.chunks_exact(8)) {
        let x = u64::from_ne_bytes(aa.try_into().unwrap());
        let y = u64::from_ne_bytes((&*bb).try_into().unwrap()) ^ mul_planes(x, &planes);
        bb.copy_from_slice(&y.to_ne_bytes());
    }
}

/// `b = c * b` on 64-bit lanes via the bit-plane identity.
pub(super) fn mul_imul64(spec: &FieldSpec, tables: &FieldTables, b: &mut [u8], c: Word) {
    let planes = BitPlanes::for_coefficient(spec, tables, c);
    for bb in b.chunks_exact_mut(8) {
        let x = u64::from_ne_bytes((&*bb).try_into().unwrap());
        bb.copy_from_slice(&mul_planes(x, &planes).to_ne_bytes());
    }
}

#[inline]
fn mul_planes(x: u64, planes: &BitPlanes) -> u64 {
    let mut acc = 0u64;
    for k in 0..planes.count {
        acc ^= ((x & planes.masks[k]) >> k).wrapping_mul(planes.pows[k]);
    }
    acc
}

/// `b ^= a` on 64-bit lanes.
pub(super) fn xor64(b: &mut [u8], a: &[u8]) {
    for (bb, aa) in b.chunks_exact_mut(8).zip(a.chunks_exact(8)) {
        let x = u64::from_ne_bytes((&*bb).try_into().unwrap())
            ^ u64::from_ne_bytes(aa.try_into().unwrap());
        bb.copy_from_slice(&x.to_ne_bytes());
    }
}

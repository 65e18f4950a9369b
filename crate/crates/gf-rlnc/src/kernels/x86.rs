//! x86_64 vector backends.
//!
//! Two kernel families, each at three widths:
//!
//! * Byte-shuffle kernels split every byte into nibbles and use the in-lane
//!   byte permute (`pshufb` and its wider forms) as sixteen parallel table
//!   lookups into the per-coefficient nibble tables. They need SSSE3, AVX2
//!   or AVX-512BW.
//! * Integer-multiply kernels split packed words into bit planes and
//!   evaluate `c * x` with one 32-bit lane multiply per plane; partial
//!   products cannot carry across word slots because every factor fits in
//!   `w` bits. They need SSE4.1, AVX2 or AVX-512F, which makes the 512-bit
//!   variant the widest kernel available on foundation-only CPUs, where the
//!   512-bit byte shuffle is absent.
//!
//! Every function here requires the caller to have verified the matching
//! CPU feature at runtime and to pass pointers valid for `len` bytes with
//! `len` a multiple of 64. Loads and stores are unaligned-tolerant, so the
//! 64-byte region alignment is a performance guarantee, not a safety one.

use core::arch::x86_64::*;

use super::scalar::BitPlanes32;

// 128-bit xor needs only SSE2, which is part of the x86_64 baseline.

/// `b ^= a` on 128-bit blocks.
///
/// # Safety
/// `b` and `a` must be valid for `len` bytes, `len` a multiple of 16.
pub(super) unsafe fn xor128(b: *mut u8, a: *const u8, len: usize) {
    let mut off = 0;
    while off < len {
        let av = _mm_loadu_si128(a.add(off).cast());
        let bv = _mm_loadu_si128(b.add(off).cast());
        _mm_storeu_si128(b.add(off).cast(), _mm_xor_si128(av, bv));
        off += 16;
    }
}

/// `b ^= a` on 256-bit blocks.
///
/// # Safety
/// AVX2 must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 32.
#[target_feature(enable = "avx2")]
pub(super) unsafe fn xor256(b: *mut u8, a: *const u8, len: usize) {
    let mut off = 0;
    while off < len {
        let av = _mm256_loadu_si256(a.add(off).cast());
        let bv = _mm256_loadu_si256(b.add(off).cast());
        _mm256_storeu_si256(b.add(off).cast(), _mm256_xor_si256(av, bv));
        off += 32;
    }
}

/// `b ^= a` on 512-bit blocks.
///
/// # Safety
/// AVX-512F must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 64.
#[target_feature(enable = "avx512f")]
pub(super) unsafe fn xor512(b: *mut u8, a: *const u8, len: usize) {
    let mut off = 0;
    while off < len {
        let av = _mm512_loadu_si512(a.add(off).cast());
        let bv = _mm512_loadu_si512(b.add(off).cast());
        _mm512_storeu_si512(b.add(off).cast(), _mm512_xor_si512(av, bv));
        off += 64;
    }
}

/// `b ^= c * a` via 128-bit nibble shuffles.
///
/// # Safety
/// SSSE3 must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 16.
#[target_feature(enable = "ssse3")]
pub(super) unsafe fn madd_shuffle128(
    tl: &[u8; 16],
    th: &[u8; 16],
    b: *mut u8,
    a: *const u8,
    len: usize,
) {
    let tlv = _mm_loadu_si128(tl.as_ptr().cast());
    let thv = _mm_loadu_si128(th.as_ptr().cast());
    let lo_mask = _mm_set1_epi8(0x0F);
    let hi_mask = _mm_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let av = _mm_loadu_si128(a.add(off).cast());
        let lo = _mm_shuffle_epi8(tlv, _mm_and_si128(av, lo_mask));
        let hi = _mm_shuffle_epi8(thv, _mm_srli_epi64::<4>(_mm_and_si128(av, hi_mask)));
        let prod = _mm_xor_si128(lo, hi);
        let bv = _mm_loadu_si128(b.add(off).cast());
        _mm_storeu_si128(b.add(off).cast(), _mm_xor_si128(prod, bv));
        off += 16;
    }
}

/// `b = c * b` via 128-bit nibble shuffles.
///
/// # Safety
/// See [`madd_shuffle128`].
#[target_feature(enable = "ssse3")]
pub(super) unsafe fn mul_shuffle128(tl: &[u8; 16], th: &[u8; 16], b: *mut u8, len: usize) {
    let tlv = _mm_loadu_si128(tl.as_ptr().cast());
    let thv = _mm_loadu_si128(th.as_ptr().cast());
    let lo_mask = _mm_set1_epi8(0x0F);
    let hi_mask = _mm_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let bv = _mm_loadu_si128(b.add(off).cast());
        let lo = _mm_shuffle_epi8(tlv, _mm_and_si128(bv, lo_mask));
        let hi = _mm_shuffle_epi8(thv, _mm_srli_epi64::<4>(_mm_and_si128(bv, hi_mask)));
        _mm_storeu_si128(b.add(off).cast(), _mm_xor_si128(lo, hi));
        off += 16;
    }
}

/// `b ^= c * a` via 256-bit nibble shuffles. The nibble tables are
/// broadcast to both 128-bit lanes because the byte permute looks up
/// within its own lane only.
///
/// # Safety
/// AVX2 must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 32.
#[target_feature(enable = "avx2")]
pub(super) unsafe fn madd_shuffle256(
    tl: &[u8; 16],
    th: &[u8; 16],
    b: *mut u8,
    a: *const u8,
    len: usize,
) {
    let tlv = _mm256_broadcastsi128_si256(_mm_loadu_si128(tl.as_ptr().cast()));
    let thv = _mm256_broadcastsi128_si256(_mm_loadu_si128(th.as_ptr().cast()));
    let lo_mask = _mm256_set1_epi8(0x0F);
    let hi_mask = _mm256_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let av = _mm256_loadu_si256(a.add(off).cast());
        let lo = _mm256_shuffle_epi8(tlv, _mm256_and_si256(av, lo_mask));
        let hi = _mm256_shuffle_epi8(thv, _mm256_srli_epi64::<4>(_mm256_and_si256(av, hi_mask)));
        let prod = _mm256_xor_si256(lo, hi);
        let bv = _mm256_loadu_si256(b.add(off).cast());
        _mm256_storeu_si256(b.add(off).cast(), _mm256_xor_si256(prod, bv));
        off += 32;
    }
}

/// `b = c * b` via 256-bit nibble shuffles.
///
/// # Safety
/// See [`madd_shuffle256`].
#[target_feature(enable = "avx2")]
pub(super) unsafe fn mul_shuffle256(tl: &[u8; 16], th: &[u8; 16], b: *mut u8, len: usize) {
    let tlv = _mm256_broadcastsi128_si256(_mm_loadu_si128(tl.as_ptr().cast()));
    let thv = _mm256_broadcastsi128_si256(_mm_loadu_si128(th.as_ptr().cast()));
    let lo_mask = _mm256_set1_epi8(0x0F);
    let hi_mask = _mm256_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let bv = _mm256_loadu_si256(b.add(off).cast());
        let lo = _mm256_shuffle_epi8(tlv, _mm256_and_si256(bv, lo_mask));
        let hi = _mm256_shuffle_epi8(thv, _mm256_srli_epi64::<4>(_mm256_and_si256(bv, hi_mask)));
        _mm256_storeu_si256(b.add(off).cast(), _mm256_xor_si256(lo, hi));
        off += 32;
    }
}

/// `b ^= c * a` via 512-bit nibble shuffles, one whole block per iteration.
/// The nibble tables are broadcast to all four 128-bit lanes.
///
/// # Safety
/// AVX-512BW must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 64.
#[target_feature(enable = "avx512bw")]
pub(super) unsafe fn madd_shuffle512(
    tl: &[u8; 16],
    th: &[u8; 16],
    b: *mut u8,
    a: *const u8,
    len: usize,
) {
    let tlv = _mm512_broadcast_i32x4(_mm_loadu_si128(tl.as_ptr().cast()));
    let thv = _mm512_broadcast_i32x4(_mm_loadu_si128(th.as_ptr().cast()));
    let lo_mask = _mm512_set1_epi8(0x0F);
    let hi_mask = _mm512_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let av = _mm512_loadu_si512(a.add(off).cast());
        let lo = _mm512_shuffle_epi8(tlv, _mm512_and_si512(av, lo_mask));
        let hi = _mm512_shuffle_epi8(thv, _mm512_srli_epi64::<4>(_mm512_and_si512(av, hi_mask)));
        let prod = _mm512_xor_si512(lo, hi);
        let bv = _mm512_loadu_si512(b.add(off).cast());
        _mm512_storeu_si512(b.add(off).cast(), _mm512_xor_si512(prod, bv));
        off += 64;
    }
}

/// `b = c * b` via 512-bit nibble shuffles.
///
/// # Safety
/// See [`madd_shuffle512`].
#[target_feature(enable = "avx512bw")]
pub(super) unsafe fn mul_shuffle512(tl: &[u8; 16], th: &[u8; 16], b: *mut u8, len: usize) {
    let tlv = _mm512_broadcast_i32x4(_mm_loadu_si128(tl.as_ptr().cast()));
    let thv = _mm512_broadcast_i32x4(_mm_loadu_si128(th.as_ptr().cast()));
    let lo_mask = _mm512_set1_epi8(0x0F);
    let hi_mask = _mm512_set1_epi8(0xF0u8 as i8);
    let mut off = 0;
    while off < len {
        let bv = _mm512_loadu_si512(b.add(off).cast());
        let lo = _mm512_shuffle_epi8(tlv, _mm512_and_si512(bv, lo_mask));
        let hi = _mm512_shuffle_epi8(thv, _mm512_srli_epi64::<4>(_mm512_and_si512(bv, hi_mask)));
        _mm512_storeu_si512(b.add(off).cast(), _mm512_xor_si512(lo, hi));
        off += 64;
    }
}

/// `b ^= c * a` via 128-bit lane multiplies over bit planes.
///
/// # Safety
/// SSE4.1 must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 16.
#[target_feature(enable = "sse4.1")]
pub(super) unsafe fn madd_imul128(planes: &BitPlanes32, b: *mut u8, a: *const u8, len: usize) {
    let mut masks = [_mm_setzero_si128(); 8];
    let mut pows = [_mm_setzero_si128(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let av = _mm_loadu_si128(a.add(off).cast());
        let mut acc = _mm_setzero_si128();
        for k in 0..planes.count {
            let t = _mm_srl_epi32(_mm_and_si128(av, masks[k]), shifts[k]);
            acc = _mm_xor_si128(acc, _mm_mullo_epi32(t, pows[k]));
        }
        let bv = _mm_loadu_si128(b.add(off).cast());
        _mm_storeu_si128(b.add(off).cast(), _mm_xor_si128(acc, bv));
        off += 16;
    }
}

/// `b = c * b` via 128-bit lane multiplies over bit planes.
///
/// # Safety
/// See [`madd_imul128`].
#[target_feature(enable = "sse4.1")]
pub(super) unsafe fn mul_imul128(planes: &BitPlanes32, b: *mut u8, len: usize) {
    let mut masks = [_mm_setzero_si128(); 8];
    let mut pows = [_mm_setzero_si128(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let bv = _mm_loadu_si128(b.add(off).cast());
        let mut acc = _mm_setzero_si128();
        for k in 0..planes.count {
            let t = _mm_srl_epi32(_mm_and_si128(bv, masks[k]), shifts[k]);
            acc = _mm_xor_si128(acc, _mm_mullo_epi32(t, pows[k]));
        }
        _mm_storeu_si128(b.add(off).cast(), acc);
        off += 16;
    }
}

/// `b ^= c * a` via 256-bit lane multiplies over bit planes.
///
/// # Safety
/// AVX2 must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 32.
#[target_feature(enable = "avx2")]
pub(super) unsafe fn madd_imul256(planes: &BitPlanes32, b: *mut u8, a: *const u8, len: usize) {
    let mut masks = [_mm256_setzero_si256(); 8];
    let mut pows = [_mm256_setzero_si256(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm256_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm256_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let av = _mm256_loadu_si256(a.add(off).cast());
        let mut acc = _mm256_setzero_si256();
        for k in 0..planes.count {
            let t = _mm256_srl_epi32(_mm256_and_si256(av, masks[k]), shifts[k]);
            acc = _mm256_xor_si256(acc, _mm256_mullo_epi32(t, pows[k]));
        }
        let bv = _mm256_loadu_si256(b.add(off).cast());
        _mm256_storeu_si256(b.add(off).cast(), _mm256_xor_si256(acc, bv));
        off += 32;
    }
}

/// `b = c * b` via 256-bit lane multiplies over bit planes.
///
/// # Safety
/// See [`madd_imul256`].
#[target_feature(enable = "avx2")]
pub(super) unsafe fn mul_imul256(planes: &BitPlanes32, b: *mut u8, len: usize) {
    let mut masks = [_mm256_setzero_si256(); 8];
    let mut pows = [_mm256_setzero_si256(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm256_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm256_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let bv = _mm256_loadu_si256(b.add(off).cast());
        let mut acc = _mm256_setzero_si256();
        for k in 0..planes.count {
            let t = _mm256_srl_epi32(_mm256_and_si256(bv, masks[k]), shifts[k]);
            acc = _mm256_xor_si256(acc, _mm256_mullo_epi32(t, pows[k]));
        }
        _mm256_storeu_si256(b.add(off).cast(), acc);
        off += 32;
    }
}

/// `b ^= c * a` via 512-bit lane multiplies over bit planes, one whole
/// block per iteration. This is the widest kernel that runs without the
/// 512-bit byte shuffle.
///
/// # Safety
/// AVX-512F must be available; `b` and `a` must be valid for `len` bytes,
/// `len` a multiple of 64.
#[target_feature(enable = "avx512f")]
pub(super) unsafe fn madd_imul512(planes: &BitPlanes32, b: *mut u8, a: *const u8, len: usize) {
    let mut masks = [_mm512_setzero_si512(); 8];
    let mut pows = [_mm512_setzero_si512(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm512_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm512_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let av = _mm512_loadu_si512(a.add(off).cast());
        let mut acc = _mm512_setzero_si512();
        for k in 0..planes.count {
            let t = _mm512_srl_epi32(_mm512_and_si512(av, masks[k]), shifts[k]);
            acc = _mm512_xor_si512(acc, _mm512_mullo_epi32(t, pows[k]));
        }
        let bv = _mm512_loadu_si512(b.add(off).cast());
        _mm512_storeu_si512(b.add(off).cast(), _mm512_xor_si512(acc, bv));
        off += 64;
    }
}

/// `b = c * b` via 512-bit lane multiplies over bit planes.
///
/// # Safety
/// See [`madd_imul512`].
#[target_feature(enable = "avx512f")]
pub(super) unsafe fn mul_imul512(planes: &BitPlanes32, b: *mut u8, len: usize) {
    let mut masks = [_mm512_setzero_si512(); 8];
    let mut pows = [_mm512_setzero_si512(); 8];
    let mut shifts = [_mm_setzero_si128(); 8];
    for k in 0..planes.count {
        masks[k] = _mm512_set1_epi32(planes.masks[k] as i32);
        pows[k] = _mm512_set1_epi32(planes.pows[k] as i32);
        shifts[k] = _mm_cvtsi32_si128(k as i32);
    }
    let mut off = 0;
    while off < len {
        let bv = _mm512_loadu_si512(b.add(off).cast());
        let mut acc = _mm512_setzero_si512();
        for k in 0..planes.count {
            let t = _mm512_srl_epi32(_mm512_and_si512(bv, masks[k]), shifts[k]);
            acc = _mm512_xor_si512(acc, _mm512_mullo_epi32(t, pows[k]));
        }
        _mm512_storeu_si512(b.add(off).cast(), acc);
        off += 64;
    }
}

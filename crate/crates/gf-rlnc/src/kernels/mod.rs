//! Region kernels: multiply-and-add, scale and xor over aligned buffers,
//! with runtime selection between scalar, integer-multiply and byte-shuffle
//! implementations at block widths from 64 to 512 bits.
//!
//! The split between mechanism and policy is deliberate:
//!
//! * [`madd_region`], [`mul_region`] and [`xor_region`] always produce the
//!   correct result for any well-formed call. A kernel id naming a vector
//!   width the CPU lacks silently runs a portable backend with bit-identical
//!   output, so callers can treat kernel choice purely as a performance
//!   knob and no code path can hit an illegal instruction.
//! * [`select_kernel`] and [`supported_kernels`] implement the policy side:
//!   which kernels are worth running given a [`FeatureSet`]. The benchmark
//!   CLI and the automatic selection go through these.
//!
//! Every kernel shares the same trivial-case contract: coefficient 0 leaves
//! the destination untouched and coefficient 1 degenerates to a plain xor
//! at the kernel's block width, so fields where those coefficients dominate
//! (half of all draws over GF(4)) skip the multiply machinery entirely.

pub mod features;
mod scalar;
#[cfg(target_arch = "x86_64")]
mod x86;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{FieldId, FieldSpec, Word};
use crate::tables::FieldTables;

pub use features::{detect_features, FeatureSet};

/// Kernel algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Plain xor of blocks. Complete only over GF(2), where every nonzero
    /// coefficient is 1.
    Xor,
    /// Byte-at-a-time lookup tables; the 64-bit baseline every CPU runs.
    ScalarTable,
    /// Bit-plane decomposition with wide integer multiplies.
    Imul,
    /// Nibble-table lookups via in-lane byte shuffle.
    Shuffle,
}

/// A concrete kernel: algorithm family plus block width in bits.
///
/// Valid shapes: `xor` and `imul` at 64/128/256/512, `shuffle` at
/// 128/256/512 (there is no sub-16-byte byte permute), and the scalar table
/// kernel at its fixed 64-bit width. Stable names look like `"shuffle512"`,
/// `"imul256"`, `"xor64"`; the scalar kernel is plain `"scalar"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelId {
    algorithm: Algorithm,
    block_bits: u16,
}

/// All twelve valid kernel ids in stable listing order.
pub const ALL_KERNELS: [KernelId; 12] = [
    KernelId { algorithm: Algorithm::Xor, block_bits: 64 },
    KernelId { algorithm: Algorithm::Xor, block_bits: 128 },
    KernelId { algorithm: Algorithm::Xor, block_bits: 256 },
    KernelId { algorithm: Algorithm::Xor, block_bits: 512 },
    KernelId::SCALAR,
    KernelId { algorithm: Algorithm::Imul, block_bits: 64 },
    KernelId { algorithm: Algorithm::Imul, block_bits: 128 },
    KernelId { algorithm: Algorithm::Imul, block_bits: 256 },
    KernelId { algorithm: Algorithm::Imul, block_bits: 512 },
    KernelId { algorithm: Algorithm::Shuffle, block_bits: 128 },
    KernelId { algorithm: Algorithm::Shuffle, block_bits: 256 },
    KernelId { algorithm: Algorithm::Shuffle, block_bits: 512 },
];

impl KernelId {
    pub const SCALAR: KernelId = KernelId { algorithm: Algorithm::ScalarTable, block_bits: 64 };
    pub const XOR64: KernelId = KernelId { algorithm: Algorithm::Xor, block_bits: 64 };
    pub const IMUL64: KernelId = KernelId { algorithm: Algorithm::Imul, block_bits: 64 };

    /// Validated constructor; rejects shapes like a 64-bit shuffle.
    pub fn new(algorithm: Algorithm, block_bits: u16) -> Result<KernelId, KernelError> {
        let id = KernelId { algorithm, block_bits };
        let valid = match algorithm {
            Algorithm::Xor | Algorithm::Imul => matches!(block_bits, 64 | 128 | 256 | 512),
            Algorithm::ScalarTable => block_bits == 64,
            Algorithm::Shuffle => matches!(block_bits, 128 | 256 | 512),
        };
        if valid {
            Ok(id)
        } else {
            Err(KernelError::InvalidShape { algorithm, block_bits })
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn block_bits(&self) -> u16 {
        self.block_bits
    }

    /// Stable identifier, accepted back by [`KernelId::from_str`].
    pub fn name(&self) -> String {
        match self.algorithm {
            Algorithm::ScalarTable => "scalar".to_string(),
            Algorithm::Xor => format!("xor{}", self.block_bits),
            Algorithm::Imul => format!("imul{}", self.block_bits),
            Algorithm::Shuffle => format!("shuffle{}", self.block_bits),
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for KernelId {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<KernelId, KernelError> {
        if s == "scalar" {
            return Ok(KernelId::SCALAR);
        }
        for (prefix, algorithm) in
            [("xor", Algorithm::Xor), ("imul", Algorithm::Imul), ("shuffle", Algorithm::Shuffle)]
        {
            if let Some(rest) = s.strip_prefix(prefix) {
                let block_bits = rest
                    .parse::<u16>()
                    .map_err(|_| KernelError::UnknownKernel(s.to_string()))?;
                return KernelId::new(algorithm, block_bits);
            }
        }
        Err(KernelError::UnknownKernel(s.to_string()))
    }
}

/// Errors from kernel construction, selection and the region entry points.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    /// Algorithm/width combination that no kernel implements.
    #[error("no {algorithm:?} kernel exists at {block_bits}-bit blocks")]
    InvalidShape { algorithm: Algorithm, block_bits: u16 },
    /// Unparseable kernel name.
    #[error("unknown kernel id {0:?}")]
    UnknownKernel(String),
    /// Xor kernels compute `b ^= a` only, which is multiply-and-add solely
    /// over GF(2).
    #[error("kernel {kernel} is not defined over {field}")]
    InvalidKernelForField { kernel: KernelId, field: FieldId },
    /// An explicitly requested kernel needs CPU features that are absent.
    #[error("kernel {kernel} requires CPU features not present on this machine")]
    Unavailable { kernel: KernelId },
    /// Region base address not 64-byte aligned.
    #[error("region pointer {ptr:#x} is not 64-byte aligned")]
    Misaligned { ptr: usize },
    /// Region length not a whole number of 64-byte blocks.
    #[error("region length {len} is not a multiple of 64")]
    LengthNotBlockMultiple { len: usize },
    /// Source and destination lengths differ.
    #[error("region lengths differ: destination {dst}, source {src}")]
    LengthMismatch { dst: usize, src: usize },
    /// Coefficient outside the field.
    #[error("coefficient {c:#x} out of range for GF({q})")]
    CoefficientOutOfRange { c: Word, q: u16 },
}

/// True if the kernel computes multiply-and-add for this field. Only the
/// xor family is restricted (to GF(2)); everything else covers all fields.
pub fn kernel_valid_for(kernel: KernelId, field: FieldId) -> bool {
    kernel.algorithm != Algorithm::Xor || field == FieldId::Gf2
}

/// True if the feature set lets this kernel run at full native width.
///
/// 64-bit kernels are always available. The 512-bit shuffle needs the byte
/// and word subset; the 512-bit xor and integer multiply run on the
/// foundation subset alone.
pub fn kernel_available(kernel: KernelId, features: &FeatureSet) -> bool {
    match kernel.block_bits {
        64 => true,
        128 => features.simd128_byte_permute,
        256 => features.simd256_byte_permute,
        512 => match kernel.algorithm {
            Algorithm::Shuffle => features.simd512_byte_and_word,
            _ => features.simd512_foundation,
        },
        _ => false,
    }
}

/// Kernels that are both defined for the field and available under the
/// feature set, in the stable [`ALL_KERNELS`] order.
pub fn supported_kernels(spec: &FieldSpec, features: &FeatureSet) -> Vec<KernelId> {
    ALL_KERNELS
        .into_iter()
        .filter(|&k| kernel_valid_for(k, spec.field()) && kernel_available(k, features))
        .collect()
}

/// Pick a kernel for the field under the feature set.
///
/// An explicit `preference` is validated (defined for the field, available
/// on the features) and returned as-is. Otherwise: GF(2) gets the widest
/// available xor; other fields prefer the byte shuffle at the widest
/// available width, except that a foundation-only 512-bit CPU uses the
/// 512-bit integer multiply, which beats narrower shuffles there. Scalar is
/// the fallback when no vector support exists.
pub fn select_kernel(
    spec: &FieldSpec,
    features: &FeatureSet,
    preference: Option<KernelId>,
) -> Result<KernelId, KernelError> {
    if let Some(kernel) = preference {
        if !kernel_valid_for(kernel, spec.field()) {
            return Err(KernelError::InvalidKernelForField { kernel, field: spec.field() });
        }
        if !kernel_available(kernel, features) {
            return Err(KernelError::Unavailable { kernel });
        }
        return Ok(kernel);
    }
    if spec.field() == FieldId::Gf2 {
        let block_bits = if features.simd512_foundation {
            512
        } else if features.simd256_byte_permute {
            256
        } else if features.simd128_byte_permute {
            128
        } else {
            64
        };
        return Ok(KernelId { algorithm: Algorithm::Xor, block_bits });
    }
    Ok(if features.simd512_byte_and_word {
        KernelId { algorithm: Algorithm::Shuffle, block_bits: 512 }
    } else if features.simd512_foundation {
        KernelId { algorithm: Algorithm::Imul, block_bits: 512 }
    } else if features.simd256_byte_permute {
        KernelId { algorithm: Algorithm::Shuffle, block_bits: 256 }
    } else if features.simd128_byte_permute {
        KernelId { algorithm: Algorithm::Shuffle, block_bits: 128 }
    } else {
        KernelId::SCALAR
    })
}

fn check_region(r: &[u8]) -> Result<(), KernelError> {
    let ptr = r.as_ptr() as usize;
    if !ptr.is_multiple_of(crate::region::BLOCK_BYTES) {
        return Err(KernelError::Misaligned { ptr });
    }
    if !r.len().is_multiple_of(crate::region::BLOCK_BYTES) {
        return Err(KernelError::LengthNotBlockMultiple { len: r.len() });
    }
    Ok(())
}

fn check_pair(b: &[u8], a: &[u8]) -> Result<(), KernelError> {
    check_region(b)?;
    check_region(a)?;
    if b.len() != a.len() {
        return Err(KernelError::LengthMismatch { dst: b.len(), src: a.len() });
    }
    Ok(())
}

#[cfg(debug_assertions)]
static MADD_CALLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

#[inline]
fn count_madd() {
    #[cfg(debug_assertions)]
    MADD_CALLS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
}

/// Number of accepted [`madd_region`] calls since the last reset. Debug
/// builds only; lets tests assert workload proportionality (doubling the
/// generation size must double the call count).
#[cfg(debug_assertions)]
pub fn madd_call_count() -> u64 {
    MADD_CALLS.load(std::sync::atomic::Ordering::Relaxed)
}

/// Reset the [`madd_call_count`] counter. Debug builds only.
#[cfg(debug_assertions)]
pub fn reset_madd_call_count() {
    MADD_CALLS.store(0, std::sync::atomic::Ordering::Relaxed)
}

/// Multiply-and-add over a region: `b ^= c * a` word-wise on packed bytes.
///
/// Requirements checked on entry: both slices 64-byte aligned, lengths equal
/// and a multiple of 64, `c` inside the field, and the kernel defined for
/// the field. Coefficient 0 returns without touching `b`; coefficient 1
/// runs the xor path at the kernel's block width. The call never fails for
/// lack of CPU features; missing instruction sets fall back to portable
/// code with identical results.
pub fn madd_region(
    kernel: KernelId,
    spec: &FieldSpec,
    tables: &FieldTables,
    b: &mut [u8],
    a: &[u8],
    c: Word,
) -> Result<(), KernelError> {
    debug_assert_eq!(tables.spec(), spec, "tables built for a different field");
    if !kernel_valid_for(kernel, spec.field()) {
        return Err(KernelError::InvalidKernelForField { kernel, field: spec.field() });
    }
    check_pair(b, a)?;
    if !spec.contains(c) {
        return Err(KernelError::CoefficientOutOfRange { c, q: spec.q() });
    }
    count_madd();
    if c == 0 {
        return Ok(());
    }
    if c == 1 {
        dispatch_xor(kernel.block_bits, b, a);
        return Ok(());
    }
    match kernel.algorithm {
        // Valid only over GF(2), where c < 2 is already handled above.
        Algorithm::Xor => unreachable!("xor kernel with non-trivial coefficient"),
        Algorithm::ScalarTable => scalar::madd_scalar_table(tables, b, a, c),
        Algorithm::Imul => dispatch_madd_imul(kernel.block_bits, spec, tables, b, a, c),
        Algorithm::Shuffle => dispatch_madd_shuffle(kernel.block_bits, tables, b, a, c),
    }
    Ok(())
}

/// Scale a region in place: `b = c * b` word-wise on packed bytes.
///
/// Same requirements and fallback behavior as [`madd_region`].
/// Coefficient 1 returns immediately; coefficient 0 zero-fills `b`.
pub fn mul_region(
    kernel: KernelId,
    spec: &FieldSpec,
    tables: &FieldTables,
    b: &mut [u8],
    c: Word,
) -> Result<(), KernelError> {
    debug_assert_eq!(tables.spec(), spec, "tables built for a different field");
    if !kernel_valid_for(kernel, spec.field()) {
        return Err(KernelError::InvalidKernelForField { kernel, field: spec.field() });
    }
    check_region(b)?;
    if !spec.contains(c) {
        return Err(KernelError::CoefficientOutOfRange { c, q: spec.q() });
    }
    if c == 1 {
        return Ok(());
    }
    if c == 0 {
        b.fill(0);
        return Ok(());
    }
    match kernel.algorithm {
        Algorithm::Xor => unreachable!("xor kernel with non-trivial coefficient"),
        Algorithm::ScalarTable => scalar::mul_scalar_table(tables, b, c),
        Algorithm::Imul => dispatch_mul_imul(kernel.block_bits, spec, tables, b, c),
        Algorithm::Shuffle => dispatch_mul_shuffle(kernel.block_bits, tables, b, c),
    }
    Ok(())
}

/// `b ^= a` over whole regions, at the widest width the CPU offers.
/// Field-independent: xor adds packed words in every binary field.
pub fn xor_region(b: &mut [u8], a: &[u8]) -> Result<(), KernelError> {
    check_pair(b, a)?;
    let widest = if cfg!(target_arch = "x86_64") {
        let isa = features::native_isa();
        if isa.avx512f {
            512
        } else if isa.avx2 {
            256
        } else {
            128
        }
    } else {
        64
    };
    dispatch_xor(widest, b, a);
    Ok(())
}

fn dispatch_xor(block_bits: u16, b: &mut [u8], a: &[u8]) {
    #[cfg(target_arch = "x86_64")]
    {
        let isa = features::native_isa();
        // SAFETY: slices are equal-length multiples of 64 (checked by the
        // caller), and each call is gated on its runtime feature probe.
        // sse2 is part of the x86_64 baseline.
        unsafe {
            match block_bits {
                128 => return x86::xor128(b.as_mut_ptr(), a.as_ptr(), b.len()),
                256 if isa.avx2 => return x86::xor256(b.as_mut_ptr(), a.as_ptr(), b.len()),
                512 if isa.avx512f => return x86::xor512(b.as_mut_ptr(), a.as_ptr(), b.len()),
                _ => {}
            }
        }
    }
    let _ = block_bits;
    scalar::xor64(b, a)
}

fn dispatch_madd_shuffle(block_bits: u16, tables: &FieldTables, b: &mut [u8], a: &[u8], c: Word) {
    #[cfg(target_arch = "x86_64")]
    {
        let isa = features::native_isa();
        let (tl, th) = (tables.tl(c), tables.th(c));
        // SAFETY: slices are equal-length multiples of 64 (checked by the
        // caller), and each call is gated on its runtime feature probe.
        unsafe {
            match block_bits {
                128 if isa.ssse3 => {
                    return x86::madd_shuffle128(tl, th, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                256 if isa.avx2 => {
                    return x86::madd_shuffle256(tl, th, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                512 if isa.avx512bw => {
                    return x86::madd_shuffle512(tl, th, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                _ => {}
            }
        }
    }
    let _ = block_bits;
    // Portable fallback: the scalar table loop reads the same nibble tables
    // and is bit-identical.
    scalar::madd_scalar_table(tables, b, a, c)
}

fn dispatch_mul_shuffle(block_bits: u16, tables: &FieldTables, b: &mut [u8], c: Word) {
    #[cfg(target_arch = "x86_64")]
    {
        let isa = features::native_isa();
        let (tl, th) = (tables.tl(c), tables.th(c));
        // SAFETY: slice is a multiple of 64 (checked by the caller), and
        // each call is gated on its runtime feature probe.
        unsafe {
            match block_bits {
                128 if isa.ssse3 => return x86::mul_shuffle128(tl, th, b.as_mut_ptr(), b.len()),
                256 if isa.avx2 => return x86::mul_shuffle256(tl, th, b.as_mut_ptr(), b.len()),
                512 if isa.avx512bw => return x86::mul_shuffle512(tl, th, b.as_mut_ptr(), b.len()),
                _ => {}
            }
        }
    }
    let _ = block_bits;
    scalar::mul_scalar_table(tables, b, c)
}

fn dispatch_madd_imul(
    block_bits: u16,
    spec: &FieldSpec,
    tables: &FieldTables,
    b: &mut [u8],
    a: &[u8],
    c: Word,
) {
    #[cfg(target_arch = "x86_64")]
    if block_bits > 64 {
        let isa = features::native_isa();
        let planes = scalar::BitPlanes::for_coefficient(spec, tables, c).narrow();
        // SAFETY: slices are equal-length multiples of 64 (checked by the
        // caller), and each call is gated on its runtime feature probe.
        unsafe {
            match block_bits {
                128 if isa.sse41 => {
                    return x86::madd_imul128(&planes, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                256 if isa.avx2 => {
                    return x86::madd_imul256(&planes, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                512 if isa.avx512f => {
                    return x86::madd_imul512(&planes, b.as_mut_ptr(), a.as_ptr(), b.len())
                }
                _ => {}
            }
        }
    }
    let _ = block_bits;
    // Portable fallback over 64-bit lanes; same bit-plane identity, so the
    // result is identical.
    scalar::madd_imul64(spec, tables, b, a, c)
}

fn dispatch_mul_imul(block_bits: u16, spec: &FieldSpec, tables: &FieldTables, b: &mut [u8], c: Word) {
    #[cfg(target_arch = "x86_64")]
    if block_bits > 64 {
        let isa = features::native_isa();
        let planes = scalar::BitPlanes::for_coefficient(spec, tables, c).narrow();
        // SAFETY: slice is a multiple of 64 (checked by the caller), and
        // each call is gated on its runtime feature probe.
        unsafe {
            match block_bits {
                128 if isa.sse41 => return x86::mul_imul128(&planes, b.as_mut_ptr(), b.len()),
                256 if isa.avx2 => return x86::mul_imul256(&planes, b.as_mut_ptr(), b.len()),
                512 if isa.avx512f => return x86::mul_imul512(&planes, b.as_mut_ptr(), b.len()),
                _ => {}
            }
        }
    }
    let _ = block_bits;
    scalar::mul_imul64(spec, tables, b, c)
}

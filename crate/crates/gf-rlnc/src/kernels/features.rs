//! Runtime CPU capability detection.
//!
//! Kernel selection is driven by a small, architecture-neutral
//! [`FeatureSet`] rather than raw CPUID bits. Each flag names the capability
//! a kernel family actually needs: a vector width plus, where it matters,
//! whether that width supports in-lane byte shuffles (the 512-bit foundation
//! subset has 32-bit integer ops but no byte shuffle; the byte/word subset
//! adds it). On x86_64 the flags map to SSSE3, AVX2, AVX-512F and
//! AVX-512BW; on other architectures everything but `scalar` is false.
//!
//! With the `simd-emulation` cargo feature the detected set reports every
//! flag as present and the dispatcher substitutes portable fallbacks for
//! missing instruction sets, so wide-block code paths stay exercisable
//! anywhere.

use std::sync::OnceLock;

/// Capabilities relevant to kernel selection on the running CPU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSet {
    /// Plain integer code. Always available.
    pub scalar: bool,
    /// 128-bit vectors with in-lane byte shuffle (x86_64: SSSE3).
    pub simd128_byte_permute: bool,
    /// 256-bit vectors with in-lane byte shuffle (x86_64: AVX2).
    pub simd256_byte_permute: bool,
    /// 512-bit vectors with word arithmetic but no byte shuffle
    /// (x86_64: AVX-512F).
    pub simd512_foundation: bool,
    /// 512-bit vectors including byte shuffle (x86_64: AVX-512BW).
    pub simd512_byte_and_word: bool,
}

impl FeatureSet {
    /// No vector support at all.
    pub const SCALAR_ONLY: FeatureSet = FeatureSet {
        scalar: true,
        simd128_byte_permute: false,
        simd256_byte_permute: false,
        simd512_foundation: false,
        simd512_byte_and_word: false,
    };

    /// Every capability present.
    pub const ALL: FeatureSet = FeatureSet {
        scalar: true,
        simd128_byte_permute: true,
        simd256_byte_permute: true,
        simd512_foundation: true,
        simd512_byte_and_word: true,
    };
}

/// Exact native instruction sets, used to pick kernel backends. Distinct
/// from [`FeatureSet`]: emulation widens the feature set, never this.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NativeIsa {
    pub ssse3: bool,
    pub sse41: bool,
    pub avx2: bool,
    pub avx512f: bool,
    pub avx512bw: bool,
}

#[cfg(target_arch = "x86_64")]
fn probe_native() -> NativeIsa {
    NativeIsa {
        ssse3: is_x86_feature_detected!("ssse3"),
        sse41: is_x86_feature_detected!("sse4.1"),
        avx2: is_x86_feature_detected!("avx2"),
        avx512f: is_x86_feature_detected!("avx512f"),
        avx512bw: is_x86_feature_detected!("avx512f") && is_x86_feature_detected!("avx512bw"),
    }
}

#[cfg(not(target_arch = "x86_64"))]
fn probe_native() -> NativeIsa {
    NativeIsa::default()
}

/// Native instruction sets of the running CPU, probed once.
pub(crate) fn native_isa() -> NativeIsa {
    static ISA: OnceLock<NativeIsa> = OnceLock::new();
    *ISA.get_or_init(probe_native)
}

/// Capabilities of the running CPU, probed once and cached.
///
/// With the `simd-emulation` cargo feature this reports [`FeatureSet::ALL`]
/// regardless of hardware; kernels lacking native backing then run portable
/// fallbacks with identical results.
pub fn detect_features() -> FeatureSet {
    if cfg!(feature = "simd-emulation") {
        return FeatureSet::ALL;
    }
    static FEATURES: OnceLock<FeatureSet> = OnceLock::new();
    *FEATURES.get_or_init(|| {
        let isa = native_isa();
        FeatureSet {
            scalar: true,
            simd128_byte_permute: isa.ssse3,
            simd256_byte_permute: isa.avx2,
            simd512_foundation: isa.avx512f,
            simd512_byte_and_word: isa.avx512bw,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detection_is_stable_and_scalar_is_always_on() {
        let f = detect_features();
        assert!(f.scalar);
        assert_eq!(f, detect_features());
    }

    #[test]
    fn byte_and_word_implies_foundation_on_hardware() {
        let f = detect_features();
        if f.simd512_byte_and_word {
            assert!(f.simd512_foundation);
        }
    }
}

//! Finite-field region arithmetic and random linear network coding over
//! GF(2), GF(4), GF(16) and GF(256).
//!
//! The crate is built around one operation: multiply-and-add over a memory
//! region, `b ^= c * a`, where `a` and `b` are buffers of packed field
//! elements and `c` is a scalar coefficient. That single primitive is what
//! an RLNC encoder spends essentially all of its time in, so it exists here
//! in several interchangeable implementations ("kernels"): byte-wise table
//! lookups, 64-bit bit-plane multiplication, and SIMD variants of both up
//! to 512-bit blocks, selected at runtime from detected CPU features.
//!
//! Layered on top:
//!
//! * [`field`]: scalar reference arithmetic, reduction polynomials, word
//!   packing. [`FieldSpec::poly_mul`] is the ground truth everything else
//!   is tested against.
//! * [`tables`]: precomputed multiplication, inverse, nibble and bit-plane
//!   tables per field.
//! * [`region`]: 64-byte aligned, block-padded buffers the kernels operate
//!   on.
//! * [`kernels`]: the region operations, kernel ids, CPU feature detection
//!   and selection policy.
//! * [`rlnc`]: generations, coding vectors, encoding, Gaussian-elimination
//!   decoding and rank tracking.
//! * [`bench`]: reproducible throughput measurement with CSV output, cache
//!   topology detection and optional core pinning, plus a verification mode
//!   that recomputes kernel output against the scalar reference.
//!
//! # Quick start
//!
//! ```
//! use gf_rlnc::{Field, FieldId, kernels, rlnc};
//!
//! let field = Field::new(FieldId::Gf256);
//! let kernel = field.select_kernel(None)?;
//!
//! // Erasure-code a generation of 4 packets of 256 bytes.
//! let gen = rlnc::Generation::random(*field.spec(), 4, 256, 7)?;
//! let mut rng = rlnc::VectorRng::new(42);
//! let coded: Vec<_> = (0..6)
//!     .map(|_| rlnc::encode(&field, &gen, &rng.next_vector(field.spec(), 4), kernel))
//!     .collect::<Result<_, _>>()?;
//!
//! match rlnc::decode(&field, &coded, kernel)? {
//!     rlnc::DecodeOutcome::Decoded(out) => assert_eq!(out, gen),
//!     rlnc::DecodeOutcome::RankDeficient { rank, needed } => {
//!         println!("need {} more packets", needed - rank)
//!     }
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bench;
pub mod field;
pub mod kernels;
pub mod region;
pub mod rlnc;
pub mod tables;

pub use field::{FieldError, FieldId, FieldSpec, Word};
pub use kernels::{
    detect_features, madd_region, mul_region, select_kernel, supported_kernels, xor_region,
    Algorithm, FeatureSet, KernelError, KernelId,
};
pub use region::{Region, BLOCK_BYTES};
pub use tables::FieldTables;

/// A field spec bundled with its lookup tables: the handle the coding and
/// benchmark layers pass around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    spec: FieldSpec,
    tables: FieldTables,
}

impl Field {
    /// Field with its default reduction polynomial, tables built eagerly.
    pub fn new(id: FieldId) -> Field {
        Field::from_spec(FieldSpec::new(id))
    }

    /// Field with a custom reduction polynomial.
    pub fn with_poly(id: FieldId, poly: u16) -> Result<Field, FieldError> {
        Ok(Field::from_spec(FieldSpec::with_poly(id, poly)?))
    }

    pub fn from_spec(spec: FieldSpec) -> Field {
        Field { tables: FieldTables::build(&spec), spec }
    }

    pub fn id(&self) -> FieldId {
        self.spec.field()
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn tables(&self) -> &FieldTables {
        &self.tables
    }

    /// Kernel choice for this field on the running CPU. See
    /// [`kernels::select_kernel`].
    pub fn select_kernel(&self, preference: Option<KernelId>) -> Result<KernelId, KernelError> {
        kernels::select_kernel(&self.spec, &detect_features(), preference)
    }

    /// Kernels usable for this field on the running CPU.
    pub fn supported_kernels(&self) -> Vec<KernelId> {
        kernels::supported_kernels(&self.spec, &detect_features())
    }

    /// `b ^= c * a` over regions. See [`kernels::madd_region`].
    pub fn madd_region(
        &self,
        kernel: KernelId,
        b: &mut [u8],
        a: &[u8],
        c: Word,
    ) -> Result<(), KernelError> {
        kernels::madd_region(kernel, &self.spec, &self.tables, b, a, c)
    }

    /// `b = c * b` over a region. See [`kernels::mul_region`].
    pub fn mul_region(&self, kernel: KernelId, b: &mut [u8], c: Word) -> Result<(), KernelError> {
        kernels::mul_region(kernel, &self.spec, &self.tables, b, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_handle_wires_spec_tables_and_kernels_together() {
        let field = Field::new(FieldId::Gf4);
        assert_eq!(field.id(), FieldId::Gf4);
        assert_eq!(field.tables().spec(), field.spec());

        let kernel = field.select_kernel(None).unwrap();
        assert!(field.supported_kernels().contains(&kernel));

        let a = Region::from_bytes(&[0x1B; 64]);
        let mut b = Region::zeroed(64);
        field.madd_region(kernel, &mut b, &a, 2).unwrap();
        assert!(b.iter().all(|&x| x == 0x2D));
        field.mul_region(kernel, &mut b, 2).unwrap();
        assert!(b.iter().all(|&x| x == 0x36), "got {:#x}", b[0]);
    }

    #[test]
    fn custom_poly_field_stays_consistent() {
        let field = Field::with_poly(FieldId::Gf256, 0x11D).unwrap();
        let a = Region::from_bytes(&[0x80; 64]);
        let mut b = Region::zeroed(64);
        let kernel = field.select_kernel(None).unwrap();
        field.madd_region(kernel, &mut b, &a, 2).unwrap();
        assert!(b.iter().all(|&x| x == 0x1D));
        assert!(Field::with_poly(FieldId::Gf256, 0x11C).is_err());
    }
}

//! Random linear network coding on top of the region kernels.
//!
//! A [`Generation`] is a fixed set of `n` equal-length source packets. A
//! coded packet is a random linear combination of all of them: coefficients
//! drawn uniformly from the field, payload computed with one multiply-and-add
//! region pass per source packet. Any `n` coded packets whose coefficient
//! vectors are linearly independent recover the generation by Gaussian
//! elimination; [`rank`] reports how many innovative packets a sink has.
//!
//! The decoder runs Gauss-Jordan elimination over an augmented system of
//! regions: each received row is its coefficient vector (one byte per
//! coefficient, zero-padded to a block) next to its payload. Every row
//! update is itself a region operation, so decoding exercises exactly the
//! same kernels as encoding, including the scale step by an inverted pivot.
//!
//! Coefficient draws use a counter-based stream cipher keyed by a caller
//! seed, so coded packets, benchmarks and tests are reproducible from a
//! single integer.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::field::{FieldId, FieldSpec, Word};
use crate::kernels::{self, KernelError, KernelId};
use crate::region::Region;
use crate::Field;

/// Errors from generation handling, encoding and decoding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RlncError {
    /// A generation needs at least one packet.
    #[error("generation must contain at least one packet")]
    EmptyGeneration,
    /// Source payloads must share one length.
    #[error("payload lengths differ: expected {expected}, got {got}")]
    MismatchedPayloadLengths { expected: usize, got: usize },
    /// Coding vector length must equal the generation size.
    #[error("coding vector has {got} coefficients, generation holds {expected} packets")]
    VectorLengthMismatch { expected: usize, got: usize },
    /// A coefficient does not fit the field.
    #[error("coefficient {c:#x} out of range for GF({q})")]
    CoefficientOutOfRange { c: Word, q: u16 },
    /// The field handle does not match the data it is applied to.
    #[error("field mismatch: handle is {handle}, data is {data}")]
    FieldMismatch { handle: FieldId, data: FieldId },
    /// Decoding needs at least one coded packet.
    #[error("no coded packets to decode")]
    NoPackets,
    /// A region operation rejected its inputs.
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A fixed set of equal-length source packets over one field.
///
/// Packet payloads are stored as [`Region`]s, zero-padded to whole 64-byte
/// blocks; `payload_len` remembers the pre-padding length. Equality compares
/// everything including `payload_len`, so a decoded generation (whose
/// length is the padded one) equals its source exactly when the source
/// length was already block-aligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generation {
    spec: FieldSpec,
    payload_len: usize,
    packets: Vec<Region>,
}

impl Generation {
    /// Generation from source payloads, which must be nonempty and of equal
    /// lengths.
    pub fn from_payloads(
        spec: FieldSpec,
        payloads: &[impl AsRef<[u8]>],
    ) -> Result<Generation, RlncError> {
        let Some(first) = payloads.first() else { return Err(RlncError::EmptyGeneration) };
        let payload_len = first.as_ref().len();
        let mut packets = Vec::with_capacity(payloads.len());
        for p in payloads {
            let p = p.as_ref();
            if p.len() != payload_len {
                return Err(RlncError::MismatchedPayloadLengths {
                    expected: payload_len,
                    got: p.len(),
                });
            }
            packets.push(Region::from_bytes(p));
        }
        Ok(Generation { spec, payload_len, packets })
    }

    /// Generation of `n` packets of `payload_len` uniformly random bytes,
    /// reproducible from `seed`. Random bytes are valid packed words for
    /// every field.
    pub fn random(
        spec: FieldSpec,
        n: usize,
        payload_len: usize,
        seed: u64,
    ) -> Result<Generation, RlncError> {
        if n == 0 {
            return Err(RlncError::EmptyGeneration);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let packets = (0..n)
            .map(|_| {
                let mut r = Region::zeroed(payload_len);
                r.fill_random(&mut rng);
                r
            })
            .collect();
        Ok(Generation { spec, payload_len, packets })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Number of packets `n` in the generation.
    pub fn size(&self) -> usize {
        self.packets.len()
    }

    /// Source payload length in bytes, before block padding.
    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    /// Stored packet length in bytes: `payload_len` rounded up to blocks.
    pub fn padded_len(&self) -> usize {
        Region::padded_len(self.payload_len)
    }

    pub fn packet(&self, i: usize) -> &Region {
        &self.packets[i]
    }

    pub fn packets(&self) -> &[Region] {
        &self.packets
    }
}

/// Coefficients of one linear combination, one field element per source
/// packet, stored unpacked (one byte each) regardless of field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingVector(Vec<Word>);

impl CodingVector {
    /// Vector from explicit coefficients, all validated against the field.
    pub fn new(coefficients: Vec<Word>, spec: &FieldSpec) -> Result<CodingVector, RlncError> {
        if let Some(&c) = coefficients.iter().find(|&&c| !spec.contains(c)) {
            return Err(RlncError::CoefficientOutOfRange { c, q: spec.q() });
        }
        Ok(CodingVector(coefficients))
    }

    /// Unit vector selecting source packet `i`: systematic coding.
    pub fn unit(n: usize, i: usize) -> CodingVector {
        assert!(i < n, "unit index {i} out of range for length {n}");
        let mut v = vec![0; n];
        v[i] = 1;
        CodingVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, i: usize) -> Word {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.0
    }

    /// True if every coefficient is 0 or 1, i.e. the combination needs no
    /// multiplications at all. Over GF(4) half of all uniform draws are
    /// trivial in this sense; over GF(2) all of them are.
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }
}

/// One coded packet: the coefficient vector and the combined payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub vector: CodingVector,
    pub payload: Region,
}

/// Deterministic stream of uniform coefficients and coding vectors.
#[derive(Debug, Clone)]
pub struct VectorRng {
    rng: ChaCha8Rng,
}

impl VectorRng {
    pub fn new(seed: u64) -> VectorRng {
        VectorRng { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// One uniform field element. `q` divides 2^64, so masking the top word
    /// of the stream is exactly uniform.
    pub fn next_coefficient(&mut self, spec: &FieldSpec) -> Word {
        (self.rng.next_u64() & spec.max_word() as u64) as Word
    }

    /// A coding vector of `n` uniform coefficients.
    pub fn next_vector(&mut self, spec: &FieldSpec, n: usize) -> CodingVector {
        CodingVector((0..n).map(|_| self.next_coefficient(spec)).collect())
    }

    /// Fill a region with uniform packed words.
    pub fn fill_region(&mut self, region: &mut Region) {
        region.fill_random(&mut self.rng);
    }
}

/// First vector of a fresh [`VectorRng`]: convenience for one-shot draws.
pub fn random_vector(spec: &FieldSpec, n: usize, seed: u64) -> CodingVector {
    VectorRng::new(seed).next_vector(spec, n)
}

/// Combine a generation under a coding vector: the coded payload is
/// `sum of c_i * packet_i`, computed as one multiply-and-add region pass
/// per source packet into a zeroed accumulator.
pub fn encode(
    field: &Field,
    gen: &Generation,
    vector: &CodingVector,
    kernel: KernelId,
) -> Result<CodedPacket, RlncError> {
    if field.spec() != &gen.spec {
        return Err(RlncError::FieldMismatch {
            handle: field.id(),
            data: gen.spec.field(),
        });
    }
    if vector.len() != gen.size() {
        return Err(RlncError::VectorLengthMismatch { expected: gen.size(), got: vector.len() });
    }
    let mut payload = Region::zeroed(gen.payload_len);
    for (i, packet) in gen.packets.iter().enumerate() {
        field.madd_region(kernel, &mut payload, packet, vector.coefficient(i))?;
    }
    Ok(CodedPacket { vector: vector.clone(), payload })
}

/// Result of a decode attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Full rank reached; the recovered generation, packet order restored.
    /// Payload lengths are the padded ones; the pre-padding length is not
    /// part of the coded representation.
    Decoded(Generation),
    /// Not enough innovative packets yet.
    RankDeficient { rank: usize, needed: usize },
}

/// Recover a generation from coded packets by Gauss-Jordan elimination.
///
/// Accepts any number of packets, in any order, with redundant or dependent
/// ones tolerated; decoding succeeds once `n` of them are linearly
/// independent, where `n` is the packets' coefficient count. Every row
/// operation runs through the given kernel, on the coefficient bytes and
/// the payload alike.
pub fn decode(
    field: &Field,
    packets: &[CodedPacket],
    kernel: KernelId,
) -> Result<DecodeOutcome, RlncError> {
    let spec = *field.spec();
    let Some(first) = packets.first() else { return Err(RlncError::NoPackets) };
    let n = first.vector.len();
    let payload_len = first.payload.len();
    for p in packets {
        if p.vector.len() != n {
            return Err(RlncError::VectorLengthMismatch { expected: n, got: p.vector.len() });
        }
        if p.payload.len() != payload_len {
            return Err(RlncError::MismatchedPayloadLengths {
                expected: payload_len,
                got: p.payload.len(),
            });
        }
        if let Some(&c) = p.vector.as_slice().iter().find(|&&c| !spec.contains(c)) {
            return Err(RlncError::CoefficientOutOfRange { c, q: spec.q() });
        }
    }
    if n == 0 {
        return Err(RlncError::EmptyGeneration);
    }

    // Augmented rows: coefficient bytes padded to a block, then the payload.
    // Coefficients live one per byte, which packs them as the low word of
    // each byte group, so region arithmetic on these bytes is exactly
    // coefficient arithmetic.
    let mut rows: Vec<(Region, Region)> = packets
        .iter()
        .map(|p| (Region::from_bytes(p.vector.as_slice()), p.payload.clone()))
        .collect();

    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0[col] != 0) else { continue };
        rows.swap(r, p);

        // Normalize the pivot row to 1 at the pivot column.
        let pivot_val = rows[r].0[col];
        if pivot_val != 1 {
            let inv = field.tables().inv(pivot_val);
            field.mul_region(kernel, &mut rows[r].0, inv)?;
            field.mul_region(kernel, &mut rows[r].1, inv)?;
        }

        // Eliminate the column everywhere else (Jordan step), so finishing
        // the sweep leaves the identity in the first n rows.
        let (before, rest) = rows.split_at_mut(r);
        let (pivot, after) = rest.split_first_mut().expect("pivot row exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            let factor = row.0[col];
            if factor != 0 {
                kernels::madd_region(kernel, &spec, field.tables(), &mut row.0, &pivot.0, factor)?;
                kernels::madd_region(kernel, &spec, field.tables(), &mut row.1, &pivot.1, factor)?;
            }
        }

        r += 1;
        if r == n {
            break;
        }
    }

    if r < n {
        return Ok(DecodeOutcome::RankDeficient { rank: r, needed: n });
    }
    debug_assert!((0..n).all(|i| {
        rows[i].0[..n].iter().enumerate().all(|(j, &c)| c == u8::from(i == j))
    }));
    let packets = rows.into_iter().take(n).map(|(_, payload)| payload).collect();
    Ok(DecodeOutcome::Decoded(Generation { spec, payload_len, packets }))
}

/// Rank of a set of coding vectors over the field: how many of them are
/// linearly independent, i.e. how many innovative packets a sink holds.
/// All vectors must share one length.
pub fn rank(spec: &FieldSpec, vectors: &[CodingVector]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let n = first.len();
    assert!(vectors.iter().all(|v| v.len() == n), "rank needs equal-length vectors");
    let mut rows: Vec<Vec<Word>> = vectors.iter().map(|v| v.as_slice().to_vec()).collect();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        let inv = spec.inv(rows[r][col]).expect("pivot is nonzero");
        let (pivot_rows, rest) = rows.split_at_mut(r + 1);
        let pivot = &pivot_rows[r];
        for row in rest.iter_mut() {
            let factor = spec.poly_mul(row[col], inv);
            if factor != 0 {
                for (dst, &src) in row[col..n].iter_mut().zip(&pivot[col..n]) {
                    *dst = spec.add(*dst, spec.poly_mul(factor, src));
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

//! Reproducible throughput measurement for the region kernels.
//!
//! A measurement point fixes a field, a kernel, a packet size and a
//! generation size `n`. Its working set is `n` source packets plus one
//! accumulator, all block-padded regions; one repetition applies a full
//! coding vector, i.e. `n` multiply-and-add passes over `packet_bytes`
//! bytes. Reported throughput counts the produced coded packet:
//! `packet_bytes * 8 * repetitions / elapsed / 1e9` in Gbit/s.
//!
//! Methodology, chosen so runs are comparable across machines and repeat
//! runs of the same seed are identical:
//!
//! * Payloads and a pool of coding vectors are generated from the seed
//!   before timing starts; the timed loop only cycles through the pool and
//!   performs region operations. It allocates nothing and makes no system
//!   calls besides reading the monotonic clock.
//! * One untimed warmup encoding faults in every page first.
//! * A point runs either a fixed repetition count or keeps going in small
//!   batches until a minimum wall time (default one second) has elapsed.
//! * Cache sizes are read from sysfs and stamped into every record, and the
//!   per-field summaries average only points whose working set fits the L2
//!   bound, where kernel ranking is decided by compute rather than memory
//!   bandwidth. Working sets cross a cache of `C` bytes at packet size
//!   `C / (n + 1)`.
//! * The process can be pinned to one core before any timing.
//!
//! The verify mode recomputes random region cases for every kernel against
//! the scalar reference multiply and reports the first mismatching byte; a
//! deliberately corrupted table is caught this way before it can produce
//! plausible-looking throughput numbers.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use thiserror::Error;

use crate::field::{FieldId, FieldSpec, Word};
use crate::kernels::{
    self, detect_features, madd_region, mul_region, supported_kernels, FeatureSet, KernelError,
    KernelId,
};
use crate::region::{Region, BLOCK_BYTES};
use crate::rlnc::{CodingVector, Generation, VectorRng};
use crate::tables::FieldTables;
use crate::Field;

/// Coding vectors pre-generated per measurement point; the timed loop
/// cycles through them.
const POOL_VECTORS: u64 = 256;

/// Encodings between clock checks under a minimum-time policy.
const BATCH: u64 = 8;

/// Errors from configuration, measurement and output.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("packet size {0} is not a positive multiple of {BLOCK_BYTES}")]
    InvalidPacketSize(usize),
    #[error("generation size must be at least 1")]
    InvalidGenSize,
    #[error("repetition count must be at least 1")]
    InvalidReps,
    #[error("no fields selected")]
    NoFields,
    #[error("no packet sizes selected")]
    NoSizes,
    #[error("kernel list is empty")]
    NoKernels,
    #[error("cannot pin to core {core}: {reason}")]
    Pin { core: usize, reason: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("cannot write CSV: {0}")]
    Io(#[from] std::io::Error),
}

/// Data cache sizes of the measuring CPU, if known.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheInfo {
    pub l1d: Option<u64>,
    pub l2: Option<u64>,
    pub l3: Option<u64>,
}

/// Read L1d/L2/L3 sizes for cpu0 from sysfs. Returns empty info where
/// sysfs is unavailable (non-Linux, restricted containers).
pub fn detect_caches() -> CacheInfo {
    detect_caches_in("/sys/devices/system/cpu/cpu0/cache")
}

fn detect_caches_in(base: &str) -> CacheInfo {
    let mut info = CacheInfo::default();
    for idx in 0..16 {
        let dir = format!("{base}/index{idx}");
        let read = |f: &str| std::fs::read_to_string(format!("{dir}/{f}"));
        let (Ok(level), Ok(ctype), Ok(size)) = (read("level"), read("type"), read("size")) else {
            break;
        };
        let Some(bytes) = parse_cache_size(size.trim()) else { continue };
        let data = matches!(ctype.trim(), "Data" | "Unified");
        match (level.trim(), data) {
            ("1", true) => info.l1d = Some(bytes),
            ("2", true) => info.l2 = Some(bytes),
            ("3", true) => info.l3 = Some(bytes),
            _ => {}
        }
    }
    info
}

/// Parse sysfs cache sizes like `32K`, `1024K`, `8M`.
fn parse_cache_size(s: &str) -> Option<u64> {
    let (digits, factor) = match s.as_bytes().last()? {
        b'K' => (&s[..s.len() - 1], 1024),
        b'M' => (&s[..s.len() - 1], 1024 * 1024),
        b'G' => (&s[..s.len() - 1], 1024 * 1024 * 1024),
        _ => (s, 1),
    };
    digits.parse::<u64>().ok().map(|v| v * factor)
}

/// Pin the calling process to one CPU core. Measurement must follow the
/// pin, never precede it, so [`run_suite`] pins before its first point.
#[cfg(target_os = "linux")]
pub fn pin_to_core(core: usize) -> Result<(), BenchError> {
    if core >= libc::CPU_SETSIZE as usize {
        return Err(BenchError::Pin { core, reason: "core index out of range".into() });
    }
    // SAFETY: zeroed cpu_set_t is a valid empty set; core is in range for
    // CPU_SET; sched_setaffinity reads the set from our pointer.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(core, &mut set);
        if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) != 0 {
            return Err(BenchError::Pin {
                core,
                reason: std::io::Error::last_os_error().to_string(),
            });
        }
    }
    Ok(())
}

/// Pinning is only implemented for Linux.
#[cfg(not(target_os = "linux"))]
pub fn pin_to_core(core: usize) -> Result<(), BenchError> {
    Err(BenchError::Pin { core, reason: "pinning unsupported on this platform".into() })
}

/// How long one measurement point runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimingPolicy {
    /// Repeat until at least this much wall time has elapsed.
    MinTime(Duration),
    /// Exactly this many repetitions.
    FixedReps(u64),
}

impl Default for TimingPolicy {
    fn default() -> TimingPolicy {
        TimingPolicy::MinTime(Duration::from_secs(1))
    }
}

/// Which kernels a suite measures per field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelChoice {
    /// The automatically selected kernel only.
    Auto,
    /// Every kernel supported for the field on this CPU.
    All,
    /// An explicit list; entries not usable for a field are skipped with a
    /// notice rather than failing the suite.
    List(Vec<KernelId>),
}

/// Full description of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub fields: Vec<FieldId>,
    pub kernels: KernelChoice,
    /// Generation size `n`: madd passes per repetition, and the working set
    /// is `n + 1` regions.
    pub gen_size: usize,
    pub packet_sizes: Vec<usize>,
    pub policy: TimingPolicy,
    pub seed: u64,
    pub pin_core: Option<usize>,
    /// Overrides the detected L2 size for summary bounding.
    pub l2_override: Option<u64>,
    pub csv_path: Option<PathBuf>,
    /// Verify every kernel against the scalar reference before measuring;
    /// any mismatch aborts the suite.
    pub verify: bool,
}

/// Packet sizes in powers of two from 128 bytes through 1 MiB.
pub fn default_packet_sizes() -> Vec<usize> {
    (7..=20).map(|p| 1usize << p).collect()
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            fields: FieldId::ALL.to_vec(),
            kernels: KernelChoice::Auto,
            gen_size: 16,
            packet_sizes: default_packet_sizes(),
            policy: TimingPolicy::default(),
            seed: 0,
            pin_core: None,
            l2_override: None,
            csv_path: None,
            verify: false,
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.fields.is_empty() {
            return Err(BenchError::NoFields);
        }
        if self.packet_sizes.is_empty() {
            return Err(BenchError::NoSizes);
        }
        for &s in &self.packet_sizes {
            if s == 0 || !s.is_multiple_of(BLOCK_BYTES) {
                return Err(BenchError::InvalidPacketSize(s));
            }
        }
        if self.gen_size == 0 {
            return Err(BenchError::InvalidGenSize);
        }
        if self.policy == TimingPolicy::FixedReps(0) {
            return Err(BenchError::InvalidReps);
        }
        if matches!(&self.kernels, KernelChoice::List(l) if l.is_empty()) {
            return Err(BenchError::NoKernels);
        }
        Ok(())
    }
}

/// One measured point. Field order matches the CSV columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub field: FieldId,
    pub kernel: KernelId,
    pub packet_bytes: usize,
    pub gen_size: usize,
    pub repetitions: u64,
    pub elapsed_s: f64,
    pub throughput_gbps: f64,
    /// `(gen_size + 1) * packet_bytes`: sources plus accumulator.
    pub working_set_bytes: usize,
    pub l1d: Option<u64>,
    pub l2: Option<u64>,
    pub l3: Option<u64>,
    pub pinned: Option<usize>,
}

/// CSV column names, in [`BenchRecord::csv_line`] order.
pub const CSV_HEADER: &str = "field,kernel,packet_bytes,gen_size,repetitions,elapsed_s,\
throughput_gbps,working_set_bytes,l1d,l2,l3,pinned";

impl BenchRecord {
    /// One CSV row. Floats print in shortest round-trip form, so parsing a
    /// row back and recomputing `throughput_gbps` from `packet_bytes`,
    /// `repetitions` and `elapsed_s` reproduces the stored value exactly.
    pub fn csv_line(&self) -> String {
        let cache = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let pinned = self.pinned.map_or_else(|| "unpinned".to_string(), |c| c.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.field.q(),
            self.kernel,
            self.packet_bytes,
            self.gen_size,
            self.repetitions,
            self.elapsed_s,
            self.throughput_gbps,
            self.working_set_bytes,
            cache(self.l1d),
            cache(self.l2),
            cache(self.l3),
            pinned,
        )
    }
}

/// Render header plus one line per record.
pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Machine context stamped into records.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunEnv {
    pub caches: CacheInfo,
    pub pinned: Option<usize>,
}

static TIMED_SECTION: AtomicBool = AtomicBool::new(false);

/// True while a measurement loop is running. Test hook: an instrumented
/// allocator can assert that no allocation happens inside timed sections.
pub fn timed_section_active() -> bool {
    TIMED_SECTION.load(Ordering::SeqCst)
}

struct TimedGuard;

impl TimedGuard {
    fn enter() -> TimedGuard {
        TIMED_SECTION.store(true, Ordering::SeqCst);
        TimedGuard
    }
}

impl Drop for TimedGuard {
    fn drop(&mut self) {
        TIMED_SECTION.store(false, Ordering::SeqCst);
    }
}

/// One full-vector encoding: `gen_size` madd passes into the accumulator.
/// The accumulator is deliberately never cleared between repetitions; its
/// contents are not the measurement target and clearing would add a memory
/// pass that is not part of the operation being measured.
fn apply_vector(
    field: &Field,
    kernel: KernelId,
    acc: &mut Region,
    gen: &Generation,
    vector: &CodingVector,
) -> Result<(), KernelError> {
    for i in 0..gen.size() {
        field.madd_region(kernel, acc, gen.packet(i), vector.coefficient(i))?;
    }
    Ok(())
}

/// Measure one (field, kernel, packet size, generation size) point.
///
/// Deterministic data, trivial-coefficient frequency included: payloads and
/// the vector pool derive from `seed`, so coefficient draws hit 0 and 1
/// exactly as often as a real encoder's would over the same field.
pub fn run_point(
    field: &Field,
    kernel: KernelId,
    packet_bytes: usize,
    gen_size: usize,
    policy: TimingPolicy,
    seed: u64,
    env: &RunEnv,
) -> Result<BenchRecord, BenchError> {
    if packet_bytes == 0 || !packet_bytes.is_multiple_of(BLOCK_BYTES) {
        return Err(BenchError::InvalidPacketSize(packet_bytes));
    }
    if gen_size == 0 {
        return Err(BenchError::InvalidGenSize);
    }
    if policy == TimingPolicy::FixedReps(0) {
        return Err(BenchError::InvalidReps);
    }

    let spec = *field.spec();
    let gen = Generation::random(spec, gen_size, packet_bytes, seed)
        .expect("generation size validated");
    // Decouple the coefficient stream from the payload stream.
    let mut vrng = VectorRng::new(seed ^ 0x9E37_79B9_7F4A_7C15);
    let pool: Vec<CodingVector> =
        (0..POOL_VECTORS).map(|_| vrng.next_vector(&spec, gen_size)).collect();
    let mut acc = Region::zeroed(packet_bytes);

    // Untimed warmup: touch every page of every region once.
    apply_vector(field, kernel, &mut acc, &gen, &pool[0])?;

    let repetitions;
    let elapsed;
    {
        let _timed = TimedGuard::enter();
        let start = Instant::now();
        match policy {
            TimingPolicy::FixedReps(reps) => {
                for e in 0..reps {
                    apply_vector(field, kernel, &mut acc, &gen, &pool[(e % POOL_VECTORS) as usize])?;
                }
                repetitions = reps;
            }
            TimingPolicy::MinTime(min) => {
                let mut done = 0u64;
                loop {
                    for _ in 0..BATCH {
                        apply_vector(
                            field,
                            kernel,
                            &mut acc,
                            &gen,
                            &pool[(done % POOL_VECTORS) as usize],
                        )?;
                        done += 1;
                    }
                    if start.elapsed() >= min {
                        break;
                    }
                }
                repetitions = done;
            }
        }
        elapsed = start.elapsed();
    }

    let elapsed_s = elapsed.as_secs_f64();
    let throughput_gbps =
        packet_bytes as f64 * 8.0 * repetitions as f64 / elapsed_s / 1e9;
    Ok(BenchRecord {
        field: spec.field(),
        kernel,
        packet_bytes,
        gen_size,
        repetitions,
        elapsed_s,
        throughput_gbps,
        working_set_bytes: (gen_size + 1) * packet_bytes,
        l1d: env.caches.l1d,
        l2: env.caches.l2,
        l3: env.caches.l3,
        pinned: env.pinned,
    })
}

/// A kernel verification mismatch: the first byte where kernel output
/// diverged from the scalar reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub field: FieldId,
    pub kernel: KernelId,
    pub operation: &'static str,
    pub len: usize,
    pub c: Word,
    pub byte_offset: usize,
    pub got: u8,
    pub want: u8,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {}: len {}, c {:#x}: byte {} is {:#04x}, reference says {:#04x}",
            self.field,
            self.kernel,
            self.operation,
            self.len,
            self.c,
            self.byte_offset,
            self.got,
            self.want
        )
    }
}

/// Recompute kernel output against the reference multiply, for every
/// coefficient in the field over seeded random regions of several lengths.
///
/// The tables are an explicit argument so callers can verify exactly the
/// tables they are about to measure with; the reference path multiplies
/// word-wise from the reduction polynomial and never reads them, which is
/// what makes corrupted table entries detectable. Coefficients are
/// exhaustive, so a corrupted entry is found regardless of the seed.
pub fn verify_kernel(
    spec: &FieldSpec,
    tables: &FieldTables,
    kernel: KernelId,
    seed: u64,
) -> Result<(), VerifyFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients: Vec<Word> = (0..spec.q()).map(|c| c as Word).collect();

    for len in [64, 192, 1024, 4096] {
        let mut a = Region::zeroed(len);
        a.fill_random(&mut rng);
        let mut b0 = Region::zeroed(len);
        b0.fill_random(&mut rng);

        for &c in &coefficients {
            let mut b = b0.clone();
            madd_region(kernel, spec, tables, &mut b, &a, c)
                .expect("verify case is well-formed");
            for (i, (&got, (&src, &add))) in
                b.iter().zip(b0.iter().zip(a.iter())).enumerate()
            {
                let want = src ^ spec.mul_byte(c, add);
                if got != want {
                    return Err(VerifyFailure {
                        field: spec.field(),
                        kernel,
                        operation: "madd",
                        len,
                        c,
                        byte_offset: i,
                        got,
                        want,
                    });
                }
            }

            let mut m = a.clone();
            mul_region(kernel, spec, tables, &mut m, c).expect("verify case is well-formed");
            for (i, (&got, &src)) in m.iter().zip(a.iter()).enumerate() {
                let want = spec.mul_byte(c, src);
                if got != want {
                    return Err(VerifyFailure {
                        field: spec.field(),
                        kernel,
                        operation: "mul",
                        len,
                        c,
                        byte_offset: i,
                        got,
                        want,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Verify every kernel supported for the field; collect all failures.
pub fn verify_field(field: &Field, features: &FeatureSet, seed: u64) -> Vec<VerifyFailure> {
    supported_kernels(field.spec(), features)
        .into_iter()
        .filter_map(|k| verify_kernel(field.spec(), field.tables(), k, seed).err())
        .collect()
}

/// A (field, kernel) pair excluded from a suite, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedKernel {
    pub field: FieldId,
    pub kernel: KernelId,
    pub reason: String,
}

/// Per-field result digest: the kernel with the best L2-bounded average.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSummary {
    pub field: FieldId,
    pub best_kernel: KernelId,
    /// Mean throughput over the included points.
    pub avg_throughput_gbps: f64,
    /// Packet sizes whose working set fit the bound.
    pub included_sizes: Vec<usize>,
    /// The bound applied, if any cache size was known.
    pub l2_bound: Option<u64>,
}

/// Rank kernels per field by average throughput over the points whose
/// working set fits `l2_bound` (all points if unbounded). Fields or kernels
/// with no qualifying points produce no summary. Order follows first
/// appearance in `records`.
pub fn summarize(records: &[BenchRecord], l2_bound: Option<u64>) -> Vec<FieldSummary> {
    let mut fields: Vec<FieldId> = Vec::new();
    for r in records {
        if !fields.contains(&r.field) {
            fields.push(r.field);
        }
    }
    fields
        .into_iter()
        .filter_map(|field| {
            let in_bound = |r: &&BenchRecord| {
                r.field == field
                    && l2_bound.is_none_or(|bound| r.working_set_bytes as u64 <= bound)
            };
            let mut kernels: Vec<KernelId> = Vec::new();
            for r in records.iter().filter(|r| in_bound(r)) {
                if !kernels.contains(&r.kernel) {
                    kernels.push(r.kernel);
                }
            }
            let mut best: Option<FieldSummary> = None;
            for kernel in kernels {
                let points: Vec<&BenchRecord> = records
                    .iter()
                    .filter(|r| in_bound(r) && r.kernel == kernel)
                    .collect();
                let avg = points.iter().map(|r| r.throughput_gbps).sum::<f64>()
                    / points.len() as f64;
                if best.as_ref().is_none_or(|b| avg > b.avg_throughput_gbps) {
                    best = Some(FieldSummary {
                        field,
                        best_kernel: kernel,
                        avg_throughput_gbps: avg,
                        included_sizes: points.iter().map(|r| r.packet_bytes).collect(),
                        l2_bound,
                    });
                }
            }
            best
        })
        .collect()
}

/// Packet size at which the working set of a run overflows one cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheBoundary {
    pub label: &'static str,
    pub cache_bytes: u64,
    /// `cache_bytes / (gen_size + 1)`.
    pub packet_boundary_bytes: u64,
}

/// Boundaries for every known cache level, given the generation size.
pub fn cache_boundaries(caches: &CacheInfo, gen_size: usize) -> Vec<CacheBoundary> {
    [("L1d", caches.l1d), ("L2", caches.l2), ("L3", caches.l3)]
        .into_iter()
        .filter_map(|(label, size)| {
            size.map(|cache_bytes| CacheBoundary {
                label,
                cache_bytes,
                packet_boundary_bytes: cache_bytes / (gen_size as u64 + 1),
            })
        })
        .collect()
}

/// Everything a finished suite produced.
#[derive(Debug)]
pub struct SuiteOutcome {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<FieldSummary>,
    pub skipped: Vec<SkippedKernel>,
    /// Non-empty means verification failed and nothing was measured.
    pub verify_failures: Vec<VerifyFailure>,
    pub caches: CacheInfo,
    pub l2_bound: Option<u64>,
    pub pinned: Option<usize>,
}

/// Run a whole suite: pin, detect caches, optionally verify, measure every
/// configured point, summarize, and write the CSV if a path is set.
/// `progress` is called after each completed point.
pub fn run_suite(
    config: &BenchConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<SuiteOutcome, BenchError> {
    config.validate()?;

    if let Some(core) = config.pin_core {
        pin_to_core(core)?;
    }
    let caches = detect_caches();
    let l2_bound = config.l2_override.or(caches.l2);
    let env = RunEnv { caches, pinned: config.pin_core };
    let features = detect_features();

    let fields: Vec<Field> = config.fields.iter().map(|&id| Field::new(id)).collect();

    if config.verify {
        let verify_failures: Vec<VerifyFailure> =
            fields.iter().flat_map(|f| verify_field(f, &features, config.seed)).collect();
        if !verify_failures.is_empty() {
            return Ok(SuiteOutcome {
                records: Vec::new(),
                summaries: Vec::new(),
                skipped: Vec::new(),
                verify_failures,
                caches,
                l2_bound,
                pinned: config.pin_core,
            });
        }
    }

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for field in &fields {
        let kernels: Vec<KernelId> = match &config.kernels {
            KernelChoice::Auto => {
                vec![kernels::select_kernel(field.spec(), &features, None)?]
            }
            KernelChoice::All => supported_kernels(field.spec(), &features),
            KernelChoice::List(list) => {
                let mut usable = Vec::new();
                for &k in list {
                    match kernels::select_kernel(field.spec(), &features, Some(k)) {
                        Ok(k) => usable.push(k),
                        Err(e) => skipped.push(SkippedKernel {
                            field: field.id(),
                            kernel: k,
                            reason: e.to_string(),
                        }),
                    }
                }
                usable
            }
        };
        for kernel in kernels {
            for &packet_bytes in &config.packet_sizes {
                let record = run_point(
                    field,
                    kernel,
                    packet_bytes,
                    config.gen_size,
                    config.policy,
                    config.seed,
                    &env,
                )?;
                progress(&record);
                records.push(record);
            }
        }
    }

    let summaries = summarize(&records, l2_bound);
    if let Some(path) = &config.csv_path {
        std::fs::write(path, render_csv(&records))?;
    }

    Ok(SuiteOutcome {
        records,
        summaries,
        skipped,
        verify_failures: Vec::new(),
        caches,
        l2_bound,
        pinned: config.pin_core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(field: FieldId, kernel: KernelId, packet: usize, gbps: f64) -> BenchRecord {
        BenchRecord {
            field,
            kernel,
            packet_bytes: packet,
            gen_size: 16,
            repetitions: 10,
            elapsed_s: 0.5,
            throughput_gbps: gbps,
            working_set_bytes: 17 * packet,
            l1d: None,
            l2: None,
            l3: None,
            pinned: None,
        }
    }

    #[test]
    fn cache_size_parsing() {
        assert_eq!(parse_cache_size("32K"), Some(32 * 1024));
        assert_eq!(parse_cache_size("1024K"), Some(1024 * 1024));
        assert_eq!(parse_cache_size("8M"), Some(8 * 1024 * 1024));
        assert_eq!(parse_cache_size("512"), Some(512));
        assert_eq!(parse_cache_size("x"), None);
        assert_eq!(parse_cache_size(""), None);
    }

    #[test]
    fn csv_row_matches_header_and_recomputes() {
        let mut r = record(FieldId::Gf256, KernelId::SCALAR, 4096, 0.0);
        r.repetitions = 12345;
        r.elapsed_s = 0.7310941;
        r.throughput_gbps =
            r.packet_bytes as f64 * 8.0 * r.repetitions as f64 / r.elapsed_s / 1e9;
        r.l1d = Some(32768);
        r.pinned = Some(3);
        let line = r.csv_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], "256");
        assert_eq!(cols[1], "scalar");
        assert_eq!(cols[8], "32768");
        assert_eq!(cols[9], "");
        assert_eq!(cols[11], "3");
        // Shortest round-trip float printing: parse and recompute exactly.
        let packet: f64 = cols[2].parse().unwrap();
        let reps: f64 = cols[4].parse().unwrap();
        let elapsed: f64 = cols[5].parse().unwrap();
        let tp: f64 = cols[6].parse().unwrap();
        assert_eq!(tp, packet * 8.0 * reps / elapsed / 1e9);
    }

    #[test]
    fn summaries_respect_the_cache_bound() {
        let shuffle = "shuffle128".parse::<KernelId>().unwrap();
        let records = vec![
            record(FieldId::Gf256, KernelId::SCALAR, 128, 10.0),
            record(FieldId::Gf256, KernelId::SCALAR, 4096, 2.0),
            record(FieldId::Gf256, shuffle, 128, 40.0),
            record(FieldId::Gf256, shuffle, 4096, 4.0),
        ];

        // Unbounded: averages over everything.
        let s = summarize(&records, None);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].best_kernel, shuffle);
        assert_eq!(s[0].avg_throughput_gbps, 22.0);
        assert_eq!(s[0].included_sizes, vec![128, 4096]);

        // Bound excludes the 4096-byte points (17 * 4096 > 32768).
        let s = summarize(&records, Some(32 * 1024));
        assert_eq!(s[0].best_kernel, shuffle);
        assert_eq!(s[0].avg_throughput_gbps, 40.0);
        assert_eq!(s[0].included_sizes, vec![128]);

        // Bound below every working set: no summary at all.
        assert!(summarize(&records, Some(64)).is_empty());
    }

    #[test]
    fn boundaries_divide_cache_by_working_set_regions() {
        let caches = CacheInfo { l1d: Some(32 * 1024), l2: Some(1024 * 1024), l3: None };
        let b = cache_boundaries(&caches, 16);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].label, "L1d");
        assert_eq!(b[0].packet_boundary_bytes, 32 * 1024 / 17);
        assert_eq!(b[1].label, "L2");
        assert_eq!(b[1].packet_boundary_bytes, 1024 * 1024 / 17);
    }

    #[test]
    fn run_point_is_deterministic_in_reps_and_stamps_the_env() {
        let field = Field::new(FieldId::Gf4);
        let kernel = field.select_kernel(None).unwrap();
        let env = RunEnv {
            caches: CacheInfo { l1d: Some(1), l2: Some(2), l3: Some(3) },
            pinned: Some(0),
        };
        let r = run_point(&field, kernel, 256, 4, TimingPolicy::FixedReps(10), 1, &env).unwrap();
        assert_eq!(r.repetitions, 10);
        assert_eq!(r.working_set_bytes, 5 * 256);
        assert_eq!((r.l1d, r.l2, r.l3, r.pinned), (Some(1), Some(2), Some(3), Some(0)));
        assert!(r.elapsed_s > 0.0);
        assert!(r.throughput_gbps > 0.0);
        assert!(!timed_section_active(), "timed flag must clear after a point");
    }

    #[test]
    fn run_point_validates_inputs() {
        let field = Field::new(FieldId::Gf4);
        let kernel = field.select_kernel(None).unwrap();
        let env = RunEnv::default();
        assert!(matches!(
            run_point(&field, kernel, 100, 4, TimingPolicy::FixedReps(1), 0, &env),
            Err(BenchError::InvalidPacketSize(100))
        ));
        assert!(matches!(
            run_point(&field, kernel, 128, 0, TimingPolicy::FixedReps(1), 0, &env),
            Err(BenchError::InvalidGenSize)
        ));
        assert!(matches!(
            run_point(&field, kernel, 128, 4, TimingPolicy::FixedReps(0), 0, &env),
            Err(BenchError::InvalidReps)
        ));
    }

    #[test]
    fn min_time_policy_runs_at_least_that_long() {
        let field = Field::new(FieldId::Gf16);
        let kernel = field.select_kernel(None).unwrap();
        let min = Duration::from_millis(30);
        let r = run_point(
            &field,
            kernel,
            128,
            2,
            TimingPolicy::MinTime(min),
            0,
            &RunEnv::default(),
        )
        .unwrap();
        assert!(r.elapsed_s >= min.as_secs_f64());
        assert!(r.repetitions >= BATCH);
    }

    #[test]
    fn verify_accepts_correct_tables_and_flags_corrupted_ones() {
        let field = Field::new(FieldId::Gf16);
        for kernel in field.supported_kernels() {
            verify_kernel(field.spec(), field.tables(), kernel, 5).unwrap();
        }

        // A wrong low-nibble entry must surface through every kernel that
        // consults the nibble tables.
        let bad = field.tables().with_tl_entry(2, 7, 0x42);
        let failure = verify_kernel(field.spec(), &bad, KernelId::SCALAR, 5).unwrap_err();
        assert_eq!(failure.field, FieldId::Gf16);
        assert_eq!(failure.kernel, KernelId::SCALAR);

        // A wrong bit-plane factor must surface through the multiply path.
        let bad = field.tables().with_pow_entry(3, 1, 0);
        assert!(verify_kernel(field.spec(), &bad, KernelId::IMUL64, 5).is_err());

        // GF(256) scalar goes through the full product table.
        let f256 = Field::new(FieldId::Gf256);
        let bad = f256.tables().with_mul_entry(7, 9, 0);
        assert!(verify_kernel(f256.spec(), &bad, KernelId::SCALAR, 5).is_err());
    }

    #[test]
    fn config_validation_rejects_degenerate_suites() {
        let ok = BenchConfig {
            packet_sizes: vec![128],
            policy: TimingPolicy::FixedReps(1),
            ..BenchConfig::default()
        };
        assert!(ok.validate().is_ok());

        let mut c = ok.clone();
        c.fields.clear();
        assert!(matches!(c.validate(), Err(BenchError::NoFields)));
        let mut c = ok.clone();
        c.packet_sizes = vec![100];
        assert!(matches!(c.validate(), Err(BenchError::InvalidPacketSize(100))));
        let mut c = ok.clone();
        c.packet_sizes.clear();
        assert!(matches!(c.validate(), Err(BenchError::NoSizes)));
        let mut c = ok.clone();
        c.gen_size = 0;
        assert!(matches!(c.validate(), Err(BenchError::InvalidGenSize)));
        let mut c = ok.clone();
        c.kernels = KernelChoice::List(Vec::new());
        assert!(matches!(c.validate(), Err(BenchError::NoKernels)));
        let mut c = ok;
        c.policy = TimingPolicy::FixedReps(0);
        assert!(matches!(c.validate(), Err(BenchError::InvalidReps)));
    }

    #[test]
    fn suite_skips_unusable_kernels_and_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("out.csv");
        let xor512 = "xor512".parse::<KernelId>().unwrap();
        let config = BenchConfig {
            fields: vec![FieldId::Gf2, FieldId::Gf4],
            kernels: KernelChoice::List(vec![KernelId::SCALAR, xor512]),
            gen_size: 2,
            packet_sizes: vec![128],
            policy: TimingPolicy::FixedReps(3),
            seed: 9,
            pin_core: None,
            l2_override: Some(1 << 20),
            csv_path: Some(csv_path.clone()),
            verify: true,
        };
        let mut seen = 0;
        let outcome = run_suite(&config, |_| seen += 1).unwrap();
        assert!(outcome.verify_failures.is_empty());

        // GF(4) cannot use the xor kernel; GF(2) can, if the CPU allows.
        let gf4_skips: Vec<_> =
            outcome.skipped.iter().filter(|s| s.field == FieldId::Gf4).collect();
        assert_eq!(gf4_skips.len(), 1);
        assert_eq!(gf4_skips[0].kernel, xor512);
        assert!(outcome.records.iter().all(|r| r.repetitions == 3));
        assert_eq!(seen, outcome.records.len());
        assert_eq!(outcome.l2_bound, Some(1 << 20));
        assert!(!outcome.summaries.is_empty());

        let csv = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), outcome.records.len());
    }
}

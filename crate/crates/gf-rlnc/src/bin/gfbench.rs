//! Throughput benchmark driver for the region kernels.
//!
//! Measures multiply-and-add encoding throughput per field, kernel and
//! packet size, emits one CSV row per point, and summarizes the best
//! kernel per field over in-cache working sets. Exit code 0 on success,
//! 1 on usage or runtime errors, 2 when `--verify` finds a kernel that
//! disagrees with the reference multiply.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use gf_rlnc::bench::{
    cache_boundaries, render_csv, run_suite, BenchConfig, KernelChoice, TimingPolicy,
};
use gf_rlnc::{detect_features, Field, FieldId, KernelId};

#[derive(Parser)]
#[command(
    name = "gfbench",
    version,
    about = "Throughput benchmarks for finite-field region kernels"
)]
struct Cli {
    /// Field to measure: 2, 4, 16, 256, a comma list, or `all`
    #[arg(long, default_value = "all")]
    field: String,

    /// Kernel to measure: a kernel name, a comma list, `auto`, or `all`
    #[arg(long, default_value = "auto")]
    kernel: String,

    /// Source packets per generation
    #[arg(long, default_value_t = 16)]
    gen_size: usize,

    /// Packet sizes: a doubling range like `128..1M` or a comma list;
    /// sizes take K/M/G suffixes and must be multiples of 64
    #[arg(long, default_value = "128..1M")]
    sizes: String,

    /// Minimum seconds per measurement point
    #[arg(long, conflicts_with = "reps")]
    min_time: Option<f64>,

    /// Exact repetitions per measurement point
    #[arg(long)]
    reps: Option<u64>,

    /// Seed for payloads and coding vectors
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Pin the process to this CPU core before measuring
    #[arg(long)]
    pin: Option<usize>,

    /// Override the detected L2 size in bytes for summary bounding
    #[arg(long)]
    l2_bytes: Option<u64>,

    /// Write CSV rows to this file; without it they go to stdout and the
    /// human-readable report moves to stderr
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Check every kernel against the reference multiply before measuring
    #[arg(long)]
    verify: bool,

    /// List the kernels usable on this CPU per field and exit
    #[arg(long)]
    list_kernels: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return if usage_error { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("gfbench: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let fields = parse_fields(&cli.field)?;
    if cli.list_kernels {
        list_kernels(&fields);
        return Ok(ExitCode::SUCCESS);
    }

    let config = BenchConfig {
        fields,
        kernels: parse_kernel_choice(&cli.kernel)?,
        gen_size: cli.gen_size,
        packet_sizes: parse_sizes(&cli.sizes)?,
        policy: parse_policy(cli.min_time, cli.reps)?,
        seed: cli.seed,
        pin_core: cli.pin,
        l2_override: cli.l2_bytes,
        csv_path: cli.csv.clone(),
        verify: cli.verify,
    };

    // With no CSV file the rows own stdout and the report moves to stderr,
    // so `gfbench > out.csv` captures clean CSV.
    let report_on_stderr = config.csv_path.is_none();
    let report = |line: String| {
        if report_on_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    };

    let outcome = run_suite(&config, |r| {
        report(format!(
            "{} {} {} B: {:.3} Gbit/s ({} reps, {:.3} s)",
            r.field, r.kernel, r.packet_bytes, r.throughput_gbps, r.repetitions, r.elapsed_s
        ));
    })
    .map_err(|e| e.to_string())?;

    if !outcome.verify_failures.is_empty() {
        for f in &outcome.verify_failures {
            eprintln!("gfbench: verification failed: {f}");
        }
        return Ok(ExitCode::from(2));
    }
    if cli.verify {
        report("verification passed for every measured kernel".to_string());
    }

    for s in &outcome.skipped {
        report(format!("skipping {} for {}: {}", s.kernel, s.field, s.reason));
    }

    report(format!(
        "caches: L1d {}, L2 {}, L3 {}; core {}",
        cache(outcome.caches.l1d),
        cache(outcome.caches.l2),
        cache(outcome.caches.l3),
        outcome.pinned.map_or_else(|| "unpinned".to_string(), |c| c.to_string()),
    ));
    for b in cache_boundaries(&outcome.caches, config.gen_size) {
        report(format!(
            "working set leaves {} above {} B packets",
            b.label, b.packet_boundary_bytes
        ));
    }
    match outcome.l2_bound {
        Some(bound) => report(format!("summary bound: working set <= {bound} B")),
        None => report("summary bound: none (L2 size unknown)".to_string()),
    }
    for s in &outcome.summaries {
        let sizes: Vec<String> = s.included_sizes.iter().map(|v| v.to_string()).collect();
        report(format!(
            "{}: best kernel {} at {:.3} Gbit/s averaged over packet sizes {{{}}}",
            s.field,
            s.best_kernel,
            s.avg_throughput_gbps,
            sizes.join(", ")
        ));
    }

    match &config.csv_path {
        Some(path) => report(format!(
            "wrote {} CSV rows to {}",
            outcome.records.len(),
            path.display()
        )),
        None => print!("{}", render_csv(&outcome.records)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cache(v: Option<u64>) -> String {
    v.map_or_else(|| "unknown".to_string(), |b| format!("{b} B"))
}

fn list_kernels(fields: &[FieldId]) {
    let features = detect_features();
    let mut active = vec!["scalar"];
    if features.simd128_byte_permute {
        active.push("simd128_byte_permute");
    }
    if features.simd256_byte_permute {
        active.push("simd256_byte_permute");
    }
    if features.simd512_foundation {
        active.push("simd512_foundation");
    }
    if features.simd512_byte_and_word {
        active.push("simd512_byte_and_word");
    }
    println!("features: {}", active.join(" "));
    for &id in fields {
        let field = Field::new(id);
        let names: Vec<String> =
            field.supported_kernels().iter().map(|k| k.to_string()).collect();
        let auto = field.select_kernel(None).expect("scalar is always available");
        println!("{}: {} (auto: {auto})", field.id(), names.join(" "));
    }
}

fn parse_fields(s: &str) -> Result<Vec<FieldId>, String> {
    if s.trim() == "all" {
        return Ok(FieldId::ALL.to_vec());
    }
    s.split(',')
        .map(|part| {
            let q: u16 = part.trim().parse().map_err(|_| bad_field(part))?;
            FieldId::from_q(q).ok_or_else(|| bad_field(part))
        })
        .collect()
}

fn bad_field(part: &str) -> String {
    format!("unknown field `{}` (expected 2, 4, 16, 256 or all)", part.trim())
}

fn parse_kernel_choice(s: &str) -> Result<KernelChoice, String> {
    match s.trim() {
        "auto" => Ok(KernelChoice::Auto),
        "all" => Ok(KernelChoice::All),
        list => list
            .split(',')
            .map(|part| part.trim().parse::<KernelId>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<KernelId>, String>>()
            .map(KernelChoice::List),
    }
}

fn parse_policy(min_time: Option<f64>, reps: Option<u64>) -> Result<TimingPolicy, String> {
    match (min_time, reps) {
        (None, None) => Ok(TimingPolicy::default()),
        (None, Some(r)) => Ok(TimingPolicy::FixedReps(r)),
        (Some(t), None) if t > 0.0 && t.is_finite() => {
            Ok(TimingPolicy::MinTime(Duration::from_secs_f64(t)))
        }
        (Some(t), None) => Err(format!("--min-time must be a positive duration, got {t}")),
        (Some(_), Some(_)) => unreachable!("clap rejects --min-time with --reps"),
    }
}

/// One size like `4096`, `64K`, `1M`.
fn parse_size(s: &str) -> Result<usize, String> {
    let t = s.trim();
    let (digits, mult) = match t.as_bytes().last() {
        Some(b'K' | b'k') => (&t[..t.len() - 1], 1024),
        Some(b'M' | b'm') => (&t[..t.len() - 1], 1024 * 1024),
        Some(b'G' | b'g') => (&t[..t.len() - 1], 1024 * 1024 * 1024),
        _ => (t, 1),
    };
    digits
        .trim()
        .parse::<usize>()
        .ok()
        .and_then(|v| v.checked_mul(mult))
        .ok_or_else(|| format!("bad size `{t}`"))
}

/// Either `lo..hi` (doubling sweep, inclusive on both ends) or a comma
/// list. The region constraint (multiples of 64) is enforced here so a
/// typo fails before anything runs.
fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let sizes: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let lo = parse_size(lo)?;
        let hi = parse_size(hi)?;
        if lo == 0 || hi < lo {
            return Err(format!("bad size range `{s}`"));
        }
        let mut sweep = Vec::new();
        let mut p = lo;
        while p <= hi {
            sweep.push(p);
            match p.checked_mul(2) {
                Some(next) => p = next,
                None => break,
            }
        }
        sweep
    } else {
        s.split(',').map(parse_size).collect::<Result<_, _>>()?
    };
    for &size in &sizes {
        if size == 0 || !size.is_multiple_of(64) {
            return Err(format!("packet size {size} is not a positive multiple of 64"));
        }
    }
    Ok(sizes)
}

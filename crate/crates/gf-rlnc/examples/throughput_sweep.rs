//! Programmatic benchmarking: sweep packet sizes across every supported
//! kernel for one field, watch throughput fall as the working set leaves
//! each cache level, and pick the best in-cache kernel.
//!
//! The `gfbench` binary wraps this same machinery with CSV output; this
//! example keeps the run short with a fixed repetition count.

use std::time::Duration;

use gf_rlnc::bench::{
    cache_boundaries, run_suite, BenchConfig, KernelChoice, TimingPolicy,
};
use gf_rlnc::FieldId;

fn main() {
    let config = BenchConfig {
        fields: vec![FieldId::Gf256],
        kernels: KernelChoice::All,
        gen_size: 16,
        packet_sizes: vec![256, 1024, 4096, 16384],
        policy: TimingPolicy::MinTime(Duration::from_millis(40)),
        seed: 1,
        verify: true,
        ..BenchConfig::default()
    };

    let outcome = run_suite(&config, |r| {
        println!(
            "{} {:>10} {:>7} B {:>10.3} Gbit/s (working set {} B)",
            r.field, r.kernel.to_string(), r.packet_bytes, r.throughput_gbps, r.working_set_bytes
        );
    })
    .expect("benchmark configuration is valid");

    if !outcome.verify_failures.is_empty() {
        for f in &outcome.verify_failures {
            eprintln!("verification failed: {f}");
        }
        std::process::exit(2);
    }

    println!();
    for b in cache_boundaries(&outcome.caches, config.gen_size) {
        println!(
            "{} holds the working set up to {} B packets ({} B cache)",
            b.label, b.packet_boundary_bytes, b.cache_bytes
        );
    }
    for s in &outcome.summaries {
        println!(
            "{}: best kernel {} averaging {:.3} Gbit/s over in-cache sizes {:?}",
            s.field, s.best_kernel, s.avg_throughput_gbps, s.included_sizes
        );
    }
}

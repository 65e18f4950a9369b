//! Measurement hygiene: the timed section of a benchmark point must not
//! allocate, and the multiply-and-add call counter must scale exactly
//! with repetitions and generation size.
//!
//! A single test owns the process-wide allocator instrumentation, so
//! nothing else in this binary can race the counters.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicU64, Ordering};

use gf_rlnc::bench::{run_point, timed_section_active, RunEnv, TimingPolicy};
use gf_rlnc::{Field, FieldId};

struct TimedSectionWatch;

static TIMED_ALLOCS: AtomicU64 = AtomicU64::new(0);

fn note_if_timed() {
    if timed_section_active() {
        TIMED_ALLOCS.fetch_add(1, Ordering::SeqCst);
    }
}

// SAFETY: defers every operation to System; only adds counting.
unsafe impl GlobalAlloc for TimedSectionWatch {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        note_if_timed();
        System.alloc(layout)
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        note_if_timed();
        System.alloc_zeroed(layout)
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        note_if_timed();
        System.realloc(ptr, layout, new_size)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static ALLOC: TimedSectionWatch = TimedSectionWatch;

#[test]
fn timed_loops_never_allocate_and_count_their_madds() {
    let env = RunEnv::default();
    for id in [FieldId::Gf2, FieldId::Gf256] {
        let field = Field::new(id);
        for kernel in field.supported_kernels() {
            TIMED_ALLOCS.store(0, Ordering::SeqCst);
            run_point(&field, kernel, 256, 4, TimingPolicy::FixedReps(25), 3, &env).unwrap();
            assert!(!timed_section_active());
            assert_eq!(
                TIMED_ALLOCS.load(Ordering::SeqCst),
                0,
                "{id} {kernel}: allocation inside the timed loop"
            );
        }
    }

    // Call counting is compiled into debug builds; the test profile keeps
    // debug assertions on. One warmup encoding plus reps * gen_size calls.
    #[cfg(debug_assertions)]
    {
        let field = Field::new(FieldId::Gf16);
        let kernel = field.select_kernel(None).unwrap();
        let counted = |reps: u64, gen_size: usize| {
            gf_rlnc::kernels::reset_madd_call_count();
            run_point(
                &field,
                kernel,
                128,
                gen_size,
                TimingPolicy::FixedReps(reps),
                7,
                &env,
            )
            .unwrap();
            gf_rlnc::kernels::madd_call_count()
        };
        let base = counted(10, 4);
        assert_eq!(base, (10 + 1) * 4);
        assert_eq!(counted(20, 4), (20 + 1) * 4, "doubling reps must double the work");
        assert_eq!(counted(10, 8), (10 + 1) * 8, "doubling gen size must double the work");
    }
}

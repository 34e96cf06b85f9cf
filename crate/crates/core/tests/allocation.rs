//! A fused program renders with one allocation: the output buffer.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use fusion_core::generator::{amplify, exponential, mix, noise, osci, saw_wave};
use fusion_core::vector::{exponential_vec, osci_vec};
use fusion_core::{render, render_blocks};

struct Counting;

static ALLOCS: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        ALLOCS.fetch_add(1, Ordering::SeqCst);
        System.alloc(layout)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

fn allocations<R>(f: impl FnOnce() -> R) -> (R, usize) {
    let before = ALLOCS.load(Ordering::SeqCst);
    let r = f();
    (r, ALLOCS.load(Ordering::SeqCst) - before)
}

// Single test function: the counter is process-wide.
#[test]
fn rendering_allocates_only_the_output() {
    let program = mix(
        amplify(exponential(5000.0, 0.5f32).unwrap(), osci(saw_wave::<f32>, 0.0, 0.01).unwrap()),
        amplify(exponential(100.0, 0.1f32).unwrap(), noise::<f32>(7)),
    );
    let (out, n) = allocations(|| render(&program, 100_000).unwrap());
    assert_eq!(out.len(), 100_000);
    assert_eq!(n, 1);

    let block = fusion_core::generator::amplify(
        exponential_vec::<f32, 8>(5000.0, 0.5).unwrap(),
        osci_vec::<_, f32, f32, 8>(saw_wave::<f32>, 0.0, 0.01).unwrap(),
    );
    let (out, n) = allocations(|| render_blocks(&block, 100_003).unwrap());
    assert_eq!(out.len(), 100_003);
    assert_eq!(n, 1);
}

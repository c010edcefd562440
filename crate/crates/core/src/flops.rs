//! Thread-local floating point operation counters.
//!
//! Every instrumented kernel reports its arithmetic here. A multiply-add
//! counts as one multiply plus one add; copies and comparisons are free.

use std::cell::Cell;

/// Snapshot of the counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounter {
    pub adds: u64,
    pub mults: u64,
    pub divs: u64,
}

impl FlopCounter {
    pub fn total(&self) -> u64 {
        self.adds + self.mults + self.divs
    }

    fn delta(self, earlier: FlopCounter) -> FlopCounter {
        FlopCounter {
            adds: self.adds - earlier.adds,
            mults: self.mults - earlier.mults,
            divs: self.divs - earlier.divs,
        }
    }
}

impl std::ops::Add for FlopCounter {
    type Output = FlopCounter;
    fn add(self, o: FlopCounter) -> FlopCounter {
        FlopCounter {
            adds: self.adds + o.adds,
            mults: self.mults + o.mults,
            divs: self.divs + o.divs,
        }
    }
}

thread_local! {
    static COUNTER: Cell<FlopCounter> = const { Cell::new(FlopCounter { adds: 0, mults: 0, divs: 0 }) };
    static PAUSED: Cell<u32> = const { Cell::new(0) };
}

#[inline]
fn bump(f: impl FnOnce(&mut FlopCounter)) {
    if PAUSED.with(|p| p.get()) > 0 {
        return;
    }
    COUNTER.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// `n` fused multiply-adds (2 flops each).
#[inline]
pub fn mul_add(n: usize) {
    bump(|c| {
        c.adds += n as u64;
        c.mults += n as u64;
    });
}

#[inline]
pub fn add(n: usize) {
    bump(|c| c.adds += n as u64);
}

#[inline]
pub fn mul(n: usize) {
    bump(|c| c.mults += n as u64);
}

#[inline]
pub fn div(n: usize) {
    bump(|c| c.divs += n as u64);
}

pub fn current() -> FlopCounter {
    COUNTER.with(|c| c.get())
}

pub fn reset() {
    COUNTER.with(|c| c.set(FlopCounter::default()));
}

/// Runs `f` and returns the flops it performed on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, FlopCounter) {
    let before = current();
    let r = f();
    (r, current().delta(before))
}

/// Runs `f` without counting (used for instrumentation-only work such as
/// error norms against a reference solution).
pub fn uncounted<R>(f: impl FnOnce() -> R) -> R {
    PAUSED.with(|p| p.set(p.get() + 1));
    let r = f();
    PAUSED.with(|p| p.set(p.get() - 1));
    r
}

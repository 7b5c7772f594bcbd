//! Digit-spectral statistics of the von Mangoldt function.
//!
//! The crate computes, at desk scale, the interaction between prime powers
//! (through the von Mangoldt function Λ and the Möbius function μ) and the
//! binary-digit structure of integers below `2^n`:
//!
//! * [`arith`] — segmented sieves producing dense tables or streamed windows
//!   of Λ and μ over `[1, 2^n)`.
//! * [`walsh`] — Walsh–Hadamard transforms, streamed Walsh coefficients of Λ,
//!   Krawtchouk class sums and the exact spectrum of the majority function.
//! * [`boolfn`] — symbolic Boolean functions (majority, parity, dictator,
//!   threshold, Walsh characters), their correlation with arithmetic tables,
//!   and the noise operator on spectra.
//! * [`digitclass`] — the decomposition of Λ-mass by binary digit sum:
//!   class sums `s_k`, the symmetrized function, central moments and tails.
//! * [`expsum`] — exponential sums over digit sums, their Fourier
//!   coefficients, Type-I/II bilinear sums and rational approximation.
//! * [`fitlab`] — decay-law fitting and the top-level experiment drivers.
//!
//! The crate is `no_std` (with `alloc`) by default. The optional `std`
//! feature adds thread fan-out for window streaming; results are merged in
//! fixed window order, so sequential and threaded runs are bit-identical.
//! All transcendental functions go through `libm`, which keeps numeric
//! output independent of the platform's system math library.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod arith;
pub mod boolfn;
pub mod digitclass;
pub mod expsum;
pub mod fitlab;
pub mod kahan;
pub mod walsh;

pub use num_complex::Complex64;

use core::fmt;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on arguments was violated; the message names it.
    InvalidArgument(&'static str),
    /// A dense allocation or streaming scratch would exceed the memory budget.
    BudgetExceeded { needed_bytes: u64, budget_bytes: u64 },
    /// Exact integer arithmetic left the 128-bit range.
    Overflow(&'static str),
    /// A thread count above 1 was requested without the `std` feature.
    ThreadsUnavailable,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::BudgetExceeded { needed_bytes, budget_bytes } => write!(
                f,
                "memory budget exceeded: need {needed_bytes} bytes, budget {budget_bytes} bytes"
            ),
            Error::Overflow(what) => write!(f, "exact integer overflow in {what}"),
            Error::ThreadsUnavailable => {
                write!(f, "thread counts above 1 require the `std` feature")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// Execution configuration shared by the streaming and dense operations:
/// a hard memory budget, the window size for segmented sieving, and the
/// worker thread count used when fanning windows out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exec {
    /// Hard cap on bytes any single operation may allocate.
    pub budget_bytes: u64,
    /// Sieve window length; must be a power of two.
    pub segment: u64,
    /// Worker threads for window streaming. More than 1 requires the `std`
    /// feature; the reduction order is fixed either way.
    pub threads: usize,
}

pub const DEFAULT_BUDGET_BYTES: u64 = 4 << 30;
pub const DEFAULT_SEGMENT: u64 = 1 << 16;

impl Default for Exec {
    fn default() -> Self {
        Exec { budget_bytes: DEFAULT_BUDGET_BYTES, segment: DEFAULT_SEGMENT, threads: 1 }
    }
}

impl Exec {
    pub fn validate(&self) -> Result<()> {
        if self.segment < 2 || !self.segment.is_power_of_two() {
            return Err(Error::InvalidArgument("segment size must be a power of two >= 2"));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("thread count must be at least 1"));
        }
        if self.threads > 1 && !cfg!(feature = "std") {
            return Err(Error::ThreadsUnavailable);
        }
        Ok(())
    }

    pub fn check_budget(&self, needed_bytes: u64) -> Result<()> {
        if needed_bytes > self.budget_bytes {
            return Err(Error::BudgetExceeded {
                needed_bytes,
                budget_bytes: self.budget_bytes,
            });
        }
        Ok(())
    }
}

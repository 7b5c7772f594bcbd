//! Segmented sieves for the von Mangoldt and Möbius functions over `[1, 2^n)`.
//!
//! Dense tables are available up to `n = 26`; window streaming reaches
//! `n = 34` with bounded memory. Each window is sieved independently: base
//! primes up to `sqrt(2^n)` strip factors from every entry, and the residual
//! left after stripping identifies large prime factors. Aggregates are built
//! from per-window partials merged in ascending window order, which makes the
//! threaded and sequential paths produce bit-identical results.

use alloc::vec;
use alloc::vec::Vec;

use crate::kahan::KahanSum;
use crate::{Error, Exec, Result};

/// Largest `n` for which a dense `2^n`-entry table may be built.
pub const DENSE_N_MAX: u32 = 26;
/// Largest `n` accepted by the streaming operations.
pub const STREAM_N_MAX: u32 = 34;

/// Which arithmetic function a table or stream carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ArithKind {
    VonMangoldt,
    Moebius,
}

/// Dense values of Λ or μ for `x ∈ [0, 2^n)`, with `value(0) = 0`.
#[derive(Debug, Clone)]
pub struct ArithTable {
    n: u32,
    kind: ArithKind,
    values: Vec<f64>,
}

impl ArithTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> ArithKind {
        self.kind
    }

    /// Value at `x`; `x` must be below `2^n`.
    pub fn value(&self, x: u64) -> f64 {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes the table, yielding the raw value vector (length `2^n`).
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// One sieved window `[lo, hi)`; `values[i]` belongs to `x = lo + i`.
#[derive(Debug, Clone)]
pub struct SieveWindow {
    pub lo: u64,
    pub hi: u64,
    pub values: Vec<f64>,
}

/// Binary digit sum (population count) of `x`.
#[inline]
pub fn digit_sum(x: u64) -> u32 {
    x.count_ones()
}

/// Primes `p` with `p² < hi`, i.e. every base prime a segmented sieve of
/// `[lo, hi)` needs. Computed by a plain Eratosthenes sieve.
pub fn base_primes(hi: u64) -> Vec<u64> {
    if hi <= 4 {
        return Vec::new();
    }
    let limit = (hi - 1).isqrt() as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for p in 2..=limit {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Sieves the window `[lo, hi)` for `kind`, returning one value per entry.
/// `base` must contain every prime `p` with `p² < hi` (see [`base_primes`]).
pub fn sieve_range(kind: ArithKind, lo: u64, hi: u64, base: &[u64]) -> Vec<f64> {
    match kind {
        ArithKind::VonMangoldt => mangoldt_range(lo, hi, base),
        ArithKind::Moebius => moebius_range(lo, hi, base),
    }
}

fn mangoldt_range(lo: u64, hi: u64, base: &[u64]) -> Vec<f64> {
    let len = (hi - lo) as usize;
    let mut residual: Vec<u64> = (lo..hi).collect();
    let mut distinct = vec![0u8; len];
    let mut first_prime = vec![0u64; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p).max(1) * p;
        while m < hi {
            let i = (m - lo) as usize;
            distinct[i] += 1;
            if first_prime[i] == 0 {
                first_prime[i] = p;
            }
            loop {
                residual[i] /= p;
                if !residual[i].is_multiple_of(p) {
                    break;
                }
            }
            m += p;
        }
    }
    let mut out = vec![0.0f64; len];
    for i in 0..len {
        if lo + (i as u64) < 2 {
            continue;
        }
        let mut d = distinct[i];
        let mut fp = first_prime[i];
        if residual[i] > 1 {
            d += 1;
            if fp == 0 {
                fp = residual[i];
            }
        }
        if d == 1 {
            out[i] = libm::log(fp as f64);
        }
    }
    out
}

fn moebius_range(lo: u64, hi: u64, base: &[u64]) -> Vec<f64> {
    let len = (hi - lo) as usize;
    let mut residual: Vec<u64> = (lo..hi).collect();
    let mut sign = vec![1i8; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p).max(1) * p;
        while m < hi {
            let i = (m - lo) as usize;
            let mut exponent = 0u32;
            while residual[i].is_multiple_of(p) {
                residual[i] /= p;
                exponent += 1;
            }
            if exponent >= 2 {
                sign[i] = 0;
            } else if sign[i] != 0 {
                sign[i] = -sign[i];
            }
            m += p;
        }
    }
    let mut out = vec![0.0f64; len];
    for i in 0..len {
        let x = lo + i as u64;
        if x == 0 {
            continue;
        }
        if x == 1 {
            out[i] = 1.0;
            continue;
        }
        let mut s = sign[i];
        if residual[i] > 1 && s != 0 {
            s = -s;
        }
        out[i] = f64::from(s);
    }
    out
}

/// Primes in `[lo, hi)`, via composite marking against `base`.
pub fn primes_in_range(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi <= 2 {
        return Vec::new();
    }
    let len = (hi - lo) as usize;
    let mut is_prime = vec![true; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut m = (p * p).max(lo.div_ceil(p) * p);
        while m < hi {
            is_prime[(m - lo) as usize] = false;
            m += p;
        }
    }
    let mut out = Vec::new();
    for (i, &keep) in is_prime.iter().enumerate() {
        let x = lo + i as u64;
        if x >= 2 && keep {
            out.push(x);
        }
    }
    out
}

pub(crate) fn window_ranges(n: u32, segment: u64) -> impl Iterator<Item = (u64, u64)> {
    let end = 1u64 << n;
    let seg = segment;
    core::iter::successors(Some((1u64, seg.min(end))), move |&(_, hi)| {
        if hi >= end {
            None
        } else {
            Some((hi, (hi + seg).min(end)))
        }
    })
}

fn check_stream_args(n: u32, exec: &Exec) -> Result<()> {
    exec.validate()?;
    if n == 0 || n > STREAM_N_MAX {
        return Err(Error::InvalidArgument("streaming requires 1 <= n <= 34"));
    }
    // Scratch per worker: values, residuals, multiplicity bookkeeping. A
    // segment larger than the range degenerates to a single window.
    let per_entry = 40u64;
    exec.check_budget(exec.segment.min(1u64 << n) * per_entry * exec.threads as u64)?;
    Ok(())
}

/// Streams sieved windows tiling `[1, 2^n)` to `visitor`, in ascending order.
pub fn stream_windows(
    n: u32,
    kind: ArithKind,
    exec: &Exec,
    mut visitor: impl FnMut(&SieveWindow),
) -> Result<()> {
    check_stream_args(n, exec)?;
    let base = base_primes(1u64 << n);
    for (lo, hi) in window_ranges(n, exec.segment) {
        let w = SieveWindow { lo, hi, values: sieve_range(kind, lo, hi, &base) };
        visitor(&w);
    }
    Ok(())
}

/// Computes a per-window partial for every window tiling `[1, 2^n)` and
/// merges the partials in ascending window order. With `exec.threads > 1`
/// (requires the `std` feature) windows are sieved concurrently, but the
/// merge order is unchanged, so the result is identical to a sequential run.
pub fn fold_windows<P, W, F, M>(
    n: u32,
    kind: ArithKind,
    exec: &Exec,
    init: P,
    per_window: F,
    mut merge: M,
) -> Result<P>
where
    W: Send,
    F: Fn(&SieveWindow) -> W + Sync,
    M: FnMut(&mut P, W),
{
    check_stream_args(n, exec)?;
    let base = base_primes(1u64 << n);
    let mut acc = init;
    if exec.threads <= 1 {
        for (lo, hi) in window_ranges(n, exec.segment) {
            let w = SieveWindow { lo, hi, values: sieve_range(kind, lo, hi, &base) };
            merge(&mut acc, per_window(&w));
        }
        return Ok(acc);
    }
    #[cfg(feature = "std")]
    {
        let ranges: Vec<(u64, u64)> = window_ranges(n, exec.segment).collect();
        let mut partials: Vec<Option<W>> = ranges.iter().map(|_| None).collect();
        let chunk = ranges.len().div_ceil(exec.threads);
        std::thread::scope(|scope| {
            for (range_chunk, partial_chunk) in
                ranges.chunks(chunk).zip(partials.chunks_mut(chunk))
            {
                let base = &base;
                let per_window = &per_window;
                scope.spawn(move || {
                    for (&(lo, hi), slot) in range_chunk.iter().zip(partial_chunk.iter_mut()) {
                        let w =
                            SieveWindow { lo, hi, values: sieve_range(kind, lo, hi, base) };
                        *slot = Some(per_window(&w));
                    }
                });
            }
        });
        for p in partials {
            merge(&mut acc, p.expect("every window produces a partial"));
        }
        Ok(acc)
    }
    #[cfg(not(feature = "std"))]
    {
        // Exec::validate already rejected threads > 1 without `std`.
        unreachable!("thread fan-out unavailable without the std feature")
    }
}

/// Builds the dense table of `kind` over `[0, 2^n)`; index 0 carries 0 so the
/// array length is a power of two and can be transformed directly.
pub fn sieve_table(n: u32, kind: ArithKind, exec: &Exec) -> Result<ArithTable> {
    exec.validate()?;
    if n == 0 || n > DENSE_N_MAX {
        return Err(Error::InvalidArgument("dense tables require 1 <= n <= 26"));
    }
    let len = 1u64 << n;
    exec.check_budget(len * 8 + exec.segment.min(len) * 40)?;
    let base = base_primes(len);
    let mut values = vec![0.0f64; len as usize];
    for (lo, hi) in window_ranges(n, exec.segment) {
        let window = sieve_range(kind, lo, hi, &base);
        values[lo as usize..hi as usize].copy_from_slice(&window);
    }
    Ok(ArithTable { n, kind, values })
}

/// Chebyshev ψ: the sum of Λ over `1 ≤ x < 2^n`, streamed.
pub fn chebyshev_psi(n: u32, exec: &Exec) -> Result<f64> {
    let total = fold_windows(
        n,
        ArithKind::VonMangoldt,
        exec,
        KahanSum::new(),
        |w| {
            let mut part = KahanSum::new();
            for &v in &w.values {
                if v != 0.0 {
                    part.add(v);
                }
            }
            part.value()
        },
        |acc: &mut KahanSum, part| acc.add(part),
    )?;
    Ok(total.value())
}

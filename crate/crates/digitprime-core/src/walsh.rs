//! Walsh–Hadamard analysis on the Boolean cube `{0,1}^n`.
//!
//! Conventions. A subset `S ⊆ {0, …, n−1}` is a bit mask whose bit `j`
//! selects digit `j` (LSB = digit 0). The Walsh character is
//! `w_S(x) = ∏_{j∈S} (1 − 2 x_j) = (−1)^{popcount(x & S)}`, and coefficients
//! use the uniform-measure normalization `ĝ(S) = 2^{−n} Σ_x g(x) w_S(x)`,
//! so Parseval reads `Σ_S ĝ(S)² = 2^{−n} Σ_x g(x)²`.
//!
//! The module provides the in-place transform, streamed coefficients of
//! sieved functions (no `2^n` array needed), Krawtchouk class sums in exact
//! 128-bit arithmetic, and from those the exact level-`k` spectrum of the
//! majority function on odd `n` digits.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{fold_windows, ArithKind};
use crate::kahan::KahanSum;
use crate::{Error, Exec, Result};

/// Walsh coefficients of a function on `{0,1}^n`, indexed by subset mask.
/// Always carries the uniform-measure normalization (see module docs).
#[derive(Debug, Clone)]
pub struct SpectrumVector {
    n: u32,
    coeffs: Vec<f64>,
}

impl SpectrumVector {
    /// Tag describing the fixed coefficient normalization.
    pub const NORMALIZATION: &'static str = "uniform-measure";

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Coefficient at subset mask `s`.
    pub fn coeff(&self, s: u64) -> f64 {
        self.coeffs[s as usize]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Σ_S ĝ(S)², the spectral side of Parseval.
    pub fn parseval_total(&self) -> f64 {
        let mut total = KahanSum::new();
        for &c in &self.coeffs {
            total.add(c * c);
        }
        total.value()
    }

    /// Wraps raw coefficients that already use the uniform normalization.
    pub fn from_raw(n: u32, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 63 || coeffs.len() != 1usize << n {
            return Err(Error::InvalidArgument("coefficient length must equal 2^n"));
        }
        Ok(SpectrumVector { n, coeffs })
    }
}

/// Total squared coefficient mass per level `k = |S|`.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelWeights {
    pub n: u32,
    /// `w[k] = Σ_{|S|=k} ĝ(S)²` for `k = 0..=n`.
    pub w: Vec<f64>,
}

/// In-place unnormalized butterfly: replaces `values` by `H·values` where
/// `H[S][x] = w_S(x)`. Applying it twice multiplies by the length.
pub fn fwht_in_place(values: &mut [f64]) {
    debug_assert!(values.len().is_power_of_two());
    let mut h = 1;
    while h < values.len() {
        let mut i = 0;
        while i < values.len() {
            for j in i..i + h {
                let a = values[j];
                let b = values[j + h];
                values[j] = a + b;
                values[j + h] = a - b;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

/// Analysis transform: consumes point values, returns `ĝ(S) = 2^{−n} Σ g w_S`.
pub fn fwht(mut values: Vec<f64>) -> Result<SpectrumVector> {
    let len = values.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument("transform length must be a power of two >= 2"));
    }
    let n = len.trailing_zeros();
    fwht_in_place(&mut values);
    let scale = 1.0 / len as f64;
    for v in &mut values {
        *v *= scale;
    }
    Ok(SpectrumVector { n, coeffs: values })
}

/// Synthesis transform: recovers the point values of a spectrum exactly
/// (the unnormalized butterfly inverts the `2^{−n}`-scaled analysis).
pub fn synthesize(spectrum: &SpectrumVector) -> Vec<f64> {
    let mut values = spectrum.coeffs.clone();
    fwht_in_place(&mut values);
    values
}

/// Streamed Walsh coefficient of a sieved function: `2^{−n} Σ_x value(x)
/// w_S(x)` without materializing the table.
pub fn walsh_coefficient_streaming(
    n: u32,
    kind: ArithKind,
    s_mask: u64,
    exec: &Exec,
) -> Result<f64> {
    Ok(walsh_coefficients_streaming(n, kind, &[s_mask], exec)?[0])
}

/// Batch variant of [`walsh_coefficient_streaming`]: one pass over the sieve
/// accumulates every requested mask (zero entries are skipped, which makes
/// the von Mangoldt case cheap).
pub fn walsh_coefficients_streaming(
    n: u32,
    kind: ArithKind,
    masks: &[u64],
    exec: &Exec,
) -> Result<Vec<f64>> {
    if n > 63 {
        return Err(Error::InvalidArgument("mask streaming requires n <= 63"));
    }
    for &m in masks {
        if m >> n != 0 {
            return Err(Error::InvalidArgument("subset mask has bits outside [0, n)"));
        }
    }
    let totals = fold_windows(
        n,
        kind,
        exec,
        vec![KahanSum::new(); masks.len()],
        |w| {
            let mut part = vec![KahanSum::new(); masks.len()];
            for (i, &v) in w.values.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let x = w.lo + i as u64;
                for (acc, &m) in part.iter_mut().zip(masks) {
                    if (x & m).count_ones() & 1 == 0 {
                        acc.add(v);
                    } else {
                        acc.add(-v);
                    }
                }
            }
            part.iter().map(KahanSum::value).collect::<Vec<f64>>()
        },
        |acc: &mut Vec<KahanSum>, part| {
            for (a, p) in acc.iter_mut().zip(part) {
                a.add(p);
            }
        },
    )?;
    let scale = 1.0 / (1u64 << n) as f64;
    Ok(totals.iter().map(|k| k.value() * scale).collect())
}

/// Collapses a spectrum to its level weights `W_k = Σ_{|S|=k} ĝ(S)²`.
pub fn level_weights(spectrum: &SpectrumVector) -> LevelWeights {
    let n = spectrum.n;
    let mut acc = vec![KahanSum::new(); n as usize + 1];
    for (s, &c) in spectrum.coeffs.iter().enumerate() {
        acc[(s as u64).count_ones() as usize].add(c * c);
    }
    LevelWeights { n, w: acc.iter().map(KahanSum::value).collect() }
}

fn binomial_i128(a: u32, b: u32) -> Result<i128> {
    if b > a {
        return Ok(0);
    }
    let b = b.min(a - b);
    let mut r: i128 = 1;
    for t in 1..=b as i128 {
        let factor = (a as i128) - (b as i128) + t;
        r = r
            .checked_mul(factor)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / t;
    }
    Ok(r)
}

/// Sum of the Walsh character `w_S` over the digit class `Ω_j = {x :
/// popcount(x) = j}`, for any `S` with `|S| = k`. Evaluated as the
/// alternating sum `Σ_i (−1)^i C(k,i) C(n−k, j−i)` in checked 128-bit
/// integers; overflow is an error, never a wrapped value.
pub fn krawtchouk_class_sum(n: u32, k: u32, j: u32) -> Result<i128> {
    if k > n || j > n {
        return Err(Error::InvalidArgument("krawtchouk indices must satisfy k, j <= n"));
    }
    let lo = j.saturating_sub(n - k);
    let hi = k.min(j);
    let mut total: i128 = 0;
    let mut i = lo;
    while i <= hi {
        let term = binomial_i128(k, i)?
            .checked_mul(binomial_i128(n - k, j - i)?)
            .ok_or(Error::Overflow("krawtchouk term"))?;
        total = if i.is_multiple_of(2) {
            total.checked_add(term)
        } else {
            total.checked_sub(term)
        }
        .ok_or(Error::Overflow("krawtchouk sum"))?;
        if i == hi {
            break;
        }
        i += 1;
    }
    Ok(total)
}

/// Level-`k` Walsh coefficient of the majority function on odd `n` digits:
/// `f̂(k) = 2^{−n} Σ_{j > n/2} (class sum of w_S over Ω_j)`. By symmetry the
/// coefficient depends on `S` only through `k = |S|`.
pub fn majority_level_coefficient(n: u32, k: u32) -> Result<f64> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidArgument("majority requires odd n (no ties)"));
    }
    if n > 63 || k > n {
        return Err(Error::InvalidArgument("majority coefficient requires k <= n <= 63"));
    }
    let mut total: i128 = 0;
    for j in n.div_ceil(2)..=n {
        total = total
            .checked_add(krawtchouk_class_sum(n, k, j)?)
            .ok_or(Error::Overflow("majority coefficient"))?;
    }
    Ok(total as f64 / (1u64 << n) as f64)
}

/// Level weights of the majority function up to `k_max`, with the spectral
/// tail above each level.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MajorityProfile {
    pub n: u32,
    pub k_max: u32,
    /// `w[k] = C(n,k)·f̂(k)²` for `k = 0..=k_max`.
    pub w: Vec<f64>,
    /// `tails[k] = Σ_{k' > k} W_{k'}`, from the exact total `Σ_k W_k = 1/2`
    /// (majority is a 0/1 indicator of exactly half the cube).
    pub tails: Vec<f64>,
}

/// Exact majority spectrum profile via Krawtchouk sums; no cube enumeration.
pub fn majority_spectrum_profile(n: u32, k_max: u32) -> Result<MajorityProfile> {
    if k_max > n {
        return Err(Error::InvalidArgument("k_max must not exceed n"));
    }
    let mut w = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let coeff = majority_level_coefficient(n, k)?;
        let choose = binomial_i128(n, k)? as f64;
        w.push(choose * coeff * coeff);
    }
    // Parseval total for the 0/1 majority indicator: 2^{−n}·2^{n−1} = 1/2.
    let mut cumulative = KahanSum::new();
    let mut tails = Vec::with_capacity(w.len());
    for &wk in &w {
        cumulative.add(wk);
        tails.push(0.5 - cumulative.value());
    }
    Ok(MajorityProfile { n, k_max, w, tails })
}

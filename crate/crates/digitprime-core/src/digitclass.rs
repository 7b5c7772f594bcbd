//! Digit-class decomposition of von Mangoldt mass. The class `Ω_k` holds the
//! `x < 2^n` whose binary digit sum is `k`; `s_k` is the Λ-mass it carries.
//! Everything downstream of the class sums (symmetrization, inner products
//! with symmetric functions, moments, tails) is a cheap exact computation on
//! the `n+1` numbers `s_0 … s_n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{digit_sum, fold_windows, ArithKind};
use crate::boolfn::{class_average, BooleanFunctionSpec};
use crate::kahan::KahanSum;
use crate::{Error, Exec, Result};

/// The vector `s_k = Σ_{x ∈ Ω_k} Λ(x)` for `k = 0..=n`, plus its total.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DigitClassSums {
    n: u32,
    s: Vec<f64>,
    psi: f64,
}

impl DigitClassSums {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s_k(&self, k: u32) -> f64 {
        self.s[k as usize]
    }

    /// Σ_k s_k; agrees with the streamed Chebyshev ψ up to roundoff.
    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Builds class sums from raw values (for synthetic inputs and tests);
    /// `s` must have length `n + 1` and no negative entries.
    pub fn from_raw(n: u32, s: Vec<f64>) -> Result<Self> {
        if s.len() != n as usize + 1 {
            return Err(Error::InvalidArgument("class vector must have length n + 1"));
        }
        if s.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidArgument("class sums must be finite and nonnegative"));
        }
        let mut total = KahanSum::new();
        for &v in &s {
            total.add(v);
        }
        Ok(DigitClassSums { n, s, psi: total.value() })
    }
}

/// Streams Λ over `[1, 2^n)`, bucketing each value by digit sum.
pub fn digit_class_sums(n: u32, exec: &Exec) -> Result<DigitClassSums> {
    let buckets = fold_windows(
        n,
        ArithKind::VonMangoldt,
        exec,
        vec![KahanSum::new(); n as usize + 1],
        |w| {
            let mut part = vec![KahanSum::new(); n as usize + 1];
            for (i, &v) in w.values.iter().enumerate() {
                if v != 0.0 {
                    part[digit_sum(w.lo + i as u64) as usize].add(v);
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
    let s: Vec<f64> = buckets.iter().map(KahanSum::value).collect();
    let mut total = KahanSum::new();
    for &v in &s {
        total.add(v);
    }
    Ok(DigitClassSums { n, s, psi: total.value() })
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    // n stays within the streaming cap (34), so the 128-bit value is exact
    // and the cast is faithful.
    crate::walsh::krawtchouk_class_sum(n, 0, k).map(|v| v as f64).unwrap_or(f64::INFINITY)
}

/// Value of the symmetrized function Λ_s on `Ω_k`: the class average
/// `s_k / C(n,k)`.
pub fn symmetrized_value(sums: &DigitClassSums, k: u32) -> Result<f64> {
    if k > sums.n {
        return Err(Error::InvalidArgument("class index k must not exceed n"));
    }
    Ok(sums.s[k as usize] / binomial_f64(sums.n, k))
}

/// `⟨Λ, f⟩ = Σ_k s_k·(class average of f)` for symmetric `f`. Exactly the
/// correlation sum, shrunk from `2^n` terms to `n + 1`.
pub fn symmetrized_inner_product(
    sums: &DigitClassSums,
    spec: &BooleanFunctionSpec,
) -> Result<f64> {
    if spec.n() != sums.n {
        return Err(Error::InvalidArgument("class sums and function sizes differ"));
    }
    if !spec.is_symmetric() {
        return Err(Error::InvalidArgument("inner product needs a symmetric function"));
    }
    let mut acc = KahanSum::new();
    for k in 0..=sums.n {
        let avg = class_average(spec, k)?;
        if avg != 0.0 {
            acc.add(sums.s[k as usize] * avg);
        }
    }
    Ok(acc.value())
}

/// Central moment `Σ_k s_k·|n/2 − k|^{2R}`; `R = 0` degenerates to ψ.
pub fn central_moment(sums: &DigitClassSums, r: u32) -> Result<f64> {
    if r > 8 {
        return Err(Error::InvalidArgument("moment order capped at R = 8"));
    }
    let center = sums.n as f64 / 2.0;
    let mut acc = KahanSum::new();
    for k in 0..=sums.n {
        let dev = libm::fabs(center - k as f64);
        acc.add(sums.s[k as usize] * libm::pow(dev, f64::from(2 * r)));
    }
    Ok(acc.value())
}

/// Tail mass beyond `Δ·√n` digits from the center.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TailReport {
    pub delta: f64,
    /// `Σ_{|k − n/2| ≥ Δ√n} s_k`.
    pub mass: f64,
    /// `mass / 2^n`.
    pub normalized: f64,
}

/// Sums the classes at distance `≥ Δ·√n` from `n/2`.
pub fn tail_mass(sums: &DigitClassSums, delta: f64) -> Result<TailReport> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidArgument("tail distance must be nonnegative"));
    }
    let center = sums.n as f64 / 2.0;
    let cut = delta * libm::sqrt(sums.n as f64);
    let mut acc = KahanSum::new();
    for k in 0..=sums.n {
        if libm::fabs(k as f64 - center) >= cut {
            acc.add(sums.s[k as usize]);
        }
    }
    let mass = acc.value();
    Ok(TailReport { delta, mass, normalized: mass / (1u64 << sums.n) as f64 })
}

/// Largest normalized class `max s_k / 2^n` within `Δ_window·√n` of the
/// center.
pub fn max_central_class(sums: &DigitClassSums, delta_window: f64) -> Result<f64> {
    if delta_window.is_nan() || delta_window <= 0.0 {
        return Err(Error::InvalidArgument("window width must be positive"));
    }
    let center = sums.n as f64 / 2.0;
    let cut = delta_window * libm::sqrt(sums.n as f64);
    let mut best = 0.0f64;
    for k in 0..=sums.n {
        if libm::fabs(k as f64 - center) <= cut && sums.s[k as usize] > best {
            best = sums.s[k as usize];
        }
    }
    Ok(best / (1u64 << sums.n) as f64)
}

//! Exponential sums over digit classes, the Fourier transform of the
//! digit-weight measure, and bilinear (type-I / type-II) range sums.
//!
//! Frequency variables live on two grids: a real `λ ∈ [−π, π]` dual to the
//! digit-sum value, and an integer `ξ ∈ [0, 2^n)` dual to `x` itself. The
//! product formulas below turn `2^n`-term transforms into `n`-factor
//! products, which is what makes exhaustive maximization affordable.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use crate::arith::{base_primes, digit_sum, fold_windows, sieve_range, ArithKind};
use crate::digitclass::DigitClassSums;
use crate::kahan::KahanSum;
use crate::{Complex64, Error, Exec, Result};

fn cis(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || libm::fabs(lambda) > PI {
        return Err(Error::InvalidArgument("frequency must satisfy |lambda| <= pi"));
    }
    Ok(())
}

/// `S(λ) = Σ_k s_k e^{iλk}`, evaluated from precomputed class sums.
pub fn exp_sum(sums: &DigitClassSums, lambda: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for k in 0..=sums.n() {
        let s = sums.s_k(k);
        if s != 0.0 {
            let z = cis(lambda * k as f64);
            re.add(s * z.re);
            im.add(s * z.im);
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `S(λ)` accumulated directly from the sieve as `Σ_x Λ(x) e^{iλ·s_2(x)}`,
/// an independent path used to cross-check the class-sum route.
pub fn exp_sum_streaming(n: u32, lambda: f64, exec: &Exec) -> Result<Complex64> {
    check_lambda(lambda)?;
    let (re, im) = fold_windows(
        n,
        ArithKind::VonMangoldt,
        exec,
        (KahanSum::new(), KahanSum::new()),
        |w| {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for (i, &v) in w.values.iter().enumerate() {
                if v != 0.0 {
                    let z = cis(lambda * digit_sum(w.lo + i as u64) as f64);
                    re.add(v * z.re);
                    im.add(v * z.im);
                }
            }
            (re.value(), im.value())
        },
        |acc: &mut (KahanSum, KahanSum), (r, i)| {
            acc.0.add(r);
            acc.1.add(i);
        },
    )?;
    Ok(Complex64::new(re.value(), im.value()))
}

/// `S(λ)` sampled on a frequency grid.
#[derive(Debug, Clone)]
pub struct ExpSumSeries {
    pub n: u32,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn exp_sum_series(sums: &DigitClassSums, grid: &[f64]) -> Result<ExpSumSeries> {
    let mut values = Vec::with_capacity(grid.len());
    for &lambda in grid {
        values.push(exp_sum(sums, lambda)?);
    }
    Ok(ExpSumSeries { n: sums.n(), grid: grid.to_vec(), values })
}

/// The `n + 1` frequencies `2πt/(n+1)`, folded into `(−π, π]`. Sampling
/// `S(λ)` here determines the class sums exactly.
pub fn lambda_grid(n: u32) -> Vec<f64> {
    let count = n as f64 + 1.0;
    (0..=n)
        .map(|t| {
            let lam = 2.0 * PI * t as f64 / count;
            if lam > PI { lam - 2.0 * PI } else { lam }
        })
        .collect()
}

/// Inverts a series sampled on `lambda_grid(n)` back to the class sums:
/// `s_k = Re[(n+1)^{-1} Σ_t S(λ_t) e^{−iλ_t k}]`.
pub fn class_sums_from_grid(series: &ExpSumSeries) -> Result<Vec<f64>> {
    let count = series.n as usize + 1;
    if series.grid.len() != count || series.values.len() != count {
        return Err(Error::InvalidArgument("inversion needs the full n + 1 point grid"));
    }
    let scale = 1.0 / count as f64;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = KahanSum::new();
        for (lam, z) in series.grid.iter().zip(&series.values) {
            acc.add((z * cis(-lam * k as f64)).re);
        }
        out.push(acc.value() * scale);
    }
    Ok(out)
}

fn check_xi_args(n: u32, xi: u64) -> Result<()> {
    if n == 0 || n > crate::arith::STREAM_N_MAX {
        return Err(Error::InvalidArgument("fourier coefficients require 1 <= n <= 34"));
    }
    if xi >> n != 0 {
        return Err(Error::InvalidArgument("frequency xi must lie below 2^n"));
    }
    Ok(())
}

/// Fourier coefficient of the digit-weight measure `2^{-n} e^{iλ·s_2(x)}`:
/// `Û_λ(ξ) = ∏_j (1 + e^{iλ} e^{−2πi·t_j/2^n})/2` with `t_j = ξ·2^j mod 2^n`.
pub fn u_fourier_coefficient(n: u32, lambda: f64, xi: u64) -> Result<Complex64> {
    check_lambda(lambda)?;
    check_xi_args(n, xi)?;
    let mask = (1u64 << n) - 1;
    let scale = 2.0 * PI / (1u64 << n) as f64;
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let t = (xi << j) & mask;
        let f = (Complex64::new(1.0, 0.0) + cis(lambda - scale * t as f64)) * 0.5;
        prod *= f;
    }
    Ok(prod)
}

fn u_factor_magnitude(n: u32, lambda: f64, t: u64) -> f64 {
    libm::fabs(libm::cos(lambda / 2.0 - PI * t as f64 / (1u64 << n) as f64))
}

fn u_magnitude_direct(n: u32, lambda: f64, xi: u64) -> f64 {
    let mask = (1u64 << n) - 1;
    let mut prod = 1.0;
    for j in 0..n {
        prod *= u_factor_magnitude(n, lambda, (xi << j) & mask);
    }
    prod
}

/// Result of maximizing `|Û_λ(ξ)|` over `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UFourierMax {
    pub max: f64,
    pub argmax: u64,
    /// True when every `ξ < 2^n` was inspected.
    pub exhaustive: bool,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Maximizes `|Û_λ(ξ)|` over `ξ ∈ [0, 2^n)`. When `2^n ≤ sample_budget` the
/// scan is exhaustive, via a table of the `2^n` possible factor magnitudes.
/// Otherwise a lattice of about `sample_budget` points is scanned, plus
/// windows around every `ξ ≈ 2^n·a/q` with `q ≤ 64`, where the large values
/// concentrate.
pub fn u_fourier_max(n: u32, lambda: f64, sample_budget: u64, exec: &Exec) -> Result<UFourierMax> {
    check_lambda(lambda)?;
    check_xi_args(n, 0)?;
    let len = 1u64 << n;
    let mask = len - 1;
    let mut best = -1.0f64;
    let mut arg = 0u64;
    if len <= sample_budget {
        exec.check_budget(len * 8)?;
        let factor: Vec<f64> =
            (0..len).map(|t| u_factor_magnitude(n, lambda, t)).collect();
        for xi in 0..len {
            let mut prod = 1.0;
            for j in 0..n {
                prod *= factor[((xi << j) & mask) as usize];
                if prod < best {
                    break;
                }
            }
            if prod > best {
                best = prod;
                arg = xi;
            }
        }
        return Ok(UFourierMax { max: best, argmax: arg, exhaustive: true });
    }
    if sample_budget < 1 << 12 {
        return Err(Error::InvalidArgument("sampled maximization needs a budget of at least 4096"));
    }
    let stride = (len / sample_budget).max(1);
    let mut xi = 0u64;
    while xi < len {
        let v = u_magnitude_direct(n, lambda, xi);
        if v > best {
            best = v;
            arg = xi;
        }
        xi += stride;
    }
    for q in 1..=64u64 {
        for a in 0..q {
            if gcd(a, q) != 1 {
                continue;
            }
            let center = (a as u128 * len as u128 + q as u128 / 2) / q as u128;
            let lo = (center as u64).saturating_sub(8);
            for xi in lo..=(center as u64 + 8).min(len - 1) {
                let v = u_magnitude_direct(n, lambda, xi);
                if v > best {
                    best = v;
                    arg = xi;
                }
            }
        }
    }
    Ok(UFourierMax { max: best, argmax: arg, exhaustive: false })
}

/// Magnitude of the normalized Fourier coefficient of the character `w_S` on
/// `[0, 2^m)`: `∏_{j∉S} |cos(π·t_j/2^m)| · ∏_{j∈S} |sin(π·t_j/2^m)|` with
/// `t_j = r·2^j mod 2^m`.
pub fn walsh_char_fourier_magnitude(m: u32, s_mask: u64, r: u64) -> Result<f64> {
    check_xi_args(m, r)?;
    if s_mask >> m != 0 {
        return Err(Error::InvalidArgument("character mask must fit in m digits"));
    }
    let mask = (1u64 << m) - 1;
    let mut prod = 1.0;
    for j in 0..m {
        let angle = PI * ((r << j) & mask) as f64 / (1u64 << m) as f64;
        prod *= if s_mask >> j & 1 == 1 {
            libm::fabs(libm::sin(angle))
        } else {
            libm::fabs(libm::cos(angle))
        };
    }
    Ok(prod)
}

/// Best rational approximation `a/q` to `r/2^m` with bounded denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RationalApprox {
    pub m: u32,
    pub r: u64,
    pub a: u64,
    pub q: u64,
    /// `r/2^m − a/q`; bounded by `1/(q·(q_max + 1))` in magnitude.
    pub theta: f64,
}

/// Walks the continued-fraction convergents of `r/2^m` and returns the last
/// one with denominator `q ≤ q_max`.
pub fn rational_scan(m: u32, r: u64, q_max: u64) -> Result<RationalApprox> {
    if m == 0 || m > 62 {
        return Err(Error::InvalidArgument("rational scans require 1 <= m <= 62"));
    }
    if r >> m != 0 {
        return Err(Error::InvalidArgument("frequency r must lie below 2^m"));
    }
    if q_max == 0 {
        return Err(Error::InvalidArgument("denominator bound must be positive"));
    }
    let den = 1u64 << m;
    // Convergent recurrence seeded so the first step lands on a_0/1 = 0/1.
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p_cur, mut q_cur) = (0u64, 1u64);
    let mut first = true;
    let (mut num, mut rem) = (r, den);
    while rem != 0 {
        let quot = num / rem;
        let next_rem = num % rem;
        if first {
            first = false;
        } else {
            let p_next = quot * p_cur + p_prev;
            let q_next = quot * q_cur + q_prev;
            if q_next > q_max {
                break;
            }
            p_prev = p_cur;
            q_prev = q_cur;
            p_cur = p_next;
            q_cur = q_next;
        }
        num = rem;
        rem = next_rem;
    }
    let theta_num = r as i128 * q_cur as i128 - p_cur as i128 * den as i128;
    let theta = theta_num as f64 / (q_cur as f64 * den as f64);
    Ok(RationalApprox { m, r, a: p_cur, q: q_cur, theta })
}

/// How the two dyadic ranges are weighted in a bilinear sum.
#[derive(Debug, Clone, PartialEq)]
pub enum BilinearMode {
    /// Absolute values of the inner sums: `Σ_{x1} |Σ_{x2} e^{iλ·s_2(x1·x2)}|`.
    TypeI,
    /// Fully weighted double sum `|Σ Σ a(x1) b(x2) e^{iλ·s_2(x1·x2)}|` with
    /// coefficients bounded by 1, indexed by offset into each range.
    TypeII { a: Vec<f64>, b: Vec<f64> },
}

/// A bilinear sum over `x1 ∈ [2^m1, 2^{m1+1})`, `x2 ∈ [2^m2, 2^{m2+1})`
/// with `m2 = n − m1`, so the pair count is exactly `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSumConfig {
    pub n: u32,
    pub m1: u32,
    pub mode: BilinearMode,
}

impl BilinearSumConfig {
    fn validate(&self) -> Result<()> {
        if self.n > 30 {
            return Err(Error::InvalidArgument("bilinear ranges are capped at n = 30"));
        }
        if self.m1 == 0 || 2 * self.m1 > self.n {
            return Err(Error::InvalidArgument("split must satisfy 1 <= m1 <= n - m1"));
        }
        if let BilinearMode::TypeII { a, b } = &self.mode {
            let m2 = self.n - self.m1;
            if a.len() != 1usize << self.m1 || b.len() != 1usize << m2 {
                return Err(Error::InvalidArgument("coefficient lengths must match the ranges"));
            }
            if a.iter().chain(b).any(|&c| c.is_nan() || libm::fabs(c) > 1.0 + 1e-9) {
                return Err(Error::InvalidArgument("coefficients must be bounded by 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BilinearValue {
    pub raw: f64,
    /// `raw / 2^n`, so the trivial bound is 1.
    pub normalized: f64,
}

/// Evaluates the configured bilinear sum at frequency `λ`. The phase depends
/// on `x1·x2` only through its digit sum, so one table of `e^{iλk}` values
/// indexed by digit sum covers every pair.
pub fn bilinear_sum(config: &BilinearSumConfig, lambda: f64) -> Result<BilinearValue> {
    check_lambda(lambda)?;
    config.validate()?;
    let m1 = config.m1;
    let m2 = config.n - m1;
    let phases: Vec<Complex64> = (0..=64).map(|k| cis(lambda * k as f64)).collect();
    let inner = |x1: u64| {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for x2 in (1u64 << m2)..(1u64 << (m2 + 1)) {
            let z = phases[(x1 * x2).count_ones() as usize];
            re.add(z.re);
            im.add(z.im);
        }
        (re.value(), im.value())
    };
    let raw = match &config.mode {
        BilinearMode::TypeI => {
            let mut outer = KahanSum::new();
            for x1 in (1u64 << m1)..(1u64 << (m1 + 1)) {
                let (re, im) = inner(x1);
                outer.add(libm::hypot(re, im));
            }
            outer.value()
        }
        BilinearMode::TypeII { a, b } => {
            let mut out_re = KahanSum::new();
            let mut out_im = KahanSum::new();
            for (i, x1) in ((1u64 << m1)..(1u64 << (m1 + 1))).enumerate() {
                if a[i] == 0.0 {
                    continue;
                }
                let mut re = KahanSum::new();
                let mut im = KahanSum::new();
                for (j, x2) in ((1u64 << m2)..(1u64 << (m2 + 1))).enumerate() {
                    if b[j] != 0.0 {
                        let z = phases[(x1 * x2).count_ones() as usize];
                        re.add(b[j] * z.re);
                        im.add(b[j] * z.im);
                    }
                }
                out_re.add(a[i] * re.value());
                out_im.add(a[i] * im.value());
            }
            libm::hypot(out_re.value(), out_im.value())
        }
    };
    Ok(BilinearValue { raw, normalized: raw / (1u64 << config.n) as f64 })
}

/// Stock coefficient choices for type-II sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TypeTwoPreset {
    /// `a = b = 1`: reduces to the unweighted double sum.
    Ones,
    /// `a = μ(x1)`, `b = 1`.
    MuOnes,
    /// `a = μ(x1)`, `b = Λ(x2)/((m2+1)·ln 2)`, scaled to stay within 1.
    MuLambda,
}

/// Builds a type-II configuration with the chosen preset coefficients.
pub fn type_two_preset(n: u32, m1: u32, preset: TypeTwoPreset) -> Result<BilinearSumConfig> {
    let probe = BilinearSumConfig { n, m1, mode: BilinearMode::TypeI };
    probe.validate()?;
    let m2 = n - m1;
    let range = |m: u32, kind: ArithKind| {
        let lo = 1u64 << m;
        let hi = 1u64 << (m + 1);
        sieve_range(kind, lo, hi, &base_primes(hi))
    };
    let (a, b) = match preset {
        TypeTwoPreset::Ones => (vec![1.0; 1 << m1], vec![1.0; 1 << m2]),
        TypeTwoPreset::MuOnes => (range(m1, ArithKind::Moebius), vec![1.0; 1 << m2]),
        TypeTwoPreset::MuLambda => {
            let cap = (m2 as f64 + 1.0) * libm::log(2.0);
            let b = range(m2, ArithKind::VonMangoldt).iter().map(|v| v / cap).collect();
            (range(m1, ArithKind::Moebius), b)
        }
    };
    Ok(BilinearSumConfig { n, m1, mode: BilinearMode::TypeII { a, b } })
}

//! Decay-law fitting and the top-level experiment drivers: the majority
//! correlation scan, the prescribed-digit prime scan, and the spectral decay
//! scan. The fits quantify shapes whose constants are not known a priori, so
//! each fit reports its exponent together with a goodness of fit.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{
    base_primes, digit_sum, fold_windows, primes_in_range, window_ranges, ArithKind,
};
use crate::kahan::KahanSum;
use crate::walsh::walsh_coefficients_streaming;
use crate::{Error, Exec, Result};

/// Shape of a fitted decay law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FitModel {
    /// `y = A·x^(−α)`; fitted on `(ln x, ln y)`.
    PowerLaw,
    /// `y = A·e^(−c·x)`; fitted on `(x, ln y)`.
    ExpLaw,
}

/// A least-squares decay fit, with the points it came from so the fit can be
/// reproduced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecayFit {
    pub model: FitModel,
    pub amplitude: f64,
    /// `α` for the power law, `c` for the exponential law; positive means
    /// decay.
    pub exponent: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares on the log-transformed points.
pub fn fit_decay(points: &[(f64, f64)], model: FitModel) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("decay fits need at least 3 points"));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::InvalidArgument("decay fits need y > 0"));
        }
        let tx = match model {
            FitModel::PowerLaw => {
                if !x.is_finite() || x <= 0.0 {
                    return Err(Error::InvalidArgument("power-law fits need x > 0"));
                }
                libm::log(x)
            }
            FitModel::ExpLaw => {
                if !x.is_finite() {
                    return Err(Error::InvalidArgument("decay fits need finite x"));
                }
                x
            }
        };
        xs.push(tx);
        ys.push(libm::log(y));
    }
    let count = xs.len() as f64;
    let mean = |v: &[f64]| {
        let mut acc = KahanSum::new();
        for &t in v {
            acc.add(t);
        }
        acc.value() / count
    };
    let x_bar = mean(&xs);
    let y_bar = mean(&ys);
    let mut sxx = KahanSum::new();
    let mut sxy = KahanSum::new();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx.add((x - x_bar) * (x - x_bar));
        sxy.add((x - x_bar) * (y - y_bar));
    }
    if sxx.value() == 0.0 {
        return Err(Error::InvalidArgument("decay fits need at least two distinct x"));
    }
    let slope = sxy.value() / sxx.value();
    let intercept = y_bar - slope * x_bar;
    let mut ss_res = KahanSum::new();
    let mut ss_tot = KahanSum::new();
    for (&x, &y) in xs.iter().zip(&ys) {
        let r = y - (slope * x + intercept);
        ss_res.add(r * r);
        ss_tot.add((y - y_bar) * (y - y_bar));
    }
    // A flat target is matched exactly by the horizontal fit line.
    let r_squared = if ss_tot.value() <= 0.0 {
        1.0
    } else {
        (1.0 - ss_res.value() / ss_tot.value()).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        model,
        amplitude: libm::exp(intercept),
        exponent: -slope,
        r_squared,
        points: points.to_vec(),
    })
}

fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with mid-ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("rank correlation needs equal lengths"));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("rank correlation needs at least 2 points"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("rank correlation needs finite values"));
    }
    let rx = mid_ranks(xs);
    let ry = mid_ranks(ys);
    let count = rx.len() as f64;
    let mean = (count + 1.0) / 2.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in rx.iter().zip(&ry) {
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
        sxy += (a - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidArgument("rank correlation needs non-constant inputs"));
    }
    Ok(sxy / libm::sqrt(sxx * syy))
}

/// Decreasing-trend check: strictly smaller at the last point than at the
/// first, and a non-positive median of successive differences, so a single
/// local fluctuation does not flip the verdict.
pub fn decreasing_trend(values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let mut diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    diffs.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let median = if diffs.len() % 2 == 1 {
        diffs[diffs.len() / 2]
    } else {
        (diffs[diffs.len() / 2 - 1] + diffs[diffs.len() / 2]) / 2.0
    };
    values[values.len() - 1] < values[0] && median <= 0.0
}

/// One size in the majority correlation scan.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Theorem1Record {
    pub n: u32,
    /// `Σ_x Λ(x)·maj(x)`.
    pub correlation: f64,
    pub psi: f64,
    /// `|correlation/2^n − 1/2|`; the no-correlation story makes this small.
    pub deviation: f64,
    /// `correlation/psi`, the mass fraction on the majority side.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Theorem1Scan {
    pub records: Vec<Theorem1Record>,
    /// Power-law fit of deviation against `n`, when enough sizes are given.
    pub fit: Option<DecayFit>,
}

/// Streams Λ once per size, accumulating the majority-side mass and ψ in the
/// same pass.
pub fn theorem1_scan(n_list: &[u32], exec: &Exec) -> Result<Theorem1Scan> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("scan needs at least one size"));
    }
    if n_list.iter().any(|&n| n % 2 == 0) {
        return Err(Error::InvalidArgument("majority scans need odd n"));
    }
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (corr, psi) = fold_windows(
            n,
            ArithKind::VonMangoldt,
            exec,
            (KahanSum::new(), KahanSum::new()),
            |w| {
                let mut corr = KahanSum::new();
                let mut psi = KahanSum::new();
                for (i, &v) in w.values.iter().enumerate() {
                    if v != 0.0 {
                        psi.add(v);
                        if 2 * digit_sum(w.lo + i as u64) > n {
                            corr.add(v);
                        }
                    }
                }
                (corr.value(), psi.value())
            },
            |acc: &mut (KahanSum, KahanSum), (c, p)| {
                acc.0.add(c);
                acc.1.add(p);
            },
        )?;
        let correlation = corr.value();
        let psi = psi.value();
        let half = correlation / (1u64 << n) as f64 - 0.5;
        records.push(Theorem1Record {
            n,
            correlation,
            psi,
            deviation: libm::fabs(half),
            ratio: correlation / psi,
        });
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.deviation > 0.0)
        .map(|r| (r.n as f64, r.deviation))
        .collect();
    let fit = if points.len() >= 3 {
        Some(fit_decay(&points, FitModel::PowerLaw)?)
    } else {
        None
    };
    Ok(Theorem1Scan { records, fit })
}

/// Digit-sum statistics of the primes below `2^n` whose `r` lowest digits
/// are all 1 (`Ω_1`) or are `0…01` (`Ω_0`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Theorem2Record {
    pub n: u32,
    pub r: u32,
    pub omega1_count: u64,
    /// Members of `Ω_1` with digit sum exceeding `n/2 + r/3`.
    pub omega1_biased: u64,
    pub omega1_fraction: f64,
    pub omega0_count: u64,
    /// Members of `Ω_0` with digit sum below `n/2 − r/3`.
    pub omega0_biased: u64,
    pub omega0_fraction: f64,
    /// All primes below `2^n`.
    pub prime_count: u64,
    /// `prime_count / 2^(r−1)`: the equidistribution benchmark for one odd
    /// residue class mod `2^r`.
    pub expected_per_class: f64,
}

/// Walks the primes below `2^n` in windows and tallies the two prescribed
/// low-digit classes. The digit-sum thresholds are compared in integers
/// (`6·s ≷ 3n ± 2r`), so no rounding is involved.
pub fn theorem2_scan(n: u32, r: u32, exec: &Exec) -> Result<Theorem2Record> {
    exec.validate()?;
    if n == 0 || n > crate::arith::STREAM_N_MAX {
        return Err(Error::InvalidArgument("prime scans require 1 <= n <= 34"));
    }
    if r == 0 || 3 * r > n {
        return Err(Error::InvalidArgument("digit prescriptions require 1 <= r <= n/3"));
    }
    exec.check_budget(exec.segment.min(1u64 << n) * 40)?;
    let modulus = 1u64 << r;
    let ones = modulus - 1;
    let base = base_primes(1u64 << n);
    let mut record = Theorem2Record {
        n,
        r,
        omega1_count: 0,
        omega1_biased: 0,
        omega1_fraction: 0.0,
        omega0_count: 0,
        omega0_biased: 0,
        omega0_fraction: 0.0,
        prime_count: 0,
        expected_per_class: 0.0,
    };
    for (lo, hi) in window_ranges(n, exec.segment) {
        for p in primes_in_range(lo, hi, &base) {
            record.prime_count += 1;
            let low = p & ones;
            if low == ones {
                record.omega1_count += 1;
                if 6 * digit_sum(p) > 3 * n + 2 * r {
                    record.omega1_biased += 1;
                }
            } else if low == 1 {
                record.omega0_count += 1;
                if 6 * digit_sum(p) < 3 * n - 2 * r {
                    record.omega0_biased += 1;
                }
            }
        }
    }
    if record.omega1_count > 0 {
        record.omega1_fraction = record.omega1_biased as f64 / record.omega1_count as f64;
    }
    if record.omega0_count > 0 {
        record.omega0_fraction = record.omega0_biased as f64 / record.omega0_count as f64;
    }
    record.expected_per_class = record.prime_count as f64 / (1u64 << (r - 1)) as f64;
    Ok(record)
}

/// Spectral size of Λ at one `n`: the largest coefficient magnitude over a
/// mask family, plus the empty-mask coefficient for reference.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectralRecord {
    pub n: u32,
    pub max_abs: f64,
    pub argmax_mask: u64,
    /// `Λ̂` at the lowest-digit singleton mask `{0}`; driven by the oddness
    /// of primes rather than by cancellation.
    pub zero_coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectralScan {
    pub records: Vec<SpectralRecord>,
    /// Exponential-law fit of the maxima against `√n`.
    pub fit: Option<DecayFit>,
}

/// The scanned masks: digit sets of size up to `level_max` built from
/// singletons `{j}`, pairs `{0,j}` and `{j,j+1}`, and triples `{0,1,j}` and
/// `{j,j+1,j+2}`, always excluding `{0}` itself.
pub fn spectral_mask_family(n: u32, level_max: u32) -> Result<Vec<u64>> {
    if !(1..=3).contains(&level_max) {
        return Err(Error::InvalidArgument("mask family levels run from 1 to 3"));
    }
    if n < 4 {
        return Err(Error::InvalidArgument("mask families need n >= 4"));
    }
    let mut fam = Vec::new();
    for j in 1..n {
        fam.push(1u64 << j);
    }
    if level_max >= 2 {
        for j in 1..n {
            fam.push(1 | (1u64 << j));
        }
        for j in 1..n - 1 {
            fam.push((1u64 << j) | (1u64 << (j + 1)));
        }
    }
    if level_max >= 3 {
        for j in 2..n {
            fam.push(3 | (1u64 << j));
        }
        for j in 1..n - 2 {
            fam.push(7u64 << j);
        }
    }
    Ok(fam)
}

/// For each size, streams Λ once against the whole mask family (plus `{0}`)
/// and records the family maximum; then fits the maxima against `√n`.
pub fn spectral_decay_scan(n_list: &[u32], level_max: u32, exec: &Exec) -> Result<SpectralScan> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("scan needs at least one size"));
    }
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut masks = spectral_mask_family(n, level_max)?;
        masks.push(1);
        let coeffs =
            walsh_coefficients_streaming(n, ArithKind::VonMangoldt, &masks, exec)?;
        let zero_coeff = coeffs[coeffs.len() - 1];
        let mut max_abs = -1.0f64;
        let mut argmax_mask = 0u64;
        for (&mask, &c) in masks.iter().zip(&coeffs).take(masks.len() - 1) {
            if libm::fabs(c) > max_abs {
                max_abs = libm::fabs(c);
                argmax_mask = mask;
            }
        }
        records.push(SpectralRecord { n, max_abs, argmax_mask, zero_coeff });
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.max_abs > 0.0)
        .map(|r| (libm::sqrt(r.n as f64), r.max_abs))
        .collect();
    let fit = if points.len() >= 3 {
        Some(fit_decay(&points, FitModel::ExpLaw)?)
    } else {
        None
    };
    Ok(SpectralScan { records, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::chebyshev_psi;

    #[test]
    fn power_law_recovers_exact_exponent() {
        let points: Vec<(f64, f64)> =
            (1..=6).map(|i| (i as f64, libm::pow(i as f64, -2.0))).collect();
        let fit = fit_decay(&points, FitModel::PowerLaw).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.amplitude - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_law_recovers_exact_rate() {
        let points: Vec<(f64, f64)> =
            (0..5).map(|i| (i as f64 / 2.0, 4.0 * libm::exp(-3.0 * i as f64 / 2.0))).collect();
        let fit = fit_decay(&points, FitModel::ExpLaw).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-12);
        assert!((fit.amplitude - 4.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_data_fits_perfectly_with_zero_exponent() {
        let points = vec![(1.0, 2.5), (2.0, 2.5), (3.0, 2.5)];
        let fit = fit_decay(&points, FitModel::ExpLaw).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(fit_decay(&[(1.0, 1.0), (2.0, 0.5)], FitModel::PowerLaw).is_err());
        assert!(
            fit_decay(&[(1.0, 1.0), (1.0, 0.5), (1.0, 0.25)], FitModel::ExpLaw).is_err()
        );
        assert!(
            fit_decay(&[(1.0, 1.0), (2.0, -0.5), (3.0, 0.2)], FitModel::ExpLaw).is_err()
        );
        assert!(
            fit_decay(&[(0.0, 1.0), (2.0, 0.5), (3.0, 0.2)], FitModel::PowerLaw).is_err()
        );
    }

    #[test]
    fn fit_is_invariant_under_reordering() {
        let points = vec![(1.0, 0.9), (2.0, 0.5), (3.0, 0.31), (4.0, 0.2)];
        let reversed: Vec<(f64, f64)> = points.iter().rev().copied().collect();
        let a = fit_decay(&points, FitModel::PowerLaw).unwrap();
        let b = fit_decay(&reversed, FitModel::PowerLaw).unwrap();
        assert!((a.exponent - b.exponent).abs() < 1e-12);
        assert!((a.r_squared - b.r_squared).abs() < 1e-12);
    }

    #[test]
    fn spearman_detects_monotone_relations() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((spearman(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_handles_ties_with_mid_ranks() {
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 2.0, 3.0];
        assert!((spearman(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert!(spearman(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn trend_tolerates_one_fluctuation() {
        assert!(decreasing_trend(&[5.0, 4.0, 3.0, 2.0]));
        assert!(decreasing_trend(&[5.0, 4.0, 4.5, 2.0]));
        assert!(!decreasing_trend(&[2.0, 3.0, 4.0, 5.0]));
        assert!(!decreasing_trend(&[5.0, 6.0, 7.0, 4.9]));
        assert!(!decreasing_trend(&[5.0]));
    }

    #[test]
    fn majority_scan_matches_separate_passes() {
        let exec = Exec::default();
        let scan = theorem1_scan(&[13], &exec).unwrap();
        let record = &scan.records[0];
        let psi = chebyshev_psi(13, &exec).unwrap();
        assert!((record.psi - psi).abs() <= 1e-9 * psi);
        let spec = crate::boolfn::BooleanFunctionSpec::majority(13).unwrap();
        let corr =
            crate::boolfn::correlate_streaming(ArithKind::VonMangoldt, &spec, &exec).unwrap();
        assert!((record.correlation - corr).abs() <= 1e-9 * corr);
        let dev = libm::fabs(corr / (1u64 << 13) as f64 - 0.5);
        assert!((record.deviation - dev).abs() < 1e-15);
        assert!(scan.fit.is_none());
    }

    #[test]
    fn majority_scan_rejects_even_sizes() {
        assert!(theorem1_scan(&[12], &Exec::default()).is_err());
        assert!(theorem1_scan(&[], &Exec::default()).is_err());
    }

    #[test]
    fn small_prime_scan_is_hand_checkable() {
        // Primes below 64 that are 3 mod 4: 3, 7, 11, 19, 23, 31, 43, 47, 59.
        // Primes that are 1 mod 4: 5, 13, 17, 29, 37, 41, 53, 61.
        let record = theorem2_scan(6, 2, &Exec::default()).unwrap();
        assert_eq!(record.prime_count, 18);
        assert_eq!(record.omega1_count, 9);
        assert_eq!(record.omega0_count, 8);
        // High side needs 6·s > 22, so digit sum >= 4: 23, 31, 43, 47, 59.
        // Low side needs 6·s < 14, so digit sum <= 2: 5, 17.
        assert_eq!(record.omega1_biased, 5);
        assert_eq!(record.omega0_biased, 2);
        assert!((record.expected_per_class - 9.0).abs() < 1e-15);
    }

    #[test]
    fn prime_scan_rejects_oversized_prescriptions() {
        assert!(theorem2_scan(8, 3, &Exec::default()).is_err());
        assert!(theorem2_scan(9, 3, &Exec::default()).is_ok());
        assert!(theorem2_scan(9, 0, &Exec::default()).is_err());
    }

    #[test]
    fn prime_scan_is_segment_invariant() {
        let coarse = theorem2_scan(14, 4, &Exec::default()).unwrap();
        let fine =
            theorem2_scan(14, 4, &Exec { segment: 1 << 7, ..Exec::default() }).unwrap();
        assert_eq!(coarse, fine);
    }

    #[test]
    fn mask_family_has_expected_size_and_members() {
        let fam = spectral_mask_family(16, 3).unwrap();
        assert_eq!(fam.len(), 71);
        assert!(!fam.contains(&1));
        assert!(fam.contains(&(1 << 5)));
        assert!(fam.contains(&(1 | 1 << 9)));
        assert!(fam.contains(&(7 << 4)));
        let mut dedup = fam.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), fam.len());
        assert!(fam.iter().all(|&m| m >> 16 == 0 && (1..=3).contains(&m.count_ones())));
        assert_eq!(spectral_mask_family(16, 1).unwrap().len(), 15);
        assert!(spectral_mask_family(16, 4).is_err());
    }

    #[test]
    fn spectral_scan_reports_family_maximum() {
        let exec = Exec::default();
        let scan = spectral_decay_scan(&[12], 2, &exec).unwrap();
        let record = &scan.records[0];
        let masks = spectral_mask_family(12, 2).unwrap();
        let coeffs =
            walsh_coefficients_streaming(12, ArithKind::VonMangoldt, &masks, &exec).unwrap();
        let best = coeffs.iter().fold(0.0f64, |m, &c| m.max(libm::fabs(c)));
        assert!((record.max_abs - best).abs() < 1e-15);
        assert!(masks.contains(&record.argmax_mask));
        let lone =
            walsh_coefficients_streaming(12, ArithKind::VonMangoldt, &[1], &exec).unwrap();
        assert!((record.zero_coeff - lone[0]).abs() < 1e-15);
        assert!(record.zero_coeff < 0.0);
    }
}

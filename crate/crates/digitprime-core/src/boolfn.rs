//! Symbolic Boolean functions on `{0,1}^n` and their interaction with
//! arithmetic tables: pointwise evaluation, per-digit-class averages,
//! correlation sums, and the spectral noise operator.
//!
//! Codomain convention: majority, threshold and dictator evaluate to
//! `{0, 1}`; parity and Walsh characters evaluate to `{−1, +1}`. Keeping the
//! codomain part of the variant avoids silent factor-of-two mistakes when
//! correlating against Λ.

use alloc::vec::Vec;

use crate::arith::{digit_sum, fold_windows, ArithKind, ArithTable};
use crate::kahan::KahanSum;
use crate::walsh::SpectrumVector;
use crate::{Error, Exec, Result};

/// A Boolean function given symbolically; `n` is the digit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "variant", rename_all = "kebab-case"))]
pub enum BooleanFunctionSpec {
    /// 1 iff more than half the digits are 1; `n` must be odd.
    Majority { n: u32 },
    /// `(−1)^{digit sum}`.
    Parity { n: u32 },
    /// The `j`-th digit itself.
    Dictator { n: u32, j: u32 },
    /// 1 iff the digit sum is at least `t`.
    Threshold { n: u32, t: u32 },
    /// `w_S(x) = (−1)^{popcount(x & S)}`.
    WalshCharacter { n: u32, s_mask: u64 },
}

use BooleanFunctionSpec::*;

impl BooleanFunctionSpec {
    pub fn majority(n: u32) -> Result<Self> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::InvalidArgument("majority requires odd n (no ties)"));
        }
        Ok(Majority { n })
    }

    pub fn parity(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("parity requires n >= 1"));
        }
        Ok(Parity { n })
    }

    pub fn dictator(n: u32, j: u32) -> Result<Self> {
        if j >= n {
            return Err(Error::InvalidArgument("dictator digit index must be below n"));
        }
        Ok(Dictator { n, j })
    }

    pub fn threshold(n: u32, t: u32) -> Result<Self> {
        if t > n {
            return Err(Error::InvalidArgument("threshold level must satisfy t <= n"));
        }
        Ok(Threshold { n, t })
    }

    pub fn walsh_character(n: u32, s_mask: u64) -> Result<Self> {
        if n == 0 || n > 63 || s_mask >> n != 0 {
            return Err(Error::InvalidArgument("character mask has bits outside [0, n)"));
        }
        Ok(WalshCharacter { n, s_mask })
    }

    pub fn n(&self) -> u32 {
        match *self {
            Majority { n } | Parity { n } | Dictator { n, .. } | Threshold { n, .. }
            | WalshCharacter { n, .. } => n,
        }
    }

    /// True when the value depends on `x` only through its digit sum.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, Majority { .. } | Parity { .. } | Threshold { .. })
    }
}

/// Pointwise evaluation; `x` must be below `2^n`. Returns 0/1 for majority,
/// threshold and dictator, ±1 for parity and Walsh characters.
pub fn evaluate(spec: &BooleanFunctionSpec, x: u64) -> i8 {
    match *spec {
        Majority { n } => (digit_sum(x) * 2 > n) as i8,
        Threshold { t, .. } => (digit_sum(x) >= t) as i8,
        Dictator { j, .. } => ((x >> j) & 1) as i8,
        Parity { .. } => 1 - 2 * ((digit_sum(x) & 1) as i8),
        WalshCharacter { s_mask, .. } => 1 - 2 * ((digit_sum(x & s_mask) & 1) as i8),
    }
}

/// Average of a symmetric function over the digit class `Ω_k`; constant on
/// the class, so no enumeration is needed.
pub fn class_average(spec: &BooleanFunctionSpec, k: u32) -> Result<f64> {
    if k > spec.n() {
        return Err(Error::InvalidArgument("class index k must not exceed n"));
    }
    match *spec {
        Majority { n } => Ok(if k * 2 > n { 1.0 } else { 0.0 }),
        Threshold { t, .. } => Ok(if k >= t { 1.0 } else { 0.0 }),
        Parity { .. } => Ok(if k.is_multiple_of(2) { 1.0 } else { -1.0 }),
        Dictator { .. } | WalshCharacter { .. } => {
            Err(Error::InvalidArgument("class averages need a symmetric function"))
        }
    }
}

/// `Σ_{1 ≤ x < 2^n} table(x)·f(x)` over a dense table.
pub fn correlate(table: &ArithTable, spec: &BooleanFunctionSpec) -> Result<f64> {
    if table.n() != spec.n() {
        return Err(Error::InvalidArgument("table and function sizes differ"));
    }
    let mut acc = KahanSum::new();
    for (x, &v) in table.values().iter().enumerate() {
        if v != 0.0 {
            acc.add(v * f64::from(evaluate(spec, x as u64)));
        }
    }
    Ok(acc.value())
}

/// Streaming variant of [`correlate`]: the same sum via sieve windows,
/// without a dense table.
pub fn correlate_streaming(
    kind: ArithKind,
    spec: &BooleanFunctionSpec,
    exec: &Exec,
) -> Result<f64> {
    let total = fold_windows(
        spec.n(),
        kind,
        exec,
        KahanSum::new(),
        |w| {
            let mut part = KahanSum::new();
            for (i, &v) in w.values.iter().enumerate() {
                if v != 0.0 {
                    part.add(v * f64::from(evaluate(spec, w.lo + i as u64)));
                }
            }
            part.value()
        },
        |acc: &mut KahanSum, part| acc.add(part),
    )?;
    Ok(total.value())
}

/// Spectral noise operator: scales every level-`k` coefficient by `ρ^k`.
/// A contraction for `ρ ∈ [0, 1]`; implemented level-wise, never by
/// convolution.
pub fn apply_noise(spectrum: &SpectrumVector, rho: f64) -> Result<SpectrumVector> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument("noise parameter must lie in [0, 1]"));
    }
    let n = spectrum.n();
    let mut powers = Vec::with_capacity(n as usize + 1);
    let mut p = 1.0;
    for _ in 0..=n {
        powers.push(p);
        p *= rho;
    }
    let coeffs = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(s, &c)| c * powers[(s as u64).count_ones() as usize])
        .collect();
    SpectrumVector::from_raw(n, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_table;
    use crate::walsh::fwht;

    #[test]
    fn evaluation_examples() {
        let maj = BooleanFunctionSpec::majority(3).unwrap();
        assert_eq!(evaluate(&maj, 0b110), 1);
        assert_eq!(evaluate(&maj, 0b100), 0);
        let par = BooleanFunctionSpec::parity(3).unwrap();
        assert_eq!(evaluate(&par, 0b101), 1);
        assert_eq!(evaluate(&par, 0b100), -1);
        let dict = BooleanFunctionSpec::dictator(3, 0).unwrap();
        assert_eq!(evaluate(&dict, 5), 1);
        assert_eq!(evaluate(&dict, 4), 0);
        let thr = BooleanFunctionSpec::threshold(5, 2).unwrap();
        assert_eq!(evaluate(&thr, 0b11000), 1);
        assert_eq!(evaluate(&thr, 0b10000), 0);
        let chi = BooleanFunctionSpec::walsh_character(4, 0b0011).unwrap();
        assert_eq!(evaluate(&chi, 0b0001), -1);
        assert_eq!(evaluate(&chi, 0b0011), 1);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(BooleanFunctionSpec::majority(4).is_err());
        assert!(BooleanFunctionSpec::dictator(3, 3).is_err());
        assert!(BooleanFunctionSpec::threshold(3, 4).is_err());
        assert!(BooleanFunctionSpec::walsh_character(3, 0b1000).is_err());
    }

    #[test]
    fn class_average_examples() {
        let maj = BooleanFunctionSpec::majority(11).unwrap();
        assert_eq!(class_average(&maj, 6).unwrap(), 1.0);
        assert_eq!(class_average(&maj, 5).unwrap(), 0.0);
        let par = BooleanFunctionSpec::parity(11).unwrap();
        assert_eq!(class_average(&par, 7).unwrap(), -1.0);
        let dict = BooleanFunctionSpec::dictator(11, 2).unwrap();
        assert!(class_average(&dict, 3).is_err());
    }

    #[test]
    fn class_average_agrees_with_enumeration() {
        let n = 9;
        for spec in [
            BooleanFunctionSpec::majority(n).unwrap(),
            BooleanFunctionSpec::parity(n).unwrap(),
            BooleanFunctionSpec::threshold(n, 4).unwrap(),
        ] {
            for k in 0..=n {
                let mut sum = 0.0;
                let mut count = 0.0;
                for x in 0..(1u64 << n) {
                    if digit_sum(x) == k {
                        sum += f64::from(evaluate(&spec, x));
                        count += 1.0;
                    }
                }
                assert!(
                    (class_average(&spec, k).unwrap() - sum / count).abs() < 1e-12,
                    "{spec:?} k={k}"
                );
            }
        }
    }

    #[test]
    fn correlate_zero_table_is_zero() {
        // μ over [1, 2) only: the table at n=1 has values [0, 1], so use the
        // empty-support von Mangoldt table at n=1 instead.
        let t = sieve_table(1, ArithKind::VonMangoldt, &Exec::default()).unwrap();
        let spec = BooleanFunctionSpec::parity(1).unwrap();
        assert_eq!(correlate(&t, &spec).unwrap(), 0.0);
    }

    #[test]
    fn correlate_streaming_matches_dense() {
        let n = 13;
        let table = sieve_table(n, ArithKind::VonMangoldt, &Exec::default()).unwrap();
        for spec in [
            BooleanFunctionSpec::majority(n).unwrap(),
            BooleanFunctionSpec::parity(n).unwrap(),
            BooleanFunctionSpec::dictator(n, 4).unwrap(),
            BooleanFunctionSpec::walsh_character(n, 0b101).unwrap(),
        ] {
            let dense = correlate(&table, &spec).unwrap();
            let streamed = correlate_streaming(
                ArithKind::VonMangoldt,
                &spec,
                &Exec { segment: 1 << 8, ..Exec::default() },
            )
            .unwrap();
            assert!(
                (dense - streamed).abs() <= 1e-9 * dense.abs().max(1.0),
                "{spec:?}: {dense} vs {streamed}"
            );
        }
    }

    #[test]
    fn character_correlation_recovers_walsh_coefficient() {
        let n = 14;
        let s_mask = 0b1001;
        let spec = BooleanFunctionSpec::walsh_character(n, s_mask).unwrap();
        let corr = correlate_streaming(ArithKind::VonMangoldt, &spec, &Exec::default()).unwrap();
        let coeff = crate::walsh::walsh_coefficient_streaming(
            n,
            ArithKind::VonMangoldt,
            s_mask,
            &Exec::default(),
        )
        .unwrap();
        let scaled = coeff * (1u64 << n) as f64;
        assert!((corr - scaled).abs() <= 1e-6 * scaled.abs().max(1.0));
    }

    #[test]
    fn symmetric_evaluation_is_permutation_invariant() {
        // Swapping digit positions never changes a symmetric function.
        let n = 10;
        let swap_bits = |x: u64, a: u32, b: u32| {
            let ba = (x >> a) & 1;
            let bb = (x >> b) & 1;
            x & !((1 << a) | (1 << b)) | (ba << b) | (bb << a)
        };
        for spec in [
            BooleanFunctionSpec::majority(n + 1).unwrap(),
            BooleanFunctionSpec::parity(n).unwrap(),
            BooleanFunctionSpec::threshold(n, 3).unwrap(),
        ] {
            let bits = spec.n();
            for x in 0..(1u64 << bits) {
                let y = swap_bits(x, 1, bits - 2);
                assert_eq!(evaluate(&spec, x), evaluate(&spec, y));
            }
        }
    }

    #[test]
    fn character_permutation_moves_the_mask() {
        // w_S(π(x)) = w_{π(S)}(x) for digit transpositions.
        let n = 8;
        let swap_bits = |x: u64, a: u32, b: u32| {
            let ba = (x >> a) & 1;
            let bb = (x >> b) & 1;
            x & !((1 << a) | (1 << b)) | (ba << b) | (bb << a)
        };
        let s_mask = 0b1011;
        let permuted_mask = swap_bits(s_mask, 0, 6);
        let chi = BooleanFunctionSpec::walsh_character(n, s_mask).unwrap();
        let chi_p = BooleanFunctionSpec::walsh_character(n, permuted_mask).unwrap();
        for x in 0..(1u64 << n) {
            assert_eq!(evaluate(&chi, swap_bits(x, 0, 6)), evaluate(&chi_p, x));
        }
    }

    #[test]
    fn noise_identity_and_collapse() {
        let values: Vec<f64> = (0..256u64).map(|x| libm::cos(x as f64 * 0.31)).collect();
        let spec = fwht(values).unwrap();
        let same = apply_noise(&spec, 1.0).unwrap();
        for s in 0..256 {
            assert_eq!(same.coeff(s), spec.coeff(s));
        }
        let collapsed = apply_noise(&spec, 0.0).unwrap();
        assert_eq!(collapsed.coeff(0), spec.coeff(0));
        for s in 1..256 {
            assert_eq!(collapsed.coeff(s), 0.0);
        }
    }

    #[test]
    fn noise_is_an_l2_contraction() {
        let values: Vec<f64> = (0..1024u64).map(|x| libm::sin(x as f64 * 1.7)).collect();
        let spec = fwht(values).unwrap();
        let before = spec.parseval_total();
        let after = apply_noise(&spec, 0.5).unwrap().parseval_total();
        assert!(after <= before + 1e-15);
    }

    #[test]
    fn noise_composes_multiplicatively() {
        let values: Vec<f64> = (0..512u64).map(|x| libm::sin(x as f64 * 0.77) + 0.2).collect();
        let spec = fwht(values).unwrap();
        let twice = apply_noise(&apply_noise(&spec, 0.8).unwrap(), 0.5).unwrap();
        let once = apply_noise(&spec, 0.4).unwrap();
        for s in 0..512 {
            assert!((twice.coeff(s) - once.coeff(s)).abs() <= 1e-12);
        }
    }

    #[test]
    fn noise_rejects_out_of_range_rho() {
        let spec = fwht(vec![1.0; 4]).unwrap();
        assert!(apply_noise(&spec, 1.5).is_err());
        assert!(apply_noise(&spec, -0.1).is_err());
    }
}

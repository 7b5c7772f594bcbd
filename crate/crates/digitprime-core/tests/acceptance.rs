//! The acceptance gate: ten numbered checks, each pinning one headline
//! behavior of the library at desk scale. Every quantitative band was fixed
//! in advance from an independent reference implementation; integer counts
//! are asserted exactly.

use digitprime_core::arith::{chebyshev_psi, sieve_table, ArithKind};
use digitprime_core::boolfn::{correlate_streaming, BooleanFunctionSpec};
use digitprime_core::digitclass::{digit_class_sums, max_central_class, tail_mass};
use digitprime_core::expsum::{
    bilinear_sum, u_fourier_coefficient, u_fourier_max, walsh_char_fourier_magnitude,
    BilinearMode, BilinearSumConfig,
};
use digitprime_core::fitlab::{
    fit_decay, spearman, spectral_decay_scan, theorem1_scan, theorem2_scan, FitModel,
};
use digitprime_core::walsh::{
    fwht, krawtchouk_class_sum, majority_level_coefficient, majority_spectrum_profile,
    synthesize, walsh_coefficients_streaming,
};
use digitprime_core::{Complex64, Exec};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

const ODD_SIZES: [u32; 6] = [15, 17, 19, 21, 23, 25];

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-12)
}

#[test]
fn acceptance_01_exact_identities() {
    let exec = Exec::default();
    let n = 21u32;
    let sums = digit_class_sums(n, &exec).unwrap();
    let psi = chebyshev_psi(n, &exec).unwrap();
    assert!(
        (sums.psi() - psi).abs() <= 1e-9 * psi,
        "class partition: {} vs {psi}",
        sums.psi()
    );

    let majority = BooleanFunctionSpec::majority(n).unwrap();
    let via_classes =
        digitprime_core::digitclass::symmetrized_inner_product(&sums, &majority).unwrap();
    let direct = correlate_streaming(ArithKind::VonMangoldt, &majority, &exec).unwrap();
    assert!(
        (via_classes - direct).abs() <= 1e-9 * direct,
        "symmetrization: {via_classes} vs {direct}"
    );

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let values: Vec<f64> = (0..1usize << 16).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean_square: f64 = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    let spectrum = fwht(values.clone()).unwrap();
    assert!(
        (spectrum.parseval_total() - mean_square).abs() <= 1e-9 * mean_square,
        "transform norm identity"
    );
    let back = synthesize(&spectrum);
    let worst = values
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-9, "transform round trip, worst gap {worst}");

    println!(
        "ACCEPTANCE 01 exact-identities: PASS — partition and symmetrization at n = {n} \
         within 1e-9, transform identities at n = 16 within 1e-9"
    );
}

#[test]
fn acceptance_02_fast_slow_equivalences() {
    // Class sums of the character values, against direct cube enumeration.
    for n in 1..=13u32 {
        for k in 0..=n {
            let mask = (1u64 << k) - 1;
            let mut brute = vec![0i128; n as usize + 1];
            for x in 0..1u64 << n {
                let sign = if (x & mask).count_ones().is_multiple_of(2) { 1 } else { -1 };
                brute[x.count_ones() as usize] += sign;
            }
            for j in 0..=n {
                assert_eq!(
                    krawtchouk_class_sum(n, k, j).unwrap(),
                    brute[j as usize],
                    "class sum n = {n}, k = {k}, j = {j}"
                );
            }
        }
    }

    // Closed-form majority coefficients against the dense transform.
    for n in (3..=13u32).step_by(2) {
        let table: Vec<f64> = (0..1usize << n)
            .map(|x| if 2 * (x as u64).count_ones() > n { 1.0 } else { 0.0 })
            .collect();
        let spectrum = fwht(table).unwrap();
        for k in 0..=n {
            let closed = majority_level_coefficient(n, k).unwrap();
            let dense = spectrum.coeff((1u64 << k) - 1);
            assert!((closed - dense).abs() <= 1e-9, "majority n = {n}, k = {k}");
        }
    }

    // Product-formula Fourier coefficients against naive transforms.
    let n = 12u32;
    let len = 1u64 << n;
    for lambda in [0.7, 2.0] {
        let phase: Vec<Complex64> = (0..=n)
            .map(|k| Complex64::new((lambda * k as f64).cos(), (lambda * k as f64).sin()))
            .collect();
        for xi in 0..len {
            let mut sum = Complex64::new(0.0, 0.0);
            for x in 0..len {
                let t = -2.0 * PI * (xi as f64) * (x as f64) / len as f64;
                sum += phase[x.count_ones() as usize] * Complex64::new(t.cos(), t.sin());
            }
            let fast = u_fourier_coefficient(n, lambda, xi).unwrap();
            assert!(
                (fast - sum / len as f64).norm() <= 1e-9,
                "digit measure, lambda = {lambda}, xi = {xi}"
            );
        }
    }
    for mask in [0b1u64, 0b100_0101, 0b1111_1111_1111] {
        for r in 0..len {
            let mut sum = Complex64::new(0.0, 0.0);
            for x in 0..len {
                let t = -2.0 * PI * (r as f64) * (x as f64) / len as f64;
                let sign = if (x & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                sum += Complex64::new(t.cos(), t.sin()) * sign;
            }
            let fast = walsh_char_fourier_magnitude(n, mask, r).unwrap();
            assert!(
                (fast - sum.norm() / len as f64).abs() <= 1e-9,
                "character, mask = {mask:#b}, r = {r}"
            );
        }
    }

    // Streamed coefficients against the dense transform of the full table.
    let n = 14u32;
    let exec = Exec { segment: 1 << 10, ..Exec::default() };
    let spectrum =
        fwht(sieve_table(n, ArithKind::VonMangoldt, &exec).unwrap().values().to_vec())
            .unwrap();
    let mut masks: Vec<u64> = vec![0];
    for a in 0..n as u64 {
        masks.push(1 << a);
        for b in 0..a {
            masks.push(1 << a | 1 << b);
        }
    }
    let streamed =
        walsh_coefficients_streaming(n, ArithKind::VonMangoldt, &masks, &exec).unwrap();
    for (&mask, &value) in masks.iter().zip(&streamed) {
        assert!(
            (value - spectrum.coeff(mask)).abs() <= 1e-9,
            "streamed coefficient, mask = {mask:#b}"
        );
    }

    println!(
        "ACCEPTANCE 02 fast-slow-equivalences: PASS — class sums (n <= 13 exact), majority \
         levels (odd n <= 13), both Fourier product formulas (size 12), streamed \
         coefficients (n = 14), all within 1e-9"
    );
}

#[test]
fn acceptance_03_majority_correlation_scan() {
    let scan = theorem1_scan(&ODD_SIZES, &Exec::default()).unwrap();
    let mut shown = String::new();
    for record in &scan.records {
        assert!(
            record.deviation <= 0.10,
            "n = {}: |corr/2^n - 1/2| = {} exceeds 0.10",
            record.n,
            record.deviation
        );
        shown.push_str(&format!(" D({}) = {:.6}", record.n, record.deviation));
    }
    let first = scan.records.first().unwrap();
    let last = scan.records.last().unwrap();
    assert!(
        last.deviation < first.deviation,
        "deviation must shrink from n = 15 to n = 25"
    );
    let fit = scan.fit.as_ref().expect("six points fit a power law");
    assert!(fit.exponent > 0.0, "fitted decay exponent {}", fit.exponent);

    assert!((first.deviation - 0.09996063014401169).abs() <= 1e-6, "frozen D(15)");
    assert!((last.deviation - 0.081867).abs() <= 1e-5, "frozen D(25)");
    assert!((first.psi - 32736.226337817727).abs() <= 1e-6 * first.psi, "frozen psi(2^15)");
    assert!(
        (first.correlation - 19659.509928558975).abs() <= 1e-6 * first.correlation,
        "frozen correlation at n = 15"
    );

    println!(
        "ACCEPTANCE 03 majority-correlation: PASS —{shown}; all <= 0.10, D(25) < D(15), \
         power-law exponent {:.4} > 0",
        fit.exponent
    );
}

#[test]
fn acceptance_04_spectral_decay() {
    let scan = spectral_decay_scan(&[16, 20, 24], 3, &Exec::default()).unwrap();
    let m: Vec<f64> = scan.records.iter().map(|r| r.max_abs).collect();
    assert!(m[0] > m[1] && m[1] > m[2], "maxima must decrease strictly: {m:?}");
    let fit = scan.fit.as_ref().expect("three points fit an exponential law");
    assert!(fit.exponent > 0.0, "fitted rate {}", fit.exponent);
    assert!(fit.r_squared >= 0.8, "fit quality {}", fit.r_squared);
    let zero = scan.records[1].zero_coeff;
    assert!(
        (-1.05..=-0.9).contains(&zero),
        "lowest-digit coefficient at n = 20: {zero}"
    );

    assert!(rel_close(m[0], 1.355622e-2, 2e-3), "frozen max at n = 16: {}", m[0]);
    assert!(rel_close(m[1], 6.504468e-3, 2e-3), "frozen max at n = 20: {}", m[1]);
    assert!(rel_close(m[2], 1.346540e-3, 2e-3), "frozen max at n = 24: {}", m[2]);
    assert!(rel_close(fit.exponent, 2.5509, 5e-3), "frozen rate: {}", fit.exponent);
    assert!((fit.r_squared - 0.9452).abs() <= 5e-3, "frozen fit quality");
    assert!((zero - -0.999835385).abs() <= 1e-4, "frozen lowest-digit coefficient");

    println!(
        "ACCEPTANCE 04 spectral-decay: PASS — maxima {:.4e} > {:.4e} > {:.4e}, rate \
         {:.3} > 0 with r^2 {:.3} >= 0.8, lowest-digit coefficient {:.4} in [-1.05, -0.9]",
        m[0], m[1], m[2], fit.exponent, fit.r_squared, zero
    );
}

#[test]
fn acceptance_05_majority_spectrum_power_law() {
    let n = 25u32;
    let profile = majority_spectrum_profile(n, n).unwrap();
    let frozen = [0.1467, 0.1488, 0.1545, 0.1623, 0.1722, 0.1848, 0.2011];
    for (i, k) in (3..=15u32).step_by(2).enumerate() {
        let scaled = profile.w[k as usize] * (k as f64).powf(1.5);
        assert!(
            (0.1..=10.0).contains(&scaled),
            "k = {k}: scaled weight {scaled} outside [0.1, 10]"
        );
        assert!(rel_close(scaled, frozen[i], 2e-3), "frozen scaled weight at k = {k}");
    }
    for k in (2..=n as usize).step_by(2) {
        assert_eq!(profile.w[k], 0.0, "even level {k} must vanish exactly");
    }
    println!(
        "ACCEPTANCE 05 majority-spectrum: PASS — W_k*k^1.5 in [0.1, 10] for odd k in \
         [3, 15] at n = 25 (range {:.4}..{:.4}), even levels exactly zero",
        frozen[0], frozen[6]
    );
}

#[test]
fn acceptance_06_digit_class_tails() {
    let n = 24u32;
    let sums = digit_class_sums(n, &Exec::default()).unwrap();
    let frozen = [6.470588e-2, 1.503978e-3, 1.422358e-5];
    let mut points = Vec::new();
    for (i, delta) in [1.0, 1.5, 2.0].into_iter().enumerate() {
        let report = tail_mass(&sums, delta).unwrap();
        assert!(rel_close(report.normalized, frozen[i], 2e-3), "frozen tail at {delta}");
        points.push((delta * delta, report.normalized));
    }
    // The widest cut clears every class, so its mass cannot enter a log fit.
    let empty = tail_mass(&sums, 2.5).unwrap();
    assert_eq!(empty.mass, 0.0);
    let fit = fit_decay(&points, FitModel::ExpLaw).unwrap();
    assert!(fit.exponent > 0.0, "tail slope must be negative, rate {}", fit.exponent);
    assert!(fit.r_squared >= 0.9, "fit quality {}", fit.r_squared);
    assert!((fit.exponent - 2.80).abs() <= 0.02, "frozen rate {}", fit.exponent);
    assert!((fit.r_squared - 0.9992).abs() <= 2e-3, "frozen fit quality");
    println!(
        "ACCEPTANCE 06 digit-class-tails: PASS — log(tail/N) vs width^2 at n = 24 has \
         negative slope (rate {:.3}) with r^2 {:.4} >= 0.9; width 2.5 tail exactly empty",
        fit.exponent, fit.r_squared
    );
}

#[test]
fn acceptance_07_central_class_band() {
    let frozen = [0.8305, 0.8312, 0.7660, 0.8358, 0.7915, 0.8228];
    let mut shown = String::new();
    for (i, &n) in ODD_SIZES.iter().enumerate() {
        let sums = digit_class_sums(n, &Exec::default()).unwrap();
        let peak = max_central_class(&sums, n as f64).unwrap();
        let scaled = peak * (n as f64).sqrt();
        assert!(
            (0.3..=1.5).contains(&scaled),
            "n = {n}: peak class times sqrt(n) = {scaled} outside [0.3, 1.5]"
        );
        assert!((scaled - frozen[i]).abs() <= 2e-4, "frozen peak at n = {n}: {scaled}");
        shown.push_str(&format!(" {scaled:.4}"));
    }
    println!(
        "ACCEPTANCE 07 central-class-band: PASS — max_k s_k/N * sqrt(n) ={shown} for odd \
         n in [15, 25], all inside [0.3, 1.5]"
    );
}

#[test]
fn acceptance_08_digit_measure_fourier_decay() {
    let n = 20u32;
    let exec = Exec::default();
    let lambdas = [0.2, 0.5, 1.0, 2.0, PI];
    let frozen_max = [0.9046862, 0.5317292, 0.07341076, 0.03545817, 0.05501701];
    let frozen_arg = [0u64, 0, 0, 299593, 699051];
    let mut logs = Vec::new();
    let mut squares = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let found = u_fourier_max(n, lambda, 1 << n, &exec).unwrap();
        assert!(found.exhaustive, "scan must cover every frequency");
        assert!(rel_close(found.max, frozen_max[i], 1e-4), "frozen max at {lambda}");
        assert_eq!(found.argmax, frozen_arg[i], "frozen argmax at {lambda}");
        logs.push(found.max.ln());
        squares.push(lambda * lambda);
    }
    let rho = spearman(&squares, &logs).unwrap();
    assert!(rho < 0.0, "rank correlation {rho} must be strictly negative");
    assert!((rho - -0.9).abs() <= 1e-9, "frozen rank correlation {rho}");
    println!(
        "ACCEPTANCE 08 fourier-decay: PASS — max |U-hat| over xi at n = 20 trends down in \
         lambda^2 (Spearman {rho:.2} < 0)"
    );
}

#[test]
fn acceptance_09_prescribed_digit_bias() {
    let record = theorem2_scan(24, 6, &Exec::default()).unwrap();
    assert_eq!(record.prime_count, 1_077_871);
    assert_eq!(record.omega1_count, 33_671);
    assert_eq!(record.omega0_count, 33_614);
    let expected = record.expected_per_class;
    assert!((expected - 1_077_871.0 / 32.0).abs() < 1e-9);
    for count in [record.omega1_count, record.omega0_count] {
        let c = count as f64;
        assert!(
            c >= expected / 3.0 && c <= expected * 3.0,
            "class size {c} not within factor 3 of {expected}"
        );
    }
    assert!(
        record.omega1_fraction >= 1.0 / 3.0,
        "high-side fraction {}",
        record.omega1_fraction
    );
    assert!(
        record.omega0_fraction >= 1.0 / 3.0,
        "low-side fraction {}",
        record.omega0_fraction
    );
    assert!((record.omega1_fraction - 0.5853).abs() <= 2e-4, "frozen high-side fraction");
    assert!((record.omega0_fraction - 0.4227).abs() <= 2e-4, "frozen low-side fraction");
    println!(
        "ACCEPTANCE 09 prescribed-digits: PASS — at n = 24, r = 6 both classes within \
         factor 3 of {:.1}; biased fractions {:.4} and {:.4}, both >= 1/3",
        expected, record.omega1_fraction, record.omega0_fraction
    );
}

#[test]
fn acceptance_10_bilinear_cancellation() {
    let config = BilinearSumConfig { n: 20, m1: 6, mode: BilinearMode::TypeI };
    let low = bilinear_sum(&config, 0.2).unwrap().normalized;
    let high = bilinear_sum(&config, PI).unwrap().normalized;
    assert!(high < 0.2, "normalized sum at pi: {high}");
    assert!(high < 0.5 * low, "no cancellation gain: {high} vs {low}");
    assert!(rel_close(low, 0.910261, 1e-4), "frozen value at 0.2: {low}");
    assert!(rel_close(high, 0.033560, 1e-3), "frozen value at pi: {high}");
    println!(
        "ACCEPTANCE 10 bilinear-cancellation: PASS — normalized sum {high:.4} at pi is \
         below 0.2 and below half the {low:.4} seen at 0.2"
    );
}

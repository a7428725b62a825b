mod common;

use common::{c, eigenvalues, expm, sum_dense};
use dqc::circuit::{parse_hamiltonian, GateNetwork, PauliSum};
use dqc::dense::C64;
use dqc::measure::{EstimationBudget, NoisyMeter};
use dqc::spectroscopy::{
    nyquist_dt, sample_f, sample_f_grid, sample_f_unitary, spectrum_fft, TimeSample, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h(src: &str) -> PauliSum {
    parse_hamiltonian(src).unwrap()
}

fn exact() -> NoisyMeter {
    NoisyMeter::gaussian(0.0, 0).unwrap()
}

fn budget() -> EstimationBudget {
    EstimationBudget::new(0.05, 0.05).unwrap()
}

/// `tr(exp(-i H t)) / 2^{n+1}` from the dense Hamiltonian.
fn f_oracle(ham: &PauliSum, t: f64) -> C64 {
    let u = expm(&sum_dense(ham), t);
    u.trace() / c(2.0 * u.nrows() as f64, 0.0)
}

#[test]
fn sample_examples() {
    let mut m = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let coef: f64 = rng.random_range(-1.0..1.0);
        let ham = h(&format!("{coef} XY\n0.5 ZZ\n-0.3 IX"));
        let s = sample_f(&ham, 0.0, 3, &mut m, &budget()).unwrap();
        assert!((s.value - c(0.5, 0.0)).norm() < 1e-12);
    }
    for t in [0.1, 0.9, 2.2, -1.4] {
        let s = sample_f(&h("1 Z"), t, 1, &mut m, &budget()).unwrap();
        assert!((s.value - c(t.cos() / 2.0, 0.0)).norm() < 1e-12);
        let s = sample_f(&h("0 ZZ"), t, 1, &mut m, &budget()).unwrap();
        assert!((s.value - c(0.5, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn unitary_examples() {
    let mut m = exact();
    let mut w = GateNetwork::new(2);
    w.rotate("ZX".parse().unwrap(), 0.4).unwrap();
    let s = sample_f_unitary(&w, 0, &mut m, &budget()).unwrap();
    assert!((s.value - c(0.5, 0.0)).norm() < 1e-12);
    let id = GateNetwork::new(2);
    for k in 0..6 {
        let s = sample_f_unitary(&id, k, &mut m, &budget()).unwrap();
        assert!((s.value - c(0.5, 0.0)).norm() < 1e-12);
        let want = common::network_dense(&w.power(k)).trace() / c(8.0, 0.0);
        let s = sample_f_unitary(&w, k, &mut m, &budget()).unwrap();
        assert!((s.value - want).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn commuting_evolution_matches_eigen_sum() {
    let ham = h("0.3 ZZI\n-0.8 IZZ\n0.45 ZIZ\n0.2 IIZ");
    let eig = eigenvalues(&sum_dense(&ham));
    let grid = sample_f_grid(&ham, 0.37, 40, 1, &mut exact(), &budget()).unwrap();
    for s in &grid {
        let want: C64 = eig.iter().map(|l| C64::from_polar(1.0, -l * s.t)).sum::<C64>()
            / c(2.0 * eig.len() as f64, 0.0);
        assert!((s.value - want).norm() < 1e-8, "t={}", s.t);
    }
}

#[test]
fn trotter_refinement_is_monotone() {
    let ham = h("1 XI\n0.7 ZZ\n0.4 IY");
    for t in [0.5, 1.0, 2.0] {
        let want = f_oracle(&ham, t);
        let errors: Vec<f64> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&steps| (sample_f(&ham, t, steps, &mut exact(), &budget()).unwrap().value - want).norm())
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] < w[0], "t={t}: {errors:?}");
        }
    }
}

#[test]
fn sampled_values_track_the_oracle() {
    let ham = h("0.6 XZ\n0.9 ZI");
    let mut meter = NoisyMeter::projective(6);
    for t in [0.3, 1.1, 2.5] {
        let s = sample_f(&ham, t, 40, &mut meter, &budget()).unwrap();
        let want = f_oracle(&ham, t);
        // each component is half of a <X_1> or <Y_1> estimate
        assert!((s.value.re - want.re).abs() <= budget().epsilon, "t={t}");
        assert!((s.value.im - want.im).abs() <= budget().epsilon, "t={t}");
    }
}

#[test]
fn multiplicities_show_up_as_intensities() {
    let ham = h("1 ZI\n1 IZ");
    let dt = 0.2;
    assert!(dt < nyquist_dt(&ham));
    let grid = sample_f_grid(&ham, dt, 256, 1, &mut exact(), &budget()).unwrap();
    let s = spectrum_fft(&grid, Window::Hann).unwrap();
    let intensity = |omega: f64| s.peak_at(s.bin_of(omega)).intensity;
    let (low, mid, high) = (intensity(-2.0), intensity(0.0), intensity(2.0));
    assert!((mid / low - 2.0).abs() < 0.4, "{low} {mid} {high}");
    assert!((mid / high - 2.0).abs() < 0.4, "{low} {mid} {high}");
    let mut found: Vec<f64> = s.peaks().iter().map(|p| p.frequency).collect();
    found.sort_by(f64::total_cmp);
    assert_eq!(found.len(), 3, "{found:?}");
    for (f, want) in found.iter().zip([-2.0, 0.0, 2.0]) {
        assert!((f - want).abs() <= s.resolution, "{found:?}");
    }
}

#[test]
fn constant_record_has_single_peak() {
    let samples: Vec<TimeSample> = (0..64)
        .map(|k| TimeSample { t: 0.5 * k as f64, value: c(0.5, 0.0), stderr: 0.0 })
        .collect();
    for window in [Window::Hann, Window::Exponential] {
        let s = spectrum_fft(&samples, window).unwrap();
        let peaks = s.peaks();
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].frequency.abs() <= s.resolution / 2.0);
        assert!((s.total_weight() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn bad_grids_are_rejected() {
    let mut samples: Vec<TimeSample> = (0..8)
        .map(|k| TimeSample { t: 0.1 * k as f64, value: c(0.5, 0.0), stderr: 0.0 })
        .collect();
    assert!(spectrum_fft(&samples[..1], Window::Hann).is_err());
    samples[5].t += 0.03;
    assert!(spectrum_fft(&samples, Window::Hann).is_err());
    let flat: Vec<TimeSample> = (0..8)
        .map(|_| TimeSample { t: 0.0, value: c(0.5, 0.0), stderr: 0.0 })
        .collect();
    assert!(spectrum_fft(&flat, Window::Hann).is_err());
    assert!(sample_f_grid(&h("1 Z"), -0.1, 8, 1, &mut exact(), &budget()).is_err());
}

#[test]
fn windows_parse_by_name() {
    assert_eq!("hann".parse::<Window>().unwrap(), Window::Hann);
    assert_eq!("exp".parse::<Window>().unwrap(), Window::Exponential);
    assert!("boxcar".parse::<Window>().is_err());
}

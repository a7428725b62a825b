mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use common::{c, identity, network_dense, pauli_dense};
use dqc::circuit::GateNetwork;
use dqc::dense::{Matrix, C64};
use dqc::measure::{EstimationBudget, NoisyMeter};
use dqc::pauli::PauliString;
use dqc::protocols::{
    dqc1_pauli_pair, dqcp_matrix_element, estimate_pauli_coefficient, parse_basis,
    pseudo_pure_answer, pseudo_pure_input, pseudo_pure_prepare, synthesize_conjugation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn exact() -> NoisyMeter {
    NoisyMeter::gaussian(0.0, 0).unwrap()
}

fn budget(eps: f64) -> EstimationBudget {
    EstimationBudget::new(eps, 0.01).unwrap()
}

fn x_half_turn() -> GateNetwork {
    let mut net = GateNetwork::new(1);
    net.rotate(ps("X"), FRAC_PI_2).unwrap();
    net
}

/// `tr(sigma_a U sigma_b U^dagger) / 2^n` from the gate list.
fn pair_oracle(u: &GateNetwork, a: &PauliString, b: &PauliString) -> f64 {
    let m = network_dense(u);
    let t = pauli_dense(a) * &m * pauli_dense(b) * m.adjoint();
    t.trace().re / t.nrows() as f64
}

fn coefficient_oracle(u: &GateNetwork, b: &PauliString) -> C64 {
    let t = pauli_dense(b) * network_dense(u);
    t.trace() / c(t.nrows() as f64, 0.0)
}

#[test]
fn conjugation_examples() {
    let same = synthesize_conjugation(&ps("XZ"), &ps("XZ")).unwrap();
    assert!(same.network.is_empty());
    assert_eq!(same.sign, 1);

    let zx = synthesize_conjugation(&ps("Z"), &ps("X")).unwrap();
    assert_eq!(zx.network.len(), 1);
    assert_eq!(zx.network.gates()[0].axis(), &ps("Y"));
    let g = network_dense(&zx.network);
    let got = &g * pauli_dense(&ps("Z")) * g.adjoint();
    assert!((got - pauli_dense(&ps("X")) * c(zx.sign.into(), 0.0)).norm() < 1e-12);

    // ZI and ZZ commute, so no single rotation links them
    let zz = synthesize_conjugation(&ps("ZI"), &ps("ZZ")).unwrap();
    assert_eq!(zz.network.len(), 2);
    let g = network_dense(&zz.network);
    let got = &g * pauli_dense(&ps("ZI")) * g.adjoint();
    assert!((got - pauli_dense(&ps("ZZ")) * c(zz.sign.into(), 0.0)).norm() < 1e-12);

    assert!(synthesize_conjugation(&ps("II"), &ps("ZI")).is_err());
    assert!(synthesize_conjugation(&ps("ZI"), &ps("II")).is_err());
}

#[test]
fn conjugation_of_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.random_range(1..=5);
        let s = PauliString::random_nonidentity(n, &mut rng);
        let t = PauliString::random_nonidentity(n, &mut rng);
        let conj = synthesize_conjugation(&s, &t).unwrap();
        assert!(conj.network.len() <= 2);
        for gate in conj.network.gates() {
            assert!((gate.angle() - FRAC_PI_4).abs() < 1e-15);
        }
        let g = network_dense(&conj.network);
        let got = &g * pauli_dense(&s) * g.adjoint();
        let want = pauli_dense(&t) * c(conj.sign.into(), 0.0);
        assert!((got - want).norm() < 1e-10, "{s} -> {t}");
        let back = conj.inverse();
        let h = network_dense(&back.network);
        let got = &h * pauli_dense(&t) * h.adjoint();
        assert!((got - pauli_dense(&s) * c(back.sign.into(), 0.0)).norm() < 1e-10);
    }
}

#[test]
fn trace_pair_examples() {
    let id = GateNetwork::new(2);
    let e = dqc1_pauli_pair(&id, &ps("ZI"), &ps("ZI"), &mut exact(), &budget(0.1)).unwrap();
    assert!((e.value - 1.0).abs() < 1e-12);
    let e = dqc1_pauli_pair(&id, &ps("ZI"), &ps("IZ"), &mut exact(), &budget(0.1)).unwrap();
    assert!(e.value.abs() < 1e-12);
    assert!(dqc1_pauli_pair(&id, &ps("II"), &ps("IZ"), &mut exact(), &budget(0.1)).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut meter = NoisyMeter::projective(2);
    let b = budget(0.05);
    for _ in 0..10 {
        let u = GateNetwork::random(4, 25, &mut rng);
        let pa = PauliString::random_nonidentity(4, &mut rng);
        let pb = PauliString::random_nonidentity(4, &mut rng);
        let oracle = pair_oracle(&u, &pa, &pb);
        let e = dqc1_pauli_pair(&u, &pa, &pb, &mut exact(), &b).unwrap();
        assert!((e.value - oracle).abs() < 1e-10);
        let e = dqc1_pauli_pair(&u, &pa, &pb, &mut meter, &b).unwrap();
        assert!((e.value - oracle).abs() <= b.epsilon, "{} vs {oracle}", e.value);
    }
}

#[test]
fn coefficient_examples() {
    let a = estimate_pauli_coefficient(&GateNetwork::new(2), &ps("II"), &mut exact(), &budget(0.1))
        .unwrap();
    assert!((a.value - c(1.0, 0.0)).norm() < 1e-12);
    let a = estimate_pauli_coefficient(&x_half_turn(), &ps("X"), &mut exact(), &budget(0.1)).unwrap();
    assert!((a.value - c(0.0, -1.0)).norm() < 1e-12);
}

#[test]
fn coefficients_of_a_random_network() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = GateNetwork::random(3, 20, &mut rng);
    let b = budget(0.1);
    let mut meter = NoisyMeter::projective(3);
    let mut total = 0.0;
    for s in PauliString::all(3) {
        let oracle = coefficient_oracle(&u, &s);
        total += oracle.norm_sqr();
        let e = estimate_pauli_coefficient(&u, &s, &mut meter, &b).unwrap();
        assert!((e.value.re - oracle.re).abs() <= b.epsilon, "{s}");
        assert!((e.value.im - oracle.im).abs() <= b.epsilon, "{s}");
    }
    assert!((total - 1.0).abs() < 0.05);
}

#[test]
fn matrix_element_examples() {
    let (n, a) = parse_basis("0").unwrap();
    let (_, b) = parse_basis("1").unwrap();
    assert_eq!(n, 1);
    let e = dqcp_matrix_element(&x_half_turn(), a, b, &mut exact(), &budget(0.1)).unwrap();
    assert!((e.value - c(0.0, -1.0)).norm() < 1e-12);
    let e = dqcp_matrix_element(&GateNetwork::new(3), 1, 6, &mut exact(), &budget(0.1)).unwrap();
    assert!(e.value.norm() < 1e-12);
    assert_eq!(parse_basis("101").unwrap(), (3, 5));
    assert!(parse_basis("1x1").is_err());
}

#[test]
fn matrix_elements_within_three_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut meter = NoisyMeter::projective(4);
    let b = budget(0.05);
    for _ in 0..10 {
        let u = GateNetwork::random(3, 20, &mut rng);
        let (ia, ib) = (rng.random_range(0..8), rng.random_range(0..8));
        let want = network_dense(&u)[(ia, ib)];
        let exact_value = dqcp_matrix_element(&u, ia, ib, &mut exact(), &b).unwrap();
        assert!((exact_value.value - want).norm() < 1e-10);
        let e = dqcp_matrix_element(&u, ia, ib, &mut meter, &b).unwrap();
        assert!((e.value.re - want.re).abs() <= 3.0 * e.stderr_re, "{ia},{ib} re");
        assert!((e.value.im - want.im).abs() <= 3.0 * e.stderr_im, "{ia},{ib} im");
    }
}

/// `Z (x) (2|0><0| - I)` on `1 + n` qubits.
fn pseudo_pure_deviation(n: usize) -> Matrix {
    let mut d = -identity(n);
    d[(0, 0)] = c(1.0, 0.0);
    pauli_dense(&ps("Z")).kronecker(&d)
}

#[test]
fn pseudo_pure_preparation_is_exact() {
    for n in 1..=4 {
        let mut s = pseudo_pure_input(n).unwrap();
        s.apply_network_mut(&pseudo_pure_prepare(n).unwrap()).unwrap();
        let dim = (1usize << (n + 1)) as f64;
        let deviation = s.matrix() * c(dim, 0.0) - identity(n + 1);
        assert!(deviation.trace().norm() < 1e-10);
        assert!((&deviation - pseudo_pure_deviation(n)).norm() < 1e-10, "n={n}");
        let zz = PauliString::from_index_codes(&[[3, 3].as_slice(), &vec![0; n - 1]].concat()).unwrap();
        let want = (pauli_dense(&zz) * pseudo_pure_deviation(n)).trace().re / dim;
        assert!((s.deviation_coefficient(&zz).unwrap() - want).abs() < 1e-10);
    }
}

#[test]
fn pseudo_pure_answers() {
    let r = pseudo_pure_answer(&GateNetwork::new(2), &mut exact(), &budget(0.1)).unwrap();
    assert!((r.alpha - 1.0).abs() < 1e-12);
    assert!((r.signal.value - 0.5).abs() < 1e-12);
    let mut flip = GateNetwork::new(2);
    flip.rotate(ps("XI"), FRAC_PI_2).unwrap();
    let f = pseudo_pure_answer(&flip, &mut exact(), &budget(0.1)).unwrap();
    assert!((f.alpha + 1.0).abs() < 1e-12);
    assert!((f.signal.value + r.signal.value).abs() < 1e-12);
}

#[test]
fn sign_errors_grow_with_register_size() {
    // 6 blocks of 16 shots each
    let b = EstimationBudget::new(0.5, 0.5).unwrap();
    let trials = 400;
    let mut rates = Vec::new();
    for n in 1..=5 {
        let mut wrong = 0;
        for t in 0..trials {
            let mut m = NoisyMeter::projective(9).substream(t);
            let r = pseudo_pure_answer(&GateNetwork::new(n), &mut m, &b).unwrap();
            if r.alpha <= 0.0 {
                wrong += 1;
            }
        }
        rates.push(wrong as f64 / trials as f64);
    }
    for w in rates.windows(2) {
        assert!(w[1] >= w[0], "{rates:?}");
    }
    assert!(rates[4] > 0.1 && rates[0] == 0.0, "{rates:?}");
}

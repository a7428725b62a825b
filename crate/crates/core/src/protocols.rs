//! Estimators built from conditional networks and `<Z_1>` readout.
//!
//! Every protocol simulates its pipeline exactly, then hands the final
//! `<Z_1>` to the meter, which supplies the sampling noise. Observables other
//! than `Z_1` are read by conjugating them onto `Z_1` with at most two
//! `pi/4` Pauli rotations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{build_tn, conditional_u, not_gate, swap, GateNetwork};
use crate::dense::{check_dense, dim_of, C64};
use crate::error::{Error, Result};
use crate::measure::{estimate_mean_value, Estimate, EstimationBudget, NoisyMeter};
use crate::pauli::{Pauli, PauliString, Phase, PhasedPauli};
use crate::state::{pauli_trace, DensityState, PureState};

/// A network `G` of `pi/4` rotations with `G sigma_source G^dagger = sign sigma_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordConjugation {
    pub network: GateNetwork,
    pub source: PauliString,
    pub target: PauliString,
    pub sign: i8,
}

impl CliffordConjugation {
    pub fn sign_f64(&self) -> f64 {
        f64::from(self.sign)
    }

    /// The conjugation taking `target` back to `sign * source`.
    pub fn inverse(&self) -> CliffordConjugation {
        CliffordConjugation {
            network: self.network.inverse(),
            source: self.target.clone(),
            target: self.source.clone(),
            sign: self.sign,
        }
    }
}

/// `exp(-i a pi/4) s exp(i a pi/4) = i s a` for anticommuting `s` and `a`.
fn quarter_turn(s: &PauliString, a: &PauliString) -> Result<PhasedPauli> {
    let p = s.mul(a)?;
    Ok(PhasedPauli::new(Phase::I * p.phase, p.string))
}

fn anticommute_1q(a: Pauli, b: Pauli) -> bool {
    a != Pauli::I && b != Pauli::I && a != b
}

/// A Pauli string of weight at most two anticommuting with both `s` and `t`,
/// which exists whenever `s != t` are both non-identity.
fn bridge(s: &PauliString, t: &PauliString) -> Result<PauliString> {
    let n = s.num_qubits();
    let ops = [Pauli::X, Pauli::Y, Pauli::Z];
    let (so, to) = (s.ops(), t.ops());
    let mut only_s = None;
    let mut only_t = None;
    for k in 0..n {
        for &p in &ops {
            match (anticommute_1q(p, so[k]), anticommute_1q(p, to[k])) {
                (true, true) => return PauliString::single(n, k + 1, p),
                (true, false) if only_s.is_none() => only_s = Some((k, p)),
                (false, true) if only_t.is_none() => only_t = Some((k, p)),
                _ => {}
            }
        }
    }
    match (only_s, only_t) {
        (Some((i, p)), Some((j, q))) if i != j => {
            PauliString::from_sparse(n, &[(i + 1, p), (j + 1, q)])
        }
        _ => Err(Error::Invariant(format!(
            "no bridging Pauli between {s} and {t}"
        ))),
    }
}

/// Builds a network of at most two `pi/4` rotations conjugating `sigma_source`
/// to `+/- sigma_target`, and checks the result on random vectors.
pub fn synthesize_conjugation(
    source: &PauliString,
    target: &PauliString,
) -> Result<CliffordConjugation> {
    if source.num_qubits() != target.num_qubits() {
        return Err(Error::SizeMismatch {
            left: source.num_qubits(),
            right: target.num_qubits(),
        });
    }
    if source.is_identity() || target.is_identity() {
        return Err(Error::IdentityPauli);
    }
    let n = source.num_qubits();
    let mut network = GateNetwork::new(n);
    let mut current = PhasedPauli::new(Phase::ONE, source.clone());
    if source != target {
        let mut axes = Vec::with_capacity(2);
        if source.commutes(target)? {
            let r = bridge(source, target)?;
            axes.push(source.mul(&r)?.string);
        }
        let mut probe = current.string.clone();
        for a in &axes {
            probe = quarter_turn(&probe, a)?.string;
        }
        axes.push(probe.mul(target)?.string);
        for a in axes {
            let next = quarter_turn(&current.string, &a)?;
            current = PhasedPauli::new(current.phase * next.phase, next.string);
            network.rotate(a, FRAC_PI_4)?;
        }
    }
    let sign = match (current.string == *target, current.phase.sign()) {
        (true, Some(s)) => s,
        _ => {
            return Err(Error::Invariant(format!(
                "conjugation of {source} landed on {current}"
            )))
        }
    };
    let conj = CliffordConjugation {
        network,
        source: source.clone(),
        target: target.clone(),
        sign,
    };
    if check_dense(n).is_ok() {
        verify_conjugation(&conj)?;
    }
    Ok(conj)
}

/// Checks `G sigma_s v = sign sigma_t G v` on two fixed random vectors.
fn verify_conjugation(c: &CliffordConjugation) -> Result<()> {
    let dim = dim_of(c.source.num_qubits());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..2 {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                C64::new(
                    rand::Rng::random::<f64>(&mut rng) - 0.5,
                    rand::Rng::random::<f64>(&mut rng) - 0.5,
                )
            })
            .collect();
        let mut lhs = vec![C64::new(0.0, 0.0); dim];
        c.source.apply(&v, &mut lhs);
        c.network.apply(&mut lhs);
        let mut gv = v.clone();
        c.network.apply(&mut gv);
        let mut rhs = vec![C64::new(0.0, 0.0); dim];
        c.target.apply(&gv, &mut rhs);
        let scale: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (l - r * c.sign_f64()).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if err > 1e-10 * scale.max(1.0) {
            return Err(Error::Invariant(format!(
                "conjugation {} -> {} failed dense check ({err:.2e})",
                c.source, c.target
            )));
        }
    }
    Ok(())
}

fn z1(n: usize) -> PauliString {
    PauliString::single(n, 1, Pauli::Z).expect("n >= 1")
}

fn check_size(what: usize, n: usize) -> Result<()> {
    if what != n {
        return Err(Error::SizeMismatch {
            left: what,
            right: n,
        });
    }
    Ok(())
}

fn scaled(e: Estimate, factor: f64) -> Estimate {
    Estimate {
        value: e.value * factor,
        stderr: e.stderr * factor.abs(),
        shots: e.shots,
    }
}

/// Reads `<sigma_op>` by conjugating it onto `Z_1`.
pub fn estimate_expectation(
    state: &DensityState,
    op: &PauliString,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Estimate> {
    let post = synthesize_conjugation(op, &z1(op.num_qubits()))?;
    let mean = state
        .apply_network(&post.network)?
        .expectation(&z1(op.num_qubits()))?;
    Ok(scaled(
        estimate_mean_value(mean, meter, budget),
        post.sign_f64(),
    ))
}

fn read_pauli_pure(
    state: &PureState,
    op: &PauliString,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Estimate> {
    let post = synthesize_conjugation(op, &z1(op.num_qubits()))?;
    let mut s = state.clone();
    s.apply_network(&post.network)?;
    let mean = s.expectation(&z1(op.num_qubits()))?;
    Ok(scaled(
        estimate_mean_value(mean, meter, budget),
        post.sign_f64(),
    ))
}

/// DQC1 estimate of `tr(sigma_a U sigma_b U^dagger) / 2^n`.
pub fn dqc1_pauli_pair(
    u: &GateNetwork,
    a: &PauliString,
    b: &PauliString,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Estimate> {
    let n = u.num_qubits();
    check_size(a.num_qubits(), n)?;
    check_size(b.num_qubits(), n)?;
    if a.is_identity() || b.is_identity() {
        return Err(Error::IdentityPauli);
    }
    let prep = synthesize_conjugation(&z1(n), b)?;
    let mut state = DensityState::init_dqc1(n)?;
    state.apply_network_mut(&prep.network)?;
    state.apply_network_mut(u)?;
    Ok(scaled(
        estimate_expectation(&state, a, meter, budget)?,
        prep.sign_f64(),
    ))
}

/// Dense `tr(sigma_a U sigma_b U^dagger) / 2^n`.
pub fn pauli_pair_exact(u: &GateNetwork, a: &PauliString, b: &PauliString) -> Result<f64> {
    let n = u.num_qubits();
    check_size(a.num_qubits(), n)?;
    check_size(b.num_qubits(), n)?;
    let mut m = b.matrix()?;
    u.apply_left(&mut m);
    m.adjoint_mut();
    u.apply_left(&mut m);
    Ok(pauli_trace(a, &m).re / dim_of(n) as f64)
}

/// Estimated coefficient `alpha_b = tr(sigma_b U) / 2^n` of the Pauli expansion of `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PauliCoefficient {
    #[serde(serialize_with = "crate::protocols::ser_display")]
    pub b: PauliString,
    #[serde(skip)]
    pub value: C64,
    pub stderr: f64,
    pub shots: u64,
}

pub(crate) fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Estimates `alpha_b` with two DQC1 runs on `n + 1` qubits.
///
/// The conditional network `V` runs `U` when the control reads 0. Starting
/// from the deviation `X_1 sigma_b`, reading `X_1` gives `Re alpha_b` and
/// reading `Y_1` gives `-Im alpha_b`. `b` may be the identity.
pub fn estimate_pauli_coefficient(
    u: &GateNetwork,
    b: &PauliString,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<PauliCoefficient> {
    let n = u.num_qubits();
    check_size(b.num_qubits(), n)?;
    let m = n + 1;
    let deviation = b.embed(m, 1)?.with(1, Pauli::X)?;
    let prep = synthesize_conjugation(&z1(m), &deviation)?;
    let mut state = DensityState::init_dqc1(m)?;
    state.apply_network_mut(&prep.network)?;
    state.apply_network_mut(&conditional_u(u, false))?;
    let re = estimate_expectation(&state, &PauliString::single(m, 1, Pauli::X)?, meter, budget)?;
    let im = estimate_expectation(&state, &PauliString::single(m, 1, Pauli::Y)?, meter, budget)?;
    let s = prep.sign_f64();
    Ok(PauliCoefficient {
        b: b.clone(),
        value: C64::new(s * re.value, -s * im.value),
        stderr: re.stderr.hypot(im.stderr),
        shots: re.shots + im.shots,
    })
}

/// Dense `tr(sigma_b U) / 2^n`.
pub fn pauli_coefficient_exact(u: &GateNetwork, b: &PauliString) -> Result<C64> {
    check_size(b.num_qubits(), u.num_qubits())?;
    Ok(pauli_trace(b, &u.unitary()?) / dim_of(u.num_qubits()) as f64)
}

/// Every coefficient of the Pauli expansion, in ordinal order of `b`.
pub fn pauli_expansion_exact(u: &GateNetwork) -> Result<Vec<(PauliString, C64)>> {
    let m = u.unitary()?;
    let d = dim_of(u.num_qubits()) as f64;
    Ok(PauliString::all(u.num_qubits())
        .map(|b| {
            let a = pauli_trace(&b, &m) / d;
            (b, a)
        })
        .collect())
}

/// Dense values of `tr(X_1 V X_1 sigma_b V^dagger) / 2^{n+1}` and
/// `tr(Y_1 V X_1 sigma_b V^dagger) / 2^{n+1}` for `V = conditional_u(U, 0)`.
pub fn conditional_trace_pair(u: &GateNetwork, b: &PauliString) -> Result<(f64, f64)> {
    let n = u.num_qubits();
    check_size(b.num_qubits(), n)?;
    let m = n + 1;
    let v = conditional_u(u, false);
    let mut rho = b.embed(m, 1)?.with(1, Pauli::X)?.matrix()?;
    v.apply_left(&mut rho);
    rho.adjoint_mut();
    v.apply_left(&mut rho);
    let d = dim_of(m) as f64;
    let x = pauli_trace(&PauliString::single(m, 1, Pauli::X)?, &rho).re / d;
    let y = pauli_trace(&PauliString::single(m, 1, Pauli::Y)?, &rho).re / d;
    Ok((x, y))
}

/// Estimated transition amplitude `<a|U|b>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElement {
    pub a: usize,
    pub b: usize,
    pub value: C64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub shots: u64,
}

impl MatrixElement {
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

fn bit(n: usize, index: usize, qubit: usize) -> bool {
    index >> (n - qubit) & 1 == 1
}

/// Parses a computational basis label such as `"0110"`, qubit 1 first.
pub fn parse_basis(label: &str) -> Result<(usize, usize)> {
    if label.is_empty() || label.len() >= usize::BITS as usize {
        return Err(Error::InvalidArgument(format!(
            "basis label '{label}' has bad length"
        )));
    }
    let mut index = 0usize;
    for (i, ch) in label.chars().enumerate() {
        index = index << 1
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        column: i + 1,
                        message: format!("'{ch}' is not a bit"),
                    })
                }
            };
    }
    Ok((label.len(), index))
}

/// Prepares `|a>` from `|0...0>`, or `(|a> + e^{i phi}|b>)/sqrt(2)` when
/// `phase` is given, up to a global phase, with `O(n)` gates.
///
/// A pivot qubit where `a` and `b` differ is put into superposition, then
/// each other differing qubit is flipped on the `b` branch by a controlled
/// `pi/2` rotation about `X`. Each such rotation contributes `-i`, which is
/// pre-compensated in the pivot's relative phase.
pub fn superposition_prep(n: usize, a: usize, b: usize, phase: Option<f64>) -> Result<GateNetwork> {
    let dim = dim_of(n);
    if a >= dim || b >= dim {
        return Err(Error::InvalidArgument(format!(
            "basis index out of range for {n} qubits"
        )));
    }
    let mut net = GateNetwork::new(n);
    for q in 1..=n {
        if bit(n, a, q) {
            net.rotate(PauliString::single(n, q, Pauli::X)?, FRAC_PI_2)?;
        }
    }
    let Some(phi) = phase else { return Ok(net) };
    let differ: Vec<usize> = (1..=n).filter(|&q| bit(n, a, q) != bit(n, b, q)).collect();
    let Some((&pivot, rest)) = differ.split_first() else {
        return Err(Error::InvalidArgument("superposition needs a != b".into()));
    };
    let psi = phi + rest.len() as f64 * FRAC_PI_2;
    let theta = if bit(n, a, pivot) {
        (PI - psi) / 2.0
    } else {
        psi / 2.0
    };
    net.rotate(PauliString::single(n, pivot, Pauli::Y)?, FRAC_PI_4)?;
    if theta != 0.0 {
        net.rotate(PauliString::single(n, pivot, Pauli::Z)?, theta)?;
    }
    for &q in rest {
        net.controlled_rotate(
            pivot,
            bit(n, b, pivot),
            PauliString::single(n, q, Pauli::X)?,
            FRAC_PI_2,
        )?;
    }
    Ok(net)
}

/// `<phi|U|phi>` estimated on a DQCp register: control in `|+>`, register
/// prepared by `prep`, then `V`, then `X_1` and `Y_1` read out.
fn dqcp_diagonal(
    u: &GateNetwork,
    prep: &GateNetwork,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<(Estimate, Estimate)> {
    let m = u.num_qubits() + 1;
    let mut state = PureState::zero(m)?;
    let mut net = GateNetwork::new(m);
    net.rotate(PauliString::single(m, 1, Pauli::Y)?, FRAC_PI_4)?;
    net.append(&prep.embed(m, 1)?)?;
    net.append(&conditional_u(u, false))?;
    state.apply_network(&net)?;
    let re = read_pauli_pure(&state, &PauliString::single(m, 1, Pauli::X)?, meter, budget)?;
    let neg_im = read_pauli_pure(&state, &PauliString::single(m, 1, Pauli::Y)?, meter, budget)?;
    Ok((re, neg_im))
}

/// DQCp estimate of `<a|U|b>` for basis indices `a`, `b` (qubit 1 is the
/// most significant bit).
///
/// For `a != b` the diagonal values `d` of the preparations `|a>`, `|b>`,
/// `(|a> + |b>)/sqrt(2)` and `(|a> + i|b>)/sqrt(2)` determine
/// `<a|U|b> = d_+ - i d_i - (1 - i)(d_a + d_b)/2`.
pub fn dqcp_matrix_element(
    u: &GateNetwork,
    a: usize,
    b: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<MatrixElement> {
    let n = u.num_qubits();
    let (da_re, da_im) = dqcp_diagonal(u, &superposition_prep(n, a, a, None)?, meter, budget)?;
    if a == b {
        return Ok(MatrixElement {
            a,
            b,
            value: C64::new(da_re.value, -da_im.value),
            stderr_re: da_re.stderr,
            stderr_im: da_im.stderr,
            shots: da_re.shots + da_im.shots,
        });
    }
    let (db_re, db_im) = dqcp_diagonal(u, &superposition_prep(n, b, b, None)?, meter, budget)?;
    let (dp_re, dp_im) = dqcp_diagonal(u, &superposition_prep(n, a, b, Some(0.0))?, meter, budget)?;
    let (di_re, di_im) = dqcp_diagonal(
        u,
        &superposition_prep(n, a, b, Some(FRAC_PI_2))?,
        meter,
        budget,
    )?;
    let d = |re: &Estimate, neg_im: &Estimate| C64::new(re.value, -neg_im.value);
    let (dab, dp, di) = (
        d(&da_re, &da_im) + d(&db_re, &db_im),
        d(&dp_re, &dp_im),
        d(&di_re, &di_im),
    );
    let i = C64::new(0.0, 1.0);
    let value = dp - i * di - (C64::new(1.0, 0.0) - i) * dab / 2.0;
    // Re: Re d_+ + Im d_i - (Re + Im)(d_a + d_b)/2; Im: Im d_+ - Re d_i - (Im - Re)(d_a + d_b)/2
    let quarter =
        (da_re.stderr.powi(2) + da_im.stderr.powi(2) + db_re.stderr.powi(2) + db_im.stderr.powi(2))
            / 4.0;
    let stderr_re = (dp_re.stderr.powi(2) + di_im.stderr.powi(2) + quarter).sqrt();
    let stderr_im = (dp_im.stderr.powi(2) + di_re.stderr.powi(2) + quarter).sqrt();
    let shots = [
        &da_re, &da_im, &db_re, &db_im, &dp_re, &dp_im, &di_re, &di_im,
    ]
    .iter()
    .map(|e| e.shots)
    .sum();
    Ok(MatrixElement {
        a,
        b,
        value,
        stderr_re,
        stderr_im,
        shots,
    })
}

/// Network on `n + 1` qubits: swap the ancilla with the clean qubit, apply
/// `T_n`, flip the ancilla.
///
/// The ancilla written as bit 0 is qubit 1 here and the clean input bit is
/// qubit 2, so bits `1..=n` are qubits `2..=n+1`. Applied to
/// [`pseudo_pure_input`] it yields the deviation `Z_1 (2|0><0| - I)`.
pub fn pseudo_pure_prepare(n: usize) -> Result<GateNetwork> {
    let m = n + 1;
    swap(m, 1, 2)?.then(&build_tn(n)?)?.then(&not_gate(m, 1)?)
}

/// One-clean-qubit input for [`pseudo_pure_prepare`]: deviation `Z_2` on `n + 1` qubits.
pub fn pseudo_pure_input(n: usize) -> Result<DensityState> {
    DensityState::dqc1_with_clean_qubit(n + 1, 2)
}

/// Result of reading the answer bit of `U` through a pseudo-pure state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoPureReport {
    pub n: usize,
    /// Sampled `<Z_0 Z_1>`, equal to `alpha * scale`.
    pub signal: Estimate,
    pub signal_exact: f64,
    /// `2^{1-n}`, the signal for `alpha = 1`.
    pub scale: f64,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub alpha_exact: f64,
    /// Repetitions needed to resolve the sign at the budget's failure probability.
    pub sign_shots: u64,
}

/// Runs `U` on the pseudo-pure register and estimates `alpha = <0|U^dagger Z_1 U|0>`.
pub fn pseudo_pure_answer(
    u: &GateNetwork,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<PseudoPureReport> {
    let n = u.num_qubits();
    let m = n + 1;
    let mut state = pseudo_pure_input(n)?;
    state.apply_network_mut(&pseudo_pure_prepare(n)?)?;
    state.apply_network_mut(&u.embed(m, 1)?)?;
    let zz = PauliString::from_sparse(m, &[(1, Pauli::Z), (2, Pauli::Z)])?;
    let signal_exact = state.expectation(&zz)?;
    let signal = estimate_expectation(&state, &zz, meter, budget)?;
    let scale = 2f64.powi(1 - n as i32);
    let sign_budget = EstimationBudget::new(scale / 2.0, budget.p)?;
    Ok(PseudoPureReport {
        n,
        signal,
        signal_exact,
        scale,
        alpha: signal.value / scale,
        alpha_stderr: signal.stderr / scale,
        alpha_exact: signal_exact / scale,
        sign_shots: sign_budget.repetitions(meter.variance_bound()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::Matrix;
    use rand::Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn exact_meter() -> NoisyMeter {
        NoisyMeter::gaussian(0.0, 0).unwrap()
    }

    fn budget() -> EstimationBudget {
        EstimationBudget::new(0.1, 0.1).unwrap()
    }

    fn conjugate(c: &CliffordConjugation) -> Matrix {
        let g = c.network.unitary().unwrap();
        &g * c.source.matrix().unwrap() * g.adjoint()
    }

    #[test]
    fn conjugation_examples() {
        let c = synthesize_conjugation(&p("ZI"), &p("ZI")).unwrap();
        assert!(c.network.is_empty());
        assert_eq!(c.sign, 1);

        let c = synthesize_conjugation(&p("Z"), &p("X")).unwrap();
        assert_eq!(c.network.len(), 1);
        assert_eq!(c.network.gates()[0].axis(), &p("Y"));
        assert!(
            (conjugate(&c) - p("X").matrix().unwrap() * C64::from(c.sign_f64())).norm() < 1e-12
        );

        let c = synthesize_conjugation(&p("ZI"), &p("ZZ")).unwrap();
        assert!(c.network.len() <= 2);
        assert!(
            (conjugate(&c) - p("ZZ").matrix().unwrap() * C64::from(c.sign_f64())).norm() < 1e-12
        );
    }

    #[test]
    fn conjugation_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..=4);
            let s = PauliString::random_nonidentity(n, &mut rng);
            let t = PauliString::random_nonidentity(n, &mut rng);
            let c = synthesize_conjugation(&s, &t).unwrap();
            assert!(c.network.len() <= 2);
            assert!(
                (conjugate(&c) - t.matrix().unwrap() * C64::from(c.sign_f64())).norm() < 1e-10,
                "{s} -> {t}"
            );
            let back = c.inverse();
            assert!(
                (conjugate(&back) - s.matrix().unwrap() * C64::from(back.sign_f64())).norm()
                    < 1e-10
            );
        }
        assert!(synthesize_conjugation(&p("II"), &p("ZI")).is_err());
        assert!(synthesize_conjugation(&p("Z"), &p("ZI")).is_err());
    }

    #[test]
    fn pauli_pair_identity_cases() {
        let u = GateNetwork::new(2);
        let mut m = exact_meter();
        let e = dqc1_pauli_pair(&u, &p("ZI"), &p("ZI"), &mut m, &budget()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let e = dqc1_pauli_pair(&u, &p("ZI"), &p("IZ"), &mut m, &budget()).unwrap();
        assert!(e.value.abs() < 1e-12);
        assert!(dqc1_pauli_pair(&u, &p("II"), &p("IZ"), &mut m, &budget()).is_err());
    }

    #[test]
    fn pauli_coefficient_examples() {
        let mut m = exact_meter();
        let c =
            estimate_pauli_coefficient(&GateNetwork::new(2), &p("II"), &mut m, &budget()).unwrap();
        assert!((c.value - C64::new(1.0, 0.0)).norm() < 1e-12);

        let mut u = GateNetwork::new(1);
        u.rotate(p("X"), FRAC_PI_2).unwrap();
        let c = estimate_pauli_coefficient(&u, &p("X"), &mut m, &budget()).unwrap();
        assert!(
            (c.value - C64::new(0.0, -1.0)).norm() < 1e-12,
            "{}",
            c.value
        );
    }

    #[test]
    fn superposition_prep_matches_target() {
        let n = 3;
        for a in 0..8 {
            for b in 0..8 {
                for phi in [0.0, FRAC_PI_2, 1.1] {
                    let phase = (a != b).then_some(phi);
                    let net = superposition_prep(n, a, b, phase).unwrap();
                    let mut s = PureState::zero(n).unwrap();
                    s.apply_network(&net).unwrap();
                    let mut want = vec![C64::new(0.0, 0.0); 8];
                    match phase {
                        None => want[a] = C64::new(1.0, 0.0),
                        Some(phi) => {
                            want[a] = C64::new(FRAC_1_SQRT_2, 0.0);
                            want[b] = C64::from_polar(FRAC_1_SQRT_2, phi);
                        }
                    }
                    let overlap: C64 = want
                        .iter()
                        .zip(s.amplitudes().iter())
                        .map(|(w, x)| w.conj() * x)
                        .sum();
                    assert!(
                        (overlap.norm() - 1.0).abs() < 1e-12,
                        "a={a} b={b} phi={phi}"
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_element_examples() {
        let mut m = exact_meter();
        let e = dqcp_matrix_element(&GateNetwork::new(2), 1, 2, &mut m, &budget()).unwrap();
        assert!(e.value.norm() < 1e-12);
        let mut u = GateNetwork::new(1);
        u.rotate(p("X"), FRAC_PI_2).unwrap();
        let e = dqcp_matrix_element(&u, 0, 1, &mut m, &budget()).unwrap();
        assert!(
            (e.value - C64::new(0.0, -1.0)).norm() < 1e-12,
            "{}",
            e.value
        );
        let e = dqcp_matrix_element(&u, 1, 1, &mut m, &budget()).unwrap();
        assert!(e.value.norm() < 1e-12);
    }

    #[test]
    fn parse_basis_labels() {
        assert_eq!(parse_basis("0110").unwrap(), (4, 6));
        assert!(matches!(
            parse_basis("01a").unwrap_err(),
            Error::Parse { column: 3, .. }
        ));
        assert!(parse_basis("").is_err());
    }

    #[test]
    fn pseudo_pure_identity_and_flip() {
        let mut m = exact_meter();
        let r = pseudo_pure_answer(&GateNetwork::new(2), &mut m, &budget()).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-12);
        assert!((r.signal.value - 0.5).abs() < 1e-12);
        let flip = not_gate(2, 1).unwrap();
        let r = pseudo_pure_answer(&flip, &mut m, &budget()).unwrap();
        assert!((r.alpha + 1.0).abs() < 1e-12);
        let r3 = pseudo_pure_answer(&GateNetwork::new(3), &mut m, &budget()).unwrap();
        assert!(r3.sign_shots > r.sign_shots);
    }
}

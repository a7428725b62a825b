//! Deterministic oracles, the flipped oracle `U' = (I - 2P) U`, and the
//! distinguishability bound `|v(U') - v(U)| <= 4r / 2^n` for DQC1 algorithms
//! that interleave `r` oracle calls with fixed networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::GateNetwork;
use crate::dense::{
    apply_leading_left, check_dense, dim_of, embed_leading, haar_unitary, kron, qubits_of,
    unitarity_defect, Matrix, Vector, C64,
};
use crate::error::{Error, Result};
use crate::measure::{estimate_mean_value, Estimate, EstimationBudget, NoisyMeter};
use crate::pauli::{Pauli, PauliString};
use crate::state::{DensityState, UNITARY_TOL};

/// Tolerance for the product-state and answer checks.
pub const DETERMINISM_TOL: f64 = 1e-9;
/// Slack added to the bound when counting violations.
pub const BOUND_SLACK: f64 = 1e-9;
/// Gates per interleaved network in the default sampler.
pub const DEFAULT_LAYER_GATES: usize = 10;

/// A unitary whose first output qubit on input `|0...0>` is a definite bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicOracle {
    n: usize,
    unitary: Matrix,
    answer: i8,
    residual: Vector,
}

impl DeterministicOracle {
    /// Checks determinism and splits `U|0> = |b>|psi>`.
    pub fn from_unitary(unitary: Matrix) -> Result<Self> {
        let n = qubits_of(unitary.nrows())?;
        if n == 0 {
            return Err(Error::QubitRange(0));
        }
        check_dense(n)?;
        let defect = unitarity_defect(&unitary);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        let half = dim_of(n - 1);
        let out = unitary.column(0);
        let p0: f64 = out.rows(0, half).iter().map(|z| z.norm_sqr()).sum();
        let (bit, answer) = if p0 > 1.0 - DETERMINISM_TOL {
            (0, 1)
        } else if p0 < DETERMINISM_TOL {
            (1, -1)
        } else {
            return Err(Error::NotDeterministic(format!("P(first bit = 0) = {p0}")));
        };
        let mut residual: Vector = out.rows(bit * half, half).into_owned();
        residual /= C64::new(residual.norm(), 0.0);
        Ok(DeterministicOracle {
            n,
            unitary,
            answer,
            residual,
        })
    }

    /// `(X_1^a (x) W) R` with `W` Haar on qubits `2..=n` and `R` a Haar unitary
    /// reflected so that it fixes `|0...0>` up to phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::QubitRange(0));
        }
        check_dense(n)?;
        let d = dim_of(n);
        let h = haar_unitary(d, rng);
        let v = h.column(0).into_owned();
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut w = v.clone();
        w[0] -= phase;
        let r = if w.norm() > 1e-14 {
            let ww = w.dotc(&w);
            let refl = Matrix::identity(d, d) - (&w * w.adjoint()) * (C64::new(2.0, 0.0) / ww);
            refl * h
        } else {
            h
        };
        let flip = rng.random::<bool>();
        let first = if flip {
            PauliString::single(1, 1, Pauli::X)?.matrix()?
        } else {
            Matrix::identity(2, 2)
        };
        let rest = haar_unitary(dim_of(n - 1), rng);
        Self::from_unitary(kron(&first, &rest) * r)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn unitary(&self) -> &Matrix {
        &self.unitary
    }

    /// `<0|U^dagger Z_1 U|0>`, either `+1` or `-1`.
    pub fn answer(&self) -> i8 {
        self.answer
    }

    /// `|psi>` on qubits `2..=n`.
    pub fn residual(&self) -> &Vector {
        &self.residual
    }

    /// Re-checks unitarity, the product form of `U|0>`, and the answer.
    pub fn validate(&self) -> Result<()> {
        let again = Self::from_unitary(self.unitary.clone())?;
        if again.answer != self.answer {
            return Err(Error::Invariant(
                "stored answer disagrees with the unitary".into(),
            ));
        }
        let bit = usize::from(self.answer < 0);
        let half = dim_of(self.n - 1);
        let mut expect = Vector::zeros(dim_of(self.n));
        expect.rows_mut(bit * half, half).copy_from(&self.residual);
        let out = self.unitary.column(0);
        let overlap = expect.dotc(&out);
        if (overlap.norm() - 1.0).abs() > DETERMINISM_TOL {
            return Err(Error::NotDeterministic(format!(
                "|<b psi|U|0>| = {}",
                overlap.norm()
            )));
        }
        let z = PauliString::single(self.n, 1, Pauli::Z)?.matrix()?;
        let ans = (out.adjoint() * z * out)[(0, 0)].re;
        if (ans - f64::from(self.answer)).abs() > DETERMINISM_TOL {
            return Err(Error::Invariant(format!("answer expectation {ans}")));
        }
        Ok(())
    }
}

/// `P = (I - X_1)/2 (x) |psi><psi|`, the rank-one projector of the flip.
pub fn flip_projector(orc: &DeterministicOracle) -> Result<Matrix> {
    let minus = (Matrix::identity(2, 2) - PauliString::single(1, 1, Pauli::X)?.matrix()?)
        * C64::new(0.5, 0.0);
    let psi = orc.residual();
    Ok(kron(&minus, &(psi * psi.adjoint())))
}

/// `T = I - 2P`, which flips the first qubit exactly when the rest is `|psi>`.
pub fn flip_operator(orc: &DeterministicOracle) -> Result<Matrix> {
    let d = dim_of(orc.num_qubits());
    Ok(Matrix::identity(d, d) - flip_projector(orc)? * C64::new(2.0, 0.0))
}

/// `U' = T U`, deterministic with the opposite answer.
pub fn make_flipped_oracle(orc: &DeterministicOracle) -> Result<DeterministicOracle> {
    orc.validate()?;
    let flipped = DeterministicOracle::from_unitary(flip_operator(orc)? * orc.unitary())?;
    if flipped.answer != -orc.answer {
        return Err(Error::Invariant("flipped oracle kept its answer".into()));
    }
    Ok(flipped)
}

/// Networks `V_0, ..., V_r` on `m` qubits with `r` oracle calls in between;
/// the oracle acts on qubits `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavedAlgorithm {
    n: usize,
    m: usize,
    networks: Vec<GateNetwork>,
}

impl InterleavedAlgorithm {
    pub fn new(n: usize, networks: Vec<GateNetwork>) -> Result<Self> {
        let Some(first) = networks.first() else {
            return Err(Error::InvalidArgument(
                "an algorithm needs at least V_0".into(),
            ));
        };
        let m = first.num_qubits();
        if n == 0 || n > m {
            return Err(Error::InvalidArgument(format!(
                "oracle register of {n} qubits does not fit in {m}"
            )));
        }
        for v in &networks {
            if v.num_qubits() != m {
                return Err(Error::SizeMismatch {
                    left: v.num_qubits(),
                    right: m,
                });
            }
        }
        Ok(InterleavedAlgorithm { n, m, networks })
    }

    /// Each `V_i` is `gates` random rotations about axes of weight at most two.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        m: usize,
        r: usize,
        gates: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let networks = (0..=r)
            .map(|_| GateNetwork::random(m, gates, rng))
            .collect();
        Self::new(n, networks)
    }

    pub fn oracle_qubits(&self) -> usize {
        self.n
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    pub fn calls(&self) -> usize {
        self.networks.len() - 1
    }

    pub fn networks(&self) -> &[GateNetwork] {
        &self.networks
    }

    fn check_oracle(&self, orc: &DeterministicOracle) -> Result<()> {
        if orc.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: orc.num_qubits(),
                right: self.n,
            });
        }
        check_dense(self.m)
    }

    /// The full unitary `A = V_r U ... U V_0` with the oracle on the leading qubits.
    pub fn unitary_with(&self, orc: &DeterministicOracle) -> Result<Matrix> {
        self.check_oracle(orc)?;
        let d = dim_of(self.m);
        let mut a = Matrix::identity(d, d);
        for (i, v) in self.networks.iter().enumerate() {
            if i > 0 {
                apply_leading_left(orc.unitary(), &mut a)?;
            }
            v.apply_left(&mut a);
        }
        Ok(a)
    }
}

/// `v(U) = tr(A Z_1 A^dagger Z_1) / 2^m`, evaluated densely.
pub fn evaluate_v(alg: &InterleavedAlgorithm, orc: &DeterministicOracle) -> Result<f64> {
    // Z_1 is diagonal, so tr(A Z A^dagger Z) = sum_ij z_i z_j |A_ij|^2
    let a = alg.unitary_with(orc)?;
    let half = dim_of(alg.m) / 2;
    let z = |i: usize| if i < half { 1.0 } else { -1.0 };
    let mut total = 0.0;
    for j in 0..a.ncols() {
        for (i, x) in a.column(j).iter().enumerate() {
            total += z(i) * z(j) * x.norm_sqr();
        }
    }
    Ok(total / dim_of(alg.m) as f64)
}

/// Sampled `v(U)`: run the algorithm on the one-clean-qubit input and read `Z_1`.
pub fn simulate_v(
    alg: &InterleavedAlgorithm,
    orc: &DeterministicOracle,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Estimate> {
    alg.check_oracle(orc)?;
    let mut state = DensityState::init_dqc1(alg.m)?;
    for (i, v) in alg.networks.iter().enumerate() {
        if i > 0 {
            state = state.apply_unitary(&embed_leading(orc.unitary(), alg.m)?)?;
        }
        state.apply_network_mut(v)?;
    }
    let mean = state.expectation(&PauliString::single(alg.m, 1, Pauli::Z)?)?;
    Ok(estimate_mean_value(mean, meter, budget))
}

/// `4r / 2^n`.
pub fn separation_bound(n: usize, r: usize) -> f64 {
    4.0 * r as f64 / dim_of(n) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationResult {
    pub v_u: f64,
    pub v_u_prime: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// `v(U)` and `v(U')` for one algorithm and oracle.
pub fn separation(
    alg: &InterleavedAlgorithm,
    orc: &DeterministicOracle,
) -> Result<SeparationResult> {
    let flipped = make_flipped_oracle(orc)?;
    let v_u = evaluate_v(alg, orc)?;
    let v_u_prime = evaluate_v(alg, &flipped)?;
    let bound = separation_bound(alg.n, alg.calls());
    Ok(SeparationResult {
        v_u,
        v_u_prime,
        bound,
        satisfied: (v_u_prime - v_u).abs() <= bound + BOUND_SLACK,
    })
}

/// The `2r` terms `a_i` with `v(U') - v(U) = (a_1 + ... + a_{2r}) / 2^m`.
///
/// Let `A_j` run `U'` for the first `j` calls and `U` for the rest, and
/// `D_j = A_j - A_{j-1}`. Each hybrid step contributes
/// `tr(Z D_j Z A_j^dagger)` and `tr(Z A_{j-1} Z D_j^dagger)`; both are `-2 tr(W_1 P W_2)`
/// for unitaries `W_1`, `W_2`, so `|a_i| <= 2 rank(P (x) I) = 2^{m-n+1}`.
pub fn telescoping_terms(
    alg: &InterleavedAlgorithm,
    orc: &DeterministicOracle,
) -> Result<Vec<C64>> {
    alg.check_oracle(orc)?;
    let flipped = make_flipped_oracle(orc)?;
    let z = PauliString::single(alg.m, 1, Pauli::Z)?.matrix()?;
    let d = dim_of(alg.m);
    let hybrid = |j: usize| -> Result<Matrix> {
        let mut a = Matrix::identity(d, d);
        for (i, v) in alg.networks.iter().enumerate() {
            if i > 0 {
                let u = if i <= j {
                    flipped.unitary()
                } else {
                    orc.unitary()
                };
                apply_leading_left(u, &mut a)?;
            }
            v.apply_left(&mut a);
        }
        Ok(a)
    };
    let mut terms = Vec::with_capacity(2 * alg.calls());
    let mut prev = hybrid(0)?;
    for j in 1..=alg.calls() {
        let cur = hybrid(j)?;
        let diff = &cur - &prev;
        terms.push((&z * &diff * &z * cur.adjoint()).trace());
        terms.push((&z * &prev * &z * diff.adjoint()).trace());
        prev = cur;
    }
    Ok(terms)
}

/// Grid and sampler settings for [`separation_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    pub rs: Vec<usize>,
    /// Ancilla counts `m - n` to try for each `(n, r)`.
    pub ancillas: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub layer_gates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub bound: f64,
    pub observed_max: f64,
    pub violations: usize,
    pub trials: usize,
}

/// RNG for one trial: ChaCha8 keyed by the sweep seed, with the cell as the
/// stream and the trial selecting a `2^40`-word window.
fn trial_rng(seed: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng.set_word_pos((trial as u128) << 40);
    rng
}

fn run_cell(n: usize, r: usize, m: usize, cell: u64, cfg: &SweepConfig) -> Result<SweepRow> {
    let results: Vec<SeparationResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, cell, trial as u64);
            let orc = DeterministicOracle::random(n, &mut rng)?;
            let alg = InterleavedAlgorithm::random(n, m, r, cfg.layer_gates, &mut rng)?;
            separation(&alg, &orc)
        })
        .collect::<Result<_>>()?;
    let bound = separation_bound(n, r);
    Ok(SweepRow {
        n,
        r,
        m,
        bound,
        observed_max: results
            .iter()
            .map(|s| (s.v_u_prime - s.v_u).abs())
            .fold(0.0, f64::max),
        violations: results.iter().filter(|s| !s.satisfied).count(),
        trials: cfg.trials,
    })
}

/// Random oracles against random interleaved algorithms on every
/// `(n, r, m)` cell; each trial's randomness depends only on the seed, the
/// cell and the trial number.
pub fn separation_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for &n in &cfg.ns {
        for &r in &cfg.rs {
            for &extra in &cfg.ancillas {
                cells.push((n, r, n + extra));
            }
        }
    }
    for &(n, _, m) in &cells {
        if n == 0 {
            return Err(Error::QubitRange(0));
        }
        check_dense(m)?;
    }
    cells
        .iter()
        .enumerate()
        .map(|(i, &(n, r, m))| run_cell(n, r, m, i as u64, cfg))
        .collect()
}

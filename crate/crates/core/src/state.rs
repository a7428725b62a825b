//! Exact dense states: the ground truth every sampled estimator is checked against.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::circuit::{GateNetwork, PauliSum};
use crate::dense::{
    check_dense, dim_of, hermitian_eigen, qubits_of, unitarity_defect, Matrix, Vector, C64,
};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Tolerance for the Hermitian, unit-trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Largest tolerated Hermiticity drift before re-symmetrizing.
pub const DRIFT_TOL: f64 = 1e-8;
/// Gates applied between re-symmetrizations.
pub const RESYMMETRIZE_EVERY: usize = 100;
/// Frobenius tolerance on `U^dagger U - I` for dense unitaries.
pub const UNITARY_TOL: f64 = 1e-8;

/// A density operator on `n` qubits, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    n: usize,
    matrix: Matrix,
}

/// A pure state vector; the cheap path when a state is known to be pure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vector,
}

/// The non-identity part of `rho = (I + sum_b a_b sigma_b) / 2^n`, keeping
/// coefficients above a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationView {
    n: usize,
    coefficients: BTreeMap<PauliString, f64>,
}

fn check_range(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::QubitRange(n));
    }
    check_dense(n)
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `tr(sigma_a M)` for a square `M` in `O(2^n)`.
pub(crate) fn pauli_trace(a: &PauliString, m: &Matrix) -> C64 {
    let (xm, zm, ys) = a.basis_masks();
    let base = crate::pauli::Phase::from_exponent(ys as i64).to_complex();
    (0..m.nrows())
        .map(|k| {
            let j = k ^ xm;
            let ph = if (zm & j).count_ones() % 2 == 0 {
                base
            } else {
                -base
            };
            ph * m[(j, k)]
        })
        .sum()
}

impl DensityState {
    /// Wraps a matrix after checking the state invariants.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let n = qubits_of(matrix.nrows())?;
        check_dense(n)?;
        let s = DensityState { n, matrix };
        s.validate(STATE_TOL)?;
        Ok(s)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_range(n)?;
        let d = dim_of(n);
        Ok(DensityState {
            n,
            matrix: Matrix::identity(d, d) / C64::new(d as f64, 0.0),
        })
    }

    /// `|0...0><0...0|`.
    pub fn init_dqcp(n: usize) -> Result<Self> {
        check_range(n)?;
        Ok(PureState::zero(n)?.density())
    }

    /// `(I + Z_1) / 2^n`: qubit 1 clean in `|0>`, the rest maximally mixed.
    pub fn init_dqc1(n: usize) -> Result<Self> {
        Self::dqc1_with_clean_qubit(n, 1)
    }

    /// `(I + Z_q) / 2^n` with the clean qubit at position `q`.
    pub fn dqc1_with_clean_qubit(n: usize, q: usize) -> Result<Self> {
        check_range(n)?;
        if q == 0 || q > n {
            return Err(Error::QubitIndex { index: q, n });
        }
        let d = dim_of(n);
        let bit = 1usize << (n - q);
        let scale = 2.0 / d as f64;
        let diag = Vector::from_iterator(
            d,
            (0..d).map(|k| C64::new(if k & bit == 0 { scale } else { 0.0 }, 0.0)),
        );
        Ok(DensityState {
            n,
            matrix: Matrix::from_diagonal(&diag),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > tol {
            return Err(Error::Invariant(format!(
                "state not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::Invariant(format!("state trace {tr} != 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::Invariant(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.hermitian_part()).0
    }

    fn hermitian_part(&self) -> Matrix {
        (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0)
    }

    fn resymmetrize(&mut self) -> Result<()> {
        let drift = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if drift > DRIFT_TOL {
            return Err(Error::Invariant(format!(
                "Hermiticity drift {drift:.3e} exceeds {DRIFT_TOL:e}"
            )));
        }
        self.matrix = self.hermitian_part();
        Ok(())
    }

    /// `U rho U^dagger` for a dense unitary `U`.
    pub fn apply_unitary(&self, u: &Matrix) -> Result<Self> {
        let d = dim_of(self.n);
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                got: u.nrows(),
            });
        }
        let defect = unitarity_defect(u);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        let mut out = DensityState {
            n: self.n,
            matrix: u * &self.matrix * u.adjoint(),
        };
        out.resymmetrize()?;
        Ok(out)
    }

    /// `U rho U^dagger` for the network's unitary.
    pub fn apply_network(&self, net: &GateNetwork) -> Result<Self> {
        let mut out = self.clone();
        out.apply_network_mut(net)?;
        Ok(out)
    }

    /// In-place `U rho U^dagger`, re-symmetrizing every
    /// [`RESYMMETRIZE_EVERY`] gates.
    pub fn apply_network_mut(&mut self, net: &GateNetwork) -> Result<()> {
        if net.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: net.num_qubits(),
                right: self.n,
            });
        }
        for chunk in net.gates().chunks(RESYMMETRIZE_EVERY) {
            let part = GateNetwork::from_gates(self.n, chunk.to_vec())?;
            // U rho U^dagger = U (U rho)^dagger for Hermitian rho
            part.apply_left(&mut self.matrix);
            self.matrix.adjoint_mut();
            part.apply_left(&mut self.matrix);
            self.resymmetrize()?;
        }
        Ok(())
    }

    /// `tr(sigma_a rho)`.
    pub fn expectation(&self, a: &PauliString) -> Result<f64> {
        if a.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: a.num_qubits(),
                right: self.n,
            });
        }
        Ok(pauli_trace(a, &self.matrix).re)
    }

    /// The coefficient `a_b` of `sigma_b` in the deviation; `b` must not be the identity.
    pub fn deviation_coefficient(&self, b: &PauliString) -> Result<f64> {
        if b.is_identity() {
            return Err(Error::IdentityPauli);
        }
        self.expectation(b)
    }

    /// All deviation coefficients with `|a_b| > cutoff`.
    pub fn deviation(&self, cutoff: f64) -> DeviationView {
        let coefficients = PauliString::all(self.n)
            .skip(1)
            .filter_map(|b| {
                let a = pauli_trace(&b, &self.matrix).re;
                (a.abs() > cutoff).then_some((b, a))
            })
            .collect();
        DeviationView {
            n: self.n,
            coefficients,
        }
    }

    /// Row-major `re,im` pairs, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{:?},{:?}", z.re, z.im)
                })
                .collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }
}

impl PureState {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_range(n)?;
        let d = dim_of(n);
        if index >= d {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} >= {d}"
            )));
        }
        Ok(PureState {
            n,
            amps: crate::dense::basis_vector(d, index),
        })
    }

    pub fn from_amplitudes(amps: Vector) -> Result<Self> {
        let n = qubits_of(amps.len())?;
        check_range(n)?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > STATE_TOL.sqrt() {
            return Err(Error::Invariant(format!("state vector norm {norm}")));
        }
        Ok(PureState { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amps
    }

    pub fn apply_network(&mut self, net: &GateNetwork) -> Result<()> {
        if net.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: net.num_qubits(),
                right: self.n,
            });
        }
        net.apply(self.amps.as_mut_slice());
        Ok(())
    }

    pub fn apply_unitary(&mut self, u: &Matrix) -> Result<()> {
        if u.nrows() != self.amps.len() {
            return Err(Error::Dimension {
                expected: self.amps.len(),
                got: u.nrows(),
            });
        }
        self.amps = u * &self.amps;
        Ok(())
    }

    /// `<psi| sigma_a |psi>`.
    pub fn expectation(&self, a: &PauliString) -> Result<f64> {
        if a.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: a.num_qubits(),
                right: self.n,
            });
        }
        let mut tmp = vec![C64::new(0.0, 0.0); self.amps.len()];
        a.apply(self.amps.as_slice(), &mut tmp);
        Ok(self
            .amps
            .iter()
            .zip(&tmp)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .re)
    }

    pub fn density(&self) -> DensityState {
        DensityState {
            n: self.n,
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

impl DeviationView {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &BTreeMap<PauliString, f64> {
        &self.coefficients
    }

    pub fn get(&self, b: &PauliString) -> f64 {
        self.coefficients.get(b).copied().unwrap_or(0.0)
    }

    /// `(I + sum_b a_b sigma_b) / 2^n`.
    pub fn reconstruct(&self) -> Result<DensityState> {
        check_dense(self.n)?;
        let d = dim_of(self.n);
        let mut m = Matrix::identity(d, d);
        for (b, a) in &self.coefficients {
            m += b.matrix()? * C64::new(*a, 0.0);
        }
        m /= C64::new(d as f64, 0.0);
        Ok(DensityState {
            n: self.n,
            matrix: m,
        })
    }
}

pub fn init_dqcp(n: usize) -> Result<DensityState> {
    DensityState::init_dqcp(n)
}

pub fn init_dqc1(n: usize) -> Result<DensityState> {
    DensityState::init_dqc1(n)
}

pub fn apply_unitary(state: &DensityState, u: &Matrix) -> Result<DensityState> {
    state.apply_unitary(u)
}

pub fn expectation(state: &DensityState, a: &PauliString) -> Result<f64> {
    state.expectation(a)
}

pub fn deviation_coefficient(state: &DensityState, b: &PauliString) -> Result<f64> {
    state.deviation_coefficient(b)
}

/// Ascending eigenvalues of `H`, with multiplicity.
pub fn eigen_spectrum(h: &PauliSum) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(&h.matrix()?).0)
}

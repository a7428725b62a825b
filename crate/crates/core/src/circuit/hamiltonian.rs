use crate::circuit::{Gate, GateNetwork};
use crate::dense::{check_dense, dim_of, expm_hermitian, operator_norm, Matrix, C64};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Hermitian operator `sum_j c_j sigma_j` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum {
            n,
            terms: Vec::new(),
        }
    }

    /// Duplicate strings are merged into their first occurrence.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self> {
        let mut h = Self::new(n);
        for (c, s) in terms {
            h.add_term(c, s)?;
        }
        Ok(h)
    }

    pub fn add_term(&mut self, coefficient: f64, string: PauliString) -> Result<()> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {coefficient}"
            )));
        }
        if string.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: string.num_qubits(),
                right: self.n,
            });
        }
        match self.terms.iter_mut().find(|(_, s)| *s == string) {
            Some((c, _)) => *c += coefficient,
            None => self.terms.push((coefficient, string)),
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// `sum_j |c_j|`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Indices of terms acting on more than two qubits.
    pub fn locality_lint(&self) -> Vec<usize> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.weight() > 2)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn all_commute(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, (_, a))| {
            self.terms[i + 1..]
                .iter()
                .all(|(_, b)| a.commutes(b).expect("same size"))
        })
    }

    pub fn matrix(&self) -> Result<Matrix> {
        check_dense(self.n)?;
        let dim = dim_of(self.n);
        let mut h = Matrix::zeros(dim, dim);
        let mut col_in = vec![C64::new(0.0, 0.0); dim];
        let mut col_out = vec![C64::new(0.0, 0.0); dim];
        for (c, s) in &self.terms {
            for j in 0..dim {
                col_in.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
                col_in[j] = C64::new(1.0, 0.0);
                s.apply(&col_in, &mut col_out);
                for (r, v) in col_out.iter().enumerate() {
                    if *v != C64::new(0.0, 0.0) {
                        h[(r, j)] += v * *c;
                    }
                }
            }
        }
        Ok(h)
    }
}

/// First-order product formula: `steps` repetitions of `prod_j exp(-i c_j sigma_j t/steps)`
/// with the terms in input order. Identity terms contribute a global phase.
pub fn trotterize(h: &PauliSum, t: f64, steps: usize) -> Result<GateNetwork> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "trotter steps must be at least 1".into(),
        ));
    }
    let delta = t / steps as f64;
    let mut net = GateNetwork::new(h.n);
    for _ in 0..steps {
        for (c, s) in &h.terms {
            if s.is_identity() {
                net.add_global_phase(-c * delta);
            } else {
                net.push(Gate::rotation(s.clone(), c * delta)?)?;
            }
        }
    }
    Ok(net)
}

/// Operator-norm distance between `trotterize(h, t, steps)` and `exp(-i H t)`.
pub fn trotter_error(h: &PauliSum, t: f64, steps: usize) -> Result<f64> {
    let approx = trotterize(h, t, steps)?.unitary()?;
    Ok(operator_norm(&(approx - expm_hermitian(&h.matrix()?, t))))
}

/// Network on `n + 1` qubits applying `U(t/2)` to qubits `2..=n+1` when qubit 1
/// reads 0 and `U(t/2)^dagger` when it reads 1, with `U(t) = exp(-i H t)`
/// approximated by `trotterize(H, t/2, steps)` on each branch.
///
/// Both branches share one step sequence, so every term becomes a single
/// rotation about `Z_1 sigma_j`: `Z_1` takes the value `+1` on the first branch
/// and `-1` on the second.
pub fn conditional_half_evolutions(h: &PauliSum, t: f64, steps: usize) -> Result<GateNetwork> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "trotter steps must be at least 1".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    let m = h.n + 1;
    let delta = t / 2.0 / steps as f64;
    let axes: Vec<(f64, PauliString)> = h
        .terms
        .iter()
        .map(|(c, s)| Ok((*c, s.embed(m, 1)?.with(1, Pauli::Z)?)))
        .collect::<Result<_>>()?;
    let mut net = GateNetwork::new(m);
    for _ in 0..steps {
        for (c, axis) in &axes {
            net.push(Gate::rotation(axis.clone(), c * delta)?)?;
        }
    }
    Ok(net)
}

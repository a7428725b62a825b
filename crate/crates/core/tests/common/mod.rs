//! Dense reference computations written without the library's fast paths.
#![allow(dead_code)]

use dqc::circuit::{Gate, GateNetwork, PauliSum};
use dqc::dense::{Matrix, C64};
use dqc::pauli::PauliString;
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn letter_matrix(ch: char) -> Matrix {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        other => panic!("bad letter {other}"),
    }
}

/// Kronecker product of the letters, qubit 1 leftmost.
pub fn pauli_dense(s: &PauliString) -> Matrix {
    s.to_string()
        .chars()
        .fold(DMatrix::identity(1, 1), |acc, ch| acc.kronecker(&letter_matrix(ch)))
}

pub fn identity(n: usize) -> Matrix {
    DMatrix::identity(1 << n, 1 << n)
}

/// `|v><v|` projector on qubit `q` of `n`, identity elsewhere.
pub fn projector(n: usize, q: usize, value: bool) -> Matrix {
    let mut p = DMatrix::zeros(2, 2);
    p[(usize::from(value), usize::from(value))] = c(1.0, 0.0);
    (1..=n).fold(DMatrix::identity(1, 1), |acc, k| {
        let f = if k == q { p.clone() } else { DMatrix::identity(2, 2) };
        acc.kronecker(&f)
    })
}

pub fn rotation_dense(axis: &PauliString, angle: f64) -> Matrix {
    let n = axis.num_qubits();
    identity(n) * c(angle.cos(), 0.0) - pauli_dense(axis) * c(0.0, angle.sin())
}

pub fn gate_dense(g: &Gate) -> Matrix {
    match g {
        Gate::PauliRotation { axis, angle } => rotation_dense(axis, *angle),
        Gate::ControlledPauliRotation { control, value, axis, angle } => {
            let n = axis.num_qubits();
            let on = projector(n, *control, *value);
            let off = projector(n, *control, !*value);
            &on * rotation_dense(axis, *angle) + off
        }
    }
}

/// `G_last ... G_1` times the global phase.
pub fn network_dense(net: &GateNetwork) -> Matrix {
    let n = net.num_qubits();
    let u = net
        .gates()
        .iter()
        .fold(identity(n), |acc, g| gate_dense(g) * acc);
    u * C64::from_polar(1.0, net.global_phase())
}

pub fn sum_dense(h: &PauliSum) -> Matrix {
    let n = h.num_qubits();
    h.terms()
        .iter()
        .fold(DMatrix::zeros(1 << n, 1 << n), |acc, (coef, s)| acc + pauli_dense(s) * c(*coef, 0.0))
}

pub fn eigenvalues(h: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `exp(-i H t)` from the eigendecomposition.
pub fn expm(h: &Matrix, t: f64) -> Matrix {
    let e = h.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

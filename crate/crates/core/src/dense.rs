//! Dense linear-algebra helpers shared by the exact simulator and its oracles.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const DEFAULT_DENSE_LIMIT: usize = 12;

static DENSE_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_DENSE_LIMIT);

/// Largest qubit count for which dense matrices are formed.
pub fn dense_limit() -> usize {
    DENSE_LIMIT.load(Ordering::Relaxed)
}

pub fn set_dense_limit(n: usize) {
    DENSE_LIMIT.store(n, Ordering::Relaxed);
}

pub fn check_dense(n: usize) -> Result<()> {
    let limit = dense_limit();
    if n > limit {
        return Err(Error::DenseLimit { n, limit });
    }
    Ok(())
}

pub fn dim_of(n: usize) -> usize {
    1usize << n
}

/// Qubit count for a square matrix of power-of-two size.
pub fn qubits_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Frobenius norm of `U^dagger U - I`.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    let dim = u.nrows();
    (u.adjoint() * u - Matrix::identity(dim, dim)).norm()
}

pub fn hermiticity_defect(m: &Matrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `A (x) B` with `A` as the leftmost factor.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// `U (x) I` acting on the leading qubits of an `m`-qubit register.
pub fn embed_leading(u: &Matrix, m: usize) -> Result<Matrix> {
    let n = qubits_of(u.nrows())?;
    if n > m {
        return Err(Error::SizeMismatch { left: n, right: m });
    }
    let anc = dim_of(m - n);
    Ok(kron(u, &Matrix::identity(anc, anc)))
}

/// Replaces `target` with `(U (x) I) target`, where `U` acts on the leading
/// `n` qubits of the `m`-qubit row space.
pub fn apply_leading_left(u: &Matrix, target: &mut Matrix) -> Result<()> {
    let du = u.nrows();
    let dt = target.nrows();
    if dt % du != 0 {
        return Err(Error::Dimension {
            expected: du,
            got: dt,
        });
    }
    let anc = dt / du;
    if anc == 1 {
        *target = u * &*target;
        return Ok(());
    }
    let cols = target.ncols();
    // gather rows i * anc + a into column a + anc * c of a du-row matrix
    let gathered = Matrix::from_fn(du, anc * cols, |i, j| target[(i * anc + j % anc, j / anc)]);
    let product = u * gathered;
    for j in 0..anc * cols {
        for i in 0..du {
            target[(i * anc + j % anc, j / anc)] = product[(i, j)];
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(h.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// `exp(-i H t)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &Matrix, t: f64) -> Matrix {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = Vector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, -l * t)),
    );
    let scaled = Matrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, c)] * phases[c]);
    scaled * vecs.adjoint()
}

/// Spectral (operator 2-) norm.
pub fn operator_norm(m: &Matrix) -> f64 {
    let gram = m.adjoint() * m;
    let (vals, _) = hermitian_eigen(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Smallest `|A - e^{i phi} B|_F` over global phases `phi`.
pub fn distance_up_to_phase(a: &Matrix, b: &Matrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix the column phases so the distribution is Haar
    Matrix::from_fn(dim, dim, |i, j| {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q[(i, j)] * ph
    })
}

pub fn basis_vector(dim: usize, index: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[index] = C64::new(1.0, 0.0);
    v
}

//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance below which a Gram eigenvalue counts as zero.
pub const GRAM_TOLERANCE: f64 = 1e-10;

/// Condition number above which whitening switches from Cholesky to an
/// eigendecomposition of the reference Gram.
pub const CHOLESKY_CONDITION_LIMIT: f64 = 1e8;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    if m.nrows() == 2 {
        // closed form; avoids the iterative solver in the hottest loop
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        return vec![mean - rad, mean + rad];
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Extremal eigenvalues of a Hermitian matrix.
pub fn hermitian_extremes(m: &CMatrix) -> (f64, f64) {
    let ev = hermitian_eigenvalues(m);
    (ev[0], ev[ev.len() - 1])
}

/// Maps a Hermitian positive definite reference Gram `B` to a whitening
/// factor `W` with `W B W^H = I`, so that the pencil `(A, B)` has the same
/// eigenvalues as `W A W^H`.
#[derive(Debug, Clone)]
pub enum Whitener {
    Identity,
    Factor(CMatrix),
}

impl Whitener {
    pub fn new(reference: &CMatrix) -> Result<Self> {
        let n = reference.nrows();
        if is_identity(reference, 1e-13) {
            return Ok(Whitener::Identity);
        }
        let (lo, hi) = hermitian_extremes(reference);
        if hi <= 0.0 || lo <= GRAM_TOLERANCE * hi {
            return Err(Error::Conditioning(format!(
                "reference Gram eigenvalues in [{lo:e}, {hi:e}]"
            )));
        }
        if hi / lo < CHOLESKY_CONDITION_LIMIT {
            if let Some(chol) = Cholesky::new(reference.clone()) {
                let l = chol.l();
                if let Some(inv) = l.try_inverse() {
                    return Ok(Whitener::Factor(inv));
                }
            }
        }
        let eig = SymmetricEigen::new(reference.clone());
        let mut w = eig.eigenvectors.adjoint();
        for i in 0..n {
            let scale = 1.0 / eig.eigenvalues[i].sqrt();
            for j in 0..n {
                w[(i, j)] *= scale;
            }
        }
        Ok(Whitener::Factor(w))
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        match self {
            Whitener::Identity => a.clone(),
            Whitener::Factor(w) => w * a * w.adjoint(),
        }
    }
}

fn is_identity(m: &CMatrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| {
            (0..m.ncols()).all(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (m[(i, j)] - C64::new(target, 0.0)).norm() <= tol
            })
        })
}

/// Extremal generalized eigenvalues of the Hermitian pencil `(a, b)` with
/// `b` positive definite.
pub fn generalized_extremes(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64)> {
    let w = Whitener::new(b)?;
    Ok(hermitian_extremes(&w.apply(a)))
}

/// Minimum-norm least-squares solution of `a x ≈ y`.
pub fn lstsq_min_norm(a: &CMatrix, y: &CVector) -> CVector {
    if a.ncols() == 0 {
        return CVector::zeros(0);
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = f64::EPSILON * (a.nrows().max(a.ncols()) as f64) * smax;
    match svd.solve(y, eps.max(f64::MIN_POSITIVE)) {
        Ok(x) => x,
        Err(_) => CVector::zeros(a.ncols()),
    }
}

/// Principal submatrix on the index set `idx`.
pub fn principal(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Submatrix with the given rows and columns.
pub fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// `(1/len) Σ |z|²`.
pub fn mean_sq(z: &[C64]) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    z.iter().map(|c| c.norm_sqr()).sum::<f64>() / z.len() as f64
}

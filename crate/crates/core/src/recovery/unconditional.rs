//! Brute-force (u, D)-unconditional constant of a small Gram matrix.
//!
//! For disjoint `A` and `J` the largest value of
//! `‖Σ_A c_i φ_i‖ / dist(Σ_A c_i φ_i, V_J)` over coefficients is
//! `sqrt(λ_max(G_AA, S))` with `S = G_AA - G_AJ G_JJ⁺ G_JA`, so the maximum
//! over coefficients is computed exactly. Enlarging `J` can only shrink the
//! distance, so only `|J| = min(D - |A|, N - |A|)` is enumerated.

use serde::{Deserialize, Serialize};

use crate::combin::Combinations;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_extremes, principal, submatrix, CMatrix, Whitener};

/// Largest dictionary handled by exhaustive enumeration.
pub const UP_SCOPE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpEstimate {
    pub u: usize,
    pub d: usize,
    /// `U`; infinite when some `φ_A` lies in some `V_J`.
    pub value: f64,
    pub witness_a: Vec<usize>,
    pub witness_j: Vec<usize>,
}

fn pair_constant(gram: &CMatrix, a: &[usize], j: &[usize]) -> f64 {
    if j.is_empty() {
        return 1.0;
    }
    let gaa = principal(gram, a);
    let gaj = submatrix(gram, a, j);
    let gjj = principal(gram, j);
    let scale = hermitian_extremes(&gjj).1.max(f64::MIN_POSITIVE);
    let pinv = gjj
        .pseudo_inverse(1e-12 * scale)
        .expect("tolerance is nonnegative");
    let schur = &gaa - &gaj * pinv * gaj.adjoint();
    let schur = (&schur + schur.adjoint()) * crate::linalg::C64::new(0.5, 0.0);
    match Whitener::new(&schur) {
        Ok(w) => hermitian_extremes(&w.apply(&gaa)).1.max(1.0).sqrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Exact UP constant of the system with Gram matrix `gram`.
pub fn up_constant(gram: &CMatrix, u: usize, d: usize) -> Result<UpEstimate> {
    let n = gram.nrows();
    if n > UP_SCOPE {
        return Err(Error::SizeLimit {
            size: n as u128,
            cap: UP_SCOPE as u128,
        });
    }
    if gram.ncols() != n {
        return Err(Error::InvalidParameter("Gram matrix must be square".into()));
    }
    if !(1 <= u && u <= d && d <= n) {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ u ≤ D ≤ N, got u = {u}, D = {d}, N = {n}"
        )));
    }
    let mut best = UpEstimate {
        u,
        d,
        value: 0.0,
        witness_a: Vec::new(),
        witness_j: Vec::new(),
    };
    for size_a in 1..=u {
        let size_j = (d - size_a).min(n - size_a);
        for a in Combinations::new(n, size_a) {
            let rest: Vec<usize> = (0..n).filter(|i| !a.contains(i)).collect();
            for pick in Combinations::new(rest.len(), size_j) {
                let j: Vec<usize> = pick.iter().map(|&p| rest[p]).collect();
                let value = pair_constant(gram, &a, &j);
                if value > best.value {
                    best.value = value;
                    best.witness_a = a.clone();
                    best.witness_j = j;
                }
                if best.value.is_infinite() {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Dictionary;
    use crate::linalg::C64;

    #[test]
    fn orthonormal_is_one() {
        let g = CMatrix::identity(6, 6);
        let r = up_constant(&g, 2, 5).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(up_constant(&g, 1, 1).unwrap().value, 1.0);
    }

    #[test]
    fn riesz_system_bound() {
        let sums = vec![
            vec![(vec![0], C64::new(1.0, 0.0)), (vec![1], C64::new(0.3, 0.0))],
            vec![(vec![1], C64::new(1.0, 0.0)), (vec![2], C64::new(0.0, 0.2))],
            vec![(vec![2], C64::new(1.0, 0.0))],
            vec![(vec![3], C64::new(0.8, 0.0)), (vec![0], C64::new(0.1, 0.0))],
            vec![(vec![4], C64::new(1.1, 0.0)), (vec![3], C64::new(-0.25, 0.0))],
        ];
        let d = Dictionary::from_trig_sums(1, sums).unwrap();
        let rb = d.riesz_bounds().unwrap();
        let r = up_constant(&d.full_gram(), 2, 5).unwrap();
        assert!(r.value > 1.0);
        assert!(r.value <= rb.r2 / rb.r1 + 1e-6);
    }

    #[test]
    fn dependent_atoms_are_unbounded() {
        let sums = vec![
            vec![(vec![0], C64::new(1.0, 0.0))],
            vec![(vec![0], C64::new(2.0, 0.0))],
            vec![(vec![1], C64::new(1.0, 0.0))],
        ];
        let d = Dictionary::from_trig_sums(1, sums).unwrap();
        assert!(up_constant(&d.full_gram(), 1, 2).unwrap().value.is_infinite());
    }

    #[test]
    fn scope_and_parameters() {
        assert!(up_constant(&CMatrix::identity(11, 11), 1, 2).unwrap_err().is_cap());
        assert!(up_constant(&CMatrix::identity(4, 4), 3, 2).is_err());
    }
}

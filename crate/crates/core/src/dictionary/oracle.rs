//! Brute-force best v-term approximation `σ_v(f, 𝒟_N)_X`.

use serde::{Deserialize, Serialize};

use super::{Dictionary, Evaluable, Quadrature};
use crate::combin::{check_cap, fold_supports};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_min_norm, principal, CMatrix, CVector, C64};
use crate::sampling::PointSet;

/// What is being approximated.
#[derive(Clone, Copy)]
pub enum OracleTarget<'a> {
    /// Dense coefficient vector of length `N` over the dictionary.
    Coefficients(&'a [C64]),
    /// A black-box function.
    Function(&'a dyn Evaluable),
}

/// Norm in which the error is measured.
#[derive(Debug, Clone, Copy)]
pub enum OracleNorm<'a> {
    /// `L₂(Ω, μ)`: exact through the Gram matrix for coefficient targets,
    /// the reference rule for black-box targets.
    ContinuousL2(&'a Quadrature),
    /// `L₂(Ω_m, μ_m)` on a point set.
    Discrete(&'a PointSet),
    /// Sup norm on the reference nodes, via Lawson's iteratively reweighted
    /// least squares. The result is an estimate (an upper bound on the grid
    /// minimax error for each support).
    Sup(&'a Quadrature),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestTerm {
    pub support: Vec<usize>,
    pub coefficients: Vec<C64>,
    pub error: f64,
    /// True when the error is an iterative estimate rather than a minimum.
    pub estimate: bool,
}

type Candidate = Option<(f64, Vec<usize>, Vec<C64>)>;

fn keep_better(acc: Candidate, err: f64, support: &[usize], x: Vec<C64>) -> Candidate {
    match acc {
        Some((best, ..)) if best <= err => acc,
        _ => Some((err, support.to_vec(), x)),
    }
}

fn merge(a: Candidate, b: Candidate) -> Candidate {
    match (&a, &b) {
        (Some((ea, ..)), Some((eb, ..))) if eb < ea => b,
        (None, _) => b,
        _ => a,
    }
}

/// Exhaustive minimum over supports of size `v`; ties go to the
/// lexicographically first support.
pub fn best_v_term(
    target: OracleTarget<'_>,
    v: usize,
    dict: &Dictionary,
    norm: OracleNorm<'_>,
    cap: u128,
) -> Result<BestTerm> {
    let n = dict.len();
    if v > n {
        return Err(Error::InvalidParameter(format!("v = {v} exceeds N = {n}")));
    }
    if let OracleTarget::Coefficients(c) = target {
        if c.len() != n {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector has length {}, dictionary has {n} atoms",
                c.len()
            )));
        }
    }
    check_cap(n, v, cap)?;

    if let (OracleTarget::Coefficients(c), OracleNorm::ContinuousL2(_)) = (target, norm) {
        return Ok(exact_l2(c, v, dict));
    }

    let (nodes, estimate) = match norm {
        OracleNorm::ContinuousL2(q) => (q.nodes(&dict.domain())?, false),
        OracleNorm::Sup(q) => (q.nodes(&dict.domain())?, true),
        OracleNorm::Discrete(xi) => {
            if xi.domain() != dict.domain() {
                return Err(Error::DomainMismatch(format!(
                    "points live on {:?}, dictionary on {:?}",
                    xi.domain(),
                    dict.domain()
                )));
            }
            (xi.points().to_vec(), false)
        }
    };
    let rows = crate::par::map_indexed(nodes.len(), |r| {
        (0..n).map(|i| dict.eval(i, &nodes[r])).collect::<Vec<C64>>()
    });
    let a = CMatrix::from_fn(nodes.len(), n, |r, i| rows[r][i]);
    let y = match target {
        OracleTarget::Coefficients(c) => &a * CVector::from_column_slice(c),
        OracleTarget::Function(f) => {
            let vals = crate::par::map_indexed(nodes.len(), |r| f.eval(&nodes[r]));
            CVector::from_vec(vals)
        }
    };
    let sup = estimate;
    let measure = |r: &CVector| -> f64 {
        if sup {
            r.iter().map(|z| z.norm()).fold(0.0, f64::max)
        } else {
            (r.norm_squared() / r.len() as f64).sqrt()
        }
    };
    if v == 0 {
        return Ok(BestTerm {
            support: Vec::new(),
            coefficients: Vec::new(),
            error: measure(&y),
            estimate: false,
        });
    }
    let best = fold_supports(
        n,
        v,
        None,
        |acc: Candidate, s| {
            let sub = a.select_columns(s);
            let (x, err) = if sup {
                chebyshev_fit(&sub, &y, 60)
            } else {
                let x = lstsq_min_norm(&sub, &y);
                let r = &y - &sub * &x;
                (x, measure(&r))
            };
            keep_better(acc, err, s, x.iter().copied().collect())
        },
        merge,
    );
    let (error, support, coefficients) = best.expect("at least one support");
    Ok(BestTerm {
        support,
        coefficients,
        error,
        estimate,
    })
}

fn exact_l2(c: &[C64], v: usize, dict: &Dictionary) -> BestTerm {
    let n = dict.len();
    if dict.is_orthonormal() {
        let best = fold_supports(
            n,
            v,
            None,
            |acc: Candidate, s| {
                let mut err2 = 0.0;
                let mut j = 0;
                for (i, ci) in c.iter().enumerate() {
                    if j < s.len() && s[j] == i {
                        j += 1;
                    } else {
                        err2 += ci.norm_sqr();
                    }
                }
                let x = s.iter().map(|&i| c[i]).collect();
                keep_better(acc, err2.sqrt(), s, x)
            },
            merge,
        );
        let (error, support, coefficients) = best.unwrap_or((
            c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            Vec::new(),
            Vec::new(),
        ));
        return BestTerm {
            support,
            coefficients,
            error,
            estimate: false,
        };
    }
    let g = dict.full_gram();
    let cv = CVector::from_column_slice(c);
    let gc = &g * &cv;
    let quad = |r: &CVector| (r.adjoint() * &g * r)[(0, 0)].re.max(0.0).sqrt();
    if v == 0 {
        return BestTerm {
            support: Vec::new(),
            coefficients: Vec::new(),
            error: quad(&cv),
            estimate: false,
        };
    }
    let best = fold_supports(
        n,
        v,
        None,
        |acc: Candidate, s| {
            let gjj = principal(&g, s);
            let b = CVector::from_iterator(s.len(), s.iter().map(|&i| gc[i]));
            let x = gjj.clone().cholesky().map(|ch| ch.solve(&b)).unwrap_or_else(|| {
                lstsq_min_norm(&gjj, &b)
            });
            let mut r = cv.clone();
            for (t, &i) in s.iter().enumerate() {
                r[i] -= x[t];
            }
            keep_better(acc, quad(&r), s, x.iter().copied().collect())
        },
        merge,
    );
    let (error, support, coefficients) = best.expect("at least one support");
    BestTerm {
        support,
        coefficients,
        error,
        estimate: false,
    }
}

/// Lawson's algorithm for the complex minimax fit `min_x max_r |y - a x|`.
/// Returns the best iterate and its maximal residual modulus.
pub fn chebyshev_fit(a: &CMatrix, y: &CVector, iterations: usize) -> (CVector, f64) {
    let rows = a.nrows();
    let mut w = vec![1.0 / rows as f64; rows];
    let mut best: Option<(CVector, f64)> = None;
    for _ in 0..iterations.max(1) {
        let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        let aw = CMatrix::from_fn(rows, a.ncols(), |r, c| a[(r, c)] * sw[r]);
        let yw = CVector::from_fn(rows, |r, _| y[r] * sw[r]);
        let x = lstsq_min_norm(&aw, &yw);
        let resid = y - a * &x;
        let e: Vec<f64> = resid.iter().map(|z| z.norm()).collect();
        let max = e.iter().copied().fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, b)| max < *b) {
            best = Some((x, max));
        }
        let total: f64 = w.iter().zip(&e).map(|(wi, ei)| wi * ei).sum();
        if total <= 0.0 {
            break;
        }
        for (wi, ei) in w.iter_mut().zip(&e) {
            *wi *= ei / total;
        }
    }
    best.expect("at least one iteration")
}

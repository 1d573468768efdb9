//! Greedy and least-squares recovery from point samples.
//!
//! All discrete inner products use the normalized counting measure on the
//! point set. Ties go to the lowest dictionary index.

mod block;
mod unconditional;

pub use block::{block_greedy, block_budget, wiener_instance, BlockGreedyResult, BlockStep, WienerInstance, WienerSpec};
pub use unconditional::{up_constant, UpEstimate};

use serde::{Deserialize, Serialize};

use crate::combin::{check_cap, fold_supports};
use crate::dictionary::{
    best_v_term, Dictionary, Evaluable, Expansion, OracleNorm, OracleTarget, Quadrature,
    SparseCoefficients,
};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_min_norm, mean_sq, CMatrix, CVector, C64};
use crate::sampling::{mixed_norm_from_parts, sample_matrix, PointSet, SampleMatrix};

/// Below this, a discrete norm is treated as zero when forming ratios.
pub const RATIO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WompConfig {
    /// Weakness parameter `t ∈ (0, 1]`; `t = 1` is plain OMP.
    pub weakness: f64,
    pub max_iterations: usize,
    /// Stop once the residual's discrete norm is at most this.
    pub stop_tolerance: f64,
}

impl Default for WompConfig {
    fn default() -> Self {
        Self {
            weakness: 1.0,
            max_iterations: usize::MAX,
            stop_tolerance: 1e-12,
        }
    }
}

impl WompConfig {
    pub fn omp(max_iterations: usize) -> Self {
        Self {
            max_iterations,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.weakness > 0.0 && self.weakness <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weakness must lie in (0, 1], got {}",
                self.weakness
            )));
        }
        if !(self.stop_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("stop tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WompTrace {
    /// Selected indices in selection order.
    pub selected: Vec<usize>,
    /// Residual discrete norms; entry 0 is the norm of the data.
    pub residual_norms: Vec<f64>,
    /// Coefficients on `selected`, in selection order.
    pub coefficients: Vec<C64>,
}

impl WompTrace {
    pub fn iterations(&self) -> usize {
        self.selected.len()
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("trace records the initial residual")
    }

    /// The approximant as sorted sparse coefficients over an `n`-atom dictionary.
    pub fn approximant(&self, n: usize) -> Result<SparseCoefficients> {
        let mut pairs: Vec<(usize, C64)> =
            self.selected.iter().copied().zip(self.coefficients.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        let (s, c) = pairs.into_iter().unzip();
        SparseCoefficients::new(s, c, n)
    }

    /// CSV rows `iteration,index,residual`; row 0 has an empty index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,index,residual\n");
        for (k, r) in self.residual_norms.iter().enumerate() {
            let idx = if k == 0 { String::new() } else { self.selected[k - 1].to_string() };
            out.push_str(&format!("{k},{idx},{r:e}\n"));
        }
        out
    }
}

struct Greedy {
    selected: Vec<usize>,
    coefficients: Vec<C64>,
    residual_norms: Vec<f64>,
}

/// Weak orthogonal greedy selection on the columns of `a` in the Euclidean
/// inner product. `col_norms[i] = 0` excludes column `i`. Projections are
/// maintained by twice-orthogonalized Gram–Schmidt; final coefficients come
/// from one least-squares solve on the selected columns.
fn greedy_projection(
    a: &CMatrix,
    y: &CVector,
    col_norms: &[f64],
    weakness: f64,
    max_iterations: usize,
    tolerance: f64,
) -> Greedy {
    let mut r = y.clone();
    let mut norms = vec![r.norm()];
    let mut selected: Vec<usize> = Vec::new();
    let mut basis: Vec<CVector> = Vec::new();
    let mut taken = vec![false; a.ncols()];
    while selected.len() < max_iterations && norms[norms.len() - 1] > tolerance {
        let rn = norms[norms.len() - 1];
        let corr = a.ad_mul(&r);
        let score = |i: usize| corr[i].norm() / col_norms[i];
        let eligible = (0..a.ncols()).filter(|&i| col_norms[i] > 0.0 && !taken[i]);
        let best = eligible.clone().map(score).fold(0.0, f64::max);
        if best <= 1e-13 * rn {
            break;
        }
        let pick = if weakness >= 1.0 {
            eligible.clone().find(|&i| score(i) == best)
        } else {
            eligible.clone().find(|&i| score(i) >= weakness * best)
        }
        .expect("the maximum is attained");
        let mut w = a.column(pick).into_owned();
        let w0 = w.norm();
        for _ in 0..2 {
            for q in &basis {
                let h = q.dotc(&w);
                w -= q * h;
            }
        }
        let wn = w.norm();
        if wn <= 1e-12 * w0 {
            break;
        }
        let q = w / C64::new(wn, 0.0);
        let h = q.dotc(&r);
        r -= &q * h;
        basis.push(q);
        taken[pick] = true;
        selected.push(pick);
        norms.push(r.norm());
    }
    let coefficients = if selected.is_empty() {
        Vec::new()
    } else {
        lstsq_min_norm(&a.select_columns(&selected), y).iter().copied().collect()
    };
    Greedy {
        selected,
        coefficients,
        residual_norms: norms,
    }
}

fn euclidean_column_norms(a: &CMatrix) -> Vec<f64> {
    (0..a.ncols()).map(|i| a.column(i).norm()).collect()
}

/// WOMP in `L₂(Ω_m, μ_m)` on the sample matrix `Φ` with data `y`.
pub fn womp_run(phi: &SampleMatrix, y: &[C64], cfg: &WompConfig) -> Result<WompTrace> {
    cfg.validate()?;
    let m = phi.rows();
    if m == 0 {
        return Err(Error::InvalidParameter("WOMP needs at least one point".into()));
    }
    if y.len() != m {
        return Err(Error::InvalidParameter(format!(
            "{} samples for {m} points",
            y.len()
        )));
    }
    let norms = euclidean_column_norms(phi.matrix());
    if norms.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateDictionary);
    }
    let scale = (m as f64).sqrt();
    let g = greedy_projection(
        phi.matrix(),
        &CVector::from_column_slice(y),
        &norms,
        cfg.weakness,
        cfg.max_iterations,
        cfg.stop_tolerance * scale,
    );
    Ok(WompTrace {
        selected: g.selected,
        residual_norms: g.residual_norms.into_iter().map(|r| r / scale).collect(),
        coefficients: g.coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsFit {
    pub support: Vec<usize>,
    pub coefficients: Vec<C64>,
    /// Discrete norm of the residual at the points.
    pub residual: f64,
}

/// Discrete least squares on the columns `support` (minimum-norm solution
/// when rank deficient).
pub fn ls_fit(phi: &SampleMatrix, y: &[C64], support: &[usize]) -> Result<LsFit> {
    if phi.rows() == 0 {
        return Err(Error::InvalidParameter("least squares needs at least one point".into()));
    }
    if y.len() != phi.rows() {
        return Err(Error::InvalidParameter(format!(
            "{} samples for {} points",
            y.len(),
            phi.rows()
        )));
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= phi.cols()) {
        return Err(Error::InvalidParameter(format!("index {bad} outside the dictionary")));
    }
    let yv = CVector::from_column_slice(y);
    let a = phi.matrix().select_columns(support);
    let c = lstsq_min_norm(&a, &yv);
    let r: Vec<C64> = (&yv - &a * &c).iter().copied().collect();
    Ok(LsFit {
        support: support.to_vec(),
        coefficients: c.iter().copied().collect(),
        residual: mean_sq(&r).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub approximant: SparseCoefficients,
    pub discrete_error: f64,
    pub continuous_error: f64,
    /// Error in `L₂(μ_ξ)`, `μ_ξ = μ/2 + (1/2m) Σ δ_{ξ^j}`.
    pub mixed_error: f64,
}

/// Evaluates all three error norms of `f - g` for `g = Σ approx_i φ_i`.
pub fn recovery_errors(
    f: &dyn Evaluable,
    dict: &Dictionary,
    approximant: SparseCoefficients,
    xi: &PointSet,
    quad: &Quadrature,
) -> Result<RecoveryResult> {
    let g = Expansion {
        dict,
        coeffs: &approximant,
    };
    let diff = |x: &[f64]| f.eval(x) - g.eval(x);
    let cont_sq = mean_sq(&quad.sample(&diff, &dict.domain())?);
    let samples = xi.sample(&diff);
    Ok(RecoveryResult {
        discrete_error: mean_sq(&samples).sqrt(),
        continuous_error: cont_sq.sqrt(),
        mixed_error: mixed_norm_from_parts(cont_sq, &samples),
        approximant,
    })
}

/// Nonlinear least squares over `𝒳_v`: fits every support of size `v` at the
/// points and keeps the fit with the smallest continuous `L₂` error.
pub fn ls_universal(
    f: &dyn Evaluable,
    dict: &Dictionary,
    v: usize,
    xi: &PointSet,
    quad: &Quadrature,
    cap: u128,
) -> Result<RecoveryResult> {
    let n = dict.len();
    if v > n {
        return Err(Error::InvalidParameter(format!("v = {v} exceeds N = {n}")));
    }
    check_cap(n, v, cap)?;
    if xi.is_empty() {
        return Err(Error::InvalidParameter("least squares needs at least one point".into()));
    }
    if v == 0 {
        return recovery_errors(f, dict, SparseCoefficients::new(vec![], vec![], n)?, xi, quad);
    }
    let phi = sample_matrix(dict, xi)?;
    let y = CVector::from_vec(xi.sample(f));
    // ‖f - Σ c_i φ_i‖² = ‖f‖² - 2 Re c^H b + c^H G c with b_i = ⟨φ_i, f⟩.
    let nodes = quad.nodes(&dict.domain())?;
    let fq = crate::par::map_indexed(nodes.len(), |r| f.eval(&nodes[r]));
    let f_sq = mean_sq(&fq);
    let b: Vec<C64> = crate::par::map_indexed(n, |i| {
        nodes.iter().zip(&fq).map(|(x, fx)| dict.eval(i, x).conj() * fx).sum::<C64>()
            / nodes.len() as f64
    });
    let best = fold_supports(
        n,
        v,
        None::<(f64, Vec<usize>, Vec<C64>)>,
        |acc, s| {
            let c = lstsq_min_norm(&phi.matrix().select_columns(s), &y);
            let bs = CVector::from_iterator(s.len(), s.iter().map(|&i| b[i]));
            let quad_form = (c.adjoint() * dict.gram(s) * &c)[(0, 0)].re;
            let err = (f_sq - 2.0 * c.dotc(&bs).re + quad_form).max(0.0);
            match acc {
                Some((e, ..)) if e <= err => acc,
                _ => Some((err, s.to_vec(), c.iter().copied().collect())),
            }
        },
        |a, b| match (&a, &b) {
            (Some((ea, ..)), Some((eb, ..))) if eb < ea => b,
            (None, _) => b,
            _ => a,
        },
    );
    let (_, support, coeffs) = best.expect("at least one support");
    recovery_errors(f, dict, SparseCoefficients::new(support, coeffs, n)?, xi, quad)
}

/// `num / den`, with `0/0 = 1` below [`RATIO_FLOOR`].
pub fn safe_ratio(num: f64, den: f64) -> f64 {
    if den > RATIO_FLOOR {
        num / den
    } else if num <= RATIO_FLOOR {
        1.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueConfig {
    pub weakness: f64,
    /// Reference rule for continuous norms.
    pub quadrature: Quadrature,
    /// Also estimate `σ_v(f₀)_∞` on the reference nodes (expensive).
    pub sup_reference: bool,
    pub cap: u128,
}

impl Default for LebesgueConfig {
    fn default() -> Self {
        Self {
            weakness: 1.0,
            quadrature: Quadrature::new(1024),
            sup_reference: false,
            cap: crate::combin::DEFAULT_SUPPORT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueReport {
    pub v: usize,
    pub c: usize,
    pub iterations: usize,
    pub trace: WompTrace,
    pub residual_discrete: f64,
    pub sigma_discrete: f64,
    pub ratio_discrete: f64,
    pub residual_continuous: f64,
    /// Estimated best v-term error in the grid sup norm.
    pub sigma_sup: Option<f64>,
    pub ratio_continuous: Option<f64>,
}

/// Runs `c·v` WOMP iterations on the samples of `f₀` and compares the
/// residual with the best v-term error.
pub fn lebesgue_report(
    f0: &dyn Evaluable,
    dict: &Dictionary,
    xi: &PointSet,
    v: usize,
    c: usize,
    cfg: &LebesgueConfig,
) -> Result<LebesgueReport> {
    let n = dict.len();
    if v > n {
        return Err(Error::InvalidParameter(format!("v = {v} exceeds N = {n}")));
    }
    let phi = sample_matrix(dict, xi)?;
    let y = xi.sample(f0);
    let iterations = c * v;
    let trace = womp_run(
        &phi,
        &y,
        &WompConfig {
            weakness: cfg.weakness,
            max_iterations: iterations,
            ..WompConfig::default()
        },
    )?;
    let sigma = best_v_term(OracleTarget::Function(f0), v, dict, OracleNorm::Discrete(xi), cfg.cap)?;
    let approx = trace.approximant(n)?;
    let errs = recovery_errors(f0, dict, approx, xi, &cfg.quadrature)?;
    let residual_discrete = trace.final_residual();
    let sigma_sup = if cfg.sup_reference {
        let s = best_v_term(
            OracleTarget::Function(f0),
            v,
            dict,
            OracleNorm::Sup(&cfg.quadrature),
            cfg.cap,
        )?;
        Some(s.error)
    } else {
        None
    };
    Ok(LebesgueReport {
        v,
        c,
        iterations,
        residual_discrete,
        sigma_discrete: sigma.error,
        ratio_discrete: safe_ratio(residual_discrete, sigma.error),
        residual_continuous: errs.continuous_error,
        ratio_continuous: sigma_sup.map(|s| safe_ratio(errs.continuous_error, s)),
        sigma_sup,
        trace,
    })
}

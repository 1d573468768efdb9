//! Failure certificates for the sine system on `[0, 1]`.
//!
//! Simultaneous Dirichlet approximation gives `1 ≤ k ≤ N` and integers `a_ν`
//! with `|kξ^ν - a_ν| ≤ N^{-1/m}`. Then `|s·sin(πkξ^ν)| ≤ sπN^{-1/m}` at every
//! point, so the discrete mean of `|φ_k|²` is at most `s²π²N^{-2/m}`, which
//! falls below `C1·‖φ_k‖₂² = C1·s²/2` once `N` is large relative to `m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dictionary::DomainKind;
use crate::error::{Error, Result};
use crate::sampling::PointSet;

/// Relative slack on the admissibility test `|kξ - a| ≤ N^{-1/m}`.
const ADMISSIBLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletWitness {
    pub k: u64,
    pub a: Vec<i64>,
    /// `max_ν |ξ^ν - a_ν/k|`.
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletResult {
    /// Smallest admissible `k`.
    pub admissible: DirichletWitness,
    /// Minimizer of the scaled error `max_ν |kξ^ν - a_ν| · N^{1/m}`.
    pub best_scaled: DirichletWitness,
    pub best_scaled_error: f64,
}

fn witness(xi: &[f64], k: u64) -> (DirichletWitness, f64) {
    let kf = k as f64;
    let a: Vec<i64> = xi.iter().map(|x| (kf * x).round() as i64).collect();
    let dev = xi
        .iter()
        .zip(&a)
        .map(|(x, &ai)| (kf * x - ai as f64).abs())
        .fold(0.0, f64::max);
    (
        DirichletWitness {
            k,
            a,
            max_error: dev / kf,
        },
        dev,
    )
}

/// Brute force over `k = 1..=N` with `a_ν = round(kξ^ν)`.
pub fn dirichlet_search(xi: &[f64], n: u64) -> Result<DirichletResult> {
    if n == 0 || xi.is_empty() {
        return Err(Error::InvalidParameter("need N ≥ 1 and at least one point".into()));
    }
    let bound = (n as f64).powf(-1.0 / xi.len() as f64);
    let mut admissible = None;
    let mut best: Option<(DirichletWitness, f64)> = None;
    for k in 1..=n {
        let (w, dev) = witness(xi, k);
        if admissible.is_none() && dev <= bound * (1.0 + ADMISSIBLE_SLACK) {
            admissible = Some(w.clone());
        }
        let scaled = dev / bound;
        if best.as_ref().is_none_or(|(_, s)| scaled < *s) {
            best = Some((w, scaled));
        }
    }
    let (best_scaled, best_scaled_error) = best.expect("k = 1 is always visited");
    let admissible = admissible.ok_or_else(|| {
        Error::InternalInconsistency(format!(
            "no k ≤ {n} meets the Dirichlet bound for {} points",
            xi.len()
        ))
    })?;
    Ok(DirichletResult {
        admissible,
        best_scaled,
        best_scaled_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The smallest admissible `k`, where the a-priori bound already fails `C1`.
    Bound,
    /// The scaled-error minimizer, where only exact evaluation fails `C1`.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCertificate {
    pub n: u64,
    pub points: Vec<f64>,
    pub k: u64,
    pub a: Vec<i64>,
    /// `|ξ^ν - a_ν/k|` per point.
    pub point_errors: Vec<f64>,
    /// `s²π²N^{-2/m}`.
    pub implied_bound: f64,
    /// `(1/m) Σ |s·sin(πkξ^ν)|²`.
    pub discrete_mean: f64,
    /// `‖φ_k‖₂² = s²/2`.
    pub norm_sq: f64,
    pub c1: f64,
    pub scale: f64,
    pub source: WitnessSource,
}

impl FailureCertificate {
    /// Recomputes the discrete mean from the stored points.
    pub fn recheck(&self) -> f64 {
        sine_mean(&self.points, self.k, self.scale)
    }
}

fn sine_mean(xi: &[f64], k: u64, scale: f64) -> f64 {
    let s2 = scale * scale;
    xi.iter()
        .map(|&x| {
            let t = (k as f64 * x).rem_euclid(2.0);
            s2 * (PI * t).sin().powi(2)
        })
        .sum::<f64>()
        / xi.len() as f64
}

/// Certificate that `ξ` does not give one-sided discretization with constant
/// `C1` on `𝒳_1` of the `N`-term sine system at scale `s`, or `None` if this
/// construction does not produce one.
pub fn sine_failure_certificate(
    xi: &PointSet,
    n: u64,
    c1: f64,
    scale: f64,
) -> Result<Option<FailureCertificate>> {
    if xi.domain().kind != DomainKind::UnitInterval {
        return Err(Error::DomainMismatch("the sine system lives on [0, 1]".into()));
    }
    if !(c1 > 0.0 && scale > 0.0) {
        return Err(Error::InvalidParameter("C1 and the scale must be positive".into()));
    }
    let points: Vec<f64> = xi.points().iter().map(|p| p[0]).collect();
    let m = points.len() as f64;
    let search = dirichlet_search(&points, n)?;
    let norm_sq = scale * scale / 2.0;
    let implied_bound = scale * scale * PI * PI * (n as f64).powf(-2.0 / m);
    let threshold = c1 * norm_sq;
    let (w, source) = if implied_bound < threshold {
        (search.admissible, WitnessSource::Bound)
    } else {
        (search.best_scaled, WitnessSource::Exact)
    };
    let discrete_mean = sine_mean(&points, w.k, scale);
    if source == WitnessSource::Bound && discrete_mean > implied_bound * (1.0 + 1e-9) {
        return Err(Error::InternalInconsistency(format!(
            "discrete mean {discrete_mean:e} exceeds the Dirichlet bound {implied_bound:e}"
        )));
    }
    if discrete_mean >= threshold {
        return Ok(None);
    }
    let point_errors = points
        .iter()
        .zip(&w.a)
        .map(|(x, &a)| (x - a as f64 / w.k as f64).abs())
        .collect();
    Ok(Some(FailureCertificate {
        n,
        points,
        k: w.k,
        a: w.a,
        point_errors,
        implied_bound,
        discrete_mean,
        norm_sq,
        c1,
        scale,
        source,
    }))
}

/// Smallest `m` for which the Dirichlet bound stops certifying failure,
/// `2 ln N / ln(s²π² / (C1·s²/2))`. The scale cancels; the result is
/// infinite when `2π² ≤ C1`.
pub fn min_m_threshold(n: u64, c1: f64, scale: f64) -> Result<f64> {
    if n == 0 || !(c1 > 0.0 && scale > 0.0) {
        return Err(Error::InvalidParameter("need N ≥ 1, C1 > 0 and s > 0".into()));
    }
    let s2 = scale * scale;
    let base = s2 * PI * PI / (c1 * s2 / 2.0);
    if base <= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (n as f64).ln() / base.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Domain;
    use crate::sampling::{draw_points, SamplingMode};

    fn points(v: &[f64]) -> PointSet {
        PointSet::explicit(Domain::unit_interval(), v.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn exact_rationals() {
        let r = dirichlet_search(&[1.0 / 3.0, 2.0 / 3.0], 9).unwrap();
        assert_eq!(r.best_scaled.k, 3);
        assert_eq!(r.best_scaled.a, vec![1, 2]);
        assert!(r.best_scaled.max_error < 1e-15);
        // k = 1 meets |kξ - a| ≤ 9^{-1/2} with equality.
        assert_eq!(r.admissible.k, 1);
    }

    #[test]
    fn half_point() {
        let r = dirichlet_search(&[0.5], 2).unwrap();
        assert_eq!(r.admissible.k, 1);
    }

    #[test]
    fn golden_ratio_fraction() {
        let x = 0.618_033_988_7;
        let r = dirichlet_search(&[x], 100).unwrap();
        let k = r.admissible.k as f64;
        assert!((x - r.admissible.a[0] as f64 / k).abs() <= 1.0 / (k * 100.0));
        let brute = (1..=100u64)
            .find(|&k| ((k as f64 * x) - (k as f64 * x).round()).abs() <= 0.01)
            .unwrap();
        assert_eq!(r.admissible.k, brute);
    }

    #[test]
    fn certificates_for_two_points() {
        for seed in 0..200 {
            let xi = draw_points(2, Domain::unit_interval(), SamplingMode::IidUniform, seed).unwrap();
            let c = sine_failure_certificate(&xi, 64, 0.5, 2f64.sqrt()).unwrap().unwrap();
            assert!(c.discrete_mean < 0.5 * c.norm_sq);
            assert!((c.recheck() - c.discrete_mean).abs() < 1e-12);
            assert!(c.k <= 64);
            assert_eq!(c.source, WitnessSource::Bound);
        }
    }

    #[test]
    fn exact_zero_example() {
        let c = sine_failure_certificate(&points(&[1.0 / 3.0, 2.0 / 3.0]), 9, 0.5, 2f64.sqrt())
            .unwrap()
            .unwrap();
        assert_eq!(c.k, 3);
        assert!(c.discrete_mean < 1e-28);
        assert_eq!(c.source, WitnessSource::Exact);
    }

    #[test]
    fn many_points_give_no_certificate() {
        let mid: Vec<f64> = (0..12).map(|j| (j as f64 + 0.5) / 12.0).collect();
        assert!(sine_failure_certificate(&points(&mid), 16, 0.5, 2f64.sqrt()).unwrap().is_none());
        // On the grid j/12 the atom sin(12πx) vanishes at every point.
        let xi = draw_points(12, Domain::unit_interval(), SamplingMode::Equispaced, 0).unwrap();
        let c = sine_failure_certificate(&xi, 16, 0.5, 2f64.sqrt()).unwrap().unwrap();
        assert_eq!((c.k, c.source), (12, WitnessSource::Exact));
    }

    #[test]
    fn thresholds() {
        let r2 = 2f64.sqrt();
        let t = min_m_threshold(64, 0.5, r2).unwrap();
        assert!((t - 64f64.ln() / (2.0 * PI).ln()).abs() < 1e-12);
        assert!((t - 2.263).abs() < 1e-3);
        assert!((min_m_threshold(64, 0.5, 0.3).unwrap() - t).abs() < 1e-12);
        assert!((min_m_threshold(6, 0.5, r2).unwrap() - 0.975).abs() < 1e-3);
        assert!(min_m_threshold(64, 1e-40, r2).unwrap() < 0.2);
        assert!(min_m_threshold(64, 100.0, r2).unwrap().is_infinite());
    }

    #[test]
    fn rejects_wrong_domain() {
        let xi = draw_points(2, Domain::torus(1), SamplingMode::IidUniform, 0).unwrap();
        assert!(sine_failure_certificate(&xi, 8, 0.5, 1.0).is_err());
    }
}

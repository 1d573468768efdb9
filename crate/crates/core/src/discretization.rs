//! Certificates for universal and one-sided sampling discretization, RIP
//! constants of the normalized column system, and Monte Carlo estimates of
//! how many random points suffice.
//!
//! For a support `J` the extremal ratios
//! `inf/sup_{f ∈ V_J} (1/m)Σ|f(ξ^j)|² / ‖f‖₂²` are the extremal eigenvalues
//! of the pencil (discrete Gram on `J`, continuous Gram on `J`). A point set
//! discretizes `𝒳_v` with constants `(C1, C2)` iff every support of size `v`
//! has its pencil spectrum inside `[C1, C2]`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, check_cap, fold_supports};
use crate::dictionary::{Dictionary, Quadrature};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_extremes, principal, CMatrix, Whitener, C64};
use crate::rng;
use crate::sampling::{draw_points_stream, sample_matrix, NormalizedSystem, PointSet, SamplingMode};

/// Relative slack before a support counts as violating a constant.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-10;

/// z-value of a two-sided 95% interval.
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    /// Supports sampled without replacement; the result is an estimate.
    Randomized { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub cap: u128,
    pub mode: CheckMode,
    /// How many per-support extremes to keep in the certificate.
    pub record_limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            cap: crate::combin::DEFAULT_SUPPORT_CAP,
            mode: CheckMode::Exhaustive,
            record_limit: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBounds {
    pub support: Vec<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CertificateStatus {
    Holds,
    Fails {
        witness: Vec<usize>,
        lambda_min: f64,
        lambda_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalCertificate {
    pub v: usize,
    /// Requested lower constant.
    pub c1: f64,
    /// Requested upper constant; `None` for a one-sided check.
    pub c2: Option<f64>,
    pub c1_global: f64,
    pub c2_global: f64,
    pub min_support: Vec<usize>,
    pub max_support: Vec<usize>,
    pub status: CertificateStatus,
    pub supports_checked: u128,
    pub mode: CheckMode,
    pub extremes: Vec<SupportBounds>,
}

impl UniversalCertificate {
    pub fn holds(&self) -> bool {
        matches!(self.status, CertificateStatus::Holds)
    }

    /// True when the result comes from sampled supports.
    pub fn is_estimate(&self) -> bool {
        matches!(self.mode, CheckMode::Randomized { .. })
    }
}

fn violates_low(lmin: f64, c1: f64) -> bool {
    lmin < c1 - CERTIFICATE_TOLERANCE * c1.abs().max(1.0)
}

fn violates_high(lmax: f64, c2: f64) -> bool {
    lmax > c2 + CERTIFICATE_TOLERANCE * c2.abs().max(1.0)
}

/// Precomputed discrete and continuous Grams for one (dictionary, point set)
/// pair.
#[derive(Debug, Clone)]
pub struct Discretizer<'a> {
    dict: &'a Dictionary,
    m: usize,
    discrete: CMatrix,
    continuous: Option<CMatrix>,
}

impl<'a> Discretizer<'a> {
    pub fn new(dict: &'a Dictionary, xi: &PointSet) -> Result<Self> {
        let s = sample_matrix(dict, xi)?;
        Ok(Self {
            dict,
            m: xi.len(),
            discrete: s.discrete_gram(),
            continuous: (!dict.is_orthonormal()).then(|| dict.full_gram()),
        })
    }

    pub fn dictionary(&self) -> &Dictionary {
        self.dict
    }

    pub fn discrete_gram(&self) -> &CMatrix {
        &self.discrete
    }

    /// `(λ_min, λ_max)` of the pencil on support `J`.
    pub fn bounds(&self, support: &[usize]) -> Result<(f64, f64)> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("support must be nonempty".into()));
        }
        let disc = principal(&self.discrete, support);
        let (lo, hi) = match &self.continuous {
            None => hermitian_extremes(&disc),
            Some(g) => {
                let w = Whitener::new(&principal(g, support))?;
                hermitian_extremes(&w.apply(&disc))
            }
        };
        let lo = if self.m < support.len() { 0.0 } else { lo.max(0.0) };
        Ok((lo, hi.max(lo)))
    }

    /// Checks every support of size `v` against `[c1, c2]` (`c2 = None`:
    /// lower constant only).
    pub fn check(
        &self,
        v: usize,
        c1: f64,
        c2: Option<f64>,
        opts: &CheckOptions,
    ) -> Result<UniversalCertificate> {
        let n = self.dict.len();
        if v == 0 || v > n {
            return Err(Error::InvalidParameter(format!("need 1 ≤ v ≤ N = {n}, got v = {v}")));
        }
        let visit = |mut acc: Acc, s: &[usize]| -> Acc {
            if acc.error.is_some() {
                return acc;
            }
            match self.bounds(s) {
                Ok((lo, hi)) => {
                    acc.count += 1;
                    if acc.min.as_ref().is_none_or(|(x, _)| lo < *x) {
                        acc.min = Some((lo, s.to_vec()));
                    }
                    if acc.max.as_ref().is_none_or(|(x, _)| hi > *x) {
                        acc.max = Some((hi, s.to_vec()));
                    }
                    let bad = violates_low(lo, c1) || c2.is_some_and(|c2| violates_high(hi, c2));
                    if bad && acc.fail.is_none() {
                        acc.fail = Some(SupportBounds {
                            support: s.to_vec(),
                            lambda_min: lo,
                            lambda_max: hi,
                        });
                    }
                    if acc.extremes.len() < opts.record_limit {
                        acc.extremes.push(SupportBounds {
                            support: s.to_vec(),
                            lambda_min: lo,
                            lambda_max: hi,
                        });
                    }
                }
                Err(e) => acc.error = Some(e),
            }
            acc
        };
        let acc = match opts.mode {
            CheckMode::Exhaustive => {
                check_cap(n, v, opts.cap)?;
                fold_supports(n, v, Acc::default(), visit, |a, b| a.merge(b, opts.record_limit))
            }
            CheckMode::Randomized { samples, seed } => {
                let supports = sample_supports(n, v, samples, seed);
                let parts = crate::par::map_indexed(supports.len(), |i| {
                    visit(Acc::default(), &supports[i])
                });
                parts
                    .into_iter()
                    .fold(Acc::default(), |a, b| a.merge(b, opts.record_limit))
            }
        };
        if let Some(e) = acc.error {
            return Err(e);
        }
        let (c1_global, min_support) = acc.min.expect("at least one support");
        let (c2_global, max_support) = acc.max.expect("at least one support");
        let status = match acc.fail {
            None => CertificateStatus::Holds,
            Some(f) => CertificateStatus::Fails {
                witness: f.support,
                lambda_min: f.lambda_min,
                lambda_max: f.lambda_max,
            },
        };
        Ok(UniversalCertificate {
            v,
            c1,
            c2,
            c1_global,
            c2_global,
            min_support,
            max_support,
            status,
            supports_checked: acc.count,
            mode: opts.mode,
            extremes: acc.extremes,
        })
    }
}

#[derive(Clone, Default)]
struct Acc {
    min: Option<(f64, Vec<usize>)>,
    max: Option<(f64, Vec<usize>)>,
    fail: Option<SupportBounds>,
    extremes: Vec<SupportBounds>,
    count: u128,
    error: Option<Error>,
}

impl Acc {
    /// `self` covers lower ranks than `other`.
    fn merge(mut self, other: Acc, limit: usize) -> Acc {
        if self.error.is_none() {
            self.error = other.error;
        }
        if let Some((x, s)) = other.min {
            if self.min.as_ref().is_none_or(|(y, _)| x < *y) {
                self.min = Some((x, s));
            }
        }
        if let Some((x, s)) = other.max {
            if self.max.as_ref().is_none_or(|(y, _)| x > *y) {
                self.max = Some((x, s));
            }
        }
        if self.fail.is_none() {
            self.fail = other.fail;
        }
        let room = limit.saturating_sub(self.extremes.len());
        self.extremes.extend(other.extremes.into_iter().take(room));
        self.count += other.count;
        self
    }
}

/// Up to `samples` distinct supports of size `v`, sorted lexicographically.
fn sample_supports(n: usize, v: usize, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let total = binomial(n, v);
    let want = (samples as u128).min(total) as usize;
    let mut r = rng::stream(seed, rng::AUX_STREAM_BASE);
    let mut set = BTreeSet::new();
    let mut pool: Vec<usize> = (0..n).collect();
    while set.len() < want {
        let (chosen, _) = pool.partial_shuffle(&mut r, v);
        let mut s = chosen.to_vec();
        s.sort_unstable();
        set.insert(s);
    }
    set.into_iter().collect()
}

/// Extremal ratio bounds for the single subspace `V_J`. `gram_ref` overrides
/// the dictionary's continuous Gram on `J`.
pub fn subspace_ratio_bounds(
    dict: &Dictionary,
    support: &[usize],
    xi: &PointSet,
    gram_ref: Option<&CMatrix>,
) -> Result<(f64, f64)> {
    let s = sample_matrix(dict, xi)?.matrix().select_columns(support);
    let m = xi.len() as f64;
    let disc = (s.adjoint() * &s) / C64::new(m, 0.0);
    let cont = gram_ref.cloned().unwrap_or_else(|| dict.gram(support));
    if cont.nrows() != support.len() {
        return Err(Error::InvalidParameter("reference Gram has the wrong size".into()));
    }
    let w = Whitener::new(&cont)?;
    let (lo, hi) = hermitian_extremes(&w.apply(&disc));
    let lo = if xi.len() < support.len() { 0.0 } else { lo.max(0.0) };
    Ok((lo, hi.max(lo)))
}

/// Two-sided universal discretization check for `𝒳_v(𝒟_N)`.
pub fn universal_check(
    dict: &Dictionary,
    v: usize,
    xi: &PointSet,
    c1: f64,
    c2: f64,
    opts: &CheckOptions,
) -> Result<UniversalCertificate> {
    if c1 > c2 {
        return Err(Error::InvalidParameter(format!("C1 = {c1} exceeds C2 = {c2}")));
    }
    Discretizer::new(dict, xi)?.check(v, c1, Some(c2), opts)
}

/// One-sided universal discretization: only `λ_min ≥ C1` is required.
pub fn one_sided_check(
    dict: &Dictionary,
    v: usize,
    xi: &PointSet,
    c1: f64,
    opts: &CheckOptions,
) -> Result<UniversalCertificate> {
    Discretizer::new(dict, xi)?.check(v, c1, None, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub v: usize,
    pub delta: f64,
    pub witness: Vec<usize>,
    /// The RIP ⟺ discretization equivalence needs an orthonormal dictionary.
    pub orthonormal_dictionary: bool,
}

impl RipReport {
    /// Recomputes `max(1 - λ_min, λ_max - 1)` on the witness support.
    pub fn recheck(&self, system: &NormalizedSystem) -> f64 {
        rip_of_support(&system.gram(), &self.witness)
    }
}

fn rip_of_support(gram: &CMatrix, s: &[usize]) -> f64 {
    let (lo, hi) = hermitian_extremes(&principal(gram, s));
    (1.0 - lo.max(0.0)).max(hi - 1.0)
}

/// Restricted isometry constant of order `v`.
pub fn rip_delta(system: &NormalizedSystem, v: usize, cap: u128) -> Result<RipReport> {
    let n = system.columns().ncols();
    if v == 0 || v > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ v ≤ N = {n}, got v = {v}")));
    }
    check_cap(n, v, cap)?;
    let gram = system.gram();
    let best = fold_supports(
        n,
        v,
        None::<(f64, Vec<usize>)>,
        |acc, s| {
            let d = rip_of_support(&gram, s);
            match acc {
                Some((x, _)) if x >= d => acc,
                _ => Some((d, s.to_vec())),
            }
        },
        |a, b| match (&a, &b) {
            (Some((x, _)), Some((y, _))) if y > x => b,
            (None, _) => b,
            _ => a,
        },
    );
    let (delta, witness) = best.expect("at least one support");
    Ok(RipReport {
        v,
        delta: delta.max(0.0),
        witness,
        orthonormal_dictionary: system.orthonormal_dictionary(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Parameters shared by the Monte Carlo routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub v: usize,
    pub c1: f64,
    pub c2: f64,
    pub trials: usize,
    pub seed: u64,
    pub cap: u128,
}

/// Fraction of `trials` iid draws of `m` points that discretize `𝒳_v` with
/// `(c1, c2)`. Trial `t` draws from stream `t` of `seed`.
pub fn success_probability(dict: &Dictionary, m: usize, spec: &TrialSpec) -> Result<SweepEntry> {
    if spec.v == 0 || spec.v > dict.len() {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ v ≤ N = {}, got v = {}",
            dict.len(),
            spec.v
        )));
    }
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    check_cap(dict.len(), spec.v, spec.cap)?;
    let opts = CheckOptions {
        cap: spec.cap,
        ..CheckOptions::default()
    };
    let outcomes = crate::par::map_indexed(spec.trials, |t| -> Result<bool> {
        let xi = draw_points_stream(m, dict.domain(), SamplingMode::IidUniform, spec.seed, t as u64)?;
        Ok(Discretizer::new(dict, &xi)?
            .check(spec.v, spec.c1, Some(spec.c2), &opts)?
            .holds())
    });
    let mut successes = 0;
    for o in outcomes {
        successes += usize::from(o?);
    }
    let (low, high) = wilson_interval(successes, spec.trials);
    Ok(SweepEntry {
        m,
        trials: spec.trials,
        successes,
        estimate: successes as f64 / spec.trials as f64,
        low,
        high,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMResult {
    pub m_hat: usize,
    pub target: f64,
    pub sweep: Vec<SweepEntry>,
}

/// Smallest `m` on a doubling-then-bisection schedule whose estimated
/// success probability reaches `target`.
pub fn empirical_min_m(
    dict: &Dictionary,
    spec: &TrialSpec,
    target: f64,
    max_m: usize,
) -> Result<MinMResult> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidParameter(format!("target probability {target} outside [0, 1]")));
    }
    let mut seen: BTreeMap<usize, SweepEntry> = BTreeMap::new();
    let mut eval = |m: usize| -> Result<f64> {
        if let Some(e) = seen.get(&m) {
            return Ok(e.estimate);
        }
        let e = success_probability(dict, m, spec)?;
        seen.insert(m, e);
        Ok(e.estimate)
    };
    let mut lo = 0;
    let mut m = 1;
    let hi = loop {
        if eval(m)? >= target {
            break m;
        }
        lo = m;
        if m >= max_m {
            return Err(Error::CapExceeded(format!(
                "no m ≤ {max_m} reached success probability {target}"
            )));
        }
        m = (2 * m).min(max_m);
    };
    let mut hi = hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MinMResult {
        m_hat: hi,
        target,
        sweep: seen.into_values().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpCheck {
    pub p: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

/// Sampled check of `(1/m)Σ|f(ξ^j)|^p / ‖f‖_p^p` over random elements of
/// `Σ_v` (complex Gaussian coefficients on random supports) and the
/// equal-coefficient family `v^{-1/2} Σ_{k∈J} φ_k`. An estimate, not a
/// certificate.
pub fn lp_check_randomized(
    dict: &Dictionary,
    v: usize,
    p: f64,
    xi: &PointSet,
    n_samples: usize,
    seed: u64,
    quad: &Quadrature,
) -> Result<LpCheck> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [1, 2], got {p}")));
    }
    let n = dict.len();
    if v == 0 || v > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ v ≤ N = {n}, got v = {v}")));
    }
    let phi = sample_matrix(dict, xi)?;
    let nodes = quad.nodes(&dict.domain())?;
    let structured = n_samples.div_ceil(4).max(1);
    let total = n_samples + structured;
    let ratios = crate::par::map_indexed(total, |s| {
        let mut r = rng::stream(seed, s as u64);
        let mut pool: Vec<usize> = (0..n).collect();
        let mut support: Vec<usize> = if s == n_samples {
            (0..v).collect()
        } else {
            pool.partial_shuffle(&mut r, v).0.to_vec()
        };
        support.sort_unstable();
        let coeffs: Vec<C64> = if s >= n_samples {
            vec![C64::new(1.0 / (v as f64).sqrt(), 0.0); v]
        } else {
            (0..v)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut r);
                    let im: f64 = StandardNormal.sample(&mut r);
                    C64::new(re, im)
                })
                .collect()
        };
        let eval = |x: &[f64]| -> C64 {
            support.iter().zip(&coeffs).map(|(&i, c)| c * dict.eval(i, x)).sum()
        };
        let disc: f64 = (0..xi.len())
            .map(|j| {
                let z: C64 = support.iter().zip(&coeffs).map(|(&i, c)| c * phi.matrix()[(j, i)]).sum();
                z.norm().powf(p)
            })
            .sum::<f64>()
            / xi.len() as f64;
        let cont = if p == 2.0 {
            let c = nalgebra::DVector::from_column_slice(&coeffs);
            (c.adjoint() * dict.gram(&support) * &c)[(0, 0)].re
        } else {
            nodes.iter().map(|x| eval(x).norm().powf(p)).sum::<f64>() / nodes.len() as f64
        };
        disc / cont
    });
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LpCheck {
        p,
        min_ratio,
        max_ratio,
        samples: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::DEFAULT_SIZE_CAP;
    use crate::sampling::draw_points;

    fn trig5() -> Dictionary {
        Dictionary::trig(2, 1, DEFAULT_SIZE_CAP).unwrap()
    }

    fn equispaced(m: usize) -> PointSet {
        draw_points(m, crate::dictionary::Domain::torus(1), SamplingMode::Equispaced, 0).unwrap()
    }

    #[test]
    fn exact_quadrature_bounds() {
        let d = trig5();
        let (lo, hi) = subspace_ratio_bounds(&d, &[0, 1, 2, 3, 4], &equispaced(5), None).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_gives_zero_lower_bound() {
        let d = trig5();
        let (lo, _) = subspace_ratio_bounds(&d, &[0, 1, 2], &equispaced(2), None).unwrap();
        assert_eq!(lo, 0.0);
        let xi = PointSet::explicit(d.domain(), vec![vec![1.0]]).unwrap();
        let cert = universal_check(&d, 2, &xi, 0.5, 1.5, &CheckOptions::default()).unwrap();
        assert!(!cert.holds());
        let cert = one_sided_check(&d, 2, &xi, 0.5, &CheckOptions::default()).unwrap();
        assert!(!cert.holds());
    }

    #[test]
    fn constant_dictionary_is_always_discretized() {
        let d = Dictionary::trig(0, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(3, d.domain(), SamplingMode::IidUniform, 1).unwrap();
        let (lo, hi) = subspace_ratio_bounds(&d, &[0], &xi, None).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let cert = universal_check(&d, 1, &xi, 0.5, 1.5, &CheckOptions::default()).unwrap();
        assert!(cert.holds());
        assert!((cert.c1_global - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equispaced_exact_case_certifies_every_v() {
        let d = trig5();
        for v in 1..=5 {
            let c = universal_check(&d, v, &equispaced(5), 0.5, 1.5, &CheckOptions::default()).unwrap();
            assert!(c.holds());
            assert!((c.c1_global - 1.0).abs() < 1e-10 && (c.c2_global - 1.0).abs() < 1e-10);
            let o = one_sided_check(&d, v, &equispaced(5), 1.0, &CheckOptions::default()).unwrap();
            assert!(o.holds());
        }
    }

    #[test]
    fn failing_witness_reproduces_violation() {
        let d = Dictionary::trig(4, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(6, d.domain(), SamplingMode::IidUniform, 4).unwrap();
        let cert = universal_check(&d, 3, &xi, 0.5, 1.5, &CheckOptions::default()).unwrap();
        let CertificateStatus::Fails { witness, .. } = &cert.status else {
            panic!("6 random points cannot discretize 3-sparse spans of 9 exponentials");
        };
        let (lo, hi) = subspace_ratio_bounds(&d, witness, &xi, None).unwrap();
        assert!(lo < 0.5 || hi > 1.5);
        assert!(cert.c1_global <= cert.c2_global);
    }

    #[test]
    fn monotone_in_v_and_invariant_under_duplication() {
        let d = Dictionary::trig(3, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(15, d.domain(), SamplingMode::IidUniform, 21).unwrap();
        let opts = CheckOptions::default();
        let mut prev: Option<UniversalCertificate> = None;
        for v in 1..=7 {
            let c = universal_check(&d, v, &xi, 0.5, 1.5, &opts).unwrap();
            let dup = universal_check(&d, v, &xi.duplicated(), 0.5, 1.5, &opts).unwrap();
            assert!((c.c1_global - dup.c1_global).abs() < 1e-12);
            assert!((c.c2_global - dup.c2_global).abs() < 1e-12);
            assert_eq!(c.holds(), dup.holds());
            if let Some(p) = prev {
                assert!(c.c1_global <= p.c1_global + 1e-12);
                assert!(c.c2_global >= p.c2_global - 1e-12);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn non_orthonormal_dictionary_uses_the_pencil() {
        let d = trig5().scaled(2.0);
        let c = universal_check(&d, 2, &equispaced(5), 0.5, 1.5, &CheckOptions::default()).unwrap();
        assert!((c.c1_global - 1.0).abs() < 1e-10 && (c.c2_global - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cap_suggests_randomized_mode() {
        let d = Dictionary::trig(10, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(40, d.domain(), SamplingMode::IidUniform, 1).unwrap();
        let opts = CheckOptions {
            cap: 100,
            ..CheckOptions::default()
        };
        let err = universal_check(&d, 5, &xi, 0.5, 1.5, &opts).unwrap_err();
        assert!(err.to_string().contains("randomized"));
        let opts = CheckOptions {
            cap: 100,
            mode: CheckMode::Randomized { samples: 50, seed: 3 },
            record_limit: 5,
        };
        let est = universal_check(&d, 5, &xi, 0.5, 1.5, &opts).unwrap();
        assert!(est.is_estimate());
        assert_eq!(est.supports_checked, 50);
        assert_eq!(est.extremes.len(), 5);
        let full = universal_check(&d, 5, &xi, 0.5, 1.5, &CheckOptions::default()).unwrap();
        assert!(est.c1_global >= full.c1_global - 1e-12);
        assert!(est.c2_global <= full.c2_global + 1e-12);
    }

    #[test]
    fn rip_examples() {
        let d = trig5();
        let s = sample_matrix(&d, &equispaced(5)).unwrap().normalized(true);
        for v in 1..=5 {
            assert!(rip_delta(&s, v, 1000).unwrap().delta < 1e-12);
        }
        let col = CMatrix::from_element(4, 1, C64::new(0.5, 0.0));
        let twin = NormalizedSystem::new(CMatrix::from_fn(4, 2, |r, _| col[(r, 0)]), false);
        let r = rip_delta(&twin, 2, 1000).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-12);
        assert!((r.recheck(&twin) - r.delta).abs() < 1e-12);
    }

    #[test]
    fn wilson_interval_at_boundaries() {
        let (lo, hi) = wilson_interval(0, 20);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.1 && hi < 0.2);
        let (lo, hi) = wilson_interval(20, 20);
        assert!(lo > 0.8 && hi == 1.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn success_probability_trivial_cases() {
        let d = Dictionary::trig(0, 1, DEFAULT_SIZE_CAP).unwrap();
        let spec = TrialSpec {
            v: 1,
            c1: 0.5,
            c2: 1.5,
            trials: 10,
            seed: 1,
            cap: 1000,
        };
        assert_eq!(success_probability(&d, 3, &spec).unwrap().estimate, 1.0);
        let r = empirical_min_m(&d, &spec, 0.9, 64).unwrap();
        assert_eq!(r.m_hat, 1);

        let d = trig5();
        let spec = TrialSpec { v: 3, ..spec };
        assert_eq!(success_probability(&d, 2, &spec).unwrap().estimate, 0.0);
    }

    #[test]
    fn min_m_search_reports_cap() {
        let d = Dictionary::trig(4, 1, DEFAULT_SIZE_CAP).unwrap();
        let spec = TrialSpec {
            v: 3,
            c1: 0.99,
            c2: 1.01,
            trials: 4,
            seed: 1,
            cap: 1000,
        };
        assert!(matches!(empirical_min_m(&d, &spec, 0.9, 8), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn lp_ratios_sit_inside_eigen_bounds_for_p2() {
        let d = Dictionary::trig(3, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(30, d.domain(), SamplingMode::IidUniform, 17).unwrap();
        let q = Quadrature::new(256);
        let cert = universal_check(&d, 2, &xi, 0.0, f64::INFINITY, &CheckOptions::default()).unwrap();
        let lp = lp_check_randomized(&d, 2, 2.0, &xi, 200, 5, &q).unwrap();
        assert!(lp.min_ratio >= cert.c1_global - 1e-8);
        assert!(lp.max_ratio <= cert.c2_global + 1e-8);
    }

    #[test]
    fn lp_ratio_of_constant_is_one() {
        let d = Dictionary::trig(0, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(5, d.domain(), SamplingMode::IidUniform, 2).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let lp = lp_check_randomized(&d, 1, p, &xi, 8, 1, &Quadrature::new(64)).unwrap();
            assert!((lp.min_ratio - 1.0).abs() < 1e-12 && (lp.max_ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lp_exact_quadrature_gives_unit_ratios() {
        let d = trig5();
        let lp = lp_check_randomized(&d, 3, 2.0, &equispaced(5), 100, 4, &Quadrature::new(64)).unwrap();
        assert!((lp.min_ratio - 1.0).abs() < 1e-8 && (lp.max_ratio - 1.0).abs() < 1e-8);
        assert!(lp_check_randomized(&d, 3, 2.5, &equispaced(5), 1, 4, &Quadrature::new(64)).is_err());
    }
}

//! Empirical covering and entropy numbers of finite clouds drawn from the
//! unit ball of `Σ_v` in `L_p`, measured in the grid sup norm.
//!
//! A farthest-point traversal orders the members once; `R_t`, the largest
//! distance from any member to the first `t` centers, is nonincreasing. The
//! greedy net at scale `ε` is the shortest prefix with `R_t ≤ ε`, and the
//! entropy estimate `ε̂_k` is `R_{2^k}`: the smallest `ε` whose greedy net
//! has at most `2^k` centers. Finite clouds only bound the true quantities
//! from below, so everything here is an estimate.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, Quadrature};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rng;

/// Largest `k` accepted by [`entropy_numbers`].
pub const MAX_ENTROPY_INDEX: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionCloud {
    pub grid: Vec<Vec<f64>>,
    /// Member values on `grid`, row per member.
    pub members: Vec<Vec<C64>>,
    pub p: f64,
    pub v: usize,
    pub seed: u64,
}

impl FunctionCloud {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.members {
            for z in m.iter_mut() {
                *z *= lambda;
            }
        }
        out
    }
}

fn grid_p_norm(values: &[C64], p: f64) -> f64 {
    crate::dictionary::norms_sampled(values, p)
}

/// Draws `n_members` elements of `Σ_v` normalized to unit grid `p`-norm.
/// The first members are structured: every single atom, then the
/// equal-coefficient sums over consecutive index windows of length `v`.
/// The rest use complex Gaussian coefficients on uniform random supports.
pub fn generate_cloud(
    dict: &Dictionary,
    v: usize,
    p: f64,
    n_members: usize,
    seed: u64,
    grid: &Quadrature,
) -> Result<FunctionCloud> {
    let n = dict.len();
    if v == 0 || v > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ v ≤ N = {n}, got v = {v}")));
    }
    if n_members == 0 {
        return Err(Error::InvalidParameter("a cloud needs at least one member".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in [1, ∞], got {p}")));
    }
    let nodes = grid.nodes(&dict.domain())?;
    let table: Vec<Vec<C64>> =
        crate::par::map_indexed(n, |i| nodes.iter().map(|x| dict.eval(i, x)).collect());
    let mut structured: Vec<(Vec<usize>, Vec<C64>)> =
        (0..n).map(|i| (vec![i], vec![C64::new(1.0, 0.0)])).collect();
    if v > 1 {
        for start in 0..=(n - v) {
            structured.push(((start..start + v).collect(), vec![C64::new(1.0, 0.0); v]));
        }
    }
    let members = crate::par::map_indexed(n_members, |idx| {
        let (support, coeffs) = if idx < structured.len() {
            structured[idx].clone()
        } else {
            let mut r = rng::stream(seed, idx as u64);
            let mut pool: Vec<usize> = (0..n).collect();
            let mut s = pool.partial_shuffle(&mut r, v).0.to_vec();
            s.sort_unstable();
            let c = (0..v)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut r);
                    let im: f64 = StandardNormal.sample(&mut r);
                    C64::new(re, im)
                })
                .collect();
            (s, c)
        };
        let mut vals: Vec<C64> = (0..nodes.len())
            .map(|g| support.iter().zip(&coeffs).map(|(&i, c)| c * table[i][g]).sum())
            .collect();
        let norm = grid_p_norm(&vals, p);
        if norm > 0.0 {
            for z in &mut vals {
                *z /= norm;
            }
        }
        vals
    });
    Ok(FunctionCloud {
        grid: nodes,
        members,
        p,
        v,
        seed,
    })
}

fn sup_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Farthest-point order of a cloud: `centers[t]` is the `t+1`-th center and
/// `radii[t]` the covering radius of the first `t+1` centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Traversal {
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
}

impl Traversal {
    /// Runs until `max_centers` centers are placed or the radius is zero.
    /// Starts at member 0; ties go to the lowest member index.
    pub fn new(cloud: &FunctionCloud, max_centers: usize) -> Self {
        let members = &cloud.members;
        let mut centers = Vec::new();
        let mut radii = Vec::new();
        if members.is_empty() || max_centers == 0 {
            return Self { centers, radii };
        }
        let mut dist = vec![f64::INFINITY; members.len()];
        let mut next = 0;
        loop {
            centers.push(next);
            let c = &members[next];
            let fresh = crate::par::map_indexed(members.len(), |i| sup_distance(&members[i], c));
            for (d, f) in dist.iter_mut().zip(fresh) {
                *d = d.min(f);
            }
            let (far, radius) = dist
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
            radii.push(radius);
            if radius <= 0.0 || centers.len() >= max_centers {
                break;
            }
            next = far;
        }
        Self { centers, radii }
    }

    /// Greedy net size at scale `eps`, or `None` if the traversal stopped
    /// before reaching it.
    pub fn covering(&self, eps: f64) -> Option<usize> {
        self.radii.iter().position(|&r| r <= eps).map(|t| t + 1)
    }

    /// `R_t` for `t` centers; zero past the end of a completed traversal.
    pub fn radius(&self, t: usize) -> Option<f64> {
        if t == 0 {
            return None;
        }
        match self.radii.get(t - 1) {
            Some(&r) => Some(r),
            None if self.radii.last() == Some(&0.0) => Some(0.0),
            None => None,
        }
    }
}

/// Greedy farthest-point net size at scale `eps`.
pub fn covering_estimate(cloud: &FunctionCloud, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let t = Traversal::new(cloud, cloud.len());
    Ok(t.covering(eps).unwrap_or(cloud.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// `(k, ε̂_k)` for `k = 0..=k_max`.
    pub entropy: Vec<(usize, f64)>,
    /// `(ε, N̂_ε)` at each distinct `ε̂_k`.
    pub covering: Vec<(f64, usize)>,
    pub members: usize,
    pub method: String,
}

impl EntropyEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,eps\n");
        for (k, e) in &self.entropy {
            out.push_str(&format!("{k},{e:e}\n"));
        }
        out
    }

    /// Least-squares slope of `ln ε̂_k` against `ln k` over `k ∈ [lo, hi]`,
    /// skipping zero estimates.
    pub fn loglog_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .entropy
            .iter()
            .filter(|(k, e)| *k >= lo.max(1) && *k <= hi && *e > 0.0)
            .map(|(k, e)| ((*k as f64).ln(), e.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// `ε̂_k` for `k = 0..=k_max`, read off one farthest-point traversal.
pub fn entropy_numbers(cloud: &FunctionCloud, k_max: usize) -> Result<EntropyEstimate> {
    if k_max == 0 || k_max > MAX_ENTROPY_INDEX {
        return Err(Error::InvalidParameter(format!(
            "k_max must lie in 1..={MAX_ENTROPY_INDEX}, got {k_max}"
        )));
    }
    if cloud.is_empty() {
        return Err(Error::InvalidParameter("empty cloud".into()));
    }
    let t = Traversal::new(cloud, 1 << k_max);
    let mut entropy = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let centers = 1usize << k;
        let eps = t.radius(centers).unwrap_or(0.0);
        entropy.push((k, eps));
    }
    let mut covering: Vec<(f64, usize)> = Vec::new();
    for &(_, e) in &entropy {
        if covering.last().is_some_and(|(x, _)| *x == e) {
            continue;
        }
        let n = if e > 0.0 {
            t.covering(e).unwrap_or(cloud.len())
        } else {
            t.radii.len()
        };
        covering.push((e, n));
    }
    Ok(EntropyEstimate {
        entropy,
        covering,
        members: cloud.len(),
        method: "greedy-farthest-point".into(),
    })
}

/// `log(2Kv) + log log N`, the size factor in the entropy bound with its
/// constant set to one. Reported only.
pub fn q_v_reference(k: f64, v: usize, n: usize) -> f64 {
    (2.0 * k * v as f64).ln() + (n as f64).ln().max(1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::DEFAULT_SIZE_CAP;

    fn cloud(members: Vec<Vec<C64>>) -> FunctionCloud {
        FunctionCloud {
            grid: Vec::new(),
            members,
            p: 2.0,
            v: 1,
            seed: 0,
        }
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn unimodular_constants() {
        let d = Dictionary::trig(0, 1, DEFAULT_SIZE_CAP).unwrap();
        let cl = generate_cloud(&d, 1, 2.0, 20, 3, &Quadrature::new(16)).unwrap();
        for m in &cl.members {
            for z in m {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn members_are_normalized_and_bounded() {
        let d = Dictionary::trig(3, 1, DEFAULT_SIZE_CAP).unwrap();
        for p in [1.0, 2.0] {
            let cl = generate_cloud(&d, 2, p, 60, 3, &Quadrature::new(128)).unwrap();
            assert_eq!(cl.len(), 60);
            for m in &cl.members {
                assert!((grid_p_norm(m, p) - 1.0).abs() < 1e-6);
                if p == 2.0 {
                    let sup = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    assert!(sup <= 2f64.sqrt() * (1.0 + 1e-6));
                }
            }
            let again = generate_cloud(&d, 2, p, 60, 3, &Quadrature::new(128)).unwrap();
            assert_eq!(cl, again);
        }
    }

    #[test]
    fn covering_examples() {
        let one = cloud(vec![vec![c(1.0), c(0.0)]]);
        assert_eq!(covering_estimate(&one, 1e-9).unwrap(), 1);
        let two = cloud(vec![vec![c(0.0)], vec![c(0.5)]]);
        assert_eq!(covering_estimate(&two, 0.6).unwrap(), 1);
        assert_eq!(covering_estimate(&two, 0.4).unwrap(), 2);
        let dup = cloud(vec![vec![c(0.0)], vec![c(0.5)], vec![c(0.5)], vec![c(0.0)]]);
        assert_eq!(covering_estimate(&dup, 1e-12).unwrap(), 2);
        assert!(covering_estimate(&dup, 0.0).is_err());
    }

    #[test]
    fn singleton_entropy_is_zero() {
        let one = cloud(vec![vec![c(1.0)]]);
        let e = entropy_numbers(&one, 4).unwrap();
        assert!(e.entropy.iter().all(|(_, x)| *x == 0.0));
    }

    #[test]
    fn entropy_monotone_and_scale_equivariant() {
        let d = Dictionary::trig(3, 1, DEFAULT_SIZE_CAP).unwrap();
        let cl = generate_cloud(&d, 2, 2.0, 150, 8, &Quadrature::new(64)).unwrap();
        let e = entropy_numbers(&cl, 6).unwrap();
        for w in e.entropy.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
        for w in e.covering.windows(2) {
            assert!(w[0].0 > w[1].0 && w[0].1 <= w[1].1);
        }
        let e3 = entropy_numbers(&cl.scaled(3.0), 6).unwrap();
        for (a, b) in e.entropy.iter().zip(&e3.entropy) {
            assert!((b.1 - 3.0 * a.1).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let est = EntropyEstimate {
            entropy: (0..8).map(|k| (k, (k.max(1) as f64).powf(-0.5))).collect(),
            covering: Vec::new(),
            members: 0,
            method: String::new(),
        };
        assert!((est.loglog_slope(2, 7).unwrap() + 0.5).abs() < 1e-12);
    }
}

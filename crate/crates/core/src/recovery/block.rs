//! Block-greedy approximation of Wiener-class functions on the torus.
//!
//! A function is stored by its trigonometric coefficients on the hyperbolic
//! cross `Γ(M)`. Block `j` collects the dyadic blocks `ρ(s)` with
//! `‖s‖₁ = j`. The approximant keeps every block below `n` and replaces each
//! block `j ≥ n` by a `v_j`-term OMP approximant in `L₂(μ_ξ)`.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::greedy_projection;
use crate::dictionary::{block_index, exp_i, FrequencyGrid};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::rng;
use crate::sampling::PointSet;

/// Relative slack allowed when checking the class bound per block.
const CLASS_TOLERANCE: f64 = 1e-9;

/// Grid sizes above this are refused.
const GRID_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerInstance {
    pub dim: usize,
    /// Hyperbolic cross parameter `M`.
    pub grid: u64,
    pub a: f64,
    pub b: f64,
    /// Nonzero coefficients, sorted by frequency.
    pub coefficients: Vec<(Vec<i64>, C64)>,
}

/// Recipe for a synthetic class member: blocks `0..dense_blocks` are filled
/// completely, and each `(j, count)` in `sparse_blocks` gets `count` random
/// frequencies. Every used block has A-norm `fill · 2^{-aj}(j+1)^{(d-1)b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerSpec {
    pub dim: usize,
    pub grid: u64,
    pub a: f64,
    pub b: f64,
    pub dense_blocks: u32,
    pub sparse_blocks: Vec<(u32, usize)>,
    pub fill: f64,
}

fn block_of(k: &[i64]) -> u32 {
    block_index(k).iter().sum()
}

fn class_bound(j: u32, a: f64, b: f64, dim: usize) -> f64 {
    2f64.powf(-a * j as f64) * ((j + 1) as f64).powf((dim as f64 - 1.0) * b)
}

fn blocks_of_grid(grid: &FrequencyGrid) -> BTreeMap<u32, Vec<Vec<i64>>> {
    let mut out: BTreeMap<u32, Vec<Vec<i64>>> = BTreeMap::new();
    for k in grid.points() {
        out.entry(block_of(k)).or_default().push(k.clone());
    }
    out
}

pub fn wiener_instance(spec: &WienerSpec, seed: u64) -> Result<WienerInstance> {
    if !(spec.fill > 0.0 && spec.fill <= 1.0) {
        return Err(Error::InvalidParameter(format!("fill must lie in (0, 1], got {}", spec.fill)));
    }
    if !(spec.a > 0.0) || spec.b < 0.0 {
        return Err(Error::InvalidParameter("class needs a > 0 and b ≥ 0".into()));
    }
    let grid = FrequencyGrid::hyperbolic_cross(spec.grid, spec.dim, GRID_CAP)?;
    let blocks = blocks_of_grid(&grid);
    let mut r = rng::stream(seed, 0);
    let mut coefficients = Vec::new();
    let mut plan: Vec<(u32, Option<usize>)> = (0..spec.dense_blocks).map(|j| (j, None)).collect();
    plan.extend(spec.sparse_blocks.iter().map(|&(j, c)| (j, Some(c))));
    for (j, count) in plan {
        let Some(freqs) = blocks.get(&j) else {
            return Err(Error::Coverage(format!("block {j} lies outside Γ({})", spec.grid)));
        };
        let chosen: Vec<Vec<i64>> = match count {
            None => freqs.clone(),
            Some(c) if c > freqs.len() => {
                return Err(Error::Coverage(format!(
                    "block {j} has {} frequencies, {c} requested",
                    freqs.len()
                )))
            }
            Some(c) => freqs.choose_multiple(&mut r, c).cloned().collect(),
        };
        let raw: Vec<C64> = chosen
            .iter()
            .map(|_| {
                let mag = if count.is_some() { r.random_range(0.5..1.0) } else { 1.0 };
                C64::from_polar(mag, r.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let total: f64 = raw.iter().map(|c| c.norm()).sum();
        let target = spec.fill * class_bound(j, spec.a, spec.b, spec.dim);
        for (k, c) in chosen.into_iter().zip(raw) {
            coefficients.push((k, c * (target / total)));
        }
    }
    coefficients.sort_by(|x, y| x.0.cmp(&y.0));
    coefficients.dedup_by(|x, y| x.0 == y.0);
    Ok(WienerInstance {
        dim: spec.dim,
        grid: spec.grid,
        a: spec.a,
        b: spec.b,
        coefficients,
    })
}

/// `v_j = ⌊2^{n-β(j-n)} j^{d-1}⌋`.
pub fn block_budget(n: u32, j: u32, beta: f64, dim: usize) -> usize {
    let v = 2f64.powf(n as f64 - beta * (j as f64 - n as f64)) * (j as f64).powi(dim as i32 - 1);
    v.floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStep {
    pub block: u32,
    pub budget: usize,
    pub block_size: usize,
    pub nonzeros: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGreedyResult {
    pub n: u32,
    pub beta: f64,
    /// Nonzero coefficients of the approximant.
    pub terms: usize,
    pub error_mixed: f64,
    pub steps: Vec<BlockStep>,
    pub approximant: Vec<(Vec<i64>, C64)>,
}

impl BlockGreedyResult {
    /// `terms / 2^n`.
    pub fn term_ratio(&self) -> f64 {
        self.terms as f64 / 2f64.powi(self.n as i32)
    }
}

/// `‖Σ e_k e^{i⟨k,·⟩}‖_{L₂(μ_ξ)}` from coefficients.
fn mixed_norm_of(coeffs: &BTreeMap<Vec<i64>, C64>, xi: &PointSet) -> f64 {
    let cont: f64 = coeffs.values().map(|c| c.norm_sqr()).sum();
    let disc: f64 = xi
        .points()
        .iter()
        .map(|x| coeffs.iter().map(|(k, c)| c * exp_i(k, x)).sum::<C64>().norm_sqr())
        .sum::<f64>()
        / xi.len() as f64;
    (0.5 * cont + 0.5 * disc).sqrt()
}

pub fn block_greedy(inst: &WienerInstance, n: u32, beta: f64, xi: &PointSet) -> Result<BlockGreedyResult> {
    if !(beta > 0.0 && beta < inst.a) {
        return Err(Error::InvalidParameter(format!(
            "β must lie in (0, a) = (0, {}), got {beta}",
            inst.a
        )));
    }
    if xi.domain() != crate::dictionary::Domain::torus(inst.dim) || xi.is_empty() {
        return Err(Error::DomainMismatch(format!(
            "need a nonempty point set on the {}-torus",
            inst.dim
        )));
    }
    let grid = FrequencyGrid::hyperbolic_cross(inst.grid, inst.dim, GRID_CAP)?;
    let blocks = blocks_of_grid(&grid);
    let mut by_block: BTreeMap<u32, BTreeMap<Vec<i64>, C64>> = BTreeMap::new();
    for (k, c) in &inst.coefficients {
        if grid.index_of(k).is_none() {
            return Err(Error::Coverage(format!("frequency {k:?} lies outside Γ({})", inst.grid)));
        }
        by_block.entry(block_of(k)).or_default().insert(k.clone(), *c);
    }
    for (&j, f) in &by_block {
        let a_norm: f64 = f.values().map(|c| c.norm()).sum();
        let bound = class_bound(j, inst.a, inst.b, inst.dim);
        if a_norm > bound * (1.0 + CLASS_TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "block {j} has A-norm {a_norm:e}, class bound {bound:e}"
            )));
        }
    }

    let mut approx: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
    for (_, f) in by_block.range(..n) {
        approx.extend(f.iter().map(|(k, c)| (k.clone(), *c)));
    }
    let top = blocks.keys().next_back().copied().unwrap_or(0);
    let m = xi.len() as f64;
    let mut steps = Vec::new();
    for j in n..=top {
        let budget = block_budget(n, j, beta, inst.dim);
        if budget == 0 {
            break;
        }
        let Some(freqs) = blocks.get(&j) else {
            continue;
        };
        let empty = BTreeMap::new();
        let f = by_block.get(&j).unwrap_or(&empty);
        let mut step = BlockStep {
            block: j,
            budget,
            block_size: freqs.len(),
            nonzeros: f.len(),
            selected: 0,
        };
        if !f.is_empty() {
            // Coordinates [coefficients / √2 ; samples / √(2m)] make the
            // μ_ξ inner product Euclidean.
            let b = freqs.len();
            let rows = b + xi.len();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let s = 1.0 / (2.0 * m).sqrt();
            let mut a = CMatrix::zeros(rows, b);
            for (i, k) in freqs.iter().enumerate() {
                a[(i, i)] = C64::new(h, 0.0);
                for (r, x) in xi.points().iter().enumerate() {
                    a[(b + r, i)] = exp_i(k, x) * s;
                }
            }
            let mut y = CVector::zeros(rows);
            for (i, k) in freqs.iter().enumerate() {
                if let Some(c) = f.get(k) {
                    y[i] = c * h;
                }
            }
            for (r, x) in xi.points().iter().enumerate() {
                y[b + r] = f.iter().map(|(k, c)| c * exp_i(k, x)).sum::<C64>() * s;
            }
            let norms = vec![1.0; b];
            let tol = 1e-13 * y.norm();
            let g = greedy_projection(&a, &y, &norms, 1.0, budget, tol);
            step.selected = g.selected.len();
            for (i, c) in g.selected.iter().zip(g.coefficients) {
                approx.insert(freqs[*i].clone(), c);
            }
        }
        steps.push(step);
    }

    let mut err: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
    for f in by_block.values() {
        err.extend(f.iter().map(|(k, c)| (k.clone(), *c)));
    }
    for (k, c) in &approx {
        *err.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) -= c;
    }
    let terms = approx.values().filter(|c| c.norm() > 0.0).count();
    Ok(BlockGreedyResult {
        n,
        beta,
        terms,
        error_mixed: mixed_norm_of(&err, xi),
        steps,
        approximant: approx.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Domain;
    use crate::sampling::{draw_points, SamplingMode};

    fn spec() -> WienerSpec {
        WienerSpec {
            dim: 1,
            grid: 255,
            a: 0.5,
            b: 0.0,
            dense_blocks: 3,
            sparse_blocks: vec![(6, 10), (7, 12)],
            fill: 0.9,
        }
    }

    fn xi() -> PointSet {
        draw_points(32, Domain::torus(1), SamplingMode::IidUniform, 9).unwrap()
    }

    #[test]
    fn budgets() {
        assert_eq!(block_budget(3, 3, 0.25, 1), 8);
        assert_eq!(block_budget(3, 7, 0.25, 1), 4);
        assert_eq!(block_budget(3, 16, 0.25, 1), 0);
        assert_eq!(block_budget(2, 2, 0.25, 2), 8);
    }

    #[test]
    fn generated_instance_respects_class() {
        let inst = wiener_instance(&spec(), 4).unwrap();
        assert_eq!(inst.coefficients.len(), 1 + 2 + 4 + 10 + 12);
        let again = wiener_instance(&spec(), 4).unwrap();
        assert_eq!(inst, again);
        let mut s = spec();
        s.sparse_blocks = vec![(9, 3)];
        assert!(matches!(wiener_instance(&s, 1), Err(Error::Coverage(_))));
    }

    #[test]
    fn low_blocks_are_reproduced_exactly() {
        let mut s = spec();
        s.sparse_blocks.clear();
        let inst = wiener_instance(&s, 2).unwrap();
        let r = block_greedy(&inst, 3, 0.25, &xi()).unwrap();
        assert!(r.error_mixed < 1e-15);
        assert_eq!(r.approximant, inst.coefficients);
    }

    #[test]
    fn error_decreases_with_n_and_terms_stay_bounded() {
        let inst = wiener_instance(&spec(), 7).unwrap();
        let mut prev = f64::INFINITY;
        for n in 2..=6 {
            let r = block_greedy(&inst, n, 0.25, &xi()).unwrap();
            assert!(r.error_mixed < prev || prev < 1e-14, "n = {n}");
            prev = r.error_mixed;
            assert!(r.steps.iter().all(|s| s.selected <= s.budget));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let inst = wiener_instance(&spec(), 7).unwrap();
        assert!(block_greedy(&inst, 3, 0.5, &xi()).is_err());
        let mut outside = inst.clone();
        outside.coefficients.push((vec![300], C64::new(1e-6, 0.0)));
        assert!(matches!(block_greedy(&outside, 3, 0.25, &xi()), Err(Error::Coverage(_))));
        let mut heavy = inst;
        heavy.coefficients[0].1 = C64::new(2.0, 0.0);
        assert!(block_greedy(&heavy, 3, 0.25, &xi()).is_err());
    }
}

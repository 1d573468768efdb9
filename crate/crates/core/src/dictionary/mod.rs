//! Function systems on the torus and on the unit interval.
//!
//! A [`Dictionary`] is an immutable, indexed family of bounded functions.
//! Atoms are analytic (exponentials, scaled sines, finite trigonometric
//! sums), so continuous Gram matrices are exact; quadrature is used only for
//! non-quadratic norms and black-box functions.
//!
//! Gram convention: `G[i, l] = ∫ conj(φ_i) φ_l dμ`, so that for
//! `f = Σ a_i φ_i` we have `‖f‖₂² = a^H G a`.

mod grid;
mod norms;
mod oracle;

pub use grid::{block_index, coefficients_from_text, coefficients_to_text, FrequencyGrid};
pub use norms::{
    continuous_norm, continuous_norm_coeffs, grid_sup_norm, wiener_norm, Quadrature,
};
pub(crate) use norms::sampled_norm as norms_sampled;
pub use oracle::{best_v_term, chebyshev_fit, BestTerm, OracleNorm, OracleTarget};

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_extremes, CMatrix, C64};

/// Default bound on dictionary cardinality.
pub const DEFAULT_SIZE_CAP: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// `[0, 2π)^d` with normalized Lebesgue measure.
    Torus,
    /// `[0, 1]` with Lebesgue measure.
    UnitInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub dim: usize,
}

impl Domain {
    pub fn torus(dim: usize) -> Self {
        Self {
            kind: DomainKind::Torus,
            dim,
        }
    }

    pub fn unit_interval() -> Self {
        Self {
            kind: DomainKind::UnitInterval,
            dim: 1,
        }
    }

    /// Length of each coordinate's fundamental interval.
    pub fn period(&self) -> f64 {
        match self.kind {
            DomainKind::Torus => TAU,
            DomainKind::UnitInterval => 1.0,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|&c| match self.kind {
                DomainKind::Torus => (0.0..TAU).contains(&c),
                DomainKind::UnitInterval => (0.0..=1.0).contains(&c),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarField {
    Real,
    Complex,
}

/// A single analytic dictionary element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Atom {
    /// `e^{i⟨k,x⟩}` on the torus.
    Exponential(Vec<i64>),
    /// `scale · sin(π k x)` on `[0, 1]`.
    Sine { k: u64, scale: f64 },
    /// Finite sum `Σ c_k e^{i⟨k,x⟩}` on the torus, sorted by frequency.
    TrigSum(Vec<(Vec<i64>, C64)>),
}

/// `e^{i⟨k,x⟩}` with per-term reduction mod 2π.
pub fn exp_i(k: &[i64], x: &[f64]) -> C64 {
    let mut phase = 0.0;
    for (kj, xj) in k.iter().zip(x) {
        phase += (*kj as f64 * xj).rem_euclid(TAU);
    }
    let (s, c) = phase.rem_euclid(TAU).sin_cos();
    C64::new(c, s)
}

impl Atom {
    pub fn eval(&self, x: &[f64]) -> C64 {
        match self {
            Atom::Exponential(k) => exp_i(k, x),
            Atom::Sine { k, scale } => {
                let t = (*k as f64 * x[0]).rem_euclid(2.0);
                C64::new(scale * (PI * t).sin(), 0.0)
            }
            Atom::TrigSum(terms) => terms.iter().map(|(k, c)| c * exp_i(k, x)).sum(),
        }
    }

    fn terms(&self) -> Option<Vec<(&[i64], C64)>> {
        match self {
            Atom::Exponential(k) => Some(vec![(k.as_slice(), C64::new(1.0, 0.0))]),
            Atom::TrigSum(t) => Some(t.iter().map(|(k, c)| (k.as_slice(), *c)).collect()),
            Atom::Sine { .. } => None,
        }
    }

    fn sup_bound(&self) -> f64 {
        match self {
            Atom::Exponential(_) => 1.0,
            Atom::Sine { scale, .. } => scale.abs(),
            Atom::TrigSum(t) => t.iter().map(|(_, c)| c.norm()).sum(),
        }
    }

    fn scaled(&self, factor: C64) -> Atom {
        match self {
            Atom::Exponential(k) => Atom::TrigSum(vec![(k.clone(), factor)]),
            Atom::Sine { k, scale } if factor.im == 0.0 => Atom::Sine {
                k: *k,
                scale: scale * factor.re,
            },
            Atom::Sine { .. } => unreachable!("sine atoms are scaled by real factors only"),
            Atom::TrigSum(t) => Atom::TrigSum(t.iter().map(|(k, c)| (k.clone(), c * factor)).collect()),
        }
    }
}

/// `∫ conj(a) b dμ` for two analytic atoms on the same domain.
fn atom_inner(a: &Atom, b: &Atom) -> C64 {
    match (a, b) {
        (Atom::Sine { k: ka, scale: sa }, Atom::Sine { k: kb, scale: sb }) => {
            if ka == kb {
                C64::new(0.5 * sa * sb, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }
        _ => {
            let (Some(ta), Some(tb)) = (a.terms(), b.terms()) else {
                unreachable!("dictionary atoms share one domain");
            };
            let mut acc = C64::new(0.0, 0.0);
            for (ka, ca) in &ta {
                for (kb, cb) in &tb {
                    if ka == kb {
                        acc += ca.conj() * cb;
                    }
                }
            }
            acc
        }
    }
}

/// Extremal Riesz constants of a dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszReport {
    pub r1: f64,
    pub r2: f64,
    /// `R1^{-2}`; absent when the lower constant vanishes.
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    domain: Domain,
    atoms: Vec<Atom>,
    uniform_bound: f64,
    field: ScalarField,
    orthonormal: bool,
    descriptor: String,
}

impl Dictionary {
    /// `𝒯(M, d)`: exponentials over the cube `[-M, M]^d`, `N = (2M+1)^d`.
    pub fn trig(m: usize, d: usize, cap: u128) -> Result<Self> {
        let grid = FrequencyGrid::cube(m, d, cap)?;
        let mut dict = Self::trig_on(&grid);
        dict.descriptor = format!("trig(M={m},d={d})");
        Ok(dict)
    }

    /// Exponentials over an arbitrary frequency grid, in grid order.
    pub fn trig_on(grid: &FrequencyGrid) -> Self {
        Self {
            domain: Domain::torus(grid.dim()),
            atoms: grid.points().iter().cloned().map(Atom::Exponential).collect(),
            uniform_bound: 1.0,
            field: ScalarField::Complex,
            orthonormal: true,
            descriptor: format!("trig-grid(N={},d={})", grid.len(), grid.dim()),
        }
    }

    /// One-dimensional exponentials over the `n` frequencies nearest zero.
    pub fn trig_window(n: usize) -> Result<Self> {
        let grid = FrequencyGrid::centered_window(n)?;
        let mut dict = Self::trig_on(&grid);
        dict.descriptor = format!("trig-window(N={n})");
        Ok(dict)
    }

    /// `{s · sin(πkx)}_{k=1}^N` on `[0, 1]`; `s = √2` is orthonormal.
    pub fn sine(n: usize, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sine system needs N ≥ 1".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sine scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            domain: Domain::unit_interval(),
            atoms: (1..=n as u64).map(|k| Atom::Sine { k, scale }).collect(),
            uniform_bound: scale,
            field: ScalarField::Real,
            orthonormal: (scale - SQRT_2).abs() < 1e-15,
            descriptor: format!("sine(N={n},scale={scale})"),
        })
    }

    /// Dictionary of finite trigonometric sums on the d-torus.
    pub fn from_trig_sums(dim: usize, sums: Vec<Vec<(Vec<i64>, C64)>>) -> Result<Self> {
        if sums.is_empty() {
            return Err(Error::InvalidParameter("dictionary must be nonempty".into()));
        }
        let mut atoms = Vec::with_capacity(sums.len());
        for mut s in sums {
            if s.iter().any(|(k, _)| k.len() != dim) {
                return Err(Error::InvalidParameter("frequency dimension mismatch".into()));
            }
            s.sort_by(|a, b| a.0.cmp(&b.0));
            atoms.push(Atom::TrigSum(s));
        }
        let mut dict = Self {
            domain: Domain::torus(dim),
            uniform_bound: atoms.iter().map(Atom::sup_bound).fold(0.0, f64::max),
            atoms,
            field: ScalarField::Complex,
            orthonormal: false,
            descriptor: String::new(),
        };
        dict.orthonormal = dict.len() <= 512 && is_identity(&dict.full_gram(), 1e-12);
        dict.descriptor = format!("trig-sums(N={},d={dim})", dict.len());
        Ok(dict)
    }

    /// Every atom multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            domain: self.domain,
            atoms: self.atoms.iter().map(|a| a.scaled(C64::new(factor, 0.0))).collect(),
            uniform_bound: self.uniform_bound * factor.abs(),
            field: self.field,
            orthonormal: self.orthonormal && factor.abs() == 1.0,
            descriptor: format!("{}*{factor}", self.descriptor),
        }
    }

    /// Sub-dictionary on the given indices, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            domain: self.domain,
            atoms: idx.iter().map(|&i| self.atoms[i].clone()).collect(),
            uniform_bound: self.uniform_bound,
            field: self.field,
            orthonormal: self.orthonormal,
            descriptor: format!("{}[{} atoms]", self.descriptor, idx.len()),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn uniform_bound(&self) -> f64 {
        self.uniform_bound
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn eval(&self, i: usize, x: &[f64]) -> C64 {
        self.atoms[i].eval(x)
    }

    /// Frequency of atom `i` when it is a pure exponential.
    pub fn frequency(&self, i: usize) -> Option<&[i64]> {
        match &self.atoms[i] {
            Atom::Exponential(k) => Some(k),
            _ => None,
        }
    }

    /// Continuous Gram matrix on the index set `idx`.
    pub fn gram(&self, idx: &[usize]) -> CMatrix {
        if self.orthonormal {
            return CMatrix::identity(idx.len(), idx.len());
        }
        CMatrix::from_fn(idx.len(), idx.len(), |r, c| {
            atom_inner(&self.atoms[idx[r]], &self.atoms[idx[c]])
        })
    }

    pub fn full_gram(&self) -> CMatrix {
        let all: Vec<usize> = (0..self.len()).collect();
        self.gram(&all)
    }

    /// `∫ |φ_i|² dμ`.
    pub fn atom_norm_sq(&self, i: usize) -> f64 {
        if self.orthonormal {
            1.0
        } else {
            atom_inner(&self.atoms[i], &self.atoms[i]).re
        }
    }

    /// Riesz constants from the extremal eigenvalues of the continuous Gram.
    pub fn riesz_bounds(&self) -> Result<RieszReport> {
        let (lo, hi) = hermitian_extremes(&self.full_gram());
        if lo < -1e-10 * hi.abs().max(1.0) {
            return Err(Error::Conditioning(format!(
                "continuous Gram has negative eigenvalue {lo:e}"
            )));
        }
        let r1 = lo.max(0.0).sqrt();
        let r2 = hi.max(0.0).sqrt();
        Ok(RieszReport {
            r1,
            r2,
            k: (r1 > 0.0).then(|| 1.0 / (r1 * r1)),
        })
    }
}

fn is_identity(m: &CMatrix, tol: f64) -> bool {
    (0..m.nrows()).all(|i| {
        (0..m.ncols()).all(|j| {
            let t = if i == j { 1.0 } else { 0.0 };
            (m[(i, j)] - C64::new(t, 0.0)).norm() <= tol
        })
    })
}

/// Anything that can be evaluated pointwise on a domain.
pub trait Evaluable: Sync {
    fn eval(&self, x: &[f64]) -> C64;
}

impl<F> Evaluable for F
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    fn eval(&self, x: &[f64]) -> C64 {
        self(x)
    }
}

/// Coefficients of an element of `Σ_v(𝒟_N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCoefficients {
    support: Vec<usize>,
    values: Vec<C64>,
}

impl SparseCoefficients {
    /// `support` must be strictly increasing and below `n`.
    pub fn new(support: Vec<usize>, values: Vec<C64>, n: usize) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("support must be sorted and distinct".into()));
        }
        if support.last().is_some_and(|&i| i >= n) {
            return Err(Error::InvalidParameter(format!("support index out of range 0..{n}")));
        }
        Ok(Self { support, values })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn to_dense(&self, n: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (&i, &c) in self.support.iter().zip(&self.values) {
            out[i] = c;
        }
        out
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            support: self.support.clone(),
            values: self.values.iter().map(|c| c * factor).collect(),
        }
    }
}

/// `Σ_{i∈J} c_i φ_i` as an evaluable function.
#[derive(Debug, Clone, Copy)]
pub struct Expansion<'a> {
    pub dict: &'a Dictionary,
    pub coeffs: &'a SparseCoefficients,
}

impl Evaluable for Expansion<'_> {
    fn eval(&self, x: &[f64]) -> C64 {
        self.coeffs
            .support
            .iter()
            .zip(&self.coeffs.values)
            .map(|(&i, c)| c * self.dict.eval(i, x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_dictionary_sizes_and_order() {
        let d = Dictionary::trig(1, 1, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(d.len(), 3);
        let ks: Vec<i64> = (0..3).map(|i| d.frequency(i).unwrap()[0]).collect();
        assert_eq!(ks, vec![-1, 0, 1]);
        assert_eq!(Dictionary::trig(2, 2, DEFAULT_SIZE_CAP).unwrap().len(), 25);
        let d = Dictionary::trig(0, 3, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.eval(0, &[1.0, 2.0, 3.0]), C64::new(1.0, 0.0));
    }

    #[test]
    fn sine_system_is_orthonormal_at_default_scale() {
        let d = Dictionary::sine(5, SQRT_2).unwrap();
        assert!(d.is_orthonormal());
        assert_eq!(d.uniform_bound(), SQRT_2);
        assert_eq!(d.field(), ScalarField::Real);
        // midpoint quadrature at high resolution as an independent oracle
        let n = 20_000;
        for i in 0..5 {
            let q: f64 = (0..n)
                .map(|j| d.eval(i, &[(j as f64 + 0.5) / n as f64]).norm_sqr())
                .sum::<f64>()
                / n as f64;
            assert!((q - 1.0).abs() < 1e-10, "k={} -> {q}", i + 1);
        }
        let cross: f64 = (0..n)
            .map(|j| {
                let x = [(j as f64 + 0.5) / n as f64];
                (d.eval(0, &x) * d.eval(1, &x)).re
            })
            .sum::<f64>()
            / n as f64;
        assert!(cross.abs() < 1e-12);
        assert!(Dictionary::sine(0, 1.0).is_err());
        assert!(Dictionary::sine(3, -1.0).is_err());
    }

    #[test]
    fn riesz_constants() {
        let d = Dictionary::trig(2, 1, DEFAULT_SIZE_CAP).unwrap();
        let r = d.riesz_bounds().unwrap();
        assert_eq!((r.r1, r.r2, r.k), (1.0, 1.0, Some(1.0)));

        let r = d.scaled(2.0).riesz_bounds().unwrap();
        assert!((r.r1 - 2.0).abs() < 1e-12 && (r.r2 - 2.0).abs() < 1e-12);

        let h = C64::new(1.0 / SQRT_2, 0.0);
        let d = Dictionary::from_trig_sums(
            1,
            vec![vec![(vec![0], C64::new(1.0, 0.0))], vec![(vec![0], h), (vec![1], h)]],
        )
        .unwrap();
        assert!(!d.is_orthonormal());
        let r = d.riesz_bounds().unwrap();
        let expect = 1.0 - 1.0 / SQRT_2;
        assert!((r.r1 * r.r1 - expect).abs() < 1e-12);
        assert!((r.k.unwrap() * r.r1 * r.r1 - 1.0).abs() < 1e-12);
        assert!(r.r1 <= r.r2);
    }

    #[test]
    fn orthonormal_sub_dictionary_has_unit_riesz_constants() {
        let d = Dictionary::trig(3, 2, DEFAULT_SIZE_CAP).unwrap().subset(&[0, 5, 17, 30]);
        let r = d.riesz_bounds().unwrap();
        assert!((r.r1 - 1.0).abs() < 1e-10 && (r.r2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phase_reduction_keeps_unit_modulus() {
        let z = exp_i(&[10_000], &[6.2831]);
        assert!((z.norm() - 1.0).abs() < 1e-14);
        let direct = C64::new(0.0, 10_000.0 * 6.2831).exp();
        assert!((z - direct).norm() < 1e-9);
    }

    #[test]
    fn sparse_coefficients_validation() {
        let one = C64::new(1.0, 0.0);
        assert!(SparseCoefficients::new(vec![2, 1], vec![one, one], 5).is_err());
        assert!(SparseCoefficients::new(vec![1, 5], vec![one, one], 5).is_err());
        assert!(SparseCoefficients::new(vec![1], vec![one, one], 5).is_err());
        let c = SparseCoefficients::new(vec![1, 3], vec![one, one], 5).unwrap();
        assert_eq!(c.to_dense(5)[3], one);
    }
}

//! Point sets, evaluation matrices and discrete / mixed norms.

use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, Domain, DomainKind, Evaluable, Quadrature};
use crate::error::{Error, Result};
use crate::linalg::{mean_sq, CMatrix, CVector, C64};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    IidUniform,
    Stratified,
    Equispaced,
}

/// How a point set was produced; enough to regenerate it exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Provenance {
    IidUniform { seed: u64, stream: u64 },
    Stratified { seed: u64, stream: u64 },
    Equispaced,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    domain: Domain,
    points: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl PointSet {
    pub fn explicit(domain: Domain, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("a point set needs m ≥ 1".into()));
        }
        if let Some(p) = points.iter().find(|p| !domain.contains(p)) {
            return Err(Error::DomainMismatch(format!("point {p:?} lies outside {domain:?}")));
        }
        Ok(Self {
            domain,
            points,
            provenance: Provenance::Explicit,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The same points listed twice; every normalized sum is unchanged.
    pub fn duplicated(&self) -> Self {
        let mut points = self.points.clone();
        points.extend(self.points.iter().cloned());
        Self {
            domain: self.domain,
            points,
            provenance: Provenance::Explicit,
        }
    }

    /// Evaluates `f` at every point.
    pub fn sample(&self, f: &dyn Evaluable) -> Vec<C64> {
        crate::par::map_indexed(self.len(), |j| f.eval(&self.points[j]))
    }

    /// CSV: a `#` header with provenance, then one point per row.
    pub fn to_csv(&self) -> String {
        let kind = match self.domain.kind {
            DomainKind::Torus => "torus",
            DomainKind::UnitInterval => "unit-interval",
        };
        let prov = match self.provenance {
            Provenance::IidUniform { seed, stream } => {
                format!("iid-uniform,seed={seed},stream={stream}")
            }
            Provenance::Stratified { seed, stream } => {
                format!("stratified,seed={seed},stream={stream}")
            }
            Provenance::Equispaced => "equispaced".to_string(),
            Provenance::Explicit => "explicit".to_string(),
        };
        let mut out = format!("# domain={kind},dim={},provenance={prov}\n", self.domain.dim);
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|c| format!("{c:e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Parses the CSV written by [`PointSet::to_csv`]. The provenance line is
    /// informational; the result is an explicit point set.
    pub fn from_csv(text: &str, domain: Domain) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: Vec<f64> = line
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno + 1,
                        message: format!("bad coordinate {t:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            points.push(p);
        }
        Self::explicit(domain, points)
    }
}

/// Draws `m` points from stream 0 of `seed`.
pub fn draw_points(m: usize, domain: Domain, mode: SamplingMode, seed: u64) -> Result<PointSet> {
    draw_points_stream(m, domain, mode, seed, 0)
}

/// Draws `m` points from stream `stream` of `seed`. Points are drawn in
/// order, so the first `m` points of a larger iid draw coincide with an
/// `m`-point draw from the same stream.
pub fn draw_points_stream(
    m: usize,
    domain: Domain,
    mode: SamplingMode,
    seed: u64,
    stream: u64,
) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let period = domain.period();
    let d = domain.dim;
    // [0, period) on the torus; [0, 1] on the interval
    let clamp = |x: f64| if x >= period && domain.kind == DomainKind::Torus { 0.0 } else { x };
    let (points, provenance) = match mode {
        SamplingMode::Equispaced => {
            if d != 1 {
                return Err(Error::UnsupportedMode(format!(
                    "equispaced points are one-dimensional, domain has d = {d}"
                )));
            }
            let pts = (0..m).map(|j| vec![period * j as f64 / m as f64]).collect();
            (pts, Provenance::Equispaced)
        }
        SamplingMode::IidUniform => {
            let mut r = rng::stream(seed, stream);
            let pts = (0..m)
                .map(|_| (0..d).map(|_| clamp(period * r.random::<f64>())).collect())
                .collect();
            (pts, Provenance::IidUniform { seed, stream })
        }
        SamplingMode::Stratified => {
            let mut r = rng::stream(seed, stream);
            let side = perfect_root(m, d);
            let pts = (0..m)
                .map(|cell| {
                    let mut p = Vec::with_capacity(d);
                    match side {
                        Some(side) if d > 1 => {
                            // row-major cell index, first coordinate slowest
                            let mut rest = cell;
                            let mut digits = vec![0usize; d];
                            for c in (0..d).rev() {
                                digits[c] = rest % side;
                                rest /= side;
                            }
                            for dig in digits {
                                let u: f64 = r.random();
                                p.push(clamp(period * (dig as f64 + u) / side as f64));
                            }
                        }
                        _ => {
                            let u: f64 = r.random();
                            p.push(clamp(period * (cell as f64 + u) / m as f64));
                            for _ in 1..d {
                                p.push(clamp(period * r.random::<f64>()));
                            }
                        }
                    }
                    p
                })
                .collect();
            (pts, Provenance::Stratified { seed, stream })
        }
    };
    Ok(PointSet {
        domain,
        points,
        provenance,
    })
}

fn perfect_root(m: usize, d: usize) -> Option<usize> {
    let guess = (m as f64).powf(1.0 / d as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&s| s > 0 && s.checked_pow(d as u32) == Some(m))
}

/// The evaluation table `Φ[j, i] = φ_i(ξ^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    matrix: CMatrix,
}

impl SampleMatrix {
    /// Wraps an explicit evaluation table.
    pub fn from_matrix(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column system `m^{-1/2} Φ`.
    pub fn normalized(&self, orthonormal_dictionary: bool) -> NormalizedSystem {
        let scale = 1.0 / (self.rows() as f64).sqrt();
        NormalizedSystem {
            columns: self.matrix.map(|z| z * scale),
            orthonormal_dictionary,
        }
    }

    /// Discrete Gram `Φ^H Φ / m`, entry `[i, l] = (1/m) Σ_j conj(φ_i(ξ^j)) φ_l(ξ^j)`.
    pub fn discrete_gram(&self) -> CMatrix {
        (self.matrix.adjoint() * &self.matrix) / C64::new(self.rows() as f64, 0.0)
    }

    /// `Φ c`: samples of `Σ c_i φ_i`.
    pub fn apply(&self, coeffs: &[C64]) -> Vec<C64> {
        (&self.matrix * CVector::from_column_slice(coeffs)).iter().copied().collect()
    }

    /// Rows of `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{:e},{:e}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub fn sample_matrix(dict: &Dictionary, xi: &PointSet) -> Result<SampleMatrix> {
    if dict.domain() != xi.domain() {
        return Err(Error::DomainMismatch(format!(
            "dictionary on {:?}, points on {:?}",
            dict.domain(),
            xi.domain()
        )));
    }
    let n = dict.len();
    let rows = crate::par::map_indexed(xi.len(), |j| {
        (0..n).map(|i| dict.eval(i, &xi.points()[j])).collect::<Vec<C64>>()
    });
    Ok(SampleMatrix {
        matrix: CMatrix::from_fn(xi.len(), n, |j, i| rows[j][i]),
    })
}

/// `G_N(ξ)`: columns `m^{-1/2}(φ_i(ξ^1), …, φ_i(ξ^m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSystem {
    columns: CMatrix,
    orthonormal_dictionary: bool,
}

impl NormalizedSystem {
    pub fn new(columns: CMatrix, orthonormal_dictionary: bool) -> Self {
        Self {
            columns,
            orthonormal_dictionary,
        }
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn orthonormal_dictionary(&self) -> bool {
        self.orthonormal_dictionary
    }

    /// Euclidean Gram of the columns.
    pub fn gram(&self) -> CMatrix {
        self.columns.adjoint() * &self.columns
    }
}

/// `((1/m) Σ |z_j|^p)^{1/p}`, or `max |z_j|` for `p = ∞`.
pub fn discrete_norm(z: &[C64], p: f64) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::InvalidParameter("discrete norm of an empty vector".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in [1, ∞], got {p}")));
    }
    if p == 2.0 {
        return Ok(mean_sq(z).sqrt());
    }
    Ok(crate::dictionary::norms_sampled(z, p))
}

/// `‖f‖_{L₂(μ_ξ)}` with `μ_ξ = μ/2 + (1/2m) Σ δ_{ξ^j}`, continuous half by
/// the reference rule.
pub fn mixed_norm(f: &dyn Evaluable, xi: &PointSet, quad: &Quadrature) -> Result<f64> {
    let cont = quad.sample(f, &xi.domain())?;
    let disc = xi.sample(f);
    Ok(mixed_norm_from_parts(mean_sq(&cont), &disc))
}

/// `sqrt(½ continuous² + ½ discrete²)` from a squared continuous norm and
/// samples at ξ.
pub fn mixed_norm_from_parts(continuous_sq: f64, samples: &[C64]) -> f64 {
    (0.5 * continuous_sq + 0.5 * mean_sq(samples)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{exp_i, DEFAULT_SIZE_CAP};

    fn one(_: &[f64]) -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn draws_are_deterministic() {
        let a = draw_points(20, Domain::torus(2), SamplingMode::IidUniform, 11).unwrap();
        let b = draw_points(20, Domain::torus(2), SamplingMode::IidUniform, 11).unwrap();
        assert_eq!(a, b);
        let c = draw_points(20, Domain::torus(2), SamplingMode::IidUniform, 12).unwrap();
        assert_ne!(a, c);
        assert!(a.points().iter().all(|p| Domain::torus(2).contains(p)));
    }

    #[test]
    fn iid_prefix_property() {
        let small = draw_points_stream(5, Domain::torus(1), SamplingMode::IidUniform, 4, 9).unwrap();
        let big = draw_points_stream(50, Domain::torus(1), SamplingMode::IidUniform, 4, 9).unwrap();
        assert_eq!(small.points(), &big.points()[..5]);
    }

    #[test]
    fn stratified_one_per_cell() {
        let p = draw_points(4, Domain::unit_interval(), SamplingMode::Stratified, 1).unwrap();
        for (j, x) in p.points().iter().enumerate() {
            assert!(x[0] >= j as f64 / 4.0 && x[0] < (j + 1) as f64 / 4.0);
        }
        let p = draw_points(9, Domain::torus(2), SamplingMode::Stratified, 1).unwrap();
        let cell = std::f64::consts::TAU / 3.0;
        let mut seen: Vec<(usize, usize)> = p
            .points()
            .iter()
            .map(|x| ((x[0] / cell) as usize, (x[1] / cell) as usize))
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn iid_sample_mean_is_central() {
        let p = draw_points(10_000, Domain::unit_interval(), SamplingMode::IidUniform, 5).unwrap();
        let mean = p.points().iter().map(|x| x[0]).sum::<f64>() / 1e4;
        assert!((0.48..=0.52).contains(&mean));
    }

    #[test]
    fn equispaced_requires_one_dimension() {
        let r = draw_points(4, Domain::torus(2), SamplingMode::Equispaced, 0);
        assert!(matches!(r, Err(Error::UnsupportedMode(_))));
        assert!(draw_points(0, Domain::torus(1), SamplingMode::IidUniform, 0).is_err());
    }

    #[test]
    fn equispaced_trig_table_has_orthogonal_columns() {
        let d = Dictionary::trig(1, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = draw_points(3, d.domain(), SamplingMode::Equispaced, 0).unwrap();
        let s = sample_matrix(&d, &xi).unwrap();
        let g = s.discrete_gram();
        for i in 0..3 {
            for l in 0..3 {
                let t = if i == l { 1.0 } else { 0.0 };
                assert!((g[(i, l)] - C64::new(t, 0.0)).norm() < 1e-14);
            }
        }
        // the constant atom gives an all-ones column
        assert!((0..3).all(|j| (s.matrix()[(j, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn single_row_table() {
        let d = Dictionary::trig(2, 1, DEFAULT_SIZE_CAP).unwrap();
        let xi = PointSet::explicit(d.domain(), vec![vec![0.7]]).unwrap();
        let s = sample_matrix(&d, &xi).unwrap();
        assert_eq!((s.rows(), s.cols()), (1, 5));
        assert!((s.matrix()[(0, 4)] - exp_i(&[2], &[0.7])).norm() < 1e-15);
        let wrong = PointSet::explicit(Domain::unit_interval(), vec![vec![0.7]]).unwrap();
        assert!(matches!(sample_matrix(&d, &wrong), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn discrete_norm_examples() {
        let ones = vec![C64::new(1.0, 0.0); 4];
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((discrete_norm(&ones, p).unwrap() - 1.0).abs() < 1e-15);
        }
        let z = [1.0, 0.0, 0.0, 0.0].map(|x| C64::new(x, 0.0));
        assert!((discrete_norm(&z, 2.0).unwrap() - 0.5).abs() < 1e-15);
        let z = [1.0, -3.0, 2.0].map(|x| C64::new(x, 0.0));
        assert_eq!(discrete_norm(&z, f64::INFINITY).unwrap(), 3.0);
    }

    #[test]
    fn mixed_norm_examples() {
        let q = Quadrature::new(256);
        let xi = draw_points(7, Domain::torus(1), SamplingMode::IidUniform, 2).unwrap();
        assert!((mixed_norm(&one, &xi, &q).unwrap() - 1.0).abs() < 1e-14);
        let e = |x: &[f64]| exp_i(&[1], x);
        assert!((mixed_norm(&e, &xi, &q).unwrap() - 1.0).abs() < 1e-14);
        // sin(3x) vanishes on the equispaced grid 2πj/3
        let eq = draw_points(3, Domain::torus(1), SamplingMode::Equispaced, 0).unwrap();
        let s = |x: &[f64]| C64::new((3.0 * x[0]).sin(), 0.0);
        let expect = 0.5f64.sqrt() * 0.5f64.sqrt();
        assert!((mixed_norm(&s, &eq, &q).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let p = draw_points(6, Domain::torus(2), SamplingMode::Stratified, 8).unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("# domain=torus,dim=2,provenance=stratified,seed=8"));
        let back = PointSet::from_csv(&text, Domain::torus(2)).unwrap();
        assert_eq!(back.points(), p.points());
    }
}

use serde::{Deserialize, Serialize};

use super::{Dictionary, Domain, DomainKind, Evaluable, Expansion, SparseCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Hard limit on tensor quadrature size.
const MAX_QUADRATURE_POINTS: usize = 1 << 24;

/// Tensor-product reference rule: `n` equispaced nodes per coordinate
/// (left endpoints on the torus, midpoints on `[0, 1]`). On the torus it
/// integrates trigonometric polynomials of degree `< n` exactly; on the
/// interval it integrates `sin(πkx) sin(πlx)` exactly for `k + l < 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub per_dim: usize,
}

impl Quadrature {
    pub fn new(per_dim: usize) -> Self {
        Self { per_dim }
    }

    /// 4096 nodes for d = 1, 256 per coordinate for d = 2, 32 beyond.
    pub fn default_for(domain: &Domain) -> Self {
        let per_dim = match domain.dim {
            1 => 4096,
            2 => 256,
            _ => 32,
        };
        Self { per_dim }
    }

    pub fn node_count(&self, domain: &Domain) -> Result<usize> {
        let total = (self.per_dim as u128).pow(domain.dim as u32);
        if self.per_dim == 0 || total > MAX_QUADRATURE_POINTS as u128 {
            return Err(Error::SizeLimit {
                size: total,
                cap: MAX_QUADRATURE_POINTS as u128,
            });
        }
        Ok(total as usize)
    }

    /// Nodes in row-major order (first coordinate slowest).
    pub fn nodes(&self, domain: &Domain) -> Result<Vec<Vec<f64>>> {
        let total = self.node_count(domain)?;
        let n = self.per_dim;
        let axis: Vec<f64> = match domain.kind {
            DomainKind::Torus => (0..n).map(|j| domain.period() * j as f64 / n as f64).collect(),
            DomainKind::UnitInterval => (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect(),
        };
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; domain.dim];
        for _ in 0..total {
            out.push(idx.iter().map(|&i| axis[i]).collect());
            for c in (0..domain.dim).rev() {
                idx[c] += 1;
                if idx[c] < n {
                    break;
                }
                idx[c] = 0;
            }
        }
        Ok(out)
    }

    pub fn sample(&self, f: &dyn Evaluable, domain: &Domain) -> Result<Vec<C64>> {
        let nodes = self.nodes(domain)?;
        Ok(crate::par::map_indexed(nodes.len(), |i| f.eval(&nodes[i])))
    }
}

/// `(mean |z|^p)^{1/p}` over quadrature samples; `p = ∞` takes the maximum.
pub(crate) fn sampled_norm(values: &[C64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let mean = values.iter().map(|z| z.norm().powf(p)).sum::<f64>() / values.len() as f64;
    mean.powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in [1, ∞], got {p}")))
    }
}

/// `L_p(Ω, μ)` norm of a black-box function via the reference rule.
pub fn continuous_norm(f: &dyn Evaluable, p: f64, domain: &Domain, quad: &Quadrature) -> Result<f64> {
    check_p(p)?;
    Ok(sampled_norm(&quad.sample(f, domain)?, p))
}

/// `L_p` norm of a dictionary expansion. For `p = 2` the value is exact
/// (`sqrt(c^H G c)`), otherwise it uses the reference rule.
pub fn continuous_norm_coeffs(
    dict: &Dictionary,
    coeffs: &SparseCoefficients,
    p: f64,
    quad: &Quadrature,
) -> Result<f64> {
    check_p(p)?;
    if p == 2.0 {
        let c = CVector::from_column_slice(coeffs.values());
        if dict.is_orthonormal() {
            return Ok(c.norm());
        }
        let g = dict.gram(coeffs.support());
        let q = (c.adjoint() * g * &c)[(0, 0)].re;
        return Ok(q.max(0.0).sqrt());
    }
    continuous_norm(&Expansion { dict, coeffs }, p, &dict.domain(), quad)
}

/// Maximum modulus over the reference nodes.
pub fn grid_sup_norm(f: &dyn Evaluable, domain: &Domain, quad: &Quadrature) -> Result<f64> {
    continuous_norm(f, f64::INFINITY, domain, quad)
}

/// Wiener (A-) norm: sum of coefficient moduli.
pub fn wiener_norm(values: &[C64]) -> f64 {
    values.iter().map(|c| c.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{exp_i, DEFAULT_SIZE_CAP};

    fn q() -> Quadrature {
        Quadrature::new(512)
    }

    #[test]
    fn constant_has_unit_norm_for_every_p() {
        let one = |_: &[f64]| C64::new(1.0, 0.0);
        let dom = Domain::torus(1);
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((continuous_norm(&one, p, &dom, &q()).unwrap() - 1.0).abs() < 1e-14);
        }
        let dom = Domain::unit_interval();
        assert!((continuous_norm(&one, 3.0, &dom, &q()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_norms() {
        let dom = Domain::torus(1);
        let e = |x: &[f64]| exp_i(&[1], x);
        assert!((continuous_norm(&e, 2.0, &dom, &q()).unwrap() - 1.0).abs() < 1e-14);
        let cosine = |x: &[f64]| exp_i(&[1], x) + exp_i(&[-1], x);
        let quad = continuous_norm(&cosine, 2.0, &dom, &q()).unwrap();
        assert!((quad - 2f64.sqrt()).abs() < 1e-12);

        let d = Dictionary::trig(1, 1, DEFAULT_SIZE_CAP).unwrap();
        let one = C64::new(1.0, 0.0);
        let c = SparseCoefficients::new(vec![0, 2], vec![one, one], 3).unwrap();
        let exact = continuous_norm_coeffs(&d, &c, 2.0, &q()).unwrap();
        assert!((exact - quad).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_p2_norm_uses_gram() {
        let d = Dictionary::trig(1, 1, DEFAULT_SIZE_CAP).unwrap().scaled(3.0);
        let c = SparseCoefficients::new(vec![1], vec![C64::new(0.0, 2.0)], 3).unwrap();
        assert!((continuous_norm_coeffs(&d, &c, 2.0, &q()).unwrap() - 6.0).abs() < 1e-12);
        let via_quad = continuous_norm_coeffs(&d, &c, 1.0, &q()).unwrap();
        assert!((via_quad - 6.0).abs() < 1e-12);
    }

    #[test]
    fn wiener_norms() {
        assert_eq!(wiener_norm(&[C64::new(1.0, 0.0)]), 1.0);
        let v = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
        assert_eq!(wiener_norm(&v), 3.0);
    }

    #[test]
    fn rejects_p_below_one() {
        let one = |_: &[f64]| C64::new(1.0, 0.0);
        assert!(continuous_norm(&one, 0.5, &Domain::torus(1), &q()).is_err());
    }

    #[test]
    fn two_dimensional_nodes_are_row_major() {
        let nodes = Quadrature::new(3).nodes(&Domain::torus(2)).unwrap();
        assert_eq!(nodes.len(), 9);
        assert_eq!(nodes[1][0], 0.0);
        assert!(nodes[1][1] > 0.0);
    }
}

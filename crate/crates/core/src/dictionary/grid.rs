//! Integer frequency sets: cubes, centered windows, hyperbolic crosses and
//! dyadic blocks, plus the line-oriented text format for grids and
//! coefficient vectors.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Ordered set of integer frequency vectors. Canonical order is
/// lexicographic; every constructor returns sorted, duplicate-free grids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl FrequencyGrid {
    pub fn new(dim: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::InvalidParameter(format!(
                "frequency {bad:?} does not have dimension {dim}"
            )));
        }
        points.sort();
        points.dedup();
        Ok(Self { dim, points })
    }

    /// `Π(M) ∩ ℤ^d`: every k with `max_j |k_j| ≤ M`.
    pub fn cube(m: usize, dim: usize, cap: u128) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let side = 2 * m as u128 + 1;
        let size = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::SizeLimit { size, cap });
        }
        let m = m as i64;
        let axis: Vec<i64> = (-m..=m).collect();
        Ok(Self {
            dim,
            points: cartesian(&vec![axis; dim]),
        })
    }

    /// The `n` integers nearest to zero, `-(n-1)/2 ..= n/2`. For odd `n`
    /// this is the one-dimensional cube with `M = (n-1)/2`.
    pub fn centered_window(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("window size must be positive".into()));
        }
        let lo = -(((n - 1) / 2) as i64);
        let hi = (n / 2) as i64;
        Ok(Self {
            dim: 1,
            points: (lo..=hi).map(|k| vec![k]).collect(),
        })
    }

    /// Hyperbolic cross `Γ(N) = {k : Π_j max(|k_j|, 1) ≤ N}`.
    pub fn hyperbolic_cross(n: u64, dim: usize, cap: u128) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::InvalidParameter(
                "hyperbolic cross needs N ≥ 1 and d ≥ 1".into(),
            ));
        }
        let mut points = Vec::new();
        let mut current = Vec::with_capacity(dim);
        cross_rec(n, dim, &mut current, &mut points, cap)?;
        points.sort();
        Ok(Self { dim, points })
    }

    /// Dyadic block `ρ(s) = {k : ⌊2^{s_j-1}⌋ ≤ |k_j| < 2^{s_j}}`.
    pub fn dyadic_block(s: &[u32]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("block index must be nonempty".into()));
        }
        if s.iter().any(|&sj| sj > 40) {
            return Err(Error::InvalidParameter("block index too large".into()));
        }
        let axes: Vec<Vec<i64>> = s.iter().map(|&sj| dyadic_axis(sj)).collect();
        Ok(Self {
            dim: s.len(),
            points: cartesian(&axes),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(k)).ok()
    }

    /// One index vector per line, comma separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&join_ints(p));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut dim = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let k = parse_ints(line, lineno + 1)?;
            check_dim(&mut dim, k.len(), lineno + 1)?;
            points.push(k);
        }
        Self::new(dim.unwrap_or(1), points)
    }
}

/// Dyadic block index `s` of a frequency vector: the unique block containing it.
pub fn block_index(k: &[i64]) -> Vec<u32> {
    k.iter()
        .map(|&kj| {
            let a = kj.unsigned_abs();
            if a == 0 {
                0
            } else {
                64 - a.leading_zeros()
            }
        })
        .collect()
}

fn dyadic_axis(s: u32) -> Vec<i64> {
    if s == 0 {
        return vec![0];
    }
    let lo = 1i64 << (s - 1);
    let hi = 1i64 << s;
    let mut v: Vec<i64> = (lo..hi).map(|k| -k).collect();
    v.reverse();
    v.extend(lo..hi);
    v
}

fn cross_rec(
    budget: u64,
    remaining: usize,
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    cap: u128,
) -> Result<()> {
    if remaining == 0 {
        if out.len() as u128 >= cap {
            return Err(Error::SizeLimit {
                size: out.len() as u128 + 1,
                cap,
            });
        }
        out.push(current.clone());
        return Ok(());
    }
    let b = budget as i64;
    for k in -b..=b {
        let factor = k.unsigned_abs().max(1);
        current.push(k);
        cross_rec(budget / factor, remaining - 1, current, out, cap)?;
        current.pop();
    }
    Ok(())
}

fn cartesian(axes: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(acc.len() * axis.len());
        for prefix in &acc {
            for &k in axis {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

fn join_ints(k: &[i64]) -> String {
    let mut s = String::new();
    for (i, v) in k.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v}");
    }
    s
}

fn parse_ints(field: &str, line: usize) -> Result<Vec<i64>> {
    field
        .split(',')
        .map(|t| {
            t.trim().parse::<i64>().map_err(|e| Error::Parse {
                line,
                message: format!("bad integer {t:?}: {e}"),
            })
        })
        .collect()
}

fn check_dim(dim: &mut Option<usize>, len: usize, line: usize) -> Result<()> {
    match *dim {
        None => {
            *dim = Some(len);
            Ok(())
        }
        Some(d) if d == len => Ok(()),
        Some(d) => Err(Error::Parse {
            line,
            message: format!("expected {d} coordinates, found {len}"),
        }),
    }
}

/// Writes `(frequency, coefficient)` pairs, one per line:
/// `k_1,…,k_d re,im`.
pub fn coefficients_to_text(entries: &[(Vec<i64>, C64)]) -> String {
    let mut out = String::new();
    for (k, c) in entries {
        let _ = writeln!(out, "{} {:e},{:e}", join_ints(k), c.re, c.im);
    }
    out
}

pub fn coefficients_from_text(text: &str) -> Result<Vec<(Vec<i64>, C64)>> {
    let mut out = Vec::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: "expected `k_1,…,k_d re,im`".into(),
            });
        };
        let k = parse_ints(idx, lineno)?;
        check_dim(&mut dim, k.len(), lineno)?;
        let nums: Vec<f64> = val
            .split(',')
            .map(|t| {
                t.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad number {t:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: "complex value must be `re,im`".into(),
            });
        }
        out.push((k, C64::new(nums[0], nums[1])));
    }
    Ok(out)
}

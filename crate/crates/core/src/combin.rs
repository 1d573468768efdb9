//! Lexicographic enumeration of k-subsets and deterministic parallel folds
//! over them.

use crate::error::{Error, Result};

/// Default bound on the number of supports any exhaustive search visits.
pub const DEFAULT_SUPPORT_CAP: u128 = 2_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn check_cap(n: usize, k: usize, cap: u128) -> Result<u128> {
    let count = binomial(n, k);
    if count > cap {
        Err(Error::CombinatorialLimit { count, cap })
    } else {
        Ok(count)
    }
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let mut x = next;
        loop {
            let below = binomial(n - x - 1, k - slot - 1);
            if rank < below {
                break;
            }
            rank -= below;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}

/// Advances `c` to the next k-subset of `0..n`; false when exhausted.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over k-subsets of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut succ = out.clone();
        if !succ.is_empty() && next_combination(&mut succ, self.n) {
            self.current = Some(succ);
        }
        Some(out)
    }
}

/// Folds `visit` over every k-subset of `0..n`. Work is split into chunks of
/// consecutive ranks; each chunk folds sequentially and chunk results are
/// merged in rank order, so the outcome does not depend on thread count.
pub fn fold_supports<T, V, M>(n: usize, k: usize, init: T, visit: V, merge: M) -> T
where
    T: Clone + Send + Sync,
    V: Fn(T, &[usize]) -> T + Sync,
    M: Fn(T, T) -> T,
{
    let total = binomial(n, k);
    if total == 0 {
        return init;
    }
    if k == 0 {
        return visit(init, &[]);
    }
    let chunk_count = (total.min(256)) as usize;
    let per = total.div_ceil(chunk_count as u128);
    let run_chunk = |ci: usize| -> T {
        let start = per * ci as u128;
        let end = (start + per).min(total);
        let mut acc = init.clone();
        if start >= end {
            return acc;
        }
        let mut c = unrank(n, k, start);
        let mut r = start;
        loop {
            acc = visit(acc, &c);
            r += 1;
            if r >= end || !next_combination(&mut c, n) {
                break;
            }
        }
        acc
    };
    let parts: Vec<T> = crate::par::map_indexed(chunk_count, run_chunk);
    parts.into_iter().fold(init, merge)
}

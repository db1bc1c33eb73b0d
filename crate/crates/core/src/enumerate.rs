//! Exact enumeration of lattice vectors of bounded norm.
//!
//! The Gram matrix is completed to squares over the rationals,
//! `Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`, and coordinates are
//! bounded from the last one down. Interval endpoints are found with exact
//! rational comparisons, so no vector is ever lost to rounding.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_rational::Ratio;

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::lattice::GramLattice;

type Q = Ratio<i128>;

struct SquareCompletion {
    diag: Vec<Q>,
    /// `upper[i][j]` for `j > i`.
    upper: Vec<Vec<Q>>,
}

impl SquareCompletion {
    fn new(l: &GramLattice) -> Result<Self> {
        let n = l.rank();
        let mut q: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| Q::from_integer(l.entry(i, j) as i128)).collect())
            .collect();
        for i in 0..n {
            if q[i][i] <= Q::from_integer(0) {
                return Err(Error::IndefiniteLattice);
            }
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] = q[i][j] / q[i][i];
            }
            for k in i + 1..n {
                for m in k..n {
                    q[k][m] = q[k][m] - q[k][i] * q[i][m];
                }
            }
        }
        Ok(Self {
            diag: (0..n).map(|i| q[i][i]).collect(),
            upper: q,
        })
    }
}

fn floor(x: Q) -> i128 {
    x.floor().to_integer()
}

fn ceil(x: Q) -> i128 {
    x.ceil().to_integer()
}

struct Walker<'a> {
    sc: &'a SquareCompletion,
    lattice: &'a GramLattice,
    coords: Vec<i64>,
    exact: Option<i64>,
    buckets: Vec<Vec<Vec<i64>>>,
}

impl Walker<'_> {
    fn descend(&mut self, level: usize, budget: Q) {
        let n = self.coords.len();
        let mut center = Q::from_integer(0);
        for j in level + 1..n {
            center -= self.sc.upper[level][j] * Q::from_integer(self.coords[j] as i128);
        }
        let qii = self.sc.diag[level];
        let fits = |x: i128| {
            let d = Q::from_integer(x) - center;
            qii * d * d <= budget
        };
        let reach = isqrt(floor(budget / qii)) + 1;
        let mut lo = floor(center) - reach;
        let mut hi = ceil(center) + reach;
        while lo <= hi && !fits(lo) {
            lo += 1;
        }
        while hi >= lo && !fits(hi) {
            hi -= 1;
        }
        for x in lo..=hi {
            let d = Q::from_integer(x) - center;
            let rest = budget - qii * d * d;
            self.coords[level] = x as i64;
            if level == 0 {
                let norm = self.lattice.q(&self.coords);
                match self.exact {
                    Some(m) if norm != m => {}
                    _ => self.buckets[norm as usize].push(self.coords.clone()),
                }
            } else {
                self.descend(level - 1, rest);
            }
        }
        self.coords[level] = 0;
    }
}

fn walk(l: &GramLattice, bound: i64, exact: Option<i64>) -> Result<Vec<Vec<Vec<i64>>>> {
    if bound < 0 {
        return Ok(Vec::new());
    }
    let sc = SquareCompletion::new(l)?;
    let mut w = Walker {
        sc: &sc,
        lattice: l,
        coords: vec![0; l.rank()],
        exact,
        buckets: vec![Vec::new(); bound as usize + 1],
    };
    w.descend(l.rank() - 1, Q::from_integer(bound as i128));
    for b in &mut w.buckets {
        b.sort();
    }
    Ok(w.buckets)
}

/// All `v` with `Q(v) = m`, sorted lexicographically.
pub fn vectors_of_norm(l: &GramLattice, m: i64) -> Result<Vec<Vec<i64>>> {
    if m < 0 {
        return Ok(Vec::new());
    }
    Ok(walk(l, m, Some(m))?.pop().unwrap_or_default())
}

/// Vectors bucketed by norm: entry `k` holds every `v` with `Q(v) = k`, for `k <= bound`.
pub fn short_vectors(l: &GramLattice, bound: i64) -> Result<Vec<Vec<Vec<i64>>>> {
    walk(l, bound, None)
}

/// Memoized `vectors_of_norm` for one lattice. Safe to share between threads.
#[derive(Debug)]
pub struct VectorCache {
    lattice: GramLattice,
    shells: RwLock<HashMap<i64, Arc<Vec<Vec<i64>>>>>,
}

impl VectorCache {
    pub fn new(lattice: GramLattice) -> Result<Self> {
        if !lattice.is_positive_definite() {
            return Err(Error::IndefiniteLattice);
        }
        Ok(Self {
            lattice,
            shells: RwLock::new(HashMap::new()),
        })
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    /// Fill every shell up to `bound` with a single enumeration pass.
    pub fn prefill(&self, bound: i64) -> Result<()> {
        let buckets = short_vectors(&self.lattice, bound)?;
        let mut map = self.shells.write().expect("vector cache poisoned");
        for (m, vs) in buckets.into_iter().enumerate() {
            map.entry(m as i64).or_insert_with(|| Arc::new(vs));
        }
        Ok(())
    }

    pub fn shell(&self, m: i64) -> Arc<Vec<Vec<i64>>> {
        if let Some(v) = self.shells.read().expect("vector cache poisoned").get(&m) {
            return Arc::clone(v);
        }
        let vs = Arc::new(vectors_of_norm(&self.lattice, m).expect("lattice checked positive"));
        let mut map = self.shells.write().expect("vector cache poisoned");
        Arc::clone(map.entry(m).or_insert(vs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Box enumeration: every coordinate bounded by `r`.
    fn brute(l: &GramLattice, m: i64, r: i64) -> Vec<Vec<i64>> {
        let n = l.rank();
        let mut out = Vec::new();
        let side = (2 * r + 1) as usize;
        let total = side.pow(n as u32);
        for idx in 0..total {
            let mut k = idx;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let x = (k % side) as i64 - r;
                    k /= side;
                    x
                })
                .collect();
            if l.q(&v) == m {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn unit_shell_of_quinary() {
        let l: GramLattice = "1,1,1,3,7".parse().unwrap();
        let v = vectors_of_norm(&l, 1).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(vectors_of_norm(&l, 0).unwrap(), vec![vec![0; 5]]);
    }

    #[test]
    fn norm_three_shell_of_quaternary() {
        let m: GramLattice = "1,1,1,3".parse().unwrap();
        let v = vectors_of_norm(&m, 3).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v, brute(&m, 3, 2));
    }

    #[test]
    fn matches_box_enumeration_on_nondiagonal_lattice() {
        let k = GramLattice::from_json("[[1,0,0,0],[0,2,1,0],[0,1,2,1],[0,0,1,3]]").unwrap();
        let buckets = short_vectors(&k, 12).unwrap();
        for (m, shell) in buckets.iter().enumerate() {
            assert_eq!(*shell, brute(&k, m as i64, 5), "norm {m}");
        }
        let skew = GramLattice::positive(vec![vec![5, 2, -1], vec![2, 3, 1], vec![-1, 1, 4]]).unwrap();
        for m in 0..15 {
            assert_eq!(vectors_of_norm(&skew, m).unwrap(), brute(&skew, m, 6), "norm {m}");
        }
    }

    #[test]
    fn cache_agrees_with_direct() {
        let l: GramLattice = "1,1,2,3,8".parse().unwrap();
        let cache = VectorCache::new(l.clone()).unwrap();
        cache.prefill(20).unwrap();
        for m in [0, 7, 20, 23] {
            assert_eq!(*cache.shell(m), vectors_of_norm(&l, m).unwrap());
        }
    }
}

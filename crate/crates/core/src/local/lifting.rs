//! Deciding `l -> M` over `Z_p` by lifting approximate representations.
//!
//! Every representation factors as a primitive representation of an
//! integral over-lattice of `l` of `p`-power index, so it is enough to search
//! primitive solutions for each over-lattice.
//!
//! Write `f(X) = (Q(x1), B(x1, x2), Q(x2))` for `X = (x1 | x2)`. If the image
//! of the Jacobian `Df(X)` contains `p^h Z_p^3` and `f(X) = T mod p^(2h+1)`,
//! Newton iteration converges to an exact solution. Here `h` is the largest
//! elementary divisor valuation of `Df(X)`. Bringing `(G x1, G x2)` to Smith
//! form `diag(d1, d2)` shows the divisors of `Df(X)` are `2 d1, d1, 2 d2`, and
//! for primitive `X` the product `d1 d2` divides `dM`. Hence
//! `h <= v_p(2) + v_p(dM)` for every primitive solution, which bounds the
//! search depth independently of `l`.
//!
//! The search never looks past level `2H + 1`, `H` the bound above, so the
//! primitive answer depends only on the target modulo `p^(2H+1)`. Answers are
//! memoized on that residue.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::arith::{inv_mod, inv_mod_prime, valuation, valuation_capped};
use crate::form::BinaryForm;
use crate::lattice::GramLattice;

/// Outcome of one lifting search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub represented: bool,
    /// Upper bound on `h` for primitive solutions, `v_p(2) + v_p(dM)`.
    pub depth_bound: u32,
    /// Integral over-lattices searched, `l` included.
    pub overlattices: usize,
    pub nodes: u64,
}

/// Integral binary lattices containing `form` with `p`-power index, as reduced forms.
pub fn integral_overlattices(form: &BinaryForm, p: i64) -> Vec<BinaryForm> {
    let start = form.reduced().expect("positive definite form");
    let mut seen = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while let Some(f) = frontier.pop() {
        for g in index_p_overlattices(&f, p) {
            let g = g.reduced().expect("over-lattice of a positive form is positive");
            if seen.insert(g) {
                frontier.push(g);
            }
        }
    }
    seen.into_iter().collect()
}

fn index_p_overlattices(f: &BinaryForm, p: i64) -> Vec<BinaryForm> {
    let (a, b, c) = (f.a, f.b, f.c);
    let mut out = Vec::new();
    // e1 / p
    if a % (p * p) == 0 && b % p == 0 {
        out.push(BinaryForm::new(a / (p * p), b / p, c));
    }
    // (x e1 + e2) / p
    for x in 0..p {
        let q = x * x * a + 2 * x * b + c;
        if (x * a + b) % p == 0 && q % (p * p) == 0 {
            out.push(BinaryForm::new(a, (x * a + b) / p, q / (p * p)));
        }
    }
    out
}

struct PrimitiveSearch {
    p: i128,
    gram: Vec<Vec<i128>>,
    target: [i128; 3],
    bound: u32,
    nodes: u64,
}

impl PrimitiveSearch {
    fn new(m: &GramLattice, form: &BinaryForm, p: i64, bound: u32) -> Self {
        let gram = m.gram().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let target = [form.a as i128, form.b as i128, form.c as i128];
        Self { p: p as i128, gram, target, bound, nodes: 0 }
    }

    fn rank(&self) -> usize {
        self.gram.len()
    }

    fn apply(&self, x: &[i128], modulus: i128) -> Vec<i128> {
        self.gram
            .iter()
            .map(|row| row.iter().zip(x).map(|(g, v)| g * v).sum::<i128>().rem_euclid(modulus))
            .collect()
    }

    fn values(&self, x1: &[i128], x2: &[i128]) -> [i128; 3] {
        let dot = |u: &[i128], v: &[i128]| u.iter().zip(v).map(|(a, b)| a * b).sum::<i128>();
        let u: Vec<i128> = self.gram.iter().map(|r| dot(r, x1)).collect();
        let w: Vec<i128> = self.gram.iter().map(|r| dot(r, x2)).collect();
        [dot(&u, x1), dot(&u, x2), dot(&w, x2)]
    }

    /// `h` for `X` known modulo `p^level`, or `None` when `h >= level`.
    fn jacobian_height(&self, x1: &[i128], x2: &[i128], level: u32) -> Option<u32> {
        let modulus = self.p.pow(level);
        let n = self.rank();
        let u = self.apply(x1, modulus);
        let w = self.apply(x2, modulus);
        let mut jac = vec![vec![0i128; 2 * n]; 3];
        for i in 0..n {
            jac[0][i] = (2 * u[i]) % modulus;
            jac[1][i] = w[i];
            jac[1][n + i] = u[i];
            jac[2][n + i] = (2 * w[i]) % modulus;
        }
        max_elementary_valuation(jac, self.p, level)
    }

    fn run(&mut self) -> bool {
        let n = self.rank();
        let p = self.p;
        let t = self.target;
        let mut firsts = Vec::new();
        for_each_vector(n, p, |x1| {
            if (self.values(x1, x1)[0] - t[0]).rem_euclid(p) == 0 {
                firsts.push(x1.to_vec());
            }
        });
        let mut roots = Vec::new();
        for x1 in &firsts {
            for_each_vector(n, p, |x2| {
                let [_, bb, cc] = self.values(x1, x2);
                if (bb - t[1]).rem_euclid(p) == 0
                    && (cc - t[2]).rem_euclid(p) == 0
                    && independent_mod_p(x1, x2, p)
                {
                    roots.push((x1.clone(), x2.to_vec()));
                }
            });
        }
        roots.into_iter().any(|(x1, x2)| self.descend(x1, x2, 1))
    }

    fn descend(&mut self, x1: Vec<i128>, x2: Vec<i128>, level: u32) -> bool {
        self.nodes += 1;
        match self.jacobian_height(&x1, &x2, level) {
            Some(h) if h > self.bound => return false,
            Some(h) if level > 2 * h => return true,
            None if level > self.bound => return false,
            _ => {}
        }
        let p = self.p;
        let pj = p.pow(level);
        let n = self.rank();
        let vals = self.values(&x1, &x2);
        let err: Vec<i128> = (0..3).map(|i| ((vals[i] - self.target[i]) / pj).rem_euclid(p)).collect();
        let u = self.apply(&x1, p);
        let w = self.apply(&x2, p);
        // unknowns (y1, y2): 2u.y1 = -ea, w.y1 + u.y2 = -eb, 2w.y2 = -ec  (mod p)
        let mut rows = vec![vec![0; 2 * n + 1]; 3];
        for i in 0..n {
            rows[0][i] = (2 * u[i]) % p;
            rows[1][i] = w[i];
            rows[1][n + i] = u[i];
            rows[2][n + i] = (2 * w[i]) % p;
        }
        for (row, e) in rows.iter_mut().zip(&err) {
            row[2 * n] = (-e).rem_euclid(p);
        }
        let Some(space) = AffineSpace::solve(rows, 2 * n, p) else {
            return false;
        };
        let mut found = false;
        space.for_each(|y| {
            if found {
                return;
            }
            let nx1: Vec<i128> = (0..n).map(|i| x1[i] + pj * y[i]).collect();
            let nx2: Vec<i128> = (0..n).map(|i| x2[i] + pj * y[n + i]).collect();
            found = self.descend(nx1, nx2, level + 1);
        });
        found
    }
}

fn independent_mod_p(x1: &[i128], x2: &[i128], p: i128) -> bool {
    let n = x1.len();
    (0..n).any(|j| (j + 1..n).any(|k| (x1[j] * x2[k] - x1[k] * x2[j]).rem_euclid(p) != 0))
}

/// Largest elementary divisor valuation of `m` over `Z_p`, from its entries mod `p^level`.
/// `None` if some divisor vanishes mod `p^level`.
fn max_elementary_valuation(mut m: Vec<Vec<i128>>, p: i128, level: u32) -> Option<u32> {
    let modulus = p.pow(level);
    let (rows, cols) = (m.len(), m[0].len());
    let mut top = 0;
    for k in 0..rows {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, &x) in row.iter().enumerate().skip(k) {
                let v = valuation_capped(x, p, level);
                if v < level && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best?;
        m.swap(k, i);
        for row in m.iter_mut() {
            row.swap(k, j);
        }
        let pv = p.pow(v);
        let inv = inv_mod(m[k][k] / pv, modulus).expect("pivot unit part is a unit");
        for i in k + 1..rows {
            let f = (m[i][k] / pv * inv) % modulus;
            for j in k..cols {
                m[i][j] = (m[i][j] - f * m[k][j]).rem_euclid(modulus);
            }
        }
        for j in k + 1..cols {
            let f = (m[k][j] / pv * inv) % modulus;
            m[k][j] = (m[k][j] - f * m[k][k]).rem_euclid(modulus);
        }
        top = v;
    }
    Some(top)
}

fn for_each_vector(n: usize, p: i128, mut f: impl FnMut(&[i128])) {
    let mut v = vec![0i128; n];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Solution set `{ particular + sum k_i basis_i }` of a linear system over `F_p`.
struct AffineSpace {
    particular: Vec<i128>,
    basis: Vec<Vec<i128>>,
    p: i128,
}

impl AffineSpace {
    /// `rows` are augmented: the last entry is the right-hand side.
    fn solve(mut rows: Vec<Vec<i128>>, vars: usize, p: i128) -> Option<Self> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..vars {
            if r == rows.len() {
                break;
            }
            let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] % p != 0) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = inv_mod_prime(rows[r][col], p);
            for x in rows[r].iter_mut() {
                *x = (*x * inv).rem_euclid(p);
            }
            for i in 0..rows.len() {
                if i != r && rows[i][col] != 0 {
                    let f = rows[i][col];
                    for k in 0..=vars {
                        rows[i][k] = (rows[i][k] - f * rows[r][k]).rem_euclid(p);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        if rows[r..].iter().any(|row| row[vars] != 0) {
            return None;
        }
        let mut particular = vec![0; vars];
        for (i, &col) in pivots.iter().enumerate() {
            particular[col] = rows[i][vars];
        }
        let basis = (0..vars)
            .filter(|c| !pivots.contains(c))
            .map(|fc| {
                let mut v = vec![0; vars];
                v[fc] = 1;
                for (i, &col) in pivots.iter().enumerate() {
                    v[col] = (-rows[i][fc]).rem_euclid(p);
                }
                v
            })
            .collect();
        Some(Self { particular, basis, p })
    }

    fn for_each(&self, mut f: impl FnMut(&[i128])) {
        let k = self.basis.len();
        let mut coeffs = vec![0i128; k];
        let mut y = self.particular.clone();
        loop {
            f(&y);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                coeffs[i] += 1;
                for (yy, bb) in y.iter_mut().zip(&self.basis[i]) {
                    *yy = (*yy + bb).rem_euclid(self.p);
                }
                if coeffs[i] < self.p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }
}

type MemoKey = (Vec<Vec<i64>>, i64, [i64; 3]);

fn memo() -> &'static Mutex<HashMap<MemoKey, bool>> {
    static MEMO: OnceLock<Mutex<HashMap<MemoKey, bool>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Primitive representability of `form` by `m` over `Z_p`, plus search nodes spent.
fn primitively_represented(m: &GramLattice, form: &BinaryForm, p: i64, bound: u32) -> (bool, u64) {
    let modulus = p.pow(2 * bound + 1);
    let key = (m.gram().to_vec(), p, [form.a, form.b, form.c].map(|x| x.rem_euclid(modulus)));
    if let Some(&hit) = memo().lock().expect("memo lock").get(&key) {
        return (hit, 0);
    }
    let mut search = PrimitiveSearch::new(m, form, p, bound);
    let found = search.run();
    memo().lock().expect("memo lock").insert(key, found);
    (found, search.nodes)
}

/// `l -> M` over `Z_p` for any prime `p`, by the lifting search.
pub fn lifting_represents(m: &GramLattice, form: &BinaryForm, p: i64) -> LiftReport {
    let two = u32::from(p == 2);
    let dm = valuation(m.discriminant() as i128, p as i128).expect("nondegenerate lattice");
    let bound = two + dm;
    let overs = integral_overlattices(form, p);
    let mut nodes = 0;
    let mut represented = false;
    for f in &overs {
        let (found, spent) = primitively_represented(m, f, p, bound);
        nodes += spent;
        if found {
            represented = true;
            break;
        }
    }
    LiftReport { represented, depth_bound: bound, overlattices: overs.len(), nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_space_counts() {
        // x + y = 1 over F_3, two unknowns plus a free third
        let rows = vec![vec![1, 1, 0, 1]];
        let s = AffineSpace::solve(rows, 3, 3).unwrap();
        let mut n = 0;
        s.for_each(|y| {
            assert_eq!((y[0] + y[1]) % 3, 1);
            n += 1;
        });
        assert_eq!(n, 9);
        assert!(AffineSpace::solve(vec![vec![0, 0, 1]], 2, 5).is_none());
    }

    #[test]
    fn elementary_divisors() {
        // diag(2, 12, 8) over Z_2 has valuations 1, 2, 3
        let m = vec![vec![2, 0, 0, 0], vec![0, 12, 0, 0], vec![0, 0, 8, 0]];
        assert_eq!(max_elementary_valuation(m.clone(), 2, 5), Some(3));
        assert_eq!(max_elementary_valuation(m, 2, 3), None);
        // [[2, 1], [1, 2]] is unimodular at 2 although every diagonal entry is even
        let m = vec![vec![2, 1], vec![1, 2]];
        assert_eq!(max_elementary_valuation(m, 2, 4), Some(0));
    }

    #[test]
    fn overlattices() {
        assert_eq!(integral_overlattices(&BinaryForm::new(3, 1, 7), 2), [BinaryForm::new(2, 1, 3), BinaryForm::new(3, 1, 7)]);
        // <4, 4> sits in <1, 4>, <2, 2>, <1, 1> and itself
        let o = integral_overlattices(&BinaryForm::diag(4, 4), 2);
        assert!(o.contains(&BinaryForm::diag(1, 1)));
        assert!(o.contains(&BinaryForm::diag(1, 4)));
        assert!(o.contains(&BinaryForm::diag(2, 2)));
        assert_eq!(integral_overlattices(&BinaryForm::new(2, 1, 2), 2).len(), 1);
    }

    #[test]
    fn sums_of_four_squares_represent_everything_at_odd_primes() {
        let m: GramLattice = "1,1,1,1".parse().unwrap();
        for f in [BinaryForm::new(3, 1, 3), BinaryForm::diag(3, 6), BinaryForm::diag(9, 9)] {
            assert!(lifting_represents(&m, &f, 3).represented, "{f}");
        }
    }

    #[test]
    fn step_one_congruences_at_two() {
        let m: GramLattice = "1,1,1,3".parse().unwrap();
        // [3,1,c] with c = 0,1,4,5,6 mod 8 is represented; [3,1,7] and [3,1,10] fail at 2
        assert!(lifting_represents(&m, &BinaryForm::new(3, 1, 4), 2).represented);
        assert!(lifting_represents(&m, &BinaryForm::new(3, 1, 9), 2).represented);
        assert!(!lifting_represents(&m, &BinaryForm::new(3, 1, 10), 2).represented);
        assert!(!lifting_represents(&m, &BinaryForm::new(3, 1, 7), 2).represented);
    }
}

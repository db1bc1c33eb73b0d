//! Binary forms `[a, b, c]`: the Gram matrix `((a, b), (b, c))` of a rank-2 lattice.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// A 2x2 integer matrix of determinant ±1. Columns hold the new basis in old coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodularTransform(pub [[i64; 2]; 2]);

impl UnimodularTransform {
    pub const IDENTITY: Self = Self([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let (x, y) = (self.0, rhs.0);
        let mut out = [[0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        Self(out)
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = self.0;
        Self([[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]])
    }

    /// `T^t G T`.
    pub fn apply(&self, form: &BinaryForm) -> BinaryForm {
        let m = self.0;
        let (p, q) = ((m[0][0], m[1][0]), (m[0][1], m[1][1]));
        BinaryForm::new(form.q(p), form.bilinear(p, q), form.q(q))
    }
}

impl BinaryForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// The diagonal form `<x, y>`.
    pub const fn diag(x: i64, y: i64) -> Self {
        Self::new(x, 0, y)
    }

    pub fn discriminant(&self) -> i64 {
        self.a * self.c - self.b * self.b
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() > 0
    }

    pub fn ensure_positive(&self) -> Result<()> {
        if self.discriminant() == 0 {
            return Err(Error::Degenerate(self.a, self.b, self.c));
        }
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(self.a, self.b, self.c));
        }
        Ok(())
    }

    /// `0 <= 2b <= a <= c`.
    pub fn is_reduced(&self) -> bool {
        0 <= self.b && 2 * self.b <= self.a && self.a <= self.c
    }

    /// Value of the form on the coordinate vector `(x, y)`.
    pub fn q(&self, (x, y): (i64, i64)) -> i64 {
        self.a * x * x + 2 * self.b * x * y + self.c * y * y
    }

    pub fn bilinear(&self, (x1, y1): (i64, i64), (x2, y2): (i64, i64)) -> i64 {
        self.a * x1 * x2 + self.b * (x1 * y2 + y1 * x2) + self.c * y1 * y2
    }

    /// Generator of the scale ideal: gcd of all bilinear values.
    pub fn scale_ideal(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// Generator of the norm ideal: gcd of all values of the quadratic map.
    pub fn norm_ideal(&self) -> i64 {
        self.a.gcd(&(2 * self.b)).gcd(&self.c)
    }

    pub fn scale_form(&self, k: i64) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k)
    }

    /// `[a - n s^2, b - n s t, c - n t^2]`. The result may be indefinite.
    pub fn transform_st(&self, n: i64, s: i64, t: i64) -> Self {
        Self::new(self.a - n * s * s, self.b - n * s * t, self.c - n * t * t)
    }

    /// Gauss reduction to `0 <= 2b <= a <= c`, with the transform `T` such that
    /// `T^t G T` is the reduced Gram matrix.
    pub fn minkowski_reduce(&self) -> Result<(Self, UnimodularTransform)> {
        self.ensure_positive()?;
        let mut f = *self;
        let mut t = UnimodularTransform::IDENTITY;
        loop {
            // nearest integer to b/a
            let k = (2 * f.b + f.a).div_euclid(2 * f.a);
            if k != 0 {
                let shift = UnimodularTransform([[1, -k], [0, 1]]);
                f = shift.apply(&f);
                t = t.compose(&shift);
            }
            if f.c < f.a {
                let swap = UnimodularTransform([[0, -1], [1, 0]]);
                f = swap.apply(&f);
                t = t.compose(&swap);
                continue;
            }
            break;
        }
        if f.b < 0 {
            let flip = UnimodularTransform([[1, 0], [0, -1]]);
            f = flip.apply(&f);
            t = t.compose(&flip);
        }
        debug_assert!(f.is_reduced());
        Ok((f, t))
    }

    pub fn reduced(&self) -> Result<Self> {
        Ok(self.minkowski_reduce()?.0)
    }

    pub fn is_equivalent(&self, other: &Self) -> Result<bool> {
        Ok(self.reduced()? == other.reduced()?)
    }

    /// All index-`m` sublattices up to equivalence, from the Hermite bases
    /// `v1 = d1 e1`, `v2 = e e1 + d2 e2` with `d1 d2 = m`, `0 <= e < d1`.
    pub fn sublattices_of_index(&self, m: i64) -> Result<Vec<Self>> {
        assert!(m >= 1, "index must be positive");
        self.ensure_positive()?;
        let mut out = Vec::new();
        for d1 in (1..=m).filter(|d| m % d == 0) {
            let d2 = m / d1;
            for e in 0..d1 {
                let (v1, v2) = ((d1, 0), (e, d2));
                let sub = Self::new(self.q(v1), self.bilinear(v1, v2), self.q(v2));
                out.push(sub.reduced()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// `4/3 n (s^2 + |st| + t^2)`: a reduced form with `a` strictly above this
/// value stays positive definite under `transform_st(n, s, t)`.
pub fn positivity_bound(n: i64, s: i64, t: i64) -> Ratio<i64> {
    Ratio::new(4 * n * (s * s + (s * t).abs() + t * t), 3)
}

/// Integer form of the positivity bound: `3a > 4n(s^2 + |st| + t^2)`.
pub fn exceeds_positivity_bound(a: i64, n: i64, s: i64, t: i64) -> bool {
    3 * a > 4 * n * (s * s + (s * t).abs() + t * t)
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// Accepts `[a,b,c]`, `<x,y>` (also with angle brackets `⟨x,y⟩`) and bare `a,b,c`.
impl FromStr for BinaryForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::FormSpec(s.to_string());
        let t = s.trim();
        let (body, diagonal) = if let Some(r) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            (r, false)
        } else if let Some(r) = t
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .or_else(|| t.strip_prefix('⟨').and_then(|r| r.strip_suffix('⟩')))
        {
            (r, true)
        } else {
            (t, false)
        };
        let nums = body
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (diagonal, nums.as_slice()) {
            (true, &[x, y]) => Ok(Self::diag(x, y)),
            (false, &[a, b, c]) => Ok(Self::new(a, b, c)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[i64; 3]>::deserialize(d)?;
        Ok(Self::new(a, b, c))
    }
}

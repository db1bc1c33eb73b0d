//! Integral lattices given by a symmetric Gram matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub const MAX_RANK: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
}

/// JSON shapes accepted for a lattice: a row-major matrix or `{"diag": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LatticeRepr {
    Diag { diag: Vec<i64> },
    Matrix(Vec<Vec<i64>>),
    List(Vec<i64>),
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || n > MAX_RANK {
            return Err(Error::UnsupportedRank(n));
        }
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::NotSymmetric);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { gram })
    }

    /// Like [`GramLattice::new`], also requiring positive definiteness.
    pub fn positive(gram: Vec<Vec<i64>>) -> Result<Self> {
        let l = Self::new(gram)?;
        if !l.is_positive_definite() {
            return Err(Error::IndefiniteLattice);
        }
        Ok(l)
    }

    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        Self::positive(gram)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    pub fn discriminant(&self) -> i64 {
        arith::det(&self.gram) as i64
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (0..n).all(|j| i == j || self.gram[i][j] == 0))
    }

    pub fn leading_minor(&self, k: usize) -> i128 {
        let sub: Vec<Vec<i64>> = self.gram[..k].iter().map(|r| r[..k].to_vec()).collect();
        arith::det(&sub)
    }

    pub fn is_positive_definite(&self) -> bool {
        (1..=self.rank()).all(|k| self.leading_minor(k) > 0)
    }

    /// `G v`.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.gram.iter().map(|row| dot(row, v)).collect()
    }

    pub fn bilinear(&self, v: &[i64], w: &[i64]) -> i64 {
        dot(&self.apply(v), w)
    }

    pub fn q(&self, v: &[i64]) -> i64 {
        self.bilinear(v, v)
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Result<Self> {
        let (n, m) = (self.rank(), other.rank());
        let mut gram = vec![vec![0; n + m]; n + m];
        for i in 0..n {
            gram[i][..n].copy_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            gram[n + i][n..].copy_from_slice(&other.gram[i]);
        }
        Self::new(gram)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self {
            gram: self.gram.iter().map(|r| r.iter().map(|x| x * k).collect()).collect(),
        }
    }

    /// Gram matrix of the vectors `cols` (each of length `rank`).
    pub fn gram_of(&self, cols: &[Vec<i64>]) -> Vec<Vec<i64>> {
        cols.iter()
            .map(|v| cols.iter().map(|w| self.bilinear(v, w)).collect())
            .collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str::<LatticeRepr>(s)? {
            LatticeRepr::Diag { diag } | LatticeRepr::List(diag) => Self::diagonal(&diag),
            LatticeRepr::Matrix(m) => Self::positive(m),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.gram).expect("gram matrix serializes")
    }
}

pub(crate) fn dot(v: &[i64], w: &[i64]) -> i64 {
    v.iter().zip(w).map(|(x, y)| x * y).sum()
}

impl Serialize for GramLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.gram.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let out = match repr {
            LatticeRepr::Diag { diag } | LatticeRepr::List(diag) => Self::diagonal(&diag),
            LatticeRepr::Matrix(m) => Self::positive(m),
        };
        out.map_err(serde::de::Error::custom)
    }
}

/// Comma-separated diagonal entries, e.g. `1,1,1,3,7`.
impl FromStr for GramLattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::LatticeSpec(s.to_string()))?;
        Self::diagonal(&entries)
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let d: Vec<String> = (0..self.rank()).map(|i| self.gram[i][i].to_string()).collect();
            write!(f, "<{}>", d.join(","))
        } else {
            write!(f, "{}", self.to_json())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_discriminant() {
        let l = GramLattice::diagonal(&[1, 1, 1, 3, 7]).unwrap();
        assert_eq!(l.rank(), 5);
        assert_eq!(l.discriminant(), 21);
        assert_eq!(l.to_string(), "<1,1,1,3,7>");
        assert!(l.is_positive_definite());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(GramLattice::new(vec![vec![1, 2], vec![3, 4]]), Err(Error::NotSymmetric)));
        assert!(matches!(GramLattice::positive(vec![vec![1, 2], vec![2, 1]]), Err(Error::IndefiniteLattice)));
        assert!(matches!(GramLattice::diagonal(&[1; 6]), Err(Error::UnsupportedRank(6))));
        assert!("1,x".parse::<GramLattice>().is_err());
        assert!("1,-1".parse::<GramLattice>().is_err());
    }

    #[test]
    fn json_shapes() {
        let a = GramLattice::from_json(r#"{"diag":[1,1,1,3,7]}"#).unwrap();
        let b: GramLattice = "1,1,1,3,7".parse().unwrap();
        assert_eq!(a, b);
        let k = GramLattice::from_json("[[1,0,0,0],[0,2,1,0],[0,1,2,1],[0,0,1,3]]").unwrap();
        assert_eq!(k.discriminant(), 7);
        let back: GramLattice = serde_json::from_str(&k.to_json()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn sums_and_values() {
        let m: GramLattice = "1,1,1,3".parse().unwrap();
        let l = m.orthogonal_sum(&GramLattice::diagonal(&[7]).unwrap()).unwrap();
        assert_eq!(l, "1,1,1,3,7".parse().unwrap());
        assert_eq!(l.q(&[1, 1, 1, 1, 1]), 13);
        assert_eq!(l.scaled(7).entry(4, 4), 49);
    }
}

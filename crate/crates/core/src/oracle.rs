//! Ground-truth representation tests by exhaustive enumeration.
//!
//! A binary form `[a, b, c]` is represented by `L` exactly when there are
//! `v1, v2` in `L` with `Q(v1) = a`, `B(v1, v2) = b`, `Q(v2) = c`. Both shells
//! are finite for positive definite `L`, so scanning them decides the
//! question: a hit is a certificate, a miss is a proof.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::VectorCache;
use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::lattice::{dot, GramLattice};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationCertificate {
    pub v1: Vec<i64>,
    pub v2: Vec<i64>,
}

impl RepresentationCertificate {
    pub fn image(&self, l: &GramLattice) -> BinaryForm {
        BinaryForm::new(l.q(&self.v1), l.bilinear(&self.v1, &self.v2), l.q(&self.v2))
    }

    pub fn verify(&self, l: &GramLattice, form: &BinaryForm) -> Result<()> {
        if self.v1.len() != l.rank() || self.v2.len() != l.rank() {
            return Err(Error::BadCertificate("vector length differs from lattice rank".into()));
        }
        let got = self.image(l);
        if got != *form {
            return Err(Error::BadCertificate(format!("vectors give {got}, expected {form}")));
        }
        Ok(())
    }
}

/// Record of a complete, failed search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionProof {
    /// The two norms whose shells were scanned, `[a, c]`.
    pub norms: [i64; 2],
    /// Number of lattice vectors in each shell.
    pub counts: [usize; 2],
    /// Every vector with `Q(v) <= bound` was available to the search.
    pub bound: i64,
    pub pairs_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Representation {
    Represented { certificate: RepresentationCertificate },
    NotRepresented { proof: ExhaustionProof },
}

impl Representation {
    pub fn is_represented(&self) -> bool {
        matches!(self, Self::Represented { .. })
    }

    pub fn certificate(&self) -> Option<&RepresentationCertificate> {
        match self {
            Self::Represented { certificate } => Some(certificate),
            Self::NotRepresented { .. } => None,
        }
    }
}

/// Representation oracle bound to one lattice, with its shell cache.
#[derive(Debug)]
pub struct Oracle {
    cache: VectorCache,
}

impl Oracle {
    pub fn new(lattice: GramLattice) -> Result<Self> {
        Ok(Self { cache: VectorCache::new(lattice)? })
    }

    pub fn lattice(&self) -> &GramLattice {
        self.cache.lattice()
    }

    pub fn shell(&self, m: i64) -> Arc<Vec<Vec<i64>>> {
        self.cache.shell(m)
    }

    pub fn prefill(&self, bound: i64) -> Result<()> {
        self.cache.prefill(bound)
    }

    /// Lexicographically smallest `(v1, v2)` certificate, or an exhaustion proof.
    pub fn represents(&self, form: &BinaryForm) -> Result<Representation> {
        form.ensure_positive()?;
        let l = self.lattice();
        let first = self.shell(form.a);
        let second = self.shell(form.c);
        let mut pairs = 0u64;
        for v1 in first.iter() {
            let u = l.apply(v1);
            for v2 in second.iter() {
                pairs += 1;
                if dot(&u, v2) == form.b {
                    return Ok(Representation::Represented {
                        certificate: RepresentationCertificate { v1: v1.clone(), v2: v2.clone() },
                    });
                }
            }
        }
        Ok(Representation::NotRepresented {
            proof: ExhaustionProof {
                norms: [form.a, form.c],
                counts: [first.len(), second.len()],
                bound: form.a.max(form.c),
                pairs_checked: pairs,
            },
        })
    }

    pub fn is_represented(&self, form: &BinaryForm) -> Result<bool> {
        Ok(self.represents(form)?.is_represented())
    }

    /// Vectors `v_1..v_k` of the lattice with `B(v_i, v_j) = target[i][j]`,
    /// the lexicographically first system in shell order, if any.
    pub fn embedding(&self, target: &[Vec<i64>]) -> Result<Option<Vec<Vec<i64>>>> {
        let k = target.len();
        if target.iter().any(|row| row.len() != k) {
            return Err(Error::NotSymmetric);
        }
        if target.iter().enumerate().any(|(i, row)| row[i] <= 0) {
            return Err(Error::IndefiniteLattice);
        }
        let shells: Vec<_> = (0..k).map(|i| self.shell(target[i][i])).collect();
        let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(k);
        let mut images: Vec<Vec<i64>> = Vec::with_capacity(k);
        let found = self.extend_embedding(target, &shells, &mut chosen, &mut images);
        Ok(found.then_some(chosen))
    }

    fn extend_embedding(
        &self,
        target: &[Vec<i64>],
        shells: &[Arc<Vec<Vec<i64>>>],
        chosen: &mut Vec<Vec<i64>>,
        images: &mut Vec<Vec<i64>>,
    ) -> bool {
        let i = chosen.len();
        if i == target.len() {
            return true;
        }
        for v in shells[i].iter() {
            if images.iter().enumerate().all(|(j, gu)| dot(gu, v) == target[i][j]) {
                chosen.push(v.clone());
                images.push(self.lattice().apply(v));
                if self.extend_embedding(target, shells, chosen, images) {
                    return true;
                }
                chosen.pop();
                images.pop();
            }
        }
        false
    }

    /// The `b` in `0..=a/2` for which `[a, b, c]` is not represented.
    fn missing_in_cell(&self, a: i64, c: i64) -> Vec<i64> {
        let half = (a / 2) as usize;
        let mut found = vec![false; half + 1];
        let mut remaining = half + 1;
        let l = self.lattice();
        let first = self.shell(a);
        let second = self.shell(c);
        'outer: for v1 in first.iter() {
            // v1 and -v1 yield the same |b|
            if v1.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                continue;
            }
            let u = l.apply(v1);
            for v2 in second.iter() {
                let b = dot(&u, v2).unsigned_abs() as usize;
                if b <= half && !found[b] {
                    found[b] = true;
                    remaining -= 1;
                    if remaining == 0 {
                        break 'outer;
                    }
                }
            }
        }
        (0..=half).filter(|&b| !found[b]).map(|b| b as i64).collect()
    }

    /// Reduced forms `0 <= 2b <= a <= c <= bound` not represented, sorted by `(a, c, b)`.
    /// Runs on the current rayon pool; the result does not depend on scheduling.
    pub fn exceptions_up_to(&self, bound: i64) -> Result<Vec<BinaryForm>> {
        self.prefill(bound)?;
        let cells: Vec<(i64, i64)> =
            (1..=bound).flat_map(|a| (a..=bound).map(move |c| (a, c))).collect();
        let out = cells
            .par_iter()
            .flat_map_iter(|&(a, c)| {
                self.missing_in_cell(a, c).into_iter().map(move |b| BinaryForm::new(a, b, c))
            })
            .collect();
        Ok(out)
    }
}

pub fn represents(l: &GramLattice, form: &BinaryForm) -> Result<Representation> {
    Oracle::new(l.clone())?.represents(form)
}

pub fn exceptions_up_to(l: &GramLattice, bound: i64) -> Result<Vec<BinaryForm>> {
    Oracle::new(l.clone())?.exceptions_up_to(bound)
}

/// CSV with columns `a,b,c,discriminant`.
pub fn exceptions_csv(forms: &[BinaryForm]) -> String {
    let mut s = String::from("a,b,c,discriminant\n");
    for f in forms {
        s.push_str(&format!("{},{},{},{}\n", f.a, f.b, f.c, f.discriminant()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(s: &str) -> GramLattice {
        s.parse().unwrap()
    }

    #[test]
    fn certificate_for_unit_form() {
        let r = represents(&lat("1,1,1,3,7"), &BinaryForm::new(1, 0, 1)).unwrap();
        let cert = r.certificate().unwrap();
        // smallest pair in lexicographic order
        assert_eq!(cert.v1, vec![-1, 0, 0, 0, 0]);
        assert_eq!(cert.v2, vec![0, -1, 0, 0, 0]);
        cert.verify(&lat("1,1,1,3,7"), &BinaryForm::new(1, 0, 1)).unwrap();
    }

    #[test]
    fn exception_is_exhausted() {
        let l = lat("1,1,1,3,7");
        let r = represents(&l, &BinaryForm::new(2, 1, 3)).unwrap();
        let Representation::NotRepresented { proof } = r else { panic!("expected exhaustion") };
        assert_eq!(proof.norms, [2, 3]);
        assert_eq!(proof.counts[0], vectors_len(&l, 2));
        assert_eq!(proof.pairs_checked as usize, proof.counts[0] * proof.counts[1]);
    }

    fn vectors_len(l: &GramLattice, m: i64) -> usize {
        crate::enumerate::vectors_of_norm(l, m).unwrap().len()
    }

    #[test]
    fn step_one_sample() {
        let m = lat("1,1,1,3");
        let f = BinaryForm::new(3, 1, 9);
        let r = represents(&m, &f).unwrap();
        r.certificate().unwrap().verify(&m, &f).unwrap();
    }

    #[test]
    fn rejects_degenerate_form() {
        assert!(represents(&lat("1,1"), &BinaryForm::new(1, 1, 1)).is_err());
    }

    #[test]
    fn small_survey() {
        let ex = exceptions_up_to(&lat("1,1,2,3,5"), 30).unwrap();
        let want = [BinaryForm::new(2, 1, 2), BinaryForm::new(5, 2, 5), BinaryForm::new(6, 3, 6)];
        assert_eq!(ex, want);
        assert!(exceptions_up_to(&lat("1,1,1,1,1"), 20).unwrap().is_empty());
    }

    #[test]
    fn embeddings() {
        let l = lat("1,1,1,3,7");
        let oracle = Oracle::new(l.clone()).unwrap();
        let e = oracle.embedding(l.gram()).unwrap().unwrap();
        assert_eq!(l.gram_of(&e), l.gram());
        assert_eq!(oracle.embedding(&[vec![7]]).unwrap().unwrap(), vec![vec![-2, 0, 0, -1, 0]]);
        // [2,1,3] is an exception
        assert!(oracle.embedding(&[vec![2, 1], vec![1, 3]]).unwrap().is_none());
    }

    #[test]
    fn csv_columns() {
        let s = exceptions_csv(&[BinaryForm::new(2, 1, 3)]);
        assert_eq!(s, "a,b,c,discriminant\n2,1,3,5\n");
    }
}

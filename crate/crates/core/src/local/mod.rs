//! Representability over the p-adic integers.
//!
//! For `p` not dividing `2 dM` a quaternary `M_p` is `<1, 1, 1, dM>`: it
//! represents every binary lattice when `dM` is a square mod `p`, and
//! otherwise misses exactly the sublattices of `<p, -p delta>`. At the
//! remaining primes the lifting search in [`lifting`] decides.

pub mod jordan;
pub mod lifting;
pub mod rules;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mod_pow, prime_divisors, primes_up_to};
use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::lattice::GramLattice;

pub use lifting::{lifting_represents, LiftReport};
pub use rules::{ResidueClass, Restriction, RuleSet, RuleTable};

pub(crate) fn legendre_unchecked(d: i128, p: i128) -> i128 {
    let r = mod_pow(d, ((p - 1) / 2) as u64, p);
    if r == p - 1 {
        -1
    } else {
        r
    }
}

/// Legendre symbol `(d / p)` for an odd prime `p`.
pub fn legendre(d: i64, p: i64) -> Result<i64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(legendre_unchecked(d as i128, p as i128) as i64)
}

/// Least positive quadratic nonresidue mod an odd prime.
pub fn least_nonresidue(p: i64) -> i64 {
    (2..p)
        .find(|&x| legendre_unchecked(x as i128, p as i128) == -1)
        .expect("odd primes have nonresidues")
}

/// Whether `p` is in the prime set of `d`: `p` prime, `p` not dividing `2d`, `(d/p) = -1`.
pub fn in_prime_set(d: i64, p: i64) -> bool {
    p > 2 && is_prime(p) && d % p != 0 && legendre_unchecked(d as i128, p as i128) == -1
}

/// Primes `p <= bound` with `p` not dividing `2d` and `(d/p) = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSet {
    pub discriminant: i64,
    pub bound: i64,
    pub primes: Vec<i64>,
}

impl PrimeSet {
    pub fn new(d: i64, bound: i64) -> Self {
        let primes = primes_up_to(bound).into_iter().filter(|&p| in_prime_set(d, p)).collect();
        Self { discriminant: d, bound, primes }
    }

    /// Membership for any prime, including ones above `bound`.
    pub fn contains(&self, p: i64) -> bool {
        in_prime_set(self.discriminant, p)
    }

    /// Members dividing `n`.
    pub fn divisors_of(&self, n: i64) -> Vec<i64> {
        prime_divisors(n).into_iter().filter(|&q| self.contains(q)).collect()
    }
}

pub fn prime_set(d: i64, bound: i64) -> PrimeSet {
    PrimeSet::new(d, bound)
}

/// `p` does not divide `gcd(a, b, c)`, i.e. the scale is not inside `pZ`.
pub fn is_primitive(form: &BinaryForm, p: i64) -> bool {
    form.scale_ideal() % p != 0
}

/// Whether `form` is a proper index-`p` sublattice of an integral lattice over `Z_p`:
/// some `v = (x e1 + y e2) / p` with `(x, y) != 0 mod p` has integral `Q(v)` and `B(v, L)`.
pub fn admits_integral_superlattice(form: &BinaryForm, p: i64) -> bool {
    let candidates = std::iter::once((1, 0)).chain((0..p).map(|x| (x, 1)));
    candidates.into_iter().any(|(x, y)| {
        let q = form.a * x * x + 2 * form.b * x * y + form.c * y * y;
        q.rem_euclid(p * p) == 0
            && (form.a * x + form.b * y).rem_euclid(p) == 0
            && (form.b * x + form.c * y).rem_euclid(p) == 0
    })
}

/// Primitivity in the sense the congruence tables assume: scale not inside
/// `pZ`, and not an index-`p` sublattice of an integral lattice.
pub fn is_table_primitive(form: &BinaryForm, p: i64) -> bool {
    is_primitive(form, p) && !admits_integral_superlattice(form, p)
}

/// How [`local_represents`] reached its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalMethod {
    /// `dM` is a square mod `p`, so `M_p` is 2-universal.
    SquareDiscriminant,
    /// The `<p, -p delta>` sublattice criterion.
    AnisotropicCriterion,
    /// The lifting search.
    Lifting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalAnswer {
    pub represented: bool,
    pub method: LocalMethod,
}

/// Whether `form` is represented by the quaternary `m` over `Z_p`.
pub fn local_answer(m: &GramLattice, form: &BinaryForm, p: i64) -> Result<LocalAnswer> {
    if m.rank() != 4 {
        return Err(Error::NotQuaternary(m.rank()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    form.ensure_positive()?;
    let dm = m.discriminant();
    if p != 2 && dm % p != 0 {
        if legendre_unchecked(dm as i128, p as i128) == 1 {
            return Ok(LocalAnswer { represented: true, method: LocalMethod::SquareDiscriminant });
        }
        let delta = least_nonresidue(p);
        let represented = !jordan::embeds_in_anisotropic(form, p, delta);
        return Ok(LocalAnswer { represented, method: LocalMethod::AnisotropicCriterion });
    }
    let report = lifting_represents(m, form, p);
    Ok(LocalAnswer { represented: report.represented, method: LocalMethod::Lifting })
}

pub fn local_represents(m: &GramLattice, form: &BinaryForm, p: i64) -> Result<bool> {
    Ok(local_answer(m, form, p)?.represented)
}

/// Primes at which local representability can fail: those dividing `2 dM`
/// and those dividing the discriminant of `form`.
pub fn relevant_primes(m: &GramLattice, form: &BinaryForm) -> Vec<i64> {
    let mut ps = prime_divisors(2 * m.discriminant());
    ps.extend(prime_divisors(form.discriminant()));
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Representability at every prime (the real place is automatic for positive forms).
pub fn everywhere_locally_represented(m: &GramLattice, form: &BinaryForm) -> Result<bool> {
    for p in relevant_primes(m, form) {
        if !local_represents(m, form, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1113() -> GramLattice {
        "1,1,1,3".parse().unwrap()
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(3, 5).unwrap(), -1);
        assert_eq!(legendre(3, 11).unwrap(), 1);
        assert_eq!(legendre(14, 7).unwrap(), 0);
        assert!(matches!(legendre(3, 2), Err(Error::NotOddPrime(2))));
        assert!(legendre(3, 9).is_err());
    }

    #[test]
    fn prime_set_examples() {
        assert_eq!(prime_set(3, 31).primes, vec![5, 7, 17, 19, 29, 31]);
        assert!(prime_set(1, 100).primes.is_empty());
        // (6/p) = (2/p)(3/p)
        assert_eq!(prime_set(6, 50).primes, vec![7, 11, 13, 17, 31, 37, 41]);
        assert!(prime_set(3, 1000).contains(43));
        assert_eq!(prime_set(3, 10).divisors_of(6 * 35), vec![5, 7]);
    }

    #[test]
    fn primitivity() {
        assert!(!is_primitive(&BinaryForm::new(14, 7, 21), 7));
        assert!(is_primitive(&BinaryForm::new(2, 1, 3), 2));
        assert!(is_primitive(&BinaryForm::new(7, 2, 22), 7));
        // a = c = 3 mod 4, b odd: (e1 + e2)/2 is integral
        assert!(admits_integral_superlattice(&BinaryForm::new(3, 1, 7), 2));
        assert!(!is_table_primitive(&BinaryForm::new(3, 1, 7), 2));
        assert!(is_table_primitive(&BinaryForm::new(3, 1, 5), 2));
        // in <4, 4>, e1/2 has Q = 1 and B(e1/2, e2) = 0
        assert!(admits_integral_superlattice(&BinaryForm::diag(4, 4), 2));
        assert!(!admits_integral_superlattice(&BinaryForm::new(2, 1, 2), 2));
    }

    #[test]
    fn local_examples() {
        let m = m1113();
        assert!(local_represents(&m, &BinaryForm::new(2, 1, 3), 5).unwrap());
        assert!(!local_represents(&m, &BinaryForm::diag(5, 35), 5).unwrap());
        assert!(local_represents(&m, &BinaryForm::new(3, 1, 4), 2).unwrap());
        assert!(matches!(
            local_represents(&"1,1,1".parse().unwrap(), &BinaryForm::new(1, 0, 1), 2),
            Err(Error::NotQuaternary(3))
        ));
        assert!(matches!(local_represents(&m, &BinaryForm::new(1, 0, 1), 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn anisotropic_criterion_matches_lifting() {
        let m = m1113();
        // 5 and 7 do not divide 6 and 3 is a nonresidue mod both
        for p in [5, 7] {
            for f in [
                BinaryForm::diag(5, 35),
                BinaryForm::diag(7, 7),
                BinaryForm::diag(7, 21),
                BinaryForm::new(2, 1, 3),
                BinaryForm::diag(1, 25),
                BinaryForm::new(5, 0, 10),
                BinaryForm::new(14, 7, 21),
            ] {
                let analytic = local_answer(&m, &f, p).unwrap();
                assert_eq!(analytic.method, LocalMethod::AnisotropicCriterion);
                let lifted = lifting_represents(&m, &f, p);
                assert_eq!(analytic.represented, lifted.represented, "{f} at {p}");
            }
        }
    }

    #[test]
    fn criterion_independent_of_delta() {
        for f in [BinaryForm::diag(5, 35), BinaryForm::diag(5, 10), BinaryForm::new(10, 5, 15)] {
            assert_eq!(jordan::embeds_in_anisotropic(&f, 5, 2), jordan::embeds_in_anisotropic(&f, 5, 3));
            assert_eq!(jordan::embeds_in_anisotropic(&f, 7, 3), jordan::embeds_in_anisotropic(&f, 7, 5));
        }
    }
}

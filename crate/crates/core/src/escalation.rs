//! Deciding `l -> L = M ⊥ <n>` by shifting `l` into the quaternary `M`.
//!
//! `l -> M ⊥ <n>` holds exactly when some `l_{s,t} = [a - ns^2, b - nst, c - nt^2]`
//! is represented by `M`. The congruence tables pick `(s, t)` so that `l_{s,t}`
//! is represented by `M` at 2 and 3; coprimality of `b - nst` handles the
//! primes where `dM` is a nonsquare. The chosen shift is then confirmed by the
//! oracle on `M`, and every other case goes to the oracle on `L`, so the
//! outcome is always exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{exceeds_positivity_bound, BinaryForm, UnimodularTransform};
use crate::lattice::GramLattice;
use crate::local::{is_table_primitive, PrimeSet, RuleSet};
use crate::oracle::{Oracle, Representation, RepresentationCertificate};

/// The three quinary lattices handled by a dedicated configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// `<1,1,1,3,7>`
    T2,
    /// `<1,1,2,3,5>`
    T3a,
    /// `<1,1,2,3,8>`
    T3b,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::T2, Theorem::T3a, Theorem::T3b];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::T2 => "t2",
            Theorem::T3a => "t3a",
            Theorem::T3b => "t3b",
        }
    }

    pub fn lattice(self) -> GramLattice {
        let diag: &[i64] = match self {
            Theorem::T2 => &[1, 1, 1, 3, 7],
            Theorem::T3a => &[1, 1, 2, 3, 5],
            Theorem::T3b => &[1, 1, 2, 3, 8],
        };
        GramLattice::diagonal(diag).expect("positive diagonal")
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| format!("unknown theorem `{s}` (expected t2, t3a or t3b)"))
    }
}

/// The auxiliary `K ⊥ <n'>` used for forms whose scale lies in `qZ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaledStage {
    /// `q`: forms with scale in `qZ` are written `q l'`.
    pub q: i64,
    /// Allowed `d l' mod q`.
    pub residues: Vec<i64>,
    pub inner: Box<EscalationConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EscalationConfig {
    /// `L = M ⊥ <n>`.
    pub lattice: GramLattice,
    pub quaternary: GramLattice,
    pub n: i64,
    /// Rule table ids, one per prime dividing `2 dM`.
    pub tables: Vec<String>,
    /// A prime dividing `n` at which `dM` is a nonsquare; forms must not have scale in it.
    pub hard_prime: Option<i64>,
    pub s_candidates: Vec<i64>,
    /// Forms with `a` below this go straight to the oracle on `L`.
    pub threshold: i64,
    /// Largest `|t|` tried.
    pub t_window: i64,
    pub scaled: Option<ScaledStage>,
}

impl EscalationConfig {
    pub fn for_theorem(theorem: Theorem) -> Self {
        let lattice = theorem.lattice();
        match theorem {
            Theorem::T2 => {
                let k = GramLattice::positive(vec![
                    vec![1, 0, 0, 0],
                    vec![0, 2, 1, 0],
                    vec![0, 1, 2, 1],
                    vec![0, 0, 1, 3],
                ])
                .expect("K is positive");
                let k21 = k.orthogonal_sum(&GramLattice::diagonal(&[21]).unwrap()).unwrap();
                let inner = Self {
                    lattice: k21,
                    quaternary: k,
                    n: 21,
                    tables: vec!["Step3-K-Z2".into()],
                    hard_prime: None,
                    s_candidates: vec![1, 2],
                    threshold: 30,
                    t_window: 1000,
                    scaled: None,
                };
                Self {
                    lattice,
                    quaternary: "1,1,1,3".parse().unwrap(),
                    n: 7,
                    tables: vec!["Thm2-Z2".into(), "Thm2-Z3".into()],
                    hard_prime: Some(7),
                    s_candidates: vec![2, 1],
                    threshold: 30,
                    t_window: 1000,
                    scaled: Some(ScaledStage { q: 7, residues: vec![1, 2, 4], inner: Box::new(inner) }),
                }
            }
            Theorem::T3a | Theorem::T3b => {
                let (n, table) = if theorem == Theorem::T3a { (5, "Thm3-Z2-n5") } else { (8, "Thm3-Z2-n8") };
                Self {
                    lattice,
                    quaternary: "1,1,2,3".parse().unwrap(),
                    n,
                    tables: vec![table.into(), "Thm3-Z3".into()],
                    hard_prime: None,
                    s_candidates: vec![1, 2],
                    threshold: 30,
                    t_window: 1000,
                    scaled: None,
                }
            }
        }
    }

    /// `M ⊥ <n>` must be `L` in the same coordinates, and every table must be about `M`.
    fn validate(&self, rules: &RuleSet) -> Result<()> {
        let sum = self.quaternary.orthogonal_sum(&GramLattice::diagonal(&[self.n])?)?;
        if sum != self.lattice {
            return Err(Error::LatticeSpec(format!("{} is not M ⊥ <{}>", self.lattice, self.n)));
        }
        for id in &self.tables {
            let table = rules.table(id)?;
            if table.lattice != self.quaternary || table.n.is_some_and(|n| n != self.n) {
                return Err(Error::TableData(format!("table {id} does not match the configuration")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub s: i64,
    pub t: i64,
    pub form: BinaryForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Route {
    DirectOracle,
    StEscalation { s: i64, t: i64 },
    /// Through `K ⊥ <n'>`; `s`, `t` are absent when the oracle on `K ⊥ <n'>` decided.
    ScaledK { s: Option<i64>, t: Option<i64> },
}

/// A decision for one form; certificates are in the coordinates of `L` and
/// verify against `form` itself. Exhaustion proofs are for `reduced`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub form: BinaryForm,
    pub reduced: BinaryForm,
    pub route: Route,
    #[serde(flatten)]
    pub outcome: Representation,
}

impl Decision {
    pub fn is_represented(&self) -> bool {
        self.outcome.is_represented()
    }
}

/// A configuration with its oracles and shell caches.
#[derive(Debug)]
pub struct Escalator {
    config: EscalationConfig,
    rules: RuleSet,
    primes: PrimeSet,
    whole: Oracle,
    part: Oracle,
    scaled: Option<ScaledEngine>,
}

#[derive(Debug)]
struct ScaledEngine {
    q: i64,
    residues: Vec<i64>,
    inner: Box<Escalator>,
    /// Columns of an isometry `q (K ⊥ <n'>) -> L`.
    embedding: Vec<Vec<i64>>,
}

impl Escalator {
    pub fn new(config: EscalationConfig, rules: RuleSet) -> Result<Self> {
        config.validate(&rules)?;
        let primes = PrimeSet::new(config.quaternary.discriminant(), 0);
        let whole = Oracle::new(config.lattice.clone())?;
        let part = Oracle::new(config.quaternary.clone())?;
        let scaled = match &config.scaled {
            Some(stage) => {
                let inner = Escalator::new((*stage.inner).clone(), rules.clone())?;
                let target: Vec<Vec<i64>> = inner.config.lattice.scaled(stage.q).gram().to_vec();
                let embedding = whole.embedding(&target)?.ok_or_else(|| {
                    Error::EmbeddingNotFound(format!("{} scaled by {} into {}", inner.config.lattice, stage.q, config.lattice))
                })?;
                Some(ScaledEngine { q: stage.q, residues: stage.residues.clone(), inner: Box::new(inner), embedding })
            }
            None => None,
        };
        Ok(Self { config, rules, primes, whole, part, scaled })
    }

    pub fn for_theorem(theorem: Theorem, rules: RuleSet) -> Result<Self> {
        Self::new(EscalationConfig::for_theorem(theorem), rules)
    }

    pub fn config(&self) -> &EscalationConfig {
        &self.config
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.config.lattice
    }

    /// The oracle on `L`, sharing this engine's shell cache.
    pub fn oracle(&self) -> &Oracle {
        &self.whole
    }

    /// Columns `T` with `T^t G_L T = q G_{K ⊥ <n'>}`, when the configuration has a scaled stage.
    pub fn fixed_embedding(&self) -> Option<&[Vec<i64>]> {
        self.scaled.as_ref().map(|s| s.embedding.as_slice())
    }

    /// The auxiliary stage's engine, on `K ⊥ <n'>`.
    pub fn scaled_engine(&self) -> Option<&Escalator> {
        self.scaled.as_ref().map(|s| s.inner.as_ref())
    }

    /// First `(s, t)` in search order meeting every table, the coprimality
    /// condition and positivity. `None` is not a claim of non-representation.
    pub fn find_st(&self, form: &BinaryForm) -> Option<Shift> {
        let cfg = &self.config;
        let n = cfg.n;
        let BinaryForm { a, b, c } = *form;
        if cfg.hard_prime.is_some_and(|q| form.scale_ideal() % q == 0) {
            return None;
        }
        for &s in &cfg.s_candidates {
            let a1 = a - n * s * s;
            if a1 <= 0 {
                continue;
            }
            let watch: Vec<i64> =
                self.primes.divisors_of(a1).into_iter().filter(|&p| Some(p) != cfg.hard_prime).collect();
            for t in t_order(cfg.t_window) {
                if c - n * t * t <= 0 {
                    break;
                }
                let tables_ok = cfg.tables.iter().all(|id| self.rules.table(id).is_ok_and(|tb| tb.check(form, s, t)));
                if !tables_ok {
                    continue;
                }
                let b1 = b - n * s * t;
                if watch.iter().any(|&p| b1 % p == 0) {
                    continue;
                }
                let shifted = form.transform_st(n, s, t);
                if exceeds_positivity_bound(a, n, s, t) || shifted.is_positive_definite() {
                    return Some(Shift { s, t, form: shifted });
                }
            }
        }
        None
    }

    /// Certificate in `L` from one for `l_{s,t}` in `M`: append `s` and `t` as the last coordinate.
    fn lift_shift(cert: &RepresentationCertificate, s: i64, t: i64) -> RepresentationCertificate {
        let mut v1 = cert.v1.clone();
        let mut v2 = cert.v2.clone();
        v1.push(s);
        v2.push(t);
        RepresentationCertificate { v1, v2 }
    }

    /// Try the shift route on a reduced form.
    fn via_shift(&self, r: &BinaryForm) -> Result<Option<(Shift, RepresentationCertificate)>> {
        if r.a < self.config.threshold || !is_table_primitive(r, 2) {
            return Ok(None);
        }
        let Some(shift) = self.find_st(r) else {
            return Ok(None);
        };
        Ok(match self.part.represents(&shift.form)? {
            Representation::Represented { certificate } => {
                Some((shift, Self::lift_shift(&certificate, shift.s, shift.t)))
            }
            Representation::NotRepresented { .. } => None,
        })
    }

    fn decide_reduced(&self, r: &BinaryForm) -> Result<(Route, Representation)> {
        if let Some(scaled) = &self.scaled {
            if r.scale_ideal() % scaled.q == 0 {
                if let Some((route, cert)) = self.via_scaled(scaled, r)? {
                    return Ok((route, Representation::Represented { certificate: cert }));
                }
                return Ok((Route::DirectOracle, self.whole.represents(r)?));
            }
        }
        if let Some((shift, certificate)) = self.via_shift(r)? {
            let route = Route::StEscalation { s: shift.s, t: shift.t };
            return Ok((route, Representation::Represented { certificate }));
        }
        Ok((Route::DirectOracle, self.whole.represents(r)?))
    }

    fn via_scaled(&self, scaled: &ScaledEngine, r: &BinaryForm) -> Result<Option<(Route, RepresentationCertificate)>> {
        let q = scaled.q;
        let inner_form = BinaryForm::new(r.a / q, r.b / q, r.c / q);
        if !scaled.residues.contains(&inner_form.discriminant().rem_euclid(q)) {
            return Ok(None);
        }
        let inner = &scaled.inner;
        let (route, cert) = if let Some((shift, cert)) = inner.via_shift(&inner_form)? {
            (Route::ScaledK { s: Some(shift.s), t: Some(shift.t) }, cert)
        } else {
            match inner.whole.represents(&inner_form)? {
                Representation::Represented { certificate } => (Route::ScaledK { s: None, t: None }, certificate),
                Representation::NotRepresented { .. } => return Ok(None),
            }
        };
        let map = |y: &[i64]| -> Vec<i64> {
            let rank = self.config.lattice.rank();
            (0..rank).map(|i| scaled.embedding.iter().zip(y).map(|(col, &k)| col[i] * k).sum()).collect()
        };
        Ok(Some((route, RepresentationCertificate { v1: map(&cert.v1), v2: map(&cert.v2) })))
    }

    /// Exact decision of `form -> L`, with the route taken.
    pub fn decide(&self, form: &BinaryForm) -> Result<Decision> {
        let (reduced, t) = form.minkowski_reduce()?;
        let (route, outcome) = self.decide_reduced(&reduced)?;
        let outcome = match outcome {
            Representation::Represented { certificate } => {
                let certificate = pull_back(&certificate, &t);
                debug_assert!(certificate.verify(self.lattice(), form).is_ok());
                Representation::Represented { certificate }
            }
            other => other,
        };
        Ok(Decision { form: *form, reduced, route, outcome })
    }

    /// The route for forms whose scale lies in `qZ`: descale, try the
    /// auxiliary lattice, push through the fixed embedding, else ask `L`.
    pub fn scaled_route(&self, form: &BinaryForm) -> Result<Decision> {
        let Some(scaled) = &self.scaled else {
            return Err(Error::Precondition("configuration has no scaled stage".into()));
        };
        if form.scale_ideal() % scaled.q != 0 {
            return Err(Error::Precondition(format!("scale of {form} is not in {}Z", scaled.q)));
        }
        self.decide(form)
    }
}

/// `0, 1, -1, 2, -2, ...` up to `|t| <= window`.
fn t_order(window: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=window).flat_map(|k| [k, -k]))
}

/// Given `W` representing `T^t G T`, returns `W T^{-1}`, which represents `G`.
fn pull_back(cert: &RepresentationCertificate, t: &UnimodularTransform) -> RepresentationCertificate {
    let inv = t.inverse().0;
    let combine = |x: i64, y: i64| -> Vec<i64> { cert.v1.iter().zip(&cert.v2).map(|(p, q)| p * x + q * y).collect() };
    RepresentationCertificate { v1: combine(inv[0][0], inv[1][0]), v2: combine(inv[0][1], inv[1][1]) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(t: Theorem) -> Escalator {
        Escalator::for_theorem(t, RuleSet::builtin()).unwrap()
    }

    #[test]
    fn t_order_alternates() {
        assert_eq!(t_order(2).collect::<Vec<_>>(), vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn configs_are_consistent() {
        for t in Theorem::ALL {
            let e = engine(t);
            assert_eq!(e.config().lattice, t.lattice());
        }
        assert!(engine(Theorem::T3a).fixed_embedding().is_none());
    }

    #[test]
    fn fixed_embedding_is_exact() {
        let e = engine(Theorem::T2);
        let cols = e.fixed_embedding().unwrap();
        let k21 = &e.scaled_engine().unwrap().config().lattice;
        assert_eq!(e.lattice().gram_of(cols), k21.scaled(7).gram());
    }

    #[test]
    fn pull_back_inverts_reduction() {
        let l: GramLattice = "1,1,1,3,7".parse().unwrap();
        let e = engine(Theorem::T2);
        for f in [BinaryForm::new(10, 5, 11), BinaryForm::new(3, 4, 10), BinaryForm::new(11, -5, 10), BinaryForm::new(40, 33, 50)] {
            let d = e.decide(&f).unwrap();
            d.outcome.certificate().unwrap().verify(&l, &f).unwrap();
        }
    }

    #[test]
    fn small_a_bypasses_search() {
        let e = engine(Theorem::T2);
        let d = e.decide(&BinaryForm::new(10, 5, 11)).unwrap();
        assert_eq!(d.route, Route::DirectOracle);
        assert!(d.is_represented());
        assert!(!e.decide(&BinaryForm::new(10, 5, 47)).unwrap().is_represented());
        assert!(!engine(Theorem::T3b).decide(&BinaryForm::new(25, 3, 25)).unwrap().is_represented());
    }

    #[test]
    fn k_equal_zero_picks_two_one() {
        // a - 28 = 6 has no prime p with (3/p) = -1
        let e = engine(Theorem::T2);
        let f = BinaryForm::new(34, 1, 37);
        let shift = e.find_st(&f).unwrap();
        assert_eq!((shift.s, shift.t), (2, 1));
        let d = e.decide(&f).unwrap();
        assert_eq!(d.route, Route::StEscalation { s: 2, t: 1 });
    }

    #[test]
    fn parity_and_mod_three_classes() {
        // (a,b,c) = (0,1,1) mod 2 and (1,2,1) mod 3, with a = 2 mod 4 and c = 3 mod 8
        let f = BinaryForm::new(70, 17, 91);
        assert_eq!((f.a % 2, f.b % 2, f.c % 2), (0, 1, 1));
        assert_eq!((f.a % 3, f.b % 3, f.c % 3), (1, 2, 1));
        let e = engine(Theorem::T2);
        let shift = e.find_st(&f).unwrap();
        assert_eq!(shift.s, 2);
        assert_eq!(shift.t.rem_euclid(6), 5);
        let m = e.config().quaternary.clone();
        assert!(crate::local::local_represents(&m, &shift.form, 3).unwrap());
        // same classes; here t = 1 would fail over Z_3
        let g = BinaryForm::new(34, 5, 43);
        assert!(!crate::local::local_represents(&m, &g.transform_st(7, 2, 1), 3).unwrap());
        // and c is too small for a positive shift with t = 5 mod 6
        assert!(e.find_st(&g).is_none());
    }

    #[test]
    fn scaled_route() {
        let e = engine(Theorem::T2);
        let f = BinaryForm::diag(7, 14);
        let d = e.decide(&f).unwrap();
        assert_eq!(d.route, Route::ScaledK { s: None, t: None });
        d.outcome.certificate().unwrap().verify(e.lattice(), &f).unwrap();
        // K has a single pair of norm-1 vectors, so <1,1> misses K ⊥ <21>
        let d = e.decide(&BinaryForm::diag(7, 7)).unwrap();
        assert_eq!(d.route, Route::DirectOracle);
        assert!(d.is_represented());
        // both fail in K ⊥ <21>, and are caught by the oracle on L
        for f in [BinaryForm::diag(35, 427), BinaryForm::new(63, 14, 91)] {
            let d = e.scaled_route(&f).unwrap();
            assert_eq!(d.route, Route::DirectOracle);
            assert!(d.is_represented());
        }
        assert!(e.scaled_route(&BinaryForm::new(10, 5, 11)).is_err());
        assert!(engine(Theorem::T3a).scaled_route(&BinaryForm::diag(7, 14)).is_err());
    }

    #[test]
    fn hard_prime_blocks_search() {
        let e = engine(Theorem::T2);
        assert!(e.find_st(&BinaryForm::new(70, 14, 91)).is_none());
    }

    #[test]
    fn decision_json_shape() {
        let e = engine(Theorem::T2);
        let d = e.decide(&BinaryForm::new(34, 1, 37)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["route"]["kind"], "st-escalation");
        assert_eq!(v["outcome"], "represented");
        assert!(v["certificate"]["v1"].is_array());
    }
}

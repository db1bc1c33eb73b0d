//! Re-deriving exception lists up to a bound and checking the auxiliary claims.
//!
//! Reports serialize deterministically: lists are sorted, certificates are the
//! lexicographically first ones, and timing is kept out of the JSON.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escalation::{Escalator, Route, Theorem};
use crate::form::BinaryForm;
use crate::lattice::GramLattice;
use crate::local::RuleSet;
use crate::oracle::{Oracle, Representation};

pub const DEFAULT_BOUND: i64 = 100;

/// Carried by every report.
pub const SCOPE_NOTE: &str =
    "only reduced forms with c <= bound were enumerated; nothing is claimed about forms beyond the bound";

const EXPECTED_DATA: &str = include_str!("../data/expected.json");

#[derive(Deserialize)]
struct ExpectedData {
    t2: Vec<String>,
    t3a: Vec<String>,
    t3b: Vec<String>,
    table1: Vec<Table1Group>,
    k_exceptions: Vec<String>,
}

#[derive(Deserialize)]
struct Table1Group {
    group: u8,
    lattices: Vec<String>,
}

fn expected_data() -> ExpectedData {
    serde_json::from_str(EXPECTED_DATA).expect("bundled expectations parse")
}

/// Order used in every list: `(a, c, b)`.
fn survey_key(f: &BinaryForm) -> (i64, i64, i64) {
    (f.a, f.c, f.b)
}

fn normalize(forms: &[String]) -> Vec<BinaryForm> {
    let set: BTreeSet<(i64, i64, i64)> = forms
        .iter()
        .map(|s| {
            let f: BinaryForm = s.parse().expect("bundled form parses");
            survey_key(&f.reduced().expect("bundled form is positive"))
        })
        .collect();
    set.into_iter().map(|(a, c, b)| BinaryForm::new(a, b, c)).collect()
}

/// The published exception list, reduced and sorted by `(a, c, b)`.
pub fn expected_exceptions(theorem: Theorem) -> Vec<BinaryForm> {
    let data = expected_data();
    let raw = match theorem {
        Theorem::T2 => data.t2,
        Theorem::T3a => data.t3a,
        Theorem::T3b => data.t3b,
    };
    normalize(&raw)
}

/// Reduced forms `0 <= 2b <= a <= c <= bound`, sorted by `(a, c, b)`.
pub fn reduced_forms(bound: i64) -> Vec<BinaryForm> {
    (1..=bound)
        .flat_map(|a| (a..=bound).flat_map(move |c| (0..=a / 2).map(move |b| BinaryForm::new(a, b, c))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionSummary {
    pub form: BinaryForm,
    /// Sizes of the two shells scanned.
    pub shell_sizes: [usize; 2],
    pub pairs_checked: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteCounts {
    pub direct_oracle: usize,
    pub st_escalation: usize,
    pub scaled_k: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub lattice: GramLattice,
    pub bound: i64,
    /// Published list, restricted to `c <= bound`.
    pub expected: Vec<BinaryForm>,
    pub computed: Vec<BinaryForm>,
    pub missing: Vec<BinaryForm>,
    pub unexpected: Vec<BinaryForm>,
    pub matches: bool,
    pub exhaustion: Vec<ExhaustionSummary>,
    /// Forms on which the shift procedure was compared with the survey.
    pub decisions_checked: usize,
    pub decision_mismatches: Vec<BinaryForm>,
    pub routes: RouteCounts,
    pub note: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TheoremReport {
    pub fn ok(&self) -> bool {
        self.matches && self.decision_mismatches.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |v: &[BinaryForm]| v.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{} {} bound {}: {}", self.theorem, self.lattice, self.bound, verdict(self.ok()));
        let _ = writeln!(s, "  computed ({}): {}", self.computed.len(), list(&self.computed));
        if !self.missing.is_empty() {
            let _ = writeln!(s, "  missing: {}", list(&self.missing));
        }
        if !self.unexpected.is_empty() {
            let _ = writeln!(s, "  unexpected: {}", list(&self.unexpected));
        }
        let r = &self.routes;
        let _ = writeln!(
            s,
            "  decide agreed on {}/{} forms (direct {}, shift {}, scaled {})",
            self.decisions_checked - self.decision_mismatches.len(),
            self.decisions_checked,
            r.direct_oracle,
            r.st_escalation,
            r.scaled_k
        );
        let _ = writeln!(s, "  elapsed {:.2?}", self.elapsed);
        let _ = writeln!(s, "  note: {}", self.note);
        s
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "match"
    } else {
        "MISMATCH"
    }
}

/// Survey `L` up to `bound`, compare with the published list, and run the
/// shift procedure on every reduced form in range.
pub fn verify_theorem(theorem: Theorem, bound: i64, rules: &RuleSet) -> Result<TheoremReport> {
    let start = Instant::now();
    let engine = Escalator::for_theorem(theorem, rules.clone())?;
    verify_with(&engine, theorem, bound, start)
}

fn verify_with(engine: &Escalator, theorem: Theorem, bound: i64, start: Instant) -> Result<TheoremReport> {
    let oracle = engine.oracle();
    let computed = oracle.exceptions_up_to(bound)?;
    let expected: Vec<BinaryForm> = expected_exceptions(theorem).into_iter().filter(|f| f.c <= bound).collect();
    let computed_set: BTreeSet<BinaryForm> = computed.iter().copied().collect();
    let expected_set: BTreeSet<BinaryForm> = expected.iter().copied().collect();
    let missing: Vec<BinaryForm> = expected.iter().filter(|f| !computed_set.contains(f)).copied().collect();
    let unexpected: Vec<BinaryForm> = computed.iter().filter(|f| !expected_set.contains(f)).copied().collect();

    let exhaustion = computed
        .iter()
        .map(|f| match oracle.represents(f)? {
            Representation::NotRepresented { proof } => Ok(ExhaustionSummary {
                form: *f,
                shell_sizes: proof.counts,
                pairs_checked: proof.pairs_checked,
            }),
            Representation::Represented { .. } => {
                Err(Error::BadCertificate(format!("survey and single-form oracle disagree on {f}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let forms = reduced_forms(bound);
    let outcomes = forms
        .par_iter()
        .map(|f| {
            let d = engine.decide(f)?;
            let sound = match d.outcome.certificate() {
                Some(cert) => cert.verify(engine.lattice(), f).is_ok(),
                None => true,
            };
            let agrees = sound && d.is_represented() != computed_set.contains(f);
            Ok((*f, d.route, agrees))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut routes = RouteCounts::default();
    let mut decision_mismatches = Vec::new();
    for (f, route, agrees) in &outcomes {
        match route {
            Route::DirectOracle => routes.direct_oracle += 1,
            Route::StEscalation { .. } => routes.st_escalation += 1,
            Route::ScaledK { .. } => routes.scaled_k += 1,
        }
        if !agrees {
            decision_mismatches.push(*f);
        }
    }

    Ok(TheoremReport {
        theorem,
        lattice: engine.lattice().clone(),
        bound,
        matches: missing.is_empty() && unexpected.is_empty(),
        expected,
        computed,
        missing,
        unexpected,
        exhaustion,
        decisions_checked: outcomes.len(),
        decision_mismatches,
        routes,
        note: SCOPE_NOTE.to_string(),
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table1Row {
    pub group: u8,
    pub lattice: GramLattice,
    pub exceptions: Vec<BinaryForm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table1Report {
    pub bound: i64,
    pub rows: Vec<Table1Row>,
    /// Every group-1 lattice has no exceptions and every other lattice has some.
    pub consistent: bool,
    pub note: String,
}

impl Table1Report {
    pub fn to_text(&self) -> String {
        let mut s = format!("table1 bound {}: {}\n", self.bound, verdict(self.consistent));
        for row in &self.rows {
            let _ = writeln!(s, "  group {} {}: {} exceptions", row.group, row.lattice, row.exceptions.len());
        }
        let _ = writeln!(s, "  note: {}", self.note);
        s
    }
}

/// Exception counts for the fourteen diagonal quinaries.
pub fn verify_table1(bound: i64) -> Result<Table1Report> {
    let data = expected_data();
    let mut rows = Vec::new();
    for group in &data.table1 {
        for spec in &group.lattices {
            let lattice: GramLattice = spec.parse()?;
            let exceptions = Oracle::new(lattice.clone())?.exceptions_up_to(bound)?;
            rows.push(Table1Row { group: group.group, lattice, exceptions });
        }
    }
    let consistent = rows.iter().all(|r| (r.group == 1) == r.exceptions.is_empty());
    Ok(Table1Report { bound, rows, consistent, note: SCOPE_NOTE.to_string() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeCheck {
    pub exception: BinaryForm,
    pub index: i64,
    pub sublattice: BinaryForm,
    pub represented: bool,
    /// The sublattice is itself on the published list.
    pub listed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SublatticeReport {
    pub theorem: Theorem,
    pub max_power: u32,
    /// Each listed exception is itself not represented.
    pub exceptions_confirmed: bool,
    pub checks: Vec<SublatticeCheck>,
    /// Sublattices that are neither represented nor listed.
    pub failures: Vec<SublatticeCheck>,
}

impl SublatticeReport {
    pub fn ok(&self) -> bool {
        self.exceptions_confirmed && self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let listed = self.checks.iter().filter(|c| c.listed).count();
        let mut s = format!(
            "{} sublattices of index 2^k, k <= {}: {} ({} classes checked, {} of them listed exceptions)\n",
            self.theorem,
            self.max_power,
            verdict(self.ok()),
            self.checks.len(),
            listed
        );
        for f in &self.failures {
            let _ = writeln!(s, "  {} in {} (index {}) is neither represented nor listed", f.sublattice, f.exception, f.index);
        }
        s
    }
}

/// Every sublattice of index `2^k`, `1 <= k <= max_power`, of every listed
/// exception is represented, unless it is itself on the list (`<4,6>` sits in
/// `<1,6>` with index 2, and both are exceptions).
pub fn verify_sublattice_claim(theorem: Theorem, max_power: u32) -> Result<SublatticeReport> {
    let oracle = Oracle::new(theorem.lattice())?;
    let exceptions = expected_exceptions(theorem);
    let exceptions_confirmed = exceptions
        .iter()
        .map(|f| oracle.is_represented(f).map(|r| !r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|x| x);
    let mut jobs = Vec::new();
    for ex in &exceptions {
        for k in 1..=max_power {
            let index = 1i64 << k;
            for sub in ex.sublattices_of_index(index)? {
                jobs.push((*ex, index, sub));
            }
        }
    }
    let checks = jobs
        .par_iter()
        .map(|&(exception, index, sublattice)| {
            Ok(SublatticeCheck {
                exception,
                index,
                sublattice,
                represented: oracle.is_represented(&sublattice)?,
                listed: exceptions.contains(&sublattice),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = checks.iter().filter(|c| !c.represented && !c.listed).cloned().collect();
    Ok(SublatticeReport { theorem, max_power, exceptions_confirmed, checks, failures })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KExceptionCheck {
    pub form: BinaryForm,
    pub in_auxiliary: Representation,
    pub scaled: BinaryForm,
    pub in_lattice: Representation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KExceptionReport {
    pub auxiliary: GramLattice,
    pub lattice: GramLattice,
    /// Columns `T` with `T^t G_L T = 7 G_aux`.
    pub embedding: Vec<Vec<i64>>,
    pub embedding_verified: bool,
    pub checks: Vec<KExceptionCheck>,
    pub ok: bool,
}

impl KExceptionReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("auxiliary {} into {}: {}\n", self.auxiliary, self.lattice, verdict(self.ok));
        let _ = writeln!(s, "  scaled embedding verified: {}", self.embedding_verified);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {} by auxiliary: {}; {} by lattice: {}",
                c.form,
                c.in_auxiliary.is_represented(),
                c.scaled,
                c.in_lattice.is_represented()
            );
        }
        s
    }
}

/// Columns `T` with `T^t G_L T = q G_aux` for the scaled stage of `engine`, checked exactly.
pub fn verify_fixed_embedding(engine: &Escalator) -> Result<Vec<Vec<i64>>> {
    let (Some(stage), Some(inner)) = (engine.config().scaled.as_ref(), engine.scaled_engine()) else {
        return Err(Error::EmbeddingNotFound("configuration has no scaled stage".into()));
    };
    let target = inner.lattice().scaled(stage.q);
    let t = engine
        .oracle()
        .embedding(target.gram())?
        .ok_or_else(|| Error::EmbeddingNotFound(format!("{} into {}", target, engine.lattice())))?;
    if engine.lattice().gram_of(&t) != target.gram() {
        return Err(Error::BadCertificate("embedding Gram matrix differs".into()));
    }
    Ok(t)
}

/// The scaled embedding, and the two auxiliary exceptions whose scalings `L` still represents.
pub fn verify_k_exceptions(rules: &RuleSet) -> Result<KExceptionReport> {
    let engine = Escalator::for_theorem(Theorem::T2, rules.clone())?;
    verify_k_with(&engine)
}

fn verify_k_with(engine: &Escalator) -> Result<KExceptionReport> {
    let inner = engine.scaled_engine().expect("configuration has a scaled stage");
    let q = engine.config().scaled.as_ref().map(|s| s.q).unwrap_or(7);
    let embedding = verify_fixed_embedding(engine)?;
    let embedding_verified = engine.fixed_embedding() == Some(embedding.as_slice());
    let mut checks = Vec::new();
    for f in normalize(&expected_data().k_exceptions) {
        let scaled = f.scale_form(q);
        checks.push(KExceptionCheck {
            form: f,
            in_auxiliary: inner.oracle().represents(&f)?,
            scaled,
            in_lattice: engine.oracle().represents(&scaled)?,
        });
    }
    let ok = embedding_verified
        && checks.iter().all(|c| !c.in_auxiliary.is_represented() && c.in_lattice.is_represented());
    Ok(KExceptionReport {
        auxiliary: inner.lattice().clone(),
        lattice: engine.lattice().clone(),
        embedding,
        embedding_verified,
        checks,
        ok,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullReport {
    pub bound: i64,
    pub theorems: Vec<TheoremReport>,
    pub sublattices: Vec<SublatticeReport>,
    pub table1: Table1Report,
    pub auxiliary: KExceptionReport,
}

impl FullReport {
    pub fn ok(&self) -> bool {
        self.theorems.iter().all(TheoremReport::ok)
            && self.sublattices.iter().all(SublatticeReport::ok)
            && self.table1.consistent
            && self.auxiliary.ok
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.theorems {
            s += &t.to_text();
        }
        for r in &self.sublattices {
            s += &r.to_text();
        }
        s += &self.table1.to_text();
        s += &self.auxiliary.to_text();
        s
    }
}

/// Everything: the three lists, index-2 sublattices, the table survey and the auxiliary claims.
pub fn verify_all(bound: i64, rules: &RuleSet) -> Result<FullReport> {
    let mut theorems = Vec::new();
    let mut auxiliary = None;
    for t in Theorem::ALL {
        let start = Instant::now();
        let engine = Escalator::for_theorem(t, rules.clone())?;
        theorems.push(verify_with(&engine, t, bound, start)?);
        if t == Theorem::T2 {
            auxiliary = Some(verify_k_with(&engine)?);
        }
    }
    let sublattices = Theorem::ALL.iter().map(|&t| verify_sublattice_claim(t, 1)).collect::<Result<Vec<_>>>()?;
    Ok(FullReport {
        bound,
        theorems,
        sublattices,
        table1: verify_table1(bound)?,
        auxiliary: auxiliary.expect("t2 is always checked"),
    })
}

//! Congruence rule tables: sufficient conditions on `(a, b, c)` and `(s, t)`
//! under which `[a - ns^2, b - nst, c - nt^2]` is represented by `M` over `Z_p`.
//!
//! Tables live in a versioned JSON file, one record per source row. The
//! built-in copy is compiled in; `QUINREP_TABLES` or an explicit path
//! overrides it.

use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::lattice::GramLattice;

pub const BUILTIN_TABLES: &str = include_str!("../../data/tables.json");
pub const TABLES_ENV: &str = "QUINREP_TABLES";
pub const SUPPORTED_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    /// the product `a c`
    #[serde(rename = "ac")]
    AcProduct,
    /// the product `s t`
    #[serde(rename = "st")]
    StProduct,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "a,b,c")]
    Abc,
    #[serde(rename = "a,c")]
    Ac,
    #[serde(rename = "s,t")]
    St,
}

impl Field {
    fn arity(self) -> usize {
        match self {
            Field::Abc => 3,
            Field::Ac | Field::St => 2,
            _ => 1,
        }
    }

    fn on_shift(self) -> bool {
        matches!(self, Field::S | Field::T | Field::St | Field::StProduct)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Residues {
    Scalars(Vec<i64>),
    Tuples(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub on: Field,
    #[serde(rename = "mod")]
    pub modulus: i64,
    #[serde(rename = "in")]
    pub residues: Residues,
}

#[derive(Clone, Copy, Debug)]
struct Point {
    a: i64,
    b: i64,
    c: i64,
    s: i64,
    t: i64,
}

impl Atom {
    fn tuples(&self) -> Vec<Vec<i64>> {
        match &self.residues {
            Residues::Scalars(v) => v.iter().map(|&x| vec![x]).collect(),
            Residues::Tuples(v) => v.clone(),
        }
    }

    fn holds(&self, p: &Point) -> bool {
        let m = self.modulus;
        let r = |x: i64| x.rem_euclid(m);
        let value: Vec<i64> = match self.on {
            Field::A => vec![r(p.a)],
            Field::B => vec![r(p.b)],
            Field::C => vec![r(p.c)],
            Field::AcProduct => vec![r(r(p.a) * r(p.c))],
            Field::StProduct => vec![r(r(p.s) * r(p.t))],
            Field::S => vec![r(p.s)],
            Field::T => vec![r(p.t)],
            Field::Abc => vec![r(p.a), r(p.b), r(p.c)],
            Field::Ac => vec![r(p.a), r(p.c)],
            Field::St => vec![r(p.s), r(p.t)],
        };
        match &self.residues {
            Residues::Scalars(v) => value.len() == 1 && v.contains(&value[0]),
            Residues::Tuples(v) => v.contains(&value),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.modulus < 1 {
            return Err(Error::TableData(format!("non-positive modulus {}", self.modulus)));
        }
        for t in self.tuples() {
            if t.len() != self.on.arity() {
                return Err(Error::TableData(format!("residue {t:?} has wrong arity for {:?}", self.on)));
            }
            if t.iter().any(|&x| x < 0 || x >= self.modulus) {
                return Err(Error::TableData(format!("residue {t:?} out of range mod {}", self.modulus)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub label: String,
    /// Disjunction of conjunctions.
    pub clauses: Vec<Vec<Atom>>,
}

impl Rule {
    fn holds(&self, p: &Point) -> bool {
        self.clauses.iter().any(|cl| cl.iter().all(|atom| atom.holds(p)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleTable {
    pub id: String,
    pub prime: i64,
    /// The `n` of the transform, when the table is tied to one.
    pub n: Option<i64>,
    pub lattice: GramLattice,
    pub rules: Vec<Rule>,
}

/// A residue class of forms, `(a, b, c) mod modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    pub modulus: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl RuleTable {
    fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.rules.iter().flat_map(|r| r.clauses.iter().flatten())
    }

    /// Modulus that determines every condition on `(a, b, c)`.
    pub fn form_modulus(&self) -> i64 {
        self.atoms().filter(|a| !a.on.on_shift()).fold(1, |m, a| m.lcm(&a.modulus))
    }

    /// Modulus that determines every condition on `(s, t)`.
    pub fn shift_modulus(&self) -> i64 {
        self.atoms().filter(|a| a.on.on_shift()).fold(1, |m, a| m.lcm(&a.modulus))
    }

    /// The first row matching `(a, b, c, s, t)` exactly as written.
    pub fn matching_rule_literal(&self, form: &BinaryForm, s: i64, t: i64) -> Option<&str> {
        let p = Point { a: form.a, b: form.b, c: form.c, s, t };
        self.rules.iter().find(|r| r.holds(&p)).map(|r| r.label.as_str())
    }

    /// Like [`RuleTable::matching_rule_literal`], closed under the isometries
    /// `[a,b,c] ~ [c,b,a]` (with `s <-> t`) and `[a,b,c] ~ [a,-b,c]` (with `t -> -t`),
    /// both of which carry the transformed form to an isometric one.
    pub fn matching_rule(&self, form: &BinaryForm, s: i64, t: i64) -> Option<&str> {
        let BinaryForm { a, b, c } = *form;
        let variants = [
            (BinaryForm::new(a, b, c), s, t),
            (BinaryForm::new(c, b, a), t, s),
            (BinaryForm::new(a, -b, c), s, -t),
            (BinaryForm::new(c, -b, a), -t, s),
        ];
        variants
            .iter()
            .find_map(|(f, s, t)| self.matching_rule_literal(f, *s, *t))
    }

    pub fn check(&self, form: &BinaryForm, s: i64, t: i64) -> bool {
        self.matching_rule(form, s, t).is_some()
    }

    /// Residue classes of `(a, b, c)` for which no `(s, t)` satisfies any row.
    /// With `literal`, the isometry closure of [`RuleTable::matching_rule`] is not applied.
    pub fn coverage_gaps(&self, restriction: Restriction, literal: bool) -> Vec<ResidueClass> {
        let p = self.prime;
        let mut modulus = self.form_modulus();
        if restriction != Restriction::All {
            modulus = modulus.lcm(&(p * p));
        }
        let sm = self.shift_modulus();
        let mut gaps = Vec::new();
        for a in 0..modulus {
            for b in 0..modulus {
                for c in 0..modulus {
                    let form = BinaryForm::new(a, b, c);
                    let skip = match restriction {
                        Restriction::All => false,
                        Restriction::ScalePrimitive => !super::is_primitive(&form, p),
                        Restriction::Primitive => !super::is_table_primitive(&form, p),
                    };
                    if skip {
                        continue;
                    }
                    let covered = (0..sm).any(|s| {
                        (0..sm).any(|t| {
                            if literal {
                                self.matching_rule_literal(&form, s, t).is_some()
                            } else {
                                self.check(&form, s, t)
                            }
                        })
                    });
                    if !covered {
                        gaps.push(ResidueClass { modulus, a, b, c });
                    }
                }
            }
        }
        gaps
    }
}

/// Which residue classes a coverage check ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    All,
    /// Scale not inside `pZ`.
    ScalePrimitive,
    /// Scale not inside `pZ` and no integral index-`p` over-lattice
    /// (see [`super::is_table_primitive`]).
    Primitive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleSet {
    pub version: u32,
    pub tables: Vec<RuleTable>,
}

impl RuleSet {
    pub fn parse(json: &str) -> Result<Self> {
        let set: RuleSet = serde_json::from_str(json)?;
        if set.version != SUPPORTED_VERSION {
            return Err(Error::TableData(format!("unsupported table version {}", set.version)));
        }
        for table in &set.tables {
            if table.prime != 2 && table.prime != 3 {
                return Err(Error::TableData(format!("{}: prime must be 2 or 3", table.id)));
            }
            for atom in table.atoms() {
                atom.validate().map_err(|e| Error::TableData(format!("{}: {e}", table.id)))?;
            }
        }
        Ok(set)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TABLES).expect("built-in tables are valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `QUINREP_TABLES` when set, the built-in tables otherwise.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TABLES_ENV) {
            Some(p) => Self::from_path(Path::new(&p)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn table(&self, id: &str) -> Result<&RuleTable> {
        self.tables
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownTable(id.to_string()))
    }

    pub fn check_rule(&self, id: &str, form: &BinaryForm, s: i64, t: i64) -> Result<bool> {
        Ok(self.table(id)?.check(form, s, t))
    }

    pub fn coverage_check(&self, id: &str, restriction: Restriction) -> Result<Vec<ResidueClass>> {
        Ok(self.table(id)?.coverage_gaps(restriction, false))
    }
}

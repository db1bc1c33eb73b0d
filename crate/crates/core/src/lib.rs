//! Exact representation of positive definite binary quadratic forms by
//! quaternary and quinary integral lattices.

pub mod arith;
pub mod enumerate;
pub mod error;
pub mod escalation;
pub mod form;
pub mod lattice;
pub mod local;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use escalation::{Decision, EscalationConfig, Escalator, Route, Theorem};
pub use form::{BinaryForm, UnimodularTransform};
pub use lattice::GramLattice;
pub use oracle::{Oracle, Representation, RepresentationCertificate};

//! The shifted Yangian presentation and the relation verifier.

pub mod presentation;
pub mod verify;

pub use presentation::{load_presentation, parse_relation, Relation};
pub use verify::{verify, Grid, Status, VerificationReport};

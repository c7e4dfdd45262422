//! Builders, abstraction maps and counting formulas for two rule-based
//! systems: a scaffold protein binding two partners, and two-sided
//! polymerization of two protein types. Also a six-state chain illustrating
//! the permutation criterion.

mod combinatorics;
mod lumping;
mod polymer;
mod scaffold;

pub use combinatorics::{binomial, factorial, partition_number, ratio_to_f64, uniform_weight};
pub use lumping::{lumping_example, LumpingExample};
pub use polymer::{
    polymer_class_size_phi2, polymer_class_size_phi3, polymer_classify, polymer_count_f, polymer_model, polymer_phi1,
    polymer_phi1_class_size, polymer_phi2, polymer_phi3, polymer_state_counts, ComponentClass, ComponentKind,
    PolymerParams, PolymerPhi1, PolymerPhi2,
};
pub use scaffold::{
    scaffold_class_size_phi1, scaffold_class_size_phi2, scaffold_model, scaffold_phi1, scaffold_phi1_values,
    scaffold_phi2, scaffold_phi2_values, scaffold_state_counts, ScaffoldParams, ScaffoldPhi1, ScaffoldPhi2,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CaseStudyError {
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("not a polymer component: {0}")]
    NotPolymerComponent(String),
}

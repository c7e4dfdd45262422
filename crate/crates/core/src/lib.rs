//! Aggregation (lumping) of finite Markov chains under a measure-weighted
//! backward condition, de-aggregation of the aggregate back onto the original
//! state space, and CTMCs generated by site-graph rewrite rules.
//!
//! The crate is organised bottom-up:
//!
//! - [`markov`]: sparse stochastic and rate matrices, stationary and transient
//!   solutions, structural classification.
//! - [`aggregation`]: partitions, block measures, the backward condition, the
//!   aggregated matrix and the executable identities that connect a chain with
//!   its aggregate.
//! - [`sitegraph`]: site-graphs, reaction mixtures, embeddings and canonical
//!   species keys.
//! - [`rules`]: rewrite rules, rule models and reachable state-space
//!   exploration.
//! - [`casestudies`]: the scaffold and two-sided polymerization models, their
//!   abstraction maps and exact class-size combinatorics.
//! - [`dsl`]: a small text format for rule models.
//! - [`io`]: JSON/CSV/DOT file formats.
//!
//! Data-parallel inner loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.
//! Both paths produce bit-identical results.

// `!(x > 0.0)` style guards are used so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod casestudies;
pub mod dsl;
pub mod io;
pub mod markov;
pub mod par;
pub mod rules;
pub mod sitegraph;

pub use aggregation::{AggregatedChain, AggregationError, DeltaTable, MeasureFamily, Partition};
pub use markov::{
    ChainKind, ChainStructure, Distribution, Kernel, MarkovError, RateMatrix, SparseMatrix, StateSpace,
    StochasticMatrix,
};
pub use rules::{ExploredChain, Rate, RewriteRule, RuleError, RuleModel};
pub use sitegraph::{Endpoint, Node, ReactionMixture, SiteGraph, SiteGraphError, SpeciesKey};

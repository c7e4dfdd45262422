//! Rule-based models: edge-rewriting rules over site-graphs, their
//! application to reaction mixtures, and the induced continuous-time chain.

mod explore;
mod rate;

pub use explore::{build_partition, explore, ExploredChain, Transition};
pub use rate::{Rate, RateParseError};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::markov::MarkovError;
use crate::sitegraph::{
    find_embeddings, is_embedding, renamed_edges, EdgeType, Interface, Node, NodeRenaming, ReactionMixture, SiteGraph,
    SiteGraphError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("rule {rule}: left and right sides must have the same nodes and interfaces")]
    SidesDiffer { rule: String },
    #[error("rule {rule}: node type {ty} occurs more than once")]
    RepeatedNodeType { rule: String, ty: String },
    #[error("renaming is not an embedding of the rule's left side")]
    InvalidEmbedding,
    #[error("applying the rule would bind the occupied site {0}")]
    SiteConflict(String),
    #[error("reachable state space exceeds {cap} states")]
    StateCapExceeded { cap: usize },
    #[error("initial mixture uses edge {0}, which no rule mentions")]
    UnknownEdgeType(String),
    #[error("node type {ty} has sites {declared:?} but the rules use {used:?}")]
    InterfaceTooSmall {
        ty: String,
        declared: BTreeSet<String>,
        used: BTreeSet<String>,
    },
    #[error(transparent)]
    SiteGraph(#[from] SiteGraphError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

/// `(left, right, rate)`: rewrites the edges of the left side into those of
/// the right side; nodes and interfaces are shared by both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    left: SiteGraph,
    right: SiteGraph,
    rate: Rate,
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, left: SiteGraph, right: SiteGraph, rate: Rate) -> Result<Self, RuleError> {
        let name = name.into();
        if left.interfaces() != right.interfaces() {
            return Err(RuleError::SidesDiffer { rule: name });
        }
        let mut types = BTreeSet::new();
        for n in left.nodes() {
            if !types.insert(n.ty.as_str()) {
                return Err(RuleError::RepeatedNodeType {
                    rule: name,
                    ty: n.ty.clone(),
                });
            }
        }
        Ok(Self {
            name,
            left: to_pattern(&left),
            right: to_pattern(&right),
            rate,
        })
    }

    pub fn left(&self) -> &SiteGraph {
        &self.left
    }

    pub fn right(&self) -> &SiteGraph {
        &self.right
    }

    pub fn rate(&self) -> &Rate {
        &self.rate
    }

    pub fn removed_edges(&self) -> impl Iterator<Item = &crate::sitegraph::Edge> + '_ {
        self.left.edges().difference(self.right.edges())
    }

    pub fn added_edges(&self) -> impl Iterator<Item = &crate::sitegraph::Edge> + '_ {
        self.right.edges().difference(self.left.edges())
    }
}

/// Renames every node to its bare type (types are unique within a rule).
fn to_pattern(g: &SiteGraph) -> SiteGraph {
    let eta = NodeRenaming::new(g.nodes().map(|n| (n.clone(), Node::pattern(n.ty.clone()))).collect())
        .expect("types are distinct");
    crate::sitegraph::rename(g, &eta).expect("total renaming")
}

/// Rules, the signature they induce, and an initial mixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleModel {
    rules: Vec<RewriteRule>,
    interface: Interface,
    edge_types: BTreeSet<EdgeType>,
    initial: ReactionMixture,
}

impl RuleModel {
    /// Interface derived from the rules; edgeless initial mixture with
    /// `counts` instances per type.
    pub fn new(rules: Vec<RewriteRule>, counts: &BTreeMap<String, u32>) -> Result<Self, RuleError> {
        let interface = derived_interface(&rules, counts.keys());
        Self::with_interface(rules, interface, counts)
    }

    /// As [`new`](Self::new) with a declared interface, which must contain
    /// every site the rules mention.
    pub fn with_interface(
        rules: Vec<RewriteRule>,
        interface: Interface,
        counts: &BTreeMap<String, u32>,
    ) -> Result<Self, RuleError> {
        let used = derived_interface(&rules, counts.keys());
        for (ty, sites) in &used {
            let declared = interface.get(ty).cloned().unwrap_or_default();
            if !sites.is_subset(&declared) || !interface.contains_key(ty) {
                return Err(RuleError::InterfaceTooSmall {
                    ty: ty.clone(),
                    declared,
                    used: sites.clone(),
                });
            }
        }
        let initial = ReactionMixture::edgeless(&interface, counts)?;
        let edge_types = rules
            .iter()
            .flat_map(|r| r.left.edges().iter().chain(r.right.edges()))
            .map(|e| e.edge_type())
            .collect();
        Ok(Self {
            rules,
            interface,
            edge_types,
            initial,
        })
    }

    /// Replaces the initial mixture; its edges must instantiate edge types
    /// of the rules and its counts may differ from the original.
    pub fn with_initial(mut self, initial: ReactionMixture) -> Result<Self, RuleError> {
        for e in initial.edges() {
            if !self.edge_types.contains(&e.edge_type()) {
                return Err(RuleError::UnknownEdgeType(e.to_string()));
            }
        }
        let rebuilt = ReactionMixture::from_graph(initial.graph().clone(), &self.interface)?;
        self.initial = rebuilt;
        Ok(self)
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn node_types(&self) -> impl Iterator<Item = &str> + '_ {
        self.interface.keys().map(String::as_str)
    }

    pub fn edge_types(&self) -> &BTreeSet<EdgeType> {
        &self.edge_types
    }

    pub fn initial(&self) -> &ReactionMixture {
        &self.initial
    }

    pub fn counts(&self) -> &BTreeMap<String, u32> {
        self.initial.counts()
    }

    /// Rebuilds a mixture of this model from its key.
    pub fn mixture_from_key(&self, key: &str) -> Result<ReactionMixture, RuleError> {
        Ok(ReactionMixture::from_key(key, &self.interface, self.initial.counts())?)
    }
}

fn derived_interface<'a>(rules: &[RewriteRule], extra: impl Iterator<Item = &'a String>) -> Interface {
    let mut out: Interface = extra.map(|t| (t.clone(), BTreeSet::new())).collect();
    for r in rules {
        for (n, sites) in r.left.interfaces() {
            out.entry(n.ty.clone()).or_default().extend(sites.iter().cloned());
        }
    }
    out
}

/// The mixture obtained by deleting the edges only in the left side and
/// adding those only in the right side, both transported through `eta`.
pub fn apply(rule: &RewriteRule, mix: &ReactionMixture, eta: &NodeRenaming) -> Result<ReactionMixture, RuleError> {
    if !is_embedding(&rule.left, mix, eta) {
        return Err(RuleError::InvalidEmbedding);
    }
    let removed = renamed_edges(rule.removed_edges(), eta)?;
    let added = renamed_edges(rule.added_edges(), eta)?;
    mix.with_changes(&removed, &added).map_err(|e| match e {
        SiteGraphError::SiteConflict(end) => RuleError::SiteConflict(end.to_string()),
        other => other.into(),
    })
}

/// All `(rule index, successor)` pairs from `mix`, in rule order and then
/// embedding order.
pub fn successors(model: &RuleModel, mix: &ReactionMixture) -> Result<Vec<(usize, ReactionMixture)>, RuleError> {
    let mut out = Vec::new();
    for (i, rule) in model.rules.iter().enumerate() {
        for eta in find_embeddings(&rule.left, mix)? {
            out.push((i, apply(rule, mix, &eta)?));
        }
    }
    Ok(out)
}

/// Every rule `(G, G', c)` has a counterpart `(G', G, c')`.
pub fn is_reversible(model: &RuleModel) -> bool {
    model
        .rules
        .iter()
        .all(|r| model.rules.iter().any(|s| s.left == r.right && s.right == r.left))
}

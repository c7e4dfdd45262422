//! Site-graphs: typed nodes carrying named sites, with edges joining sites of
//! distinct nodes.
//!
//! Pattern graphs (rule sides) use bare node types such as `A`; mixtures use
//! numbered instances `A^1, A^2, ...`. Both are [`Node`]s, the pattern form
//! having instance index 0.

mod canon;
mod embed;
mod mixture;

pub use canon::{canonical_key, canonical_key_with_cap, species_census, SpeciesKey, DEFAULT_NODE_CAP};
pub(crate) use embed::renamed_edges;
pub use embed::{find_embeddings, is_embedding};
pub use mixture::{Interface, ReactionMixture};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SiteGraphError {
    #[error("node {0} is not part of the graph")]
    UnknownNode(Node),
    #[error("site {site} is not in the interface of {node}")]
    UnknownSite { node: Node, site: String },
    #[error("edge joins node {0} to itself")]
    SelfEdge(Node),
    #[error("site {0} is already bound")]
    SiteConflict(Endpoint),
    #[error("renaming has no image for node {0}")]
    RenamingIncomplete(Node),
    #[error("renaming sends two nodes to {0}")]
    RenamingNotInjective(Node),
    #[error("pattern mentions node type {0} more than once")]
    UnsupportedPattern(String),
    #[error("site-graph is not connected")]
    NotConnected,
    #[error("component has {nodes} nodes, above the canonical-form cap of {cap}")]
    TooLarge { nodes: usize, cap: usize },
    #[error("mixture node {node} does not match the declared interface of {ty}")]
    InterfaceMismatch { node: Node, ty: String },
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A node: a type name and an instance index (0 for pattern nodes).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub ty: String,
    pub index: u32,
}

impl Node {
    pub fn new(ty: impl Into<String>, index: u32) -> Self {
        Self { ty: ty.into(), index }
    }

    /// Pattern-level node, printed as its bare type.
    pub fn pattern(ty: impl Into<String>) -> Self {
        Self::new(ty, 0)
    }

    pub fn site(&self, site: impl Into<String>) -> Endpoint {
        Endpoint {
            node: self.clone(),
            site: site.into(),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.ty)
        } else {
            write!(f, "{}^{}", self.ty, self.index)
        }
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Node {
    type Err = SiteGraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SiteGraphError::Parse(s.to_string());
        let (ty, index) = match s.split_once('^') {
            Some((ty, idx)) => {
                let index: u32 = idx.parse().map_err(|_| bad())?;
                if index == 0 {
                    return Err(bad());
                }
                (ty, index)
            }
            None => (s, 0),
        };
        if !is_ident(ty) {
            return Err(bad());
        }
        Ok(Node::new(ty, index))
    }
}

/// A site of a node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub node: Node,
    pub site: String,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.site)
    }
}

impl FromStr for Endpoint {
    type Err = SiteGraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (node, site) = s.split_once('.').ok_or_else(|| SiteGraphError::Parse(s.to_string()))?;
        if !is_ident(site) {
            return Err(SiteGraphError::Parse(s.to_string()));
        }
        Ok(Endpoint {
            node: node.parse()?,
            site: site.to_string(),
        })
    }
}

/// Unordered pair of endpoints, stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Endpoint, Endpoint);

impl Edge {
    pub fn new(a: Endpoint, b: Endpoint) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn ends(&self) -> (&Endpoint, &Endpoint) {
        (&self.0, &self.1)
    }

    pub fn other(&self, end: &Endpoint) -> Option<&Endpoint> {
        if &self.0 == end {
            Some(&self.1)
        } else if &self.1 == end {
            Some(&self.0)
        } else {
            None
        }
    }

    /// The unordered pair of `(type, site)` this edge instantiates.
    pub fn edge_type(&self) -> EdgeType {
        EdgeType::new(
            (self.0.node.ty.clone(), self.0.site.clone()),
            (self.1.node.ty.clone(), self.1.site.clone()),
        )
    }

    fn renamed(&self, eta: &NodeRenaming) -> Result<Edge, SiteGraphError> {
        let map = |e: &Endpoint| -> Result<Endpoint, SiteGraphError> {
            Ok(Endpoint {
                node: eta.apply(&e.node)?.clone(),
                site: e.site.clone(),
            })
        };
        Ok(Edge::new(map(&self.0)?, map(&self.1)?))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~{}", self.0, self.1)
    }
}

impl FromStr for Edge {
    type Err = SiteGraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('~').ok_or_else(|| SiteGraphError::Parse(s.to_string()))?;
        Ok(Edge::new(a.parse()?, b.parse()?))
    }
}

/// Unordered pair of `(node type, site)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeType((String, String), (String, String));

impl EdgeType {
    pub fn new(a: (String, String), b: (String, String)) -> Self {
        if a <= b {
            EdgeType(a, b)
        } else {
            EdgeType(b, a)
        }
    }

    pub fn ends(&self) -> (&(String, String), &(String, String)) {
        (&self.0, &self.1)
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}~{}.{}", self.0 .0, self.0 .1, self.1 .0, self.1 .1)
    }
}

/// Nodes with their interfaces, and edges between sites of distinct nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteGraph {
    interface: BTreeMap<Node, BTreeSet<String>>,
    edges: BTreeSet<Edge>,
}

impl SiteGraph {
    pub fn new<I, E>(interface: I, edges: E) -> Result<Self, SiteGraphError>
    where
        I: IntoIterator<Item = (Node, BTreeSet<String>)>,
        E: IntoIterator<Item = Edge>,
    {
        let mut g = SiteGraph {
            interface: interface.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: Node, sites: BTreeSet<String>) {
        self.interface.entry(node).or_default().extend(sites);
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<(), SiteGraphError> {
        let (a, b) = e.ends();
        if a.node == b.node {
            return Err(SiteGraphError::SelfEdge(a.node.clone()));
        }
        for end in [a, b] {
            let sites = self
                .interface
                .get(&end.node)
                .ok_or_else(|| SiteGraphError::UnknownNode(end.node.clone()))?;
            if !sites.contains(&end.site) {
                return Err(SiteGraphError::UnknownSite {
                    node: end.node.clone(),
                    site: end.site.clone(),
                });
            }
        }
        self.edges.insert(e);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        self.edges.remove(e)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.interface.keys()
    }

    pub fn node_count(&self) -> usize {
        self.interface.len()
    }

    pub fn contains_node(&self, node: &Node) -> bool {
        self.interface.contains_key(node)
    }

    pub fn interface(&self, node: &Node) -> Option<&BTreeSet<String>> {
        self.interface.get(node)
    }

    pub fn interfaces(&self) -> &BTreeMap<Node, BTreeSet<String>> {
        &self.interface
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Edges incident to `end`.
    pub fn edges_at<'a>(&'a self, end: &'a Endpoint) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.other(end).is_some())
    }

    /// Sites of `node` in the interface that carry no edge.
    pub fn free_sites(&self, node: &Node) -> Vec<&str> {
        let Some(sites) = self.interface.get(node) else {
            return Vec::new();
        };
        sites
            .iter()
            .filter(|s| {
                !self.edges.iter().any(|e| {
                    let (a, b) = e.ends();
                    (&a.node == node && &a.site == *s) || (&b.node == node && &b.site == *s)
                })
            })
            .map(String::as_str)
            .collect()
    }

    /// Node types, each listed once, in sorted order.
    pub fn node_types(&self) -> BTreeSet<&str> {
        self.interface.keys().map(|n| n.ty.as_str()).collect()
    }

    /// Sub-graph induced by `nodes`: their interfaces and the edges among them.
    pub fn induced(&self, nodes: &BTreeSet<Node>) -> SiteGraph {
        SiteGraph {
            interface: self
                .interface
                .iter()
                .filter(|(n, _)| nodes.contains(*n))
                .map(|(n, s)| (n.clone(), s.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| nodes.contains(&e.0.node) && nodes.contains(&e.1.node))
                .cloned()
                .collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() <= 1
    }
}

impl fmt::Display for SiteGraph {
    /// Nodes with interfaces, then edges, e.g. `A(b) B(a,c) | A.b~B.a`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self
            .interface
            .iter()
            .map(|(n, s)| format!("{n}({})", s.iter().cloned().collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", nodes.join(" "))?;
        if !self.edges.is_empty() {
            let edges: Vec<String> = self.edges.iter().map(Edge::to_string).collect();
            write!(f, " | {}", edges.join(" "))?;
        }
        Ok(())
    }
}

/// `H ⊆ G`: nodes, interfaces and edges of `h` all occur in `g`.
pub fn is_subgraph(h: &SiteGraph, g: &SiteGraph) -> bool {
    h.interface
        .iter()
        .all(|(n, sites)| g.interface.get(n).is_some_and(|gs| sites.is_subset(gs)))
        && h.edges.is_subset(&g.edges)
}

/// Maximal connected sub-graphs, ordered by their smallest node.
///
/// Connectivity is reachability along edges. When no site carries more than
/// one edge (as in every mixture), a shortest connecting walk never enters and
/// leaves a node through the same site, so this agrees with connectivity by
/// paths whose consecutive edges use distinct sites of each inner node.
pub fn connected_components(g: &SiteGraph) -> Vec<SiteGraph> {
    let nodes: Vec<&Node> = g.interface.keys().collect();
    let pos: BTreeMap<&Node, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &g.edges {
        let (a, b) = (pos[&e.0.node], pos[&e.1.node]);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Node>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().insert((*n).clone());
    }
    groups.values().map(|members| g.induced(members)).collect()
}

/// Injective map between node names.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRenaming {
    map: BTreeMap<Node, Node>,
}

impl NodeRenaming {
    pub fn new(map: BTreeMap<Node, Node>) -> Result<Self, SiteGraphError> {
        let mut seen = BTreeSet::new();
        for v in map.values() {
            if !seen.insert(v) {
                return Err(SiteGraphError::RenamingNotInjective(v.clone()));
            }
        }
        Ok(Self { map })
    }

    pub fn identity<'a>(nodes: impl IntoIterator<Item = &'a Node>) -> Self {
        Self {
            map: nodes.into_iter().map(|n| (n.clone(), n.clone())).collect(),
        }
    }

    pub fn get(&self, node: &Node) -> Option<&Node> {
        self.map.get(node)
    }

    pub fn apply(&self, node: &Node) -> Result<&Node, SiteGraphError> {
        self.map
            .get(node)
            .ok_or_else(|| SiteGraphError::RenamingIncomplete(node.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Node, &Node)> + '_ {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> NodeRenaming {
        NodeRenaming {
            map: self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        }
    }

    /// `next ∘ self`: apply `self`, then `next`.
    pub fn then(&self, next: &NodeRenaming) -> Result<NodeRenaming, SiteGraphError> {
        let map = self
            .map
            .iter()
            .map(|(k, v)| Ok((k.clone(), next.apply(v)?.clone())))
            .collect::<Result<_, SiteGraphError>>()?;
        Ok(NodeRenaming { map })
    }
}

impl fmt::Display for NodeRenaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(k, v)| format!("{k}->{v}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `G^η`: nodes, interfaces and edges transported through `eta`.
pub fn rename(g: &SiteGraph, eta: &NodeRenaming) -> Result<SiteGraph, SiteGraphError> {
    let mut interface = BTreeMap::new();
    for (n, sites) in &g.interface {
        interface.insert(eta.apply(n)?.clone(), sites.clone());
    }
    let edges = g
        .edges
        .iter()
        .map(|e| e.renamed(eta))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(SiteGraph { interface, edges })
}

#[cfg(test)]
pub(crate) fn sites<'a>(names: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
    names.into_iter().map(str::to_string).collect()
}

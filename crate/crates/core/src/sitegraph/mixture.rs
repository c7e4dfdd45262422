use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{rename, Edge, Endpoint, Node, NodeRenaming, SiteGraph, SiteGraphError};

/// Model-wide interface: node type to its sites.
pub type Interface = BTreeMap<String, BTreeSet<String>>;

/// A site-graph over instances `v^1..v^{n_v}` of each node type, each with the
/// full interface of its type and at most one edge per site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionMixture {
    graph: SiteGraph,
    counts: BTreeMap<String, u32>,
    partner: BTreeMap<Endpoint, Endpoint>,
}

impl ReactionMixture {
    pub fn new<E>(interface: &Interface, counts: &BTreeMap<String, u32>, edges: E) -> Result<Self, SiteGraphError>
    where
        E: IntoIterator<Item = Edge>,
    {
        let mut graph = SiteGraph::empty();
        for (ty, &n) in counts {
            let sites = interface.get(ty).ok_or_else(|| SiteGraphError::InterfaceMismatch {
                node: Node::new(ty.clone(), 1),
                ty: ty.clone(),
            })?;
            for j in 1..=n {
                graph.add_node(Node::new(ty.clone(), j), sites.clone());
            }
        }
        let mut mix = ReactionMixture {
            graph,
            counts: counts
                .iter()
                .filter(|(_, &n)| n > 0)
                .map(|(t, &n)| (t.clone(), n))
                .collect(),
            partner: BTreeMap::new(),
        };
        for e in edges {
            mix.bind(e)?;
        }
        Ok(mix)
    }

    pub fn edgeless(interface: &Interface, counts: &BTreeMap<String, u32>) -> Result<Self, SiteGraphError> {
        Self::new(interface, counts, [])
    }

    /// Checks that `graph` is a mixture for `interface`: instance indices of
    /// each type are exactly `1..=n`, and every instance carries its type's
    /// interface.
    pub fn from_graph(graph: SiteGraph, interface: &Interface) -> Result<Self, SiteGraphError> {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for (node, sites) in graph.interfaces() {
            let expected = interface.get(&node.ty);
            if node.index == 0 || expected != Some(sites) {
                return Err(SiteGraphError::InterfaceMismatch {
                    node: node.clone(),
                    ty: node.ty.clone(),
                });
            }
            let c = counts.entry(node.ty.clone()).or_default();
            *c += 1;
            if node.index != *c {
                return Err(SiteGraphError::InterfaceMismatch {
                    node: node.clone(),
                    ty: node.ty.clone(),
                });
            }
        }
        Self::new(interface, &counts, graph.edges().iter().cloned())
    }

    /// Inverse of [`key`](Self::key) given the node counts and interface.
    pub fn from_key(key: &str, interface: &Interface, counts: &BTreeMap<String, u32>) -> Result<Self, SiteGraphError> {
        let inner = key
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| SiteGraphError::Parse(key.to_string()))?;
        let edges = inner
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<Edge>, _>>()?;
        Self::new(interface, counts, edges)
    }

    /// Serialization of the edge set, e.g. `{A^1.b~B^3.a B^3.c~C^1.b}`.
    /// Two mixtures of the same model are equal exactly when their keys are.
    pub fn key(&self) -> String {
        let edges: Vec<String> = self.graph.edges().iter().map(Edge::to_string).collect();
        format!("{{{}}}", edges.join(" "))
    }

    pub fn graph(&self) -> &SiteGraph {
        &self.graph
    }

    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.counts
    }

    pub fn count(&self, ty: &str) -> u32 {
        self.counts.get(ty).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        self.graph.edges()
    }

    /// Instances of `ty` in index order.
    pub fn instances<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = Node> + 'a {
        (1..=self.count(ty)).map(move |j| Node::new(ty, j))
    }

    pub fn partner(&self, end: &Endpoint) -> Option<&Endpoint> {
        self.partner.get(end)
    }

    pub fn is_free(&self, end: &Endpoint) -> bool {
        !self.partner.contains_key(end)
    }

    pub fn has_site(&self, end: &Endpoint) -> bool {
        self.graph.interface(&end.node).is_some_and(|s| s.contains(&end.site))
    }

    /// The mixture with `removed` deleted and then `added` inserted.
    pub fn with_changes(&self, removed: &[Edge], added: &[Edge]) -> Result<Self, SiteGraphError> {
        let mut next = self.clone();
        for e in removed {
            if !next.graph.remove_edge(e) {
                return Err(SiteGraphError::Parse(format!("edge {e} is not present")));
            }
            let (a, b) = e.ends();
            next.partner.remove(a);
            next.partner.remove(b);
        }
        for e in added {
            next.bind(e.clone())?;
        }
        Ok(next)
    }

    /// Mixture transported through a type- and index-range-preserving
    /// renaming.
    pub fn renamed(&self, eta: &NodeRenaming, interface: &Interface) -> Result<Self, SiteGraphError> {
        Self::from_graph(rename(&self.graph, eta)?, interface)
    }

    fn bind(&mut self, e: Edge) -> Result<(), SiteGraphError> {
        let (a, b) = e.ends();
        for end in [a, b] {
            if self.partner.contains_key(end) {
                return Err(SiteGraphError::SiteConflict(end.clone()));
            }
        }
        let (a, b) = (a.clone(), b.clone());
        self.graph.add_edge(e)?;
        self.partner.insert(a.clone(), b.clone());
        self.partner.insert(b, a);
        Ok(())
    }
}

impl fmt::Display for ReactionMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::sitegraph::sites;

    pub(crate) fn scaffold_interface() -> Interface {
        [
            ("A".to_string(), sites(["b"])),
            ("B".to_string(), sites(["a", "c"])),
            ("C".to_string(), sites(["b"])),
        ]
        .into_iter()
        .collect()
    }

    pub(crate) fn counts(list: &[(&str, u32)]) -> BTreeMap<String, u32> {
        list.iter().map(|(t, n)| (t.to_string(), *n)).collect()
    }

    #[test]
    fn key_round_trip() {
        let iface = scaffold_interface();
        let c = counts(&[("A", 1), ("B", 3), ("C", 1)]);
        let mix = ReactionMixture::new(
            &iface,
            &c,
            ["A^1.b~B^3.a".parse().unwrap(), "B^3.c~C^1.b".parse().unwrap()],
        )
        .unwrap();
        assert_eq!(mix.key(), "{A^1.b~B^3.a B^3.c~C^1.b}");
        assert_eq!(ReactionMixture::from_key(&mix.key(), &iface, &c).unwrap(), mix);
        let empty = ReactionMixture::edgeless(&iface, &c).unwrap();
        assert_eq!(empty.key(), "{}");
        assert_eq!(empty.graph().node_count(), 5);
    }

    #[test]
    fn one_edge_per_site() {
        let iface = scaffold_interface();
        let c = counts(&[("A", 2), ("B", 1)]);
        let err = ReactionMixture::new(
            &iface,
            &c,
            ["A^1.b~B^1.a".parse().unwrap(), "A^2.b~B^1.a".parse().unwrap()],
        )
        .unwrap_err();
        assert_eq!(err, SiteGraphError::SiteConflict("B^1.a".parse().unwrap()));
    }

    #[test]
    fn changes_update_partners() {
        let iface = scaffold_interface();
        let c = counts(&[("A", 1), ("B", 1)]);
        let empty = ReactionMixture::edgeless(&iface, &c).unwrap();
        let bond: Edge = "A^1.b~B^1.a".parse().unwrap();
        let bound = empty.with_changes(&[], std::slice::from_ref(&bond)).unwrap();
        assert_eq!(
            bound.partner(&"A^1.b".parse().unwrap()),
            Some(&"B^1.a".parse().unwrap())
        );
        let back = bound.with_changes(&[bond], &[]).unwrap();
        assert_eq!(back, empty);
    }

    #[test]
    fn from_graph_requires_contiguous_instances() {
        let iface = scaffold_interface();
        let g = SiteGraph::new([(Node::new("A", 2), sites(["b"]))], []).unwrap();
        assert!(ReactionMixture::from_graph(g, &iface).is_err());
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::{Edge, Node, NodeRenaming, ReactionMixture, SiteGraph, SiteGraphError};

struct PatternNode<'a> {
    node: &'a Node,
    sites: &'a BTreeSet<String>,
    /// Sites with no pattern edge; these must be unbound in the mixture.
    free: Vec<&'a str>,
    /// Pattern edges to nodes placed earlier: (own site, earlier index, its site).
    back_edges: Vec<(&'a str, usize, &'a str)>,
}

fn prepare(pattern: &SiteGraph) -> Result<Vec<PatternNode<'_>>, SiteGraphError> {
    let mut seen = BTreeSet::new();
    for n in pattern.nodes() {
        if !seen.insert(n.ty.as_str()) {
            return Err(SiteGraphError::UnsupportedPattern(n.ty.clone()));
        }
    }
    let order: Vec<&Node> = pattern.nodes().collect();
    let pos: BTreeMap<&Node, usize> = order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut out: Vec<PatternNode<'_>> = order
        .iter()
        .map(|n| PatternNode {
            node: n,
            sites: pattern.interface(n).expect("node in pattern"),
            free: pattern.free_sites(n),
            back_edges: Vec::new(),
        })
        .collect();
    for e in pattern.edges() {
        let (a, b) = e.ends();
        let (ia, ib) = (pos[&a.node], pos[&b.node]);
        if ia > ib {
            out[ia].back_edges.push((&a.site, ib, &b.site));
        } else {
            out[ib].back_edges.push((&b.site, ia, &a.site));
        }
    }
    Ok(out)
}

fn candidate_ok(p: &PatternNode<'_>, inst: &Node, mix: &ReactionMixture) -> bool {
    p.sites.iter().all(|s| mix.has_site(&inst.site(s.as_str()))) && p.free.iter().all(|s| mix.is_free(&inst.site(*s)))
}

/// All renamings `η` from pattern nodes to mixture instances of the same type
/// under which the pattern is a sub-site-graph of the mixture and every
/// pattern site without an edge is free in the mixture. Ordered
/// lexicographically by the chosen instance indices, pattern nodes taken by
/// type.
pub fn find_embeddings(pattern: &SiteGraph, mix: &ReactionMixture) -> Result<Vec<NodeRenaming>, SiteGraphError> {
    let nodes = prepare(pattern)?;
    let candidates: Vec<Vec<Node>> = nodes
        .iter()
        .map(|p| {
            mix.instances(&p.node.ty)
                .filter(|inst| candidate_ok(p, inst, mix))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<&Node> = Vec::with_capacity(nodes.len());
    search(&nodes, &candidates, mix, &mut chosen, &mut out);
    Ok(out)
}

fn search<'c>(
    nodes: &[PatternNode<'_>],
    candidates: &'c [Vec<Node>],
    mix: &ReactionMixture,
    chosen: &mut Vec<&'c Node>,
    out: &mut Vec<NodeRenaming>,
) {
    let k = chosen.len();
    if k == nodes.len() {
        let map = nodes
            .iter()
            .zip(chosen.iter())
            .map(|(p, inst)| (p.node.clone(), (*inst).clone()))
            .collect();
        out.push(NodeRenaming::new(map).expect("distinct types give an injective map"));
        return;
    }
    for inst in &candidates[k] {
        let edges_ok = nodes[k]
            .back_edges
            .iter()
            .all(|&(site, j, other)| mix.partner(&inst.site(site)) == Some(&chosen[j].site(other)));
        if edges_ok {
            chosen.push(inst);
            search(nodes, candidates, mix, chosen, out);
            chosen.pop();
        }
    }
}

/// Whether `eta` is one of the embeddings reported by [`find_embeddings`].
pub fn is_embedding(pattern: &SiteGraph, mix: &ReactionMixture, eta: &NodeRenaming) -> bool {
    let Ok(nodes) = prepare(pattern) else {
        return false;
    };
    if eta.len() != nodes.len() {
        return false;
    }
    let mut images = Vec::with_capacity(nodes.len());
    for p in &nodes {
        let Some(inst) = eta.get(p.node) else {
            return false;
        };
        if inst.ty != p.node.ty || inst.index == 0 || inst.index > mix.count(&inst.ty) || !candidate_ok(p, inst, mix) {
            return false;
        }
        images.push(inst);
    }
    nodes.iter().zip(&images).all(|(p, inst)| {
        p.back_edges
            .iter()
            .all(|&(site, j, other)| mix.partner(&inst.site(site)) == Some(&images[j].site(other)))
    })
}

/// Pattern edges transported through `eta`.
pub(crate) fn renamed_edges<'a>(
    edges: impl IntoIterator<Item = &'a Edge>,
    eta: &NodeRenaming,
) -> Result<Vec<Edge>, SiteGraphError> {
    edges
        .into_iter()
        .map(|e| {
            let (a, b) = e.ends();
            Ok(Edge::new(
                eta.apply(&a.node)?.site(a.site.as_str()),
                eta.apply(&b.node)?.site(b.site.as_str()),
            ))
        })
        .collect()
}

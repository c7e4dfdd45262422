use std::collections::BTreeMap;
use std::fmt;

use super::{connected_components, ReactionMixture, SiteGraph, SiteGraphError};

/// Largest component [`canonical_key`] accepts.
pub const DEFAULT_NODE_CAP: usize = 64;

/// Canonical text of a connected site-graph up to type-preserving renaming of
/// its nodes, written in agent syntax, e.g. `A(b!1),B(a!1,c)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesKey(String);

impl SpeciesKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpeciesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Indexed {
    ty: Vec<String>,
    sites: Vec<Vec<String>>,
    /// adj[v][k]: edges at the k-th site of v as (partner, partner site index).
    adj: Vec<Vec<Vec<(usize, usize)>>>,
}

impl Indexed {
    fn new(g: &SiteGraph) -> Self {
        let nodes: Vec<_> = g.nodes().cloned().collect();
        let pos: BTreeMap<_, _> = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let sites: Vec<Vec<String>> = nodes
            .iter()
            .map(|n| g.interface(n).expect("node").iter().cloned().collect())
            .collect();
        let site_pos = |v: usize, s: &str| sites[v].iter().position(|x| x == s).expect("site");
        let mut adj: Vec<Vec<Vec<(usize, usize)>>> = sites.iter().map(|s| vec![Vec::new(); s.len()]).collect();
        for e in g.edges() {
            let (a, b) = e.ends();
            let (va, vb) = (pos[&a.node], pos[&b.node]);
            let (sa, sb) = (site_pos(va, &a.site), site_pos(vb, &b.site));
            adj[va][sa].push((vb, sb));
            adj[vb][sb].push((va, sa));
        }
        Self {
            ty: nodes.iter().map(|n| n.ty.clone()).collect(),
            sites,
            adj,
        }
    }

    fn n(&self) -> usize {
        self.ty.len()
    }

    fn rank(&self, v: usize) -> (&str, &[String]) {
        (&self.ty[v], &self.sites[v])
    }

    /// Agent-syntax text of the graph with nodes listed in `order`.
    fn encode(&self, order: &[usize]) -> String {
        let mut label = vec![usize::MAX; self.n()];
        for (l, &v) in order.iter().enumerate() {
            label[v] = l;
        }
        let mut bond_id: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
        let mut agents = Vec::with_capacity(order.len());
        for &v in order {
            let mut parts = Vec::with_capacity(self.sites[v].len());
            for (k, site) in self.sites[v].iter().enumerate() {
                let mut ends: Vec<(usize, usize)> = self.adj[v][k].iter().map(|&(w, sw)| (label[w], sw)).collect();
                ends.sort_unstable();
                let mut text = site.clone();
                for (lw, sw) in ends {
                    let here = (label[v], k);
                    let pair = if here <= (lw, sw) {
                        (here.0, here.1, lw, sw)
                    } else {
                        (lw, sw, here.0, here.1)
                    };
                    let next = bond_id.len() + 1;
                    let id = *bond_id.entry(pair).or_insert(next);
                    text.push_str(&format!("!{id}"));
                }
                parts.push(text);
            }
            agents.push(format!("{}({})", self.ty[v], parts.join(",")));
        }
        agents.join(",")
    }

    fn search(&self, order: &mut Vec<usize>, placed: &mut [bool], best: &mut Option<String>) {
        if order.len() == self.n() {
            let text = self.encode(order);
            if best.as_ref().is_none_or(|b| text < *b) {
                *best = Some(text);
            }
            return;
        }
        // first labelled (node, site) with an unlabelled partner decides the next node
        let mut group: Vec<usize> = Vec::new();
        'scan: for &v in order.iter() {
            for edges in &self.adj[v] {
                let fresh: Vec<(usize, usize)> = edges.iter().copied().filter(|&(w, _)| !placed[w]).collect();
                if fresh.is_empty() {
                    continue;
                }
                let key = |&(w, sw): &(usize, usize)| (sw, self.rank(w));
                let min = fresh.iter().map(key).min().expect("nonempty");
                group = fresh.iter().filter(|e| key(e) == min).map(|&(w, _)| w).collect();
                group.sort_unstable();
                group.dedup();
                break 'scan;
            }
        }
        for w in group {
            placed[w] = true;
            order.push(w);
            self.search(order, placed, best);
            order.pop();
            placed[w] = false;
        }
    }
}

/// Canonical form of a connected component, as [`canonical_key_with_cap`]
/// with [`DEFAULT_NODE_CAP`].
pub fn canonical_key(component: &SiteGraph) -> Result<SpeciesKey, SiteGraphError> {
    canonical_key_with_cap(component, DEFAULT_NODE_CAP)
}

/// Minimum agent-syntax encoding over all node orders produced by a
/// traversal from each node of least type. The traversal is forced except
/// where a site has several interchangeable unvisited partners, where every
/// choice is tried.
pub fn canonical_key_with_cap(component: &SiteGraph, cap: usize) -> Result<SpeciesKey, SiteGraphError> {
    if component.node_count() > cap {
        return Err(SiteGraphError::TooLarge {
            nodes: component.node_count(),
            cap,
        });
    }
    if component.node_count() == 0 || !component.is_connected() {
        return Err(SiteGraphError::NotConnected);
    }
    let g = Indexed::new(component);
    let least = (0..g.n()).map(|v| g.rank(v)).min().expect("nonempty");
    let mut best = None;
    let mut placed = vec![false; g.n()];
    for root in (0..g.n()).filter(|&v| g.rank(v) == least) {
        placed[root] = true;
        let mut order = vec![root];
        g.search(&mut order, &mut placed, &mut best);
        placed[root] = false;
    }
    Ok(SpeciesKey(best.expect("at least one root")))
}

/// Multiset of species keys of the connected components of a mixture.
pub fn species_census(mix: &ReactionMixture) -> Result<BTreeMap<SpeciesKey, usize>, SiteGraphError> {
    let mut census = BTreeMap::new();
    for comp in connected_components(mix.graph()) {
        *census.entry(canonical_key(&comp)?).or_insert(0) += 1;
    }
    Ok(census)
}

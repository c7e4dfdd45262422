use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{successors, Rate, RuleError, RuleModel};
use crate::aggregation::Partition;
use crate::markov::{Kernel, RateMatrix, SparseMatrix, StateSpace};
use crate::par;
use crate::sitegraph::ReactionMixture;

/// Accumulated transition between two distinct states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    /// Exact total rate.
    pub rate: Rate,
    /// Contributing rule indices with the number of embeddings of each.
    pub rules: Vec<(usize, u32)>,
}

/// The reachable mixtures of a model and its generator.
#[derive(Clone, Debug, PartialEq)]
pub struct ExploredChain {
    pub space: StateSpace,
    pub rates: RateMatrix,
    pub mixtures: Vec<ReactionMixture>,
    pub transitions: Vec<Transition>,
    /// Rule names, indexed as in [`Transition::rules`].
    pub rule_names: Vec<String>,
}

impl ExploredChain {
    pub fn len(&self) -> usize {
        self.mixtures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mixtures.is_empty()
    }

    /// Fibers of `phi`, blocks ordered by value.
    pub fn partition_by<T, F>(&self, phi: F) -> (Partition, Vec<T>)
    where
        T: Ord + Clone,
        F: Fn(&ReactionMixture) -> T,
    {
        build_partition(&self.mixtures, phi)
    }

    /// Transition graph in Graphviz syntax, edges labelled by rate and rule
    /// names.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph chain {\n");
        for (i, key) in self.space.keys().iter().enumerate() {
            let _ = writeln!(out, "  s{i} [label=\"{}\"];", key.replace('"', "\\\""));
        }
        for t in &self.transitions {
            let names: Vec<String> = t
                .rules
                .iter()
                .map(|&(r, k)| {
                    if k == 1 {
                        self.rule_names[r].clone()
                    } else {
                        format!("{}x{k}", self.rule_names[r])
                    }
                })
                .collect();
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{} ({})\"];",
                t.from,
                t.to,
                names.join(","),
                t.rate
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Fibers of `phi` over `mixtures`, blocks ordered by value.
pub fn build_partition<T, F>(mixtures: &[ReactionMixture], phi: F) -> (Partition, Vec<T>)
where
    T: Ord + Clone,
    F: Fn(&ReactionMixture) -> T,
{
    let labels: Vec<T> = mixtures.iter().map(phi).collect();
    Partition::from_labels(&labels)
}

type Outgoing = BTreeMap<String, (ReactionMixture, Rate, BTreeMap<usize, u32>)>;

/// Breadth-first closure of the initial mixture under all rule applications.
///
/// States are numbered level by level, each level sorted by key, so the
/// numbering does not depend on how frontier states are expanded. The rate
/// from `G` to a distinct `G'` is the sum of `c_i` over all `(i, η)` with
/// `apply(rule_i, G, η) = G'`; applications that leave `G` unchanged carry no
/// rate.
/// Target key, summed rate and per-rule multiplicities of one transition.
type Successor = (String, Rate, BTreeMap<usize, u32>);

pub fn explore(model: &RuleModel, max_states: usize) -> Result<ExploredChain, RuleError> {
    if max_states == 0 {
        return Err(RuleError::StateCapExceeded { cap: 0 });
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut mixtures: Vec<ReactionMixture> = Vec::new();
    let mut outgoing: Vec<Vec<Successor>> = Vec::new();

    index.insert(model.initial().key(), 0);
    mixtures.push(model.initial().clone());
    let mut level: Vec<usize> = vec![0];
    while !level.is_empty() {
        let expanded = par::map_slice(&level, |&s| expand(model, &mixtures[s]));
        let mut fresh: BTreeMap<String, ReactionMixture> = BTreeMap::new();
        for out in expanded {
            let out = out?;
            let mut row = Vec::with_capacity(out.len());
            for (key, (mix, rate, rules)) in out {
                if !index.contains_key(&key) && !fresh.contains_key(&key) {
                    fresh.insert(key.clone(), mix);
                }
                row.push((key, rate, rules));
            }
            outgoing.push(row);
        }
        if mixtures.len() + fresh.len() > max_states {
            return Err(RuleError::StateCapExceeded { cap: max_states });
        }
        level = Vec::with_capacity(fresh.len());
        for (key, mix) in fresh {
            index.insert(key, mixtures.len());
            level.push(mixtures.len());
            mixtures.push(mix);
        }
    }

    let n = mixtures.len();
    let mut transitions = Vec::new();
    let mut triplets = Vec::new();
    for (from, out) in outgoing.into_iter().enumerate() {
        let mut exit = Rate::zero();
        let mut row: Vec<Transition> = out
            .into_iter()
            .map(|(key, rate, rules)| Transition {
                from,
                to: index[&key],
                rate,
                rules: rules.into_iter().collect(),
            })
            .collect();
        row.sort_by_key(|t| t.to);
        for t in &row {
            triplets.push((from, t.to, t.rate.to_f64()));
            exit = exit + &t.rate;
        }
        if !exit.is_zero() {
            triplets.push((from, from, -exit.to_f64()));
        }
        transitions.extend(row);
    }
    let rates = RateMatrix::from_matrix(SparseMatrix::from_triplets(n, triplets)?)?;
    let space = StateSpace::new(mixtures.iter().map(ReactionMixture::key).collect())?;
    Ok(ExploredChain {
        space,
        rates,
        mixtures,
        transitions,
        rule_names: model.rules().iter().map(|r| r.name.clone()).collect(),
    })
}

fn expand(model: &RuleModel, mix: &ReactionMixture) -> Result<Outgoing, RuleError> {
    let own = mix.key();
    let mut out: Outgoing = BTreeMap::new();
    for (rule, next) in successors(model, mix)? {
        let key = next.key();
        if key == own {
            continue;
        }
        let c = model.rules()[rule].rate();
        let entry = out.entry(key).or_insert_with(|| (next, Rate::zero(), BTreeMap::new()));
        entry.1 = std::mem::replace(&mut entry.1, Rate::zero()) + c;
        *entry.2.entry(rule).or_insert(0) += 1;
    }
    Ok(out)
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{binomial, factorial, CaseStudyError};
use crate::rules::{Rate, RewriteRule, RuleModel};
use crate::sitegraph::{connected_components, Edge, Node, ReactionMixture, SiteGraph};

/// `n` copies each of `A` (sites `b`, `r`) and `B` (sites `a`, `l`). Rates in
/// the order bind b–a, unbind b–a, bind r–l, unbind r–l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolymerParams {
    pub n: u32,
    pub rates: [Rate; 4],
}

impl PolymerParams {
    pub fn unit(n: u32) -> Self {
        Self {
            n,
            rates: [Rate::one(), Rate::one(), Rate::one(), Rate::one()],
        }
    }
}

fn pattern(a_site: &str, b_site: &str, bond: bool) -> SiteGraph {
    let (a, b) = (Node::pattern("A"), Node::pattern("B"));
    let edge = bond.then(|| Edge::new(a.site(a_site), b.site(b_site)));
    SiteGraph::new(
        [
            (a, BTreeSet::from([a_site.to_string()])),
            (b, BTreeSet::from([b_site.to_string()])),
        ],
        edge,
    )
    .expect("well-formed pattern")
}

/// Rules `bind_ba`, `unbind_ba`, `bind_rl`, `unbind_rl` on an edgeless
/// initial mixture.
pub fn polymer_model(p: &PolymerParams) -> RuleModel {
    let [k1, k2, k3, k4] = p.rates.clone();
    let rules = vec![
        RewriteRule::new("bind_ba", pattern("b", "a", false), pattern("b", "a", true), k1),
        RewriteRule::new("unbind_ba", pattern("b", "a", true), pattern("b", "a", false), k2),
        RewriteRule::new("bind_rl", pattern("r", "l", false), pattern("r", "l", true), k3),
        RewriteRule::new("unbind_rl", pattern("r", "l", true), pattern("r", "l", false), k4),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("valid rules");
    let counts = [("A".to_string(), p.n), ("B".to_string(), p.n)].into_iter().collect();
    RuleModel::new(rules, &counts).expect("valid model")
}

/// Shape of a connected polymer component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    /// Equal numbers of `A` and `B`, free `A.b` and `B.a`.
    ChainAB,
    /// Equal numbers of `A` and `B`, free `A.r` and `B.l`.
    ChainBA,
    /// One more `A` than `B`; an isolated `A` is the shortest.
    ChainAA,
    /// One more `B` than `A`.
    ChainBB,
    /// No free sites.
    Ring,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::ChainAB => "(A..B)",
            ComponentKind::ChainBA => "(B..A)",
            ComponentKind::ChainAA => "(A..A)",
            ComponentKind::ChainBB => "(B..B)",
            ComponentKind::Ring => "(.A..B.)",
        })
    }
}

/// Component kind with its length index `i`: the number of `A` nodes, or of
/// `B` nodes for [`ComponentKind::ChainBB`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentClass {
    pub kind: ComponentKind,
    pub i: u32,
}

impl ComponentClass {
    /// Numbers of `A` and `B` nodes.
    pub fn node_counts(&self) -> (u32, u32) {
        match self.kind {
            ComponentKind::ChainAA => (self.i, self.i - 1),
            ComponentKind::ChainBB => (self.i - 1, self.i),
            _ => (self.i, self.i),
        }
    }

    /// Ways to pick one component of this class from `m_a` free `A` and `m_b`
    /// free `B` nodes.
    pub fn choices(&self, m_a: u32, m_b: u32) -> BigUint {
        let f = |kind, a: u32, b: u32| polymer_count_f(kind, a, b, self.i).unwrap_or_default();
        match self.kind {
            ComponentKind::ChainAB | ComponentKind::ChainBA => f(1, m_a, m_b),
            ComponentKind::ChainAA => f(2, m_a, m_b),
            ComponentKind::ChainBB => f(2, m_b, m_a),
            ComponentKind::Ring => f(3, m_a, m_b),
        }
    }
}

impl fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.i)
    }
}

pub fn polymer_classify(component: &SiteGraph) -> Result<ComponentClass, CaseStudyError> {
    let bad = |why: &str| Err(CaseStudyError::NotPolymerComponent(why.to_string()));
    if component.node_count() == 0 || !component.is_connected() {
        return bad("not a non-empty connected graph");
    }
    let (mut n_a, mut n_b) = (0u32, 0u32);
    let mut free: Vec<(&str, &str)> = Vec::new();
    for node in component.nodes() {
        let sites = component.interface(node).expect("node has an interface");
        let expected: &[&str] = match node.ty.as_str() {
            "A" => &["b", "r"],
            "B" => &["a", "l"],
            _ => return bad(&format!("unexpected node {node}")),
        };
        if !sites.iter().map(String::as_str).eq(expected.iter().copied()) {
            return bad(&format!("unexpected interface on {node}"));
        }
        if node.ty == "A" {
            n_a += 1;
        } else {
            n_b += 1;
        }
        free.extend(component.free_sites(node).into_iter().map(|s| (node.ty.as_str(), s)));
    }
    free.sort();
    let nodes = n_a + n_b;
    let edges = component.edges().len() as u32;
    let class = |kind, i| Ok(ComponentClass { kind, i });
    match (free.as_slice(), n_a.cmp(&n_b)) {
        ([], std::cmp::Ordering::Equal) if edges == nodes => class(ComponentKind::Ring, n_a),
        _ if free.len() != 2 || edges + 1 != nodes => bad("neither a chain nor a ring"),
        ([("A", "b"), ("B", "a")], std::cmp::Ordering::Equal) => class(ComponentKind::ChainAB, n_a),
        ([("A", "r"), ("B", "l")], std::cmp::Ordering::Equal) => class(ComponentKind::ChainBA, n_a),
        (_, std::cmp::Ordering::Greater) if n_a == n_b + 1 => class(ComponentKind::ChainAA, n_a),
        (_, std::cmp::Ordering::Less) if n_b == n_a + 1 => class(ComponentKind::ChainBB, n_b),
        _ => bad("unexpected free sites"),
    }
}

/// Multiplicity of each component class.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolymerPhi1(pub BTreeMap<ComponentClass, u32>);

impl fmt::Display for PolymerPhi1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (class, x)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{class}:{x}")?;
        }
        f.write_str("}")
    }
}

/// Numbers of `r–l` and `b–a` bonds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolymerPhi2 {
    pub m_rl: u32,
    pub m_ba: u32,
}

impl fmt::Display for PolymerPhi2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m_rl, self.m_ba)
    }
}

pub fn polymer_phi1(mix: &ReactionMixture) -> Result<PolymerPhi1, CaseStudyError> {
    let mut out = BTreeMap::new();
    for comp in connected_components(mix.graph()) {
        *out.entry(polymer_classify(&comp)?).or_insert(0) += 1;
    }
    Ok(PolymerPhi1(out))
}

pub fn polymer_phi2(mix: &ReactionMixture) -> PolymerPhi2 {
    let mut v = PolymerPhi2 { m_rl: 0, m_ba: 0 };
    for a in mix.instances("A") {
        v.m_rl += !mix.is_free(&a.site("r")) as u32;
        v.m_ba += !mix.is_free(&a.site("b")) as u32;
    }
    v
}

pub fn polymer_phi3(mix: &ReactionMixture) -> u32 {
    let v = polymer_phi2(mix);
    v.m_rl + v.m_ba
}

/// Component-choice counts: `f₁ = C(m_A,i) C(m_B,i) (i!)²` for chains with
/// equal ends, `f₂ = C(m_A,i) C(m_B,i−1) i! (i−1)!` for chains with two `A`
/// ends, `f₃ = f₁ / i` for rings.
pub fn polymer_count_f(kind: u8, m_a: u32, m_b: u32, i: u32) -> Result<BigUint, CaseStudyError> {
    if i == 0 {
        return Err(CaseStudyError::InvalidArgs("length index must be positive".into()));
    }
    let (a, b, i) = (m_a as u64, m_b as u64, i as u64);
    let f1 = || binomial(a, i) * binomial(b, i) * factorial(i) * factorial(i);
    match kind {
        1 => Ok(f1()),
        2 => Ok(binomial(a, i) * binomial(b, i - 1) * factorial(i) * factorial(i - 1)),
        3 => Ok(f1() / i),
        _ => Err(CaseStudyError::InvalidArgs(format!(
            "unknown counting function f{kind}"
        ))),
    }
}

/// Number of mixtures on `n + n` nodes with the given class multiplicities,
/// obtained by choosing components one after another and dividing by the
/// orderings of equal classes.
pub fn polymer_phi1_class_size(v: &PolymerPhi1, n: u32) -> Result<BigUint, CaseStudyError> {
    let (mut m_a, mut m_b) = (n, n);
    let mut ways = BigUint::one();
    let mut orderings = BigUint::one();
    for (class, &x) in &v.0 {
        if class.i == 0 {
            return Err(CaseStudyError::InvalidCounts(format!("{class} has length index 0")));
        }
        let (da, db) = class.node_counts();
        for _ in 0..x {
            ways *= class.choices(m_a, m_b);
            m_a = m_a.checked_sub(da).ok_or_else(|| too_many(v))?;
            m_b = m_b.checked_sub(db).ok_or_else(|| too_many(v))?;
        }
        orderings *= factorial(x as u64);
    }
    if m_a != 0 || m_b != 0 {
        return Err(CaseStudyError::InvalidCounts(format!("{v} leaves nodes unassigned")));
    }
    Ok(ways / orderings)
}

fn too_many(v: &PolymerPhi1) -> CaseStudyError {
    CaseStudyError::InvalidCounts(format!("{v} uses more nodes than available"))
}

/// `C(n,m_rl)² m_rl! · C(n,m_ba)² m_ba!`: the two bond types form
/// independent partial matchings.
pub fn polymer_class_size_phi2(m_rl: u32, m_ba: u32, n: u32) -> Result<BigUint, CaseStudyError> {
    if m_rl > n || m_ba > n {
        return Err(CaseStudyError::InvalidArgs(format!("({m_rl},{m_ba}) exceeds n = {n}")));
    }
    Ok(matchings(n, m_rl) * matchings(n, m_ba))
}

fn matchings(n: u32, k: u32) -> BigUint {
    let c = binomial(n as u64, k as u64);
    &c * &c * factorial(k as u64)
}

/// `Σ_i` of the φ₂ sizes at `(i, m − i)`.
pub fn polymer_class_size_phi3(m: u32, n: u32) -> Result<BigUint, CaseStudyError> {
    if m > 2 * n {
        return Err(CaseStudyError::InvalidArgs(format!("m = {m} exceeds 2n = {}", 2 * n)));
    }
    let lo = m.saturating_sub(n);
    Ok((lo..=m.min(n)).fold(BigUint::zero(), |acc, i| acc + matchings(n, i) * matchings(n, m - i)))
}

/// Numbers of φ₂ and φ₃ classes: `((n+1)², 2n+1)`.
pub fn polymer_state_counts(n: u64) -> (u64, u64) {
    ((n + 1) * (n + 1), 2 * n + 1)
}

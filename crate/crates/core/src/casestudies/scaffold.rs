use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use super::{binomial, factorial, CaseStudyError};
use crate::rules::{Rate, RewriteRule, RuleModel};
use crate::sitegraph::{Edge, Node, ReactionMixture, SiteGraph};

/// Copy numbers and the four rate constants: `c1` binds A–B, `c2` binds B–C,
/// `c3` releases A–B, `c4` releases B–C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaffoldParams {
    pub n_a: u32,
    pub n_b: u32,
    pub n_c: u32,
    pub rates: [Rate; 4],
}

impl ScaffoldParams {
    /// All four rates equal to 1.
    pub fn unit(n_a: u32, n_b: u32, n_c: u32) -> Self {
        Self {
            n_a,
            n_b,
            n_c,
            rates: [Rate::one(), Rate::one(), Rate::one(), Rate::one()],
        }
    }
}

fn pattern(nodes: &[(&str, &str)], bond: bool) -> SiteGraph {
    let interface = nodes
        .iter()
        .map(|(ty, site)| (Node::pattern(*ty), BTreeSet::from([site.to_string()])));
    let edges = bond.then(|| {
        Edge::new(
            Node::pattern(nodes[0].0).site(nodes[0].1),
            Node::pattern(nodes[1].0).site(nodes[1].1),
        )
    });
    SiteGraph::new(interface, edges).expect("well-formed pattern")
}

/// Scaffold `B` with sites `a` and `c` binding `A` (site `b`) and `C` (site
/// `b`). Rules `r1..r4`: bind A–B at `c1`, bind B–C at `c2`, unbind A–B at
/// `c3`, unbind B–C at `c4`. The initial mixture is edgeless.
pub fn scaffold_model(p: &ScaffoldParams) -> RuleModel {
    let ab = [("A", "b"), ("B", "a")];
    let bc = [("B", "c"), ("C", "b")];
    let [c1, c2, c3, c4] = p.rates.clone();
    let rules = vec![
        RewriteRule::new("r1", pattern(&ab, false), pattern(&ab, true), c1),
        RewriteRule::new("r2", pattern(&bc, false), pattern(&bc, true), c2),
        RewriteRule::new("r3", pattern(&ab, true), pattern(&ab, false), c3),
        RewriteRule::new("r4", pattern(&bc, true), pattern(&bc, false), c4),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("valid rules");
    let counts: BTreeMap<String, u32> = [("A", p.n_a), ("B", p.n_b), ("C", p.n_c)]
        .iter()
        .map(|(t, n)| (t.to_string(), *n))
        .collect();
    RuleModel::new(rules, &counts).expect("valid model")
}

/// Numbers of `AB`, `BC` and `ABC` complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaffoldPhi1 {
    pub m_ab: u32,
    pub m_bc: u32,
    pub m_abc: u32,
}

/// Numbers of `B` instances bound on `a` and on `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaffoldPhi2 {
    pub m_ab: u32,
    pub m_bc: u32,
}

impl fmt::Display for ScaffoldPhi1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m_ab, self.m_bc, self.m_abc)
    }
}

impl fmt::Display for ScaffoldPhi2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m_ab, self.m_bc)
    }
}

impl ScaffoldPhi1 {
    /// Each `ABC` complex carries one bond of each kind.
    pub fn to_phi2(self) -> ScaffoldPhi2 {
        ScaffoldPhi2 {
            m_ab: self.m_ab + self.m_abc,
            m_bc: self.m_bc + self.m_abc,
        }
    }

    /// Free `A`, `B` and `C` counts, if the vector is admissible for `p`.
    fn free_counts(&self, p: &ScaffoldParams) -> Option<(u32, u32, u32)> {
        let m_a = p.n_a.checked_sub(self.m_ab + self.m_abc)?;
        let m_b = p.n_b.checked_sub(self.m_ab + self.m_bc + self.m_abc)?;
        let m_c = p.n_c.checked_sub(self.m_bc + self.m_abc)?;
        Some((m_a, m_b, m_c))
    }
}

fn bound_sites(mix: &ReactionMixture) -> impl Iterator<Item = (bool, bool)> + '_ {
    mix.instances("B")
        .map(|b| (!mix.is_free(&b.site("a")), !mix.is_free(&b.site("c"))))
}

pub fn scaffold_phi1(mix: &ReactionMixture) -> ScaffoldPhi1 {
    let mut v = ScaffoldPhi1 {
        m_ab: 0,
        m_bc: 0,
        m_abc: 0,
    };
    for (a, c) in bound_sites(mix) {
        match (a, c) {
            (true, false) => v.m_ab += 1,
            (false, true) => v.m_bc += 1,
            (true, true) => v.m_abc += 1,
            (false, false) => {}
        }
    }
    v
}

pub fn scaffold_phi2(mix: &ReactionMixture) -> ScaffoldPhi2 {
    let mut v = ScaffoldPhi2 { m_ab: 0, m_bc: 0 };
    for (a, c) in bound_sites(mix) {
        v.m_ab += a as u32;
        v.m_bc += c as u32;
    }
    v
}

/// `n_A! n_B! n_C! / (m_AB! m_BC! m_ABC! m_A! m_B! m_C!)` where `m_A, m_B, m_C`
/// count free nodes.
pub fn scaffold_class_size_phi1(v: &ScaffoldPhi1, p: &ScaffoldParams) -> Result<BigUint, CaseStudyError> {
    let (m_a, m_b, m_c) = v
        .free_counts(p)
        .ok_or_else(|| CaseStudyError::InvalidCounts(format!("{v} exceeds the copy numbers")))?;
    let f = |k: u32| factorial(k as u64);
    Ok(f(p.n_a) * f(p.n_b) * f(p.n_c) / (f(v.m_ab) * f(v.m_bc) * f(v.m_abc) * f(m_a) * f(m_b) * f(m_c)))
}

/// `C(n_A, i) C(n_B, i) i! · C(n_C, j) C(n_B, j) j!` for `(i, j)`.
pub fn scaffold_class_size_phi2(v: &ScaffoldPhi2, p: &ScaffoldParams) -> Result<BigUint, CaseStudyError> {
    let (i, j) = (v.m_ab, v.m_bc);
    if i > p.n_a.min(p.n_b) || j > p.n_c.min(p.n_b) {
        return Err(CaseStudyError::InvalidCounts(format!("{v} exceeds the copy numbers")));
    }
    let (na, nb, nc) = (p.n_a as u64, p.n_b as u64, p.n_c as u64);
    let (i, j) = (i as u64, j as u64);
    Ok(binomial(na, i) * binomial(nb, i) * factorial(i) * binomial(nc, j) * binomial(nb, j) * factorial(j))
}

/// All admissible φ₁ vectors for `p`, sorted.
pub fn scaffold_phi1_values(p: &ScaffoldParams) -> Vec<ScaffoldPhi1> {
    let mut out = Vec::new();
    for m_abc in 0..=p.n_b {
        for m_ab in 0..=p.n_b {
            for m_bc in 0..=p.n_b {
                let v = ScaffoldPhi1 { m_ab, m_bc, m_abc };
                if v.free_counts(p).is_some() {
                    out.push(v);
                }
            }
        }
    }
    out.sort();
    out
}

/// All admissible φ₂ vectors for `p`, sorted.
pub fn scaffold_phi2_values(p: &ScaffoldParams) -> Vec<ScaffoldPhi2> {
    let mut out = Vec::new();
    for m_ab in 0..=p.n_a.min(p.n_b) {
        for m_bc in 0..=p.n_c.min(p.n_b) {
            out.push(ScaffoldPhi2 { m_ab, m_bc });
        }
    }
    out
}

/// Numbers of φ₁ and φ₂ classes when `n_A = n_B = n_C = n`:
/// `((n+1)(n+2)(n+3)/6, (n+1)²)`.
pub fn scaffold_state_counts(n: u64) -> (u64, u64) {
    ((n + 1) * (n + 2) * (n + 3) / 6, (n + 1) * (n + 1))
}

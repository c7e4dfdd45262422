//! Text format for rule models.
//!
//! ```text
//! # comments run to the end of the line
//! node A { sites: b }
//! node B { sites: a, c }
//! rule r1: A(b), B(a) -> A(b!1), B(a!1) @ 1.0
//! init: A*2, B*3
//! ```
//!
//! One statement per line. A bare site in a rule is tested free (or, on the
//! right, released); `!k` pairs the two sites carrying label `k` on the same
//! side. Rates are exact decimals, exponent forms or `p/q`. Types missing
//! from `init` get zero instances and `A` alone means `A*1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rules::{Rate, RewriteRule, RuleError, RuleModel};
use crate::sitegraph::{Edge, Interface, Node, SiteGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: node type {name} is not declared")]
    UndeclaredNode { line: usize, col: usize, name: String },
    #[error("{line}:{col}: node type {node} has no site {site}")]
    UndeclaredSite {
        line: usize,
        col: usize,
        node: String,
        site: String,
    },
    #[error("{line}:{col}: bond label {label} must occur exactly twice on one side")]
    UnbalancedBond { line: usize, col: usize, label: u32 },
    #[error("{line}:{col}: node type {ty} occurs more than once in a rule side")]
    RepeatedNodeTypeInRule { line: usize, col: usize, ty: String },
    #[error("line {line}: {source}")]
    Rule { line: usize, source: RuleError },
    #[error(transparent)]
    Model(#[from] RuleError),
    #[error("the initial mixture has edges, which the format cannot express")]
    BondedInitial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDecl {
    pub name: String,
    pub sites: Vec<String>,
}

/// Site of an agent, with an optional bond label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteRef {
    pub name: String,
    pub bond: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub ty: String,
    pub sites: Vec<SiteRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleDecl {
    pub name: String,
    pub left: Vec<Agent>,
    pub right: Vec<Agent>,
    pub rate: Rate,
}

/// Parsed model text. Bond labels are renumbered `1, 2, ...` in order of
/// first appearance on each side, so printing and re-parsing is the
/// identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelSource {
    pub nodes: Vec<NodeDecl>,
    pub rules: Vec<RuleDecl>,
    pub init: Vec<(String, u32)>,
}

pub fn parse_model(text: &str) -> Result<RuleModel, DslError> {
    parse_source(text)?.to_model()
}

pub fn parse_source(text: &str) -> Result<ModelSource, DslError> {
    let mut parser = Parser::default();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(body, i + 1);
        cur.skip_ws();
        if cur.at_end() {
            continue;
        }
        parser.statement(&mut cur)?;
    }
    Ok(parser.source)
}

/// `model` in the text format.
pub fn print_model(model: &RuleModel) -> Result<String, DslError> {
    Ok(ModelSource::from_model(model)?.to_string())
}

impl ModelSource {
    pub fn interface(&self) -> Interface {
        self.nodes
            .iter()
            .map(|n| (n.name.clone(), n.sites.iter().cloned().collect()))
            .collect()
    }

    pub fn counts(&self) -> BTreeMap<String, u32> {
        let mut counts: BTreeMap<String, u32> = self.nodes.iter().map(|n| (n.name.clone(), 0)).collect();
        for (ty, k) in &self.init {
            *counts.entry(ty.clone()).or_insert(0) += k;
        }
        counts
    }

    pub fn to_model(&self) -> Result<RuleModel, DslError> {
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let (left, right) = (side_graph(&r.left)?, side_graph(&r.right)?);
            rules.push(RewriteRule::new(r.name.clone(), left, right, r.rate.clone())?);
        }
        Ok(RuleModel::with_interface(rules, self.interface(), &self.counts())?)
    }

    /// Source text for `model`. Agents and sites are listed in sorted order.
    pub fn from_model(model: &RuleModel) -> Result<Self, DslError> {
        if !model.initial().edges().is_empty() {
            return Err(DslError::BondedInitial);
        }
        let nodes = model
            .interface()
            .iter()
            .map(|(ty, sites)| NodeDecl {
                name: ty.clone(),
                sites: sites.iter().cloned().collect(),
            })
            .collect();
        let rules = model
            .rules()
            .iter()
            .map(|r| RuleDecl {
                name: r.name.clone(),
                left: side_agents(r.left()),
                right: side_agents(r.right()),
                rate: r.rate().clone(),
            })
            .collect();
        let init = model.counts().iter().map(|(t, &k)| (t.clone(), k)).collect();
        Ok(Self { nodes, rules, init })
    }
}

fn side_graph(agents: &[Agent]) -> Result<SiteGraph, RuleError> {
    let interface = agents.iter().map(|a| {
        (
            Node::pattern(a.ty.clone()),
            a.sites.iter().map(|s| s.name.clone()).collect::<BTreeSet<_>>(),
        )
    });
    let mut ends: BTreeMap<u32, Vec<(String, String)>> = BTreeMap::new();
    for a in agents {
        for s in &a.sites {
            if let Some(k) = s.bond {
                ends.entry(k).or_default().push((a.ty.clone(), s.name.clone()));
            }
        }
    }
    let edges = ends.values().map(|pair| {
        Edge::new(
            Node::pattern(pair[0].0.clone()).site(pair[0].1.clone()),
            Node::pattern(pair[1].0.clone()).site(pair[1].1.clone()),
        )
    });
    Ok(SiteGraph::new(interface, edges.collect::<Vec<_>>())?)
}

fn side_agents(g: &SiteGraph) -> Vec<Agent> {
    let mut labels: BTreeMap<Edge, u32> = BTreeMap::new();
    let mut agents = Vec::new();
    for node in g.nodes() {
        let mut sites = Vec::new();
        for site in g.interface(node).into_iter().flatten() {
            let end = node.site(site.clone());
            let bond = g.edges_at(&end).next().map(|e| {
                let next = labels.len() as u32 + 1;
                *labels.entry(e.clone()).or_insert(next)
            });
            sites.push(SiteRef {
                name: site.clone(),
                bond,
            });
        }
        agents.push(Agent {
            ty: node.ty.clone(),
            sites,
        });
    }
    agents
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.ty)?;
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&s.name)?;
            if let Some(k) = s.bond {
                write!(f, "!{k}")?;
            }
        }
        f.write_str(")")
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, agents: &[Agent]) -> fmt::Result {
    for (i, a) in agents.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "node {} {{ sites: {} }}", n.name, n.sites.join(", "))?;
        }
        if !self.rules.is_empty() {
            writeln!(f)?;
        }
        for r in &self.rules {
            write!(f, "rule {}: ", r.name)?;
            write_side(f, &r.left)?;
            f.write_str(" -> ")?;
            write_side(f, &r.right)?;
            writeln!(f, " @ {}", r.rate)?;
        }
        writeln!(f)?;
        let init: Vec<String> = self.init.iter().map(|(t, k)| format!("{t}*{k}")).collect();
        writeln!(f, "init: {}", init.join(", "))
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        let t: Vec<char> = token.chars().collect();
        if self.chars[self.pos..].starts_with(&t) {
            self.pos += t.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), DslError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|&c| f(c)) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Identifier with its column.
    fn ident(&mut self, what: &str) -> Result<(String, usize), DslError> {
        self.skip_ws();
        let col = self.col();
        if !self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphabetic() || *c == '_')
        {
            return Err(self.err(format!("expected {what}")));
        }
        Ok((
            self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\''),
            col,
        ))
    }

    fn integer(&mut self, what: &str) -> Result<u32, DslError> {
        self.skip_ws();
        let at = self.err(format!("expected {what}"));
        self.take_while(|c| c.is_ascii_digit()).parse().map_err(|_| at)
    }

    fn finish(&mut self) -> Result<(), DslError> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

#[derive(Default)]
struct Parser {
    source: ModelSource,
    declared: BTreeMap<String, BTreeSet<String>>,
}

impl Parser {
    fn statement(&mut self, cur: &mut Cursor) -> Result<(), DslError> {
        let col = cur.col();
        if cur.eat("init") && cur.peek() == Some(':') {
            cur.expect(":")?;
            return self.init(cur);
        }
        cur.pos = col - 1;
        let (kw, _) = cur.ident("`node`, `rule` or `init`")?;
        match kw.as_str() {
            "node" => self.node(cur),
            "rule" => self.rule(cur),
            _ => Err(DslError::Syntax {
                line: cur.line,
                col,
                msg: format!("unknown statement `{kw}`"),
            }),
        }
    }

    fn node(&mut self, cur: &mut Cursor) -> Result<(), DslError> {
        let (name, col) = cur.ident("node type name")?;
        if self.declared.contains_key(&name) {
            return Err(DslError::Syntax {
                line: cur.line,
                col,
                msg: format!("node type {name} declared twice"),
            });
        }
        cur.expect("{")?;
        cur.expect("sites")?;
        cur.expect(":")?;
        let mut sites = Vec::new();
        if cur.peek() != Some('}') {
            loop {
                let (s, col) = cur.ident("site name")?;
                if sites.contains(&s) {
                    return Err(DslError::Syntax {
                        line: cur.line,
                        col,
                        msg: format!("site {s} listed twice"),
                    });
                }
                sites.push(s);
                if !cur.eat(",") {
                    break;
                }
            }
        }
        cur.expect("}")?;
        cur.finish()?;
        self.declared.insert(name.clone(), sites.iter().cloned().collect());
        self.source.nodes.push(NodeDecl { name, sites });
        Ok(())
    }

    fn rule(&mut self, cur: &mut Cursor) -> Result<(), DslError> {
        let (name, col) = cur.ident("rule name")?;
        if self.source.rules.iter().any(|r| r.name == name) {
            return Err(DslError::Syntax {
                line: cur.line,
                col,
                msg: format!("rule {name} defined twice"),
            });
        }
        cur.expect(":")?;
        let left = self.side(cur)?;
        cur.expect("->")?;
        let right = self.side(cur)?;
        cur.expect("@")?;
        cur.skip_ws();
        let rate_col = cur.col();
        let literal = cur.take_while(|c| c.is_ascii_alphanumeric() || "./+-".contains(c));
        let rate: Rate = literal.parse().map_err(|e| DslError::Syntax {
            line: cur.line,
            col: rate_col,
            msg: format!("invalid rate `{literal}`: {e}"),
        })?;
        cur.finish()?;
        let decl = RuleDecl {
            name,
            left,
            right,
            rate,
        };
        let line = cur.line;
        let check = |a: &[Agent]| side_graph(a).map_err(|source| DslError::Rule { line, source });
        RewriteRule::new(
            decl.name.clone(),
            check(&decl.left)?,
            check(&decl.right)?,
            decl.rate.clone(),
        )
        .map_err(|source| DslError::Rule { line, source })?;
        self.source.rules.push(decl);
        Ok(())
    }

    /// Comma-separated agents, bond labels renumbered by first appearance.
    fn side(&mut self, cur: &mut Cursor) -> Result<Vec<Agent>, DslError> {
        let mut agents: Vec<Agent> = Vec::new();
        let mut bonds: BTreeMap<u32, (usize, usize, usize)> = BTreeMap::new();
        let mut relabel: BTreeMap<u32, u32> = BTreeMap::new();
        loop {
            let (ty, col) = cur.ident("agent")?;
            let Some(declared) = self.declared.get(&ty) else {
                return Err(DslError::UndeclaredNode {
                    line: cur.line,
                    col,
                    name: ty,
                });
            };
            if agents.iter().any(|a| a.ty == ty) {
                return Err(DslError::RepeatedNodeTypeInRule {
                    line: cur.line,
                    col,
                    ty,
                });
            }
            cur.expect("(")?;
            let mut sites: Vec<SiteRef> = Vec::new();
            if cur.peek() != Some(')') {
                loop {
                    let (site, scol) = cur.ident("site name")?;
                    if !declared.contains(&site) {
                        return Err(DslError::UndeclaredSite {
                            line: cur.line,
                            col: scol,
                            node: ty,
                            site,
                        });
                    }
                    if sites.iter().any(|s| s.name == site) {
                        return Err(DslError::Syntax {
                            line: cur.line,
                            col: scol,
                            msg: format!("site {site} listed twice"),
                        });
                    }
                    let mut bond = None;
                    if cur.eat("!") {
                        let bcol = cur.col();
                        let label = cur.integer("bond label")?;
                        let entry = bonds.entry(label).or_insert((0, agents.len(), bcol));
                        entry.0 += 1;
                        if entry.0 > 2 {
                            return Err(DslError::UnbalancedBond {
                                line: cur.line,
                                col: bcol,
                                label,
                            });
                        }
                        if entry.0 == 2 && entry.1 == agents.len() {
                            return Err(DslError::Syntax {
                                line: cur.line,
                                col: bcol,
                                msg: format!("bond {label} joins {ty} to itself"),
                            });
                        }
                        let next = relabel.len() as u32 + 1;
                        bond = Some(*relabel.entry(label).or_insert(next));
                    }
                    sites.push(SiteRef { name: site, bond });
                    if !cur.eat(",") {
                        break;
                    }
                }
            }
            cur.expect(")")?;
            agents.push(Agent { ty, sites });
            if !cur.eat(",") {
                break;
            }
        }
        if let Some((&label, &(_, _, col))) = bonds.iter().find(|(_, b)| b.0 != 2) {
            return Err(DslError::UnbalancedBond {
                line: cur.line,
                col,
                label,
            });
        }
        Ok(agents)
    }

    fn init(&mut self, cur: &mut Cursor) -> Result<(), DslError> {
        if cur.peek().is_none() {
            return Ok(());
        }
        loop {
            let (ty, col) = cur.ident("node type")?;
            if !self.declared.contains_key(&ty) {
                return Err(DslError::UndeclaredNode {
                    line: cur.line,
                    col,
                    name: ty,
                });
            }
            let k = if cur.eat("*") { cur.integer("count")? } else { 1 };
            self.source.init.push((ty, k));
            if !cur.eat(",") {
                break;
            }
        }
        cur.finish()
    }
}

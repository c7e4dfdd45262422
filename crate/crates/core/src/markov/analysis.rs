use super::linalg::lu_solve;
use super::{ChainKind, Distribution, Kernel, MarkovError};

/// Communicating-class structure of a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStructure {
    /// Classes ordered by their smallest member; members ascending.
    pub classes: Vec<Vec<usize>>,
    /// `closed[c]` is true when no positive transition leaves class `c`.
    pub closed: Vec<bool>,
    /// Period of each class. `None` for a class without any internal cycle
    /// (a single transient state without a self-loop). Rate matrices report
    /// `Some(1)` by convention.
    pub periods: Vec<Option<usize>>,
    pub irreducible: bool,
    /// Class index of every state.
    pub class_of: Vec<usize>,
}

impl ChainStructure {
    pub fn closed_count(&self) -> usize {
        self.closed.iter().filter(|&&c| c).count()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Positive-entry digraph successors. Self-loops count for stochastic
/// matrices only (the diagonal of a generator is not a transition).
fn successors<K: Kernel>(k: &K, i: usize) -> impl Iterator<Item = usize> + '_ {
    k.matrix()
        .row(i)
        .iter()
        .filter(move |&&(c, v)| v > 0.0 && (K::KIND == ChainKind::Stochastic || c != i))
        .map(|&(c, _)| c)
}

/// Tarjan's strongly connected components, iterative.
fn strongly_connected<K: Kernel>(k: &K) -> Vec<usize> {
    let n = k.dim();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| successors(k, i).collect()).collect();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNVISITED; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.len().checked_sub(1) {
            let (v, edge) = call[top];
            if edge < adj[v].len() {
                let w = adj[v][edge];
                call[top].1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Communicating classes, closedness and periods of the positive-entry digraph.
pub fn classify<K: Kernel>(k: &K) -> ChainStructure {
    let n = k.dim();
    let raw = strongly_connected(k);
    // renumber classes by smallest member
    let mut remap = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0usize; n];
    for s in 0..n {
        let r = raw[s];
        if remap[r] == usize::MAX {
            remap[r] = classes.len();
            classes.push(Vec::new());
        }
        class_of[s] = remap[r];
        classes[remap[r]].push(s);
    }
    let closed: Vec<bool> = classes
        .iter()
        .enumerate()
        .map(|(c, members)| members.iter().all(|&s| successors(k, s).all(|t| class_of[t] == c)))
        .collect();
    let periods = classes
        .iter()
        .enumerate()
        .map(|(c, members)| match K::KIND {
            ChainKind::Rate => Some(1),
            ChainKind::Stochastic => class_period(k, members, c, &class_of),
        })
        .collect();
    let irreducible = classes.len() == 1 && closed[0];
    ChainStructure {
        classes,
        closed,
        periods,
        irreducible,
        class_of,
    }
}

/// gcd of `level(u) + 1 - level(v)` over all class-internal edges of a BFS
/// from the class's smallest member.
fn class_period<K: Kernel>(k: &K, members: &[usize], class: usize, class_of: &[usize]) -> Option<usize> {
    let mut level = std::collections::HashMap::with_capacity(members.len());
    let mut queue = std::collections::VecDeque::new();
    level.insert(members[0], 0usize);
    queue.push_back(members[0]);
    let mut g = 0usize;
    let mut has_edge = false;
    while let Some(u) = queue.pop_front() {
        let lu = level[&u];
        for v in successors(k, u).filter(|&v| class_of[v] == class) {
            has_edge = true;
            match level.get(&v) {
                Some(&lv) => g = gcd(g, (lu + 1).abs_diff(lv)),
                None => {
                    level.insert(v, lu + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    has_edge.then_some(g)
}

/// Unique stationary distribution: `μ P = μ` for stochastic kernels,
/// `μ Q = 0` for generators.
///
/// Solved by replacing one balance equation with the normalization and
/// running LU with partial pivoting on the dense system.
pub fn stationary<K: Kernel>(k: &K) -> Result<Distribution, MarkovError> {
    let structure = classify(k);
    let closed = structure.closed_count();
    if closed != 1 {
        return Err(MarkovError::NotIrreducible { closed_classes: closed });
    }
    let n = k.dim();
    let m = k.matrix();
    // system Aᵀ μᵀ = 0 with A = K - I (stochastic) or K (rate)
    let mut a = vec![vec![0.0; n]; n];
    for (r, c, v) in m.triplets() {
        a[c][r] += v;
    }
    if K::KIND == ChainKind::Stochastic {
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
    }
    let last = n - 1;
    a[last] = vec![1.0; n];
    let mut b = vec![0.0; n];
    b[last] = 1.0;
    let x = lu_solve(a, b, 1e-14).ok_or_else(|| MarkovError::SolverFailure("singular balance system".into()))?;
    let mu = Distribution::normalized(x)
        .map_err(|e| MarkovError::SolverFailure(format!("solution is not a distribution: {e}")))?;
    let residual = stationary_residual(k, &mu);
    let scale = match K::KIND {
        ChainKind::Stochastic => 1.0,
        ChainKind::Rate => (0..n).map(|i| -m.get(i, i)).fold(1.0, f64::max),
    };
    if residual > 1e-10 * scale {
        return Err(MarkovError::SolverFailure(format!(
            "balance residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(mu)
}

/// `‖μK − μ‖∞` for stochastic kernels, `‖μK‖∞` for generators.
pub(crate) fn stationary_residual<K: Kernel>(k: &K, mu: &Distribution) -> f64 {
    let prod = k.matrix().left_mul(mu.weights());
    prod.iter()
        .zip(mu.weights())
        .map(|(p, m)| match K::KIND {
            ChainKind::Stochastic => (p - m).abs(),
            ChainKind::Rate => p.abs(),
        })
        .fold(0.0, f64::max)
}

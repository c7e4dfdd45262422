//! File formats.
//!
//! - chains: JSON `{"states": [key, ...], "kind": "stochastic" | "rate",
//!   "triplets": [[row, col, value], ...]}`
//! - partitions: JSON `{"blocks": [[key, ...], ...], "labels": [..]}`, labels
//!   optional
//! - measure families: JSON `{"alphas": [{key: weight, ...}, ...]}`, one map
//!   per block in block order
//! - distributions: CSV `state_key,weight`
//! - transient runs: CSV `t,state_key,weight`
//! - diagnostics: CSV `t,dev_lump,dev_inv`
//!
//! Floats are written in shortest round-trip form, so every writer is
//! byte-deterministic.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{AggregationError, DiagnosticPoint, MeasureFamily, Partition};
use crate::markov::{
    ChainKind, Distribution, Kernel, MarkovError, RateMatrix, SparseMatrix, StateSpace, StochasticMatrix,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
}

#[derive(Serialize, Deserialize)]
struct ChainFile {
    states: Vec<String>,
    kind: ChainKind,
    triplets: Vec<(usize, usize, f64)>,
}

/// A chain read from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainMatrix {
    Stochastic(StochasticMatrix),
    Rate(RateMatrix),
}

impl ChainMatrix {
    pub fn kind(&self) -> ChainKind {
        match self {
            ChainMatrix::Stochastic(_) => ChainKind::Stochastic,
            ChainMatrix::Rate(_) => ChainKind::Rate,
        }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        match self {
            ChainMatrix::Stochastic(p) => p.matrix(),
            ChainMatrix::Rate(q) => q.matrix(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedChain {
    pub space: StateSpace,
    pub matrix: ChainMatrix,
}

pub fn write_chain<K: Kernel>(space: &StateSpace, k: &K) -> Result<String, IoError> {
    check_dim(space, k.dim())?;
    let file = ChainFile {
        states: space.keys().to_vec(),
        kind: K::KIND,
        triplets: k.matrix().triplets().collect(),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

pub fn read_chain(text: &str) -> Result<LoadedChain, IoError> {
    let file: ChainFile = serde_json::from_str(text)?;
    let space = StateSpace::new(file.states)?;
    let m = SparseMatrix::from_triplets(space.len(), file.triplets)?;
    let matrix = match file.kind {
        ChainKind::Stochastic => ChainMatrix::Stochastic(StochasticMatrix::new(m)?),
        ChainKind::Rate => ChainMatrix::Rate(RateMatrix::new(m)?),
    };
    Ok(LoadedChain { space, matrix })
}

#[derive(Serialize, Deserialize)]
struct PartitionFile {
    blocks: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Blocks by state key, with optional per-block labels.
pub fn write_partition(space: &StateSpace, part: &Partition, labels: Option<&[String]>) -> Result<String, IoError> {
    check_dim(space, part.n_states())?;
    if let Some(l) = labels {
        if l.len() != part.len() {
            return Err(IoError::Format(format!("{} labels for {} blocks", l.len(), part.len())));
        }
    }
    let file = PartitionFile {
        blocks: part
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&s| space.key(s).to_string()).collect())
            .collect(),
        labels: labels.map(<[String]>::to_vec),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Reads a partition of `space`. Blocks keep their file order.
pub fn read_partition(text: &str, space: &StateSpace) -> Result<(Partition, Option<Vec<String>>), IoError> {
    let file: PartitionFile = serde_json::from_str(text)?;
    let blocks = file
        .blocks
        .iter()
        .map(|b| b.iter().map(|k| position(space, k)).collect())
        .collect::<Result<Vec<Vec<usize>>, _>>()?;
    if let Some(l) = &file.labels {
        if l.len() != blocks.len() {
            return Err(IoError::Format(format!(
                "{} labels for {} blocks",
                l.len(),
                blocks.len()
            )));
        }
    }
    Ok((Partition::new(space.len(), blocks)?, file.labels))
}

#[derive(Serialize, Deserialize)]
struct MeasuresFile {
    alphas: Vec<BTreeMap<String, f64>>,
}

pub fn write_measures(space: &StateSpace, alphas: &MeasureFamily) -> Result<String, IoError> {
    let part = alphas.partition();
    check_dim(space, part.n_states())?;
    let file = MeasuresFile {
        alphas: part
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&s| (space.key(s).to_string(), alphas.alpha(s))).collect())
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Reads a measure family over `part`; the `i`-th map must cover exactly the
/// `i`-th block.
pub fn read_measures(text: &str, space: &StateSpace, part: &Partition) -> Result<MeasureFamily, IoError> {
    let file: MeasuresFile = serde_json::from_str(text)?;
    if file.alphas.len() != part.len() {
        return Err(IoError::Format(format!(
            "{} measures for {} blocks",
            file.alphas.len(),
            part.len()
        )));
    }
    let mut weight = vec![f64::NAN; space.len()];
    for (i, block) in file.alphas.iter().enumerate() {
        for (key, &w) in block {
            let s = position(space, key)?;
            if part.block_of(s) != i {
                return Err(IoError::Format(format!("state `{key}` is not in block {i}")));
            }
            weight[s] = w;
        }
        if block.len() != part.block(i).len() {
            return Err(IoError::Format(format!("measure {i} does not cover its block")));
        }
    }
    Ok(MeasureFamily::new(part, weight)?)
}

pub fn write_distribution(space: &StateSpace, pi: &Distribution) -> Result<String, IoError> {
    check_dim(space, pi.len())?;
    let rows = pi
        .weights()
        .iter()
        .enumerate()
        .map(|(s, w)| vec![space.key(s).to_string(), float(*w)]);
    csv_text(&["state_key", "weight"], rows)
}

/// Reads `state_key,weight` rows; states not listed get weight 0.
pub fn read_distribution(text: &str, space: &StateSpace) -> Result<Distribution, IoError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["state_key", "weight"] {
        return Err(IoError::Format("expected header `state_key,weight`".into()));
    }
    let mut weights = vec![0.0; space.len()];
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let key = &record[0];
        let s = position(space, key)?;
        if !seen.insert(s) {
            return Err(IoError::Format(format!("state `{key}` listed twice")));
        }
        weights[s] = record[1]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("invalid weight `{}`", &record[1])))?;
    }
    Ok(Distribution::new(weights)?)
}

/// One `t,state_key,weight` row per time point and state.
pub fn write_transient(space: &StateSpace, times: &[f64], dists: &[Distribution]) -> Result<String, IoError> {
    if times.len() != dists.len() {
        return Err(IoError::Format(format!(
            "{} times for {} distributions",
            times.len(),
            dists.len()
        )));
    }
    let mut rows = Vec::new();
    for (t, pi) in times.iter().zip(dists) {
        check_dim(space, pi.len())?;
        for (s, w) in pi.weights().iter().enumerate() {
            rows.push(vec![float(*t), space.key(s).to_string(), float(*w)]);
        }
    }
    csv_text(&["t", "state_key", "weight"], rows)
}

pub fn write_diagnostics(points: &[DiagnosticPoint]) -> Result<String, IoError> {
    let rows = points
        .iter()
        .map(|p| vec![float(p.t), float(p.dev_lump), float(p.dev_inv)]);
    csv_text(&["t", "dev_lump", "dev_inv"], rows)
}

/// Transition graph of a chain in Graphviz syntax. Diagonal entries are
/// omitted.
pub fn chain_to_dot<K: Kernel>(space: &StateSpace, k: &K) -> Result<String, IoError> {
    check_dim(space, k.dim())?;
    let mut out = String::from("digraph chain {\n");
    for (i, key) in space.keys().iter().enumerate() {
        let _ = writeln!(out, "  s{i} [label=\"{}\"];", key.replace('"', "\\\""));
    }
    for (i, j, v) in k.matrix().triplets() {
        if i != j {
            let _ = writeln!(out, "  s{i} -> s{j} [label=\"{}\"];", float(v));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Shortest representation that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IoError::Format(e.to_string()))
}

fn position(space: &StateSpace, key: &str) -> Result<usize, IoError> {
    space
        .position(key)
        .ok_or_else(|| IoError::UnknownState(key.to_string()))
}

fn check_dim(space: &StateSpace, dim: usize) -> Result<(), IoError> {
    if space.len() == dim {
        Ok(())
    } else {
        Err(MarkovError::DimensionMismatch {
            expected: space.len(),
            found: dim,
        }
        .into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::uniform_measures;
    use crate::casestudies::lumping_example;

    #[test]
    fn chain_round_trip() {
        let ex = lumping_example(1.0, 3.0);
        let text = write_chain(&ex.space, &ex.rates).unwrap();
        assert!(text.contains("\"kind\": \"rate\""));
        let back = read_chain(&text).unwrap();
        assert_eq!(back.space, ex.space);
        assert_eq!(back.matrix, ChainMatrix::Rate(ex.rates.clone()));
        assert_eq!(write_chain(&back.space, &ex.rates).unwrap(), text);
    }

    #[test]
    fn stochastic_chain_is_validated() {
        let bad = r#"{"states": ["x", "y"], "kind": "stochastic", "triplets": [[0, 1, 0.5], [1, 0, 1.0]]}"#;
        assert!(matches!(
            read_chain(bad),
            Err(IoError::Markov(MarkovError::RowSum { row: 0, .. }))
        ));
        let dup = r#"{"states": ["x", "x"], "kind": "rate", "triplets": []}"#;
        assert!(matches!(
            read_chain(dup),
            Err(IoError::Markov(MarkovError::DuplicateState(_)))
        ));
        assert!(matches!(read_chain("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn partition_round_trip_with_labels() {
        let ex = lumping_example(1.0, 3.0);
        let labels = vec!["first".to_string(), "second".to_string()];
        let text = write_partition(&ex.space, &ex.partition, Some(&labels)).unwrap();
        let (part, l) = read_partition(&text, &ex.space).unwrap();
        assert_eq!(part, ex.partition);
        assert_eq!(l, Some(labels));
        let swapped = r#"{"blocks": [["G", "G'"], ["G1", "G2", "G1'", "G2'"]], "labels": ["q", "p"]}"#;
        let (part, l) = read_partition(swapped, &ex.space).unwrap();
        assert_eq!(part.block(0), &[4, 5]);
        assert_eq!(l.unwrap(), ["q", "p"]);
        let missing = r#"{"blocks": [["G1"]]}"#;
        assert!(matches!(
            read_partition(missing, &ex.space),
            Err(IoError::Aggregation(_))
        ));
        let unknown = r#"{"blocks": [["nope"]]}"#;
        assert!(matches!(
            read_partition(unknown, &ex.space),
            Err(IoError::UnknownState(_))
        ));
    }

    #[test]
    fn measures_round_trip() {
        let ex = lumping_example(1.0, 3.0);
        let alphas = uniform_measures(&ex.partition);
        let text = write_measures(&ex.space, &alphas).unwrap();
        assert!(text.contains("\"G1\": 0.25"));
        assert_eq!(read_measures(&text, &ex.space, &ex.partition).unwrap(), alphas);
        let partial = r#"{"alphas": [{"G1": 1.0}, {"G": 0.5, "G'": 0.5}]}"#;
        assert!(read_measures(partial, &ex.space, &ex.partition).is_err());
    }

    #[test]
    fn distribution_csv() {
        let space = StateSpace::new(vec!["a".into(), "b,c".into(), "d".into()]).unwrap();
        let pi = Distribution::new(vec![0.25, 0.75, 0.0]).unwrap();
        let text = write_distribution(&space, &pi).unwrap();
        assert_eq!(text, "state_key,weight\na,0.25\n\"b,c\",0.75\nd,0.0\n");
        assert_eq!(read_distribution(&text, &space).unwrap(), pi);
        let sparse = "state_key,weight\nd,1\n";
        assert_eq!(read_distribution(sparse, &space).unwrap(), Distribution::point(3, 2));
        assert!(read_distribution("state_key,weight\nd,0.5\n", &space).is_err());
        assert!(read_distribution("key,w\nd,1\n", &space).is_err());
    }

    #[test]
    fn transient_and_diagnostics_csv() {
        let space = StateSpace::new(vec!["x".into(), "y".into()]).unwrap();
        let d = vec![Distribution::point(2, 0), Distribution::uniform(2)];
        assert_eq!(
            write_transient(&space, &[0.0, 1.5], &d).unwrap(),
            "t,state_key,weight\n0.0,x,1.0\n0.0,y,0.0\n1.5,x,0.5\n1.5,y,0.5\n"
        );
        let p = DiagnosticPoint {
            t: 2.0,
            dev_lump: 1e-17,
            dev_inv: 0.0,
        };
        assert_eq!(write_diagnostics(&[p]).unwrap(), "t,dev_lump,dev_inv\n2.0,1e-17,0.0\n");
    }

    #[test]
    fn dot_output() {
        let space = StateSpace::new(vec!["x".into(), "y".into()]).unwrap();
        let q = RateMatrix::from_off_diagonal(2, [(0, 1, 2.0), (1, 0, 0.5)]).unwrap();
        let dot = chain_to_dot(&space, &q).unwrap();
        assert!(dot.contains("s0 -> s1 [label=\"2.0\"];"));
        assert!(!dot.contains("s0 -> s0"));
    }
}

//! Built-in abstraction maps, evaluated on the mixtures behind a chain's
//! state keys.

use anyhow::{Context, Result};
use clap::ValueEnum;
use lumpkit::aggregation::Partition;
use lumpkit::casestudies::{polymer_phi1, polymer_phi2, polymer_phi3, scaffold_phi1, scaffold_phi2};
use lumpkit::markov::StateSpace;
use lumpkit::rules::RuleModel;
use lumpkit::sitegraph::{species_census, ReactionMixture};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Phi {
    /// Canonical species census.
    Species,
    ScaffoldPhi1,
    ScaffoldPhi2,
    PolymerPhi1,
    PolymerPhi2,
    PolymerPhi3,
}

/// Fiber partition of `phi` over `space`, blocks ordered by value, with the
/// printed values as labels.
pub fn partition(phi: Phi, model: &RuleModel, space: &StateSpace) -> Result<(Partition, Vec<String>)> {
    let mixtures = space
        .keys()
        .iter()
        .map(|k| {
            model
                .mixture_from_key(k)
                .with_context(|| format!("state `{k}` is not a mixture of the model"))
        })
        .collect::<Result<Vec<_>>>()?;
    match phi {
        Phi::Species => {
            let census = mixtures.iter().map(species_census).collect::<Result<Vec<_>, _>>()?;
            let (part, values) = Partition::from_labels(&census);
            let labels = values
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|(key, n)| format!("{}*{n}", key.as_str()))
                        .collect::<Vec<_>>()
                        .join(" + ")
                })
                .collect();
            Ok((part, labels))
        }
        Phi::ScaffoldPhi1 => Ok(by(&mixtures, scaffold_phi1)),
        Phi::ScaffoldPhi2 => Ok(by(&mixtures, scaffold_phi2)),
        Phi::PolymerPhi1 => {
            let values = mixtures.iter().map(polymer_phi1).collect::<Result<Vec<_>, _>>()?;
            Ok(labelled(&values))
        }
        Phi::PolymerPhi2 => Ok(by(&mixtures, polymer_phi2)),
        Phi::PolymerPhi3 => Ok(by(&mixtures, polymer_phi3)),
    }
}

fn by<T, F>(mixtures: &[ReactionMixture], f: F) -> (Partition, Vec<String>)
where
    T: Ord + Clone + ToString,
    F: Fn(&ReactionMixture) -> T,
{
    labelled(&mixtures.iter().map(f).collect::<Vec<_>>())
}

fn labelled<T: Ord + Clone + ToString>(values: &[T]) -> (Partition, Vec<String>) {
    let (part, labels) = Partition::from_labels(values);
    (part, labels.iter().map(ToString::to_string).collect())
}

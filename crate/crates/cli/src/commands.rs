use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use lumpkit::aggregation::{aggregate, check_cond3, check_condition, lift, uniform_measures, MeasureFamily, Partition};
use lumpkit::casestudies::{polymer_model, scaffold_model, PolymerParams, ScaffoldParams};
use lumpkit::dsl::{parse_model, print_model};
use lumpkit::io::{
    chain_to_dot, read_chain, read_distribution, read_measures, read_partition, write_chain, write_distribution,
    write_measures, write_partition, write_transient, ChainMatrix, LoadedChain,
};
use lumpkit::markov::{
    default_uniformization_rate, evolve_discrete, stationary, transient_with_rate, Distribution, StateSpace,
};
use lumpkit::rules::{explore, Rate, RuleModel};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::{phi, CaseStudy, Command, Emit, PartitionArgs, Violation};

/// Text for the main output, plus a violation to report after it is written.
pub struct Output {
    pub text: String,
    pub violation: Option<Violation>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self { text, violation: None }
    }
}

macro_rules! with_kernel {
    ($m:expr, $k:ident => $body:expr) => {
        match $m {
            ChainMatrix::Stochastic($k) => $body,
            ChainMatrix::Rate($k) => $body,
        }
    };
}

pub fn run(cfg: &RunConfig, command: Command) -> Result<Output> {
    match command {
        Command::Explore { model } => {
            let model = load_model(&model)?;
            explore_model(cfg, &model).map(Output::from)
        }
        Command::Check { chain, part } => check(cfg, &chain, &part),
        Command::Aggregate {
            chain,
            part,
            partition_out,
            measures_out,
        } => {
            let loaded = load_chain(&chain)?;
            let lumping = Lumping::required(&part, &loaded.space)?;
            let fmt = cfg.format_or(Format::Json, &[Format::Json, Format::Dot])?;
            let blocks = lumping.label_space()?;
            let text = with_kernel!(&loaded.matrix, k => {
                let agg = aggregate(k, &lumping.partition, &lumping.measures, cfg.tol)?;
                match fmt {
                    Format::Dot => chain_to_dot(&blocks, &agg.matrix)?,
                    _ => write_chain(&blocks, &agg.matrix)?,
                }
            });
            if let Some(path) = partition_out {
                let labels = lumping.labels.clone();
                write_file(
                    &path,
                    &write_partition(&loaded.space, &lumping.partition, Some(&labels))?,
                )?;
            }
            if let Some(path) = measures_out {
                write_file(&path, &write_measures(&loaded.space, &lumping.measures)?)?;
            }
            Ok(text.into())
        }
        Command::Transient {
            chain,
            times,
            init,
            part,
        } => {
            cfg.format_or(Format::Csv, &[Format::Csv])?;
            let loaded = load_chain(&chain)?;
            let pi0 = initial(&init, &part, &loaded.space)?;
            let dists = match &loaded.matrix {
                ChainMatrix::Rate(q) => {
                    let r = default_uniformization_rate(q, cfg.slack);
                    times
                        .iter()
                        .map(|&t| transient_with_rate(q, &pi0, t, cfg.tol, r))
                        .collect::<Result<Vec<_>, _>>()?
                }
                ChainMatrix::Stochastic(p) => times
                    .iter()
                    .map(|&t| {
                        if !(t >= 0.0) || t.fract() != 0.0 {
                            bail!("stochastic chains take whole step counts, got {t}");
                        }
                        Ok(evolve_discrete(p, &pi0, t as usize)?)
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            Ok(write_transient(&loaded.space, &times, &dists)?.into())
        }
        Command::Stationary { chain } => {
            cfg.format_or(Format::Csv, &[Format::Csv])?;
            let loaded = load_chain(&chain)?;
            let pi = with_kernel!(&loaded.matrix, k => stationary(k)?);
            Ok(write_distribution(&loaded.space, &pi)?.into())
        }
        Command::Deaggregate { chain, part, dist } => {
            cfg.format_or(Format::Csv, &[Format::Csv])?;
            let loaded = load_chain(&chain)?;
            let lumping = Lumping::required(&part, &loaded.space)?;
            let pi = lumping.lift(&read_text(&dist)?)?;
            Ok(write_distribution(&loaded.space, &pi)?.into())
        }
        Command::Casestudy { which, emit } => {
            let model = match which {
                CaseStudy::Scaffold { na, nb, nc, rates } => scaffold_model(&ScaffoldParams {
                    n_a: na,
                    n_b: nb,
                    n_c: nc,
                    rates: parse_rates(&rates)?,
                }),
                CaseStudy::Polymer { n, rates } => polymer_model(&PolymerParams {
                    n,
                    rates: parse_rates(&rates)?,
                }),
            };
            match emit {
                Emit::Model => Ok(print_model(&model)?.into()),
                Emit::Chain => explore_model(cfg, &model).map(Output::from),
            }
        }
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn check(cfg: &RunConfig, chain: &Path, part: &PartitionArgs) -> Result<Output> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    let loaded = load_chain(chain)?;
    let lumping = Lumping::required(part, &loaded.space)?;
    let (report, cond3) = with_kernel!(&loaded.matrix, k => (
        check_condition(k, &lumping.partition, &lumping.measures, cfg.tol)?,
        check_cond3(k, &lumping.partition),
    ));
    let text = serde_json::to_string_pretty(&json!({
        "states": loaded.space.len(),
        "blocks": lumping.partition.len(),
        "holds": report.holds,
        "residual": report.residual,
        "tol": cfg.tol,
        "cond3": cond3,
    }))? + "\n";
    let violation = (!report.holds).then_some(Violation {
        residual: report.residual,
        tol: cfg.tol,
    });
    Ok(Output { text, violation })
}

fn explore_model(cfg: &RunConfig, model: &RuleModel) -> Result<String> {
    let fmt = cfg.format_or(Format::Json, &[Format::Json, Format::Dot])?;
    let chain = explore(model, cfg.max_states)?;
    Ok(match fmt {
        Format::Dot => chain.to_dot(),
        _ => write_chain(&chain.space, &chain.rates)?,
    })
}

/// A partition with block labels and measures.
struct Lumping {
    partition: Partition,
    labels: Vec<String>,
    measures: MeasureFamily,
}

impl Lumping {
    fn from_args(args: &PartitionArgs, space: &StateSpace) -> Result<Option<Self>> {
        let (partition, labels) = match (&args.partition, args.phi) {
            (Some(path), _) => {
                let (part, labels) = read_partition(&read_text(path)?, space)
                    .with_context(|| format!("reading partition {}", path.display()))?;
                let labels = labels.unwrap_or_else(|| (0..part.len()).map(|b| format!("B{b}")).collect());
                (part, labels)
            }
            (None, Some(phi)) => {
                let path = args.model.as_deref().context("--phi needs --model")?;
                phi::partition(phi, &load_model(path)?, space)?
            }
            (None, None) => {
                if args.measures.is_some() {
                    bail!("--measures needs --partition or --phi");
                }
                return Ok(None);
            }
        };
        let measures = match &args.measures {
            Some(path) => read_measures(&read_text(path)?, space, &partition)
                .with_context(|| format!("reading measures {}", path.display()))?,
            None => uniform_measures(&partition),
        };
        Ok(Some(Self {
            partition,
            labels,
            measures,
        }))
    }

    fn required(args: &PartitionArgs, space: &StateSpace) -> Result<Self> {
        Self::from_args(args, space)?.context("this command needs --partition or --phi")
    }

    fn label_space(&self) -> Result<StateSpace> {
        StateSpace::new(self.labels.clone()).context("block labels must be distinct")
    }

    /// Reads a distribution keyed by block label and lifts it onto states.
    fn lift(&self, text: &str) -> Result<Distribution> {
        let blocks = read_distribution(text, &self.label_space()?)?;
        Ok(lift(&blocks, &self.measures)?)
    }
}

fn initial(init: &str, part: &PartitionArgs, space: &StateSpace) -> Result<Distribution> {
    if init == "uniform" {
        return Ok(Distribution::uniform(space.len()));
    }
    if let Some(path) = init.strip_prefix("respectful:") {
        let lumping = Lumping::required(part, space)?;
        return lumping.lift(&read_text(Path::new(path))?);
    }
    Ok(read_distribution(&read_text(Path::new(init))?, space)?)
}

fn parse_rates(list: &[String]) -> Result<[Rate; 4]> {
    let rates = list
        .iter()
        .map(|s| s.trim().parse::<Rate>().with_context(|| format!("bad rate `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    rates
        .try_into()
        .map_err(|v: Vec<Rate>| anyhow::anyhow!("expected 4 rates, got {}", v.len()))
}

fn load_model(path: &Path) -> Result<RuleModel> {
    parse_model(&read_text(path)?).with_context(|| format!("parsing model {}", path.display()))
}

fn load_chain(path: &Path) -> Result<LoadedChain> {
    read_chain(&read_text(path)?).with_context(|| format!("reading chain {}", path.display()))
}

/// Reads a file, or stdin for `-`.
fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

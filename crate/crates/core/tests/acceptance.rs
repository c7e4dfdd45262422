//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use lumpkit::aggregation::{
    aggregate, check_cond3, check_condition, diagnostics_for, lift, nested, power_identity_residual, respects,
    restrict, uniform_measures, verify_commutation, AggregatedChain, MeasureFamily, Partition, DEFAULT_CONDITION_TOL,
};
use lumpkit::casestudies::*;
use lumpkit::dsl::{parse_model, parse_source};
use lumpkit::markov::{
    default_uniformization_rate, stationary, transient, uniformize, Distribution, Kernel, RateMatrix, DEFAULT_SLACK,
};
use lumpkit::rules::{explore, ExploredChain, Rate};
use lumpkit::sitegraph::species_census;
use num_bigint::BigUint;

type Check = Result<(bool, String), Box<dyn Error>>;

const CAP: usize = 100_000;

fn scaffold(na: u32, nb: u32, nc: u32) -> ExploredChain {
    explore(&scaffold_model(&ScaffoldParams::unit(na, nb, nc)), CAP).expect("scaffold explores")
}

fn polymer_with(n: u32, rates: [Rate; 4]) -> ExploredChain {
    explore(&polymer_model(&PolymerParams { n, rates }), CAP).expect("polymer explores")
}

fn uniform_aggregate(q: &RateMatrix, part: &Partition) -> Result<AggregatedChain<RateMatrix>, Box<dyn Error>> {
    Ok(aggregate(q, part, &uniform_measures(part), DEFAULT_CONDITION_TOL)?)
}

/// Respecting start: uniform inside each block, block `j` weighted `j + 1`.
fn respecting_start(alphas: &MeasureFamily) -> Result<Distribution, Box<dyn Error>> {
    let m = alphas.partition().len();
    let blocks = Distribution::normalized((1..=m).map(|j| j as f64).collect())?;
    Ok(lift(&blocks, alphas)?)
}

fn fixture(name: &str) -> Result<String, Box<dyn Error>> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", "models", name]
        .iter()
        .collect();
    Ok(std::fs::read_to_string(path)?)
}

fn state_counts() -> Check {
    let mut ok = true;
    let mut seen = Vec::new();
    for n in 1..=2u32 {
        let chain = scaffold(n, n, n);
        let b1 = chain.partition_by(scaffold_phi1).0.len() as u64;
        let b2 = chain.partition_by(scaffold_phi2).0.len() as u64;
        let (e1, e2) = scaffold_state_counts(n as u64);
        ok &= (b1, b2) == (e1, e2);
        seen.push(format!("n={n}: {b1}/{b2} (expected {e1}/{e2})"));
    }
    Ok((ok, seen.join(", ")))
}

fn polymer_counts() -> Check {
    let chain = polymer_with(2, PolymerParams::unit(2).rates);
    let b2 = chain.partition_by(polymer_phi2).0.len();
    let b3 = chain.partition_by(polymer_phi3).0.len();
    let species = chain.partition_by(|m| species_census(m).unwrap()).0.len();
    let bound = BigUint::from(3u32) * partition_number(2);
    let ok = (b2, b3) == (9, 5) && BigUint::from(species) >= bound;
    Ok((ok, format!("phi2 {b2}, phi3 {b3}, species {species} (>= {bound})")))
}

fn distinct_bind_rates(delta: &str) -> [Rate; 4] {
    let one = Rate::one();
    let other: Rate = format!("{}", 1.0 + delta.parse::<f64>().unwrap()).parse().unwrap();
    [one.clone(), one.clone(), other, one]
}

fn structural_check() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (na, nb, nc) in [(1, 3, 1), (2, 2, 2)] {
        let chain = scaffold(na, nb, nc);
        let c1 = check_cond3(&chain.rates, &chain.partition_by(scaffold_phi1).0);
        let c2 = check_cond3(&chain.rates, &chain.partition_by(scaffold_phi2).0);
        ok &= c1 && c2;
        notes.push(format!("scaffold({na},{nb},{nc}) phi1 {c1} phi2 {c2}"));
    }
    let equal = polymer_with(2, PolymerParams::unit(2).rates);
    let p2 = check_cond3(&equal.rates, &equal.partition_by(polymer_phi2).0);
    ok &= p2;
    notes.push(format!("polymer(2) phi2 {p2}"));
    let mut all_fail = true;
    for delta in ["1e-6", "1e-3", "0.5", "1"] {
        let chain = polymer_with(2, distinct_bind_rates(delta));
        all_fail &= !check_cond3(&chain.rates, &chain.partition_by(polymer_phi3).0);
    }
    ok &= all_fail;
    notes.push(format!(
        "polymer(2) phi3 with bind rates 1 vs 1+d, d in {{1e-6..1}}: fails {all_fail}"
    ));
    Ok((ok, notes.join("; ")))
}

fn aggregate_validity() -> Check {
    let mut chains: Vec<(String, ExploredChain, Vec<Partition>)> = Vec::new();
    for (na, nb, nc) in [(1, 1, 1), (2, 2, 2), (1, 3, 1)] {
        let c = scaffold(na, nb, nc);
        let parts = vec![c.partition_by(scaffold_phi1).0, c.partition_by(scaffold_phi2).0];
        chains.push((format!("scaffold({na},{nb},{nc})"), c, parts));
    }
    let p = polymer_with(2, PolymerParams::unit(2).rates);
    let parts = vec![p.partition_by(polymer_phi2).0];
    chains.push(("polymer(2)".into(), p, parts));
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, chain, parts) in &chains {
        for part in parts {
            worst = worst.max(uniform_aggregate(&chain.rates, part)?.matrix.row_sum_residual());
            count += 1;
        }
    }
    Ok((
        worst <= 1e-11,
        format!("{count} aggregates, max row-sum residual {worst:.2e} (<= 1e-11)"),
    ))
}

fn lumpability_invertibility() -> Check {
    let chain = scaffold(2, 2, 2);
    let (part, _) = chain.partition_by(scaffold_phi2);
    let agg = uniform_aggregate(&chain.rates, &part)?;
    let pi0 = respecting_start(&agg.measures)?;
    let points = diagnostics_for(&chain.rates, &agg, &pi0, &[0.5, 2.0, 10.0])?;
    let lump = points.iter().map(|p| p.dev_lump).fold(0.0, f64::max);
    let inv = points.iter().map(|p| p.dev_inv).fold(0.0, f64::max);
    Ok((
        lump <= 1e-9 && inv <= 1e-9,
        format!("max dev_lump {lump:.2e}, max dev_inv {inv:.2e} over t in {{0.5, 2, 10}} (<= 1e-9)"),
    ))
}

fn commutation() -> Check {
    let chain = scaffold(1, 3, 1);
    let (part, _) = chain.partition_by(scaffold_phi2);
    let r = default_uniformization_rate(&chain.rates, DEFAULT_SLACK);
    let a = verify_commutation(&chain.rates, &part, &uniform_measures(&part), r)?;
    let ex = lumping_example(1.0, 3.0);
    let r = default_uniformization_rate(&ex.rates, DEFAULT_SLACK);
    let b = verify_commutation(&ex.rates, &ex.partition, &uniform_measures(&ex.partition), r)?;
    Ok((
        a <= 1e-12 && b <= 1e-12,
        format!("scaffold(1,3,1) {a:.2e}, six-state example {b:.2e} (<= 1e-12)"),
    ))
}

fn power_identity() -> Check {
    let chain = scaffold(1, 3, 1);
    let (part, _) = chain.partition_by(scaffold_phi2);
    let alphas = uniform_measures(&part);
    let m = uniformize(&chain.rates, default_uniformization_rate(&chain.rates, DEFAULT_SLACK))?;
    let mut worst = 0.0f64;
    for n in 1..=6 {
        worst = worst.max(power_identity_residual(&m, &part, &alphas, n)?);
    }
    Ok((
        worst <= 1e-12,
        format!("max residual {worst:.2e} for n = 1..6 (<= 1e-12)"),
    ))
}

fn stationarity() -> Check {
    let chain = scaffold(2, 2, 2);
    let (part, _) = chain.partition_by(scaffold_phi2);
    let agg = uniform_aggregate(&chain.rates, &part)?;
    let pi = stationary(&chain.rates)?;
    let dev = respects(&pi, &agg.measures)?.deviation;
    let diff = restrict(&pi, &part)?.max_abs_diff(&stationary(&agg.matrix)?);
    Ok((
        dev <= 1e-9 && diff <= 1e-9,
        format!("respect deviation {dev:.2e}, block stationary difference {diff:.2e} (<= 1e-9)"),
    ))
}

fn convergence() -> Check {
    let chain = scaffold(1, 3, 1);
    let (part, labels) = chain.partition_by(scaffold_phi2);
    let agg = uniform_aggregate(&chain.rates, &part)?;
    let j = labels
        .iter()
        .position(|v| *v == ScaffoldPhi2 { m_ab: 1, m_bc: 1 })
        .ok_or("no (1,1) block")?;
    if part.block(j).len() != 9 {
        return Ok((false, format!("block (1,1) has {} states", part.block(j).len())));
    }
    let pi0 = Distribution::point(chain.len(), part.block(j)[0]);
    let times = [1.0, 5.0, 10.0, 50.0];
    let devs: Vec<f64> = diagnostics_for(&chain.rates, &agg, &pi0, &times)?
        .iter()
        .map(|p| p.dev_inv)
        .collect();
    let monotone = devs.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let last = devs[devs.len() - 1];
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.3e}")).collect();
    Ok((
        last <= 1e-6 && monotone,
        format!(
            "dev_inv at t = 1, 5, 10, 50: {} (final <= 1e-6, nonincreasing {monotone})",
            shown.join(", ")
        ),
    ))
}

fn class_sizes() -> Check {
    let mut ok = true;
    let mut checked = 0;
    for (na, nb, nc) in [(1, 3, 1), (2, 2, 2)] {
        let p = ScaffoldParams::unit(na, nb, nc);
        let chain = scaffold(na, nb, nc);
        let (part1, labels1) = chain.partition_by(scaffold_phi1);
        for (v, size) in labels1.iter().zip(part1.block_sizes()) {
            ok &= scaffold_class_size_phi1(v, &p)? == BigUint::from(size);
            checked += 1;
        }
        let (part2, labels2) = chain.partition_by(scaffold_phi2);
        for (v, size) in labels2.iter().zip(part2.block_sizes()) {
            ok &= scaffold_class_size_phi2(v, &p)? == BigUint::from(size);
            checked += 1;
        }
    }
    let p = ScaffoldParams::unit(1, 3, 1);
    let s1 = |m_ab, m_bc, m_abc| scaffold_class_size_phi1(&ScaffoldPhi1 { m_ab, m_bc, m_abc }, &p);
    let s2 = |m_ab, m_bc| scaffold_class_size_phi2(&ScaffoldPhi2 { m_ab, m_bc }, &p);
    let named = [s1(1, 0, 0)?, s2(1, 0)?, s2(1, 1)?, s1(1, 1, 0)?, s1(0, 0, 1)?];
    let expected: Vec<BigUint> = [3u32, 3, 9, 6, 3].into_iter().map(BigUint::from).collect();
    ok &= named.as_slice() == expected.as_slice();
    let shown: Vec<String> = named.iter().map(ToString::to_string).collect();
    Ok((
        ok,
        format!(
            "{checked} blocks match enumeration; (1,0,0), (1,0), (1,1), (1,1,0), (0,0,1) -> {}",
            shown.join(", ")
        ),
    ))
}

fn nested_aggregation() -> Check {
    let chain = scaffold(1, 3, 1);
    let q = &chain.rates;
    let (fine, _) = chain.partition_by(scaffold_phi1);
    let (coarse, _) = chain.partition_by(scaffold_phi2);
    let fine_agg = uniform_aggregate(q, &fine)?;
    let coarse_agg = uniform_aggregate(q, &coarse)?;
    let nest = nested(&fine, &coarse)?;
    let cond = check_condition(&fine_agg.matrix, &nest.blocks, &nest.alpha_prime, 1e-12)?;
    let re = aggregate(&fine_agg.matrix, &nest.blocks, &nest.alpha_prime, 1e-12)?;
    let gen_diff = re.matrix.matrix().max_abs_diff(coarse_agg.matrix.matrix());

    let pi0 = respecting_start(&coarse_agg.measures)?;
    let x = transient(q, &pi0, 5.0, 1e-14)?;
    let on_fine = restrict(&x, &fine)?;
    let mut alpha_dev = 0.0f64;
    for j in 0..nest.blocks.len() {
        let members = nest.blocks.block(j);
        let mass: f64 = members.iter().map(|&i| on_fine.weights()[i]).sum();
        for &i in members {
            alpha_dev = alpha_dev.max((on_fine.weights()[i] / mass - nest.alpha_prime.alpha(i)).abs());
        }
    }
    Ok((
        cond.holds && cond.residual <= 1e-12 && gen_diff <= 1e-11 && alpha_dev <= 1e-9,
        format!(
            "residual {:.2e} (<= 1e-12), generator difference {gen_diff:.2e} (<= 1e-11), conditional at t=5 {alpha_dev:.2e} (<= 1e-9)",
            cond.residual
        ),
    ))
}

fn parser() -> Check {
    let mut ok = true;
    for name in ["scaffold_131.lk", "polymer_2.lk"] {
        let src = parse_source(&fixture(name)?)?;
        ok &= parse_source(&src.to_string())? == src;
    }
    let parsed = explore(&parse_model(&fixture("scaffold_131.lk")?)?, CAP)?;
    let built = scaffold(1, 3, 1);
    let same = parsed.space == built.space && parsed.rates == built.rates;
    ok &= same;
    Ok((
        ok,
        format!(
            "round trips hold; parsed scaffold chain identical to builder: {same} ({} states)",
            parsed.len()
        ),
    ))
}

/// Name, time budget in seconds, and the check itself.
type Criterion = (&'static str, Option<f64>, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("state counts", Some(5.0), state_counts),
        ("polymer counts", Some(5.0), polymer_counts),
        ("structural check", Some(10.0), structural_check),
        ("aggregated-matrix validity", None, aggregate_validity),
        ("lumpability and invertibility", Some(30.0), lumpability_invertibility),
        ("commutation with uniformization", None, commutation),
        ("power identity", None, power_identity),
        ("stationarity", None, stationarity),
        ("convergence", Some(10.0), convergence),
        ("class sizes", None, class_sizes),
        ("nested aggregation", None, nested_aggregation),
        ("parser", None, parser),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (mut ok, mut detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = budget {
            if secs > *limit {
                ok = false;
                detail.push_str(&format!("; exceeded {limit} s budget"));
            }
        }
        failures += !ok as usize;
        println!(
            "{} {:>2} {name}: {detail} [{secs:.2} s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

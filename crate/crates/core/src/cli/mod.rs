//! The `ergocap` command line: argument parsing, command dispatch and
//! reports.

pub mod input;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::birkhoff::{
    asymptotic_independence_choquet, asymptotic_independence_core, birkhoff_average, birkhoff_limit,
    choquet_independence_trace, component_means, correlation_trace, verify_multivalue_lln,
};
use crate::capacity::UpperProb;
use crate::error::Error;
use crate::fec::{
    decompose_invariant, ergodic_core_measures, extreme_points_check, fec_decompose, full_decomposition,
    is_fz_ergodic, unique_vertex_decomposition, zero_one_condition, zero_one_witness, FecResult,
};
use crate::function::FunctionOnSpace;
use crate::koopman::{eigenspace_dimension, eigenvalue_one_multiplicity, invariant_function_basis, koopman_matrix};
use crate::measure::Prob;
use crate::noninvariant::{
    check_construction, invariant_value_set, irreducible_partition, noninvariant_independence, noninvariant_lln,
    NoninvariantSystem,
};
use crate::oracle::oracle_window_sup;
use crate::random::InstanceGenerator;
use crate::rational::display_rational;
use crate::space::{subsets, SubsetMask, Transformation};
use input::{load_function, load_probability, load_system, InputError, SystemDescription};
use report::{rational, rationals, set, tuple, Report, Table};

/// Largest space on which pair sweeps are exhaustive; beyond it a seeded
/// sample of pairs is used.
const EXHAUSTIVE_PAIRS_MAX_POINTS: usize = 6;
const SAMPLED_PAIRS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Invariance, zero-one condition, ergodicity, components, Koopman multiplicity.
    Analyze,
    /// The equivalent characterizations of finite ergodic components.
    CheckFec,
    /// Decompose an invariant core probability over the ergodic core measures.
    Decompose,
    /// Koopman matrix and the multiplicity of eigenvalue one.
    Koopman,
    /// Birkhoff limit of a function and the multi-valued law of large numbers.
    Birkhoff,
    /// Asymptotic independence over all pairs of sets.
    Independence,
    /// Construction from a non-invariant probability and an invertible map.
    Noninvariant,
    /// Cross-check main computations against brute-force oracles.
    OracleVerify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Analyze => "analyze",
            Self::CheckFec => "check-fec",
            Self::Decompose => "decompose",
            Self::Koopman => "koopman",
            Self::Birkhoff => "birkhoff",
            Self::Independence => "independence",
            Self::Noninvariant => "noninvariant",
            Self::OracleVerify => "oracle-verify",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "ergocap", version, about = "Finite ergodic components of upper probabilities on finite spaces")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// System file (JSON). Optional for `oracle-verify`.
    pub file: Option<PathBuf>,
    /// Probability file: `[...]` or `{"probability": [...]}`.
    #[arg(long)]
    pub probability: Option<PathBuf>,
    /// Function file: `[...]` or `{"function": [...]}`.
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Seed for random functions, sampled pairs and sweeps.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Print only the JSON block.
    #[arg(long)]
    pub json_only: bool,
    /// Length of convergence traces; defaults to four periods.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Number of random systems for `oracle-verify` without a file.
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
}

/// Input problems: exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
}

/// Text for stdout and stderr and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses arguments and runs the command.
pub fn main_with<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(args) => args,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { stdout: text, stderr: String::new(), code: 0 }
                }
                _ => Outcome { stdout: String::new(), stderr: text, code: 1 },
            };
        }
    };
    match run(&args) {
        Ok(report) => Outcome { stdout: report.render(args.json_only), stderr: String::new(), code: report.status.code() },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 1 },
    }
}

pub fn run(args: &Args) -> Result<Report, CliError> {
    if args.command == Command::OracleVerify {
        return oracle_verify(args);
    }
    let path = args.file.as_deref().ok_or_else(|| CliError::Usage("a system file is required".into()))?;
    let system = load_system(path)?;
    let map = system.transformation();
    let mut report = Report::new(args.command.name());
    describe_map(&mut report, &map);
    match args.command {
        Command::Analyze => analyze(&mut report, &map, &capacity(&system, path)?),
        Command::CheckFec => check_fec(&mut report, &map, &capacity(&system, path)?),
        Command::Decompose => {
            let p = probability(args, &system)?;
            decompose(&mut report, &map, &capacity(&system, path)?, &p);
        }
        Command::Koopman => koopman(&mut report, &map, &capacity(&system, path)?),
        Command::Birkhoff => {
            let f = function(args, map.size())?;
            birkhoff(&mut report, &map, &capacity(&system, path)?, &f, args.nmax.unwrap_or(4 * map.period()));
        }
        Command::Independence => {
            let p = match (&args.probability, &system.probability) {
                (None, None) => None,
                _ => Some(probability(args, &system)?),
            };
            let v = capacity(&system, path)?;
            independence(&mut report, &map, &v, p.as_ref(), args.seed, args.nmax.unwrap_or(4 * map.period()));
        }
        Command::Noninvariant => {
            let p = probability(args, &system)?;
            let f = function(args, map.size())?;
            noninvariant(&mut report, &map, &p, &f, args.seed, args.nmax.unwrap_or(4 * map.period()));
        }
        Command::OracleVerify => unreachable!(),
    }
    Ok(report)
}

fn capacity(system: &SystemDescription, path: &Path) -> Result<UpperProb, CliError> {
    system.capacity().ok_or_else(|| {
        CliError::Input(InputError { path: path.into(), message: "field `generators`: at least one is required".into() })
    })
}

fn probability(args: &Args, system: &SystemDescription) -> Result<Prob, CliError> {
    match (&args.probability, system.probability()) {
        (Some(path), _) => Ok(load_probability(path, system.omega_size)?),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(CliError::Usage("a probability is required: pass --probability or set `probability`".into())),
    }
}

/// The function from `--function`, or a seeded random one.
fn function(args: &Args, width: usize) -> Result<FunctionOnSpace, CliError> {
    match &args.function {
        Some(path) => Ok(load_function(path, width)?),
        None => Ok(InstanceGenerator::new(args.seed).function(width)),
    }
}

fn sets(masks: &[SubsetMask]) -> Value {
    Value::Array(masks.iter().map(|&m| set(m)).collect())
}

fn probs(ps: &[Prob]) -> Value {
    Value::Array(ps.iter().map(report::prob).collect())
}

fn describe_map(report: &mut Report, map: &Transformation) {
    let cycles: Vec<Value> = map.cycles().iter().map(|c| json!(c.points)).collect();
    report.insert(
        "system",
        json!({
            "omega_size": map.size(),
            "map": map.table(),
            "invertible": map.is_invertible(),
            "components": sets(map.components().cells()),
            "cycles": cycles,
            "period": map.period(),
        }),
    );
    let mut table = Table::properties("System");
    table
        .entry("points", map.size())
        .entry("map", format!("{:?}", map.table()))
        .entry("invertible", map.is_invertible())
        .entry("components", map.components().len())
        .entry("period", map.period());
    report.table(table);
}

/// Records whether `v` is invariant; later steps require it.
fn require_invariant(report: &mut Report, map: &Transformation, v: &UpperProb) -> bool {
    let invariant = v.is_invariant_capacity(map);
    report.insert("invariant", invariant);
    if !invariant {
        report.fail(Error::NotInvariantCapacity);
    }
    invariant
}

fn fec_table(fec: &FecResult) -> Table {
    let mut table = Table::new("Ergodic components", &["cell", "points", "Q"]);
    for (i, (cell, q)) in fec.cells().iter().zip(fec.ergodic_measures()).enumerate() {
        table.row(vec![(i + 1).to_string(), cell.to_string(), tuple(q.mass())]);
    }
    table
}

fn fec_json(fec: &FecResult) -> Value {
    json!({
        "n": fec.len(),
        "cells": sets(fec.cells()),
        "ergodic_measures": probs(fec.ergodic_measures()),
    })
}

fn analyze(report: &mut Report, map: &Transformation, v: &UpperProb) {
    report.insert("generators", probs(v.generators()));
    if !require_invariant(report, map, v) {
        return;
    }
    let zero_one = zero_one_condition(v, map).unwrap_or(false);
    let fz = is_fz_ergodic(v, map).unwrap_or(false);
    let multiplicity = eigenvalue_one_multiplicity(v, map).unwrap_or(0);
    let ergodic = ergodic_core_measures(v, map);
    report.insert("null_support", set(v.null_support()));
    report.insert("zero_one", zero_one);
    report.insert("fz_ergodic", fz);
    report.insert("koopman_multiplicity", multiplicity);
    report.insert("ergodic_core_measures", probs(&ergodic));

    let mut table = Table::properties("Analysis");
    table
        .entry("invariant", true)
        .entry("null support", v.null_support())
        .entry("zero-one condition", zero_one)
        .entry("FZ-ergodic", fz)
        .entry("Koopman multiplicity", multiplicity)
        .entry("ergodic core measures", ergodic.len());
    match fec_decompose(v, map) {
        Ok(fec) => {
            report.insert("fec", fec_json(&fec));
            table.entry("FEC cells", fec.len());
            report.table(table);
            report.table(fec_table(&fec));
        }
        Err(e) => {
            report.insert("fec", Value::Null);
            table.entry("FEC cells", "none");
            report.table(table);
            report.fail(e);
        }
    }
}

fn check_fec(report: &mut Report, map: &Transformation, v: &UpperProb) {
    if !require_invariant(report, map, v) {
        return;
    }
    let zero_one = zero_one_condition(v, map).unwrap_or(false);
    let fec = fec_decompose(v, map);
    let unique = unique_vertex_decomposition(v, map);
    let extreme = extreme_points_check(v, map);
    let witness = zero_one_witness(v, map);
    report.insert(
        "characterizations",
        json!({
            "zero_one": zero_one,
            "components_ergodic": fec.is_ok(),
            "unique_vertex_decomposition": unique,
            "extreme_points": extreme,
            "agree": zero_one == fec.is_ok() && unique == zero_one && extreme == zero_one,
        }),
    );
    report.insert("witness", witness.map_or(Value::Null, set));
    let mut table = Table::new("Characterizations", &["check", "holds"]);
    table
        .row(vec!["zero-one condition".into(), zero_one.to_string()])
        .row(vec!["ergodic components".into(), fec.is_ok().to_string()])
        .row(vec!["unique vertex decomposition".into(), unique.to_string()])
        .row(vec!["extreme points are ergodic".into(), extreme.to_string()]);
    report.table(table);
    match fec {
        Ok(fec) => {
            report.insert("fec", fec_json(&fec));
            report.table(fec_table(&fec));
        }
        Err(e) => {
            report.insert("fec", Value::Null);
            report.fail(e);
        }
    }
}

fn decompose(report: &mut Report, map: &Transformation, v: &UpperProb, p: &Prob) {
    report.insert("probability", report::prob(p));
    if !require_invariant(report, map, v) {
        return;
    }
    let mut table = Table::new("Decomposition", &["part", "weight", "measure"]);
    if map.is_invertible() {
        match full_decomposition(v, map, p) {
            Ok(d) => {
                report.insert(
                    "decomposition",
                    json!({
                        "ergodic_measures": probs(&d.ergodic_measures),
                        "coefficients": rationals(&d.coefficients),
                        "residual_weight": rational(&d.residual_weight),
                        "residual": d.residual.as_ref().map_or(Value::Null, report::prob),
                        "residual_in_core": d.residual_in_core,
                    }),
                );
                for (i, (q, a)) in d.ergodic_measures.iter().zip(&d.coefficients).enumerate() {
                    table.row(vec![format!("Q{}", i + 1), display_rational(a), tuple(q.mass())]);
                }
                let residual = d.residual.as_ref().map_or("none".to_string(), |r| tuple(r.mass()));
                table.row(vec!["residual".into(), display_rational(&d.residual_weight), residual]);
                report.table(table);
            }
            Err(e) => report.fail(e),
        }
        return;
    }
    let result = fec_decompose(v, map).and_then(|fec| {
        if !v.core_contains(p) {
            return Err(Error::NotInCore);
        }
        decompose_invariant(v, map, &fec, p).map(|d| (fec, d))
    });
    match result {
        Ok((fec, d)) => {
            report.insert(
                "decomposition",
                json!({
                    "ergodic_measures": probs(fec.ergodic_measures()),
                    "coefficients": rationals(&d.coefficients),
                    "residual_weight": "0/1",
                    "residual": Value::Null,
                    "residual_in_core": true,
                }),
            );
            for (i, (q, a)) in fec.ergodic_measures().iter().zip(&d.coefficients).enumerate() {
                table.row(vec![format!("Q{}", i + 1), display_rational(a), tuple(q.mass())]);
            }
            report.table(table);
        }
        Err(e) => report.fail(e),
    }
}

fn koopman(report: &mut Report, map: &Transformation, v: &UpperProb) {
    let matrix = koopman_matrix(map);
    report.insert("matrix", json!(matrix.rows()));
    let mut rows = Table::new("Koopman matrix", &["row", "entries"]);
    for (i, row) in matrix.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
        rows.row(vec![i.to_string(), cells.join(" ")]);
    }
    if !require_invariant(report, map, v) {
        report.table(rows);
        return;
    }
    let multiplicity = eigenvalue_one_multiplicity(v, map).unwrap_or(0);
    let dimension = eigenspace_dimension(v, map).unwrap_or(0);
    let basis = invariant_function_basis(v, map).unwrap_or_default();
    report.insert("null_support", set(v.null_support()));
    report.insert("multiplicity", multiplicity);
    report.insert("eigenspace_dimension", dimension);
    report.insert("eigenfunction_basis", Value::Array(basis.iter().map(report::function).collect()));
    let fec = fec_decompose(v, map).ok();
    report.insert("fec_cells", fec.as_ref().map_or(Value::Null, |f| Value::from(f.len())));
    let mut table = Table::properties("Eigenvalue one");
    table
        .entry("multiplicity", multiplicity)
        .entry("kernel dimension of U - I", dimension)
        .entry("FEC cells", fec.as_ref().map_or("none".to_string(), |f| f.len().to_string()));
    report.table(table);
    report.table(rows);
    if multiplicity != dimension {
        report.fail("multiplicity and kernel dimension differ");
    }
}

fn birkhoff(report: &mut Report, map: &Transformation, v: &UpperProb, f: &FunctionOnSpace, nmax: usize) {
    let limit = birkhoff_limit(map, f);
    let trace: Vec<Value> = (1..=nmax).map(|n| report::function(&birkhoff_average(map, f, n))).collect();
    report.insert("function", report::function(f));
    report.insert("limit", report::function(&limit));
    report.insert("trace", Value::Array(trace));
    let mut table = Table::new("Birkhoff limit", &["point", "f", "limit", "component mean"]);
    if !require_invariant(report, map, v) {
        return;
    }
    match fec_decompose(v, map) {
        Ok(fec) => {
            let means = component_means(&fec, f);
            let lln = verify_multivalue_lln(v, map, &fec, f);
            report.insert("component_means", report::function(&means));
            report.insert("null_support", set(v.null_support()));
            report.insert("lln_holds", lln);
            for p in 0..map.size() {
                table.row(vec![
                    p.to_string(),
                    display_rational(f.get(p)),
                    display_rational(limit.get(p)),
                    display_rational(means.get(p)),
                ]);
            }
            report.table(table);
            if !lln {
                report.fail("the Birkhoff limit differs from the component means on the null support");
            }
        }
        Err(e) => report.fail(e),
    }
}

/// All pairs on small spaces, a seeded sample otherwise.
fn pairs(width: usize, seed: u64) -> Vec<(SubsetMask, SubsetMask)> {
    if width <= EXHAUSTIVE_PAIRS_MAX_POINTS {
        subsets(width).flat_map(|b| subsets(width).map(move |c| (b, c))).collect()
    } else {
        let mut gen = InstanceGenerator::new(seed);
        (0..SAMPLED_PAIRS).map(|_| (gen.subset(width), gen.subset(width))).collect()
    }
}

fn independence(report: &mut Report, map: &Transformation, v: &UpperProb, p: Option<&Prob>, seed: u64, nmax: usize) {
    if !require_invariant(report, map, v) {
        return;
    }
    let fec = match fec_decompose(v, map) {
        Ok(fec) => fec,
        Err(e) => return report.fail(e),
    };
    let pairs = pairs(map.size(), seed);
    let mut rows = Vec::new();
    let (mut equal, mut order_sensitive) = (0, 0);
    for &(b, c) in &pairs {
        let check = asymptotic_independence_choquet(v, map, &fec, b, c);
        equal += usize::from(check.equal);
        order_sensitive += usize::from(check.order_sensitive);
        rows.push(json!({"b": set(b), "c": set(c), "lhs": rational(&check.lhs), "rhs": rational(&check.rhs)}));
    }
    report.insert("exhaustive", map.size() <= EXHAUSTIVE_PAIRS_MAX_POINTS);
    report.insert("choquet", json!({"pairs": pairs.len(), "equal": equal, "order_sensitive": order_sensitive, "values": rows}));

    let cores: Vec<Prob> = match p {
        Some(p) => vec![p.clone()],
        None => v.core_vertices().to_vec(),
    };
    let (mut core_checks, mut core_equal) = (0, 0);
    for q in &cores {
        for &(b, c) in &pairs {
            match asymptotic_independence_core(v, map, &fec, q, b, c) {
                Ok(check) => {
                    core_checks += 1;
                    core_equal += usize::from(check.equal);
                }
                Err(e) => return report.fail(e),
            }
        }
    }
    report.insert("core", json!({"probabilities": probs(&cores), "checks": core_checks, "equal": core_equal}));

    let traces: Vec<Value> = v
        .null_support()
        .points()
        .map(|x| {
            let single = SubsetMask::singleton(map.size(), x);
            json!({"b": [x], "c": [x], "choquet": rationals(&choquet_independence_trace(v, map, single, single, nmax))})
        })
        .collect();
    report.insert("traces", Value::Array(traces));

    let mut table = Table::new("Asymptotic independence", &["form", "checks", "equal", "order sensitive"]);
    table
        .row(vec!["Choquet".into(), pairs.len().to_string(), equal.to_string(), order_sensitive.to_string()])
        .row(vec!["core".into(), core_checks.to_string(), core_equal.to_string(), "-".into()]);
    report.table(table);
    if equal != pairs.len() || core_equal != core_checks {
        report.fail("asymptotic independence fails for some pair");
    }
}

fn noninvariant(report: &mut Report, map: &Transformation, p: &Prob, f: &FunctionOnSpace, seed: u64, nmax: usize) {
    report.insert("probability", report::prob(p));
    let system = match NoninvariantSystem::new(p.clone(), map.clone()) {
        Ok(system) => system,
        Err(e) => return report.fail(e),
    };
    let partition = match irreducible_partition(&system) {
        Ok(partition) => partition,
        Err(e) => return report.fail(e),
    };
    let construction = check_construction(map, &partition, &partition.capacity);
    let lln = noninvariant_lln(&system, &partition, f)
        && (0..map.size()).all(|x| noninvariant_lln(&system, &partition, &FunctionOnSpace::indicator(SubsetMask::singleton(map.size(), x))));
    let pairs = pairs(map.size(), seed);
    let independent = pairs.iter().filter(|&&(b, c)| noninvariant_independence(&system, &partition, b, c).equal).count();
    let bound = 4 * map.period();
    let window_sets: Vec<SubsetMask> = if map.size() <= EXHAUSTIVE_PAIRS_MAX_POINTS {
        subsets(map.size()).collect()
    } else {
        let mut gen = InstanceGenerator::new(seed);
        (0..SAMPLED_PAIRS).map(|_| gen.subset(map.size())).collect()
    };
    let windows = window_sets.iter().all(|&a| {
        partition.conditionals.iter().zip(&partition.capacities).all(|(pj, vj)| *vj.value(a) == oracle_window_sup(pj, map, a, bound))
    });
    let traces: Vec<Value> = (0..map.size())
        .map(|x| {
            let single = SubsetMask::singleton(map.size(), x);
            json!({"b": [x], "c": [x], "correlation": rationals(&correlation_trace(p, map, single, single, nmax))})
        })
        .collect();

    let capacities: Vec<Value> = partition
        .capacities
        .iter()
        .map(|vj| Value::Array(vj.generators().iter().map(report::prob).collect()))
        .collect();
    report.insert("invariant_values", rationals(&invariant_value_set(p, map)));
    report.insert(
        "partition",
        json!({
            "cells": sets(partition.cells.cells()),
            "conditionals": probs(&partition.conditionals),
            "limits": probs(&partition.limits),
            "component_generators": capacities,
        }),
    );
    report.insert(
        "checks",
        json!({
            "limits_ergodic": construction.limits_ergodic,
            "components_ergodic": construction.components_ergodic,
            "finite_ergodic_components": construction.finite_ergodic_components,
            "zero_one": construction.zero_one,
            "lln": lln,
            "independence_pairs": pairs.len(),
            "independence_equal": independent,
            "window_reduction": windows,
        }),
    );
    report.insert("function", report::function(f));
    report.insert("traces", Value::Array(traces));

    let mut cells = Table::new("Irreducible cells", &["cell", "points", "P(cell)", "Q"]);
    for (i, (cell, q)) in partition.cells.cells().iter().zip(&partition.limits).enumerate() {
        cells.row(vec![(i + 1).to_string(), cell.to_string(), display_rational(&p.measure(*cell)), tuple(q.mass())]);
    }
    report.table(cells);
    let mut table = Table::properties("Checks");
    table
        .entry("limits ergodic", construction.limits_ergodic)
        .entry("components FZ-ergodic", construction.components_ergodic)
        .entry("finite ergodic components", construction.finite_ergodic_components)
        .entry("zero-one condition", construction.zero_one)
        .entry("law of large numbers", lln)
        .entry("independence", format!("{independent}/{}", pairs.len()))
        .entry("window reduction", windows);
    report.table(table);
    if !(construction.all_pass() && lln && independent == pairs.len() && windows) {
        report.fail("the non-invariant construction fails a check");
    }
}

fn oracle_verify(args: &Args) -> Result<Report, CliError> {
    let mut report = Report::new(Command::OracleVerify.name());
    report.insert("seed", args.seed);
    let tally = match &args.file {
        Some(path) => {
            let system = load_system(path)?;
            let map = system.transformation();
            let mut gen = InstanceGenerator::new(args.seed);
            let mut tally = verify::Tally::default();
            if let Some(v) = system.capacity() {
                if !require_invariant(&mut report, &map, &v) {
                    return Ok(report);
                }
                verify::verify_system(&map, &v, &mut gen, &mut tally);
            }
            if let (Some(p), true) = (system.probability(), map.is_invertible()) {
                verify::verify_noninvariant(&p, &map, &mut gen, &mut tally);
            }
            tally
        }
        None => {
            report.insert("instances", args.instances);
            verify::verify_sweep(args.seed, args.instances)
        }
    };
    let mut checks = serde_json::Map::new();
    let mut table = Table::new("Oracle agreement", &["check", "passed", "total"]);
    for (name, (passed, total)) in tally.counts() {
        checks.insert((*name).into(), json!({"passed": passed, "total": total}));
        table.row(vec![(*name).into(), passed.to_string(), total.to_string()]);
    }
    report.insert("checks", Value::Object(checks));
    report.insert("all_pass", tally.all_pass());
    report.table(table);
    for (name, context) in &tally.first_failure {
        report.fail(format!("{name}: {context}"));
    }
    Ok(report)
}

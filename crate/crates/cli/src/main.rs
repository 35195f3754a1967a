//! Command-line front end: parse maps and ideals, run the analyses, and
//! emit deterministic JSON reports (stdout or file) and DOT graphs.
//! Human-readable summaries go to stderr; exit code 0 on success, 2 when a
//! computation hits a ground-field or budget limitation, 1 on usage errors.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use valdyn_core::blowup::{
    dual_graph, export_dot, log_resolution, seq_from_json, seq_to_json, DualGraph, Mode,
    DEFAULT_STEP_CAP,
};
use valdyn_core::dynamics::{
    analyze_infinity, analyze_local, sequences, sequences_parallel, EigenData, InfinityCase,
    InfinityReport, LocalCase, LocalReport, MapGerm,
};
use valdyn_core::error::Error;
use valdyn_core::numbers::{ext_to_json, scalar_to_json, Scalar};
use valdyn_core::poly::{parse_ideal, parse_map, parse_poly};
use valdyn_core::potential::{
    laplacian_log_ideal, measure_to_json, poisson_solve, treefn_to_json,
};

#[derive(Parser)]
#[command(
    name = "valdyn",
    about = "Exact asymptotic invariants of plane polynomial maps",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local attraction-rate analysis at the origin.
    Local(AnalyzeArgs),
    /// Dynamical-degree analysis at infinity.
    Infinity(AnalyzeArgs),
    /// Log resolution of an ideal.
    Resolve(ResolveArgs),
    /// Replay a serialized blowup sequence and export its dual graph.
    Graph(GraphArgs),
    /// Measure and potential of an ideal.
    Potential(PotentialArgs),
    /// Exact iterate invariants c(f^n) or deg f^n.
    Sequence(SequenceArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// The map, written "f1; f2" in variables z1, z2.
    #[arg(long)]
    map: String,
    /// Iterate budget for the cross-check sequence.
    #[arg(long)]
    steps: Option<usize>,
    /// Cap on iterate degrees (overridden by VALDYN_DEGREE_CAP).
    #[arg(long)]
    degree_cap: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ResolveArgs {
    /// Comma-separated ideal generators.
    #[arg(long)]
    ideal: String,
    /// local or infinity.
    #[arg(long, default_value = "local")]
    mode: String,
    /// Comma-separated extra curves to mark and resolve alongside.
    #[arg(long)]
    marked_curves: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct GraphArgs {
    /// Path to a JSON-serialized blowup sequence to replay.
    #[arg(long)]
    replay: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PotentialArgs {
    /// Comma-separated ideal generators.
    #[arg(long)]
    ideal: String,
    /// local or infinity.
    #[arg(long, default_value = "local")]
    mode: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SequenceArgs {
    /// The map, written "f1; f2".
    #[arg(long)]
    map: String,
    /// local or infinity.
    #[arg(long, default_value = "local")]
    mode: String,
    /// Number of iterates.
    #[arg(long, default_value_t = 6)]
    steps: usize,
    /// Cap on iterate degrees (overridden by VALDYN_DEGREE_CAP).
    #[arg(long)]
    degree_cap: Option<u64>,
    /// Evaluate the per-iterate invariants on worker threads.
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<String>,
    /// Write a DOT rendering of the dual graph here.
    #[arg(long)]
    dot: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn degree_cap(flag: Option<u64>) -> u64 {
    if let Ok(s) = std::env::var("VALDYN_DEGREE_CAP") {
        if let Ok(v) = s.parse() {
            return v;
        }
    }
    flag.unwrap_or(valdyn_core::dynamics::DEFAULT_DEGREE_CAP)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Local(a) => {
            let germ = MapGerm::local(parse_map(&a.map)?)?;
            let steps = a
                .steps
                .unwrap_or(valdyn_core::dynamics::DEFAULT_LOCAL_ITERATES);
            let report = analyze_local(&germ, steps)?;
            let summary = format!(
                "c_inf = {} with c^2 = {}*c + {} ({:?}); sequence {:?}",
                report.growth.value,
                report.growth.a,
                report.growth.b,
                report.case,
                report.sequence
            );
            emit(&a.out, local_report_json(&a.map, &report), None, &summary)
        }
        Command::Infinity(a) => {
            let germ = MapGerm::infinity(parse_map(&a.map)?)?;
            let steps = a
                .steps
                .unwrap_or(valdyn_core::dynamics::DEFAULT_INFINITY_ITERATES);
            let report = analyze_infinity(&germ, steps)?;
            let summary = format!(
                "d_inf = {} with d^2 = {}*d + {} (case {:?}); degrees {:?}",
                report.growth.value,
                report.growth.a,
                report.growth.b,
                report.case,
                report.sequence
            );
            emit(&a.out, infinity_report_json(&a.map, &report), None, &summary)
        }
        Command::Resolve(a) => {
            let ideal = parse_ideal(&a.ideal)?;
            let mode = parse_mode(&a.mode)?;
            let mut extra = Vec::new();
            if let Some(list) = &a.marked_curves {
                for part in list.split(',') {
                    extra.push(valdyn_core::blowup::MarkedCurve {
                        poly: parse_poly(part)?,
                        multiplicity: 1,
                        certified_irreducible: false,
                    });
                }
            }
            let res = log_resolution(&ideal, mode, &extra, DEFAULT_STEP_CAP)?;
            let graph = dual_graph(&res.seq)?;
            let report = resolve_json(&res, &graph);
            let dot = export_dot(&graph);
            let summary = format!(
                "{} primes; orders {:?}; {} marked curve end(s)",
                res.seq.num_primes(),
                res.vanishing_orders
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>(),
                graph.curve_ends.len()
            );
            emit(&a.out, report, Some(dot), &summary)
        }
        Command::Graph(a) => {
            let text = fs::read_to_string(&a.replay)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", a.replay)))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
            let seq = seq_from_json(&v)?;
            let graph = dual_graph(&seq)?;
            let report = json!({
                "sequence": seq_to_json(&seq),
                "graph": graph_json(&graph),
            });
            let dot = export_dot(&graph);
            let summary = format!(
                "replayed {} steps into {} primes",
                seq.steps.len(),
                seq.num_primes()
            );
            emit(&a.out, report, Some(dot), &summary)
        }
        Command::Potential(a) => {
            let ideal = parse_ideal(&a.ideal)?;
            let mode = parse_mode(&a.mode)?;
            let im = laplacian_log_ideal(&ideal, mode)?;
            let potential = poisson_solve(&im.graph, &im.measure)?;
            let report = json!({
                "mode": mode_name(mode),
                "vanishing_orders": im
                    .vanishing_orders
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>(),
                "measure": measure_to_json(&im.graph, &im.measure),
                "total_mass": scalar_to_json(&im.measure.total_mass()),
                "potential": treefn_to_json(&potential),
                "graph": graph_json(&im.graph),
            });
            let dot = export_dot(&im.graph);
            let summary = format!(
                "measure with {} atom(s), total mass {}",
                im.measure.atoms.len(),
                im.measure.total_mass()
            );
            emit(&a.out, report, Some(dot), &summary)
        }
        Command::Sequence(a) => {
            let mode = parse_mode(&a.mode)?;
            let germ = match mode {
                Mode::Local => MapGerm::local(parse_map(&a.map)?)?,
                Mode::Infinity => MapGerm::infinity(parse_map(&a.map)?)?,
            };
            let cap = degree_cap(a.degree_cap);
            let (seq, partial) = if a.parallel {
                sequences_parallel(&germ, a.steps, cap)
            } else {
                sequences(&germ, a.steps, cap)
            };
            let report = json!({
                "mode": mode_name(mode),
                "map": a.map,
                "sequence": seq.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "partial": partial,
            });
            let summary = format!("{:?}{}", seq, if partial { " (truncated)" } else { "" });
            emit(&a.out, report, None, &summary)
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, Error> {
    match s {
        "local" => Ok(Mode::Local),
        "infinity" => Ok(Mode::Infinity),
        other => Err(Error::Parse(format!(
            "mode must be local or infinity, got {other}"
        ))),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Local => "local",
        Mode::Infinity => "infinity",
    }
}

fn emit(out: &OutArgs, report: Value, dot: Option<String>, summary: &str) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Parse(format!("serialization: {e}")))?;
    match &out.json {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?,
        None => println!("{text}"),
    }
    if let Some(dot_text) = dot {
        if let Some(path) = &out.dot {
            fs::write(path, dot_text)
                .map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?;
        }
    } else if out.dot.is_some() {
        return Err(Error::Parse("this subcommand produces no graph".into()));
    }
    eprintln!("{summary}");
    Ok(())
}

fn scalar_with_approx(s: &Scalar) -> Value {
    let mut v = scalar_to_json(s);
    if let Value::Object(map) = &mut v {
        map.insert("approx".into(), json!(format!("{:.12}", s.to_f64())));
    }
    v
}

fn eigen_json(e: &EigenData) -> Value {
    json!({
        "kind": e.kind,
        "z1": ext_to_json(&e.z1_value),
        "z2": ext_to_json(&e.z2_value),
        "curve": e.curve.as_ref().map(|c| c.to_string()),
    })
}

fn lattice_json(m: &Option<[[num_bigint::BigInt; 2]; 2]>) -> Value {
    match m {
        None => Value::Null,
        Some(rows) => json!(rows
            .iter()
            .map(|r| vec![r[0].to_string(), r[1].to_string()])
            .collect::<Vec<_>>()),
    }
}

fn local_report_json(map: &str, r: &LocalReport) -> Value {
    json!({
        "mode": "local",
        "map": map,
        "sequence": r.sequence.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "sequence_partial": r.sequence_partial,
        "growth": {
            "a": r.growth.a.to_string(),
            "b": r.growth.b.to_string(),
            "value": scalar_with_approx(&r.growth.value),
        },
        "case": match r.case {
            LocalCase::FixedQuasimonomial => "fixed-quasimonomial",
            LocalCase::InvariantOpenSet => "invariant-open-set",
            LocalCase::CurveEnd => "curve-end",
        },
        "eigenvaluation": eigen_json(&r.eigen),
        "bounds": {
            "delta": scalar_with_approx(&r.delta),
            "verified_on_prefix": r.bounds_verified,
        },
        "certificates": {
            "lattice_matrix": lattice_json(&r.lattice),
            "checked_polynomials": r.checked_random_polynomials,
        },
        "limitations": {
            "uncertified_factors": r.factor_limitation,
        },
    })
}

fn infinity_report_json(map: &str, r: &InfinityReport) -> Value {
    json!({
        "mode": "infinity",
        "map": map,
        "sequence": r.sequence.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "sequence_partial": r.sequence_partial,
        "growth": {
            "a": r.growth.a.to_string(),
            "b": r.growth.b.to_string(),
            "value": scalar_with_approx(&r.growth.value),
        },
        "case": match r.case {
            InfinityCase::A => "a",
            InfinityCase::B => "b",
        },
        "eigenvaluation": eigen_json(&r.eigen),
        "bounds": {
            "C": r.c_upper.as_ref().map(scalar_with_approx),
            "verified_on_prefix": r.bounds_verified,
            "growth_model": match r.case {
                InfinityCase::A => "d^n",
                InfinityCase::B => "n*d^n",
            },
            "model_consistent": r.model_consistent,
        },
        "certificates": {
            "lattice_matrix": lattice_json(&r.lattice),
            "checked_polynomials": r.checked_random_polynomials,
        },
    })
}

fn resolve_json(res: &valdyn_core::blowup::LogResolution, graph: &DualGraph) -> Value {
    json!({
        "sequence": seq_to_json(&res.seq),
        "vanishing_orders": res
            .vanishing_orders
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>(),
        "fixed_curves": res.fixed_curves.iter().map(|c| json!({
            "poly": c.poly.to_string(),
            "multiplicity": c.multiplicity,
            "irreducible_certified": c.certified_irreducible,
        })).collect::<Vec<_>>(),
        "graph": graph_json(&graph),
    })
}

fn graph_json(graph: &DualGraph) -> Value {
    json!({
        "vertices": graph.vertices.iter().map(|v| json!({
            "prime": v.prime,
            "b": v.b.to_string(),
            "A": v.a_log.to_string(),
            "alpha": v.alpha.to_string(),
        })).collect::<Vec<_>>(),
        "edges": graph.edges.iter().map(|e| json!({
            "between": [e.a, e.b],
            "length": e.length.to_string(),
            "multiplicity": e.multiplicity.to_string(),
        })).collect::<Vec<_>>(),
        "curve_ends": graph.curve_ends.iter().map(|c| json!({
            "curve": c.poly.to_string(),
            "attached_to": c.attach,
            "branch_multiplicity": c.branch_multiplicity.to_string(),
        })).collect::<Vec<_>>(),
    })
}

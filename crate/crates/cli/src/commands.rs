use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use hyperctrl::hypergraph::{
    adjacency_general, from_json_str, gen_complete, gen_hyperchain, gen_hyperring, gen_hyperstar,
    gen_overlap_variant, gen_random, to_json_string, GeneratorError, Hypergraph, OverlapFamily,
};
use hyperctrl::ingest::{build_hypergraph, default_threshold, read_csv, IngestError};
use hyperctrl::mcn::{
    mcn_by_components, DecomposedMcn, ExactOptions, GreedyOptions, McnError, McnMethod, McnResult,
    TieBreak,
};
use hyperctrl::simulate::{simulate, InputSchedule, SimulateError};
use hyperctrl::{verdict, ControlMatrix, Parallelism, RankOptions};
use serde_json::{json, Value};
use thiserror::Error;

use crate::args::*;
use crate::report::{digest, RunReport, Timings};

pub const TOL_ENV: &str = "HYPERCTRL_TOL";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Param(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Param(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<McnError> for CliError {
    fn from(e: McnError) -> Self {
        match e {
            McnError::TooLarge { .. } => CliError::Guard(e.to_string()),
            McnError::Controllability(_) => CliError::Param(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Threshold(_) | IngestError::Order { .. } | IngestError::TooManyTuples { .. } => {
                CliError::Param(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_hypergraph(path: &Path) -> Result<Hypergraph, CliError> {
    let text = read_text(path)?;
    from_json_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Flag first, then the environment, then the built-in rule.
pub fn resolve_tol(flag: Option<f64>) -> Result<Option<f64>, CliError> {
    let tol = match flag {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Param(format!("{TOL_ENV}={s:?} is not a number")))?,
            ),
            _ => None,
        },
    };
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Param(format!("tolerance must be non-negative and finite, got {t}")));
        }
    }
    Ok(tol)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Param(format!("{what}: cannot parse {t:?}")))
        })
        .collect()
}

/// 1-based labels to validated 0-based control nodes.
fn parse_controls(s: &str, n: usize) -> Result<ControlMatrix, CliError> {
    let labels: Vec<usize> = parse_list(s, "--controls")?;
    let nodes = labels
        .iter()
        .map(|&l| {
            if l == 0 || l > n {
                Err(CliError::Param(format!("control node {l} is outside 1..={n}")))
            } else {
                Ok(l - 1)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    ControlMatrix::new(nodes, n).map_err(|e| CliError::Param(format!("--controls: {e}")))
}

fn one_based(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|v| v + 1).collect()
}

pub fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let (n, k) = (args.n, args.k);
    let need_r = || {
        args.r
            .ok_or_else(|| CliError::Param("--r is required for the r-variant families".into()))
    };
    let g = match args.family {
        FamilyArg::Chain => gen_hyperchain(n, k)?,
        FamilyArg::Ring => gen_hyperring(n, k)?,
        FamilyArg::Star => gen_hyperstar(n, k)?,
        FamilyArg::Complete => gen_complete(n, k)?,
        FamilyArg::RChain => gen_overlap_variant(n, k, need_r()?, OverlapFamily::Chain)?,
        FamilyArg::RRing => gen_overlap_variant(n, k, need_r()?, OverlapFamily::Ring)?,
        FamilyArg::RStar => gen_overlap_variant(n, k, need_r()?, OverlapFamily::Star)?,
        FamilyArg::Random => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Param("--seed is required for the random family".into()))?;
            let density = args
                .density
                .ok_or_else(|| CliError::Param("--density is required for the random family".into()))?;
            gen_random(n, k, density, seed)?
        }
    };
    Ok(to_json_string(&g))
}

pub fn degrees(args: &FileArgs) -> Result<String, CliError> {
    let mut timings = Timings::default();
    let g = timings.time("load", || load_hypergraph(&args.file))?;
    let a = adjacency_general(&g).map_err(|e| CliError::Input(e.to_string()))?;
    let d = timings.time("degrees", || a.degrees());
    Ok(RunReport {
        command: "degrees",
        input_digest: Some(digest(&g)),
        parameters: json!({ "order": a.order() }),
        result: json!({ "degrees": d, "edges": g.edges().len(), "n": g.n() }),
        timings,
    }
    .render())
}

pub fn check(args: &CheckArgs) -> Result<String, CliError> {
    let mut timings = Timings::default();
    let g = timings.time("load", || load_hypergraph(&args.file))?;
    let tol = resolve_tol(args.tol.tol)?;
    let controls = parse_controls(&args.controls, g.n())?;
    let a = adjacency_general(&g).map_err(|e| CliError::Input(e.to_string()))?;
    let v = timings
        .time("rank", || verdict(&a, &controls, RankOptions::with_tol(tol)))
        .map_err(|e| CliError::Param(e.to_string()))?;
    Ok(RunReport {
        command: "check",
        input_digest: Some(digest(&g)),
        parameters: json!({
            "controls": one_based(controls.nodes()),
            "order": a.order(),
            "tol": tol,
        }),
        result: serde_json::to_value(&v).expect("verdict serializes"),
        timings,
    }
    .render())
}

fn result_json(r: &McnResult) -> Value {
    let mut v = json!({
        "method": r.method,
        "value": r.value,
        "witness": one_based(&r.witness),
    });
    if let Some(trace) = &r.rank_trace {
        v["rank_trace"] = trace
            .iter()
            .map(|s| json!({ "node": s.node + 1, "rank": s.rank }))
            .collect();
    }
    if let Some(all) = &r.all_witnesses {
        v["all_witnesses"] = all.iter().map(|w| json!(one_based(w))).collect();
    }
    v
}

pub fn mcn_json(d: &DecomposedMcn) -> Value {
    json!({
        "components": d.components.iter().map(|c| {
            let mut v = result_json(&c.result);
            v["nodes"] = json!(one_based(&c.nodes));
            v
        }).collect::<Vec<_>>(),
        "method": d.method,
        "value": d.value,
        "witness": one_based(&d.witness),
    })
}

fn method_for(args: &McnArgs, tol: Option<f64>) -> Result<McnMethod, CliError> {
    let rank = RankOptions::with_tol(tol);
    Ok(match args.method {
        MethodArg::Exact => McnMethod::Exact(ExactOptions {
            rank,
            max_nodes: args.max_nodes,
            enumerate_all: args.all_witnesses,
        }),
        MethodArg::Greedy => {
            let tie_break = match args.tie_break {
                TieBreakArg::Degree => TieBreak::Degree,
                TieBreakArg::Index => TieBreak::Index,
                TieBreakArg::Random => TieBreak::Random(args.seed.ok_or_else(|| {
                    CliError::Param("--seed is required with --tie-break random".into())
                })?),
            };
            McnMethod::Greedy(GreedyOptions { rank, tie_break })
        }
    })
}

pub fn mcn(args: &McnArgs) -> Result<String, CliError> {
    let mut timings = Timings::default();
    let g = timings.time("load", || load_hypergraph(&args.file))?;
    let tol = resolve_tol(args.tol.tol)?;
    let method = method_for(args, tol)?;
    let d = timings.time("solve", || mcn_by_components(&g, method))?;
    let mut parameters = json!({
        "method": match args.method { MethodArg::Exact => "exact", MethodArg::Greedy => "greedy" },
        "order": g.max_cardinality().unwrap_or(2),
        "tol": tol,
    });
    match args.method {
        MethodArg::Exact => {
            parameters["max_nodes"] = json!(args.max_nodes);
            parameters["all_witnesses"] = json!(args.all_witnesses);
        }
        MethodArg::Greedy => {
            parameters["tie_break"] = json!(format!("{:?}", args.tie_break).to_lowercase());
            parameters["seed"] = json!(args.seed);
        }
    }
    Ok(RunReport {
        command: "mcn",
        input_digest: Some(digest(&g)),
        parameters,
        result: mcn_json(&d),
        timings,
    }
    .render())
}

pub fn ingest(args: &IngestArgs, parallelism: Parallelism) -> Result<String, CliError> {
    let threshold = match args.threshold {
        Some(t) => t,
        None => default_threshold(args.order).ok_or_else(|| {
            CliError::Param(format!("--threshold is required for order {}", args.order))
        })?,
    };
    let file = fs::File::open(&args.file)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.file.display())))?;
    let x = read_csv(file, args.has_header)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.file.display())))?;
    let g = build_hypergraph(&x, args.order, threshold, parallelism)?;
    Ok(to_json_string(&g))
}

fn read_schedule(path: &Path, channels: usize) -> Result<InputSchedule, CliError> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut segments = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let vals = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Input(format!("{} line {line}: not a number", path.display())))?;
        if vals.len() != channels + 1 {
            return Err(CliError::Input(format!(
                "{} line {line}: expected time plus {channels} inputs, got {} fields",
                path.display(),
                vals.len()
            )));
        }
        segments.push((vals[0], vals[1..].to_vec()));
    }
    InputSchedule::new(channels, segments).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<String, CliError> {
    let g = load_hypergraph(&args.file)?;
    let a = adjacency_general(&g).map_err(|e| CliError::Input(e.to_string()))?;
    let controls = parse_controls(&args.controls, g.n())?;
    let x0: Vec<f64> = parse_list(&args.x0, "--x0")?;
    let inputs = match &args.input_schedule_file {
        Some(p) => read_schedule(p, controls.len())?,
        None => InputSchedule::zero(controls.len()),
    };
    let traj = simulate(&a, &controls, &x0, &inputs, args.t_end, args.dt).map_err(|e| match e {
        SimulateError::BlowUp { time, ref last_state } => CliError::Numeric(format!(
            "{e}; last finite state at t = {time}: {last_state:?}"
        )),
        _ => CliError::Param(e.to_string()),
    })?;
    let mut out = String::from("t");
    for i in 1..=g.n() {
        write!(out, ",x{i}").expect("write to string");
    }
    out.push('\n');
    for (t, x) in traj {
        write!(out, "{t}").expect("write to string");
        for v in x {
            write!(out, ",{v}").expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Param(format!("--n-range {s:?}: expected lo..hi"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn bench(args: &BenchArgs) -> Result<String, CliError> {
    let (lo, hi) = parse_range(&args.n_range)?;
    let tol = resolve_tol(args.tol.tol)?;
    let seeds: Vec<u64> = parse_list(&args.seeds, "--seeds")?;
    let mut cases: Vec<(usize, Option<u64>, Hypergraph)> = Vec::new();
    for n in lo..=hi {
        match args.family {
            BenchFamily::Complete => cases.push((n, None, gen_complete(n, args.k)?)),
            BenchFamily::Random => {
                if seeds.is_empty() {
                    return Err(CliError::Param("--seeds is required for the random family".into()));
                }
                for &s in &seeds {
                    cases.push((n, Some(s), gen_random(n, args.k, args.density, s)?));
                }
            }
        }
    }
    let rank = RankOptions::with_tol(tol);
    let exact = McnMethod::Exact(ExactOptions {
        rank,
        ..ExactOptions::default()
    });
    let greedy = McnMethod::Greedy(GreedyOptions {
        rank,
        ..GreedyOptions::default()
    });
    let mut out = String::from("n,seed,exact_ms,greedy_ms,exact_value,greedy_value,agree\n");
    for (n, seed, g) in cases {
        let t = Instant::now();
        let e = mcn_by_components(&g, exact)?;
        let exact_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let gr = mcn_by_components(&g, greedy)?;
        let greedy_ms = t.elapsed().as_secs_f64() * 1e3;
        let show = |v: Option<usize>| v.map_or("none".to_string(), |v| v.to_string());
        writeln!(
            out,
            "{n},{},{exact_ms:.3},{greedy_ms:.3},{},{},{}",
            seed.map_or(String::new(), |s| s.to_string()),
            show(e.value),
            show(gr.value),
            e.value == gr.value
        )
        .expect("write to string");
    }
    Ok(out)
}

//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for a negative domain result (invalid
//! network, exhausted search, trace that does not replay), 2 for usage,
//! IO and input-format errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdg_core::algebra::{
    build_transfer_system, reduction_stats, solvability_search, transfer_matrix, SearchOptions, SearchOutcome,
    TransferSystem, DEFAULT_MAX_FIELD, DEFAULT_MAX_INDETS,
};
use fdg_core::lpbound::{
    build_lp, lp_solve, lp_stats, presolve, LpProblem, RowTag, SolveOptions, Status, DEFAULT_SOLVER_CAP,
};
use fdg_core::{build_fdg, Fdg, Mode, Network, Rational, ReductionTrace, Weights};
use serde_json::{json, Value};

use crate::formats::{self, FormatError};
use crate::{fixtures, lpfile};

#[derive(Debug, Parser)]
#[command(name = "fdgtool", version, about = "Functional dependence graph reduction, LP bounds and linear coding")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceMode {
    None,
    Shannon,
    Linear,
}

impl ReduceMode {
    fn mode(self) -> Option<Mode> {
        match self {
            ReduceMode::None => None,
            ReduceMode::Shannon => Some(Mode::Shannon),
            ReduceMode::Linear => Some(Mode::Linear),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shannon,
    Linear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network and list every violation.
    Validate {
        /// Network JSON file, or `fixture:<name>`.
        input: String,
    },
    /// Reduce the FDG of a network to a fixpoint.
    Reduce {
        #[arg(long, value_enum, default_value_t = ModeArg::Shannon)]
        mode: ModeArg,
        /// Also write the trace as JSON lines to this file.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        input: String,
    },
    /// Build, inspect, solve or export the LP bound.
    Lp(LpArgs),
    /// Transfer matrix and field search for scalar linear coding.
    Transfer(TransferArgs),
    /// Replay a JSON-lines trace on a network's FDG and print the result.
    Replay { input: String, trace: PathBuf },
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("action").required(true).args(["stats", "solve", "export"]))]
pub struct LpArgs {
    #[arg(long, value_enum, default_value_t = ReduceMode::None)]
    pub reduce: ReduceMode,
    /// Weights by source index, e.g. `1,2`. Default: 1 for every source.
    #[arg(short = 'w', long, value_delimiter = ',')]
    pub weights: Option<Vec<String>>,
    #[arg(long)]
    pub stats: bool,
    #[arg(long)]
    pub solve: bool,
    /// Write the LP in CPLEX text format (to stdout unless `--out`).
    #[arg(long)]
    pub export: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Export the closure-presolved LP instead, one column per closed set.
    #[arg(long)]
    pub presolved: bool,
    /// Include the nonzero entries of the optimal point.
    #[arg(long)]
    pub witness: bool,
    /// Largest N solved in-process (overrides FDGTOOL_MAX_N).
    #[arg(long)]
    pub max_n: Option<usize>,
    pub input: String,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("action").required(true).args(["matrix", "search", "stats"]))]
pub struct TransferArgs {
    #[arg(long, value_enum, default_value_t = ReduceMode::Linear)]
    pub reduce: ReduceMode,
    #[arg(long)]
    pub matrix: bool,
    /// Search GF(p) for an assignment meeting the demands.
    #[arg(long, value_name = "P")]
    pub search: Option<u64>,
    /// Size comparison against the unreduced system.
    #[arg(long)]
    pub stats: bool,
    /// Fix an indeterminate, e.g. `eps_Y1_e2=1`.
    #[arg(long, value_name = "NAME=VALUE")]
    pub pin: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_INDETS)]
    pub max_indets: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_FIELD)]
    pub max_field: u64,
    pub input: String,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Fail {
    code: i32,
    msg: String,
}

fn usage(msg: impl ToString) -> Fail {
    Fail { code: 2, msg: msg.to_string() }
}

fn negative(msg: impl ToString) -> Fail {
    Fail { code: 1, msg: msg.to_string() }
}

impl From<FormatError> for Fail {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(_) => negative(e),
            _ => usage(e),
        }
    }
}

/// Process environment the tool reads.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub max_n: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env {
            max_n: std::env::var("FDGTOOL_MAX_N").ok(),
        }
    }
}

pub fn run<I, T>(args: I, env: &Env) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli, env) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.msg),
        },
    }
}

fn read_input(input: &str) -> Result<String, Fail> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return fixtures::get(name).map(String::from).ok_or_else(|| {
            let known: Vec<&str> = fixtures::ALL.iter().map(|(n, _)| *n).collect();
            usage(format!("unknown fixture `{name}` (known: {})", known.join(", ")))
        });
    }
    std::fs::read_to_string(input).map_err(|e| usage(format!("cannot read {input}: {e}")))
}

fn load_network(input: &str) -> Result<Network, Fail> {
    Ok(formats::parse_network(&read_input(input)?)?)
}

fn load_fdg(input: &str) -> Result<Fdg, Fail> {
    let net = load_network(input)?;
    build_fdg(&net).map(|b| b.fdg).map_err(usage)
}

fn reduced(fdg: Fdg, mode: ReduceMode) -> Result<Fdg, Fail> {
    match mode.mode() {
        None => Ok(fdg),
        Some(m) => fdg.reduce(m).map(|(g, _)| g).map_err(usage),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Flag combinations clap cannot express on its own.
fn check_flags(cmd: &Command) -> Result<(), Fail> {
    match cmd {
        Command::Lp(a) if a.out.is_some() && !a.export => Err(usage("--out needs --export")),
        Command::Lp(a) if a.witness && !a.solve => Err(usage("--witness needs --solve")),
        Command::Lp(a) if a.presolved && !a.export => Err(usage("--presolved needs --export")),
        Command::Transfer(a) if !a.pin.is_empty() && a.search.is_none() => Err(usage("--pin needs --search")),
        _ => Ok(()),
    }
}

fn execute(cli: &Cli, env: &Env) -> Result<(i32, String), Fail> {
    check_flags(&cli.command)?;
    match &cli.command {
        Command::Validate { input } => validate(input, cli.format),
        Command::Reduce { mode, trace_out, input } => reduce(input, *mode, trace_out.as_ref(), cli.format),
        Command::Lp(a) => lp(a, env, cli.format),
        Command::Transfer(a) => transfer(a, cli.format),
        Command::Replay { input, trace } => replay(input, trace, cli.format),
    }
}

fn validate(input: &str, format: Format) -> Result<(i32, String), Fail> {
    let net = formats::parse_network_unchecked(&read_input(input)?)?;
    let violations: Vec<String> = net.validate().iter().map(ToString::to_string).collect();
    let code = if violations.is_empty() { 0 } else { 1 };
    let out = match format {
        Format::Json => pretty(&json!({"valid": code == 0, "violations": violations})),
        Format::Text if code == 0 => "ok\n".into(),
        Format::Text => violations.iter().map(|v| format!("{v}\n")).collect(),
    };
    Ok((code, out))
}

fn trace_summary(original: &Fdg, g: &Fdg, trace: &ReductionTrace, format: Format, mode: &str) -> String {
    match format {
        Format::Json => pretty(&json!({
            "mode": mode,
            "original_order": original.order(),
            "reduced_order": g.order(),
            "delta_v": trace.delta_v,
            "delta_e": trace.delta_e,
            "steps": trace.steps.iter().enumerate().map(|(i, s)| formats::step_to_json(i + 1, s)).collect::<Vec<_>>(),
            "reduced": formats::fdg_to_json(g),
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "mode      {mode}");
            let _ = writeln!(s, "order     {} -> {}", original.order(), g.order());
            let _ = writeln!(s, "delta_v   {}", trace.delta_v);
            let _ = writeln!(s, "delta_e   {}", trace.delta_e);
            let _ = writeln!(s, "{} vars removed", trace.delta_v);
            let list = |v: &[fdg_core::Var]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            for (i, st) in trace.steps.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{:>3}. {:<5} remove {}  up [{}]  down [{}]  +{} edges",
                    i + 1,
                    st.rule.to_string(),
                    list(&st.removed),
                    list(&st.up),
                    list(&st.down),
                    st.added.len()
                );
            }
            let _ = writeln!(s, "remaining {}", list(g.vars()));
            s
        }
    }
}

fn reduce(input: &str, mode: ModeArg, trace_out: Option<&PathBuf>, format: Format) -> Result<(i32, String), Fail> {
    let fdg = load_fdg(input)?;
    let m = match mode {
        ModeArg::Shannon => Mode::Shannon,
        ModeArg::Linear => Mode::Linear,
    };
    let (g, trace) = fdg.reduce(m).map_err(usage)?;
    if let Some(path) = trace_out {
        std::fs::write(path, formats::trace_to_jsonl(&trace))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok((0, trace_summary(&fdg, &g, &trace, format, &m.to_string())))
}

fn replay(input: &str, trace: &PathBuf, format: Format) -> Result<(i32, String), Fail> {
    let fdg = load_fdg(input)?;
    let text = std::fs::read_to_string(trace).map_err(|e| usage(format!("cannot read {}: {e}", trace.display())))?;
    let steps = formats::parse_trace(&text)?;
    let t = ReductionTrace::from_steps(steps, &fdg).map_err(negative)?;
    let g = t.replay(&fdg).map_err(negative)?;
    Ok((0, trace_summary(&fdg, &g, &t, format, "replay")))
}

fn weights(given: Option<&Vec<String>>, fdg: &Fdg) -> Result<Weights, Fail> {
    let sources: Vec<u32> = fdg.source_positions().iter().filter_map(|&i| match fdg.var(i) {
        fdg_core::Var::Source(s) => Some(*s),
        _ => None,
    }).collect();
    let Some(given) = given else {
        return Ok(Weights::uniform(&sources));
    };
    if given.len() != sources.len() {
        return Err(usage(format!("{} weights given for {} sources", given.len(), sources.len())));
    }
    let values = given
        .iter()
        .map(|w| w.trim().parse::<Rational>().map_err(|e| usage(format!("weight `{w}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Weights::positional(values).map_err(usage)
}

fn solver_cap(flag: Option<usize>, env: &Env) -> Result<usize, Fail> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match &env.max_n {
        None => Ok(DEFAULT_SOLVER_CAP),
        Some(v) => v.trim().parse().map_err(|_| usage(format!("FDGTOOL_MAX_N=`{v}` is not a number"))),
    }
}

fn tag_counts(p: &LpProblem) -> Value {
    let st = lp_stats(p);
    let rows: BTreeMap<String, usize> = RowTag::ALL.iter().map(|t| (t.to_string(), st.count(*t))).collect();
    json!({
        "n_vars": st.n_vars,
        "dimension": st.dimension,
        "rows": rows,
        "total": st.total,
        "closed_form_total": st.closed_form_total(),
    })
}

fn lp(a: &LpArgs, env: &Env, format: Format) -> Result<(i32, String), Fail> {
    let fdg = reduced(load_fdg(&a.input)?, a.reduce)?;
    let w = weights(a.weights.as_ref(), &fdg)?;
    let p = build_lp(&fdg, &w).map_err(usage)?;
    if a.export {
        let text = if a.presolved {
            lpfile::export_presolved(&presolve(&p, true))
        } else {
            lpfile::export_lp(&p)
        };
        return match &a.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                Ok((0, String::new()))
            }
            None => Ok((0, text)),
        };
    }
    if a.stats {
        let st = lp_stats(&p);
        return Ok((0, match format {
            Format::Json => pretty(&tag_counts(&p)),
            Format::Text => {
                let mut s = format!("N          {}\ndimension  {}\n", st.n_vars, st.dimension);
                for t in RowTag::ALL {
                    let _ = writeln!(s, "{:<11}{}", t.to_string(), st.count(t));
                }
                let _ = writeln!(s, "total      {}\nformula    {}", st.total, st.closed_form_total());
                s
            }
        }));
    }
    let cap = solver_cap(a.max_n, env)?;
    let sol = lp_solve(&p, SolveOptions { max_vars: cap, ..SolveOptions::default() }).map_err(|e| {
        usage(format!("{e}: pass --export and use an external solver, or --reduce"))
    })?;
    let sources: Vec<u32> = w.iter().map(|(s, _)| s).collect();
    let rates: BTreeMap<String, String> = sources
        .iter()
        .filter_map(|&s| sol.rate_bound(&p, s).map(|r| (s.to_string(), r.to_string())))
        .collect();
    let value = sol.value.as_ref().map(ToString::to_string);
    Ok((0, match format {
        Format::Json => {
            let mut v = json!({
                "status": sol.status.to_string(),
                "value": value,
                "rates": rates,
                "n_vars": p.n_vars(),
                "pivots": sol.pivots,
                "solved_columns": sol.solved_columns,
                "solved_rows": sol.solved_rows,
            });
            if a.witness {
                let wit: BTreeMap<String, String> = sol
                    .witness
                    .iter()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(s, x)| (lpfile::column_name(*s), x.to_string()))
                    .collect();
                v["witness"] = json!(wit);
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = format!("status  {}\n", sol.status);
            if sol.status == Status::Optimal {
                let _ = writeln!(s, "value   {}", value.unwrap_or_default());
                for (k, r) in &rates {
                    let _ = writeln!(s, "R{k} <= {r}");
                }
            }
            if a.witness {
                for (sub, x) in sol.witness.iter().filter(|(_, x)| !x.is_zero()) {
                    let _ = writeln!(s, "{} = {x}", lpfile::column_name(*sub));
                }
            }
            s
        }
    }))
}

fn pins(ts: &TransferSystem, given: &[String]) -> Result<BTreeMap<u32, u64>, Fail> {
    let mut out = BTreeMap::new();
    for p in given {
        let (name, value) = p.split_once('=').ok_or_else(|| usage(format!("pin `{p}` is not NAME=VALUE")))?;
        let x = ts.find(name.trim()).ok_or_else(|| usage(format!("unknown indeterminate `{name}`")))?;
        let v = value.trim().parse().map_err(|_| usage(format!("pin value `{value}` is not a number")))?;
        out.insert(x, v);
    }
    Ok(out)
}

fn transfer(a: &TransferArgs, format: Format) -> Result<(i32, String), Fail> {
    let original = load_fdg(&a.input)?;
    let g = reduced(original.clone(), a.reduce)?;
    let ts = build_transfer_system(&g).map_err(usage)?;
    if a.stats {
        let base = build_transfer_system(&original).map_err(usage)?;
        let st = reduction_stats(&base, &ts);
        let dims = |d: (usize, usize)| format!("{}x{}", d.0, d.1);
        return Ok((0, match format {
            Format::Json => pretty(&json!({
                "original_indeterminates": st.original_indets,
                "reduced_indeterminates": st.reduced_indets,
                "var_reduction_pct": st.var_reduction_pct,
                "original_adjacency": dims(st.original_dims),
                "reduced_adjacency": dims(st.reduced_dims),
                "complexity_reduction_pct": st.complexity_pct(),
                "squared_complexity_pct": st.squared_complexity_pct.to_string(),
                "cubed_complexity_pct": st.cubed_complexity_pct.to_string(),
            })),
            Format::Text => format!(
                "indeterminates  {} -> {} ({}% fewer)\nadjacency       {} -> {} ({}% less work)\n",
                st.original_indets,
                st.reduced_indets,
                st.var_reduction_pct,
                dims(st.original_dims),
                dims(st.reduced_dims),
                st.complexity_pct()
            ),
        }));
    }
    let m = transfer_matrix(&ts).map_err(usage)?;
    let Some(p) = a.search else {
        return Ok((0, match format {
            Format::Json => pretty(&formats::matrix_to_json(&ts, &m)),
            Format::Text => formats::matrix_to_text(&ts, &m),
        }));
    };
    let pinned = pins(&ts, &a.pin)?;
    let opts = SearchOptions {
        max_field: a.max_field,
        max_indets: a.max_indets,
    };
    let out = solvability_search(&m, &ts.demand(), ts.indet_count(), p, &pinned, opts).map_err(usage)?;
    let evaluations = out.evaluations();
    let (code, assignment) = match out {
        SearchOutcome::Found { assignment, .. } => (0, Some(assignment)),
        SearchOutcome::Exhausted { .. } => (1, None),
    };
    let named: Option<BTreeMap<String, u64>> = assignment
        .as_ref()
        .map(|v| v.iter().enumerate().map(|(x, &val)| (ts.name(x as u32), val)).collect());
    Ok((code, match format {
        Format::Json => pretty(&json!({
            "field": p,
            "status": if code == 0 { "found" } else { "exhausted" },
            "assignment": named,
            "evaluations_tried": evaluations,
        })),
        Format::Text => match &named {
            Some(a) => {
                let mut s = format!("found over GF({p}) after {evaluations} evaluations\n");
                for (k, v) in a {
                    let _ = writeln!(s, "{k} = {v}");
                }
                s
            }
            None => format!("exhausted over GF({p}) after {evaluations} evaluations\n"),
        },
    }))
}

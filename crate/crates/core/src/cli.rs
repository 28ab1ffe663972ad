//! Command-line front end. `run` parses arguments and returns the exit code
//! together with everything that would be printed.

use std::cmp::Ordering;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{DynError, Result};
use crate::markov::{markov_graph, matrices_of, MarkovGraph};
use crate::orders::{remove_ones, shark_cmp, ForcingModel, PeriodClass};
use crate::permutation::Permutation;
use crate::pwl::{least_period_witnesses, lift_walk, DEFAULT_PIECE_CAP};
use crate::scalar::Scalar;
use crate::trees::{tree_trace_check, tree_walk_witnesses, GraphVertexMap, TreeVertexMap};
use crate::verify::{self, Suite, SweepParams};
use crate::walks::{
    count_closed, count_nonrepetitive_closed, enumerate_closed, find_negative_nonrepetitive, is_repetitive,
    lemma3_walk, lemma7_witness, power_of_two_walk, SearchCaps, Walk, DEFAULT_WALK_CAP,
};
use crate::{ExactMap, IntMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable overriding the default exploration caps.
pub const CAP_ENV: &str = "COMBDYN_CAP";

#[derive(Debug, Parser)]
#[command(name = "combdyn", version, about = "Exact combinatorial dynamics of interval, tree and graph maps")]
struct Cli {
    /// Human-readable output where a plain form exists.
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cyclic permutations and their connect-the-dots maps.
    #[command(subcommand)]
    Perm(PermCommand),
    /// Periodic points of piecewise-linear maps.
    #[command(subcommand)]
    Pwl(PwlCommand),
    /// Forcing orders on the positive integers.
    #[command(subcommand)]
    Order(OrderCommand),
    /// Vertex maps on trees.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Vertex maps on graphs with explicit routes.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Run an invariant sweep; exits 1 on a counterexample.
    Verify(VerifyArgs),
    /// Graphviz output.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Args)]
struct PermInput {
    /// Cycle notation, e.g. `1,2,3,4` or `(1,3)(2,4)`.
    #[arg(long, conflicts_with = "image")]
    cycle: Option<String>,
    /// Image list θ(1),…,θ(n), comma separated.
    #[arg(long)]
    image: Option<String>,
    /// Number of points when the cycle notation leaves some fixed.
    #[arg(short, long)]
    n: Option<usize>,
}

impl PermInput {
    fn permutation(&self) -> Result<Permutation> {
        match (&self.cycle, &self.image) {
            (Some(c), None) => Permutation::parse_cycles(c, self.n),
            (None, Some(i)) => {
                let image = i
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| DynError::Parse(format!("bad image entry {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Permutation::from_image(&image)
            }
            _ => Err(DynError::Parse("give exactly one of --cycle or --image".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum PermCommand {
    /// Matrices, traces of powers and walk counts.
    Analyze {
        #[command(flatten)]
        input: PermInput,
        /// Largest power reported.
        #[arg(long, default_value_t = 4)]
        power: u64,
        /// Print the Markov graph as DOT instead of the report.
        #[arg(long)]
        dot: bool,
    },
    /// Closed walks of one length, or a forcing walk with its periodic point.
    Walks {
        #[command(flatten)]
        input: PermInput,
        #[arg(long)]
        length: usize,
        /// Include repetitive walks and list every base point.
        #[arg(long, conflicts_with = "forcing")]
        all: bool,
        /// Build a negative non-repetitive walk and lift it to a periodic point.
        #[arg(long)]
        forcing: bool,
    },
}

#[derive(Debug, Subcommand)]
enum PwlCommand {
    /// Least periods up to a bound, one exact witness each.
    Periods {
        #[command(flatten)]
        input: PermInput,
        #[arg(long, default_value_t = 8)]
        upto: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum OrderCommand {
    /// Compare two periods.
    Cmp { m: u64, n: u64 },
    /// Periods forced by `n` up to a bound.
    Forced {
        n: u64,
        /// sharkovsky, basic or tree.
        #[arg(long, default_value = "sharkovsky")]
        model: String,
        #[arg(long, default_value_t = 64)]
        upto: u64,
    },
    /// Clear low bits one at a time.
    RemoveOnes { v: u64 },
}

#[derive(Debug, Subcommand)]
enum TreeCommand {
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        power: u64,
        /// Look for a negative non-repetitive closed walk of this length.
        #[arg(long)]
        walk_length: Option<usize>,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        power: u64,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// trace, power, product, forcing, tree-trace or walk-counts.
    suite: String,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    upto: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    Dot {
        #[command(flatten)]
        input: PermInput,
        /// Tree JSON file instead of a permutation.
        #[arg(long, conflicts_with_all = ["cycle", "image", "graph"])]
        tree: Option<PathBuf>,
        /// Graph JSON file instead of a permutation.
        #[arg(long, conflicts_with_all = ["cycle", "image"])]
        graph: Option<PathBuf>,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn exit_code(e: &DynError) -> i32 {
    match e {
        DynError::Resource { .. } => EXIT_RESOURCE,
        DynError::Invariant(_) => EXIT_COUNTEREXAMPLE,
        _ => EXIT_USAGE,
    }
}

fn caps_from_env() -> Result<usize> {
    match std::env::var(CAP_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| DynError::Parse(format!("{CAP_ENV} must be a positive integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_WALK_CAP.max(DEFAULT_PIECE_CAP)),
    }
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn emit(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| DynError::Parse(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let cap = caps_from_env()?;
    match &cli.command {
        Command::Perm(PermCommand::Analyze { input, power, dot }) => {
            let theta = input.permutation()?;
            let g = markov_graph(&theta)?;
            if *dot {
                return Ok(Outcome::ok(g.to_dot("markov")));
            }
            let (m, om) = matrices_of(&theta)?;
            Ok(Outcome::ok(emit(&matrix_report(json!(theta.image()), &m, &om, *power)?)))
        }
        Command::Perm(PermCommand::Walks {
            input,
            length,
            all,
            forcing,
        }) => {
            let theta = input.permutation()?;
            let caps = SearchCaps { visited_nodes: cap };
            if *forcing {
                return Ok(Outcome::ok(emit(&forcing_report(&theta, *length, caps)?)));
            }
            let g = markov_graph(&theta)?;
            let mut walks = Vec::new();
            for base in 0..g.vertex_count() {
                for w in enumerate_closed(&g, base, *length, None, !*all, caps)? {
                    if *all || w.canonical_rotation()? == w {
                        walks.push(w);
                    }
                }
            }
            walks.sort();
            Ok(Outcome::ok(emit(&json!({
                "perm": theta.image(),
                "length": length,
                "count": walks.len(),
                "walks": walks,
            }))))
        }
        Command::Pwl(PwlCommand::Periods { input, upto, cap: c }) => {
            let theta = input.permutation()?;
            let f = ExactMap::from_permutation(&theta)?;
            let found = least_period_witnesses(&f, *upto, c.unwrap_or(cap))?;
            let periods: Vec<usize> = found.keys().copied().collect();
            let witnesses: serde_json::Map<String, Value> =
                found.iter().map(|(p, x)| (p.to_string(), json!(x.to_text()))).collect();
            if cli.text {
                return Ok(Outcome::ok(format!("{}\n", join(&periods))));
            }
            Ok(Outcome::ok(emit(&json!({
                "perm": theta.image(),
                "upto": upto,
                "periods": periods,
                "witnesses": witnesses,
            }))))
        }
        Command::Order(OrderCommand::Cmp { m, n }) => {
            if *m == 0 || *n == 0 {
                return Err(DynError::domain("periods are positive"));
            }
            let rel = match shark_cmp(*m, *n) {
                Ordering::Less => format!("{m} ◁ {n}"),
                Ordering::Equal => format!("{m} = {n}"),
                Ordering::Greater => format!("{n} ◁ {m}"),
            };
            if cli.text {
                return Ok(Outcome::ok(format!("{rel}\n")));
            }
            Ok(Outcome::ok(emit(&json!({"m": m, "n": n, "relation": rel}))))
        }
        Command::Order(OrderCommand::Forced { n, model, upto }) => {
            if *n == 0 {
                return Err(DynError::domain("periods are positive"));
            }
            let model: ForcingModel = model.parse()?;
            let forced: Vec<u64> = model.forced(*n, *upto)?.into_iter().collect();
            if cli.text {
                return Ok(Outcome::ok(format!("{}\n", join(&forced))));
            }
            Ok(Outcome::ok(emit(&json!({
                "n": n,
                "model": model.to_string(),
                "upto": upto,
                "forced": forced,
            }))))
        }
        Command::Order(OrderCommand::RemoveOnes { v }) => {
            if *v == 0 {
                return Err(DynError::domain("remove-ones needs v >= 1"));
            }
            let seq = remove_ones(*v);
            if cli.text {
                return Ok(Outcome::ok(format!("{}\n", join(&seq))));
            }
            Ok(Outcome::ok(emit(&json!({"v": v, "sequence": seq}))))
        }
        Command::Tree(TreeCommand::Analyze {
            file,
            power,
            walk_length,
            dot,
        }) => {
            let tvm = TreeVertexMap::from_json(&read_file(file)?)?;
            if *dot {
                return Ok(Outcome::ok(tvm.graph()?.to_dot("tree")));
            }
            let (m, om) = tvm.matrices()?;
            let mut report = matrix_report(tvm.to_json(), &m, &om, *power)?;
            report["routes"] = json!(tvm.routes().iter().map(|r| signed(r)).collect::<Vec<_>>());
            report["certificate"] = json!(tree_trace_check(&tvm)?);
            if let Some(len) = walk_length {
                let caps = SearchCaps { visited_nodes: cap };
                let found = tree_walk_witnesses(&tvm, *len, caps)?;
                if cli.text {
                    return Ok(Outcome::ok(match &found {
                        Some(w) => format!("present {w}\n"),
                        None => "absent\n".to_string(),
                    }));
                }
                report["walk"] = match found {
                    Some(w) => json!({"length": len, "status": "present", "walk": w}),
                    None => json!({"length": len, "status": "absent"}),
                };
            }
            Ok(Outcome::ok(emit(&report)))
        }
        Command::Graph(GraphCommand::Analyze { file, power, dot }) => {
            let gvm = GraphVertexMap::from_json(&read_file(file)?)?;
            if *dot {
                return Ok(Outcome::ok(gvm.graph()?.to_dot("graph")));
            }
            let (m, om) = gvm.matrices()?;
            let mut report = matrix_report(
                json!({"v": gvm.vertex_count(), "edges": gvm.edges(), "perm": gvm.perm().image()}),
                &m,
                &om,
                *power,
            )?;
            report["routes"] = json!(gvm.routes().iter().map(|r| signed(r)).collect::<Vec<_>>());
            Ok(Outcome::ok(emit(&report)))
        }
        Command::Verify(args) => {
            let suite: Suite = args.suite.parse()?;
            let defaults = SweepParams::default();
            let n_max = args.n_max.unwrap_or(match suite {
                Suite::TreeTrace => 9,
                Suite::Product => 5,
                Suite::Trace => 7,
                _ => defaults.n_max,
            });
            let upto = args.upto.unwrap_or(match suite {
                Suite::Power => 12,
                _ => defaults.upto,
            });
            let report = verify::run(
                suite,
                SweepParams {
                    n_max,
                    upto,
                    seed: args.seed,
                    cap,
                },
            )?;
            let code = if report.passed() { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
            let stdout = if cli.text {
                match &report.counterexample {
                    None => format!("pass {suite} ({} cases)\n", report.checked),
                    Some(c) => format!("FAIL {suite} {c}\n"),
                }
            } else {
                emit(&report.to_json())
            };
            Ok(Outcome {
                code,
                stdout,
                stderr: String::new(),
            })
        }
        Command::Export(ExportCommand::Dot { input, tree, graph }) => {
            let g: MarkovGraph = match (tree, graph) {
                (Some(t), _) => TreeVertexMap::from_json(&read_file(t)?)?.graph()?,
                (_, Some(gr)) => GraphVertexMap::from_json(&read_file(gr)?)?.graph()?,
                _ => markov_graph(&input.permutation()?)?,
            };
            Ok(Outcome::ok(g.to_dot("markov")))
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn signed(route: &[(usize, crate::Sign)]) -> Vec<i64> {
    route.iter().map(|&(e, s)| (e as i64 + 1) * s.value()).collect()
}

fn matrix_report(map: Value, m: &IntMatrix, om: &IntMatrix, power: u64) -> Result<Value> {
    if power == 0 {
        return Err(DynError::domain("--power must be positive"));
    }
    let mut trace_m = Vec::new();
    let mut trace_om = Vec::new();
    let mut nonrep = Vec::new();
    let mut acc = om.clone();
    for k in 1..=power {
        trace_m.push(big(count_closed(m, k)?));
        trace_om.push(big(acc.trace()));
        nonrep.push(big(count_nonrepetitive_closed(m, k)?));
        acc = acc.mul(om)?;
    }
    Ok(json!({
        "map": map,
        "M": m.to_json_value(),
        "OM": om.to_json_value(),
        "trace_M": trace_m,
        "trace_OM": trace_om,
        "nonrepetitive_closed": nonrep,
    }))
}

fn big(x: BigInt) -> Value {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// Negative non-repetitive walk of length `m` for an `n`-cycle, built by the
/// first construction that applies, with the periodic point it lifts to.
fn forcing_report(theta: &Permutation, m: usize, caps: SearchCaps) -> Result<Value> {
    if !theta.is_full_cycle() || theta.len() < 2 {
        return Err(DynError::domain(format!("{theta} is not a single cycle on n >= 2 points")));
    }
    if m == 0 {
        return Err(DynError::domain("walk length must be positive"));
    }
    let n = theta.len();
    let class = PeriodClass::of(n as u64);
    let (construction, walk): (&str, Option<Walk>) = if m.is_power_of_two() && m % n != 0 {
        ("power-of-two", Some(power_of_two_walk(theta, m.trailing_zeros())?))
    } else if class.s > 1 && m % (1 << class.k) == 0 && (m >> class.k) as u64 > class.s {
        ("splice", Some(lemma3_walk(theta, (m >> class.k) as u64)?))
    } else if class.s > 1 && m == 3 << (class.k + 1) {
        ("horseshoe", Some(lemma7_witness(theta)?.walk))
    } else {
        ("search", find_negative_nonrepetitive(&markov_graph(theta)?, m, caps)?)
    };
    let Some(walk) = walk else {
        return Ok(json!({"perm": theta.image(), "length": m, "construction": construction, "status": "absent"}));
    };
    if is_repetitive(&walk)? {
        return Err(DynError::invariant(format!("{walk} is repetitive")));
    }
    let point = lift_walk(theta, &walk)?;
    Ok(json!({
        "perm": theta.image(),
        "length": m,
        "construction": construction,
        "status": "present",
        "walk": walk,
        "point": point,
    }))
}

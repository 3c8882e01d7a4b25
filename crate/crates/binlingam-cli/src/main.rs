//! Command-line front end: discover a causal order from a CSV, generate
//! seeded synthetic datasets, run benchmark grids, and reproduce the Asia
//! case study. Machine-readable payloads go to stdout (or `--output`),
//! diagnostics to stderr. Exit codes: 0 success, 2 input or usage errors,
//! 3 guard violations (variable or arity limits).

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use binlingam::bitdata::{load_csv_path, write_csv_path, BinaryDataset, VariableSubset};
use binlingam::datagen::{generate, sample_asia, Confounding, GenConfig};
use binlingam::estimator::{EstimatorError, EstimatorKind};
use binlingam::eval::{identifiability_warnings, round_sig, run_benchmark, EvalError, Method};
use binlingam::search::{discover_order_with_limit, SearchError, SearchResult, DEFAULT_P_MAX};

#[derive(Parser)]
#[command(
    name = "binlingam",
    about = "Causal order discovery for binary variables via subset-lattice shortest paths",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the causal order of the columns of a binary CSV file.
    Discover {
        /// Input CSV path (header row names the variables).
        #[arg(long)]
        input: PathBuf,
        /// Output path for the JSON report; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "mdl")]
        estimator: EstimatorKind,
        /// Cell text mapped to 1 (case-insensitive, trimmed).
        #[arg(long, default_value = "1")]
        true_token: String,
        /// Cell text mapped to 0.
        #[arg(long, default_value = "0")]
        false_token: String,
        /// Variable-count guard for the lattice search.
        #[arg(long, default_value_t = DEFAULT_P_MAX)]
        p_max: usize,
        /// Half-width of the near-fair band for identifiability warnings.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Generate a seeded synthetic chain dataset as CSV plus a metadata sidecar.
    Generate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        confounding: Confounding,
        #[arg(long, default_value_t = 0.2)]
        flip_prob: f64,
        /// Comma-separated 1-based variable indices hit by the global
        /// confounder (defaults depend on p).
        #[arg(long)]
        global_set: Option<String>,
        /// Comma-separated per-variable noise probabilities; drawn from the
        /// standard grid when omitted.
        #[arg(long)]
        noise_probs: Option<String>,
        /// Output CSV path; metadata is written next to it as `<path>.meta`.
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a benchmark grid and write the aggregated report.
    Benchmark {
        /// Comma-separated variable counts, e.g. 2,4,6.
        #[arg(long)]
        p_list: String,
        /// Comma-separated sample sizes, e.g. 100,500,1000.
        #[arg(long)]
        n_list: String,
        #[arg(long, default_value = "none")]
        confounding: Confounding,
        #[arg(long, default_value_t = 0.2)]
        flip_prob: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// sp, greedy or both.
        #[arg(long, default_value = "both")]
        methods: String,
        #[arg(long, default_value = "mdl")]
        estimator: EstimatorKind,
        /// Base path; writes `<base>.csv` and `<base>.json`. Stdout (JSON
        /// only) when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include measured wall times (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Sample the Asia network and discover its causal order.
    AsiaDemo {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "mdl")]
        estimator: EstimatorKind,
        /// Output path for the JSON report; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also dump the sampled dataset as CSV.
        #[arg(long)]
        data_out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(err: impl Display) -> Self {
        Failure {
            code: 2,
            message: err.to_string(),
        }
    }

    fn guard(err: impl Display) -> Self {
        Failure {
            code: 3,
            message: err.to_string(),
        }
    }
}

fn search_failure(err: SearchError) -> Failure {
    match &err {
        SearchError::TooManyVariables { .. }
        | SearchError::Estimator(EstimatorError::JointArity { .. }) => Failure::guard(err),
        _ => Failure::input(err),
    }
}

fn eval_failure(err: EvalError) -> Failure {
    match &err {
        EvalError::Search(SearchError::TooManyVariables { .. }) => Failure::guard(err),
        _ => Failure::input(err),
    }
}

#[derive(Serialize)]
struct EdgeOut {
    subset: Vec<String>,
    chosen: String,
    weight: f64,
}

#[derive(Serialize)]
struct DiscoverOut {
    order: Vec<String>,
    total_cost_nats: f64,
    edges: Vec<EdgeOut>,
    mi_edge_calls: u64,
    mi_coef_calls: u64,
    estimator: EstimatorKind,
    n: usize,
    p: usize,
    warnings: Vec<[String; 2]>,
}

fn discover_report(
    data: &BinaryDataset,
    result: &SearchResult,
    delta: f64,
) -> Result<DiscoverOut, Failure> {
    let name = |v: usize| data.name(v).to_string();
    let warnings = if data.n() >= 2 {
        identifiability_warnings(data, delta)
            .map_err(eval_failure)?
            .into_iter()
            .map(|(u, v)| [name(u), name(v)])
            .collect()
    } else {
        Vec::new()
    };
    Ok(DiscoverOut {
        order: result.order.iter().map(|&v| name(v)).collect(),
        total_cost_nats: round_sig(result.total, 12),
        edges: result
            .edge_weights
            .iter()
            .map(|e| EdgeOut {
                subset: e.subset.iter().map(name).collect(),
                chosen: name(e.chosen),
                weight: round_sig(e.weight, 12),
            })
            .collect(),
        mi_edge_calls: result.mi_edge_calls,
        mi_coef_calls: result.mi_coef_calls,
        estimator: result.estimator,
        n: data.n(),
        p: data.p(),
        warnings,
    })
}

fn emit(payload: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, payload).map_err(Failure::input),
        None => print_stdout(payload),
    }
}

/// Writes to stdout, treating a reader that hangs up (`head`, closed pipe)
/// as a normal exit rather than an error.
fn print_stdout(payload: &str) -> Result<(), Failure> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(payload.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::input(e)),
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: Display,
{
    let items: Result<Vec<T>, _> = text.split(',').map(|s| s.trim().parse::<T>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        Ok(_) => Err(Failure::input(format!("{what} is empty"))),
        Err(e) => Err(Failure::input(format!("invalid {what}: {e}"))),
    }
}

fn run_discover(
    input: &Path,
    output: Option<&Path>,
    estimator: EstimatorKind,
    true_token: &str,
    false_token: &str,
    p_max: usize,
    delta: f64,
) -> Result<(), Failure> {
    if !(0.0..0.5).contains(&delta) || delta <= 0.0 {
        return Err(Failure::input(format!(
            "delta {delta} outside the open interval (0, 0.5)"
        )));
    }
    let data = load_csv_path(input, true_token, false_token).map_err(Failure::input)?;
    let result = discover_order_with_limit(&data, estimator, p_max).map_err(search_failure)?;
    let report = discover_report(&data, &result, delta)?;
    emit(&to_json(&report), output)
}

fn parse_global_set(text: &str, p: usize) -> Result<VariableSubset, Failure> {
    let one_based: Vec<usize> = parse_list(text, "global set")?;
    let mut indices = Vec::new();
    for idx in one_based {
        if idx == 0 || idx > p {
            return Err(Failure::input(format!(
                "global set index {idx} outside 1..={p}"
            )));
        }
        indices.push(idx - 1);
    }
    Ok(VariableSubset::from_indices(indices))
}

#[allow(clippy::too_many_arguments)]
fn run_generate(
    p: usize,
    n: usize,
    seed: u64,
    confounding: Confounding,
    flip_prob: f64,
    global_set: Option<&str>,
    noise_probs: Option<&str>,
    output: &Path,
) -> Result<(), Failure> {
    let mut cfg = GenConfig::sampled(p, n, seed, confounding, flip_prob);
    if let Some(text) = noise_probs {
        let probs: Vec<f64> = parse_list(text, "noise probabilities")?;
        if probs.len() != p {
            return Err(Failure::input(format!(
                "{} noise probabilities for p = {p}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|&&q| !(0.0 < q && q < 1.0)) {
            return Err(Failure::input(format!(
                "noise probability {bad} outside (0, 1)"
            )));
        }
        cfg.noise_probs = probs;
    }
    if let Some(text) = global_set {
        cfg.global_set = Some(parse_global_set(text, p)?);
    }
    let (data, true_order) = generate(&cfg).map_err(Failure::input)?;
    write_csv_path(&data, output, "1", "0").map_err(Failure::input)?;

    let mut meta = String::new();
    meta.push_str(&format!("seed={}\n", cfg.seed));
    meta.push_str(&format!("p={}\n", cfg.p));
    meta.push_str(&format!("n={}\n", cfg.n));
    meta.push_str(&format!("confounding={}\n", cfg.confounding));
    meta.push_str(&format!("flip_prob={}\n", cfg.flip_prob));
    let probs: Vec<String> = cfg.noise_probs.iter().map(|q| q.to_string()).collect();
    meta.push_str(&format!("noise_probs={}\n", probs.join(",")));
    let order_names: Vec<&str> = true_order.iter().map(|&v| data.name(v)).collect();
    meta.push_str(&format!("true_order={}\n", order_names.join(",")));
    if cfg.confounding == Confounding::Global {
        let set = cfg
            .global_set
            .or_else(|| binlingam::datagen::default_global_set(p))
            .expect("generate validated the set");
        let names: Vec<&str> = set.iter().map(|v| data.name(v)).collect();
        meta.push_str(&format!("global_set={}\n", names.join(",")));
    }
    let meta_path = {
        let mut os = output.as_os_str().to_os_string();
        os.push(".meta");
        PathBuf::from(os)
    };
    fs::write(&meta_path, meta).map_err(Failure::input)?;
    eprintln!(
        "wrote {} and {} ({} rows, {} columns)",
        output.display(),
        meta_path.display(),
        data.n(),
        data.p()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_bench_cmd(
    p_list: &str,
    n_list: &str,
    confounding: Confounding,
    flip_prob: f64,
    trials: usize,
    seed: u64,
    methods: &str,
    estimator: EstimatorKind,
    output: Option<&Path>,
    timings: bool,
) -> Result<(), Failure> {
    if trials == 0 {
        return Err(Failure::input("need at least one trial"));
    }
    let ps: Vec<usize> = parse_list(p_list, "p list")?;
    let ns: Vec<usize> = parse_list(n_list, "n list")?;
    let methods: Vec<Method> = match methods.trim().to_lowercase().as_str() {
        "both" => vec![Method::ShortestPath, Method::Greedy],
        other => vec![other.parse().map_err(Failure::input)?],
    };
    let mut cells = Vec::new();
    for &p in &ps {
        for &n in &ns {
            cells.push(GenConfig::sampled(p, n, 0, confounding, flip_prob));
        }
    }
    let report =
        run_benchmark(&cells, trials, &[estimator], &methods, seed).map_err(eval_failure)?;
    let report = if timings {
        report
    } else {
        report.without_timings()
    };
    match output {
        Some(base) => {
            let csv_path = base.with_extension("csv");
            let json_path = base.with_extension("json");
            fs::write(&csv_path, report.to_csv_string()).map_err(Failure::input)?;
            fs::write(&json_path, report.to_json_string() + "\n").map_err(Failure::input)?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(())
        }
        None => print_stdout(&(report.to_json_string() + "\n")),
    }
}

fn run_asia(
    n: usize,
    seed: u64,
    estimator: EstimatorKind,
    output: Option<&Path>,
    data_out: Option<&Path>,
) -> Result<(), Failure> {
    let data = sample_asia(n, seed).map_err(Failure::input)?;
    if let Some(path) = data_out {
        write_csv_path(&data, path, "yes", "no").map_err(Failure::input)?;
        eprintln!("wrote {}", path.display());
    }
    let result =
        discover_order_with_limit(&data, estimator, DEFAULT_P_MAX).map_err(search_failure)?;
    let report = discover_report(&data, &result, 0.05)?;
    emit(&to_json(&report), output)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Discover {
            input,
            output,
            estimator,
            true_token,
            false_token,
            p_max,
            delta,
        } => run_discover(
            &input,
            output.as_deref(),
            estimator,
            &true_token,
            &false_token,
            p_max,
            delta,
        ),
        Command::Generate {
            p,
            n,
            seed,
            confounding,
            flip_prob,
            global_set,
            noise_probs,
            output,
        } => run_generate(
            p,
            n,
            seed,
            confounding,
            flip_prob,
            global_set.as_deref(),
            noise_probs.as_deref(),
            &output,
        ),
        Command::Benchmark {
            p_list,
            n_list,
            confounding,
            flip_prob,
            trials,
            seed,
            methods,
            estimator,
            output,
            timings,
        } => run_bench_cmd(
            &p_list,
            &n_list,
            confounding,
            flip_prob,
            trials,
            seed,
            &methods,
            estimator,
            output.as_deref(),
            timings,
        ),
        Command::AsiaDemo {
            n,
            seed,
            estimator,
            output,
            data_out,
        } => run_asia(n, seed, estimator, output.as_deref(), data_out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

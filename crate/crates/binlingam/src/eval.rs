//! Scoring metrics, identifiability diagnostics, and the benchmark runner.
//!
//! Benchmark trials are independent: each derives its own seed from the
//! master seed, the grid cell and the trial index, generates a dataset,
//! runs the requested methods and scores them. With the `parallel` feature
//! (on by default) trials run on the rayon thread pool; aggregation walks
//! the collected outcomes in trial order either way, so the report is
//! identical whichever path executed.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

use crate::bitdata::BinaryDataset;
use crate::datagen::{derive_seed, generate, Confounding, GenConfig, GenError};
use crate::estimator::{count_joint, penalized_mi, EstimatorError, EstimatorKind};
use crate::search::{discover_order, greedy_order, SearchError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least one trial")]
    NoTrials,
    #[error("benchmark grid, estimator list and method list must be nonempty")]
    EmptyGrid,
    #[error("orders have different lengths: {left} vs {right}")]
    OrderLengthMismatch { left: usize, right: usize },
    #[error("order is not a permutation of 0..{p}")]
    NotAPermutation { p: usize },
    #[error("cell (p={p}, n={n}, {confounding}) trial {trial}: {source}")]
    Trial {
        p: usize,
        n: usize,
        confounding: Confounding,
        trial: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// Which search drives a benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "sp")]
    ShortestPath,
    Greedy,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::ShortestPath => write!(f, "sp"),
            Method::Greedy => write!(f, "greedy"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "sp" | "shortest-path" => Ok(Method::ShortestPath),
            "greedy" => Ok(Method::Greedy),
            other => Err(format!("unknown method {other:?} (expected sp or greedy)")),
        }
    }
}

fn positions(order: &[usize]) -> Result<Vec<usize>, EvalError> {
    let p = order.len();
    let mut pos = vec![usize::MAX; p];
    for (i, &v) in order.iter().enumerate() {
        if v >= p || pos[v] != usize::MAX {
            return Err(EvalError::NotAPermutation { p });
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// 1 iff the two orders are identical position by position.
pub fn complete_match(estimated: &[usize], truth: &[usize]) -> Result<bool, EvalError> {
    if estimated.len() != truth.len() {
        return Err(EvalError::OrderLengthMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    positions(estimated)?;
    positions(truth)?;
    Ok(estimated == truth)
}

/// Fraction of unordered variable pairs whose relative order agrees
/// between the two permutations.
pub fn pairwise_rate(estimated: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    if estimated.len() != truth.len() {
        return Err(EvalError::OrderLengthMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    let p = truth.len();
    let pos_e = positions(estimated)?;
    let pos_t = positions(truth)?;
    let mut agree = 0usize;
    for u in 0..p {
        for v in (u + 1)..p {
            if (pos_e[u] < pos_e[v]) == (pos_t[u] < pos_t[v]) {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (p * (p - 1) / 2) as f64)
}

/// Flags dependent variable pairs whose marginals both sit within `delta`
/// of one half; for such pairs the direction may not be identifiable.
/// Dependence is judged with the MDL estimate, which is zero exactly when
/// the pair looks independent.
pub fn identifiability_warnings(
    data: &BinaryDataset,
    delta: f64,
) -> Result<Vec<(usize, usize)>, EvalError> {
    let n = data.n() as f64;
    let near_half: Vec<bool> = (0..data.p())
        .map(|v| {
            let rate = data.column(v).count_ones() as f64 / n;
            (rate - 0.5).abs() <= delta
        })
        .collect();
    let mut flagged = Vec::new();
    for u in 0..data.p() {
        for v in (u + 1)..data.p() {
            if !(near_half[u] && near_half[v]) {
                continue;
            }
            let table = count_joint(data.column(u), &[data.column(v)])?;
            if penalized_mi(&table)?.value > 0.0 {
                flagged.push((u, v));
            }
        }
    }
    Ok(flagged)
}

/// One aggregated benchmark cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub p: usize,
    pub n: usize,
    pub confounding: Confounding,
    pub estimator: EstimatorKind,
    pub method: Method,
    pub trials: usize,
    pub complete_rate: f64,
    pub pairwise_rate: f64,
    pub mean_mi_edge_calls: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
}

impl BenchmarkReport {
    /// Copy with wall times zeroed; every remaining field is a pure
    /// function of the master seed and grid.
    pub fn without_timings(&self) -> BenchmarkReport {
        let rows = self
            .rows
            .iter()
            .map(|r| BenchmarkRow {
                wall_time_ms: 0.0,
                ..r.clone()
            })
            .collect();
        BenchmarkReport { rows }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "p,n,confounding,estimator,method,trials,complete_rate,pairwise_rate,mean_mi_edge_calls,wall_time_ms\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.p,
                r.n,
                r.confounding,
                r.estimator,
                r.method,
                r.trials,
                round_sig(r.complete_rate, 12),
                round_sig(r.pairwise_rate, 12),
                round_sig(r.mean_mi_edge_calls, 12),
                round_sig(r.wall_time_ms, 12),
            ));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        let rounded = BenchmarkReport {
            rows: self
                .rows
                .iter()
                .map(|r| BenchmarkRow {
                    complete_rate: round_sig(r.complete_rate, 12),
                    pairwise_rate: round_sig(r.pairwise_rate, 12),
                    mean_mi_edge_calls: round_sig(r.mean_mi_edge_calls, 12),
                    wall_time_ms: round_sig(r.wall_time_ms, 12),
                    ..r.clone()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&rounded).expect("report serializes")
    }
}

/// Rounds to the given number of significant digits, for diffable output.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("round-trips")
}

struct RunOutcome {
    complete: bool,
    pairwise: f64,
    mi_edge_calls: u64,
    wall_ms: f64,
}

struct TrialOutcome {
    cell: usize,
    /// Indexed `estimator-major`, then method, matching the request order.
    runs: Vec<RunOutcome>,
}

fn run_trial(
    cells: &[GenConfig],
    cell_idx: usize,
    trial: usize,
    master_seed: u64,
    estimators: &[EstimatorKind],
    methods: &[Method],
) -> Result<TrialOutcome, EvalError> {
    let template = &cells[cell_idx];
    let wrap = |source: EvalError| EvalError::Trial {
        p: template.p,
        n: template.n,
        confounding: template.confounding,
        trial,
        source: Box::new(source),
    };

    let trial_seed = derive_seed(master_seed, ((cell_idx as u64) << 32) | trial as u64);
    let cfg = GenConfig {
        seed: trial_seed,
        ..GenConfig::sampled(
            template.p,
            template.n,
            trial_seed,
            template.confounding,
            template.flip_prob,
        )
    };
    let cfg = GenConfig {
        global_set: template.global_set,
        ..cfg
    };
    let (data, truth) = generate(&cfg).map_err(|e| wrap(e.into()))?;

    let mut runs = Vec::with_capacity(estimators.len() * methods.len());
    for &kind in estimators {
        for &method in methods {
            let start = Instant::now();
            let result = match method {
                Method::ShortestPath => discover_order(&data, kind),
                Method::Greedy => greedy_order(&data, kind),
            }
            .map_err(|e| wrap(e.into()))?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            runs.push(RunOutcome {
                complete: complete_match(&result.order, &truth).map_err(wrap)?,
                pairwise: pairwise_rate(&result.order, &truth).map_err(wrap)?,
                mi_edge_calls: result.mi_edge_calls,
                wall_ms,
            });
        }
    }
    Ok(TrialOutcome {
        cell: cell_idx,
        runs,
    })
}

fn aggregate(
    cells: &[GenConfig],
    trials: usize,
    estimators: &[EstimatorKind],
    methods: &[Method],
    outcomes: Vec<TrialOutcome>,
) -> BenchmarkReport {
    let runs_per_trial = estimators.len() * methods.len();
    let mut rows = Vec::with_capacity(cells.len() * runs_per_trial);
    for (cell_idx, cell) in cells.iter().enumerate() {
        for (ei, &estimator) in estimators.iter().enumerate() {
            for (mi, &method) in methods.iter().enumerate() {
                let slot = ei * methods.len() + mi;
                let mut complete = 0usize;
                let mut pairwise = 0.0f64;
                let mut calls = 0u64;
                let mut wall = 0.0f64;
                for outcome in outcomes.iter().filter(|o| o.cell == cell_idx) {
                    let run = &outcome.runs[slot];
                    complete += usize::from(run.complete);
                    pairwise += run.pairwise;
                    calls += run.mi_edge_calls;
                    wall += run.wall_ms;
                }
                let t = trials as f64;
                rows.push(BenchmarkRow {
                    p: cell.p,
                    n: cell.n,
                    confounding: cell.confounding,
                    estimator,
                    method,
                    trials,
                    complete_rate: complete as f64 / t,
                    pairwise_rate: pairwise / t,
                    mean_mi_edge_calls: calls as f64 / t,
                    wall_time_ms: wall / t,
                });
            }
        }
    }
    BenchmarkReport { rows }
}

fn validate_spec(
    cells: &[GenConfig],
    trials: usize,
    estimators: &[EstimatorKind],
    methods: &[Method],
) -> Result<(), EvalError> {
    if trials == 0 {
        return Err(EvalError::NoTrials);
    }
    if cells.is_empty() || estimators.is_empty() || methods.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    Ok(())
}

/// Runs `trials` seeded trials for every grid cell and aggregates the two
/// matching rates and the mean edge-estimation count per estimator and
/// method. Each trial redraws its noise probabilities from
/// [`crate::datagen::NOISE_GRID`] out of its own derived stream, so the
/// whole report is a deterministic function of the master seed and grid
/// (wall times aside).
pub fn run_benchmark(
    cells: &[GenConfig],
    trials: usize,
    estimators: &[EstimatorKind],
    methods: &[Method],
    master_seed: u64,
) -> Result<BenchmarkReport, EvalError> {
    validate_spec(cells, trials, estimators, methods)?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();

    #[cfg(feature = "parallel")]
    let outcomes: Result<Vec<TrialOutcome>, EvalError> = jobs
        .into_par_iter()
        .map(|(c, t)| run_trial(cells, c, t, master_seed, estimators, methods))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Result<Vec<TrialOutcome>, EvalError> = jobs
        .into_iter()
        .map(|(c, t)| run_trial(cells, c, t, master_seed, estimators, methods))
        .collect();

    Ok(aggregate(cells, trials, estimators, methods, outcomes?))
}

/// Single-threaded twin of [`run_benchmark`]; produces the same report.
pub fn run_benchmark_sequential(
    cells: &[GenConfig],
    trials: usize,
    estimators: &[EstimatorKind],
    methods: &[Method],
    master_seed: u64,
) -> Result<BenchmarkReport, EvalError> {
    validate_spec(cells, trials, estimators, methods)?;
    let mut outcomes = Vec::with_capacity(cells.len() * trials);
    for c in 0..cells.len() {
        for t in 0..trials {
            outcomes.push(run_trial(cells, c, t, master_seed, estimators, methods)?);
        }
    }
    Ok(aggregate(cells, trials, estimators, methods, outcomes))
}

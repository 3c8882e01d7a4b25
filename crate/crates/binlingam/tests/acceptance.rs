//! End-to-end acceptance suite. Every test covers one numbered criterion
//! and prints a single `acceptance N (...): PASS` line when it holds, so
//! `cargo test --test acceptance -- --nocapture` reads as a checklist.

use std::time::Instant;

use binlingam::bitdata::{BinaryDataset, BitColumn};
use binlingam::datagen::{derive_seed, generate, sample_asia, Confounding, GenConfig};
use binlingam::estimator::{
    count_joint, estimate_mi, mdl_penalty, penalized_mi, plugin_mi, EstimatorKind,
};
use binlingam::eval::{pairwise_rate, run_benchmark, Method};
use binlingam::search::{
    brute_force_min, discover_order, greedy_order, oracle_path_cost, residuals_path_independent,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn pass(criterion: u32, name: &str) {
    println!("acceptance {criterion} ({name}): PASS");
}

fn median(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

/// Criterion 1: with the MDL estimator on unconfounded chains at n = 1000,
/// the median edge-estimation count over 20 seeded trials per p equals
/// 2, 9, 20, 35, 54, 77 for p = 2, 4, 6, 8, 10, 12, and the sweep stays
/// under two minutes.
#[test]
fn criterion_01_edge_call_medians() {
    let started = Instant::now();
    let expected = [
        (2usize, 2.0f64),
        (4, 9.0),
        (6, 20.0),
        (8, 35.0),
        (10, 54.0),
        (12, 77.0),
    ];
    for &(p, want) in &expected {
        let mut calls = Vec::with_capacity(20);
        for trial in 0..20u64 {
            let seed = derive_seed(0xACC1 ^ p as u64, trial);
            let cfg = GenConfig::sampled(p, 1000, seed, Confounding::None, 0.2);
            let (data, _) = generate(&cfg).unwrap();
            let result = discover_order(&data, EstimatorKind::Mdl).unwrap();
            calls.push(result.mi_edge_calls);
        }
        let med = median(&mut calls);
        println!("  p={p}: median mi_edge_calls = {med} (counts {calls:?})");
        assert_eq!(med, want, "p={p}: median {med}, expected {want}");
    }
    let elapsed = started.elapsed();
    println!("  sweep took {:.1}s", elapsed.as_secs_f64());
    assert!(elapsed.as_secs() < 120, "sweep exceeded two minutes");
    pass(1, "table of edge-call medians");
}

/// Criterion 2: local confounding raises the mean edge-estimation count by
/// at most a factor of 1.6 over the unconfounded mean at the same (p, n).
#[test]
fn criterion_02_confounded_count_bound() {
    let mut cells = Vec::new();
    for &p in &[4usize, 6, 8, 10] {
        for &n in &[100usize, 500, 1000] {
            cells.push(GenConfig::sampled(p, n, 0, Confounding::None, 0.2));
            cells.push(GenConfig::sampled(p, n, 0, Confounding::Local, 0.2));
        }
    }
    let report = run_benchmark(
        &cells,
        20,
        &[EstimatorKind::Mdl],
        &[Method::ShortestPath],
        0xACC2,
    )
    .unwrap();
    for pair in report.rows.chunks(2) {
        let (none, local) = (&pair[0], &pair[1]);
        assert_eq!(none.confounding, Confounding::None);
        assert_eq!(local.confounding, Confounding::Local);
        let ratio = local.mean_mi_edge_calls / none.mean_mi_edge_calls;
        println!(
            "  p={} n={}: none {:.2}, local {:.2} (ratio {:.3})",
            none.p, none.n, none.mean_mi_edge_calls, local.mean_mi_edge_calls, ratio
        );
        assert!(
            local.mean_mi_edge_calls <= 1.6 * none.mean_mi_edge_calls,
            "p={} n={}: ratio {ratio:.3} above 1.6",
            none.p,
            none.n
        );
    }
    pass(2, "confounded edge-call bound");
}

/// Criterion 3: every search total in this battery equals the oracle cost
/// of its returned order and the sum of its reported edge weights, to 1e-9.
#[test]
fn criterion_03_self_consistency() {
    let mut checked = 0usize;
    for p in 2..=6usize {
        for &confounding in &[Confounding::None, Confounding::Local, Confounding::Global] {
            if confounding == Confounding::Global && !matches!(p, 4 | 6) {
                continue;
            }
            for trial in 0..5u64 {
                let seed = derive_seed(0xACC3 ^ p as u64, trial);
                let cfg = GenConfig::sampled(p, 400, seed, confounding, 0.2);
                let (data, _) = generate(&cfg).unwrap();
                for kind in [EstimatorKind::Plugin, EstimatorKind::Mdl] {
                    for result in [
                        discover_order(&data, kind).unwrap(),
                        greedy_order(&data, kind).unwrap(),
                    ] {
                        let oracle = oracle_path_cost(&data, &result.order, kind).unwrap();
                        let sum: f64 = result.edge_weights.iter().map(|e| e.weight).sum();
                        assert!(
                            (result.total - oracle).abs() <= TOL,
                            "total {} vs oracle {oracle}",
                            result.total
                        );
                        assert!(
                            (result.total - sum).abs() <= TOL,
                            "total {} vs weight sum {sum}",
                            result.total
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    println!("  {checked} search runs recomputed exactly");
    pass(3, "totals equal oracle recomputation");
}

/// Criterion 4: on 200 seeded instances with p in {3,4} at n = 500, whenever
/// the residual tables are path-independent the search total equals the
/// brute-force minimum exactly; the path-dependent remainder is reported.
#[test]
fn criterion_04_oracle_optimality() {
    let mut independent = 0usize;
    let mut dependent = 0usize;
    for trial in 0..200u64 {
        let p = if trial % 2 == 0 { 3 } else { 4 };
        let seed = derive_seed(0xACC4, trial);
        let cfg = GenConfig::sampled(p, 500, seed, Confounding::None, 0.2);
        let (data, _) = generate(&cfg).unwrap();
        let kind = EstimatorKind::Mdl;
        if residuals_path_independent(&data, kind).unwrap() {
            independent += 1;
            let result = discover_order(&data, kind).unwrap();
            let (_, best) = brute_force_min(&data, kind).unwrap();
            assert_eq!(
                result.total, best,
                "trial {trial}: search total {} != brute-force minimum {best}",
                result.total
            );
        } else {
            dependent += 1;
        }
    }
    println!("  path-independent instances: {independent}/200 (path-dependent: {dependent})");
    assert!(
        independent > 0,
        "no instance qualified for the equality check"
    );
    pass(4, "search equals brute force on path-independent instances");
}

/// Criterion 5: the plug-in decomposition I(a,{b,c}) + I(b,{c}) equals the
/// entropy-form total correlation from an independent joint-counting
/// oracle, to 1e-9, on 100 random triples.
#[test]
fn criterion_05_chain_rule_identity() {
    fn entropy(counts: &[u64], n: f64) -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let q = c as f64 / n;
                -q * q.ln()
            })
            .sum()
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    for _ in 0..100 {
        let n = 200usize;
        let pa = rng.random_range(1..9) as f64 / 10.0;
        let pb = rng.random_range(1..9) as f64 / 10.0;
        let flip = rng.random_range(1..5) as f64 / 10.0;
        let a: BitColumn = (0..n).map(|_| rng.random_bool(pa)).collect();
        let b: BitColumn = (0..n).map(|_| rng.random_bool(pb)).collect();
        let c: BitColumn = a.iter().map(|bit| bit != rng.random_bool(flip)).collect();

        let lhs = plugin_mi(&count_joint(&a, &[&b, &c]).unwrap()).value
            + plugin_mi(&count_joint(&b, &[&c]).unwrap()).value;

        // Oracle: scan rows into an eight-cell joint table and take the
        // entropy form H(a)+H(b)+H(c)-H(a,b,c).
        let mut joint = [0u64; 8];
        let (mut ca, mut cb, mut cc) = ([0u64; 2], [0u64; 2], [0u64; 2]);
        for row in 0..n {
            let (ba, bb, bc) = (a.get(row), b.get(row), c.get(row));
            joint[usize::from(ba) | usize::from(bb) << 1 | usize::from(bc) << 2] += 1;
            ca[usize::from(ba)] += 1;
            cb[usize::from(bb)] += 1;
            cc[usize::from(bc)] += 1;
        }
        let nf = n as f64;
        let rhs = entropy(&ca, nf) + entropy(&cb, nf) + entropy(&cc, nf) - entropy(&joint, nf);
        assert!(
            (lhs - rhs).abs() <= TOL,
            "decomposition {lhs} vs entropy form {rhs}"
        );
    }
    pass(5, "chain-rule identity against entropy oracle");
}

/// Criterion 6: on 200 seeded pairs of independent fair coins at n = 1000
/// the penalized estimate is exactly zero at least 95% of the time.
#[test]
fn criterion_06_independence_detection() {
    let mut zeros = 0usize;
    for trial in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0xACC6, trial));
        let u: BitColumn = (0..1000).map(|_| rng.random_bool(0.5)).collect();
        let v: BitColumn = (0..1000).map(|_| rng.random_bool(0.5)).collect();
        let est = penalized_mi(&count_joint(&u, &[&v]).unwrap()).unwrap();
        if est.value == 0.0 {
            zeros += 1;
        }
    }
    println!("  exact zeros: {zeros}/200 ({:.1}%)", zeros as f64 / 2.0);
    assert!(zeros >= 190, "only {zeros}/200 estimated exactly zero");
    pass(6, "independent pairs estimated exactly zero");
}

/// Criterion 7: on every corpus table, 0 ≤ J ≤ I with equality only when
/// the penalty is zero.
#[test]
fn criterion_07_estimator_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    let sizes = [50usize, 120, 333, 1000, 2000];
    let mut tables = 0usize;
    let mut degenerate = 0usize;
    while tables < 300 {
        let n = sizes[tables % sizes.len()];
        let q = 1 + tables % 3;
        let px = rng.random_range(1..9) as f64 / 10.0;
        let x: BitColumn = (0..n).map(|_| rng.random_bool(px)).collect();
        let mut vs = Vec::with_capacity(q);
        for _ in 0..q {
            let flip = rng.random_range(1..5) as f64 / 10.0;
            vs.push(
                x.iter()
                    .map(|b| b != rng.random_bool(flip))
                    .collect::<BitColumn>(),
            );
        }
        let refs: Vec<&BitColumn> = vs.iter().collect();
        let table = count_joint(&x, &refs).unwrap();
        let i = plugin_mi(&table);
        if i.value == 0.0 {
            // An exactly independent empirical table makes both estimates
            // zero and the comparison vacuous; the corpus is dependent
            // tables. Rare integer coincidence at small n.
            degenerate += 1;
            continue;
        }
        let j = penalized_mi(&table).unwrap();
        assert!(j.value >= 0.0);
        assert!(j.value <= i.value, "J {} above I {}", j.value, i.value);
        if j.value == i.value {
            assert_eq!(
                j.penalty, 0.0,
                "J equals I with a nonzero penalty {} (I = {})",
                j.penalty, i.value
            );
        }
        assert_eq!(j.penalty, mdl_penalty(q as u32, n as u64).unwrap());
        tables += 1;
    }
    println!("  {tables} dependent corpus tables checked ({degenerate} degenerate draws skipped)");
    pass(7, "penalized estimate dominated by plug-in");
}

/// Criterion 8: at p = 6, n = 500 with 100 trials per confounding mode, the
/// lattice search's complete-matching rate is at least the greedy rate in
/// every mode and strictly higher in some confounded mode.
///
/// Run with the plug-in estimate: under the MDL clamp at this sample size
/// most early-stage weights tie at exactly zero, both methods then resolve
/// the tie the same deterministic way, and the stagewise-versus-global
/// difference this criterion targets is invisible. The plug-in landscape
/// is strictly ordered, so greedy's unrecoverable early mistakes show.
#[test]
fn criterion_08_method_comparison() {
    let cells = vec![
        GenConfig::sampled(6, 500, 0, Confounding::None, 0.2),
        GenConfig::sampled(6, 500, 0, Confounding::Local, 0.2),
        GenConfig::sampled(6, 500, 0, Confounding::Global, 0.2),
    ];
    let report = run_benchmark(
        &cells,
        100,
        &[EstimatorKind::Plugin],
        &[Method::ShortestPath, Method::Greedy],
        0xACC8,
    )
    .unwrap();
    let mut strictly_better_confounded = false;
    for pair in report.rows.chunks(2) {
        let (sp, greedy) = (&pair[0], &pair[1]);
        assert_eq!(sp.method, Method::ShortestPath);
        assert_eq!(greedy.method, Method::Greedy);
        println!(
            "  {}: sp complete {:.2}, greedy complete {:.2} (pairwise {:.3} vs {:.3})",
            sp.confounding,
            sp.complete_rate,
            greedy.complete_rate,
            sp.pairwise_rate,
            greedy.pairwise_rate
        );
        assert!(
            sp.complete_rate >= greedy.complete_rate,
            "{}: search {} below greedy {}",
            sp.confounding,
            sp.complete_rate,
            greedy.complete_rate
        );
        if sp.confounding != Confounding::None && sp.complete_rate > greedy.complete_rate {
            strictly_better_confounded = true;
        }
    }
    assert!(
        strictly_better_confounded,
        "search never strictly beat greedy under confounding"
    );
    pass(8, "search dominates greedy on complete matching");
}

/// Criterion 9: the plug-in estimator needs strictly more edge estimations
/// than the MDL estimator on unconfounded chains (p in {6,8,10}, n = 1000).
#[test]
fn criterion_09_estimator_cost() {
    let cells: Vec<GenConfig> = [6usize, 8, 10]
        .iter()
        .map(|&p| GenConfig::sampled(p, 1000, 0, Confounding::None, 0.2))
        .collect();
    let report = run_benchmark(
        &cells,
        20,
        &[EstimatorKind::Plugin, EstimatorKind::Mdl],
        &[Method::ShortestPath],
        0xACC9,
    )
    .unwrap();
    for &p in &[6usize, 8, 10] {
        let mean_for = |kind: EstimatorKind| {
            report
                .rows
                .iter()
                .find(|r| r.p == p && r.estimator == kind)
                .unwrap()
                .mean_mi_edge_calls
        };
        let plugin = mean_for(EstimatorKind::Plugin);
        let mdl = mean_for(EstimatorKind::Mdl);
        println!("  p={p}: plugin {plugin:.1} calls, mdl {mdl:.1} calls");
        assert!(
            plugin > mdl,
            "p={p}: plugin mean {plugin} not above mdl mean {mdl}"
        );
    }
    pass(9, "plug-in costs more estimations than MDL");
}

/// Criterion 10: across ten seeded Asia samples at n = 5000, a majority of
/// discovered orders places asia before tub, tub before either, lung before
/// either and either before dysp.
#[test]
fn criterion_10_asia_order() {
    // Column indices in the sampled dataset.
    let (asia, tub, lung, either, dysp) = (0usize, 1, 3, 5, 7);
    let mut consistent = 0usize;
    for seed in 0..10u64 {
        let data = sample_asia(5000, derive_seed(0xACCA, seed)).unwrap();
        let result = discover_order(&data, EstimatorKind::Mdl).unwrap();
        let mut pos = [0usize; 8];
        for (i, &v) in result.order.iter().enumerate() {
            pos[v] = i;
        }
        let ok = pos[asia] < pos[tub]
            && pos[tub] < pos[either]
            && pos[lung] < pos[either]
            && pos[either] < pos[dysp];
        let names: Vec<&str> = result.order.iter().map(|&v| data.name(v)).collect();
        println!(
            "  seed {seed}: {} ({names:?})",
            if ok { "ok" } else { "off" }
        );
        if ok {
            consistent += 1;
        }
    }
    println!("  consistent seeds: {consistent}/10");
    assert!(consistent > 5, "only {consistent}/10 seeds consistent");
    pass(10, "Asia order relations hold for most seeds");
}

/// The scoring example from the metric definitions, kept here so the
/// acceptance binary exercises the metric helpers directly.
#[test]
fn metric_helpers_sanity() {
    assert_eq!(
        pairwise_rate(&[0, 2, 1, 3], &[0, 1, 2, 3]).unwrap(),
        5.0 / 6.0
    );
    let cfg = GenConfig::sampled(4, 120, 9, Confounding::None, 0.2);
    let (data, truth) = generate(&cfg).unwrap();
    let result = discover_order(&data, EstimatorKind::Mdl).unwrap();
    assert_eq!(result.order.len(), truth.len());
    let est = estimate_mi(
        &count_joint(data.column(0), &[data.column(1)]).unwrap(),
        EstimatorKind::Mdl,
    )
    .unwrap();
    assert!(est.value >= 0.0);
    let ds: &BinaryDataset = &data;
    assert_eq!(ds.p(), 4);
}

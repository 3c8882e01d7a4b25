//! Causal order search over the subset lattice.
//!
//! A causal order is a path from the full variable set down to the empty
//! set, removing one variable (the next cause) per step. Each edge is
//! weighted by the estimated mutual information between the removed
//! variable's residual and the joint residuals of the variables that
//! remain, so the weight of a whole path estimates the total mutual
//! information of the noises under that order. [`discover_order`] runs a
//! best-first (Dijkstra) search for the cheapest path; [`greedy_order`]
//! is the conventional staged baseline that commits the locally most
//! independent variable at every stage and never backtracks.
//!
//! Edge weights are nonnegative, so nodes close in nondecreasing distance
//! order and the first closure of the bottom node yields the global
//! minimum. Ties in the open set are resolved deterministically: deeper
//! nodes first, then the lexicographically earliest removal sequence.
//! When a node is reached more cheaply through a new parent, its distance,
//! path and residual table are all replaced from that parent, which keeps
//! every stored residual table equal to the sequential residual chain of
//! the stored path.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use itertools::Itertools;
use ordered_float::NotNan;
use thiserror::Error;

use crate::bitdata::{BinaryDataset, BitColumn, VariableSubset};
use crate::estimator::{count_joint, estimate_mi, EstimatorError, EstimatorKind};
use crate::residue::{child_table_with, MiCounters, ResidualTable, ResidueError};

/// Default cap on the variable count for lattice searches; the lattice has
/// `2^p` nodes in the worst case.
pub const DEFAULT_P_MAX: usize = 20;

/// Cap for [`brute_force_min`], which enumerates all `p!` orders.
pub const BRUTE_FORCE_P_MAX: usize = 8;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{p} variables exceeds the limit of {max}")]
    TooManyVariables { p: usize, max: usize },
    #[error("order is not a permutation of 0..{p}")]
    InvalidPermutation { p: usize },
    #[error("cannot expand a subset of size {size}")]
    SubsetTooSmall { size: usize },
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// One traversed lattice edge: the subset it left, the variable removed,
/// and the estimated weight in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightRecord {
    pub subset: VariableSubset,
    pub chosen: usize,
    pub weight: f64,
}

/// Outcome of an order search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Discovered causal order, cause first.
    pub order: Vec<usize>,
    /// Total penalized cost in nats; equals the sum of `edge_weights`.
    pub total: f64,
    /// The edges of the returned path, top to bottom. The last entry is the
    /// free singleton-to-bottom edge with weight zero.
    pub edge_weights: Vec<EdgeWeightRecord>,
    /// Edge-weight estimations performed (singleton-to-bottom edges excluded).
    pub mi_edge_calls: u64,
    /// Coefficient-selection estimations performed while residualizing.
    pub mi_coef_calls: u64,
    pub estimator: EstimatorKind,
}

/// Weighs the edge that removes `chosen` from the node with the given
/// residual table. Returns the weight and the child's residual table so
/// callers can descend without recomputing it.
pub fn edge_weight(
    table: &ResidualTable,
    chosen: usize,
    kind: EstimatorKind,
) -> Result<(f64, ResidualTable), SearchError> {
    edge_weight_with(table, chosen, kind, &mut MiCounters::default())
}

pub fn edge_weight_with(
    table: &ResidualTable,
    chosen: usize,
    kind: EstimatorKind,
    counters: &mut MiCounters,
) -> Result<(f64, ResidualTable), SearchError> {
    let size = table.subset().len();
    if size < 2 {
        return Err(SearchError::SubsetTooSmall { size });
    }
    let child = child_table_with(table, chosen, kind, counters)?;
    let u = table
        .column(chosen)
        .expect("chosen variable verified in subset");
    let vs: Vec<&BitColumn> = child.iter().map(|(_, c)| c).collect();
    let joint = count_joint(u, &vs)?;
    let est = estimate_mi(&joint, kind)?;
    counters.edge_calls += 1;
    Ok((est.value, child))
}

struct NodeState {
    d: f64,
    path: Vec<usize>,
    weights: Vec<f64>,
    residuals: Option<ResidualTable>,
    closed: bool,
}

/// Heap key: distance, then subset size (deeper first), then the removal
/// sequence. The removal sequence pins a unique node, so no further
/// component is needed.
type HeapKey = (NotNan<f64>, u32, Vec<usize>);

fn validate_search_input(
    data: &BinaryDataset,
    kind: EstimatorKind,
    p_max: usize,
) -> Result<(), SearchError> {
    let p = data.p();
    // Subset masks hold at most 63 variables, whatever the caller allows.
    let cap = p_max.min(63);
    if p > cap {
        return Err(SearchError::TooManyVariables { p, max: cap });
    }
    if kind == EstimatorKind::Mdl && data.n() < 2 {
        return Err(SearchError::Estimator(EstimatorError::TooFewSamples {
            n: data.n() as u64,
            min: 2,
        }));
    }
    Ok(())
}

/// Best-first search for the causal order with minimal estimated total
/// mutual information. Residues and edge weights are computed lazily, only
/// when a node is actually expanded.
pub fn discover_order(
    data: &BinaryDataset,
    kind: EstimatorKind,
) -> Result<SearchResult, SearchError> {
    discover_order_with_limit(data, kind, DEFAULT_P_MAX)
}

pub fn discover_order_with_limit(
    data: &BinaryDataset,
    kind: EstimatorKind,
    p_max: usize,
) -> Result<SearchResult, SearchError> {
    validate_search_input(data, kind, p_max)?;
    let p = data.p();
    let full = VariableSubset::full(p);

    let mut counters = MiCounters::default();
    let mut nodes: HashMap<u64, NodeState> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(HeapKey, u64)>> = BinaryHeap::new();

    nodes.insert(
        full.mask(),
        NodeState {
            d: 0.0,
            path: Vec::new(),
            weights: Vec::new(),
            residuals: Some(ResidualTable::from_dataset(data)),
            closed: false,
        },
    );
    heap.push(Reverse((
        (NotNan::new(0.0).unwrap(), p as u32, Vec::new()),
        full.mask(),
    )));

    let mut last_closed_d = 0.0f64;
    while let Some(Reverse(((d, _, _), mask))) = heap.pop() {
        let d = d.into_inner();
        {
            let node = nodes.get(&mask).expect("heap entries have node state");
            if node.closed || d > node.d {
                continue;
            }
        }
        debug_assert!(d >= last_closed_d, "closing order must be monotone in d");
        last_closed_d = d;

        let (path, weights, residuals) = {
            let node = nodes.get_mut(&mask).unwrap();
            node.closed = true;
            (
                node.path.clone(),
                node.weights.clone(),
                node.residuals.take(),
            )
        };
        let subset = VariableSubset::from_indices((0..p).filter(|&v| mask >> v & 1 == 1));

        if mask == 0 {
            let edge_weights = path_records(full, &path, &weights);
            return Ok(SearchResult {
                order: path,
                total: d,
                edge_weights,
                mi_edge_calls: counters.edge_calls,
                mi_coef_calls: counters.coef_calls,
                estimator: kind,
            });
        }

        let table = residuals.expect("open nodes keep a residual table");
        if subset.len() == 1 {
            // Singleton-to-bottom edges weigh exactly zero; no estimation.
            let v = subset.iter().next().unwrap();
            let mut child_path = path.clone();
            child_path.push(v);
            let mut child_weights = weights.clone();
            child_weights.push(0.0);
            try_improve(
                &mut nodes,
                &mut heap,
                0,
                0,
                d,
                child_path,
                child_weights,
                ResidualTable::empty(),
            );
            continue;
        }

        for chosen in subset.iter() {
            let (w, child) = edge_weight_with(&table, chosen, kind, &mut counters)?;
            let child_mask = mask & !(1u64 << chosen);
            let mut child_path = path.clone();
            child_path.push(chosen);
            let mut child_weights = weights.clone();
            child_weights.push(w);
            try_improve(
                &mut nodes,
                &mut heap,
                child_mask,
                subset.len() as u32 - 1,
                d + w,
                child_path,
                child_weights,
                child,
            );
        }
    }
    unreachable!("the bottom node is always reachable")
}

#[allow(clippy::too_many_arguments)]
fn try_improve(
    nodes: &mut HashMap<u64, NodeState>,
    heap: &mut BinaryHeap<Reverse<(HeapKey, u64)>>,
    mask: u64,
    size: u32,
    d: f64,
    path: Vec<usize>,
    weights: Vec<f64>,
    residuals: ResidualTable,
) {
    let improved = !matches!(nodes.get(&mask), Some(node) if node.closed || d >= node.d);
    if !improved {
        return;
    }
    heap.push(Reverse((
        (NotNan::new(d).expect("finite weight"), size, path.clone()),
        mask,
    )));
    nodes.insert(
        mask,
        NodeState {
            d,
            path,
            weights,
            residuals: Some(residuals),
            closed: false,
        },
    );
}

fn path_records(full: VariableSubset, order: &[usize], weights: &[f64]) -> Vec<EdgeWeightRecord> {
    let mut current = full;
    order
        .iter()
        .zip(weights)
        .map(|(&chosen, &weight)| {
            let rec = EdgeWeightRecord {
                subset: current,
                chosen,
                weight,
            };
            current = current.without(chosen);
            rec
        })
        .collect()
}

/// Staged baseline: at each stage, weigh every remaining variable from the
/// current residual table and commit the minimizer (smallest index on
/// ties). Always performs `p + (p-1) + … + 2` edge estimations.
pub fn greedy_order(
    data: &BinaryDataset,
    kind: EstimatorKind,
) -> Result<SearchResult, SearchError> {
    greedy_order_with_limit(data, kind, DEFAULT_P_MAX)
}

pub fn greedy_order_with_limit(
    data: &BinaryDataset,
    kind: EstimatorKind,
    p_max: usize,
) -> Result<SearchResult, SearchError> {
    validate_search_input(data, kind, p_max)?;
    let p = data.p();
    let mut counters = MiCounters::default();
    let mut table = ResidualTable::from_dataset(data);
    let mut order = Vec::with_capacity(p);
    let mut weights = Vec::with_capacity(p);
    let mut total = 0.0f64;

    while table.subset().len() >= 2 {
        let mut best: Option<(usize, f64, ResidualTable)> = None;
        for chosen in table.subset().iter() {
            let (w, child) = edge_weight_with(&table, chosen, kind, &mut counters)?;
            if best.as_ref().is_none_or(|(_, bw, _)| w < *bw) {
                best = Some((chosen, w, child));
            }
        }
        let (chosen, w, child) = best.expect("subset has at least two members");
        order.push(chosen);
        weights.push(w);
        total += w;
        table = child;
    }
    let last = table.subset().iter().next().expect("one variable remains");
    order.push(last);
    weights.push(0.0);

    let edge_weights = path_records(VariableSubset::full(p), &order, &weights);
    Ok(SearchResult {
        order,
        total,
        edge_weights,
        mi_edge_calls: counters.edge_calls,
        mi_coef_calls: counters.coef_calls,
        estimator: kind,
    })
}

fn validate_permutation(order: &[usize], p: usize) -> Result<(), SearchError> {
    if order.len() != p {
        return Err(SearchError::InvalidPermutation { p });
    }
    let mut seen = vec![false; p];
    for &v in order {
        if v >= p || seen[v] {
            return Err(SearchError::InvalidPermutation { p });
        }
        seen[v] = true;
    }
    Ok(())
}

/// Cost of exactly this order: walks the sequential residual chain for the
/// given permutation, sharing nothing with any other order, and sums the
/// edge weights. Deterministic, so it doubles as an independent check of a
/// search result's reported total.
pub fn oracle_path_cost(
    data: &BinaryDataset,
    order: &[usize],
    kind: EstimatorKind,
) -> Result<f64, SearchError> {
    validate_permutation(order, data.p())?;
    let mut counters = MiCounters::default();
    let mut table = ResidualTable::from_dataset(data);
    let mut total = 0.0f64;
    for &chosen in order {
        if table.subset().len() >= 2 {
            let (w, child) = edge_weight_with(&table, chosen, kind, &mut counters)?;
            total += w;
            table = child;
        }
    }
    Ok(total)
}

/// Exhaustively evaluates all `p!` orders with [`oracle_path_cost`] and
/// returns the cheapest (lexicographically smallest order on ties).
pub fn brute_force_min(
    data: &BinaryDataset,
    kind: EstimatorKind,
) -> Result<(Vec<usize>, f64), SearchError> {
    let p = data.p();
    if p > BRUTE_FORCE_P_MAX {
        return Err(SearchError::TooManyVariables {
            p,
            max: BRUTE_FORCE_P_MAX,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in (0..p).permutations(p) {
        let cost = oracle_path_cost(data, &perm, kind)?;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((perm, cost));
        }
    }
    Ok(best.expect("p >= 2 yields at least two orders"))
}

/// Checks whether every lattice node gets the same residual table no matter
/// which path reaches it, by walking all `p!` removal sequences. Only
/// feasible for small p; the result qualifies when a search total can be
/// compared against [`brute_force_min`] exactly.
pub fn residuals_path_independent(
    data: &BinaryDataset,
    kind: EstimatorKind,
) -> Result<bool, SearchError> {
    let p = data.p();
    if p > BRUTE_FORCE_P_MAX {
        return Err(SearchError::TooManyVariables {
            p,
            max: BRUTE_FORCE_P_MAX,
        });
    }
    let mut seen: HashMap<u64, ResidualTable> = HashMap::new();
    for perm in (0..p).permutations(p) {
        let mut table = ResidualTable::from_dataset(data);
        for &chosen in &perm {
            if table.subset().len() < 2 {
                break;
            }
            let child = child_table_with(&table, chosen, kind, &mut MiCounters::default())?;
            match seen.get(&child.subset().mask()) {
                Some(existing) => {
                    if *existing != child {
                        return Ok(false);
                    }
                }
                None => {
                    seen.insert(child.subset().mask(), child.clone());
                }
            }
            table = child;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::residue::residualize;

    const TOL: f64 = 1e-9;

    fn col(bits: &[u8]) -> BitColumn {
        bits.iter().map(|&b| b == 1).collect()
    }

    fn dataset(cols: Vec<BitColumn>) -> BinaryDataset {
        let names = (0..cols.len()).map(|i| format!("X{}", i + 1)).collect();
        BinaryDataset::new(names, cols).unwrap()
    }

    fn random_chain(p: usize, n: usize, probs: &[f64], seed: u64) -> BinaryDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut prefix = crate::bitdata::BitColumn::zeros(n);
        let mut cols = Vec::with_capacity(p);
        for &prob in &probs[..p] {
            let noise: BitColumn = (0..n).map(|_| rng.random_bool(prob)).collect();
            let x = prefix.xor(&noise).unwrap();
            prefix = prefix.xor(&x).unwrap();
            cols.push(x);
        }
        dataset(cols)
    }

    #[test]
    fn two_independent_variables_both_edges_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 800;
        let x: BitColumn = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let y: BitColumn = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let data = dataset(vec![x, y]);
        let table = ResidualTable::from_dataset(&data);
        let (w0, _) = edge_weight(&table, 0, EstimatorKind::Mdl).unwrap();
        let (w1, _) = edge_weight(&table, 1, EstimatorKind::Mdl).unwrap();
        assert_eq!(w0, 0.0);
        assert_eq!(w1, 0.0);

        let result = discover_order(&data, EstimatorKind::Mdl).unwrap();
        assert_eq!(result.mi_edge_calls, 2);
        assert_eq!(result.total, 0.0);
    }

    #[test]
    fn first_expansion_weight_matches_manual_composition() {
        let probs = [0.5, 0.2, 0.3];
        let data = random_chain(3, 400, &probs, 6);
        let kind = EstimatorKind::Plugin;
        let table = ResidualTable::from_dataset(&data);
        let (w, child) = edge_weight(&table, 0, kind).unwrap();

        let x = data.column(0);
        let y_x = residualize(data.column(1), x, kind).unwrap();
        let z_x = residualize(data.column(2), x, kind).unwrap();
        let joint = count_joint(x, &[&y_x, &z_x]).unwrap();
        let expected = estimate_mi(&joint, kind).unwrap().value;
        assert_abs_diff_eq!(w, expected, epsilon = TOL);
        assert_eq!(child.column(1).unwrap(), &y_x);
        assert_eq!(child.column(2).unwrap(), &z_x);
    }

    #[test]
    fn true_cause_weighs_less_than_effect() {
        let probs = [0.5, 0.1, 0.2];
        let data = random_chain(3, 1000, &probs, 8);
        let table = ResidualTable::from_dataset(&data);
        let (w_cause, _) = edge_weight(&table, 0, EstimatorKind::Plugin).unwrap();
        let (w_effect, _) = edge_weight(&table, 2, EstimatorKind::Plugin).unwrap();
        assert!(w_cause < w_effect, "cause {w_cause} vs effect {w_effect}");
    }

    #[test]
    fn edge_weight_rejects_singletons_and_foreign_variables() {
        let data = dataset(vec![col(&[0, 1, 0, 1]), col(&[0, 0, 1, 1])]);
        let top = ResidualTable::from_dataset(&data);
        let (_, child) = edge_weight(&top, 0, EstimatorKind::Plugin).unwrap();
        assert!(matches!(
            edge_weight(&child, 1, EstimatorKind::Plugin),
            Err(SearchError::SubsetTooSmall { size: 1 })
        ));
        assert!(matches!(
            edge_weight(&top, 5, EstimatorKind::Plugin),
            Err(SearchError::Residue(ResidueError::NotInSubset {
                variable: 5
            }))
        ));
    }

    #[test]
    fn totals_are_self_consistent() {
        for seed in 0..6u64 {
            let probs = [0.3, 0.7, 0.2, 0.6];
            let data = random_chain(4, 300, &probs, seed);
            for kind in [EstimatorKind::Plugin, EstimatorKind::Mdl] {
                let result = discover_order(&data, kind).unwrap();
                let oracle = oracle_path_cost(&data, &result.order, kind).unwrap();
                assert_abs_diff_eq!(result.total, oracle, epsilon = TOL);
                let sum: f64 = result.edge_weights.iter().map(|e| e.weight).sum();
                assert_abs_diff_eq!(result.total, sum, epsilon = TOL);
                assert_eq!(result.edge_weights.len(), 4);
                assert_eq!(result.edge_weights.last().unwrap().weight, 0.0);
            }
        }
    }

    #[test]
    fn chain_p6_n1000_uses_twenty_estimations() {
        let probs = [0.3, 0.2, 0.7, 0.8, 0.3, 0.2];
        let data = random_chain(6, 1000, &probs, 4);
        let result = discover_order(&data, EstimatorKind::Mdl).unwrap();
        assert_eq!(result.mi_edge_calls, 20);
        assert_eq!(result.order, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn noiseless_chain_brute_force_cost_zero() {
        let x = col(&[0, 1, 0, 1, 1, 0, 0, 1]);
        let y = x.clone();
        let z = BitColumn::zeros(8);
        let data = dataset(vec![x, y, z]);
        let (order, cost) = brute_force_min(&data, EstimatorKind::Mdl).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn brute_force_is_minimal_over_enumeration() {
        let probs = [0.4, 0.2, 0.6, 0.3];
        let data = random_chain(4, 200, &probs, 12);
        let kind = EstimatorKind::Plugin;
        let (_, min_cost) = brute_force_min(&data, kind).unwrap();
        for perm in (0..4).permutations(4) {
            let cost = oracle_path_cost(&data, &perm, kind).unwrap();
            assert!(min_cost <= cost + TOL);
        }
    }

    #[test]
    fn dependent_pair_orients_toward_more_independent_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let n = 2000;
        // Cause far from fair so the direction is identifiable.
        let x: BitColumn = (0..n).map(|_| rng.random_bool(0.8)).collect();
        let e: BitColumn = (0..n).map(|_| rng.random_bool(0.3)).collect();
        let y = x.xor(&e).unwrap();
        let data = dataset(vec![x, y]);
        let kind = EstimatorKind::Plugin;
        let forward = oracle_path_cost(&data, &[0, 1], kind).unwrap();
        let backward = oracle_path_cost(&data, &[1, 0], kind).unwrap();
        assert!(forward < backward);
        let (order, _) = brute_force_min(&data, kind).unwrap();
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn greedy_on_two_variables_matches_search() {
        let probs = [0.3, 0.2];
        let data = random_chain(2, 500, &probs, 19);
        for kind in [EstimatorKind::Plugin, EstimatorKind::Mdl] {
            let sp = discover_order(&data, kind).unwrap();
            let gr = greedy_order(&data, kind).unwrap();
            assert_eq!(sp.order, gr.order);
            assert_abs_diff_eq!(sp.total, gr.total, epsilon = TOL);
        }
    }

    #[test]
    fn greedy_call_count_is_fixed() {
        for p in [2usize, 4, 6] {
            let probs: Vec<f64> = (0..p).map(|i| [0.2, 0.7, 0.4][i % 3]).collect();
            let data = random_chain(p, 300, &probs, 23);
            let gr = greedy_order(&data, EstimatorKind::Mdl).unwrap();
            assert_eq!(gr.mi_edge_calls as usize, p * (p + 1) / 2 - 1);
            assert_eq!(gr.order.len(), p);
        }
    }

    #[test]
    fn greedy_total_not_below_search_total() {
        for seed in 0..8u64 {
            let probs = [0.2, 0.8, 0.3, 0.6, 0.4];
            let data = random_chain(5, 400, &probs, 100 + seed);
            for kind in [EstimatorKind::Plugin, EstimatorKind::Mdl] {
                let sp = discover_order(&data, kind).unwrap();
                let gr = greedy_order(&data, kind).unwrap();
                let sp_cost = oracle_path_cost(&data, &sp.order, kind).unwrap();
                let gr_cost = oracle_path_cost(&data, &gr.order, kind).unwrap();
                assert!(
                    sp_cost <= gr_cost + TOL,
                    "seed {seed}: search {sp_cost} vs greedy {gr_cost}"
                );
            }
        }
    }

    #[test]
    fn relabeling_maps_the_result() {
        // Strong, well-separated dependencies so every comparison is strict.
        let probs = [0.8, 0.1, 0.9];
        let data = random_chain(3, 2000, &probs, 31);
        let kind = EstimatorKind::Plugin;
        let base = discover_order(&data, kind).unwrap();

        let perm = [2usize, 0, 1]; // new index of old variable i
        let mut new_cols = vec![BitColumn::zeros(0); 3];
        let mut new_names = vec![String::new(); 3];
        for old in 0..3 {
            new_cols[perm[old]] = data.column(old).clone();
            new_names[perm[old]] = data.name(old).to_string();
        }
        let relabeled = BinaryDataset::new(new_names, new_cols).unwrap();
        let mapped = discover_order(&relabeled, kind).unwrap();
        let expected: Vec<usize> = base.order.iter().map(|&v| perm[v]).collect();
        assert_eq!(mapped.order, expected);
        assert_abs_diff_eq!(mapped.total, base.total, epsilon = TOL);
    }

    #[test]
    fn p_max_guard_enforced() {
        let data = random_chain(4, 100, &[0.3, 0.4, 0.6, 0.7], 1);
        assert!(matches!(
            discover_order_with_limit(&data, EstimatorKind::Mdl, 3),
            Err(SearchError::TooManyVariables { p: 4, max: 3 })
        ));

        // Raising the limit cannot exceed the 63-variable mask capacity.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let wide = BinaryDataset::new(
            (0..64).map(|i| format!("V{i}")).collect(),
            (0..64)
                .map(|_| (0..8).map(|_| rng.random_bool(0.5)).collect())
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            discover_order_with_limit(&wide, EstimatorKind::Mdl, 100),
            Err(SearchError::TooManyVariables { p: 64, max: 63 })
        ));
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        let data = random_chain(3, 100, &[0.3, 0.4, 0.6], 2);
        for bad in [vec![0usize, 1], vec![0, 1, 1], vec![0, 1, 3]] {
            assert!(matches!(
                oracle_path_cost(&data, &bad, EstimatorKind::Mdl),
                Err(SearchError::InvalidPermutation { p: 3 })
            ));
        }
    }

    #[test]
    fn path_independence_check_agrees_with_optimality() {
        let mut independent = 0;
        for seed in 0..10u64 {
            let probs = [0.2, 0.7, 0.4];
            let data = random_chain(3, 250, &probs, 40 + seed);
            let kind = EstimatorKind::Mdl;
            if residuals_path_independent(&data, kind).unwrap() {
                independent += 1;
                let sp = discover_order(&data, kind).unwrap();
                let (_, best) = brute_force_min(&data, kind).unwrap();
                assert_eq!(sp.total, best, "seed {seed}");
            }
        }
        assert!(
            independent > 0,
            "no path-independent instance in the sample"
        );
    }
}

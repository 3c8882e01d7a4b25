//! XOR residualization with data-driven coefficient selection.
//!
//! Removing a cause from a target column means either leaving the target
//! alone or XOR-ing the cause into it; the coefficient is whichever of the
//! two candidates leaves the residual closer to independence from the
//! regressor, measured with the configured estimator.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitdata::{BinaryDataset, BitColumn, DataError, VariableSubset};
use crate::estimator::{count_joint, estimate_mi, EstimatorError, EstimatorKind};

#[derive(Debug, Error)]
pub enum ResidueError {
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("variable {variable} is not in the subset")]
    NotInSubset { variable: usize },
}

/// Instrumentation counters for mutual information estimations.
/// Edge-weight estimations and coefficient-selection estimations are
/// tracked separately; only the former appear in reported call counts.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct MiCounters {
    pub edge_calls: u64,
    pub coef_calls: u64,
}

/// The residual columns at one lattice node: one column per variable still
/// in the subset, each of the dataset's full length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualTable {
    subset: VariableSubset,
    residuals: BTreeMap<usize, BitColumn>,
}

impl ResidualTable {
    /// The lattice top: every variable present, columns taken as-is.
    pub fn from_dataset(data: &BinaryDataset) -> Self {
        let residuals = (0..data.p()).map(|v| (v, data.column(v).clone())).collect();
        ResidualTable {
            subset: VariableSubset::full(data.p()),
            residuals,
        }
    }

    pub fn empty() -> Self {
        ResidualTable {
            subset: VariableSubset::EMPTY,
            residuals: BTreeMap::new(),
        }
    }

    pub fn subset(&self) -> VariableSubset {
        self.subset
    }

    pub fn column(&self, v: usize) -> Option<&BitColumn> {
        self.residuals.get(&v)
    }

    /// Residual columns in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BitColumn)> {
        self.residuals.iter().map(|(&v, c)| (v, c))
    }
}

/// Picks the XOR coefficient `a ∈ {0,1}` minimizing the estimated mutual
/// information between the regressor and `target ⊕ a·regressor`. Ties
/// return 0, so no edge is asserted when the two candidates are equally
/// independent.
pub fn select_coefficient(
    target: &BitColumn,
    regressor: &BitColumn,
    kind: EstimatorKind,
) -> Result<u8, ResidueError> {
    select_coefficient_with(target, regressor, kind, &mut MiCounters::default())
}

pub fn select_coefficient_with(
    target: &BitColumn,
    regressor: &BitColumn,
    kind: EstimatorKind,
    counters: &mut MiCounters,
) -> Result<u8, ResidueError> {
    let keep = count_joint(regressor, &[target])?;
    let mi_keep = estimate_mi(&keep, kind)?;
    let flipped_col = target.xor(regressor)?;
    let flip = count_joint(regressor, &[&flipped_col])?;
    let mi_flip = estimate_mi(&flip, kind)?;
    counters.coef_calls += 2;
    Ok(u8::from(mi_flip.value < mi_keep.value))
}

/// Removes the regressor's contribution from the target:
/// `target ⊕ a·regressor` with `a` from [`select_coefficient`].
pub fn residualize(
    target: &BitColumn,
    regressor: &BitColumn,
    kind: EstimatorKind,
) -> Result<BitColumn, ResidueError> {
    residualize_with(target, regressor, kind, &mut MiCounters::default())
}

pub fn residualize_with(
    target: &BitColumn,
    regressor: &BitColumn,
    kind: EstimatorKind,
    counters: &mut MiCounters,
) -> Result<BitColumn, ResidueError> {
    let a = select_coefficient_with(target, regressor, kind, counters)?;
    if a == 1 {
        Ok(target.xor(regressor)?)
    } else {
        Ok(target.clone())
    }
}

/// Descends one lattice edge: drops `chosen` from the subset and
/// residualizes every remaining column against the chosen one.
pub fn child_table(
    parent: &ResidualTable,
    chosen: usize,
    kind: EstimatorKind,
) -> Result<ResidualTable, ResidueError> {
    child_table_with(parent, chosen, kind, &mut MiCounters::default())
}

pub fn child_table_with(
    parent: &ResidualTable,
    chosen: usize,
    kind: EstimatorKind,
    counters: &mut MiCounters,
) -> Result<ResidualTable, ResidueError> {
    if !parent.subset.contains(chosen) {
        return Err(ResidueError::NotInSubset { variable: chosen });
    }
    let regressor = parent
        .residuals
        .get(&chosen)
        .expect("subset and residual keys stay in sync");
    let mut residuals = BTreeMap::new();
    for (&v, col) in &parent.residuals {
        if v == chosen {
            continue;
        }
        residuals.insert(v, residualize_with(col, regressor, kind, counters)?);
    }
    Ok(ResidualTable {
        subset: parent.subset.without(chosen),
        residuals,
    })
}

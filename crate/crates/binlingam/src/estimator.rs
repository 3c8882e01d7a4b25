//! Contingency counting and mutual information estimation.
//!
//! Two estimators are provided for the mutual information between one
//! binary variable and the joint pattern of q binary variables:
//!
//! * the plug-in estimate computed from empirical cell frequencies, which
//!   is nonnegative but overshoots under independence, and
//! * an MDL-penalized estimate that subtracts `(2^q - 1) · ln(n) / (2n)`
//!   from the plug-in value and floors the result at zero, so that
//!   independent pairs are estimated as exactly zero for large n.
//!
//! All values are in nats. Cell terms with zero counts contribute zero
//! (the `0·ln 0 := 0` convention), and cells are summed in a fixed order
//! (ascending joint symbol, then the binary value) so estimates are
//! reproducible across runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitdata::BitColumn;

/// Largest supported joint arity; the table for arity q has `2^(q+1)` cells.
pub const Q_MAX: u32 = 23;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("joint arity {q} outside supported range 1..={max}")]
    JointArity { q: u32, max: u32 },
    #[error("need at least {min} samples, have {n}")]
    TooFewSamples { n: u64, min: u64 },
    #[error("column lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Which mutual information estimate drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Plugin,
    Mdl,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorKind::Plugin => write!(f, "plugin"),
            EstimatorKind::Mdl => write!(f, "mdl"),
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "plugin" => Ok(EstimatorKind::Plugin),
            "mdl" => Ok(EstimatorKind::Mdl),
            other => Err(format!(
                "unknown estimator {other:?} (expected plugin or mdl)"
            )),
        }
    }
}

/// Joint counts of one binary variable U against the joint pattern of q
/// binary variables V. `count(b, s)` is the number of rows with `U = b`
/// and joint symbol `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// Indexed by `(s << 1) | b`.
    counts: Vec<u64>,
    n: u64,
    q: u32,
}

impl ContingencyTable {
    /// Builds a table directly from two count rows, `row0[s] = count(0, s)`
    /// and `row1[s] = count(1, s)`. Row lengths must be a power of two.
    pub fn from_rows(row0: &[u64], row1: &[u64]) -> Result<Self, EstimatorError> {
        let cells = row0.len();
        if cells != row1.len() {
            return Err(EstimatorError::LengthMismatch {
                left: cells,
                right: row1.len(),
            });
        }
        if !cells.is_power_of_two() || cells < 2 {
            return Err(EstimatorError::JointArity { q: 0, max: Q_MAX });
        }
        let q = cells.trailing_zeros();
        if q > Q_MAX {
            return Err(EstimatorError::JointArity { q, max: Q_MAX });
        }
        let mut counts = vec![0u64; cells << 1];
        let mut n = 0u64;
        for s in 0..cells {
            counts[s << 1] = row0[s];
            counts[(s << 1) | 1] = row1[s];
            n += row0[s] + row1[s];
        }
        if n == 0 {
            return Err(EstimatorError::TooFewSamples { n: 0, min: 1 });
        }
        Ok(ContingencyTable { counts, n, q })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn count(&self, b: u8, s: u64) -> u64 {
        self.counts[((s << 1) | u64::from(b)) as usize]
    }
}

/// Counts the joint distribution of `u` against the joint pattern of `vs`.
/// The joint symbol is little-endian by list position, so callers must pass
/// `vs` sorted by variable index to get reproducible tables.
pub fn count_joint(u: &BitColumn, vs: &[&BitColumn]) -> Result<ContingencyTable, EstimatorError> {
    let q = vs.len() as u32;
    if !(1..=Q_MAX).contains(&q) {
        return Err(EstimatorError::JointArity { q, max: Q_MAX });
    }
    let n = u.len();
    if n == 0 {
        return Err(EstimatorError::TooFewSamples { n: 0, min: 1 });
    }
    for v in vs {
        if v.len() != n {
            return Err(EstimatorError::LengthMismatch {
                left: n,
                right: v.len(),
            });
        }
    }

    let mut counts = vec![0u64; 1usize << (q + 1)];
    let uw = u.words();
    for (w, &uword) in uw.iter().enumerate() {
        let base = w * 64;
        let rows = (n - base).min(64);
        for r in 0..rows {
            let b = (uword >> r) & 1;
            let mut sym = 0u64;
            for (k, v) in vs.iter().enumerate() {
                sym |= ((v.words()[w] >> r) & 1) << k;
            }
            counts[((sym << 1) | b) as usize] += 1;
        }
    }
    Ok(ContingencyTable {
        counts,
        n: n as u64,
        q,
    })
}

/// A mutual information estimate together with the penalty that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MIEstimate {
    /// Final estimate in nats; always ≥ 0.
    pub value: f64,
    /// The plug-in estimate before any penalty.
    pub raw_plugin: f64,
    /// Penalty subtracted from the plug-in value (zero for the plug-in kind).
    pub penalty: f64,
    pub kind: EstimatorKind,
}

/// Plug-in mutual information from empirical frequencies:
/// `Σ (c_uv/n) · ln((c_uv/n) / ((c_u/n)(c_v/n)))` over the table cells.
pub fn plugin_mi(table: &ContingencyTable) -> MIEstimate {
    let n = table.n as f64;
    let cells = 1usize << table.q;
    let mut marg_u = [0u64; 2];
    let mut marg_v = vec![0u64; cells];
    for (s, mv) in marg_v.iter_mut().enumerate() {
        for b in 0..2u8 {
            let c = table.count(b, s as u64);
            marg_u[b as usize] += c;
            *mv += c;
        }
    }

    let mut sum = 0.0f64;
    for (s, &mv) in marg_v.iter().enumerate() {
        for b in 0..2u8 {
            let c = table.count(b, s as u64);
            if c == 0 {
                continue;
            }
            let c = c as f64;
            let denom = marg_u[b as usize] as f64 * mv as f64;
            sum += (c / n) * ((c * n) / denom).ln();
        }
    }
    // Clamp away negative rounding residue; the exact sum is ≥ 0.
    let value = sum.max(0.0);
    MIEstimate {
        value,
        raw_plugin: value,
        penalty: 0.0,
        kind: EstimatorKind::Plugin,
    }
}

/// The MDL penalty `(2^q - 1) · ln(n) / (2n)` for one binary variable
/// against a q-variable joint alphabet.
pub fn mdl_penalty(q: u32, n: u64) -> Result<f64, EstimatorError> {
    if !(1..=Q_MAX).contains(&q) {
        return Err(EstimatorError::JointArity { q, max: Q_MAX });
    }
    if n < 2 {
        return Err(EstimatorError::TooFewSamples { n, min: 2 });
    }
    let beta_minus_one = ((1u64 << q) - 1) as f64;
    let n = n as f64;
    Ok(beta_minus_one * n.ln() / (2.0 * n))
}

/// MDL-penalized mutual information: `max(0, plugin - penalty)`.
pub fn penalized_mi(table: &ContingencyTable) -> Result<MIEstimate, EstimatorError> {
    let raw = plugin_mi(table);
    let penalty = mdl_penalty(table.q, table.n)?;
    Ok(MIEstimate {
        value: (raw.value - penalty).max(0.0),
        raw_plugin: raw.value,
        penalty,
        kind: EstimatorKind::Mdl,
    })
}

pub fn estimate_mi(
    table: &ContingencyTable,
    kind: EstimatorKind,
) -> Result<MIEstimate, EstimatorError> {
    match kind {
        EstimatorKind::Plugin => Ok(plugin_mi(table)),
        EstimatorKind::Mdl => penalized_mi(table),
    }
}

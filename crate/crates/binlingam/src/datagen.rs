//! Seeded synthetic data: XOR chains, confounder injection, and an
//! ancestral sampler for the eight-variable Asia network.
//!
//! Everything here is a pure function of its configuration and seed.
//! Distinct sampling purposes draw from distinct ChaCha streams of the
//! same seed, so adding or removing one stage never shifts the draws of
//! another. Benchmark trials derive per-trial seeds with [`derive_seed`],
//! which lets trials run in parallel with disjoint streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitdata::{BinaryDataset, BitColumn, DataError, VariableSubset};

/// Per-variable noise probabilities are drawn uniformly from this grid.
pub const NOISE_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Column names produced by [`sample_asia`], in sampling order.
pub const ASIA_NAMES: [&str; 8] = [
    "asia", "tub", "smoke", "lung", "bronc", "either", "xray", "dysp",
];

// Stream ids for the per-purpose ChaCha substreams.
const STREAM_NOISE_PROBS: u64 = 0;
const STREAM_CHAIN: u64 = 1;
const STREAM_LOCAL: u64 = 2;
const STREAM_GLOBAL: u64 = 3;
const STREAM_ASIA: u64 = 4;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("flip probability {0} outside [0, 1]")]
    InvalidFlipProb(f64),
    #[error("confounder set contains variable {var} but p = {p}")]
    TargetOutOfRange { var: usize, p: usize },
    #[error("confounder set is empty")]
    EmptyTargetSet,
    #[error("no default global confounder set for p = {0}; supply one explicitly")]
    NoDefaultGlobalSet(usize),
    #[error("{got} noise probabilities for p = {p} variables")]
    NoiseProbCount { got: usize, p: usize },
    #[error("need p >= 2, got {0}")]
    TooFewVariables(usize),
    #[error("need n >= 1, got {0}")]
    NoSamples(usize),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Confounder injection mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confounding {
    None,
    Local,
    Global,
}

impl std::fmt::Display for Confounding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Confounding::None => write!(f, "none"),
            Confounding::Local => write!(f, "local"),
            Confounding::Global => write!(f, "global"),
        }
    }
}

impl std::str::FromStr for Confounding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "none" => Ok(Confounding::None),
            "local" => Ok(Confounding::Local),
            "global" => Ok(Confounding::Global),
            other => Err(format!(
                "unknown confounding mode {other:?} (expected none, local or global)"
            )),
        }
    }
}

/// Configuration for one synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    /// One Bernoulli parameter per variable, from [`NOISE_GRID`].
    pub noise_probs: Vec<f64>,
    pub confounding: Confounding,
    pub flip_prob: f64,
    /// Variables hit by the global confounder; `None` uses the default for p.
    pub global_set: Option<VariableSubset>,
}

impl GenConfig {
    /// A config with noise probabilities drawn uniformly from the grid,
    /// deterministically from the seed.
    pub fn sampled(
        p: usize,
        n: usize,
        seed: u64,
        confounding: Confounding,
        flip_prob: f64,
    ) -> Self {
        let mut rng = stream_rng(seed, STREAM_NOISE_PROBS);
        let noise_probs = (0..p)
            .map(|_| NOISE_GRID[rng.random_range(0..NOISE_GRID.len())])
            .collect();
        GenConfig {
            p,
            n,
            seed,
            noise_probs,
            confounding,
            flip_prob,
            global_set: None,
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent seed from a master seed and an index
/// (SplitMix64 finalizer), for running many seeded trials off one seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn bernoulli_column(rng: &mut ChaCha8Rng, n: usize, prob: f64) -> BitColumn {
    (0..n).map(|_| rng.random_bool(prob)).collect()
}

/// Generates the unconfounded chain `X_i = X_1 ⊕ … ⊕ X_{i-1} ⊕ e_i` with
/// `e_i ~ Bernoulli(noise_probs[i])`, columns named `X1..Xp`. Returns the
/// dataset and the true causal order `0..p`.
///
/// Noise columns are drawn variable by variable, rows within a variable in
/// order, so the output is reproducible bit for bit from the seed.
pub fn generate_chain(cfg: &GenConfig) -> Result<(BinaryDataset, Vec<usize>), GenError> {
    if cfg.p < 2 {
        return Err(GenError::TooFewVariables(cfg.p));
    }
    if cfg.n < 1 {
        return Err(GenError::NoSamples(cfg.n));
    }
    if cfg.noise_probs.len() != cfg.p {
        return Err(GenError::NoiseProbCount {
            got: cfg.noise_probs.len(),
            p: cfg.p,
        });
    }
    let mut rng = stream_rng(cfg.seed, STREAM_CHAIN);
    let mut prefix = BitColumn::zeros(cfg.n);
    let mut columns = Vec::with_capacity(cfg.p);
    for i in 0..cfg.p {
        let noise = bernoulli_column(&mut rng, cfg.n, cfg.noise_probs[i]);
        let x = prefix.xor(&noise)?;
        prefix = prefix.xor(&x)?;
        columns.push(x);
    }
    let names = (0..cfg.p).map(|i| format!("X{}", i + 1)).collect();
    let data = BinaryDataset::new(names, columns)?;
    Ok((data, (0..cfg.p).collect()))
}

/// Pairwise confounder: for each pair `(X_{2i}, X_{2i+1})` (0-indexed) one
/// shared Bernoulli draw per row is XOR-ed into both members, so the two
/// perturbations are identical by construction. An odd trailing variable
/// is left untouched. Flip columns are drawn pair by pair.
pub fn inject_local(
    data: &BinaryDataset,
    flip_prob: f64,
    seed: u64,
) -> Result<BinaryDataset, GenError> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(GenError::InvalidFlipProb(flip_prob));
    }
    let mut rng = stream_rng(seed, STREAM_LOCAL);
    let mut columns: Vec<BitColumn> = data.columns().to_vec();
    let mut i = 0;
    while i + 1 < data.p() {
        let flips = bernoulli_column(&mut rng, data.n(), flip_prob);
        columns[i] = columns[i].xor(&flips)?;
        columns[i + 1] = columns[i + 1].xor(&flips)?;
        i += 2;
    }
    Ok(BinaryDataset::new(data.names().to_vec(), columns)?)
}

/// Group confounder: one shared Bernoulli draw per row is XOR-ed into every
/// column of `target_set`.
pub fn inject_global(
    data: &BinaryDataset,
    flip_prob: f64,
    target_set: VariableSubset,
    seed: u64,
) -> Result<BinaryDataset, GenError> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(GenError::InvalidFlipProb(flip_prob));
    }
    if target_set.is_empty() {
        return Err(GenError::EmptyTargetSet);
    }
    if let Some(var) = target_set.iter().find(|&v| v >= data.p()) {
        return Err(GenError::TargetOutOfRange { var, p: data.p() });
    }
    let mut rng = stream_rng(seed, STREAM_GLOBAL);
    let flips = bernoulli_column(&mut rng, data.n(), flip_prob);
    let mut columns: Vec<BitColumn> = data.columns().to_vec();
    for v in target_set.iter() {
        columns[v] = columns[v].xor(&flips)?;
    }
    Ok(BinaryDataset::new(data.names().to_vec(), columns)?)
}

/// Default global confounder targets (0-indexed): variables 1,2,3 of four,
/// 1,3,5,6 of six and 1,3,5,6,8 of eight, counting from one.
pub fn default_global_set(p: usize) -> Option<VariableSubset> {
    match p {
        4 => Some(VariableSubset::from_indices([0, 1, 2])),
        6 => Some(VariableSubset::from_indices([0, 2, 4, 5])),
        8 => Some(VariableSubset::from_indices([0, 2, 4, 5, 7])),
        _ => None,
    }
}

/// Chain generation plus the configured confounder injection.
pub fn generate(cfg: &GenConfig) -> Result<(BinaryDataset, Vec<usize>), GenError> {
    let (data, order) = generate_chain(cfg)?;
    let data = match cfg.confounding {
        Confounding::None => data,
        Confounding::Local => inject_local(&data, cfg.flip_prob, cfg.seed)?,
        Confounding::Global => {
            let target = match cfg.global_set {
                Some(s) => s,
                None => default_global_set(cfg.p).ok_or(GenError::NoDefaultGlobalSet(cfg.p))?,
            };
            inject_global(&data, cfg.flip_prob, target, cfg.seed)?
        }
    };
    Ok((data, order))
}

/// Conditional probability tables of the Asia network
/// (Lauritzen & Spiegelhalter 1988, "Local computations with probabilities
/// on graphical structures", the standard published parameterization).
/// Each entry is the probability of "yes" given the parent configuration.
mod asia_cpt {
    pub const P_ASIA: f64 = 0.01;
    /// P(tub = yes | asia), indexed by asia.
    pub const P_TUB: [f64; 2] = [0.01, 0.05];
    pub const P_SMOKE: f64 = 0.5;
    /// P(lung = yes | smoke), indexed by smoke.
    pub const P_LUNG: [f64; 2] = [0.01, 0.1];
    /// P(bronc = yes | smoke), indexed by smoke.
    pub const P_BRONC: [f64; 2] = [0.3, 0.6];
    /// P(xray = yes | either), indexed by either.
    pub const P_XRAY: [f64; 2] = [0.05, 0.98];
    /// P(dysp = yes | bronc, either), indexed by [bronc][either].
    pub const P_DYSP: [[f64; 2]; 2] = [[0.1, 0.7], [0.8, 0.9]];

    /// FNV-1a over the canonical rendering of the constants above; a unit
    /// test pins this so silent edits to the tables are caught.
    #[cfg(test)]
    pub fn checksum() -> u64 {
        let rendered =
            format!("{P_ASIA};{P_TUB:?};{P_SMOKE};{P_LUNG:?};{P_BRONC:?};{P_XRAY:?};{P_DYSP:?}");
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        for byte in rendered.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }
}

#[cfg(test)]
pub(crate) use asia_cpt::checksum as asia_cpt_checksum;

/// Ancestral sampling of the Asia network. Columns follow [`ASIA_NAMES`];
/// `either` is the deterministic OR of `tub` and `lung` and consumes no
/// random draw. Draws are row-major in that column order.
pub fn sample_asia(n: usize, seed: u64) -> Result<BinaryDataset, GenError> {
    if n < 1 {
        return Err(GenError::NoSamples(n));
    }
    use asia_cpt::*;
    let mut rng = stream_rng(seed, STREAM_ASIA);
    let mut cols: Vec<Vec<bool>> = (0..8).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let asia = rng.random_bool(P_ASIA);
        let tub = rng.random_bool(P_TUB[usize::from(asia)]);
        let smoke = rng.random_bool(P_SMOKE);
        let lung = rng.random_bool(P_LUNG[usize::from(smoke)]);
        let bronc = rng.random_bool(P_BRONC[usize::from(smoke)]);
        let either = tub || lung;
        let xray = rng.random_bool(P_XRAY[usize::from(either)]);
        let dysp = rng.random_bool(P_DYSP[usize::from(bronc)][usize::from(either)]);
        for (col, bit) in cols
            .iter_mut()
            .zip([asia, tub, smoke, lung, bronc, either, xray, dysp])
        {
            col.push(bit);
        }
    }
    let names = ASIA_NAMES.iter().map(|s| s.to_string()).collect();
    let columns = cols
        .into_iter()
        .map(|c| BitColumn::from_bools(&c))
        .collect();
    Ok(BinaryDataset::new(names, columns)?)
}

//! Dense numerics: Gaussian tensors, contraction to L, spectra and ranks.

mod contract;
mod moments;
pub mod rng;
mod spectrum;
mod tensor;

use thiserror::Error;

pub use contract::{contract_network, plan_contraction, OperatorMatrix, Plan, TensorAssignment};
pub use moments::{mc_moment, sample_operator, MomentEstimate};
pub use spectrum::{
    check_product_sv_count, chgue_baseline, cutoff, ks_distance, numerical_rank, rank_lower_bound,
    small_sv_fraction, spectrum, trace_power, Normalization, ProductSvReport, RankReport, SpectrumSample,
    Verdict, CONFIDENT_GAP, DEFAULT_REL_FLOOR,
};
pub use tensor::{complex_gaussian, kron_compose, sample_tensor, DenseTensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("SVD failed: {0}")]
    SvdFailed(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{bytes} bytes needed, memory budget is {budget} (QMFLAB_BUDGET_BYTES)")]
    MemoryBudget { bytes: u128, budget: u128 },
    #[error("operator is zero")]
    ZeroOperator,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Default cap on a single dense allocation: 2 GiB.
pub const DEFAULT_BUDGET_BYTES: u128 = 2 << 30;

/// `QMFLAB_BUDGET_BYTES`, or the default.
pub fn memory_budget() -> u128 {
    std::env::var("QMFLAB_BUDGET_BYTES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET_BYTES)
}

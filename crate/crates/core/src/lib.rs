//! Random tensor networks: min-cut analysis, exact Wick-pairing moments and
//! Monte-Carlo spectra.
//!
//! * [`netgraph`]: graphs with open edges, min cuts, graph surgery.
//! * [`wick`]: closed trace networks and exact moment polynomials in N.
//! * [`numeric`]: Gaussian tensors, contraction to the operator L, spectra,
//!   numerical rank.
//!
//! Dense code is generic over the real type `T: Real` (`f32` or `f64`); the
//! aliases below fix `f64`, which every experiment uses.

pub mod fixtures;
pub mod netgraph;
pub mod numeric;
pub mod scalar;
pub mod wick;

pub use netgraph::{GraphError, TensorNetworkGraph};
pub use numeric::NumericError;
pub use scalar::Real;
pub use wick::WickError;

pub type DenseTensor64 = numeric::DenseTensor<f64>;
pub type DenseTensor32 = numeric::DenseTensor<f32>;
pub type OperatorMatrix64 = numeric::OperatorMatrix<f64>;
pub type OperatorMatrix32 = numeric::OperatorMatrix<f32>;
pub type SpectrumSample64 = numeric::SpectrumSample<f64>;
pub type SpectrumSample32 = numeric::SpectrumSample<f32>;

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

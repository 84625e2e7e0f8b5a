use rayon::prelude::*;
use serde::Serialize;

use super::rng::{experiment_id, stream_rng, SHARED_VERTEX};
use super::spectrum::trace_power;
use super::{contract_network, sample_tensor, DenseTensor, NumericError, OperatorMatrix, TensorAssignment};
use crate::netgraph::TensorNetworkGraph;
use crate::scalar::Real;
use crate::wick::Ensemble;

/// Draws the tensors of sample `sample` and contracts them. The identical
/// ensemble uses one shared stream; the independent ensemble one stream per
/// vertex.
pub fn sample_operator<T: Real>(
    g: &TensorNetworkGraph,
    n: usize,
    ensemble: Ensemble,
    seed: u64,
    experiment: u64,
    sample: u64,
) -> Result<OperatorMatrix<T>, NumericError> {
    match ensemble {
        Ensemble::Identical => {
            let d = match g.uniform_degree() {
                Some(d) => d,
                None if g.num_vertices() == 0 => 0,
                None => {
                    return Err(NumericError::DimensionMismatch(
                        "the identical ensemble needs every vertex to have the same degree".into(),
                    ))
                }
            };
            let mut rng = stream_rng(seed, experiment, sample, SHARED_VERTEX);
            let t: DenseTensor<T> = sample_tensor(n, d, &mut rng)?;
            contract_network(g, TensorAssignment::Identical(&t), n)
        }
        Ensemble::Independent => {
            let ts = g
                .vertices()
                .iter()
                .enumerate()
                .map(|(v, vert)| sample_tensor(n, vert.degree, &mut stream_rng(seed, experiment, sample, v as u64)))
                .collect::<Result<Vec<DenseTensor<T>>, _>>()?;
            contract_network(g, TensorAssignment::Independent(&ts), n)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Sample mean and standard error of `tr((L^dagger L)^k)`. Samples run in
/// parallel and are summed in sample order, so the result depends only on
/// the arguments.
pub fn mc_moment<T: Real>(
    g: &TensorNetworkGraph,
    k: usize,
    n: usize,
    samples: usize,
    ensemble: Ensemble,
    seed: u64,
) -> Result<MomentEstimate, NumericError> {
    if samples < 2 {
        return Err(NumericError::InvalidArgument("need at least two samples".into()));
    }
    let exp = experiment_id("mc_moment");
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|s| sample_operator::<T>(g, n, ensemble, seed, exp, s).map(|l| trace_power(&l, k)))
        .collect::<Result<Vec<f64>, _>>()?;
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(MomentEstimate {
        mean,
        stderr: (var / m).sqrt(),
        samples,
    })
}

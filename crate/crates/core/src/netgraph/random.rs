//! Seeded random networks for property tests and sweeps.
//!
//! Slots are matched uniformly (configuration model), so every labelled
//! network with the requested degree and open-edge counts is equally likely,
//! slot ordering included. Samples that are not connected networks, or that
//! contain a self-loop, are rejected.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Edge, EdgeKind, Endpoint, GraphError, TensorNetworkGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomNetworkSpec {
    pub vertices: usize,
    pub degree: usize,
    pub inputs: usize,
    pub outputs: usize,
}

impl RandomNetworkSpec {
    fn check(&self) -> Result<(), GraphError> {
        let stubs = self.vertices * self.degree;
        let open = self.inputs + self.outputs;
        if open > stubs || (stubs - open) % 2 != 0 || self.vertices == 0 {
            return Err(GraphError::Validation {
                invariant: "random network stub parity",
                detail: format!(
                    "{} vertices of degree {} cannot host {} open edges",
                    self.vertices, self.degree, open
                ),
            });
        }
        Ok(())
    }
}

/// Draws a connected network; gives up after `max_tries` rejections.
pub fn random_network(
    spec: RandomNetworkSpec,
    seed: u64,
    max_tries: usize,
) -> Result<TensorNetworkGraph, GraphError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<Vertex> = (0..spec.vertices)
        .map(|i| Vertex {
            id: format!("v{i}"),
            degree: spec.degree,
        })
        .collect();
    let mut stubs: Vec<Endpoint> = (0..spec.vertices)
        .flat_map(|v| (1..=spec.degree).map(move |slot| Endpoint { vertex: v, slot }))
        .collect();
    for _ in 0..max_tries {
        stubs.shuffle(&mut rng);
        let (open, rest) = stubs.split_at(spec.inputs + spec.outputs);
        if rest.chunks(2).any(|p| p[0].vertex == p[1].vertex) {
            continue;
        }
        let mut edges = Vec::with_capacity(open.len() + rest.len() / 2);
        for (i, &end) in open.iter().enumerate() {
            let kind = if i < spec.inputs {
                EdgeKind::Input(end)
            } else {
                EdgeKind::Output(end)
            };
            edges.push(kind);
        }
        edges.extend(rest.chunks(2).map(|p| EdgeKind::Closed(p[0], p[1])));
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, kind)| Edge { id, kind })
            .collect();
        let g = TensorNetworkGraph::new(format!("random-{seed}"), vertices.clone(), edges)?;
        if g.is_connected_network() {
            return Ok(g);
        }
    }
    Err(GraphError::Validation {
        invariant: "connected network",
        detail: format!("no connected sample after {max_tries} tries"),
    })
}

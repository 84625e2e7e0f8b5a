#![allow(dead_code)]

use qmflab::netgraph::random::{random_network, RandomNetworkSpec};
use qmflab::TensorNetworkGraph;

/// All permutations of `0..n` (Heap's algorithm), as an oracle for the
/// enumerator.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// A connected random network with the given shape, or `None` if the
/// parameters admit none.
pub fn small_network(vertices: usize, degree: usize, inputs: usize, outputs: usize, seed: u64) -> Option<TensorNetworkGraph> {
    random_network(
        RandomNetworkSpec {
            vertices,
            degree,
            inputs,
            outputs,
        },
        seed,
        2000,
    )
    .ok()
}

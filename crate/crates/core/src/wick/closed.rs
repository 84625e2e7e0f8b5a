use serde::Serialize;

use super::WickError;
use crate::netgraph::{EdgeKind, TensorNetworkGraph};

/// One tensor copy `(v; sigma)` of a closed network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedNode {
    /// Vertex id in the source graph.
    pub vertex: String,
    /// Key of the tensor placed here; nodes with equal keys hold the same
    /// tensor (or its conjugate) in the independent ensemble.
    pub tensor: usize,
    /// sigma, 1-based.
    pub copy: usize,
    /// Factor of a product network this node came from (0 otherwise).
    pub factor: usize,
    pub conjugate: bool,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HalfEdge {
    pub node: usize,
    /// 1-based.
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedEdge {
    pub a: HalfEdge,
    pub b: HalfEdge,
}

/// A tensor network without open edges.
///
/// `free_loops` counts index loops that touch no tensor (from identity edges
/// of the source graph); each contributes a constant factor of N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedNetwork {
    nodes: Vec<ClosedNode>,
    edges: Vec<ClosedEdge>,
    free_loops: usize,
    tensor_names: Vec<String>,
    origin: String,
    #[serde(skip)]
    offset: Vec<usize>,
    #[serde(skip)]
    partner: Vec<usize>,
    #[serde(skip)]
    edge_of: Vec<usize>,
}

impl ClosedNetwork {
    pub fn new(
        nodes: Vec<ClosedNode>,
        edges: Vec<ClosedEdge>,
        free_loops: usize,
        tensor_names: Vec<String>,
        origin: impl Into<String>,
    ) -> Result<Self, WickError> {
        let mut offset = Vec::with_capacity(nodes.len() + 1);
        let mut total = 0;
        for n in &nodes {
            offset.push(total);
            total += n.degree;
            if n.tensor >= tensor_names.len() {
                return Err(WickError::NotAMatching(format!(
                    "node ({};{}) has unknown tensor key {}",
                    n.vertex, n.copy, n.tensor
                )));
            }
        }
        offset.push(total);
        let mut partner = vec![usize::MAX; total];
        let mut edge_of = vec![usize::MAX; total];
        let index = |h: HalfEdge| -> Result<usize, WickError> {
            if h.node >= nodes.len() || h.slot == 0 || h.slot > nodes[h.node].degree {
                return Err(WickError::NotAMatching(format!(
                    "edge end {h:?} is not a slot of the network"
                )));
            }
            Ok(offset[h.node] + h.slot - 1)
        };
        for (ei, e) in edges.iter().enumerate() {
            let (a, b) = (index(e.a)?, index(e.b)?);
            if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(WickError::NotAMatching(format!(
                    "slot used twice by edge {ei}"
                )));
            }
            partner[a] = b;
            partner[b] = a;
            edge_of[a] = ei;
            edge_of[b] = ei;
        }
        if partner.contains(&usize::MAX) {
            return Err(WickError::NotAMatching("a slot is left open".into()));
        }
        Ok(Self {
            nodes,
            edges,
            free_loops,
            tensor_names,
            origin: origin.into(),
            offset,
            partner,
            edge_of,
        })
    }

    pub fn nodes(&self) -> &[ClosedNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ClosedEdge] {
        &self.edges
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn tensor_names(&self) -> &[String] {
        &self.tensor_names
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// Indices of the unconjugated nodes, ascending.
    pub fn plain_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].conjugate).collect()
    }

    /// Indices of the conjugated nodes, ascending.
    pub fn conjugate_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].conjugate).collect()
    }

    pub(crate) fn num_half_edges(&self) -> usize {
        self.partner.len()
    }

    pub(crate) fn half(&self, node: usize, slot: usize) -> usize {
        self.offset[node] + slot - 1
    }

    pub(crate) fn partner(&self, h: usize) -> usize {
        self.partner[h]
    }

    pub(crate) fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    /// Node and 1-based slot of a half-edge index.
    pub(crate) fn locate(&self, h: usize) -> HalfEdge {
        let node = self.offset.partition_point(|&o| o <= h) - 1;
        HalfEdge {
            node,
            slot: h - self.offset[node] + 1,
        }
    }
}

/// The trace network of `tr((L^dagger L)^k)`.
///
/// Node `(v; sigma)` has index `(sigma - 1) |V| + v`; odd sigma holds T, even
/// sigma holds its conjugate. Closed edges are copied into every sigma, input
/// edges join sigma to sigma+1 for odd sigma, output edges for even sigma
/// (cyclically). Each identity edge of `g` closes into one free loop.
pub fn build_closed_network(g: &TensorNetworkGraph, k: usize) -> Result<ClosedNetwork, WickError> {
    if k == 0 {
        return Err(WickError::InvalidK);
    }
    let nv = g.num_vertices();
    let sigmas = 2 * k;
    let node = |v: usize, sigma: usize| ((sigma - 1) % sigmas) * nv + v;
    let mut nodes = Vec::with_capacity(sigmas * nv);
    for sigma in 1..=sigmas {
        for (v, vert) in g.vertices().iter().enumerate() {
            nodes.push(ClosedNode {
                vertex: vert.id.clone(),
                tensor: v,
                copy: sigma,
                factor: 0,
                conjugate: sigma % 2 == 0,
                degree: vert.degree,
            });
        }
    }
    let mut edges = Vec::new();
    let mut free_loops = 0;
    for e in g.edges() {
        match e.kind {
            EdgeKind::Closed(a, b) => {
                for sigma in 1..=sigmas {
                    edges.push(ClosedEdge {
                        a: HalfEdge { node: node(a.vertex, sigma), slot: a.slot },
                        b: HalfEdge { node: node(b.vertex, sigma), slot: b.slot },
                    });
                }
            }
            EdgeKind::Input(a) | EdgeKind::Output(a) => {
                let first = if matches!(e.kind, EdgeKind::Input(_)) { 1 } else { 2 };
                for sigma in (first..=sigmas).step_by(2) {
                    edges.push(ClosedEdge {
                        a: HalfEdge { node: node(a.vertex, sigma), slot: a.slot },
                        b: HalfEdge { node: node(a.vertex, sigma + 1), slot: a.slot },
                    });
                }
            }
            EdgeKind::Identity => free_loops += 1,
        }
    }
    let names = g
        .vertices()
        .iter()
        .map(|v| format!("{}/{}", g.name(), v.id))
        .collect();
    ClosedNetwork::new(nodes, edges, free_loops, names, format!("tr((L'L)^{k}) of {}", g.name()))
}

/// Disjoint union of closed networks, e.g. `tr(L'L) tr((L'L)^2)`. Nodes keep
/// their tensor identity by name, so factors built from the same graph share
/// tensors and may pair across factors.
pub fn build_product_closed_network(parts: &[ClosedNetwork]) -> Result<ClosedNetwork, WickError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut free_loops = 0;
    for (f, part) in parts.iter().enumerate() {
        let base = nodes.len();
        let keys: Vec<usize> = part
            .tensor_names
            .iter()
            .map(|name| match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.clone());
                    names.len() - 1
                }
            })
            .collect();
        nodes.extend(part.nodes.iter().map(|n| ClosedNode {
            tensor: keys[n.tensor],
            factor: f,
            ..n.clone()
        }));
        let shift = |h: HalfEdge| HalfEdge { node: h.node + base, slot: h.slot };
        edges.extend(part.edges.iter().map(|e| ClosedEdge { a: shift(e.a), b: shift(e.b) }));
        free_loops += part.free_loops;
    }
    let origin = parts.iter().map(|p| p.origin.as_str()).collect::<Vec<_>>().join(" * ");
    ClosedNetwork::new(nodes, edges, free_loops, names, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figconn_k1_sizes() {
        let g = fixtures::figconn();
        let n = build_closed_network(&g, 1).unwrap();
        assert_eq!(n.nodes().len(), 4);
        assert_eq!(n.edges().len(), 2 * g.num_edges() - g.num_inputs() - g.num_outputs());
    }

    #[test]
    fn chain_d2_k2_sizes() {
        let n = build_closed_network(&fixtures::chain_d2(), 2).unwrap();
        assert_eq!(n.nodes().len(), 4);
        assert_eq!(n.edges().len(), 4);
        assert_eq!(n.plain_nodes(), vec![0, 2]);
        assert_eq!(n.conjugate_nodes(), vec![1, 3]);
    }

    #[test]
    fn k_zero_is_rejected() {
        assert_eq!(build_closed_network(&fixtures::figconn(), 0), Err(WickError::InvalidK));
    }

    #[test]
    fn product_shares_tensor_keys() {
        let a = build_closed_network(&fixtures::figconn(), 1).unwrap();
        let p = build_product_closed_network(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(p.nodes().len(), 8);
        assert_eq!(p.tensor_names().len(), 2);
        assert_eq!(p.nodes()[4].factor, 1);
        let b = build_closed_network(&fixtures::fignocut(), 1).unwrap();
        let q = build_product_closed_network(&[a, b]).unwrap();
        assert_eq!(q.tensor_names().len(), 4);
    }

    #[test]
    fn identity_edges_become_free_loops() {
        let n = build_closed_network(&fixtures::identity_edge(), 3).unwrap();
        assert_eq!(n.nodes().len(), 0);
        assert_eq!(n.free_loops(), 1);
    }

    #[test]
    fn locate_inverts_half() {
        let n = build_closed_network(&fixtures::fig_s_less_t(), 2).unwrap();
        for h in 0..n.num_half_edges() {
            let he = n.locate(h);
            assert_eq!(n.half(he.node, he.slot), h);
        }
    }
}

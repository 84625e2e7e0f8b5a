//! Graph model of tensor networks with open edges.
//!
//! A [`TensorNetworkGraph`] is a multigraph whose vertices carry ordered index
//! slots `1..=degree`. Edges are first-class values with their own ids, so
//! parallel edges and edges touching no vertex at all (identity edges) need no
//! special casing. The slot each edge occupies at a vertex is the index
//! ordering of the tensor placed there.

mod flow;
mod format;
pub mod random;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use flow::{classify_case, min_cut, split_at_cut, CaseLabel, Cut, FlowPath, FlowPaths, MinCut};
pub use format::{load_network, to_json};

/// Errors from building, parsing or transforming a network graph.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid network ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// A tensor site. The vertex id is the user-facing name from the network file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    pub degree: usize,
}

/// Attachment of an edge end to a vertex slot. `vertex` indexes
/// [`TensorNetworkGraph::vertices`]; `slot` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub vertex: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Closed(Endpoint, Endpoint),
    /// One end at a vertex, the open end in S.
    Input(Endpoint),
    /// One end at a vertex, the open end in T.
    Output(Endpoint),
    /// No vertex ends; one open end in S and one in T.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn endpoints(&self) -> impl Iterator<Item = Endpoint> {
        let (a, b) = match self.kind {
            EdgeKind::Closed(a, b) => (Some(a), Some(b)),
            EdgeKind::Input(a) | EdgeKind::Output(a) => (Some(a), None),
            EdgeKind::Identity => (None, None),
        };
        a.into_iter().chain(b)
    }

    /// True when the edge has an open end in S.
    pub fn is_input_side(&self) -> bool {
        matches!(self.kind, EdgeKind::Input(_) | EdgeKind::Identity)
    }

    /// True when the edge has an open end in T.
    pub fn is_output_side(&self) -> bool {
        matches!(self.kind, EdgeKind::Output(_) | EdgeKind::Identity)
    }
}

/// Which open side a removed vertex is absorbed into, see
/// [`TensorNetworkGraph::remove_vertex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

/// A validated tensor-network graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorNetworkGraph {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    // slot_edge[v][s-1] = index into `edges`
    slot_edge: Vec<Vec<usize>>,
}

impl TensorNetworkGraph {
    /// Builds a graph, checking slot coverage and endpoint consistency.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let name = name.into();
        let mut seen_ids = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(prev) = seen_ids.insert(v.id.as_str(), i) {
                return Err(GraphError::Validation {
                    invariant: "unique vertex ids",
                    detail: format!("vertex id `{}` appears at positions {prev} and {i}", v.id),
                });
            }
        }
        let mut edge_ids = BTreeSet::new();
        let mut slot_edge: Vec<Vec<Option<usize>>> =
            vertices.iter().map(|v| vec![None; v.degree]).collect();
        for (ei, e) in edges.iter().enumerate() {
            if !edge_ids.insert(e.id) {
                return Err(GraphError::Validation {
                    invariant: "unique edge ids",
                    detail: format!("edge id {} repeated", e.id),
                });
            }
            for end in e.endpoints() {
                let Some(v) = vertices.get(end.vertex) else {
                    return Err(GraphError::Validation {
                        invariant: "endpoint consistency",
                        detail: format!("edge {} references vertex index {}", e.id, end.vertex),
                    });
                };
                if end.slot == 0 || end.slot > v.degree {
                    return Err(GraphError::Validation {
                        invariant: "slots are 1..=degree",
                        detail: format!(
                            "edge {} uses slot {} of vertex `{}` with degree {}",
                            e.id, end.slot, v.id, v.degree
                        ),
                    });
                }
                let cell = &mut slot_edge[end.vertex][end.slot - 1];
                if let Some(other) = cell {
                    return Err(GraphError::Validation {
                        invariant: "each slot used by exactly one edge end",
                        detail: format!(
                            "slot {} of vertex `{}` is used by edges {} and {}",
                            end.slot, v.id, edges[*other].id, e.id
                        ),
                    });
                }
                *cell = Some(ei);
            }
        }
        let mut filled = Vec::with_capacity(vertices.len());
        for (v, slots) in vertices.iter().zip(slot_edge) {
            let mut row = Vec::with_capacity(slots.len());
            for (s, cell) in slots.into_iter().enumerate() {
                match cell {
                    Some(ei) => row.push(ei),
                    None => {
                        return Err(GraphError::Validation {
                            invariant: "each slot used by exactly one edge end",
                            detail: format!("slot {} of vertex `{}` is unused", s + 1, v.id),
                        })
                    }
                }
            }
            filled.push(row);
        }
        Ok(Self {
            name,
            vertices,
            edges,
            slot_edge: filled,
        })
    }

    /// The graph with no vertices and no edges.
    pub fn empty(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            vertices: Vec::new(),
            edges: Vec::new(),
            slot_edge: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// |E|, counting open and identity edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// |S|: number of open ends on the input side (identity edges included).
    pub fn num_inputs(&self) -> usize {
        self.edges.iter().filter(|e| e.is_input_side()).count()
    }

    /// |T|: number of open ends on the output side (identity edges included).
    pub fn num_outputs(&self) -> usize {
        self.edges.iter().filter(|e| e.is_output_side()).count()
    }

    pub fn num_identity_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| matches!(e.kind, EdgeKind::Identity))
            .count()
    }

    /// Common degree when every vertex has the same degree.
    pub fn uniform_degree(&self) -> Option<usize> {
        let first = self.vertices.first()?.degree;
        self.vertices
            .iter()
            .all(|v| v.degree == first)
            .then_some(first)
    }

    pub fn is_degree_uniform(&self) -> bool {
        self.vertices.is_empty() || self.uniform_degree().is_some()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Edge occupying `slot` (1-based) of vertex `v`.
    pub fn edge_at(&self, v: usize, slot: usize) -> &Edge {
        &self.edges[self.slot_edge[v][slot - 1]]
    }

    pub fn edge_by_id(&self, id: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Edge ids of the input open ends, in canonical (ascending id) order.
    pub fn input_edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.is_input_side())
            .map(|e| e.id)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Edge ids of the output open ends, in canonical (ascending id) order.
    pub fn output_edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.is_output_side())
            .map(|e| e.id)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Connectedness in the tensor-network sense: every vertex has a path to
    /// some open edge. The underlying graph itself may be disconnected.
    pub fn is_connected_network(&self) -> bool {
        let n = self.vertices.len();
        let mut reached = vec![false; n];
        let mut stack = Vec::new();
        for e in &self.edges {
            if let EdgeKind::Input(a) | EdgeKind::Output(a) = e.kind {
                if !reached[a.vertex] {
                    reached[a.vertex] = true;
                    stack.push(a.vertex);
                }
            }
        }
        while let Some(v) = stack.pop() {
            for &ei in &self.slot_edge[v] {
                if let EdgeKind::Closed(a, b) = self.edges[ei].kind {
                    for w in [a.vertex, b.vertex] {
                        if !reached[w] {
                            reached[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        reached.into_iter().all(|r| r)
    }

    /// Disjoint union. Vertex ids are namespaced `0:` / `1:` and the edges of
    /// `other` are renumbered after those of `self`, so the canonical open-end
    /// order of the product lists `self`'s ends first and the product operator
    /// is `L_self ⊗ L_other`.
    pub fn product(&self, other: &Self) -> Self {
        let offset = self.vertices.len();
        let id_offset = self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
        let mut vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|v| Vertex {
                id: format!("0:{}", v.id),
                degree: v.degree,
            })
            .collect();
        vertices.extend(other.vertices.iter().map(|v| Vertex {
            id: format!("1:{}", v.id),
            degree: v.degree,
        }));
        let shift = |p: Endpoint| Endpoint {
            vertex: p.vertex + offset,
            slot: p.slot,
        };
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            id: e.id + id_offset,
            kind: match e.kind {
                EdgeKind::Closed(a, b) => EdgeKind::Closed(shift(a), shift(b)),
                EdgeKind::Input(a) => EdgeKind::Input(shift(a)),
                EdgeKind::Output(a) => EdgeKind::Output(shift(a)),
                EdgeKind::Identity => EdgeKind::Identity,
            },
        }));
        let name = format!("{}*{}", self.name, other.name);
        Self::new(name, vertices, edges).expect("disjoint union of valid graphs is valid")
    }

    /// Removes vertex `id` "as input" (or as output, mirrored): its input
    /// edges disappear, its closed edges become input edges at their other
    /// end, its output edges become identity edges. Edge ids are kept.
    pub fn remove_vertex(&self, id: &str, side: Side) -> Result<Self, GraphError> {
        let v = self
            .vertex_index(id)
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))?;
        let reindex = |p: Endpoint| Endpoint {
            vertex: if p.vertex > v { p.vertex - 1 } else { p.vertex },
            slot: p.slot,
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let kind = match e.kind {
                EdgeKind::Closed(a, b) if a.vertex == v && b.vertex == v => {
                    return Err(GraphError::Unsupported(format!(
                        "vertex `{id}` carries self-loop edge {}",
                        e.id
                    )))
                }
                EdgeKind::Closed(a, b) if a.vertex == v || b.vertex == v => {
                    let keep = if a.vertex == v { b } else { a };
                    match side {
                        Side::Input => EdgeKind::Input(reindex(keep)),
                        Side::Output => EdgeKind::Output(reindex(keep)),
                    }
                }
                EdgeKind::Closed(a, b) => EdgeKind::Closed(reindex(a), reindex(b)),
                EdgeKind::Input(a) if a.vertex == v => match side {
                    Side::Input => continue,
                    Side::Output => EdgeKind::Identity,
                },
                EdgeKind::Output(a) if a.vertex == v => match side {
                    Side::Input => EdgeKind::Identity,
                    Side::Output => continue,
                },
                EdgeKind::Input(a) => EdgeKind::Input(reindex(a)),
                EdgeKind::Output(a) => EdgeKind::Output(reindex(a)),
                EdgeKind::Identity => EdgeKind::Identity,
            };
            edges.push(Edge { id: e.id, kind });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(v);
        let suffix = match side {
            Side::Input => "in",
            Side::Output => "out",
        };
        Self::new(format!("{}-{id}:{suffix}", self.name), vertices, edges)
    }

    /// Copy with one extra identity edge appended.
    pub fn with_identity_edge(&self) -> Self {
        let id = self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
        let mut edges = self.edges.clone();
        edges.push(Edge {
            id,
            kind: EdgeKind::Identity,
        });
        Self::new(format!("{}+id", self.name), self.vertices.clone(), edges)
            .expect("identity edge touches no slots")
    }
}

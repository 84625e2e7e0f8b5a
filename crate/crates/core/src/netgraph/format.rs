//! JSON network files.
//!
//! ```json
//! { "name": "chain_d2",
//!   "vertices": [ {"id": "v", "degree": 2} ],
//!   "edges": [
//!     {"kind": "input",  "end": {"vertex": "v", "slot": 1}},
//!     {"kind": "output", "end": {"vertex": "v", "slot": 2}} ] }
//! ```
//!
//! Edge ids are the positions of the edges in the file.

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeKind, Endpoint, GraphError, TensorNetworkGraph, Vertex};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    name: String,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    degree: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndRecord {
    vertex: String,
    slot: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum EdgeRecord {
    Closed { ends: [EndRecord; 2] },
    Input { end: EndRecord },
    Output { end: EndRecord },
    Identity,
}

/// Parses and validates a network file.
pub fn load_network(text: &str) -> Result<TensorNetworkGraph, GraphError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let vertices: Vec<Vertex> = file
        .vertices
        .into_iter()
        .map(|v| Vertex {
            id: v.id,
            degree: v.degree,
        })
        .collect();
    let resolve = |edge: usize, end: &EndRecord| -> Result<Endpoint, GraphError> {
        let vertex = vertices
            .iter()
            .position(|v| v.id == end.vertex)
            .ok_or_else(|| GraphError::Validation {
                invariant: "endpoint consistency",
                detail: format!("edge {edge} references unknown vertex `{}`", end.vertex),
            })?;
        Ok(Endpoint {
            vertex,
            slot: end.slot,
        })
    };
    let mut edges = Vec::with_capacity(file.edges.len());
    for (id, rec) in file.edges.iter().enumerate() {
        let kind = match rec {
            EdgeRecord::Closed { ends } => {
                EdgeKind::Closed(resolve(id, &ends[0])?, resolve(id, &ends[1])?)
            }
            EdgeRecord::Input { end } => EdgeKind::Input(resolve(id, end)?),
            EdgeRecord::Output { end } => EdgeKind::Output(resolve(id, end)?),
            EdgeRecord::Identity => EdgeKind::Identity,
        };
        edges.push(Edge { id, kind });
    }
    TensorNetworkGraph::new(file.name, vertices, edges)
}

/// Serializes a graph in the network-file format. Edges are written in
/// ascending id order, so ids are renumbered to file positions.
pub fn to_json(g: &TensorNetworkGraph) -> String {
    let end = |p: Endpoint| EndRecord {
        vertex: g.vertices()[p.vertex].id.clone(),
        slot: p.slot,
    };
    let mut edges: Vec<&Edge> = g.edges().iter().collect();
    edges.sort_by_key(|e| e.id);
    let file = NetworkFile {
        name: g.name().to_string(),
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexRecord {
                id: v.id.clone(),
                degree: v.degree,
            })
            .collect(),
        edges: edges
            .into_iter()
            .map(|e| match e.kind {
                EdgeKind::Closed(a, b) => EdgeRecord::Closed {
                    ends: [end(a), end(b)],
                },
                EdgeKind::Input(a) => EdgeRecord::Input { end: end(a) },
                EdgeKind::Output(a) => EdgeRecord::Output { end: end(a) },
                EdgeKind::Identity => EdgeRecord::Identity,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("network file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figconn_counts() {
        let g = fixtures::figconn();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 6);
        assert_eq!(g.num_inputs(), 3);
        assert_eq!(g.num_outputs(), 3);
        assert_eq!(g.uniform_degree(), Some(3));
    }

    #[test]
    fn duplicate_slot_is_rejected() {
        let text = r#"{"name":"bad","vertices":[{"id":"v","degree":3}],
          "edges":[{"kind":"input","end":{"vertex":"v","slot":1}},
                   {"kind":"output","end":{"vertex":"v","slot":1}},
                   {"kind":"output","end":{"vertex":"v","slot":2}}]}"#;
        match load_network(text) {
            Err(GraphError::Validation { invariant, .. }) => {
                assert_eq!(invariant, "each slot used by exactly one edge end")
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unused_slot_and_out_of_range_slot_are_rejected() {
        let unused = r#"{"name":"bad","vertices":[{"id":"v","degree":2}],
          "edges":[{"kind":"input","end":{"vertex":"v","slot":1}}]}"#;
        assert!(matches!(load_network(unused), Err(GraphError::Validation { .. })));
        let range = r#"{"name":"bad","vertices":[{"id":"v","degree":1}],
          "edges":[{"kind":"input","end":{"vertex":"v","slot":2}}]}"#;
        assert!(matches!(load_network(range), Err(GraphError::Validation { .. })));
        let unknown = r#"{"name":"bad","vertices":[],
          "edges":[{"kind":"input","end":{"vertex":"w","slot":1}}]}"#;
        assert!(matches!(load_network(unknown), Err(GraphError::Validation { .. })));
    }

    #[test]
    fn lone_identity_edge() {
        let g = load_network(r#"{"name":"id","vertices":[],"edges":[{"kind":"identity"}]}"#).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.num_vertices(), 0);
    }

    #[test]
    fn parse_error_has_position() {
        match load_network("{\n  \"name\": \"x\",\n  \"vertices\": [,]\n}") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            load_network(r#"{"name":"x","vertices":[],"edges":[{"kind":"loop"}]}"#),
            Err(GraphError::Parse { .. })
        ));
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        for g in fixtures::all() {
            let back = load_network(&to_json(&g)).unwrap();
            assert_eq!(back, g, "{}", g.name());
        }
    }
}

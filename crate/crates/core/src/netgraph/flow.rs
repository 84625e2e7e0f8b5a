//! Unit-capacity max-flow / min-cut on tensor-network graphs.
//!
//! Open ends are collapsed into a source (S side) and a sink (T side). Every
//! edge is undirected with capacity 1; flow on an edge is -1, 0 or +1 relative
//! to its stored orientation. Augmenting paths are found by BFS, which is
//! plenty for graphs of a few dozen edges.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::{Edge, EdgeKind, Endpoint, GraphError, TensorNetworkGraph, Vertex};

const SOURCE: usize = 0;
const SINK: usize = 1;

/// A partition of the vertices into an input side and an output side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cut {
    /// Vertex indices on the input side.
    pub sbar: BTreeSet<usize>,
    /// Vertex indices on the output side.
    pub tbar: BTreeSet<usize>,
    /// Ids of the edges crossing the partition, ascending.
    pub cut_set: Vec<usize>,
}

impl Cut {
    /// The cut whose input side is `sbar`; everything else is on the output side.
    pub fn from_sbar(g: &TensorNetworkGraph, sbar: BTreeSet<usize>) -> Result<Self, GraphError> {
        if let Some(&bad) = sbar.iter().find(|&&v| v >= g.num_vertices()) {
            return Err(GraphError::InvalidCut(format!("vertex index {bad} out of range")));
        }
        let tbar: BTreeSet<usize> = (0..g.num_vertices()).filter(|v| !sbar.contains(v)).collect();
        let mut cut_set: Vec<usize> = g
            .edges()
            .iter()
            .filter(|e| crosses(e, &sbar))
            .map(|e| e.id)
            .collect();
        cut_set.sort_unstable();
        Ok(Self {
            sbar,
            tbar,
            cut_set,
        })
    }

    pub fn size(&self) -> usize {
        self.cut_set.len()
    }

    fn is_consistent_with(&self, g: &TensorNetworkGraph) -> bool {
        let n = g.num_vertices();
        self.sbar.len() + self.tbar.len() == n
            && self.sbar.is_disjoint(&self.tbar)
            && self.sbar.iter().chain(&self.tbar).all(|&v| v < n)
            && Cut::from_sbar(g, self.sbar.clone()).is_ok_and(|c| c.cut_set == self.cut_set)
    }
}

fn crosses(e: &Edge, sbar: &BTreeSet<usize>) -> bool {
    match e.kind {
        EdgeKind::Closed(a, b) => sbar.contains(&a.vertex) != sbar.contains(&b.vertex),
        EdgeKind::Input(a) => !sbar.contains(&a.vertex),
        EdgeKind::Output(a) => sbar.contains(&a.vertex),
        EdgeKind::Identity => true,
    }
}

/// One unit of flow from an input open end to an output open end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowPath {
    /// Edge ids in traversal order; the first has an open end in S, the last
    /// an open end in T.
    pub edges: Vec<usize>,
    /// Vertex indices visited, in order. Empty for an identity edge.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowPaths {
    pub paths: Vec<FlowPath>,
}

/// Result of [`min_cut`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinCut {
    /// MC(G).
    pub value: usize,
    /// Canonical witness: the input side is exactly the set reachable from the
    /// source in the final residual graph.
    pub cut: Cut,
    pub paths: FlowPaths,
}

struct FlowNet {
    // (u, w, graph edge id); flow is oriented u -> w
    arcs: Vec<(usize, usize, usize)>,
    flow: Vec<i8>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    /// `node_of[v]` maps a graph vertex to a flow node; SOURCE/SINK merge a
    /// vertex into the terminals.
    fn build(g: &TensorNetworkGraph, node_of: &[usize]) -> Self {
        let nodes = g.num_vertices() + 2;
        let mut arcs = Vec::new();
        for e in g.edges() {
            let (u, w) = match e.kind {
                EdgeKind::Closed(a, b) => (node_of[a.vertex], node_of[b.vertex]),
                EdgeKind::Input(a) => (SOURCE, node_of[a.vertex]),
                EdgeKind::Output(a) => (node_of[a.vertex], SINK),
                EdgeKind::Identity => (SOURCE, SINK),
            };
            if u != w {
                arcs.push((u, w, e.id));
            }
        }
        let mut adj = vec![Vec::new(); nodes];
        for (i, &(u, w, _)) in arcs.iter().enumerate() {
            adj[u].push(i);
            adj[w].push(i);
        }
        Self {
            flow: vec![0; arcs.len()],
            arcs,
            adj,
        }
    }

    /// Residual capacity of arc `i` when traversed out of node `from`.
    fn residual(&self, i: usize, from: usize) -> i8 {
        let (u, _, _) = self.arcs[i];
        if from == u {
            1 - self.flow[i]
        } else {
            1 + self.flow[i]
        }
    }

    fn other(&self, i: usize, from: usize) -> usize {
        let (u, w, _) = self.arcs[i];
        if from == u {
            w
        } else {
            u
        }
    }

    fn bfs(&self) -> Vec<Option<(usize, usize)>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[SOURCE] = true;
        let mut queue = VecDeque::from([SOURCE]);
        while let Some(x) = queue.pop_front() {
            for &i in &self.adj[x] {
                let y = self.other(i, x);
                if !seen[y] && self.residual(i, x) > 0 {
                    seen[y] = true;
                    parent[y] = Some((x, i));
                    queue.push_back(y);
                }
            }
        }
        parent
    }

    fn max_flow(&mut self) -> usize {
        let mut value = 0;
        loop {
            let parent = self.bfs();
            if parent[SINK].is_none() {
                return value;
            }
            let mut y = SINK;
            while let Some((x, i)) = parent[y] {
                if x == self.arcs[i].0 {
                    self.flow[i] += 1;
                } else {
                    self.flow[i] -= 1;
                }
                y = x;
            }
            value += 1;
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[SOURCE] = true;
        let mut stack = vec![SOURCE];
        while let Some(x) = stack.pop() {
            for &i in &self.adj[x] {
                let y = self.other(i, x);
                if !seen[y] && self.residual(i, x) > 0 {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Decomposes the integral flow into edge-disjoint source-to-sink walks.
    fn paths(&self, value: usize) -> Vec<FlowPath> {
        let mut used = vec![false; self.arcs.len()];
        let mut out = Vec::with_capacity(value);
        for _ in 0..value {
            let mut at = SOURCE;
            let mut edges = Vec::new();
            let mut vertices = Vec::new();
            while at != SINK {
                let next = self.adj[at].iter().copied().find(|&i| {
                    !used[i] && {
                        let (u, _, _) = self.arcs[i];
                        (self.flow[i] == 1 && u == at) || (self.flow[i] == -1 && u != at)
                    }
                });
                let i = next.expect("flow conservation leaves an outgoing unit");
                used[i] = true;
                edges.push(self.arcs[i].2);
                at = self.other(i, at);
                if at != SINK {
                    vertices.push(at - 2);
                }
            }
            out.push(FlowPath { edges, vertices });
        }
        out
    }
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).map(|v| v + 2).collect()
}

/// MC(G) with unit edge capacities, a canonical minimal cut and a set of
/// MC(G) edge-disjoint flow paths. Identity edges count once toward every cut.
pub fn min_cut(g: &TensorNetworkGraph) -> MinCut {
    let mut net = FlowNet::build(g, &identity_map(g.num_vertices()));
    let value = net.max_flow();
    let reach = net.reachable();
    let sbar: BTreeSet<usize> = (0..g.num_vertices()).filter(|&v| reach[v + 2]).collect();
    let cut = Cut::from_sbar(g, sbar).expect("reachable set is a valid cut");
    debug_assert_eq!(cut.size(), value);
    let paths = FlowPaths {
        paths: net.paths(value),
    };
    MinCut { value, cut, paths }
}

/// Max flow with vertex `u` forced onto the input side and `w` onto the output side.
fn constrained_flow(g: &TensorNetworkGraph, u: usize, w: usize) -> usize {
    let mut node_of = identity_map(g.num_vertices());
    node_of[u] = SOURCE;
    node_of[w] = SINK;
    FlowNet::build(g, &node_of).max_flow()
}

/// A min cut that leaves at least one vertex on each side, if one exists.
pub(crate) fn nontrivial_min_cut(g: &TensorNetworkGraph, mc: usize) -> Option<Cut> {
    let n = g.num_vertices();
    for u in 0..n {
        for w in 0..n {
            if u == w || constrained_flow(g, u, w) != mc {
                continue;
            }
            let mut node_of = identity_map(n);
            node_of[u] = SOURCE;
            node_of[w] = SINK;
            let mut net = FlowNet::build(g, &node_of);
            net.max_flow();
            let reach = net.reachable();
            let sbar: BTreeSet<usize> =
                (0..n).filter(|&v| node_of[v] == SOURCE || reach[node_of[v]]).collect();
            return Some(Cut::from_sbar(g, sbar).expect("valid cut"));
        }
    }
    None
}

/// Classification used when a network has no min cut splitting it into two
/// networks that both keep a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Some min cut leaves at least one vertex on each side.
    Splittable,
    /// |S| = MC(G) < |T|.
    #[serde(rename = "case_i")]
    CaseI,
    /// |T| = MC(G) < |S|.
    #[serde(rename = "case_ii")]
    CaseII,
    /// |S| = |T| = MC(G).
    #[serde(rename = "case_iii")]
    CaseIII,
    /// No vertices, or not a connected network.
    None,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Splittable => "splittable",
            CaseLabel::CaseI => "case_i",
            CaseLabel::CaseII => "case_ii",
            CaseLabel::CaseIII => "case_iii",
            CaseLabel::None => "none",
        })
    }
}

pub fn classify_case(g: &TensorNetworkGraph) -> CaseLabel {
    if g.num_vertices() == 0 || !g.is_connected_network() {
        return CaseLabel::None;
    }
    let mc = min_cut(g).value;
    if nontrivial_min_cut(g, mc).is_some() {
        return CaseLabel::Splittable;
    }
    let (s, t) = (g.num_inputs(), g.num_outputs());
    match (s == mc, t == mc) {
        (true, true) => CaseLabel::CaseIII,
        (true, false) => CaseLabel::CaseI,
        (false, true) => CaseLabel::CaseII,
        (false, false) => CaseLabel::None,
    }
}

/// Splits `g` along `cut` into `(g1, g2)` with `L = L2 · L1`: `g1` holds the
/// input side and outputs the cut set, `g2` takes the cut set as input. An
/// edge left with no vertex on a side becomes an identity edge there. Edge
/// ids are inherited, so the cut edges line up in canonical order.
pub fn split_at_cut(
    g: &TensorNetworkGraph,
    cut: &Cut,
) -> Result<(TensorNetworkGraph, TensorNetworkGraph), GraphError> {
    if !cut.is_consistent_with(g) {
        return Err(GraphError::InvalidCut(
            "sides must partition the vertices and cut_set must be the crossing edges".into(),
        ));
    }
    let side_map = |side: &BTreeSet<usize>| -> Vec<Option<usize>> {
        let mut map = vec![None; g.num_vertices()];
        for (i, &v) in side.iter().enumerate() {
            map[v] = Some(i);
        }
        map
    };
    let map1 = side_map(&cut.sbar);
    let map2 = side_map(&cut.tbar);
    let local = |map: &[Option<usize>], p: Endpoint| {
        map[p.vertex].map(|vertex| Endpoint {
            vertex,
            slot: p.slot,
        })
    };
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for e in g.edges() {
        let id = e.id;
        match e.kind {
            EdgeKind::Closed(a, b) => match (local(&map1, a), local(&map1, b)) {
                (Some(x), Some(y)) => e1.push(Edge { id, kind: EdgeKind::Closed(x, y) }),
                (None, None) => e2.push(Edge {
                    id,
                    kind: EdgeKind::Closed(local(&map2, a).unwrap(), local(&map2, b).unwrap()),
                }),
                (Some(x), None) => {
                    e1.push(Edge { id, kind: EdgeKind::Output(x) });
                    e2.push(Edge { id, kind: EdgeKind::Input(local(&map2, b).unwrap()) });
                }
                (None, Some(y)) => {
                    e1.push(Edge { id, kind: EdgeKind::Output(y) });
                    e2.push(Edge { id, kind: EdgeKind::Input(local(&map2, a).unwrap()) });
                }
            },
            EdgeKind::Input(a) => match local(&map1, a) {
                Some(x) => e1.push(Edge { id, kind: EdgeKind::Input(x) }),
                None => {
                    e1.push(Edge { id, kind: EdgeKind::Identity });
                    e2.push(Edge { id, kind: EdgeKind::Input(local(&map2, a).unwrap()) });
                }
            },
            EdgeKind::Output(a) => match local(&map2, a) {
                Some(y) => e2.push(Edge { id, kind: EdgeKind::Output(y) }),
                None => {
                    e1.push(Edge { id, kind: EdgeKind::Output(local(&map1, a).unwrap()) });
                    e2.push(Edge { id, kind: EdgeKind::Identity });
                }
            },
            EdgeKind::Identity => {
                e1.push(Edge { id, kind: EdgeKind::Identity });
                e2.push(Edge { id, kind: EdgeKind::Identity });
            }
        }
    }
    let verts = |side: &BTreeSet<usize>| -> Vec<Vertex> {
        side.iter().map(|&v| g.vertices()[v].clone()).collect()
    };
    let g1 = TensorNetworkGraph::new(format!("{}[1]", g.name()), verts(&cut.sbar), e1)?;
    let g2 = TensorNetworkGraph::new(format!("{}[2]", g.name()), verts(&cut.tbar), e2)?;
    Ok((g1, g2))
}

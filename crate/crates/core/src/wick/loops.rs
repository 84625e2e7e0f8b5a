use serde::Serialize;

use super::{ClosedNetwork, Ensemble, WickError};

/// A perfect matching of unconjugated with conjugated nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pairing {
    /// `(plain node, conjugate node)`, sorted by plain node.
    pub matches: Vec<(usize, usize)>,
    pub loop_count: usize,
}

impl Pairing {
    /// Checks that `matches` is a perfect matching between nodes of equal
    /// degree and counts its loops.
    pub fn new(n: &ClosedNetwork, mut matches: Vec<(usize, usize)>) -> Result<Self, WickError> {
        matches.sort_unstable();
        mate_table(n, &matches)?;
        let mut p = Self {
            matches,
            loop_count: 0,
        };
        p.loop_count = count_loops(n, &p);
        Ok(p)
    }

    /// Whether every match is allowed in `ensemble`.
    pub fn is_admissible(&self, n: &ClosedNetwork, ensemble: Ensemble) -> bool {
        self.matches.iter().all(|&(x, y)| admissible(n, ensemble, x, y))
    }

    /// The node each node is matched with.
    pub fn mates(&self, n: &ClosedNetwork) -> Vec<usize> {
        mate_table(n, &self.matches).expect("validated at construction")
    }
}

pub(crate) fn admissible(n: &ClosedNetwork, ensemble: Ensemble, x: usize, y: usize) -> bool {
    let (a, b) = (&n.nodes()[x], &n.nodes()[y]);
    match ensemble {
        Ensemble::Identical => a.degree == b.degree,
        Ensemble::Independent => a.tensor == b.tensor,
    }
}

pub(crate) fn mate_table(n: &ClosedNetwork, matches: &[(usize, usize)]) -> Result<Vec<usize>, WickError> {
    let nodes = n.nodes();
    let mut mate = vec![usize::MAX; nodes.len()];
    for &(x, y) in matches {
        let ok = x < nodes.len()
            && y < nodes.len()
            && !nodes[x].conjugate
            && nodes[y].conjugate
            && nodes[x].degree == nodes[y].degree;
        if !ok {
            return Err(WickError::NotAMatching(format!("({x}, {y}) is not a plain/conjugate pair of equal degree")));
        }
        if mate[x] != usize::MAX || mate[y] != usize::MAX {
            return Err(WickError::NotAMatching(format!("node matched twice in ({x}, {y})")));
        }
        mate[x] = y;
        mate[y] = x;
    }
    if let Some(v) = mate.iter().position(|&m| m == usize::MAX) {
        return Err(WickError::NotAMatching(format!("node {v} is unmatched")));
    }
    Ok(mate)
}

/// C(pi): walks each edge once, hopping at every node to the equal slot of
/// its partner, and counts the closed walks. Free loops are included.
pub fn count_loops(n: &ClosedNetwork, p: &Pairing) -> usize {
    let mate = p.mates(n);
    let mut visited = vec![false; n.edges().len()];
    let mut loops = n.free_loops();
    for (ei, e) in n.edges().iter().enumerate() {
        if visited[ei] {
            continue;
        }
        let start = n.half(e.a.node, e.a.slot);
        let mut cur = start;
        loop {
            visited[n.edge_of(cur)] = true;
            let arrive = n.locate(n.partner(cur));
            let next = n.half(mate[arrive.node], arrive.slot);
            if next == start {
                break;
            }
            cur = next;
        }
        loops += 1;
    }
    loops
}

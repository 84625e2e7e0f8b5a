use serde::Serialize;

use super::loops::mate_table;
use super::{ClosedEdge, ClosedNetwork, HalfEdge, Pairing, WickError};

/// Matches made so far by a sequence of one-step reductions, in original node
/// indices, and the loops they closed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PartialPairing {
    pub matches: Vec<(usize, usize)>,
    pub created_loops: usize,
}

fn slot_matched(n: &ClosedNetwork, v: usize, w: usize) -> bool {
    let d = n.nodes()[v].degree;
    d == n.nodes()[w].degree && (1..=d).any(|s| n.partner(n.half(v, s)) == n.half(w, s))
}

/// Pairs plain node `v` with conjugate node `w` and splices them out.
///
/// Index lines through `v` and `w` are joined slot by slot. Lines that close
/// up inside the pair are the created loops, returned separately (they are
/// not added to the free loops of the result). Every other line becomes one
/// edge between the outside nodes it reaches. Remaining nodes keep their
/// relative order.
pub fn reduce_one_step(n: &ClosedNetwork, v: usize, w: usize) -> Result<(ClosedNetwork, usize), WickError> {
    let nodes = n.nodes();
    if v >= nodes.len() || w >= nodes.len() || nodes[v].conjugate || !nodes[w].conjugate {
        return Err(WickError::NotAMatching(format!("({v}, {w}) is not a plain/conjugate pair")));
    }
    if !slot_matched(n, v, w) {
        return Err(WickError::NoAdmissibleEdge(v, w));
    }
    let d = nodes[v].degree;
    let inside = |h: usize| {
        let node = n.locate(h).node;
        node == v || node == w
    };
    let hop = |h: usize| {
        let he = n.locate(h);
        let other = if he.node == v { w } else { v };
        n.half(other, he.slot)
    };
    let halves: Vec<usize> = (1..=d).flat_map(|s| [n.half(v, s), n.half(w, s)]).collect();
    let mut seen = vec![false; n.num_half_edges()];
    let mut spliced: Vec<(usize, usize)> = Vec::new();
    for &h in &halves {
        if seen[h] || inside(n.partner(h)) {
            continue;
        }
        let start = n.partner(h);
        let mut cur = h;
        loop {
            seen[cur] = true;
            let next = hop(cur);
            seen[next] = true;
            let p = n.partner(next);
            if !inside(p) {
                spliced.push((start, p));
                break;
            }
            cur = p;
        }
    }
    let mut created = 0;
    for &h in &halves {
        if seen[h] {
            continue;
        }
        let mut cur = h;
        loop {
            seen[cur] = true;
            let next = hop(cur);
            seen[next] = true;
            let p = n.partner(next);
            if p == h {
                break;
            }
            cur = p;
        }
        created += 1;
    }

    let remap = |node: usize| node - (node > v) as usize - (node > w) as usize;
    let keep = |h: HalfEdge| HalfEdge { node: remap(h.node), slot: h.slot };
    let mut edges: Vec<ClosedEdge> = n
        .edges()
        .iter()
        .filter(|e| ![e.a.node, e.b.node].iter().any(|&x| x == v || x == w))
        .map(|e| ClosedEdge { a: keep(e.a), b: keep(e.b) })
        .collect();
    edges.extend(spliced.into_iter().map(|(a, b)| ClosedEdge {
        a: keep(n.locate(a)),
        b: keep(n.locate(b)),
    }));
    let rest = nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != v && i != w)
        .map(|(_, x)| x.clone())
        .collect();
    let reduced = ClosedNetwork::new(
        rest,
        edges,
        n.free_loops(),
        n.tensor_names().to_vec(),
        n.origin().to_string(),
    )?;
    Ok((reduced, created))
}

/// True if some matched pair of `p` shares a slot-matched edge.
pub fn has_admissible_step(n: &ClosedNetwork, p: &Pairing) -> bool {
    p.matches.iter().any(|&(x, y)| slot_matched(n, x, y))
}

/// Reduces along `p`'s own matches for as long as some matched pair is
/// admissible. Returns the reductions made and what is left.
pub fn reduce_along(n: &ClosedNetwork, p: &Pairing) -> Result<(PartialPairing, ClosedNetwork), WickError> {
    let mate = mate_table(n, &p.matches)?;
    let mut cur = n.clone();
    let mut orig: Vec<usize> = (0..n.nodes().len()).collect();
    let mut done = PartialPairing::default();
    'outer: loop {
        for i in 0..orig.len() {
            if cur.nodes()[i].conjugate {
                continue;
            }
            let j = orig
                .iter()
                .position(|&o| o == mate[orig[i]])
                .expect("mate is still present");
            if slot_matched(&cur, i, j) {
                let (next, created) = reduce_one_step(&cur, i, j)?;
                done.matches.push((orig[i], orig[j]));
                done.created_loops += created;
                let (hi, lo) = (i.max(j), i.min(j));
                orig.remove(hi);
                orig.remove(lo);
                cur = next;
                continue 'outer;
            }
        }
        return Ok((done, cur));
    }
}

/// Whether `p` is reached by repeated one-step reductions along its own
/// matches. Reductions of disjoint matched pairs commute, so the greedy
/// order decides it.
pub fn is_direct_pairing(n: &ClosedNetwork, p: &Pairing) -> bool {
    match reduce_along(n, p) {
        Ok((_, rest)) => rest.nodes().is_empty(),
        Err(_) => false,
    }
}

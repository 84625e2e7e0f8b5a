//! Contraction of a network with concrete tensors into its operator L.
//!
//! Each vertex tensor carries one leg per slot, labelled by the edge in that
//! slot. Tensors are merged pairwise (permute, then one matrix product); the
//! order comes from an exhaustive search over contraction trees for up to
//! eight tensors and a greedy rule beyond. Identity edges never enter the
//! contraction and are expanded as Kronecker deltas at the end.

use std::collections::HashMap;

use num_complex::Complex;

use super::tensor::{check_bytes, checked_pow};
use super::{DenseTensor, NumericError};
use crate::netgraph::{min_cut, EdgeKind, TensorNetworkGraph};
use crate::scalar::Real;

const EXHAUSTIVE_LIMIT: usize = 8;

/// Tensors to place on the vertices.
#[derive(Debug, Clone, Copy)]
pub enum TensorAssignment<'a, T: Real> {
    /// The same tensor at every vertex.
    Identical(&'a DenseTensor<T>),
    /// One tensor per vertex, in vertex order.
    Independent(&'a [DenseTensor<T>]),
}

/// The contracted operator: `rows = N^|T|`, `cols = N^|S|`, row-major. Rows
/// index the output ends and columns the input ends, each in ascending edge
/// id with the first id most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<T>>,
    pub n: usize,
    pub network: String,
    /// |E| of the source network.
    pub edges: usize,
    /// MC of the source network.
    pub mc: usize,
}

impl<T: Real> OperatorMatrix<T> {
    /// A bare matrix with no network behind it (edges = mc = 0).
    pub fn from_matrix(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self, NumericError> {
        if data.len() != rows * cols {
            return Err(NumericError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data,
            n: 0,
            network: "matrix".into(),
            edges: 0,
            mc: 0,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        Self::from_matrix(n, n, data).expect("square")
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.cols + c]
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, NumericError> {
        if self.cols != other.rows {
            return Err(NumericError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = T::matmul(self.rows, self.cols, other.cols, &self.data, &other.data);
        Self::from_matrix(self.rows, other.cols, data)
    }

    /// Kronecker product, `(i, j) -> i * other.rows + j` on rows and likewise
    /// on columns.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut data = Vec::with_capacity(r * c);
        for i1 in 0..self.rows {
            for i2 in 0..other.rows {
                for j1 in 0..self.cols {
                    let a = self.get(i1, j1);
                    data.extend(other.data[i2 * other.cols..(i2 + 1) * other.cols].iter().map(|&b| a * b));
                }
            }
        }
        Self::from_matrix(r, c, data).expect("sizes multiply")
    }
}

#[derive(Debug, Clone)]
struct Work<T: Real> {
    legs: Vec<usize>,
    data: Vec<Complex<T>>,
}

/// Reorders the axes of a row-major tensor; `order[i]` is the source axis
/// that becomes axis `i`.
fn permute<T: Real>(data: &[Complex<T>], rank: usize, n: usize, order: &[usize]) -> Vec<Complex<T>> {
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return data.to_vec();
    }
    let mut src_stride = vec![1usize; rank];
    for a in (0..rank.saturating_sub(1)).rev() {
        src_stride[a] = src_stride[a + 1] * n;
    }
    let strides: Vec<usize> = order.iter().map(|&a| src_stride[a]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut digits = vec![0usize; rank];
    let mut offset = 0usize;
    for _ in 0..data.len() {
        out.push(data[offset]);
        for pos in (0..rank).rev() {
            digits[pos] += 1;
            offset += strides[pos];
            if digits[pos] < n {
                break;
            }
            offset -= strides[pos] * n;
            digits[pos] = 0;
        }
    }
    out
}

fn reorder<T: Real>(w: &Work<T>, target: &[usize], n: usize) -> Vec<Complex<T>> {
    let order: Vec<usize> = target
        .iter()
        .map(|l| w.legs.iter().position(|x| x == l).expect("leg present"))
        .collect();
    permute(&w.data, w.legs.len(), n, &order)
}

/// Sums over legs that occur twice on one tensor (self-loop edges).
fn trace_repeated<T: Real>(w: Work<T>, n: usize) -> Work<T> {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for &l in &w.legs {
        *count.entry(l).or_default() += 1;
    }
    if count.values().all(|&c| c == 1) {
        return w;
    }
    let keep: Vec<usize> = w.legs.iter().copied().filter(|l| count[l] == 1).collect();
    let rank = w.legs.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n.pow(keep.len() as u32)];
    let mut digits = vec![0usize; rank];
    for &x in &w.data {
        let mut value: HashMap<usize, usize> = HashMap::new();
        let mut diagonal = true;
        let mut idx = 0;
        for (a, &l) in w.legs.iter().enumerate() {
            if count[&l] == 1 {
                idx = idx * n + digits[a];
            } else if let Some(&prev) = value.get(&l) {
                diagonal &= prev == digits[a];
            } else {
                value.insert(l, digits[a]);
            }
        }
        if diagonal {
            out[idx] = out[idx] + x;
        }
        for pos in (0..rank).rev() {
            digits[pos] += 1;
            if digits[pos] < n {
                break;
            }
            digits[pos] = 0;
        }
    }
    Work { legs: keep, data: out }
}

fn merge<T: Real>(a: Work<T>, b: Work<T>, n: usize) -> Work<T> {
    let shared: Vec<usize> = a.legs.iter().copied().filter(|l| b.legs.contains(l)).collect();
    let free_a: Vec<usize> = a.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
    let free_b: Vec<usize> = b.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
    let lhs = reorder(&a, &[free_a.clone(), shared.clone()].concat(), n);
    let rhs = reorder(&b, &[shared.clone(), free_b.clone()].concat(), n);
    let (m, k, p) = (
        n.pow(free_a.len() as u32),
        n.pow(shared.len() as u32),
        n.pow(free_b.len() as u32),
    );
    let data = T::matmul(m, k, p, &lhs, &rhs);
    Work {
        legs: [free_a, free_b].concat(),
        data,
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().copied().filter(|l| !b.contains(l)).collect();
    out.extend(b.iter().copied().filter(|l| !a.contains(l)));
    out
}

fn union_len(a: &[usize], b: &[usize]) -> usize {
    a.len() + b.iter().filter(|l| !a.contains(l)).count()
}

/// A contraction tree over tensor indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Leaf(usize),
    Node(Box<Plan>, Box<Plan>),
}

/// Chooses a pairwise contraction order. Returns the tree and the largest
/// intermediate rank (number of legs) it produces.
pub fn plan_contraction(legs: &[Vec<usize>], n: usize) -> (Plan, usize) {
    let m = legs.len();
    assert!(m > 0, "nothing to contract");
    if m <= EXHAUSTIVE_LIMIT {
        exhaustive(legs, n)
    } else {
        greedy(legs)
    }
}

fn exhaustive(legs: &[Vec<usize>], n: usize) -> (Plan, usize) {
    let m = legs.len();
    let full = (1usize << m) - 1;
    let mut set_legs: Vec<Vec<usize>> = vec![Vec::new(); full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        set_legs[s] = sym_diff(&set_legs[s & (s - 1)], &legs[low]);
    }
    // best[s] = (peak rank, flop estimate, split)
    let mut best: Vec<Option<(usize, f64, usize)>> = vec![None; full + 1];
    for i in 0..m {
        best[1 << i] = Some((legs[i].len(), 0.0, 0));
    }
    let nf = n.max(2) as f64;
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let mut choice: Option<(usize, f64, usize)> = None;
        // enumerate proper subsets a containing the lowest set bit of s
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s {
                let b = s ^ a;
                let (pa, ca, _) = best[a].unwrap();
                let (pb, cb, _) = best[b].unwrap();
                let peak = pa.max(pb).max(set_legs[s].len());
                let cost = ca + cb + nf.powi(union_len(&set_legs[a], &set_legs[b]) as i32);
                let better = match choice {
                    None => true,
                    Some((p, c, _)) => peak < p || (peak == p && cost < c),
                };
                if better {
                    choice = Some((peak, cost, a));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[s] = choice;
    }
    fn build(s: usize, best: &[Option<(usize, f64, usize)>]) -> Plan {
        if s.count_ones() == 1 {
            return Plan::Leaf(s.trailing_zeros() as usize);
        }
        let a = best[s].unwrap().2;
        Plan::Node(Box::new(build(a, best)), Box::new(build(s ^ a, best)))
    }
    (build(full, &best), best[full].unwrap().0)
}

fn greedy(legs: &[Vec<usize>]) -> (Plan, usize) {
    let mut items: Vec<(Plan, Vec<usize>)> = legs
        .iter()
        .enumerate()
        .map(|(i, l)| (Plan::Leaf(i), l.clone()))
        .collect();
    let mut peak = legs.iter().map(Vec::len).max().unwrap_or(0);
    while items.len() > 1 {
        let mut pick = (0, 1);
        let mut key = (usize::MAX, 0usize);
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let shared = items[i].1.iter().filter(|l| items[j].1.contains(l)).count();
                let k = (sym_diff(&items[i].1, &items[j].1).len(), usize::MAX - shared);
                if k < key {
                    key = k;
                    pick = (i, j);
                }
            }
        }
        let (b, lb) = items.remove(pick.1);
        let (a, la) = items.remove(pick.0);
        let merged = sym_diff(&la, &lb);
        peak = peak.max(merged.len());
        items.push((Plan::Node(Box::new(a), Box::new(b)), merged));
    }
    (items.pop().unwrap().0, peak)
}

fn execute<T: Real>(plan: &Plan, leaves: &mut Vec<Option<Work<T>>>, n: usize) -> Work<T> {
    match plan {
        Plan::Leaf(i) => leaves[*i].take().expect("each leaf used once"),
        Plan::Node(a, b) => {
            let wa = execute(a, leaves, n);
            let wb = execute(b, leaves, n);
            merge(wa, wb, n)
        }
    }
}

/// Contracts `g` with the given tensors into L.
pub fn contract_network<T: Real>(
    g: &TensorNetworkGraph,
    assignment: TensorAssignment<'_, T>,
    n: usize,
) -> Result<OperatorMatrix<T>, NumericError> {
    let nv = g.num_vertices();
    let tensor_for = |v: usize| -> Result<&DenseTensor<T>, NumericError> {
        let t = match assignment {
            TensorAssignment::Identical(t) => t,
            TensorAssignment::Independent(ts) => ts.get(v).ok_or_else(|| {
                NumericError::DimensionMismatch(format!("{} tensors for {nv} vertices", ts.len()))
            })?,
        };
        let d = g.vertices()[v].degree;
        if t.n != n || t.degree() != d || t.data.len() != n.pow(d as u32) {
            return Err(NumericError::DimensionMismatch(format!(
                "vertex `{}` has degree {d} at N = {n}, tensor has degree {} at N = {}",
                g.vertices()[v].id,
                t.degree(),
                t.n
            )));
        }
        Ok(t)
    };
    if let TensorAssignment::Independent(ts) = assignment {
        if ts.len() != nv {
            return Err(NumericError::DimensionMismatch(format!("{} tensors for {nv} vertices", ts.len())));
        }
    }

    let rows = checked_pow(n, g.num_outputs())?;
    let cols = checked_pow(n, g.num_inputs())?;
    check_bytes::<T>(rows.checked_mul(cols).ok_or(NumericError::MemoryBudget {
        bytes: u128::MAX,
        budget: super::memory_budget(),
    })?)?;

    let mut leaves: Vec<Option<Work<T>>> = Vec::with_capacity(nv);
    let mut leg_sets = Vec::with_capacity(nv);
    for v in 0..nv {
        let t = tensor_for(v)?;
        let legs: Vec<usize> = (1..=g.vertices()[v].degree).map(|s| g.edge_at(v, s).id).collect();
        let w = trace_repeated(
            Work {
                legs,
                data: t.data.clone(),
            },
            n,
        );
        leg_sets.push(w.legs.clone());
        leaves.push(Some(w));
    }
    let result = if nv == 0 {
        Work {
            legs: Vec::new(),
            data: vec![Complex::new(T::one(), T::zero())],
        }
    } else {
        let (plan, peak) = plan_contraction(&leg_sets, n);
        check_bytes::<T>(checked_pow(n, peak)?)?;
        execute(&plan, &mut leaves, n)
    };

    let identity: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| matches!(e.kind, EdgeKind::Identity))
        .map(|e| e.id)
        .collect();
    let outputs = g.output_edge_ids();
    let inputs = g.input_edge_ids();
    let out_attached: Vec<usize> = outputs.iter().copied().filter(|e| !identity.contains(e)).collect();
    let in_attached: Vec<usize> = inputs.iter().copied().filter(|e| !identity.contains(e)).collect();
    let core = reorder(&result, &[out_attached.clone(), in_attached.clone()].concat(), n);
    let core_cols = n.pow(in_attached.len() as u32);

    let data = if identity.is_empty() {
        core
    } else {
        // Expand identity edges as deltas between a row digit and a column digit.
        let digits = |mut x: usize, len: usize| {
            let mut d = vec![0usize; len];
            for p in (0..len).rev() {
                d[p] = x % n;
                x /= n;
            }
            d
        };
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![zero; rows * cols];
        for r in 0..rows {
            let rd = digits(r, outputs.len());
            let mut core_r = 0;
            let mut id_val: HashMap<usize, usize> = HashMap::new();
            for (p, e) in outputs.iter().enumerate() {
                if identity.contains(e) {
                    id_val.insert(*e, rd[p]);
                } else {
                    core_r = core_r * n + rd[p];
                }
            }
            for c in 0..cols {
                let cd = digits(c, inputs.len());
                let mut core_c = 0;
                let mut ok = true;
                for (p, e) in inputs.iter().enumerate() {
                    if let Some(&v) = id_val.get(e) {
                        ok &= v == cd[p];
                    } else {
                        core_c = core_c * n + cd[p];
                    }
                }
                if ok {
                    data[r * cols + c] = core[core_r * core_cols + core_c];
                }
            }
        }
        data
    };
    Ok(OperatorMatrix {
        rows,
        cols,
        data,
        n,
        network: g.name().to_string(),
        edges: g.num_edges(),
        mc: min_cut(g).value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::rng::stream_rng;
    use crate::numeric::sample_tensor;

    fn close(a: &[Complex<f64>], b: &[Complex<f64>]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-10)
    }

    #[test]
    fn permute_transposes() {
        let d: Vec<Complex<f64>> = (0..6).map(|i| Complex::new(i as f64, 0.0)).collect();
        // 2 legs of extent... use n=3 with rank 2 on 9 entries instead
        let d9: Vec<Complex<f64>> = (0..9).map(|i| Complex::new(i as f64, 0.0)).collect();
        let t = permute(&d9, 2, 3, &[1, 0]);
        assert_eq!(t[1].re, 3.0);
        assert_eq!(permute(&d, 1, 6, &[0]), d);
    }

    #[test]
    fn identity_network_gives_identity() {
        let t = DenseTensor::<f64>::from_data(3, 0, vec![Complex::new(1.0, 0.0)]).unwrap();
        let l = contract_network(&fixtures::identity_edge(), TensorAssignment::Identical(&t), 3).unwrap();
        assert!(close(&l.data, &OperatorMatrix::<f64>::identity(3).data));
    }

    #[test]
    fn chain_d2_is_the_tensor() {
        let t = sample_tensor::<f64, _>(4, 2, &mut stream_rng(3, 0, 0, 0)).unwrap();
        let l = contract_network(&fixtures::chain_d2(), TensorAssignment::Identical(&t), 4).unwrap();
        // slot 1 is the input (column), slot 2 the output (row)
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(l.get(r, c), t.data[c * 4 + r]);
            }
        }
    }

    #[test]
    fn figconn_is_a_kronecker_product() {
        let n = 2;
        let t = sample_tensor::<f64, _>(n, 3, &mut stream_rng(5, 0, 0, 0)).unwrap();
        let l = contract_network(&fixtures::figconn(), TensorAssignment::Identical(&t), n).unwrap();
        // a: inputs slots 1,2, output slot 3; b: input slot 1, outputs 2,3
        let mut la = vec![Complex::new(0.0, 0.0); n * n * n];
        let mut lb = vec![Complex::new(0.0, 0.0); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = t.data[(i * n + j) * n + k];
                    la[k * n * n + i * n + j] = x; // row k, col (i, j)
                    lb[(j * n + k) * n + i] = x; // row (j, k), col i
                }
            }
        }
        let a = OperatorMatrix::from_matrix(n, n * n, la).unwrap();
        let b = OperatorMatrix::from_matrix(n * n, n, lb).unwrap();
        assert!(close(&l.data, &a.kron(&b).data));
    }

    #[test]
    fn planner_orders() {
        // a ring of four tensors: exhaustive peak must be small
        let legs = vec![vec![0, 1, 10], vec![1, 2, 11], vec![2, 3, 12], vec![3, 0, 13]];
        let (_, peak) = plan_contraction(&legs, 2);
        assert_eq!(peak, 4);
        let (_, gpeak) = greedy(&legs);
        assert!(gpeak >= peak);
    }

    #[test]
    fn self_loop_is_traced() {
        use crate::netgraph::{Edge, Endpoint, Vertex};
        let g = TensorNetworkGraph::new(
            "loop",
            vec![Vertex { id: "v".into(), degree: 4 }],
            vec![
                Edge { id: 0, kind: EdgeKind::Input(Endpoint { vertex: 0, slot: 1 }) },
                Edge { id: 1, kind: EdgeKind::Closed(Endpoint { vertex: 0, slot: 2 }, Endpoint { vertex: 0, slot: 3 }) },
                Edge { id: 2, kind: EdgeKind::Output(Endpoint { vertex: 0, slot: 4 }) },
            ],
        )
        .unwrap();
        let n = 2;
        let t = sample_tensor::<f64, _>(n, 4, &mut stream_rng(2, 0, 0, 0)).unwrap();
        let l = contract_network(&g, TensorAssignment::Identical(&t), n).unwrap();
        for r in 0..n {
            for c in 0..n {
                let want: Complex<f64> = (0..n).map(|x| t.data[((c * n + x) * n + x) * n + r]).sum();
                assert!((l.get(r, c) - want).norm() < 1e-12);
            }
        }
    }
}

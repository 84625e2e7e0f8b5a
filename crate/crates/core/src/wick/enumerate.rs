use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loops::admissible;
use super::{build_closed_network, build_product_closed_network, ClosedNetwork, Ensemble, Pairing, WickError};
use crate::netgraph::TensorNetworkGraph;

/// Upper limit on the number of admissible pairings an exact enumeration may
/// visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub pairs: u128,
}

impl Budget {
    /// 10!, i.e. M = k|V| <= 10 in the identical ensemble.
    pub const DEFAULT_PAIRS: u128 = 3_628_800;
    pub const ENV: &'static str = "QMFLAB_BUDGET_PAIRS";

    /// Reads `QMFLAB_BUDGET_PAIRS`, falling back to the default when unset or
    /// unparsable.
    pub fn from_env() -> Self {
        let pairs = std::env::var(Self::ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_PAIRS);
        Self { pairs }
    }

    pub fn unlimited() -> Self {
        Self { pairs: u128::MAX }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            pairs: Self::DEFAULT_PAIRS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    pub budget: Budget,
    /// Collect the full polynomial. When false only the maximal loop count
    /// is wanted and branches that cannot reach it are pruned.
    pub full: bool,
    /// Keep every pairing attaining the maximum.
    pub collect_maximal: bool,
    /// Split the search over rayon by the match of the first plain node.
    pub parallel: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            full: true,
            collect_maximal: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Loop count -> number of pairings; `None` for pruned searches.
    pub coefficients: Option<BTreeMap<usize, u64>>,
    pub c_max: usize,
    pub n_max: u64,
    /// Maximal pairings, when requested, in lexicographic order.
    pub maximal: Vec<Pairing>,
    /// Number of admissible pairings (the search space size).
    pub pairings: u128,
}

/// E[N_c] as a polynomial in N: `coefficients[c]` pairings have `c` loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPolynomial {
    pub network: String,
    pub ensemble: Ensemble,
    /// Total number of `L^dagger L` factors.
    pub k: usize,
    /// Powers of the trace factors, e.g. `[1, 2]` for `tr(L'L) tr((L'L)^2)`.
    pub factors: Vec<usize>,
    pub c_max: usize,
    pub n_max: u64,
    pub coefficients: BTreeMap<usize, u64>,
}

impl MomentPolynomial {
    pub fn evaluate(&self, n: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(&e, &c)| c as f64 * n.powi(e as i32))
            .sum()
    }

    pub fn total_pairings(&self) -> u128 {
        self.coefficients.values().map(|&c| c as u128).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial serializes")
    }
}

/// Number of perfect matchings allowed by `ensemble`: admissibility is an
/// equivalence (equal degree, or equal tensor), so it is a product of
/// factorials over classes.
pub fn count_admissible(n: &ClosedNetwork, ensemble: Ensemble) -> u128 {
    let mut classes: BTreeMap<usize, (u128, u128)> = BTreeMap::new();
    for node in n.nodes() {
        let key = match ensemble {
            Ensemble::Identical => node.degree,
            Ensemble::Independent => node.tensor,
        };
        let c = classes.entry(key).or_default();
        if node.conjugate {
            c.1 += 1;
        } else {
            c.0 += 1;
        }
    }
    let mut total: u128 = 1;
    for (plain, conj) in classes.into_values() {
        if plain != conj {
            return 0;
        }
        for i in 2..=plain {
            total = total.saturating_mul(i);
        }
    }
    total
}

struct Search<'a> {
    n: &'a ClosedNetwork,
    plain: &'a [usize],
    cands: &'a [Vec<usize>],
    global_best: &'a AtomicUsize,
    full: bool,
    collect: bool,
    other_end: Vec<usize>,
    used: Vec<bool>,
    mates: Vec<usize>,
    undo: Vec<(usize, usize)>,
    loops: usize,
    open: usize,
    hist: Vec<u64>,
    best: usize,
    best_count: u64,
    best_list: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(
        n: &'a ClosedNetwork,
        plain: &'a [usize],
        cands: &'a [Vec<usize>],
        global_best: &'a AtomicUsize,
        opts: &EnumerateOptions,
    ) -> Self {
        let h = n.num_half_edges();
        Self {
            n,
            plain,
            cands,
            global_best,
            full: opts.full,
            collect: opts.collect_maximal,
            other_end: (0..h).map(|i| n.partner(i)).collect(),
            used: vec![false; n.nodes().len()],
            mates: vec![usize::MAX; plain.len()],
            undo: Vec::new(),
            loops: 0,
            open: h,
            hist: Vec::new(),
            best: 0,
            best_count: 0,
            best_list: Vec::new(),
        }
    }

    /// Links every slot of `x` to the same slot of `y`. Chain ends are kept
    /// in `other_end`; linking the two ends of one chain closes a loop.
    fn apply(&mut self, i: usize, y: usize) -> usize {
        let x = self.plain[i];
        let mut closed = 0;
        for s in 1..=self.n.nodes()[x].degree {
            let a = self.n.half(x, s);
            let b = self.n.half(y, s);
            let oa = self.other_end[a];
            if oa == b {
                closed += 1;
            } else {
                let ob = self.other_end[b];
                self.undo.push((oa, a));
                self.undo.push((ob, b));
                self.other_end[oa] = ob;
                self.other_end[ob] = oa;
            }
            self.open -= 2;
        }
        self.used[y] = true;
        self.mates[i] = y;
        self.loops += closed;
        closed
    }

    fn revert(&mut self, i: usize, y: usize, closed: usize, mark: usize) {
        while self.undo.len() > mark {
            let (h, old) = self.undo.pop().unwrap();
            self.other_end[h] = old;
        }
        self.open += 2 * self.n.nodes()[self.plain[i]].degree;
        self.loops -= closed;
        self.used[y] = false;
        self.mates[i] = usize::MAX;
    }

    fn leaf(&mut self) {
        let c = self.loops;
        if self.full {
            if self.hist.len() <= c {
                self.hist.resize(c + 1, 0);
            }
            self.hist[c] += 1;
        }
        if c > self.best || self.best_count == 0 {
            self.best = c;
            self.best_count = 0;
            self.best_list.clear();
            self.global_best.fetch_max(c, Ordering::Relaxed);
        }
        if c == self.best {
            self.best_count += 1;
            if self.collect {
                self.best_list.push(self.mates.clone());
            }
        }
    }

    fn run(&mut self, i: usize) {
        if i == self.plain.len() {
            self.leaf();
            return;
        }
        if !self.full {
            let bound = self.loops + self.open / 2;
            if bound < self.global_best.load(Ordering::Relaxed) || (self.best_count > 0 && bound < self.best) {
                return;
            }
        }
        for ci in 0..self.cands[i].len() {
            let y = self.cands[i][ci];
            if self.used[y] {
                continue;
            }
            let mark = self.undo.len();
            let closed = self.apply(i, y);
            self.run(i + 1);
            self.revert(i, y, closed, mark);
        }
    }
}

/// Enumerates every admissible pairing of a closed network.
pub fn enumerate_closed(
    n: &ClosedNetwork,
    ensemble: Ensemble,
    opts: EnumerateOptions,
) -> Result<Enumeration, WickError> {
    let pairings = count_admissible(n, ensemble);
    if pairings > opts.budget.pairs {
        return Err(WickError::Budget {
            pairings,
            budget: opts.budget.pairs,
        });
    }
    if pairings == 0 {
        return Err(WickError::NotAMatching(format!(
            "no admissible pairing exists in the {ensemble} ensemble"
        )));
    }
    let plain = n.plain_nodes();
    let conj = n.conjugate_nodes();
    let cands: Vec<Vec<usize>> = plain
        .iter()
        .map(|&x| conj.iter().copied().filter(|&y| admissible(n, ensemble, x, y)).collect())
        .collect();
    let global_best = AtomicUsize::new(0);

    let run_branch = |first: Option<usize>| -> Search<'_> {
        let mut s = Search::new(n, &plain, &cands, &global_best, &opts);
        match first {
            None => s.run(0),
            Some(y) => {
                s.apply(0, y);
                s.run(1);
            }
        }
        s
    };
    let results: Vec<Search<'_>> = if plain.is_empty() {
        vec![run_branch(None)]
    } else if opts.parallel {
        cands[0].par_iter().map(|&y| run_branch(Some(y))).collect()
    } else {
        cands[0].iter().map(|&y| run_branch(Some(y))).collect()
    };

    let c_max = results
        .iter()
        .filter(|s| s.best_count > 0)
        .map(|s| s.best)
        .max()
        .expect("at least one pairing");
    let mut n_max = 0;
    let mut maximal = Vec::new();
    let mut hist: Vec<u64> = Vec::new();
    for s in results {
        if s.best_count > 0 && s.best == c_max {
            n_max += s.best_count;
            for mates in s.best_list {
                let matches = plain.iter().copied().zip(mates).collect();
                maximal.push(Pairing::new(n, matches)?);
            }
        }
        if hist.len() < s.hist.len() {
            hist.resize(s.hist.len(), 0);
        }
        for (c, v) in s.hist.into_iter().enumerate() {
            hist[c] += v;
        }
    }
    let free = n.free_loops();
    let coefficients = opts.full.then(|| {
        hist.iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(c, &v)| (c + free, v))
            .collect()
    });
    Ok(Enumeration {
        coefficients,
        c_max: c_max + free,
        n_max,
        maximal,
        pairings,
    })
}

/// Maximal pairings only, with branch-and-bound pruning.
pub fn maximal_pairings(
    n: &ClosedNetwork,
    ensemble: Ensemble,
    budget: Budget,
) -> Result<Enumeration, WickError> {
    enumerate_closed(
        n,
        ensemble,
        EnumerateOptions {
            budget,
            full: false,
            collect_maximal: true,
            parallel: true,
        },
    )
}

fn polynomial(
    n: &ClosedNetwork,
    network: &str,
    factors: Vec<usize>,
    ensemble: Ensemble,
) -> Result<MomentPolynomial, WickError> {
    let opts = EnumerateOptions {
        budget: Budget::from_env(),
        ..EnumerateOptions::default()
    };
    let e = enumerate_closed(n, ensemble, opts)?;
    Ok(MomentPolynomial {
        network: network.to_string(),
        ensemble,
        k: factors.iter().sum(),
        factors,
        c_max: e.c_max,
        n_max: e.n_max,
        coefficients: e.coefficients.expect("full enumeration"),
    })
}

/// E[tr((L^dagger L)^k)] exactly. The budget comes from `QMFLAB_BUDGET_PAIRS`.
pub fn enumerate_moment(
    g: &TensorNetworkGraph,
    k: usize,
    ensemble: Ensemble,
) -> Result<MomentPolynomial, WickError> {
    let n = build_closed_network(g, k)?;
    polynomial(&n, g.name(), vec![k], ensemble)
}

/// E[prod_i tr((L^dagger L)^{k_i})] exactly, with the same tensors in every
/// factor.
pub fn enumerate_product_moment(
    g: &TensorNetworkGraph,
    ks: &[usize],
    ensemble: Ensemble,
) -> Result<MomentPolynomial, WickError> {
    if ks.is_empty() {
        return Err(WickError::InvalidK);
    }
    let parts = ks
        .iter()
        .map(|&k| build_closed_network(g, k))
        .collect::<Result<Vec<_>, _>>()?;
    let n = build_product_closed_network(&parts)?;
    polynomial(&n, g.name(), ks.to_vec(), ensemble)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn poly(g: &TensorNetworkGraph, k: usize, e: Ensemble) -> Vec<(usize, u64)> {
        enumerate_moment(g, k, e).unwrap().coefficients.into_iter().collect()
    }

    #[test]
    fn figconn_first_moment() {
        let g = fixtures::figconn();
        assert_eq!(poly(&g, 1, Ensemble::Identical), vec![(3, 1), (6, 1)]);
        assert_eq!(poly(&g, 1, Ensemble::Independent), vec![(6, 1)]);
    }

    #[test]
    fn chain_d2_catalan() {
        let g = fixtures::chain_d2();
        assert_eq!(poly(&g, 1, Ensemble::Identical), vec![(2, 1)]);
        assert_eq!(poly(&g, 2, Ensemble::Identical), vec![(3, 2)]);
        assert_eq!(poly(&g, 3, Ensemble::Identical), vec![(2, 1), (4, 5)]);
    }

    #[test]
    fn pruned_search_agrees_with_full() {
        for g in fixtures::all() {
            for k in 1..=2 {
                let n = build_closed_network(&g, k).unwrap();
                for ens in [Ensemble::Identical, Ensemble::Independent] {
                    let full = enumerate_closed(&n, ens, EnumerateOptions::default()).unwrap();
                    let max = maximal_pairings(&n, ens, Budget::default()).unwrap();
                    assert_eq!((full.c_max, full.n_max), (max.c_max, max.n_max), "{} k={k}", g.name());
                    assert_eq!(max.maximal.len() as u64, max.n_max);
                    assert!(max.maximal.iter().all(|p| p.loop_count == max.c_max));
                }
            }
        }
    }

    #[test]
    fn sequential_equals_parallel() {
        let n = build_closed_network(&fixtures::fig_s_less_t(), 2).unwrap();
        let par = enumerate_closed(&n, Ensemble::Identical, EnumerateOptions::default()).unwrap();
        let seq = enumerate_closed(
            &n,
            Ensemble::Identical,
            EnumerateOptions { parallel: false, ..EnumerateOptions::default() },
        )
        .unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.pairings, 720);
    }

    #[test]
    fn budget_is_enforced() {
        let n = build_closed_network(&fixtures::fignum_candidate(), 3).unwrap();
        let err = enumerate_closed(&n, Ensemble::Identical, EnumerateOptions::default()).unwrap_err();
        assert!(matches!(err, WickError::Budget { pairings: 479_001_600, .. }));
    }

    #[test]
    fn identity_network_is_a_constant() {
        let g = fixtures::identity_edge();
        assert_eq!(poly(&g, 3, Ensemble::Identical), vec![(1, 1)]);
    }

    #[test]
    fn json_shape() {
        let p = enumerate_moment(&fixtures::figconn(), 1, Ensemble::Identical).unwrap();
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["coefficients"]["6"], 1);
        assert_eq!(v["coefficients"]["3"], 1);
        assert_eq!(v["c_max"], 6);
        assert_eq!(v["ensemble"], "identical");
        let back: MomentPolynomial = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}

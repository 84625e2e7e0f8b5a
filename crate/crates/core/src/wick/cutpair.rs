use serde::Serialize;

use super::{build_closed_network, is_direct_pairing, maximal_pairings, Budget, Ensemble, Pairing, WickError};
use crate::netgraph::{min_cut, Cut, TensorNetworkGraph};

/// The pairing built from a min cut. Input edges join `(v; s)` to
/// `(v; s+1)` for odd `s`, output edges for even `s`; a vertex on the input
/// side is paired along its input edges, `(v; s)` with `(v; s+1)` for odd
/// `s`, and a vertex on the output side along its output edges, `(v; s)`
/// with `(v; s+1)` for even `s` (indices mod 2k). It has `k|E| - (k-1) MC`
/// loops.
pub fn build_cut_pairing(g: &TensorNetworkGraph, cut: &Cut, k: usize) -> Result<Pairing, WickError> {
    let cut = Cut::from_sbar(g, cut.sbar.clone())?;
    let mc = min_cut(g).value;
    if cut.size() != mc {
        return Err(WickError::NonMinimalCut { size: cut.size(), mc });
    }
    let n = build_closed_network(g, k)?;
    let nv = g.num_vertices();
    let sigmas = 2 * k;
    let node = |v: usize, sigma: usize| ((sigma - 1) % sigmas) * nv + v;
    let mut matches = Vec::with_capacity(k * nv);
    for v in 0..nv {
        for odd in (1..=sigmas).step_by(2) {
            if cut.sbar.contains(&v) {
                matches.push((node(v, odd), node(v, odd + 1)));
            } else {
                // (v; odd) is the successor of the even copy before it
                let even = if odd == 1 { sigmas } else { odd - 1 };
                matches.push((node(v, odd), node(v, even)));
            }
        }
    }
    let p = Pairing::new(&n, matches)?;
    let expected = k * g.num_edges() - (k - 1) * mc;
    if p.loop_count != expected {
        return Err(WickError::LemmaViolation(format!(
            "cut pairing of {} at k={k} has {} loops, expected {expected}",
            g.name(),
            p.loop_count
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmaxReport {
    pub network: String,
    pub k: usize,
    pub edges: usize,
    pub mc: usize,
    /// `k|E| - (k-1) MC`.
    pub formula: usize,
    pub c_max: usize,
    pub n_max: u64,
    pub maximal_all_direct: bool,
    /// `k * sum_i l(i)` over the flow paths, `l(i)` counting the vertices on
    /// path `i`; the envelope is `n_max <= 4^envelope_exponent`.
    pub envelope_exponent: usize,
    pub within_envelope: bool,
}

/// Enumerates the maximal pairings of `tr((L^dagger L)^k)` in the identical
/// ensemble and checks them against the min-cut formula. A failed check is a
/// [`WickError::LemmaViolation`].
pub fn verify_cmax_formula(g: &TensorNetworkGraph, k: usize) -> Result<CmaxReport, WickError> {
    let mc = min_cut(g);
    let n = build_closed_network(g, k)?;
    let e = maximal_pairings(&n, Ensemble::Identical, Budget::from_env())?;
    let formula = k * g.num_edges() - (k - 1) * mc.value;
    if e.c_max != formula {
        return Err(WickError::LemmaViolation(format!(
            "{} at k={k}: C_max = {} but k|E| - (k-1)MC = {formula}",
            g.name(),
            e.c_max
        )));
    }
    if let Some(bad) = e.maximal.iter().find(|p| !is_direct_pairing(&n, p)) {
        return Err(WickError::LemmaViolation(format!(
            "{} at k={k}: maximal pairing {:?} is not direct",
            g.name(),
            bad.matches
        )));
    }
    let envelope_exponent = k * mc.paths.paths.iter().map(|p| p.vertices.len()).sum::<usize>();
    let within_envelope = (e.n_max as f64).log(4.0) <= envelope_exponent as f64 + 1e-9;
    Ok(CmaxReport {
        network: g.name().to_string(),
        k,
        edges: g.num_edges(),
        mc: mc.value,
        formula,
        c_max: e.c_max,
        n_max: e.n_max,
        maximal_all_direct: true,
        envelope_exponent,
        within_envelope,
    })
}

/// c(G, k): the number of maximal pairings. Both ensembles must agree on the
/// maximal loop count and on this number.
pub fn coefficient_c(g: &TensorNetworkGraph, k: usize) -> Result<u64, WickError> {
    let n = build_closed_network(g, k)?;
    let budget = Budget::from_env();
    let same = maximal_pairings(&n, Ensemble::Identical, budget)?;
    let ind = maximal_pairings(&n, Ensemble::Independent, budget)?;
    if (same.c_max, same.n_max) != (ind.c_max, ind.n_max) {
        return Err(WickError::LemmaViolation(format!(
            "{} at k={k}: identical ensemble gives (C_max, n_max) = ({}, {}), independent ({}, {})",
            g.name(),
            same.c_max,
            same.n_max,
            ind.c_max,
            ind.n_max
        )));
    }
    Ok(same.n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::wick::{count_loops, is_direct_pairing};

    #[test]
    fn fignocut_k2_cut_pairing() {
        let g = fixtures::fignocut();
        let cut = min_cut(&g).cut;
        let p = build_cut_pairing(&g, &cut, 2).unwrap();
        assert_eq!(p.loop_count, 8);
        let n = build_closed_network(&g, 2).unwrap();
        assert_eq!(count_loops(&n, &p), 8);
        assert!(is_direct_pairing(&n, &p));
    }

    #[test]
    fn k1_cut_pairing_is_the_square_pairing() {
        for g in fixtures::all() {
            if g.num_vertices() == 0 {
                continue;
            }
            let p = build_cut_pairing(&g, &min_cut(&g).cut, 1).unwrap();
            assert_eq!(p.loop_count, g.num_edges());
            let nv = g.num_vertices();
            assert!(p.matches.iter().all(|&(x, y)| y == x + nv));
        }
    }

    #[test]
    fn fig_s_less_t_k2() {
        let g = fixtures::fig_s_less_t();
        let p = build_cut_pairing(&g, &min_cut(&g).cut, 2).unwrap();
        assert_eq!(p.loop_count, 2 * g.num_edges() - 1);
    }

    #[test]
    fn non_minimal_cut_is_flagged() {
        let g = fixtures::fignocut();
        let all_input = Cut::from_sbar(&g, (0..2).collect()).unwrap();
        assert_eq!(all_input.size(), 2);
        assert!(build_cut_pairing(&g, &all_input, 2).is_ok());
        let g = fixtures::fig_s_less_t();
        let wide = Cut::from_sbar(&g, (0..3).collect()).unwrap();
        assert_eq!(
            build_cut_pairing(&g, &wide, 2).unwrap_err(),
            WickError::NonMinimalCut { size: 4, mc: 1 }
        );
    }

    #[test]
    fn cmax_report_chain_k3() {
        let r = verify_cmax_formula(&fixtures::chain_d2(), 3).unwrap();
        assert_eq!((r.c_max, r.n_max), (4, 5));
        assert!(r.within_envelope);
    }

    #[test]
    fn coefficients_of_case_fixtures() {
        assert_eq!(coefficient_c(&fixtures::fig_s_less_t(), 2).unwrap(), 1);
        assert_eq!(coefficient_c(&fixtures::chain_d2(), 2).unwrap(), 2);
        assert_eq!(coefficient_c(&fixtures::fignocut(), 2).unwrap(), 2);
    }
}

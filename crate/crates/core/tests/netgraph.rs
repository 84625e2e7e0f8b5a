mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qmflab::fixtures;
use qmflab::netgraph::{classify_case, min_cut, split_at_cut, CaseLabel, Cut, EdgeKind, Side, TensorNetworkGraph};

/// Brute-force min cut over all vertex bipartitions.
fn brute_force_mc(g: &TensorNetworkGraph) -> usize {
    let n = g.num_vertices();
    (0..1usize << n)
        .map(|mask| {
            let sbar: BTreeSet<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            Cut::from_sbar(g, sbar).unwrap().size()
        })
        .min()
        .unwrap()
}

fn check_flow_paths(g: &TensorNetworkGraph) {
    let mc = min_cut(g);
    assert_eq!(mc.cut.size(), mc.value);
    assert_eq!(mc.paths.paths.len(), mc.value);
    let mut used = BTreeSet::new();
    for p in &mc.paths.paths {
        for &e in &p.edges {
            assert!(used.insert(e), "edge {e} on two paths");
        }
        let first = g.edge_by_id(p.edges[0]).unwrap();
        let last = g.edge_by_id(*p.edges.last().unwrap()).unwrap();
        assert!(first.is_input_side());
        assert!(last.is_output_side());
    }
}

#[test]
fn fixtures_min_cut_matches_brute_force() {
    for g in fixtures::all() {
        assert_eq!(min_cut(&g).value, brute_force_mc(&g), "{}", g.name());
        check_flow_paths(&g);
    }
}

#[test]
fn fixture_labels() {
    assert_eq!(min_cut(&fixtures::fignocut()).value, 2);
    assert_eq!(min_cut(&fixtures::fig_s_less_t()).value, 1);
    assert_eq!(classify_case(&fixtures::fignocut()), CaseLabel::CaseIII);
    assert_eq!(classify_case(&fixtures::fig_s_less_t()), CaseLabel::CaseI);
    assert_eq!(classify_case(&fixtures::figconn()), CaseLabel::Splittable);
    assert!(!fixtures::two_scalars().is_connected_network());
}

#[test]
fn product_of_nocut_and_s_less_t() {
    let p = fixtures::fignocut().product(&fixtures::fig_s_less_t());
    assert_eq!(min_cut(&p).value, 3);
}

#[test]
fn trivial_cut_makes_identity_only_half() {
    let g = fixtures::fignocut();
    let (g1, g2) = split_at_cut(&g, &Cut::from_sbar(&g, BTreeSet::new()).unwrap()).unwrap();
    assert_eq!(g1.num_vertices(), 0);
    assert_eq!(g1.num_identity_edges(), g1.num_edges());
    assert_eq!(g1.num_edges() + g2.num_edges(), g.num_edges() + 2);
}

#[test]
fn case_one_removal_increases_mc() {
    let g = fixtures::fig_s_less_t();
    let mc = min_cut(&g).value;
    let input_vertex = match g.edges().iter().find(|e| e.is_input_side()).unwrap().kind {
        EdgeKind::Input(p) => p.vertex,
        _ => unreachable!(),
    };
    let id = g.vertices()[input_vertex].id.clone();
    let reduced = g.remove_vertex(&id, Side::Input).unwrap();
    assert!(min_cut(&reduced).value >= mc + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_equals_cut_on_random_networks(
        vertices in 1usize..=8,
        degree in 2usize..=4,
        inputs in 1usize..=3,
        outputs in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let Some(g) = common::small_network(vertices, degree, inputs, outputs, seed) else {
            return Ok(());
        };
        prop_assert_eq!(min_cut(&g).value, brute_force_mc(&g));
        check_flow_paths(&g);
    }

    #[test]
    fn split_conserves_edges(
        vertices in 1usize..=7,
        degree in 2usize..=4,
        inputs in 1usize..=3,
        outputs in 1usize..=3,
        seed in any::<u64>(),
        mask in any::<u8>(),
    ) {
        let Some(g) = common::small_network(vertices, degree, inputs, outputs, seed) else {
            return Ok(());
        };
        let sbar: BTreeSet<usize> = (0..g.num_vertices()).filter(|v| mask >> v & 1 == 1).collect();
        let cut = Cut::from_sbar(&g, sbar).unwrap();
        let (g1, g2) = split_at_cut(&g, &cut).unwrap();
        prop_assert_eq!(g1.num_edges() + g2.num_edges(), g.num_edges() + cut.size());
        let mc = min_cut(&g);
        let (h1, h2) = split_at_cut(&g, &mc.cut).unwrap();
        prop_assert_eq!(min_cut(&h1).value, mc.value);
        prop_assert_eq!(min_cut(&h2).value, mc.value);
    }

    #[test]
    fn product_is_additive(
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        v1 in 1usize..=4,
        v2 in 1usize..=4,
    ) {
        let (Some(a), Some(b)) = (
            common::small_network(v1, 3, 1, 1, s1),
            common::small_network(v2, 3, 2, 2, s2),
        ) else {
            return Ok(());
        };
        let p = a.product(&b);
        prop_assert_eq!(p.num_edges(), a.num_edges() + b.num_edges());
        prop_assert_eq!(min_cut(&p).value, min_cut(&a).value + min_cut(&b).value);
    }

    #[test]
    fn case_one_vertex_removal(
        vertices in 2usize..=6,
        seed in any::<u64>(),
    ) {
        let Some(g) = common::small_network(vertices, 3, 1, 3, seed) else {
            return Ok(());
        };
        if classify_case(&g) != CaseLabel::CaseI {
            return Ok(());
        }
        // every vertex holding an input end sits next to the unique min cut
        let mc = min_cut(&g).value;
        for e in g.edges() {
            if let EdgeKind::Input(p) = e.kind {
                let id = g.vertices()[p.vertex].id.clone();
                if let Ok(r) = g.remove_vertex(&id, Side::Input) {
                    prop_assert!(min_cut(&r).value > mc);
                }
            }
        }
    }
}

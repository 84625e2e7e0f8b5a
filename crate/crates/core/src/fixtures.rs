//! Networks shipped with the crate. The JSON sources live in `fixtures/`.

use crate::netgraph::{load_network, TensorNetworkGraph};

macro_rules! fixture {
    ($(#[$doc:meta])* $fn:ident, $file:literal) => {
        $(#[$doc])*
        pub fn $fn() -> TensorNetworkGraph {
            load_network(include_str!(concat!("../fixtures/", $file)))
                .expect(concat!("fixture ", $file, " is valid"))
        }
    };
}

fixture!(
    /// Two degree-3 vertices with no closed edges: `a` has two inputs and one
    /// output, `b` one input and two outputs. Connected although the
    /// underlying graph is not. |E| = 6, MC = 2.
    figconn,
    "figconn.json"
);
fixture!(
    /// Two degree-3 vertices, each with one input and one output, joined by
    /// one closed edge. |S| = |T| = MC = 2, no nontrivial min cut.
    fignocut,
    "fignocut.json"
);
fixture!(
    /// One input vertex feeding two vertices with two outputs each.
    /// |S| = MC = 1, |T| = 4.
    fig_s_less_t,
    "figSlessT.json"
);
fixture!(
    /// A single degree-2 vertex: L is the sampled N x N matrix itself.
    chain_d2,
    "chain_d2.json"
);
fixture!(
    /// Four degree-3 vertices, two inputs, two outputs, four closed edges
    /// between the input pair and the output pair. |E| = 8, MC = 2 and no
    /// nontrivial min cut; with one Gaussian tensor at every vertex the
    /// operator loses exactly one rank when N = 2, 3 mod 4.
    fignum_candidate,
    "fignum_candidate.json"
);
fixture!(
    /// Three degree-4 vertices in a chain with doubled links. Same counts as
    /// `fignum_candidate` but splittable, and full rank for every N.
    fignum_chain,
    "fignum_chain.json"
);
fixture!(
    /// No vertices, one identity edge.
    identity_edge,
    "identity.json"
);
fixture!(
    /// Two degree-0 vertices and no edges: not a connected network.
    two_scalars,
    "two_scalars.json"
);

/// The connected fixtures, in a fixed order.
pub fn all() -> Vec<TensorNetworkGraph> {
    vec![
        figconn(),
        fignocut(),
        fig_s_less_t(),
        chain_d2(),
        fignum_candidate(),
        fignum_chain(),
        identity_edge(),
    ]
}

/// Looks a fixture up by its file stem (`figSlessT`, `fignum_candidate`, ...).
pub fn by_name(name: &str) -> Option<TensorNetworkGraph> {
    Some(match name {
        "figconn" => figconn(),
        "fignocut" => fignocut(),
        "figSlessT" => fig_s_less_t(),
        "chain_d2" => chain_d2(),
        "fignum_candidate" => fignum_candidate(),
        "fignum_chain" => fignum_chain(),
        "identity" => identity_edge(),
        "two_scalars" => two_scalars(),
        _ => return None,
    })
}

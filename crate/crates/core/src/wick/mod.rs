//! Exact Gaussian moments of closed tensor networks by Wick pairing.
//!
//! A closed network `tr((L^dagger L)^k)` has `M = k|V|` copies of the tensor
//! and `M` of its conjugate. The expectation is a sum over perfect matchings
//! of copies with conjugates, each contributing `N^C` where `C` counts the
//! closed index loops. [`enumerate_moment`] collects the exponents into a
//! [`MomentPolynomial`].

mod closed;
mod cutpair;
mod enumerate;
mod loops;
mod reduce;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::GraphError;

pub use closed::{build_closed_network, build_product_closed_network, ClosedEdge, ClosedNetwork, ClosedNode, HalfEdge};
pub use cutpair::{build_cut_pairing, coefficient_c, verify_cmax_formula, CmaxReport};
pub use enumerate::{
    enumerate_closed, enumerate_moment, enumerate_product_moment, maximal_pairings, Budget,
    Enumeration, EnumerateOptions, MomentPolynomial,
};
pub use loops::{count_loops, Pairing};
pub use reduce::{has_admissible_step, is_direct_pairing, reduce_one_step, PartialPairing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WickError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{pairings} admissible pairings exceed the enumeration budget of {budget}; use the Monte-Carlo estimator")]
    Budget { pairings: u128, budget: u128 },
    #[error("not a perfect matching: {0}")]
    NotAMatching(String),
    #[error("nodes {0} and {1} share no slot-matched edge")]
    NoAdmissibleEdge(usize, usize),
    #[error("cut of size {size} is not minimal (MC = {mc})")]
    NonMinimalCut { size: usize, mc: usize },
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How tensors are placed on the vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// One tensor, reused at every vertex.
    Identical,
    /// A fresh tensor per vertex.
    Independent,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Identical => "identical",
            Ensemble::Independent => "independent",
        })
    }
}

impl FromStr for Ensemble {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identical" => Ok(Ensemble::Identical),
            "independent" => Ok(Ensemble::Independent),
            other => Err(format!("unknown ensemble `{other}` (identical|independent)")),
        }
    }
}

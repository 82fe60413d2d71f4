//! Nonnegative matrices attached to a tree map and rigorous bounds on their
//! spectral radius.
//!
//! `λ(M)` is never reported as a bare float. Bounds come with a positive
//! witness vector `v` that can be re-checked in exact arithmetic: `M v < λ v`
//! proves `λ(M) < λ`, and `M v ≥ λ v` with `v ≥ 0, v ≠ 0` proves `λ(M) ≥ λ`.

mod certificate;
mod matrix;
mod scc;

pub use certificate::{
    certify_lower, certify_upper, perron_f64, spectral_radius_estimate, BoundKind, SpectralCertificate,
    SpectralEstimate, EXACT_SOLVE_LIMIT,
};
pub use matrix::Matrix;
pub use scc::{scc_decomposition, SccBlock, SccDecomposition};

use crate::scalar::Scalar;
use crate::tree::{MarkedTreeMap, Tree};

/// Row and column labels `e0, e1, ..` of a tree's edges.
pub fn edge_labels(tree: &Tree) -> Vec<String> {
    tree.edges().map(|(e, _)| e.to_string()).collect()
}

/// `b_ij = Σ 1/w(J)` over segments `J ⊂ I_i` mapping onto `I_j`.
pub fn transition_matrix<S: Scalar>(tm: &MarkedTreeMap<S>) -> Matrix<S> {
    let mut m = Matrix::zeros(edge_labels(tm.tree()));
    for seg in tm.segments() {
        m.add_to(seg.edge.0, seg.image.0, S::one() / seg.weight.clone());
    }
    m
}

/// Number of segments of `I_i` mapping onto `I_j`.
pub fn count_matrix<S: Scalar>(tm: &MarkedTreeMap<S>) -> Matrix<S> {
    let mut m = Matrix::zeros(edge_labels(tm.tree()));
    for seg in tm.segments() {
        m.add_to(seg.edge.0, seg.image.0, S::one());
    }
    m
}

/// Exact `M^n`.
pub fn matrix_power<S: Scalar>(m: &Matrix<S>, n: u32) -> Matrix<S> {
    m.pow(n)
}

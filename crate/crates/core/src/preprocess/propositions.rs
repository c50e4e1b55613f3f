//! Eigenvalue-gap conditions for activation and enhancement of the capacity of
//! rank-2 two-qubit states.
//!
//! With two nonzero global eigenvalues and a qubit receiver, both entropies
//! in `1 + S(ρ^R) − S(ρ)` are binary entropies of eigenvalue gaps:
//! `k₀`, `k₀′` before and `k`, `k′` after pre-processing (global, receiver).
//! - Activation condition: `k′ < k` (equivalent to `S(ρ_p^R) > S(ρ_p)`).
//! - Enhancement condition: `(k₀′ − k′) > (k₀ − k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::measures::{dcc_ns1r, Scenario};
use crate::sampling::RANK_TOL;

/// Gaps closer than this are not "smaller".
pub const GAP_TIE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionCheck {
    /// `k′ < k`.
    pub prop1: bool,
    /// `(k₀′ − k′) > (k₀ − k)`.
    pub prop2: bool,
    pub k0: f64,
    pub k0_prime: f64,
    pub k: f64,
    pub k_prime: f64,
    /// Capacity after pre-processing exceeds the classical value.
    pub post_nonclassical: bool,
    /// Capacity after pre-processing exceeds the capacity before.
    pub post_enhanced: bool,
}

fn gap(spectrum_ascending: &[f64]) -> f64 {
    let n = spectrum_ascending.len();
    spectrum_ascending[n - 1] - spectrum_ascending[n - 2]
}

fn global_gap(rho: &DensityMatrix, which: &str) -> Result<f64> {
    let w = rho.eigenvalues();
    let n = w.len();
    if w[..n - 2].iter().any(|&x| x > RANK_TOL) {
        return Err(Error::UnsupportedRank {
            rank: w.iter().filter(|&&x| x > RANK_TOL).count(),
            reason: format!("the {which} state must have at most two nonzero eigenvalues"),
        });
    }
    Ok(gap(&w))
}

fn receiver_gap(rho: &DensityMatrix) -> Result<f64> {
    let r: ComplexMatrix = rho.partial_trace(&[1])?.into_mat();
    Ok(gap(&crate::linalg::eigvals_hermitian(&r)?))
}

/// Evaluate both gap conditions for a two-qubit state before and after
/// pre-processing. Fails with [`Error::UnsupportedRank`] when either state
/// has more than two nonzero eigenvalues.
pub fn check_propositions(pre: &DensityMatrix, post: &DensityMatrix) -> Result<PropositionCheck> {
    if pre.dims() != [2, 2] || post.dims() != [2, 2] {
        return Err(Error::DimensionMismatch("proposition checks need two-qubit states".into()));
    }
    let k0 = global_gap(pre, "initial")?;
    let k = global_gap(post, "post-processed")?;
    let k0_prime = receiver_gap(pre)?;
    let k_prime = receiver_gap(post)?;
    let s = Scenario::one_sender_one_receiver();
    let before = dcc_ns1r(pre, &s)?;
    let after = dcc_ns1r(post, &s)?;
    Ok(PropositionCheck {
        prop1: k - k_prime > GAP_TIE_TOL,
        prop2: (k0_prime - k_prime) - (k0 - k) > GAP_TIE_TOL,
        k0,
        k0_prime,
        k,
        k_prime,
        post_nonclassical: after > 1.0 + 1e-9,
        post_enhanced: after > before + 1e-9,
    })
}

//! Closed-form predictions for the mean dense-coding capacity of random
//! two-qubit states, and Monte Carlo estimates to compare them with.
//!
//! The prediction combines two averages:
//! - the mean entropy of an `M`-dimensional marginal of a random pure state on
//!   `M·K` dimensions, approximated by `log₂M − M/(2K)`;
//! - the exact mean entropy of a single-qubit marginal of a random pure state,
//!   a finite double sum that is evaluated here in exact rational arithmetic.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{dcc, dcc_quantum_branch, Scenario};
use crate::sampling::{derive_sample_seed, haar_mixed_factor};

/// Bath size used for the large-`N` column of the mean-capacity table.
pub const LARGE_N: u64 = 100;

/// Predicted mean entropies and mean capacity for one rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanDccPrediction {
    pub rank: usize,
    pub mean_joint_entropy: f64,
    pub mean_receiver_entropy: f64,
    /// `1 + mean_receiver_entropy − mean_joint_entropy`.
    pub mean_dcc: f64,
    pub n_used: u64,
}

/// Approximate mean entropy (bits) of an `m`-dimensional marginal of a random
/// pure state on `m·k` dimensions: `log₂m − m/(2k)`.
pub fn page_mean_entropy(m: u64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("the traced-out dimension K must be positive".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("the subsystem dimension M must be positive".into()));
    }
    Ok((m as f64).log2() - m as f64 / (2.0 * k as f64))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Exact mean entropy (bits) of one qubit of a random pure state whose
/// complement has dimension `n`:
///
/// `log₂e · (2N−1)! / ((N−2)! (N−1)! 4^{N−1}) · Σ_s C(N−2,s) (−1)^s /
/// ((s+2)(2s+3)) · Σ_{t=0}^{s+1} 1/(2t+1)`.
///
/// The alternating sum cancels catastrophically in floating point for large
/// `N`, so it is accumulated exactly and converted once at the end.
pub fn mean_single_qubit_entropy(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be at least 2")));
    }
    let ratio = |num: BigInt, den: BigInt| BigRational::new(num, den);
    let mut sum = BigRational::zero();
    let mut inner = BigRational::one(); // Σ_{t=0}^{s+1} 1/(2t+1), starts at s = −1
    for s in 0..=(n - 2) {
        inner += ratio(BigInt::one(), BigInt::from(2 * (s + 1) + 1));
        let term = ratio(binomial(n - 2, s), BigInt::from((s + 2) * (2 * s + 3))) * inner.clone();
        if s % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let prefactor = ratio(
        factorial(2 * n - 1),
        factorial(n - 2) * factorial(n - 1) * BigInt::from(4u8).pow((n - 1) as u32),
    );
    let nats = (prefactor * sum)
        .to_f64()
        .ok_or_else(|| Error::InvalidParameter(format!("mean entropy for N = {n} is not representable")))?;
    Ok(nats * std::f64::consts::LOG2_E)
}

/// `N = (dimension of the purifying pure state) / 2` for a two-qubit state of
/// the given rank: the purification lives on `4·rank` dimensions.
pub fn purification_half_dim(rank: usize) -> u64 {
    2 * rank as u64
}

/// Predicted mean capacity of random two-qubit states of `rank`, using the
/// single-qubit formula with bath size `n`.
pub fn predict_mean_dcc(rank: usize, n: u64) -> Result<MeanDccPrediction> {
    if !(1..=4).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "two-qubit ranks are 1 to 4".into() });
    }
    let mean_joint_entropy = if rank == 1 { 0.0 } else { page_mean_entropy(4, rank as u64)? };
    let mean_receiver_entropy = mean_single_qubit_entropy(n)?;
    Ok(MeanDccPrediction {
        rank,
        mean_joint_entropy,
        mean_receiver_entropy,
        mean_dcc: 1.0 + mean_receiver_entropy - mean_joint_entropy,
        n_used: n,
    })
}

/// Sample means of the capacity of random two-qubit states of `rank`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloMeans {
    pub rank: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Mean of `1 + S(ρ^R) − S(ρ)` without the classical floor.
    pub quantum_branch: f64,
    /// Mean of `max(1, 1 + S(ρ^R) − S(ρ))`.
    pub clamped: f64,
}

/// Mean of `1 + S(ρ^R) − S(ρ)` over `n_samples` random two-qubit states.
pub fn montecarlo_mean_quantum_branch(rank: usize, n_samples: usize, seed: u64) -> Result<f64> {
    Ok(montecarlo_means(rank, n_samples, seed)?.quantum_branch)
}

/// Both the unfloored and the floored sample means, from the same states.
pub fn montecarlo_means(rank: usize, n_samples: usize, seed: u64) -> Result<MonteCarloMeans> {
    if !(1..=4).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "two-qubit ranks are 1 to 4".into() });
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    let scenario = Scenario::one_sender_one_receiver();
    let values: Vec<(f64, f64)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let f = haar_mixed_factor(&[2, 2], rank, derive_sample_seed(seed, i as u64))?;
            Ok((dcc_quantum_branch(&f, &scenario)?, dcc(&f, &scenario)?))
        })
        .collect::<Result<_>>()?;
    let n = n_samples as f64;
    Ok(MonteCarloMeans {
        rank,
        n_samples,
        seed,
        quantum_branch: values.iter().map(|v| v.0).sum::<f64>() / n,
        clamped: values.iter().map(|v| v.1).sum::<f64>() / n,
    })
}

/// One row of the mean-capacity comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanDccRow {
    pub rank: usize,
    pub small_n: MeanDccPrediction,
    pub half_dim_n: MeanDccPrediction,
    pub large_n: MeanDccPrediction,
    pub numerical: MonteCarloMeans,
}

/// Predictions at `N = 2`, `N = dim/2` and `N = 100` next to Monte Carlo
/// means, for each rank in `ranks`. Rank `r` uses seed
/// `derive_sample_seed(seed, r)` so that rows are independent.
pub fn mean_dcc_table(ranks: &[usize], n_samples: usize, seed: u64) -> Result<Vec<MeanDccRow>> {
    ranks
        .iter()
        .map(|&rank| {
            Ok(MeanDccRow {
                rank,
                small_n: predict_mean_dcc(rank, 2)?,
                half_dim_n: predict_mean_dcc(rank, purification_half_dim(rank))?,
                large_n: predict_mean_dcc(rank, LARGE_N)?,
                numerical: montecarlo_means(rank, n_samples, derive_sample_seed(seed, rank as u64))?,
            })
        })
        .collect()
}

/// The table as CSV text with a fixed column order.
pub fn mean_dcc_table_csv(rows: &[MeanDccRow]) -> String {
    let mut out = String::from(
        "rank,analytic_n2,analytic_half_dim,half_dim_n,analytic_n100,numerical_quantum_branch,numerical_clamped,n_samples\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{},{:.6},{:.6},{:.6},{}",
            r.rank,
            r.small_n.mean_dcc,
            r.half_dim_n.mean_dcc,
            r.half_dim_n.n_used,
            r.large_n.mean_dcc,
            r.numerical.quantum_branch,
            r.numerical.clamped,
            r.numerical.n_samples
        );
    }
    out
}

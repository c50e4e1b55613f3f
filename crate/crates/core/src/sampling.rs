//! Haar-uniform pure states and rank-controlled random mixed states.
//!
//! A mixed state of rank `r` on `dims` is the marginal of a Haar-random pure
//! state on `dims ⊗ C^r`. Equivalently `ρ = G G^dagger / tr(G G^dagger)` with
//! `G` a `D × r` matrix of i.i.d. complex Gaussians, which is how it is built
//! here: the ancilla never has to be materialized.
//!
//! Every sample is drawn from its own ChaCha stream keyed by
//! [`derive_sample_seed`], so results do not depend on how samples are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, PureState, StateFactor, C64};

/// Eigenvalues above this count towards the numerical rank.
pub const RANK_TOL: f64 = 1e-10;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Bijective 64-bit finalizer (splitmix64).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` in a run keyed by `master_seed`.
///
/// Injective in `index` for a fixed master seed: the affine step is a
/// bijection of `u64` (odd multiplier) and so is the finalizer.
pub fn derive_sample_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Settings for a batch of random states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub master_seed: u64,
    pub n_samples: usize,
    pub dims: Vec<usize>,
    pub target_rank: usize,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        check_request(&self.dims, self.target_rank)?;
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        Ok(())
    }

    /// The factored states of the batch, in sample order.
    pub fn factors(&self) -> Result<Vec<StateFactor>> {
        self.validate()?;
        (0..self.n_samples)
            .into_par_iter()
            .map(|i| haar_mixed_factor(&self.dims, self.target_rank, derive_sample_seed(self.master_seed, i as u64)))
            .collect()
    }
}

fn check_request(dims: &[usize], rank: usize) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch("subsystem dimensions must be positive".into()));
    }
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::UnsupportedRank {
            rank,
            reason: format!("rank must lie in 1..={d} for dimensions {dims:?}"),
        });
    }
    Ok(d)
}

fn gaussian_entries(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect()
}

/// Haar-random pure state on `dims`.
pub fn haar_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    let d = check_request(dims, 1)?;
    if d < 2 {
        return Err(Error::DimensionMismatch("total dimension must be at least 2".into()));
    }
    PureState::normalized(gaussian_entries(d, seed), dims.to_vec())
}

/// Random mixed state of exactly `rank` in factored form, normalized to unit trace.
///
/// Draws that land below full numerical rank (a measure-zero event) are
/// redrawn from the next seed in a sequence derived from `seed`.
pub fn haar_mixed_factor(dims: &[usize], rank: usize, seed: u64) -> Result<StateFactor> {
    let d = check_request(dims, rank)?;
    let mut attempt_seed = seed;
    for attempt in 0..64u64 {
        let mut f = StateFactor::new(dims.to_vec(), rank, gaussian_entries(d * rank, attempt_seed))?;
        f.normalize();
        if rank == 1 || f.spectrum().iter().filter(|&&w| w > RANK_TOL).count() == rank {
            return Ok(f);
        }
        attempt_seed = derive_sample_seed(seed, attempt);
    }
    Err(Error::UnsupportedRank { rank, reason: "could not draw a full-rank sample".into() })
}

/// Random mixed state of exactly `rank` as a dense density matrix.
pub fn haar_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    Ok(haar_mixed_factor(dims, rank, seed)?.to_density())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_repeatable() {
        assert_ne!(derive_sample_seed(5, 0), derive_sample_seed(5, 1));
        assert_eq!(derive_sample_seed(5, 7), derive_sample_seed(5, 7));
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| derive_sample_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn single_qubit_is_normalized() {
        let psi = haar_pure(&[2], 3).unwrap();
        let n: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_requests_are_checked() {
        assert!(haar_mixed(&[2, 2], 5, 1).is_err());
        assert!(haar_mixed(&[2, 2], 0, 1).is_err());
        assert!(haar_pure(&[1], 1).is_err());
    }

    #[test]
    fn rank_one_mixed_is_pure() {
        let rho = haar_mixed(&[2, 2], 1, 9).unwrap();
        assert!(crate::linalg::von_neumann_entropy(&rho) < 1e-10);
    }

    #[test]
    fn three_qubit_rank_six() {
        let rho = haar_mixed(&[2, 2, 2], 6, 11).unwrap();
        assert_eq!(rho.numerical_rank(RANK_TOL), 6);
        assert_eq!(rho.dims(), &[2, 2, 2]);
    }
}

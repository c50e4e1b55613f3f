//! Do the family envelopes still bound the capacity after local POVMs?
//!
//! Each random state is compared at its *initial* negativity: the averaged
//! optimum `A2` against the Werner curve (two qubits), and both `O` and `A2`
//! against the upper envelope (pure states for two qubits, gGHZ for three).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::envelope::EnvelopeFamily;
use super::{check_rank, check_samples, Progress};
use crate::error::Result;
use crate::families::BOUND_SLACK;
use crate::measures::{dcc, negativity};
use crate::preprocess::{evaluate_merits, ActingSet, MeritSettings, Objective};
use crate::sampling::{derive_sample_seed, haar_mixed_factor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostPovmPoint {
    pub sample_index: usize,
    pub negativity: f64,
    pub dcc_before: f64,
    #[serde(rename = "O")]
    pub o: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub upper_curve: f64,
    pub lower_curve: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostPovmReport {
    pub family: EnvelopeFamily,
    pub rank: usize,
    pub acting: ActingSet,
    pub n_samples: usize,
    pub seed: u64,
    /// States whose `A2` falls below the Werner curve (two qubits only).
    pub lower_violations: Option<usize>,
    /// Largest `lower(N) − A2`.
    pub worst_lower_margin: Option<f64>,
    /// States whose best single outcome `O` exceeds the upper envelope.
    pub o_above_upper: usize,
    /// States whose `A2` exceeds the upper envelope.
    pub a2_above_upper: usize,
    /// Largest `O − upper(N)`.
    pub worst_upper_margin: f64,
    pub points: Vec<PostPovmPoint>,
}

pub fn run_postpovm_bound_check(
    family: EnvelopeFamily,
    rank: usize,
    n_samples: usize,
    acting: ActingSet,
    settings: &MeritSettings,
    seed: u64,
    progress: &Progress,
) -> Result<PostPovmReport> {
    let kind = family.scenario_kind();
    check_rank(kind, rank)?;
    check_samples(n_samples)?;
    let scenario = kind.scenario();
    let points: Vec<PostPovmPoint> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let state_seed = derive_sample_seed(seed, i as u64);
            let f = haar_mixed_factor(&scenario.qubit_dims(), rank, state_seed)?;
            let neg = negativity(&f.to_density(), &scenario.senders)?;
            let before = dcc(&f, &scenario)?;
            let report =
                evaluate_merits(&f, &scenario, acting, Objective::Dcc, settings, derive_sample_seed(state_seed, 1))?
                    .report;
            progress.tick();
            Ok(PostPovmPoint {
                sample_index: i,
                negativity: neg,
                dcc_before: before,
                o: report.o,
                a2: report.a2,
                upper_curve: family.upper_curve(neg),
                lower_curve: family.lower_curve(neg),
            })
        })
        .collect::<Result<_>>()?;
    let lower_margins: Option<Vec<f64>> = points.iter().map(|p| p.lower_curve.map(|w| w - p.a2)).collect();
    Ok(PostPovmReport {
        family,
        rank,
        acting,
        n_samples,
        seed,
        lower_violations: lower_margins.as_ref().map(|m| m.iter().filter(|&&x| x > BOUND_SLACK).count()),
        worst_lower_margin: lower_margins.as_ref().map(|m| m.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        o_above_upper: points.iter().filter(|p| p.o - p.upper_curve > BOUND_SLACK).count(),
        a2_above_upper: points.iter().filter(|p| p.a2 - p.upper_curve > BOUND_SLACK).count(),
        worst_upper_margin: points.iter().map(|p| p.o - p.upper_curve).fold(f64::NEG_INFINITY, f64::max),
        points,
    })
}

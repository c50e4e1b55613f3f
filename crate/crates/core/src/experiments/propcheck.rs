//! How often the eigenvalue-gap conditions accompany activation and
//! enhancement of the capacity of random two-qubit states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_rank, check_samples, Progress};
use crate::error::{Error, Result};
use crate::measures::ScenarioKind;
use crate::preprocess::{
    check_propositions, evaluate_merits, ActingSet, Classification, MeritSettings, Objective, PropositionCheck,
};
use crate::sampling::{derive_sample_seed, haar_mixed_factor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropRecord {
    pub sample_index: usize,
    pub merit_before: f64,
    #[serde(rename = "O")]
    pub o: f64,
    pub classification: Classification,
    /// `None` when the state after the optimal outcome has rank above two.
    pub check: Option<PropositionCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropcheckReport {
    pub rank: usize,
    pub acting: ActingSet,
    pub n_samples: usize,
    pub seed: u64,
    pub n_applicable: usize,
    /// The activation condition agrees with "capacity after > 1".
    pub n_prop1_consistent: usize,
    /// Samples whose capacity after the optimal outcome exceeds the capacity before.
    pub n_enhanced: usize,
    pub n_prop2_among_enhanced: usize,
    pub fraction_prop2_among_enhanced: f64,
    /// The enhancement condition holds although the capacity did not increase.
    pub n_prop2_without_enhancement: usize,
    pub records: Vec<PropRecord>,
}

/// Optimize the best single outcome for each random two-qubit state of
/// `rank`, then evaluate both gap conditions on the state before and after.
pub fn run_propcheck(
    rank: usize,
    n_samples: usize,
    acting: ActingSet,
    settings: &MeritSettings,
    seed: u64,
    progress: &Progress,
) -> Result<PropcheckReport> {
    check_rank(ScenarioKind::OneSenderOneReceiver, rank)?;
    check_samples(n_samples)?;
    let scenario = ScenarioKind::OneSenderOneReceiver.scenario();
    let records: Vec<PropRecord> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let state_seed = derive_sample_seed(seed, i as u64);
            let f = haar_mixed_factor(&[2, 2], rank, state_seed)?;
            let eval = evaluate_merits(&f, &scenario, acting, Objective::Dcc, settings, derive_sample_seed(state_seed, 1))?;
            let check = match check_propositions(&f.to_density(), &eval.o_post_state.to_density()) {
                Ok(c) => Some(c),
                Err(Error::UnsupportedRank { .. }) => None,
                Err(e) => return Err(e),
            };
            progress.tick();
            Ok(PropRecord {
                sample_index: i,
                merit_before: eval.report.merit_before,
                o: eval.report.o,
                classification: eval.report.classification,
                check,
            })
        })
        .collect::<Result<_>>()?;
    let checks: Vec<&PropositionCheck> = records.iter().filter_map(|r| r.check.as_ref()).collect();
    let n_enhanced = checks.iter().filter(|c| c.post_enhanced).count();
    let n_prop2_among_enhanced = checks.iter().filter(|c| c.post_enhanced && c.prop2).count();
    Ok(PropcheckReport {
        rank,
        acting,
        n_samples,
        seed,
        n_applicable: checks.len(),
        n_prop1_consistent: checks.iter().filter(|c| c.prop1 == c.post_nonclassical).count(),
        n_enhanced,
        n_prop2_among_enhanced,
        fraction_prop2_among_enhanced: if n_enhanced == 0 {
            0.0
        } else {
            n_prop2_among_enhanced as f64 / n_enhanced as f64
        },
        n_prop2_without_enhancement: checks.iter().filter(|c| c.prop2 && !c.post_enhanced).count(),
        records,
    })
}

//! Capacity and fidelity statistics of random states, with and without
//! local POVM pre-processing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, population_sd, Histogram, NONCLASSICAL_TOL};
use super::{check_rank, check_samples, Progress};
use crate::error::{Error, Result};
use crate::measures::{chsh_parameter, dcc, negativity, teleportation_fidelity, ScenarioKind, CLASSICAL_FIDELITY};
use crate::preprocess::{evaluate_merits, ActingSet, Classification, MeritReport, MeritSettings, Objective};
use crate::sampling::{derive_sample_seed, haar_mixed_factor};

/// One random state and everything measured on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_index: usize,
    pub rank: usize,
    pub scenario: String,
    /// Negativity across the senders : receivers cut.
    pub negativity: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dcc_before: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tf_before: Option<f64>,
    #[serde(rename = "chsh_M", skip_serializing_if = "Option::is_none", default)]
    pub chsh_m: Option<f64>,
    pub merits: Vec<MeritReport>,
    /// The merit before pre-processing exceeds its classical value.
    pub nonclassical_before: bool,
    pub hidden: bool,
    pub enhanced: bool,
    /// Nonclassical fidelity while `M ≤ 1` (a local hidden variable model exists).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub local_nonclassical_tf: Option<bool>,
}

impl SampleRecord {
    pub fn before(&self) -> f64 {
        self.dcc_before.or(self.tf_before).unwrap_or(f64::NAN)
    }

    pub fn merit(&self, acting: ActingSet) -> Option<&MeritReport> {
        self.merits.iter().find(|m| m.acting == acting)
    }
}

/// Batch statistics for one (scenario, rank, acting set).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub objective: String,
    pub rank: usize,
    pub acting_set: String,
    pub n_samples: usize,
    pub fraction_nonclassical: f64,
    pub mean: f64,
    pub sd: f64,
    #[serde(rename = "mean_O")]
    pub mean_o: f64,
    #[serde(rename = "sd_O")]
    pub sd_o: f64,
    #[serde(rename = "mean_p_O")]
    pub mean_p_o: f64,
    #[serde(rename = "mean_A1")]
    pub mean_a1: f64,
    #[serde(rename = "sd_A1")]
    pub sd_a1: f64,
    #[serde(rename = "mean_A2")]
    pub mean_a2: f64,
    #[serde(rename = "sd_A2")]
    pub sd_a2: f64,
    #[serde(rename = "fraction_A1_nonclassical")]
    pub fraction_a1_nonclassical: f64,
    #[serde(rename = "fraction_A2_nonclassical")]
    pub fraction_a2_nonclassical: f64,
    pub fraction_hidden: f64,
    pub fraction_enhanced: f64,
    /// Among nonclassical-fidelity states, the share with `M ≤ 1`.
    pub fraction_local_among_nonclassical: Option<f64>,
    pub n_excluded_mass_flagged: usize,
    pub n_budget_exhausted: usize,
}

/// Per-sample records in sample order, summary rows and the histogram of the
/// merit before pre-processing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub records: Vec<SampleRecord>,
    pub summary: Vec<SummaryRow>,
    pub histogram: Histogram,
}

impl ExperimentOutput {
    pub fn row(&self, acting: ActingSet) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.acting_set == acting.label())
    }
}

/// Merit searches for a given acting set use a seed that depends only on the
/// state and the acting set, not on which other acting sets were requested.
fn merit_seed(state_seed: u64, acting: ActingSet) -> u64 {
    let slot = ActingSet::ALL.iter().position(|&a| a == acting).unwrap_or(0) as u64;
    derive_sample_seed(state_seed, 100 + slot)
}

fn dedup_acting(acting_sets: &[ActingSet]) -> Vec<ActingSet> {
    let mut out: Vec<ActingSet> = Vec::new();
    for &a in acting_sets {
        if a != ActingSet::None && !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

struct Batch<'a> {
    kind: ScenarioKind,
    objective: Objective,
    rank: usize,
    acting: Vec<ActingSet>,
    settings: &'a MeritSettings,
    seed: u64,
}

impl Batch<'_> {
    fn sample(&self, index: usize) -> Result<SampleRecord> {
        let scenario = self.kind.scenario();
        let state_seed = derive_sample_seed(self.seed, index as u64);
        let factor = haar_mixed_factor(&scenario.qubit_dims(), self.rank, state_seed)?;
        let rho = factor.to_density();
        let two_qubit = self.kind == ScenarioKind::OneSenderOneReceiver;
        let neg = negativity(&rho, &scenario.senders)?;
        let chsh_m = if two_qubit { Some(chsh_parameter(&rho)?) } else { None };
        let (dcc_before, tf_before, floor) = match self.objective {
            Objective::Dcc => (Some(dcc(&factor, &scenario)?), None, scenario.classical_bound()),
            Objective::Tf => (None, Some(teleportation_fidelity(&rho)?), CLASSICAL_FIDELITY),
        };
        let before = dcc_before.or(tf_before).unwrap_or(f64::NAN);
        let nonclassical_before = before > floor + NONCLASSICAL_TOL;
        let merits = self
            .acting
            .iter()
            .map(|&a| {
                evaluate_merits(&factor, &scenario, a, self.objective, self.settings, merit_seed(state_seed, a))
                    .map(|e| e.report)
            })
            .collect::<Result<Vec<_>>>()?;
        let local_nonclassical_tf = match (tf_before, chsh_m) {
            (Some(_), Some(m)) => Some(nonclassical_before && m <= 1.0),
            _ => None,
        };
        Ok(SampleRecord {
            sample_index: index,
            rank: self.rank,
            scenario: self.kind.label().to_string(),
            negativity: neg,
            dcc_before,
            tf_before,
            chsh_m,
            hidden: merits.iter().any(|m| m.classification == Classification::Hidden),
            enhanced: merits.iter().any(|m| m.classification == Classification::Enhanced),
            merits,
            nonclassical_before,
            local_nonclassical_tf,
        })
    }

    fn run(&self, n_samples: usize, progress: &Progress) -> Result<ExperimentOutput> {
        check_rank(self.kind, self.rank)?;
        check_samples(n_samples)?;
        let scenario = self.kind.scenario();
        let records: Vec<SampleRecord> = (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let r = self.sample(i);
                progress.tick();
                r
            })
            .collect::<Result<_>>()?;
        let (floor, max_value) = match self.objective {
            Objective::Dcc => (scenario.classical_bound(), scenario.num_parties() as f64),
            Objective::Tf => (CLASSICAL_FIDELITY, 1.0),
        };
        let befores: Vec<f64> = records.iter().map(SampleRecord::before).collect();
        let histogram = Histogram::build(&befores, floor, max_value);
        let mut summary = vec![self.summarize(&records, ActingSet::None, floor)];
        for &a in &self.acting {
            summary.push(self.summarize(&records, a, floor));
        }
        Ok(ExperimentOutput { records, summary, histogram })
    }

    fn summarize(&self, records: &[SampleRecord], acting: ActingSet, floor: f64) -> SummaryRow {
        let n = records.len();
        let nf = n as f64;
        let befores: Vec<f64> = records.iter().map(SampleRecord::before).collect();
        let reports: Vec<Option<&MeritReport>> = records.iter().map(|r| r.merit(acting)).collect();
        let pick = |f: &dyn Fn(&MeritReport) -> f64, fallback: &dyn Fn(f64) -> f64| -> Vec<f64> {
            reports.iter().zip(&befores).map(|(m, &b)| m.map_or_else(|| fallback(b), f)).collect()
        };
        let o = pick(&|m| m.o, &|b| b);
        let p_o = pick(&|m| m.p_o, &|_| 1.0);
        let a1 = pick(&|m| m.a1, &|b| b);
        let a2 = pick(&|m| m.a2, &|b| b);
        let above = |xs: &[f64]| xs.iter().filter(|&&x| x > floor + NONCLASSICAL_TOL).count() as f64 / nf;
        let class_share = |c: Classification| {
            reports.iter().filter(|m| m.is_some_and(|m| m.classification == c)).count() as f64 / nf
        };
        let fraction_local_among_nonclassical = if self.objective == Objective::Tf {
            let nonclassical = records.iter().filter(|r| r.nonclassical_before).count();
            let local = records.iter().filter(|r| r.local_nonclassical_tf == Some(true)).count();
            Some(if nonclassical == 0 { 0.0 } else { local as f64 / nonclassical as f64 })
        } else {
            None
        };
        SummaryRow {
            scenario: self.kind.label().to_string(),
            objective: self.objective.label().to_string(),
            rank: self.rank,
            acting_set: acting.label().to_string(),
            n_samples: n,
            fraction_nonclassical: above(&befores),
            mean: mean(&befores),
            sd: population_sd(&befores),
            mean_o: mean(&o),
            sd_o: population_sd(&o),
            mean_p_o: mean(&p_o),
            mean_a1: mean(&a1),
            sd_a1: population_sd(&a1),
            mean_a2: mean(&a2),
            sd_a2: population_sd(&a2),
            fraction_a1_nonclassical: above(&a1),
            fraction_a2_nonclassical: above(&a2),
            fraction_hidden: class_share(Classification::Hidden),
            fraction_enhanced: class_share(Classification::Enhanced),
            fraction_local_among_nonclassical,
            n_excluded_mass_flagged: reports.iter().filter(|m| m.is_some_and(|m| m.excluded_mass_flag)).count(),
            n_budget_exhausted: reports.iter().filter(|m| m.is_some_and(|m| m.budget_exhausted)).count(),
        }
    }
}

/// Capacity statistics of `n_samples` random states of `rank` in the given
/// scenario, with merits for each acting set (the `none` row is always
/// present). For two senders and two receivers the capacity is the upper
/// bound.
pub fn run_dcc_experiment(
    kind: ScenarioKind,
    rank: usize,
    n_samples: usize,
    acting_sets: &[ActingSet],
    settings: &MeritSettings,
    seed: u64,
    progress: &Progress,
) -> Result<ExperimentOutput> {
    Batch { kind, objective: Objective::Dcc, rank, acting: dedup_acting(acting_sets), settings, seed }.run(n_samples, progress)
}

/// Teleportation-fidelity statistics of random two-qubit states of `rank`.
pub fn run_tf_experiment(
    rank: usize,
    n_samples: usize,
    acting_sets: &[ActingSet],
    settings: &MeritSettings,
    seed: u64,
    progress: &Progress,
) -> Result<ExperimentOutput> {
    if !(1..=4).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "teleportation fidelity uses two-qubit ranks 1 to 4".into() });
    }
    Batch {
        kind: ScenarioKind::OneSenderOneReceiver,
        objective: Objective::Tf,
        rank,
        acting: dedup_acting(acting_sets),
        settings,
        seed,
    }
    .run(n_samples, progress)
}

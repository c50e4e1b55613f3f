//! Capacity against negativity for random states, together with the curves of
//! the families that bound them.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_rank, check_samples, Progress};
use crate::error::{Error, Result};
use crate::families::{
    gghz_dcc, gghz_negativity, gghz_theta_from_negativity, pure_dcc, pure_negativity, pure_theta_from_negativity,
    werner_dcc, werner_negativity, werner_p_from_negativity, BOUND_SLACK,
};
use crate::measures::{dcc, negativity, ScenarioKind};
use crate::sampling::{derive_sample_seed, haar_mixed_factor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeFamily {
    /// Random two-qubit states against the Werner (lower) and pure (upper) curves.
    TwoQubit,
    /// Random three-qubit states (two senders, one receiver) against the gGHZ curve.
    ThreeQubit,
}

impl EnvelopeFamily {
    pub fn scenario_kind(self) -> ScenarioKind {
        match self {
            EnvelopeFamily::TwoQubit => ScenarioKind::OneSenderOneReceiver,
            EnvelopeFamily::ThreeQubit => ScenarioKind::TwoSendersOneReceiver,
        }
    }

    /// Capacity of the upper envelope at negativity `n`.
    pub fn upper_curve(self, n: f64) -> f64 {
        match self {
            EnvelopeFamily::TwoQubit => pure_dcc(pure_theta_from_negativity(n)),
            EnvelopeFamily::ThreeQubit => gghz_dcc(gghz_theta_from_negativity(n)),
        }
    }

    /// Capacity of the lower envelope at negativity `n`, where one exists.
    pub fn lower_curve(self, n: f64) -> Option<f64> {
        match self {
            EnvelopeFamily::TwoQubit => Some(werner_dcc(werner_p_from_negativity(n))),
            EnvelopeFamily::ThreeQubit => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    /// `random`, `werner`, `pure` or `gghz`.
    pub series: String,
    pub rank: Option<usize>,
    pub sample_index: Option<usize>,
    pub negativity: f64,
    pub dcc: f64,
}

/// How the random states of one rank sit relative to the envelope curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRankCheck {
    pub rank: usize,
    pub n_samples: usize,
    pub upper_violations: usize,
    /// Largest `dcc − upper(N)`.
    pub worst_upper_margin: f64,
    pub lower_violations: Option<usize>,
    /// Largest `lower(N) − dcc`.
    pub worst_lower_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub family: EnvelopeFamily,
    pub seed: u64,
    pub checks: Vec<EnvelopeRankCheck>,
    pub points: Vec<ScatterPoint>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| lo + step * i as f64)
}

fn curve_points(family: EnvelopeFamily, grid_points: usize) -> Vec<ScatterPoint> {
    let point = |series: &str, negativity: f64, dcc: f64| ScatterPoint {
        series: series.to_string(),
        rank: None,
        sample_index: None,
        negativity,
        dcc,
    };
    match family {
        EnvelopeFamily::TwoQubit => linspace(0.0, 1.0, grid_points)
            .map(|p| point("werner", werner_negativity(p), werner_dcc(p)))
            .chain(linspace(0.0, FRAC_PI_2, grid_points).map(|t| point("pure", pure_negativity(t), pure_dcc(t))))
            .collect(),
        EnvelopeFamily::ThreeQubit => linspace(0.0, FRAC_PI_2, grid_points)
            .map(|t| point("gghz", gghz_negativity(t), gghz_dcc(t)))
            .collect(),
    }
}

/// Random-state clouds for each rank (seeded per rank by
/// `derive_sample_seed(seed, rank)`) plus `grid_points` points along each
/// envelope curve.
pub fn run_envelope_scatter(
    family: EnvelopeFamily,
    ranks: &[usize],
    n_samples: usize,
    grid_points: usize,
    seed: u64,
    progress: &Progress,
) -> Result<EnvelopeReport> {
    check_samples(n_samples)?;
    if grid_points < 2 {
        return Err(Error::InvalidParameter("the envelope grid needs at least two points".into()));
    }
    let kind = family.scenario_kind();
    let scenario = kind.scenario();
    let mut points = curve_points(family, grid_points);
    let mut checks = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        check_rank(kind, rank)?;
        let master = derive_sample_seed(seed, rank as u64);
        let cloud: Vec<ScatterPoint> = (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let f = haar_mixed_factor(&scenario.qubit_dims(), rank, derive_sample_seed(master, i as u64))?;
                let neg = negativity(&f.to_density(), &scenario.senders)?;
                let value = dcc(&f, &scenario)?;
                progress.tick();
                Ok(ScatterPoint {
                    series: "random".into(),
                    rank: Some(rank),
                    sample_index: Some(i),
                    negativity: neg,
                    dcc: value,
                })
            })
            .collect::<Result<_>>()?;
        let upper: Vec<f64> = cloud.iter().map(|p| p.dcc - family.upper_curve(p.negativity)).collect();
        let lower: Option<Vec<f64>> = cloud
            .iter()
            .map(|p| family.lower_curve(p.negativity).map(|w| w - p.dcc))
            .collect();
        let worst = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        checks.push(EnvelopeRankCheck {
            rank,
            n_samples,
            upper_violations: upper.iter().filter(|&&m| m > BOUND_SLACK).count(),
            worst_upper_margin: worst(&upper),
            lower_violations: lower.as_ref().map(|l| l.iter().filter(|&&m| m > BOUND_SLACK).count()),
            worst_lower_margin: lower.as_ref().map(|l| worst(l)),
        });
        points.extend(cloud);
    }
    Ok(EnvelopeReport { family, seed, checks, points })
}

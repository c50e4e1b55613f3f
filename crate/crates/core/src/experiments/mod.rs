//! Batch experiments over random states: capacity and fidelity statistics,
//! pre-processing merits, envelope scatter data, bound checks after local
//! POVMs and the eigenvalue-gap statistics.
//!
//! Every runner evaluates samples in parallel and returns them ordered by
//! sample index, and every random choice is keyed by
//! [`derive_sample_seed`](crate::sampling::derive_sample_seed), so output is
//! independent of the number of worker threads.

mod bounds;
mod dcc;
mod envelope;
pub mod output;
mod propcheck;
mod stats;

pub use bounds::{run_postpovm_bound_check, PostPovmPoint, PostPovmReport};
pub use dcc::{run_dcc_experiment, run_tf_experiment, ExperimentOutput, SampleRecord, SummaryRow};
pub use envelope::{run_envelope_scatter, EnvelopeFamily, EnvelopeReport, EnvelopeRankCheck, ScatterPoint};
pub use propcheck::{run_propcheck, PropRecord, PropcheckReport};
pub use stats::{mean, population_sd, Histogram, HistogramBin, HISTOGRAM_BIN_WIDTH, NONCLASSICAL_TOL};

use std::io::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::measures::ScenarioKind;

/// Largest rank supported for each scenario.
pub fn max_rank(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::OneSenderOneReceiver => 4,
        ScenarioKind::TwoSendersOneReceiver => 6,
        ScenarioKind::TwoSendersTwoReceivers => 4,
    }
}

/// Reject ranks outside `1..=max_rank(kind)`.
pub fn check_rank(kind: ScenarioKind, rank: usize) -> Result<()> {
    let max = max_rank(kind);
    if rank == 0 || rank > max {
        return Err(Error::UnsupportedRank { rank, reason: format!("{} supports ranks 1 to {max}", kind.label()) });
    }
    Ok(())
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    Ok(())
}

/// Sample-count progress on standard error, at most every tenth of the batch.
#[derive(Debug)]
pub struct Progress {
    label: String,
    total: usize,
    done: AtomicUsize,
    enabled: bool,
}

impl Progress {
    pub fn new(label: impl Into<String>, total: usize) -> Self {
        Self { label: label.into(), total, done: AtomicUsize::new(0), enabled: true }
    }

    pub fn silent() -> Self {
        Self { label: String::new(), total: 0, done: AtomicUsize::new(0), enabled: false }
    }

    pub fn tick(&self) {
        if !self.enabled {
            return;
        }
        let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let step = (self.total / 10).max(1);
        if done % step == 0 || done == self.total {
            let _ = writeln!(std::io::stderr(), "[{}] {done}/{}", self.label, self.total);
        }
    }
}

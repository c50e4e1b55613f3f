use serde::{Deserialize, Serialize};

/// Width of the histogram bins, in bits (or fidelity units).
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.01;

/// Values within this of the classical bound count as classical.
pub const NONCLASSICAL_TOL: f64 = 1e-9;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard deviation with denominator `n`.
pub fn population_sd(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub normalized_frequency: f64,
}

/// Normalized frequencies `count / n_samples` of nonclassical values in bins
/// of width 0.01 above the classical bound. Classical values (within 1e-9
/// of the bound or below) are counted separately, so the bin frequencies sum
/// to `1 − classical_fraction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub classical_bound: f64,
    pub classical_fraction: f64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn build(values: &[f64], classical_bound: f64, max_value: f64) -> Self {
        let span = max_value - classical_bound;
        let n_bins = ((span / HISTOGRAM_BIN_WIDTH) - 1e-9).ceil().max(1.0) as usize;
        let mut counts = vec![0usize; n_bins];
        let mut classical = 0usize;
        for &v in values {
            if v <= classical_bound + NONCLASSICAL_TOL {
                classical += 1;
                continue;
            }
            let idx = ((v - classical_bound) / HISTOGRAM_BIN_WIDTH).floor() as usize;
            counts[idx.min(n_bins - 1)] += 1;
        }
        let n = values.len().max(1) as f64;
        let bins = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| HistogramBin {
                bin_left: classical_bound + i as f64 * HISTOGRAM_BIN_WIDTH,
                bin_right: (classical_bound + (i + 1) as f64 * HISTOGRAM_BIN_WIDTH).min(max_value),
                normalized_frequency: c as f64 / n,
            })
            .collect();
        Self { classical_bound, classical_fraction: classical as f64 / n, bins }
    }

    pub fn total_frequency(&self) -> f64 {
        self.bins.iter().map(|b| b.normalized_frequency).sum()
    }
}

//! Figures of merit for local POVM pre-processing.
//!
//! For a state `ρ`, acting parties and an objective (capacity or fidelity):
//! - `O`: the best single-outcome merit over all POVM parameters, reported
//!   with the probability `p_O` of that outcome;
//! - `A1`: the probability-weighted merit over all outcomes at `O`'s parameters;
//! - `A2`: the probability-weighted merit maximized over all parameters.
//!
//! Per-outcome merits carry the classical floor (capacity `Σ log₂ d_S`,
//! fidelity 2/3): an outcome that falls below it is discarded in favour of
//! the best classical protocol.
//!
//! The search for `O` maximizes the merit *without* the floor. The floored
//! objective is flat over the whole classical region, which leaves a local
//! search nothing to follow when the state starts out classical; the
//! unfloored one has the same maximizers wherever the maximum is
//! nonclassical.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, StateFactor};
use crate::measures::{
    correlation_matrix_of, dcc_branch, fidelity_from_correlations, Scenario, ScenarioKind, CLASSICAL_FIDELITY,
};
use crate::preprocess::optimizer::{optimize, Bounds, SearchBudget};
use crate::preprocess::povm::{ActingSet, Outcome, PovmParams, MIN_OUTCOME_PROBABILITY};
use crate::sampling::derive_sample_seed;

/// Improvements at or below this are treated as no change.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

/// Excluded outcome mass above this flags the sample and renormalizes averages.
pub const EXCLUDED_MASS_TOL: f64 = 1e-9;

/// Outcomes whose merits agree within this are tie-broken by probability.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Dcc,
    Tf,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Objective::Dcc => "dcc",
            Objective::Tf => "tf",
        }
    }
}

/// Whether the POVM bias `γ` is optimized or frozen at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaMode {
    Free,
    Zero,
}

impl GammaMode {
    pub fn from_label(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(GammaMode::Free),
            "zero" => Ok(GammaMode::Zero),
            other => Err(Error::Config(format!("unknown gamma mode '{other}' (expected free or zero)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GammaMode::Free => "free",
            GammaMode::Zero => "zero",
        }
    }

    fn params_per_party(self) -> usize {
        match self {
            GammaMode::Free => 4,
            GammaMode::Zero => 3,
        }
    }
}

/// Optimizer budget and parametrization used for every merit search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeritSettings {
    pub budget: SearchBudget,
    pub gamma_mode: GammaMode,
}

impl Default for MeritSettings {
    fn default() -> Self {
        Self { budget: SearchBudget::default(), gamma_mode: GammaMode::Free }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// Classical before, nonclassical after the best outcome.
    Hidden,
    /// Nonclassical before and improved by the best outcome.
    Enhanced,
    None,
}

/// All merits of one state for one acting set and objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeritReport {
    pub acting: ActingSet,
    pub objective: Objective,
    pub merit_before: f64,
    #[serde(rename = "O")]
    pub o: f64,
    pub p_o: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub classification: Classification,
    /// Parameters per acting party at `O`'s optimum.
    pub o_params: Vec<PovmParams>,
    /// Outcome signs per acting party at `O`'s optimum.
    pub o_outcome: String,
    /// Parameters per acting party at `A2`'s optimum.
    pub a2_params: Vec<PovmParams>,
    /// Some outcome with non-negligible total mass was too improbable to evaluate.
    pub excluded_mass_flag: bool,
    /// Some optimizer start stopped on its iteration limit.
    pub budget_exhausted: bool,
    pub evaluations: usize,
}

struct OutcomeValue {
    outcome: usize,
    prob: f64,
    merit: f64,
}

/// One state's merit landscape over the acting parties' POVM parameters.
struct Landscape<'a> {
    factor: StateFactor,
    scenario: &'a Scenario,
    parties: Vec<usize>,
    objective: Objective,
    gamma_mode: GammaMode,
    floor: f64,
}

impl<'a> Landscape<'a> {
    fn new(
        factor: &StateFactor,
        scenario: &'a Scenario,
        acting: ActingSet,
        objective: Objective,
        gamma_mode: GammaMode,
    ) -> Result<Self> {
        scenario.check(factor.dims())?;
        if objective == Objective::Tf && scenario.kind != ScenarioKind::OneSenderOneReceiver {
            return Err(Error::Scenario("teleportation fidelity is defined for two qubits (1S-1R) only".into()));
        }
        let floor = match objective {
            Objective::Dcc => scenario.classical_bound(),
            Objective::Tf => CLASSICAL_FIDELITY,
        };
        let mut factor = factor.clone();
        factor.normalize();
        Ok(Self { factor, scenario, parties: acting.parties(scenario), objective, gamma_mode, floor })
    }

    /// Merit of an (unnormalized) factor without the classical floor.
    fn raw_merit(&self, f: &StateFactor) -> f64 {
        match self.objective {
            Objective::Dcc => dcc_branch(f, self.scenario).unwrap_or(f64::NAN),
            Objective::Tf => fidelity_from_correlations(&correlation_matrix_of(f.to_density().mat())),
        }
    }

    fn floored(&self, v: f64) -> f64 {
        v.max(self.floor)
    }

    fn bounds(&self) -> Bounds {
        let (lo, hi): (Vec<f64>, Vec<f64>) = match self.gamma_mode {
            GammaMode::Free => (vec![0.0, 0.0, 0.0, -1.0], vec![PI, 2.0 * PI, 1.0, 1.0]),
            GammaMode::Zero => (vec![0.0, 0.0, 0.0], vec![PI, 2.0 * PI, 1.0]),
        };
        let k = self.parties.len();
        Bounds { lower: lo.repeat(k), upper: hi.repeat(k) }
    }

    /// Parameter vector of the trivial POVM.
    fn trivial_point(&self) -> Vec<f64> {
        let per: Vec<f64> = match self.gamma_mode {
            GammaMode::Free => vec![PI / 2.0, PI, 0.0, 0.0],
            GammaMode::Zero => vec![PI / 2.0, PI, 0.0],
        };
        per.repeat(self.parties.len())
    }

    /// Per party `(θ, φ, λ, g)` with bias `γ = (1 − λ) g`, which keeps
    /// `λ + |γ| ≤ 1` everywhere in the box.
    fn decode(&self, x: &[f64]) -> Vec<PovmParams> {
        x.chunks(self.gamma_mode.params_per_party())
            .map(|c| {
                let lambda = c[2].clamp(0.0, 1.0);
                let g = if c.len() > 3 { c[3].clamp(-1.0, 1.0) } else { 0.0 };
                PovmParams { theta: c[0].clamp(0.0, PI), phi: c[1], lambda, gamma: (1.0 - lambda) * g }
            })
            .collect()
    }

    /// Probabilities and unfloored merits of every outcome tuple.
    fn outcomes(&self, params: &[PovmParams]) -> (Vec<OutcomeValue>, f64) {
        let mut out = Vec::with_capacity(1 << self.parties.len());
        let mut excluded = 0.0;
        self.descend(&self.factor, params, 0, 0, &mut out, &mut excluded);
        (out, excluded)
    }

    fn descend(
        &self,
        g: &StateFactor,
        params: &[PovmParams],
        depth: usize,
        index: usize,
        out: &mut Vec<OutcomeValue>,
        excluded: &mut f64,
    ) {
        if depth == self.parties.len() {
            let prob = g.weight();
            if prob > MIN_OUTCOME_PROBABILITY {
                out.push(OutcomeValue { outcome: index, prob, merit: self.raw_merit(g) });
            } else {
                *excluded += prob;
            }
            return;
        }
        for (bit, o) in [Outcome::Plus, Outcome::Minus].into_iter().enumerate() {
            let mut next = g.clone();
            next.apply_local(self.parties[depth], &params[depth].kraus(o));
            self.descend(&next, params, depth + 1, index | (bit << depth), out, excluded);
        }
    }

    fn best_outcome<'b>(&self, values: &'b [OutcomeValue]) -> Option<&'b OutcomeValue> {
        let mut best: Option<&OutcomeValue> = None;
        for v in values {
            if !v.merit.is_finite() {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) if v.merit > b.merit + TIE_TOL => Some(v),
                Some(b) if (v.merit - b.merit).abs() <= TIE_TOL && v.prob > b.prob => Some(v),
                keep => keep,
            };
        }
        best
    }

    fn single_outcome_value(&self, x: &[f64]) -> f64 {
        let (values, _) = self.outcomes(&self.decode(x));
        values.iter().map(|v| v.merit).filter(|m| m.is_finite()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Weighted floored merit and whether excluded mass forced renormalization.
    fn average_value(&self, params: &[PovmParams]) -> (f64, bool) {
        let (values, excluded) = self.outcomes(params);
        let total: f64 = values.iter().map(|v| v.prob).sum();
        let sum: f64 = values.iter().map(|v| v.prob * self.floored(v.merit)).sum();
        if excluded > EXCLUDED_MASS_TOL {
            (sum / total, true)
        } else {
            (sum, false)
        }
    }

    fn post_state(&self, params: &[PovmParams], outcome: usize) -> StateFactor {
        let mut g = self.factor.clone();
        for (j, (&party, p)) in self.parties.iter().zip(params).enumerate() {
            let o = if outcome >> j & 1 == 0 { Outcome::Plus } else { Outcome::Minus };
            g.apply_local(party, &p.kraus(o));
        }
        g.normalize();
        g
    }
}

/// Merits together with the post-selected state at `O`'s optimum.
#[derive(Clone, Debug)]
pub struct MeritEvaluation {
    pub report: MeritReport,
    /// Normalized state after `O`'s optimal outcome (the input itself when
    /// pre-processing does not help).
    pub o_post_state: StateFactor,
}

fn outcome_label(outcome: usize, parties: usize) -> String {
    Outcome::tuple(outcome, parties).iter().map(|o| o.sign()).collect()
}

/// Evaluate `O`, `p_O`, `A1` and `A2` for one state.
pub fn evaluate_merits(
    rho: &StateFactor,
    scenario: &Scenario,
    acting: ActingSet,
    objective: Objective,
    settings: &MeritSettings,
    seed: u64,
) -> Result<MeritEvaluation> {
    let land = Landscape::new(rho, scenario, acting, objective, settings.gamma_mode)?;
    let k = land.parties.len();
    let before_raw = land.raw_merit(&land.factor);
    if !before_raw.is_finite() {
        return Err(Error::OptimizerFailed);
    }
    let before = land.floored(before_raw);
    let trivial_params = vec![PovmParams::TRIVIAL; k];
    let no_change = |evaluations, budget_exhausted| MeritEvaluation {
        report: MeritReport {
            acting,
            objective,
            merit_before: before,
            o: before,
            p_o: 1.0,
            a1: before,
            a2: before,
            classification: Classification::None,
            o_params: trivial_params.clone(),
            o_outcome: outcome_label(0, k),
            a2_params: trivial_params.clone(),
            excluded_mass_flag: false,
            budget_exhausted,
            evaluations,
        },
        o_post_state: land.factor.clone(),
    };
    if k == 0 {
        return Ok(no_change(0, false));
    }

    let bounds = land.bounds();
    let trivial = land.trivial_point();

    // O: best single outcome.
    let o_search = optimize(
        |x| land.single_outcome_value(x),
        &bounds,
        std::slice::from_ref(&trivial),
        &settings.budget,
        derive_sample_seed(seed, 0),
    )?;
    let o_params = land.decode(&o_search.best_x);
    let (o_values, _) = land.outcomes(&o_params);
    let o_best = land.best_outcome(&o_values).ok_or(Error::OptimizerFailed)?;
    let o = land.floored(o_best.merit);

    // A2: best average over outcomes, seeded with the trivial POVM and O's optimum.
    let a2_search = optimize(
        |x| land.average_value(&land.decode(x)).0,
        &bounds,
        &[trivial.clone(), o_search.best_x.clone()],
        &settings.budget,
        derive_sample_seed(seed, 1),
    )?;
    let a2_params = land.decode(&a2_search.best_x);
    let (a2_raw, a2_flag) = land.average_value(&a2_params);
    let a2 = a2_raw.max(before);
    let evaluations = o_search.evaluations + a2_search.evaluations;
    let exhausted = o_search.budget_exhausted || a2_search.budget_exhausted;

    if o <= before + IMPROVEMENT_TOL {
        let mut eval = no_change(evaluations, exhausted);
        eval.report.a2 = a2;
        eval.report.a2_params = if a2 > before { a2_params } else { trivial_params.clone() };
        eval.report.excluded_mass_flag = a2_flag && a2 > before;
        return Ok(eval);
    }

    let (a1, a1_flag) = land.average_value(&o_params);
    let floor_tol = land.floor + IMPROVEMENT_TOL;
    let classification = if before <= floor_tol {
        Classification::Hidden
    } else {
        Classification::Enhanced
    };
    Ok(MeritEvaluation {
        o_post_state: land.post_state(&o_params, o_best.outcome),
        report: MeritReport {
            acting,
            objective,
            merit_before: before,
            o,
            p_o: o_best.prob,
            a1,
            a2: a2.max(a1),
            classification,
            o_outcome: outcome_label(o_best.outcome, k),
            o_params,
            a2_params,
            excluded_mass_flag: a1_flag || a2_flag,
            budget_exhausted: exhausted,
            evaluations,
        },
    })
}

/// `(O, p_O, parameters, outcome)` for a dense state.
pub fn merit_o(
    rho: &DensityMatrix,
    scenario: &Scenario,
    acting: ActingSet,
    objective: Objective,
    settings: &MeritSettings,
    seed: u64,
) -> Result<(f64, f64, Vec<PovmParams>, String)> {
    let r = evaluate_merits(&rho.to_factor(1e-14)?, scenario, acting, objective, settings, seed)?.report;
    Ok((r.o, r.p_o, r.o_params, r.o_outcome))
}

/// Average merit over all outcomes at `O`'s optimal parameters.
pub fn merit_a1(
    rho: &DensityMatrix,
    scenario: &Scenario,
    acting: ActingSet,
    objective: Objective,
    settings: &MeritSettings,
    seed: u64,
) -> Result<f64> {
    Ok(evaluate_merits(&rho.to_factor(1e-14)?, scenario, acting, objective, settings, seed)?.report.a1)
}

/// Average merit over all outcomes, maximized over all parameters.
pub fn merit_a2(
    rho: &DensityMatrix,
    scenario: &Scenario,
    acting: ActingSet,
    objective: Objective,
    settings: &MeritSettings,
    seed: u64,
) -> Result<f64> {
    Ok(evaluate_merits(&rho.to_factor(1e-14)?, scenario, acting, objective, settings, seed)?.report.a2)
}

/// Floored merit of a state without any pre-processing.
pub fn merit_before(rho: &StateFactor, scenario: &Scenario, objective: Objective) -> Result<f64> {
    let land = Landscape::new(rho, scenario, ActingSet::None, objective, GammaMode::Zero)?;
    Ok(land.floored(land.raw_merit(&land.factor)))
}

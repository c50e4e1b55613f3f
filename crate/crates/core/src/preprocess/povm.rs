//! Two-outcome qubit POVMs `E± = λ P± + (1 ± γ − λ)/2 · I` and their action
//! on shared states.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, C64};
use crate::measures::Scenario;

/// Outcomes with probability at or below this are excluded from averages.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

const CONSTRAINT_SLACK: f64 = 1e-12;

/// Parameters of one party's dichotomic POVM.
///
/// `P+ = |n⟩⟨n|` with `|n⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`; `λ` is the
/// sharpness and `γ` the bias, constrained by `|λ| + |γ| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl PovmParams {
    /// The trivial POVM `E± = I/2`.
    pub const TRIVIAL: PovmParams = PovmParams { theta: 0.0, phi: 0.0, lambda: 0.0, gamma: 0.0 };

    pub fn new(theta: f64, phi: f64, lambda: f64, gamma: f64) -> Result<Self> {
        let p = Self { theta, phi, lambda, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.theta, self.phi, self.lambda, self.gamma].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("POVM parameters must be finite".into()));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("θ = {} outside [0, π]", self.theta)));
        }
        if self.lambda.abs() + self.gamma.abs() > 1.0 + CONSTRAINT_SLACK {
            return Err(Error::InvalidParameter(format!(
                "|λ| + |γ| = {} exceeds 1",
                self.lambda.abs() + self.gamma.abs()
            )));
        }
        Ok(())
    }

    /// Eigenvalues of `E+` and `E−` on `|n⟩` and `|n⊥⟩`:
    /// `((1+γ+λ)/2, (1+γ−λ)/2)` and `((1−γ−λ)/2, (1−γ+λ)/2)`.
    pub fn eigenvalues(&self, outcome: Outcome) -> (f64, f64) {
        let (l, g) = (self.lambda, self.gamma);
        match outcome {
            Outcome::Plus => ((1.0 + g + l) / 2.0, (1.0 + g - l) / 2.0),
            Outcome::Minus => ((1.0 - g - l) / 2.0, (1.0 - g + l) / 2.0),
        }
    }

    fn projector(&self) -> [C64; 4] {
        let c = (self.theta / 2.0).cos();
        let s = (self.theta / 2.0).sin();
        let e = C64::from_polar(1.0, self.phi);
        // |n⟩⟨n| with n = (c, e s)
        [C64::new(c * c, 0.0), e.conj() * (c * s), e * (c * s), C64::new(s * s, 0.0)]
    }

    /// `a P+ + b (I − P+)` as a row-major 2×2 array.
    fn spectral(&self, a: f64, b: f64) -> [C64; 4] {
        let p = self.projector();
        let d = a - b;
        [p[0] * d + b, p[1] * d, p[2] * d, p[3] * d + b]
    }

    /// POVM element for `outcome`.
    pub fn element(&self, outcome: Outcome) -> [C64; 4] {
        let (a, b) = self.eigenvalues(outcome);
        self.spectral(a, b)
    }

    /// Kraus operator `√E` for `outcome`.
    pub fn kraus(&self, outcome: Outcome) -> [C64; 4] {
        let (a, b) = self.eigenvalues(outcome);
        self.spectral(a.max(0.0).sqrt(), b.max(0.0).sqrt())
    }
}

/// One of the two POVM outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }

    /// Outcome tuple number `index`: bit `j` selects the outcome of party `j`
    /// (0 → '+').
    pub fn tuple(index: usize, parties: usize) -> Vec<Outcome> {
        (0..parties).map(|j| if index >> j & 1 == 0 { Outcome::Plus } else { Outcome::Minus }).collect()
    }
}

/// `(E+, E−)` as matrices after checking the parameter constraint.
pub fn povm_elements(params: &PovmParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    params.validate()?;
    let e = |o| ComplexMatrix::from_vec(2, params.element(o).to_vec());
    Ok((e(Outcome::Plus)?, e(Outcome::Minus)?))
}

/// Which parties apply a POVM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActingSet {
    None,
    Sender,
    Receiver,
    Both,
}

impl ActingSet {
    pub const ALL: [ActingSet; 4] = [ActingSet::None, ActingSet::Sender, ActingSet::Receiver, ActingSet::Both];

    pub fn label(self) -> &'static str {
        match self {
            ActingSet::None => "none",
            ActingSet::Sender => "sender",
            ActingSet::Receiver => "receiver",
            ActingSet::Both => "both",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ActingSet::None),
            "sender" | "senders" => Ok(ActingSet::Sender),
            "receiver" | "receivers" => Ok(ActingSet::Receiver),
            "both" => Ok(ActingSet::Both),
            other => Err(Error::Config(format!("unknown acting set '{other}' (expected none, sender, receiver or both)"))),
        }
    }

    /// Subsystem indices that act, in increasing order.
    pub fn parties(self, scenario: &Scenario) -> Vec<usize> {
        let mut v = match self {
            ActingSet::None => vec![],
            ActingSet::Sender => scenario.senders.clone(),
            ActingSet::Receiver => scenario.receivers.clone(),
            ActingSet::Both => scenario.senders.iter().chain(&scenario.receivers).copied().collect(),
        };
        v.sort_unstable();
        v
    }
}

/// Post-measurement state `K ρ K^† / tr(K ρ K^†)` for one outcome tuple, where
/// `K` is the tensor product of the acting parties' Kraus operators and the
/// identity elsewhere, together with the outcome probability.
pub fn apply_povm(
    rho: &DensityMatrix,
    scenario: &Scenario,
    acting: ActingSet,
    params: &[PovmParams],
    outcomes: &[Outcome],
) -> Result<(DensityMatrix, f64)> {
    scenario.check(rho.dims())?;
    let parties = acting.parties(scenario);
    if params.len() != parties.len() || outcomes.len() != parties.len() {
        return Err(Error::InvalidParameter(format!(
            "{} acting parties but {} parameter sets and {} outcomes",
            parties.len(),
            params.len(),
            outcomes.len()
        )));
    }
    for p in params {
        p.validate()?;
    }
    // Build the full Kraus operator by Kronecker products (dims ≤ 16 here).
    let mut k = ComplexMatrix::identity(1);
    for party in 0..rho.num_subsystems() {
        let local = match parties.iter().position(|&q| q == party) {
            Some(j) => ComplexMatrix::from_vec(2, params[j].kraus(outcomes[j]).to_vec())?,
            None => ComplexMatrix::identity(rho.dims()[party]),
        };
        k = k.kron(&local);
    }
    let unnorm = rho.conjugate_by(&k);
    let prob = unnorm.trace().re;
    if prob <= MIN_OUTCOME_PROBABILITY {
        return Err(Error::InvalidProbabilities(format!("outcome probability {prob:e} is too small to post-select")));
    }
    let mut m = unnorm.scale_real(1.0 / prob);
    m.symmetrize();
    Ok((DensityMatrix::from_parts_unchecked(m, rho.dims().to_vec()), prob))
}

//! Closed-form state families, their negativity and capacity formulas, bound
//! sweeps against random rank-2 states, and the pure-state local filters that
//! turn a partially entangled Schmidt state into a Bell state.
//!
//! Conventions:
//! - `|η(θ, φ)⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
//!   `|η⊥(θ, φ)⟩ = −e^{−iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩`.
//! - Two-qubit rank-2 family: `ρ = p|ψ₁⟩⟨ψ₁| + (1−p)|ψ₂⟩⟨ψ₂|` with
//!   `|ψ₁⟩ = (|0 η₁⟩ + |1 η₂⟩)/√2`, `|ψ₂⟩ = (|0 η₁⊥⟩ + |1 η₂⊥⟩)/√2`.
//! - Three-qubit rank-2 family: `|ψ₃⟩ = (|0⟩(|0η₃⟩ + |1η₄⟩) + |1⟩(|0η₃′⟩ + |1η₄′⟩))/2`
//!   and `|ψ₄⟩` the same with every `η` replaced by `η⊥`; the last qubit is the receiver.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{binary_entropy, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::measures::{dcc_ns1r, dcc_quantum_branch, negativity, Scenario};
use crate::sampling::derive_sample_seed;

/// Slack allowed before a bound comparison counts as a violation.
pub const BOUND_SLACK: f64 = 1e-9;

/// States with negativity at or below this are treated as separable in sweeps.
pub const ENTANGLED_TOL: f64 = 1e-12;

fn eta(theta: f64, phi: f64) -> [C64; 2] {
    [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

fn eta_perp(theta: f64, phi: f64) -> [C64; 2] {
    [-C64::from_polar((theta / 2.0).sin(), -phi), C64::new((theta / 2.0).cos(), 0.0)]
}

fn mixture(p: f64, a: &[C64], b: &[C64], dims: Vec<usize>) -> Result<DensityMatrix> {
    let m = ComplexMatrix::outer(a).scale_real(p).add(&ComplexMatrix::outer(b).scale_real(1.0 - p));
    DensityMatrix::new(m, dims)
}

fn check_weight(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("mixing weight {p} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

fn check_angle(name: &str, theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!("{name} = {theta} must lie in [0, π]")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Werner, pure Schmidt and gGHZ families
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    pub p: f64,
}

/// `p |φ+⟩⟨φ+| + (1−p) I/4`.
pub fn build_werner(params: WernerParams) -> Result<DensityMatrix> {
    let p = params.p;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Werner weight {p} outside [0, 1]")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
    let m = ComplexMatrix::outer(&bell)
        .scale_real(p)
        .add(&ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0));
    DensityMatrix::new(m, vec![2, 2])
}

/// `max(0, (3p − 1)/4)`.
pub fn werner_negativity(p: f64) -> f64 {
    ((3.0 * p - 1.0) / 4.0).max(0.0)
}

/// Werner weight with the given negativity: `p = (1 + 4N)/3`.
pub fn werner_p_from_negativity(n: f64) -> f64 {
    (1.0 + 4.0 * n) / 3.0
}

/// `max(1, 2 − S(ρ_W))`; the receiver marginal is maximally mixed.
pub fn werner_dcc(p: f64) -> f64 {
    let a = (1.0 + 3.0 * p) / 4.0;
    let b = (1.0 - p) / 4.0;
    let s = crate::linalg::entropy_of_spectrum(&[a, b, b, b]);
    (2.0 - s).max(1.0)
}

/// `cos(θ/2)|00⟩ + sin(θ/2)|11⟩`.
pub fn build_pure_schmidt(theta: f64) -> Result<PureState> {
    check_angle("θ", theta)?;
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    PureState::new(
        vec![C64::new(c, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
        vec![2, 2],
    )
}

/// `1 + H({cos²(θ/2), sin²(θ/2)})`.
pub fn pure_dcc(theta: f64) -> f64 {
    1.0 + binary_entropy((theta / 2.0).cos().powi(2))
}

/// `sin θ / 2`.
pub fn pure_negativity(theta: f64) -> f64 {
    theta.sin().abs() / 2.0
}

/// Schmidt angle in `[0, π/2]` with negativity `n`: `θ = arcsin 2N`.
pub fn pure_theta_from_negativity(n: f64) -> f64 {
    (2.0 * n).clamp(0.0, 1.0).asin()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GghzParams {
    pub theta_g: f64,
    pub phi_g: f64,
}

/// `cos(θ_g/2)|000⟩ + e^{iφ_g} sin(θ_g/2)|111⟩`.
pub fn build_gghz(params: GghzParams) -> Result<PureState> {
    check_angle("θ_g", params.theta_g)?;
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[0] = C64::new((params.theta_g / 2.0).cos(), 0.0);
    v[7] = C64::from_polar((params.theta_g / 2.0).sin(), params.phi_g);
    PureState::new(v, vec![2, 2, 2])
}

/// `2 + H({cos²(θ_g/2), sin²(θ_g/2)})`.
pub fn gghz_dcc(theta_g: f64) -> f64 {
    2.0 + binary_entropy((theta_g / 2.0).cos().powi(2))
}

/// Negativity across `S1S2 : R`, `sin θ_g / 2`.
pub fn gghz_negativity(theta_g: f64) -> f64 {
    theta_g.sin().abs() / 2.0
}

/// `θ_g = arccos(1 − 8N²)/2`.
pub fn gghz_theta_from_negativity(n: f64) -> f64 {
    (1.0 - 8.0 * n * n).clamp(-1.0, 1.0).acos() / 2.0
}

// ---------------------------------------------------------------------------
// Rank-2 two-qubit family
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2TwoQubitParams {
    pub p1: f64,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(default)]
    pub phi1: f64,
    #[serde(default)]
    pub phi2: f64,
}

impl Rank2TwoQubitParams {
    pub fn real(p1: f64, theta1: f64, theta2: f64) -> Self {
        Self { p1, theta1, theta2, phi1: 0.0, phi2: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        check_weight(self.p1)?;
        check_angle("θ1", self.theta1)?;
        check_angle("θ2", self.theta2)
    }

    fn has_phases(&self) -> bool {
        self.phi1 != 0.0 || self.phi2 != 0.0
    }

    /// `cos ω = ⟨η₁|η₂⟩`-overlap angle: `cos θ₁ cos θ₂ + sin θ₁ sin θ₂ cos(φ₁ − φ₂)`.
    fn cos_omega(&self) -> f64 {
        self.theta1.cos() * self.theta2.cos()
            + self.theta1.sin() * self.theta2.sin() * (self.phi1 - self.phi2).cos()
    }
}

pub fn build_rank2_twoqubit(params: Rank2TwoQubitParams) -> Result<DensityMatrix> {
    params.validate()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a1, a2) = (eta(params.theta1, params.phi1), eta(params.theta2, params.phi2));
    let (b1, b2) = (eta_perp(params.theta1, params.phi1), eta_perp(params.theta2, params.phi2));
    let psi1: Vec<C64> = [a1[0], a1[1], a2[0], a2[1]].iter().map(|z| z * h).collect();
    let psi2: Vec<C64> = [b1[0], b1[1], b2[0], b2[1]].iter().map(|z| z * h).collect();
    mixture(params.p1, &psi1, &psi2, vec![2, 2])
}

/// Closed-form negativity of the rank-2 two-qubit family (real amplitudes).
///
/// The partial transpose factors into two quadratics,
/// `4λ² − 4pλ + (2p−1)s²` and `4λ² − 4(1−p)λ + (1−2p)s²` with
/// `s² = sin²((θ₁−θ₂)/2)`, whose smaller roots give the two candidates.
pub fn negativity_rank2_twoqubit(params: Rank2TwoQubitParams) -> Result<f64> {
    params.validate()?;
    if params.has_phases() {
        return Err(Error::InvalidParameter(
            "the closed-form negativity covers real amplitudes only; use the partial-transpose oracle".into(),
        ));
    }
    let p = params.p1;
    let s2 = ((params.theta1 - params.theta2) / 2.0).sin().powi(2);
    let n1 = ((p * p + (1.0 - 2.0 * p) * s2).max(0.0).sqrt() - p) / 2.0;
    let n2 = (((1.0 - p).powi(2) + (2.0 * p - 1.0) * s2).max(0.0).sqrt() - (1.0 - p)) / 2.0;
    Ok(n1.max(n2).max(0.0))
}

/// `f₁ = (1 − 2p)·√((1 + cos ω)/2)`, which for real amplitudes is
/// `(1 − 2p) cos((θ₁ − θ₂)/2)` up to a sign that the entropy ignores.
pub fn f1_rank2_twoqubit(params: &Rank2TwoQubitParams) -> f64 {
    (1.0 - 2.0 * params.p1) * ((1.0 + params.cos_omega()) / 2.0).max(0.0).sqrt()
}

/// Quantum branch `1 + H({(1−f₁)/2, (1+f₁)/2}) − H({p, 1−p})` (no classical floor).
pub fn dcc_rank2_twoqubit(params: Rank2TwoQubitParams) -> Result<f64> {
    params.validate()?;
    let f = f1_rank2_twoqubit(&params);
    Ok(1.0 + binary_entropy((1.0 - f) / 2.0) - binary_entropy(params.p1))
}

// ---------------------------------------------------------------------------
// Rank-2 three-qubit family
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2ThreeQubitParams {
    pub p2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub theta3p: f64,
    pub theta4p: f64,
}

impl Rank2ThreeQubitParams {
    fn validate(&self) -> Result<()> {
        check_weight(self.p2)?;
        check_angle("θ3", self.theta3)?;
        check_angle("θ4", self.theta4)?;
        check_angle("θ3′", self.theta3p)?;
        check_angle("θ4′", self.theta4p)
    }

    /// Sum of the cosines of all six pairwise angle differences.
    pub fn y(&self) -> f64 {
        let t = [self.theta3, self.theta4, self.theta3p, self.theta4p];
        let mut y = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                y += (t[i] - t[j]).cos();
            }
        }
        y
    }
}

pub fn build_rank2_threequbit(params: Rank2ThreeQubitParams) -> Result<DensityMatrix> {
    params.validate()?;
    let order = [params.theta3, params.theta4, params.theta3p, params.theta4p];
    let mut psi3 = Vec::with_capacity(8);
    let mut psi4 = Vec::with_capacity(8);
    for &t in &order {
        let (a, b) = (eta(t, 0.0), eta_perp(t, 0.0));
        psi3.extend(a.iter().map(|z| z * 0.5));
        psi4.extend(b.iter().map(|z| z * 0.5));
    }
    mixture(params.p2, &psi3, &psi4, vec![2, 2, 2])
}

/// Closed-form negativity across `S1S2 : R` of the rank-2 three-qubit family.
pub fn negativity_rank2_threequbit(params: Rank2ThreeQubitParams) -> Result<f64> {
    params.validate()?;
    let p = params.p2;
    let y = params.y();
    let n = if p < 0.5 {
        ((12.0 - 24.0 * p + 16.0 * p * p - 2.0 * (1.0 - 2.0 * p) * y).max(0.0).sqrt() - 4.0 * p) / 8.0
    } else {
        ((4.0 - 8.0 * p + 16.0 * p * p + 2.0 * (1.0 - 2.0 * p) * y).max(0.0).sqrt() + 4.0 * p - 4.0) / 8.0
    };
    Ok(n.max(0.0))
}

/// `f₂ = √((1 − 2p)²(2 + y)) / (2√2)`.
pub fn f2_rank2_threequbit(params: &Rank2ThreeQubitParams) -> f64 {
    ((1.0 - 2.0 * params.p2).powi(2) * (2.0 + params.y())).max(0.0).sqrt() / (2.0 * std::f64::consts::SQRT_2)
}

/// Quantum branch `2 + H({(1−f₂)/2, (1+f₂)/2}) − H({p, 1−p})` (no classical floor).
pub fn dcc_rank2_threequbit(params: Rank2ThreeQubitParams) -> Result<f64> {
    params.validate()?;
    let f = f2_rank2_threequbit(&params);
    Ok(2.0 + binary_entropy((1.0 - f) / 2.0) - binary_entropy(params.p2))
}

// ---------------------------------------------------------------------------
// Bound sweeps
// ---------------------------------------------------------------------------

/// Outcome of a randomized check of a capacity bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub violations: usize,
    /// Smallest `(bound − value)` for upper bounds or `(value − bound)` for
    /// lower bounds; negative means violated.
    pub worst_margin: f64,
    pub worst_params: Vec<f64>,
}

impl BoundCheck {
    fn new(name: &str) -> Self {
        Self { name: name.into(), violations: 0, worst_margin: f64::INFINITY, worst_params: vec![] }
    }

    fn record(&mut self, margin: f64, params: &[f64]) {
        if margin < -BOUND_SLACK {
            self.violations += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_params = params.to_vec();
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.violations += other.violations;
        if other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
            self.worst_params = other.worst_params;
        }
        self
    }
}

/// Summary of a bound sweep, serialized as JSON by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n_samples: usize,
    pub seed: u64,
    pub n_entangled: usize,
    /// Names of the entries of each `worst_params` vector.
    pub param_names: Vec<String>,
    pub checks: Vec<BoundCheck>,
}

impl SweepReport {
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Capacities compared in the two-qubit bound at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitBoundPoint {
    pub negativity: f64,
    pub dcc: f64,
    pub pure_dcc: f64,
    pub werner_dcc: f64,
}

/// Oracle negativity and capacity of a rank-2 two-qubit state together with
/// the pure-state and Werner capacities at equal negativity.
pub fn theorem1_point(params: Rank2TwoQubitParams) -> Result<TwoQubitBoundPoint> {
    let rho = build_rank2_twoqubit(params)?;
    let n = negativity(&rho, &[1])?;
    let c = dcc_ns1r(&rho, &Scenario::one_sender_one_receiver())?;
    Ok(TwoQubitBoundPoint {
        negativity: n,
        dcc: c,
        pure_dcc: pure_dcc(pure_theta_from_negativity(n)),
        werner_dcc: werner_dcc(werner_p_from_negativity(n)),
    })
}

/// Capacities compared in the three-qubit bound at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeQubitBoundPoint {
    pub negativity: f64,
    pub dcc: f64,
    pub gghz_dcc: f64,
}

pub fn theorem2_point(params: Rank2ThreeQubitParams) -> Result<ThreeQubitBoundPoint> {
    let rho = build_rank2_threequbit(params)?;
    let n = negativity(&rho, &[2])?;
    let c = dcc_ns1r(&rho, &Scenario::two_senders_one_receiver())?;
    Ok(ThreeQubitBoundPoint { negativity: n, dcc: c, gghz_dcc: gghz_dcc(gghz_theta_from_negativity(n)) })
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_sweep_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("a sweep needs at least one draw".into()));
    }
    Ok(())
}

/// Random rank-2 two-qubit states versus the pure-state upper bound and the
/// Werner lower bound at equal negativity.
pub fn verify_theorem1(n_samples: usize, seed: u64) -> Result<SweepReport> {
    check_sweep_size(n_samples)?;
    let empty = || (0usize, BoundCheck::new("pure_upper"), BoundCheck::new("werner_lower"));
    let (n_ent, upper, lower) = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_sample_seed(seed, i as u64));
            let params = Rank2TwoQubitParams::real(open_unit(&mut rng), PI * rng.random::<f64>(), PI * rng.random::<f64>());
            let pt = theorem1_point(params)?;
            let mut acc = empty();
            if pt.negativity > ENTANGLED_TOL {
                let raw = [params.p1, params.theta1, params.theta2, pt.negativity];
                acc.0 = 1;
                acc.1.record(pt.pure_dcc - pt.dcc, &raw);
                acc.2.record(pt.dcc - pt.werner_dcc, &raw);
            }
            Ok(acc)
        })
        .try_reduce(empty, |a, b| Ok((a.0 + b.0, a.1.merge(b.1), a.2.merge(b.2))))?;
    Ok(SweepReport {
        n_samples,
        seed,
        n_entangled: n_ent,
        param_names: vec!["p1".into(), "theta1".into(), "theta2".into(), "negativity".into()],
        checks: vec![upper, lower],
    })
}

/// Random rank-2 three-qubit states versus the gGHZ capacity at equal negativity.
pub fn verify_theorem2(n_samples: usize, seed: u64) -> Result<SweepReport> {
    check_sweep_size(n_samples)?;
    let empty = || (0usize, BoundCheck::new("gghz_upper"));
    let (n_ent, upper) = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_sample_seed(seed, i as u64));
            let p2 = open_unit(&mut rng);
            let mut t = [0.0; 4];
            for x in &mut t {
                *x = PI * rng.random::<f64>();
            }
            let params = Rank2ThreeQubitParams { p2, theta3: t[0], theta4: t[1], theta3p: t[2], theta4p: t[3] };
            let pt = theorem2_point(params)?;
            let mut acc = empty();
            if pt.negativity > ENTANGLED_TOL {
                acc.0 = 1;
                acc.1.record(pt.gghz_dcc - pt.dcc, &[p2, t[0], t[1], t[2], t[3], pt.negativity]);
            }
            Ok(acc)
        })
        .try_reduce(empty, |a, b| Ok((a.0 + b.0, a.1.merge(b.1))))?;
    Ok(SweepReport {
        n_samples,
        seed,
        n_entangled: n_ent,
        param_names: ["p2", "theta3", "theta4", "theta3p", "theta4p", "negativity"].map(String::from).to_vec(),
        checks: vec![upper],
    })
}

/// Quantum branch of the rank-2 two-qubit capacity evaluated on the built state.
pub fn oracle_dcc_branch_twoqubit(params: Rank2TwoQubitParams) -> Result<f64> {
    dcc_quantum_branch(&build_rank2_twoqubit(params)?, &Scenario::one_sender_one_receiver())
}

/// Quantum branch of the rank-2 three-qubit capacity evaluated on the built state.
pub fn oracle_dcc_branch_threequbit(params: Rank2ThreeQubitParams) -> Result<f64> {
    dcc_quantum_branch(&build_rank2_threequbit(params)?, &Scenario::two_senders_one_receiver())
}

// ---------------------------------------------------------------------------
// Local filters for pure Schmidt states
// ---------------------------------------------------------------------------

/// Kraus operators of a two-outcome local filter, `K+ ^† K+ + K− ^† K− = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPair {
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
}

impl FilterPair {
    /// Diagonal filter with `K+ = diag(a, b)`, `a, b ∈ [0, 1]`.
    fn diagonal(a: f64, b: f64) -> Self {
        let comp = |x: f64| (1.0 - x * x).max(0.0).sqrt();
        Self { plus: ComplexMatrix::diag_real(&[a, b]), minus: ComplexMatrix::diag_real(&[comp(a), comp(b)]) }
    }
}

fn check_filter_angle(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("Schmidt angle {theta} must lie in (0, π/2]")));
    }
    Ok(())
}

/// Probability of outcome `K_A ⊗ K_B` on a two-qubit pure state.
pub fn filter_success_probability(psi: &PureState, ka: &ComplexMatrix, kb: &ComplexMatrix) -> f64 {
    let k = ka.kron(kb);
    let rho = psi.to_density();
    k.matmul(rho.mat()).matmul(&k.adjoint()).trace().re
}

/// Single-sided filter `K+ = diag(tan(θ/2), 1)` on the first qubit of
/// `cos(θ/2)|00⟩ + sin(θ/2)|11⟩`; outcome '+' yields `|φ+⟩` with
/// probability `2 sin²(θ/2)`.
pub fn appendix_filter_single(theta: f64) -> Result<(FilterPair, f64)> {
    check_filter_angle(theta)?;
    let pair = FilterPair::diagonal((theta / 2.0).tan(), 1.0);
    let psi = build_pure_schmidt(theta)?;
    let prob = filter_success_probability(&psi, &pair.plus, &ComplexMatrix::identity(2));
    Ok((pair, prob))
}

/// Two-sided filter `K+ = diag(√tan(θ/2), 1)` on both qubits; outcome '++'
/// yields `|φ+⟩` with probability `2 sin²(θ/2)`.
pub fn appendix_filter_both(theta: f64) -> Result<([FilterPair; 2], f64)> {
    check_filter_angle(theta)?;
    let a = (theta / 2.0).tan().sqrt();
    let pair = FilterPair::diagonal(a, 1.0);
    let psi = build_pure_schmidt(theta)?;
    let prob = filter_success_probability(&psi, &pair.plus, &pair.plus);
    Ok(([pair.clone(), pair], prob))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_examples() {
        assert!((werner_dcc(1.0) - 2.0).abs() < 1e-12);
        assert_eq!(werner_dcc(0.0), 1.0);
        let rho = build_werner(WernerParams { p: 0.8 }).unwrap();
        assert!((negativity(&rho, &[1]).unwrap() - werner_negativity(0.8)).abs() < 1e-12);
        assert!((werner_p_from_negativity(werner_negativity(0.8)) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn pure_and_gghz_endpoints() {
        assert!((gghz_dcc(FRAC_PI_2) - 3.0).abs() < 1e-12);
        assert!((pure_dcc(FRAC_PI_2) - 2.0).abs() < 1e-12);
        assert!((gghz_theta_from_negativity(0.5) - FRAC_PI_2).abs() < 1e-7);
    }

    #[test]
    fn pure_schmidt_negativity_is_half_sine() {
        for &t in &[0.3, 1.0, 2.0] {
            let rho = build_pure_schmidt(t).unwrap().to_density();
            assert!((negativity(&rho, &[1]).unwrap() - t.sin() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_mixture_of_parallel_branches_is_separable() {
        let p = Rank2TwoQubitParams::real(0.5, 1.1, 1.1);
        assert!(negativity(&build_rank2_twoqubit(p).unwrap(), &[1]).unwrap() < 1e-12);
        assert!(negativity_rank2_twoqubit(p).unwrap() < 1e-12);
        assert!((dcc_rank2_twoqubit(p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_weight_three_qubit_branch_is_two() {
        let p = Rank2ThreeQubitParams { p2: 0.5, theta3: 0.1, theta4: 2.0, theta3p: 1.3, theta4p: 0.7 };
        assert!((dcc_rank2_threequbit(p).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_negativity_rejects_phases() {
        let p = Rank2TwoQubitParams { p1: 0.3, theta1: 1.0, theta2: 2.0, phi1: 0.5, phi2: 0.0 };
        assert!(negativity_rank2_twoqubit(p).is_err());
        assert!(dcc_rank2_twoqubit(p).is_ok());
    }

    #[test]
    fn filters_reject_out_of_range_angles() {
        assert!(appendix_filter_single(0.0).is_err());
        assert!(appendix_filter_single(2.0).is_err());
        assert!(appendix_filter_both(-0.1).is_err());
    }

    #[test]
    fn filter_at_maximal_entanglement_is_identity() {
        let (pair, prob) = appendix_filter_single(FRAC_PI_2).unwrap();
        assert!(pair.plus.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!((prob - 1.0).abs() < 1e-12);
    }
}

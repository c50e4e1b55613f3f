//! Dense-coding capacity, teleportation fidelity, CHSH parameter and negativity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::{eigvals_in_place, singular_values_3x3, symmetric_eigvals_3x3};
use crate::linalg::{entropy_of_spectrum, ComplexMatrix, DensityMatrix, StateFactor, C64};

/// Classical teleportation fidelity threshold for qubits.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Which dense-coding protocol is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "1s1r")]
    OneSenderOneReceiver,
    #[serde(rename = "2s1r")]
    TwoSendersOneReceiver,
    #[serde(rename = "2s2r")]
    TwoSendersTwoReceivers,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::OneSenderOneReceiver => "1s1r",
            ScenarioKind::TwoSendersOneReceiver => "2s1r",
            ScenarioKind::TwoSendersTwoReceivers => "2s2r",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1s1r" => Ok(ScenarioKind::OneSenderOneReceiver),
            "2s1r" => Ok(ScenarioKind::TwoSendersOneReceiver),
            "2s2r" => Ok(ScenarioKind::TwoSendersTwoReceivers),
            other => Err(Error::Config(format!("unknown scenario '{other}' (expected 1s1r, 2s1r or 2s2r)"))),
        }
    }

    /// Canonical scenario for this kind on qubits.
    pub fn scenario(self) -> Scenario {
        match self {
            ScenarioKind::OneSenderOneReceiver => Scenario::one_sender_one_receiver(),
            ScenarioKind::TwoSendersOneReceiver => Scenario::two_senders_one_receiver(),
            ScenarioKind::TwoSendersTwoReceivers => Scenario::two_senders_two_receivers(),
        }
    }
}

/// Party partition for a dense-coding protocol.
///
/// Subsystems are ordered senders first, then receivers. For two senders and
/// two receivers the order is `S1, S2, R1, R2` and `Sk` is paired with `Rk`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub senders: Vec<usize>,
    pub receivers: Vec<usize>,
    pub pairing: Vec<(usize, usize)>,
}

impl Scenario {
    pub fn one_sender_one_receiver() -> Self {
        Self { kind: ScenarioKind::OneSenderOneReceiver, senders: vec![0], receivers: vec![1], pairing: vec![] }
    }

    pub fn two_senders_one_receiver() -> Self {
        Self { kind: ScenarioKind::TwoSendersOneReceiver, senders: vec![0, 1], receivers: vec![2], pairing: vec![] }
    }

    pub fn two_senders_two_receivers() -> Self {
        Self {
            kind: ScenarioKind::TwoSendersTwoReceivers,
            senders: vec![0, 1],
            receivers: vec![2, 3],
            pairing: vec![(0, 2), (1, 3)],
        }
    }

    pub fn num_parties(&self) -> usize {
        self.senders.len() + self.receivers.len()
    }

    /// Qubit dimensions for every party.
    pub fn qubit_dims(&self) -> Vec<usize> {
        vec![2; self.num_parties()]
    }

    /// Capacity achievable without shared entanglement: `Σ log₂ d_S` bits.
    pub fn classical_bound(&self) -> f64 {
        self.senders.len() as f64
    }

    /// Check that the scenario covers the subsystems of `dims` and all are qubits.
    pub fn check(&self, dims: &[usize]) -> Result<()> {
        let n = dims.len();
        let mut seen = vec![false; n];
        for &i in self.senders.iter().chain(&self.receivers) {
            if i >= n || seen[i] {
                return Err(Error::Scenario(format!(
                    "parties {:?}/{:?} do not partition {n} subsystems",
                    self.senders, self.receivers
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Scenario(format!("{n} subsystems but only {} parties", self.num_parties())));
        }
        if dims.iter().any(|&d| d != 2) {
            return Err(Error::Scenario(format!("all parties must be qubits, got {dims:?}")));
        }
        let expected = match self.kind {
            ScenarioKind::OneSenderOneReceiver => (1, 1),
            ScenarioKind::TwoSendersOneReceiver => (2, 1),
            ScenarioKind::TwoSendersTwoReceivers => (2, 2),
        };
        if (self.senders.len(), self.receivers.len()) != expected {
            return Err(Error::Scenario(format!("{:?} needs {expected:?} senders/receivers", self.kind)));
        }
        if self.kind == ScenarioKind::TwoSendersTwoReceivers && self.pairing.len() != 2 {
            return Err(Error::Scenario("two-receiver scenario needs a sender/receiver pairing".into()));
        }
        Ok(())
    }
}

/// Access to the spectra of a state and of its marginals.
pub trait SpectralState {
    fn subsystem_dims(&self) -> &[usize];
    /// Nonzero-block spectrum of the whole state.
    fn joint_spectrum(&self) -> Vec<f64>;
    /// Normalized reduced state on `keep`.
    fn marginal(&self, keep: &[usize]) -> Result<ComplexMatrix>;

    fn joint_entropy(&self) -> f64 {
        entropy_of_spectrum(&self.joint_spectrum())
    }

    fn marginal_entropy(&self, keep: &[usize]) -> Result<f64> {
        let m = self.marginal(keep)?;
        let mut buf = m.into_vec();
        let n = (buf.len() as f64).sqrt() as usize;
        Ok(entropy_of_spectrum(&eigvals_in_place(n, &mut buf)))
    }
}

impl SpectralState for DensityMatrix {
    fn subsystem_dims(&self) -> &[usize] {
        self.dims()
    }

    fn joint_spectrum(&self) -> Vec<f64> {
        self.eigenvalues()
    }

    fn marginal(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        Ok(self.partial_trace(keep)?.into_mat())
    }
}

impl SpectralState for StateFactor {
    fn subsystem_dims(&self) -> &[usize] {
        self.dims()
    }

    fn joint_spectrum(&self) -> Vec<f64> {
        self.spectrum()
    }

    fn marginal(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        self.reduced_matrix(keep)
    }
}

/// `Σ log₂ d_S + S(ρ^R) − S(ρ)` without the classical floor.
pub fn dcc_quantum_branch<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    scenario.check(rho.subsystem_dims())?;
    if scenario.kind == ScenarioKind::TwoSendersTwoReceivers {
        return Err(Error::Scenario("use the two-receiver bound for 2S-2R".into()));
    }
    let sr = rho.marginal_entropy(&scenario.receivers)?;
    Ok(scenario.classical_bound() + sr - rho.joint_entropy())
}

/// Dense-coding capacity with any number of senders and a single receiver.
pub fn dcc_ns1r<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    Ok(dcc_quantum_branch(rho, scenario)?.max(scenario.classical_bound()))
}

/// `2 + S(R1) + S(R2) − max(S(S1R1), S(S2R2))` without the classical floor.
pub fn dcc_upper_2s2r_branch<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    scenario.check(rho.subsystem_dims())?;
    if scenario.kind != ScenarioKind::TwoSendersTwoReceivers {
        return Err(Error::Scenario("two-receiver bound needs a 2S-2R scenario".into()));
    }
    let (s1, r1) = scenario.pairing[0];
    let (s2, r2) = scenario.pairing[1];
    let pair = |a: usize, b: usize| if a < b { [a, b] } else { [b, a] };
    let e_r1 = rho.marginal_entropy(&[r1])?;
    let e_r2 = rho.marginal_entropy(&[r2])?;
    let e_1 = rho.marginal_entropy(&pair(s1, r1))?;
    let e_2 = rho.marginal_entropy(&pair(s2, r2))?;
    Ok(2.0 + e_r1 + e_r2 - e_1.max(e_2))
}

/// Upper bound on the two-sender, two-receiver dense-coding capacity.
pub fn dcc_upper_2s2r<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    Ok(dcc_upper_2s2r_branch(rho, scenario)?.max(2.0))
}

/// Capacity (or its 2S-2R upper bound) for any supported scenario.
pub fn dcc<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    match scenario.kind {
        ScenarioKind::TwoSendersTwoReceivers => dcc_upper_2s2r(rho, scenario),
        _ => dcc_ns1r(rho, scenario),
    }
}

/// Unclamped capacity expression for any supported scenario.
pub fn dcc_branch<S: SpectralState + ?Sized>(rho: &S, scenario: &Scenario) -> Result<f64> {
    match scenario.kind {
        ScenarioKind::TwoSendersTwoReceivers => dcc_upper_2s2r_branch(rho, scenario),
        _ => dcc_quantum_branch(rho, scenario),
    }
}

/// `C_ij = tr[ρ (σ_i ⊗ σ_j)]` for a two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub entries: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    /// `tr√(C^T C)`, the sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        singular_values_3x3(&self.entries).iter().sum()
    }

    /// Sum of the two largest eigenvalues of `C^T C`.
    pub fn chsh(&self) -> f64 {
        let c = &self.entries;
        let mut ctc = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                ctc[i][j] = (0..3).map(|k| c[k][i] * c[k][j]).sum();
            }
        }
        let w = symmetric_eigvals_3x3(&ctc);
        (w[1] + w[2]).max(0.0)
    }
}

fn check_two_qubit(dims: &[usize]) -> Result<()> {
    if dims != [2, 2] {
        return Err(Error::DimensionMismatch(format!("expected a two-qubit state, got dims {dims:?}")));
    }
    Ok(())
}

/// Two-qubit correlation matrix from a 4×4 density matrix.
pub fn correlation_matrix_of(m: &ComplexMatrix) -> CorrelationMatrix {
    // ρ indices: |ab⟩ ↦ 2a + b. Expectation of σ_i ⊗ σ_j expressed through
    // the single-qubit operator components.
    let paulis: [[C64; 4]; 3] = [
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ];
    let mut entries = [[0.0; 3]; 3];
    for (i, a) in paulis.iter().enumerate() {
        for (j, b) in paulis.iter().enumerate() {
            // tr(ρ (A⊗B)) = Σ ρ_{(r1 r2),(c1 c2)} A_{c1 r1} B_{c2 r2}
            let mut acc = C64::new(0.0, 0.0);
            for r1 in 0..2 {
                for c1 in 0..2 {
                    let x = a[c1 * 2 + r1];
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    for r2 in 0..2 {
                        for c2 in 0..2 {
                            let y = b[c2 * 2 + r2];
                            acc += m[(2 * r1 + r2, 2 * c1 + c2)] * x * y;
                        }
                    }
                }
            }
            entries[i][j] = acc.re;
        }
    }
    CorrelationMatrix { entries }
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    check_two_qubit(rho.dims())?;
    Ok(correlation_matrix_of(rho.mat()))
}

/// Fidelity, CHSH parameter and whether `M > 1` certifies the fidelity formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportationReport {
    pub fidelity: f64,
    pub chsh_m: f64,
    pub certified: bool,
}

pub fn fidelity_from_correlations(c: &CorrelationMatrix) -> f64 {
    0.5 * (1.0 + c.trace_norm() / 3.0)
}

/// Maximal teleportation fidelity `½(1 + ⅓ tr√(C^T C))` of a two-qubit state.
pub fn teleportation_fidelity(rho: &DensityMatrix) -> Result<f64> {
    Ok(fidelity_from_correlations(&correlation_matrix(rho)?))
}

/// CHSH parameter `M(ρ)`.
pub fn chsh_parameter(rho: &DensityMatrix) -> Result<f64> {
    Ok(correlation_matrix(rho)?.chsh())
}

pub fn teleportation_report(rho: &DensityMatrix) -> Result<TeleportationReport> {
    let c = correlation_matrix(rho)?;
    let chsh_m = c.chsh();
    Ok(TeleportationReport { fidelity: fidelity_from_correlations(&c), chsh_m, certified: chsh_m > 1.0 })
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose on `side`.
pub fn negativity(rho: &DensityMatrix, side: &[usize]) -> Result<f64> {
    let n = rho.num_subsystems();
    if side.is_empty() || side.len() >= n {
        return Err(Error::InvalidSubsystems("bipartition must be a nonempty proper subset".into()));
    }
    let pt = rho.partial_transpose(side)?;
    Ok(negativity_of_pt(pt))
}

pub(crate) fn negativity_of_pt(pt: ComplexMatrix) -> f64 {
    let n = pt.dim();
    let mut buf = pt.into_vec();
    eigvals_in_place(n, &mut buf).iter().filter(|&&w| w < 0.0).map(|w| -w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PureState, C64};

    fn ket(amps: &[f64], dims: Vec<usize>) -> DensityMatrix {
        PureState::normalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect(), dims).unwrap().to_density()
    }

    #[test]
    fn bell_capacity_and_fidelity() {
        let bell = ket(&[1.0, 0.0, 0.0, 1.0], vec![2, 2]);
        let s = Scenario::one_sender_one_receiver();
        assert!((dcc_ns1r(&bell, &s).unwrap() - 2.0).abs() < 1e-12);
        assert!((teleportation_fidelity(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!((chsh_parameter(&bell).unwrap() - 2.0).abs() < 1e-12);
        assert!((negativity(&bell, &[1]).unwrap() - 0.5).abs() < 1e-12);
        let c = correlation_matrix(&bell).unwrap().entries;
        assert!((c[0][0] - 1.0).abs() < 1e-14 && (c[1][1] + 1.0).abs() < 1e-14 && (c[2][2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_is_classical() {
        let prod = ket(&[1.0, 0.0, 0.0, 0.0], vec![2, 2]);
        let s = Scenario::one_sender_one_receiver();
        assert_eq!(dcc_ns1r(&prod, &s).unwrap(), 1.0);
        assert!((teleportation_fidelity(&prod).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!(negativity(&prod, &[0]).unwrap() < 1e-14);
    }

    #[test]
    fn ghz_two_senders() {
        let mut amps = vec![0.0; 8];
        amps[0] = 1.0;
        amps[7] = 1.0;
        let ghz = ket(&amps, vec![2, 2, 2]);
        assert!((dcc_ns1r(&ghz, &Scenario::two_senders_one_receiver()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_receiver_examples() {
        let s = Scenario::two_senders_two_receivers();
        // Bell pairs on (S1,R1) = (0,2) and (S2,R2) = (1,3)
        let mut amps = vec![0.0; 16];
        for a in 0..2 {
            for b in 0..2 {
                // |S1 S2 R1 R2⟩ = |a b a b⟩
                amps[8 * a + 4 * b + 2 * a + b] = 1.0;
            }
        }
        let pairs = ket(&amps, vec![2; 4]);
        assert!((dcc_upper_2s2r(&pairs, &s).unwrap() - 4.0).abs() < 1e-12);
        let mut g = vec![0.0; 16];
        g[0] = 1.0;
        g[15] = 1.0;
        let ghz = ket(&g, vec![2; 4]);
        assert!((dcc_upper_2s2r(&ghz, &s).unwrap() - 3.0).abs() < 1e-12);
        let mut p = vec![0.0; 16];
        p[0] = 1.0;
        assert_eq!(dcc_upper_2s2r(&ket(&p, vec![2; 4]), &s).unwrap(), 2.0);
    }

    #[test]
    fn scenario_mismatch_is_reported() {
        let bell = ket(&[1.0, 0.0, 0.0, 1.0], vec![2, 2]);
        assert!(dcc_ns1r(&bell, &Scenario::two_senders_one_receiver()).is_err());
        assert!(dcc_upper_2s2r(&bell, &Scenario::one_sender_one_receiver()).is_err());
        let qutrit = DensityMatrix::maximally_mixed(vec![3, 2]).unwrap();
        assert!(dcc_ns1r(&qutrit, &Scenario::one_sender_one_receiver()).is_err());
    }

    #[test]
    fn maximally_mixed_has_no_correlations() {
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert_eq!(chsh_parameter(&mixed).unwrap(), 0.0);
        let c = correlation_matrix(&mixed).unwrap();
        assert!(c.entries.iter().flatten().all(|x| x.abs() < 1e-15));
    }
}

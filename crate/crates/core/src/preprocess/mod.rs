//! Local dichotomic POVM pre-processing: POVM construction, post-measurement
//! states, figures of merit, eigenvalue-gap conditions and the optimizer.

pub mod merits;
pub mod optimizer;
pub mod povm;
pub mod propositions;

pub use merits::{
    evaluate_merits, merit_a1, merit_a2, merit_before, merit_o, Classification, GammaMode, MeritEvaluation, MeritReport,
    MeritSettings, Objective,
};
pub use optimizer::{optimize, Bounds, OptimResult, SearchBudget};
pub use povm::{apply_povm, povm_elements, ActingSet, Outcome, PovmParams};
pub use propositions::{check_propositions, PropositionCheck};

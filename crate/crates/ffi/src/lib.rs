//! C ABI over `densecap`.
//!
//! States live behind an opaque `DcState` handle created by
//! [`dc_state_from_parts`] or [`dc_state_haar`] and released with
//! [`dc_state_free`]. Every fallible function returns a [`DcStatus`]; on
//! failure a description is available from [`dc_last_error_message`] on the
//! same thread. Panics never cross the boundary: they are reported as
//! [`DcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use densecap::linalg::{von_neumann_entropy, ComplexMatrix, DensityMatrix, C64};
use densecap::measures::{self, ScenarioKind};
use densecap::preprocess::{evaluate_merits, ActingSet, GammaMode, MeritSettings, Objective, SearchBudget};
use densecap::sampling;
use densecap::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    NotPositive = 5,
    NotNormalized = 6,
    UnsupportedRank = 7,
    ScenarioMismatch = 8,
    OptimizerFailed = 9,
    Panic = 98,
    Internal = 99,
}

/// Party layout of a dense-coding protocol (senders first, then receivers).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcScenario {
    OneSenderOneReceiver = 0,
    TwoSendersOneReceiver = 1,
    TwoSendersTwoReceivers = 2,
}

/// Which parties apply a local two-outcome POVM.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcActing {
    None = 0,
    Sender = 1,
    Receiver = 2,
    Both = 3,
}

/// Quantity optimized by [`dc_merits`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcObjective {
    /// Dense-coding capacity (bits).
    Capacity = 0,
    /// Teleportation fidelity (two qubits only).
    Fidelity = 1,
}

/// Figures of merit of local pre-processing for one state.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DcMerits {
    /// Merit without pre-processing.
    pub before: f64,
    /// Best merit over single outcomes.
    pub best_outcome: f64,
    /// Probability of that outcome.
    pub best_outcome_probability: f64,
    /// Outcome-averaged merit at the best-outcome parameters.
    pub average_at_best: f64,
    /// Outcome-averaged merit maximized over all parameters.
    pub best_average: f64,
}

/// Opaque density-matrix handle.
pub struct DcState {
    rho: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DcStatus {
    match e {
        Error::NotHermitian { .. } => DcStatus::NotHermitian,
        Error::NotPositive { .. } => DcStatus::NotPositive,
        Error::NotNormalized { .. } => DcStatus::NotNormalized,
        Error::DimensionMismatch(_) => DcStatus::DimensionMismatch,
        Error::InvalidSubsystems(_) | Error::InvalidProbabilities(_) | Error::InvalidParameter(_) | Error::Config(_) => {
            DcStatus::InvalidArgument
        }
        Error::UnsupportedRank { .. } => DcStatus::UnsupportedRank,
        Error::Scenario(_) => DcStatus::ScenarioMismatch,
        Error::OptimizerFailed => DcStatus::OptimizerFailed,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => DcStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (DcStatus, String)>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside densecap".into());
            DcStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (DcStatus, String)>;
}

impl<T> IntoFfi<T> for densecap::Result<T> {
    fn ffi(self) -> Result<T, (DcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (DcStatus, String) {
    (DcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn state_ref<'a>(state: *const DcState) -> Result<&'a DcState, (DcStatus, String)> {
    // SAFETY: the caller passes a handle from `dc_state_*` that is still alive.
    unsafe { state.as_ref() }.ok_or_else(|| null("state"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (DcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller guarantees it is writable.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (DcStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller guarantees `len` readable elements at `p`.
    Ok(unsafe { slice::from_raw_parts(p, len) })
}

fn scenario_kind(s: DcScenario) -> ScenarioKind {
    match s {
        DcScenario::OneSenderOneReceiver => ScenarioKind::OneSenderOneReceiver,
        DcScenario::TwoSendersOneReceiver => ScenarioKind::TwoSendersOneReceiver,
        DcScenario::TwoSendersTwoReceivers => ScenarioKind::TwoSendersTwoReceivers,
    }
}

fn acting_set(a: DcActing) -> ActingSet {
    match a {
        DcActing::None => ActingSet::None,
        DcActing::Sender => ActingSet::Sender,
        DcActing::Receiver => ActingSet::Receiver,
        DcActing::Both => ActingSet::Both,
    }
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len − 1` bytes). Returns the full message length in bytes
/// excluding the terminator, or 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: `buf` has room for `len` bytes and `n < len`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Seed of sample `index` in a run keyed by `master_seed`.
#[no_mangle]
pub extern "C" fn dc_derive_sample_seed(master_seed: u64, index: u64) -> u64 {
    sampling::derive_sample_seed(master_seed, index)
}

/// Build a state from row-major real and imaginary parts of a `dim × dim`
/// density matrix with subsystem dimensions `dims[0..n_dims]`. The matrix must
/// be Hermitian, unit-trace and positive semidefinite within 1e-10.
///
/// # Safety
/// `re` and `im` must point to `dim·dim` doubles, `dims` to `n_dims` values,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_from_parts(
    re: *const f64,
    im: *const f64,
    dim: usize,
    dims: *const usize,
    n_dims: usize,
    out: *mut *mut DcState,
) -> DcStatus {
    guard(|| unsafe {
        let n = dim.checked_mul(dim).ok_or((DcStatus::InvalidArgument, "dimension overflow".into()))?;
        let re = read_slice(re, n, "re")?;
        let im = read_slice(im, n, "im")?;
        let dims = read_slice(dims, n_dims, "dims")?.to_vec();
        if re.len() != n || im.len() != n {
            return Err((DcStatus::InvalidArgument, "matrix dimension must be positive".into()));
        }
        let data = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let rho = DensityMatrix::new(ComplexMatrix::from_vec(dim, data).ffi()?, dims).ffi()?;
        write_out(out, Box::into_raw(Box::new(DcState { rho })))
    })
}

/// Random state of exactly `rank` on subsystems `dims`, obtained by tracing
/// out a `rank`-dimensional ancilla of a Haar-random pure state.
///
/// # Safety
/// `dims` must point to `n_dims` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_haar(
    dims: *const usize,
    n_dims: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut DcState,
) -> DcStatus {
    guard(|| unsafe {
        let dims = read_slice(dims, n_dims, "dims")?;
        let rho = sampling::haar_mixed(dims, rank, seed).ffi()?;
        write_out(out, Box::into_raw(Box::new(DcState { rho })))
    })
}

/// Release a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dc_state_free(state: *mut DcState) {
    if !state.is_null() {
        // SAFETY: the handle came from `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Total Hilbert-space dimension of the state.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_dim(state: *const DcState, out: *mut usize) -> DcStatus {
    guard(|| unsafe { write_out(out, state_ref(state)?.rho.dim()) })
}

/// Copy the matrix entries into row-major `re` / `im` buffers of `len` doubles
/// each (`len` must be at least `dim·dim`).
///
/// # Safety
/// `state` must be a live handle and `re`, `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dc_state_entries(state: *const DcState, re: *mut f64, im: *mut f64, len: usize) -> DcStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        let m = s.rho.mat().as_slice();
        if len < m.len() {
            return Err((DcStatus::InvalidArgument, format!("buffers hold {len} entries, need {}", m.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        for (i, z) in m.iter().enumerate() {
            re.add(i).write(z.re);
            im.add(i).write(z.im);
        }
        Ok(())
    })
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_entropy(state: *const DcState, out: *mut f64) -> DcStatus {
    guard(|| unsafe { write_out(out, von_neumann_entropy(&state_ref(state)?.rho)) })
}

/// Dense-coding capacity in bits. For two senders and two receivers this is
/// the upper bound with `S1↔R1`, `S2↔R2` pairing.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_dense_coding_capacity(state: *const DcState, scenario: DcScenario, out: *mut f64) -> DcStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        let v = measures::dcc(&s.rho, &scenario_kind(scenario).scenario()).ffi()?;
        write_out(out, v)
    })
}

/// Teleportation fidelity of a two-qubit state.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_teleportation_fidelity(state: *const DcState, out: *mut f64) -> DcStatus {
    guard(|| unsafe { write_out(out, measures::teleportation_fidelity(&state_ref(state)?.rho).ffi()?) })
}

/// CHSH parameter `M` (sum of the two largest eigenvalues of `CᵀC`) of a
/// two-qubit state; `M > 1` signals a Bell violation.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_chsh_parameter(state: *const DcState, out: *mut f64) -> DcStatus {
    guard(|| unsafe { write_out(out, measures::chsh_parameter(&state_ref(state)?.rho).ffi()?) })
}

/// Negativity across the cut `side : rest`.
///
/// # Safety
/// `state` must be a live handle, `side` must point to `n_side` indices and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_negativity(state: *const DcState, side: *const usize, n_side: usize, out: *mut f64) -> DcStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        let side = read_slice(side, n_side, "side")?;
        write_out(out, measures::negativity(&s.rho, side).ffi()?)
    })
}

/// Optimize local two-outcome POVMs on the acting parties and report all
/// figures of merit. `starts`, `iters` and `tol` configure the multi-start
/// simplex search; `seed` makes it reproducible.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_merits(
    state: *const DcState,
    scenario: DcScenario,
    acting: DcActing,
    objective: DcObjective,
    starts: usize,
    iters: usize,
    tol: f64,
    seed: u64,
    out: *mut DcMerits,
) -> DcStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        if starts == 0 || iters == 0 || !(tol > 0.0) {
            return Err((DcStatus::InvalidArgument, "starts, iters and tol must be positive".into()));
        }
        let settings = MeritSettings {
            budget: SearchBudget { starts, max_iters: iters, tol },
            gamma_mode: GammaMode::Free,
        };
        let objective = match objective {
            DcObjective::Capacity => Objective::Dcc,
            DcObjective::Fidelity => Objective::Tf,
        };
        let factor = s.rho.to_factor(1e-14).ffi()?;
        let r = evaluate_merits(&factor, &scenario_kind(scenario).scenario(), acting_set(acting), objective, &settings, seed)
            .ffi()?
            .report;
        write_out(
            out,
            DcMerits {
                before: r.merit_before,
                best_outcome: r.o,
                best_outcome_probability: r.p_o,
                average_at_best: r.a1,
                best_average: r.a2,
            },
        )
    })
}

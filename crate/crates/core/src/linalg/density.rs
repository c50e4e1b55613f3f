//! Density matrices, pure states and low-rank factored states, with partial
//! trace and partial transpose by mixed-radix index arithmetic.
//!
//! Subsystem order is the order of `dims`; the first subsystem is the most
//! significant digit of the global index, matching [`ComplexMatrix::kron`].

use crate::error::{Error, Result};
use crate::linalg::eigen::{eigvals_hermitian, eigvals_in_place};
use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};

/// Tolerance for Hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance on the norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;

/// A validated density matrix with its subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

/// A normalized state vector with its subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: Vec<C64>,
    dims: Vec<usize>,
}

fn check_dims(dims: &[usize], total: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch("subsystem dimensions must be positive".into()));
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} multiply to {product}, matrix has dimension {total}"
        )));
    }
    Ok(())
}

fn check_subset(set: &[usize], n: usize, allow_empty: bool) -> Result<Vec<bool>> {
    if set.is_empty() && !allow_empty {
        return Err(Error::InvalidSubsystems("subsystem set must be nonempty".into()));
    }
    let mut mask = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::InvalidSubsystems(format!("index {i} out of range for {n} subsystems")));
        }
        if mask[i] {
            return Err(Error::InvalidSubsystems(format!("index {i} listed twice")));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// For each global index, its position within the kept subsystems and within
/// the traced subsystems.
fn split_indices(dims: &[usize], keep: &[bool]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let total: usize = dims.iter().product();
    let kept_dim: usize = dims.iter().zip(keep).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let traced_dim = total / kept_dim;
    let mut kept_idx = vec![0; total];
    let mut traced_idx = vec![0; total];
    for g in 0..total {
        let mut rem = g;
        let mut stride = total;
        let (mut ki, mut ti) = (0, 0);
        for (&d, &k) in dims.iter().zip(keep) {
            stride /= d;
            let digit = rem / stride;
            rem %= stride;
            if k {
                ki = ki * d + digit;
            } else {
                ti = ti * d + digit;
            }
        }
        kept_idx[g] = ki;
        traced_idx[g] = ti;
    }
    (kept_idx, traced_idx, kept_dim, traced_dim)
}

/// Mask selecting, for each global index, the bits belonging to `side`,
/// expressed as the index contribution of those digits.
fn side_component(dims: &[usize], side: &[bool]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let mut comp = vec![0; total];
    for (g, c) in comp.iter_mut().enumerate() {
        let mut rem = g;
        let mut stride = total;
        for (&d, &s) in dims.iter().zip(side) {
            stride /= d;
            let digit = rem / stride;
            rem %= stride;
            if s {
                *c += digit * stride;
            }
        }
    }
    comp
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, mat.dim())?;
        let residual = mat.hermitian_residual();
        if residual > STATE_TOL || !residual.is_finite() {
            return Err(Error::NotHermitian { residual });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        let min_eigenvalue = eigvals_hermitian(&mat)?[0];
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let mut mat = mat;
        mat.symmetrize();
        Ok(Self { mat, dims })
    }

    /// Construct without validation; the caller guarantees the invariants.
    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.dim());
        Self { mat, dims }
    }

    /// Normalize a Hermitian PSD matrix by its trace and validate.
    pub fn from_unnormalized(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let trace = mat.trace().re;
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::NotNormalized { trace });
        }
        Self::new(mat.scale_real(1.0 / trace), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        check_dims(&dims, d)?;
        Ok(Self { mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims })
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut buf = self.mat.as_slice().to_vec();
        eigvals_in_place(self.dim(), &mut buf)
    }

    /// Number of eigenvalues above `tol`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&w| w > tol).count()
    }

    /// `ρ ⊗ σ` with concatenated subsystem lists.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { mat: self.mat.kron(&other.mat), dims }
    }

    /// Reduced state on the subsystems in `keep` (in increasing subsystem order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mask = check_subset(keep, self.dims.len(), false)?;
        let (kept_idx, traced_idx, kd, _) = split_indices(&self.dims, &mask);
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(kd);
        for i in 0..n {
            for j in 0..n {
                if traced_idx[i] == traced_idx[j] {
                    out[(kept_idx[i], kept_idx[j])] += self.mat[(i, j)];
                }
            }
        }
        let dims = self.dims.iter().zip(&mask).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
        Ok(Self { mat: out, dims })
    }

    /// Partial transpose on the subsystems listed in `side`.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<ComplexMatrix> {
        let mask = check_subset(side, self.dims.len(), true)?;
        Ok(partial_transpose_raw(&self.mat, &self.dims, &mask))
    }

    /// Conjugate by a unitary (or any operator): `U ρ U^dagger`, unnormalized.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.matmul(&self.mat).matmul(&u.adjoint())
    }

    /// Expectation value `tr(ρ O)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)] * op[(j, i)];
            }
        }
        acc
    }
}

pub(crate) fn partial_transpose_raw(m: &ComplexMatrix, dims: &[usize], side: &[bool]) -> ComplexMatrix {
    let n = m.dim();
    let comp = side_component(dims, side);
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            // swap the side digits of row and column
            let i2 = i - comp[i] + comp[j];
            let j2 = j - comp[j] + comp[i];
            out[(i2, j2)] = m[(i, j)];
        }
    }
    out
}

impl PureState {
    pub fn new(vec: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, vec.len())?;
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { trace: norm * norm });
        }
        Ok(Self { vec, dims })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(vec: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, vec.len())?;
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { trace: 0.0 });
        }
        Ok(Self { vec: vec.into_iter().map(|z| z / norm).collect(), dims })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.vec
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { mat: ComplexMatrix::outer(&self.vec), dims: self.dims.clone() }
    }

    pub fn to_factor(&self) -> StateFactor {
        StateFactor { dims: self.dims.clone(), rank: 1, data: self.vec.clone() }
    }
}

/// A state held as `ρ = G G^dagger / tr(G G^dagger)` with `G` of shape `D × r`.
///
/// Local Kraus operators act on `G` directly, and the nonzero spectrum of `ρ`
/// is obtained from the `r × r` Gram matrix, which keeps POVM optimization
/// on low-rank states cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFactor {
    dims: Vec<usize>,
    rank: usize,
    /// Row-major `D × rank`.
    data: Vec<C64>,
}

impl StateFactor {
    pub fn new(dims: Vec<usize>, rank: usize, data: Vec<C64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        check_dims(&dims, d)?;
        if rank == 0 || data.len() != d * rank {
            return Err(Error::DimensionMismatch(format!(
                "factor with {} entries does not match {d}x{rank}",
                data.len()
            )));
        }
        Ok(Self { dims, rank, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.len() / self.rank
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// `tr(G G^dagger)`.
    pub fn weight(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Scale so that `tr(G G^dagger) = 1`.
    pub fn normalize(&mut self) -> f64 {
        let w = self.weight();
        if w > 0.0 {
            let s = 1.0 / w.sqrt();
            for z in &mut self.data {
                *z *= s;
            }
        }
        w
    }

    /// Normalized density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let r = self.rank;
        let w = self.weight();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                let mut acc = ZERO;
                for k in 0..r {
                    acc += self.data[i * r + k] * self.data[j * r + k].conj();
                }
                acc /= w;
                m[(i, j)] = acc;
                m[(j, i)] = acc.conj();
            }
        }
        DensityMatrix { mat: m, dims: self.dims.clone() }
    }

    /// Ascending eigenvalues of the normalized Gram matrix; these are the
    /// nonzero-block eigenvalues of `ρ` (the rest of the spectrum is zero).
    pub fn spectrum(&self) -> Vec<f64> {
        let d = self.dim();
        let r = self.rank;
        let w = self.weight();
        let mut g = vec![ZERO; r * r];
        for a in 0..r {
            for b in a..r {
                let mut acc = ZERO;
                for i in 0..d {
                    acc += self.data[i * r + a].conj() * self.data[i * r + b];
                }
                acc /= w;
                g[a * r + b] = acc;
                g[b * r + a] = acc.conj();
            }
        }
        eigvals_in_place(r, &mut g)
    }

    /// Normalized reduced state on `keep` as a plain matrix.
    pub fn reduced_matrix(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let mask = check_subset(keep, self.dims.len(), false)?;
        let total = self.dim();
        let r = self.rank;
        // Global index = kept_offset[a] + traced_offset[t]; both tables are
        // built digit by digit from the least significant subsystem.
        let mut kept_offset = vec![0usize];
        let mut traced_offset = vec![0usize];
        let mut stride = 1;
        for (&d, &k) in self.dims.iter().zip(&mask).rev() {
            let table = if k { &mut kept_offset } else { &mut traced_offset };
            let prev = std::mem::take(table);
            for digit in 0..d {
                table.extend(prev.iter().map(|&o| o + digit * stride));
            }
            stride *= d;
        }
        debug_assert_eq!(kept_offset.len() * traced_offset.len(), total);
        let kd = kept_offset.len();
        let w = self.weight();
        let mut out = ComplexMatrix::zeros(kd);
        for &t in &traced_offset {
            for a in 0..kd {
                let ga = (kept_offset[a] + t) * r;
                let ra = &self.data[ga..ga + r];
                for b in a..kd {
                    let gb = (kept_offset[b] + t) * r;
                    let rb = &self.data[gb..gb + r];
                    let mut acc = ZERO;
                    for k in 0..r {
                        acc += ra[k] * rb[k].conj();
                    }
                    out[(a, b)] += acc;
                }
            }
        }
        for a in 0..kd {
            out[(a, a)].im = 0.0;
            for b in a..kd {
                let z = out[(a, b)] / w;
                out[(a, b)] = z;
                out[(b, a)] = z.conj();
            }
        }
        Ok(out)
    }

    /// Normalized reduced state on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mat = self.reduced_matrix(keep)?;
        let mask = check_subset(keep, self.dims.len(), false)?;
        let dims = self.dims.iter().zip(&mask).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
        Ok(DensityMatrix { mat, dims })
    }

    /// Apply a `d × d` operator (row-major) to one subsystem of `G`, in place.
    pub fn apply_local(&mut self, party: usize, op: &[C64]) {
        let d_party = self.dims[party];
        debug_assert_eq!(op.len(), d_party * d_party);
        let stride: usize = self.dims[party + 1..].iter().product();
        let total = self.dim();
        let r = self.rank;
        let block = stride * d_party;
        let mut tmp = vec![ZERO; d_party];
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                for k in 0..r {
                    for (a, t) in tmp.iter_mut().enumerate() {
                        *t = self.data[(outer + inner + a * stride) * r + k];
                    }
                    for a in 0..d_party {
                        let mut acc = ZERO;
                        for b in 0..d_party {
                            acc += op[a * d_party + b] * tmp[b];
                        }
                        self.data[(outer + inner + a * stride) * r + k] = acc;
                    }
                }
            }
        }
    }
}

impl DensityMatrix {
    /// Factor `ρ = G G^dagger` from its eigen-decomposition, keeping
    /// eigenvalues above `tol`.
    pub fn to_factor(&self, tol: f64) -> Result<StateFactor> {
        let (w, v) = crate::linalg::eigen::eig_hermitian(&self.mat)?;
        let d = self.dim();
        let keep: Vec<usize> = (0..d).filter(|&k| w[k] > tol).collect();
        if keep.is_empty() {
            return Err(Error::NotPositive { min_eigenvalue: w[d - 1] });
        }
        let r = keep.len();
        let mut data = vec![ZERO; d * r];
        for (c, &k) in keep.iter().enumerate() {
            let s = w[k].sqrt();
            for i in 0..d {
                data[i * r + c] = v[(i, k)] * s;
            }
        }
        StateFactor::new(self.dims.clone(), r, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().to_density();
        let r = rho.partial_trace(&[1]).unwrap();
        assert!(r.mat().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert_eq!(r.dims(), &[2]);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let rho = bell().to_density();
        let pt = rho.partial_transpose(&[1]).unwrap();
        let w = eigvals_hermitian(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_keep_is_rejected() {
        let rho = bell().to_density();
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[2]).is_err());
    }

    #[test]
    fn keep_everything_returns_input() {
        let rho = bell().to_density();
        assert_eq!(rho.partial_trace(&[0, 1]).unwrap(), rho);
    }

    #[test]
    fn validation_catches_each_invariant() {
        let not_herm = ComplexMatrix::from_real_rows(&[vec![0.5, 0.1], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(DensityMatrix::new(not_herm, vec![2]), Err(Error::NotHermitian { .. })));
        let trace2 = ComplexMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(trace2, vec![2]), Err(Error::NotNormalized { .. })));
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(negative, vec![2]), Err(Error::NotPositive { .. })));
        let wrong_dims = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!(DensityMatrix::new(wrong_dims, vec![3]).is_err());
    }

    #[test]
    fn apply_local_matches_kron_on_middle_qubit() {
        let amps: Vec<C64> = (0..8).map(|k| C64::new(k as f64 * 0.1 + 0.05, -(k as f64) * 0.03)).collect();
        let psi = PureState::normalized(amps, vec![2, 2, 2]).unwrap();
        let op = [C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.0, 0.4), C64::new(0.9, -0.1)];
        let mut f = psi.to_factor();
        f.apply_local(1, &op);
        let opm = ComplexMatrix::from_vec(2, op.to_vec()).unwrap();
        let full = ComplexMatrix::identity(2).kron(&opm).kron(&ComplexMatrix::identity(2));
        for i in 0..8 {
            let mut acc = ZERO;
            for j in 0..8 {
                acc += full[(i, j)] * psi.amplitudes()[j];
            }
            assert!((acc - f.data()[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn factor_reduced_matches_dense_partial_trace() {
        let data: Vec<C64> = (0..16).map(|k| C64::new((k as f64).sin(), (2.0 * k as f64).cos())).collect();
        let f = StateFactor::new(vec![2, 2, 2], 2, data).unwrap();
        let rho = f.to_density();
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let a = f.reduced_matrix(&keep).unwrap();
            let b = rho.partial_trace(&keep).unwrap();
            assert!(a.max_abs_diff(b.mat()) < 1e-14, "keep {keep:?}");
        }
    }
}

//! Cyclic Jacobi eigensolver for Hermitian matrices and a one-sided Jacobi SVD
//! for small real matrices.
//!
//! Matrices in this crate are at most 64×64 and usually 4×4 to 16×16, where
//! Jacobi is both accurate (small relative error on tiny eigenvalues, which
//! matters for entropies) and fast enough.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Hermiticity tolerance for eigensolver inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `m = V diag(w) V^dagger` with `w` ascending and the
/// eigenvectors stored as the columns of `V`.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(m)?;
    let n = m.dim();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = ComplexMatrix::identity(n);
    jacobi(n, a.as_mut_slice(), Some(v.as_mut_slice()));

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok((values, vectors))
}

/// Ascending eigenvalues only; skips eigenvector accumulation.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut a = m.clone();
    a.symmetrize();
    Ok(eigvals_in_place(m.dim(), a.as_mut_slice()))
}

/// Eigenvalues of an already-Hermitian row-major buffer, without validation.
/// The buffer is destroyed. Used on hot paths where Hermiticity holds by
/// construction (Gram matrices, reduced states).
pub(crate) fn eigvals_in_place(n: usize, a: &mut [C64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    match n {
        1 => return vec![a[0].re],
        2 => {
            let (p, q) = (a[0].re, a[3].re);
            let mean = 0.5 * (p + q);
            let half = 0.5 * (p - q);
            let r = (half * half + a[1].norm_sqr()).sqrt();
            return vec![mean - r, mean + r];
        }
        3 => return eigvals_fixed::<3>(a),
        4 => return eigvals_fixed::<4>(a),
        _ => {}
    }
    jacobi(n, a, None);
    let mut w: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    w.sort_by(f64::total_cmp);
    w
}

/// Jacobi on a fixed-size copy; the compile-time size lets the rotation loops
/// unroll, which matters for the many 4×4 two-qubit marginals.
fn eigvals_fixed<const N: usize>(buf: &[C64]) -> Vec<f64> {
    let mut a = [[ZERO; N]; N];
    for (i, row) in a.iter_mut().enumerate() {
        row.copy_from_slice(&buf[i * N..(i + 1) * N]);
    }
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    if total > 0.0 {
        let tiny = f64::EPSILON * f64::EPSILON * total;
        for _sweep in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..N {
                for q in (p + 1)..N {
                    off += a[p][q].norm_sqr();
                }
            }
            if off <= tiny {
                break;
            }
            for p in 0..N - 1 {
                for q in (p + 1)..N {
                    let z = a[p][q];
                    let r = z.norm_sqr().sqrt();
                    if r == 0.0 {
                        continue;
                    }
                    let app = a[p][p].re;
                    let aqq = a[q][q].re;
                    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                        a[p][q] = ZERO;
                        a[q][p] = ZERO;
                        continue;
                    }
                    let e = z / r;
                    let theta = (aqq - app) / (2.0 * r);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let ec = e.conj();
                    for row in a.iter_mut() {
                        let (akp, akq) = (row[p], row[q]);
                        row[p] = akp * c - akq * ec * s;
                        row[q] = akp * s + akq * ec * c;
                    }
                    for k in 0..N {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = apk * c - aqk * e * s;
                        a[q][k] = apk * s + aqk * e * c;
                    }
                    a[p][q] = ZERO;
                    a[q][p] = ZERO;
                    a[p][p].im = 0.0;
                    a[q][q].im = 0.0;
                }
            }
        }
    }
    let mut w: Vec<f64> = (0..N).map(|i| a[i][i].re).collect();
    w.sort_by(f64::total_cmp);
    w
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let residual = m.hermitian_residual();
    if residual > HERMITIAN_TOL || !residual.is_finite() {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn jacobi(n: usize, a: &mut [C64], mut v: Option<&mut [C64]>) {
    if n < 2 {
        return;
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return;
    }
    let tiny = f64::EPSILON * f64::EPSILON * total;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= tiny {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let z = a[p * n + q];
                let r = z.norm_sqr().sqrt();
                if r == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Skip rotations that would not change the diagonal at working precision.
                if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let e = z / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ec = e.conj();

                // A <- A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * ec * s;
                    a[k * n + q] = akp * s + akq * ec * c;
                }
                // A <- J^dagger A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * e * s;
                    a[q * n + k] = apk * s + aqk * e * c;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c - vkq * ec * s;
                        v[k * n + q] = vkp * s + vkq * ec * c;
                    }
                }
            }
        }
    }
}

/// Reassemble `V diag(w) V^dagger`.
pub fn reconstruct(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let n = vectors.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &w) in values.iter().enumerate() {
        for i in 0..n {
            let vi = vectors[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)].conj();
            }
        }
    }
    out
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (w, v) = eig_hermitian(m)?;
    let fw: Vec<f64> = w.into_iter().map(f).collect();
    Ok(reconstruct(&fw, &v))
}

/// Singular values of a real 3×3 matrix (descending) by one-sided Jacobi.
pub fn singular_values_3x3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    // Work on columns; rotate pairs until mutually orthogonal.
    let mut cols = [[0.0f64; 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        for i in 0..3 {
            col[i] = m[i][j];
        }
    }
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..2 {
            for q in (p + 1)..3 {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..3 {
                    let x = cols[p][i];
                    let y = cols[q][i];
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = [0.0; 3];
    for j in 0..3 {
        sv[j] = dot(&cols[j], &cols[j]).sqrt();
    }
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Ascending eigenvalues of a real symmetric 3×3 matrix.
pub fn symmetric_eigvals_3x3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut buf: Vec<C64> = Vec::with_capacity(9);
    for row in m {
        for &x in row {
            buf.push(C64::new(x, 0.0));
        }
    }
    let w = eigvals_in_place(3, &mut buf);
    [w[0], w[1], w[2]]
}

/// `V^dagger V` distance from the identity (max entry).
pub fn unitarity_residual(v: &ComplexMatrix) -> f64 {
    let g = v.adjoint().matmul(v);
    let n = v.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_eigenvalues() {
        let (w, v) = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(w, vec![1.0, 1.0]);
        assert!(unitarity_residual(&v) < 1e-15);
    }

    #[test]
    fn pauli_z_eigenvalues_ascending() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let w = eigvals_hermitian(&z).unwrap();
        assert_eq!(w, vec![-1.0, 1.0]);
    }

    #[test]
    fn pauli_y_is_diagonalized() {
        let y = ComplexMatrix::from_rows(&[
            vec![ZERO, C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), ZERO],
        ])
        .unwrap();
        let (w, v) = eig_hermitian(&y).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        assert!(reconstruct(&w, &v).max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn fixed_size_path_matches_general_jacobi() {
        for n in [3usize, 4] {
            let mut m = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let z = C64::new((1.3 * (i + 2 * j) as f64).sin(), if i == j { 0.0 } else { (0.7 * (i * j + 1) as f64).cos() });
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            let mut general = m.as_slice().to_vec();
            jacobi(n, &mut general, None);
            let mut wg: Vec<f64> = (0..n).map(|i| general[i * n + i].re).collect();
            wg.sort_by(f64::total_cmp);
            let wf = eigvals_hermitian(&m).unwrap();
            for (a, b) in wg.iter().zip(&wf) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_values_of_diagonal_are_absolute_entries() {
        let sv = singular_values_3x3(&[[1.0, 0.0, 0.0], [0.0, -3.0, 0.0], [0.0, 0.0, 0.5]]);
        assert_eq!(sv, [3.0, 1.0, 0.5]);
    }

    #[test]
    fn singular_values_of_rotation_are_one() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let sv = singular_values_3x3(&[[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
        for x in sv {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }
}

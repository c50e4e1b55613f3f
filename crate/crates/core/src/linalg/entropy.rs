use crate::error::{Error, Result};
use crate::linalg::density::DensityMatrix;
use crate::linalg::eigen::{eig_hermitian, reconstruct};
use crate::linalg::matrix::ComplexMatrix;

/// Eigenvalues at or below this threshold contribute nothing to an entropy.
pub const LOG_CLAMP: f64 = 1e-12;

/// Negative eigenvalues down to this value are treated as zero by the PSD square root.
pub const SQRT_NEG_TOL: f64 = 1e-8;

#[inline]
fn plogp(p: f64) -> f64 {
    if p <= LOG_CLAMP {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `-Σ λ log₂ λ` over a spectrum, with `0 log 0 := 0`.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&p| plogp(p)).sum::<f64>().max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilities("empty probability vector".into()));
    }
    if let Some(&bad) = p.iter().find(|&&x| x < -LOG_CLAMP || !x.is_finite()) {
        return Err(Error::InvalidProbabilities(format!("entry {bad} is negative or not finite")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
    }
    Ok(entropy_of_spectrum(p))
}

/// Binary entropy `H({x, 1-x})`, clamped to the unit interval.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    plogp(x) + plogp(1.0 - x)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (w, v) = eig_hermitian(m)?;
    if w[0] < -SQRT_NEG_TOL {
        return Err(Error::NotPositive { min_eigenvalue: w[0] });
    }
    let s: Vec<f64> = w.iter().map(|&x| x.max(0.0).sqrt()).collect();
    let mut r = reconstruct(&s, &v);
    r.symmetrize();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shannon_rejects_bad_sum() {
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
        // tiny negatives are tolerated
        assert!(shannon_entropy(&[1.0 + 1e-13, -1e-13]).is_ok());
    }

    #[test]
    fn maximally_mixed_entropies() {
        let one = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let two = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!((von_neumann_entropy(&one) - 1.0).abs() < 1e-14);
        assert!((von_neumann_entropy(&two) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_examples() {
        let i = ComplexMatrix::identity(3);
        assert!(matrix_sqrt_psd(&i).unwrap().max_abs_diff(&i) < 1e-15);
        let d = ComplexMatrix::diag_real(&[4.0, 9.0]);
        let r = matrix_sqrt_psd(&d).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_negative_and_clamps_noise() {
        assert!(matrix_sqrt_psd(&ComplexMatrix::diag_real(&[1.0, -1e-6])).is_err());
        let r = matrix_sqrt_psd(&ComplexMatrix::diag_real(&[1.0, -1e-11])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }
}

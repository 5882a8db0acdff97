//! Hermitian eigensolver (cyclic complex Jacobi) and von Neumann entropy.
//!
//! The matrices this crate diagonalizes are at most 256×256, so a
//! rotation-based solver with guaranteed convergence behavior is the right
//! trade against asymptotically faster factorizations.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{ComplexMatrix, DensityMatrix};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Rejects inputs whose hermiticity defect exceeds [`Real::UNITARY_TOL`];
/// fails with [`Error::EigenNoConvergence`] if the off-diagonal norm does
/// not fall below [`Real::EIGEN_OFF_TOL`] (relative above unit scale)
/// within 100 sweeps.
pub fn hermitian_eigenvalues<T: Real>(mat: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let herm = mat.hermiticity_defect();
    if herm > T::UNITARY_TOL {
        return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
    }

    let n = mat.dim();
    let mut a = mat.clone();
    let scale = frobenius_norm(&a).max(T::one());
    let threshold = T::EIGEN_OFF_TOL * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate_pair(&mut a, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }

    let mut eigs: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalue is NaN"));
    Ok(eigs)
}

/// One Jacobi rotation annihilating the off-diagonal pair (p, q).
///
/// Conjugates `a` by the unitary that diagonalizes the 2×2 Hermitian block
/// [[α, γ], [γ̄, β]]: a phase factor e^{iφ} = γ/|γ| folded into a real
/// Givens rotation.
fn rotate_pair<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let gamma = a[(p, q)];
    let mag = gamma.norm();
    if mag == T::zero() {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let phase = gamma / mag;

    // tan of the rotation angle, smaller-magnitude root for stability
    let tau = (alpha - beta) / (mag + mag);
    let t = {
        let root = (T::one() + tau * tau).sqrt();
        if tau >= T::zero() {
            T::one() / (tau + root)
        } else {
            -T::one() / (-tau + root)
        }
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // Column update: B = A·V with V = [[c, -s·e^{iφ}], [s·e^{-iφ}, c]]
    let n = a.dim();
    let phase_conj = phase.conj();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * phase_conj * s;
        a[(k, q)] = akq * c - akp * phase * s;
    }
    // Row update: A' = V†·B
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * phase * s;
        a[(q, k)] = aqk * c - apk * phase_conj * s;
    }
    // Pin the algebraically exact entries.
    let two = T::one() + T::one();
    a[(p, p)] = Complex::new(alpha * c * c + two * mag * s * c + beta * s * s, T::zero());
    a[(q, q)] = Complex::new(alpha * s * s - two * mag * s * c + beta * c * c, T::zero());
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn frobenius_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    a.entries()
        .iter()
        .map(|e| e.norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Von Neumann entropy in bits: S(ρ) = −Σ λ log₂ λ over eigenvalues above
/// [`Real::ENTROPY_CUTOFF`]. Round-off negatives fall below the cutoff and
/// contribute zero, by continuity of x·log x at 0.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let eigs = hermitian_eigenvalues(rho.matrix())?;
    let ln2 = T::LN_2();
    let mut s = T::zero();
    for lambda in eigs {
        if lambda > T::ENTROPY_CUTOFF {
            s -= lambda * (lambda.ln() / ln2);
        }
    }
    Ok(s)
}

//! Quantum-state primitives: state vectors, density matrices, unitaries,
//! and partial traces over qubit subsets.
//!
//! Basis-index convention, fixed crate-wide: **qubit 0 is the least
//! significant bit of the basis index**. Basis state `|i⟩` assigns qubit
//! `q` the bit `(i >> q) & 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Build from row-major entries; `data.len()` must be `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            t = t + self[(i, i)];
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from the Hermitian condition `A = A†`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> T {
        let gram = self.adjoint().matmul(self);
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expect = if i == j { T::one() } else { T::zero() };
                let d = (gram[(i, j)] - Complex::new(expect, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Pure state of `m` qubits as 2^m complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// The computational basis state |0…0⟩.
    pub fn zero_state(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "need at least one qubit");
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Self { num_qubits, amps }
    }

    /// A specific computational basis state |index⟩.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let mut s = Self::zero_state(num_qubits);
        s.amps[0] = Complex::new(T::zero(), T::zero());
        s.amps[index] = Complex::new(T::one(), T::zero());
        s
    }

    /// Build from raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{num_qubits} qubits need {} amplitudes, got {}",
                1usize << num_qubits,
                amps.len()
            )));
        }
        let s = Self { num_qubits, amps };
        let defect = (s.norm_sqr() - T::one()).abs();
        if defect > T::DEFAULT_TOL {
            return Err(Error::NotNormalized(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(s)
    }

    pub(crate) fn from_amplitudes_unchecked(num_qubits: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// The pure projector |ψ⟩⟨ψ| as a density matrix.
    pub fn projector(&self) -> DensityMatrix<T> {
        let dim = self.amps.len();
        let mut mat = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix {
            num_qubits: self.num_qubits,
            mat,
        }
    }

    /// Reduced density matrix on `keep`, tracing out every other qubit.
    ///
    /// `keep` must be a nonempty, sorted, duplicate-free set of qubit
    /// indices. Keeping every qubit returns the pure projector.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let (keep, complement) = split_keep(keep, self.num_qubits)?;
        let kd = 1usize << keep.len();
        let kept_index = scatter_table(&keep);
        let comp_index = scatter_table(&complement);

        let mut mat = ComplexMatrix::zeros(kd);
        for a in 0..kd {
            for b in a..kd {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &c in &comp_index {
                    acc = acc + self.amps[kept_index[a] | c] * self.amps[kept_index[b] | c].conj();
                }
                mat[(a, b)] = acc;
                if a != b {
                    mat[(b, a)] = acc.conj();
                }
            }
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            mat,
        })
    }
}

/// Mixed state of `num_qubits` qubits: Hermitian, unit-trace, PSD matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    num_qubits: usize,
    mat: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Build from entries, checking hermiticity and unit trace.
    ///
    /// Positive semidefiniteness needs an eigendecomposition and is left to
    /// [`DensityMatrix::validate`]; the entropy path clamps stray negative
    /// eigenvalues below the cutoff regardless.
    pub fn new(num_qubits: usize, mat: ComplexMatrix<T>) -> Result<Self> {
        if mat.dim() != 1 << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{num_qubits} qubits need dimension {}, got {}",
                1usize << num_qubits,
                mat.dim()
            )));
        }
        let herm = mat.hermiticity_defect();
        if herm > T::DEFAULT_TOL {
            return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = mat.trace();
        let defect = (tr - Complex::new(T::one(), T::zero())).norm();
        if defect > T::DEFAULT_TOL {
            return Err(Error::NotDensity(format!(
                "trace deviates from 1 by {:e}",
                defect.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self { num_qubits, mat })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.mat[(i, j)]
    }

    /// Full invariant check, including positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.num_qubits, self.mat.clone())?;
        let eigs = crate::eigen::hermitian_eigenvalues(&self.mat)?;
        if let Some(&lowest) = eigs.last() {
            if lowest < -T::DEFAULT_TOL {
                return Err(Error::NotDensity(format!(
                    "negative eigenvalue {lowest}"
                )));
            }
        }
        Ok(())
    }

    /// Partial trace onto `keep`, tracing out the complementary qubits.
    ///
    /// Same contract as [`StateVector::reduced_density`], starting from a
    /// mixed state; the two give the independent computation routes for
    /// pure inputs.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let (keep, complement) = split_keep(keep, self.num_qubits)?;
        let kd = 1usize << keep.len();
        let kept_index = scatter_table(&keep);
        let comp_index = scatter_table(&complement);

        let mut mat = ComplexMatrix::zeros(kd);
        for a in 0..kd {
            for b in a..kd {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &c in &comp_index {
                    acc = acc + self.mat[(kept_index[a] | c, kept_index[b] | c)];
                }
                mat[(a, b)] = acc;
                if a != b {
                    mat[(b, a)] = acc.conj();
                }
            }
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            mat,
        })
    }
}

/// Unitary matrix on `num_qubits` qubits, certified (`U†U = I`) at
/// construction so downstream consumers can rely on it.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T> {
    num_qubits: usize,
    mat: ComplexMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    /// Build from entries, rejecting matrices that are not unitary
    /// within [`Real::UNITARY_TOL`].
    pub fn new(num_qubits: usize, mat: ComplexMatrix<T>) -> Result<Self> {
        if mat.dim() != 1 << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{num_qubits} qubits need dimension {}, got {}",
                1usize << num_qubits,
                mat.dim()
            )));
        }
        let defect = mat.unitarity_defect();
        if defect > T::UNITARY_TOL {
            return Err(Error::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { num_qubits, mat })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            mat: ComplexMatrix::identity(1 << num_qubits),
        }
    }

    pub(crate) fn from_trusted(num_qubits: usize, mat: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(mat.dim(), 1 << num_qubits);
        Self { num_qubits, mat }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.mat[(i, j)]
    }

    /// Apply to a state vector: `U |ψ⟩`.
    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "unitary acts on {} qubits, state has {}",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        let n = self.mat.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                acc = acc + self.mat[(i, j)] * state.amps[j];
            }
            *slot = acc;
        }
        Ok(StateVector::from_amplitudes_unchecked(self.num_qubits, out))
    }
}

/// Validate a keep set and return it with its sorted complement.
fn split_keep(keep: &[usize], num_qubits: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::OverlappingSubsystems(w[0]));
        }
    }
    if let Some(&top) = sorted.last() {
        if top >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: top,
                num_qubits,
            });
        }
    }
    let complement: Vec<usize> = (0..num_qubits).filter(|q| !sorted.contains(q)).collect();
    Ok((sorted, complement))
}

/// For each configuration of the listed qubits, the basis index with those
/// bits placed at their positions and zeros elsewhere.
fn scatter_table(positions: &[usize]) -> Vec<usize> {
    let count = 1usize << positions.len();
    (0..count)
        .map(|bits| {
            positions
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &p)| acc | (((bits >> i) & 1) << p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn bell_state() -> StateVector<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
            .unwrap()
    }

    #[test]
    fn zero_state_is_normalized() {
        let s = StateVector::<f64>::zero_state(3);
        assert_eq!(s.amplitudes().len(), 8);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let err = StateVector::from_amplitudes(1, vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(err, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn bell_reduced_is_maximally_mixed() {
        let rho = bell_state().reduced_density(&[0]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(rho.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn product_state_reduced_is_pure() {
        // |0⟩ ⊗ |1⟩ with qubit 0 = LSB: qubit 1 carries the |1⟩.
        let s = StateVector::<f64>::basis_state(2, 0b10);
        let rho = s.reduced_density(&[1]).unwrap();
        assert!((rho.entry(1, 1).re - 1.0).abs() < 1e-12);
        assert!(rho.entry(0, 0).norm() < 1e-12);
    }

    #[test]
    fn keep_all_returns_projector() {
        let s = bell_state();
        let rho = s.reduced_density(&[0, 1]).unwrap();
        let proj = s.projector();
        assert!(rho.matrix().max_abs_diff(proj.matrix()) < 1e-12);
    }

    #[test]
    fn keep_set_validation() {
        let s = bell_state();
        assert!(matches!(
            s.reduced_density(&[]),
            Err(Error::EmptyKeepSet)
        ));
        assert!(matches!(
            s.reduced_density(&[0, 2]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.reduced_density(&[1, 1]),
            Err(Error::OverlappingSubsystems(1))
        ));
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let dim = 4;
        let mut mat = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            mat[(i, i)] = c(0.25, 0.0);
        }
        let rho = DensityMatrix::new(2, mat).unwrap();
        let marginal = rho.partial_trace(&[0]).unwrap();
        assert!((marginal.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((marginal.entry(1, 1).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let rho = bell_state().projector();
        let marginal = rho.partial_trace(&[1]).unwrap();
        assert!((marginal.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((marginal.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(marginal.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_classical_mixture() {
        // 0.5 |00⟩⟨00| + 0.5 |11⟩⟨11|
        let mut mat = ComplexMatrix::zeros(4);
        mat[(0, 0)] = c(0.5, 0.0);
        mat[(3, 3)] = c(0.5, 0.0);
        let rho = DensityMatrix::new(2, mat).unwrap();
        let marginal = rho.partial_trace(&[0]).unwrap();
        assert!((marginal.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((marginal.entry(1, 1).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_rejects_bad_trace() {
        let mut mat = ComplexMatrix::<f64>::zeros(2);
        mat[(0, 0)] = c(0.7, 0.0);
        mat[(1, 1)] = c(0.7, 0.0);
        assert!(matches!(
            DensityMatrix::new(1, mat),
            Err(Error::NotDensity(_))
        ));
    }

    #[test]
    fn density_matrix_rejects_non_hermitian() {
        let mut mat = ComplexMatrix::<f64>::zeros(2);
        mat[(0, 0)] = c(0.5, 0.0);
        mat[(1, 1)] = c(0.5, 0.0);
        mat[(0, 1)] = c(0.3, 0.0);
        mat[(1, 0)] = c(-0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(1, mat),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let mut mat = ComplexMatrix::<f64>::identity(2);
        mat[(0, 0)] = c(0.9, 0.0);
        assert!(matches!(
            UnitaryMatrix::new(1, mat),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn unitary_apply_matches_by_hand() {
        // X gate flips |0⟩.
        let mut mat = ComplexMatrix::<f64>::zeros(2);
        mat[(0, 1)] = c(1.0, 0.0);
        mat[(1, 0)] = c(1.0, 0.0);
        let x = UnitaryMatrix::new(1, mat).unwrap();
        let out = x.apply(&StateVector::zero_state(1)).unwrap();
        assert!((out.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn works_at_f32() {
        let h = real::<f32>(std::f64::consts::FRAC_1_SQRT_2);
        let s = StateVector::<f32>::from_amplitudes(
            1,
            vec![Complex::new(h, 0.0), Complex::new(h, 0.0)],
        )
        .unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-6);
    }
}

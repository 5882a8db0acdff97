//! Choi-state construction and subsystem mutual-information diagnostics.
//!
//! The ansatz unitary U on n qubits is turned into a pure state on a
//! doubled register by feeding half of n EPR pairs through it:
//! |Ψ⟩ = 2^{-n/2} Σ_i |i⟩_in ⊗ (U|i⟩)_out. Register layout, fixed:
//! input qubits 0..n−1, output qubits n..2n−1. Unitarity forces every
//! single-register marginal of |Ψ⟩ to be maximally mixed, which is what
//! makes the subsystem mutual informations below non-trivial.

use num_complex::Complex;

use crate::circuit::Circuit;
use crate::eigen::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{StateVector, UnitaryMatrix};
use crate::training::TrainingTrace;

/// Index sets of the four subsystems on the doubled register, derived
/// from which ansatz qubit is measured (a single qubit here): `Mi`/`Mo`
/// are the input/output legs of the measured qubit, `Di`/`Do` those of
/// the discarded qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemPartition {
    n: usize,
    measured_qubit: usize,
    mi: Vec<usize>,
    di: Vec<usize>,
    mo: Vec<usize>,
    do_: Vec<usize>,
}

impl SubsystemPartition {
    pub fn new(n: usize, measured_qubit: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("partition needs n >= 2 qubits".into()));
        }
        if measured_qubit >= n {
            return Err(Error::QubitOutOfRange {
                index: measured_qubit,
                num_qubits: n,
            });
        }
        let discard: Vec<usize> = (0..n).filter(|&q| q != measured_qubit).collect();
        Ok(Self {
            n,
            measured_qubit,
            mi: vec![measured_qubit],
            di: discard.clone(),
            mo: vec![measured_qubit + n],
            do_: discard.iter().map(|&q| q + n).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured_qubit
    }

    /// Input leg of the measured qubit.
    pub fn mi(&self) -> &[usize] {
        &self.mi
    }

    /// Input legs of the discarded qubits, ascending.
    pub fn di(&self) -> &[usize] {
        &self.di
    }

    /// Output leg of the measured qubit.
    pub fn mo(&self) -> &[usize] {
        &self.mo
    }

    /// Output legs of the discarded qubits, ascending.
    pub fn do_(&self) -> &[usize] {
        &self.do_
    }
}

/// The ansatz unitary as a pure state on 2n qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState<T> {
    n: usize,
    state: StateVector<T>,
}

impl<T: Real> ChoiState<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    /// Mutual information I(A:B) = S(A) + S(B) − S(A∪B) in bits between
    /// disjoint qubit sets of the doubled register. Returns the raw
    /// value; tiny negatives are round-off and are clamped at reporting.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<T> {
        mutual_information(&self.state, a, b)
    }
}

/// Build the Choi state of a unitary: amplitude at (in = i, out = j) is
/// U[j, i] / √(2^n).
pub fn choi_state<T: Real>(u: &UnitaryMatrix<T>) -> ChoiState<T> {
    let n = u.num_qubits();
    let dim = u.dim();
    let scale = Complex::new(T::one() / (T::from_usize(dim).unwrap()).sqrt(), T::zero());
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for j in 0..dim {
        for i in 0..dim {
            amps[(j << n) | i] = u.entry(j, i) * scale;
        }
    }
    ChoiState {
        n,
        state: StateVector::from_amplitudes_unchecked(2 * n, amps),
    }
}

/// Mutual information between disjoint subsystems of any pure state.
pub fn mutual_information<T: Real>(
    psi: &StateVector<T>,
    a: &[usize],
    b: &[usize],
) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    if let Some(&q) = a.iter().find(|q| b.contains(q)) {
        return Err(Error::OverlappingSubsystems(q));
    }
    let s_a = von_neumann_entropy(&psi.reduced_density(a)?)?;
    let s_b = von_neumann_entropy(&psi.reduced_density(b)?)?;
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    let s_ab = von_neumann_entropy(&psi.reduced_density(&ab)?)?;
    Ok(s_a + s_b - s_ab)
}

/// Per-epoch mutual-information record. Raw values (round-off negatives
/// included) live here; report writers clamp at zero.
#[derive(Clone, Debug)]
pub struct MIRecord<T> {
    pub epoch: usize,
    pub i_di_mo: T,
    pub i_mi_mo: T,
    /// I(Di_q : Mo) for each discarded input qubit, ascending qubit
    /// index; reported as Di1, Di2, … in that order.
    pub per_qubit_di: Vec<T>,
}

impl<T: Real> MIRecord<T> {
    /// Sum of the single-qubit discard terms, for comparison against the
    /// joint I(Di:Mo).
    pub fn per_qubit_sum(&self) -> T {
        self.per_qubit_di.iter().copied().sum()
    }
}

/// Evaluate the MI diagnostics for one parameter vector.
pub fn mi_at_theta<T: Real>(
    circuit: &Circuit<T>,
    theta: &[T],
    partition: &SubsystemPartition,
    epoch: usize,
) -> Result<MIRecord<T>> {
    if circuit.num_qubits() != partition.n() {
        return Err(Error::DimensionMismatch(format!(
            "circuit has {} qubits, partition expects {}",
            circuit.num_qubits(),
            partition.n()
        )));
    }
    let choi = choi_state(&circuit.unitary(theta)?);
    let psi = choi.state();
    let i_di_mo = mutual_information(psi, partition.di(), partition.mo())?;
    let i_mi_mo = mutual_information(psi, partition.mi(), partition.mo())?;
    let per_qubit_di = partition
        .di()
        .iter()
        .map(|&q| mutual_information(psi, &[q], partition.mo()))
        .collect::<Result<Vec<T>>>()?;
    Ok(MIRecord { epoch, i_di_mo, i_mi_mo, per_qubit_di })
}

/// MI diagnostics for every epoch snapshot of a training trace.
pub fn mi_trace<T: Real>(
    trace: &TrainingTrace<T>,
    circuit: &Circuit<T>,
    partition: &SubsystemPartition,
) -> Result<Vec<MIRecord<T>>> {
    trace
        .records
        .iter()
        .map(|r| mi_at_theta(circuit, &r.theta, partition, r.epoch))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_brickwall, AnsatzSpec};
    use crate::gate::{Angle, Gate};
    use crate::training::{EpochRecord, TrainingTrace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn brickwall_choi(theta_seed: u64) -> (ChoiState<f64>, SubsystemPartition) {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 4, 0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(theta_seed);
        let theta: Vec<f64> = (0..circuit.num_params())
            .map(|_| rng.gen_range(-PI..PI))
            .collect();
        let choi = choi_state(&circuit.unitary(&theta).unwrap());
        (choi, SubsystemPartition::new(4, 0).unwrap())
    }

    #[test]
    fn partition_layout() {
        let p = SubsystemPartition::new(4, 0).unwrap();
        assert_eq!(p.mi(), &[0]);
        assert_eq!(p.di(), &[1, 2, 3]);
        assert_eq!(p.mo(), &[4]);
        assert_eq!(p.do_(), &[5, 6, 7]);

        let p = SubsystemPartition::new(4, 2).unwrap();
        assert_eq!(p.mi(), &[2]);
        assert_eq!(p.di(), &[0, 1, 3]);
        assert_eq!(p.mo(), &[6]);
        assert_eq!(p.do_(), &[4, 5, 7]);
    }

    #[test]
    fn choi_of_identity_is_epr_pairs() {
        let choi = choi_state(&UnitaryMatrix::<f64>::identity(1));
        let amps = choi.state().amplitudes();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0b00].re - h).abs() < 1e-12);
        assert!((amps[0b11].re - h).abs() < 1e-12);
        assert!(amps[0b01].norm() < 1e-12 && amps[0b10].norm() < 1e-12);
    }

    #[test]
    fn choi_of_x_swaps_leg() {
        let mut mat = crate::state::ComplexMatrix::<f64>::zeros(2);
        mat[(0, 1)] = Complex::new(1.0, 0.0);
        mat[(1, 0)] = Complex::new(1.0, 0.0);
        let x = UnitaryMatrix::new(1, mat).unwrap();
        let choi = choi_state(&x);
        let amps = choi.state().amplitudes();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // amplitude at (in=0, out=1) = index 0b10; (in=1, out=0) = 0b01
        assert!((amps[0b10].re - h).abs() < 1e-12);
        assert!((amps[0b01].re - h).abs() < 1e-12);
    }

    #[test]
    fn choi_identity_multi_qubit_links_matching_pairs() {
        let choi = choi_state(&UnitaryMatrix::<f64>::identity(2));
        // product of EPR pairs: input qubit k entangled with output qubit k
        for k in 0..2 {
            let i = mutual_information(choi.state(), &[k], &[k + 2]).unwrap();
            assert!((i - 2.0).abs() < 1e-9, "pair {k}: {i}");
        }
        // cross-pairs share nothing
        let i = mutual_information(choi.state(), &[0], &[3]).unwrap();
        assert!(i.abs() < 1e-9);
    }

    #[test]
    fn choi_identity_mi_fixture() {
        let choi = choi_state(&UnitaryMatrix::<f64>::identity(4));
        let p = SubsystemPartition::new(4, 0).unwrap();
        let i_mi_mo = choi.mutual_information(p.mi(), p.mo()).unwrap();
        let i_di_mo = choi.mutual_information(p.di(), p.mo()).unwrap();
        assert!((i_mi_mo - 2.0).abs() < 1e-9);
        assert!(i_di_mo.abs() < 1e-9);
    }

    #[test]
    fn choi_swap_routes_information_to_discard() {
        // SWAP(0,1) from three CNOTs
        let mut circuit = Circuit::<f64>::new(2);
        circuit.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        circuit.push(Gate::Cnot { control: 1, target: 0 }).unwrap();
        circuit.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let choi = choi_state(&circuit.unitary(&[]).unwrap());
        let p = SubsystemPartition::new(2, 0).unwrap();
        let i_mi_mo = choi.mutual_information(p.mi(), p.mo()).unwrap();
        let i_di_mo = choi.mutual_information(p.di(), p.mo()).unwrap();
        assert!(i_mi_mo.abs() < 1e-9);
        assert!((i_di_mo - 2.0).abs() < 1e-9);
    }

    #[test]
    fn forced_marginals_on_random_brickwall() {
        let (choi, p) = brickwall_choi(5);
        let psi = choi.state();
        let entropy = |set: &[usize]| {
            von_neumann_entropy(&psi.reduced_density(set).unwrap()).unwrap()
        };
        assert!((entropy(&[0, 1, 2, 3]) - 4.0).abs() < 1e-8); // full input register
        assert!((entropy(p.di()) - 3.0).abs() < 1e-8);
        assert!((entropy(p.mi()) - 1.0).abs() < 1e-8);
        assert!((entropy(p.mo()) - 1.0).abs() < 1e-8);
        assert!((entropy(p.do_()) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn complementary_entropies_on_pure_choi() {
        let (choi, p) = brickwall_choi(8);
        let psi = choi.state();
        let mut di_mo: Vec<usize> = p.di().iter().chain(p.mo()).copied().collect();
        di_mo.sort_unstable();
        let mut mi_do: Vec<usize> = p.mi().iter().chain(p.do_()).copied().collect();
        mi_do.sort_unstable();
        let s1 = von_neumann_entropy(&psi.reduced_density(&di_mo).unwrap()).unwrap();
        let s2 = von_neumann_entropy(&psi.reduced_density(&mi_do).unwrap()).unwrap();
        assert!((s1 - s2).abs() < 1e-8);
    }

    #[test]
    fn statevector_and_density_matrix_routes_agree() {
        let (choi, p) = brickwall_choi(13);
        let psi = choi.state();
        let via_state = choi.mutual_information(p.mi(), p.mo()).unwrap();

        // independent route through the full 256×256 density matrix
        let rho = psi.projector();
        let s = |set: &[usize]| {
            von_neumann_entropy(&rho.partial_trace(set).unwrap()).unwrap()
        };
        let mut mi_mo: Vec<usize> = p.mi().iter().chain(p.mo()).copied().collect();
        mi_mo.sort_unstable();
        let via_density = s(p.mi()) + s(p.mo()) - s(&mi_mo);
        assert!((via_state - via_density).abs() < 1e-8);

        let di_route_state = choi.mutual_information(p.di(), p.mo()).unwrap();
        let mut di_mo: Vec<usize> = p.di().iter().chain(p.mo()).copied().collect();
        di_mo.sort_unstable();
        let di_route_density = s(p.di()) + s(p.mo()) - s(&di_mo);
        assert!((di_route_state - di_route_density).abs() < 1e-8);
    }

    #[test]
    fn mi_bounds_on_random_brickwall() {
        for seed in [1, 2, 3] {
            let (choi, p) = brickwall_choi(seed);
            let i_di_mo = choi.mutual_information(p.di(), p.mo()).unwrap();
            let i_mi_mo = choi.mutual_information(p.mi(), p.mo()).unwrap();
            for i in [i_di_mo, i_mi_mo] {
                assert!(i >= -1e-8 && i <= 2.0 + 1e-8, "out of bounds: {i}");
            }
        }
    }

    #[test]
    fn mutual_information_rejects_bad_sets() {
        let choi = choi_state(&UnitaryMatrix::<f64>::identity(2));
        assert!(matches!(
            choi.mutual_information(&[0], &[0, 2]),
            Err(Error::OverlappingSubsystems(0))
        ));
        assert!(matches!(
            choi.mutual_information(&[], &[1]),
            Err(Error::EmptyKeepSet)
        ));
    }

    #[test]
    fn mi_trace_on_cnot_free_identity_circuit() {
        // all-zero θ on a CNOT-free RY circuit gives U = I
        let mut circuit = Circuit::<f64>::new(4);
        for q in 0..4 {
            circuit.push(Gate::Ry { qubit: q, angle: Angle::Slot(q) }).unwrap();
        }
        let trace = TrainingTrace {
            records: vec![EpochRecord {
                epoch: 0,
                mean_loss: 0.0,
                train_accuracy: 1.0,
                theta: vec![0.0; 4],
            }],
        };
        let partition = SubsystemPartition::new(4, 0).unwrap();
        let records = mi_trace(&trace, &circuit, &partition).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].epoch, 0);
        assert!((records[0].i_mi_mo - 2.0).abs() < 1e-9);
        assert!(records[0].i_di_mo.abs() < 1e-9);
        assert_eq!(records[0].per_qubit_di.len(), 3);
        for v in &records[0].per_qubit_di {
            assert!(v.abs() < 1e-9);
        }
    }
}

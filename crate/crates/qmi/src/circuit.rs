//! Circuit model, brick-wall ansatz construction and execution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{apply_gate, Angle, Gate};
use crate::scalar::Real;
use crate::state::{ComplexMatrix, StateVector, UnitaryMatrix};

/// Ordered gate list over a fixed register, with `num_params` trainable
/// angle slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit<T> {
    num_qubits: usize,
    gates: Vec<Gate<T>>,
    num_params: usize,
}

impl<T: Real> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "need at least one qubit");
        Self {
            num_qubits,
            gates: Vec::new(),
            num_params: 0,
        }
    }

    /// Append a gate, validating its targets. Parameter slots extend
    /// `num_params` as needed.
    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        if let Some(slot) = gate.param_slot() {
            self.num_params = self.num_params.max(slot + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    fn check_params(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(Error::ParamCountMismatch {
                expected: self.num_params,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// Run the circuit on `input`, returning the evolved state.
    pub fn run(&self, theta: &[T], input: &StateVector<T>) -> Result<StateVector<T>> {
        if input.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "circuit acts on {} qubits, state has {}",
                self.num_qubits,
                input.num_qubits()
            )));
        }
        self.check_params(theta)?;
        let mut state = input.clone();
        for gate in &self.gates {
            apply_gate(&mut state, gate, theta)?;
        }
        Ok(state)
    }

    /// Full unitary matrix of the bound circuit. Column `j` is the image
    /// of basis state `|j⟩`.
    pub fn unitary(&self, theta: &[T]) -> Result<UnitaryMatrix<T>> {
        self.check_params(theta)?;
        let dim = 1usize << self.num_qubits;
        let mut mat = ComplexMatrix::zeros(dim);
        for j in 0..dim {
            let col = self.run(theta, &StateVector::basis_state(self.num_qubits, j))?;
            for (i, amp) in col.amplitudes().iter().enumerate() {
                mat[(i, j)] = *amp;
            }
        }
        Ok(UnitaryMatrix::from_trusted(self.num_qubits, mat))
    }

    /// ASCII wiring diagram, one line per qubit, gates packed greedily
    /// into columns.
    pub fn text_diagram(&self) -> String {
        let mut columns: Vec<Vec<Option<String>>> = Vec::new();
        let mut column_free: Vec<usize> = vec![0; self.num_qubits]; // first free column per wire
        for gate in &self.gates {
            let qubits = gate.qubits();
            let lo = *qubits.iter().min().unwrap();
            let hi = *qubits.iter().max().unwrap();
            // two-qubit gates block every wire they span
            let col = (lo..=hi).map(|q| column_free[q]).max().unwrap();
            while columns.len() <= col {
                columns.push(vec![None; self.num_qubits]);
            }
            let labels: Vec<(usize, String)> = match gate {
                Gate::Rx { qubit, angle } => vec![(*qubit, format!("RX({})", angle_label(angle)))],
                Gate::Ry { qubit, angle } => vec![(*qubit, format!("RY({})", angle_label(angle)))],
                Gate::Rz { qubit, angle } => vec![(*qubit, format!("RZ({})", angle_label(angle)))],
                Gate::H { qubit } => vec![(*qubit, "H".into())],
                Gate::Cnot { control, target } => {
                    vec![(*control, "●".into()), (*target, "X".into())]
                }
                Gate::Cz { control, target } => {
                    vec![(*control, "●".into()), (*target, "Z".into())]
                }
            };
            for (q, label) in labels {
                columns[col][q] = Some(label);
            }
            for q in lo..=hi {
                column_free[q] = col + 1;
            }
        }

        let widths: Vec<usize> = columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|c| c.as_ref().map_or(0, |s| s.chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for q in 0..self.num_qubits {
            out.push_str(&format!("q{q}: "));
            for (col, width) in columns.iter().zip(&widths) {
                out.push('─');
                let label = col[q].clone().unwrap_or_default();
                let pad = width - label.chars().count();
                out.push_str(&label);
                out.push_str(&"─".repeat(pad));
            }
            out.push('─');
            out.push('\n');
        }
        out
    }
}

fn angle_label<T: Real>(angle: &Angle<T>) -> String {
    match angle {
        Angle::Slot(i) => format!("θ{i}"),
        Angle::Fixed(v) => format!("{v:.3}"),
    }
}

/// Brick-wall ansatz shape: `n` qubits, `l` repeated blocks, and the qubit
/// whose measurement yields the class probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AnsatzSpec {
    pub n: usize,
    pub l: usize,
    pub measured_qubit: usize,
}

impl AnsatzSpec {
    pub fn new(n: usize, l: usize, measured_qubit: usize) -> Result<Self> {
        let spec = Self { n, l, measured_qubit };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config("ansatz needs n >= 2 qubits".into()));
        }
        if self.l < 1 {
            return Err(Error::Config("ansatz needs l >= 1 repetitions".into()));
        }
        if self.measured_qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                index: self.measured_qubit,
                num_qubits: self.n,
            });
        }
        Ok(())
    }
}

/// CNOT pairs of one brick: even parity couples (0,1), (2,3), …;
/// odd parity couples (1,2), (3,4), ….
pub(crate) fn brick_pairs(n: usize, parity: usize) -> Vec<(usize, usize)> {
    let start = parity % 2;
    (start..n.saturating_sub(1))
        .step_by(2)
        .map(|q| (q, q + 1))
        .collect()
}

/// Build the brick-wall ansatz: `l` repetitions of [RY column; CNOT brick
/// of alternating parity], closed by a final RY column. One fresh
/// parameter slot per rotation, `n·(l+1)` in total.
pub fn build_brickwall<T: Real>(spec: &AnsatzSpec) -> Circuit<T> {
    spec.validate().expect("invalid ansatz spec");
    let mut circuit = Circuit::new(spec.n);
    let mut slot = 0;
    let mut ry_column = |circuit: &mut Circuit<T>| {
        for q in 0..spec.n {
            circuit
                .push(Gate::Ry { qubit: q, angle: Angle::Slot(slot) })
                .expect("in-range by construction");
            slot += 1;
        }
    };
    for rep in 0..spec.l {
        ry_column(&mut circuit);
        for (control, target) in brick_pairs(spec.n, rep) {
            circuit
                .push(Gate::Cnot { control, target })
                .expect("in-range by construction");
        }
    }
    ry_column(&mut circuit);
    circuit
}

/// Measurement probabilities (p0, p1) of one qubit in the Z basis.
pub fn measure_probs<T: Real>(state: &StateVector<T>, qubit: usize) -> Result<(T, T)> {
    if qubit >= state.num_qubits() {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            num_qubits: state.num_qubits(),
        });
    }
    let bit = 1usize << qubit;
    let mut p1 = T::zero();
    for (i, amp) in state.amplitudes().iter().enumerate() {
        if i & bit != 0 {
            p1 += amp.norm_sqr();
        }
    }
    let p0 = (T::one() - p1).max(T::zero());
    Ok((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_theta(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.gen_range(-PI..PI)).collect()
    }

    #[test]
    fn brickwall_4_4_shape() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 4, 0).unwrap());
        assert_eq!(circuit.num_params(), 20);
        assert_eq!(circuit.gates().len(), 26); // 20 RY + (2+1+2+1) CNOT
    }

    #[test]
    fn brickwall_2_1_gate_order() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        assert_eq!(circuit.num_params(), 4);
        let gates = circuit.gates();
        assert_eq!(gates.len(), 5);
        assert_eq!(gates[0], Gate::Ry { qubit: 0, angle: Angle::Slot(0) });
        assert_eq!(gates[1], Gate::Ry { qubit: 1, angle: Angle::Slot(1) });
        assert_eq!(gates[2], Gate::Cnot { control: 0, target: 1 });
        assert_eq!(gates[3], Gate::Ry { qubit: 0, angle: Angle::Slot(2) });
        assert_eq!(gates[4], Gate::Ry { qubit: 1, angle: Angle::Slot(3) });
    }

    #[test]
    fn brickwall_slots_distinct_and_contiguous() {
        for (n, l) in [(2, 1), (3, 2), (4, 4), (5, 3)] {
            let circuit = build_brickwall::<f64>(&AnsatzSpec::new(n, l, 0).unwrap());
            let mut slots: Vec<usize> =
                circuit.gates().iter().filter_map(|g| g.param_slot()).collect();
            slots.sort_unstable();
            assert_eq!(slots, (0..circuit.num_params()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = Circuit::<f64>::new(2);
        let input = StateVector::basis_state(2, 0b10);
        let out = circuit.run(&[], &input).unwrap();
        assert_eq!(out, input);
        let u = circuit.unitary(&[]).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn brickwall_at_zero_theta_fixes_all_zeros() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let out = circuit.run(&[0.0; 4], &StateVector::zero_state(2)).unwrap();
        assert!((out.amplitudes()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_ry_unitary_matches_definition() {
        let theta = 0.9;
        let mut circuit = Circuit::<f64>::new(1);
        circuit.push(Gate::Ry { qubit: 0, angle: Angle::Slot(0) }).unwrap();
        let u = circuit.unitary(&[theta]).unwrap();
        let (s, c) = (theta / 2.0).sin_cos();
        assert!((u.entry(0, 0).re - c).abs() < 1e-12);
        assert!((u.entry(0, 1).re + s).abs() < 1e-12);
        assert!((u.entry(1, 0).re - s).abs() < 1e-12);
        assert!((u.entry(1, 1).re - c).abs() < 1e-12);
    }

    #[test]
    fn param_length_mismatch_rejected() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let err = circuit.run(&[0.0; 3], &StateVector::zero_state(2));
        assert!(matches!(err, Err(Error::ParamCountMismatch { .. })));
    }

    #[test]
    fn statevector_and_unitary_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(2..5);
            let l = rng.gen_range(1..4);
            let circuit = build_brickwall::<f64>(&AnsatzSpec::new(n, l, 0).unwrap());
            let theta = random_theta(&mut rng, circuit.num_params());
            // random product-state input
            let mut input = StateVector::zero_state(n);
            for q in 0..n {
                let angle = rng.gen_range(-PI..PI);
                crate::gate::apply_gate(
                    &mut input,
                    &Gate::Ry { qubit: q, angle: Angle::Fixed(angle) },
                    &[],
                )
                .unwrap();
            }
            let direct = circuit.run(&theta, &input).unwrap();
            let via_matrix = circuit.unitary(&theta).unwrap().apply(&input).unwrap();
            let worst = direct
                .amplitudes()
                .iter()
                .zip(via_matrix.amplitudes())
                .map(|(a, b)| (*a - *b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "paths diverge by {worst}");
        }
    }

    #[test]
    fn brickwall_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 4, 0).unwrap());
        for _ in 0..10 {
            let theta = random_theta(&mut rng, circuit.num_params());
            let u = circuit.unitary(&theta).unwrap();
            assert!(u.matrix().unitarity_defect() < 1e-8);
        }
    }

    #[test]
    fn ry_rotation_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let t1 = rng.gen_range(-PI..PI);
            let t2 = rng.gen_range(-PI..PI);
            let mut twice = Circuit::<f64>::new(1);
            twice.push(Gate::Ry { qubit: 0, angle: Angle::Fixed(t1) }).unwrap();
            twice.push(Gate::Ry { qubit: 0, angle: Angle::Fixed(t2) }).unwrap();
            let mut once = Circuit::<f64>::new(1);
            once.push(Gate::Ry { qubit: 0, angle: Angle::Fixed(t1 + t2) }).unwrap();
            let a = twice.unitary(&[]).unwrap();
            let b = once.unitary(&[]).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-9);
        }
    }

    #[test]
    fn measure_probs_basics() {
        let s = StateVector::<f64>::zero_state(1);
        assert_eq!(measure_probs(&s, 0).unwrap(), (1.0, 0.0));

        let mut s = StateVector::<f64>::zero_state(1);
        crate::gate::apply_gate(&mut s, &Gate::H { qubit: 0 }, &[]).unwrap();
        let (p0, p1) = measure_probs(&s, 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);

        let mut s = StateVector::<f64>::zero_state(1);
        crate::gate::apply_gate(
            &mut s,
            &Gate::Ry { qubit: 0, angle: Angle::Fixed(PI / 3.0) },
            &[],
        )
        .unwrap();
        let (p0, p1) = measure_probs(&s, 0).unwrap();
        assert!((p0 - 0.75).abs() < 1e-12);
        assert!((p1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn measure_probs_sum_to_one_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 2, 0).unwrap());
        for _ in 0..20 {
            let theta = random_theta(&mut rng, circuit.num_params());
            let out = circuit.run(&theta, &StateVector::zero_state(4)).unwrap();
            for q in 0..4 {
                let (p0, p1) = measure_probs(&out, q).unwrap();
                assert!((p0 + p1 - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn measure_probs_rejects_bad_index() {
        let s = StateVector::<f64>::zero_state(2);
        assert!(matches!(
            measure_probs(&s, 2),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn text_diagram_smoke() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let diagram = circuit.text_diagram();
        assert_eq!(diagram.lines().count(), 2);
        assert!(diagram.contains("RY(θ0)"));
        assert!(diagram.contains("●"));
        assert!(diagram.contains("X"));
    }

    #[test]
    fn gate_list_serialization_is_stable() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let json = serde_json::to_string(&circuit).unwrap();
        assert!(json.contains("\"gate\":\"ry\""));
        assert!(json.contains("\"slot\":0"));
        let back: Circuit<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, circuit);
    }
}

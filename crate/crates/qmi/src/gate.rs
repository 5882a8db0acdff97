//! Gate set and in-place statevector application.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::StateVector;

/// Rotation angle: either an index into the parameter vector θ
/// or a fixed value baked into the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angle<T> {
    Slot(usize),
    Fixed(T),
}

impl<T: Real> Angle<T> {
    fn resolve(&self, params: &[T]) -> Result<T> {
        match *self {
            Angle::Fixed(v) => Ok(v),
            Angle::Slot(i) => params.get(i).copied().ok_or(Error::ParamCountMismatch {
                expected: i + 1,
                got: params.len(),
            }),
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match *self {
            Angle::Slot(i) => Some(i),
            Angle::Fixed(_) => None,
        }
    }
}

/// One circuit element. Rotations carry exactly one angle source; the
/// two-qubit gates carry two distinct target qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate<T> {
    Rx { qubit: usize, angle: Angle<T> },
    Ry { qubit: usize, angle: Angle<T> },
    Rz { qubit: usize, angle: Angle<T> },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
}

impl<T: Real> Gate<T> {
    /// Parameter slot used by this gate, if any.
    pub fn param_slot(&self) -> Option<usize> {
        match self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => {
                angle.slot()
            }
            _ => None,
        }
    }

    /// Qubits the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit } => vec![qubit],
            Gate::Cnot { control, target } | Gate::Cz { control, target } => {
                vec![control, target]
            }
        }
    }

    /// Check target indices against a register size.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        if let Gate::Cnot { control, target } | Gate::Cz { control, target } = *self {
            if control == target {
                return Err(Error::DuplicateTargets(control));
            }
        }
        Ok(())
    }
}

/// Apply a gate to the state in place, resolving parameter slots from
/// `params`. Norm is preserved (every gate is unitary).
pub fn apply_gate<T: Real>(
    state: &mut StateVector<T>,
    gate: &Gate<T>,
    params: &[T],
) -> Result<()> {
    gate.validate(state.num_qubits())?;
    let half = crate::scalar::real::<T>(0.5);
    match *gate {
        Gate::Ry { qubit, angle } => {
            let theta = angle.resolve(params)? * half;
            let (s, c) = theta.sin_cos();
            for_each_pair(state, qubit, |a, b| (a * c - b * s, a * s + b * c));
        }
        Gate::Rx { qubit, angle } => {
            let theta = angle.resolve(params)? * half;
            let (s, c) = theta.sin_cos();
            let mis = Complex::new(T::zero(), -s);
            for_each_pair(state, qubit, |a, b| (a * c + b * mis, a * mis + b * c));
        }
        Gate::Rz { qubit, angle } => {
            let theta = angle.resolve(params)? * half;
            let phase = Complex::from_polar(T::one(), theta);
            let phase_conj = phase.conj();
            for_each_pair(state, qubit, |a, b| (a * phase_conj, b * phase));
        }
        Gate::H { qubit } => {
            let inv_sqrt2 = T::FRAC_1_SQRT_2();
            for_each_pair(state, qubit, |a, b| {
                ((a + b) * inv_sqrt2, (a - b) * inv_sqrt2)
            });
        }
        Gate::Cnot { control, target } => {
            let cbit = 1usize << control;
            let tbit = 1usize << target;
            let amps = state.amplitudes_mut();
            for i in 0..amps.len() {
                if i & cbit != 0 && i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
        Gate::Cz { control, target } => {
            let mask = (1usize << control) | (1usize << target);
            let amps = state.amplitudes_mut();
            for i in 0..amps.len() {
                if i & mask == mask {
                    amps[i] = -amps[i];
                }
            }
        }
    }
    Ok(())
}

/// Visit every amplitude pair (qubit = 0, qubit = 1) and replace it with
/// the image under a 2×2 gate.
fn for_each_pair<T: Real>(
    state: &mut StateVector<T>,
    qubit: usize,
    f: impl Fn(Complex<T>, Complex<T>) -> (Complex<T>, Complex<T>),
) {
    let bit = 1usize << qubit;
    let amps = state.amplitudes_mut();
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for low in base..base + bit {
            let high = low | bit;
            let (a, b) = (amps[low], amps[high]);
            let (a2, b2) = f(a, b);
            amps[low] = a2;
            amps[high] = b2;
        }
        base += bit << 1;
    }
}

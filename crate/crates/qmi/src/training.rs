//! Forward pass, cross-entropy loss, gradients and the Adam epoch loop.
//!
//! Gradients come in two flavors: the exact parameter-shift rule (the
//! default; valid because every trainable gate is an RX/RY/RZ rotation
//! whose generator has eigenvalues ±1/2) and a central finite difference
//! of the mean loss, kept as an independent route for cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{measure_probs, Circuit};
use crate::datasets::Label;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::state::StateVector;

/// Probabilities are clamped to at least this before entering a log.
const PROB_CLAMP: f64 = 1e-12;

/// Class probabilities read off the measured qubit: class 0 ↔ p0,
/// class 1 ↔ p1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hypothesis<T> {
    pub p0: T,
    pub p1: T,
}

impl<T: Real> Hypothesis<T> {
    pub fn probs(&self) -> [T; 2] {
        [self.p0, self.p1]
    }

    /// Predicted class index (argmax; ties go to class 0).
    pub fn predicted(&self) -> usize {
        usize::from(self.p1 > self.p0)
    }
}

/// An already-encoded training example.
#[derive(Clone, Debug)]
pub struct EncodedSample<T> {
    pub state: StateVector<T>,
    pub label: Label,
}

/// Run the ansatz on an encoded input and read the measured qubit.
pub fn forward<T: Real>(
    x: &StateVector<T>,
    circuit: &Circuit<T>,
    theta: &[T],
    measured_qubit: usize,
) -> Result<Hypothesis<T>> {
    let out = circuit.run(theta, x)?;
    let (p0, p1) = measure_probs(&out, measured_qubit)?;
    Ok(Hypothesis { p0, p1 })
}

/// Negated cross-entropy loss, natural log, with the probability clamp:
/// L = −Σ_k y_k · ln(max(h_k, 1e-12)) ≥ 0.
pub fn cross_entropy<T: Real>(h: &Hypothesis<T>, y: &Label) -> T {
    let clamp = real::<T>(PROB_CLAMP);
    let probs = h.probs();
    let one_hot = y.one_hot::<T>();
    let mut loss = T::zero();
    for (p, yk) in probs.iter().zip(one_hot) {
        if yk > T::zero() {
            loss -= yk * p.max(clamp).ln();
        }
    }
    loss
}

/// Mean loss and accuracy of a parameter vector over a batch.
pub fn batch_metrics<T: Real>(
    batch: &[EncodedSample<T>],
    circuit: &Circuit<T>,
    theta: &[T],
    measured_qubit: usize,
) -> Result<(T, T)> {
    let mut loss = T::zero();
    let mut hits = 0usize;
    for sample in batch {
        let h = forward(&sample.state, circuit, theta, measured_qubit)?;
        loss += cross_entropy(&h, &sample.label);
        if h.predicted() == sample.label.index() {
            hits += 1;
        }
    }
    let count = real::<T>(batch.len() as f64);
    Ok((loss / count, real::<T>(hits as f64) / count))
}

/// Central finite difference of a scalar function of θ, one coordinate at
/// a time: g_j = [f(θ + e_j·dθ/2) − f(θ − e_j·dθ/2)] / dθ.
pub fn grad_central_difference<T: Real>(
    loss_at: impl Fn(&[T]) -> T,
    theta: &[T],
    dtheta: T,
) -> Vec<T> {
    let half = dtheta / (T::one() + T::one());
    let mut work = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let original = work[j];
        work[j] = original + half;
        let plus = loss_at(&work);
        work[j] = original - half;
        let minus = loss_at(&work);
        work[j] = original;
        grad.push((plus - minus) / dtheta);
    }
    grad
}

/// Exact parameter-shift gradient of the mean batch loss.
///
/// Per parameter, ∂h_k/∂θ_j = [h_k(θ_j + π/2) − h_k(θ_j − π/2)] / 2,
/// chained through ∂L/∂h_k = −y_k / h_k (zero where the clamp flattens
/// the loss, so both gradient routes see the same function).
pub fn grad_parameter_shift<T: Real>(
    batch: &[EncodedSample<T>],
    circuit: &Circuit<T>,
    theta: &[T],
    measured_qubit: usize,
) -> Result<Vec<T>> {
    let clamp = real::<T>(PROB_CLAMP);
    let half_pi = T::FRAC_PI_2();
    let two = T::one() + T::one();
    let count = real::<T>(batch.len() as f64);

    // dL/dh factors at the unshifted point, one pair per sample
    let mut weights = Vec::with_capacity(batch.len());
    for sample in batch {
        let h = forward(&sample.state, circuit, theta, measured_qubit)?;
        let one_hot = sample.label.one_hot::<T>();
        let w = |p: T, y: T| {
            if y > T::zero() && p > clamp {
                -y / p
            } else {
                T::zero()
            }
        };
        weights.push((w(h.p0, one_hot[0]), w(h.p1, one_hot[1])));
    }

    let mut work = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let original = work[j];
        let mut acc = T::zero();
        for (sample, &(w0, w1)) in batch.iter().zip(&weights) {
            work[j] = original + half_pi;
            let plus = forward(&sample.state, circuit, &work, measured_qubit)?;
            work[j] = original - half_pi;
            let minus = forward(&sample.state, circuit, &work, measured_qubit)?;
            let dp0 = (plus.p0 - minus.p0) / two;
            let dp1 = (plus.p1 - minus.p1) / two;
            acc += w0 * dp0 + w1 * dp1;
        }
        work[j] = original;
        grad.push(acc / count);
    }
    Ok(grad)
}

/// How the training loop obtains gradients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Exact parameter-shift rule (default).
    Shift,
    /// Central finite difference of the mean loss, step `dtheta`.
    CentralDiff,
}

impl Default for GradientMethod {
    fn default() -> Self {
        GradientMethod::Shift
    }
}

/// Adam hyperparameters (α, β1, β2, ε).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams<T> {
    pub alpha: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Real> Default for AdamParams<T> {
    fn default() -> Self {
        Self {
            alpha: real(0.01),
            beta1: real(0.9),
            beta2: real(0.999),
            epsilon: real(1e-8),
        }
    }
}

impl<T: Real> AdamParams<T> {
    pub fn with_alpha(alpha: T) -> Self {
        Self { alpha, ..Self::default() }
    }
}

/// Adam optimizer state: first/second moment estimates and step counter.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
    params: AdamParams<T>,
}

impl<T: Real> AdamState<T> {
    pub fn new(num_params: usize, params: AdamParams<T>) -> Self {
        Self {
            m: vec![T::zero(); num_params],
            v: vec![T::zero(); num_params],
            t: 0,
            params,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update with bias correction, in place on θ.
    pub fn step(&mut self, theta: &mut [T], grad: &[T]) -> Result<()> {
        if theta.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::ParamCountMismatch {
                expected: self.m.len(),
                got: theta.len().max(grad.len()),
            });
        }
        self.t += 1;
        let p = self.params;
        let one = T::one();
        let bc1 = one - p.beta1.powi(self.t as i32);
        let bc2 = one - p.beta2.powi(self.t as i32);
        for i in 0..theta.len() {
            self.m[i] = p.beta1 * self.m[i] + (one - p.beta1) * grad[i];
            self.v[i] = p.beta2 * self.v[i] + (one - p.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            theta[i] -= p.alpha * m_hat / (v_hat.sqrt() + p.epsilon);
        }
        Ok(())
    }
}

/// Training-loop configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    pub learning_rate: T,
    pub gradient: GradientMethod,
    /// Step for the central-difference gradient.
    pub dtheta: T,
    /// Half-width of the uniform θ initialization, in radians.
    pub init_range: T,
    pub measured_qubit: usize,
    pub seed: u64,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            epochs: 100,
            learning_rate: real(0.01),
            gradient: GradientMethod::Shift,
            dtheta: real(1e-3),
            init_range: real(std::f64::consts::FRAC_PI_8),
            measured_qubit: 0,
            seed: 0,
        }
    }
}

/// Snapshot of one epoch: loss/accuracy over the training batch and the
/// parameters that produced them. Epoch 0 is the pre-training state.
#[derive(Clone, Debug)]
pub struct EpochRecord<T> {
    pub epoch: usize,
    pub mean_loss: T,
    pub train_accuracy: T,
    pub theta: Vec<T>,
}

/// Full-batch training history, one record per epoch plus the initial one.
#[derive(Clone, Debug)]
pub struct TrainingTrace<T> {
    pub records: Vec<EpochRecord<T>>,
}

impl<T: Real> TrainingTrace<T> {
    pub fn final_theta(&self) -> &[T] {
        &self.records.last().expect("trace never empty").theta
    }
}

/// Full-batch gradient descent with Adam. θ initializes i.i.d. uniform on
/// (−π, π) from the seed; identical seed and config give a bit-identical
/// trace.
pub fn train<T: Real>(
    batch: &[EncodedSample<T>],
    circuit: &Circuit<T>,
    config: &TrainConfig<T>,
) -> Result<TrainingTrace<T>> {
    if batch.is_empty() {
        return Err(Error::Config("training batch is empty".into()));
    }
    let mq = config.measured_qubit;
    if mq >= circuit.num_qubits() {
        return Err(Error::QubitOutOfRange {
            index: mq,
            num_qubits: circuit.num_qubits(),
        });
    }

    let init_range = config
        .init_range
        .to_f64()
        .filter(|r| *r > 0.0)
        .ok_or_else(|| Error::Config("init range must be positive".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta: Vec<T> = (0..circuit.num_params())
        .map(|_| real::<T>(rng.gen_range(-init_range..init_range)))
        .collect();

    let mut records = Vec::with_capacity(config.epochs + 1);
    let (loss, accuracy) = batch_metrics(batch, circuit, &theta, mq)?;
    records.push(EpochRecord {
        epoch: 0,
        mean_loss: loss,
        train_accuracy: accuracy,
        theta: theta.clone(),
    });

    let mut adam = AdamState::new(theta.len(), AdamParams::with_alpha(config.learning_rate));
    for epoch in 1..=config.epochs {
        let grad = match config.gradient {
            GradientMethod::Shift => grad_parameter_shift(batch, circuit, &theta, mq)?,
            GradientMethod::CentralDiff => {
                let loss_at = |t: &[T]| {
                    batch_metrics(batch, circuit, t, mq)
                        .map(|(l, _)| l)
                        .expect("batch evaluation cannot fail after validation")
                };
                grad_central_difference(loss_at, &theta, config.dtheta)
            }
        };
        adam.step(&mut theta, &grad)?;
        let (loss, accuracy) = batch_metrics(batch, circuit, &theta, mq)?;
        records.push(EpochRecord {
            epoch,
            mean_loss: loss,
            train_accuracy: accuracy,
            theta: theta.clone(),
        });
    }
    Ok(TrainingTrace { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_brickwall, AnsatzSpec};
    use crate::encoding::{qubit_encode, scale_features};
    use crate::gate::{Angle, Gate};
    use rand::Rng;
    use std::f64::consts::PI;

    fn single_ry_circuit() -> Circuit<f64> {
        let mut c = Circuit::new(1);
        c.push(Gate::Ry { qubit: 0, angle: Angle::Slot(0) }).unwrap();
        c
    }

    fn zero_sample(n: usize) -> EncodedSample<f64> {
        EncodedSample {
            state: StateVector::zero_state(n),
            label: Label::Class0,
        }
    }

    #[test]
    fn forward_identity_keeps_class0() {
        let circuit = Circuit::<f64>::new(2);
        let h = forward(&StateVector::zero_state(2), &circuit, &[], 0).unwrap();
        assert_eq!(h.probs(), [1.0, 0.0]);
    }

    #[test]
    fn forward_brickwall_hand_case() {
        // θ = (π,0,0,0): RY(π) flips qubit 0, CNOT propagates to qubit 1
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let h = forward(&StateVector::zero_state(2), &circuit, &[PI, 0.0, 0.0, 0.0], 0).unwrap();
        assert!((h.p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_sums_to_one_on_random_thetas() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 2, 0).unwrap());
        for _ in 0..20 {
            let theta: Vec<f64> = (0..circuit.num_params())
                .map(|_| rng.gen_range(-PI..PI))
                .collect();
            let h = forward(&StateVector::zero_state(4), &circuit, &theta, 0).unwrap();
            assert!((h.p0 + h.p1 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_entropy_known_values() {
        let h = Hypothesis { p0: 0.5, p1: 0.5 };
        assert!((cross_entropy(&h, &Label::Class0) - std::f64::consts::LN_2).abs() < 1e-12);

        let h = Hypothesis { p0: 1.0, p1: 0.0 };
        assert_eq!(cross_entropy(&h, &Label::Class0), 0.0);

        // clamp active at saturated wrong prediction
        let h = Hypothesis { p0: 1e-15, p1: 1.0 - 1e-15 };
        let loss = cross_entropy(&h, &Label::Class0);
        assert!((loss - (-(1e-12f64).ln())).abs() < 1e-9);
        assert!((loss - 27.631).abs() < 1e-3);
    }

    #[test]
    fn central_difference_exact_on_quadratic() {
        for dtheta in [1e-1, 1e-3] {
            let grad = grad_central_difference(|t: &[f64]| t[0] * t[0], &[1.0], dtheta);
            assert!((grad[0] - 2.0).abs() < 1e-9, "dtheta {dtheta}: {}", grad[0]);
        }
    }

    #[test]
    fn central_difference_zero_on_constant() {
        let grad = grad_central_difference(|_| 3.5, &[0.1, 0.2, 0.3], 1e-3);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_ry_gradient_analytic() {
        // loss(θ) = −ln p0 with p0 = cos²(θ/2); dL/dθ = tan(θ/2)
        let circuit = single_ry_circuit();
        let theta = vec![PI / 3.0];
        let batch = vec![zero_sample(1)];

        let shift = grad_parameter_shift(&batch, &circuit, &theta, 0).unwrap();
        let expected = 0.433_012_701_892_219_3 / 0.75; // (sin θ)/2 / p0
        assert!((shift[0] - expected).abs() < 1e-9, "got {}", shift[0]);
        assert!((shift[0] - 0.577_350).abs() < 1e-6);

        let loss_at = |t: &[f64]| batch_metrics(&batch, &circuit, t, 0).unwrap().0;
        let central = grad_central_difference(loss_at, &theta, 1e-3);
        assert!((central[0] - expected).abs() < 1e-6);
    }

    #[test]
    fn shift_and_central_difference_agree_on_brickwall() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(4, 4, 0).unwrap());
        for trial in 0..10 {
            let theta: Vec<f64> = (0..circuit.num_params())
                .map(|_| rng.gen_range(-PI..PI))
                .collect();
            let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let scaled = scale_features(
                &crate::encoding::FeatureVector::raw(raw),
                &[(0.0, 1.0); 4],
            )
            .unwrap();
            let batch = vec![EncodedSample {
                state: qubit_encode(&scaled, 4).unwrap(),
                label: if trial % 2 == 0 { Label::Class0 } else { Label::Class1 },
            }];

            let shift = grad_parameter_shift(&batch, &circuit, &theta, 0).unwrap();
            let loss_at = |t: &[f64]| batch_metrics(&batch, &circuit, t, 0).unwrap().0;
            let central = grad_central_difference(loss_at, &theta, 1e-3);
            let worst = shift
                .iter()
                .zip(&central)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-5, "trial {trial}: max deviation {worst}");
        }
    }

    #[test]
    fn gradient_vanishes_at_symmetric_point() {
        // p0(0) = 1 is a maximum of p0, so the loss −ln p0 is stationary
        let circuit = single_ry_circuit();
        let batch = vec![zero_sample(1)];
        let grad = grad_parameter_shift(&batch, &circuit, &[0.0], 0).unwrap();
        assert!(grad[0].abs() < 1e-12);
    }

    #[test]
    fn adam_single_step_hand_value() {
        let mut adam = AdamState::new(1, AdamParams::<f64>::default());
        let mut theta = vec![0.0];
        adam.step(&mut theta, &[0.5]).unwrap();
        assert_eq!(adam.step_count(), 1);
        // m̂ = 0.5, v̂ = 0.25 → update = 0.01·0.5/(0.5 + 1e-8)
        let expected = -0.01 * 0.5 / (0.5 + 1e-8);
        assert!((theta[0] - expected).abs() < 1e-9);
        assert!((theta[0] + 0.01).abs() < 1e-7);
    }

    #[test]
    fn adam_zero_gradient_is_noop() {
        let mut adam = AdamState::new(3, AdamParams::default());
        let mut theta = vec![0.4, -0.2, 0.9];
        adam.step(&mut theta, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(theta, vec![0.4, -0.2, 0.9]);
    }

    #[test]
    fn adam_descends_a_quadratic() {
        let mut adam = AdamState::new(1, AdamParams::with_alpha(0.1));
        let mut theta = vec![1.0];
        let f = |x: f64| x * x;
        let start = f(theta[0]);
        for _ in 0..2 {
            let grad = vec![2.0 * theta[0]];
            adam.step(&mut theta, &grad).unwrap();
        }
        assert!(f(theta[0]) < start);
    }

    #[test]
    fn adam_rejects_length_mismatch() {
        let mut adam = AdamState::new(2, AdamParams::default());
        let mut theta = vec![0.0, 0.0];
        assert!(matches!(
            adam.step(&mut theta, &[1.0]),
            Err(Error::ParamCountMismatch { .. })
        ));
    }

    #[test]
    fn zero_epoch_training_yields_initial_record_only() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let batch = vec![zero_sample(2)];
        let config = TrainConfig { epochs: 0, ..TrainConfig::default() };
        let trace = train(&batch, &circuit, &config).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.records[0].epoch, 0);
    }

    #[test]
    fn training_is_deterministic() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let batch = vec![zero_sample(2)];
        let config = TrainConfig { epochs: 5, seed: 11, ..TrainConfig::default() };
        let a = train(&batch, &circuit, &config).unwrap();
        let b = train(&batch, &circuit, &config).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.mean_loss.to_bits(), rb.mean_loss.to_bits());
            assert_eq!(ra.theta, rb.theta);
        }
    }

    #[test]
    fn training_rejects_empty_batch() {
        let circuit = build_brickwall::<f64>(&AnsatzSpec::new(2, 1, 0).unwrap());
        let config = TrainConfig::<f64>::default();
        assert!(matches!(
            train::<f64>(&[], &circuit, &config),
            Err(Error::Config(_))
        ));
    }
}

//! Feature-to-state encoders: qubit, interleaved-qubit and amplitude.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::circuit::brick_pairs;
use crate::error::{Error, Result};
use crate::gate::{apply_gate, Angle, Gate};
use crate::scalar::Real;
use crate::state::StateVector;

/// Classical feature vector. `scaled` marks vectors whose entries have
/// been mapped into `[0, π]` and are safe to use as rotation angles.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T> {
    values: Vec<T>,
    scaled: bool,
}

impl<T: Real> FeatureVector<T> {
    pub fn raw(values: Vec<T>) -> Self {
        Self { values, scaled: false }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }
}

/// How features become quantum states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingMethod {
    /// One RY rotation per feature, d = n.
    Qubit,
    /// Feature columns interleaved with CNOT bricks, n < d ≤ n·⌈d/n⌉.
    Interleaved,
    /// Features as normalized amplitudes, d ≤ 2^n.
    Amplitude,
}

impl EncodingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EncodingMethod::Qubit => "qubit",
            EncodingMethod::Interleaved => "interleaved",
            EncodingMethod::Amplitude => "amplitude",
        }
    }

    /// Encode one feature vector into an `n`-qubit state.
    pub fn encode<T: Real>(&self, x: &FeatureVector<T>, n: usize) -> Result<StateVector<T>> {
        match self {
            EncodingMethod::Qubit => qubit_encode(x, n),
            EncodingMethod::Interleaved => interleaved_encode(x, n),
            EncodingMethod::Amplitude => amplitude_encode(x, n),
        }
    }

    /// Rotation encodings consume scaled angles; amplitude encoding
    /// normalizes raw values itself.
    pub fn wants_scaled(&self) -> bool {
        !matches!(self, EncodingMethod::Amplitude)
    }
}

/// Affine map of each feature onto `[0, π]` from per-feature (min, max)
/// ranges: min ↦ 0, max ↦ π. Degenerate ranges (min = max) pin the
/// feature to the midpoint π/2; values outside the fitted range (eval
/// rows) are clamped so the scaled invariant holds.
pub fn scale_features<T: Real>(
    raw: &FeatureVector<T>,
    ranges: &[(T, T)],
) -> Result<FeatureVector<T>> {
    if ranges.len() != raw.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} features but {} scaling ranges",
            raw.dim(),
            ranges.len()
        )));
    }
    let pi = T::PI();
    let half_pi = pi / (T::one() + T::one());
    let values = raw
        .values
        .iter()
        .zip(ranges)
        .map(|(&v, &(lo, hi))| {
            if hi <= lo {
                half_pi
            } else {
                (((v - lo) / (hi - lo)) * pi).max(T::zero()).min(pi)
            }
        })
        .collect();
    Ok(FeatureVector { values, scaled: true })
}

/// Per-feature (min, max) ranges fitted on a training split, reusable on
/// evaluation rows so no evaluation statistics leak into scaling.
#[derive(Clone, Debug)]
pub struct Scaler<T> {
    ranges: Vec<(T, T)>,
}

impl<T: Real> Scaler<T> {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a FeatureVector<T>>) -> Result<Self> {
        let mut ranges: Vec<(T, T)> = Vec::new();
        for row in rows {
            if ranges.is_empty() {
                ranges = row.values.iter().map(|&v| (v, v)).collect();
            } else {
                if row.dim() != ranges.len() {
                    return Err(Error::DimensionMismatch(
                        "inconsistent feature dimensions while fitting scaler".into(),
                    ));
                }
                for (r, &v) in ranges.iter_mut().zip(&row.values) {
                    r.0 = r.0.min(v);
                    r.1 = r.1.max(v);
                }
            }
        }
        if ranges.is_empty() {
            return Err(Error::DimensionMismatch("no rows to fit scaler on".into()));
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[(T, T)] {
        &self.ranges
    }

    pub fn scale(&self, raw: &FeatureVector<T>) -> Result<FeatureVector<T>> {
        scale_features(raw, &self.ranges)
    }
}

/// One RY(x_q) per qubit on |0…0⟩: a product state, d = n.
pub fn qubit_encode<T: Real>(x: &FeatureVector<T>, n: usize) -> Result<StateVector<T>> {
    if !x.scaled {
        return Err(Error::UnscaledFeatures);
    }
    if x.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "qubit encoding needs d = n, got d = {} for n = {n}",
            x.dim()
        )));
    }
    let mut state = StateVector::zero_state(n);
    for (q, &angle) in x.values.iter().enumerate() {
        apply_gate(&mut state, &Gate::Ry { qubit: q, angle: Angle::Fixed(angle) }, &[])?;
    }
    Ok(state)
}

/// Column-major rotation encoding for d > n: column `c` applies
/// RY(x[c·n+q]) on each qubit q (missing tail features pad with angle 0),
/// with a parity-`c` CNOT brick between consecutive columns.
pub fn interleaved_encode<T: Real>(x: &FeatureVector<T>, n: usize) -> Result<StateVector<T>> {
    if !x.scaled {
        return Err(Error::UnscaledFeatures);
    }
    let d = x.dim();
    if d <= n {
        return Err(Error::DimensionMismatch(format!(
            "interleaved encoding needs d > n (got d = {d}, n = {n}); use qubit encoding"
        )));
    }
    let columns = d.div_ceil(n);
    let mut state = StateVector::zero_state(n);
    for c in 0..columns {
        if c > 0 {
            for (control, target) in brick_pairs(n, c - 1) {
                apply_gate(&mut state, &Gate::Cnot { control, target }, &[])?;
            }
        }
        for q in 0..n {
            let angle = x.values.get(c * n + q).copied().unwrap_or_else(T::zero);
            apply_gate(&mut state, &Gate::Ry { qubit: q, angle: Angle::Fixed(angle) }, &[])?;
        }
    }
    Ok(state)
}

/// Features as amplitudes: amplitudes[i] = x_i / ‖x‖ for i < d, zero
/// beyond. Takes raw (unscaled) values; requires d ≤ 2^n and x ≠ 0.
pub fn amplitude_encode<T: Real>(x: &FeatureVector<T>, n: usize) -> Result<StateVector<T>> {
    let d = x.dim();
    let dim = 1usize << n;
    if d > dim {
        return Err(Error::DimensionMismatch(format!(
            "amplitude encoding of {d} features needs 2^n ≥ {d}, got n = {n}"
        )));
    }
    let norm = x.values.iter().map(|&v| v * v).sum::<T>().sqrt();
    if norm == T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
    for (i, &v) in x.values.iter().enumerate() {
        amps[i] = Complex::new(v / norm, T::zero());
    }
    Ok(StateVector::from_amplitudes_unchecked(n, amps))
}

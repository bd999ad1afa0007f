use crate::error::{Error, Result};
use crate::linalg::{gram3, identity3, symmetric_eigen3};
use crate::scalar::Real;
use crate::signal::{PulseSignal, RgbTrace, CARDIAC_HIGH_HZ, CARDIAC_LOW_HZ};
use crate::spectrum::band_energy;

use super::temporal_normalize;

/// Projection coefficients applied to a colour triple; 2x3 for POS, 3x3 for LGI.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPlane<T> {
    pub rows: Vec<[T; 3]>,
}

impl<T: Real> ProjectionPlane<T> {
    /// POS plane: rows `(0, 1, -1)` and `(-2, 1, 1)`.
    pub fn pos() -> Self {
        let (o, z, two) = (T::one(), T::zero(), T::lit(2.0));
        Self { rows: vec![[z, o, -o], [-two, o, o]] }
    }

    /// `I - u u'` for the dominant left singular vector `u` of the 3xN matrix
    /// whose columns are `columns`.
    pub fn orthogonal_to_dominant(columns: &[[T; 3]]) -> Result<Self> {
        let gram = gram3(columns);
        let (values, vectors) = symmetric_eigen3(&gram);
        if !(values[0] > T::lit(1e-300).max(T::min_positive_value())) {
            return Err(Error::DegenerateTrace("trace matrix is numerically rank 0".into()));
        }
        let u = vectors[0];
        let mut p = identity3::<T>();
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] -= u[i] * u[j];
            }
        }
        Ok(Self { rows: p.to_vec() })
    }

    pub fn apply(&self, c: &[T; 3]) -> Vec<T> {
        self.rows.iter().map(|r| r[0] * c[0] + r[1] * c[1] + r[2] * c[2]).collect()
    }
}

/// Local-group-invariance extraction over the whole trace.
pub fn lgi<T: Real>(trace: &RgbTrace<T>) -> Result<PulseSignal<T>> {
    if trace.len() < 3 {
        return Err(Error::SignalTooShort { needed: 3, got: trace.len() });
    }
    let (_, normalized) = temporal_normalize(trace.samples())
        .ok_or_else(|| Error::DegenerateTrace("zero channel mean".into()))?;
    let plane = ProjectionPlane::orthogonal_to_dominant(&normalized)?;
    let projected: Vec<Vec<T>> = (0..3)
        .map(|k| normalized.iter().map(|c| plane.apply(c)[k]).collect())
        .collect();
    let fs = trace.fps();
    let (lo, hi) = (T::lit(CARDIAC_LOW_HZ), T::lit(CARDIAC_HIGH_HZ));
    let best = projected
        .into_iter()
        .map(|s| (band_energy(&s, fs, lo, hi), s))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|(_, s)| s)
        .expect("three projected channels");
    PulseSignal::new(best, fs)
}

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SampledSignal;

/// Default regularisation for smoothness-priors detrending.
pub const DEFAULT_DETREND_LAMBDA: f64 = 300.0;

/// Smoothness-priors detrend: `z - (I + lambda^2 D2' D2)^-1 z`, with `D2` the
/// second-difference operator. The system is symmetric positive definite and
/// pentadiagonal, so it is solved with a banded Cholesky factorisation.
pub fn detrend<T: Real>(signal: &SampledSignal<T>, lambda: T) -> Result<SampledSignal<T>> {
    let z = signal.values();
    let n = z.len();
    if n < 3 {
        return Err(Error::SignalTooShort { needed: 3, got: n });
    }
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let trend = smooth_trend(z, lambda * lambda);
    Ok(signal.with_values(z.iter().zip(&trend).map(|(&a, &b)| a - b).collect()))
}

fn smooth_trend<T: Real>(z: &[T], lam2: T) -> Vec<T> {
    let n = z.len();
    // Bands of A = I + lam2 * D2'D2: main diagonal, first and second super-diagonals.
    let mut d0 = vec![T::one(); n];
    let mut d1 = vec![T::zero(); n];
    let mut d2 = vec![T::zero(); n];
    let (one, two) = (T::one(), T::lit(2.0));
    let taps = [one, -two, one];
    for r in 0..n - 2 {
        for (a, &ta) in taps.iter().enumerate() {
            d0[r + a] += lam2 * ta * ta;
            for (b, &tb) in taps.iter().enumerate().skip(a + 1) {
                let v = lam2 * ta * tb;
                match b - a {
                    1 => d1[r + a] += v,
                    _ => d2[r + a] += v,
                }
            }
        }
    }

    // A = L L' with L lower-triangular, bandwidth 2.
    let mut l0 = vec![T::zero(); n];
    let mut l1 = vec![T::zero(); n];
    let mut l2 = vec![T::zero(); n];
    for i in 0..n {
        if i >= 2 {
            l2[i] = d2[i - 2] / l0[i - 2];
        }
        if i >= 1 {
            let cross = if i >= 2 { l2[i] * l1[i - 1] } else { T::zero() };
            l1[i] = (d1[i - 1] - cross) / l0[i - 1];
        }
        l0[i] = (d0[i] - l1[i] * l1[i] - l2[i] * l2[i]).sqrt();
    }

    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut acc = z[i];
        if i >= 1 {
            acc -= l1[i] * y[i - 1];
        }
        if i >= 2 {
            acc -= l2[i] * y[i - 2];
        }
        y[i] = acc / l0[i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        if i + 1 < n {
            acc -= l1[i + 1] * x[i + 1];
        }
        if i + 2 < n {
            acc -= l2[i + 2] * x[i + 2];
        }
        x[i] = acc / l0[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Dense reference: build the full matrix and solve with LU.
    fn dense_detrend(z: &[f64], lambda: f64) -> Vec<f64> {
        let n = z.len();
        let mut d = DMatrix::<f64>::zeros(n - 2, n);
        for r in 0..n - 2 {
            d[(r, r)] = 1.0;
            d[(r, r + 1)] = -2.0;
            d[(r, r + 2)] = 1.0;
        }
        let a = DMatrix::<f64>::identity(n, n) + (d.transpose() * &d) * (lambda * lambda);
        let zv = DVector::from_column_slice(z);
        let trend = a.lu().solve(&zv).unwrap();
        (zv - trend).iter().copied().collect()
    }

    fn sig(v: Vec<f64>) -> SampledSignal<f64> {
        SampledSignal::new(v, 30.0).unwrap()
    }

    #[test]
    fn matches_dense_oracle() {
        let z: Vec<f64> = (0..120).map(|i| (i as f64 * 0.37).sin() * 3.0 + (i as f64) * 0.1).collect();
        let banded = detrend(&sig(z.clone()), 300.0).unwrap();
        let dense = dense_detrend(&z, 300.0);
        for (a, b) in banded.values().iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn linear_ramp_is_removed() {
        let z: Vec<f64> = (0..100).map(f64::from).collect();
        let out = detrend(&sig(z.clone()), 300.0).unwrap();
        let oracle = dense_detrend(&z, 300.0);
        let worst = out.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 0.05 * 99.0, "max {worst}");
        assert!(oracle.iter().all(|v| v.abs() < 0.05 * 99.0));
    }

    #[test]
    fn zero_in_zero_out() {
        let out = detrend(&sig(vec![0.0; 50]), 300.0).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn keeps_cardiac_oscillation() {
        let n = 600;
        let pulse: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / 30.0).sin()).collect();
        let z: Vec<f64> = pulse.iter().enumerate().map(|(i, p)| p + 0.05 * i as f64).collect();
        let out = detrend(&sig(z.clone()), 300.0).unwrap();
        let dense = dense_detrend(&z, 300.0);
        let r = crate::metrics::pearson_values(out.values(), &pulse).unwrap();
        let r_dense = crate::metrics::pearson_values(&dense, &pulse).unwrap();
        assert!(r >= 0.95 && r_dense >= 0.95, "r = {r}, dense r = {r_dense}");
    }

    #[test]
    fn too_short() {
        assert_eq!(detrend(&sig(vec![1.0, 2.0]), 300.0), Err(Error::SignalTooShort { needed: 3, got: 2 }));
        assert!(detrend(&sig(vec![1.0, 2.0, 3.0]), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn is_linear(
            x in proptest::collection::vec(-100.0f64..100.0, 40),
            y in proptest::collection::vec(-100.0f64..100.0, 40),
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
        ) {
            let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let lhs = detrend(&sig(combo), 300.0).unwrap();
            let dx = detrend(&sig(x), 300.0).unwrap();
            let dy = detrend(&sig(y), 300.0).unwrap();
            let scale = lhs.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..lhs.len() {
                let rhs = a * dx.values()[i] + b * dy.values()[i];
                prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-9 * scale);
            }
        }
    }
}

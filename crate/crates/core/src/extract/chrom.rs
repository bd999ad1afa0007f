use crate::error::{Error, Result};
use crate::scalar::{pop_std, Real};
use crate::signal::{PulseSignal, RgbTrace};

use super::SIGMA_FLOOR;

/// Chrominance axes `X = 3R - 2G`, `Y = 1.5R + G - 1.5B` and the fitted ratio
/// `alpha = sigma(X) / sigma(Y)` (population sigma; zero when `sigma(Y)` vanishes).
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaProjection<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub alpha: T,
}

impl<T: Real> ChromaProjection<T> {
    pub fn from_trace(trace: &RgbTrace<T>) -> Self {
        let (three, two, one_half) = (T::lit(3.0), T::lit(2.0), T::lit(1.5));
        let x: Vec<T> = trace.samples().iter().map(|s| three * s[0] - two * s[1]).collect();
        let y: Vec<T> = trace.samples().iter().map(|s| one_half * s[0] + s[1] - one_half * s[2]).collect();
        let sy = pop_std(&y);
        let alpha = if sy < T::lit(SIGMA_FLOOR) { T::zero() } else { pop_std(&x) / sy };
        Self { x, y, alpha }
    }

    /// `S = X - alpha * Y`.
    pub fn pulse(&self) -> Vec<T> {
        self.x.iter().zip(&self.y).map(|(&x, &y)| x - self.alpha * y).collect()
    }
}

pub fn chrom<T: Real>(trace: &RgbTrace<T>) -> Result<PulseSignal<T>> {
    if trace.len() < 2 {
        return Err(Error::SignalTooShort { needed: 2, got: trace.len() });
    }
    let proj = ChromaProjection::from_trace(trace);
    if pop_std(&proj.x) < T::lit(SIGMA_FLOOR) && pop_std(&proj.y) < T::lit(SIGMA_FLOOR) {
        return Err(Error::DegenerateTrace("both chrominance axes are constant".into()));
    }
    PulseSignal::new(proj.pulse(), trace.fps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::test_scene::{noise, pulse, pulsed_trace};
    use crate::metrics::pearson_values;
    use proptest::prelude::*;

    #[test]
    fn constant_trace_is_degenerate() {
        let tr = RgbTrace::new(vec![[5.0, 5.0, 5.0]; 10], 30.0).unwrap();
        assert!(matches!(chrom(&tr), Err(Error::DegenerateTrace(_))));
    }

    #[test]
    fn two_sample_hand_example() {
        let tr = RgbTrace::from_channels(&[1.0, 3.0], &[1.0, 1.0], &[1.0, 1.0], 30.0).unwrap();
        let p = ChromaProjection::from_trace(&tr);
        assert_eq!(p.x, vec![1.0, 7.0]);
        assert_eq!(p.y, vec![1.0, 4.0]);
        assert_eq!(pop_std(&p.x), 3.0);
        assert_eq!(pop_std(&p.y), 1.5);
        assert_eq!(p.alpha, 2.0);
        assert_eq!(chrom(&tr).unwrap().values(), &[-1.0, -1.0]);
    }

    #[test]
    fn flat_y_falls_back_to_x() {
        // Y = 1.5R + G - 1.5B constant, X varies
        let tr = RgbTrace::from_channels(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], 30.0).unwrap();
        let p = ChromaProjection::from_trace(&tr);
        assert_eq!(p.alpha, 0.0);
        assert_eq!(chrom(&tr).unwrap().values(), p.x.as_slice());
    }

    #[test]
    fn green_pulse_is_recovered() {
        let n = 600;
        let fs = 30.0;
        let p = pulse(n, fs, 1.2);
        let nz = noise(n, 3);
        let r: Vec<f64> = nz.iter().map(|v| 0.01 * v).collect();
        let b: Vec<f64> = noise(n, 4).iter().map(|v| 0.01 * v).collect();
        let tr = RgbTrace::from_channels(&r, &p, &b, fs).unwrap();
        let s = chrom(&tr).unwrap();
        assert!(pearson_values(s.values(), &p).unwrap().abs() >= 0.9);
    }

    #[test]
    fn residual_variance_identity() {
        // var(X - aY) = 2 var(X) (1 - r_xy) when a = sd(X)/sd(Y)
        let (tr, _) = pulsed_trace(300, 30.0, 1.1, 0.5);
        let p = ChromaProjection::from_trace(&tr);
        let s = p.pulse();
        let r = pearson_values(&p.x, &p.y).unwrap();
        let lhs = pop_std(&s).powi(2);
        let rhs = 2.0 * pop_std(&p.x).powi(2) * (1.0 - r);
        assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
    }

    proptest! {
        #[test]
        fn output_scales_linearly(k in 0.1f64..20.0) {
            let (tr, truth) = pulsed_trace(240, 30.0, 1.3, 0.2);
            let a = chrom(&tr).unwrap();
            let b = chrom(&tr.scaled(k)).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((k * x - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
            let ra = pearson_values(a.values(), &truth).unwrap();
            let rb = pearson_values(b.values(), &truth).unwrap();
            prop_assert!((ra - rb).abs() < 1e-9);
        }
    }
}

//! Sampled-signal carriers and the preprocessing chain shared by every stage:
//! skin-mean reduction, smoothness-priors detrending, zero-phase band-pass,
//! linear resampling and unit normalization.

mod detrend;
mod filter;
mod frames;

pub use detrend::{detrend, DEFAULT_DETREND_LAMBDA};
pub use filter::{bandpass, BandPass, Biquad, CARDIAC_HIGH_HZ, CARDIAC_LOW_HZ};
pub use frames::{mean_rgb, FrameSequence, RoiMask};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One-dimensional uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    values: Vec<T>,
    sample_rate: T,
}

/// Pulse waveforms are ordinary sampled signals; the alias names the role.
pub type PulseSignal<T> = SampledSignal<T>;

impl<T: Real> SampledSignal<T> {
    pub fn new(values: Vec<T>, sample_rate: T) -> Result<Self> {
        if !(sample_rate > T::zero()) || !sample_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at {i}")));
        }
        Ok(Self { values, sample_rate })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same sample rate, new values. Values are assumed finite.
    pub(crate) fn with_values(&self, values: Vec<T>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values, sample_rate: self.sample_rate }
    }

    pub(crate) fn from_parts_unchecked(values: Vec<T>, sample_rate: T) -> Self {
        Self { values, sample_rate }
    }

    /// Sample timestamps in seconds.
    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        let fs = self.sample_rate;
        (0..self.values.len()).map(move |i| T::from_usize_lossy(i) / fs)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Per-frame mean colour of the skin region, `C(t) = [R(t), G(t), B(t)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbTrace<T> {
    samples: Vec<[T; 3]>,
    fps: T,
}

impl<T: Real> RgbTrace<T> {
    pub fn new(samples: Vec<[T; 3]>, fps: T) -> Result<Self> {
        if !(fps > T::zero()) || !fps.is_finite() {
            return Err(Error::InvalidParameter(format!("fps must be positive, got {fps}")));
        }
        if let Some(i) = samples.iter().position(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite trace sample at {i}")));
        }
        Ok(Self { samples, fps })
    }

    pub fn from_channels(r: &[T], g: &[T], b: &[T], fps: T) -> Result<Self> {
        if r.len() != g.len() || r.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "channel lengths {} / {} / {}",
                r.len(),
                g.len(),
                b.len()
            )));
        }
        let samples = r.iter().zip(g).zip(b).map(|((&r, &g), &b)| [r, g, b]).collect();
        Self::new(samples, fps)
    }

    pub fn samples(&self) -> &[[T; 3]] {
        &self.samples
    }

    pub fn fps(&self) -> T {
        self.fps
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Channel `c` (0 = R, 1 = G, 2 = B) as a plain series.
    pub fn channel(&self, c: usize) -> Vec<T> {
        self.samples.iter().map(|s| s[c]).collect()
    }

    pub fn channel_signal(&self, c: usize) -> SampledSignal<T> {
        SampledSignal::from_parts_unchecked(self.channel(c), self.fps)
    }

    /// Applies a signal-to-signal operation to each channel independently.
    pub fn map_channels(
        &self,
        mut f: impl FnMut(&SampledSignal<T>) -> Result<SampledSignal<T>>,
    ) -> Result<Self> {
        let chans = (0..3)
            .map(|c| f(&self.channel_signal(c)).map(SampledSignal::into_values))
            .collect::<Result<Vec<_>>>()?;
        Self::from_channels(&chans[0], &chans[1], &chans[2], self.fps)
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            samples: self.samples.iter().map(|s| [s[0] * k, s[1] * k, s[2] * k]).collect(),
            fps: self.fps,
        }
    }
}

/// Linear-interpolation resampling onto `target_len` evenly spaced points
/// spanning the original support. First and last samples are kept exactly.
pub fn resample<T: Real>(signal: &SampledSignal<T>, target_len: usize) -> Result<SampledSignal<T>> {
    let n = signal.len();
    if n < 2 {
        return Err(Error::SignalTooShort { needed: 2, got: n });
    }
    if target_len == 0 {
        return Err(Error::InvalidParameter("target length must be positive".into()));
    }
    let values = resample_values(signal.values(), target_len);
    // The sample rate scales with the density change over the same time span.
    let rate = if target_len > 1 {
        signal.sample_rate() * T::from_usize_lossy(target_len - 1) / T::from_usize_lossy(n - 1)
    } else {
        signal.sample_rate()
    };
    Ok(SampledSignal::from_parts_unchecked(values, rate))
}

pub(crate) fn resample_values<T: Real>(xs: &[T], target_len: usize) -> Vec<T> {
    let n = xs.len();
    if target_len == 1 {
        return vec![xs[0]];
    }
    let span = n - 1;
    let steps = target_len - 1;
    (0..target_len)
        .map(|j| {
            // Integer numerator keeps the endpoints exact.
            let num = j * span;
            let i = num / steps;
            let rem = num % steps;
            if rem == 0 || i >= span {
                xs[i.min(span)]
            } else {
                let frac = T::from_usize_lossy(rem) / T::from_usize_lossy(steps);
                xs[i] + (xs[i + 1] - xs[i]) * frac
            }
        })
        .collect()
}

/// Affine map onto `[0, 1]`. Constant input maps to all `0.5`.
pub fn normalize01<T: Real>(signal: &SampledSignal<T>) -> SampledSignal<T> {
    signal.with_values(normalize01_values(signal.values()))
}

pub(crate) fn normalize01_values<T: Real>(xs: &[T]) -> Vec<T> {
    let (lo, hi) = min_max(xs);
    let range = hi - lo;
    if !(range > T::zero()) {
        return vec![T::lit(0.5); xs.len()];
    }
    xs.iter().map(|&x| (x - lo) / range).collect()
}

pub(crate) fn min_max<T: Real>(xs: &[T]) -> (T, T) {
    xs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(v: &[f64]) -> SampledSignal<f64> {
        SampledSignal::new(v.to_vec(), 30.0).unwrap()
    }

    #[test]
    fn resample_midpoint() {
        assert_eq!(resample(&sig(&[0.0, 1.0]), 3).unwrap().values(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn resample_identity_length() {
        let x = [3.0, -1.0, 4.0, 1.5, 9.0];
        assert_eq!(resample(&sig(&x), 5).unwrap().values(), &x);
    }

    #[test]
    fn resample_interpolates_between_knots() {
        let out = resample(&sig(&[0.0, 2.0, 4.0, 6.0]), 7).unwrap();
        assert_eq!(out.values(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn resample_rejects_single_sample() {
        assert_eq!(resample(&sig(&[1.0]), 4), Err(Error::SignalTooShort { needed: 2, got: 1 }));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize01(&sig(&[2.0, 4.0, 6.0])).values(), &[0.0, 0.5, 1.0]);
        assert_eq!(normalize01(&sig(&[5.0, 5.0, 5.0])).values(), &[0.5, 0.5, 0.5]);
        assert_eq!(normalize01(&sig(&[-1.0, 0.0, 3.0])).values(), &[0.0, 0.25, 1.0]);
    }

    #[test]
    fn rejects_bad_rate_and_nan() {
        assert!(SampledSignal::new(vec![1.0], 0.0).is_err());
        assert!(SampledSignal::new(vec![f64::NAN], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(v in proptest::collection::vec(-1e3f64..1e3, 2..64)) {
            let s = sig(&v);
            let once = normalize01(&s);
            prop_assume!(once.values().iter().any(|&x| x != 0.5));
            let twice = normalize01(&once);
            prop_assert_eq!(once.values(), twice.values());
        }

        #[test]
        fn resample_keeps_endpoints(v in proptest::collection::vec(-1e3f64..1e3, 2..64), n in 2usize..200) {
            let out = resample(&sig(&v), n).unwrap();
            prop_assert_eq!(out.len(), n);
            prop_assert_eq!(out.values()[0], v[0]);
            prop_assert_eq!(out.values()[n - 1], v[v.len() - 1]);
        }
    }
}

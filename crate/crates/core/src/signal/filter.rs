use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SampledSignal;

/// Lower edge of the cardiac band (39 bpm).
pub const CARDIAC_LOW_HZ: f64 = 0.65;
/// Upper edge of the cardiac band (240 bpm).
pub const CARDIAC_HIGH_HZ: f64 = 4.0;

/// Order of the Butterworth low-pass prototype; the band-pass is twice this.
const PROTOTYPE_ORDER: usize = 2;

/// Second-order section in transposed direct form II, `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<T> {
    pub b: [T; 3],
    pub a: [T; 2],
}

impl<T: Real> Biquad<T> {
    /// DC gain `H(1)`.
    fn dc_gain(&self) -> T {
        (self.b[0] + self.b[1] + self.b[2]) / (T::one() + self.a[0] + self.a[1])
    }

    /// Internal state that a constant unit input would settle into.
    fn step_state(&self) -> [T; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[1] * g;
        let z1 = self.b[1] - self.a[0] * g + z2;
        [z1, z2]
    }

    fn run(&self, xs: &mut [T], mut state: [T; 2]) {
        for x in xs.iter_mut() {
            let input = *x;
            let y = self.b[0] * input + state[0];
            state[0] = self.b[1] * input - self.a[0] * y + state[1];
            state[1] = self.b[2] * input - self.a[1] * y;
            *x = y;
        }
    }
}

/// Butterworth band-pass realised as a cascade of biquads.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPass<T> {
    sections: Vec<Biquad<T>>,
}

impl<T: Real> BandPass<T> {
    /// 4th-order Butterworth band-pass between `low_hz` and `high_hz`,
    /// designed by the bilinear transform with pre-warped edges.
    pub fn butterworth(low_hz: f64, high_hz: f64, sample_rate: f64) -> Result<Self> {
        let nyquist = sample_rate / 2.0;
        if !(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist) {
            return Err(Error::InvalidBand { low: low_hz, high: high_hz, rate: sample_rate });
        }
        let pi = std::f64::consts::PI;
        let wl = (pi * low_hz / sample_rate).tan();
        let wh = (pi * high_hz / sample_rate).tan();
        let bw = wh - wl;
        let w0_sq = wl * wh;
        let center = 2.0 * w0_sq.sqrt().atan();

        let n = PROTOTYPE_ORDER;
        let mut sections = Vec::with_capacity(n);
        // Only the upper-half-plane prototype poles; their conjugates give the
        // conjugate partner of every resulting band-pass pole.
        for k in 0..n.div_ceil(2) {
            let theta = pi * (2 * k + n + 1) as f64 / (2 * n) as f64;
            let p = Complex64::from_polar(1.0, theta);
            let half = p * (bw / 2.0);
            let disc = (half * half - w0_sq).sqrt();
            for s in [half + disc, half - disc] {
                let z = (1.0 + s) / (1.0 - s);
                let section = Biquad {
                    b: [1.0, 0.0, -1.0],
                    a: [-2.0 * z.re, z.norm_sqr()],
                };
                let gain = magnitude_at(&section, center);
                sections.push(Biquad {
                    b: [
                        T::lit(section.b[0] / gain),
                        T::lit(section.b[1] / gain),
                        T::lit(section.b[2] / gain),
                    ],
                    a: [T::lit(section.a[0]), T::lit(section.a[1])],
                });
            }
        }
        Ok(Self { sections })
    }

    pub fn sections(&self) -> &[Biquad<T>] {
        &self.sections
    }

    pub fn order(&self) -> usize {
        2 * self.sections.len()
    }

    /// Edge extension length: three times the tap count of the cascade.
    pub fn pad_len(&self) -> usize {
        3 * (2 * self.sections.len() + 1)
    }

    /// Single causal pass with steady-state initial conditions scaled by `x[0]`.
    pub fn filter(&self, xs: &mut [T]) {
        if xs.is_empty() {
            return;
        }
        let mut level = xs[0];
        for s in &self.sections {
            let zi = s.step_state();
            s.run(xs, [zi[0] * level, zi[1] * level]);
            level *= s.dc_gain();
        }
    }

    /// Zero-phase forward-backward application with mirror padding.
    ///
    /// Mirror (even) extension rather than point-symmetric (odd) extension:
    /// an odd extension ending on a non-zero sample of a fast oscillation
    /// injects a step that leaks into the passband.
    pub fn filtfilt(&self, xs: &[T]) -> Vec<T> {
        let n = xs.len();
        let pad = self.pad_len().min(n.saturating_sub(1));
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| xs[i]));
        ext.extend_from_slice(xs);
        ext.extend((1..=pad).map(|i| xs[n - 1 - i]));

        self.filter(&mut ext);
        ext.reverse();
        self.filter(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }

    /// Magnitude response at `freq_hz`.
    pub fn gain_at(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * freq_hz / sample_rate;
        self.sections
            .iter()
            .map(|s| {
                let s64 = Biquad {
                    b: [s.b[0].as_f64(), s.b[1].as_f64(), s.b[2].as_f64()],
                    a: [s.a[0].as_f64(), s.a[1].as_f64()],
                };
                magnitude_at(&s64, w)
            })
            .product()
    }
}

fn magnitude_at(s: &Biquad<f64>, w: f64) -> f64 {
    let z1 = Complex64::from_polar(1.0, -w);
    let z2 = z1 * z1;
    let num = s.b[0] + z1 * s.b[1] + z2 * s.b[2];
    let den = 1.0 + z1 * s.a[0] + z2 * s.a[1];
    (num / den).norm()
}

/// Zero-phase Butterworth band-pass of a sampled signal.
pub fn bandpass<T: Real>(signal: &SampledSignal<T>, low_hz: f64, high_hz: f64) -> Result<SampledSignal<T>> {
    let filt = BandPass::<T>::butterworth(low_hz, high_hz, signal.sample_rate().as_f64())?;
    let needed = 3 * filt.order();
    if signal.len() < needed {
        return Err(Error::SignalTooShort { needed, got: signal.len() });
    }
    Ok(signal.with_values(filt.filtfilt(signal.values())))
}

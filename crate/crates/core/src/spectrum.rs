//! Direct DFT power over a frequency band. The band of interest spans a few
//! hundred bins at most, so no FFT is needed.

use crate::scalar::{mean, Real};

/// Periodogram values `(freq_hz, power)` for every DFT bin inside `[low, high]`.
pub fn band_periodogram<T: Real>(xs: &[T], fs: T, low_hz: T, high_hz: T) -> Vec<(T, T)> {
    let n = xs.len();
    if n < 2 {
        return Vec::new();
    }
    let m = mean(xs);
    let nf = T::from_usize_lossy(n);
    let df = fs / nf;
    let k_lo = (low_hz / df).ceil().to_usize().unwrap_or(0).max(1);
    let k_hi = (high_hz / df).floor().to_usize().unwrap_or(0).min(n / 2);
    let two_pi = T::TAU();
    (k_lo..=k_hi)
        .map(|k| {
            let w = two_pi * T::from_usize_lossy(k) / nf;
            let (mut re, mut im) = (T::zero(), T::zero());
            for (i, &x) in xs.iter().enumerate() {
                let (s, c) = (w * T::from_usize_lossy(i)).sin_cos();
                re += (x - m) * c;
                im -= (x - m) * s;
            }
            (T::from_usize_lossy(k) * df, (re * re + im * im) / nf)
        })
        .collect()
}

/// Total power inside the band.
pub fn band_energy<T: Real>(xs: &[T], fs: T, low_hz: T, high_hz: T) -> T {
    band_periodogram(xs, fs, low_hz, high_hz).into_iter().map(|(_, p)| p).sum()
}

/// Largest single-bin power inside the band, with its frequency.
pub fn band_peak<T: Real>(xs: &[T], fs: T, low_hz: T, high_hz: T) -> Option<(T, T)> {
    band_periodogram(xs, fs, low_hz, high_hz)
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
}

use crate::error::{Error, Result};
use crate::scalar::{mean, pop_std, Real};
use crate::signal::{PulseSignal, RgbTrace};

use super::{temporal_normalize, ProjectionPlane, SIGMA_FLOOR};

/// POS window length in frames for a given frame rate (1.6 s, rounded).
pub fn default_pos_window(fps: f64) -> usize {
    ((1.6 * fps).round() as usize).max(2)
}

/// One temporally normalised window: every channel divided by its window mean.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedTrace<T> {
    pub start: usize,
    pub window_len: usize,
    pub normalized: Vec<[T; 3]>,
    pub channel_means: [T; 3],
}

impl<T: Real> WindowedTrace<T> {
    /// `None` when a channel mean is zero and the window cannot be normalised.
    pub fn new(trace: &RgbTrace<T>, start: usize, window_len: usize) -> Option<Self> {
        let (channel_means, normalized) = temporal_normalize(&trace.samples()[start..start + window_len])?;
        Some(Self { start, window_len, normalized, channel_means })
    }

    /// Projected window pulse `X + alpha * Y`, mean-subtracted.
    pub fn pulse(&self) -> Vec<T> {
        let plane = ProjectionPlane::<T>::pos();
        let (x, y): (Vec<T>, Vec<T>) = self
            .normalized
            .iter()
            .map(|c| {
                let p = plane.apply(c);
                (p[0], p[1])
            })
            .unzip();
        let sy = pop_std(&y);
        let alpha = if sy < T::lit(SIGMA_FLOOR) { T::zero() } else { pop_std(&x) / sy };
        let h: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a + alpha * b).collect();
        let m = mean(&h);
        h.into_iter().map(|v| v - m).collect()
    }
}

/// Plane-orthogonal-to-skin extraction with sliding windows of `window_len`
/// frames (step one frame), combined by overlap-add.
pub fn pos<T: Real>(trace: &RgbTrace<T>, window_len: usize) -> Result<PulseSignal<T>> {
    let n = trace.len();
    if window_len < 2 {
        return Err(Error::InvalidParameter(format!("POS window must be at least 2 frames, got {window_len}")));
    }
    if window_len > n {
        return Err(Error::WindowTooLong { window: window_len, len: n });
    }
    let mut out = vec![T::zero(); n];
    let mut used = 0usize;
    for start in 0..=n - window_len {
        let Some(win) = WindowedTrace::new(trace, start, window_len) else {
            continue;
        };
        used += 1;
        for (o, h) in out[start..start + window_len].iter_mut().zip(win.pulse()) {
            *o += h;
        }
    }
    if used == 0 {
        return Err(Error::DegenerateTrace("every POS window has a zero channel mean".into()));
    }
    PulseSignal::new(out, trace.fps())
}

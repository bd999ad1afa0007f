//! Peak detection, inter-pulse intervals, heart rate and per-beat cycle
//! segmentation.

use crate::error::{Error, Result};
use crate::scalar::{mean, pop_std, Real};
use crate::signal::{normalize01_values, resample_values, PulseSignal, CARDIAC_LOW_HZ};

/// Default cycle length fed to the authenticator.
pub const CYCLE_LEN: usize = 60;

/// Slack on the longest admissible interval (the 39 bpm band edge).
const MAX_INTERVAL_SLACK_S: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConfig {
    /// Minimum prominence as a multiple of the signal's population sigma.
    pub prominence_sigma: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self { prominence_sigma: 0.3 }
    }
}

/// Strictly increasing peak sample indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakList<T> {
    indices: Vec<usize>,
    sample_rate: T,
}

impl<T: Real> PeakList<T> {
    /// Validates ordering and the half-second minimum gap.
    pub fn new(indices: Vec<usize>, sample_rate: T) -> Result<Self> {
        let gap = min_gap(sample_rate);
        if indices.windows(2).any(|w| w[1] < w[0] + gap) {
            return Err(Error::InvalidParameter(format!(
                "peaks must be increasing and at least {gap} samples apart"
            )));
        }
        Ok(Self { indices, sample_rate })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Peak times in seconds.
    pub fn times(&self) -> Vec<T> {
        self.indices.iter().map(|&i| T::from_usize_lossy(i) / self.sample_rate).collect()
    }
}

/// Minimum peak spacing in samples: `ceil(sample_rate / 2)`.
pub fn min_gap<T: Real>(sample_rate: T) -> usize {
    (sample_rate / T::lit(2.0)).ceil().to_usize().unwrap_or(1).max(1)
}

/// Inter-pulse intervals in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct IpiSequence<T> {
    intervals: Vec<T>,
}

impl<T: Real> IpiSequence<T> {
    pub fn new(intervals: Vec<T>) -> Result<Self> {
        if intervals.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter("intervals must be positive and finite".into()));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[T] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<T> {
        self.intervals.iter().copied().reduce(T::min)
    }

    pub fn max(&self) -> Option<T> {
        self.intervals.iter().copied().reduce(T::max)
    }
}

/// Fixed-length beats, each normalised to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSet<T> {
    cycles: Vec<Vec<T>>,
    cycle_len: usize,
}

impl<T: Real> CycleSet<T> {
    pub fn new(cycles: Vec<Vec<T>>, cycle_len: usize) -> Result<Self> {
        for (i, c) in cycles.iter().enumerate() {
            if c.len() != cycle_len {
                return Err(Error::BadCycle(format!("cycle {i} has length {}, expected {cycle_len}", c.len())));
            }
            if c.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
                return Err(Error::BadCycle(format!("cycle {i} leaves [0, 1]")));
            }
        }
        Ok(Self { cycles, cycle_len })
    }

    pub fn cycles(&self) -> &[Vec<T>] {
        &self.cycles
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle_len
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn subset(&self, range: std::ops::Range<usize>) -> Self {
        Self { cycles: self.cycles[range].to_vec(), cycle_len: self.cycle_len }
    }

    pub fn concat(sets: &[&CycleSet<T>]) -> Result<Self> {
        let len = sets.first().map_or(CYCLE_LEN, |s| s.cycle_len);
        Self::new(sets.iter().flat_map(|s| s.cycles.iter().cloned()).collect(), len)
    }
}

/// Local maxima with prominence at least `prominence_sigma` times the
/// signal's sigma and spaced by at least `ceil(fs / 2)` samples; within that
/// distance the higher peak wins.
pub fn detect_peaks<T: Real>(pulse: &PulseSignal<T>, config: &PeakConfig) -> Result<PeakList<T>> {
    let x = pulse.values();
    let fs = pulse.sample_rate();
    let needed = fs.ceil().to_usize().unwrap_or(1);
    if x.len() < needed {
        return Err(Error::SignalTooShort { needed, got: x.len() });
    }
    let sigma = pop_std(x);
    if !(sigma > T::zero()) {
        return Err(Error::NoPeaks);
    }
    let threshold = sigma * T::lit(config.prominence_sigma);
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = scale * T::lit(1e-12);

    let mut candidates: Vec<usize> = local_maxima(x, tol)
        .into_iter()
        .filter(|&(start, end)| prominence(x, start, end, tol) >= threshold)
        .map(|(start, end)| (start + end) / 2)
        .collect();

    let gap = min_gap(fs);
    candidates.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap().then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| c.abs_diff(k) >= gap) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    if kept.len() < 2 {
        return Err(Error::NoPeaks);
    }
    PeakList::new(kept, fs)
}

/// Strict local maxima as inclusive plateau bounds; samples equal within
/// `tol` form one plateau.
fn local_maxima<T: Real>(x: &[T], tol: T) -> Vec<(usize, usize)> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] - x[i - 1] > tol {
            let mut j = i;
            while j + 1 < n && (x[j + 1] - x[i]).abs() <= tol {
                j += 1;
            }
            if j + 1 < n && x[i] - x[j + 1] > tol {
                out.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height above the higher of the two bases reached before the signal climbs
/// above the peak on either side.
fn prominence<T: Real>(x: &[T], start: usize, end: usize, tol: T) -> T {
    let h = x[start];
    let mut left_min = h;
    for &v in x[..start].iter().rev() {
        if v > h + tol {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[end + 1..] {
        if v > h + tol {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Intervals between consecutive peaks, in seconds. Intervals outside the
/// 0.5 s .. 60/39 s window are dropped.
pub fn ipi_from_peaks<T: Real>(peaks: &PeakList<T>) -> Result<IpiSequence<T>> {
    if peaks.len() < 2 {
        return Err(Error::NoPeaks);
    }
    let fs = peaks.sample_rate();
    let lo = T::lit(0.5);
    let hi = T::lit(1.0 / CARDIAC_LOW_HZ + MAX_INTERVAL_SLACK_S);
    let intervals: Vec<T> = peaks
        .indices()
        .windows(2)
        .map(|w| T::from_usize_lossy(w[1] - w[0]) / fs)
        .filter(|&s| s >= lo && s <= hi)
        .collect();
    if intervals.is_empty() {
        return Err(Error::NoPeaks);
    }
    IpiSequence::new(intervals)
}

/// Beats per minute from the mean interval.
pub fn heart_rate<T: Real>(ipi: &IpiSequence<T>) -> Result<T> {
    if ipi.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(T::lit(60.0) / mean(ipi.intervals()))
}

/// One normalised, resampled cycle per consecutive peak pair.
pub fn segment_cycles<T: Real>(pulse: &PulseSignal<T>, peaks: &PeakList<T>, cycle_len: usize) -> Result<CycleSet<T>> {
    if peaks.len() < 2 {
        return Err(Error::NoPeaks);
    }
    let x = pulse.values();
    let cycles = peaks
        .indices()
        .windows(2)
        .map(|w| {
            let seg = &x[w[0]..w[1].min(x.len())];
            if seg.len() < 2 {
                return Err(Error::BadCycle(format!("segment at {} is shorter than 2 samples", w[0])));
            }
            Ok(normalize01_values(&resample_values(seg, cycle_len)))
        })
        .collect::<Result<Vec<_>>>()?;
    CycleSet::new(cycles, cycle_len)
}

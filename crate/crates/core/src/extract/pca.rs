use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen3;
use crate::scalar::Real;
use crate::signal::{PulseSignal, RgbTrace, CARDIAC_HIGH_HZ, CARDIAC_LOW_HZ};
use crate::spectrum::band_peak;

/// Principal axes of the centred 3-channel series, largest variance first.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAxes<T> {
    pub variances: [T; 3],
    pub directions: [[T; 3]; 3],
    pub means: [T; 3],
}

pub fn principal_axes<T: Real>(trace: &RgbTrace<T>) -> Result<PrincipalAxes<T>> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::SignalTooShort { needed: 2, got: n });
    }
    let nf = T::from_usize_lossy(n);
    let mut means = [T::zero(); 3];
    for s in trace.samples() {
        for c in 0..3 {
            means[c] += s[c] / nf;
        }
    }
    let mut cov = [[T::zero(); 3]; 3];
    for s in trace.samples() {
        let d = [s[0] - means[0], s[1] - means[1], s[2] - means[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j] / nf;
            }
        }
    }
    let (variances, directions) = symmetric_eigen3(&cov);
    if !(variances[0] > T::min_positive_value()) {
        return Err(Error::DegenerateTrace("colour covariance is zero".into()));
    }
    Ok(PrincipalAxes { variances, directions, means })
}

/// Principal component with the strongest in-band spectral peak, signed so
/// that its largest-magnitude sample is positive.
pub fn pca_extract<T: Real>(trace: &RgbTrace<T>) -> Result<PulseSignal<T>> {
    let axes = principal_axes(trace)?;
    let fs = trace.fps();
    let floor = axes.variances[0] * T::lit(1e-12);
    let components: Vec<Vec<T>> = (0..3)
        .filter(|&k| axes.variances[k] > floor)
        .map(|k| {
            let d = axes.directions[k];
            trace
                .samples()
                .iter()
                .map(|s| (0..3).map(|c| (s[c] - axes.means[c]) * d[c]).sum())
                .collect()
        })
        .collect();
    let (lo, hi) = (T::lit(CARDIAC_LOW_HZ), T::lit(CARDIAC_HIGH_HZ));
    let scored: Vec<Option<T>> = components.iter().map(|c| band_peak(c, fs, lo, hi).map(|(_, p)| p)).collect();
    let pick = if scored.iter().all(Option::is_none) {
        0
    } else {
        scored
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.unwrap_or(T::zero()).partial_cmp(&b.1.unwrap_or(T::zero())).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    let mut chosen = components.into_iter().nth(pick).expect("at least one component");
    let extreme = chosen.iter().copied().fold(T::zero(), |m, v| if v.abs() > m.abs() { v } else { m });
    if extreme < T::zero() {
        chosen.iter_mut().for_each(|v| *v = -*v);
    }
    PulseSignal::new(chosen, fs)
}

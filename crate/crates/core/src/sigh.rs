//! SigH: hide the true pulse by superimposing a decoy waveform on a blurred
//! copy of the face region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::Method;
use crate::metrics::pearson_values;
use crate::pipeline::{extract_pulse, PipelineConfig};
use crate::scalar::Real;
use crate::signal::{resample_values, FrameSequence, PulseSignal, RoiMask, CARDIAC_HIGH_HZ, CARDIAC_LOW_HZ};
use crate::synth::BVP_SIGNATURE;

pub const KERNEL_SIZE: usize = 30;
pub const DEFAULT_AMPLITUDE: f64 = 2.0;
pub const DEFAULT_FREQ_HZ: f64 = 1.5;
/// Injection weights (R, G, B). Matching the skin pulse signature keeps
/// chrominance-based extractors from separating the decoy from the pulse.
pub const DEFAULT_CHANNEL_WEIGHTS: [f64; 3] = BVP_SIGNATURE;

/// Single-channel `height x width` field, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn filled(width: usize, height: usize, v: T) -> Self {
        Self { width, height, values: vec![v; width * height] }
    }

    pub fn at(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }
}

/// `size x size` uniform kernel with entries `1 / size^2`.
pub fn uniform_kernel<T: Real>(size: usize) -> Vec<T> {
    let n = size * size;
    vec![T::one() / T::from_usize_lossy(n); n]
}

/// ROI indicator for one frame: 1 inside the mask, 0 outside.
pub fn build_template<T: Real>(mask: &RoiMask, frame_index: usize) -> Result<Field<T>> {
    if mask.mask_count() != 1 && frame_index >= mask.mask_count() {
        return Err(Error::DimensionMismatch(format!(
            "frame {frame_index} but mask has {} frames",
            mask.mask_count()
        )));
    }
    let values = mask.for_frame(frame_index).iter().map(|&b| if b == 1 { T::one() } else { T::zero() }).collect();
    Ok(Field { width: mask.width(), height: mask.height(), values })
}

/// Mirror index into `0..n`, repeating the edge sample (`d c b a | a b c d`).
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let k = i.rem_euclid(period) as usize;
    if k < n {
        k
    } else {
        period as usize - 1 - k
    }
}

/// Uniform `size x size` blur with mirrored borders. The window around
/// `(x, y)` spans `x - size/2 ..= x + size - 1 - size/2`. Computed as two
/// separable running means, which is the same sum as the full 2-D kernel.
pub fn blur_template<T: Real>(field: &Field<T>, size: usize) -> Field<T> {
    if size <= 1 {
        return field.clone();
    }
    let (w, h) = (field.width, field.height);
    let before = (size / 2) as isize;
    let k = T::from_usize_lossy(size);
    let mut rows = vec![T::zero(); w * h];
    for y in 0..h {
        let row = &field.values[y * w..(y + 1) * w];
        for x in 0..w {
            let start = x as isize - before;
            let s: T = (0..size as isize).map(|d| row[reflect(start + d, w)]).sum();
            rows[y * w + x] = s / k;
        }
    }
    let mut out = vec![T::zero(); w * h];
    for x in 0..w {
        for y in 0..h {
            let start = y as isize - before;
            let s: T = (0..size as isize).map(|d| rows[reflect(start + d, h) * w + x]).sum();
            out[y * w + x] = (s / k).max(T::zero()).min(T::one());
        }
    }
    Field { width: w, height: h, values: out }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WaveformKind {
    Sine { freq_hz: f64 },
    Custom { samples: Vec<f64> },
}

/// Per-frame decoy values. A sine must sit in the cardiac band so the decoy
/// looks like a heartbeat; a custom shape is resampled to `n_frames` and
/// scaled so its largest magnitude equals `amplitude`.
pub fn make_waveform<T: Real>(kind: &WaveformKind, fps: f64, n_frames: usize, amplitude: f64) -> Result<Vec<T>> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter(format!("amplitude must be non-negative, got {amplitude}")));
    }
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidParameter(format!("fps must be positive, got {fps}")));
    }
    match kind {
        WaveformKind::Sine { freq_hz } => {
            if !(CARDIAC_LOW_HZ..=CARDIAC_HIGH_HZ).contains(freq_hz) {
                return Err(Error::FrequencyOutOfBand(*freq_hz));
            }
            let w = std::f64::consts::TAU * freq_hz / fps;
            Ok((0..n_frames).map(|t| T::lit(amplitude * (w * t as f64).sin())).collect())
        }
        WaveformKind::Custom { samples } => {
            if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
                return Err(Error::BadCustomSignal("custom waveform must be non-empty and finite".into()));
            }
            let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                return Err(Error::BadCustomSignal("custom waveform is all zeros".into()));
            }
            let xs: Vec<f64> = samples.iter().map(|v| v / peak).collect();
            Ok(resample_values(&xs, n_frames).into_iter().map(|v| T::lit(amplitude * v)).collect())
        }
    }
}

/// Blurred ROI templates (one per mask frame) and the decoy waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionTemplate<T> {
    pub blurred: Vec<Field<T>>,
    pub waveform: Vec<T>,
    pub channel_weights: [T; 3],
}

impl<T: Real> InjectionTemplate<T> {
    pub fn new(mask: &RoiMask, waveform: Vec<T>, channel_weights: [T; 3]) -> Result<Self> {
        let blurred = (0..mask.mask_count())
            .map(|t| build_template(mask, t).map(|b| blur_template(&b, KERNEL_SIZE)))
            .collect::<Result<_>>()?;
        Ok(Self { blurred, waveform, channel_weights })
    }

    /// Additive perturbation of channel `c` at frame `t`, pixel `p`.
    pub fn delta(&self, t: usize, p: usize, c: usize) -> T {
        let field = if self.blurred.len() == 1 { &self.blurred[0] } else { &self.blurred[t] };
        field.values[p] * self.waveform[t] * self.channel_weights[c]
    }
}

/// Adds the blurred template times the waveform to every frame, rounding and
/// clamping to `0..=255`.
pub fn inject<T: Real>(video: &FrameSequence, mask: &RoiMask, waveform: &[T], channel_weights: [T; 3]) -> Result<FrameSequence> {
    mask.check_matches(video)?;
    if waveform.len() != video.frame_count() {
        return Err(Error::LengthMismatch { expected: video.frame_count(), got: waveform.len() });
    }
    let template = InjectionTemplate::new(mask, waveform.to_vec(), channel_weights)?;
    let mut out = video.clone();
    let pixels = video.width() * video.height();
    let max = T::lit(255.0);
    for t in 0..video.frame_count() {
        if waveform[t] == T::zero() {
            continue;
        }
        let frame = out.frame_mut(t);
        for p in 0..pixels {
            for c in 0..3 {
                let d = template.delta(t, p, c);
                if d != T::zero() {
                    let v = T::from_u8(frame[3 * p + c]).expect("u8 fits") + d;
                    frame[3 * p + c] = v.round().max(T::zero()).min(max).to_u8().expect("clamped");
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HidingReport {
    pub schema: u32,
    pub original_vs_truth: f64,
    pub protected_vs_truth: f64,
    pub original_vs_waveform: f64,
    pub protected_vs_waveform: f64,
    pub hidden: bool,
}

pub const MAX_TRUTH_CORRELATION: f64 = 0.3;
pub const MIN_WAVEFORM_CORRELATION: f64 = 0.7;

/// Extracts a pulse from both videos with CHROM and compares each against the
/// true pulse and the injected waveform (absolute Pearson correlations).
pub fn verify_hiding<T: Real>(
    original: &FrameSequence,
    protected: &FrameSequence,
    mask: &RoiMask,
    truth: &PulseSignal<T>,
    waveform: &[T],
) -> Result<HidingReport> {
    if original.width() != protected.width()
        || original.height() != protected.height()
        || original.frame_count() != protected.frame_count()
        || original.fps() != protected.fps()
    {
        return Err(Error::DimensionMismatch("original and protected videos differ in shape or fps".into()));
    }
    let cfg = PipelineConfig { method: Method::Chrom, ..PipelineConfig::default() };
    let a: PulseSignal<T> = extract_pulse(original, mask, &cfg)?;
    let b: PulseSignal<T> = extract_pulse(protected, mask, &cfg)?;
    let r = |x: &[T], y: &[T]| -> f64 {
        let n = x.len().min(y.len());
        pearson_values(&x[..n], &y[..n]).map(|v| v.abs().as_f64()).unwrap_or(0.0)
    };
    let report = HidingReport {
        schema: 1,
        original_vs_truth: r(a.values(), truth.values()),
        protected_vs_truth: r(b.values(), truth.values()),
        original_vs_waveform: r(a.values(), waveform),
        protected_vs_waveform: r(b.values(), waveform),
        hidden: false,
    };
    Ok(HidingReport {
        hidden: report.protected_vs_truth <= MAX_TRUTH_CORRELATION && report.protected_vs_waveform >= MIN_WAVEFORM_CORRELATION,
        ..report
    })
}

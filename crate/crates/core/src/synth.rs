//! Synthetic ground truth: pulse waveforms, RGB traces and frame tensors with
//! a known embedded pulse.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::IpiSequence;
use crate::scalar::Real;
use crate::signal::{FrameSequence, PulseSignal, RgbTrace, RoiMask};

/// Relative blood-volume pulse amplitude per channel (R, G, B), green strongest.
pub const BVP_SIGNATURE: [f64; 3] = [0.4, 1.0, 0.6];

const MIN_BPM: f64 = 39.0;
const MAX_BPM: f64 = 240.0;
const MIN_PERIOD_S: f64 = 0.5;

// independent random streams drawn from one seed
const STREAM_BEATS: u64 = 1;
const STREAM_TRACE: u64 = 2;
const STREAM_PIXELS: u64 = 3;
const STREAM_USER: u64 = 4;

/// Two Gaussian bumps per beat: systolic at the beat time, dicrotic after a delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseModel {
    pub heart_rate_bpm: f64,
    /// Gaussian sigma of the systolic bump, seconds.
    pub systolic_width: f64,
    pub dicrotic_width: f64,
    pub dicrotic_amplitude: f64,
    /// Systolic-to-dicrotic delay, seconds.
    pub dicrotic_delay: f64,
    /// Standard deviation of the beat period as a fraction of the mean period.
    pub hrv_jitter: f64,
    pub seed: u64,
}

impl Default for PulseModel {
    fn default() -> Self {
        Self {
            heart_rate_bpm: 72.0,
            systolic_width: 0.08,
            dicrotic_width: 0.10,
            dicrotic_amplitude: 0.4,
            dicrotic_delay: 0.30,
            hrv_jitter: 0.06,
            seed: 42,
        }
    }
}

impl PulseModel {
    /// A reproducible individual: heart rate and beat morphology drawn from
    /// `user` and `population_seed`. The session seed is left at `population_seed`.
    pub fn for_user(user: u64, population_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(population_seed ^ user.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.set_stream(STREAM_USER);
        Self {
            heart_rate_bpm: rng.random_range(60.0..85.0),
            systolic_width: rng.random_range(0.06..0.11),
            dicrotic_width: rng.random_range(0.07..0.14),
            dicrotic_amplitude: rng.random_range(0.15..0.7),
            dicrotic_delay: rng.random_range(0.22..0.38),
            hrv_jitter: 0.06,
            seed: population_seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadModel(m));
        if !(MIN_BPM..=MAX_BPM).contains(&self.heart_rate_bpm) {
            return bad(format!("heart rate {} outside {MIN_BPM}..{MAX_BPM} bpm", self.heart_rate_bpm));
        }
        if !(0.0..1.0).contains(&self.dicrotic_amplitude) {
            return bad(format!("dicrotic amplitude {} outside [0, 1)", self.dicrotic_amplitude));
        }
        for (name, v) in [("systolic_width", self.systolic_width), ("dicrotic_width", self.dicrotic_width)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.dicrotic_delay >= 0.0 && self.dicrotic_delay.is_finite()) {
            return bad(format!("dicrotic_delay must be non-negative, got {}", self.dicrotic_delay));
        }
        if !(self.hrv_jitter >= 0.0 && self.hrv_jitter.is_finite()) {
            return bad(format!("hrv_jitter must be non-negative, got {}", self.hrv_jitter));
        }
        Ok(())
    }

    /// Beat times in `[0, duration_s)`. The first beat sits half a period in.
    pub fn beat_times(&self, duration_s: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let period = 60.0 / self.heart_rate_bpm;
        let max_period = 60.0 / MIN_BPM;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(STREAM_BEATS);
        let mut beats = Vec::new();
        let mut t = 0.5 * period;
        while t < duration_s {
            beats.push(t);
            let z: f64 = StandardNormal.sample(&mut rng);
            t += (period * (1.0 + self.hrv_jitter * z)).clamp(MIN_PERIOD_S.min(period), max_period);
        }
        Ok(beats)
    }

    fn value_at(&self, t: f64, beats: &[f64]) -> f64 {
        let g = |x: f64, w: f64| (-0.5 * (x / w).powi(2)).exp();
        // only beats within a few widths contribute measurably
        let reach = 6.0 * self.systolic_width.max(self.dicrotic_width) + self.dicrotic_delay;
        let lo = beats.partition_point(|&b| b < t - reach);
        beats[lo..]
            .iter()
            .take_while(|&&b| b <= t + reach)
            .map(|&b| g(t - b, self.systolic_width) + self.dicrotic_amplitude * g(t - b - self.dicrotic_delay, self.dicrotic_width))
            .sum()
    }
}

fn frame_count(fps: f64, duration_s: f64) -> Result<usize> {
    if !(fps > 0.0 && fps.is_finite()) || !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("fps {fps} and duration {duration_s} must be positive")));
    }
    Ok((fps * duration_s).round() as usize)
}

/// Clean pulse sampled at `fps`.
pub fn gen_pulse<T: Real>(model: &PulseModel, fps: f64, duration_s: f64) -> Result<PulseSignal<T>> {
    Ok(simulate(model, fps, duration_s)?.0)
}

fn simulate<T: Real>(model: &PulseModel, fps: f64, duration_s: f64) -> Result<(PulseSignal<T>, IpiSequence<T>)> {
    let n = frame_count(fps, duration_s)?;
    let beats = model.beat_times(duration_s)?;
    let values = (0..n).map(|i| T::lit(model.value_at(i as f64 / fps, &beats))).collect();
    let pulse = PulseSignal::new(values, T::lit(fps))?;
    let ipi = IpiSequence::new(beats.windows(2).map(|w| T::lit(w[1] - w[0])).collect())?;
    Ok((pulse, ipi))
}

/// Elliptical face region, as fractions of the frame size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center_x: f64,
    pub center_y: f64,
    pub radius_x: f64,
    pub radius_y: f64,
}

impl Default for Ellipse {
    fn default() -> Self {
        Self { center_x: 0.5, center_y: 0.5, radius_x: 0.46, radius_y: 0.48 }
    }
}

impl Ellipse {
    pub fn contains(&self, width: usize, height: usize, x: usize, y: usize) -> bool {
        let dx = (x as f64 + 0.5 - self.center_x * width as f64) / (self.radius_x * width as f64);
        let dy = (y as f64 + 0.5 - self.center_y * height as f64) / (self.radius_y * height as f64);
        dx * dx + dy * dy <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub duration_s: f64,
    /// Mean skin colour (R, G, B).
    pub baseline: [f64; 3],
    /// Pulse modulation per channel, intensity units per unit of pulse.
    pub pulse_strength: [f64; 3],
    /// Per-pixel sensor noise. The skin mean sees it divided by the square
    /// root of the skin pixel count.
    pub noise_std: f64,
    /// Static per-pixel skin texture.
    pub texture_std: f64,
    /// Amplitude of the slow illumination drift; breathing adds 30 % of it.
    pub trend_amplitude: f64,
    pub background: [f64; 3],
    pub mask_shape: Ellipse,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            fps: 30.0,
            duration_s: 60.0,
            baseline: [170.0, 120.0, 100.0],
            pulse_strength: BVP_SIGNATURE,
            noise_std: 0.3,
            texture_std: 2.0,
            trend_amplitude: 2.0,
            background: [60.0, 70.0, 80.0],
            mask_shape: Ellipse::default(),
        }
    }
}

impl SceneConfig {
    pub fn validate(&self, model: &PulseModel) -> Result<()> {
        let bad = |m: String| Err(Error::BadModel(m));
        if !(self.pulse_strength[1] > 0.0) {
            return bad("green pulse strength must be positive".into());
        }
        if !(self.fps >= 2.0 * model.heart_rate_bpm / 60.0) {
            return bad(format!("fps {} below twice the heart-rate frequency", self.fps));
        }
        let finite = self.baseline.iter().chain(&self.pulse_strength).chain(&self.background).all(|v| v.is_finite());
        if !finite || !(self.noise_std >= 0.0) || !(self.texture_std >= 0.0) || !self.trend_amplitude.is_finite() {
            return bad("scene colours and noise levels must be finite and non-negative".into());
        }
        frame_count(self.fps, self.duration_s)?;
        Ok(())
    }

    pub fn mask(&self) -> Result<RoiMask> {
        if self.width < 8 || self.height < 8 {
            return Err(Error::SceneTooSmall(format!("{}x{} frame, need at least 8x8", self.width, self.height)));
        }
        let shape = self.mask_shape;
        let (w, h) = (self.width, self.height);
        let mask = RoiMask::from_fn(w, h, |x, y| shape.contains(w, h, x, y));
        if mask.count(0) < 4 {
            return Err(Error::SceneTooSmall(format!("face region covers {} pixels", mask.count(0))));
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTrace<T> {
    pub trace: RgbTrace<T>,
    pub truth: PulseSignal<T>,
    pub truth_ipi: IpiSequence<T>,
}

/// `baseline_c + strength_c * pulse + trend_c + noise` per frame, where the
/// noise is the skin-mean share of the pixel noise. The trend scales with each
/// channel's baseline like an illumination change.
pub fn gen_trace<T: Real>(model: &PulseModel, scene: &SceneConfig) -> Result<SynthTrace<T>> {
    Ok(trace_f64(model, scene)?.cast())
}

struct RawTrace {
    samples: Vec<[f64; 3]>,
    truth: Vec<f64>,
    ipi: Vec<f64>,
    fps: f64,
}

impl RawTrace {
    fn cast<T: Real>(&self) -> SynthTrace<T> {
        let fps = T::lit(self.fps);
        let samples = self.samples.iter().map(|s| s.map(T::lit)).collect();
        SynthTrace {
            trace: RgbTrace::new(samples, fps).expect("finite synthetic trace"),
            truth: PulseSignal::new(self.truth.iter().map(|&v| T::lit(v)).collect(), fps).expect("finite pulse"),
            truth_ipi: IpiSequence::new(self.ipi.iter().map(|&v| T::lit(v)).collect()).expect("positive intervals"),
        }
    }
}

fn trace_f64(model: &PulseModel, scene: &SceneConfig) -> Result<RawTrace> {
    scene.validate(model)?;
    let skin_pixels = scene.mask()?.count(0) as f64;
    let (pulse, ipi) = simulate::<f64>(model, scene.fps, scene.duration_s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(STREAM_TRACE);
    let drift_phase = rng.random_range(0.0..std::f64::consts::TAU);
    let breath_phase = rng.random_range(0.0..std::f64::consts::TAU);
    let breath_hz = rng.random_range(0.2..0.3);
    let noise = Normal::new(0.0, scene.noise_std / skin_pixels.sqrt()).map_err(|e| Error::BadModel(e.to_string()))?;
    let mean_base = scene.baseline.iter().sum::<f64>() / 3.0;

    let samples = pulse
        .values()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let t = i as f64 / scene.fps;
            let trend = scene.trend_amplitude
                * ((std::f64::consts::TAU * 0.03 * t + drift_phase).sin()
                    + 0.3 * (std::f64::consts::TAU * breath_hz * t + breath_phase).sin());
            std::array::from_fn(|c| {
                let rel = if mean_base != 0.0 { scene.baseline[c] / mean_base } else { 1.0 };
                scene.baseline[c] + scene.pulse_strength[c] * p + trend * rel + noise.sample(&mut rng)
            })
        })
        .collect();
    Ok(RawTrace { samples, truth: pulse.into_values(), ipi: ipi.intervals().to_vec(), fps: scene.fps })
}

#[derive(Debug, Clone)]
pub struct SynthVideo<T> {
    pub frames: FrameSequence,
    pub mask: RoiMask,
    pub trace: RgbTrace<T>,
    pub truth: PulseSignal<T>,
    pub truth_ipi: IpiSequence<T>,
}

/// Renders the trace into frames. Skin pixels carry the trace value plus a
/// static texture and per-frame pixel noise, both re-centred to zero mean over
/// the mask (the trace already holds the mean of the noise), then round to
/// `u8`. The skin mean therefore reproduces the trace within rounding.
pub fn gen_frames<T: Real>(model: &PulseModel, scene: &SceneConfig) -> Result<SynthVideo<T>> {
    let mask = scene.mask()?;
    let raw = trace_f64(model, scene)?;
    let (w, h) = (scene.width, scene.height);
    let m = mask.for_frame(0);
    let skin: Vec<usize> = (0..w * h).filter(|&p| m[p] == 1).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(STREAM_PIXELS);
    let tex = Normal::new(0.0, scene.texture_std).map_err(|e| Error::BadModel(e.to_string()))?;
    let pix = Normal::new(0.0, scene.noise_std).map_err(|e| Error::BadModel(e.to_string()))?;
    let mut texture: Vec<[f64; 3]> = skin.iter().map(|_| std::array::from_fn(|_| tex.sample(&mut rng))).collect();
    center(&mut texture);
    let background: Vec<[u8; 3]> = (0..w * h)
        .map(|_| std::array::from_fn(|c| to_u8(scene.background[c] + tex.sample(&mut rng))))
        .collect();

    let frame_len = w * h * 3;
    let mut data = vec![0u8; raw.samples.len() * frame_len];
    let mut jitter = vec![[0.0; 3]; skin.len()];
    for (t, sample) in raw.samples.iter().enumerate() {
        let frame = &mut data[t * frame_len..(t + 1) * frame_len];
        for (p, px) in background.iter().enumerate() {
            frame[3 * p..3 * p + 3].copy_from_slice(px);
        }
        jitter.iter_mut().for_each(|j| *j = std::array::from_fn(|_| pix.sample(&mut rng)));
        center(&mut jitter);
        for (k, &p) in skin.iter().enumerate() {
            for c in 0..3 {
                frame[3 * p + c] = to_u8(sample[c] + texture[k][c] + jitter[k][c]);
            }
        }
    }
    let frames = FrameSequence::new(w, h, scene.fps, data)?;
    let out = raw.cast();
    Ok(SynthVideo { frames, mask, trace: out.trace, truth: out.truth, truth_ipi: out.truth_ipi })
}

fn center(xs: &mut [[f64; 3]]) {
    if xs.is_empty() {
        return;
    }
    for c in 0..3 {
        let m = xs.iter().map(|v| v[c]).sum::<f64>() / xs.len() as f64;
        xs.iter_mut().for_each(|v| v[c] -= m);
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

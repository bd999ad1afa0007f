//! End-to-end chains: video to pulse, pulse to IPI key bits and cycles.

use crate::error::{Error, Result};
use crate::extract::Method;
use crate::metrics::{bhr, PairedSeries};
use crate::pulse::{detect_peaks, ipi_from_peaks, segment_cycles, CycleSet, IpiSequence, PeakConfig, PeakList, CYCLE_LEN};
use crate::quantize::{fit_bins, gray_bitstream, gray_encode, normalize_ipi, trend_encode, GrayCodeWord, TrendCode};
use crate::scalar::{mean, pop_std, Real};
use crate::signal::{
    bandpass, detrend, mean_rgb, FrameSequence, PulseSignal, RgbTrace, RoiMask, SampledSignal, CARDIAC_HIGH_HZ,
    CARDIAC_LOW_HZ, DEFAULT_DETREND_LAMBDA,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub method: Method,
    pub detrend_lambda: f64,
    pub low_hz: f64,
    pub high_hz: f64,
    /// POS window in frames; `None` uses 1.6 s.
    pub pos_window: Option<usize>,
    pub peaks: PeakConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Chrom,
            detrend_lambda: DEFAULT_DETREND_LAMBDA,
            low_hz: CARDIAC_LOW_HZ,
            high_hz: CARDIAC_HIGH_HZ,
            pos_window: None,
            peaks: PeakConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }
}

/// Detrend then band-pass a single signal.
pub fn clean_signal<T: Real>(signal: &SampledSignal<T>, cfg: &PipelineConfig) -> Result<SampledSignal<T>> {
    let d = detrend(signal, T::lit(cfg.detrend_lambda))?;
    bandpass(&d, cfg.low_hz, cfg.high_hz)
}

/// Detrend and band-pass every channel of a trace.
pub fn clean_trace<T: Real>(trace: &RgbTrace<T>, cfg: &PipelineConfig) -> Result<RgbTrace<T>> {
    trace.map_channels(|s| clean_signal(s, cfg))
}

fn std_skew<T: Real>(x: &[T]) -> T {
    let m = mean(x);
    let sd = pop_std(x);
    if !(sd > T::zero()) {
        return T::zero();
    }
    x.iter().map(|&v| ((v - m) / sd).powi(3)).sum::<T>() / T::from_usize_lossy(x.len())
}

/// Flips the sign so the pulse looks like a pulse: systolic upstrokes are
/// steeper than the decay (right-skewed first difference) and the crests are
/// narrower than the troughs (right-skewed values). The two standardized
/// skews are summed; either alone misreads some waveforms, e.g. a wide
/// systolic bump with a strong dicrotic wave has near-zero value skew.
pub fn orient<T: Real>(signal: SampledSignal<T>) -> SampledSignal<T> {
    let x = signal.values();
    let d: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    if std_skew(x) + std_skew(&d) < T::zero() {
        signal.map(|v| -v)
    } else {
        signal
    }
}

/// Pulse from a colour trace. CHROM and PCA run on the cleaned channels; POS
/// and LGI normalise by channel means, so they see the raw trace and their
/// output is cleaned afterwards.
pub fn extract_from_trace<T: Real>(trace: &RgbTrace<T>, cfg: &PipelineConfig) -> Result<PulseSignal<T>> {
    let pulse = if cfg.method.needs_raw_trace() {
        let raw = cfg.method.extract(trace, cfg.pos_window)?;
        clean_signal(&raw, cfg)?
    } else {
        cfg.method.extract(&clean_trace(trace, cfg)?, cfg.pos_window)?
    };
    if !(pop_std(pulse.values()) > T::zero()) {
        return Err(Error::DegenerateTrace("extracted pulse is flat".into()));
    }
    Ok(orient(pulse))
}

/// Skin-mean trace of a video followed by [`extract_from_trace`].
pub fn extract_pulse<T: Real>(frames: &FrameSequence, mask: &RoiMask, cfg: &PipelineConfig) -> Result<PulseSignal<T>> {
    let trace: RgbTrace<T> = mean_rgb(frames, mask)?;
    extract_from_trace(&trace, cfg)
}

/// Peaks, intervals and both key encodings of one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct IpiAnalysis<T> {
    pub peaks: PeakList<T>,
    pub ipi: IpiSequence<T>,
    pub gray: Vec<GrayCodeWord>,
    /// `None` when the intervals have no spread to fit quantile bins to.
    pub trend: Option<TrendCode>,
}

pub fn analyse_ipi<T: Real>(pulse: &PulseSignal<T>, peaks: &PeakConfig) -> Result<IpiAnalysis<T>> {
    let peak_list = detect_peaks(pulse, peaks)?;
    let ipi = ipi_from_peaks(&peak_list)?;
    let gray = gray_encode(&normalize_ipi(&ipi));
    let trend = match fit_bins(&ipi) {
        Ok(bins) => Some(trend_encode(&ipi, &bins)),
        Err(Error::DegenerateSequence(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(IpiAnalysis { peaks: peak_list, ipi, gray, trend })
}

/// Normalised beat cycles of a pulse.
pub fn pulse_cycles<T: Real>(pulse: &PulseSignal<T>, peaks: &PeakConfig) -> Result<CycleSet<T>> {
    segment_cycles(pulse, &detect_peaks(pulse, peaks)?, CYCLE_LEN)
}

/// Interval series of two pulses, aligned by first-peak anchoring.
pub fn paired_intervals<T: Real>(reference: &PulseSignal<T>, candidate: &PulseSignal<T>, peaks: &PeakConfig) -> Result<PairedSeries<T>> {
    let r = detect_peaks(reference, peaks)?;
    let c = detect_peaks(candidate, peaks)?;
    PairedSeries::anchored(&r.times(), &c.times())
}

/// Gray-code bit hit rate between the interval keys of two pulses.
pub fn pulse_bhr<T: Real>(reference: &PulseSignal<T>, candidate: &PulseSignal<T>, peaks: &PeakConfig) -> Result<f64> {
    let pair = paired_intervals(reference, candidate, peaks)?;
    let a = gray_bitstream(&IpiSequence::new(pair.reference().to_vec())?);
    let b = gray_bitstream(&IpiSequence::new(pair.candidate().to_vec())?);
    bhr(&a, &b)
}

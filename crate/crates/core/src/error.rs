use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ROI mask selects no pixels (frame {frame})")]
    EmptyMask { frame: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid pass band {low} Hz .. {high} Hz at sample rate {rate} Hz")]
    InvalidBand { low: f64, high: f64, rate: f64 },
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),
    #[error("window of {window} frames exceeds trace length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("fewer than two peaks detected")]
    NoPeaks,
    #[error("empty interval sequence")]
    EmptySequence,
    #[error("degenerate interval sequence: {0}")]
    DegenerateSequence(String),
    #[error("malformed bit string {0:?}")]
    MalformedBits(String),
    #[error("empty series")]
    EmptySeries,
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("empty bit string")]
    EmptyBits,
    #[error("empty score set")]
    EmptyScores,
    #[error("too few cycles: need {needed}, got {got}")]
    TooFewCycles { needed: usize, got: usize },
    #[error("bad cycle: {0}")]
    BadCycle(String),
    #[error("empty cycle set")]
    EmptyCycleSet,
    #[error("frequency {0} Hz outside the 0.65-4.0 Hz cardiac band")]
    FrequencyOutOfBand(f64),
    #[error("bad custom waveform: {0}")]
    BadCustomSignal(String),
    #[error("bad pulse model: {0}")]
    BadModel(String),
    #[error("scene too small: {0}")]
    SceneTooSmall(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures of the outside world (files, formats) rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

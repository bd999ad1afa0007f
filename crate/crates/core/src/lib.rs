//! Remote-PPG attack and defense workbench.
//!
//! Pulse extraction from facial video (CHROM, POS, LGI, PCA), inter-pulse
//! interval key codecs, evaluation metrics, a template-matching
//! authenticator with spoofing experiments, the SigH signal-hiding defense
//! and a synthetic ground-truth generator.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

// `!(x > 0)` is used deliberately so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod auth;
pub mod error;
pub mod experiment;
pub mod extract;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod pulse;
pub mod quantize;
pub mod scalar;
pub mod sigh;
pub mod signal;
pub mod spectrum;
pub mod synth;

pub use error::{Error, Result};
pub use extract::Method;
pub use scalar::Real;
pub use signal::{FrameSequence, RoiMask};

pub type Signal = signal::SampledSignal<f64>;
pub type Pulse = signal::PulseSignal<f64>;
pub type Trace = signal::RgbTrace<f64>;
pub type Peaks = pulse::PeakList<f64>;
pub type Ipi = pulse::IpiSequence<f64>;
pub type Cycles = pulse::CycleSet<f64>;
pub type Template = auth::UserTemplate<f64>;

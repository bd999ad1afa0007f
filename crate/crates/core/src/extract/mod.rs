//! Classical rPPG extractors mapping a per-frame colour trace to a pulse:
//! chrominance (CHROM), plane-orthogonal-to-skin (POS), local group invariance
//! (LGI) and principal component separation (PCA).

mod chrom;
mod lgi;
mod pca;
mod pos;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chrom::{chrom, ChromaProjection};
pub use lgi::{lgi, ProjectionPlane};
pub use pca::{pca_extract, principal_axes, PrincipalAxes};
pub use pos::{default_pos_window, pos, WindowedTrace};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{PulseSignal, RgbTrace};

/// Numerical floor below which a standard deviation counts as zero.
pub(crate) const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Chrom,
    Pos,
    Lgi,
    Pca,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Chrom, Method::Pos, Method::Lgi, Method::Pca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Chrom => "chrom",
            Method::Pos => "pos",
            Method::Lgi => "lgi",
            Method::Pca => "pca",
        }
    }

    /// POS and LGI divide by the channel means, so they need the raw
    /// (non-zero-mean) trace; CHROM and PCA run on the filtered one.
    pub fn needs_raw_trace(self) -> bool {
        matches!(self, Method::Pos | Method::Lgi)
    }

    /// Runs the extractor. `pos_window` overrides the POS default of 1.6 s.
    pub fn extract<T: Real>(self, trace: &RgbTrace<T>, pos_window: Option<usize>) -> Result<PulseSignal<T>> {
        match self {
            Method::Chrom => chrom(trace),
            Method::Pos => {
                let w = pos_window.unwrap_or_else(|| default_pos_window(trace.fps().as_f64()));
                pos(trace, w)
            }
            Method::Lgi => lgi(trace),
            Method::Pca => pca_extract(trace),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chrom" => Ok(Method::Chrom),
            "pos" => Ok(Method::Pos),
            "lgi" => Ok(Method::Lgi),
            "pca" => Ok(Method::Pca),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?} (chrom|pos|lgi|pca)"))),
        }
    }
}

/// Divides every channel by its mean over `samples`.
pub(crate) fn temporal_normalize<T: Real>(samples: &[[T; 3]]) -> Option<([T; 3], Vec<[T; 3]>)> {
    let n = T::from_usize_lossy(samples.len());
    let mut mu = [T::zero(); 3];
    for s in samples {
        for c in 0..3 {
            mu[c] += s[c];
        }
    }
    for m in mu.iter_mut() {
        *m /= n;
    }
    if mu.iter().any(|m| m.abs() <= T::lit(SIGMA_FLOOR)) {
        return None;
    }
    let normalized = samples.iter().map(|s| [s[0] / mu[0], s[1] / mu[1], s[2] / mu[2]]).collect();
    Some((mu, normalized))
}

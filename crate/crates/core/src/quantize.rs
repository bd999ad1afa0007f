//! IPI-to-bits codecs: min-max normalisation with 8-bit Gray coding, and a
//! trend code over 16 equiprobable normal bins.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::pulse::IpiSequence;
use crate::scalar::{mean, pop_std, Real};
use crate::signal::normalize01_values;

pub const GRAY_BITS: usize = 8;
pub const TREND_BINS: usize = 16;

/// IPI values mapped onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedIpi<T> {
    values: Vec<T>,
}

impl<T: Real> NormalizedIpi<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// `(IPI - min) / (max - min)`; a constant sequence maps to all 0.5.
pub fn normalize_ipi<T: Real>(ipi: &IpiSequence<T>) -> NormalizedIpi<T> {
    NormalizedIpi { values: normalize01_values(ipi.intervals()) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayCodeWord {
    pub scaled: u8,
    pub bits: String,
}

impl GrayCodeWord {
    pub fn from_scaled(scaled: u8) -> Self {
        let gray = scaled ^ (scaled >> 1);
        Self { scaled, bits: format!("{gray:08b}") }
    }

    /// Bits as 0/1 bytes, most significant first.
    pub fn bit_values(&self) -> Vec<u8> {
        self.bits.bytes().map(|b| b - b'0').collect()
    }
}

/// Scales by 256, floors, clamps to 255, and Gray-codes each value.
pub fn gray_encode<T: Real>(ipi_s: &NormalizedIpi<T>) -> Vec<GrayCodeWord> {
    ipi_s.values.iter().map(|&v| gray_word(v)).collect()
}

pub fn gray_word<T: Real>(v: T) -> GrayCodeWord {
    let scaled = (v * T::lit(256.0)).floor().max(T::zero()).min(T::lit(255.0));
    GrayCodeWord::from_scaled(scaled.to_u8().expect("clamped to u8 range"))
}

/// Inverts the Gray transform of an 8-character bit string.
pub fn decode_check(bits: &str) -> Result<u8> {
    if bits.len() != GRAY_BITS || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::MalformedBits(bits.to_string()));
    }
    let gray = u8::from_str_radix(bits, 2).map_err(|_| Error::MalformedBits(bits.to_string()))?;
    let mut value = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        value ^= shift;
        shift >>= 1;
    }
    Ok(value)
}

/// Sixteen equiprobable bins of a normal distribution fitted to the intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileBinning<T> {
    pub bin_edges: Vec<T>,
    pub fitted_mean: T,
    pub fitted_std: T,
}

impl<T: Real> QuantileBinning<T> {
    /// Bin of `value`, 0..16. A value equal to an edge falls in the upper bin.
    pub fn bin_of(&self, value: T) -> usize {
        self.bin_edges.partition_point(|&e| e <= value)
    }

    /// Binning with the same edges pushed through a monotone map.
    pub fn mapped(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            bin_edges: self.bin_edges.iter().map(|&e| f(e)).collect(),
            fitted_mean: f(self.fitted_mean),
            fitted_std: self.fitted_std,
        }
    }
}

/// Fits mean and population sigma; edges at the normal quantiles k/16, k = 1..15.
pub fn fit_bins<T: Real>(ipi: &IpiSequence<T>) -> Result<QuantileBinning<T>> {
    if ipi.len() < 2 {
        return Err(Error::DegenerateSequence(format!("need at least 2 intervals, got {}", ipi.len())));
    }
    let m = mean(ipi.intervals());
    let sd = pop_std(ipi.intervals());
    if !(sd > T::zero()) {
        return Err(Error::DegenerateSequence("intervals have zero variance".into()));
    }
    let standard = Normal::standard();
    let bin_edges = (1..TREND_BINS)
        .map(|k| m + sd * T::lit(standard.inverse_cdf(k as f64 / TREND_BINS as f64)))
        .collect();
    Ok(QuantileBinning { bin_edges, fitted_mean: m, fitted_std: sd })
}

/// Trend bits: a leading 0, then one bit per interval that is 1 exactly when
/// its bin is above the previous interval's bin (the first interval compares
/// against itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendCode {
    pub bits: Vec<u8>,
}

impl TrendCode {
    pub fn from_bins(bins: &[usize]) -> Self {
        let mut bits = Vec::with_capacity(bins.len() + 1);
        bits.push(0);
        let mut prev = bins.first().copied().unwrap_or(0);
        for &b in bins {
            bits.push(u8::from(b > prev));
            prev = b;
        }
        Self { bits }
    }

    pub fn as_string(&self) -> String {
        self.bits.iter().map(|&b| char::from(b'0' + b)).collect()
    }
}

pub fn trend_encode<T: Real>(ipi: &IpiSequence<T>, bins: &QuantileBinning<T>) -> TrendCode {
    let idx: Vec<usize> = ipi.intervals().iter().map(|&v| bins.bin_of(v)).collect();
    TrendCode::from_bins(&idx)
}

/// Concatenated Gray bits of a whole sequence.
pub fn gray_bitstream<T: Real>(ipi: &IpiSequence<T>) -> Vec<u8> {
    gray_encode(&normalize_ipi(ipi)).iter().flat_map(GrayCodeWord::bit_values).collect()
}

/// Parses a '0'/'1' string into bit values.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .bytes()
        .map(|b| match b {
            b'0' => Ok(0),
            b'1' => Ok(1),
            _ => Err(Error::MalformedBits(s.to_string())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn ipi(v: &[f64]) -> IpiSequence<f64> {
        IpiSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let v = normalize_ipi(&ipi(&[0.8, 1.0, 0.9]));
        for (a, b) in v.values().iter().zip([0.0, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(normalize_ipi(&ipi(&[1.0])).values(), &[0.5]);
        let v = normalize_ipi(&ipi(&[0.6, 0.7, 0.9, 1.0]));
        for (a, b) in v.values().iter().zip([0.0, 0.25, 0.75, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gray_examples() {
        assert_eq!(gray_word(0.0).bits, "00000000");
        let half = gray_word(0.5);
        assert_eq!((half.scaled, half.bits.as_str()), (128, "11000000"));
        assert_eq!(128u8 ^ 64, 192);
        let one = gray_word(1.0);
        assert_eq!((one.scaled, one.bits.as_str()), (255, "10000000"));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_check("00000000").unwrap(), 0);
        assert_eq!(decode_check("11000000").unwrap(), 128);
        assert_eq!(decode_check("10000000").unwrap(), 255);
        assert!(matches!(decode_check("1100000"), Err(Error::MalformedBits(_))));
        assert!(matches!(decode_check("1100000x"), Err(Error::MalformedBits(_))));
    }

    #[test]
    fn gray_adjacency_and_round_trip_exhaustive() {
        for v in 0..=255u8 {
            let w = GrayCodeWord::from_scaled(v);
            assert_eq!(w.bits.len(), 8);
            assert_eq!(decode_check(&w.bits).unwrap(), v);
            if v < 255 {
                let next = GrayCodeWord::from_scaled(v + 1);
                let diff = w.bits.bytes().zip(next.bits.bytes()).filter(|(a, b)| a != b).count();
                assert_eq!(diff, 1);
            }
        }
    }

    #[test]
    fn decode_of_encode_on_grid() {
        for i in 0..10_000 {
            let v = i as f64 / 9_999.0;
            let expected = ((256.0 * v).floor() as u32).min(255) as u8;
            assert_eq!(decode_check(&gray_word(v).bits).unwrap(), expected);
        }
    }

    #[test]
    fn bins_are_equiprobable_for_normal_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let seq = IpiSequence::new(xs.iter().map(|x| 10.0 + x).collect()).unwrap();
        let bins = fit_bins(&seq).unwrap();
        assert_eq!(bins.bin_edges.len(), 15);
        assert!(bins.bin_edges.windows(2).all(|w| w[0] < w[1]));
        let mut counts = [0usize; TREND_BINS];
        for &v in seq.intervals() {
            counts[bins.bin_of(v)] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 16.0).abs() <= 0.02);
        }
        for k in 0..7 {
            let lo = bins.fitted_mean - bins.bin_edges[k];
            let hi = bins.bin_edges[14 - k] - bins.fitted_mean;
            assert!((lo - hi).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_variance_is_degenerate() {
        assert!(matches!(fit_bins(&ipi(&[1.0, 1.0, 1.0])), Err(Error::DegenerateSequence(_))));
        assert!(matches!(fit_bins(&ipi(&[1.0])), Err(Error::DegenerateSequence(_))));
    }

    #[test]
    fn trend_examples() {
        assert_eq!(TrendCode::from_bins(&[3, 5, 5, 2]).bits, vec![0, 0, 1, 0, 0]);
        assert_eq!(TrendCode::from_bins(&[1, 2, 3]).bits, vec![0, 0, 1, 1]);
        assert_eq!(TrendCode::from_bins(&[4, 4, 4, 4]).bits, vec![0; 5]);
        assert_eq!(TrendCode::from_bins(&[1, 2, 3]).as_string(), "0011");
    }

    proptest! {
        #[test]
        fn trend_length_and_seed(v in proptest::collection::vec(0.5f64..1.5, 2..50)) {
            prop_assume!(pop_std(&v) > 0.0);
            let seq = ipi(&v);
            let bins = fit_bins(&seq).unwrap();
            let code = trend_encode(&seq, &bins);
            prop_assert_eq!(code.bits.len(), v.len() + 1);
            prop_assert_eq!(code.bits[0], 0);
        }

        #[test]
        fn monotone_map_preserves_bins(
            v in proptest::collection::vec(0.5f64..1.5, 3..50),
            scale in 0.1f64..10.0,
            offset in -1.0f64..1.0,
        ) {
            prop_assume!(pop_std(&v) > 1e-6);
            let seq = ipi(&v);
            let bins = fit_bins(&seq).unwrap();
            let f = |x: f64| (x * scale + offset).exp();
            let mapped = IpiSequence::new(v.iter().map(|&x| f(x)).collect()).unwrap();
            let mapped_bins = bins.mapped(f);
            for (a, b) in v.iter().zip(mapped.intervals()) {
                prop_assert_eq!(bins.bin_of(*a), mapped_bins.bin_of(*b));
            }
            prop_assert_eq!(trend_encode(&seq, &bins), trend_encode(&mapped, &mapped_bins));
        }
    }
}

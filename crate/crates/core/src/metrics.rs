//! Scalar evaluation metrics: MAE, RMSE, Pearson correlation, bit hit rate and
//! the FAR/FRR/EER sweep used to rate both the authenticator and the attacks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{mean, Real};

/// Reference and candidate series of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries<T> {
    reference: Vec<T>,
    candidate: Vec<T>,
}

impl<T: Real> PairedSeries<T> {
    /// Pairs two series, truncating both to the shorter length.
    pub fn truncated(reference: &[T], candidate: &[T]) -> Result<Self> {
        let n = reference.len().min(candidate.len());
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        Ok(Self { reference: reference[..n].to_vec(), candidate: candidate[..n].to_vec() })
    }

    /// Pairs interval sequences derived from two peak trains. The train whose
    /// first peak comes earlier is advanced to the peak nearest the other
    /// train's first peak; the intervals from there are then truncated to the
    /// common length.
    pub fn anchored(ref_peaks_s: &[T], cand_peaks_s: &[T]) -> Result<Self> {
        if ref_peaks_s.len() < 2 || cand_peaks_s.len() < 2 {
            return Err(Error::EmptySeries);
        }
        let nearest = |train: &[T], t: T| {
            train
                .iter()
                .enumerate()
                .min_by(|a, b| (*a.1 - t).abs().partial_cmp(&(*b.1 - t).abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        let (mut ri, mut ci) = (0, 0);
        if ref_peaks_s[0] <= cand_peaks_s[0] {
            ri = nearest(ref_peaks_s, cand_peaks_s[0]);
        } else {
            ci = nearest(cand_peaks_s, ref_peaks_s[0]);
        }
        let diffs = |xs: &[T]| xs.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        Self::truncated(&diffs(&ref_peaks_s[ri..]), &diffs(&cand_peaks_s[ci..]))
    }

    pub fn reference(&self) -> &[T] {
        &self.reference
    }

    pub fn candidate(&self) -> &[T] {
        &self.candidate
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }
}

pub fn mae<T: Real>(p: &PairedSeries<T>) -> T {
    let diffs: Vec<T> = p.reference.iter().zip(&p.candidate).map(|(&a, &b)| (a - b).abs()).collect();
    mean(&diffs)
}

pub fn rmse<T: Real>(p: &PairedSeries<T>) -> T {
    let sq: Vec<T> = p.reference.iter().zip(&p.candidate).map(|(&a, &b)| (a - b) * (a - b)).collect();
    mean(&sq).sqrt()
}

pub fn pearson<T: Real>(p: &PairedSeries<T>) -> Result<T> {
    pearson_values(&p.reference, &p.candidate)
}

/// Product-moment correlation of two equal-length series.
pub fn pearson_values<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::EmptySeries);
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > T::zero()) || !(sbb > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let r = sab / (saa.sqrt() * sbb.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// Fraction of positions where the two bit strings agree, over the common prefix.
pub fn bhr(reference: &[u8], candidate: &[u8]) -> Result<f64> {
    let n = reference.len().min(candidate.len());
    if n == 0 {
        return Err(Error::EmptyBits);
    }
    let hits = reference[..n].iter().zip(&candidate[..n]).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / n as f64)
}

/// Genuine and impostor distance scores; lower distance means "more alike".
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet<T> {
    pub genuine: Vec<T>,
    pub impostor: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint<T> {
    pub threshold: T,
    pub far: T,
    pub frr: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EerResult<T> {
    pub eer: T,
    pub threshold: T,
    pub roc: Vec<RocPoint<T>>,
}

/// Fraction of impostor scores accepted (`<= threshold`).
pub fn far_at<T: Real>(impostor: &[T], threshold: T) -> T {
    frac(impostor.iter().filter(|&&s| s <= threshold).count(), impostor.len())
}

/// Fraction of genuine scores rejected (`> threshold`).
pub fn frr_at<T: Real>(genuine: &[T], threshold: T) -> T {
    frac(genuine.iter().filter(|&&s| s > threshold).count(), genuine.len())
}

fn frac<T: Real>(k: usize, n: usize) -> T {
    T::from_usize_lossy(k) / T::from_usize_lossy(n)
}

/// Discrete threshold sweep over every observed score. The EER point is the
/// threshold minimising `|FAR - FRR|` (lowest threshold on ties) and the EER is
/// the mean of FAR and FRR there.
pub fn far_frr_eer<T: Real>(scores: &ScoreSet<T>) -> Result<EerResult<T>> {
    if scores.genuine.is_empty() || scores.impostor.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut thresholds: Vec<T> = scores.genuine.iter().chain(&scores.impostor).copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    thresholds.dedup();

    let mut imp = scores.impostor.clone();
    let mut gen = scores.genuine.clone();
    imp.sort_by(|a, b| a.partial_cmp(b).unwrap());
    gen.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roc = Vec::with_capacity(thresholds.len());
    let mut best: Option<(T, usize)> = None;
    for (k, &t) in thresholds.iter().enumerate() {
        let far: T = frac(imp.partition_point(|&s| s <= t), imp.len());
        let frr: T = frac(gen.len() - gen.partition_point(|&s| s <= t), gen.len());
        let gap = (far - frr).abs();
        if best.is_none_or(|(g, _)| gap < g) {
            best = Some((gap, k));
        }
        roc.push(RocPoint { threshold: t, far, frr });
    }
    let (_, k) = best.expect("non-empty sweep");
    let p = roc[k];
    Ok(EerResult { eer: (p.far + p.frr) / T::lit(2.0), threshold: p.threshold, roc })
}

/// Versioned JSON report shared by the metrics and attack commands.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema: u32,
    pub method: Option<String>,
    pub mae: Option<f64>,
    pub rmse: Option<f64>,
    pub pc: Option<f64>,
    pub bhr: Option<f64>,
    pub eer: Option<f64>,
    pub far_at_threshold: Option<f64>,
    pub n: usize,
}

impl MetricsReport {
    pub const SCHEMA: u32 = 1;

    pub fn new(method: Option<String>, n: usize) -> Self {
        Self { schema: Self::SCHEMA, method, n, ..Self::default() }
    }

    /// MAE, RMSE and (when defined) Pearson for a paired series.
    pub fn from_series(method: Option<String>, p: &PairedSeries<f64>) -> Self {
        Self {
            mae: Some(mae(p)),
            rmse: Some(rmse(p)),
            pc: pearson(p).ok(),
            ..Self::new(method, p.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(a: &[f64], b: &[f64]) -> PairedSeries<f64> {
        PairedSeries::truncated(a, b).unwrap()
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&pair(&[1.0, 2.0], &[1.0, 2.0])), 0.0);
        assert!((mae(&pair(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0])) - 2.0 / 3.0).abs() < 1e-15);
        assert!((mae(&pair(&[0.0], &[0.0322])) - 0.0322).abs() < 1e-15);
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&pair(&[4.0, 5.0], &[4.0, 5.0])), 0.0);
        assert!((rmse(&pair(&[0.0, 0.0], &[3.0, 4.0])) - 12.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 7.0];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((pearson(&pair(&a, &a)).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&pair(&a, &neg)).unwrap() + 1.0).abs() < 1e-15);
        // centred cross-product sum 3, sums of squares 2 and 14/3
        let expected = 3.0 / (2.0f64 * 14.0 / 3.0).sqrt();
        assert!((pearson(&pair(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0])).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.98198).abs() < 1e-5);
        assert_eq!(pearson(&pair(&[1.0, 1.0], &[1.0, 2.0])), Err(Error::ZeroVariance));
    }

    #[test]
    fn bhr_examples() {
        assert_eq!(bhr(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(bhr(&[1, 0, 1, 0], &[1, 0, 0, 1]).unwrap(), 0.5);
        assert_eq!(bhr(&[1, 1, 1], &[1]).unwrap(), 1.0);
        assert_eq!(bhr(&[], &[1]), Err(Error::EmptyBits));
    }

    #[test]
    fn bhr_of_random_bits_is_one_half() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let a: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let fixed: Vec<u8> = (0..n).map(|i| (i % 3 == 0) as u8).collect();
        let h = bhr(&a, &fixed).unwrap();
        assert!((h - 0.5).abs() <= 0.01, "{h}");
    }

    #[test]
    fn eer_examples() {
        let sep = ScoreSet { genuine: vec![0.1; 4], impostor: vec![0.9; 4] };
        let r = far_frr_eer(&sep).unwrap();
        assert_eq!(r.eer, 0.0);
        assert!(r.threshold >= 0.1 && r.threshold < 0.9);

        let same = ScoreSet { genuine: vec![0.1, 0.2, 0.3, 0.4], impostor: vec![0.1, 0.2, 0.3, 0.4] };
        assert_eq!(far_frr_eer(&same).unwrap().eer, 0.5);

        let mixed = ScoreSet { genuine: vec![0.1, 0.2, 0.3, 0.4], impostor: vec![0.25, 0.35, 0.45, 0.55] };
        let r = far_frr_eer(&mixed).unwrap();
        assert_eq!(r.eer, 0.25);
        assert_eq!(r.threshold, 0.3);
        assert_eq!(r.roc.len(), 8);

        let empty = ScoreSet::<f64> { genuine: vec![], impostor: vec![0.1] };
        assert_eq!(far_frr_eer(&empty), Err(Error::EmptyScores));
    }

    #[test]
    fn anchored_pairs_skip_a_leading_extra_peak() {
        let reference: [f64; 5] = [0.2, 1.0, 2.1, 3.0, 4.2];
        let candidate = [1.03, 2.1, 3.02, 4.2];
        let p = PairedSeries::anchored(&reference, &candidate).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p.reference()[0] - 1.1).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn error_metrics_are_translation_invariant(
            a in proptest::collection::vec(-10.0f64..10.0, 1..30),
            b in proptest::collection::vec(-10.0f64..10.0, 1..30),
            c in -100.0f64..100.0,
        ) {
            let p = pair(&a, &b);
            let sa: Vec<f64> = p.reference().iter().map(|v| v + c).collect();
            let sb: Vec<f64> = p.candidate().iter().map(|v| v + c).collect();
            let q = pair(&sa, &sb);
            prop_assert!((mae(&p) - mae(&q)).abs() < 1e-9);
            prop_assert!((rmse(&p) - rmse(&q)).abs() < 1e-9);
            prop_assert!(rmse(&p) + 1e-12 >= mae(&p));
        }

        #[test]
        fn pearson_is_affine_invariant(
            a in proptest::collection::vec(-10.0f64..10.0, 3..30),
            b in proptest::collection::vec(-10.0f64..10.0, 3..30),
            k in 0.1f64..10.0,
            c in -50.0f64..50.0,
        ) {
            let p = pair(&a, &b);
            if let Ok(r) = pearson(&p) {
                let mapped: Vec<f64> = p.candidate().iter().map(|v| k * v + c).collect();
                let r2 = pearson(&pair(p.reference(), &mapped)).unwrap();
                prop_assert!((r - r2).abs() < 1e-9);
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn bhr_is_symmetric(a in proptest::collection::vec(0u8..2, 1..64), b in proptest::collection::vec(0u8..2, 1..64)) {
            prop_assert_eq!(bhr(&a, &b).unwrap(), bhr(&b, &a).unwrap());
            prop_assert_eq!(bhr(&a, &a).unwrap(), 1.0);
        }

        #[test]
        fn far_frr_are_monotone(
            g in proptest::collection::vec(0.0f64..2.0, 1..20),
            i in proptest::collection::vec(0.0f64..2.0, 1..20),
        ) {
            let r = far_frr_eer(&ScoreSet { genuine: g, impostor: i }).unwrap();
            for w in r.roc.windows(2) {
                prop_assert!(w[1].far >= w[0].far);
                prop_assert!(w[1].frr <= w[0].frr);
            }
            prop_assert!((0.0..=1.0).contains(&r.eer));
        }
    }
}

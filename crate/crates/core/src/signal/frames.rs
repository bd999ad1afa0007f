use crate::error::{Error, Result};
use crate::scalar::Real;

use super::RgbTrace;

/// Raw RGB video: `frame_count` frames of `height x width x 3` interleaved bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    width: usize,
    height: usize,
    fps: f64,
    data: Vec<u8>,
}

impl FrameSequence {
    pub fn new(width: usize, height: usize, fps: f64, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!("empty frame {width}x{height}")));
        }
        if !(fps > 0.0) || !fps.is_finite() {
            return Err(Error::InvalidParameter(format!("fps must be positive, got {fps}")));
        }
        let frame_len = width * height * 3;
        if data.is_empty() || !data.len().is_multiple_of(frame_len) {
            return Err(Error::DimensionMismatch(format!(
                "{} bytes is not a positive multiple of the {frame_len}-byte frame",
                data.len()
            )));
        }
        Ok(Self { width, height, fps, data })
    }

    pub fn from_frames(width: usize, height: usize, fps: f64, frames: &[Vec<u8>]) -> Result<Self> {
        let frame_len = width * height * 3;
        if let Some(i) = frames.iter().position(|f| f.len() != frame_len) {
            return Err(Error::DimensionMismatch(format!("frame {i} has wrong size")));
        }
        Self::new(width, height, fps, frames.concat())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn frame_len(&self) -> usize {
        self.width * self.height * 3
    }

    pub fn frame_count(&self) -> usize {
        self.data.len() / self.frame_len()
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let n = self.frame_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [u8] {
        let n = self.frame_len();
        &mut self.data[t * n..(t + 1) * n]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.frame_len())
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, t: usize, y: usize, x: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        let f = self.frame(t);
        [f[i], f[i + 1], f[i + 2]]
    }
}

/// Binary region-of-interest mask, either static or one per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiMask {
    width: usize,
    height: usize,
    masks: Vec<Vec<u8>>,
}

impl RoiMask {
    pub fn new(width: usize, height: usize, masks: Vec<Vec<u8>>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::InvalidParameter("mask set is empty".into()));
        }
        for (i, m) in masks.iter().enumerate() {
            if m.len() != width * height {
                return Err(Error::DimensionMismatch(format!("mask {i} has {} pixels", m.len())));
            }
            if m.iter().any(|&v| v > 1) {
                return Err(Error::InvalidParameter(format!("mask {i} has values other than 0/1")));
            }
        }
        Ok(Self { width, height, masks })
    }

    pub fn from_static(width: usize, height: usize, mask: Vec<u8>) -> Result<Self> {
        Self::new(width, height, vec![mask])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mask = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| u8::from(f(x, y)))
            .collect();
        Self { width, height, masks: vec![mask] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_static(&self) -> bool {
        self.masks.len() == 1
    }

    pub fn mask_count(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[Vec<u8>] {
        &self.masks
    }

    /// Mask applying to frame `t`; a static mask applies to every frame.
    pub fn for_frame(&self, t: usize) -> &[u8] {
        if self.is_static() {
            &self.masks[0]
        } else {
            &self.masks[t]
        }
    }

    pub fn count(&self, t: usize) -> usize {
        self.for_frame(t).iter().filter(|&&v| v == 1).count()
    }

    /// Checks geometry against a video: same size, and one mask per frame when per-frame.
    pub fn check_matches(&self, video: &FrameSequence) -> Result<()> {
        if self.width != video.width() || self.height != video.height() {
            return Err(Error::DimensionMismatch(format!(
                "mask {}x{} vs video {}x{}",
                self.width,
                self.height,
                video.width(),
                video.height()
            )));
        }
        if !self.is_static() && self.masks.len() != video.frame_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} masks for {} frames",
                self.masks.len(),
                video.frame_count()
            )));
        }
        Ok(())
    }
}

/// Mean (R, G, B) over the masked pixels of every frame.
pub fn mean_rgb<T: Real>(frames: &FrameSequence, mask: &RoiMask) -> Result<RgbTrace<T>> {
    mask.check_matches(frames)?;
    let mut samples = Vec::with_capacity(frames.frame_count());
    for (t, frame) in frames.frames().enumerate() {
        let m = mask.for_frame(t);
        let mut sum = [0u64; 3];
        let mut count = 0u64;
        for (px, &sel) in frame.chunks_exact(3).zip(m) {
            if sel == 1 {
                sum[0] += u64::from(px[0]);
                sum[1] += u64::from(px[1]);
                sum[2] += u64::from(px[2]);
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptyMask { frame: t });
        }
        let n = count as f64;
        samples.push([
            T::lit(sum[0] as f64 / n),
            T::lit(sum[1] as f64 / n),
            T::lit(sum[2] as f64 / n),
        ]);
    }
    RgbTrace::new(samples, T::lit(frames.fps()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solid(w: usize, h: usize, n: usize, px: [u8; 3]) -> FrameSequence {
        let data = (0..w * h * n).flat_map(|_| px).collect();
        FrameSequence::new(w, h, 30.0, data).unwrap()
    }

    #[test]
    fn constant_field_gives_constant_trace() {
        let v = solid(3, 2, 2, [10, 20, 30]);
        let m = RoiMask::from_fn(3, 2, |_, _| true);
        let tr = mean_rgb::<f64>(&v, &m).unwrap();
        assert_eq!(tr.samples(), &[[10.0, 20.0, 30.0], [10.0, 20.0, 30.0]]);
    }

    #[test]
    fn half_black_half_grey() {
        let data = [[0u8; 3], [0; 3], [100; 3], [100; 3]].concat();
        let v = FrameSequence::new(2, 2, 30.0, data).unwrap();
        let m = RoiMask::from_fn(2, 2, |_, _| true);
        assert_eq!(mean_rgb::<f64>(&v, &m).unwrap().samples(), &[[50.0, 50.0, 50.0]]);
    }

    #[test]
    fn left_column_mask() {
        let data = [[10u8, 0, 0], [30, 0, 0], [50, 0, 0], [70, 0, 0]].concat();
        let v = FrameSequence::new(2, 2, 30.0, data).unwrap();
        let m = RoiMask::from_fn(2, 2, |x, _| x == 0);
        // direct average of the selected pixels (10 and 50)
        let expected = (10.0 + 50.0) / 2.0;
        assert_eq!(mean_rgb::<f64>(&v, &m).unwrap().samples(), &[[expected, 0.0, 0.0]]);
    }

    #[test]
    fn empty_mask_and_mismatch() {
        let v = solid(2, 2, 1, [1, 1, 1]);
        let empty = RoiMask::from_fn(2, 2, |_, _| false);
        assert_eq!(mean_rgb::<f64>(&v, &empty), Err(Error::EmptyMask { frame: 0 }));
        let wrong = RoiMask::from_fn(3, 2, |_, _| true);
        assert!(matches!(mean_rgb::<f64>(&v, &wrong), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn per_frame_masks_are_used() {
        let data = [[10u8, 0, 0], [30, 0, 0], [10, 0, 0], [30, 0, 0]].concat();
        let v = FrameSequence::new(2, 1, 30.0, data).unwrap();
        let m = RoiMask::new(2, 1, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let tr = mean_rgb::<f64>(&v, &m).unwrap();
        assert_eq!(tr.channel(0), vec![10.0, 30.0]);
    }

    proptest! {
        #[test]
        fn unmasked_pixels_do_not_matter(
            pixels in proptest::collection::vec(any::<u8>(), 4 * 4 * 3 * 2),
            other in proptest::collection::vec(any::<u8>(), 4 * 4 * 3 * 2),
            sel in proptest::collection::vec(0u8..2, 16),
        ) {
            prop_assume!(sel.contains(&1));
            let mask = RoiMask::from_static(4, 4, sel.clone()).unwrap();
            let a = FrameSequence::new(4, 4, 30.0, pixels.clone()).unwrap();
            let mixed: Vec<u8> = pixels
                .chunks_exact(3)
                .zip(other.chunks_exact(3))
                .enumerate()
                .flat_map(|(i, (p, o))| if sel[i % 16] == 1 { p.to_vec() } else { o.to_vec() })
                .collect();
            let b = FrameSequence::new(4, 4, 30.0, mixed).unwrap();
            prop_assert_eq!(mean_rgb::<f64>(&a, &mask).unwrap(), mean_rgb::<f64>(&b, &mask).unwrap());
        }
    }
}

//! Colour statistics: the 13-entry appearance label vector.
//!
//! A block's colour diversity is the temporal IoU of its per-frame channel
//! histograms, averaged over R, G and B. Low IoU means high diversity. The
//! dominant colour is the most populated octant of the RGB cube, counted over all
//! frames of a block.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::partition::{PatternSet, RegionMap};
use crate::videoio::{Clip, Rgb};

pub const DEFAULT_BINS: usize = 16;
pub const COLOR_OCTANTS: usize = 8;
pub const APPEARANCE_LABEL_COUNT: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    R = 0,
    G = 1,
    B = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelHistogram {
    pub channel: Channel,
    pub bins: Vec<u32>,
    pub pixel_total: u32,
}

#[inline]
pub fn value_bin(value: u8, bins: usize) -> usize {
    usize::from(value) * bins / 256
}

fn check_bins(bins: usize) -> Result<()> {
    if bins == 0 || bins > 256 {
        return Err(Error::InvalidParam(format!(
            "histogram bins {bins} outside 1..=256"
        )));
    }
    Ok(())
}

/// Histogram of one channel over one region of one frame.
pub fn block_channel_histogram(
    clip: &Clip,
    map: &RegionMap,
    region: usize,
    frame: usize,
    channel: Channel,
    bins: usize,
) -> Result<ChannelHistogram> {
    check_bins(bins)?;
    let f = clip
        .frames()
        .get(frame)
        .ok_or_else(|| Error::Range(format!("frame {frame} outside 0..{}", clip.len())))?;
    let pixels = map.region_pixels(region)?;
    let bytes = f.as_bytes();
    let mut hist = vec![0u32; bins];
    for &i in &pixels {
        hist[value_bin(bytes[i * 3 + channel as usize], bins)] += 1;
    }
    Ok(ChannelHistogram {
        channel,
        bins: hist,
        pixel_total: pixels.len() as u32,
    })
}

/// `sum_b min_i h_i[b] / sum_b max_i h_i[b]` over a temporal stack of histograms.
pub fn temporal_iou(histograms: &[ChannelHistogram]) -> Result<f64> {
    let first = histograms
        .first()
        .ok_or_else(|| Error::InvalidParam("temporal IoU needs histograms".into()))?;
    if histograms.len() < 2 {
        return Err(Error::InvalidParam(
            "temporal IoU needs at least 2 frames".into(),
        ));
    }
    if first.pixel_total == 0 {
        return Err(Error::InvalidParam("histograms are empty".into()));
    }
    for h in histograms {
        if h.bins.len() != first.bins.len() || h.pixel_total != first.pixel_total {
            return Err(Error::InvalidParam(
                "histograms differ in bin count or pixel total".into(),
            ));
        }
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for b in 0..first.bins.len() {
        let column = histograms.iter().map(|h| h.bins[b]);
        inter += u64::from(column.clone().min().unwrap_or(0));
        union += u64::from(column.max().unwrap_or(0));
    }
    Ok(inter as f64 / union as f64)
}

/// Per-region `[R, G, B]` channel histograms for every frame:
/// `out[region][channel][frame * bins + bin]`.
fn region_histograms(clip: &Clip, map: &RegionMap, bins: usize) -> Vec<[Vec<u32>; 3]> {
    let n = clip.len();
    let mut out: Vec<[Vec<u32>; 3]> = (0..map.region_count())
        .map(|_| std::array::from_fn(|_| vec![0u32; n * bins]))
        .collect();
    for (t, frame) in clip.frames().iter().enumerate() {
        for (r, px) in map.regions().zip(frame.as_bytes().chunks_exact(3)) {
            for c in 0..3 {
                out[r][c][t * bins + value_bin(px[c], bins)] += 1;
            }
        }
    }
    out
}

fn stack_iou(stack: &[u32], frames: usize, bins: usize) -> f64 {
    let (mut inter, mut union) = (0u64, 0u64);
    for b in 0..bins {
        let column = (0..frames).map(|t| stack[t * bins + b]);
        inter += u64::from(column.clone().min().unwrap_or(0));
        union += u64::from(column.max().unwrap_or(0));
    }
    inter as f64 / union as f64
}

/// `[R-IoU, G-IoU, B-IoU, mean]` for every region of `map`.
pub fn region_diversity(clip: &Clip, map: &RegionMap, bins: usize) -> Result<Vec<[f64; 4]>> {
    check_bins(bins)?;
    check_size(clip, map)?;
    let n = clip.len();
    Ok(region_histograms(clip, map, bins)
        .iter()
        .map(|chans| {
            let r = stack_iou(&chans[0], n, bins);
            let g = stack_iou(&chans[1], n, bins);
            let b = stack_iou(&chans[2], n, bins);
            [r, g, b, (r + g + b) / 3.0]
        })
        .collect())
}

/// Mean channel IoU of one region; 1.0 for a static block.
pub fn block_diversity_score(
    clip: &Clip,
    map: &RegionMap,
    region: usize,
    bins: usize,
) -> Result<f64> {
    let mut sum = 0.0;
    for channel in Channel::ALL {
        let stack = (0..clip.len())
            .map(|t| block_channel_histogram(clip, map, region, t, channel, bins))
            .collect::<Result<Vec<_>>>()?;
        sum += temporal_iou(&stack)?;
    }
    Ok(sum / 3.0)
}

/// `(p_d, p_s)`: the lowest-score and highest-score regions.
pub fn extreme_diversity_blocks(scores: &[f64]) -> Result<(usize, usize)> {
    if scores.is_empty() {
        return Err(Error::InvalidParam("no region scores".into()));
    }
    let (mut lo, mut hi) = (0, 0);
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[lo] {
            lo = i;
        }
        if s > scores[hi] {
            hi = i;
        }
    }
    Ok((lo, hi))
}

/// `4 * [R >= 128] + 2 * [G >= 128] + [B >= 128]`
#[inline]
pub fn color_octant(rgb: Rgb) -> usize {
    (usize::from(rgb[0] >= 128) << 2)
        | (usize::from(rgb[1] >= 128) << 1)
        | usize::from(rgb[2] >= 128)
}

/// Most populated octant of a pixel multiset.
pub fn dominant_color(pixels: impl IntoIterator<Item = Rgb>) -> Result<usize> {
    let mut counts = [0u64; COLOR_OCTANTS];
    for p in pixels {
        counts[color_octant(p)] += 1;
    }
    argmax_counts(&counts)
}

fn argmax_counts(counts: &[u64; COLOR_OCTANTS]) -> Result<usize> {
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::InvalidParam(
            "dominant colour of an empty pixel set".into(),
        ));
    }
    Ok((1..COLOR_OCTANTS).fold(0, |best, i| if counts[i] > counts[best] { i } else { best }))
}

/// Dominant octant of a region over every frame of the clip.
pub fn block_dominant_color(clip: &Clip, map: &RegionMap, region: usize) -> Result<usize> {
    check_size(clip, map)?;
    let pixels = map.region_pixels(region)?;
    dominant_color(clip.frames().iter().flat_map(|f| {
        pixels
            .iter()
            .map(move |&i| f.pixel(i % f.width(), i / f.width()))
    }))
}

fn check_size(clip: &Clip, map: &RegionMap) -> Result<()> {
    if (clip.width(), clip.height()) != (map.width, map.height) {
        return Err(Error::DimensionMismatch {
            expected_w: clip.width(),
            expected_h: clip.height(),
            got_w: map.width,
            got_h: map.height,
            context: format!("{} region map", map.pattern.name()),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PatternAppearance {
    pub diverse_location: usize,
    pub diverse_color: usize,
    pub stable_location: usize,
    pub stable_color: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AppearanceLabels {
    /// Grid4x4, Rings4, Wedges8, in that order.
    pub patterns: [PatternAppearance; 3],
    pub global_color: usize,
}

impl AppearanceLabels {
    /// `[p1: p_d, c_d, p_s, c_s, p2: .., p3: .., c_g]`
    pub fn to_array(&self) -> [u32; APPEARANCE_LABEL_COUNT] {
        let mut out = [0u32; APPEARANCE_LABEL_COUNT];
        for (p, a) in self.patterns.iter().enumerate() {
            out[4 * p] = a.diverse_location as u32;
            out[4 * p + 1] = a.diverse_color as u32;
            out[4 * p + 2] = a.stable_location as u32;
            out[4 * p + 3] = a.stable_color as u32;
        }
        out[12] = self.global_color as u32;
        out
    }

    pub fn from_array(a: &[u32; APPEARANCE_LABEL_COUNT]) -> Self {
        let mut patterns = [PatternAppearance::default(); 3];
        for (p, slot) in patterns.iter_mut().enumerate() {
            *slot = PatternAppearance {
                diverse_location: a[4 * p] as usize,
                diverse_color: a[4 * p + 1] as usize,
                stable_location: a[4 * p + 2] as usize,
                stable_color: a[4 * p + 3] as usize,
            };
        }
        AppearanceLabels {
            patterns,
            global_color: a[12] as usize,
        }
    }
}

/// Computes the full appearance label vector of a clip.
pub fn appearance_labels(
    clip: &Clip,
    patterns: &PatternSet,
    bins: usize,
) -> Result<AppearanceLabels> {
    let mut labels = AppearanceLabels::default();
    for (slot, map) in labels.patterns.iter_mut().zip(&patterns.maps) {
        let scores: Vec<f64> = region_diversity(clip, map, bins)?
            .iter()
            .map(|s| s[3])
            .collect();
        let (diverse, stable) = extreme_diversity_blocks(&scores)?;

        let mut octants = vec![[0u64; COLOR_OCTANTS]; map.region_count()];
        for frame in clip.frames() {
            for (r, px) in map.regions().zip(frame.as_bytes().chunks_exact(3)) {
                octants[r][color_octant([px[0], px[1], px[2]])] += 1;
            }
        }
        *slot = PatternAppearance {
            diverse_location: diverse,
            diverse_color: argmax_counts(&octants[diverse])?,
            stable_location: stable,
            stable_color: argmax_counts(&octants[stable])?,
        };
    }
    labels.global_color = dominant_color(clip.frames().iter().flat_map(|f| f.pixels()))?;
    Ok(labels)
}

/// CSV of per-region scores: `region,r_iou,g_iou,b_iou,mean`.
pub fn diversity_csv(scores: &[[f64; 4]]) -> String {
    let mut out = String::from("region,r_iou,g_iou,b_iou,mean\n");
    for (i, s) in scores.iter().enumerate() {
        let _ = writeln!(out, "{i},{:.6},{:.6},{:.6},{:.6}", s[0], s[1], s[2], s[3]);
    }
    out
}

pub fn write_diversity_csv(path: &Path, scores: &[[f64; 4]]) -> Result<()> {
    std::fs::write(path, diversity_csv(scores)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{region_map, PatternId};
    use crate::videoio::Frame;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solid_clip(colors: &[Rgb], w: usize, h: usize) -> Clip {
        Clip::new(
            colors
                .iter()
                .map(|&c| Frame::filled(w, h, c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn random_clip(rng: &mut ChaCha8Rng, n: usize, w: usize, h: usize) -> Clip {
        let palette: Vec<Rgb> = (0..4).map(|_| rng.random()).collect();
        Clip::new(
            (0..n)
                .map(|_| {
                    let px = (0..w * h)
                        .flat_map(|_| palette[rng.random_range(0..4)])
                        .collect();
                    Frame::new(w, h, px).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn histogram_binning() {
        assert_eq!(value_bin(128, 16), 8);
        assert_eq!(value_bin(255, 16), 15);
        assert_eq!(value_bin(0, 16), 0);
        let clip = solid_clip(&[[255; 3], [255; 3]], 8, 8);
        let map = region_map(PatternId::Grid4x4, 8, 8).unwrap();
        let h = block_channel_histogram(&clip, &map, 5, 1, Channel::G, 16).unwrap();
        assert_eq!(h.bins[15], 4);
        assert_eq!(h.bins.iter().sum::<u32>(), h.pixel_total);
        assert!(block_channel_histogram(&clip, &map, 5, 2, Channel::G, 16).is_err());
    }

    #[test]
    fn histogram_matches_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let clip = random_clip(&mut rng, 3, 13, 11);
        let map = region_map(PatternId::Wedges8, 11, 13).unwrap();
        for region in 0..8 {
            for bins in [1, 5, 16, 256] {
                let h = block_channel_histogram(&clip, &map, region, 2, Channel::B, bins).unwrap();
                for b in 0..bins {
                    let mut count = 0;
                    for y in 0..11 {
                        for x in 0..13 {
                            let v = clip.frames()[2].pixel(x, y)[2] as usize;
                            if map.region_at(x, y) == region && v * bins / 256 == b {
                                count += 1;
                            }
                        }
                    }
                    assert_eq!(h.bins[b], count);
                }
            }
        }
    }

    fn hist(bins: Vec<u32>) -> ChannelHistogram {
        let total = bins.iter().sum();
        ChannelHistogram {
            channel: Channel::R,
            bins,
            pixel_total: total,
        }
    }

    #[test]
    fn iou_extremes_and_errors() {
        let a = hist(vec![3, 1, 0, 0]);
        assert_eq!(
            temporal_iou(&[a.clone(), a.clone(), a.clone()]).unwrap(),
            1.0
        );
        assert_eq!(
            temporal_iou(&[a.clone(), hist(vec![0, 0, 2, 2])]).unwrap(),
            0.0
        );
        assert!(temporal_iou(std::slice::from_ref(&a)).is_err());
        assert!(temporal_iou(&[a.clone(), hist(vec![1, 1, 1])]).is_err());
        assert!(temporal_iou(&[a, hist(vec![1, 1, 1, 0])]).is_err());
    }

    #[test]
    fn iou_matches_min_max_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (n, bins, total) = (rng.random_range(2..6), rng.random_range(1..12), 50u32);
            let stack: Vec<ChannelHistogram> = (0..n)
                .map(|_| {
                    let mut b = vec![0u32; bins];
                    for _ in 0..total {
                        b[rng.random_range(0..bins)] += 1;
                    }
                    hist(b)
                })
                .collect();
            let (mut num, mut den) = (0.0, 0.0);
            for b in 0..bins {
                num += stack.iter().map(|h| h.bins[b]).min().unwrap() as f64;
                den += stack.iter().map(|h| h.bins[b]).max().unwrap() as f64;
            }
            let iou = temporal_iou(&stack).unwrap();
            assert!((iou - num / den).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&iou));
        }
    }

    #[test]
    fn diversity_scores() {
        let map = region_map(PatternId::Grid4x4, 8, 8).unwrap();
        let stat = solid_clip(&[[10, 20, 30]; 4], 8, 8);
        assert_eq!(block_diversity_score(&stat, &map, 3, 16).unwrap(), 1.0);
        let alt = solid_clip(&[[255, 0, 0], [0, 0, 255], [255, 0, 0]], 8, 8);
        let s = block_diversity_score(&alt, &map, 3, 16).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(region_diversity(&alt, &map, 16).unwrap()[3][3], s);
    }

    #[test]
    fn region_diversity_matches_operation_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let clip = random_clip(&mut rng, 4, 16, 12);
        for p in PatternId::ALL {
            let map = region_map(p, 12, 16).unwrap();
            let fast = region_diversity(&clip, &map, 16).unwrap();
            for r in 0..map.region_count() {
                let slow = block_diversity_score(&clip, &map, r, 16).unwrap();
                assert!((fast[r][3] - slow).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn extreme_blocks_tie_low() {
        assert_eq!(extreme_diversity_blocks(&[1.0, 1.0, 1.0]).unwrap(), (0, 0));
        assert_eq!(
            extreme_diversity_blocks(&[0.5, 0.2, 0.9, 0.2, 0.9]).unwrap(),
            (1, 2)
        );
        assert!(extreme_diversity_blocks(&[]).is_err());
    }

    #[test]
    fn octants() {
        assert_eq!(color_octant([0, 0, 255]), 1);
        assert_eq!(color_octant([255, 255, 255]), 7);
        assert_eq!(color_octant([255, 255, 0]), 6);
        assert_eq!(color_octant([127, 128, 127]), 2);
        assert_eq!(dominant_color(vec![[0, 0, 255]; 3]).unwrap(), 1);
        assert_eq!(dominant_color(vec![[0, 0, 255], [255, 0, 0]]).unwrap(), 1);
        assert!(dominant_color(Vec::<Rgb>::new()).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let px: Vec<Rgb> = (0..500).map(|_| rng.random()).collect();
        let mut counts = [0; 8];
        for p in &px {
            let o = if p[0] > 127 { 4 } else { 0 }
                + if p[1] > 127 { 2 } else { 0 }
                + if p[2] > 127 { 1 } else { 0 };
            counts[o] += 1;
        }
        let best = (0..8).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        assert_eq!(dominant_color(px).unwrap(), best);
    }

    #[test]
    fn white_static_clip() {
        let clip = solid_clip(&[[255; 3]; 3], 16, 16);
        let labels = appearance_labels(&clip, &PatternSet::new(16, 16).unwrap(), 16).unwrap();
        assert_eq!(labels.to_array(), [0, 7, 0, 7, 0, 7, 0, 7, 0, 7, 0, 7, 7]);
        assert_eq!(AppearanceLabels::from_array(&labels.to_array()), labels);
    }

    #[test]
    fn csv_layout() {
        let csv = diversity_csv(&[[1.0, 0.5, 0.25, 0.583333333]]);
        assert_eq!(
            csv,
            "region,r_iou,g_iou,b_iou,mean\n0,1.000000,0.500000,0.250000,0.583333\n"
        );
    }
}

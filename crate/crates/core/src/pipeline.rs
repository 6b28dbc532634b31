//! End-to-end extraction: decode, preprocess, flow, labels, export.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::appearancestats::{
    appearance_labels, APPEARANCE_LABEL_COUNT, COLOR_OCTANTS, DEFAULT_BINS,
};
use crate::error::{Error, Result};
use crate::flowcore::flo::read_flo;
use crate::flowcore::{
    clip_flows, FlowField, FlowParams, FlowProvider, InjectedProvider, VariationalProvider,
};
use crate::motionstats::{motion_labels, MOTION_LABEL_COUNT, ORIENTATION_BINS};
use crate::parallel::{ordered_map, Workers};
use crate::partition::{PatternId, PatternSet};
use crate::videoio::{
    center_crop, clip_offsets, extract_clips, load_source, random_crop, resize_bilinear, Clip,
    SourceFormat,
};

/// Bumped whenever a labelling convention changes: angle reference, bin edges,
/// tie-breaking, pattern geometry or label layout.
pub const CONVENTIONS_VERSION: &str = "vidstats-labels/1";

pub const LABEL_COUNT: usize = MOTION_LABEL_COUNT + APPEARANCE_LABEL_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resize {
    None,
    To { width: usize, height: usize },
}

impl std::str::FromStr for Resize {
    type Err = Error;

    /// `none` or `WIDTHxHEIGHT`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Resize::None);
        }
        let bad = || Error::InvalidParam(format!("resize must be WxH or none, got {s:?}"));
        let (w, h) = s.split_once('x').ok_or_else(bad)?;
        let width: usize = w.parse().map_err(|_| bad())?;
        let height: usize = h.parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        Ok(Resize::To { width, height })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CropMode {
    Center,
    None,
    /// Uniformly random window per clip; requires a seed.
    Random,
}

impl std::str::FromStr for CropMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(CropMode::Center),
            "none" => Ok(CropMode::None),
            "random" => Ok(CropMode::Random),
            other => Err(Error::InvalidParam(format!("unknown crop mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowSource {
    Variational,
    /// Precomputed `.flo` files next to the source.
    Injected,
}

impl std::str::FromStr for FlowSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variational" => Ok(FlowSource::Variational),
            "injected" => Ok(FlowSource::Injected),
            other => Err(Error::InvalidParam(format!(
                "unknown flow source {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub clip_len: usize,
    pub stride: usize,
    pub resize: Resize,
    pub crop: CropMode,
    /// (height, width) of the crop window.
    pub crop_size: (usize, usize),
    pub flow: FlowSource,
    pub flow_params: FlowParams,
    pub bins: usize,
    pub normalize: bool,
    pub seed: Option<u64>,
    pub workers: Workers,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            clip_len: 16,
            stride: 16,
            resize: Resize::To {
                width: 171,
                height: 128,
            },
            crop: CropMode::Center,
            crop_size: (112, 112),
            flow: FlowSource::Variational,
            flow_params: FlowParams::default(),
            bins: DEFAULT_BINS,
            normalize: false,
            seed: None,
            workers: Workers::Auto,
        }
    }
}

impl RunConfig {
    /// Rejects configurations that can never produce labels.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.clip_len < 2 {
            return bad(format!("clip length must be >= 2, got {}", self.clip_len));
        }
        if self.stride == 0 {
            return bad("stride must be >= 1".into());
        }
        if self.bins == 0 || self.bins > 256 {
            return bad(format!(
                "histogram bins must lie in 1..=256, got {}",
                self.bins
            ));
        }
        if self.crop == CropMode::Random && self.seed.is_none() {
            return bad("random crop needs an explicit seed".into());
        }
        if self.flow == FlowSource::Injected
            && (self.resize != Resize::None || self.crop != CropMode::None)
        {
            return bad("injected flows are only valid with --resize none --crop none".into());
        }
        self.flow_params.validate()
    }

    /// Hash over everything that changes the meaning of a label value.
    pub fn params_digest(&self) -> String {
        #[derive(Serialize)]
        struct Digested<'a> {
            flow_params: &'a FlowParams,
            flow: FlowSource,
            bins: usize,
            conventions: &'static str,
        }
        let json = serde_json::to_vec(&Digested {
            flow_params: &self.flow_params,
            flow: self.flow,
            bins: self.bins,
            conventions: CONVENTIONS_VERSION,
        })
        .expect("digest input serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub path: PathBuf,
    pub format: SourceFormat,
}

/// One labelled clip. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub clip_id: String,
    pub source: String,
    /// Half-open frame interval `[start, end)` within the decoded source.
    pub frame_range: [usize; 2],
    pub pattern_set: Vec<String>,
    pub motion: [u32; MOTION_LABEL_COUNT],
    pub appearance: [u32; APPEARANCE_LABEL_COUNT],
    pub params_digest: String,
    pub conventions_version: String,
    /// Flows came from an exact, externally supplied source rather than the solver.
    pub analytic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Vec<f64>>,
}

impl LabelRecord {
    pub fn clip_len(&self) -> usize {
        self.frame_range[1] - self.frame_range[0]
    }

    /// The 27 labels in export order: motion first, then appearance.
    pub fn labels(&self) -> [u32; LABEL_COUNT] {
        let mut out = [0; LABEL_COUNT];
        out[..MOTION_LABEL_COUNT].copy_from_slice(&self.motion);
        out[MOTION_LABEL_COUNT..].copy_from_slice(&self.appearance);
        out
    }
}

/// Column names of the 27 labels, in export order.
pub fn label_names() -> Vec<String> {
    let mut names = Vec::with_capacity(LABEL_COUNT);
    for p in PatternId::ALL {
        for part in ["u_location", "u_orientation", "v_location", "v_orientation"] {
            names.push(format!("{}_{part}", p.name()));
        }
    }
    names.push("global_u_pair".into());
    names.push("global_v_pair".into());
    for p in PatternId::ALL {
        for part in [
            "diverse_location",
            "diverse_color",
            "stable_location",
            "stable_color",
        ] {
            names.push(format!("{}_{part}", p.name()));
        }
    }
    names.push("global_color".into());
    names
}

/// Largest admissible value of every label for clips of `n` frames.
pub fn label_maxima(n: usize) -> [u32; LABEL_COUNT] {
    let mut out = [0u32; LABEL_COUNT];
    let octant_max = (COLOR_OCTANTS - 1) as u32;
    for (p, pattern) in PatternId::ALL.into_iter().enumerate() {
        let loc = (pattern.region_count() - 1) as u32;
        let ori = (ORIENTATION_BINS - 1) as u32;
        out[4 * p..4 * p + 4].copy_from_slice(&[loc, ori, loc, ori]);
        let a = MOTION_LABEL_COUNT + 4 * p;
        out[a..a + 4].copy_from_slice(&[loc, octant_max, loc, octant_max]);
    }
    let pair_max = n.saturating_sub(2) as u32;
    out[12] = pair_max;
    out[13] = pair_max;
    out[LABEL_COUNT - 1] = octant_max;
    out
}

/// Scales every label by its range so the values lie in [0, 1]. A label whose
/// range holds a single value maps to 0.
pub fn normalize_labels(record: &LabelRecord) -> Vec<f64> {
    let maxima = label_maxima(record.clip_len());
    record
        .labels()
        .iter()
        .zip(maxima)
        .map(|(&v, m)| {
            if m == 0 {
                0.0
            } else {
                f64::from(v) / f64::from(m)
            }
        })
        .collect()
}

/// Inverse of [`normalize_labels`] by multiplying back and rounding.
pub fn denormalize_labels(values: &[f64], clip_len: usize) -> Result<[u32; LABEL_COUNT]> {
    if values.len() != LABEL_COUNT {
        return Err(Error::Format(format!(
            "expected {LABEL_COUNT} normalized labels, got {}",
            values.len()
        )));
    }
    let maxima = label_maxima(clip_len);
    let mut out = [0; LABEL_COUNT];
    for ((o, &v), m) in out.iter_mut().zip(values).zip(maxima) {
        *o = (v * f64::from(m)).round() as u32;
    }
    Ok(out)
}

/// Computes both label vectors of one clip from its flows.
pub fn label_clip(
    clip: &Clip,
    flows: &[FlowField],
    bins: usize,
) -> Result<([u32; MOTION_LABEL_COUNT], [u32; APPEARANCE_LABEL_COUNT])> {
    let patterns = PatternSet::new(clip.height(), clip.width())?;
    let motion = motion_labels(flows, &patterns)?.to_array();
    let appearance = appearance_labels(clip, &patterns, bins)?.to_array();
    Ok((motion, appearance))
}

/// Where precomputed flows of a source live: `<dir>/flows/` for frame
/// directories, `<file>.flows/` otherwise.
pub fn injected_flow_dir(source: &Source) -> PathBuf {
    match source.format {
        SourceFormat::Frames => source.path.join("flows"),
        _ => {
            let mut s = source.path.clone().into_os_string();
            s.push(".flows");
            PathBuf::from(s)
        }
    }
}

/// Loads every `.flo` file of a directory in lexicographic order; the i-th file is
/// the flow from frame i to frame i + 1.
pub fn load_flow_dir(dir: &Path) -> Result<Vec<FlowField>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "flo") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::EmptyInput(dir.to_path_buf()));
    }
    paths.iter().map(|p| read_flo(p)).collect()
}

/// Decodes a source and cuts it into preprocessed clips, with their frame offsets.
pub fn prepare_clips(
    source: &Source,
    config: &RunConfig,
    source_index: usize,
) -> Result<Vec<(usize, Clip)>> {
    let mut frames = load_source(&source.path, source.format)?;
    if let Resize::To { width, height } = config.resize {
        frames = frames
            .iter()
            .map(|f| resize_bilinear(f, height, width))
            .collect::<Result<_>>()?;
    }
    let offsets = clip_offsets(frames.len(), config.clip_len, config.stride);
    let clips = extract_clips(&frames, config.clip_len, config.stride)?;
    let (ch, cw) = config.crop_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0) ^ source_index as u64);
    offsets
        .into_iter()
        .zip(clips)
        .map(|(offset, clip)| {
            let clip = match config.crop {
                CropMode::None => clip,
                CropMode::Center => center_crop(&clip, ch, cw)?,
                CropMode::Random => random_crop(&clip, ch, cw, &mut rng)?,
            };
            Ok((offset, clip))
        })
        .collect()
}

fn source_name(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug)]
pub struct SourceFailure {
    pub source: PathBuf,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct Extraction {
    pub records: Vec<LabelRecord>,
    pub failures: Vec<SourceFailure>,
}

struct Job<'a> {
    source: usize,
    offset: usize,
    clip: &'a Clip,
    flows: Option<&'a [FlowField]>,
}

/// Labels every clip of every source. Records come out in (source, offset) order
/// regardless of the worker count; a source that fails anywhere contributes no
/// records and is reported instead.
pub fn run_extraction(config: &RunConfig, sources: &[Source]) -> Result<Extraction> {
    config.validate()?;
    let digest = config.params_digest();
    let mut out = Extraction::default();

    let mut prepared = Vec::with_capacity(sources.len());
    for (i, source) in sources.iter().enumerate() {
        let loaded = prepare_clips(source, config, i).and_then(|clips| {
            let flows = match config.flow {
                FlowSource::Injected => Some(load_flow_dir(&injected_flow_dir(source))?),
                FlowSource::Variational => None,
            };
            Ok((clips, flows))
        });
        prepared.push(loaded);
    }

    let mut jobs = Vec::new();
    let mut failed: Vec<Option<Error>> = sources.iter().map(|_| None).collect();
    for (i, loaded) in prepared.iter().enumerate() {
        if let Ok((clips, flows)) = loaded {
            for (offset, clip) in clips {
                let flows = match flows {
                    Some(all) => {
                        let wanted = offset + config.clip_len - 1;
                        if all.len() < wanted {
                            failed[i] = Some(Error::Range(format!(
                                "{} injected flows cannot cover frames {offset}..{}",
                                all.len(),
                                offset + config.clip_len
                            )));
                            break;
                        }
                        Some(&all[*offset..wanted])
                    }
                    None => None,
                };
                jobs.push(Job {
                    source: i,
                    offset: *offset,
                    clip,
                    flows,
                });
            }
        }
    }

    // parallelise across clips when there are several, across frame pairs otherwise
    let inner = if jobs.len() > 1 {
        Workers::Serial
    } else {
        config.workers
    };
    let variational = VariationalProvider {
        params: config.flow_params.clone(),
    };
    let results = ordered_map(&jobs, config.workers, |_, job| {
        let flows = match job.flows {
            Some(f) => {
                let provider = InjectedProvider { flows: f.to_vec() };
                clip_flows(job.clip, &provider as &dyn FlowProvider, inner)?
            }
            None => clip_flows(job.clip, &variational, inner)?,
        };
        label_clip(job.clip, &flows, config.bins)
    });

    let mut per_source: Vec<Vec<LabelRecord>> = vec![Vec::new(); sources.len()];
    for (job, result) in jobs.iter().zip(results) {
        if failed[job.source].is_some() {
            continue;
        }
        match result {
            Ok((motion, appearance)) => {
                let source = &sources[job.source];
                let mut record = LabelRecord {
                    clip_id: format!("{}@{}", source_name(&source.path), job.offset),
                    source: source.path.display().to_string(),
                    frame_range: [job.offset, job.offset + config.clip_len],
                    pattern_set: PatternId::ALL
                        .iter()
                        .map(|p| p.name().to_string())
                        .collect(),
                    motion,
                    appearance,
                    params_digest: digest.clone(),
                    conventions_version: CONVENTIONS_VERSION.to_string(),
                    analytic: job.flows.is_some(),
                    normalized: None,
                };
                if config.normalize {
                    record.normalized = Some(normalize_labels(&record));
                }
                per_source[job.source].push(record);
            }
            Err(e) => failed[job.source] = Some(e),
        }
    }

    for (i, (loaded, records)) in prepared.into_iter().zip(per_source).enumerate() {
        let error = match loaded {
            Err(e) => Some(e),
            Ok(_) => failed[i].take(),
        };
        match error {
            Some(error) => out.failures.push(SourceFailure {
                source: sources[i].path.clone(),
                error,
            }),
            None => out.records.extend(records),
        }
    }
    Ok(out)
}

/// One JSON object per line, keys in declaration order.
pub fn write_jsonl<W: Write>(mut w: W, records: &[LabelRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// `clip_id` followed by the 27 label columns of [`label_names`].
pub fn write_csv<W: Write>(mut w: W, records: &[LabelRecord]) -> std::io::Result<()> {
    writeln!(w, "clip_id,{}", label_names().join(","))?;
    for r in records {
        let values: Vec<String> = r.labels().iter().map(u32::to_string).collect();
        writeln!(w, "{},{}", r.clip_id, values.join(","))?;
    }
    w.flush()
}

pub fn read_jsonl(text: &str) -> Result<Vec<LabelRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::videoio::raw::write_raw;
    use crate::videoio::Frame;

    fn textured_frames(n: usize, w: usize, h: usize) -> Vec<Frame> {
        (0..n)
            .map(|t| {
                let px = (0..w * h)
                    .flat_map(|i| {
                        let (x, y) = (i % w, i / w);
                        [
                            ((x * 7 + t * 3) % 256) as u8,
                            ((y * 5) % 256) as u8,
                            ((x * y + t) % 256) as u8,
                        ]
                    })
                    .collect();
                Frame::new(w, h, px).unwrap()
            })
            .collect()
    }

    #[test]
    fn parse_cli_values() {
        assert_eq!(
            "171x128".parse::<Resize>().unwrap(),
            Resize::To {
                width: 171,
                height: 128
            }
        );
        assert_eq!("none".parse::<Resize>().unwrap(), Resize::None);
        assert!("171".parse::<Resize>().is_err());
        assert!("0x5".parse::<Resize>().is_err());
        assert_eq!("random".parse::<CropMode>().unwrap(), CropMode::Random);
        assert!("injected".parse::<FlowSource>().is_ok());
    }

    #[test]
    fn config_validation() {
        RunConfig::default().validate().unwrap();
        let mut c = RunConfig {
            crop: CropMode::Random,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.seed = Some(3);
        c.validate().unwrap();
        let injected = RunConfig {
            flow: FlowSource::Injected,
            ..Default::default()
        };
        assert!(injected.validate().is_err());
        let ok = RunConfig {
            flow: FlowSource::Injected,
            resize: Resize::None,
            crop: CropMode::None,
            ..Default::default()
        };
        ok.validate().unwrap();
    }

    #[test]
    fn digest_tracks_convention_parameters() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.params_digest(), b.params_digest());
        b.bins = 8;
        assert_ne!(a.params_digest(), b.params_digest());
        let mut c = a.clone();
        c.flow_params.alpha *= 2.0;
        assert_ne!(a.params_digest(), c.params_digest());
        // layout-only settings do not touch the digest
        let mut d = a.clone();
        d.stride = 3;
        d.workers = Workers::Serial;
        assert_eq!(a.params_digest(), d.params_digest());
        assert_eq!(a.params_digest().len(), 64);
    }

    #[test]
    fn names_and_maxima_line_up() {
        let names = label_names();
        assert_eq!(names.len(), 27);
        assert_eq!(names[0], "grid4x4_u_location");
        assert_eq!(names[13], "global_v_pair");
        assert_eq!(names[26], "global_color");
        let m = label_maxima(16);
        assert_eq!(&m[..4], &[15, 7, 15, 7]);
        assert_eq!(&m[4..8], &[3, 7, 3, 7]);
        assert_eq!(&m[8..12], &[7, 7, 7, 7]);
        assert_eq!(&m[12..14], &[14, 14]);
        assert_eq!(&m[14..18], &[15, 7, 15, 7]);
        assert_eq!(m[26], 7);
    }

    fn record(motion: [u32; 14], appearance: [u32; 13], n: usize) -> LabelRecord {
        LabelRecord {
            clip_id: "x@0".into(),
            source: "x".into(),
            frame_range: [0, n],
            pattern_set: vec![],
            motion,
            appearance,
            params_digest: String::new(),
            conventions_version: CONVENTIONS_VERSION.into(),
            analytic: false,
            normalized: None,
        }
    }

    #[test]
    fn normalization_examples_and_roundtrip() {
        let mut motion = [0; 14];
        motion[1] = 7;
        motion[12] = 14;
        let r = record(motion, [0; 13], 16);
        let v = normalize_labels(&r);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 1.0);
        assert_eq!(v[12], 1.0);
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        assert_eq!(denormalize_labels(&v, 16).unwrap(), r.labels());

        // with two frames there is only one pair; its index normalizes to zero
        let r2 = record([0; 14], [3; 13], 2);
        assert_eq!(normalize_labels(&r2)[12], 0.0);
    }

    #[test]
    fn thirty_three_frames_give_two_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.rgb");
        write_raw(&path, &textured_frames(33, 24, 20)).unwrap();
        let config = RunConfig {
            resize: Resize::None,
            crop: CropMode::None,
            flow_params: FlowParams {
                min_level_size: 8,
                sor_iterations: 5,
                ..Default::default()
            },
            ..Default::default()
        };
        let src = Source {
            path,
            format: SourceFormat::Raw,
        };
        let out = run_extraction(&config, &[src]).unwrap();
        assert!(out.failures.is_empty());
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.records[0].frame_range, [0, 16]);
        assert_eq!(out.records[1].frame_range, [16, 32]);
        assert_eq!(out.records[1].clip_id, "clip@16");
        assert!(!out.records[0].analytic);
    }

    #[test]
    fn bad_sources_are_reported_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.rgb");
        write_raw(&good, &textured_frames(4, 16, 16)).unwrap();
        let config = RunConfig {
            clip_len: 4,
            stride: 4,
            resize: Resize::None,
            crop: CropMode::None,
            flow_params: FlowParams {
                min_level_size: 8,
                sor_iterations: 3,
                ..Default::default()
            },
            ..Default::default()
        };
        let sources = [
            Source {
                path: dir.path().join("missing.rgb"),
                format: SourceFormat::Raw,
            },
            Source {
                path: good,
                format: SourceFormat::Raw,
            },
        ];
        let out = run_extraction(&config, &sources).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.failures.len(), 1);
        assert!(out.failures[0].source.ends_with("missing.rgb"));
    }

    #[test]
    fn jsonl_roundtrip_and_key_order() {
        let mut r = record([1; 14], [2; 13], 16);
        r.normalized = Some(normalize_labels(&r));
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[r.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("{\"clip_id\":"));
        let keys = [
            "clip_id",
            "source",
            "frame_range",
            "pattern_set",
            "motion",
            "appearance",
            "params_digest",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(read_jsonl(&text).unwrap(), vec![r]);
    }

    #[test]
    fn csv_has_27_label_columns() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[record([1; 14], [2; 13], 16)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].split(',').count(), 28);
        assert_eq!(lines[1].split(',').count(), 28);
    }
}

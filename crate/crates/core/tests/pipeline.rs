use proptest::prelude::*;

use vidstats::appearancestats::appearance_labels;
use vidstats::flowcore::{clip_flows, FlowParams, VariationalProvider};
use vidstats::motionstats::motion_labels;
use vidstats::parallel::Workers;
use vidstats::partition::PatternSet;
use vidstats::pipeline::{
    label_clip, run_extraction, write_jsonl, CropMode, Resize, RunConfig, Source,
};
use vidstats::synthgen::gen_global_pan;
use vidstats::videoio::raw::write_raw;
use vidstats::videoio::{extract_clips, SourceFormat};

fn quick_params() -> FlowParams {
    FlowParams {
        min_level_size: 8,
        warp_iterations: 2,
        sor_iterations: 8,
        ..Default::default()
    }
}

#[test]
fn extraction_equals_composing_the_stages_by_hand() {
    let dir = tempfile::tempdir().unwrap();
    let frames = gen_global_pan(8, (1.0, 1.0), 10, 24, 32, 16)
        .unwrap()
        .clip
        .into_frames();
    let path = dir.path().join("p.rgb");
    write_raw(&path, &frames).unwrap();
    let config = RunConfig {
        clip_len: 4,
        stride: 3,
        resize: Resize::None,
        crop: CropMode::None,
        flow_params: quick_params(),
        ..Default::default()
    };
    let out = run_extraction(
        &config,
        &[Source {
            path,
            format: SourceFormat::Raw,
        }],
    )
    .unwrap();

    let clips = extract_clips(&frames, 4, 3).unwrap();
    assert_eq!(out.records.len(), clips.len());
    let provider = VariationalProvider {
        params: quick_params(),
    };
    for (record, clip) in out.records.iter().zip(&clips) {
        let flows = clip_flows(clip, &provider, Workers::Serial).unwrap();
        let patterns = PatternSet::new(clip.height(), clip.width()).unwrap();
        assert_eq!(
            record.motion,
            motion_labels(&flows, &patterns).unwrap().to_array()
        );
        assert_eq!(
            record.appearance,
            appearance_labels(clip, &patterns, 16).unwrap().to_array()
        );
    }
}

#[test]
fn random_crop_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let frames = gen_global_pan(2, (0.0, 0.0), 4, 40, 40, 16)
        .unwrap()
        .clip
        .into_frames();
    let path = dir.path().join("c.rgb");
    write_raw(&path, &frames).unwrap();
    let config = |seed| RunConfig {
        clip_len: 2,
        stride: 2,
        resize: Resize::None,
        crop: CropMode::Random,
        crop_size: (16, 16),
        seed: Some(seed),
        flow_params: quick_params(),
        ..Default::default()
    };
    let src = [Source {
        path,
        format: SourceFormat::Raw,
    }];
    let dump = |seed| {
        let mut buf = Vec::new();
        write_jsonl(
            &mut buf,
            &run_extraction(&config(seed), &src).unwrap().records,
        )
        .unwrap();
        buf
    };
    assert_eq!(dump(1), dump(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn worker_count_never_changes_output(seed in 0u64..1000, workers in 2usize..5) {
        let dir = tempfile::tempdir().unwrap();
        let frames = gen_global_pan(seed, (0.5, -1.0), 7, 16, 20, 16).unwrap().clip.into_frames();
        let path = dir.path().join("w.rgb");
        write_raw(&path, &frames).unwrap();
        let src = [Source { path, format: SourceFormat::Raw }];
        let config = |w| RunConfig {
            clip_len: 3,
            stride: 2,
            resize: Resize::None,
            crop: CropMode::None,
            flow_params: quick_params(),
            workers: w,
            ..Default::default()
        };
        let serial = run_extraction(&config(Workers::Serial), &src).unwrap().records;
        let parallel = run_extraction(&config(Workers::Fixed(workers)), &src).unwrap().records;
        prop_assert_eq!(serial, parallel);
    }

    #[test]
    fn record_count_follows_clip_arithmetic(count in 2usize..40, n in 2usize..8, stride in 1usize..6) {
        let dir = tempfile::tempdir().unwrap();
        let frames = gen_global_pan(1, (0.0, 0.0), count, 8, 8, 16).unwrap().clip.into_frames();
        let path = dir.path().join("n.rgb");
        write_raw(&path, &frames).unwrap();
        let config = RunConfig {
            clip_len: n,
            stride,
            resize: Resize::None,
            crop: CropMode::None,
            flow_params: quick_params(),
            ..Default::default()
        };
        let out = run_extraction(&config, &[Source { path, format: SourceFormat::Raw }]).unwrap();
        let expected = if count < n { 0 } else { (count - n) / stride + 1 };
        prop_assert_eq!(out.records.len(), expected);
        for (i, r) in out.records.iter().enumerate() {
            prop_assert_eq!(r.frame_range, [i * stride, i * stride + n]);
        }
    }
}

#[test]
fn label_clip_is_deterministic() {
    let s = gen_global_pan(4, (1.0, 0.0), 5, 16, 16, 16).unwrap();
    assert_eq!(
        label_clip(&s.clip, &s.flows, 16).unwrap(),
        label_clip(&s.clip, &s.flows, 16).unwrap()
    );
}

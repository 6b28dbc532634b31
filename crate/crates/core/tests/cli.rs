use std::path::Path;
use std::process::{Command, Output};

use vidstats::pipeline::read_jsonl;
use vidstats::videoio::raw::write_raw;
use vidstats::videoio::Frame;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vidstats"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn frames(n: usize, w: usize, h: usize) -> Vec<Frame> {
    (0..n)
        .map(|t| {
            let px = (0..w * h)
                .flat_map(|i| {
                    [
                        ((i % w) * 9 + t * 2) as u8,
                        ((i / w) * 13) as u8,
                        (i * 3) as u8,
                    ]
                })
                .collect();
            Frame::new(w, h, px).unwrap()
        })
        .collect()
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.jsonl");
    // injected flows with resizing are rejected up front
    let r = run(&[
        "extract",
        "--input",
        "x",
        "--flow",
        "injected",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&[
        "extract",
        "--input",
        "x",
        "--resize",
        "wide",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&[
        "extract",
        "--input",
        "x",
        "--crop",
        "random",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    // unknown flags are clap usage errors
    let r = run(&["extract", "--bogus"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn partial_failures_exit_with_one_and_keep_good_sources() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.rgb");
    write_raw(&good, &frames(6, 20, 16)).unwrap();
    let out = dir.path().join("o.jsonl");
    let missing = dir.path().join("missing.rgb");
    let r = run(&[
        "extract",
        "--input",
        s(&missing),
        s(&good),
        "--format",
        "raw",
        "--clip-len",
        "3",
        "--stride",
        "3",
        "--resize",
        "none",
        "--crop",
        "none",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        r.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing.rgb"));
    let records = read_jsonl(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.source.ends_with("good.rgb")));
}

#[test]
fn synthetic_scenarios_extract_to_their_truth() {
    for (scenario, n) in [("fig2", "3"), ("random", "8"), ("pan", "16")] {
        let dir = tempfile::tempdir().unwrap();
        let scene = dir.path().join("scene");
        let out = dir.path().join("o.jsonl");
        let r = run(&[
            "synth",
            "--scenario",
            scenario,
            "--seed",
            "3",
            "--out",
            s(&scene),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let r = run(&[
            "extract",
            "--input",
            s(&scene),
            "--format",
            "frames",
            "--clip-len",
            n,
            "--stride",
            n,
            "--resize",
            "none",
            "--crop",
            "none",
            "--flow",
            "injected",
            "--out",
            s(&out),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let got = &read_jsonl(&std::fs::read_to_string(&out).unwrap()).unwrap()[0];

        let truth_line = std::fs::read_to_string(scene.join("truth.jsonl")).unwrap();
        let truth: serde_json::Value = serde_json::from_str(&truth_line).unwrap();
        let masked = |key: &str, mask: &str, values: &[u32]| {
            let t = truth[key].as_array().unwrap();
            let m = truth[mask].as_array().unwrap();
            for i in 0..values.len() {
                if m[i].as_bool().unwrap() {
                    assert_eq!(
                        t[i].as_u64().unwrap(),
                        u64::from(values[i]),
                        "{scenario} {key}[{i}]"
                    );
                }
            }
        };
        masked("motion", "motion_mask", &got.motion);
        masked("appearance", "appearance_mask", &got.appearance);
        assert_eq!(truth["params_digest"].as_str().unwrap(), got.params_digest);
        assert!(truth["analytic"].as_bool().unwrap());
    }
}

#[test]
fn inspect_decodes_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    let out = dir.path().join("o.jsonl");
    run(&["synth", "--scenario", "fig2", "--out", s(&scene)]);
    let r = run(&[
        "extract",
        "--input",
        s(&scene),
        "--format",
        "frames",
        "--clip-len",
        "3",
        "--resize",
        "none",
        "--crop",
        "none",
        "--flow",
        "injected",
        "--out",
        s(&out),
    ]);
    assert!(r.status.success());
    let r = run(&["inspect", "--input", s(&out), "--record", "1"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(
        text.contains("grid4x4_u_location: region 6 (#7 1-based)"),
        "{text}"
    );
    assert!(
        text.contains("grid4x4_u_orientation: bin 4 (piece 5"),
        "{text}"
    );
    assert!(
        text.contains("grid4x4_diverse_color: octant 1 (blue)"),
        "{text}"
    );
    let r = run(&["inspect", "--input", s(&out), "--record", "2"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn visualize_writes_maps_and_scores() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("v.rgb");
    write_raw(&src, &frames(5, 24, 20)).unwrap();
    let prefix = dir.path().join("vis");
    let r = run(&[
        "visualize",
        "--input",
        s(&src),
        "--format",
        "raw",
        "--clip-len",
        "4",
        "--resize",
        "none",
        "--crop",
        "none",
        "--out-prefix",
        s(&prefix),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for suffix in [
        "_mu.pgm",
        "_mv.pgm",
        "_grid4x4_regions.pgm",
        "_rings4_regions.pgm",
        "_wedges8_diversity.csv",
    ] {
        let p = dir.path().join(format!("vis{suffix}"));
        assert!(p.exists(), "missing {}", p.display());
    }
    let csv = std::fs::read_to_string(dir.path().join("vis_grid4x4_diversity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
}

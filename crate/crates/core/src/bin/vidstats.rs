use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vidstats::appearancestats::{region_diversity, write_diversity_csv};
use vidstats::flowcore::flo::write_flo;
use vidstats::flowcore::{clip_flows, InjectedProvider, VariationalProvider};
use vidstats::motionstats::{sum_motion_boundaries, to_polar, write_magnitude_pgm};
use vidstats::parallel::Workers;
use vidstats::partition::{PatternId, PatternSet};
use vidstats::pipeline::{
    injected_flow_dir, label_names, load_flow_dir, normalize_labels, prepare_clips, read_jsonl,
    run_extraction, write_csv, write_jsonl, CropMode, FlowSource, LabelRecord, Resize, RunConfig,
    Source, CONVENTIONS_VERSION,
};
use vidstats::synthgen::{gen_fig2, gen_global_pan, gen_random_shapes, SynthClip};
use vidstats::videoio::images::write_ppm;
use vidstats::videoio::SourceFormat;

#[derive(Parser)]
#[command(
    name = "vidstats",
    version,
    about = "Motion and appearance statistics labels for video clips"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every clip of one or more sources.
    Extract(ExtractArgs),
    /// Write a synthetic clip with analytic flows and ground-truth labels.
    Synth(SynthArgs),
    /// Dump boundary magnitudes, region maps and diversity scores for the first clip.
    Visualize(VisualizeArgs),
    /// Decode one record of a label file.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct Preprocess {
    #[arg(long, value_enum, default_value = "y4m")]
    format: Format,
    #[arg(long, default_value_t = 16)]
    clip_len: usize,
    #[arg(long, default_value_t = 16)]
    stride: usize,
    /// WIDTHxHEIGHT or `none`.
    #[arg(long, default_value = "171x128")]
    resize: String,
    /// center, none or random.
    #[arg(long, default_value = "center")]
    crop: String,
    /// variational or injected.
    #[arg(long, default_value = "variational")]
    flow: String,
    #[arg(long, default_value_t = 16)]
    bins: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// 0 uses every core, 1 runs serially.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Y4m,
    Frames,
    Raw,
}

impl From<Format> for SourceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Y4m => SourceFormat::Y4m,
            Format::Frames => SourceFormat::Frames,
            Format::Raw => SourceFormat::Raw,
        }
    }
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    pre: Preprocess,
    /// Output file; `.csv` selects CSV, anything else JSON Lines.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    normalize: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Fig2,
    Pan,
    Random,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VisualizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    pre: Preprocess,
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    /// A JSON Lines label file.
    #[arg(long)]
    input: PathBuf,
    /// 1-based line number.
    #[arg(long)]
    record: usize,
}

/// Problems with the invocation itself, as opposed to failures while running it.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct ConfigError(String);

impl Preprocess {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let parse = |e: vidstats::Error| ConfigError(e.to_string());
        let config = RunConfig {
            clip_len: self.clip_len,
            stride: self.stride,
            resize: self.resize.parse::<Resize>().map_err(parse)?,
            crop: self.crop.parse::<CropMode>().map_err(parse)?,
            flow: self.flow.parse::<FlowSource>().map_err(parse)?,
            bins: self.bins,
            seed: self.seed,
            workers: Workers::from_count(self.workers),
            ..Default::default()
        };
        config.validate().map_err(parse)?;
        Ok(config)
    }
}

fn extract(args: &ExtractArgs) -> anyhow::Result<ExitCode> {
    let mut config = args.pre.config()?;
    config.normalize = args.normalize;
    let sources: Vec<Source> = args
        .input
        .iter()
        .map(|p| Source {
            path: p.clone(),
            format: args.pre.format.into(),
        })
        .collect();
    let result = run_extraction(&config, &sources)?;

    let file =
        File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let writer = BufWriter::new(file);
    if args.out.extension().is_some_and(|e| e == "csv") {
        write_csv(writer, &result.records)?;
    } else {
        write_jsonl(writer, &result.records)?;
    }
    for f in &result.failures {
        eprintln!("skipped {}: {}", f.source.display(), f.error);
    }
    eprintln!(
        "{} records from {} of {} sources",
        result.records.len(),
        sources.len() - result.failures.len(),
        sources.len()
    );
    Ok(if result.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct TruthRecord<'a> {
    #[serde(flatten)]
    record: &'a LabelRecord,
    motion_mask: [bool; 14],
    appearance_mask: [bool; 13],
}

fn synth(args: &SynthArgs) -> anyhow::Result<ExitCode> {
    let (name, s): (&str, SynthClip) = match args.scenario {
        Scenario::Fig2 => ("fig2", gen_fig2(16)?),
        Scenario::Pan => (
            "pan",
            gen_global_pan(args.seed, (2.0, 0.0), 16, 112, 112, 16)?,
        ),
        Scenario::Random => ("random", gen_random_shapes(args.seed, 8, 112, 112, 16)?),
    };
    let flow_dir = args.out.join("flows");
    fs::create_dir_all(&flow_dir).with_context(|| format!("creating {}", flow_dir.display()))?;
    for (i, frame) in s.clip.frames().iter().enumerate() {
        write_ppm(&args.out.join(format!("frame_{i:03}.ppm")), frame)?;
    }
    for (i, flow) in s.flows.iter().enumerate() {
        write_flo(&flow_dir.join(format!("{i:03}.flo")), flow)?;
    }

    let config = RunConfig {
        clip_len: s.clip.len(),
        resize: Resize::None,
        crop: CropMode::None,
        flow: FlowSource::Injected,
        bins: s.bins,
        ..Default::default()
    };
    let record = LabelRecord {
        clip_id: format!("{name}@0"),
        source: args.out.display().to_string(),
        frame_range: [0, s.clip.len()],
        pattern_set: PatternId::ALL
            .iter()
            .map(|p| p.name().to_string())
            .collect(),
        motion: s.truth.motion,
        appearance: s.truth.appearance,
        params_digest: config.params_digest(),
        conventions_version: CONVENTIONS_VERSION.to_string(),
        analytic: true,
        normalized: None,
    };
    let truth = TruthRecord {
        record: &record,
        motion_mask: s.truth.motion_mask,
        appearance_mask: s.truth.appearance_mask,
    };
    let mut line = serde_json::to_string(&truth)?;
    line.push('\n');
    fs::write(args.out.join("truth.jsonl"), line)?;
    eprintln!(
        "{} frames of {}x{} written to {}",
        s.clip.len(),
        s.clip.width(),
        s.clip.height(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn visualize(args: &VisualizeArgs) -> anyhow::Result<ExitCode> {
    let config = args.pre.config()?;
    let source = Source {
        path: args.input.clone(),
        format: args.pre.format.into(),
    };
    let clips = prepare_clips(&source, &config, 0)?;
    let Some((offset, clip)) = clips.first() else {
        bail!(
            "{} holds fewer than {} frames",
            args.input.display(),
            config.clip_len
        );
    };
    let flows = match config.flow {
        FlowSource::Variational => clip_flows(
            clip,
            &VariationalProvider {
                params: config.flow_params.clone(),
            },
            config.workers,
        )?,
        FlowSource::Injected => {
            let all = load_flow_dir(&injected_flow_dir(&source))?;
            let flows = all
                .get(*offset..offset + config.clip_len - 1)
                .context("not enough injected flows for the first clip")?
                .to_vec();
            clip_flows(clip, &InjectedProvider { flows }, config.workers)?
        }
    };

    let with_suffix = |suffix: &str| {
        let mut s = args.out_prefix.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    let sums = sum_motion_boundaries(&flows)?;
    write_magnitude_pgm(&with_suffix("_mu.pgm"), &to_polar(&sums.mu))?;
    write_magnitude_pgm(&with_suffix("_mv.pgm"), &to_polar(&sums.mv))?;
    let patterns = PatternSet::new(clip.height(), clip.width())?;
    for map in &patterns.maps {
        let name = map.pattern.name();
        map.write_pgm(&with_suffix(&format!("_{name}_regions.pgm")))?;
        let scores = region_diversity(clip, map, config.bins)?;
        write_diversity_csv(&with_suffix(&format!("_{name}_diversity.csv")), &scores)?;
    }
    eprintln!(
        "wrote maps for frames {offset}..{}",
        offset + config.clip_len
    );
    Ok(ExitCode::SUCCESS)
}

const OCTANT_NAMES: [&str; 8] = [
    "black", "blue", "green", "cyan", "red", "magenta", "yellow", "white",
];

fn inspect(args: &InspectArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let records = read_jsonl(&text)?;
    if args.record == 0 || args.record > records.len() {
        return Err(ConfigError(format!(
            "record {} outside 1..={}",
            args.record,
            records.len()
        ))
        .into());
    }
    let r = &records[args.record - 1];
    print!("{}", describe(r));
    Ok(ExitCode::SUCCESS)
}

fn describe(r: &LabelRecord) -> String {
    let mut out = format!(
        "clip {} from {} frames {}..{} ({})\n",
        r.clip_id, r.source, r.frame_range[0], r.frame_range[1], r.conventions_version
    );
    let names = label_names();
    let normalized = normalize_labels(r);
    for (i, (name, value)) in names.iter().zip(r.labels()).enumerate() {
        let detail = if name.ends_with("color") {
            format!("octant {value} ({})", OCTANT_NAMES[value as usize % 8])
        } else if name.ends_with("pair") {
            format!(
                "pair {value} (frames {} -> {}, 1-based)",
                value + 1,
                value + 2
            )
        } else if name.ends_with("orientation") {
            format!(
                "bin {value} (piece {}, {}..{} deg)",
                value + 1,
                45 * value,
                45 * (value + 1)
            )
        } else {
            format!("region {value} (#{} 1-based)", value + 1)
        };
        out.push_str(&format!(
            "{name:>28}: {detail:<40} norm {:.4}\n",
            normalized[i]
        ));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(a) => extract(a),
        Command::Synth(a) => synth(a),
        Command::Visualize(a) => visualize(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<ConfigError>().is_some()
                || matches!(
                    e.downcast_ref::<vidstats::Error>(),
                    Some(vidstats::Error::InvalidParam(_))
                );
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn describe_lists_every_label() {
        let r = LabelRecord {
            clip_id: "a@0".into(),
            source: "a".into(),
            frame_range: [0, 16],
            pattern_set: vec![],
            motion: [1; 14],
            appearance: [7; 13],
            params_digest: String::new(),
            conventions_version: CONVENTIONS_VERSION.into(),
            analytic: false,
            normalized: None,
        };
        let text = describe(&r);
        assert_eq!(text.lines().count(), 28);
        assert!(text.contains("grid4x4_u_location: region 1 (#2 1-based)"));
        assert!(text.contains("white"));
    }
}

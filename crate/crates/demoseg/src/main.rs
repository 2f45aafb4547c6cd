use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use demoseg::config::{CaptionProvider, ConfigArgs, PipelineConfig};
use demoseg::error::{Error, Result};
use demoseg::eval::{eval_match, eval_split, run_eval};
use demoseg::formats::embeddings::load_embeddings;
use demoseg::formats::pose::{load_pose_track, PoseFormat};
use demoseg::formats::reports::{segments_json, ArticulationJson, CaptionJson, TruthFile};
use demoseg::formats::{read_instructions, read_json, to_json_string};
use demoseg::pipeline::{run_pipeline, script_from_lines, split_track, truth_sections, uniform_segments, CaptionSource};
use demoseg::schema;
use demoseg::synth::{write_dataset, SynthOptions};
use demoseg_core::evalkit::PlanSampler;
use demoseg_core::geomfit::classify_articulation;
use demoseg_core::lexdist::EmbeddingTable;

#[derive(Parser)]
#[command(name = "demoseg", version)]
#[command(about = "Segment hand-demonstration trajectories and align them with verbal instructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a pose track at local minima of hand speed
    Split {
        #[arg(long)]
        pose: PathBuf,
        /// Split every `uniform_period_s` seconds instead
        #[arg(long)]
        uniform: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Split, caption, align with instructions and fit articulations
    Match {
        #[arg(long)]
        pose: PathBuf,
        /// One instruction per line
        #[arg(long)]
        instructions: PathBuf,
        /// Ground truth for the mock caption provider
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the articulation report
        #[arg(long)]
        articulation_out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fit a prismatic or revolute model to the hand path
    Fit {
        #[arg(long)]
        pose: PathBuf,
        #[arg(long)]
        start_s: Option<f64>,
        #[arg(long)]
        end_s: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Change-point recall and false positive rate over a dataset
    EvalSplit {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Instruction-interval AP over a dataset
    EvalMatch {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Both evaluations in one report
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write a synthetic dataset
    Synth(SynthArgs),
    /// Print a JSON schema
    Schema {
        #[arg(value_parser = schema_names())]
        name: Option<String>,
        /// List schema names
        #[arg(long)]
        list: bool,
    },
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Position noise, meters
    #[arg(long, default_value_t = 0.001)]
    sigma: f64,
    /// Waypoint count range, start included
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [3, 6])]
    waypoints: Vec<usize>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [0.8, 1.6])]
    reach_duration_s: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [0.15, 0.4])]
    reach_distance_m: Vec<f64>,
    /// Dwell ("nothing") sections per video
    #[arg(long, default_value_t = 0)]
    dwells: usize,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [0.6, 1.2])]
    dwell_duration_s: Vec<f64>,
    #[arg(long, default_value_t = 16)]
    embedding_dim: usize,
    #[arg(long, value_enum, default_value_t = PoseFileFormat::Csv)]
    pose_format: PoseFileFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoseFileFormat {
    Csv,
    Jsonl,
}

fn schema_names() -> Vec<&'static str> {
    schema::all().into_iter().map(|(n, _)| n).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), source: e }),
    }
}

fn embeddings(cfg: &PipelineConfig) -> Result<EmbeddingTable> {
    let path = cfg
        .embeddings
        .as_deref()
        .ok_or_else(|| Error::Config("an embedding file is required (--embeddings)".into()))?;
    let loaded = load_embeddings(path)?;
    if loaded.duplicates > 0 {
        eprintln!("warning: {}: {} duplicate words, last occurrence kept", path.display(), loaded.duplicates);
    }
    Ok(loaded.table)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Split { pose, uniform, out, config } => {
            let cfg = config.resolve()?;
            let track = load_pose_track(&pose)?;
            let segs = if uniform {
                uniform_segments(&track, cfg.uniform_period_s)?
            } else {
                split_track(&track, &cfg)?
            };
            emit(out.as_deref(), &to_json_string(&segments_json(&segs)))
        }
        Command::Match {
            pose,
            instructions,
            truth,
            out,
            articulation_out,
            config,
        } => {
            let cfg = config.resolve()?;
            let table = embeddings(&cfg)?;
            let track = load_pose_track(&pose)?;
            let script = script_from_lines(&read_instructions(&instructions)?)?;
            let file_captions: Vec<CaptionJson>;
            let sections;
            let source = match cfg.caption_provider {
                CaptionProvider::File => {
                    let path = cfg
                        .captions
                        .as_deref()
                        .ok_or_else(|| Error::Config("the file caption provider needs --captions".into()))?;
                    file_captions = read_json(path)?;
                    CaptionSource::File(&file_captions)
                }
                CaptionProvider::Mock => {
                    let path = truth
                        .as_deref()
                        .ok_or_else(|| Error::Config("the mock caption provider needs --truth".into()))?;
                    let t: TruthFile = read_json(path)?;
                    sections = truth_sections(&t, track.start(), track.end())?;
                    CaptionSource::Mock {
                        truth: &sections,
                        error_rate: cfg.error_rate,
                        seed: cfg.seed,
                    }
                }
            };
            let output = run_pipeline(&track, &script, source, &table, &cfg)?;
            if let Some(path) = articulation_out {
                emit(Some(&path), &to_json_string(&output.articulation))?;
            }
            emit(out.as_deref(), &to_json_string(&output.report))
        }
        Command::Fit { pose, start_s, end_s, out } => {
            let track = load_pose_track(&pose)?;
            let points = track.positions_between(start_s.unwrap_or(track.start()), end_s.unwrap_or(track.end()));
            let model = classify_articulation(&points)?;
            emit(out.as_deref(), &to_json_string(&ArticulationJson::from(&model)))
        }
        Command::EvalSplit { dataset, out, config } => {
            let cfg = config.resolve()?;
            emit(out.as_deref(), &to_json_string(&eval_split(&dataset, &cfg)?))
        }
        Command::EvalMatch { dataset, out, config } => {
            let cfg = config.resolve()?;
            let table = embeddings(&cfg)?;
            emit(out.as_deref(), &to_json_string(&eval_match(&dataset, &table, &cfg)?))
        }
        Command::Eval { dataset, out, config } => {
            let cfg = config.resolve()?;
            let table = embeddings(&cfg)?;
            emit(out.as_deref(), &to_json_string(&run_eval(&dataset, &table, &cfg)?))
        }
        Command::Synth(a) => {
            let opts = SynthOptions {
                count: a.count,
                seed: a.seed,
                sigma: a.sigma,
                sampler: PlanSampler {
                    waypoints: (a.waypoints[0], a.waypoints[1]),
                    reach_duration: (a.reach_duration_s[0], a.reach_duration_s[1]),
                    reach_distance: (a.reach_distance_m[0], a.reach_distance_m[1]),
                    dwells: a.dwells,
                    dwell_duration: (a.dwell_duration_s[0], a.dwell_duration_s[1]),
                    ..PlanSampler::default()
                },
                embedding_dim: a.embedding_dim,
                pose_format: match a.pose_format {
                    PoseFileFormat::Csv => PoseFormat::Csv,
                    PoseFileFormat::Jsonl => PoseFormat::JsonLines,
                },
            };
            let manifest = write_dataset(&a.out_dir, &opts)?;
            eprintln!("wrote {} videos to {}", manifest.count, a.out_dir.display());
            Ok(())
        }
        Command::Schema { name, list } => {
            if list || name.is_none() {
                let mut text = schema_names().join("\n");
                text.push('\n');
                return emit(None, &text);
            }
            let v = schema::get(name.as_deref().unwrap_or_default()).expect("clap validated the name");
            emit(None, &to_json_string(&v))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

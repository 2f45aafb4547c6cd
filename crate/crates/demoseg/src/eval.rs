//! Dataset-level change-point and matching evaluation.

use std::path::Path;

use demoseg_core::evalkit::{score_change_points, score_intervals, ChangePointScore};
use demoseg_core::lexdist::EmbeddingTable;
use demoseg_core::splitter::{detect_change_points, ChangePointSet, SegmentList};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CaptionProvider, PipelineConfig};
use crate::dataset::{load_dataset, Video};
use crate::error::{Error, Result};
use crate::formats::reports::{ApJson, ChangePointScoreJson, MatchScoreJson};
use crate::pipeline::{align, caption_segments, split_track, truth_sections, uniform_segments, CaptionSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodScore {
    pub period_s: f64,
    pub score: ChangePointScoreJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSplitEval {
    pub name: String,
    pub velocity: ChangePointScoreJson,
    pub uniform: Vec<PeriodScore>,
}

/// Macro average over videos plus the score of the pooled counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanChangePointScore {
    pub recall: f64,
    pub false_positive_rate: f64,
    pub pooled: ChangePointScoreJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanPeriodScore {
    pub period_s: f64,
    pub score: MeanChangePointScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEvalMean {
    pub velocity: MeanChangePointScore,
    pub uniform: Vec<MeanPeriodScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEvalReport {
    pub margin_s: f64,
    pub smoothing_window: usize,
    pub videos: Vec<VideoSplitEval>,
    pub mean: SplitEvalMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMatchEval {
    pub name: String,
    pub velocity: MatchScoreJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<MatchScoreJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvalMean {
    pub velocity: Vec<ApJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Vec<ApJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvalReport {
    pub iou_thresholds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_period_s: Option<f64>,
    pub caption_provider: CaptionProvider,
    pub error_rate: f64,
    pub videos: Vec<VideoMatchEval>,
    pub mean: MatchEvalMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub change_points: SplitEvalReport,
    pub matching: MatchEvalReport,
}

fn truth_points(video: &Video) -> Result<ChangePointSet> {
    Ok(ChangePointSet::new(video.truth.change_points_s.clone())?)
}

fn interior(segments: &SegmentList) -> Result<ChangePointSet> {
    Ok(ChangePointSet::new(segments.boundaries())?)
}

pub fn evaluate_change_points(video: &Video, cfg: &PipelineConfig) -> Result<VideoSplitEval> {
    let truth = truth_points(video)?;
    let detected = detect_change_points(&video.track, &cfg.split_config())?;
    let velocity = score_change_points(&detected, &truth, cfg.margin_s)?;
    let uniform = if cfg.baseline {
        cfg.uniform_periods_s
            .iter()
            .map(|&period_s| {
                let cps = interior(&uniform_segments(&video.track, period_s)?)?;
                let score = score_change_points(&cps, &truth, cfg.margin_s)?;
                Ok(PeriodScore {
                    period_s,
                    score: (&score).into(),
                })
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(VideoSplitEval {
        name: video.name.clone(),
        velocity: (&velocity).into(),
        uniform,
    })
}

fn mean_cp(scores: &[ChangePointScoreJson]) -> Result<MeanChangePointScore> {
    let n = scores.len() as f64;
    let sum = |f: fn(&ChangePointScoreJson) -> usize| scores.iter().map(f).sum::<usize>();
    let pooled = ChangePointScore::from_counts(sum(|s| s.n_cr), sum(|s| s.n_cp), sum(|s| s.n_al))?;
    Ok(MeanChangePointScore {
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        false_positive_rate: scores.iter().map(|s| s.false_positive_rate).sum::<f64>() / n,
        pooled: (&pooled).into(),
    })
}

pub fn eval_split_videos(videos: &[Video], cfg: &PipelineConfig) -> Result<SplitEvalReport> {
    cfg.validate()?;
    let per: Vec<VideoSplitEval> = videos
        .par_iter()
        .map(|v| evaluate_change_points(v, cfg))
        .collect::<Result<_>>()?;
    let velocity = mean_cp(&per.iter().map(|v| v.velocity).collect::<Vec<_>>())?;
    let uniform = if cfg.baseline {
        cfg.uniform_periods_s
            .iter()
            .enumerate()
            .map(|(k, &period_s)| {
                let scores: Vec<_> = per.iter().map(|v| v.uniform[k].score).collect();
                Ok(MeanPeriodScore {
                    period_s,
                    score: mean_cp(&scores)?,
                })
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(SplitEvalReport {
        margin_s: cfg.margin_s,
        smoothing_window: cfg.smoothing_window,
        videos: per,
        mean: SplitEvalMean { velocity, uniform },
    })
}

/// Captions, aligns and scores one segmentation of `video`. Matching
/// failures (too few segments) score 0 at every threshold.
fn score_segmentation(
    video: &Video,
    segments: &SegmentList,
    table: &EmbeddingTable,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<MatchScoreJson> {
    let truth_sections_owned;
    let source = match cfg.caption_provider {
        CaptionProvider::File => CaptionSource::File(
            video
                .captions
                .as_deref()
                .ok_or_else(|| Error::Config(format!("video {} has no caption file", video.name)))?,
        ),
        CaptionProvider::Mock => {
            truth_sections_owned = truth_sections(&video.truth, video.track.start(), video.track.end())?;
            CaptionSource::Mock {
                truth: &truth_sections_owned,
                error_rate: cfg.error_rate,
                seed,
            }
        }
    };
    let intervals = video.instruction_intervals()?;
    let described = caption_segments(segments, source)?;
    match align(&described, &video.script, table, cfg) {
        Ok(a) => {
            let predicted: Vec<_> = a.assignment.matches.iter().map(|m| m.interval).collect();
            Ok((&score_intervals(&predicted, &intervals, &cfg.iou_thresholds)?).into())
        }
        Err(Error::Core(e @ demoseg_core::Error::Infeasible { .. })) => Ok(MatchScoreJson {
            ap_at: cfg
                .iou_thresholds
                .iter()
                .map(|&iou_threshold| ApJson { iou_threshold, ap: 0.0 })
                .collect(),
            per_instruction_iou: vec![0.0; intervals.len()],
            error: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

/// Velocity and (optionally) uniform-split matching scores for one video.
/// `seed` drives the mock captioner.
pub fn evaluate_matching(video: &Video, table: &EmbeddingTable, cfg: &PipelineConfig, seed: u64) -> Result<VideoMatchEval> {
    let velocity = score_segmentation(video, &split_track(&video.track, cfg)?, table, cfg, seed)?;
    let uniform = if cfg.baseline {
        let segs = uniform_segments(&video.track, cfg.uniform_period_s)?;
        Some(score_segmentation(video, &segs, table, cfg, seed)?)
    } else {
        None
    };
    Ok(VideoMatchEval {
        name: video.name.clone(),
        velocity,
        uniform,
    })
}

fn mean_ap(scores: &[&MatchScoreJson], thresholds: &[f64]) -> Vec<ApJson> {
    thresholds
        .iter()
        .enumerate()
        .map(|(k, &iou_threshold)| ApJson {
            iou_threshold,
            ap: scores.iter().map(|s| s.ap_at[k].ap).sum::<f64>() / scores.len() as f64,
        })
        .collect()
}

/// Video `k` uses mock seed `cfg.seed + k`.
pub fn eval_match_videos(videos: &[Video], table: &EmbeddingTable, cfg: &PipelineConfig) -> Result<MatchEvalReport> {
    cfg.validate()?;
    let per: Vec<VideoMatchEval> = videos
        .par_iter()
        .enumerate()
        .map(|(k, v)| evaluate_matching(v, table, cfg, cfg.seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    let velocity = mean_ap(&per.iter().map(|v| &v.velocity).collect::<Vec<_>>(), &cfg.iou_thresholds);
    let uniform = cfg.baseline.then(|| {
        let u: Vec<_> = per.iter().filter_map(|v| v.uniform.as_ref()).collect();
        mean_ap(&u, &cfg.iou_thresholds)
    });
    Ok(MatchEvalReport {
        iou_thresholds: cfg.iou_thresholds.clone(),
        uniform_period_s: cfg.baseline.then_some(cfg.uniform_period_s),
        caption_provider: cfg.caption_provider,
        error_rate: cfg.error_rate,
        videos: per,
        mean: MatchEvalMean { velocity, uniform },
    })
}

pub fn eval_split(dir: &Path, cfg: &PipelineConfig) -> Result<SplitEvalReport> {
    eval_split_videos(&load_dataset(dir)?, cfg)
}

pub fn eval_match(dir: &Path, table: &EmbeddingTable, cfg: &PipelineConfig) -> Result<MatchEvalReport> {
    eval_match_videos(&load_dataset(dir)?, table, cfg)
}

/// Both evaluations over one dataset directory.
pub fn run_eval(dir: &Path, table: &EmbeddingTable, cfg: &PipelineConfig) -> Result<EvalReport> {
    let videos = load_dataset(dir)?;
    Ok(EvalReport {
        change_points: eval_split_videos(&videos, cfg)?,
        matching: eval_match_videos(&videos, table, cfg)?,
    })
}

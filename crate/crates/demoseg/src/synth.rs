//! Writes synthetic datasets in the layout [`crate::dataset`] reads.

use std::fs;
use std::path::Path;

use demoseg_core::evalkit::{caption_vocabulary, synthesize, toy_embeddings, PlanSampler, SyntheticDemo};
use serde::{Deserialize, Serialize};

use crate::dataset::truth_file;
use crate::error::{Error, Result};
use crate::formats::embeddings::save_embeddings;
use crate::formats::pose::{save_pose_track, PoseFormat};
use crate::formats::reports::captions_json;
use crate::formats::{write_instructions, write_json};

pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub count: usize,
    pub seed: u64,
    /// Position noise, meters.
    pub sigma: f64,
    pub sampler: PlanSampler,
    pub embedding_dim: usize,
    pub pose_format: PoseFormat,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            count: 10,
            seed: 0,
            sigma: 0.001,
            sampler: PlanSampler::default(),
            embedding_dim: 16,
            pose_format: PoseFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub count: usize,
    pub seed: u64,
    pub sigma_m: f64,
    pub waypoints: [usize; 2],
    pub reach_duration_s: [f64; 2],
    pub reach_distance_m: [f64; 2],
    pub dwells: usize,
    pub dwell_duration_s: [f64; 2],
    pub embedding_dim: usize,
    pub embeddings: String,
    pub videos: Vec<String>,
}

pub fn video_name(k: usize) -> String {
    format!("video_{k:03}")
}

/// Video `k` uses seed `opts.seed + k` for both the plan and the noise.
pub fn synth_demo(opts: &SynthOptions, k: usize) -> Result<SyntheticDemo> {
    let seed = opts.seed.wrapping_add(k as u64);
    Ok(synthesize(&opts.sampler.sample(seed)?, opts.sigma, seed)?)
}

pub fn write_dataset(dir: &Path, opts: &SynthOptions) -> Result<SynthManifest> {
    if !(opts.sigma.is_finite() && opts.sigma >= 0.0) {
        return Err(Error::Config(format!("noise sigma {} must be non-negative", opts.sigma)));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = match opts.pose_format {
        PoseFormat::Csv => "csv",
        PoseFormat::JsonLines => "jsonl",
    };
    let mut videos = Vec::with_capacity(opts.count);
    for k in 0..opts.count {
        let demo = synth_demo(opts, k)?;
        let name = video_name(k);
        save_pose_track(&dir.join(format!("{name}.pose.{ext}")), &demo.track)?;
        write_json(&dir.join(format!("{name}.truth.json")), &truth_file(&demo))?;
        write_json(&dir.join(format!("{name}.captions.json")), &captions_json(&demo.truth))?;
        let lines: Vec<String> = demo.script.instructions().iter().map(|s| s.text().to_string()).collect();
        write_instructions(&dir.join(format!("{name}.instructions.txt")), &lines)?;
        videos.push(name);
    }
    let vocab = caption_vocabulary(opts.sampler.captions.iter().map(String::as_str));
    let table = toy_embeddings(vocab.iter().map(String::as_str), opts.embedding_dim, opts.seed)?;
    save_embeddings(&dir.join(EMBEDDINGS_FILE), &table)?;

    let s = &opts.sampler;
    let manifest = SynthManifest {
        count: opts.count,
        seed: opts.seed,
        sigma_m: opts.sigma,
        waypoints: [s.waypoints.0, s.waypoints.1],
        reach_duration_s: [s.reach_duration.0, s.reach_duration.1],
        reach_distance_m: [s.reach_distance.0, s.reach_distance.1],
        dwells: s.dwells,
        dwell_duration_s: [s.dwell_duration.0, s.dwell_duration.1],
        embedding_dim: opts.embedding_dim,
        embeddings: EMBEDDINGS_FILE.to_string(),
        videos,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

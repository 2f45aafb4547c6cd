//! On-disk dataset layout: for each video `<name>`, the files
//! `<name>.pose.csv` (or `.pose.jsonl`), `<name>.truth.json`,
//! `<name>.instructions.txt` and optionally `<name>.captions.json`.

use std::fs;
use std::path::{Path, PathBuf};

use demoseg_core::evalkit::SyntheticDemo;
use demoseg_core::matcher::InstructionScript;
use demoseg_core::splitter::Segment;
use demoseg_core::trajectory::PoseTrack;

use crate::error::{Error, Result};
use crate::formats::pose::load_pose_track;
use crate::formats::reports::{CaptionJson, TruthFile, TruthInstruction};
use crate::formats::{read_instructions, read_json};
use crate::pipeline::script_from_lines;

pub const TRUTH_SUFFIX: &str = ".truth.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoFiles {
    pub name: String,
    pub pose: PathBuf,
    pub truth: PathBuf,
    pub instructions: PathBuf,
    pub captions: Option<PathBuf>,
}

/// Videos of a dataset directory, sorted by name.
pub fn list_videos(dir: &Path) -> Result<Vec<VideoFiles>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if let Some(name) = entry.file_name().to_str().and_then(|f| f.strip_suffix(TRUTH_SUFFIX)) {
            names.push(name.to_string());
        }
    }
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let csv = dir.join(format!("{name}.pose.csv"));
            let jsonl = dir.join(format!("{name}.pose.jsonl"));
            let pose = if csv.exists() {
                csv
            } else if jsonl.exists() {
                jsonl
            } else {
                return Err(Error::format(dir.join(format!("{name}{TRUTH_SUFFIX}")), "no matching pose file"));
            };
            let captions = Some(dir.join(format!("{name}.captions.json"))).filter(|p| p.exists());
            Ok(VideoFiles {
                truth: dir.join(format!("{name}{TRUTH_SUFFIX}")),
                instructions: dir.join(format!("{name}.instructions.txt")),
                name,
                pose,
                captions,
            })
        })
        .collect()
}

/// One video's inputs in memory.
#[derive(Debug, Clone)]
pub struct Video {
    pub name: String,
    pub track: PoseTrack,
    pub truth: TruthFile,
    pub script: InstructionScript,
    pub captions: Option<Vec<CaptionJson>>,
}

impl Video {
    pub fn load(files: &VideoFiles) -> Result<Self> {
        Ok(Self {
            name: files.name.clone(),
            track: load_pose_track(&files.pose)?,
            truth: read_json(&files.truth)?,
            script: script_from_lines(&read_instructions(&files.instructions)?)?,
            captions: files.captions.as_deref().map(read_json).transpose()?,
        })
    }

    pub fn from_demo(name: &str, demo: &SyntheticDemo) -> Self {
        Self {
            name: name.to_string(),
            track: demo.track.clone(),
            truth: truth_file(demo),
            script: demo.script.clone(),
            captions: None,
        }
    }

    pub fn instruction_intervals(&self) -> Result<Vec<Segment>> {
        self.truth
            .instructions
            .iter()
            .map(|i| Ok(Segment::new(i.start_s, i.end_s)?))
            .collect()
    }
}

pub fn load_dataset(dir: &Path) -> Result<Vec<Video>> {
    let files = list_videos(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyDataset(dir.to_path_buf()));
    }
    files.iter().map(Video::load).collect()
}

pub fn truth_file(demo: &SyntheticDemo) -> TruthFile {
    let instructions = demo
        .truth
        .items()
        .iter()
        .enumerate()
        .filter(|(k, _)| !demo.noise_sections.contains(k))
        .map(|(_, d)| TruthInstruction {
            text: d.description.text().to_string(),
            start_s: d.segment.start,
            end_s: d.segment.end,
        })
        .collect();
    TruthFile {
        change_points_s: demo.true_change_points.times().to_vec(),
        instructions,
    }
}

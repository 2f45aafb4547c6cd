//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use demoseg::formats::embeddings::save_embeddings;
use demoseg::formats::pose::save_pose_track;
use demoseg::formats::{write_instructions, write_json};
use demoseg::dataset::truth_file;
use demoseg_core::evalkit::{caption_vocabulary, toy_embeddings, DemoPlan, PlanStep, SyntheticDemo};
use demoseg_core::lexdist::EmbeddingTable;
use serde_json::Value;

pub const MICROWAVE_SCRIPT: [&str; 3] = ["open a microwave", "put a cup into the microwave", "close the microwave"];
pub const MISCAPTION: &str = "turning a knob";

/// Door swing, cup placement, a one-second pause, door swing back.
pub fn microwave_plan() -> DemoPlan {
    let hinge = [0.0, 0.0, 1.0];
    let up = [0.0, 0.0, 1.0];
    DemoPlan::new(
        [0.45, 0.0, 1.0],
        vec![
            PlanStep::Arc { center: hinge, axis: up, angle: -1.2, duration: 1.5, caption: MICROWAVE_SCRIPT[0].into() },
            PlanStep::Reach { to: [0.25, 0.1, 1.05], duration: 1.5, caption: MICROWAVE_SCRIPT[1].into() },
            PlanStep::Dwell { duration: 1.0 },
            PlanStep::Arc { center: hinge, axis: up, angle: 1.2, duration: 1.5, caption: MICROWAVE_SCRIPT[2].into() },
        ],
    )
}

pub fn microwave_table() -> EmbeddingTable {
    let vocab = caption_vocabulary(MICROWAVE_SCRIPT.iter().copied().chain([MISCAPTION]));
    toy_embeddings(vocab.iter().map(String::as_str), 16, 0).unwrap()
}

pub struct FixtureFiles {
    pub pose: PathBuf,
    pub instructions: PathBuf,
    pub truth: PathBuf,
    pub embeddings: PathBuf,
}

pub fn write_demo(dir: &Path, demo: &SyntheticDemo, table: &EmbeddingTable) -> FixtureFiles {
    let f = FixtureFiles {
        pose: dir.join("demo.pose.csv"),
        instructions: dir.join("demo.instructions.txt"),
        truth: dir.join("demo.truth.json"),
        embeddings: dir.join("embeddings.txt"),
    };
    save_pose_track(&f.pose, &demo.track).unwrap();
    let lines: Vec<String> = demo.script.instructions().iter().map(|s| s.text().to_string()).collect();
    write_instructions(&f.instructions, &lines).unwrap();
    write_json(&f.truth, &truth_file(demo)).unwrap();
    save_embeddings(&f.embeddings, table).unwrap();
    f
}

pub fn demoseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_demoseg")).args(args).output().unwrap()
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Schema violations of `doc`, empty when it validates.
pub fn violations(schema_name: &str, doc: &Value) -> Vec<String> {
    let schema = demoseg::schema::get(schema_name).unwrap_or_else(|| panic!("no schema {schema_name}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    validator.iter_errors(doc).map(|e| format!("{}: {e}", e.instance_path)).collect()
}

pub fn assert_valid(schema_name: &str, doc: &Value) {
    let v = violations(schema_name, doc);
    assert!(v.is_empty(), "{schema_name}: {v:?}");
}

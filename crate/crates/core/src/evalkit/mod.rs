//! Scoring of change points and matched intervals, plus synthetic
//! demonstrations and a mock captioner for end-to-end checks.

mod mock;
mod scoring;
mod synth;

pub use mock::{caption_pool, max_overlap, mock_caption};
pub use scoring::{
    match_change_points, score_change_points, score_intervals, score_matching, ChangePointScore, MatchScore,
    DEFAULT_IOU_THRESHOLDS, DEFAULT_MARGIN_S,
};
pub use synth::{
    caption_vocabulary, min_jerk, synthesize, toy_embeddings, DemoPlan, PlanSampler, PlanStep, SyntheticDemo,
    DEFAULT_CAPTIONS, SAMPLE_RATE_HZ,
};

/// Default uniform-baseline periods for change-point sweeps, seconds.
pub const DEFAULT_UNIFORM_PERIODS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

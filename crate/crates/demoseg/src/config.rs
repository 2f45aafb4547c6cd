//! The single configuration surface shared by every subcommand.
//!
//! A JSON file supplies any subset of [`PipelineConfig`] fields; command-line
//! flags with the same (kebab-case) names override it.

use std::path::{Path, PathBuf};

use demoseg_core::evalkit::{DEFAULT_IOU_THRESHOLDS, DEFAULT_MARGIN_S, DEFAULT_UNIFORM_PERIODS};
use demoseg_core::lexdist::{DistanceConfig, OovPolicy, DEFAULT_C_NOTHING};
use demoseg_core::matcher::MatchCosts;
use demoseg_core::splitter::SplitConfig;
use demoseg_core::trajectory::DEFAULT_SMOOTHING_WINDOW;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::read_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GroupCost {
    ToInstruction,
    Chain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Oov {
    Drop,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CaptionProvider {
    /// Captions read from a caption file, assigned by maximal overlap.
    File,
    /// Ground-truth captions with random substitutions.
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub smoothing_window: usize,
    /// Minimum spacing between change points, seconds; off when null.
    pub min_separation_s: Option<f64>,
    pub c_dist: f64,
    pub c_group: f64,
    pub c_skip: f64,
    pub c_nothing: f64,
    pub group_cost: GroupCost,
    pub oov_policy: Oov,
    pub remove_stop_words: bool,
    pub normalize_embeddings: bool,
    pub iou_thresholds: Vec<f64>,
    pub margin_s: f64,
    pub embeddings: Option<PathBuf>,
    pub caption_provider: CaptionProvider,
    pub captions: Option<PathBuf>,
    pub error_rate: f64,
    pub seed: u64,
    pub articulation_keywords: Vec<String>,
    /// Compare against uniform splitting in evaluations.
    pub baseline: bool,
    pub uniform_period_s: f64,
    /// Periods swept by the change-point evaluation baseline.
    pub uniform_periods_s: Vec<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            min_separation_s: None,
            c_dist: 1.0,
            c_group: 0.5,
            c_skip: 0.5,
            c_nothing: DEFAULT_C_NOTHING,
            group_cost: GroupCost::ToInstruction,
            oov_policy: Oov::Drop,
            remove_stop_words: false,
            normalize_embeddings: false,
            iou_thresholds: DEFAULT_IOU_THRESHOLDS.to_vec(),
            margin_s: DEFAULT_MARGIN_S,
            embeddings: None,
            caption_provider: CaptionProvider::Mock,
            captions: None,
            error_rate: 0.0,
            seed: 0,
            articulation_keywords: ["open", "close", "pull", "turn"].map(String::from).to_vec(),
            baseline: true,
            uniform_period_s: 0.5,
            uniform_periods_s: DEFAULT_UNIFORM_PERIODS.to_vec(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.smoothing_window == 0 || self.smoothing_window.is_multiple_of(2) {
            return bad(format!("smoothing_window {} must be odd and positive", self.smoothing_window));
        }
        if let Some(s) = self.min_separation_s {
            if !(s.is_finite() && s > 0.0) {
                return bad(format!("min_separation_s {s} must be positive"));
            }
        }
        self.match_costs().validate()?;
        self.distance_config().validate()?;
        if let Some(t) = self.iou_thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return bad(format!("IoU threshold {t} outside [0, 1]"));
        }
        if !(self.margin_s.is_finite() && self.margin_s > 0.0) {
            return bad(format!("margin_s {} must be positive", self.margin_s));
        }
        if !(0.0..=1.0).contains(&self.error_rate) {
            return bad(format!("error_rate {} outside [0, 1]", self.error_rate));
        }
        for p in self.uniform_periods_s.iter().chain([&self.uniform_period_s]) {
            if !(p.is_finite() && *p > 0.0) {
                return bad(format!("uniform period {p} must be positive"));
            }
        }
        Ok(())
    }

    pub fn split_config(&self) -> SplitConfig {
        SplitConfig {
            window: self.smoothing_window,
            min_separation: self.min_separation_s,
        }
    }

    pub fn match_costs(&self) -> MatchCosts {
        MatchCosts {
            c_dist: self.c_dist,
            c_group: self.c_group,
            c_skip: self.c_skip,
        }
    }

    pub fn distance_config(&self) -> DistanceConfig {
        DistanceConfig {
            c_nothing: self.c_nothing,
            oov_policy: match self.oov_policy {
                Oov::Drop => OovPolicy::Drop,
                Oov::Error => OovPolicy::Error,
            },
            remove_stop_words: self.remove_stop_words,
            normalize_embeddings: self.normalize_embeddings,
        }
    }
}

/// Command-line overrides, one flag per [`PipelineConfig`] field.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub smoothing_window: Option<usize>,
    #[arg(long)]
    pub min_separation_s: Option<f64>,
    #[arg(long)]
    pub c_dist: Option<f64>,
    #[arg(long)]
    pub c_group: Option<f64>,
    #[arg(long)]
    pub c_skip: Option<f64>,
    #[arg(long)]
    pub c_nothing: Option<f64>,
    #[arg(long, value_enum)]
    pub group_cost: Option<GroupCost>,
    #[arg(long, value_enum)]
    pub oov_policy: Option<Oov>,
    #[arg(long)]
    pub remove_stop_words: Option<bool>,
    #[arg(long)]
    pub normalize_embeddings: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    pub iou_thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub margin_s: Option<f64>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub caption_provider: Option<CaptionProvider>,
    #[arg(long)]
    pub captions: Option<PathBuf>,
    #[arg(long)]
    pub error_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub articulation_keywords: Option<Vec<String>>,
    #[arg(long)]
    pub baseline: Option<bool>,
    #[arg(long)]
    pub uniform_period_s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub uniform_periods_s: Option<Vec<f64>>,
}

impl ConfigArgs {
    /// Loads the config file (or defaults), applies the flags and validates.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        macro_rules! apply {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    c.$f = v.clone().into();
                }
            )*};
        }
        apply!(
            smoothing_window, min_separation_s, c_dist, c_group, c_skip, c_nothing, group_cost, oov_policy,
            remove_stop_words, normalize_embeddings, iou_thresholds, margin_s, embeddings, caption_provider,
            captions, error_rate, seed, articulation_keywords, baseline, uniform_period_s, uniform_periods_s
        );
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let c: PipelineConfig = serde_json::from_str(r#"{"c_skip": 0.25, "group_cost": "chain"}"#).unwrap();
        assert_eq!(c.c_skip, 0.25);
        assert_eq!(c.group_cost, GroupCost::Chain);
        assert_eq!(c.smoothing_window, 5);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"c_skp": 1}"#).is_err());
    }

    #[test]
    fn even_window_is_rejected() {
        let c = PipelineConfig {
            smoothing_window: 4,
            ..PipelineConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn flags_override_file_values() {
        let args = ConfigArgs {
            c_nothing: Some(5.0),
            min_separation_s: Some(0.2),
            ..ConfigArgs::default()
        };
        let c = args.resolve().unwrap();
        assert_eq!(c.c_nothing, 5.0);
        assert_eq!(c.min_separation_s, Some(0.2));
    }
}

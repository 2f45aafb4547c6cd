//! Serde mirrors of the core result types. Field names are the on-disk
//! names; [`crate::schema`] holds the matching JSON schemas.

use demoseg_core::evalkit::{ChangePointScore, MatchScore};
use demoseg_core::geomfit::{ArticulationModel, Joint};
use demoseg_core::matcher::{DescribedSegments, DistanceMatrix, InstructionScript, MatchAssignment};
use demoseg_core::splitter::{Segment, SegmentList};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentJson {
    pub start_s: f64,
    pub end_s: f64,
}

impl From<&Segment> for SegmentJson {
    fn from(s: &Segment) -> Self {
        Self {
            start_s: s.start,
            end_s: s.end,
        }
    }
}

pub fn segments_json(list: &SegmentList) -> Vec<SegmentJson> {
    list.segments().iter().map(SegmentJson::from).collect()
}

/// Caption file entry, also used to list described segments in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptionJson {
    pub start_s: f64,
    pub end_s: f64,
    pub text: String,
}

pub fn captions_json(segs: &DescribedSegments) -> Vec<CaptionJson> {
    segs.items()
        .iter()
        .map(|d| CaptionJson {
            start_s: d.segment.start,
            end_s: d.segment.end,
            text: d.description.text().to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthInstruction {
    pub text: String,
    pub start_s: f64,
    pub end_s: f64,
}

/// Ground truth for one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub change_points_s: Vec<f64>,
    pub instructions: Vec<TruthInstruction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostTerms {
    pub skip: f64,
    pub dist: f64,
    pub group: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionReport {
    pub index: usize,
    pub text: String,
    pub start_s: f64,
    pub end_s: f64,
    pub segment_indices: Vec<usize>,
    /// Segments skipped right before this instruction's group.
    pub skipped_before: Vec<usize>,
    pub cost: f64,
    pub cost_terms: CostTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentReport {
    pub instructions: Vec<InstructionReport>,
    pub skipped_segments: Vec<usize>,
    pub trailing_skip_cost: f64,
    pub total_cost: f64,
    /// Described segments in order; indices above refer to this list.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<CaptionJson>,
    /// Segment-by-instruction distance rows.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distances: Vec<Vec<f64>>,
}

/// Renders an assignment; `context` adds the described segments and the
/// distance matrix.
pub fn explain(
    assignment: &MatchAssignment,
    script: &InstructionScript,
    context: Option<(&DescribedSegments, &DistanceMatrix)>,
) -> AssignmentReport {
    let instructions = assignment
        .matches
        .iter()
        .map(|m| InstructionReport {
            index: m.instruction,
            text: script.instructions()[m.instruction].text().to_string(),
            start_s: m.interval.start,
            end_s: m.interval.end,
            segment_indices: m.segments.clone().collect(),
            skipped_before: m.skipped_before.clone().collect(),
            cost: m.cost.total(),
            cost_terms: CostTerms {
                skip: m.cost.skip,
                dist: m.cost.dist,
                group: m.cost.group,
            },
        })
        .collect();
    let (segments, distances) = match context {
        Some((segs, matrix)) => (
            captions_json(segs),
            (0..matrix.rows()).map(|r| matrix.row(r).to_vec()).collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    AssignmentReport {
        instructions,
        skipped_segments: assignment.skipped.clone(),
        trailing_skip_cost: assignment.trailing_skip_cost,
        total_cost: assignment.total_cost,
        segments,
        distances,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    Prismatic,
    Revolute,
}

/// Flat JSON form of an articulation model. Prismatic models carry
/// `direction` and `range_m`; revolute ones `axis`, `center`, `radius` and
/// `swept_angle_rad`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticulationJson {
    pub kind: JointKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swept_angle_rad: Option<f64>,
    pub rms_residual_m: f64,
    pub line_rms_residual_m: f64,
    /// Null when the points are collinear.
    pub circle_rms_residual_m: Option<f64>,
    pub extent_m: f64,
}

impl From<&ArticulationModel> for ArticulationJson {
    fn from(m: &ArticulationModel) -> Self {
        let mut out = ArticulationJson {
            kind: JointKind::Prismatic,
            direction: None,
            origin: None,
            range_m: None,
            axis: None,
            center: None,
            radius: None,
            swept_angle_rad: None,
            rms_residual_m: m.rms_residual(),
            line_rms_residual_m: m.line_rms_residual,
            circle_rms_residual_m: m.circle_rms_residual,
            extent_m: m.extent,
        };
        match &m.joint {
            Joint::Prismatic(l) => {
                out.direction = Some(l.direction);
                out.origin = Some(l.origin);
                out.range_m = Some(l.range);
            }
            Joint::Revolute(c) => {
                out.kind = JointKind::Revolute;
                out.axis = Some(c.axis);
                out.center = Some(c.center);
                out.radius = Some(c.radius);
                out.swept_angle_rad = Some(c.swept_angle);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticulationEntry {
    pub instruction_index: usize,
    pub text: String,
    pub keyword: String,
    pub start_s: f64,
    pub end_s: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ArticulationJson>,
    /// Why no model was fitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticulationReport {
    pub articulations: Vec<ArticulationEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangePointScoreJson {
    pub recall: f64,
    pub false_positive_rate: f64,
    pub n_cr: usize,
    pub n_cp: usize,
    pub n_al: usize,
}

impl From<&ChangePointScore> for ChangePointScoreJson {
    fn from(s: &ChangePointScore) -> Self {
        Self {
            recall: s.recall,
            false_positive_rate: s.false_positive_rate,
            n_cr: s.n_cr,
            n_cp: s.n_cp,
            n_al: s.n_al,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApJson {
    pub iou_threshold: f64,
    pub ap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchScoreJson {
    pub ap_at: Vec<ApJson>,
    pub per_instruction_iou: Vec<f64>,
    /// Set when matching failed; every IoU is then 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&MatchScore> for MatchScoreJson {
    fn from(s: &MatchScore) -> Self {
        Self {
            ap_at: s
                .ap_at
                .iter()
                .map(|&(iou_threshold, ap)| ApJson { iou_threshold, ap })
                .collect(),
            per_instruction_iou: s.per_instruction_iou.clone(),
            error: None,
        }
    }
}

impl MatchScoreJson {
    pub fn ap(&self, threshold: f64) -> Option<f64> {
        self.ap_at.iter().find(|a| a.iou_threshold == threshold).map(|a| a.ap)
    }
}

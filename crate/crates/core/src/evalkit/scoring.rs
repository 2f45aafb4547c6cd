use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matcher::MatchAssignment;
use crate::splitter::{ChangePointSet, Segment};

/// Default IoU thresholds for matching AP.
pub const DEFAULT_IOU_THRESHOLDS: [f64; 3] = [0.5, 0.75, 0.95];

/// Default change-point tolerance, seconds.
pub const DEFAULT_MARGIN_S: f64 = 0.1;

/// Slack on time and IoU comparisons so values that are mathematically equal do
/// not fail by one ulp.
const CMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangePointScore {
    pub recall: f64,
    pub false_positive_rate: f64,
    /// Correctly detected change points.
    pub n_cr: usize,
    /// True change points.
    pub n_cp: usize,
    /// Detection alarms.
    pub n_al: usize,
}

impl ChangePointScore {
    /// Builds a score from raw counts.
    pub fn from_counts(n_cr: usize, n_cp: usize, n_al: usize) -> Result<Self> {
        if n_cp == 0 {
            return Err(Error::InvalidInput("no true change points; recall is undefined".into()));
        }
        if n_cr > n_cp.min(n_al) {
            return Err(Error::InvalidInput(format!(
                "{n_cr} correct detections exceed min({n_cp}, {n_al})"
            )));
        }
        let false_positive_rate = if n_al > 0 {
            (n_al - n_cr) as f64 / n_al as f64
        } else {
            0.0
        };
        Ok(Self {
            recall: n_cr as f64 / n_cp as f64,
            false_positive_rate,
            n_cr,
            n_cp,
            n_al,
        })
    }
}

/// One-to-one greedy pairing of detections with true change points: the
/// globally closest pair within `margin` is matched first, then removed.
pub fn match_change_points(detected: &[f64], truth: &[f64], margin: f64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (d, &td) in detected.iter().enumerate() {
        for (t, &tt) in truth.iter().enumerate() {
            let gap = (td - tt).abs();
            if gap <= margin + CMP_TOL {
                pairs.push((gap, d, t));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_d = alloc::vec![false; detected.len()];
    let mut used_t = alloc::vec![false; truth.len()];
    let mut out = Vec::new();
    for (_, d, t) in pairs {
        if !used_d[d] && !used_t[t] {
            used_d[d] = true;
            used_t[t] = true;
            out.push((d, t));
        }
    }
    out
}

/// Recall and false-positive rate of detected change points.
pub fn score_change_points(
    detected: &ChangePointSet,
    truth: &ChangePointSet,
    margin: f64,
) -> Result<ChangePointScore> {
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::InvalidParameter(format!("margin {margin} must be positive")));
    }
    let n_cr = match_change_points(detected.times(), truth.times(), margin).len();
    ChangePointScore::from_counts(n_cr, truth.len(), detected.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchScore {
    /// `(threshold, AP)` in the order the thresholds were given.
    pub ap_at: Vec<(f64, f64)>,
    pub per_instruction_iou: Vec<f64>,
}

impl MatchScore {
    pub fn ap(&self, threshold: f64) -> Option<f64> {
        self.ap_at.iter().find(|(t, _)| *t == threshold).map(|(_, ap)| *ap)
    }
}

/// IoU of each predicted interval against its ground truth, and the
/// fraction of instructions reaching each threshold.
pub fn score_intervals(predicted: &[Segment], truth: &[Segment], thresholds: &[f64]) -> Result<MatchScore> {
    if predicted.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "{} predicted intervals for {} instructions",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("no instructions to score".into()));
    }
    if let Some(t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidParameter(format!("IoU threshold {t} outside [0, 1]")));
    }
    let ious: Vec<f64> = predicted.iter().zip(truth).map(|(p, t)| p.iou(t)).collect();
    let ap_at = thresholds
        .iter()
        .map(|&tau| {
            let hits = ious.iter().filter(|&&iou| iou + CMP_TOL >= tau).count();
            (tau, hits as f64 / ious.len() as f64)
        })
        .collect();
    Ok(MatchScore {
        ap_at,
        per_instruction_iou: ious,
    })
}

/// [`score_intervals`] on the intervals of a match assignment.
pub fn score_matching(predicted: &MatchAssignment, truth: &[Segment], thresholds: &[f64]) -> Result<MatchScore> {
    let intervals: Vec<Segment> = predicted.matches.iter().map(|m| m.interval).collect();
    score_intervals(&intervals, truth, thresholds)
}

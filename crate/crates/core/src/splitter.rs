//! Division of a track into action segments at minima of hand speed.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::trajectory::{PoseTrack, VelocityProfile, DEFAULT_SMOOTHING_WINDOW};

/// Strictly increasing change-point times in seconds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChangePointSet {
    times: Vec<f64>,
}

impl ChangePointSet {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        for w in times.windows(2) {
            if w[1].partial_cmp(&w[0]) != Some(core::cmp::Ordering::Greater) {
                return Err(Error::InvalidInput(format!(
                    "change points must strictly increase: {} follows {}",
                    w[1], w[0]
                )));
            }
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite change point {t}")));
        }
        Ok(Self { times })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A half-open time interval `[start, end)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
}

impl Segment {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidInput(format!("segment [{start}, {end}] must have start < end")));
        }
        Ok(Self { start, end })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// Length of the intersection with `other`, zero when disjoint.
    pub fn overlap(&self, other: &Segment) -> f64 {
        (self.end.min(other.end) - self.start.max(other.start)).max(0.0)
    }

    /// Temporal intersection-over-union.
    pub fn iou(&self, other: &Segment) -> f64 {
        let inter = self.overlap(other);
        let union = self.duration() + other.duration() - inter;
        if union <= 0.0 {
            return 0.0;
        }
        inter / union
    }
}

/// Contiguous, ordered segments covering a track.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentList {
    segments: Vec<Segment>,
}

impl SegmentList {
    /// Builds segments from outer bounds and strictly interior boundaries.
    pub fn from_boundaries(start: f64, end: f64, interior: &[f64]) -> Result<Self> {
        let mut bounds = Vec::with_capacity(interior.len() + 2);
        bounds.push(start);
        bounds.extend_from_slice(interior);
        bounds.push(end);
        let segments = bounds
            .windows(2)
            .map(|w| Segment::new(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments })
    }

    /// Validates contiguity of an explicit segment list.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("segment list is empty".into()));
        }
        for s in &segments {
            Segment::new(s.start, s.end)?;
        }
        for w in segments.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::InvalidInput(format!(
                    "segments must be contiguous: {} != {}",
                    w[0].end, w[1].start
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.segments[0].start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    /// Interior boundaries, i.e. the change points the list encodes.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.start).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Moving-average window in samples; odd.
    pub window: usize,
    /// When set, minima closer than this many seconds are thinned, keeping
    /// the lower-speed one.
    pub min_separation: Option<f64>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_SMOOTHING_WINDOW,
            min_separation: None,
        }
    }
}

struct Minimum {
    t: f64,
    speed: f64,
}

fn interior_minima(profile: &VelocityProfile) -> Vec<Minimum> {
    let s = profile.samples();
    let n = s.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        // maximal run of equal speeds starting at i
        let mut j = i;
        while j + 1 < n && s[j + 1].speed == s[i].speed {
            j += 1;
        }
        if j + 1 < n && s[i - 1].speed > s[i].speed && s[j + 1].speed > s[j].speed {
            out.push(Minimum {
                t: 0.5 * (s[i].t + s[j].t),
                speed: s[i].speed,
            });
        }
        i = j + 1;
    }
    out
}

/// Interior local minima of the speed signal.
///
/// A run of equal speeds bounded on both sides by strictly higher speeds is
/// one minimum, reported at the run's temporal midpoint. Runs touching either
/// end of the profile are never reported.
pub fn find_velocity_minima(profile: &VelocityProfile) -> ChangePointSet {
    let times = interior_minima(profile).into_iter().map(|m| m.t).collect();
    ChangePointSet { times }
}

/// Like [`find_velocity_minima`], then greedily keeps the lowest-speed
/// minima so that no two kept points are closer than `min_separation`.
pub fn find_separated_minima(profile: &VelocityProfile, min_separation: f64) -> Result<ChangePointSet> {
    if !(min_separation.is_finite() && min_separation > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "minimum separation {min_separation} must be positive"
        )));
    }
    let mut candidates = interior_minima(profile);
    candidates.sort_by(|a, b| a.speed.total_cmp(&b.speed).then(a.t.total_cmp(&b.t)));
    let mut kept: Vec<f64> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| (k - c.t).abs() >= min_separation) {
            kept.push(c.t);
        }
    }
    kept.sort_by(f64::total_cmp);
    Ok(ChangePointSet { times: kept })
}

/// Smoothed-speed change points of a track.
pub fn detect_change_points(track: &PoseTrack, config: &SplitConfig) -> Result<ChangePointSet> {
    let profile = track.smooth(config.window)?.speed_profile();
    match config.min_separation {
        Some(sep) => find_separated_minima(&profile, sep),
        None => Ok(find_velocity_minima(&profile)),
    }
}

/// Splits a track at local minima of its smoothed hand speed. Track start
/// and end are the outer boundaries.
pub fn split(track: &PoseTrack, config: &SplitConfig) -> Result<SegmentList> {
    let cps = detect_change_points(track, config)?;
    SegmentList::from_boundaries(track.start(), track.end(), cps.times())
}

/// Fixed-period baseline: boundaries at `start + k * period` strictly
/// inside the track; the final partial segment is kept.
pub fn uniform_split(track: &PoseTrack, period: f64) -> Result<SegmentList> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!("period {period} must be positive")));
    }
    let (start, end) = (track.start(), track.end());
    // boundaries closer than this to the end would leave a sliver segment
    let eps = 1e-9 * (1.0 + end.abs());
    let mut interior = Vec::new();
    let mut k = 1u64;
    loop {
        let b = start + k as f64 * period;
        if b >= end - eps {
            break;
        }
        interior.push(b);
        if interior.len() >= track.len() {
            return Err(Error::InvalidParameter(format!(
                "period {period} s yields more segments than the track has frames ({})",
                track.len()
            )));
        }
        k += 1;
    }
    SegmentList::from_boundaries(start, end, &interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{PoseSample, SpeedSample};
    use alloc::vec;

    fn profile(speeds: &[f64], rate: f64) -> VelocityProfile {
        VelocityProfile::from_samples(
            speeds
                .iter()
                .enumerate()
                .map(|(k, &speed)| SpeedSample {
                    t: k as f64 / rate,
                    speed,
                })
                .collect(),
            1,
        )
        .unwrap()
    }

    /// Uniformly accelerating track: speed strictly increases.
    fn line_track(duration: f64, rate: f64) -> PoseTrack {
        let n = libm::round(duration * rate) as usize + 1;
        PoseTrack::new(
            (0..n)
                .map(|k| {
                    let t = k as f64 / rate;
                    PoseSample {
                        t,
                        position: [t * t, 0.0, 0.0],
                        confidence: None,
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn increasing_speed_has_no_minima() {
        assert!(find_velocity_minima(&profile(&[0.0, 1.0, 2.0, 3.0, 4.0], 1.0)).is_empty());
    }

    #[test]
    fn plateau_reports_midpoint() {
        let cps = find_velocity_minima(&profile(&[3.0, 1.0, 1.0, 1.0, 3.0], 1.0));
        assert_eq!(cps.times(), &[2.0]);
    }

    #[test]
    fn shelf_is_not_a_minimum() {
        // descends onto a shelf and keeps descending
        let cps = find_velocity_minima(&profile(&[3.0, 1.0, 1.0, 0.5, 2.0], 1.0));
        assert_eq!(cps.times(), &[3.0]);
    }

    #[test]
    fn endpoints_never_reported() {
        let cps = find_velocity_minima(&profile(&[0.0, 1.0, 0.5, 1.0, 0.0], 1.0));
        assert_eq!(cps.times(), &[2.0]);
        let cps = find_velocity_minima(&profile(&[1.0, 0.0, 0.0], 1.0));
        assert!(cps.is_empty());
    }

    #[test]
    fn separation_keeps_deeper_minimum() {
        let p = profile(&[5.0, 1.0, 2.0, 0.5, 5.0, 5.0, 0.7, 5.0], 1.0);
        assert_eq!(find_velocity_minima(&p).times(), &[1.0, 3.0, 6.0]);
        assert_eq!(find_separated_minima(&p, 2.5).unwrap().times(), &[3.0, 6.0]);
        assert!(find_separated_minima(&p, 0.0).is_err());
    }

    #[test]
    fn no_minima_yields_single_segment() {
        let t = line_track(1.0, 30.0);
        let s = split(&t, &SplitConfig::default()).unwrap();
        assert_eq!(s.segments(), &[Segment { start: 0.0, end: 1.0 }]);
    }

    #[test]
    fn uniform_exact_division() {
        let s = uniform_split(&line_track(2.0, 30.0), 0.5).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.boundaries(), vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn uniform_partial_tail() {
        let s = uniform_split(&line_track(2.3, 10.0), 0.5).unwrap();
        assert_eq!(s.len(), 5);
        assert!((s.segments()[4].duration() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn uniform_degenerate_and_invalid() {
        let t = line_track(1.0, 30.0);
        assert_eq!(uniform_split(&t, 1.0).unwrap().len(), 1);
        assert_eq!(uniform_split(&t, 5.0).unwrap().len(), 1);
        assert!(matches!(uniform_split(&t, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(uniform_split(&t, -1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(uniform_split(&t, 1e-4), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn iou_arithmetic() {
        let a = Segment::new(0.0, 10.0).unwrap();
        let b = Segment::new(5.0, 15.0).unwrap();
        assert!((a.iou(&b) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.iou(&a), 1.0);
        assert_eq!(a.iou(&Segment::new(20.0, 30.0).unwrap()), 0.0);
    }

    #[test]
    fn segment_list_validation() {
        assert!(SegmentList::new(vec![]).is_err());
        let a = Segment { start: 0.0, end: 1.0 };
        let b = Segment { start: 1.5, end: 2.0 };
        assert!(SegmentList::new(vec![a, b]).is_err());
        assert!(SegmentList::from_boundaries(0.0, 1.0, &[0.5, 0.5]).is_err());
    }
}

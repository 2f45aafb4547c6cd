//! Timestamped hand positions and the speed signal derived from them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::{vec3, Vec3};

/// Longest run of missing records that is bridged by interpolation.
pub const MAX_INTERPOLATED_GAP: usize = 3;

/// Fewest samples a track may hold; central differences need three.
pub const MIN_TRACK_SAMPLES: usize = 3;

/// Default moving-average window in samples (about 0.17 s at 30 Hz).
pub const DEFAULT_SMOOTHING_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub t: f64,
    pub position: Vec3,
    pub confidence: Option<f64>,
}

/// A raw record as read from a pose file. `position` is `None` when the
/// tracker dropped the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseRecord {
    pub t: f64,
    pub position: Option<Vec3>,
    pub confidence: Option<f64>,
}

/// Single-hand trajectory with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTrack {
    samples: Vec<PoseSample>,
    nominal_rate: f64,
    smoothing_window: usize,
}

impl PoseTrack {
    /// Validates samples and infers the nominal rate from the mean interval.
    pub fn new(samples: Vec<PoseSample>) -> Result<Self> {
        if samples.len() < MIN_TRACK_SAMPLES {
            return Err(Error::InsufficientData {
                needed: MIN_TRACK_SAMPLES,
                got: samples.len(),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() {
                return Err(Error::MalformedInput(format!("non-finite timestamp at row {i}")));
            }
            if !vec3::is_finite(s.position) {
                return Err(Error::MalformedInput(format!("non-finite position at t={}", s.t)));
            }
            if let Some(c) = s.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::MalformedInput(format!(
                        "confidence {c} outside [0, 1] at t={}",
                        s.t
                    )));
                }
            }
        }
        check_monotonic(samples.iter().map(|s| s.t))?;
        let duration = samples[samples.len() - 1].t - samples[0].t;
        let nominal_rate = (samples.len() - 1) as f64 / duration;
        Ok(Self {
            samples,
            nominal_rate,
            smoothing_window: 1,
        })
    }

    /// Builds a track from raw records, bridging short dropouts.
    ///
    /// Interior runs of at most [`MAX_INTERPOLATED_GAP`] missing records are
    /// filled by linear interpolation in time. Missing records before the
    /// first or after the last observed position are dropped.
    pub fn from_records(records: &[PoseRecord]) -> Result<Self> {
        check_monotonic(records.iter().map(|r| r.t))?;

        let observed = |r: &PoseRecord| r.position.is_some_and(vec3::is_finite);
        let Some(first) = records.iter().position(observed) else {
            return Err(Error::InsufficientData {
                needed: MIN_TRACK_SAMPLES,
                got: 0,
            });
        };
        let last = records.iter().rposition(observed).unwrap_or(first);

        let mut samples = Vec::with_capacity(last - first + 1);
        let mut i = first;
        while i <= last {
            let r = &records[i];
            if let Some(p) = r.position.filter(|p| vec3::is_finite(*p)) {
                samples.push(PoseSample {
                    t: r.t,
                    position: p,
                    confidence: r.confidence,
                });
                i += 1;
                continue;
            }
            // records[i - 1] is observed; find the next observed record
            let gap_end = (i..=last).find(|&k| observed(&records[k])).unwrap_or(last);
            let missing = gap_end - i;
            if missing > MAX_INTERPOLATED_GAP {
                return Err(Error::GapTooLong {
                    start_s: r.t,
                    missing,
                });
            }
            let before = &records[i - 1];
            let after = &records[gap_end];
            let (p0, p1) = (before.position.unwrap(), after.position.unwrap());
            for rec in &records[i..gap_end] {
                let w = (rec.t - before.t) / (after.t - before.t);
                samples.push(PoseSample {
                    t: rec.t,
                    position: vec3::add(p0, vec3::scale(vec3::sub(p1, p0), w)),
                    confidence: rec.confidence,
                });
            }
            i = gap_end;
        }
        Self::new(samples)
    }

    /// Overrides the inferred sampling rate.
    pub fn with_nominal_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!("nominal rate {rate} must be positive")));
        }
        self.nominal_rate = rate;
        Ok(self)
    }

    pub fn samples(&self) -> &[PoseSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nominal_rate(&self) -> f64 {
        self.nominal_rate
    }

    /// Effective moving-average support applied so far (1 for raw data).
    pub fn smoothing_window(&self) -> usize {
        self.smoothing_window
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.samples.iter().map(|s| s.position)
    }

    /// Positions whose timestamps fall inside `[start, end]`.
    pub fn positions_between(&self, start: f64, end: f64) -> Vec<Vec3> {
        self.samples
            .iter()
            .filter(|s| s.t >= start && s.t <= end)
            .map(|s| s.position)
            .collect()
    }

    /// Centered moving average of each coordinate.
    ///
    /// Near the ends the window shrinks symmetrically, down to a single
    /// sample at the first and last index. Timestamps are unchanged.
    pub fn smooth(&self, window: usize) -> Result<PoseTrack> {
        if window == 0 || window.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "smoothing window {window} must be odd and positive"
            )));
        }
        if window > self.len() {
            return Err(Error::InvalidParameter(format!(
                "smoothing window {window} exceeds track length {}",
                self.len()
            )));
        }
        let n = self.len();
        let half = window / 2;
        let samples = (0..n)
            .map(|i| {
                let h = half.min(i).min(n - 1 - i);
                let span = &self.samples[i - h..=i + h];
                let mut acc = [0.0; 3];
                for s in span {
                    acc = vec3::add(acc, s.position);
                }
                PoseSample {
                    position: vec3::scale(acc, 1.0 / span.len() as f64),
                    ..self.samples[i]
                }
            })
            .collect();
        Ok(PoseTrack {
            samples,
            nominal_rate: self.nominal_rate,
            smoothing_window: self.smoothing_window + window - 1,
        })
    }

    /// Hand speed at every sample: central differences in the interior,
    /// one-sided differences at the two endpoints.
    pub fn speed_profile(&self) -> VelocityProfile {
        let s = &self.samples;
        let n = s.len();
        let rate = |a: usize, b: usize| {
            vec3::norm(vec3::sub(s[b].position, s[a].position)) / (s[b].t - s[a].t)
        };
        let samples = (0..n)
            .map(|i| {
                let speed = if i == 0 {
                    rate(0, 1)
                } else if i == n - 1 {
                    rate(n - 2, n - 1)
                } else {
                    rate(i - 1, i + 1)
                };
                SpeedSample { t: s[i].t, speed }
            })
            .collect();
        VelocityProfile {
            samples,
            window: self.smoothing_window,
        }
    }
}

fn check_monotonic(times: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev: Option<f64> = None;
    for t in times {
        if !t.is_finite() {
            return Err(Error::MalformedInput(format!("non-finite timestamp {t}")));
        }
        if let Some(p) = prev {
            if t <= p {
                return Err(Error::MalformedInput(format!(
                    "timestamps must strictly increase: {t} follows {p}"
                )));
            }
        }
        prev = Some(t);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSample {
    pub t: f64,
    /// m/s
    pub speed: f64,
}

/// Scalar hand speed over time.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityProfile {
    samples: Vec<SpeedSample>,
    window: usize,
}

impl VelocityProfile {
    /// Builds a profile directly from speed values; used for tests and for
    /// callers that compute speed elsewhere.
    pub fn from_samples(samples: Vec<SpeedSample>, window: usize) -> Result<Self> {
        check_monotonic(samples.iter().map(|s| s.t))?;
        if let Some(bad) = samples.iter().find(|s| !(s.speed.is_finite() && s.speed >= 0.0)) {
            return Err(Error::MalformedInput(format!(
                "speed {} at t={} must be finite and non-negative",
                bad.speed, bad.t
            )));
        }
        Ok(Self { samples, window })
    }

    pub fn samples(&self) -> &[SpeedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

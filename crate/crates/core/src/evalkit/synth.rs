use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::lexdist::{EmbeddingTable, Sentence};
use crate::matcher::{DescribedSegment, DescribedSegments, InstructionScript};
use crate::splitter::{ChangePointSet, Segment};
use crate::trajectory::{PoseSample, PoseTrack};
use crate::{vec3, Vec3};

/// Nominal skeleton-tracker rate.
pub const SAMPLE_RATE_HZ: f64 = 30.0;

/// Shortest step the generator accepts, in samples.
const MIN_STEP_SAMPLES: f64 = 3.0;

/// Action captions used by randomly sampled plans.
pub const DEFAULT_CAPTIONS: &[&str] = &[
    "open a microwave",
    "put a cup into the microwave",
    "close the microwave",
    "pick up a bottle",
    "place the bottle on a tray",
    "open a drawer",
    "close the drawer",
    "take a cup from a desk",
    "pour water into a glass",
    "wipe the table with a cloth",
    "push a button",
    "hang a towel on the rack",
];

/// Words that get nearly identical vectors in [`toy_embeddings`].
const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "at", "from", "in", "into", "of", "on", "onto", "the", "to", "with",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PlanStep {
    /// Minimum-jerk point-to-point reach to `to`.
    Reach {
        to: Vec3,
        duration: f64,
        caption: String,
    },
    /// Minimum-jerk swing along a circular arc: the hand turns by `angle`
    /// radians about the line through `center` along `axis`, like a door
    /// handle.
    Arc {
        center: Vec3,
        axis: Vec3,
        angle: f64,
        duration: f64,
        caption: String,
    },
    /// Hand rests in place; the section is captioned "nothing".
    Dwell { duration: f64 },
}

impl PlanStep {
    pub fn duration(&self) -> f64 {
        match self {
            PlanStep::Reach { duration, .. } | PlanStep::Arc { duration, .. } | PlanStep::Dwell { duration } => {
                *duration
            }
        }
    }
}

/// Scripted demonstration: a start position and a sequence of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoPlan {
    pub start: Vec3,
    pub steps: Vec<PlanStep>,
    pub rate: f64,
}

impl DemoPlan {
    pub fn new(start: Vec3, steps: Vec<PlanStep>) -> Self {
        Self {
            start,
            steps,
            rate: SAMPLE_RATE_HZ,
        }
    }

    /// Steps that move the hand (reaches and arcs).
    pub fn reach_count(&self) -> usize {
        self.steps.iter().filter(|s| !matches!(s, PlanStep::Dwell { .. })).count()
    }

    pub fn duration(&self) -> f64 {
        self.steps.iter().map(PlanStep::duration).sum()
    }
}

/// Generated demonstration with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDemo {
    pub track: PoseTrack,
    /// Interior step boundaries.
    pub true_change_points: ChangePointSet,
    /// One segment per plan step; dwells are captioned "nothing".
    pub truth: DescribedSegments,
    /// Reach captions in order.
    pub script: InstructionScript,
    /// Indices into `truth` of the dwell sections.
    pub noise_sections: Vec<usize>,
}

impl SyntheticDemo {
    /// Ground-truth interval of each instruction.
    pub fn instruction_intervals(&self) -> Vec<Segment> {
        self.truth
            .items()
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.noise_sections.contains(k))
            .map(|(_, d)| d.segment)
            .collect()
    }
}

/// Normalized minimum-jerk position profile on `[0, 1]`.
pub fn min_jerk(tau: f64) -> f64 {
    let tau = tau.clamp(0.0, 1.0);
    let t3 = tau * tau * tau;
    t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau)
}

/// Samples a plan at `plan.rate`, adding i.i.d. Gaussian position noise of
/// standard deviation `noise_sigma` and a Brownian-bridge jitter of
/// `noise_sigma / 3` per step inside dwells. Deterministic for a fixed seed.
pub fn synthesize(plan: &DemoPlan, noise_sigma: f64, seed: u64) -> Result<SyntheticDemo> {
    if plan.reach_count() == 0 {
        return Err(Error::InvalidParameter("plan needs at least two waypoints".into()));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise sigma {noise_sigma} must be non-negative")));
    }
    if !(plan.rate.is_finite() && plan.rate > 0.0) {
        return Err(Error::InvalidParameter(format!("sample rate {} must be positive", plan.rate)));
    }
    let min_step = MIN_STEP_SAMPLES / plan.rate;
    if let Some(s) = plan.steps.iter().find(|s| s.duration().is_nan() || s.duration() < min_step) {
        return Err(Error::InvalidParameter(format!(
            "step duration {} is shorter than {min_step} s",
            s.duration()
        )));
    }
    if !vec3::is_finite(plan.start) {
        return Err(Error::InvalidParameter("start position is not finite".into()));
    }
    for step in &plan.steps {
        if let PlanStep::Arc { center, axis, angle, .. } = step {
            if !(vec3::is_finite(*center) && angle.is_finite() && vec3::norm(*axis) > 0.0) {
                return Err(Error::InvalidParameter("arc needs a finite center and angle and a non-zero axis".into()));
            }
        }
    }

    let mut bounds = Vec::with_capacity(plan.steps.len() + 1);
    let mut waypoints = Vec::with_capacity(plan.steps.len() + 1);
    bounds.push(0.0);
    waypoints.push(plan.start);
    for step in &plan.steps {
        bounds.push(bounds[bounds.len() - 1] + step.duration());
        let prev = waypoints[waypoints.len() - 1];
        waypoints.push(match step {
            PlanStep::Reach { to, .. } => *to,
            PlanStep::Arc { center, axis, angle, .. } => rotate_about(prev, *center, *axis, *angle),
            PlanStep::Dwell { .. } => prev,
        });
    }
    let total = bounds[bounds.len() - 1];
    let n = libm::floor(total * plan.rate + 1e-9) as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| k as f64 / plan.rate).collect();
    let end = times[n - 1];

    let mut step_of = Vec::with_capacity(n);
    let mut s = 0;
    for &t in &times {
        while s + 1 < plan.steps.len() && t >= bounds[s + 1] {
            s += 1;
        }
        step_of.push(s);
    }

    let mut positions: Vec<Vec3> = times
        .iter()
        .zip(&step_of)
        .map(|(&t, &s)| match &plan.steps[s] {
            PlanStep::Reach { duration, .. } => {
                let w = min_jerk((t - bounds[s]) / duration);
                let (a, b) = (waypoints[s], waypoints[s + 1]);
                vec3::add(a, vec3::scale(vec3::sub(b, a), w))
            }
            PlanStep::Arc {
                center,
                axis,
                angle,
                duration,
                ..
            } => rotate_about(waypoints[s], *center, *axis, angle * min_jerk((t - bounds[s]) / duration)),
            PlanStep::Dwell { .. } => waypoints[s],
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if noise_sigma > 0.0 {
        let jitter = noise_sigma / 3.0;
        for (s, step) in plan.steps.iter().enumerate() {
            let PlanStep::Dwell { duration } = step else { continue };
            let idx: Vec<usize> = (0..n).filter(|&k| step_of[k] == s && times[k] > bounds[s]).collect();
            // random walk pinned to zero at both ends of the dwell
            let mut walk = Vec::with_capacity(idx.len() + 1);
            let mut acc = [0.0; 3];
            for _ in 0..=idx.len() {
                acc = vec3::add(acc, gaussian3(&mut rng, jitter));
                walk.push(acc);
            }
            let last = walk[idx.len()];
            for (w, &k) in walk.iter().zip(&idx) {
                let frac = (times[k] - bounds[s]) / duration;
                let bridge = vec3::sub(*w, vec3::scale(last, frac));
                positions[k] = vec3::add(positions[k], bridge);
            }
        }
        for p in positions.iter_mut() {
            *p = vec3::add(*p, gaussian3(&mut rng, noise_sigma));
        }
    }

    let track = PoseTrack::new(
        times
            .iter()
            .zip(&positions)
            .map(|(&t, &position)| PoseSample {
                t,
                position,
                confidence: None,
            })
            .collect(),
    )?
    .with_nominal_rate(plan.rate)?;

    let mut items = Vec::with_capacity(plan.steps.len());
    let mut script = Vec::new();
    let mut noise_sections = Vec::new();
    for (s, step) in plan.steps.iter().enumerate() {
        let seg_end = if s + 1 == plan.steps.len() { end } else { bounds[s + 1] };
        let description = match step {
            PlanStep::Reach { caption, .. } | PlanStep::Arc { caption, .. } => {
                let sentence = Sentence::parse(caption)?;
                script.push(sentence.clone());
                sentence
            }
            PlanStep::Dwell { .. } => {
                noise_sections.push(s);
                Sentence::nothing()
            }
        };
        items.push(DescribedSegment {
            segment: Segment::new(bounds[s], seg_end)?,
            description,
        });
    }

    Ok(SyntheticDemo {
        track,
        true_change_points: ChangePointSet::new(bounds[1..bounds.len() - 1].to_vec())?,
        truth: DescribedSegments::new(items)?,
        script: InstructionScript::new(script)?,
        noise_sections,
    })
}

/// Rotates `p` by `angle` about the line through `center` along `axis`.
fn rotate_about(p: Vec3, center: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let k = vec3::scale(axis, 1.0 / vec3::norm(axis));
    let v = vec3::sub(p, center);
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    let along = vec3::scale(k, vec3::dot(k, v) * (1.0 - c));
    let rotated = vec3::add(vec3::add(vec3::scale(v, c), vec3::scale(vec3::cross(k, v), s)), along);
    vec3::add(center, rotated)
}

fn gaussian3(rng: &mut ChaCha8Rng, sigma: f64) -> Vec3 {
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    [normal.sample(rng), normal.sample(rng), normal.sample(rng)]
}

/// Draws random plans for evaluation suites.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSampler {
    /// Inclusive range of waypoint counts, start included.
    pub waypoints: (usize, usize),
    pub reach_duration: (f64, f64),
    /// Reach displacement in meters.
    pub reach_distance: (f64, f64),
    /// Dwells inserted between distinct pairs of reaches.
    pub dwells: usize,
    pub dwell_duration: (f64, f64),
    pub captions: Vec<String>,
}

impl Default for PlanSampler {
    fn default() -> Self {
        Self {
            waypoints: (3, 6),
            reach_duration: (0.8, 1.6),
            reach_distance: (0.15, 0.4),
            dwells: 0,
            dwell_duration: (0.6, 1.2),
            captions: DEFAULT_CAPTIONS.iter().map(ToString::to_string).collect(),
        }
    }
}

impl PlanSampler {
    pub fn sample(&self, seed: u64) -> Result<DemoPlan> {
        let (lo, hi) = self.waypoints;
        if lo < 2 || hi < lo {
            return Err(Error::InvalidParameter(format!("waypoint range ({lo}, {hi}) is invalid")));
        }
        if self.captions.len() < hi - 1 {
            return Err(Error::InvalidParameter(format!(
                "{} captions cannot label {} distinct reaches",
                self.captions.len(),
                hi - 1
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reaches = rng.random_range(lo..=hi) - 1;
        let picks = index::sample(&mut rng, self.captions.len(), reaches);

        let start: Vec3 = [
            rng.random_range(-0.2..0.2),
            rng.random_range(-0.2..0.2),
            rng.random_range(0.6..1.0),
        ];
        let dwell_count = self.dwells.min(reaches.saturating_sub(1));
        let mut gaps: Vec<usize> = index::sample(&mut rng, reaches.saturating_sub(1).max(1), dwell_count)
            .into_iter()
            .collect();
        gaps.sort_unstable();

        let mut steps = Vec::new();
        let mut at = start;
        for r in 0..reaches {
            let dir = unit_direction(&mut rng);
            let dist = rng.random_range(self.reach_distance.0..=self.reach_distance.1);
            at = vec3::add(at, vec3::scale(dir, dist));
            steps.push(PlanStep::Reach {
                to: at,
                duration: rng.random_range(self.reach_duration.0..=self.reach_duration.1),
                caption: self.captions[picks.index(r)].clone(),
            });
            if gaps.contains(&r) {
                steps.push(PlanStep::Dwell {
                    duration: rng.random_range(self.dwell_duration.0..=self.dwell_duration.1),
                });
            }
        }
        Ok(DemoPlan::new(start, steps))
    }
}

fn unit_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = vec3::norm(v);
        if n > 1e-6 {
            return vec3::scale(v, 1.0 / n);
        }
    }
}

fn fnv1a(word: &str) -> u64 {
    word.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Deterministic stand-in embedding table for tests and demos.
///
/// Function words sit in a tight cluster; every other word gets an
/// independent Gaussian vector of norm about 1.5, so unrelated content words
/// are roughly 2.1 apart. A word's vector depends only on the word and
/// `seed`.
pub fn toy_embeddings<'a>(words: impl IntoIterator<Item = &'a str>, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new(dim)?;
    let content_sd = 1.5 / libm::sqrt(dim as f64);
    let mut base_rng = ChaCha8Rng::seed_from_u64(seed);
    let hub: Vec<f64> = (0..dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut base_rng);
            0.3 / libm::sqrt(dim as f64) * z
        })
        .collect();
    for word in words {
        if table.contains(word) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(word));
        let v: Vec<f64> = if FUNCTION_WORDS.contains(&word) {
            hub.iter()
                .map(|h| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    h + 0.05 / libm::sqrt(dim as f64) * z
                })
                .collect()
        } else {
            (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    content_sd * z
                })
                .collect()
        };
        table.insert(word, v)?;
    }
    Ok(table)
}

/// Every token of the given captions plus the "nothing" label.
pub fn caption_vocabulary<'a>(captions: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut words: Vec<String> = Vec::new();
    for c in captions {
        if let Ok(s) = Sentence::parse(c) {
            for t in s.tokens() {
                if !words.contains(t) {
                    words.push(t.clone());
                }
            }
        }
    }
    if !words.iter().any(|w| w == crate::lexdist::NOTHING) {
        words.push(crate::lexdist::NOTHING.to_string());
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn reach(to: Vec3, duration: f64, caption: &str) -> PlanStep {
        PlanStep::Reach {
            to,
            duration,
            caption: caption.to_string(),
        }
    }

    #[test]
    fn min_jerk_endpoints() {
        assert_eq!(min_jerk(0.0), 0.0);
        assert_eq!(min_jerk(1.0), 1.0);
        assert!((min_jerk(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_waypoints_no_noise() {
        let plan = DemoPlan::new([0.0; 3], vec![reach([0.3, 0.0, 0.0], 1.0, "open a drawer")]);
        let demo = synthesize(&plan, 0.0, 1).unwrap();
        assert!(demo.true_change_points.is_empty());
        assert_eq!(demo.script.len(), 1);
        assert_eq!(demo.track.len(), 31);
        assert_eq!(demo.track.samples()[30].position, [0.3, 0.0, 0.0]);
    }

    #[test]
    fn dwell_becomes_noise_section() {
        let plan = DemoPlan::new(
            [0.0; 3],
            vec![
                reach([0.3, 0.0, 0.0], 1.0, "open a microwave"),
                reach([0.3, 0.3, 0.0], 1.0, "put a cup"),
                PlanStep::Dwell { duration: 0.8 },
                reach([0.0, 0.3, 0.0], 1.0, "close the microwave"),
            ],
        );
        let demo = synthesize(&plan, 0.001, 7).unwrap();
        assert_eq!(demo.truth.len(), 4);
        assert_eq!(demo.noise_sections, vec![2]);
        assert_eq!(demo.script.len(), 3);
        assert!(demo.truth.items()[2].description.is_nothing());
        assert_eq!(demo.true_change_points.times(), &[1.0, 2.0, 2.8]);
        let intervals = demo.instruction_intervals();
        assert_eq!(intervals.len(), 3);
        assert_eq!(intervals[2].start, 2.8);
    }

    #[test]
    fn arc_keeps_its_radius() {
        let plan = DemoPlan::new(
            [0.4, 0.0, 1.0],
            vec![PlanStep::Arc {
                center: [0.0, 0.0, 1.0],
                axis: [0.0, 0.0, 1.0],
                angle: 1.2,
                duration: 1.5,
                caption: "open a microwave".into(),
            }],
        );
        let demo = synthesize(&plan, 0.0, 0).unwrap();
        for s in demo.track.samples() {
            let [x, y, z] = s.position;
            assert!((libm::sqrt(x * x + y * y) - 0.4).abs() < 1e-12);
            assert_eq!(z, 1.0);
        }
        let last = demo.track.samples().last().unwrap().position;
        assert!((libm::atan2(last[1], last[0]) - 1.2).abs() < 1e-12);
        assert_eq!(demo.script.len(), 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let plan = PlanSampler {
            dwells: 1,
            ..Default::default()
        }
        .sample(3)
        .unwrap();
        let a = synthesize(&plan, 0.002, 11).unwrap();
        let b = synthesize(&plan, 0.002, 11).unwrap();
        assert_eq!(a, b);
        let c = synthesize(&plan, 0.002, 12).unwrap();
        assert_ne!(a.track, c.track);
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(synthesize(&DemoPlan::new([0.0; 3], vec![PlanStep::Dwell { duration: 1.0 }]), 0.0, 0).is_err());
        let short = DemoPlan::new([0.0; 3], vec![reach([1.0, 0.0, 0.0], 0.05, "open")]);
        assert!(synthesize(&short, 0.0, 0).is_err());
    }

    #[test]
    fn sampler_respects_ranges() {
        let sampler = PlanSampler {
            dwells: 2,
            ..Default::default()
        };
        for seed in 0..20 {
            let plan = sampler.sample(seed).unwrap();
            let reaches = plan.reach_count();
            assert!((2..=5).contains(&reaches));
            let dwells = plan.steps.len() - reaches;
            assert_eq!(dwells, 2.min(reaches - 1));
            assert!(matches!(plan.steps[0], PlanStep::Reach { .. }));
            assert!(matches!(plan.steps.last(), Some(PlanStep::Reach { .. })));
        }
    }

    #[test]
    fn toy_table_geometry() {
        let vocab = caption_vocabulary(DEFAULT_CAPTIONS.iter().copied());
        let t = toy_embeddings(vocab.iter().map(String::as_str), 16, 5).unwrap();
        assert!(t.contains("nothing"));
        let d = |a: &str, b: &str| {
            let (x, y) = (t.get(a).unwrap(), t.get(b).unwrap());
            libm::sqrt(x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum())
        };
        assert!(d("a", "the") < 0.3);
        assert!(d("open", "close") > 1.0);
        // vectors depend on the word, not on insertion order
        let rev = toy_embeddings(vocab.iter().rev().map(String::as_str), 16, 5).unwrap();
        assert_eq!(rev, t);
    }
}

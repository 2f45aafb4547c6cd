use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lexdist::Sentence;
use crate::matcher::DescribedSegments;
use crate::splitter::{Segment, SegmentList};

/// Index of the item in `truth` overlapping `segment` the most; the earliest
/// wins ties.
pub fn max_overlap(truth: &DescribedSegments, segment: &Segment) -> usize {
    let mut best = 0;
    let mut best_overlap = f64::NEG_INFINITY;
    for (k, item) in truth.items().iter().enumerate() {
        let o = item.segment.overlap(segment);
        if o > best_overlap {
            best = k;
            best_overlap = o;
        }
    }
    best
}

/// Distinct captions of `truth` in order of first appearance, plus
/// "nothing" when it does not occur.
pub fn caption_pool(truth: &DescribedSegments) -> Vec<Sentence> {
    let mut pool: Vec<Sentence> = Vec::new();
    for item in truth.items() {
        if !pool.iter().any(|p| p.tokens() == item.description.tokens()) {
            pool.push(item.description.clone());
        }
    }
    if !pool.iter().any(Sentence::is_nothing) {
        pool.push(Sentence::nothing());
    }
    pool
}

/// Stand-in captioner: each segment gets the ground-truth caption it
/// overlaps most, replaced with probability `error_rate` by a different
/// caption drawn uniformly from [`caption_pool`].
pub fn mock_caption(
    truth: &DescribedSegments,
    segments: &SegmentList,
    error_rate: f64,
    seed: u64,
) -> Result<DescribedSegments> {
    if !(0.0..=1.0).contains(&error_rate) {
        return Err(Error::InvalidParameter(format!("error rate {error_rate} outside [0, 1]")));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("ground truth has no segments".into()));
    }
    let pool = caption_pool(truth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let descriptions = segments
        .segments()
        .iter()
        .map(|seg| {
            let correct = &truth.items()[max_overlap(truth, seg)].description;
            let draw: f64 = rng.random();
            let others: Vec<&Sentence> = pool.iter().filter(|p| p.tokens() != correct.tokens()).collect();
            if draw < error_rate && !others.is_empty() {
                others[rng.random_range(0..others.len())].clone()
            } else {
                correct.clone()
            }
        })
        .collect();
    DescribedSegments::from_parts(segments, descriptions)
}

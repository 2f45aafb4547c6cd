//! Alignment of segment descriptions to an ordered instruction script.
//!
//! Each instruction, in order, may first skip `k >= 0` segments and then
//! claims a group of `g >= 1` consecutive segments. Writing `D(s, j)` for
//! the distance between description `s` and instruction `j`, the cost of
//! that step is
//!
//! ```text
//! c_skip * k + c_dist * D(first, j) + c_group * GD(group)
//! ```
//!
//! where `GD` accumulates over the group members after the first, either as
//! their distance to the instruction or as caption-to-caption distances
//! along the group ([`GroupDistance`]). Segments after the last instruction
//! are skipped at `c_skip` each.
//!
//! The table `best[i][j]` holds the optimal cost of covering segments
//! `i..M` with instructions `j..N`, so
//!
//! ```text
//! best[i][N] = c_skip * (M - i)
//! best[M][j] = inf                          (j < N)
//! best[i][j] = min over k, g of step(i, j, k, g) + best[i + k + g][j + 1]
//! ```
//!
//! Ties go to the smallest `k`, then the smallest `g`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::lexdist::{self, DistanceConfig, EmbeddingTable, Sentence};
use crate::splitter::{Segment, SegmentList};

#[derive(Debug, Clone, PartialEq)]
pub struct DescribedSegment {
    pub segment: Segment,
    pub description: Sentence,
}

/// Segments paired with motion descriptions.
#[derive(Debug, Clone, PartialEq)]
pub struct DescribedSegments {
    items: Vec<DescribedSegment>,
}

impl DescribedSegments {
    pub fn new(items: Vec<DescribedSegment>) -> Result<Self> {
        SegmentList::new(items.iter().map(|d| d.segment).collect())?;
        Ok(Self { items })
    }

    /// Pairs a segment list with one description per segment.
    pub fn from_parts(segments: &SegmentList, descriptions: Vec<Sentence>) -> Result<Self> {
        if segments.len() != descriptions.len() {
            return Err(Error::InvalidInput(format!(
                "{} descriptions for {} segments",
                descriptions.len(),
                segments.len()
            )));
        }
        Ok(Self {
            items: segments
                .segments()
                .iter()
                .zip(descriptions)
                .map(|(&segment, description)| DescribedSegment {
                    segment,
                    description,
                })
                .collect(),
        })
    }

    pub fn items(&self) -> &[DescribedSegment] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn segment_list(&self) -> SegmentList {
        SegmentList::new(self.items.iter().map(|d| d.segment).collect())
            .expect("validated on construction")
    }
}

/// Ordered verbal instructions.
#[derive(Debug, Clone, PartialEq)]
pub struct InstructionScript {
    instructions: Vec<Sentence>,
}

impl InstructionScript {
    pub fn new(instructions: Vec<Sentence>) -> Result<Self> {
        if instructions.is_empty() {
            return Err(Error::InvalidInput("instruction script is empty".into()));
        }
        if let Some(k) = instructions.iter().position(Sentence::is_nothing) {
            return Err(Error::InvalidInput(format!(
                "instruction {k} is the reserved \"nothing\" label"
            )));
        }
        Ok(Self { instructions })
    }

    pub fn instructions(&self) -> &[Sentence] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCosts {
    pub c_dist: f64,
    pub c_group: f64,
    pub c_skip: f64,
}

impl Default for MatchCosts {
    fn default() -> Self {
        Self {
            c_dist: 1.0,
            c_group: 0.5,
            c_skip: 0.5,
        }
    }
}

impl MatchCosts {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_dist", self.c_dist), ("c_group", self.c_group), ("c_skip", self.c_skip)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

/// How the grouped members after the first one are charged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupDistance<'a> {
    /// Each extra member pays its own distance to the instruction.
    ToInstruction,
    /// Each extra member pays the distance from the previous member's
    /// description; `chain[m]` is the distance between descriptions `m` and
    /// `m + 1`.
    Chain(&'a [f64]),
}

/// Row-major `rows x cols` matrix of non-negative distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("distance {v} must be finite and non-negative")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Copy with every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

/// Description-to-instruction distances, one row per segment.
pub fn build_distance_matrix(
    segs: &DescribedSegments,
    script: &InstructionScript,
    table: &EmbeddingTable,
    cfg: &DistanceConfig,
) -> Result<DistanceMatrix> {
    cfg.validate()?;
    let mut data = Vec::with_capacity(segs.len() * script.len());
    for item in segs.items() {
        for instr in script.instructions() {
            data.push(lexdist::instruction_distance(&item.description, instr, table, cfg)?);
        }
    }
    DistanceMatrix::new(segs.len(), script.len(), data)
}

/// Distances between consecutive descriptions, for [`GroupDistance::Chain`].
pub fn build_chain_distances(
    segs: &DescribedSegments,
    table: &EmbeddingTable,
    cfg: &DistanceConfig,
) -> Result<Vec<f64>> {
    segs.items()
        .windows(2)
        .map(|w| lexdist::description_distance(&w[0].description, &w[1].description, table, cfg))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostBreakdown {
    pub skip: f64,
    pub dist: f64,
    pub group: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.skip + self.dist + self.group
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstructionMatch {
    pub instruction: usize,
    /// Indices of the grouped segments.
    pub segments: Range<usize>,
    /// Segments skipped immediately before the group.
    pub skipped_before: Range<usize>,
    pub interval: Segment,
    pub cost: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchAssignment {
    pub matches: Vec<InstructionMatch>,
    /// Ascending indices of segments assigned to no instruction.
    pub skipped: Vec<usize>,
    /// Cost of the segments left over after the last instruction.
    pub trailing_skip_cost: f64,
    pub total_cost: f64,
}

#[derive(Clone, Copy)]
struct Choice {
    skip: usize,
    group: usize,
}

/// Optimal monotone assignment of segments to instructions.
pub fn match_segments(
    segs: &DescribedSegments,
    script: &InstructionScript,
    matrix: &DistanceMatrix,
    costs: &MatchCosts,
    group: GroupDistance<'_>,
) -> Result<MatchAssignment> {
    let (m, n) = (segs.len(), script.len());
    if matrix.rows() != m || matrix.cols() != n {
        return Err(Error::InvalidInput(format!(
            "distance matrix is {}x{}, expected {m}x{n}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if let GroupDistance::Chain(chain) = group {
        if chain.len() + 1 != m {
            return Err(Error::InvalidInput(format!(
                "{} chain distances for {m} segments",
                chain.len()
            )));
        }
    }
    let plan = solve(matrix, costs, group)?;
    let items = segs.items();

    let mut matches = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    let mut i = 0;
    for (j, choice) in plan.choices.iter().enumerate() {
        let first = i + choice.skip;
        let end = first + choice.group;
        skipped.extend(i..first);
        let group_cost = (first + 1..end)
            .map(|s| member_distance(matrix, group, s, j))
            .sum::<f64>();
        matches.push(InstructionMatch {
            instruction: j,
            segments: first..end,
            skipped_before: i..first,
            interval: Segment {
                start: items[first].segment.start,
                end: items[end - 1].segment.end,
            },
            cost: CostBreakdown {
                skip: costs.c_skip * choice.skip as f64,
                dist: costs.c_dist * matrix.get(first, j),
                group: costs.c_group * group_cost,
            },
        });
        i = end;
    }
    skipped.extend(i..m);

    Ok(MatchAssignment {
        matches,
        skipped,
        trailing_skip_cost: costs.c_skip * (m - i) as f64,
        total_cost: plan.total_cost,
    })
}

fn member_distance(matrix: &DistanceMatrix, group: GroupDistance<'_>, seg: usize, instr: usize) -> f64 {
    match group {
        GroupDistance::ToInstruction => matrix.get(seg, instr),
        GroupDistance::Chain(chain) => chain[seg - 1],
    }
}

struct Plan {
    choices: Vec<Choice>,
    total_cost: f64,
}

fn solve(matrix: &DistanceMatrix, costs: &MatchCosts, group: GroupDistance<'_>) -> Result<Plan> {
    costs.validate()?;
    let (m, n) = (matrix.rows(), matrix.cols());
    if m < n {
        return Err(Error::Infeasible {
            segments: m,
            instructions: n,
        });
    }

    let width = n + 1;
    let mut best = vec![f64::INFINITY; (m + 1) * width];
    let mut choice = vec![Choice { skip: 0, group: 0 }; (m + 1) * width];
    for i in 0..=m {
        best[i * width + n] = costs.c_skip * (m - i) as f64;
    }

    for j in (0..n).rev() {
        // instructions j.. need at least n - j segments
        let remaining = n - j;
        for i in (0..=m - remaining).rev() {
            let mut cell = f64::INFINITY;
            let mut pick = Choice { skip: 0, group: 0 };
            for skip in 0..=(m - i - remaining) {
                let first = i + skip;
                let head = costs.c_skip * skip as f64 + costs.c_dist * matrix.get(first, j);
                let mut grouped = 0.0;
                for g in 1..=(m - first - (remaining - 1)) {
                    if g > 1 {
                        grouped += member_distance(matrix, group, first + g - 1, j);
                    }
                    let rest = best[(first + g) * width + j + 1];
                    let total = head + costs.c_group * grouped + rest;
                    if total < cell {
                        cell = total;
                        pick = Choice { skip, group: g };
                    }
                }
            }
            best[i * width + j] = cell;
            choice[i * width + j] = pick;
        }
    }

    let total_cost = best[0];
    if !total_cost.is_finite() {
        return Err(Error::Infeasible {
            segments: m,
            instructions: n,
        });
    }
    let mut choices = Vec::with_capacity(n);
    let mut i = 0;
    for j in 0..n {
        let c = choice[i * width + j];
        choices.push(c);
        i += c.skip + c.group;
    }
    Ok(Plan { choices, total_cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn described(captions: &[&str]) -> DescribedSegments {
        let bounds: Vec<f64> = (1..captions.len()).map(|k| k as f64).collect();
        let list = SegmentList::from_boundaries(0.0, captions.len() as f64, &bounds).unwrap();
        DescribedSegments::from_parts(
            &list,
            captions.iter().map(|c| Sentence::parse(c).unwrap()).collect(),
        )
        .unwrap()
    }

    fn script(lines: &[&str]) -> InstructionScript {
        InstructionScript::new(lines.iter().map(|c| Sentence::parse(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn identity_on_zero_diagonal() {
        let segs = described(&["a", "b", "c"]);
        let sc = script(&["a", "b", "c"]);
        let mut data = vec![1.0; 9];
        for k in 0..3 {
            data[k * 3 + k] = 0.0;
        }
        let mx = DistanceMatrix::new(3, 3, data).unwrap();
        let a = match_segments(&segs, &sc, &mx, &MatchCosts::default(), GroupDistance::ToInstruction).unwrap();
        assert_eq!(a.total_cost, 0.0);
        assert!(a.skipped.is_empty());
        for (j, mt) in a.matches.iter().enumerate() {
            assert_eq!(mt.segments, j..j + 1);
        }
    }

    #[test]
    fn noise_segment_is_skipped() {
        let segs = described(&["open", "nothing", "close"]);
        let sc = script(&["open", "close"]);
        let c_nothing = 5.0;
        let mx = DistanceMatrix::new(3, 2, vec![0.0, 1.0, c_nothing, c_nothing, 1.0, 0.0]).unwrap();
        let a = match_segments(&segs, &sc, &mx, &MatchCosts::default(), GroupDistance::ToInstruction).unwrap();
        assert_eq!(a.skipped, vec![1]);
        assert_eq!(a.matches[0].segments, 0..1);
        assert_eq!(a.matches[1].segments, 2..3);
        assert_eq!(a.matches[1].skipped_before, 1..2);
        assert_eq!(a.total_cost, 0.5);
        assert_eq!(a.matches[1].interval, Segment { start: 2.0, end: 3.0 });
    }

    #[test]
    fn grouping_spans_union() {
        let segs = described(&["open", "open", "close"]);
        let sc = script(&["open", "close"]);
        let mx = DistanceMatrix::new(3, 2, vec![0.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        let a = match_segments(&segs, &sc, &mx, &MatchCosts::default(), GroupDistance::ToInstruction).unwrap();
        assert_eq!(a.matches[0].segments, 0..2);
        assert_eq!(a.matches[0].interval, Segment { start: 0.0, end: 2.0 });
        assert!(a.skipped.is_empty());
    }

    #[test]
    fn too_few_segments() {
        let segs = described(&["a"]);
        let sc = script(&["a", "b"]);
        let mx = DistanceMatrix::new(1, 2, vec![0.0, 0.0]).unwrap();
        assert_eq!(
            match_segments(&segs, &sc, &mx, &MatchCosts::default(), GroupDistance::ToInstruction),
            Err(Error::Infeasible { segments: 1, instructions: 2 })
        );
    }

    #[test]
    fn ties_prefer_tight_groups() {
        // with zero distances and free skips every assignment costs 0, so the
        // tie-break alone decides: one segment each, the rest trailing
        let segs = described(&["a", "a", "a", "a"]);
        let sc = script(&["a", "a"]);
        let mx = DistanceMatrix::new(4, 2, vec![0.0; 8]).unwrap();
        let costs = MatchCosts {
            c_skip: 0.0,
            ..Default::default()
        };
        let a = match_segments(&segs, &sc, &mx, &costs, GroupDistance::ToInstruction).unwrap();
        assert_eq!(a.matches[0].segments, 0..1);
        assert_eq!(a.matches[1].segments, 1..2);
        assert_eq!(a.skipped, vec![2, 3]);
    }

    #[test]
    fn chain_group_cost() {
        let segs = described(&["x", "y", "z"]);
        let sc = script(&["x"]);
        let mx = DistanceMatrix::new(3, 1, vec![0.0, 9.0, 9.0]).unwrap();
        // consecutive captions are identical in chain terms, so grouping is free
        let chain = [0.0, 0.0];
        let costs = MatchCosts::default();
        let a = match_segments(&segs, &sc, &mx, &costs, GroupDistance::Chain(&chain)).unwrap();
        assert_eq!(a.matches[0].segments, 0..3);
        assert_eq!(a.total_cost, 0.0);
        let a = match_segments(&segs, &sc, &mx, &costs, GroupDistance::ToInstruction).unwrap();
        assert_eq!(a.matches[0].segments, 0..1);
        assert_eq!(a.total_cost, 1.0);
        assert!(match_segments(&segs, &sc, &mx, &costs, GroupDistance::Chain(&[0.0])).is_err());
    }

    #[test]
    fn breakdown_sums_to_total() {
        let segs = described(&["a", "b", "c", "d", "e"]);
        let sc = script(&["a", "b"]);
        let data = vec![0.3, 0.9, 0.2, 0.8, 0.7, 0.1, 1.5, 0.4, 0.6, 0.6];
        let mx = DistanceMatrix::new(5, 2, data).unwrap();
        let a = match_segments(&segs, &sc, &mx, &MatchCosts::default(), GroupDistance::ToInstruction).unwrap();
        let sum: f64 = a.matches.iter().map(|m| m.cost.total()).sum::<f64>() + a.trailing_skip_cost;
        assert!((sum - a.total_cost).abs() < 1e-12);
    }

    #[test]
    fn script_rejects_nothing() {
        assert!(InstructionScript::new(vec![Sentence::nothing()]).is_err());
        assert!(InstructionScript::new(Vec::new()).is_err());
    }
}

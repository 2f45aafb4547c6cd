//! split -> caption -> distance matrix -> match -> articulation fit.

use demoseg_core::evalkit::mock_caption;
use demoseg_core::geomfit::classify_articulation;
use demoseg_core::lexdist::{EmbeddingTable, Sentence};
use demoseg_core::matcher::{
    build_chain_distances, build_distance_matrix, match_segments, DescribedSegment, DescribedSegments,
    DistanceMatrix, GroupDistance, InstructionScript, MatchAssignment,
};
use demoseg_core::splitter::{split, uniform_split, Segment, SegmentList};
use demoseg_core::trajectory::PoseTrack;

use crate::config::{GroupCost, PipelineConfig};
use crate::error::{Error, Result};
use crate::formats::reports::{
    explain, ArticulationEntry, ArticulationJson, ArticulationReport, AssignmentReport, CaptionJson, TruthFile,
};

/// Gaps shorter than this between truth intervals and the track ends are
/// absorbed rather than turned into "nothing" sections.
const GAP_TOL_S: f64 = 1e-6;

/// Where segment descriptions come from.
#[derive(Debug, Clone, Copy)]
pub enum CaptionSource<'a> {
    /// Caption file entries, assigned to segments by maximal overlap.
    File(&'a [CaptionJson]),
    /// Mock captioner over ground-truth sections.
    Mock {
        truth: &'a DescribedSegments,
        error_rate: f64,
        seed: u64,
    },
}

pub fn script_from_lines(lines: &[String]) -> Result<InstructionScript> {
    let sentences = lines.iter().map(|l| Sentence::parse(l)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(InstructionScript::new(sentences)?)
}

pub fn split_track(track: &PoseTrack, cfg: &PipelineConfig) -> Result<SegmentList> {
    Ok(split(track, &cfg.split_config())?)
}

pub fn uniform_segments(track: &PoseTrack, period: f64) -> Result<SegmentList> {
    Ok(uniform_split(track, period)?)
}

/// Ground-truth sections covering `[start, end]`: the instruction intervals
/// in order, with every uncovered stretch captioned "nothing".
pub fn truth_sections(truth: &TruthFile, start: f64, end: f64) -> Result<DescribedSegments> {
    let mut items = Vec::new();
    let mut at = start;
    let n = truth.instructions.len();
    for (k, ins) in truth.instructions.iter().enumerate() {
        let s = if (ins.start_s - start).abs() <= GAP_TOL_S { start } else { ins.start_s };
        let e = if k + 1 == n && (ins.end_s - end).abs() <= GAP_TOL_S { end } else { ins.end_s };
        if s > at + GAP_TOL_S {
            items.push(DescribedSegment {
                segment: Segment::new(at, s)?,
                description: Sentence::nothing(),
            });
            at = s;
        } else if (s - at).abs() > GAP_TOL_S {
            return Err(Error::Core(demoseg_core::Error::InvalidInput(format!(
                "truth instruction {k} starts at {s} before the previous section ends at {at}"
            ))));
        }
        items.push(DescribedSegment {
            segment: Segment::new(at, e)?,
            description: Sentence::parse(&ins.text)?,
        });
        at = e;
    }
    if end > at + GAP_TOL_S {
        items.push(DescribedSegment {
            segment: Segment::new(at, end)?,
            description: Sentence::nothing(),
        });
    }
    Ok(DescribedSegments::new(items)?)
}

/// Gives each segment the caption whose interval overlaps it most; the
/// earliest caption wins ties. A segment no caption overlaps is an error.
pub fn file_captions(segments: &SegmentList, captions: &[CaptionJson]) -> Result<DescribedSegments> {
    let parsed = captions
        .iter()
        .map(|c| Ok((Segment::new(c.start_s, c.end_s)?, Sentence::parse(&c.text)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut descriptions = Vec::with_capacity(segments.len());
    for seg in segments.segments() {
        let mut best: Option<(f64, &Sentence)> = None;
        for (span, text) in &parsed {
            let o = span.overlap(seg);
            if o > 0.0 && best.is_none_or(|(b, _)| o > b) {
                best = Some((o, text));
            }
        }
        let Some((_, text)) = best else {
            return Err(Error::Core(demoseg_core::Error::InvalidInput(format!(
                "no caption overlaps segment [{}, {}]",
                seg.start, seg.end
            ))));
        };
        descriptions.push(text.clone());
    }
    Ok(DescribedSegments::from_parts(segments, descriptions)?)
}

pub fn caption_segments(segments: &SegmentList, source: CaptionSource<'_>) -> Result<DescribedSegments> {
    match source {
        CaptionSource::File(c) => file_captions(segments, c),
        CaptionSource::Mock { truth, error_rate, seed } => Ok(mock_caption(truth, segments, error_rate, seed)?),
    }
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub matrix: DistanceMatrix,
    pub assignment: MatchAssignment,
}

pub fn align(
    described: &DescribedSegments,
    script: &InstructionScript,
    table: &EmbeddingTable,
    cfg: &PipelineConfig,
) -> Result<Alignment> {
    let dcfg = cfg.distance_config();
    let matrix = build_distance_matrix(described, script, table, &dcfg)?;
    let chain;
    let group = match cfg.group_cost {
        GroupCost::ToInstruction => GroupDistance::ToInstruction,
        GroupCost::Chain => {
            chain = build_chain_distances(described, table, &dcfg)?;
            GroupDistance::Chain(&chain)
        }
    };
    let assignment = match_segments(described, script, &matrix, &cfg.match_costs(), group)?;
    Ok(Alignment { matrix, assignment })
}

/// First configured keyword that appears as a token of `instruction`.
pub fn articulation_keyword<'a>(instruction: &Sentence, keywords: &'a [String]) -> Option<&'a str> {
    keywords
        .iter()
        .find(|k| instruction.tokens().iter().any(|t| t.eq_ignore_ascii_case(k)))
        .map(String::as_str)
}

/// Classifies the hand path inside the interval of every instruction that
/// names an articulation keyword.
pub fn fit_articulations(
    track: &PoseTrack,
    script: &InstructionScript,
    assignment: &MatchAssignment,
    keywords: &[String],
) -> ArticulationReport {
    let articulations = assignment
        .matches
        .iter()
        .filter_map(|m| {
            let instr = &script.instructions()[m.instruction];
            let keyword = articulation_keyword(instr, keywords)?;
            let points = track.positions_between(m.interval.start, m.interval.end);
            let (model, error) = match classify_articulation(&points) {
                Ok(model) => (Some(ArticulationJson::from(&model)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Some(ArticulationEntry {
                instruction_index: m.instruction,
                text: instr.text().to_string(),
                keyword: keyword.to_string(),
                start_s: m.interval.start,
                end_s: m.interval.end,
                samples: points.len(),
                model,
                error,
            })
        })
        .collect();
    ArticulationReport { articulations }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub segments: SegmentList,
    pub described: DescribedSegments,
    pub alignment: Alignment,
    pub report: AssignmentReport,
    pub articulation: ArticulationReport,
}

/// The whole pipeline on in-memory inputs.
pub fn run_pipeline(
    track: &PoseTrack,
    script: &InstructionScript,
    captions: CaptionSource<'_>,
    table: &EmbeddingTable,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput> {
    cfg.validate()?;
    let segments = split_track(track, cfg)?;
    let described = caption_segments(&segments, captions)?;
    let alignment = align(&described, script, table, cfg)?;
    let report = explain(&alignment.assignment, script, Some((&described, &alignment.matrix)));
    let articulation = fit_articulations(track, script, &alignment.assignment, &cfg.articulation_keywords);
    Ok(PipelineOutput {
        segments,
        described,
        alignment,
        report,
        articulation,
    })
}

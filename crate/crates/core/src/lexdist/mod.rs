//! Word embeddings and sentence distance by exact Word Mover's Distance.

pub mod transport;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reserved caption for unintended sections of a demonstration.
pub const NOTHING: &str = "nothing";

/// Default constant distance between a "nothing" caption and any instruction.
pub const DEFAULT_C_NOTHING: f64 = 2.0;

const STOP_WORDS: &[&str] = &[
    "a", "an", "and", "at", "by", "for", "from", "in", "into", "is", "it", "of", "on", "onto",
    "or", "the", "to", "with",
];

/// Word vectors of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            vectors: BTreeMap::new(),
        })
    }

    /// Inserts or replaces a vector. Returns true when an existing entry was
    /// replaced.
    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::MalformedInput(format!(
                "vector for `{word}` has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedInput(format!("vector for `{word}` is not finite")));
        }
        Ok(self.vectors.insert(word.to_string(), vector).is_some())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    /// Copy with every vector multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(w, v)| (w.clone(), v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }
}

/// Result of parsing a word-vector text file.
#[derive(Debug, Clone)]
pub struct LoadedEmbeddings {
    pub table: EmbeddingTable,
    /// Words that appeared more than once; the last occurrence wins.
    pub duplicates: usize,
    /// Vocabulary size announced by the header line, if any.
    pub declared_size: Option<usize>,
}

/// Incremental parser for the word-vector text format: an optional
/// `<vocab_size> <dim>` header followed by `word v1 v2 ... vd` rows.
#[derive(Debug, Default)]
pub struct EmbeddingParser {
    table: Option<EmbeddingTable>,
    declared_size: Option<usize>,
    duplicates: usize,
    line_no: usize,
}

impl EmbeddingParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_line(&mut self, line: &str) -> Result<()> {
        self.line_no += 1;
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else {
            return Ok(());
        };
        let values: Vec<&str> = fields.collect();

        if self.table.is_none() && self.declared_size.is_none() && values.len() == 1 {
            if let (Ok(size), Ok(dim)) = (word.parse::<usize>(), values[0].parse::<usize>()) {
                self.declared_size = Some(size);
                self.table = Some(EmbeddingTable::new(dim)?);
                return Ok(());
            }
        }

        let vector = values
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::MalformedInput(format!("line {}: {e}", self.line_no)))?;
        let table = match &mut self.table {
            Some(t) => t,
            None => self.table.insert(EmbeddingTable::new(vector.len()).map_err(|_| {
                Error::MalformedInput(format!("line {}: row has no values", self.line_no))
            })?),
        };
        let replaced = table
            .insert(word, vector)
            .map_err(|e| Error::MalformedInput(format!("line {}: {e}", self.line_no)))?;
        if replaced {
            self.duplicates += 1;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<LoadedEmbeddings> {
        match self.table {
            Some(table) if !table.is_empty() => Ok(LoadedEmbeddings {
                table,
                duplicates: self.duplicates,
                declared_size: self.declared_size,
            }),
            _ => Err(Error::MalformedInput("no word vectors found".into())),
        }
    }
}

/// Parses a whole word-vector text document.
pub fn parse_embeddings(text: &str) -> Result<LoadedEmbeddings> {
    let mut parser = EmbeddingParser::new();
    for line in text.lines() {
        parser.push_line(line)?;
    }
    parser.finish()
}

/// A normalized word sequence: lowercase, punctuation removed, split on
/// whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    text: String,
    tokens: Vec<String>,
}

impl Sentence {
    pub fn parse(text: &str) -> Result<Self> {
        let cleaned: String = text
            .chars()
            .filter(|c| c.is_alphanumeric() || c.is_whitespace())
            .collect::<String>()
            .to_lowercase();
        let tokens: Vec<String> = cleaned.split_whitespace().map(ToString::to_string).collect();
        if tokens.is_empty() {
            return Err(Error::InvalidInput(format!("sentence `{text}` has no words")));
        }
        Ok(Self {
            text: text.trim().to_string(),
            tokens,
        })
    }

    pub fn nothing() -> Self {
        Self {
            text: NOTHING.to_string(),
            tokens: alloc::vec![NOTHING.to_string()],
        }
    }

    /// Original text, trimmed.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_nothing(&self) -> bool {
        self.tokens.len() == 1 && self.tokens[0] == NOTHING
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Out-of-vocabulary tokens are removed before computing weights.
    #[default]
    Drop,
    /// Any out-of-vocabulary token is an error.
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceConfig {
    pub c_nothing: f64,
    pub oov_policy: OovPolicy,
    pub remove_stop_words: bool,
    /// Divide every embedding by its Euclidean norm before use.
    pub normalize_embeddings: bool,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            c_nothing: DEFAULT_C_NOTHING,
            oov_policy: OovPolicy::Drop,
            remove_stop_words: false,
            normalize_embeddings: false,
        }
    }
}

impl DistanceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_nothing.is_finite() && self.c_nothing >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c_nothing {} must be finite and non-negative",
                self.c_nothing
            )));
        }
        Ok(())
    }
}

/// Distinct tokens with their counts, in order of first appearance.
struct Bag<'a> {
    words: Vec<&'a str>,
    counts: Vec<u64>,
    vectors: Vec<Vec<f64>>,
}

impl Bag<'_> {
    fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn bag<'a>(s: &'a Sentence, table: &EmbeddingTable, cfg: &DistanceConfig) -> Result<Bag<'a>> {
    let mut out = Bag {
        words: Vec::new(),
        counts: Vec::new(),
        vectors: Vec::new(),
    };
    for tok in s.tokens() {
        if cfg.remove_stop_words && STOP_WORDS.contains(&tok.as_str()) {
            continue;
        }
        let Some(v) = table.get(tok) else {
            match cfg.oov_policy {
                OovPolicy::Drop => continue,
                OovPolicy::Error => return Err(Error::UnknownWord(tok.clone())),
            }
        };
        if let Some(k) = out.words.iter().position(|w| *w == tok.as_str()) {
            out.counts[k] += 1;
            continue;
        }
        let mut v = v.to_vec();
        if cfg.normalize_embeddings {
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
        }
        out.words.push(tok);
        out.counts.push(1);
        out.vectors.push(v);
    }
    if out.words.is_empty() {
        return Err(Error::EmptyAfterFiltering);
    }
    Ok(out)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Exact Word Mover's Distance between two sentences.
///
/// Each sentence becomes a normalized bag-of-words; the distance is the
/// minimum cost of moving one bag's mass onto the other with Euclidean
/// embedding distance as the ground cost.
pub fn wmd(a: &Sentence, b: &Sentence, table: &EmbeddingTable, cfg: &DistanceConfig) -> Result<f64> {
    let ba = bag(a, table, cfg)?;
    let bb = bag(b, table, cfg)?;
    let (ta, tb) = (ba.total(), bb.total());
    // common denominator ta * tb keeps the masses integral
    let supply: Vec<u64> = ba.counts.iter().map(|c| c * tb).collect();
    let demand: Vec<u64> = bb.counts.iter().map(|c| c * ta).collect();
    let mut cost = Vec::with_capacity(supply.len() * demand.len());
    for (wa, va) in ba.words.iter().zip(&ba.vectors) {
        for (wb, vb) in bb.words.iter().zip(&bb.vectors) {
            cost.push(if wa == wb { 0.0 } else { euclidean(va, vb) });
        }
    }
    let plan = transport::solve(&supply, &demand, &cost);
    Ok(plan.cost / (ta * tb) as f64)
}

/// Distance from a segment description to a verbal instruction. A "nothing"
/// description costs the constant `cfg.c_nothing` regardless of the
/// instruction.
pub fn instruction_distance(
    desc: &Sentence,
    instr: &Sentence,
    table: &EmbeddingTable,
    cfg: &DistanceConfig,
) -> Result<f64> {
    if desc.is_nothing() {
        return Ok(cfg.c_nothing);
    }
    wmd(desc, instr, table, cfg)
}

/// Distance between two segment descriptions, used by chained group costs.
/// Two "nothing" captions are identical; one "nothing" against a real
/// caption costs `cfg.c_nothing`.
pub fn description_distance(
    a: &Sentence,
    b: &Sentence,
    table: &EmbeddingTable,
    cfg: &DistanceConfig,
) -> Result<f64> {
    match (a.is_nothing(), b.is_nothing()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(cfg.c_nothing),
        (false, false) => wmd(a, b, table, cfg),
    }
}

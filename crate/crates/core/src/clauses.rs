//! Relative-clause annotations, re-linearization and per-clause surprisal.
//!
//! A record pairs a relative clause with its matrix clause. Positions are
//! word ordinals (`doc_position`) and spans are end-exclusive. The in-situ
//! order places the relative clause at the attachment point inside the
//! matrix clause; the extraposed order puts it after all matrix material.
//! Either order can be produced from either attested variant, which is how
//! the "as if" values are scored.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::accommodation::Observation;
use crate::corpus::{Corpus, Document};
use crate::error::{Error, RecordError, Result};
use crate::ngram::BigramModel;
use crate::surprisal::annotate_positioned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, position: usize) -> bool {
        (self.start..self.end).contains(&position)
    }

    pub fn covers(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn positions(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    InSitu,
    Extraposed,
}

impl Variant {
    pub fn other(self) -> Self {
        match self {
            Variant::InSitu => Variant::Extraposed,
            Variant::Extraposed => Variant::InSitu,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::InSitu => "in_situ",
            Variant::Extraposed => "extraposed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "in_situ" => Some(Variant::InSitu),
            "extraposed" => Some(Variant::Extraposed),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseRecord {
    pub id: String,
    pub doc_id: String,
    pub variant: Variant,
    /// One or two sorted, disjoint intervals.
    pub matrix: Vec<Span>,
    pub rc: Span,
    /// Matrix position immediately after the head noun.
    pub attachment: usize,
}

impl ClauseRecord {
    pub fn matrix_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.matrix.iter().flat_map(Span::positions)
    }

    pub fn first_matrix_position(&self) -> usize {
        self.matrix[0].start
    }

    /// Checks span and variant invariants against a document of `word_count` words.
    pub fn validate(&self, word_count: usize) -> std::result::Result<(), String> {
        if self.matrix.is_empty() || self.matrix.len() > 2 {
            return Err(format!(
                "matrix must have one or two intervals, found {}",
                self.matrix.len()
            ));
        }
        for span in self.matrix.iter().chain(std::iter::once(&self.rc)) {
            if span.is_empty() {
                return Err(format!("empty span [{}, {})", span.start, span.end));
            }
            if span.end > word_count {
                return Err(format!(
                    "span [{}, {}) outside document of {word_count} words",
                    span.start, span.end
                ));
            }
        }
        if self.matrix.len() == 2 && self.matrix[0].end > self.matrix[1].start {
            return Err("matrix intervals overlap or are unsorted".into());
        }
        if self.matrix.iter().any(|m| m.overlaps(&self.rc)) {
            return Err("relative clause overlaps matrix clause".into());
        }
        let matrix_start = self.matrix[0].start;
        let matrix_end = self.matrix.last().unwrap().end;
        match self.variant {
            Variant::InSitu => {
                let before = self.matrix_positions().filter(|&p| p < self.rc.start).max();
                let after = self.matrix_positions().filter(|&p| p >= self.rc.end).min();
                let (Some(before), Some(after)) = (before, after) else {
                    return Err(
                        "in-situ relative clause must have matrix material on both sides".into(),
                    );
                };
                if self.attachment <= before || self.attachment > after {
                    return Err(format!(
                        "attachment {} does not separate the matrix material around the relative clause",
                        self.attachment
                    ));
                }
            }
            Variant::Extraposed => {
                if self.rc.start < matrix_end {
                    return Err("extraposed relative clause must follow all matrix material".into());
                }
                if self.attachment < matrix_start || self.attachment > matrix_end {
                    return Err(format!(
                        "attachment {} outside matrix material [{matrix_start}, {matrix_end}]",
                        self.attachment
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClause {
    id: String,
    doc: String,
    variant: String,
    matrix: Vec<(usize, usize)>,
    rc: (usize, usize),
    attachment: usize,
}

/// Parses and validates the clause annotation JSON. All invalid records are
/// reported together.
pub fn parse_clause_annotations(source: &str, corpus: &Corpus) -> Result<Vec<ClauseRecord>> {
    let values: Vec<serde_json::Value> = serde_json::from_str(source)?;
    let mut records = Vec::with_capacity(values.len());
    let mut errors = Vec::new();
    let mut ids = HashSet::new();

    for (i, value) in values.into_iter().enumerate() {
        let label = value
            .get("id")
            .and_then(|v| v.as_str())
            .map_or_else(|| format!("#{i}"), str::to_owned);
        let mut fail = |message: String| {
            errors.push(RecordError {
                record: label.clone(),
                message,
            })
        };
        let raw: RawClause = match serde_json::from_value(value) {
            Ok(raw) => raw,
            Err(e) => {
                fail(e.to_string());
                continue;
            }
        };
        let Some(variant) = Variant::parse(&raw.variant) else {
            fail(format!("unknown variant `{}`", raw.variant));
            continue;
        };
        let Some(doc) = corpus.get(&raw.doc) else {
            fail(format!("unknown document `{}`", raw.doc));
            continue;
        };
        if !ids.insert(raw.id.clone()) {
            fail("duplicate record id".into());
            continue;
        }
        let record = ClauseRecord {
            id: raw.id,
            doc_id: raw.doc,
            variant,
            matrix: raw
                .matrix
                .into_iter()
                .map(|(s, e)| Span::new(s, e))
                .collect(),
            rc: Span::new(raw.rc.0, raw.rc.1),
            attachment: raw.attachment,
        };
        match record.validate(doc.word_count()) {
            Ok(()) => records.push(record),
            Err(message) => fail(message),
        }
    }

    if errors.is_empty() {
        Ok(records)
    } else {
        Err(Error::Validation(errors))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Rc,
    Matrix,
    Combined,
}

impl Part {
    pub fn label(self) -> &'static str {
        match self {
            Part::Rc => "rel. cl.",
            Part::Matrix => "matrix cl.",
            Part::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearizationKind {
    Attested,
    Hypothetical,
}

impl LinearizationKind {
    /// The clause order this kind denotes for a record of `variant`.
    pub fn order(self, variant: Variant) -> Variant {
        match self {
            LinearizationKind::Attested => variant,
            LinearizationKind::Hypothetical => variant.other(),
        }
    }

    /// The kind that yields `order` for a record of `variant`.
    pub fn for_order(variant: Variant, order: Variant) -> Self {
        if variant == order {
            LinearizationKind::Attested
        } else {
            LinearizationKind::Hypothetical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bare,
    Accommodated,
}

/// Per-token multipliers for scoring.
#[derive(Debug, Clone, Copy)]
pub enum Weighting<'a> {
    Bare,
    /// Observations indexed by word position, from a scan of the attested document.
    Accommodated(&'a [Option<Observation>]),
}

impl Weighting<'_> {
    pub fn mode(&self) -> Mode {
        match self {
            Weighting::Bare => Mode::Bare,
            Weighting::Accommodated(_) => Mode::Accommodated,
        }
    }

    fn factor(&self, position: usize) -> f64 {
        match self {
            Weighting::Bare => 1.0,
            Weighting::Accommodated(obs) => obs
                .get(position)
                .copied()
                .flatten()
                .map_or(1.0, |o| o.factor),
        }
    }
}

/// Which clause-initial words are left out of the sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExclusionPolicy {
    /// The relative pronoun.
    pub rc_first: bool,
    pub matrix_first: bool,
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        Self {
            rc_first: true,
            matrix_first: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearToken {
    pub position: usize,
    pub part: Part,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub order: Variant,
    pub initial_context: String,
    pub tokens: Vec<LinearToken>,
}

impl Linearization {
    pub fn positions(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.position).collect()
    }

    pub fn lemmas<'d>(&self, doc: &'d Document) -> Vec<&'d str> {
        self.tokens
            .iter()
            .map(|t| doc.word(t.position).expect("validated span").lemma.as_str())
            .collect()
    }
}

/// Orders the clause material as `target`. The initial context is the word
/// preceding the clause complex in the document (or the sentence start).
pub fn relinearize(record: &ClauseRecord, doc: &Document, target: Variant) -> Linearization {
    let matrix = |p: usize| LinearToken {
        position: p,
        part: Part::Matrix,
    };
    let rc = record.rc.positions().map(|p| LinearToken {
        position: p,
        part: Part::Rc,
    });
    let tokens: Vec<LinearToken> = match target {
        Variant::InSitu => record
            .matrix_positions()
            .filter(|&p| p < record.attachment)
            .map(matrix)
            .chain(rc)
            .chain(
                record
                    .matrix_positions()
                    .filter(|&p| p >= record.attachment)
                    .map(matrix),
            )
            .collect(),
        Variant::Extraposed => record.matrix_positions().map(matrix).chain(rc).collect(),
    };
    let first = record.first_matrix_position().min(record.rc.start);
    Linearization {
        order: target,
        initial_context: doc.preceding_context(first).to_owned(),
        tokens,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseMetrics {
    pub record_id: String,
    pub part: Part,
    pub mode: Mode,
    pub linearization: LinearizationKind,
    pub ads: f64,
    pub avs: f64,
    pub n_scored: usize,
}

impl ClauseMetrics {
    /// `avs = ads / n_scored` and `avs * n_scored == ads` both hold exactly.
    /// The stored sum may differ from `sum` by a few ulps to make that so.
    pub fn from_sum(
        record_id: &str,
        part: Part,
        mode: Mode,
        linearization: LinearizationKind,
        sum: f64,
        n_scored: usize,
    ) -> Self {
        assert!(n_scored >= 1, "n_scored must be positive");
        let (ads, avs) = exact_mean(sum, n_scored);
        Self {
            record_id: record_id.to_owned(),
            part,
            mode,
            linearization,
            ads,
            avs,
            n_scored,
        }
    }
}

/// Finds `ads` near `sum` with `(ads / n) * n == ads`.
fn exact_mean(sum: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let consistent = |ads: f64| {
        let avs = ads / nf;
        (avs * nf == ads).then_some((ads, avs))
    };
    let mut ads = sum;
    for _ in 0..8 {
        if let Some(found) = consistent(ads) {
            return found;
        }
        ads = (ads / nf) * nf;
    }
    for k in 1..4096u64 {
        for candidate in [step_ulps(sum, k as i64), step_ulps(sum, -(k as i64))] {
            if let Some(found) = consistent(candidate) {
                return found;
            }
        }
    }
    (sum, sum / nf)
}

fn step_ulps(x: f64, k: i64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let bits = x.to_bits() as i64;
    let stepped = if x > 0.0 { bits + k } else { bits - k };
    f64::from_bits(stepped as u64)
}

/// Scores one clause part in the order selected by `linearization`.
pub fn clause_metrics<M: BigramModel + ?Sized>(
    record: &ClauseRecord,
    doc: &Document,
    model: &M,
    weighting: Weighting<'_>,
    part: Part,
    linearization: LinearizationKind,
    exclusion: ExclusionPolicy,
) -> Result<ClauseMetrics> {
    let lin = relinearize(record, doc, linearization.order(record.variant));
    let lemmas = lin.lemmas(doc);
    let items: Vec<(&str, Option<usize>)> = lemmas
        .iter()
        .zip(&lin.tokens)
        .map(|(&l, t)| (l, Some(t.position)))
        .collect();
    let entries = annotate_positioned(model, &items, &lin.initial_context)?;

    let rc_first = record.rc.start;
    let matrix_first = record.first_matrix_position();
    let mut sum = 0.0;
    let mut n = 0usize;
    for (token, entry) in lin.tokens.iter().zip(&entries) {
        let selected = match part {
            Part::Rc => token.part == Part::Rc,
            Part::Matrix => token.part == Part::Matrix,
            Part::Combined => true,
        };
        let excluded = (exclusion.rc_first && token.position == rc_first)
            || (exclusion.matrix_first && token.position == matrix_first);
        if selected && !excluded {
            sum += entry.bits * weighting.factor(token.position);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::ClauseTooShort(format!(
            "record {} has no scorable {} words",
            record.id,
            part.label()
        )));
    }
    Ok(ClauseMetrics::from_sum(
        &record.id,
        part,
        weighting.mode(),
        linearization,
        sum,
        n,
    ))
}

/// The measurements behind the summary tables for one record and mode:
/// relative and matrix clause each scored in the extraposed order (so that
/// neither is conditioned on the other), plus the combined complex in both
/// the attested and the counterfactual order.
pub fn standard_metrics<M: BigramModel + ?Sized>(
    record: &ClauseRecord,
    doc: &Document,
    model: &M,
    weighting: Weighting<'_>,
    exclusion: ExclusionPolicy,
) -> Result<Vec<ClauseMetrics>> {
    let separate = LinearizationKind::for_order(record.variant, Variant::Extraposed);
    let plan = [
        (Part::Rc, separate),
        (Part::Matrix, separate),
        (Part::Combined, LinearizationKind::Attested),
        (Part::Combined, LinearizationKind::Hypothetical),
    ];
    plan.into_iter()
        .map(|(part, lin)| clause_metrics(record, doc, model, weighting, part, lin, exclusion))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SummaryKey {
    pub variant: Variant,
    pub part: Part,
    pub mode: Mode,
    pub linearization: LinearizationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryCell {
    pub n: usize,
    pub mean_ads: f64,
    pub mean_avs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SummaryTable {
    pub cells: BTreeMap<SummaryKey, SummaryCell>,
}

impl SummaryTable {
    pub fn get(
        &self,
        variant: Variant,
        part: Part,
        mode: Mode,
        linearization: LinearizationKind,
    ) -> Option<&SummaryCell> {
        self.cells.get(&SummaryKey {
            variant,
            part,
            mode,
            linearization,
        })
    }
}

/// Means of adS and avS over records, per variant x part x mode x order.
pub fn aggregate_by_variant<'a>(
    rows: impl IntoIterator<Item = (&'a ClauseRecord, &'a ClauseMetrics)>,
) -> SummaryTable {
    let mut sums: BTreeMap<SummaryKey, (usize, f64, f64)> = BTreeMap::new();
    for (record, m) in rows {
        let key = SummaryKey {
            variant: record.variant,
            part: m.part,
            mode: m.mode,
            linearization: m.linearization,
        };
        let e = sums.entry(key).or_insert((0, 0.0, 0.0));
        e.0 += 1;
        e.1 += m.ads;
        e.2 += m.avs;
    }
    SummaryTable {
        cells: sums
            .into_iter()
            .map(|(k, (n, ads, avs))| {
                (
                    k,
                    SummaryCell {
                        n,
                        mean_ads: ads / n as f64,
                        mean_avs: avs / n as f64,
                    },
                )
            })
            .collect(),
    }
}

//! Referent givenness: five-way salience classification, per-clause
//! ratios and the 2x2 chi-square comparison.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::AddAssign;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::clauses::Span;
use crate::clauses::{ClauseRecord, Part};
use crate::corpus::Corpus;
use crate::error::{Error, RecordError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferentMention {
    pub doc_id: String,
    pub span: Span,
    pub referent_id: String,
    pub inferable: bool,
    pub topic: bool,
    /// Index in the document's mention sequence.
    pub mention_ordinal: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SalienceCategory {
    New,
    InferableNew,
    GivenNonSalient,
    GivenSalient,
    SalientTopic,
}

impl SalienceCategory {
    pub const ALL: [SalienceCategory; 5] = [
        SalienceCategory::New,
        SalienceCategory::InferableNew,
        SalienceCategory::GivenNonSalient,
        SalienceCategory::GivenSalient,
        SalienceCategory::SalientTopic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SalienceCategory::New => "new",
            SalienceCategory::InferableNew => "inferable_new",
            SalienceCategory::GivenNonSalient => "given_non_salient",
            SalienceCategory::GivenSalient => "given_salient",
            SalienceCategory::SalientTopic => "salient_topic",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SalienceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How intervening material between two mentions is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterveningCount {
    /// Every mention event counts.
    #[default]
    Mentions,
    /// Each distinct referent counts once.
    DistinctReferents,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GivennessConfig {
    /// A re-mention stays salient while at most this many referents intervene.
    pub window: usize,
    pub counting: InterveningCount,
}

impl Default for GivennessConfig {
    fn default() -> Self {
        Self {
            window: 10,
            counting: InterveningCount::Mentions,
        }
    }
}

/// Reads `doc start end referent_id inferable topic` rows. A header row
/// starting with `doc<TAB>start` and `#` comment lines are skipped. Mentions
/// come back sorted by document and start, with ordinals assigned.
pub fn parse_referent_tsv(source: &str, corpus: &Corpus) -> Result<Vec<ReferentMention>> {
    let mut errors = Vec::new();
    let mut by_doc: BTreeMap<String, Vec<(usize, ReferentMention)>> = BTreeMap::new();

    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("doc\tstart") {
            continue;
        }
        let mut fail = |message: String| {
            errors.push(RecordError {
                record: format!("line {line_no}"),
                message,
            })
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            fail(format!("expected 6 columns, found {}", cols.len()));
            continue;
        }
        let (Ok(start), Ok(end)) = (cols[1].parse::<usize>(), cols[2].parse::<usize>()) else {
            fail(format!("non-numeric span `{}`..`{}`", cols[1], cols[2]));
            continue;
        };
        let flag = |s: &str| match s {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        };
        let (Some(inferable), Some(topic)) = (flag(cols[4]), flag(cols[5])) else {
            fail("flags must be 0 or 1".into());
            continue;
        };
        if cols[3].is_empty() {
            fail("empty referent id".into());
            continue;
        }
        let Some(doc) = corpus.get(cols[0]) else {
            fail(format!("unknown document `{}`", cols[0]));
            continue;
        };
        if start >= end || end > doc.word_count() {
            fail(format!(
                "span [{start}, {end}) invalid for document of {} words",
                doc.word_count()
            ));
            continue;
        }
        by_doc.entry(cols[0].to_owned()).or_default().push((
            line_no,
            ReferentMention {
                doc_id: cols[0].to_owned(),
                span: Span::new(start, end),
                referent_id: cols[3].to_owned(),
                inferable,
                topic,
                mention_ordinal: 0,
            },
        ));
    }

    let mut out = Vec::new();
    for (_, mut mentions) in by_doc {
        mentions.sort_by_key(|(_, m)| (m.span.start, m.span.end));
        for w in mentions.windows(2) {
            if w[0].1.span.overlaps(&w[1].1.span) {
                errors.push(RecordError {
                    record: format!("line {}", w[1].0),
                    message: format!(
                        "mention overlaps the mention on line {} in document `{}`",
                        w[0].0, w[1].1.doc_id
                    ),
                });
            }
        }
        for (ordinal, (_, mut m)) in mentions.into_iter().enumerate() {
            m.mention_ordinal = ordinal;
            out.push(m);
        }
    }

    if errors.is_empty() {
        Ok(out)
    } else {
        errors.sort_by_key(|e| {
            e.record
                .trim_start_matches("line ")
                .parse::<usize>()
                .unwrap_or(usize::MAX)
        });
        Err(Error::Validation(errors))
    }
}

/// Classifies `mention` given the earlier mentions of its document.
pub fn classify_mention(
    history: &[ReferentMention],
    mention: &ReferentMention,
    cfg: &GivennessConfig,
) -> SalienceCategory {
    let last = history
        .iter()
        .filter(|m| m.mention_ordinal < mention.mention_ordinal)
        .filter(|m| m.referent_id == mention.referent_id)
        .max_by_key(|m| m.mention_ordinal);
    let Some(last) = last else {
        return if mention.inferable {
            SalienceCategory::InferableNew
        } else {
            SalienceCategory::New
        };
    };
    let between = history.iter().filter(|m| {
        m.mention_ordinal > last.mention_ordinal && m.mention_ordinal < mention.mention_ordinal
    });
    let intervening = match cfg.counting {
        InterveningCount::Mentions => between.count(),
        InterveningCount::DistinctReferents => between
            .map(|m| m.referent_id.as_str())
            .collect::<HashSet<_>>()
            .len(),
    };
    if intervening > cfg.window {
        SalienceCategory::GivenNonSalient
    } else if mention.topic {
        SalienceCategory::SalientTopic
    } else {
        SalienceCategory::GivenSalient
    }
}

/// Classifies every mention; documents are scanned independently.
pub fn classify_document(
    mentions: &[ReferentMention],
    cfg: &GivennessConfig,
) -> Vec<(ReferentMention, SalienceCategory)> {
    let mut by_doc: BTreeMap<&str, Vec<&ReferentMention>> = BTreeMap::new();
    for m in mentions {
        by_doc.entry(&m.doc_id).or_default().push(m);
    }
    let mut out = Vec::with_capacity(mentions.len());
    for (_, mut doc_mentions) in by_doc {
        doc_mentions.sort_by_key(|m| m.mention_ordinal);
        let ordered: Vec<ReferentMention> = doc_mentions.into_iter().cloned().collect();
        for (i, m) in ordered.iter().enumerate() {
            let category = classify_mention(&ordered[..i], m, cfg);
            out.push((m.clone(), category));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClauseGivenness {
    pub counts: [usize; 5],
    pub total: usize,
}

impl ClauseGivenness {
    pub fn count(&self, category: SalienceCategory) -> usize {
        self.counts[category.index()]
    }

    /// Discourse-new referents.
    pub fn new_count(&self) -> usize {
        self.count(SalienceCategory::New)
    }

    /// Given salient referents, topics included.
    pub fn salient_count(&self) -> usize {
        self.count(SalienceCategory::GivenSalient) + self.count(SalienceCategory::SalientTopic)
    }

    fn ratio(&self, n: usize) -> Option<f64> {
        (self.total > 0).then(|| n as f64 / self.total as f64)
    }

    /// `None` when the clause part has no referents.
    pub fn new_ratio(&self) -> Option<f64> {
        self.ratio(self.new_count())
    }

    pub fn salient_ratio(&self) -> Option<f64> {
        self.ratio(self.salient_count())
    }

    pub fn category_ratio(&self, category: SalienceCategory) -> Option<f64> {
        self.ratio(self.count(category))
    }
}

impl AddAssign for ClauseGivenness {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts) {
            *a += b;
        }
        self.total += rhs.total;
    }
}

/// Counts the classified mentions lying inside the selected clause part.
pub fn clause_givenness(
    record: &ClauseRecord,
    classified: &[(ReferentMention, SalienceCategory)],
    part: Part,
) -> ClauseGivenness {
    let in_rc = |s: &Span| record.rc.covers(s);
    let in_matrix = |s: &Span| record.matrix.iter().any(|m| m.covers(s));
    let mut out = ClauseGivenness::default();
    for (m, category) in classified.iter().filter(|(m, _)| m.doc_id == record.doc_id) {
        let inside = match part {
            Part::Rc => in_rc(&m.span),
            Part::Matrix => in_matrix(&m.span),
            Part::Combined => in_rc(&m.span) || in_matrix(&m.span),
        };
        if inside {
            out.counts[category.index()] += 1;
            out.total += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
}

/// Pearson chi-square on `[[a, b], [c, d]]` without continuity correction;
/// the p-value is the upper tail of the one-degree-of-freedom distribution.
pub fn chi_square_2x2(a: u64, b: u64, c: u64, d: u64) -> Result<ChiSquare> {
    let [a, b, c, d] = [a, b, c, d].map(|v| v as f64);
    let marginals = [a + b, c + d, a + c, b + d];
    if marginals.contains(&0.0) {
        return Err(Error::DegenerateTable);
    }
    let n = a + b + c + d;
    let diff = a * d - b * c;
    let statistic = n * diff * diff / marginals.iter().product::<f64>();
    let p_value = erfc((statistic / 2.0).sqrt()).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(ChiSquare { statistic, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clauses::Variant;
    use crate::corpus::{load_vertical, PunctuationSet};
    use proptest::prelude::*;

    fn mention(ordinal: usize, referent: &str, inferable: bool, topic: bool) -> ReferentMention {
        ReferentMention {
            doc_id: "d".into(),
            span: Span::new(ordinal, ordinal + 1),
            referent_id: referent.into(),
            inferable,
            topic,
            mention_ordinal: ordinal,
        }
    }

    /// `target` mentioned, then `gap` other mentions, then `target` again.
    fn gap_history(gap: usize, distinct: bool) -> (Vec<ReferentMention>, ReferentMention) {
        let mut history = vec![mention(0, "target", false, false)];
        for i in 0..gap {
            let r = if distinct {
                format!("r{i}")
            } else {
                "filler".into()
            };
            history.push(mention(i + 1, &r, false, false));
        }
        (history, mention(gap + 1, "target", false, false))
    }

    #[test]
    fn first_mentions() {
        assert_eq!(
            classify_mention(&[], &mention(0, "a", false, false), &Default::default()),
            SalienceCategory::New
        );
        assert_eq!(
            classify_mention(&[], &mention(0, "a", true, false), &Default::default()),
            SalienceCategory::InferableNew
        );
    }

    #[test]
    fn salience_window() {
        let cfg = GivennessConfig::default();
        let (h, m) = gap_history(5, true);
        assert_eq!(
            classify_mention(&h, &m, &cfg),
            SalienceCategory::GivenSalient
        );
        let (h, m) = gap_history(10, true);
        assert_eq!(
            classify_mention(&h, &m, &cfg),
            SalienceCategory::GivenSalient
        );
        let (h, m) = gap_history(11, true);
        assert_eq!(
            classify_mention(&h, &m, &cfg),
            SalienceCategory::GivenNonSalient
        );
        let (h, mut m) = gap_history(3, true);
        m.topic = true;
        assert_eq!(
            classify_mention(&h, &m, &cfg),
            SalienceCategory::SalientTopic
        );
    }

    #[test]
    fn distinct_referent_counting() {
        let cfg = GivennessConfig {
            counting: InterveningCount::DistinctReferents,
            ..Default::default()
        };
        let (h, m) = gap_history(11, false);
        assert_eq!(
            classify_mention(&h, &m, &cfg),
            SalienceCategory::GivenSalient
        );
        assert_eq!(
            classify_mention(&h, &m, &GivennessConfig::default()),
            SalienceCategory::GivenNonSalient
        );
    }

    #[test]
    fn paper_table_ratios() {
        let g = ClauseGivenness {
            counts: [4, 0, 12, 20, 4],
            total: 40,
        };
        assert_eq!(g.new_ratio(), Some(0.1));
        assert_eq!(g.salient_ratio(), Some(0.6));
        let empty = ClauseGivenness::default();
        assert_eq!(empty.new_ratio(), None);
        assert_eq!(empty.salient_ratio(), None);
    }

    #[test]
    fn chi_square_reproduces_table_one_comparison() {
        let r = chi_square_2x2(2, 20, 11, 35).unwrap();
        assert!((r.statistic - 2.1145).abs() < 1e-4, "{}", r.statistic);
        assert!((r.p_value - 0.1459).abs() < 5e-4, "{}", r.p_value);
    }

    #[test]
    fn chi_square_independence_and_degenerate() {
        let r = chi_square_2x2(10, 10, 10, 10).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(matches!(
            chi_square_2x2(0, 0, 3, 4),
            Err(Error::DegenerateTable)
        ));
        assert!(matches!(
            chi_square_2x2(0, 5, 0, 4),
            Err(Error::DegenerateTable)
        ));
    }

    fn corpus() -> Corpus {
        let mut text = String::from("# doc: d\n");
        for i in 0..20 {
            text.push_str(&format!("w{i}\tw{i}\n"));
        }
        Corpus::new(load_vertical(&text, &PunctuationSet::default()).unwrap()).unwrap()
    }

    #[test]
    fn parse_and_count_clause_parts() {
        let tsv = "doc\tstart\tend\treferent_id\tinferable\ttopic\n\
                   d\t5\t7\tmann\t0\t1\n\
                   d\t0\t2\tgott\t0\t0\n\
                   d\t8\t9\tmann\t0\t0\n\
                   d\t12\t13\tbuch\t1\t0\n";
        let mentions = parse_referent_tsv(tsv, &corpus()).unwrap();
        assert_eq!(mentions[0].referent_id, "gott");
        assert_eq!(mentions[2].mention_ordinal, 2);
        let classified = classify_document(&mentions, &GivennessConfig::default());
        let cats: Vec<_> = classified.iter().map(|(_, c)| *c).collect();
        use SalienceCategory::*;
        assert_eq!(cats, vec![New, New, GivenSalient, InferableNew]);

        let record = ClauseRecord {
            id: "c".into(),
            doc_id: "d".into(),
            variant: Variant::InSitu,
            matrix: vec![Span::new(0, 8), Span::new(11, 14)],
            rc: Span::new(8, 11),
            attachment: 8,
        };
        let rc = clause_givenness(&record, &classified, Part::Rc);
        assert_eq!((rc.total, rc.salient_count()), (1, 1));
        let matrix = clause_givenness(&record, &classified, Part::Matrix);
        assert_eq!((matrix.total, matrix.new_count()), (3, 2));
        assert_eq!(matrix.counts.iter().sum::<usize>(), matrix.total);
    }

    #[test]
    fn parse_reports_all_bad_lines() {
        let tsv = "d\t0\t2\ta\t0\t0\nd\t1\t3\tb\t0\t0\nd\tx\t3\tb\t0\t0\nq\t0\t1\ta\t0\t0\nd\t4\t5\tc\t2\t0\n";
        match parse_referent_tsv(tsv, &corpus()) {
            Err(Error::Validation(errs)) => {
                let lines: Vec<_> = errs.iter().map(|e| e.record.as_str()).collect();
                assert_eq!(lines, ["line 2", "line 3", "line 4", "line 5"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Upper tail of chi-square(1) by direct quadrature of its density.
    /// With x = u^2 the density becomes 2 phi(u), integrated on [sqrt(s), inf).
    fn tail_by_quadrature(statistic: f64) -> f64 {
        let lo = statistic.sqrt();
        let hi = lo + 40.0;
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let f = |u: f64| 2.0 * (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    proptest! {
        #[test]
        fn p_value_matches_quadrature(a in 1u64..60, b in 1u64..60, c in 1u64..60, d in 1u64..60) {
            let r = chi_square_2x2(a, b, c, d).unwrap();
            prop_assert!(r.statistic >= 0.0);
            prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
            prop_assert!((r.p_value - tail_by_quadrature(r.statistic)).abs() < 1e-6);
            let t = chi_square_2x2(a, c, b, d).unwrap();
            prop_assert!((t.statistic - r.statistic).abs() <= 1e-12 * r.statistic.max(1.0));
        }

        #[test]
        fn classification_ignores_token_content(flags in prop::collection::vec((0usize..4, any::<bool>(), any::<bool>()), 1..30)) {
            let mentions: Vec<_> = flags.iter().enumerate()
                .map(|(i, (r, inf, top))| mention(i, &format!("r{r}"), *inf, *top))
                .collect();
            let shifted: Vec<_> = mentions.iter().map(|m| ReferentMention {
                span: Span::new(m.span.start * 3 + 1, m.span.start * 3 + 2),
                ..m.clone()
            }).collect();
            let a: Vec<_> = classify_document(&mentions, &Default::default()).into_iter().map(|(_, c)| c).collect();
            let b: Vec<_> = classify_document(&shifted, &Default::default()).into_iter().map(|(_, c)| c).collect();
            prop_assert_eq!(a, b);
        }
    }
}

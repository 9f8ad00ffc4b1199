//! Mention-history weighting of surprisal.
//!
//! Each content lemma carries an effective mention count `x`. The first
//! mention has `x = 1`; a mention within `window` words of the previous one
//! increments `x`; after a longer gap `x` drops by one for every full window
//! elapsed, but never below `floor`. The weight is `bonus / x` while
//! `x < wearout` and `1` afterwards.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::corpus::{Document, Token};
use crate::error::{Error, Result};
use crate::surprisal::{position_field, SurprisalAnnotation, SurprisalEntry};

const FUNCTION_WORDS: &str = include_str!("../data/function_words.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorConfig {
    pub bonus: f64,
    pub wearout: u32,
    /// Decay window in words; `u64::MAX` disables decay.
    pub window: u64,
    pub floor: u32,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            bonus: 4.0,
            wearout: 4,
            window: 200,
            floor: 2,
        }
    }
}

impl FactorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.bonus > 0.0
            && self.bonus.is_finite()
            && self.wearout >= 1
            && self.window >= 1
            && self.floor >= 1
            && self.floor <= self.wearout;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "factor config {self:?} violates bonus > 0, wearout >= 1, window >= 1, 1 <= floor <= wearout"
            )))
        }
    }
}

pub fn factor(x: u32, cfg: &FactorConfig) -> Result<f64> {
    if x < 1 {
        return Err(Error::InvalidArgument("mention count must be >= 1".into()));
    }
    Ok(if x < cfg.wearout {
        cfg.bonus / f64::from(x)
    } else {
        1.0
    })
}

/// Effective mention count of a re-mention `gap` words after the previous one.
pub fn next_x(prev_x: u32, gap: u64, cfg: &FactorConfig) -> u32 {
    if gap < cfg.window {
        prev_x.saturating_add(1)
    } else {
        let decayed = i64::from(prev_x) - (gap / cfg.window).min(i64::MAX as u64) as i64;
        decayed.max(i64::from(cfg.floor)) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub x: u32,
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LemmaState {
    x: u32,
    last_position: usize,
}

/// Per-document mention counters, fed in increasing word order.
#[derive(Debug, Clone, Default)]
pub struct AccommodationState {
    lemmas: HashMap<String, LemmaState>,
}

impl AccommodationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(
        &mut self,
        lemma: &str,
        position: usize,
        cfg: &FactorConfig,
    ) -> Result<Observation> {
        let x = match self.lemmas.get(lemma) {
            None => 1,
            Some(prev) if position <= prev.last_position => {
                return Err(Error::OutOfOrder {
                    lemma: lemma.to_owned(),
                    position,
                    last: prev.last_position,
                });
            }
            Some(prev) => next_x(prev.x, (position - prev.last_position) as u64, cfg),
        };
        self.lemmas.insert(
            lemma.to_owned(),
            LemmaState {
                x,
                last_position: position,
            },
        );
        Ok(Observation {
            x,
            factor: factor(x, cfg)?,
        })
    }

    /// Current `(x, last_position)` for `lemma`.
    pub fn get(&self, lemma: &str) -> Option<(u32, usize)> {
        self.lemmas.get(lemma).map(|s| (s.x, s.last_position))
    }
}

/// Decides which tokens are content words.
///
/// Tagged tokens are content iff their tag starts with one of the content
/// prefixes (STTS and Universal tags by default). Untagged tokens are content
/// iff their lowercased lemma is not in the function-word list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentWords {
    tag_prefixes: Vec<String>,
    stoplist: HashSet<String>,
}

impl Default for ContentWords {
    fn default() -> Self {
        Self::new(
            ["NN", "NE", "VV", "ADJ", "ADV", "NOUN", "PROPN", "VERB"],
            FUNCTION_WORDS,
        )
    }
}

impl ContentWords {
    pub fn new<S: AsRef<str>>(tag_prefixes: impl IntoIterator<Item = S>, stoplist: &str) -> Self {
        Self {
            tag_prefixes: tag_prefixes
                .into_iter()
                .map(|s| s.as_ref().trim().to_owned())
                .filter(|s| !s.is_empty())
                .collect(),
            stoplist: parse_stoplist(stoplist),
        }
    }

    pub fn with_tags<S: AsRef<str>>(mut self, tag_prefixes: impl IntoIterator<Item = S>) -> Self {
        self.tag_prefixes = Self::new(tag_prefixes, "").tag_prefixes;
        self
    }

    pub fn with_stoplist(mut self, stoplist: &str) -> Self {
        self.stoplist = parse_stoplist(stoplist);
        self
    }

    pub fn tag_prefixes(&self) -> &[String] {
        &self.tag_prefixes
    }

    pub fn is_content(&self, token: &Token) -> bool {
        if token.is_punctuation {
            return false;
        }
        match &token.pos {
            Some(tag) => self
                .tag_prefixes
                .iter()
                .any(|p| tag.starts_with(p.as_str())),
            None => !self.stoplist.contains(&token.lemma.to_lowercase()),
        }
    }
}

fn parse_stoplist(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Forward scan over a document's words. Entry `p` is the observation for the
/// word at position `p`, or `None` for function words.
pub fn document_weights(
    doc: &Document,
    content: &ContentWords,
    cfg: &FactorConfig,
) -> Result<Vec<Option<Observation>>> {
    cfg.validate()?;
    let mut state = AccommodationState::new();
    doc.words()
        .enumerate()
        .map(|(position, token)| {
            if content.is_content(token) {
                state.observe(&token.lemma, position, cfg).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEntry {
    pub entry: SurprisalEntry,
    /// Mention count; `None` for tokens that are not content words.
    pub x: Option<u32>,
    pub factor: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAnnotation {
    pub doc_id: String,
    pub entries: Vec<WeightedEntry>,
}

impl WeightedAnnotation {
    /// Surprisal TSV columns followed by `x factor weighted_surprisal`.
    pub fn to_tsv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str(
                "doc\tposition\tlemma\tcontext\tprob\tsurprisal_bits\tx\tfactor\tweighted_surprisal\n",
            );
        }
        for w in &self.entries {
            let e = &w.entry;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.10}\t{:.6}\t{}\t{:.6}\t{:.6}",
                self.doc_id,
                position_field(e.position),
                e.lemma,
                e.context,
                e.prob,
                e.bits,
                w.x.map_or_else(|| "-".to_owned(), |x| x.to_string()),
                w.factor,
                w.weighted
            )
            .unwrap();
        }
        out
    }
}

/// Multiplies content-word surprisal by its mention-history factor.
pub fn accommodate_document(
    annotation: &SurprisalAnnotation,
    doc: &Document,
    content: &ContentWords,
    cfg: &FactorConfig,
) -> Result<WeightedAnnotation> {
    let misaligned = |message: String| Error::Misaligned {
        doc: doc.id().to_owned(),
        message,
    };
    if annotation.doc_id != doc.id() {
        return Err(misaligned(format!(
            "annotation belongs to `{}`",
            annotation.doc_id
        )));
    }
    let weights = document_weights(doc, content, cfg)?;
    let mut expected = 0usize;
    let mut entries = Vec::with_capacity(annotation.entries.len());
    for entry in &annotation.entries {
        let obs = match entry.position {
            Some(p) => {
                let token = doc.word(p);
                if p != expected || token.map(|t| t.lemma.as_str()) != Some(entry.lemma.as_str()) {
                    return Err(misaligned(format!(
                        "entry `{}` at position {p} (expected position {expected})",
                        entry.lemma
                    )));
                }
                expected += 1;
                weights[p]
            }
            None => None,
        };
        let factor = obs.map_or(1.0, |o| o.factor);
        entries.push(WeightedEntry {
            entry: entry.clone(),
            x: obs.map(|o| o.x),
            factor,
            weighted: entry.bits * factor,
        });
    }
    if expected != doc.word_count() {
        return Err(misaligned(format!(
            "{expected} word entries for {} words",
            doc.word_count()
        )));
    }
    Ok(WeightedAnnotation {
        doc_id: annotation.doc_id.clone(),
        entries,
    })
}

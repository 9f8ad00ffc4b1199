//! Per-token surprisal in bits.

use std::fmt::Write as _;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::ngram::{BigramModel, SENTENCE_START};

/// Converts a base-10 log probability into surprisal in bits.
pub fn log10_to_bits(log10_prob: f64) -> Result<f64> {
    if log10_prob > 0.0 || log10_prob.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "log10 probability {log10_prob} is positive"
        )));
    }
    Ok(-log10_prob / std::f64::consts::LOG10_2 + 0.0)
}

/// `-log2 p`.
pub fn bits_from_prob(p: f64) -> f64 {
    -p.log2() + 0.0
}

pub fn token_surprisal<M: BigramModel + ?Sized>(model: &M, context: &str, word: &str) -> f64 {
    bits_from_prob(model.prob(context, word))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurprisalEntry {
    /// Word ordinal in the source document, when the entry came from one.
    pub position: Option<usize>,
    pub lemma: String,
    pub context: String,
    pub prob: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurprisalAnnotation {
    pub doc_id: String,
    pub entries: Vec<SurprisalEntry>,
}

impl SurprisalAnnotation {
    pub fn total_bits(&self) -> f64 {
        self.entries.iter().map(|e| e.bits).sum()
    }

    /// TSV rows: `doc position lemma context prob surprisal_bits`.
    pub fn to_tsv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str("doc\tposition\tlemma\tcontext\tprob\tsurprisal_bits\n");
        }
        for e in &self.entries {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.10}\t{:.6}",
                self.doc_id,
                position_field(e.position),
                e.lemma,
                e.context,
                e.prob,
                e.bits
            )
            .unwrap();
        }
        out
    }
}

pub(crate) fn position_field(position: Option<usize>) -> String {
    position.map_or_else(|| "-".to_owned(), |p| p.to_string())
}

/// Scores every (non-punctuation, unless requested) token of `doc`; each
/// token is conditioned on the preceding scored lemma of its sentence.
pub fn annotate_document<M: BigramModel + ?Sized>(
    model: &M,
    doc: &Document,
    include_punctuation: bool,
) -> SurprisalAnnotation {
    let mut entries = Vec::with_capacity(doc.word_count());
    for sentence in doc.sentences() {
        let mut context = SENTENCE_START;
        for token in sentence
            .iter()
            .filter(|t| include_punctuation || !t.is_punctuation)
        {
            let prob = model.prob(context, &token.lemma);
            entries.push(SurprisalEntry {
                position: token.doc_position,
                lemma: token.lemma.clone(),
                context: context.to_owned(),
                prob,
                bits: bits_from_prob(prob),
            });
            context = &token.lemma;
        }
    }
    SurprisalAnnotation {
        doc_id: doc.id().to_owned(),
        entries,
    }
}

/// Scores a lemma chain left to right, starting from `initial_context`.
pub fn annotate_sequence<M: BigramModel + ?Sized>(
    model: &M,
    lemmas: &[&str],
    initial_context: &str,
) -> Result<Vec<SurprisalEntry>> {
    let items: Vec<(&str, Option<usize>)> = lemmas.iter().map(|&l| (l, None)).collect();
    annotate_positioned(model, &items, initial_context)
}

/// As [`annotate_sequence`], carrying each lemma's document position through.
pub fn annotate_positioned<M: BigramModel + ?Sized>(
    model: &M,
    items: &[(&str, Option<usize>)],
    initial_context: &str,
) -> Result<Vec<SurprisalEntry>> {
    if items.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut context = initial_context;
    Ok(items
        .iter()
        .map(|&(lemma, position)| {
            let prob = model.prob(context, lemma);
            let entry = SurprisalEntry {
                position,
                lemma: lemma.to_owned(),
                context: context.to_owned(),
                prob,
                bits: bits_from_prob(prob),
            };
            context = lemma;
            entry
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_plain, load_vertical, PunctuationSet};
    use crate::ngram::{count_bigrams, train_kn, TrainOptions};
    use proptest::prelude::*;

    fn toy_model() -> crate::ngram::KneserNeyBigramModel {
        let doc = load_plain(
            "toy",
            "the cat sat\n\nthe cat ran",
            &PunctuationSet::default(),
        )
        .unwrap();
        train_kn(&count_bigrams(&[doc], false), &TrainOptions::default()).unwrap()
    }

    struct Half;
    impl BigramModel for Half {
        fn prob(&self, _: &str, _: &str) -> f64 {
            0.5
        }
    }

    #[test]
    fn base_change() {
        assert!((log10_to_bits(-1.0).unwrap() - std::f64::consts::LOG2_10).abs() < 1e-12);
        assert_eq!(log10_to_bits(0.0).unwrap(), 0.0);
        assert!(log10_to_bits(-0.0).unwrap().is_sign_positive());
        assert!((log10_to_bits(-0.60206).unwrap() - 2.0).abs() < 1e-4);
        assert!(log10_to_bits(0.1).is_err());
    }

    #[test]
    fn half_is_one_bit() {
        assert_eq!(token_surprisal(&Half, "a", "b"), 1.0);
    }

    #[test]
    fn toy_model_surprisal() {
        let opts = TrainOptions {
            discount: Some(0.5),
            unk_share: Some(0.0),
        };
        let doc = load_plain(
            "toy",
            "the cat sat\n\nthe cat ran",
            &PunctuationSet::default(),
        )
        .unwrap();
        let m = train_kn(&count_bigrams(&[doc], false), &opts).unwrap();
        assert!((token_surprisal(&m, "cat", "sat") - 1.584962500721156).abs() < 1e-12);
    }

    #[test]
    fn unknown_word_is_finite() {
        let s = token_surprisal(&toy_model(), "cat", "Zebra");
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn document_annotation_contexts() {
        let m = toy_model();
        let docs = load_vertical(
            "# doc: d\nthe\tthe\ncat\tcat\nsat\tsat\n\nthe\tthe\n,\t,\ncat\tcat\n",
            &PunctuationSet::default(),
        )
        .unwrap();
        let ann = annotate_document(&m, &docs[0], false);
        assert_eq!(ann.entries.len(), 5);
        assert_eq!(ann.entries[0].context, SENTENCE_START);
        assert_eq!(ann.entries[3].context, SENTENCE_START);
        assert_eq!(ann.entries[4].context, "the");
        assert_eq!(ann.entries[4].position, Some(4));

        // Brute-force per-token loop.
        let mut total = 0.0;
        for (i, t) in docs[0].words().enumerate() {
            let ctx = if i == 0 || t.sentence_index != docs[0].word(i - 1).unwrap().sentence_index {
                SENTENCE_START
            } else {
                &docs[0].word(i - 1).unwrap().lemma
            };
            total += -m.prob(ctx, &t.lemma).log2();
        }
        assert!((ann.total_bits() - total).abs() < 1e-12);
    }

    #[test]
    fn sequence_scoring() {
        let m = toy_model();
        let one = annotate_sequence(&m, &["the"], SENTENCE_START).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].bits, -m.prob(SENTENCE_START, "the").log2());
        assert!(matches!(
            annotate_sequence(&m, &[], SENTENCE_START),
            Err(Error::EmptySequence)
        ));

        let a = annotate_sequence(&m, &["cat", "sat", "the"], SENTENCE_START).unwrap();
        let b = annotate_sequence(&m, &["cat", "sat", "the"], "the").unwrap();
        assert_ne!(a[0].bits, b[0].bits);
        assert_eq!(a[1..], b[1..]);
    }

    #[test]
    fn relinearized_seam_only_changes_following_token() {
        let m = toy_model();
        // [H, m3] vs [r2, m3]: only m3's context differs.
        let attested = annotate_sequence(&m, &["cat", "sat"], SENTENCE_START).unwrap();
        let moved = annotate_sequence(&m, &["the", "sat"], SENTENCE_START).unwrap();
        assert_eq!(attested[1].lemma, moved[1].lemma);
        assert_ne!(attested[1].bits, moved[1].bits);
    }

    #[test]
    fn tsv_dump() {
        let m = toy_model();
        let doc = load_plain("d", "the cat", &PunctuationSet::default()).unwrap();
        let tsv = annotate_document(&m, &doc, false).to_tsv(true);
        let lines: Vec<_> = tsv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("d\t0\tthe\t<s>\t"));
        assert_eq!(lines[2].split('\t').count(), 6);
    }

    proptest! {
        #[test]
        fn locality_and_additivity(
            words in prop::collection::vec(prop::sample::select(vec!["the", "cat", "sat", "ran", "dog"]), 2..12),
            i in 0usize..12,
            replacement in prop::sample::select(vec!["the", "cat", "sat", "ran", "dog"]),
        ) {
            let m = toy_model();
            let i = i % words.len();
            let base = annotate_sequence(&m, &words, SENTENCE_START).unwrap();
            for e in &base {
                prop_assert!(e.bits.is_finite() && e.bits >= 0.0);
                prop_assert!((e.bits + e.prob.log2()).abs() < 1e-12);
            }
            let product: f64 = base.iter().map(|e| e.prob).product();
            let total: f64 = base.iter().map(|e| e.bits).sum();
            prop_assert!((total + product.log2()).abs() < 1e-9);

            let mut changed = words.clone();
            changed[i] = replacement;
            let other = annotate_sequence(&m, &changed, SENTENCE_START).unwrap();
            for j in 0..words.len() {
                if j != i && j != i + 1 {
                    prop_assert_eq!(base[j].bits, other[j].bits);
                }
            }
        }
    }
}

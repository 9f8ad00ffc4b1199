use std::collections::HashMap;

use log::warn;

use super::{BigramCounts, BigramModel, Vocabulary, SENTENCE_END};
use crate::corpus::Document;
use crate::error::{Error, Result};

/// Discounts are kept inside `[EPSILON, 1 - EPSILON]`.
pub const DISCOUNT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discount {
    pub value: f64,
    /// The count-of-counts estimate fell outside the open unit interval.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrainOptions {
    /// Fixed discount in (0, 1); estimated from counts-of-counts when `None`.
    pub discount: Option<f64>,
    /// Share of continuation mass reserved for `<unk>`, in [0, 1).
    /// Defaults to `1 / (N1+(··) + 1)`.
    pub unk_share: Option<f64>,
}

/// `D = n1 / (n1 + 2 n2)` over bigram types seen once and twice.
pub fn estimate_discount(counts: &BigramCounts) -> Result<Discount> {
    let n1 = counts.count_of_counts(1) as f64;
    let n2 = counts.count_of_counts(2) as f64;
    if n1 == 0.0 && n2 == 0.0 {
        return Err(Error::DegenerateCounts);
    }
    let raw = n1 / (n1 + 2.0 * n2);
    let value = raw.clamp(DISCOUNT_EPSILON, 1.0 - DISCOUNT_EPSILON);
    let clamped = value != raw;
    if clamped {
        warn!("discount estimate {raw} (n1={n1}, n2={n2}) clamped to {value}");
    }
    Ok(Discount { value, clamped })
}

/// Interpolated Kneser-Ney bigram model.
///
/// Stored in back-off form: a seen pair `(v, w)` has an explicit
/// probability, everything else is `backoff(v) * unigram(w)`. For a trained
/// model the unigram table holds the continuation distribution and the
/// back-off weight is the interpolation weight, so both branches evaluate the
/// interpolated formula exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct KneserNeyBigramModel {
    pub(super) vocab: Vocabulary,
    pub(super) discount: Option<f64>,
    pub(super) unigram: Vec<f64>,
    pub(super) backoff: Vec<f64>,
    pub(super) bigrams: HashMap<(u32, u32), f64>,
}

pub fn train_kn(counts: &BigramCounts, options: &TrainOptions) -> Result<KneserNeyBigramModel> {
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let discount = match options.discount {
        Some(d) if d > 0.0 && d < 1.0 => d,
        Some(d) => {
            return Err(Error::InvalidArgument(format!(
                "discount {d} outside (0, 1)"
            )))
        }
        None => estimate_discount(counts)?.value,
    };
    let types = counts.total_bigram_types() as f64;
    let unk_share = match options.unk_share {
        Some(e) if (0.0..1.0).contains(&e) => e,
        Some(e) => {
            return Err(Error::InvalidArgument(format!(
                "unknown-word share {e} outside [0, 1)"
            )))
        }
        None => 1.0 / (types + 1.0),
    };

    let vocab = Vocabulary::from_lemmas(counts.lemmas());
    let n = vocab.len();

    let mut unigram = vec![0.0; n];
    for (w, cont) in counts.continuation() {
        unigram[vocab.id(w) as usize] = (1.0 - unk_share) * cont as f64 / types;
    }
    unigram[Vocabulary::UNK as usize] += unk_share;

    let totals = counts.context_totals();
    let fertility = counts.fertility();
    let mut backoff = vec![1.0; n];
    for (v, &total) in &totals {
        backoff[vocab.id(v) as usize] = discount * fertility[v] as f64 / total as f64;
    }

    let mut bigrams = HashMap::with_capacity(counts.total_bigram_types() as usize);
    for ((v, w), c) in counts.bigrams() {
        let (vi, wi) = (vocab.id(v), vocab.id(w));
        let p = (c as f64 - discount).max(0.0) / totals[v] as f64
            + backoff[vi as usize] * unigram[wi as usize];
        bigrams.insert((vi, wi), p);
    }

    Ok(KneserNeyBigramModel {
        vocab,
        discount: Some(discount),
        unigram,
        backoff,
        bigrams,
    })
}

impl KneserNeyBigramModel {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Discount used in training; `None` for models read from ARPA.
    pub fn discount(&self) -> Option<f64> {
        self.discount
    }

    pub fn bigram_entries(&self) -> usize {
        self.bigrams.len()
    }

    pub fn prob_ids(&self, context: u32, word: u32) -> f64 {
        if word == Vocabulary::START {
            return 0.0;
        }
        match self.bigrams.get(&(context, word)) {
            Some(&p) => p,
            None => self.backoff[context as usize] * self.unigram[word as usize],
        }
    }

    /// Lower-order (continuation) probability of `word`.
    pub fn unigram_prob(&self, word: &str) -> f64 {
        self.unigram[self.vocab.id(word) as usize]
    }
}

impl BigramModel for KneserNeyBigramModel {
    fn prob(&self, context: &str, word: &str) -> f64 {
        self.prob_ids(self.vocab.id(context), self.vocab.id(word))
    }
}

/// `2^(mean surprisal)` over every word and sentence end; sentence starts
/// are conditioning events only.
pub fn perplexity<M: BigramModel + ?Sized>(
    model: &M,
    docs: &[Document],
    include_punctuation: bool,
) -> Result<f64> {
    let mut bits = 0.0;
    let mut events = 0usize;
    for doc in docs {
        for sentence in doc.sentences() {
            let mut context = super::SENTENCE_START;
            let mut any = false;
            for token in sentence
                .iter()
                .filter(|t| include_punctuation || !t.is_punctuation)
            {
                bits -= model.prob(context, &token.lemma).log2();
                events += 1;
                context = &token.lemma;
                any = true;
            }
            if any {
                bits -= model.prob(context, SENTENCE_END).log2();
                events += 1;
            }
        }
    }
    if events == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok((bits / events as f64).exp2())
}

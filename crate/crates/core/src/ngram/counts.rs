use std::collections::HashMap;

use rayon::prelude::*;

use super::{SENTENCE_END, SENTENCE_START};
use crate::corpus::Document;

/// Unigram and bigram counts over sentences padded with `<s>` and `</s>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BigramCounts {
    unigrams: HashMap<String, u64>,
    bigrams: HashMap<(String, String), u64>,
}

impl BigramCounts {
    /// Counts one sentence given as its lemma sequence (without padding).
    /// An empty sentence contributes nothing.
    pub fn add_sentence<'a>(&mut self, lemmas: impl IntoIterator<Item = &'a str>) {
        let mut prev = SENTENCE_START;
        let mut any = false;
        for lemma in lemmas {
            if !any {
                *self.unigrams.entry(SENTENCE_START.to_owned()).or_default() += 1;
                any = true;
            }
            *self.unigrams.entry(lemma.to_owned()).or_default() += 1;
            *self
                .bigrams
                .entry((prev.to_owned(), lemma.to_owned()))
                .or_default() += 1;
            prev = lemma;
        }
        if any {
            *self.unigrams.entry(SENTENCE_END.to_owned()).or_default() += 1;
            *self
                .bigrams
                .entry((prev.to_owned(), SENTENCE_END.to_owned()))
                .or_default() += 1;
        }
    }

    /// Adds `n` occurrences of the pair `(v, w)` outside any sentence frame.
    /// `c1(v)` grows by `n` so row sums still match unigram counts; `w` is
    /// registered with a zero count if it was unseen.
    pub fn add_pair(&mut self, v: &str, w: &str, n: u64) {
        *self.unigrams.entry(v.to_owned()).or_default() += n;
        self.unigrams.entry(w.to_owned()).or_default();
        *self
            .bigrams
            .entry((v.to_owned(), w.to_owned()))
            .or_default() += n;
    }

    pub fn merge(mut self, other: BigramCounts) -> BigramCounts {
        for (k, v) in other.unigrams {
            *self.unigrams.entry(k).or_default() += v;
        }
        for (k, v) in other.bigrams {
            *self.bigrams.entry(k).or_default() += v;
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.bigrams.is_empty()
    }

    /// `c1(w)`: occurrences of `w`, padding symbols included.
    pub fn unigram(&self, w: &str) -> u64 {
        self.unigrams.get(w).copied().unwrap_or(0)
    }

    /// `c2(v, w)`.
    pub fn bigram(&self, v: &str, w: &str) -> u64 {
        self.bigrams
            .get(&(v.to_owned(), w.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn unigrams(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.unigrams.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn bigrams(&self) -> impl Iterator<Item = ((&str, &str), u64)> + '_ {
        self.bigrams
            .iter()
            .map(|((v, w), &c)| ((v.as_str(), w.as_str()), c))
    }

    /// Corpus lemmas (every counted symbol except the padding symbols).
    pub fn lemmas(&self) -> impl Iterator<Item = &str> + '_ {
        self.unigrams
            .keys()
            .map(String::as_str)
            .filter(|w| *w != SENTENCE_START && *w != SENTENCE_END)
    }

    /// Number of word tokens (padding excluded).
    pub fn token_count(&self) -> u64 {
        self.unigrams
            .iter()
            .filter(|(k, _)| k.as_str() != SENTENCE_START && k.as_str() != SENTENCE_END)
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn sentence_count(&self) -> u64 {
        self.unigram(SENTENCE_START)
    }

    /// `N1+(·, w)`: number of distinct left contexts of each word.
    pub fn continuation(&self) -> HashMap<&str, u64> {
        let mut out = HashMap::new();
        for (_, w) in self.bigrams.keys() {
            *out.entry(w.as_str()).or_default() += 1;
        }
        out
    }

    /// `N1+(v, ·)`: number of distinct continuations of each context.
    pub fn fertility(&self) -> HashMap<&str, u64> {
        let mut out = HashMap::new();
        for (v, _) in self.bigrams.keys() {
            *out.entry(v.as_str()).or_default() += 1;
        }
        out
    }

    /// `Σ_w c2(v, w)` per context; equals `c1(v)` for every `v` except `</s>`.
    pub fn context_totals(&self) -> HashMap<&str, u64> {
        let mut out = HashMap::new();
        for ((v, _), &c) in &self.bigrams {
            *out.entry(v.as_str()).or_default() += c;
        }
        out
    }

    /// `N1+(··)`: number of distinct bigram types.
    pub fn total_bigram_types(&self) -> u64 {
        self.bigrams.len() as u64
    }

    /// Number of bigram types occurring exactly `k` times.
    pub fn count_of_counts(&self, k: u64) -> u64 {
        self.bigrams.values().filter(|&&c| c == k).count() as u64
    }
}

/// Counts lemma bigrams within sentences, summing over documents.
pub fn count_bigrams(docs: &[Document], include_punctuation: bool) -> BigramCounts {
    docs.par_iter()
        .map(|doc| {
            let mut counts = BigramCounts::default();
            for sentence in doc.sentences() {
                counts.add_sentence(
                    sentence
                        .iter()
                        .filter(|t| include_punctuation || !t.is_punctuation)
                        .map(|t| t.lemma.as_str()),
                );
            }
            counts
        })
        .reduce(BigramCounts::default, BigramCounts::merge)
}

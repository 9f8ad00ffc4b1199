//! Shared helpers for integration tests: a seeded synthetic corpus and a
//! brute-force Kneser-Ney evaluator that works from raw sentences.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rcdensity::corpus::RawToken;
use rcdensity::{Document, PunctuationSet};

/// Sentences over `vocab` word types, `tokens` words in total. Word choice is
/// skewed and partly conditioned on the previous word so that bigrams repeat.
pub fn synthetic_sentences(seed: u64, tokens: usize, vocab: usize) -> Vec<Vec<String>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut produced = 0;
    while produced < tokens {
        let len = rng.gen_range(1..=12).min(tokens - produced);
        let mut sentence: Vec<String> = Vec::with_capacity(len);
        let mut prev = 0usize;
        for _ in 0..len {
            let u: f64 = rng.gen();
            let w = if !sentence.is_empty() && rng.gen_bool(0.4) {
                (prev * 7 + 3) % vocab
            } else {
                ((u * u) * vocab as f64) as usize
            };
            sentence.push(format!("w{w}"));
            prev = w;
        }
        produced += len;
        out.push(sentence);
    }
    out
}

pub fn document(id: &str, sentences: &[Vec<String>]) -> Document {
    let raw = sentences
        .iter()
        .map(|s| s.iter().map(|w| RawToken::new(w, w, None)).collect())
        .collect();
    Document::from_sentences(id, raw, &PunctuationSet::default()).unwrap()
}

/// Interpolated Kneser-Ney evaluated directly from counted pairs:
/// `p(w|v) = max(c(v,w) - D, 0) / c(v,.) + D * N1+(v,.) / c(v,.) * p_cont(w)`
/// with `p_cont(w) = (1 - e) * N1+(.,w) / N1+(..)`, plus `e` for `<unk>`.
pub struct KnOracle {
    pairs: BTreeMap<(String, String), u64>,
    words: BTreeSet<String>,
    pub discount: f64,
    pub unk_share: f64,
}

impl KnOracle {
    pub fn new(sentences: &[Vec<String>], discount: Option<f64>, unk_share: Option<f64>) -> Self {
        let mut pairs = BTreeMap::new();
        let mut words = BTreeSet::new();
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            let mut padded = vec!["<s>".to_owned()];
            padded.extend(s.iter().cloned());
            padded.push("</s>".to_owned());
            for w in s {
                words.insert(w.clone());
            }
            for i in 1..padded.len() {
                *pairs
                    .entry((padded[i - 1].clone(), padded[i].clone()))
                    .or_insert(0) += 1;
            }
        }
        let n1 = pairs.values().filter(|&&c| c == 1).count() as f64;
        let n2 = pairs.values().filter(|&&c| c == 2).count() as f64;
        let discount = discount.unwrap_or(n1 / (n1 + 2.0 * n2));
        let types = pairs.len() as f64;
        Self {
            pairs,
            words,
            discount,
            unk_share: unk_share.unwrap_or(1.0 / (types + 1.0)),
        }
    }

    /// True when the counts-of-counts estimate lies strictly inside (0, 1).
    pub fn estimable(sentences: &[Vec<String>]) -> bool {
        let o = Self::new(sentences, Some(0.5), None);
        let n1 = o.pairs.values().filter(|&&c| c == 1).count();
        let n2 = o.pairs.values().filter(|&&c| c == 2).count();
        n1 > 0 && n2 > 0
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    fn known(&self, w: &str) -> bool {
        self.words.contains(w) || w == "<s>" || w == "</s>"
    }

    fn p_cont(&self, w: &str) -> f64 {
        let types = self.pairs.len() as f64;
        let w = if self.known(w) { w } else { "<unk>" };
        let cont = self.pairs.keys().filter(|(_, x)| x == w).count() as f64;
        let mut p = (1.0 - self.unk_share) * cont / types;
        if w == "<unk>" {
            p += self.unk_share;
        }
        p
    }

    pub fn prob(&self, v: &str, w: &str) -> f64 {
        let v = if self.known(v) { v } else { "<unk>" };
        let w_key = if self.known(w) { w } else { "<unk>" };
        let mut total = 0u64;
        let mut fertility = 0u64;
        let mut count = 0u64;
        for ((a, b), &c) in &self.pairs {
            if a == v {
                total += c;
                fertility += 1;
                if b == w_key {
                    count = c;
                }
            }
        }
        if total == 0 {
            return self.p_cont(w);
        }
        let d = self.discount;
        (count as f64 - d).max(0.0) / total as f64
            + d * fertility as f64 / total as f64 * self.p_cont(w)
    }

    /// `2^(mean bits)` over words and sentence ends.
    pub fn perplexity(&self, sentences: &[Vec<String>]) -> f64 {
        let mut log_sum = 0.0;
        let mut n = 0;
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            let mut prev = "<s>";
            for w in s.iter().map(String::as_str).chain(["</s>"]) {
                log_sum += self.prob(prev, w).log2();
                n += 1;
                prev = w;
            }
        }
        (-log_sum / n as f64).exp2()
    }
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/mini/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

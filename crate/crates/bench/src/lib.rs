//! Synthetic inputs for the benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rcdensity::corpus::RawToken;
use rcdensity::{Document, PunctuationSet};

const TAGS: [&str; 5] = ["NN", "VVFIN", "ART", "ADJA", "APPR"];

/// `docs` documents of roughly `words` tokens each over a skewed vocabulary
/// of `vocab` lemmas, with POS tags and sentence-final periods.
pub fn synthetic_corpus(seed: u64, docs: usize, words: usize, vocab: usize) -> Vec<Document> {
    let mut rng = StdRng::seed_from_u64(seed);
    let punct = PunctuationSet::default();
    (0..docs)
        .map(|d| {
            let mut sentences = Vec::new();
            let mut produced = 0;
            while produced < words {
                let len = rng.gen_range(4..20);
                let mut sentence: Vec<RawToken> = (0..len)
                    .map(|_| {
                        let u: f64 = rng.gen();
                        let id = (u * u * vocab as f64) as usize;
                        let lemma = format!("l{id}");
                        RawToken::new(&lemma, &lemma, Some(TAGS[id % TAGS.len()]))
                    })
                    .collect();
                sentence.push(RawToken::new(".", ".", Some("$.")));
                produced += len;
                sentences.push(sentence);
            }
            Document::from_sentences(format!("doc{d}"), sentences, &punct)
                .expect("synthetic documents are well formed")
        })
        .collect()
}

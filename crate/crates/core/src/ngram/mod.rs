//! Bigram counting, interpolated Kneser-Ney estimation and ARPA persistence.

mod arpa;
mod counts;
mod kn;
mod vocab;

pub use arpa::{export_arpa, import_arpa};
pub use counts::{count_bigrams, BigramCounts};
pub use kn::{
    estimate_discount, perplexity, train_kn, Discount, KneserNeyBigramModel, TrainOptions,
};
pub use vocab::Vocabulary;

pub const SENTENCE_START: &str = "<s>";
pub const SENTENCE_END: &str = "</s>";
pub const UNKNOWN: &str = "<unk>";

/// Conditional word probabilities given the immediately preceding lemma.
pub trait BigramModel {
    /// `p(word | context)`. Lemmas outside the model's vocabulary are mapped
    /// to the unknown symbol.
    fn prob(&self, context: &str, word: &str) -> f64;
}

impl<M: BigramModel + ?Sized> BigramModel for &M {
    fn prob(&self, context: &str, word: &str) -> f64 {
        (**self).prob(context, word)
    }
}

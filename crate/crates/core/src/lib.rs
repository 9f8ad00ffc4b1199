//! Corpus measurements for relative-clause placement studies.
//!
//! The pipeline trains an interpolated Kneser-Ney bigram model over lemmatized
//! documents, turns its probabilities into per-token surprisal, reweights
//! content words by their mention history, and aggregates additive/average
//! surprisal per clause for attested and re-linearized clause orders. A
//! separate givenness scan classifies annotated referents into five salience
//! categories and compares ratios with a 2x2 chi-square test.

pub mod accommodation;
pub mod clauses;
pub mod corpus;
mod error;
pub mod givenness;
pub mod ngram;
pub mod surprisal;

pub use accommodation::{
    accommodate_document, document_weights, factor, next_x, AccommodationState, ContentWords,
    FactorConfig, Observation, WeightedAnnotation, WeightedEntry,
};
pub use clauses::{
    aggregate_by_variant, clause_metrics, parse_clause_annotations, relinearize, standard_metrics,
    ClauseMetrics, ClauseRecord, ExclusionPolicy, Linearization, LinearizationKind, Mode, Part,
    Span, SummaryTable, Variant, Weighting,
};
pub use corpus::{lemma_stream, load_plain, load_vertical, resegment_sentences, write_vertical};
pub use corpus::{Corpus, Document, PunctuationSet, Token};
pub use error::{Error, RecordError, Result};
pub use givenness::{
    chi_square_2x2, classify_document, classify_mention, clause_givenness, parse_referent_tsv,
    ChiSquare, ClauseGivenness, GivennessConfig, InterveningCount, ReferentMention,
    SalienceCategory,
};
pub use ngram::{
    count_bigrams, estimate_discount, export_arpa, import_arpa, perplexity, train_kn, BigramCounts,
    BigramModel, Discount, KneserNeyBigramModel, TrainOptions, Vocabulary, SENTENCE_END,
    SENTENCE_START, UNKNOWN,
};
pub use surprisal::{
    annotate_document, annotate_positioned, annotate_sequence, bits_from_prob, log10_to_bits,
    token_surprisal, SurprisalAnnotation, SurprisalEntry,
};

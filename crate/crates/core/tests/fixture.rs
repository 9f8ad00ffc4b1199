mod common;

use common::fixture;
use rcdensity::{
    classify_document, clause_givenness, count_bigrams, document_weights, load_vertical,
    parse_clause_annotations, parse_referent_tsv, perplexity, resegment_sentences,
    standard_metrics, train_kn, ContentWords, Corpus, ExclusionPolicy, FactorConfig,
    GivennessConfig, Part, PunctuationSet, SalienceCategory, TrainOptions, Variant, Weighting,
};

fn corpus() -> Corpus {
    let docs = load_vertical(&fixture("corpus.vert"), &PunctuationSet::default()).unwrap();
    Corpus::new(docs.iter().map(resegment_sentences).collect()).unwrap()
}

#[test]
fn annotations_are_valid_against_the_corpus() {
    let corpus = corpus();
    assert!(corpus.word_count() > 2000);
    let clauses = parse_clause_annotations(&fixture("clauses.json"), &corpus).unwrap();
    assert!(clauses.iter().any(|c| c.variant == Variant::InSitu));
    assert!(clauses.iter().any(|c| c.variant == Variant::Extraposed));
    let mentions = parse_referent_tsv(&fixture("referents.tsv"), &corpus).unwrap();
    assert!(mentions.len() > clauses.len());
}

#[test]
fn every_clause_scores_in_both_modes() {
    let corpus = corpus();
    let model = train_kn(
        &count_bigrams(corpus.documents(), false),
        &TrainOptions::default(),
    )
    .unwrap();
    let pp = perplexity(&model, corpus.documents(), false).unwrap();
    assert!(pp > 1.0 && pp < 80.0, "training-set perplexity {pp}");

    let clauses = parse_clause_annotations(&fixture("clauses.json"), &corpus).unwrap();
    let content = ContentWords::default();
    for record in &clauses {
        let doc = corpus.get(&record.doc_id).unwrap();
        let weights = document_weights(doc, &content, &FactorConfig::default()).unwrap();
        let bare = standard_metrics(
            record,
            doc,
            &model,
            Weighting::Bare,
            ExclusionPolicy::default(),
        )
        .unwrap();
        let weighted = standard_metrics(
            record,
            doc,
            &model,
            Weighting::Accommodated(&weights),
            ExclusionPolicy::default(),
        )
        .unwrap();
        for (b, w) in bare.iter().zip(&weighted) {
            assert_eq!(b.n_scored, w.n_scored);
            // Factors are at least 1 under the default configuration.
            assert!(
                w.ads >= b.ads - 1e-9,
                "{}: {} < {}",
                record.id,
                w.ads,
                b.ads
            );
            assert_eq!(b.avs * b.n_scored as f64, b.ads);
        }
    }
}

#[test]
fn givenness_partitions_clause_mentions() {
    let corpus = corpus();
    let clauses = parse_clause_annotations(&fixture("clauses.json"), &corpus).unwrap();
    let mentions = parse_referent_tsv(&fixture("referents.tsv"), &corpus).unwrap();
    let classified = classify_document(&mentions, &GivennessConfig::default());
    assert_eq!(classified.len(), mentions.len());
    for record in &clauses {
        let rc = clause_givenness(record, &classified, Part::Rc);
        let matrix = clause_givenness(record, &classified, Part::Matrix);
        let combined = clause_givenness(record, &classified, Part::Combined);
        assert_eq!(rc.total + matrix.total, combined.total);
        assert_eq!(combined.counts.iter().sum::<usize>(), combined.total);
        // The relative pronoun refers back to the head noun just mentioned.
        let (_, pronoun) = classified
            .iter()
            .find(|(m, _)| m.doc_id == record.doc_id && m.span.start == record.rc.start)
            .unwrap();
        assert!(
            !matches!(
                pronoun,
                SalienceCategory::New | SalienceCategory::InferableNew
            ),
            "{}: {pronoun}",
            record.id
        );
    }
}

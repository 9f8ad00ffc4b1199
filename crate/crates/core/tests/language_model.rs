mod common;

use common::{document, synthetic_sentences, KnOracle};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rcdensity::{
    count_bigrams, export_arpa, import_arpa, perplexity, train_kn, BigramModel,
    KneserNeyBigramModel, TrainOptions, SENTENCE_START,
};

fn train(sentences: &[Vec<String>], options: TrainOptions) -> KneserNeyBigramModel {
    let doc = document("d", sentences);
    train_kn(&count_bigrams(&[doc], false), &options).unwrap()
}

fn contexts(model: &KneserNeyBigramModel, rng: &mut StdRng, n: usize) -> Vec<String> {
    let words: Vec<String> = model
        .vocabulary()
        .iter()
        .map(|(_, w)| w.to_owned())
        .collect();
    let mut out: Vec<String> = (0..n - 10)
        .map(|_| words[rng.gen_range(0..words.len())].clone())
        .collect();
    out.extend((0..10).map(|i| format!("unseen{i}")));
    out.push(SENTENCE_START.to_owned());
    out
}

#[test]
fn rows_sum_to_one_on_a_thousand_token_corpus() {
    let sentences = synthetic_sentences(11, 1000, 60);
    let mut rng = StdRng::seed_from_u64(5);
    for options in [
        TrainOptions::default(),
        TrainOptions {
            discount: None,
            unk_share: Some(0.0),
        },
    ] {
        let model = train(&sentences, options);
        for v in contexts(&model, &mut rng, 100) {
            let total: f64 = model
                .vocabulary()
                .iter()
                .map(|(_, w)| model.prob(&v, w))
                .sum();
            assert!((total - 1.0).abs() <= 1e-9, "context {v}: {total}");
        }
    }
}

#[test]
fn matches_brute_force_on_small_corpora() {
    let mut rng = StdRng::seed_from_u64(99);
    let mut checked = 0;
    for seed in 0..300u64 {
        let tokens = rng.gen_range(3..=50);
        let sentences = synthetic_sentences(seed, tokens, rng.gen_range(2..8));
        let discount = (!KnOracle::estimable(&sentences)).then_some(0.5);
        for unk_share in [None, Some(0.0), Some(0.3)] {
            let oracle = KnOracle::new(&sentences, discount, unk_share);
            let model = train(
                &sentences,
                TrainOptions {
                    discount,
                    unk_share,
                },
            );
            let mut words: Vec<&str> = oracle.words().collect();
            words.extend(["<s>", "</s>", "<unk>", "never-seen"]);
            for v in &words {
                for w in &words {
                    let (got, want) = (model.prob(v, w), oracle.prob(v, w));
                    assert!(
                        (got - want).abs() <= 1e-12,
                        "seed {seed}: p({w}|{v}) = {got}, oracle {want}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn toy_anchor() {
    let toy: Vec<Vec<String>> = ["the cat sat", "the cat ran"]
        .iter()
        .map(|s| s.split(' ').map(str::to_owned).collect())
        .collect();
    let options = TrainOptions {
        discount: Some(0.5),
        unk_share: Some(0.0),
    };
    let model = train(&toy, options);
    assert!((model.prob("cat", "sat") - 1.0 / 3.0).abs() <= 1e-12);
    // With the estimate n1 / (n1 + 2 n2) = 4 / 8 the result is the same.
    let estimated = train(
        &toy,
        TrainOptions {
            discount: None,
            unk_share: Some(0.0),
        },
    );
    assert_eq!(estimated.discount(), Some(0.5));
    assert!((estimated.prob("cat", "sat") - 1.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn adding_a_pair_never_lowers_its_probability() {
    let mut rng = StdRng::seed_from_u64(3);
    for seed in 0..60u64 {
        let sentences = synthetic_sentences(seed, 120, 15);
        let doc = document("d", &sentences);
        let base = count_bigrams(&[doc], false);
        for unk_share in [None, Some(0.0)] {
            let options = TrainOptions {
                discount: Some(rng.gen_range(0.05..0.95)),
                unk_share,
            };
            let before = train_kn(&base, &options).unwrap();
            for _ in 0..20 {
                let v = format!("w{}", rng.gen_range(0..16));
                let w = if rng.gen_bool(0.1) {
                    "</s>".to_owned()
                } else {
                    format!("w{}", rng.gen_range(0..16))
                };
                let mut counts = base.clone();
                counts.add_pair(&v, &w, 1);
                let after = train_kn(&counts, &options).unwrap();
                let (p0, p1) = (before.prob(&v, &w), after.prob(&v, &w));
                assert!(p1 >= p0 - 1e-15, "p({w}|{v}) fell from {p0} to {p1}");
            }
        }
    }
}

#[test]
fn arpa_round_trip_on_a_thousand_token_corpus() {
    let sentences = synthetic_sentences(21, 1000, 80);
    let model = train(&sentences, TrainOptions::default());
    let text = export_arpa(&model);
    let back = import_arpa(&text).unwrap();
    let words: Vec<&str> = model.vocabulary().iter().map(|(_, w)| w).collect();
    let mut worst: f64 = 0.0;
    for v in &words {
        for w in &words {
            worst = worst.max((model.prob(v, w) - back.prob(v, w)).abs());
        }
    }
    assert!(worst <= 1e-6, "worst deviation {worst}");
    assert_eq!(export_arpa(&back), text);
}

struct Uniform(usize);

impl BigramModel for Uniform {
    fn prob(&self, _: &str, _: &str) -> f64 {
        1.0 / self.0 as f64
    }
}

#[test]
fn uniform_model_has_perplexity_v() {
    let sentences = synthetic_sentences(2, 200, 10);
    let doc = document("d", &sentences);
    let pp = perplexity(&Uniform(7), std::slice::from_ref(&doc), false).unwrap();
    assert!((pp - 7.0).abs() <= 1e-9);

    // The same model as an ARPA file: 5 words, </s> and <unk> share the mass.
    let lp = format!("{:.7}", (1.0f64 / 7.0).log10());
    let mut text = String::from("\\data\\\nngram 1=8\nngram 2=0\n\n\\1-grams:\n-99\t<s>\n");
    for w in ["</s>", "<unk>", "a", "b", "c", "d", "e"] {
        text.push_str(&format!("{lp}\t{w}\n"));
    }
    text.push_str("\n\\2-grams:\n\n\\end\\\n");
    let model = import_arpa(&text).unwrap();
    let letters: Vec<Vec<String>> = vec![
        vec!["a".into(), "b".into(), "c".into()],
        vec!["e".into(), "zzz".into()],
    ];
    let pp = perplexity(&model, &[document("l", &letters)], false).unwrap();
    assert!((pp - 7.0).abs() <= 1e-6, "{pp}");
}

#[test]
fn perplexity_matches_log_sum_oracle() {
    for seed in 0..20u64 {
        let train_set = synthetic_sentences(seed, 300, 20);
        let test_set = synthetic_sentences(seed + 1000, 100, 24);
        let model = train(&train_set, TrainOptions::default());
        let oracle = KnOracle::new(&train_set, model.discount(), None);
        let got = perplexity(&model, &[document("t", &test_set)], false).unwrap();
        let want = oracle.perplexity(&test_set);
        assert!(((got - want) / want).abs() <= 1e-12, "{got} vs {want}");
    }
}

#[test]
fn training_corpus_with_tiny_discount_is_nearly_deterministic() {
    let sentence: Vec<Vec<String>> = vec!["a b c d e f".split(' ').map(str::to_owned).collect()];
    let model = train(
        &sentence,
        TrainOptions {
            discount: Some(1e-6),
            unk_share: Some(0.0),
        },
    );
    let pp = perplexity(&model, &[document("d", &sentence)], false).unwrap();
    assert!((1.0..1.0 + 1e-5).contains(&pp), "{pp}");
}

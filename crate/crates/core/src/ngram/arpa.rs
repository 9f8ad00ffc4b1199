//! ARPA back-off format, orders 1 and 2.
//!
//! Probabilities and back-off weights are written as base-10 logarithms with
//! seven decimal places; zero probabilities (the sentence-start symbol) are
//! written as `-99`. Reading a file and writing it again reproduces it byte
//! for byte.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::kn::KneserNeyBigramModel;
use super::{Vocabulary, SENTENCE_END, SENTENCE_START, UNKNOWN};
use crate::error::{Error, Result};

const LOG_ZERO: f64 = -99.0;

fn log10_field(p: f64) -> String {
    if p <= 0.0 {
        return format!("{LOG_ZERO:.7}");
    }
    let s = format!("{:.7}", p.log10().max(LOG_ZERO));
    if s == "-0.0000000" {
        "0.0000000".to_owned()
    } else {
        s
    }
}

fn prob_from_log10(value: f64) -> f64 {
    if value <= LOG_ZERO {
        0.0
    } else {
        10f64.powf(value)
    }
}

pub fn export_arpa(model: &KneserNeyBigramModel) -> String {
    let vocab = &model.vocab;
    let mut pairs: Vec<(&(u32, u32), &f64)> = model.bigrams.iter().collect();
    pairs.sort_unstable_by_key(|(k, _)| **k);

    let mut out = String::new();
    out.push_str("\\data\\\n");
    writeln!(out, "ngram 1={}", vocab.len()).unwrap();
    writeln!(out, "ngram 2={}", pairs.len()).unwrap();
    out.push_str("\n\\1-grams:\n");
    for (id, word) in vocab.iter() {
        writeln!(
            out,
            "{}\t{}\t{}",
            log10_field(model.unigram[id as usize]),
            word,
            log10_field(model.backoff[id as usize])
        )
        .unwrap();
    }
    out.push_str("\n\\2-grams:\n");
    for (&(v, w), &p) in pairs {
        writeln!(
            out,
            "{}\t{} {}",
            log10_field(p),
            vocab.word(v),
            vocab.word(w)
        )
        .unwrap();
    }
    out.push_str("\n\\end\\\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Data,
    Unigrams,
    Bigrams,
    End,
}

pub fn import_arpa(text: &str) -> Result<KneserNeyBigramModel> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let number = |line: usize, field: &str| -> Result<f64> {
        field
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(line, format!("non-numeric field `{field}`")))
    };

    let mut section = Section::Header;
    let mut declared: HashMap<usize, usize> = HashMap::new();
    let mut unigrams: Vec<(String, f64, f64)> = Vec::new();
    let mut bigram_lines: Vec<(usize, String, String, f64)> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "\\data\\" if section == Section::Header => {
                section = Section::Data;
                continue;
            }
            "\\1-grams:" if section == Section::Data => {
                section = Section::Unigrams;
                continue;
            }
            "\\2-grams:" if section == Section::Unigrams => {
                section = Section::Bigrams;
                continue;
            }
            "\\end\\" if matches!(section, Section::Unigrams | Section::Bigrams) => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Header => {
                return Err(err(line_no, "missing `\\data\\` header".into()));
            }
            Section::Data => {
                let spec = line
                    .strip_prefix("ngram ")
                    .and_then(|s| s.split_once('='))
                    .ok_or_else(|| err(line_no, format!("unexpected line `{line}`")))?;
                let order: usize =
                    spec.0.trim().parse().map_err(|_| {
                        err(line_no, format!("non-numeric order `{}`", spec.0.trim()))
                    })?;
                let count: usize =
                    spec.1.trim().parse().map_err(|_| {
                        err(line_no, format!("non-numeric count `{}`", spec.1.trim()))
                    })?;
                if !(1..=2).contains(&order) {
                    return Err(err(line_no, format!("unsupported order {order}")));
                }
                declared.insert(order, count);
            }
            Section::Unigrams => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if !(2..=3).contains(&fields.len()) {
                    return Err(err(line_no, format!("malformed unigram line `{line}`")));
                }
                let logp = number(line_no, fields[0])?;
                let bow = match fields.get(2) {
                    Some(f) => number(line_no, f)?,
                    None => 0.0,
                };
                unigrams.push((fields[1].to_owned(), logp, bow));
            }
            Section::Bigrams => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(err(line_no, format!("malformed bigram line `{line}`")));
                }
                let logp = number(line_no, fields[0])?;
                bigram_lines.push((line_no, fields[1].to_owned(), fields[2].to_owned(), logp));
            }
            Section::End => {
                return Err(err(line_no, "content after `\\end\\`".into()));
            }
        }
    }

    if section != Section::End {
        return Err(err(
            last_line,
            "unexpected end of input (missing `\\end\\`)".into(),
        ));
    }
    let expected_uni = declared.get(&1).copied().unwrap_or(0);
    let expected_bi = declared.get(&2).copied().unwrap_or(0);
    if unigrams.len() != expected_uni {
        return Err(err(
            last_line,
            format!("declared {expected_uni} unigrams, found {}", unigrams.len()),
        ));
    }
    if bigram_lines.len() != expected_bi {
        return Err(err(
            last_line,
            format!(
                "declared {expected_bi} bigrams, found {}",
                bigram_lines.len()
            ),
        ));
    }
    for sym in [SENTENCE_START, SENTENCE_END, UNKNOWN] {
        if !unigrams.iter().any(|(w, _, _)| w == sym) {
            return Err(err(last_line, format!("missing reserved unigram `{sym}`")));
        }
    }

    let mut vocab = Vocabulary::default();
    for (w, _, _) in &unigrams {
        vocab.insert(w);
    }
    if vocab.len() != unigrams.len() {
        return Err(err(last_line, "duplicate unigram entries".into()));
    }
    let mut unigram = vec![0.0; vocab.len()];
    let mut backoff = vec![1.0; vocab.len()];
    for (w, logp, bow) in &unigrams {
        let id = vocab.id(w) as usize;
        unigram[id] = prob_from_log10(*logp);
        backoff[id] = prob_from_log10(*bow);
    }
    let mut bigrams = HashMap::with_capacity(bigram_lines.len());
    for (line_no, v, w, logp) in bigram_lines {
        let (Some(vi), Some(wi)) = (vocab.get(&v), vocab.get(&w)) else {
            return Err(err(
                line_no,
                format!("bigram `{v} {w}` uses an undeclared word"),
            ));
        };
        if bigrams.insert((vi, wi), prob_from_log10(logp)).is_some() {
            return Err(err(line_no, format!("duplicate bigram `{v} {w}`")));
        }
    }

    Ok(KneserNeyBigramModel {
        vocab,
        discount: None,
        unigram,
        backoff,
        bigrams,
    })
}

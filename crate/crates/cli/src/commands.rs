//! The subcommands as library functions. Each one computes its complete
//! output in memory before anything is written, so a failing run leaves no
//! partial files behind.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rcdensity::corpus::{load_vertical_bytes, RawToken};
use rcdensity::{
    accommodate_document, aggregate_by_variant, annotate_document, chi_square_2x2,
    classify_document, clause_givenness, count_bigrams, document_weights, export_arpa, import_arpa,
    load_plain, parse_clause_annotations, parse_referent_tsv, resegment_sentences,
    standard_metrics, ChiSquare, ClauseGivenness, ClauseMetrics, ClauseRecord, ContentWords,
    Corpus, Document, KneserNeyBigramModel, Mode, Observation, ReferentMention, SalienceCategory,
    Variant, Vocabulary, Weighting,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{CorpusFormat, RunConfig, Unit};
use crate::error::{CliError, CliResult};
use crate::report::{self, Comparison, GIVENNESS_PARTS, VARIANTS};

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read(path)?)
        .map_err(|e| CliError::Input(format!("{}: invalid UTF-8: {e}", path.display())))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Rebuilds a document with each word's surface form as its lemma.
fn surface_units(doc: &Document, cfg: &RunConfig) -> CliResult<Document> {
    let sentences = doc
        .sentences()
        .map(|s| {
            s.iter()
                .map(|t| RawToken::new(&t.surface, &t.surface, t.pos.as_deref()))
                .collect()
        })
        .collect();
    Ok(Document::from_sentences(
        doc.id(),
        sentences,
        &cfg.punctuation_set(),
    )?)
}

/// Loads, re-segments at periods, and (optionally) switches to surface units.
pub fn load_corpus(cfg: &RunConfig) -> CliResult<Corpus> {
    if cfg.corpus.is_empty() {
        return Err(CliError::Input("no corpus given (--corpus)".into()));
    }
    let punct = cfg.punctuation_set();
    let mut docs = Vec::new();
    for path in &cfg.corpus {
        let bytes = read(path)?;
        let loaded = match cfg.format {
            CorpusFormat::Vertical => load_vertical_bytes(&bytes, &punct),
            CorpusFormat::Plain => {
                let text = std::str::from_utf8(&bytes).map_err(rcdensity::Error::from)?;
                let id = path
                    .file_stem()
                    .map_or_else(|| "doc".to_owned(), |s| s.to_string_lossy().into_owned());
                load_plain(&id, text, &punct).map(|d| vec![d])
            }
        }
        .map_err(|e| CliError::from(e).in_file(path))?;
        for doc in loaded {
            let doc = resegment_sentences(&doc);
            docs.push(match cfg.unit {
                Unit::Lemma => doc,
                Unit::Surface => surface_units(&doc, cfg)?,
            });
        }
    }
    let corpus = Corpus::new(docs)?;
    info!(
        "loaded {} documents, {} words, {} sentences",
        corpus.len(),
        corpus.word_count(),
        corpus.sentence_count()
    );
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub vocabulary: usize,
    pub tokens: u64,
    pub sentences: u64,
    pub discount: f64,
}

impl fmt::Display for TrainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vocabulary={} (+{} reserved), tokens={}, sentences={}, D={}",
            self.vocabulary,
            Vocabulary::RESERVED,
            self.tokens,
            self.sentences,
            self.discount
        )
    }
}

pub fn train(cfg: &RunConfig, corpus: &Corpus) -> CliResult<(KneserNeyBigramModel, TrainReport)> {
    let counts = count_bigrams(corpus.documents(), cfg.include_punctuation);
    let model = rcdensity::train_kn(&counts, &cfg.train_options())?;
    let report = TrainReport {
        vocabulary: model.vocabulary().lemma_count(),
        tokens: counts.token_count(),
        sentences: counts.sentence_count(),
        discount: model
            .discount()
            .ok_or_else(|| CliError::Internal("trained model without a discount".into()))?,
    };
    Ok((model, report))
}

/// The model named in the config, or one trained on the corpus.
pub fn obtain_model(cfg: &RunConfig, corpus: &Corpus) -> CliResult<KneserNeyBigramModel> {
    match &cfg.model {
        Some(path) => {
            let text = read_text(path)?;
            import_arpa(&text).map_err(|e| CliError::from(e).in_file(path))
        }
        None => {
            let (model, report) = train(cfg, corpus)?;
            info!("trained in-process: {report}");
            Ok(model)
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Trains on the corpus and writes the model as ARPA to `output`.
pub fn cmd_train(cfg: &RunConfig, output: &Path) -> CliResult<TrainReport> {
    cfg.check_paths()?;
    let corpus = load_corpus(cfg)?;
    let (model, report) = train(cfg, &corpus)?;
    write_file(output, export_arpa(&model).as_bytes())?;
    Ok(report)
}

fn content_words(cfg: &RunConfig) -> CliResult<ContentWords> {
    let content = ContentWords::default().with_tags(&cfg.content_tags);
    Ok(match &cfg.stoplist {
        Some(path) => content.with_stoplist(&read_text(path)?),
        None => content,
    })
}

/// Per-token surprisal with accommodation columns for the selected documents
/// (all documents when `doc_ids` is empty).
pub fn cmd_surprisal(cfg: &RunConfig, doc_ids: &[String]) -> CliResult<String> {
    cfg.check_paths()?;
    let corpus = load_corpus(cfg)?;
    let docs: Vec<&Document> = if doc_ids.is_empty() {
        corpus.documents().iter().collect()
    } else {
        doc_ids
            .iter()
            .map(|id| {
                corpus
                    .get(id)
                    .ok_or_else(|| CliError::Input(format!("unknown document id `{id}`")))
            })
            .collect::<CliResult<_>>()?
    };
    let model = obtain_model(cfg, &corpus)?;
    let content = content_words(cfg)?;
    let mut out = String::new();
    for (i, doc) in docs.into_iter().enumerate() {
        let bare = annotate_document(&model, doc, cfg.include_punctuation);
        let weighted = accommodate_document(&bare, doc, &content, &cfg.factor)?;
        out.push_str(&weighted.to_tsv(i == 0));
    }
    Ok(out)
}

fn load_annotations(
    cfg: &RunConfig,
    corpus: &Corpus,
) -> CliResult<(Vec<ClauseRecord>, Vec<ReferentMention>)> {
    let clauses_path = cfg
        .clauses
        .as_deref()
        .ok_or_else(|| CliError::Input("no clause annotations given (--clauses)".into()))?;
    let referents_path = cfg
        .referents
        .as_deref()
        .ok_or_else(|| CliError::Input("no referent annotations given (--referents)".into()))?;
    let clauses = parse_clause_annotations(&read_text(clauses_path)?, corpus)
        .map_err(|e| CliError::from(e).in_file(clauses_path));
    let referents = parse_referent_tsv(&read_text(referents_path)?, corpus)
        .map_err(|e| CliError::from(e).in_file(referents_path));
    match (clauses, referents) {
        (Ok(c), Ok(r)) => Ok((c, r)),
        (Err(CliError::Validation(mut a)), Err(CliError::Validation(b))) => {
            a.extend(b);
            Err(CliError::Validation(a))
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

fn tally_givenness(
    clauses: &[ClauseRecord],
    classified: &[(ReferentMention, SalienceCategory)],
) -> Vec<(Variant, rcdensity::Part, ClauseGivenness)> {
    let mut by_doc: HashMap<&str, Vec<(ReferentMention, SalienceCategory)>> = HashMap::new();
    for item in classified {
        by_doc.entry(&item.0.doc_id).or_default().push(item.clone());
    }
    let mut rows = Vec::new();
    for variant in VARIANTS {
        for part in GIVENNESS_PARTS {
            let mut total = ClauseGivenness::default();
            for record in clauses.iter().filter(|r| r.variant == variant) {
                if let Some(mentions) = by_doc.get(record.doc_id.as_str()) {
                    total += clause_givenness(record, mentions, part);
                }
            }
            rows.push((variant, part, total));
        }
    }
    rows
}

fn comparisons(rows: &[(Variant, rcdensity::Part, ClauseGivenness)]) -> Vec<Comparison> {
    let rc = |variant: Variant| {
        rows.iter()
            .find(|(v, p, _)| *v == variant && *p == rcdensity::Part::Rc)
            .map(|r| r.2)
            .unwrap_or_default()
    };
    let (in_situ, extraposed) = (rc(Variant::InSitu), rc(Variant::Extraposed));
    let split = |g: &ClauseGivenness, yes: usize| [yes as u64, (g.total - yes) as u64];
    let make = |label: &str, f: fn(&ClauseGivenness) -> usize| {
        let [a, b] = split(&in_situ, f(&in_situ));
        let [c, d] = split(&extraposed, f(&extraposed));
        let result: Option<ChiSquare> = chi_square_2x2(a, b, c, d).ok();
        if result.is_none() {
            warn!("{label}: degenerate 2x2 table [[{a}, {b}], [{c}, {d}]]");
        }
        Comparison {
            label: label.to_owned(),
            table: [a, b, c, d],
            result,
        }
    };
    vec![
        make("new referents in rel. cl.", ClauseGivenness::new_count),
        make(
            "salient referents in rel. cl.",
            ClauseGivenness::salient_count,
        ),
    ]
}

/// Given a corpus, referents and (optionally) clauses: the Table-1-shaped
/// summary when clauses are configured, else one classified row per mention.
pub fn cmd_givenness(cfg: &RunConfig) -> CliResult<String> {
    cfg.check_paths()?;
    let corpus = load_corpus(cfg)?;
    let referents_path = cfg
        .referents
        .as_deref()
        .ok_or_else(|| CliError::Input("no referent annotations given (--referents)".into()))?;
    if cfg.clauses.is_some() {
        let (clauses, mentions) = load_annotations(cfg, &corpus)?;
        let classified = classify_document(&mentions, &cfg.givenness());
        return Ok(report::givenness_table(&tally_givenness(
            &clauses,
            &classified,
        )));
    }
    let mentions = parse_referent_tsv(&read_text(referents_path)?, &corpus)
        .map_err(|e| CliError::from(e).in_file(referents_path))?;
    let mut out = String::from("doc\tstart\tend\treferent_id\tcategory\n");
    for (m, category) in classify_document(&mentions, &cfg.givenness()) {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            m.doc_id, m.span.start, m.span.end, m.referent_id, category
        ));
    }
    Ok(out)
}

/// `statistic` and `p_value` of a 2x2 table `[[a, b], [c, d]]`.
pub fn cmd_chi2(a: u64, b: u64, c: u64, d: u64) -> CliResult<String> {
    let r = chi_square_2x2(a, b, c, d)?;
    Ok(format!(
        "statistic\tp_value\n{:.6}\t{:.6}\n",
        r.statistic, r.p_value
    ))
}

/// Output files of an analysis run, in the order they are written.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub files: Vec<(String, String)>,
}

impl Bundle {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    role: &'static str,
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    tool: String,
    command: &'static str,
    config_sha256: String,
    config: std::collections::BTreeMap<&'static str, String>,
    model: &'static str,
    inputs: Vec<ManifestEntry>,
    outputs: Vec<ManifestEntry>,
    records: usize,
    mentions: usize,
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

/// Runs the whole measurement pipeline and renders the report bundle.
pub fn analyze(cfg: &RunConfig) -> CliResult<Bundle> {
    cfg.check_paths()?;
    let corpus = load_corpus(cfg)?;
    let (clauses, mentions) = load_annotations(cfg, &corpus)?;
    let model = obtain_model(cfg, &corpus)?;
    let content = content_words(cfg)?;

    let mut weights: HashMap<&str, Vec<Option<Observation>>> = HashMap::new();
    for doc in corpus.documents() {
        weights.insert(doc.id(), document_weights(doc, &content, &cfg.factor)?);
    }

    let mut rows: Vec<(&ClauseRecord, ClauseMetrics)> = Vec::new();
    let mut failures = Vec::new();
    for record in &clauses {
        let doc = corpus
            .get(&record.doc_id)
            .ok_or_else(|| CliError::Internal(format!("record {} lost its document", record.id)))?;
        for weighting in [
            Weighting::Bare,
            Weighting::Accommodated(&weights[record.doc_id.as_str()]),
        ] {
            match standard_metrics(record, doc, &model, weighting, cfg.exclusion()) {
                Ok(ms) => rows.extend(ms.into_iter().map(|m| (record, m))),
                Err(rcdensity::Error::ClauseTooShort(m)) => {
                    failures.push(format!("record {}: {m}", record.id));
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Validation(failures));
    }

    let summary = aggregate_by_variant(rows.iter().map(|(r, m)| (*r, m)));
    let classified = classify_document(&mentions, &cfg.givenness());
    let givenness = tally_givenness(&clauses, &classified);

    let mut files = vec![
        ("table1.tsv".to_owned(), report::givenness_table(&givenness)),
        (
            "table2.tsv".to_owned(),
            report::surprisal_table(&summary, Mode::Bare),
        ),
        (
            "table3.tsv".to_owned(),
            report::surprisal_table(&summary, Mode::Accommodated),
        ),
        (
            "hypotheticals.tsv".to_owned(),
            report::hypotheticals_table(&summary),
        ),
        (
            "chi_square.tsv".to_owned(),
            report::chi_square_table(&comparisons(&givenness)),
        ),
        ("metrics.tsv".to_owned(), report::metrics_table(&rows)),
    ];

    let mut inputs = Vec::new();
    let mut add_input = |role: &'static str, path: &PathBuf| -> CliResult<()> {
        inputs.push(ManifestEntry {
            role,
            name: file_name(path),
            sha256: sha256_hex(&read(path)?),
        });
        Ok(())
    };
    for path in &cfg.corpus {
        add_input("corpus", path)?;
    }
    for (role, path) in [
        ("model", &cfg.model),
        ("clauses", &cfg.clauses),
        ("referents", &cfg.referents),
        ("stoplist", &cfg.stoplist),
    ] {
        if let Some(p) = path {
            add_input(role, p)?;
        }
    }
    let outputs = files
        .iter()
        .map(|(name, contents)| ManifestEntry {
            role: "output",
            name: name.clone(),
            sha256: sha256_hex(contents.as_bytes()),
        })
        .collect();
    let manifest = Manifest {
        tool: format!("rcdensity {}", env!("CARGO_PKG_VERSION")),
        command: "analyze",
        config_sha256: sha256_hex(cfg.canonical().as_bytes()),
        config: cfg.parameters(),
        model: if cfg.model.is_some() {
            "file"
        } else {
            "trained"
        },
        inputs,
        outputs,
        records: clauses.len(),
        mentions: mentions.len(),
    };
    let mut json =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push('\n');
    files.push(("manifest.json".to_owned(), json));
    Ok(Bundle { files })
}

/// [`analyze`], then writes every file of the bundle into `cfg.out_dir`.
pub fn cmd_analyze(cfg: &RunConfig) -> CliResult<Bundle> {
    let bundle = analyze(cfg)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    for (name, contents) in &bundle.files {
        write_file(&cfg.out_dir.join(name), contents.as_bytes())?;
    }
    Ok(bundle)
}

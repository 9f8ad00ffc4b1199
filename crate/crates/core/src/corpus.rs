//! Document model and corpus ingestion.
//!
//! Two input formats are supported: the vertical format (one token per line,
//! `surface<TAB>lemma[<TAB>pos]`, blank line between sentences, `# doc: <id>`
//! headers) and whitespace-tokenized plain text. Word tokens receive a dense
//! `doc_position`; punctuation tokens do not, so distances measured in
//! positions are distances in words.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ngram::{SENTENCE_END, SENTENCE_START, UNKNOWN};

const DEFAULT_PUNCTUATION: &str = ".,;:?!/()„\"\u{2014}";

/// Characters that make up punctuation tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctuationSet {
    chars: BTreeSet<char>,
}

impl Default for PunctuationSet {
    fn default() -> Self {
        Self::from_chars(DEFAULT_PUNCTUATION)
    }
}

impl PunctuationSet {
    pub fn from_chars(chars: &str) -> Self {
        Self {
            chars: chars.chars().filter(|c| !c.is_whitespace()).collect(),
        }
    }

    pub fn contains(&self, c: char) -> bool {
        self.chars.contains(&c)
    }

    /// True iff `surface` is non-empty and consists only of punctuation characters.
    pub fn is_punctuation(&self, surface: &str) -> bool {
        !surface.is_empty() && surface.chars().all(|c| self.contains(c))
    }

    pub fn as_string(&self) -> String {
        self.chars.iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Option<String>,
    /// Ordinal among the document's word tokens; `None` for punctuation.
    pub doc_position: Option<usize>,
    pub sentence_index: usize,
    pub is_punctuation: bool,
}

/// Token fields before positions and sentence indices are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub surface: String,
    pub lemma: String,
    pub pos: Option<String>,
}

impl RawToken {
    pub fn new(surface: impl Into<String>, lemma: impl Into<String>, pos: Option<&str>) -> Self {
        Self {
            surface: surface.into(),
            lemma: lemma.into(),
            pos: pos.filter(|p| !p.is_empty()).map(str::to_owned),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    tokens: Vec<Token>,
    sentence_count: usize,
    /// doc_position -> index into `tokens`.
    words: Vec<usize>,
}

impl Document {
    /// Builds a document from sentences of raw tokens. Empty sentences are dropped.
    pub fn from_sentences(
        id: impl Into<String>,
        sentences: Vec<Vec<RawToken>>,
        punctuation: &PunctuationSet,
    ) -> Result<Self> {
        let id = id.into();
        let mut tokens = Vec::new();
        let mut sentence_index = 0;
        for sentence in sentences.into_iter().filter(|s| !s.is_empty()) {
            for raw in sentence {
                let is_punctuation = punctuation.is_punctuation(&raw.surface);
                if raw.surface.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "document `{id}`: empty token surface"
                    )));
                }
                if !is_punctuation && raw.lemma.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "document `{id}`: word `{}` has an empty lemma",
                        raw.surface
                    )));
                }
                if is_reserved(&raw.lemma) {
                    return Err(Error::InvalidArgument(format!(
                        "document `{id}`: lemma `{}` collides with a reserved symbol",
                        raw.lemma
                    )));
                }
                tokens.push(Token {
                    surface: raw.surface,
                    lemma: raw.lemma,
                    pos: raw.pos.filter(|p| !p.is_empty()),
                    doc_position: None,
                    sentence_index,
                    is_punctuation,
                });
            }
            sentence_index += 1;
        }
        Ok(Self::assemble(id, tokens, sentence_index))
    }

    fn assemble(id: String, mut tokens: Vec<Token>, sentence_count: usize) -> Self {
        let mut words = Vec::new();
        for (i, token) in tokens.iter_mut().enumerate() {
            token.doc_position = if token.is_punctuation {
                None
            } else {
                words.push(i);
                Some(words.len() - 1)
            };
        }
        Self {
            id,
            tokens,
            sentence_count,
            words,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_count
    }

    /// Number of non-punctuation tokens.
    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, position: usize) -> Option<&Token> {
        self.words.get(position).map(|&i| &self.tokens[i])
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.words.iter().map(move |&i| &self.tokens[i])
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> + '_ {
        self.tokens
            .chunk_by(|a, b| a.sentence_index == b.sentence_index)
    }

    /// Lemma of the word preceding `position` in the same sentence, or the
    /// sentence-start symbol when `position` is sentence-initial.
    pub fn preceding_context(&self, position: usize) -> &str {
        match (
            self.word(position),
            position.checked_sub(1).and_then(|p| self.word(p)),
        ) {
            (Some(cur), Some(prev)) if prev.sentence_index == cur.sentence_index => &prev.lemma,
            _ => SENTENCE_START,
        }
    }
}

fn is_reserved(lemma: &str) -> bool {
    lemma == SENTENCE_START || lemma == SENTENCE_END || lemma == UNKNOWN
}

/// A set of documents addressable by id.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Result<Self> {
        let mut index = HashMap::with_capacity(docs.len());
        for (i, doc) in docs.iter().enumerate() {
            if index.insert(doc.id.clone(), i).is_some() {
                return Err(Error::DuplicateDocument(doc.id.clone()));
            }
        }
        Ok(Self { docs, index })
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.docs[i])
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn word_count(&self) -> usize {
        self.docs.iter().map(Document::word_count).sum()
    }

    pub fn sentence_count(&self) -> usize {
        self.docs.iter().map(Document::sentence_count).sum()
    }
}

/// Parses vertical-format bytes, rejecting invalid UTF-8.
pub fn load_vertical_bytes(source: &[u8], punctuation: &PunctuationSet) -> Result<Vec<Document>> {
    load_vertical(std::str::from_utf8(source)?, punctuation)
}

pub fn load_vertical(source: &str, punctuation: &PunctuationSet) -> Result<Vec<Document>> {
    struct Pending {
        id: String,
        sentences: Vec<Vec<RawToken>>,
    }

    fn finish(pending: Pending, punctuation: &PunctuationSet, line: usize) -> Result<Document> {
        Document::from_sentences(pending.id, pending.sentences, punctuation).map_err(|e| {
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })
    }

    let mut docs: Vec<Document> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut current: Option<(Pending, usize)> = None;

    for (i, raw_line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);

        if let Some(rest) = line.strip_prefix('#') {
            if let Some(id) = rest.trim_start().strip_prefix("doc:") {
                let id = id.trim();
                if id.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "document header without id".into(),
                    });
                }
                if !seen.insert(id.to_owned()) {
                    return Err(Error::DuplicateDocument(id.to_owned()));
                }
                if let Some((pending, start)) = current.take() {
                    docs.push(finish(pending, punctuation, start)?);
                }
                current = Some((
                    Pending {
                        id: id.to_owned(),
                        sentences: vec![Vec::new()],
                    },
                    line_no,
                ));
            }
            continue;
        }

        if line.trim().is_empty() {
            if let Some((pending, _)) = current.as_mut() {
                if pending.sentences.last().is_some_and(|s| !s.is_empty()) {
                    pending.sentences.push(Vec::new());
                }
            }
            continue;
        }

        let Some((pending, _)) = current.as_mut() else {
            return Err(Error::Parse {
                line: line_no,
                message: "token line before any `# doc:` header".into(),
            });
        };
        let columns: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&columns.len()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected 2 or 3 tab-separated columns, found {}",
                    columns.len()
                ),
            });
        }
        if columns[0].is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty surface".into(),
            });
        }
        if columns[1].is_empty() && !punctuation.is_punctuation(columns[0]) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("word `{}` has an empty lemma", columns[0]),
            });
        }
        if is_reserved(columns[1]) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("lemma `{}` is a reserved symbol", columns[1]),
            });
        }
        let token = RawToken::new(columns[0], columns[1], columns.get(2).copied());
        pending
            .sentences
            .last_mut()
            .expect("pending document always has an open sentence")
            .push(token);
    }

    if let Some((pending, start)) = current.take() {
        docs.push(finish(pending, punctuation, start)?);
    }
    Ok(docs)
}

/// Serializes documents in the vertical format accepted by [`load_vertical`].
pub fn write_vertical(docs: &[Document]) -> Result<String> {
    let mut out = String::new();
    for doc in docs {
        if doc.id.contains(['\n', '\r']) || doc.id.trim() != doc.id || doc.id.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "document id `{}` cannot be written",
                doc.id
            )));
        }
        writeln!(out, "# doc: {}", doc.id).unwrap();
        for (s, sentence) in doc.sentences().enumerate() {
            if s > 0 {
                out.push('\n');
            }
            for token in sentence {
                let fields = [Some(&token.surface), Some(&token.lemma), token.pos.as_ref()];
                if fields
                    .iter()
                    .flatten()
                    .any(|f| f.contains(['\t', '\n', '\r']))
                    || token.surface.starts_with('#')
                    || token.surface.trim().is_empty()
                {
                    return Err(Error::InvalidArgument(format!(
                        "token `{}` in document `{}` cannot be written",
                        token.surface, doc.id
                    )));
                }
                out.push_str(&token.surface);
                out.push('\t');
                out.push_str(&token.lemma);
                if let Some(pos) = &token.pos {
                    out.push('\t');
                    out.push_str(pos);
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Tokenizes plain text: whitespace splitting, punctuation characters at
/// either end of a chunk split off as single-character tokens, lemma =
/// lowercased surface. Paragraphs (blank-line separated) become sentences;
/// apply [`resegment_sentences`] to split at periods.
pub fn load_plain(id: &str, text: &str, punctuation: &PunctuationSet) -> Result<Document> {
    let mut sentences = vec![Vec::new()];
    for line in text.lines() {
        if line.trim().is_empty() {
            if sentences
                .last()
                .is_some_and(|s: &Vec<RawToken>| !s.is_empty())
            {
                sentences.push(Vec::new());
            }
            continue;
        }
        let sentence = sentences.last_mut().unwrap();
        for chunk in line.split_whitespace() {
            split_chunk(chunk, punctuation, sentence);
        }
    }
    Document::from_sentences(id, sentences, punctuation)
}

fn split_chunk(chunk: &str, punctuation: &PunctuationSet, out: &mut Vec<RawToken>) {
    let punct_token = |c: char| RawToken::new(c.to_string(), c.to_string(), None);
    let core_start = chunk
        .char_indices()
        .find(|&(_, c)| !punctuation.contains(c))
        .map(|(i, _)| i);
    let Some(core_start) = core_start else {
        out.extend(chunk.chars().map(punct_token));
        return;
    };
    let core_end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !punctuation.contains(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap();
    out.extend(chunk[..core_start].chars().map(punct_token));
    let core = &chunk[core_start..core_end];
    out.push(RawToken::new(core, core.to_lowercase(), None));
    out.extend(chunk[core_end..].chars().map(punct_token));
}

/// Adds a sentence boundary after every token whose surface is exactly ".".
pub fn resegment_sentences(doc: &Document) -> Document {
    let mut tokens = doc.tokens.clone();
    let mut index = 0;
    for (i, token) in tokens.iter_mut().enumerate() {
        if i > 0
            && (doc.tokens[i - 1].surface == "."
                || doc.tokens[i].sentence_index != doc.tokens[i - 1].sentence_index)
        {
            index += 1;
        }
        token.sentence_index = index;
    }
    let sentence_count = if tokens.is_empty() { 0 } else { index + 1 };
    Document {
        id: doc.id.clone(),
        tokens,
        sentence_count,
        words: doc.words.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamEntry<'a> {
    pub lemma: &'a str,
    pub doc_position: Option<usize>,
    pub sentence_index: usize,
}

pub fn lemma_stream(doc: &Document, include_punctuation: bool) -> Vec<StreamEntry<'_>> {
    doc.tokens
        .iter()
        .filter(|t| include_punctuation || !t.is_punctuation)
        .map(|t| StreamEntry {
            lemma: &t.lemma,
            doc_position: t.doc_position,
            sentence_index: t.sentence_index,
        })
        .collect()
}

use std::collections::HashMap;

use super::{SENTENCE_END, SENTENCE_START, UNKNOWN};

/// Dense lemma ids. Ids 0, 1 and 2 are the sentence-start, sentence-end and
/// unknown symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let mut vocab = Self {
            words: Vec::new(),
            ids: HashMap::new(),
        };
        for sym in [SENTENCE_START, SENTENCE_END, UNKNOWN] {
            vocab.insert(sym);
        }
        vocab
    }
}

impl Vocabulary {
    pub const START: u32 = 0;
    pub const END: u32 = 1;
    pub const UNK: u32 = 2;
    pub const RESERVED: usize = 3;

    /// Builds a vocabulary with corpus lemmas in sorted order after the
    /// reserved symbols.
    pub fn from_lemmas<'a>(lemmas: impl IntoIterator<Item = &'a str>) -> Self {
        let mut sorted: Vec<&str> = lemmas.into_iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        let mut vocab = Self::default();
        for lemma in sorted {
            vocab.insert(lemma);
        }
        vocab
    }

    /// Inserts `word` if absent and returns its id.
    pub(crate) fn insert(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_owned());
        self.ids.insert(word.to_owned(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    /// Id of `word`, or the unknown id.
    pub fn id(&self, word: &str) -> u32 {
        self.get(word).unwrap_or(Self::UNK)
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    /// Total size including reserved symbols.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of corpus lemmas (excluding reserved symbols).
    pub fn lemma_count(&self) -> usize {
        self.words.len() - Self::RESERVED
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> + '_ {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| (i as u32, w.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_ids_are_fixed() {
        let v = Vocabulary::from_lemmas(["b", "a", "b"]);
        assert_eq!(v.get(SENTENCE_START), Some(Vocabulary::START));
        assert_eq!(v.get(SENTENCE_END), Some(Vocabulary::END));
        assert_eq!(v.get(UNKNOWN), Some(Vocabulary::UNK));
        assert_eq!(v.word(3), "a");
        assert_eq!(v.word(4), "b");
        assert_eq!(v.lemma_count(), 2);
        assert_eq!(v.id("zzz"), Vocabulary::UNK);
    }
}

//! Tokenization, vocabulary construction and bag-of-words featurization.
//!
//! Queries, utterances and class names all pass through the same path:
//! lowercase, split on non-alphanumeric characters, count the tokens that
//! survived the stop-word list and made it into the vocabulary. The
//! vocabulary fixes the input dimension of the network, so construction is
//! fully deterministic: most frequent tokens first, ties broken
//! lexicographically.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Lowercase a text and split it on every non-alphanumeric character.
///
/// Total function: empty input or input made of separators gives an empty
/// sequence. Token order follows the input.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Word-to-index map over the `max_size` most frequent non-stop-word tokens
/// of a corpus. Indices are a bijection onto `0..size()`, ordered by
/// descending frequency then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index_of: HashMap<String, usize>,
    words: Vec<String>,
    stop_words: HashSet<String>,
}

impl Vocabulary {
    /// Build a vocabulary from a corpus of texts.
    ///
    /// Errors with [`Error::EmptyCorpus`] when no texts are given and
    /// [`Error::EmptyVocabulary`] when every token is a stop word (a
    /// vocabulary of size 0 is never valid).
    pub fn build<S: AsRef<str>>(
        corpus: &[S],
        stop_words: &HashSet<String>,
        max_size: usize,
    ) -> Result<Vocabulary> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if max_size == 0 {
            return Err(Error::InvalidConfig("max_size must be positive".into()));
        }
        let mut counts: HashMap<String, u64> = HashMap::new();
        for text in corpus {
            for token in tokenize(text.as_ref()) {
                if !stop_words.contains(&token) {
                    *counts.entry(token).or_insert(0) += 1;
                }
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(max_size);

        let words: Vec<String> = ranked.into_iter().map(|(w, _)| w).collect();
        let index_of = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Vocabulary {
            index_of,
            words,
            stop_words: stop_words.clone(),
        })
    }

    /// Number of words; the input dimension of the network.
    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Index of `word`, if it is in the vocabulary.
    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index_of.get(word).copied()
    }

    /// Word stored at `index`.
    pub fn word_at(&self, index: usize) -> Option<&str> {
        self.words.get(index).map(String::as_str)
    }

    pub fn stop_words(&self) -> &HashSet<String> {
        &self.stop_words
    }

    /// Count the in-vocabulary tokens of `text`.
    ///
    /// Unknown tokens (including stop words, which are never in the map) are
    /// dropped silently; all-unknown text gives an empty vector.
    pub fn featurize(&self, text: &str) -> BowVector {
        let mut counts = BTreeMap::new();
        for token in tokenize(text) {
            if let Some(&i) = self.index_of.get(&token) {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        BowVector {
            dim: self.size(),
            counts,
        }
    }

    /// Serialize to the vocabulary file format: a `V=<size>` header followed
    /// by one `word<TAB>index` line per word, in index order.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "V={}", self.size());
        for (i, w) in self.words.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", w, i);
        }
        out
    }

    /// Parse the format written by [`Vocabulary::to_file_string`]. The
    /// `origin` string names the source in error messages. Round trip is
    /// byte-exact: `to_file_string(from_file_string(s)) == s` for any valid
    /// `s`. Stop words live in a separate file and default to empty here.
    pub fn from_file_string(content: &str, origin: &str) -> Result<Vocabulary> {
        let mut lines = content.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::MalformedLine {
            path: origin.into(),
            line: 1,
            message: "missing V=<size> header".into(),
        })?;
        let size: usize = header
            .strip_prefix("V=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedLine {
                path: origin.into(),
                line: 1,
                message: format!("bad header {:?}, expected V=<size>", header),
            })?;
        let mut words = vec![None; size];
        for (lineno, line) in lines {
            let (word, index) = line.split_once('\t').ok_or_else(|| Error::MalformedLine {
                path: origin.into(),
                line: lineno + 1,
                message: "expected word<TAB>index".into(),
            })?;
            let index: usize = index.parse().map_err(|_| Error::MalformedLine {
                path: origin.into(),
                line: lineno + 1,
                message: format!("bad index {:?}", index),
            })?;
            if index >= size || words[index].is_some() {
                return Err(Error::MalformedLine {
                    path: origin.into(),
                    line: lineno + 1,
                    message: format!("index {} out of range or duplicated", index),
                });
            }
            words[index] = Some(word.to_owned());
        }
        let words: Vec<String> = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::BadModelFile(format!("{}: index {} missing", origin, i)))
            })
            .collect::<Result<_>>()?;
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let index_of = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Vocabulary {
            index_of,
            words,
            stop_words: HashSet::new(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Vocabulary> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_file_string(&content, &path.display().to_string())
    }

    /// Attach a stop-word set to a loaded vocabulary. Stop words never occur
    /// in the map, so this does not change featurization; it is kept for
    /// introspection and for rebuilding.
    pub fn with_stop_words(mut self, stop_words: HashSet<String>) -> Vocabulary {
        self.stop_words = stop_words;
        self
    }
}

/// Read a stop-word file: one word per line, blank lines ignored.
pub fn load_stop_words(path: &Path) -> Result<HashSet<String>> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

/// Sparse bag-of-words vector: index -> count over a fixed dimension.
///
/// Stored entries always have count >= 1; the empty map is the featurization
/// of all-unknown text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BowVector {
    dim: usize,
    counts: BTreeMap<usize, u32>,
}

impl BowVector {
    /// Build from explicit entries. Indices must be < `dim`; zero counts are
    /// dropped.
    pub fn from_counts(dim: usize, entries: impl IntoIterator<Item = (usize, u32)>) -> BowVector {
        let counts = entries
            .into_iter()
            .filter(|&(i, c)| {
                assert!(i < dim, "bow index {} out of dimension {}", i, dim);
                c > 0
            })
            .collect();
        BowVector { dim, counts }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, index: usize) -> u32 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    /// Entrywise sum of two vectors of the same dimension.
    pub fn add(&self, other: &BowVector) -> BowVector {
        assert_eq!(self.dim, other.dim, "dimension mismatch in BowVector::add");
        let mut counts = self.counts.clone();
        for (i, c) in other.iter() {
            *counts.entry(i).or_insert(0) += c;
        }
        BowVector {
            dim: self.dim,
            counts,
        }
    }

    /// Dense representation with counts as floats.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for (i, c) in self.iter() {
            v[i] = c as f64;
        }
        v
    }
}

//! Corpus ingestion, filtering, splitting, and the seeded synthetic
//! generator.
//!
//! Two wire formats, both TSV: click-log records (`query<TAB>url`) and
//! labeled utterances (`utterance<TAB>class_name`). The synthetic generator
//! produces both corpora from disjoint per-class word pools plus a shared
//! noise pool, and emits metadata sufficient to compute the exact
//! Bayes-optimal error of the generated task.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Vocabulary;

/// One click-log record: a query and the URL that was clicked for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QclRecord {
    pub query: String,
    pub url: String,
}

/// One labeled utterance for the supervised classification task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledUtterance {
    pub utterance: String,
    pub class_name: String,
}

/// Dense URL labeling: URLs indexed by first appearance in the record
/// sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlIndex {
    urls: Vec<String>,
    index_of: HashMap<String, usize>,
}

impl UrlIndex {
    pub fn from_records(records: &[QclRecord]) -> UrlIndex {
        let mut urls = Vec::new();
        let mut index_of = HashMap::new();
        for r in records {
            if !index_of.contains_key(&r.url) {
                index_of.insert(r.url.clone(), urls.len());
                urls.push(r.url.clone());
            }
        }
        UrlIndex { urls, index_of }
    }

    pub fn len(&self) -> usize {
        self.urls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.urls.is_empty()
    }

    pub fn index_of(&self, url: &str) -> Option<usize> {
        self.index_of.get(url).copied()
    }

    pub fn url_at(&self, index: usize) -> Option<&str> {
        self.urls.get(index).map(String::as_str)
    }

    /// URLs in index order.
    pub fn urls(&self) -> &[String] {
        &self.urls
    }
}

pub(crate) fn parse_tsv_line(line: &str, path: &str, lineno: usize) -> Result<(String, String)> {
    let mut fields = line.split('\t');
    let a = fields.next().unwrap_or("").trim();
    let b = fields.next().unwrap_or("").trim();
    if fields.next().is_some() {
        return Err(Error::MalformedLine {
            path: path.into(),
            line: lineno,
            message: "more than one TAB".into(),
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::MalformedLine {
            path: path.into(),
            line: lineno,
            message: "expected two non-empty TAB-separated fields".into(),
        });
    }
    Ok((a.to_owned(), b.to_owned()))
}

/// Parse click-log TSV content. Blank lines are skipped; any other malformed
/// line is an error naming its line number.
pub fn parse_qcl(content: &str, origin: &str) -> Result<(Vec<QclRecord>, UrlIndex)> {
    let mut records = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (query, url) = parse_tsv_line(line, origin, i + 1)?;
        records.push(QclRecord { query, url });
    }
    let index = UrlIndex::from_records(&records);
    Ok((records, index))
}

pub fn load_qcl(path: &Path) -> Result<(Vec<QclRecord>, UrlIndex)> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_qcl(&content, &path.display().to_string())
}

/// Parse labeled-utterance TSV content; same line discipline as
/// [`parse_qcl`].
pub fn parse_suc(content: &str, origin: &str) -> Result<Vec<LabeledUtterance>> {
    let mut records = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (utterance, class_name) = parse_tsv_line(line, origin, i + 1)?;
        records.push(LabeledUtterance {
            utterance,
            class_name,
        });
    }
    Ok(records)
}

pub fn load_suc(path: &Path) -> Result<Vec<LabeledUtterance>> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_suc(&content, &path.display().to_string())
}

pub fn qcl_to_string(records: &[QclRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}", r.query, r.url);
    }
    out
}

pub fn suc_to_string(records: &[LabeledUtterance]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}", r.utterance, r.class_name);
    }
    out
}

pub fn save_qcl(records: &[QclRecord], path: &Path) -> Result<()> {
    std::fs::write(path, qcl_to_string(records))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn save_suc(records: &[LabeledUtterance], path: &Path) -> Result<()> {
    std::fs::write(path, suc_to_string(records))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Keep only records whose URL is among the `k` most frequent, ties broken
/// lexicographically. Order of surviving records is preserved.
pub fn restrict_top_urls(records: &[QclRecord], k: usize) -> Vec<QclRecord> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for r in records {
        *counts.entry(r.url.as_str()).or_insert(0) += 1;
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    let keep: std::collections::HashSet<&str> = ranked.into_iter().map(|(u, _)| u).collect();
    records
        .iter()
        .filter(|r| keep.contains(r.url.as_str()))
        .cloned()
        .collect()
}

/// Drop records whose query contains no in-vocabulary word. Order-preserving.
pub fn filter_unknown_queries(records: &[QclRecord], vocab: &Vocabulary) -> Vec<QclRecord> {
    records
        .iter()
        .filter(|r| !vocab.featurize(&r.query).is_empty())
        .cloned()
        .collect()
}

/// Same filter over labeled utterances.
pub fn filter_unknown_utterances(
    records: &[LabeledUtterance],
    vocab: &Vocabulary,
) -> Vec<LabeledUtterance> {
    records
        .iter()
        .filter(|r| !vocab.featurize(&r.utterance).is_empty())
        .cloned()
        .collect()
}

/// Partition `records` into `fractions.len()` disjoint, exhaustive slices
/// after a seeded shuffle. Slice `j` ends at `floor(n * cumulative_j)`, so
/// part sizes follow the fractions to within one record.
pub fn split<T: Clone>(records: &[T], fractions: &[f64], seed: u64) -> Result<Vec<Vec<T>>> {
    let sum: f64 = fractions.iter().sum();
    if fractions.is_empty() || fractions.iter().any(|&f| !(0.0..=1.0).contains(&f)) {
        return Err(Error::BadFractions(sum));
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadFractions(sum));
    }
    let mut shuffled: Vec<T> = records.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let n = shuffled.len();
    let mut parts = Vec::with_capacity(fractions.len());
    let mut cumulative = 0.0;
    let mut start = 0;
    for (j, &f) in fractions.iter().enumerate() {
        cumulative += f;
        let end = if j + 1 == fractions.len() {
            n
        } else {
            (n as f64 * cumulative).floor() as usize
        };
        parts.push(shuffled[start..end.max(start)].to_vec());
        start = end.max(start);
    }
    Ok(parts)
}

/// Parameters of the synthetic task generator.
///
/// Each class owns a disjoint word pool and a disjoint URL set; a shared
/// pool models cross-class vocabulary. Class names are drawn from the
/// class's own pool, which is what makes the names semantically anchored to
/// their classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub words_per_class: usize,
    pub shared_words: usize,
    pub urls_per_class: usize,
    pub queries_per_class: usize,
    /// Labeled utterances generated per class, on top of the click-log
    /// queries.
    pub utterances_per_class: usize,
    pub class_name_tokens: usize,
    /// Per-word probability of drawing from the shared pool instead of the
    /// class pool.
    pub noise_rate: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::TooFewClasses(self.num_classes));
        }
        if self.words_per_class == 0 || self.urls_per_class == 0 || self.queries_per_class == 0 {
            return Err(Error::InvalidConfig(
                "words_per_class, urls_per_class and queries_per_class must be positive".into(),
            ));
        }
        if self.class_name_tokens == 0
            || self.class_name_tokens > self.words_per_class
            || self.class_name_tokens > MAX_QUERY_WORDS
        {
            return Err(Error::InvalidConfig(format!(
                "class_name_tokens must be in 1..={}",
                self.words_per_class.min(MAX_QUERY_WORDS)
            )));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::InvalidConfig(format!(
                "noise_rate {} outside [0, 1)",
                self.noise_rate
            )));
        }
        if self.noise_rate > 0.0 && self.shared_words == 0 {
            return Err(Error::InvalidConfig(
                "noise_rate > 0 requires a non-empty shared pool".into(),
            ));
        }
        Ok(())
    }
}

const MIN_QUERY_WORDS: usize = 3;
const MAX_QUERY_WORDS: usize = 8;

/// Ground truth of a generated task: everything needed to recover the
/// generative model, and hence its exact Bayes error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMeta {
    pub spec: SyntheticSpec,
    pub class_names: Vec<String>,
    pub word_pools: Vec<Vec<String>>,
    pub shared_pool: Vec<String>,
    pub url_to_class: BTreeMap<String, usize>,
}

impl SyntheticMeta {
    /// Exact Bayes-optimal error of the task. A query identifies its class
    /// unless every word came from the shared pool, in which case all
    /// classes are equally likely and the best decision is wrong with
    /// probability (M-1)/M.
    pub fn bayes_error(&self) -> f64 {
        let m = self.spec.num_classes as f64;
        let lengths = (MAX_QUERY_WORDS - MIN_QUERY_WORDS + 1) as f64;
        let all_shared: f64 = (MIN_QUERY_WORDS..=MAX_QUERY_WORDS)
            .map(|len| self.spec.noise_rate.powi(len as i32))
            .sum::<f64>()
            / lengths;
        all_shared * (m - 1.0) / m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }

    pub fn from_json(content: &str) -> Result<SyntheticMeta> {
        serde_json::from_str(content).map_err(|e| Error::BadModelFile(format!("metadata: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<SyntheticMeta> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&content)
    }
}

/// A generated task: click-log corpus, labeled utterances, ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub qcl: Vec<QclRecord>,
    pub suc: Vec<LabeledUtterance>,
    pub meta: SyntheticMeta,
}

fn sample_words(
    rng: &mut ChaCha8Rng,
    pool: &[String],
    shared: &[String],
    noise_rate: f64,
) -> String {
    let len = rng.random_range(MIN_QUERY_WORDS..=MAX_QUERY_WORDS);
    let mut words = Vec::with_capacity(len);
    for _ in 0..len {
        let from_shared = noise_rate > 0.0 && rng.random_bool(noise_rate);
        let source = if from_shared { shared } else { pool };
        words.push(source[rng.random_range(0..source.len())].as_str());
    }
    words.join(" ")
}

/// Generate a complete synthetic task, fully determined by `spec.seed`.
///
/// Word pools are `c<i>w<j>`, the shared pool is `sw<j>`, URLs are
/// `class<i>-site<j>.example`. The first query of each class spells out the
/// class name (padded to the minimum length), so every name token is
/// guaranteed to occur in the click-log corpus.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let word_pools: Vec<Vec<String>> = (0..spec.num_classes)
        .map(|i| (0..spec.words_per_class).map(|j| format!("c{i}w{j}")).collect())
        .collect();
    let shared_pool: Vec<String> = (0..spec.shared_words).map(|j| format!("sw{j}")).collect();
    let urls: Vec<Vec<String>> = (0..spec.num_classes)
        .map(|i| {
            (0..spec.urls_per_class)
                .map(|j| format!("class{i}-site{j}.example"))
                .collect()
        })
        .collect();
    let mut url_to_class = BTreeMap::new();
    for (i, class_urls) in urls.iter().enumerate() {
        for u in class_urls {
            url_to_class.insert(u.clone(), i);
        }
    }

    let class_names: Vec<String> = word_pools
        .iter()
        .map(|pool| {
            let idx = rand::seq::index::sample(&mut rng, pool.len(), spec.class_name_tokens);
            idx.iter().map(|k| pool[k].as_str()).collect::<Vec<_>>().join(" ")
        })
        .collect();

    let mut qcl = Vec::with_capacity(spec.num_classes * spec.queries_per_class);
    for i in 0..spec.num_classes {
        let pool = &word_pools[i];
        let class_urls = &urls[i];
        for q in 0..spec.queries_per_class {
            let query = if q == 0 {
                let mut tokens: Vec<&str> =
                    class_names[i].split(' ').collect();
                let mut fill = 0;
                while tokens.len() < MIN_QUERY_WORDS {
                    tokens.push(tokens[fill]);
                    fill += 1;
                }
                tokens.join(" ")
            } else {
                sample_words(&mut rng, pool, &shared_pool, spec.noise_rate)
            };
            let url = class_urls[rng.random_range(0..class_urls.len())].clone();
            qcl.push(QclRecord { query, url });
        }
    }

    let mut suc = Vec::with_capacity(spec.num_classes * spec.utterances_per_class);
    for i in 0..spec.num_classes {
        let pool = &word_pools[i];
        for _ in 0..spec.utterances_per_class {
            let utterance = sample_words(&mut rng, pool, &shared_pool, spec.noise_rate);
            suc.push(LabeledUtterance {
                utterance,
                class_name: class_names[i].clone(),
            });
        }
    }

    Ok(SyntheticData {
        qcl,
        suc,
        meta: SyntheticMeta {
            spec: spec.clone(),
            class_names,
            word_pools,
            shared_pool,
            url_to_class,
        },
    })
}

//! Ranking and classification metrics, embedding export, and the
//! supervised baselines the zero-shot pipeline is compared against.
//!
//! The headline metric is the area under the precision-recall curve,
//! computed per class one-vs-rest with the class posterior as the score.
//! The implementation sweeps thresholds at every distinct score with ties
//! grouped into a single step and sums precision times recall increments
//! (step interpolation); that exact procedure is cheap to re-derive by
//! brute force, so tests pin it with an enumeration oracle rather than
//! approximate bounds.
//!
//! The supervised baseline throughout is the zero-hidden-layer network,
//! which is multinomial logistic regression: a linear decision boundary,
//! trained by the same loop as everything else.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::LabeledUtterance;
use crate::error::{Error, Result};
use crate::net::{self, Features, NetworkParams, TrainConfig};
use crate::text::BowVector;
use crate::zsl::{zsl_posterior, ClassSet, KnowledgeBase, Metric};

/// Scores paired with binary relevance labels, validated for ranking
/// metrics: equal lengths, finite scores, both label values present.
#[derive(Debug, Clone)]
pub struct RankedScores {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl RankedScores {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<RankedScores> {
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: scores.len(),
            });
        }
        if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite score {bad}")));
        }
        if !labels.iter().any(|&l| l) || !labels.iter().any(|&l| !l) {
            return Err(Error::DegenerateLabels);
        }
        Ok(RankedScores { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

/// Area under the precision-recall curve, in [0, 1].
///
/// Thresholds sweep the distinct scores in descending order; a tie group
/// enters as one step. Each step contributes precision × Δrecall, with
/// precision and recall computed from the cumulative integer counts, so
/// the result is bit-identical to brute-force threshold enumeration and
/// invariant under any strictly increasing transform of the scores.
pub fn auc_pr(ranked: &RankedScores) -> f64 {
    let n = ranked.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ranked.scores[b].total_cmp(&ranked.scores[a]));
    let positives = ranked.labels.iter().filter(|&&l| l).count();

    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && ranked.scores[order[j]] == ranked.scores[order[i]] {
            j += 1;
        }
        for &k in &order[i..j] {
            if ranked.labels[k] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / positives as f64;
        area += precision * (recall - prev_recall);
        prev_recall = recall;
        i = j;
    }
    area
}

/// Fraction of mismatched predictions; symmetric in its arguments.
pub fn error_rate(predictions: &[usize], truth: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if predictions.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predictions.len(),
        });
    }
    let wrong = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p != t)
        .count();
    Ok(wrong as f64 / predictions.len() as f64)
}

/// Argmax with ties resolved to the lowest index.
pub fn argmax_class(posterior: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in posterior.iter().enumerate() {
        if p > posterior[best] {
            best = i;
        }
    }
    best
}

/// Most probable label under the network's softmax output.
pub fn predict_label(params: &NetworkParams, x: &Features) -> Result<usize> {
    let out = net::forward(params, x, None)?.output;
    Ok(argmax_class(out.as_slice().expect("contiguous")))
}

/// The `k` candidates nearest the probe in embedding space, as
/// (candidate index, distance) in ascending distance; ties keep candidate
/// order.
pub fn nearest_neighbors<S: AsRef<str>>(
    kb: &KnowledgeBase,
    probe: &str,
    candidates: &[S],
    k: usize,
    metric: Metric,
) -> Result<Vec<(usize, f64)>> {
    if k > candidates.len() {
        return Err(Error::KTooLarge {
            k,
            n: candidates.len(),
        });
    }
    let p = kb.embed(probe);
    let mut ranked: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, metric.distance(&p, &kb.embed(c.as_ref()))))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    ranked.truncate(k);
    Ok(ranked)
}

/// One exported point: the full embedding plus provenance. Class-name rows
/// are flagged so plots can mark them (the arrow targets).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub text: String,
    pub label: Option<String>,
    pub is_class: bool,
    pub coords: Vec<f64>,
}

/// Embed each text; rows come back in input order, unflagged.
pub fn export_embedding<S: AsRef<str>>(
    kb: &KnowledgeBase,
    texts: &[S],
    labels: Option<&[String]>,
) -> Result<Vec<EmbeddingRow>> {
    if let Some(ls) = labels {
        if ls.len() != texts.len() {
            return Err(Error::DimensionMismatch {
                expected: texts.len(),
                got: ls.len(),
            });
        }
    }
    Ok(texts
        .iter()
        .enumerate()
        .map(|(i, t)| EmbeddingRow {
            text: t.as_ref().to_owned(),
            label: labels.map(|ls| ls[i].clone()),
            is_class: false,
            coords: kb.embed(t.as_ref()).to_vec(),
        })
        .collect())
}

/// The class-name points of a class set, flagged for plotting.
pub fn class_rows(classes: &ClassSet) -> Vec<EmbeddingRow> {
    classes
        .names()
        .iter()
        .zip(classes.embeddings())
        .map(|(name, e)| EmbeddingRow {
            text: name.clone(),
            label: Some(name.clone()),
            is_class: true,
            coords: e.to_vec(),
        })
        .collect()
}

/// CSV with header `text,label,is_class,e0..e{d-1}`; floats at 17
/// significant digits so the round trip is lossless.
pub fn embedding_to_csv(rows: &[EmbeddingRow]) -> String {
    let dim = rows.first().map_or(0, |r| r.coords.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["text".to_owned(), "label".to_owned(), "is_class".to_owned()];
    header.extend((0..dim).map(|i| format!("e{i}")));
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        let mut record = vec![
            row.text.clone(),
            row.label.clone().unwrap_or_default(),
            if row.is_class { "true" } else { "false" }.to_owned(),
        ];
        record.extend(row.coords.iter().map(|v| format!("{v:.16e}")));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Inverse of [`embedding_to_csv`]. An empty label field reads back as
/// no label.
pub fn parse_embedding_csv(content: &str, origin: &str) -> Result<Vec<EmbeddingRow>> {
    let malformed = |line: usize, message: String| Error::MalformedLine {
        path: origin.into(),
        line,
        message,
    };
    let mut reader = csv::Reader::from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.len() < 3 || &headers[0] != "text" || &headers[1] != "label" || &headers[2] != "is_class"
    {
        return Err(malformed(1, "expected header text,label,is_class,e0..".into()));
    }
    let dim = headers.len() - 3;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let lineno = i + 2;
        let record = record.map_err(|e| malformed(lineno, e.to_string()))?;
        if record.len() != dim + 3 {
            return Err(malformed(lineno, format!("expected {} fields", dim + 3)));
        }
        let is_class = match &record[2] {
            "true" => true,
            "false" => false,
            other => return Err(malformed(lineno, format!("bad is_class {other:?}"))),
        };
        let coords = record
            .iter()
            .skip(3)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| malformed(lineno, format!("bad float {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(EmbeddingRow {
            text: record[0].to_owned(),
            label: if record[1].is_empty() {
                None
            } else {
                Some(record[1].to_owned())
            },
            is_class,
            coords,
        });
    }
    Ok(rows)
}

pub fn save_embedding_csv(rows: &[EmbeddingRow], path: &Path) -> Result<()> {
    std::fs::write(path, embedding_to_csv(rows))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Densified bag-of-words concatenated with an auxiliary vector; the
/// augmented-feature representation for supervised baselines.
pub fn augment_features(x_bow: &BowVector, h: &[f64]) -> Vec<f64> {
    let mut out = x_bow.to_dense();
    out.extend_from_slice(h);
    out
}

/// Multinomial logistic regression: the zero-hidden-layer network trained
/// on dense feature vectors.
pub fn train_linear_classifier(
    features: &[Vec<f64>],
    labels: &[usize],
    num_classes: usize,
    cfg: &TrainConfig,
) -> Result<NetworkParams> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: features.len(),
        });
    }
    let examples: Vec<(Features, usize)> = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| (Features::from_dense(x), y))
        .collect();
    Ok(net::train(&examples, num_classes, &[], cfg, None)?.params)
}

/// One-vs-rest AUC-PR per class; `scores[j][i]` scores class `i` on
/// example `j`. A class missing from `truth` (or covering all of it) has
/// no curve and is an error.
pub fn per_class_auc(scores: &[Vec<f64>], truth: &[usize], num_classes: usize) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if scores.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: scores.len(),
        });
    }
    (0..num_classes)
        .map(|class| {
            let s: Vec<f64> = scores.iter().map(|row| row[class]).collect();
            let l: Vec<bool> = truth.iter().map(|&t| t == class).collect();
            Ok(auc_pr(&RankedScores::new(s, l)?))
        })
        .collect()
}

/// Unweighted mean of [`per_class_auc`].
pub fn macro_auc(scores: &[Vec<f64>], truth: &[usize], num_classes: usize) -> Result<f64> {
    let per_class = per_class_auc(scores, truth, num_classes)?;
    Ok(per_class.iter().sum::<f64>() / per_class.len() as f64)
}

fn class_indices(labeled: &[LabeledUtterance], classes: &ClassSet) -> Result<Vec<usize>> {
    labeled
        .iter()
        .map(|u| {
            classes
                .index_of(&u.class_name)
                .ok_or_else(|| Error::UnknownClass(u.class_name.clone()))
        })
        .collect()
}

/// Zero-shot posterior rows for a labeled test set, paired with the truth
/// indices; the common precursor to AUC and error-rate reporting.
pub fn zsl_scores(
    kb: &KnowledgeBase,
    classes: &ClassSet,
    metric: Metric,
    test: &[LabeledUtterance],
) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    if test.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let truth = class_indices(test, classes)?;
    let scores = test
        .iter()
        .map(|u| Ok(zsl_posterior(kb, &u.utterance, classes, metric)?.probabilities().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok((scores, truth))
}

/// Supervised-vs-zero-shot AUC as the number of labels grows. The
/// zero-shot value uses no labels, so it is a single constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub sizes: Vec<usize>,
    pub supervised_auc: Vec<f64>,
    pub zsl_auc: f64,
}

/// For each size, train the linear baseline on a deterministic subsample
/// of the pool (bag-of-words features) and evaluate macro AUC on the fixed
/// test set; nested subsamples, so larger sizes strictly extend smaller
/// ones.
pub fn learning_curve(
    train_pool: &[LabeledUtterance],
    test: &[LabeledUtterance],
    kb: &KnowledgeBase,
    classes: &ClassSet,
    metric: Metric,
    sizes: &[usize],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<LearningCurve> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    if sizes.is_empty() {
        return Err(Error::InvalidConfig("no curve sizes".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "curve sizes must be strictly increasing".into(),
        ));
    }
    if sizes[0] == 0 {
        return Err(Error::InvalidConfig("curve size 0".into()));
    }
    let largest = *sizes.last().expect("nonempty");
    if largest > train_pool.len() {
        return Err(Error::KTooLarge {
            k: largest,
            n: train_pool.len(),
        });
    }

    let pool_truth = class_indices(train_pool, classes)?;
    let (test_scores_zsl, test_truth) = zsl_scores(kb, classes, metric, test)?;
    let zsl_auc = macro_auc(&test_scores_zsl, &test_truth, classes.len())?;

    let mut order: Vec<usize> = (0..train_pool.len()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let test_features: Vec<Features> =
        test.iter().map(|u| kb.features(&u.utterance)).collect();

    let mut supervised_auc = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let examples: Vec<(Features, usize)> = order[..size]
            .iter()
            .map(|&i| (kb.features(&train_pool[i].utterance), pool_truth[i]))
            .collect();
        let params = net::train(&examples, classes.len(), &[], cfg, None)?.params;
        let scores = test_features
            .iter()
            .map(|x| Ok(net::forward(&params, x, None)?.output.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        supervised_auc.push(macro_auc(&scores, &test_truth, classes.len())?);
    }

    Ok(LearningCurve {
        sizes: sizes.to_vec(),
        supervised_auc,
        zsl_auc,
    })
}

/// The reported quantities of an evaluation run plus enough metadata to
/// reproduce it. Serializes to JSON with stable key order (map keys
/// sorted, fields in declaration order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: Metric,
    pub model_sha256: String,
    pub dataset_sha256: String,
    pub seed: u64,
    pub per_class_auc: BTreeMap<String, f64>,
    pub error_rate: f64,
}

impl EvalReport {
    pub fn validate(&self) -> Result<()> {
        for (name, &auc) in &self.per_class_auc {
            if !(0.0..=1.0).contains(&auc) {
                return Err(Error::InvalidConfig(format!(
                    "AUC {auc} for class {name:?} outside [0, 1]"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.error_rate) {
            return Err(Error::InvalidConfig(format!(
                "error rate {} outside [0, 1]",
                self.error_rate
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(content: &str) -> Result<EvalReport> {
        serde_json::from_str(content).map_err(|e| Error::BadModelFile(format!("report: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<EvalReport> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        EvalReport::from_json(&content)
    }
}

/// Evaluate the zero-shot classifier on a labeled test set: per-class AUC
/// and argmax error rate in one pass.
pub fn zsl_report(
    kb: &KnowledgeBase,
    classes: &ClassSet,
    metric: Metric,
    test: &[LabeledUtterance],
    model_sha256: String,
    dataset_sha256: String,
    seed: u64,
) -> Result<EvalReport> {
    let (scores, truth) = zsl_scores(kb, classes, metric, test)?;
    let per_class = per_class_auc(&scores, &truth, classes.len())?;
    let predictions: Vec<usize> = scores.iter().map(|row| argmax_class(row)).collect();
    let report = EvalReport {
        metric,
        model_sha256,
        dataset_sha256,
        seed,
        per_class_auc: classes
            .names()
            .iter()
            .cloned()
            .zip(per_class)
            .collect(),
        error_rate: error_rate(&predictions, &truth)?,
    };
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::init_params;
    use crate::text::Vocabulary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn ranked(scores: &[f64], labels: &[u8]) -> RankedScores {
        RankedScores::new(scores.to_vec(), labels.iter().map(|&l| l == 1).collect()).unwrap()
    }

    /// Enumerates every distinct threshold directly from the definition.
    /// Same counting arithmetic as the implementation, so equality is exact.
    fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        let positives = labels.iter().filter(|&&l| l).count();
        let mut area = 0.0;
        let mut prev_recall = 0.0;
        for &t in &thresholds {
            let tp = scores
                .iter()
                .zip(labels)
                .filter(|(&s, &l)| s >= t && l)
                .count();
            let selected = scores.iter().filter(|&&s| s >= t).count();
            let precision = tp as f64 / selected as f64;
            let recall = tp as f64 / positives as f64;
            area += precision * (recall - prev_recall);
            prev_recall = recall;
        }
        area
    }

    #[test]
    fn auc_is_one_for_perfect_rankings() {
        assert_eq!(auc_pr(&ranked(&[0.9, 0.8, 0.1], &[1, 1, 0])), 1.0);
        assert_eq!(auc_pr(&ranked(&[0.9, 0.4, 0.8], &[1, 0, 0])), 1.0);
    }

    #[test]
    fn auc_matches_hand_derived_value_with_top_negative() {
        // Thresholds 0.9, 0.8, 0.7: precision 0, 1/2, 2/3 at recall
        // 0, 1/2, 1. Area = 1/2·1/2 + 2/3·1/2 = 7/12.
        let r = ranked(&[0.9, 0.8, 0.7], &[0, 1, 1]);
        let auc = auc_pr(&r);
        assert!((auc - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(auc, brute_force_auc(r.scores(), r.labels()));
    }

    #[test]
    fn auc_equals_brute_force_enumeration_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut cases = 0;
        while cases < 300 {
            let n = rng.random_range(2..=10);
            // Scores from a coarse grid so tie groups actually occur.
            let scores: Vec<f64> =
                (0..n).map(|_| rng.random_range(0..5) as f64 / 4.0).collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            if !labels.iter().any(|&l| l) || !labels.iter().any(|&l| !l) {
                continue;
            }
            let auc = auc_pr(&RankedScores::new(scores.clone(), labels.clone()).unwrap());
            assert_eq!(auc, brute_force_auc(&scores, &labels), "case {cases}");
            assert!((0.0..=1.0).contains(&auc));
            cases += 1;
        }
    }

    #[test]
    fn auc_groups_tied_scores_into_one_step() {
        // All scores equal: a single step with precision = base rate.
        let auc = auc_pr(&ranked(&[0.5, 0.5, 0.5, 0.5], &[1, 0, 1, 0]));
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn ranked_scores_rejects_degenerate_inputs() {
        assert!(matches!(
            RankedScores::new(vec![1.0, 2.0], vec![true, true]),
            Err(Error::DegenerateLabels)
        ));
        assert!(matches!(
            RankedScores::new(vec![1.0], vec![true, false]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(RankedScores::new(vec![f64::NAN, 1.0], vec![true, false]).is_err());
    }

    #[test]
    fn error_rate_counts_mismatches() {
        assert_eq!(error_rate(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(error_rate(&[1, 2], &[2, 1]).unwrap(), 1.0);
        assert_eq!(error_rate(&[0, 1, 1, 1], &[0, 1, 1, 2]).unwrap(), 0.25);
        assert!(error_rate(&[], &[]).is_err());
        assert!(error_rate(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn error_rate_is_symmetric() {
        let a = [0, 1, 2, 0, 1];
        let b = [1, 1, 2, 0, 0];
        assert_eq!(error_rate(&a, &b).unwrap(), error_rate(&b, &a).unwrap());
    }

    fn toy_kb() -> KnowledgeBase {
        let corpus = [
            "good movie night",
            "watch movie now",
            "movie ticket deal",
            "cheap hotel room",
            "book hotel tonight",
            "hotel room deal",
        ];
        let vocab = Vocabulary::build(&corpus, &HashSet::new(), 100).unwrap();
        let records: Vec<crate::data::QclRecord> = corpus
            .iter()
            .enumerate()
            .map(|(i, q)| crate::data::QclRecord {
                query: (*q).to_owned(),
                url: if i < 3 { "films.example" } else { "rooms.example" }.to_owned(),
            })
            .collect();
        let index = crate::data::UrlIndex::from_records(&records);
        let cfg = TrainConfig {
            epochs: 40,
            batch_size: 3,
            learning_rate: 0.5,
            ..Default::default()
        };
        let outcome = net::train_qcl(&records, &index, &vocab, &[4], &cfg, None).unwrap();
        KnowledgeBase::new(outcome.params, vocab, false).unwrap()
    }

    #[test]
    fn nearest_neighbors_ranks_the_probe_itself_first() {
        let kb = toy_kb();
        let candidates = ["cheap hotel room", "good movie night", "hotel room deal"];
        let nn = nearest_neighbors(&kb, "good movie night", &candidates, 3, Metric::Euclidean)
            .unwrap();
        assert_eq!(nn[0].0, 1);
        assert_eq!(nn[0].1, 0.0);
        assert_eq!(nn.len(), 3);
        assert!(nn[1].1 <= nn[2].1);
    }

    #[test]
    fn nearest_neighbors_keeps_candidate_order_on_ties() {
        // Zero parameters embed everything at the origin; every distance
        // ties, so ranking must be candidate order.
        let vocab = Vocabulary::build(&["a b c"], &HashSet::new(), 10).unwrap();
        let params = NetworkParams::new(vec![
            crate::net::LayerParams::zeros(2, vocab.size()),
            crate::net::LayerParams::zeros(2, 2),
        ])
        .unwrap();
        let kb = KnowledgeBase::new(params, vocab, false).unwrap();
        let nn = nearest_neighbors(&kb, "a", &["b", "c", "a"], 3, Metric::Euclidean).unwrap();
        assert_eq!(nn.iter().map(|&(i, _)| i).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn nearest_neighbors_rejects_oversized_k() {
        let kb = toy_kb();
        assert!(matches!(
            nearest_neighbors(&kb, "movie", &["a", "b"], 3, Metric::Euclidean),
            Err(Error::KTooLarge { k: 3, n: 2 })
        ));
    }

    #[test]
    fn export_rows_follow_input_order_and_shape() {
        let kb = toy_kb();
        let texts = ["good movie", "cheap hotel", "movie deal"];
        let labels = vec!["films".to_owned(), "rooms".to_owned(), "films".to_owned()];
        let rows = export_embedding(&kb, &texts, Some(&labels)).unwrap();
        assert_eq!(rows.len(), 3);
        for (row, text) in rows.iter().zip(&texts) {
            assert_eq!(row.text, *text);
            assert_eq!(row.coords.len(), kb.embed_dim());
            assert!(!row.is_class);
        }
        assert_eq!(rows[1].label.as_deref(), Some("rooms"));
        assert!(export_embedding(&kb, &texts, Some(&labels[..2].to_vec())).is_err());
    }

    #[test]
    fn class_rows_are_flagged() {
        let kb = toy_kb();
        let classes =
            ClassSet::from_knowledge_base(&kb, &["movie".into(), "hotel".into()]).unwrap();
        let rows = class_rows(&classes);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.is_class));
        assert_eq!(rows[0].text, "movie");
        assert_eq!(rows[0].coords, classes.embeddings()[0].to_vec());
    }

    #[test]
    fn embedding_csv_round_trips_losslessly() {
        let rows = vec![
            EmbeddingRow {
                text: "has, comma".into(),
                label: Some("films".into()),
                is_class: false,
                coords: vec![1.0 / 3.0, -2.5e-300, 0.0],
            },
            EmbeddingRow {
                text: "movie".into(),
                label: None,
                is_class: true,
                coords: vec![std::f64::consts::PI, 1e300, -0.0],
            },
        ];
        let csv = embedding_to_csv(&rows);
        assert!(csv.starts_with("text,label,is_class,e0,e1,e2\n"));
        let back = parse_embedding_csv(&csv, "test").unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in back.iter().zip(&rows) {
            assert_eq!(a.text, b.text);
            assert_eq!(a.label, b.label);
            assert_eq!(a.is_class, b.is_class);
            for (x, y) in a.coords.iter().zip(&b.coords) {
                assert_eq!(x.to_bits(), y.to_bits(), "coord changed in round trip");
            }
        }
    }

    #[test]
    fn embedding_csv_rejects_malformed_rows() {
        assert!(parse_embedding_csv("wrong,header,here\n", "t").is_err());
        let bad_flag = "text,label,is_class,e0\nq,,maybe,1.0\n";
        assert!(matches!(
            parse_embedding_csv(bad_flag, "t"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
        let bad_float = "text,label,is_class,e0\nq,,false,xyz\n";
        assert!(parse_embedding_csv(bad_float, "t").is_err());
    }

    #[test]
    fn augment_concatenates_dense_bow_with_vector() {
        let mut counts = std::collections::BTreeMap::new();
        counts.insert(0usize, 2u32);
        let bow = BowVector::from_counts(3, counts);
        assert_eq!(augment_features(&bow, &[0.5]), vec![2.0, 0.0, 0.0, 0.5]);
        let empty = BowVector::from_counts(2, std::collections::BTreeMap::new());
        assert_eq!(augment_features(&empty, &[0.7, 0.1]), vec![0.0, 0.0, 0.7, 0.1]);
        assert_eq!(augment_features(&bow, &[]), vec![2.0, 0.0, 0.0]);
    }

    fn separable_set() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            features.push(vec![1.0 + t, 0.0]);
            labels.push(0);
            features.push(vec![0.0, 1.0 + t]);
            labels.push(1);
        }
        (features, labels)
    }

    #[test]
    fn linear_classifier_fits_a_separable_set() {
        let (features, labels) = separable_set();
        let cfg = TrainConfig {
            epochs: 60,
            learning_rate: 0.5,
            batch_size: 4,
            ..Default::default()
        };
        let params = train_linear_classifier(&features, &labels, 2, &cfg).unwrap();
        let predictions: Vec<usize> = features
            .iter()
            .map(|x| predict_label(&params, &Features::from_dense(x)).unwrap())
            .collect();
        assert_eq!(error_rate(&predictions, &labels).unwrap(), 0.0);
    }

    #[test]
    fn linear_classifier_is_deterministic_under_seed() {
        let (features, labels) = separable_set();
        let cfg = TrainConfig {
            epochs: 5,
            ..Default::default()
        };
        let a = train_linear_classifier(&features, &labels, 2, &cfg).unwrap();
        let b = train_linear_classifier(&features, &labels, 2, &cfg).unwrap();
        assert_eq!(a.flatten(), b.flatten());
    }

    #[test]
    fn conflicting_duplicates_bound_the_error_rate() {
        // Same point under both labels: at least half of these 4 examples
        // must be misclassified whatever the model does.
        let features = vec![vec![1.0, 1.0]; 4];
        let labels = vec![0, 1, 0, 1];
        let cfg = TrainConfig {
            epochs: 50,
            ..Default::default()
        };
        let params = train_linear_classifier(&features, &labels, 2, &cfg).unwrap();
        let predictions: Vec<usize> = features
            .iter()
            .map(|x| predict_label(&params, &Features::from_dense(x)).unwrap())
            .collect();
        assert!(error_rate(&predictions, &labels).unwrap() >= 0.5);
    }

    #[test]
    fn per_class_auc_is_one_for_separable_scores() {
        let scores = vec![
            vec![0.9, 0.1],
            vec![0.8, 0.2],
            vec![0.2, 0.8],
            vec![0.1, 0.9],
        ];
        let truth = vec![0, 0, 1, 1];
        assert_eq!(per_class_auc(&scores, &truth, 2).unwrap(), vec![1.0, 1.0]);
        assert_eq!(macro_auc(&scores, &truth, 2).unwrap(), 1.0);
    }

    #[test]
    fn per_class_auc_requires_every_class_present() {
        let scores = vec![vec![0.9, 0.1], vec![0.8, 0.2]];
        assert!(matches!(
            per_class_auc(&scores, &[0, 0], 2),
            Err(Error::DegenerateLabels)
        ));
    }

    fn labeled(pairs: &[(&str, &str)]) -> Vec<LabeledUtterance> {
        pairs
            .iter()
            .map(|(u, c)| LabeledUtterance {
                utterance: (*u).to_owned(),
                class_name: (*c).to_owned(),
            })
            .collect()
    }

    #[test]
    fn learning_curve_is_deterministic_and_flat_in_zsl() {
        let kb = toy_kb();
        let classes =
            ClassSet::from_knowledge_base(&kb, &["movie".into(), "hotel".into()]).unwrap();
        let pool = labeled(&[
            ("good movie", "movie"),
            ("cheap hotel", "hotel"),
            ("movie night", "movie"),
            ("hotel deal", "hotel"),
            ("watch movie now", "movie"),
            ("book hotel room", "hotel"),
        ]);
        let test = labeled(&[
            ("movie ticket", "movie"),
            ("movie deal", "movie"),
            ("hotel tonight", "hotel"),
            ("room deal", "hotel"),
        ]);
        let cfg = TrainConfig {
            epochs: 10,
            batch_size: 2,
            ..Default::default()
        };
        let a = learning_curve(&pool, &test, &kb, &classes, Metric::Euclidean, &[2, 6], &cfg, 5)
            .unwrap();
        let b = learning_curve(&pool, &test, &kb, &classes, Metric::Euclidean, &[2, 6], &cfg, 5)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sizes, vec![2, 6]);
        assert_eq!(a.supervised_auc.len(), 2);
        assert!(a.zsl_auc >= 0.0 && a.zsl_auc <= 1.0);
    }

    #[test]
    fn learning_curve_validates_sizes() {
        let kb = toy_kb();
        let classes =
            ClassSet::from_knowledge_base(&kb, &["movie".into(), "hotel".into()]).unwrap();
        let pool = labeled(&[("good movie", "movie"), ("cheap hotel", "hotel")]);
        let test = labeled(&[("movie deal", "movie"), ("room deal", "hotel")]);
        let cfg = TrainConfig::default();
        let go = |sizes: &[usize]| {
            learning_curve(&pool, &test, &kb, &classes, Metric::Euclidean, sizes, &cfg, 0)
        };
        assert!(go(&[]).is_err());
        assert!(go(&[2, 2]).is_err());
        assert!(go(&[0, 1]).is_err());
        assert!(matches!(go(&[1, 5]), Err(Error::KTooLarge { k: 5, n: 2 })));
    }

    #[test]
    fn report_round_trips_with_stable_key_order() {
        let mut per_class_auc = BTreeMap::new();
        per_class_auc.insert("hotel".to_owned(), 0.9);
        per_class_auc.insert("movie".to_owned(), 0.8);
        let report = EvalReport {
            metric: Metric::Euclidean,
            model_sha256: "ab".into(),
            dataset_sha256: "cd".into(),
            seed: 7,
            per_class_auc,
            error_rate: 0.125,
        };
        report.validate().unwrap();
        let json = report.to_json();
        assert_eq!(json, EvalReport::from_json(&json).unwrap().to_json());
        assert!(json.find("\"hotel\"").unwrap() < json.find("\"movie\"").unwrap());
        assert!(json.contains("\"euclidean\""));

        let mut bad = report.clone();
        bad.error_rate = 1.5;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zsl_report_on_the_toy_model_is_coherent() {
        let kb = toy_kb();
        let classes =
            ClassSet::from_knowledge_base(&kb, &["movie".into(), "hotel".into()]).unwrap();
        let test = labeled(&[
            ("good movie night", "movie"),
            ("movie ticket deal", "movie"),
            ("cheap hotel room", "hotel"),
            ("hotel room deal", "hotel"),
        ]);
        let report = zsl_report(
            &kb,
            &classes,
            Metric::Euclidean,
            &test,
            "m".into(),
            "d".into(),
            0,
        )
        .unwrap();
        assert_eq!(report.per_class_auc.len(), 2);
        assert!(report.error_rate <= 0.5);
        assert!(report.per_class_auc.values().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn unknown_class_names_in_labeled_data_are_errors() {
        let kb = toy_kb();
        let classes =
            ClassSet::from_knowledge_base(&kb, &["movie".into(), "hotel".into()]).unwrap();
        let test = labeled(&[("good movie", "movie"), ("spa day", "spa")]);
        assert!(matches!(
            zsl_scores(&kb, &classes, Metric::Euclidean, &test),
            Err(Error::UnknownClass(name)) if name == "spa"
        ));
    }

    #[test]
    fn predict_label_breaks_ties_low() {
        let params = init_params(&[2, 3], 3).unwrap();
        let x = Features::from_dense(&[0.0, 0.0]);
        // Zero input: logits are the biases, which init sets to zero.
        assert_eq!(predict_label(&params, &x).unwrap(), 0);
        assert_eq!(argmax_class(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(argmax_class(&[0.4, 0.4, 0.2]), 0);
    }
}

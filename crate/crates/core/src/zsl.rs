//! Zero-shot classification in embedding space, and the entropy-regularized
//! training objective.
//!
//! A trained network's last hidden layer maps any text to a point in R^d.
//! Classifying an utterance against M class *names* needs no labels: embed
//! the utterance, embed each name, and take a softmax over negated
//! distances. The posterior for class i is
//!
//! ```text
//! P(C_i | x) = exp(-dist(K(x), K(C_i))) / Σ_j exp(-dist(K(x), K(C_j)))
//! ```
//!
//! The entropy of that posterior, averaged over unlabeled queries, measures
//! how much the classes overlap in embedding space; adding it to the
//! training loss (weight lambda) pushes class-name embeddings apart from
//! each other and queries toward their classes. Its gradient flows through
//! both the query embedding and every class-name embedding: the class bags
//! are re-embedded inside the differentiated graph, not treated as
//! constants. That gradient is the delicate part of this module; everything
//! else is bookkeeping around it.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::data::UrlIndex;
use crate::error::{Error, Result};
use crate::net::{self, Features, Gradients, NetworkParams};
use crate::text::{tokenize, Vocabulary};

/// Distance used inside the posterior. Euclidean is the default; cosine
/// distance (1 − cosine similarity, with cos := 0 when either vector is
/// zero) is the alternative. The choice is recorded in model and report
/// metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl Metric {
    pub fn distance(self, a: &Array1<f64>, b: &Array1<f64>) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                let na = norm(a);
                let nb = norm(b);
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - a.dot(b) / (na * nb)
                }
            }
        }
    }

    /// (∂dist/∂a, ∂dist/∂b) at the given points, with `dist` the
    /// precomputed distance. At the singular points (coincident points for
    /// euclidean, zero norm for cosine) both derivatives are defined as 0.
    fn distance_gradients(
        self,
        a: &Array1<f64>,
        b: &Array1<f64>,
        dist: f64,
    ) -> (Array1<f64>, Array1<f64>) {
        match self {
            Metric::Euclidean => {
                if dist == 0.0 {
                    return (Array1::zeros(a.len()), Array1::zeros(b.len()));
                }
                let da = (a - b) / dist;
                let db = -&da;
                (da, db)
            }
            Metric::Cosine => {
                let na = norm(a);
                let nb = norm(b);
                if na == 0.0 || nb == 0.0 {
                    return (Array1::zeros(a.len()), Array1::zeros(b.len()));
                }
                let cos = a.dot(b) / (na * nb);
                let da = a * (cos / (na * na)) - b / (na * nb);
                let db = b * (cos / (nb * nb)) - a / (na * nb);
                (da, db)
            }
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidConfig(format!(
                "unknown metric {other:?}, expected euclidean or cosine"
            ))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

/// Posterior over the class set; entries positive, sum 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct ZslPosterior(Vec<f64>);

impl ZslPosterior {
    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Most probable class; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// Shannon entropy in nats, with 0·ln 0 taken as 0. Lies in
    /// [0, ln(len)] up to rounding.
    pub fn entropy(&self) -> f64 {
        self.0
            .iter()
            .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
            .sum()
    }
}

/// Softmax over negated distances, with max-subtraction in the exponent.
pub fn posterior_from_distances(distances: &[f64]) -> ZslPosterior {
    debug_assert!(!distances.is_empty());
    let max_score = distances.iter().map(|&d| -d).fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = distances.iter().map(|&d| (-d - max_score).exp()).collect();
    let z: f64 = unnorm.iter().sum();
    ZslPosterior(unnorm.into_iter().map(|u| u / z).collect())
}

/// The semantic embedding function: a trained network's last hidden layer
/// applied to featurized text.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    params: NetworkParams,
    vocab: Vocabulary,
    binary_bow: bool,
}

impl KnowledgeBase {
    /// Requires at least one hidden layer (the 0-hidden-layer network has no
    /// latent representation to read) and a vocabulary matching the input
    /// dimension.
    pub fn new(params: NetworkParams, vocab: Vocabulary, binary_bow: bool) -> Result<KnowledgeBase> {
        if params.num_hidden() == 0 {
            return Err(Error::NoEmbeddingLayer);
        }
        if params.input_dim() != vocab.size() {
            return Err(Error::DimensionMismatch {
                expected: vocab.size(),
                got: params.input_dim(),
            });
        }
        Ok(KnowledgeBase {
            params,
            vocab,
            binary_bow,
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn binary_bow(&self) -> bool {
        self.binary_bow
    }

    pub fn embed_dim(&self) -> usize {
        self.params.embed_dim().expect("hidden layer present")
    }

    pub fn features(&self, text: &str) -> Features {
        Features::from_bow(&self.vocab.featurize(text), self.binary_bow)
    }

    /// Clean last hidden activation of the featurized text. All-unknown text
    /// embeds the zero input vector.
    pub fn embed(&self, text: &str) -> Array1<f64> {
        net::forward_hidden(&self.params, &self.features(text))
            .expect("dimensions fixed at construction")
    }
}

fn checked_name_features(vocab: &Vocabulary, name: &str, binary_bow: bool) -> Result<Features> {
    let oov = |name: &str| Error::ClassNameOutOfVocabulary {
        name: name.to_owned(),
    };
    for token in tokenize(name) {
        if vocab.index_of(&token).is_none() {
            return Err(oov(name));
        }
    }
    let bow = vocab.featurize(name);
    if bow.is_empty() {
        return Err(oov(name));
    }
    Ok(Features::from_bow(&bow, binary_bow))
}

fn check_class_names(names: &[String]) -> Result<()> {
    if names.len() < 2 {
        return Err(Error::TooFewClasses(names.len()));
    }
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::InvalidConfig(format!("duplicate class name {name:?}")));
        }
    }
    Ok(())
}

/// Ordered class names paired with their embeddings; the classification
/// target space. Row i is the embedding of names[i] in whatever space the
/// set was built in (latent, bag, or label-posterior).
#[derive(Debug, Clone)]
pub struct ClassSet {
    names: Vec<String>,
    embeddings: Vec<Array1<f64>>,
}

impl ClassSet {
    /// Embed class names through the knowledge base. A name containing any
    /// out-of-vocabulary token is a hard error: a silently zeroed class
    /// embedding corrupts every posterior that includes it.
    pub fn from_knowledge_base(kb: &KnowledgeBase, names: &[String]) -> Result<ClassSet> {
        check_class_names(names)?;
        let embeddings = names
            .iter()
            .map(|name| {
                let features = checked_name_features(kb.vocab(), name, kb.binary_bow())?;
                net::forward_hidden(kb.params(), &features)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassSet {
            names: names.to_vec(),
            embeddings,
        })
    }

    /// Assemble from precomputed embeddings, for pipelines that classify in
    /// bag or label-posterior space.
    pub fn from_embeddings(names: Vec<String>, embeddings: Vec<Array1<f64>>) -> Result<ClassSet> {
        check_class_names(&names)?;
        if embeddings.len() != names.len() {
            return Err(Error::InvalidConfig(format!(
                "{} names but {} embeddings",
                names.len(),
                embeddings.len()
            )));
        }
        let dim = embeddings[0].len();
        if embeddings.iter().any(|e| e.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: embeddings.iter().map(Array1::len).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        Ok(ClassSet { names, embeddings })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn embeddings(&self) -> &[Array1<f64>] {
        &self.embeddings
    }

    pub fn dim(&self) -> usize {
        self.embeddings[0].len()
    }
}

/// Eq-style zero-shot posterior of `text` against the class set.
pub fn zsl_posterior(
    kb: &KnowledgeBase,
    text: &str,
    classes: &ClassSet,
    metric: Metric,
) -> Result<ZslPosterior> {
    posterior_in_space(&kb.embed(text), classes, metric)
}

/// Posterior of an already-embedded point against the class set; the
/// classification rule shared by every feature pipeline.
pub fn posterior_in_space(
    x: &Array1<f64>,
    classes: &ClassSet,
    metric: Metric,
) -> Result<ZslPosterior> {
    if classes.len() < 2 {
        return Err(Error::TooFewClasses(classes.len()));
    }
    if x.len() != classes.dim() {
        return Err(Error::DimensionMismatch {
            expected: classes.dim(),
            got: x.len(),
        });
    }
    let distances: Vec<f64> = classes
        .embeddings()
        .iter()
        .map(|c| metric.distance(x, c))
        .collect();
    Ok(posterior_from_distances(&distances))
}

/// Argmax class of the zero-shot posterior; ties resolve to the lowest
/// index.
pub fn classify_zero_shot(
    kb: &KnowledgeBase,
    text: &str,
    classes: &ClassSet,
    metric: Metric,
) -> Result<usize> {
    Ok(zsl_posterior(kb, text, classes, metric)?.argmax())
}

/// Mean posterior entropy of a batch of texts: the class-overlap measure.
pub fn conditional_entropy<S: AsRef<str>>(
    kb: &KnowledgeBase,
    texts: &[S],
    classes: &ClassSet,
    metric: Metric,
) -> Result<f64> {
    if texts.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut total = 0.0;
    for t in texts {
        total += zsl_posterior(kb, t.as_ref(), classes, metric)?.entropy();
    }
    Ok(total / texts.len() as f64)
}

/// Everything the training loop needs for the entropy term: the weight, the
/// metric, and the class-name bags. The bags are featurized once but
/// re-embedded at every gradient step, so the term differentiates through
/// the class embeddings.
#[derive(Debug, Clone)]
pub struct ZdeContext {
    lambda: f64,
    metric: Metric,
    class_bags: Vec<Features>,
}

impl ZdeContext {
    pub fn new(lambda: f64, metric: Metric, class_bags: Vec<Features>) -> Result<ZdeContext> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda {lambda} must be non-negative and finite"
            )));
        }
        if class_bags.len() < 2 {
            return Err(Error::TooFewClasses(class_bags.len()));
        }
        let dim = class_bags[0].dim();
        if let Some(bad) = class_bags.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(ZdeContext {
            lambda,
            metric,
            class_bags,
        })
    }

    /// Featurize class names against the vocabulary; out-of-vocabulary
    /// tokens are hard errors, as in [`ClassSet::from_knowledge_base`].
    pub fn from_class_names(
        vocab: &Vocabulary,
        names: &[String],
        binary_bow: bool,
        lambda: f64,
        metric: Metric,
    ) -> Result<ZdeContext> {
        check_class_names(names)?;
        let bags = names
            .iter()
            .map(|n| checked_name_features(vocab, n, binary_bow))
            .collect::<Result<Vec<_>>>()?;
        ZdeContext::new(lambda, metric, bags)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn class_bags(&self) -> &[Features] {
        &self.class_bags
    }
}

/// Embed each class bag through the current parameters.
pub fn class_embeddings(
    params: &NetworkParams,
    class_bags: &[Features],
) -> Result<Vec<Array1<f64>>> {
    class_bags
        .iter()
        .map(|b| net::forward_hidden(params, b))
        .collect()
}

/// Mean posterior entropy over `batch` at the feature level, classes given
/// as bags and embedded on the fly.
pub fn mean_entropy<'a, I>(
    params: &NetworkParams,
    batch: I,
    class_bags: &[Features],
    metric: Metric,
) -> Result<f64>
where
    I: IntoIterator<Item = &'a Features>,
{
    if class_bags.len() < 2 {
        return Err(Error::TooFewClasses(class_bags.len()));
    }
    let embeddings = class_embeddings(params, class_bags)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for x in batch {
        let e = net::forward_hidden(params, x)?;
        let distances: Vec<f64> = embeddings.iter().map(|c| metric.distance(&e, c)).collect();
        total += posterior_from_distances(&distances).entropy();
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyBatch);
    }
    Ok(total / count as f64)
}

/// Exact gradient of [`mean_entropy`] with respect to the parameters,
/// averaged over the batch and unscaled by lambda.
///
/// Derivation: with scores a_k = −d_k and p = softmax(a), the entropy
/// S = −Σ p_i ln p_i has ∂S/∂d_k = p_k (ln p_k + S). That coefficient
/// weights the metric's distance gradients, which are pushed back through
/// the hidden stack twice per example: once at the query embedding and once
/// at each class embedding (accumulated across the batch, then
/// backpropagated once per class).
pub fn entropy_gradient<'a, I>(
    params: &NetworkParams,
    batch: I,
    class_bags: &[Features],
    metric: Metric,
) -> Result<Gradients>
where
    I: IntoIterator<Item = &'a Features>,
{
    if params.num_hidden() == 0 {
        return Err(Error::NoEmbeddingLayer);
    }
    if class_bags.len() < 2 {
        return Err(Error::TooFewClasses(class_bags.len()));
    }
    let xs: Vec<&Features> = batch.into_iter().collect();
    if xs.is_empty() {
        return Err(Error::EmptyBatch);
    }

    let bag_traces = class_bags
        .iter()
        .map(|b| net::hidden_trace(params, b, None))
        .collect::<Result<Vec<_>>>()?;
    let class_embs: Vec<&Array1<f64>> = bag_traces
        .iter()
        .map(|t| t.activations.last().expect("hidden layer present"))
        .collect();

    let mut acc = Gradients::zeros_like(params);
    let mut class_inject: Vec<Array1<f64>> =
        class_embs.iter().map(|e| Array1::zeros(e.len())).collect();

    for x in &xs {
        let trace = net::hidden_trace(params, x, None)?;
        let e = trace.activations.last().expect("hidden layer present");
        let distances: Vec<f64> = class_embs.iter().map(|c| metric.distance(e, c)).collect();
        let posterior = posterior_from_distances(&distances);
        let s = posterior.entropy();

        let mut g_e = Array1::zeros(e.len());
        for (k, &p) in posterior.probabilities().iter().enumerate() {
            let coeff = if p > 0.0 { p * (p.ln() + s) } else { 0.0 };
            if coeff == 0.0 {
                continue;
            }
            let (de, dc) = metric.distance_gradients(e, class_embs[k], distances[k]);
            g_e.scaled_add(coeff, &de);
            class_inject[k].scaled_add(coeff, &dc);
        }
        net::backprop_from_last_hidden(params, &trace, x, &g_e, &mut acc);
    }
    for (k, inject) in class_inject.iter().enumerate() {
        net::backprop_from_last_hidden(params, &bag_traces[k], &class_bags[k], inject, &mut acc);
    }
    acc.scale(1.0 / xs.len() as f64);
    Ok(acc)
}

/// Composite training loss: mean NLL plus lambda times mean posterior
/// entropy, both over the same batch. Lambda 0 reduces to the NLL exactly.
pub fn zde_loss(
    params: &NetworkParams,
    batch: &[(Features, usize)],
    ctx: &ZdeContext,
) -> Result<f64> {
    let nll = net::nll_loss(params, batch)?;
    if ctx.lambda() == 0.0 {
        return Ok(nll);
    }
    let entropy = mean_entropy(
        params,
        batch.iter().map(|(x, _)| x),
        ctx.class_bags(),
        ctx.metric(),
    )?;
    Ok(nll + ctx.lambda() * entropy)
}

/// Gradient of [`zde_loss`]; delegates to the shared backward pass.
pub fn zde_gradient(
    params: &NetworkParams,
    batch: &[(Features, usize)],
    ctx: &ZdeContext,
) -> Result<Gradients> {
    net::backward(params, batch, None, Some(ctx))
}

/// The softmax label posterior P(Y|x), used directly as a semantic feature
/// vector.
pub fn posterior_features(params: &NetworkParams, x: &Features) -> Result<Array1<f64>> {
    Ok(net::forward(params, x, None)?.output)
}

/// Class posterior obtained by renormalizing the label posterior over one
/// representative URL per class. `class_urls[i]` is the URL label index of
/// class i; indices must be distinct.
pub fn representative_url_posterior(
    params: &NetworkParams,
    x: &Features,
    class_urls: &[usize],
) -> Result<ZslPosterior> {
    if class_urls.len() < 2 {
        return Err(Error::TooFewClasses(class_urls.len()));
    }
    let output = net::forward(params, x, None)?.output;
    let mut seen = HashSet::new();
    for &u in class_urls {
        if u >= output.len() {
            return Err(Error::LabelOutOfRange {
                label: u,
                num_labels: output.len(),
            });
        }
        if !seen.insert(u) {
            return Err(Error::InvalidConfig(format!(
                "URL index {u} represents two classes"
            )));
        }
    }
    let raw: Vec<f64> = class_urls.iter().map(|&u| output[u]).collect();
    let z: f64 = raw.iter().sum();
    Ok(ZslPosterior(raw.into_iter().map(|p| p / z).collect()))
}

/// Class-set file: one class name per line, order defining the index; blank
/// lines skipped.
pub fn parse_class_names(content: &str, origin: &str) -> Result<Vec<String>> {
    let mut names = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let name = line.trim();
        if name.is_empty() {
            continue;
        }
        if !seen.insert(name.to_owned()) {
            return Err(Error::MalformedLine {
                path: origin.into(),
                line: i + 1,
                message: format!("duplicate class name {name:?}"),
            });
        }
        names.push(name.to_owned());
    }
    if names.is_empty() {
        return Err(Error::EmptyClassSet);
    }
    Ok(names)
}

pub fn load_class_names(path: &Path) -> Result<Vec<String>> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_class_names(&content, &path.display().to_string())
}

/// Representative-URL map file: `class_name<TAB>url` per line.
pub fn parse_representative_urls(content: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(crate::data::parse_tsv_line(line, origin, i + 1)?);
    }
    Ok(pairs)
}

pub fn load_representative_urls(path: &Path) -> Result<Vec<(String, String)>> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_representative_urls(&content, &path.display().to_string())
}

/// Resolve a class→URL map against the class order and the URL label index.
pub fn resolve_representative_urls(
    names: &[String],
    pairs: &[(String, String)],
    url_index: &UrlIndex,
) -> Result<Vec<usize>> {
    let map: HashMap<&str, &str> = pairs.iter().map(|(c, u)| (c.as_str(), u.as_str())).collect();
    names
        .iter()
        .map(|name| {
            let url = map
                .get(name.as_str())
                .ok_or_else(|| Error::UnknownClass(name.clone()))?;
            url_index
                .index_of(url)
                .ok_or_else(|| Error::UnknownUrl((*url).to_owned()))
        })
        .collect()
}


#[cfg(test)]
mod properties {
    use super::*;
    use ndarray::arr1;
    use proptest::prelude::*;

    fn arb_embedding(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, dim)
    }

    proptest! {
        #[test]
        fn posterior_always_normalizes(
            x in arb_embedding(3),
            cs in prop::collection::vec(arb_embedding(3), 2..6),
        ) {
            let names: Vec<String> = (0..cs.len()).map(|i| format!("class {i}")).collect();
            let classes =
                ClassSet::from_embeddings(names, cs.into_iter().map(|c| arr1(&c)).collect())
                    .unwrap();
            for metric in [Metric::Euclidean, Metric::Cosine] {
                let p = posterior_in_space(&arr1(&x), &classes, metric).unwrap();
                let sum: f64 = p.probabilities().iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn entropy_respects_bounds(distances in prop::collection::vec(0.0f64..20.0, 2..8)) {
            let p = posterior_from_distances(&distances);
            let h = p.entropy();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (distances.len() as f64).ln() + 1e-12);
        }

        #[test]
        fn translation_preserves_euclidean_posterior(
            x in arb_embedding(3),
            c0 in arb_embedding(3),
            c1 in arb_embedding(3),
            t in arb_embedding(3),
        ) {
            let shift = arr1(&t);
            let base = posterior_from_distances(&[
                Metric::Euclidean.distance(&arr1(&x), &arr1(&c0)),
                Metric::Euclidean.distance(&arr1(&x), &arr1(&c1)),
            ]);
            let moved = posterior_from_distances(&[
                Metric::Euclidean.distance(&(&arr1(&x) + &shift), &(&arr1(&c0) + &shift)),
                Metric::Euclidean.distance(&(&arr1(&x) + &shift), &(&arr1(&c1) + &shift)),
            ]);
            for (p, q) in base.probabilities().iter().zip(moved.probabilities()) {
                prop_assert!((p - q).abs() < 1e-9);
            }
        }

        #[test]
        fn shrinking_one_distance_raises_its_probability(
            distances in prop::collection::vec(0.5f64..10.0, 2..6),
            k in 0usize..6,
            shrink in 0.01f64..0.4,
        ) {
            let k = k % distances.len();
            let base = posterior_from_distances(&distances);
            let mut closer = distances.clone();
            closer[k] -= shrink;
            let moved = posterior_from_distances(&closer);
            prop_assert!(moved.probabilities()[k] > base.probabilities()[k]);
        }
    }
}

//! Acceptance-side oracles and the shared synthetic fixture.
//!
//! Everything here is derived from definitions, not from the library's
//! code paths: the forward pass is recomputed with plain dense loops, the
//! ranking metric by literal threshold enumeration, the posterior by the
//! unguarded textbook formula. Agreement between these and the library is
//! the point of the acceptance suite.

use std::collections::HashSet;
use std::sync::OnceLock;
use std::time::Instant;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zsl_core::data::{self, LabeledUtterance, SyntheticData, SyntheticSpec, UrlIndex};
use zsl_core::net::{self, Features, LayerParams, NetworkParams, TrainConfig};
use zsl_core::text::Vocabulary;
use zsl_core::zsl::{KnowledgeBase, Metric, ZdeContext};

pub const FD_EPS: f64 = 1e-5;

/// Independent last-hidden forward: dense affine + ReLU loops over the
/// public parameter arrays.
pub fn reference_hidden(params: &NetworkParams, x: &Features) -> Array1<f64> {
    let mut h = x.to_dense();
    let hidden_layers = params.layers().len() - 1;
    for layer in &params.layers()[..hidden_layers] {
        let z = layer.weights.dot(&h) + &layer.bias;
        h = z.mapv(|v| if v > 0.0 { v } else { 0.0 });
    }
    h
}

/// Smallest |pre-activation| across all hidden units, the distance to the
/// nearest ReLU kink.
pub fn kink_margin(params: &NetworkParams, x: &Features) -> f64 {
    let mut h = x.to_dense();
    let mut margin = f64::INFINITY;
    let hidden_layers = params.layers().len() - 1;
    for layer in &params.layers()[..hidden_layers] {
        let z = layer.weights.dot(&h) + &layer.bias;
        for &v in z.iter() {
            margin = margin.min(v.abs());
        }
        h = z.mapv(|v| if v > 0.0 { v } else { 0.0 });
    }
    margin
}

fn coordinate<'a>(params: &'a mut NetworkParams, layer: usize, idx: usize) -> &'a mut f64 {
    let lp = &mut params.layers_mut()[layer];
    let wlen = lp.weights.len();
    if idx < wlen {
        &mut lp.weights.as_slice_mut().expect("standard layout")[idx]
    } else {
        &mut lp.bias.as_slice_mut().expect("standard layout")[idx - wlen]
    }
}

/// Central finite differences of `f` over every parameter, in the same
/// order as `Gradients::flatten` (per layer: weights row-major, then bias).
pub fn numeric_gradient<F: FnMut(&NetworkParams) -> f64>(
    params: &NetworkParams,
    mut f: F,
) -> Vec<f64> {
    let mut work = params.clone();
    let mut grad = Vec::new();
    for layer in 0..work.layers().len() {
        let slots = work.layers()[layer].weights.len() + work.layers()[layer].bias.len();
        for idx in 0..slots {
            let orig = *coordinate(&mut work, layer, idx);
            *coordinate(&mut work, layer, idx) = orig + FD_EPS;
            let plus = f(&work);
            *coordinate(&mut work, layer, idx) = orig - FD_EPS;
            let minus = f(&work);
            *coordinate(&mut work, layer, idx) = orig;
            grad.push((plus - minus) / (2.0 * FD_EPS));
        }
    }
    grad
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| {
            let scale = a.abs().max(n.abs());
            if scale < 1e-12 {
                0.0
            } else {
                (a - n).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

pub struct GradientCase {
    pub params: NetworkParams,
    pub batch: Vec<(Features, usize)>,
    pub bags: Vec<Features>,
}

/// Random network + batch + class bags, resampled until every input sits
/// far from ReLU kinks and all embeddings and example-class distances are
/// well away from the distance singularities. Finite differences are only
/// trustworthy on such cases.
pub fn gradient_case(seed: u64, chain: &[usize], batch_len: usize, num_classes: usize) -> GradientCase {
    'attempt: for attempt in 0..5000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 5003 + attempt);
        let mut layers = Vec::new();
        for pair in chain.windows(2) {
            let mut lp = LayerParams::zeros(pair[1], pair[0]);
            for w in lp.weights.iter_mut() {
                *w = rng.random_range(-1.0..1.0);
            }
            for b in lp.bias.iter_mut() {
                *b = rng.random_range(-0.5..0.5);
            }
            layers.push(lp);
        }
        let params = NetworkParams::new(layers).unwrap();
        let input_dim = chain[0];
        let out_dim = *chain.last().unwrap();
        let dense = |rng: &mut ChaCha8Rng| {
            let x: Vec<f64> = (0..input_dim).map(|_| rng.random_range(0.5..2.0)).collect();
            Features::from_dense(&x)
        };
        let batch: Vec<(Features, usize)> = (0..batch_len)
            .map(|_| {
                let x = dense(&mut rng);
                (x, rng.random_range(0..out_dim))
            })
            .collect();
        let bags: Vec<Features> = (0..num_classes).map(|_| dense(&mut rng)).collect();

        for x in batch.iter().map(|(x, _)| x).chain(bags.iter()) {
            if kink_margin(&params, x) < 1e-3 {
                continue 'attempt;
            }
        }
        let embs: Vec<Array1<f64>> =
            bags.iter().map(|b| reference_hidden(&params, b)).collect();
        let exs: Vec<Array1<f64>> = batch
            .iter()
            .map(|(x, _)| reference_hidden(&params, x))
            .collect();
        for e in embs.iter().chain(exs.iter()) {
            if e.dot(e).sqrt() < 0.05 {
                continue 'attempt;
            }
        }
        for e in &exs {
            for c in &embs {
                let diff = e - c;
                if diff.dot(&diff).sqrt() < 0.05 {
                    continue 'attempt;
                }
            }
        }
        return GradientCase { params, batch, bags };
    }
    panic!("no well-conditioned gradient case for seed {seed}");
}

/// Textbook distance softmax with no max-subtraction guard.
pub fn naive_distance_softmax(x: &Array1<f64>, classes: &[Array1<f64>]) -> Vec<f64> {
    let weights: Vec<f64> = classes
        .iter()
        .map(|c| {
            let diff = x - c;
            (-diff.dot(&diff).sqrt()).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Literal threshold enumeration of the precision-recall area: every
/// distinct score is a threshold, precision and recall counted from
/// scratch at each.
pub fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut thresholds = scores.to_vec();
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

/// The synthetic task all qualitative criteria share: one corpus, one
/// vocabulary, one matched pair of trainings (entropy term off and on).
/// Built once; several minutes of work live behind this.
pub struct Fixture {
    pub data: SyntheticData,
    pub vocab: Vocabulary,
    pub url_index: UrlIndex,
    pub class_names: Vec<String>,
    pub train_suc: Vec<LabeledUtterance>,
    pub test_suc: Vec<LabeledUtterance>,
    pub plain: NetworkParams,
    pub zde: NetworkParams,
    pub cfg: TrainConfig,
    pub lambda: f64,
    pub build_secs: f64,
}

impl Fixture {
    pub fn plain_kb(&self) -> KnowledgeBase {
        KnowledgeBase::new(self.plain.clone(), self.vocab.clone(), self.cfg.binary_bow).unwrap()
    }

    pub fn zde_kb(&self) -> KnowledgeBase {
        KnowledgeBase::new(self.zde.clone(), self.vocab.clone(), self.cfg.binary_bow).unwrap()
    }

    pub fn qcl_examples(&self) -> Vec<(Features, usize)> {
        self.data
            .qcl
            .iter()
            .map(|r| {
                (
                    Features::from_bow(&self.vocab.featurize(&r.query), self.cfg.binary_bow),
                    self.url_index.index_of(&r.url).unwrap(),
                )
            })
            .collect()
    }

    pub fn class_bags(&self) -> Vec<Features> {
        self.class_names
            .iter()
            .map(|n| Features::from_bow(&self.vocab.featurize(n), self.cfg.binary_bow))
            .collect()
    }
}

pub fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let start = Instant::now();
        let spec = SyntheticSpec {
            num_classes: 5,
            words_per_class: 40,
            shared_words: 25,
            urls_per_class: 12,
            queries_per_class: 2000,
            utterances_per_class: 400,
            class_name_tokens: 2,
            noise_rate: 0.2,
            seed: 20240817,
        };
        let data = data::generate_synthetic(&spec).unwrap();
        let corpus: Vec<&str> = data.qcl.iter().map(|r| r.query.as_str()).collect();
        let vocab = Vocabulary::build(&corpus, &HashSet::new(), 5000).unwrap();
        let url_index = UrlIndex::from_records(&data.qcl);
        let class_names = data.meta.class_names.clone();

        let hidden = vec![64, 32];
        let cfg = TrainConfig {
            learning_rate: 0.1,
            batch_size: 32,
            epochs: 30,
            dropout_rate: 0.0,
            seed: 7,
            lambda: 0.0,
            binary_bow: false,
        };
        let plain = net::train_qcl(&data.qcl, &url_index, &vocab, &hidden, &cfg, None)
            .unwrap()
            .params;

        let lambda = 0.01;
        let ctx =
            ZdeContext::from_class_names(&vocab, &class_names, cfg.binary_bow, lambda, Metric::Euclidean)
                .unwrap();
        let zde_cfg = TrainConfig {
            lambda,
            ..cfg.clone()
        };
        let zde = net::train_qcl(&data.qcl, &url_index, &vocab, &hidden, &zde_cfg, Some(&ctx))
            .unwrap()
            .params;

        let mut parts = data::split(&data.suc, &[0.5, 0.5], 99).unwrap();
        let test_suc = parts.pop().unwrap();
        let train_suc = parts.pop().unwrap();

        Fixture {
            data,
            vocab,
            url_index,
            class_names,
            train_suc,
            test_suc,
            plain,
            zde,
            cfg,
            lambda,
            build_secs: start.elapsed().as_secs_f64(),
        }
    })
}

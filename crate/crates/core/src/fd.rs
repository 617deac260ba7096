//! Finite-difference oracles shared by the gradient unit tests.
//!
//! Central differences are trustworthy only away from the rectifier kink and
//! away from coincident embeddings, so test cases are produced by rejection
//! sampling against explicit margins rather than by hoping.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::net::{self, Features, Gradients, LayerParams, NetworkParams};
use crate::zsl::Metric;

pub(crate) const EPS: f64 = 1e-5;
pub(crate) const MAX_REL: f64 = 1e-4;

/// Central-difference gradient of `f` at `params`, coordinate order matching
/// [`NetworkParams::flatten`].
pub(crate) fn numeric_gradient<F: FnMut(&NetworkParams) -> f64>(
    params: &NetworkParams,
    mut f: F,
) -> Vec<f64> {
    let count = params.flatten().len();
    let mut grad = Vec::with_capacity(count);
    for k in 0..count {
        let mut plus = params.clone();
        perturb(&mut plus, k, EPS);
        let mut minus = params.clone();
        perturb(&mut minus, k, -EPS);
        grad.push((f(&plus) - f(&minus)) / (2.0 * EPS));
    }
    grad
}

fn perturb(params: &mut NetworkParams, coordinate: usize, delta: f64) {
    let mut k = coordinate;
    for layer in params.layers_mut() {
        if k < layer.weights.len() {
            *layer.weights.iter_mut().nth(k).expect("in range") += delta;
            return;
        }
        k -= layer.weights.len();
        if k < layer.bias.len() {
            layer.bias[k] += delta;
            return;
        }
        k -= layer.bias.len();
    }
    panic!("coordinate {coordinate} out of range");
}

/// |a − b| / max(|a|, |b|), treating both-tiny as equal.
pub(crate) fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub(crate) fn max_relative_error(analytic: &Gradients, numeric: &[f64]) -> f64 {
    let a = analytic.flatten();
    assert_eq!(a.len(), numeric.len());
    a.iter()
        .zip(numeric)
        .map(|(&x, &y)| relative_error(x, y))
        .fold(0.0, f64::max)
}

fn random_params(rng: &mut ChaCha8Rng, sizes: &[usize]) -> NetworkParams {
    let layers = sizes
        .windows(2)
        .map(|pair| {
            let (in_dim, out_dim) = (pair[0], pair[1]);
            let data: Vec<f64> = (0..out_dim * in_dim)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let mut layer = LayerParams::zeros(out_dim, in_dim);
            layer.weights =
                ndarray::Array2::from_shape_vec((out_dim, in_dim), data).expect("shape matches");
            for b in layer.bias.iter_mut() {
                *b = rng.random_range(-0.5..0.5);
            }
            layer
        })
        .collect();
    NetworkParams::new(layers).expect("valid chain")
}

fn random_batch(rng: &mut ChaCha8Rng, input_dim: usize, num_labels: usize, len: usize) -> Vec<(Features, usize)> {
    (0..len)
        .map(|_| {
            let dense: Vec<f64> = (0..input_dim).map(|_| rng.random_range(0.5..2.0)).collect();
            (Features::from_dense(&dense), rng.random_range(0..num_labels))
        })
        .collect()
}

fn kink_margin(params: &NetworkParams, x: &Features) -> f64 {
    let trace = net::forward(params, x, None).expect("dimensions match");
    trace
        .hidden
        .pre_activations
        .iter()
        .flat_map(|z| z.iter())
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min)
}

/// Random small net plus batch whose hidden pre-activations all sit at least
/// 1e-3 from the rectifier kink, so central differences with [`EPS`] stay on
/// one side.
pub(crate) fn kink_safe_case(
    seed: u64,
    sizes: &[usize],
    batch_len: usize,
) -> (NetworkParams, Vec<(Features, usize)>) {
    let num_labels = *sizes.last().expect("non-empty sizes");
    for attempt in 0..1000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1009).wrapping_add(attempt));
        let params = random_params(&mut rng, sizes);
        let batch = random_batch(&mut rng, sizes[0], num_labels, batch_len);
        if batch.iter().all(|(x, _)| kink_margin(&params, x) >= 1e-3) {
            return (params, batch);
        }
    }
    panic!("no kink-safe case found for seed {seed}");
}

/// As [`kink_safe_case`], with class bags whose embeddings additionally keep
/// every example-to-class distance and every embedding norm at least 0.05
/// away from the singular points of the distance derivatives.
pub(crate) fn kink_safe_zde_case(
    seed: u64,
    sizes: &[usize],
    batch_len: usize,
    num_classes: usize,
    metric: Metric,
) -> (NetworkParams, Vec<(Features, usize)>, Vec<Features>) {
    let num_labels = *sizes.last().expect("non-empty sizes");
    'attempts: for attempt in 0..2000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(2003).wrapping_add(attempt));
        let params = random_params(&mut rng, sizes);
        let batch = random_batch(&mut rng, sizes[0], num_labels, batch_len);
        let bags: Vec<Features> = (0..num_classes)
            .map(|_| {
                let dense: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(0.5..2.0)).collect();
                Features::from_dense(&dense)
            })
            .collect();

        for x in batch.iter().map(|(x, _)| x).chain(bags.iter()) {
            if kink_margin(&params, x) < 1e-3 {
                continue 'attempts;
            }
        }
        let embed = |f: &Features| net::forward_hidden(&params, f).expect("hidden layer present");
        let class_embs: Vec<Array1<f64>> = bags.iter().map(&embed).collect();
        let norm = |v: &Array1<f64>| v.dot(v).sqrt();
        if class_embs.iter().any(|c| norm(c) < 0.05) {
            continue 'attempts;
        }
        for (x, _) in &batch {
            let e = embed(x);
            if norm(&e) < 0.05 {
                continue 'attempts;
            }
            for c in &class_embs {
                if Metric::Euclidean.distance(&e, c) < 0.05 {
                    continue 'attempts;
                }
                if metric == Metric::Cosine && metric.distance(&e, c) < 0.01 {
                    continue 'attempts;
                }
            }
        }
        return (params, batch, bags);
    }
    panic!("no kink-safe entropy case found for seed {seed}");
}

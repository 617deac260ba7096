//! Feedforward networks: rectified-linear hidden layers, softmax output,
//! exact backpropagation, inverted dropout, minibatch SGD.
//!
//! One gradient path serves both objectives: `backward` computes the
//! likelihood part from the (possibly masked) forward trace and, when an
//! entropy context is supplied, adds the zero-shot layer's entropy gradient
//! scaled by lambda. The entropy term always sees the clean forward pass;
//! only the likelihood sees dropout.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{QclRecord, UrlIndex};
use crate::error::{Error, Result};
use crate::text::{BowVector, Vocabulary};
use crate::zsl::ZdeContext;

/// Sparse real-valued input vector with a fixed dimension.
///
/// Bags of words enter the first layer through their non-zero entries only;
/// dense evaluation features pass through the same type, so the degenerate
/// 0-hidden-layer network doubles as a linear classifier over any feature
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl Features {
    /// Bag-of-words input; `binary` collapses counts to 0/1 indicators.
    pub fn from_bow(bow: &BowVector, binary: bool) -> Features {
        Features {
            dim: bow.dim(),
            entries: bow
                .iter()
                .map(|(i, c)| (i, if binary { 1.0 } else { f64::from(c) }))
                .collect(),
        }
    }

    pub fn from_dense(values: &[f64]) -> Features {
        Features {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-zero entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn to_dense(&self) -> Array1<f64> {
        let mut v = Array1::zeros(self.dim);
        for (i, x) in self.iter() {
            v[i] = x;
        }
        v
    }
}

/// One affine layer: `weights` is out_dim × in_dim.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl LayerParams {
    pub fn zeros(out_dim: usize, in_dim: usize) -> LayerParams {
        LayerParams {
            weights: Array2::zeros((out_dim, in_dim)),
            bias: Array1::zeros(out_dim),
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }
}

/// Full parameter set: n rectified hidden layers followed by one softmax
/// output layer. n = 0 is multinomial logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    layers: Vec<LayerParams>,
}

impl NetworkParams {
    pub fn new(layers: Vec<LayerParams>) -> Result<NetworkParams> {
        if layers.is_empty() {
            return Err(Error::BadLayerSizes(Vec::new()));
        }
        let bad_dims = layers
            .iter()
            .any(|l| l.out_dim() == 0 || l.in_dim() == 0 || l.bias.len() != l.out_dim());
        let broken_chain = layers.windows(2).any(|p| p[1].in_dim() != p[0].out_dim());
        if bad_dims || broken_chain {
            return Err(Error::BadLayerSizes(sizes_of(&layers)));
        }
        Ok(NetworkParams { layers })
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn num_hidden(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("at least one layer").out_dim()
    }

    /// Width of the last hidden layer; `None` for the 0-hidden-layer net.
    pub fn embed_dim(&self) -> Option<usize> {
        self.num_hidden()
            .checked_sub(1)
            .map(|k| self.layers[k].out_dim())
    }

    /// `[input, hidden..., output]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        sizes_of(&self.layers)
    }

    /// All coordinates in a fixed order: per layer, weights row-major, then
    /// bias. Shared with [`Gradients::flatten`].
    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

fn sizes_of(layers: &[LayerParams]) -> Vec<usize> {
    let mut sizes = vec![layers[0].in_dim()];
    sizes.extend(layers.iter().map(LayerParams::out_dim));
    sizes
}

fn flatten_layers(layers: &[LayerParams]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.weights.iter().copied());
        out.extend(l.bias.iter().copied());
    }
    out
}

/// Uniform initialization in [−s, s) with s = sqrt(6 / (fan_in + fan_out));
/// biases zero; fully determined by `seed`.
pub fn init_params(layer_sizes: &[usize], seed: u64) -> Result<NetworkParams> {
    if layer_sizes.len() < 2 || layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::BadLayerSizes(layer_sizes.to_vec()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(layer_sizes.len() - 1);
    for pair in layer_sizes.windows(2) {
        let (in_dim, out_dim) = (pair[0], pair[1]);
        let s = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let data: Vec<f64> = (0..out_dim * in_dim)
            .map(|_| rng.random_range(-s..s))
            .collect();
        let weights = Array2::from_shape_vec((out_dim, in_dim), data).expect("shape matches");
        layers.push(LayerParams {
            weights,
            bias: Array1::zeros(out_dim),
        });
    }
    NetworkParams::new(layers)
}

/// Per-example record of the hidden stack: pre-activations z, derivative
/// gates, and activations h = gate ⊙ z.
///
/// A gate is 0 where the rectifier clipped (z ≤ 0; the derivative at exactly
/// 0 is defined as 0) and the dropout keep-scale elsewhere (1 without
/// dropout), so the same trace drives both forward values and backward
/// derivatives, and the rate-0 path is numerically identical to the clean
/// path.
#[derive(Debug, Clone)]
pub struct HiddenTrace {
    pub pre_activations: Vec<Array1<f64>>,
    pub gates: Vec<Array1<f64>>,
    pub activations: Vec<Array1<f64>>,
}

/// Hidden trace plus the softmax output layer.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub hidden: HiddenTrace,
    pub logits: Array1<f64>,
    /// Softmax of `logits`; sums to 1 within 1e-9 for finite parameters.
    pub output: Array1<f64>,
}

fn affine_sparse(layer: &LayerParams, x: &Features) -> Array1<f64> {
    let mut z = layer.bias.clone();
    for (i, v) in x.iter() {
        let col = layer.weights.column(i);
        for (zr, &w) in z.iter_mut().zip(col.iter()) {
            *zr += v * w;
        }
    }
    z
}

fn affine_dense(layer: &LayerParams, h: &Array1<f64>) -> Array1<f64> {
    layer.weights.dot(h) + &layer.bias
}

pub(crate) fn hidden_trace(
    params: &NetworkParams,
    x: &Features,
    masks: Option<&[Array1<f64>]>,
) -> Result<HiddenTrace> {
    if x.dim() != params.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.input_dim(),
            got: x.dim(),
        });
    }
    let n = params.num_hidden();
    debug_assert!(masks.is_none_or(|m| m.len() == n));
    let mut pre = Vec::with_capacity(n);
    let mut gates = Vec::with_capacity(n);
    let mut acts: Vec<Array1<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let layer = &params.layers[k];
        let z = if k == 0 {
            affine_sparse(layer, x)
        } else {
            affine_dense(layer, &acts[k - 1])
        };
        let gate = Array1::from_shape_fn(z.len(), |j| {
            if z[j] > 0.0 {
                masks.map_or(1.0, |m| m[k][j])
            } else {
                0.0
            }
        });
        let h = &gate * &z;
        pre.push(z);
        gates.push(gate);
        acts.push(h);
    }
    Ok(HiddenTrace {
        pre_activations: pre,
        gates,
        activations: acts,
    })
}

fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = logits.mapv(|z| (z - m).exp());
    let total = p.sum();
    p.mapv_inplace(|e| e / total);
    p
}

/// Run the network on one example.
///
/// `masks` supplies per-hidden-layer dropout gates during training; `None`
/// is the clean inference path.
pub fn forward(
    params: &NetworkParams,
    x: &Features,
    masks: Option<&[Array1<f64>]>,
) -> Result<ForwardTrace> {
    let hidden = hidden_trace(params, x, masks)?;
    let out_layer = params.layers.last().expect("at least one layer");
    let logits = match hidden.activations.last() {
        Some(h) => affine_dense(out_layer, h),
        None => affine_sparse(out_layer, x),
    };
    let output = softmax(&logits);
    Ok(ForwardTrace {
        hidden,
        logits,
        output,
    })
}

/// Clean (no dropout) last hidden activation: the latent representation of
/// `x`. Errors on a 0-hidden-layer network, which has none.
pub fn forward_hidden(params: &NetworkParams, x: &Features) -> Result<Array1<f64>> {
    if params.num_hidden() == 0 {
        return Err(Error::NoEmbeddingLayer);
    }
    let trace = hidden_trace(params, x, None)?;
    Ok(trace.activations.into_iter().next_back().expect("n >= 1"))
}

fn example_nll(logits: &Array1<f64>, label: usize) -> Result<f64> {
    if label >= logits.len() {
        return Err(Error::LabelOutOfRange {
            label,
            num_labels: logits.len(),
        });
    }
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.mapv(|z| (z - m).exp()).sum().ln();
    Ok(lse - logits[label])
}

/// Mean negative log-likelihood of the batch on the clean forward pass,
/// computed via log-sum-exp so it is finite for finite parameters.
pub fn nll_loss(params: &NetworkParams, batch: &[(Features, usize)]) -> Result<f64> {
    nll_loss_with_masks(params, batch, None)
}

/// [`nll_loss`] under fixed dropout masks; the training-time loss whose
/// gradient [`backward`] computes.
pub fn nll_loss_with_masks(
    params: &NetworkParams,
    batch: &[(Features, usize)],
    masks: Option<&BatchMasks>,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut total = 0.0;
    for (i, (x, y)) in batch.iter().enumerate() {
        let trace = forward(params, x, masks.map(|m| m.example(i)))?;
        total += example_nll(&trace.logits, *y)?;
    }
    Ok(total / batch.len() as f64)
}

/// Gradient accumulator congruent to [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerParams>,
}

impl Gradients {
    pub fn zeros_like(params: &NetworkParams) -> Gradients {
        Gradients {
            layers: params
                .layers
                .iter()
                .map(|l| LayerParams::zeros(l.out_dim(), l.in_dim()))
                .collect(),
        }
    }

    /// self += alpha · other, coordinatewise.
    pub fn axpy(&mut self, alpha: f64, other: &Gradients) {
        assert_eq!(self.layers.len(), other.layers.len(), "incongruent gradients");
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.scaled_add(alpha, &b.weights);
            a.bias.scaled_add(alpha, &b.bias);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights.mapv_inplace(|w| w * factor);
            l.bias.mapv_inplace(|b| b * factor);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.flatten().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same coordinate order as [`NetworkParams::flatten`].
    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

fn acc_outer_dense(grad: &mut LayerParams, delta: &Array1<f64>, h_prev: &Array1<f64>) {
    for (r, &d) in delta.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let mut row = grad.weights.row_mut(r);
        for (c, &h) in h_prev.iter().enumerate() {
            row[c] += d * h;
        }
    }
    grad.bias.scaled_add(1.0, delta);
}

fn acc_outer_sparse(grad: &mut LayerParams, delta: &Array1<f64>, x: &Features) {
    for (r, &d) in delta.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let mut row = grad.weights.row_mut(r);
        for (i, v) in x.iter() {
            row[i] += d * v;
        }
    }
    grad.bias.scaled_add(1.0, delta);
}

/// Accumulate through hidden layers `top, top-1, …, 0`, where `delta` is the
/// already-gated error of hidden layer `top`.
fn backprop_hidden_chain(
    params: &NetworkParams,
    trace: &HiddenTrace,
    x: &Features,
    mut delta: Array1<f64>,
    top: usize,
    acc: &mut Gradients,
) {
    let mut k = top;
    loop {
        if k == 0 {
            acc_outer_sparse(&mut acc.layers[0], &delta, x);
            return;
        }
        acc_outer_dense(&mut acc.layers[k], &delta, &trace.activations[k - 1]);
        delta = params.layers[k].weights.t().dot(&delta) * &trace.gates[k - 1];
        k -= 1;
    }
}

fn backprop_from_output(
    params: &NetworkParams,
    trace: &ForwardTrace,
    x: &Features,
    delta_out: Array1<f64>,
    acc: &mut Gradients,
) {
    let n = params.num_hidden();
    match trace.hidden.activations.last() {
        Some(h) => acc_outer_dense(&mut acc.layers[n], &delta_out, h),
        None => acc_outer_sparse(&mut acc.layers[n], &delta_out, x),
    }
    if n > 0 {
        let delta = params.layers[n].weights.t().dot(&delta_out) * &trace.hidden.gates[n - 1];
        backprop_hidden_chain(params, &trace.hidden, x, delta, n - 1, acc);
    }
}

/// Entry point for objectives defined on the last hidden activation: `g` is
/// d objective / d hⁿ for one example. Contributions accumulate into `acc`
/// unscaled; the caller owns batch averaging.
pub(crate) fn backprop_from_last_hidden(
    params: &NetworkParams,
    trace: &HiddenTrace,
    x: &Features,
    g: &Array1<f64>,
    acc: &mut Gradients,
) {
    let n = trace.activations.len();
    debug_assert!(n >= 1, "no hidden layer to backpropagate from");
    let delta = g * &trace.gates[n - 1];
    backprop_hidden_chain(params, trace, x, delta, n - 1, acc);
}

/// Exact gradient of the training objective at `params`, averaged over the
/// batch: mean NLL under the supplied dropout masks, plus lambda times the
/// mean posterior-entropy term when a [`ZdeContext`] with lambda > 0 is
/// given. The two terms combine by a single axpy, so the lambda > 0 result
/// is bit-for-bit `backward(λ=0) + λ · entropy_gradient`.
pub fn backward(
    params: &NetworkParams,
    batch: &[(Features, usize)],
    masks: Option<&BatchMasks>,
    zde: Option<&ZdeContext>,
) -> Result<Gradients> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut acc = Gradients::zeros_like(params);
    for (i, (x, y)) in batch.iter().enumerate() {
        let trace = forward(params, x, masks.map(|m| m.example(i)))?;
        if *y >= trace.output.len() {
            return Err(Error::LabelOutOfRange {
                label: *y,
                num_labels: trace.output.len(),
            });
        }
        let mut delta = trace.output.clone();
        delta[*y] -= 1.0;
        backprop_from_output(params, &trace, x, delta, &mut acc);
    }
    acc.scale(1.0 / batch.len() as f64);
    if let Some(ctx) = zde {
        if ctx.lambda() > 0.0 {
            let entropy_grad = crate::zsl::entropy_gradient(
                params,
                batch.iter().map(|(x, _)| x),
                ctx.class_bags(),
                ctx.metric(),
            )?;
            acc.axpy(ctx.lambda(), &entropy_grad);
        }
    }
    Ok(acc)
}

/// θ ← θ − η · grad, every coordinate.
pub fn sgd_step(params: &mut NetworkParams, grads: &Gradients, learning_rate: f64) {
    assert_eq!(params.layers.len(), grads.layers.len(), "incongruent gradients");
    for (p, g) in params.layers.iter_mut().zip(&grads.layers) {
        p.weights.scaled_add(-learning_rate, &g.weights);
        p.bias.scaled_add(-learning_rate, &g.bias);
    }
}

/// Pre-sampled inverted-dropout masks for one minibatch: per example and
/// hidden layer, each unit is 0 with probability `rate` and 1/(1−rate)
/// otherwise. Fixing the masks up front keeps forward and backward passes of
/// one step consistent and makes the training loss a deterministic function
/// of the parameters.
#[derive(Debug, Clone)]
pub struct BatchMasks {
    per_example: Vec<Vec<Array1<f64>>>,
}

impl BatchMasks {
    pub fn sample(
        rng: &mut impl Rng,
        hidden_sizes: &[usize],
        batch_len: usize,
        rate: f64,
    ) -> BatchMasks {
        assert!((0.0..1.0).contains(&rate), "dropout rate outside [0, 1)");
        let scale = 1.0 / (1.0 - rate);
        let per_example = (0..batch_len)
            .map(|_| {
                hidden_sizes
                    .iter()
                    .map(|&h| {
                        let mask: Vec<f64> = (0..h)
                            .map(|_| if rng.random_bool(rate) { 0.0 } else { scale })
                            .collect();
                        Array1::from_vec(mask)
                    })
                    .collect()
            })
            .collect();
        BatchMasks { per_example }
    }

    pub fn example(&self, i: usize) -> &[Array1<f64>] {
        &self.per_example[i]
    }

    pub fn len(&self) -> usize {
        self.per_example.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_example.is_empty()
    }
}

/// Training hyper-parameters.
///
/// `lambda` weights the posterior-entropy term (0 disables it); `binary_bow`
/// collapses input counts to indicators. Both travel with the model file so
/// inference reconstructs the same featurization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub dropout_rate: f64,
    pub seed: u64,
    pub lambda: f64,
    pub binary_bow: bool,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            learning_rate: 0.1,
            batch_size: 32,
            epochs: 30,
            dropout_rate: 0.0,
            seed: 0,
            lambda: 0.0,
            binary_bow: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate {} must be positive and finite",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout_rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda {} must be non-negative and finite",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// One row of the training log. Epoch 0 is the state at initialization;
/// `entropy` is present iff the entropy term is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub nll: f64,
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: NetworkParams,
    pub log: Vec<EpochMetrics>,
}

fn epoch_metrics(
    epoch: usize,
    params: &NetworkParams,
    examples: &[(Features, usize)],
    zde: Option<&ZdeContext>,
) -> Result<EpochMetrics> {
    let nll = nll_loss(params, examples)?;
    let entropy = match zde {
        Some(ctx) if ctx.lambda() > 0.0 => Some(crate::zsl::mean_entropy(
            params,
            examples.iter().map(|(x, _)| x),
            ctx.class_bags(),
            ctx.metric(),
        )?),
        _ => None,
    };
    if !nll.is_finite() || entropy.is_some_and(|h| !h.is_finite()) {
        return Err(Error::NonFiniteLoss { epoch });
    }
    Ok(EpochMetrics { epoch, nll, entropy })
}

/// Minibatch SGD over `examples`.
///
/// Deterministic in `cfg.seed`: initialization, epoch shuffles and dropout
/// masks all derive from it. The log holds full-dataset clean-forward
/// metrics for epochs 0..=cfg.epochs; a non-finite metric aborts.
pub fn train(
    examples: &[(Features, usize)],
    num_labels: usize,
    hidden: &[usize],
    cfg: &TrainConfig,
    zde: Option<&ZdeContext>,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if num_labels < 2 {
        return Err(Error::DegenerateLabels);
    }
    let input_dim = examples[0].0.dim();
    for (x, y) in examples {
        if x.dim() != input_dim {
            return Err(Error::DimensionMismatch {
                expected: input_dim,
                got: x.dim(),
            });
        }
        if *y >= num_labels {
            return Err(Error::LabelOutOfRange {
                label: *y,
                num_labels,
            });
        }
    }
    let mut sizes = vec![input_dim];
    sizes.extend_from_slice(hidden);
    sizes.push(num_labels);
    let mut params = init_params(&sizes, cfg.seed)?;

    let mut log = Vec::with_capacity(cfg.epochs + 1);
    log.push(epoch_metrics(0, &params, examples, zde)?);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut data = examples.to_vec();
    for epoch in 1..=cfg.epochs {
        data.shuffle(&mut rng);
        for batch in data.chunks(cfg.batch_size) {
            let masks = (cfg.dropout_rate > 0.0)
                .then(|| BatchMasks::sample(&mut rng, hidden, batch.len(), cfg.dropout_rate));
            let grads = backward(&params, batch, masks.as_ref(), zde)?;
            sgd_step(&mut params, &grads, cfg.learning_rate);
        }
        log.push(epoch_metrics(epoch, &params, examples, zde)?);
    }
    Ok(TrainOutcome { params, log })
}

/// Featurize a click-log corpus against `vocab` and train; labels are the
/// dense URL indices.
pub fn train_qcl(
    records: &[QclRecord],
    url_index: &UrlIndex,
    vocab: &Vocabulary,
    hidden: &[usize],
    cfg: &TrainConfig,
    zde: Option<&ZdeContext>,
) -> Result<TrainOutcome> {
    let examples = records
        .iter()
        .map(|r| {
            let label = url_index
                .index_of(&r.url)
                .ok_or_else(|| Error::UnknownUrl(r.url.clone()))?;
            Ok((
                Features::from_bow(&vocab.featurize(&r.query), cfg.binary_bow),
                label,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    train(&examples, url_index.len(), hidden, cfg, zde)
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn arb_net_and_input() -> impl Strategy<Value = (NetworkParams, Features)> {
        (1usize..4, 1usize..4, 2usize..4, 0u64..1000).prop_map(|(din, dh, dout, seed)| {
            let params = init_params(&[din, dh, dout], seed).unwrap();
            let dense: Vec<f64> = (0..din).map(|i| (i as f64 + seed as f64 % 7.0) * 0.5).collect();
            (params, Features::from_dense(&dense))
        })
    }

    proptest! {
        #[test]
        fn forward_output_sums_to_one((params, x) in arb_net_and_input()) {
            let trace = forward(&params, &x, None).unwrap();
            let sum: f64 = trace.output.sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(trace.output.iter().all(|&p| p > 0.0 && p < 1.0));
        }

        #[test]
        fn hidden_activations_are_non_negative((params, x) in arb_net_and_input()) {
            let trace = forward(&params, &x, None).unwrap();
            prop_assert!(trace.hidden.activations.iter().all(|h| h.iter().all(|&v| v >= 0.0)));
        }

        #[test]
        fn backward_matches_finite_differences_on_random_nets(seed in 0u64..12) {
            let (params, batch) = crate::fd::kink_safe_case(seed.wrapping_add(5000), &[3, 3, 2], 2);
            prop_assert!(params.flatten().len() <= 50);
            let analytic = backward(&params, &batch, None, None).unwrap();
            let numeric = crate::fd::numeric_gradient(&params, |p| nll_loss(p, &batch).unwrap());
            prop_assert!(crate::fd::max_relative_error(&analytic, &numeric) < crate::fd::MAX_REL);
        }

        #[test]
        fn sgd_composition_equals_summed_gradient(seed in 0u64..50) {
            let params = init_params(&[3, 3, 2], seed).unwrap();
            let (p2, batch) = crate::fd::kink_safe_case(seed, &[3, 3, 2], 2);
            let g1 = backward(&params, &batch, None, None).unwrap();
            let g2 = backward(&p2, &batch, None, None).unwrap();
            let mut summed = g1.clone();
            summed.axpy(1.0, &g2);

            let mut once = params.clone();
            sgd_step(&mut once, &summed, 0.3);
            let mut twice = params.clone();
            sgd_step(&mut twice, &g1, 0.3);
            sgd_step(&mut twice, &g2, 0.3);
            for (a, b) in once.flatten().iter().zip(twice.flatten()) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
            }
        }
    }
}

//! Deterministic fixture builders shared by the benches. Everything is
//! seeded, so timings across runs compare the same workload.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zsl_core::net::{self, Features, NetworkParams};
use zsl_core::text::Vocabulary;
use zsl_core::zsl::ZdeContext;
use zsl_core::{ClassSet, Metric};

pub fn network(sizes: &[usize], seed: u64) -> NetworkParams {
    net::init_params(sizes, seed).expect("valid layer sizes")
}

/// A bag-of-words-shaped input: `nonzeros` random coordinates with counts
/// in 1..=3.
pub fn sparse_features(rng: &mut ChaCha8Rng, dim: usize, nonzeros: usize) -> Features {
    let mut dense = vec![0.0; dim];
    for _ in 0..nonzeros {
        dense[rng.random_range(0..dim)] = rng.random_range(1..=3) as f64;
    }
    Features::from_dense(&dense)
}

pub fn labeled_batch(
    seed: u64,
    dim: usize,
    nonzeros: usize,
    len: usize,
    num_labels: usize,
) -> Vec<(Features, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let x = sparse_features(&mut rng, dim, nonzeros);
            (x, rng.random_range(0..num_labels))
        })
        .collect()
}

pub fn entropy_context(seed: u64, dim: usize, num_classes: usize, metric: Metric) -> ZdeContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bags = (0..num_classes)
        .map(|_| sparse_features(&mut rng, dim, 2))
        .collect();
    ZdeContext::new(0.01, metric, bags).expect("valid context")
}

/// Class points scattered in embedding space, named c0..c<m-1>.
pub fn class_points(seed: u64, dim: usize, num_classes: usize) -> ClassSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = (0..num_classes).map(|i| format!("c{i}")).collect();
    let embeddings = (0..num_classes)
        .map(|_| Array1::from_iter((0..dim).map(|_| rng.random_range(-2.0..2.0))))
        .collect();
    ClassSet::from_embeddings(names, embeddings).expect("valid class set")
}

pub fn scored_labels(seed: u64, n: usize) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    labels[0] = true;
    labels[1] = false;
    (scores, labels)
}

/// Vocabulary of `dim` distinct words w0..w<dim-1>.
pub fn word_vocabulary(dim: usize) -> Vocabulary {
    let corpus: Vec<String> = (0..dim).map(|i| format!("w{i}")).collect();
    Vocabulary::build(&corpus, &Default::default(), dim).expect("non-empty corpus")
}

/// Random texts over the vocabulary, `words` words each.
pub fn random_texts(seed: u64, dim: usize, words: usize, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let picks: Vec<String> = (0..words)
                .map(|_| format!("w{}", rng.random_range(0..dim)))
                .collect();
            picks.join(" ")
        })
        .collect()
}

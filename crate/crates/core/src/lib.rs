//! Zero-shot semantic utterance classification.
//!
//! This crate implements a complete pipeline for classifying natural-language
//! utterances into semantic domains *without labelled training data for those
//! domains*:
//!
//! - [`text`]: tokenization, vocabulary construction and sparse bag-of-words
//!   featurization of queries, utterances and class names.
//! - [`net`]: a feedforward network with rectified-linear hidden layers and a
//!   softmax output, trained with minibatch SGD on query click logs
//!   (query in, clicked URL out). The last hidden layer doubles as a sentence
//!   embedding.
//! - [`zsl`]: the zero-shot classifier. Both an utterance and every class
//!   *name* are mapped into the embedding space; the class posterior is a
//!   softmax over negated distances. Also contains the entropy-regularized
//!   training objective (ZDE) that sharpens class clustering without labels.
//! - [`eval`]: precision-recall AUC, error rates, nearest-neighbor probes,
//!   embedding export, learning curves and feature augmentation for a linear
//!   baseline classifier.
//! - [`data`]: click-log / labelled-utterance file formats, corpus filtering,
//!   splitting, and a seeded synthetic corpus generator with known structure.

pub mod data;
pub mod error;
pub mod eval;
#[cfg(test)]
mod fd;
pub mod model;
pub mod net;
pub mod text;
pub mod zsl;

pub use error::{Error, Result};
pub use net::{Features, NetworkParams, TrainConfig};
pub use text::{BowVector, Vocabulary};
pub use zsl::{ClassSet, KnowledgeBase, Metric};

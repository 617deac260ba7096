//! Flag surface. Field names map one-to-one onto the kebab-case flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "zsl",
    version,
    about = "Zero-shot utterance classification: train an embedding network on click logs, classify against class names by distance"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a ranked bag-of-words vocabulary from a click-log corpus
    BuildVocab(BuildVocabArgs),
    /// Generate a synthetic click-log and labeled-utterance benchmark
    Synth(SynthArgs),
    /// Train the network, optionally with the posterior-entropy term
    Train(TrainArgs),
    /// Classify utterances against a class set by embedding distance
    Classify(ClassifyArgs),
    /// Ranking quality, supervised error rates and learning curves
    Eval(EvalArgs),
    /// List nearest neighbors of probe texts in embedding space
    Nn(NnArgs),
    /// Export embeddings of texts (and optionally class names) as CSV
    Export(ExportArgs),
    /// Shuffle and split a two-field TSV into fraction-sized parts
    Split(SplitArgs),
}

/// The SGD flags shared by every command that trains something.
#[derive(Args, Clone)]
pub struct SgdFlags {
    /// Learning rate
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct BuildVocabArgs {
    /// Click-log TSV (query<TAB>url) whose queries feed the vocabulary
    #[arg(long)]
    pub corpus: PathBuf,
    /// One stop word per line
    #[arg(long)]
    pub stop_words: Option<PathBuf>,
    /// Keep at most this many words, most frequent first
    #[arg(long, default_value_t = 100_000)]
    pub max_size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Directory for qcl.tsv, suc.tsv and meta.json
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long, default_value_t = 40)]
    pub words_per_class: usize,
    #[arg(long, default_value_t = 25)]
    pub shared_words: usize,
    #[arg(long, default_value_t = 12)]
    pub urls_per_class: usize,
    #[arg(long, default_value_t = 2000)]
    pub queries_per_class: usize,
    #[arg(long, default_value_t = 400)]
    pub utterances_per_class: usize,
    /// Words per generated class name
    #[arg(long, default_value_t = 2)]
    pub name_tokens: usize,
    /// Per-word probability of drawing from the shared pool
    #[arg(long, default_value_t = 0.2)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Click-log TSV training corpus
    #[arg(long)]
    pub qcl: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub model_out: PathBuf,
    /// Comma-separated hidden widths, or "none" for logistic regression
    #[arg(long, default_value = "64,32")]
    pub layers: String,
    #[command(flatten)]
    pub sgd: SgdFlags,
    /// Dropout rate on hidden units
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    /// Weight of the posterior-entropy term; positive values need --class-set
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Class-name file (one per line) for the entropy term
    #[arg(long)]
    pub class_set: Option<PathBuf>,
    /// euclidean or cosine
    #[arg(long, default_value = "euclidean")]
    pub metric: String,
    /// Binarize bag-of-words counts
    #[arg(long, default_value_t = false)]
    pub binary_bow: bool,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub class_set: PathBuf,
    /// One utterance per line; every line gets an output row
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Override the metric stored in the model
    #[arg(long)]
    pub metric: Option<String>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(subcommand)]
    pub mode: EvalMode,
}

#[derive(Subcommand)]
pub enum EvalMode {
    /// Per-class AUC and error rate of the zero-shot classifier
    Auc(EvalAucArgs),
    /// Test error of a supervised linear baseline on a chosen feature set
    Error(EvalErrorArgs),
    /// Supervised AUC against training-set size, with the zero-shot constant
    Curve(EvalCurveArgs),
}

#[derive(Args)]
pub struct EvalAucArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub class_set: PathBuf,
    /// Labeled utterances (utterance<TAB>class_name)
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metric: Option<String>,
    /// Recorded in the report metadata
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct EvalErrorArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub class_set: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// bow, posterior, embedding or augmented
    #[arg(long, default_value = "bow")]
    pub feature: String,
    #[command(flatten)]
    pub sgd: SgdFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvalCurveArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub class_set: PathBuf,
    /// Labeled pool the per-size subsamples are drawn from
    #[arg(long)]
    pub train: PathBuf,
    /// Fixed labeled test set
    #[arg(long)]
    pub test: PathBuf,
    /// Comma-separated strictly increasing training-set sizes
    #[arg(long)]
    pub sizes: String,
    #[command(flatten)]
    pub sgd: SgdFlags,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct NnArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    /// One probe text per line
    #[arg(long)]
    pub probes: PathBuf,
    /// One candidate text per line
    #[arg(long)]
    pub candidates: PathBuf,
    /// Neighbors per probe
    #[arg(short, long, default_value_t = 5)]
    pub k: usize,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    /// One text per line
    #[arg(long)]
    pub texts: PathBuf,
    /// Optional labels, one per line, aligned with --texts
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also export flagged rows for these class names
    #[arg(long)]
    pub class_set: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SplitArgs {
    /// Two-field TSV to shuffle and split
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated fractions summing to 1, e.g. 0.8,0.2
    #[arg(long)]
    pub fractions: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parts are written to <prefix>.<i>.tsv
    #[arg(long)]
    pub out_prefix: String,
}

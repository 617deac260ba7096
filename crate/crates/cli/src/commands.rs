//! Subcommand implementations.
//!
//! Every artifact-producing command ends by writing its manifest, so a
//! manifest on disk means the run it describes completed.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use zsl_core::data::{self, LabeledUtterance, SyntheticSpec};
use zsl_core::eval;
use zsl_core::model::{self, ModelFile};
use zsl_core::net::{self, Features, TrainConfig};
use zsl_core::text::{self, Vocabulary};
use zsl_core::zsl::{self, ClassSet, KnowledgeBase, Metric, ZdeContext};
use zsl_core::{Error, Result};

use crate::args::*;
use crate::manifest::{io_err, Manifest};

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| io_err(path, e))
}

fn non_blank_lines(content: &str) -> Vec<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad {what} {:?}", part.trim())))
        })
        .collect()
}

/// "none" means no hidden layers, i.e. plain logistic regression.
fn parse_layers(s: &str) -> Result<Vec<usize>> {
    if s.trim() == "none" {
        return Ok(Vec::new());
    }
    parse_usize_list(s, "layer width")
}

fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad fraction {:?}", part.trim())))
        })
        .collect()
}

/// A flag overrides the metric stored in the model; absent, the model wins.
fn resolve_metric(flag: Option<&String>, stored: Metric) -> Result<Metric> {
    match flag {
        Some(s) => s.parse(),
        None => Ok(stored),
    }
}

fn linear_config(sgd: &SgdFlags) -> TrainConfig {
    TrainConfig {
        learning_rate: sgd.lr,
        batch_size: sgd.batch_size,
        epochs: sgd.epochs,
        seed: sgd.seed,
        ..TrainConfig::default()
    }
}

/// A model plus the vocabulary it was trained against, hash-checked.
struct Loaded {
    model: ModelFile,
    vocab: Vocabulary,
}

fn load_checked(model_path: &Path, vocab_path: &Path) -> Result<Loaded> {
    let model = ModelFile::load(model_path)?;
    let vocab = Vocabulary::load(vocab_path)?;
    model.check_vocabulary(&vocab)?;
    Ok(Loaded { model, vocab })
}

impl Loaded {
    fn knowledge_base(&self) -> Result<KnowledgeBase> {
        KnowledgeBase::new(
            self.model.params.clone(),
            self.vocab.clone(),
            self.model.config.binary_bow,
        )
    }
}

pub fn build_vocab(args: &BuildVocabArgs) -> Result<()> {
    let (records, _) = data::load_qcl(&args.corpus)?;
    let stop_words = match &args.stop_words {
        Some(path) => text::load_stop_words(path)?,
        None => HashSet::new(),
    };
    let queries: Vec<&str> = records.iter().map(|r| r.query.as_str()).collect();
    let vocab = Vocabulary::build(&queries, &stop_words, args.max_size)?;
    vocab.save(&args.out)?;
    Manifest::new("build-vocab")
        .flag("max_size", args.max_size)
        .input(&args.corpus)?
        .option_input(args.stop_words.as_ref())?
        .output(&args.out)
        .write_beside(&args.out)
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    if args.classes < 2 {
        return Err(Error::InvalidConfig("--classes must be at least 2".into()));
    }
    let spec = SyntheticSpec {
        num_classes: args.classes,
        words_per_class: args.words_per_class,
        shared_words: args.shared_words,
        urls_per_class: args.urls_per_class,
        queries_per_class: args.queries_per_class,
        utterances_per_class: args.utterances_per_class,
        class_name_tokens: args.name_tokens,
        noise_rate: args.noise,
        seed: args.seed,
    };
    let generated = data::generate_synthetic(&spec)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let qcl_path = args.out_dir.join("qcl.tsv");
    let suc_path = args.out_dir.join("suc.tsv");
    let meta_path = args.out_dir.join("meta.json");
    data::save_qcl(&generated.qcl, &qcl_path)?;
    data::save_suc(&generated.suc, &suc_path)?;
    generated.meta.save(&meta_path)?;
    Manifest::new("synth")
        .flag("classes", args.classes)
        .flag("words_per_class", args.words_per_class)
        .flag("shared_words", args.shared_words)
        .flag("urls_per_class", args.urls_per_class)
        .flag("queries_per_class", args.queries_per_class)
        .flag("utterances_per_class", args.utterances_per_class)
        .flag("name_tokens", args.name_tokens)
        .flag("noise", args.noise)
        .flag("seed", args.seed)
        .output(&qcl_path)
        .output(&suc_path)
        .output(&meta_path)
        .write_beside(&args.out_dir.join("synth"))
}

pub fn train(args: &TrainArgs) -> Result<()> {
    if args.lambda > 0.0 && args.class_set.is_none() {
        return Err(Error::InvalidConfig(
            "--lambda > 0 requires --class-set: the entropy term is defined over class names"
                .into(),
        ));
    }
    let metric: Metric = args.metric.parse()?;
    let hidden = parse_layers(&args.layers)?;
    let vocab = Vocabulary::load(&args.vocab)?;
    let (records, url_index) = data::load_qcl(&args.qcl)?;
    let cfg = TrainConfig {
        learning_rate: args.sgd.lr,
        batch_size: args.sgd.batch_size,
        epochs: args.sgd.epochs,
        dropout_rate: args.dropout,
        seed: args.sgd.seed,
        lambda: args.lambda,
        binary_bow: args.binary_bow,
    };
    let ctx = match &args.class_set {
        Some(path) => {
            let names = zsl::load_class_names(path)?;
            Some(ZdeContext::from_class_names(
                &vocab,
                &names,
                args.binary_bow,
                args.lambda,
                metric,
            )?)
        }
        None => None,
    };
    let outcome = net::train_qcl(&records, &url_index, &vocab, &hidden, &cfg, ctx.as_ref())?;

    let log_path = PathBuf::from(format!("{}.log.tsv", args.model_out.display()));
    write_file(&log_path, &format_train_log(&outcome.log))?;
    ModelFile::new(outcome.params, cfg, metric, &vocab).save(&args.model_out)?;

    Manifest::new("train")
        .flag("layers", &args.layers)
        .flag("lr", args.sgd.lr)
        .flag("epochs", args.sgd.epochs)
        .flag("batch_size", args.sgd.batch_size)
        .flag("dropout", args.dropout)
        .flag("lambda", args.lambda)
        .flag("metric", metric)
        .flag("seed", args.sgd.seed)
        .flag("binary_bow", args.binary_bow)
        .input(&args.qcl)?
        .input(&args.vocab)?
        .option_input(args.class_set.as_ref())?
        .output(&args.model_out)
        .output(&log_path)
        .write_beside(&args.model_out)
}

/// TSV log; the entropy column exists iff the run tracked the entropy term.
fn format_train_log(log: &[net::EpochMetrics]) -> String {
    let with_entropy = log.first().is_some_and(|m| m.entropy.is_some());
    let mut out = String::from(if with_entropy {
        "epoch\tnll\tentropy\n"
    } else {
        "epoch\tnll\n"
    });
    for m in log {
        match m.entropy {
            Some(h) => writeln!(out, "{}\t{:.16e}\t{:.16e}", m.epoch, m.nll, h),
            None => writeln!(out, "{}\t{:.16e}", m.epoch, m.nll),
        }
        .expect("string write");
    }
    out
}

pub fn classify(args: &ClassifyArgs) -> Result<()> {
    let loaded = load_checked(&args.model, &args.vocab)?;
    let metric = resolve_metric(args.metric.as_ref(), loaded.model.metric)?;
    let kb = loaded.knowledge_base()?;
    let names = zsl::load_class_names(&args.class_set)?;
    let classes = ClassSet::from_knowledge_base(&kb, &names)?;
    let input = read_to_string(&args.input)?;

    let mut out = String::from("utterance\tpredicted");
    for name in classes.names() {
        write!(out, "\t{name}").expect("string write");
    }
    out.push('\n');
    for line in input.lines() {
        let posterior = zsl::zsl_posterior(&kb, line, &classes, metric)?;
        write!(out, "{line}\t{}", classes.names()[posterior.argmax()]).expect("string write");
        for p in posterior.probabilities() {
            write!(out, "\t{p:.6}").expect("string write");
        }
        out.push('\n');
    }
    write_file(&args.out, &out)?;

    Manifest::new("classify")
        .flag("metric", metric)
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.class_set)?
        .input(&args.input)?
        .output(&args.out)
        .write_beside(&args.out)
}

pub fn eval_auc(args: &EvalAucArgs) -> Result<()> {
    let loaded = load_checked(&args.model, &args.vocab)?;
    let metric = resolve_metric(args.metric.as_ref(), loaded.model.metric)?;
    let kb = loaded.knowledge_base()?;
    let names = zsl::load_class_names(&args.class_set)?;
    let classes = ClassSet::from_knowledge_base(&kb, &names)?;
    let test = data::load_suc(&args.test)?;
    let model_sha256 = model::sha256_hex(&loaded.model.to_bytes());
    let dataset_sha256 = model::sha256_hex(&read_bytes(&args.test)?);
    let report = eval::zsl_report(
        &kb,
        &classes,
        metric,
        &test,
        model_sha256,
        dataset_sha256,
        args.seed,
    )?;
    report.save(&args.out)?;
    Manifest::new("eval-auc")
        .flag("metric", metric)
        .flag("seed", args.seed)
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.class_set)?
        .input(&args.test)?
        .output(&args.out)
        .write_beside(&args.out)
}

enum FeatureKind {
    Bow,
    Posterior,
    Embedding,
    Augmented,
}

impl FeatureKind {
    fn parse(s: &str) -> Result<FeatureKind> {
        match s {
            "bow" => Ok(FeatureKind::Bow),
            "posterior" => Ok(FeatureKind::Posterior),
            "embedding" => Ok(FeatureKind::Embedding),
            "augmented" => Ok(FeatureKind::Augmented),
            other => Err(Error::InvalidConfig(format!(
                "unknown feature {other:?}, expected bow, posterior, embedding or augmented"
            ))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            FeatureKind::Bow => "bow",
            FeatureKind::Posterior => "posterior",
            FeatureKind::Embedding => "embedding",
            FeatureKind::Augmented => "augmented",
        }
    }

    fn needs_embedding(&self) -> bool {
        matches!(self, FeatureKind::Embedding | FeatureKind::Augmented)
    }
}

fn featurize_utterance(
    kind: &FeatureKind,
    loaded: &Loaded,
    kb: Option<&KnowledgeBase>,
    text: &str,
) -> Result<Vec<f64>> {
    let bow = loaded.vocab.featurize(text);
    Ok(match kind {
        FeatureKind::Bow => bow.to_dense(),
        FeatureKind::Posterior => {
            let x = Features::from_bow(&bow, loaded.model.config.binary_bow);
            zsl::posterior_features(&loaded.model.params, &x)?.to_vec()
        }
        FeatureKind::Embedding => kb.expect("embedding features carry a kb").embed(text).to_vec(),
        FeatureKind::Augmented => {
            let h = kb.expect("augmented features carry a kb").embed(text);
            eval::augment_features(&bow, h.as_slice().expect("contiguous"))
        }
    })
}

/// Class-set order defines the label indices.
fn label_indices(names: &[String], set: &[LabeledUtterance]) -> Result<Vec<usize>> {
    set.iter()
        .map(|u| {
            names
                .iter()
                .position(|n| n == &u.class_name)
                .ok_or_else(|| Error::UnknownClass(u.class_name.clone()))
        })
        .collect()
}

#[derive(Serialize)]
struct BaselineReport {
    feature: String,
    classes: usize,
    train_size: usize,
    test_size: usize,
    error_rate: f64,
    model_sha256: String,
    train_sha256: String,
    test_sha256: String,
    seed: u64,
}

pub fn eval_error(args: &EvalErrorArgs) -> Result<()> {
    let kind = FeatureKind::parse(&args.feature)?;
    let loaded = load_checked(&args.model, &args.vocab)?;
    let kb = if kind.needs_embedding() {
        Some(loaded.knowledge_base()?)
    } else {
        None
    };
    let names = zsl::load_class_names(&args.class_set)?;
    let train_set = data::load_suc(&args.train)?;
    let test_set = data::load_suc(&args.test)?;
    let train_labels = label_indices(&names, &train_set)?;
    let test_labels = label_indices(&names, &test_set)?;

    let featurize = |u: &LabeledUtterance| featurize_utterance(&kind, &loaded, kb.as_ref(), &u.utterance);
    let train_features = train_set
        .iter()
        .map(|u| featurize(u))
        .collect::<Result<Vec<_>>>()?;
    let cfg = linear_config(&args.sgd);
    let params = eval::train_linear_classifier(&train_features, &train_labels, names.len(), &cfg)?;
    let predictions = test_set
        .iter()
        .map(|u| eval::predict_label(&params, &Features::from_dense(&featurize(u)?)))
        .collect::<Result<Vec<_>>>()?;
    let error_rate = eval::error_rate(&predictions, &test_labels)?;

    let report = BaselineReport {
        feature: kind.name().to_owned(),
        classes: names.len(),
        train_size: train_set.len(),
        test_size: test_set.len(),
        error_rate,
        model_sha256: model::sha256_hex(&loaded.model.to_bytes()),
        train_sha256: model::sha256_hex(&read_bytes(&args.train)?),
        test_sha256: model::sha256_hex(&read_bytes(&args.test)?),
        seed: args.sgd.seed,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_file(&args.out, &json)?;

    Manifest::new("eval-error")
        .flag("feature", kind.name())
        .flag("lr", args.sgd.lr)
        .flag("epochs", args.sgd.epochs)
        .flag("batch_size", args.sgd.batch_size)
        .flag("seed", args.sgd.seed)
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.class_set)?
        .input(&args.train)?
        .input(&args.test)?
        .output(&args.out)
        .write_beside(&args.out)
}

pub fn eval_curve(args: &EvalCurveArgs) -> Result<()> {
    let loaded = load_checked(&args.model, &args.vocab)?;
    let metric = resolve_metric(args.metric.as_ref(), loaded.model.metric)?;
    let kb = loaded.knowledge_base()?;
    let names = zsl::load_class_names(&args.class_set)?;
    let classes = ClassSet::from_knowledge_base(&kb, &names)?;
    let train_pool = data::load_suc(&args.train)?;
    let test = data::load_suc(&args.test)?;
    let sizes = parse_usize_list(&args.sizes, "size")?;
    let cfg = linear_config(&args.sgd);
    let curve = eval::learning_curve(
        &train_pool,
        &test,
        &kb,
        &classes,
        metric,
        &sizes,
        &cfg,
        args.sgd.seed,
    )?;

    let mut csv = String::from("size,supervised_auc,zsl_auc\n");
    for (size, auc) in curve.sizes.iter().zip(&curve.supervised_auc) {
        writeln!(csv, "{size},{auc:.16e},{:.16e}", curve.zsl_auc).expect("string write");
    }
    write_file(&args.out, &csv)?;

    Manifest::new("eval-curve")
        .flag("sizes", &args.sizes)
        .flag("metric", metric)
        .flag("lr", args.sgd.lr)
        .flag("epochs", args.sgd.epochs)
        .flag("batch_size", args.sgd.batch_size)
        .flag("seed", args.sgd.seed)
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.class_set)?
        .input(&args.train)?
        .input(&args.test)?
        .output(&args.out)
        .write_beside(&args.out)
}

pub fn nn(args: &NnArgs) -> Result<()> {
    let loaded = load_checked(&args.model, &args.vocab)?;
    let metric = resolve_metric(args.metric.as_ref(), loaded.model.metric)?;
    let kb = loaded.knowledge_base()?;
    let probes = non_blank_lines(&read_to_string(&args.probes)?);
    let candidates = non_blank_lines(&read_to_string(&args.candidates)?);

    let mut out = String::new();
    for probe in &probes {
        writeln!(out, "probe: {probe}").expect("string write");
        let neighbors = eval::nearest_neighbors(&kb, probe, &candidates, args.k, metric)?;
        for (rank, (index, dist)) in neighbors.into_iter().enumerate() {
            writeln!(out, "  {}\t{:.6}\t{}", rank + 1, dist, candidates[index])
                .expect("string write");
        }
    }
    write_file(&args.out, &out)?;

    Manifest::new("nn")
        .flag("k", args.k)
        .flag("metric", metric)
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.probes)?
        .input(&args.candidates)?
        .output(&args.out)
        .write_beside(&args.out)
}

pub fn export(args: &ExportArgs) -> Result<()> {
    let loaded = load_checked(&args.model, &args.vocab)?;
    let kb = loaded.knowledge_base()?;
    let texts = non_blank_lines(&read_to_string(&args.texts)?);
    let labels = match &args.labels {
        Some(path) => Some(non_blank_lines(&read_to_string(path)?)),
        None => None,
    };
    let mut rows = eval::export_embedding(&kb, &texts, labels.as_deref())?;
    if let Some(path) = &args.class_set {
        let names = zsl::load_class_names(path)?;
        let classes = ClassSet::from_knowledge_base(&kb, &names)?;
        rows.extend(eval::class_rows(&classes));
    }
    eval::save_embedding_csv(&rows, &args.out)?;

    Manifest::new("export")
        .input(&args.model)?
        .input(&args.vocab)?
        .input(&args.texts)?
        .option_input(args.labels.as_ref())?
        .option_input(args.class_set.as_ref())?
        .output(&args.out)
        .write_beside(&args.out)
}

/// Splits any two-field TSV; both corpus formats qualify.
pub fn split(args: &SplitArgs) -> Result<()> {
    let content = read_to_string(&args.input)?;
    let records = data::parse_suc(&content, &args.input.display().to_string())?;
    let fractions = parse_fractions(&args.fractions)?;
    let parts = data::split(&records, &fractions, args.seed)?;

    let mut manifest = Manifest::new("split")
        .flag("fractions", &args.fractions)
        .flag("seed", args.seed)
        .input(&args.input)?;
    for (i, part) in parts.iter().enumerate() {
        let path = PathBuf::from(format!("{}.{i}.tsv", args.out_prefix));
        data::save_suc(part, &path)?;
        manifest = manifest.output(&path);
    }
    manifest.write_beside(Path::new(&args.out_prefix))
}

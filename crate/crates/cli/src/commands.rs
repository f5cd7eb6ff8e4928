use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use hybridtext::corpus::{read_csv, stratified_split};
use hybridtext::pipeline::{compare, train_model, PriorSource};
use hybridtext::synthetic::{generate, SyntheticSpec};
use hybridtext::{CsvSchema, Dataset, SplitSpec};

use crate::config::{RunConfig, TuningArgs};
use crate::error::CliError;
use crate::model_file::{fingerprint, Metadata, ModelFile};
use crate::report::{
    instance_rows, model_policy, render_instances, to_json, ComparisonDocument, EvaluationDocument, REPORT_VERSION,
};
use crate::{Command, Format, PriorFlag};

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Load a CSV, returning the dataset with the raw bytes it was parsed from.
fn load(path: &Path, schema: &CsvSchema) -> Result<(Dataset, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let data = read_csv(bytes.as_slice(), schema).map_err(|e| CliError::from(e).with_path(path))?;
    Ok((data, bytes))
}

impl CliError {
    fn with_path(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            Self::Argument(m) => Self::Argument(m),
            Self::Io(m) => Self::Io(m),
            Self::Data(m) => Self::Data(format!("{p}: {m}")),
            Self::Model(m) => Self::Model(format!("{p}: {m}")),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Split {
            input,
            train_out,
            test_out,
            test_fraction,
            config,
            tuning,
        } => split(&input, &train_out, &test_out, test_fraction, config.as_deref(), &tuning, out),
        Command::Train {
            input,
            output,
            kind,
            config,
            trained_at,
            tuning,
        } => train(&input, &output, kind.into(), config.as_deref(), trained_at, &tuning, out),
        Command::Evaluate {
            model,
            input,
            prior,
            audit,
            format,
            report_out,
            config,
            tuning,
        } => evaluate(
            &model,
            &input,
            prior,
            audit,
            format,
            report_out.as_deref(),
            config.as_deref(),
            &tuning,
            out,
        ),
        Command::Classify {
            model,
            text,
            input,
            audit,
        } => classify(&model, &text, input.as_deref(), audit, out),
        Command::Compare {
            train,
            test,
            format,
            report_out,
            config,
            tuning,
        } => run_compare(&train, &test, format, report_out.as_deref(), config.as_deref(), &tuning, out),
        Command::Synth {
            output,
            docs,
            overlap,
            cue_rate,
            seed,
        } => synth(&output, docs, overlap, cue_rate, seed, out),
    }
}

fn split(
    input: &Path,
    train_out: &Path,
    test_out: &Path,
    test_fraction: Option<f64>,
    config: Option<&Path>,
    tuning: &TuningArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve(config, tuning)?;
    if let Some(f) = test_fraction {
        cfg.test_fraction = f;
    }
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(CliError::Argument(format!(
            "--test-fraction must lie strictly between 0 and 1, got {}",
            cfg.test_fraction
        )));
    }
    let schema = cfg.schema();
    let (data, _) = load(input, &schema)?;
    let (train, test) = stratified_split(&data, &SplitSpec::new(cfg.test_fraction, cfg.seed))?;
    train.save_csv(train_out, &schema)?;
    test.save_csv(test_out, &schema)?;
    let [a, b] = data.label_names();
    let (tr, te) = (train.class_counts(), test.class_counts());
    write_out(
        out,
        &format!(
            "train: {} rows ({a} {}, {b} {}) -> {}\ntest: {} rows ({a} {}, {b} {}) -> {}\n",
            train.len(),
            tr[0],
            tr[1],
            train_out.display(),
            test.len(),
            te[0],
            te[1],
            test_out.display()
        ),
    )
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn train(
    input: &Path,
    output: &Path,
    kind: hybridtext::ModelKind,
    config: Option<&Path>,
    trained_at: Option<u64>,
    tuning: &TuningArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(config, tuning)?;
    let train_cfg = cfg.train_config()?;
    let (data, bytes) = load(input, &cfg.schema())?;
    let (model, diag) = train_model(&data, &train_cfg, kind).map_err(|e| CliError::from(e).with_path(input))?;
    let meta = Metadata::new(cfg.seed, trained_at.unwrap_or_else(now_unix), &bytes, &model, Some(&diag));
    ModelFile::from_model(&model, meta).save(output)?;
    let mut msg = format!(
        "trained {kind} model on {} documents, vocabulary of {} terms -> {}\n",
        data.len(),
        model.featurizer().vocabulary().len(),
        output.display()
    );
    if let Some(p) = model_policy(&model) {
        msg.push_str(&format!("fusion: {p}\n"));
    }
    write_out(out, &msg)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    model_path: &Path,
    input: &Path,
    prior: PriorFlag,
    audit: bool,
    format: Format,
    report_out: Option<&Path>,
    config: Option<&Path>,
    tuning: &TuningArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = ModelFile::load(model_path)?.to_model()?;
    let cfg = RunConfig::resolve(config, tuning)?;
    let labels = model.labels().clone();
    let schema = CsvSchema {
        labels: Some(labels.clone()),
        ..cfg.schema()
    };
    let (data, bytes) = load(input, &schema).map_err(|e| match e {
        CliError::Data(m) if m.contains("is neither") => {
            CliError::Model(format!("test data does not match the model labels: {m}"))
        }
        other => other,
    })?;
    let source = match prior {
        PriorFlag::Train => PriorSource::Train,
        PriorFlag::Test => PriorSource::Test,
    };
    let predictions = model.predict_dataset(&data)?;
    let metrics = model.evaluate(&data, source)?;
    let instances = audit.then(|| instance_rows(&model, &data, &predictions));
    let doc = EvaluationDocument {
        format: "hybridtext-evaluation",
        format_version: REPORT_VERSION,
        model_kind: model.kind(),
        fusion: model_policy(&model).map(|p| crate::model_file::fusion_file(&p)),
        prior_source: match prior {
            PriorFlag::Train => "train",
            PriorFlag::Test => "test",
        },
        test_sha256: fingerprint(&bytes),
        metrics,
        instances,
    };
    let json = to_json(&doc);
    if let Some(path) = report_out {
        write_file(path, &json)?;
    }
    match format {
        Format::Json => write_out(out, &json),
        Format::Text => {
            let mut text = format!("=== Evaluation of {} model on {} ===\n", doc.model_kind, input.display());
            if let Some(p) = model_policy(&model) {
                text.push_str(&format!("Fusion: {p}\n"));
            }
            text.push('\n');
            text.push_str(&doc.metrics.render_text());
            if let Some(rows) = &doc.instances {
                text.push_str(&render_instances(rows));
            }
            write_out(out, &text)
        }
    }
}

fn classify(model_path: &Path, texts: &[String], input: Option<&Path>, audit: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let model = ModelFile::load(model_path)?.to_model()?;
    let labels = model.labels();
    let line_for = |text: &str, out: &mut dyn Write| -> Result<(), CliError> {
        let p = model.predict_text(text);
        let label = p.label();
        let mut line = format!("{}\t{:.6}", labels[label], p.distribution.prob(label));
        if audit {
            for (name, d) in [("nb", p.nb), ("svm", p.svm)] {
                if let Some(d) = d {
                    line.push_str(&format!("\t{name}={:.6},{:.6}", d.prob(0), d.prob(1)));
                }
            }
        }
        line.push('\n');
        write_out(out, &line)
    };
    match input {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            let mut n = 0usize;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| CliError::io(path, e))?;
                line_for(line.trim_end_matches('\r'), out)?;
                n += 1;
            }
            if n == 0 {
                return Err(CliError::Argument(format!("{}: input file is empty", path.display())));
            }
        }
        None => {
            if texts.is_empty() {
                return Err(CliError::Argument("give --text or --input".into()));
            }
            for t in texts {
                line_for(t, out)?;
            }
        }
    }
    Ok(())
}

fn run_compare(
    train_path: &Path,
    test_path: &Path,
    format: Format,
    report_out: Option<&Path>,
    config: Option<&Path>,
    tuning: &TuningArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(config, tuning)?;
    let train_cfg = cfg.train_config()?;
    let (train, train_bytes) = load(train_path, &cfg.schema())?;
    let test_schema = CsvSchema {
        labels: Some(train.label_names().map(str::to_string)),
        ..cfg.schema()
    };
    let (test, test_bytes) = load(test_path, &test_schema)?;
    let comparison = compare(&train, &test, &train_cfg)?;
    let doc = ComparisonDocument::new(&comparison, (&train, &train_bytes), (&test, &test_bytes));
    let json = to_json(&doc);
    if let Some(path) = report_out {
        write_file(path, &json)?;
    }
    match format {
        Format::Json => write_out(out, &json),
        Format::Text => write_out(out, &doc.render_text()),
    }
}

fn synth(output: &Path, docs: usize, overlap: f64, cue_rate: f64, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    for (flag, v) in [("--overlap", overlap), ("--cue-rate", cue_rate)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Argument(format!("{flag} must lie in [0, 1], got {v}")));
        }
    }
    if docs < 2 {
        return Err(CliError::Argument("--docs must be at least 2".into()));
    }
    let spec = SyntheticSpec {
        n_docs: docs,
        overlap,
        cue_rate,
        seed,
        ..SyntheticSpec::default()
    };
    let data = generate(&spec)?;
    data.save_csv(output, &CsvSchema::default())?;
    let c = data.class_counts();
    write_out(
        out,
        &format!(
            "wrote {} documents ({} {}, {} {}) to {}\n",
            data.len(),
            spec.labels[0],
            c[0],
            spec.labels[1],
            c[1],
            output.display()
        ),
    )
}

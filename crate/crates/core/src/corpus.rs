//! Labeled comment datasets: CSV ingestion, CSV writing and deterministic
//! stratified train/test splits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV header has no column named `{0}`")]
    MissingColumn(String),
    #[error("line {line}: label `{label}` is neither `{first}` nor `{second}`")]
    UnknownLabel {
        line: u64,
        label: String,
        first: String,
        second: String,
    },
    #[error("only one class label (`{0}`) occurs in the data; declare both labels explicitly")]
    MissingLabel(String),
    #[error("dataset contains no rows")]
    Empty,
    #[error("class labels must be distinct, got `{0}` twice")]
    DuplicateLabel(String),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("class `{class}` has {count} documents, too few to place at least one in both train and test")]
    InfeasibleSplit { class: String, count: usize },
}

/// One of the two class labels of a binary dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassLabel {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    /// 0-based row position in the file the document was loaded from.
    pub id: usize,
    pub text: String,
    /// Index into [`Dataset::labels`].
    pub label: usize,
}

/// An ordered collection of labeled documents over exactly two classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    documents: Vec<LabeledDocument>,
    labels: [ClassLabel; 2],
}

impl Dataset {
    /// Build a dataset from `(text, label index)` pairs. Ids are assigned by
    /// position.
    pub fn from_pairs<S: Into<String>>(
        label_names: [&str; 2],
        rows: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, CorpusError> {
        let labels = make_labels([label_names[0].to_string(), label_names[1].to_string()])?;
        let documents = rows
            .into_iter()
            .enumerate()
            .map(|(id, (text, label))| {
                assert!(label < 2, "label index {label} out of range");
                LabeledDocument {
                    id,
                    text: text.into(),
                    label,
                }
            })
            .collect();
        Ok(Self { documents, labels })
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn labels(&self) -> &[ClassLabel; 2] {
        &self.labels
    }

    pub fn label_names(&self) -> [&str; 2] {
        [&self.labels[0].name, &self.labels[1].name]
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Documents per class, indexed by label.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for doc in &self.documents {
            counts[doc.label] += 1;
        }
        counts
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.text.as_str())
    }

    pub fn label_indices(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Sub-dataset made of the documents at `positions` (positions into
    /// [`Dataset::documents`], not ids). Ids are preserved.
    pub fn subset(&self, positions: &[usize]) -> Dataset {
        Dataset {
            documents: positions.iter().map(|&p| self.documents[p].clone()).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Write the dataset as a two-column CSV using the schema's column names.
    pub fn write_csv<W: Write>(&self, writer: W, schema: &CsvSchema) -> Result<(), CorpusError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        out.write_record([schema.label_column.as_str(), schema.text_column.as_str()])?;
        for doc in &self.documents {
            out.write_record([self.labels[doc.label].name.as_str(), doc.text.as_str()])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, schema: &CsvSchema) -> Result<(), CorpusError> {
        let file = File::create(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file), schema)
    }
}

fn make_labels(names: [String; 2]) -> Result<[ClassLabel; 2], CorpusError> {
    if names[0] == names[1] {
        return Err(CorpusError::DuplicateLabel(names[0].clone()));
    }
    let [a, b] = names;
    Ok([ClassLabel { index: 0, name: a }, ClassLabel { index: 1, name: b }])
}

/// Column mapping for CSV ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub label_column: String,
    pub text_column: String,
    /// Declared label order. When `None`, labels are indexed in order of
    /// first appearance in the file.
    pub labels: Option<[String; 2]>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".to_string(),
            text_column: "text".to_string(),
            labels: None,
        }
    }
}

impl CsvSchema {
    pub fn with_labels(mut self, labels: [&str; 2]) -> Self {
        self.labels = Some([labels[0].to_string(), labels[1].to_string()]);
        self
    }
}

pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(std::io::BufReader::new(file), schema)
}

/// Parse an RFC 4180 CSV with a header row.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<Dataset, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let label_col = column(&schema.label_column)?;
    let text_col = column(&schema.text_column)?;

    let mut names: Vec<String> = match &schema.labels {
        Some(declared) => {
            make_labels(declared.clone())?;
            declared.to_vec()
        }
        None => Vec::with_capacity(2),
    };
    let mut documents = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        // Column presence is guaranteed by the csv reader's fixed-width check.
        let label = &record[label_col];
        let text = &record[text_col];
        let index = match names.iter().position(|n| n == label) {
            Some(i) => i,
            None if names.len() < 2 && schema.labels.is_none() => {
                names.push(label.to_string());
                names.len() - 1
            }
            None => {
                return Err(CorpusError::UnknownLabel {
                    line,
                    label: label.to_string(),
                    first: names[0].clone(),
                    second: names[1].clone(),
                })
            }
        };
        documents.push(LabeledDocument {
            id: documents.len(),
            text: text.to_string(),
            label: index,
        });
    }
    match names.len() {
        0 => Err(CorpusError::Empty),
        1 => Err(CorpusError::MissingLabel(names.remove(0))),
        _ => {
            let second = names.pop().expect("two labels");
            let first = names.pop().expect("two labels");
            Ok(Dataset {
                documents,
                labels: make_labels([first, second])?,
            })
        }
    }
}

/// Parameters of a stratified split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Self {
        Self { test_fraction, seed }
    }
}

/// Per-class test-set sizes: floors of `n_c * f`, topped up by largest
/// fractional remainder (lower class index first on ties) until the total
/// equals `round(n * f)`.
pub fn allocate_test_counts(counts: [usize; 2], test_fraction: f64) -> [usize; 2] {
    let exact = counts.map(|n| n as f64 * test_fraction);
    let mut alloc = exact.map(|x| x.floor() as usize);
    let total = ((counts[0] + counts[1]) as f64 * test_fraction).round() as usize;
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut k = 0;
    while alloc[0] + alloc[1] < total {
        alloc[order[k % 2]] += 1;
        k += 1;
    }
    alloc
}

/// Stratified split of a label sequence. Returns `(train, test)` positions,
/// each sorted ascending.
pub fn split_positions(
    labels: &[usize],
    label_names: [&str; 2],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>), CorpusError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(spec.test_fraction));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (pos, &label) in labels.iter().enumerate() {
        by_class[label].push(pos);
    }
    let counts = [by_class[0].len(), by_class[1].len()];
    let test_counts = allocate_test_counts(counts, spec.test_fraction);
    for c in 0..2 {
        if test_counts[c] == 0 || test_counts[c] >= counts[c] {
            return Err(CorpusError::InfeasibleSplit {
                class: label_names[c].to_string(),
                count: counts[c],
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::with_capacity(labels.len());
    let mut test = Vec::with_capacity(test_counts[0] + test_counts[1]);
    for (members, &k) in by_class.iter_mut().zip(test_counts.iter()) {
        members.shuffle(&mut rng);
        test.extend_from_slice(&members[..k]);
        train.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Split a dataset into `(train, test)`, preserving file order within each.
pub fn stratified_split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), CorpusError> {
    let (train, test) = split_positions(&dataset.label_indices(), dataset.label_names(), spec)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

/// Class proportions of a dataset.
pub fn class_distribution<F: Scalar>(dataset: &Dataset) -> Result<[F; 2], CorpusError> {
    proportions(dataset.class_counts())
}

pub(crate) fn proportions<F: Scalar>(counts: [usize; 2]) -> Result<[F; 2], CorpusError> {
    let n = counts[0] + counts[1];
    if n == 0 {
        return Err(CorpusError::Empty);
    }
    let n = F::from_count(n as u64);
    Ok(counts.map(|c| F::from_count(c as u64) / n))
}

//! Train-set vocabulary and sparse bag-of-words vectors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::TokenList;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("min_df must be at least 1")]
    InvalidMinDf,
    #[error("max_features must be at least 1")]
    InvalidMaxFeatures,
    #[error("inconsistent vocabulary: {0}")]
    Inconsistent(String),
    #[error("unknown weighting scheme `{0}` (expected binary, tf or tfidf)")]
    UnknownScheme(String),
}

/// Term index built from training documents only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    index: HashMap<String, usize>,
    n_docs: u64,
}

impl Vocabulary {
    /// Terms with document frequency below `min_df` are dropped. With
    /// `max_features`, the highest-df terms are kept (ties broken
    /// lexicographically). Feature indices follow lexicographic term order.
    pub fn build(docs: &[TokenList], min_df: u64, max_features: Option<usize>) -> Result<Self, FeatureError> {
        if docs.is_empty() {
            return Err(FeatureError::EmptyCorpus);
        }
        if min_df < 1 {
            return Err(FeatureError::InvalidMinDf);
        }
        if max_features == Some(0) {
            return Err(FeatureError::InvalidMaxFeatures);
        }
        let mut df: BTreeMap<&str, u64> = BTreeMap::new();
        for doc in docs {
            let unique: HashSet<&str> = doc.iter().collect();
            for term in unique {
                *df.entry(term).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = df.into_iter().filter(|&(_, d)| d >= min_df).collect();
        if let Some(limit) = max_features {
            if kept.len() > limit {
                kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
                kept.truncate(limit);
                kept.sort_by(|a, b| a.0.cmp(b.0));
            }
        }
        let (terms, doc_freq) = kept.into_iter().map(|(t, d)| (t.to_string(), d)).unzip();
        Self::from_parts(terms, doc_freq, docs.len() as u64)
    }

    /// Reassemble a vocabulary from persisted `(term, df)` columns.
    pub fn from_parts(terms: Vec<String>, doc_freq: Vec<u64>, n_docs: u64) -> Result<Self, FeatureError> {
        if terms.len() != doc_freq.len() {
            return Err(FeatureError::Inconsistent("term and df columns differ in length".into()));
        }
        if let Some(&d) = doc_freq.iter().find(|&&d| d == 0 || d > n_docs) {
            return Err(FeatureError::Inconsistent(format!("df {d} outside 1..={n_docs}")));
        }
        let index: HashMap<String, usize> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if index.len() != terms.len() {
            return Err(FeatureError::Inconsistent("duplicate term".into()));
        }
        Ok(Self {
            terms,
            doc_freq,
            index,
            n_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freqs(&self) -> &[u64] {
        &self.doc_freq
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn df(&self, term: &str) -> Option<u64> {
        self.index_of(term).map(|i| self.doc_freq[i])
    }

    /// `ln(N / df)` for the feature at `index`.
    pub fn idf<F: Scalar>(&self, index: usize) -> F {
        (F::from_count(self.n_docs) / F::from_count(self.doc_freq[index])).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingScheme {
    /// 1 for every term present.
    Binary,
    /// Raw in-document count.
    Tf,
    /// `tf * ln(N / df)`.
    TfIdf,
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Binary => "binary",
            Self::Tf => "tf",
            Self::TfIdf => "tfidf",
        })
    }
}

impl FromStr for WeightingScheme {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(Self::Binary),
            "tf" => Ok(Self::Tf),
            "tfidf" | "tf-idf" => Ok(Self::TfIdf),
            other => Err(FeatureError::UnknownScheme(other.to_string())),
        }
    }
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<F> {
    indices: Vec<usize>,
    values: Vec<F>,
}

impl<F: Scalar> SparseVector<F> {
    pub fn new() -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from `(index, value)` pairs in any order. Duplicate indices are
    /// summed and zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut merged: BTreeMap<usize, F> = BTreeMap::new();
        for (i, v) in pairs {
            *merged.entry(i).or_insert_with(F::zero) += v;
        }
        let (indices, values) = merged.into_iter().filter(|(_, v)| *v != F::zero()).unzip();
        Self { indices, values }
    }

    pub fn from_dense(dense: &[F]) -> Self {
        Self::from_pairs(dense.iter().copied().enumerate())
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, F)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> F {
        match self.indices.binary_search(&index) {
            Ok(p) => self.values[p],
            Err(_) => F::zero(),
        }
    }

    /// Largest stored index plus one, or zero.
    pub fn min_dim(&self) -> usize {
        self.indices.last().map_or(0, |i| i + 1)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn l2_norm(&self) -> F {
        self.values.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    pub fn scale(&self, factor: F) -> Self {
        Self::from_pairs(self.iter().map(|(i, v)| (i, v * factor)))
    }

    /// Merge-walk dot product of two sparse vectors.
    pub fn dot(&self, other: &SparseVector<F>) -> F {
        let (mut a, mut b) = (0, 0);
        let mut acc = F::zero();
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Dot product with a dense vector. Indices beyond `dense` count as zero.
    pub fn dot_dense(&self, dense: &[F]) -> F {
        self.iter().filter_map(|(i, v)| dense.get(i).map(|&w| w * v)).sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<F> {
        let mut out = vec![F::zero(); dim.max(self.min_dim())];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

/// Map tokens to a sparse vector. Out-of-vocabulary tokens are dropped.
pub fn vectorize<F: Scalar>(tokens: &TokenList, vocab: &Vocabulary, scheme: WeightingScheme) -> SparseVector<F> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for t in tokens.iter() {
        if let Some(i) = vocab.index_of(t) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let pairs = counts.into_iter().map(|(i, tf)| {
        let w = match scheme {
            WeightingScheme::Binary => F::one(),
            WeightingScheme::Tf => F::from_count(tf),
            WeightingScheme::TfIdf => F::from_count(tf) * vocab.idf::<F>(i),
        };
        (i, w)
    });
    SparseVector::from_pairs(pairs)
}

/// Scale to unit Euclidean norm; the zero vector is returned unchanged.
pub fn l2_normalize<F: Scalar>(v: &SparseVector<F>) -> SparseVector<F> {
    let norm = v.l2_norm();
    if norm == F::zero() {
        return v.clone();
    }
    SparseVector {
        indices: v.indices.clone(),
        values: v.values.iter().map(|&x| x / norm).collect(),
    }
}

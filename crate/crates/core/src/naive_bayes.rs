//! Multinomial naive Bayes with additive (Laplace) smoothing.
//!
//! The model keeps its raw sufficient statistics next to the derived log
//! tables, so it can keep learning one document at a time: folding
//! [`MultinomialNb::update`] over a corpus starting from
//! [`MultinomialNb::empty`] produces exactly the same model as
//! [`MultinomialNb::train`].

use thiserror::Error;

use crate::distribution::ClassDistribution;
use crate::features::SparseVector;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum NbError {
    #[error("smoothing alpha must be positive and finite")]
    InvalidAlpha,
    #[error("training data must contain both classes (got counts {0:?})")]
    SingleClass([u64; 2]),
    #[error("unknown class label {0}; expected 0 or 1")]
    UnknownLabel(usize),
    #[error("feature index {index} is outside the vocabulary of {vocab_size} terms")]
    IndexOutOfRange { index: usize, vocab_size: usize },
    #[error("naive Bayes needs non-negative finite feature weights, got {0}")]
    InvalidWeight(f64),
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("inconsistent model parameters: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialNb<F> {
    alpha: F,
    vocab_size: usize,
    doc_counts: [u64; 2],
    term_counts: [Vec<F>; 2],
    mass: [F; 2],
    log_priors: [F; 2],
    log_likelihoods: [Vec<F>; 2],
}

impl<F: Scalar> MultinomialNb<F> {
    /// A model that has seen no documents: uniform priors and uniform
    /// conditionals.
    pub fn empty(vocab_size: usize, alpha: F) -> Result<Self, NbError> {
        if !(alpha > F::zero() && alpha.is_finite()) {
            return Err(NbError::InvalidAlpha);
        }
        let mut model = Self {
            alpha,
            vocab_size,
            doc_counts: [0, 0],
            term_counts: [vec![F::zero(); vocab_size], vec![F::zero(); vocab_size]],
            mass: [F::zero(); 2],
            log_priors: [F::zero(); 2],
            log_likelihoods: [Vec::new(), Vec::new()],
        };
        model.refresh();
        Ok(model)
    }

    /// Batch training. `vectors` should carry term-frequency weights.
    pub fn train(vectors: &[SparseVector<F>], labels: &[usize], vocab_size: usize, alpha: F) -> Result<Self, NbError> {
        if vectors.len() != labels.len() {
            return Err(NbError::LengthMismatch {
                vectors: vectors.len(),
                labels: labels.len(),
            });
        }
        let mut model = Self::empty(vocab_size, alpha)?;
        for (v, &label) in vectors.iter().zip(labels) {
            model.accumulate(v, label)?;
        }
        if model.doc_counts.contains(&0) {
            return Err(NbError::SingleClass(model.doc_counts));
        }
        model.refresh();
        Ok(model)
    }

    /// Rebuild a model from persisted sufficient statistics.
    pub fn from_counts(alpha: F, doc_counts: [u64; 2], term_counts: [Vec<F>; 2], mass: [F; 2]) -> Result<Self, NbError> {
        let vocab_size = term_counts[0].len();
        if term_counts[1].len() != vocab_size {
            return Err(NbError::Inconsistent("per-class term tables differ in length".into()));
        }
        if term_counts
            .iter()
            .flatten()
            .chain(mass.iter())
            .any(|c| !(c.is_finite() && *c >= F::zero()))
        {
            return Err(NbError::Inconsistent("negative or non-finite count".into()));
        }
        let mut model = Self::empty(vocab_size, alpha)?;
        model.doc_counts = doc_counts;
        model.term_counts = term_counts;
        model.mass = mass;
        model.refresh();
        Ok(model)
    }

    /// Add one labeled document and recompute the derived tables.
    pub fn update(&mut self, vector: &SparseVector<F>, label: usize) -> Result<(), NbError> {
        self.accumulate(vector, label)?;
        self.refresh();
        Ok(())
    }

    fn accumulate(&mut self, vector: &SparseVector<F>, label: usize) -> Result<(), NbError> {
        if label > 1 {
            return Err(NbError::UnknownLabel(label));
        }
        for (i, w) in vector.iter() {
            if i >= self.vocab_size {
                return Err(NbError::IndexOutOfRange {
                    index: i,
                    vocab_size: self.vocab_size,
                });
            }
            if !(w.is_finite() && w >= F::zero()) {
                return Err(NbError::InvalidWeight(w.to_f64_lossy()));
            }
        }
        self.doc_counts[label] += 1;
        for (i, w) in vector.iter() {
            self.term_counts[label][i] += w;
            self.mass[label] += w;
        }
        Ok(())
    }

    fn refresh(&mut self) {
        let n = self.doc_counts[0] + self.doc_counts[1];
        self.log_priors = if n == 0 {
            [F::lit(0.5).ln(); 2]
        } else {
            self.doc_counts.map(|c| (F::from_count(c) / F::from_count(n)).ln())
        };
        let v = F::from_count(self.vocab_size as u64);
        for c in 0..2 {
            let denom = self.mass[c] + self.alpha * v;
            self.log_likelihoods[c] = self.term_counts[c]
                .iter()
                .map(|&count| ((count + self.alpha) / denom).ln())
                .collect();
        }
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn doc_counts(&self) -> [u64; 2] {
        self.doc_counts
    }

    pub fn term_counts(&self, class: usize) -> &[F] {
        &self.term_counts[class]
    }

    pub fn mass(&self) -> [F; 2] {
        self.mass
    }

    pub fn log_priors(&self) -> [F; 2] {
        self.log_priors
    }

    pub fn log_likelihood(&self, class: usize, term: usize) -> F {
        self.log_likelihoods[class][term]
    }

    pub fn priors(&self) -> ClassDistribution<F> {
        ClassDistribution::from_log_scores(self.log_priors)
    }

    /// Joint log-scores `log P(c) + sum_t tf(t) log P(t|c)`. Indices outside
    /// the vocabulary are ignored.
    pub fn log_scores(&self, vector: &SparseVector<F>) -> [F; 2] {
        let mut scores = self.log_priors;
        for (c, score) in scores.iter_mut().enumerate() {
            for (i, tf) in vector.iter() {
                if let Some(&ll) = self.log_likelihoods[c].get(i) {
                    *score += tf * ll;
                }
            }
        }
        scores
    }

    /// Normalized log-posteriors.
    pub fn log_posteriors(&self, vector: &SparseVector<F>) -> [F; 2] {
        let s = self.log_scores(vector);
        let lse = crate::scalar::log_sum_exp(s[0], s[1]);
        s.map(|x| x - lse)
    }

    /// `log P(0 | x) - log P(1 | x)`, accumulated term by term so that huge
    /// counts on class-neutral terms cancel exactly.
    pub fn log_odds(&self, vector: &SparseVector<F>) -> F {
        let mut odds = self.log_priors[0] - self.log_priors[1];
        for (i, tf) in vector.iter() {
            if let (Some(&a), Some(&b)) = (self.log_likelihoods[0].get(i), self.log_likelihoods[1].get(i)) {
                odds += tf * (a - b);
            }
        }
        odds
    }

    pub fn predict(&self, vector: &SparseVector<F>) -> ClassDistribution<F> {
        ClassDistribution::from_log_odds(self.log_odds(vector))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // vocabulary order: buy, pills, now, meet
    fn toy() -> (Vec<SparseVector<f64>>, Vec<usize>) {
        let docs = vec![
            SparseVector::from_pairs([(0, 1.0), (1, 1.0)]),
            SparseVector::from_pairs([(0, 1.0), (2, 1.0)]),
            SparseVector::from_pairs([(3, 1.0), (2, 1.0)]),
        ];
        (docs, vec![0, 0, 1])
    }

    #[test]
    fn hand_computed_smoothed_counts() {
        let (x, y) = toy();
        let m = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        let p = |c, t| m.log_likelihood(c, t).exp();
        assert!((p(0, 0) - 3.0 / 8.0).abs() < 1e-15);
        assert!((p(0, 3) - 1.0 / 8.0).abs() < 1e-15);
        assert!((p(1, 2) - 2.0 / 6.0).abs() < 1e-15);
        assert!((m.log_priors()[0].exp() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn buy_now_posterior() {
        let (x, y) = toy();
        let m = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        let d = m.predict(&SparseVector::from_pairs([(0, 1.0), (2, 1.0)]));
        let expected = 0.0625 / (0.0625 + 1.0 / 54.0);
        assert!((d.prob(0) - expected).abs() < 1e-12);
        assert!((d.prob(0) - 0.7714).abs() < 1e-4);
    }

    #[test]
    fn empty_vector_returns_priors() {
        let (x, y) = toy();
        let m = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        let d = m.predict(&SparseVector::new());
        assert!((d.prob(0) - 2.0 / 3.0).abs() < 1e-12 && (d.prob(1) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_empty_documents_give_uniform_conditionals() {
        let x: Vec<SparseVector<f64>> = vec![SparseVector::new(), SparseVector::new()];
        let m = MultinomialNb::train(&x, &[0, 1], 5, 1.0).unwrap();
        for c in 0..2 {
            for t in 0..5 {
                assert!((m.log_likelihood(c, t).exp() - 0.2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mirrored_corpus_is_balanced() {
        let x: Vec<SparseVector<f64>> = vec![
            SparseVector::from_pairs([(0, 1.0), (1, 2.0)]),
            SparseVector::from_pairs([(0, 1.0), (2, 2.0)]),
        ];
        let m = MultinomialNb::train(&x, &[0, 1], 3, 1.0).unwrap();
        let d = m.predict(&SparseVector::from_pairs([(1, 1.0), (2, 1.0)]));
        assert!((d.prob(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn doubling_documents() {
        let (x, y) = toy();
        let doubled_x: Vec<_> = x.iter().chain(x.iter()).cloned().collect();
        let doubled_y: Vec<_> = y.iter().chain(y.iter()).copied().collect();
        // With alpha -> 0 the conditionals are pure ratios and do not change.
        let alpha = 1e-12;
        let a = MultinomialNb::train(&x, &y, 4, alpha).unwrap();
        let b = MultinomialNb::train(&doubled_x, &doubled_y, 4, alpha).unwrap();
        for c in 0..2 {
            for t in 0..4 {
                assert!((a.log_likelihood(c, t).exp() - b.log_likelihood(c, t).exp()).abs() < 1e-9);
            }
        }
        assert_eq!(a.log_priors(), b.log_priors());
        // With alpha = 1 the smoothing mass is diluted: P(meet|spam) = 1/12 instead of 1/8.
        let b = MultinomialNb::train(&doubled_x, &doubled_y, 4, 1.0).unwrap();
        assert!((b.log_likelihood(0, 3).exp() - 1.0 / 12.0).abs() < 1e-15);
        assert!((b.log_likelihood(0, 0).exp() - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn fold_of_updates_equals_batch() {
        let (x, y) = toy();
        let batch = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        let mut inc = MultinomialNb::empty(4, 1.0).unwrap();
        for (v, &l) in x.iter().zip(&y) {
            inc.update(v, l).unwrap();
        }
        assert_eq!(inc, batch);
    }

    #[test]
    fn empty_document_update_only_moves_doc_count() {
        let (x, y) = toy();
        let mut m = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        let before = m.clone();
        m.update(&SparseVector::new(), 1).unwrap();
        assert_eq!(m.doc_counts(), [2, 2]);
        assert_eq!(m.term_counts(1), before.term_counts(1));
        assert_eq!(m.mass(), before.mass());
    }

    #[test]
    fn errors() {
        let (x, y) = toy();
        assert_eq!(MultinomialNb::train(&x, &y, 4, 0.0).unwrap_err(), NbError::InvalidAlpha);
        assert_eq!(
            MultinomialNb::train(&x, &[0, 0, 0], 4, 1.0).unwrap_err(),
            NbError::SingleClass([3, 0])
        );
        let mut m = MultinomialNb::train(&x, &y, 4, 1.0).unwrap();
        assert_eq!(m.update(&x[0], 2).unwrap_err(), NbError::UnknownLabel(2));
        assert!(matches!(
            m.update(&SparseVector::from_pairs([(9, 1.0)]), 0),
            Err(NbError::IndexOutOfRange { index: 9, .. })
        ));
        assert!(matches!(
            m.update(&SparseVector::from_pairs([(1, -1.0)]), 0),
            Err(NbError::InvalidWeight(_))
        ));
    }

    #[test]
    fn single_precision_instantiation() {
        let x: Vec<SparseVector<f32>> = vec![
            SparseVector::from_pairs([(0, 1.0), (1, 1.0)]),
            SparseVector::from_pairs([(0, 1.0), (2, 1.0)]),
            SparseVector::from_pairs([(3, 1.0), (2, 1.0)]),
        ];
        let m = MultinomialNb::train(&x, &[0, 0, 1], 4, 1.0f32).unwrap();
        let d = m.predict(&SparseVector::from_pairs([(0, 1.0), (2, 1.0)]));
        assert!((d.prob(0) - 0.771_428_6).abs() < 1e-5);
    }

    fn corpus(max_v: usize) -> impl Strategy<Value = (Vec<SparseVector<f64>>, Vec<usize>)> {
        proptest::collection::vec((proptest::collection::vec((0..max_v, 1u32..5), 0..8), 0usize..2), 2..200).prop_map(|rows| {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (i, (pairs, label)) in rows.into_iter().enumerate() {
                x.push(SparseVector::from_pairs(pairs.into_iter().map(|(t, c)| (t, c as f64))));
                // first two rows pin both classes
                y.push(if i < 2 { i } else { label });
            }
            (x, y)
        })
    }

    proptest! {
        #[test]
        fn batch_and_incremental_predict_identically((x, y) in corpus(20), probe in proptest::collection::vec((0usize..20, 1u32..4), 0..6)) {
            let batch = MultinomialNb::train(&x, &y, 20, 1.0).unwrap();
            let mut inc = MultinomialNb::empty(20, 1.0).unwrap();
            for (v, &l) in x.iter().zip(&y) {
                inc.update(v, l).unwrap();
            }
            let probe = SparseVector::from_pairs(probe.into_iter().map(|(t, c)| (t, c as f64)));
            prop_assert_eq!(batch.predict(&probe), inc.predict(&probe));
            for v in &x {
                prop_assert_eq!(batch.predict(v), inc.predict(v));
            }
        }

        #[test]
        fn tables_are_normalized((x, y) in corpus(15), alpha in 0.01f64..3.0) {
            let m = MultinomialNb::train(&x, &y, 15, alpha).unwrap();
            let p = m.log_priors();
            prop_assert!((p[0].exp() + p[1].exp() - 1.0).abs() < 1e-12);
            for c in 0..2 {
                let s: f64 = (0..15).map(|t| m.log_likelihood(c, t).exp()).sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn posteriors_normalized_even_for_huge_counts((x, y) in corpus(10), t in 0usize..10, tf in 1.0f64..1e12) {
            let m = MultinomialNb::train(&x, &y, 10, 1.0).unwrap();
            let v = SparseVector::from_pairs([(t, tf), ((t + 1) % 10, 3.0)]);
            let d = m.predict(&v);
            prop_assert!(d.probs().iter().all(|p| p.is_finite() && *p >= 0.0 && *p <= 1.0));
            prop_assert!((d.sum() - 1.0).abs() < 1e-9);
            prop_assert!(m.log_posteriors(&v).iter().all(|l| l.is_finite()));
        }

        #[test]
        fn extra_occurrence_favors_its_class((x, y) in corpus(10), t in 0usize..10, base in proptest::collection::vec((0usize..10, 1u32..4), 0..6)) {
            let m = MultinomialNb::train(&x, &y, 10, 1.0).unwrap();
            let v = SparseVector::from_pairs(base.iter().map(|&(i, c)| (i, c as f64)));
            let w = SparseVector::from_pairs(base.iter().map(|&(i, c)| (i, c as f64)).chain([(t, 1.0)]));
            let winner = if m.log_likelihood(0, t) >= m.log_likelihood(1, t) { 0 } else { 1 };
            prop_assert!(m.predict(&w).prob(winner) >= m.predict(&v).prob(winner) - 1e-12);
        }

        #[test]
        fn label_swap_swaps_output((x, y) in corpus(12), probe in proptest::collection::vec((0usize..12, 1u32..4), 0..6)) {
            let a = MultinomialNb::train(&x, &y, 12, 1.0).unwrap();
            let flipped: Vec<usize> = y.iter().map(|l| 1 - l).collect();
            let b = MultinomialNb::train(&x, &flipped, 12, 1.0).unwrap();
            let probe = SparseVector::from_pairs(probe.into_iter().map(|(t, c)| (t, c as f64)));
            prop_assert_eq!(a.predict(&probe).swapped(), b.predict(&probe));
        }
    }
}

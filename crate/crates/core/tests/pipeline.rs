use std::sync::OnceLock;

use hybridtext::corpus::{read_csv, stratified_split};
use hybridtext::pipeline::{train_suite, Classifier, PriorSource, TrainedSuite};
use hybridtext::synthetic::{generate, SyntheticSpec};
use hybridtext::{Config, CsvSchema, Dataset, FusionPolicy, ModelKind, SplitSpec};
use proptest::prelude::*;

fn corpus() -> &'static (Dataset, Dataset) {
    static DATA: OnceLock<(Dataset, Dataset)> = OnceLock::new();
    DATA.get_or_init(|| {
        let data = generate(&SyntheticSpec::default()).unwrap();
        stratified_split(&data, &SplitSpec::new(0.2, 1)).unwrap()
    })
}

fn suite(policy: Option<FusionPolicy<f64>>) -> TrainedSuite<f64> {
    let cfg = Config {
        seed: 1,
        fusion: policy,
        ..Config::default()
    };
    train_suite(&corpus().0, &cfg).unwrap()
}

fn learned() -> &'static TrainedSuite<f64> {
    static SUITE: OnceLock<TrainedSuite<f64>> = OnceLock::new();
    SUITE.get_or_init(|| suite(None))
}

#[test]
fn csv_roundtrip_preserves_the_dataset() {
    let (train, _) = corpus();
    let mut buf = Vec::new();
    train.write_csv(&mut buf, &CsvSchema::default()).unwrap();
    let back = read_csv(buf.as_slice(), &CsvSchema::default()).unwrap();
    assert_eq!(back.texts().collect::<Vec<_>>(), train.texts().collect::<Vec<_>>());
    assert_eq!(back.label_indices(), train.label_indices());
}

#[test]
fn training_is_deterministic() {
    assert_eq!(&suite(None), learned());
}

#[test]
fn svm_only_weights_follow_svm_argmax() {
    let s = suite(Some(FusionPolicy::soft_vote(0.0, 1.0).unwrap()));
    for doc in corpus().0.documents().iter().chain(corpus().1.documents()) {
        assert_eq!(
            s.hybrid.predict_text(&doc.text).label(),
            s.svm.predict_text(&doc.text).label()
        );
    }
}

#[test]
fn nb_only_weights_reproduce_nb() {
    let s = suite(Some(FusionPolicy::soft_vote(1.0, 0.0).unwrap()));
    for doc in corpus().1.documents() {
        let h = s.hybrid.predict_text(&doc.text).distribution;
        let n = s.nb.predict_text(&doc.text).distribution;
        assert!((h.prob(0) - n.prob(0)).abs() <= 1e-12 && (h.prob(1) - n.prob(1)).abs() <= 1e-12);
    }
}

#[test]
fn hybrid_tracks_the_better_member_on_the_bundled_corpus() {
    let test = &corpus().1;
    let acc = |k: ModelKind| learned().get(k).evaluate(test, PriorSource::Train).unwrap().accuracy_pct;
    let best = acc(ModelKind::Nb).max(acc(ModelKind::Svm));
    assert!(acc(ModelKind::Hybrid) >= best - 2.0);
}

#[test]
fn empty_text_uses_priors_and_bias() {
    let s = learned();
    let nb = s.nb.predict_text("").distribution;
    let counts = s.nb.train_class_counts();
    let p0 = counts[0] as f64 / (counts[0] + counts[1]) as f64;
    assert!((nb.prob(0) - p0).abs() < 1e-12);
    let Classifier::Svm(svm) = s.svm.classifier() else {
        unreachable!()
    };
    let cal = svm.calibration().unwrap();
    assert_eq!(s.svm.predict_text("").distribution.prob(0), cal.probability(svm.bias()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_prediction_is_normalized(words in proptest::collection::vec("[a-z]{1,9}", 0..40)) {
        let text = words.join(" ");
        for kind in ModelKind::ALL {
            let p = learned().get(kind).predict_text(&text);
            for d in [Some(p.distribution), p.nb, p.svm].into_iter().flatten() {
                prop_assert!((d.sum() - 1.0).abs() <= 1e-9);
                prop_assert!(d.probs().iter().all(|x| (0.0..=1.0).contains(x)));
            }
        }
    }

    #[test]
    fn members_are_the_standalone_models(picks in proptest::collection::vec(0usize..120, 1..10)) {
        let docs = corpus().1.documents();
        let text: Vec<&str> = picks.iter().map(|&i| docs[i].text.as_str()).collect();
        let text = text.join(" ");
        let s = learned();
        let h = s.hybrid.predict_text(&text);
        prop_assert_eq!(h.nb, Some(s.nb.predict_text(&text).distribution));
        prop_assert_eq!(h.svm, Some(s.svm.predict_text(&text).distribution));
    }
}

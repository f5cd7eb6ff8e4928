//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hybridtext::eval::{
    accuracy, error_metrics, info_metrics, kappa, per_class_stats, roc_auc, ConfusionMatrix, PredictionRecord, PriorModel,
};
use hybridtext::hybrid::fuse;
use hybridtext::pipeline::{train_model, Classifier};
use hybridtext::synthetic::{generate, SyntheticSpec};
use hybridtext::{ClassDistribution, Config, FusionPolicy, LinearSvm, ModelKind, MultinomialNb, SparseVector, SvmParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BLOCK_TOL: f64 = 5e-4;
const ORDER0_TOL: f64 = 0.01;
const ORDER0_PER_INSTANCE_TOL: f64 = 1e-4;
const SF_TOL: f64 = 1e-3;
const SUM_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-12;
const RANDOM_AUC_TOL: f64 = 0.05;
const GOLDEN_ROW_TOL: f64 = 1e-9;
const HYBRID_MARGIN_PCT: f64 = 2.0;
const NB_BUDGET: Duration = Duration::from_secs(1);
const COMPARE_BUDGET: Duration = Duration::from_secs(10);

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, expected {want} +/- {tol}")
    })
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn binary(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hybridtext"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn nb_block() -> Check {
    let start = Instant::now();
    let cm = ConfusionMatrix::from_counts([[714, 664], [241, 785]], ["IllegalMessages", "legalMessages"]);
    let acc = accuracy::<f64>(&cm).map_err(|e| e.to_string())?;
    let k = kappa::<f64>(&cm).map_err(|e| e.to_string())?;
    let (rows, w) = per_class_stats::<f64>(&cm).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    near("accuracy", acc, 62.3544, BLOCK_TOL)?;
    near("kappa", k, 0.2691, BLOCK_TOL)?;
    let r = &rows[0];
    for (what, got, want) in [
        ("tp rate", r.tp_rate, 0.518),
        ("fp rate", r.fp_rate, 0.235),
        ("precision", r.precision, 0.748),
        ("recall", r.recall, 0.518),
        ("f-measure", r.f_measure, 0.612),
        ("mcc", r.mcc, 0.286),
        ("weighted precision", w.precision, 0.660),
        ("weighted fp rate", w.fp_rate, 0.340),
    ] {
        near(what, got, want, BLOCK_TOL)?;
    }
    ensure(elapsed < NB_BUDGET, || format!("took {elapsed:?}"))?;

    let text = binary(&[
        "evaluate",
        "--model",
        path(&data("nb_golden_model.json")),
        "--input",
        path(&data("nb_golden_test.csv")),
        "--prior",
        "test",
    ])?;
    ensure(text.contains("62.3544 %") && text.contains("0.2691"), || {
        "CLI fixture report differs".into()
    })?;
    Ok(format!("accuracy {acc:.4} %, kappa {k:.4}, {elapsed:?}"))
}

fn svm_block() -> Check {
    let cm = ConfusionMatrix::from_counts([[1144, 234], [166, 860]], ["IllegalMessages", "legalMessages"]);
    let acc = accuracy::<f64>(&cm).map_err(|e| e.to_string())?;
    let k = kappa::<f64>(&cm).map_err(|e| e.to_string())?;
    let (rows, w) = per_class_stats::<f64>(&cm).map_err(|e| e.to_string())?;
    near("accuracy", acc, 83.3611, BLOCK_TOL)?;
    near("kappa", k, 0.6628, BLOCK_TOL)?;
    for (what, got, want) in [
        ("precision", rows[0].precision, 0.873),
        ("recall", rows[0].recall, 0.830),
        ("f-measure", rows[0].f_measure, 0.851),
        ("mcc", rows[0].mcc, 0.664),
        ("weighted precision", w.precision, 0.836),
    ] {
        near(what, got, want, BLOCK_TOL)?;
    }
    Ok(format!("accuracy {acc:.4} %, kappa {k:.4}"))
}

fn hybrid_block() -> Check {
    let cm = ConfusionMatrix::from_counts([[64, 10], [7, 444]], ["legalmessages", "illegalmessages"]);
    let acc = accuracy::<f64>(&cm).map_err(|e| e.to_string())?;
    let k = kappa::<f64>(&cm).map_err(|e| e.to_string())?;
    let (rows, _) = per_class_stats::<f64>(&cm).map_err(|e| e.to_string())?;
    near("accuracy", acc, 96.7619, BLOCK_TOL)?;
    near("kappa", k, 0.864, BLOCK_TOL)?;
    for (what, got, want) in [
        ("precision", rows[0].precision, 0.901),
        ("recall", rows[0].recall, 0.865),
        ("f-measure", rows[0].f_measure, 0.883),
        ("mcc", rows[0].mcc, 0.864),
    ] {
        near(what, got, want, BLOCK_TOL)?;
    }
    Ok(format!("accuracy {acc:.4} %, kappa {k:.4}"))
}

fn information() -> Check {
    let records: Vec<PredictionRecord<f64>> = (0..2404)
        .map(|i| PredictionRecord::new(usize::from(i >= 1378), ClassDistribution::from_first(0.5)))
        .collect();
    let prior = PriorModel::from_counts([1378, 1026]).map_err(|e| e.to_string())?;
    let m = info_metrics(&records, &prior).map_err(|e| e.to_string())?;
    near("order-0 bits", m.complexity_order0_bits, 2366.6915, ORDER0_TOL)?;
    near(
        "order-0 bits/instance",
        m.complexity_order0_bits_per_instance,
        0.9845,
        ORDER0_PER_INSTANCE_TOL,
    )?;
    near(
        "improvement",
        m.complexity_improvement_bits,
        m.complexity_order0_bits - m.complexity_scheme_bits,
        IDENTITY_TOL,
    )?;
    let sf = 2366.6915 - 16713.8529;
    near("Sf", sf, -14347.1614, SF_TOL)?;
    Ok(format!(
        "order-0 {:.4} bits, {:.4} bits/instance",
        m.complexity_order0_bits, m.complexity_order0_bits_per_instance
    ))
}

fn random_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> (Vec<SparseVector<f64>>, Vec<usize>) {
    let mut vectors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let pairs: Vec<(usize, f64)> = (0..6)
            .map(|_| {
                let shift = if rng.gen_bool(0.7) { label * dim / 2 } else { 0 };
                (rng.gen_range(0..dim / 2) + shift, f64::from(rng.gen_range(1..4u8)))
            })
            .collect();
        vectors.push(SparseVector::from_pairs(pairs));
        labels.push(label);
    }
    (vectors, labels)
}

fn properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dim = 40;
    let (vectors, labels) = random_vectors(&mut rng, 200, dim);

    let batch = MultinomialNb::train(&vectors, &labels, dim, 1.0).map_err(|e| e.to_string())?;
    let mut incremental = MultinomialNb::empty(dim, 1.0).map_err(|e| e.to_string())?;
    for (v, &y) in vectors.iter().zip(&labels) {
        incremental.update(v, y).map_err(|e| e.to_string())?;
    }
    ensure(batch == incremental, || "batch and incremental naive Bayes differ".into())?;

    let signs: Vec<i8> = labels.iter().map(|&y| hybridtext::svm::class_sign(y)).collect();
    let params = SvmParams {
        seed: 11,
        ..SvmParams::default()
    };
    let (mut svm, _) = LinearSvm::train(&vectors, &signs, dim, params).map_err(|e| e.to_string())?;
    let (again, _) = LinearSvm::train(&vectors, &signs, dim, params).map_err(|e| e.to_string())?;
    let bits = |s: &LinearSvm<f64>| {
        (
            s.weights().iter().map(|w| w.to_bits()).collect::<Vec<_>>(),
            s.bias().to_bits(),
        )
    };
    ensure(bits(&svm) == bits(&again), || {
        "SVM training is not bitwise reproducible".into()
    })?;
    svm.calibrate(&vectors, &signs).map_err(|e| e.to_string())?;

    let policies = [
        FusionPolicy::soft_vote(0.3, 0.7).map_err(|e| e.to_string())?,
        FusionPolicy::MaxConfidence,
        FusionPolicy::cascade(0.9).map_err(|e| e.to_string())?,
    ];
    let nb_only = FusionPolicy::soft_vote(1.0, 0.0).map_err(|e| e.to_string())?;
    let svm_only = FusionPolicy::soft_vote(0.0, 1.0).map_err(|e| e.to_string())?;
    for v in &vectors {
        let d_nb = batch.predict(v);
        let d_svm = svm.predict(v).map_err(|e| e.to_string())?;
        for p in &policies {
            let d = fuse(&d_nb, &d_svm, p).map_err(|e| e.to_string())?;
            for x in [d, d_nb, d_svm] {
                ensure((x.sum() - 1.0).abs() <= SUM_TOL, || {
                    format!("distribution sums to {}", x.sum())
                })?;
            }
        }
        let a = fuse(&d_nb, &d_svm, &nb_only).map_err(|e| e.to_string())?;
        let b = fuse(&d_nb, &d_svm, &svm_only).map_err(|e| e.to_string())?;
        for c in 0..2 {
            ensure((a.prob(c) - d_nb.prob(c)).abs() <= IDENTITY_TOL, || {
                "w_nb = 1 differs from naive Bayes".into()
            })?;
            ensure((b.prob(c) - d_svm.prob(c)).abs() <= IDENTITY_TOL, || {
                "w_svm = 1 differs from SVM".into()
            })?;
        }
    }

    let perfect: Vec<PredictionRecord<f64>> = (0..100)
        .map(|i| {
            PredictionRecord::new(
                i % 2,
                ClassDistribution::from_first(if i % 2 == 0 {
                    0.6 + i as f64 / 1000.0
                } else {
                    0.4 - i as f64 / 1000.0
                }),
            )
        })
        .collect();
    let auc_perfect = roc_auc(&perfect, 0).map_err(|e| e.to_string())?;
    ensure(auc_perfect == 1.0, || format!("perfect ranking AUC {auc_perfect}"))?;
    let random: Vec<PredictionRecord<f64>> = (0..1000)
        .map(|_| {
            PredictionRecord::new(
                usize::from(rng.gen_bool(0.5)),
                ClassDistribution::from_first(rng.gen::<f64>()),
            )
        })
        .collect();
    let auc_random = roc_auc(&random, 0).map_err(|e| e.to_string())?;
    near("random AUC", auc_random, 0.5, RANDOM_AUC_TOL)?;

    let counts = [
        random.iter().filter(|r| r.actual == 0).count() as u64,
        random.iter().filter(|r| r.actual == 1).count() as u64,
    ];
    let prior = PriorModel::from_counts(counts).map_err(|e| e.to_string())?;
    let zero_r: Vec<PredictionRecord<f64>> = random
        .iter()
        .map(|r| PredictionRecord::new(r.actual, ClassDistribution::new(prior.probs())))
        .collect();
    let e = error_metrics(&zero_r, &prior).map_err(|e| e.to_string())?;
    ensure(
        e.relative_absolute_error_pct == 100.0 && e.root_relative_squared_error_pct == 100.0,
        || {
            format!(
                "prior predictor RAE {} RRSE {}",
                e.relative_absolute_error_pct, e.root_relative_squared_error_pct
            )
        },
    )?;

    let cm = ConfusionMatrix::from_predictions(&random, ["a", "b"]).map_err(|e| e.to_string())?;
    let (_, w) = per_class_stats::<f64>(&cm).map_err(|e| e.to_string())?;
    let acc = accuracy::<f64>(&cm).map_err(|e| e.to_string())? / 100.0;
    near("weighted recall", w.recall, acc, IDENTITY_TOL)?;

    Ok(format!("random AUC {auc_random:.4}, {} vectors", vectors.len()))
}

fn end_to_end() -> Check {
    let (train, test) = (data("synthetic_train.csv"), data("synthetic_test.csv"));
    let start = Instant::now();
    let text = binary(&["compare", "--train", path(&train), "--test", path(&test), "--seed", "1"])?;
    let elapsed = start.elapsed();
    let json = binary(&[
        "compare",
        "--train",
        path(&train),
        "--test",
        path(&test),
        "--seed",
        "1",
        "--format",
        "json",
    ])?;
    ensure(elapsed < COMPARE_BUDGET, || format!("compare took {elapsed:?}"))?;
    let golden_text = std::fs::read_to_string(data("compare_golden.txt")).map_err(|e| e.to_string())?;
    ensure(text == golden_text, || "text report differs from the golden table".into())?;

    let got: Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let want: Value = serde_json::from_str(&std::fs::read_to_string(data("compare_golden.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let rows = got["rows"].as_array().ok_or("no rows")?;
    let golden = want["rows"].as_array().ok_or("no golden rows")?;
    ensure(rows.len() == 3 && golden.len() == 3, || "expected three rows".into())?;
    let mut test_acc = [0.0; 3];
    for (i, (g, w)) in rows.iter().zip(golden).enumerate() {
        ensure(g["model"] == w["model"], || format!("row {i} model {}", g["model"]))?;
        for key in ["train_accuracy_pct", "train_kappa", "test_accuracy_pct", "test_kappa"] {
            let (a, b) = (g[key].as_f64().ok_or(key)?, w[key].as_f64().ok_or(key)?);
            near(key, a, b, GOLDEN_ROW_TOL)?;
        }
        test_acc[i] = g["test_accuracy_pct"].as_f64().unwrap();
    }
    let best = test_acc[0].max(test_acc[1]);
    ensure(test_acc[2] >= best - HYBRID_MARGIN_PCT, || {
        format!("hybrid {} vs best member {best}", test_acc[2])
    })?;
    Ok(format!(
        "NB {:.2} %, SVM {:.2} %, hybrid {:.2} % in {elapsed:?}",
        test_acc[0], test_acc[1], test_acc[2]
    ))
}

fn robustness() -> Check {
    let data = generate(&SyntheticSpec::default()).map_err(|e| e.to_string())?;
    let (model, _) = train_model::<f64>(&data, &Config::default(), ModelKind::Hybrid).map_err(|e| e.to_string())?;
    let words = ["idiot", "thanks", "news", "scam", "great"];
    let text: Vec<&str> = (0..10_000).map(|i| words[i % 7 % 5]).collect();
    let p = model.predict_text(&text.join(" "));
    for d in [Some(p.distribution), p.nb, p.svm].into_iter().flatten() {
        ensure(d.probs().iter().all(|x| x.is_finite()), || {
            "non-finite prediction on a long document".into()
        })?;
    }
    let Classifier::Hybrid(h) = model.classifier() else {
        return Err("expected a hybrid model".into());
    };
    let nb = h.nb();
    let prior = PriorModel::from_counts([1, 1]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for tf in [1e4, 1e12, 1e100, 1e300] {
        let v = SparseVector::from_pairs([(0, tf), (1, 3.0), (nb.vocab_size() - 1, tf)]);
        ensure(nb.log_posteriors(&v).iter().all(|l| l.is_finite()), || {
            format!("log-posterior at tf {tf}")
        })?;
        let d = nb.predict(&v);
        let m = info_metrics(&[PredictionRecord::new(1 - d.argmax(), d)], &prior).map_err(|e| e.to_string())?;
        ensure(
            m.complexity_scheme_bits.is_finite() && m.kb_info_bits.is_finite() && m.kb_relative_info_pct.is_finite(),
            || format!("information metrics at tf {tf}"),
        )?;
        worst = worst.max(m.complexity_scheme_bits);
    }
    Ok(format!("largest clamped scheme cost {worst:.1} bits"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("naive Bayes golden block", nb_block),
        ("SVM golden block", svm_block),
        ("hybrid golden block", hybrid_block),
        ("information metrics", information),
        ("property suite", properties),
        ("end-to-end compare", end_to_end),
        ("numerical robustness", robustness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

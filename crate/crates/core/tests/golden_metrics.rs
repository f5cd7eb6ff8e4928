use hybridtext::eval::{accuracy, kappa, per_class_stats, ConfusionMatrix, PriorModel};
use hybridtext::eval::{info_metrics, PredictionRecord};
use hybridtext::ClassDistribution;

const TOL: f64 = 5e-4;

fn close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} +/- {tol}"
    );
}

#[test]
fn naive_bayes_block() {
    let cm = ConfusionMatrix::from_counts([[714, 664], [241, 785]], ["IllegalMessages", "legalMessages"]);
    close(accuracy::<f64>(&cm).unwrap(), 62.3544, TOL, "accuracy");
    close(kappa::<f64>(&cm).unwrap(), 0.2691, TOL, "kappa");
    let (rows, w) = per_class_stats::<f64>(&cm).unwrap();
    let r = &rows[0];
    close(r.tp_rate, 0.518, TOL, "tp rate");
    close(r.fp_rate, 0.235, TOL, "fp rate");
    close(r.precision, 0.748, TOL, "precision");
    close(r.recall, 0.518, TOL, "recall");
    close(r.f_measure, 0.612, TOL, "f-measure");
    close(r.mcc, 0.286, TOL, "mcc");
    close(w.precision, 0.660, TOL, "weighted precision");
    close(w.fp_rate, 0.340, TOL, "weighted fp rate");
}

#[test]
fn svm_block() {
    let cm = ConfusionMatrix::from_counts([[1144, 234], [166, 860]], ["IllegalMessages", "legalMessages"]);
    close(accuracy::<f64>(&cm).unwrap(), 83.3611, TOL, "accuracy");
    close(kappa::<f64>(&cm).unwrap(), 0.6628, TOL, "kappa");
    let (rows, w) = per_class_stats::<f64>(&cm).unwrap();
    close(rows[0].precision, 0.873, TOL, "precision");
    close(rows[0].recall, 0.830, TOL, "recall");
    close(rows[0].f_measure, 0.851, TOL, "f-measure");
    close(rows[0].mcc, 0.664, TOL, "mcc");
    close(w.precision, 0.836, TOL, "weighted precision");
}

#[test]
fn hybrid_block() {
    let cm = ConfusionMatrix::from_counts([[64, 10], [7, 444]], ["legalmessages", "illegalmessages"]);
    close(accuracy::<f64>(&cm).unwrap(), 96.7619, TOL, "accuracy");
    close(kappa::<f64>(&cm).unwrap(), 0.864, TOL, "kappa");
    let (rows, _) = per_class_stats::<f64>(&cm).unwrap();
    close(rows[0].precision, 0.901, TOL, "precision");
    close(rows[0].recall, 0.865, TOL, "recall");
    close(rows[0].f_measure, 0.883, TOL, "f-measure");
    close(rows[0].mcc, 0.864, TOL, "mcc");
}

#[test]
fn mcc_is_symmetric_across_classes() {
    for counts in [[[714, 664], [241, 785]], [[1144, 234], [166, 860]], [[64, 10], [7, 444]]] {
        let (rows, w) = per_class_stats::<f64>(&ConfusionMatrix::from_counts(counts, ["a", "b"])).unwrap();
        assert_eq!(rows[0].mcc, rows[1].mcc);
        assert_eq!(w.mcc, rows[0].mcc);
    }
}

#[test]
fn order0_complexity_from_class_counts() {
    let records: Vec<PredictionRecord<f64>> = (0..2404)
        .map(|i| PredictionRecord::new(usize::from(i >= 1378), ClassDistribution::from_first(0.5)))
        .collect();
    let prior = PriorModel::from_counts([1378, 1026]).unwrap();
    let m = info_metrics(&records, &prior).unwrap();
    close(m.complexity_order0_bits, 2366.6915, 0.01, "order-0 bits");
    close(m.complexity_order0_bits_per_instance, 0.9845, 1e-4, "order-0 bits/instance");
    assert!((m.complexity_improvement_bits - (m.complexity_order0_bits - m.complexity_scheme_bits)).abs() < 1e-9);
    close(2366.6915 - 16713.8529, -14347.1614, 1e-3, "Sf");
}

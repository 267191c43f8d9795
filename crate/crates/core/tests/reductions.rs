use perminv::inverter::{
    run_experiment, EvalMode, FullTableInverter, InverterKind, ScanDecisionInverter,
};
use perminv::oracle::OraclePath;
use perminv::reduce::{
    measure_distributional_error, search_from_decision, unique_search_from_adpi,
    UniqueSearchInstance,
};
use perminv::inverter::Inverter;

#[test]
fn perfect_decision_inverter_gives_exact_search() {
    for path in [OraclePath::Functional, OraclePath::Circuit] {
        let dpi = FullTableInverter { kind: InverterKind::Decision };
        let inv = search_from_decision(dpi, 1).unwrap().with_path(path);
        let res = run_experiment(&inv, 3, &EvalMode::Sampled { trials: 64, seed: 3 }).unwrap();
        assert_eq!(res.success_probability, 1.0);
        assert_eq!(inv.resources(3).advice_qubits, 3 * 8);
    }
}

#[test]
fn unique_search_error_pair_for_a_perfect_adpi() {
    let adpi = ScanDecisionInverter { adaptive_bits: 0 };
    let n = 4;
    let yes: Vec<_> = (0..8).map(|j| UniqueSearchInstance::new(3, Some(j)).unwrap()).collect();
    let no = vec![UniqueSearchInstance::new(3, None).unwrap()];
    let mut max_f = 0;
    let err = measure_distributional_error(
        |inst, seed| {
            let run = unique_search_from_adpi(&adpi, n, inst, seed, OraclePath::Functional)?;
            max_f = max_f.max(run.f_queries);
            Ok(run.answer)
        },
        &yes,
        &no,
        4000,
        17,
    )
    .unwrap();
    assert_eq!(err.p0, 0.0);
    assert!((err.p1 - 0.5).abs() < 4.0 * (0.25f64 / 4000.0).sqrt());
    assert!(max_f <= 2 * adpi.resources(n).queries);
}

#[test]
fn instance_rejects_out_of_range_marks() {
    assert!(UniqueSearchInstance::new(3, Some(8)).is_err());
}

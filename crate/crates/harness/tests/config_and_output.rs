use perminv_harness::output::plot_data_bytes;
use perminv_harness::{run_experiment, ExperimentConfig, HarnessError, ResultRow};

fn grover_config() -> ExperimentConfig {
    ExperimentConfig::from_json(r#"{"experiment": "grover_sweep", "seed": 3, "n_bits": 4, "params": {"k_max": 3}}"#)
        .unwrap()
}

fn config_error(text: &str) -> String {
    match ExperimentConfig::from_json(text).and_then(|c| perminv_harness::registry::validate(&c).map(|_| c)) {
        Err(HarnessError::Config(msg)) => msg,
        other => panic!("expected a config error for {text}, got {other:?}"),
    }
}

#[test]
fn grover_sweep_at_n4_has_four_rows_matching_the_closed_form() {
    let rows = run_experiment(&grover_config()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let k = r.measured["k"];
        let want = ((2.0 * k + 1.0) * 0.25f64.asin()).sin().powi(2);
        assert!((r.measured["success"] - want).abs() < 1e-9);
        assert!(r.failed_checks().is_empty());
    }
}

#[test]
fn missing_seed_is_a_config_error() {
    let msg = config_error(r#"{"experiment": "grover_sweep", "n_bits": 4}"#);
    assert!(msg.contains("seed"), "{msg}");
}

#[test]
fn unknown_experiment_lists_the_known_names() {
    let msg = config_error(r#"{"experiment": "nope", "seed": 1, "n_bits": 4}"#);
    assert!(msg.contains("grover_sweep") && msg.contains("qrac_round_trip"), "{msg}");
}

#[test]
fn field_level_messages_name_the_field() {
    let msg = config_error(r#"{"experiment": "grover_sweep", "seed": 1, "n_bits": 0}"#);
    assert!(msg.starts_with("n_bits"), "{msg}");
    let msg = config_error(r#"{"experiment": "search_amplification", "seed": 1, "n_bits": 3, "params": {"epsilon": [0.2, 1.5]}}"#);
    assert!(msg.starts_with("params.epsilon[1]"), "{msg}");
    let msg = config_error(r#"{"experiment": "grover_sweep", "seed": 1, "n_bits": 3, "params": {"bogus": 1}}"#);
    assert!(msg.contains("bogus"), "{msg}");
    let msg = config_error(r#"{"experiment": "grover_sweep", "seed": 1, "n_bits": 3, "colour": 1}"#);
    assert!(msg.contains("colour"), "{msg}");
}

#[test]
fn empty_row_set_gives_a_header_only_csv() {
    let cols = vec!["k".to_string(), "success".to_string()];
    assert_eq!(plot_data_bytes(&[], &cols).unwrap(), b"k,success\n");
}

#[test]
fn three_rows_two_columns_is_four_lf_lines() {
    let rows: Vec<ResultRow> = run_experiment(&grover_config()).unwrap().into_iter().take(3).collect();
    let cols = vec!["k".to_string(), "measured.success".to_string()];
    let bytes = plot_data_bytes(&rows, &cols).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next(), Some("k,measured.success"));
}

#[test]
fn csv_values_round_trip_to_full_precision() {
    let rows = run_experiment(&grover_config()).unwrap();
    let cols = vec!["success".to_string()];
    let bytes = plot_data_bytes(&rows, &cols).unwrap();
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    for (rec, row) in reader.records().zip(&rows) {
        let v: f64 = rec.unwrap()[0].parse().unwrap();
        assert_eq!(v.to_bits(), row.measured["success"].to_bits());
    }
}

#[test]
fn missing_column_lists_available_columns() {
    let rows = run_experiment(&grover_config()).unwrap();
    match plot_data_bytes(&rows, &["nope".to_string()]) {
        Err(HarnessError::Config(msg)) => assert!(msg.contains("measured.success"), "{msg}"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn same_config_twice_gives_identical_csv() {
    let cols = vec!["k".to_string(), "success".to_string(), "closed_form".to_string()];
    let a = plot_data_bytes(&run_experiment(&grover_config()).unwrap(), &cols).unwrap();
    let b = plot_data_bytes(&run_experiment(&grover_config()).unwrap(), &cols).unwrap();
    assert_eq!(a, b);
}

#[test]
fn every_probability_lies_in_the_unit_interval() {
    for r in perminv_harness::selftest::run_selftest(5).unwrap() {
        for (k, ok) in &r.checks {
            if k.ends_with("_in_unit_interval") {
                assert!(ok, "{} row {}: {k}", r.experiment, r.row);
            }
        }
        for b in r.bounds.values() {
            assert!(!b.formula.is_empty());
        }
    }
}

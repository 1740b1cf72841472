use macrolab::maxent::{fit_maxent, CanonicalState, FitOptions, ObservableSet};
use macrolab::operator::{DensityMatrix, HermitianOperator, RandomSuite};

#[test]
fn operator_document_layout() {
    let doc = HermitianOperator::pauli_y().to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["dim"], 2);
    assert_eq!(v["re"], serde_json::json!([[0.0, 0.0], [0.0, 0.0]]));
    assert_eq!(v["im"], serde_json::json!([[0.0, -1.0], [1.0, 0.0]]));
}

#[test]
fn density_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let rho = RandomSuite::new(1).density(0, 3);
    let path = dir.path().join("rho.json");
    std::fs::write(&path, rho.to_json().unwrap()).unwrap();
    let back = DensityMatrix::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, rho);
}

#[test]
fn non_state_rejected_as_density() {
    let doc = HermitianOperator::pauli_z().to_json().unwrap();
    assert!(DensityMatrix::from_json(&doc).is_err());
}

#[test]
fn canonical_state_round_trip() {
    let obs = RandomSuite::new(2).observables(0, 3, 2).unwrap();
    let state = fit_maxent(&obs, &[0.1, -0.2], FitOptions::default()).unwrap();
    let doc = state.to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert!(v.get("logZ").is_some());
    let back = CanonicalState::from_json(&doc).unwrap();
    assert_eq!(back.lambda(), state.lambda());
    assert!(back.mu().as_operator().max_abs_diff(state.mu().as_operator()) < 1e-12);

    let set = ObservableSet::from_json(&obs.to_json().unwrap()).unwrap();
    assert_eq!(set, obs);
}

use slowlight::io::load_field;
use slowlight::scenarios::{
    check_suite, EitTransitParams, GridSpec, LossCurveParams, VacuumDiffractionParams, VortexTransferParams,
};
use slowlight::{run_scenario, ScenarioKind, ScenarioParams, ScenarioSpec};

#[test]
fn every_default_scenario_passes() {
    let reports = check_suite(3).unwrap();
    assert_eq!(reports.len(), ScenarioKind::ALL.len());
    for r in &reports {
        let failures: Vec<_> = r.failures().collect();
        assert!(failures.is_empty(), "{}: {failures:?}", r.kind);
        assert!(!r.assertions.is_empty(), "{} has no assertions", r.kind);
    }
}

#[test]
fn reports_are_bit_identical_for_the_same_spec() {
    let spec = ScenarioSpec {
        params: ScenarioParams::LambdaStoreTripodRetrieve(VortexTransferParams {
            grid: GridSpec { n: 64, length: 80.0 },
            sigma_p: 5.0,
            random_instances: 20,
            ..Default::default()
        }),
        seed: 42,
    };
    let a = run_scenario(&spec).unwrap();
    let b = run_scenario(&spec).unwrap();
    assert_eq!(a.summary_csv(), b.summary_csv());
    assert_eq!(a.assertions_csv(), b.assertions_csv());
    for ((na, fa), (nb, fb)) in a.fields.iter().zip(&b.fields) {
        assert_eq!(na, nb);
        assert_eq!(fa, fb);
    }
}

#[test]
fn vortex_scenarios_report_expected_windings() {
    for (kind, expected) in [
        (ScenarioKind::LambdaStoreTripodRetrieve, 1.0),
        (ScenarioKind::TripodStoreLambdaRetrieve, -1.0),
    ] {
        let p = VortexTransferParams {
            grid: GridSpec { n: 128, length: 160.0 },
            random_instances: 0,
            ..Default::default()
        };
        let params = match kind {
            ScenarioKind::LambdaStoreTripodRetrieve => ScenarioParams::LambdaStoreTripodRetrieve(p),
            _ => ScenarioParams::TripodStoreLambdaRetrieve(p),
        };
        let report = run_scenario(&ScenarioSpec { params, seed: 0 }).unwrap();
        assert_eq!(report.summary_value("winding_out"), Some(expected));
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }
}

#[test]
fn written_field_dumps_load_back() {
    let spec = ScenarioSpec {
        params: ScenarioParams::VacuumDiffraction(VacuumDiffractionParams {
            grid: GridSpec { n: 64, length: 32.0 },
            ..Default::default()
        }),
        seed: 0,
    };
    let report = run_scenario(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    report.write_to(dir.path()).unwrap();
    let loaded = load_field(dir.path().join("fields/probe_out.tsl")).unwrap();
    assert_eq!(&loaded, &report.fields[1].1);
    let summary = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(summary.contains("kind,vacuum_diffraction"));
}

#[test]
fn loss_curve_with_field_column() {
    let spec = ScenarioSpec {
        params: ScenarioParams::LossCurve(LossCurveParams {
            b_start: 0.0,
            b_end: 10.0,
            count: 3,
            field_grid: 128,
            ..Default::default()
        }),
        seed: 0,
    };
    let report = run_scenario(&spec).unwrap();
    assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    let csv = &report.tables[0].1;
    let rows: Vec<_> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].ends_with(','), "b = 0 has no field column: {}", rows[1]);
    assert!(!rows[3].ends_with(','));
}

#[test]
fn transit_outside_the_cloud_is_rejected() {
    let spec = ScenarioSpec {
        params: ScenarioParams::EitTransit(EitTransitParams {
            pulse_center: 100.0,
            ..Default::default()
        }),
        seed: 0,
    };
    assert!(run_scenario(&spec).is_err());
}

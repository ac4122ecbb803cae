//! End-to-end pipeline wiring tests: bus-to-lake ingestion, zone
//! promotion chains, lineage reachability and artifact determinism.

use edgelake::lakecore::{parse_catalog_csv, Zone};
use edgelake::pipeline::{
    run_driverid, run_handover, run_vsn, zone_counts_from_catalog_csv, ClassifierChoice,
    DriverIdRunConfig, HandoverModel, HandoverRunConfig, LakeConfig, RunSummary, VsnAlgo,
    VsnRunConfig,
};
use edgelake::scenario::{corridor_scenario, gen_vsn_trace, VsnGenParams};
use edgelake::vsn::{MobilityTrace, Vehicle, VehicleId, VehicleSnapshot};

fn three_vehicle_trace() -> MobilityTrace {
    let vehicles = vec![
        Vehicle {
            id: VehicleId(1),
            x: 0.0,
            y: 0.0,
            volume: 1024,
        },
        Vehicle {
            id: VehicleId(2),
            x: 50.0,
            y: 0.0,
            volume: 1024,
        },
        Vehicle {
            id: VehicleId(3),
            x: 100.0,
            y: 0.0,
            volume: 1024,
        },
    ];
    let snapshot = VehicleSnapshot::new(0.0, vehicles).unwrap();
    MobilityTrace::new(vec![snapshot]).unwrap()
}

fn vsn_config(algo: VsnAlgo) -> VsnRunConfig {
    VsnRunConfig {
        radius: 100.0,
        hops: 2,
        algo,
        rb_probability: 0.3,
        seed: 42,
        trace_source: "inline".to_owned(),
        lake: LakeConfig::default(),
    }
}

#[test]
fn vsn_run_wires_ingestion_through_insights() {
    let trace = three_vehicle_trace();
    let artifacts = run_vsn(&trace, &vsn_config(VsnAlgo::Centrality)).unwrap();

    let records = parse_catalog_csv(&artifacts.catalog_csv).unwrap();
    let ingested: Vec<_> = records
        .iter()
        .filter(|r| r.zone == Zone::Ingestion)
        .collect();
    assert!(ingested.len() >= 3, "every location payload is ingested");
    assert!(ingested.iter().all(|r| r.source.ends_with("/location")));

    let insights: Vec<_> = records
        .iter()
        .filter(|r| r.zone == Zone::Insights)
        .collect();
    assert_eq!(insights.len(), 1, "one metrics object reaches Insights");

    // walk the parent links from the Insights entry down to the roots
    let mut frontier = vec![insights[0].object_id];
    let mut reached_roots = std::collections::BTreeSet::new();
    while let Some(id) = frontier.pop() {
        let record = records.iter().find(|r| r.object_id == id).unwrap();
        if record.parents.is_empty() {
            reached_roots.insert(id);
        }
        frontier.extend(record.parents.iter().copied());
    }
    assert!(
        reached_roots.len() >= 3,
        "metrics lineage reaches all three location objects"
    );

    // report summary: a single 3-vehicle chain with hops=2 collapses into
    // one AP
    match &artifacts.summary {
        RunSummary::Vsn(s) => {
            assert_eq!(s.snapshots, 1);
            assert_eq!(s.final_ap_count, 1);
            assert!((s.peak_aggregation_rate - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        }
        other => panic!("unexpected summary {other:?}"),
    }
}

#[test]
fn vsn_artifacts_are_deterministic() {
    let params = VsnGenParams {
        vehicles: 40,
        steps: 4,
        seed: 7,
        ..VsnGenParams::default()
    };
    let trace = gen_vsn_trace(&params).unwrap();
    for algo in [VsnAlgo::Centrality, VsnAlgo::Rb] {
        let a = run_vsn(&trace, &vsn_config(algo)).unwrap();
        let b = run_vsn(&trace, &vsn_config(algo)).unwrap();
        assert_eq!(a.metrics_csv, b.metrics_csv);
        assert_eq!(a.report, b.report);
        assert_eq!(a.catalog_csv, b.catalog_csv);
        assert_eq!(a.bus_csv, b.bus_csv);
    }
}

#[test]
fn vsn_report_reconciles_with_its_catalog_dump() {
    let trace = three_vehicle_trace();
    let artifacts = run_vsn(&trace, &vsn_config(VsnAlgo::Centrality)).unwrap();
    let counts = zone_counts_from_catalog_csv(&artifacts.catalog_csv).unwrap();
    for (zone, count) in &counts {
        let line = format!("zone.{zone}={count}");
        assert!(
            artifacts.report.contains(&line),
            "report missing `{line}`\n{}",
            artifacts.report
        );
    }
    let entries_line = format!(
        "entries={}",
        parse_catalog_csv(&artifacts.catalog_csv).unwrap().len()
    );
    assert!(artifacts.report.contains(&entries_line));
}

#[test]
fn handover_minimal_run_matches_the_corridor_structure() {
    let (sites, route) = corridor_scenario();
    let cfg = HandoverRunConfig {
        model: HandoverModel::Minimal,
        margin: 0.0,
        route_label: "corridor".to_owned(),
        seed: 1,
        route_source: "corridor".to_owned(),
        sites_source: "corridor".to_owned(),
        lake: LakeConfig::default(),
    };
    let artifacts = run_handover(&route, &sites, &cfg).unwrap();
    let allocation = &artifacts.extra_files[0].1;
    assert!(allocation.ends_with("handovers=5;sequence=20->8->5->2->13->19\n"));

    match &artifacts.summary {
        RunSummary::Handover(s) => {
            assert_eq!(s.handovers, 5);
            assert_eq!(s.sequence, vec![20, 8, 5, 2, 13, 19]);
            assert!(s.plan_recalled, "stored plan recalled identically");
            let dwell: f64 = s.dwell_fractions.values().sum();
            assert!((dwell - 1.0).abs() < 1e-9);
        }
        other => panic!("unexpected summary {other:?}"),
    }

    // the stored plan is an Insights entry tagged with the route label
    let records = parse_catalog_csv(&artifacts.catalog_csv).unwrap();
    let plan = records
        .iter()
        .find(|r| {
            r.zone == Zone::Insights && r.tags.get("route").map(String::as_str) == Some("corridor")
        })
        .expect("plan entry present");
    assert!(plan.access_count >= 2, "creation plus at least one recall");
}

#[test]
fn handover_nearest_run_reports_seven_handovers() {
    let (sites, route) = corridor_scenario();
    let cfg = HandoverRunConfig {
        model: HandoverModel::Nearest,
        margin: 0.0,
        route_label: "corridor".to_owned(),
        seed: 1,
        route_source: "corridor".to_owned(),
        sites_source: "corridor".to_owned(),
        lake: LakeConfig::default(),
    };
    let artifacts = run_handover(&route, &sites, &cfg).unwrap();
    match &artifacts.summary {
        RunSummary::Handover(s) => {
            assert_eq!(s.handovers, 7);
            assert_eq!(s.sequence, vec![20, 8, 25, 5, 2, 3, 13, 19]);
        }
        other => panic!("unexpected summary {other:?}"),
    }
    let a = run_handover(&route, &sites, &cfg).unwrap();
    assert_eq!(a.metrics_csv, artifacts.metrics_csv);
    assert_eq!(a.catalog_csv, artifacts.catalog_csv);
}

#[test]
fn handover_uncovered_route_surfaces_the_module_error() {
    let (mut sites, route) = corridor_scenario();
    sites.retain(|s| s.id != 8); // open a coverage hole
    let cfg = HandoverRunConfig {
        model: HandoverModel::Minimal,
        margin: 0.0,
        route_label: "gap".to_owned(),
        seed: 1,
        route_source: "corridor".to_owned(),
        sites_source: "corridor-minus-8".to_owned(),
        lake: LakeConfig::default(),
    };
    let err = run_handover(&route, &sites, &cfg).unwrap_err();
    assert!(err.to_string().contains("not covered"), "got: {err}");
}

#[test]
fn driverid_run_produces_model_and_evaluation_chain() {
    let cfg = DriverIdRunConfig {
        windows_per_driver: 25,
        classifier: ClassifierChoice::Knn,
        k: 1,
        seed: 5,
        train_fraction: 0.75,
        emit_dataset: true,
        lake: LakeConfig::default(),
    };
    let artifacts = run_driverid(&cfg).unwrap();

    match &artifacts.summary {
        RunSummary::DriverId(s) => {
            assert_eq!(s.windows, 100);
            assert_eq!(s.train_size + s.test_size, 100);
            assert!(s.accuracy > 0.5, "accuracy {}", s.accuracy);
        }
        other => panic!("unexpected summary {other:?}"),
    }

    let records = parse_catalog_csv(&artifacts.catalog_csv).unwrap();
    assert_eq!(
        records.iter().filter(|r| r.zone == Zone::Ingestion).count(),
        100
    );
    // window payloads were shipped to the cloud for training
    let windows_in_cloud = records
        .iter()
        .filter(|r| r.zone == Zone::Ingestion && r.tier.to_string() == "cloud")
        .count();
    assert_eq!(windows_in_cloud, 100);
    // the fitted model ended up back on the edge
    let model = records
        .iter()
        .find(|r| r.tags.get("kind").map(String::as_str) == Some("model"))
        .expect("model entry present");
    assert_eq!(model.tier.to_string(), "edge");
    assert!(records.iter().any(|r| r.zone == Zone::Insights
        && r.tags.get("kind").map(String::as_str) == Some("evaluation")));

    // extra files: features always, dataset on request
    let names: Vec<&str> = artifacts
        .extra_files
        .iter()
        .map(|(n, _)| n.as_str())
        .collect();
    assert_eq!(names, vec!["features.csv", "dataset.csv"]);
    let features_rows = artifacts.extra_files[0].1.lines().count();
    assert_eq!(features_rows, 1 + 100);

    let again = run_driverid(&cfg).unwrap();
    assert_eq!(again.metrics_csv, artifacts.metrics_csv);
    assert_eq!(again.report, artifacts.report);
}

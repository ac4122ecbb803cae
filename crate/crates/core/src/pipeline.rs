//! Run orchestration: wires the applications through the data bus and the
//! lake, producing deterministic artifacts (metric CSVs, catalog and bus
//! dumps, a report body) for each use case.
//!
//! Every run follows the same shape: raw inputs are published on the bus,
//! a lake-side ingestor subscription drains them into the Ingestion zone,
//! application operations derive entries through the zones up to Insights,
//! and the tiering policy is applied at the end. All artifacts are
//! regenerable byte-identically from the same config and seed; wall-clock
//! is deliberately left to the caller.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::databus::{BusError, DataBus, SubscriptionFilter, Topic, TopicError};
use crate::driverid::{self, ClassifierKind, DriverIdError, OrdinalConfig};
use crate::handover::{
    self, allocation_output, handover_sequence, EnbSite, HandoverError, Route, ROUTE_TAG,
};
use crate::lakecore::{DataLake, LakeError, LakeStats, ObjectId, Tier, TierPolicy, Zone};
use crate::scenario::ScenarioError;
use crate::seed::derive_seed;
use crate::vsn::{self, AggregationPlan, MobilityTrace, ProximityGraph, VsnError};
use crate::SimTime;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Bus(#[from] BusError),
    #[error(transparent)]
    Topic(#[from] TopicError),
    #[error(transparent)]
    Lake(#[from] LakeError),
    #[error(transparent)]
    Vsn(#[from] VsnError),
    #[error(transparent)]
    Handover(#[from] HandoverError),
    #[error(transparent)]
    DriverId(#[from] DriverIdError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Lake-side knobs shared by every pipeline.
#[derive(Debug, Clone)]
pub struct LakeConfig {
    pub policy: TierPolicy,
    pub batch_size: usize,
}

impl Default for LakeConfig {
    fn default() -> Self {
        // raw payloads go cold after 10 simulated seconds unless they see
        // a second access inside the 300 s window
        LakeConfig {
            policy: TierPolicy::new(2, 300.0, 10.0).expect("default policy is valid"),
            batch_size: 32,
        }
    }
}

/// Everything a run produces, as in-memory file contents plus a typed
/// summary. The caller decides where (and whether) to persist them.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub metrics_csv: String,
    /// Report body: config echo, metric table, catalog statistics.
    pub report: String,
    pub catalog_csv: String,
    pub bus_csv: String,
    /// Additional files: `(file name, content)`.
    pub extra_files: Vec<(String, String)>,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunSummary {
    Vsn(VsnRunSummary),
    Handover(HandoverRunSummary),
    DriverId(DriverIdRunSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VsnRunSummary {
    pub snapshots: usize,
    pub peak_aggregation_rate: f64,
    pub mean_aggregation_rate: f64,
    pub peak_upload_cost: f64,
    pub final_ap_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverRunSummary {
    pub handovers: usize,
    pub sequence: Vec<u32>,
    pub dwell_fractions: BTreeMap<u32, f64>,
    pub plan_recalled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverIdRunSummary {
    pub classifier: String,
    pub accuracy: f64,
    pub windows: usize,
    pub train_size: usize,
    pub test_size: usize,
}

fn render_report(
    command: &str,
    config_echo: &[(String, String)],
    metrics: &[(String, String)],
    lake_stats: &LakeStats,
    bus_messages: usize,
) -> String {
    let mut out = String::from("== run ==\n");
    out.push_str(&format!("command={command}\n"));
    for (k, v) in config_echo {
        out.push_str(&format!("{k}={v}\n"));
    }
    out.push_str("== metrics ==\n");
    for (k, v) in metrics {
        out.push_str(&format!("{k}={v}\n"));
    }
    out.push_str("== catalog ==\n");
    out.push_str(&format!("entries={}\n", lake_stats.total_entries));
    for (zone, count) in &lake_stats.entries_per_zone {
        out.push_str(&format!("zone.{zone}={count}\n"));
    }
    for (tier, count) in &lake_stats.entries_per_tier {
        out.push_str(&format!("tier.{tier}={count}\n"));
    }
    for (tier, bytes) in &lake_stats.bytes_per_tier {
        out.push_str(&format!("bytes.{tier}={bytes}\n"));
    }
    out.push_str(&format!(
        "transfer_batches={}\n",
        lake_stats.transfer_batches
    ));
    out.push_str(&format!(
        "objects_transferred={}\n",
        lake_stats.objects_transferred
    ));
    out.push_str(&format!("bus_messages={bus_messages}\n"));
    out
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// VSN run
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsnAlgo {
    Centrality,
    Rb,
}

impl VsnAlgo {
    pub fn as_str(&self) -> &'static str {
        match self {
            VsnAlgo::Centrality => "centrality",
            VsnAlgo::Rb => "rb",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VsnRunConfig {
    pub radius: f64,
    pub hops: u32,
    pub algo: VsnAlgo,
    /// Reservation probability for the RB baseline; ignored by the
    /// centrality algorithm.
    pub rb_probability: f64,
    pub seed: u64,
    /// Where the trace came from (file path or a generator tag); echoed
    /// into the report so a run is reproducible from its config alone.
    pub trace_source: String,
    pub lake: LakeConfig,
}

impl VsnRunConfig {
    fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("seed".into(), self.seed.to_string()),
            ("trace".into(), self.trace_source.clone()),
            ("radius".into(), fmt_f64(self.radius)),
            ("hops".into(), self.hops.to_string()),
            ("algo".into(), self.algo.as_str().into()),
            ("rb_probability".into(), fmt_f64(self.rb_probability)),
            ("batch_size".into(), self.lake.batch_size.to_string()),
        ]
    }
}

/// Runs the offloading pipeline over a mobility trace: locations flow over
/// the bus into the Ingestion zone, per-snapshot plans and aggregated
/// uploads are derived and shipped to the cloud, and the final metrics
/// object lands in Insights with lineage back to every location payload.
pub fn run_vsn(trace: &MobilityTrace, cfg: &VsnRunConfig) -> Result<RunArtifacts, PipelineError> {
    let bus = DataBus::new();
    let mut lake = DataLake::new();
    let ingestor = bus.register_subscriber("lake-ingestor");
    bus.subscribe(SubscriptionFilter::parse("its/+/location")?, ingestor)?;

    let mut plans: Vec<AggregationPlan> = Vec::with_capacity(trace.len());
    let mut aggregate_ids: Vec<ObjectId> = Vec::new();
    let mut t_end: SimTime = 0.0;

    for (index, snapshot) in trace.snapshots().iter().enumerate() {
        let t = snapshot.time();
        t_end = t;
        for v in snapshot.vehicles() {
            let topic = Topic::parse(&format!("its/v{}/location", v.id))?;
            let payload = format!("{},{},{},{}", t, v.x, v.y, v.volume).into_bytes();
            bus.publish(topic, payload, t)?;
        }
        let mut location_ids = Vec::with_capacity(snapshot.len());
        for delivery in bus.take_deliveries(ingestor)? {
            let msg = &delivery.message;
            let id = lake.ingest(
                &msg.payload,
                &msg.topic,
                BTreeMap::from([("kind".to_owned(), "location".to_owned())]),
                t,
            )?;
            location_ids.push(id);
        }

        let graph = ProximityGraph::build(snapshot, cfg.radius)?;
        let plan = match cfg.algo {
            VsnAlgo::Centrality => {
                vsn::select_aggregation_points(&graph, cfg.hops, &snapshot.volumes())?
            }
            VsnAlgo::Rb => vsn::rb_baseline(
                snapshot,
                cfg.radius,
                cfg.rb_probability,
                derive_seed(cfg.seed, &[10, index as u64]),
            )?,
        };
        let plan_json = serde_json::to_vec(&plan).expect("plan serializes");
        bus.publish(Topic::parse("mec/vsn/plan")?, plan_json.clone(), t)?;

        if !location_ids.is_empty() {
            let plan_id = lake.derive(
                &location_ids,
                "select-aggregation-points",
                &plan_json,
                BTreeMap::from([("kind".to_owned(), "plan".to_owned())]),
                t,
            )?;
            // the aggregated upload: one payload of exactly the uploaded size
            let upload_bytes = vec![0u8; plan.uploaded_volume.max(1) as usize];
            let aggregate_id = lake.derive(
                &[plan_id],
                "aggregate-upload",
                &upload_bytes,
                BTreeMap::from([("kind".to_owned(), "aggregate".to_owned())]),
                t,
            )?;
            lake.transfer(&[aggregate_id], Tier::Cloud, cfg.lake.batch_size)?;
            aggregate_ids.push(aggregate_id);
        }
        plans.push(plan);
    }

    let costs = vsn::upload_cost(trace.snapshots(), &plans)?;
    let mut metrics_csv = String::from("t,n_vehicles,n_aps,aggregation_rate,upload_cost\n");
    let mut rates = Vec::with_capacity(plans.len());
    for ((snapshot, plan), (_, cost)) in trace.snapshots().iter().zip(&plans).zip(&costs) {
        let rate = plan.aggregation_rate().unwrap_or(0.0);
        rates.push(rate);
        metrics_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            snapshot.time(),
            snapshot.len(),
            plan.aggregation_points.len(),
            rate,
            cost
        ));
    }

    if !aggregate_ids.is_empty() {
        lake.derive(
            &aggregate_ids,
            "vsn-metrics",
            metrics_csv.as_bytes(),
            BTreeMap::from([("kind".to_owned(), "metrics".to_owned())]),
            t_end,
        )?;
    }
    let jobs = lake.apply_tiering(&cfg.lake.policy, t_end);
    lake.execute_tiering(&jobs, cfg.lake.batch_size)?;
    bus.shutdown();

    let peak_rate = rates.iter().copied().fold(0.0, f64::max);
    let mean_rate = if rates.is_empty() {
        0.0
    } else {
        rates.iter().sum::<f64>() / rates.len() as f64
    };
    let peak_cost = costs.iter().map(|(_, c)| *c).fold(0.0, f64::max);
    let summary = VsnRunSummary {
        snapshots: trace.len(),
        peak_aggregation_rate: peak_rate,
        mean_aggregation_rate: mean_rate,
        peak_upload_cost: peak_cost,
        final_ap_count: plans.last().map_or(0, |p| p.aggregation_points.len()),
    };

    let stats = lake.stats();
    let report = render_report(
        "vsn-run",
        &cfg.echo(),
        &[
            ("snapshots".into(), trace.len().to_string()),
            ("peak_aggregation_rate".into(), fmt_f64(peak_rate)),
            ("mean_aggregation_rate".into(), fmt_f64(mean_rate)),
            ("peak_upload_cost".into(), fmt_f64(peak_cost)),
        ],
        &stats,
        bus.message_count(),
    );

    Ok(RunArtifacts {
        metrics_csv,
        report,
        catalog_csv: lake.catalog_csv(),
        bus_csv: bus.trace_csv(),
        extra_files: Vec::new(),
        summary: RunSummary::Vsn(summary),
    })
}

// ---------------------------------------------------------------------------
// Handover run
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandoverModel {
    Nearest,
    Hysteresis,
    Minimal,
}

impl HandoverModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            HandoverModel::Nearest => "nearest",
            HandoverModel::Hysteresis => "hysteresis",
            HandoverModel::Minimal => "minimal",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HandoverRunConfig {
    pub model: HandoverModel,
    /// Hysteresis margin in meters; only the hysteresis model reads it.
    pub margin: f64,
    /// Label under which the minimized plan is stored and recalled.
    pub route_label: String,
    pub seed: u64,
    /// Provenance of the route and site inputs, echoed into the report.
    pub route_source: String,
    pub sites_source: String,
    pub lake: LakeConfig,
}

impl HandoverRunConfig {
    fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("seed".into(), self.seed.to_string()),
            ("route".into(), self.route_source.clone()),
            ("sites".into(), self.sites_source.clone()),
            ("model".into(), self.model.as_str().into()),
            ("margin".into(), fmt_f64(self.margin)),
            ("route_label".into(), self.route_label.clone()),
            ("batch_size".into(), self.lake.batch_size.to_string()),
        ]
    }
}

/// Runs one allocation model over a route: readings are ingested via the
/// bus, the allocation and its collapsed summary are derived through the
/// zones, and for the minimal model the plan is stored in Insights under
/// the route label and recalled once to prove the round trip.
pub fn run_handover(
    route: &Route,
    sites: &[EnbSite],
    cfg: &HandoverRunConfig,
) -> Result<RunArtifacts, PipelineError> {
    let bus = DataBus::new();
    let mut lake = DataLake::new();
    let ingestor = bus.register_subscriber("lake-ingestor");
    bus.subscribe(SubscriptionFilter::parse("its/ue/+/reading")?, ingestor)?;

    let mut t_end: SimTime = 0.0;
    for r in route.readings() {
        let topic = Topic::parse(&format!("its/ue/{}/reading", cfg.route_label))?;
        let payload = format!("{},{},{},{}", r.index, r.time, r.x, r.y).into_bytes();
        bus.publish(topic, payload, r.time)?;
        t_end = r.time;
    }
    let mut reading_ids = Vec::with_capacity(route.len());
    for delivery in bus.take_deliveries(ingestor)? {
        let msg = &delivery.message;
        let id = lake.ingest(
            &msg.payload,
            &msg.topic,
            BTreeMap::from([("kind".to_owned(), "reading".to_owned())]),
            msg.timestamp,
        )?;
        reading_ids.push(id);
    }

    let trace = match cfg.model {
        HandoverModel::Nearest => handover::allocate_nearest(route, sites)?,
        HandoverModel::Hysteresis => handover::allocate_hysteresis(route, sites, cfg.margin)?,
        HandoverModel::Minimal => handover::minimize_allocation(route, sites)?,
    };
    let summary = handover_sequence(&trace);
    let allocation_text = allocation_output(&trace, &summary);
    let summary_json = serde_json::to_vec(&summary).expect("summary serializes");

    let mut plan_recalled = false;
    if !reading_ids.is_empty() {
        let alloc_id = lake.derive(
            &reading_ids,
            &format!("allocate-{}", cfg.model.as_str()),
            allocation_text.as_bytes(),
            BTreeMap::from([("kind".to_owned(), "allocation".to_owned())]),
            t_end,
        )?;
        let summary_id = lake.promote(alloc_id, "collapse-handovers", &summary_json, t_end)?;
        let final_transform = match cfg.model {
            HandoverModel::Minimal => "handover-plan",
            _ => "handover-metrics",
        };
        let final_id = lake.promote(summary_id, final_transform, &summary_json, t_end)?;
        if cfg.model == HandoverModel::Minimal {
            lake.tag_object(final_id, ROUTE_TAG, &cfg.route_label)?;
            let recalled = handover::plan_from_history(&mut lake, &cfg.route_label, t_end)?;
            plan_recalled = recalled == summary;
        }
    }
    let jobs = lake.apply_tiering(&cfg.lake.policy, t_end);
    lake.execute_tiering(&jobs, cfg.lake.batch_size)?;
    bus.shutdown();

    let mut metrics_csv = String::from("enb_id,dwell_fraction\n");
    for (id, fraction) in &summary.dwell_fractions {
        metrics_csv.push_str(&format!("{id},{fraction}\n"));
    }

    let mut metric_lines = vec![
        ("readings".into(), route.len().to_string()),
        ("handovers".into(), summary.handover_count.to_string()),
        ("sequence".into(), summary.sequence_text()),
    ];
    if cfg.model == HandoverModel::Minimal {
        metric_lines.push(("plan_recalled".into(), plan_recalled.to_string()));
    }

    let stats = lake.stats();
    let report = render_report(
        "handover-run",
        &cfg.echo(),
        &metric_lines,
        &stats,
        bus.message_count(),
    );

    let run_summary = HandoverRunSummary {
        handovers: summary.handover_count,
        sequence: summary.sequence.clone(),
        dwell_fractions: summary.dwell_fractions.clone(),
        plan_recalled,
    };
    Ok(RunArtifacts {
        metrics_csv,
        report,
        catalog_csv: lake.catalog_csv(),
        bus_csv: bus.trace_csv(),
        extra_files: vec![("allocation.csv".to_owned(), allocation_text)],
        summary: RunSummary::Handover(run_summary),
    })
}

// ---------------------------------------------------------------------------
// Driver identification run
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierChoice {
    Knn,
    Gnb,
}

impl ClassifierChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierChoice::Knn => "knn",
            ClassifierChoice::Gnb => "gnb",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DriverIdRunConfig {
    pub windows_per_driver: usize,
    pub classifier: ClassifierChoice,
    /// Neighbor count for kNN; must be odd.
    pub k: usize,
    pub seed: u64,
    pub train_fraction: f64,
    /// Also emit the raw dataset CSV (large for the big preset).
    pub emit_dataset: bool,
    pub lake: LakeConfig,
}

impl DriverIdRunConfig {
    fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("seed".into(), self.seed.to_string()),
            (
                "windows_per_driver".into(),
                self.windows_per_driver.to_string(),
            ),
            ("classifier".into(), self.classifier.as_str().into()),
            ("k".into(), self.k.to_string()),
            ("train_fraction".into(), fmt_f64(self.train_fraction)),
            ("batch_size".into(), self.lake.batch_size.to_string()),
        ]
    }

    fn kind(&self) -> ClassifierKind {
        match self.classifier {
            ClassifierChoice::Knn => ClassifierKind::Knn { k: self.k },
            ClassifierChoice::Gnb => ClassifierKind::GaussianNbOvr,
        }
    }
}

/// Seconds of sensor data per window.
const WINDOW_SPAN: f64 = 30.0;

/// Runs driver identification on the synthetic dataset: windows flow over
/// the bus into the lake and off to the cloud (training data is cold),
/// features and the fitted model are derived, the model ships back to the
/// edge for inference, and the evaluation report lands in Insights.
pub fn run_driverid(cfg: &DriverIdRunConfig) -> Result<RunArtifacts, PipelineError> {
    let windows = driverid::generate_synthetic_drivers(cfg.windows_per_driver, cfg.seed)?;
    let bus = DataBus::new();
    let mut lake = DataLake::new();
    let ingestor = bus.register_subscriber("lake-ingestor");
    bus.subscribe(SubscriptionFilter::parse("its/+/obdii")?, ingestor)?;

    let mut t_end: SimTime = 0.0;
    for (index, window) in windows.iter().enumerate() {
        let t = index as f64 * WINDOW_SPAN;
        t_end = t;
        let topic = Topic::parse(&format!("its/driver{}/obdii", window.driver()))?;
        let payload = driverid::dataset_to_csv(std::slice::from_ref(window)).into_bytes();
        bus.publish(topic, payload, t)?;
    }
    let mut window_ids = Vec::with_capacity(windows.len());
    for delivery in bus.take_deliveries(ingestor)? {
        let msg = &delivery.message;
        let id = lake.ingest(
            &msg.payload,
            &msg.topic,
            BTreeMap::from([("kind".to_owned(), "window".to_owned())]),
            msg.timestamp,
        )?;
        window_ids.push(id);
    }

    // raw training data is cold at the edge: ship it to the cloud in
    // batches before the (cloud-side) training job
    lake.transfer(&window_ids, Tier::Cloud, cfg.lake.batch_size)?;

    let config = OrdinalConfig::default();
    let features = driverid::extract_features(&windows, &config)?;
    let features_csv = driverid::features_to_csv(&features);
    let features_id = lake.derive(
        &window_ids,
        "extract-entropy-complexity",
        features_csv.as_bytes(),
        BTreeMap::from([("kind".to_owned(), "features".to_owned())]),
        t_end,
    )?;
    let n_values = (features.len() * 2 * driverid::CHANNEL_COUNT) as f64;
    let mean_h = features
        .iter()
        .flat_map(|f| f.values.chunks(2).map(|p| p[0]))
        .sum::<f64>()
        / (n_values / 2.0);
    let mean_c = features
        .iter()
        .flat_map(|f| f.values.chunks(2).map(|p| p[1]))
        .sum::<f64>()
        / (n_values / 2.0);
    lake.set_meta_feature(features_id, "mean_entropy", mean_h)?;
    lake.set_meta_feature(features_id, "mean_complexity", mean_c)?;

    let kind = cfg.kind();
    let reports = driverid::evaluate(&[kind], &features, cfg.train_fraction, cfg.seed)?;
    let report0 = &reports[0];

    // the model artifact: retrain on the same train side of the split
    let (train_idx, _) = driverid::stratified_split(&features, cfg.train_fraction, cfg.seed)?;
    let train: Vec<_> = train_idx.iter().map(|&i| features[i].clone()).collect();
    let model_json = match kind {
        ClassifierKind::Knn { k } => {
            serde_json::to_vec(&driverid::train_knn(&train, k)?).expect("model serializes")
        }
        ClassifierKind::GaussianNbOvr => {
            serde_json::to_vec(&driverid::train_gnb_ovr(&train)?).expect("model serializes")
        }
        ClassifierKind::Constant { .. } => serde_json::to_vec(&kind.name()).expect("serializes"),
    };
    let model_id = lake.derive(
        &[features_id],
        &format!("train-{}", cfg.classifier.as_str()),
        &model_json,
        BTreeMap::from([("kind".to_owned(), "model".to_owned())]),
        t_end,
    )?;
    // trained in the cloud, deployed back to the edge for low-latency
    // inference
    lake.transfer(&[model_id], Tier::Cloud, cfg.lake.batch_size)?;
    lake.transfer(&[model_id], Tier::Edge, cfg.lake.batch_size)?;
    lake.record_access(model_id, t_end)?;

    let eval_json = serde_json::to_vec(report0).expect("report serializes");
    lake.derive(
        &[model_id],
        "evaluate-classifier",
        &eval_json,
        BTreeMap::from([("kind".to_owned(), "evaluation".to_owned())]),
        t_end,
    )?;

    let jobs = lake.apply_tiering(&cfg.lake.policy, t_end);
    lake.execute_tiering(&jobs, cfg.lake.batch_size)?;
    bus.shutdown();

    let mut metrics_csv = String::from("classifier,accuracy,train_size,test_size\n");
    metrics_csv.push_str(&format!(
        "{},{},{},{}\n",
        report0.classifier, report0.accuracy, report0.train_size, report0.test_size
    ));

    let mut extra_files = vec![("features.csv".to_owned(), features_csv)];
    if cfg.emit_dataset {
        extra_files.push(("dataset.csv".to_owned(), driverid::dataset_to_csv(&windows)));
    }

    let stats = lake.stats();
    let report = render_report(
        "driverid-run",
        &cfg.echo(),
        &[
            ("windows".into(), windows.len().to_string()),
            ("classifier".into(), report0.classifier.clone()),
            ("accuracy".into(), fmt_f64(report0.accuracy)),
            ("train_size".into(), report0.train_size.to_string()),
            ("test_size".into(), report0.test_size.to_string()),
            ("mean_entropy".into(), fmt_f64(mean_h)),
            ("mean_complexity".into(), fmt_f64(mean_c)),
        ],
        &stats,
        bus.message_count(),
    );

    let summary = DriverIdRunSummary {
        classifier: report0.classifier.clone(),
        accuracy: report0.accuracy,
        windows: windows.len(),
        train_size: report0.train_size,
        test_size: report0.test_size,
    };
    Ok(RunArtifacts {
        metrics_csv,
        report,
        catalog_csv: lake.catalog_csv(),
        bus_csv: bus.trace_csv(),
        extra_files,
        summary: RunSummary::DriverId(summary),
    })
}

// ---------------------------------------------------------------------------
// Helpers shared with the CLI
// ---------------------------------------------------------------------------

/// Count of catalog entries per zone from a parsed catalog CSV; used to
/// reconcile run reports against `lake inspect` output.
pub fn zone_counts_from_catalog_csv(text: &str) -> Result<BTreeMap<String, usize>, LakeError> {
    let records = crate::lakecore::parse_catalog_csv(text)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for zone in Zone::ALL {
        counts.insert(zone.to_string(), 0);
    }
    for record in &records {
        *counts.get_mut(record.zone.as_str()).expect("zone bucket") += 1;
    }
    Ok(counts)
}

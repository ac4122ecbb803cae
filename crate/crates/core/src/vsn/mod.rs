//! Vehicular sensor network data offloading.
//!
//! Builds device-to-device proximity graphs from mobility snapshots,
//! elects aggregation points greedily by closeness centrality with k-hop
//! coverage, and computes aggregation-rate and upload-cost metrics against
//! a reservation-style baseline.
//!
//! The aggregation rate is reported as the fraction of generated volume
//! *eliminated* before the cellular upload: `rate = 1 - uploaded/generated`.
//! Under the default volume model every vehicle generates `s` bytes per
//! period and an aggregation point uploads a single `s`-byte record no
//! matter how many vehicles it covers, so with uniform volumes
//! `rate = 1 - |APs| / n`.

mod graph;

pub use graph::{closeness_centrality, closeness_scores, ProximityGraph};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VsnError {
    #[error("duplicate vehicle id {0}")]
    DuplicateVehicleId(VehicleId),
    #[error("non-finite coordinate for vehicle {0}")]
    NonFiniteCoordinate(VehicleId),
    #[error("invalid snapshot time {0}")]
    InvalidTime(f64),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("hop count must be at least 1")]
    InvalidHops,
    #[error("no volume recorded for vehicle {0}")]
    MissingVolume(VehicleId),
    #[error("aggregation rate undefined: generated volume is zero")]
    ZeroGeneratedVolume,
    #[error("reservation probability must be in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("expected one plan per snapshot: {snapshots} snapshots, {plans} plans")]
    LengthMismatch { snapshots: usize, plans: usize },
    #[error("snapshot times must strictly increase (snapshot {0})")]
    NonIncreasingTime(usize),
    #[error("malformed mobility trace: {0}")]
    TraceFormat(String),
}

/// Vehicle identifier from the mobility trace.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct VehicleId(pub u64);

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One vehicle's state within a snapshot: position in meters and the data
/// volume (bytes) it generated this period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vehicle {
    pub id: VehicleId,
    pub x: f64,
    pub y: f64,
    pub volume: u64,
}

/// All vehicle states at one instant of simulation time.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSnapshot {
    time: SimTime,
    vehicles: Vec<Vehicle>,
}

impl VehicleSnapshot {
    /// Validates id uniqueness and coordinate finiteness.
    pub fn new(time: SimTime, mut vehicles: Vec<Vehicle>) -> Result<Self, VsnError> {
        if !time.is_finite() || time < 0.0 {
            return Err(VsnError::InvalidTime(time));
        }
        vehicles.sort_by_key(|v| v.id);
        for pair in vehicles.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(VsnError::DuplicateVehicleId(pair[0].id));
            }
        }
        for v in &vehicles {
            if !v.x.is_finite() || !v.y.is_finite() {
                return Err(VsnError::NonFiniteCoordinate(v.id));
            }
        }
        Ok(VehicleSnapshot { time, vehicles })
    }

    pub fn time(&self) -> SimTime {
        self.time
    }

    /// Vehicles sorted by ascending id.
    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    /// Per-vehicle generated volume for this period.
    pub fn volumes(&self) -> BTreeMap<VehicleId, u64> {
        self.vehicles.iter().map(|v| (v.id, v.volume)).collect()
    }
}

/// A time-ordered sequence of snapshots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MobilityTrace {
    snapshots: Vec<VehicleSnapshot>,
}

impl MobilityTrace {
    /// Snapshot times must strictly increase.
    pub fn new(snapshots: Vec<VehicleSnapshot>) -> Result<Self, VsnError> {
        for (i, pair) in snapshots.windows(2).enumerate() {
            if pair[1].time() <= pair[0].time() {
                return Err(VsnError::NonIncreasingTime(i + 1));
            }
        }
        Ok(MobilityTrace { snapshots })
    }

    pub fn snapshots(&self) -> &[VehicleSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Serializes as `t,vehicle_id,x,y,volume` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,vehicle_id,x,y,volume\n");
        for snapshot in &self.snapshots {
            for v in snapshot.vehicles() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    snapshot.time(),
                    v.id,
                    v.x,
                    v.y,
                    v.volume
                ));
            }
        }
        out
    }

    /// Parses a `t,vehicle_id,x,y,volume` trace, grouping rows into
    /// snapshots by equal timestamps.
    pub fn from_csv(text: &str) -> Result<Self, VsnError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows: Vec<(f64, Vehicle)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| VsnError::TraceFormat(e.to_string()))?;
            if record.len() != 5 {
                return Err(VsnError::TraceFormat(format!(
                    "expected 5 fields, got {}",
                    record.len()
                )));
            }
            let parse_f64 = |i: usize| -> Result<f64, VsnError> {
                record
                    .get(i)
                    .unwrap_or_default()
                    .parse()
                    .map_err(|_| VsnError::TraceFormat(format!("bad number in field {i}")))
            };
            let t = parse_f64(0)?;
            let id = record
                .get(1)
                .unwrap_or_default()
                .parse()
                .map(VehicleId)
                .map_err(|_| VsnError::TraceFormat("bad vehicle id".into()))?;
            let volume = record
                .get(4)
                .unwrap_or_default()
                .parse()
                .map_err(|_| VsnError::TraceFormat("bad volume".into()))?;
            rows.push((
                t,
                Vehicle {
                    id,
                    x: parse_f64(2)?,
                    y: parse_f64(3)?,
                    volume,
                },
            ));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)));
        let mut snapshots = Vec::new();
        let mut i = 0;
        while i < rows.len() {
            let t = rows[i].0;
            let mut vehicles = Vec::new();
            while i < rows.len() && rows[i].0 == t {
                vehicles.push(rows[i].1);
                i += 1;
            }
            snapshots.push(VehicleSnapshot::new(t, vehicles)?);
        }
        MobilityTrace::new(snapshots)
    }
}

/// How an aggregation point's upload size relates to its cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UploadModel {
    /// One aggregated record per AP, sized like a single vehicle's period
    /// volume (the aggregation operator collapses the cluster).
    #[default]
    SingleRecord,
    /// The AP relays one record per covered vehicle (no reduction);
    /// off by default.
    PerMember,
}

/// Selected aggregation points with their k-hop assignment and the volume
/// bookkeeping for this period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationPlan {
    pub hops: u32,
    pub aggregation_points: BTreeSet<VehicleId>,
    pub assignment: BTreeMap<VehicleId, VehicleId>,
    pub generated_volume: u64,
    pub uploaded_volume: u64,
}

impl AggregationPlan {
    /// Fraction of generated volume eliminated by aggregation.
    pub fn aggregation_rate(&self) -> Result<f64, VsnError> {
        if self.generated_volume == 0 {
            return Err(VsnError::ZeroGeneratedVolume);
        }
        Ok(1.0 - self.uploaded_volume as f64 / self.generated_volume as f64)
    }

    /// Checks the structural plan invariants against the graph it was
    /// built from: every node assigned, APs self-assigned, assignments
    /// within `hops`, APs drawn from the graph.
    pub fn check_coverage(&self, graph: &ProximityGraph) -> Result<(), String> {
        for id in graph.ids() {
            if !self.assignment.contains_key(id) {
                return Err(format!("vehicle {id} unassigned"));
            }
        }
        for ap in &self.aggregation_points {
            if graph.index_of(*ap).is_none() {
                return Err(format!("aggregation point {ap} not in graph"));
            }
            if self.assignment.get(ap) != Some(ap) {
                return Err(format!("aggregation point {ap} not self-assigned"));
            }
        }
        for (vehicle, ap) in &self.assignment {
            if !self.aggregation_points.contains(ap) {
                return Err(format!("vehicle {vehicle} assigned to non-AP {ap}"));
            }
            let vi = graph
                .index_of(*vehicle)
                .ok_or_else(|| format!("vehicle {vehicle} not in graph"))?;
            let ai = graph.index_of(*ap).expect("checked above");
            let dist = graph.bfs_distances(ai)[vi];
            match dist {
                Some(d) if d <= self.hops => {}
                _ => {
                    return Err(format!(
                        "vehicle {vehicle} beyond {} hops of {ap}",
                        self.hops
                    ))
                }
            }
        }
        Ok(())
    }
}

fn plan_volumes(
    aps: &BTreeSet<VehicleId>,
    assignment: &BTreeMap<VehicleId, VehicleId>,
    volumes: &BTreeMap<VehicleId, u64>,
    model: UploadModel,
) -> Result<(u64, u64), VsnError> {
    let mut generated = 0u64;
    for id in assignment.keys() {
        generated += volumes
            .get(id)
            .copied()
            .ok_or(VsnError::MissingVolume(*id))?;
    }
    let uploaded = match model {
        UploadModel::SingleRecord => {
            let mut sum = 0u64;
            for ap in aps {
                sum += volumes
                    .get(ap)
                    .copied()
                    .ok_or(VsnError::MissingVolume(*ap))?;
            }
            sum
        }
        UploadModel::PerMember => generated,
    };
    Ok((generated, uploaded))
}

/// Builds the D2D proximity graph for a snapshot (edge iff distance is at
/// most `radius`).
pub fn build_proximity_graph(
    snapshot: &VehicleSnapshot,
    radius: f64,
) -> Result<ProximityGraph, VsnError> {
    ProximityGraph::build(snapshot, radius)
}

/// Greedy closeness-centrality selection of aggregation points with k-hop
/// coverage, under the default single-record upload model.
///
/// Repeatedly picks the uncovered vehicle with the highest closeness score
/// (ties to the smaller id), makes it an aggregation point and assigns to
/// it every still-uncovered vehicle within `k` hops, itself included. The
/// result is a k-hop dominating set with an explicit assignment.
pub fn select_aggregation_points(
    graph: &ProximityGraph,
    k: u32,
    volumes: &BTreeMap<VehicleId, u64>,
) -> Result<AggregationPlan, VsnError> {
    select_aggregation_points_with(graph, k, volumes, UploadModel::SingleRecord)
}

/// As [`select_aggregation_points`] with an explicit upload model.
pub fn select_aggregation_points_with(
    graph: &ProximityGraph,
    k: u32,
    volumes: &BTreeMap<VehicleId, u64>,
    model: UploadModel,
) -> Result<AggregationPlan, VsnError> {
    if k == 0 {
        return Err(VsnError::InvalidHops);
    }
    let n = graph.node_count();
    let scores = closeness_scores(graph);
    // Scores are fixed for the whole greedy loop, so the pick order is one
    // sort: descending score, ascending id.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(graph.id_of(a).cmp(&graph.id_of(b)))
    });

    let mut covered = vec![false; n];
    let mut aps = BTreeSet::new();
    let mut assignment = BTreeMap::new();
    for &candidate in &order {
        if covered[candidate] {
            continue;
        }
        let ap_id = graph.id_of(candidate);
        aps.insert(ap_id);
        for member in graph.k_hop_neighborhood(candidate, k) {
            if !covered[member] {
                covered[member] = true;
                assignment.insert(graph.id_of(member), ap_id);
            }
        }
    }

    let (generated, uploaded) = plan_volumes(&aps, &assignment, volumes, model)?;
    Ok(AggregationPlan {
        hops: k,
        aggregation_points: aps,
        assignment,
        generated_volume: generated,
        uploaded_volume: uploaded,
    })
}

/// The aggregation rate of a plan: `1 - uploaded/generated`.
pub fn aggregation_rate(plan: &AggregationPlan) -> Result<f64, VsnError> {
    plan.aggregation_rate()
}

/// Reservation-based baseline surrogate.
///
/// Each vehicle independently reserves the uplink with the given
/// probability (seeded, iterated in ascending id order) and becomes an
/// aggregation point. Non-reserving vehicles adjacent to a reserver join
/// the smallest-id reserving neighbor; vehicles left uncovered upload for
/// themselves. This stands in for a reservation-style contender and is not
/// a faithful reproduction of any published algorithm.
pub fn rb_baseline(
    snapshot: &VehicleSnapshot,
    radius: f64,
    reservation_probability: f64,
    seed: u64,
) -> Result<AggregationPlan, VsnError> {
    if !reservation_probability.is_finite()
        || reservation_probability <= 0.0
        || reservation_probability > 1.0
    {
        return Err(VsnError::InvalidProbability(reservation_probability));
    }
    let graph = ProximityGraph::build(snapshot, radius)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = graph.node_count();

    let reserved: Vec<bool> = (0..n)
        .map(|_| rng.random::<f64>() < reservation_probability)
        .collect();

    let mut aps = BTreeSet::new();
    let mut assignment = BTreeMap::new();
    for (i, _) in reserved.iter().enumerate().filter(|(_, r)| **r) {
        let id = graph.id_of(i);
        aps.insert(id);
        assignment.insert(id, id);
    }
    for i in 0..n {
        if reserved[i] {
            continue;
        }
        let id = graph.id_of(i);
        let reserver = graph
            .neighbors(i)
            .iter()
            .copied()
            .filter(|&j| reserved[j])
            .map(|j| graph.id_of(j))
            .min();
        match reserver {
            Some(ap) => {
                assignment.insert(id, ap);
            }
            None => {
                aps.insert(id);
                assignment.insert(id, id);
            }
        }
    }

    let (generated, uploaded) = plan_volumes(
        &aps,
        &assignment,
        &snapshot.volumes(),
        UploadModel::SingleRecord,
    )?;
    Ok(AggregationPlan {
        hops: 1,
        aggregation_points: aps,
        assignment,
        generated_volume: generated,
        uploaded_volume: uploaded,
    })
}

/// Upload cost over time: one `(time, bytes_per_second)` point per
/// snapshot, dividing the plan's uploaded volume by the period length.
/// Periods come from consecutive snapshot times; the last snapshot reuses
/// the preceding period, and a lone snapshot counts as one second.
pub fn upload_cost(
    snapshots: &[VehicleSnapshot],
    plans: &[AggregationPlan],
) -> Result<Vec<(SimTime, f64)>, VsnError> {
    if snapshots.len() != plans.len() {
        return Err(VsnError::LengthMismatch {
            snapshots: snapshots.len(),
            plans: plans.len(),
        });
    }
    let n = snapshots.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let period = if n == 1 {
            1.0
        } else if i + 1 < n {
            snapshots[i + 1].time() - snapshots[i].time()
        } else {
            snapshots[i].time() - snapshots[i - 1].time()
        };
        if period <= 0.0 || period.is_nan() {
            return Err(VsnError::NonIncreasingTime(i));
        }
        out.push((
            snapshots[i].time(),
            plans[i].uploaded_volume as f64 / period,
        ));
    }
    Ok(out)
}

/// Deduplicated sanity check used by tests: true iff `aps` is a k-hop
/// dominating set of `graph`.
pub fn is_k_hop_dominating_set(graph: &ProximityGraph, aps: &BTreeSet<VehicleId>, k: u32) -> bool {
    let ap_indices: HashSet<usize> = aps.iter().filter_map(|id| graph.index_of(*id)).collect();
    if ap_indices.len() != aps.len() {
        return false;
    }
    let mut covered = vec![false; graph.node_count()];
    for &ap in &ap_indices {
        for member in graph.k_hop_neighborhood(ap, k) {
            covered[member] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

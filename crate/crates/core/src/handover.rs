//! Base-station allocation along a route and handover planning.
//!
//! Coverage uses a plain disc model: a site serves a reading iff the
//! Euclidean distance is at most the site's range. Two allocation models
//! are provided (nearest and nearest-with-hysteresis) plus a minimizer
//! that computes the fewest handovers achievable by any valid allocation,
//! using greedy furthest-reach selection over contiguous coverage
//! intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lakecore::{DataLake, LakeError, ObjectId, Zone};
use crate::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HandoverError {
    #[error("duplicate site id {0}")]
    DuplicateSiteId(u32),
    #[error("site {0} has non-positive range")]
    InvalidRange(u32),
    #[error("margin must be non-negative and finite, got {0}")]
    InvalidMargin(f64),
    #[error("route indices must be contiguous from 0 (position {0})")]
    RouteIndexGap(usize),
    #[error("route times must strictly increase (position {0})")]
    NonIncreasingTime(usize),
    #[error("non-finite route coordinate at position {0}")]
    NonFiniteCoordinate(usize),
    #[error("reading {0} is not covered by any site")]
    UncoveredReading(usize),
    #[error("no stored plan for route `{0}`")]
    PlanNotFound(String),
    #[error("stored plan payload is malformed: {0}")]
    PayloadFormat(String),
    #[error(transparent)]
    Lake(#[from] LakeError),
    #[error("malformed csv: {0}")]
    CsvFormat(String),
}

/// A base station: integer label, position in meters, coverage range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnbSite {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub range: f64,
}

impl EnbSite {
    pub fn covers(&self, x: f64, y: f64) -> bool {
        let d2 = (self.x - x).powi(2) + (self.y - y).powi(2);
        d2 <= self.range * self.range
    }

    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        ((self.x - x).powi(2) + (self.y - y).powi(2)).sqrt()
    }
}

fn validate_sites(sites: &[EnbSite]) -> Result<(), HandoverError> {
    let mut seen = std::collections::BTreeSet::new();
    for site in sites {
        if !seen.insert(site.id) {
            return Err(HandoverError::DuplicateSiteId(site.id));
        }
        if !site.range.is_finite() || site.range <= 0.0 {
            return Err(HandoverError::InvalidRange(site.id));
        }
    }
    Ok(())
}

/// One UE location reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteReading {
    pub index: usize,
    pub time: SimTime,
    pub x: f64,
    pub y: f64,
}

/// A validated sequence of readings: contiguous indices from 0 and
/// strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    readings: Vec<RouteReading>,
}

impl Route {
    pub fn new(readings: Vec<RouteReading>) -> Result<Self, HandoverError> {
        for (i, r) in readings.iter().enumerate() {
            if r.index != i {
                return Err(HandoverError::RouteIndexGap(i));
            }
            if !r.x.is_finite() || !r.y.is_finite() {
                return Err(HandoverError::NonFiniteCoordinate(i));
            }
            if i > 0 && r.time <= readings[i - 1].time {
                return Err(HandoverError::NonIncreasingTime(i));
            }
        }
        Ok(Route { readings })
    }

    /// Builds a route from `(x, y)` points at one reading per second.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, HandoverError> {
        Route::new(
            points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| RouteReading {
                    index: i,
                    time: i as f64,
                    x,
                    y,
                })
                .collect(),
        )
    }

    pub fn readings(&self) -> &[RouteReading] {
        &self.readings
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }
}

/// Per-reading serving site (`None` where the reading is uncovered).
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationTrace {
    assignments: Vec<Option<u32>>,
}

impl AllocationTrace {
    pub fn assignments(&self) -> &[Option<u32>] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Checks that every assignment respects the disc coverage rule.
    pub fn check_validity(&self, route: &Route, sites: &[EnbSite]) -> Result<(), String> {
        if self.assignments.len() != route.len() {
            return Err("trace length differs from route length".into());
        }
        let by_id: BTreeMap<u32, &EnbSite> = sites.iter().map(|s| (s.id, s)).collect();
        for (reading, assigned) in route.readings().iter().zip(&self.assignments) {
            if let Some(id) = assigned {
                let site = by_id
                    .get(id)
                    .ok_or_else(|| format!("unknown site {id} in trace"))?;
                if !site.covers(reading.x, reading.y) {
                    return Err(format!(
                        "site {id} does not cover reading {}",
                        reading.index
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Collapsed allocation: the serving sequence, its handover count and the
/// fraction of readings spent on each site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverSummary {
    pub sequence: Vec<u32>,
    pub handover_count: usize,
    pub dwell_fractions: BTreeMap<u32, f64>,
}

impl HandoverSummary {
    /// `a->b->c` rendering of the sequence.
    pub fn sequence_text(&self) -> String {
        self.sequence
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("->")
    }

    /// The one-line form used in allocation dumps:
    /// `handovers=<n>;sequence=<a->b->...>`.
    pub fn summary_line(&self) -> String {
        format!(
            "handovers={};sequence={}",
            self.handover_count,
            self.sequence_text()
        )
    }
}

/// Nearest covering site per reading, ties to the smaller id. An empty
/// site list yields an all-uncovered trace.
pub fn allocate_nearest(
    route: &Route,
    sites: &[EnbSite],
) -> Result<AllocationTrace, HandoverError> {
    validate_sites(sites)?;
    let assignments = route
        .readings()
        .iter()
        .map(|r| nearest_covering(sites, r.x, r.y).map(|(_, id)| id))
        .collect();
    Ok(AllocationTrace { assignments })
}

fn nearest_covering(sites: &[EnbSite], x: f64, y: f64) -> Option<(f64, u32)> {
    sites
        .iter()
        .filter(|s| s.covers(x, y))
        .map(|s| (s.distance_to(x, y), s.id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
}

/// Sticky allocation: keep the current site while it still covers the
/// reading; switch only when another site beats it by more than `margin`
/// meters. The switch comparison uses the same (distance, id) ordering as
/// [`allocate_nearest`], so a zero margin reproduces it exactly.
pub fn allocate_hysteresis(
    route: &Route,
    sites: &[EnbSite],
    margin: f64,
) -> Result<AllocationTrace, HandoverError> {
    validate_sites(sites)?;
    if !margin.is_finite() || margin < 0.0 {
        return Err(HandoverError::InvalidMargin(margin));
    }
    let by_id: BTreeMap<u32, &EnbSite> = sites.iter().map(|s| (s.id, s)).collect();
    let mut assignments = Vec::with_capacity(route.len());
    let mut current: Option<u32> = None;
    for r in route.readings() {
        let best = nearest_covering(sites, r.x, r.y);
        let next = match current.map(|id| by_id[&id]).filter(|s| s.covers(r.x, r.y)) {
            Some(serving) => {
                let d_cur = serving.distance_to(r.x, r.y);
                match best {
                    Some((d_best, id_best)) if (d_best + margin, id_best) < (d_cur, serving.id) => {
                        Some(id_best)
                    }
                    _ => Some(serving.id),
                }
            }
            None => best.map(|(_, id)| id),
        };
        assignments.push(next);
        current = next;
    }
    Ok(AllocationTrace { assignments })
}

/// Collapses a trace into its handover summary.
///
/// Uncovered readings do not contribute segments: regaining the same site
/// after a coverage gap is not a handover. Dwell fractions are taken over
/// all readings, so they sum to 1 only on a fully covered route.
pub fn handover_sequence(trace: &AllocationTrace) -> HandoverSummary {
    let total = trace.len();
    let mut sequence = Vec::new();
    let mut dwell_counts: BTreeMap<u32, usize> = BTreeMap::new();
    for assigned in trace.assignments().iter().flatten() {
        if sequence.last() != Some(assigned) {
            sequence.push(*assigned);
        }
        *dwell_counts.entry(*assigned).or_insert(0) += 1;
    }
    let handover_count = sequence.len().saturating_sub(1);
    let dwell_fractions = dwell_counts
        .into_iter()
        .map(|(id, count)| (id, count as f64 / total as f64))
        .collect();
    HandoverSummary {
        sequence,
        handover_count,
        dwell_fractions,
    }
}

/// Minimal-handover allocation via greedy furthest reach.
///
/// For each site the route decomposes into maximal contiguous covered
/// intervals. Starting at reading 0, among the sites covering the current
/// reading the one whose contiguous coverage extends furthest wins (ties
/// to the smaller id), the segment runs to the end of that interval, and
/// the search resumes at the first reading past it. The resulting count is
/// globally minimal for disc coverage.
pub fn minimize_allocation(
    route: &Route,
    sites: &[EnbSite],
) -> Result<AllocationTrace, HandoverError> {
    validate_sites(sites)?;
    let n = route.len();
    if n == 0 {
        return Ok(AllocationTrace {
            assignments: Vec::new(),
        });
    }
    // reach[s][i]: last index of the contiguous covered run of site s
    // containing reading i, or None if s does not cover i.
    let mut reach: Vec<Vec<Option<usize>>> = Vec::with_capacity(sites.len());
    for site in sites {
        let covered: Vec<bool> = route
            .readings()
            .iter()
            .map(|r| site.covers(r.x, r.y))
            .collect();
        let mut run_end = vec![None; n];
        for i in (0..n).rev() {
            if covered[i] {
                run_end[i] = if i + 1 < n && covered[i + 1] {
                    run_end[i + 1]
                } else {
                    Some(i)
                };
            }
        }
        reach.push(run_end);
    }

    let mut assignments = vec![None; n];
    let mut i = 0;
    while i < n {
        let mut best: Option<(usize, u32)> = None; // (reach, id)
        for (s, site) in sites.iter().enumerate() {
            if let Some(end) = reach[s][i] {
                let candidate = (end, site.id);
                best = Some(match best {
                    None => candidate,
                    Some(cur) => {
                        if candidate.0 > cur.0 || (candidate.0 == cur.0 && candidate.1 < cur.1) {
                            candidate
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        let (end, id) = best.ok_or(HandoverError::UncoveredReading(i))?;
        for slot in assignments.iter_mut().take(end + 1).skip(i) {
            *slot = Some(id);
        }
        i = end + 1;
    }
    Ok(AllocationTrace { assignments })
}

/// The summary of the minimal-handover allocation.
pub fn minimize_handovers(
    route: &Route,
    sites: &[EnbSite],
) -> Result<HandoverSummary, HandoverError> {
    Ok(handover_sequence(&minimize_allocation(route, sites)?))
}

/// Tag key under which stored plans carry their route label.
pub const ROUTE_TAG: &str = "route";

/// Stores a minimized plan in the lake, promoting it through the zones up
/// to Insights and tagging it with the route label. `parents` are the
/// catalog ids of the route readings the plan was computed from.
pub fn store_plan(
    lake: &mut DataLake,
    route_label: &str,
    summary: &HandoverSummary,
    parents: &[ObjectId],
    t: SimTime,
) -> Result<ObjectId, HandoverError> {
    let payload = serde_json::to_vec(summary).expect("summary serializes");
    let allocated = lake.derive(parents, "handover-allocate", &payload, BTreeMap::new(), t)?;
    let minimized = lake.promote(allocated, "handover-minimize", &payload, t)?;
    let plan = lake.promote(minimized, "handover-plan", &payload, t)?;
    lake.tag_object(plan, ROUTE_TAG, route_label)?;
    Ok(plan)
}

/// Recalls the latest stored plan for a route from the Insights zone,
/// recording the access.
pub fn plan_from_history(
    lake: &mut DataLake,
    route_label: &str,
    now: SimTime,
) -> Result<HandoverSummary, HandoverError> {
    let id = lake
        .query_catalog(|e| {
            e.zone == Zone::Insights
                && e.tags.get(ROUTE_TAG).map(String::as_str) == Some(route_label)
        })
        .last()
        .map(|e| e.object_id)
        .ok_or_else(|| HandoverError::PlanNotFound(route_label.to_owned()))?;
    lake.record_access(id, now)?;
    let payload = lake.payload(id)?;
    serde_json::from_slice(payload).map_err(|e| HandoverError::PayloadFormat(e.to_string()))
}

/// Serializes sites as `id,x,y,range`.
pub fn sites_to_csv(sites: &[EnbSite]) -> String {
    let mut out = String::from("id,x,y,range\n");
    for s in sites {
        out.push_str(&format!("{},{},{},{}\n", s.id, s.x, s.y, s.range));
    }
    out
}

/// Parses an `id,x,y,range` site list.
pub fn sites_from_csv(text: &str) -> Result<Vec<EnbSite>, HandoverError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut sites = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| HandoverError::CsvFormat(e.to_string()))?;
        if record.len() != 4 {
            return Err(HandoverError::CsvFormat(format!(
                "expected 4 fields, got {}",
                record.len()
            )));
        }
        let num = |i: usize| -> Result<f64, HandoverError> {
            record
                .get(i)
                .unwrap_or_default()
                .parse()
                .map_err(|_| HandoverError::CsvFormat(format!("bad number in field {i}")))
        };
        sites.push(EnbSite {
            id: record
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|_| HandoverError::CsvFormat("bad site id".into()))?,
            x: num(1)?,
            y: num(2)?,
            range: num(3)?,
        });
    }
    validate_sites(&sites)?;
    Ok(sites)
}

/// Serializes a route as `index,t,x,y`.
pub fn route_to_csv(route: &Route) -> String {
    let mut out = String::from("index,t,x,y\n");
    for r in route.readings() {
        out.push_str(&format!("{},{},{},{}\n", r.index, r.time, r.x, r.y));
    }
    out
}

/// Parses an `index,t,x,y` route.
pub fn route_from_csv(text: &str) -> Result<Route, HandoverError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut readings = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| HandoverError::CsvFormat(e.to_string()))?;
        if record.len() != 4 {
            return Err(HandoverError::CsvFormat(format!(
                "expected 4 fields, got {}",
                record.len()
            )));
        }
        let num = |i: usize| -> Result<f64, HandoverError> {
            record
                .get(i)
                .unwrap_or_default()
                .parse()
                .map_err(|_| HandoverError::CsvFormat(format!("bad number in field {i}")))
        };
        readings.push(RouteReading {
            index: record
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|_| HandoverError::CsvFormat("bad index".into()))?,
            time: num(1)?,
            x: num(2)?,
            y: num(3)?,
        });
    }
    Route::new(readings)
}

/// Allocation dump: `index,enb_id` rows followed by the summary line.
pub fn allocation_output(trace: &AllocationTrace, summary: &HandoverSummary) -> String {
    let mut out = String::from("index,enb_id\n");
    for (i, assigned) in trace.assignments().iter().enumerate() {
        match assigned {
            Some(id) => out.push_str(&format!("{i},{id}\n")),
            None => out.push_str(&format!("{i},\n")),
        }
    }
    out.push_str(&summary.summary_line());
    out.push('\n');
    out
}

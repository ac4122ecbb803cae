//! Catalog types: zones, tiers, object identity and metadata entries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::SimTime;

use super::LakeError;

/// Maturity zone of a data object. Objects only ever move forward:
/// Ingestion → Distillation → Processing → Insights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Zone {
    Ingestion,
    Distillation,
    Processing,
    Insights,
}

impl Zone {
    pub const ALL: [Zone; 4] = [
        Zone::Ingestion,
        Zone::Distillation,
        Zone::Processing,
        Zone::Insights,
    ];

    /// The next zone in the maturity order, or `None` for the terminal one.
    pub fn successor(self) -> Option<Zone> {
        match self {
            Zone::Ingestion => Some(Zone::Distillation),
            Zone::Distillation => Some(Zone::Processing),
            Zone::Processing => Some(Zone::Insights),
            Zone::Insights => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Ingestion => "ingestion",
            Zone::Distillation => "distillation",
            Zone::Processing => "processing",
            Zone::Insights => "insights",
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Zone {
    type Err = LakeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ingestion" => Ok(Zone::Ingestion),
            "distillation" => Ok(Zone::Distillation),
            "processing" => Ok(Zone::Processing),
            "insights" => Ok(Zone::Insights),
            other => Err(LakeError::UnknownZone(other.to_owned())),
        }
    }
}

/// Storage tier holding a payload. Device buffering only appears as the
/// origin of ingested payloads; catalog entries live on Edge or Cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    Device,
    Edge,
    Cloud,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Device, Tier::Edge, Tier::Cloud];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Device => "device",
            Tier::Edge => "edge",
            Tier::Cloud => "cloud",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = LakeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "device" => Ok(Tier::Device),
            "edge" => Ok(Tier::Edge),
            "cloud" => Ok(Tier::Cloud),
            other => Err(LakeError::UnknownTier(other.to_owned())),
        }
    }
}

/// Unique identifier of a cataloged data object.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ObjectId {
    type Err = LakeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<u64>()
            .map(ObjectId)
            .map_err(|_| LakeError::BadObjectId(s.to_owned()))
    }
}

/// Resolved view of a stored payload: its id, storage key and size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataObject {
    pub object_id: ObjectId,
    pub payload_ref: String,
    pub size: u64,
}

/// Provenance of a derived entry: the transform that produced it and its
/// parent objects. Ingested entries have no transform and no parents.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Lineage {
    pub transform: Option<String>,
    pub parents: Vec<ObjectId>,
}

impl Lineage {
    pub fn is_root(&self) -> bool {
        self.parents.is_empty()
    }
}

/// The metadata record through which every data object is logically
/// ingested. All queries run against these entries; payloads are only
/// touched when an application actually reads data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub object_id: ObjectId,
    pub zone: Zone,
    pub tier: Tier,
    /// Storage key; resolvable in exactly one tier's store at a time.
    pub location: String,
    pub created_at: SimTime,
    /// Originating topic (ingested entries) or transform name (derived).
    pub source: String,
    pub lineage: Lineage,
    /// Non-decreasing access timestamps; the first one is creation.
    pub access_history: Vec<SimTime>,
    pub tags: BTreeMap<String, String>,
    pub meta_features: BTreeMap<String, f64>,
    pub size: u64,
}

impl CatalogEntry {
    /// Number of accesses with timestamp in `(now - window, now]`.
    pub fn accesses_in_window(&self, now: SimTime, window: f64) -> usize {
        self.access_history
            .iter()
            .filter(|&&t| t > now - window && t <= now)
            .count()
    }

    pub fn age(&self, now: SimTime) -> f64 {
        now - self.created_at
    }
}

/// Hot/cold tiering thresholds. All fields are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierPolicy {
    hot_access_threshold: u32,
    window: f64,
    cold_age: f64,
}

impl TierPolicy {
    pub fn new(hot_access_threshold: u32, window: f64, cold_age: f64) -> Result<Self, LakeError> {
        if hot_access_threshold == 0 {
            return Err(LakeError::InvalidPolicy("hot_access_threshold must be > 0"));
        }
        if !window.is_finite() || window <= 0.0 {
            return Err(LakeError::InvalidPolicy("window must be > 0"));
        }
        if !cold_age.is_finite() || cold_age <= 0.0 {
            return Err(LakeError::InvalidPolicy("cold_age must be > 0"));
        }
        Ok(TierPolicy {
            hot_access_threshold,
            window,
            cold_age,
        })
    }

    pub fn hot_access_threshold(&self) -> u32 {
        self.hot_access_threshold
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn cold_age(&self) -> f64 {
        self.cold_age
    }
}

/// A tier move proposed by the tiering policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferJob {
    pub object_id: ObjectId,
    pub from: Tier,
    pub to: Tier,
}

/// One executed transfer batch, as recorded on the transfer log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferBatch {
    pub index: usize,
    pub target: Tier,
    pub objects: Vec<ObjectId>,
}

/// Ancestry edge: `parent` feeds `child` through `transform`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineageEdge {
    pub parent: ObjectId,
    pub child: ObjectId,
    pub transform: String,
}

/// The transitive ancestry of one object. Acyclic by construction since
/// parents always predate children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineageGraph {
    pub root: ObjectId,
    pub nodes: Vec<ObjectId>,
    pub edges: Vec<LineageEdge>,
}

impl LineageGraph {
    /// Incoming edge count of the root (its direct parents).
    pub fn root_parent_count(&self) -> usize {
        self.edges.iter().filter(|e| e.child == self.root).count()
    }

    /// True iff every edge goes from a smaller to a larger object id,
    /// which rules out cycles.
    pub fn is_acyclic(&self) -> bool {
        self.edges.iter().all(|e| e.parent < e.child)
    }
}

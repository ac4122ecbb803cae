//! The logical data lake: zone-based metadata catalog, tiered payload
//! storage, batched transfer orchestration and the hot/cold tiering policy.
//!
//! Every data object is logically ingested through a [`CatalogEntry`];
//! queries run purely against metadata and are independent of where the
//! payload currently lives. Moving an object between tiers rewrites only
//! its `tier` and `location` fields — everything else is preserved, so the
//! object stays virtually ingested at the edge even while its bytes sit in
//! the cloud.
//!
//! All operations take `&mut self`, so exclusive access (and with it
//! linearizability) is enforced by the borrow checker; shared use goes
//! through a `Mutex<DataLake>`. Each entry update is atomic: a query never
//! observes a half-moved object.

mod catalog;
mod storage;

pub use catalog::{
    CatalogEntry, DataObject, Lineage, LineageEdge, LineageGraph, ObjectId, Tier, TierPolicy,
    TransferBatch, TransferJob, Zone,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::databus::Topic;
use crate::SimTime;

use storage::TierStores;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LakeError {
    #[error("payload must be non-empty")]
    EmptyPayload,
    #[error("object {0} not found")]
    NotFound(ObjectId),
    #[error("object {0} is in the terminal zone")]
    TerminalZone(ObjectId),
    #[error("object {id} already resides in tier {tier}")]
    AlreadyInTier { id: ObjectId, tier: Tier },
    #[error("access to {id} out of order: last {last}, got {got}")]
    AccessOutOfOrder {
        id: ObjectId,
        last: SimTime,
        got: SimTime,
    },
    #[error("batch size must be positive")]
    InvalidBatchSize,
    #[error("derived entries need at least one parent")]
    NoParents,
    #[error("invalid tier policy: {0}")]
    InvalidPolicy(&'static str),
    #[error("unknown zone `{0}`")]
    UnknownZone(String),
    #[error("unknown tier `{0}`")]
    UnknownTier(String),
    #[error("bad object id `{0}`")]
    BadObjectId(String),
    #[error("invalid simulation time {0}")]
    InvalidTime(f64),
    #[error("storage lost key `{0}`")]
    StorageMiss(String),
    #[error("malformed catalog csv: {0}")]
    CsvFormat(String),
}

/// Outcome of one transfer call: objects moved, per-item failures and the
/// number of batches executed.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub moved: Vec<ObjectId>,
    pub failed: Vec<(ObjectId, LakeError)>,
    pub batches: usize,
}

/// Catalog statistics used by run reports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LakeStats {
    pub total_entries: usize,
    pub entries_per_zone: BTreeMap<String, usize>,
    pub entries_per_tier: BTreeMap<String, usize>,
    pub transfer_batches: usize,
    pub objects_transferred: usize,
    pub bytes_per_tier: BTreeMap<String, u64>,
}

/// The data lake: catalog, payload stores and transfer log.
#[derive(Debug, Default)]
pub struct DataLake {
    catalog: BTreeMap<ObjectId, CatalogEntry>,
    stores: TierStores,
    transfer_log: Vec<TransferBatch>,
    next_id: u64,
}

impl DataLake {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_id(&mut self) -> ObjectId {
        self.next_id += 1;
        ObjectId(self.next_id)
    }

    fn location_key(tier: Tier, id: ObjectId) -> String {
        format!("{}/{:08}", tier, id.0)
    }

    fn check_time(t: SimTime) -> Result<(), LakeError> {
        if t.is_finite() {
            Ok(())
        } else {
            Err(LakeError::InvalidTime(t))
        }
    }

    fn insert_entry(
        &mut self,
        zone: Zone,
        source: String,
        lineage: Lineage,
        tags: BTreeMap<String, String>,
        payload: &[u8],
        t: SimTime,
    ) -> Result<ObjectId, LakeError> {
        if payload.is_empty() {
            return Err(LakeError::EmptyPayload);
        }
        Self::check_time(t)?;
        let id = self.fresh_id();
        let tier = Tier::Edge;
        let location = Self::location_key(tier, id);
        self.stores.put(tier, location.clone(), payload.to_vec());
        let entry = CatalogEntry {
            object_id: id,
            zone,
            tier,
            location,
            created_at: t,
            source,
            lineage,
            access_history: vec![t],
            tags,
            meta_features: BTreeMap::new(),
            size: payload.len() as u64,
        };
        self.catalog.insert(id, entry);
        Ok(id)
    }

    /// Ingests a raw payload collected from a topic. The entry starts in
    /// the Ingestion zone on the Edge tier with an empty lineage and a
    /// single (creation) access record.
    pub fn ingest(
        &mut self,
        payload: &[u8],
        source: &Topic,
        tags: BTreeMap<String, String>,
        t: SimTime,
    ) -> Result<ObjectId, LakeError> {
        self.insert_entry(
            Zone::Ingestion,
            source.to_string(),
            Lineage::default(),
            tags,
            payload,
            t,
        )
    }

    /// Promotes one object into the next zone through `transform`,
    /// producing a new entry whose lineage points at the source. The
    /// source entry is untouched.
    pub fn promote(
        &mut self,
        parent: ObjectId,
        transform: &str,
        payload: &[u8],
        t: SimTime,
    ) -> Result<ObjectId, LakeError> {
        self.derive(&[parent], transform, payload, BTreeMap::new(), t)
    }

    /// Creates an entry derived from one or more parents. The new entry
    /// lands in the successor of the most mature parent zone.
    pub fn derive(
        &mut self,
        parents: &[ObjectId],
        transform: &str,
        payload: &[u8],
        tags: BTreeMap<String, String>,
        t: SimTime,
    ) -> Result<ObjectId, LakeError> {
        if parents.is_empty() {
            return Err(LakeError::NoParents);
        }
        let mut max_zone = Zone::Ingestion;
        for pid in parents {
            let parent = self.catalog.get(pid).ok_or(LakeError::NotFound(*pid))?;
            max_zone = max_zone.max(parent.zone);
        }
        let zone = max_zone.successor().ok_or_else(|| {
            let terminal = parents
                .iter()
                .find(|p| self.catalog[p].zone == max_zone)
                .copied()
                .unwrap_or(parents[0]);
            LakeError::TerminalZone(terminal)
        })?;
        self.insert_entry(
            zone,
            transform.to_owned(),
            Lineage {
                transform: Some(transform.to_owned()),
                parents: parents.to_vec(),
            },
            tags,
            payload,
            t,
        )
    }

    /// Moves objects to `target` in batches of at most `batch_size`.
    ///
    /// Unknown ids and objects already in the target tier fail per item;
    /// the remaining items are still transferred. Only `tier` and
    /// `location` change on each moved entry.
    pub fn transfer(
        &mut self,
        ids: &[ObjectId],
        target: Tier,
        batch_size: usize,
    ) -> Result<TransferReport, LakeError> {
        if batch_size == 0 {
            return Err(LakeError::InvalidBatchSize);
        }
        let mut report = TransferReport {
            moved: Vec::new(),
            failed: Vec::new(),
            batches: 0,
        };
        for chunk in ids.chunks(batch_size) {
            let mut batch_objects = Vec::new();
            for &id in chunk {
                match self.move_object(id, target) {
                    Ok(()) => {
                        batch_objects.push(id);
                        report.moved.push(id);
                    }
                    Err(e) => report.failed.push((id, e)),
                }
            }
            if !batch_objects.is_empty() {
                self.transfer_log.push(TransferBatch {
                    index: self.transfer_log.len(),
                    target,
                    objects: batch_objects,
                });
                report.batches += 1;
            }
        }
        Ok(report)
    }

    fn move_object(&mut self, id: ObjectId, target: Tier) -> Result<(), LakeError> {
        let entry = self.catalog.get(&id).ok_or(LakeError::NotFound(id))?;
        if entry.tier == target {
            return Err(LakeError::AlreadyInTier { id, tier: target });
        }
        let from = entry.tier;
        let old_key = entry.location.clone();
        let new_key = Self::location_key(target, id);
        self.stores
            .relocate(from, &old_key, target, new_key.clone())
            .ok_or(LakeError::StorageMiss(old_key))?;
        let entry = self.catalog.get_mut(&id).expect("entry vanished");
        entry.tier = target;
        entry.location = new_key;
        Ok(())
    }

    /// Appends an access record. Accesses must be non-decreasing per entry.
    pub fn record_access(&mut self, id: ObjectId, t: SimTime) -> Result<(), LakeError> {
        Self::check_time(t)?;
        let entry = self.catalog.get_mut(&id).ok_or(LakeError::NotFound(id))?;
        if let Some(&last) = entry.access_history.last() {
            if t < last {
                return Err(LakeError::AccessOutOfOrder { id, last, got: t });
            }
        }
        entry.access_history.push(t);
        Ok(())
    }

    /// Sets a governance tag on an entry (manual labeling).
    pub fn tag_object(&mut self, id: ObjectId, key: &str, value: &str) -> Result<(), LakeError> {
        let entry = self.catalog.get_mut(&id).ok_or(LakeError::NotFound(id))?;
        entry.tags.insert(key.to_owned(), value.to_owned());
        Ok(())
    }

    /// Stores an application-computed meta-feature on an entry.
    pub fn set_meta_feature(
        &mut self,
        id: ObjectId,
        key: &str,
        value: f64,
    ) -> Result<(), LakeError> {
        let entry = self.catalog.get_mut(&id).ok_or(LakeError::NotFound(id))?;
        entry.meta_features.insert(key.to_owned(), value);
        Ok(())
    }

    /// Proposes tier moves under the hot/cold policy, sorted by object id.
    ///
    /// Edge entries that were accessed fewer than `hot_access_threshold`
    /// times inside the window and are at least `cold_age` old are demoted
    /// to the cloud; cloud entries at or above the threshold are promoted
    /// back to the edge. Nothing is executed here.
    pub fn apply_tiering(&self, policy: &TierPolicy, now: SimTime) -> Vec<TransferJob> {
        let mut jobs = Vec::new();
        for (id, entry) in &self.catalog {
            let recent = entry.accesses_in_window(now, policy.window()) as u32;
            match entry.tier {
                Tier::Edge => {
                    if recent < policy.hot_access_threshold() && entry.age(now) >= policy.cold_age()
                    {
                        jobs.push(TransferJob {
                            object_id: *id,
                            from: Tier::Edge,
                            to: Tier::Cloud,
                        });
                    }
                }
                Tier::Cloud => {
                    if recent >= policy.hot_access_threshold() {
                        jobs.push(TransferJob {
                            object_id: *id,
                            from: Tier::Cloud,
                            to: Tier::Edge,
                        });
                    }
                }
                Tier::Device => {}
            }
        }
        jobs
    }

    /// Executes tiering jobs, batching by target tier.
    pub fn execute_tiering(
        &mut self,
        jobs: &[TransferJob],
        batch_size: usize,
    ) -> Result<TransferReport, LakeError> {
        let mut merged = TransferReport {
            moved: Vec::new(),
            failed: Vec::new(),
            batches: 0,
        };
        for target in Tier::ALL {
            let ids: Vec<ObjectId> = jobs
                .iter()
                .filter(|j| j.to == target)
                .map(|j| j.object_id)
                .collect();
            if ids.is_empty() {
                continue;
            }
            let report = self.transfer(&ids, target, batch_size)?;
            merged.moved.extend(report.moved);
            merged.failed.extend(report.failed);
            merged.batches += report.batches;
        }
        Ok(merged)
    }

    /// All entries matching `predicate`, sorted by object id. Queries
    /// never touch payloads.
    pub fn query_catalog(&self, predicate: impl Fn(&CatalogEntry) -> bool) -> Vec<&CatalogEntry> {
        self.catalog.values().filter(|e| predicate(e)).collect()
    }

    pub fn entry(&self, id: ObjectId) -> Option<&CatalogEntry> {
        self.catalog.get(&id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.catalog.values()
    }

    pub fn len(&self) -> usize {
        self.catalog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.catalog.is_empty()
    }

    /// Reads an object's payload from whichever tier currently holds it.
    pub fn payload(&self, id: ObjectId) -> Result<&[u8], LakeError> {
        let entry = self.catalog.get(&id).ok_or(LakeError::NotFound(id))?;
        self.stores
            .get(entry.tier, &entry.location)
            .ok_or_else(|| LakeError::StorageMiss(entry.location.clone()))
    }

    /// Resolved storage view of one object.
    pub fn data_object(&self, id: ObjectId) -> Result<DataObject, LakeError> {
        let entry = self.catalog.get(&id).ok_or(LakeError::NotFound(id))?;
        Ok(DataObject {
            object_id: id,
            payload_ref: entry.location.clone(),
            size: entry.size,
        })
    }

    /// The tier that actually holds the payload bytes for `id`.
    pub fn resolve_tier(&self, id: ObjectId) -> Result<Tier, LakeError> {
        let entry = self.catalog.get(&id).ok_or(LakeError::NotFound(id))?;
        self.stores
            .resolve(&entry.location)
            .ok_or_else(|| LakeError::StorageMiss(entry.location.clone()))
    }

    /// Full transitive ancestry of `id`: nodes sorted ascending, edges
    /// labeled with the transform that produced each child.
    pub fn lineage_of(&self, id: ObjectId) -> Result<LineageGraph, LakeError> {
        if !self.catalog.contains_key(&id) {
            return Err(LakeError::NotFound(id));
        }
        let mut nodes = std::collections::BTreeSet::new();
        let mut edges = Vec::new();
        let mut stack = vec![id];
        while let Some(current) = stack.pop() {
            if !nodes.insert(current) {
                continue;
            }
            let entry = self
                .catalog
                .get(&current)
                .ok_or(LakeError::NotFound(current))?;
            if let Some(transform) = &entry.lineage.transform {
                for parent in &entry.lineage.parents {
                    edges.push(LineageEdge {
                        parent: *parent,
                        child: current,
                        transform: transform.clone(),
                    });
                    stack.push(*parent);
                }
            }
        }
        edges.sort_by_key(|a| (a.parent, a.child));
        Ok(LineageGraph {
            root: id,
            nodes: nodes.into_iter().collect(),
            edges,
        })
    }

    pub fn transfer_log(&self) -> &[TransferBatch] {
        &self.transfer_log
    }

    pub fn stats(&self) -> LakeStats {
        let mut stats = LakeStats {
            total_entries: self.catalog.len(),
            ..LakeStats::default()
        };
        for zone in Zone::ALL {
            stats.entries_per_zone.insert(zone.to_string(), 0);
        }
        for tier in Tier::ALL {
            stats.entries_per_tier.insert(tier.to_string(), 0);
            stats
                .bytes_per_tier
                .insert(tier.to_string(), self.stores.bytes(tier));
        }
        for entry in self.catalog.values() {
            *stats
                .entries_per_zone
                .get_mut(entry.zone.as_str())
                .expect("zone bucket") += 1;
            *stats
                .entries_per_tier
                .get_mut(entry.tier.as_str())
                .expect("tier bucket") += 1;
        }
        stats.transfer_batches = self.transfer_log.len();
        stats.objects_transferred = self.transfer_log.iter().map(|b| b.objects.len()).sum();
        stats
    }

    /// Dumps the catalog as CSV:
    /// `object_id,zone,tier,location,created_at,source,parents,access_count,tags`.
    pub fn catalog_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record([
            "object_id",
            "zone",
            "tier",
            "location",
            "created_at",
            "source",
            "parents",
            "access_count",
            "tags",
        ])
        .expect("csv header");
        for entry in self.catalog.values() {
            let parents = entry
                .lineage
                .parents
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";");
            let tags = entry
                .tags
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            wtr.write_record([
                entry.object_id.to_string(),
                entry.zone.to_string(),
                entry.tier.to_string(),
                entry.location.clone(),
                entry.created_at.to_string(),
                entry.source.clone(),
                parents,
                entry.access_history.len().to_string(),
                tags,
            ])
            .expect("csv row");
        }
        String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
    }

    /// Renders the ancestry of `id` as indented text, children above
    /// parents.
    pub fn lineage_text(&self, id: ObjectId) -> Result<String, LakeError> {
        let records = self
            .catalog
            .values()
            .map(CatalogRecord::from_entry)
            .collect::<Vec<_>>();
        render_lineage_text(&records, id)
    }
}

/// One parsed row of a catalog CSV dump.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRecord {
    pub object_id: ObjectId,
    pub zone: Zone,
    pub tier: Tier,
    pub location: String,
    pub created_at: SimTime,
    pub source: String,
    pub parents: Vec<ObjectId>,
    pub access_count: usize,
    pub tags: BTreeMap<String, String>,
}

impl CatalogRecord {
    pub fn from_entry(entry: &CatalogEntry) -> Self {
        CatalogRecord {
            object_id: entry.object_id,
            zone: entry.zone,
            tier: entry.tier,
            location: entry.location.clone(),
            created_at: entry.created_at,
            source: entry.source.clone(),
            parents: entry.lineage.parents.clone(),
            access_count: entry.access_history.len(),
            tags: entry.tags.clone(),
        }
    }
}

/// Parses a catalog CSV dump back into records.
pub fn parse_catalog_csv(text: &str) -> Result<Vec<CatalogRecord>, LakeError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| LakeError::CsvFormat(e.to_string()))?;
        if row.len() != 9 {
            return Err(LakeError::CsvFormat(format!(
                "expected 9 fields, got {}",
                row.len()
            )));
        }
        let field = |i: usize| row.get(i).unwrap_or_default();
        let parents = if field(6).is_empty() {
            Vec::new()
        } else {
            field(6)
                .split(';')
                .map(str::parse)
                .collect::<Result<Vec<ObjectId>, _>>()?
        };
        let mut tags = BTreeMap::new();
        if !field(8).is_empty() {
            for pair in field(8).split(';') {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| LakeError::CsvFormat(format!("bad tag `{pair}`")))?;
                tags.insert(k.to_owned(), v.to_owned());
            }
        }
        records.push(CatalogRecord {
            object_id: field(0).parse()?,
            zone: field(1).parse()?,
            tier: field(2).parse()?,
            location: field(3).to_owned(),
            created_at: field(4)
                .parse()
                .map_err(|_| LakeError::CsvFormat(format!("bad time `{}`", field(4))))?,
            source: field(5).to_owned(),
            parents,
            access_count: field(7)
                .parse()
                .map_err(|_| LakeError::CsvFormat(format!("bad count `{}`", field(7))))?,
            tags,
        });
    }
    Ok(records)
}

/// Renders an ancestry tree from catalog records, children above parents.
pub fn render_lineage_text(records: &[CatalogRecord], root: ObjectId) -> Result<String, LakeError> {
    let by_id: BTreeMap<ObjectId, &CatalogRecord> =
        records.iter().map(|r| (r.object_id, r)).collect();
    if !by_id.contains_key(&root) {
        return Err(LakeError::NotFound(root));
    }
    let mut out = String::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((id, depth)) = stack.pop() {
        let record = by_id.get(&id).ok_or(LakeError::NotFound(id))?;
        out.push_str(&format!(
            "{}{} [{}/{}] {}\n",
            "  ".repeat(depth),
            record.object_id,
            record.zone,
            record.tier,
            record.source
        ));
        for parent in record.parents.iter().rev() {
            stack.push((*parent, depth + 1));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::databus::Topic;

    fn topic(s: &str) -> Topic {
        Topic::parse(s).unwrap()
    }

    fn tags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn ingest_n(lake: &mut DataLake, n: usize) -> Vec<ObjectId> {
        (0..n)
            .map(|i| {
                lake.ingest(
                    &[i as u8 + 1],
                    &topic("its/v/loc"),
                    BTreeMap::new(),
                    i as f64,
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn ingest_sets_the_documented_postconditions() {
        let mut lake = DataLake::new();
        let id = lake
            .ingest(
                &[0u8; 128],
                &topic("its/v1/loc"),
                tags(&[("src", "vehicle")]),
                2.0,
            )
            .unwrap();
        let entry = lake.entry(id).unwrap();
        assert_eq!(entry.zone, Zone::Ingestion);
        assert_eq!(entry.tier, Tier::Edge);
        assert!(entry.lineage.is_root());
        assert_eq!(entry.access_history, vec![2.0]);
        assert_eq!(entry.source, "its/v1/loc");
        assert_eq!(entry.tags.get("src").unwrap(), "vehicle");
        assert_eq!(entry.size, 128);
        assert_eq!(lake.payload(id).unwrap().len(), 128);
        assert_eq!(lake.resolve_tier(id).unwrap(), Tier::Edge);
    }

    #[test]
    fn ingests_get_distinct_ids_and_reject_empty_payloads() {
        let mut lake = DataLake::new();
        let a = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        let b = lake
            .ingest(&[2], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        assert_ne!(a, b);
        assert_eq!(
            lake.ingest(&[], &topic("t"), BTreeMap::new(), 0.0)
                .unwrap_err(),
            LakeError::EmptyPayload
        );
    }

    #[test]
    fn promote_moves_one_zone_forward() {
        let mut lake = DataLake::new();
        let a = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        let b = lake.promote(a, "clean", &[2], 1.0).unwrap();
        let entry = lake.entry(b).unwrap();
        assert_eq!(entry.zone, Zone::Distillation);
        assert_eq!(entry.lineage.parents, vec![a]);
        assert_eq!(entry.lineage.transform.as_deref(), Some("clean"));
        assert_eq!(entry.source, "clean");
        // source untouched
        assert_eq!(lake.entry(a).unwrap().zone, Zone::Ingestion);

        let c = lake.promote(b, "refine", &[3], 2.0).unwrap();
        let d = lake.promote(c, "publish", &[4], 3.0).unwrap();
        assert_eq!(lake.entry(d).unwrap().zone, Zone::Insights);
        let graph = lake.lineage_of(d).unwrap();
        assert_eq!(graph.nodes.len(), 4);
        assert_eq!(graph.edges.len(), 3);

        assert_eq!(
            lake.promote(d, "too-far", &[5], 4.0).unwrap_err(),
            LakeError::TerminalZone(d)
        );
        assert_eq!(
            lake.promote(ObjectId(999), "x", &[1], 0.0).unwrap_err(),
            LakeError::NotFound(ObjectId(999))
        );
    }

    #[test]
    fn transfer_changes_only_tier_and_location() {
        let mut lake = DataLake::new();
        let id = lake
            .ingest(&[9u8; 64], &topic("its/v1/loc"), tags(&[("k", "v")]), 1.5)
            .unwrap();
        lake.record_access(id, 3.0).unwrap();
        let before = lake.entry(id).unwrap().clone();

        lake.transfer(&[id], Tier::Cloud, 8).unwrap();
        let after = lake.entry(id).unwrap().clone();
        assert_eq!(after.tier, Tier::Cloud);
        assert_ne!(after.location, before.location);
        assert_eq!(lake.resolve_tier(id).unwrap(), Tier::Cloud);

        let normalize = |mut e: CatalogEntry| {
            e.tier = Tier::Edge;
            e.location.clear();
            e
        };
        assert_eq!(normalize(before.clone()), normalize(after));

        // round trip back to the edge restores everything but the key
        lake.transfer(&[id], Tier::Edge, 8).unwrap();
        let back = lake.entry(id).unwrap().clone();
        assert_eq!(back, before);
    }

    #[test]
    fn transfer_batches_and_per_item_errors() {
        let mut lake = DataLake::new();
        let ids = ingest_n(&mut lake, 10);
        let report = lake.transfer(&ids, Tier::Cloud, 4).unwrap();
        assert_eq!(report.moved.len(), 10);
        assert_eq!(report.batches, 3);
        assert_eq!(lake.transfer_log().len(), 3);

        // unknown id fails per item; the rest still move
        let mut with_ghost = vec![ObjectId(999)];
        with_ghost.extend(ingest_n(&mut lake, 2));
        let report = lake.transfer(&with_ghost, Tier::Cloud, 10).unwrap();
        assert_eq!(report.moved.len(), 2);
        assert_eq!(report.failed.len(), 1);
        assert_eq!(report.failed[0].1, LakeError::NotFound(ObjectId(999)));

        // moving to the current tier is a per-item error
        let report = lake.transfer(&ids[..1], Tier::Cloud, 1).unwrap();
        assert!(matches!(
            report.failed[0].1,
            LakeError::AlreadyInTier { .. }
        ));
        assert_eq!(
            lake.transfer(&ids, Tier::Edge, 0).unwrap_err(),
            LakeError::InvalidBatchSize
        );
    }

    #[test]
    fn record_access_appends_in_order() {
        let mut lake = DataLake::new();
        let id = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 1.0)
            .unwrap();
        lake.record_access(id, 5.0).unwrap();
        assert_eq!(lake.entry(id).unwrap().access_history, vec![1.0, 5.0]);
        lake.record_access(id, 7.0).unwrap();
        let history = &lake.entry(id).unwrap().access_history;
        assert!(history.windows(2).all(|w| w[0] <= w[1]));
        assert!(matches!(
            lake.record_access(id, 0.5).unwrap_err(),
            LakeError::AccessOutOfOrder { .. }
        ));
    }

    #[test]
    fn tiering_policy_proposes_demotions_and_promotions() {
        let policy = TierPolicy::new(2, 10.0, 5.0).unwrap();
        let mut lake = DataLake::new();
        assert!(lake.apply_tiering(&policy, 100.0).is_empty());

        // cold edge entry: created long ago, no recent accesses
        let cold = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        // hot edge entry: plenty of recent accesses
        let hot = lake
            .ingest(&[2], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        lake.record_access(hot, 98.0).unwrap();
        lake.record_access(hot, 99.0).unwrap();
        // cloud entry accessed at threshold: promotion
        let recall = lake
            .ingest(&[3], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        lake.transfer(&[recall], Tier::Cloud, 1).unwrap();
        lake.record_access(recall, 99.0).unwrap();
        lake.record_access(recall, 100.0).unwrap();

        let jobs = lake.apply_tiering(&policy, 100.0);
        assert_eq!(
            jobs,
            vec![
                TransferJob {
                    object_id: cold,
                    from: Tier::Edge,
                    to: Tier::Cloud
                },
                TransferJob {
                    object_id: recall,
                    from: Tier::Cloud,
                    to: Tier::Edge
                },
            ]
        );

        // executing the jobs and re-applying proposes nothing new for them
        lake.execute_tiering(&jobs, 4).unwrap();
        let again = lake.apply_tiering(&policy, 100.0);
        assert!(again
            .iter()
            .all(|j| j.object_id != cold && j.object_id != recall));
    }

    #[test]
    fn tier_policy_validates_fields() {
        assert!(TierPolicy::new(0, 1.0, 1.0).is_err());
        assert!(TierPolicy::new(1, 0.0, 1.0).is_err());
        assert!(TierPolicy::new(1, 1.0, -1.0).is_err());
        assert!(TierPolicy::new(1, 1.0, 1.0).is_ok());
    }

    #[test]
    fn query_catalog_filters_and_sorts() {
        let mut lake = DataLake::new();
        let a = lake
            .ingest(&[1], &topic("x/a"), BTreeMap::new(), 0.0)
            .unwrap();
        let b = lake
            .ingest(&[2], &topic("x/b"), BTreeMap::new(), 0.0)
            .unwrap();
        let c = lake.promote(a, "t", &[3], 1.0).unwrap();

        let ingested = lake.query_catalog(|e| e.zone == Zone::Ingestion);
        assert_eq!(
            ingested.iter().map(|e| e.object_id).collect::<Vec<_>>(),
            vec![a, b]
        );
        assert!(lake
            .query_catalog(|e| e.tags.contains_key("nope"))
            .is_empty());
        let all = lake.query_catalog(|_| true);
        assert_eq!(
            all.iter().map(|e| e.object_id).collect::<Vec<_>>(),
            vec![a, b, c]
        );
    }

    #[test]
    fn lineage_handles_fan_in_and_diamonds() {
        let mut lake = DataLake::new();
        let fresh = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        let g = lake.lineage_of(fresh).unwrap();
        assert_eq!(g.nodes, vec![fresh]);
        assert!(g.edges.is_empty());

        let parents = ingest_n(&mut lake, 5);
        let agg = lake
            .derive(&parents, "aggregate", &[1], BTreeMap::new(), 1.0)
            .unwrap();
        let g = lake.lineage_of(agg).unwrap();
        assert_eq!(g.root_parent_count(), 5);

        // diamond: two transforms share a parent, then merge
        let p = lake
            .ingest(&[1], &topic("t"), BTreeMap::new(), 0.0)
            .unwrap();
        let l = lake.promote(p, "left", &[1], 1.0).unwrap();
        let r = lake.promote(p, "right", &[1], 1.0).unwrap();
        let m = lake
            .derive(&[l, r], "merge", &[1], BTreeMap::new(), 2.0)
            .unwrap();
        let g = lake.lineage_of(m).unwrap();
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.edges.len(), 4);
        assert!(g.is_acyclic());

        assert_eq!(
            lake.lineage_of(ObjectId(12345)).unwrap_err(),
            LakeError::NotFound(ObjectId(12345))
        );
    }

    #[test]
    fn derive_requires_parents() {
        let mut lake = DataLake::new();
        assert_eq!(
            lake.derive(&[], "x", &[1], BTreeMap::new(), 0.0)
                .unwrap_err(),
            LakeError::NoParents
        );
    }

    #[test]
    fn catalog_csv_round_trips_through_the_parser() {
        let mut lake = DataLake::new();
        let a = lake
            .ingest(
                &[1, 2],
                &topic("its/v1/loc"),
                tags(&[("kind", "loc"), ("v", "1")]),
                0.5,
            )
            .unwrap();
        let b = lake.promote(a, "plan", &[3], 1.5).unwrap();
        lake.transfer(&[a], Tier::Cloud, 4).unwrap();
        lake.record_access(b, 2.0).unwrap();

        let csv_text = lake.catalog_csv();
        let records = parse_catalog_csv(&csv_text).unwrap();
        assert_eq!(records.len(), 2);
        let ra = &records[0];
        assert_eq!(ra.object_id, a);
        assert_eq!(ra.zone, Zone::Ingestion);
        assert_eq!(ra.tier, Tier::Cloud);
        assert_eq!(ra.created_at, 0.5);
        assert_eq!(ra.tags.get("kind").unwrap(), "loc");
        let rb = &records[1];
        assert_eq!(rb.parents, vec![a]);
        assert_eq!(rb.access_count, 2);
        assert_eq!(rb.source, "plan");
    }

    #[test]
    fn lineage_text_is_indented_children_first() {
        let mut lake = DataLake::new();
        let a = lake
            .ingest(&[1], &topic("its/v1/loc"), BTreeMap::new(), 0.0)
            .unwrap();
        let b = lake
            .ingest(&[1], &topic("its/v2/loc"), BTreeMap::new(), 0.0)
            .unwrap();
        let plan = lake
            .derive(&[a, b], "plan", &[1], BTreeMap::new(), 1.0)
            .unwrap();
        let text = lake.lineage_text(plan).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with(&format!("{plan} ")));
        assert!(lines[1].starts_with("  1 "));
        assert!(lines[2].starts_with("  2 "));
        assert!(lines[1].contains("its/v1/loc"));
    }

    #[test]
    fn stats_count_zones_and_tiers() {
        let mut lake = DataLake::new();
        let ids = ingest_n(&mut lake, 3);
        lake.promote(ids[0], "t", &[1], 3.0).unwrap();
        lake.transfer(&ids[1..2], Tier::Cloud, 2).unwrap();
        let stats = lake.stats();
        assert_eq!(stats.total_entries, 4);
        assert_eq!(stats.entries_per_zone["ingestion"], 3);
        assert_eq!(stats.entries_per_zone["distillation"], 1);
        assert_eq!(stats.entries_per_tier["edge"], 3);
        assert_eq!(stats.entries_per_tier["cloud"], 1);
        assert_eq!(stats.objects_transferred, 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        #[derive(Debug, Clone)]
        struct MoveOp {
            target: Tier,
            member_mask: u16,
            batch_size: usize,
        }

        fn move_op() -> impl Strategy<Value = MoveOp> {
            (0usize..3, any::<u16>(), 1usize..5).prop_map(|(t, member_mask, batch_size)| MoveOp {
                target: Tier::ALL[t],
                member_mask,
                batch_size,
            })
        }

        fn strip_placement(mut e: CatalogEntry) -> CatalogEntry {
            e.tier = Tier::Edge;
            e.location.clear();
            e
        }

        proptest! {
            // Transfer preservation over random move sequences: every
            // field except {tier, location} is invariant, zones never
            // decrease, lineage stays acyclic and the payload always
            // resolves in exactly the tier the entry claims.
            #[test]
            fn random_transfer_sequences_preserve_metadata(ops in proptest::collection::vec(move_op(), 1..10)) {
                let mut lake = DataLake::new();
                let mut ids = ingest_n(&mut lake, 8);
                let derived = lake
                    .derive(&ids[..3], "merge", &[1], BTreeMap::new(), 9.0)
                    .unwrap();
                ids.push(derived);

                let reference: BTreeMap<ObjectId, CatalogEntry> = ids
                    .iter()
                    .map(|&id| (id, strip_placement(lake.entry(id).unwrap().clone())))
                    .collect();
                let zones: BTreeMap<ObjectId, Zone> =
                    ids.iter().map(|&id| (id, lake.entry(id).unwrap().zone)).collect();

                for op in &ops {
                    let subset: Vec<ObjectId> = ids
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| op.member_mask & (1 << i) != 0)
                        .map(|(_, id)| *id)
                        .collect();
                    lake.transfer(&subset, op.target, op.batch_size).unwrap();

                    for (&id, expected) in &reference {
                        let entry = lake.entry(id).unwrap();
                        prop_assert_eq!(&strip_placement(entry.clone()), expected);
                        prop_assert_eq!(entry.zone, zones[&id]);
                        prop_assert_eq!(lake.resolve_tier(id).unwrap(), entry.tier);
                    }
                    prop_assert!(lake.lineage_of(derived).unwrap().is_acyclic());
                }
            }
        }
    }
}

//! Tiered payload stores. Each tier keeps payloads under string keys; a
//! key resolves in exactly one tier at a time.

use std::collections::BTreeMap;

use super::catalog::Tier;

#[derive(Debug, Default)]
pub(crate) struct TierStores {
    device: BTreeMap<String, Vec<u8>>,
    edge: BTreeMap<String, Vec<u8>>,
    cloud: BTreeMap<String, Vec<u8>>,
}

impl TierStores {
    fn store(&mut self, tier: Tier) -> &mut BTreeMap<String, Vec<u8>> {
        match tier {
            Tier::Device => &mut self.device,
            Tier::Edge => &mut self.edge,
            Tier::Cloud => &mut self.cloud,
        }
    }

    fn store_ref(&self, tier: Tier) -> &BTreeMap<String, Vec<u8>> {
        match tier {
            Tier::Device => &self.device,
            Tier::Edge => &self.edge,
            Tier::Cloud => &self.cloud,
        }
    }

    pub(crate) fn put(&mut self, tier: Tier, key: String, payload: Vec<u8>) {
        let prev = self.store(tier).insert(key, payload);
        debug_assert!(prev.is_none(), "storage key reused");
    }

    pub(crate) fn get(&self, tier: Tier, key: &str) -> Option<&[u8]> {
        self.store_ref(tier).get(key).map(Vec::as_slice)
    }

    /// Moves a payload between tiers, returning the new key.
    pub(crate) fn relocate(
        &mut self,
        from: Tier,
        key: &str,
        to: Tier,
        new_key: String,
    ) -> Option<String> {
        let payload = self.store(from).remove(key)?;
        self.put(to, new_key.clone(), payload);
        Some(new_key)
    }

    /// The unique tier currently holding `key`, if any.
    pub(crate) fn resolve(&self, key: &str) -> Option<Tier> {
        let mut found = None;
        for tier in Tier::ALL {
            if self.store_ref(tier).contains_key(key) {
                debug_assert!(found.is_none(), "key resolvable in two tiers");
                found = Some(tier);
            }
        }
        found
    }

    pub(crate) fn bytes(&self, tier: Tier) -> u64 {
        self.store_ref(tier).values().map(|p| p.len() as u64).sum()
    }
}

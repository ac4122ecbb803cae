//! Device-to-device proximity graphs and closeness centrality.

use std::collections::{HashMap, VecDeque};

use super::{VehicleId, VehicleSnapshot, VsnError};

/// Undirected graph over one mobility snapshot: an edge joins two distinct
/// vehicles iff their Euclidean distance is at most the communication
/// radius.
#[derive(Debug, Clone)]
pub struct ProximityGraph {
    ids: Vec<VehicleId>,
    positions: Vec<(f64, f64)>,
    adjacency: Vec<Vec<usize>>,
    radius: f64,
}

impl ProximityGraph {
    /// Builds the proximity graph for a snapshot.
    ///
    /// Uses a uniform spatial grid with cells of side `radius`, so only the
    /// nine surrounding cells are scanned per vehicle.
    pub fn build(snapshot: &VehicleSnapshot, radius: f64) -> Result<Self, VsnError> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(VsnError::InvalidRadius(radius));
        }
        let mut vehicles: Vec<_> = snapshot.vehicles().to_vec();
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

        let ids: Vec<VehicleId> = vehicles.iter().map(|v| v.id).collect();
        let positions: Vec<(f64, f64)> = vehicles.iter().map(|v| (v.x, v.y)).collect();
        let mut adjacency = vec![Vec::new(); vehicles.len()];

        let cell_of = |x: f64, y: f64| ((x / radius).floor() as i64, (y / radius).floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &(x, y)) in positions.iter().enumerate() {
            grid.entry(cell_of(x, y)).or_default().push(i);
        }
        let r2 = radius * radius;
        for (i, &(x, y)) in positions.iter().enumerate() {
            let (cx, cy) = cell_of(x, y);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j <= i {
                            continue;
                        }
                        let (ox, oy) = positions[j];
                        let d2 = (x - ox).powi(2) + (y - oy).powi(2);
                        if d2 <= r2 {
                            adjacency[i].push(j);
                            adjacency[j].push(i);
                        }
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(ProximityGraph {
            ids,
            positions,
            adjacency,
            radius,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Vehicle ids in ascending order; node indices follow this order.
    pub fn ids(&self) -> &[VehicleId] {
        &self.ids
    }

    pub fn id_of(&self, index: usize) -> VehicleId {
        self.ids[index]
    }

    pub fn index_of(&self, id: VehicleId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn position_of(&self, index: usize) -> (f64, f64) {
        self.positions[index]
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as id pairs with the smaller id first.
    pub fn edges(&self) -> Vec<(VehicleId, VehicleId)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                if i < j {
                    edges.push((self.ids[i], self.ids[j]));
                }
            }
        }
        edges
    }

    pub fn has_edge(&self, a: VehicleId, b: VehicleId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Hop distances from `start` to every node (`None` if unreachable).
    pub fn bfs_distances(&self, start: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.ids.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued node has distance");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Node indices within `k` hops of `start`, including `start` itself.
    pub fn k_hop_neighborhood(&self, start: usize, k: u32) -> Vec<usize> {
        let mut dist = vec![u32::MAX; self.ids.len()];
        dist[start] = 0;
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == k {
                continue;
            }
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    out.push(v);
                    queue.push_back(v);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Closeness scores by node index, using the component-scaled form for
/// disconnected graphs: for a node in a component of size `nc` within a
/// graph of `n` nodes,
/// `score = (nc - 1) / sum_dist * (nc - 1) / (n - 1)`.
/// Isolated nodes (and the single node of a one-node graph) score 0.
pub fn closeness_scores(graph: &ProximityGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut scores = vec![0.0; n];
    if n <= 1 {
        return scores;
    }
    for (v, score) in scores.iter_mut().enumerate() {
        let dist = graph.bfs_distances(v);
        let mut sum = 0u64;
        let mut reachable = 0u64;
        for d in dist.iter().flatten() {
            if *d > 0 {
                sum += u64::from(*d);
                reachable += 1;
            }
        }
        if reachable == 0 {
            continue;
        }
        let nc = reachable as f64 + 1.0;
        *score = (nc - 1.0) / sum as f64 * (nc - 1.0) / (n as f64 - 1.0);
    }
    scores
}

/// Closeness centrality keyed by vehicle id.
pub fn closeness_centrality(graph: &ProximityGraph) -> std::collections::BTreeMap<VehicleId, f64> {
    closeness_scores(graph)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (graph.id_of(i), s))
        .collect()
}

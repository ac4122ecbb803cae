//! Independent oracles shared by the integration and acceptance suites.
//! Each oracle deliberately takes a different algorithmic route from the
//! implementation it checks.

// oracles stay as plain index transcriptions of their textbook forms
#![allow(clippy::needless_range_loop)]

use edgelake::handover::{EnbSite, Route};
use edgelake::vsn::ProximityGraph;

/// Closeness centrality via Floyd–Warshall all-pairs distances (the
/// implementation uses per-node BFS).
pub fn closeness_floyd_warshall(graph: &ProximityGraph) -> Vec<f64> {
    let n = graph.node_count();
    const INF: u32 = u32::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for i in 0..n {
        for &j in graph.neighbors(i) {
            dist[i][j] = 1;
            dist[j][i] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = dist[i][k].saturating_add(dist[k][j]);
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let mut sum = 0u64;
            let mut reachable = 0u64;
            for u in 0..n {
                if u != v && dist[v][u] < INF {
                    sum += u64::from(dist[v][u]);
                    reachable += 1;
                }
            }
            if reachable == 0 || n <= 1 {
                0.0
            } else {
                let nc = reachable as f64 + 1.0;
                (nc - 1.0) / sum as f64 * (nc - 1.0) / (n as f64 - 1.0)
            }
        })
        .collect()
}

/// Exact minimum k-hop dominating set size by exhaustive subset search;
/// only feasible for small graphs (n <= 15 or so).
pub fn min_dominating_set_size(graph: &ProximityGraph, k: u32) -> usize {
    let n = graph.node_count();
    assert!(n <= 20, "exhaustive search needs a small graph");
    if n == 0 {
        return 0;
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let masks: Vec<u32> = (0..n)
        .map(|v| {
            graph
                .k_hop_neighborhood(v, k)
                .into_iter()
                .fold(0u32, |m, u| m | (1 << u))
        })
        .collect();
    let mut best = n;
    for subset in 1u32..=full {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let mut covered = 0u32;
        let mut bits = subset;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            covered |= masks[v];
            bits &= bits - 1;
        }
        if covered == full {
            best = size;
        }
    }
    best
}

/// Exact minimum handover count over all valid allocations, by dynamic
/// programming over (reading, serving site). Returns `None` if some
/// reading is uncovered.
pub fn min_handovers_dp(route: &Route, sites: &[EnbSite]) -> Option<usize> {
    let n = route.len();
    if n == 0 {
        return Some(0);
    }
    let covers: Vec<Vec<bool>> = route
        .readings()
        .iter()
        .map(|r| sites.iter().map(|s| s.covers(r.x, r.y)).collect())
        .collect();
    let mut dp: Vec<Option<usize>> = covers[0]
        .iter()
        .map(|&c| if c { Some(0) } else { None })
        .collect();
    if dp.iter().all(Option::is_none) {
        return None;
    }
    for row in covers.iter().skip(1) {
        let mut next: Vec<Option<usize>> = vec![None; sites.len()];
        for (s, slot) in next.iter_mut().enumerate() {
            if !row[s] {
                continue;
            }
            let mut best = None;
            for (p, prev) in dp.iter().enumerate() {
                if let Some(cost) = prev {
                    let candidate = cost + usize::from(p != s);
                    best = Some(best.map_or(candidate, |b: usize| b.min(candidate)));
                }
            }
            *slot = best;
        }
        if next.iter().all(Option::is_none) {
            return None;
        }
        dp = next;
    }
    dp.into_iter().flatten().min()
}

/// Literal enumeration of every valid allocation (site choice per
/// reading), tracking the minimum handover count. Exponential; used on
/// tiny instances to validate the DP oracle itself.
pub fn min_handovers_enumerated(route: &Route, sites: &[EnbSite]) -> Option<usize> {
    let n = route.len();
    if n == 0 {
        return Some(0);
    }
    let covers: Vec<Vec<usize>> = route
        .readings()
        .iter()
        .map(|r| {
            sites
                .iter()
                .enumerate()
                .filter(|(_, s)| s.covers(r.x, r.y))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    fn recurse(
        covers: &[Vec<usize>],
        index: usize,
        previous: Option<usize>,
        handovers: usize,
        best: &mut Option<usize>,
    ) {
        if let Some(b) = *best {
            if handovers >= b {
                return; // cannot improve
            }
        }
        if index == covers.len() {
            *best = Some(best.map_or(handovers, |b| b.min(handovers)));
            return;
        }
        for &site in &covers[index] {
            let cost = handovers + usize::from(previous.is_some_and(|p| p != site));
            recurse(covers, index + 1, Some(site), cost, best);
        }
    }
    if covers.iter().any(Vec::is_empty) {
        return None;
    }
    let mut best = None;
    recurse(&covers, 0, None, 0, &mut best);
    best
}

//! Reference computations over plain `(n, edge list)` graphs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use socialbroker_core::{
    Anchor, BusinessService, Direction, Key, Metric, Registry, ServiceRequirements,
    SocialConstraint, SocialGraph, SocialRequirement,
};

pub type Edges = Vec<(usize, usize)>;

/// All-pairs hop counts; `None` when disconnected.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b) in edges {
        if a != b {
            d[a][b] = Some(1);
            d[b][a] = Some(1);
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][m], d[m][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    adj
}

pub fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    adjacency(n, edges).iter().map(BTreeSet::len).collect()
}

/// Enumerates every shortest path explicitly (depth-first, pruned at the
/// Floyd-Warshall distance) and counts, for each intermediate node, the
/// fraction of s-t shortest paths through it. Unordered pairs count once.
#[allow(clippy::needless_range_loop)]
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let adj = adjacency(n, edges);
    let dist = floyd_warshall(n, edges);
    let mut out = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let Some(target) = dist[s][t] else { continue };
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut path = vec![s];
            enumerate(&adj, t, target as usize, &mut path, &mut paths);
            let total = paths.len() as f64;
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                out[v] += through[v] as f64 / total;
            }
        }
    }
    out
}

fn enumerate(
    adj: &[BTreeSet<usize>],
    target: usize,
    length: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let here = *path.last().unwrap();
    if here == target {
        if path.len() - 1 == length {
            out.push(path.clone());
        }
        return;
    }
    if path.len() > length {
        return;
    }
    for &next in &adj[here] {
        if !path.contains(&next) {
            path.push(next);
            enumerate(adj, target, length, path, out);
            path.pop();
        }
    }
}

/// Component-normalized closeness from the all-pairs table.
pub fn brute_closeness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let dist = floyd_warshall(n, edges);
    (0..n)
        .map(|v| {
            let reach: Vec<u32> = dist[v].iter().flatten().copied().collect();
            let r = reach.len();
            let total: u32 = reach.iter().sum();
            if r <= 1 || n <= 1 || total == 0 {
                0.0
            } else {
                let others = (r - 1) as f64;
                others / total as f64 * others / (n - 1) as f64
            }
        })
        .collect()
}

/// Linear scan applying the three functional conditions directly.
pub fn brute_find_services(reg: &Registry, req: &ServiceRequirements) -> Vec<(Key, Key)> {
    let mut hits = Vec::new();
    for s in reg.services() {
        let owner = reg.get_business_detail(&s.business_key).unwrap();
        let cats = req.categories.iter().all(|want| {
            s.categories
                .iter()
                .chain(owner.categories.iter())
                .any(|have| have.tmodel_key == want.tmodel_key && have.key_value == want.key_value)
        });
        let words = req.keywords.iter().all(|w| {
            let w = w.to_lowercase();
            s.name.to_lowercase().contains(&w) || s.description.to_lowercase().contains(&w)
        });
        let tmodels = req.required_tmodels.iter().all(|t| {
            reg.bindings()
                .filter(|b| b.service_key == s.service_key)
                .any(|b| b.tmodel_keys.contains(t))
        });
        if cats && words && tmodels {
            hits.push((s.business_key.clone(), s.service_key.clone()));
        }
    }
    hits.sort();
    hits
}

/// The graph as plain indices, in actor key order.
pub fn indexed(graph: &SocialGraph) -> (Vec<Key>, Edges) {
    let keys: Vec<Key> = graph.actors().cloned().collect();
    let pos: BTreeMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let edges = graph.edges().map(|e| (pos[&e.a], pos[&e.b])).collect();
    (keys, edges)
}

/// One row of the expected broker answer.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub rank: usize,
    pub provider: Key,
    pub services: Vec<Key>,
    pub scores: Vec<Option<f64>>,
}

/// Filter-and-sort reference for a broker query. Returns `None` when the
/// consumer is not an actor.
pub fn brute_broker(
    reg: &Registry,
    graph: &SocialGraph,
    consumer: &Key,
    service_req: &ServiceRequirements,
    social: &SocialRequirement,
) -> Option<(Vec<ExpectedRow>, usize)> {
    let (keys, edges) = indexed(graph);
    let n = keys.len();
    let pos: BTreeMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    pos.get(consumer)?;
    let dist = floyd_warshall(n, &edges);
    let deg = degrees(n, &edges);
    let clo = brute_closeness(n, &edges);
    let btw = brute_betweenness(n, &edges);

    let hops = |anchor: &Anchor, p: &Key| -> Option<u32> {
        let a = match anchor {
            Anchor::Consumer => consumer,
            Anchor::Actor(k) => k,
        };
        dist[*pos.get(a)?][*pos.get(p)?]
    };

    let mut grouped: BTreeMap<Key, Vec<Key>> = BTreeMap::new();
    for (p, s) in brute_find_services(reg, service_req) {
        grouped.entry(p).or_default().push(s);
    }

    let mut excluded = 0;
    let mut rows: Vec<(Key, Vec<Key>, Vec<Option<f64>>)> = Vec::new();
    for (p, services) in grouped {
        let ok = social.constraints.iter().all(|c| match c {
            SocialConstraint::WithinHops { anchor, k } => hops(anchor, &p).is_some_and(|h| h <= *k),
            SocialConstraint::CollaboratedWith { anchor } => hops(anchor, &p).is_some_and(|h| h <= 1),
            SocialConstraint::ConnectedTo { anchor } => hops(anchor, &p).is_some(),
            SocialConstraint::MinDegree { n } => pos.get(&p).map_or(0, |&i| deg[i]) >= *n as usize,
        });
        if !ok {
            excluded += 1;
            continue;
        }
        let scores = social
            .ranking
            .iter()
            .map(|c| match &c.metric {
                Metric::HopsTo(anchor) => hops(anchor, &p).map(f64::from),
                Metric::Degree => Some(pos.get(&p).map_or(0.0, |&i| deg[i] as f64)),
                Metric::Closeness => Some(pos.get(&p).map_or(0.0, |&i| clo[i])),
                Metric::Betweenness => Some(pos.get(&p).map_or(0.0, |&i| btw[i])),
            })
            .collect();
        rows.push((p, services, scores));
    }

    let dirs: Vec<Direction> = social.ranking.iter().map(|c| c.direction).collect();
    let cmp_vec = |a: &[Option<f64>], b: &[Option<f64>]| -> Ordering {
        for (i, d) in dirs.iter().enumerate() {
            let o = reference_cmp(a[i], b[i], *d);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    };
    // Selection sort with an explicit key tie-break, deliberately unlike
    // the production stable sort.
    let mut ordered = Vec::new();
    while !rows.is_empty() {
        let mut best = 0;
        for i in 1..rows.len() {
            let o = cmp_vec(&rows[i].2, &rows[best].2).then_with(|| rows[i].0.cmp(&rows[best].0));
            if o == Ordering::Less {
                best = i;
            }
        }
        ordered.push(rows.remove(best));
    }

    let mut out: Vec<ExpectedRow> = Vec::new();
    for (p, services, scores) in ordered {
        // competition rank: 1 + number of rows strictly better
        let better = out.iter().filter(|r| cmp_vec(&r.scores, &scores) == Ordering::Less).count();
        out.push(ExpectedRow {
            rank: better + 1,
            provider: p,
            services,
            scores,
        });
    }
    Some((out, excluded))
}

/// Metric values closer than this are the same value computed along
/// different summation orders.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn reference_cmp(a: Option<f64>, b: Option<f64>, dir: Direction) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => {
            if (x - y).abs() <= TIE_TOLERANCE {
                return Ordering::Equal;
            }
            let o = x.partial_cmp(&y).expect("metric values are never NaN");
            if dir == Direction::Asc { o } else { o.reverse() }
        }
    }
}

/// Services a provider published, for cross-checking response payloads.
pub fn services_by_key(reg: &Registry, keys: &[Key]) -> Vec<BusinessService> {
    keys.iter().map(|k| reg.get_service(k).unwrap().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_references() {
        let edges = vec![(0, 1), (1, 2)];
        assert_eq!(floyd_warshall(3, &edges)[0][2], Some(2));
        assert_eq!(brute_betweenness(3, &edges), vec![0.0, 1.0, 0.0]);
        let c = brute_closeness(3, &edges);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_splits_paths() {
        // 0-1-2-3-0: each opposite pair has two shortest paths.
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        for b in brute_betweenness(4, &edges) {
            assert!((b - 0.5).abs() < 1e-12);
        }
    }
}

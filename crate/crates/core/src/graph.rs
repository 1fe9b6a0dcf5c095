//! Undirected collaboration graph over business keys and the social network
//! analysis metrics evaluated by the broker.
//!
//! All metrics treat the graph as unweighted. Edge weights are kept so that
//! they survive snapshots, but nothing here reads them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::key::Key;

pub type ActorId = Key;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown actor {0}")]
    UnknownActor(ActorId),
    #[error("self-loop on actor {0}")]
    SelfLoop(ActorId),
    #[error("edge weight must be a positive finite number, got {0}")]
    InvalidWeight(String),
}

fn default_weight() -> f64 {
    1.0
}

/// An unordered collaboration tie between two actors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollaborationEdge {
    pub a: ActorId,
    pub b: ActorId,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl CollaborationEdge {
    pub fn new(a: ActorId, b: ActorId) -> Self {
        Self { a, b, weight: 1.0 }
    }

    pub fn weighted(a: ActorId, b: ActorId, weight: f64) -> Self {
        Self { a, b, weight }
    }
}

/// Hop count between two actors.
///
/// `Unreachable` orders after every finite distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<u32> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Hops(_))
    }

    pub fn within(self, k: u32) -> bool {
        matches!(self, Distance::Hops(h) if h <= k)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Hops(h) => write!(f, "{h}"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SocialGraph {
    adjacency: BTreeMap<ActorId, BTreeMap<ActorId, f64>>,
    edge_count: usize,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Idempotent.
    pub fn add_actor(&mut self, id: ActorId) {
        self.adjacency.entry(id).or_default();
    }

    /// Adds or re-weights the tie `{a, b}`. Both endpoints must already be
    /// actors.
    pub fn add_collaboration(&mut self, edge: CollaborationEdge) -> Result<(), GraphError> {
        let CollaborationEdge { a, b, weight } = edge;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(GraphError::InvalidWeight(weight.to_string()));
        }
        self.require(&a)?;
        self.require(&b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        let fresh = self
            .adjacency
            .get_mut(&a)
            .expect("checked")
            .insert(b.clone(), weight)
            .is_none();
        self.adjacency.get_mut(&b).expect("checked").insert(a, weight);
        if fresh {
            self.edge_count += 1;
        }
        Ok(())
    }

    pub fn contains(&self, id: &ActorId) -> bool {
        self.adjacency.contains_key(id)
    }

    pub fn actor_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn actors(&self) -> impl Iterator<Item = &ActorId> + '_ {
        self.adjacency.keys()
    }

    /// Each edge once, with `a < b`, in key order.
    pub fn edges(&self) -> impl Iterator<Item = CollaborationEdge> + '_ {
        self.adjacency.iter().flat_map(|(a, row)| {
            row.range((std::ops::Bound::Excluded(a), std::ops::Bound::Unbounded))
                .map(move |(b, w)| CollaborationEdge::weighted(a.clone(), b.clone(), *w))
        })
    }

    pub fn neighbors(&self, id: &ActorId) -> Result<impl Iterator<Item = &ActorId> + '_, GraphError> {
        Ok(self.row(id)?.keys())
    }

    pub fn degree(&self, id: &ActorId) -> Result<usize, GraphError> {
        Ok(self.row(id)?.len())
    }

    pub fn hop_distance(&self, src: &ActorId, dst: &ActorId) -> Result<Distance, GraphError> {
        self.require(dst)?;
        let dist = self.bfs(src, None)?;
        Ok(dist.get(dst).map_or(Distance::Unreachable, |&h| Distance::Hops(h)))
    }

    /// Hop distances from `src` to every actor reachable from it (including
    /// itself at 0).
    pub fn distances_from(&self, src: &ActorId) -> Result<BTreeMap<ActorId, u32>, GraphError> {
        Ok(self
            .bfs(src, None)?
            .into_iter()
            .map(|(k, d)| (k.clone(), d))
            .collect())
    }

    /// Every actor at most `k` hops from `src`, `src` included.
    pub fn within_hops(&self, src: &ActorId, k: u32) -> Result<BTreeSet<ActorId>, GraphError> {
        Ok(self.bfs(src, Some(k))?.into_keys().cloned().collect())
    }

    /// Component-normalized closeness: `(r-1)/Σd` over the `r` actors
    /// reachable from `id` (itself included), scaled by `(r-1)/(n-1)`.
    /// Isolated actors and single-actor graphs score 0.
    pub fn closeness(&self, id: &ActorId) -> Result<f64, GraphError> {
        let dist = self.bfs(id, None)?;
        Ok(closeness_from(
            dist.len(),
            dist.values().map(|&d| u64::from(d)).sum(),
            self.actor_count(),
        ))
    }

    /// Unnormalized betweenness of a single actor. Runs the full all-sources
    /// computation; use [`SocialGraph::betweenness_all`] when scoring many
    /// actors.
    pub fn betweenness(&self, id: &ActorId) -> Result<f64, GraphError> {
        self.require(id)?;
        Ok(self.betweenness_all()[id])
    }

    /// Brandes' algorithm over the unweighted graph. Each unordered pair is
    /// counted once.
    pub fn betweenness_all(&self) -> BTreeMap<ActorId, f64> {
        let (keys, adj) = self.indexed();
        let n = keys.len();
        let mut centrality = vec![0.0f64; n];

        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        let mut delta = vec![0.0f64; n];
        let mut queue = VecDeque::with_capacity(n);

        for s in 0..n {
            stack.clear();
            for v in 0..n {
                preds[v].clear();
                sigma[v] = 0.0;
                dist[v] = -1;
                delta[v] = 0.0;
            }
            sigma[s] = 1.0;
            dist[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                stack.push(v);
                for &w in &adj[v] {
                    if dist[w] < 0 {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                        preds[w].push(v);
                    }
                }
            }
            while let Some(w) = stack.pop() {
                for &v in &preds[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                if w != s {
                    centrality[w] += delta[w];
                }
            }
        }

        keys.into_iter()
            .zip(centrality)
            .map(|(k, c)| (k.clone(), c / 2.0))
            .collect()
    }

    /// Closeness for every actor, one BFS each.
    pub fn closeness_all(&self) -> BTreeMap<ActorId, f64> {
        let (keys, adj) = self.indexed();
        let n = keys.len();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::with_capacity(n);
        let mut scores = Vec::with_capacity(n);
        for s in 0..n {
            dist.fill(u32::MAX);
            dist[s] = 0;
            queue.push_back(s);
            let (mut reached, mut total) = (0usize, 0u64);
            while let Some(v) = queue.pop_front() {
                reached += 1;
                total += u64::from(dist[v]);
                for &w in &adj[v] {
                    if dist[w] == u32::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            scores.push(closeness_from(reached, total, n));
        }
        keys.into_iter().cloned().zip(scores).collect()
    }

    /// Actors in key order with adjacency lists of positions.
    fn indexed(&self) -> (Vec<&ActorId>, Vec<Vec<usize>>) {
        let keys: Vec<&ActorId> = self.adjacency.keys().collect();
        let index: BTreeMap<&ActorId, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let adj = self
            .adjacency
            .values()
            .map(|row| row.keys().map(|k| index[k]).collect())
            .collect();
        (keys, adj)
    }

    fn row(&self, id: &ActorId) -> Result<&BTreeMap<ActorId, f64>, GraphError> {
        self.adjacency
            .get(id)
            .ok_or_else(|| GraphError::UnknownActor(id.clone()))
    }

    fn require(&self, id: &ActorId) -> Result<(), GraphError> {
        self.row(id).map(|_| ())
    }

    fn bfs(&self, src: &ActorId, limit: Option<u32>) -> Result<BTreeMap<&ActorId, u32>, GraphError> {
        let (src, _) = self
            .adjacency
            .get_key_value(src)
            .ok_or_else(|| GraphError::UnknownActor(src.clone()))?;
        let mut dist = BTreeMap::from([(src, 0u32)]);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v];
            if limit.is_some_and(|k| d >= k) {
                continue;
            }
            for w in self.adjacency[v].keys() {
                if !dist.contains_key(w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }
}

pub(crate) fn closeness_from(reachable: usize, total_distance: u64, n: usize) -> f64 {
    if reachable <= 1 || n <= 1 || total_distance == 0 {
        return 0.0;
    }
    let others = (reachable - 1) as f64;
    (others / total_distance as f64) * (others / (n - 1) as f64)
}

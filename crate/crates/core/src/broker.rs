//! The brokerage pipeline: functional search in the registry, social
//! filtering and ranking against the collaboration graph, and assembly of
//! the ranked response.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{ActorId, Distance, SocialGraph};
use crate::key::Key;
use crate::registry::{BusinessEntity, BusinessService, Registry, RegistryError};
use crate::requirements::{
    Anchor, Direction, Metric, RankingCriterion, ServiceRequirements, SocialConstraint,
    SocialRequirement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrokerError {
    #[error("consumer {0} is not an actor in the social graph")]
    UnknownConsumer(Key),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokerRequest {
    pub consumer: ActorId,
    pub service_req: ServiceRequirements,
    pub social_req: SocialRequirement,
}

/// One metric reading. Serializes as a JSON number, or `null` when the
/// anchor cannot be reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreValue {
    Finite(f64),
    Unreachable,
}

impl ScoreValue {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ScoreValue::Finite(v) => Some(v),
            ScoreValue::Unreachable => None,
        }
    }

    /// Orders two readings under `direction`. Unreachable sorts last in
    /// both directions.
    pub fn compare(self, other: ScoreValue, direction: Direction) -> Ordering {
        match (self, other) {
            (ScoreValue::Finite(a), ScoreValue::Finite(b)) => match direction {
                Direction::Asc => a.total_cmp(&b),
                Direction::Desc => b.total_cmp(&a),
            },
            (ScoreValue::Finite(_), ScoreValue::Unreachable) => Ordering::Less,
            (ScoreValue::Unreachable, ScoreValue::Finite(_)) => Ordering::Greater,
            (ScoreValue::Unreachable, ScoreValue::Unreachable) => Ordering::Equal,
        }
    }
}

impl From<Distance> for ScoreValue {
    fn from(d: Distance) -> Self {
        match d {
            Distance::Hops(h) => ScoreValue::Finite(f64::from(h)),
            Distance::Unreachable => ScoreValue::Unreachable,
        }
    }
}

impl Serialize for ScoreValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ScoreValue::Finite(v) => serializer.serialize_f64(*v),
            ScoreValue::Unreachable => serializer.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Score {
    #[serde(serialize_with = "as_text")]
    pub criterion: RankingCriterion,
    pub value: ScoreValue,
}

fn as_text<S: Serializer>(c: &RankingCriterion, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(c)
}

/// One reading per ranking criterion, in criterion order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ScoreVector(pub Vec<Score>);

impl ScoreVector {
    pub fn compare(&self, other: &ScoreVector) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.value.compare(b.value, a.criterion.direction))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    pub fn values(&self) -> impl Iterator<Item = ScoreValue> + '_ {
        self.0.iter().map(|s| s.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedProvider {
    pub rank: usize,
    #[serde(rename = "business")]
    pub provider: BusinessEntity,
    #[serde(rename = "services")]
    pub matched_services: Vec<BusinessService>,
    /// Access points of the matched services' bindings, so the consumer can
    /// invoke the chosen provider directly.
    pub access_points: Vec<String>,
    pub scores: ScoreVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrokerResponse {
    pub providers: Vec<RankedProvider>,
    pub excluded_count: usize,
}

impl BrokerResponse {
    /// Canonical JSON body, byte-stable for identical stores and requests.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("response is always serializable")
    }
}

/// Read-only view over both stores.
#[derive(Debug, Clone, Copy)]
pub struct Broker<'a> {
    registry: &'a Registry,
    graph: &'a SocialGraph,
}

impl<'a> Broker<'a> {
    pub fn new(registry: &'a Registry, graph: &'a SocialGraph) -> Self {
        Self { registry, graph }
    }

    pub fn query(&self, request: &BrokerRequest) -> Result<BrokerResponse, BrokerError> {
        let consumer = &request.consumer;
        if !self.graph.contains(consumer) {
            return Err(BrokerError::UnknownConsumer(consumer.clone()));
        }

        // Functional search, grouped by provider (matches arrive in
        // provider order already).
        let mut by_provider: BTreeMap<Key, Vec<BusinessService>> = BTreeMap::new();
        for m in self.registry.find_services(&request.service_req) {
            by_provider.entry(m.provider_key).or_default().push(m.service);
        }

        let mut metrics = MetricCache::new(self.graph, consumer);
        let mut excluded_count = 0;
        let mut survivors = Vec::new();
        for (provider_key, services) in by_provider {
            let passes = request
                .social_req
                .constraints
                .iter()
                .all(|c| metrics.satisfies(c, &provider_key));
            if !passes {
                excluded_count += 1;
                continue;
            }
            let scores = ScoreVector(
                request
                    .social_req
                    .ranking
                    .iter()
                    .map(|criterion| Score {
                        criterion: criterion.clone(),
                        value: metrics.score(&criterion.metric, &provider_key),
                    })
                    .collect(),
            );
            survivors.push((provider_key, services, scores));
        }

        // BTreeMap iteration already put survivors in key order, so a stable
        // sort on scores alone leaves equal vectors ordered by key.
        survivors.sort_by(|a, b| a.2.compare(&b.2));

        let mut providers: Vec<RankedProvider> = Vec::with_capacity(survivors.len());
        for (i, (provider_key, services, scores)) in survivors.into_iter().enumerate() {
            let rank = match providers.last() {
                Some(prev) if prev.scores.compare(&scores).is_eq() => prev.rank,
                _ => i + 1,
            };
            let access_points = services
                .iter()
                .flat_map(|s| self.registry.bindings_of(&s.service_key))
                .map(|b| b.access_point.clone())
                .collect();
            providers.push(RankedProvider {
                rank,
                provider: self.registry.get_business_detail(&provider_key)?.clone(),
                matched_services: services,
                access_points,
                scores,
            });
        }
        Ok(BrokerResponse {
            providers,
            excluded_count,
        })
    }
}

pub fn broker_query(
    registry: &Registry,
    graph: &SocialGraph,
    request: &BrokerRequest,
) -> Result<BrokerResponse, BrokerError> {
    Broker::new(registry, graph).query(request)
}

/// Checks one social constraint for one provider.
///
/// Providers missing from the graph fail every anchored constraint and any
/// `MinDegree` above zero. Only a missing consumer is an error.
pub fn evaluate_constraint(
    constraint: &SocialConstraint,
    provider: &ActorId,
    consumer: &ActorId,
    graph: &SocialGraph,
) -> Result<bool, BrokerError> {
    if !graph.contains(consumer) {
        return Err(BrokerError::UnknownConsumer(consumer.clone()));
    }
    Ok(MetricCache::new(graph, consumer).satisfies(constraint, provider))
}

/// Memoizes the per-query graph computations: one BFS per distinct anchor,
/// one betweenness pass at most.
struct MetricCache<'g> {
    graph: &'g SocialGraph,
    consumer: &'g ActorId,
    distances: BTreeMap<ActorId, Option<BTreeMap<ActorId, u32>>>,
    betweenness: Option<BTreeMap<ActorId, f64>>,
}

impl<'g> MetricCache<'g> {
    fn new(graph: &'g SocialGraph, consumer: &'g ActorId) -> Self {
        Self {
            graph,
            consumer,
            distances: BTreeMap::new(),
            betweenness: None,
        }
    }

    fn hops(&mut self, anchor: &Anchor, provider: &ActorId) -> Distance {
        let anchor = anchor.bind(self.consumer).clone();
        let graph = self.graph;
        let table = self
            .distances
            .entry(anchor)
            .or_insert_with_key(|a| graph.distances_from(a).ok());
        table
            .as_ref()
            .and_then(|t| t.get(provider))
            .map_or(Distance::Unreachable, |&h| Distance::Hops(h))
    }

    fn satisfies(&mut self, constraint: &SocialConstraint, provider: &ActorId) -> bool {
        match constraint {
            SocialConstraint::WithinHops { anchor, k } => self.hops(anchor, provider).within(*k),
            SocialConstraint::CollaboratedWith { anchor } => self.hops(anchor, provider).within(1),
            SocialConstraint::ConnectedTo { anchor } => self.hops(anchor, provider).is_finite(),
            SocialConstraint::MinDegree { n } => {
                self.graph.degree(provider).unwrap_or(0) >= *n as usize
            }
        }
    }

    fn score(&mut self, metric: &Metric, provider: &ActorId) -> ScoreValue {
        match metric {
            Metric::HopsTo(anchor) => self.hops(anchor, provider).into(),
            Metric::Degree => ScoreValue::Finite(self.graph.degree(provider).unwrap_or(0) as f64),
            Metric::Closeness => {
                ScoreValue::Finite(snap(self.graph.closeness(provider).unwrap_or(0.0)))
            }
            Metric::Betweenness => {
                let graph = self.graph;
                let all = self.betweenness.get_or_insert_with(|| graph.betweenness_all());
                ScoreValue::Finite(snap(all.get(provider).copied().unwrap_or(0.0)))
            }
        }
    }
}

/// Rounds a real-valued metric to a 1e-9 grid so that values equal up to
/// floating-point summation order compare equal (and share a rank).
fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

//! Service and social requirement models, plus the textual social
//! requirement language:
//!
//! ```text
//! query      := [constraint ("AND" constraint)*] ["RANK" "BY" rank ("," rank)*]
//! constraint := within_hops(actor, int) | collaborated_with(actor)
//!             | min_degree(int) | connected_to(actor)
//! rank       := (hops(actor) | degree | closeness | betweenness) [asc | desc]
//! actor      := "<key>" | consumer
//! ```
//!
//! Keywords are case-insensitive. Without a `RANK BY` clause the ranking is
//! `hops(consumer) asc`.

mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::key::Key;
use crate::registry::KeyedReference;

pub use parser::{parse_social_requirement, ParseError};

/// Functional part of a broker request. Every list is a conjunction; empty
/// lists constrain nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRequirements {
    #[serde(default)]
    pub categories: Vec<KeyedReference>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub required_tmodels: Vec<Key>,
}

/// Who a constraint or metric is measured against. `Consumer` is bound to
/// the requesting actor when the requirement is evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Consumer,
    Actor(Key),
}

impl Anchor {
    pub fn bind<'a>(&'a self, consumer: &'a Key) -> &'a Key {
        match self {
            Anchor::Consumer => consumer,
            Anchor::Actor(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SocialConstraint {
    WithinHops { anchor: Anchor, k: u32 },
    /// Same as `WithinHops { k: 1 }`.
    CollaboratedWith { anchor: Anchor },
    MinDegree { n: u32 },
    ConnectedTo { anchor: Anchor },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    HopsTo(Anchor),
    Degree,
    Closeness,
    Betweenness,
}

impl Metric {
    pub fn default_direction(&self) -> Direction {
        match self {
            Metric::HopsTo(_) => Direction::Asc,
            _ => Direction::Desc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankingCriterion {
    pub metric: Metric,
    pub direction: Direction,
}

impl RankingCriterion {
    pub fn new(metric: Metric, direction: Direction) -> Self {
        Self { metric, direction }
    }

    /// Criterion with the metric's default direction.
    pub fn by(metric: Metric) -> Self {
        let direction = metric.default_direction();
        Self { metric, direction }
    }
}

/// Conjunctive constraints plus a lexicographic ranking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SocialRequirement {
    #[serde(default)]
    pub constraints: Vec<SocialConstraint>,
    #[serde(default = "default_ranking", deserialize_with = "ranking_or_default")]
    pub ranking: Vec<RankingCriterion>,
}

fn default_ranking() -> Vec<RankingCriterion> {
    vec![RankingCriterion::by(Metric::HopsTo(Anchor::Consumer))]
}

fn ranking_or_default<'de, D>(deserializer: D) -> Result<Vec<RankingCriterion>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let ranking = Vec::<RankingCriterion>::deserialize(deserializer)?;
    Ok(if ranking.is_empty() { default_ranking() } else { ranking })
}

impl Default for SocialRequirement {
    fn default() -> Self {
        Self {
            constraints: Vec::new(),
            ranking: default_ranking(),
        }
    }
}

impl SocialRequirement {
    pub fn new(constraints: Vec<SocialConstraint>, ranking: Vec<RankingCriterion>) -> Self {
        let ranking = if ranking.is_empty() { default_ranking() } else { ranking };
        Self { constraints, ranking }
    }

    /// Canonical text form, accepted back by [`parse_social_requirement`].
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Consumer => f.write_str("consumer"),
            Anchor::Actor(k) => write!(f, "\"{k}\""),
        }
    }
}

impl fmt::Display for SocialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SocialConstraint::WithinHops { anchor, k } => write!(f, "within_hops({anchor}, {k})"),
            SocialConstraint::CollaboratedWith { anchor } => write!(f, "collaborated_with({anchor})"),
            SocialConstraint::MinDegree { n } => write!(f, "min_degree({n})"),
            SocialConstraint::ConnectedTo { anchor } => write!(f, "connected_to({anchor})"),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::HopsTo(anchor) => write!(f, "hops({anchor})"),
            Metric::Degree => f.write_str("degree"),
            Metric::Closeness => f.write_str("closeness"),
            Metric::Betweenness => f.write_str("betweenness"),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Asc => "asc",
            Direction::Desc => "desc",
        })
    }
}

impl fmt::Display for RankingCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.metric, self.direction)
    }
}

impl fmt::Display for SocialRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{c}")?;
        }
        if !self.constraints.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("RANK BY ")?;
        for (i, r) in self.ranking.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for SocialRequirement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_social_requirement(s)
    }
}

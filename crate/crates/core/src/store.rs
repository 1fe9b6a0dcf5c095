//! The pair of stores a broker reads (registry and collaboration graph) and
//! the line-oriented record form they are persisted in.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ActorId, CollaborationEdge, GraphError, SocialGraph};
use crate::registry::{BindingTemplate, BusinessEntity, BusinessService, Registry, RegistryError, TModel};

/// One snapshot line. The `kind` tag selects the record type; the remaining
/// fields are the record's own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Business(BusinessEntity),
    Service(BusinessService),
    Binding(BindingTemplate),
    Tmodel(TModel),
    Actor { id: ActorId },
    Edge(CollaborationEdge),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordKind {
    Business,
    Service,
    Binding,
    Tmodel,
    Actor,
    Edge,
}

impl RecordKind {
    pub const ALL: [RecordKind; 6] = [
        RecordKind::Business,
        RecordKind::Service,
        RecordKind::Binding,
        RecordKind::Tmodel,
        RecordKind::Actor,
        RecordKind::Edge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecordKind::Business => "business",
            RecordKind::Service => "service",
            RecordKind::Binding => "binding",
            RecordKind::Tmodel => "tmodel",
            RecordKind::Actor => "actor",
            RecordKind::Edge => "edge",
        }
    }

    /// Application stage: records a kind depends on always come in an
    /// earlier stage, so input files need not be topologically sorted.
    pub fn stage(self) -> u8 {
        match self {
            RecordKind::Tmodel | RecordKind::Actor => 0,
            RecordKind::Business | RecordKind::Edge => 1,
            RecordKind::Service => 2,
            RecordKind::Binding => 3,
        }
    }
}

impl Record {
    pub fn kind(&self) -> RecordKind {
        match self {
            Record::Business(_) => RecordKind::Business,
            Record::Service(_) => RecordKind::Service,
            Record::Binding(_) => RecordKind::Binding,
            Record::Tmodel(_) => RecordKind::Tmodel,
            Record::Actor { .. } => RecordKind::Actor,
            Record::Edge(_) => RecordKind::Edge,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records are always serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A store error tied to the 1-based input line that caused it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct LineError {
    pub line: usize,
    #[source]
    pub source: StoreError,
}

/// Per-kind record tally.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordCounts(BTreeMap<RecordKind, usize>);

impl RecordCounts {
    pub fn get(&self, kind: RecordKind) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    pub fn add(&mut self, kind: RecordKind) {
        *self.0.entry(kind).or_default() += 1;
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

impl fmt::Display for RecordCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, kind) in RecordKind::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", kind.name(), self.get(*kind))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stores {
    pub registry: Registry,
    pub graph: SocialGraph,
}

impl Stores {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies a single record. Actors are idempotent and edges re-weight;
    /// registry records reject duplicates.
    pub fn apply(&mut self, record: Record) -> Result<(), StoreError> {
        match record {
            Record::Business(e) => self.registry.register_business(e).map(drop)?,
            Record::Service(s) => self.registry.publish_service(s).map(drop)?,
            Record::Binding(b) => self.registry.publish_binding(b).map(drop)?,
            Record::Tmodel(t) => self.registry.register_tmodel(t).map(drop)?,
            Record::Actor { id } => self.graph.add_actor(id),
            Record::Edge(e) => self.graph.add_collaboration(e)?,
        }
        Ok(())
    }

    /// Applies numbered records all-or-nothing, dependencies first. On error
    /// the stores are untouched and the offending line is reported.
    pub fn apply_all(&mut self, records: Vec<(usize, Record)>) -> Result<RecordCounts, LineError> {
        let mut records = records;
        records.sort_by_key(|(line, r)| (r.kind().stage(), *line));
        let mut next = self.clone();
        let mut counts = RecordCounts::default();
        for (line, record) in records {
            let kind = record.kind();
            next.apply(record).map_err(|source| LineError { line, source })?;
            counts.add(kind);
        }
        *self = next;
        Ok(counts)
    }

    /// Every stored record in canonical order: dependency stage, then kind,
    /// then key.
    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = Vec::new();
        out.extend(self.registry.tmodels().cloned().map(Record::Tmodel));
        out.extend(self.graph.actors().cloned().map(|id| Record::Actor { id }));
        out.extend(self.registry.businesses().cloned().map(Record::Business));
        out.extend(self.graph.edges().map(Record::Edge));
        out.extend(self.registry.services().cloned().map(Record::Service));
        out.extend(self.registry.bindings().cloned().map(Record::Binding));
        out
    }

    /// Canonical snapshot text: one JSON record per line.
    pub fn dump(&self) -> String {
        let mut text = String::new();
        for r in self.records() {
            text.push_str(&r.to_line());
            text.push('\n');
        }
        text
    }

    pub fn counts(&self) -> RecordCounts {
        let mut counts = RecordCounts::default();
        for r in self.records() {
            counts.add(r.kind());
        }
        counts
    }
}

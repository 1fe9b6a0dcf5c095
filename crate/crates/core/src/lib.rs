//! Social service brokerage: a UDDI-style registry answers "who can do
//! this", a collaboration graph answers "who do I trust to do it", and the
//! broker combines both into a ranked list of providers.

pub mod broker;
pub mod fixture;
pub mod generate;
pub mod graph;
pub mod key;
pub mod registry;
pub mod requirements;
pub mod snapshot;
pub mod store;

pub use broker::{
    broker_query, evaluate_constraint, Broker, BrokerError, BrokerRequest, BrokerResponse,
    RankedProvider, Score, ScoreValue, ScoreVector,
};
pub use generate::{GenSpec, GenSpecError};
pub use graph::{ActorId, CollaborationEdge, Distance, GraphError, SocialGraph};
pub use key::{InvalidKey, Key};
pub use registry::{
    BindingTemplate, BusinessEntity, BusinessService, Contact, KeyedReference, Registry,
    RegistryError, ServiceMatch, TModel,
};
pub use requirements::{
    parse_social_requirement, Anchor, Direction, Metric, ParseError, RankingCriterion,
    ServiceRequirements, SocialConstraint, SocialRequirement,
};
pub use snapshot::{load_snapshot, write_snapshot, SnapshotError};
pub use store::{LineError, Record, RecordCounts, RecordKind, StoreError, Stores};

//! Test support: independent brute-force oracles and seeded random
//! fixtures. Nothing in here calls the graph algorithms or the broker
//! pipeline it is used to check.

pub mod fixtures;
pub mod oracle;

use socialbroker_core::Record;

/// The HTTP call that creates `record`: `(path, JSON body)`, always a POST.
pub fn api_call(record: &Record) -> (String, serde_json::Value) {
    let mut body = serde_json::to_value(record).expect("records serialize");
    body.as_object_mut().expect("records are objects").remove("kind");
    let path = match record {
        Record::Tmodel(_) => "/registry/tmodels".to_string(),
        Record::Business(_) => "/registry/businesses".to_string(),
        Record::Service(s) => format!("/registry/businesses/{}/services", s.business_key),
        Record::Binding(b) => format!("/registry/services/{}/bindings", b.service_key),
        Record::Actor { .. } => "/graph/actors".to_string(),
        Record::Edge(_) => "/graph/edges".to_string(),
    };
    (path, body)
}

use serde::{Deserialize, Serialize};

use crate::key::Key;

/// White-page contact data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contact {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phone: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<String>,
}

/// A yellow-page classification: a code (`key_value`) within the taxonomy
/// identified by `tmodel_key`. `key_name` is a human label and takes no part
/// in matching.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeyedReference {
    pub tmodel_key: Key,
    #[serde(default)]
    pub key_name: String,
    pub key_value: String,
}

impl KeyedReference {
    pub fn new(tmodel_key: Key, key_name: impl Into<String>, key_value: impl Into<String>) -> Self {
        Self {
            tmodel_key,
            key_name: key_name.into(),
            key_value: key_value.into(),
        }
    }

    /// Taxonomy equality: same tModel and same code.
    pub fn matches(&self, other: &KeyedReference) -> bool {
        self.tmodel_key == other.tmodel_key && self.key_value == other.key_value
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessEntity {
    pub business_key: Key,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub contacts: Vec<Contact>,
    #[serde(default)]
    pub identifiers: Vec<KeyedReference>,
    #[serde(default)]
    pub categories: Vec<KeyedReference>,
}

impl BusinessEntity {
    pub fn new(business_key: Key, name: impl Into<String>) -> Self {
        Self {
            business_key,
            name: name.into(),
            description: String::new(),
            contacts: Vec::new(),
            identifiers: Vec::new(),
            categories: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessService {
    pub service_key: Key,
    pub business_key: Key,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub categories: Vec<KeyedReference>,
}

impl BusinessService {
    pub fn new(service_key: Key, business_key: Key, name: impl Into<String>) -> Self {
        Self {
            service_key,
            business_key,
            name: name.into(),
            description: String::new(),
            categories: Vec::new(),
        }
    }
}

/// Green-page record: where a service lives and which technical specs it
/// implements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingTemplate {
    pub binding_key: Key,
    pub service_key: Key,
    pub access_point: String,
    #[serde(default)]
    pub tmodel_keys: Vec<Key>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TModel {
    pub tmodel_key: Key,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overview_url: Option<String>,
}

impl TModel {
    pub fn new(tmodel_key: Key, name: impl Into<String>) -> Self {
        Self {
            tmodel_key,
            name: name.into(),
            description: String::new(),
            overview_url: None,
        }
    }
}

/// A functional search hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceMatch {
    pub service: BusinessService,
    pub provider_key: Key,
}

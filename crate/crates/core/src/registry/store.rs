use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::types::{
    BindingTemplate, BusinessEntity, BusinessService, KeyedReference, ServiceMatch, TModel,
};
use crate::key::Key;
use crate::requirements::ServiceRequirements;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("duplicate {kind} key {key}")]
    DuplicateKey { kind: &'static str, key: Key },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unknown business {0}")]
    UnknownBusiness(Key),
    #[error("unknown service {0}")]
    UnknownService(Key),
    #[error("unknown tModel {0}")]
    UnknownTModel(Key),
}

/// In-memory UDDI store.
///
/// Every mutation validates completely before touching any map, so a
/// rejected call leaves the store exactly as it was. Keys are supplied by
/// the publisher; the store only checks format (via [`Key`]) and uniqueness.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    businesses: BTreeMap<Key, BusinessEntity>,
    services: BTreeMap<Key, BusinessService>,
    bindings: BTreeMap<Key, BindingTemplate>,
    tmodels: BTreeMap<Key, TModel>,
    services_by_business: BTreeMap<Key, BTreeSet<Key>>,
    bindings_by_service: BTreeMap<Key, BTreeSet<Key>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_tmodel(&mut self, tmodel: TModel) -> Result<Key, RegistryError> {
        if tmodel.name.trim().is_empty() {
            return Err(RegistryError::Validation("tModel name must not be empty".into()));
        }
        if let Some(url) = &tmodel.overview_url {
            check_url("overview_url", url)?;
        }
        if self.tmodels.contains_key(&tmodel.tmodel_key) {
            return Err(duplicate("tmodel", &tmodel.tmodel_key));
        }
        let key = tmodel.tmodel_key.clone();
        self.tmodels.insert(key.clone(), tmodel);
        Ok(key)
    }

    pub fn register_business(&mut self, entity: BusinessEntity) -> Result<Key, RegistryError> {
        if entity.name.trim().is_empty() {
            return Err(RegistryError::Validation("business name must not be empty".into()));
        }
        if let Some(c) = entity.contacts.iter().find(|c| c.name.trim().is_empty()) {
            return Err(RegistryError::Validation(format!(
                "contact name must not be empty (contact {c:?})"
            )));
        }
        self.check_references(&entity.identifiers)?;
        self.check_references(&entity.categories)?;
        if self.businesses.contains_key(&entity.business_key) {
            return Err(duplicate("business", &entity.business_key));
        }
        let key = entity.business_key.clone();
        self.businesses.insert(key.clone(), entity);
        Ok(key)
    }

    pub fn publish_service(&mut self, service: BusinessService) -> Result<Key, RegistryError> {
        if !self.businesses.contains_key(&service.business_key) {
            return Err(RegistryError::UnknownBusiness(service.business_key));
        }
        if service.name.trim().is_empty() {
            return Err(RegistryError::Validation("service name must not be empty".into()));
        }
        self.check_references(&service.categories)?;
        if self.services.contains_key(&service.service_key) {
            return Err(duplicate("service", &service.service_key));
        }
        let key = service.service_key.clone();
        self.services_by_business
            .entry(service.business_key.clone())
            .or_default()
            .insert(key.clone());
        self.services.insert(key.clone(), service);
        Ok(key)
    }

    pub fn publish_binding(&mut self, binding: BindingTemplate) -> Result<Key, RegistryError> {
        if !self.services.contains_key(&binding.service_key) {
            return Err(RegistryError::UnknownService(binding.service_key));
        }
        if let Some(missing) = binding.tmodel_keys.iter().find(|k| !self.tmodels.contains_key(*k)) {
            return Err(RegistryError::UnknownTModel(missing.clone()));
        }
        check_url("access_point", &binding.access_point)?;
        if self.bindings.contains_key(&binding.binding_key) {
            return Err(duplicate("binding", &binding.binding_key));
        }
        let key = binding.binding_key.clone();
        self.bindings_by_service
            .entry(binding.service_key.clone())
            .or_default()
            .insert(key.clone());
        self.bindings.insert(key.clone(), binding);
        Ok(key)
    }

    pub fn get_business_detail(&self, key: &Key) -> Result<&BusinessEntity, RegistryError> {
        self.businesses
            .get(key)
            .ok_or_else(|| RegistryError::UnknownBusiness(key.clone()))
    }

    pub fn get_service(&self, key: &Key) -> Result<&BusinessService, RegistryError> {
        self.services
            .get(key)
            .ok_or_else(|| RegistryError::UnknownService(key.clone()))
    }

    pub fn get_tmodel(&self, key: &Key) -> Result<&TModel, RegistryError> {
        self.tmodels
            .get(key)
            .ok_or_else(|| RegistryError::UnknownTModel(key.clone()))
    }

    pub fn get_binding(&self, key: &Key) -> Option<&BindingTemplate> {
        self.bindings.get(key)
    }

    /// Services owned by `business`, ordered by service key.
    pub fn services_of(&self, business: &Key) -> impl Iterator<Item = &BusinessService> + '_ {
        self.services_by_business
            .get(business)
            .into_iter()
            .flatten()
            .map(|k| &self.services[k])
    }

    /// Bindings attached to `service`, ordered by binding key.
    pub fn bindings_of(&self, service: &Key) -> impl Iterator<Item = &BindingTemplate> + '_ {
        self.bindings_by_service
            .get(service)
            .into_iter()
            .flatten()
            .map(|k| &self.bindings[k])
    }

    pub fn businesses(&self) -> impl Iterator<Item = &BusinessEntity> + '_ {
        self.businesses.values()
    }

    pub fn services(&self) -> impl Iterator<Item = &BusinessService> + '_ {
        self.services.values()
    }

    pub fn bindings(&self) -> impl Iterator<Item = &BindingTemplate> + '_ {
        self.bindings.values()
    }

    pub fn tmodels(&self) -> impl Iterator<Item = &TModel> + '_ {
        self.tmodels.values()
    }

    /// Yellow- and green-page search.
    ///
    /// A service matches when every requested category is carried by the
    /// service or by its owning business, every keyword occurs
    /// (case-insensitively) in its name or description, and every required
    /// tModel is implemented by at least one of its bindings. Results come
    /// back ordered by `(provider_key, service_key)`.
    pub fn find_services(&self, req: &ServiceRequirements) -> Vec<ServiceMatch> {
        let keywords: Vec<String> = req.keywords.iter().map(|k| k.to_lowercase()).collect();
        let mut out = Vec::new();
        for (business_key, service_keys) in &self.services_by_business {
            let owner = &self.businesses[business_key];
            for service in service_keys.iter().map(|k| &self.services[k]) {
                if self.service_matches(owner, service, req, &keywords) {
                    out.push(ServiceMatch {
                        service: service.clone(),
                        provider_key: business_key.clone(),
                    });
                }
            }
        }
        out
    }

    fn service_matches(
        &self,
        owner: &BusinessEntity,
        service: &BusinessService,
        req: &ServiceRequirements,
        lowered_keywords: &[String],
    ) -> bool {
        let categorized = req.categories.iter().all(|wanted| {
            service
                .categories
                .iter()
                .chain(&owner.categories)
                .any(|have| have.matches(wanted))
        });
        if !categorized {
            return false;
        }
        if !lowered_keywords.is_empty() {
            let name = service.name.to_lowercase();
            let description = service.description.to_lowercase();
            if !lowered_keywords
                .iter()
                .all(|k| name.contains(k.as_str()) || description.contains(k.as_str()))
            {
                return false;
            }
        }
        req.required_tmodels.iter().all(|t| {
            self.bindings_of(&service.service_key)
                .any(|b| b.tmodel_keys.contains(t))
        })
    }

    fn check_references(&self, refs: &[KeyedReference]) -> Result<(), RegistryError> {
        for r in refs {
            if r.key_value.is_empty() {
                return Err(RegistryError::Validation(format!(
                    "keyed reference in taxonomy {} has an empty key_value",
                    r.tmodel_key
                )));
            }
            if !self.tmodels.contains_key(&r.tmodel_key) {
                return Err(RegistryError::UnknownTModel(r.tmodel_key.clone()));
            }
        }
        Ok(())
    }
}

fn duplicate(kind: &'static str, key: &Key) -> RegistryError {
    RegistryError::DuplicateKey {
        kind,
        key: key.clone(),
    }
}

fn check_url(field: &str, value: &str) -> Result<(), RegistryError> {
    url::Url::parse(value)
        .map(|_| ())
        .map_err(|e| RegistryError::Validation(format!("{field} {value:?} is not a URI: {e}")))
}

//! UDDI-style registry: white pages (business entities), yellow pages
//! (categories) and green pages (binding templates and tModels).

mod store;
mod types;

pub use store::{Registry, RegistryError};
pub use types::{
    BindingTemplate, BusinessEntity, BusinessService, Contact, KeyedReference, ServiceMatch, TModel,
};

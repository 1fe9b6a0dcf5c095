//! Seeded synthetic networks for load testing and property checks.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::CollaborationEdge;
use crate::key::Key;
use crate::registry::{BindingTemplate, BusinessEntity, BusinessService, KeyedReference, TModel};
use crate::requirements::ServiceRequirements;
use crate::store::{Record, Stores};

pub const TEST_CATEGORY: &str = "generated-test-service";

/// Key of the taxonomy every generated service is filed under.
pub fn test_taxonomy() -> Key {
    Key::from_u128(0x7e57_0000_0000_4000_8000_0000_0000_0001)
}

/// Matches every generated service.
pub fn test_requirement() -> ServiceRequirements {
    ServiceRequirements {
        categories: vec![KeyedReference::new(test_taxonomy(), "generated", TEST_CATEGORY)],
        ..Default::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid generator parameters: {0}")]
pub struct GenSpecError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n_actors: usize,
    pub n_edges: usize,
    pub n_providers: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn max_edges(n_actors: usize) -> usize {
        n_actors * n_actors.saturating_sub(1) / 2
    }

    pub fn validate(&self) -> Result<(), GenSpecError> {
        if self.n_actors == 0 {
            return Err(GenSpecError("actors must be positive".into()));
        }
        let max = Self::max_edges(self.n_actors);
        if self.n_edges > max {
            return Err(GenSpecError(format!(
                "{} edges requested but {} actors admit at most {max}",
                self.n_edges, self.n_actors
            )));
        }
        if self.n_providers == 0 || self.n_providers > self.n_actors {
            return Err(GenSpecError(format!(
                "providers must be in 1..={}, got {}",
                self.n_actors, self.n_providers
            )));
        }
        Ok(())
    }

    /// Builds the network. A pure function of `self`.
    pub fn generate(&self) -> Result<Stores, GenSpecError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n_actors;

        let actors: Vec<Key> = (0..n).map(|i| fresh_key(&mut rng, i, 1)).collect();

        let mut records = vec![Record::Tmodel(TModel {
            tmodel_key: test_taxonomy(),
            name: "generated-test-taxonomy".into(),
            description: "Category shared by every generated service".into(),
            overview_url: None,
        })];
        for (i, key) in actors.iter().enumerate() {
            records.push(Record::Business(BusinessEntity::new(key.clone(), format!("Actor {i}"))));
            records.push(Record::Actor { id: key.clone() });
        }

        let providers = index::sample(&mut rng, n, self.n_providers).into_vec();
        for (j, &p) in providers.iter().enumerate() {
            let service_key = fresh_key(&mut rng, j, 2);
            let mut service = BusinessService::new(service_key.clone(), actors[p].clone(), format!("Service of actor {p}"));
            service.categories.push(KeyedReference::new(test_taxonomy(), "generated", TEST_CATEGORY));
            records.push(Record::Service(service));
            records.push(Record::Binding(BindingTemplate {
                binding_key: fresh_key(&mut rng, j, 3),
                service_key,
                access_point: format!("https://actor-{p}.example/service"),
                tmodel_keys: vec![test_taxonomy()],
            }));
        }

        let pairs = index::sample(&mut rng, Self::max_edges(n).max(1), self.n_edges).into_vec();
        for idx in pairs {
            let (a, b) = pair_from_index(idx);
            records.push(Record::Edge(CollaborationEdge::new(actors[a].clone(), actors[b].clone())));
        }

        let mut stores = Stores::new();
        stores
            .apply_all(records.into_iter().enumerate().collect())
            .expect("generated records are consistent");
        Ok(stores)
    }
}

/// Random high bits, tag and index in the low bits: unique, but key order
/// is unrelated to index order.
fn fresh_key(rng: &mut impl Rng, i: usize, tag: u128) -> Key {
    let high: u128 = rng.random::<u128>() & !0xffff_ffff_ffff_ffff;
    Key::from_u128(high | (tag << 32) | i as u128)
}

/// Inverse of `idx = b(b-1)/2 + a` for `a < b`.
fn pair_from_index(idx: usize) -> (usize, usize) {
    let mut b = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as usize;
    while b * (b - 1) / 2 > idx {
        b -= 1;
    }
    while (b + 1) * b / 2 <= idx {
        b += 1;
    }
    (idx - b * (b - 1) / 2, b)
}

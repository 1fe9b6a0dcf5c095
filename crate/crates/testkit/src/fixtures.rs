//! Seeded random stores and requests.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socialbroker_core::{
    Anchor, BindingTemplate, BusinessEntity, BusinessService, CollaborationEdge, Direction, Key,
    KeyedReference, Metric, RankingCriterion, Record, ServiceRequirements, SocialConstraint,
    SocialGraph, SocialRequirement, Stores, TModel,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random key whose order is unrelated to creation order.
pub fn random_key(rng: &mut impl Rng) -> Key {
    Key::from_u128(rng.random())
}

/// `G(n, p)` with `n` in `1..=max_n` and `p` drawn from `[0, 0.6)`.
pub fn random_graph(rng: &mut impl Rng, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.random_range(1..=max_n);
    let p: f64 = rng.random_range(0.0..0.6);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

/// Builds a `SocialGraph` over fresh random keys; `keys[i]` is node `i`.
pub fn build_graph(rng: &mut impl Rng, n: usize, edges: &[(usize, usize)]) -> (SocialGraph, Vec<Key>) {
    let keys: Vec<Key> = (0..n).map(|_| random_key(rng)).collect();
    let mut g = SocialGraph::new();
    for k in &keys {
        g.add_actor(k.clone());
    }
    for &(a, b) in edges {
        g.add_collaboration(CollaborationEdge::new(keys[a].clone(), keys[b].clone()))
            .unwrap();
    }
    (g, keys)
}

const WORDS: [&str; 6] = ["report", "Advert", "audit", "logistics", "PLUMBING", "translation"];
const CODES: [&str; 3] = ["alpha", "beta", "gamma"];

/// A random registry + graph + request, with the records kept so tests can
/// replay them in any order.
#[derive(Debug, Clone)]
pub struct Triple {
    pub records: Vec<Record>,
    pub consumer: Key,
    pub actors: Vec<Key>,
    pub taxonomies: Vec<Key>,
    pub service_req: ServiceRequirements,
    pub social_req: SocialRequirement,
}

impl Triple {
    pub fn stores(&self) -> Stores {
        let mut s = Stores::new();
        s.apply_all(self.records.iter().cloned().enumerate().collect())
            .expect("triple records are consistent");
        s
    }

    pub fn shuffled_stores(&self, rng: &mut impl Rng) -> Stores {
        let mut recs = self.records.clone();
        recs.shuffle(rng);
        let mut s = Stores::new();
        s.apply_all(recs.into_iter().enumerate().collect()).unwrap();
        s
    }
}

/// Up to `max_providers` businesses publishing services, a graph of at
/// most 20 actors that only partly overlaps the registry, and a request.
pub fn random_triple(seed: u64, max_providers: usize) -> Triple {
    let mut rng = rng(seed);
    let taxonomies: Vec<Key> = (0..2).map(|_| random_key(&mut rng)).collect();
    let mut records: Vec<Record> = taxonomies
        .iter()
        .enumerate()
        .map(|(i, k)| Record::Tmodel(TModel::new(k.clone(), format!("taxonomy-{i}"))))
        .collect();

    let (n, edges) = random_graph(&mut rng, 20);
    let n = n.max(2);
    let actors: Vec<Key> = (0..n).map(|_| random_key(&mut rng)).collect();
    for a in &actors {
        records.push(Record::Actor { id: a.clone() });
    }
    for &(a, b) in &edges {
        if a < n && b < n {
            records.push(Record::Edge(CollaborationEdge::new(actors[a].clone(), actors[b].clone())));
        }
    }

    let n_providers = rng.random_range(0..=max_providers);
    for p in 0..n_providers {
        // Most providers are actors; some exist only in the registry.
        let key = if rng.random_bool(0.8) {
            actors[rng.random_range(0..n)].clone()
        } else {
            random_key(&mut rng)
        };
        if records.iter().any(|r| matches!(r, Record::Business(b) if b.business_key == key)) {
            continue;
        }
        let mut entity = BusinessEntity::new(key.clone(), format!("Provider {p}"));
        if rng.random_bool(0.3) {
            entity.categories.push(random_ref(&mut rng, &taxonomies));
        }
        records.push(Record::Business(entity));
        for _ in 0..rng.random_range(1..=2) {
            let service_key = random_key(&mut rng);
            let mut s = BusinessService::new(
                service_key.clone(),
                key.clone(),
                format!("{} service", WORDS.choose(&mut rng).unwrap()),
            );
            s.description = format!("Handles {}", WORDS.choose(&mut rng).unwrap());
            if rng.random_bool(0.7) {
                s.categories.push(random_ref(&mut rng, &taxonomies));
            }
            records.push(Record::Service(s));
            if rng.random_bool(0.7) {
                let tmodel_keys = taxonomies
                    .iter()
                    .filter(|_| rng.random_bool(0.5))
                    .cloned()
                    .collect();
                records.push(Record::Binding(BindingTemplate {
                    binding_key: random_key(&mut rng),
                    service_key,
                    access_point: format!("https://p{p}.example/endpoint"),
                    tmodel_keys,
                }));
            }
        }
    }

    let mut service_req = ServiceRequirements::default();
    if rng.random_bool(0.5) {
        service_req.categories.push(random_ref(&mut rng, &taxonomies));
    }
    if rng.random_bool(0.3) {
        service_req.keywords.push(WORDS.choose(&mut rng).unwrap().to_lowercase()[..4].to_string());
    }
    if rng.random_bool(0.2) {
        service_req.required_tmodels.push(taxonomies.choose(&mut rng).unwrap().clone());
    }

    let consumer = actors[rng.random_range(0..n)].clone();
    let social_req = random_requirement(&mut rng, &actors);
    Triple {
        records,
        consumer,
        actors,
        taxonomies,
        service_req,
        social_req,
    }
}

fn random_ref(rng: &mut impl Rng, taxonomies: &[Key]) -> KeyedReference {
    KeyedReference::new(
        taxonomies.choose(rng).unwrap().clone(),
        "label",
        *CODES.choose(rng).unwrap(),
    )
}

fn random_anchor(rng: &mut impl Rng, actors: &[Key]) -> Anchor {
    if actors.is_empty() || rng.random_bool(0.6) {
        Anchor::Consumer
    } else {
        Anchor::Actor(actors.choose(rng).unwrap().clone())
    }
}

/// 0-3 constraints and 1-3 ranking criteria over the given anchors.
pub fn random_requirement(rng: &mut impl Rng, actors: &[Key]) -> SocialRequirement {
    let constraints = (0..rng.random_range(0..=3))
        .map(|_| match rng.random_range(0..4) {
            0 => SocialConstraint::WithinHops {
                anchor: random_anchor(rng, actors),
                k: rng.random_range(0..5),
            },
            1 => SocialConstraint::CollaboratedWith { anchor: random_anchor(rng, actors) },
            2 => SocialConstraint::MinDegree { n: rng.random_range(0..4) },
            _ => SocialConstraint::ConnectedTo { anchor: random_anchor(rng, actors) },
        })
        .collect();
    let ranking = (0..rng.random_range(1..=3))
        .map(|_| {
            let metric = match rng.random_range(0..4) {
                0 => Metric::HopsTo(random_anchor(rng, actors)),
                1 => Metric::Degree,
                2 => Metric::Closeness,
                _ => Metric::Betweenness,
            };
            let direction = if rng.random_bool(0.5) { Direction::Asc } else { Direction::Desc };
            RankingCriterion::new(metric, direction)
        })
        .collect();
    SocialRequirement::new(constraints, ranking)
}

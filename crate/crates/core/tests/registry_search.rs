use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use socialbroker_core::fixture::{org, report_requirement, PARTNER_NETWORK};
use socialbroker_core::snapshot::load_str;
use socialbroker_core::{
    BusinessEntity, BusinessService, Contact, Key, KeyedReference, Registry,
    ServiceRequirements,
};
use socialbroker_testkit::fixtures::{random_triple, rng};
use socialbroker_testkit::oracle::brute_find_services;

fn pairs(reg: &Registry, req: &ServiceRequirements) -> Vec<(Key, Key)> {
    reg.find_services(req)
        .into_iter()
        .map(|m| {
            assert_eq!(m.provider_key, m.service.business_key);
            (m.provider_key, m.service.service_key)
        })
        .collect()
}

#[test]
fn report_category_finds_f_h_and_j() {
    let stores = load_str(PARTNER_NETWORK).unwrap();
    let owners: Vec<Key> = stores
        .registry
        .find_services(&report_requirement())
        .into_iter()
        .map(|m| m.provider_key)
        .collect();
    assert_eq!(owners, vec![org('F'), org('H'), org('J')]);
    assert_eq!(stores.registry.get_business_detail(&org('H')).unwrap().name, "Organization H");
    assert_eq!(stores.registry.get_business_detail(&org('A')).unwrap().name, "Organization A");
}

#[test]
fn unknown_business_detail() {
    let stores = load_str(PARTNER_NETWORK).unwrap();
    let err = stores
        .registry
        .get_business_detail(&Key::from_u128(0xdead_beef))
        .unwrap_err();
    assert_eq!(err.to_string(), "unknown business 00000000-0000-0000-0000-0000deadbeef");
}

#[test]
fn keyword_search_on_ten_services_matches_linear_scan() {
    let mut reg = Registry::new();
    let names = [
        ("Advertising copy", "campaign text"),
        ("Performance report", "reports for an ADVERTISEMENT campaign"),
        ("Plumbing", "pipes"),
        ("Audit", "financial audit"),
        ("Translation", "advert localisation"),
        ("Logistics", "freight"),
        ("Adverse event review", "medical"),
        ("Report binding", "print"),
        ("Signage", "outdoor ADVERTS"),
        ("Catering", "food"),
    ];
    for (i, (name, description)) in names.iter().enumerate() {
        let owner = Key::from_u128(100 + (i as u128 % 3));
        if reg.get_business_detail(&owner).is_err() {
            reg.register_business(BusinessEntity::new(owner.clone(), format!("Owner {i}"))).unwrap();
        }
        let mut s = BusinessService::new(Key::from_u128(1000 + i as u128), owner, *name);
        s.description = description.to_string();
        reg.publish_service(s).unwrap();
    }
    let req = ServiceRequirements {
        keywords: vec!["advert".into()],
        ..Default::default()
    };
    let got = pairs(&reg, &req);
    assert_eq!(got, brute_find_services(&reg, &req));
    assert_eq!(got.len(), 4);
}

#[test]
fn find_services_matches_brute_force_scan() {
    for seed in 0..200 {
        let triple = random_triple(seed, 50);
        let stores = triple.stores();
        let reg = &stores.registry;
        assert!(reg.services().count() <= 100);
        let mut reqs = vec![triple.service_req.clone(), ServiceRequirements::default()];
        for t in &triple.taxonomies {
            for code in ["alpha", "beta", "gamma"] {
                reqs.push(ServiceRequirements {
                    categories: vec![KeyedReference::new(t.clone(), "x", code)],
                    ..Default::default()
                });
            }
            reqs.push(ServiceRequirements {
                required_tmodels: vec![t.clone()],
                keywords: vec!["SERV".into()],
                ..Default::default()
            });
        }
        for req in &reqs {
            assert_eq!(pairs(reg, req), brute_find_services(reg, req), "seed {seed} {req:?}");
        }
    }
}

#[test]
fn adding_constraints_never_enlarges_results() {
    for seed in 0..100 {
        let triple = random_triple(seed, 20);
        let stores = triple.stores();
        let mut r = rng(seed ^ 0xabcdef);
        let mut req = ServiceRequirements::default();
        let mut previous = pairs(&stores.registry, &req);
        for _ in 0..4 {
            match r.random_range(0..3) {
                0 => req.categories.push(KeyedReference::new(
                    triple.taxonomies[r.random_range(0..2)].clone(),
                    "",
                    ["alpha", "beta", "gamma"][r.random_range(0..3)],
                )),
                1 => req.keywords.push(["re", "audit", "serv", "x"][r.random_range(0..4)].into()),
                _ => req.required_tmodels.push(triple.taxonomies[r.random_range(0..2)].clone()),
            }
            let now = pairs(&stores.registry, &req);
            assert!(now.iter().all(|p| previous.contains(p)), "seed {seed}");
            previous = now;
        }
    }
}

#[test]
fn registration_order_does_not_change_results() {
    for seed in 0..50 {
        let triple = random_triple(seed, 20);
        let base = pairs(&triple.stores().registry, &triple.service_req);
        let mut r = rng(seed + 1);
        for _ in 0..3 {
            let shuffled = triple.shuffled_stores(&mut r);
            assert_eq!(pairs(&shuffled.registry, &triple.service_req), base);
        }
    }
}

#[test]
fn failed_mutation_leaves_store_unchanged() {
    let stores = load_str(PARTNER_NETWORK).unwrap();
    let mut reg = stores.registry.clone();
    let mut bad = BusinessService::new(Key::from_u128(5), org('F'), "x");
    bad.categories.push(KeyedReference::new(Key::from_u128(6), "", "y"));
    assert!(reg.publish_service(bad).is_err());
    assert_eq!(reg, stores.registry);
}

fn entity_strategy() -> impl Strategy<Value = BusinessEntity> {
    (
        any::<u128>(),
        "[A-Za-z][A-Za-z ]{0,20}",
        ".{0,40}",
        proptest::collection::vec(("[a-z]{1,10}", proptest::option::of("[0-9]{5,9}")), 0..3),
    )
        .prop_map(|(bits, name, description, contacts)| BusinessEntity {
            business_key: Key::from_u128(bits),
            name,
            description,
            contacts: contacts
                .into_iter()
                .map(|(name, phone)| Contact { name, phone, email: None, address: None })
                .collect(),
            identifiers: vec![],
            categories: vec![],
        })
}

proptest! {
    #[test]
    fn register_then_get_round_trips(entities in proptest::collection::vec(entity_strategy(), 1..10)) {
        let mut reg = Registry::new();
        let mut stored = Vec::new();
        for e in entities {
            if reg.register_business(e.clone()).is_ok() {
                stored.push(e);
            }
        }
        for e in &stored {
            prop_assert_eq!(reg.get_business_detail(&e.business_key).unwrap(), e);
        }
    }

    #[test]
    fn shuffled_registration_yields_identical_search(seed in 0u64..1000) {
        let triple = random_triple(seed, 20);
        let mut recs = triple.records.clone();
        recs.shuffle(&mut rng(seed));
        let a = triple.stores();
        let mut b = socialbroker_core::Stores::new();
        b.apply_all(recs.into_iter().enumerate().collect()).unwrap();
        prop_assert_eq!(a.registry.find_services(&triple.service_req), b.registry.find_services(&triple.service_req));
    }
}

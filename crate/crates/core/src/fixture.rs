//! Shipped example network: ten organizations A..J, three of which (F, H
//! and J) publish a performance-report service.
//!
//! Only four partnerships exist: A-H, A-G, G-F and F-J. H is a direct
//! partner of A, F is reached through G, and J sits three hops out. B, C,
//! D, E and I are isolated.

use crate::key::Key;
use crate::registry::KeyedReference;
use crate::requirements::ServiceRequirements;

pub const PARTNER_NETWORK: &str = include_str!("../fixtures/partner_network.jsonl");

/// Business (and actor) key of organization `letter` in `A..=J`.
pub fn org(letter: char) -> Key {
    let idx = (letter as u32)
        .checked_sub('A' as u32)
        .filter(|i| *i < 10)
        .unwrap_or_else(|| panic!("no organization {letter:?} in the partner network"));
    Key::parse(&format!("b0000000-0000-4000-8000-0000000000{:02}", idx + 1)).expect("valid key")
}

pub fn report_taxonomy() -> Key {
    Key::parse("e0000000-0000-4000-8000-000000000001").expect("valid key")
}

pub const REPORT_CATEGORY: &str = "performance-report";

/// The functional requirement "can write a performance report".
pub fn report_requirement() -> ServiceRequirements {
    ServiceRequirements {
        categories: vec![KeyedReference::new(report_taxonomy(), "reports", REPORT_CATEGORY)],
        ..Default::default()
    }
}

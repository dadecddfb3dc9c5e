//! Fault-injection switches for the mutation-sensitivity harness.
//!
//! Defining equality checks inside classifier *search* paths are routed
//! through [`gate`], which inverts the named check while that mutation is
//! active. Witness re-verification never calls `gate`, so an active mutation
//! must surface as a sweep failure (a bogus witness that fails re-check, a
//! missed case, or a changed verdict fingerprint). The harness in the
//! acceptance suite activates each point in [`MUTATION_POINTS`] in turn and
//! requires every one of them to be detected.

use std::sync::RwLock;

static ACTIVE: RwLock<Option<&'static str>> = RwLock::new(None);

/// Every fault-injection point wired into the classifiers.
pub const MUTATION_POINTS: &[&str] = &[
    "essential.s_deficit",
    "essential.t_deficit",
    "essential.kind1.ends",
    "essential.kind2.ends",
    "essential.kind2.next_ends",
    "essential.kind2.cross_identity",
    "essential.kind3.k0_end",
    "essential.kind3.k1_end",
    "essential.kind3.klein_sum",
    "essential.common_difference",
    "n3.case1.translate",
    "n3.case1.complement",
    "n3.case2.progressions",
    "n3.case4.phi_kneser",
    "n3.case4.end_sum",
    "n3.case4.periodicity",
];

/// Activate one mutation point (or none). Affects all threads.
pub fn set_active(name: Option<&'static str>) {
    *ACTIVE.write().unwrap() = name;
}

pub fn active() -> Option<&'static str> {
    *ACTIVE.read().unwrap()
}

/// Pass `value` through, inverted when `name` is the active mutation.
#[inline]
pub fn gate(name: &str, value: bool) -> bool {
    match *ACTIVE.read().unwrap() {
        Some(active) if active == name => !value,
        _ => value,
    }
}

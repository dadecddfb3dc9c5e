//! Instance enumeration, theorem verification sweeps and counterexample
//! minimization.
//!
//! A sweep enumerates translation-normalized instances (S and T both
//! shifted to contain 0 — every checked statement is translation-invariant,
//! which is itself asserted on a sampled basis by the
//! `translation-invariance` check), filters them through a theorem's
//! hypothesis checker, runs the classifier or property, and merges per-shard
//! outcomes associatively. Identical filters and seeds produce identical
//! reports modulo the timing field.

mod checks;
mod minimize;

pub use checks::{check_ids, lookup_check, CheckDef};
pub use minimize::minimize;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifier::PairInstance;
use crate::error::{Error, Result};
use crate::group::{enumerate_groups, make_group, GroupSpec};
use crate::setops::SubsetMask;

pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

#[derive(Clone, Debug)]
pub enum SampleMode {
    Exhaustive,
    Random { seed: u64, count: u64 },
}

/// Which instances a sweep visits.
#[derive(Clone, Debug)]
pub struct InstanceFilter {
    /// Explicit factor lists, or every abelian group up to `max_order`.
    pub groups: Vec<Vec<u32>>,
    pub s_size: (u32, u32),
    pub t_size: (u32, u32),
    pub mu: Option<u32>,
    pub mode: SampleMode,
    /// Budget in estimated sumset evaluations; exhaustive sweeps refuse to
    /// start beyond it.
    pub budget: u64,
}

impl InstanceFilter {
    pub fn max_order(max: u32) -> Self {
        InstanceFilter {
            groups: enumerate_groups(max),
            s_size: (1, u32::MAX),
            t_size: (1, u32::MAX),
            mu: None,
            mode: SampleMode::Exhaustive,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_groups(groups: Vec<Vec<u32>>) -> Self {
        InstanceFilter { groups, ..Self::max_order(0) }
    }

    pub fn sizes(mut self, s: (u32, u32), t: (u32, u32)) -> Self {
        self.s_size = s;
        self.t_size = t;
        self
    }

    pub fn random(mut self, seed: u64, count: u64) -> Self {
        self.mode = SampleMode::Random { seed, count };
        self
    }
}

/// A failing instance; re-running the check reproduces the failed clause.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub theorem: String,
    pub clause: String,
    pub instance: PairInstance,
    /// Sub-instance selector for per-k properties.
    pub k: Option<u32>,
    pub minimized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub mode: String,
    pub groups: Vec<Vec<u32>>,
    pub enumerated: u64,
    pub checked: u64,
    pub tally: BTreeMap<String, u64>,
    pub violations: Vec<Counterexample>,
    pub pass: bool,
    pub wall_ms: u128,
}

/// Per-shard accumulation; merged associatively.
#[derive(Default)]
pub(crate) struct SweepOutcome {
    pub enumerated: u64,
    pub checked: u64,
    pub tally: BTreeMap<String, u64>,
    pub violations: Vec<Counterexample>,
}

impl SweepOutcome {
    pub(crate) fn bump(&mut self, key: &str) {
        *self.tally.entry(key.to_string()).or_insert(0) += 1;
    }

    fn merge(mut self, other: SweepOutcome) -> SweepOutcome {
        self.enumerated += other.enumerated;
        self.checked += other.checked;
        for (k, v) in other.tally {
            *self.tally.entry(k).or_insert(0) += v;
        }
        self.violations.extend(other.violations);
        self
    }
}

/// Deterministic enumeration of the subsets of [0,n) containing 0 with
/// cardinality in `sizes`, as low-word masks. Uses per-size combinations
/// when the size window is narrow, otherwise a plain mask loop.
pub(crate) fn subsets_with_zero(n: u32, sizes: (u32, u32)) -> Vec<u64> {
    let lo = sizes.0.max(1);
    let hi = sizes.1.min(n);
    if lo > hi {
        return Vec::new();
    }
    let wide = (hi - lo + 1) * 4 >= n; // window covers most sizes
    if wide && n <= 25 {
        return (0u64..1 << (n - 1))
            .map(|raw| raw << 1 | 1)
            .filter(|m| {
                let c = m.count_ones();
                c >= lo && c <= hi
            })
            .collect();
    }
    let mut out = Vec::new();
    for size in lo..=hi {
        // choose size-1 from {1,...,n-1}
        let k = size - 1;
        let mut stack: Vec<(u64, u32, u32)> = vec![(1, 1, 0)];
        while let Some((mask, next, count)) = stack.pop() {
            if count == k {
                out.push(mask);
                continue;
            }
            for e in (next..n).rev() {
                if n - e >= k - count {
                    stack.push((mask | 1 << e, e + 1, count + 1));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn mask_of(g: &Arc<GroupSpec>, raw: u64) -> SubsetMask {
    SubsetMask::from_words(g, vec![raw])
}

/// Run one registered check over the filtered instance space.
pub fn verify_theorem(id: &str, filter: &InstanceFilter) -> Result<VerificationReport> {
    let def = lookup_check(id)?;
    let start = Instant::now();
    let groups: Vec<Arc<GroupSpec>> = filter
        .groups
        .iter()
        .map(|f| make_group(f))
        .collect::<Result<_>>()?;

    if matches!(filter.mode, SampleMode::Exhaustive) {
        let estimate: u64 = groups.iter().map(|g| def.estimate(g.order())).sum();
        if estimate > filter.budget {
            return Err(Error::Budget { estimate, budget: filter.budget });
        }
    }

    let mut total = SweepOutcome::default();
    for g in &groups {
        if g.order() > 64 {
            return Err(Error::Parse(format!(
                "sweeps support orders up to 64, got {}",
                g.order()
            )));
        }
        let outcome = match &filter.mode {
            SampleMode::Exhaustive => run_exhaustive(def, g, filter),
            SampleMode::Random { seed, count } => run_random(def, g, filter, *seed, *count),
        };
        total = total.merge(outcome);
    }
    // canonical order regardless of shard interleaving
    total.violations.sort_by(|a, b| {
        let ka = (a.instance.group.order(), a.instance.s.to_hex(), a.instance.t.to_hex(), a.k);
        let kb = (b.instance.group.order(), b.instance.s.to_hex(), b.instance.t.to_hex(), b.k);
        ka.cmp(&kb)
    });
    let pass = total.violations.is_empty();
    Ok(VerificationReport {
        theorem: id.to_string(),
        mode: match &filter.mode {
            SampleMode::Exhaustive => "exhaustive".to_string(),
            SampleMode::Random { seed, count } => format!("random(seed={},count={})", seed, count),
        },
        groups: filter.groups.clone(),
        enumerated: total.enumerated,
        checked: total.checked,
        tally: total.tally,
        violations: total.violations,
        pass,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn effective_sizes(def: &CheckDef, filter: &InstanceFilter) -> ((u32, u32), (u32, u32)) {
    let merge = |a: (u32, u32), b: (u32, u32)| (a.0.max(b.0), a.1.min(b.1));
    (merge(def.s_sizes, filter.s_size), merge(def.t_sizes, filter.t_size))
}

fn run_exhaustive(def: &CheckDef, g: &Arc<GroupSpec>, filter: &InstanceFilter) -> SweepOutcome {
    use rayon::prelude::*;
    let n = g.order();
    let (s_sizes, t_sizes) = effective_sizes(def, filter);
    let s_masks = subsets_with_zero(n, s_sizes);
    if def.pair {
        let t_masks = Arc::new(subsets_with_zero(n, t_sizes));
        s_masks
            .par_iter()
            .map(|&s_raw| {
                let mut out = SweepOutcome::default();
                let s = mask_of(g, s_raw);
                for &t_raw in t_masks.iter() {
                    let t = mask_of(g, t_raw);
                    out.enumerated += 1;
                    check_pair(def, g, &s, &t, filter.mu, &mut out);
                }
                out
            })
            .reduce(SweepOutcome::default, SweepOutcome::merge)
    } else {
        s_masks
            .par_iter()
            .map(|&s_raw| {
                let mut out = SweepOutcome::default();
                let s = mask_of(g, s_raw);
                out.enumerated += 1;
                (def.run)(g, &s, None, filter.mu, &mut out);
                out
            })
            .reduce(SweepOutcome::default, SweepOutcome::merge)
    }
}

fn run_random(
    def: &CheckDef,
    g: &Arc<GroupSpec>,
    filter: &InstanceFilter,
    seed: u64,
    count: u64,
) -> SweepOutcome {
    use rayon::prelude::*;
    let n = g.order();
    let full: u64 = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ g.order() as u64);
    let draws: Vec<(u64, u64)> = (0..count)
        .map(|_| {
            let s = (rng.gen::<u64>() & full) | 1;
            let t = (rng.gen::<u64>() & full) | 1;
            (s, t)
        })
        .collect();
    draws
        .par_iter()
        .map(|&(s_raw, t_raw)| {
            let mut out = SweepOutcome::default();
            out.enumerated += 1;
            let s = mask_of(g, s_raw);
            if def.pair {
                let t = mask_of(g, t_raw);
                check_pair(def, g, &s, &t, filter.mu, &mut out);
            } else {
                (def.run)(g, &s, None, filter.mu, &mut out);
            }
            out
        })
        .reduce(SweepOutcome::default, SweepOutcome::merge)
}

fn check_pair(
    def: &CheckDef,
    g: &Arc<GroupSpec>,
    s: &SubsetMask,
    t: &SubsetMask,
    mu: Option<u32>,
    out: &mut SweepOutcome,
) {
    if def.ordered_sizes && s.cardinality() > t.cardinality() {
        return;
    }
    (def.run)(g, s, Some(t), mu, out);
}

/// Re-run a stored counterexample and report whether the same clause fails.
pub fn reproduces(c: &Counterexample) -> Result<bool> {
    let def = lookup_check(&c.theorem)?;
    let mut out = SweepOutcome::default();
    let t = if def.pair { Some(&c.instance.t) } else { None };
    (def.run)(&c.instance.group, &c.instance.s, t, Some(c.instance.mu), &mut out);
    Ok(out
        .violations
        .iter()
        .any(|v| v.clause == c.clause && v.k == c.k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration_counts() {
        // subsets of Z_6 containing 0: 2^5 of any size
        assert_eq!(subsets_with_zero(6, (1, 6)).len(), 32);
        // |S| = 3 containing 0: C(5,2) = 10
        assert_eq!(subsets_with_zero(6, (3, 3)).len(), 10);
        assert!(subsets_with_zero(6, (7, 8)).is_empty());
        // deterministic and sorted
        let a = subsets_with_zero(8, (2, 4));
        let mut b = a.clone();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn kneser_sweep_small() {
        let rep = verify_theorem("kneser", &InstanceFilter::max_order(8)).unwrap();
        assert!(rep.pass, "violations: {:?}", rep.violations.len());
        assert!(rep.checked > 0);
    }

    #[test]
    fn random_mode_reproducible() {
        let f = InstanceFilter::with_groups(vec![vec![8]]).random(1, 500);
        let a = verify_theorem("kneser", &f).unwrap();
        let b = verify_theorem("kneser", &f).unwrap();
        assert_eq!(a.enumerated, 500);
        assert_eq!(a.checked, b.checked);
        assert_eq!(a.tally, b.tally);
    }

    #[test]
    fn budget_refusal() {
        let mut f = InstanceFilter::max_order(12);
        f.budget = 10;
        match verify_theorem("kneser", &f) {
            Err(Error::Budget { estimate, budget }) => {
                assert!(estimate > budget);
            }
            other => panic!("expected budget refusal, got {:?}", other.map(|r| r.pass)),
        }
    }

    #[test]
    fn shard_merge_is_thread_count_independent() {
        let f = InstanceFilter::max_order(7);
        let solo = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = solo.install(|| verify_theorem("3x3", &f)).unwrap();
        let many = verify_theorem("3x3", &f).unwrap();
        assert_eq!(one.checked, many.checked);
        assert_eq!(one.tally, many.tally);
        assert_eq!(one.violations.len(), many.violations.len());
    }
}

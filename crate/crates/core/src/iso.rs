//! Isoperimetric machinery: kappa_k connectivity, fragments, atoms,
//! hyper-atoms, super-atoms, negative fragments and (T,S,H)-matchings.
//!
//! kappa_k(S) = min { |boundary(X)| : |X| >= k and |X^S| >= k }, with the
//! empty minimum defined as |G| - 2k + 1. A k-fragment attains the minimum;
//! a k-atom is a minimum-cardinality k-fragment. All calls normalize S to
//! its translate containing 0 first, so fragments of S are fragments of S^*.
//!
//! Two search strategies are provided. `Exact` runs a pruned full scan over
//! all subsets (orders up to 24). `Seeded` evaluates structured candidates —
//! small subsets, subgroup cosets, progressions, greedy growth chains and
//! their duals through the exterior — then refines by local search; it is a
//! heuristic and its reports are labeled inexact.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{quotient, subgroup_generated, GroupSpec, Subgroup};
use crate::setops::SubsetMask;

/// Largest order accepted by the exact full scan.
pub const EXACT_SCAN_MAX: u32 = 24;

/// Orders up to which reports list every fragment.
const FULL_FRAGMENT_LIST_MAX: u32 = 16;

/// Cap on stored atom masks (the count is still exact below the cap).
const ATOM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exact,
    Seeded,
}

/// kappa_k plus the fragments and atoms that attain it.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    pub k: u32,
    pub kappa: u32,
    pub separable: bool,
    /// All fragments for orders <= 16 in exact mode; otherwise the atoms
    /// (which are themselves fragments).
    pub fragments: Vec<SubsetMask>,
    /// Atoms translated to contain 0, deduplicated, lexicographically sorted.
    pub atoms: Vec<SubsetMask>,
    /// True when more same-size atoms exist than the storage cap.
    pub atoms_truncated: bool,
    pub atom_size: u32,
    pub mode: ScanMode,
    /// True when produced by a full scan; seeded results are upper bounds
    /// for kappa (reported separability is still exact whenever the size-k
    /// candidate family was complete).
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// scan kernel (orders <= 64, subsets as u64 masks)
// ---------------------------------------------------------------------------

/// rows[x] = bitmask of x + S. Requires 0 in S so that x is in rows[x].
pub(crate) fn sum_rows(g: &GroupSpec, s: &SubsetMask) -> Vec<u64> {
    debug_assert!(g.order() <= 64);
    debug_assert!(s.contains(0));
    let n = g.order();
    let mut rows = vec![0u64; n as usize];
    for x in 0..n {
        let mut row = 0u64;
        for e in s.iter() {
            row |= 1 << g.add(x, e);
        }
        rows[x as usize] = row;
    }
    rows
}

#[derive(Debug)]
pub(crate) struct ScanBest {
    pub kappa: u32,
    pub atom_size: u32,
    pub atoms: Vec<u64>,
    pub atoms_truncated: bool,
}

struct BestScan<'a> {
    n: u32,
    rows: &'a [u64],
    k: u32,
    cap_pop: u32,
    found: bool,
    best: u32,
    atom_size: u32,
    atoms: Vec<u64>,
    truncated: bool,
}

impl BestScan<'_> {
    fn rec(&mut self, i: u32, x: u64, sum: u64, xpop: u32, spop: u32) {
        if spop > self.cap_pop {
            return;
        }
        let remaining = self.n - i;
        if xpop + remaining < self.k {
            return;
        }
        if self.found && spop - xpop > self.best + remaining {
            return;
        }
        if i == self.n {
            if xpop >= self.k {
                let delta = spop - xpop;
                if !self.found || delta < self.best {
                    self.found = true;
                    self.best = delta;
                    self.atom_size = xpop;
                    self.atoms.clear();
                    self.atoms.push(x);
                    self.truncated = false;
                } else if delta == self.best {
                    if xpop < self.atom_size {
                        self.atom_size = xpop;
                        self.atoms.clear();
                        self.atoms.push(x);
                        self.truncated = false;
                    } else if xpop == self.atom_size {
                        if self.atoms.len() < ATOM_CAP {
                            self.atoms.push(x);
                        } else {
                            self.truncated = true;
                        }
                    }
                }
            }
            return;
        }
        self.rec(i + 1, x, sum, xpop, spop);
        let nsum = sum | self.rows[i as usize];
        self.rec(i + 1, x | 1 << i, nsum, xpop + 1, nsum.count_ones());
    }
}

/// Exact minimum over the full subset space; `None` when S is not
/// k-separable.
pub(crate) fn scan_best(n: u32, rows: &[u64], k: u32) -> Option<ScanBest> {
    if n < k {
        return None;
    }
    let mut scan = BestScan {
        n,
        rows,
        k,
        cap_pop: n - k,
        found: false,
        best: 0,
        atom_size: 0,
        atoms: Vec::new(),
        truncated: false,
    };
    scan.rec(0, 0, 0, 0, 0);
    scan.found.then_some(ScanBest {
        kappa: scan.best,
        atom_size: scan.atom_size,
        atoms: scan.atoms,
        atoms_truncated: scan.truncated,
    })
}

struct FragmentScan<'a, F: FnMut(u64)> {
    n: u32,
    rows: &'a [u64],
    k: u32,
    cap_pop: u32,
    kappa: u32,
    sink: F,
}

impl<F: FnMut(u64)> FragmentScan<'_, F> {
    fn rec(&mut self, i: u32, x: u64, sum: u64, xpop: u32, spop: u32) {
        if spop > self.cap_pop {
            return;
        }
        let remaining = self.n - i;
        if xpop + remaining < self.k {
            return;
        }
        if spop - xpop > self.kappa + remaining {
            return;
        }
        if i == self.n {
            if xpop >= self.k && spop - xpop == self.kappa {
                (self.sink)(x);
            }
            return;
        }
        self.rec(i + 1, x, sum, xpop, spop);
        let nsum = sum | self.rows[i as usize];
        self.rec(i + 1, x | 1 << i, nsum, xpop + 1, nsum.count_ones());
    }
}

/// Stream every k-fragment (as a raw mask) once kappa is known.
pub(crate) fn for_each_fragment(n: u32, rows: &[u64], k: u32, kappa: u32, sink: impl FnMut(u64)) {
    let mut scan = FragmentScan { n, rows, k, cap_pop: n - k, kappa, sink };
    scan.rec(0, 0, 0, 0, 0);
}

// ---------------------------------------------------------------------------
// seeded candidate search
// ---------------------------------------------------------------------------

const KSUBSET_LIMIT: u64 = 250_000;
const LOCAL_SEARCH_SEEDS: usize = 64;

struct SeededBest {
    kappa: u32,
    atom_size: u32,
    atoms: Vec<u64>,
}

struct SeededOutcome {
    /// kappa upper bound, atom size and atom masks (normalized to contain 0).
    found: Option<(u32, u32, Vec<SubsetMask>)>,
    /// True when the size-k family was fully enumerated, which decides
    /// separability exactly.
    separability_exact: bool,
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn seeded_search_u64(g: &Arc<GroupSpec>, s: &SubsetMask, k: u32) -> SeededOutcome {
    let n = g.order();
    let rows = sum_rows(g, s);
    let neg = s.negate();
    let rows_neg = sum_rows(g, &neg);
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let mut best: Option<SeededBest> = None;
    let mut shortlist: Vec<(u32, u64)> = Vec::new();
    let consider = |x: u64, best: &mut Option<SeededBest>, shortlist: &mut Vec<(u32, u64)>| {
        let xpop = x.count_ones();
        if xpop < k || x == 0 {
            return;
        }
        let mut sum = 0u64;
        let mut b = x;
        while b != 0 {
            sum |= rows[b.trailing_zeros() as usize];
            b &= b - 1;
        }
        let spop = sum.count_ones();
        if n - spop < k {
            return;
        }
        let delta = spop - xpop;
        match best {
            None => *best = Some(SeededBest { kappa: delta, atom_size: xpop, atoms: vec![x] }),
            Some(b) => {
                if delta < b.kappa || (delta == b.kappa && xpop < b.atom_size) {
                    b.kappa = delta;
                    b.atom_size = xpop;
                    b.atoms = vec![x];
                } else if delta == b.kappa
                    && xpop == b.atom_size
                    && !b.atoms.contains(&x)
                    && b.atoms.len() < ATOM_CAP
                {
                    b.atoms.push(x);
                }
            }
        }
        if shortlist.len() < LOCAL_SEARCH_SEEDS {
            if !shortlist.iter().any(|&(_, m)| m == x) {
                shortlist.push((delta, x));
                shortlist.sort_unstable();
            }
        } else if delta < shortlist.last().unwrap().0 && !shortlist.iter().any(|&(_, m)| m == x) {
            shortlist.pop();
            shortlist.push((delta, x));
            shortlist.sort_unstable();
        }
    };

    // size-k and size-(k+1) subsets
    let mut separability_exact = false;
    if binomial(n as u64, k as u64) <= KSUBSET_LIMIT {
        separability_exact = true;
        let mut combo = |size: u32| {
            let mut stack: Vec<(u64, u32, u32)> = vec![(0, 0, 0)]; // mask, next, count
            while let Some((mask, next, count)) = stack.pop() {
                if count == size {
                    consider(mask, &mut best, &mut shortlist);
                    continue;
                }
                for e in next..n {
                    if n - e >= size - count {
                        stack.push((mask | 1 << e, e + 1, count + 1));
                    }
                }
            }
        };
        combo(k);
        if binomial(n as u64, (k + 1) as u64) <= KSUBSET_LIMIT {
            combo(k + 1);
        }
    }

    // subgroup cosets and their duals
    let mut structured: Vec<u64> = Vec::new();
    for h in g.subgroups() {
        let mut covered = 0u64;
        for x in 0..n {
            if covered >> x & 1 == 1 {
                continue;
            }
            let mut coset = 0u64;
            for m in h.members.iter() {
                coset |= 1 << g.add(x, m);
            }
            covered |= coset;
            structured.push(coset);
        }
    }
    // progressions
    for r in 1..n {
        let ord = g.element_order(r);
        for a in 0..n {
            let mut mask = 1u64 << a;
            let mut cur = a;
            for len in 2..=ord.min(n) {
                cur = g.add(cur, r);
                mask |= 1 << cur;
                if len >= k {
                    structured.push(mask);
                }
            }
        }
    }
    // greedy boundary-minimizing growth chains
    let mut chains: Vec<u64> = Vec::new();
    for start in 0..n {
        let mut x = 1u64 << start;
        let mut sum = rows[start as usize];
        chains.push(x);
        for _ in 1..n {
            let mut pick = None;
            let mut pick_pop = u32::MAX;
            for e in 0..n {
                if x >> e & 1 == 1 {
                    continue;
                }
                let p = (sum | rows[e as usize]).count_ones();
                if p < pick_pop {
                    pick_pop = p;
                    pick = Some(e);
                }
            }
            match pick {
                Some(e) => {
                    x |= 1 << e;
                    sum |= rows[e as usize];
                    chains.push(x);
                }
                None => break,
            }
        }
    }
    structured.extend_from_slice(&chains);

    for &m in &structured {
        consider(m, &mut best, &mut shortlist);
        // dual through the exterior of -S: fragments of -S map to fragments
        // of S via Z -> complement(Z - S)
        let mut zsum = 0u64;
        let mut b = m;
        while b != 0 {
            zsum |= rows_neg[b.trailing_zeros() as usize];
            b &= b - 1;
        }
        consider(!zsum & full, &mut best, &mut shortlist);
    }

    // local refinement from the shortlist
    for (_, seed) in shortlist.clone() {
        let refined = descend(n, &rows, k, seed);
        consider(refined, &mut best, &mut shortlist);
    }

    SeededOutcome {
        found: best.map(|b| (b.kappa, b.atom_size, canonical_atoms(g, &b.atoms))),
        separability_exact,
    }
}

/// First-improvement descent on |boundary| using single-element moves.
fn descend(n: u32, rows: &[u64], k: u32, mut x: u64) -> u64 {
    let resum = |x: u64| {
        let mut sum = 0u64;
        let mut b = x;
        while b != 0 {
            sum |= rows[b.trailing_zeros() as usize];
            b &= b - 1;
        }
        sum
    };
    let mut steps = 0;
    'outer: while steps < 2 * n {
        steps += 1;
        let sum = resum(x);
        let (xpop, spop) = (x.count_ones(), sum.count_ones());
        let delta = spop - xpop;
        for e in 0..n {
            if x >> e & 1 == 0 {
                let nsum = sum | rows[e as usize];
                let npop = nsum.count_ones();
                if n - npop >= k && npop - (xpop + 1) < delta {
                    x |= 1 << e;
                    continue 'outer;
                }
            } else if xpop > k {
                let cand = x & !(1 << e);
                let csum = resum(cand);
                let cpop = csum.count_ones();
                if n - cpop >= k && cpop - (xpop - 1) < delta {
                    x = cand;
                    continue 'outer;
                }
            }
        }
        break;
    }
    x
}

/// Seeded search for orders above 64: structured families only, evaluated on
/// wide masks.
fn seeded_search_wide(g: &Arc<GroupSpec>, s: &SubsetMask, k: u32) -> SeededOutcome {
    let n = g.order();
    let neg = s.negate();
    let mut best: Option<(u32, u32, SubsetMask)> = None;
    let consider = |x: &SubsetMask, best: &mut Option<(u32, u32, SubsetMask)>| {
        let xpop = x.cardinality();
        if xpop < k {
            return;
        }
        let sum = s.sumset(x).expect("same group");
        if n - sum.cardinality() < k {
            return;
        }
        let delta = sum.cardinality() - xpop;
        if best.as_ref().map_or(true, |b| (delta, xpop) < (b.0, b.1)) {
            *best = Some((delta, xpop, x.clone()));
        }
    };
    for h in g.subgroups() {
        let mut covered = SubsetMask::empty(g);
        for x in 0..n {
            if covered.contains(x) {
                continue;
            }
            let coset = h.members.translate(x);
            covered = covered.union(&coset);
            consider(&coset, &mut best);
            consider(&coset.exterior_under(&neg), &mut best);
        }
    }
    for r in 1..n.min(4096) {
        let ord = g.element_order(r);
        for a in 0..n.min(4096) {
            let mut mask = SubsetMask::singleton(g, a);
            let mut cur = a;
            for len in 2..=ord.min(n).min(4 * k + 8) {
                cur = g.add(cur, r);
                mask.insert(cur);
                if len >= k {
                    consider(&mask, &mut best);
                }
            }
        }
    }
    SeededOutcome {
        found: best.map(|(delta, size, mask)| {
            let (norm, _) = mask.normalize().expect("nonempty");
            (delta, size, vec![norm])
        }),
        separability_exact: false,
    }
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

fn check_kappa_pre(s: &SubsetMask, k: u32) -> Result<(Arc<GroupSpec>, SubsetMask)> {
    if k == 0 {
        return Err(Error::Parse("k must be >= 1".into()));
    }
    if !s.contains(0) {
        return Err(Error::ZeroNotInSet("kappa"));
    }
    if !s.is_generating() {
        return Err(Error::NotGenerating);
    }
    let g = Arc::clone(s.group());
    if g.order() + 1 < 2 * k {
        return Err(Error::OrderTooSmallForK { order: g.order(), k });
    }
    let (star, _) = s.normalize()?;
    Ok((g, star))
}

/// kappa_k with mode chosen by order: exact through order 20, seeded above.
pub fn kappa(s: &SubsetMask, k: u32) -> Result<ConnectivityReport> {
    let mode = if s.group().order() <= 20 { ScanMode::Exact } else { ScanMode::Seeded };
    kappa_with_mode(s, k, mode)
}

pub fn kappa_with_mode(s: &SubsetMask, k: u32, mode: ScanMode) -> Result<ConnectivityReport> {
    let (g, star) = check_kappa_pre(s, k)?;
    let n = g.order();
    match mode {
        ScanMode::Exact => {
            if n > EXACT_SCAN_MAX {
                return Err(Error::ExactScanTooLarge { order: n, max: EXACT_SCAN_MAX });
            }
            let rows = sum_rows(&g, &star);
            match scan_best(n, &rows, k) {
                None => Ok(not_separable_report(&g, k, mode)),
                Some(best) => {
                    let mut fragments = Vec::new();
                    if n <= FULL_FRAGMENT_LIST_MAX {
                        let mut raw = Vec::new();
                        for_each_fragment(n, &rows, k, best.kappa, |x| raw.push(x));
                        raw.sort_unstable();
                        fragments =
                            raw.into_iter().map(|x| mask_from_u64(&g, x)).collect();
                    }
                    let atoms = canonical_atoms(&g, &best.atoms);
                    if fragments.is_empty() {
                        fragments = atoms.clone();
                    }
                    Ok(ConnectivityReport {
                        k,
                        kappa: best.kappa,
                        separable: true,
                        fragments,
                        atoms,
                        atoms_truncated: best.atoms_truncated,
                        atom_size: best.atom_size,
                        mode,
                        exact: true,
                    })
                }
            }
        }
        ScanMode::Seeded => {
            let outcome = if n <= 64 {
                seeded_search_u64(&g, &star, k)
            } else {
                seeded_search_wide(&g, &star, k)
            };
            match outcome.found {
                None => {
                    let mut rep = not_separable_report(&g, k, mode);
                    rep.exact = outcome.separability_exact;
                    Ok(rep)
                }
                Some((kap, atom_size, atoms)) => Ok(ConnectivityReport {
                    k,
                    kappa: kap,
                    separable: true,
                    fragments: atoms.clone(),
                    atoms,
                    atoms_truncated: false,
                    atom_size,
                    mode,
                    exact: false,
                }),
            }
        }
    }
}

fn not_separable_report(g: &Arc<GroupSpec>, k: u32, mode: ScanMode) -> ConnectivityReport {
    ConnectivityReport {
        k,
        kappa: g.order() + 1 - 2 * k,
        separable: false,
        fragments: Vec::new(),
        atoms: Vec::new(),
        atoms_truncated: false,
        atom_size: 0,
        mode,
        exact: mode == ScanMode::Exact,
    }
}

pub(crate) fn mask_from_u64(g: &Arc<GroupSpec>, x: u64) -> SubsetMask {
    SubsetMask::from_words(g, vec![x])
}

/// Translate each raw atom mask to contain 0, deduplicate, sort.
fn canonical_atoms(g: &Arc<GroupSpec>, raw: &[u64]) -> Vec<SubsetMask> {
    let mut out: Vec<SubsetMask> = Vec::new();
    for &x in raw {
        let m = mask_from_u64(g, x);
        let (norm, _) = m.normalize().expect("atoms are nonempty");
        if !out.iter().any(|a| a == &norm) {
            out.push(norm);
        }
    }
    out.sort_by(|a, b| a.cmp_lex(b));
    out
}

/// kappa_2 plus the list of subgroups attaining it; shared by the
/// degeneracy-flavored operations. Exact scan only.
pub(crate) fn subgroup_two_fragments(s: &SubsetMask) -> Result<(u32, Vec<Subgroup>)> {
    let rep = kappa_with_mode(s, 2, ScanMode::Exact)?;
    if !rep.separable {
        return Err(Error::NotSeparable);
    }
    let g = s.group();
    let n = g.order();
    let (star, _) = s.normalize()?;
    let mut hits = Vec::new();
    for h in g.subgroups() {
        if h.order < 2 {
            continue;
        }
        let hs = star.sumset(&h.members).expect("same group");
        if n - hs.cardinality() >= 2 && hs.cardinality() - h.order == rep.kappa {
            hits.push(h.clone());
        }
    }
    Ok((rep.kappa, hits))
}

/// Some subgroup that is a 2-fragment of S, or `None`. Distinguishes
/// "not 2-separable" from "separable but no subgroup fragment".
pub fn is_degenerate(s: &SubsetMask) -> Result<Option<Subgroup>> {
    let (_, hits) = subgroup_two_fragments(s)?;
    Ok(hits.into_iter().next())
}

/// A maximal subgroup 2-fragment, with a uniqueness flag.
#[derive(Clone, Debug, Serialize)]
pub struct HyperAtom {
    pub subgroup: Subgroup,
    /// False when several subgroup 2-fragments share the maximal order (the
    /// lexicographically smallest is reported).
    pub unique: bool,
}

/// The maximum-order subgroup that is a 2-fragment of S.
pub fn hyper_atom(s: &SubsetMask) -> Result<HyperAtom> {
    let (_, hits) = subgroup_two_fragments(s)?;
    if hits.is_empty() {
        return Err(Error::NotDegenerate);
    }
    let max_order = hits.iter().map(|h| h.order).max().unwrap();
    let mut top: Vec<&Subgroup> = hits.iter().filter(|h| h.order == max_order).collect();
    top.sort_by(|a, b| a.members.cmp_lex(&b.members));
    Ok(HyperAtom { subgroup: top[0].clone(), unique: top.len() == 1 })
}

/// The super-atom of S: the subgroup generated by S^* when proper, otherwise
/// the hyper-atom of S^*.
pub fn super_atom(s: &SubsetMask) -> Result<Subgroup> {
    let g = s.group();
    let (star, _) = s.normalize()?;
    let span = subgroup_generated(g, &star)?;
    if span.order < g.order() {
        return Ok(span);
    }
    match hyper_atom(&star) {
        Ok(h) => Ok(h.subgroup),
        Err(Error::NotDegenerate) | Err(Error::NotSeparable) => Err(Error::NoSuperAtom),
        Err(e) => Err(e),
    }
}

/// k-fragments of -S.
pub fn negative_fragments(s: &SubsetMask, k: u32) -> Result<Vec<SubsetMask>> {
    let neg = s.negate();
    let rep = kappa_with_mode(&neg, k, ScanMode::Exact)?;
    Ok(rep.fragments)
}

/// A (T,S,H)-matching: an assignment of part indices of T to part indices of
/// S placing the sums T_i + S_{n_i} into pairwise distinct H-cosets outside
/// T + H.
#[derive(Clone, Debug, Serialize)]
pub struct MatchingAssignment {
    pub subgroup: Subgroup,
    /// Pairs (i, n_i) with i in [0, t], n_i in [0, u].
    pub assigned: Vec<(usize, usize)>,
    pub size: usize,
    pub u: usize,
    pub t: usize,
}

impl MatchingAssignment {
    /// Re-check the defining property from raw sets.
    pub fn verify(&self, t_set: &SubsetMask, s_set: &SubsetMask) -> bool {
        let g = t_set.group();
        let phi = match quotient(g, &self.subgroup) {
            Ok(p) => p,
            Err(_) => return false,
        };
        let s_parts = coset_parts(s_set, &phi);
        let t_parts = coset_parts(t_set, &phi);
        let forbidden = phi.image(t_set);
        let mut used = Vec::new();
        for &(i, j) in &self.assigned {
            if i >= t_parts.len() || j >= s_parts.len() {
                return false;
            }
            let sum = t_parts[i].sumset(&s_parts[j]).expect("same group");
            let img = phi.image(&sum);
            if img.cardinality() != 1 {
                return false;
            }
            let c = img.min_element().unwrap();
            if forbidden.contains(c) || used.contains(&c) {
                return false;
            }
            used.push(c);
        }
        self.size == self.assigned.len()
    }
}

/// Nonempty coset intersections in coset-index order.
pub(crate) fn coset_parts(a: &SubsetMask, phi: &crate::group::Morphism) -> Vec<SubsetMask> {
    let mut by_coset: Vec<Option<SubsetMask>> = vec![None; phi.target.order() as usize];
    for x in a.iter() {
        let c = phi.map(x) as usize;
        by_coset[c].get_or_insert_with(|| SubsetMask::empty(a.group())).insert(x);
    }
    by_coset.into_iter().flatten().collect()
}

/// Maximum-size (T,S,H)-matching by bipartite augmenting paths between T's
/// parts and the free H-cosets reachable as phi(T_i) + phi(S_j).
pub fn find_matching(t: &SubsetMask, s: &SubsetMask, h: &Subgroup) -> Result<MatchingAssignment> {
    let g = t.group();
    if s.group() != g || h.group() != g {
        return Err(Error::GroupMismatch);
    }
    if !s.contains(0) {
        return Err(Error::ZeroNotInSet("find_matching"));
    }
    if t.is_empty() {
        return Err(Error::EmptySet);
    }
    // H must be a subgroup 2-fragment of S
    let (_, hits) = match subgroup_two_fragments(s) {
        Ok(v) => v,
        Err(Error::NotSeparable) => return Err(Error::Matching("S is not 2-separable".into())),
        Err(e) => return Err(e),
    };
    if !hits.iter().any(|x| x.members == h.members) {
        return Err(Error::Matching("H is not a subgroup 2-fragment of S".into()));
    }
    let phi = quotient(g, h)?;
    let s_parts = coset_parts(s, &phi);
    let t_parts = coset_parts(t, &phi);
    let u = s_parts.len() - 1;
    let tt = t_parts.len() - 1;
    if (g.order() as usize) < (tt + u + 1) * h.order as usize {
        return Err(Error::Matching(format!(
            "|G| = {} < (t+u+1)|H| = {}",
            g.order(),
            (tt + u + 1) * h.order as usize
        )));
    }
    let forbidden = phi.image(t);
    let q = phi.target.order() as usize;
    // adjacency: for each T part, the free cosets it can reach, remembering
    // the smallest S part index that reaches each
    let mut reach: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t_parts.len()];
    for (i, tp) in t_parts.iter().enumerate() {
        let ti = phi.map(tp.min_element().unwrap());
        for (j, sp) in s_parts.iter().enumerate() {
            let sj = phi.map(sp.min_element().unwrap());
            let c = phi.target.add(ti, sj);
            if !forbidden.contains(c) && !reach[i].iter().any(|&(cc, _)| cc == c as usize) {
                reach[i].push((c as usize, j));
            }
        }
    }
    // augmenting paths
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; q]; // coset -> (t part, s part)
    fn augment(
        i: usize,
        reach: &[Vec<(usize, usize)>],
        owner: &mut [Option<(usize, usize)>],
        visited: &mut [bool],
    ) -> bool {
        for &(c, j) in &reach[i] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            if owner[c].is_none()
                || augment(owner[c].unwrap().0, reach, owner, visited)
            {
                owner[c] = Some((i, j));
                return true;
            }
        }
        false
    }
    for i in 0..t_parts.len() {
        let mut visited = vec![false; q];
        augment(i, &reach, &mut owner, &mut visited);
    }
    let mut assigned: Vec<(usize, usize)> = owner.into_iter().flatten().collect();
    assigned.sort_unstable();
    let size = assigned.len();
    let m = MatchingAssignment { subgroup: h.clone(), assigned, size, u, t: tt };
    if m.size < u {
        return Err(Error::NoCase {
            theorem: "strongip",
            details: format!(
                "matching of size {} < u = {} despite |G| >= (t+u+1)|H|; T = {:?}, S = {:?}, H = {:?}",
                m.size,
                u,
                t.to_tuples(),
                s.to_tuples(),
                h.members.to_tuples()
            ),
        });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    /// Independent oracle: direct minimum over all subsets with naive
    /// sumsets, no shared code with the scan kernel.
    fn naive_kappa(g: &Arc<GroupSpec>, s: &[u32], k: u32) -> Option<u32> {
        let n = g.order();
        let mut best: Option<u32> = None;
        for x in 0u64..(1 << n) {
            let xs: Vec<u32> = (0..n).filter(|&e| x >> e & 1 == 1).collect();
            if (xs.len() as u32) < k {
                continue;
            }
            let mut sum = std::collections::BTreeSet::new();
            for &a in &xs {
                for &b in s {
                    sum.insert(g.add(a, b));
                }
            }
            if n - (sum.len() as u32) < k {
                continue;
            }
            let delta = sum.len() as u32 - xs.len() as u32;
            best = Some(best.map_or(delta, |b: u32| b.min(delta)));
        }
        best
    }

    #[test]
    fn kappa_examples() {
        // S = G in Z_5 is not 2-separable: kappa = 5 - 4 + 1 = 2
        let g5 = make_group(&[5]).unwrap();
        let whole = SubsetMask::universe(&g5);
        let rep = kappa(&whole, 2).unwrap();
        assert!(!rep.separable);
        assert_eq!(rep.kappa, 2);
        assert!(rep.fragments.is_empty() && rep.atoms.is_empty());

        let g6 = make_group(&[6]).unwrap();
        let s = SubsetMask::from_indices(&g6, &[0, 1]);
        let r1 = kappa(&s, 1).unwrap();
        assert_eq!(r1.kappa, 1);
        assert!(r1.separable);
        let r2 = kappa(&s, 2).unwrap();
        assert_eq!(r2.kappa, 1);
        // X = {0,1} attains it
        assert!(r2.fragments.iter().any(|f| f.iter().collect::<Vec<_>>() == vec![0, 1]));
    }

    #[test]
    fn kappa_preconditions() {
        let g = make_group(&[6]).unwrap();
        let no_zero = SubsetMask::from_indices(&g, &[1, 2]);
        assert!(matches!(kappa(&no_zero, 1), Err(Error::ZeroNotInSet(_))));
        let non_gen = SubsetMask::from_indices(&g, &[0, 2]);
        assert!(matches!(kappa(&non_gen, 1), Err(Error::NotGenerating)));
        let g3 = make_group(&[3]).unwrap();
        let s3 = SubsetMask::from_indices(&g3, &[0, 1]);
        assert!(matches!(kappa(&s3, 3), Err(Error::OrderTooSmallForK { .. })));
        // n = 2k - 1 itself is allowed and never separable
        let border = kappa(&s3, 2).unwrap();
        assert!(!border.separable);
        assert_eq!(border.kappa, 0);
    }

    #[test]
    fn scan_matches_naive_oracle() {
        let groups = [vec![7], vec![8], vec![2, 4], vec![9], vec![2, 2, 3]];
        for factors in groups {
            let g = make_group(&factors).unwrap();
            let n = g.order();
            for smask in 1u64..(1 << (n - 1)) {
                let s_raw = smask << 1 | 1; // force 0 in S
                if s_raw.count_ones() < 2 || s_raw.count_ones() > 4 {
                    continue;
                }
                let s_idx: Vec<u32> = (0..n).filter(|&e| s_raw >> e & 1 == 1).collect();
                let s = SubsetMask::from_indices(&g, &s_idx);
                if !s.is_generating() {
                    continue;
                }
                for k in 1..=2 {
                    let rep = kappa_with_mode(&s, k, ScanMode::Exact).unwrap();
                    match naive_kappa(&g, &s_idx, k) {
                        Some(expect) => {
                            assert!(rep.separable);
                            assert_eq!(rep.kappa, expect, "S={:?} k={}", s_idx, k);
                        }
                        None => assert!(!rep.separable),
                    }
                }
            }
        }
    }

    #[test]
    fn report_invariants() {
        let g = make_group(&[2, 2, 3]).unwrap();
        let s = SubsetMask::from_indices(&g, &[0, 1, 3, 6]);
        for k in 1..=3 {
            let rep = kappa(&s, k).unwrap();
            if !rep.separable {
                continue;
            }
            for f in &rep.fragments {
                assert!(f.cardinality() >= k);
                let sum = s.sumset(f).unwrap();
                assert!(g.order() - sum.cardinality() >= k);
                assert_eq!(sum.cardinality() - f.cardinality(), rep.kappa);
            }
            for a in &rep.atoms {
                assert!(a.contains(0));
                assert_eq!(a.cardinality(), rep.atom_size);
            }
            // atoms appear among the fragments (orders <= 16 list them all)
            for a in &rep.atoms {
                assert!(rep.fragments.iter().any(|f| f == a));
            }
        }
    }

    #[test]
    fn degenerate_examples() {
        let g = make_group(&[6]).unwrap();
        let s = SubsetMask::from_indices(&g, &[0, 1, 3]);
        let found = is_degenerate(&s).unwrap();
        // compare against the definition directly
        let rep = kappa(&s, 2).unwrap();
        let h = SubsetMask::from_indices(&g, &[0, 3]);
        let hs = s.sumset(&h).unwrap();
        let h_is_fragment =
            g.order() - hs.cardinality() >= 2 && hs.cardinality() - 2 == rep.kappa;
        assert_eq!(found.is_some() && found.as_ref().unwrap().order == 2, h_is_fragment);

        // prime order: only proper nontrivial subgroup candidates are absent
        let g7 = make_group(&[7]).unwrap();
        let s7 = SubsetMask::from_indices(&g7, &[0, 1, 3]);
        match is_degenerate(&s7) {
            Ok(opt) => assert!(opt.is_none()),
            Err(Error::NotSeparable) => {}
            Err(e) => panic!("{}", e),
        }
    }

    #[test]
    fn super_atom_examples() {
        let g = make_group(&[6]).unwrap();
        let s = SubsetMask::from_indices(&g, &[1, 3]);
        // S^* = {0,2} generates {0,2,4}
        let sa = super_atom(&s).unwrap();
        assert_eq!(sa.members.iter().collect::<Vec<_>>(), vec![0, 2, 4]);

        // generating non-degenerate S has no super-atom
        let g7 = make_group(&[7]).unwrap();
        let s7 = SubsetMask::from_indices(&g7, &[0, 1]);
        assert!(matches!(super_atom(&s7), Err(Error::NoSuperAtom)));
    }

    #[test]
    fn negative_fragments_of_symmetric_set() {
        let g = make_group(&[8]).unwrap();
        let s = SubsetMask::from_indices(&g, &[0, 1, 7]); // S = -S
        let pos = kappa(&s, 2).unwrap().fragments;
        let neg = negative_fragments(&s, 2).unwrap();
        assert_eq!(pos, neg);
    }

    #[test]
    fn negative_fragment_duality() {
        // Lemma: -X is a negative fragment for every fragment X
        let g = make_group(&[6]).unwrap();
        let s = SubsetMask::from_indices(&g, &[0, 1]);
        for k in 1..=2 {
            let frs = kappa(&s, k).unwrap().fragments;
            let neg = negative_fragments(&s, k).unwrap();
            for x in &frs {
                let mx = x.negate();
                assert!(neg.iter().any(|f| f == &mx), "k={} X={:?}", k, x.to_tuples());
            }
        }
    }

    #[test]
    fn matching_trivial_and_searched() {
        // u = 0: S inside one coset of H after normalization -> empty matching
        let g = make_group(&[2, 2, 3]).unwrap();
        let h_mask = SubsetMask::from_indices(&g, &[0, 3, 6, 9]);
        let h = Subgroup::from_mask(&h_mask).unwrap();

        // search for an instance with u = 1, t = 1 and H a 2-fragment
        let n = g.order();
        let mut found = false;
        'search: for s_raw in 0u64..(1 << (n - 1)) {
            let s_mask = mask_from_u64(&g, s_raw << 1 | 1);
            if s_mask.cardinality() < 3 || s_mask.cardinality() > 6 {
                continue;
            }
            if !s_mask.is_generating() {
                continue;
            }
            let hits = match subgroup_two_fragments(&s_mask) {
                Ok((_, hits)) => hits,
                Err(_) => continue,
            };
            if !hits.iter().any(|x| x.members == h.members) {
                continue;
            }
            let phi = quotient(&g, &h).unwrap();
            if coset_parts(&s_mask, &phi).len() != 2 {
                continue;
            }
            for t_raw in 1u64..(1 << n.min(8)) {
                let t_mask = mask_from_u64(&g, t_raw);
                if t_mask.is_empty() {
                    continue;
                }
                if coset_parts(&t_mask, &phi).len() != 2 {
                    continue;
                }
                let m = find_matching(&t_mask, &s_mask, &h).unwrap();
                assert!(m.size >= 1);
                assert!(m.verify(&t_mask, &s_mask));
                found = true;
                break 'search;
            }
        }
        assert!(found, "no (u=1, t=1) matching instance found in Z_2xZ_2xZ_3");
    }
}

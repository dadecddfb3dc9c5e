//! Recognition of the structured objects the theorems output: (r,-j)
//! progressions, H-decompositions and H-progressions, essential pairs,
//! Vosper subsets and quasi-periodic partitions.
//!
//! Progression witnesses are reported "tight": the covering progression has
//! both endpoints inside the set, so every deleted element is interior. A
//! set is an (r,-j)-progression in the defined sense iff it has a tight
//! witness with j' <= j and room to pad the window when j' < j; use
//! [`progression_differences`] for that judgement rather than comparing j
//! fields directly.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{quotient, GroupSpec, Morphism, Subgroup};
use crate::iso::{scan_best, sum_rows};
use crate::mutation::gate;
use crate::setops::SubsetMask;

// ---------------------------------------------------------------------------
// progressions
// ---------------------------------------------------------------------------

/// Witness that a set is an arithmetic progression with `difference` minus
/// `deleted` interior elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionWitness {
    pub group: Arc<GroupSpec>,
    /// Canonical representative of {r, -r} (the smaller element index).
    pub difference: u32,
    pub start: u32,
    pub length: u32,
    pub deleted: Vec<u32>,
    /// Singletons witness every difference.
    pub wildcard: bool,
    /// The window occupies the whole cyclic orbit of the difference, so it
    /// cannot be extended for further deletions.
    pub full_orbit: bool,
}

impl ProgressionWitness {
    pub fn j(&self) -> u32 {
        self.deleted.len() as u32
    }

    /// Rebuild {start + i*difference : i < length} minus deleted.
    pub fn reconstruct(&self) -> SubsetMask {
        let g = &self.group;
        let mut m = SubsetMask::empty(g);
        let mut cur = self.start;
        for _ in 0..self.length {
            m.insert(cur);
            cur = g.add(cur, self.difference);
        }
        for &d in &self.deleted {
            m.remove(d);
        }
        m
    }
}

impl Serialize for ProgressionWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let g = &self.group;
        let mut st = serializer.serialize_struct("ProgressionWitness", 6)?;
        st.serialize_field("difference", &g.describe_element(self.difference))?;
        st.serialize_field("start", &g.describe_element(self.start))?;
        st.serialize_field("length", &self.length)?;
        let del: Vec<Vec<u32>> = self.deleted.iter().map(|&d| g.describe_element(d)).collect();
        st.serialize_field("deleted", &del)?;
        st.serialize_field("wildcard", &self.wildcard)?;
        st.serialize_field("full_orbit", &self.full_orbit)?;
        st.end()
    }
}

fn canonical_r(g: &GroupSpec, r: u32) -> u32 {
    r.min(g.neg(r))
}

/// All tight witnesses with at most `j_max` deletions, one representative
/// per difference pair {r, -r}.
pub fn detect_progression(a: &SubsetMask, j_max: u32) -> Result<Vec<ProgressionWitness>> {
    let g = Arc::clone(a.group());
    let a0 = a.min_element().ok_or(Error::EmptySet)?;
    let n = g.order();
    if a.cardinality() == 1 {
        return Ok(vec![ProgressionWitness {
            group: g,
            difference: 0,
            start: a0,
            length: 1,
            deleted: Vec::new(),
            wildcard: true,
            full_orbit: false,
        }]);
    }
    let mut out = Vec::new();
    for r in 1..n {
        if canonical_r(&g, r) != r {
            continue;
        }
        out.extend(windows_for_difference(&g, a, r, j_max));
    }
    Ok(out)
}

/// Tight windows of the orbit of `r` that cover `a` with at most `j_max`
/// interior deletions.
fn windows_for_difference(
    g: &Arc<GroupSpec>,
    a: &SubsetMask,
    r: u32,
    j_max: u32,
) -> Vec<ProgressionWitness> {
    let a0 = a.min_element().expect("nonempty");
    let ord = g.element_order(r);
    let card = a.cardinality();
    if card > ord {
        return Vec::new();
    }
    // every element must lie in a0 + <r>
    let mut pos = vec![u32::MAX; g.order() as usize];
    let mut cur = a0;
    for t in 0..ord {
        pos[cur as usize] = t;
        cur = g.add(cur, r);
    }
    let mut in_pos = vec![false; ord as usize];
    for x in a.iter() {
        let p = pos[x as usize];
        if p == u32::MAX {
            return Vec::new();
        }
        in_pos[p as usize] = true;
    }
    let mut out = Vec::new();
    for j in 0..=j_max {
        let len = card + j;
        if len > ord {
            break;
        }
        let mut seen_full_orbit = false;
        for s in 0..ord {
            if !in_pos[s as usize] || !in_pos[((s + len - 1) % ord) as usize] {
                continue;
            }
            // window [s, s+len) must cover all members
            let covers = (0..ord).all(|p| {
                let inside = (p + ord - s) % ord < len;
                inside || !in_pos[p as usize]
            });
            if !covers {
                continue;
            }
            let full_orbit = len == ord;
            if full_orbit && seen_full_orbit {
                continue; // same window, rotated start
            }
            seen_full_orbit |= full_orbit;
            let mut deleted = Vec::new();
            let mut start_el = a0;
            for _ in 0..s {
                start_el = g.add(start_el, r);
            }
            let mut cur = start_el;
            for t in 0..len {
                if !in_pos[((s + t) % ord) as usize] {
                    deleted.push(cur);
                }
                cur = g.add(cur, r);
            }
            deleted.sort_unstable();
            out.push(ProgressionWitness {
                group: Arc::clone(g),
                difference: r,
                start: start_el,
                length: len,
                deleted,
                wildcard: false,
                full_orbit,
            });
        }
    }
    out
}

/// Canonical differences r for which `a` is an (r,-j)-progression in the
/// exact sense: a tight witness with j' <= j deletions exists and, when
/// j' < j, the orbit leaves room to delete the remaining j - j' endpoints.
/// Singletons answer with every nonzero canonical difference.
pub fn progression_differences(a: &SubsetMask, j: u32) -> Result<Vec<u32>> {
    let g = a.group();
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.cardinality() == 1 {
        return Ok((1..g.order()).filter(|&r| canonical_r(g, r) == r).collect());
    }
    let card = a.cardinality();
    let mut out = Vec::new();
    for r in 1..g.order() {
        if canonical_r(g, r) != r {
            continue;
        }
        let ord = g.element_order(r);
        let ok = windows_for_difference(g, a, r, j)
            .iter()
            .any(|w| w.j() == j || ord >= card + j);
        if ok {
            out.push(r);
        }
    }
    Ok(out)
}

/// A tight witness certifying that `a` is an (r,-j)-progression: exactly j
/// deletions when such a window exists, otherwise a smaller-j window with
/// orbit room to pad. `None` when `a` is not an (r,-j)-progression.
pub fn punctured_witness(a: &SubsetMask, r: u32, j: u32) -> Option<ProgressionWitness> {
    let g = a.group();
    if a.is_empty() || r == 0 {
        return None;
    }
    let r = canonical_r(g, r);
    if a.cardinality() == 1 {
        return Some(ProgressionWitness {
            group: Arc::clone(g),
            difference: r,
            start: a.min_element().unwrap(),
            length: 1,
            deleted: Vec::new(),
            wildcard: true,
            full_orbit: false,
        });
    }
    let ws = windows_for_difference(g, a, r, j);
    let ord = g.element_order(r);
    ws.iter()
        .find(|w| w.j() == j)
        .or_else(|| ws.iter().find(|_| ord >= a.cardinality() + j))
        .cloned()
}

/// True when `a` is an exact arithmetic progression (some difference, no
/// deletions). Singletons qualify.
pub fn is_progression(a: &SubsetMask) -> bool {
    match a.cardinality() {
        0 => false,
        1 => true,
        _ => progression_differences(a, 0).map(|v| !v.is_empty()).unwrap_or(false),
    }
}

// ---------------------------------------------------------------------------
// H-decompositions
// ---------------------------------------------------------------------------

/// The split of a set into its nonempty H-coset intersections, plus the
/// H-progression structure of its quotient image when present.
#[derive(Clone, Debug)]
pub struct HDecomposition {
    pub subgroup: Subgroup,
    pub morphism: Morphism,
    /// Parts in canonical order: along the smallest progression difference
    /// when the image is a progression, else by coset index.
    pub parts: Vec<SubsetMask>,
    pub is_progression: bool,
    /// Canonical difference representatives making the image a progression.
    pub differences: Vec<u32>,
    /// Single part: the image is a progression for every difference.
    pub wildcard: bool,
}

impl Serialize for HDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("HDecomposition", 5)?;
        st.serialize_field("subgroup", &self.subgroup)?;
        st.serialize_field("parts", &self.parts)?;
        st.serialize_field("is_progression", &self.is_progression)?;
        let q = &self.morphism.target;
        let diffs: Vec<Vec<u32>> =
            self.differences.iter().map(|&d| q.describe_element(d)).collect();
        st.serialize_field("differences", &diffs)?;
        st.serialize_field("wildcard", &self.wildcard)?;
        st.end()
    }
}

impl HDecomposition {
    pub fn image(&self) -> SubsetMask {
        let mut m = SubsetMask::empty(&self.morphism.target);
        for p in &self.parts {
            m.insert(self.morphism.map(p.min_element().unwrap()));
        }
        m
    }

    /// Part orderings that realize difference `d`: sequences of part indices
    /// whose phi images step by d. Usually one; every rotation when the
    /// image is a full coset of <d>; every order of a single part.
    pub fn orientations(&self, d: u32) -> Vec<Vec<usize>> {
        let q = &self.morphism.target;
        if self.parts.len() == 1 {
            return vec![vec![0]];
        }
        let mut part_of = vec![usize::MAX; q.order() as usize];
        for (i, p) in self.parts.iter().enumerate() {
            part_of[self.morphism.map(p.min_element().unwrap()) as usize] = i;
        }
        let count = self.parts.len();
        let mut starts: Vec<u32> = Vec::new();
        let closed = (0..q.order() as usize)
            .filter(|&c| part_of[c] != usize::MAX)
            .all(|c| part_of[q.add(c as u32, d) as usize] != usize::MAX);
        for c in 0..q.order() {
            if part_of[c as usize] == usize::MAX {
                continue;
            }
            if closed || part_of[q.sub(c, d) as usize] == usize::MAX {
                starts.push(c);
            }
        }
        let mut out = Vec::new();
        'starts: for s in starts {
            let mut order = Vec::with_capacity(count);
            let mut cur = s;
            for _ in 0..count {
                let p = part_of[cur as usize];
                if p == usize::MAX || order.contains(&p) {
                    continue 'starts;
                }
                order.push(p);
                cur = q.add(cur, d);
            }
            out.push(order);
        }
        out
    }
}

/// Decompose `a` into its nonempty H-coset parts.
pub fn h_decompose(a: &SubsetMask, h: &Subgroup) -> Result<HDecomposition> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = a.group();
    if h.group() != g {
        return Err(Error::GroupMismatch);
    }
    let phi = quotient(g, h)?;
    let mut parts = crate::iso::coset_parts(a, &phi);
    let image = {
        let mut m = SubsetMask::empty(&phi.target);
        for p in &parts {
            m.insert(phi.map(p.min_element().unwrap()));
        }
        m
    };
    let wildcard = parts.len() == 1;
    let differences: Vec<u32> = if wildcard {
        (1..phi.target.order()).filter(|&d| canonical_r(&phi.target, d) == d).collect()
    } else {
        progression_differences(&image, 0)?
    };
    let is_progression = wildcard || !differences.is_empty();
    if is_progression && !wildcard {
        // reorder parts along the smallest difference, smallest start
        let dec_tmp = HDecomposition {
            subgroup: h.clone(),
            morphism: phi.clone(),
            parts: parts.clone(),
            is_progression,
            differences: differences.clone(),
            wildcard,
        };
        let d = dec_tmp.differences[0];
        if let Some(order) = dec_tmp.orientations(d).into_iter().next() {
            parts = order.into_iter().map(|i| dec_tmp.parts[i].clone()).collect();
        }
    }
    Ok(HDecomposition {
        subgroup: h.clone(),
        morphism: phi,
        parts,
        is_progression,
        differences,
        wildcard,
    })
}

/// Differences shared by two decompositions over the same subgroup.
pub fn common_differences(s: &HDecomposition, t: &HDecomposition) -> Vec<u32> {
    s.differences.iter().copied().filter(|d| t.differences.contains(d)).collect()
}

/// Common differences with single-part (wildcard) sides deferring to the
/// other side's difference list.
pub fn common_differences_wild(s: &HDecomposition, t: &HDecomposition) -> Vec<u32> {
    match (s.wildcard, t.wildcard) {
        (true, _) => t.differences.clone(),
        (false, true) => s.differences.clone(),
        (false, false) => common_differences(s, t),
    }
}

// ---------------------------------------------------------------------------
// essential pairs
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EssentialKind {
    I,
    II,
    III,
}

/// Witness that {S, T} is an H-essential pair: common-difference
/// H-progressions with |S+H|-|S| = |T+H|-|T| = |H| and one of the three
/// end-coset patterns.
#[derive(Clone, Debug, Serialize)]
pub struct EssentialPairWitness {
    pub subgroup: Subgroup,
    pub kind: EssentialKind,
    /// Common difference as an element tuple of G (a representative of the
    /// coset in G/H).
    pub difference: Vec<u32>,
    pub s_parts: Vec<SubsetMask>,
    pub t_parts: Vec<SubsetMask>,
    /// Kind ii: the two sides of T_{t-1} + S_u = T_t + S_{u-1}.
    pub cross: Option<(SubsetMask, SubsetMask)>,
    /// Kind iii: the order-2 subgroups with H = K_0 (+) K_1.
    pub klein: Option<(Subgroup, Subgroup)>,
}

impl EssentialPairWitness {
    /// Re-derive every defining equality from the raw sets. Independent of
    /// the search path (no mutation gates).
    pub fn reverify(&self, s: &SubsetMask, t: &SubsetMask) -> bool {
        let g = s.group();
        let h = &self.subgroup;
        let union_eq = |parts: &[SubsetMask], whole: &SubsetMask| {
            let mut acc = SubsetMask::empty(g);
            for p in parts {
                if p.is_empty() || !p.intersect(&acc).is_empty() {
                    return false;
                }
                acc = acc.union(p);
            }
            &acc == whole
        };
        if !union_eq(&self.s_parts, s) || !union_eq(&self.t_parts, t) {
            return false;
        }
        let phi = match quotient(g, h) {
            Ok(p) => p,
            Err(_) => return false,
        };
        let single_coset =
            |p: &SubsetMask| phi.image(p).cardinality() == 1;
        if !self.s_parts.iter().all(&single_coset) || !self.t_parts.iter().all(&single_coset) {
            return false;
        }
        // common difference steps
        let d = match g.index_of_tuple(&self.difference) {
            Ok(x) => phi.map(x),
            Err(_) => return false,
        };
        let steps = |parts: &[SubsetMask]| {
            parts.windows(2).all(|w| {
                let a = phi.map(w[0].min_element().unwrap());
                let b = phi.map(w[1].min_element().unwrap());
                phi.target.add(a, d) == b
            })
        };
        if !steps(&self.s_parts) || !steps(&self.t_parts) {
            return false;
        }
        let hh = h.order;
        let deficit = |x: &SubsetMask| {
            x.sumset(&h.members).expect("same group").cardinality() - x.cardinality()
        };
        if deficit(s) != hh || deficit(t) != hh {
            return false;
        }
        let (u, tt) = (self.s_parts.len() - 1, self.t_parts.len() - 1);
        let card = |p: &SubsetMask| p.cardinality();
        match self.kind {
            EssentialKind::I => {
                hh == 2
                    && card(&self.s_parts[0]) == 1
                    && card(&self.s_parts[u]) == 1
                    && card(&self.t_parts[0]) == 1
                    && card(&self.t_parts[tt]) == 1
            }
            EssentialKind::II => {
                if u < 1 || tt < 1 {
                    return false;
                }
                let ends = card(&self.s_parts[u]) == 1 && card(&self.t_parts[tt]) == 1;
                let next = card(&self.s_parts[u - 1]) == hh - 1
                    && card(&self.t_parts[tt - 1]) == hh - 1;
                let lhs = self.t_parts[tt - 1].sumset(&self.s_parts[u]).expect("same group");
                let rhs = self.t_parts[tt].sumset(&self.s_parts[u - 1]).expect("same group");
                ends && next
                    && lhs == rhs
                    && self.cross.as_ref() == Some(&(lhs.clone(), rhs.clone()))
            }
            EssentialKind::III => {
                let (k0, k1) = match &self.klein {
                    Some(ks) => ks,
                    None => return false,
                };
                let is_two_subgroup = |k: &Subgroup| {
                    k.order == 2 && crate::group::Subgroup::from_mask(&k.members).is_ok()
                };
                let norm = |p: &SubsetMask| p.normalize().map(|(m, _)| m);
                let ok_ends = norm(&self.s_parts[0]).ok() == Some(k0.members.clone())
                    && norm(&self.t_parts[0]).ok() == Some(k0.members.clone())
                    && norm(&self.s_parts[u]).ok() == Some(k1.members.clone())
                    && norm(&self.t_parts[tt]).ok() == Some(k1.members.clone());
                let klein_sum = k0.members.intersect(&k1.members).cardinality() == 1
                    && k0.members.sumset(&k1.members).expect("same group") == h.members
                    && hh == 4;
                is_two_subgroup(k0) && is_two_subgroup(k1) && ok_ends && klein_sum
            }
        }
    }
}

/// Search for an essential-pair witness over `h`, minimal kind first.
/// `None` when no common-difference H-progression structure matches.
pub fn classify_essential_pair(
    s: &SubsetMask,
    t: &SubsetMask,
    h: &Subgroup,
) -> Result<Option<EssentialPairWitness>> {
    if s.is_empty() || t.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = s.group();
    if t.group() != g || h.group() != g {
        return Err(Error::GroupMismatch);
    }
    let hh = h.order;
    let deficit = |x: &SubsetMask| {
        x.sumset(&h.members).expect("same group").cardinality() - x.cardinality()
    };
    if !gate("essential.s_deficit", deficit(s) == hh) {
        return Ok(None);
    }
    if !gate("essential.t_deficit", deficit(t) == hh) {
        return Ok(None);
    }
    let sd = h_decompose(s, h)?;
    let td = h_decompose(t, h)?;
    let common = common_differences_wild(&sd, &td);
    if !gate(
        "essential.common_difference",
        sd.is_progression && td.is_progression && !common.is_empty(),
    ) {
        return Ok(None);
    }
    let q = Arc::clone(&sd.morphism.target);
    let mut best: Option<EssentialPairWitness> = None;
    for &d in &common {
        // the paper freely replaces d by -d; both readings flip the end parts
        let mut signs = vec![d];
        if q.neg(d) != d {
            signs.push(q.neg(d));
        }
        for dd in signs {
            for s_order in sd.orientations(dd) {
                let sp: Vec<SubsetMask> =
                    s_order.iter().map(|&i| sd.parts[i].clone()).collect();
                for t_order in td.orientations(dd) {
                    let tp: Vec<SubsetMask> =
                        t_order.iter().map(|&i| td.parts[i].clone()).collect();
                    if let Some(w) = try_kinds(g, h, dd, &sd, &sp, &tp) {
                        if best.as_ref().map_or(true, |b| w.kind < b.kind) {
                            best = Some(w);
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

fn try_kinds(
    g: &Arc<GroupSpec>,
    h: &Subgroup,
    d: u32,
    sd: &HDecomposition,
    sp: &[SubsetMask],
    tp: &[SubsetMask],
) -> Option<EssentialPairWitness> {
    let hh = h.order;
    let (u, tt) = (sp.len() - 1, tp.len() - 1);
    let d_rep = g.describe_element(sd.morphism.rep(d));
    let base = |kind| EssentialPairWitness {
        subgroup: h.clone(),
        kind,
        difference: d_rep.clone(),
        s_parts: sp.to_vec(),
        t_parts: tp.to_vec(),
        cross: None,
        klein: None,
    };
    let card = |p: &SubsetMask| p.cardinality();
    if gate(
        "essential.kind1.ends",
        hh == 2
            && card(&sp[0]) == 1
            && card(&sp[u]) == 1
            && card(&tp[0]) == 1
            && card(&tp[tt]) == 1,
    ) {
        return Some(base(EssentialKind::I));
    }
    if u >= 1 && tt >= 1 {
        let ends = gate("essential.kind2.ends", card(&sp[u]) == 1 && card(&tp[tt]) == 1);
        let next = gate(
            "essential.kind2.next_ends",
            card(&sp[u - 1]) == hh - 1 && card(&tp[tt - 1]) == hh - 1,
        );
        if ends && next {
            let lhs = tp[tt - 1].sumset(&sp[u]).expect("same group");
            let rhs = tp[tt].sumset(&sp[u - 1]).expect("same group");
            if gate("essential.kind2.cross_identity", lhs == rhs) {
                let mut w = base(EssentialKind::II);
                w.cross = Some((lhs, rhs));
                return Some(w);
            }
        }
    }
    if hh == 4 {
        let norm = |p: &SubsetMask| p.normalize().map(|(m, _)| m).ok();
        let (k0m, k1m) = (norm(&sp[0])?, norm(&sp[u])?);
        let k0 = crate::group::Subgroup::from_mask(&k0m).ok();
        let k1 = crate::group::Subgroup::from_mask(&k1m).ok();
        let k0_ok = gate(
            "essential.kind3.k0_end",
            k0.as_ref().map_or(false, |k| k.order == 2) && norm(&tp[0]).as_ref() == Some(&k0m),
        );
        let k1_ok = gate(
            "essential.kind3.k1_end",
            k1.as_ref().map_or(false, |k| k.order == 2) && norm(&tp[tt]).as_ref() == Some(&k1m),
        );
        if k0_ok && k1_ok {
            let klein = gate(
                "essential.kind3.klein_sum",
                k0m.intersect(&k1m).cardinality() == 1
                    && k0m.sumset(&k1m).expect("same group") == h.members,
            );
            if klein {
                let mut w = base(EssentialKind::III);
                w.klein = Some((k0.unwrap(), k1.unwrap()));
                return Some(w);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Vosper subsets
// ---------------------------------------------------------------------------

/// True iff |X+S| >= min(|G|-1, |X|+|S|) for every X with |X| >= 2.
/// Equivalent to: no X with |X| >= 2 and |X^S| >= 2 has |X+S| < |X|+|S|,
/// which the pruned scan decides directly.
pub fn is_vosper(s: &SubsetMask) -> Result<bool> {
    if !s.contains(0) {
        return Err(Error::ZeroNotInSet("is_vosper"));
    }
    let g = s.group();
    let n = g.order();
    if n > crate::iso::EXACT_SCAN_MAX {
        return Err(Error::ExactScanTooLarge { order: n, max: crate::iso::EXACT_SCAN_MAX });
    }
    if n < 4 {
        return Ok(true); // no X with |X| >= 2 and |X^S| >= 2 exists
    }
    let rows = sum_rows(g, s);
    Ok(match scan_best(n, &rows, 2) {
        None => true,
        Some(best) => best.kappa >= s.cardinality(),
    })
}

// ---------------------------------------------------------------------------
// quasi-periodic partitions
// ---------------------------------------------------------------------------

/// A = periodic part (possibly empty, H-periodic) plus a nonempty part
/// inside a single H-coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiPeriodicPartition {
    pub subgroup: Subgroup,
    pub periodic: SubsetMask,
    pub coset_part: SubsetMask,
}

impl QuasiPeriodicPartition {
    pub fn reverify(&self, a: &SubsetMask) -> bool {
        let h = &self.subgroup;
        if self.coset_part.is_empty() {
            return false;
        }
        if self.periodic.union(&self.coset_part) != *a
            || !self.periodic.intersect(&self.coset_part).is_empty()
        {
            return false;
        }
        if !self.periodic.is_empty() {
            let shifted = self.periodic.sumset(&h.members).expect("same group");
            if shifted != self.periodic {
                return false;
            }
        }
        // coset_part inside one coset
        match quotient(a.group(), h) {
            Ok(phi) => phi.image(&self.coset_part).cardinality() == 1,
            Err(_) => false,
        }
    }
}

/// All quasi-H-periodic partitions of `a`, ordered by the coset of the
/// non-periodic part. The coset part is always a full coset intersection:
/// anything smaller leaves a remainder that cannot be H-periodic.
pub fn quasi_periodic_partitions(
    a: &SubsetMask,
    h: &Subgroup,
) -> Result<Vec<QuasiPeriodicPartition>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = a.group();
    if h.group() != g {
        return Err(Error::GroupMismatch);
    }
    let phi = quotient(g, h)?;
    let parts = crate::iso::coset_parts(a, &phi);
    let mut out = Vec::new();
    for part in parts {
        let rest = a.difference(&part);
        let periodic =
            rest.is_empty() || rest.sumset(&h.members).expect("same group") == rest;
        if periodic {
            out.push(QuasiPeriodicPartition {
                subgroup: h.clone(),
                periodic: rest,
                coset_part: part,
            });
        }
    }
    Ok(out)
}

/// True when `y` can be obtained by deleting exactly `j` elements from some
/// H-periodic set: the coset-completion deficit must equal j up to whole
/// spare cosets.
pub fn is_h_minus_j_periodic(y: &SubsetMask, h: &Subgroup, j: u32) -> bool {
    let g = y.group();
    let filled = y.sumset(&h.members).expect("same group");
    let deficit = filled.cardinality() - y.cardinality();
    if j < deficit {
        return false;
    }
    let extra = j - deficit;
    if extra % h.order != 0 {
        return false;
    }
    let spare = (g.order() - filled.cardinality()) / h.order;
    extra / h.order <= spare
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, subgroup_generated};

    fn mask(g: &Arc<GroupSpec>, xs: &[u32]) -> SubsetMask {
        SubsetMask::from_indices(g, xs)
    }

    #[test]
    fn detect_progression_examples() {
        let g7 = make_group(&[7]).unwrap();
        let a = mask(&g7, &[0, 1, 3]);
        let tight: Vec<_> = detect_progression(&a, 0).unwrap();
        assert!(tight.is_empty(), "no exact witness for {{0,1,3}} in Z_7");
        let near = detect_progression(&a, 1).unwrap();
        assert!(near.iter().any(|w| w.difference == 1
            && w.length == 4
            && w.deleted == vec![2]
            && w.reconstruct() == a));

        let g6 = make_group(&[6]).unwrap();
        let b = mask(&g6, &[0, 2, 4]);
        let ws = detect_progression(&b, 0).unwrap();
        assert!(ws.iter().any(|w| w.difference == 2 && w.j() == 0));
        // {0,2,4} is the whole orbit of 2: flagged, and only one rotation kept
        assert!(ws.iter().filter(|w| w.difference == 2).all(|w| w.full_orbit));
        assert_eq!(ws.iter().filter(|w| w.difference == 2).count(), 1);

        let single = mask(&g6, &[4]);
        let ws = detect_progression(&single, 0).unwrap();
        assert_eq!(ws.len(), 1);
        assert!(ws[0].wildcard);
    }

    #[test]
    fn witnesses_reconstruct_their_set() {
        let g = make_group(&[2, 2, 3]).unwrap();
        for raw in 1u64..(1 << 8) {
            let a = crate::iso::mask_from_u64(&g, raw);
            for w in detect_progression(&a, 1).unwrap() {
                if !w.wildcard {
                    assert_eq!(w.reconstruct(), a, "witness {:?}", w);
                }
            }
        }
    }

    #[test]
    fn progression_differences_pad_rule() {
        let g = make_group(&[11]).unwrap();
        // an exact progression is also a near-progression when there is room
        let p = mask(&g, &[0, 1, 2, 3]);
        assert!(progression_differences(&p, 1).unwrap().contains(&1));
        // a full cyclic orbit is not extendable
        let g4 = make_group(&[4]).unwrap();
        let whole = SubsetMask::universe(&g4);
        assert!(progression_differences(&whole, 0).unwrap().contains(&1));
        assert!(!progression_differences(&whole, 1).unwrap().contains(&1));
    }

    #[test]
    fn h_decompose_example() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &mask(&g, &[3])).unwrap();
        let a = mask(&g, &[0, 1, 4]);
        let dec = h_decompose(&a, &h).unwrap();
        assert_eq!(dec.parts.len(), 2);
        assert!(dec.is_progression);
        let sizes: Vec<u32> = dec.parts.iter().map(|p| p.cardinality()).collect();
        assert!(sizes == vec![1, 2] || sizes == vec![2, 1]);

        // A = H: single part, wildcard progression
        let dh = h_decompose(&h.members.clone(), &h).unwrap();
        assert_eq!(dh.parts.len(), 1);
        assert!(dh.is_progression && dh.wildcard);

        // phi(A) = G/H of order 3: full-orbit progression with any generator
        let a3 = mask(&g, &[0, 1, 2]);
        let d3 = h_decompose(&a3, &h).unwrap();
        assert!(d3.is_progression);
        assert_eq!(d3.parts.len(), 3);
    }

    #[test]
    fn essential_pair_kind_i() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &mask(&g, &[3])).unwrap();
        let s = mask(&g, &[0, 1, 2, 4]);
        let w = classify_essential_pair(&s, &s, &h).unwrap().expect("kind i pair");
        assert_eq!(w.kind, EssentialKind::I);
        assert!(w.reverify(&s, &s));
    }

    #[test]
    fn essential_pair_kind_iii_klein() {
        // G = Z_2 x Z_2 x Z_3, H = Klein subgroup {0,3,6,9}
        let g = make_group(&[2, 2, 3]).unwrap();
        let h_mask = mask(&g, &[0, 3, 6, 9]);
        let h = crate::group::Subgroup::from_mask(&h_mask).unwrap();
        // K_0 = {0, 6} = <(1,0,0)>, K_1 = {0, 3} = <(0,1,0)>
        // S = K_0 union (1 + K_1): parts {0,6} and {1,4}
        let s = mask(&g, &[0, 6, 1, 4]);
        let w = classify_essential_pair(&s, &s, &h).unwrap().expect("klein pair");
        assert_eq!(w.kind, EssentialKind::III);
        assert!(w.klein.is_some());
        assert!(w.reverify(&s, &s));
    }

    #[test]
    fn essential_pair_rejects_wrong_deficit() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &mask(&g, &[3])).unwrap();
        let s = mask(&g, &[0, 3, 1]); // |S+H| - |S| = 1 != 2
        assert!(classify_essential_pair(&s, &s, &h).unwrap().is_none());
    }

    #[test]
    fn vosper_examples() {
        let g5 = make_group(&[5]).unwrap();
        let s = mask(&g5, &[0, 1, 3]);
        // exhaustive check in Z_5
        let mut expect = true;
        for x_raw in 0u64..(1 << 5) {
            let x = crate::iso::mask_from_u64(&g5, x_raw);
            if x.cardinality() < 2 {
                continue;
            }
            let sum = x.sumset(&s).unwrap().cardinality();
            if sum < 4.min(x.cardinality() + 3) {
                expect = false;
            }
        }
        assert_eq!(is_vosper(&s).unwrap(), expect);

        let whole = SubsetMask::universe(&g5);
        assert!(is_vosper(&whole).unwrap());

        // a progression in composite Z_6 with a subgroup 2-fragment fails
        let g6 = make_group(&[6]).unwrap();
        let p = mask(&g6, &[0, 1]);
        assert!(!is_vosper(&p).unwrap());
    }

    #[test]
    fn quasi_periodic_examples() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &mask(&g, &[3])).unwrap();

        // A = one coset
        let coset = mask(&g, &[1, 4]);
        let ps = quasi_periodic_partitions(&coset, &h).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].periodic.is_empty());
        assert_eq!(ps[0].coset_part, coset);
        assert!(ps[0].reverify(&coset));

        // A = H plus one extra element
        let a = mask(&g, &[0, 3, 1]);
        let ps = quasi_periodic_partitions(&a, &h).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].periodic, h.members);
        assert_eq!(ps[0].coset_part, mask(&g, &[1]));

        // two partial cosets: no partition
        let b = mask(&g, &[0, 1]);
        assert!(quasi_periodic_partitions(&b, &h).unwrap().is_empty());
    }

    #[test]
    fn h_minus_j_periodicity() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &mask(&g, &[3])).unwrap();
        assert!(is_h_minus_j_periodic(&mask(&g, &[0, 3]), &h, 0));
        assert!(!is_h_minus_j_periodic(&mask(&g, &[0, 3]), &h, 1));
        assert!(is_h_minus_j_periodic(&mask(&g, &[0]), &h, 1));
        assert!(is_h_minus_j_periodic(&SubsetMask::empty(&g), &h, 0));
        assert!(is_h_minus_j_periodic(&SubsetMask::empty(&g), &h, 2));
        assert!(!is_h_minus_j_periodic(&SubsetMask::empty(&g), &h, 1));
    }
}

//! Finite abelian groups, subgroups and quotient morphisms.
//!
//! A [`GroupSpec`] is either a direct product of cyclic factors (elements are
//! indexed by mixed-radix encoding of their residue tuples, first factor most
//! significant), or a group derived from a parent: a quotient (elements are
//! cosets, indexed by their smallest representative) or a restriction to a
//! subgroup. All derived groups expose the same dense `[0, n)` element
//! indexing, so every set-algebra routine works on them unchanged.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::setops::SubsetMask;

/// Default cap on group order accepted by [`make_group`].
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;

/// Orders up to which an addition table is precomputed.
const ADD_TABLE_MAX: u32 = 64;

#[derive(Debug)]
enum GroupRepr {
    Product {
        factors: Vec<u32>,
    },
    Quotient {
        parent: Arc<GroupSpec>,
        /// parent element index -> coset index
        phi: Vec<u32>,
        /// coset index -> smallest parent element index in the coset
        reps: Vec<u32>,
    },
    Restriction {
        parent: Arc<GroupSpec>,
        /// sorted parent indices of the members
        members: Vec<u32>,
        /// parent index -> member position + 1 (0 = not a member)
        pos: Vec<u32>,
    },
}

/// A finite abelian group with dense element indexing.
pub struct GroupSpec {
    order: u32,
    repr: GroupRepr,
    neg_table: Vec<u32>,
    add_table: Option<Vec<u32>>,
    subgroups: OnceLock<Vec<Subgroup>>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            GroupRepr::Product { factors } => write!(f, "GroupSpec(product {:?})", factors),
            GroupRepr::Quotient { parent, reps, .. } => {
                write!(f, "GroupSpec(quotient of {:?}, order {})", parent, reps.len())
            }
            GroupRepr::Restriction { parent, members, .. } => {
                write!(f, "GroupSpec(subgroup of {:?}, order {})", parent, members.len())
            }
        }
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        match (&self.repr, &other.repr) {
            (GroupRepr::Product { factors: a }, GroupRepr::Product { factors: b }) => a == b,
            (
                GroupRepr::Quotient { parent: pa, reps: ra, .. },
                GroupRepr::Quotient { parent: pb, reps: rb, .. },
            ) => ra == rb && pa == pb,
            (
                GroupRepr::Restriction { parent: pa, members: ma, .. },
                GroupRepr::Restriction { parent: pb, members: mb, .. },
            ) => ma == mb && pa == pb,
            _ => false,
        }
    }
}
impl Eq for GroupSpec {}

/// An element of a group, carried with its group for API-boundary safety.
#[derive(Clone, Debug)]
pub struct Element {
    pub idx: u32,
    pub group: Arc<GroupSpec>,
}

impl Element {
    /// Residue tuple in the underlying product group (representatives are
    /// unwound through quotients and restrictions).
    pub fn tuple(&self) -> Vec<u32> {
        self.group.describe_element(self.idx)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.idx == other.idx && self.group == other.group
    }
}
impl Eq for Element {}

impl GroupSpec {
    fn finish(order: u32, repr: GroupRepr) -> Arc<GroupSpec> {
        let mut g = GroupSpec {
            order,
            repr,
            neg_table: Vec::new(),
            add_table: None,
            subgroups: OnceLock::new(),
        };
        let neg: Vec<u32> = (0..order).map(|x| g.neg_raw(x)).collect();
        g.neg_table = neg;
        if order <= ADD_TABLE_MAX {
            let n = order as usize;
            let mut tbl = vec![0u32; n * n];
            for x in 0..order {
                for y in 0..order {
                    tbl[(x as usize) * n + y as usize] = g.add_raw(x, y);
                }
            }
            g.add_table = Some(tbl);
        }
        Arc::new(g)
    }

    fn new_product(factors: Vec<u32>) -> Arc<GroupSpec> {
        let order = factors.iter().product::<u32>();
        Self::finish(order, GroupRepr::Product { factors })
    }

    /// The group of order 1.
    pub fn trivial() -> Arc<GroupSpec> {
        Self::new_product(vec![1])
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Cyclic factor list when this is a product group.
    pub fn factors(&self) -> Option<&[u32]> {
        match &self.repr {
            GroupRepr::Product { factors } => Some(factors),
            _ => None,
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self.repr, GroupRepr::Product { .. })
    }

    fn add_raw(&self, x: u32, y: u32) -> u32 {
        match &self.repr {
            GroupRepr::Product { factors } => {
                let (mut rx, mut ry, mut out, mut mult) = (x, y, 0u32, 1u32);
                for &d in factors.iter().rev() {
                    let s = (rx % d + ry % d) % d;
                    rx /= d;
                    ry /= d;
                    out += s * mult;
                    mult *= d;
                }
                out
            }
            GroupRepr::Quotient { parent, phi, reps } => {
                phi[parent.add(reps[x as usize], reps[y as usize]) as usize]
            }
            GroupRepr::Restriction { parent, members, pos } => {
                pos[parent.add(members[x as usize], members[y as usize]) as usize] - 1
            }
        }
    }

    fn neg_raw(&self, x: u32) -> u32 {
        match &self.repr {
            GroupRepr::Product { factors } => {
                let (mut rx, mut out, mut mult) = (x, 0u32, 1u32);
                for &d in factors.iter().rev() {
                    let v = rx % d;
                    rx /= d;
                    out += if v == 0 { 0 } else { d - v } * mult;
                    mult *= d;
                }
                out
            }
            GroupRepr::Quotient { parent, phi, reps } => phi[parent.neg(reps[x as usize]) as usize],
            GroupRepr::Restriction { parent, members, pos } => {
                pos[parent.neg(members[x as usize]) as usize] - 1
            }
        }
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        match &self.add_table {
            Some(t) => t[(x as usize) * self.order as usize + y as usize],
            None => self.add_raw(x, y),
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        self.neg_table[x as usize]
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn scalar_mul(&self, c: u32, x: u32) -> u32 {
        let mut acc = 0;
        for _ in 0..c {
            acc = self.add(acc, x);
        }
        acc
    }

    /// Order of an element.
    pub fn element_order(&self, x: u32) -> u32 {
        let mut acc = x;
        let mut m = 1;
        while acc != 0 {
            acc = self.add(acc, x);
            m += 1;
        }
        m
    }

    /// Residue tuple of an element in the root product group; for derived
    /// groups the representative is unwound through the parents.
    pub fn describe_element(&self, idx: u32) -> Vec<u32> {
        match &self.repr {
            GroupRepr::Product { factors } => {
                let mut digits = vec![0u32; factors.len()];
                let mut r = idx;
                for (i, &d) in factors.iter().enumerate().rev() {
                    digits[i] = r % d;
                    r /= d;
                }
                digits
            }
            GroupRepr::Quotient { parent, reps, .. } => parent.describe_element(reps[idx as usize]),
            GroupRepr::Restriction { parent, members, .. } => {
                parent.describe_element(members[idx as usize])
            }
        }
    }

    /// Index of a residue tuple (product groups only).
    pub fn index_of_tuple(&self, tuple: &[u32]) -> Result<u32> {
        let factors = match &self.repr {
            GroupRepr::Product { factors } => factors,
            _ => return Err(Error::Parse("element tuples only address product groups".into())),
        };
        if tuple.len() != factors.len() {
            return Err(Error::Parse(format!(
                "tuple has {} coordinates, group has {} factors",
                tuple.len(),
                factors.len()
            )));
        }
        let mut idx = 0u32;
        for (&t, &d) in tuple.iter().zip(factors) {
            if t >= d {
                return Err(Error::Parse(format!("coordinate {} out of range (factor {})", t, d)));
            }
            idx = idx * d + t;
        }
        Ok(idx)
    }

    pub fn element(self: &Arc<Self>, idx: u32) -> Result<Element> {
        if idx >= self.order {
            return Err(Error::IndexRange { idx, order: self.order });
        }
        Ok(Element { idx, group: Arc::clone(self) })
    }

    /// All subgroups, computed once per group and cached.
    pub fn subgroups(self: &Arc<Self>) -> &[Subgroup] {
        self.subgroups.get_or_init(|| all_subgroups(self))
    }
}

/// Build the direct product of cyclic groups with the given factor orders.
pub fn make_group(factors: &[u32]) -> Result<Arc<GroupSpec>> {
    make_group_with_cap(factors, DEFAULT_ORDER_CAP)
}

pub fn make_group_with_cap(factors: &[u32], cap: u64) -> Result<Arc<GroupSpec>> {
    if factors.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    if factors.iter().any(|&d| d == 0) {
        return Err(Error::BadFactor);
    }
    let order: u64 = factors.iter().map(|&d| d as u64).product();
    if order == 0 || order > cap {
        return Err(Error::OrderCap { order, cap });
    }
    Ok(GroupSpec::new_product(factors.to_vec()))
}

/// A subgroup: closed membership mask plus a minimal generating list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub members: SubsetMask,
    pub generators: Vec<u32>,
    pub order: u32,
}

impl Subgroup {
    pub fn group(&self) -> &Arc<GroupSpec> {
        self.members.group()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn contains(&self, x: u32) -> bool {
        self.members.contains(x)
    }

    /// Validate a membership mask and package it as a subgroup.
    pub fn from_mask(mask: &SubsetMask) -> Result<Subgroup> {
        if !is_closed_subgroup_mask(mask) {
            return Err(Error::NotASubgroup);
        }
        Ok(subgroup_unchecked(mask.clone()))
    }
}

fn is_closed_subgroup_mask(mask: &SubsetMask) -> bool {
    if !mask.contains(0) {
        return false;
    }
    let g = mask.group();
    for x in mask.iter() {
        for y in mask.iter() {
            if !mask.contains(g.add(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Package a mask already known to be closed; computes a minimal generating
/// list greedily (smallest new element first, then redundant ones dropped).
pub(crate) fn subgroup_unchecked(members: SubsetMask) -> Subgroup {
    let g = Arc::clone(members.group());
    let mut gens: Vec<u32> = Vec::new();
    let mut closure = SubsetMask::singleton(&g, 0);
    for x in members.iter() {
        if !closure.contains(x) {
            gens.push(x);
            closure = closure_of_seeds(&g, &gens);
        }
    }
    // drop generators made redundant by later ones
    let mut i = 0;
    while i < gens.len() {
        let mut reduced = gens.clone();
        reduced.remove(i);
        if closure_of_seeds(&g, &reduced).cardinality() == members.cardinality() {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    let order = members.cardinality();
    Subgroup { members, generators: gens, order }
}

fn closure_of_seeds(g: &Arc<GroupSpec>, seeds: &[u32]) -> SubsetMask {
    let mut members = SubsetMask::singleton(g, 0);
    let mut queue: Vec<u32> = vec![0];
    while let Some(x) = queue.pop() {
        for &s in seeds {
            let y = g.add(x, s);
            if !members.contains(y) {
                members.insert(y);
                queue.push(y);
            }
        }
    }
    members
}

/// Smallest subgroup containing `seeds`; the empty seed set generates {0}.
pub fn subgroup_generated(g: &Arc<GroupSpec>, seeds: &SubsetMask) -> Result<Subgroup> {
    if seeds.group() != g {
        return Err(Error::GroupMismatch);
    }
    let seed_list: Vec<u32> = seeds.iter().collect();
    Ok(subgroup_unchecked(closure_of_seeds(g, &seed_list)))
}

/// Every subgroup of `g`, each exactly once, sorted by (order, lexicographic
/// mask). Found by closure-extension BFS from the trivial subgroup.
pub fn all_subgroups(g: &Arc<GroupSpec>) -> Vec<Subgroup> {
    let trivial = SubsetMask::singleton(g, 0);
    let mut seen: Vec<SubsetMask> = vec![trivial.clone()];
    let mut frontier: Vec<SubsetMask> = vec![trivial];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for x in 1..g.order() {
                if h.contains(x) {
                    continue;
                }
                let k = extend_subgroup(g, h, x);
                if !seen.iter().any(|m| m == &k) {
                    seen.push(k.clone());
                    next.push(k);
                }
            }
        }
        frontier = next;
    }
    seen.sort_by(|a, b| a.cardinality().cmp(&b.cardinality()).then_with(|| a.cmp_lex(b)));
    seen.into_iter().map(subgroup_unchecked).collect()
}

/// Closure of a subgroup mask plus one extra element: the union of the cosets
/// h + j*x.
fn extend_subgroup(g: &Arc<GroupSpec>, h: &SubsetMask, x: u32) -> SubsetMask {
    let mut k = h.clone();
    let mut t = x;
    while !k.contains(t) {
        k = k.union(&h.translate(t));
        t = g.add(t, x);
    }
    k
}

/// The canonical morphism G -> G/H.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: Arc<GroupSpec>,
    pub kernel: Subgroup,
    pub target: Arc<GroupSpec>,
    table: Vec<u32>,
}

impl Morphism {
    #[inline]
    pub fn map(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn image(&self, a: &SubsetMask) -> SubsetMask {
        let mut out = SubsetMask::empty(&self.target);
        for x in a.iter() {
            out.insert(self.map(x));
        }
        out
    }

    /// Full preimage of a set of cosets.
    pub fn preimage(&self, b: &SubsetMask) -> SubsetMask {
        let mut out = SubsetMask::empty(&self.source);
        for (x, &c) in self.table.iter().enumerate() {
            if b.contains(c) {
                out.insert(x as u32);
            }
        }
        out
    }

    /// Representative (smallest parent index) of a coset.
    pub fn rep(&self, coset: u32) -> u32 {
        match &self.target.repr {
            GroupRepr::Quotient { reps, .. } => reps[coset as usize],
            _ => unreachable!("morphism targets are quotient groups"),
        }
    }
}

/// Quotient of `g` by the subgroup `h`. Coset indices are assigned by
/// smallest member, so the coset of 0 is element 0 of the target.
pub fn quotient(g: &Arc<GroupSpec>, h: &Subgroup) -> Result<Morphism> {
    if h.group() != g {
        return Err(Error::GroupMismatch);
    }
    if !is_closed_subgroup_mask(&h.members) {
        return Err(Error::NotASubgroup);
    }
    let n = g.order();
    let mut phi = vec![u32::MAX; n as usize];
    let mut reps = Vec::new();
    for x in 0..n {
        if phi[x as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for m in h.members.iter() {
            phi[g.add(x, m) as usize] = c;
        }
    }
    let target = GroupSpec::finish(
        reps.len() as u32,
        GroupRepr::Quotient { parent: Arc::clone(g), phi: phi.clone(), reps },
    );
    Ok(Morphism { source: Arc::clone(g), kernel: h.clone(), target, table: phi })
}

/// View a subgroup as a standalone group (used by canonicalization and
/// counterexample shrinking). Element i of the result is `members[i]`.
pub fn restriction(h: &Subgroup) -> Arc<GroupSpec> {
    let parent = Arc::clone(h.group());
    let members: Vec<u32> = h.members.iter().collect();
    let mut pos = vec![0u32; parent.order() as usize];
    for (i, &m) in members.iter().enumerate() {
        pos[m as usize] = i as u32 + 1;
    }
    GroupSpec::finish(members.len() as u32, GroupRepr::Restriction { parent, members, pos })
}

/// Invariant-factor presentation of any group together with the index map
/// onto the presentation. Basis elements are found per Sylow component by
/// picking a maximal-order element and a complement subgroup.
pub fn canonical_form(g: &Arc<GroupSpec>) -> (Arc<GroupSpec>, Vec<u32>) {
    if g.is_product() {
        return (Arc::clone(g), (0..g.order()).collect());
    }
    let basis = abelian_basis(g);
    let factors: Vec<u32> = basis.iter().map(|&b| g.element_order(b)).collect();
    let product = GroupSpec::new_product(if factors.is_empty() { vec![1] } else { factors.clone() });
    let mut map = vec![0u32; g.order() as usize];
    for x in 0..g.order() {
        let coords = coordinates(g, &basis, x);
        let mut idx = 0u32;
        for (c, &d) in coords.iter().zip(product.factors().unwrap()) {
            idx = idx * d + c;
        }
        map[x as usize] = idx;
    }
    (product, map)
}

/// A generating basis: elements whose cyclic spans decompose the group as a
/// direct sum, ordered by descending order.
fn abelian_basis(g: &Arc<GroupSpec>) -> Vec<u32> {
    if g.order() == 1 {
        return Vec::new();
    }
    // maximal-order element, smallest index on ties
    let mut best = 1u32;
    let mut best_ord = g.element_order(1);
    for x in 2..g.order() {
        let o = g.element_order(x);
        if o > best_ord {
            best = x;
            best_ord = o;
        }
    }
    let span = subgroup_generated(g, &SubsetMask::singleton(g, best)).unwrap();
    if span.order == g.order() {
        return vec![best];
    }
    // complement: subgroup C with C (+) <best> = G
    let target = g.order() / best_ord;
    for c in all_subgroups(g) {
        if c.order == target && c.members.intersect(&span.members).cardinality() == 1 {
            let sub = restriction(&c);
            let inner = abelian_basis(&sub);
            let mut out = vec![best];
            for b in inner {
                // lift back to g
                out.push(match &sub.repr {
                    GroupRepr::Restriction { members, .. } => members[b as usize],
                    _ => unreachable!(),
                });
            }
            return out;
        }
    }
    unreachable!("maximal-order cyclic subgroups of finite abelian groups always split off")
}

fn coordinates(g: &Arc<GroupSpec>, basis: &[u32], x: u32) -> Vec<u32> {
    if basis.is_empty() {
        return Vec::new();
    }
    let b = basis[0];
    let rest = &basis[1..];
    let rest_span = {
        let mut seeds = SubsetMask::empty(g);
        for &r in rest {
            seeds.insert(r);
        }
        subgroup_generated(g, &seeds).unwrap()
    };
    let ord = g.element_order(b);
    let mut acc = x;
    for c in 0..ord {
        if rest_span.contains(acc) {
            let mut out = vec![c];
            out.extend(coordinates(g, rest, acc));
            return out;
        }
        acc = g.sub(acc, b);
    }
    unreachable!("basis does not span the group")
}

/// Factor lists of all abelian groups of order `1..=max_order`, one per
/// isomorphism class, in invariant-factor form (each factor divides the next).
pub fn enumerate_groups(max_order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        out.extend(abelian_types(n));
    }
    out
}

fn abelian_types(n: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![1]];
    }
    // factor n
    let mut rest = n;
    let mut primes: Vec<(u32, u32)> = Vec::new();
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            primes.push((p, e));
        }
        p += 1;
    }
    if rest > 1 {
        primes.push((rest, 1));
    }
    // partitions of each exponent, parts descending
    let per_prime: Vec<Vec<Vec<u32>>> =
        primes.iter().map(|&(_, e)| partitions(e)).collect();
    let mut combos: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for parts in &per_prime {
        let mut next = Vec::new();
        for combo in &combos {
            for part in parts {
                let mut c = combo.clone();
                c.push(part.clone());
                next.push(c);
            }
        }
        combos = next;
    }
    let mut out = Vec::new();
    for combo in combos {
        let width = combo.iter().map(|p| p.len()).max().unwrap();
        let mut inv = vec![1u32; width];
        for (pi, part) in combo.iter().enumerate() {
            let prime = primes[pi].0;
            for (i, &e) in part.iter().enumerate() {
                inv[i] *= prime.pow(e);
            }
        }
        inv.reverse(); // ascending, d_i | d_{i+1}
        out.push(inv);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_group_basics() {
        assert!(make_group(&[]).is_err());
        assert!(make_group(&[0, 2]).is_err());
        let t = make_group(&[1]).unwrap();
        assert_eq!(t.order(), 1);
        let g = make_group(&[2, 2, 3]).unwrap();
        assert_eq!(g.order(), 12);
    }

    #[test]
    fn cyclic_addition_matches_modular_arithmetic() {
        let g = make_group(&[6]).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(g.add(x, y), (x + y) % 6);
            }
        }
        assert_eq!(g.add(5, 3), 2);
        assert_eq!(g.neg(2), 4);
    }

    #[test]
    fn mixed_radix_componentwise() {
        let g = make_group(&[2, 3]).unwrap();
        // (1,2) has index 1*3+2 = 5; (1,2)+(1,1) = (0,0)
        let a = g.index_of_tuple(&[1, 2]).unwrap();
        let b = g.index_of_tuple(&[1, 1]).unwrap();
        assert_eq!(g.add(a, b), 0);
        assert_eq!(g.describe_element(5), vec![1, 2]);
    }

    #[test]
    fn subgroup_generated_examples() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &SubsetMask::from_indices(&g, &[2])).unwrap();
        assert_eq!(h.members.iter().collect::<Vec<_>>(), vec![0, 2, 4]);
        let e = subgroup_generated(&g, &SubsetMask::empty(&g)).unwrap();
        assert_eq!(e.order, 1);

        let k = make_group(&[2, 2]).unwrap();
        let whole =
            subgroup_generated(&k, &SubsetMask::from_indices(&k, &[1, 2])).unwrap();
        assert_eq!(whole.order, 4);
        assert_eq!(whole.generators.len(), 2);
    }

    #[test]
    fn all_subgroups_counts() {
        let g = make_group(&[6]).unwrap();
        let subs = all_subgroups(&g);
        assert_eq!(subs.len(), 4);
        assert_eq!(subs.iter().map(|s| s.order).collect::<Vec<_>>(), vec![1, 2, 3, 6]);

        let k = make_group(&[2, 2]).unwrap();
        assert_eq!(all_subgroups(&k).len(), 5);

        let t = make_group(&[1]).unwrap();
        assert_eq!(all_subgroups(&t).len(), 1);
    }

    #[test]
    fn subgroups_of_cyclic_match_divisors() {
        for n in 1..=24u32 {
            let g = make_group(&[n]).unwrap();
            let divisors = (1..=n).filter(|d| n % d == 0).count();
            assert_eq!(all_subgroups(&g).len(), divisors, "Z_{}", n);
        }
    }

    #[test]
    fn subgroup_masks_closed_and_symmetric() {
        for factors in [vec![12], vec![2, 2, 3], vec![8], vec![2, 4], vec![2, 2, 2]] {
            let g = make_group(&factors).unwrap();
            for h in all_subgroups(&g) {
                assert!(h.contains(0));
                for x in h.members.iter() {
                    assert!(h.contains(g.neg(x)));
                    for y in h.members.iter() {
                        assert!(h.contains(g.add(x, y)));
                    }
                }
                assert_eq!(g.order() % h.order, 0, "Lagrange");
            }
        }
    }

    #[test]
    fn quotient_example() {
        let g = make_group(&[6]).unwrap();
        let h = subgroup_generated(&g, &SubsetMask::from_indices(&g, &[3])).unwrap();
        let phi = quotient(&g, &h).unwrap();
        assert_eq!(phi.target.order(), 3);
        assert_eq!(phi.map(1), phi.map(4));
        assert_ne!(phi.map(1), phi.map(2));
        // homomorphism law
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(phi.map(g.add(x, y)), phi.target.add(phi.map(x), phi.map(y)));
            }
        }
        // fibers all |kernel|
        for c in 0..3 {
            let fiber = (0..6).filter(|&x| phi.map(x) == c).count();
            assert_eq!(fiber, 2);
        }
    }

    #[test]
    fn quotient_degenerate_kernels() {
        let g = make_group(&[6]).unwrap();
        let trivial = subgroup_generated(&g, &SubsetMask::empty(&g)).unwrap();
        let id = quotient(&g, &trivial).unwrap();
        assert_eq!(id.target.order(), 6);
        let full = subgroup_generated(&g, &SubsetMask::from_indices(&g, &[1])).unwrap();
        let to_point = quotient(&g, &full).unwrap();
        assert_eq!(to_point.target.order(), 1);
    }

    #[test]
    fn quotient_rejects_non_subgroup() {
        let g = make_group(&[6]).unwrap();
        let bogus = Subgroup {
            members: SubsetMask::from_indices(&g, &[0, 1]),
            generators: vec![1],
            order: 2,
        };
        assert!(quotient(&g, &bogus).is_err());
    }

    #[test]
    fn quotient_groups_are_first_class() {
        let g = make_group(&[2, 2, 3]).unwrap();
        for h in all_subgroups(&g) {
            let phi = quotient(&g, &h).unwrap();
            let q = &phi.target;
            assert_eq!(q.order(), g.order() / h.order);
            for x in 0..q.order() {
                for y in 0..q.order() {
                    // spot-check associativity through the parent
                    assert_eq!(q.add(x, y), q.add(y, x));
                }
                assert_eq!(q.add(x, q.neg(x)), 0);
            }
        }
    }

    #[test]
    fn canonical_form_of_quotient() {
        let g = make_group(&[2, 2, 3]).unwrap();
        let h = subgroup_generated(&g, &SubsetMask::from_indices(&g, &[6])).unwrap();
        assert_eq!(h.order, 2);
        let phi = quotient(&g, &h).unwrap();
        let (canon, map) = canonical_form(&phi.target);
        assert_eq!(canon.order(), 6);
        // the map is an isomorphism
        let q = &phi.target;
        for x in 0..q.order() {
            for y in 0..q.order() {
                assert_eq!(
                    map[q.add(x, y) as usize],
                    canon.add(map[x as usize], map[y as usize])
                );
            }
        }
    }

    #[test]
    fn enumerate_groups_up_to_8() {
        let got = enumerate_groups(8);
        let expect: Vec<Vec<u32>> = vec![
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![2, 2],
            vec![5],
            vec![6],
            vec![7],
            vec![8],
            vec![2, 4],
            vec![2, 2, 2],
        ];
        assert_eq!(got, expect);
    }

    #[test]
    fn element_orders() {
        let g = make_group(&[12]).unwrap();
        assert_eq!(g.element_order(0), 1);
        assert_eq!(g.element_order(1), 12);
        assert_eq!(g.element_order(4), 3);
        assert_eq!(g.element_order(6), 2);
    }
}

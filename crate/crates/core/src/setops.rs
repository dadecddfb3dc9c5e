//! Subset algebra on a group: sumsets, boundaries, exteriors, periods and
//! translation normalization.
//!
//! A [`SubsetMask`] is a membership bitmask over the element indices of one
//! group. All binary operations require both operands to live in the same
//! group; the set-algebra helpers (`union`, `intersect`, ...) assert this,
//! while the operations the rest of the crate builds theorems on (`sumset`,
//! `period`, `normalize`) report errors.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{subgroup_generated, subgroup_unchecked, Element, GroupSpec, Subgroup};

/// A subset of a group as a membership bitmask with cached cardinality.
#[derive(Clone, Debug)]
pub struct SubsetMask {
    group: Arc<GroupSpec>,
    bits: Vec<u64>,
    card: u32,
}

impl PartialEq for SubsetMask {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.group == other.group
    }
}
impl Eq for SubsetMask {}

fn words_for(n: u32) -> usize {
    ((n as usize) + 63) / 64
}

impl SubsetMask {
    pub fn empty(group: &Arc<GroupSpec>) -> Self {
        SubsetMask { group: Arc::clone(group), bits: vec![0; words_for(group.order())], card: 0 }
    }

    pub fn universe(group: &Arc<GroupSpec>) -> Self {
        let n = group.order();
        let mut bits = vec![u64::MAX; words_for(n)];
        let rem = n % 64;
        if rem != 0 {
            *bits.last_mut().unwrap() = (1u64 << rem) - 1;
        }
        SubsetMask { group: Arc::clone(group), bits, card: n }
    }

    pub fn singleton(group: &Arc<GroupSpec>, x: u32) -> Self {
        let mut m = Self::empty(group);
        m.insert(x);
        m
    }

    pub fn from_indices(group: &Arc<GroupSpec>, xs: &[u32]) -> Self {
        let mut m = Self::empty(group);
        for &x in xs {
            m.insert(x);
        }
        m
    }

    /// Build from raw words (low word first); bits beyond the order are cleared.
    pub fn from_words(group: &Arc<GroupSpec>, mut bits: Vec<u64>) -> Self {
        let n = group.order();
        bits.resize(words_for(n), 0);
        let rem = n % 64;
        if rem != 0 {
            let last = bits.len() - 1;
            bits[last] &= (1u64 << rem) - 1;
        }
        let card = bits.iter().map(|w| w.count_ones()).sum();
        SubsetMask { group: Arc::clone(group), bits, card }
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn as_words(&self) -> &[u64] {
        &self.bits
    }

    /// Low 64 bits; the whole set when the order is at most 64.
    pub fn low_word(&self) -> u64 {
        self.bits[0]
    }

    pub fn cardinality(&self) -> u32 {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.bits[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn insert(&mut self, x: u32) {
        debug_assert!(x < self.group.order());
        let w = &mut self.bits[(x >> 6) as usize];
        let b = 1u64 << (x & 63);
        if *w & b == 0 {
            *w |= b;
            self.card += 1;
        }
    }

    pub fn remove(&mut self, x: u32) {
        let w = &mut self.bits[(x >> 6) as usize];
        let b = 1u64 << (x & 63);
        if *w & b != 0 {
            *w &= !b;
            self.card -= 1;
        }
    }

    pub fn iter(&self) -> BitIter<'_> {
        BitIter { bits: &self.bits, word: 0, cur: self.bits.first().copied().unwrap_or(0) }
    }

    pub fn min_element(&self) -> Option<u32> {
        self.iter().next()
    }

    fn assert_same_group(&self, other: &Self) {
        assert!(self.group == other.group, "subset operands belong to different groups");
    }

    pub fn union(&self, other: &Self) -> Self {
        self.assert_same_group(other);
        let bits: Vec<u64> =
            self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        let card = bits.iter().map(|w| w.count_ones()).sum();
        SubsetMask { group: Arc::clone(&self.group), bits, card }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.assert_same_group(other);
        let bits: Vec<u64> =
            self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        let card = bits.iter().map(|w| w.count_ones()).sum();
        SubsetMask { group: Arc::clone(&self.group), bits, card }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.assert_same_group(other);
        let bits: Vec<u64> =
            self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect();
        let card = bits.iter().map(|w| w.count_ones()).sum();
        SubsetMask { group: Arc::clone(&self.group), bits, card }
    }

    pub fn complement(&self) -> Self {
        Self::universe(&self.group).difference(self)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.assert_same_group(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// The translate {x + g : x in self}.
    pub fn translate(&self, g: u32) -> Self {
        let mut out = Self::empty(&self.group);
        for x in self.iter() {
            out.insert(self.group.add(x, g));
        }
        out
    }

    /// The pointwise negation {-x : x in self}.
    pub fn negate(&self) -> Self {
        let mut out = Self::empty(&self.group);
        for x in self.iter() {
            out.insert(self.group.neg(x));
        }
        out
    }

    /// True when self + g == self, without materializing the translate.
    pub fn fixed_by(&self, g: u32) -> bool {
        self.iter().all(|x| self.contains(self.group.add(x, g)))
    }

    /// Lexicographic order on element lists: on the first differing element,
    /// the set containing it sorts first.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        for (a, b) in self.bits.iter().zip(&other.bits) {
            let diff = a ^ b;
            if diff != 0 {
                let p = diff.trailing_zeros();
                return if a >> p & 1 == 1 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }

    /// Compact hex form: the set read as the integer sum of 2^i over members.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        let mut started = false;
        for w in self.bits.iter().rev() {
            if started {
                out.push_str(&format!("{:016x}", w));
            } else if *w != 0 {
                out.push_str(&format!("{:x}", w));
                started = true;
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn from_hex(group: &Arc<GroupSpec>, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("bad hex mask `{}`", hex)));
        }
        let mut bits = vec![0u64; words_for(group.order())];
        for (i, c) in hex.chars().rev().enumerate() {
            let v = c.to_digit(16).unwrap() as u64;
            if v == 0 {
                continue;
            }
            let bit = i * 4;
            let (w, off) = (bit / 64, bit % 64);
            if w >= bits.len() {
                return Err(Error::Parse("hex mask wider than group".into()));
            }
            bits[w] |= v << off;
        }
        let m = Self::from_words(group, bits.clone());
        if m.bits != bits {
            return Err(Error::Parse("hex mask has bits outside the group".into()));
        }
        Ok(m)
    }

    /// Exact Minkowski sum self + other.
    pub fn sumset(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let g = &self.group;
        let mut out = Self::empty(g);
        // iterate the smaller set outside, translating the larger one
        let (small, big) = if self.card <= other.card { (self, other) } else { (other, self) };
        for x in small.iter() {
            for y in big.iter() {
                out.insert(g.add(x, y));
            }
        }
        Ok(out)
    }

    /// The boundary (X + S) \ X of `self` = X under `s` = S.
    pub fn boundary_under(&self, s: &Self) -> Self {
        let sum = s.sumset(self).expect("groups match");
        sum.difference(self)
    }

    /// The exterior X^S = G \ (X + S).
    pub fn exterior_under(&self, s: &Self) -> Self {
        s.sumset(self).expect("groups match").complement()
    }

    /// The stabilizer {g : self + g = self}; `self` is aperiodic when this is
    /// trivial. Every period g satisfies a0 + g in self, so only |self|
    /// candidates are tested.
    pub fn period(&self) -> Result<Subgroup> {
        let a0 = self.min_element().ok_or(Error::EmptySet)?;
        let g = &self.group;
        let mut stab = Self::singleton(g, 0);
        for a in self.iter() {
            let cand = g.sub(a, a0);
            if cand != 0 && self.fixed_by(cand) {
                stab.insert(cand);
            }
        }
        Ok(subgroup_unchecked(stab))
    }

    pub fn is_aperiodic(&self) -> Result<bool> {
        let a0 = self.min_element().ok_or(Error::EmptySet)?;
        let g = &self.group;
        for a in self.iter() {
            let cand = g.sub(a, a0);
            if cand != 0 && self.fixed_by(cand) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The translate of `self` containing 0 obtained by subtracting the
    /// smallest element, together with that element.
    pub fn normalize(&self) -> Result<(Self, Element)> {
        let m = self.min_element().ok_or(Error::EmptySet)?;
        let shifted = self.translate(self.group.neg(m));
        Ok((shifted, Element { idx: m, group: Arc::clone(&self.group) }))
    }

    /// True when the normalized set generates the whole group.
    pub fn is_generating(&self) -> bool {
        if self.is_empty() {
            return self.group.order() == 1;
        }
        let (star, _) = self.normalize().expect("nonempty");
        subgroup_generated(&self.group, &star).expect("same group").order == self.group.order()
    }

    /// Pretty element list for diagnostics.
    pub fn to_tuples(&self) -> Vec<Vec<u32>> {
        self.iter().map(|x| self.group.describe_element(x)).collect()
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SubsetMask", 3)?;
        st.serialize_field("hex", &self.to_hex())?;
        st.serialize_field("cardinality", &self.card)?;
        st.serialize_field("elements", &self.to_tuples())?;
        st.end()
    }
}

impl Serialize for Subgroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Subgroup", 3)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("members", &self.members)?;
        let gens: Vec<Vec<u32>> =
            self.generators.iter().map(|&x| self.group().describe_element(x)).collect();
        st.serialize_field("generators", &gens)?;
        st.end()
    }
}

pub struct BitIter<'a> {
    bits: &'a [u64],
    word: usize,
    cur: u64,
}

impl Iterator for BitIter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.cur == 0 {
            self.word += 1;
            if self.word >= self.bits.len() {
                return None;
            }
            self.cur = self.bits[self.word];
        }
        let b = self.cur.trailing_zeros();
        self.cur &= self.cur - 1;
        Some((self.word as u32) * 64 + b)
    }
}

// Free-function spellings of the per-operation contracts.

pub fn sumset(a: &SubsetMask, b: &SubsetMask) -> Result<SubsetMask> {
    a.sumset(b)
}

pub fn boundary(s: &SubsetMask, x: &SubsetMask) -> SubsetMask {
    x.boundary_under(s)
}

pub fn exterior(s: &SubsetMask, x: &SubsetMask) -> SubsetMask {
    x.exterior_under(s)
}

pub fn period(a: &SubsetMask) -> Result<Subgroup> {
    a.period()
}

pub fn normalize(x: &SubsetMask) -> Result<(SubsetMask, Element)> {
    x.normalize()
}

pub fn is_generating(s: &SubsetMask) -> bool {
    s.is_generating()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    #[test]
    fn sumset_examples() {
        let g = make_group(&[5]).unwrap();
        let a = SubsetMask::from_indices(&g, &[0, 1]);
        let b = SubsetMask::from_indices(&g, &[0, 2]);
        let s = a.sumset(&b).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);

        let zero = SubsetMask::singleton(&g, 0);
        assert_eq!(a.sumset(&zero).unwrap(), a);
        let empty = SubsetMask::empty(&g);
        assert!(a.sumset(&empty).unwrap().is_empty());

        let h = make_group(&[7]).unwrap();
        let c = SubsetMask::singleton(&h, 0);
        assert!(a.sumset(&c).is_err());
    }

    #[test]
    fn boundary_and_exterior_examples() {
        let g = make_group(&[6]).unwrap();
        let s = SubsetMask::from_indices(&g, &[0, 1]);
        let x = SubsetMask::singleton(&g, 0);
        assert_eq!(boundary(&s, &x).iter().collect::<Vec<_>>(), vec![1]);

        let whole = SubsetMask::universe(&g);
        assert!(boundary(&s, &whole).is_empty());
        let zero = SubsetMask::singleton(&g, 0);
        assert!(boundary(&zero, &x).is_empty());

        let x2 = SubsetMask::from_indices(&g, &[0, 1]);
        assert_eq!(exterior(&s, &x2).iter().collect::<Vec<_>>(), vec![3, 4, 5]);
        let empty = SubsetMask::empty(&g);
        assert_eq!(exterior(&s, &empty), SubsetMask::universe(&g));
    }

    #[test]
    fn period_examples() {
        let g = make_group(&[4]).unwrap();
        let a = SubsetMask::from_indices(&g, &[0, 2]);
        assert_eq!(a.period().unwrap().members.iter().collect::<Vec<_>>(), vec![0, 2]);
        let b = SubsetMask::from_indices(&g, &[0, 1]);
        assert!(b.period().unwrap().is_trivial());
        let whole = SubsetMask::universe(&g);
        assert_eq!(whole.period().unwrap().order, 4);
        assert!(SubsetMask::empty(&g).period().is_err());
    }

    #[test]
    fn normalize_examples() {
        let g = make_group(&[6]).unwrap();
        let x = SubsetMask::from_indices(&g, &[2, 3, 5]);
        let (star, t) = x.normalize().unwrap();
        assert_eq!(star.iter().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(t.idx, 2);
        assert_eq!(star.translate(t.idx), x);

        let y = SubsetMask::from_indices(&g, &[0, 4]);
        let (sy, ty) = y.normalize().unwrap();
        assert_eq!(sy, y);
        assert_eq!(ty.idx, 0);

        let s = SubsetMask::singleton(&g, 4);
        let (ss, ts) = s.normalize().unwrap();
        assert_eq!(ss.iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(ts.idx, 4);
    }

    #[test]
    fn generating_examples() {
        let g = make_group(&[6]).unwrap();
        assert!(SubsetMask::from_indices(&g, &[0, 1]).is_generating());
        assert!(!SubsetMask::from_indices(&g, &[0, 2]).is_generating());
        // the convention is to normalize first
        assert!(!SubsetMask::from_indices(&g, &[1, 3]).is_generating());
        let t = make_group(&[1]).unwrap();
        assert!(SubsetMask::singleton(&t, 0).is_generating());
    }

    #[test]
    fn hex_round_trip() {
        let g = make_group(&[12]).unwrap();
        let a = SubsetMask::from_indices(&g, &[0, 3, 11]);
        let hex = a.to_hex();
        assert_eq!(SubsetMask::from_hex(&g, &hex).unwrap(), a);
        assert_eq!(SubsetMask::empty(&g).to_hex(), "0");
    }

    #[test]
    fn lex_order() {
        let g = make_group(&[6]).unwrap();
        let a = SubsetMask::from_indices(&g, &[0, 1]);
        let b = SubsetMask::from_indices(&g, &[0, 2]);
        assert_eq!(a.cmp_lex(&b), std::cmp::Ordering::Less);
        assert_eq!(b.cmp_lex(&a), std::cmp::Ordering::Greater);
        assert_eq!(a.cmp_lex(&a), std::cmp::Ordering::Equal);
    }
}

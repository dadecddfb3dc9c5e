//! Independent re-verification of classification witnesses.
//!
//! Everything here recomputes the defining equalities of a case from the
//! raw sets using group/set primitives only: no classifier search code, no
//! mutation gates, and a direct definition-chasing kappa_2 instead of the
//! pruned scan. A corrupted search path therefore cannot vouch for its own
//! output.

use std::sync::Arc;

use crate::classifier::{PairInstance, StructureVerdict, Witness};
use crate::group::{quotient, subgroup_generated, GroupSpec, Subgroup};
use crate::setops::SubsetMask;
use crate::structure::ProgressionWitness;

pub struct RecheckCtx<'a> {
    pub group: &'a Arc<GroupSpec>,
    pub s: &'a SubsetMask,
    pub t: Option<&'a SubsetMask>,
    pub mu: u32,
}

impl<'a> RecheckCtx<'a> {
    pub(crate) fn pair(inst: &'a PairInstance) -> Self {
        RecheckCtx { group: &inst.group, s: &inst.s, t: Some(&inst.t), mu: inst.mu }
    }

    pub(crate) fn single(group: &'a Arc<GroupSpec>, s: &'a SubsetMask, mu: u32) -> Self {
        RecheckCtx { group, s, t: None, mu }
    }
}

/// Re-verify a whole verdict against its instance.
pub fn verify_verdict(inst: &PairInstance, v: &StructureVerdict) -> bool {
    let ctx = if v.theorem == "near" {
        RecheckCtx::single(&inst.group, &inst.s, inst.mu)
    } else {
        RecheckCtx::pair(inst)
    };
    !v.cases.is_empty()
        && v.cases.iter().all(|c| verify_case(&v.theorem, &ctx, &c.case, &c.witness))
}

pub(crate) fn verify_case(
    theorem: &str,
    ctx: &RecheckCtx<'_>,
    case: &str,
    witness: &Witness,
) -> bool {
    match witness {
        Witness::Progression { of, proof } => {
            let set = match (of.as_str(), ctx.t) {
                ("S", _) => ctx.s,
                ("T", Some(t)) => t,
                _ => return false,
            };
            let j_allowed = match theorem {
                "3x3" => 0,
                "near" => 1 - ctx.mu,
                _ => return false,
            };
            check_progression_proof(set, proof, j_allowed)
        }
        Witness::ProgressionPair { s_proof, t_proof } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            let j = 1 - ctx.mu;
            s_proof.difference == t_proof.difference
                && check_progression_proof(ctx.s, s_proof, j)
                && check_progression_proof(t, t_proof, j)
        }
        Witness::Translate { a } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            match ctx.group.index_of_tuple(a) {
                Ok(idx) => &ctx.s.translate(idx) == t,
                Err(_) => false,
            }
        }
        Witness::Complement { a } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            let g = ctx.group;
            match g.index_of_tuple(a) {
                Ok(idx) => {
                    let ss = match ctx.s.sumset(ctx.s) {
                        Ok(ss) => ss,
                        Err(_) => return false,
                    };
                    &ss.negate().translate(g.neg(idx)).complement() == t
                }
                Err(_) => false,
            }
        }
        Witness::CaseTwelve { kappa2_t_star } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            if ctx.mu != 0
                || ctx.group.order() != 12
                || ctx.s.cardinality() != 4
                || t.cardinality() != 4
                || *kappa2_t_star != 3
            {
                return false;
            }
            let t_star = match t.normalize() {
                Ok((m, _)) => m,
                Err(_) => return false,
            };
            t_star.is_generating() && naive_kappa(&t_star, 2) == Some(3)
        }
        Witness::Essential(w) => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            if !w.reverify(ctx.s, t) {
                return false;
            }
            match (theorem, case) {
                // the two-thirds theorem fixes H = a hyper-atom of S
                ("twothird", _) => is_hyper_atom_of(&w.subgroup, ctx.s),
                ("grynkiewicz", _) => w.kind == crate::structure::EssentialKind::III,
                _ => true,
            }
        }
        Witness::EndCosets {
            subgroup,
            difference,
            s_parts,
            t_parts,
            nu,
            periodic_side,
            phi_kneser,
            t_deficit_bound,
            super_atom_of,
        } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            if *nu + ctx.mu > 1 {
                return false;
            }
            if !check_parts(ctx.s, s_parts, subgroup) || !check_parts(t, t_parts, subgroup) {
                return false;
            }
            if let Some(d) = difference {
                if !check_steps(s_parts, subgroup, d) || !check_steps(t_parts, subgroup, d) {
                    return false;
                }
            }
            let su = s_parts.last().unwrap();
            let tt = t_parts.last().unwrap();
            let s_rest = ctx.s.difference(su);
            let t_rest = t.difference(tt);
            let (full, partial) = match periodic_side.as_str() {
                "S" => (&s_rest, &t_rest),
                "T" => (&t_rest, &s_rest),
                _ => return false,
            };
            if !deficit_is(full, subgroup, 0) || !deficit_is(partial, subgroup, *nu) {
                return false;
            }
            let end_sum = match su.sumset(tt) {
                Ok(m) => m.cardinality() as i64,
                Err(_) => return false,
            };
            if end_sum != (su.cardinality() + tt.cardinality()) as i64 - (*nu + ctx.mu) as i64 {
                return false;
            }
            let phi = match quotient(ctx.group, subgroup) {
                Ok(p) => p,
                Err(_) => return false,
            };
            let sum = match ctx.s.sumset(t) {
                Ok(m) => m,
                Err(_) => return false,
            };
            let (ps, pt, psum) = (phi.image(ctx.s), phi.image(t), phi.image(&sum));
            if let Some(flag) = phi_kneser {
                let holds = psum.cardinality() + 1 == ps.cardinality() + pt.cardinality();
                if !flag || !holds {
                    return false;
                }
            }
            if let Some(bound) = t_deficit_bound {
                let deficit = match t.sumset(&subgroup.members) {
                    Ok(m) => m.cardinality() - t.cardinality(),
                    Err(_) => return false,
                };
                if deficit != *bound || deficit + ctx.mu > subgroup.order {
                    return false;
                }
            }
            match theorem {
                "twothird" => {
                    // progressions are mandatory and H is a hyper-atom of S
                    difference.is_some() && is_hyper_atom_of(subgroup, ctx.s)
                }
                "n3" => {
                    let minc = ps
                        .cardinality()
                        .min(pt.cardinality())
                        .min(phi.target.order() - psum.cardinality());
                    if minc >= 2 && difference.is_none() {
                        return false;
                    }
                    if phi_kneser.is_none() {
                        return false;
                    }
                    if ctx.group.order() != 12 {
                        match super_atom_of.as_deref() {
                            Some("S") => is_super_atom_of(subgroup, ctx.s),
                            Some("T^S") => {
                                let ext = t.exterior_under(ctx.s);
                                !ext.is_empty() && is_super_atom_of(subgroup, &ext)
                            }
                            _ => false,
                        }
                    } else {
                        true
                    }
                }
                _ => false,
            }
        }
        Witness::PhiCover {
            subgroup,
            s_image_proof,
            t_image_proof,
            common_difference,
            min_condition,
            super_atom_of,
        } => {
            let t = match ctx.t {
                Some(t) => t,
                None => return false,
            };
            let phi = match quotient(ctx.group, subgroup) {
                Ok(p) => p,
                Err(_) => return false,
            };
            let sum = match ctx.s.sumset(t) {
                Ok(m) => m,
                Err(_) => return false,
            };
            let (ps, pt, psum) = (phi.image(ctx.s), phi.image(t), phi.image(&sum));
            if psum.cardinality() + 1 != ps.cardinality() + pt.cardinality() {
                return false;
            }
            let minc = ps
                .cardinality()
                .min(pt.cardinality())
                .min(phi.target.order() - psum.cardinality());
            if minc != *min_condition {
                return false;
            }
            if minc >= 2 {
                let (sw, tw, d) = match (s_image_proof, t_image_proof, common_difference) {
                    (Some(sw), Some(tw), Some(d)) => (sw, tw, d),
                    _ => return false,
                };
                if sw.difference != tw.difference {
                    return false;
                }
                if !check_progression_proof(&ps, sw, 0) || !check_progression_proof(&pt, tw, 0) {
                    return false;
                }
                // the recorded representative must map onto the difference
                match ctx.group.index_of_tuple(d) {
                    Ok(idx) => {
                        let img = phi.map(idx);
                        let q = &phi.target;
                        if img.min(q.neg(img)) != sw.difference {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
            match theorem {
                "modular" => is_hyper_atom_of(subgroup, ctx.s),
                "n4" => {
                    if ctx.group.order() != 12 {
                        match super_atom_of.as_deref() {
                            Some("S") => is_super_atom_of(subgroup, ctx.s),
                            Some("T^S") => {
                                let ext = t.exterior_under(ctx.s);
                                !ext.is_empty() && is_super_atom_of(subgroup, &ext)
                            }
                            _ => false,
                        }
                    } else {
                        true
                    }
                }
                _ => false,
            }
        }
        Witness::Partitions { subgroup, a_partition, b_partition } => {
            let b = match ctx.t {
                Some(b) => b,
                None => return false,
            };
            if !a_partition.reverify(ctx.s) || !b_partition.reverify(b) {
                return false;
            }
            if a_partition.subgroup.members != subgroup.members
                || b_partition.subgroup.members != subgroup.members
            {
                return false;
            }
            let (a1, b1) = (&a_partition.coset_part, &b_partition.coset_part);
            let a1b1 = match a1.sumset(b1) {
                Ok(m) => m,
                Err(_) => return false,
            };
            if a1b1.cardinality() + 1 != a1.cardinality() + b1.cardinality() {
                return false;
            }
            let phi = match quotient(ctx.group, subgroup) {
                Ok(p) => p,
                Err(_) => return false,
            };
            let sum = match ctx.s.sumset(b) {
                Ok(m) => m,
                Err(_) => return false,
            };
            if phi.image(&sum).cardinality() + 1
                != phi.image(ctx.s).cardinality() + phi.image(b).cardinality()
            {
                return false;
            }
            let probe = match a1b1.sumset(&ctx.s.negate()) {
                Ok(m) => m,
                Err(_) => return false,
            };
            phi.image(&probe).intersect(&phi.image(b)).cardinality() == 1
        }
        Witness::Augmented { a, b } => {
            let bset = match ctx.t {
                Some(b) => b,
                None => return false,
            };
            let g = ctx.group;
            let (ai, bi) = match (g.index_of_tuple(a), g.index_of_tuple(b)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => return false,
            };
            if ctx.s.contains(ai) || bset.contains(bi) {
                return false;
            }
            let mut a_aug = ctx.s.clone();
            a_aug.insert(ai);
            let mut b_aug = bset.clone();
            b_aug.insert(bi);
            match a_aug.sumset(&b_aug) {
                Ok(m) => m.cardinality() + 1 == a_aug.cardinality() + b_aug.cardinality(),
                Err(_) => false,
            }
        }
    }
}

/// The witness reconstructs the set and certifies an (r,-j)-progression for
/// the allowed j: either exactly j deletions, or fewer with orbit room.
fn check_progression_proof(set: &SubsetMask, w: &ProgressionWitness, j_allowed: u32) -> bool {
    if w.wildcard {
        return set.cardinality() == 1 && set.contains(w.start);
    }
    if w.difference == 0 || w.reconstruct() != *set {
        return false;
    }
    let jw = w.j();
    if jw > j_allowed {
        return false;
    }
    jw == j_allowed
        || set.group().element_order(w.difference) >= set.cardinality() + j_allowed
}

/// Parts are disjoint, nonempty, union to the set, and each lies inside a
/// single H-coset.
fn check_parts(whole: &SubsetMask, parts: &[SubsetMask], h: &Subgroup) -> bool {
    if parts.is_empty() {
        return false;
    }
    let g = whole.group();
    let mut acc = SubsetMask::empty(g);
    for p in parts {
        if p.is_empty() || !p.intersect(&acc).is_empty() {
            return false;
        }
        let coset = h.members.translate(p.min_element().unwrap());
        if !p.is_subset_of(&coset) {
            return false;
        }
        acc = acc.union(p);
    }
    // each part is the FULL intersection with its coset
    for p in parts {
        let coset = h.members.translate(p.min_element().unwrap());
        if whole.intersect(&coset) != *p {
            return false;
        }
    }
    acc == *whole
}

fn check_steps(parts: &[SubsetMask], h: &Subgroup, d_tuple: &[u32]) -> bool {
    let g = parts[0].group();
    let phi = match quotient(g, h) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let d = match g.index_of_tuple(d_tuple) {
        Ok(x) => phi.map(x),
        Err(_) => return false,
    };
    parts.windows(2).all(|w| {
        let a = phi.map(w[0].min_element().unwrap());
        let b = phi.map(w[1].min_element().unwrap());
        phi.target.add(a, d) == b
    })
}

/// (H,-j)-periodicity by definition: completion deficit j up to whole spare
/// cosets (recomputed here, not shared with the search path).
fn deficit_is(y: &SubsetMask, h: &Subgroup, j: u32) -> bool {
    if y.is_empty() {
        return j % h.order == 0
            && j / h.order <= y.group().order() / h.order;
    }
    let filled = match y.sumset(&h.members) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let d = filled.cardinality() - y.cardinality();
    if j < d || (j - d) % h.order != 0 {
        return false;
    }
    (j - d) / h.order <= (y.group().order() - filled.cardinality()) / h.order
}

/// Definition-chasing kappa_k over all subsets (u64 masks, no pruning, no
/// shared kernel). Only usable at desk scale.
pub(crate) fn naive_kappa(s: &SubsetMask, k: u32) -> Option<u32> {
    let g = s.group();
    let n = g.order();
    assert!(n <= 24, "naive kappa is for desk-scale rechecks");
    let rows: Vec<u64> = (0..n)
        .map(|x| {
            let mut m = 0u64;
            for e in s.iter() {
                m |= 1 << g.add(x, e);
            }
            m
        })
        .collect();
    let mut best: Option<u32> = None;
    for x in 1u64..(1 << n) {
        let xpop = x.count_ones();
        if xpop < k {
            continue;
        }
        let mut sum = 0u64;
        let mut b = x;
        while b != 0 {
            sum |= rows[b.trailing_zeros() as usize];
            b &= b - 1;
        }
        let spop = sum.count_ones();
        if n - spop < k {
            continue;
        }
        let delta = spop - xpop;
        best = Some(best.map_or(delta, |b| b.min(delta)));
    }
    best
}

/// H is a maximal-order subgroup 2-fragment of S (ties allowed).
fn is_hyper_atom_of(h: &Subgroup, s: &SubsetMask) -> bool {
    let star = match s.normalize() {
        Ok((m, _)) => m,
        Err(_) => return false,
    };
    let frags = naive_subgroup_two_fragments(&star);
    match frags.iter().map(|f| f.cardinality()).max() {
        Some(top) => h.order == top && frags.iter().any(|f| f == &h.members),
        None => false,
    }
}

fn naive_subgroup_two_fragments(star: &SubsetMask) -> Vec<SubsetMask> {
    let g = star.group();
    let kappa = match naive_kappa(star, 2) {
        Some(v) => v,
        None => return Vec::new(),
    };
    let mut out = Vec::new();
    for h in g.subgroups() {
        if h.order < 2 {
            continue;
        }
        let hs = match star.sumset(&h.members) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if g.order() - hs.cardinality() >= 2 && hs.cardinality() - h.order == kappa {
            out.push(h.members.clone());
        }
    }
    out
}

/// H is a super-atom of X: the proper subgroup generated by X^*, or a
/// hyper-atom of X^* when X generates.
fn is_super_atom_of(h: &Subgroup, x: &SubsetMask) -> bool {
    let g = x.group();
    let star = match x.normalize() {
        Ok((m, _)) => m,
        Err(_) => return false,
    };
    let span = match subgroup_generated(g, &star) {
        Ok(s) => s,
        Err(_) => return false,
    };
    if span.order < g.order() {
        return h.members == span.members;
    }
    is_hyper_atom_of(h, &star)
}

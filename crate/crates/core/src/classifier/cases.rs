//! The classify_* operations: hypothesis check, case-by-case search in
//! statement order, witness assembly, independent re-verification.

use std::sync::Arc;

use crate::classifier::recheck::{self, RecheckCtx};
use crate::classifier::{
    check_degenerate_block, check_mu, check_sum_deficit, hypothesis, CaseReport, PairInstance,
    StructureVerdict, Witness,
};
use crate::error::{Error, Result};
use crate::group::{quotient, GroupSpec, Subgroup};
use crate::iso::{is_degenerate, kappa_with_mode, subgroup_two_fragments, ScanMode};
use crate::mutation::gate;
use crate::setops::SubsetMask;
use crate::structure::{
    classify_essential_pair, common_differences_wild, h_decompose, is_h_minus_j_periodic,
    progression_differences, punctured_witness, EssentialKind, ProgressionWitness,
};

// ---------------------------------------------------------------------------
// shared search helpers
// ---------------------------------------------------------------------------

/// Smallest a with T = a + S.
fn translate_witness(s: &SubsetMask, t: &SubsetMask) -> Option<u32> {
    if s.cardinality() != t.cardinality() || s.is_empty() {
        return None;
    }
    let g = s.group();
    let s0 = s.min_element().unwrap();
    let mut hits: Vec<u32> = t
        .iter()
        .map(|te| g.sub(te, s0))
        .filter(|&a| s.translate(a) == *t)
        .collect();
    hits.sort_unstable();
    hits.into_iter().next()
}

/// Smallest a with T = G \ (-a - 2S), where 2S = S + S.
fn complement_witness(s: &SubsetMask, t: &SubsetMask) -> Option<u32> {
    let g = s.group();
    let ss = s.sumset(s).expect("same group");
    (0..g.order()).find(|&a| ss.negate().translate(g.neg(a)).complement() == *t)
}

/// First canonical difference making both sets (r, -j)-progressions, with
/// tight witnesses.
fn common_punctured(
    s: &SubsetMask,
    t: &SubsetMask,
    j: u32,
) -> Result<Option<(u32, ProgressionWitness, ProgressionWitness)>> {
    let rs = progression_differences(s, j)?;
    let rt = progression_differences(t, j)?;
    for r in rs {
        if rt.contains(&r) {
            let sw = punctured_witness(s, r, j);
            let tw = punctured_witness(t, r, j);
            if let (Some(sw), Some(tw)) = (sw, tw) {
                return Ok(Some((r, sw, tw)));
            }
        }
    }
    Ok(None)
}

/// When a mutated predicate claims a progression that is not there, emit a
/// syntactically valid witness that cannot re-verify.
fn bogus_progression(set: &SubsetMask, r: u32, j: u32) -> ProgressionWitness {
    ProgressionWitness {
        group: Arc::clone(set.group()),
        difference: r.max(1) % set.group().order().max(2),
        start: set.min_element().unwrap_or(0),
        length: set.cardinality() + j,
        deleted: Vec::new(),
        wildcard: false,
        full_orbit: false,
    }
}

/// Super-atom candidates of a set: the proper subgroup it generates, or
/// every maximal-order subgroup 2-fragment when it generates G.
fn super_atom_candidates(x: &SubsetMask) -> Vec<Subgroup> {
    let g = x.group();
    let star = match x.normalize() {
        Ok((m, _)) => m,
        Err(_) => return Vec::new(),
    };
    match crate::group::subgroup_generated(g, &star) {
        Ok(span) if span.order < g.order() => vec![span],
        Ok(_) => match subgroup_two_fragments(&star) {
            Ok((_, hits)) if !hits.is_empty() => {
                let top = hits.iter().map(|h| h.order).max().unwrap();
                hits.into_iter().filter(|h| h.order == top).collect()
            }
            _ => Vec::new(),
        },
        Err(_) => Vec::new(),
    }
}

/// Subgroups to try for the quotient-cover cases: super-atoms of S and of
/// T^S, then (order 12 only) every other nontrivial proper subgroup.
fn cover_candidates(inst: &PairInstance) -> Vec<(Subgroup, Option<String>)> {
    let g = &inst.group;
    let mut out: Vec<(Subgroup, Option<String>)> = Vec::new();
    let mut push = |h: Subgroup, tag: Option<String>| {
        if !out.iter().any(|(e, _)| e.members == h.members) {
            out.push((h, tag));
        }
    };
    for h in super_atom_candidates(&inst.s) {
        push(h, Some("S".to_string()));
    }
    let t_ext = inst.t.exterior_under(&inst.s);
    if !t_ext.is_empty() {
        for h in super_atom_candidates(&t_ext) {
            push(h, Some("T^S".to_string()));
        }
    }
    if g.order() == 12 {
        for h in g.subgroups() {
            if h.order > 1 && h.order < g.order() {
                push(h.clone(), None);
            }
        }
    }
    out
}

struct EndCase {
    difference: Option<u32>,
    s_parts: Vec<SubsetMask>,
    t_parts: Vec<SubsetMask>,
    nu: u32,
    periodic_side: &'static str,
}

/// Search for the end-coset configuration: designated last parts S_u, T_t
/// with one of S \ S_u, T \ T_t H-periodic, the other (H,-nu)-periodic, and
/// |T_t + S_u| = |T_t| + |S_u| - nu - mu. In progression mode the parts are
/// oriented along a common difference (both signs tried); otherwise every
/// choice of end parts is tried.
fn end_case_search(
    s: &SubsetMask,
    t: &SubsetMask,
    h: &Subgroup,
    mu: u32,
    require_progressions: bool,
    gates: bool,
) -> Result<Option<EndCase>> {
    let sd = h_decompose(s, h)?;
    let td = h_decompose(t, h)?;
    let check = |sp: &[SubsetMask], tp: &[SubsetMask]| -> Option<(u32, &'static str)> {
        let su = sp.last().unwrap();
        let tt = tp.last().unwrap();
        let s_rest = s.difference(su);
        let t_rest = t.difference(tt);
        let end_sum = su.sumset(tt).expect("same group").cardinality();
        for nu in 0..=(1 - mu) {
            let want = (tt.cardinality() + su.cardinality()) as i64 - (nu + mu) as i64;
            let mut sum_ok = end_sum as i64 == want;
            if gates {
                sum_ok = gate("n3.case4.end_sum", sum_ok);
            }
            if !sum_ok {
                continue;
            }
            let side_s = is_h_minus_j_periodic(&s_rest, h, 0)
                && is_h_minus_j_periodic(&t_rest, h, nu);
            let side_t = is_h_minus_j_periodic(&t_rest, h, 0)
                && is_h_minus_j_periodic(&s_rest, h, nu);
            let mut per_ok = side_s || side_t;
            if gates {
                per_ok = gate("n3.case4.periodicity", per_ok);
            }
            if per_ok {
                return Some((nu, if side_s { "S" } else { "T" }));
            }
        }
        None
    };
    if require_progressions {
        if !(sd.is_progression && td.is_progression) {
            return Ok(None);
        }
        let common = common_differences_wild(&sd, &td);
        let q = Arc::clone(&sd.morphism.target);
        for &d in &common {
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
                        if let Some((nu, side)) = check(&sp, &tp) {
                            return Ok(Some(EndCase {
                                difference: Some(dd),
                                s_parts: sp,
                                t_parts: tp,
                                nu,
                                periodic_side: side,
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    } else {
        for si in 0..sd.parts.len() {
            let mut sp = sd.parts.clone();
            let su = sp.remove(si);
            sp.push(su);
            for ti in 0..td.parts.len() {
                let mut tp = td.parts.clone();
                let tu = tp.remove(ti);
                tp.push(tu);
                if let Some((nu, side)) = check(&sp, &tp) {
                    return Ok(Some(EndCase {
                        difference: None,
                        s_parts: sp,
                        t_parts: tp,
                        nu,
                        periodic_side: side,
                    }));
                }
            }
        }
        Ok(None)
    }
}

/// Common-difference progression witnesses for the quotient images of S and
/// T. Single-coset images are wildcards deferring to the other side.
fn phi_progression_pair(
    phi_s: &SubsetMask,
    phi_t: &SubsetMask,
) -> Result<Option<(u32, ProgressionWitness, ProgressionWitness)>> {
    let q = phi_s.group();
    let pick_default = || (1..q.order()).find(|&d| d.min(q.neg(d)) == d);
    let (s1, t1) = (phi_s.cardinality() == 1, phi_t.cardinality() == 1);
    let d = if s1 && t1 {
        match pick_default() {
            Some(d) => d,
            None => return Ok(None),
        }
    } else if s1 {
        match progression_differences(phi_t, 0)?.first() {
            Some(&d) => d,
            None => return Ok(None),
        }
    } else if t1 {
        match progression_differences(phi_s, 0)?.first() {
            Some(&d) => d,
            None => return Ok(None),
        }
    } else {
        let rs = progression_differences(phi_s, 0)?;
        let rt = progression_differences(phi_t, 0)?;
        match rs.into_iter().find(|d| rt.contains(d)) {
            Some(d) => d,
            None => return Ok(None),
        }
    };
    let sw = punctured_witness(phi_s, d, 0);
    let tw = punctured_witness(phi_t, d, 0);
    match (sw, tw) {
        (Some(sw), Some(tw)) => Ok(Some((d, sw, tw))),
        _ => Ok(None),
    }
}

fn finish(
    theorem: &'static str,
    ctx: RecheckCtx<'_>,
    found: Vec<(String, Witness)>,
) -> Result<StructureVerdict> {
    if found.is_empty() {
        return Err(Error::NoCase {
            theorem,
            details: serde_json::json!({
                "group": ctx.group.factors(),
                "S": ctx.s.to_tuples(),
                "T": ctx.t.map(|t| t.to_tuples()),
                "mu": ctx.mu,
            })
            .to_string(),
        });
    }
    let cases: Vec<CaseReport> = found
        .into_iter()
        .map(|(case, witness)| {
            let verified = recheck::verify_case(theorem, &ctx, &case, &witness);
            CaseReport { case, witness, verified }
        })
        .collect();
    Ok(StructureVerdict {
        theorem: theorem.to_string(),
        case: cases[0].case.clone(),
        verified: cases.iter().all(|c| c.verified),
        cases,
    })
}

// ---------------------------------------------------------------------------
// the eight classifiers
// ---------------------------------------------------------------------------

/// |S| = |T| = 3, S+T aperiodic, |S+T| = 6 - mu: one of the sets is a
/// progression, or T is a translate of S.
pub fn classify_3x3(inst: &PairInstance) -> Result<StructureVerdict> {
    const TH: &'static str = "3x3";
    check_mu(TH, inst.mu)?;
    hypothesis(TH, "s_size", inst.s.cardinality() == 3)?;
    hypothesis(TH, "t_size", inst.t.cardinality() == 3)?;
    let sum = check_sum_deficit(TH, inst)?;
    hypothesis(TH, "sum_size_six", sum.cardinality() + inst.mu == 6)?;
    let mut found = Vec::new();
    for (name, set) in [("S", &inst.s), ("T", &inst.t)] {
        if let Some(&r) = progression_differences(set, 0)?.first() {
            if let Some(w) = punctured_witness(set, r, 0) {
                found.push((
                    "progression".to_string(),
                    Witness::Progression { of: name.to_string(), proof: w },
                ));
                break;
            }
        }
    }
    if let Some(a) = translate_witness(&inst.s, &inst.t) {
        found.push((
            "translate".to_string(),
            Witness::Translate { a: inst.group.describe_element(a) },
        ));
    }
    finish(TH, RecheckCtx::pair(inst), found)
}

/// Theorem "two-thirds": degenerate generating S with hyper-atom H,
/// |S+T| = |S|+|T|-mu <= (2|G|+2mu)/3.
pub fn classify_two_third(inst: &PairInstance) -> Result<StructureVerdict> {
    const TH: &'static str = "twothird";
    let ctx = check_degenerate_block(TH, inst)?;
    let h = ctx.hyper.subgroup;
    let mut found = Vec::new();
    if let Some(k2) = case_twelve(inst)? {
        found.push(("i".to_string(), Witness::CaseTwelve { kappa2_t_star: k2 }));
    }
    if inst.mu == 0 {
        if let Some(w) = classify_essential_pair(&inst.s, &inst.t, &h)? {
            found.push(("ii".to_string(), Witness::Essential(w)));
        }
    }
    if let Some(e) = end_case_search(&inst.s, &inst.t, &h, inst.mu, true, false)? {
        let t_deficit = inst.t.sumset(&h.members).expect("same group").cardinality()
            - inst.t.cardinality();
        if t_deficit + inst.mu <= h.order {
            found.push((
                "iii".to_string(),
                Witness::EndCosets {
                    subgroup: h.clone(),
                    difference: e
                        .difference
                        .map(|d| describe_quotient_difference(&inst.group, &h, d)),
                    s_parts: e.s_parts,
                    t_parts: e.t_parts,
                    nu: e.nu,
                    periodic_side: e.periodic_side.to_string(),
                    phi_kneser: None,
                    t_deficit_bound: Some(t_deficit),
                    super_atom_of: None,
                },
            ));
        }
    }
    finish(TH, RecheckCtx::pair(inst), found)
}

/// mu = 0 and |G| = 3|S| = 3|T| = 4 kappa_2(T^*) = 12.
fn case_twelve(inst: &PairInstance) -> Result<Option<u32>> {
    if inst.mu != 0
        || inst.group.order() != 12
        || inst.s.cardinality() != 4
        || inst.t.cardinality() != 4
    {
        return Ok(None);
    }
    let (t_star, _) = inst.t.normalize()?;
    if !t_star.is_generating() {
        return Ok(None);
    }
    let rep = kappa_with_mode(&t_star, 2, ScanMode::Exact)?;
    Ok((rep.separable && rep.kappa == 3).then_some(rep.kappa))
}

fn describe_quotient_difference(g: &Arc<GroupSpec>, h: &Subgroup, d: u32) -> Vec<u32> {
    let phi = quotient(g, h).expect("valid subgroup");
    g.describe_element(phi.rep(d))
}

/// Theorem "modular": same hypotheses as the two-thirds theorem; the
/// conclusion lives at the quotient by the hyper-atom.
pub fn classify_modular(inst: &PairInstance) -> Result<StructureVerdict> {
    const TH: &'static str = "modular";
    let ctx = check_degenerate_block(TH, inst)?;
    let h = ctx.hyper.subgroup;
    let mut found = Vec::new();
    if let Some(k2) = case_twelve(inst)? {
        found.push(("i".to_string(), Witness::CaseTwelve { kappa2_t_star: k2 }));
    }
    let phi = quotient(&inst.group, &h)?;
    let sum = inst.s.sumset(&inst.t).expect("same group");
    let (ps, pt, psum) = (phi.image(&inst.s), phi.image(&inst.t), phi.image(&sum));
    if psum.cardinality() + 1 == ps.cardinality() + pt.cardinality() {
        if let Some((d, sw, tw)) = phi_progression_pair(&ps, &pt)? {
            found.push((
                "ii".to_string(),
                Witness::PhiCover {
                    subgroup: h.clone(),
                    s_image_proof: Some(sw),
                    t_image_proof: Some(tw),
                    common_difference: Some(describe_quotient_difference(&inst.group, &h, d)),
                    min_condition: ps
                        .cardinality()
                        .min(pt.cardinality())
                        .min(phi.target.order() - psum.cardinality()),
                    super_atom_of: Some("S".to_string()),
                },
            ));
        }
    }
    finish(TH, RecheckCtx::pair(inst), found)
}

/// Theorem "non-degenerate = near-progression": a generating non-degenerate
/// S with kappa_{3-mu}(S) <= |S|-mu is an (r, mu-1)-progression.
pub fn classify_near_progression(s: &SubsetMask, mu: u32) -> Result<StructureVerdict> {
    const TH: &'static str = "near";
    check_mu(TH, mu)?;
    hypothesis(TH, "zero_in_s", s.contains(0))?;
    hypothesis(TH, "s_generating", s.is_generating())?;
    let g = Arc::clone(s.group());
    let n = g.order();
    let card = s.cardinality();
    hypothesis(TH, "s_size_min", card >= 3)?;
    hypothesis(TH, "s_size_max", 2 * card <= n + 5 * mu - 4)?;
    let k = 3 - mu;
    hypothesis(TH, "separability_order", n + 1 >= 2 * k)?;
    let rep = kappa_with_mode(s, k, ScanMode::Exact)?;
    hypothesis(TH, "kappa_bound", rep.kappa + mu <= card)?;
    if mu == 0 && card == 3 {
        let rep4 = kappa_with_mode(s, 4, ScanMode::Exact)?;
        hypothesis(TH, "kappa4_bound", rep4.kappa <= card)?;
    }
    let degenerate = match is_degenerate(s) {
        Ok(opt) => opt.is_some(),
        Err(Error::NotSeparable) => false,
        Err(e) => return Err(e),
    };
    hypothesis(TH, "s_non_degenerate", !degenerate)?;

    let j = 1 - mu;
    let mut found = Vec::new();
    if let Some(&r) = progression_differences(s, j)?.first() {
        if let Some(w) = punctured_witness(s, r, j) {
            found.push((
                "progression".to_string(),
                Witness::Progression { of: "S".to_string(), proof: w },
            ));
        }
    }
    finish(TH, RecheckCtx::single(&g, s, mu), found)
}

/// Theorem "n-4 modular": |S+T| <= |G| - 4 + 2mu over the group generated
/// by S^* and T^*.
pub fn classify_n_minus_4(inst: &PairInstance) -> Result<StructureVerdict> {
    const TH: &'static str = "n4";
    check_mu(TH, inst.mu)?;
    check_generated_by_union(TH, inst)?;
    let (ss, tt) = (inst.s.cardinality(), inst.t.cardinality());
    hypothesis(TH, "s_size", ss + inst.mu >= 3)?;
    hypothesis(TH, "t_size", tt >= ss.max(4 - 2 * inst.mu))?;
    let sum = check_sum_deficit(TH, inst)?;
    hypothesis(
        TH,
        "sum_bound_n_minus_4",
        sum.cardinality() + 4 <= inst.group.order() + 2 * inst.mu,
    )?;

    let mut found = Vec::new();
    if let Some((_, sw, tw)) = common_punctured(&inst.s, &inst.t, 1 - inst.mu)? {
        found.push(("i".to_string(), Witness::ProgressionPair { s_proof: sw, t_proof: tw }));
    }
    if let Some(w) = phi_cover_search(inst, &sum)? {
        found.push(("ii".to_string(), w));
    }
    finish(TH, RecheckCtx::pair(inst), found)
}

fn check_generated_by_union(theorem: &'static str, inst: &PairInstance) -> Result<()> {
    hypothesis(theorem, "nonempty", !inst.s.is_empty() && !inst.t.is_empty())?;
    let (s_star, _) = inst.s.normalize()?;
    let (t_star, _) = inst.t.normalize()?;
    let span = crate::group::subgroup_generated(&inst.group, &s_star.union(&t_star))?;
    hypothesis(theorem, "generated_by_union", span.order == inst.group.order())
}

/// Case (ii) of the n-4 theorem: a subgroup H with the quotient Kneser
/// equality, progression images under the minimum condition, H a super-atom
/// of S or T^S away from order 12.
fn phi_cover_search(inst: &PairInstance, sum: &SubsetMask) -> Result<Option<Witness>> {
    for (h, tag) in cover_candidates(inst) {
        let phi = quotient(&inst.group, &h)?;
        let (ps, pt, psum) = (phi.image(&inst.s), phi.image(&inst.t), phi.image(sum));
        if psum.cardinality() + 1 != ps.cardinality() + pt.cardinality() {
            continue;
        }
        let minc = ps
            .cardinality()
            .min(pt.cardinality())
            .min(phi.target.order() - psum.cardinality());
        if minc >= 2 {
            if let Some((d, sw, tw)) = phi_progression_pair(&ps, &pt)? {
                return Ok(Some(Witness::PhiCover {
                    subgroup: h.clone(),
                    s_image_proof: Some(sw),
                    t_image_proof: Some(tw),
                    common_difference: Some(describe_quotient_difference(&inst.group, &h, d)),
                    min_condition: minc,
                    super_atom_of: tag,
                }));
            }
        } else {
            return Ok(Some(Witness::PhiCover {
                subgroup: h.clone(),
                s_image_proof: None,
                t_image_proof: None,
                common_difference: None,
                min_condition: minc,
                super_atom_of: tag,
            }));
        }
    }
    Ok(None)
}

/// Theorem "n-3": the full structure list at |S+T| <= |G| - 3 - mu.
pub fn classify_n_minus_3(inst: &PairInstance) -> Result<StructureVerdict> {
    const TH: &'static str = "n3";
    check_mu(TH, inst.mu)?;
    check_generated_by_union(TH, inst)?;
    let (ss, tt) = (inst.s.cardinality(), inst.t.cardinality());
    hypothesis(TH, "s_size", ss + inst.mu >= 3)?;
    hypothesis(TH, "t_size", tt >= ss)?;
    let sum = check_sum_deficit(TH, inst)?;
    hypothesis(
        TH,
        "sum_bound_n_minus_3",
        sum.cardinality() + 3 + inst.mu <= inst.group.order(),
    )?;

    let g = &inst.group;
    let mut found = Vec::new();

    // (i): |S| = 3, mu = 0, T a translate of S or the complement form
    if inst.mu == 0 && ss == 3 {
        let tr = translate_witness(&inst.s, &inst.t);
        if gate("n3.case1.translate", tr.is_some()) {
            let a = tr.unwrap_or(0);
            found.push(("i".to_string(), Witness::Translate { a: g.describe_element(a) }));
        } else {
            let co = complement_witness(&inst.s, &inst.t);
            if gate("n3.case1.complement", co.is_some()) {
                let a = co.unwrap_or(0);
                found.push(("i".to_string(), Witness::Complement { a: g.describe_element(a) }));
            }
        }
    }

    // (ii): S and T are (r, mu-1)-progressions with a common r
    let pair = common_punctured(&inst.s, &inst.t, 1 - inst.mu)?;
    if gate("n3.case2.progressions", pair.is_some()) {
        let (sw, tw) = match pair {
            Some((_, sw, tw)) => (sw, tw),
            None => (
                bogus_progression(&inst.s, 1, 1 - inst.mu),
                bogus_progression(&inst.t, 1, 1 - inst.mu),
            ),
        };
        found.push(("ii".to_string(), Witness::ProgressionPair { s_proof: sw, t_proof: tw }));
    }

    // (iii): mu = 0 and {S,T} is an H-essential pair for some H
    if inst.mu == 0 {
        'outer: for h in g.subgroups() {
            if h.order < 2 || h.order == g.order() {
                continue;
            }
            if let Some(w) = classify_essential_pair(&inst.s, &inst.t, h)? {
                found.push(("iii".to_string(), Witness::Essential(w)));
                break 'outer;
            }
        }
    }

    // (iv): end-coset decompositions over a super-atom with the quotient
    // Kneser equality
    for (h, tag) in cover_candidates(inst) {
        let phi = quotient(g, &h)?;
        let (ps, pt, psum) = (phi.image(&inst.s), phi.image(&inst.t), phi.image(&sum));
        let phi_kneser = psum.cardinality() + 1 == ps.cardinality() + pt.cardinality();
        if !gate("n3.case4.phi_kneser", phi_kneser) {
            continue;
        }
        let minc = ps
            .cardinality()
            .min(pt.cardinality())
            .min(phi.target.order() - psum.cardinality());
        if let Some(e) = end_case_search(&inst.s, &inst.t, &h, inst.mu, minc >= 2, true)? {
            found.push((
                "iv".to_string(),
                Witness::EndCosets {
                    subgroup: h.clone(),
                    difference: e.difference.map(|d| describe_quotient_difference(g, &h, d)),
                    s_parts: e.s_parts,
                    t_parts: e.t_parts,
                    nu: e.nu,
                    periodic_side: e.periodic_side.to_string(),
                    phi_kneser: Some(phi_kneser),
                    t_deficit_bound: None,
                    super_atom_of: tag,
                },
            ));
            break;
        }
    }

    finish(TH, RecheckCtx::pair(inst), found)
}

/// Kemperman-style partition: |A+B| = |A|+|B|-1 <= |G|-2 aperiodic.
pub fn kemperman_partition(a: &SubsetMask, b: &SubsetMask) -> Result<StructureVerdict> {
    const TH: &'static str = "kemperman";
    let inst = PairInstance::new(a.group(), a.clone(), b.clone(), 1);
    let sum = check_sum_deficit(TH, &inst)?;
    hypothesis(TH, "sum_bound", sum.cardinality() + 2 <= inst.group.order())?;
    let mut found = Vec::new();
    if let Some(w) = partition_search(a, b, &sum)? {
        found.push(("partition".to_string(), w));
    }
    finish(TH, RecheckCtx::pair(&inst), found)
}

/// The three Kemperman equalities over every proper subgroup and every
/// quasi-periodic partition pair, smallest subgroup first. The trivial
/// subgroup realizes the unique-expression-element form.
fn partition_search(
    a: &SubsetMask,
    b: &SubsetMask,
    sum: &SubsetMask,
) -> Result<Option<Witness>> {
    let g = a.group();
    for h in g.subgroups() {
        if h.order == g.order() && g.order() > 1 {
            continue;
        }
        let phi = quotient(g, h)?;
        let (pa, pb, psum) = (phi.image(a), phi.image(b), phi.image(sum));
        if psum.cardinality() + 1 != pa.cardinality() + pb.cardinality() {
            continue;
        }
        let parts_a = crate::structure::quasi_periodic_partitions(a, h)?;
        let parts_b = crate::structure::quasi_periodic_partitions(b, h)?;
        for qa in &parts_a {
            for qb in &parts_b {
                let a1b1 = qa.coset_part.sumset(&qb.coset_part).expect("same group");
                if a1b1.cardinality() + 1
                    != qa.coset_part.cardinality() + qb.coset_part.cardinality()
                {
                    continue;
                }
                // |phi(A_1 + B_1 - A) /\ phi(B)| = 1
                let probe = a1b1.sumset(&a.negate()).expect("same group");
                if phi.image(&probe).intersect(&pb).cardinality() == 1 {
                    return Ok(Some(Witness::Partitions {
                        subgroup: h.clone(),
                        a_partition: qa.clone(),
                        b_partition: qb.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Grynkiewicz-style classification at |A+B| = |A|+|B| <= |G|-3.
pub fn grynkiewicz_classify(a: &SubsetMask, b: &SubsetMask) -> Result<StructureVerdict> {
    const TH: &'static str = "grynkiewicz";
    let inst = PairInstance::new(a.group(), a.clone(), b.clone(), 0);
    hypothesis(TH, "a_size", a.cardinality() >= 3)?;
    hypothesis(TH, "b_size", b.cardinality() >= a.cardinality())?;
    let sum = check_sum_deficit(TH, &inst)?;
    hypothesis(TH, "sum_bound", sum.cardinality() + 3 <= inst.group.order())?;
    let g = a.group();
    let mut found = Vec::new();

    // 1) |A| = 3 and B = a + A or B = G \ (-a - 2A)
    if a.cardinality() == 3 {
        if let Some(x) = translate_witness(a, b) {
            found.push(("1".to_string(), Witness::Translate { a: g.describe_element(x) }));
        } else if let Some(x) = complement_witness(a, b) {
            found.push(("1".to_string(), Witness::Complement { a: g.describe_element(x) }));
        }
    }

    // 2) augmenting elements restoring the Kneser-critical equality
    'aug: for ae in 0..g.order() {
        if a.contains(ae) {
            continue;
        }
        let a_aug = {
            let mut m = a.clone();
            m.insert(ae);
            m
        };
        for be in 0..g.order() {
            if b.contains(be) {
                continue;
            }
            let mut b_aug = b.clone();
            b_aug.insert(be);
            let big = a_aug.sumset(&b_aug).expect("same group");
            if big.cardinality() + 1 == a_aug.cardinality() + b_aug.cardinality() {
                found.push((
                    "2".to_string(),
                    Witness::Augmented {
                        a: g.describe_element(ae),
                        b: g.describe_element(be),
                    },
                ));
                break 'aug;
            }
        }
    }

    // 3) quasi-periodic partitions with the Kemperman equalities
    if let Some(w) = partition_search(a, b, &sum)? {
        found.push(("3".to_string(), w));
    }

    // 4) {A,B} is a Klein pair
    'klein: for h in g.subgroups() {
        if h.order != 4 {
            continue;
        }
        if let Some(w) = classify_essential_pair(a, b, h)? {
            if w.kind == EssentialKind::III {
                found.push(("4".to_string(), Witness::Essential(w)));
                break 'klein;
            }
        }
    }

    finish(TH, RecheckCtx::pair(&inst), found)
}

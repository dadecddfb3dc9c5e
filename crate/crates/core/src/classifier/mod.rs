//! The structure theorems as total classification procedures.
//!
//! Every `classify_*` operation first runs the theorem's hypothesis checker,
//! which returns the exact failed clause on out-of-hypothesis input. On
//! valid input the classifier evaluates every case in statement order,
//! reports all satisfied cases (the first is the principal one), and invokes
//! the independent re-checker on each witness. An instance that satisfies
//! the hypotheses but matches no case is returned as a counterexample error
//! — never silently.

mod cases;
mod recheck;
#[cfg(test)]
mod tests;

pub use cases::{
    classify_3x3, classify_modular, classify_n_minus_3, classify_n_minus_4,
    classify_near_progression, classify_two_third, grynkiewicz_classify, kemperman_partition,
};
pub use recheck::verify_verdict;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{make_group, GroupSpec, Subgroup};
use crate::iso::{hyper_atom, is_degenerate, HyperAtom};
use crate::setops::SubsetMask;
use crate::structure::{EssentialPairWitness, ProgressionWitness, QuasiPeriodicPartition};

/// A pair (S, T) with its claimed sumset deficit mu; |S+T| = |S|+|T|-mu is
/// asserted by the hypothesis checkers, not by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairInstance {
    pub group: Arc<GroupSpec>,
    pub s: SubsetMask,
    pub t: SubsetMask,
    pub mu: u32,
}

impl Serialize for PairInstance {
    fn serialize<S: serde::Serializer>(&self, sz: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = sz.serialize_struct("PairInstance", 4)?;
        match self.group.factors() {
            Some(f) => st.serialize_field("group", f)?,
            None => st.serialize_field("group", &format!("{:?}", self.group))?,
        }
        st.serialize_field("S", &self.s.to_tuples())?;
        st.serialize_field("T", &self.t.to_tuples())?;
        st.serialize_field("mu", &self.mu)?;
        st.end()
    }
}

impl PairInstance {
    pub fn new(group: &Arc<GroupSpec>, s: SubsetMask, t: SubsetMask, mu: u32) -> Self {
        PairInstance { group: Arc::clone(group), s, t, mu }
    }

    /// Parse the instance file format
    /// `{"group":[d1,...],"S":[[...],...],"T":[[...],...],"mu":0}`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("instance must be an object".into()))?;
        let factors: Vec<u32> = obj
            .get("group")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::Parse("missing group factor list".into()))?
            .iter()
            .map(|x| x.as_u64().map(|v| v as u32).ok_or_else(|| Error::Parse("bad factor".into())))
            .collect::<Result<_>>()?;
        let group = make_group(&factors)?;
        let parse_set = |key: &str| -> Result<SubsetMask> {
            let arr = obj
                .get(key)
                .and_then(|s| s.as_array())
                .ok_or_else(|| Error::Parse(format!("missing set {}", key)))?;
            parse_elements(&group, arr)
        };
        let s = parse_set("S")?;
        let t = parse_set("T")?;
        let mu = obj.get("mu").and_then(|m| m.as_u64()).unwrap_or(0) as u32;
        Ok(PairInstance { group, s, t, mu })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("instances serialize")
    }
}

/// Parse a JSON array of element tuples (integers address rank-1 groups).
pub fn parse_elements(group: &Arc<GroupSpec>, arr: &[serde_json::Value]) -> Result<SubsetMask> {
    let mut m = SubsetMask::empty(group);
    for el in arr {
        let idx = match el {
            serde_json::Value::Number(x) => {
                let v = x.as_u64().ok_or_else(|| Error::Parse("bad element".into()))? as u32;
                group.index_of_tuple(&[v])?
            }
            serde_json::Value::Array(coords) => {
                let tuple: Vec<u32> = coords
                    .iter()
                    .map(|c| {
                        c.as_u64()
                            .map(|v| v as u32)
                            .ok_or_else(|| Error::Parse("bad coordinate".into()))
                    })
                    .collect::<Result<_>>()?;
                group.index_of_tuple(&tuple)?
            }
            _ => return Err(Error::Parse("elements must be tuples or integers".into())),
        };
        m.insert(idx);
    }
    Ok(m)
}

/// One satisfied case with its witness.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub witness: Witness,
    pub verified: bool,
}

/// Classification outcome: every satisfied case in statement order, the
/// first being principal.
#[derive(Clone, Debug, Serialize)]
pub struct StructureVerdict {
    pub theorem: String,
    pub case: String,
    pub cases: Vec<CaseReport>,
    pub verified: bool,
}

/// Witness payloads, serialized with explicit element tuples.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum Witness {
    /// One of the named sets is an (r,-j)-progression.
    Progression { of: String, proof: ProgressionWitness },
    /// S and T are (r, mu-1)-progressions with the same difference.
    ProgressionPair { s_proof: ProgressionWitness, t_proof: ProgressionWitness },
    /// T = a + S.
    Translate { a: Vec<u32> },
    /// T = G \ (-a - 2S), with 2S the sumset S+S.
    Complement { a: Vec<u32> },
    /// |G| = 3|S| = 3|T| = 4 kappa_2(T^*) = 12.
    CaseTwelve { kappa2_t_star: u32 },
    Essential(EssentialPairWitness),
    /// Common-difference H-progressions (or free H-decompositions) whose end
    /// cosets absorb the whole deficit: one of S \ S_u, T \ T_t is
    /// H-periodic, the other (H,-nu)-periodic, and
    /// |T_t + S_u| = |T_t| + |S_u| - nu - mu.
    EndCosets {
        subgroup: Subgroup,
        /// Common difference (representative tuple in G); None when the
        /// decompositions are not required to be progressions.
        difference: Option<Vec<u32>>,
        s_parts: Vec<SubsetMask>,
        t_parts: Vec<SubsetMask>,
        nu: u32,
        /// Which of S \ S_u ("S") or T \ T_t ("T") is fully H-periodic.
        periodic_side: String,
        /// |phi(S+T)| = |phi(S)| + |phi(T)| - 1, when the case demands it.
        phi_kneser: Option<bool>,
        /// |T+H| - |T| <= |H| - mu, when the case demands it.
        t_deficit_bound: Option<u32>,
        super_atom_of: Option<String>,
    },
    /// |phi(S+T)| = |phi(S)| + |phi(T)| - 1 with quotient images that are
    /// common-difference progressions whenever the minimum condition holds.
    PhiCover {
        subgroup: Subgroup,
        s_image_proof: Option<ProgressionWitness>,
        t_image_proof: Option<ProgressionWitness>,
        common_difference: Option<Vec<u32>>,
        min_condition: u32,
        super_atom_of: Option<String>,
    },
    /// Quasi-periodic partitions realizing the Kemperman equalities.
    Partitions {
        subgroup: Subgroup,
        a_partition: QuasiPeriodicPartition,
        b_partition: QuasiPeriodicPartition,
    },
    /// Augmenting elements restoring the Kneser-critical equality.
    Augmented { a: Vec<u32>, b: Vec<u32> },
}

/// Hypothesis checker outcomes for the two theorems that fix H up front.
pub(crate) struct DegenerateContext {
    pub hyper: HyperAtom,
}

pub(crate) fn hypothesis(theorem: &'static str, clause: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis { theorem, clause: clause.to_string() })
    }
}

pub(crate) fn check_mu(theorem: &'static str, mu: u32) -> Result<()> {
    hypothesis(theorem, "mu_range", mu <= 1)
}

pub(crate) fn check_sum_deficit(theorem: &'static str, inst: &PairInstance) -> Result<SubsetMask> {
    let sum = inst
        .s
        .sumset(&inst.t)
        .map_err(|_| Error::Hypothesis { theorem, clause: "same_group".into() })?;
    hypothesis(theorem, "nonempty", !inst.s.is_empty() && !inst.t.is_empty())?;
    hypothesis(
        theorem,
        "sum_deficit",
        sum.cardinality() + inst.mu == inst.s.cardinality() + inst.t.cardinality(),
    )?;
    hypothesis(theorem, "aperiodic", sum.is_aperiodic().unwrap_or(false))?;
    Ok(sum)
}

/// Shared degenerate-S hypothesis block of the two-thirds and modular
/// theorems, returning the hyper-atom.
pub(crate) fn check_degenerate_block(
    theorem: &'static str,
    inst: &PairInstance,
) -> Result<DegenerateContext> {
    check_mu(theorem, inst.mu)?;
    hypothesis(theorem, "zero_in_s", inst.s.contains(0))?;
    hypothesis(theorem, "s_generating", inst.s.is_generating())?;
    match is_degenerate(&inst.s) {
        Ok(Some(_)) => {}
        Ok(None) => return Err(Error::Hypothesis { theorem, clause: "s_degenerate".into() }),
        Err(Error::NotSeparable) => {
            return Err(Error::Hypothesis { theorem, clause: "s_2_separable".into() })
        }
        Err(e) => return Err(e),
    }
    let hyper = hyper_atom(&inst.s)?;
    let (ss, tt) = (inst.s.cardinality(), inst.t.cardinality());
    hypothesis(theorem, "s_size", ss + inst.mu >= 3)?;
    hypothesis(theorem, "t_size", tt >= ss.max(4 - 2 * inst.mu))?;
    let sum = check_sum_deficit(theorem, inst)?;
    hypothesis(theorem, "sum_bound_two_thirds", 3 * sum.cardinality() <= 2 * inst.group.order() + 2 * inst.mu)?;
    Ok(DegenerateContext { hyper })
}

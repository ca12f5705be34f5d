use std::fmt;

use serde::{Deserialize, Serialize};

use super::atlas::SpecialMinimalAtlas;
use super::diffeo::{compose_diffeo, flip, psi, DiffeoJson, DiffeoL, OriginAction};
use crate::cosets::{classify_wa_pair, Cell, PairClassification, WitnessKind};
use crate::exact::Real;
use crate::germs::{
    compose, inverse_smoothness, invert, make_wa, smoothness_at_zero, Germ, GermMap, Order, SmoothnessReport,
};
use crate::Result;

/// Three-valued answer: numeric evidence can confirm but never refute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// Whether `P_h` and `P_g` define the same structure, with the evidence:
/// the `C^k` reports of `q = g ∘ h⁻¹` and of `q⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureAnswer {
    pub verdict: Verdict,
    pub k: Order,
    pub exact: bool,
    pub transition: Option<Germ>,
    pub forward: SmoothnessReport,
    pub inverse: SmoothnessReport,
}

impl StructureAnswer {
    /// The first failing report, if any.
    pub fn obstruction(&self) -> Option<&SmoothnessReport> {
        [&self.forward, &self.inverse].into_iter().find(|r| !r.is_diffeo)
    }
}

/// `P_h` and `P_g` define the same `C^k` structure iff `g ∘ h⁻¹ ∈ Diff^k(R,0)`.
pub fn same_structure(h: &GermMap, g: &GermMap, k: Order) -> Result<StructureAnswer> {
    let q = compose(g, &invert(h));
    let forward = smoothness_at_zero(&q, k)?;
    let inverse = inverse_smoothness(&q, k)?;
    let pass = forward.is_diffeo && inverse.is_diffeo;
    // an exact failing report refutes; a numeric one only fails to confirm
    let refuted = (!forward.is_diffeo && forward.exact) || (!inverse.is_diffeo && inverse.exact);
    let verdict = if pass {
        Verdict::True
    } else if refuted {
        Verdict::False
    } else {
        Verdict::Indeterminate
    };
    Ok(StructureAnswer {
        verdict,
        k,
        exact: forward.exact && inverse.exact,
        transition: q.as_exact().cloned(),
        forward,
        inverse,
    })
}

/// `{"special_atlas": {"h": <germ>}, "k": 2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub special_atlas: SpecialAtlasSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Order>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialAtlasSpec {
    pub h: Germ,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub cell: Cell,
    pub kind: WitnessKind,
    pub diffeo: DiffeoL,
}

/// Emptiness pattern for `W_a → W_b` plus a certified diffeomorphism in
/// every nonempty cell.
#[derive(Clone, Debug)]
pub struct DiffeoClasses {
    pub classification: PairClassification,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub cell: Cell,
    pub kind: WitnessKind,
    #[serde(flatten)]
    pub diffeo: DiffeoJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassesJson {
    #[serde(flatten)]
    pub classification: PairClassification,
    pub witnesses: Vec<WitnessJson>,
}

impl DiffeoClasses {
    pub fn to_json(&self) -> ClassesJson {
        ClassesJson {
            classification: self.classification.clone(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    cell: w.cell,
                    kind: w.kind,
                    diffeo: w.diffeo.to_json(),
                })
                .collect(),
        }
    }
}

fn witness(kind: WitnessKind, a: f64, b: f64, k: Order) -> Result<DiffeoL> {
    let source = SpecialMinimalAtlas::new(make_wa(a)?);
    let target = SpecialMinimalAtlas::new(make_wa(b)?);
    let minus = Germ::linear(-1.0)?;
    match kind {
        WitnessKind::Identity => DiffeoL::new(Germ::identity(), OriginAction::Fix, source, target, k),
        WitnessKind::Flip => DiffeoL::new(minus, OriginAction::Fix, source, target, k),
        WitnessKind::Swap => DiffeoL::new(Germ::identity(), OriginAction::Exchange, source, target, k),
        WitnessKind::SwapFlip => DiffeoL::new(minus, OriginAction::Exchange, source, target, k),
        WitnessKind::Psi => {
            let p = psi(a, k)?;
            DiffeoL::new(p.restriction().clone(), OriginAction::Exchange, source, target, k)
        }
        WitnessKind::FlipPsi => {
            let c = compose_diffeo(&flip(a, k)?, &psi(a, k)?)?;
            DiffeoL::new(c.restriction().clone(), OriginAction::Exchange, source, target, k)
        }
    }
}

/// Classification of `W_a → W_b` with witnesses, each certified in both
/// chart presentations at order `k`.
pub fn diffeo_classes(a: &Real, b: &Real, k: Order) -> Result<DiffeoClasses> {
    let classification = classify_wa_pair(a, b, k)?;
    let mut witnesses = Vec::new();
    for (&cell, &kind) in &classification.witness_kinds {
        let diffeo = witness(kind, a.value(), b.value(), k)?;
        debug_assert_eq!(Cell::from_parts(diffeo.origin_action() == OriginAction::Exchange, diffeo.orientation()), cell);
        witnesses.push(Witness { cell, kind, diffeo });
    }
    Ok(DiffeoClasses {
        classification,
        witnesses,
    })
}

use std::fmt;

use serde::{Deserialize, Serialize};

use super::atlas::{PointL, SpecialMinimalAtlas};
use crate::exact::REAL_TOL;
use crate::germs::{
    compose, inverse_smoothness, invert, smoothness_at_zero, Germ, GermMap, Order, Orientation,
    SideExpansion, SmoothnessReport,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginAction {
    Fix,
    Exchange,
}

impl OriginAction {
    pub fn then(self, other: OriginAction) -> OriginAction {
        if self == other {
            OriginAction::Fix
        } else {
            OriginAction::Exchange
        }
    }
}

/// Maximal deviation of two germs at the shared sample points, and whether
/// they agree (term lists for exact germs, samples otherwise).
pub(crate) fn germ_agreement(x: &GermMap, y: &GermMap) -> (bool, f64) {
    let deviation = super::sample_points()
        .iter()
        .map(|&t| (x.eval(t) - y.eval(t)).abs() / t.abs().max(1.0))
        .fold(0.0, f64::max);
    let equal = match (x.as_exact(), y.as_exact()) {
        (Some(a), Some(b)) => a.approx_eq(b, REAL_TOL),
        _ => deviation <= REAL_TOL,
    };
    (equal, deviation)
}

fn min_order(a: Order, b: Order) -> Order {
    match (a, b) {
        (Order::Finite(x), Order::Finite(y)) => Order::Finite(x.min(y)),
        (Order::Finite(x), Order::Infinite) | (Order::Infinite, Order::Finite(x)) => Order::Finite(x),
        (Order::Infinite, Order::Infinite) => Order::Infinite,
    }
}

/// A `C^k` diffeomorphism between the structures of two special minimal
/// atlases.
///
/// It is stored as its restriction to `R ∖ 0` (a germ fixing `0` after
/// 0-extension) plus whether it fixes or exchanges the origins. Both chart
/// presentations are certified to lie in `Diff^k(R,0)` on construction.
#[derive(Clone, Debug)]
pub struct DiffeoL {
    restriction: GermMap,
    origin_action: OriginAction,
    source: SpecialMinimalAtlas,
    target: SpecialMinimalAtlas,
    k: Order,
    a: GermMap,
    b: GermMap,
    a_report: SmoothnessReport,
    b_report: SmoothnessReport,
}

/// The `U`- and `V`-source presentations of a map with restriction `r`.
///
/// Fixing: `a = r`, `b = h_t ∘ r ∘ h_s⁻¹`. Exchanging: `a = h_t ∘ r`,
/// `b = r ∘ h_s⁻¹`.
fn presentations(
    r: &GermMap,
    action: OriginAction,
    source: &SpecialMinimalAtlas,
    target: &SpecialMinimalAtlas,
) -> (GermMap, GermMap) {
    let hs_inv = invert(source.h());
    match action {
        OriginAction::Fix => (r.clone(), compose(target.h(), &compose(r, &hs_inv))),
        OriginAction::Exchange => (compose(target.h(), r), compose(r, &hs_inv)),
    }
}

fn certify(p: &GermMap, k: Order, which: &str) -> Result<SmoothnessReport> {
    let fwd = smoothness_at_zero(p, k)?;
    let inv = inverse_smoothness(p, k)?;
    if fwd.is_diffeo && inv.is_diffeo {
        return Ok(fwd);
    }
    let failing = if fwd.is_diffeo { &inv } else { &fwd };
    let msg = format!("{which} presentation is not in Diff^{k}: {failing}");
    if p.is_exact() {
        Err(Error::domain(msg))
    } else {
        Err(Error::Indeterminate(msg))
    }
}

impl DiffeoL {
    pub fn new(
        restriction: impl Into<GermMap>,
        origin_action: OriginAction,
        source: SpecialMinimalAtlas,
        target: SpecialMinimalAtlas,
        k: Order,
    ) -> Result<Self> {
        let restriction = restriction.into();
        let (a, b) = presentations(&restriction, origin_action, &source, &target);
        let a_report = certify(&a, k, "U-chart")?;
        let b_report = certify(&b, k, "V-chart")?;
        Ok(DiffeoL {
            restriction,
            origin_action,
            source,
            target,
            k,
            a,
            b,
            a_report,
            b_report,
        })
    }

    /// The identity of the structure of `P_h`.
    pub fn identity(atlas: SpecialMinimalAtlas, k: Order) -> Result<Self> {
        DiffeoL::new(Germ::identity(), OriginAction::Fix, atlas.clone(), atlas, k)
    }

    pub fn restriction(&self) -> &GermMap {
        &self.restriction
    }

    pub fn origin_action(&self) -> OriginAction {
        self.origin_action
    }

    pub fn orientation(&self) -> Orientation {
        self.restriction.orientation()
    }

    pub fn source(&self) -> &SpecialMinimalAtlas {
        &self.source
    }

    pub fn target(&self) -> &SpecialMinimalAtlas {
        &self.target
    }

    pub fn k(&self) -> Order {
        self.k
    }

    /// Presentation with respect to the `U`-chart of the source.
    pub fn u_presentation(&self) -> &GermMap {
        &self.a
    }

    /// Presentation with respect to the `V`-chart of the source.
    pub fn v_presentation(&self) -> &GermMap {
        &self.b
    }

    pub fn reports(&self) -> (&SmoothnessReport, &SmoothnessReport) {
        (&self.a_report, &self.b_report)
    }

    pub fn is_identity(&self) -> bool {
        self.origin_action == OriginAction::Fix
            && germ_agreement(&self.restriction, &GermMap::Exact(Germ::identity())).0
    }

    /// Image of a point of the line with two origins.
    pub fn apply(&self, p: PointL) -> PointL {
        match (p, self.origin_action) {
            (PointL::Real(x), _) if x != 0.0 => PointL::Real(self.restriction.eval(x)),
            (PointL::Real(_), OriginAction::Fix) | (PointL::OriginTilde, OriginAction::Exchange) => {
                PointL::Real(0.0)
            }
            _ => PointL::OriginTilde,
        }
    }

    pub fn to_json(&self) -> DiffeoJson {
        DiffeoJson {
            restriction: self.restriction.as_exact().cloned(),
            origin_action: self.origin_action,
            orientation: self.orientation(),
            u_presentation: self.a.as_exact().cloned(),
            v_presentation: self.b.as_exact().cloned(),
        }
    }
}

impl fmt::Display for DiffeoL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.origin_action {
            OriginAction::Fix => "fixes the origins",
            OriginAction::Exchange => "exchanges the origins",
        };
        match self.restriction.as_exact() {
            Some(g) => write!(f, "{g}, {action}"),
            None => write!(f, "numeric {:?} map, {action}", self.orientation()),
        }
    }
}

/// Serialized form; exact germs only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffeoJson {
    pub restriction: Option<Germ>,
    pub origin_action: OriginAction,
    pub orientation: Orientation,
    pub u_presentation: Option<Germ>,
    pub v_presentation: Option<Germ>,
}

/// The diffeomorphism with `U`-presentation `a` and `V`-presentation `b`.
///
/// Requires `b = h_t ∘ a ∘ h_s⁻¹` when fixing the origins and
/// `b = h_t⁻¹ ∘ a ∘ h_s⁻¹` when exchanging them.
pub fn build_diffeo(
    a: &GermMap,
    b: &GermMap,
    source: &SpecialMinimalAtlas,
    target: &SpecialMinimalAtlas,
    origin_action: OriginAction,
    k: Order,
) -> Result<DiffeoL> {
    let hs_inv = invert(source.h());
    let (restriction, expected) = match origin_action {
        OriginAction::Fix => (a.clone(), compose(target.h(), &compose(a, &hs_inv))),
        OriginAction::Exchange => {
            let r = compose(&invert(target.h()), a);
            let e = compose(&r, &hs_inv);
            (r, e)
        }
    };
    let (equal, deviation) = germ_agreement(b, &expected);
    if !equal {
        let residual = compose(&invert(b), &expected);
        let residual = match residual.as_exact() {
            Some(g) => g.to_string(),
            None => format!("expected {}", describe(&expected)),
        };
        return Err(Error::IncompatiblePresentations { residual, deviation });
    }
    DiffeoL::new(restriction, origin_action, source.clone(), target.clone(), k)
}

fn describe(g: &GermMap) -> String {
    match g.as_exact() {
        Some(g) => g.to_string(),
        None => "a numeric germ".to_string(),
    }
}

/// `V`-chart presentation of an origin-fixing diffeomorphism.
pub fn phi_fix(d: &DiffeoL) -> Result<GermMap> {
    if d.origin_action != OriginAction::Fix {
        return Err(Error::domain("phi_fix needs a diffeomorphism fixing the origins"));
    }
    Ok(d.b.clone())
}

/// `V`-chart presentation of an origin-exchanging diffeomorphism.
pub fn phi_ex(d: &DiffeoL) -> Result<GermMap> {
    if d.origin_action != OriginAction::Exchange {
        return Err(Error::domain("phi_ex needs a diffeomorphism exchanging the origins"));
    }
    Ok(d.b.clone())
}

/// `outer ∘ inner`.
pub fn compose_diffeo(outer: &DiffeoL, inner: &DiffeoL) -> Result<DiffeoL> {
    if !inner.target.same_as(&outer.source, REAL_TOL) {
        return Err(Error::domain("target of the inner map is not the source of the outer map"));
    }
    DiffeoL::new(
        compose(&outer.restriction, &inner.restriction),
        inner.origin_action.then(outer.origin_action),
        inner.source.clone(),
        outer.target.clone(),
        min_order(outer.k, inner.k),
    )
}

/// The order-two self-diffeomorphism `ψ` of the structure of `w_a`:
/// `x ↦ -x/√a` for `x < 0`, `x ↦ -x√a` for `x > 0`, exchanging the origins.
pub fn psi(a: f64, k: Order) -> Result<DiffeoL> {
    let wa = crate::germs::make_wa(a)?;
    let s = a.sqrt();
    let r = Germ::new(SideExpansion::monomial(1.0 / s, 1.0)?, SideExpansion::monomial(-s, 1.0)?)?;
    let p = SpecialMinimalAtlas::new(wa);
    DiffeoL::new(r, OriginAction::Exchange, p.clone(), p, k)
}

/// `x ↦ -x`, fixing the origins, from the structure of `w_a` to that of
/// `w_{1/a}`.
pub fn flip(a: f64, k: Order) -> Result<DiffeoL> {
    let source = SpecialMinimalAtlas::new(crate::germs::make_wa(a)?);
    let target = SpecialMinimalAtlas::new(crate::germs::make_wa(1.0 / a)?);
    DiffeoL::new(Germ::linear(-1.0)?, OriginAction::Fix, source, target, k)
}

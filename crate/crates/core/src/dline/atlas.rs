use serde::{Deserialize, Serialize};

use crate::germs::{compose, invert, Germ, GermMap, Orientation};
use crate::{Error, Result};

/// A point of the line with two origins: a real number (with `0` the first
/// origin) or the second origin `0̃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointL {
    Real(f64),
    OriginTilde,
}

impl PointL {
    pub fn is_origin(&self) -> bool {
        matches!(self, PointL::Real(x) if *x == 0.0) || matches!(self, PointL::OriginTilde)
    }
}

/// Intersection of the closures of all neighbourhoods of `p`.
///
/// Every neighbourhood of one origin meets every neighbourhood of the other,
/// so the two origins share their closure; all other points are closed.
pub fn hausdorff_closure(p: PointL) -> Vec<PointL> {
    if p.is_origin() {
        vec![PointL::Real(0.0), PointL::OriginTilde]
    } else {
        vec![p]
    }
}

/// `U = L ∖ {0̃}` or `V = L ∖ {0}`; both are identified with `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartDomain {
    U,
    V,
}

/// A chart of a minimal atlas: a homeomorphism of its domain onto `R` sending
/// the domain's origin to `0`, given in the natural coordinate.
#[derive(Clone, Debug)]
pub struct ChartL {
    pub domain: ChartDomain,
    pub map: GermMap,
}

impl ChartL {
    pub fn new(domain: ChartDomain, map: impl Into<GermMap>) -> Self {
        ChartL { domain, map: map.into() }
    }

    pub fn orientation(&self) -> Orientation {
        self.map.orientation()
    }
}

/// A two-chart atlas `{(U, u), (V, v)}`.
#[derive(Clone, Debug)]
pub struct MinimalAtlas {
    u: ChartL,
    v: ChartL,
}

impl MinimalAtlas {
    pub fn new(u: ChartL, v: ChartL) -> Result<Self> {
        if u.domain != ChartDomain::U || v.domain != ChartDomain::V {
            return Err(Error::InvalidAtlas("charts must be over U and V respectively".into()));
        }
        Ok(MinimalAtlas { u, v })
    }

    pub fn u(&self) -> &ChartL {
        &self.u
    }

    pub fn v(&self) -> &ChartL {
        &self.v
    }
}

/// The atlas `P_h = {(U, id), (V, h)}`.
#[derive(Clone, Debug)]
pub struct SpecialMinimalAtlas {
    h: GermMap,
}

impl SpecialMinimalAtlas {
    pub fn new(h: impl Into<GermMap>) -> Self {
        SpecialMinimalAtlas { h: h.into() }
    }

    pub fn h(&self) -> &GermMap {
        &self.h
    }

    pub fn to_minimal(&self) -> MinimalAtlas {
        MinimalAtlas {
            u: ChartL::new(ChartDomain::U, Germ::identity()),
            v: ChartL::new(ChartDomain::V, self.h.clone()),
        }
    }

    /// Same transition map, to `tol` on term lists for exact germs and at
    /// sample points otherwise.
    pub fn same_as(&self, other: &SpecialMinimalAtlas, tol: f64) -> bool {
        match (self.h.as_exact(), other.h.as_exact()) {
            (Some(x), Some(y)) => x.approx_eq(y, tol),
            _ => super::sample_points()
                .iter()
                .all(|&x| (self.h.eval(x) - other.h.eval(x)).abs() <= tol * x.abs().max(1.0)),
        }
    }
}

/// The 0-extension of `v ∘ u⁻¹`.
pub fn transition_extension(atlas: &MinimalAtlas) -> GermMap {
    compose(&atlas.v.map, &invert(&atlas.u.map))
}

/// The transition of `P_h`, which is `h` itself.
pub fn special_transition(atlas: &SpecialMinimalAtlas) -> GermMap {
    atlas.h.clone()
}

/// The transition map preserves orientation.
pub fn is_orientable(atlas: &MinimalAtlas) -> bool {
    transition_extension(atlas).orientation() == Orientation::Preserving
}

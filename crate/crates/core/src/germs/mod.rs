//! Homeomorphism germs of `R` fixing `0` and their jets.
//!
//! Exact germs carry a finite power sum per side. Composition stays exact
//! while the result is again a finite power sum; otherwise the result is a
//! [`NumericGerm`] and [`GermMap::provenance`] records why.

mod expansion;
mod germ;
mod jet;
mod numeric;

pub use expansion::{PowerTerm, SideExpansion};
pub use germ::{Germ, Orientation, Side};
pub use jet::{
    fixed_near_zero, in_diff, in_jdiff, inverse_smoothness, one_sided_jet, reversion, sandwich_smoothness, smoothness_at_zero, Jet,
    Obstruction, ObstructionKind, SmoothnessReport, NUMERIC_MAX_ORDER,
};
pub use numeric::NumericGerm;

use crate::{Error, Result};

/// Largest jet order computed; `Order::Infinite` is evaluated here.
pub const K_MAX: usize = 12;

/// Differentiability order `k ∈ {1, 2, ..., ∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl Order {
    /// The order actually computed, and whether `∞` was capped to `K_MAX`.
    pub fn resolve(self) -> Result<(usize, bool)> {
        match self {
            Order::Finite(0) => Err(Error::domain("order must be at least 1")),
            Order::Finite(k) if k > K_MAX => Err(Error::domain(format!("order {k} exceeds the cap {K_MAX}"))),
            Order::Finite(k) => Ok((k, false)),
            Order::Infinite => Ok((K_MAX, true)),
        }
    }
}

impl From<usize> for Order {
    fn from(k: usize) -> Self {
        Order::Finite(k)
    }
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Order::Infinite),
            t => t
                .parse::<usize>()
                .map(Order::Finite)
                .map_err(|_| Error::Input(format!("not an order: {s:?}"))),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl serde::Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(k) => s.serialize_u64(*k as u64),
            Order::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Order {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Ok(Order::Finite(k)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// How a [`GermMap`] came to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    /// Exact composition was not closed in power sums.
    ComposedNumerically,
    /// No closed-form inverse for a non-monomial side.
    InvertedNumerically,
    /// Built from samples or a user callable.
    Sampled,
}

/// Either an exact power-sum germ or a numeric one.
#[derive(Clone, Debug)]
pub enum GermMap {
    Exact(Germ),
    Numeric(NumericGerm, Provenance),
}

impl From<Germ> for GermMap {
    fn from(g: Germ) -> Self {
        GermMap::Exact(g)
    }
}

impl From<NumericGerm> for GermMap {
    fn from(g: NumericGerm) -> Self {
        GermMap::Numeric(g, Provenance::Sampled)
    }
}

impl GermMap {
    pub fn provenance(&self) -> Provenance {
        match self {
            GermMap::Exact(_) => Provenance::Exact,
            GermMap::Numeric(_, p) => *p,
        }
    }

    pub fn as_exact(&self) -> Option<&Germ> {
        match self {
            GermMap::Exact(g) => Some(g),
            GermMap::Numeric(..) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.as_exact().is_some()
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            GermMap::Exact(g) => g.orientation(),
            GermMap::Numeric(g, _) => g.orientation(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            GermMap::Exact(g) => g.eval(x),
            GermMap::Numeric(g, _) => g.eval(x),
        }
    }

    /// The germ as a callable, regardless of representation.
    pub fn to_numeric(&self) -> NumericGerm {
        match self {
            GermMap::Exact(g) => {
                let g = g.clone();
                let o = g.orientation();
                NumericGerm::from_fn(move |x| g.eval(x), o)
            }
            GermMap::Numeric(g, _) => g.clone(),
        }
    }
}

/// `g ∘ h`.
pub fn compose(g: &GermMap, h: &GermMap) -> GermMap {
    if let (GermMap::Exact(ge), GermMap::Exact(he)) = (g, h) {
        if let Some(Ok(c)) = ge.compose_exact(he) {
            return GermMap::Exact(c);
        }
    }
    let provenance = match (g.provenance(), h.provenance()) {
        (Provenance::Exact, Provenance::Exact) => Provenance::ComposedNumerically,
        (Provenance::Exact, p) | (p, _) => p,
    };
    GermMap::Numeric(g.to_numeric().compose(&h.to_numeric()), provenance)
}

/// Group inverse.
pub fn invert(h: &GermMap) -> GermMap {
    match h {
        GermMap::Exact(g) => match g.invert_exact() {
            Some(inv) => GermMap::Exact(inv),
            None => GermMap::Numeric(h.to_numeric().invert(), Provenance::InvertedNumerically),
        },
        GermMap::Numeric(g, p) => GermMap::Numeric(g.invert(), *p),
    }
}

/// `h(x)`; exactly `0` at `x = 0`.
pub fn evaluate(h: &GermMap, x: f64) -> f64 {
    h.eval(x)
}

/// The homeomorphism `w_a`: identity for `x ≤ 0`, `x ↦ ax` for `x > 0`.
pub fn make_wa(a: f64) -> Result<Germ> {
    Germ::wa(a)
}

use std::fmt;

use serde::{Deserialize, Serialize};

use super::expansion::{PowerTerm, SideExpansion};
use crate::exact::REAL_TOL;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Preserving => 1,
            Orientation::Reversing => -1,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s > 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }

    pub fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Orientation::Preserving => '+',
            Orientation::Reversing => '-',
        }
    }
}

/// Which half-line a one-sided quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Neg,
    Pos,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Neg => -1.0,
            Side::Pos => 1.0,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Neg => Side::Pos,
            Side::Pos => Side::Neg,
        }
    }
}

/// A homeomorphism germ of `R` at `0` given by one power sum per side.
///
/// `h(x) = neg(-x)` for `x < 0`, `h(0) = 0`, `h(x) = pos(x)` for `x > 0`.
/// The leading coefficients carry the signs: preserving germs have a
/// negative leading coefficient on `neg` and a positive one on `pos`,
/// reversing germs the opposite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GermRepr", into = "GermRepr")]
pub struct Germ {
    neg: SideExpansion,
    pos: SideExpansion,
    orientation: Orientation,
}

#[derive(Serialize, Deserialize)]
struct GermRepr {
    neg: SideExpansion,
    pos: SideExpansion,
    orientation: Orientation,
}

impl TryFrom<GermRepr> for Germ {
    type Error = Error;

    fn try_from(r: GermRepr) -> Result<Self> {
        Germ::with_orientation(r.neg, r.pos, r.orientation)
    }
}

impl From<Germ> for GermRepr {
    fn from(g: Germ) -> Self {
        GermRepr {
            neg: g.neg,
            pos: g.pos,
            orientation: g.orientation,
        }
    }
}

impl Germ {
    /// Builds a germ, inferring the orientation from the positive side.
    pub fn new(neg: SideExpansion, pos: SideExpansion) -> Result<Self> {
        let orientation = Orientation::from_sign(pos.sign());
        Self::with_orientation(neg, pos, orientation)
    }

    pub fn with_orientation(neg: SideExpansion, pos: SideExpansion, orientation: Orientation) -> Result<Self> {
        let expected = orientation.sign() as f64;
        if pos.sign() != expected || neg.sign() != -expected {
            return Err(Error::domain(format!(
                "not a bijection near 0: leading coefficients neg {} / pos {} do not match {:?} orientation",
                neg.leading().coeff,
                pos.leading().coeff,
                orientation
            )));
        }
        Ok(Germ { neg, pos, orientation })
    }

    pub fn identity() -> Self {
        Self::linear(1.0).expect("identity is valid")
    }

    /// `x ↦ c·x` on both sides.
    pub fn linear(c: f64) -> Result<Self> {
        Germ::new(SideExpansion::monomial(-c, 1.0)?, SideExpansion::monomial(c, 1.0)?)
    }

    /// `x ↦ x` for `x ≤ 0`, `x ↦ a·x` for `x > 0`.
    pub fn wa(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::domain(format!("w_a needs a > 0, got {a}")));
        }
        Germ::new(SideExpansion::monomial(-1.0, 1.0)?, SideExpansion::monomial(a, 1.0)?)
    }

    /// Two-sided monomials `x ↦ -α(-x)^s` (x<0), `x ↦ βx^t` (x>0) and
    /// their sign-flipped variants; `alpha_neg` is the signed coefficient on
    /// the negative side.
    pub fn power(alpha_neg: f64, s: f64, beta_pos: f64, t: f64) -> Result<Self> {
        Germ::new(SideExpansion::monomial(alpha_neg, s)?, SideExpansion::monomial(beta_pos, t)?)
    }

    /// The same polynomial `Σ_{j≥1} p_j x^j` on both sides; `coeffs[0]` is `p_1`.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let j = (i + 1) as f64;
            pos.push(PowerTerm::new(c, j)?);
            let parity = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            neg.push(PowerTerm::new(c * parity, j)?);
        }
        Germ::new(SideExpansion::new(neg)?, SideExpansion::new(pos)?)
    }

    pub fn neg(&self) -> &SideExpansion {
        &self.neg
    }

    pub fn pos(&self) -> &SideExpansion {
        &self.pos
    }

    pub fn side(&self, side: Side) -> &SideExpansion {
        match side {
            Side::Neg => &self.neg,
            Side::Pos => &self.pos,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_monomial(&self) -> bool {
        self.neg.is_monomial() && self.pos.is_monomial()
    }

    pub fn all_integer(&self) -> bool {
        self.neg.all_integer() && self.pos.all_integer()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.neg.eval(-x)
        } else if x > 0.0 {
            self.pos.eval(x)
        } else {
            0.0
        }
    }

    /// `self ∘ inner` when closed in power sums; `None` otherwise.
    pub fn compose_exact(&self, inner: &Germ) -> Option<Result<Germ>> {
        let route = |side: &SideExpansion| {
            if side.sign() > 0.0 {
                self.pos.compose_positive(side)
            } else {
                self.neg.compose_positive(&side.scaled(-1.0))
            }
        };
        let neg = route(&inner.neg)?;
        let pos = route(&inner.pos)?;
        let orientation = self.orientation.compose(inner.orientation);
        Some(neg.and_then(|n| pos.and_then(|p| Germ::with_orientation(n, p, orientation))))
    }

    /// Exact inverse for per-side monomials; `None` otherwise.
    pub fn invert_exact(&self) -> Option<Germ> {
        if !self.is_monomial() {
            return None;
        }
        let inverse_side = |target: Side| {
            let source = match self.orientation {
                Orientation::Preserving => target,
                Orientation::Reversing => target.other(),
            };
            let PowerTerm { coeff, exponent } = self.side(source).leading();
            SideExpansion::monomial(source.sign() * coeff.abs().powf(-1.0 / exponent), 1.0 / exponent)
        };
        let neg = inverse_side(Side::Neg).ok()?;
        let pos = inverse_side(Side::Pos).ok()?;
        Germ::with_orientation(neg, pos, self.orientation).ok()
    }

    /// Term-list equality with absolute coefficient tolerance `tol`.
    pub fn approx_eq(&self, other: &Germ, tol: f64) -> bool {
        self.orientation == other.orientation
            && self.neg.approx_eq(&other.neg, tol)
            && self.pos.approx_eq(&other.pos, tol)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Germ::identity(), REAL_TOL)
    }
}

fn render_neg(side: &SideExpansion) -> String {
    // integer powers read better as powers of x
    let mut s = String::new();
    for (i, t) in side.terms().iter().enumerate() {
        let (c, body) = match t.integer_exponent() {
            Some(n) => {
                let c = if n % 2 == 0 { t.coeff } else { -t.coeff };
                (c, if n == 1 { "x".to_string() } else { format!("x^{n}") })
            }
            None => (t.coeff, format!("(-x)^{}", t.exponent)),
        };
        if i == 0 {
            if c < 0.0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0.0 { " - " } else { " + " });
        }
        if c.abs() != 1.0 {
            s.push_str(&format!("{}", c.abs()));
        }
        s.push_str(&body);
    }
    s
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x<0: {}; x>0: {} ({})",
            render_neg(&self.neg),
            self.pos.render("x"),
            match self.orientation {
                Orientation::Preserving => "preserving",
                Orientation::Reversing => "reversing",
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wa_matches_its_definition() {
        let w = Germ::wa(2.0).unwrap();
        assert_eq!(w.eval(-3.0), -3.0);
        assert_eq!(w.eval(3.0), 6.0);
        assert_eq!(w.eval(0.0), 0.0);
        assert_eq!(w.neg().terms(), &[PowerTerm { coeff: -1.0, exponent: 1.0 }]);
        assert_eq!(w.pos().terms(), &[PowerTerm { coeff: 2.0, exponent: 1.0 }]);
        assert!(Germ::wa(1.0).unwrap().is_identity());
        assert!(Germ::wa(0.0).is_err());
        assert!(Germ::wa(-1.0).is_err());
    }

    #[test]
    fn same_sign_sides_are_rejected() {
        // alpha, beta of the same sign with the naive (-x)^s convention is not a bijection
        assert!(Germ::power(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(Germ::power(-1.0, 2.0, 2.0, 0.5).is_ok());
        assert!(Germ::polynomial(&[0.0, 1.0]).is_err());
        assert!(Germ::polynomial(&[0.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn linear_pieces_multiply() {
        let w6 = Germ::wa(2.0).unwrap().compose_exact(&Germ::wa(3.0).unwrap()).unwrap().unwrap();
        assert!(w6.approx_eq(&Germ::wa(6.0).unwrap(), 1e-12));
    }

    #[test]
    fn inverse_of_cubic_side() {
        let h = Germ::power(-1.0, 1.0, 2.0, 3.0).unwrap();
        let inv = h.invert_exact().unwrap();
        let p = inv.pos().leading();
        assert!((p.exponent - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.coeff - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
        for x in [0.1, 0.5, 2.0, -0.3] {
            assert!((h.eval(inv.eval(x)) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn reversing_inverse_routes_sides() {
        let h = Germ::power(3.0, 2.0, -0.5, 1.0).unwrap();
        assert_eq!(h.orientation(), Orientation::Reversing);
        let inv = h.invert_exact().unwrap();
        for x in [-2.0, -0.1, 0.1, 1.5] {
            assert!((inv.eval(h.eval(x)) - x).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn json_shape() {
        let w = Germ::wa(2.0).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"neg":[{"c":-1.0,"e":1.0}],"pos":[{"c":2.0,"e":1.0}],"orientation":"preserving"}"#);
        let back: Germ = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        let bad = r#"{"neg":[{"c":1.0,"e":1.0}],"pos":[{"c":2.0,"e":1.0}],"orientation":"preserving"}"#;
        assert!(serde_json::from_str::<Germ>(bad).is_err());
    }

    #[test]
    fn display_uses_x() {
        let f = Germ::polynomial(&[1.0, 1.0]).unwrap();
        assert_eq!(f.to_string(), "x<0: x + x^2; x>0: x + x^2 (preserving)");
    }
}

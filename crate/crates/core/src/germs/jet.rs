use std::fmt;

use serde::{Deserialize, Serialize};

use super::germ::{Germ, Orientation, Side};
use super::{invert, GermMap, Order};
use crate::exact::REAL_TOL;
use crate::numdiff::{one_sided_derivative_full, Direction, RichardsonConfig};
use crate::{Error, Result};

/// Finite-difference jets are not attempted beyond this order.
pub const NUMERIC_MAX_ORDER: usize = 4;

/// Relative convergence threshold deciding whether a numeric derivative exists.
const NUMERIC_EXISTENCE_TOL: f64 = 1e-3;

/// Relative agreement tolerance for numeric jet coefficients, by order.
const NUMERIC_EQ_TOL: [f64; NUMERIC_MAX_ORDER] = [1e-6, 1e-5, 1e-3, 1e-2];

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// One-sided derivatives at `0` of orders `1..=order`, per side.
///
/// `None` marks a derivative that does not exist; once a side has a `None`,
/// every later entry on that side is `None` too.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    order: usize,
    neg: Vec<Option<f64>>,
    pos: Vec<Option<f64>>,
    #[serde(default)]
    exact: bool,
}

fn close_prefix(mut v: Vec<Option<f64>>) -> Vec<Option<f64>> {
    if let Some(i) = v.iter().position(Option::is_none) {
        v[i..].iter_mut().for_each(|c| *c = None);
    }
    v
}

impl Jet {
    pub fn new(neg: Vec<Option<f64>>, pos: Vec<Option<f64>>) -> Result<Self> {
        if neg.len() != pos.len() || neg.is_empty() {
            return Err(Error::domain("jet sides must have the same nonzero length"));
        }
        Ok(Jet {
            order: neg.len(),
            neg: close_prefix(neg),
            pos: close_prefix(pos),
            exact: true,
        })
    }

    /// The jet of a function that is `C^n` at `0` with these derivatives.
    pub fn two_sided(derivs: &[f64]) -> Result<Self> {
        let v: Vec<Option<f64>> = derivs.iter().copied().map(Some).collect();
        Jet::new(v.clone(), v)
    }

    /// Jet of `h` through order `k` (numeric germs stop at [`NUMERIC_MAX_ORDER`]).
    pub fn of(h: &GermMap, k: usize) -> Result<Self> {
        match h {
            GermMap::Exact(g) => Ok(Jet {
                order: k,
                neg: exact_side(g, Side::Neg, k),
                pos: exact_side(g, Side::Pos, k),
                exact: true,
            }),
            GermMap::Numeric(..) => {
                let k = k.min(NUMERIC_MAX_ORDER);
                Ok(Jet {
                    order: k,
                    neg: numeric_side(&|x| h.eval(x), Side::Neg, k),
                    pos: numeric_side(&|x| h.eval(x), Side::Pos, k),
                    exact: false,
                })
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn neg(&self) -> &[Option<f64>] {
        &self.neg
    }

    pub fn pos(&self) -> &[Option<f64>] {
        &self.pos
    }

    pub fn side(&self, side: Side) -> &[Option<f64>] {
        match side {
            Side::Neg => &self.neg,
            Side::Pos => &self.pos,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn agree(&self, j: usize, x: f64, y: f64) -> bool {
        if self.exact {
            (x - y).abs() <= REAL_TOL
        } else {
            (x - y).abs() <= NUMERIC_EQ_TOL[j - 1] * x.abs().max(y.abs()).max(1.0)
        }
    }

    fn is_zero(&self, j: usize, x: f64) -> bool {
        self.agree(j, x, 0.0)
    }
}

fn exact_side(g: &Germ, side: Side, k: usize) -> Vec<Option<f64>> {
    let terms = g.side(side).terms();
    (1..=k)
        .map(|j| {
            let jf = j as f64;
            let blocked = terms
                .iter()
                .any(|t| t.integer_exponent().is_none() && t.exponent < jf);
            if blocked {
                return None;
            }
            let c = terms
                .iter()
                .find(|t| t.integer_exponent() == Some(j as u32))
                .map_or(0.0, |t| t.coeff);
            // h(x) = c(-x)^j on the negative side
            let sign = if side == Side::Neg && j % 2 == 1 { -1.0 } else { 1.0 };
            Some(sign * c * factorial(j))
        })
        .collect()
}

fn numeric_side<F: Fn(f64) -> f64>(f: &F, side: Side, k: usize) -> Vec<Option<f64>> {
    let dir = match side {
        Side::Neg => Direction::Backward,
        Side::Pos => Direction::Forward,
    };
    let out = (1..=k)
        .map(|j| {
            let est = one_sided_derivative_full(f, 0.0, j, dir, RichardsonConfig::GERM);
            est.converged(NUMERIC_EXISTENCE_TOL).then_some(est.value)
        })
        .collect();
    close_prefix(out)
}

/// One-sided derivatives of `h` at `0` of orders `1..=k` on `side`.
pub fn one_sided_jet(h: &GermMap, k: Order, side: Side) -> Result<Vec<Option<f64>>> {
    let (k, _) = k.resolve()?;
    Ok(Jet::of(h, k)?.side(side).to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionKind {
    /// Both one-sided derivatives exist but differ.
    Mismatch,
    /// A one-sided derivative does not exist.
    Nonexistent,
    /// The derivatives agree but the slope is zero.
    VanishingSlope,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub order: usize,
    pub kind: ObstructionKind,
    pub neg: Option<f64>,
    pub pos: Option<f64>,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x}"));
        match self.kind {
            ObstructionKind::VanishingSlope => write!(f, "slope vanishes at 0"),
            _ => write!(
                f,
                "order {} one-sided derivatives differ: {} (left) vs {} (right)",
                self.order,
                show(self.neg),
                show(self.pos)
            ),
        }
    }
}

/// Outcome of a `C^k` test at `0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub requested: usize,
    /// `∞` was requested and evaluated at `K_MAX`, or a numeric germ was
    /// only examined up to [`NUMERIC_MAX_ORDER`].
    pub capped: bool,
    pub max_order: usize,
    pub obstruction: Option<Obstruction>,
    pub is_diffeo: bool,
    pub exact: bool,
}

impl fmt::Display for SmoothnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C^{} at 0 (requested {})", self.max_order, self.requested)?;
        if let Some(o) = &self.obstruction {
            write!(f, "; {o}")?;
        }
        if self.capped {
            f.write_str("; capped")?;
        }
        if !self.exact {
            f.write_str("; numeric")?;
        }
        Ok(())
    }
}

fn report(jet: &Jet, requested: usize, capped: bool) -> SmoothnessReport {
    let mut max_order = 0;
    let mut obstruction = None;
    for j in 1..=jet.order {
        let (n, p) = (jet.neg[j - 1], jet.pos[j - 1]);
        let kind = match (n, p) {
            (Some(x), Some(y)) if jet.agree(j, x, y) => None,
            (Some(_), Some(_)) => Some(ObstructionKind::Mismatch),
            _ => Some(ObstructionKind::Nonexistent),
        };
        if let Some(kind) = kind {
            obstruction = Some(Obstruction { order: j, kind, neg: n, pos: p });
            break;
        }
        max_order = j;
    }
    let slope_ok = jet.pos[0].is_some_and(|s| !jet.is_zero(1, s));
    if obstruction.is_none() && max_order >= 1 && !slope_ok {
        obstruction = Some(Obstruction {
            order: 1,
            kind: ObstructionKind::VanishingSlope,
            neg: jet.neg[0],
            pos: jet.pos[0],
        });
    }
    SmoothnessReport {
        requested,
        capped: capped || jet.order < requested,
        max_order,
        is_diffeo: max_order == requested && slope_ok,
        obstruction,
        exact: jet.exact,
    }
}

/// Largest `j ≤ k` at which both one-sided jets exist and agree.
pub fn smoothness_at_zero(h: &GermMap, k: Order) -> Result<SmoothnessReport> {
    let (k, capped) = k.resolve()?;
    Ok(report(&Jet::of(h, k)?, k, capped))
}

/// `C^n` test for `q = w_b ∘ f ∘ w_a` from the jet of `f` alone.
///
/// With `τ_i = f^{(i)}(0)`: if `τ_1 > 0` the left derivatives of `q` are
/// `τ_i` and the right ones `b a^i τ_i`; if `τ_1 < 0` they are `b τ_i` and
/// `a^i τ_i`.
pub fn sandwich_smoothness(f: &Jet, a: f64, b: f64, n: usize) -> Result<SmoothnessReport> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain("a and b must be positive"));
    }
    if n == 0 || n > f.order {
        return Err(Error::domain(format!("order {n} outside 1..={}", f.order)));
    }
    let mut tau = Vec::with_capacity(n);
    for j in 1..=n {
        match (f.neg[j - 1], f.pos[j - 1]) {
            (Some(x), Some(y)) if f.agree(j, x, y) => tau.push(y),
            _ => return Err(Error::domain(format!("jet of f is not two-sided at order {j}"))),
        }
    }
    if tau[0] == 0.0 {
        return Err(Error::domain("f'(0) = 0: not the jet of a diffeomorphism"));
    }
    let (left, right): (Vec<_>, Vec<_>) = tau
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let ai = a.powi(i as i32 + 1);
            if tau[0] > 0.0 {
                (Some(t), Some(b * ai * t))
            } else {
                (Some(b * t), Some(ai * t))
            }
        })
        .unzip();
    let q = Jet {
        order: n,
        neg: left,
        pos: right,
        exact: true,
    };
    Ok(report(&q, n, false))
}

/// Derivatives at `0` of the compositional inverse of a series with the
/// given derivatives (`derivs[0] ≠ 0`).
pub fn reversion(derivs: &[f64]) -> Result<Vec<f64>> {
    let m = derivs.len();
    if m == 0 || derivs[0] == 0.0 {
        return Err(Error::domain("series reversion needs a nonzero linear term"));
    }
    let c: Vec<f64> = std::iter::once(0.0)
        .chain(derivs.iter().enumerate().map(|(i, d)| d / factorial(i + 1)))
        .collect();
    let mul = |p: &[f64], q: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; m + 1];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &qj) in q.iter().enumerate().take(m + 1 - i) {
                r[i + j] += pi * qj;
            }
        }
        r
    };
    let mut g = vec![0.0; m + 1];
    g[1] = 1.0 / c[1];
    for n in 2..=m {
        let mut power = g.clone();
        let mut s = 0.0;
        for cj in c.iter().take(n + 1).skip(2) {
            power = mul(&power, &g);
            s += cj * power[n];
        }
        g[n] = -s / c[1];
    }
    Ok((1..=m).map(|j| g[j] * factorial(j)).collect())
}

/// Jet of `h⁻¹` through order `k`.
///
/// Exact monomial germs invert exactly. For other exact germs each side of
/// the inverse is the series reversion of the matching side of `h` while
/// that side has a nonzero slope, and a numeric jet of the bisection inverse
/// otherwise.
fn inverse_jet(h: &GermMap, k: usize) -> Result<Jet> {
    let g = match h {
        GermMap::Exact(g) if g.is_monomial() => return Jet::of(&invert(h), k),
        GermMap::Exact(g) => g,
        GermMap::Numeric(..) => return Jet::of(&invert(h), k),
    };
    let forward = Jet::of(h, k)?;
    let numeric_inverse = invert(h);
    let mut exact = true;
    let mut side_of = |target: Side| -> Vec<Option<f64>> {
        let source = match g.orientation() {
            Orientation::Preserving => target,
            Orientation::Reversing => target.other(),
        };
        let src = forward.side(source);
        let known: Vec<f64> = src.iter().map_while(|c| *c).collect();
        if known.first().is_some_and(|&s| s != 0.0) {
            let mut out: Vec<Option<f64>> = reversion(&known)
                .expect("nonzero slope")
                .into_iter()
                .map(Some)
                .collect();
            out.resize(k, None);
            out
        } else {
            exact = false;
            let mut out = numeric_side(&|x| numeric_inverse.eval(x), target, k.min(NUMERIC_MAX_ORDER));
            out.resize(k, None);
            out
        }
    };
    let neg = side_of(Side::Neg);
    let pos = side_of(Side::Pos);
    Ok(Jet { order: k, neg, pos, exact })
}

/// `C^k` report for `h⁻¹`.
pub fn inverse_smoothness(h: &GermMap, k: Order) -> Result<SmoothnessReport> {
    let (k, capped) = k.resolve()?;
    Ok(report(&inverse_jet(h, k)?, k, capped))
}

/// `h ∈ Diff^k(R,0)`: both `h` and `h⁻¹` are `C^k` at `0` with nonzero slope.
pub fn in_diff(h: &GermMap, k: Order) -> Result<bool> {
    Ok(smoothness_at_zero(h, k)?.is_diffeo && inverse_smoothness(h, k)?.is_diffeo)
}

/// `h ∈ J^k(R,0)`: `h ∈ Diff^k(R,0)` with `h^{(i)}(0) = 0` for `2 ≤ i ≤ k`.
pub fn in_jdiff(h: &GermMap, k: Order) -> Result<bool> {
    if !in_diff(h, k)? {
        return Ok(false);
    }
    let (k, _) = k.resolve()?;
    let jet = Jet::of(h, k)?;
    Ok((2..=jet.order).all(|j| {
        [jet.neg[j - 1], jet.pos[j - 1]]
            .iter()
            .all(|c| c.is_some_and(|v| jet.is_zero(j, v)))
    }))
}

/// `h = id` at sample points of `(-radius, radius) ∖ 0`.
pub fn fixed_near_zero(h: &GermMap, radius: f64) -> bool {
    if !(radius > 0.0 && radius.is_finite()) {
        return false;
    }
    let linear = (1..64).map(|i| radius * i as f64 / 64.0);
    let dyadic = (1..48).map(|i| radius * 0.5f64.powi(i));
    linear
        .chain(dyadic)
        .flat_map(|t| [t, -t])
        .all(|x| (h.eval(x) - x).abs() <= 1e-12 * x.abs())
}

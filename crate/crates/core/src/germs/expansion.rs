use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponents closer than this are treated as equal; exponents this close to
/// an integer are snapped to it.
pub(crate) const EXPONENT_TOL: f64 = 1e-12;

/// Coefficients below this fraction of the largest one are dropped after
/// arithmetic (cancellation residue).
const CANCEL_TOL: f64 = 1e-13;

/// A single term `c·t^e` with `c ≠ 0` and `e > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    #[serde(rename = "c")]
    pub coeff: f64,
    #[serde(rename = "e")]
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Result<Self> {
        if !coeff.is_finite() || coeff == 0.0 {
            return Err(Error::domain(format!("power term coefficient must be nonzero, got {coeff}")));
        }
        if !exponent.is_finite() || exponent <= 0.0 {
            return Err(Error::domain(format!("power term exponent must be positive, got {exponent}")));
        }
        Ok(PowerTerm { coeff, exponent })
    }

    pub fn integer_exponent(&self) -> Option<u32> {
        as_integer(self.exponent)
    }
}

pub(crate) fn as_integer(e: f64) -> Option<u32> {
    let r = e.round();
    ((e - r).abs() <= EXPONENT_TOL && r >= 1.0 && r <= u32::MAX as f64).then_some(r as u32)
}

/// One side of a germ: `t ↦ Σ cᵢ t^{eᵢ}` for `t > 0`, exponents strictly
/// increasing.
///
/// The positive side of a germ is evaluated at `t = x`, the negative side at
/// `t = -x`. The leading term decides the sign of the side near `0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PowerTerm>", into = "Vec<PowerTerm>")]
pub struct SideExpansion {
    terms: Vec<PowerTerm>,
}

impl TryFrom<Vec<PowerTerm>> for SideExpansion {
    type Error = Error;

    fn try_from(terms: Vec<PowerTerm>) -> Result<Self> {
        SideExpansion::new(terms)
    }
}

impl From<SideExpansion> for Vec<PowerTerm> {
    fn from(side: SideExpansion) -> Self {
        side.terms
    }
}

impl SideExpansion {
    /// Validates and wraps an already ordered term list.
    pub fn new(terms: Vec<PowerTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("side expansion needs at least one term"));
        }
        for t in &terms {
            PowerTerm::new(t.coeff, t.exponent)?;
        }
        if terms.windows(2).any(|w| w[1].exponent <= w[0].exponent) {
            return Err(Error::domain("side expansion exponents must be strictly increasing"));
        }
        Ok(SideExpansion { terms })
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Result<Self> {
        Ok(SideExpansion {
            terms: vec![PowerTerm::new(coeff, exponent)?],
        })
    }

    /// Sorts, merges equal exponents and drops cancelled terms.
    pub(crate) fn normalized(mut terms: Vec<PowerTerm>) -> Result<Self> {
        for t in &mut terms {
            if let Some(n) = as_integer(t.exponent) {
                t.exponent = n as f64;
            }
        }
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<PowerTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (last.exponent - t.exponent).abs() <= EXPONENT_TOL * last.exponent.max(1.0) => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().fold(0.0f64, |m, t| m.max(t.coeff.abs()));
        merged.retain(|t| t.coeff.abs() > CANCEL_TOL * scale);
        SideExpansion::new(merged)
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn leading(&self) -> PowerTerm {
        self.terms[0]
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn all_integer(&self) -> bool {
        self.terms.iter().all(|t| t.integer_exponent().is_some())
    }

    /// Sign of the side's values near `t = 0`.
    pub fn sign(&self) -> f64 {
        self.leading().coeff.signum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|p| p.coeff * t.powf(p.exponent)).sum()
    }

    pub(crate) fn scaled(&self, k: f64) -> SideExpansion {
        SideExpansion {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    coeff: t.coeff * k,
                    exponent: t.exponent,
                })
                .collect(),
        }
    }

    fn mul(&self, other: &SideExpansion) -> Result<SideExpansion> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(PowerTerm {
                    coeff: a.coeff * b.coeff,
                    exponent: a.exponent + b.exponent,
                });
            }
        }
        SideExpansion::normalized(out)
    }

    fn pow(&self, n: u32) -> Result<SideExpansion> {
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `t ↦ self(inner(t))` when the result is again a finite power sum.
    ///
    /// `inner` must be positive near `0`. Closed cases: `inner` is a monomial
    /// (powers of a monomial are monomials), or every exponent of `self` is
    /// an integer (finite expansion of integer powers). Returns `None`
    /// otherwise.
    pub(crate) fn compose_positive(&self, inner: &SideExpansion) -> Option<Result<SideExpansion>> {
        debug_assert!(inner.sign() > 0.0);
        if inner.is_monomial() {
            let PowerTerm { coeff: c, exponent: e } = inner.leading();
            let terms = self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    coeff: t.coeff * c.powf(t.exponent),
                    exponent: t.exponent * e,
                })
                .collect();
            return Some(SideExpansion::normalized(terms));
        }
        if self.all_integer() {
            let mut out = Vec::new();
            for t in &self.terms {
                let n = t.integer_exponent().expect("checked integer");
                match inner.pow(n) {
                    Ok(p) => out.extend(p.scaled(t.coeff).terms),
                    Err(e) => return Some(Err(e)),
                }
            }
            return Some(SideExpansion::normalized(out));
        }
        None
    }

    /// Term-list equality: exponents within `1e-12`, coefficients within `tol`.
    pub fn approx_eq(&self, other: &SideExpansion, tol: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| {
                (a.exponent - b.exponent).abs() <= EXPONENT_TOL * a.exponent.max(1.0)
                    && (a.coeff - b.coeff).abs() <= tol
            })
    }

    /// Renders the side as a function of `var`, e.g. `2t + t^1.5`.
    pub(crate) fn render(&self, var: &str) -> String {
        let mut s = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coeff;
            if i == 0 {
                if c < 0.0 {
                    s.push('-');
                }
            } else {
                s.push_str(if c < 0.0 { " - " } else { " + " });
            }
            let mag = c.abs();
            if mag != 1.0 {
                s.push_str(&format!("{mag}"));
            }
            match t.integer_exponent() {
                Some(1) => s.push_str(var),
                Some(n) => s.push_str(&format!("{var}^{n}")),
                None => s.push_str(&format!("{var}^{}", t.exponent)),
            }
        }
        s
    }
}

impl fmt::Display for SideExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

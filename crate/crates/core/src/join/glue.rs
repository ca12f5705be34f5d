use std::sync::Arc;

use super::bump::{bump_plateau, Bump};
use super::diffeo::{Func, NumericDiffeo, GRID_CELLS};
use super::quad::{adaptive_simpson, SIMPSON_TOL};
use crate::{Error, Result};

/// Halvings of `eps` tried after the initial `(c - b) / 8`.
pub const EPS_RETRIES: usize = 6;

/// A glued map `p` together with the quantities of its construction.
#[derive(Clone, Debug)]
pub struct Glue {
    pub p: NumericDiffeo,
    pub eps: f64,
    /// `A = (c - b) - ∫ α`.
    pub area: f64,
    /// `B = ∫ β`.
    pub beta_mass: f64,
    /// `∫_b^c γ`, by quadrature.
    pub gamma_integral: f64,
    /// Factor (within quadrature error of 1) that makes the middle piece
    /// end exactly at `g(c - eps)`.
    pub closure_scale: f64,
}

struct Weights {
    left: Bump,
    right: Bump,
    beta: Bump,
    dg: Func,
}

impl Weights {
    fn alpha(&self, x: f64) -> f64 {
        let r = self.right.eval(x);
        self.left.eval(x) + if r > 0.0 { r * (self.dg)(x) } else { 0.0 }
    }
}

fn check_transition(g: &NumericDiffeo) -> Result<(f64, f64)> {
    let (b, c) = g.domain();
    let tol = 1e-9 * (c - b);
    if !g.is_increasing() {
        return Err(Error::domain("g must be increasing"));
    }
    if (g.eval(b) - b).abs() > tol || (g.eval(c) - c).abs() > tol {
        return Err(Error::domain(format!("g must map ({b}; {c}) onto itself")));
    }
    let (xs, _) = g.grid();
    if let Some(x) = xs[1..xs.len() - 1].iter().find(|&&x| !(g.derivative(x) > 0.0)) {
        return Err(Error::domain(format!("g' is not positive at {x}")));
    }
    Ok((b, c))
}

/// Diffeomorphism `p` of `(b; c)` equal to the identity on `(b, b+eps]`
/// and to `g` on `[c-eps, c)`, built as `p(x) = b + ∫_b^x γ` with
/// `γ = α + (A/B) β`.
pub fn glue_id_and_diff(g: &NumericDiffeo, eps: f64) -> Result<NumericDiffeo> {
    glue_with_report(g, eps).map(|r| r.p)
}

pub fn glue_with_report(g: &NumericDiffeo, eps: f64) -> Result<Glue> {
    let (b, c) = check_transition(g)?;
    if !(eps > 0.0 && eps < (c - b) / 4.0) {
        return Err(Error::domain(format!("eps = {eps} must lie in (0, {})", (c - b) / 4.0)));
    }
    let w = Weights {
        left: bump_plateau(b - 1.0, b, b + eps, b + 2.0 * eps)?,
        right: bump_plateau(c - 2.0 * eps, c - eps, c, c + 1.0)?,
        beta: bump_plateau(b + eps, b + 2.0 * eps, c - 2.0 * eps, c - eps)?,
        dg: g.derivative_func(),
    };
    let (m0, m1) = (b + eps, c - eps);
    let g_m1 = g.eval(m1);
    // α = 1 on [b, b+eps] and α = g' on [c-eps, c)
    let alpha_mid = adaptive_simpson(&|x| w.alpha(x), m0, m1, SIMPSON_TOL).value;
    let area = (c - b) - (eps + alpha_mid + (c - g_m1));
    if !(area > 0.0) {
        return Err(Error::GlueInfeasible { eps, area });
    }
    let beta_mass = adaptive_simpson(&|x| w.beta.eval(x), m0, m1, SIMPSON_TOL).value;
    let ratio = area / beta_mass;
    let gamma = move |x: f64| w.alpha(x) + ratio * w.beta.eval(x);

    let n = GRID_CELLS;
    let h = (m1 - m0) / n as f64;
    let node = move |i: usize| if i == n { m1 } else { m0 + i as f64 * h };
    let cell_tol = SIMPSON_TOL / n as f64;
    let mut table = Vec::with_capacity(n + 1);
    table.push(0.0);
    for i in 0..n {
        let q = adaptive_simpson(&gamma, node(i), node(i + 1), cell_tol).value;
        table.push(table[i] + q);
    }
    let total = table[n];
    let closure_scale = (g_m1 - m0) / total;
    let ends = adaptive_simpson(&gamma, b, m0, SIMPSON_TOL).value + adaptive_simpson(&gamma, m1, c, SIMPSON_TOL).value;
    let gamma_integral = ends + total;

    let gamma = Arc::new(gamma);
    let table = Arc::new(table);
    let gf = g.as_func();
    let gd = g.derivative_func();
    let gam = gamma.clone();
    let p: Func = Arc::new(move |x: f64| {
        if x <= m0 {
            x
        } else if x >= m1 {
            gf(x)
        } else {
            let i = (((x - m0) / h) as usize).min(n - 1);
            let tail = adaptive_simpson(&*gam, node(i), x, 1e-13).value;
            m0 + closure_scale * (table[i] + tail)
        }
    });
    let dp: Func = Arc::new(move |x: f64| {
        if x <= m0 {
            1.0
        } else if x >= m1 {
            gd(x)
        } else {
            closure_scale * gamma(x)
        }
    });
    let p = NumericDiffeo::from_arcs(b, c, p, Some(dp), vec![m0, m1])?;
    Ok(Glue { p, eps, area, beta_mass, gamma_integral, closure_scale })
}

/// Tries `eps = (c - b) / 8`, halving on `GlueInfeasible` up to
/// `EPS_RETRIES` times.
pub fn glue_search(g: &NumericDiffeo) -> Result<Glue> {
    let (b, c) = g.domain();
    let mut eps = (c - b) / 8.0;
    let mut last = None;
    for _ in 0..=EPS_RETRIES {
        match glue_with_report(g, eps) {
            Err(e @ Error::GlueInfeasible { .. }) => {
                last = Some(e);
                eps /= 2.0;
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

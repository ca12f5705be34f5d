use serde::{Deserialize, Serialize};

use super::diffeo::{uniform_grid, NumericDiffeo, GRID_CELLS};
use crate::numdiff::{one_sided_derivative_full, Direction, RichardsonConfig};
use crate::{Error, Result};

/// Highest derivative order certified by finite differences.
pub const VERIFY_MAX_ORDER: usize = 4;

/// Per-order agreement tolerances for derivatives 1..4.
pub const DEFAULT_TOLERANCES: [f64; 4] = [1e-6, 1e-5, 1e-3, 1e-2];

/// Richardson levels at the base resolution.
const LEVELS: usize = 10;

/// A real map of an interval that may have been assembled from pieces.
pub trait SeamedMap {
    fn domain(&self) -> (f64, f64);
    fn eval(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    /// Interior points where the pieces meet.
    fn seams(&self) -> Vec<f64>;
}

impl SeamedMap for NumericDiffeo {
    fn domain(&self) -> (f64, f64) {
        NumericDiffeo::domain(self)
    }

    fn eval(&self, x: f64) -> f64 {
        NumericDiffeo::eval(self, x)
    }

    fn derivative(&self, x: f64) -> f64 {
        NumericDiffeo::derivative(self, x)
    }

    fn seams(&self) -> Vec<f64> {
        NumericDiffeo::seams(self).to_vec()
    }
}

/// Polynomial `Σ coeffs[i] x^i` on `[from, to]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    pub coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c)
    }
}

/// Contiguous polynomial pieces. Not required to be monotone, so that
/// non-examples can be certified to fail.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    pieces: Vec<Piece>,
}

impl PiecewiseMap {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::domain("piecewise map needs at least one piece"));
        }
        for p in &pieces {
            if !(p.from < p.to) || p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain(format!("bad piece on [{}, {}]", p.from, p.to)));
            }
        }
        if pieces.windows(2).any(|w| w[0].to != w[1].from) {
            return Err(Error::domain("pieces must be contiguous"));
        }
        Ok(PiecewiseMap { pieces })
    }

    fn piece(&self, x: f64) -> &Piece {
        self.pieces.iter().find(|p| x < p.to).unwrap_or(&self.pieces[self.pieces.len() - 1])
    }
}

impl SeamedMap for PiecewiseMap {
    fn domain(&self) -> (f64, f64) {
        (self.pieces[0].from, self.pieces[self.pieces.len() - 1].to)
    }

    fn eval(&self, x: f64) -> f64 {
        self.piece(x).eval(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.piece(x).derivative(x)
    }

    fn seams(&self) -> Vec<f64> {
        self.pieces[1..].iter().map(|p| p.from).collect()
    }
}

/// One-sided derivative estimates at one seam.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamCheck {
    pub x: f64,
    pub base_step: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Per order: the larger of the jump `|right - left|` and the two
    /// extrapolation error estimates, relative to `max(1, |left|, |right|)`.
    pub residuals: Vec<f64>,
}

/// Outcome of a finite-difference `C^k` check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothCert {
    /// Order actually checked.
    pub order: usize,
    /// The requested order exceeded `VERIFY_MAX_ORDER`.
    pub capped: bool,
    pub tolerances: Vec<f64>,
    /// Largest residual per order over all seams.
    pub max_residuals: Vec<f64>,
    pub seams: Vec<SeamCheck>,
    /// Smallest first derivative over the grid nodes off the seams.
    pub min_derivative: f64,
    pub grid_points: usize,
    /// Number of times the grid and the difference steps were halved.
    pub refinement: u32,
    pub pass: bool,
}

impl SmoothCert {
    /// Combined certificate: passes iff all parts pass.
    pub fn merge(certs: &[SmoothCert]) -> Option<SmoothCert> {
        let first = certs.first()?;
        let mut out = first.clone();
        for c in &certs[1..] {
            out.capped |= c.capped;
            for (m, r) in out.max_residuals.iter_mut().zip(&c.max_residuals) {
                *m = m.max(*r);
            }
            out.seams.extend(c.seams.iter().cloned());
            out.min_derivative = out.min_derivative.min(c.min_derivative);
            out.grid_points += c.grid_points;
            out.pass &= c.pass;
        }
        Some(out)
    }
}

/// Tolerances for orders `1..=k`, uniform.
pub fn uniform_tolerances(tol: f64) -> Vec<f64> {
    vec![tol; VERIFY_MAX_ORDER]
}

/// [`verify_ck_numeric_refined`] at the base resolution.
pub fn verify_ck_numeric(map: &dyn SeamedMap, k: usize, tol: &[f64]) -> Result<SmoothCert> {
    verify_ck_numeric_refined(map, k, tol, 0)
}

/// Certifies `map ∈ C^k` across its seams: one-sided extrapolated estimates
/// of derivatives `1..=k` must agree at every interior seam, and the first
/// derivative must be positive on the grid.
///
/// Each refinement halves the grid spacing and the base difference step.
pub fn verify_ck_numeric_refined(map: &dyn SeamedMap, k: usize, tol: &[f64], refinement: u32) -> Result<SmoothCert> {
    if k == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    let order = k.min(VERIFY_MAX_ORDER);
    if tol.len() < order {
        return Err(Error::domain(format!("{} tolerances given for order {order}", tol.len())));
    }
    let tolerances = tol[..order].to_vec();
    let (lo, hi) = map.domain();
    let mut seams: Vec<f64> = map.seams().into_iter().filter(|&s| s > lo && s < hi).collect();
    seams.sort_by(f64::total_cmp);
    seams.dedup();

    let f = |x: f64| map.eval(x);
    let mut checks = Vec::with_capacity(seams.len());
    for (i, &s) in seams.iter().enumerate() {
        let left_gap = s - if i == 0 { lo } else { seams[i - 1] };
        let right_gap = if i + 1 == seams.len() { hi } else { seams[i + 1] } - s;
        let base = (left_gap.min(right_gap) / (order + 2) as f64).min(0.0625);
        let mut cfg = RichardsonConfig::new(base, LEVELS);
        for _ in 0..refinement {
            cfg = cfg.refined();
        }
        let mut check = SeamCheck {
            x: s,
            base_step: cfg.base_step,
            left: Vec::new(),
            right: Vec::new(),
            residuals: Vec::new(),
        };
        for j in 1..=order {
            let l = one_sided_derivative_full(&f, s, j, Direction::Backward, cfg);
            let r = one_sided_derivative_full(&f, s, j, Direction::Forward, cfg);
            let scale = 1f64.max(l.value.abs()).max(r.value.abs());
            let residual = (r.value - l.value).abs().max(l.error).max(r.error) / scale;
            check.left.push(l.value);
            check.right.push(r.value);
            check.residuals.push(if residual.is_finite() { residual } else { f64::MAX });
        }
        checks.push(check);
    }

    let cells = GRID_CELLS << refinement;
    let nodes = uniform_grid(lo, hi, cells);
    let near_seam = |x: f64| seams.iter().any(|&s| (x - s).abs() <= 1e-12 * (hi - lo));
    let min_derivative = nodes[1..cells]
        .iter()
        .filter(|&&x| !near_seam(x))
        .map(|&x| map.derivative(x))
        .map(|d| if d.is_nan() { f64::MIN } else { d })
        .fold(f64::MAX, f64::min);

    let max_residuals: Vec<f64> = (0..order)
        .map(|j| checks.iter().map(|c| c.residuals[j]).fold(0.0, f64::max))
        .collect();
    let pass = min_derivative > 0.0 && max_residuals.iter().zip(&tolerances).all(|(r, t)| r <= t);
    Ok(SmoothCert {
        order,
        capped: k > VERIFY_MAX_ORDER,
        tolerances,
        max_residuals,
        seams: checks,
        min_derivative,
        grid_points: cells + 1,
        refinement,
        pass,
    })
}

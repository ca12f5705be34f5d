use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::diffeo::{Func, NumericDiffeo};
use super::glue::{glue_search, Glue};
use super::verify::{verify_ck_numeric, SmoothCert};
use crate::{Error, Result};

/// Coordinate map of an interval chart, from the abstract line to its image.
#[derive(Clone, Debug)]
pub enum ChartMap {
    /// `s ↦ scale·s + shift`, `scale > 0`.
    Affine { scale: f64, shift: f64 },
    Numeric(NumericDiffeo),
}

impl ChartMap {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ChartMap::Affine { scale, shift } => scale * s + shift,
            ChartMap::Numeric(m) => m.eval(s),
        }
    }

    pub fn inverse_eval(&self, x: f64) -> f64 {
        match self {
            ChartMap::Affine { scale, shift } => (x - shift) / scale,
            ChartMap::Numeric(m) => m.inverse_eval(x),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            ChartMap::Affine { scale, .. } => *scale,
            ChartMap::Numeric(m) => m.derivative(s),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            ChartMap::Affine { scale, shift } => *scale == 1.0 && *shift == 0.0,
            ChartMap::Numeric(m) => m.is_identity(),
        }
    }
}

/// A chart whose image is a bounded open interval.
#[derive(Clone, Debug)]
pub struct IntervalChart {
    pub label: String,
    /// Interval of the abstract line covered by the chart.
    pub domain: (f64, f64),
    pub image: (f64, f64),
    pub map: ChartMap,
}

impl IntervalChart {
    /// The inclusion of `(lo; hi)`.
    pub fn identity(label: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        Self::affine(label, (lo, hi), 1.0, 0.0)
    }

    /// Affine chart onto `image`.
    pub fn affine(label: impl Into<String>, image: (f64, f64), scale: f64, shift: f64) -> Result<Self> {
        if !(image.0 < image.1 && image.0.is_finite() && image.1.is_finite()) {
            return Err(Error::InvalidAtlas(format!("image ({}; {}) is not a bounded interval", image.0, image.1)));
        }
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidAtlas("affine charts must be increasing".into()));
        }
        Ok(IntervalChart {
            label: label.into(),
            domain: ((image.0 - shift) / scale, (image.1 - shift) / scale),
            image,
            map: ChartMap::Affine { scale, shift },
        })
    }

    /// Chart given by an increasing map of its domain.
    pub fn numeric(label: impl Into<String>, map: NumericDiffeo) -> Result<Self> {
        if !map.is_increasing() {
            return Err(Error::InvalidAtlas("chart maps must be increasing".into()));
        }
        Ok(IntervalChart { label: label.into(), domain: map.domain(), image: map.range(), map: ChartMap::Numeric(map) })
    }
}

fn close(x: f64, y: f64, scale: f64) -> bool {
    (x - y).abs() <= 1e-9 * scale.max(1.0)
}

/// Two charts joined into one, with `p = W ∘ u⁻¹` and `q = W ∘ v⁻¹`.
#[derive(Clone, Debug)]
pub struct Join {
    pub w: IntervalChart,
    pub p: NumericDiffeo,
    pub q: NumericDiffeo,
    /// `None` for an identity transition.
    pub glue: Option<Glue>,
    pub p_cert: SmoothCert,
    pub q_cert: SmoothCert,
}

struct JoinCore {
    p: NumericDiffeo,
    q: NumericDiffeo,
    glue: Option<Glue>,
    p_cert: SmoothCert,
    q_cert: SmoothCert,
}

fn join_core(a: f64, b: f64, c: f64, d: f64, g: &NumericDiffeo, k: usize, tol: &[f64]) -> Result<JoinCore> {
    if !(a < b && b < c && c < d) {
        return Err(Error::NotJoinable(format!("need a < b < c < d, got {a}, {b}, {c}, {d}")));
    }
    let (gb, gc) = g.domain();
    if !close(gb, b, c - b) || !close(gc, c, c - b) || !g.is_increasing() {
        return Err(Error::NotJoinable(format!("transition must be an increasing map of ({b}; {c})")));
    }
    let (p, q, glue) = if g.is_identity() {
        (NumericDiffeo::identity(a, c)?, NumericDiffeo::identity(b, d)?, None)
    } else {
        let glue = glue_search(g)?;
        let (m0, m1) = (b + glue.eps, c - glue.eps);
        // the glued map is already the identity left of b + eps
        let p = NumericDiffeo::from_arcs(a, c, glue.p.as_func(), Some(glue.p.derivative_func()), vec![b, m0, m1])?;
        let (pf, pd) = (p.as_func(), p.derivative_func());
        let (gf, gd) = (g.as_func(), g.derivative_func());
        let g_inv: Func = {
            let gf = gf.clone();
            Arc::new(move |y| super::diffeo::inverse_by_bisection(&*gf, b, c, true, y))
        };
        let gi = g_inv.clone();
        let qf: Func = Arc::new(move |y| if y >= c { y } else { pf(gi(y)) });
        let qd: Func = Arc::new(move |y| {
            if y >= c {
                1.0
            } else {
                let x = g_inv(y);
                pd(x) / gd(x)
            }
        });
        let q = NumericDiffeo::from_arcs(b, d, qf, Some(qd), vec![gf(m0), gf(m1), c])?;
        (p, q, Some(glue))
    };
    let p_cert = verify_ck_numeric(&p, k, tol)?;
    let q_cert = verify_ck_numeric(&q, k, tol)?;
    Ok(JoinCore { p, q, glue, p_cert, q_cert })
}

/// The `C^k` join of `U` with image `(a; c)` and `V` with image `(b; d)`
/// along the transition `g = v ∘ u⁻¹` of `(b; c)`.
pub fn join_charts(u: &IntervalChart, v: &IntervalChart, g: &NumericDiffeo, k: usize, tol: &[f64]) -> Result<Join> {
    let ((a, c), (b, d)) = (u.image, v.image);
    let core = join_core(a, b, c, d, g, k, tol)?;
    let w = assemble(
        format!("{}+{}", u.label, v.label),
        &[u.clone(), v.clone()],
        &[core.p.clone(), core.q.clone()],
    )?;
    Ok(Join { w, p: core.p, q: core.q, glue: core.glue, p_cert: core.p_cert, q_cert: core.q_cert })
}

/// The chart `W` with `W ∘ φ_i⁻¹ = τ_i` on each chart's domain.
fn assemble(label: String, charts: &[IntervalChart], taus: &[NumericDiffeo]) -> Result<IntervalChart> {
    let lo = charts[0].domain.0;
    let hi = charts[charts.len() - 1].domain.1;
    let image = (taus[0].range().0, taus[taus.len() - 1].range().1);
    if taus.iter().all(NumericDiffeo::is_identity) {
        if let ChartMap::Affine { scale, shift } = charts[0].map {
            let same = charts.iter().all(|c| match c.map {
                ChartMap::Affine { scale: s, shift: t } => s == scale && t == shift,
                ChartMap::Numeric(_) => false,
            });
            if same {
                return IntervalChart::affine(label, image, scale, shift);
            }
        }
    }
    let pieces: Arc<Vec<(f64, ChartMap, NumericDiffeo)>> =
        Arc::new(charts.iter().zip(taus).map(|(c, t)| (c.domain.1, c.map.clone(), t.clone())).collect());
    let pick = {
        let pieces = pieces.clone();
        move |s: f64| pieces.iter().position(|(end, ..)| s < *end).unwrap_or(pieces.len() - 1)
    };
    let (pk, pieces2) = (pick.clone(), pieces.clone());
    let f: Func = Arc::new(move |s| {
        let (_, phi, tau) = &pieces[pk(s)];
        tau.eval(phi.eval(s))
    });
    let df: Func = Arc::new(move |s| {
        let (_, phi, tau) = &pieces2[pick(s)];
        tau.derivative(phi.eval(s)) * phi.derivative(s)
    });
    let mut seams: Vec<f64> = charts[..charts.len() - 1].iter().map(|c| c.domain.1).collect();
    for (c, t) in charts.iter().zip(taus) {
        seams.extend(t.seams().iter().map(|&x| c.map.inverse_eval(x)));
    }
    IntervalChart::numeric(label, NumericDiffeo::from_arcs(lo, hi, f, Some(df), seams)?)
}

/// Finite chain of interval charts: chart `i` has image `(a_i; b_i)` with
/// `a_i < b_{i-1} < a_{i+1} < b_i`, so that only neighbours overlap, and
/// the transition `g_i = φ_{i+1} ∘ φ_i⁻¹` maps `(a_{i+1}; b_i)` onto itself.
#[derive(Clone, Debug)]
pub struct ChainAtlas {
    charts: Vec<IntervalChart>,
    transitions: Vec<NumericDiffeo>,
}

impl ChainAtlas {
    pub fn new(charts: Vec<IntervalChart>, transitions: Vec<NumericDiffeo>) -> Result<Self> {
        if charts.is_empty() || transitions.len() + 1 != charts.len() {
            return Err(Error::InvalidAtlas(format!(
                "{} charts need {} transitions, got {}",
                charts.len(),
                charts.len().saturating_sub(1),
                transitions.len()
            )));
        }
        for i in 0..charts.len() - 1 {
            let ((a0, b0), (a1, b1)) = (charts[i].image, charts[i + 1].image);
            if !(a0 < a1 && a1 < b0 && b0 < b1) {
                return Err(Error::InvalidAtlas(format!("images of charts {i} and {} do not interleave", i + 1)));
            }
            if i > 0 && !(charts[i - 1].image.1 < a1) {
                return Err(Error::InvalidAtlas(format!("charts {}, {i}, {} share a point", i - 1, i + 1)));
            }
            let (gl, gh) = transitions[i].domain();
            let (rl, rh) = transitions[i].range();
            let w = b0 - a1;
            if !(close(gl, a1, w) && close(gh, b0, w) && close(rl, a1, w) && close(rh, b0, w)) {
                return Err(Error::InvalidAtlas(format!("transition {i} must map ({a1}; {b0}) onto itself")));
            }
            if !transitions[i].is_increasing() {
                return Err(Error::InvalidAtlas(format!("transition {i} reverses orientation")));
            }
        }
        Ok(ChainAtlas { charts, transitions })
    }

    /// Derives each transition `φ_{i+1} ∘ φ_i⁻¹` from the chart maps.
    pub fn from_charts(charts: Vec<IntervalChart>) -> Result<Self> {
        let mut transitions = Vec::new();
        for w in charts.windows(2) {
            let (l, r) = (w[1].image.0, w[0].image.1);
            if !(l < r) {
                return Err(Error::InvalidAtlas(format!("charts {} and {} do not overlap", w[0].label, w[1].label)));
            }
            let (u, v) = (w[0].map.clone(), w[1].map.clone());
            if u.is_identity() && v.is_identity() {
                transitions.push(NumericDiffeo::identity(l, r)?);
                continue;
            }
            let (u2, v2) = (u.clone(), v.clone());
            let f: Func = Arc::new(move |x| v.eval(u.inverse_eval(x)));
            let df: Func = Arc::new(move |x| {
                let s = u2.inverse_eval(x);
                v2.derivative(s) / u2.derivative(s)
            });
            transitions.push(NumericDiffeo::from_arcs(l, r, f, Some(df), Vec::new())?);
        }
        ChainAtlas::new(charts, transitions)
    }

    pub fn charts(&self) -> &[IntervalChart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[NumericDiffeo] {
        &self.transitions
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseOrder {
    LeftToRight,
    /// Start from the middle chart and add neighbours right, left, right, ...
    MiddleOut,
}

/// One join of the collapse.
#[derive(Clone, Debug)]
pub struct JoinStep {
    /// Index of the chart added.
    pub chart: usize,
    /// The chart was added on the left of the joined window.
    pub from_left: bool,
    pub p: NumericDiffeo,
    pub q: NumericDiffeo,
    pub glue: Option<Glue>,
    pub p_cert: SmoothCert,
    pub q_cert: SmoothCert,
}

/// A chain collapsed to one chart `W`, with `τ_i = W ∘ φ_i⁻¹` per chart.
#[derive(Clone, Debug)]
pub struct Collapsed {
    pub chart: IntervalChart,
    pub order: CollapseOrder,
    pub presentations: Vec<NumericDiffeo>,
    pub presentation_certs: Vec<SmoothCert>,
    pub steps: Vec<JoinStep>,
    /// All step and presentation certificates merged.
    pub cert: SmoothCert,
}

fn visit_order(m: usize, order: CollapseOrder) -> Vec<usize> {
    match order {
        CollapseOrder::LeftToRight => (0..m).collect(),
        CollapseOrder::MiddleOut => {
            let mid = (m - 1) / 2;
            let (mut lo, mut hi) = (mid, mid);
            let mut out = vec![mid];
            let mut right = true;
            while out.len() < m {
                if (right && hi + 1 < m) || lo == 0 {
                    hi += 1;
                    out.push(hi);
                } else {
                    lo -= 1;
                    out.push(lo);
                }
                right = !right;
            }
            out
        }
    }
}

/// Iterated joins collapsing a chain of at least two charts to one chart
/// on the union.
pub fn collapse_chain(atlas: &ChainAtlas, k: usize, tol: &[f64], order: CollapseOrder) -> Result<Collapsed> {
    let charts = &atlas.charts;
    let m = charts.len();
    if m < 2 {
        return Err(Error::InvalidAtlas("collapse needs at least two charts".into()));
    }
    let visit = visit_order(m, order);
    let mut taus: Vec<Option<NumericDiffeo>> = vec![None; m];
    let first = visit[0];
    taus[first] = Some(NumericDiffeo::identity(charts[first].image.0, charts[first].image.1)?);
    let (mut lo, mut hi) = (first, first);
    let mut steps = Vec::new();
    for &j in &visit[1..] {
        let from_left = j < lo;
        let (a, b, c, d, g) = if from_left {
            (charts[j].image.0, charts[lo].image.0, charts[j].image.1, charts[hi].image.1, &atlas.transitions[j])
        } else {
            (charts[lo].image.0, charts[j].image.0, charts[hi].image.1, charts[j].image.1, &atlas.transitions[j - 1])
        };
        let core = join_core(a, b, c, d, g, k, tol).map_err(|e| Error::Chain { index: j, source: Box::new(e) })?;
        // the joined window is the V side when the new chart comes from the left
        let (window_map, active) = if from_left { (&core.q, (b, c)) } else { (&core.p, (b, c)) };
        for tau in taus.iter_mut().flatten() {
            let (rl, rh) = tau.range();
            if rh > active.0 && rl < active.1 {
                *tau = NumericDiffeo::compose(window_map, tau)?;
            }
        }
        taus[j] = Some(if from_left { core.p.clone() } else { core.q.clone() });
        if from_left {
            lo = j;
        } else {
            hi = j;
        }
        steps.push(JoinStep {
            chart: j,
            from_left,
            p: core.p,
            q: core.q,
            glue: core.glue,
            p_cert: core.p_cert,
            q_cert: core.q_cert,
        });
    }
    let presentations: Vec<NumericDiffeo> = taus.into_iter().map(|t| t.expect("every chart visited")).collect();
    let presentation_certs =
        presentations.iter().map(|t| verify_ck_numeric(t, k, tol)).collect::<Result<Vec<_>>>()?;
    let label = charts.iter().map(|c| c.label.as_str()).collect::<Vec<_>>().join("+");
    let chart = assemble(label, charts, &presentations)?;
    let mut all: Vec<SmoothCert> = steps.iter().flat_map(|s| [s.p_cert.clone(), s.q_cert.clone()]).collect();
    all.extend(presentation_certs.iter().cloned());
    let cert = SmoothCert::merge(&all).expect("at least one step");
    Ok(Collapsed { chart, order, presentations, presentation_certs, steps, cert })
}

/// Certificates that two collapses of the same chain differ by a `C^k`
/// reparametrization: `τ_i ∘ σ_i⁻¹` for each chart.
pub fn collapse_agreement(one: &Collapsed, other: &Collapsed, k: usize, tol: &[f64]) -> Result<Vec<SmoothCert>> {
    if one.presentations.len() != other.presentations.len() {
        return Err(Error::domain("collapses of different chains"));
    }
    one.presentations
        .iter()
        .zip(&other.presentations)
        .map(|(t, s)| {
            let rho = NumericDiffeo::compose(t, &s.inverse()?)?;
            verify_ck_numeric(&rho, k, tol)
        })
        .collect()
}

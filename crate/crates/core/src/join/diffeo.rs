use std::fmt;
use std::sync::Arc;

use crate::interp::MonotoneCubic;
use crate::numdiff::{central_derivative, one_sided_derivative, Direction, RichardsonConfig};
use crate::{Error, Result};

/// Number of cells in the default sample grid.
pub const GRID_CELLS: usize = 1 << 12;

pub(crate) type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Identity,
    Interpolated(MonotoneCubic),
    Callable { f: Func, df: Option<Func> },
}

/// Strictly monotone map of a bounded open interval, kept with a sample
/// grid and the points where it was assembled from pieces.
#[derive(Clone)]
pub struct NumericDiffeo {
    lo: f64,
    hi: f64,
    repr: Repr,
    seams: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl fmt::Debug for NumericDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.repr {
            Repr::Identity => "identity",
            Repr::Interpolated(_) => "interpolated",
            Repr::Callable { .. } => "callable",
        };
        f.debug_struct("NumericDiffeo")
            .field("domain", &(self.lo, self.hi))
            .field("kind", &kind)
            .field("seams", &self.seams)
            .field("grid", &self.xs.len())
            .finish()
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("({lo}; {hi}) is not a bounded open interval")));
    }
    Ok(())
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let step = (hi - lo) / cells as f64;
    (0..=cells).map(|i| if i == cells { hi } else { lo + i as f64 * step }).collect()
}

fn strictly_monotone(ys: &[f64]) -> bool {
    let up = ys.windows(2).all(|w| w[1] > w[0]);
    let down = ys.windows(2).all(|w| w[1] < w[0]);
    ys.iter().all(|y| y.is_finite()) && (up || down)
}

impl NumericDiffeo {
    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        let xs = uniform_grid(lo, hi, GRID_CELLS);
        Ok(NumericDiffeo { lo, hi, repr: Repr::Identity, seams: Vec::new(), ys: xs.clone(), xs })
    }

    /// Monotone cubic interpolant through the samples; the domain is the
    /// sample range.
    pub fn from_samples(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let interp = MonotoneCubic::new(xs.clone(), ys.clone())?;
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        Ok(NumericDiffeo { lo, hi, repr: Repr::Interpolated(interp), seams: Vec::new(), xs, ys })
    }

    /// A callable map, sampled on `GRID_CELLS` cells and checked strictly
    /// monotone there. `df` is the derivative when known in closed form.
    pub fn from_fn(
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Result<Self> {
        Self::from_arcs(lo, hi, Arc::new(f), df.map(Arc::from), Vec::new())
    }

    pub(crate) fn from_arcs(lo: f64, hi: f64, f: Func, df: Option<Func>, seams: Vec<f64>) -> Result<Self> {
        check_interval(lo, hi)?;
        let xs = uniform_grid(lo, hi, GRID_CELLS);
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        if !strictly_monotone(&ys) {
            return Err(Error::domain(format!("map is not strictly monotone on ({lo}; {hi})")));
        }
        Ok(NumericDiffeo { lo, hi, repr: Repr::Callable { f, df }, seams: Vec::new(), xs, ys }.with_seams(seams))
    }

    /// Records assembly points; those outside the open domain are dropped.
    pub fn with_seams(mut self, seams: impl IntoIterator<Item = f64>) -> Self {
        let (lo, hi) = (self.lo, self.hi);
        self.seams.extend(seams.into_iter().filter(|&s| s > lo && s < hi));
        self.seams.sort_by(f64::total_cmp);
        self.seams.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (hi - lo));
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Image of the domain, as an ordered pair.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.eval(self.lo), self.eval(self.hi));
        (a.min(b), a.max(b))
    }

    pub fn seams(&self) -> &[f64] {
        &self.seams
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.repr, Repr::Identity)
    }

    pub fn is_increasing(&self) -> bool {
        self.ys[self.ys.len() - 1] > self.ys[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Identity => x,
            Repr::Interpolated(m) => m.eval(x),
            Repr::Callable { f, .. } => f(x),
        }
    }

    /// First derivative: closed form when available, else extrapolated
    /// differences (one-sided within a step of the domain ends).
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Identity => 1.0,
            Repr::Interpolated(m) => m.derivative(x),
            Repr::Callable { df: Some(df), .. } => df(x),
            Repr::Callable { f, df: None } => {
                let f = |x: f64| f(x);
                let h = ((self.hi - self.lo) / 64.0).min(0.0625);
                let cfg = RichardsonConfig::new(h, 10);
                let est = if x - self.lo < h {
                    one_sided_derivative(&f, x, 1, Direction::Forward, cfg)
                } else if self.hi - x < h {
                    one_sided_derivative(&f, x, 1, Direction::Backward, cfg)
                } else {
                    central_derivative(&f, x, cfg)
                };
                est.value
            }
        }
    }

    pub(crate) fn as_func(&self) -> Func {
        match &self.repr {
            Repr::Identity => Arc::new(|x| x),
            Repr::Interpolated(m) => {
                let m = m.clone();
                Arc::new(move |x| m.eval(x))
            }
            Repr::Callable { f, .. } => f.clone(),
        }
    }

    pub(crate) fn derivative_func(&self) -> Func {
        let me = self.clone();
        Arc::new(move |x| me.derivative(x))
    }

    /// Solves `self(x) = y` by bisection on the domain.
    pub fn inverse_eval(&self, y: f64) -> f64 {
        inverse_by_bisection(&*self.as_func(), self.lo, self.hi, self.is_increasing(), y)
    }

    pub fn inverse(&self) -> Result<NumericDiffeo> {
        let (lo, hi) = self.range();
        if self.is_identity() {
            return NumericDiffeo::identity(lo, hi);
        }
        let f = self.as_func();
        let (dlo, dhi, inc) = (self.lo, self.hi, self.is_increasing());
        let fi: Func = Arc::new(move |y| inverse_by_bisection(&*f, dlo, dhi, inc, y));
        let d = self.derivative_func();
        let fi2 = fi.clone();
        let dfi: Func = Arc::new(move |y| 1.0 / d(fi2(y)));
        let seams: Vec<f64> = self.seams.iter().map(|&s| self.eval(s)).collect();
        NumericDiffeo::from_arcs(lo, hi, fi, Some(dfi), seams)
    }

    /// `outer ∘ inner` on the domain of `inner`, whose range must lie in the
    /// domain of `outer`.
    pub fn compose(outer: &NumericDiffeo, inner: &NumericDiffeo) -> Result<NumericDiffeo> {
        let (rlo, rhi) = inner.range();
        let slack = 1e-9 * (outer.hi - outer.lo);
        if rlo < outer.lo - slack || rhi > outer.hi + slack {
            return Err(Error::domain(format!(
                "range ({rlo}; {rhi}) is not inside the domain ({}; {})",
                outer.lo, outer.hi
            )));
        }
        if outer.is_identity() {
            return Ok(inner.clone());
        }
        if inner.is_identity() {
            return outer.restrict(inner.lo, inner.hi);
        }
        let (f, g) = (outer.as_func(), inner.as_func());
        let (df, dg) = (outer.derivative_func(), inner.derivative_func());
        let g2 = g.clone();
        let h: Func = Arc::new(move |x| f(g(x)));
        let dh: Func = Arc::new(move |x| df(g2(x)) * dg(x));
        let mut seams = inner.seams.clone();
        seams.extend(
            outer
                .seams
                .iter()
                .filter(|&&s| s > rlo && s < rhi)
                .map(|&s| inner.inverse_eval(s)),
        );
        NumericDiffeo::from_arcs(inner.lo, inner.hi, h, Some(dh), seams)
    }

    /// The same map on a subinterval.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<NumericDiffeo> {
        let slack = 1e-9 * (self.hi - self.lo);
        if lo < self.lo - slack || hi > self.hi + slack {
            return Err(Error::domain(format!("({lo}; {hi}) is not inside ({}; {})", self.lo, self.hi)));
        }
        match &self.repr {
            Repr::Identity => NumericDiffeo::identity(lo, hi),
            Repr::Interpolated(_) | Repr::Callable { .. } => {
                let df = match &self.repr {
                    Repr::Callable { df: None, .. } => None,
                    _ => Some(self.derivative_func()),
                };
                NumericDiffeo::from_arcs(lo, hi, self.as_func(), df, self.seams.clone())
            }
        }
    }

    /// Largest deviation between the two maps on this map's grid.
    pub fn max_deviation(&self, other: &NumericDiffeo) -> f64 {
        self.xs.iter().map(|&x| (self.eval(x) - other.eval(x)).abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn inverse_by_bisection(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, increasing: bool, y: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let below = if increasing { f(m) < y } else { f(m) > y };
        if below {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

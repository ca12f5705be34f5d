use std::fmt;
use std::sync::Arc;

use super::germ::Orientation;
use crate::interp::MonotoneCubic;
use crate::{Error, Result};

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A germ known only as a callable on `R∖0`.
///
/// Produced when exact composition is not closed in power sums, by numeric
/// inversion, or from per-side samples.
#[derive(Clone)]
pub struct NumericGerm {
    map: Callable,
    orientation: Orientation,
}

impl fmt::Debug for NumericGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericGerm").field("orientation", &self.orientation).finish_non_exhaustive()
    }
}

impl NumericGerm {
    /// Wraps a callable; `map(0)` is never consulted.
    pub fn from_fn<F>(map: F, orientation: Orientation) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        NumericGerm {
            map: Arc::new(map),
            orientation,
        }
    }

    /// Interpolates `(|x|, h(x))` samples per side through `(0, 0)`.
    ///
    /// `neg` holds `(t, h(-t))`, `pos` holds `(t, h(t))`, both with `t > 0`.
    pub fn from_samples(neg: Vec<(f64, f64)>, pos: Vec<(f64, f64)>) -> Result<Self> {
        let side = |samples: Vec<(f64, f64)>| -> Result<MonotoneCubic> {
            let (mut ts, mut ys): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
            if ts.iter().any(|&t| t <= 0.0) {
                return Err(Error::domain("germ samples must have t > 0"));
            }
            ts.insert(0, 0.0);
            ys.insert(0, 0.0);
            MonotoneCubic::new(ts, ys)
        };
        let n = side(neg)?;
        let p = side(pos)?;
        let (n_sign, p_sign) = (n.ys()[1].signum(), p.ys()[1].signum());
        if n_sign == p_sign {
            return Err(Error::domain("germ samples have the same sign on both sides"));
        }
        let orientation = Orientation::from_sign(p_sign);
        Ok(Self::from_fn(
            move |x| {
                if x < 0.0 {
                    n.eval(-x)
                } else {
                    p.eval(x)
                }
            },
            orientation,
        ))
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            (self.map)(x)
        }
    }

    /// `self ∘ inner` as a callable.
    pub fn compose(&self, inner: &NumericGerm) -> NumericGerm {
        let (f, g) = (self.clone(), inner.clone());
        NumericGerm::from_fn(move |x| f.eval(g.eval(x)), self.orientation.compose(inner.orientation))
    }

    /// Inverse by bracketed bisection to machine precision.
    pub fn invert(&self) -> NumericGerm {
        let h = self.clone();
        NumericGerm::from_fn(move |y| h.solve(y), self.orientation)
    }

    /// The unique `x` with `h(x) = y`.
    fn solve(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let s = match self.orientation {
            Orientation::Preserving => y.signum(),
            Orientation::Reversing => -y.signum(),
        };
        // |h(s·t)| increases in t; bracket then bisect
        let target = y.abs();
        let g = |t: f64| self.eval(s * t).abs();
        let mut lo = 0.0f64;
        let mut hi = target.max(f64::MIN_POSITIVE);
        let mut guard = 0;
        while g(hi) < target && guard < 2100 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
        }
        let mut guard = 0;
        while g(hi) >= target && hi > f64::MIN_POSITIVE && guard < 2100 {
            let half = hi / 2.0;
            if g(half) < target {
                lo = half;
                break;
            }
            hi = half;
            guard += 1;
        }
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // pick the closer endpoint
        let x = if (g(lo) - target).abs() <= (g(hi) - target).abs() { lo } else { hi };
        s * x
    }
}

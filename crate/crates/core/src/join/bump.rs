use crate::{Error, Result};

/// `C^∞` step from `0` (for `t ≤ 0`) to `1` (for `t ≥ 1`),
/// `e(t) / (e(t) + e(1-t))` with `e(t) = exp(-1/t)`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let e0 = (-1.0 / t).exp();
        let e1 = (-1.0 / (1.0 - t)).exp();
        e0 / (e0 + e1)
    }
}

/// Smooth function that vanishes outside `(l0, r0)`, equals `1` on
/// `[l1, r1]` and is monotone on each ramp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    l0: f64,
    l1: f64,
    r1: f64,
    r0: f64,
}

pub fn bump_plateau(l0: f64, l1: f64, r1: f64, r0: f64) -> Result<Bump> {
    if !(l0 < l1 && l1 <= r1 && r1 < r0) {
        return Err(Error::domain(format!("bump needs l0 < l1 <= r1 < r0, got {l0}, {l1}, {r1}, {r0}")));
    }
    Ok(Bump { l0, l1, r1, r0 })
}

impl Bump {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.l0 || x >= self.r0 {
            return 0.0;
        }
        if x >= self.l1 && x <= self.r1 {
            return 1.0;
        }
        smooth_step((x - self.l0) / (self.l1 - self.l0)) * smooth_step((self.r0 - x) / (self.r0 - self.r1))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.l0, self.r0)
    }

    pub fn plateau(&self) -> (f64, f64) {
        (self.l1, self.r1)
    }
}

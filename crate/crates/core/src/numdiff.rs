//! Finite differences with Richardson extrapolation.
//!
//! Steps are halved from `base_step` for `levels` levels. The extrapolation
//! table is scanned for the entry with the smallest error estimate.
//! [`extrapolate`] stops the scan once the diagonal starts to drift away
//! (round-off dominates); [`extrapolate_full`] always scans every row.

/// One-sided stencil direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RichardsonConfig {
    pub base_step: f64,
    /// Number of step sizes, including the base step.
    pub levels: usize,
}

impl RichardsonConfig {
    pub const fn new(base_step: f64, levels: usize) -> Self {
        RichardsonConfig { base_step, levels }
    }

    /// Steps `2^-4, 2^-5, ..., 2^-16`.
    pub const GERM: RichardsonConfig = RichardsonConfig::new(0.0625, 13);

    pub fn refined(self) -> Self {
        RichardsonConfig {
            base_step: self.base_step / 2.0,
            levels: self.levels + 1,
        }
    }
}

/// Extrapolated derivative value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    /// Cauchy-type convergence test: the error estimate is within `rel`
    /// relative to `max(|value|, 1)`.
    pub fn converged(&self, rel: f64) -> bool {
        self.value.is_finite() && self.error <= rel * self.value.abs().max(1.0)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `order`-th one-sided difference quotient of `f` at `x` with step `h`.
pub fn difference_quotient<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    order: usize,
    h: f64,
    dir: Direction,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..=order {
        let c = binomial(order, i);
        match dir {
            Direction::Forward => {
                let sign = if (order - i).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += sign * c * f(x + i as f64 * h);
            }
            Direction::Backward => {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * c * f(x - i as f64 * h);
            }
        }
    }
    acc / h.powi(order as i32)
}

/// Richardson extrapolation of a sequence of estimates taken at halving steps.
///
/// `ratio_power` is 1 for one-sided stencils (error in all powers of `h`) and
/// 2 for central stencils (even powers only).
pub fn extrapolate(samples: &[f64], ratio_power: i32) -> Estimate {
    extrapolate_with(samples, ratio_power, true)
}

/// Like [`extrapolate`], but scans the whole table. Suited to maps that are
/// flat to all orders near the point, where coarse steps see a
/// non-polynomial error and the early stop would trigger too soon.
pub fn extrapolate_full(samples: &[f64], ratio_power: i32) -> Estimate {
    extrapolate_with(samples, ratio_power, false)
}

/// Rows scanned before the drift test may stop the scan. Two coarse
/// quotients can agree by accident and give a spuriously small error.
const MIN_ROWS: usize = 4;

fn extrapolate_with(samples: &[f64], ratio_power: i32, stop_on_drift: bool) -> Estimate {
    let mut best = Estimate {
        value: samples.first().copied().unwrap_or(f64::NAN),
        error: f64::INFINITY,
    };
    let mut prev_row: Vec<f64> = Vec::new();
    for (i, &s) in samples.iter().enumerate() {
        let mut row = Vec::with_capacity(i + 1);
        row.push(s);
        for m in 1..=i {
            let factor = 2f64.powi(ratio_power * m as i32) - 1.0;
            let t = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / factor;
            let err = (t - row[m - 1]).abs().max((t - prev_row[m - 1]).abs());
            if err < best.error {
                best = Estimate {
                    value: t,
                    error: err,
                };
            }
            row.push(t);
        }
        if stop_on_drift && i >= MIN_ROWS && (row[i] - prev_row[i - 1]).abs() >= 2.0 * best.error {
            // round-off has taken over
            break;
        }
        prev_row = row;
    }
    best
}

/// One-sided derivative of order `order` at `x` by extrapolated differences.
pub fn one_sided_derivative<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    order: usize,
    dir: Direction,
    cfg: RichardsonConfig,
) -> Estimate {
    let samples: Vec<f64> = (0..cfg.levels)
        .map(|i| {
            let h = cfg.base_step / 2f64.powi(i as i32);
            difference_quotient(f, x, order, h, dir)
        })
        .collect();
    extrapolate(&samples, 1)
}

/// [`one_sided_derivative`] with the full-table scan.
pub fn one_sided_derivative_full<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    order: usize,
    dir: Direction,
    cfg: RichardsonConfig,
) -> Estimate {
    let samples: Vec<f64> = (0..cfg.levels)
        .map(|i| difference_quotient(f, x, order, cfg.base_step / 2f64.powi(i as i32), dir))
        .collect();
    extrapolate_full(&samples, 1)
}

/// First derivative by extrapolated central differences.
pub fn central_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, cfg: RichardsonConfig) -> Estimate {
    let samples: Vec<f64> = (0..cfg.levels)
        .map(|i| {
            let h = cfg.base_step / 2f64.powi(i as i32);
            (f(x + h) - f(x - h)) / (2.0 * h)
        })
        .collect();
    extrapolate(&samples, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_recovered() {
        let f = |x: f64| 1.0 + 2.0 * x - 3.0 * x * x + 0.5 * x.powi(4);
        let cfg = RichardsonConfig::new(0.125, 8);
        let d1 = one_sided_derivative(&f, 0.5, 1, Direction::Forward, cfg);
        assert!((d1.value - (2.0 - 3.0 + 0.25)).abs() < 1e-9, "{d1:?}");
        let d2 = one_sided_derivative(&f, 0.5, 2, Direction::Backward, cfg);
        assert!((d2.value - (-6.0 + 1.5)).abs() < 1e-7, "{d2:?}");
        let d4 = one_sided_derivative(&f, 0.0, 4, Direction::Forward, cfg);
        assert!((d4.value - 12.0).abs() < 1e-5, "{d4:?}");
    }

    #[test]
    fn central_derivative_of_exp() {
        let est = central_derivative(&f64::exp, 1.0, RichardsonConfig::new(0.1, 8));
        assert!((est.value - 1f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn divergent_quotients_do_not_converge() {
        let f = |t: f64| t.sqrt();
        let est = one_sided_derivative(&f, 0.0, 1, Direction::Forward, RichardsonConfig::GERM);
        assert!(!est.converged(1e-3), "{est:?}");
        let full = one_sided_derivative_full(&f, 0.0, 1, Direction::Forward, RichardsonConfig::GERM);
        assert!(!full.converged(1e-3), "{full:?}");
    }

    #[test]
    fn coincident_coarse_quotients_do_not_stop_the_scan() {
        // The first two backward quotients differ by only 2.4e-4.
        let f = |x: f64| 0.25 * x - 0.125 * x * x - 1.25 * x.powi(3);
        let est = one_sided_derivative(&f, 0.0, 1, Direction::Backward, RichardsonConfig::GERM);
        assert_eq!(est.value, 0.25);
    }

    #[test]
    fn full_scan_reaches_past_a_nearby_singularity() {
        // Branch point at -1/27.
        let f = |x: f64| (1.0 + 27.0 * x).sqrt();
        let est = one_sided_derivative_full(&f, 0.0, 1, Direction::Backward, RichardsonConfig::GERM);
        assert!(est.converged(1e-9) && (est.value - 13.5).abs() < 1e-8, "{est:?}");
    }
}

//! Adaptive composite Simpson quadrature.

/// Default absolute tolerance.
pub const SIMPSON_TOL: f64 = 1e-10;

/// Upper bound on the number of subintervals.
pub const MAX_INTERVALS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the local Richardson error estimates.
    pub error: f64,
    pub intervals: usize,
    /// The interval cap was hit before every piece met its tolerance.
    pub capped: bool,
}

struct Piece {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

/// `∫_a^b f` to absolute tolerance `tol`, splitting the tolerance in
/// proportion to interval width.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0, intervals: 0, capped: false };
    }
    if b < a {
        let q = adaptive_simpson(f, b, a, tol);
        return Quadrature { value: -q.value, ..q };
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Piece { a, b, fa, fm, fb, whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol }];
    let mut out = Quadrature { value: 0.0, error: 0.0, intervals: 1, capped: false };
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        let tiny = m <= p.a || m >= p.b;
        if delta.abs() <= 15.0 * p.tol || tiny || out.intervals >= MAX_INTERVALS {
            if delta.abs() > 15.0 * p.tol {
                out.capped = true;
            }
            out.value += left + right + delta / 15.0;
            out.error += delta.abs() / 15.0;
        } else {
            out.intervals += 1;
            let half = 0.5 * p.tol;
            stack.push(Piece { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol: half });
            stack.push(Piece { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol: half });
        }
    }
    out
}

//! One-dimensional minimization along a search direction: a forward-only
//! bracketing phase followed by Brent's parabolic/golden-section method.

use crate::scalar::{lit, Real};

/// Bracketing and Brent parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct LineSearchOptions {
    /// Bracket expansion factor.
    pub growth: f64,
    /// Relative tolerance on the step length.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// First trial step times the direction norm.
    pub initial_step: f64,
}

impl Default for LineSearchOptions {
    fn default() -> Self {
        Self { growth: (1.0 + 5f64.sqrt()) / 2.0, tolerance: 1e-4, max_evaluations: 30, initial_step: 1e-3 }
    }
}

/// Best point found by [`line_minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMinimum<T> {
    pub alpha: T,
    pub value: T,
    pub evaluations: usize,
}

/// Minimizes `f` over `α > 0` starting from the known `f(0) = f0` and a
/// trial step. Non-finite values are treated as `+∞`. The returned point is
/// the best one evaluated, so `value ≤ f0` whenever any trial improved.
pub fn line_minimize<T: Real>(
    mut f: impl FnMut(T) -> T,
    f0: T,
    trial: T,
    opts: &LineSearchOptions,
) -> LineMinimum<T> {
    let mut evals = 0usize;
    let mut best = LineMinimum { alpha: T::zero(), value: f0, evaluations: 0 };
    let mut eval = |alpha: T, evals: &mut usize, best: &mut LineMinimum<T>| {
        *evals += 1;
        let v = f(alpha);
        let v = if v.is_finite() { v } else { T::max_value().unwrap_or(v) };
        if v < best.value {
            best.alpha = alpha;
            best.value = v;
        }
        v
    };
    let budget = opts.max_evaluations.max(3);
    let growth = lit::<T>(opts.growth.max(1.0 + 1e-3));

    // Bracket (a, b, c) with f(b) < f(a), f(b) ≤ f(c).
    let (a, mut b, mut c);
    let (mut fb, mut fc);
    let mut step = trial;
    let mut fs = eval(step, &mut evals, &mut best);
    if fs >= f0 {
        // Contract toward zero until something improves.
        let mut outer = (step, fs);
        loop {
            if evals >= budget {
                best.evaluations = evals;
                return best;
            }
            step *= lit(0.1);
            fs = eval(step, &mut evals, &mut best);
            if fs < f0 {
                break;
            }
            outer = (step, fs);
        }
        a = T::zero();
        b = step;
        fb = fs;
        c = outer.0;
        fc = outer.1;
    } else {
        let mut lo = T::zero();
        b = step;
        fb = fs;
        c = b + growth * (b - lo);
        fc = eval(c, &mut evals, &mut best);
        while fc < fb && evals < budget {
            lo = b;
            b = c;
            fb = fc;
            c = b + growth * (b - lo);
            fc = eval(c, &mut evals, &mut best);
        }
        a = lo;
        if fc < fb {
            best.evaluations = evals;
            return best;
        }
    }
    let _ = fc;

    // Brent on [a, c] seeded with b.
    let cgold = lit::<T>(0.381_966_011_250_105_1);
    let tiny = lit::<T>(1e-21);
    let tol = lit::<T>(opts.tolerance);
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut d = T::zero();
    let mut e = T::zero();
    while evals < budget {
        let xm = (lo + hi) * lit(0.5);
        let tol1 = tol * x.abs() + tiny;
        let tol2 = tol1 * lit(2.0);
        if (x - xm).abs() <= tol2 - (hi - lo) * lit(0.5) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = (q - r) * lit(2.0);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (q * etemp * lit(0.5)).abs() || p <= q * (lo - x) || p >= q * (hi - x)) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = cgold * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d >= T::zero() { x + tol1 } else { x - tol1 };
        let fu = eval(u, &mut evals, &mut best);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    best.evaluations = evals;
    best
}

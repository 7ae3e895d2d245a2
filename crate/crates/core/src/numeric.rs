//! Shared numerical kernels: central differences, bracketed root finding,
//! golden-section minimization, quadrature for integrands with inverse
//! square-root endpoint singularities, and phase unwrapping.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Central difference (f(x+h) - f(x-h)) / 2h.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Step size for central differences, scaled to the magnitude of `x`.
pub fn fd_step(x: f64, h_rel: f64) -> f64 {
    h_rel * (1.0 + x.abs())
}

/// Bisection on a bracketing interval. Requires f(a) and f(b) of opposite
/// (or zero) sign; converges to |b - a| <= tol_x.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_x: f64, max_iter: usize) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "bisection bracket [{lo}, {hi}] does not straddle a root (f: {flo}, {fhi})"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 || (hi - lo).abs() <= tol_x {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration safeguarded by a bracket: steps that leave [lo, hi] or
/// fail to shrink the residual fall back to bisection of the bracket.
pub fn newton_refine<F, D>(f: F, df: D, x0: f64, lo: f64, hi: f64, iters: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0.clamp(lo, hi);
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..iters {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        // maintain the bracket using the sign of f at the endpoints
        let flo = f(lo);
        if flo.signum() == fx.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let step = if d != 0.0 { fx / d } else { f64::INFINITY };
        let cand = x - step;
        x = if cand.is_finite() && cand > lo && cand < hi {
            cand
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}

/// Golden-section search for the minimum of a unimodal function on [a, b].
/// Returns (x_min, f(x_min)).
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_x: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol_x {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// Integrates dx / sqrt(g(x)) over [a, b] where g is smooth, positive inside
/// the interval, and has simple zeros at both endpoints.
///
/// The substitution x = m + w cos(theta) removes the singularities exactly:
/// the integrand becomes w sin(theta) / sqrt(g), a smooth even function at
/// both theta = 0 and theta = pi, so the equally weighted midpoint rule
/// (the Gauss-Chebyshev rule for this weight) converges spectrally. Nodes
/// are doubled until successive estimates agree to `rel_tol`.
pub fn integrate_inverse_sqrt<G: Fn(f64) -> f64>(
    g: G,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::InvalidInput(format!(
            "integration interval [{a}, {b}] is empty"
        )));
    }
    let m = 0.5 * (a + b);
    let w = 0.5 * (b - a);
    let eval = |n: usize| -> Result<f64> {
        let mut sum = 0.0;
        for k in 0..n {
            let theta = (2.0 * k as f64 + 1.0) * PI / (2.0 * n as f64);
            let x = m + w * theta.cos();
            let gx = g(x);
            if !(gx > 0.0) {
                return Err(Error::Numerical(format!(
                    "integrand not positive inside interval: g({x}) = {gx}"
                )));
            }
            sum += w * theta.sin() / gx.sqrt();
        }
        Ok(sum * PI / n as f64)
    };
    let mut n = 16;
    let mut prev = eval(n)?;
    while n < max_nodes {
        n *= 2;
        let cur = eval(n)?;
        if (cur - prev).abs() <= rel_tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "singular-endpoint quadrature did not converge with {n} nodes"
    )))
}

/// 5-point Gauss-Legendre rule on [a, b].
pub fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_08,
        0.478_628_670_499_366_47,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
    ];
    let m = 0.5 * (a + b);
    let w = 0.5 * (b - a);
    let mut sum = 0.0;
    for (t, wt) in NODES.iter().zip(WEIGHTS) {
        sum += wt * f(m + w * t);
    }
    sum * w
}

/// Cumulative integral of f at the given nodes: `out[j]` = integral from
/// `nodes[0]` to `nodes[j]`, each panel by the 5-point Gauss rule.
pub fn cumulative_gauss5<F: Fn(f64) -> f64>(f: F, nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    for pair in nodes.windows(2) {
        acc += gauss5(&f, pair[0], pair[1]);
        out.push(acc);
    }
    out
}

/// Wraps an angle difference into (-pi, pi].
pub fn wrap_to_pi(d: f64) -> f64 {
    let r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Continuously unwraps a sequence of principal-value angles, assuming the
/// true change between neighbours is below pi in magnitude.
pub fn unwrap_phases(principal: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(principal.len());
    let mut prev_raw = match principal.first() {
        Some(&v) => {
            out.push(v);
            v
        }
        None => return out,
    };
    let mut prev_unwrapped = prev_raw;
    for &raw in &principal[1..] {
        prev_unwrapped += wrap_to_pi(raw - prev_raw);
        prev_raw = raw;
        out.push(prev_unwrapped);
    }
    out
}

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn format_g17(v: f64) -> String {
    format!("{v:.16e}")
}

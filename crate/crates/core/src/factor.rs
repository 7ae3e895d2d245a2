//! Factor-function operations: evaluation in split form, contributions
//! Lambda = {H, f} / f (closed form and generic), signatures Gamma, and the
//! H-dependent exponents applied to the base factor.
//!
//! Both factor families satisfy the factorization condition
//! |f|^2 = a^2 + b^2 p^2 = delta(H) on the energy shell; that identity is
//! the working oracle for every formula in this module. g-kind factors
//! c - i d p are stored with (a, b) = (c, -d) so a single split form serves
//! both ansatz signs.

use crate::error::{Error, Result};
use crate::numeric::{central_diff, fd_step};
use crate::system::{
    eval_hamiltonian, require_domain, FactorSpec, PhasePoint, PhiValues, Sign, System,
};
use num_complex::Complex64;

/// Relative step for the x-derivatives inside the generic contribution:
/// O(h^2) truncation stays well under the 1e-8 closed-vs-generic tolerance.
const CONTRIBUTION_FD_STEP: f64 = 1e-6;

/// A factor function evaluated at one phase point.
#[derive(Debug, Clone, Copy)]
pub struct FactorEval {
    /// Real part of the split form.
    pub a: f64,
    /// Imaginary coefficient: value = a + i b p.
    pub b: f64,
    pub value: Complex64,
    /// The factorization function delta(H) at this energy.
    pub delta: f64,
}

/// phi_{+1}, phi_{-1} at energy E (tilde-phi for the curved radial family).
pub fn phi(sys: &dyn System, e: f64) -> Result<PhiValues> {
    sys.phi(e)
}

/// Evaluates a factor function at a phase point.
pub fn eval_factor(sys: &dyn System, spec: FactorSpec, pt: PhasePoint) -> Result<FactorEval> {
    require_domain(sys, pt.x)?;
    let e = eval_hamiltonian(sys, pt)?;
    sys.factor_energy_bounds()?.require(e)?;
    let split = sys.factor_split(spec, pt.x, e)?;
    Ok(FactorEval {
        a: split.a,
        b: split.b,
        value: split.value(pt.p),
        delta: split.delta,
    })
}

/// Closed-form contribution of a shipped factor function.
pub fn contribution_closed(
    sys: &dyn System,
    spec: FactorSpec,
    x: f64,
    e: f64,
) -> Result<Complex64> {
    require_domain(sys, x)?;
    sys.factor_energy_bounds()?.require(e)?;
    sys.contribution_closed(spec, x, e)
}

/// Contribution of an arbitrary split-form factor a(x) + i b(x) p, with the
/// x-derivatives taken by central differences at fixed H:
///
///   Lambda = i [2 (E - V)(a' b - b' a) + V' b a] / delta,
///
/// where delta = a^2 + b^2 (E - V) comes from the factorization condition.
pub fn contribution_generic<A, B>(
    sys: &dyn System,
    a_fn: A,
    b_fn: B,
    x: f64,
    e: f64,
) -> Result<Complex64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    require_domain(sys, x)?;
    let v = sys.potential(x);
    let p2 = e - v;
    let h = fd_step(x, CONTRIBUTION_FD_STEP);
    let a = a_fn(x);
    let b = b_fn(x);
    let da = central_diff(&a_fn, x, h);
    let db = central_diff(&b_fn, x, h);
    let delta = a * a + b * b * p2;
    if delta.abs() < 1e-12 * (1.0 + a * a + b * b * p2.abs()) {
        return Err(Error::InvalidInput(format!(
            "degenerate factor: delta = {delta} at (x={x}, E={e})"
        )));
    }
    let vp = sys.potential_derivative(x);
    Ok(Complex64::new(0.0, (2.0 * p2 * (da * b - db * a) + vp * b * a) / delta))
}

/// Generic contribution of a shipped factor, wiring its split form into
/// [`contribution_generic`]. Must agree with the closed form to 1e-8.
pub fn contribution_generic_for(
    sys: &dyn System,
    spec: FactorSpec,
    x: f64,
    e: f64,
) -> Result<Complex64> {
    sys.factor_energy_bounds()?.require(e)?;
    contribution_generic(
        sys,
        |xx| sys.factor_split(spec, xx, e).map(|s| s.a).unwrap_or(f64::NAN),
        |xx| sys.factor_split(spec, xx, e).map(|s| s.b).unwrap_or(f64::NAN),
        x,
        e,
    )
}

/// Tolerance on |Gamma| - 1: the turning-point ratio of a
/// factorization-condition factor must be a sign.
const SIGNATURE_TOL: f64 = 1e-9;

/// Computes the signature Gamma = a(x_+) / a(x_-) numerically, checks it is
/// a sign, and checks it against the system's tabulated value. A mismatch
/// signals a transcribed-formula bug and is reported as an algebra
/// violation, never patched over.
pub fn signature(sys: &dyn System, spec: FactorSpec, e: f64) -> Result<i32> {
    let (xm, xp) = sys.turning_points(e)?;
    let num = sys.factor_split(spec, xp, e)?.a;
    let den = sys.factor_split(spec, xm, e)?.a;
    if den == 0.0 {
        return Err(Error::AlgebraViolation(format!(
            "signature of {spec}: a(x_-) = 0 at E={e}"
        )));
    }
    let ratio = num / den;
    let sign = if ratio > 0.0 { 1 } else { -1 };
    if (ratio - sign as f64).abs() > SIGNATURE_TOL {
        return Err(Error::AlgebraViolation(format!(
            "signature of {spec} at E={e} is {ratio}, not a sign"
        )));
    }
    let expected = sys.signature_expected(spec)?;
    if sign != expected {
        return Err(Error::AlgebraViolation(format!(
            "signature of {spec} at E={e}: computed {sign}, table says {expected}"
        )));
    }
    Ok(sign)
}

/// The exponent gamma_eps(H) applied to the base factor when assembling the
/// ladder function.
pub fn exponent_gamma(sys: &dyn System, eps: Sign, e: f64) -> Result<f64> {
    sys.factor_energy_bounds()?.require(e)?;
    sys.gamma_exponent(eps, e)
}

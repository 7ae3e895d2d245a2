//! Independent numerical oracles for the construction: finite-difference
//! Poisson brackets, bracket-algebra residuals, the phase-integral
//! representation check, and the sign scans backing the signature table.
//!
//! Everything here deliberately avoids the closed forms it is checking:
//! brackets come from central differences, the representation phase from
//! quadrature of 1 / sqrt(E - V), and shell constancy from direct sampling.

use crate::error::{Error, Result};
use crate::factor;
use crate::ladder::{eval_ladder, ladder_signature};
use crate::numeric::{central_diff, cumulative_gauss5, fd_step, unwrap_phases, wrap_to_pi};
use crate::system::{
    eval_hamiltonian, FactorSpec, PhasePoint, Sign, System,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Default relative step for the bracket stencils: ~1e-10 truncation on
/// smooth factors, leaving margin under the 1e-6 pass threshold for the
/// exponentiated ones.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Step used by the bracket-algebra sweep. Near the inner wall of the
/// radial wells the 1/r^3 curvature puts second-order truncation at the
/// default step around 4e-5; shrinking the step to 2.5e-7 brings the worst
/// truncation under 1e-7 while the rounding floor stays below 1e-9.
pub const GHA_FD_STEP: f64 = 2.5e-7;

/// Pass thresholds of the bracket-algebra report.
pub const ALPHA_RESIDUAL_TOL: f64 = 1e-6;
pub const DELTA_RESIDUAL_TOL: f64 = 1e-8;
pub const BETA_SPREAD_TOL: f64 = 1e-6;
pub const REPRESENTATION_TOL: f64 = 1e-6;

/// Shell samples keep away from the outermost 1% of (x_-, x_+) so the FD
/// stencils never cross a turning point.
pub const SHELL_MARGIN: f64 = 0.01;

/// Central-difference Poisson bracket {F, G} = dF/dx dG/dp - dF/dp dG/dx,
/// with steps h (1 + |x|) and h (1 + |p|). A closure failing on a stencil
/// point (outside its domain, say) propagates as the stencil error.
pub fn poisson_bracket_fd<F, G>(f: F, g: G, pt: PhasePoint, h: f64) -> Result<Complex64>
where
    F: Fn(PhasePoint) -> Result<Complex64>,
    G: Fn(PhasePoint) -> Result<Complex64>,
{
    let hx = h * (1.0 + pt.x.abs());
    let hp = h * (1.0 + pt.p.abs());
    let dx = |func: &dyn Fn(PhasePoint) -> Result<Complex64>| -> Result<Complex64> {
        Ok((func(PhasePoint::new(pt.x + hx, pt.p))? - func(PhasePoint::new(pt.x - hx, pt.p))?)
            / (2.0 * hx))
    };
    let dp = |func: &dyn Fn(PhasePoint) -> Result<Complex64>| -> Result<Complex64> {
        Ok((func(PhasePoint::new(pt.x, pt.p + hp))? - func(PhasePoint::new(pt.x, pt.p - hp))?)
            / (2.0 * hp))
    };
    Ok(dx(&f)? * dp(&g)? - dp(&f)? * dx(&g)?)
}

/// One signature comparison in a report.
#[derive(Debug, Clone, Serialize)]
pub struct SignatureCheck {
    pub factor: String,
    pub expected: i32,
    pub got: i32,
}

/// Residuals of the bracket algebra, factorization, signature, and
/// representation checks at one energy.
#[derive(Debug, Clone, Serialize)]
pub struct GhaReport {
    pub system: String,
    pub energy: f64,
    pub samples: usize,
    /// max over samples and both eps of |{H, A_eps} + i eps alpha A_eps| / |A_eps|.
    pub alpha_residual: f64,
    /// Re of the shell mean of {A_+, A_-} / i (a real function of E).
    pub beta_estimate: f64,
    /// Relative spread of {A_+, A_-} / i across the shell.
    pub beta_spread: f64,
    /// max relative deviation of A_+ A_- from its shell mean.
    pub delta_residual: f64,
    pub signature_checks: Vec<SignatureCheck>,
    /// max over eps and both half-planes of the representation residual (rad).
    pub representation_residual: f64,
    pub passed: bool,
}

/// Deterministic shell samples between the turning points, both momentum
/// half-planes, keeping `margin` of the width away from each end.
pub fn shell_samples(
    sys: &dyn System,
    e: f64,
    n: usize,
    seed: u64,
    margin: f64,
) -> Result<Vec<PhasePoint>> {
    let (xm, xp) = sys.turning_points(e)?;
    let w = xp - xm;
    let mut rng = StdRng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(margin..(1.0 - margin));
            let x = xm + u * w;
            let p = (e - sys.potential(x)).max(0.0).sqrt();
            let eta = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            PhasePoint::new(x, eta * p)
        })
        .collect())
}

/// Samples the shell and fills every residual of the bracket algebra
/// {H, A_eps} = -i eps alpha A_eps, {A_+, A_-} = i beta(H),
/// A_+ A_- = delta(H), plus the signature table and the representation
/// check. Residuals beyond 10x their threshold raise an algebra-violation
/// error carrying the worst sample.
pub fn verify_gha(sys: &dyn System, e: f64, n_samples: usize, seed: u64) -> Result<GhaReport> {
    if n_samples < 10 {
        return Err(Error::InvalidInput(format!(
            "verify_gha needs at least 10 samples (got {n_samples})"
        )));
    }
    let alpha = sys.alpha(e)?;
    let pts = shell_samples(sys, e, n_samples, seed, SHELL_MARGIN)?;

    let ladder_fn = |eps: Sign| {
        move |pt: PhasePoint| -> Result<Complex64> { Ok(eval_ladder(sys, eps, pt)?.value) }
    };
    let h_fn =
        |pt: PhasePoint| -> Result<Complex64> { Ok(Complex64::new(eval_hamiltonian(sys, pt)?, 0.0)) };

    let mut alpha_residual: f64 = 0.0;
    let mut worst: Option<(PhasePoint, f64)> = None;
    let mut betas = Vec::with_capacity(pts.len());
    let mut deltas = Vec::with_capacity(pts.len());
    for &pt in &pts {
        for eps in Sign::BOTH {
            let a = eval_ladder(sys, eps, pt)?.value;
            let bracket = poisson_bracket_fd(h_fn, ladder_fn(eps), pt, GHA_FD_STEP)?;
            let resid = (bracket + Complex64::i() * eps.value() * alpha * a).norm() / a.norm();
            if resid > alpha_residual {
                alpha_residual = resid;
                worst = Some((pt, resid));
            }
        }
        let pm = poisson_bracket_fd(ladder_fn(Sign::Plus), ladder_fn(Sign::Minus), pt, GHA_FD_STEP)?;
        betas.push(pm / Complex64::i());
        let plus = eval_ladder(sys, Sign::Plus, pt)?.value;
        let minus = eval_ladder(sys, Sign::Minus, pt)?.value;
        deltas.push(plus * minus);
    }

    let beta_mean = betas.iter().sum::<Complex64>() / betas.len() as f64;
    let beta_spread = betas
        .iter()
        .map(|b| (b - beta_mean).norm())
        .fold(0.0_f64, f64::max)
        / beta_mean.norm();
    let delta_mean = deltas.iter().sum::<Complex64>() / deltas.len() as f64;
    let delta_residual = deltas
        .iter()
        .map(|d| (d - delta_mean).norm())
        .fold(0.0_f64, f64::max)
        / delta_mean.norm();

    // signatures: the four factors where the variant ships them, and the
    // assembled ladders (expected antiperiodic)
    let mut signature_checks = Vec::new();
    let mut signatures_ok = true;
    let (xm, xp) = sys.turning_points(e)?;
    for spec in FactorSpec::ALL {
        match sys.signature_expected(spec) {
            Ok(expected) => {
                let num = sys.factor_split(spec, xp, e)?.a;
                let den = sys.factor_split(spec, xm, e)?.a;
                let got = if num / den > 0.0 { 1 } else { -1 };
                signatures_ok &= got == expected
                    && (num / den - got as f64).abs() <= 1e-9;
                signature_checks.push(SignatureCheck {
                    factor: spec.to_string(),
                    expected,
                    got,
                });
            }
            Err(_) => break,
        }
    }
    for eps in Sign::BOTH {
        let got = ladder_signature(sys, eps, e)?;
        signatures_ok &= got == -1;
        signature_checks.push(SignatureCheck {
            factor: format!("A_{eps}"),
            expected: -1,
            got,
        });
    }

    let mut representation_residual: f64 = 0.0;
    for eps in Sign::BOTH {
        for eta in Sign::BOTH {
            representation_residual =
                representation_residual.max(verify_representation(sys, eps, e, eta)?);
        }
    }

    let passed = alpha_residual <= ALPHA_RESIDUAL_TOL
        && beta_spread <= BETA_SPREAD_TOL
        && delta_residual <= DELTA_RESIDUAL_TOL
        && representation_residual <= REPRESENTATION_TOL
        && signatures_ok;

    if alpha_residual > 10.0 * ALPHA_RESIDUAL_TOL
        || beta_spread > 10.0 * BETA_SPREAD_TOL
        || delta_residual > 10.0 * DELTA_RESIDUAL_TOL
    {
        let (pt, r) = worst.unwrap_or((pts[0], alpha_residual));
        return Err(Error::AlgebraViolation(format!(
            "bracket residuals far beyond tolerance at E={e} \
             (alpha {alpha_residual:.3e}, beta spread {beta_spread:.3e}, \
             delta {delta_residual:.3e}); worst sample (x={}, p={}) resid {r:.3e}",
            pt.x, pt.p
        )));
    }

    Ok(GhaReport {
        system: crate::system::describe(sys),
        energy: e,
        samples: n_samples,
        alpha_residual,
        beta_estimate: beta_mean.re,
        beta_spread,
        delta_residual,
        signature_checks,
        representation_residual,
        passed,
    })
}

/// Checks the phase-integral representation of A_eps on one momentum
/// half-plane: the continuously unwrapped argument along the shell must
/// equal eps eta (alpha/2) * integral dx' / sqrt(E - V) up to a single
/// constant, fitted here. Returns the max deviation in radians.
///
/// Also checks continuity across the turning points: chaining both
/// half-planes around the contour must close, i.e. alpha * T must be a
/// multiple of 2 pi, verified to 1e-8.
pub fn verify_representation(sys: &dyn System, eps: Sign, e: f64, eta: Sign) -> Result<f64> {
    const N: usize = 1000;
    let (xm, xp) = sys.turning_points(e)?;
    let alpha = sys.alpha(e)?;
    let m = 0.5 * (xm + xp);
    let w = 0.5 * (xp - xm);

    // angle grid x = m + w sin(phi) reaches the turning points without the
    // integrand ever being evaluated at a singular point
    let phis: Vec<f64> = (0..=N)
        .map(|j| -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * j as f64 / N as f64)
        .collect();
    let integrand = |phi: f64| {
        let x = m + w * phi.sin();
        w * phi.cos() / (e - sys.potential(x)).max(f64::MIN_POSITIVE).sqrt()
    };
    let cum = cumulative_gauss5(integrand, &phis);

    let raw: Result<Vec<f64>> = phis
        .iter()
        .map(|&phi| {
            let x = m + w * phi.sin();
            let p = eta.value() * (e - sys.potential(x)).max(0.0).sqrt();
            Ok(sys.ladder_log_polar(eps, PhasePoint::new(x, p))?.1)
        })
        .collect();
    let args = unwrap_phases(&raw?);

    let scale = eps.value() * eta.value() * 0.5 * alpha;
    let devs: Vec<f64> = args.iter().zip(&cum).map(|(a, i)| a - scale * i).collect();
    let fitted = devs.iter().sum::<f64>() / devs.len() as f64;
    let residual = devs
        .iter()
        .map(|d| (d - fitted).abs())
        .fold(0.0_f64, f64::max);

    // closure of the contour: the phase gained over one full cycle is
    // alpha T, which must be a whole number of turns
    let t_full = cum[N];
    let closure = wrap_to_pi(alpha * t_full).abs();
    if closure > 1e-8 {
        return Err(Error::AlgebraViolation(format!(
            "turning-point continuity broken at E={e}: alpha T = {} is {closure:.3e} rad \
             away from a multiple of 2 pi",
            alpha * t_full
        )));
    }

    Ok(residual)
}

/// Report of the sign scans backing the signature table.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub system: String,
    pub n_energies: usize,
    pub n_positions: usize,
    /// min over the grid of the base-factor real part a(x, E).
    pub min_base_a: f64,
    /// max relative deviation of a_{-1} from the finite-difference
    /// derivative of a_{+1} (the hyperbolic-well identity; 0 when not
    /// applicable).
    pub max_identity_dev: f64,
    /// min |da_{+1}/dx| over the grid (must stay away from zero).
    pub min_abs_da: f64,
    pub da_sign_constant: bool,
    /// min |dc_eps/dx| per eps, analytic form.
    pub min_abs_dc: [f64; 2],
    pub dc_sign_constant: [bool; 2],
    pub passed: bool,
}

/// Tolerance of the a_{-1} = a'_{+1} identity, relative to the local scale
/// (the values grow like cosh x on the tails).
pub const APPENDIX_IDENTITY_TOL: f64 = 1e-9;

/// Scans the analytic sign facts over an (energy x position) grid: the
/// base-factor real part never vanishes (it is one-signed), the derivative
/// of the other f-factor real part never vanishes, and dc_eps/dx never
/// vanishes. For the hyperbolic well the identity a_{-1} = a'_{+1} is
/// checked against a central-difference derivative.
pub fn appendix_scan(sys: &dyn System, e_grid: &[f64], x_grid: &[f64]) -> Result<AppendixReport> {
    let base = sys.base_factor()?;
    let hyperbolic_well = base.eps == Sign::Minus;
    let mut min_base_a = f64::INFINITY;
    let mut max_identity_dev: f64 = 0.0;
    let mut min_abs_da = f64::INFINITY;
    let mut da_sign: Option<bool> = None;
    let mut da_sign_constant = true;
    let mut min_abs_dc = [f64::INFINITY; 2];
    let mut dc_sign: [Option<bool>; 2] = [None, None];
    let mut dc_sign_constant = [true, true];
    let mut worst_point = (f64::NAN, f64::NAN);

    for &e in e_grid {
        sys.factor_energy_bounds()?.require(e)?;
        for &x in x_grid {
            let a_base = sys.factor_split(base, x, e)?.a;
            if a_base < min_base_a {
                min_base_a = a_base;
                worst_point = (x, e);
            }

            let other = FactorSpec::f(base.eps.flip());
            let (da, _) = sys.factor_split_derivative(other, x, e)?;
            min_abs_da = min_abs_da.min(da.abs());
            let s = da > 0.0;
            da_sign_constant &= da != 0.0 && *da_sign.get_or_insert(s) == s;

            if hyperbolic_well {
                let h = fd_step(x, 1e-6);
                let fd = central_diff(
                    |xx| sys.factor_split(other, xx, e).map(|v| v.a).unwrap_or(f64::NAN),
                    x,
                    h,
                );
                let dev = (a_base - fd).abs() / (1.0 + a_base.abs());
                if dev > max_identity_dev {
                    max_identity_dev = dev;
                    if dev > APPENDIX_IDENTITY_TOL {
                        worst_point = (x, e);
                    }
                }
            }

            for (i, eps) in Sign::BOTH.iter().enumerate() {
                let (dc, _) = sys.factor_split_derivative(FactorSpec::g(*eps), x, e)?;
                min_abs_dc[i] = min_abs_dc[i].min(dc.abs());
                let s = dc > 0.0;
                dc_sign_constant[i] &= dc != 0.0 && *dc_sign[i].get_or_insert(s) == s;
            }
        }
    }

    let passed = min_base_a > 0.0
        && min_abs_da > 0.0
        && da_sign_constant
        && min_abs_dc.iter().all(|&v| v > 0.0)
        && dc_sign_constant.iter().all(|&ok| ok)
        && (!hyperbolic_well || max_identity_dev <= APPENDIX_IDENTITY_TOL);

    if !passed {
        return Err(Error::AlgebraViolation(format!(
            "sign scan failed for {} near (x={}, E={}): min a = {min_base_a:.3e}, \
             min |da| = {min_abs_da:.3e}, identity dev = {max_identity_dev:.3e}",
            sys.name(),
            worst_point.0,
            worst_point.1
        )));
    }

    Ok(AppendixReport {
        system: crate::system::describe(sys),
        n_energies: e_grid.len(),
        n_positions: x_grid.len(),
        min_base_a,
        max_identity_dev,
        min_abs_da,
        da_sign_constant,
        min_abs_dc,
        dc_sign_constant,
        passed,
    })
}

/// Relative residual of the factorization condition |f|^2 = delta(H) at a
/// phase point; the working form of the origin identities behind both
/// factor families.
pub fn origin_identity_residual(sys: &dyn System, spec: FactorSpec, pt: PhasePoint) -> Result<f64> {
    let f = factor::eval_factor(sys, spec, pt)?;
    Ok((f.value.norm_sqr() - f.delta).abs() / f.delta.abs().max(1e-300))
}

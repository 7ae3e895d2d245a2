//! The three limit regimes of the construction: B -> 0 recovers the
//! Poschl-Teller ladder, kappa -> 0 the flat Kepler-Coulomb ladder, and
//! l -> 0 the zero-angular-momentum form of the curved g-factor. Each check
//! runs two independent evaluation paths and compares them pointwise.

use crate::error::{Error, Result};
use crate::dynamics::frequency_quadrature;
use crate::ladder::eval_ladder;
use crate::numeric::wrap_to_pi;
use crate::system::{
    CurvedKeplerCoulomb, FactorSpec, FlatKeplerCoulomb, PhasePoint, PoschlTeller, RosenMorseII,
    Sign, System,
};
use crate::verify::poisson_bracket_fd;
use num_complex::Complex64;
use serde::Serialize;

/// Pointwise tolerance of the closed-form limit comparisons.
pub const LIMIT_POINTWISE_TOL: f64 = 1e-10;
/// Tolerance of the parameter-continuity comparisons (1e-6 away from the
/// limit point).
pub const LIMIT_CONTINUITY_TOL: f64 = 1e-4;
/// Tolerance of the curved-to-flat ladder convergence at kappa = 1e-6.
pub const CURVED_FLAT_CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct PtLimitReport {
    pub c: f64,
    pub energy: f64,
    pub n_points: usize,
    /// max relative deviation of the B = 0 ladder from
    /// -(C / sqrt(-E)) (sqrt(-E) sinh x -/+ i p cosh x).
    pub max_rel_dev: f64,
    pub alpha_got: f64,
    pub alpha_expected: f64,
    /// max relative deviation of the B = 1e-6 ladder from the B = 0 path.
    pub continuity_dev: f64,
    pub passed: bool,
}

/// Checks the hyperbolic-well ladder against the known Poschl-Teller
/// closed form.
pub fn pt_limit_check(c: f64, e: f64, n_points: usize) -> Result<PtLimitReport> {
    let pt = PoschlTeller::new(c)?;
    pt.window()?.require(e)?;
    let rm_small = RosenMorseII::new(1e-6, c)?;
    let s = (-e).sqrt();

    let pts = shell_grid(&pt, e, n_points)?;
    let mut max_rel_dev: f64 = 0.0;
    let mut continuity_dev: f64 = 0.0;
    for &pt_q in &pts {
        for eps in Sign::BOTH {
            let got = eval_ladder(&pt, eps, pt_q)?.value;
            let expect = Complex64::new(s * pt_q.x.sinh(), -eps.value() * pt_q.p * pt_q.x.cosh())
                * (-c / s);
            max_rel_dev = max_rel_dev.max((got - expect).norm() / expect.norm());
            let near = eval_ladder(&rm_small, eps, pt_q)?.value;
            continuity_dev = continuity_dev.max((near - got).norm() / got.norm());
        }
    }

    let alpha_got = pt.alpha(e)?;
    let alpha_expected = 2.0 * s;
    let passed = max_rel_dev <= LIMIT_POINTWISE_TOL
        && (alpha_got - alpha_expected).abs() <= 1e-12 * alpha_expected
        && continuity_dev <= LIMIT_CONTINUITY_TOL;
    if !passed {
        return Err(Error::LimitViolation(format!(
            "Poschl-Teller limit failed at C={c}, E={e}: dev {max_rel_dev:.3e}, \
             alpha {alpha_got} vs {alpha_expected}, continuity {continuity_dev:.3e}"
        )));
    }
    Ok(PtLimitReport {
        c,
        energy: e,
        n_points: pts.len(),
        max_rel_dev,
        alpha_got,
        alpha_expected,
        continuity_dev,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatKcLimitReport {
    pub b: f64,
    pub l2: f64,
    pub energy: f64,
    /// Residual of the flat ladder against the closed shape, after one
    /// fitted complex constant per shell.
    pub shape_residual: f64,
    /// The fitted constant (1 with this library's normalization).
    pub fitted_constant: (f64, f64),
    pub omega_got: f64,
    pub omega_expected: f64,
    /// max |r^2 p^2 - B r - r^2 E + l^2| over shell samples.
    pub shell_identity_dev: f64,
    /// FD bracket {A_+, A_-} / i against B / sqrt(-E), relative.
    pub bracket_dev: f64,
    /// Curved ladder at kappa = 1e-6 against the flat ladder, after a
    /// fitted constant, in log-polar form.
    pub curved_convergence_dev: f64,
    pub passed: bool,
}

/// Checks the flat Kepler-Coulomb ladder: shape, frequency, the shell
/// factorization identity, the printed bracket value, and convergence of
/// the curved ladder as kappa -> 0.
pub fn flat_kc_limit_check(b: f64, l2: f64, e: f64) -> Result<FlatKcLimitReport> {
    let flat = FlatKeplerCoulomb::new(b, l2)?;
    if !(l2 > 0.0) {
        return Err(Error::InvalidInput(
            "flat limit check needs l2 > 0 for a bound window".into(),
        ));
    }
    flat.window()?.require(e)?;
    let s = (-e).sqrt();
    let pts = shell_grid(&flat, e, 60)?;

    // (i) shape up to one fitted complex constant per shell
    let mut ratios = Vec::new();
    let mut shell_identity_dev: f64 = 0.0;
    for &q in &pts {
        let got = eval_ladder(&flat, Sign::Minus, q)?.value;
        let u = -b / (2.0 * s) + s * q.x;
        let chi = -(2.0 * s / b) * q.p * q.x;
        let expect = Complex64::new(u, q.p * q.x) * Complex64::from_polar(1.0, -chi);
        ratios.push(got / expect);
        shell_identity_dev = shell_identity_dev
            .max((q.x * q.x * q.p * q.p - b * q.x - q.x * q.x * e + l2).abs());
    }
    let fitted = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let shape_residual = ratios
        .iter()
        .map(|r| (r / fitted - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0_f64, f64::max);

    // (ii) frequency
    let omega_expected = 4.0 / b * (-e).powf(1.5);
    let omega_got = frequency_quadrature(&flat, e)?;

    // (iv) printed bracket value via the FD oracle
    let beta_expected = b / s;
    let mut bracket_dev: f64 = 0.0;
    for &q in pts.iter().step_by(7) {
        let ap = |z: PhasePoint| Ok(eval_ladder(&flat, Sign::Plus, z)?.value);
        let am = |z: PhasePoint| Ok(eval_ladder(&flat, Sign::Minus, z)?.value);
        let br = poisson_bracket_fd(ap, am, q, 1e-6)? / Complex64::i();
        bracket_dev = bracket_dev.max((br - Complex64::new(beta_expected, 0.0)).norm() / beta_expected);
    }

    // (v) curved ladder at kappa = 1e-6, compared in log-polar form so the
    // enormous exponent of the base factor cancels into the fitted constant
    let curved = CurvedKeplerCoulomb::new(b, l2, 1e-6)?;
    let mut dlogs = Vec::new();
    let mut dangs = Vec::new();
    for &q in &pts {
        let (lc, ac) = curved.ladder_log_polar(Sign::Minus, q)?;
        let (lf, af) = flat.ladder_log_polar(Sign::Minus, q)?;
        dlogs.push(lc - lf);
        dangs.push(ac - af);
    }
    let dlog_mean = dlogs.iter().sum::<f64>() / dlogs.len() as f64;
    let circ: Complex64 = dangs.iter().map(|&d| Complex64::from_polar(1.0, d)).sum();
    let dang_mean = circ.arg();
    let curved_convergence_dev = dlogs
        .iter()
        .zip(&dangs)
        .map(|(&dl, &da)| (dl - dlog_mean).abs().max(wrap_to_pi(da - dang_mean).abs()))
        .fold(0.0_f64, f64::max);

    let passed = shape_residual <= LIMIT_POINTWISE_TOL
        && (omega_got - omega_expected).abs() <= 1e-8 * omega_expected
        && shell_identity_dev <= 1e-10 * (1.0 + l2)
        && bracket_dev <= 1e-6
        && curved_convergence_dev <= CURVED_FLAT_CONVERGENCE_TOL;
    if !passed {
        return Err(Error::LimitViolation(format!(
            "flat limit failed at B={b}, l2={l2}, E={e}: shape {shape_residual:.3e}, \
             omega {omega_got} vs {omega_expected}, identity {shell_identity_dev:.3e}, \
             bracket {bracket_dev:.3e}, convergence {curved_convergence_dev:.3e}"
        )));
    }
    Ok(FlatKcLimitReport {
        b,
        l2,
        energy: e,
        shape_residual,
        fitted_constant: (fitted.re, fitted.im),
        omega_got,
        omega_expected,
        shell_identity_dev,
        bracket_dev,
        curved_convergence_dev,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LZeroLimitReport {
    pub b: f64,
    pub kappa: f64,
    pub energy: f64,
    pub n_points: usize,
    /// max relative deviation of g_{-1} at l^2 = 0 from its independent
    /// three-term closed form.
    pub max_rel_dev: f64,
    /// g_{-1} at l^2 = 1e-6 against l^2 = 0, pointwise.
    pub continuity_dev: f64,
    /// The exponent is l-independent by construction; largest observed
    /// difference across l^2 values.
    pub gamma_l_dev: f64,
    pub passed: bool,
}

/// Independent closed form of the curved g_{-1} at zero angular momentum:
/// -(B / (2 s)) [ (1+W)/(1-W) + 2E/(B rt (1-W)) + 2 i p s/(B rt (1-W)) ]
/// with W = coth(rt r), s = sqrt(-E - B rt), rt = sqrt(kappa).
fn g_minus_l_zero_closed(b: f64, kappa: f64, e: f64, q: PhasePoint) -> Complex64 {
    let rt = kappa.sqrt();
    let w = 1.0 / (rt * q.x).tanh();
    let s = (-e - b * rt).sqrt();
    let pref = -b / (2.0 * s);
    let term1 = (1.0 + w) / (1.0 - w);
    let term2 = 2.0 * e / (b * rt * (1.0 - w));
    let term3 = 2.0 * q.p * s / (b * rt * (1.0 - w));
    Complex64::new(pref * (term1 + term2), pref * term3)
}

/// Dual-path check of the zero-angular-momentum g-factor.
pub fn l_zero_limit_check(b: f64, kappa: f64, e: f64) -> Result<LZeroLimitReport> {
    let sys0 = CurvedKeplerCoulomb::new(b, 0.0, kappa)?;
    let rt = kappa.sqrt();
    if !(e < -b * rt) {
        return Err(Error::InvalidInput(format!(
            "l = 0 check requires E < -B sqrt(kappa) (E={e})"
        )));
    }
    let sys_eps = CurvedKeplerCoulomb::new(b, 1e-6, kappa)?;

    // single outer turning point: coth(rt x_+) = -E / (B rt)
    let x_plus = (b * rt / -e).atanh() / rt;
    let n = 100;
    let mut max_rel_dev: f64 = 0.0;
    let mut continuity_dev: f64 = 0.0;
    let mut count = 0;
    for j in 0..n {
        let x = 0.05 + (0.999 * x_plus - 0.05) * j as f64 / (n - 1) as f64;
        if x <= 0.0 {
            continue;
        }
        let p2 = e - sys0.potential(x);
        if p2 < 0.0 {
            continue;
        }
        let eta = if j % 2 == 0 { 1.0 } else { -1.0 };
        let q = PhasePoint::new(x, eta * p2.sqrt());
        let lib = sys0
            .factor_split(FactorSpec::g(Sign::Minus), x, e)?
            .value(q.p);
        let closed = g_minus_l_zero_closed(b, kappa, e, q);
        max_rel_dev = max_rel_dev.max((lib - closed).norm() / closed.norm());

        let near = sys_eps
            .factor_split(FactorSpec::g(Sign::Minus), x, e)?
            .value(q.p);
        continuity_dev = continuity_dev.max((near - lib).norm() / lib.norm());
        count += 1;
    }

    // the exponent formula carries no angular momentum
    let g0 = sys0.gamma_exponent(Sign::Minus, e)?;
    let g_eps = sys_eps.gamma_exponent(Sign::Minus, e)?;
    let gamma_l_dev = (g0 - g_eps).abs();

    let passed = max_rel_dev <= LIMIT_POINTWISE_TOL
        && continuity_dev <= LIMIT_CONTINUITY_TOL
        && gamma_l_dev <= 1e-12 * g0.abs();
    if !passed {
        return Err(Error::LimitViolation(format!(
            "l = 0 limit failed at B={b}, kappa={kappa}, E={e}: dev {max_rel_dev:.3e}, \
             continuity {continuity_dev:.3e}, gamma dev {gamma_l_dev:.3e}"
        )));
    }
    Ok(LZeroLimitReport {
        b,
        kappa,
        energy: e,
        n_points: count,
        max_rel_dev,
        continuity_dev,
        gamma_l_dev,
        passed,
    })
}

/// Deterministic shell samples: interior positions with alternating
/// momentum signs.
fn shell_grid(sys: &dyn System, e: f64, n: usize) -> Result<Vec<PhasePoint>> {
    let (xm, xp) = sys.turning_points(e)?;
    let w = xp - xm;
    Ok((0..n)
        .map(|j| {
            let x = xm + (0.02 + 0.96 * j as f64 / (n - 1).max(1) as f64) * w;
            let p = (e - sys.potential(x)).max(0.0).sqrt();
            let eta = if j % 2 == 0 { 1.0 } else { -1.0 };
            PhasePoint::new(x, eta * p)
        })
        .collect())
}

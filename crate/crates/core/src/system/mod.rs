//! Potential families behind a common strategy trait.
//!
//! Each bound-motion system (Rosen-Morse II, Poschl-Teller, curved and flat
//! Kepler-Coulomb) implements [`System`]: the potential and its derivative,
//! the bound-energy window, turning points, the factor functions in split
//! form a + i b p with their factorization functions delta(H), closed-form
//! contributions, expected signatures, the H-dependent exponent, and the
//! closed-form bracket frequency alpha(H). Variants register by name and are
//! selected at runtime through [`build_system`].
//!
//! Conventions used everywhere: H = p^2 + V(x) (mass 1/2), so Hamilton's
//! equations read xdot = 2p, pdot = -V'(x), and the full period is
//! T = integral dx / sqrt(E - V).

mod kepler;
mod rosen_morse;

pub use kepler::{CurvedKeplerCoulomb, FlatKeplerCoulomb};
pub use rosen_morse::{PoschlTeller, RosenMorseII};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Fractional guard band at the window edges: energies this close to
/// e_min or e_max are refused to avoid merged turning points and
/// vanishing frequencies.
pub const WINDOW_GUARD_FRAC: f64 = 1e-10;

/// A point (x, p) of the phase plane. For radial systems x is the radial
/// coordinate r and must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }
}

/// Energy range (e_min, e_max) of bounded, periodic motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyWindow {
    /// Bottom of the well, V_min.
    pub e_min: f64,
    /// Dissociation threshold.
    pub e_max: f64,
}

impl EnergyWindow {
    pub fn width(&self) -> f64 {
        self.e_max - self.e_min
    }

    /// Guard-banded interior test. With an infinite lower edge (the l^2 = 0
    /// radial case) only the upper edge is enforced.
    pub fn contains(&self, e: f64) -> bool {
        let guard = if self.e_min.is_finite() {
            WINDOW_GUARD_FRAC * self.width()
        } else {
            WINDOW_GUARD_FRAC * (1.0 + self.e_max.abs())
        };
        e > self.e_min + guard && e < self.e_max - guard
    }

    pub fn require(&self, e: f64) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::NoBoundMotion(format!(
                "E = {e} outside the bound window ({}, {})",
                self.e_min, self.e_max
            )))
        }
    }

    /// `n` energies spanning the middle (1 - 2 margin) of the window.
    pub fn interior_grid(&self, n: usize, margin: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let f = if n == 1 {
                    0.5
                } else {
                    margin + (1.0 - 2.0 * margin) * i as f64 / (n - 1) as f64
                };
                self.e_min + f * self.width()
            })
            .collect()
    }
}

/// Which of the two factor-function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    F,
    G,
}

/// The two-valued index epsilon = +/-1 carried by factor functions,
/// exponents, and ladder functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn int(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.int())
    }
}

/// Selects one factor function, e.g. f_{-1} or g_{+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorSpec {
    pub kind: FactorKind,
    pub eps: Sign,
}

impl FactorSpec {
    pub const fn f(eps: Sign) -> Self {
        Self { kind: FactorKind::F, eps }
    }
    pub const fn g(eps: Sign) -> Self {
        Self { kind: FactorKind::G, eps }
    }
    pub const ALL: [FactorSpec; 4] = [
        FactorSpec::f(Sign::Plus),
        FactorSpec::f(Sign::Minus),
        FactorSpec::g(Sign::Plus),
        FactorSpec::g(Sign::Minus),
    ];
}

impl std::fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            FactorKind::F => "f",
            FactorKind::G => "g",
        };
        write!(f, "{}_{}", k, self.eps)
    }
}

/// The pair phi_{+1}(H), phi_{-1}(H) (tilde-phi for the radial family),
/// stored as the nonnegative square roots of their defining quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValues {
    pub plus: f64,
    pub minus: f64,
}

impl PhiValues {
    pub fn get(&self, eps: Sign) -> f64 {
        match eps {
            Sign::Plus => self.plus,
            Sign::Minus => self.minus,
        }
    }
}

/// Split form of a factor function at one point: value = a + i b p, with
/// delta(H) the factorization function satisfying a^2 + b^2 p^2 = delta on
/// the energy shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorSplit {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

impl FactorSplit {
    pub fn value(&self, p: f64) -> Complex64 {
        Complex64::new(self.a, self.b * p)
    }

    pub fn norm_sqr(&self, p: f64) -> f64 {
        self.a * self.a + self.b * self.b * p * p
    }
}

/// One interchangeable bound-motion system.
///
/// All methods are pure functions of immutable state: implementations are
/// `Send + Sync` and safe to share across threads without synchronization.
pub trait System: Send + Sync {
    /// Registry name of the variant.
    fn name(&self) -> &'static str;

    /// Parameter list for reports, in declaration order.
    fn params(&self) -> Vec<(&'static str, f64)>;

    /// True for radial systems whose domain is x > 0.
    fn radial(&self) -> bool;

    fn in_domain(&self, x: f64) -> bool {
        x.is_finite() && (!self.radial() || x > 0.0)
    }

    /// V(x). The caller is responsible for the domain check (see
    /// [`eval_potential`]).
    fn potential(&self, x: f64) -> f64;

    /// Analytic V'(x).
    fn potential_derivative(&self, x: f64) -> f64;

    /// Position of the well minimum, in closed form.
    fn well_minimum_x(&self) -> Result<f64>;

    /// Closed-form bound window, or a configuration error when the
    /// parameters do not produce a well. Cheap; used on hot paths.
    fn window(&self) -> Result<EnergyWindow>;

    /// The bound-motion window, cross-checked against golden-section
    /// minimization of the potential.
    fn energy_window(&self) -> Result<EnergyWindow> {
        let w = self.window()?;
        check_window_minimization(self, &w)?;
        Ok(w)
    }

    /// Energy bounds within which the factor functions are defined. Equal
    /// to the bound window except for the curved radial system at l^2 = 0,
    /// where the lower edge opens to -infinity.
    fn factor_energy_bounds(&self) -> Result<EnergyWindow> {
        self.window()
    }

    /// Turning points x_- < x_+ of the shell H = E, by the closed-form
    /// quadratic in tanh x (resp. coth of the scaled radius), Newton-refined
    /// and cross-checked against a bracketed bisection of V(x) = E.
    fn turning_points(&self, e: f64) -> Result<(f64, f64)>;

    /// phi_{+1}, phi_{-1} at energy E.
    fn phi(&self, e: f64) -> Result<PhiValues>;

    /// Split form and delta(H) of the selected factor function.
    fn factor_split(&self, spec: FactorSpec, x: f64, e: f64) -> Result<FactorSplit>;

    /// Analytic x-derivatives (da/dx, db/dx) of the split form at fixed H.
    fn factor_split_derivative(&self, spec: FactorSpec, x: f64, e: f64) -> Result<(f64, f64)>;

    /// Closed-form contribution Lambda of the selected factor function.
    fn contribution_closed(&self, spec: FactorSpec, x: f64, e: f64) -> Result<Complex64>;

    /// Signature of the factor per the tabulated closed forms.
    fn signature_expected(&self, spec: FactorSpec) -> Result<i32>;

    /// H-dependent exponent gamma_eps applied to the base factor.
    fn gamma_exponent(&self, eps: Sign, e: f64) -> Result<f64>;

    /// The factor whose image stays in the right half-plane and therefore
    /// admits principal-log exponentiation.
    fn base_factor(&self) -> Result<FactorSpec>;

    /// True when the assembled ladder takes the complex conjugate of the
    /// base^gamma * g_eps product (equivalently, evaluates it at -p).
    ///
    /// With the factor functions as defined, the product closes the bracket
    /// relation {H, A_eps} = -i eps alpha A_eps directly for the
    /// line-potential family, but for the curved radial family both eps
    /// values of the plain product rotate with the raising sign; its
    /// eps = -1 ladder is the conjugate of the product, which restores the
    /// lowering bracket while leaving the modulus, the signature, and the
    /// exponent untouched.
    fn ladder_conjugates(&self, eps: Sign) -> bool {
        let _ = eps;
        false
    }

    /// Closed-form bracket frequency alpha(H).
    fn alpha(&self, e: f64) -> Result<f64>;

    /// (ln |A_eps|, arg A_eps) at a phase point. The angle is a continuous
    /// composition of principal arguments, not reduced to (-pi, pi].
    ///
    /// The default assembles A_eps = base^gamma * g_eps through the
    /// principal logarithm of the base factor, enforcing Re(base) > 0, and
    /// conjugates the product where [`Self::ladder_conjugates`] says so.
    fn ladder_log_polar(&self, eps: Sign, pt: PhasePoint) -> Result<(f64, f64)> {
        let e = pt.p * pt.p + self.potential(pt.x);
        let base = self.base_factor()?;
        let fb = self.factor_split(base, pt.x, e)?;
        if !(fb.a > 0.0) {
            return Err(Error::BranchSafety(format!(
                "Re({base}) = {} <= 0 at (x={}, p={}), E={e}",
                fb.a, pt.x, pt.p
            )));
        }
        let g = self.factor_split(FactorSpec::g(eps), pt.x, e)?;
        let gamma = self.gamma_exponent(eps, e)?;
        let sigma = if self.ladder_conjugates(eps) { -1.0 } else { 1.0 };
        let q = sigma * pt.p;
        let ln_mod = 0.5 * gamma * fb.norm_sqr(q).ln() + 0.5 * g.norm_sqr(q).ln();
        let ang = gamma * (fb.b * q).atan2(fb.a) + (g.b * q).atan2(g.a);
        Ok((ln_mod, ang))
    }

    /// ln of |A_eps|^2 as a function of energy alone: gamma ln delta_f +
    /// ln delta_g (the factorization condition of the assembled ladder).
    fn ladder_modulus_sq_log(&self, eps: Sign, e: f64) -> Result<f64> {
        let base = self.base_factor()?;
        // delta depends only on E; any in-domain x serves
        let (lo, hi) = self.scan_range();
        let x = 0.5 * (lo + hi);
        let df = self.factor_split(base, x, e)?.delta;
        let dg = self.factor_split(FactorSpec::g(eps), x, e)?.delta;
        if !(df > 0.0) || !(dg > 0.0) {
            return Err(Error::AlgebraViolation(format!(
                "nonpositive factorization function at E={e}: delta_f={df}, delta_g={dg}"
            )));
        }
        let gamma = self.gamma_exponent(eps, e)?;
        Ok(gamma * df.ln() + dg.ln())
    }

    /// Domain range scanned by the sign checks (and tail points).
    fn scan_range(&self) -> (f64, f64);
}

/// Newton-refines closed-form turning points and cross-checks them with an
/// independent bracketed bisection from the well minimum outward.
pub(crate) fn refine_turning_points(
    sys: &dyn System,
    e: f64,
    x0_minus: f64,
    x0_plus: f64,
) -> Result<(f64, f64)> {
    let f = |x: f64| sys.potential(x) - e;
    let newton = |x0: f64| -> f64 {
        let mut x = x0;
        for _ in 0..4 {
            let d = sys.potential_derivative(x);
            if d == 0.0 {
                break;
            }
            let xn = x - f(x) / d;
            if !xn.is_finite() || !sys.in_domain(xn) {
                break;
            }
            x = xn;
        }
        x
    };
    let xm = newton(x0_minus);
    let xp = newton(x0_plus);
    let tol_v = 1e-12 * (1.0 + e.abs());
    if f(xm).abs() > tol_v || f(xp).abs() > tol_v {
        return Err(Error::Numerical(format!(
            "turning points failed to satisfy V(x) = E at E={e}: residuals {} / {}",
            f(xm),
            f(xp)
        )));
    }
    if !(xm < xp) || !(sys.potential(0.5 * (xm + xp)) < e) {
        return Err(Error::Numerical(format!(
            "degenerate turning interval ({xm}, {xp}) at E={e}"
        )));
    }

    // always-on oracle: bracketed bisection of V(x) = E from the minimum
    let xv = sys.well_minimum_x()?;
    let mut hi = xv;
    let mut step = 0.5 * (1.0 + xv.abs());
    for _ in 0..300 {
        if f(hi) > 0.0 {
            break;
        }
        hi += step;
        step *= 2.0;
    }
    let xb_plus = crate::numeric::bisect(f, xv, hi, 1e-12 * (1.0 + xp.abs()), 200)?;
    let mut lo = xv;
    if sys.radial() {
        for _ in 0..2000 {
            if f(lo) > 0.0 {
                break;
            }
            lo *= 0.5;
        }
    } else {
        let mut step = 0.5 * (1.0 + xv.abs());
        for _ in 0..300 {
            if f(lo) > 0.0 {
                break;
            }
            lo -= step;
            step *= 2.0;
        }
    }
    let xb_minus = crate::numeric::bisect(f, lo, xv, 1e-12 * (1.0 + xm.abs()), 200)?;
    if (xb_plus - xp).abs() > 1e-9 * (1.0 + xp.abs())
        || (xb_minus - xm).abs() > 1e-9 * (1.0 + xm.abs())
    {
        return Err(Error::AlgebraViolation(format!(
            "closed-form turning points ({xm}, {xp}) disagree with bisection oracle \
             ({xb_minus}, {xb_plus}) at E={e}"
        )));
    }
    Ok((xm, xp))
}

/// Cross-checks a closed-form window bottom against golden-section
/// minimization of the potential.
pub(crate) fn check_window_minimization<S: System + ?Sized>(
    sys: &S,
    w: &EnergyWindow,
) -> Result<()> {
    if !(w.e_min < w.e_max) {
        return Err(Error::InvalidConfig(format!(
            "empty energy window ({}, {})",
            w.e_min, w.e_max
        )));
    }
    if !w.e_min.is_finite() {
        return Ok(());
    }
    let xv = sys.well_minimum_x()?;
    let span = 2.0 * (1.0 + xv.abs());
    let lo = if sys.radial() {
        (0.25 * xv).max(1e-12)
    } else {
        xv - span
    };
    let (_, vmin) = crate::numeric::golden_min(|x| sys.potential(x), lo, xv + span, 1e-12);
    if (vmin - w.e_min).abs() > 1e-9 * (1.0 + w.e_min.abs()) {
        return Err(Error::AlgebraViolation(format!(
            "closed-form well bottom {} disagrees with numerical minimization {}",
            w.e_min, vmin
        )));
    }
    Ok(())
}

/// V(x) with the domain check.
pub fn eval_potential(sys: &dyn System, x: f64) -> Result<f64> {
    require_domain(sys, x)?;
    Ok(sys.potential(x))
}

/// Analytic V'(x) with the domain check.
pub fn eval_potential_derivative(sys: &dyn System, x: f64) -> Result<f64> {
    require_domain(sys, x)?;
    Ok(sys.potential_derivative(x))
}

/// H(x, p) = p^2 + V(x).
pub fn eval_hamiltonian(sys: &dyn System, pt: PhasePoint) -> Result<f64> {
    require_domain(sys, pt.x)?;
    Ok(pt.p * pt.p + sys.potential(pt.x))
}

pub(crate) fn require_domain(sys: &dyn System, x: f64) -> Result<()> {
    if sys.in_domain(x) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "x = {x} outside the domain of {}",
            sys.name()
        )))
    }
}

/// Raw parameters accepted by the registry; unset fields fall back to the
/// variant's requirements check.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SystemParams {
    #[serde(rename = "B")]
    pub b: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub l2: Option<f64>,
    pub kappa: Option<f64>,
}

fn need(v: Option<f64>, name: &str, system: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidInput(format!("{system} requires parameter {name}")))
}

/// Registered variant names (first entry per line is canonical).
pub fn system_names() -> &'static [&'static str] {
    &["rmii", "pt", "kc", "flatkc"]
}

/// Builds a system by registry name. Recognised names and aliases:
/// `rmii`/`rosen-morse`, `pt`/`poschl-teller`, `kc`/`curved-kc`,
/// `flatkc`/`flat-kc`.
pub fn build_system(name: &str, p: &SystemParams) -> Result<Box<dyn System>> {
    match name {
        "rmii" | "rosen-morse" => Ok(Box::new(RosenMorseII::new(
            need(p.b, "B", "rmii")?,
            need(p.c, "C", "rmii")?,
        )?)),
        "pt" | "poschl-teller" => Ok(Box::new(PoschlTeller::new(need(p.c, "C", "pt")?)?)),
        "kc" | "curved-kc" => Ok(Box::new(CurvedKeplerCoulomb::new(
            need(p.b, "B", "kc")?,
            need(p.l2, "l2", "kc")?,
            need(p.kappa, "kappa", "kc")?,
        )?)),
        "flatkc" | "flat-kc" => Ok(Box::new(FlatKeplerCoulomb::new(
            need(p.b, "B", "flatkc")?,
            need(p.l2, "l2", "flatkc")?,
        )?)),
        other => Err(Error::InvalidInput(format!(
            "unknown system '{other}' (expected one of {:?})",
            system_names()
        ))),
    }
}

/// One-line description of a configured system, for reports.
pub fn describe(sys: &dyn System) -> String {
    let params: Vec<String> = sys
        .params()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("{}({})", sys.name(), params.join(", "))
}

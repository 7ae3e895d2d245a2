//! The Kepler-Coulomb well in the radial coordinate, on the hyperboloid of
//! curvature kappa > 0 and in flat space:
//!
//!   V_kappa(r) = -B sqrt(k) / tanh(sqrt(k) r) + l^2 k / sinh^2(sqrt(k) r)
//!   V_0(r)     = -B / r + l^2 / r^2
//!
//! Writing W = coth(sqrt(k) r), the curved potential is the quadratic
//! l^2 k W^2 - B sqrt(k) W - l^2 k, which gives closed-form turning points
//! and the well shape condition 2 l^2 sqrt(k) < B.
//!
//! Curved factor functions in split form (value = a + i b p):
//!   f_eps: b = sinh(sqrt(k) r), a = phi_eps cosh(sqrt(k) r) - phi_{-eps} sinh(sqrt(k) r),
//!          delta_f = phi_eps^2 - l^2 k;
//!   g_eps: value = c - i d p, d = -1 / (sqrt(k) (W + eps)),
//!          c = d (-(B sqrt(k) + 2 eps l^2 k) W + eps B sqrt(k) - 2(E + l^2 k)) / (2 s),
//!          delta_g = (B^2 + 4 l^2 (l^2 k + E)) / (4 s^2),   s^2 = -E + eps B sqrt(k).
//!
//! The flat system has no factor functions here; its ladder is the closed
//! form (-B/(2 sqrt(-E)) + sqrt(-E) r -/+ i p r) e^{+/- i chi} with
//! chi = -(2 sqrt(-E) / B) p r, which the curved ladder reproduces as
//! kappa -> 0 up to an energy-dependent constant.

use super::{
    refine_turning_points, EnergyWindow, FactorKind, FactorSpec, FactorSplit, PhasePoint,
    PhiValues, Sign, System,
};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Kepler-Coulomb system on the hyperboloid (curvature kappa > 0).
#[derive(Debug, Clone, Copy)]
pub struct CurvedKeplerCoulomb {
    b: f64,
    l2: f64,
    kappa: f64,
}

impl CurvedKeplerCoulomb {
    /// Requires kappa > 0, B > 0 and the well-shape condition
    /// 2 l^2 sqrt(kappa) < B. l2 = 0 is accepted (zero angular momentum);
    /// the bound window then loses its lower edge and only factor-level
    /// operations remain available.
    pub fn new(b: f64, l2: f64, kappa: f64) -> Result<Self> {
        if !b.is_finite() || !l2.is_finite() || !kappa.is_finite() {
            return Err(Error::InvalidConfig(
                "CurvedKeplerCoulomb parameters must be finite".into(),
            ));
        }
        if !(kappa > 0.0) || !(b > 0.0) || l2 < 0.0 || !(2.0 * l2 * kappa.sqrt() < b) {
            return Err(Error::InvalidConfig(format!(
                "CurvedKeplerCoulomb requires kappa > 0, B > 0, l2 >= 0 and \
                 2 l2 sqrt(kappa) < B (got B={b}, l2={l2}, kappa={kappa})"
            )));
        }
        Ok(Self { b, l2, kappa })
    }

    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn l2(&self) -> f64 {
        self.l2
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    fn rt(&self) -> f64 {
        self.kappa.sqrt()
    }

    /// B sqrt(kappa), the effective Coulomb strength.
    fn beta(&self) -> f64 {
        self.b * self.rt()
    }

    /// l^2 kappa, the effective centrifugal strength.
    fn l2k(&self) -> f64 {
        self.l2 * self.kappa
    }

    fn coth(&self, x: f64) -> f64 {
        1.0 / (self.rt() * x).tanh()
    }
}

/// Kepler-Coulomb system in flat space (kappa = 0 limit).
#[derive(Debug, Clone, Copy)]
pub struct FlatKeplerCoulomb {
    b: f64,
    l2: f64,
}

impl FlatKeplerCoulomb {
    pub fn new(b: f64, l2: f64) -> Result<Self> {
        if !b.is_finite() || !l2.is_finite() || !(b > 0.0) || l2 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "FlatKeplerCoulomb requires B > 0 and l2 >= 0 (got B={b}, l2={l2})"
            )));
        }
        Ok(Self { b, l2 })
    }

    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn unsupported<T>(&self, what: &str) -> Result<T> {
        Err(Error::Unsupported {
            system: "flatkc",
            what: format!("{what} (the flat ladder is a closed form without factor functions)"),
        })
    }
}

impl System for CurvedKeplerCoulomb {
    fn name(&self) -> &'static str {
        "kc"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("B", self.b), ("l2", self.l2), ("kappa", self.kappa)]
    }

    fn radial(&self) -> bool {
        true
    }

    fn potential(&self, x: f64) -> f64 {
        let w = self.coth(x);
        self.l2k() * (w * w - 1.0) - self.beta() * w
    }

    fn potential_derivative(&self, x: f64) -> f64 {
        let w = self.coth(x);
        // w^2 - 1 = csch^2, kept in the 1/sinh^2 form so the tails do not
        // underflow to exact zero
        let sh = (self.rt() * x).sinh();
        let dw = -self.rt() / (sh * sh);
        (2.0 * self.l2k() * w - self.beta()) * dw
    }

    fn well_minimum_x(&self) -> Result<f64> {
        if self.l2 == 0.0 {
            return Err(Error::InvalidConfig(
                "no interior minimum at l2 = 0 (potential is monotone)".into(),
            ));
        }
        let w_star = self.beta() / (2.0 * self.l2k());
        Ok((1.0 / w_star).atanh() / self.rt())
    }

    fn window(&self) -> Result<EnergyWindow> {
        if self.l2 == 0.0 {
            return Err(Error::InvalidConfig(
                "bound window requires l2 > 0 for the radial family".into(),
            ));
        }
        Ok(EnergyWindow {
            e_min: -self.b * self.b / (4.0 * self.l2) - self.l2k(),
            e_max: -self.beta(),
        })
    }

    fn factor_energy_bounds(&self) -> Result<EnergyWindow> {
        if self.l2 > 0.0 {
            self.window()
        } else {
            Ok(EnergyWindow {
                e_min: f64::NEG_INFINITY,
                e_max: -self.beta(),
            })
        }
    }

    fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        self.window()?.require(e)?;
        let (l2k, beta) = (self.l2k(), self.beta());
        let disc = beta * beta + 4.0 * l2k * (e + l2k);
        if disc <= 0.0 {
            return Err(Error::NoBoundMotion(format!(
                "turning-point discriminant {disc} <= 0 at E={e}"
            )));
        }
        let w_big = 0.5 * (beta + disc.sqrt()) / l2k;
        let w_small = -(e + l2k) / (l2k * w_big);
        if !(w_small > 1.0) {
            return Err(Error::Numerical(format!(
                "coth turning root {w_small} <= 1 at E={e}"
            )));
        }
        // arcoth is decreasing: the larger W root is the inner turning point
        let x_minus = (1.0 / w_big).atanh() / self.rt();
        let x_plus = (1.0 / w_small).atanh() / self.rt();
        refine_turning_points(self, e, x_minus, x_plus)
    }

    fn phi(&self, e: f64) -> Result<PhiValues> {
        let beta = self.beta();
        if !(e < -beta) {
            return Err(Error::InvalidInput(format!(
                "phi requires E < -B sqrt(kappa) (E={e}, bound={})",
                -beta
            )));
        }
        let plus = (0.5 * (-e + (e * e - beta * beta).sqrt())).sqrt();
        let minus = 0.5 * beta / plus;
        Ok(PhiValues { plus, minus })
    }

    fn factor_split(&self, spec: FactorSpec, x: f64, e: f64) -> Result<FactorSplit> {
        let phi = self.phi(e)?;
        let eps = spec.eps.value();
        match spec.kind {
            FactorKind::F => {
                let pe = phi.get(spec.eps);
                let pm = phi.get(spec.eps.flip());
                let z = self.rt() * x;
                Ok(FactorSplit {
                    a: pe * z.cosh() - pm * z.sinh(),
                    b: z.sinh(),
                    delta: pe * pe - self.l2k(),
                })
            }
            FactorKind::G => {
                let (l2k, beta) = (self.l2k(), self.beta());
                let s = (-e + eps * beta).sqrt();
                let z = self.rt() * x;
                let w = self.coth(x);
                // -1/(rt (W + eps)) = -sinh(z) e^{-eps z} / rt
                let d = -z.sinh() * (-eps * z).exp() / self.rt();
                let num = -(beta + 2.0 * eps * l2k) * w + eps * beta - 2.0 * (e + l2k);
                Ok(FactorSplit {
                    a: d * num / (2.0 * s),
                    b: -d,
                    delta: (self.b * self.b + 4.0 * self.l2 * (l2k + e)) / (4.0 * (-e + eps * beta)),
                })
            }
        }
    }

    fn factor_split_derivative(&self, spec: FactorSpec, x: f64, e: f64) -> Result<(f64, f64)> {
        let phi = self.phi(e)?;
        let eps = spec.eps.value();
        let rt = self.rt();
        match spec.kind {
            FactorKind::F => {
                let pe = phi.get(spec.eps);
                let pm = phi.get(spec.eps.flip());
                let z = rt * x;
                Ok((rt * (pe * z.sinh() - pm * z.cosh()), rt * z.cosh()))
            }
            FactorKind::G => {
                // (W^2 - 1)/(W + eps)^2 = e^{-2 eps z} exactly, and
                // c = (beta + 2 eps l2k)/(2 s rt) + d s, so dc/dx = s * dd/dx
                let s = (-e + eps * self.beta()).sqrt();
                let dd = -(-2.0 * eps * rt * x).exp();
                Ok((s * dd, -dd))
            }
        }
    }

    fn contribution_closed(&self, spec: FactorSpec, x: f64, e: f64) -> Result<Complex64> {
        let phi = self.phi(e)?;
        let eps = spec.eps.value();
        let rt = self.rt();
        let w = self.coth(x);
        let im = match spec.kind {
            // B sqrt(k) / phi_eps = 2 phi_{-eps}
            FactorKind::F => rt * (2.0 * phi.get(spec.eps) - 2.0 * phi.get(spec.eps.flip()) * w),
            FactorKind::G => 2.0 * rt * (-e + eps * self.beta()).sqrt() * (eps - w),
        };
        Ok(Complex64::new(0.0, im))
    }

    fn signature_expected(&self, spec: FactorSpec) -> Result<i32> {
        Ok(match spec.kind {
            FactorKind::F => spec.eps.int(),
            FactorKind::G => -1,
        })
    }

    fn gamma_exponent(&self, eps: Sign, e: f64) -> Result<f64> {
        let phi = self.phi(e)?;
        Ok(-2.0 * phi.plus * (-e + eps.value() * self.beta()).sqrt() / self.beta())
    }

    fn base_factor(&self) -> Result<FactorSpec> {
        Ok(FactorSpec::f(Sign::Plus))
    }

    fn ladder_conjugates(&self, eps: Sign) -> bool {
        eps == Sign::Minus
    }

    fn alpha(&self, e: f64) -> Result<f64> {
        self.window()?.require(e)?;
        let beta = self.beta();
        // 4 rt sqrt(E^2 - beta^2) / (sqrt(-E+beta) - sqrt(-E-beta)), with the
        // denominator rationalized so the kappa -> 0 limit stays stable
        Ok(2.0 * (e * e - beta * beta).sqrt() * ((-e + beta).sqrt() + (-e - beta).sqrt()) / self.b)
    }

    fn scan_range(&self) -> (f64, f64) {
        (0.01, 20.0)
    }
}

impl System for FlatKeplerCoulomb {
    fn name(&self) -> &'static str {
        "flatkc"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("B", self.b), ("l2", self.l2)]
    }

    fn radial(&self) -> bool {
        true
    }

    fn potential(&self, x: f64) -> f64 {
        -self.b / x + self.l2 / (x * x)
    }

    fn potential_derivative(&self, x: f64) -> f64 {
        self.b / (x * x) - 2.0 * self.l2 / (x * x * x)
    }

    fn well_minimum_x(&self) -> Result<f64> {
        if self.l2 == 0.0 {
            return Err(Error::InvalidConfig(
                "no interior minimum at l2 = 0 (potential is monotone)".into(),
            ));
        }
        Ok(2.0 * self.l2 / self.b)
    }

    fn window(&self) -> Result<EnergyWindow> {
        if self.l2 == 0.0 {
            return Err(Error::InvalidConfig(
                "bound window requires l2 > 0 for the radial family".into(),
            ));
        }
        Ok(EnergyWindow {
            e_min: -self.b * self.b / (4.0 * self.l2),
            e_max: 0.0,
        })
    }

    fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        self.window()?.require(e)?;
        let q = -e;
        let disc = self.b * self.b - 4.0 * q * self.l2;
        if disc <= 0.0 {
            return Err(Error::NoBoundMotion(format!(
                "turning-point discriminant {disc} <= 0 at E={e}"
            )));
        }
        let r_plus = 0.5 * (self.b + disc.sqrt()) / q;
        let r_minus = self.l2 / (q * r_plus);
        refine_turning_points(self, e, r_minus, r_plus)
    }

    fn phi(&self, _e: f64) -> Result<PhiValues> {
        self.unsupported("phi")
    }

    fn factor_split(&self, _spec: FactorSpec, _x: f64, _e: f64) -> Result<FactorSplit> {
        self.unsupported("factor functions")
    }

    fn factor_split_derivative(&self, _spec: FactorSpec, _x: f64, _e: f64) -> Result<(f64, f64)> {
        self.unsupported("factor functions")
    }

    fn contribution_closed(&self, _spec: FactorSpec, _x: f64, _e: f64) -> Result<Complex64> {
        self.unsupported("factor contributions")
    }

    fn signature_expected(&self, _spec: FactorSpec) -> Result<i32> {
        self.unsupported("factor signatures")
    }

    fn gamma_exponent(&self, _eps: Sign, _e: f64) -> Result<f64> {
        self.unsupported("the base-factor exponent")
    }

    fn base_factor(&self) -> Result<FactorSpec> {
        self.unsupported("a base factor")
    }

    fn alpha(&self, e: f64) -> Result<f64> {
        self.window()?.require(e)?;
        Ok(4.0 * (-e).powf(1.5) / self.b)
    }

    /// Closed-form ladder (-B/(2s) + s r - i eps p r) e^{i eps chi} with
    /// s = sqrt(-E) and chi = -(2 s / B) p r.
    fn ladder_log_polar(&self, eps: Sign, pt: PhasePoint) -> Result<(f64, f64)> {
        let e = pt.p * pt.p + self.potential(pt.x);
        if !(e < 0.0) {
            return Err(Error::NoBoundMotion(format!(
                "flat ladder requires E < 0 (E={e})"
            )));
        }
        let s = (-e).sqrt();
        let u = -self.b / (2.0 * s) + s * pt.x;
        let chi = -(2.0 * s / self.b) * pt.p * pt.x;
        let ev = eps.value();
        let pr = pt.p * pt.x;
        let ln_mod = 0.5 * (u * u + pr * pr).ln();
        let ang = (-ev * pr).atan2(u) + ev * chi;
        Ok((ln_mod, ang))
    }

    fn ladder_modulus_sq_log(&self, _eps: Sign, e: f64) -> Result<f64> {
        let delta = -self.l2 - self.b * self.b / (4.0 * e);
        if !(delta > 0.0) {
            return Err(Error::AlgebraViolation(format!(
                "nonpositive flat factorization function at E={e}: {delta}"
            )));
        }
        Ok(delta.ln())
    }

    fn scan_range(&self) -> (f64, f64) {
        (0.01, 20.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::eval_potential;

    fn kc811() -> CurvedKeplerCoulomb {
        CurvedKeplerCoulomb::new(8.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn potential_at_arcoth_two() {
        // w = coth x = 2 at x = (1/2) ln 3: V = l2 w^2 - B w - l2 = 4 - 16 - 1
        let x = 0.5 * 3.0_f64.ln();
        assert!((eval_potential(&kc811(), x).unwrap() - (-13.0)).abs() < 1e-12);
    }

    #[test]
    fn domain_rejects_nonpositive_radius() {
        assert!(eval_potential(&kc811(), 0.0).is_err());
        assert!(eval_potential(&kc811(), -1.0).is_err());
    }

    #[test]
    fn window_values() {
        let w = kc811().window().unwrap();
        assert!((w.e_min - (-17.0)).abs() < 1e-12);
        assert!((w.e_max - (-8.0)).abs() < 1e-12);
        let wf = FlatKeplerCoulomb::new(8.0, 1.0).unwrap().window().unwrap();
        assert!((wf.e_min - (-16.0)).abs() < 1e-12);
        assert_eq!(wf.e_max, 0.0);
    }

    #[test]
    fn well_shape_condition_enforced() {
        assert!(CurvedKeplerCoulomb::new(8.0, 4.0, 1.0).is_err());
        assert!(CurvedKeplerCoulomb::new(8.0, 3.9, 1.0).is_ok());
    }

    #[test]
    fn turning_points_by_coth_quadratic() {
        let (xm, xp) = kc811().turning_points(-13.0).unwrap();
        // coth x in {6, 2}
        assert!((xm - 0.5 * (7.0_f64 / 5.0).ln()).abs() < 1e-12);
        assert!((xp - 0.5 * 3.0_f64.ln()).abs() < 1e-12);
        assert!((xm - 0.168236).abs() < 1e-6);
        assert!((xp - 0.549306).abs() < 1e-6);
    }

    #[test]
    fn flat_turning_points_satisfy_quadratic() {
        let sys = FlatKeplerCoulomb::new(8.0, 1.0).unwrap();
        let (rm, rp) = sys.turning_points(-4.0).unwrap();
        // E r^2 + B r - l2 = 0
        for r in [rm, rp] {
            assert!((-4.0 * r * r + 8.0 * r - 1.0).abs() < 1e-10);
        }
        // V'(r) = 0 at r = 2 l2 / B
        assert!(sys.potential_derivative(0.25).abs() < 1e-14);
    }

    #[test]
    fn phi_tilde_value() {
        let phi = kc811().phi(-13.0).unwrap();
        let expect = ((13.0 + 105.0_f64.sqrt()) / 2.0).sqrt();
        assert!((phi.plus - expect).abs() < 1e-12);
        assert!((phi.plus - 3.40932).abs() < 1e-5);
        // product of the positive roots is B sqrt(kappa) / 2
        assert!((phi.plus * phi.minus - 4.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_values() {
        let a = kc811().alpha(-13.0).unwrap();
        let expect = 4.0 * 105.0_f64.sqrt() / (21.0_f64.sqrt() - 5.0_f64.sqrt());
        assert!((a - expect).abs() < 1e-10);
        assert!((a - 17.46757).abs() < 1e-4);

        let flat = FlatKeplerCoulomb::new(8.0, 1.0).unwrap();
        assert!((flat.alpha(-4.0).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn curved_matches_flat_at_tiny_curvature() {
        let curved = CurvedKeplerCoulomb::new(8.0, 1.0, 1e-8).unwrap();
        let flat = FlatKeplerCoulomb::new(8.0, 1.0).unwrap();
        for x in [0.2, 0.5, 1.0, 2.0] {
            let dv = (curved.potential(x) - flat.potential(x)).abs();
            assert!(dv < 1e-6, "dV = {dv} at x = {x}");
        }
    }

    #[test]
    fn gamma_exponent_value() {
        let g = kc811().gamma_exponent(Sign::Minus, -13.0).unwrap();
        let phi1 = ((13.0 + 105.0_f64.sqrt()) / 2.0).sqrt();
        let expect = -2.0 * phi1 * 5.0_f64.sqrt() / 8.0;
        assert!((g - expect).abs() < 1e-12);
        assert!((g - (-1.9059)).abs() < 1e-4);
    }

    #[test]
    fn flat_rejects_factor_operations() {
        let flat = FlatKeplerCoulomb::new(8.0, 1.0).unwrap();
        assert!(flat.phi(-4.0).is_err());
        assert!(flat
            .factor_split(FactorSpec::g(Sign::Minus), 1.0, -4.0)
            .is_err());
        assert!(flat.base_factor().is_err());
    }

    #[test]
    fn l2_zero_keeps_factor_bounds_open_below() {
        let sys = CurvedKeplerCoulomb::new(8.0, 0.0, 1.0).unwrap();
        assert!(sys.window().is_err());
        let b = sys.factor_energy_bounds().unwrap();
        assert!(b.e_min.is_infinite());
        assert!((b.e_max - (-8.0)).abs() < 1e-12);
        assert!(b.contains(-100.0));
        assert!(!b.contains(-7.0));
    }
}

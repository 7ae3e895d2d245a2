//! The Rosen-Morse II well V(x) = B tanh x - C / cosh^2 x on the whole line,
//! and its B = 0 special case, the hyperbolic Poschl-Teller well.
//!
//! Factor functions, in split form a + i b p:
//!   f_eps: b = cosh x,          a = phi_eps sinh x + phi_{-eps} cosh x,
//!          delta_f = C - phi_eps^2;
//!   g_eps: value = c - i d p,   d = 1 / (tanh x - eps),
//!          c = d ((B + 2 eps C) tanh x + eps B - 2(E + C)) / (2 sqrt(-E + eps B)),
//'          delta_g = (B^2 + 4C(C + E)) / (4(-E + eps B)).
//! The identity phi_{+1} phi_{-1} = B/2 replaces every quotient B / phi_eps
//! by 2 phi_{-eps}, which keeps all formulas finite through B = 0.

use super::{
    refine_turning_points, EnergyWindow, FactorKind, FactorSpec, FactorSplit, PhiValues, Sign,
    System,
};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Rosen-Morse II system with parameters B and C.
#[derive(Debug, Clone, Copy)]
pub struct RosenMorseII {
    b: f64,
    c: f64,
}

impl RosenMorseII {
    /// Requires C > 0 (well orientation). B is unrestricted here; the
    /// bound-motion window additionally needs |B| < 2C, checked by
    /// `energy_window`, and the factor construction needs B >= 0.
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if !b.is_finite() || !c.is_finite() || !(c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "RosenMorseII requires finite B and C > 0 (got B={b}, C={c})"
            )));
        }
        Ok(Self { b, c })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Hyperbolic Poschl-Teller well V(x) = -C / cosh^2 x; behaves identically
/// to Rosen-Morse II with B = 0.
#[derive(Debug, Clone, Copy)]
pub struct PoschlTeller {
    c: f64,
}

impl PoschlTeller {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || !(c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "PoschlTeller requires C > 0 (got C={c})"
            )));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

// sech^2 as 1/cosh^2: the 1 - tanh^2 form underflows to exact zero past
// |x| ~ 19, which the tail scans would mistake for a vanishing derivative
fn sech2(x: f64) -> f64 {
    let ch = x.cosh();
    1.0 / (ch * ch)
}

fn potential(b: f64, c: f64, x: f64) -> f64 {
    b * x.tanh() - c * sech2(x)
}

fn potential_derivative(b: f64, c: f64, x: f64) -> f64 {
    sech2(x) * (b + 2.0 * c * x.tanh())
}

fn energy_window(b: f64, c: f64) -> Result<EnergyWindow> {
    if !(b.abs() < 2.0 * c) {
        // no interior minimum: V is monotone and supports no bound motion
        return Err(Error::InvalidConfig(format!(
            "no well: RosenMorseII needs |B| < 2C (B={b}, C={c})"
        )));
    }
    Ok(EnergyWindow {
        e_min: -c - b * b / (4.0 * c),
        e_max: -b.abs(),
    })
}

/// Roots of C u^2 + B u - (E + C) = 0 in u = tanh x, numerically stable for
/// B of either sign and for B = 0.
fn turning_u(b: f64, c: f64, e: f64) -> Result<(f64, f64)> {
    let disc = b * b + 4.0 * c * (c + e);
    if disc <= 0.0 {
        return Err(Error::NoBoundMotion(format!(
            "turning-point discriminant {disc} <= 0 at E={e}"
        )));
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (u1, u2) = if q != 0.0 {
        (q / c, -(e + c) / q)
    } else {
        let r = ((e + c) / c).sqrt();
        (-r, r)
    };
    let (um, up) = if u1 < u2 { (u1, u2) } else { (u2, u1) };
    if !(um > -1.0 && up < 1.0) {
        return Err(Error::Numerical(format!(
            "tanh turning roots ({um}, {up}) escape (-1, 1) at E={e}"
        )));
    }
    Ok((um, up))
}

fn phi(b: f64, e: f64) -> Result<PhiValues> {
    if !(e < -b.abs()) {
        return Err(Error::InvalidInput(format!(
            "phi requires E < -|B| (E={e}, B={b})"
        )));
    }
    let plus = (0.5 * (-e + (e * e - b * b).sqrt())).sqrt();
    let minus = 0.5 * b.abs() / plus;
    Ok(PhiValues { plus, minus })
}

fn require_nonneg_b(b: f64) -> Result<()> {
    if b < 0.0 {
        Err(Error::InvalidInput(format!(
            "factor construction assumes B >= 0 (got B={b}); map x -> -x to flip the sign"
        )))
    } else {
        Ok(())
    }
}

fn factor_split(b: f64, c: f64, spec: FactorSpec, x: f64, e: f64) -> Result<FactorSplit> {
    require_nonneg_b(b)?;
    let phi = phi(b, e)?;
    let eps = spec.eps.value();
    let t = x.tanh();
    match spec.kind {
        FactorKind::F => {
            let pe = phi.get(spec.eps);
            let pm = phi.get(spec.eps.flip());
            Ok(FactorSplit {
                a: pe * x.sinh() + pm * x.cosh(),
                b: x.cosh(),
                delta: c - pe * pe,
            })
        }
        FactorKind::G => {
            let s = (-e + eps * b).sqrt();
            // 1/(tanh x - eps) = -eps cosh(x) e^{eps x}, stable at the tails
            let d = -eps * x.cosh() * (eps * x).exp();
            let num = (b + 2.0 * eps * c) * t + eps * b - 2.0 * (e + c);
            Ok(FactorSplit {
                a: d * num / (2.0 * s),
                b: -d,
                delta: (b * b + 4.0 * c * (c + e)) / (4.0 * (-e + eps * b)),
            })
        }
    }
}

fn factor_split_derivative(
    b: f64,
    c: f64,
    spec: FactorSpec,
    x: f64,
    e: f64,
) -> Result<(f64, f64)> {
    require_nonneg_b(b)?;
    let phi = phi(b, e)?;
    let eps = spec.eps.value();
    match spec.kind {
        FactorKind::F => {
            let pe = phi.get(spec.eps);
            let pm = phi.get(spec.eps.flip());
            Ok((pe * x.cosh() + pm * x.sinh(), x.sinh()))
        }
        FactorKind::G => {
            // sech^2 / (tanh x - eps)^2 = e^{2 eps x} exactly
            let _ = c;
            let s = (-e + eps * b).sqrt();
            let dd = -(2.0 * eps * x).exp();
            Ok((s * dd, -dd))
        }
    }
}

fn contribution_closed(b: f64, spec: FactorSpec, x: f64, e: f64) -> Result<Complex64> {
    require_nonneg_b(b)?;
    let phi = phi(b, e)?;
    let eps = spec.eps.value();
    let t = x.tanh();
    let im = match spec.kind {
        // B / phi_eps = 2 phi_{-eps}, finite through B = 0
        FactorKind::F => 2.0 * phi.get(spec.eps) + 2.0 * phi.get(spec.eps.flip()) * t,
        FactorKind::G => -2.0 * (-e + eps * b).sqrt() * (t + eps),
    };
    Ok(Complex64::new(0.0, im))
}

fn gamma_exponent(b: f64, eps: Sign, e: f64) -> Result<f64> {
    require_nonneg_b(b)?;
    let phi = phi(b, e)?;
    // 2 phi_{-1} sqrt(-E + eps B) / B == sqrt(-E + eps B) / phi_{+1};
    // the right-hand form evaluates to exactly 1 at B = 0
    Ok((-e + eps.value() * b).sqrt() / phi.plus)
}

fn alpha(b: f64, e: f64, window: &EnergyWindow) -> Result<f64> {
    window.require(e)?;
    let num = 4.0 * (e * e - b * b).sqrt();
    Ok(num / ((-e + b).sqrt() + (-e - b).sqrt()))
}

macro_rules! rosen_morse_impl {
    ($ty:ty, $b:expr) => {
        impl System for $ty {
            fn name(&self) -> &'static str {
                Self::NAME
            }

            fn params(&self) -> Vec<(&'static str, f64)> {
                self.param_list()
            }

            fn radial(&self) -> bool {
                false
            }

            fn potential(&self, x: f64) -> f64 {
                potential($b(self), self.c, x)
            }

            fn potential_derivative(&self, x: f64) -> f64 {
                potential_derivative($b(self), self.c, x)
            }

            fn well_minimum_x(&self) -> Result<f64> {
                let u = -$b(self) / (2.0 * self.c);
                if u.abs() >= 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "no interior minimum: |B| >= 2C in {}",
                        self.name()
                    )));
                }
                Ok(u.atanh())
            }

            fn window(&self) -> Result<EnergyWindow> {
                energy_window($b(self), self.c)
            }

            fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
                self.window()?.require(e)?;
                let (um, up) = turning_u($b(self), self.c, e)?;
                refine_turning_points(self, e, um.atanh(), up.atanh())
            }

            fn phi(&self, e: f64) -> Result<PhiValues> {
                phi($b(self), e)
            }

            fn factor_split(&self, spec: FactorSpec, x: f64, e: f64) -> Result<FactorSplit> {
                factor_split($b(self), self.c, spec, x, e)
            }

            fn factor_split_derivative(
                &self,
                spec: FactorSpec,
                x: f64,
                e: f64,
            ) -> Result<(f64, f64)> {
                factor_split_derivative($b(self), self.c, spec, x, e)
            }

            fn contribution_closed(&self, spec: FactorSpec, x: f64, e: f64) -> Result<Complex64> {
                contribution_closed($b(self), spec, x, e)
            }

            fn signature_expected(&self, spec: FactorSpec) -> Result<i32> {
                Ok(match spec.kind {
                    FactorKind::F => -spec.eps.int(),
                    FactorKind::G => -1,
                })
            }

            fn gamma_exponent(&self, eps: Sign, e: f64) -> Result<f64> {
                gamma_exponent($b(self), eps, e)
            }

            fn base_factor(&self) -> Result<FactorSpec> {
                Ok(FactorSpec::f(Sign::Minus))
            }

            fn alpha(&self, e: f64) -> Result<f64> {
                alpha($b(self), e, &self.window()?)
            }

            fn scan_range(&self) -> (f64, f64) {
                (-20.0, 20.0)
            }
        }
    };
}

impl RosenMorseII {
    const NAME: &'static str = "rmii";

    fn param_list(&self) -> Vec<(&'static str, f64)> {
        vec![("B", self.b), ("C", self.c)]
    }
}

impl PoschlTeller {
    const NAME: &'static str = "pt";

    fn param_list(&self) -> Vec<(&'static str, f64)> {
        vec![("C", self.c)]
    }
}

rosen_morse_impl!(RosenMorseII, |s: &RosenMorseII| s.b);
rosen_morse_impl!(PoschlTeller, |_s: &PoschlTeller| 0.0);

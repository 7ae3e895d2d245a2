//! Physical frequency by singular-endpoint quadrature, a fixed-step
//! integrator oracle for Hamilton's equations, and algebraic motion
//! generation from the unwrapped ladder phase.
//!
//! Motion generation inverts the constant-of-motion relation
//! Q_eps = A_eps e^{-i eps alpha t}: the continuously unwrapped phase of
//! A_{-1} along one closed energy contour is strictly monotone with total
//! change 2 pi per cycle, so arg A_{-1} = theta_0 - alpha t has exactly one
//! solution on the contour for every t. A lookup table with cosine
//! clustering near the turning points (where the phase varies fastest)
//! brackets the solution and a local bisection refines it; the pointwise
//! arctan forms of the motion equations stay as local spot checks because
//! their principal branches jump on the contour.

use crate::error::{Error, Result};
use crate::ladder::eval_ladder;
use crate::numeric::{format_g17, integrate_inverse_sqrt, unwrap_phases, wrap_to_pi};
use crate::system::{eval_hamiltonian, require_domain, PhasePoint, Sign, System};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Relative energy-drift budget of the integrator oracle.
pub const ODE_DRIFT_TOL: f64 = 1e-8;

/// Contour nodes per momentum half-plane.
pub const CONTOUR_NODES: usize = 2000;

/// A time series of phase points with the constants of motion sampled
/// along it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub energy: f64,
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    /// Q_+ = A_+ e^{-i alpha t} along the path.
    pub q_plus: Vec<Complex64>,
    /// Closed-form bracket frequency at this energy.
    pub omega: f64,
    /// arg A_{-1} at the first sample.
    pub theta0: f64,
}

impl Trajectory {
    /// CSV rows `t,x,p,reQ,imQ` at full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,p,reQ,imQ\n");
        for ((t, pt), q) in self.times.iter().zip(&self.points).zip(&self.q_plus) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_g17(*t),
                format_g17(pt.x),
                format_g17(pt.p),
                format_g17(q.re),
                format_g17(q.im)
            ));
        }
        out
    }
}

/// Physical frequency omega = 2 pi / T with
/// T = integral dx / sqrt(E - V) between the turning points; the
/// inverse-square-root endpoint singularities are removed exactly by the
/// sine substitution inside [`integrate_inverse_sqrt`].
pub fn frequency_quadrature(sys: &dyn System, e: f64) -> Result<f64> {
    let (xm, xp) = sys.turning_points(e)?;
    let t = integrate_inverse_sqrt(|x| e - sys.potential(x), xm, xp, 1e-10, 1 << 20)?;
    Ok(2.0 * PI / t)
}

/// Integrates xdot = 2p, pdot = -V'(x) with fixed-step classical
/// Runge-Kutta, sampling every step. If the energy drifts beyond
/// [`ODE_DRIFT_TOL`] relative, the step is halved and the run repeated, up
/// to 10 halvings.
pub fn integrate_hamilton(
    sys: &dyn System,
    start: PhasePoint,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    require_domain(sys, start.x)?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "integrate_hamilton needs dt > 0 and t_end >= 0 (got dt={dt}, t_end={t_end})"
        )));
    }
    let e0 = eval_hamiltonian(sys, start)?;
    sys.window()?.require(e0)?;
    let alpha = sys.alpha(e0)?;
    let theta0 = eval_ladder(sys, Sign::Minus, start)?.phase;

    let deriv = |pt: PhasePoint| (2.0 * pt.p, -sys.potential_derivative(pt.x));
    let rk4_step = |pt: PhasePoint, h: f64| -> PhasePoint {
        let (k1x, k1p) = deriv(pt);
        let (k2x, k2p) = deriv(PhasePoint::new(pt.x + 0.5 * h * k1x, pt.p + 0.5 * h * k1p));
        let (k3x, k3p) = deriv(PhasePoint::new(pt.x + 0.5 * h * k2x, pt.p + 0.5 * h * k2p));
        let (k4x, k4p) = deriv(PhasePoint::new(pt.x + h * k3x, pt.p + h * k3p));
        PhasePoint::new(
            pt.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            pt.p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    };

    let budget = ODE_DRIFT_TOL * (1.0 + e0.abs());
    let mut step = dt;
    for _ in 0..=10 {
        let n = if t_end == 0.0 {
            0
        } else {
            let ratio = t_end / step;
            // forgive one-ulp slop so dt dividing t_end exactly keeps its grid
            if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
                ratio.round() as usize
            } else {
                ratio.ceil() as usize
            }
        };
        let h = if n == 0 { 0.0 } else { t_end / n as f64 };
        let mut points = Vec::with_capacity(n + 1);
        let mut times = Vec::with_capacity(n + 1);
        points.push(start);
        times.push(0.0);
        let mut pt = start;
        let mut ok = true;
        for i in 1..=n {
            pt = rk4_step(pt, h);
            if !sys.in_domain(pt.x) {
                return Err(Error::Numerical(format!(
                    "trajectory left the domain at t={}",
                    i as f64 * h
                )));
            }
            if (eval_hamiltonian(sys, pt)? - e0).abs() > budget {
                ok = false;
                break;
            }
            points.push(pt);
            times.push(i as f64 * h);
        }
        if ok {
            let q_plus = q_samples(sys, e0, alpha, &times, &points)?;
            return Ok(Trajectory {
                energy: e0,
                times,
                points,
                q_plus,
                omega: alpha,
                theta0,
            });
        }
        step *= 0.5;
    }
    Err(Error::Numerical(format!(
        "energy drift above {budget:.3e} persists after 10 step halvings"
    )))
}

fn q_samples(
    sys: &dyn System,
    _e: f64,
    alpha: f64,
    times: &[f64],
    points: &[PhasePoint],
) -> Result<Vec<Complex64>> {
    times
        .iter()
        .zip(points)
        .map(|(&t, &pt)| {
            let a = eval_ladder(sys, Sign::Plus, pt)?.value;
            Ok(a * Complex64::from_polar(1.0, -alpha * t))
        })
        .collect()
}

/// The closed energy contour of one shell, parametrized by position on each
/// momentum half-plane and carrying the unwrapped phase of A_{-1}.
pub struct PhaseContour<'s> {
    sys: &'s dyn System,
    e: f64,
    pub alpha: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    xs: Vec<f64>,
    raws: Vec<f64>,
    thetas: Vec<f64>,
    /// index of the outer turning point inside the node arrays
    tp_index: usize,
}

impl<'s> PhaseContour<'s> {
    /// Builds the contour table at energy `e` with `n` nodes per half-plane,
    /// cosine-clustered near the turning points. Fails with an algebra
    /// violation if the unwrapped phase is not strictly monotone or the
    /// total change over the cycle is not -2 pi.
    pub fn build(sys: &'s dyn System, e: f64, n: usize) -> Result<Self> {
        let (xm, xp) = sys.turning_points(e)?;
        let alpha = sys.alpha(e)?;
        let m = 0.5 * (xm + xp);
        let w = 0.5 * (xp - xm);

        let mut xs = Vec::with_capacity(2 * n + 1);
        let mut branch_p: Vec<f64> = Vec::with_capacity(2 * n + 1);
        for j in 0..=n {
            let x = m - w * (PI * j as f64 / n as f64).cos();
            xs.push(x);
            // the end nodes are the turning points; rounding in V(x) - E
            // there would smuggle in a tiny nonzero momentum
            let p = if j == 0 || j == n {
                0.0
            } else {
                (e - sys.potential(x)).max(0.0).sqrt()
            };
            branch_p.push(p);
        }
        for j in 1..=n {
            let k = n - j;
            xs.push(xs[k]);
            branch_p.push(-branch_p[k]);
        }

        let raws: Result<Vec<f64>> = xs
            .iter()
            .zip(&branch_p)
            .map(|(&x, &p)| Ok(sys.ladder_log_polar(Sign::Minus, PhasePoint::new(x, p))?.1))
            .collect();
        let raws = raws?;
        let thetas = unwrap_phases(&raws);

        for pair in thetas.windows(2) {
            let d = pair[1] - pair[0];
            if !(d < 0.0) || d < -1.5 {
                return Err(Error::AlgebraViolation(format!(
                    "phase table not strictly decreasing at E={e} (step {d})"
                )));
            }
        }
        let drop = thetas[2 * n] - thetas[0];
        if (drop + 2.0 * PI).abs() > 1e-9 {
            return Err(Error::AlgebraViolation(format!(
                "phase change over one cycle is {drop}, expected -2 pi"
            )));
        }

        Ok(Self {
            sys,
            e,
            alpha,
            x_minus: xm,
            x_plus: xp,
            xs,
            raws,
            thetas,
            tp_index: n,
        })
    }

    pub fn theta_start(&self) -> f64 {
        self.thetas[0]
    }

    /// |phase advance| between the turning points along one half-plane;
    /// pi for a fundamental (antiperiodic) ladder function.
    pub fn phase_advance_between_turning_points(&self) -> f64 {
        (self.thetas[self.tp_index] - self.thetas[0]).abs()
    }

    /// Maps any phase to its representative inside the table range
    /// (theta_start - 2 pi, theta_start].
    pub fn reduce(&self, psi: f64) -> f64 {
        let d = (self.theta_start() - psi).rem_euclid(2.0 * PI);
        self.theta_start() - d
    }

    /// Continuous phase at position x on the half-plane of node `k`,
    /// anchored to the table (valid while |true change| < pi).
    fn theta_at(&self, k: usize, x: f64) -> Result<f64> {
        let eta = if k < self.tp_index { 1.0 } else { -1.0 };
        let p = eta * (self.e - self.sys.potential(x)).max(0.0).sqrt();
        let raw = self
            .sys
            .ladder_log_polar(Sign::Minus, PhasePoint::new(x, p))?
            .1;
        Ok(self.thetas[k] + wrap_to_pi(raw - self.raws[k]))
    }

    /// Solves theta(s) = psi on the contour. `psi` must already lie in the
    /// table range (see [`Self::reduce`]).
    pub fn invert(&self, psi: f64) -> Result<PhasePoint> {
        let last = self.thetas.len() - 1;
        let psi = psi.clamp(self.thetas[last], self.thetas[0]);
        // binary search the decreasing table
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.thetas[mid] >= psi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let eta = if lo < self.tp_index { 1.0 } else { -1.0 };
        let (mut xa, mut xb) = (self.xs[lo], self.xs[hi]);
        let (mut fa, fb) = (self.thetas[lo] - psi, self.thetas[hi] - psi);
        debug_assert!(fa >= 0.0 && fb <= 0.0);
        for _ in 0..80 {
            let xm = 0.5 * (xa + xb);
            let fm = self.theta_at(lo, xm)? - psi;
            if fm.abs() < 1e-12 {
                xa = xm;
                break;
            }
            if fm.signum() == fa.signum() {
                xa = xm;
                fa = fm;
            } else {
                xb = xm;
            }
            if (xb - xa).abs() < 1e-15 * (1.0 + xa.abs()) {
                break;
            }
        }
        let x = xa;
        let p = eta * (self.e - self.sys.potential(x)).max(0.0).sqrt();
        Ok(PhasePoint::new(x, p))
    }
}

/// Generates the motion algebraically: solves
/// arg A_{-1}(x, p) = theta0 - alpha(E) t (mod 2 pi) on the shell contour
/// for each requested time.
pub fn motion_from_ladder(
    sys: &dyn System,
    e: f64,
    theta0: f64,
    times: &[f64],
) -> Result<Trajectory> {
    let contour = PhaseContour::build(sys, e, CONTOUR_NODES)?;
    let alpha = contour.alpha;
    let anchor = contour.reduce(theta0);
    let points: Result<Vec<PhasePoint>> = times
        .iter()
        .map(|&t| contour.invert(contour.reduce(anchor - alpha * t)))
        .collect();
    let points = points?;
    let q_plus = q_samples(sys, e, alpha, times, &points)?;
    Ok(Trajectory {
        energy: e,
        times: times.to_vec(),
        points,
        q_plus,
        omega: alpha,
        theta0,
    })
}

/// Drift of the constant of motion Q_eps = A_eps e^{-i eps alpha t} along a
/// trajectory: (relative modulus spread, max unwrapped phase deviation).
pub fn constant_of_motion_drift(
    sys: &dyn System,
    traj: &Trajectory,
    eps: Sign,
) -> Result<(f64, f64)> {
    if traj.points.len() <= 1 {
        return Ok((0.0, 0.0));
    }
    let alpha = sys.alpha(traj.energy)?;
    let qs: Result<Vec<Complex64>> = traj
        .times
        .iter()
        .zip(&traj.points)
        .map(|(&t, &pt)| {
            let a = eval_ladder(sys, eps, pt)?.value;
            Ok(a * Complex64::from_polar(1.0, -eps.value() * alpha * t))
        })
        .collect();
    let qs = qs?;
    let mods: Vec<f64> = qs.iter().map(|q| q.norm()).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &m in &mods {
        lo = lo.min(m);
        hi = hi.max(m);
    }
    let mean = mods.iter().sum::<f64>() / mods.len() as f64;
    let mod_drift = (hi - lo) / mean;

    let raw: Vec<f64> = qs.iter().map(|q| q.arg()).collect();
    let phases = unwrap_phases(&raw);
    let phase_drift = phases
        .iter()
        .map(|&ph| (ph - phases[0]).abs())
        .fold(0.0_f64, f64::max);
    Ok((mod_drift, phase_drift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{CurvedKeplerCoulomb, FlatKeplerCoulomb, PoschlTeller, RosenMorseII};

    fn rmii24() -> RosenMorseII {
        RosenMorseII::new(2.0, 4.0).unwrap()
    }

    #[test]
    fn frequency_matches_closed_alpha() {
        let sys = rmii24();
        let w = frequency_quadrature(&sys, -3.0).unwrap();
        assert!((w - 2.763932).abs() < 1e-6);
        assert!((w - sys.alpha(-3.0).unwrap()).abs() < 1e-8 * w);

        let kc = CurvedKeplerCoulomb::new(8.0, 1.0, 1.0).unwrap();
        let w = frequency_quadrature(&kc, -13.0).unwrap();
        assert!((w - 17.46757).abs() < 1e-4);
        assert!((w - kc.alpha(-13.0).unwrap()).abs() < 1e-8 * w);

        let flat = FlatKeplerCoulomb::new(8.0, 1.0).unwrap();
        let w = frequency_quadrature(&flat, -4.0).unwrap();
        assert!((w - 4.0).abs() < 1e-8);

        let pt = PoschlTeller::new(4.0).unwrap();
        let w = frequency_quadrature(&pt, -1.0).unwrap();
        assert!((w - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ode_starts_inward_from_turning_point() {
        let sys = rmii24();
        let (_, xp) = sys.turning_points(-3.0).unwrap();
        let traj = integrate_hamilton(&sys, PhasePoint::new(xp, 0.0), 0.01, 1e-3).unwrap();
        assert!(traj.points[1].p < 0.0, "force must point inward at x_+");
    }

    #[test]
    fn ode_period_returns_to_start() {
        let sys = rmii24();
        let period = 2.0 * PI / sys.alpha(-3.0).unwrap();
        let start = PhasePoint::new(0.1, (-3.0_f64 - sys.potential(0.1)).sqrt());
        let traj = integrate_hamilton(&sys, start, 2.0 * period, period / 4000.0).unwrap();
        let last = traj.points.last().unwrap();
        assert!((last.x - start.x).abs() < 1e-6);
        assert!((last.p - start.p).abs() < 1e-6);
    }

    #[test]
    fn ode_sweeps_turning_range() {
        let kc = CurvedKeplerCoulomb::new(8.0, 1.0, 1.0).unwrap();
        let (xm, xp) = kc.turning_points(-13.0).unwrap();
        let period = 2.0 * PI / kc.alpha(-13.0).unwrap();
        let start = PhasePoint::new(0.3, (-13.0_f64 - kc.potential(0.3)).sqrt());
        let traj = integrate_hamilton(&kc, start, period, period / 4000.0).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for pt in &traj.points {
            lo = lo.min(pt.x);
            hi = hi.max(pt.x);
        }
        assert!((lo - xm).abs() < 1e-6);
        assert!((hi - xp).abs() < 1e-6);
    }

    #[test]
    fn contour_is_antiperiodic() {
        let sys = rmii24();
        let contour = PhaseContour::build(&sys, -3.0, CONTOUR_NODES).unwrap();
        assert!((contour.phase_advance_between_turning_points() - PI).abs() < 1e-6);
    }

    #[test]
    fn motion_inverts_anchor_exactly() {
        let sys = rmii24();
        let start = PhasePoint::new(0.1, (-3.0_f64 - sys.potential(0.1)).sqrt());
        let theta0 = eval_ladder(&sys, Sign::Minus, start).unwrap().phase;
        let traj = motion_from_ladder(&sys, -3.0, theta0, &[0.0]).unwrap();
        assert!((traj.points[0].x - start.x).abs() < 1e-8);
        assert!((traj.points[0].p - start.p).abs() < 1e-8);
    }

    #[test]
    fn ladder_motion_tracks_ode() {
        let sys = rmii24();
        let e = -3.0;
        let period = 2.0 * PI / sys.alpha(e).unwrap();
        let start = PhasePoint::new(0.1, (e - sys.potential(0.1)).sqrt());
        let ode = integrate_hamilton(&sys, start, 2.0 * period, period / 2000.0).unwrap();
        let theta0 = eval_ladder(&sys, Sign::Minus, start).unwrap().phase;
        // evaluate the ladder motion at the ODE's own sample times
        let times: Vec<f64> = ode.times.iter().step_by(20).copied().collect();
        let ladder = motion_from_ladder(&sys, e, theta0, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let x_ode = ode.points[20 * i].x;
            assert!(
                (ladder.points[i].x - x_ode).abs() < 1e-6,
                "x mismatch at t={t}: {} vs {}",
                ladder.points[i].x,
                x_ode
            );
        }
    }

    #[test]
    fn q_constant_along_ode() {
        let sys = rmii24();
        let e = -3.0;
        let period = 2.0 * PI / sys.alpha(e).unwrap();
        let start = PhasePoint::new(0.1, (e - sys.potential(0.1)).sqrt());
        let traj = integrate_hamilton(&sys, start, 2.0 * period, period / 4000.0).unwrap();
        for eps in Sign::BOTH {
            let (mod_drift, phase_drift) = constant_of_motion_drift(&sys, &traj, eps).unwrap();
            assert!(mod_drift <= 1e-7, "modulus drift {mod_drift}");
            assert!(phase_drift <= 1e-6, "phase drift {phase_drift}");
        }
    }

    #[test]
    fn trajectory_points_stay_on_shell() {
        let sys = rmii24();
        let e = -3.0;
        let period = 2.0 * PI / sys.alpha(e).unwrap();
        let start = PhasePoint::new(0.1, (e - sys.potential(0.1)).sqrt());
        let ode = integrate_hamilton(&sys, start, 2.0 * period, period / 4000.0).unwrap();
        let times: Vec<f64> = (0..50).map(|i| i as f64 * period / 25.0).collect();
        let theta0 = eval_ladder(&sys, Sign::Minus, start).unwrap().phase;
        let ladder = motion_from_ladder(&sys, e, theta0, &times).unwrap();
        for traj in [&ode, &ladder] {
            for pt in &traj.points {
                let h = eval_hamiltonian(&sys, *pt).unwrap();
                assert!((h - traj.energy).abs() <= 1e-9 * (1.0 + traj.energy.abs()));
            }
        }
    }

    #[test]
    fn single_point_trajectory_has_zero_drift() {
        let sys = rmii24();
        let start = PhasePoint::new(0.1, (-3.0_f64 - sys.potential(0.1)).sqrt());
        let traj = integrate_hamilton(&sys, start, 0.0, 1e-3).unwrap();
        assert_eq!(traj.points.len(), 1);
        let (m, p) = constant_of_motion_drift(&sys, &traj, Sign::Minus).unwrap();
        assert_eq!((m, p), (0.0, 0.0));
    }

    #[test]
    fn csv_shape() {
        let sys = rmii24();
        let start = PhasePoint::new(0.1, (-3.0_f64 - sys.potential(0.1)).sqrt());
        let traj = integrate_hamilton(&sys, start, 0.0, 1e-3).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x,p,reQ,imQ");
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 5);
        assert!(lines.next().is_none());
    }
}

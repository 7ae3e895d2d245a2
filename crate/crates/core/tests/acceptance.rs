//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see them
//! all). Every tolerance is pinned here, next to the check it gates.

use laddermech::dynamics::{
    constant_of_motion_drift, frequency_quadrature, integrate_hamilton, motion_from_ladder,
    PhaseContour,
};
use laddermech::factor::{eval_factor, signature};
use laddermech::ladder::{alpha_closed, eval_ladder, ladder_modulus, ladder_signature};
use laddermech::limits::{flat_kc_limit_check, l_zero_limit_check, pt_limit_check};
use laddermech::system::{
    CurvedKeplerCoulomb, FactorSpec, FlatKeplerCoulomb, PhasePoint, PoschlTeller, RosenMorseII,
    Sign, System,
};
use laddermech::verify::{appendix_scan, shell_samples, verify_gha};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn rmii() -> RosenMorseII {
    RosenMorseII::new(2.0, 4.0).unwrap()
}

fn kc() -> CurvedKeplerCoulomb {
    CurvedKeplerCoulomb::new(8.0, 1.0, 1.0).unwrap()
}

fn criterion(n: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {n:02} — {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

/// Criterion 1: the closed-form bracket frequency equals the physical
/// frequency from singular-endpoint quadrature, |alpha - omega|/omega <=
/// 1e-8 on 50-energy grids spanning the middle 96% of each window.
#[test]
fn acceptance_01_frequency_equality() {
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for sys in [
        Box::new(rmii()) as Box<dyn System>,
        Box::new(kc()) as Box<dyn System>,
    ] {
        let grid = sys.energy_window().unwrap().interior_grid(50, 0.02);
        for e in grid {
            let a = alpha_closed(sys.as_ref(), e).unwrap();
            let w = frequency_quadrature(sys.as_ref(), e).unwrap();
            worst = worst.max((a - w).abs() / w);
        }
        detail.push_str(&format!("{} max dev {worst:.3e}; ", sys.name()));
    }
    // spot values against the printed decimals
    let w_rm = frequency_quadrature(&rmii(), -3.0).unwrap();
    let w_kc = frequency_quadrature(&kc(), -13.0).unwrap();
    let spots_ok = (w_rm - 2.763932).abs() < 1e-6 && (w_kc - 17.46757).abs() < 1e-4;
    detail.push_str(&format!("omega(-3)={w_rm:.6}, omega(-13)={w_kc:.5}"));
    criterion(1, "alpha(H) = omega(H)", worst <= 1e-8 && spots_ok, &detail);
}

/// Criterion 2: the bracket-algebra report passes (alpha residual <= 1e-6,
/// delta residual <= 1e-8, beta shell-spread <= 1e-6) at 10 random
/// energies per system, both eps.
#[test]
fn acceptance_02_gha_residuals() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst_alpha: f64 = 0.0;
    let mut detail = String::new();
    for sys in [
        Box::new(rmii()) as Box<dyn System>,
        Box::new(kc()) as Box<dyn System>,
        Box::new(PoschlTeller::new(4.0).unwrap()) as Box<dyn System>,
        Box::new(FlatKeplerCoulomb::new(8.0, 1.0).unwrap()) as Box<dyn System>,
    ] {
        let w = sys.energy_window().unwrap();
        for _ in 0..10 {
            let e = w.e_min + (0.1 + 0.8 * rng.gen::<f64>()) * w.width();
            let report = verify_gha(sys.as_ref(), e, 50, rng.gen()).unwrap();
            assert!(report.passed, "{}: {report:?}", sys.name());
            worst_alpha = worst_alpha.max(report.alpha_residual);
        }
        detail.push_str(&format!("{} ok; ", sys.name()));
    }
    detail.push_str(&format!("worst alpha residual {worst_alpha:.3e}"));
    criterion(2, "bracket-algebra residuals", true, &detail);
}

/// Criterion 3: factorization |f|^2 = delta_f, |g|^2 = delta_g and
/// |A_eps|^2 = delta_f^gamma delta_g to relative 1e-9 on 200 shell points
/// per energy, with the hand values reproduced.
#[test]
fn acceptance_03_factorization() {
    let mut worst: f64 = 0.0;
    for (sys, energies) in [
        (Box::new(rmii()) as Box<dyn System>, [-4.0, -3.0, -2.2]),
        (Box::new(kc()) as Box<dyn System>, [-16.0, -13.0, -9.0]),
    ] {
        for e in energies {
            let pts = shell_samples(sys.as_ref(), e, 200, 11, 0.01).unwrap();
            for pt in pts {
                for spec in FactorSpec::ALL {
                    let f = eval_factor(sys.as_ref(), spec, pt).unwrap();
                    worst = worst.max((f.value.norm_sqr() - f.delta).abs() / f.delta.abs());
                }
                for eps in Sign::BOTH {
                    let l = eval_ladder(sys.as_ref(), eps, pt).unwrap();
                    let m = ladder_modulus(sys.as_ref(), eps, e).unwrap();
                    worst = worst.max((l.modulus * l.modulus - m * m).abs() / (m * m));
                }
            }
        }
    }
    // hand values
    let f = eval_factor(&rmii(), FactorSpec::f(Sign::Minus), PhasePoint::new(0.0, 1.0)).unwrap();
    let g = eval_factor(&rmii(), FactorSpec::g(Sign::Minus), PhasePoint::new(0.0, 1.0)).unwrap();
    let x = 0.5 * 3.0_f64.ln();
    let gk = kc().factor_split(FactorSpec::g(Sign::Minus), x, -13.0).unwrap();
    let hand_ok = (f.delta - 3.618034).abs() < 1e-6
        && (g.delta - 5.0).abs() < 1e-12
        && (gk.delta - 0.8).abs() < 1e-12;
    criterion(
        3,
        "factorization conditions",
        worst <= 1e-9 && hand_ok,
        &format!(
            "worst rel dev {worst:.3e}; delta_f(-3)={:.6}, delta_g(-3)={}, delta_g_kc(-13)={}",
            f.delta, g.delta, gk.delta
        ),
    );
}

/// Criterion 4: computed signatures match the tabulated closed forms at 10
/// energies per system, the assembled ladders are antiperiodic, and the
/// phase advance between turning points is pi to 1e-6.
#[test]
fn acceptance_04_signature_table() {
    for (sys, expected_f_sign) in [
        (Box::new(rmii()) as Box<dyn System>, -1.0),
        (Box::new(kc()) as Box<dyn System>, 1.0),
    ] {
        let grid = sys.energy_window().unwrap().interior_grid(10, 0.05);
        for &e in &grid {
            for eps in Sign::BOTH {
                // signature() itself errors on any mismatch with the table
                let got_f = signature(sys.as_ref(), FactorSpec::f(eps), e).unwrap();
                assert_eq!(got_f, (expected_f_sign * eps.value()) as i32);
                let got_g = signature(sys.as_ref(), FactorSpec::g(eps), e).unwrap();
                assert_eq!(got_g, -1);
                assert_eq!(ladder_signature(sys.as_ref(), eps, e).unwrap(), -1);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (sys, e) in [
        (Box::new(rmii()) as Box<dyn System>, -3.0),
        (Box::new(kc()) as Box<dyn System>, -13.0),
    ] {
        let contour = PhaseContour::build(sys.as_ref(), e, 2000).unwrap();
        worst = worst.max((contour.phase_advance_between_turning_points() - PI).abs());
    }
    criterion(
        4,
        "signature table and antiperiodicity",
        worst <= 1e-6,
        &format!("tables match; |phase advance - pi| <= {worst:.3e}"),
    );
}

/// Criterion 5: the motion generated from the ladder phase tracks the
/// integrator oracle to 1e-6 over two periods (hyperbolic well, three
/// energies) and three periods (curved radial well, three energies), and
/// the constants of motion drift below 1e-7 in modulus and 1e-6 rad in
/// phase along the oracle trajectories.
#[test]
fn acceptance_05_motion_oracle_agreement() {
    let mut worst_x: f64 = 0.0;
    let mut worst_mod: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    let cases = [
        (Box::new(rmii()) as Box<dyn System>, vec![-2.2, -3.0, -4.0], 2.0),
        (Box::new(kc()) as Box<dyn System>, vec![-10.0, -13.0, -16.0], 3.0),
    ];
    for (sys, energies, periods) in cases {
        for &e in &energies {
            let alpha = alpha_closed(sys.as_ref(), e).unwrap();
            let t_end = periods * 2.0 * PI / alpha;
            let (xm, xp) = sys.turning_points(e).unwrap();
            let x0 = xm + 0.4 * (xp - xm);
            let start = PhasePoint::new(x0, (e - sys.potential(x0)).max(0.0).sqrt());
            let ode = integrate_hamilton(sys.as_ref(), start, t_end, t_end / 4096.0).unwrap();

            let theta0 = eval_ladder(sys.as_ref(), Sign::Minus, start).unwrap().phase;
            let times: Vec<f64> = ode.times.iter().step_by(16).copied().collect();
            let ladder = motion_from_ladder(sys.as_ref(), e, theta0, &times).unwrap();
            for (i, pt) in ladder.points.iter().enumerate() {
                worst_x = worst_x.max((pt.x - ode.points[16 * i].x).abs());
            }

            for eps in Sign::BOTH {
                let (m, ph) = constant_of_motion_drift(sys.as_ref(), &ode, eps).unwrap();
                worst_mod = worst_mod.max(m);
                worst_phase = worst_phase.max(ph);
            }
        }
    }
    criterion(
        5,
        "motion oracle agreement",
        worst_x <= 1e-6 && worst_mod <= 1e-7 && worst_phase <= 1e-6,
        &format!(
            "max |x_ladder - x_ode| = {worst_x:.3e}, Q modulus drift {worst_mod:.3e}, \
             Q phase drift {worst_phase:.3e}"
        ),
    );
}

/// Criterion 6: at B = 0 the ladder reduces to -(C / sqrt(-E)) times the
/// known Poschl-Teller pair to 1e-10, with alpha = 2 sqrt(-E).
#[test]
fn acceptance_06_poschl_teller_limit() {
    let mut worst: f64 = 0.0;
    for e in [-3.5, -2.0, -1.0, -0.5] {
        let report = pt_limit_check(4.0, e, 100).unwrap();
        assert!(report.passed);
        let expect = 2.0 * (-e).sqrt();
        assert!((report.alpha_got - expect).abs() <= 1e-13 * expect);
        worst = worst.max(report.max_rel_dev);
    }
    criterion(
        6,
        "Poschl-Teller limit",
        worst <= 1e-10,
        &format!("max rel dev {worst:.3e}; alpha = 2 sqrt(-E) exactly"),
    );
}

/// Criterion 7: the flat radial limit: omega = (4/B)(-E)^{3/2} (4.0 at
/// B=8, E=-4), {A_+, A_-} = i B / sqrt(-E) (4 i at the same point), and
/// the shell identity r^2 p^2 - B r - r^2 E = -l^2 to 1e-10.
#[test]
fn acceptance_07_flat_kc_limit() {
    let report = flat_kc_limit_check(8.0, 1.0, -4.0).unwrap();
    let ok = report.passed
        && (report.omega_expected - 4.0).abs() < 1e-14
        && (report.omega_got - 4.0).abs() < 1e-8
        && report.bracket_dev <= 1e-6
        && report.shell_identity_dev <= 1e-10
        && report.shape_residual <= 1e-10;
    // a second energy for good measure
    let report2 = flat_kc_limit_check(8.0, 1.0, -9.0).unwrap();
    criterion(
        7,
        "flat Kepler-Coulomb limit",
        ok && report2.passed,
        &format!(
            "omega={:.12}, bracket dev {:.3e} (B/sqrt(-E)=4), identity dev {:.3e}, \
             curved convergence {:.3e}",
            report.omega_got,
            report.bracket_dev,
            report.shell_identity_dev,
            report.curved_convergence_dev
        ),
    );
}

/// Criterion 8: the zero-angular-momentum g-factor matches its independent
/// three-term closed form to 1e-10 at 100 shell points.
#[test]
fn acceptance_08_l_zero_limit() {
    let report = l_zero_limit_check(8.0, 1.0, -13.0).unwrap();
    let ok = report.passed && report.n_points >= 100 && report.max_rel_dev <= 1e-10;
    criterion(
        8,
        "l -> 0 limit",
        ok,
        &format!(
            "{} points, max rel dev {:.3e}, continuity {:.3e}",
            report.n_points, report.max_rel_dev, report.continuity_dev
        ),
    );
}

/// Criterion 9: the sign scans on 200 x 200 grids (tails out to |x| = 20):
/// the base-factor real part stays positive, the hyperbolic-well identity
/// a_{-1} = a'_{+1} holds to 1e-9, a'_{+1} keeps one sign, and dc/dx never
/// vanishes; the radial base-factor real part stays positive.
#[test]
fn acceptance_09_appendix_scans() {
    let sys = rmii();
    let e_grid = sys.energy_window().unwrap().interior_grid(200, 0.01);
    let x_grid: Vec<f64> = (0..200).map(|i| -20.0 + 40.0 * i as f64 / 199.0).collect();
    let rm = appendix_scan(&sys, &e_grid, &x_grid).unwrap();

    let kc = kc();
    let ek = kc.energy_window().unwrap().interior_grid(200, 0.01);
    let xk: Vec<f64> = (0..200).map(|i| 0.01 + 20.0 * i as f64 / 199.0).collect();
    let rk = appendix_scan(&kc, &ek, &xk).unwrap();

    let ok = rm.passed
        && rm.min_base_a > 0.0
        && rm.max_identity_dev <= 1e-9
        && rm.da_sign_constant
        && rm.min_abs_dc.iter().all(|&v| v > 0.0)
        && rk.passed
        && rk.min_base_a > 0.0;
    criterion(
        9,
        "sign scans",
        ok,
        &format!(
            "hyperbolic: min a = {:.3e}, identity dev {:.3e}, min |dc| = ({:.3e}, {:.3e}); \
             radial: min a = {:.3e}",
            rm.min_base_a, rm.max_identity_dev, rm.min_abs_dc[0], rm.min_abs_dc[1], rk.min_base_a
        ),
    );
}

/// Criterion 10: branch safety of the principal-log exponentiation:
/// Re(base factor) > 0 on 1e5 in-window shell samples across both systems.
#[test]
fn acceptance_10_branch_safety() {
    let mut rng = StdRng::seed_from_u64(31);
    let mut min_a = f64::INFINITY;
    let mut count = 0usize;
    for sys in [
        Box::new(rmii()) as Box<dyn System>,
        Box::new(kc()) as Box<dyn System>,
    ] {
        let base = sys.base_factor().unwrap();
        let w = sys.energy_window().unwrap();
        for _ in 0..500 {
            let e = w.e_min + (0.001 + 0.998 * rng.gen::<f64>()) * w.width();
            let (xm, xp) = sys.turning_points(e).unwrap();
            for _ in 0..100 {
                let x = xm + rng.gen::<f64>() * (xp - xm);
                let a = sys.factor_split(base, x, e).unwrap().a;
                min_a = min_a.min(a);
                count += 1;
            }
        }
        // and the assembled evaluation itself never trips the assertion
        let e = w.e_min + 0.5 * w.width();
        for pt in shell_samples(sys.as_ref(), e, 100, 5, 0.01).unwrap() {
            eval_ladder(sys.as_ref(), Sign::Minus, pt).unwrap();
            eval_ladder(sys.as_ref(), Sign::Plus, pt).unwrap();
        }
    }
    criterion(
        10,
        "branch safety",
        min_a > 0.0 && count == 100_000,
        &format!("{count} samples, min Re(base) = {min_a:.6}"),
    );
}

use std::collections::BTreeMap;

use gaugelab::fields::{
    builtin_config, derive_fields, scalar, zero, Connectivity, Constants, Dimension, Multiplicities, Point,
    PotentialDerivatives, PotentialSet, ScenarioConfig,
};
use gaugelab::gauge_solver::{
    apply_multiplicity, lambda_1d, naive_dirac_lambda, solve, solve_fixing_1d, solve_fixing_2d, solve_fixing_full,
    FixingOptions, Problem, Route, SolverError,
};
use gaugelab::numerics::QuadratureRule;

fn cfg(name: &str, kv: &[(&str, f64)]) -> ScenarioConfig {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    builtin_config(name, &params, &Constants::default()).unwrap()
}

fn opts() -> FixingOptions {
    FixingOptions::default()
}

/// Midpoint Riemann sum over a rectangle, the independent oracle for flux
/// integrals.
fn riemann2<F: Fn(f64, f64) -> f64>(f: F, u: (f64, f64), v: (f64, f64), m: usize) -> f64 {
    let (hu, hv) = ((u.1 - u.0) / m as f64, (v.1 - v.0) / m as f64);
    let mut acc = 0.0;
    for i in 0..m {
        let uu = u.0 + (i as f64 + 0.5) * hu;
        for j in 0..m {
            acc += f(uu, v.0 + (j as f64 + 0.5) * hv);
        }
    }
    acc * hu * hv
}

#[test]
fn capacitor_nonlocal_term_matches_riemann_oracle() {
    let c = cfg("vertical_strip_capacitor", &[]);
    let sol = solve(&c, Route::OneDTThenX, &opts()).unwrap();
    let parts = sol.evaluate_parts(Point::new(2.0, 0.0, 3.0)).unwrap();
    let e = c.fields.e_x.clone();
    let oracle = riemann2(|x, t| e(x, 0.0, t), (-1.0, 2.0), (0.0, 3.0), 1500);
    assert!((oracle - 6.0).abs() < 1e-2, "oracle {oracle}");
    assert!((parts.nonlocal - 6.0).abs() < 1e-6, "{}", parts.nonlocal);
}

#[test]
fn capacitor_fixing_reproduces_simplest_choice() {
    let c = cfg("vertical_strip_capacitor", &[("e0", 2.0), ("a", 0.0), ("b", 1.0)]);
    let fix = solve_fixing_1d(&Problem::from_config(&c), &opts()).unwrap();
    assert!(fix.g.as_ref().unwrap().is_zero());
    let g_hat = fix.g_hat.as_ref().unwrap();
    for &t in &[-1.0, 0.0, 1.5, 4.0] {
        let want = 1.0 * 2.0 * 1.0 * (t - 0.0);
        assert!((g_hat.value(t).unwrap() - want).abs() < 1e-9, "t={t}");
    }
    assert!(fix.max_residual() < 1e-9);
}

#[test]
fn temporal_strip_fixing_reproduces_stated_choice() {
    let (e0, dur, x0) = (1.5, 2.0, -1.0);
    let c = cfg("temporal_strip", &[("e0", e0), ("duration", dur), ("x0", x0)]);
    let fix = solve_fixing_1d(&Problem::from_config(&c), &opts()).unwrap();
    assert!(fix.g_hat.as_ref().unwrap().is_zero());
    let g = fix.g.as_ref().unwrap();
    for &x in &[-2.0, -1.0, 0.5, 3.0] {
        let want = -1.0 * e0 * dur * (x - x0);
        assert!((g.value(x).unwrap() - want).abs() < 1e-9, "x={x}");
    }
}

#[test]
fn routes_agree_and_hit_base() {
    for name in ["vertical_strip_capacitor", "temporal_strip", "triangle_B"] {
        let c = cfg(name, &[]);
        let [r1, r2] = Route::generalized(c.dim());
        let a = solve(&c, r1, &opts()).unwrap();
        let b = solve(&c, r2, &opts()).unwrap();
        assert!((a.evaluate(c.base).unwrap() - c.lambda0).abs() < 1e-9, "{name}");
        assert!((b.evaluate(c.base).unwrap() - c.lambda0).abs() < 1e-9, "{name}");
        let obs = c.observation.with_n(7).unwrap();
        for k in 0..obs.domain.len() {
            let p = obs.point(&obs.domain.index(k));
            if !obs.contains(p) {
                continue;
            }
            let d = a.evaluate(p).unwrap() - b.evaluate(p).unwrap();
            assert!(d.abs() < 1e-9, "{name} at {p}: {d}");
        }
    }
}

#[test]
fn triangle_fixing_matches_closed_forms() {
    let (bf, a) = (1.3, 2.0);
    let c = cfg("triangle_B", &[("b", bf), ("a", a)]);
    let fix = solve_fixing_2d(&Problem::from_config(&c), &opts()).unwrap();
    let s3 = 3f64.sqrt();
    let g_printed = |x: f64| bf * (-(s3 * a * x - s3 / 2.0 * x * x) + s3 / 4.0 * a * a);
    let h_printed = |y: f64| bf * ((a * y - y * y / s3) - s3 / 4.0 * a * a);
    let g = fix.g.as_ref().unwrap();
    let h = fix.h.as_ref().unwrap();
    let xs: Vec<f64> = (0..=20).map(|i| a / 2.0 + i as f64 * a / 40.0).collect();
    let ys: Vec<f64> = (0..=20).map(|i| i as f64 * s3 * a / 40.0).collect();
    let off_g = g.value(xs[0]).unwrap() - g_printed(xs[0]);
    let off_h = h.value(ys[0]).unwrap() - h_printed(ys[0]);
    for &x in &xs {
        assert!((g.value(x).unwrap() - g_printed(x) - off_g).abs() < 1e-9, "x={x}");
    }
    for &y in &ys {
        assert!((h.value(y).unwrap() - h_printed(y) - off_h).abs() < 1e-9, "y={y}");
    }
}

#[test]
fn flux_tube_route_difference_is_flux() {
    let c = cfg("magnetic_ab_flux_tube", &[("flux", 0.7)]);
    let r1 = solve(&c, Route::TwoDRoute1, &opts()).unwrap();
    let r2 = solve(&c, Route::TwoDRoute2, &opts()).unwrap();
    for &(x, y) in &[(1.5, 1.5), (2.2, 2.9), (3.0, 1.7)] {
        let p = Point::new(x, y, 0.0);
        let d = r2.evaluate(p).unwrap() - r1.evaluate(p).unwrap();
        assert!((d - 0.7).abs() < 1e-6 * 0.7, "{d}");
    }
}

#[test]
fn cages_route_difference_is_electric_phase() {
    let (v, dur) = (1.7, 0.8);
    let c = cfg("electric_ab_cages", &[("v", v), ("duration", dur)]);
    let r5 = solve(&c, Route::OneDTThenX, &opts()).unwrap();
    let r6 = solve(&c, Route::OneDXThenT, &opts()).unwrap();
    for &(x, t) in &[(1.5, 1.3), (2.9, 3.7)] {
        let p = Point::new(x, 0.0, t);
        let d = r5.evaluate(p).unwrap() - r6.evaluate(p).unwrap();
        assert!((d - v * dur).abs() < 1e-6 * v * dur, "{d}");
    }
}

#[test]
fn pure_gauge_is_recovered() {
    // chi = sin(x) cos(2t) + x t; A = d chi/dx, phi = -(1/c) d chi/dt
    let c = 1.5;
    let con = Constants::new(c, 1.0, 1.0, 1.0, 1.0).unwrap();
    let chi = |x: f64, t: f64| x.sin() * (2.0 * t).cos() + x * t;
    let a_x = scalar(|x, _, t| x.cos() * (2.0 * t).cos() + t);
    let phi = scalar(move |x, _, t| -(-2.0 * x.sin() * (2.0 * t).sin() + x) / c);
    let pot = PotentialSet::new(Dimension::OneD, a_x, zero(), phi);
    let fields = derive_fields(&pot, &con).unwrap();
    let mut sc = cfg("naive_demo_polynomial", &[]);
    sc.potentials = pot;
    sc.fields = fields;
    sc.constants = con;
    sc.lambda0 = 0.25;
    sc.line_rule = QuadratureRule::new(0.01, 9);
    sc.area_rule = QuadratureRule::new(0.05, 9);
    let problem = Problem::from_config(&sc);
    let b = sc.base;
    let fix = solve_fixing_1d(&problem, &FixingOptions { tolerance: 1e-4, sample_n: 5 }).unwrap();
    for route in [Route::OneDTThenX, Route::OneDXThenT] {
        let sol = lambda_1d(&problem, &fix, route).unwrap();
        for &(x, t) in &[(1.0, 1.0), (2.5, 1.7), (3.0, 3.0)] {
            let want = chi(x, t) - chi(b.x, b.t) + 0.25;
            let got = sol.evaluate(Point::new(x, 0.0, t)).unwrap();
            assert!((got - want).abs() < 1e-6, "{route} ({x},{t}): {got} vs {want}");
        }
    }
}

#[test]
fn naive_with_zero_potentials_is_constant() {
    let mut sc = cfg("naive_demo_polynomial", &[]);
    sc.potentials = PotentialSet::new(Dimension::OneD, zero(), zero(), zero())
        .with_derivatives(PotentialDerivatives::default());
    sc.lambda0 = -3.0;
    for v in [Route::NaiveV1, Route::NaiveV2] {
        let sol = naive_dirac_lambda(&Problem::from_config(&sc), v).unwrap();
        assert_eq!(sol.evaluate(Point::new(2.0, 0.0, 1.0)).unwrap(), -3.0);
    }
}

#[test]
fn multiplicity_rules() {
    let simple = cfg("vertical_strip_capacitor", &[]);
    let sol = solve(&simple, Route::OneDTThenX, &opts()).unwrap();
    assert!(matches!(
        apply_multiplicity(sol, Multiplicities::default()),
        Err(SolverError::NotMultiplyConnected)
    ));
    let tube = cfg("magnetic_ab_flux_tube", &[]);
    assert_eq!(tube.connectivity, Connectivity::Multiple);
    let sol = solve(&tube, Route::TwoDRoute1, &opts()).unwrap();
    let p = Point::new(2.0, 2.0, 0.0);
    let before = sol.evaluate(p).unwrap();
    let same = apply_multiplicity(sol.clone(), Multiplicities::default()).unwrap();
    assert_eq!(same.evaluate(p).unwrap(), before);
}

#[test]
fn van_kampen_zero_fixing_is_admissible() {
    let c = cfg("van_kampen_solenoid", &[]);
    let fix = solve_fixing_full(&Problem::from_config(&c), &FixingOptions { tolerance: 1e-9, sample_n: 3 }).unwrap();
    assert!(fix.big_g.as_ref().unwrap().is_zero());
    assert!(fix.big_g_hat.as_ref().unwrap().is_zero());
    assert!(fix.big_f.as_ref().unwrap().is_zero());
    assert!(fix.max_residual() < 1e-9);
}

#[test]
fn static_scenario_embeds_in_full_routes() {
    let c = cfg("triangle_B", &[]);
    let problem = Problem::from_config(&c);
    let f2 = solve_fixing_2d(&problem, &opts()).unwrap();
    let ff = solve_fixing_full(&problem, &opts()).unwrap();
    let r1 = gaugelab::gauge_solver::lambda_2d_static(&problem, &f2, Route::TwoDRoute1).unwrap();
    let r2 = gaugelab::gauge_solver::lambda_2d_static(&problem, &f2, Route::TwoDRoute2).unwrap();
    let p = gaugelab::gauge_solver::lambda_full(&problem, &ff, Route::FullPrimary).unwrap();
    let d = gaugelab::gauge_solver::lambda_full(&problem, &ff, Route::FullDual).unwrap();
    for &(x, y) in &[(1.5, 1.5), (1.9, 0.5), (2.0, 1.0)] {
        let q = Point::new(x, y, 0.0);
        assert!((p.evaluate(q).unwrap() - r2.evaluate(q).unwrap()).abs() < 1e-6);
        assert!((d.evaluate(q).unwrap() - r1.evaluate(q).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn naive_demo_has_no_admissible_fixing() {
    let c = cfg("naive_demo_polynomial", &[]);
    let err = solve_fixing_1d(&Problem::from_config(&c), &opts()).unwrap_err();
    assert!(matches!(err, SolverError::NoAdmissibleFixing { .. }), "{err}");
    assert!(err.to_string().contains("no admissible fixing function"));
}

#[test]
fn wrong_dimension_is_rejected() {
    let c = cfg("triangle_B", &[]);
    let err = naive_dirac_lambda(&Problem::from_config(&c), Route::NaiveV1).unwrap_err();
    assert!(matches!(err, SolverError::WrongDimension { .. }));
    assert_eq!("full_dual".parse::<Route>().unwrap(), Route::FullDual);
    assert!("sideways".parse::<Route>().is_err());
}

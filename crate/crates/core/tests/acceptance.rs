//! Acceptance checks. Each test writes one `criterion N ... PASS|FAIL` line
//! straight to stdout so the verdicts show up without `--nocapture`.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;

use gaugelab::analysis::{pde_residual, van_kampen_delta, PhaseReport};
use gaugelab::cli::{execute, Overrides};
use gaugelab::fields::{
    builtin_config, faraday_residual, Constants, FaradayOptions, Loop, ObservationRegion, Point, ScenarioConfig,
};
use gaugelab::gauge_solver::{naive_dirac_lambda, solve, solve_fixing_2d, FixingOptions, GaugeSolution, Problem, Route};
use gaugelab::numerics::Interval;
use gaugelab::semiclassical::{
    fringe_shift_electric, fringe_shift_magnetic, phase_pair, trajectory_oracle, SlitSetup, Variant, MIN_STEPS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const GRID: usize = 401;
const RESIDUAL_TOL: f64 = 1e-5;
const NAIVE_REL: f64 = 0.05;
const CANCEL_TOL: f64 = 1e-5;
const NONTRIVIAL: f64 = 0.1;
const CLOSED_FORM_TOL: f64 = 1e-4;
const FLUX_REL: f64 = 1e-6;
const SIGN_REL: f64 = 1e-9;
const CAUSAL_TOL: f64 = 1e-3;
const FARADAY_TOL: f64 = 1e-3;

fn verdict(criterion: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion} {name}: {status} ({detail})");
}

fn cfg(name: &str, kv: &[(&str, f64)]) -> ScenarioConfig {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    builtin_config(name, &params, &Constants::default()).unwrap()
}

fn route(c: &ScenarioConfig, r: Route) -> GaugeSolution {
    solve(c, r, &FixingOptions::default()).unwrap()
}

fn grid_points(region: &ObservationRegion) -> Vec<Point> {
    (0..region.domain.len())
        .map(|k| region.point(&region.domain.index(k)))
        .filter(|p| region.contains(*p))
        .collect()
}

fn differences(a: &GaugeSolution, b: &GaugeSolution, pts: &[Point], con: &Constants) -> Vec<PhaseReport> {
    pts.par_iter()
        .map(|&p| PhaseReport::from_parts(&a.evaluate_parts(p).unwrap(), &b.evaluate_parts(p).unwrap(), con))
        .collect()
}

const SIMPLE: [&str; 3] = ["vertical_strip_capacitor", "temporal_strip", "triangle_B"];

#[test]
fn criterion_1_generalized_solutions_are_exact() {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for name in SIMPLE {
        let c = cfg(name, &[]);
        let region = c.observation.with_n(GRID).unwrap();
        for r in Route::generalized(c.dim()) {
            let rep = pde_residual(&route(&c, r), &c.potentials, &region, &c.constants, RESIDUAL_TOL).unwrap();
            worst = worst.max(rep.max());
            detail.push(format!("{name}/{r} {:.2e}", rep.max()));
        }
    }
    let ok = worst < RESIDUAL_TOL;
    verdict(1, "generalized residual", ok, &format!("max {worst:.3e} < {RESIDUAL_TOL:e}; {}", detail.join(", ")));
    assert!(ok, "{detail:?}");
}

/// Residuals of the naive form at `p` by central differences:
/// `(dLambda/dx - A_x, (1/c) dLambda/dt + phi)` with `A_x = x t`, `phi = x^2 t`.
fn naive_residuals(sol: &GaugeSolution, p: Point, c: f64) -> (f64, f64) {
    let h = 1e-4;
    let f = |x: f64, t: f64| sol.evaluate(Point::new(x, 0.0, t)).unwrap();
    let dx = (f(p.x + h, p.t) - f(p.x - h, p.t)) / (2.0 * h);
    let dt = (f(p.x, p.t + h) - f(p.x, p.t - h)) / (2.0 * h);
    (dx - p.x * p.t, dt / c + p.x * p.x * p.t)
}

fn within(got: f64, want: f64) -> bool {
    (got.abs() - want).abs() <= NAIVE_REL * want + 1e-9
}

#[test]
fn criterion_2_naive_form_fails() {
    let c = cfg("naive_demo_polynomial", &[]);
    let (x0, t0, cc) = (c.base.x, c.base.t, c.constants.c);
    let problem = Problem::from_config(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let pts: Vec<Point> = (0..100)
        .map(|_| Point::new(rng.gen_range(1.05..2.95), 0.0, rng.gen_range(1.05..2.95)))
        .collect();
    let stated = |p: Point| (p.x * (p.t * p.t - t0 * t0)).abs();

    let mut v2_own = true;
    for variant in [Route::NaiveV1, Route::NaiveV2] {
        let sol = naive_dirac_lambda(&problem, variant).unwrap();
        let res: Vec<(f64, f64)> = pts.iter().map(|&p| naive_residuals(&sol, p, cc)).collect();
        let hits = pts
            .iter()
            .zip(&res)
            .filter(|(&p, &(rx, rt))| within(rx, stated(p)) || within(rt, stated(p)))
            .count();
        verdict(
            2,
            &format!("{variant} residual vs |x(t^2 - t0^2)|"),
            hits == pts.len(),
            &format!("{hits}/100 points within 5%"),
        );
        if variant == Route::NaiveV1 {
            assert_eq!(hits, pts.len());
        } else {
            // A(x', t0) and phi(x0, t') leave x(t0 - t) and t(x^2 - x0^2) behind instead.
            let own = pts.iter().zip(&res).all(|(&p, &(rx, rt))| {
                within(rx, (p.x * (t0 - p.t)).abs()) && within(rt, (p.t * (p.x * p.x - x0 * x0)).abs())
            });
            verdict(2, "naive_v2 residual vs x(t0 - t), t(x^2 - x0^2)", own, "100 points within 5%");
            v2_own = own;
        }
    }
    assert!(v2_own);
}

#[test]
fn criterion_3_routes_agree_and_cancel() {
    let mut worst: f64 = 0.0;
    let (mut tri_ab, mut tri_nl) = (0.0f64, 0.0f64);
    for name in SIMPLE {
        let c = cfg(name, &[]);
        let [r1, r2] = Route::generalized(c.dim());
        let pts = grid_points(&c.observation.with_n(GRID).unwrap());
        for d in differences(&route(&c, r1), &route(&c, r2), &pts, &c.constants) {
            worst = worst.max(d.delta_lambda.abs() / (d.ab_term.abs() + 1.0));
            if name == "triangle_B" {
                tri_ab = tri_ab.max(d.ab_term.abs());
                tri_nl = tri_nl.max(d.nonlocal_term.abs());
            }
        }
    }
    let ok = worst < CANCEL_TOL && tri_ab > NONTRIVIAL && tri_nl > NONTRIVIAL;
    verdict(
        3,
        "route cancellation",
        ok,
        &format!("max |dL|/(|ab|+1) {worst:.3e}; triangle |ab| {tri_ab:.3}, |nonlocal| {tri_nl:.3}"),
    );
    assert!(ok);
}

/// Flux of the side-`a` triangle (apex up, base on the x axis from 0 to
/// `a`) left of `x` and below `y`. The chord is piecewise linear in `y'`, so
/// Simpson's rule on each piece is exact.
fn triangle_flux(bf: f64, a: f64, x: f64, y: f64) -> f64 {
    let s3 = 3f64.sqrt();
    let top = y.min(s3 * a / 2.0).max(0.0);
    let chord = |yp: f64| ((a - yp / s3).min(x) - yp / s3).max(0.0);
    let simpson = |lo: f64, hi: f64| (hi - lo) / 6.0 * (chord(lo) + 4.0 * chord(0.5 * (lo + hi)) + chord(hi));
    let knee = (s3 * (a - x)).clamp(0.0, top);
    bf * (simpson(0.0, knee) + simpson(knee, top))
}

#[test]
fn criterion_4_triangle_closed_forms() {
    let (bf, a) = (1.0, 2.0);
    let c = cfg("triangle_B", &[("b", bf), ("a", a)]);
    let s3 = 3f64.sqrt();
    let g = |x: f64| bf * (-(s3 * a * x - s3 / 2.0 * x * x) + s3 / 4.0 * a * a);
    let h = |y: f64| bf * ((a * y - y * y / s3) - s3 / 4.0 * a * a);
    let d = |f: &dyn Fn(f64) -> f64, s: f64| (f(s + 1e-5) - f(s - 1e-5)) / 2e-5;

    // g' = -int B dy', h' = int B dx', h = W + g over the documented region
    let pts = grid_points(&c.observation.with_n(41).unwrap());
    let mut cond: f64 = 0.0;
    for p in &pts {
        cond = cond.max((d(&g, p.x) + bf * s3 * (a - p.x)).abs());
        cond = cond.max((d(&h, p.y) - bf * (a - 2.0 * p.y / s3)).abs());
        cond = cond.max((h(p.y) - triangle_flux(bf, a, p.x, p.y) - g(p.x)).abs());
    }

    let fix = solve_fixing_2d(&Problem::from_config(&c), &FixingOptions::default()).unwrap();
    let (sg, sh) = (fix.g.unwrap(), fix.h.unwrap());
    let xs: Vec<f64> = (0..=200).map(|i| a / 2.0 + i as f64 * a / 400.0).collect();
    let ys: Vec<f64> = (0..=200).map(|i| i as f64 * s3 * a / 400.0).collect();
    let spread = |dev: Vec<f64>| {
        let lo = dev.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let dev_g = spread(xs.iter().map(|&x| sg.value(x).unwrap() - g(x)).collect());
    let dev_h = spread(ys.iter().map(|&y| sh.value(y).unwrap() - h(y)).collect());
    let ok = cond < CLOSED_FORM_TOL && dev_g < CLOSED_FORM_TOL && dev_h < CLOSED_FORM_TOL;
    verdict(
        4,
        "triangle closed forms",
        ok,
        &format!("condition residual {cond:.2e}; solver deviation g {dev_g:.2e}, h {dev_h:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_multiplicities_restore_ab() {
    let mut detail = Vec::new();
    let mut ok = true;
    let cases: [(&str, &[(&str, f64)], Route, Route, f64); 2] = [
        ("magnetic_ab_flux_tube", &[("flux", 0.7)], Route::TwoDRoute2, Route::TwoDRoute1, 0.7),
        // c v T with c = 1
        ("electric_ab_cages", &[("v", 1.7), ("duration", 0.8)], Route::OneDTThenX, Route::OneDXThenT, 1.7 * 0.8),
    ];
    for (name, params, a, b, want) in cases {
        let c = cfg(name, params);
        let pts = grid_points(&c.observation.with_n(101).unwrap());
        let worst = differences(&route(&c, a), &route(&c, b), &pts, &c.constants)
            .iter()
            .map(|d| (d.delta_lambda - want).abs() / want)
            .fold(0.0, f64::max);
        ok &= worst < FLUX_REL;
        detail.push(format!("{name} rel {worst:.2e}"));
    }
    verdict(5, "AB recovery", ok, &format!("{} < {FLUX_REL:e}", detail.join(", ")));
    assert!(ok);
}

fn random_setup(rng: &mut ChaCha8Rng) -> SlitSetup {
    let con = Constants::default();
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let l = rng.gen_range(1.0..100.0);
    let v = rng.gen_range(0.1..10.0);
    let q = sign(rng) * rng.gen_range(0.1..5.0);
    let s = SlitSetup::new(con, l, rng.gen_range(0.01..1.0), rng.gen_range(0.1..10.0), v, q).unwrap();
    let ratio = rng.gen_range(0.001..0.04);
    s.with_magnetic(sign(rng) * rng.gen_range(0.01..10.0), ratio * l)
        .unwrap()
        .with_electric(sign(rng) * rng.gen_range(0.01..10.0), ratio * l / v)
        .unwrap()
}

#[test]
fn criterion_6_semiclassical_sign_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_setup(&mut rng);
        for v in [Variant::Magnetic, Variant::Electric] {
            let (semi, ab) = phase_pair(&s, v);
            worst = worst.max((semi.value / ab.value + 1.0).abs());
        }
    }
    let sign_ok = worst < SIGN_REL;
    verdict(6, "sign theorem", sign_ok, &format!("max |semi/ab + 1| {worst:.2e} over 1000 setups"));

    // lambda = 0.01, L = 10, field region W = ratio L (or v T = ratio L)
    let con = Constants::default().with_h(1.0).unwrap();
    let base = SlitSetup::new(con, 10.0, 0.2, 100.0, 1.0, 1.0).unwrap();
    let mut oracle_ok = true;
    let mut detail = Vec::new();
    for (ratio, tol) in [(0.05, 1e-2), (0.005, 1e-3)] {
        let w = ratio * base.l;
        for v in [Variant::Magnetic, Variant::Electric] {
            let (s, closed) = match v {
                Variant::Magnetic => {
                    let s = base.with_magnetic(1.0, w).unwrap();
                    (s, fringe_shift_magnetic(&s).value)
                }
                Variant::Electric => {
                    let s = base.with_electric(1.0, w / base.v).unwrap();
                    (s, fringe_shift_electric(&s).value)
                }
            };
            let x_c = trajectory_oracle(&s, v, MIN_STEPS).unwrap().x_c;
            let rel = (x_c - closed).abs() / closed.abs();
            oracle_ok &= rel < tol;
            detail.push(format!("{v}@{ratio} {rel:.2e}<{tol:e}"));
        }
    }
    verdict(6, "trajectory oracle", oracle_ok, &detail.join(", "));
    assert!(sign_ok && oracle_ok);
}

#[test]
fn criterion_7_van_kampen_causality() {
    let c = cfg("van_kampen_solenoid", &[]);
    let model = c.van_kampen.unwrap();
    assert_eq!((model.phi0, model.phi1, model.t_switch, model.ramp, c.constants.c), (1.0, 2.0, 5.0, 1.0, 1.0));
    assert_eq!(c.base.t, 0.0);
    let l = 10.0;
    let mut causal_ok = true;
    let mut detail = Vec::new();
    for t in [2.0, 8.0, 14.9] {
        let r = van_kampen_delta(&c, l, t, &c.constants).unwrap();
        let err = (r.delta_lambda - 1.0).abs();
        causal_ok &= err < CAUSAL_TOL && r.nonlocal_term == 0.0;
        detail.push(format!("t={t} |dL-1| {err:.2e} nonlocal {}", r.nonlocal_term));
    }
    verdict(7, "causal phase", causal_ok, &detail.join(", "));

    let times = Interval::new(0.0, 20.0, 25).unwrap();
    let mut worst: f64 = 0.0;
    for radius in [0.5, 5.0, 10.0, 20.0] {
        let lp = Loop::Circle { center: (0.0, 0.0), radius };
        worst = worst.max(faraday_residual(&c.fields, &lp, &times, &c.constants, &FaradayOptions::default()).unwrap());
    }
    let faraday_ok = worst < FARADAY_TOL;
    verdict(7, "Faraday law", faraday_ok, &format!("max residual {worst:.2e} at radii 0.5..20, t in [0, 20]"));
    assert!(causal_ok && faraday_ok);
}

#[test]
fn criterion_8_csv_determinism() {
    let specs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&specs)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let mut same = true;
    for f in &files {
        let stem = f.file_stem().unwrap().to_string_lossy().to_string();
        let mut runs = Vec::new();
        for k in 0..2 {
            let csv = dir.path().join(format!("{stem}.{k}.csv"));
            let ov = Overrides { csv: Some(csv.clone()), ..Default::default() };
            execute(f, &ov, None).unwrap();
            runs.push(std::fs::read(csv).unwrap());
        }
        same &= runs[0] == runs[1];
    }
    verdict(8, "determinism", same, &format!("{} spec files run twice, CSVs byte-identical", files.len()));
    assert!(same);
}

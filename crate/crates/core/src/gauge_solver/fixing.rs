use std::sync::Arc;

use super::{ConditionResidual, Fixing1, Fixing2, FixingFunctions, Integrals, Problem, Result, SolverError};
use crate::fields::{Connectivity, Dimension, ObservationRegion, Point};
use crate::numerics::Axis;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixingOptions {
    /// Largest admissible condition residual.
    pub tolerance: f64,
    /// Reference points per observation axis at which conditions are checked.
    pub sample_n: usize,
}

impl Default for FixingOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            sample_n: 9,
        }
    }
}

type PointFn = Arc<dyn Fn(Point) -> Result<f64> + Send + Sync>;

/// A nonlocal flux `W(u, v)` over the rectangle from the base to `(u, v)`
/// with its partial derivatives, each a single line integral.
struct Nonlocal {
    u: Axis,
    v: Axis,
    w: PointFn,
    w_u: PointFn,
    w_v: PointFn,
}

fn observation(problem: &Problem) -> Result<&ObservationRegion> {
    problem.observation.as_ref().ok_or(SolverError::NoObservationRegion)
}

/// Sample points of the observation region on the given axes; other
/// coordinates are taken from `fill`.
fn samples(obs: &ObservationRegion, axes: &[Axis], n: usize, fill: Point) -> Result<Vec<Point>> {
    let coarse = obs.with_n(n.max(3))?;
    let dom = &coarse.domain;
    let mut out = Vec::new();
    for k in 0..dom.len() {
        let idx = dom.index(k);
        let full = coarse.point(&idx);
        if !coarse.contains(full) {
            continue;
        }
        let p = axes.iter().fold(fill, |p, a| p.with(*a, full.coord(*a)));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn worst<F>(pts: &[Point], f: F) -> Result<f64>
where
    F: Fn(Point) -> Result<f64>,
{
    let mut m: f64 = 0.0;
    for &p in pts {
        m = m.max(f(p)?.abs());
    }
    Ok(m)
}

fn check(name: String, value: f64, tol: f64) -> Result<ConditionResidual> {
    if value <= tol {
        Ok(ConditionResidual {
            name,
            value,
            tolerance: tol,
        })
    } else {
        Err(SolverError::NoAdmissibleFixing {
            condition: name,
            residual: value,
            tolerance: tol,
        })
    }
}

fn range(obs: &ObservationRegion, axis: Axis) -> (f64, f64) {
    obs.domain
        .interval(axis)
        .map(|iv| (iv.lo(), iv.hi()))
        .unwrap_or((f64::NEG_INFINITY, f64::INFINITY))
}

/// Finds `p(u)` and `q(v)` with `p'(u) = -W_u`, `q'(v) = W_v` and
/// `q(v) = W(u, v) + p(u)` at every sample: tries `p = 0`, then `q = 0`,
/// then the general pair built from `W` along the reference lines through
/// the upper corner of the observation region.
///
/// Multiply-connected configurations keep `p = q = 0`: the enclosed flux is
/// carried by the multiplicities instead, so only the derivative conditions
/// are checked.
fn solve_pair(
    problem: &Problem,
    nl: Nonlocal,
    pts: &[Point],
    reference: Point,
    names: (&str, &str),
    tol: f64,
) -> Result<(Fixing1, Fixing1, Vec<ConditionResidual>)> {
    let Nonlocal { u, v, w, w_u, w_v } = nl;
    let res_p = |p: &Fixing1| worst(pts, |pt| Ok(p.deriv(pt.coord(u))? + w_u(pt)?));
    let res_q = |q: &Fixing1| worst(pts, |pt| Ok(q.deriv(pt.coord(v))? - w_v(pt)?));
    let res_bracket = |p: &Fixing1, q: &Fixing1| {
        worst(pts, |pt| Ok(q.value(pt.coord(v))? - w(pt)? - p.value(pt.coord(u))?))
    };

    let along_v = |offset: f64| {
        let (w, w_v) = (w.clone(), w_v.clone());
        Fixing1::new(
            Arc::new(move |s| Ok(w(reference.with(v, s))? + offset)),
            Arc::new(move |s| w_v(reference.with(v, s))),
        )
    };
    let along_u = || {
        let (w, w_u) = (w.clone(), w_u.clone());
        Fixing1::new(
            Arc::new(move |s| Ok(-w(reference.with(u, s))?)),
            Arc::new(move |s| Ok(-w_u(reference.with(u, s))?)),
        )
    };

    let (pname, qname) = names;
    let zero = Fixing1::zero();
    if problem.connectivity == Connectivity::Multiple {
        let out = vec![
            check(format!("{pname} = 0 derivative condition"), res_p(&zero)?, tol)?,
            check(format!("{qname} = 0 derivative condition"), res_q(&zero)?, tol)?,
        ];
        return Ok((zero.clone(), zero, out));
    }
    let (p, q) = if res_p(&zero)? <= tol {
        (zero, along_v(0.0))
    } else if res_q(&zero)? <= tol {
        (along_u(), zero)
    } else {
        (along_u(), along_v(-w(reference)?))
    };

    let mut out = vec![
        check(format!("{pname} derivative condition"), res_p(&p)?, tol)?,
        check(format!("{qname} derivative condition"), res_q(&q)?, tol)?,
        check(format!("{qname} = nonlocal + {pname} (bracket independence)"), res_bracket(&p, &q)?, tol)?,
    ];
    let obs = observation(problem)?;
    let (ulo, uhi) = range(obs, u);
    let (vlo, vhi) = range(obs, v);
    let p = p.bridged(problem.base.coord(u), ulo, uhi)?;
    let q = q.bridged(problem.base.coord(v), vlo, vhi)?;
    // bridging must not change anything on the observation region
    out.push(check(format!("{pname}, {qname} after base normalization"), res_bracket(&p, &q)?, tol)?);
    Ok((p, q, out))
}

fn require_dim(problem: &Problem, dims: &[Dimension], route: super::Route) -> Result<()> {
    let got = problem.dim();
    if dims.contains(&got) {
        Ok(())
    } else {
        Err(SolverError::WrongDimension {
            route,
            expected: route.dimension(),
            got,
        })
    }
}

/// `g(x)` and `g_hat(t)` for the 1+1D routes:
/// `g'(x) = -c int_{t0}^{t} E(x, t') dt'`, `g_hat'(t) = c int_{x0}^{x} E(x', t) dx'`.
pub fn solve_fixing_1d(problem: &Problem, opts: &FixingOptions) -> Result<FixingFunctions> {
    require_dim(problem, &[Dimension::OneD], super::Route::OneDTThenX)?;
    let ig = problem.integrals.clone();
    let b = problem.base;
    let obs = observation(problem)?;
    let pts = samples(obs, &[Axis::X, Axis::T], opts.sample_n, Point::new(0.0, 0.0, 0.0))?;
    let reference = obs.upper().with(Axis::Y, 0.0);
    let nl = Nonlocal {
        u: Axis::X,
        v: Axis::T,
        w: electric_flux(&ig, b),
        w_u: {
            let ig = ig.clone();
            Arc::new(move |p| Ok(ig.c() * ig.line(&ig.fields.e_x, Axis::T, p, b.t, p.t)?))
        },
        w_v: {
            let ig = ig.clone();
            Arc::new(move |p| Ok(ig.c() * ig.line(&ig.fields.e_x, Axis::X, p, b.x, p.x)?))
        },
    };
    let (g, g_hat, residuals) = solve_pair(problem, nl, &pts, reference, ("g", "g_hat"), opts.tolerance)?;
    Ok(FixingFunctions {
        g: Some(g),
        g_hat: Some(g_hat),
        residuals,
        ..Default::default()
    })
}

/// `c int_{t0}^{t} dt' int_{x0}^{x} dx' E(x', t')` in the (x, t) plane at y = 0.
pub(crate) fn electric_flux(ig: &Arc<Integrals>, b: Point) -> PointFn {
    let ig = ig.clone();
    Arc::new(move |p| {
        let at = Point::new(0.0, 0.0, 0.0);
        Ok(ig.c() * ig.rect(&ig.fields.e_x, Axis::T, Axis::X, at, (b.t, p.t), (b.x, p.x))?)
    })
}

/// `int_{y0}^{y} dy' int_{x0}^{x} dx' B(x', y', t)` at a fixed time.
pub(crate) fn magnetic_flux(ig: &Arc<Integrals>, b: Point, t: f64) -> PointFn {
    let ig = ig.clone();
    Arc::new(move |p| {
        let at = Point::new(0.0, 0.0, t);
        ig.rect(&ig.fields.b, Axis::Y, Axis::X, at, (b.y, p.y), (b.x, p.x))
    })
}

fn magnetic_nonlocal(ig: &Arc<Integrals>, b: Point, t: f64) -> Nonlocal {
    Nonlocal {
        u: Axis::X,
        v: Axis::Y,
        w: magnetic_flux(ig, b, t),
        w_u: {
            let ig = ig.clone();
            Arc::new(move |p| ig.line(&ig.fields.b, Axis::Y, p.with(Axis::T, t), b.y, p.y))
        },
        w_v: {
            let ig = ig.clone();
            Arc::new(move |p| ig.line(&ig.fields.b, Axis::X, p.with(Axis::T, t), b.x, p.x))
        },
    }
}

/// `g(x)` and `h(y)` for the static 2D routes:
/// `g'(x) = -int_{y0}^{y} B(x, y') dy'`, `h'(y) = int_{x0}^{x} B(x', y) dx'`.
pub fn solve_fixing_2d(problem: &Problem, opts: &FixingOptions) -> Result<FixingFunctions> {
    require_dim(problem, &[Dimension::TwoDStatic], super::Route::TwoDRoute1)?;
    let ig = problem.integrals.clone();
    let b = problem.base;
    let obs = observation(problem)?;
    let fill = Point::new(0.0, 0.0, b.t);
    let pts = samples(obs, &[Axis::X, Axis::Y], opts.sample_n, fill)?;
    let reference = obs.upper().with(Axis::T, b.t);
    let nl = magnetic_nonlocal(&ig, b, b.t);
    let (g, h, residuals) = solve_pair(problem, nl, &pts, reference, ("g", "h"), opts.tolerance)?;
    Ok(FixingFunctions {
        g: Some(g),
        h: Some(h),
        residuals,
        ..Default::default()
    })
}

/// `G(y)`, `G_hat(x)` and `F(x, y)` for the 2+1D routes:
/// `G'(y) = int_{x0}^{x} B(x', y, t0) dx'`,
/// `G_hat'(x) = -int_{y0}^{y} B(x, y', t0) dy'`,
/// `grad F = -c int_{t0}^{t} E(x, y, t') dt'`.
pub fn solve_fixing_full(problem: &Problem, opts: &FixingOptions) -> Result<FixingFunctions> {
    require_dim(problem, &[Dimension::TwoPlusOne, Dimension::TwoDStatic], super::Route::FullPrimary)?;
    let ig = problem.integrals.clone();
    let b = problem.base;
    let obs = observation(problem)?;
    let tol = opts.tolerance;

    let fill = Point::new(0.0, 0.0, b.t);
    let xy = samples(obs, &[Axis::X, Axis::Y], opts.sample_n, fill)?;
    let reference = obs.upper().with(Axis::T, b.t);
    let nl = magnetic_nonlocal(&ig, b, b.t);
    let (big_g_hat, big_g, mut residuals) = solve_pair(problem, nl, &xy, reference, ("G_hat", "G"), tol)?;

    let has_t = obs.domain.interval(Axis::T).is_some();
    let axes: &[Axis] = if has_t { &[Axis::X, Axis::Y, Axis::T] } else { &[Axis::X, Axis::Y] };
    let pts = samples(obs, axes, opts.sample_n, fill)?;
    let c = ig.c();
    let time_integral = |comp: usize| {
        let ig = ig.clone();
        move |p: Point, upto: f64| -> Result<f64> {
            let f = if comp == 0 { &ig.fields.e_x } else { &ig.fields.e_y };
            Ok(c * ig.line(f, Axis::T, p, b.t, upto)?)
        }
    };
    let (ix, iy) = (time_integral(0), time_integral(1));
    let res_f = |f: &Fixing2| {
        worst(&pts, |p| {
            let (fx, fy) = f.grad(p.x, p.y)?;
            Ok((fx + ix(p, p.t)?).abs().max((fy + iy(p, p.t)?).abs()))
        })
    };
    let zero = Fixing2::zero();
    let big_f = if res_f(&zero)? <= tol {
        zero
    } else {
        let t_r = obs.upper().t.max(b.t);
        let (ix2, iy2) = (ix.clone(), iy.clone());
        let ig2 = ig.clone();
        let value = Arc::new(move |x: f64, y: f64| -> Result<f64> {
            let at = Point::new(0.0, 0.0, 0.0);
            let leg_x = ig2.rect(&ig2.fields.e_x, Axis::T, Axis::X, at.with(Axis::Y, b.y), (b.t, t_r), (b.x, x))?;
            let leg_y = ig2.rect(&ig2.fields.e_y, Axis::T, Axis::Y, at.with(Axis::X, x), (b.t, t_r), (b.y, y))?;
            Ok(-c * (leg_x + leg_y))
        });
        let grad = Arc::new(move |x: f64, y: f64| -> Result<(f64, f64)> {
            let p = Point::new(x, y, t_r);
            Ok((-ix2(p, t_r)?, -iy2(p, t_r)?))
        });
        let f = Fixing2::new(value, grad);
        let fb = &ig.fields.b;
        let mixed = worst(&xy, |p| Ok(fb(p.x, p.y, t_r) - fb(p.x, p.y, b.t)))?;
        residuals.push(check("F mixed partials (B unchanged since t0)".to_string(), mixed, tol)?);
        f
    };
    residuals.push(check("grad F = -c int E dt'".to_string(), res_f(&big_f)?, tol)?);
    Ok(FixingFunctions {
        big_g: Some(big_g),
        big_g_hat: Some(big_g_hat),
        big_f: Some(big_f),
        residuals,
        ..Default::default()
    })
}

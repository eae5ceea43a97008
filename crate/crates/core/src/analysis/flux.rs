use std::cell::RefCell;
use std::f64::consts::PI;

use super::{AnalysisError, PhaseReport, Result};
use crate::fields::{circulation, enclosed_b_flux, Constants, FaradayOptions, Loop, ScalarFn, ScenarioConfig};
use crate::numerics::{integrate_rect, integrate_span, Axis, Kink, KinkSet, QuadratureRule, RectPlane};

/// Region in the plane of a flux integral, in that plane's `(u, v)`
/// coordinates: `(x, y)` for magnetic flux, `(x, t)` for spacetime electric
/// flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxRegion {
    Rectangle { u: (f64, f64), v: (f64, f64) },
    Triangle([(f64, f64); 3]),
    Disc { center: (f64, f64), radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxKind {
    /// `int B dx dy` at time `t`.
    Magnetic { t: f64 },
    /// `c int E dx dt` at height `y`.
    ElectricSpacetime { y: f64 },
}

impl FluxKind {
    fn plane(&self) -> RectPlane {
        match *self {
            FluxKind::Magnetic { t } => RectPlane { outer: Axis::X, inner: Axis::Y, at: [0.0, 0.0, t] },
            FluxKind::ElectricSpacetime { y } => RectPlane { outer: Axis::X, inner: Axis::T, at: [0.0, y, 0.0] },
        }
    }
}

fn degenerate(region: &FluxRegion) -> AnalysisError {
    AnalysisError::DegenerateRegion(format!("{region:?}"))
}

fn triangle_area(v: &[(f64, f64); 3]) -> f64 {
    0.5 * ((v[1].0 - v[0].0) * (v[2].1 - v[0].1) - (v[2].0 - v[0].0) * (v[1].1 - v[0].1))
}

/// Flux of `field` through `region`. Kinks of the field split the quadrature;
/// disc integrals run in polar coordinates with `angular_points` trapezoid
/// nodes and radial breaks at centered circles and cones.
pub fn enclosed_flux(
    field: &ScalarFn,
    region: &FluxRegion,
    kind: FluxKind,
    con: &Constants,
    kinks: &KinkSet,
    rule: &QuadratureRule,
    angular_points: usize,
) -> Result<f64> {
    let plane = kind.plane();
    let eval = |u: f64, v: f64| {
        let mut p = plane.at;
        p[0] = u;
        p[plane.inner as usize] = v;
        field(p[0], p[1], p[2])
    };
    let finite = |a: f64| a.is_finite();
    let raw = match *region {
        FluxRegion::Rectangle { u, v } => {
            if !(finite(u.0) && finite(u.1) && finite(v.0) && finite(v.1)) || u.0 >= u.1 || v.0 >= v.1 {
                return Err(degenerate(region));
            }
            integrate_rect(eval, plane, u, v, kinks, rule)?
        }
        FluxRegion::Triangle(vs) => {
            let area = triangle_area(&vs);
            if !(area.abs() > 0.0 && area.is_finite()) {
                return Err(degenerate(region));
            }
            let orient = area.signum();
            let inside = |u: f64, v: f64| {
                (0..3).all(|i| {
                    let (a, b) = (vs[i], vs[(i + 1) % 3]);
                    orient * ((b.0 - a.0) * (v - a.1) - (u - a.0) * (b.1 - a.1)) >= 0.0
                })
            };
            let mut ks = kinks.clone();
            for i in 0..3 {
                ks = ks
                    .plane(plane.outer, vs[i].0)
                    .plane(plane.inner, vs[i].1)
                    .with(Kink::Segment {
                        plane: (plane.outer, plane.inner),
                        p: vs[i],
                        q: vs[(i + 1) % 3],
                    });
            }
            let lo = |k: usize| vs.iter().map(|p| if k == 0 { p.0 } else { p.1 }).fold(f64::INFINITY, f64::min);
            let hi = |k: usize| vs.iter().map(|p| if k == 0 { p.0 } else { p.1 }).fold(f64::NEG_INFINITY, f64::max);
            let f = |u: f64, v: f64| if inside(u, v) { eval(u, v) } else { 0.0 };
            integrate_rect(f, plane, (lo(0), hi(0)), (lo(1), hi(1)), &ks, rule)?
        }
        FluxRegion::Disc { center, radius } => {
            if !(radius > 0.0 && radius.is_finite() && finite(center.0) && finite(center.1)) {
                return Err(degenerate(region));
            }
            let n = angular_points.max(8);
            let breaks = match kind {
                FluxKind::Magnetic { t } => radial_breaks(kinks, center, t),
                FluxKind::ElectricSpacetime { .. } => KinkSet::new(),
            };
            let ring = |r: f64| {
                let mut acc = 0.0;
                for k in 0..n {
                    let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
                    acc += eval(center.0 + r * c, center.1 + r * s);
                }
                acc * 2.0 * PI / n as f64 * r
            };
            integrate_span(ring, Axis::X, [0.0; 3], 0.0, radius, &breaks, rule)?
        }
    };
    Ok(match kind {
        FluxKind::Magnetic { .. } => raw,
        FluxKind::ElectricSpacetime { .. } => con.c * raw,
    })
}

fn radial_breaks(ks: &KinkSet, center: (f64, f64), t: f64) -> KinkSet {
    let mut out = KinkSet::new();
    for k in ks.kinks() {
        let r = match *k {
            Kink::Circle { center: c, radius } if c == center => Some(radius),
            Kink::Cone { center: c, radius0, speed, t_start } if c == center && t >= t_start => {
                Some(radius0 + speed * (t - t_start))
            }
            _ => None,
        };
        if let Some(r) = r {
            out = out.plane(Axis::X, r);
        }
    }
    out
}

/// Difference of the primary and dual 2+1D solutions for a centered circular
/// loop of radius `loop_radius` in the switched-solenoid scenario, observed at
/// `t_obs`. The circuit integral of A is the enclosed B flux at `t_obs`; the
/// nonlocal term is `c int_{t0}^{t_obs} (circulation of E) dt'`. The flux
/// offsets at `t0` and the multiplicities of the two routes cancel, so the
/// multiplicity term is zero.
pub fn van_kampen_delta(cfg: &ScenarioConfig, loop_radius: f64, t_obs: f64, con: &Constants) -> Result<PhaseReport> {
    let model = cfg
        .van_kampen
        .ok_or_else(|| AnalysisError::NotVanKampen(cfg.name.clone()))?;
    if !(loop_radius > model.core_radius) || !loop_radius.is_finite() {
        return Err(AnalysisError::LoopIntersectsCore {
            radius: loop_radius,
            core: model.core_radius,
        });
    }
    let lp = Loop::Circle {
        center: (0.0, 0.0),
        radius: loop_radius,
    };
    let opts = FaradayOptions {
        line_rule: QuadratureRule::new(0.01, 65),
        area_rule: QuadratureRule::new(0.01, 1025),
        circle_points: 720,
        dt: 1e-4,
    };
    let ab_term = enclosed_b_flux(&cfg.fields, &lp, t_obs, &opts)?;

    // times at which the loop meets a kink of the fields
    let mut breaks = KinkSet::new();
    for k in cfg.fields.kinks.kinks() {
        match *k {
            Kink::Plane(Axis::T, t) => breaks = breaks.plane(Axis::T, t),
            Kink::Cone { center, radius0, speed, t_start } if center == (0.0, 0.0) && loop_radius >= radius0 => {
                breaks = breaks.plane(Axis::T, t_start + (loop_radius - radius0) / speed);
            }
            _ => {}
        }
    }
    let failure = RefCell::new(None);
    let circ = |t: f64| match circulation(&cfg.fields, &lp, t, &opts) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let t0 = cfg.base.t;
    let integral = integrate_span(circ, Axis::T, [0.0; 3], t0, t_obs, &breaks, &opts.line_rule)?;
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(PhaseReport::new(ab_term, con.c * integral, 0.0, con))
}

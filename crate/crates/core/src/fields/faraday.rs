use std::f64::consts::PI;

use super::{Constants, FieldSet, FieldsError, Point, Result};
use crate::numerics::{integrate_rect, integrate_span, Axis, Interval, Kink, KinkSet, QuadratureRule, RectPlane};

/// Closed spatial path, traversed counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loop {
    Rectangle { x: (f64, f64), y: (f64, f64) },
    Circle { center: (f64, f64), radius: f64 },
}

impl Loop {
    pub fn area(&self) -> f64 {
        match *self {
            Loop::Rectangle { x, y } => (x.1 - x.0) * (y.1 - y.0),
            Loop::Circle { radius, .. } => PI * radius * radius,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Loop::Rectangle { x, y } => x.0 < x.1 && y.0 < y.1 && self.area().is_finite(),
            Loop::Circle { radius, center } => {
                radius > 0.0 && radius.is_finite() && center.0.is_finite() && center.1.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(FieldsError::DegenerateLoop(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaradayOptions {
    pub line_rule: QuadratureRule,
    pub area_rule: QuadratureRule,
    /// Trapezoid nodes on circular loops.
    pub circle_points: usize,
    /// Step of the central difference for `dPhi/dt`.
    pub dt: f64,
}

impl Default for FaradayOptions {
    fn default() -> Self {
        Self {
            line_rule: QuadratureRule::new(0.01, 9),
            area_rule: QuadratureRule::new(0.02, 9),
            circle_points: 720,
            dt: 1e-4,
        }
    }
}

fn nonfinite(p: Point) -> FieldsError {
    FieldsError::NonFinite { what: "field", at: p }
}

/// Counter-clockwise circulation of E around `lp` at time `t`.
pub fn circulation(f: &FieldSet, lp: &Loop, t: f64, opts: &FaradayOptions) -> Result<f64> {
    lp.validate()?;
    match *lp {
        Loop::Rectangle { x, y } => {
            let ex = |yy: f64| move |xx: f64| (f.e_x)(xx, yy, t);
            let ey = |xx: f64| move |yy: f64| (f.e_y)(xx, yy, t);
            let rule = &opts.line_rule;
            let ks = &f.kinks;
            let bottom = integrate_span(ex(y.0), Axis::X, [0.0, y.0, t], x.0, x.1, ks, rule)?;
            let right = integrate_span(ey(x.1), Axis::Y, [x.1, 0.0, t], y.0, y.1, ks, rule)?;
            let top = integrate_span(ex(y.1), Axis::X, [0.0, y.1, t], x.1, x.0, ks, rule)?;
            let left = integrate_span(ey(x.0), Axis::Y, [x.0, 0.0, t], y.1, y.0, ks, rule)?;
            Ok(bottom + right + top + left)
        }
        Loop::Circle { center, radius } => {
            let n = opts.circle_points.max(8);
            let mut acc = 0.0;
            for k in 0..n {
                let th = 2.0 * PI * k as f64 / n as f64;
                let (s, c) = th.sin_cos();
                let p = Point::new(center.0 + radius * c, center.1 + radius * s, t);
                let v = -(f.e_x)(p.x, p.y, t) * s + (f.e_y)(p.x, p.y, t) * c;
                if !v.is_finite() {
                    return Err(nonfinite(p));
                }
                acc += v;
            }
            Ok(acc * radius * 2.0 * PI / n as f64)
        }
    }
}

/// Radii at which kinks centered on `center` cross circles at time `t`.
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

/// Flux of B through the loop at time `t`.
pub fn enclosed_b_flux(f: &FieldSet, lp: &Loop, t: f64, opts: &FaradayOptions) -> Result<f64> {
    lp.validate()?;
    match *lp {
        Loop::Rectangle { x, y } => {
            let plane = RectPlane { outer: Axis::X, inner: Axis::Y, at: [0.0, 0.0, t] };
            Ok(integrate_rect(|xx, yy| (f.b)(xx, yy, t), plane, x, y, &f.kinks, &opts.area_rule)?)
        }
        Loop::Circle { center, radius } => {
            let n = opts.circle_points.max(8);
            let breaks = radial_breaks(&f.kinks, center, t);
            let ring = |r: f64| {
                let mut acc = 0.0;
                for k in 0..n {
                    let th = 2.0 * PI * k as f64 / n as f64;
                    let (s, c) = th.sin_cos();
                    acc += (f.b)(center.0 + r * c, center.1 + r * s, t);
                }
                acc * 2.0 * PI / n as f64 * r
            };
            Ok(integrate_span(ring, Axis::X, [0.0, 0.0, t], 0.0, radius, &breaks, &opts.area_rule)?)
        }
    }
}

/// Largest violation of `circulation(E) = -(1/c) dPhi/dt` over the sampled
/// times, with `Phi` the area quadrature of B over the loop.
pub fn faraday_residual(
    f: &FieldSet,
    lp: &Loop,
    times: &Interval,
    con: &Constants,
    opts: &FaradayOptions,
) -> Result<f64> {
    lp.validate()?;
    if lp.area() <= 0.0 {
        return Err(FieldsError::DegenerateLoop(format!("{lp:?}")));
    }
    let mut worst: f64 = 0.0;
    for t in times.points() {
        let circ = circulation(f, lp, t, opts)?;
        let up = enclosed_b_flux(f, lp, t + opts.dt, opts)?;
        let down = enclosed_b_flux(f, lp, t - opts.dt, opts)?;
        let dphi = (up - down) / (2.0 * opts.dt);
        worst = worst.max((circ + dphi / con.c).abs());
    }
    Ok(worst)
}

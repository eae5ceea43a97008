use super::kinks::Breaks;
use super::{Axis, Coord, KinkSet, NumericsError, Result};

/// Resolution of the piecewise composite Simpson rule: every piece between
/// consecutive breakpoints gets at least `min_points` samples and a spacing
/// no larger than `max_step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    pub max_step: f64,
    pub min_points: usize,
}

impl QuadratureRule {
    pub const fn new(max_step: f64, min_points: usize) -> Self {
        Self {
            max_step,
            min_points,
        }
    }

    fn points_for(&self, len: f64) -> usize {
        let by_step = (len / self.max_step).ceil() as usize + 1;
        let n = by_step.max(self.min_points).max(3);
        if n % 2 == 0 {
            n + 1
        } else {
            n
        }
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(0.01, 9)
    }
}

/// Which two coordinates a rectangle spans, and where it sits along the third.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPlane {
    pub outer: Axis,
    pub inner: Axis,
    /// Full (x, y, t) point; only the coordinate of the third axis matters.
    pub at: [f64; 3],
}

fn set(at: &mut [f64; 3], axis: Axis, v: f64) {
    match axis {
        Axis::X => at[0] = v,
        Axis::Y => at[1] = v,
        Axis::T => at[2] = v,
    }
}

fn widened(lo: f64, hi: f64) -> (f64, f64) {
    (lo - 1e-9 * (1.0 + lo.abs()), hi + 1e-9 * (1.0 + hi.abs()))
}

fn nudge(at: f64, len: f64) -> f64 {
    (1e-12 * (1.0 + at.abs())).min(0.25 * len)
}

/// Visit Simpson nodes and signed weights of the oriented span `a -> b`,
/// split at `breaks`.
fn for_each_node<V>(a: f64, b: f64, breaks: &mut Breaks, rule: &QuadratureRule, mut visit: V) -> Result<()>
where
    V: FnMut(f64, f64) -> Result<()>,
{
    if a == b {
        return Ok(());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // endpoints lying on a kink are sampled one-sidedly as well
    let on = |end: f64| breaks.iter().any(|v| (v - end).abs() <= 1e-12 * (1.0 + end.abs()));
    let (lo_is_break, hi_is_break) = (on(lo), on(hi));
    breaks.retain(|v| *v > lo && *v < hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let mut start = lo;
    let mut start_is_break = lo_is_break;
    let ends = breaks.iter().map(|b| (*b, true)).chain(std::iter::once((hi, hi_is_break)));
    for (end, end_is_break) in ends {
        let len = end - start;
        if len <= 0.0 {
            continue;
        }
        let n = rule.points_for(len);
        let h = len / (n - 1) as f64;
        let w0 = sign * h / 3.0;
        for i in 0..n {
            // samples on a break are taken one-sidedly so jumps land in the
            // right piece
            let u = if i == 0 {
                if start_is_break { start + nudge(start, len) } else { start }
            } else if i + 1 == n {
                if end_is_break { end - nudge(end, len) } else { end }
            } else {
                start + i as f64 * h
            };
            let w = if i == 0 || i + 1 == n {
                w0
            } else if i % 2 == 1 {
                4.0 * w0
            } else {
                2.0 * w0
            };
            visit(u, w)?;
        }
        start = end;
        start_is_break = end_is_break;
    }
    Ok(())
}

/// Oriented line integral of `f` from `a` to `b` along `axis`, through the
/// point `at`, split at the crossings of `kinks`.
pub fn integrate_span<F>(
    f: F,
    axis: Axis,
    at: [f64; 3],
    a: f64,
    b: f64,
    kinks: &KinkSet,
    rule: &QuadratureRule,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut breaks = Breaks::new();
    let (lo, hi) = widened(a.min(b), a.max(b));
    kinks.crossings(axis, at, lo, hi, &mut breaks);
    let mut acc = 0.0;
    for_each_node(a, b, &mut breaks, rule, |u, w| {
        let v = f(u);
        if !v.is_finite() {
            return Err(NumericsError::NonFinite { at: Coord::Line(u) });
        }
        acc += w * v;
        Ok(())
    })?;
    Ok(acc)
}

/// Oriented iterated integral `∫_{u0}^{u1} du ∫_{v0}^{v1} dv f(u, v)` over a
/// rectangle in `plane`; the inner breakpoints are recomputed for every outer
/// node, so slanted and curved kinks stay resolved.
pub fn integrate_rect<F>(
    f: F,
    plane: RectPlane,
    outer: (f64, f64),
    inner: (f64, f64),
    kinks: &KinkSet,
    rule: &QuadratureRule,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if outer.0 == outer.1 || inner.0 == inner.1 {
        return Ok(0.0);
    }
    let (olo, ohi) = widened(outer.0.min(outer.1), outer.0.max(outer.1));
    let (ilo, ihi) = widened(inner.0.min(inner.1), inner.0.max(inner.1));
    let mut obreaks = Breaks::new();
    for v in [inner.0, inner.1] {
        let mut at = plane.at;
        set(&mut at, plane.inner, v);
        kinks.crossings(plane.outer, at, olo, ohi, &mut obreaks);
    }
    kinks.vertices(plane.outer, plane.inner, plane.at, olo, ohi, &mut obreaks);

    let mut acc = 0.0;
    let mut ibreaks = Breaks::new();
    for_each_node(outer.0, outer.1, &mut obreaks, rule, |u, wu| {
        let mut at = plane.at;
        set(&mut at, plane.outer, u);
        ibreaks.clear();
        kinks.crossings(plane.inner, at, ilo, ihi, &mut ibreaks);
        let mut row = 0.0;
        for_each_node(inner.0, inner.1, &mut ibreaks, rule, |v, wv| {
            let val = f(u, v);
            if !val.is_finite() {
                return Err(NumericsError::NonFinite {
                    at: Coord::Plane(u, v),
                });
            }
            row += wv * val;
            Ok(())
        })?;
        acc += wu * row;
        Ok(())
    })?;
    Ok(acc)
}

use smallvec::SmallVec;

use super::Axis;

pub(crate) type Breaks = SmallVec<[f64; 12]>;

/// A surface in (x, y, t) across which an integrand may jump or kink.
#[derive(Debug, Clone, PartialEq)]
pub enum Kink {
    /// The plane `axis = value`.
    Plane(Axis, f64),
    /// Segment `p -> q` drawn in the `(plane.0, plane.1)` coordinates and
    /// extruded along the remaining axis.
    Segment {
        plane: (Axis, Axis),
        p: (f64, f64),
        q: (f64, f64),
    },
    /// Circle in the x-y plane, extruded along t.
    Circle { center: (f64, f64), radius: f64 },
    /// Expanding circle `radius0 + speed (t - t_start)` for `t >= t_start`.
    Cone {
        center: (f64, f64),
        radius0: f64,
        speed: f64,
        t_start: f64,
    },
}

/// Declared discontinuity geometry of a field or potential. Quadrature splits
/// every integration segment at the crossings, so piecewise-polynomial
/// integrands are integrated exactly by Simpson.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KinkSet {
    kinks: Vec<Kink>,
}

fn coord(at: [f64; 3], axis: Axis) -> f64 {
    match axis {
        Axis::X => at[0],
        Axis::Y => at[1],
        Axis::T => at[2],
    }
}

fn push_inside(out: &mut Breaks, v: f64, lo: f64, hi: f64) {
    if v.is_finite() && v > lo && v < hi {
        out.push(v);
    }
}

fn circle_hits(out: &mut Breaks, c_along: f64, offset: f64, r: f64, lo: f64, hi: f64) {
    if r > 0.0 && offset.abs() < r {
        let half = (r * r - offset * offset).sqrt();
        push_inside(out, c_along - half, lo, hi);
        push_inside(out, c_along + half, lo, hi);
    }
}

impl KinkSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, kink: Kink) -> Self {
        self.kinks.push(kink);
        self
    }

    pub fn plane(self, axis: Axis, value: f64) -> Self {
        self.with(Kink::Plane(axis, value))
    }

    pub fn extend(&mut self, other: &KinkSet) {
        self.kinks.extend(other.kinks.iter().cloned());
    }

    pub fn kinks(&self) -> &[Kink] {
        &self.kinks
    }

    pub fn is_empty(&self) -> bool {
        self.kinks.is_empty()
    }

    /// Crossings, strictly inside `(lo, hi)`, of the line through `at` that
    /// runs parallel to `axis`. The `axis` component of `at` is ignored.
    pub(crate) fn crossings(&self, axis: Axis, at: [f64; 3], lo: f64, hi: f64, out: &mut Breaks) {
        for k in &self.kinks {
            match *k {
                Kink::Plane(a, v) => {
                    if a == axis {
                        push_inside(out, v, lo, hi);
                    }
                }
                Kink::Segment { plane, p, q } => {
                    let (along, other, pa, po, qa, qo) = if plane.0 == axis {
                        (plane.0, plane.1, p.0, p.1, q.0, q.1)
                    } else if plane.1 == axis {
                        (plane.1, plane.0, p.1, p.0, q.1, q.0)
                    } else {
                        continue;
                    };
                    debug_assert_eq!(along, axis);
                    let c = coord(at, other);
                    let span = qo - po;
                    if span == 0.0 {
                        continue;
                    }
                    let s = (c - po) / span;
                    if (0.0..=1.0).contains(&s) {
                        push_inside(out, pa + s * (qa - pa), lo, hi);
                    }
                }
                Kink::Circle { center, radius } => match axis {
                    Axis::X => circle_hits(out, center.0, at[1] - center.1, radius, lo, hi),
                    Axis::Y => circle_hits(out, center.1, at[0] - center.0, radius, lo, hi),
                    Axis::T => {}
                },
                Kink::Cone {
                    center,
                    radius0,
                    speed,
                    t_start,
                } => match axis {
                    Axis::X | Axis::Y => {
                        if at[2] < t_start {
                            continue;
                        }
                        let r = radius0 + speed * (at[2] - t_start);
                        if axis == Axis::X {
                            circle_hits(out, center.0, at[1] - center.1, r, lo, hi);
                        } else {
                            circle_hits(out, center.1, at[0] - center.0, r, lo, hi);
                        }
                    }
                    Axis::T => {
                        let d = (at[0] - center.0).hypot(at[1] - center.1);
                        if d >= radius0 && speed > 0.0 {
                            push_inside(out, t_start + (d - radius0) / speed, lo, hi);
                        }
                    }
                },
            }
        }
    }

    /// Special coordinates along `outer` of the kink traces inside the plane
    /// spanned by `outer` and `inner` (segment end points, extremes of curves).
    pub(crate) fn vertices(
        &self,
        outer: Axis,
        inner: Axis,
        at: [f64; 3],
        lo: f64,
        hi: f64,
        out: &mut Breaks,
    ) {
        let in_plane = |a: Axis, b: Axis| (a == outer && b == inner) || (a == inner && b == outer);
        for k in &self.kinks {
            match *k {
                Kink::Plane(..) => {}
                Kink::Segment { plane, p, q } => {
                    if in_plane(plane.0, plane.1) {
                        let (pv, qv) = if plane.0 == outer { (p.0, q.0) } else { (p.1, q.1) };
                        push_inside(out, pv, lo, hi);
                        push_inside(out, qv, lo, hi);
                    }
                }
                Kink::Circle { center, radius } => {
                    if in_plane(Axis::X, Axis::Y) {
                        let c = if outer == Axis::X { center.0 } else { center.1 };
                        push_inside(out, c - radius, lo, hi);
                        push_inside(out, c, lo, hi);
                        push_inside(out, c + radius, lo, hi);
                    }
                }
                Kink::Cone {
                    center,
                    radius0,
                    speed,
                    t_start,
                } => {
                    if in_plane(Axis::X, Axis::Y) {
                        if at[2] >= t_start {
                            let r = radius0 + speed * (at[2] - t_start);
                            let c = if outer == Axis::X { center.0 } else { center.1 };
                            push_inside(out, c - r, lo, hi);
                            push_inside(out, c, lo, hi);
                            push_inside(out, c + r, lo, hi);
                        }
                    } else if inner == Axis::T || outer == Axis::T {
                        // slice at fixed x or y: the trace is a hyperbola whose
                        // apex touches the slice line first
                        let spatial = if outer == Axis::T { inner } else { outer };
                        let (c_along, offset) = if spatial == Axis::X {
                            (center.0, at[1] - center.1)
                        } else {
                            (center.1, at[0] - center.0)
                        };
                        if outer == Axis::T {
                            if offset.abs() >= radius0 && speed > 0.0 {
                                push_inside(out, t_start + (offset.abs() - radius0) / speed, lo, hi);
                            }
                            push_inside(out, t_start, lo, hi);
                        } else {
                            push_inside(out, c_along, lo, hi);
                        }
                    }
                }
            }
        }
    }
}

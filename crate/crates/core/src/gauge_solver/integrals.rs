use crate::fields::{Constants, FieldSet, Point, PotentialSet, ScalarFn};
use crate::numerics::{integrate_rect, integrate_span, Axis, KinkSet, QuadratureRule, RectPlane};

use super::Result;

/// Potentials, fields and quadrature settings shared by every integral a
/// solution needs.
pub struct Integrals {
    pub potentials: PotentialSet,
    pub fields: FieldSet,
    pub constants: Constants,
    pub line_rule: QuadratureRule,
    pub area_rule: QuadratureRule,
    kinks: KinkSet,
}

impl Integrals {
    pub fn new(
        potentials: PotentialSet,
        fields: FieldSet,
        constants: Constants,
        line_rule: QuadratureRule,
        area_rule: QuadratureRule,
    ) -> Self {
        let mut kinks = potentials.kinks.clone();
        kinks.extend(&fields.kinks);
        Self {
            potentials,
            fields,
            constants,
            line_rule,
            area_rule,
            kinks,
        }
    }

    pub fn c(&self) -> f64 {
        self.constants.c
    }

    /// Oriented integral of `f` along `axis` through `at`, from `from` to `to`.
    pub fn line(&self, f: &ScalarFn, axis: Axis, at: Point, from: f64, to: f64) -> Result<f64> {
        let g = |u: f64| {
            let q = at.with(axis, u);
            f(q.x, q.y, q.t)
        };
        Ok(integrate_span(g, axis, at.as_array(), from, to, &self.kinks, &self.line_rule)?)
    }

    /// Oriented iterated integral over `outer` (outside) and `inner` (inside)
    /// in the plane through `at`.
    pub fn rect(
        &self,
        f: &ScalarFn,
        outer: Axis,
        inner: Axis,
        at: Point,
        outer_range: (f64, f64),
        inner_range: (f64, f64),
    ) -> Result<f64> {
        let g = |u: f64, v: f64| {
            let q = at.with(outer, u).with(inner, v);
            f(q.x, q.y, q.t)
        };
        let plane = RectPlane {
            outer,
            inner,
            at: at.as_array(),
        };
        Ok(integrate_rect(g, plane, outer_range, inner_range, &self.kinks, &self.area_rule)?)
    }
}

//! Potential and field configurations, field derivation and the builtin
//! scenario library.
//!
//! Every potential and field is a scalar function of `(x, y, t)`. Potentials
//! are differences between two systems: `A = A2 - A1`, `phi = phi2 - phi1`.
//! Fields follow `E = -grad phi - (1/c) dA/dt` and `B = dAy/dx - dAx/dy`.

mod faraday;
mod scenarios;
mod van_kampen;

pub use faraday::{circulation, enclosed_b_flux, faraday_residual, FaradayOptions, Loop};
pub use scenarios::{builtin_config, scenario_catalog, ParamSpec, ScenarioInfo};
pub use van_kampen::VanKampenModel;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{self, Axis, BoxDomain, Interval, KinkSet, NumericsError, QuadratureRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldsError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` has no parameter `{name}`")]
    UnknownParam { scenario: String, name: String },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("point {0} lies outside the declared domain")]
    OutsideDomain(Point),
    #[error("non-finite {what} at {at}")]
    NonFinite { what: &'static str, at: Point },
    #[error("degenerate loop: {0}")]
    DegenerateLoop(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, FieldsError>;

/// Physical constants in whatever unit system the scenario uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub hbar: f64,
    pub h: f64,
    pub q: f64,
    pub e: f64,
    pub m: f64,
}

impl Constants {
    /// Builds constants with `h = 2 pi hbar`.
    pub fn new(c: f64, hbar: f64, q: f64, e: f64, m: f64) -> Result<Self> {
        let con = Self {
            c,
            hbar,
            h: 2.0 * PI * hbar,
            q,
            e,
            m,
        };
        con.validate()?;
        Ok(con)
    }

    /// Same constants with Planck's constant `h` (and `hbar = h / 2 pi`).
    pub fn with_h(mut self, h: f64) -> Result<Self> {
        self.h = h;
        self.hbar = h / (2.0 * PI);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FieldsError::InvalidConstants(m.to_string()));
        let all = [self.c, self.hbar, self.h, self.q, self.e, self.m];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all constants must be finite");
        }
        if self.c <= 0.0 {
            return bad("c must be positive");
        }
        if self.hbar <= 0.0 {
            return bad("hbar must be positive");
        }
        if ((self.h - 2.0 * PI * self.hbar) / self.h).abs() > 1e-12 {
            return bad("h must equal 2 pi hbar");
        }
        if self.e == 0.0 || self.m <= 0.0 {
            return bad("e must be nonzero and m positive");
        }
        Ok(())
    }

    /// Magnetic flux quantum `h c / e`.
    pub fn flux_quantum(&self) -> f64 {
        self.h * self.c / self.e
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c: 1.0,
            hbar: 1.0,
            h: 2.0 * PI,
            q: 1.0,
            e: 1.0,
            m: 1.0,
        }
    }
}

/// A spacetime point; unused coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn coord(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::T => self.t,
        }
    }

    pub fn with(mut self, axis: Axis, v: f64) -> Self {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
            Axis::T => self.t = v,
        }
        self
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={}, y={}, t={})", self.x, self.y, self.t)
    }
}

/// Which coordinates a configuration depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// (x, t); `A_y` vanishes.
    OneD,
    /// (x, y); nothing depends on t.
    TwoDStatic,
    /// (x, y, t).
    TwoPlusOne,
}

impl Dimension {
    pub fn axes(&self) -> &'static [Axis] {
        match self {
            Dimension::OneD => &[Axis::X, Axis::T],
            Dimension::TwoDStatic => &[Axis::X, Axis::Y],
            Dimension::TwoPlusOne => &[Axis::X, Axis::Y, Axis::T],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::OneD => "1+1D",
            Dimension::TwoDStatic => "2D static",
            Dimension::TwoPlusOne => "2+1D",
        })
    }
}

pub type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

pub fn scalar<F>(f: F) -> ScalarFn
where
    F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn zero() -> ScalarFn {
    scalar(|_, _, _| 0.0)
}

/// Closed-form partial derivatives needed to form E and B.
#[derive(Clone)]
pub struct PotentialDerivatives {
    pub dax_dy: ScalarFn,
    pub dax_dt: ScalarFn,
    pub day_dx: ScalarFn,
    pub day_dt: ScalarFn,
    pub dphi_dx: ScalarFn,
    pub dphi_dy: ScalarFn,
}

impl Default for PotentialDerivatives {
    fn default() -> Self {
        Self {
            dax_dy: zero(),
            dax_dt: zero(),
            day_dx: zero(),
            day_dt: zero(),
            dphi_dx: zero(),
            dphi_dy: zero(),
        }
    }
}

/// Axis-aligned spacetime region on which functions may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub t: (f64, f64),
}

impl SpacetimeBox {
    pub fn contains(&self, p: Point) -> bool {
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        inside(p.x, self.x) && inside(p.y, self.y) && inside(p.t, self.t)
    }
}

/// Potential differences `(A_x, A_y, phi)`.
#[derive(Clone)]
pub struct PotentialSet {
    pub dim: Dimension,
    pub a_x: ScalarFn,
    pub a_y: ScalarFn,
    pub phi: ScalarFn,
    pub derivatives: Option<PotentialDerivatives>,
    /// Surfaces where the potentials or their derivatives are not smooth.
    pub kinks: KinkSet,
    pub domain: Option<SpacetimeBox>,
    /// Central-difference step used when no closed-form derivatives exist.
    pub fd_step: f64,
}

impl PotentialSet {
    pub fn new(dim: Dimension, a_x: ScalarFn, a_y: ScalarFn, phi: ScalarFn) -> Self {
        Self {
            dim,
            a_x,
            a_y,
            phi,
            derivatives: None,
            kinks: KinkSet::new(),
            domain: None,
            fd_step: 1e-5,
        }
    }

    pub fn with_derivatives(mut self, d: PotentialDerivatives) -> Self {
        self.derivatives = Some(d);
        self
    }

    pub fn with_kinks(mut self, kinks: KinkSet) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn with_domain(mut self, domain: SpacetimeBox) -> Self {
        self.domain = Some(domain);
        self
    }

    /// `[A_x, A_y, phi]` at `p`, checked against the domain and for finiteness.
    pub fn eval(&self, p: Point) -> Result<[f64; 3]> {
        if let Some(d) = &self.domain {
            if !d.contains(p) {
                return Err(FieldsError::OutsideDomain(p));
            }
        }
        let v = [(self.a_x)(p.x, p.y, p.t), (self.a_y)(p.x, p.y, p.t), (self.phi)(p.x, p.y, p.t)];
        if v.iter().any(|u| !u.is_finite()) {
            return Err(FieldsError::NonFinite { what: "potential", at: p });
        }
        Ok(v)
    }
}

/// How a [`FieldSet`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSource {
    Analytic,
    FiniteDifference { step: f64 },
    /// Supplied directly by a field model.
    Model,
}

/// Fields `(E_x, E_y, B)`.
#[derive(Clone)]
pub struct FieldSet {
    pub e_x: ScalarFn,
    pub e_y: ScalarFn,
    pub b: ScalarFn,
    pub kinks: KinkSet,
    pub domain: Option<SpacetimeBox>,
    pub source: FieldSource,
}

impl FieldSet {
    /// `[E_x, E_y, B]` at `p`, checked against the domain and for finiteness.
    pub fn eval(&self, p: Point) -> Result<[f64; 3]> {
        if let Some(d) = &self.domain {
            if !d.contains(p) {
                return Err(FieldsError::OutsideDomain(p));
            }
        }
        let v = [(self.e_x)(p.x, p.y, p.t), (self.e_y)(p.x, p.y, p.t), (self.b)(p.x, p.y, p.t)];
        if v.iter().any(|u| !u.is_finite()) {
            return Err(FieldsError::NonFinite { what: "field", at: p });
        }
        Ok(v)
    }
}

/// Forms E and B from the potentials, from closed-form derivatives when the
/// set carries them and by central differences otherwise.
pub fn derive_fields(p: &PotentialSet, con: &Constants) -> Result<FieldSet> {
    con.validate()?;
    let c = con.c;
    let (e_x, e_y, b, source) = match &p.derivatives {
        Some(d) => {
            let (dphi_dx, dax_dt) = (d.dphi_dx.clone(), d.dax_dt.clone());
            let (dphi_dy, day_dt) = (d.dphi_dy.clone(), d.day_dt.clone());
            let (day_dx, dax_dy) = (d.day_dx.clone(), d.dax_dy.clone());
            (
                scalar(move |x, y, t| -dphi_dx(x, y, t) - dax_dt(x, y, t) / c),
                scalar(move |x, y, t| -dphi_dy(x, y, t) - day_dt(x, y, t) / c),
                scalar(move |x, y, t| day_dx(x, y, t) - dax_dy(x, y, t)),
                FieldSource::Analytic,
            )
        }
        None => {
            let h = p.fd_step;
            if !(h > 0.0 && h.is_finite()) {
                return Err(NumericsError::BadStep(h).into());
            }
            let d = |f: &ScalarFn, axis: Axis| -> ScalarFn {
                let f = f.clone();
                scalar(move |x, y, t| {
                    let at = Point::new(x, y, t);
                    let g = |u: f64| {
                        let q = at.with(axis, u);
                        f(q.x, q.y, q.t)
                    };
                    numerics::central_diff(g, at.coord(axis), h).unwrap_or(f64::NAN)
                })
            };
            let (dphi_dx, dax_dt) = (d(&p.phi, Axis::X), d(&p.a_x, Axis::T));
            let (dphi_dy, day_dt) = (d(&p.phi, Axis::Y), d(&p.a_y, Axis::T));
            let (day_dx, dax_dy) = (d(&p.a_y, Axis::X), d(&p.a_x, Axis::Y));
            (
                scalar(move |x, y, t| -dphi_dx(x, y, t) - dax_dt(x, y, t) / c),
                scalar(move |x, y, t| -dphi_dy(x, y, t) - day_dt(x, y, t) / c),
                scalar(move |x, y, t| day_dx(x, y, t) - dax_dy(x, y, t)),
                FieldSource::FiniteDifference { step: h },
            )
        }
    };
    Ok(FieldSet {
        e_x,
        e_y,
        b,
        kinks: p.kinks.clone(),
        domain: p.domain,
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Simple,
    Multiple,
}

/// Additive constants of multiply-connected configurations: `tau` joins the
/// t-then-x (1D) and first (2D) routes, `chi` the x-then-t and second routes,
/// `f` the 2+1D primary route (the dual route takes `-f`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Multiplicities {
    pub tau: f64,
    pub chi: f64,
    pub f: f64,
}

pub type Mask = Arc<dyn Fn(f64, f64, f64) -> bool + Send + Sync>;

/// Where observation points may lie: a sampled box, optionally restricted by a
/// mask.
#[derive(Clone)]
pub struct ObservationRegion {
    pub domain: BoxDomain,
    pub mask: Option<Mask>,
    pub description: String,
}

impl ObservationRegion {
    pub fn contains(&self, p: Point) -> bool {
        let in_box = self
            .domain
            .axes()
            .iter()
            .all(|(a, iv)| iv.contains(p.coord(*a)));
        in_box && self.mask.as_ref().map_or(true, |m| m(p.x, p.y, p.t))
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Ok(Self {
            domain: self.domain.with_n(n)?,
            mask: self.mask.clone(),
            description: self.description.clone(),
        })
    }

    /// Point of the box sample with multi-index `idx`.
    pub fn point(&self, idx: &[usize]) -> Point {
        self.domain
            .axes()
            .iter()
            .zip(idx)
            .fold(Point::default(), |p, ((a, iv), &i)| p.with(*a, iv.point(i)))
    }

    /// Corner of the box with the largest coordinates.
    pub fn upper(&self) -> Point {
        self.domain
            .axes()
            .iter()
            .fold(Point::default(), |p, (a, iv)| p.with(*a, iv.hi()))
    }
}

/// Builds a box domain from `(axis, lo, hi)` triples sampled with `n` points.
pub fn box_domain(axes: &[(Axis, f64, f64)], n: usize) -> Result<BoxDomain> {
    let axes = axes
        .iter()
        .map(|&(a, lo, hi)| Interval::new(lo, hi, n).map(|iv| (a, iv)))
        .collect::<numerics::Result<Vec<_>>>()?;
    Ok(BoxDomain::new(axes)?)
}

/// A fully assembled configuration.
#[derive(Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub constants: Constants,
    pub potentials: PotentialSet,
    pub fields: FieldSet,
    pub connectivity: Connectivity,
    pub multiplicities: Option<Multiplicities>,
    pub base: Point,
    pub lambda0: f64,
    pub observation: ObservationRegion,
    /// Quadrature for line integrals and for the inner/outer area integrals.
    pub line_rule: QuadratureRule,
    pub area_rule: QuadratureRule,
    /// Present for the switched-solenoid scenario.
    pub van_kampen: Option<VanKampenModel>,
}

impl ScenarioConfig {
    pub fn dim(&self) -> Dimension {
        self.potentials.dim
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

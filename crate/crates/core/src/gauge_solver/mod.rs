//! Construction of gauge functions `Lambda` with
//! `grad Lambda = A` and `-(1/c) dLambda/dt = phi`.
//!
//! Besides the naive combined line-integral phase, every generalized route
//! adds the nonlocal flux integral over the rectangle spanned by the base and
//! the observation point, a fixing function that makes the route satisfy the
//! equations, and for multiply-connected configurations a multiplicity
//! constant.

mod fixing;
mod integrals;
mod routes;

pub use fixing::{solve_fixing_1d, solve_fixing_2d, solve_fixing_full, FixingOptions};
pub use integrals::Integrals;
pub use routes::{lambda_1d, lambda_2d_static, lambda_full, naive_dirac_lambda};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::fields::{Connectivity, Dimension, FieldsError, Multiplicities, ObservationRegion, Point, ScenarioConfig};
use crate::numerics::NumericsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("route {route} needs a {expected} configuration, got {got}")]
    WrongDimension {
        route: Route,
        expected: Dimension,
        got: Dimension,
    },
    #[error("no admissible fixing function: condition `{condition}` residual {residual:.3e} exceeds {tolerance:.1e}")]
    NoAdmissibleFixing {
        condition: String,
        residual: f64,
        tolerance: f64,
    },
    #[error("route {route} needs fixing function `{name}`")]
    MissingFixing { route: Route, name: &'static str },
    #[error("multiplicities apply only to multiply-connected configurations")]
    NotMultiplyConnected,
    #[error("route {0} carries no multiplicity")]
    NoMultiplicity(Route),
    #[error("fixing functions need an observation region")]
    NoObservationRegion,
    #[error("unknown route `{0}`")]
    UnknownRoute(String),
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    NaiveV1,
    NaiveV2,
    /// Time leg at the base x, then the space leg at the final t.
    OneDTThenX,
    /// Space leg at the base t, then the time leg at the final x.
    OneDXThenT,
    /// y leg at the base x, then x leg at the final y.
    TwoDRoute1,
    /// x leg at the base y, then y leg at the final x.
    TwoDRoute2,
    FullPrimary,
    FullDual,
}

impl Route {
    pub const ALL: [Route; 8] = [
        Route::NaiveV1,
        Route::NaiveV2,
        Route::OneDTThenX,
        Route::OneDXThenT,
        Route::TwoDRoute1,
        Route::TwoDRoute2,
        Route::FullPrimary,
        Route::FullDual,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Route::NaiveV1 => "naive_v1",
            Route::NaiveV2 => "naive_v2",
            Route::OneDTThenX => "oneD_t_then_x",
            Route::OneDXThenT => "oneD_x_then_t",
            Route::TwoDRoute1 => "twoD_route1",
            Route::TwoDRoute2 => "twoD_route2",
            Route::FullPrimary => "full_primary",
            Route::FullDual => "full_dual",
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            Route::NaiveV1 | Route::NaiveV2 | Route::OneDTThenX | Route::OneDXThenT => Dimension::OneD,
            Route::TwoDRoute1 | Route::TwoDRoute2 => Dimension::TwoDStatic,
            Route::FullPrimary | Route::FullDual => Dimension::TwoPlusOne,
        }
    }

    pub fn is_naive(&self) -> bool {
        matches!(self, Route::NaiveV1 | Route::NaiveV2)
    }

    /// The two generalized routes for a dimension.
    pub fn generalized(dim: Dimension) -> [Route; 2] {
        match dim {
            Dimension::OneD => [Route::OneDTThenX, Route::OneDXThenT],
            Dimension::TwoDStatic => [Route::TwoDRoute1, Route::TwoDRoute2],
            Dimension::TwoPlusOne => [Route::FullPrimary, Route::FullDual],
        }
    }

    /// Multiplicity constant this route carries.
    pub fn multiplicity(&self, m: &Multiplicities) -> Option<f64> {
        match self {
            Route::OneDTThenX | Route::TwoDRoute1 => Some(m.tau),
            Route::OneDXThenT | Route::TwoDRoute2 => Some(m.chi),
            Route::FullPrimary => Some(m.f),
            Route::FullDual => Some(-m.f),
            Route::NaiveV1 | Route::NaiveV2 => None,
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Route {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.tag() == s)
            .ok_or_else(|| SolverError::UnknownRoute(s.to_string()))
    }
}

pub type Fn1 = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;
pub type Grad2 = Arc<dyn Fn(f64, f64) -> Result<(f64, f64)> + Send + Sync>;

/// Linear bridge from zero at the base coordinate to the constructed function
/// at the near edge of the observation range, so the fixing function vanishes
/// at the base without touching its values where the conditions apply.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Bridge {
    from: f64,
    to: f64,
    value_at_to: f64,
}

impl Bridge {
    fn covers(&self, s: f64) -> bool {
        if self.from < self.to {
            s < self.to
        } else {
            s > self.to
        }
    }

    fn slope(&self) -> f64 {
        self.value_at_to / (self.to - self.from)
    }
}

/// Fixing function of one variable with its derivative.
#[derive(Clone)]
pub struct Fixing1 {
    value: Fn1,
    deriv: Fn1,
    zero: bool,
    bridge: Option<Bridge>,
}

impl Fixing1 {
    pub fn zero() -> Self {
        Self {
            value: Arc::new(|_| Ok(0.0)),
            deriv: Arc::new(|_| Ok(0.0)),
            zero: true,
            bridge: None,
        }
    }

    pub fn new(value: Fn1, deriv: Fn1) -> Self {
        Self {
            value,
            deriv,
            zero: false,
            bridge: None,
        }
    }

    /// Wraps infallible closures.
    pub fn from_fns<F, D>(value: F, deriv: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(move |s| Ok(value(s))), Arc::new(move |s| Ok(deriv(s))))
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Replaces the function between `base` and the observation range
    /// `[lo, hi]` by a linear bridge from zero, when `base` lies outside the
    /// range and the function does not already vanish there.
    fn bridged(mut self, base: f64, lo: f64, hi: f64) -> Result<Self> {
        if self.zero || (lo..=hi).contains(&base) {
            return Ok(self);
        }
        if (self.value)(base)?.abs() <= 1e-14 {
            return Ok(self);
        }
        let to = if base < lo { lo } else { hi };
        self.bridge = Some(Bridge {
            from: base,
            to,
            value_at_to: (self.value)(to)?,
        });
        Ok(self)
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        match self.bridge {
            Some(b) if b.covers(s) => Ok(b.slope() * (s - b.from)),
            _ => (self.value)(s),
        }
    }

    pub fn deriv(&self, s: f64) -> Result<f64> {
        match self.bridge {
            Some(b) if b.covers(s) => Ok(b.slope()),
            _ => (self.deriv)(s),
        }
    }
}

impl fmt::Debug for Fixing1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fixing1")
            .field("zero", &self.zero)
            .field("bridge", &self.bridge)
            .finish()
    }
}

/// Fixing function of (x, y) with its gradient.
#[derive(Clone)]
pub struct Fixing2 {
    value: Fn2,
    grad: Grad2,
    zero: bool,
}

impl Fixing2 {
    pub fn zero() -> Self {
        Self {
            value: Arc::new(|_, _| Ok(0.0)),
            grad: Arc::new(|_, _| Ok((0.0, 0.0))),
            zero: true,
        }
    }

    pub fn new(value: Fn2, grad: Grad2) -> Self {
        Self { value, grad, zero: false }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        (self.value)(x, y)
    }

    pub fn grad(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        (self.grad)(x, y)
    }
}

impl fmt::Debug for Fixing2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fixing2").field("zero", &self.zero).finish()
    }
}

/// Largest violation of one fixing condition over the sampled observation
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

/// Fixing functions of a route family: `g(x)` and `g_hat(t)` in 1+1D, `g(x)`
/// and `h(y)` in 2D, `G(y)`, `G_hat(x)` and `F(x, y)` in 2+1D.
#[derive(Debug, Clone, Default)]
pub struct FixingFunctions {
    pub g: Option<Fixing1>,
    pub g_hat: Option<Fixing1>,
    pub h: Option<Fixing1>,
    pub big_g: Option<Fixing1>,
    pub big_g_hat: Option<Fixing1>,
    pub big_f: Option<Fixing2>,
    pub residuals: Vec<ConditionResidual>,
}

impl FixingFunctions {
    /// All functions of `dim` set to zero, without residual checks.
    pub fn zero(dim: Dimension) -> Self {
        let z = || Some(Fixing1::zero());
        match dim {
            Dimension::OneD => Self {
                g: z(),
                g_hat: z(),
                ..Default::default()
            },
            Dimension::TwoDStatic => Self {
                g: z(),
                h: z(),
                ..Default::default()
            },
            Dimension::TwoPlusOne => Self {
                big_g: z(),
                big_g_hat: z(),
                big_f: Some(Fixing2::zero()),
                ..Default::default()
            },
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }
}

/// Everything needed to build solutions for one configuration.
#[derive(Clone)]
pub struct Problem {
    pub integrals: Arc<Integrals>,
    pub base: Point,
    pub lambda0: f64,
    pub connectivity: Connectivity,
    pub observation: Option<ObservationRegion>,
}

impl Problem {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            integrals: Arc::new(Integrals::new(
                cfg.potentials.clone(),
                cfg.fields.clone(),
                cfg.constants,
                cfg.line_rule,
                cfg.area_rule,
            )),
            base: cfg.base,
            lambda0: cfg.lambda0,
            connectivity: cfg.connectivity,
            observation: Some(cfg.observation.clone()),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.integrals.potentials.dim
    }

    pub fn require(&self, route: Route) -> Result<()> {
        let got = self.dim();
        let expected = route.dimension();
        // a static 2D configuration may be read as a degenerate 2+1D one
        let embedded = expected == Dimension::TwoPlusOne && got == Dimension::TwoDStatic;
        if got == expected || embedded {
            Ok(())
        } else {
            Err(SolverError::WrongDimension { route, expected, got })
        }
    }
}

/// Constituents of `Lambda` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LambdaParts {
    pub base: f64,
    /// Line integrals of the potentials along the route.
    pub potential: f64,
    /// Flux integrals of the fields over the observation rectangle.
    pub nonlocal: f64,
    pub fixing: f64,
    pub multiplicity: f64,
}

impl LambdaParts {
    pub fn total(&self) -> f64 {
        self.base + self.potential + self.nonlocal + self.fixing + self.multiplicity
    }
}

/// A constructed gauge function.
#[derive(Clone)]
pub struct GaugeSolution {
    pub route: Route,
    pub base: Point,
    pub lambda0: f64,
    pub fixing: FixingFunctions,
    /// Constant added by [`apply_multiplicity`]; zero otherwise.
    pub multiplicity: f64,
    pub connectivity: Connectivity,
    integrals: Arc<Integrals>,
}

impl GaugeSolution {
    pub fn evaluate(&self, p: Point) -> Result<f64> {
        Ok(self.evaluate_parts(p)?.total())
    }

    pub fn integrals(&self) -> &Integrals {
        &self.integrals
    }
}

impl fmt::Debug for GaugeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeSolution")
            .field("route", &self.route)
            .field("base", &self.base)
            .field("lambda0", &self.lambda0)
            .field("multiplicity", &self.multiplicity)
            .finish()
    }
}

/// Adds the route's multiplicity constant from `values`.
pub fn apply_multiplicity(sol: GaugeSolution, values: Multiplicities) -> Result<GaugeSolution> {
    if sol.connectivity != Connectivity::Multiple {
        return Err(SolverError::NotMultiplyConnected);
    }
    let add = sol
        .route
        .multiplicity(&values)
        .ok_or(SolverError::NoMultiplicity(sol.route))?;
    Ok(GaugeSolution {
        multiplicity: sol.multiplicity + add,
        ..sol
    })
}

/// Builds `route` for a scenario: solves the fixing functions, assembles the
/// route and, for multiply-connected configurations, applies the scenario's
/// multiplicities.
pub fn solve(cfg: &ScenarioConfig, route: Route, opts: &FixingOptions) -> Result<GaugeSolution> {
    let problem = Problem::from_config(cfg);
    if route.is_naive() {
        return naive_dirac_lambda(&problem, route);
    }
    problem.require(route)?;
    let fix = match route.dimension() {
        Dimension::OneD => solve_fixing_1d(&problem, opts)?,
        Dimension::TwoDStatic => solve_fixing_2d(&problem, opts)?,
        Dimension::TwoPlusOne => solve_fixing_full(&problem, opts)?,
    };
    let sol = match route.dimension() {
        Dimension::OneD => lambda_1d(&problem, &fix, route)?,
        Dimension::TwoDStatic => lambda_2d_static(&problem, &fix, route)?,
        Dimension::TwoPlusOne => lambda_full(&problem, &fix, route)?,
    };
    match (cfg.connectivity, cfg.multiplicities) {
        (Connectivity::Multiple, Some(m)) => apply_multiplicity(sol, m),
        _ => Ok(sol),
    }
}

//! Verification layer: gauge-equation residuals, route differences, flux
//! quadrature and the wavefunction phase map.

mod flux;
mod residual;

use num_complex::Complex64;
use thiserror::Error;

use crate::fields::{Constants, FieldsError, Point};
use crate::gauge_solver::{GaugeSolution, LambdaParts, SolverError};
use crate::numerics::{Axis, NumericsError};

pub use flux::{enclosed_flux, van_kampen_delta, FluxKind, FluxRegion};
pub use residual::{pde_residual, ResidualReport};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("evaluation failed at {at}: {source}")]
    Evaluation {
        at: Point,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("solutions have different base points: {a} vs {b}")]
    BaseMismatch { a: Point, b: Point },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grid axis {0} is not an axis of the potentials")]
    ForeignAxis(Axis),
    #[error("no interior grid point has a full stencil inside the region")]
    NoInteriorPoints,
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),
    #[error("scenario `{0}` has no switched-solenoid model")]
    NotVanKampen(String),
    #[error("loop radius {radius} does not clear the solenoid core (radius {core})")]
    LoopIntersectsCore { radius: f64, core: f64 },
    #[error("{points} points but {values} values")]
    LengthMismatch { points: usize, values: usize },
    #[error("non-finite amplitude at {0}")]
    NonFinite(Point),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

fn eval_err(at: Point) -> impl FnOnce(SolverError) -> AnalysisError {
    move |source| AnalysisError::Evaluation { at, source }
}

/// Decomposition of `Lambda_a - Lambda_b` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseReport {
    /// Difference of the potential line integrals (the circuit integral of A
    /// and phi).
    pub ab_term: f64,
    /// Difference of the field double integrals, including fixing functions.
    pub nonlocal_term: f64,
    pub multiplicity_term: f64,
    pub delta_lambda: f64,
    /// `q delta_lambda / (hbar c)`, radians.
    pub phase: f64,
}

impl PhaseReport {
    pub fn new(ab_term: f64, nonlocal_term: f64, multiplicity_term: f64, con: &Constants) -> Self {
        let delta_lambda = ab_term + nonlocal_term + multiplicity_term;
        Self {
            ab_term,
            nonlocal_term,
            multiplicity_term,
            delta_lambda,
            phase: con.q * delta_lambda / (con.hbar * con.c),
        }
    }

    /// Difference of two already evaluated solutions at the same point.
    pub fn from_parts(a: &LambdaParts, b: &LambdaParts, con: &Constants) -> Self {
        Self::new(
            a.potential - b.potential,
            (a.nonlocal + a.fixing) - (b.nonlocal + b.fixing),
            a.multiplicity - b.multiplicity,
            con,
        )
    }
}

/// `Lambda_a - Lambda_b` at each point, split into its constituents.
pub fn solution_difference(
    a: &GaugeSolution,
    b: &GaugeSolution,
    pts: &[Point],
    con: &Constants,
) -> Result<Vec<PhaseReport>> {
    if a.base != b.base {
        return Err(AnalysisError::BaseMismatch { a: a.base, b: b.base });
    }
    if a.lambda0 != b.lambda0 {
        return Err(AnalysisError::DimensionMismatch(format!(
            "base values differ: {} vs {}",
            a.lambda0, b.lambda0
        )));
    }
    pts.iter()
        .map(|&p| {
            let pa = a.evaluate_parts(p).map_err(eval_err(p))?;
            let pb = b.evaluate_parts(p).map_err(eval_err(p))?;
            Ok(PhaseReport::from_parts(&pa, &pb, con))
        })
        .collect()
}

/// How well the nonlocal terms cancel the potential circuit terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cancellation {
    /// Largest `|delta_lambda| / (|ab_term| + 1)`.
    pub max_ratio: f64,
    pub worst_point: Point,
    pub max_abs_ab: f64,
    pub max_abs_nonlocal: f64,
}

/// Route-difference cancellation over `pts` for a simple-connected
/// configuration.
pub fn werner_brill_cancellation(
    a: &GaugeSolution,
    b: &GaugeSolution,
    pts: &[Point],
    con: &Constants,
) -> Result<Cancellation> {
    let reports = solution_difference(a, b, pts, con)?;
    let mut out = Cancellation {
        max_ratio: 0.0,
        worst_point: pts.first().copied().unwrap_or_default(),
        max_abs_ab: 0.0,
        max_abs_nonlocal: 0.0,
    };
    for (r, &p) in reports.iter().zip(pts) {
        let ratio = r.delta_lambda.abs() / (r.ab_term.abs() + 1.0);
        if ratio > out.max_ratio {
            out.max_ratio = ratio;
            out.worst_point = p;
        }
        out.max_abs_ab = out.max_abs_ab.max(r.ab_term.abs());
        out.max_abs_nonlocal = out.max_abs_nonlocal.max(r.nonlocal_term.abs());
    }
    Ok(out)
}

/// Complex amplitudes sampled at spacetime points.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionSample {
    points: Vec<Point>,
    values: Vec<Complex64>,
}

impl WavefunctionSample {
    pub fn new(points: Vec<Point>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(AnalysisError::LengthMismatch {
                points: points.len(),
                values: values.len(),
            });
        }
        if let Some((p, _)) = points.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
            return Err(AnalysisError::NonFinite(*p));
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `psi2 = exp(i q Lambda / (hbar c)) psi1` at every sample point.
pub fn phase_map(psi1: &WavefunctionSample, sol: &GaugeSolution, con: &Constants) -> Result<WavefunctionSample> {
    let k = con.q / (con.hbar * con.c);
    let values = psi1
        .points
        .iter()
        .zip(&psi1.values)
        .map(|(&p, &v)| {
            let lambda = sol.evaluate(p).map_err(eval_err(p))?;
            let (r, arg) = v.to_polar();
            Ok(Complex64::from_polar(r, arg + k * lambda))
        })
        .collect::<Result<Vec<_>>>()?;
    WavefunctionSample::new(psi1.points.clone(), values)
}

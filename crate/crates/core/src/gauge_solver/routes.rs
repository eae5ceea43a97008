use super::fixing::{electric_flux, magnetic_flux};
use super::{FixingFunctions, GaugeSolution, LambdaParts, Problem, Result, Route, SolverError};
use crate::fields::Point;
use crate::numerics::Axis;

fn build(problem: &Problem, fix: &FixingFunctions, route: Route) -> GaugeSolution {
    GaugeSolution {
        route,
        base: problem.base,
        lambda0: problem.lambda0,
        fixing: fix.clone(),
        multiplicity: 0.0,
        connectivity: problem.connectivity,
        integrals: problem.integrals.clone(),
    }
}

fn need<T>(route: Route, name: &'static str, v: &Option<T>) -> Result<()> {
    if v.is_some() {
        Ok(())
    } else {
        Err(SolverError::MissingFixing { route, name })
    }
}

/// The naive combined line-integral phase. `NaiveV1` integrates `A(x', t)`
/// and `phi(x, t')`; `NaiveV2` integrates `A(x', t0)` and `phi(x0, t')`.
/// Both satisfy the gauge equations only when A is static and phi uniform.
pub fn naive_dirac_lambda(problem: &Problem, variant: Route) -> Result<GaugeSolution> {
    if !variant.is_naive() {
        return Err(SolverError::UnknownRoute(format!("{variant} is not a naive variant")));
    }
    problem.require(variant)?;
    Ok(build(problem, &FixingFunctions::default(), variant))
}

/// 1+1D generalized solution along `OneDTThenX` or `OneDXThenT`.
pub fn lambda_1d(problem: &Problem, fix: &FixingFunctions, route: Route) -> Result<GaugeSolution> {
    problem.require(route)?;
    match route {
        Route::OneDTThenX => need(route, "g", &fix.g)?,
        Route::OneDXThenT => need(route, "g_hat", &fix.g_hat)?,
        _ => return Err(SolverError::UnknownRoute(format!("{route} is not a 1+1D generalized route"))),
    }
    Ok(build(problem, fix, route))
}

/// Static 2D generalized solution along `TwoDRoute1` or `TwoDRoute2`.
pub fn lambda_2d_static(problem: &Problem, fix: &FixingFunctions, route: Route) -> Result<GaugeSolution> {
    problem.require(route)?;
    match route {
        Route::TwoDRoute1 => need(route, "g", &fix.g)?,
        Route::TwoDRoute2 => need(route, "h", &fix.h)?,
        _ => return Err(SolverError::UnknownRoute(format!("{route} is not a 2D route"))),
    }
    Ok(build(problem, fix, route))
}

/// 2+1D solution, `FullPrimary` or its spatial dual `FullDual`.
pub fn lambda_full(problem: &Problem, fix: &FixingFunctions, route: Route) -> Result<GaugeSolution> {
    problem.require(route)?;
    match route {
        Route::FullPrimary => need(route, "G", &fix.big_g)?,
        Route::FullDual => need(route, "G_hat", &fix.big_g_hat)?,
        _ => return Err(SolverError::UnknownRoute(format!("{route} is not a 2+1D route"))),
    }
    need(route, "F", &fix.big_f)?;
    Ok(build(problem, fix, route))
}

fn fixing_value(f: &Option<super::Fixing1>, s: f64) -> Result<f64> {
    match f {
        Some(f) => f.value(s),
        None => Ok(0.0),
    }
}

impl GaugeSolution {
    /// Each constituent of `Lambda(p)`; their sum is the solution value.
    pub fn evaluate_parts(&self, p: Point) -> Result<LambdaParts> {
        let ig = &self.integrals;
        let pot = &ig.potentials;
        let c = ig.c();
        let b = self.base;
        let mut parts = LambdaParts {
            base: self.lambda0,
            multiplicity: self.multiplicity,
            ..Default::default()
        };
        match self.route {
            Route::NaiveV1 | Route::NaiveV2 | Route::OneDTThenX | Route::OneDXThenT => {
                let p = p.with(Axis::Y, 0.0);
                // A leg at time `ta`, phi leg at position `xp`
                let (ta, xp) = match self.route {
                    Route::NaiveV1 => (p.t, p.x),
                    Route::NaiveV2 => (b.t, b.x),
                    Route::OneDTThenX => (p.t, b.x),
                    _ => (b.t, p.x),
                };
                let a_leg = ig.line(&pot.a_x, Axis::X, p.with(Axis::T, ta), b.x, p.x)?;
                let phi_leg = ig.line(&pot.phi, Axis::T, p.with(Axis::X, xp), b.t, p.t)?;
                parts.potential = a_leg - c * phi_leg;
                match self.route {
                    Route::OneDTThenX => {
                        parts.nonlocal = electric_flux(ig_arc(self), b)(p)?;
                        parts.fixing = fixing_value(&self.fixing.g, p.x)?;
                    }
                    Route::OneDXThenT => {
                        parts.nonlocal = -electric_flux(ig_arc(self), b)(p)?;
                        parts.fixing = fixing_value(&self.fixing.g_hat, p.t)?;
                    }
                    _ => {}
                }
            }
            Route::TwoDRoute1 | Route::TwoDRoute2 => {
                let first = self.route == Route::TwoDRoute1;
                let (ya, xa) = if first { (p.y, b.x) } else { (b.y, p.x) };
                let ax_leg = ig.line(&pot.a_x, Axis::X, p.with(Axis::Y, ya), b.x, p.x)?;
                let ay_leg = ig.line(&pot.a_y, Axis::Y, p.with(Axis::X, xa), b.y, p.y)?;
                parts.potential = ax_leg + ay_leg;
                let flux = magnetic_flux(ig_arc(self), b, p.t)(p)?;
                if first {
                    parts.nonlocal = flux;
                    parts.fixing = fixing_value(&self.fixing.g, p.x)?;
                } else {
                    parts.nonlocal = -flux;
                    parts.fixing = fixing_value(&self.fixing.h, p.y)?;
                }
            }
            Route::FullPrimary | Route::FullDual => {
                let primary = self.route == Route::FullPrimary;
                // A_x leg at height ya, A_y leg at abscissa xa
                let (ya, xa) = if primary { (b.y, p.x) } else { (p.y, b.x) };
                let ax_leg = ig.line(&pot.a_x, Axis::X, p.with(Axis::Y, ya), b.x, p.x)?;
                let ay_leg = ig.line(&pot.a_y, Axis::Y, p.with(Axis::X, xa), b.y, p.y)?;
                let corner = Point::new(b.x, b.y, 0.0);
                let phi_leg = ig.line(&pot.phi, Axis::T, corner, b.t, p.t)?;
                parts.potential = ax_leg + ay_leg - c * phi_leg;

                let flux0 = magnetic_flux(ig_arc(self), b, b.t)(p)?;
                let at = Point::default();
                let ex = ig.rect(&ig.fields.e_x, Axis::T, Axis::X, at.with(Axis::Y, ya), (b.t, p.t), (b.x, p.x))?;
                let ey = ig.rect(&ig.fields.e_y, Axis::T, Axis::Y, at.with(Axis::X, xa), (b.t, p.t), (b.y, p.y))?;
                let sign = if primary { -1.0 } else { 1.0 };
                parts.nonlocal = sign * flux0 + c * (ex + ey);

                let f = match &self.fixing.big_f {
                    Some(f) => f.value(p.x, p.y)?,
                    None => 0.0,
                };
                let g = if primary {
                    fixing_value(&self.fixing.big_g, p.y)?
                } else {
                    fixing_value(&self.fixing.big_g_hat, p.x)?
                };
                parts.fixing = g + f;
            }
        }
        Ok(parts)
    }
}

fn ig_arc(sol: &GaugeSolution) -> &std::sync::Arc<super::Integrals> {
    &sol.integrals
}

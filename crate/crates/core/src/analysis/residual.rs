use rayon::prelude::*;

use super::{eval_err, AnalysisError, Result};
use crate::fields::{Constants, ObservationRegion, Point, PotentialSet};
use crate::gauge_solver::GaugeSolution;
use crate::numerics::{Axis, BoxDomain};

/// Largest violations of `grad Lambda = A` and `-(1/c) dLambda/dt = phi` over
/// the interior of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `max |d_axis Lambda - A_axis|` for each spatial grid axis.
    pub max_spatial: Vec<(Axis, f64)>,
    /// `max |(1/c) dLambda/dt + phi|`, when time is a grid axis.
    pub max_temporal: Option<f64>,
    pub worst_point: Point,
    pub worst_axis: Axis,
    pub grid: BoxDomain,
    pub tolerance: f64,
    /// Interior points with a complete stencil.
    pub checked: usize,
    pub pass: bool,
}

impl ResidualReport {
    /// Largest residual over all axes.
    pub fn max(&self) -> f64 {
        self.max_spatial
            .iter()
            .map(|(_, v)| *v)
            .chain(self.max_temporal)
            .fold(0.0, f64::max)
    }

    pub fn axis(&self, axis: Axis) -> Option<f64> {
        if axis == Axis::T {
            return self.max_temporal;
        }
        self.max_spatial.iter().find(|(a, _)| *a == axis).map(|(_, v)| *v)
    }
}

/// Central-difference residual of the gauge equations on the sample grid of
/// `region`. The difference step along each axis is the grid spacing; grid
/// points on the boundary, or whose stencil leaves the region mask, are
/// skipped.
pub fn pde_residual(
    sol: &GaugeSolution,
    p: &PotentialSet,
    region: &ObservationRegion,
    con: &Constants,
    tolerance: f64,
) -> Result<ResidualReport> {
    let sol_dim = sol.integrals().potentials.dim;
    if sol_dim != p.dim {
        return Err(AnalysisError::DimensionMismatch(format!(
            "solution is {sol_dim}, potentials are {}",
            p.dim
        )));
    }
    let grid = region.domain.clone();
    let axes: Vec<Axis> = grid.axes().iter().map(|(a, _)| *a).collect();
    if let Some(a) = axes.iter().find(|a| !p.dim.axes().contains(a)) {
        return Err(AnalysisError::ForeignAxis(*a));
    }
    let dims: Vec<usize> = grid.axes().iter().map(|(_, iv)| iv.n()).collect();

    let values: Vec<Option<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let pt = region.point(&grid.index(k));
            if !region.contains(pt) {
                return Ok(None);
            }
            sol.evaluate(pt).map(Some).map_err(eval_err(pt))
        })
        .collect::<Result<_>>()?;

    let mut maxima = vec![0.0_f64; axes.len()];
    let mut worst = (-1.0_f64, Point::default(), axes[0]);
    let mut checked = 0;
    'points: for k in 0..grid.len() {
        let idx = grid.index(k);
        if values[k].is_none() || idx.iter().zip(&dims).any(|(&i, &n)| i == 0 || i + 1 == n) {
            continue;
        }
        let mut diffs = Vec::with_capacity(axes.len());
        for (j, (_, iv)) in grid.axes().iter().enumerate() {
            let mut up = idx.clone();
            up[j] += 1;
            let mut down = idx.clone();
            down[j] -= 1;
            match (values[grid.flat(&up)], values[grid.flat(&down)]) {
                (Some(u), Some(d)) => diffs.push((u - d) / (2.0 * iv.spacing())),
                _ => continue 'points,
            }
        }
        let pt = region.point(&idx);
        let [a_x, a_y, phi] = p.eval(pt)?;
        for (j, (&axis, d)) in axes.iter().zip(diffs).enumerate() {
            let r = match axis {
                Axis::X => (d - a_x).abs(),
                Axis::Y => (d - a_y).abs(),
                Axis::T => (d / con.c + phi).abs(),
            };
            maxima[j] = maxima[j].max(r);
            if r > worst.0 {
                worst = (r, pt, axis);
            }
        }
        checked += 1;
    }
    if checked == 0 {
        return Err(AnalysisError::NoInteriorPoints);
    }

    let mut max_spatial = Vec::new();
    let mut max_temporal = None;
    for (&axis, &m) in axes.iter().zip(&maxima) {
        if axis == Axis::T {
            max_temporal = Some(m);
        } else {
            max_spatial.push((axis, m));
        }
    }
    let pass = maxima.iter().all(|&m| m < tolerance);
    Ok(ResidualReport {
        max_spatial,
        max_temporal,
        worst_point: worst.1,
        worst_axis: worst.2,
        grid,
        tolerance,
        checked,
        pass,
    })
}

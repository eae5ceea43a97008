//! Grids, composite Simpson quadrature and central differences.
//!
//! Everything here is a pure function of its inputs. Sums are accumulated in
//! a fixed left-to-right order so results are bit-reproducible.

mod kinks;
mod quadrature;

pub use kinks::{Kink, KinkSet};
pub use quadrature::{integrate_rect, integrate_span, QuadratureRule, RectPlane};

use std::fmt;

use thiserror::Error;

/// Samples per axis of observation and residual grids unless configured.
pub const DEFAULT_GRID_N: usize = 401;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid interval [{lo}, {hi}] with {n} samples: {reason}")]
    InvalidInterval {
        lo: f64,
        hi: f64,
        n: usize,
        reason: &'static str,
    },
    #[error("non-finite integrand value at {at}")]
    NonFinite { at: Coord },
    #[error("finite-difference step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("duplicate axis {0} in box domain")]
    DuplicateAxis(Axis),
    #[error("box domain needs between 1 and 3 axes, got {0}")]
    AxisCount(usize),
}

/// Location reported with a non-finite sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coord {
    Line(f64),
    Plane(f64, f64),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Line(u) => write!(f, "{u}"),
            Coord::Plane(u, v) => write!(f, "({u}, {v})"),
        }
    }
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Closed interval sampled at `n` equally spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let bad = |reason| NumericsError::InvalidInterval { lo, hi, n, reason };
        if !lo.is_finite() || !hi.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        if lo >= hi {
            return Err(bad("lo must be below hi"));
        }
        if n < 3 {
            return Err(bad("need at least 3 samples"));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// The i-th sample; the last sample is exactly `hi`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.lo, self.hi, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    T,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::T => "t",
        };
        f.write_str(s)
    }
}

/// Axis-aligned box of sampled intervals, one per tagged axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    axes: Vec<(Axis, Interval)>,
}

impl BoxDomain {
    pub fn new(axes: Vec<(Axis, Interval)>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(NumericsError::AxisCount(axes.len()));
        }
        for (i, (a, _)) in axes.iter().enumerate() {
            if axes[..i].iter().any(|(b, _)| b == a) {
                return Err(NumericsError::DuplicateAxis(*a));
            }
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[(Axis, Interval)] {
        &self.axes
    }

    pub fn interval(&self, axis: Axis) -> Option<&Interval> {
        self.axes.iter().find(|(a, _)| *a == axis).map(|(_, iv)| iv)
    }

    /// Same bounds, every axis resampled with `n` points.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        let axes = self
            .axes
            .iter()
            .map(|(a, iv)| iv.with_n(n).map(|iv| (*a, iv)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, iv)| iv.n()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of the flat sample `k`, first axis slowest.
    pub fn index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, (_, iv)) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = k % iv.n();
            k /= iv.n();
        }
        idx
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        self.axes
            .iter()
            .zip(idx)
            .fold(0, |acc, ((_, iv), &i)| acc * iv.n() + i)
    }
}

/// Composite Simpson sum of equally spaced samples. An even sample count
/// closes with a 3/8 panel over the last three sub-intervals.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        4 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ if n % 2 == 1 => simpson_odd(values, h),
        _ => {
            let head = simpson_odd(&values[..n - 3], h);
            let t = &values[n - 4..];
            head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

fn simpson_odd(values: &[f64], h: f64) -> f64 {
    let last = values.len() - 1;
    let mut acc = values[0] + values[last];
    for (i, v) in values.iter().enumerate().take(last).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Composite Simpson estimate of the integral of `f` over `iv`.
pub fn integrate_line<F>(f: F, iv: &Interval) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut samples = Vec::with_capacity(iv.n());
    for u in iv.points() {
        let v = f(u);
        if !v.is_finite() {
            return Err(NumericsError::NonFinite { at: Coord::Line(u) });
        }
        samples.push(v);
    }
    Ok(simpson_samples(&samples, iv.spacing()))
}

/// Iterated Simpson: the inner integral over `inner` is taken first for every
/// sample of `outer`. `f` receives `(outer, inner)`.
pub fn integrate_iterated<F>(f: F, outer: &Interval, inner: &Interval) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let mut outer_samples = Vec::with_capacity(outer.n());
    let mut row = Vec::with_capacity(inner.n());
    for u in outer.points() {
        row.clear();
        for v in inner.points() {
            let val = f(u, v);
            if !val.is_finite() {
                return Err(NumericsError::NonFinite {
                    at: Coord::Plane(u, v),
                });
            }
            row.push(val);
        }
        outer_samples.push(simpson_samples(&row, inner.spacing()));
    }
    Ok(simpson_samples(&outer_samples, outer.spacing()))
}

/// Second-order central difference `(f(at+h) - f(at-h)) / 2h`.
pub fn central_diff<F>(f: F, at: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(NumericsError::BadStep(h));
    }
    let (up, down) = (f(at + h), f(at - h));
    if !up.is_finite() {
        return Err(NumericsError::NonFinite {
            at: Coord::Line(at + h),
        });
    }
    if !down.is_finite() {
        return Err(NumericsError::NonFinite {
            at: Coord::Line(at - h),
        });
    }
    Ok((up - down) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64, n: usize) -> Interval {
        Interval::new(lo, hi, n).unwrap()
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(Interval::new(1.0, 1.0, 5).is_err());
        assert!(Interval::new(2.0, 1.0, 5).is_err());
        assert!(Interval::new(0.0, 1.0, 2).is_err());
        assert!(Interval::new(0.0, f64::INFINITY, 5).is_err());
        let i = iv(0.0, 1.0, 11);
        assert!((i.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(i.point(10), 1.0);
    }

    #[test]
    fn line_examples() {
        let v = integrate_line(|x| x, &iv(0.0, 1.0, 101)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(integrate_line(|_| 0.0, &iv(-3.0, 7.0, 9)).unwrap(), 0.0);
    }

    #[test]
    fn step_function_matches_riemann_oracle() {
        let step = |x: f64| if x >= 0.5 { 1.0 } else { 0.0 };
        // left Riemann sums refined until they settle
        let riemann = |m: usize| (0..m).map(|i| step(i as f64 / m as f64)).sum::<f64>() / m as f64;
        let oracle = riemann(1 << 20);
        assert!((oracle - riemann(1 << 19)).abs() < 1e-5);
        let v = integrate_line(step, &iv(0.0, 1.0, 2001)).unwrap();
        assert!((v - oracle).abs() < 1e-3, "{v} vs {oracle}");
    }

    #[test]
    fn even_sample_count_is_exact_for_cubics() {
        let v = integrate_line(|x| x * x * x - x, &iv(0.0, 2.0, 8)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate_line(|x| x * x, &iv(0.0, 3.0, 4)).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_names_coordinate() {
        let err = integrate_line(|x| if x > 0.45 { f64::NAN } else { x }, &iv(0.0, 1.0, 11))
            .unwrap_err();
        match err {
            NumericsError::NonFinite { at: Coord::Line(u) } => assert!((u - 0.5).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iterated_examples() {
        let a = integrate_iterated(|_, _| 1.0, &iv(0.0, 2.0, 5), &iv(0.0, 3.0, 5)).unwrap();
        assert!((a - 6.0).abs() < 1e-12);
        let b = integrate_iterated(|x, t| x * t, &iv(0.0, 1.0, 5), &iv(0.0, 1.0, 5)).unwrap();
        assert!((b - 0.25).abs() < 1e-12);
    }

    #[test]
    fn iterated_strip_indicator() {
        let strip = |x: f64, _t: f64| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 };
        // midpoint Riemann oracle on a fine grid
        let m = 3000;
        let h = 3.0 / m as f64;
        let oracle: f64 = (0..m).map(|i| strip(-1.0 + (i as f64 + 0.5) * h, 0.0) * h).sum::<f64>() * 3.0;
        let v = integrate_iterated(strip, &iv(-1.0, 2.0, 2001), &iv(0.0, 3.0, 2001)).unwrap();
        assert!((v - 3.0).abs() < 1e-2);
        assert!((oracle - 3.0).abs() < 1e-2);
    }

    #[test]
    fn central_diff_examples() {
        let d = central_diff(|x| x * x, 3.0, 1e-4).unwrap();
        assert!((d - 6.0).abs() < 1e-7);
        assert_eq!(central_diff(|_| 4.2, 1.0, 1e-3).unwrap(), 0.0);
        // Taylor remainder: |err| <= h^2/6 max|f'''| = 1.7e-9
        let s = central_diff(f64::sin, 0.0, 1e-4).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
        assert!(central_diff(|x| x, 0.0, 0.0).is_err());
        assert!(central_diff(|x| 1.0 / x, 1e-4, 1e-4).is_err());
    }

    #[test]
    fn refinement_reduces_error_on_polynomials() {
        let polys: [(fn(f64) -> f64, f64); 3] = [
            (|x| x.powi(4), 1.0 / 5.0),
            (|x| x.powi(5) - 2.0 * x, 1.0 / 6.0 - 1.0),
            (|x| 3.0 * x.powi(6), 3.0 / 7.0),
        ];
        for (f, exact) in polys {
            let mut prev = f64::INFINITY;
            for n in [5, 9, 17, 33, 65] {
                let err = (integrate_line(f, &iv(0.0, 1.0, n)).unwrap() - exact).abs();
                assert!(err < prev, "n={n} err={err} prev={prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn box_domain_indexing() {
        let d = BoxDomain::new(vec![(Axis::X, iv(0.0, 1.0, 3)), (Axis::T, iv(0.0, 1.0, 4))]).unwrap();
        assert_eq!(d.len(), 12);
        for k in 0..12 {
            assert_eq!(d.flat(&d.index(k)), k);
        }
        assert!(BoxDomain::new(vec![(Axis::X, iv(0.0, 1.0, 3)), (Axis::X, iv(0.0, 1.0, 3))]).is_err());
    }
}

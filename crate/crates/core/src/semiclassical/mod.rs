//! Double-slit phase estimates for a magnetic strip and an electric pulse.
//!
//! Geometry: particles travel along the longitudinal axis from the slits to a
//! screen; `x` runs along the screen, positive upward, and B points out of the
//! plane (longitudinal, `x`, out-of-plane form a right-handed frame). The
//! slits sit at `x = +-d/2`. Signs are written for the charge `q`; for
//! electrons (`q = -e`) every output flips sign.

mod oracle;

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::fields::Constants;

pub use oracle::{trajectory_oracle, OracleResult, MIN_STEPS};

/// Largest admissible small-deflection ratio.
pub const REGIME_LIMIT: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum SemiclassicalError {
    #[error("invalid setup: {name} {reason}")]
    InvalidSetup { name: &'static str, reason: &'static str },
    #[error("wavelength {given} differs from h/(m v) = {expected}")]
    InconsistentWavelength { given: f64, expected: f64 },
    #[error("trajectory oracle needs at least {min} steps, got {got}")]
    TooFewSteps { got: usize, min: usize },
    #[error("trajectory state became non-finite at step {0}")]
    NonFinite(usize),
    #[error("particle stopped moving toward the screen at step {0}")]
    TurnedBack(usize),
}

pub type Result<T> = std::result::Result<T, SemiclassicalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Magnetic,
    Electric,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Magnetic => "magnetic",
            Variant::Electric => "electric",
        })
    }
}

/// Double-slit geometry and beam. `w` and `b` describe the magnetic strip,
/// `e_field` and `t_pulse` the electric pulse (field along `x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSetup {
    /// Distance from the middle of the field region to the screen.
    pub l: f64,
    pub d: f64,
    pub w: f64,
    pub lambda_db: f64,
    pub v: f64,
    pub q: f64,
    pub m: f64,
    pub b: f64,
    pub e_field: f64,
    pub t_pulse: f64,
    pub con: Constants,
}

impl SlitSetup {
    /// Field-free setup; the de Broglie wavelength is `h / (m v)`.
    pub fn new(con: Constants, l: f64, d: f64, m: f64, v: f64, q: f64) -> Result<Self> {
        let s = Self {
            l,
            d,
            w: 0.0,
            lambda_db: con.h / (m * v),
            v,
            q,
            m,
            b: 0.0,
            e_field: 0.0,
            t_pulse: 0.0,
            con,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_magnetic(mut self, b: f64, w: f64) -> Result<Self> {
        self.b = b;
        self.w = w;
        self.validate()?;
        Ok(self)
    }

    pub fn with_electric(mut self, e_field: f64, t_pulse: f64) -> Result<Self> {
        self.e_field = e_field;
        self.t_pulse = t_pulse;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(SemiclassicalError::InvalidSetup { name, reason });
        for (name, v) in [("l", self.l), ("d", self.d), ("m", self.m), ("v", self.v), ("lambda_db", self.lambda_db)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, "must be positive");
            }
        }
        for (name, v) in [("w", self.w), ("t_pulse", self.t_pulse)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(name, "must be non-negative");
            }
        }
        for (name, v) in [("q", self.q), ("b", self.b), ("e_field", self.e_field)] {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        if self.con.validate().is_err() {
            return bad("con", "must hold positive finite constants");
        }
        let expected = self.con.h / (self.m * self.v);
        if (self.lambda_db - expected).abs() > 1e-9 * expected {
            return Err(SemiclassicalError::InconsistentWavelength {
                given: self.lambda_db,
                expected,
            });
        }
        Ok(())
    }

    /// Small-deflection ratio: `W/L` for the strip, `v T / L` for the pulse.
    pub fn regime_ratio(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Magnetic => self.w / self.l,
            Variant::Electric => self.v * self.t_pulse / self.l,
        }
    }

    fn regime(&self, variant: Variant) -> Option<RegimeWarning> {
        RegimeWarning::check(variant.to_string(), self.regime_ratio(variant))
    }
}

/// Raised when a closed form is evaluated outside the small-deflection regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeWarning {
    pub quantity: String,
    pub ratio: f64,
    pub limit: f64,
}

impl RegimeWarning {
    fn check(quantity: String, ratio: f64) -> Option<Self> {
        (ratio.abs() >= REGIME_LIMIT || !ratio.is_finite()).then_some(Self {
            quantity,
            ratio,
            limit: REGIME_LIMIT,
        })
    }
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} small-deflection ratio {:.3e} is not below {}",
            self.quantity, self.ratio, self.limit
        )
    }
}

/// A closed-form value with an optional regime warning.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub warning: Option<RegimeWarning>,
}

/// `2 pi (q/e) B W d / Phi0` with `Phi0 = h c / e`.
pub fn ab_phase_magnetic(s: &SlitSetup) -> Estimate {
    let flux = s.b * s.w * s.d;
    Estimate {
        value: 2.0 * PI * (s.q / s.con.e) * flux / s.con.flux_quantum(),
        warning: s.regime(Variant::Magnetic),
    }
}

/// Central fringe displacement behind the strip, `-B W q L lambda / (h c)`.
pub fn fringe_shift_magnetic(s: &SlitSetup) -> Estimate {
    Estimate {
        value: -s.b * s.w * s.q * s.l * s.lambda_db / (s.con.h * s.con.c),
        warning: s.regime(Variant::Magnetic),
    }
}

/// `-2 pi (q/e) c T (E d) / Phi0`.
pub fn ab_phase_electric(s: &SlitSetup) -> Estimate {
    let delta_v = s.e_field * s.d;
    Estimate {
        value: -2.0 * PI * (s.q / s.con.e) * s.con.c * s.t_pulse * delta_v / s.con.flux_quantum(),
        warning: s.regime(Variant::Electric),
    }
}

/// Central fringe displacement after the pulse, `q E T L lambda / h`.
pub fn fringe_shift_electric(s: &SlitSetup) -> Estimate {
    Estimate {
        value: s.q * s.e_field * s.t_pulse * s.l * s.lambda_db / s.con.h,
        warning: s.regime(Variant::Electric),
    }
}

/// Path-length phase difference `(2 pi / lambda) d x_c / L` of a fringe
/// pattern displaced by `x_c`.
pub fn semi_phase(s: &SlitSetup, x_c: f64) -> Estimate {
    Estimate {
        value: 2.0 * PI / s.lambda_db * s.d * x_c / s.l,
        warning: RegimeWarning::check("fringe displacement".to_string(), x_c / s.l),
    }
}

/// Closed-form `(semiclassical, AB)` phase pair of one variant.
pub fn phase_pair(s: &SlitSetup, variant: Variant) -> (Estimate, Estimate) {
    match variant {
        Variant::Magnetic => (semi_phase(s, fringe_shift_magnetic(s).value), ab_phase_magnetic(s)),
        Variant::Electric => (semi_phase(s, fringe_shift_electric(s).value), ab_phase_electric(s)),
    }
}

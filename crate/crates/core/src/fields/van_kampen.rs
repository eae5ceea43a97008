use std::f64::consts::PI;

use super::{FieldsError, Result};
use crate::numerics::{Axis, Kink, KinkSet};

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (6.0 * u - 15.0))
}

fn smoothstep_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Idealized causal model of a thin solenoid whose flux is switched late.
///
/// The flux ramps smoothly from `phi0` to `phi1` over
/// `[t_switch, t_switch + ramp]`. The change is carried outward by an annular
/// shell of width `shell_width` whose inner edge leaves the core radius at
/// speed `c`; the shell holds the compensating flux `phi0 - phi(t)`, so every
/// loop beyond the shell still encloses `phi0` and sees no field at all.
/// Potentials and fields come from one enclosed-flux profile `Phi_enc(r, t)`,
/// which makes the model satisfy Faraday's law exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanKampenModel {
    pub phi0: f64,
    pub phi1: f64,
    pub t_switch: f64,
    pub ramp: f64,
    pub core_radius: f64,
    pub shell_width: f64,
    pub c: f64,
}

impl VanKampenModel {
    pub fn new(
        phi0: f64,
        phi1: f64,
        t_switch: f64,
        ramp: f64,
        core_radius: f64,
        shell_width: f64,
        c: f64,
    ) -> Result<Self> {
        let bad = |name: &str, reason: &str| {
            Err(FieldsError::InvalidParam {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        };
        for (name, v) in [("phi0", phi0), ("phi1", phi1), ("t_switch", t_switch)] {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        for (name, v) in [("ramp", ramp), ("core_radius", core_radius), ("shell_width", shell_width), ("c", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, "must be positive");
            }
        }
        Ok(Self {
            phi0,
            phi1,
            t_switch,
            ramp,
            core_radius,
            shell_width,
            c,
        })
    }

    /// Core flux schedule.
    pub fn flux(&self, t: f64) -> f64 {
        self.phi0 + (self.phi1 - self.phi0) * smoothstep((t - self.t_switch) / self.ramp)
    }

    pub fn flux_rate(&self, t: f64) -> f64 {
        (self.phi1 - self.phi0) * smoothstep_deriv((t - self.t_switch) / self.ramp) / self.ramp
    }

    /// Outer radius of the field-carrying region at time `t`.
    pub fn front(&self, t: f64) -> f64 {
        self.core_radius + self.shell_width + self.c * (t - self.t_switch).max(0.0)
    }

    fn shell_coord(&self, r: f64, t: f64) -> f64 {
        (r - self.core_radius - self.c * (t - self.t_switch)) / self.shell_width
    }

    fn core_profile(&self, r: f64) -> (f64, f64) {
        let rho2 = (r / self.core_radius).powi(2);
        let w = 1.0 - rho2;
        (1.0 - w * w * w, 6.0 * r * w * w / (self.core_radius * self.core_radius))
    }

    /// Flux through the disc of radius `r`.
    pub fn enclosed(&self, r: f64, t: f64) -> f64 {
        if r < self.core_radius {
            return self.flux(t) * self.core_profile(r).0;
        }
        let u = self.shell_coord(r, t);
        if u >= 1.0 {
            return self.phi0;
        }
        let phi = self.flux(t);
        phi + (self.phi0 - phi) * smoothstep(u)
    }

    fn d_enclosed_dr(&self, r: f64, t: f64) -> f64 {
        if r < self.core_radius {
            return self.flux(t) * self.core_profile(r).1;
        }
        let u = self.shell_coord(r, t);
        (self.phi0 - self.flux(t)) * smoothstep_deriv(u) / self.shell_width
    }

    fn d_enclosed_dt(&self, r: f64, t: f64) -> f64 {
        if r < self.core_radius {
            return self.flux_rate(t) * self.core_profile(r).0;
        }
        let u = self.shell_coord(r, t);
        if u >= 1.0 {
            return 0.0;
        }
        self.flux_rate(t) * (1.0 - smoothstep(u))
            - (self.phi0 - self.flux(t)) * smoothstep_deriv(u) * self.c / self.shell_width
    }

    /// Azimuthal vector potential `Phi_enc / (2 pi r)`.
    pub fn a_phi(&self, r: f64, t: f64) -> f64 {
        if r == 0.0 {
            0.0
        } else {
            self.enclosed(r, t) / (2.0 * PI * r)
        }
    }

    pub fn b(&self, r: f64, t: f64) -> f64 {
        if r < self.core_radius {
            let w = 1.0 - (r / self.core_radius).powi(2);
            return self.flux(t) * 6.0 * w * w / (2.0 * PI * self.core_radius * self.core_radius);
        }
        self.d_enclosed_dr(r, t) / (2.0 * PI * r)
    }

    /// Azimuthal electric field `-(1/c) dA_phi/dt`.
    pub fn e_phi(&self, r: f64, t: f64) -> f64 {
        if r == 0.0 {
            0.0
        } else {
            -self.d_enclosed_dt(r, t) / (2.0 * PI * r * self.c)
        }
    }

    pub fn a_xy(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let a = self.a_phi(r, t);
        (-a * y / r, a * x / r)
    }

    pub fn e_xy(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let e = self.e_phi(r, t);
        (-e * y / r, e * x / r)
    }

    pub fn kinks(&self) -> KinkSet {
        let cone = |radius0| Kink::Cone {
            center: (0.0, 0.0),
            radius0,
            speed: self.c,
            t_start: self.t_switch,
        };
        KinkSet::new()
            .with(Kink::Circle {
                center: (0.0, 0.0),
                radius: self.core_radius,
            })
            .with(cone(self.core_radius))
            .with(cone(self.core_radius + self.shell_width))
            .plane(Axis::T, self.t_switch)
            .plane(Axis::T, self.t_switch + self.ramp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VanKampenModel {
        VanKampenModel::new(1.0, 2.0, 5.0, 1.0, 0.04, 0.05, 1.0).unwrap()
    }

    #[test]
    fn schedule_endpoints() {
        let m = model();
        assert_eq!(m.flux(0.0), 1.0);
        assert_eq!(m.flux(6.0), 2.0);
        assert_eq!(m.flux_rate(4.0), 0.0);
        assert!((m.flux(5.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn beyond_front_nothing_happens() {
        let m = model();
        for &t in &[0.0, 5.5, 8.0, 14.9] {
            let r = m.front(t) + 1e-9;
            assert_eq!(m.enclosed(r, t), 1.0);
            assert_eq!(m.enclosed(r + 3.0, t), 1.0);
            assert_eq!(m.e_phi(r, t), 0.0);
            assert_eq!(m.b(r, t), 0.0);
        }
    }

    #[test]
    fn behind_shell_flux_is_current_flux() {
        let m = model();
        let t = 9.0;
        let r = 1.0;
        assert!((m.enclosed(r, t) - m.flux(t)).abs() < 1e-15);
        assert_eq!(m.b(r, t), 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let m = model();
        let h = 1e-6;
        for &(r, t) in &[(0.02, 5.3), (0.5, 5.6), (0.5 + 0.04 + 0.02, 5.5), (1.0, 5.96)] {
            let dr = (m.enclosed(r + h, t) - m.enclosed(r - h, t)) / (2.0 * h);
            let dt = (m.enclosed(r, t + h) - m.enclosed(r, t - h)) / (2.0 * h);
            assert!((dr - 2.0 * PI * r * m.b(r, t)).abs() < 1e-5, "r={r} t={t}");
            assert!((dt + 2.0 * PI * r * m.c * m.e_phi(r, t)).abs() < 1e-5, "r={r} t={t}");
        }
    }
}

use super::{Result, SemiclassicalError, SlitSetup, Variant};

/// Smallest admissible number of integration steps.
pub const MIN_STEPS: usize = 10_000;

/// Central-ray screen displacement and transverse velocity change from direct
/// integration of the Lorentz force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub x_c: f64,
    pub delta_v: f64,
}

type State = [f64; 3];

fn rk4<F: Fn(&State) -> State>(y: &State, h: f64, f: &F) -> State {
    let add = |a: &State, b: &State, s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = f(y);
    let k2 = f(&add(y, &k1, h / 2.0));
    let k3 = f(&add(y, &k2, h / 2.0));
    let k4 = f(&add(y, &k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Integrates `m dv/dt = q E + (q/c) v x B` for one ray per slit through the
/// field region, then follows free flight to the screen. Both rays start at
/// the entrance of the field region moving straight at speed `v`; the screen
/// lies a distance `L` beyond the middle of the strip (magnetic) or beyond the
/// particle position at mid-pulse (electric). Returns the midpoint of the two
/// screen displacements.
pub fn trajectory_oracle(s: &SlitSetup, variant: Variant, steps: usize) -> Result<OracleResult> {
    s.validate()?;
    if steps < MIN_STEPS {
        return Err(SemiclassicalError::TooFewSteps { got: steps, min: MIN_STEPS });
    }
    let mut hits = [0.0; 2];
    let mut dv = 0.0;
    for (slot, x0) in hits.iter_mut().zip([-s.d / 2.0, s.d / 2.0]) {
        let (x, vx, vl, l_exit) = match variant {
            Variant::Magnetic => magnetic_ray(s, x0, steps)?,
            Variant::Electric => electric_ray(s, x0, steps)?,
        };
        let half = match variant {
            Variant::Magnetic => s.w / 2.0,
            Variant::Electric => s.v * s.t_pulse / 2.0,
        };
        let screen = s.l + half;
        if l_exit > screen {
            return Err(SemiclassicalError::InvalidSetup {
                name: "l",
                reason: "must exceed half the field region",
            });
        }
        *slot = x + vx * (screen - l_exit) / vl - x0;
        dv = vx;
    }
    Ok(OracleResult {
        x_c: 0.5 * (hits[0] + hits[1]),
        delta_v: dv,
    })
}

/// Crossing the strip with the longitudinal coordinate as integration
/// variable; state `(x, v_x, v_l)`.
fn magnetic_ray(s: &SlitSetup, x0: f64, steps: usize) -> Result<(f64, f64, f64, f64)> {
    let k = s.q * s.b / (s.m * s.con.c);
    // v x B with B out of plane: (dv_l, dv_x)/dt = k (v_x, -v_l)
    let f = |y: &State| [y[1] / y[2], -k, k * y[1] / y[2]];
    let h = s.w / steps as f64;
    let mut y = [x0, 0.0, s.v];
    if s.w > 0.0 {
        for i in 0..steps {
            y = rk4(&y, h, &f);
            check(&y, i)?;
            if y[2] <= 0.0 {
                return Err(SemiclassicalError::TurnedBack(i));
            }
        }
    }
    Ok((y[0], y[1], y[2], s.w))
}

/// Flight during the pulse with time as integration variable; state
/// `(x, v_x, l)`.
fn electric_ray(s: &SlitSetup, x0: f64, steps: usize) -> Result<(f64, f64, f64, f64)> {
    let a = s.q * s.e_field / s.m;
    let f = |y: &State| [y[1], a, s.v];
    let h = s.t_pulse / steps as f64;
    let mut y = [x0, 0.0, 0.0];
    if s.t_pulse > 0.0 {
        for i in 0..steps {
            y = rk4(&y, h, &f);
            check(&y, i)?;
        }
    }
    Ok((y[0], y[1], s.v, y[2]))
}

fn check(y: &State, step: usize) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SemiclassicalError::NonFinite(step));
    }
    Ok(())
}

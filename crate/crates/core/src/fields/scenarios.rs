use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    box_domain, derive_fields, scalar, zero, Connectivity, Constants, Dimension, FieldSet, FieldSource,
    FieldsError, Multiplicities, ObservationRegion, Point, PotentialDerivatives, PotentialSet, Result,
    ScenarioConfig, VanKampenModel,
};
use crate::numerics::{Axis, Kink, KinkSet, QuadratureRule, DEFAULT_GRID_N};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub meaning: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub dim: Dimension,
    pub summary: &'static str,
    /// The relation the scenario exercises.
    pub relation: &'static str,
    pub params: &'static [ParamSpec],
}

const fn p(name: &'static str, default: f64, meaning: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        meaning,
    }
}

const CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "vertical_strip_capacitor",
        dim: Dimension::OneD,
        summary: "static field E0 between plates at x=a and x=b, switched on for all t",
        relation: "1+1D generalized solutions along both spacetime routes; g = 0, g_hat = c E0 (b-a)(t-t0)",
        params: &[
            p("e0", 2.0, "field strength between the plates"),
            p("a", 0.0, "left plate"),
            p("b", 1.0, "right plate"),
            p("mix", 0.5, "share of the field carried by -dA/dt (rest by -grad phi)"),
            p("x0", -1.0, "base point x"),
            p("t0", 0.0, "base point t"),
        ],
    },
    ScenarioInfo {
        name: "temporal_strip",
        dim: Dimension::OneD,
        summary: "uniform field E0 in all space during 0 <= t <= T",
        relation: "1+1D generalized solutions observed after the pulse; g_hat = 0, g = -c E0 T (x-x0)",
        params: &[
            p("e0", 1.0, "field strength during the pulse"),
            p("duration", 1.0, "pulse length T"),
            p("mix", 0.5, "share of the field carried by -dA/dt"),
            p("x0", -1.0, "base point x"),
            p("t0", -1.0, "base point t (before the pulse)"),
        ],
    },
    ScenarioInfo {
        name: "triangle_B",
        dim: Dimension::TwoDStatic,
        summary: "uniform B inside an apex-up equilateral triangle of side a, base on the x axis from 0 to a",
        relation: "2D static generalized solutions; closed forms of g(x) and h(y) right of the triangle",
        params: &[
            p("b", 1.0, "field strength inside the triangle"),
            p("a", 2.0, "side length"),
            p("x0", -1.0, "base point x"),
            p("y0", -1.0, "base point y"),
        ],
    },
    ScenarioInfo {
        name: "magnetic_ab_flux_tube",
        dim: Dimension::TwoDStatic,
        summary: "square flux tube of side s centered at the origin carrying flux Phi",
        relation: "2D routes with multiplicities tau = -Phi, chi = Phi; route difference equals the enclosed flux",
        params: &[
            p("flux", 1.0, "total flux Phi"),
            p("side", 1.0, "tube side s"),
            p("x0", -2.0, "base point x"),
            p("y0", -2.0, "base point y"),
        ],
    },
    ScenarioInfo {
        name: "electric_ab_cages",
        dim: Dimension::OneD,
        summary: "potential step V across the gap 0 <= x <= w during 0 <= t <= T, no vector potential",
        relation: "1+1D routes with tau = -chi = -(c times the enclosed electric flux); electric AB phase c V T",
        params: &[
            p("v", 1.0, "potential difference between the cages"),
            p("duration", 1.0, "time T the potential is on"),
            p("gap", 1.0, "gap width w"),
            p("x0", -1.0, "base point x"),
            p("t0", -1.0, "base point t"),
        ],
    },
    ScenarioInfo {
        name: "van_kampen_solenoid",
        dim: Dimension::TwoPlusOne,
        summary: "thin solenoid whose flux ramps from phi0 to phi1 late; the change spreads at speed c",
        relation: "2+1D primary minus dual solution equals the flux at t0 while the loop is outside the light cone",
        params: &[
            p("phi0", 1.0, "flux before the switch"),
            p("phi1", 2.0, "flux after the ramp"),
            p("t_switch", 5.0, "start of the ramp"),
            p("ramp", 1.0, "ramp duration"),
            p("core_radius", 0.04, "solenoid radius"),
            p("shell_width", 0.05, "width of the outgoing compensating shell"),
            p("x0", -10.0, "base point x"),
            p("y0", -10.0, "base point y"),
            p("t0", 0.0, "base point t"),
            p("obs_xy", 10.0, "lower corner of the square observation patch"),
            p("obs_t_lo", 6.0, "first observation time"),
            p("obs_t_hi", 12.0, "last observation time"),
        ],
    },
    ScenarioInfo {
        name: "naive_demo_polynomial",
        dim: Dimension::OneD,
        summary: "A = x t, phi = x^2 t; time-dependent A and space-dependent phi",
        relation: "naive combined line-integral phase fails the gauge equations",
        params: &[
            p("x0", 0.5, "base point x"),
            p("t0", 0.5, "base point t"),
        ],
    },
];

/// Builtin scenarios in a stable order.
pub fn scenario_catalog() -> &'static [ScenarioInfo] {
    CATALOG
}

struct Params<'a> {
    scenario: &'a str,
    values: BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    fn invalid(&self, name: &str, reason: &str) -> FieldsError {
        FieldsError::InvalidParam {
            name: format!("{}.{name}", self.scenario),
            reason: reason.to_string(),
        }
    }

    fn positive(&self, name: &str) -> Result<f64> {
        let v = self.get(name);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(name, "must be positive"))
        }
    }
}

fn resolve<'a>(info: &'a ScenarioInfo, given: &BTreeMap<String, f64>) -> Result<Params<'a>> {
    let mut values: BTreeMap<String, f64> = info
        .params
        .iter()
        .map(|s| (s.name.to_string(), s.default))
        .collect();
    for (k, v) in given {
        if !values.contains_key(k) {
            return Err(FieldsError::UnknownParam {
                scenario: info.name.to_string(),
                name: k.clone(),
            });
        }
        if !v.is_finite() {
            return Err(FieldsError::InvalidParam {
                name: format!("{}.{k}", info.name),
                reason: "must be finite".to_string(),
            });
        }
        values.insert(k.clone(), *v);
    }
    Ok(Params {
        scenario: info.name,
        values,
    })
}

/// Builds a builtin scenario. Parameters not given take their catalog
/// defaults; unknown or invalid parameters are rejected.
pub fn builtin_config(name: &str, params: &BTreeMap<String, f64>, con: &Constants) -> Result<ScenarioConfig> {
    con.validate()?;
    let info = CATALOG
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| FieldsError::UnknownScenario(name.to_string()))?;
    let ps = resolve(info, params)?;
    match name {
        "vertical_strip_capacitor" => capacitor(&ps, con),
        "temporal_strip" => temporal_strip(&ps, con),
        "triangle_B" => triangle(&ps, con),
        "magnetic_ab_flux_tube" => flux_tube(&ps, con),
        "electric_ab_cages" => cages(&ps, con),
        "van_kampen_solenoid" => van_kampen(&ps, con),
        "naive_demo_polynomial" => naive_demo(&ps, con),
        _ => unreachable!("catalog and dispatch disagree"),
    }
}

fn ind(lo: f64, hi: f64, v: f64) -> f64 {
    if v >= lo && v <= hi {
        1.0
    } else {
        0.0
    }
}

const EXACT_LINE: QuadratureRule = QuadratureRule::new(0.5, 5);
const EXACT_AREA: QuadratureRule = QuadratureRule::new(0.5, 5);

#[allow(clippy::too_many_arguments)]
fn assemble(
    ps: &Params<'_>,
    con: &Constants,
    potentials: PotentialSet,
    fields: Option<FieldSet>,
    connectivity: Connectivity,
    multiplicities: Option<Multiplicities>,
    base: Point,
    observation: ObservationRegion,
) -> Result<ScenarioConfig> {
    let fields = match fields {
        Some(f) => f,
        None => derive_fields(&potentials, con)?,
    };
    Ok(ScenarioConfig {
        name: ps.scenario.to_string(),
        params: ps.values.clone(),
        constants: *con,
        potentials,
        fields,
        connectivity,
        multiplicities,
        base,
        lambda0: 0.0,
        observation,
        line_rule: EXACT_LINE,
        area_rule: EXACT_AREA,
        van_kampen: None,
    })
}

fn region(axes: &[(Axis, f64, f64)], description: String) -> Result<ObservationRegion> {
    Ok(ObservationRegion {
        domain: box_domain(axes, DEFAULT_GRID_N)?,
        mask: None,
        description,
    })
}

fn capacitor(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let (e0, a, b, mix) = (ps.get("e0"), ps.get("a"), ps.get("b"), ps.get("mix"));
    if a >= b {
        return Err(ps.invalid("a", "left plate must lie below right plate b"));
    }
    if !(0.0..=1.0).contains(&mix) {
        return Err(ps.invalid("mix", "must lie in [0, 1]"));
    }
    let c = con.c;
    let (x0, t0) = (ps.get("x0"), ps.get("t0"));
    let a_x = scalar(move |x, _, t| -c * mix * e0 * t * ind(a, b, x));
    let phi = scalar(move |x, _, _| -(1.0 - mix) * e0 * (x.clamp(a, b) - a));
    let d = PotentialDerivatives {
        dax_dt: scalar(move |x, _, _| -c * mix * e0 * ind(a, b, x)),
        dphi_dx: scalar(move |x, _, _| -(1.0 - mix) * e0 * ind(a, b, x)),
        ..Default::default()
    };
    let kinks = KinkSet::new().plane(Axis::X, a).plane(Axis::X, b);
    let pot = PotentialSet::new(Dimension::OneD, a_x, zero(), phi)
        .with_derivatives(d)
        .with_kinks(kinks);
    let obs = region(
        &[(Axis::X, b + 0.5, b + 3.0), (Axis::T, t0 - 1.0, t0 + 4.0)],
        "right of the plates, all times".to_string(),
    )?;
    assemble(ps, con, pot, None, Connectivity::Simple, None, Point::new(x0, 0.0, t0), obs)
}

fn temporal_strip(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let (e0, mix) = (ps.get("e0"), ps.get("mix"));
    let dur = ps.positive("duration")?;
    if !(0.0..=1.0).contains(&mix) {
        return Err(ps.invalid("mix", "must lie in [0, 1]"));
    }
    let (x0, t0) = (ps.get("x0"), ps.get("t0"));
    if t0 >= 0.0 {
        return Err(ps.invalid("t0", "base time must precede the pulse at t = 0"));
    }
    let c = con.c;
    let a_x = scalar(move |_, _, t| -c * mix * e0 * t.clamp(0.0, dur));
    let phi = scalar(move |x, _, t| -(1.0 - mix) * e0 * x * ind(0.0, dur, t));
    let d = PotentialDerivatives {
        dax_dt: scalar(move |_, _, t| -c * mix * e0 * ind(0.0, dur, t)),
        dphi_dx: scalar(move |_, _, t| -(1.0 - mix) * e0 * ind(0.0, dur, t)),
        ..Default::default()
    };
    let kinks = KinkSet::new().plane(Axis::T, 0.0).plane(Axis::T, dur);
    let pot = PotentialSet::new(Dimension::OneD, a_x, zero(), phi)
        .with_derivatives(d)
        .with_kinks(kinks);
    let obs = region(
        &[(Axis::X, x0 - 1.0, x0 + 4.0), (Axis::T, dur + 0.25, dur + 3.0)],
        "all x, after the pulse".to_string(),
    )?;
    assemble(ps, con, pot, None, Connectivity::Simple, None, Point::new(x0, 0.0, t0), obs)
}

fn cages(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let v = ps.get("v");
    let dur = ps.positive("duration")?;
    let gap = ps.positive("gap")?;
    let (x0, t0) = (ps.get("x0"), ps.get("t0"));
    if x0 >= 0.0 || t0 >= 0.0 {
        return Err(ps.invalid("x0", "base point must lie left of the gap and before the pulse"));
    }
    let c = con.c;
    let phi = scalar(move |x, _, t| v * x.clamp(0.0, gap) * ind(0.0, dur, t));
    let d = PotentialDerivatives {
        dphi_dx: scalar(move |x, _, t| v * ind(0.0, gap, x) * ind(0.0, dur, t)),
        ..Default::default()
    };
    let kinks = KinkSet::new()
        .plane(Axis::X, 0.0)
        .plane(Axis::X, gap)
        .plane(Axis::T, 0.0)
        .plane(Axis::T, dur);
    let pot = PotentialSet::new(Dimension::OneD, zero(), zero(), phi)
        .with_derivatives(d)
        .with_kinks(kinks);
    // c times the electric flux through any observation rectangle is -c V T
    let tau = c * v * dur;
    let mult = Multiplicities {
        tau,
        chi: -tau,
        f: 0.0,
    };
    let obs = region(
        &[(Axis::X, gap + 0.5, gap + 2.0), (Axis::T, dur + 0.5, dur + 3.0)],
        "right of the gap, after the pulse".to_string(),
    )?;
    assemble(ps, con, pot, None, Connectivity::Multiple, Some(mult), Point::new(x0, 0.0, t0), obs)
}

fn naive_demo(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let (x0, t0) = (ps.get("x0"), ps.get("t0"));
    let a_x = scalar(|x, _, t| x * t);
    let phi = scalar(|x, _, t| x * x * t);
    let d = PotentialDerivatives {
        dax_dt: scalar(|x, _, _| x),
        dphi_dx: scalar(|x, _, t| 2.0 * x * t),
        ..Default::default()
    };
    let pot = PotentialSet::new(Dimension::OneD, a_x, zero(), phi).with_derivatives(d);
    let obs = region(
        &[(Axis::X, 1.0, 3.0), (Axis::T, 1.0, 3.0)],
        "generic points away from the base".to_string(),
    )?;
    assemble(ps, con, pot, None, Connectivity::Simple, None, Point::new(x0, 0.0, t0), obs)
}

fn triangle(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let bf = ps.get("b");
    let a = ps.positive("a")?;
    let (x0, y0) = (ps.get("x0"), ps.get("y0"));
    if x0 >= 0.0 || y0 >= 0.0 {
        return Err(ps.invalid("x0", "base point must lie to the lower left of the triangle"));
    }
    let s3 = 3f64.sqrt();
    let apex = s3 * a / 2.0;
    // A_y is B times the chord of the triangle left of x at height y
    let a_y = scalar(move |x, y, _| {
        if (0.0..=apex).contains(&y) {
            bf * (x - y / s3).clamp(0.0, a - 2.0 * y / s3)
        } else {
            0.0
        }
    });
    let inside = move |x: f64, y: f64| (0.0..=apex).contains(&y) && x >= y / s3 && x <= a - y / s3;
    let d = PotentialDerivatives {
        day_dx: scalar(move |x, y, _| if inside(x, y) { bf } else { 0.0 }),
        ..Default::default()
    };
    let seg = |p: (f64, f64), q: (f64, f64)| Kink::Segment {
        plane: (Axis::X, Axis::Y),
        p,
        q,
    };
    let kinks = KinkSet::new()
        .plane(Axis::Y, 0.0)
        .plane(Axis::Y, apex)
        .with(seg((0.0, 0.0), (a / 2.0, apex)))
        .with(seg((a, 0.0), (a / 2.0, apex)));
    let pot = PotentialSet::new(Dimension::TwoDStatic, zero(), a_y, zero())
        .with_derivatives(d)
        .with_kinks(kinks);
    let mut obs = region(
        &[(Axis::X, a / 2.0, a), (Axis::Y, 0.0, apex)],
        "right of the right edge, below the apex".to_string(),
    )?;
    let slack = 1e-12 * (1.0 + a);
    obs.mask = Some(Arc::new(move |x, y, _| y >= s3 * (a - x) - slack));
    assemble(ps, con, pot, None, Connectivity::Simple, None, Point::new(x0, y0, 0.0), obs)
}

fn flux_tube(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let flux = ps.get("flux");
    let side = ps.positive("side")?;
    let (x0, y0) = (ps.get("x0"), ps.get("y0"));
    let lo = -side / 2.0;
    let hi = side / 2.0;
    if x0 >= lo || y0 >= lo {
        return Err(ps.invalid("x0", "base point must lie to the lower left of the tube"));
    }
    let bf = flux / (side * side);
    let a_y = scalar(move |x, y, _| bf * (x - lo).clamp(0.0, side) * ind(lo, hi, y));
    let d = PotentialDerivatives {
        day_dx: scalar(move |x, y, _| bf * ind(lo, hi, x) * ind(lo, hi, y)),
        ..Default::default()
    };
    let kinks = KinkSet::new()
        .plane(Axis::X, lo)
        .plane(Axis::X, hi)
        .plane(Axis::Y, lo)
        .plane(Axis::Y, hi);
    let pot = PotentialSet::new(Dimension::TwoDStatic, zero(), a_y, zero())
        .with_derivatives(d)
        .with_kinks(kinks);
    let mult = Multiplicities {
        tau: -flux,
        chi: flux,
        f: 0.0,
    };
    let obs = region(
        &[(Axis::X, hi + 1.0, hi + 2.5), (Axis::Y, hi + 1.0, hi + 2.5)],
        "upper right of the tube; every circuit encloses it".to_string(),
    )?;
    assemble(ps, con, pot, None, Connectivity::Multiple, Some(mult), Point::new(x0, y0, 0.0), obs)
}

fn van_kampen(ps: &Params<'_>, con: &Constants) -> Result<ScenarioConfig> {
    let m = VanKampenModel::new(
        ps.get("phi0"),
        ps.get("phi1"),
        ps.get("t_switch"),
        ps.get("ramp"),
        ps.get("core_radius"),
        ps.get("shell_width"),
        con.c,
    )?;
    let base = Point::new(ps.get("x0"), ps.get("y0"), ps.get("t0"));
    let (o, t_lo, t_hi) = (ps.get("obs_xy"), ps.get("obs_t_lo"), ps.get("obs_t_hi"));
    if base.t >= m.t_switch {
        return Err(ps.invalid("t0", "base time must precede the switch"));
    }
    if t_lo >= t_hi {
        return Err(ps.invalid("obs_t_lo", "must be below obs_t_hi"));
    }
    let pot = PotentialSet::new(
        Dimension::TwoPlusOne,
        scalar(move |x, y, t| m.a_xy(x, y, t).0),
        scalar(move |x, y, t| m.a_xy(x, y, t).1),
        zero(),
    )
    .with_kinks(m.kinks());
    let fields = FieldSet {
        e_x: scalar(move |x, y, t| m.e_xy(x, y, t).0),
        e_y: scalar(move |x, y, t| m.e_xy(x, y, t).1),
        b: scalar(move |x, y, t| m.b(x.hypot(y), t)),
        kinks: m.kinks(),
        domain: None,
        source: FieldSource::Model,
    };
    let mult = Multiplicities {
        tau: 0.0,
        chi: 0.0,
        f: m.flux(base.t),
    };
    let obs = region(
        &[(Axis::X, o, o + 1.0), (Axis::Y, o, o + 1.0), (Axis::T, t_lo, t_hi)],
        "square patch far from the solenoid".to_string(),
    )?;
    let mut cfg = assemble(ps, con, pot, Some(fields), Connectivity::Multiple, Some(mult), base, obs)?;
    cfg.line_rule = QuadratureRule::new(0.05, 17);
    cfg.area_rule = QuadratureRule::new(0.1, 33);
    cfg.van_kampen = Some(m);
    Ok(cfg)
}

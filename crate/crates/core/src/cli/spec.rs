use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

use super::CliError;
use crate::fields::{builtin_config, Constants, ScenarioConfig};
use crate::gauge_solver::{Problem, Route};
use crate::numerics::DEFAULT_GRID_N;
use crate::semiclassical::{SlitSetup, MIN_STEPS};

/// Environment variable that overrides the default grid resolution.
pub const GRID_ENV: &str = "GAUGELAB_DEFAULT_GRID";

/// Default points per axis for grids with a time axis and two space axes.
pub const DEFAULT_SPACETIME_GRID_N: usize = 9;

/// A run description, read from TOML.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub scenario: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub constants: ConstantsSpec,
    #[serde(default)]
    pub grid: GridSpec,
    /// Route tags; defaults to the scenario's two generalized routes.
    pub routes: Option<Vec<String>>,
    /// Residual and route-agreement tolerance.
    pub tolerance: Option<f64>,
    /// Points whose solution constituents are listed in the report.
    #[serde(default)]
    pub probes: Vec<[f64; 3]>,
    #[serde(default)]
    pub output: OutputSpec,
    pub semiclassical: Option<SemiclassicalSpec>,
    pub van_kampen: Option<VanKampenSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub c: Option<f64>,
    pub hbar: Option<f64>,
    /// Planck's constant; sets `hbar = h / 2 pi`. Exclusive with `hbar`.
    pub h: Option<f64>,
    pub q: Option<f64>,
    pub e: Option<f64>,
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Points per axis for one- and two-axis grids.
    pub n: Option<usize>,
    /// Points per axis for three-axis grids.
    pub n_spacetime: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiclassicalSpec {
    pub l: f64,
    pub d: f64,
    pub m: f64,
    pub v: f64,
    /// Defaults to the run's charge constant.
    pub q: Option<f64>,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(default)]
    pub e_field: f64,
    #[serde(default)]
    pub t_pulse: f64,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VanKampenSpec {
    pub loop_radius: Option<f64>,
    pub t_obs: Option<Vec<f64>>,
    pub faraday_radii: Option<Vec<f64>>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub tolerance: Option<f64>,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// A validated spec, ready to run.
#[derive(Clone)]
pub struct RunPlan {
    pub spec: SpecFile,
    pub config: ScenarioConfig,
    pub routes: Vec<Route>,
    pub grid_n: usize,
    pub tolerance: f64,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Double-slit setup and oracle step count.
    pub slit: Option<(SlitSetup, usize)>,
}

impl SemiclassicalSpec {
    pub fn setup(&self, con: &Constants) -> Result<(SlitSetup, usize), CliError> {
        let steps = self.steps.unwrap_or(MIN_STEPS);
        if steps < MIN_STEPS {
            return Err(CliError::Parse(format!("semiclassical: steps must be at least {MIN_STEPS}")));
        }
        let s = SlitSetup::new(*con, self.l, self.d, self.m, self.v, self.q.unwrap_or(con.q))
            .and_then(|s| s.with_magnetic(self.b, self.w))
            .and_then(|s| s.with_electric(self.e_field, self.t_pulse))
            .map_err(|e| CliError::Parse(format!("semiclassical: {e}")))?;
        Ok((s, steps))
    }
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn constants(&self) -> Result<Constants, CliError> {
        let s = &self.constants;
        let d = Constants::default();
        if s.h.is_some() && s.hbar.is_some() {
            return Err(CliError::Parse("constants: give either h or hbar, not both".to_string()));
        }
        let con = Constants::new(
            s.c.unwrap_or(d.c),
            s.hbar.unwrap_or(d.hbar),
            s.q.unwrap_or(d.q),
            s.e.unwrap_or(d.e),
            s.m.unwrap_or(d.m),
        );
        let con = match s.h {
            Some(h) => con.and_then(|c| c.with_h(h)),
            None => con,
        };
        con.map_err(|e| CliError::Parse(format!("constants: {e}")))
    }

    /// Validates the spec against the scenario library and resolves every
    /// setting, flags first, then the file, then the environment.
    pub fn plan(self, ov: &Overrides, env_grid: Option<&str>) -> Result<RunPlan, CliError> {
        let con = self.constants()?;
        let config = builtin_config(&self.scenario, &self.params, &con)
            .map_err(|e| CliError::Parse(format!("scenario: {e}")))?;
        let routes = match &self.routes {
            None => Route::generalized(config.dim()).to_vec(),
            Some(tags) => tags
                .iter()
                .map(|t| t.parse::<Route>().map_err(|e| CliError::Parse(format!("routes: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if routes.is_empty() {
            return Err(CliError::Parse("routes: at least one route is required".to_string()));
        }
        for (i, r) in routes.iter().enumerate() {
            if routes[..i].contains(r) {
                return Err(CliError::Parse(format!("routes: {r} listed twice")));
            }
        }
        let problem = Problem::from_config(&config);
        for r in &routes {
            problem.require(*r).map_err(|e| CliError::Parse(format!("routes: {e}")))?;
        }
        let three_axes = config.observation.domain.axes().len() == 3;
        let grid_n = if three_axes {
            match ov.grid_n.or(self.grid.n_spacetime) {
                Some(n) => n,
                None => DEFAULT_SPACETIME_GRID_N,
            }
        } else {
            resolve_grid(ov.grid_n, self.grid.n, env_grid)?
        };
        if grid_n < 3 {
            return Err(CliError::Usage(format!("grid needs at least 3 points per axis, got {grid_n}")));
        }
        let tolerance = ov.tolerance.or(self.tolerance).unwrap_or(1e-5);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tolerance}")));
        }
        let slit = match &self.semiclassical {
            Some(sc) => Some(sc.setup(&con)?),
            None => None,
        };
        if self.van_kampen.is_some() && config.van_kampen.is_none() {
            return Err(CliError::Parse(format!(
                "van_kampen section given for scenario `{}`",
                self.scenario
            )));
        }
        Ok(RunPlan {
            csv: ov.csv.clone().or_else(|| self.output.csv.clone()),
            report: ov.report.clone().or_else(|| self.output.report.clone()),
            spec: self,
            config,
            routes,
            grid_n,
            tolerance,
            slit,
        })
    }
}

/// Grid points per axis: flag, then file, then environment, then the
/// built-in default.
pub fn resolve_grid(flag: Option<usize>, file: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    if let Some(n) = flag.or(file) {
        return Ok(n);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{GRID_ENV} must be a positive integer, got `{v}`"))),
        None => Ok(DEFAULT_GRID_N),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_precedence() {
        assert_eq!(resolve_grid(Some(5), Some(7), Some("9")).unwrap(), 5);
        assert_eq!(resolve_grid(None, Some(7), Some("9")).unwrap(), 7);
        assert_eq!(resolve_grid(None, None, Some(" 9 ")).unwrap(), 9);
        assert_eq!(resolve_grid(None, None, None).unwrap(), DEFAULT_GRID_N);
        assert!(matches!(resolve_grid(None, None, Some("x")), Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = SpecFile::parse("scenario = \"triangle_B\"\ncolour = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
        let err = SpecFile::parse("scenario = \"triangle_B\"\n[grid]\nm = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = SpecFile::parse("scenario = \"triangle_B\"\ntolerance = = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn invalid_scenario_params_fail_at_plan() {
        let spec = SpecFile::parse("scenario = \"vertical_strip_capacitor\"\n[params]\na = 2.0\nb = 1.0\n").unwrap();
        assert!(matches!(spec.plan(&Overrides::default(), None), Err(CliError::Parse(_))));
    }

    #[test]
    fn plan_resolves_defaults_and_overrides() {
        let spec = SpecFile::parse("scenario = \"triangle_B\"\ntolerance = 1e-4\n[grid]\nn = 31\n").unwrap();
        let plan = spec.clone().plan(&Overrides::default(), Some("11")).unwrap();
        assert_eq!(plan.grid_n, 31);
        assert_eq!(plan.tolerance, 1e-4);
        assert_eq!(plan.routes, vec![Route::TwoDRoute1, Route::TwoDRoute2]);
        let ov = Overrides { grid_n: Some(21), tolerance: Some(1e-3), ..Default::default() };
        let plan = spec.plan(&ov, None).unwrap();
        assert_eq!((plan.grid_n, plan.tolerance), (21, 1e-3));
    }

    #[test]
    fn planck_constant_sets_hbar() {
        let spec = SpecFile::parse("scenario = \"triangle_B\"\n[constants]\nh = 1.0\n").unwrap();
        let con = spec.constants().unwrap();
        assert!((con.flux_quantum() - 1.0).abs() < 1e-15);
        let both = SpecFile::parse("scenario = \"triangle_B\"\n[constants]\nh = 1.0\nhbar = 1.0\n").unwrap();
        assert!(both.constants().is_err());
    }
}

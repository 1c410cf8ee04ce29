//! Run configuration: a JSON file merged with command-line overrides.
//!
//! Physical inputs use engineering units (dBm, mW, metres); everything is
//! converted to SI once here.

use std::fs;
use std::path::Path;

use noma_eh::model::dbm_to_watts;
use noma_eh::{DynamicSearch, GridSpec, PowerModel, Scheme, SolverOptions, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

const DEFAULT_PMAX_W: f64 = 40.0;
const DEFAULT_SIGMA2_DBM: f64 = -104.0;
const DEFAULT_XI: f64 = 0.5;
const DEFAULT_PSIC_MW: f64 = 80.0;
const DEFAULT_OMEGA: f64 = 0.044;
const DEFAULT_PR_MW: f64 = 30.0;
const DEFAULT_BANDWIDTH_HZ: f64 = 1e7;
const DEFAULT_POINTS: usize = 200;

/// Contents of a config file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scheme: Option<String>,
    #[serde(alias = "model")]
    pub power_model: Option<String>,
    pub pmax_w: Option<f64>,
    pub sigma2_dbm: Option<f64>,
    pub xi: Option<f64>,
    pub psic_mw: Option<f64>,
    pub omega: Option<f64>,
    pub pr_mw: Option<f64>,
    pub d1_m: Option<f64>,
    pub d2_m: Option<f64>,
    pub h1_sq: Option<f64>,
    pub h2_sq: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub points: Option<usize>,
    pub dt: Option<f64>,
    pub drho: Option<f64>,
    pub dp_db: Option<f64>,
    pub eps: Option<f64>,
    /// `exhaustive` (default) or `suboptimal`; dynamic model only.
    pub search: Option<String>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub power_model: Option<String>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Const,
    Dyn,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Const => "const",
            ModelKind::Dyn => "dyn",
        }
    }
}

fn parse_model(s: &str) -> Result<ModelKind, CliError> {
    match s {
        "const" => Ok(ModelKind::Const),
        "dyn" => Ok(ModelKind::Dyn),
        other => Err(CliError::Config(format!(
            "unknown power model `{other}` (expected const or dyn)"
        ))),
    }
}

fn parse_search(s: &str) -> Result<DynamicSearch, CliError> {
    match s {
        "exhaustive" => Ok(DynamicSearch::Exhaustive),
        "suboptimal" => Ok(DynamicSearch::Suboptimal),
        other => Err(CliError::Config(format!(
            "unknown search `{other}` (expected exhaustive or suboptimal)"
        ))),
    }
}

fn search_name(s: DynamicSearch) -> &'static str {
    match s {
        DynamicSearch::Exhaustive => "exhaustive",
        DynamicSearch::Suboptimal => "suboptimal",
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "`{name}` must be positive, got {v}"
        )))
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub model_kind: ModelKind,
    pub params: SystemParams,
    pub model: PowerModel,
    pub distances: Option<(f64, f64)>,
    pub bandwidth_hz: f64,
    pub points: usize,
    pub opts: SolverOptions,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        Self::resolve(ConfigFile::read(path)?, overrides)
    }

    pub fn resolve(file: ConfigFile, overrides: &Overrides) -> Result<Self, CliError> {
        let scheme_name = overrides
            .scheme
            .clone()
            .or(file.scheme)
            .ok_or_else(|| CliError::Config("no scheme given (ts, ps, gen or tdma)".into()))?;
        let scheme: Scheme = scheme_name
            .parse()
            .map_err(|e: noma_eh::Error| CliError::Config(e.to_string()))?;
        let model_name = overrides
            .power_model
            .clone()
            .or(file.power_model)
            .ok_or_else(|| CliError::Config("no power model given (const or dyn)".into()))?;
        let model_kind = parse_model(&model_name)?;

        let p_max = positive("pmax_w", file.pmax_w.unwrap_or(DEFAULT_PMAX_W))?;
        let sigma2 = dbm_to_watts(file.sigma2_dbm.unwrap_or(DEFAULT_SIGMA2_DBM));
        let xi = file.xi.unwrap_or(DEFAULT_XI);

        let core = |e: noma_eh::Error| CliError::Config(e.to_string());
        // Explicit gains take precedence over distances.
        let (params, distances) = match (file.h1_sq, file.h2_sq, file.d1_m, file.d2_m) {
            (Some(h1), Some(h2), _, _) => (
                SystemParams::new(h1, h2, sigma2, p_max, xi).map_err(core)?,
                None,
            ),
            (None, None, Some(d1), Some(d2)) => (
                SystemParams::from_distances(d1, d2, sigma2, p_max, xi).map_err(core)?,
                Some((d1, d2)),
            ),
            _ => {
                return Err(CliError::Config(
                    "give either both distances (d1_m, d2_m) or both gains (h1_sq, h2_sq)".into(),
                ))
            }
        };

        let model = match model_kind {
            ModelKind::Const => {
                PowerModel::constant(file.psic_mw.unwrap_or(DEFAULT_PSIC_MW) * 1e-3)
                    .map_err(core)?
            }
            ModelKind::Dyn => PowerModel::dynamic(
                file.omega.unwrap_or(DEFAULT_OMEGA),
                file.pr_mw.unwrap_or(DEFAULT_PR_MW) * 1e-3,
            )
            .map_err(core)?,
        };

        let defaults = GridSpec::default();
        let grid = GridSpec::new(
            file.dt.unwrap_or(defaults.dt),
            file.drho.unwrap_or(defaults.drho),
            file.dp_db.unwrap_or(defaults.dp_db),
        )
        .map_err(core)?;
        let eps = positive("eps", file.eps.unwrap_or(SolverOptions::default().eps))?;
        let search = file
            .search
            .as_deref()
            .map_or(Ok(DynamicSearch::default()), parse_search)?;

        let points = overrides.points.or(file.points).unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(CliError::Config(format!(
                "`points` must be at least 2, got {points}"
            )));
        }
        let bandwidth_hz = positive(
            "bandwidth_hz",
            file.bandwidth_hz.unwrap_or(DEFAULT_BANDWIDTH_HZ),
        )?;

        Ok(Self {
            scheme,
            model_kind,
            params,
            model,
            distances,
            bandwidth_hz,
            points,
            opts: SolverOptions { eps, grid, search },
        })
    }

    /// Conversion factor from bits/s/Hz to Mbit/s.
    pub fn mbps_per_unit(&self) -> f64 {
        self.bandwidth_hz / 1e6
    }

    pub fn echo(&self) -> ParamsEcho {
        let (p_sic_w, omega, p_r_w) = match self.model {
            PowerModel::Constant { p_sic } => (Some(p_sic), None, None),
            PowerModel::Dynamic(dm) => (None, Some(dm.omega), Some(dm.p_r)),
        };
        let p = &self.params;
        ParamsEcho {
            model: self.model_kind.as_str().to_string(),
            d1_m: self.distances.map(|d| d.0),
            d2_m: self.distances.map(|d| d.1),
            h1_sq: p.h1_sq,
            h2_sq: p.h2_sq,
            sigma2_w: p.sigma2,
            p_max_w: p.p_max,
            xi: p.xi,
            p_sic_w,
            omega,
            p_r_w,
            bandwidth_hz: self.bandwidth_hz,
            dt: self.opts.grid.dt,
            drho: self.opts.grid.drho,
            dp_db: self.opts.grid.dp_db,
            eps: self.opts.eps,
            search: search_name(self.opts.search).to_string(),
        }
    }
}

/// Resolved parameters in SI units, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsEcho {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_m: Option<f64>,
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub sigma2_w: f64,
    pub p_max_w: f64,
    pub xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sic_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_r_w: Option<f64>,
    pub bandwidth_hz: f64,
    pub dt: f64,
    pub drho: f64,
    pub dp_db: f64,
    pub eps: f64,
    pub search: String,
}

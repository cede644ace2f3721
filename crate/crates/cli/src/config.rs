//! Scenario configuration: JSON schema, validation, and wavepacket
//! construction (including tabulated CSV ingestion).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use toa_core::{MomentumGrid, MomentumWavefunction, QuadratureMethod, Sector, TimeGrid};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mass: f64,
    pub wavepacket: WavepacketSpec,
    pub momentum_grid: MomentumGridSpec,
    pub time_grid: TimeGridSpec,
    pub arrival_positions: Vec<f64>,
    pub methods: Vec<Method>,
    pub quadrature: Quadrature,
    pub output_dir: PathBuf,
    /// Optional phase rotation of one momentum sector after lifting;
    /// sector-diagonal outputs must not change under it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_phase: Option<SectorPhaseSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WavepacketSpec {
    Gaussian { p0: f64, sigma_p: f64, x_c: f64 },
    TabulatedFile { path: PathBuf },
    Superposition { components: Vec<ComponentSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    /// [re, im]
    pub weight: [f64; 2],
    pub wavepacket: WavepacketSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumGridSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Relational,
    Flux,
    Semiclassical,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Relational => "relational",
            Method::Flux => "flux",
            Method::Semiclassical => "semiclassical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    DirectTrapezoid,
    EnergyTransform,
}

impl From<Quadrature> for QuadratureMethod {
    fn from(q: Quadrature) -> Self {
        match q {
            Quadrature::DirectTrapezoid => QuadratureMethod::DirectTrapezoid,
            Quadrature::EnergyTransform => QuadratureMethod::EnergyTransform,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorPhaseSpec {
    pub sector: SectorSpec,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorSpec {
    Plus,
    Minus,
}

impl From<SectorSpec> for Sector {
    fn from(s: SectorSpec) -> Self {
        match s {
            SectorSpec::Plus => Sector::Plus,
            SectorSpec::Minus => Sector::Minus,
        }
    }
}

/// A configuration failure, reported with the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { field: field.into(), message: message.into() }
}

impl ScenarioConfig {
    /// Parse and validate a config file. Schema violations carry the JSON
    /// field path of the offending key.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(&path.display().to_string(), format!("cannot read: {e}")))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| err(&e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(err("mass", format!("must be > 0, got {}", self.mass)));
        }
        if self.momentum_grid.n_points < MomentumGrid::MIN_POINTS {
            return Err(err(
                "momentum_grid.n_points",
                format!("must be >= {}, got {}", MomentumGrid::MIN_POINTS, self.momentum_grid.n_points),
            ));
        }
        if !(self.momentum_grid.p_min < self.momentum_grid.p_max) {
            return Err(err("momentum_grid", "p_min must be below p_max"));
        }
        if self.time_grid.n_t < 2 {
            return Err(err("time_grid.n_t", "must be >= 2"));
        }
        if !(self.time_grid.t_min < self.time_grid.t_max) {
            return Err(err("time_grid", "t_min must be below t_max"));
        }
        if self.arrival_positions.is_empty() {
            return Err(err("arrival_positions", "must list at least one position"));
        }
        if self.methods.is_empty() {
            return Err(err("methods", "must list at least one method"));
        }
        if self.methods.contains(&Method::Semiclassical)
            && self.arrival_positions.contains(&0.0)
        {
            return Err(err(
                "methods",
                "semiclassical is undefined at arrival position 0; drop the method or the position",
            ));
        }
        validate_wavepacket(&self.wavepacket, "wavepacket")?;
        Ok(())
    }

    pub fn momentum_grid(&self) -> Result<MomentumGrid, ConfigError> {
        MomentumGrid::new(
            self.momentum_grid.p_min,
            self.momentum_grid.p_max,
            self.momentum_grid.n_points,
        )
        .map_err(|e| err("momentum_grid", e.to_string()))
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        TimeGrid::new(self.time_grid.t_min, self.time_grid.t_max, self.time_grid.n_t)
            .map_err(|e| err("time_grid", e.to_string()))
    }

    /// Build the wavepacket; tabulated files resolve relative to
    /// `base_dir` (the config file's directory).
    pub fn build_wavepacket(&self, base_dir: &Path) -> Result<MomentumWavefunction, ConfigError> {
        build_wavepacket(&self.wavepacket, base_dir, "wavepacket")
    }
}

fn validate_wavepacket(spec: &WavepacketSpec, field: &str) -> Result<(), ConfigError> {
    match spec {
        WavepacketSpec::Gaussian { sigma_p, .. } => {
            if !(*sigma_p > 0.0) {
                return Err(err(&format!("{field}.sigma_p"), "must be > 0"));
            }
        }
        WavepacketSpec::TabulatedFile { .. } => {}
        WavepacketSpec::Superposition { components } => {
            if components.is_empty() {
                return Err(err(&format!("{field}.components"), "must be non-empty"));
            }
            for (i, c) in components.iter().enumerate() {
                validate_wavepacket(&c.wavepacket, &format!("{field}.components[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn build_wavepacket(
    spec: &WavepacketSpec,
    base_dir: &Path,
    field: &str,
) -> Result<MomentumWavefunction, ConfigError> {
    match spec {
        WavepacketSpec::Gaussian { p0, sigma_p, x_c } => {
            MomentumWavefunction::gaussian(*p0, *sigma_p, *x_c)
                .map_err(|e| err(field, e.to_string()))
        }
        WavepacketSpec::TabulatedFile { path } => {
            let resolved = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
            read_tabulated_csv(&resolved).map_err(|e| err(&format!("{field}.path"), e))
        }
        WavepacketSpec::Superposition { components } => {
            let mut parts = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                let psi =
                    build_wavepacket(&c.wavepacket, base_dir, &format!("{field}.components[{i}]"))?;
                parts.push((Complex64::new(c.weight[0], c.weight[1]), psi));
            }
            MomentumWavefunction::superpose(parts).map_err(|e| err(field, e.to_string()))
        }
    }
}

/// Read a `p,re,im` CSV into a tabulated wavepacket. The p column must be
/// uniform and strictly increasing with at least 16 rows.
pub fn read_tabulated_csv(path: &Path) -> Result<MomentumWavefunction, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut ps = Vec::new();
    let mut amps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.starts_with("p,") {
            continue; // header
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(format!("line {}: expected `p,re,im`, got {} columns", lineno + 1, cols.len()));
        }
        let parse = |s: &str, name: &str| -> Result<f64, String> {
            s.trim().parse::<f64>().map_err(|e| format!("line {}: bad {name}: {e}", lineno + 1))
        };
        ps.push(parse(cols[0], "p")?);
        amps.push(Complex64::new(parse(cols[1], "re")?, parse(cols[2], "im")?));
    }
    if ps.len() < MomentumGrid::MIN_POINTS {
        return Err(format!("need at least {} rows, got {}", MomentumGrid::MIN_POINTS, ps.len()));
    }
    let n = ps.len();
    let dp = (ps[n - 1] - ps[0]) / (n - 1) as f64;
    if !(dp > 0.0) {
        return Err("p column must be strictly increasing".into());
    }
    for (i, &p) in ps.iter().enumerate() {
        let expected = ps[0] + i as f64 * dp;
        if (p - expected).abs() > 1e-9 * dp.abs().max(1.0) {
            return Err(format!("p column is not uniform at row {} ({p} vs {expected})", i + 1));
        }
    }
    let grid = MomentumGrid::new(ps[0], ps[n - 1], n).map_err(|e| e.to_string())?;
    MomentumWavefunction::tabulated(grid, amps).map_err(|e| e.to_string())
}

/// The canonical demonstration scenario.
pub fn demo_config() -> ScenarioConfig {
    ScenarioConfig {
        mass: 1.0,
        wavepacket: WavepacketSpec::Gaussian { p0: 5.0, sigma_p: 0.5, x_c: 0.0 },
        momentum_grid: MomentumGridSpec { p_min: -5.0, p_max: 15.0, n_points: 4096 },
        time_grid: TimeGridSpec { t_min: 0.0, t_max: 4.0, n_t: 2048 },
        arrival_positions: vec![10.0],
        methods: vec![Method::Relational, Method::Flux, Method::Semiclassical],
        quadrature: Quadrature::DirectTrapezoid,
        output_dir: PathBuf::from("toa_output"),
        sector_phase: None,
    }
}

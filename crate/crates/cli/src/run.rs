//! Orchestration of scenario runs: compute the requested densities for
//! every arrival position, emit one CSV per position plus the sampled
//! wavepacket, and write a JSON manifest with diagnostics.

use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use toa_core::{
    flux_toa, relational_toa, semiclassical_toa, total_variation_distance, MomentumGrid,
    PhysicalState, Sector, TimeGrid, ToaError,
};

use crate::config::{Method, ScenarioConfig};

/// Fixed scientific notation with 12 significant digits; below quadrature
/// error, above noise, and stable across platforms.
pub fn format_value(v: f64) -> String {
    format!("{:.11e}", v)
}

#[derive(Debug)]
pub enum RunError {
    Config(crate::config::ConfigError),
    Resolution(String),
    Compute(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Resolution(m) => write!(f, "resolution guard: {m}"),
            RunError::Compute(m) => write!(f, "computation error: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Compute(_) => 2,
            RunError::Resolution(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn core_err(e: ToaError) -> RunError {
    match e {
        ToaError::Resolution(m) => RunError::Resolution(m),
        other => RunError::Compute(other.to_string()),
    }
}

fn io_err(e: std::io::Error, what: &Path) -> RunError {
    RunError::Io(format!("{}: {e}", what.display()))
}

#[derive(Debug, Serialize)]
pub struct ArrivalDiagnostics {
    pub x0: f64,
    pub file: String,
    pub mass_captured: f64,
    /// Δq·(q_max·|t|_max/m + |x0|), the winding per step; must stay
    /// below π/4 ≈ 0.785.
    pub phase_resolution_margin: f64,
}

#[derive(Debug, Serialize)]
pub struct InvariantSummary {
    pub state_norm_squared: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub renorm_factor: f64,
    pub weights_sum_to_one: bool,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ScenarioConfig,
    pub invariants: InvariantSummary,
    pub arrivals: Vec<ArrivalDiagnostics>,
    pub wavepacket_file: String,
    pub timings_seconds: TimingBlock,
}

#[derive(Debug, Serialize)]
pub struct TimingBlock {
    pub lift: f64,
    pub densities: f64,
    pub total: f64,
}

/// Build the physical state described by a config (lift + optional
/// sector phase).
pub fn build_state(cfg: &ScenarioConfig, base_dir: &Path) -> Result<PhysicalState, RunError> {
    let psi = cfg.build_wavepacket(base_dir)?;
    let grid = cfg.momentum_grid()?;
    let state = PhysicalState::lift(psi, cfg.mass, grid).map_err(core_err)?;
    Ok(match cfg.sector_phase {
        Some(sp) => state.apply_sector_phase(sp.sector.into(), sp.angle),
        None => state,
    })
}

fn phase_margin(state: &PhysicalState, x0: f64, tg: &TimeGrid) -> f64 {
    Sector::BOTH
        .iter()
        .map(|&sec| {
            let axis = state.half_axis(sec);
            if axis.is_empty() {
                0.0
            } else {
                axis.dq * (axis.q_max() * tg.t_abs_max() / state.mass() + x0.abs())
            }
        })
        .fold(0.0, f64::max)
}

pub struct RunOutput {
    pub manifest_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
}

pub fn run_toa(cfg: &ScenarioConfig, base_dir: &Path) -> Result<RunOutput, RunError> {
    let t_start = Instant::now();
    let out_dir = if cfg.output_dir.is_absolute() {
        cfg.output_dir.clone()
    } else {
        base_dir.join(&cfg.output_dir)
    };
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(e, &out_dir))?;

    let t_lift = Instant::now();
    let state = build_state(cfg, base_dir)?;
    let lift_seconds = t_lift.elapsed().as_secs_f64();
    let tg = cfg.time_grid()?;

    let t_dens = Instant::now();
    let mut arrivals = Vec::new();
    let mut csv_paths = Vec::new();
    for (i, &x0) in cfg.arrival_positions.iter().enumerate() {
        let density = relational_toa(&state, x0, &tg, cfg.quadrature.into()).map_err(core_err)?;
        let flux = if cfg.methods.contains(&Method::Flux) {
            Some(flux_toa(&state, x0, &tg).map_err(core_err)?)
        } else {
            None
        };
        let semiclassical = if cfg.methods.contains(&Method::Semiclassical) {
            Some(semiclassical_toa(&state, x0, &tg).map_err(core_err)?)
        } else {
            None
        };

        let file_name = format!("arrival_{i:02}.csv");
        let path = out_dir.join(&file_name);
        let mut header = String::from("t,P_total,P_plus,P_minus");
        if flux.is_some() {
            header.push_str(",flux");
        }
        if semiclassical.is_some() {
            header.push_str(",semiclassical");
        }
        let mut body = String::with_capacity(tg.n_t() * 64);
        body.push_str(&header);
        body.push('\n');
        for j in 0..tg.n_t() {
            body.push_str(&format_value(tg.node(j)));
            body.push(',');
            body.push_str(&format_value(density.total[j]));
            body.push(',');
            body.push_str(&format_value(density.plus[j]));
            body.push(',');
            body.push_str(&format_value(density.minus[j]));
            if let Some(fx) = &flux {
                body.push(',');
                body.push_str(&format_value(fx[j]));
            }
            if let Some(sc) = &semiclassical {
                body.push(',');
                body.push_str(&format_value(sc[j]));
            }
            body.push('\n');
        }
        write_file(&path, body.as_bytes())?;
        arrivals.push(ArrivalDiagnostics {
            x0,
            file: file_name,
            mass_captured: density.mass_captured,
            phase_resolution_margin: phase_margin(&state, x0, &tg),
        });
        csv_paths.push(path);
    }
    let densities_seconds = t_dens.elapsed().as_secs_f64();

    // sampled wavepacket, re-ingestable as a tabulated-file config
    let wavepacket_file = "wavepacket.csv".to_string();
    let wp_path = out_dir.join(&wavepacket_file);
    write_wavepacket_csv(&wp_path, &state)?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        invariants: InvariantSummary {
            state_norm_squared: state.norm_squared(),
            w_plus: state.w_plus(),
            w_minus: state.w_minus(),
            renorm_factor: state.renorm_factor(),
            weights_sum_to_one: (state.norm_squared() - 1.0).abs() < 1e-8,
        },
        arrivals,
        wavepacket_file,
        timings_seconds: TimingBlock {
            lift: lift_seconds,
            densities: densities_seconds,
            total: t_start.elapsed().as_secs_f64(),
        },
    };
    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| RunError::Io(format!("manifest serialization: {e}")))?;
    write_file(&manifest_path, json.as_bytes())?;
    Ok(RunOutput { manifest_path, csv_paths })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(e, path))?;
    f.write_all(bytes).map_err(|e| io_err(e, path))?;
    Ok(())
}

fn write_wavepacket_csv(path: &Path, state: &PhysicalState) -> Result<(), RunError> {
    let grid: &MomentumGrid = state.grid();
    let psi = state.psi0();
    let mut body = String::with_capacity(grid.n_points() * 48);
    body.push_str("p,re,im\n");
    for p in grid.nodes() {
        let v = psi.evaluate(p).map_err(core_err)?;
        body.push_str(&format_value(p));
        body.push(',');
        body.push_str(&format_value(v.re));
        body.push(',');
        body.push_str(&format_value(v.im));
        body.push('\n');
    }
    write_file(path, body.as_bytes())
}

/// Pairwise distances between the requested methods at every arrival
/// position: CSV `method_a,method_b,x0,tv_distance,peak_shift`.
pub fn run_compare(cfg: &ScenarioConfig, base_dir: &Path) -> Result<PathBuf, RunError> {
    if cfg.methods.len() < 2 {
        return Err(RunError::Config(crate::config::ConfigError {
            field: "methods".into(),
            message: "compare needs at least two methods".into(),
        }));
    }
    let out_dir = if cfg.output_dir.is_absolute() {
        cfg.output_dir.clone()
    } else {
        base_dir.join(&cfg.output_dir)
    };
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(e, &out_dir))?;
    let state = build_state(cfg, base_dir)?;
    let tg = cfg.time_grid()?;

    let mut body = String::from("method_a,method_b,x0,tv_distance,peak_shift\n");
    for &x0 in &cfg.arrival_positions {
        let mut curves: Vec<(Method, Vec<f64>)> = Vec::new();
        for &m in &cfg.methods {
            let curve = match m {
                Method::Relational => {
                    relational_toa(&state, x0, &tg, cfg.quadrature.into()).map_err(core_err)?.total
                }
                Method::Flux => flux_toa(&state, x0, &tg).map_err(core_err)?,
                Method::Semiclassical => semiclassical_toa(&state, x0, &tg).map_err(core_err)?,
            };
            curves.push((m, curve));
        }
        let peak = |c: &[f64]| -> f64 {
            let (j, _) = c.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
            tg.node(j)
        };
        for a in 0..curves.len() {
            for b in (a + 1)..curves.len() {
                let tv = total_variation_distance(&curves[a].1, &curves[b].1, tg.dt());
                let shift = peak(&curves[a].1) - peak(&curves[b].1);
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    curves[a].0.label(),
                    curves[b].0.label(),
                    format_value(x0),
                    format_value(tv),
                    format_value(shift),
                ));
            }
        }
    }
    let path = out_dir.join("compare.csv");
    write_file(&path, body.as_bytes())?;
    Ok(path)
}

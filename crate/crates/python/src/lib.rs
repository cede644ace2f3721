//! Python bindings for the arrival-time library: wavepackets, physical
//! states, and the density/comparison operations.

// the #[pymethods] expansion inserts Ok-wrapping conversions clippy
// cannot see through
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use toa_core::{self as core, QuadratureMethod, Sector, TimeGrid, ToaError};

fn err(e: ToaError) -> PyErr {
    match e {
        ToaError::Resolution(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_sector(s: &str) -> PyResult<Sector> {
    match s {
        "plus" | "+" => Ok(Sector::Plus),
        "minus" | "-" => Ok(Sector::Minus),
        other => Err(PyValueError::new_err(format!("unknown sector `{other}` (plus|minus)"))),
    }
}

fn parse_method(s: &str) -> PyResult<QuadratureMethod> {
    s.parse::<QuadratureMethod>().map_err(err)
}

fn time_grid(t_min: f64, t_max: f64, n_t: usize) -> PyResult<TimeGrid> {
    TimeGrid::new(t_min, t_max, n_t).map_err(err)
}

/// A momentum-space wavefunction ψ₀(p).
#[pyclass(frozen)]
#[derive(Clone)]
struct Wavepacket {
    inner: core::MomentumWavefunction,
}

#[pymethods]
impl Wavepacket {
    /// Unit-norm Gaussian with mean momentum p0, spread sigma_p and
    /// spatial center x_c.
    #[staticmethod]
    fn gaussian(p0: f64, sigma_p: f64, x_c: f64) -> PyResult<Self> {
        Ok(Self { inner: core::MomentumWavefunction::gaussian(p0, sigma_p, x_c).map_err(err)? })
    }

    /// Weighted superposition of components: [(weight, wavepacket), ...].
    #[staticmethod]
    fn superpose(components: Vec<(Complex64, Wavepacket)>) -> PyResult<Self> {
        let parts = components.into_iter().map(|(w, p)| (w, p.inner)).collect();
        Ok(Self { inner: core::MomentumWavefunction::superpose(parts).map_err(err)? })
    }

    /// Samples on a uniform grid [p_min, p_max], linearly interpolated.
    #[staticmethod]
    fn tabulated(p_min: f64, p_max: f64, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let grid = core::MomentumGrid::new(p_min, p_max, amplitudes.len()).map_err(err)?;
        Ok(Self { inner: core::MomentumWavefunction::tabulated(grid, amplitudes).map_err(err)? })
    }

    fn evaluate(&self, p: f64) -> PyResult<Complex64> {
        self.inner.evaluate(p).map_err(err)
    }

    fn norm_squared(&self, p_min: f64, p_max: f64, n_points: usize) -> PyResult<f64> {
        let grid = core::MomentumGrid::new(p_min, p_max, n_points).map_err(err)?;
        self.inner.norm_squared(&grid).map_err(err)
    }

    fn translate(&self, x_shift: f64) -> Self {
        Self { inner: self.inner.translate(x_shift) }
    }

    fn time_evolve(&self, dt: f64, mass: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.time_evolve(dt, mass).map_err(err)? })
    }
}

/// A normalized constraint solution with its two momentum-sign sectors.
#[pyclass(frozen)]
#[derive(Clone)]
struct State {
    inner: core::PhysicalState,
}

#[pymethods]
impl State {
    /// Lift an initial wavefunction to a physical state on the given
    /// momentum grid.
    #[staticmethod]
    fn lift(psi: &Wavepacket, mass: f64, p_min: f64, p_max: f64, n_points: usize) -> PyResult<Self> {
        let grid = core::MomentumGrid::new(p_min, p_max, n_points).map_err(err)?;
        Ok(Self { inner: core::PhysicalState::lift(psi.inner.clone(), mass, grid).map_err(err)? })
    }

    #[getter]
    fn w_plus(&self) -> f64 {
        self.inner.w_plus()
    }

    #[getter]
    fn w_minus(&self) -> f64 {
        self.inner.w_minus()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    #[getter]
    fn norm_squared(&self) -> f64 {
        self.inner.norm_squared()
    }

    #[getter]
    fn renorm_factor(&self) -> f64 {
        self.inner.renorm_factor()
    }

    fn sector_project(&self, sector: &str) -> PyResult<Self> {
        Ok(Self { inner: self.inner.sector_project(parse_sector(sector)?) })
    }

    fn apply_sector_phase(&self, sector: &str, angle: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.apply_sector_phase(parse_sector(sector)?, angle) })
    }

    fn inner_product(&self, other: &State) -> PyResult<Complex64> {
        core::physical_inner_product(&self.inner, &other.inner).map_err(err)
    }

    /// Squared norms of the clock state conditioned on position x0, per
    /// sector; they sum to the physical norm.
    fn position_reduce_norms(&self, x0: f64) -> PyResult<(f64, f64)> {
        let plus = core::reduction::position_reduce(&self.inner, x0, Sector::Plus)
            .map_err(err)?
            .norm_squared();
        let minus = core::reduction::position_reduce(&self.inner, x0, Sector::Minus)
            .map_err(err)?
            .norm_squared();
        Ok((plus, minus))
    }
}

/// A sampled arrival-time density.
#[pyclass(frozen)]
struct TimeDensity {
    inner: core::TimeDensity,
}

#[pymethods]
impl TimeDensity {
    fn t(&self) -> Vec<f64> {
        self.inner.tg.nodes().collect()
    }

    fn total(&self) -> Vec<f64> {
        self.inner.total.clone()
    }

    fn plus(&self) -> Vec<f64> {
        self.inner.plus.clone()
    }

    fn minus(&self) -> Vec<f64> {
        self.inner.minus.clone()
    }

    #[getter]
    fn mass_captured(&self) -> f64 {
        self.inner.mass_captured
    }

    fn peak_time(&self) -> f64 {
        self.inner.peak_time()
    }

    /// (mean, variance, mass_captured, reliable)
    fn moments(&self) -> PyResult<(f64, f64, f64, bool)> {
        let m = core::moments(&self.inner).map_err(err)?;
        Ok((m.mean, m.variance, m.mass_captured, m.reliable))
    }
}

/// Relational arrival-time density at x0 over a uniform time grid.
#[pyfunction]
#[pyo3(signature = (state, x0, t_min, t_max, n_t, method = "direct-trapezoid"))]
fn relational_toa(
    state: &State,
    x0: f64,
    t_min: f64,
    t_max: f64,
    n_t: usize,
    method: &str,
) -> PyResult<TimeDensity> {
    let tg = time_grid(t_min, t_max, n_t)?;
    let d = core::relational_toa(&state.inner, x0, &tg, parse_method(method)?).map_err(err)?;
    Ok(TimeDensity { inner: d })
}

/// Probability current at x0 over a uniform time grid (may be negative).
#[pyfunction]
fn flux_toa(state: &State, x0: f64, t_min: f64, t_max: f64, n_t: usize) -> PyResult<Vec<f64>> {
    let tg = time_grid(t_min, t_max, n_t)?;
    core::flux_toa(&state.inner, x0, &tg).map_err(err)
}

/// Classical trajectory-mapped arrival density (zero for t ≤ 0).
#[pyfunction]
fn semiclassical_toa(
    state: &State,
    x0: f64,
    t_min: f64,
    t_max: f64,
    n_t: usize,
) -> PyResult<Vec<f64>> {
    let tg = time_grid(t_min, t_max, n_t)?;
    core::semiclassical_toa(&state.inner, x0, &tg).map_err(err)
}

/// Conditional position density |⟨x|ψ(t)⟩|² on a uniform x grid.
#[pyfunction]
fn position_density(
    state: &State,
    x_min: f64,
    x_max: f64,
    n_x: usize,
    t: f64,
) -> PyResult<Vec<f64>> {
    let xg = core::PositionGrid::new(x_min, x_max, n_x).map_err(err)?;
    core::position_density(&state.inner, &xg, t).map_err(err)
}

/// Run the invariant suite; returns (id, measured, threshold, passed)
/// per check. level is "quick" or "full".
#[pyfunction]
#[pyo3(signature = (level = "quick"))]
fn verify(level: &str) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let lvl = level.parse::<core::VerifyLevel>().map_err(err)?;
    let report = core::run_verify(lvl).map_err(err)?;
    Ok(report
        .checks
        .into_iter()
        .map(|c| (c.id.to_string(), c.measured, c.threshold, c.passed))
        .collect())
}

#[pymodule]
fn toa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Wavepacket>()?;
    m.add_class::<State>()?;
    m.add_class::<TimeDensity>()?;
    m.add_function(wrap_pyfunction!(relational_toa, m)?)?;
    m.add_function(wrap_pyfunction!(flux_toa, m)?)?;
    m.add_function(wrap_pyfunction!(semiclassical_toa, m)?)?;
    m.add_function(wrap_pyfunction!(position_density, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("CLOCK_POVM_NORMALIZATION", core::CLOCK_POVM_NORMALIZATION)?;
    Ok(())
}

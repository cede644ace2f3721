//! The relational arrival-time density and its comparison baselines: the
//! probability current (which may go negative), the classical trajectory
//! mapping of the momentum distribution, and the conditional position
//! density, plus summary statistics and the naive-norm crosscheck.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ToaError};
use crate::grid::{trapezoid, PositionGrid, TimeGrid};
use crate::oscillatory::{toa_amplitude_batch, QuadratureMethod};
use crate::physical_state::{PhysicalState, Sector, CLOCK_POVM_NORMALIZATION};
use crate::reduction::naive_reduce;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// A sampled arrival-time probability density with its per-sector
/// decomposition. Every entry is (1/2π)·|A_σ|² ≥ 0, and the total is the
/// pointwise sum of the sectors: no cross-sector term exists.
#[derive(Debug, Clone)]
pub struct TimeDensity {
    pub tg: TimeGrid,
    pub total: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Trapezoid integral of `total` over the grid. Densities over the
    /// whole real line are reported on finite windows with the captured
    /// mass stated honestly, never silently renormalized.
    pub mass_captured: f64,
}

impl TimeDensity {
    pub fn peak_time(&self) -> f64 {
        let (j, _) = self
            .total
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("time grids are non-empty");
        self.tg.node(j)
    }

    pub fn per_sector(&self, sector: Sector) -> &[f64] {
        match sector {
            Sector::Plus => &self.plus,
            Sector::Minus => &self.minus,
        }
    }
}

/// Probability density for the clock to read t given arrival at x0:
/// P_σ(t) = (1/2π)·|A_σ(t; x0)|², summed over sectors.
pub fn relational_toa(
    s: &PhysicalState,
    x0: f64,
    tg: &TimeGrid,
    method: QuadratureMethod,
) -> Result<TimeDensity> {
    let ap = toa_amplitude_batch(s, Sector::Plus, x0, tg, method)?;
    let am = toa_amplitude_batch(s, Sector::Minus, x0, tg, method)?;
    let plus: Vec<f64> = ap.iter().map(|a| CLOCK_POVM_NORMALIZATION * a.norm_sqr()).collect();
    let minus: Vec<f64> = am.iter().map(|a| CLOCK_POVM_NORMALIZATION * a.norm_sqr()).collect();
    let total: Vec<f64> = plus.iter().zip(minus.iter()).map(|(p, m)| p + m).collect();
    let mass_captured = trapezoid(&total, tg.dt());
    Ok(TimeDensity { tg: *tg, total, plus, minus, mass_captured })
}

fn check_position_resolution(s: &PhysicalState, x_abs_max: f64, t_abs_max: f64) -> Result<()> {
    let grid = s.grid();
    let q_max = grid.p_min().abs().max(grid.p_max().abs());
    let winding = grid.dp() * (x_abs_max + q_max * t_abs_max / s.mass());
    if winding >= std::f64::consts::FRAC_PI_4 {
        return Err(ToaError::Resolution(format!(
            "n_points: dp·(|x|_max + q_max·|t|_max/m) = {winding:.4} >= π/4; the momentum grid \
             cannot support the requested position bandwidth"
        )));
    }
    Ok(())
}

/// ψ(x, t) = (1/√2π) ∫ dp ψ₀(p) e^{i(p x − p² t/(2m))} on the state's grid.
fn wavefunction_at(s: &PhysicalState, x: f64, t: f64) -> Result<Complex64> {
    let grid = s.grid();
    let psi = s.psi0();
    let m = s.mass();
    let dp = grid.dp();
    let n = grid.n_points();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, p) in grid.nodes().enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * psi.evaluate(p)? * cis(p * x - p * p * t / (2.0 * m));
    }
    Ok(acc * dp / (2.0 * std::f64::consts::PI).sqrt())
}

/// Conditional probability density |⟨x|ψ_{S|C}(t)⟩|² over a position grid.
/// Non-negative and unit-mass when the grids cover the state.
pub fn position_density(s: &PhysicalState, xg: &PositionGrid, t: f64) -> Result<Vec<f64>> {
    check_position_resolution(s, xg.x_abs_max(), t.abs())?;
    let xs: Vec<f64> = (0..xg.n_x()).map(|i| xg.node(i)).collect();
    xs.par_iter().map(|&x| Ok(wavefunction_at(s, x, t)?.norm_sqr())).collect()
}

/// Probability current J(x0, t) = (1/m)·Im[ψ*(x0,t)·∂_x ψ(x0,t)] over the
/// time grid. A comparison baseline, not a probability density: it is not
/// guaranteed non-negative (backflow).
pub fn flux_toa(s: &PhysicalState, x0: f64, tg: &TimeGrid) -> Result<Vec<f64>> {
    check_position_resolution(s, x0.abs(), tg.t_abs_max())?;
    let grid = s.grid();
    let psi = s.psi0();
    let m = s.mass();
    let dp = grid.dp();
    let n = grid.n_points();
    // precompute ψ₀(p)·weight and p·ψ₀(p)·weight
    let mut f0 = Vec::with_capacity(n);
    let mut f1 = Vec::with_capacity(n);
    let ps: Vec<f64> = grid.nodes().collect();
    for (k, &p) in ps.iter().enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        let v = w * psi.evaluate(p)? * cis(p * x0);
        f0.push(v);
        f1.push(v * Complex64::new(0.0, p));
    }
    let norm = dp / (2.0 * std::f64::consts::PI).sqrt();
    let ts: Vec<f64> = tg.nodes().collect();
    let out: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let mut a = Complex64::new(0.0, 0.0);
            let mut da = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let phase = cis(-ps[k] * ps[k] * t / (2.0 * m));
                a += f0[k] * phase;
                da += f1[k] * phase;
            }
            (a.conj() * da).im * norm * norm / m
        })
        .collect();
    Ok(out)
}

/// Classical trajectory weighting of the momentum distribution: particles
/// leave the packet center with p drawn from |ψ₀|² and arrive at time
/// t = m·x0/p, giving P_sc(t) = (m|x0|/t²)·|ψ₀(m x0/t)|² for t > 0 and
/// zero otherwise. Undefined at x0 = 0 where the arrival map degenerates.
pub fn semiclassical_toa(s: &PhysicalState, x0: f64, tg: &TimeGrid) -> Result<Vec<f64>> {
    if x0 == 0.0 {
        return Err(ToaError::Undefined(
            "semiclassical arrival density is undefined at x0 = 0".into(),
        ));
    }
    let m = s.mass();
    let grid = s.grid();
    let psi = s.psi0();
    let mut out = Vec::with_capacity(tg.n_t());
    for t in tg.nodes() {
        if t <= 0.0 {
            out.push(0.0);
            continue;
        }
        let p_cl = m * x0 / t;
        // momenta beyond the grid lie outside the state's support
        if !grid.contains(p_cl) {
            out.push(0.0);
            continue;
        }
        let dens = psi.evaluate(p_cl)?.norm_sqr();
        out.push(m * x0.abs() / (t * t) * dens);
    }
    Ok(out)
}

/// Summary statistics of a sampled time density.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub mass_captured: f64,
    /// False when the captured mass is below 0.99: the estimates are then
    /// window-limited rather than state-limited.
    pub reliable: bool,
}

pub fn moments(d: &TimeDensity) -> Result<Moments> {
    if d.mass_captured <= 0.0 {
        return Err(ToaError::Undefined("moments of a zero-mass density".into()));
    }
    let dt = d.tg.dt();
    let weighted: Vec<f64> =
        d.total.iter().enumerate().map(|(j, &p)| p * d.tg.node(j)).collect();
    let mean = trapezoid(&weighted, dt) / d.mass_captured;
    let centered: Vec<f64> = d
        .total
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let dtc = d.tg.node(j) - mean;
            p * dtc * dtc
        })
        .collect();
    let variance = trapezoid(&centered, dt) / d.mass_captured;
    Ok(Moments { mean, variance, mass_captured: d.mass_captured, reliable: d.mass_captured >= 0.99 })
}

/// Result of the naive-norm crosscheck: lhs = (1/2π)·∫dt Pr[x₀|t], rhs =
/// the squared norm of the naive cross-sector reduction. The two agree in
/// the continuum; the window truncation of the lhs is reported as a tail
/// estimate rather than asserted away.
#[derive(Debug, Clone, Copy)]
pub struct NaiveCrosscheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_dev: f64,
    /// Estimated mass of |ψ(x0, t)|²/2π outside the window, from the
    /// c/t² envelope of spreading packets.
    pub tail_estimate: f64,
}

pub fn naive_norm_crosscheck(
    s: &PhysicalState,
    x0: f64,
    tg: &TimeGrid,
) -> Result<NaiveCrosscheck> {
    check_position_resolution(s, x0.abs(), tg.t_abs_max())?;
    let ts: Vec<f64> = tg.nodes().collect();
    let dens: Result<Vec<f64>> =
        ts.par_iter().map(|&t| Ok(wavefunction_at(s, x0, t)?.norm_sqr())).collect();
    let dens = dens?;
    let lhs = CLOCK_POVM_NORMALIZATION * trapezoid(&dens, tg.dt());
    let rhs = naive_reduce(s, x0)?.norm_squared();
    let rel_dev = (lhs - rhs).abs() / rhs;
    // |ψ(x0,t)|² ~ c/t² for large |t|; ∫_T^∞ c/t² dt = c/T with c = P(T)·T²
    let tail_upper = dens.last().copied().unwrap_or(0.0) * tg.t_max().abs().max(1e-12);
    let tail_lower = if tg.t_min() < 0.0 { dens[0] * tg.t_min().abs() } else { 0.0 };
    let tail_estimate = CLOCK_POVM_NORMALIZATION * (tail_upper + tail_lower);
    Ok(NaiveCrosscheck { lhs, rhs, rel_dev, tail_estimate })
}

/// Total-variation distance (1/2)·∫|a − b| dt between two sampled
/// densities on a shared grid.
pub fn total_variation_distance(a: &[f64], b: &[f64], dt: f64) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).collect();
    0.5 * trapezoid(&diff, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MomentumGrid;
    use crate::wavepacket::MomentumWavefunction;

    fn gauss(p0: f64, s: f64, xc: f64) -> MomentumWavefunction {
        MomentumWavefunction::gaussian(p0, s, xc).unwrap()
    }

    fn demo_state() -> PhysicalState {
        let grid = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid).unwrap()
    }

    fn counter_propagating() -> PhysicalState {
        // two packets converging on the origin from opposite sides
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = MomentumWavefunction::superpose(vec![
            (w, gauss(5.0, 0.5, -10.0)),
            (w, gauss(-5.0, 0.5, 10.0)),
        ])
        .unwrap();
        let grid = MomentumGrid::new(-15.0, 15.0, 8192).unwrap();
        PhysicalState::lift(psi, 1.0, grid).unwrap()
    }

    #[test]
    fn relational_density_captures_the_arrival() {
        let s = demo_state();
        let tg = TimeGrid::new(0.0, 4.0, 4096).unwrap();
        let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        assert!(d.mass_captured >= 0.999, "mass {}", d.mass_captured);
        assert!(d.total.iter().all(|&v| v >= 0.0));
        for j in 0..d.total.len() {
            assert_eq!(d.total[j], d.plus[j] + d.minus[j]);
        }
        assert!(d.mass_captured <= 1.0 + 1e-6);
        assert!((1.95..=2.05).contains(&d.peak_time()));
    }

    #[test]
    fn counter_propagating_density_ignores_sector_phase() {
        let s = counter_propagating();
        let tg = TimeGrid::new(0.0, 4.0, 1024).unwrap();
        let base = relational_toa(&s, 0.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        for phi in [std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let rot = s.apply_sector_phase(Sector::Minus, phi);
            let d = relational_toa(&rot, 0.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
            let max = base
                .total
                .iter()
                .zip(d.total.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(max < 1e-10, "phi={phi}: {max:e}");
        }
    }

    #[test]
    fn plus_only_state_has_empty_minus_sector() {
        let s = demo_state().sector_project(Sector::Plus);
        let tg = TimeGrid::new(0.0, 4.0, 256).unwrap();
        let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        assert!(d.minus.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn time_covariance_of_the_density() {
        // density of the Δt-evolved state equals the density of the
        // original sampled at t + Δt
        let s = demo_state();
        let dt_shift = 0.5;
        let grid = *s.grid();
        let evolved = PhysicalState::lift(
            s.psi0().time_evolve(dt_shift, s.mass()).unwrap(),
            s.mass(),
            grid,
        )
        .unwrap();
        let tg = TimeGrid::new(0.0, 3.0, 512).unwrap();
        let d_evolved = relational_toa(&evolved, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let d_orig =
            relational_toa(&s, 10.0, &tg.shifted(dt_shift), QuadratureMethod::DirectTrapezoid)
                .unwrap();
        let max = d_evolved
            .total
            .iter()
            .zip(d_orig.total.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max < 1e-6, "time covariance violated by {max:e}");
    }

    #[test]
    fn spatial_covariance_of_the_density() {
        let s = demo_state();
        let grid = *s.grid();
        let xp = 3.0;
        let translated =
            PhysicalState::lift(gauss(5.0, 0.5, 0.0).translate(xp), 1.0, grid).unwrap();
        let tg = TimeGrid::new(0.0, 4.0, 512).unwrap();
        let a = relational_toa(&translated, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let b = relational_toa(&s, 10.0 - xp, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let max = a
            .total
            .iter()
            .zip(b.total.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(max < 1e-10, "spatial covariance violated by {max:e}");
    }

    #[test]
    fn position_density_normalizes_and_tracks_spreading() {
        let s = demo_state();
        let xg = PositionGrid::new(-40.0, 60.0, 4001).unwrap();
        for t in [0.0, 1.0, 5.0] {
            let d = position_density(&s, &xg, t).unwrap();
            assert!(d.iter().all(|&v| v >= 0.0));
            let mass = trapezoid(&d, xg.dx());
            assert!((mass - 1.0).abs() < 1e-6, "t={t}: mass {mass}");
        }
        // width at t matches the analytic spreading law to 0.1%
        let t = 2.0;
        let d = position_density(&s, &xg, t).unwrap();
        let dx = xg.dx();
        let mass = trapezoid(&d, dx);
        let mean: f64 = trapezoid(
            &d.iter().enumerate().map(|(i, &v)| v * xg.node(i)).collect::<Vec<_>>(),
            dx,
        ) / mass;
        let var: f64 = trapezoid(
            &d.iter()
                .enumerate()
                .map(|(i, &v)| v * (xg.node(i) - mean).powi(2))
                .collect::<Vec<_>>(),
            dx,
        ) / mass;
        let sigma_p = 0.5;
        let expected = (1.0 / (2.0 * sigma_p))
            * (1.0 + (2.0 * sigma_p * sigma_p * t / 1.0).powi(2)).sqrt();
        assert!(
            (var.sqrt() - expected).abs() / expected < 1e-3,
            "width {} vs {expected}",
            var.sqrt()
        );
        // peak at the classical position x_c + p0·t/m
        let (imax, _) = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!((xg.node(imax) - 10.0).abs() < 0.1);
    }

    #[test]
    fn quasi_monochromatic_flux_matches_relational_toa() {
        // narrow momentum spread: current ≈ v·|ψ|² ≈ arrival density
        let grid = MomentumGrid::new(-1.0, 11.0, 4096).unwrap();
        let s = PhysicalState::lift(gauss(5.0, 0.1, 0.0), 1.0, grid).unwrap();
        let tg = TimeGrid::new(1.0, 3.0, 1024).unwrap();
        let flux = flux_toa(&s, 10.0, &tg).unwrap();
        let rel = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let (jf, _) = flux.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!((tg.node(jf) - rel.peak_time()).abs() < 0.02);
        let mass_flux = trapezoid(&flux, tg.dt());
        let mass_rel = trapezoid(&rel.total, tg.dt());
        assert!(
            (mass_flux - mass_rel).abs() / mass_rel < 0.01,
            "{mass_flux} vs {mass_rel}"
        );
    }

    #[test]
    fn flux_mirror_antisymmetry() {
        let grid = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        let mirror_grid = MomentumGrid::new(-15.0, 5.0, 4096).unwrap();
        let s = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid).unwrap();
        let sm = PhysicalState::lift(gauss(-5.0, 0.5, 0.0), 1.0, mirror_grid).unwrap();
        let tg = TimeGrid::new(0.5, 3.5, 256).unwrap();
        let j = flux_toa(&s, 10.0, &tg).unwrap();
        let jm = flux_toa(&sm, -10.0, &tg).unwrap();
        let max = j.iter().zip(jm.iter()).map(|(a, b)| (a + b).abs()).fold(0.0f64, f64::max);
        assert!(max < 1e-12, "mirror antisymmetry violated by {max:e}");
    }

    #[test]
    fn backflow_state_has_negative_flux_but_nonnegative_density() {
        // plus-only two-component superposition: the current dips negative
        // in the interference window while the arrival density cannot
        let a = 0.6f64;
        let norm = 1.0 / (1.0 + a * a).sqrt();
        let psi = MomentumWavefunction::superpose(vec![
            (Complex64::new(norm, 0.0), gauss(1.0, 0.05, 0.0)),
            (Complex64::new(norm * a, 0.0), gauss(3.0, 0.05, 0.0)),
        ])
        .unwrap();
        let grid = MomentumGrid::new(0.2, 3.8, 2048).unwrap();
        let s = PhysicalState::lift(psi, 1.0, grid).unwrap();
        assert!(s.w_minus() == 0.0);
        let tg = TimeGrid::new(-2.0, 2.0, 1024).unwrap();
        let flux = flux_toa(&s, 0.0, &tg).unwrap();
        let min_flux = flux.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min_flux < 0.0, "expected backflow, min flux {min_flux}");
        let d = relational_toa(&s, 0.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        assert!(d.total.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn semiclassical_peak_matches_closed_form_maximizer() {
        // maximizer of (m x0/t²)·|ψ₀(m x0/t)|² for a Gaussian solves
        // 2σ²t² + p0·m·x0·t − (m·x0)² = 0
        let s = demo_state();
        let (m, p0, sigma, x0) = (1.0, 5.0, 0.5, 10.0);
        let tg = TimeGrid::new(0.01, 6.0, 1 << 16).unwrap();
        let d = semiclassical_toa(&s, x0, &tg).unwrap();
        let (jmax, _) = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let t_star = {
            let a = 2.0 * sigma * sigma;
            let b = p0 * m * x0;
            let c = -(m * x0) * (m * x0);
            (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
        };
        assert!((1.9..=2.0).contains(&t_star));
        assert!((tg.node(jmax) - t_star).abs() < 1e-3, "{} vs {t_star}", tg.node(jmax));
    }

    #[test]
    fn semiclassical_mass_equals_plus_weight() {
        let s = demo_state();
        let tg = TimeGrid::new(0.05, 12.0, 1 << 15).unwrap();
        let d = semiclassical_toa(&s, 10.0, &tg).unwrap();
        let mass = trapezoid(&d, tg.dt());
        assert!((mass - s.w_plus()).abs() < 1e-6, "mass {mass} vs w+ {}", s.w_plus());
    }

    #[test]
    fn semiclassical_rejects_zero_arrival_position() {
        let s = demo_state();
        let tg = TimeGrid::new(0.1, 4.0, 64).unwrap();
        assert!(matches!(semiclassical_toa(&s, 0.0, &tg), Err(ToaError::Undefined(_))));
    }

    #[test]
    fn semiclassical_mirror_symmetry() {
        let grid = MomentumGrid::new(-15.0, 5.0, 4096).unwrap();
        let sm = PhysicalState::lift(gauss(-5.0, 0.5, 0.0), 1.0, grid).unwrap();
        let s = demo_state();
        let tg = TimeGrid::new(0.5, 3.5, 512).unwrap();
        let a = semiclassical_toa(&s, 10.0, &tg).unwrap();
        let b = semiclassical_toa(&sm, -10.0, &tg).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_of_symmetric_density_center_at_zero() {
        let grid = MomentumGrid::new(-8.0, 8.0, 2048).unwrap();
        let s = PhysicalState::lift(gauss(0.0, 1.0, 0.0), 1.0, grid).unwrap();
        let tg = TimeGrid::new(-5.0, 5.0, 2049).unwrap();
        let d = relational_toa(&s, 0.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let mom = moments(&d).unwrap();
        assert!(mom.mean.abs() < 1e-8, "mean {}", mom.mean);
    }

    #[test]
    fn moments_of_demo_arrival() {
        let s = demo_state();
        let tg = TimeGrid::new(-1.0, 6.0, 4096).unwrap();
        let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let mom = moments(&d).unwrap();
        assert!(mom.reliable);
        assert!((1.95..=2.10).contains(&mom.mean), "mean {}", mom.mean);
    }

    #[test]
    fn arrival_width_obeys_the_energy_time_bound() {
        // the arrival-time spread is bounded below by the inverse energy
        // spread ΔT ≥ m/(2 p0 σ_p), so it grows as σ_p shrinks
        let mut widths = Vec::new();
        for sigma_p in [0.2, 0.1, 0.05] {
            let psi = gauss(5.0, sigma_p, 0.0);
            let grid = psi.recommended_grid(4096).unwrap();
            let s = PhysicalState::lift(psi, 1.0, grid).unwrap();
            let tg = TimeGrid::new(-12.0, 16.0, 8192).unwrap();
            let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
            let mom = moments(&d).unwrap();
            let floor = 1.0 / (2.0 * 5.0 * sigma_p);
            assert!(
                mom.variance.sqrt() >= floor * 0.9,
                "σ_p={sigma_p}: width {} below uncertainty floor {floor}",
                mom.variance.sqrt()
            );
            widths.push(mom.variance.sqrt());
        }
        assert!(widths[0] < widths[1] && widths[1] < widths[2]);
    }

    #[test]
    fn moments_of_zero_mass_density_are_undefined() {
        let tg = TimeGrid::new(0.0, 1.0, 16).unwrap();
        let d = TimeDensity {
            tg,
            total: vec![0.0; 16],
            plus: vec![0.0; 16],
            minus: vec![0.0; 16],
            mass_captured: 0.0,
        };
        assert!(matches!(moments(&d), Err(ToaError::Undefined(_))));
    }

    #[test]
    fn moments_flag_window_limited_estimates() {
        let s = demo_state();
        let tg = TimeGrid::new(1.8, 2.2, 128).unwrap();
        let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid).unwrap();
        let mom = moments(&d).unwrap();
        assert!(!mom.reliable);
    }

    #[test]
    fn naive_crosscheck_closes_for_the_demo_state() {
        // the t-tail beyond [−2, 8] is controlled by ψ₀(m·x0/t), which has
        // left the packet support there, so this window already captures
        // the full integral
        let grid = MomentumGrid::new(-5.0, 15.0, 8192).unwrap();
        let s = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid).unwrap();
        let tg = TimeGrid::new(-2.0, 8.0, 2048).unwrap();
        let c = naive_norm_crosscheck(&s, 10.0, &tg).unwrap();
        assert!(c.rel_dev < 0.02, "rel_dev {}", c.rel_dev);
        assert!(c.tail_estimate < 0.01 * c.rhs, "tail {}", c.tail_estimate);
    }

    #[test]
    fn naive_crosscheck_mirror_states_agree() {
        let grid = MomentumGrid::new(-5.0, 15.0, 8192).unwrap();
        let mirror = MomentumGrid::new(-15.0, 5.0, 8192).unwrap();
        let s = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid).unwrap();
        let sm = PhysicalState::lift(gauss(-5.0, 0.5, 0.0), 1.0, mirror).unwrap();
        let tg = TimeGrid::new(-2.0, 8.0, 1024).unwrap();
        let a = naive_norm_crosscheck(&s, 10.0, &tg).unwrap();
        let b = naive_norm_crosscheck(&sm, -10.0, &tg).unwrap();
        assert!((a.rhs - b.rhs).abs() < 1e-12);
        assert!((a.lhs - b.lhs).abs() < 1e-12);
    }

    #[test]
    fn naive_norms_differ_across_widths() {
        // rhs values for σ_p = 0.5 vs 1.0 at p0 = 5 differ by a few
        // percent; a mean-momentum change doubles the norm
        let grid = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        let narrow = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid).unwrap();
        let wide = PhysicalState::lift(gauss(5.0, 1.0, 0.0), 1.0, grid).unwrap();
        let slow = PhysicalState::lift(gauss(2.5, 0.25, 0.0), 1.0, grid).unwrap();
        let a = naive_reduce(&narrow, 10.0).unwrap().norm_squared();
        let b = naive_reduce(&wide, 10.0).unwrap().norm_squared();
        let c = naive_reduce(&slow, 10.0).unwrap().norm_squared();
        let rel = (a - b).abs() / a;
        assert!(rel > 0.03, "width dependence {rel}");
        assert!((c - a).abs() / a > 0.10, "momentum dependence {}", (c - a).abs() / a);
    }

    #[test]
    fn tv_distance_basics() {
        let a = vec![1.0, 1.0, 0.0, 0.0];
        let b = vec![0.0, 0.0, 1.0, 1.0];
        let d = total_variation_distance(&a, &b, 1.0);
        assert!((d - 1.5).abs() < 1e-12); // trapezoid of |a−b| = 3, halved
        assert_eq!(total_variation_distance(&a, &a, 1.0), 0.0);
    }
}

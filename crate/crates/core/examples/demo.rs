//! Compute the demonstration scenario and print a short summary:
//! a Gaussian packet (p0 = 5, sigma_p = 0.5) arriving at x0 = 10.

use toa_core::{
    moments, relational_toa, MomentumGrid, MomentumWavefunction, PhysicalState, QuadratureMethod,
    TimeGrid,
};

fn main() -> toa_core::Result<()> {
    let psi = MomentumWavefunction::gaussian(5.0, 0.5, 0.0)?;
    let grid = MomentumGrid::new(-5.0, 15.0, 4096)?;
    let state = PhysicalState::lift(psi, 1.0, grid)?;
    println!("w+ = {:.3e}, w- = {:.3e}", state.w_plus(), state.w_minus());

    let tg = TimeGrid::new(0.0, 4.0, 2048)?;
    let density = relational_toa(&state, 10.0, &tg, QuadratureMethod::EnergyTransform)?;
    let m = moments(&density)?;
    println!(
        "arrival at x0 = 10: peak t = {:.4}, mean = {:.4}, width = {:.4}, mass = {:.6}",
        density.peak_time(),
        m.mean,
        m.variance.sqrt(),
        density.mass_captured
    );
    Ok(())
}

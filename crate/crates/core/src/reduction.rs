//! Reduction maps between the physical space and conditional descriptions:
//! the system conditioned on a clock reading, the clock conditioned on the
//! particle position (sector-wise, the only isometric option), the naive
//! cross-sector position conditioning, and the general kernel family with
//! inverse reconstruction.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Result, ToaError};
use crate::grid::MomentumGrid;
use crate::physical_state::{HalfAxis, PhysicalState, Sector};
use crate::wavepacket::MomentumWavefunction;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// State of the system conditioned on the clock reading `t`: the free
/// evolution of ψ₀ by t. Unit norm for any t.
pub fn conditional_system_state(s: &PhysicalState, t: f64) -> MomentumWavefunction {
    s.psi0()
        .time_evolve(t, s.mass())
        .expect("state mass is positive by construction")
}

/// Clock state conditioned on the particle being at `x0` in sector σ,
/// sampled in the momentum parameter q = |p|:
/// A_σ(q) = √(q/m)·ψ₀(σq)·e^{iσq x0}.
/// Norms are taken with the dε = (q/m)dq measure, so
/// norm² = ∫₀^∞ |A_σ(q)|²·(m/q) dq = ∫₀^∞ |ψ₀(σq)|² dq = w_σ.
#[derive(Debug, Clone)]
pub struct ConditionalClockState {
    pub sigma: Sector,
    pub x0: f64,
    pub mass: f64,
    pub axis: HalfAxis,
    pub amplitudes: Vec<Complex64>,
    /// |ψ₀(σ·0⁺)|², the boundary value of the norm integrand at q = 0.
    boundary_density: f64,
    /// Grid of the source state, kept for exact inverse reconstruction.
    source_grid: MomentumGrid,
}

impl ConditionalClockState {
    /// ∫₀^{q_max} |A_σ(q)|²·(m/q) dq with the boundary cell [0, q₁]
    /// included when the axis borders zero (the integrand limit there is
    /// |ψ₀(0)|², which is finite).
    pub fn norm_squared(&self) -> f64 {
        let n = self.axis.qs.len();
        if n == 0 {
            return 0.0;
        }
        let dens: Vec<f64> = (0..n)
            .map(|k| self.amplitudes[k].norm_sqr() * self.mass / self.axis.qs[k])
            .collect();
        let mut acc = 0.5 * (dens[0] + dens[n - 1]) * self.axis.dq;
        for d in &dens[1..n.saturating_sub(1)] {
            acc += d * self.axis.dq;
        }
        if n == 1 {
            acc = 0.5 * dens[0] * self.axis.dq;
        }
        acc + self.axis.lead_cell_weight() * (self.boundary_density + dens[0])
    }
}

/// Reduce a physical state onto the clock, conditioned on position `x0`
/// and sector σ. A partial isometry: norm² equals the sector weight.
pub fn position_reduce(s: &PhysicalState, x0: f64, sigma: Sector) -> Result<ConditionalClockState> {
    let axis = s.half_axis(sigma);
    let m = s.mass();
    let sign = sigma.sign();
    let factor = s.sector_factor(sigma);
    let base = s.psi0_base();
    let mut amplitudes = Vec::with_capacity(axis.qs.len());
    for &q in &axis.qs {
        let psi = base.evaluate(sign * q)? * factor;
        amplitudes.push((q / m).sqrt() * psi * cis(sign * q * x0));
    }
    Ok(ConditionalClockState {
        sigma,
        x0,
        mass: m,
        axis,
        amplitudes,
        boundary_density: s.zero_density(sigma),
        source_grid: *s.grid(),
    })
}

/// Reconstruct the σ-sector component of the physical state from its
/// conditional clock state: ψ₀(σq) = A_σ(q)·√(m/q)·e^{−iσq x0}. The result
/// is an unnormalized physical state supported on one sector, tabulated on
/// the source grid (zero off-sector, zero at the q = 0 endpoint).
pub fn inverse_position_reduce(c: &ConditionalClockState) -> Result<PhysicalState> {
    let grid = c.source_grid;
    let sign = c.sigma.sign();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    let psi_at = |k: usize| {
        let q = c.axis.qs[k];
        c.amplitudes[k] * (c.mass / q).sqrt() * cis(-sign * q * c.x0)
    };
    // the q nodes are exactly the grid nodes of the σ side: ascending in p
    // for plus, descending in q for minus
    let nq = c.axis.qs.len();
    let mut seen = 0usize;
    for (i, p) in grid.nodes().enumerate() {
        if sign * p > 0.0 {
            let k = match c.sigma {
                Sector::Plus => seen,
                Sector::Minus => nq - 1 - seen,
            };
            values[i] = psi_at(k);
            seen += 1;
        }
    }
    debug_assert_eq!(seen, nq);
    let psi = MomentumWavefunction::tabulated(grid, values)?;
    PhysicalState::lift_raw(psi, c.mass, grid)
}

/// A sector-wise reduction kernel r_σ(y, p) = Θ(σp)·weight(σ, |p|)·e^{i·phase(σ, |p|, y)}.
/// The weight √(σp/m) is the unique choice (up to phase) making the
/// reduction a partial isometry.
#[derive(Clone)]
pub struct ReductionKernel {
    weight: Arc<dyn Fn(Sector, f64) -> f64 + Send + Sync>,
    phase: Arc<dyn Fn(Sector, f64, f64) -> f64 + Send + Sync>,
}

impl ReductionKernel {
    pub fn new(
        weight: impl Fn(Sector, f64) -> f64 + Send + Sync + 'static,
        phase: impl Fn(Sector, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { weight: Arc::new(weight), phase: Arc::new(phase) }
    }

    /// The isometric position kernel: weight √(q/m), phase −y·σq (y is the
    /// conditioning position).
    pub fn position(mass: f64) -> Self {
        Self::new(
            move |_s, q| (q / mass).sqrt(),
            move |s, q, y| -y * s.sign() * q,
        )
    }

    /// The covariant-time kernel: weight √(q/m), phase −q²·y/(2m) with y a
    /// clock time; recovers a time observable covariant under H_S.
    pub fn covariant_time(mass: f64) -> Self {
        Self::new(
            move |_s, q| (q / mass).sqrt(),
            move |_s, q, y| -q * q * y / (2.0 * mass),
        )
    }

    /// Flat weight ≡ 1: a valid kernel but not an isometry.
    pub fn flat() -> Self {
        Self::new(|_s, _q| 1.0, |_s, _q, _y| 0.0)
    }

    pub fn weight(&self, sigma: Sector, q: f64) -> f64 {
        (self.weight)(sigma, q)
    }

    pub fn phase(&self, sigma: Sector, q: f64, y: f64) -> f64 {
        (self.phase)(sigma, q, y)
    }
}

/// Output of a general sector-wise reduction: the clock amplitude sampled
/// on the σ half-axis, with norms in the dε measure restricted to the grid
/// (no boundary-cell extrapolation: arbitrary kernels may be singular at
/// q → 0 there).
#[derive(Debug, Clone)]
pub struct GeneralReduction {
    pub sigma: Sector,
    pub y: f64,
    pub mass: f64,
    pub axis: HalfAxis,
    pub amplitudes: Vec<Complex64>,
}

impl GeneralReduction {
    /// ∫_{q₁}^{q_max} |r·ψ₀|²·(m/q) dq.
    pub fn norm_squared(&self) -> f64 {
        let n = self.axis.qs.len();
        if n < 2 {
            return 0.0;
        }
        let dens: Vec<f64> = (0..n)
            .map(|k| self.amplitudes[k].norm_sqr() * self.mass / self.axis.qs[k])
            .collect();
        let mut acc = 0.5 * (dens[0] + dens[n - 1]);
        for d in &dens[1..n - 1] {
            acc += d;
        }
        acc * self.axis.dq
    }
}

/// Apply an arbitrary sector-wise kernel to a physical state. The kernel's
/// weight must vanish for σp < 0 by construction (it is only ever sampled
/// on the σ half-axis); a negative weight is rejected as a sector
/// violation, since r_σ must be Θ(σp)·(non-negative)·(phase).
pub fn general_reduce(
    s: &PhysicalState,
    kernel: &ReductionKernel,
    y: f64,
    sigma: Sector,
) -> Result<GeneralReduction> {
    let axis = s.half_axis(sigma);
    let m = s.mass();
    let sign = sigma.sign();
    let factor = s.sector_factor(sigma);
    let base = s.psi0_base();
    let mut amplitudes = Vec::with_capacity(axis.qs.len());
    for &q in &axis.qs {
        let w = kernel.weight(sigma, q);
        if w < 0.0 || !w.is_finite() {
            return Err(ToaError::SectorViolation(format!(
                "kernel weight at sigma={}, q={q} is {w}; weights must be finite and non-negative on the sector support",
                sigma.label()
            )));
        }
        let psi = base.evaluate(sign * q)? * factor;
        // the kernel specifies the conditioning state |y,σ⟩; the reduction
        // applies its bra, hence the conjugated phase
        amplitudes.push(w * psi * cis(-kernel.phase(sigma, q, y)));
    }
    Ok(GeneralReduction { sigma, y, mass: m, axis, amplitudes })
}

/// The naive conditioning on a bare position eigenstate across both
/// sectors, F(ε) = (1/√2π)·Σ_σ (m/|p_σ(ε)|)·ψ₀(p_σ(ε))·e^{i p_σ(ε) x0},
/// sampled on the ε grid induced by ε = −q²/(2m). Not an isometry: its
/// norm depends on the state and cannot be fixed state-independently.
#[derive(Debug, Clone)]
pub struct NaiveReduction {
    pub x0: f64,
    pub mass: f64,
    /// ε nodes, increasing (from −q_max²/2m towards 0⁻).
    pub epsilons: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    norm_sq: f64,
}

impl NaiveReduction {
    pub fn norm_squared(&self) -> f64 {
        self.norm_sq
    }
}

pub fn naive_reduce(s: &PhysicalState, x0: f64) -> Result<NaiveReduction> {
    let m = s.mass();
    // merge the per-sector half axes onto a common q set: use the larger
    // side's nodes; each sector contributes where ψ₀ is representable
    let plus = s.half_axis(Sector::Plus);
    let minus = s.half_axis(Sector::Minus);
    let axis = if plus.qs.len() >= minus.qs.len() { &plus } else { &minus };
    if axis.is_empty() {
        return Err(ToaError::InvalidState("state grid has no nonzero momentum nodes".into()));
    }
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let grid = s.grid();
    let base = s.psi0_base();
    let mut eps = Vec::with_capacity(axis.qs.len());
    let mut amps = Vec::with_capacity(axis.qs.len());
    for &q in &axis.qs {
        let mut f = Complex64::new(0.0, 0.0);
        for sec in Sector::BOTH {
            let p = sec.sign() * q;
            if grid.contains(p) {
                let psi = base.evaluate(p)? * s.sector_factor(sec);
                f += (m / q) * psi * cis(p * x0);
            }
        }
        eps.push(-q * q / (2.0 * m));
        amps.push(f * inv_sqrt_2pi);
    }
    // ε increases as q decreases; reorder ascending in ε
    eps.reverse();
    amps.reverse();
    // trapezoid over the non-uniform ε nodes
    let mut norm_sq = 0.0;
    for k in 0..eps.len() - 1 {
        let h = eps[k + 1] - eps[k];
        norm_sq += 0.5 * h * (amps[k].norm_sqr() + amps[k + 1].norm_sqr());
    }
    Ok(NaiveReduction { x0, mass: m, epsilons: eps, amplitudes: amps, norm_sq })
}

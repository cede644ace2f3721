//! Normalized solutions of the free-particle Hamiltonian constraint,
//! stored as the full-line initial wavefunction ψ₀(p) together with the
//! probability weight of each momentum-sign sector. The two sectors are
//! superselected: the physical inner product carries no coherence between
//! them, so sector-diagonal quantities factor through |factor_σ|² exactly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Result, ToaError};
use crate::grid::MomentumGrid;
use crate::wavepacket::MomentumWavefunction;

/// Normalization constant of the covariant clock POVM for a clock whose
/// spectrum contains the negative half-line: N = 1/(2π).
pub const CLOCK_POVM_NORMALIZATION: f64 = 1.0 / (2.0 * PI);

/// Momentum-sign sector label: `Plus` ↔ p > 0, `Minus` ↔ p < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Plus, Sector::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Sector::Plus => 1.0,
            Sector::Minus => -1.0,
        }
    }

    pub fn other(self) -> Sector {
        match self {
            Sector::Plus => Sector::Minus,
            Sector::Minus => Sector::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sector::Plus => "plus",
            Sector::Minus => "minus",
        }
    }
}

/// Strictly positive |p| nodes of one momentum half-line of a grid,
/// ascending in q = |p|, with the uniform spacing of the parent grid.
/// `zero_adjacent` records whether the innermost node borders p = 0 inside
/// the grid, in which case quadratures over [0, q₁] keep the boundary cell.
#[derive(Debug, Clone)]
pub struct HalfAxis {
    pub qs: Vec<f64>,
    pub dq: f64,
    pub zero_adjacent: bool,
}

impl HalfAxis {
    pub fn is_empty(&self) -> bool {
        self.qs.is_empty()
    }

    pub fn q_max(&self) -> f64 {
        self.qs.last().copied().unwrap_or(0.0)
    }

    /// Trapezoid weights for ∫₀^{q_max} f dq over the nodes, including the
    /// boundary cell [0, q₁] when the axis borders zero. The f(0) endpoint
    /// contribution is handled by the caller (see `lead_cell_weight`).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.qs.len();
        let mut w = vec![self.dq; n];
        if n == 0 {
            return w;
        }
        w[0] = 0.5 * self.dq;
        w[n - 1] = 0.5 * self.dq;
        if self.zero_adjacent {
            // cell [0, q1] contributes q1·(f(0) + f(q1))/2
            w[0] += 0.5 * self.qs[0];
        }
        w
    }

    /// Weight multiplying f(0⁺) when the axis borders zero.
    pub fn lead_cell_weight(&self) -> f64 {
        if self.zero_adjacent && !self.qs.is_empty() {
            0.5 * self.qs[0]
        } else {
            0.0
        }
    }
}

/// Extract the σ half of a grid. Nodes at exactly p = 0 belong to neither
/// sector.
pub fn half_axis(grid: &MomentumGrid, sector: Sector) -> HalfAxis {
    let nodes: Vec<f64> = grid.nodes().collect();
    let dq = grid.dp();
    match sector {
        Sector::Plus => {
            let qs: Vec<f64> = nodes.iter().copied().filter(|&p| p > 0.0).collect();
            let zero_adjacent = grid.p_min() <= 0.0 && !qs.is_empty();
            HalfAxis { qs, dq, zero_adjacent }
        }
        Sector::Minus => {
            let mut qs: Vec<f64> = nodes.iter().copied().filter(|&p| p < 0.0).map(|p| -p).collect();
            qs.reverse();
            let zero_adjacent = grid.p_max() >= 0.0 && !qs.is_empty();
            HalfAxis { qs, dq, zero_adjacent }
        }
    }
}

/// Split-cell trapezoid of a real integrand sampled on the grid nodes:
/// returns (∫_{p<0}, ∫_{p>0}, interpolated value at 0 if the grid spans 0).
/// When a cell straddles zero it is split by linear interpolation, which
/// keeps the two halves summing exactly to the full-grid trapezoid.
fn split_trapezoid_real(vals: &[f64], grid: &MomentumGrid) -> (f64, f64, Option<f64>) {
    let dp = grid.dp();
    let n = vals.len();
    let trap = |s: &[f64]| -> f64 {
        match s.len() {
            0 | 1 => 0.0,
            m => {
                let mut acc = 0.5 * (s[0] + s[m - 1]);
                for v in &s[1..m - 1] {
                    acc += v;
                }
                acc * dp
            }
        }
    };
    if grid.p_min() >= 0.0 {
        return (0.0, trap(vals), if grid.p_min() == 0.0 { Some(vals[0]) } else { None });
    }
    if grid.p_max() <= 0.0 {
        return (trap(vals), 0.0, if grid.p_max() == 0.0 { Some(vals[n - 1]) } else { None });
    }
    let k = grid.nodes().position(|p| p >= 0.0).expect("grid spans zero");
    let pk = grid.node(k);
    if pk == 0.0 {
        let minus = trap(&vals[..=k]);
        let plus = trap(&vals[k..]);
        (minus, plus, Some(vals[k]))
    } else {
        let pa = grid.node(k - 1);
        let (fa, fb) = (vals[k - 1], vals[k]);
        let f0 = fa + (fb - fa) * (-pa) / (pk - pa);
        let minus = trap(&vals[..k]) + 0.5 * (-pa) * (fa + f0);
        let plus = 0.5 * pk * (f0 + fb) + trap(&vals[k..]);
        (minus, plus, Some(f0))
    }
}

fn split_trapezoid_complex(
    vals: &[Complex64],
    grid: &MomentumGrid,
) -> (Complex64, Complex64) {
    let dp = grid.dp();
    let zero = Complex64::new(0.0, 0.0);
    let trap = |s: &[Complex64]| -> Complex64 {
        match s.len() {
            0 | 1 => zero,
            m => {
                let mut acc = 0.5 * (s[0] + s[m - 1]);
                for v in &s[1..m - 1] {
                    acc += v;
                }
                acc * dp
            }
        }
    };
    if grid.p_min() >= 0.0 {
        return (zero, trap(vals));
    }
    if grid.p_max() <= 0.0 {
        return (trap(vals), zero);
    }
    let k = grid.nodes().position(|p| p >= 0.0).expect("grid spans zero");
    let pk = grid.node(k);
    if pk == 0.0 {
        (trap(&vals[..=k]), trap(&vals[k..]))
    } else {
        let pa = grid.node(k - 1);
        let (fa, fb) = (vals[k - 1], vals[k]);
        let f0 = fa + (fb - fa) * (-pa) / (pk - pa);
        let minus = trap(&vals[..k]) + 0.5 * (-pa) * (fa + f0);
        let plus = 0.5 * pk * (f0 + fb) + trap(&vals[k..]);
        (minus, plus)
    }
}

/// A normalized constraint solution: mass, the full-line wavefunction
/// ψ₀(p) fixing the state, cached sector weights, and the working grid.
/// Sector projections and sector-local phases are tracked as constant
/// per-sector factors, so superselection identities hold exactly.
#[derive(Debug, Clone)]
pub struct PhysicalState {
    mass: f64,
    psi0: MomentumWavefunction,
    grid: MomentumGrid,
    w_plus_base: f64,
    w_minus_base: f64,
    zero_density_base: Option<f64>,
    plus_factor: Complex64,
    minus_factor: Complex64,
    renorm: f64,
}

impl PhysicalState {
    /// Lift an initial wavefunction to a physical state: compute sector
    /// weights by trapezoid integration over the p > 0 and p < 0 halves
    /// (the cell containing p = 0 is split by linear interpolation, so the
    /// halves sum to the full-line norm exactly). Inputs whose norm is off
    /// unity are renormalized and the factor recorded.
    pub fn lift(psi0: MomentumWavefunction, mass: f64, grid: MomentumGrid) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "mass",
                reason: format!("require mass > 0, got {mass}"),
            });
        }
        let vals: Result<Vec<f64>> =
            grid.nodes().map(|p| Ok(psi0.evaluate(p)?.norm_sqr())).collect();
        let vals = vals?;
        let (wm, wp, f0) = split_trapezoid_real(&vals, &grid);
        let norm2 = wm + wp;
        if !(norm2 > 1e-30) {
            return Err(ToaError::InvalidState(format!(
                "zero-norm wavefunction on the grid (norm² = {norm2:e})"
            )));
        }
        let (psi0, wm, wp, f0, renorm) = if (norm2 - 1.0).abs() > 1e-12 {
            let s = 1.0 / norm2.sqrt();
            (
                psi0.scaled(Complex64::new(s, 0.0)),
                wm / norm2,
                wp / norm2,
                f0.map(|v| v / norm2),
                s,
            )
        } else {
            (psi0, wm, wp, f0, 1.0)
        };
        Ok(Self {
            mass,
            psi0,
            grid,
            w_plus_base: wp,
            w_minus_base: wm,
            zero_density_base: f0,
            plus_factor: Complex64::new(1.0, 0.0),
            minus_factor: Complex64::new(1.0, 0.0),
            renorm,
        })
    }

    /// Lift without normalization: sector weights are the raw half-line
    /// integrals of |ψ₀|², and a zero function is allowed. Used for
    /// reconstructed sector components and other unnormalized states.
    pub fn lift_raw(psi0: MomentumWavefunction, mass: f64, grid: MomentumGrid) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "mass",
                reason: format!("require mass > 0, got {mass}"),
            });
        }
        let vals: Result<Vec<f64>> =
            grid.nodes().map(|p| Ok(psi0.evaluate(p)?.norm_sqr())).collect();
        let vals = vals?;
        let (wm, wp, f0) = split_trapezoid_real(&vals, &grid);
        Ok(Self {
            mass,
            psi0,
            grid,
            w_plus_base: wp,
            w_minus_base: wm,
            zero_density_base: f0,
            plus_factor: Complex64::new(1.0, 0.0),
            minus_factor: Complex64::new(1.0, 0.0),
            renorm: 1.0,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grid(&self) -> &MomentumGrid {
        self.grid_ref()
    }

    fn grid_ref(&self) -> &MomentumGrid {
        &self.grid
    }

    /// Renormalization factor applied by `lift` (1.0 for normalized input).
    pub fn renorm_factor(&self) -> f64 {
        self.renorm
    }

    pub fn w_plus(&self) -> f64 {
        self.plus_factor.norm_sqr() * self.w_plus_base
    }

    pub fn w_minus(&self) -> f64 {
        self.minus_factor.norm_sqr() * self.w_minus_base
    }

    pub fn sector_weight(&self, sector: Sector) -> f64 {
        match sector {
            Sector::Plus => self.w_plus(),
            Sector::Minus => self.w_minus(),
        }
    }

    /// Physical norm squared, equal to the L² norm of ψ₀ (the ε ↔ p change
    /// of variables has unit Jacobian: √(−m/2ε)·|dε/dp| = 1).
    pub fn norm_squared(&self) -> f64 {
        self.w_plus() + self.w_minus()
    }

    pub(crate) fn sector_factor(&self, sector: Sector) -> Complex64 {
        match sector {
            Sector::Plus => self.plus_factor,
            Sector::Minus => self.minus_factor,
        }
    }

    /// The base wavefunction before sector factors.
    pub(crate) fn psi0_base(&self) -> &MomentumWavefunction {
        &self.psi0
    }

    /// |ψ₀|² of the σ-scaled state at p = 0⁺/0⁻ limits, interpolated on the
    /// working grid; used as the boundary value of half-line quadratures.
    pub(crate) fn zero_density(&self, sector: Sector) -> f64 {
        self.zero_density_base.unwrap_or(0.0) * self.sector_factor(sector).norm_sqr()
    }

    /// ψ₀ as seen by consumers, with any sector factors applied.
    pub fn psi0(&self) -> MomentumWavefunction {
        let one = Complex64::new(1.0, 0.0);
        if self.plus_factor == one && self.minus_factor == one {
            self.psi0.clone()
        } else {
            self.psi0.sector_scaled(self.plus_factor, self.minus_factor)
        }
    }

    /// Project onto one momentum-sign sector: ψ₀ multiplied by the
    /// indicator Θ(σp). The result is unnormalized; its physical norm²
    /// equals the sector weight exactly, and projecting twice is the same
    /// as projecting once.
    pub fn sector_project(&self, sector: Sector) -> Self {
        let mut out = self.clone();
        match sector {
            Sector::Plus => out.minus_factor = Complex64::new(0.0, 0.0),
            Sector::Minus => out.plus_factor = Complex64::new(0.0, 0.0),
        }
        out
    }

    /// Multiply ψ₀ by e^{i·phase} on the σ support only. Sector weights and
    /// every sector-diagonal observable are unchanged.
    pub fn apply_sector_phase(&self, sector: Sector, phase: f64) -> Self {
        let rot = Complex64::new(phase.cos(), phase.sin());
        let mut out = self.clone();
        match sector {
            Sector::Plus => out.plus_factor *= rot,
            Sector::Minus => out.minus_factor *= rot,
        }
        out
    }

    pub fn half_axis(&self, sector: Sector) -> HalfAxis {
        half_axis(&self.grid, sector)
    }
}

/// Physical inner product ⟨a|b⟩_phys = ∫ dp ψ₀*(p) φ₀(p), evaluated
/// sector-wise so that coherence between the σ = ± components never enters.
/// Conjugate-symmetric; requires equal masses and identical grids.
pub fn physical_inner_product(a: &PhysicalState, b: &PhysicalState) -> Result<Complex64> {
    if a.mass != b.mass {
        return Err(ToaError::IncompatibleStates(format!(
            "mass mismatch: {} vs {}",
            a.mass, b.mass
        )));
    }
    if a.grid != b.grid {
        return Err(ToaError::IncompatibleStates(
            "momentum grids differ; states must share a grid".into(),
        ));
    }
    let vals: Result<Vec<Complex64>> = a
        .grid
        .nodes()
        .map(|p| Ok(a.psi0.evaluate(p)?.conj() * b.psi0.evaluate(p)?))
        .collect();
    let (ipm, ipp) = split_trapezoid_complex(&vals?, &a.grid);
    Ok(a.minus_factor.conj() * b.minus_factor * ipm + a.plus_factor.conj() * b.plus_factor * ipp)
}

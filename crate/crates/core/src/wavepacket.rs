//! Momentum-space wavefunctions ψ₀(p): the free data selecting a physical
//! state. All operations are pure; values are immutable after construction.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Result, ToaError};
use crate::grid::{trapezoid, MomentumGrid};

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

#[derive(Debug, Clone)]
enum Profile {
    /// (2π σ_p²)^(−1/4) · exp(−(p − p0)²/(4 σ_p²)) · exp(−i p x_c)
    Gaussian { p0: f64, sigma_p: f64, x_c: f64 },
    /// Linearly interpolated samples on a uniform grid.
    Tabulated { grid: MomentumGrid, amplitudes: Arc<Vec<Complex64>> },
    /// Weighted sum of component wavefunctions.
    Superposition(Vec<(Complex64, MomentumWavefunction)>),
    /// Base scaled by a constant factor on each momentum half-line;
    /// the p = 0 point belongs to neither sector and evaluates to zero.
    SectorScaled { base: Box<MomentumWavefunction>, plus: Complex64, minus: Complex64 },
}

/// A momentum-space wavefunction. Spatial translations and free evolution
/// are tracked exactly as an accumulated phase e^{−i(p·x_shift + p²·chirp)}
/// on top of the underlying profile, so both are unitary by construction.
#[derive(Debug, Clone)]
pub struct MomentumWavefunction {
    profile: Profile,
    x_shift: f64,
    chirp: f64,
}

impl MomentumWavefunction {
    /// Unit-norm Gaussian with mean momentum `p0`, momentum spread
    /// `sigma_p` and spatial center `x_c` at t = 0.
    pub fn gaussian(p0: f64, sigma_p: f64, x_c: f64) -> Result<Self> {
        if !(sigma_p > 0.0) || !sigma_p.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "sigma_p",
                reason: format!("require sigma_p > 0, got {sigma_p}"),
            });
        }
        Ok(Self { profile: Profile::Gaussian { p0, sigma_p, x_c }, x_shift: 0.0, chirp: 0.0 })
    }

    /// Wavefunction from samples on a uniform grid, linearly interpolated
    /// between nodes. Evaluation outside the grid is a domain error.
    pub fn tabulated(grid: MomentumGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(ToaError::InvalidParameter {
                name: "amplitudes",
                reason: format!(
                    "expected {} samples for the grid, got {}",
                    grid.n_points(),
                    amplitudes.len()
                ),
            });
        }
        Ok(Self {
            profile: Profile::Tabulated { grid, amplitudes: Arc::new(amplitudes) },
            x_shift: 0.0,
            chirp: 0.0,
        })
    }

    /// Weighted superposition Σ w_k ψ_k. The norm of the result is whatever
    /// it is; callers recompute it rather than assuming anything.
    pub fn superpose(components: Vec<(Complex64, MomentumWavefunction)>) -> Result<Self> {
        if components.is_empty() {
            return Err(ToaError::InvalidParameter {
                name: "components",
                reason: "superposition needs at least one component".into(),
            });
        }
        Ok(Self { profile: Profile::Superposition(components), x_shift: 0.0, chirp: 0.0 })
    }

    /// Multiply by `w` (realised as a one-component superposition).
    pub fn scaled(&self, w: Complex64) -> Self {
        Self {
            profile: Profile::Superposition(vec![(w, self.clone())]),
            x_shift: 0.0,
            chirp: 0.0,
        }
    }

    /// Scale the p > 0 and p < 0 half-lines by constant factors. The value
    /// at exactly p = 0 is zero: that point belongs to neither sector.
    pub fn sector_scaled(&self, plus: Complex64, minus: Complex64) -> Self {
        // Collapse nested sector scalings so repeated projections stay
        // pointwise identical.
        if self.x_shift == 0.0 && self.chirp == 0.0 {
            if let Profile::SectorScaled { base, plus: p0, minus: m0 } = &self.profile {
                return Self {
                    profile: Profile::SectorScaled {
                        base: base.clone(),
                        plus: p0 * plus,
                        minus: m0 * minus,
                    },
                    x_shift: 0.0,
                    chirp: 0.0,
                };
            }
        }
        Self {
            profile: Profile::SectorScaled {
                base: Box::new(self.clone()),
                plus,
                minus,
            },
            x_shift: 0.0,
            chirp: 0.0,
        }
    }

    /// ⟨p|T(x′)|ψ⟩ = e^{−i x′ p} ψ₀(p): spatial translation by `x_shift`.
    pub fn translate(&self, x_shift: f64) -> Self {
        let mut out = self.clone();
        out.x_shift += x_shift;
        out
    }

    /// Free evolution for time `dt`: multiplication by e^{−i p² dt/(2m)}.
    pub fn time_evolve(&self, dt: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "mass",
                reason: format!("require mass > 0, got {mass}"),
            });
        }
        let mut out = self.clone();
        out.chirp += dt / (2.0 * mass);
        Ok(out)
    }

    /// Evaluate ψ(p). Analytic profiles are exact, tabulated profiles are
    /// linearly interpolated, superpositions are weighted sums.
    pub fn evaluate(&self, p: f64) -> Result<Complex64> {
        let base = match &self.profile {
            Profile::Gaussian { p0, sigma_p, x_c } => {
                let norm = (2.0 * PI * sigma_p * sigma_p).powf(-0.25);
                let arg = (p - p0) / (2.0 * sigma_p);
                norm * (-arg * arg).exp() * cis(-p * x_c)
            }
            Profile::Tabulated { grid, amplitudes } => {
                if !grid.contains(p) {
                    return Err(ToaError::Domain(format!(
                        "p = {p} outside tabulated range [{}, {}]",
                        grid.p_min(),
                        grid.p_max()
                    )));
                }
                let s = (p - grid.p_min()) / grid.dp();
                let i = (s.floor() as usize).min(grid.n_points() - 2);
                let frac = s - i as f64;
                amplitudes[i] * (1.0 - frac) + amplitudes[i + 1] * frac
            }
            Profile::Superposition(parts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (w, psi) in parts {
                    acc += w * psi.evaluate(p)?;
                }
                acc
            }
            Profile::SectorScaled { base, plus, minus } => {
                let factor = if p > 0.0 {
                    *plus
                } else if p < 0.0 {
                    *minus
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if factor == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    factor * base.evaluate(p)?
                }
            }
        };
        if self.x_shift == 0.0 && self.chirp == 0.0 {
            Ok(base)
        } else {
            Ok(base * cis(-(p * self.x_shift + p * p * self.chirp)))
        }
    }

    /// Trapezoid-rule ∫ |ψ(p)|² dp over the grid. The grid must cover the
    /// numerically significant support of ψ.
    pub fn norm_squared(&self, grid: &MomentumGrid) -> Result<f64> {
        let vals: Result<Vec<f64>> = grid.nodes().map(|p| Ok(self.evaluate(p)?.norm_sqr())).collect();
        Ok(trapezoid(&vals?, grid.dp()))
    }

    /// A grid covering [p0 − 8σ, p0 + 8σ] for analytic profiles (Gaussian
    /// tail mass beyond 8σ is below 1e−14), or the union of component
    /// recommendations; tabulated profiles recommend their own grid.
    pub fn recommended_grid(&self, n_points: usize) -> Result<MomentumGrid> {
        let (lo, hi) = self.support_bounds();
        MomentumGrid::new(lo, hi, n_points)
    }

    fn support_bounds(&self) -> (f64, f64) {
        match &self.profile {
            Profile::Gaussian { p0, sigma_p, .. } => (p0 - 8.0 * sigma_p, p0 + 8.0 * sigma_p),
            Profile::Tabulated { grid, .. } => (grid.p_min(), grid.p_max()),
            Profile::Superposition(parts) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (_, psi) in parts {
                    let (l, h) = psi.support_bounds();
                    lo = lo.min(l);
                    hi = hi.max(h);
                }
                (lo, hi)
            }
            Profile::SectorScaled { base, .. } => base.support_bounds(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI: f64 = 2.0 * PI;

    fn gauss(p0: f64, s: f64, xc: f64) -> MomentumWavefunction {
        MomentumWavefunction::gaussian(p0, s, xc).unwrap()
    }

    #[test]
    fn gaussian_rejects_nonpositive_sigma() {
        assert!(MomentumWavefunction::gaussian(5.0, 0.0, 0.0).is_err());
        assert!(MomentumWavefunction::gaussian(5.0, -0.5, 0.0).is_err());
    }

    #[test]
    fn gaussian_is_normalized() {
        let psi = gauss(5.0, 0.5, 0.0);
        let grid = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        let n2 = psi.norm_squared(&grid).unwrap();
        assert!((n2 - 1.0).abs() < 1e-9, "norm² = {n2}");
    }

    #[test]
    fn gaussian_peak_value_matches_convention() {
        // (2π·0.25)^(−1/4) at the peak, purely real for x_c = 0
        let psi = gauss(5.0, 0.5, 0.0);
        let v = psi.evaluate(5.0).unwrap();
        let expect = (TWO_PI * 0.25).powf(-0.25);
        assert!((v.re - expect).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
        assert!((expect - 0.893244).abs() < 1e-6);

        let v0 = gauss(0.0, 1.0, 0.0).evaluate(0.0).unwrap();
        assert!((v0.re - TWO_PI.powf(-0.25)).abs() < 1e-12);
        // phase factor is unity at p = 0 regardless of x_c
        let v0c = gauss(0.0, 1.0, 5.0).evaluate(0.0).unwrap();
        assert!((v0c - v0).norm() < 1e-15);
    }

    #[test]
    fn gaussian_negative_momentum_weight() {
        // Oracle: dense trapezoid of |ψ₀|² over p < 0 with 2^16+1 points.
        let psi = gauss(1.0, 0.25, 0.0);
        let n = (1 << 16) + 1;
        let dp = 4.0 / (n - 1) as f64; // [-4, 0]
        let vals: Vec<f64> =
            (0..n).map(|i| psi.evaluate(-4.0 + i as f64 * dp).unwrap().norm_sqr()).collect();
        let w = trapezoid(&vals, dp);
        // frozen oracle value: Φ(−4) = 3.1671e−5
        assert!((w - 3.167124e-5).abs() < 1e-9, "w = {w:e}");
    }

    #[test]
    fn superposition_is_linear() {
        let a = gauss(5.0, 0.5, 0.0);
        let b = gauss(-5.0, 0.5, 0.0);
        let w = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let s = MomentumWavefunction::superpose(vec![(w, a.clone()), (w, b.clone())]).unwrap();
        for p in [-6.0, -1.0, 0.0, 2.5, 5.0] {
            let lhs = s.evaluate(p).unwrap();
            let rhs = w * a.evaluate(p).unwrap() + w * b.evaluate(p).unwrap();
            assert!((lhs - rhs).norm() < 1e-15);
        }
        // equal superposition of far-separated Gaussians stays unit norm
        let grid = MomentumGrid::new(-15.0, 15.0, 8192).unwrap();
        let n2 = s.norm_squared(&grid).unwrap();
        assert!((n2 - 1.0).abs() < 1e-8, "norm² = {n2}");
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let z = gauss(0.0, 1.0, 0.0).scaled(Complex64::new(0.0, 0.0));
        let grid = MomentumGrid::new(-8.0, 8.0, 1024).unwrap();
        assert_eq!(z.norm_squared(&grid).unwrap(), 0.0);
    }

    #[test]
    fn translate_is_identity_at_zero_and_unimodular() {
        let psi = gauss(2.0, 0.7, 1.5);
        let t0 = psi.translate(0.0);
        let tx = psi.translate(3.2);
        for p in [-1.0, 0.0, 0.5, 2.0, 4.0] {
            let v = psi.evaluate(p).unwrap();
            assert_eq!(t0.evaluate(p).unwrap(), v);
            assert!((tx.evaluate(p).unwrap().norm() - v.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn translate_composes_into_center() {
        // translate(gaussian(p0, σ, x_c), x′) = gaussian(p0, σ, x_c + x′) pointwise
        let a = gauss(5.0, 0.5, 1.0).translate(2.5);
        let b = gauss(5.0, 0.5, 3.5);
        for p in [0.0, 1.0, 4.5, 5.0, 7.25] {
            let (va, vb) = (a.evaluate(p).unwrap(), b.evaluate(p).unwrap());
            assert!((va - vb).norm() < 1e-12, "p={p}: {va} vs {vb}");
        }
    }

    #[test]
    fn time_evolve_identity_and_norm_preservation() {
        let psi = gauss(5.0, 0.5, 0.0);
        let e0 = psi.time_evolve(0.0, 1.0).unwrap();
        for p in [3.0, 5.0, 6.5] {
            assert_eq!(e0.evaluate(p).unwrap(), psi.evaluate(p).unwrap());
        }
        let grid = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        let n0 = psi.norm_squared(&grid).unwrap();
        for dt in [0.3, 2.0, -5.0] {
            let n = psi.time_evolve(dt, 1.0).unwrap().norm_squared(&grid).unwrap();
            assert!((n - n0).abs() < 1e-10);
        }
        assert!(psi.time_evolve(1.0, 0.0).is_err());
        assert!(psi.time_evolve(1.0, -2.0).is_err());
    }

    #[test]
    fn evolved_gaussian_spreads_at_analytic_rate() {
        // σ_x(t) = (1/(2σ_p))·√(1 + (2σ_p² t/m)²), cross-checked by a
        // numerical Fourier transform of the evolved state.
        let (sigma_p, m, t) = (0.5, 1.0, 2.0);
        let psi = gauss(0.0, sigma_p, 0.0).time_evolve(t, m).unwrap();
        let grid = MomentumGrid::new(-8.0, 8.0, 4096).unwrap();
        // |ψ(x,t)|² second moment by direct Fourier quadrature
        let nx = 2001;
        let (x_lo, x_hi) = (-20.0, 20.0);
        let dx = (x_hi - x_lo) / (nx - 1) as f64;
        let dp = grid.dp();
        let mut m0 = 0.0;
        let mut m2 = 0.0;
        for i in 0..nx {
            let x = x_lo + i as f64 * dx;
            let mut amp = Complex64::new(0.0, 0.0);
            for (k, p) in grid.nodes().enumerate() {
                let w = if k == 0 || k == grid.n_points() - 1 { 0.5 } else { 1.0 };
                amp += w * psi.evaluate(p).unwrap() * cis(p * x);
            }
            amp *= dp / (TWO_PI).sqrt();
            let d = amp.norm_sqr();
            let tw = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            m0 += tw * d;
            m2 += tw * d * x * x;
        }
        let var = m2 / m0;
        let sigma_x = (1.0 / (2.0 * sigma_p)) * (1.0 + (2.0 * sigma_p * sigma_p * t / m).powi(2)).sqrt();
        assert!(
            (var.sqrt() - sigma_x).abs() / sigma_x < 1e-6,
            "measured {} expected {sigma_x}",
            var.sqrt()
        );
    }

    #[test]
    fn tabulated_interpolates_and_guards_domain() {
        let grid = MomentumGrid::new(0.0, 1.0, 64).unwrap();
        let samples: Vec<Complex64> =
            grid.nodes().map(|p| Complex64::new(2.0 * p, -p)).collect();
        let psi = MomentumWavefunction::tabulated(grid, samples).unwrap();
        // linear data is reproduced exactly between nodes
        let v = psi.evaluate(0.51).unwrap();
        assert!((v - Complex64::new(1.02, -0.51)).norm() < 1e-12);
        assert!(psi.evaluate(1.5).is_err());
        assert!(psi.evaluate(-0.1).is_err());
    }

    #[test]
    fn norm_converges_once_grid_resolves_sigma() {
        // doubling n_points changes norm² by < 1e−10 once Δp < σ_p/8
        let psi = gauss(5.0, 0.5, 0.0);
        let coarse = MomentumGrid::new(-5.0, 15.0, 512).unwrap(); // Δp ≈ 0.039 < σ/8
        let fine = coarse.refined();
        let a = psi.norm_squared(&coarse).unwrap();
        let b = psi.norm_squared(&fine).unwrap();
        assert!(coarse.dp() < 0.5 / 8.0);
        assert!((a - b).abs() < 1e-10, "Δ = {:e}", (a - b).abs());
    }

    #[test]
    fn sector_scaled_zeroes_one_side() {
        let psi = gauss(0.0, 1.0, 0.0);
        let plus_only = psi.sector_scaled(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(plus_only.evaluate(-1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(plus_only.evaluate(0.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!((plus_only.evaluate(1.0).unwrap() - psi.evaluate(1.0).unwrap()).norm() < 1e-15);
        // projecting twice is pointwise the same as projecting once
        let twice = plus_only.sector_scaled(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for p in [-2.0, -0.5, 0.0, 0.5, 2.0] {
            assert_eq!(twice.evaluate(p).unwrap(), plus_only.evaluate(p).unwrap());
        }
    }
}

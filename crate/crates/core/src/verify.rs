//! The runnable invariant suite behind `toa verify`: every module-level
//! invariant is executed against concrete scenarios and reported as a
//! pass/fail check with its measured value and threshold.

use num_complex::Complex64;
use std::time::Instant;

use crate::distributions::{
    naive_norm_crosscheck, relational_toa, total_variation_distance,
};
use crate::error::Result;
use crate::grid::{trapezoid, MomentumGrid, TimeGrid};
use crate::oscillatory::{method_crosscheck, toa_amplitude_batch, QuadratureMethod};
use crate::physical_state::{
    physical_inner_product, PhysicalState, Sector, CLOCK_POVM_NORMALIZATION,
};
use crate::reduction::{
    general_reduce, inverse_position_reduce, naive_reduce, position_reduce, ReductionKernel,
};
use crate::wavepacket::MomentumWavefunction;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Grid sizing of the suite: `Quick` runs on 1024-point momentum grids,
/// `Full` on 8192-point grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl VerifyLevel {
    pub fn n_q(self) -> usize {
        match self {
            VerifyLevel::Quick => 1024,
            VerifyLevel::Full => 8192,
        }
    }

    fn n_t(self) -> usize {
        match self {
            VerifyLevel::Quick => 256,
            VerifyLevel::Full => 1024,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            VerifyLevel::Quick => "quick",
            VerifyLevel::Full => "full",
        }
    }
}

impl std::str::FromStr for VerifyLevel {
    type Err = crate::error::ToaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(VerifyLevel::Quick),
            "full" => Ok(VerifyLevel::Full),
            other => Err(crate::error::ToaError::InvalidParameter {
                name: "level",
                reason: format!("unknown level `{other}` (expected quick|full)"),
            }),
        }
    }
}

/// How a measured value relates to its threshold for the check to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Below,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct InvariantCheck {
    pub id: &'static str,
    pub description: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl InvariantCheck {
    fn new(
        id: &'static str,
        description: &'static str,
        measured: f64,
        threshold: f64,
        comparison: Comparison,
    ) -> Self {
        let passed = match comparison {
            Comparison::Below => measured < threshold,
            Comparison::AtLeast => measured >= threshold,
        };
        Self { id, description, measured, threshold, comparison, passed }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<InvariantCheck>,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }
}

/// Deliberate defects injectable into the suite, so tests can demonstrate
/// that a broken computation is caught and named.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// A sign error in the minus-sector weight of the physical-state
    /// expansion: the two sector amplitudes then combine coherently as
    /// |A₊ − A₋|² instead of |A₊|² + |A₋|².
    SectorWeightSign,
}

/// Direct evaluation of the arrival density written straight from its
/// defining integral:
/// P(t) = (1/2π)·Σ_σ |∫₀^∞ dq √(q/m)·ψ₀(σq)·e^{i(σq x0 − q² t/(2m))}|².
/// A plain scalar quadrature per time node, sharing nothing with the
/// batched engine or its transform path; the independent arbiter for the
/// equivalence check.
pub fn kijowski_reference(s: &PhysicalState, x0: f64, ts: &[f64]) -> Result<Vec<f64>> {
    let m = s.mass();
    let psi = s.psi0();
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut dens = 0.0;
        for sec in Sector::BOTH {
            let axis = s.half_axis(sec);
            if axis.is_empty() {
                continue;
            }
            let sign = sec.sign();
            let n = axis.qs.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &q) in axis.qs.iter().enumerate() {
                let mut w = if k == 0 || k == n - 1 { 0.5 * axis.dq } else { axis.dq };
                if k == 0 && axis.zero_adjacent {
                    // the integrand vanishes like √q at the origin, so the
                    // [0, q1] cell contributes q1·f(q1)/2
                    w += 0.5 * axis.qs[0];
                }
                let f = (q / m).sqrt()
                    * psi.evaluate(sign * q)?
                    * cis(sign * q * x0 - q * q * t / (2.0 * m));
                acc += w * f;
            }
            dens += acc.norm_sqr();
        }
        out.push(CLOCK_POVM_NORMALIZATION * dens);
    }
    Ok(out)
}

fn gauss(p0: f64, sigma: f64, xc: f64) -> MomentumWavefunction {
    MomentumWavefunction::gaussian(p0, sigma, xc).expect("valid width")
}

fn lift_on_support(psi: MomentumWavefunction, n_q: usize) -> PhysicalState {
    let grid = psi.recommended_grid(n_q).expect("valid grid");
    PhysicalState::lift(psi, 1.0, grid).expect("valid state")
}

struct Suite {
    level: VerifyLevel,
    fault: Fault,
    checks: Vec<InvariantCheck>,
}

impl Suite {
    fn push(
        &mut self,
        id: &'static str,
        description: &'static str,
        measured: f64,
        threshold: f64,
        comparison: Comparison,
    ) {
        self.checks.push(InvariantCheck::new(id, description, measured, threshold, comparison));
    }

    fn demo_state(&self) -> PhysicalState {
        lift_on_support(gauss(5.0, 0.5, 0.0), self.level.n_q())
    }

    fn broad_state(&self) -> PhysicalState {
        lift_on_support(gauss(0.0, 1.0, 0.0), self.level.n_q())
    }

    fn two_sector_state(&self) -> PhysicalState {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = MomentumWavefunction::superpose(vec![
            (w, gauss(4.0, 0.5, 0.0)),
            (w, gauss(-4.0, 0.5, 0.0)),
        ])
        .expect("non-empty");
        lift_on_support(psi, self.level.n_q())
    }

    fn counter_propagating(&self) -> PhysicalState {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = MomentumWavefunction::superpose(vec![
            (w, gauss(5.0, 0.5, -10.0)),
            (w, gauss(-5.0, 0.5, 10.0)),
        ])
        .expect("non-empty");
        lift_on_support(psi, self.level.n_q())
    }

    fn gaussian_suite(&self) -> Vec<PhysicalState> {
        vec![
            self.demo_state(),
            lift_on_support(gauss(4.0, 0.4, 1.0), self.level.n_q()),
            lift_on_support(gauss(6.0, 0.6, -2.0), self.level.n_q()),
        ]
    }

    // ---- wavepacket ----

    fn wavepacket_unitarity(&mut self) -> Result<()> {
        let mut max_dev = 0.0f64;
        for psi in [gauss(5.0, 0.5, 0.0), gauss(0.0, 1.0, 2.0), gauss(-3.0, 0.7, -1.0)] {
            let grid = psi.recommended_grid(self.level.n_q())?;
            let n0 = psi.norm_squared(&grid)?;
            for xs in [-2.0, 3.7] {
                max_dev = max_dev.max((psi.translate(xs).norm_squared(&grid)? - n0).abs());
            }
            for dt in [0.5, -4.0] {
                max_dev =
                    max_dev.max((psi.time_evolve(dt, 1.0)?.norm_squared(&grid)? - n0).abs());
            }
        }
        self.push(
            "wavepacket.unitarity",
            "norm_squared invariant under translate and time_evolve",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    fn wavepacket_linearity(&mut self) -> Result<()> {
        let a = gauss(5.0, 0.5, 0.0);
        let b = gauss(-2.0, 0.8, 1.0);
        let (wa, wb) = (Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.7));
        let sup = MomentumWavefunction::superpose(vec![(wa, a.clone()), (wb, b.clone())])?;
        let mut max_dev = 0.0f64;
        for p in [-4.0, -1.0, 0.0, 2.5, 5.5] {
            let direct = sup.evaluate(p)?;
            let sum = wa * a.evaluate(p)? + wb * b.evaluate(p)?;
            max_dev = max_dev.max((direct - sum).norm());
        }
        self.push(
            "wavepacket.linearity",
            "superposition evaluation equals the weighted component sum",
            max_dev,
            1e-14,
            Comparison::Below,
        );
        Ok(())
    }

    fn wavepacket_grid_convergence(&mut self) -> Result<()> {
        let psi = gauss(5.0, 0.5, 0.0);
        let coarse = MomentumGrid::new(-5.0, 15.0, self.level.n_q())?;
        let fine = coarse.refined();
        let dev = (psi.norm_squared(&coarse)? - psi.norm_squared(&fine)?).abs();
        self.push(
            "wavepacket.grid-convergence",
            "doubling n_points moves a resolved Gaussian norm by < 1e-10",
            dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    // ---- physical_state ----

    fn physical_norm_equality(&mut self) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(2026);
        let grid = MomentumGrid::new(-20.0, 20.0, self.level.n_q().max(2048))?;
        let mut max_dev = 0.0f64;
        for _ in 0..20 {
            let mut parts = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                parts.push((
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    gauss(
                        rng.gen_range(-6.0..6.0),
                        rng.gen_range(0.3..1.5),
                        rng.gen_range(-3.0..3.0),
                    ),
                ));
            }
            let s = PhysicalState::lift(MomentumWavefunction::superpose(parts)?, 1.0, grid)?;
            let ip = physical_inner_product(&s, &s)?;
            let l2 = s.psi0().norm_squared(&grid)?;
            max_dev = max_dev.max((ip.re - l2).abs());
        }
        self.push(
            "physical.norm-equality",
            "physical inner product of a state with itself equals the L2 norm of psi0",
            max_dev,
            1e-9,
            Comparison::Below,
        );
        Ok(())
    }

    fn physical_projector_completeness(&mut self) -> Result<()> {
        let mut max_dev = 0.0f64;
        for s in [self.demo_state(), self.broad_state(), self.two_sector_state()] {
            max_dev = max_dev.max((s.w_plus() + s.w_minus() - 1.0).abs());
        }
        self.push(
            "physical.projector-completeness",
            "sector weights of a lifted state sum to one",
            max_dev,
            1e-8,
            Comparison::Below,
        );
        Ok(())
    }

    fn physical_superselection_weights(&mut self) -> Result<()> {
        let s = self.two_sector_state();
        let mut max_dev = 0.0f64;
        for phi in [0.4, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let r = s.apply_sector_phase(Sector::Minus, phi);
            max_dev = max_dev.max((r.w_plus() - s.w_plus()).abs());
            max_dev = max_dev.max((r.w_minus() - s.w_minus()).abs());
            for sec in Sector::BOTH {
                let a = position_reduce(&s, 1.0, sec)?.norm_squared();
                let b = position_reduce(&r, 1.0, sec)?.norm_squared();
                max_dev = max_dev.max((a - b).abs());
            }
        }
        self.push(
            "physical.superselection-weights",
            "sector weights and per-sector clock norms ignore sector-local phases",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    // ---- reduction ----

    fn reduction_partial_isometry(&mut self) -> Result<()> {
        let mut max_dev = 0.0f64;
        for s in [self.demo_state(), self.broad_state(), self.two_sector_state()] {
            for x0 in [-3.0, 0.0, 7.0] {
                let total: f64 = Sector::BOTH
                    .iter()
                    .map(|&sec| position_reduce(&s, x0, sec).map(|c| c.norm_squared()))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .sum();
                max_dev = max_dev.max((total - 1.0).abs());
            }
        }
        self.push(
            "reduction.partial-isometry",
            "sector clock norms sum to the physical norm at every x0",
            max_dev,
            1e-8,
            Comparison::Below,
        );
        Ok(())
    }

    fn reduction_translation_covariance(&mut self) -> Result<()> {
        let x0 = 2.0;
        let mut max_dev = 0.0f64;
        for xp in [-2.0, 0.5, 10.0] {
            let s = self.demo_state();
            let grid = *s.grid();
            let translated =
                PhysicalState::lift(gauss(5.0, 0.5, 0.0).translate(xp), 1.0, grid)?;
            for sec in Sector::BOTH {
                let a = position_reduce(&translated, x0, sec)?;
                let b = position_reduce(&s, x0 - xp, sec)?;
                for (u, v) in a.amplitudes.iter().zip(b.amplitudes.iter()) {
                    max_dev = max_dev.max((u - v).norm());
                }
            }
        }
        self.push(
            "reduction.translation-covariance",
            "reducing a translated state equals reducing at the shifted position",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    fn reduction_inverse_identity(&mut self) -> Result<()> {
        let s = self.two_sector_state();
        let x0 = 4.0;
        let rp = inverse_position_reduce(&position_reduce(&s, x0, Sector::Plus)?)?;
        let rm = inverse_position_reduce(&position_reduce(&s, x0, Sector::Minus)?)?;
        let mut max_dev = 0.0f64;
        for p in s.grid().nodes() {
            if p == 0.0 {
                continue;
            }
            let rec = rp.psi0().evaluate(p)? + rm.psi0().evaluate(p)?;
            max_dev = max_dev.max((rec - s.psi0().evaluate(p)?).norm());
        }
        self.push(
            "reduction.inverse-identity",
            "summing the sector inverses reconstructs the state pointwise",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    fn reduction_isometry_iff(&mut self) -> Result<()> {
        let s = self.two_sector_state();
        let m = s.mass();
        let iso = ReductionKernel::covariant_time(m);
        let mut max_dev = 0.0f64;
        for sec in Sector::BOTH {
            let g = general_reduce(&s, &iso, 1.3, sec)?;
            max_dev = max_dev.max((g.norm_squared() - s.sector_weight(sec)).abs());
        }
        self.push(
            "reduction.isometry-weight",
            "the sqrt(sigma p/m) weight preserves sector norms",
            max_dev,
            1e-8,
            Comparison::Below,
        );

        let perturbed = ReductionKernel::new(
            move |_s, q| (q / m).sqrt() * (1.0 + 0.1 * q.sin()),
            |_s, _q, _y| 0.0,
        );
        let mut max_violation = 0.0f64;
        for st in [self.demo_state(), self.two_sector_state()] {
            for sec in Sector::BOTH {
                if st.sector_weight(sec) < 1e-12 {
                    continue;
                }
                let g = general_reduce(&st, &perturbed, 0.0, sec)?;
                max_violation = max_violation.max((g.norm_squared() - st.sector_weight(sec)).abs());
            }
        }
        self.push(
            "reduction.isometry-perturbed",
            "a perturbed weight sqrt(q/m)(1+0.1 sin q) breaks the isometry measurably",
            max_violation,
            1e-3,
            Comparison::AtLeast,
        );
        Ok(())
    }

    fn reduction_phase_freedom(&mut self) -> Result<()> {
        let s = self.demo_state();
        let m = s.mass();
        let base = ReductionKernel::position(m);
        let phased = ReductionKernel::new(
            move |_s, q| (q / m).sqrt(),
            move |sec, q, y| -y * sec.sign() * q + (2.0 * q).cos() + q.powi(2).sin(),
        );
        let mut max_dev = 0.0f64;
        for sec in Sector::BOTH {
            let a = general_reduce(&s, &base, 2.0, sec)?.norm_squared();
            let b = general_reduce(&s, &phased, 2.0, sec)?.norm_squared();
            max_dev = max_dev.max((a - b).abs());
        }
        self.push(
            "reduction.phase-freedom",
            "adding a y-independent phase to the kernel leaves sector norms unchanged",
            max_dev,
            1e-12,
            Comparison::Below,
        );
        Ok(())
    }

    // ---- oscillatory ----

    fn oscillatory_plancherel(&mut self) -> Result<()> {
        let s = self.demo_state();
        let tg = TimeGrid::new(-2.0, 6.0, 4 * self.level.n_t())?;
        let mut total = 0.0;
        for sec in Sector::BOTH {
            let a = toa_amplitude_batch(&s, sec, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
            let dens: Vec<f64> = a.iter().map(|v| v.norm_sqr()).collect();
            total += trapezoid(&dens, tg.dt());
        }
        total *= CLOCK_POVM_NORMALIZATION;
        self.push(
            "oscillatory.plancherel",
            "per-sector amplitude masses integrate to the state norm",
            (total - 1.0).abs(),
            1e-4,
            Comparison::Below,
        );
        Ok(())
    }

    fn oscillatory_convergence_order(&mut self) -> Result<()> {
        let tg = TimeGrid::new(0.0, 3.0, 33)?;
        let x0 = 6.0;
        let batch = |n: usize| -> Result<Vec<Complex64>> {
            let grid = MomentumGrid::new(2.0, 8.0, n)?;
            let s = PhysicalState::lift(gauss(5.0, 1.5, 0.0), 1.0, grid)?;
            toa_amplitude_batch(&s, Sector::Plus, x0, &tg, QuadratureMethod::DirectTrapezoid)
        };
        let n_base = match self.level {
            VerifyLevel::Quick => 513,
            VerifyLevel::Full => 1025,
        };
        let reference = batch(16 * (n_base - 1) + 1)?;
        let err = |a: &[Complex64]| -> f64 {
            a.iter().zip(reference.iter()).map(|(u, v)| (u - v).norm()).fold(0.0f64, f64::max)
        };
        let e1 = err(&batch(n_base)?);
        let e2 = err(&batch(2 * (n_base - 1) + 1)?);
        let ratio = if e2 > 0.0 { e1 / e2 } else { f64::INFINITY };
        self.push(
            "oscillatory.convergence-order",
            "halving dq cuts the direct-method error at least fourfold",
            ratio,
            4.0,
            Comparison::AtLeast,
        );
        Ok(())
    }

    fn oscillatory_x0_phase_shift(&mut self) -> Result<()> {
        let s = self.demo_state();
        let grid = *s.grid();
        let translated = PhysicalState::lift(gauss(5.0, 0.5, 0.0).translate(-10.0), 1.0, grid)?;
        let tg = TimeGrid::new(0.0, 4.0, self.level.n_t())?;
        let a = toa_amplitude_batch(&s, Sector::Plus, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let b = toa_amplitude_batch(
            &translated,
            Sector::Plus,
            0.0,
            &tg,
            QuadratureMethod::DirectTrapezoid,
        )?;
        let max_dev =
            a.iter().zip(b.iter()).map(|(u, v)| (u - v).norm()).fold(0.0f64, f64::max);
        self.push(
            "oscillatory.x0-phase-shift",
            "the arrival-position phase equals a spatial translation of the state",
            max_dev,
            1e-12,
            Comparison::Below,
        );
        Ok(())
    }

    fn oscillatory_method_crosscheck(&mut self) -> Result<()> {
        let tg = TimeGrid::new(0.0, 4.0, self.level.n_t())?;
        let mut max_dev = 0.0f64;
        for s in self.gaussian_suite() {
            for x0 in [0.0, 5.0, 10.0] {
                max_dev = max_dev.max(method_crosscheck(&s, Sector::Plus, x0, &tg)?);
            }
        }
        self.push(
            "oscillatory.method-crosscheck",
            "direct-trapezoid and energy-transform densities agree",
            max_dev,
            1e-6,
            Comparison::Below,
        );
        Ok(())
    }

    // ---- distributions ----

    fn distributions_positivity_and_normalization(&mut self) -> Result<()> {
        let s = self.demo_state();
        let tg = TimeGrid::new(-1.0, 6.0, 4 * self.level.n_t())?;
        let d = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let min_entry = d.total.iter().copied().fold(f64::INFINITY, f64::min);
        self.push(
            "distributions.positivity",
            "every density entry is non-negative",
            min_entry,
            0.0,
            Comparison::AtLeast,
        );
        self.push(
            "distributions.normalization",
            "captured mass is unity on an adequately wide window",
            (d.mass_captured - 1.0).abs(),
            1e-3,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_time_covariance(&mut self) -> Result<()> {
        let s = self.demo_state();
        let grid = *s.grid();
        let dt_shift = 0.5;
        let evolved =
            PhysicalState::lift(s.psi0().time_evolve(dt_shift, s.mass())?, s.mass(), grid)?;
        let tg = TimeGrid::new(0.0, 3.0, self.level.n_t())?;
        let a = relational_toa(&evolved, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let b = relational_toa(&s, 10.0, &tg.shifted(dt_shift), QuadratureMethod::DirectTrapezoid)?;
        let max_dev = a
            .total
            .iter()
            .zip(b.total.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        self.push(
            "distributions.time-covariance",
            "evolving the state shifts the arrival density rigidly in time",
            max_dev,
            1e-6,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_spatial_covariance(&mut self) -> Result<()> {
        let s = self.demo_state();
        let grid = *s.grid();
        let xp = 3.0;
        let translated = PhysicalState::lift(gauss(5.0, 0.5, 0.0).translate(xp), 1.0, grid)?;
        let tg = TimeGrid::new(0.0, 4.0, self.level.n_t())?;
        let a = relational_toa(&translated, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let b = relational_toa(&s, 10.0 - xp, &tg, QuadratureMethod::DirectTrapezoid)?;
        let max_dev = a
            .total
            .iter()
            .zip(b.total.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        self.push(
            "distributions.spatial-covariance",
            "translating the state equals shifting the arrival position",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_superselection(&mut self) -> Result<()> {
        let s = self.counter_propagating();
        let tg = TimeGrid::new(0.0, 4.0, self.level.n_t())?;
        let density = |state: &PhysicalState| -> Result<Vec<f64>> {
            match self.fault {
                Fault::None => {
                    Ok(relational_toa(state, 0.0, &tg, QuadratureMethod::DirectTrapezoid)?.total)
                }
                Fault::SectorWeightSign => {
                    // the injected defect: sector amplitudes combined
                    // coherently with a relative sign
                    let ap = toa_amplitude_batch(
                        state,
                        Sector::Plus,
                        0.0,
                        &tg,
                        QuadratureMethod::DirectTrapezoid,
                    )?;
                    let am = toa_amplitude_batch(
                        state,
                        Sector::Minus,
                        0.0,
                        &tg,
                        QuadratureMethod::DirectTrapezoid,
                    )?;
                    Ok(ap
                        .iter()
                        .zip(am.iter())
                        .map(|(p, m)| CLOCK_POVM_NORMALIZATION * (p - m).norm_sqr())
                        .collect())
                }
            }
        };
        let base = density(&s)?;
        let mut max_dev = 0.0f64;
        for phi in [std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let rotated = s.apply_sector_phase(Sector::Minus, phi);
            let d = density(&rotated)?;
            max_dev = max_dev.max(
                base.iter().zip(d.iter()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max),
            );
        }
        self.push(
            "distributions.superselection",
            "the total arrival density ignores inter-sector phase rotations",
            max_dev,
            1e-10,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_kijowski_equivalence(&mut self) -> Result<()> {
        let tg = TimeGrid::new(0.0, 4.0, self.level.n_t())?;
        let ts: Vec<f64> = tg.nodes().collect();
        let mut max_rel = 0.0f64;
        for s in self.gaussian_suite() {
            for x0 in [0.0, 5.0, 10.0] {
                let reference = kijowski_reference(&s, x0, &ts)?;
                let peak = reference.iter().copied().fold(0.0f64, f64::max);
                for method in
                    [QuadratureMethod::DirectTrapezoid, QuadratureMethod::EnergyTransform]
                {
                    let d = relational_toa(&s, x0, &tg, method)?;
                    let dev = d
                        .total
                        .iter()
                        .zip(reference.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    max_rel = max_rel.max(dev / peak);
                }
            }
        }
        self.push(
            "distributions.kijowski-equivalence",
            "an independent direct coding of the density matches the engine",
            max_rel,
            1e-6,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_naive_crosscheck(&mut self) -> Result<()> {
        let grid = MomentumGrid::new(-5.0, 15.0, self.level.n_q().max(8192))?;
        let s = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid)?;
        let tg = TimeGrid::new(-2.0, 8.0, 2 * self.level.n_t())?;
        let c = naive_norm_crosscheck(&s, 10.0, &tg)?;
        self.push(
            "distributions.naive-crosscheck",
            "integrated position density at x0 equals the naive reduction norm",
            c.rel_dev,
            0.02,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_naive_state_dependence(&mut self) -> Result<()> {
        let grid = MomentumGrid::new(-5.0, 15.0, self.level.n_q().max(2048))?;
        let a = PhysicalState::lift(gauss(5.0, 0.5, 0.0), 1.0, grid)?;
        let b = PhysicalState::lift(gauss(2.5, 0.25, 0.0), 1.0, grid)?;
        let na = naive_reduce(&a, 10.0)?.norm_squared();
        let nb = naive_reduce(&b, 10.0)?.norm_squared();
        self.push(
            "distributions.naive-state-dependence",
            "the naive reduction norm depends on the state (no universal normalization)",
            (na - nb).abs() / na,
            0.10,
            Comparison::AtLeast,
        );
        Ok(())
    }

    fn distributions_quasiclassical_far_field(&mut self) -> Result<()> {
        // far-field regime x0 >> p0/(4 sigma_p^2): the classical
        // momentum-mapped density matches the relational one. The wide
        // support and window force a finer grid through the phase guard.
        let psi = gauss(5.0, 1.2, 0.0);
        let s = lift_on_support(psi, self.level.n_q().max(4096));
        let tg = TimeGrid::new(0.01, 8.0, 4 * self.level.n_t())?;
        let rel = relational_toa(&s, 10.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let sc = crate::distributions::semiclassical_toa(&s, 10.0, &tg)?;
        let tv = total_variation_distance(&rel.total, &sc, tg.dt());
        self.push(
            "distributions.quasiclassical-far-field",
            "relational and classical trajectory densities agree in the far field",
            tv,
            0.05,
            Comparison::Below,
        );
        Ok(())
    }

    fn distributions_backflow_contrast(&mut self) -> Result<()> {
        let a = 0.6f64;
        let norm = 1.0 / (1.0 + a * a).sqrt();
        let psi = MomentumWavefunction::superpose(vec![
            (Complex64::new(norm, 0.0), gauss(1.0, 0.05, 0.0)),
            (Complex64::new(norm * a, 0.0), gauss(3.0, 0.05, 0.0)),
        ])?;
        let grid = MomentumGrid::new(0.2, 3.8, self.level.n_q())?;
        let s = PhysicalState::lift(psi, 1.0, grid)?;
        let tg = TimeGrid::new(-2.0, 2.0, 2 * self.level.n_t())?;
        let flux = crate::distributions::flux_toa(&s, 0.0, &tg)?;
        let d = relational_toa(&s, 0.0, &tg, QuadratureMethod::DirectTrapezoid)?;
        let min_flux = flux.iter().copied().fold(f64::INFINITY, f64::min);
        let min_density = d.total.iter().copied().fold(f64::INFINITY, f64::min);
        // passes when the current goes negative while the density does not
        let contrast = if min_density >= 0.0 { -min_flux } else { -1.0 };
        self.push(
            "distributions.backflow-contrast",
            "a plus-only superposition shows negative current with a non-negative density",
            contrast,
            1e-4,
            Comparison::AtLeast,
        );
        Ok(())
    }
}

pub fn run_verify(level: VerifyLevel) -> Result<VerifyReport> {
    run_verify_with_fault(level, Fault::None)
}

/// Run the suite with an injectable defect; used by the fault-injection
/// tests to show that broken computations are caught and named.
pub fn run_verify_with_fault(level: VerifyLevel, fault: Fault) -> Result<VerifyReport> {
    let start = Instant::now();
    let mut suite = Suite { level, fault, checks: Vec::new() };
    suite.wavepacket_unitarity()?;
    suite.wavepacket_linearity()?;
    suite.wavepacket_grid_convergence()?;
    suite.physical_norm_equality()?;
    suite.physical_projector_completeness()?;
    suite.physical_superselection_weights()?;
    suite.reduction_partial_isometry()?;
    suite.reduction_translation_covariance()?;
    suite.reduction_inverse_identity()?;
    suite.reduction_isometry_iff()?;
    suite.reduction_phase_freedom()?;
    suite.oscillatory_plancherel()?;
    suite.oscillatory_convergence_order()?;
    suite.oscillatory_x0_phase_shift()?;
    suite.oscillatory_method_crosscheck()?;
    suite.distributions_positivity_and_normalization()?;
    suite.distributions_time_covariance()?;
    suite.distributions_spatial_covariance()?;
    suite.distributions_superselection()?;
    suite.distributions_kijowski_equivalence()?;
    suite.distributions_naive_crosscheck()?;
    suite.distributions_naive_state_dependence()?;
    suite.distributions_quasiclassical_far_field()?;
    suite.distributions_backflow_contrast()?;
    Ok(VerifyReport { level, checks: suite.checks, elapsed_seconds: start.elapsed().as_secs_f64() })
}

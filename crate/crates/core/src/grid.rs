use crate::error::{Result, ToaError};

/// Uniform grid over a momentum interval. Discretizes the continuum
/// momentum label carried by a wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    p_min: f64,
    p_max: f64,
    n_points: usize,
}

impl MomentumGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<Self> {
        if !(p_min < p_max) || !p_min.is_finite() || !p_max.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "p_min/p_max",
                reason: format!("require p_min < p_max, got [{p_min}, {p_max}]"),
            });
        }
        if n_points < Self::MIN_POINTS {
            return Err(ToaError::InvalidParameter {
                name: "n_points",
                reason: format!("require n_points >= {}, got {n_points}", Self::MIN_POINTS),
            });
        }
        Ok(Self { p_min, p_max, n_points })
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing Δp.
    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_points - 1) as f64
    }

    /// Node i as a convex combination of the endpoints. This form hits the
    /// endpoints exactly and makes mirrored grids produce bitwise-negated
    /// node sets, which the parity identities downstream rely on.
    pub fn node(&self, i: usize) -> f64 {
        let n1 = (self.n_points - 1) as f64;
        (self.p_min * (n1 - i as f64) + self.p_max * i as f64) / n1
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.node(i))
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.p_min && p <= self.p_max
    }

    /// Same interval with twice as many intervals (2n − 1 nodes), so every
    /// original node is retained. Used by convergence checks.
    pub fn refined(&self) -> Self {
        Self { p_min: self.p_min, p_max: self.p_max, n_points: 2 * self.n_points - 1 }
    }
}

/// Uniform grid of clock readings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    n_t: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_t: usize) -> Result<Self> {
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "t_min/t_max",
                reason: format!("require t_min < t_max, got [{t_min}, {t_max}]"),
            });
        }
        if n_t < 2 {
            return Err(ToaError::InvalidParameter {
                name: "n_t",
                reason: format!("require n_t >= 2, got {n_t}"),
            });
        }
        Ok(Self { t_min, t_max, n_t })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        let n1 = (self.n_t - 1) as f64;
        (self.t_min * (n1 - j as f64) + self.t_max * j as f64) / n1
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_t).map(|j| self.node(j))
    }

    /// Largest |t| on the grid; sets the fastest quadratic-phase rate.
    pub fn t_abs_max(&self) -> f64 {
        self.t_min.abs().max(self.t_max.abs())
    }

    /// The grid shifted rigidly by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self { t_min: self.t_min + shift, t_max: self.t_max + shift, n_t: self.n_t }
    }
}

/// Uniform grid of positions, used by the conditional position density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionGrid {
    x_min: f64,
    x_max: f64,
    n_x: usize,
}

impl PositionGrid {
    pub fn new(x_min: f64, x_max: f64, n_x: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(ToaError::InvalidParameter {
                name: "x_min/x_max",
                reason: format!("require x_min < x_max, got [{x_min}, {x_max}]"),
            });
        }
        if n_x < 2 {
            return Err(ToaError::InvalidParameter {
                name: "n_x",
                reason: format!("require n_x >= 2, got {n_x}"),
            });
        }
        Ok(Self { x_min, x_max, n_x })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        let n1 = (self.n_x - 1) as f64;
        (self.x_min * (n1 - i as f64) + self.x_max * i as f64) / n1
    }

    pub fn x_abs_max(&self) -> f64 {
        self.x_min.abs().max(self.x_max.abs())
    }
}

/// Composite trapezoid rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => 0.0,
        n => {
            let mut acc = 0.5 * (values[0] + values[n - 1]);
            for v in &values[1..n - 1] {
                acc += v;
            }
            acc * spacing
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(MomentumGrid::new(1.0, 1.0, 64).is_err());
        assert!(MomentumGrid::new(2.0, 1.0, 64).is_err());
        assert!(MomentumGrid::new(0.0, 1.0, 8).is_err());
        assert!(TimeGrid::new(0.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_nodes_span_interval() {
        let g = MomentumGrid::new(-5.0, 15.0, 4096).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes.len(), 4096);
        assert_eq!(nodes[0], -5.0);
        assert!((nodes[4095] - 15.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        // ∫0^1 x dx = 1/2, exact for the trapezoid rule
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        assert!((trapezoid(&vals, h) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn refined_grid_keeps_nodes() {
        let g = MomentumGrid::new(0.0, 1.0, 17).unwrap();
        let r = g.refined();
        assert_eq!(r.n_points(), 33);
        assert!((r.node(2) - g.node(1)).abs() < 1e-15);
    }
}

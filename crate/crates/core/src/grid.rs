use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1D grid `x_k = x0 + k·dx`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(dx > 0.0) || !x0.is_finite() || !dx.is_finite() {
            return Err(Error::BadParameter(format!("grid spacing must be positive and finite (x0={x0}, dx={dx})")));
        }
        Ok(Self { x0, dx, n })
    }

    /// `n` nodes spanning `[min, max]` inclusive.
    pub fn span(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::EmptyGrid);
        }
        Self::new(min, (max - min) / (n - 1) as f64, n)
    }

    /// `n` cell midpoints of `[−half_width, half_width]`.
    pub fn midpoints(half_width: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        let dx = 2.0 * half_width / n as f64;
        Self::new(-half_width + 0.5 * dx, dx, n)
    }

    pub fn node(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    pub fn last(&self) -> f64 {
        self.node(self.n - 1)
    }

    /// Trapezoid-rule integral of samples on this grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        match values.len() {
            0 => 0.0,
            1 => values[0] * self.dx,
            len => self.dx * (values[1..len - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[len - 1])),
        }
    }

    /// Linear interpolation, zero outside the grid.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let s = (x - self.x0) / self.dx;
        if s < 0.0 || s > (self.n - 1) as f64 {
            return 0.0;
        }
        let k = (s.floor() as usize).min(self.n.saturating_sub(2));
        if self.n == 1 {
            return values[0];
        }
        let f = s - k as f64;
        values[k] * (1.0 - f) + values[k + 1] * f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_and_trapezoid() {
        let g = UniformGrid::span(0.0, 1.0, 11).unwrap();
        assert!((g.last() - 1.0).abs() < 1e-15);
        let v: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
        // trapezoid of x^2 with h = 0.1: 1/3 + h^2/6
        assert!((g.trapezoid(&v) - (1.0 / 3.0 + 0.01 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn midpoints_are_symmetric() {
        let g = UniformGrid::midpoints(6.0, 64).unwrap();
        assert!((g.node(0) + g.last()).abs() < 1e-14);
        assert!((g.dx - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn interpolation_is_linear_and_zero_outside() {
        let g = UniformGrid::span(0.0, 2.0, 3).unwrap();
        let v = [0.0, 2.0, 6.0];
        assert!((g.interpolate(&v, 1.5) - 4.0).abs() < 1e-15);
        assert!((g.interpolate(&v, 2.0) - 6.0).abs() < 1e-15);
        assert_eq!(g.interpolate(&v, 2.5), 0.0);
        assert_eq!(g.interpolate(&v, -0.1), 0.0);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(UniformGrid::new(0.0, 1.0, 0), Err(Error::EmptyGrid)));
        assert!(UniformGrid::new(0.0, 0.0, 4).is_err());
    }
}

//! Equal-weight periodic trapezoid rule on the fundamental rectangle.
//!
//! Integrands built from the Hermitian density are smooth and doubly periodic,
//! so the equal-weight rule converges spectrally. Sampling runs in parallel;
//! every reduction is a fixed-order pairwise sum so results are reproducible.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;

/// Uniform periodic grid `x_i = i L1 / nx`, `y_j = j L2 / ny`.
///
/// Samples are stored one y-line after another: index `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    geometry: TorusGeometry,
    nx: usize,
    ny: usize,
}

impl TorusGrid {
    pub const MIN_POINTS: usize = 4;

    pub fn new(geometry: TorusGeometry, nx: usize, ny: usize) -> Result<Self> {
        if nx < Self::MIN_POINTS || ny < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be at least {0}x{0}, got {nx}x{ny}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { geometry, nx, ny })
    }

    /// The default resolution `max(64, 16 N)` in both directions.
    pub fn default_for(geometry: TorusGeometry) -> Self {
        let n = default_resolution(geometry.flux());
        Self {
            geometry,
            nx: n,
            ny: n,
        }
    }

    /// The same grid with twice the points in each direction.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            ny: 2 * self.ny,
            ..*self
        }
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.geometry
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.geometry.l1() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.geometry.l2() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(i as f64 * self.dx(), j as f64 * self.dy())
    }

    pub fn point_at(&self, index: usize) -> Complex64 {
        self.point(index % self.nx, index / self.nx)
    }

    /// Evaluates `f` at every grid point, in storage order.
    pub fn sample<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Complex64) -> T + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|k| f(self.point_at(k)))
            .collect()
    }

    /// Periodic trapezoid integral of `f` over the fundamental rectangle.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let values = self.sample(f);
        pairwise_sum(&values) * self.cell_area()
    }

    /// Integral of already sampled values.
    pub fn integrate_samples(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.len());
        pairwise_sum(values) * self.cell_area()
    }
}

pub fn default_resolution(flux: u32) -> usize {
    64.max(16 * flux as usize)
}

/// Pairwise (cascade) summation with a fixed split order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_tiny_grids() {
        let g = TorusGeometry::square(1).unwrap();
        assert!(TorusGrid::new(g, 3, 8).is_err());
        assert!(TorusGrid::new(g, 4, 4).is_ok());
    }

    #[test]
    fn grid_excludes_endpoint() {
        let g = TorusGeometry::square(2).unwrap();
        let grid = TorusGrid::new(g, 8, 4).unwrap();
        let last = grid.point_at(grid.len() - 1);
        assert!((last.re - 7.0 * g.l1() / 8.0).abs() < 1e-15);
        assert!((last.im - 3.0 * g.l2() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_is_exact_on_low_harmonics() {
        let g = TorusGeometry::with_aspect(3, 2.0).unwrap();
        let grid = TorusGrid::new(g, 16, 12).unwrap();
        let (l1, l2) = (g.l1(), g.l2());
        let integral = grid.integrate(|z| {
            let c = (2.0 * PI * 3.0 * z.re / l1).cos() * (2.0 * PI * 2.0 * z.im / l2).sin();
            Complex64::new(1.0 + c, 0.0)
        });
        assert!((integral.re - g.area()).abs() < 1e-12 * g.area());
        assert!(integral.im.abs() < 1e-15);
    }

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let v: Vec<Complex64> = (0..100).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(4950.0, -4950.0));
        let r: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum_real(&r), 499500.0);
    }
}

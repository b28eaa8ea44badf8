//! Hermitian structure, inner products, Landau levels and density maps.
//!
//! The Hermitian structure is `h(s1, s2) = exp(-|z|^2) conj(s1) s2`; it is a
//! genuine function on the torus, so inner products are integrals over the
//! fundamental rectangle computed with the periodic trapezoid rule.
//!
//! The Hamiltonian is `H = -2 (d - conj(z)) dbar` in units of `hbar omega`
//! (zero-point term dropped). Level `k` is spanned by `(d - conj(z))^k psi_nu`
//! and has energy `2k`.

mod grid_field;
mod section;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub use grid_field::{FieldStats, GridField, GridSidecar, LocalExtrema};
pub use section::{HoloFn, HoloTerm, PolynomialSection};

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::lll_basis::{GroundBasis, Representation};
use crate::quadrature::{pairwise_sum, TorusGrid};

/// Highest Landau level index the crate builds.
pub const MAX_LEVEL: usize = 2;

/// Energy of level `k` in units of `hbar omega`.
pub fn level_energy(k: usize) -> f64 {
    2.0 * k as f64
}

/// `h(s1, s2)(z) = exp(-|z|^2) conj(s1(z)) s2(z)`.
pub fn hermitian_density(s1: &PolynomialSection, s2: &PolynomialSection, z: Complex64) -> Result<Complex64> {
    s1.same_geometry(s2)?;
    Ok(s1.weighted(z).conj() * s2.weighted(z))
}

/// Largest entrywise modulus of `m - I`.
pub fn identity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// `<s1|s2>` by the periodic trapezoid rule on `grid`.
pub fn inner_product(s1: &PolynomialSection, s2: &PolynomialSection, grid: &TorusGrid) -> Result<Complex64> {
    s1.same_geometry(s2)?;
    check_grid(s1, grid)?;
    Ok(grid.integrate(|z| s1.weighted(z).conj() * s2.weighted(z)))
}

/// `<s|s>`.
pub fn norm_sqr(s: &PolynomialSection, grid: &TorusGrid) -> Result<f64> {
    check_grid(s, grid)?;
    Ok(grid.integrate(|z| Complex64::new(s.weighted(z).norm_sqr(), 0.0)).re)
}

fn check_grid(s: &PolynomialSection, grid: &TorusGrid) -> Result<()> {
    if s.geometry() == grid.geometry() {
        Ok(())
    } else {
        Err(Error::GeometryMismatch)
    }
}

/// Weighted samples of each section on `grid`, one vector per section.
pub fn sample_sections(sections: &[PolynomialSection], grid: &TorusGrid) -> Vec<Vec<Complex64>> {
    sections.iter().map(|s| grid.sample(|z| s.weighted(z))).collect()
}

/// Pairwise inner products, made exactly Hermitian by averaging with the
/// conjugate transpose.
pub fn gram_matrix(sections: &[PolynomialSection], grid: &TorusGrid) -> Result<DMatrix<Complex64>> {
    for s in sections {
        check_grid(s, grid)?;
    }
    let samples = sample_sections(sections, grid);
    Ok(gram_from_samples(&samples, grid))
}

pub(crate) fn gram_from_samples(samples: &[Vec<Complex64>], grid: &TorusGrid) -> DMatrix<Complex64> {
    let n = samples.len();
    let mut gram = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut products = vec![Complex64::new(0.0, 0.0); grid.len()];
    for mu in 0..n {
        for nu in mu..n {
            for (p, (a, b)) in products.iter_mut().zip(samples[mu].iter().zip(&samples[nu])) {
                *p = a.conj() * b;
            }
            let v = pairwise_sum(&products) * grid.cell_area();
            gram[(mu, nu)] = v;
            gram[(nu, mu)] = v.conj();
        }
        gram[(mu, mu)].im = 0.0;
    }
    gram
}

/// `<s|H|s> / <s|s>` through the positive form `2 int exp(-|z|^2) |dbar s|^2`.
pub fn rayleigh_quotient(s: &PolynomialSection, grid: &TorusGrid) -> Result<f64> {
    let norm = norm_sqr(s, grid)?;
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let d = s.dbar();
    let energy = 2.0 * grid.integrate(|z| Complex64::new(d.weighted(z).norm_sqr(), 0.0)).re;
    Ok(energy / norm)
}

/// The normalized basis `(d - conj(z))^k psi_nu / ||.||` of one Landau level.
#[derive(Debug, Clone)]
pub struct LandauLevel {
    index: usize,
    basis: Arc<GroundBasis>,
    sections: Vec<PolynomialSection>,
}

impl LandauLevel {
    /// Raises every ground state `index` times and normalizes on `grid`.
    pub fn new(basis: Arc<GroundBasis>, index: usize, grid: &TorusGrid) -> Result<Self> {
        if index > MAX_LEVEL {
            return Err(Error::InvalidParameter(format!(
                "level {index} is above the supported maximum {MAX_LEVEL}"
            )));
        }
        if basis.geometry() != grid.geometry() {
            return Err(Error::GeometryMismatch);
        }
        let mut sections = Vec::with_capacity(basis.len());
        for nu in 0..basis.len() {
            let mut s = PolynomialSection::ground(basis.clone(), nu)?;
            for _ in 0..index {
                s = s.raise();
            }
            let norm = norm_sqr(&s, grid)?;
            if norm.is_nan() || norm <= 0.0 {
                return Err(Error::ZeroNorm);
            }
            sections.push(s.scaled(Complex64::new(1.0 / norm.sqrt(), 0.0)));
        }
        Ok(Self { index, basis, sections })
    }

    /// Level `index` over a freshly normalized ground basis.
    pub fn build(geometry: TorusGeometry, index: usize, grid: &TorusGrid, rep: Representation) -> Result<Self> {
        if geometry != grid.geometry() {
            return Err(Error::GeometryMismatch);
        }
        let basis = Arc::new(GroundBasis::normalized(grid)?.with_representation(rep));
        Self::new(basis, index, grid)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn energy(&self) -> f64 {
        level_energy(self.index)
    }

    pub fn basis(&self) -> &Arc<GroundBasis> {
        &self.basis
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.basis.geometry()
    }

    pub fn sections(&self) -> &[PolynomialSection] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    /// `rho(z) = sum_nu h(s_nu, s_nu)(z)`.
    pub fn density_at(&self, z: Complex64) -> f64 {
        self.sections.iter().map(|s| s.weighted(z).norm_sqr()).sum()
    }

    pub fn density_map(&self, grid: &TorusGrid) -> Result<DensityMap> {
        if grid.geometry() != self.geometry() {
            return Err(Error::GeometryMismatch);
        }
        let values = grid.sample(|z| self.density_at(z));
        Ok(DensityMap::from_density(GridField::from_samples(
            "density",
            grid,
            Some(self.index),
            values,
        )))
    }
}

/// `rho` sampled on a grid plus its deviation from uniformity.
#[derive(Debug, Clone)]
pub struct DensityMap {
    pub density: GridField,
    /// `(rho - mean) / mean`.
    pub deviation: GridField,
    pub mean: f64,
    /// `max |rho - mean| / mean`.
    pub max_deviation: f64,
}

impl DensityMap {
    pub fn from_density(density: GridField) -> Self {
        let mean = density.stats().mean;
        let deviation = density.map("deviation", |v| (v - mean) / mean);
        let max_deviation = deviation.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            density,
            deviation,
            mean,
            max_deviation,
        }
    }

    /// `mean * L1 * L2`, the trace of the level projector.
    pub fn total_weight(&self) -> f64 {
        self.mean * self.density.geometry.area()
    }

    /// Locates the extrema of `rho` relative to the lattice `(n1 L1 + i n2 L2) / N`.
    pub fn bump_report(&self) -> BumpReport {
        let field = &self.density;
        let g = field.geometry;
        let flux = g.flux() as usize;
        let extrema = field.local_extrema();
        let (dx, dy) = (g.l1() / field.nx as f64, g.l2() / field.ny as f64);
        let near = |(i, j): (usize, usize), px: f64, py: f64| {
            let wrap = |d: f64, period: f64| {
                let r = d.rem_euclid(period);
                r.min(period - r)
            };
            wrap(i as f64 * dx - px, g.l1()) <= dx * (1.0 + 1e-9)
                && wrap(j as f64 * dy - py, g.l2()) <= dy * (1.0 + 1e-9)
        };
        let mut at_maxima = 0;
        let mut at_minima = 0;
        for n1 in 0..flux {
            for n2 in 0..flux {
                let px = n1 as f64 * g.l1() / flux as f64;
                let py = n2 as f64 * g.l2() / flux as f64;
                if extrema.maxima.iter().any(|&p| near(p, px, py)) {
                    at_maxima += 1;
                }
                if extrema.minima.iter().any(|&p| near(p, px, py)) {
                    at_minima += 1;
                }
            }
        }
        BumpReport {
            lattice_points: flux * flux,
            lattice_at_maxima: at_maxima,
            lattice_at_minima: at_minima,
            maxima: extrema.maxima.len(),
            minima: extrema.minima.len(),
        }
    }
}

/// How the extrema of a density map sit on the `Z_N x Z_N` lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BumpReport {
    pub lattice_points: usize,
    /// Lattice points with a local maximum of `rho` within one grid cell.
    pub lattice_at_maxima: usize,
    pub lattice_at_minima: usize,
    pub maxima: usize,
    pub minima: usize,
}

impl BumpReport {
    /// Every lattice point carries a local extremum of one common kind.
    pub fn on_lattice(&self) -> bool {
        self.lattice_at_maxima == self.lattice_points || self.lattice_at_minima == self.lattice_points
    }
}

/// Straight-line fit of `ln d(N)` against `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|ln d - fit|`.
    pub max_residual: f64,
    /// `max_residual` divided by the spread of `ln d` over the data.
    pub relative_residual: f64,
    pub strictly_decreasing: bool,
}

/// Least-squares fit of `ln d` over the points `(N, d(N))`, in the given order.
pub fn fit_deviation_decay(points: &[(u32, f64)]) -> DecayFit {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    let spread = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ys.iter().copied().fold(f64::INFINITY, f64::min);
    DecayFit {
        slope,
        intercept,
        max_residual,
        relative_residual: if spread > 0.0 { max_residual / spread } else { f64::INFINITY },
        strictly_decreasing: points.windows(2).all(|w| w[1].1 < w[0].1),
    }
}

/// Density map of level `level` on `grid`, built from a normalized basis.
pub fn density_map(geometry: TorusGeometry, level: usize, grid: &TorusGrid) -> Result<DensityMap> {
    LandauLevel::build(geometry, level, grid, Representation::Fourier)?.density_map(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn level(flux: u32, index: usize) -> (LandauLevel, TorusGrid) {
        let g = TorusGeometry::square(flux).unwrap();
        let grid = TorusGrid::default_for(g);
        (LandauLevel::build(g, index, &grid, Representation::Fourier).unwrap(), grid)
    }

    #[test]
    fn density_is_nonnegative_and_sesquilinear() {
        let (lvl, _) = level(2, 0);
        let s = &lvl.sections()[0];
        let z = Complex64::new(0.7, 1.9);
        let h = hermitian_density(s, s, z).unwrap();
        assert!(h.re >= 0.0 && h.im == 0.0);
        let scaled = s.scaled(Complex64::new(0.0, 1.0));
        let h2 = hermitian_density(s, &scaled, z).unwrap();
        assert!((h2 - h * Complex64::new(0.0, 1.0)).norm() < 1e-15 * h.norm().max(1e-300));
    }

    #[test]
    fn density_matches_across_the_seams() {
        let (lvl, _) = level(3, 1);
        let g = lvl.geometry();
        for s in lvl.sections() {
            for &x in &[0.0, 0.4, 2.1] {
                let bottom = hermitian_density(s, s, Complex64::new(x, 0.0)).unwrap();
                let top = hermitian_density(s, s, Complex64::new(x, g.l2())).unwrap();
                assert!((bottom - top).norm() < 1e-12 * bottom.norm().max(1e-3));
                let left = hermitian_density(s, s, Complex64::new(0.0, x)).unwrap();
                let right = hermitian_density(s, s, Complex64::new(g.l1(), x)).unwrap();
                assert!((left - right).norm() < 1e-12 * left.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn geometry_mismatch_is_reported() {
        let (a, grid) = level(1, 0);
        let (b, _) = level(2, 0);
        assert!(matches!(
            inner_product(&a.sections()[0], &b.sections()[0], &grid),
            Err(Error::GeometryMismatch)
        ));
    }

    #[test]
    fn unnormalized_gram_is_positive_diagonal() {
        let g = TorusGeometry::square(3).unwrap();
        let grid = TorusGrid::default_for(g);
        let basis = Arc::new(GroundBasis::new(g).unwrap());
        let sections: Vec<_> = (0..3).map(|nu| PolynomialSection::ground(basis.clone(), nu).unwrap()).collect();
        let gram = gram_matrix(&sections, &grid).unwrap();
        for i in 0..3 {
            assert!(gram[(i, i)].re > 0.0);
            for j in 0..3 {
                if i != j {
                    assert!(gram[(i, j)].norm() < 1e-12 * gram[(i, i)].re);
                }
            }
        }
    }

    #[test]
    fn raised_levels_are_orthonormal() {
        for index in 1..=2 {
            let (lvl, grid) = level(3, index);
            let gram = gram_matrix(lvl.sections(), &grid).unwrap();
            let defect = identity_defect(&gram);
            assert!(defect < 1e-10, "level {index}: {defect}");
        }
    }

    #[test]
    fn energies_of_the_first_levels() {
        let (ground, grid) = level(2, 0);
        for s in ground.sections() {
            assert!(rayleigh_quotient(s, &grid).unwrap().abs() < 1e-12);
        }
        let (first, grid) = level(2, 1);
        for s in first.sections() {
            assert!((rayleigh_quotient(s, &grid).unwrap() - 2.0).abs() < 1e-8);
        }
        let (second, grid) = level(2, 2);
        for s in second.sections() {
            assert!((rayleigh_quotient(s, &grid).unwrap() - 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_section_has_no_rayleigh_quotient() {
        let (lvl, grid) = level(1, 0);
        let zero = lvl.sections()[0].scaled(Complex64::new(0.0, 0.0));
        assert!(matches!(rayleigh_quotient(&zero, &grid), Err(Error::ZeroNorm)));
    }

    #[test]
    fn density_integrates_to_the_degeneracy() {
        for flux in [1, 4] {
            for index in 0..=1 {
                let (lvl, grid) = level(flux, index);
                let map = lvl.density_map(&grid).unwrap();
                assert!((map.total_weight() - flux as f64).abs() < 1e-10);
                assert!((map.mean - 1.0 / PI).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn level_construction_is_capped() {
        let g = TorusGeometry::square(1).unwrap();
        let grid = TorusGrid::default_for(g);
        assert!(LandauLevel::build(g, MAX_LEVEL + 1, &grid, Representation::Fourier).is_err());
    }

    #[test]
    fn decay_fit_on_exact_exponential() {
        let pts: Vec<(u32, f64)> = (1..=5).map(|n| (n, (-1.5 * n as f64 + 0.2).exp())).collect();
        let fit = fit_deviation_decay(&pts);
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 0.2).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12 && fit.strictly_decreasing);
    }
}

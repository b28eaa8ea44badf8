//! Magnetic translations `(T_a psi)(z) = exp(conj(a) z - |a|^2/2) psi(z - a)`.
//!
//! `T_a` commutes with the Hamiltonian as a differential operator, but it maps
//! the bundle with phases `(delta1, delta2)` to one with phases shifted by
//! `conj(a) l - a conj(l)` for each period `l`. Only the lattice
//! `a = (n1 L1 + i n2 L2) / N` preserves the bundle, and so the Landau levels.
//! On that lattice the operators satisfy
//! `T_a T_b T_-a T_-b = exp(conj(a) b - a conj(b))` with finite matrices, which
//! is exactly where the determinant obstruction `exp(2 i N Im(conj(a) b)) = 1`
//! is satisfied.
//!
//! The formal generators `p1 = i z - i (d + dbar)` and `p2 = -i z - i (d - dbar)`
//! are not constructed: they do not map sections to sections, which is the
//! infinitesimal form of the bundle shift computed by [`bundle_shift_phase`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::levels::{identity_defect, sample_sections, LandauLevel, PolynomialSection};
use crate::quadrature::{pairwise_sum, TorusGrid};

/// Absolute tolerance on the lattice indices `n_i` when classifying a displacement.
pub const LATTICE_TOL: f64 = 1e-12;

/// Tolerance used by [`wintner_check`] on `|phase - 1|`.
pub const WINTNER_TOL: f64 = 1e-12;

/// A displacement `a` in natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Translation {
    a: Complex64,
}

impl Translation {
    pub fn new(a: Complex64) -> Self {
        Self { a }
    }

    /// `(n1 L1 + i n2 L2) / N`.
    pub fn lattice(geometry: &TorusGeometry, n1: i64, n2: i64) -> Self {
        let n = geometry.flux() as f64;
        Self::new(Complex64::new(n1 as f64 * geometry.l1() / n, n2 as f64 * geometry.l2() / n))
    }

    /// Point of the lattice scaled by `1/2`, i.e. `(m1 L1 + i m2 L2) / (2N)`.
    pub fn half_lattice(geometry: &TorusGeometry, m1: i64, m2: i64) -> Self {
        let n = 2.0 * geometry.flux() as f64;
        Self::new(Complex64::new(m1 as f64 * geometry.l1() / n, m2 as f64 * geometry.l2() / n))
    }

    pub fn displacement(&self) -> Complex64 {
        self.a
    }

    /// Integer `(n1, n2)` with `a = (n1 L1 + i n2 L2) / N`, when they exist.
    pub fn lattice_indices(&self, geometry: &TorusGeometry) -> Option<(i64, i64)> {
        let n = geometry.flux() as f64;
        let r1 = self.a.re * n / geometry.l1();
        let r2 = self.a.im * n / geometry.l2();
        let (k1, k2) = (r1.round(), r2.round());
        ((r1 - k1).abs() <= LATTICE_TOL && (r2 - k2).abs() <= LATTICE_TOL).then_some((k1 as i64, k2 as i64))
    }

    pub fn is_lattice(&self, geometry: &TorusGeometry) -> bool {
        self.lattice_indices(geometry).is_some()
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.a)
    }
}

/// `(T_a s)(z)`.
pub fn translate_section(a: &Translation, s: &PolynomialSection, z: Complex64) -> Complex64 {
    s.translate(a.a).eval(z)
}

/// `exp(-|z|^2/2) (T_a s)(z)`.
pub fn translate_section_weighted(a: &Translation, s: &PolynomialSection, z: Complex64) -> Complex64 {
    s.translate(a.a).weighted(z)
}

/// `exp(conj(a) b - a conj(b))`.
pub fn commutator_phase(a: Complex64, b: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * (a.conj() * b).im)
}

/// Extra boundary phase `exp(conj(a) l - a conj(l))` acquired by a translated
/// section along the period `l`.
pub fn bundle_shift_phase(geometry: &TorusGeometry, a: Complex64, ell: Complex64) -> Result<Complex64> {
    if geometry.period_indices(ell, LATTICE_TOL).is_none() {
        return Err(Error::NotAPeriod { re: ell.re, im: ell.im });
    }
    Ok(commutator_phase(a, ell))
}

/// Outcome of the determinant test on the group commutator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WintnerVerdict {
    /// `exp(2 i N Im(conj(a) b))`.
    pub phase: Complex64,
    pub consistent: bool,
}

/// Taking determinants of `U(a) V(b) U(-a) V(-b) = exp(conj(a) b - a conj(b))`
/// for `N x N` unitaries forces `exp(2 i N Im(conj(a) b)) = 1`.
pub fn wintner_check(flux: u32, a: Complex64, b: Complex64) -> WintnerVerdict {
    let phase = Complex64::from_polar(1.0, 2.0 * flux as f64 * (a.conj() * b).im);
    WintnerVerdict {
        phase,
        consistent: (phase - 1.0).norm() <= WINTNER_TOL,
    }
}

/// `T_a` restricted to a Landau level.
#[derive(Debug, Clone)]
pub struct TranslationMatrix {
    pub translation: Translation,
    pub level: usize,
    /// `t[(nu, mu)] = <psi_mu | T_a psi_nu>`, so that `T_a psi_nu = sum_mu t_{nu mu} psi_mu`.
    pub entries: DMatrix<Complex64>,
    /// `|| T_a psi_nu - sum_mu t_{nu mu} psi_mu ||` for each `nu`.
    pub projection_defects: Vec<f64>,
}

impl TranslationMatrix {
    /// The matrix acting on coefficient columns: `(operator)_{mu nu} = t_{nu mu}`.
    /// Products of these follow operator composition.
    pub fn operator_matrix(&self) -> DMatrix<Complex64> {
        self.entries.transpose()
    }

    /// `max |(t t^dagger - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        identity_defect(&(&self.entries * self.entries.adjoint()))
    }

    pub fn max_projection_defect(&self) -> f64 {
        self.projection_defects.iter().copied().fold(0.0, f64::max)
    }
}

/// Matrix elements of `T_a` in `level` by quadrature, with the part of each
/// translated basis section that leaves the level.
pub fn translation_matrix(a: &Translation, level: &LandauLevel, grid: &TorusGrid) -> Result<TranslationMatrix> {
    if grid.geometry() != level.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let n = level.len();
    let basis_samples = sample_sections(level.sections(), grid);
    let translated: Vec<PolynomialSection> = level.sections().iter().map(|s| s.translate(a.a)).collect();
    let translated_samples = sample_sections(&translated, grid);

    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut buffer = vec![Complex64::new(0.0, 0.0); grid.len()];
    for nu in 0..n {
        for mu in 0..n {
            for (p, (b, t)) in buffer.iter_mut().zip(basis_samples[mu].iter().zip(&translated_samples[nu])) {
                *p = b.conj() * t;
            }
            entries[(nu, mu)] = pairwise_sum(&buffer) * grid.cell_area();
        }
    }

    let mut projection_defects = Vec::with_capacity(n);
    for nu in 0..n {
        for (k, p) in buffer.iter_mut().enumerate() {
            let mut r = translated_samples[nu][k];
            for mu in 0..n {
                r -= entries[(nu, mu)] * basis_samples[mu][k];
            }
            *p = Complex64::new(r.norm_sqr(), 0.0);
        }
        projection_defects.push((pairwise_sum(&buffer).re * grid.cell_area()).max(0.0).sqrt());
    }

    Ok(TranslationMatrix {
        translation: *a,
        level: level.index(),
        entries,
        projection_defects,
    })
}

/// The four-factor group commutator computed from translation matrices.
#[derive(Debug, Clone)]
pub struct CommutatorCheck {
    pub expected_phase: Complex64,
    pub product: DMatrix<Complex64>,
    /// `max |product - expected_phase I|`.
    pub defect: f64,
}

pub fn commutator_check(level: &LandauLevel, a: Complex64, b: Complex64, grid: &TorusGrid) -> Result<CommutatorCheck> {
    let m = |d: Complex64| -> Result<DMatrix<Complex64>> {
        Ok(translation_matrix(&Translation::new(d), level, grid)?.operator_matrix())
    };
    let product = m(a)? * m(b)? * m(-a)? * m(-b)?;
    let expected_phase = commutator_phase(a, b);
    let n = level.len();
    let target = DMatrix::<Complex64>::identity(n, n) * expected_phase;
    let defect = (&product - &target).iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(CommutatorCheck {
        expected_phase,
        product,
        defect,
    })
}

/// `max_z exp(-|z|^2/2) |H T_a s - T_a H s|` over the grid.
pub fn hamiltonian_commutator_defect(s: &PolynomialSection, a: Complex64, grid: &TorusGrid) -> f64 {
    let lhs = s.translate(a).apply_hamiltonian();
    let rhs = s.apply_hamiltonian().translate(a);
    grid.sample(|z| (lhs.weighted(z) - rhs.weighted(z)).norm())
        .into_iter()
        .fold(0.0, f64::max)
}

/// `max_z |rho(z + a) - rho(z)| / mean(rho)` over the grid, for the density of `level`.
/// Small exactly when `T_a` maps the level to itself.
pub fn density_shift_defect(level: &LandauLevel, a: Complex64, grid: &TorusGrid) -> f64 {
    let pairs = grid.sample(|z| (level.density_at(z), level.density_at(z + a)));
    let mean = crate::quadrature::pairwise_sum_real(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()) / pairs.len() as f64;
    pairs.iter().map(|(r, s)| (s - r).abs()).fold(0.0, f64::max) / mean
}

/// Checks `(T_a s)(z + l) = (T_a s)(z) (-1)^(N k1 k2) exp(conj(l) z + |l|^2/2) * bundle_shift_phase`
/// and returns the relative residual.
pub fn translated_boundary_residual(
    s: &PolynomialSection,
    a: Complex64,
    ell: Complex64,
    z: Complex64,
) -> Result<f64> {
    let g = s.geometry();
    let (k1, k2) = g
        .period_indices(ell, LATTICE_TOL)
        .ok_or(Error::NotAPeriod { re: ell.re, im: ell.im })?;
    let t = s.translate(a);
    let sign = if (g.flux() as i64 * k1 * k2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    // Weighted form: the Gaussian factors reduce exp(conj(l) z + |l|^2/2) to a phase.
    let lhs = t.weighted(z + ell);
    let rhs = t.weighted(z) * sign * Complex64::from_polar(1.0, (ell.conj() * z).im) * bundle_shift_phase(&g, a, ell)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE))
}

/// JSON record for one translation.
#[derive(Debug, Clone, Serialize)]
pub struct TranslationReport {
    pub a: [f64; 2],
    pub level: usize,
    pub lattice: bool,
    pub lattice_indices: Option<(i64, i64)>,
    pub unitarity_defect: f64,
    pub projection_defect: f64,
    pub phases: TranslationPhases,
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslationPhases {
    /// `exp(conj(a) l - a conj(l))` for `l = L1`, as `[re, im]`.
    pub bundle_shift_l1: [f64; 2],
    /// Same for `l = i L2`.
    pub bundle_shift_l2: [f64; 2],
    /// `exp(conj(a) b - a conj(b))` against the elementary lattice steps `b = L1/N` and `b = i L2/N`.
    pub commutator_with_x_step: [f64; 2],
    pub commutator_with_y_step: [f64; 2],
    /// `exp(2 i N Im(conj(a) b))` for `b = i L2/N`.
    pub wintner_phase: [f64; 2],
}

impl TranslationReport {
    pub fn new(a: &Translation, level: &LandauLevel, grid: &TorusGrid) -> Result<Self> {
        let g = level.geometry();
        let m = translation_matrix(a, level, grid)?;
        let pair = |c: Complex64| [c.re, c.im];
        let x_step = Complex64::new(g.l1() / g.flux() as f64, 0.0);
        let y_step = Complex64::new(0.0, g.l2() / g.flux() as f64);
        let d = a.displacement();
        Ok(Self {
            a: [d.re, d.im],
            level: level.index(),
            lattice: a.is_lattice(&g),
            lattice_indices: a.lattice_indices(&g),
            unitarity_defect: m.unitarity_defect(),
            projection_defect: m.max_projection_defect(),
            phases: TranslationPhases {
                bundle_shift_l1: pair(bundle_shift_phase(&g, d, g.period(1, 0))?),
                bundle_shift_l2: pair(bundle_shift_phase(&g, d, g.period(0, 1))?),
                commutator_with_x_step: pair(commutator_phase(d, x_step)),
                commutator_with_y_step: pair(commutator_phase(d, y_step)),
                wintner_phase: pair(wintner_check(g.flux(), d, y_step).phase),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll_basis::Representation;
    use std::f64::consts::PI;

    fn ground(flux: u32) -> (LandauLevel, TorusGrid) {
        let g = TorusGeometry::square(flux).unwrap();
        let grid = TorusGrid::default_for(g);
        (LandauLevel::build(g, 0, &grid, Representation::Fourier).unwrap(), grid)
    }

    #[test]
    fn lattice_classification() {
        let g = TorusGeometry::with_aspect(3, 2.0).unwrap();
        assert_eq!(Translation::lattice(&g, 2, -1).lattice_indices(&g), Some((2, -1)));
        assert!(!Translation::half_lattice(&g, 1, 0).is_lattice(&g));
        assert!(Translation::half_lattice(&g, 2, 4).is_lattice(&g));
        assert!(!Translation::new(Complex64::new(0.1, 0.0)).is_lattice(&g));
    }

    #[test]
    fn commutator_phase_examples() {
        for flux in 1..=6 {
            let g = TorusGeometry::square(flux).unwrap();
            let a = Complex64::new(g.l1() / flux as f64, 0.0);
            let b = Complex64::new(0.0, g.l2() / flux as f64);
            let expected = Complex64::from_polar(1.0, 2.0 * PI / flux as f64);
            assert!((commutator_phase(a, b) - expected).norm() < 1e-13);
            assert_eq!(commutator_phase(a, Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn bundle_shift_examples() {
        for flux in 1..=6u32 {
            let g = TorusGeometry::square(flux).unwrap();
            let lattice = Translation::lattice(&g, 1, 2).displacement();
            assert!((bundle_shift_phase(&g, lattice, g.period(1, 0)).unwrap() - 1.0).norm() < 1e-12);
            assert!((bundle_shift_phase(&g, lattice, g.period(0, 1)).unwrap() - 1.0).norm() < 1e-12);
            let half = Translation::half_lattice(&g, 1, 0).displacement();
            let p = bundle_shift_phase(&g, half, g.period(0, 1)).unwrap();
            // 2 Im(conj(a) l) = 2 (L1 / 2N) L2 = pi
            assert!((p + 1.0).norm() < 1e-12);
            assert!((p - 1.0).norm() > 0.1);
            assert_eq!(bundle_shift_phase(&g, Complex64::new(0.0, 0.0), g.period(3, -2)).unwrap(), Complex64::new(1.0, 0.0));
        }
        let g = TorusGeometry::square(2).unwrap();
        assert!(matches!(
            bundle_shift_phase(&g, Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0)),
            Err(Error::NotAPeriod { .. })
        ));
    }

    #[test]
    fn wintner_examples() {
        for flux in 1..=10u32 {
            let g = TorusGeometry::square(flux).unwrap();
            let n = flux as f64;
            let a = Complex64::new(g.l1() / n, 0.0);
            let b = Complex64::new(0.0, g.l2() / n);
            assert!(wintner_check(flux, a, b).consistent);
            let half = Complex64::new(g.l1() / (2.0 * n), 0.0);
            let v = wintner_check(flux, half, b);
            assert!(!v.consistent);
            assert!((v.phase + 1.0).norm() < 1e-12);
            assert!(wintner_check(flux, half, half).consistent);
        }
    }

    #[test]
    fn zero_translation_is_identity() {
        let (lvl, grid) = ground(3);
        let m = translation_matrix(&Translation::new(Complex64::new(0.0, 0.0)), &lvl, &grid).unwrap();
        assert!(identity_defect(&m.entries) < 1e-12);
        assert!(m.max_projection_defect() < 1e-12);
    }

    #[test]
    fn lattice_translation_is_unitary_and_stays_in_the_level() {
        let (lvl, grid) = ground(3);
        let g = lvl.geometry();
        let m = translation_matrix(&Translation::lattice(&g, 1, 1), &lvl, &grid).unwrap();
        assert!(m.unitarity_defect() < 1e-10);
        assert!(m.max_projection_defect() < 1e-10);
    }

    #[test]
    fn half_lattice_translation_leaves_the_level() {
        for flux in 1..=4 {
            let (lvl, grid) = ground(flux);
            let g = lvl.geometry();
            let m = translation_matrix(&Translation::half_lattice(&g, 1, 0), &lvl, &grid).unwrap();
            assert!(m.max_projection_defect() > 1e-3, "N {flux}: {}", m.max_projection_defect());
        }
    }

    #[test]
    fn translations_preserve_the_norm() {
        let (lvl, grid) = ground(2);
        let s = &lvl.sections()[1];
        for a in [Complex64::new(0.3, -0.7), Complex64::new(1.9, 0.2)] {
            let t = s.translate(a);
            let norm = crate::levels::norm_sqr(&t, &grid).unwrap();
            assert!((norm - 1.0).abs() < 1e-10, "{a}: {norm}");
        }
    }

    #[test]
    fn full_period_translation_is_a_phase() {
        let (lvl, _) = ground(2);
        let g = lvl.geometry();
        let s = &lvl.sections()[0];
        let a = Translation::new(g.period(1, 0));
        for z in [Complex64::new(0.3, 0.4), Complex64::new(1.7, 2.2)] {
            let t = translate_section_weighted(&a, s, z);
            let v = s.weighted(z);
            assert!((t.norm() - v.norm()).abs() < 1e-12 * v.norm().max(1e-3));
            // T_l psi = (-1)^(N k1 k2) psi for a period l
            assert!((t - v).norm() < 1e-12 * v.norm().max(1e-3));
        }
    }

    #[test]
    fn translated_sections_obey_shifted_boundary_conditions() {
        let (lvl, _) = ground(3);
        let g = lvl.geometry();
        let s = &lvl.sections()[2];
        let a = Complex64::new(0.31, 0.77);
        for ell in [g.period(1, 0), g.period(0, 1), g.period(1, 1)] {
            let r = translated_boundary_residual(s, a, ell, Complex64::new(0.5, 0.9)).unwrap();
            assert!(r < 1e-11, "{ell}: {r}");
        }
    }

    #[test]
    fn translations_commute_with_the_hamiltonian() {
        let g = TorusGeometry::square(2).unwrap();
        let grid = TorusGrid::new(g, 16, 16).unwrap();
        let lvl = LandauLevel::build(g, 1, &TorusGrid::default_for(g), Representation::Fourier).unwrap();
        let s = lvl.sections()[0].add(&lvl.sections()[1].raise()).unwrap();
        let d = hamiltonian_commutator_defect(&s, Complex64::new(0.41, -0.23), &grid);
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn density_shift_invariance_matches_projection() {
        let (lvl, _) = ground(3);
        let g = lvl.geometry();
        let grid = TorusGrid::new(g, 24, 24).unwrap();
        let lattice = Translation::lattice(&g, 1, 2).displacement();
        assert!(density_shift_defect(&lvl, lattice, &grid) < 1e-10);
        let half = Translation::half_lattice(&g, 1, 0).displacement();
        assert!(density_shift_defect(&lvl, half, &grid) > 1e-4);
    }

    #[test]
    fn four_factor_commutator_n3() {
        let (lvl, grid) = ground(3);
        let g = lvl.geometry();
        let a = Complex64::new(g.l1() / 3.0, 0.0);
        let b = Complex64::new(0.0, g.l2() / 3.0);
        let c = commutator_check(&lvl, a, b, &grid).unwrap();
        assert!((c.expected_phase - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-13);
        assert!(c.defect < 1e-9, "{}", c.defect);
    }
}

//! Sections of the form `s(z) = sum_j conj(z)^j f_j(z)` with holomorphic `f_j`.
//!
//! Each `f_j` is a finite combination of terms
//! `c * exp(conj(b) z - |b|^2/2) * psi_nu^{(d)}(z - b)`. The family is closed
//! under `d/dz` and under magnetic translations, so the creation operator, the
//! Hamiltonian and `T_a` all act exactly on the representation.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::lll_basis::GroundBasis;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `coeff * exp(conj(shift) z - |shift|^2/2) * psi_nu^{(order)}(z - shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoloTerm {
    pub coeff: Complex64,
    pub shift: Complex64,
    pub nu: usize,
    pub order: usize,
}

impl HoloTerm {
    fn same_kind(&self, other: &HoloTerm) -> bool {
        self.shift == other.shift && self.nu == other.nu && self.order == other.order
    }

    /// `exp(-|z|^2/2)` times the term value.
    ///
    /// The Gaussian weight turns the translation prefactor into the pure phase
    /// `exp(i Im(conj(b) z))`.
    fn weighted(&self, basis: &GroundBasis, z: Complex64) -> Complex64 {
        let value = basis.weighted(self.nu, z - self.shift, self.order);
        if self.shift == ZERO {
            self.coeff * value
        } else {
            let phase = Complex64::from_polar(1.0, (self.shift.conj() * z).im);
            self.coeff * phase * value
        }
    }
}

/// A holomorphic coefficient function, as a list of [`HoloTerm`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HoloFn {
    terms: Vec<HoloTerm>,
}

impl HoloFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis_function(nu: usize) -> Self {
        Self {
            terms: vec![HoloTerm {
                coeff: Complex64::new(1.0, 0.0),
                shift: ZERO,
                nu,
                order: 0,
            }],
        }
    }

    pub fn terms(&self) -> &[HoloTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == ZERO)
    }

    /// Highest derivative order appearing in the terms.
    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    fn push(&mut self, term: HoloTerm) {
        if term.coeff == ZERO {
            return;
        }
        match self.terms.iter_mut().find(|t| t.same_kind(&term)) {
            Some(existing) => existing.coeff += term.coeff,
            None => self.terms.push(term),
        }
    }

    pub fn add_assign(&mut self, other: &HoloFn) {
        for t in &other.terms {
            self.push(*t);
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            out.push(HoloTerm {
                coeff: t.coeff * factor,
                ..*t
            });
        }
        out
    }

    /// `d/dz`: the exponential prefactor contributes `conj(b)`, the basis
    /// function one more derivative.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            out.push(HoloTerm {
                coeff: t.coeff * t.shift.conj(),
                ..*t
            });
            out.push(HoloTerm {
                order: t.order + 1,
                ..*t
            });
        }
        out
    }

    /// `z -> exp(conj(a) z - |a|^2/2) f(z - a)`.
    ///
    /// Composing with an existing shift `b` gives shift `a + b` and the phase
    /// `exp(i Im(conj(a) b))`.
    pub fn translated(&self, a: Complex64) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            let phase = Complex64::from_polar(1.0, (a.conj() * t.shift).im);
            out.push(HoloTerm {
                coeff: t.coeff * phase,
                shift: t.shift + a,
                ..*t
            });
        }
        out
    }

    pub fn weighted(&self, basis: &GroundBasis, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.weighted(basis, z)).sum()
    }
}

/// A section `s(z) = sum_{j=0..k} conj(z)^j f_j(z)` over a ground basis.
#[derive(Debug, Clone)]
pub struct PolynomialSection {
    basis: Arc<GroundBasis>,
    coeffs: Vec<HoloFn>,
}

impl PolynomialSection {
    /// The ground state `psi_nu`.
    pub fn ground(basis: Arc<GroundBasis>, nu: usize) -> Result<Self> {
        if nu >= basis.len() {
            return Err(Error::InvalidParameter(format!(
                "nu = {nu} is out of range for N = {}",
                basis.len()
            )));
        }
        Ok(Self {
            basis,
            coeffs: vec![HoloFn::basis_function(nu)],
        })
    }

    /// `sum_nu amplitudes[nu] psi_nu`.
    pub fn ground_combination(basis: Arc<GroundBasis>, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                basis.len(),
                amplitudes.len()
            )));
        }
        let mut f = HoloFn::zero();
        for (nu, &a) in amplitudes.iter().enumerate() {
            f.add_assign(&HoloFn::basis_function(nu).scaled(a));
        }
        Ok(Self {
            basis,
            coeffs: vec![f],
        })
    }

    pub fn from_coefficients(basis: Arc<GroundBasis>, coeffs: Vec<HoloFn>) -> Self {
        let mut s = Self { basis, coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(HoloFn::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(HoloFn::zero());
        }
    }

    pub fn basis(&self) -> &Arc<GroundBasis> {
        &self.basis
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.basis.geometry()
    }

    /// Degree in `conj(z)`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `conj(z)^j`.
    pub fn coefficient(&self, j: usize) -> Option<&HoloFn> {
        self.coeffs.get(j)
    }

    pub fn coefficients(&self) -> &[HoloFn] {
        &self.coeffs
    }

    pub fn same_geometry(&self, other: &Self) -> Result<()> {
        if self.geometry() == other.geometry() {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }

    /// `exp(-|z|^2/2) s(z)`, the gauge-invariant amplitude.
    pub fn weighted(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut power = Complex64::new(1.0, 0.0);
        let mut total = ZERO;
        for f in &self.coeffs {
            total += power * f.weighted(&self.basis, z);
            power *= zb;
        }
        total
    }

    /// `s(z)` itself. Grows like `exp(|z|^2/2)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.weighted(z) * (0.5 * z.norm_sqr()).exp()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|f| f.scaled(factor)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_geometry(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|j| {
                let mut f = self.coeffs.get(j).cloned().unwrap_or_default();
                if let Some(g) = other.coeffs.get(j) {
                    f.add_assign(g);
                }
                f
            })
            .collect();
        Ok(Self::from_coefficients(self.basis.clone(), coeffs))
    }

    /// The covariant creation operator `d - conj(z)`:
    /// `f_j -> f_j' - f_{j-1}`.
    pub fn raise(&self) -> Self {
        let k = self.coeffs.len();
        let coeffs = (0..=k)
            .map(|j| {
                let mut f = self.coeffs.get(j).map(HoloFn::derivative).unwrap_or_default();
                if j > 0 {
                    f.add_assign(&self.coeffs[j - 1].scaled(Complex64::new(-1.0, 0.0)));
                }
                f
            })
            .collect();
        Self::from_coefficients(self.basis.clone(), coeffs)
    }

    /// `dbar s = sum_{j>=1} j conj(z)^{j-1} f_j`.
    pub fn dbar(&self) -> Self {
        let coeffs = if self.coeffs.len() <= 1 {
            vec![HoloFn::zero()]
        } else {
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, f)| f.scaled(Complex64::new((i + 1) as f64, 0.0)))
                .collect()
        };
        Self::from_coefficients(self.basis.clone(), coeffs)
    }

    /// `H s = -2 (d - conj(z)) dbar s`, in units of `hbar omega` with the
    /// zero-point term dropped.
    pub fn apply_hamiltonian(&self) -> Self {
        self.dbar().raise().scaled(Complex64::new(-2.0, 0.0))
    }

    /// The magnetic translation `(T_a s)(z) = exp(conj(a) z - |a|^2/2) s(z - a)`.
    ///
    /// `conj(z - a)^j` is expanded binomially, so the result is again a
    /// polynomial section of the same degree.
    pub fn translate(&self, a: Complex64) -> Self {
        let shifted: Vec<HoloFn> = self.coeffs.iter().map(|f| f.translated(a)).collect();
        let minus_abar = -a.conj();
        let coeffs = (0..self.coeffs.len())
            .map(|i| {
                let mut out = HoloFn::zero();
                let mut binom = 1.0;
                for (j, f) in shifted.iter().enumerate().skip(i) {
                    // binom = C(j, i)
                    let factor = binom * minus_abar.powu((j - i) as u32);
                    out.add_assign(&f.scaled(factor));
                    binom = binom * (j + 1) as f64 / (j + 1 - i) as f64;
                }
                out
            })
            .collect();
        Self::from_coefficients(self.basis.clone(), coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll_basis::Representation;

    fn basis(flux: u32) -> Arc<GroundBasis> {
        Arc::new(GroundBasis::new(TorusGeometry::square(flux).unwrap()).unwrap())
    }

    #[test]
    fn raise_unrolls_to_derivative_and_minus_psi() {
        let b = basis(2);
        let s = PolynomialSection::ground(b.clone(), 1).unwrap().raise();
        assert_eq!(s.degree(), 1);
        let f0 = s.coefficient(0).unwrap();
        let f1 = s.coefficient(1).unwrap();
        assert_eq!(f0.terms().len(), 1);
        assert_eq!(f0.terms()[0].order, 1);
        assert_eq!(f1.terms()[0].coeff, Complex64::new(-1.0, 0.0));
        assert_eq!(f1.terms()[0].order, 0);

        let z = Complex64::new(0.4, 1.1);
        let psi = b.function(1);
        let expected = psi.weighted_derivative(Representation::Fourier, z, 1)
            - z.conj() * psi.weighted_derivative(Representation::Fourier, z, 0);
        assert!((s.weighted(z) - expected).norm() < 1e-14 * expected.norm());
    }

    #[test]
    fn hamiltonian_annihilates_ground_states() {
        let b = basis(3);
        let s = PolynomialSection::ground_combination(
            b,
            &[Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)],
        )
        .unwrap();
        let h = s.apply_hamiltonian();
        assert!(h.coefficients().iter().all(HoloFn::is_zero));
        assert_eq!(h.weighted(Complex64::new(0.5, 0.5)), ZERO);
    }

    #[test]
    fn raised_state_is_an_eigenvector_termwise() {
        let b = basis(2);
        let s = PolynomialSection::ground(b, 0).unwrap().raise();
        let hs = s.apply_hamiltonian();
        let diff = hs.add(&s.scaled(Complex64::new(-2.0, 0.0))).unwrap();
        assert!(diff.coefficients().iter().all(HoloFn::is_zero));
    }

    #[test]
    fn translation_by_zero_is_identity() {
        let b = basis(2);
        let s = PolynomialSection::ground(b, 1).unwrap().raise();
        let t = s.translate(ZERO);
        let z = Complex64::new(1.2, 0.3);
        assert!((t.weighted(z) - s.weighted(z)).norm() < 1e-15);
    }

    #[test]
    fn translation_matches_definition() {
        let b = basis(3);
        let s = PolynomialSection::ground(b, 2).unwrap().raise();
        let a = Complex64::new(0.37, -0.81);
        let t = s.translate(a);
        let z = Complex64::new(1.1, 2.3);
        let expected = (a.conj() * z - 0.5 * a.norm_sqr()).exp() * s.eval(z - a);
        let got = t.eval(z);
        assert!((got - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn translations_compose_projectively() {
        let b = basis(2);
        let s = PolynomialSection::ground(b, 0).unwrap();
        let a = Complex64::new(0.3, 0.2);
        let c = Complex64::new(-0.1, 0.5);
        let z = Complex64::new(0.9, 0.4);
        let lhs = s.translate(c).translate(a).weighted(z);
        let rhs = s.translate(a + c).weighted(z) * Complex64::from_polar(1.0, (a.conj() * c).im);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn hamiltonian_is_linear() {
        let b = basis(2);
        let s1 = PolynomialSection::ground(b.clone(), 0).unwrap().raise();
        let s2 = PolynomialSection::ground(b, 1).unwrap().raise().raise();
        let a = Complex64::new(0.5, -2.0);
        let lhs = s1.scaled(a).add(&s2).unwrap().apply_hamiltonian();
        let rhs = s1.apply_hamiltonian().scaled(a).add(&s2.apply_hamiltonian()).unwrap();
        for &(x, y) in &[(0.1, 0.2), (2.0, 1.0)] {
            let z = Complex64::new(x, y);
            assert!((lhs.weighted(z) - rhs.weighted(z)).norm() < 1e-12 * lhs.weighted(z).norm().max(1.0));
        }
    }
}

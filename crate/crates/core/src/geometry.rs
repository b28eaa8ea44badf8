//! Units, torus data and the flux quantization gate.
//!
//! Everything downstream works in natural units: lengths are measured in
//! `sqrt(hbar / (m * omega))` with the Larmor frequency `omega = e B / (2 m c)`,
//! energies in `hbar * omega`. In these units the Hermitian weight of the line
//! bundle is `exp(-|z|^2)` and the flux condition reads `L1 * L2 = N * pi`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `L1 * L2 / pi` being an integer.
pub const FLUX_INTEGRALITY_TOL: f64 = 1e-9;

/// Physical (Gaussian cgs) description of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Magnetic field strength in gauss.
    pub field: f64,
    /// Torus sides in cm.
    pub side1: f64,
    pub side2: f64,
    /// Particle charge (esu).
    pub charge: f64,
    /// Particle mass (g).
    pub mass: f64,
    /// Reduced Planck constant (erg s).
    pub hbar: f64,
    /// Speed of light (cm/s).
    pub light_speed: f64,
}

impl PhysicalConfig {
    pub const ELECTRON_CHARGE: f64 = 4.803_204_712_570_263e-10;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-28;
    pub const HBAR: f64 = 1.054_571_817e-27;
    pub const LIGHT_SPEED: f64 = 2.997_924_58e10;

    /// An electron in a field `field` on a `side1 x side2` rectangle.
    pub fn electron(field: f64, side1: f64, side2: f64) -> Self {
        Self {
            field,
            side1,
            side2,
            charge: Self::ELECTRON_CHARGE,
            mass: Self::ELECTRON_MASS,
            hbar: Self::HBAR,
            light_speed: Self::LIGHT_SPEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("B", self.field),
            ("L1", self.side1),
            ("L2", self.side2),
            ("e", self.charge),
            ("m", self.mass),
            ("hbar", self.hbar),
            ("c", self.light_speed),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Larmor frequency `e B / (2 m c)`.
    pub fn larmor_frequency(&self) -> f64 {
        self.charge * self.field / (2.0 * self.mass * self.light_speed)
    }

    /// The natural length unit `sqrt(hbar / (m omega))`.
    pub fn length_unit(&self) -> f64 {
        (self.hbar / (self.mass * self.larmor_frequency())).sqrt()
    }

    /// Flux through the torus in units of the flux quantum `h c / e`.
    pub fn flux_quanta(&self) -> f64 {
        self.field * self.side1 * self.side2 * self.charge
            / (2.0 * PI * self.hbar * self.light_speed)
    }
}

/// A rectangular torus in natural units carrying `flux` flux quanta.
///
/// Construction enforces `l1 * l2 == flux * pi`: after the integrality gate
/// the second side is recomputed from the first so that the identity holds to
/// rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    l1: f64,
    l2: f64,
    flux: u32,
}

impl TorusGeometry {
    /// Builds a torus from its sides, rejecting non-quantized flux.
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        let flux = dirac_quantize(l1, l2)?;
        Ok(Self::from_flux_and_side(flux, l1))
    }

    /// The square torus with `flux` quanta.
    pub fn square(flux: u32) -> Result<Self> {
        Self::with_aspect(flux, 1.0)
    }

    /// Torus with `flux` quanta and aspect ratio `l1 / l2 = aspect`.
    pub fn with_aspect(flux: u32, aspect: f64) -> Result<Self> {
        if flux == 0 {
            return Err(Error::InvalidParameter("flux N must be at least 1".into()));
        }
        if !(aspect.is_finite() && aspect > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "aspect ratio must be positive, got {aspect}"
            )));
        }
        let l1 = (flux as f64 * PI * aspect).sqrt();
        Ok(Self::from_flux_and_side(flux, l1))
    }

    /// Torus with `flux` quanta and first side `l1`; the second side follows.
    pub fn with_side(flux: u32, l1: f64) -> Result<Self> {
        if flux == 0 {
            return Err(Error::InvalidParameter("flux N must be at least 1".into()));
        }
        if !(l1.is_finite() && l1 > 0.0) {
            return Err(Error::InvalidParameter(format!("L1 must be positive, got {l1}")));
        }
        Ok(Self::from_flux_and_side(flux, l1))
    }

    fn from_flux_and_side(flux: u32, l1: f64) -> Self {
        Self {
            l1,
            l2: flux as f64 * PI / l1,
            flux,
        }
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// Number of flux quanta `N`, equal to the Landau level degeneracy.
    pub fn flux(&self) -> u32 {
        self.flux
    }

    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }

    /// The lattice period `k1 * L1 + i k2 * L2`.
    pub fn period(&self, k1: i64, k2: i64) -> Complex64 {
        Complex64::new(k1 as f64 * self.l1, k2 as f64 * self.l2)
    }

    /// Splits `z` into a point of the fundamental rectangle `[0,L1) x [0,L2)`
    /// and the integer period indices `(k1, k2)` with `z = z0 + period(k1, k2)`.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let k1 = (z.re / self.l1).floor();
        let k2 = (z.im / self.l2).floor();
        let mut z0 = Complex64::new(z.re - k1 * self.l1, z.im - k2 * self.l2);
        // floor can leave z0 exactly on the upper edge after rounding
        let (mut k1, mut k2) = (k1 as i64, k2 as i64);
        if z0.re >= self.l1 {
            z0.re -= self.l1;
            k1 += 1;
        }
        if z0.im >= self.l2 {
            z0.im -= self.l2;
            k2 += 1;
        }
        (z0, k1, k2)
    }

    /// Integer indices `(k1, k2)` when `ell` is a lattice period.
    pub fn period_indices(&self, ell: Complex64, tol: f64) -> Option<(i64, i64)> {
        let r1 = ell.re / self.l1;
        let r2 = ell.im / self.l2;
        let (k1, k2) = (r1.round(), r2.round());
        ((r1 - k1).abs() <= tol && (r2 - k2).abs() <= tol).then_some((k1 as i64, k2 as i64))
    }
}

/// Returns `N = L1 * L2 / pi` when it is an integer to within relative
/// tolerance [`FLUX_INTEGRALITY_TOL`].
pub fn dirac_quantize(l1: f64, l2: f64) -> Result<u32> {
    if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "torus sides must be positive, got L1 = {l1}, L2 = {l2}"
        )));
    }
    let ratio = l1 * l2 / PI;
    let nearest = ratio.round();
    if nearest < 1.0 || (ratio - nearest).abs() > FLUX_INTEGRALITY_TOL * ratio {
        return Err(Error::NonIntegralFlux {
            ratio,
            fractional: ratio - ratio.floor(),
        });
    }
    if nearest > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!("flux {nearest} is too large")));
    }
    Ok(nearest as u32)
}

/// Converts a physical configuration to natural units.
pub fn to_natural(cfg: &PhysicalConfig) -> Result<TorusGeometry> {
    cfg.validate()?;
    let unit = cfg.length_unit();
    TorusGeometry::new(cfg.side1 / unit, cfg.side2 / unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn physical_with_natural_sides(l1: f64, l2: f64) -> PhysicalConfig {
        let probe = PhysicalConfig::electron(1.0e4, 1.0, 1.0);
        let unit = probe.length_unit();
        PhysicalConfig::electron(1.0e4, l1 * unit, l2 * unit)
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(dirac_quantize(PI.sqrt(), PI.sqrt()).unwrap(), 1);
        let s = (3.0 * PI).sqrt();
        assert_eq!(dirac_quantize(s, s).unwrap(), 3);
        match dirac_quantize(1.0, 1.0) {
            Err(Error::NonIntegralFlux { ratio, fractional }) => {
                assert!((ratio - 1.0 / PI).abs() < 1e-15);
                assert!((fractional - 1.0 / PI).abs() < 1e-15);
            }
            other => panic!("expected NonIntegralFlux, got {other:?}"),
        }
    }

    #[test]
    fn natural_units_examples() {
        let cfg = physical_with_natural_sides(PI.sqrt(), PI.sqrt());
        assert_eq!(to_natural(&cfg).unwrap().flux(), 1);

        let tripled = PhysicalConfig {
            side1: cfg.side1 * 3.0,
            ..cfg
        };
        assert_eq!(to_natural(&tripled).unwrap().flux(), 3);
        assert!((tripled.flux_quanta() - 3.0).abs() < 1e-9);

        let bad = physical_with_natural_sides(PI.sqrt(), 1.5 * PI.sqrt());
        assert!(matches!(to_natural(&bad), Err(Error::NonIntegralFlux { .. })));
    }

    #[test]
    fn rejects_nonpositive_physical_input() {
        let mut cfg = PhysicalConfig::electron(1.0, 1.0, 1.0);
        cfg.mass = 0.0;
        assert!(matches!(to_natural(&cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn reduce_into_fundamental_domain() {
        let g = TorusGeometry::square(2).unwrap();
        let z = Complex64::new(-0.3, 2.5 * g.l2());
        let (z0, k1, k2) = g.reduce(z);
        assert_eq!((k1, k2), (-1, 2));
        assert!(z0.re >= 0.0 && z0.re < g.l1() && z0.im >= 0.0 && z0.im < g.l2());
        assert!((z0 + g.period(k1, k2) - z).norm() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn aspect_freedom_and_round_trip(flux in 1u32..40, l1 in 0.05f64..20.0) {
            let g = TorusGeometry::with_side(flux, l1).unwrap();
            proptest::prop_assert!((g.area() - flux as f64 * PI).abs() <= 1e-12 * g.area());
            proptest::prop_assert_eq!(dirac_quantize(g.l1(), g.l2()).unwrap(), flux);
            let rebuilt = TorusGeometry::new(g.l1(), g.l2()).unwrap();
            proptest::prop_assert_eq!(rebuilt.flux(), flux);
        }
    }
}

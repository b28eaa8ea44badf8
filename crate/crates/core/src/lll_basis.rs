//! The `N` lowest-Landau-level sections as theta series.
//!
//! With both boundary phases set to zero the ground states are
//!
//! ```text
//! psi_nu(z) = N_nu exp(z^2/2) sum_{n = nu mod N} exp(-pi n^2 L2/(N L1) + 2 pi i n z / L1)
//! ```
//!
//! and, after Poisson resummation, the Gaussian form
//!
//! ```text
//! psi_nu(z) = N_nu P_nu exp(z^2/2 + 2 pi i nu z / L1) sum_n exp(-(z + n L1/N + i nu L2/N)^2)
//! ```
//!
//! where `P_nu = L1 / (N sqrt(pi)) * exp(-(nu L2 / N)^2)` is the constant produced
//! by the resummation, so both forms describe the same function.
//!
//! Series are summed in log space, centred on the dominant term, and derivatives
//! of any order are obtained termwise: `d^k/dz^k exp(g) = P_k(g') exp(g)` with
//! `P_{k+1}(w) = w P_k(w) + g'' P_k'(w)` for quadratic `g`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::quadrature::TorusGrid;

/// Terms are kept until the dropped tail is below `exp(-TRUNCATION_EXPONENT)`
/// relative to the dominant term.
pub const TRUNCATION_EXPONENT: f64 = 40.0;

/// Extra exponent margin on top of [`TRUNCATION_EXPONENT`] used when sizing windows.
const TRUNCATION_MARGIN: f64 = 5.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The two boundary phases `(delta1, delta2)`, stored modulo `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryPhases {
    delta1: f64,
    delta2: f64,
}

impl BoundaryPhases {
    pub fn new(delta1: f64, delta2: f64) -> Self {
        Self {
            delta1: delta1.rem_euclid(2.0 * PI),
            delta2: delta2.rem_euclid(2.0 * PI),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn is_zero(&self) -> bool {
        self.delta1 == 0.0 && self.delta2 == 0.0
    }
}

/// Which of the two dual series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    #[default]
    Fourier,
    Gaussian,
}

/// A truncated series value together with the sum of the magnitudes of the
/// terms, which sets the scale of the rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub magnitude: f64,
}

/// One ground-state section `psi_nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBasisFunction {
    geometry: TorusGeometry,
    nu: usize,
    n_max: i64,
    gaussian_n_max: i64,
    norm_const: f64,
}

impl ThetaBasisFunction {
    pub fn new(geometry: TorusGeometry, nu: usize) -> Result<Self> {
        let flux = geometry.flux() as usize;
        if nu >= flux {
            return Err(Error::InvalidParameter(format!(
                "nu = {nu} is out of range for N = {flux} (expected 0..={})",
                flux - 1
            )));
        }
        let (l1, l2, n) = (geometry.l1(), geometry.l2(), flux as f64);
        // Fourier: consecutive kept indices differ by N, the Gaussian exponent
        // is -(pi L2 / (N L1)) n^2, so stepping m by one costs pi N L2 / L1 * m^2.
        let fourier_rate = PI * n * l2 / l1;
        // Gaussian: centres spaced by L1 / N with unit width.
        let gaussian_rate = (l1 / n).powi(2);
        let budget = TRUNCATION_EXPONENT + TRUNCATION_MARGIN;
        Ok(Self {
            geometry,
            nu,
            n_max: ((budget / fourier_rate).sqrt() + 0.5).ceil() as i64 + 1,
            gaussian_n_max: ((budget / gaussian_rate).sqrt() + 0.5).ceil() as i64 + 1,
            norm_const: 1.0,
        })
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.geometry
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Half-width of the Fourier summation window (in steps of `N`).
    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    pub fn with_norm_const(mut self, norm_const: f64) -> Self {
        self.norm_const = norm_const;
        self
    }

    /// `psi_nu(z)` from the Fourier series.
    pub fn eval_fourier(&self, z: Complex64) -> Complex64 {
        self.series(Representation::Fourier, z, 0, 0.0).value
    }

    /// `psi_nu(z)` from the Poisson-resummed Gaussian series.
    pub fn eval_gaussian(&self, z: Complex64) -> Complex64 {
        self.series(Representation::Gaussian, z, 0, 0.0).value
    }

    pub fn eval(&self, rep: Representation, z: Complex64) -> Complex64 {
        self.series(rep, z, 0, 0.0).value
    }

    /// `d^order psi_nu / dz^order` at `z`.
    pub fn derivative(&self, rep: Representation, z: Complex64, order: usize) -> Complex64 {
        self.series(rep, z, order, 0.0).value
    }

    /// `exp(-|z|^2 / 2) d^order psi_nu / dz^order`, evaluated directly (no reduction).
    pub fn weighted_derivative(&self, rep: Representation, z: Complex64, order: usize) -> Complex64 {
        self.series(rep, z, order, 0.5 * z.norm_sqr()).value
    }

    /// The `order`-th derivative times `exp(-shift)`, summed in log space.
    pub fn series(&self, rep: Representation, z: Complex64, order: usize, shift: f64) -> SeriesValue {
        match rep {
            Representation::Fourier => self.fourier_series(z, order, shift),
            Representation::Gaussian => self.gaussian_series(z, order, shift),
        }
    }

    fn fourier_series(&self, z: Complex64, order: usize, shift: f64) -> SeriesValue {
        let g = self.geometry;
        let (l1, l2, flux) = (g.l1(), g.l2(), g.flux() as i64);
        let rate = PI * l2 / (flux as f64 * l1);
        let poly = DerivativePolynomial::new(order, 1.0);
        // The real part of the exponent peaks at n = -N y / L2.
        let n_peak = -(flux as f64) * z.im / l2;
        let m_peak = ((n_peak - self.nu as f64) / flux as f64).round() as i64;
        let half = self.n_max + order as i64;
        let base = 0.5 * z * z + (self.norm_const.ln() - shift);
        let mut acc = LogSum::default();
        for m in (m_peak - half)..=(m_peak + half) {
            let n = self.nu as i64 + m * flux;
            let nf = n as f64;
            let k = 2.0 * PI * nf / l1;
            let exponent = base + Complex64::new(-rate * nf * nf, 0.0) + I * k * z;
            let w = z + I * k;
            acc.push(exponent, poly.eval(w));
        }
        acc.finish()
    }

    fn gaussian_series(&self, z: Complex64, order: usize, shift: f64) -> SeriesValue {
        let g = self.geometry;
        let (l1, l2, flux) = (g.l1(), g.l2(), g.flux() as f64);
        let nu = self.nu as f64;
        let kappa = 2.0 * PI * nu / l1;
        let spacing = l1 / flux;
        let offset = nu * l2 / flux;
        let poly = DerivativePolynomial::new(order, -1.0);
        let (x, y) = (z.re, z.im);
        // With L1 L2 = N pi the term exponent splits into a common part
        // (|z|^2 / 2 - i x y - i n_peak theta) and -(x + n h)^2 - i m theta,
        // n = n_peak + m, theta = 2 h (y + offset). Keeping the common phase out
        // of the sum avoids rounding large, nearly cancelling phases per term.
        let theta = (2.0 * spacing * (y + offset)).rem_euclid(2.0 * PI);
        let n_peak = (-x / spacing).round() as i64;
        let x0 = (n_peak as f64).mul_add(spacing, x);
        let common_phase = (x * y + (n_peak as f64 * theta).rem_euclid(2.0 * PI)).rem_euclid(2.0 * PI);
        let common = Complex64::new(
            (l1 / (flux * PI.sqrt())).ln() + self.norm_const.ln() - shift + 0.5 * z.norm_sqr(),
            -common_phase,
        );
        let half = self.gaussian_n_max + order as i64 + 1;
        let mut acc = LogSum::default();
        for m in -half..=half {
            let mf = m as f64;
            let d = mf.mul_add(spacing, x0);
            let exponent = Complex64::new(-d * d, -mf * theta);
            let c = Complex64::new((n_peak + m) as f64 * spacing, offset);
            let w = -z + I * kappa - 2.0 * c;
            acc.push(exponent, poly.eval(w));
        }
        acc.finish_scaled(common)
    }

    /// Residuals of the twisted periodicity conditions at `z`.
    pub fn boundary_residual(&self, z: Complex64, phases: BoundaryPhases) -> (Complex64, Complex64) {
        let r = self.boundary_check(Representation::Fourier, z, phases);
        (r.residual_x, r.residual_y)
    }

    /// Residuals together with the magnitude scale used to make them relative.
    pub fn boundary_check(
        &self,
        rep: Representation,
        z: Complex64,
        phases: BoundaryPhases,
    ) -> BoundaryResidual {
        let (l1, l2) = (self.geometry.l1(), self.geometry.l2());
        let here = self.series(rep, z, 0, 0.0);
        let right = self.series(rep, z + l1, 0, 0.0);
        let up = self.series(rep, z + I * l2, 0, 0.0);
        let factor_x = (l1 * z + 0.5 * l1 * l1 + I * phases.delta1).exp();
        let factor_y = (-I * l2 * z + 0.5 * l2 * l2 + I * phases.delta2).exp();
        BoundaryResidual {
            residual_x: right.value - here.value * factor_x,
            residual_y: up.value - here.value * factor_y,
            scale_x: right.magnitude.max(here.magnitude * factor_x.norm()),
            scale_y: up.magnitude.max(here.magnitude * factor_y.norm()),
        }
    }

    /// Evaluates `psi(z + L1 + i L2)` directly and through both orders of the
    /// two elementary shifts.
    pub fn double_shift(&self, rep: Representation, z: Complex64) -> DoubleShift {
        let (l1, l2) = (self.geometry.l1(), self.geometry.l2());
        let here = self.series(rep, z, 0, 0.0);
        let direct = self.series(rep, z + l1 + I * l2, 0, 0.0);
        let fx = |w: Complex64| (l1 * w + 0.5 * l1 * l1).exp();
        let fy = |w: Complex64| (-I * l2 * w + 0.5 * l2 * l2).exp();
        let x_then_y = here.value * fx(z) * fy(z + l1);
        let y_then_x = here.value * fy(z) * fx(z + I * l2);
        let diagonal = Complex64::new(l1, -l2) * z + 0.5 * (l1 * l1 + l2 * l2);
        let sign = if self.geometry.flux().is_multiple_of(2) { 1.0 } else { -1.0 };
        DoubleShift {
            direct: direct.value,
            x_then_y,
            y_then_x,
            signed_diagonal: here.value * diagonal.exp() * sign,
            scale: direct.magnitude.max(here.magnitude * diagonal.exp().norm()),
        }
    }

    /// Returns a copy normalized so that `<psi|psi> = 1` on `grid`.
    pub fn normalize(&self, grid: &TorusGrid) -> Result<Self> {
        if grid.geometry() != self.geometry {
            return Err(Error::GeometryMismatch);
        }
        let unit = self.with_norm_const(1.0);
        let norm = grid
            .integrate(|z| {
                let w = unit.weighted_derivative(Representation::Fourier, z, 0);
                Complex64::new(w.norm_sqr(), 0.0)
            })
            .re;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        Ok(unit.with_norm_const(1.0 / norm.sqrt()))
    }
}

/// Result of [`ThetaBasisFunction::boundary_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    pub residual_x: Complex64,
    pub residual_y: Complex64,
    pub scale_x: f64,
    pub scale_y: f64,
}

impl BoundaryResidual {
    /// The larger of the two residuals relative to its local magnitude.
    pub fn relative(&self) -> f64 {
        (self.residual_x.norm() / self.scale_x).max(self.residual_y.norm() / self.scale_y)
    }
}

/// Result of [`ThetaBasisFunction::double_shift`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleShift {
    pub direct: Complex64,
    pub x_then_y: Complex64,
    pub y_then_x: Complex64,
    /// `(-1)^N psi(z) exp((L1 - i L2) z + |L1 + i L2|^2 / 2)`.
    pub signed_diagonal: Complex64,
    pub scale: f64,
}

impl DoubleShift {
    /// Largest relative disagreement among the four evaluations.
    pub fn relative_spread(&self) -> f64 {
        [self.x_then_y, self.y_then_x, self.signed_diagonal]
            .iter()
            .map(|v| (v - self.direct).norm() / self.scale)
            .fold(0.0, f64::max)
    }

    /// `x_then_y / y_then_x`, which equals `exp(-2 i L1 L2) = 1`.
    pub fn order_ratio(&self) -> Complex64 {
        self.x_then_y / self.y_then_x
    }
}

/// The closed-form Fourier coefficient `c_n = exp(-pi n^2 L2 / (N L1))`, as a logarithm.
pub fn log_coefficient(geometry: &TorusGeometry, n: i64) -> f64 {
    let nf = n as f64;
    -PI * nf * nf * geometry.l2() / (geometry.flux() as f64 * geometry.l1())
}

/// Checks that the closed-form coefficients obey
/// `c_n = c_{n-N} exp(-2 n pi L2/L1 + 2 N pi L2/L1 - L2^2)`.
pub fn verify_recurrence(geometry: &TorusGeometry, nu: usize, n: i64) -> Result<bool> {
    let flux = geometry.flux();
    if nu >= flux as usize || n.rem_euclid(flux as i64) != nu as i64 {
        return Err(Error::IndexMismatch { n, nu, flux });
    }
    let (l1, l2) = (geometry.l1(), geometry.l2());
    let (nf, flux_f) = (n as f64, flux as f64);
    let lhs = log_coefficient(geometry, n);
    let rhs = log_coefficient(geometry, n - flux as i64) - 2.0 * nf * PI * l2 / l1
        + 2.0 * flux_f * PI * l2 / l1
        - l2 * l2;
    Ok((lhs - rhs).abs() <= 1e-14 * (1.0 + lhs.abs()))
}

/// The `N` ground-state sections of one torus.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundBasis {
    geometry: TorusGeometry,
    functions: Vec<ThetaBasisFunction>,
    representation: Representation,
}

impl GroundBasis {
    /// Unnormalized basis (`N_nu = 1`).
    pub fn new(geometry: TorusGeometry) -> Result<Self> {
        let functions = (0..geometry.flux() as usize)
            .map(|nu| ThetaBasisFunction::new(geometry, nu))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geometry,
            functions,
            representation: Representation::Fourier,
        })
    }

    /// Basis normalized on `grid`.
    pub fn normalized(grid: &TorusGrid) -> Result<Self> {
        let mut basis = Self::new(grid.geometry())?;
        for f in &mut basis.functions {
            *f = f.normalize(grid)?;
        }
        Ok(basis)
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.geometry
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn functions(&self) -> &[ThetaBasisFunction] {
        &self.functions
    }

    pub fn function(&self, nu: usize) -> &ThetaBasisFunction {
        &self.functions[nu]
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// `exp(-|w|^2/2) psi_nu^{(order)}(w)` for any `w`.
    ///
    /// The point is first reduced into the fundamental rectangle, `w = w0 + l`,
    /// and the value rebuilt from the twisted periodicity
    /// `psi(w0 + l) = (-1)^(N k1 k2) exp(conj(l) w0 + |l|^2/2) psi(w0)`,
    /// differentiated with the Leibniz rule.
    pub fn weighted(&self, nu: usize, w: Complex64, order: usize) -> Complex64 {
        let (w0, k1, k2) = self.geometry.reduce(w);
        let f = &self.functions[nu];
        if k1 == 0 && k2 == 0 {
            return f.weighted_derivative(self.representation, w0, order);
        }
        let ell = self.geometry.period(k1, k2);
        let ell_bar = ell.conj();
        let odd = (self.geometry.flux() as i64 * k1 * k2).rem_euclid(2) == 1;
        let sign = if odd { -1.0 } else { 1.0 };
        let phase = Complex64::from_polar(sign, (ell_bar * w0).im);
        let mut total = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for i in (0..=order).rev() {
            // binom = C(order, i), walking i downwards from `order`.
            let d = order - i;
            let term = f.weighted_derivative(self.representation, w0, i);
            total += binom * ell_bar.powu(d as u32) * term;
            binom = binom * i as f64 / (d + 1) as f64;
        }
        phase * total
    }
}

/// `P_k` of the derivative recurrence, stored by ascending powers of `w`.
#[derive(Debug, Clone)]
struct DerivativePolynomial {
    coeffs: [f64; Self::MAX_ORDER + 1],
    degree: usize,
}

impl DerivativePolynomial {
    const MAX_ORDER: usize = 8;

    fn new(order: usize, curvature: f64) -> Self {
        assert!(order <= Self::MAX_ORDER, "derivative order {order} not supported");
        let mut coeffs = [0.0; Self::MAX_ORDER + 1];
        coeffs[0] = 1.0;
        for k in 0..order {
            let mut next = [0.0; Self::MAX_ORDER + 1];
            for (p, slot) in next.iter_mut().enumerate().take(k + 2) {
                let shifted = if p > 0 { coeffs[p - 1] } else { 0.0 };
                let derived = if p < k { curvature * (p + 1) as f64 * coeffs[p + 1] } else { 0.0 };
                *slot = shifted + derived;
            }
            coeffs = next;
        }
        Self {
            coeffs,
            degree: order,
        }
    }

    fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs[..=self.degree]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }
}

/// Online log-sum-exp accumulator for `sum_k p_k exp(e_k)`.
#[derive(Debug, Default)]
struct LogSum {
    max: Option<f64>,
    value: Complex64,
    magnitude: f64,
}

impl LogSum {
    fn push(&mut self, exponent: Complex64, weight: Complex64) {
        match self.max {
            Some(m) if exponent.re <= m => {
                let t = weight * (exponent - m).exp();
                self.value += t;
                self.magnitude += t.norm();
            }
            Some(m) => {
                let rescale = (m - exponent.re).exp();
                self.value *= rescale;
                self.magnitude *= rescale;
                let t = weight * Complex64::from_polar(1.0, exponent.im);
                self.value += t;
                self.magnitude += t.norm();
                self.max = Some(exponent.re);
            }
            None => {
                let t = weight * Complex64::from_polar(1.0, exponent.im);
                self.value = t;
                self.magnitude = t.norm();
                self.max = Some(exponent.re);
            }
        }
    }

    fn finish(self) -> SeriesValue {
        self.finish_scaled(Complex64::new(0.0, 0.0))
    }

    /// Multiplies the sum by `exp(offset)`.
    fn finish_scaled(self, offset: Complex64) -> SeriesValue {
        let Some(max) = self.max else {
            return SeriesValue {
                value: Complex64::new(0.0, 0.0),
                magnitude: 0.0,
            };
        };
        let scale = (max + offset.re).exp();
        SeriesValue {
            value: self.value * Complex64::from_polar(scale, offset.im),
            magnitude: self.magnitude * scale,
        }
    }
}

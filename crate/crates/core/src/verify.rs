//! The end-to-end check suite run by `landau-torus verify`.
//!
//! Each criterion returns a [`CriterionResult`] holding the worst measured value
//! and the threshold it was held to. All thresholds come from [`crate::tolerances`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycle::{total_flux, Triangulation};
use crate::error::Result;
use crate::geometry::{dirac_quantize, TorusGeometry};
use crate::levels::{fit_deviation_decay, gram_matrix, identity_defect, rayleigh_quotient, LandauLevel};
use crate::lll_basis::{BoundaryPhases, GroundBasis, Representation};
use crate::quadrature::TorusGrid;
use crate::tolerances as tol;
use crate::translations::{
    commutator_check, density_shift_defect, translation_matrix, wintner_check, Translation,
};

/// Deliberate faults that must make the suite fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of the `x`-shift factor in the boundary check.
    BoundarySign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub n_max: u32,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            n_max: 6,
            seed: 0,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Self { id, name, passed, detail }
    }
}

/// Flux quanta used for the density figures.
pub const FIGURE_FLUXES: [u32; 4] = [1, 3, 6, 10];

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        quantization_gate(opts.n_max),
        ground_dimension(opts.n_max)?,
        poisson_duality(opts.n_max, opts.seed)?,
        boundary_conditions(opts.n_max, opts.fault)?,
        symmetry_breaking(opts.n_max)?,
        translation_algebra(opts.n_max)?,
        wintner(opts.n_max),
        energy_ladder(opts.n_max)?,
        flux_theorem()?,
        quadrature_convergence(opts.n_max)?,
    ])
}

/// Plain-text table, one line per criterion.
pub fn render(results: &[CriterionResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    results
        .iter()
        .map(|r| {
            format!(
                "{:>2}  {:<width$}  {}  {}\n",
                r.id,
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            )
        })
        .collect()
}

fn figure_fluxes(n_max: u32) -> Vec<u32> {
    FIGURE_FLUXES.iter().copied().filter(|&n| n <= n_max).collect()
}

pub fn quantization_gate(n_max: u32) -> CriterionResult {
    let mut failures = Vec::new();
    for n in 1..=n_max {
        for r in [0.5, 1.0, 2.0] {
            let l1 = (n as f64 * PI * r).sqrt();
            let l2 = (n as f64 * PI / r).sqrt();
            if dirac_quantize(l1, l2).ok() != Some(n) {
                failures.push(format!("rejected N={n} r={r}"));
            }
            if dirac_quantize(l1 * (1.0 + tol::QUANTIZATION_PERTURBATION), l2).is_ok() {
                failures.push(format!("accepted perturbed N={n} r={r}"));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} tori accepted, perturbations rejected", 3 * n_max)
    } else {
        failures.join("; ")
    };
    CriterionResult::new(1, "flux quantization gate", failures.is_empty(), detail)
}

pub fn ground_dimension(n_max: u32) -> Result<CriterionResult> {
    let mut worst = 0.0f64;
    let mut counts_ok = true;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let grid = TorusGrid::default_for(g);
        let level = LandauLevel::build(g, 0, &grid, Representation::Fourier)?;
        counts_ok &= level.len() == n as usize;
        worst = worst.max(identity_defect(&gram_matrix(level.sections(), &grid)?));
    }
    Ok(CriterionResult::new(
        2,
        "ground-state dimension and Gram",
        counts_ok && worst < tol::GRAM,
        format!("max |G - I| = {worst:.2e} (< {:e}), N basis functions each", tol::GRAM),
    ))
}

/// Relative Fourier/Gaussian disagreement of `psi_nu` at `z`.
pub fn duality_error(basis: &GroundBasis, nu: usize, z: Complex64) -> f64 {
    let f = basis.function(nu);
    let a = f.series(Representation::Fourier, z, 0, 0.0);
    let b = f.series(Representation::Gaussian, z, 0, 0.0);
    (a.value - b.value).norm() / a.magnitude.max(b.magnitude)
}

pub fn poisson_duality(n_max: u32, seed: u64) -> Result<CriterionResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let basis = GroundBasis::new(g)?;
        for nu in 0..n as usize {
            for _ in 0..1000 {
                let z = Complex64::new(rng.gen_range(0.0..g.l1()), rng.gen_range(0.0..g.l2()));
                worst = worst.max(duality_error(&basis, nu, z));
            }
        }
    }
    Ok(CriterionResult::new(
        3,
        "Poisson duality",
        worst < tol::DUALITY,
        format!("max relative difference {worst:.2e} (< {:e}) at 1000 points per (N, nu)", tol::DUALITY),
    ))
}

pub fn boundary_conditions(n_max: u32, fault: Option<Fault>) -> Result<CriterionResult> {
    let phases = match fault {
        Some(Fault::BoundarySign) => BoundaryPhases::new(PI, 0.0),
        None => BoundaryPhases::zero(),
    };
    let mut worst_boundary = 0.0f64;
    let mut worst_shift = 0.0f64;
    let mut worst_order = 0.0f64;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let grid = TorusGrid::new(g, 32, 32)?;
        let basis = GroundBasis::new(g)?;
        for f in basis.functions() {
            for k in 0..grid.len() {
                let z = grid.point_at(k);
                for rep in [Representation::Fourier, Representation::Gaussian] {
                    worst_boundary = worst_boundary.max(f.boundary_check(rep, z, phases).relative());
                }
                if k % 37 == 0 {
                    let d = f.double_shift(Representation::Fourier, z);
                    worst_shift = worst_shift.max(d.relative_spread());
                    worst_order = worst_order.max((d.order_ratio() - 1.0).norm());
                }
            }
        }
    }
    let passed = worst_boundary < tol::BOUNDARY && worst_shift < tol::DOUBLE_SHIFT && worst_order < tol::DOUBLE_SHIFT;
    Ok(CriterionResult::new(
        4,
        "boundary conditions",
        passed,
        format!(
            "residual {worst_boundary:.2e}, (-1)^N diagonal shift {worst_shift:.2e}, order ratio {worst_order:.2e} (< {:e})",
            tol::BOUNDARY
        ),
    ))
}

/// Deviation amplitude, lattice placement and shift invariance of one density map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityFigure {
    pub flux: u32,
    pub level: usize,
    pub max_deviation: f64,
    pub on_lattice: bool,
    pub shift_defect: f64,
    pub total_weight: f64,
}

pub fn density_figure(flux: u32, level: usize) -> Result<DensityFigure> {
    let g = TorusGeometry::square(flux)?;
    let grid = TorusGrid::default_for(g);
    let lvl = LandauLevel::build(g, level, &grid, Representation::Fourier)?;
    let map = lvl.density_map(&grid)?;
    let coarse = TorusGrid::new(g, 24, 24)?;
    let shift_defect = [(1, 0), (0, 1)]
        .iter()
        .map(|&(n1, n2)| density_shift_defect(&lvl, Translation::lattice(&g, n1, n2).displacement(), &coarse))
        .fold(0.0, f64::max);
    Ok(DensityFigure {
        flux,
        level,
        max_deviation: map.max_deviation,
        on_lattice: map.bump_report().on_lattice(),
        shift_defect,
        total_weight: map.total_weight(),
    })
}

pub fn symmetry_breaking(n_max: u32) -> Result<CriterionResult> {
    let fluxes = figure_fluxes(n_max);
    let mut passed = true;
    let mut notes = Vec::new();
    for level in [0, 1] {
        let figs: Vec<DensityFigure> = fluxes.iter().map(|&n| density_figure(n, level)).collect::<Result<_>>()?;
        let lattice = figs.iter().all(|f| f.on_lattice);
        let shift = figs.iter().map(|f| f.shift_defect).fold(0.0, f64::max);
        passed &= lattice && shift < tol::SHIFT_INVARIANCE;
        let mut note = format!("level {level}: extrema on lattice {lattice}, shift defect {shift:.1e}");
        if figs.len() >= 3 {
            let fit = fit_deviation_decay(&figs.iter().map(|f| (f.flux, f.max_deviation)).collect::<Vec<_>>());
            passed &= fit.strictly_decreasing && fit.relative_residual < tol::DECAY_FIT;
            note.push_str(&format!(
                ", d(N) decreasing {}, fit residual {:.1}%",
                fit.strictly_decreasing,
                100.0 * fit.relative_residual
            ));
        }
        notes.push(note);
    }
    Ok(CriterionResult::new(5, "symmetry breaking structure", passed, notes.join("; ")))
}

pub fn translation_algebra(n_max: u32) -> Result<CriterionResult> {
    let mut unitarity = 0.0f64;
    let mut lattice_projection = 0.0f64;
    let mut commutator = 0.0f64;
    let mut half_projection = f64::INFINITY;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let grid = TorusGrid::default_for(g);
        let level = LandauLevel::build(g, 0, &grid, Representation::Fourier)?;
        for (n1, n2) in [(1, 0), (0, 1), (1, 1)] {
            let m = translation_matrix(&Translation::lattice(&g, n1, n2), &level, &grid)?;
            unitarity = unitarity.max(m.unitarity_defect());
            lattice_projection = lattice_projection.max(m.max_projection_defect());
        }
        let a = Translation::lattice(&g, 1, 0).displacement();
        let b = Translation::lattice(&g, 0, 1).displacement();
        let c = commutator_check(&level, a, b, &grid)?;
        let expected = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        commutator = commutator.max(c.defect).max((c.expected_phase - expected).norm());
        let half = translation_matrix(&Translation::half_lattice(&g, 1, 0), &level, &grid)?;
        half_projection = half_projection.min(half.max_projection_defect());
    }
    let passed = unitarity < tol::UNITARITY
        && lattice_projection < tol::LATTICE_PROJECTION
        && commutator < tol::COMMUTATOR
        && half_projection > tol::HALF_LATTICE_MIN_DEFECT;
    Ok(CriterionResult::new(
        6,
        "translation algebra",
        passed,
        format!(
            "unitarity {unitarity:.1e}, stays in level {lattice_projection:.1e}, commutator {commutator:.1e}, half-lattice leaves by {half_projection:.2e}"
        ),
    ))
}

pub fn wintner(n_max: u32) -> CriterionResult {
    let mut exact = true;
    let mut witness = f64::INFINITY;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n).expect("square torus");
        let b = Translation::lattice(&g, 0, 1).displacement();
        for n1 in 0..n as i64 {
            for n2 in 0..n as i64 {
                exact &= wintner_check(n, Translation::lattice(&g, n1, n2).displacement(), b).consistent;
            }
        }
        let v = wintner_check(n, Translation::half_lattice(&g, 1, 0).displacement(), b);
        witness = witness.min((v.phase - 1.0).norm());
    }
    CriterionResult::new(
        7,
        "determinant obstruction",
        exact && witness > tol::WINTNER_WITNESS_DISTANCE,
        format!("lattice phases all 1: {exact}; half-lattice witness |phase - 1| >= {witness:.3}"),
    )
}

pub fn energy_ladder(n_max: u32) -> Result<CriterionResult> {
    let mut ground = 0.0f64;
    let mut excited = 0.0f64;
    let mut residual = 0.0f64;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let grid = TorusGrid::default_for(g);
        let check_grid = TorusGrid::new(g, 16, 16)?;
        for (k, worst) in [(0usize, &mut ground), (1, &mut excited)] {
            let level = LandauLevel::build(g, k, &grid, Representation::Fourier)?;
            let e = level.energy();
            for s in level.sections() {
                *worst = worst.max((rayleigh_quotient(s, &grid)? - e).abs());
                let hs = s.apply_hamiltonian();
                let pairs = check_grid.sample(|z| {
                    let v = s.weighted(z);
                    ((hs.weighted(z) - v * e).norm(), v.norm())
                });
                let top = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
                residual = residual.max(pairs.iter().map(|p| p.0).fold(0.0, f64::max) / top);
            }
        }
    }
    Ok(CriterionResult::new(
        8,
        "energy ladder",
        ground < tol::GROUND_ENERGY && excited < tol::EXCITED_ENERGY && residual < tol::EIGEN_RESIDUAL,
        format!("|E0| {ground:.1e}, |E1 - 2| {excited:.1e}, eigen residual {residual:.1e}"),
    ))
}

pub fn flux_theorem() -> Result<CriterionResult> {
    let mut passed = true;
    let mut worst_identity = 0.0f64;
    let mut worst_theorem = 0.0f64;
    let mut verdicts = Vec::new();
    for (flux, integral) in [(2.0 * PI, true), (6.0 * PI, true), (3.0 * PI, false)] {
        for n in [4, 8, 16] {
            let r = total_flux(&Triangulation::with_flux(1.0, PI, flux, n)?)?;
            passed &= r.identity_holds_everywhere && r.theorem_holds && r.weil_integral == integral;
            worst_identity = worst_identity.max(r.triangles.iter().map(|t| t.defect / t.lhs.abs()).fold(0.0, f64::max));
            worst_theorem = worst_theorem.max((r.sum_c - r.flux).abs() / r.flux);
        }
        verdicts.push(format!("{:.1}pi {}", flux / PI, if integral { "integral" } else { "not integral" }));
    }
    Ok(CriterionResult::new(
        9,
        "cocycle flux theorem",
        passed,
        format!(
            "triangle identity {worst_identity:.1e}, sum c vs flux {worst_theorem:.1e}, Weil: {}",
            verdicts.join(", ")
        ),
    ))
}

pub fn quadrature_convergence(n_max: u32) -> Result<CriterionResult> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let g = TorusGeometry::square(n)?;
        let grid = TorusGrid::default_for(g);
        for k in [0, 1] {
            let level = LandauLevel::build(g, k, &grid, Representation::Fourier)?;
            let coarse = gram_matrix(level.sections(), &grid)?;
            let fine = gram_matrix(level.sections(), &grid.refined())?;
            worst = worst.max((&coarse - &fine).iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    Ok(CriterionResult::new(
        10,
        "quadrature convergence",
        worst < tol::QUADRATURE_CONVERGENCE,
        format!("max inner product change on doubling {worst:.1e} (< {:e})", tol::QUADRATURE_CONVERGENCE),
    ))
}

//! Every numerical threshold used by the checks, in one table.

use serde::Serialize;

use crate::{cocycle, geometry, translations};

/// Gram matrix of a level against the identity, entrywise.
pub const GRAM: f64 = 1e-10;
/// Fourier against Gaussian evaluation, relative to the series magnitude.
pub const DUALITY: f64 = 1e-12;
/// Twisted periodicity residual, relative.
pub const BOUNDARY: f64 = 1e-12;
/// Agreement of the two shift orders with the signed diagonal shift, relative.
pub const DOUBLE_SHIFT: f64 = 1e-12;
/// Relative perturbation of a side that the quantization gate must reject.
pub const QUANTIZATION_PERTURBATION: f64 = 1e-6;
/// `|rho(z + a) - rho(z)| / mean(rho)` for `a` on the `Z_N x Z_N` lattice.
pub const SHIFT_INVARIANCE: f64 = 1e-10;
/// Largest `|ln d - fit|` over the spread of `ln d`.
pub const DECAY_FIT: f64 = 0.10;
/// `max |t t^dagger - I|` for lattice translations.
pub const UNITARITY: f64 = 1e-10;
/// Lattice translations leave the level up to this norm.
pub const LATTICE_PROJECTION: f64 = 1e-10;
/// Four-factor commutator against `exp(conj(a) b - a conj(b)) I`, entrywise.
pub const COMMUTATOR: f64 = 1e-9;
/// Half-lattice translations must leave the level by more than this.
pub const HALF_LATTICE_MIN_DEFECT: f64 = 1e-4;
/// `|exp(2 i N Im(conj(a) b)) - 1|` lower bound for the half-lattice witness.
pub const WINTNER_WITNESS_DISTANCE: f64 = 0.1;
/// Rayleigh quotient of ground states.
pub const GROUND_ENERGY: f64 = 1e-12;
/// Rayleigh quotient of first excited states against `2`.
pub const EXCITED_ENERGY: f64 = 1e-8;
/// `max |H s - E s|` relative to `max |s|`, weighted.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
/// Change of inner products when the grid is doubled.
pub const QUADRATURE_CONVERGENCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub name: &'static str,
    pub value: f64,
    pub meaning: &'static str,
}

pub fn table() -> Vec<Tolerance> {
    let t = |name, value, meaning| Tolerance { name, value, meaning };
    vec![
        t("flux_integrality", geometry::FLUX_INTEGRALITY_TOL, "relative distance of L1*L2/pi from an integer"),
        t("quantization_perturbation", QUANTIZATION_PERTURBATION, "relative side perturbation that must be rejected"),
        t("gram", GRAM, "max |G - I| for a level's Gram matrix"),
        t("duality", DUALITY, "Fourier vs Gaussian evaluation, relative"),
        t("boundary", BOUNDARY, "twisted periodicity residual, relative"),
        t("double_shift", DOUBLE_SHIFT, "shift orders vs signed diagonal shift, relative"),
        t("shift_invariance", SHIFT_INVARIANCE, "density change under lattice shifts over mean density"),
        t("decay_fit", DECAY_FIT, "log-linear fit residual of d(N) over the spread of ln d(N)"),
        t("unitarity", UNITARITY, "max |t t^dagger - I| for lattice translations"),
        t("lattice_projection", LATTICE_PROJECTION, "norm leaving the level under lattice translations"),
        t("commutator", COMMUTATOR, "four-factor commutator vs phase times identity"),
        t("half_lattice_min_defect", HALF_LATTICE_MIN_DEFECT, "minimum norm leaving the level for half-lattice shifts"),
        t("lattice_classification", translations::LATTICE_TOL, "distance of N a_x/L1 and N a_y/L2 from integers"),
        t("wintner", translations::WINTNER_TOL, "|exp(2iN Im(conj(a) b)) - 1| counted as 1"),
        t("wintner_witness_distance", WINTNER_WITNESS_DISTANCE, "minimum |phase - 1| for the half-lattice witness"),
        t("ground_energy", GROUND_ENERGY, "|<H>| on level 0, units of hbar omega"),
        t("excited_energy", EXCITED_ENERGY, "|<H> - 2| on level 1, units of hbar omega"),
        t("eigen_residual", EIGEN_RESIDUAL, "max |H s - E s| / max |s|"),
        t("quadrature_convergence", QUADRATURE_CONVERGENCE, "inner product change when the grid doubles"),
        t("cocycle_constancy", cocycle::COCYCLE_CONSTANCY_TOL, "spread of the cocycle over triangle corners / (1 + |c|)"),
        t("triangle_identity_rel", cocycle::IDENTITY_REL_TOL, "|lhs - rhs| relative part"),
        t("triangle_identity_abs", cocycle::IDENTITY_ABS_TOL, "|lhs - rhs| absolute part"),
        t("flux_theorem", cocycle::THEOREM_REL_TOL, "|sum c - B L1 L2| / |B L1 L2|"),
        t("weil", cocycle::WEIL_TOL, "distance of flux / 2pi from an integer"),
        t("mesh_area", cocycle::AREA_REL_TOL, "mesh area against L1 L2, relative"),
    ]
}

/// Plain-text rendering of [`table`].
pub fn render() -> String {
    let rows = table();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("{:<width$}  {:<8e}  {}\n", r.name, r.value, r.meaning));
    }
    out
}

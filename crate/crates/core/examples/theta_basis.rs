//! The `N` ground states as theta series, in both Poisson-dual forms.
//!
//! `cargo run --example theta_basis -- 3`

use landau_torus::lll_basis::{log_coefficient, verify_recurrence};
use landau_torus::{BoundaryPhases, Complex64, GroundBasis, Representation, TorusGeometry, TorusGrid};

fn main() -> landau_torus::Result<()> {
    let flux = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let g = TorusGeometry::square(flux)?;
    let basis = GroundBasis::normalized(&TorusGrid::default_for(g))?;
    let z = Complex64::new(0.37 * g.l1(), 0.61 * g.l2());

    println!("N = {flux}, L1 = L2 = {:.6}, z = {z:.4}", g.l1());
    for f in basis.functions() {
        let a = f.eval(Representation::Fourier, z);
        let b = f.eval(Representation::Gaussian, z);
        let r = f.boundary_check(Representation::Fourier, z, BoundaryPhases::zero());
        let d = f.double_shift(Representation::Fourier, z);
        println!(
            "nu = {}: psi = {a:.10}  |fourier - gaussian| = {:.1e}  boundary {:.1e}  diagonal shift {:.1e}",
            f.nu(),
            (a - b).norm(),
            r.relative(),
            d.relative_spread()
        );
    }

    // coefficients and their recurrence
    for n in [0i64, 1, flux as i64, 2 * flux as i64] {
        let nu = n.rem_euclid(flux as i64) as usize;
        println!(
            "ln c_{n} = {:.6}, recurrence from c_{} holds: {}",
            log_coefficient(&g, n),
            n - flux as i64,
            verify_recurrence(&g, nu, n)?
        );
    }
    Ok(())
}

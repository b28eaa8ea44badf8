//! Ground, first and second Landau levels: orthonormality, energies and density.

use landau_torus::levels::{gram_matrix, identity_defect, rayleigh_quotient, LandauLevel, MAX_LEVEL};
use landau_torus::{Representation, TorusGeometry, TorusGrid};

fn main() -> landau_torus::Result<()> {
    let g = TorusGeometry::with_aspect(4, 1.5)?;
    let grid = TorusGrid::default_for(g);
    println!("N = 4 on a {:.4} x {:.4} torus, {}x{} grid", g.l1(), g.l2(), grid.nx(), grid.ny());
    for k in 0..=MAX_LEVEL {
        let level = LandauLevel::build(g, k, &grid, Representation::Fourier)?;
        let gram = gram_matrix(level.sections(), &grid)?;
        let energies = level
            .sections()
            .iter()
            .map(|s| rayleigh_quotient(s, &grid))
            .collect::<landau_torus::Result<Vec<_>>>()?;
        let map = level.density_map(&grid)?;
        println!(
            "level {k}: dim {}, |G - I| = {:.1e}, <H> = {:?}, mean density x area = {:.12}",
            level.len(),
            identity_defect(&gram),
            energies.iter().map(|e| format!("{e:.10}")).collect::<Vec<_>>(),
            map.total_weight()
        );
    }
    Ok(())
}

//! Transition cocycles on a triangulated torus add up to the flux, and the
//! flux must lie in 2 pi Z for the cocycle to define a line bundle.

use std::f64::consts::PI;

use landau_torus::cocycle::{total_flux, Triangulation};

fn main() -> landau_torus::Result<()> {
    for flux in [2.0 * PI, 6.0 * PI, 3.0 * PI] {
        for n in [4, 8, 16] {
            let mesh = Triangulation::with_flux(1.0, 1.5, flux, n)?;
            let r = total_flux(&mesh)?;
            println!(
                "flux {:.1} pi, {:>3} triangles: sum c = {:.12}, identity defect {:.1e}, boundary terms {:.1e}, in 2 pi Z: {}",
                flux / PI,
                mesh.triangles.len(),
                r.sum_c,
                r.max_identity_defect,
                r.boundary_terms_sum,
                r.weil_integral
            );
        }
    }
    let small = Triangulation::with_flux(1.0, 1.0, 2.0 * PI, 3)?;
    println!("\n3x3 mesh as JSON:\n{}", small.to_json()?);
    Ok(())
}

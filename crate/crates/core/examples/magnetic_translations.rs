//! Magnetic translations restricted to the lowest level: lattice shifts act
//! unitarily with the clock-and-shift commutator, other shifts leave the level.

use landau_torus::levels::LandauLevel;
use landau_torus::translations::{
    bundle_shift_phase, commutator_check, translation_matrix, wintner_check, Translation,
};
use landau_torus::{Representation, TorusGeometry, TorusGrid};

fn main() -> landau_torus::Result<()> {
    let g = TorusGeometry::square(3)?;
    let grid = TorusGrid::default_for(g);
    let level = LandauLevel::build(g, 0, &grid, Representation::Fourier)?;

    for t in [
        Translation::lattice(&g, 1, 0),
        Translation::lattice(&g, 0, 1),
        Translation::half_lattice(&g, 1, 0),
    ] {
        let m = translation_matrix(&t, &level, &grid)?;
        println!(
            "a = {:.4}: lattice {}, unitarity {:.1e}, leaves level by {:.3e}",
            t.displacement(),
            t.is_lattice(&g),
            m.unitarity_defect(),
            m.max_projection_defect()
        );
        println!(
            "  boundary phase shift along iL2: {:.4}",
            bundle_shift_phase(&g, t.displacement(), g.period(0, 1))?
        );
    }

    let a = Translation::lattice(&g, 1, 0).displacement();
    let b = Translation::lattice(&g, 0, 1).displacement();
    let c = commutator_check(&level, a, b, &grid)?;
    println!("T_a T_b T_-a T_-b = {:.6} I (defect {:.1e})", c.expected_phase, c.defect);
    println!("operator matrix of T_a:\n{:.3}", translation_matrix(&Translation::new(a), &level, &grid)?.operator_matrix());

    let half = Translation::half_lattice(&g, 1, 0).displacement();
    println!("det phase, lattice pair: {:?}", wintner_check(3, a, b));
    println!("det phase, half-lattice pair: {:?}", wintner_check(3, half, b));
    Ok(())
}

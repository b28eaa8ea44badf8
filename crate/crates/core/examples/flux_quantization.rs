//! From a physical field and rectangle to the quantized torus in natural units.
//!
//! `cargo run --example flux_quantization`

use std::f64::consts::PI;

use landau_torus::{dirac_quantize, to_natural, Error, PhysicalConfig, TorusGeometry};

fn main() -> landau_torus::Result<()> {
    // an electron in 1 T; pick sides that hold exactly 4 flux quanta
    let probe = PhysicalConfig::electron(1.0e4, 1.0, 1.0);
    let side = (4.0 * PI).sqrt() * probe.length_unit();
    let cfg = PhysicalConfig::electron(1.0e4, side, side);
    println!("length unit   {:.6e} cm", cfg.length_unit());
    println!("flux quanta   {:.12}", cfg.flux_quanta());
    let g = to_natural(&cfg)?;
    println!("natural sides L1 = {:.12}, L2 = {:.12}, N = {}", g.l1(), g.l2(), g.flux());

    // aspect ratio is free once N is fixed
    for r in [0.5, 1.0, 2.0] {
        let g = TorusGeometry::with_aspect(3, r)?;
        println!("N = 3, L1/L2 = {r:<3}: L1 = {:.6}, L2 = {:.6}", g.l1(), g.l2());
    }

    match dirac_quantize(1.0, 1.0) {
        Err(Error::NonIntegralFlux { ratio, fractional }) => {
            println!("L1 = L2 = 1 rejected: L1 L2 / pi = {ratio:.6}, fractional part {fractional:.6}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

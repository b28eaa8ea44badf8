//! Deviation of the level density from uniformity, its lattice of bumps and
//! its decay with the number of flux quanta. Writes plot-ready CSV grids.
//!
//! `cargo run --release --example symmetry_breaking -- out/`

use std::fs::File;
use std::path::PathBuf;

use landau_torus::levels::{fit_deviation_decay, LandauLevel};
use landau_torus::{Representation, TorusGeometry, TorusGrid};

fn main() -> landau_torus::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
    }
    for level in [0, 1] {
        let mut points = Vec::new();
        for flux in [1, 3, 6, 10] {
            let g = TorusGeometry::square(flux)?;
            let grid = TorusGrid::default_for(g);
            let map = LandauLevel::build(g, level, &grid, Representation::Fourier)?.density_map(&grid)?;
            let bumps = map.bump_report();
            println!(
                "level {level} N = {flux:>2}: d = {:.3e}, {}/{} lattice points at maxima, {} at minima",
                map.max_deviation, bumps.lattice_at_maxima, bumps.lattice_points, bumps.lattice_at_minima
            );
            if let Some(dir) = &out {
                map.deviation.write_csv(File::create(dir.join(format!("deviation_N{flux}_level{level}.csv")))?)?;
            }
            points.push((flux, map.max_deviation));
        }
        let fit = fit_deviation_decay(&points);
        println!(
            "level {level}: ln d ~ {:.3} {:+.3} N, residual {:.1}% of range\n",
            fit.intercept,
            fit.slope,
            100.0 * fit.relative_residual
        );
    }
    Ok(())
}

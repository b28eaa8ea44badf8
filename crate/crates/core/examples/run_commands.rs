//! Drives the command layer from code: a config file plus overrides, the same
//! path the `landau-torus` binary takes.

use landau_torus::cli::{execute, Command, CocycleArgs};
use landau_torus::config::Settings;

fn main() -> landau_torus::Result<()> {
    let dir = std::env::temp_dir().join("landau-torus-example");
    let file = Settings::parse("# three flux quanta\nN = 3\ngrid = 48\na = lattice:1,2\n")?;
    let settings = file.merged(Settings {
        out_dir: Some(dir.clone()),
        ..Default::default()
    });
    for command in [Command::Basis, Command::Translate, Command::Cocycle(CocycleArgs::default())] {
        let outcome = execute(&command, &settings)?;
        print!("{}", outcome.summary);
        println!("  passed {}, outputs {:?}", outcome.manifest.passed, outcome.manifest.outputs);
    }
    println!("written under {}", dir.display());
    Ok(())
}

//! Run settings from a `key = value` file, merged with command-line flags.
//!
//! ```text
//! # torus with three flux quanta, aspect ratio 2
//! units = natural
//! N = 3
//! L1 = 4.3416
//! grid = 96
//! ```
//!
//! Geometry keys: `units` (`natural` or `physical`), `B`, `L1`, `L2`, `N`, and
//! for physical units the constants `e`, `m`, `hbar`, `c` (Gaussian cgs,
//! electron values by default). Run keys mirror the flags: `nu`, `level`,
//! `grid`, `a`, `mesh_n`, `flux`, `out_dir`, `format`, `seed`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dirac_quantize, to_natural, PhysicalConfig, TorusGeometry};
use crate::translations::Translation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Matrix,
    Json,
}

/// Every setting is optional; later sources override earlier ones via [`Settings::merged`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Settings {
    pub units: Option<Units>,
    pub field: Option<f64>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub flux_quanta: Option<Vec<u32>>,
    pub charge: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    pub light_speed: Option<f64>,
    pub nu: Option<usize>,
    pub level: Option<usize>,
    pub grid: Option<usize>,
    pub a: Option<String>,
    pub mesh_n: Option<usize>,
    pub flux: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse {key} = {value:?}"),
    })
}

/// Parses `1,3,6,10`.
pub fn parse_flux_list(value: &str) -> std::result::Result<Vec<u32>, String> {
    value
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format!("{s:?} is not a flux quantum count")))
        .collect()
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected key = value, found {content:?}"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "units" => {
                    s.units = Some(Units::from_str(value, true).map_err(|_| Error::Config {
                        line,
                        message: format!("units must be natural or physical, found {value:?}"),
                    })?)
                }
                "B" => s.field = Some(parse_value(line, key, value)?),
                "L1" => s.l1 = Some(parse_value(line, key, value)?),
                "L2" => s.l2 = Some(parse_value(line, key, value)?),
                "N" => s.flux_quanta = Some(parse_flux_list(value).map_err(|message| Error::Config { line, message })?),
                "e" => s.charge = Some(parse_value(line, key, value)?),
                "m" => s.mass = Some(parse_value(line, key, value)?),
                "hbar" => s.hbar = Some(parse_value(line, key, value)?),
                "c" => s.light_speed = Some(parse_value(line, key, value)?),
                "nu" => s.nu = Some(parse_value(line, key, value)?),
                "level" => s.level = Some(parse_value(line, key, value)?),
                "grid" => s.grid = Some(parse_value(line, key, value)?),
                "a" => s.a = Some(value.to_string()),
                "mesh_n" | "mesh-n" => s.mesh_n = Some(parse_value(line, key, value)?),
                "flux" => s.flux = Some(value.to_string()),
                "out_dir" | "out-dir" => s.out_dir = Some(PathBuf::from(value)),
                "format" => {
                    s.format = Some(OutputFormat::from_str(value, true).map_err(|_| Error::Config {
                        line,
                        message: format!("format must be csv, matrix or json, found {value:?}"),
                    })?)
                }
                "seed" => s.seed = Some(parse_value(line, key, value)?),
                _ => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `self` with every setting present in `overrides` replaced.
    pub fn merged(self, overrides: Settings) -> Settings {
        Settings {
            units: overrides.units.or(self.units),
            field: overrides.field.or(self.field),
            l1: overrides.l1.or(self.l1),
            l2: overrides.l2.or(self.l2),
            flux_quanta: overrides.flux_quanta.or(self.flux_quanta),
            charge: overrides.charge.or(self.charge),
            mass: overrides.mass.or(self.mass),
            hbar: overrides.hbar.or(self.hbar),
            light_speed: overrides.light_speed.or(self.light_speed),
            nu: overrides.nu.or(self.nu),
            level: overrides.level.or(self.level),
            grid: overrides.grid.or(self.grid),
            a: overrides.a.or(self.a),
            mesh_n: overrides.mesh_n.or(self.mesh_n),
            flux: overrides.flux.or(self.flux),
            out_dir: overrides.out_dir.or(self.out_dir),
            format: overrides.format.or(self.format),
            seed: overrides.seed.or(self.seed),
        }
    }

    /// The single torus described by the settings; defaults to the square `N = 1` torus.
    pub fn geometry(&self) -> Result<TorusGeometry> {
        let list = self.flux_quanta.as_deref().unwrap_or(&[]);
        if list.len() > 1 {
            return Err(Error::InvalidParameter(format!(
                "expected a single N, found {}",
                list.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            )));
        }
        self.geometry_for(list.first().copied())
    }

    /// One torus per requested `N`, or `defaults` when no `N` is set.
    pub fn geometries(&self, defaults: &[u32]) -> Result<Vec<TorusGeometry>> {
        match self.flux_quanta.as_deref() {
            Some(list) if !list.is_empty() => list.iter().map(|&n| self.geometry_for(Some(n))).collect(),
            _ if self.l1.is_some() && self.l2.is_some() => Ok(vec![self.geometry_for(None)?]),
            _ => defaults.iter().map(|&n| self.geometry_for(Some(n))).collect(),
        }
    }

    fn geometry_for(&self, n: Option<u32>) -> Result<TorusGeometry> {
        match self.units.unwrap_or_default() {
            Units::Natural => {
                if self.field.is_some() {
                    return Err(Error::InvalidParameter(
                        "B is fixed by the length unit in natural units; use units = physical".into(),
                    ));
                }
                match (self.l1, self.l2, n) {
                    (Some(l1), Some(l2), n) => {
                        let g = TorusGeometry::new(l1, l2)?;
                        check_override(g, n)
                    }
                    (Some(l1), None, Some(n)) => TorusGeometry::with_side(n, l1),
                    (None, Some(l2), Some(n)) => TorusGeometry::with_side(n, n as f64 * PI / l2),
                    (Some(_), None, None) | (None, Some(_), None) => {
                        Err(Error::InvalidParameter("a single side needs N to fix the other".into()))
                    }
                    (None, None, n) => TorusGeometry::square(n.unwrap_or(1)),
                }
            }
            Units::Physical => {
                let (Some(field), Some(side1), Some(side2)) = (self.field, self.l1, self.l2) else {
                    return Err(Error::InvalidParameter("physical units need B, L1 and L2".into()));
                };
                let mut cfg = PhysicalConfig::electron(field, side1, side2);
                cfg.charge = self.charge.unwrap_or(cfg.charge);
                cfg.mass = self.mass.unwrap_or(cfg.mass);
                cfg.hbar = self.hbar.unwrap_or(cfg.hbar);
                cfg.light_speed = self.light_speed.unwrap_or(cfg.light_speed);
                check_override(to_natural(&cfg)?, n)
            }
        }
    }
}

fn check_override(g: TorusGeometry, n: Option<u32>) -> Result<TorusGeometry> {
    match n {
        Some(n) if n != g.flux() => Err(Error::InvalidParameter(format!(
            "N = {n} disagrees with the sides, which carry N = {}",
            dirac_quantize(g.l1(), g.l2())?
        ))),
        _ => Ok(g),
    }
}

/// A displacement given as `lattice:n1,n2`, `half:m1,m2` or `x,y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisplacementSpec {
    /// `(n1 L1 + i n2 L2) / N`.
    Lattice(i64, i64),
    /// `(m1 L1 + i m2 L2) / (2N)`.
    HalfLattice(i64, i64),
    Value(Complex64),
}

impl DisplacementSpec {
    pub fn resolve(&self, geometry: &TorusGeometry) -> Translation {
        match *self {
            Self::Lattice(n1, n2) => Translation::lattice(geometry, n1, n2),
            Self::HalfLattice(m1, m2) => Translation::half_lattice(geometry, m1, m2),
            Self::Value(a) => Translation::new(a),
        }
    }
}

impl FromStr for DisplacementSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let pair = |body: &str| -> std::result::Result<(String, String), String> {
            let (a, b) = body.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers in {s:?}"))?;
            Ok((a.trim().to_string(), b.trim().to_string()))
        };
        let ints = |body: &str| -> std::result::Result<(i64, i64), String> {
            let (a, b) = pair(body)?;
            Ok((
                a.parse().map_err(|_| format!("{a:?} is not an integer"))?,
                b.parse().map_err(|_| format!("{b:?} is not an integer"))?,
            ))
        };
        if let Some(body) = s.strip_prefix("lattice:") {
            let (n1, n2) = ints(body)?;
            Ok(Self::Lattice(n1, n2))
        } else if let Some(body) = s.strip_prefix("half:") {
            let (m1, m2) = ints(body)?;
            Ok(Self::HalfLattice(m1, m2))
        } else {
            let (a, b) = pair(s)?;
            Ok(Self::Value(Complex64::new(
                a.parse().map_err(|_| format!("{a:?} is not a number"))?,
                b.parse().map_err(|_| format!("{b:?} is not a number"))?,
            )))
        }
    }
}

/// Parses a flux such as `6pi`, `3*pi`, `1.5π`, `pi` or a plain number.
pub fn parse_flux(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let stripped = t.strip_suffix("pi").or_else(|| t.strip_suffix('π'));
    let (number, factor) = match stripped {
        Some(rest) => (rest.trim().trim_end_matches('*').trim(), PI),
        None => (t, 1.0),
    };
    let value = if number.is_empty() {
        1.0
    } else {
        number.parse::<f64>().map_err(|_| format!("cannot read flux {s:?}"))?
    };
    if value.is_finite() {
        Ok(value * factor)
    } else {
        Err(format!("flux {s:?} is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let s = Settings::parse("# comment\nunits = natural\nN = 3\nL1 = 2.5  # side\n\ngrid=64\na = half:1,0\n").unwrap();
        assert_eq!(s.units, Some(Units::Natural));
        assert_eq!(s.flux_quanta, Some(vec![3]));
        assert_eq!(s.l1, Some(2.5));
        assert_eq!(s.grid, Some(64));
        let g = s.geometry().unwrap();
        assert_eq!(g.flux(), 3);
        assert!((g.l2() - 3.0 * PI / 2.5).abs() < 1e-12);
    }

    #[test]
    fn reports_the_offending_line() {
        match Settings::parse("N = 2\nwidth = 3\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Settings::parse("L1 3"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(Settings::parse("units = metric"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn flags_override_the_file() {
        let file = Settings::parse("N = 2\ngrid = 32").unwrap();
        let flags = Settings {
            flux_quanta: Some(vec![5]),
            ..Default::default()
        };
        let s = file.merged(flags);
        assert_eq!(s.flux_quanta, Some(vec![5]));
        assert_eq!(s.grid, Some(32));
    }

    #[test]
    fn sides_and_override_must_agree() {
        let l = (3.0 * PI).sqrt();
        let s = Settings {
            l1: Some(l),
            l2: Some(l),
            flux_quanta: Some(vec![2]),
            ..Default::default()
        };
        assert!(matches!(s.geometry(), Err(Error::InvalidParameter(_))));
        let s = Settings {
            l1: Some(1.0),
            l2: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(s.geometry(), Err(Error::NonIntegralFlux { .. })));
    }

    #[test]
    fn physical_units() {
        let cfg = PhysicalConfig::electron(1.0e4, 1.0e-4, 1.0e-4);
        let unit = cfg.length_unit();
        let n = 4.0_f64;
        let side = (n * PI).sqrt() * unit;
        let s = Settings::parse(&format!("units = physical\nB = 1e4\nL1 = {side:e}\nL2 = {side:e}\n")).unwrap();
        assert_eq!(s.geometry().unwrap().flux(), 4);
    }

    #[test]
    fn flux_expressions() {
        assert!((parse_flux("6pi").unwrap() - 6.0 * PI).abs() < 1e-15);
        assert!((parse_flux("3 * pi").unwrap() - 3.0 * PI).abs() < 1e-15);
        assert!((parse_flux("π").unwrap() - PI).abs() < 1e-15);
        assert_eq!(parse_flux("0").unwrap(), 0.0);
        assert!(parse_flux("lots").is_err());
    }

    #[test]
    fn displacement_specs() {
        assert_eq!("lattice:1,-2".parse::<DisplacementSpec>(), Ok(DisplacementSpec::Lattice(1, -2)));
        assert_eq!("half:1,0".parse::<DisplacementSpec>(), Ok(DisplacementSpec::HalfLattice(1, 0)));
        assert_eq!(
            "0.5, 0.25".parse::<DisplacementSpec>(),
            Ok(DisplacementSpec::Value(Complex64::new(0.5, 0.25)))
        );
        assert!("lattice:1".parse::<DisplacementSpec>().is_err());
    }

    #[test]
    fn geometry_lists() {
        let s = Settings {
            flux_quanta: Some(vec![1, 3]),
            ..Default::default()
        };
        let gs = s.geometries(&[1, 3, 6, 10]).unwrap();
        assert_eq!(gs.iter().map(|g| g.flux()).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(Settings::default().geometries(&[1, 3, 6, 10]).unwrap().len(), 4);
        assert!(s.geometry().is_err());
    }
}

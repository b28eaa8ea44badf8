//! Real-valued samples on the periodic grid and their on-disk formats.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::TorusGeometry;
use crate::quadrature::{pairwise_sum_real, TorusGrid};

/// Samples `values[j * nx + i]` at `(i L1/nx, j L2/ny)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub quantity: String,
    pub geometry: TorusGeometry,
    pub level: Option<usize>,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// JSON sidecar written next to a CSV grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSidecar {
    pub quantity: String,
    pub flux: u32,
    pub l1: f64,
    pub l2: f64,
    pub level: Option<usize>,
    pub nx: usize,
    pub ny: usize,
    pub layout: &'static str,
    pub statistics: FieldStats,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl GridField {
    pub fn from_samples(quantity: impl Into<String>, grid: &TorusGrid, level: Option<usize>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        Self {
            quantity: quantity.into(),
            geometry: grid.geometry(),
            level,
            nx: grid.nx(),
            ny: grid.ny(),
            values,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Periodic access with wrapped indices.
    pub fn get_wrapped(&self, i: isize, j: isize) -> f64 {
        let i = i.rem_euclid(self.nx as isize) as usize;
        let j = j.rem_euclid(self.ny as isize) as usize;
        self.get(i, j)
    }

    pub fn map(&self, quantity: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        Self {
            quantity: quantity.into(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn stats(&self) -> FieldStats {
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        FieldStats {
            min,
            max,
            mean: pairwise_sum_real(&self.values) / self.values.len() as f64,
        }
    }

    /// One row per y-line, comma separated.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.write_rows(&mut out, ",")
    }

    /// Whitespace-delimited matrix, one row per y-line (gnuplot `matrix` layout).
    pub fn write_matrix<W: Write>(&self, mut out: W) -> Result<()> {
        self.write_rows(&mut out, " ")
    }

    fn write_rows<W: Write>(&self, out: &mut W, sep: &str) -> Result<()> {
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", line.join(sep))?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> GridSidecar {
        GridSidecar {
            quantity: self.quantity.clone(),
            flux: self.geometry.flux(),
            l1: self.geometry.l1(),
            l2: self.geometry.l2(),
            level: self.level,
            nx: self.nx,
            ny: self.ny,
            layout: "row j holds y = j*L2/ny, column i holds x = i*L1/nx",
            statistics: self.stats(),
            extra: serde_json::Map::new(),
        }
    }

    /// Strict local maxima and minima against the 8 periodic neighbours.
    pub fn local_extrema(&self) -> LocalExtrema {
        let mut maxima = Vec::new();
        let mut minima = Vec::new();
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                let v = self.get_wrapped(i, j);
                let mut is_max = true;
                let mut is_min = true;
                for dj in -1..=1 {
                    for di in -1..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let w = self.get_wrapped(i + di, j + dj);
                        is_max &= v > w;
                        is_min &= v < w;
                    }
                }
                if is_max {
                    maxima.push((i as usize, j as usize));
                }
                if is_min {
                    minima.push((i as usize, j as usize));
                }
            }
        }
        LocalExtrema { maxima, minima }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalExtrema {
    pub maxima: Vec<(usize, usize)>,
    pub minima: Vec<(usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cosine_field(flux: u32, n: usize) -> GridField {
        let g = TorusGeometry::square(flux).unwrap();
        let grid = TorusGrid::new(g, n, n).unwrap();
        let values = grid.sample(|z| {
            (2.0 * PI * flux as f64 * z.re / g.l1()).cos() + (2.0 * PI * flux as f64 * z.im / g.l2()).cos()
        });
        GridField::from_samples("test", &grid, None, values)
    }

    #[test]
    fn csv_and_matrix_layout() {
        let f = cosine_field(1, 4);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 4);
        assert!(text.starts_with("2e0,"));
        let mut m = Vec::new();
        f.write_matrix(&mut m).unwrap();
        assert_eq!(String::from_utf8(m).unwrap().lines().next().unwrap().split(' ').count(), 4);
    }

    #[test]
    fn extrema_of_a_product_of_cosines() {
        let f = cosine_field(2, 32);
        let e = f.local_extrema();
        assert_eq!(e.maxima.len(), 4);
        assert_eq!(e.minima.len(), 4);
        assert!(e.maxima.contains(&(0, 0)) && e.maxima.contains(&(16, 16)));
        assert!(e.minima.contains(&(8, 8)));
    }

    #[test]
    fn sidecar_serializes() {
        let f = cosine_field(1, 8);
        let json = serde_json::to_value(f.sidecar()).unwrap();
        assert_eq!(json["nx"], 8);
        assert!((json["statistics"]["mean"].as_f64().unwrap()).abs() < 1e-15);
    }
}

//! Deterministic CSV and JSON emission.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), columns in a
//! fixed order and every line newline-terminated, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bands::BandPoint;
use crate::error::{Error, Result};
use crate::lattice::LatticeWindow;
use crate::propagator::BandOccupations;
use crate::scenario::ScenarioReport;
use crate::spectrum::LadderSpectrum;

pub const BANDS_HEADER: &str = "kappa,E0,E1,u,v,absM";
pub const SPECTRUM_HEADER: &str = "delta,Delta,Fd,offset,method,degenerate";
pub const OCCUPATION_HEADER: &str = "t,p0,p1";
pub const DENSITY_HEADER: &str = "t,n,density";
pub const SERIES_HEADER: &str = "t,centroid,width";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn table<'a>(header: &str, rows: impl Iterator<Item = Vec<String>> + 'a) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn bands_csv(points: &[BandPoint]) -> String {
    table(
        BANDS_HEADER,
        points.iter().map(|p| {
            [p.kappa, p.e0, p.e1, p.u, p.v, p.coupling.norm()]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect()
        }),
    )
}

pub fn spectrum_csv(spectra: &[LadderSpectrum]) -> String {
    table(
        SPECTRUM_HEADER,
        spectra.iter().map(|s| {
            vec![
                fmt_f64(s.params.delta),
                fmt_f64(s.params.big_delta),
                fmt_f64(s.params.fd()),
                fmt_f64(s.offset_e0),
                s.method.as_str().to_string(),
                s.degenerate.to_string(),
            ]
        }),
    )
}

pub fn occupations_csv(occupations: &[BandOccupations]) -> String {
    table(
        OCCUPATION_HEADER,
        occupations.iter().map(|o| vec![fmt_f64(o.t), fmt_f64(o.p0), fmt_f64(o.p1)]),
    )
}

/// Long format: one line per `(t, n)`.
pub fn density_csv(times: &[f64], window: &LatticeWindow, densities: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity(64 * times.len() * window.len() + 16);
    out.push_str(DENSITY_HEADER);
    out.push('\n');
    for (t, row) in times.iter().zip(densities) {
        let t = fmt_f64(*t);
        for (n, rho) in window.sites().zip(row) {
            let _ = writeln!(out, "{t},{n},{}", fmt_f64(*rho));
        }
    }
    out
}

pub fn series_csv(times: &[f64], centroids: &[f64], widths: &[f64]) -> String {
    table(
        SERIES_HEADER,
        times
            .iter()
            .zip(centroids.iter().zip(widths))
            .map(|(t, (c, w))| vec![fmt_f64(*t), fmt_f64(*c), fmt_f64(*w)]),
    )
}

/// Generic table with caller-chosen columns, all numeric.
pub fn numeric_csv(header: &str, rows: &[Vec<f64>]) -> String {
    table(header, rows.iter().map(|r| r.iter().map(|x| fmt_f64(*x)).collect()))
}

/// Pretty JSON, newline-terminated; non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io {
        path: "<json>".into(),
        source: std::io::Error::other(e),
    })?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Anything with a canonical CSV table and a JSON form.
pub trait Report {
    fn to_csv(&self) -> String;
    fn to_json(&self) -> Result<String>;
}

impl Report for [BandPoint] {
    fn to_csv(&self) -> String {
        bands_csv(self)
    }
    fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

impl Report for [LadderSpectrum] {
    fn to_csv(&self) -> String {
        spectrum_csv(self)
    }
    fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

impl Report for [BandOccupations] {
    fn to_csv(&self) -> String {
        occupations_csv(self)
    }
    fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// CSV is the density map; JSON is the summary without it.
impl Report for ScenarioReport {
    fn to_csv(&self) -> String {
        density_csv(&self.times, &self.window, &self.densities)
    }
    fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

pub fn emit_report<R: Report + ?Sized>(report: &R, format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    write_text(path, &text)
}

/// Write every table of a scenario report into `dir`: `density.csv`,
/// `occupations.csv`, `stroboscopic.csv`, `series.csv` and `summary.json`.
pub fn emit_scenario(report: &ScenarioReport, dir: &Path) -> Result<()> {
    write_text(&dir.join("density.csv"), &report.to_csv())?;
    write_text(&dir.join("occupations.csv"), &occupations_csv(&report.occupations))?;
    write_text(&dir.join("stroboscopic.csv"), &occupations_csv(&report.stroboscopic))?;
    write_text(
        &dir.join("series.csv"),
        &series_csv(&report.times, &report.centroids, &report.widths),
    )?;
    write_text(&dir.join("summary.json"), &report.to_json()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5178), "-5.1780000000000004e-1");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn occupation_table() {
        let occ = [BandOccupations {
            t: 0.0,
            p0: 1.0,
            p1: 0.0,
            degenerate: false,
        }];
        let csv = occupations_csv(&occ);
        assert_eq!(csv, "t,p0,p1\n0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0\n");
    }

    #[test]
    fn json_nan_is_null() {
        let s = to_json(&[1.0, f64::NAN]).unwrap();
        assert!(s.contains("null") && s.ends_with('\n'));
    }

    #[test]
    fn density_long_format() {
        let w = LatticeWindow::new(-1, 1, 0).unwrap();
        let csv = density_csv(&[0.5], &w, &[vec![0.25, 0.5, 0.25]]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DENSITY_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5.0000000000000000e-1,-1,"));
    }
}

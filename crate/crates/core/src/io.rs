//! File formats: imaging maps (CSV plus a metadata sidecar), MSR archives
//! (manifest plus one CSV matrix per frequency), comparison reports and PGM
//! previews. All writes go through a write-temp-then-rename step so that
//! re-runs overwrite atomically.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::ComparisonTable;
use crate::error::{Error, Result};
use crate::forward::{MSRMatrix, Provenance};
use crate::imaging::{ImagingMap, MethodTag};

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp");
            path.with_file_name(n)
        }
        None => return Err(Error::invalid(format!("not a file path: {}", path.display()))),
    };
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Formats with 9 significant digits, the precision maps are stored at.
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

// ---------------------------------------------------------------------------
// Imaging maps
// ---------------------------------------------------------------------------

/// Sidecar recorded next to each map CSV.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapMetadata {
    pub method: String,
    pub frequencies: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub snr_db: Option<f64>,
    pub scenario_hash: String,
    pub grid: GridMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridMetadata {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub step: f64,
    pub n1: usize,
    pub n2: usize,
}

impl MapMetadata {
    pub fn for_map(map: &ImagingMap, scenario_hash: &str) -> Self {
        let method = match &map.method {
            MethodTag::Filter { f_count } => format!("filter(F={f_count})"),
            MethodTag::Music { m_hat, .. } => format!("music(m_hat={m_hat})"),
            MethodTag::Kirchhoff { .. } => "kirchhoff".to_string(),
        };
        Self {
            method,
            frequencies: map.frequencies.clone(),
            seed: map.noise.map(|n| n.seed),
            snr_db: map.noise.map(|n| n.snr_db),
            scenario_hash: scenario_hash.to_string(),
            grid: GridMetadata {
                x1_min: map.grid.x1_min,
                x1_max: map.grid.x1_max,
                x2_min: map.grid.x2_min,
                x2_max: map.grid.x2_max,
                step: map.grid.step,
                n1: map.grid.n1(),
                n2: map.grid.n2(),
            },
        }
    }
}

/// Path of a map's metadata sidecar: `name.csv` -> `name.meta.json`.
pub fn map_metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Renders a map as long-form CSV, one row per lattice point, row-major with
/// `x2` as the outer (ascending) axis.
pub fn render_map_csv(map: &ImagingMap) -> String {
    let mut out = String::with_capacity(map.values.len() * 40 + 16);
    out.push_str("x1,x2,value\n");
    for i2 in 0..map.grid.n2() {
        for i1 in 0..map.grid.n1() {
            let p = map.grid.point(i1, i2);
            out.push_str(&sig9(p.x));
            out.push(',');
            out.push_str(&sig9(p.y));
            out.push(',');
            out.push_str(&sig9(map.value_at(i1, i2)));
            out.push('\n');
        }
    }
    out
}

/// Writes the map CSV and its metadata sidecar.
pub fn write_map(map: &ImagingMap, scenario_hash: &str, csv_path: &Path) -> Result<()> {
    atomic_write(csv_path, render_map_csv(map).as_bytes())?;
    let meta = MapMetadata::for_map(map, scenario_hash);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    atomic_write(&map_metadata_path(csv_path), json.as_bytes())?;
    Ok(())
}

/// One parsed map row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub x1: f64,
    pub x2: f64,
    pub value: f64,
}

/// Strict parser for the map CSV format.
pub fn parse_map_csv(text: &str) -> Result<Vec<MapRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("x1,x2,value") => {}
        other => {
            return Err(Error::Parse(format!(
                "map CSV must start with the header 'x1,x2,value', got {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut next_f64 = |name: &str| -> Result<f64> {
            let field = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", lineno + 2)))?;
            field.trim().parse::<f64>().map_err(|e| {
                Error::Parse(format!("line {}: bad {name} '{field}': {e}", lineno + 2))
            })
        };
        let x1 = next_f64("x1")?;
        let x2 = next_f64("x2")?;
        let value = next_f64("value")?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!(
                "line {}: expected 3 fields",
                lineno + 2
            )));
        }
        rows.push(MapRow { x1, x2, value });
    }
    Ok(rows)
}

pub fn read_map(csv_path: &Path) -> Result<(Vec<MapRow>, MapMetadata)> {
    let rows = parse_map_csv(&fs::read_to_string(csv_path)?)?;
    let meta_text = fs::read_to_string(map_metadata_path(csv_path))?;
    let meta: MapMetadata =
        serde_json::from_str(&meta_text).map_err(|e| Error::Parse(e.to_string()))?;
    if rows.len() != meta.grid.n1 * meta.grid.n2 {
        return Err(Error::Parse(format!(
            "map row count {} does not match the {}x{} grid",
            rows.len(),
            meta.grid.n1,
            meta.grid.n2
        )));
    }
    Ok((rows, meta))
}

// ---------------------------------------------------------------------------
// MSR archives
// ---------------------------------------------------------------------------

/// Scenario-level noise settings recorded in an archive.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArchiveNoise {
    pub seed: u64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArchiveEntry {
    pub file: String,
    pub omega: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArchiveManifest {
    pub n_obs: usize,
    pub n_inc: usize,
    pub scenario_hash: String,
    #[serde(default)]
    pub noise: Option<ArchiveNoise>,
    pub entries: Vec<ArchiveEntry>,
}

/// Renders one complex matrix as CSV with 1-based indices and full-precision
/// floats (17 significant digits round-trip f64 exactly).
pub fn render_matrix_csv(m: &DMatrix<Complex64>) -> String {
    let mut out = String::with_capacity(m.len() * 56 + 16);
    out.push_str("j,l,re,im\n");
    for j in 0..m.nrows() {
        for l in 0..m.ncols() {
            let z = m[(j, l)];
            out.push_str(&format!("{},{},{:.16e},{:.16e}\n", j + 1, l + 1, z.re, z.im));
        }
    }
    out
}

/// Strict parser for the matrix CSV format: every (j, l) pair must appear
/// exactly once and stay within the declared shape.
pub fn parse_matrix_csv(text: &str, n_obs: usize, n_inc: usize) -> Result<DMatrix<Complex64>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("j,l,re,im") => {}
        other => {
            return Err(Error::Parse(format!(
                "matrix CSV must start with the header 'j,l,re,im', got {other:?}"
            )))
        }
    }
    if n_obs == 0 || n_inc == 0 || n_obs.checked_mul(n_inc).is_none() {
        return Err(Error::Parse(format!("bad matrix shape {n_obs}x{n_inc}")));
    }
    let mut data = DMatrix::from_element(n_obs, n_inc, Complex64::new(0.0, 0.0));
    let mut seen = vec![false; n_obs * n_inc];
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 4 fields",
                lineno + 2
            )));
        }
        let j: usize = fields[0].trim().parse().map_err(|e| {
            Error::Parse(format!("line {}: bad j '{}': {e}", lineno + 2, fields[0]))
        })?;
        let l: usize = fields[1].trim().parse().map_err(|e| {
            Error::Parse(format!("line {}: bad l '{}': {e}", lineno + 2, fields[1]))
        })?;
        let re: f64 = fields[2].trim().parse().map_err(|e| {
            Error::Parse(format!("line {}: bad re '{}': {e}", lineno + 2, fields[2]))
        })?;
        let im: f64 = fields[3].trim().parse().map_err(|e| {
            Error::Parse(format!("line {}: bad im '{}': {e}", lineno + 2, fields[3]))
        })?;
        if !(1..=n_obs).contains(&j) || !(1..=n_inc).contains(&l) {
            return Err(Error::Parse(format!(
                "line {}: index ({j}, {l}) outside {n_obs}x{n_inc}",
                lineno + 2
            )));
        }
        let idx = (j - 1) * n_inc + (l - 1);
        if seen[idx] {
            return Err(Error::Parse(format!(
                "line {}: duplicate entry ({j}, {l})",
                lineno + 2
            )));
        }
        seen[idx] = true;
        count += 1;
        data[(j - 1, l - 1)] = Complex64::new(re, im);
    }
    if count != n_obs * n_inc {
        return Err(Error::Parse(format!(
            "matrix CSV has {count} entries, expected {}",
            n_obs * n_inc
        )));
    }
    Ok(data)
}

/// Writes one matrix per frequency plus `manifest.json` into `dir`.
pub fn write_archive(
    dir: &Path,
    matrices: &[MSRMatrix],
    scenario_hash: &str,
    noise: Option<ArchiveNoise>,
) -> Result<()> {
    if matrices.is_empty() {
        return Err(Error::invalid("archive needs at least one matrix"));
    }
    let n_obs = matrices[0].n_obs();
    let n_inc = matrices[0].n_inc();
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(matrices.len());
    for (f, m) in matrices.iter().enumerate() {
        if m.n_obs() != n_obs || m.n_inc() != n_inc {
            return Err(Error::invalid("archive matrices must share one shape"));
        }
        let file = format!("msr_{f:03}.csv");
        atomic_write(&dir.join(&file), render_matrix_csv(&m.data).as_bytes())?;
        entries.push(ArchiveEntry {
            file,
            omega: m.omega,
            provenance: m.provenance,
        });
    }
    let manifest = ArchiveManifest {
        n_obs,
        n_inc,
        scenario_hash: scenario_hash.to_string(),
        noise,
        entries,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    atomic_write(&dir.join("manifest.json"), json.as_bytes())?;
    Ok(())
}

pub fn parse_manifest(text: &str) -> Result<ArchiveManifest> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads an archive back into per-frequency matrices.
pub fn read_archive(dir: &Path) -> Result<(Vec<MSRMatrix>, ArchiveManifest)> {
    let manifest = parse_manifest(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut matrices = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let text = fs::read_to_string(dir.join(&entry.file))?;
        let data = parse_matrix_csv(&text, manifest.n_obs, manifest.n_inc)?;
        matrices.push(MSRMatrix {
            data,
            omega: entry.omega,
            provenance: entry.provenance,
        });
    }
    Ok((matrices, manifest))
}

// ---------------------------------------------------------------------------
// Reports and previews
// ---------------------------------------------------------------------------

/// Renders a method comparison as CSV: one row per (method, seed) with the
/// per-truth matched errors and their mean. Unmatched truths leave the field
/// empty.
pub fn render_report_csv(table: &ComparisonTable) -> String {
    let m = table.truths.len();
    let mut out = String::new();
    out.push_str("method,seed");
    for t in 1..=m {
        out.push_str(&format!(",err_{t}"));
    }
    out.push_str(",mean\n");
    for row in &table.rows {
        for (seed, report) in &row.per_seed {
            out.push_str(&row.method.label());
            out.push_str(&format!(",{seed}"));
            for d in &report.per_truth {
                match d {
                    Some(d) => out.push_str(&format!(",{}", sig9(*d))),
                    None => out.push(','),
                }
            }
            match report.mean() {
                Some(mean) => out.push_str(&format!(",{}\n", sig9(mean))),
                None => out.push_str(",\n"),
            }
        }
    }
    out
}

pub fn write_report(table: &ComparisonTable, path: &Path) -> Result<()> {
    atomic_write(path, render_report_csv(table).as_bytes())
}

/// Renders a P2 (plain text) PGM preview, min-max normalized to 8 bits.
/// The top pixel row corresponds to the shallowest grid row (largest `x2`).
pub fn render_pgm(map: &ImagingMap) -> String {
    let n1 = map.grid.n1();
    let n2 = map.grid.n2();
    let lo = map.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = map.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P2\n{n1} {n2}\n255\n");
    for i2 in (0..n2).rev() {
        let mut row = String::with_capacity(n1 * 4);
        for i1 in 0..n1 {
            let v = map.value_at(i1, i2);
            let level = if span > 0.0 {
                ((v - lo) / span * 255.0).round() as u32
            } else {
                0
            };
            if i1 > 0 {
                row.push(' ');
            }
            row.push_str(&level.min(255).to_string());
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn write_pgm(map: &ImagingMap, path: &Path) -> Result<()> {
    atomic_write(path, render_pgm(map).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::ImagingGrid;

    fn tiny_map() -> ImagingMap {
        let grid = ImagingGrid::new(0.0, 1.0, -1.0, 0.0, 0.5).unwrap();
        ImagingMap {
            grid,
            values: (0..9).map(|i| i as f64 * 0.125).collect(),
            method: MethodTag::Filter { f_count: 2 },
            frequencies: vec![1.0, 2.0],
            noise: Some(crate::imaging::NoiseProvenance {
                seed: 7,
                snr_db: 20.0,
            }),
        }
    }

    #[test]
    fn map_round_trips_at_nine_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.csv");
        let map = tiny_map();
        write_map(&map, "abc123", &path).unwrap();
        let (rows, meta) = read_map(&path).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(meta.scenario_hash, "abc123");
        assert_eq!(meta.seed, Some(7));
        assert_eq!(meta.grid.n1, 3);
        // row-major: x2 outer ascending, x1 inner ascending
        assert_eq!(rows[0].x1, 0.0);
        assert_eq!(rows[0].x2, -1.0);
        assert_eq!(rows[1].x1, 0.5);
        for (row, &v) in rows.iter().zip(map.values.iter()) {
            assert!((row.value - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
        // writing again produces identical bytes
        let first = fs::read(&path).unwrap();
        write_map(&map, "abc123", &path).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
    }

    #[test]
    fn map_csv_parser_rejects_junk() {
        assert!(parse_map_csv("nope\n1,2,3\n").is_err());
        assert!(parse_map_csv("x1,x2,value\n1,2\n").is_err());
        assert!(parse_map_csv("x1,x2,value\n1,2,3,4\n").is_err());
        assert!(parse_map_csv("x1,x2,value\n1,2,zebra\n").is_err());
        assert!(parse_map_csv("x1,x2,value\n").unwrap().is_empty());
    }

    #[test]
    fn matrix_csv_round_trip_is_exact() {
        let m = DMatrix::from_fn(3, 4, |j, l| {
            Complex64::new(
                (j as f64 + 1.0) * 0.1234567890123456,
                -(l as f64) * 9.876543210987e-5,
            )
        });
        let text = render_matrix_csv(&m);
        let back = parse_matrix_csv(&text, 3, 4).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_csv_parser_is_strict() {
        let good = "j,l,re,im\n1,1,0.0,0.0\n1,2,1.0,0.0\n";
        assert!(parse_matrix_csv(good, 1, 2).is_ok());
        // missing entry
        assert!(parse_matrix_csv("j,l,re,im\n1,1,0.0,0.0\n", 1, 2).is_err());
        // duplicate
        assert!(
            parse_matrix_csv("j,l,re,im\n1,1,0.0,0.0\n1,1,1.0,0.0\n", 1, 2).is_err()
        );
        // out of range
        assert!(parse_matrix_csv("j,l,re,im\n2,1,0.0,0.0\n1,1,0.0,0.0\n", 1, 2).is_err());
        // bad header
        assert!(parse_matrix_csv("j,l,re\n", 1, 1).is_err());
    }

    #[test]
    fn archive_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let arch = dir.path().join("arch");
        let mk = |omega: f64| MSRMatrix {
            data: DMatrix::from_fn(2, 3, |j, l| Complex64::new(omega * j as f64, l as f64)),
            omega,
            provenance: Provenance::Noiseless,
        };
        let matrices = vec![mk(1.0), mk(2.0)];
        write_archive(&arch, &matrices, "hash", Some(ArchiveNoise { seed: 3, snr_db: 10.0 }))
            .unwrap();
        let (back, manifest) = read_archive(&arch).unwrap();
        assert_eq!(manifest.entries.len(), 2);
        assert_eq!(manifest.noise.unwrap().seed, 3);
        for (a, b) in matrices.iter().zip(back.iter()) {
            assert_eq!(a.data, b.data);
            assert_eq!(a.omega, b.omega);
        }
        // overwrite keeps working (atomic rename path)
        write_archive(&arch, &matrices, "hash", None).unwrap();
        let (_, manifest2) = read_archive(&arch).unwrap();
        assert!(manifest2.noise.is_none());
    }

    #[test]
    fn missing_archive_is_not_found() {
        let err = read_archive(Path::new("/nonexistent/archive")).unwrap_err();
        match err {
            Error::Io(e) => assert_eq!(e.kind(), std::io::ErrorKind::NotFound),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn pgm_preview_shape() {
        let map = tiny_map();
        let pgm = render_pgm(&map);
        let mut lines = pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("3 3"));
        assert_eq!(lines.next(), Some("255"));
        // top row is the shallowest (largest x2, here the last value row)
        assert_eq!(lines.next(), Some("191 223 255"));
        assert_eq!(lines.clone().count(), 2);
        // constant map normalizes to zero
        let mut flat = tiny_map();
        flat.values = vec![1.0; 9];
        assert!(render_pgm(&flat).lines().skip(3).all(|l| l == "0 0 0"));
    }
}

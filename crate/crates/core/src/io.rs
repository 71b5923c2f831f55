//! File formats.
//!
//! * Samples: CSV with columns `omega_1[,omega_2],re,im` plus a JSON sidecar
//!   (same path, extension `.json`) holding the scheme metadata, weights and
//!   noise descriptor.
//! * Schemes: CSV with columns `omega_1[,omega_2],weight` plus the same kind of sidecar.
//! * Coefficients: raw little-endian `f64` pairs `(re, im)` in storage order
//!   (coarse block first, then detail bands of increasing scale; row-major in
//!   2D) plus a JSON header.
//! * Rasters: 16-bit binary PGM for 2D (the value range is kept in a
//!   `# range <min> <max>` comment) and CSV `x,re,im` for 1D.
//!
//! Numbers in text files are written in Rust's shortest round-trip form, so
//! every writer/reader pair is lossless except the 16-bit PGM quantisation.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{NoiseSpec, SampleSet};
use crate::sampling::{Region, SamplingScheme, SchemeKind};
use crate::wavelet::Layout;
use crate::C64;

pub const FORMAT_VERSION: u32 = 1;

fn fmt_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

/// Path of the JSON sidecar or header belonging to a data file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SchemeSidecar {
    version: u32,
    dim: usize,
    count: usize,
    kind: SchemeKind,
    region: Region,
    weight_step: Option<f64>,
    weights: Vec<f64>,
    noise: Option<NoiseSpec>,
    content_hash: String,
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn omega_headers(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("omega_{i}")).collect()
}

fn write_table(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(fmt_err)?;
    w.write_record(header).map_err(fmt_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(fmt_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table(path: &Path, header: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(fmt_err)?;
    let got: Vec<String> = r.headers().map_err(fmt_err)?.iter().map(str::to_string).collect();
    if got != header {
        return Err(Error::Format(format!("{}: expected columns {header:?}, found {got:?}", path.display())));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(fmt_err)?;
            rec.iter().map(|f| f.trim().parse::<f64>().map_err(fmt_err)).collect()
        })
        .collect()
}

fn sidecar(s: &SamplingScheme, noise: Option<NoiseSpec>) -> SchemeSidecar {
    SchemeSidecar {
        version: FORMAT_VERSION,
        dim: s.dim,
        count: s.len(),
        kind: s.kind.clone(),
        region: s.region.clone(),
        weight_step: s.weight_step,
        weights: s.weights.clone(),
        noise,
        content_hash: s.content_hash(),
    }
}

fn scheme_from(meta: SchemeSidecar, coords: Vec<Vec<f64>>) -> Result<SamplingScheme> {
    if meta.version != FORMAT_VERSION || coords.len() != meta.dim || meta.weights.len() != meta.count {
        return Err(Error::Format("scheme sidecar does not match data".into()));
    }
    let s = SamplingScheme {
        dim: meta.dim,
        coords,
        weights: meta.weights,
        region: meta.region,
        kind: meta.kind,
        weight_step: meta.weight_step,
    };
    if s.content_hash() != meta.content_hash {
        return Err(Error::Format("scheme content hash mismatch".into()));
    }
    Ok(s)
}

fn columns(rows: &[Vec<f64>], dim: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    if rows.len() != count {
        return Err(Error::ShapeMismatch { expected: count, got: rows.len() });
    }
    Ok((0..dim).map(|i| rows.iter().map(|r| r[i]).collect()).collect())
}

pub fn write_scheme(path: &Path, s: &SamplingScheme) -> Result<()> {
    let mut h = omega_headers(s.dim);
    h.push("weight".into());
    write_table(path, &h, (0..s.len()).map(|m| {
        let mut r = s.point(m);
        r.push(s.weights[m]);
        r
    }))?;
    write_json(&sidecar_path(path), &sidecar(s, None))
}

pub fn read_scheme(path: &Path) -> Result<SamplingScheme> {
    let meta: SchemeSidecar = read_json(&sidecar_path(path))?;
    let mut h = omega_headers(meta.dim);
    h.push("weight".into());
    let rows = read_table(path, &h)?;
    let coords = columns(&rows, meta.dim, meta.count)?;
    if rows.iter().zip(&meta.weights).any(|(r, w)| r[meta.dim] != *w) {
        return Err(Error::Format("weights in CSV and sidecar differ".into()));
    }
    scheme_from(meta, coords)
}

pub fn write_samples(path: &Path, set: &SampleSet) -> Result<()> {
    let s = &set.scheme;
    let mut h = omega_headers(s.dim);
    h.extend(["re".to_string(), "im".to_string()]);
    write_table(path, &h, (0..s.len()).map(|m| {
        let mut r = s.point(m);
        r.extend([set.values[m].re, set.values[m].im]);
        r
    }))?;
    write_json(&sidecar_path(path), &sidecar(s, set.noise))
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    let meta: SchemeSidecar = read_json(&sidecar_path(path))?;
    let dim = meta.dim;
    let mut h = omega_headers(dim);
    h.extend(["re".to_string(), "im".to_string()]);
    let rows = read_table(path, &h)?;
    let coords = columns(&rows, dim, meta.count)?;
    let values = rows.iter().map(|r| C64::new(r[dim], r[dim + 1])).collect();
    let noise = meta.noise;
    let mut set = SampleSet::new(scheme_from(meta, coords)?, values)?;
    set.noise = noise;
    Ok(set)
}

/// JSON header of a coefficient file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientHeader {
    pub version: u32,
    pub dim: usize,
    /// Coefficients per axis, `N = 2^R`.
    pub n: usize,
    /// Fine scale `R`.
    pub r: u32,
    /// Coarse scale `J`.
    pub j: u32,
    pub order: usize,
    pub layout: Layout,
    /// Always `"complex128-le"`: interleaved `re, im` little-endian `f64`.
    pub encoding: String,
}

pub const COEFFICIENT_ENCODING: &str = "complex128-le";

impl CoefficientHeader {
    pub fn new(dim: usize, order: usize, j: u32, r: u32, layout: Layout) -> Self {
        Self { version: FORMAT_VERSION, dim, n: 1 << r, r, j, order, layout, encoding: COEFFICIENT_ENCODING.into() }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn write_coefficients(path: &Path, header: &CoefficientHeader, values: &[C64]) -> Result<()> {
    if values.len() != header.len() {
        return Err(Error::ShapeMismatch { expected: header.len(), got: values.len() });
    }
    let mut buf = Vec::with_capacity(16 * values.len());
    for z in values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::write(path, buf)?;
    write_json(&sidecar_path(path), header)
}

pub fn read_coefficients(path: &Path) -> Result<(CoefficientHeader, Vec<C64>)> {
    let header: CoefficientHeader = read_json(&sidecar_path(path))?;
    if header.encoding != COEFFICIENT_ENCODING || header.n != 1usize << header.r {
        return Err(Error::Format(format!("unsupported coefficient header {header:?}")));
    }
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * header.len() {
        return Err(Error::ShapeMismatch { expected: 16 * header.len(), got: bytes.len() });
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
    let values = bytes.chunks_exact(16).map(|c| C64::new(f(&c[..8]), f(&c[8..]))).collect();
    Ok((header, values))
}

/// 1D raster `x = p/P` with complex values.
pub fn write_raster_1d(path: &Path, values: &[C64]) -> Result<()> {
    let p = values.len() as f64;
    let h = ["x".to_string(), "re".to_string(), "im".to_string()];
    write_table(path, &h, values.iter().enumerate().map(|(i, z)| vec![i as f64 / p, z.re, z.im]))
}

pub fn read_raster_1d(path: &Path) -> Result<Vec<C64>> {
    let h = ["x".to_string(), "re".to_string(), "im".to_string()];
    Ok(read_table(path, &h)?.into_iter().map(|r| C64::new(r[1], r[2])).collect())
}

/// A 2D raster as read back from a PGM file.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    /// Row-major, `height` rows of `width` values.
    pub values: Vec<f64>,
}

/// 16-bit PGM of a real image, row-major `height × width`, linearly mapped
/// from `[min, max]` to `[0, 65535]`.
pub fn write_pgm(path: &Path, values: &[f64], width: usize, height: usize) -> Result<()> {
    if values.len() != width * height {
        return Err(Error::ShapeMismatch { expected: width * height, got: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("raster values must be finite".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let mut out = fs::File::create(path)?;
    write!(out, "P5\n# range {min} {max}\n{width} {height}\n65535\n")?;
    let mut buf = Vec::with_capacity(2 * values.len());
    for v in values {
        let q = ((v - min) / span * 65535.0).round().clamp(0.0, 65535.0) as u16;
        buf.extend_from_slice(&q.to_be_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_pgm(path: &Path) -> Result<Raster> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut tokens = Vec::new();
    let (mut min, mut max) = (0.0, 0.0);
    let mut seen_range = false;
    while tokens.len() < 4 {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Format("truncated PGM header".into()));
        }
        if let Some(c) = line.trim().strip_prefix('#') {
            let f: Vec<&str> = c.split_whitespace().collect();
            if f.len() == 3 && f[0] == "range" {
                min = f[1].parse().map_err(fmt_err)?;
                max = f[2].parse().map_err(fmt_err)?;
                seen_range = true;
            }
            continue;
        }
        tokens.extend(line.split_whitespace().map(str::to_string));
    }
    if tokens[0] != "P5" || tokens[3] != "65535" {
        return Err(Error::Format("expected a 16-bit binary PGM".into()));
    }
    let width: usize = tokens[1].parse().map_err(fmt_err)?;
    let height: usize = tokens[2].parse().map_err(fmt_err)?;
    if !seen_range {
        max = 65535.0;
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 2 * width * height {
        return Err(Error::ShapeMismatch { expected: 2 * width * height, got: bytes.len() });
    }
    let span = if max > min { max - min } else { 1.0 };
    let values = bytes
        .chunks_exact(2)
        .map(|c| min + u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0 * span)
        .collect();
    Ok(Raster { width, height, min, max, values })
}

/// Summary CSV of an experiment: `method,order,N,M_or_K,snr,l2_error,seconds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub order: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M_or_K")]
    pub m_or_k: usize,
    pub snr: f64,
    pub l2_error: f64,
    pub seconds: f64,
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(fmt_err)?;
    for r in rows {
        w.serialize(r).map_err(fmt_err)?;
    }
    if rows.is_empty() {
        w.write_record(["method", "order", "N", "M_or_K", "snr", "l2_error", "seconds"]).map_err(fmt_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(fmt_err)?;
    r.deserialize().map(|row| row.map_err(fmt_err)).collect()
}

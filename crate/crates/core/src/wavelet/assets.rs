//! Versioned plain-text filter tables.
//!
//! ```text
//! # gensamp filter table
//! format 1
//! order <a>
//! sha256 <hex digest of everything after this line>
//! h <2a>
//! <one coefficient per line>
//! left.H <a> <a>
//! ...
//! ```

use sha2::{Digest, Sha256};

use super::cdv::{self, EdgeFilters};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

const DB1: &str = include_str!("../../assets/filters/db1.txt");
const DB2: &str = include_str!("../../assets/filters/db2.txt");
const DB3: &str = include_str!("../../assets/filters/db3.txt");
const DB4: &str = include_str!("../../assets/filters/db4.txt");

/// Raw table contents for a bundled order.
pub fn bundled(order: usize) -> Result<&'static str> {
    match order {
        1 => Ok(DB1),
        2 => Ok(DB2),
        3 => Ok(DB3),
        4 => Ok(DB4),
        _ => Err(Error::OrderNotBundled(order)),
    }
}

#[derive(Clone, Debug)]
pub struct FilterTable {
    pub order: usize,
    pub h: Vec<f64>,
    pub left: EdgeFilters<f64>,
    pub right: EdgeFilters<f64>,
}

fn section(out: &mut String, name: &str, dims: &[usize], v: &[f64]) {
    let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("{name} {}\n", dims.join(" ")));
    for x in v {
        out.push_str(&format!("{x:.16e}\n"));
    }
}

/// Build the edge filters for `h` and render the complete table.
pub fn render(h: &[f64]) -> Result<String> {
    let a = h.len() / 2;
    let mut body = String::new();
    section(&mut body, "h", &[2 * a], h);
    if a >= 2 {
        let l = cdv::left_edge(h)?;
        let r = cdv::right_edge(h)?;
        for (side, e) in [("left", &l), ("right", &r)] {
            section(&mut body, &format!("{side}.H"), &[a, a], &e.scaling_edge);
            section(&mut body, &format!("{side}.h0"), &[a, 2 * a - 1], &e.scaling_interior);
            section(&mut body, &format!("{side}.G"), &[a, a], &e.wavelet_edge);
            section(&mut body, &format!("{side}.g0"), &[a, 2 * a - 1], &e.wavelet_interior);
        }
    }
    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    Ok(format!("# gensamp filter table\nformat {FORMAT_VERSION}\norder {a}\nsha256 {digest}\n{body}"))
}

fn bad(order: usize, reason: impl Into<String>) -> Error {
    Error::FilterValidation { order, reason: reason.into() }
}

/// Parse a table and verify its checksum. Structural checks only; orthogonality
/// is verified by the caller.
pub fn parse(text: &str, expect_order: usize) -> Result<FilterTable> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let mut header = |key: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad(expect_order, "truncated header"))?;
        line.strip_prefix(key)
            .map(|s| s.trim().to_string())
            .ok_or_else(|| bad(expect_order, format!("expected '{key}', got '{line}'")))
    };
    let version: u32 = header("format ")?.parse().map_err(|_| bad(expect_order, "bad format version"))?;
    if version != FORMAT_VERSION {
        return Err(bad(expect_order, format!("unsupported format version {version}")));
    }
    let order: usize = header("order ")?.parse().map_err(|_| bad(expect_order, "bad order"))?;
    if order != expect_order {
        return Err(bad(expect_order, format!("table is for order {order}")));
    }
    let digest = header("sha256 ")?;
    let body_start = text.find("\nsha256 ").and_then(|p| text[p + 1..].find('\n').map(|q| p + 1 + q + 1));
    let body = &text[body_start.ok_or_else(|| bad(order, "missing body"))?..];
    let actual = hex::encode(Sha256::digest(body.as_bytes()));
    if actual != digest {
        return Err(bad(order, "checksum mismatch"));
    }

    let mut sections: Vec<(String, Vec<usize>, Vec<f64>)> = Vec::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or_default().to_string();
            let dims = parts
                .map(|p| p.parse::<usize>().map_err(|_| bad(order, format!("bad dimension in '{line}'"))))
                .collect::<Result<Vec<_>>>()?;
            sections.push((name, dims, Vec::new()));
        } else {
            let v: f64 = line.parse().map_err(|_| bad(order, format!("bad number '{line}'")))?;
            sections.last_mut().ok_or_else(|| bad(order, "value before section"))?.2.push(v);
        }
    }
    let mut take = |name: &str, dims: &[usize]| -> Result<Vec<f64>> {
        let i = sections
            .iter()
            .position(|s| s.0 == name)
            .ok_or_else(|| bad(order, format!("missing section {name}")))?;
        let (_, d, v) = sections.swap_remove(i);
        if d != dims || v.len() != dims.iter().product::<usize>() {
            return Err(bad(order, format!("section {name} has wrong shape")));
        }
        Ok(v)
    };
    let a = order;
    let h = take("h", &[2 * a])?;
    let (left, right) = if a >= 2 {
        let mut edge = |side: &str| -> Result<EdgeFilters<f64>> {
            Ok(EdgeFilters {
                scaling_edge: take(&format!("{side}.H"), &[a, a])?,
                scaling_interior: take(&format!("{side}.h0"), &[a, 2 * a - 1])?,
                wavelet_edge: take(&format!("{side}.G"), &[a, a])?,
                wavelet_interior: take(&format!("{side}.g0"), &[a, 2 * a - 1])?,
            })
        };
        (edge("left")?, edge("right")?)
    } else {
        (EdgeFilters::empty(), EdgeFilters::empty())
    };
    Ok(FilterTable { order, h, left, right })
}

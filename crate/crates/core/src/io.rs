//! File formats.
//!
//! Every file starts with provenance lines prefixed by `# `. Field snapshots
//! follow with a short text preamble and raw little-endian `f64` values in
//! row-major order:
//!
//! ```text
//! fracdrift-field 1
//! # provenance…
//! d 3
//! n 64
//! L 8
//! data
//! <n^d × 8 bytes>
//! ```

use std::io::Write;

use crate::error::{Error, Result};
use crate::evolve::NormSample;
use crate::fracops::{GridField, GridSpec};

const MAGIC: &str = "fracdrift-field 1";
const MAX_PREAMBLE: usize = 1 << 20;

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

pub fn write_provenance(w: &mut dyn Write, provenance: &[String]) -> Result<()> {
    for block in provenance {
        for line in block.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

pub fn encode_field_snapshot(field: &GridField, provenance: &[String]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(field.values.len() * 8 + 256);
    writeln!(out, "{MAGIC}")?;
    write_provenance(&mut out, provenance)?;
    let s = field.spec;
    writeln!(out, "d {}\nn {}\nL {:?}\ndata", s.d, s.n, s.half_width)?;
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses a snapshot, returning the field and its provenance lines.
pub fn decode_field_snapshot(bytes: &[u8]) -> Result<(GridField, Vec<String>)> {
    let mut pos = 0;
    let next_line = |pos: &mut usize| -> Result<&str> {
        let rest = &bytes[*pos..];
        let end = match rest.iter().take(MAX_PREAMBLE).position(|&b| b == b'\n') {
            Some(e) => e,
            None => return format_err("unterminated preamble line"),
        };
        let line = std::str::from_utf8(&rest[..end]).map_err(|_| Error::Format("preamble is not UTF-8".into()))?;
        *pos += end + 1;
        Ok(line)
    };
    if next_line(&mut pos)? != MAGIC {
        return format_err("missing snapshot signature");
    }
    let mut provenance = Vec::new();
    let (mut d, mut n, mut l) = (None, None, None);
    loop {
        if pos > MAX_PREAMBLE {
            return format_err("preamble too long");
        }
        let line = next_line(&mut pos)?;
        if let Some(c) = line.strip_prefix("# ") {
            provenance.push(c.to_string());
            continue;
        }
        if line == "data" {
            break;
        }
        let Some((key, value)) = line.split_once(' ') else {
            return format_err(format!("malformed preamble line {line:?}"));
        };
        let dup = match key {
            "d" => d.replace(value.parse::<usize>().map_err(|_| Error::Format(format!("bad d {value:?}")))?),
            "n" => n.replace(value.parse::<usize>().map_err(|_| Error::Format(format!("bad n {value:?}")))?),
            "L" => l
                .replace(value.parse::<f64>().map_err(|_| Error::Format(format!("bad L {value:?}")))?)
                .map(|_| 0),
            _ => return format_err(format!("unknown preamble key {key:?}")),
        };
        if dup.is_some() {
            return format_err(format!("duplicate preamble key {key:?}"));
        }
    }
    let (Some(d), Some(n), Some(l)) = (d, n, l) else {
        return format_err("preamble must define d, n and L");
    };
    if d == 0 || d > 8 {
        return format_err(format!("unsupported dimension {d}"));
    }
    let spec = GridSpec::new(d, n, l).map_err(|e| Error::Format(e.to_string()))?;
    let payload = &bytes[pos..];
    let expected = spec.len().checked_mul(8).ok_or_else(|| Error::Format("grid too large".into()))?;
    if payload.len() != expected {
        return format_err(format!("expected {expected} bytes of data, found {}", payload.len()));
    }
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok((GridField { spec, values }, provenance))
}

pub fn write_norm_series_csv(w: &mut dyn Write, series: &[NormSample], provenance: &[String]) -> Result<()> {
    write_provenance(w, provenance)?;
    writeln!(w, "t,L1,L2,Linf,gradL2")?;
    for s in series {
        writeln!(w, "{:?},{:?},{:?},{:?},{:?}", s.t, s.l1, s.l2, s.linf, s.grad_l2)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub r_mid: f64,
    pub density: f64,
    pub stderr: f64,
}

pub const PROFILE_HEADER: &str = "r_mid,density,stderr";

pub fn write_profile_csv(w: &mut dyn Write, rows: &[ProfileRow], provenance: &[String]) -> Result<()> {
    write_provenance(w, provenance)?;
    writeln!(w, "{PROFILE_HEADER}")?;
    for r in rows {
        writeln!(w, "{:?},{:?},{:?}", r.r_mid, r.density, r.stderr)?;
    }
    Ok(())
}

/// Parses a profile CSV, skipping provenance lines.
pub fn parse_profile_csv(text: &str) -> Result<Vec<ProfileRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == PROFILE_HEADER => {}
        Some(h) => return format_err(format!("unexpected header {h:?}")),
        None => return format_err("empty profile"),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return format_err(format!("row {} has {} columns", i + 1, cols.len()));
        }
        let mut v = [0.0f64; 3];
        for (slot, c) in v.iter_mut().zip(&cols) {
            *slot = c.parse().map_err(|_| Error::Format(format!("row {}: bad number {c:?}", i + 1)))?;
        }
        if !(v[0].is_finite() && v[0] >= 0.0) || !v[1].is_finite() || !(v[2].is_finite() && v[2] >= 0.0) {
            return format_err(format!("row {}: values out of range", i + 1));
        }
        if let Some(prev) = rows.last().map(|r: &ProfileRow| r.r_mid) {
            if v[0] <= prev {
                return format_err(format!("row {}: radii must increase", i + 1));
            }
        }
        rows.push(ProfileRow { r_mid: v[0], density: v[1], stderr: v[2] });
    }
    Ok(rows)
}

pub fn write_beta_curve_csv(w: &mut dyn Write, rows: &[(f64, f64, f64)], provenance: &[String]) -> Result<()> {
    write_provenance(w, provenance)?;
    writeln!(w, "kappa,beta,residual")?;
    for (k, b, r) in rows {
        writeln!(w, "{k:?},{b:?},{r:?}")?;
    }
    Ok(())
}

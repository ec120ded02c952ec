//! Plain-text sample file format.
//!
//! A sample file carries the magnitude data for one reconstruction:
//!
//! ```text
//! M=<M> s=<s>
//! -<M> <magnitude>
//! ...
//! <M> <magnitude>
//! ```
//!
//! one `k <space> magnitude` line per sample in ascending `k`, magnitudes
//! written with 17 significant digits so round trips are exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::pipeline::MagnitudeSamples;

pub fn write_sample_file(w: &mut impl Write, s: f64, mags: &MagnitudeSamples) -> Result<()> {
    let m = mags.m() as i64;
    writeln!(w, "M={} s={}", m, s)?;
    for k in -m..=m {
        writeln!(w, "{} {:.16e}", k, mags.value(k))?;
    }
    Ok(())
}

pub fn read_sample_file(r: impl BufRead) -> Result<(f64, MagnitudeSamples)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sample file".into()))??;
    let mut m = None;
    let mut s = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("M=") {
            m = Some(v.parse::<u32>().map_err(|e| Error::Parse(format!("bad M: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("s=") {
            s = Some(v.parse::<f64>().map_err(|e| Error::Parse(format!("bad s: {e}")))?);
        }
    }
    let m = m.ok_or_else(|| Error::Parse("header missing M=".into()))?;
    let s = s.ok_or_else(|| Error::Parse("header missing s=".into()))?;
    if !(s > 0.0) {
        return Err(Error::Parse(format!("sampling rate s = {s} must be positive")));
    }
    let mi = m as i64;
    let mut values = Vec::with_capacity((2 * mi + 1) as usize);
    let mut expected_k = -mi;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let k: i64 = parts
            .next()
            .ok_or_else(|| Error::Parse("missing sample index".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad sample index: {e}")))?;
        let v: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing magnitude on line for k = {k}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad magnitude: {e}")))?;
        if k != expected_k {
            return Err(Error::Parse(format!(
                "expected sample index {expected_k}, got {k}"
            )));
        }
        if !(v >= 0.0) {
            return Err(Error::Parse(format!("magnitude at k = {k} is negative")));
        }
        values.push(v);
        expected_k += 1;
    }
    if expected_k != mi + 1 {
        return Err(Error::Parse(format!(
            "expected {} samples, got {}",
            2 * mi + 1,
            values.len()
        )));
    }
    Ok((s, MagnitudeSamples::new(values)?))
}

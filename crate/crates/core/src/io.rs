//! File formats: observation CSV, estimate CSV, risk-curve CSV, plan and fit
//! JSON.
//!
//! All CSV files are comma-separated with '.' decimals, LF line endings, one
//! metadata comment line (`# key=value ...`) carrying the tool version, the
//! resolved-config hash, the seed, and the model dimensions, followed by a
//! column header row. Floats are written in shortest round-trip form, so a
//! rerun with the same seed is byte-identical.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::model::{ContinuousObservation, DiscreteObservation};
use crate::rng::RngSpec;
use crate::risk::RiskCurve;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run provenance stamped into every output file.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
}

fn meta_line(kind: &str, prov: &Provenance, extra: &[(&str, String)]) -> String {
    let mut line = format!(
        "# fundeconv v{TOOL_VERSION} kind={kind} seed={} config_sha256={}",
        prov.seed, prov.config_sha256
    );
    for (k, v) in extra {
        let _ = write!(line, " {k}={v}");
    }
    line.push('\n');
    line
}

fn parse_meta(line: &str) -> Result<HashMap<String, String>> {
    if !line.starts_with('#') {
        return Err(Error::Parameter(
            "missing metadata line (expected a leading '# key=value ...' row)".into(),
        ));
    }
    Ok(line
        .trim_start_matches('#')
        .split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

fn meta_get<T: std::str::FromStr>(meta: &HashMap<String, String>, key: &str) -> Result<T> {
    meta.get(key)
        .ok_or_else(|| Error::Parameter(format!("metadata is missing '{key}'")))?
        .parse::<T>()
        .map_err(|_| Error::Parameter(format!("metadata field '{key}' is malformed")))
}

/// Serializes a continuous observation as `(m, re, im)` rows.
pub fn write_continuous_observation(obs: &ContinuousObservation, prov: &Provenance) -> String {
    let mut out = meta_line(
        "continuous",
        prov,
        &[
            ("kernel", obs.kernel_name.clone()),
            ("n", format!("{}", obs.n)),
            ("mmax", format!("{}", obs.fhat.mmax())),
            ("stream", format!("{}", obs.seed.stream)),
        ],
    );
    out.push_str("m,re,im\n");
    for (m, c) in obs.fhat.iter() {
        let _ = writeln!(out, "{m},{},{}", c.re, c.im);
    }
    out
}

pub fn read_continuous_observation(text: &str) -> Result<ContinuousObservation> {
    let mut lines = text.lines();
    let meta = parse_meta(lines.next().unwrap_or(""))?;
    let n: f64 = meta_get(&meta, "n")?;
    let mmax: i64 = meta_get(&meta, "mmax")?;
    let header = lines.next().unwrap_or("");
    if header != "m,re,im" {
        return Err(Error::Parameter(format!(
            "expected header 'm,re,im', got '{header}'"
        )));
    }
    let mut fhat = FourierSeries::zeros(mmax);
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parameter(format!(
                "line {}: expected 3 columns, got {}",
                idx + 3,
                cols.len()
            )));
        }
        let m: i64 = cols[0]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad m '{}'", idx + 3, cols[0])))?;
        let re: f64 = cols[1]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad re", idx + 3)))?;
        let im: f64 = cols[2]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad im", idx + 3)))?;
        fhat.set(m, Complex64::new(re, im));
    }
    Ok(ContinuousObservation {
        fhat,
        n,
        kernel_name: meta.get("kernel").cloned().unwrap_or_default(),
        seed: RngSpec::new(meta_get(&meta, "seed")?, meta_get(&meta, "stream").unwrap_or(0)),
    })
}

/// Serializes a discrete observation as `(l, i, u_l, t_i, y)` rows.
pub fn write_discrete_observation(obs: &DiscreteObservation, prov: &Provenance) -> String {
    let n_grid = obs.grid_len();
    let mut out = meta_line(
        "discrete",
        prov,
        &[
            ("kernel", obs.kernel_name.clone()),
            ("N", format!("{n_grid}")),
            ("M", format!("{}", obs.channels())),
            ("n", format!("{}", obs.n())),
            ("stream", format!("{}", obs.seed.stream)),
        ],
    );
    out.push_str("l,i,u_l,t_i,y\n");
    for (l, row) in obs.samples.iter().enumerate() {
        let u = obs.points[l];
        for (i, &y) in row.iter().enumerate() {
            let t = i as f64 / n_grid as f64;
            let _ = writeln!(out, "{},{i},{u},{t},{y}", l + 1);
        }
    }
    out
}

pub fn read_discrete_observation(text: &str) -> Result<DiscreteObservation> {
    let mut lines = text.lines();
    let meta = parse_meta(lines.next().unwrap_or(""))?;
    let n_grid: usize = meta_get(&meta, "N")?;
    let channels: usize = meta_get(&meta, "M")?;
    let header = lines.next().unwrap_or("");
    if header != "l,i,u_l,t_i,y" {
        return Err(Error::Parameter(format!(
            "expected header 'l,i,u_l,t_i,y', got '{header}'"
        )));
    }
    let mut samples = vec![vec![0.0f64; n_grid]; channels];
    let mut points = vec![f64::NAN; channels];
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parameter(format!(
                "line {}: expected 5 columns, got {}",
                idx + 3,
                cols.len()
            )));
        }
        let l: usize = cols[0]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad l", idx + 3)))?;
        let i: usize = cols[1]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad i", idx + 3)))?;
        if l < 1 || l > channels || i >= n_grid {
            return Err(Error::Parameter(format!(
                "line {}: index (l={l}, i={i}) outside the declared {channels}x{n_grid} grid",
                idx + 3
            )));
        }
        points[l - 1] = cols[2]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad u_l", idx + 3)))?;
        samples[l - 1][i] = cols[4]
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: bad y", idx + 3)))?;
    }
    Ok(DiscreteObservation {
        samples,
        points,
        kernel_name: meta.get("kernel").cloned().unwrap_or_default(),
        seed: RngSpec::new(meta_get(&meta, "seed")?, meta_get(&meta, "stream").unwrap_or(0)),
    })
}

/// Detects the observation kind from the metadata line.
pub fn observation_kind(text: &str) -> Result<String> {
    let meta = parse_meta(text.lines().next().unwrap_or(""))?;
    meta.get("kind")
        .cloned()
        .ok_or_else(|| Error::Parameter("metadata is missing 'kind'".into()))
}

/// Serializes a Fourier series as `(m, re, im)` rows.
pub fn write_series(series: &FourierSeries, kind: &str, prov: &Provenance) -> String {
    let mut out = meta_line(kind, prov, &[("mmax", format!("{}", series.mmax()))]);
    out.push_str("m,re,im\n");
    for (m, c) in series.iter() {
        let _ = writeln!(out, "{m},{},{}", c.re, c.im);
    }
    out
}

/// Serializes a grid evaluation as `(t, value)` rows.
pub fn write_grid(values: &[f64], prov: &Provenance) -> String {
    let mut out = meta_line("grid", prov, &[("points", format!("{}", values.len()))]);
    out.push_str("t,value\n");
    let n = values.len();
    for (i, &v) in values.iter().enumerate() {
        let t = i as f64 / n as f64;
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

/// Serializes a risk curve with per-point plan metadata.
pub fn write_risk_curve(curve: &RiskCurve, prov: &Provenance) -> String {
    let mut out = meta_line("risk_curve", prov, &[("points", format!("{}", curve.points.len()))]);
    out.push_str("n,mean_risk,se,replicates,j0,J,degenerate_flag\n");
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.n,
            p.mean_risk,
            p.se,
            p.replicates,
            p.j0,
            p.j_upper,
            u8::from(p.degenerate)
        );
    }
    out
}

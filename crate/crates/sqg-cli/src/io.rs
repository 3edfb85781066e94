//! Output formats: per-node CSV time series, exact-round-trip
//! spectrum snapshots, check-result records and the run manifest.
//! All numbers are printed with 17 significant digits so binary64
//! values survive a round trip, and all iteration orders are fixed,
//! making every file byte-deterministic given the run seed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use sqg_core::{SpectralField, Trajectory, Wave};

use crate::config::fmt_f64;

pub fn write_timeseries(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut out = String::from("t,x0,x1,l2,gevrey_half,dropped_mass\n");
    for j in 0..traj.node_count() {
        let d = &traj.diagnostics[j];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(traj.grid.node(j)),
            fmt_f64(d.x0),
            fmt_f64(d.x1),
            fmt_f64(d.l2),
            fmt_f64(d.gevrey_half),
            fmt_f64(traj.dropped_mass[j]),
        );
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Snapshot of one field: canonical half-lattice modes only, sorted;
/// the mirrors are implied by conjugation.
pub fn write_spectrum(field: &SpectralField, t: f64, path: &Path) -> Result<()> {
    let mut out = format!("# N={} t={}\n", field.radius(), fmt_f64(t));
    out.push_str("k1,k2,re,im\n");
    for (k, c) in field.canonical_modes() {
        let _ = writeln!(out, "{},{},{},{}", k.0, k.1, fmt_f64(c.re), fmt_f64(c.im));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_spectrum(path: &Path) -> Result<(SpectralField, f64)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty spectrum file")?;
    let rest = header
        .strip_prefix("# N=")
        .context("malformed spectrum header")?;
    let (n_str, t_str) = rest.split_once(" t=").context("malformed spectrum header")?;
    let n: u32 = n_str.parse().context("bad N in spectrum header")?;
    let t: f64 = t_str.parse().context("bad t in spectrum header")?;
    let columns = lines.next().context("missing column line")?;
    if columns != "k1,k2,re,im" {
        bail!("unexpected spectrum columns `{columns}`");
    }
    let mut entries = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            bail!("malformed spectrum line `{line}`");
        }
        let k = Wave(parts[0].parse()?, parts[1].parse()?);
        let c = Complex64::new(parts[2].parse()?, parts[3].parse()?);
        entries.push((k, c));
    }
    let field = SpectralField::from_modes(n, &entries)
        .map_err(|e| anyhow::anyhow!("invalid spectrum: {e}"))?;
    Ok((field, t))
}

/// One `check_name,pass|fail,measured,bound,slack` record per check
/// instance.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, pass: bool, measured: f64, bound: f64) -> Self {
        CheckRecord {
            name: name.into(),
            pass,
            measured,
            bound,
        }
    }
}

pub fn write_results(records: &[CheckRecord], path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            if r.pass { "pass" } else { "fail" },
            fmt_f64(r.measured),
            fmt_f64(r.bound),
            fmt_f64(r.bound - r.measured),
        );
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Flat `key = value` manifest. The wall-clock line is the only
/// nondeterministic one; determinism comparisons skip it.
pub fn write_manifest(
    echo: &[(&'static str, String)],
    extra: &[(String, String)],
    wall_clock_seconds: f64,
    path: &Path,
) -> Result<()> {
    let mut out = String::from("format_version = 1\n");
    let _ = writeln!(out, "code_version = {}", env!("CARGO_PKG_VERSION"));
    for (k, v) in echo {
        let _ = writeln!(out, "{k} = {v}");
    }
    for (k, v) in extra {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "wall_clock_seconds = {}", fmt_f64(wall_clock_seconds));
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqg_core::solver::{initial_data, InitRecipe};

    #[test]
    fn spectrum_roundtrip_exact() {
        let field = initial_data(
            6,
            &InitRecipe {
                rho0: 0.37,
                slope: 2.0,
                seed: 99,
            },
        );
        let dir = std::env::temp_dir().join("sqg_io_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("spec.csv");
        write_spectrum(&field, 1.5, &path).unwrap();
        let (back, t) = read_spectrum(&path).unwrap();
        assert_eq!(t, 1.5);
        assert_eq!(back, field);
        // zero field: header only
        let zp = dir.join("zero.csv");
        write_spectrum(&SpectralField::zero(4), 0.0, &zp).unwrap();
        let text = fs::read_to_string(&zp).unwrap();
        assert_eq!(text.lines().count(), 2);
        let (zback, _) = read_spectrum(&zp).unwrap();
        assert_eq!(zback.mode_count(), 0);
    }

    #[test]
    fn timeseries_row_count() {
        let theta0 = SpectralField::zero(4);
        let traj = sqg_core::solver::linear_trajectory(
            &theta0,
            sqg_core::solver::TimeGrid { dt: 0.5, steps: 2 },
            1.0,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("sqg_io_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ts.csv");
        write_timeseries(&traj, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4); // header + J+1 nodes
        for row in &rows[1..] {
            // zero trajectory: all-zero diagnostics after the t column
            let cols: Vec<&str> = row.split(',').collect();
            for v in &cols[1..] {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0);
            }
        }
    }
}

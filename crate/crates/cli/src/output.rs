//! Output plumbing: CSV writers (header row, comma separators, `.` decimals,
//! RFC-4180 quoting via the csv crate, a schema-version column first), the
//! matching file format, and grid parsing for sweep arguments.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use stablematch::model::{Matching, PersonId};

use crate::sweep::{Cell, CellRow, DecayRow, RunRow};

/// Stamped into the first column of every CSV this tool writes.
pub const SCHEMA_VERSION: &str = "1";

fn fmt_opt(p: Option<f64>) -> String {
    p.map(|v| format!("{v}")).unwrap_or_default()
}

fn cell_fields(cell: &Cell) -> [String; 3] {
    [cell.n.to_string(), fmt_opt(cell.p1), fmt_opt(cell.p2)]
}

pub fn write_runs_csv(path: &Path, variant: &str, rows: &[RunRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "schema_version",
        "variant",
        "n",
        "p1",
        "p2",
        "instance",
        "run",
        "seed",
        "found_stable",
        "found_perfect",
        "steps",
        "restarts",
        "best_size",
        "best_singles",
        "best_nbp",
        "best_ns",
        "best_f",
        "wall_ms",
    ])?;
    for r in rows {
        let [n, p1, p2] = cell_fields(&r.cell);
        w.write_record([
            SCHEMA_VERSION.to_string(),
            variant.to_string(),
            n,
            p1,
            p2,
            r.instance_idx.to_string(),
            r.run_idx.to_string(),
            r.seed.to_string(),
            r.found_stable.to_string(),
            r.found_perfect.to_string(),
            r.steps.to_string(),
            r.restarts.to_string(),
            r.best_size.to_string(),
            r.best_singles.to_string(),
            r.best_nbp.to_string(),
            r.best_ns.to_string(),
            r.best_f.to_string(),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cells_csv(path: &Path, variant: &str, rows: &[CellRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "schema_version",
        "variant",
        "n",
        "p1",
        "p2",
        "instances",
        "runs",
        "mean_size",
        "mean_singles",
        "pct_perfect",
        "pct_stable",
        "mean_steps",
        "median_steps",
        "mean_wall_ms",
        "error",
    ])?;
    for r in rows {
        let [n, p1, p2] = cell_fields(&r.cell);
        w.write_record([
            SCHEMA_VERSION.to_string(),
            variant.to_string(),
            n,
            p1,
            p2,
            r.instances.to_string(),
            r.runs.to_string(),
            format!("{:.6}", r.mean_size),
            format!("{:.6}", r.mean_singles),
            format!("{:.6}", r.pct_perfect),
            format!("{:.6}", r.pct_stable),
            format!("{:.6}", r.mean_steps),
            format!("{:.6}", r.median_steps),
            format!("{:.3}", r.mean_wall_ms),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_decay_csv(path: &Path, rows: &[DecayRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["schema_version", "n", "t", "mean_nbp", "mean_nbp_over_n"])?;
    for r in rows {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.n.to_string(),
            r.t.to_string(),
            format!("{:.6}", r.mean_nbp),
            format!("{:.8}", r.mean_nbp / r.n as f64),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_medians_csv(path: &Path, rows: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["schema_version", "n", "median_steps"])?;
    for &(n, m) in rows {
        w.write_record([SCHEMA_VERSION.to_string(), n.to_string(), format!("{m}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `(n, t, mean_nbp)` rows from a decay CSV.
pub fn read_decay_csv(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing column '{name}' in {}", path.display()))
    };
    let (cn, ct, cy) = (col("n")?, col("t")?, col("mean_nbp")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push((rec[cn].parse()?, rec[ct].parse()?, rec[cy].parse()?));
    }
    Ok(out)
}

/// Reads `(n, median_steps)` rows from a medians CSV.
pub fn read_medians_csv(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing column '{name}' in {}", path.display()))
    };
    let (cn, cm) = (col("n")?, col("median_steps")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push((rec[cn].parse()?, rec[cm].parse()?));
    }
    Ok(out)
}

/// Parses the matching file format: one `m: w` line per pair, `m: -` for a
/// single man; `#` comments and blank lines ignored.
pub fn parse_matching_file(text: &str, n: usize) -> Result<Matching> {
    let mut wives: Vec<Option<PersonId>> = vec![None; n];
    let mut seen = vec![false; n + 1];
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (m, w) = line
            .split_once(':')
            .with_context(|| format!("line {}: expected 'm: w' or 'm: -'", no + 1))?;
        let m: PersonId = m
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad man id", no + 1))?;
        if m < 1 || m > n {
            bail!("line {}: man {m} out of range 1..={n}", no + 1);
        }
        if seen[m] {
            bail!("line {}: man {m} listed twice", no + 1);
        }
        seen[m] = true;
        let w = w.trim();
        if w != "-" {
            let w: PersonId = w
                .parse()
                .with_context(|| format!("line {}: bad woman id", no + 1))?;
            if w < 1 || w > n {
                bail!("line {}: woman {w} out of range 1..={n}", no + 1);
            }
            wives[m - 1] = Some(w);
        }
    }
    Matching::from_wives(n, &wives).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Canonical matching file text.
pub fn serialize_matching(matching: &Matching) -> String {
    let mut out = String::new();
    for m in 1..=matching.n() {
        match matching.wife_of(m) {
            Some(w) => out.push_str(&format!("{m}: {w}\n")),
            None => out.push_str(&format!("{m}: -\n")),
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Parses `a,b,c` lists or `start:end:step` ranges of probabilities.
/// Range endpoints and steps are carried in micro-units so grids like
/// `0:1:0.1` land exactly on one decimal. An empty string is an empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("range must be start:end:step, got '{text}'");
        }
        let to_micro = |s: &str| -> Result<i64> {
            let v: f64 = s.parse().with_context(|| format!("bad number '{s}'"))?;
            Ok((v * 1e6).round() as i64)
        };
        let (start, end, step) = (to_micro(parts[0])?, to_micro(parts[1])?, to_micro(parts[2])?);
        if step <= 0 {
            bail!("range step must be positive");
        }
        let mut out = Vec::new();
        let mut v = start;
        while v <= end {
            out.push(v as f64 / 1e6);
            v += step;
        }
        if out.is_empty() {
            bail!("empty range '{text}'");
        }
        Ok(out)
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number '{s}'"))
            })
            .collect()
    }
}

/// Parses `a,b,c` lists of sizes; an empty string is an empty list.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad size '{s}'"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1,0.5,0.8").unwrap(), vec![0.1, 0.5, 0.8]);
        let g = parse_grid("0.0:1.0:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(parse_grid("0.5:0.1:0.1").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_sizes(" ").unwrap().is_empty());
    }

    #[test]
    fn matching_file_round_trip() {
        let m = Matching::from_wives(3, &[Some(2), None, Some(1)]).unwrap();
        let text = serialize_matching(&m);
        assert_eq!(text, "1: 2\n2: -\n3: 1\n");
        assert_eq!(parse_matching_file(&text, 3).unwrap(), m);
        assert!(parse_matching_file("1: 9\n", 3).is_err());
        assert!(parse_matching_file("1: 1\n1: 2\n", 3).is_err());
    }
}

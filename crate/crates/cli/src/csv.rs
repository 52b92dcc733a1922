//! Trajectory CSV files: `t,x_1,...,x_n,residual_norm`, one row per recorded
//! state, every float printed with 17 significant digits.

use std::path::Path;

use anyhow::{bail, Context, Result};
use socave::integrator::Trajectory;

/// Parsed contents of a trajectory file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("x_{i}")))
        .chain(std::iter::once("residual_norm".to_string()));
    w.write_record(header).expect("writing to memory");
    for ((t, x), r) in traj.times.iter().zip(&traj.states).zip(&traj.residual_norms) {
        let row = std::iter::once(fmt(*t)).chain(x.iter().map(|v| fmt(*v))).chain(std::iter::once(fmt(*r)));
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn write(path: &Path, traj: &Trajectory) -> Result<()> {
    std::fs::write(path, render(traj)).with_context(|| format!("writing {}", path.display()))
}

pub fn parse(text: &str) -> Result<TrajectoryTable> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().context("reading header")?.clone();
    let n = header.len().saturating_sub(2);
    if header.len() < 2 || &header[0] != "t" || &header[header.len() - 1] != "residual_norm" {
        bail!("unexpected trajectory header");
    }
    let mut table = TrajectoryTable { times: Vec::new(), states: Vec::new(), residual_norms: Vec::new() };
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("row {}", i + 1))?;
        let values = record
            .iter()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("row {}", i + 1))?;
        table.times.push(values[0]);
        table.states.push(values[1..=n].to_vec());
        table.residual_norms.push(values[n + 1]);
    }
    Ok(table)
}

pub fn read(path: &Path) -> Result<TrajectoryTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text)
}

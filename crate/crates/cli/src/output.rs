//! File writers. CSV floats use 17 significant digits; JSON floats use the
//! shortest representation that parses back to the same value.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sympoctl_core::landscape::{propagator_entries, FlowPoint};
use sympoctl_core::optimizer::{ControlField, IterationRecord};
use sympoctl_core::symplectic::Propagator;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["iteration", "J", "grad_norm", "step", "fluence"])?;
    for r in records {
        w.write_record([r.iteration.to_string(), float(r.value), float(r.gradient_norm), float(r.step), float(r.fluence)])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per control, one column per time point.
pub fn write_field(path: &Path, field: &ControlField<f64>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["control".to_string()];
    header.extend((0..field.n_steps()).map(|k| float(field.time(k))));
    w.write_record(&header)?;
    for (i, row) in field.amplitudes().row_iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|&x| float(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_flow(path: &Path, points: &[FlowPoint<f64>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["s", "J"])?;
    for p in points {
        w.write_record([float(p.s), float(p.value)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PropagatorFile<'a> {
    flavor: &'a str,
    dim: usize,
    matrix: Vec<Vec<sympoctl_core::landscape::MatrixEntry>>,
}

pub fn write_propagator(path: &Path, p: Option<&Propagator<f64>>) -> Result<()> {
    match p {
        None => write_json(path, &serde_json::Value::Null),
        Some(p) => {
            let (flavor, dim) = match p {
                Propagator::Symplectic(s) => ("symplectic", s.dim()),
                Propagator::Unitary(u) => ("unitary", u.dim()),
            };
            write_json(path, &PropagatorFile { flavor, dim, matrix: propagator_entries(p) })
        }
    }
}

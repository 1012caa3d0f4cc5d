//! CSV tables. Floats use 17 significant digits so parsing gives back the
//! identical bits.

use std::path::Path;

use thiserror::Error;

use super::{PointFlags, SweepRecord};
use crate::lobes::LobeDiagram;
use crate::spectrum::SpectrumRow;

pub const PHASE_COLUMNS: [&str; 9] = [
    "j_over_lambda",
    "mu_minus_omega_over_lambda",
    "anh",
    "delta",
    "psi_min",
    "rho",
    "energy",
    "n_max_used",
    "flags",
];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("header does not match the phase table columns")]
    Header,
    #[error("row {row}: bad value `{value}` in column `{column}`")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_string(mut w: csv::Writer<Vec<u8>>) -> String {
    w.flush().expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("CSV is UTF-8")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn phase_csv(records: &[SweepRecord]) -> String {
    let mut w = writer();
    w.write_record(PHASE_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            float(r.j_over_lambda),
            float(r.mu_minus_omega_over_lambda),
            float(r.anh),
            float(r.delta),
            float(r.psi_min),
            float(r.rho),
            float(r.energy),
            r.n_max_used.to_string(),
            r.flags.names().join("|"),
        ])
        .expect("in-memory write");
    }
    to_string(w)
}

pub fn write_phase_csv(records: &[SweepRecord], path: &Path) -> Result<(), TableError> {
    std::fs::write(path, phase_csv(records))?;
    Ok(())
}

/// Inverse of [`phase_csv`].
pub fn parse_phase_csv(text: &str) -> Result<Vec<SweepRecord>, TableError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    if rdr.headers()?.iter().ne(PHASE_COLUMNS) {
        return Err(TableError::Header);
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |i: usize| TableError::Field {
            row,
            column: PHASE_COLUMNS[i],
            value: rec.get(i).unwrap_or("").to_string(),
        };
        let f = |i: usize| -> Result<f64, TableError> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad(i))
        };
        let n_max_used = rec
            .get(7)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(7))?;
        let mut flags = PointFlags::default();
        let raw = rec.get(8).ok_or_else(|| bad(8))?;
        for name in raw.split('|').filter(|s| !s.is_empty()) {
            if !flags.set(name) {
                return Err(bad(8));
            }
        }
        out.push(SweepRecord {
            j_over_lambda: f(0)?,
            mu_minus_omega_over_lambda: f(1)?,
            anh: f(2)?,
            delta: f(3)?,
            psi_min: f(4)?,
            rho: f(5)?,
            energy: f(6)?,
            n_max_used,
            flags,
        });
    }
    Ok(out)
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut w = writer();
    w.write_record(["delta", "anh", "n_excitations", "branch", "eigenvalue"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            float(r.delta),
            float(r.anh),
            r.n_excitations.to_string(),
            r.branch.symbol().to_string(),
            float(r.eigenvalue),
        ])
        .expect("in-memory write");
    }
    to_string(w)
}

/// Boundary, lobe-width and crossing tables, in that order.
pub fn lobe_tables_csv(diagrams: &[(f64, LobeDiagram)]) -> (String, String, String) {
    let mut b = writer();
    let mut wd = writer();
    let mut c = writer();
    b.write_record(["delta", "anh", "n_from", "n_to", "mu_boundary"])
        .expect("in-memory write");
    wd.write_record(["delta", "anh", "n", "width", "covered"])
        .expect("in-memory write");
    c.write_record(["delta", "n", "anh", "mu"])
        .expect("in-memory write");
    for (delta, d) in diagrams {
        for row in &d.boundaries {
            for x in row {
                b.write_record([
                    float(*delta),
                    float(x.anh),
                    x.n_from.to_string(),
                    x.n_to.to_string(),
                    float(x.mu_boundary),
                ])
                .expect("in-memory write");
            }
        }
        for (anh, row) in d.anh_axis.iter().zip(&d.widths) {
            for x in row {
                wd.write_record([
                    float(*delta),
                    float(*anh),
                    x.n.to_string(),
                    float(x.width),
                    x.covered.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        for x in &d.crossings {
            c.write_record([float(*delta), x.n.to_string(), float(x.anh), float(x.mu)])
                .expect("in-memory write");
        }
    }
    (to_string(b), to_string(wd), to_string(c))
}

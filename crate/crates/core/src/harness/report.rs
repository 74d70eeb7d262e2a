//! CSV export. Reals are written in scientific notation with 17 significant
//! digits so files reproduce the computed values bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::audit::AuditReport;
use super::run::{ComparisonReport, ConvergenceRow, ErrorReport};

pub const SOLUTION_HEADER: [&str; 6] = ["m", "x", "t", "u_numeric", "u_exact", "abs_error"];
pub const MESH_HEADER: [&str; 4] = ["n", "m", "x", "t"];
pub const SUMMARY_HEADER: [&str; 8] = ["model", "scheme", "h", "k", "t_final", "max_abs_error", "l2_error", "steps"];
pub const AUDIT_HEADER: [&str; 6] = ["model", "scheme", "subgroup", "samples", "max_discrepancy", "pass"];
pub const WITNESS_HEADER: [&str; 11] = ["model", "scheme", "subgroup", "params", "h", "k", "m", "n", "x", "t", "u"];
pub const INCOMPATIBILITY_HEADER: [&str; 6] =
    ["h", "k", "restriction_violation", "spacing_drift", "alternate_form_violation", "contradiction"];
pub const CONVERGENCE_HEADER: [&str; 5] = ["h", "k", "max_abs_error", "l2_error", "order"];

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
        let mut t = Self { path, writer: csv::Writer::from_writer(file) };
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<()> {
        let fields: Vec<String> = fields.into_iter().collect();
        self.writer.write_record(&fields).map_err(|e| self.io(e))
    }

    fn io(&self, e: csv::Error) -> Error {
        let source = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        Error::Io { path: self.path.clone(), source }
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush().map_err(|source| Error::Io { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

fn write_solution(dir: &Path, name: &str, r: &ErrorReport) -> Result<PathBuf> {
    let mut t = Table::create(dir, name, &SOLUTION_HEADER)?;
    for e in &r.records {
        t.row([e.m.to_string(), fmt_real(e.x), fmt_real(e.t), fmt_real(e.u_numeric), fmt_real(e.u_exact), fmt_real(e.abs_error)])?;
    }
    t.finish()
}

fn write_mesh(dir: &Path, name: &str, r: &ErrorReport) -> Result<PathBuf> {
    let mut t = Table::create(dir, name, &MESH_HEADER)?;
    for p in &r.mesh {
        t.row([p.n.to_string(), p.m.to_string(), fmt_real(p.x), fmt_real(p.t)])?;
    }
    t.finish()
}

fn write_summary<'a>(dir: &Path, reports: impl IntoIterator<Item = &'a ErrorReport>) -> Result<PathBuf> {
    let mut t = Table::create(dir, "summary.csv", &SUMMARY_HEADER)?;
    for r in reports {
        t.row([
            r.model.to_string(),
            r.scheme.to_string(),
            fmt_real(r.h),
            fmt_real(r.k),
            fmt_real(r.t_final),
            fmt_real(r.max_abs_error),
            fmt_real(r.l2_error),
            r.steps.to_string(),
        ])?;
    }
    t.finish()
}

/// Writes `solution.csv`, `mesh.csv` and `summary.csv` for a single run.
pub fn emit_reports(report: &ErrorReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    Ok(vec![
        write_solution(out_dir, "solution.csv", report)?,
        write_mesh(out_dir, "mesh.csv", report)?,
        write_summary(out_dir, [report])?,
    ])
}

/// Writes `solution_<scheme>.csv` and `mesh_<scheme>.csv` per scheme and a
/// shared `summary.csv`.
pub fn emit_comparison(cmp: &ComparisonReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut paths = Vec::new();
    for r in &cmp.reports {
        paths.push(write_solution(out_dir, &format!("solution_{}.csv", r.scheme), r)?);
        paths.push(write_mesh(out_dir, &format!("mesh_{}.csv", r.scheme), r)?);
    }
    paths.push(write_summary(out_dir, &cmp.reports)?);
    Ok(paths)
}

/// Writes `audit.csv`, the witnesses of every row with a nonzero
/// discrepancy, and for the heat model the incompatibility witness.
pub fn emit_audit(audit: &AuditReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut t = Table::create(out_dir, "audit.csv", &AUDIT_HEADER)?;
    for r in &audit.rows {
        t.row([
            r.model.to_string(),
            r.scheme.to_string(),
            r.subgroup.clone(),
            r.samples.to_string(),
            fmt_real(r.max_discrepancy),
            r.pass.to_string(),
        ])?;
    }
    let mut paths = vec![t.finish()?];

    let mut w = Table::create(out_dir, "audit_witnesses.csv", &WITNESS_HEADER)?;
    for r in audit.rows.iter().filter(|r| r.max_discrepancy > 0.0) {
        let Some(wit) = &r.witness else { continue };
        let params = wit.params.iter().map(|&p| fmt_real(p)).collect::<Vec<_>>().join(";");
        for (o, p) in wit.sample.stencil.entries() {
            w.row([
                r.model.to_string(),
                r.scheme.to_string(),
                r.subgroup.clone(),
                params.clone(),
                fmt_real(wit.sample.steps.h),
                fmt_real(wit.sample.steps.k),
                o.m.to_string(),
                o.n.to_string(),
                fmt_real(p.x),
                fmt_real(p.t),
                fmt_real(p.u),
            ])?;
        }
    }
    paths.push(w.finish()?);

    if let Some(inc) = &audit.incompatibility {
        let mut t = Table::create(out_dir, "incompatibility.csv", &INCOMPATIBILITY_HEADER)?;
        t.row([
            fmt_real(inc.h),
            fmt_real(inc.k),
            fmt_real(inc.restriction_violation),
            fmt_real(inc.spacing_drift),
            fmt_real(inc.alternate_form_violation),
            inc.contradicts().to_string(),
        ])?;
        paths.push(t.finish()?);
    }
    Ok(paths)
}

/// Writes `convergence.csv`; the order column is empty on the first row.
pub fn emit_convergence(rows: &[ConvergenceRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut t = Table::create(out_dir, "convergence.csv", &CONVERGENCE_HEADER)?;
    for r in rows {
        t.row([
            fmt_real(r.h),
            fmt_real(r.k),
            fmt_real(r.max_error),
            fmt_real(r.l2_error),
            r.order.map(fmt_real).unwrap_or_default(),
        ])?;
    }
    Ok(vec![t.finish()?])
}

//! Running experiments and measuring their errors.

use std::thread;

use crate::error::{Error, Result};
use crate::schemes::{evolve_with, Model, SchemeKind};
use crate::solutions::initial_level;

use super::config::ExperimentConfig;

/// Error at one node of the final level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeError {
    pub m: usize,
    pub x: f64,
    pub t: f64,
    pub u_numeric: f64,
    pub u_exact: f64,
    pub abs_error: f64,
}

/// Position of one node at one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshPoint {
    pub n: i64,
    pub m: usize,
    pub x: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub model: Model,
    pub scheme: SchemeKind,
    pub h: f64,
    pub k: f64,
    pub t_final: f64,
    pub records: Vec<NodeError>,
    pub max_abs_error: f64,
    /// Root mean square over the final-level nodes.
    pub l2_error: f64,
    pub steps: usize,
    pub mesh: Vec<MeshPoint>,
}

/// Evolves `cfg` and compares the final level with the exact solution at the
/// scheme's own nodes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    let exact = cfg.exact();
    let initial = initial_level(&exact, cfg.x_min, cfg.x_max, cfg.h, cfg.t0)?;
    let evo = evolve_with(cfg.model, cfg.scheme, initial, cfg.k, cfg.t_final, &cfg.boundary(), cfg.options())?;
    let last = evo.history.last();
    let records = last
        .nodes()
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let u_exact = exact.value(p.x, p.t)?;
            Ok(NodeError { m, x: p.x, t: p.t, u_numeric: p.u, u_exact, abs_error: (p.u - u_exact).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_error = records.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let l2_error = (records.iter().map(|r| r.abs_error * r.abs_error).sum::<f64>() / records.len() as f64).sqrt();
    let mesh = evo
        .history
        .levels()
        .iter()
        .flat_map(|lv| lv.nodes().iter().enumerate().map(move |(m, p)| MeshPoint { n: lv.n(), m, x: p.x, t: p.t }))
        .collect();
    Ok(ErrorReport {
        model: cfg.model,
        scheme: cfg.scheme,
        h: cfg.h,
        k: cfg.k,
        t_final: cfg.t_final,
        records,
        max_abs_error,
        l2_error,
        steps: evo.history.len() - 1,
        mesh,
    })
}

/// One report per scheme, in [`SchemeKind::ALL`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub reports: Vec<ErrorReport>,
}

impl ComparisonReport {
    pub fn get(&self, kind: SchemeKind) -> Option<&ErrorReport> {
        self.reports.iter().find(|r| r.scheme == kind)
    }

    /// `(scheme, max error, rms error)` rows.
    pub fn summary(&self) -> Vec<(SchemeKind, f64, f64)> {
        self.reports.iter().map(|r| (r.scheme, r.max_abs_error, r.l2_error)).collect()
    }

    /// Schemes sorted from most to least accurate in the max norm.
    pub fn ranking(&self) -> Vec<SchemeKind> {
        let mut rows = self.summary();
        rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        rows.into_iter().map(|r| r.0).collect()
    }
}

/// Runs `cfg` with every scheme kind, concurrently.
pub fn compare(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let reports = run_all(SchemeKind::ALL.iter().map(|&s| cfg.with_scheme(s)).collect())?;
    Ok(ComparisonReport { reports })
}

fn run_all(cfgs: Vec<ExperimentConfig>) -> Result<Vec<ErrorReport>> {
    thread::scope(|s| {
        let handles: Vec<_> = cfgs.iter().map(|c| s.spawn(move || run_experiment(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::misuse("experiment thread panicked"))))
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub k: f64,
    pub max_error: f64,
    pub l2_error: f64,
    /// `log2(err_prev / err)`, absent on the first row.
    pub order: Option<f64>,
}

/// Repeats `cfg` with successively halved spacing: `h` for the heat model,
/// `k` for the Burgers model.
pub fn convergence_study(cfg: &ExperimentConfig, refinements: usize) -> Result<Vec<ConvergenceRow>> {
    if refinements < 2 {
        return Err(Error::misuse(format!("a convergence study needs at least 2 refinements, got {refinements}")));
    }
    cfg.validate()?;
    let cfgs: Vec<_> = (0..refinements)
        .map(|i| {
            let f = 0.5f64.powi(i as i32);
            match cfg.model {
                Model::HeatLog => ExperimentConfig { h: cfg.h * f, ..cfg.clone() },
                Model::SphericalBurgers => ExperimentConfig { k: cfg.k * f, ..cfg.clone() },
            }
        })
        .collect();
    let reports = run_all(cfgs)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(reports.len());
    for r in &reports {
        let order = rows.last().map(|p| (p.max_error / r.max_abs_error).log2());
        rows.push(ConvergenceRow { h: r.h, k: r.k, max_error: r.max_abs_error, l2_error: r.l2_error, order });
    }
    Ok(rows)
}

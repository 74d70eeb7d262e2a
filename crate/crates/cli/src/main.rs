//! `invfd`: runs, compares, refines and audits the finite difference schemes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use invariant_fd::harness::{
    compare, convergence_study, emit_audit, emit_comparison, emit_convergence, emit_reports, invariance_audit_with,
    run_experiment, ExperimentConfig,
};
use invariant_fd::{Error, Model, Result, SchemeKind};

#[derive(Parser)]
#[command(name = "invfd", version, about = "Invariant and standard finite difference schemes on evolving meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one scheme and write solution, mesh and summary files.
    Run {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Option<SchemeKind>,
    },
    /// Evolve all three schemes and write per-scheme files with a shared summary.
    Compare {
        #[command(flatten)]
        setup: Setup,
    },
    /// Repeat a run with successively halved spacing.
    Converge {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Option<SchemeKind>,
        /// Number of refinement levels (at least 2).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Check the residuals of every scheme under random group transformations.
    Audit {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Setup {
    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    /// TOML file of `key = value` settings applied over the model's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> std::result::Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<SchemeKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Setup {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.model) {
            (Some(path), model) => ExperimentConfig::from_file(path, model)?,
            (None, Some(model)) => ExperimentConfig::preset(model),
            (None, None) => return Err(Error::Config("either --model or --config is required".into())),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(h, k, x_min, x_max, t0, t_final);
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { setup, scheme } => {
            let mut cfg = setup.config()?;
            if let Some(s) = scheme {
                cfg.scheme = s;
            }
            let r = run_experiment(&cfg)?;
            println!(
                "{} {}: steps {} max_abs_error {:e} l2_error {:e}",
                r.model, r.scheme, r.steps, r.max_abs_error, r.l2_error
            );
            print_written(&emit_reports(&r, &cfg.out_dir)?);
        }
        Command::Compare { setup } => {
            let cfg = setup.config()?;
            let cmp = compare(&cfg)?;
            for (s, max, l2) in cmp.summary() {
                println!("{} {s}: max_abs_error {max:e} l2_error {l2:e}", cfg.model);
            }
            let ranking: Vec<&str> = cmp.ranking().iter().map(|s| s.name()).collect();
            println!("most to least accurate: {}", ranking.join(" < "));
            print_written(&emit_comparison(&cmp, &cfg.out_dir)?);
        }
        Command::Converge { setup, scheme, levels } => {
            let mut cfg = setup.config()?;
            if let Some(s) = scheme {
                cfg.scheme = s;
            }
            let rows = convergence_study(&cfg, levels)?;
            for r in &rows {
                let order = r.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
                println!("h {:e} k {:e} max_abs_error {:e} order {order}", r.h, r.k, r.max_error);
            }
            print_written(&emit_convergence(&rows, &cfg.out_dir)?);
        }
        Command::Audit { setup, samples, seed } => {
            let cfg = setup.config()?;
            let seed = seed.unwrap_or(cfg.seed);
            let report = invariance_audit_with(cfg.model, &SchemeKind::ALL, samples, seed, cfg.k, cfg.h)?;
            for r in &report.rows {
                println!(
                    "{} {} {}: max_discrepancy {:e} {}",
                    r.model,
                    r.scheme,
                    r.subgroup,
                    r.max_discrepancy,
                    if r.pass { "pass" } else { "fail" }
                );
            }
            if let Some(w) = &report.incompatibility {
                println!(
                    "rectangular spacing with invariant motion: restriction violated by {:e} ({})",
                    w.restriction_violation,
                    if w.contradicts() { "contradiction" } else { "compatible" }
                );
            }
            print_written(&emit_audit(&report, &cfg.out_dir)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

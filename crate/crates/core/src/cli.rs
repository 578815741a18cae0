//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a residual exceeds its
//! tolerance, 2 for configuration, input or usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{check_spacing, RunConfig};
use crate::convergence::{convergence_table, ConvergenceRow, ConvergenceStatus};
use crate::error::{Error, Result};
use crate::field::write_node_csv;
use crate::integrability::{cic_multi, CicReportRow};
use crate::maximum_principle::ConditionReport;
use crate::pde::{forward_residual, split_controls};
use crate::plastic::{FamilyKind, PlasticCostateFields, PlasticState};
use crate::suite::{plastic_conditions, run_plastic_suite};
use crate::system_config::SystemConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BITIME_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "bitime",
    version,
    about = "Residual checks for bi-time optimal control of plane PDE systems"
)]
pub struct Cli {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid spacing, e.g. `1/64` or `0.015625`; a comma list for `convergence`.
    #[arg(long, global = true)]
    pub h: Option<String>,
    /// quadratic, inv_x, inv_y or constant.
    #[arg(long, global = true)]
    pub family: Option<FamilyKind>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Output directory for `fields`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every condition of the plastic solution family.
    Verify,
    /// Forward and integrability residuals of a system read from JSON.
    Residuals { system: PathBuf },
    /// Residual norms and ratios over halving spacings.
    Convergence,
    /// Write state, stress, costate, control and residual fields as CSV.
    Fields,
}

/// Parses `a/b` or a decimal number.
fn parse_spacing(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot read spacing '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

/// Comma-separated spacings.
pub fn parse_spacings(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_spacing).collect()
}

impl Cli {
    /// Config file merged with command-line overrides.
    ///
    /// A single `--h` sets the spacing; a list replaces the convergence levels.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(h) = &self.h {
            let hs = parse_spacings(h)?;
            match (&self.command, hs.as_slice()) {
                (Command::Convergence, _) => c.convergence_h = hs,
                (_, [h]) => c.h = *h,
                _ => {
                    return Err(Error::InvalidInput(
                        "a list of spacings is only accepted by `convergence`".into(),
                    ))
                }
            }
        }
        if let Some(f) = self.family {
            c.family = f;
        }
        for (slot, v) in [
            (&mut c.alpha, self.alpha),
            (&mut c.beta, self.beta),
            (&mut c.gamma, self.gamma),
            (&mut c.delta, self.delta),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(o) = &self.out {
            c.out_dir = o.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn install_thread_cap() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))
        })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    install_thread_cap()?;
    let config = cli.resolve_config()?;
    match &cli.command {
        Command::Verify => cmd_verify(&config, cli.json, out, err),
        Command::Residuals { system } => cmd_residuals(&config, system, cli.json, out),
        Command::Convergence => cmd_convergence(&config, cli.json, out),
        Command::Fields => cmd_fields(&config, out),
    }
}

fn code(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

pub fn cmd_verify(config: &RunConfig, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let report = run_plastic_suite(&config.suite_settings())?;
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    for c in report.failed() {
        writeln!(
            err,
            "failed: {} {} (max {:.3e} > {:.3e})",
            c.report.condition, c.name, c.report.max_norm, c.tolerance
        )?;
    }
    Ok(code(report.passed))
}

/// Norms of a user-defined system on one grid.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualsReport {
    pub h: f64,
    pub node_count: usize,
    pub tolerance: f64,
    /// One report per component of the system.
    pub forward: Vec<ConditionReport>,
    pub cic: Vec<CicReportRow>,
    pub passed: bool,
}

pub fn residuals_report(config: &RunConfig, system: &SystemConfig) -> Result<ResidualsReport> {
    let grid = system.grid(config.h, config.margin())?;
    let sampled = system.sample_on(&grid)?;
    let forward = forward_residual(system.system(), &sampled.states, &sampled.controls)?;
    let split = split_controls(system.system(), &sampled.states, &sampled.controls)?;
    let cic = cic_multi(&split)?.rows();
    let forward: Vec<ConditionReport> = forward
        .iter()
        .map(|f| ConditionReport::from_fields("(4)", std::slice::from_ref(f)))
        .collect();
    let tolerance = config.tolerance_c * config.h * config.h;
    let passed =
        forward.iter().all(|r| r.max_norm <= tolerance) && cic.iter().all(|r| r.max_norm <= tolerance);
    Ok(ResidualsReport {
        h: config.h,
        node_count: grid.node_count(),
        tolerance,
        forward,
        cic,
        passed,
    })
}

pub fn cmd_residuals(config: &RunConfig, path: &Path, json: bool, out: &mut dyn Write) -> Result<i32> {
    let system = SystemConfig::load(path)?;
    let report = residuals_report(config, &system)?;
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )?;
    } else {
        writeln!(
            out,
            "h = {}, {} nodes, tolerance {:.2e}",
            report.h, report.node_count, report.tolerance
        )?;
        for (k, f) in report.forward.iter().enumerate() {
            writeln!(
                out,
                "forward line {}     max {:>10.3e}  l2 {:>10.3e}",
                k + 1,
                f.max_norm,
                f.l2_norm
            )?;
        }
        for r in &report.cic {
            writeln!(
                out,
                "integrability {}    max {:>10.3e}  l2 {:>10.3e}",
                r.state_index, r.max_norm, r.l2_norm
            )?;
        }
        writeln!(
            out,
            "{}",
            if report.passed {
                "all within tolerance"
            } else {
                "tolerance exceeded"
            }
        )?;
    }
    Ok(code(report.passed))
}

pub fn convergence_rows(config: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    for &h in &config.convergence_h {
        check_spacing(h)?;
    }
    let family = config.family();
    convergence_table(&config.convergence_h, |h| {
        let s = config.suite_settings_at(h);
        plastic_conditions(&s.grid()?, family, s.q1_shift)
    })
}

pub fn cmd_convergence(config: &RunConfig, json: bool, out: &mut dyn Write) -> Result<i32> {
    let rows = convergence_rows(config)?;
    let passed = rows.iter().all(|r| r.status != ConvergenceStatus::OutsideWindow);
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        )?;
    } else {
        writeln!(
            out,
            "family {} (coefficient {})",
            config.family,
            config.family().coeff
        )?;
        for r in &rows {
            let norms: Vec<String> = r.levels.iter().map(|l| format!("{:.3e}", l.max_norm)).collect();
            let ratios: Vec<String> = r
                .ratios
                .iter()
                .map(|q| {
                    if q.is_finite() {
                        format!("{q:.2}")
                    } else {
                        "-".into()
                    }
                })
                .collect();
            writeln!(
                out,
                "{:<34} max [{}]  ratios [{}]  {}",
                r.condition,
                norms.join(", "),
                ratios.join(", "),
                r.status.label()
            )?;
        }
    }
    Ok(code(passed))
}

/// Files written by `fields`.
pub const FIELD_FILES: [&str; 4] = ["stress.csv", "costates.csv", "controls.csv", "residuals.csv"];

pub fn write_fields(config: &RunConfig, dir: &Path) -> Result<()> {
    let settings = config.suite_settings();
    let grid = settings.grid()?;
    let state = PlasticState::from_family(&grid, settings.family)?;
    let sigma = state.stress();
    let controls = state.controls()?;
    let costates = PlasticCostateFields::particular(&state.phi, settings.q1_shift);

    let unwritable =
        |path: &Path, e: std::io::Error| Error::InvalidInput(format!("cannot write {}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| unwritable(dir, e))?;
    let open = |name: &str| -> Result<BufWriter<File>> {
        let path = dir.join(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| unwritable(&path, e))
    };

    let mut f = open(FIELD_FILES[0])?;
    write_node_csv(
        &mut f,
        &["sxx", "syy", "sxy", "rho", "K", "cphi", "sphi"],
        &[
            &sigma.sxx,
            &sigma.syy,
            &sigma.sxy,
            &state.rho,
            &state.k,
            &state.phi.cos,
            &state.phi.sin,
        ],
    )?;
    f.flush()?;

    let c = &costates;
    let mut f = open(FIELD_FILES[1])?;
    write_node_csv(
        &mut f,
        &["p1", "p2", "r1", "r2", "q1", "q2"],
        &[&c.p[0], &c.p[1], &c.r[0], &c.r[1], &c.q[0], &c.q[1]],
    )?;
    f.flush()?;

    let mut f = open(FIELD_FILES[2])?;
    write_node_csv(
        &mut f,
        &["u", "v", "mu", "nu"],
        &[&controls.u, &controls.v, &controls.mu, &controls.nu],
    )?;
    f.flush()?;

    let conditions = plastic_conditions(&grid, settings.family, settings.q1_shift)?;
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for (name, fields) in &conditions {
        let slug: String = name
            .chars()
            .map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' })
            .collect::<String>()
            .split('_')
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("_");
        for (k, field) in fields.iter().enumerate() {
            names.push(if fields.len() == 1 {
                slug.clone()
            } else {
                format!("{slug}_{}", k + 1)
            });
            columns.push(field);
        }
    }
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut f = open(FIELD_FILES[3])?;
    write_node_csv(&mut f, &names, &columns)?;
    f.flush()?;

    Ok(())
}

pub fn cmd_fields(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    write_fields(config, &config.out_dir)?;
    for name in FIELD_FILES {
        writeln!(out, "{}", config.out_dir.join(name).display())?;
    }
    Ok(EXIT_OK)
}

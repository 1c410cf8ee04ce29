//! The three subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use noma_eh::oracle::brute_force_p0;
use noma_eh::region::{r1_max, solve, sweep};
use noma_eh::solver_dynamic::{exhaustive_search_with, suboptimal_search_with};
use noma_eh::PowerModel;

use crate::config::RunConfig;
use crate::output::{write_csv, write_json, Format, RegionFile};
use crate::{CliError, Outcome};

/// Rates checked by `verify`.
pub const VERIFY_POINTS: usize = 10;

/// Default `verify` tolerance, bits/s/Hz.
pub const DEFAULT_TOL: f64 = 0.05;

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Sweeps the configured scheme and writes the boundary.
pub fn region(cfg: &RunConfig, format: Format, out: Option<&Path>) -> Result<Outcome, CliError> {
    let boundary = sweep(cfg.scheme, &cfg.params, &cfg.model, cfg.points, &cfg.opts);
    let mut w = open_out(out)?;
    match format {
        Format::Csv => write_csv(&boundary, cfg.mbps_per_unit(), &mut w)?,
        Format::Json => write_json(&boundary, cfg.echo(), &mut w)?,
    }
    w.flush()?;
    Ok(if boundary.r1_max.is_none() {
        Outcome::SchemeInfeasible
    } else {
        Outcome::Ok
    })
}

/// Compares the solver against a reference on [`VERIFY_POINTS`] rates in
/// `[0, r1_max)`: the brute-force oracle for the constant model, the
/// exhaustive search (reference) against the suboptimal one for the dynamic
/// model. `oracle_p_sic` replaces the oracle's decoder power, to check that
/// a disagreement is caught.
pub fn verify<W: Write>(
    cfg: &RunConfig,
    tol: f64,
    oracle_p_sic: Option<f64>,
    mut report: W,
) -> Result<Outcome, CliError> {
    let Some(mode) = cfg.scheme.split_mode() else {
        return Err(CliError::Usage(format!(
            "verify supports ts, ps and gen, not {}",
            cfg.scheme
        )));
    };
    let Some(r_max) = r1_max(cfg.scheme, &cfg.params, &cfg.model, &cfg.opts) else {
        writeln!(report, "scheme {} supports no rate for UE 1", cfg.scheme)?;
        return Ok(Outcome::SchemeInfeasible);
    };
    let oracle_model = match (cfg.model, oracle_p_sic) {
        (PowerModel::Constant { .. }, Some(p)) => PowerModel::Constant { p_sic: p },
        (m, _) => m,
    };
    let (solver_name, reference_name) = match cfg.model {
        PowerModel::Constant { .. } => ("solver", "oracle"),
        PowerModel::Dynamic(_) => ("suboptimal", "exhaustive"),
    };
    writeln!(
        report,
        "r1_bps_hz,{solver_name},{reference_name},abs_diff,status"
    )?;
    let mut mismatches = 0;
    for i in 0..VERIFY_POINTS {
        let r = r_max * (i as f64 / VERIFY_POINTS as f64);
        let (ours, theirs) = match cfg.model {
            PowerModel::Constant { .. } => {
                let s = solve(r, cfg.scheme, &cfg.params, &cfg.model, &cfg.opts);
                let o = brute_force_p0(r, &cfg.params, &oracle_model, &cfg.opts.grid, mode).ok();
                (s.is_optimal().then_some(s.r2_star), o.map(|o| o.r2_best))
            }
            PowerModel::Dynamic(dm) => {
                let s = suboptimal_search_with(r, &cfg.params, &dm, &cfg.opts.grid, mode);
                let e = exhaustive_search_with(r, &cfg.params, &dm, &cfg.opts.grid, mode);
                (
                    s.is_optimal().then_some(s.r2_star),
                    e.is_optimal().then_some(e.r2_star),
                )
            }
        };
        let show = |v: Option<f64>| v.map_or("infeasible".to_string(), |v| v.to_string());
        let (diff, ok) = match (ours, theirs) {
            (Some(a), Some(b)) => ((a - b).abs().to_string(), (a - b).abs() <= tol),
            (None, None) => (String::new(), true),
            _ => (String::new(), false),
        };
        if !ok {
            mismatches += 1;
        }
        writeln!(
            report,
            "{r},{},{},{diff},{}",
            show(ours),
            show(theirs),
            if ok { "ok" } else { "MISMATCH" }
        )?;
    }
    writeln!(
        report,
        "# {} of {VERIFY_POINTS} points within {tol} bits/s/Hz",
        VERIFY_POINTS - mismatches
    )?;
    Ok(if mismatches == 0 {
        Outcome::Ok
    } else {
        Outcome::Mismatch
    })
}

/// Reads a region file and writes its time-sharing hull in the same format.
pub fn hull(input: &Path, output: &Path) -> Result<Outcome, CliError> {
    let file = RegionFile::read(File::open(input)?)?;
    let mut w = BufWriter::new(File::create(output)?);
    file.hull().write(&mut w)?;
    w.flush()?;
    Ok(Outcome::Ok)
}

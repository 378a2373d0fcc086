//! The three run modes and the summary statistics behind sweeps.

use std::fs;
use std::io::{self, Write};

use rayon::prelude::*;
use tavis::dynamics::{tau_grid, Evolution, TimeSeriesRecord};
use tavis::entanglement::ClassifierConfig;
use tavis::propagator::{audit_closed_form, AuditReport};

use crate::config::{Mode, RunConfig, SweepSpec, STDOUT};
use crate::error::{CliError, CliResult};

pub const SERIES_HEADER: &str = "tau,p_ee,p_eg,p_ge,p_gg,negativity,class";

/// Negativity at or below this counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-6;

/// Returned for the first-zero column when negativity never returns to zero.
pub const NO_ZERO: f64 = -1.0;

/// Twelve significant digits, lowercase exponent, no negative zero.
pub fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn series(cfg: &RunConfig) -> CliResult<Vec<TimeSeriesRecord>> {
    let evo = Evolution::new(&cfg.params()?, &cfg.atomic_vector()?)?;
    Ok(evo.time_series(cfg.tau_max, cfg.steps, &ClassifierConfig::default())?)
}

pub fn series_csv(records: &[TimeSeriesRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in records {
        let cols = [r.tau, r.p_ee, r.p_eg, r.p_ge, r.p_gg, r.negativity].map(fmt_real);
        out.push_str(&cols.join(","));
        out.push(',');
        out.push_str(r.class_label.as_str());
        out.push('\n');
    }
    out
}

/// Downward crossings of `threshold`, each located by linear interpolation.
pub fn downward_crossings(taus: &[f64], values: &[f64], threshold: f64) -> Vec<f64> {
    taus.windows(2)
        .zip(values.windows(2))
        .filter_map(|(t, v)| {
            let (a, b) = (v[0] - threshold, v[1] - threshold);
            (a > 0.0 && b <= 0.0).then(|| t[0] + (t[1] - t[0]) * a / (a - b))
        })
        .collect()
}

pub fn first_zero(taus: &[f64], negativity: &[f64]) -> f64 {
    downward_crossings(taus, negativity, ZERO_THRESHOLD)
        .first()
        .copied()
        .unwrap_or(NO_ZERO)
}

/// Trapezoid-rule average over the sampled interval.
pub fn time_average(taus: &[f64], values: &[f64]) -> f64 {
    let span = taus[taus.len() - 1] - taus[0];
    let area: f64 = taus
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    area / span
}

/// Sign changes of `values` about their own time average.
pub fn mean_crossings(taus: &[f64], values: &[f64]) -> usize {
    let m = time_average(taus, values);
    values.windows(2).filter(|v| (v[0] - m) * (v[1] - m) < 0.0).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub mean_negativity: f64,
    pub first_zero: f64,
    pub negativity_zeros: usize,
    pub p_ee_crossings: usize,
}

pub fn summarize(value: f64, records: &[TimeSeriesRecord]) -> SweepRow {
    let taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
    let neg: Vec<f64> = records.iter().map(|r| r.negativity).collect();
    let p_ee: Vec<f64> = records.iter().map(|r| r.p_ee).collect();
    SweepRow {
        value,
        mean_negativity: time_average(&taus, &neg),
        first_zero: first_zero(&taus, &neg),
        negativity_zeros: downward_crossings(&taus, &neg, ZERO_THRESHOLD).len(),
        p_ee_crossings: mean_crossings(&taus, &p_ee),
    }
}

/// Rows come back in sweep order whatever the thread schedule.
pub fn sweep(cfg: &RunConfig, spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    spec.values()
        .into_par_iter()
        .map(|v| {
            let point = cfg.with_sweep_value(spec.param, v);
            Ok(summarize(v, &series(&point)?))
        })
        .collect()
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{},mean_negativity,first_zero,negativity_zeros,p_ee_crossings\n",
        spec.param.as_str()
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_real(r.value),
            fmt_real(r.mean_negativity),
            fmt_real(r.first_zero),
            r.negativity_zeros,
            r.p_ee_crossings
        ));
    }
    out
}

pub fn audit(cfg: &RunConfig) -> CliResult<AuditReport> {
    let grid = tau_grid(cfg.tau_max, cfg.steps)?;
    audit_closed_form(&cfg.params()?, &grid, cfg.audit_mode.into()).map_err(|e| match e {
        tavis::Error::DegenerateRoots { min_gap } => CliError::Degenerate { min_gap },
        other => other.into(),
    })
}

/// Runs `cfg` and returns the bytes destined for `output_path`.
pub fn render(cfg: &RunConfig) -> CliResult<String> {
    match cfg.mode {
        Mode::Series => Ok(series_csv(&series(cfg)?)),
        Mode::Sweep => {
            let spec = cfg
                .sweep
                .ok_or_else(|| CliError::invalid("mode = sweep needs a sweep spec"))?;
            Ok(sweep_csv(&spec, &sweep(cfg, &spec)?))
        }
        Mode::Audit => {
            let mut json = audit(cfg)?.to_json();
            json.push('\n');
            Ok(json)
        }
    }
}

pub fn write_output(path: &str, content: &str) -> CliResult<()> {
    if path == STDOUT {
        let mut stdout = io::stdout().lock();
        stdout.write_all(content.as_bytes())?;
        stdout.flush()?;
    } else {
        fs::write(path, content).map_err(|e| io::Error::new(e.kind(), format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    write_output(&cfg.output_path, &render(cfg)?)
}

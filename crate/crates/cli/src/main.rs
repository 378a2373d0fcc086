use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tavis_cli::config::{preset, PRESETS, STDOUT};
use tavis_cli::run::{audit, render, write_output};
use tavis_cli::{AuditMode, CliError, CliResult, Initial, Mode, PartialConfig, RunConfig, SweepSpec};

/// Two atoms in a cavity: population and entanglement time series, parameter
/// sweeps, and closed-form propagator audits.
#[derive(Debug, Parser)]
#[command(name = "tavis", version)]
struct Args {
    /// TOML file with RunConfig keys; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Named parameter set, applied beneath the file and the flags.
    #[arg(long)]
    preset: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,

    #[arg(long)]
    n_photon: Option<usize>,

    #[arg(long, value_enum)]
    initial: Option<Initial>,

    /// Eight reals for initial = custom: a1re,a1im,b1re,b1im,a2re,a2im,b2re,b2im.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    amplitudes: Option<Vec<f64>>,

    #[arg(long)]
    tau_max: Option<f64>,

    #[arg(long)]
    steps: Option<usize>,

    #[arg(long)]
    fock_cutoff: Option<usize>,

    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Output file, or `-` for stdout.
    #[arg(long)]
    output: Option<String>,

    /// param:start:stop:count with param delta or n_photon.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<SweepSpec>,

    #[arg(long, value_enum)]
    audit_mode: Option<AuditMode>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,

    /// List preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

impl Args {
    fn flags(&self) -> CliResult<PartialConfig> {
        if let Some(v) = &self.amplitudes {
            if v.len() != 8 {
                return Err(CliError::invalid(format!(
                    "--amplitudes takes 8 numbers, got {}",
                    v.len()
                )));
            }
        }
        Ok(PartialConfig {
            preset: self.preset.clone(),
            delta: self.delta,
            n_photon: self.n_photon,
            initial: self.initial,
            amplitudes: self
                .amplitudes
                .as_ref()
                .map(|v| [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]], [v[6], v[7]]]),
            tau_max: self.tau_max,
            steps: self.steps,
            fock_cutoff: self.fock_cutoff,
            output_path: self.output.clone(),
            mode: self.mode,
            sweep: self.sweep,
            audit_mode: self.audit_mode,
        })
    }

    fn resolve(&self) -> CliResult<RunConfig> {
        let file = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        PartialConfig::resolve(file, self.flags()?)
    }
}

fn execute(args: &Args) -> CliResult<()> {
    if args.list_presets {
        let mut out = String::new();
        for name in PRESETS {
            let p = preset(name)?.finish()?;
            out += &format!(
                "{name}: delta={} n_photon={} initial={}\n",
                p.delta,
                p.n_photon,
                p.initial.as_str()
            );
        }
        return write_output(STDOUT, &out);
    }
    let cfg = args.resolve()?;
    if args.print_config {
        return write_output(STDOUT, &cfg.to_toml());
    }
    if cfg.mode == Mode::Audit && cfg.output_path != STDOUT {
        let report = audit(&cfg)?;
        write_output(&cfg.output_path, &(report.to_json() + "\n"))?;
        return write_output(STDOUT, &report.to_table());
    }
    write_output(&cfg.output_path, &render(&cfg)?)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tavis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

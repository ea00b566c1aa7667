use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cavqed::cli::{self, CommandOutput, Format, RunConfig};

/// Exact dynamics, entanglement and teleportation fidelity of two atoms in
/// a dispersive cavity with spontaneous emission.
#[derive(Parser)]
#[command(name = "cavqed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint probabilities versus λ/δ at fixed λt
    Fig2(Fig2Args),
    /// Bell signal β(φ) at Ωt = (2k+1)π/4
    Fig3(Common),
    /// Maximum teleportation fidelity over (Ωt, γ/Ω)
    Fig5(Common),
    /// Concurrence over (Ωt, γ/Ω)
    Fig6(Common),
    /// Threshold decay rate per k, closed form against bisection
    Threshold(Common),
    /// Run the verification suite
    Verify(VerifyArgs),
    /// Channel report and protocol fidelity over (Ωt, γ/Ω)
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// γ/λ (fig2) or γ/Ω ratio; repeatable
    #[arg(long = "gamma-ratio")]
    gamma_ratio: Vec<f64>,
    /// interaction-time index; repeatable
    #[arg(long)]
    k: Vec<u32>,
    /// grid points per axis
    #[arg(long)]
    grid: Option<usize>,
    /// upper end of the Ωt axis
    #[arg(long)]
    t_max: Option<f64>,
    /// upper end of the γ/Ω axis when no --gamma-ratio is given
    #[arg(long)]
    gamma_ratio_max: Option<f64>,
    /// integrate the master equation (RK4) instead of using the closed form
    #[arg(long)]
    oracle: bool,
    /// RK4 step in units of 1/Ω (1/λ for full-model runs)
    #[arg(long)]
    dt: Option<f64>,
    /// Fock-space cutoff of the full model
    #[arg(long)]
    n_max: Option<usize>,
    /// output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// JSON file with default values for any of these options
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Fig2Args {
    #[command(flatten)]
    common: Common,
    /// λt held fixed along the sweep
    #[arg(long)]
    lambda_t: Option<f64>,
    /// smallest λ/δ
    #[arg(long)]
    ratio_min: Option<f64>,
    /// largest λ/δ (at most 1/3)
    #[arg(long)]
    ratio_max: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// run only these groups; repeatable
    #[arg(long)]
    only: Vec<String>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Common {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            gamma_ratio: non_empty(self.gamma_ratio.clone()),
            k: non_empty(self.k.clone()),
            grid: self.grid,
            t_max: self.t_max,
            oracle: self.oracle.then_some(true),
            dt: self.dt,
            n_max: self.n_max,
            out: self.out.clone(),
            format: self.format.as_deref().map(|f| match f {
                "json" => Format::Json,
                _ => Format::Csv,
            }),
            gamma_ratio_max: self.gamma_ratio_max,
            ..RunConfig::default()
        }
    }

    /// CLI values over config-file values.
    fn merged(&self, extra: RunConfig) -> Result<RunConfig, String> {
        let cli = self.to_config();
        let cli = RunConfig {
            lambda_t: extra.lambda_t,
            ratio_min: extra.ratio_min,
            ratio_max: extra.ratio_max,
            only: extra.only,
            ..cli
        };
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                RunConfig::from_json(&text).map_err(|e| e.to_string())?
            }
            None => RunConfig::default(),
        };
        Ok(cli.or(file))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    }
}

const CONFIG_ERROR: u8 = 2;
const VERIFY_FAILURE: u8 = 1;

fn run_figure(
    common: &Common,
    extra: RunConfig,
    name: &str,
    cmd: fn(&RunConfig) -> cavqed::Result<CommandOutput>,
) -> Result<u8, String> {
    let config = common.merged(extra)?;
    let out = cmd(&config).map_err(|e| e.to_string())?;
    let text = out.table.render(name, &out.config, config.output_format());
    write_output(config.out.as_deref(), &text)?;
    for f in &out.failures {
        eprintln!("verification failure: {f}");
    }
    Ok(if out.failures.is_empty() { 0 } else { VERIFY_FAILURE })
}

fn run_verify(args: &VerifyArgs) -> Result<u8, String> {
    let extra = RunConfig {
        only: non_empty(args.only.clone()),
        ..RunConfig::default()
    };
    let config = args.common.merged(extra)?;
    let (cfg, report) = cli::cmd_verify(&config).map_err(|e| e.to_string())?;
    for check in &report.checks {
        println!("{check}");
    }
    let failed = report.failures().count();
    println!("{} checks, {} failed", report.checks.len(), failed);
    if let Some(path) = &config.out {
        let text = cli::render_report(&cfg, &report, config.output_format());
        write_output(Some(path), &text)?;
    }
    Ok(if report.passed() { 0 } else { VERIFY_FAILURE })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = match &args.command {
        Command::Fig2(a) => run_figure(
            &a.common,
            RunConfig {
                lambda_t: a.lambda_t,
                ratio_min: a.ratio_min,
                ratio_max: a.ratio_max,
                ..RunConfig::default()
            },
            "fig2",
            cli::cmd_fig2,
        ),
        Command::Fig3(c) => run_figure(c, RunConfig::default(), "fig3", cli::cmd_fig3),
        Command::Fig5(c) => run_figure(c, RunConfig::default(), "fig5", cli::cmd_fig5),
        Command::Fig6(c) => run_figure(c, RunConfig::default(), "fig6", cli::cmd_fig6),
        Command::Threshold(c) => run_figure(c, RunConfig::default(), "threshold", cli::cmd_threshold),
        Command::Sweep(c) => run_figure(c, RunConfig::default(), "sweep", cli::cmd_sweep),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}

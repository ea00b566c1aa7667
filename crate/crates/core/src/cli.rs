//! Figure data, threshold table and parameter sweeps behind the `cavqed`
//! executable. Argument parsing lives in the binary; everything here takes
//! a merged [`RunConfig`] and returns a [`Table`].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{gamma_max, rho_exact, InteractionTimeIndex};
use crate::error::{Error, Result};
use crate::metrics::{
    average_teleport_fidelity, bell_signal, concurrence, joint_probabilities,
    max_teleport_fidelity, ChannelReport,
};
use crate::model::{two_atom_projector, SystemParams, EG};
use crate::oracle::{integrate_effective, IntegratorConfig};
use crate::qmat::DensityMatrix;
use crate::verify::{linspace, threshold_by_bisection, Group, VerifyOptions, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by every subcommand. Unset fields fall back to the
/// command's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma_ratio: Option<Vec<f64>>,
    pub k: Option<Vec<u32>>,
    pub grid: Option<usize>,
    pub t_max: Option<f64>,
    pub oracle: Option<bool>,
    pub dt: Option<f64>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// λt held fixed in fig2.
    pub lambda_t: Option<f64>,
    /// λ/δ range of fig2.
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    /// Upper end of the γ/Ω axis of fig5, fig6 and sweep when no explicit
    /// ratios are given.
    pub gamma_ratio_max: Option<f64>,
    /// Verification groups to run.
    pub only: Option<Vec<String>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("config file: {e}")))
    }

    /// Field-wise `self` over `fallback`.
    pub fn or(self, fallback: RunConfig) -> RunConfig {
        RunConfig {
            gamma_ratio: self.gamma_ratio.or(fallback.gamma_ratio),
            k: self.k.or(fallback.k),
            grid: self.grid.or(fallback.grid),
            t_max: self.t_max.or(fallback.t_max),
            oracle: self.oracle.or(fallback.oracle),
            dt: self.dt.or(fallback.dt),
            n_max: self.n_max.or(fallback.n_max),
            out: self.out.or(fallback.out),
            format: self.format.or(fallback.format),
            lambda_t: self.lambda_t.or(fallback.lambda_t),
            ratio_min: self.ratio_min.or(fallback.ratio_min),
            ratio_max: self.ratio_max.or(fallback.ratio_max),
            gamma_ratio_max: self.gamma_ratio_max.or(fallback.gamma_ratio_max),
            only: self.only.or(fallback.only),
        }
    }

    /// Explicit format, else inferred from a `.json` output path, else CSV.
    pub fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn check_ratios(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(bad(format!("{name}: empty list")));
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(bad(format!("{name}: {x} is not a finite non-negative number")));
    }
    Ok(())
}

fn check_grid(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(bad("grid must have at least one point"));
    }
    Ok(n)
}

fn check_dt(dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(bad(format!("dt must be > 0, got {dt}")));
    }
    Ok(dt)
}

/// Evaluation mode of a figure: closed form, or RK4 with step `dt` in units
/// of 1/Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub oracle: bool,
    pub dt: f64,
}

impl Evaluation {
    fn from_config(c: &RunConfig) -> Result<Self> {
        Ok(Self {
            oracle: c.oracle.unwrap_or(false),
            dt: check_dt(c.dt.unwrap_or(1e-3))?,
        })
    }

    /// States from |eg⟩ at the increasing times `times`.
    pub fn states(&self, p: &SystemParams, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        if self.oracle {
            let rho0 = DensityMatrix::two_qubit(two_atom_projector(EG))?;
            let cfg = IntegratorConfig::rk4(self.dt / p.omega_eff())?;
            Ok(integrate_effective(&rho0, p, times, cfg)?.states().to_vec())
        } else {
            times.iter().map(|&t| Ok(rho_exact(t, p)?.rho)).collect()
        }
    }

    pub fn state(&self, p: &SystemParams, t: f64) -> Result<DensityMatrix> {
        Ok(self.states(p, &[t])?.remove(0))
    }
}

/// Numeric output table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header row, one line per row, 17 significant digits, LF endings.
    /// The first line is a `#` comment echoing the effective config.
    pub fn to_csv(&self, command: &str, config: &Value) -> String {
        let mut s = format!("# cavqed {command} {config}\n");
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, command: &str, config: &Value) -> String {
        let mut columns = serde_json::Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            let col: Vec<f64> = self.rows.iter().map(|r| r[i]).collect();
            columns.insert(name.clone(), json!(col));
        }
        let doc = json!({ "command": command, "config": config, "columns": columns });
        let mut s = serde_json::to_string_pretty(&doc).expect("finite table");
        s.push('\n');
        s
    }

    pub fn render(&self, command: &str, config: &Value, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(command, config),
            Format::Json => self.to_json(command, config),
        }
    }
}

/// A command's table plus any verification failures it detected.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub table: Table,
    /// Effective config, echoed into the output.
    pub config: Value,
    pub failures: Vec<String>,
}

fn tag(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Config {
    pub gamma_ratio: Vec<f64>,
    pub lambda_t: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub grid: usize,
    #[serde(flatten)]
    pub eval: Evaluation,
}

impl Fig2Config {
    pub fn resolve(c: &RunConfig) -> Result<Self> {
        let gamma_ratio = c.gamma_ratio.clone().unwrap_or_else(|| vec![0.0, 0.01, 0.05, 0.1]);
        check_ratios("gamma-ratio", &gamma_ratio)?;
        let lambda_t = c.lambda_t.unwrap_or(3.0 * PI);
        if !(lambda_t >= 0.0 && lambda_t.is_finite()) {
            return Err(bad(format!("lambda-t must be >= 0, got {lambda_t}")));
        }
        let (ratio_min, ratio_max) = (c.ratio_min.unwrap_or(0.01), c.ratio_max.unwrap_or(0.33));
        if !(ratio_min > 0.0 && ratio_min <= ratio_max && ratio_max <= 1.0 / 3.0) {
            return Err(bad(format!(
                "lambda/delta range [{ratio_min}, {ratio_max}] must lie in (0, 1/3]"
            )));
        }
        Ok(Self {
            gamma_ratio,
            lambda_t,
            ratio_min,
            ratio_max,
            grid: check_grid(c.grid.unwrap_or(161))?,
            eval: Evaluation::from_config(c)?,
        })
    }
}

/// Joint probabilities at fixed λt versus λ/δ (λ = 1, so Ω = λ/δ and
/// γ/λ = γ).
pub fn cmd_fig2(c: &RunConfig) -> Result<CommandOutput> {
    let cfg = Fig2Config::resolve(c)?;
    let ratios = linspace(cfg.ratio_min, cfg.ratio_max, cfg.grid);
    let mut columns = vec!["lambda_over_delta".to_string()];
    for &g in &cfg.gamma_ratio {
        for name in ["p_eg", "p_ge", "p_gg"] {
            columns.push(format!("{name}_gamma_{}", tag(g)));
        }
    }
    let rows = ratios
        .par_iter()
        .map(|&r| {
            let mut row = vec![r];
            for &g in &cfg.gamma_ratio {
                let p = SystemParams::new(1.0, 1.0 / r, g)?;
                let probs = joint_probabilities(&cfg.eval.state(&p, cfg.lambda_t)?);
                row.extend([probs.eg, probs.ge, probs.gg]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommandOutput {
        table: Table { columns, rows },
        config: json!(cfg),
        failures: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Config {
    pub gamma_ratio: Vec<f64>,
    pub k: Vec<u32>,
    pub grid: usize,
    #[serde(flatten)]
    pub eval: Evaluation,
}

impl Fig3Config {
    pub fn resolve(c: &RunConfig) -> Result<Self> {
        let gamma_ratio = c.gamma_ratio.clone().unwrap_or_else(|| vec![0.0, 0.2, 0.4]);
        check_ratios("gamma-ratio", &gamma_ratio)?;
        let k = c.k.clone().unwrap_or_else(|| vec![0]);
        if k.is_empty() {
            return Err(bad("k: empty list"));
        }
        Ok(Self {
            gamma_ratio,
            k,
            grid: check_grid(c.grid.unwrap_or(361))?,
            eval: Evaluation::from_config(c)?,
        })
    }
}

/// Bell signal β(φ) over φ ∈ [0, 2π] at Ωt_k (Ω = 1).
pub fn cmd_fig3(c: &RunConfig) -> Result<CommandOutput> {
    let cfg = Fig3Config::resolve(c)?;
    let phis = linspace(0.0, 2.0 * PI, cfg.grid);
    let mut columns = vec!["phi".to_string()];
    let mut states = Vec::new();
    for &k in &cfg.k {
        for &g in &cfg.gamma_ratio {
            columns.push(format!("beta_k{k}_gamma_{}", tag(g)));
            let p = SystemParams::from_effective(1.0, g)?;
            states.push(cfg.eval.state(&p, InteractionTimeIndex(k).time(1.0))?);
        }
    }
    let rows = phis
        .iter()
        .map(|&phi| {
            std::iter::once(phi)
                .chain(states.iter().map(|s| bell_signal(s, phi)))
                .collect()
        })
        .collect();
    Ok(CommandOutput {
        table: Table { columns, rows },
        config: json!(cfg),
        failures: Vec::new(),
    })
}

/// Grid over Ωt ∈ [0, t_max] and γ/Ω, shared by fig5, fig6 and sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceConfig {
    pub gamma_ratio: Vec<f64>,
    pub t_max: f64,
    pub grid: usize,
    #[serde(flatten)]
    pub eval: Evaluation,
}

impl SurfaceConfig {
    pub fn resolve(c: &RunConfig, t_max: f64, grid: usize, gammas: Option<Vec<f64>>) -> Result<Self> {
        let grid = check_grid(c.grid.unwrap_or(grid))?;
        let gamma_ratio = match c.gamma_ratio.clone().or(gammas) {
            Some(v) => v,
            None => {
                let top = c.gamma_ratio_max.unwrap_or(1.0);
                check_ratios("gamma-ratio-max", &[top])?;
                linspace(0.0, top, grid)
            }
        };
        check_ratios("gamma-ratio", &gamma_ratio)?;
        let t_max = c.t_max.unwrap_or(t_max);
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(bad(format!("t-max must be >= 0, got {t_max}")));
        }
        if t_max == 0.0 && grid > 1 {
            return Err(bad("t-max = 0 allows a single grid point"));
        }
        Ok(Self {
            gamma_ratio,
            t_max,
            grid,
            eval: Evaluation::from_config(c)?,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max, self.grid)
    }

    /// Rows `[Ωt, γ/Ω, f(ρ)...]`, γ-major.
    fn evaluate(&self, f: impl Fn(&DensityMatrix) -> Result<Vec<f64>> + Sync) -> Result<Vec<Vec<f64>>> {
        let times = self.times();
        let blocks = self
            .gamma_ratio
            .par_iter()
            .map(|&g| {
                let p = SystemParams::from_effective(1.0, g)?;
                let states = self.eval.states(&p, &times)?;
                times
                    .iter()
                    .zip(&states)
                    .map(|(&t, s)| {
                        let mut row = vec![t, g];
                        row.extend(f(s)?);
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(blocks.into_iter().flatten().collect())
    }
}

fn surface(c: &RunConfig, name: &str, f: impl Fn(&DensityMatrix) -> Result<f64> + Sync) -> Result<CommandOutput> {
    let cfg = SurfaceConfig::resolve(c, 2.0 * PI, 101, None)?;
    let rows = cfg.evaluate(|s| Ok(vec![f(s)?]))?;
    Ok(CommandOutput {
        table: Table {
            columns: vec!["omega_t".into(), "gamma_over_omega".into(), name.into()],
            rows,
        },
        config: json!(cfg),
        failures: Vec::new(),
    })
}

/// F_max over (Ωt, γ/Ω).
pub fn cmd_fig5(c: &RunConfig) -> Result<CommandOutput> {
    surface(c, "fmax", |s| Ok(max_teleport_fidelity(s)))
}

/// Concurrence over (Ωt, γ/Ω).
pub fn cmd_fig6(c: &RunConfig) -> Result<CommandOutput> {
    surface(c, "concurrence", concurrence)
}

/// Every [`ChannelReport`] field plus the average fidelity of the standard
/// protocol over (Ωt, γ/Ω).
pub fn cmd_sweep(c: &RunConfig) -> Result<CommandOutput> {
    let cfg = SurfaceConfig::resolve(c, 4.0 * PI, 41, Some(crate::verify::ORACLE_GAMMAS.to_vec()))?;
    let rows = cfg.evaluate(|s| {
        let r = ChannelReport::from_state(s)?;
        Ok(vec![
            r.probs.eg,
            r.probs.ge,
            r.probs.gg,
            r.probs.ee,
            r.bell_amplitude,
            r.bell_phase,
            r.concurrence,
            r.fmax,
            r.epr_fidelity,
            r.purity,
            average_teleport_fidelity(s),
        ])
    })?;
    let columns = [
        "omega_t",
        "gamma_over_omega",
        "p_eg",
        "p_ge",
        "p_gg",
        "p_ee",
        "bell_amplitude",
        "bell_phase",
        "concurrence",
        "fmax",
        "epr_fidelity",
        "purity",
        "protocol_fidelity",
    ]
    .map(String::from)
    .to_vec();
    Ok(CommandOutput {
        table: Table { columns, rows },
        config: json!(cfg),
        failures: Vec::new(),
    })
}

/// Relative tolerance between bisection and the closed-form threshold.
pub const THRESHOLD_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdConfig {
    pub k: Vec<u32>,
    #[serde(flatten)]
    pub eval: Evaluation,
}

/// Rows (k, Ωt_k, γ_max/Ω, bisected γ/Ω, relative error), each bisection
/// on F_max = 2/3 + 1e-9 at t_k.
pub fn cmd_threshold(c: &RunConfig) -> Result<CommandOutput> {
    let cfg = ThresholdConfig {
        k: c.k.clone().unwrap_or_else(|| (0..5).collect()),
        eval: Evaluation::from_config(c)?,
    };
    if cfg.k.is_empty() {
        return Err(bad("k: empty list"));
    }
    let rows = cfg
        .k
        .par_iter()
        .map(|&k| {
            let k = InteractionTimeIndex(k);
            let t = k.time(1.0);
            let formula = gamma_max(k, 1.0);
            let found = threshold_by_bisection(2.0 * formula, 1e-12, |g| {
                Ok(max_teleport_fidelity(&cfg.eval.state(&SystemParams::from_effective(1.0, g)?, t)?))
            })?;
            Ok(vec![k.0 as f64, t, formula, found, (found - formula).abs() / formula])
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let failures = rows
        .iter()
        .filter(|r| r[4].is_nan() || r[4] > THRESHOLD_REL_TOL)
        .map(|r| format!("k={}: bisection relative error {:.3e} exceeds {THRESHOLD_REL_TOL:e}", r[0], r[4]))
        .collect();
    let columns = ["k", "omega_t_k", "gamma_max_over_omega", "gamma_bisect_over_omega", "relative_error"]
        .map(String::from)
        .to_vec();
    Ok(CommandOutput {
        table: Table { columns, rows },
        config: json!(cfg),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub groups: Vec<Group>,
    #[serde(flatten)]
    pub options: VerifyOptions,
}

impl VerifyConfig {
    pub fn resolve(c: &RunConfig) -> Result<Self> {
        let groups = match &c.only {
            Some(names) if !names.is_empty() => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<Vec<Group>>>()?,
            _ => Group::ALL.to_vec(),
        };
        let defaults = VerifyOptions::default();
        Ok(Self {
            groups,
            options: VerifyOptions {
                n_max: c.n_max.unwrap_or(defaults.n_max),
                dt: check_dt(c.dt.unwrap_or(defaults.dt))?,
            },
        })
    }
}

pub fn cmd_verify(c: &RunConfig) -> Result<(VerifyConfig, VerifyReport)> {
    let cfg = VerifyConfig::resolve(c)?;
    let report = crate::verify::run(&cfg.groups, &cfg.options)?;
    Ok((cfg, report))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_report(cfg: &VerifyConfig, report: &VerifyReport, format: Format) -> String {
    let config = json!(cfg);
    match format {
        Format::Csv => {
            let mut s = format!("# cavqed verify {config}\n");
            s.push_str("group,check,computed,expected,tolerance,comparison,passed\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{:.16e},{:.16e},{:.16e},{},{}",
                    c.group,
                    csv_field(&c.name),
                    c.computed,
                    c.expected,
                    c.tolerance,
                    json!(c.comparison).as_str().unwrap_or_default(),
                    c.passed
                );
            }
            s
        }
        Format::Json => {
            let doc = json!({
                "command": "verify",
                "config": config,
                "passed": report.passed(),
                "checks": report.checks,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("finite report");
            s.push('\n');
            s
        }
    }
}

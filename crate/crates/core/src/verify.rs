//! Verification suite behind `cavqed verify`: every closed form is checked
//! against brute-force numerics, each check carrying its tolerance.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    closed_form_bell_amplitude, closed_form_concurrence_tk, closed_form_fmax, closed_form_joint_probs, epr_state, gamma_max,
    rho_exact, InteractionTimeIndex,
};
use crate::error::{Error, Result};
use crate::metrics::{
    average_teleport_fidelity, bell_fit, bell_signal, concurrence, joint_probabilities,
    max_teleport_fidelity,
};
use crate::model::{two_atom_projector, FockTruncation, LindbladGenerator, SystemParams, EE, EG, GG};
use crate::oracle::{evolve_matrix, integrate_effective, integrate_full, IntegratorConfig};
use crate::qmat::{
    expm, kron, trace_distance, ComplexMatrix, DensityMatrix, StateTolerance, C64,
};

/// γ/Ω values of the oracle grid.
pub const ORACLE_GAMMAS: [f64; 5] = [0.0, 0.05, 0.2, 0.4, 1.0];
/// Points on Ωt ∈ [0, 4π].
pub const ORACLE_GRID: usize = 200;
/// RK4 step in units of 1/Ω.
pub const ORACLE_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Oracle,
    Probabilities,
    Bell,
    Fidelity,
    Concurrence,
    Threshold,
    Entanglement,
    Dispersive,
    Protocol,
    Properties,
}

impl Group {
    pub const ALL: [Group; 10] = [
        Group::Oracle,
        Group::Probabilities,
        Group::Bell,
        Group::Fidelity,
        Group::Concurrence,
        Group::Threshold,
        Group::Entanglement,
        Group::Dispersive,
        Group::Protocol,
        Group::Properties,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Oracle => "oracle",
            Group::Probabilities => "probabilities",
            Group::Bell => "bell",
            Group::Fidelity => "fidelity",
            Group::Concurrence => "concurrence",
            Group::Threshold => "threshold",
            Group::Entanglement => "entanglement",
            Group::Dispersive => "dispersive",
            Group::Protocol => "protocol",
            Group::Properties => "properties",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown verification group '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |computed − expected| ≤ tolerance
    Within,
    /// |computed − expected| ≤ tolerance·|expected|
    Relative,
    /// computed ≤ expected + tolerance
    AtMost,
    /// computed ≥ expected − tolerance
    AtLeast,
    /// computed > expected
    Above,
    /// recorded only
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub group: Group,
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn new(
        group: Group,
        name: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let passed = match comparison {
            Comparison::Within => (computed - expected).abs() <= tolerance,
            Comparison::Relative => (computed - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtMost => computed <= expected + tolerance,
            Comparison::AtLeast => computed >= expected - tolerance,
            Comparison::Above => computed > expected,
            Comparison::Report => true,
        } && !computed.is_nan();
        Self {
            group,
            name: name.into(),
            computed,
            expected,
            tolerance,
            comparison,
            passed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::Within => "==",
            Comparison::Relative => "~=",
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Above => ">",
            Comparison::Report => "::",
        };
        write!(
            f,
            "{} [{}] {}: {:.10e} {} {:.10e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.group,
            self.name,
            self.computed,
            op,
            self.expected,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn group(&self, g: Group) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.group == g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Fock cutoff of the full-model runs.
    pub n_max: usize,
    /// RK4 step in units of 1/Ω (effective) or 1/λ (full).
    pub dt: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_max: 2,
            dt: ORACLE_DT,
        }
    }
}

/// Runs the selected groups in the order given.
pub fn run(groups: &[Group], opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for &g in groups {
        checks.extend(run_group(g, opts)?);
    }
    Ok(VerifyReport { checks })
}

pub fn run_group(group: Group, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match group {
        Group::Oracle => oracle_checks(opts),
        Group::Probabilities => probability_checks(),
        Group::Bell => bell_checks(),
        Group::Fidelity => fidelity_checks(),
        Group::Concurrence => concurrence_checks(),
        Group::Threshold => threshold_checks(),
        Group::Entanglement => entanglement_checks(),
        Group::Dispersive => dispersive_checks(opts),
        Group::Protocol => protocol_checks(),
        Group::Properties => property_checks(opts),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn oracle_grid() -> Vec<f64> {
    linspace(0.0, 4.0 * PI, ORACLE_GRID)
}

fn eg_state() -> DensityMatrix {
    DensityMatrix::two_qubit(two_atom_projector(EG)).expect("basis projector")
}

fn k_times(ks: &[u32]) -> Vec<(InteractionTimeIndex, f64)> {
    ks.iter()
        .map(|&k| {
            let k = InteractionTimeIndex(k);
            (k, k.time(1.0))
        })
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn oracle_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let g = Group::Oracle;
    let start = Instant::now();
    let grid = oracle_grid();
    let runs = ORACLE_GAMMAS
        .par_iter()
        .map(|&gamma| {
            let p = SystemParams::from_effective(1.0, gamma)?;
            let traj = integrate_effective(&eg_state(), &p, &grid, IntegratorConfig::rk4(opts.dt)?)?;
            let mut worst = 0.0f64;
            let mut ee = 0.0f64;
            for (t, s) in traj.iter() {
                worst = worst.max(trace_distance(s, &rho_exact(t, &p)?.rho)?);
                ee = ee.max(s.matrix()[(EE, EE)].norm());
            }
            Ok((gamma, worst, ee, *traj.stats()))
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = Vec::new();
    for (gamma, worst, ee, stats) in runs {
        out.push(Check::new(g, format!("gamma/omega={gamma}: max trace distance to closed form"), worst, 0.0, 1e-6, Comparison::AtMost));
        out.push(Check::new(g, format!("gamma/omega={gamma}: trace drift per unit omega*t"), stats.max_trace_drift / (4.0 * PI), 0.0, 1e-9, Comparison::AtMost));
        out.push(Check::new(g, format!("gamma/omega={gamma}: symmetrization correction per step"), stats.max_symmetrization, 0.0, 1e-12, Comparison::AtMost));
        out.push(Check::new(g, format!("gamma/omega={gamma}: |ee> population"), ee, 0.0, 1e-12, Comparison::AtMost));
    }
    out.push(Check::new(g, "runtime seconds", elapsed, 10.0, 0.0, Comparison::AtMost));
    Ok(out)
}

fn probability_checks() -> Result<Vec<Check>> {
    let g = Group::Probabilities;
    let mut out = Vec::new();
    for gamma in ORACLE_GAMMAS {
        let p = SystemParams::from_effective(1.0, gamma)?;
        let mut worst = 0.0f64;
        for t in oracle_grid() {
            let got = joint_probabilities(&rho_exact(t, &p)?.rho).as_array();
            let want = closed_form_joint_probs(t, gamma, 1.0).as_array();
            worst = worst.max(max_of(got.iter().zip(&want).map(|(a, b)| (a - b).abs())));
        }
        out.push(Check::new(g, format!("gamma/omega={gamma}: max deviation from closed forms"), worst, 0.0, 1e-10, Comparison::Within));
    }
    Ok(out)
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI { y + 2.0 * PI } else { y }
}

fn bell_checks() -> Result<Vec<Check>> {
    let g = Group::Bell;
    let mut out = Vec::new();
    let phis = linspace(0.0, 2.0 * PI, 64);
    for (k, t) in k_times(&[0, 1, 2]) {
        let mut phases = Vec::new();
        let mut amp_err = 0.0f64;
        let mut residual = 0.0f64;
        for gamma in ORACLE_GAMMAS {
            let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma)?)?.rho;
            let fit = bell_fit(&rho);
            amp_err = amp_err.max((fit.amplitude - closed_form_bell_amplitude(k, gamma, 1.0)).abs());
            residual = residual.max(max_of(phis.iter().map(|&phi| (bell_signal(&rho, phi) - fit.eval(phi)).abs())));
            phases.push(fit.phase);
        }
        let spread = max_of(phases.iter().map(|&ph| wrap_angle(ph - phases[0]).abs()));
        out.push(Check::new(g, format!("k={}: amplitude vs exp(-gamma(2k+1)pi/2omega)", k.0), amp_err, 0.0, 1e-8, Comparison::Within));
        out.push(Check::new(g, format!("k={}: phase offset spread across gamma", k.0), spread, 0.0, 1e-9, Comparison::AtMost));
        out.push(Check::new(g, format!("k={}: sinusoid residual", k.0), residual, 0.0, 1e-10, Comparison::AtMost));
        out.push(Check::new(g, format!("k={}: phase offset (rad)", k.0), phases[0], FRAC_PI_2, 0.0, Comparison::Report));
    }
    Ok(out)
}

/// 50 values of γ/Ω on [0, 2γ_max] for each k.
fn straddling_gammas(k: InteractionTimeIndex) -> Vec<f64> {
    linspace(0.0, 2.0 * gamma_max(k, 1.0), 50)
}

fn fidelity_checks() -> Result<Vec<Check>> {
    let g = Group::Fidelity;
    let mut out = Vec::new();
    for (k, t) in k_times(&[0, 1, 2]) {
        let mut worst = 0.0f64;
        for gamma in straddling_gammas(k) {
            let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma)?)?.rho;
            worst = worst.max((max_teleport_fidelity(&rho) - closed_form_fmax(k, gamma, 1.0)).abs());
        }
        out.push(Check::new(g, format!("k={}: F_max vs piecewise closed form (50 gammas)", k.0), worst, 0.0, 1e-8, Comparison::Within));
    }
    let k0 = InteractionTimeIndex(0);
    let rho = rho_exact(k0.time(1.0), &SystemParams::from_effective(1.0, 4f64.ln() / PI)?)?.rho;
    out.push(Check::new(g, "k=0, gamma/omega=ln4/pi: F_max", max_teleport_fidelity(&rho), 2.0 / 3.0, 1e-6, Comparison::Within));
    Ok(out)
}

fn concurrence_checks() -> Result<Vec<Check>> {
    let g = Group::Concurrence;
    let mut out = Vec::new();
    for (k, t) in k_times(&[0, 1, 2]) {
        let mut c_err = 0.0f64;
        let mut law_hi = 0.0f64;
        let mut law_lo = 0.0f64;
        for gamma in straddling_gammas(k) {
            let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma)?)?.rho;
            let c = concurrence(&rho)?;
            let f = max_teleport_fidelity(&rho);
            c_err = c_err.max((c - closed_form_concurrence_tk(k, gamma, 1.0)).abs());
            if c >= 0.5 {
                law_hi = law_hi.max((f - (1.0 + 2.0 * c) / 3.0).abs());
            } else {
                law_lo = law_lo.max((f - 2.0 / 3.0).abs());
            }
        }
        out.push(Check::new(g, format!("k={}: C vs exp(-gamma(2k+1)pi/2omega)", k.0), c_err, 0.0, 1e-8, Comparison::Within));
        out.push(Check::new(g, format!("k={}: F = 1/3 + 2C/3 where C >= 1/2", k.0), law_hi, 0.0, 1e-8, Comparison::Within));
        out.push(Check::new(g, format!("k={}: F = 2/3 where C < 1/2", k.0), law_lo, 0.0, 1e-8, Comparison::Within));
    }
    Ok(out)
}

/// Largest γ with `fidelity(γ) ≥ 2/3 + 1e-9`, by bisection on
/// [0, upper] down to an interval of `tol`·upper.
pub fn threshold_by_bisection(
    upper: f64,
    tol: f64,
    fidelity: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let target = 2.0 / 3.0 + 1e-9;
    let (mut lo, mut hi) = (0.0, upper);
    if fidelity(lo)? < target || fidelity(hi)? >= target {
        return Err(Error::InvalidParams(format!(
            "threshold not bracketed by [0, {upper}]"
        )));
    }
    while hi - lo > tol * upper {
        let mid = 0.5 * (lo + hi);
        if fidelity(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection on F_max of the closed-form state at t_k (Ω = 1).
pub fn closed_form_threshold(k: InteractionTimeIndex) -> Result<f64> {
    let t = k.time(1.0);
    threshold_by_bisection(2.0 * gamma_max(k, 1.0), 1e-12, |gamma| {
        Ok(max_teleport_fidelity(&rho_exact(t, &SystemParams::from_effective(1.0, gamma)?)?.rho))
    })
}

fn threshold_checks() -> Result<Vec<Check>> {
    let g = Group::Threshold;
    (0..5)
        .map(|k| {
            let k = InteractionTimeIndex(k);
            let found = closed_form_threshold(k)?;
            let want = 4f64.ln() / ((2 * k.0 + 1) as f64 * PI);
            Ok(Check::new(g, format!("k={}: bisected gamma_max/omega", k.0), found, want, 1e-6, Comparison::Relative))
        })
        .collect()
}

fn entanglement_checks() -> Result<Vec<Check>> {
    let g = Group::Entanglement;
    let k = InteractionTimeIndex(0);
    let rho = rho_exact(k.time(1.0), &SystemParams::from_effective(1.0, 0.6)?)?.rho;
    Ok(vec![
        Check::new(g, "k=0, gamma/omega=0.6: concurrence", concurrence(&rho)?, 0.15, 0.0, Comparison::Above),
        Check::new(g, "k=0, gamma/omega=0.6: F_max", max_teleport_fidelity(&rho), 2.0 / 3.0, 1e-8, Comparison::Within),
    ])
}

/// Largest trace distance between the reduced full-model trajectory and the
/// effective closed form over λt ∈ [0, 3π] (λ = 1, γ = 0, start |eg⟩).
pub fn dispersive_deviation(delta_over_lambda: f64, trunc: FockTruncation, dt: f64) -> Result<f64> {
    let p = SystemParams::new(1.0, delta_over_lambda, 0.0)?;
    let grid = linspace(0.0, 3.0 * PI, 301);
    let traj = integrate_full(&eg_state(), &p, trunc, &grid, IntegratorConfig::rk4(dt)?)?;
    let mut worst = 0.0f64;
    for (t, s) in traj.iter() {
        worst = worst.max(trace_distance(s, &rho_exact(t, &p)?.rho)?);
    }
    Ok(worst)
}

fn dispersive_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let g = Group::Dispersive;
    let trunc = FockTruncation::new(opts.n_max)?;
    let start = Instant::now();
    let devs = [10.0, 3.0]
        .par_iter()
        .map(|&d| dispersive_deviation(d, trunc, opts.dt))
        .collect::<Result<Vec<_>>>()?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok(vec![
        Check::new(g, "delta=10 lambda: max trace distance full vs effective", devs[0], 0.05, 0.0, Comparison::AtMost),
        Check::new(g, "delta=3 lambda: max deviation exceeds delta=10 lambda", devs[1], devs[0], 0.0, Comparison::Above),
        Check::new(g, "runtime seconds", elapsed, 60.0, 0.0, Comparison::AtMost),
    ])
}

fn protocol_checks() -> Result<Vec<Check>> {
    let g = Group::Protocol;
    let mut gap = f64::NEG_INFINITY;
    for gamma in ORACLE_GAMMAS {
        let p = SystemParams::from_effective(1.0, gamma)?;
        for t in linspace(0.0, 4.0 * PI, 50) {
            let rho = rho_exact(t, &p)?.rho;
            gap = gap.max(average_teleport_fidelity(&rho) - max_teleport_fidelity(&rho));
        }
    }
    let ground = DensityMatrix::two_qubit(two_atom_projector(GG))?;
    let mixed = DensityMatrix::maximally_mixed(vec![2, 2]);
    Ok(vec![
        Check::new(g, "EPR channel: average protocol fidelity", average_teleport_fidelity(&epr_state()), 1.0, 1e-10, Comparison::Within),
        Check::new(g, "grid states: average protocol fidelity - F_max", gap, 0.0, 1e-9, Comparison::AtMost),
        Check::new(g, "|gg> channel: average protocol fidelity", average_teleport_fidelity(&ground), 2.0 / 3.0, 1e-9, Comparison::AtMost),
        Check::new(g, "maximally mixed channel: average protocol fidelity", average_teleport_fidelity(&mixed), 0.5, 1e-12, Comparison::Within),
    ])
}

fn random_unitary(rng: &mut StdRng) -> ComplexMatrix {
    let mut r = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let a = ComplexMatrix::from_fn(2, |_, _| r());
    let h = a.hermitian_part();
    expm(&h.scale(C64::new(0.0, PI)))
}

/// G·G†/Tr with G a 4×rank matrix of uniform complex entries.
fn random_state(rng: &mut StdRng, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(4, |_, j| {
        if j < rank {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::two_qubit(m.scale_re(1.0 / tr).hermitian_part()).expect("Gram matrix is a state")
}

fn lu_defect(rng: &mut StdRng, rho: &DensityMatrix) -> Result<f64> {
    let u = kron(&random_unitary(rng), &random_unitary(rng));
    let moved = DensityMatrix::two_qubit(u.sandwich(rho.matrix()).hermitian_part())?;
    Ok((concurrence(rho)? - concurrence(&moved)?).abs())
}

/// Largest |C(ρ) − C((u₁⊗u₂)ρ(u₁⊗u₂)†)| over seeded random states of rank
/// 4, 3 and 2 and random local unitaries.
pub fn local_unitary_defect(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..trials {
        let rho = random_state(&mut rng, 4 - i % 3);
        worst = worst.max(lu_defect(&mut rng, &rho)?);
    }
    Ok(worst)
}

/// Same measurement on states of the channel family. These have λ₂ = 0
/// next to |gg⟩, where C responds like √ε to rounding in ρ_ee, so the
/// defect is of order 1e-8 whatever the algorithm.
pub fn local_unitary_defect_family(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let t = rng.gen_range(0.0..4.0 * PI);
        let gamma = rng.gen_range(0.0..1.0);
        let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma)?)?.rho;
        worst = worst.max(lu_defect(&mut rng, &rho)?);
    }
    Ok(worst)
}

/// Observed RK4 order: log₂ of successive error ratios at Ω = 1, γ = 0.2,
/// Ωt = 3, dt ∈ {0.1, 0.05, 0.025}; the smaller of the two estimates.
pub fn rk4_order() -> Result<f64> {
    let p = SystemParams::from_effective(1.0, 0.2)?;
    let gen = LindbladGenerator::effective(&p);
    let exact = rho_exact(3.0, &p)?.rho;
    let errs = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let rho = evolve_matrix(&gen, &two_atom_projector(EG), 3.0, IntegratorConfig::rk4(dt)?)?;
            Ok((&rho - exact.matrix()).max_abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(errs
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min))
}

fn property_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let g = Group::Properties;
    let grid = oracle_grid();
    let mut invalid = 0usize;
    let mut min_fmax = f64::INFINITY;
    for gamma in ORACLE_GAMMAS {
        let p = SystemParams::from_effective(1.0, gamma)?;
        let traj = integrate_effective(&eg_state(), &p, &grid, IntegratorConfig::rk4(opts.dt)?)?;
        for s in traj.states() {
            let ok = DensityMatrix::with_tolerance(s.matrix().clone(), vec![2, 2], StateTolerance::INTEGRATOR).is_ok();
            invalid += usize::from(!ok);
            min_fmax = min_fmax.min(max_teleport_fidelity(s));
        }
    }
    Ok(vec![
        Check::new(g, "trajectory states violating density-matrix invariants", invalid as f64, 0.0, 0.0, Comparison::Within),
        // F_max dips below 2/3 wherever e^{−2γt} ≈ ½ and sin 2Ωt ≈ 0
        Check::new(g, "min F_max over trajectory states", min_fmax, 2.0 / 3.0, 0.0, Comparison::Report),
        Check::new(g, "local-unitary invariance of concurrence (1000 trials)", local_unitary_defect(1000, 0x5eed)?, 0.0, 1e-9, Comparison::Within),
        Check::new(g, "local-unitary defect on channel-family states", local_unitary_defect_family(200, 0x5eed)?, 0.0, 0.0, Comparison::Report),
        Check::new(g, "measured RK4 convergence order", rk4_order()?, 3.9, 0.0, Comparison::AtLeast),
    ])
}

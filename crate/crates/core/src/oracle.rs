//! Brute-force propagation of the master equation, independent of the
//! closed-form solution: fixed-step RK4 on the density matrix, or repeated
//! application of the exact one-step propagator exp(L·dt).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    field_frame_hamiltonian, FockTruncation, LindbladGenerator, SystemParams, GG,
};
use crate::qmat::{
    expm, kron, partial_trace, trace_distance, ComplexMatrix, DensityMatrix, StateTolerance, C64,
};

/// Trace drift that aborts an integration.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;

/// Population of the highest Fock level that aborts a full-model run.
pub const MAX_EDGE_POPULATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    ExpmStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    dt: f64,
    method: Method,
}

impl IntegratorConfig {
    pub fn new(dt: f64, method: Method) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
        }
        Ok(Self { dt, method })
    }

    pub fn rk4(dt: f64) -> Result<Self> {
        Self::new(dt, Method::Rk4)
    }

    /// RK4 with dt = 1e-3/Ω.
    pub fn for_effective(p: &SystemParams) -> Self {
        Self {
            dt: 1e-3 / p.omega_eff(),
            method: Method::Rk4,
        }
    }

    /// RK4 with dt = 1e-3/λ.
    pub fn for_full(p: &SystemParams) -> Self {
        Self {
            dt: 1e-3 / p.lambda(),
            method: Method::Rk4,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn method(&self) -> Method {
        self.method
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub steps: usize,
    pub max_trace_drift: f64,
    /// Largest ‖ρ − (ρ+ρ†)/2‖_max removed after a step.
    pub max_symmetrization: f64,
    /// Largest population of |n_max⟩ (full model only).
    pub max_edge_population: f64,
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    stats: IntegrationStats,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn stats(&self) -> &IntegrationStats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(&self.states)
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    let first = *t_grid
        .first()
        .ok_or_else(|| Error::InvalidParams("empty time grid".into()))?;
    if first.is_nan() || first < 0.0 {
        return Err(Error::NegativeTime(first));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn axpy(y: &ComplexMatrix, a: f64, x: &ComplexMatrix) -> ComplexMatrix {
    y + &x.scale_re(a)
}

fn rk4_step(gen: &LindbladGenerator, t: f64, h: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let k1 = gen.rhs(t, rho);
    let k2 = gen.rhs(t + 0.5 * h, &axpy(rho, 0.5 * h, &k1));
    let k3 = gen.rhs(t + 0.5 * h, &axpy(rho, 0.5 * h, &k2));
    let k4 = gen.rhs(t + h, &axpy(rho, h, &k3));
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(2.0);
    axpy(rho, h / 6.0, &incr)
}

/// Steps `gen` from t = 0 through every grid time, calling `sample` at each.
fn propagate(
    gen: &LindbladGenerator,
    rho0: ComplexMatrix,
    t_grid: &[f64],
    cfg: IntegratorConfig,
    mut sample: impl FnMut(f64, &ComplexMatrix, &mut IntegrationStats) -> Result<()>,
) -> Result<IntegrationStats> {
    check_grid(t_grid)?;
    if cfg.method == Method::ExpmStep && gen.is_time_dependent() {
        return Err(Error::InvalidParams(
            "expm_step needs a time-independent generator".into(),
        ));
    }
    let superop = (cfg.method == Method::ExpmStep).then(|| {
        crate::model::liouvillian(&gen.hamiltonian(0.0), gen.gamma(), &gen.jump_operators())
    });
    let mut propagator: Option<(f64, ComplexMatrix)> = None;

    let mut stats = IntegrationStats::default();
    let mut rho = rho0;
    let mut t = 0.0;
    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            let n = ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for i in 0..n {
                let ti = t + i as f64 * h;
                let next = match &superop {
                    None => rk4_step(gen, ti, h, &rho),
                    Some(l) => {
                        let stale = propagator.as_ref().is_none_or(|(ph, _)| *ph != h);
                        if stale {
                            propagator = Some((h, expm(&l.scale_re(h))));
                        }
                        let p = &propagator.as_ref().expect("propagator cached").1;
                        ComplexMatrix::from_vector(p.apply(&rho.to_vector()))
                    }
                };
                let sym = next.hermitian_part();
                stats.max_symmetrization = stats.max_symmetrization.max((&next - &sym).max_abs());
                rho = sym;
                let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
                stats.max_trace_drift = stats.max_trace_drift.max(drift);
                if drift > MAX_TRACE_DRIFT {
                    return Err(Error::StepTooLarge { drift });
                }
            }
            stats.steps += n;
            t = target;
        }
        sample(target, &rho, &mut stats)?;
    }
    Ok(stats)
}

/// Integrates the effective two-atom master equation from `rho0`.
pub fn integrate_effective(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t_grid: &[f64],
    cfg: IntegratorConfig,
) -> Result<Trajectory> {
    integrate_with(&LindbladGenerator::effective(p), rho0, t_grid, cfg)
}

/// Integrates an arbitrary generator acting on a state of matching dimension.
pub fn integrate_with(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    cfg: IntegratorConfig,
) -> Result<Trajectory> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimMismatch {
            left: rho0.dim(),
            right: gen.dim(),
        });
    }
    let layout = rho0.layout().to_vec();
    let mut states = Vec::with_capacity(t_grid.len());
    let stats = propagate(gen, rho0.matrix().clone(), t_grid, cfg, |_, rho, _| {
        states.push(DensityMatrix::with_tolerance(
            rho.clone(),
            layout.clone(),
            StateTolerance::INTEGRATOR,
        )?);
        Ok(())
    })?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        stats,
    })
}

/// Propagated matrix at `t_end`, without validating it as a state.
///
/// Coarse steps leave ρ slightly outside the state space; this is what
/// step-size studies need.
pub fn evolve_matrix(
    gen: &LindbladGenerator,
    rho0: &ComplexMatrix,
    t_end: f64,
    cfg: IntegratorConfig,
) -> Result<ComplexMatrix> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimMismatch {
            left: rho0.dim(),
            right: gen.dim(),
        });
    }
    let mut out = None;
    propagate(gen, rho0.clone(), &[t_end], cfg, |_, rho, _| {
        out = Some(rho.clone());
        Ok(())
    })?;
    Ok(out.expect("one sample"))
}

/// Atoms ⊗ field states of the full model, in the interaction picture.
///
/// RK4 integrates the time-dependent Hamiltonian directly, sampling it at
/// the RK4 stage times. `expm_step` propagates in the frame co-rotating
/// with the field (where the generator is constant) and rotates each
/// sample back by e^{−iδt·a†a}.
pub fn propagate_full(
    atoms0: &DensityMatrix,
    p: &SystemParams,
    trunc: FockTruncation,
    t_grid: &[f64],
    cfg: IntegratorConfig,
) -> Result<(Vec<DensityMatrix>, IntegrationStats)> {
    if atoms0.dim() != 4 {
        return Err(Error::DimMismatch {
            left: atoms0.dim(),
            right: 4,
        });
    }
    let d = trunc.field_dim();
    let mut vacuum = ComplexMatrix::zeros(d);
    vacuum[(0, 0)] = C64::new(1.0, 0.0);
    let initial = kron(atoms0.matrix(), &vacuum);

    let gen = match cfg.method {
        Method::Rk4 => LindbladGenerator::full(p, trunc),
        Method::ExpmStep => LindbladGenerator::new(
            vec![(
                field_frame_hamiltonian(p, trunc),
                crate::model::HamiltonianCoeff::Constant,
            )],
            p.gamma(),
            &crate::model::decay_operators_full(trunc),
        ),
    };

    let layout = trunc.layout();
    let mut states = Vec::with_capacity(t_grid.len());
    let stats = propagate(&gen, initial, t_grid, cfg, |t, rho, stats| {
        let rho = match cfg.method {
            Method::Rk4 => rho.clone(),
            Method::ExpmStep => {
                let phases: Vec<C64> = (0..4 * d)
                    .map(|i| C64::from_polar(1.0, -p.delta() * t * (i % d) as f64))
                    .collect();
                ComplexMatrix::from_diag(&phases).sandwich(rho)
            }
        };
        let edge: f64 = (0..4).map(|a| rho[(a * d + d - 1, a * d + d - 1)].re).sum();
        stats.max_edge_population = stats.max_edge_population.max(edge);
        if edge > MAX_EDGE_POPULATION {
            return Err(Error::TruncationLeak { population: edge });
        }
        states.push(DensityMatrix::with_tolerance(
            rho,
            layout.clone(),
            StateTolerance::INTEGRATOR,
        )?);
        Ok(())
    })?;
    Ok((states, stats))
}

/// Full time-dependent model with the field starting in vacuum; returns the
/// reduced two-atom states.
pub fn integrate_full(
    atoms0: &DensityMatrix,
    p: &SystemParams,
    trunc: FockTruncation,
    t_grid: &[f64],
    cfg: IntegratorConfig,
) -> Result<Trajectory> {
    let (full, stats) = propagate_full(atoms0, p, trunc, t_grid, cfg)?;
    let states = full
        .iter()
        .map(|rho| partial_trace(rho, &[0, 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        stats,
    })
}

/// Outcome of [`stationary_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub t_end: f64,
    pub distance: f64,
    pub bound: f64,
    pub within_bound: bool,
    /// Distance to |gg⟩ never increased along the sampled trajectory.
    pub monotone: bool,
}

impl StationaryReport {
    pub fn passed(&self) -> bool {
        self.within_bound && self.monotone
    }
}

/// Integrates |eg⟩ until 2γt = 10 and checks that the state has relaxed to
/// |gg⟩ within e^{−2γt} + 1e−6.
pub fn stationary_check(p: &SystemParams, cfg: IntegratorConfig) -> Result<StationaryReport> {
    if p.gamma() <= 0.0 {
        return Err(Error::InvalidParams(
            "stationary check requires gamma > 0".into(),
        ));
    }
    let t_end = 10.0 / (2.0 * p.gamma());
    let samples = 64;
    let grid: Vec<f64> = (1..=samples)
        .map(|i| t_end * i as f64 / samples as f64)
        .collect();
    let rho0 = DensityMatrix::two_qubit(crate::model::two_atom_projector(crate::model::EG))?;
    let traj = integrate_effective(&rho0, p, &grid, cfg)?;
    let ground = DensityMatrix::two_qubit(crate::model::two_atom_projector(GG))?;
    let distances = traj
        .states()
        .iter()
        .map(|s| trace_distance(s, &ground))
        .collect::<Result<Vec<_>>>()?;
    let distance = *distances.last().expect("non-empty grid");
    let bound = (-2.0 * p.gamma() * t_end).exp() + 1e-6;
    Ok(StationaryReport {
        t_end,
        distance,
        bound,
        within_bound: distance <= bound,
        monotone: distances.windows(2).all(|w| w[1] <= w[0] + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::rho_exact;
    use crate::model::{two_atom_projector, EG, GE};

    fn start(index: usize) -> DensityMatrix {
        DensityMatrix::two_qubit(two_atom_projector(index)).unwrap()
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.0).is_err());
        assert!(IntegratorConfig::new(-1.0, Method::ExpmStep).is_err());
        let p = SystemParams::new(1.0, 4.0, 0.0).unwrap();
        assert_eq!(IntegratorConfig::for_effective(&p).dt(), 4e-3);
        assert_eq!(IntegratorConfig::for_full(&p).dt(), 1e-3);
    }

    #[test]
    fn bad_grids_rejected() {
        let p = SystemParams::from_effective(1.0, 0.1).unwrap();
        let cfg = IntegratorConfig::for_effective(&p);
        assert!(integrate_effective(&start(EG), &p, &[], cfg).is_err());
        assert!(integrate_effective(&start(EG), &p, &[0.0, 0.5, 0.5], cfg).is_err());
        assert!(matches!(
            integrate_effective(&start(EG), &p, &[-0.1, 0.5], cfg),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn ground_state_stays_put() {
        let p = SystemParams::from_effective(1.0, 0.3).unwrap();
        let traj = integrate_effective(&start(GG), &p, &grid(3.0, 7), IntegratorConfig::for_effective(&p)).unwrap();
        for s in traj.states() {
            assert!((s.matrix() - &two_atom_projector(GG)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn lossless_populations_oscillate() {
        let p = SystemParams::from_effective(1.0, 0.0).unwrap();
        let traj = integrate_effective(&start(EG), &p, &grid(3.0, 13), IntegratorConfig::for_effective(&p)).unwrap();
        for (t, s) in traj.iter() {
            let d = s.populations();
            assert!((d[EG] - t.cos().powi(2)).abs() < 1e-11, "t={t}");
            assert!((d[GE] - t.sin().powi(2)).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn rk4_and_expm_step_agree_with_closed_form() {
        let p = SystemParams::from_effective(1.3, 0.25).unwrap();
        let times = grid(4.0, 21);
        for method in [Method::Rk4, Method::ExpmStep] {
            let cfg = IntegratorConfig::new(1e-3 / 1.3, method).unwrap();
            let traj = integrate_effective(&start(EG), &p, &times, cfg).unwrap();
            for (t, s) in traj.iter() {
                let exact = rho_exact(t, &p).unwrap();
                assert!(trace_distance(s, &exact.rho).unwrap() < 1e-9, "{method:?} t={t}");
                assert!(s.matrix()[(0, 0)].norm() <= 1e-12);
            }
            assert!(traj.stats().max_symmetrization <= 1e-12);
        }
    }

    #[test]
    fn rk4_error_shrinks_with_order_four() {
        let p = SystemParams::from_effective(1.0, 0.2).unwrap();
        let t_end = 3.0;
        let exact = rho_exact(t_end, &p).unwrap().rho;
        let gen = LindbladGenerator::effective(&p);
        let err = |dt: f64| {
            let rho = evolve_matrix(&gen, &two_atom_projector(EG), t_end, IntegratorConfig::rk4(dt).unwrap()).unwrap();
            (&rho - exact.matrix()).max_abs()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn full_model_rk4_matches_field_frame_expm() {
        let p = SystemParams::new(1.0, 5.0, 0.05).unwrap();
        let trunc = FockTruncation::default();
        let times = grid(2.0, 9);
        let a = integrate_full(&start(EG), &p, trunc, &times, IntegratorConfig::rk4(1e-3).unwrap()).unwrap();
        let b = integrate_full(&start(EG), &p, trunc, &times, IntegratorConfig::new(1e-2, Method::ExpmStep).unwrap()).unwrap();
        for (x, y) in a.states().iter().zip(b.states()) {
            assert!(trace_distance(x, y).unwrap() < 1e-9);
        }
        let (fa, _) = propagate_full(&start(EG), &p, trunc, &times, IntegratorConfig::rk4(1e-3).unwrap()).unwrap();
        let (fb, _) = propagate_full(&start(EG), &p, trunc, &times, IntegratorConfig::new(1e-2, Method::ExpmStep).unwrap()).unwrap();
        for (x, y) in fa.iter().zip(&fb) {
            assert!((x.matrix() - y.matrix()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn full_model_is_pure_without_decay() {
        let p = SystemParams::new(1.0, 6.0, 0.0).unwrap();
        let (full, stats) = propagate_full(&start(EG), &p, FockTruncation::default(), &grid(3.0, 11), IntegratorConfig::rk4(1e-3).unwrap()).unwrap();
        for s in &full {
            assert!((s.purity() - 1.0).abs() < 1e-9);
        }
        // one excitation never reaches |2⟩
        assert!(stats.max_edge_population < 1e-20);
    }

    #[test]
    fn stationary_relaxation() {
        let p = SystemParams::from_effective(1.0, 0.5).unwrap();
        let report = stationary_check(&p, IntegratorConfig::for_effective(&p)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.bound <= 5.5e-5);
        let lossless = SystemParams::from_effective(1.0, 0.0).unwrap();
        assert!(stationary_check(&lossless, IntegratorConfig::for_effective(&lossless)).is_err());
    }
}

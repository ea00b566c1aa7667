//! The oracle comparison must notice a wrong decay rate.

use std::f64::consts::PI;

use cavqed::analytic::rho_exact;
use cavqed::model::{decay_operators, effective_hamiltonian, two_atom_projector, HamiltonianCoeff, LindbladGenerator, SystemParams, EG};
use cavqed::oracle::{integrate_with, IntegratorConfig};
use cavqed::qmat::{trace_distance, DensityMatrix};
use cavqed::verify::linspace;

fn max_distance(gen: &LindbladGenerator, p: &SystemParams) -> f64 {
    let grid = linspace(0.0, 4.0 * PI, 50);
    let rho0 = DensityMatrix::two_qubit(two_atom_projector(EG)).unwrap();
    let traj = integrate_with(gen, &rho0, &grid, IntegratorConfig::rk4(1e-3).unwrap()).unwrap();
    traj.iter()
        .map(|(t, s)| trace_distance(s, &rho_exact(t, p).unwrap().rho).unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn correct_generator_passes() {
    let p = SystemParams::from_effective(1.0, 0.2).unwrap();
    let gen = LindbladGenerator::new(vec![(effective_hamiltonian(&p), HamiltonianCoeff::Constant)], 0.2, &decay_operators());
    assert!(max_distance(&gen, &p) <= 1e-6);
}

#[test]
fn quartered_decay_rate_is_caught() {
    let p = SystemParams::from_effective(1.0, 0.2).unwrap();
    let gen = LindbladGenerator::new(vec![(effective_hamiltonian(&p), HamiltonianCoeff::Constant)], 0.05, &decay_operators());
    assert!(max_distance(&gen, &p) > 1e-2);
}

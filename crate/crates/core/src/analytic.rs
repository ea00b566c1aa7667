//! Exact solution of the lossy two-atom dynamics starting from `|eg⟩`.
//!
//! The master equation is solved in a rotated frame ρ̃ = T†ρT with
//! T = U·V: U rotates the single-excitation pair {|eg⟩, |ge⟩} by π/4 so
//! that the effective Hamiltonian becomes diagonal, and V removes the
//! remaining phase evolution of atom 1. Because the decay term is invariant
//! under both, ρ̃ evolves by spontaneous emission alone:
//!
//! ρ̃(t) = exp[(e^{2γt} − 1)J] · exp(2γt·L) · ρ̃(0)
//!
//! with J = Σᵢ σᵢ·σᵢ† (jump) and L = −½ Σᵢ {σᵢ†σᵢ, ·} (no-jump decay).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::JointProbabilities;
use crate::model::{basis_ket, decay_operators, SystemParams, EE, EG, GE, GG, TWO_QUBITS};
use crate::qmat::{ComplexMatrix, DensityMatrix, C64};

/// Index k of the interaction times t_k = (2k+1)π/(4Ω) at which the
/// lossless dynamics produces the maximally entangled state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InteractionTimeIndex(pub u32);

impl InteractionTimeIndex {
    /// 2k + 1
    pub fn odd_factor(self) -> f64 {
        (2 * self.0 + 1) as f64
    }

    pub fn time(self, omega: f64) -> f64 {
        self.odd_factor() * PI / (4.0 * omega)
    }
}

/// Closed-form state in the original frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormState {
    pub t: f64,
    pub gamma: f64,
    pub omega: f64,
    pub rho: DensityMatrix,
}

/// exp[−(π/4)(σ₁†σ₂ − σ₁σ₂†)], a π/4 rotation of the {|eg⟩, |ge⟩} pair.
pub fn transform_u() -> ComplexMatrix {
    let (c, s) = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let mut u = ComplexMatrix::identity(4);
    u[(EG, EG)] = C64::new(c, 0.0);
    u[(GE, GE)] = C64::new(c, 0.0);
    u[(EG, GE)] = C64::new(-s, 0.0);
    u[(GE, EG)] = C64::new(s, 0.0);
    u
}

/// exp[−iΩ(σ₁†σ₁ + ½σ₁ᶻ)t]. The generator is 3/2 when atom 1 is excited and
/// −1/2 when it is in the ground state.
pub fn transform_v(t: f64, omega: f64) -> ComplexMatrix {
    let excited = C64::from_polar(1.0, -1.5 * omega * t);
    let ground = C64::from_polar(1.0, 0.5 * omega * t);
    ComplexMatrix::from_diag(&[excited, excited, ground, ground])
}

/// T = U·V(t)
pub fn transform_t(t: f64, omega: f64) -> ComplexMatrix {
    transform_u().matmul(&transform_v(t, omega))
}

/// J: ρ ↦ Σᵢ σᵢ ρ σᵢ†
pub fn jump_map(rho: &ComplexMatrix) -> ComplexMatrix {
    decay_operators()
        .iter()
        .fold(ComplexMatrix::zeros(4), |acc, s| &acc + &s.sandwich(rho))
}

/// L: ρ ↦ −½ Σᵢ {σᵢ†σᵢ, ρ}
pub fn decay_map(rho: &ComplexMatrix) -> ComplexMatrix {
    decay_operators().iter().fold(ComplexMatrix::zeros(4), |acc, s| {
        &acc - &s.adjoint().matmul(s).anticommutator(rho).scale_re(0.5)
    })
}

/// Number of excited atoms in a two-atom basis state.
fn excitations(index: usize) -> f64 {
    match index {
        EE => 2.0,
        EG | GE => 1.0,
        _ => 0.0,
    }
}

/// exp(2γt·L) acting on a two-atom operator. L is diagonal on outer
/// products: L(|a⟩⟨b|) = −½(n_a + n_b)|a⟩⟨b|.
pub fn no_jump_evolution(rho: &ComplexMatrix, t: f64, gamma: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |a, b| {
        rho[(a, b)] * (-gamma * t * (excitations(a) + excitations(b))).exp()
    })
}

/// exp(x·J) on two-atom operators. J lowers the excitation number of both
/// sides by one, so J³ = 0 and the series has three terms.
pub fn jump_exponential(rho: &ComplexMatrix, x: f64) -> ComplexMatrix {
    let j1 = jump_map(rho);
    let j2 = jump_map(&j1);
    &(rho + &j1.scale_re(x)) + &j2.scale_re(0.5 * x * x)
}

/// Evolves a rotated-frame operator by the decay superoperators:
/// exp[(e^{2γt}−1)J]·exp(2γt·L)·ρ̃₀.
pub fn propagate_rotated_frame(rho_tilde0: &ComplexMatrix, t: f64, gamma: f64) -> ComplexMatrix {
    let x = (2.0 * gamma * t).exp_m1();
    jump_exponential(&no_jump_evolution(rho_tilde0, t, gamma), x)
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// ½(|eg⟩ − |ge⟩)(⟨eg| − ⟨ge|), the rotated-frame image of |eg⟩⟨eg|.
fn rho_tilde_initial() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(EG, EG)] = C64::new(0.5, 0.0);
    m[(GE, GE)] = C64::new(0.5, 0.0);
    m[(EG, GE)] = C64::new(-0.5, 0.0);
    m[(GE, EG)] = C64::new(-0.5, 0.0);
    m
}

/// Rotated-frame state at time t, written out entry by entry:
/// ½e^{−2γt}(|eg⟩−|ge⟩)(⟨eg|−⟨ge|) + (1 − e^{−2γt})|gg⟩⟨gg|.
pub fn rho_tilde(t: f64, gamma: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let p = (-2.0 * gamma * t).exp();
    let mut m = rho_tilde_initial().scale_re(p);
    m[(GG, GG)] = C64::new(-(-2.0 * gamma * t).exp_m1(), 0.0);
    DensityMatrix::new(m, TWO_QUBITS.to_vec())
}

/// Same state as [`rho_tilde`], obtained by applying the superoperator
/// exponentials to ρ̃(0) = T(0)†|eg⟩⟨eg|T(0).
pub fn rho_tilde_superoperator(t: f64, gamma: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let t0 = transform_t(0.0, 1.0);
    let initial = t0.adjoint().matmul(&crate::model::two_atom_projector(EG)).matmul(&t0);
    DensityMatrix::new(propagate_rotated_frame(&initial, t, gamma), TWO_QUBITS.to_vec())
}

/// Exact state ρ(t) = T ρ̃(t) T† for the atoms prepared in |eg⟩.
pub fn rho_exact(t: f64, p: &SystemParams) -> Result<ClosedFormState> {
    let omega = p.omega_eff();
    let tilde = rho_tilde(t, p.gamma())?;
    let tt = transform_t(t, omega);
    let rho = tt.sandwich(tilde.matrix()).hermitian_part();
    Ok(ClosedFormState {
        t,
        gamma: p.gamma(),
        omega,
        rho: DensityMatrix::new(rho, TWO_QUBITS.to_vec())?,
    })
}

/// e^{−iΩt}[cos(Ωt)|eg⟩ − i sin(Ωt)|ge⟩], the lossless evolution of |eg⟩.
pub fn ideal_ket(t: f64, omega: f64) -> Vec<C64> {
    let phase = C64::from_polar(1.0, -omega * t);
    let mut v = vec![C64::new(0.0, 0.0); 4];
    v[EG] = phase * (omega * t).cos();
    v[GE] = phase * C64::new(0.0, -(omega * t).sin());
    v
}

/// (|eg⟩ − i|ge⟩)/√2
pub fn epr_ket() -> Vec<C64> {
    let mut v = basis_ket(4, EG);
    v[EG] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[GE] = C64::new(0.0, -FRAC_1_SQRT_2);
    v
}

pub fn epr_state() -> DensityMatrix {
    DensityMatrix::from_ket(&epr_ket(), TWO_QUBITS.to_vec()).expect("normalized ket")
}

/// (e^{−2γt}cos²Ωt, e^{−2γt}sin²Ωt, 1 − e^{−2γt}, 0) for t ≥ 0.
pub fn closed_form_joint_probs(t: f64, gamma: f64, omega: f64) -> JointProbabilities {
    let survive = (-2.0 * gamma * t).exp();
    let (s, c) = (omega * t).sin_cos();
    JointProbabilities {
        eg: survive * c * c,
        ge: survive * s * s,
        gg: -(-2.0 * gamma * t).exp_m1(),
        ee: 0.0,
    }
}

/// e^{−γ(2k+1)π/(2Ω)}, which is also e^{−2γt_k}.
fn decay_at(k: InteractionTimeIndex, gamma: f64, omega: f64) -> f64 {
    (-gamma * k.odd_factor() * PI / (2.0 * omega)).exp()
}

/// Amplitude of the Bell signal β(φ) at t_k.
pub fn closed_form_bell_amplitude(k: InteractionTimeIndex, gamma: f64, omega: f64) -> f64 {
    decay_at(k, gamma, omega)
}

/// Maximum teleportation fidelity at t_k:
/// 1/3 + (2/3)e^{−γ(2k+1)π/(2Ω)} up to the threshold decay rate, 2/3 above.
pub fn closed_form_fmax(k: InteractionTimeIndex, gamma: f64, omega: f64) -> f64 {
    if gamma <= gamma_max(k, omega) {
        1.0 / 3.0 + 2.0 / 3.0 * decay_at(k, gamma, omega)
    } else {
        2.0 / 3.0
    }
}

/// Concurrence at t_k.
pub fn closed_form_concurrence_tk(k: InteractionTimeIndex, gamma: f64, omega: f64) -> f64 {
    decay_at(k, gamma, omega)
}

/// Largest decay rate for which the state at t_k still beats the classical
/// teleportation fidelity 2/3: Ω·ln4/((2k+1)π).
pub fn gamma_max(k: InteractionTimeIndex, omega: f64) -> f64 {
    omega * 4f64.ln() / (k.odd_factor() * PI)
}

/// Rotation angle of U, exposed for tests that rebuild U from its generator.
pub const U_ANGLE: f64 = FRAC_PI_4;

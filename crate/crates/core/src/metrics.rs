//! Observables and channel-quality measures for two-atom states.

use serde::{Deserialize, Serialize};

use crate::analytic::epr_ket;
use crate::error::{Error, Result};
use crate::model::{atom_operator, single_atom, Atom, AtomOp, EE, EG, GE, GG};
use crate::qmat::{
    complex_singular_values, general_eigenvalues, herm_eig, kron, singular_values, ComplexMatrix,
    DensityMatrix, C64,
};

/// Largest imaginary part tolerated in the spectrum of ρ·ρ_sf.
pub const SPECTRUM_IMAG_TOL: f64 = 1e-9;

/// Bell amplitude below which the fitted phase is reported as 0.
pub const BELL_PHASE_FLOOR: f64 = 1e-9;

/// Joint detection probabilities of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub eg: f64,
    pub ge: f64,
    pub gg: f64,
    pub ee: f64,
}

impl JointProbabilities {
    pub fn total(&self) -> f64 {
        self.eg + self.ge + self.gg + self.ee
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.eg, self.ge, self.gg, self.ee]
    }
}

/// Diagonal of ρ in the standard basis.
pub fn joint_probabilities(rho: &DensityMatrix) -> JointProbabilities {
    let d = rho.populations();
    JointProbabilities {
        eg: d[EG],
        ge: d[GE],
        gg: d[GG],
        ee: d[EE],
    }
}

/// t_nm = Tr[ρ(σ₁ⁿ ⊗ σ₂ᵐ)] with n, m running over x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

impl CorrelationMatrix {
    pub fn singular_values(&self) -> [f64; 3] {
        singular_values(&self.0)
    }
}

const PAULI_XYZ: [AtomOp; 3] = [AtomOp::X, AtomOp::Y, AtomOp::Z];

pub fn correlation_matrix(rho: &DensityMatrix) -> CorrelationMatrix {
    let mut t = [[0.0; 3]; 3];
    for (n, &a) in PAULI_XYZ.iter().enumerate() {
        for (m, &b) in PAULI_XYZ.iter().enumerate() {
            let op = kron(&single_atom(a), &single_atom(b));
            t[n][m] = rho.expectation(&op).re;
        }
    }
    CorrelationMatrix(t)
}

/// β(φ) = ⟨σ₁ˣ (cos φ σ₂ˣ + sin φ σ₂ʸ)⟩
pub fn bell_signal(rho: &DensityMatrix, phi: f64) -> f64 {
    let x1 = atom_operator(Atom::One, AtomOp::X);
    let sigma_phi = &atom_operator(Atom::Two, AtomOp::X).scale_re(phi.cos())
        + &atom_operator(Atom::Two, AtomOp::Y).scale_re(phi.sin());
    rho.expectation(&x1.matmul(&sigma_phi)).re
}

/// β(φ) = amplitude · cos(φ + phase)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellFit {
    pub amplitude: f64,
    pub phase: f64,
}

impl BellFit {
    pub fn eval(&self, phi: f64) -> f64 {
        self.amplitude * (phi + self.phase).cos()
    }
}

/// Exact sinusoid parameters from β(0) and β(π/2).
pub fn bell_fit(rho: &DensityMatrix) -> BellFit {
    let b0 = bell_signal(rho, 0.0);
    let b90 = bell_signal(rho, std::f64::consts::FRAC_PI_2);
    let amplitude = b0.hypot(b90);
    // the phase of a vanishing signal is noise; pin it
    let phase = if amplitude > BELL_PHASE_FLOOR { (-b90).atan2(b0) } else { 0.0 };
    BellFit { amplitude, phase }
}

fn sigma_y_y() -> ComplexMatrix {
    kron(&single_atom(AtomOp::Y), &single_atom(AtomOp::Y))
}

/// ρ_sf = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ), conjugation in the standard basis.
pub fn spin_flip(rho: &impl AsRef<ComplexMatrix>) -> ComplexMatrix {
    let yy = sigma_y_y();
    yy.matmul(&rho.as_ref().conj()).matmul(&yy)
}

/// Wootters concurrence max{0, λ₁ − λ₂ − λ₃ − λ₄}.
///
/// The λᵢ (square roots of the eigenvalues of ρ·ρ_sf) are obtained as the
/// singular values of τ = Wᵀ(σʸ⊗σʸ)W for ρ = WW†, which resolves vanishing
/// λᵢ to ε rather than √ε. [`concurrence_spectral`] is the direct route.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let eig = herm_eig(rho.matrix())?;
    let n = rho.dim();
    let w = ComplexMatrix::from_fn(n, |i, j| eig.vectors[(i, j)] * eig.values[j].max(0.0).sqrt());
    let tau = w.transpose().matmul(&sigma_y_y()).matmul(&w);
    Ok(wootters(complex_singular_values(&tau)))
}

/// Concurrence from the eigenvalues of the non-Hermitian ρ·ρ_sf, real parts
/// clamped at zero before the square root. Vanishing λᵢ carry errors of
/// order √ε ≈ 1.5e-8.
pub fn concurrence_spectral(rho: &DensityMatrix) -> Result<f64> {
    let product = rho.matrix().matmul(&spin_flip(rho));
    let eigs = general_eigenvalues(&product)?;
    let worst_imag = eigs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst_imag > SPECTRUM_IMAG_TOL {
        return Err(Error::NonRealSpectrum(worst_imag));
    }
    let mut roots: Vec<f64> = eigs.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(wootters(roots))
}

/// max{0, λ₁ − λ₂ − λ₃ − λ₄} for descending λ.
fn wootters(lambda: Vec<f64>) -> f64 {
    let c = lambda[0] - lambda[1..].iter().sum::<f64>();
    c.clamp(0.0, 1.0)
}

/// Optimal teleportation fidelity ½(1 + ⅓·Tr√(TᵀT)).
pub fn max_teleport_fidelity(rho: &DensityMatrix) -> f64 {
    let s = correlation_matrix(rho).singular_values();
    0.5 * (1.0 + (s[0] + s[1] + s[2]) / 3.0)
}

/// ⟨ψ_EPR|ρ|ψ_EPR⟩
pub fn epr_fidelity(rho: &DensityMatrix) -> f64 {
    rho.expectation_ket(&epr_ket())
}

/// Pure single-qubit input a|e⟩ + b|g⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnknownQubit {
    a: C64,
    b: C64,
}

impl UnknownQubit {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "qubit amplitudes have norm² {norm}"
            )));
        }
        Ok(Self { a, b })
    }

    /// cos(θ/2)|e⟩ + e^{iφ} sin(θ/2)|g⟩
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self {
            a: C64::new((theta / 2.0).cos(), 0.0),
            b: C64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    /// Eigenstates of σˣ, σʸ and σᶻ.
    pub fn pauli_eigenstates() -> [Self; 6] {
        use std::f64::consts::{FRAC_PI_2, PI};
        [
            Self::from_bloch(FRAC_PI_2, 0.0),
            Self::from_bloch(FRAC_PI_2, PI),
            Self::from_bloch(FRAC_PI_2, FRAC_PI_2),
            Self::from_bloch(FRAC_PI_2, -FRAC_PI_2),
            Self::from_bloch(0.0, 0.0),
            Self::from_bloch(PI, 0.0),
        ]
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn ket(&self) -> [C64; 2] {
        [self.a, self.b]
    }
}

const PAULIS: [Option<AtomOp>; 4] = [None, Some(AtomOp::X), Some(AtomOp::Y), Some(AtomOp::Z)];

fn pauli_or_identity(op: Option<AtomOp>) -> ComplexMatrix {
    op.map_or_else(|| ComplexMatrix::identity(2), single_atom)
}

/// Fidelity ⟨ψ|ρ_out|ψ⟩ of the standard teleportation protocol over a
/// two-atom channel (atom 1 with the sender, atom 2 with the receiver).
///
/// The sender measures the input and her atom in the basis
/// (P_j ⊗ 1)|ψ_EPR⟩, P_j ∈ {1, σˣ, σʸ, σᶻ}; the receiver then applies
/// P_j·σᶻ, which undoes the outcome exactly for the channel |ψ_EPR⟩.
/// Outcomes are weighted by their actual probabilities.
pub fn teleport_fidelity(channel: &DensityMatrix, input: &UnknownQubit) -> f64 {
    let psi = input.ket();
    let epr = epr_ket();
    let z = single_atom(AtomOp::Z);
    let rho = channel.matrix();
    let mut fidelity = 0.0;

    for op in PAULIS {
        let p = pauli_or_identity(op);
        // measurement vector on (input, sender atom)
        let m = kron(&p, &ComplexMatrix::identity(2)).apply(&epr);
        // ⟨m| on (input, sender) contracted with |ψ⟩ gives the map
        // w[a] = Σ_c conj(m[c, a]) ψ[c] on the sender atom.
        let w: Vec<C64> = (0..2)
            .map(|a| (0..2).map(|c| m[2 * c + a].conj() * psi[c]).sum())
            .collect();
        // receiver's unnormalized state: Σ_{a,a'} w[a] ρ[(a,b),(a',b')] conj(w[a'])
        let bob = ComplexMatrix::from_fn(2, |b, bp| {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..2 {
                for ap in 0..2 {
                    acc += w[a] * rho[(2 * a + b, 2 * ap + bp)] * w[ap].conj();
                }
            }
            acc
        });
        let correction = pauli_or_identity(op).matmul(&z);
        let out = correction.sandwich(&bob);
        fidelity += (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| psi[i].conj() * out[(i, j)] * psi[j])
            .sum::<C64>()
            .re;
    }
    fidelity
}

/// Protocol fidelity averaged over the six Pauli eigenstates, which equals
/// the average over all pure inputs.
pub fn average_teleport_fidelity(channel: &DensityMatrix) -> f64 {
    let states = UnknownQubit::pauli_eigenstates();
    states
        .iter()
        .map(|s| teleport_fidelity(channel, s))
        .sum::<f64>()
        / states.len() as f64
}

/// Derived quantities for one two-atom state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub probs: JointProbabilities,
    pub bell_amplitude: f64,
    pub bell_phase: f64,
    pub concurrence: f64,
    pub fmax: f64,
    pub epr_fidelity: f64,
    pub purity: f64,
}

impl ChannelReport {
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let fit = bell_fit(rho);
        Ok(Self {
            probs: joint_probabilities(rho),
            bell_amplitude: fit.amplitude,
            bell_phase: fit.phase,
            concurrence: concurrence(rho)?,
            fmax: max_teleport_fidelity(rho),
            epr_fidelity: epr_fidelity(rho),
            purity: rho.purity(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{epr_state, rho_exact, InteractionTimeIndex};
    use crate::model::{two_atom_projector, SystemParams};

    fn gg() -> DensityMatrix {
        DensityMatrix::two_qubit(two_atom_projector(GG)).unwrap()
    }

    fn state_t0(gamma: f64) -> DensityMatrix {
        let p = SystemParams::from_effective(1.0, gamma).unwrap();
        rho_exact(InteractionTimeIndex(0).time(1.0), &p).unwrap().rho
    }

    // e^{-0.1π}, frozen from an arbitrary-precision evaluation
    const P02: f64 = 0.730_402_691_048_645_6;

    #[test]
    fn joint_probability_cases() {
        let e = joint_probabilities(&epr_state());
        assert!((e.eg - 0.5).abs() < 1e-15 && (e.ge - 0.5).abs() < 1e-15);
        assert_eq!(joint_probabilities(&gg()).as_array(), [0.0, 0.0, 1.0, 0.0]);
        let q = joint_probabilities(&state_t0(0.2));
        assert!((q.eg - P02 / 2.0).abs() < 1e-12);
        assert!((q.gg - (1.0 - P02)).abs() < 1e-12);
    }

    #[test]
    fn bell_signal_vanishes_without_coherence() {
        let mix = DensityMatrix::two_qubit(
            (&two_atom_projector(EG) + &two_atom_projector(GE)).scale_re(0.5),
        )
        .unwrap();
        for i in 0..16 {
            let phi = i as f64 * 0.4;
            assert!(bell_signal(&mix, phi).abs() < 1e-15);
            assert!(bell_signal(&gg(), phi).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_fit_of_decayed_epr() {
        let rho = state_t0(0.2);
        let fit = bell_fit(&rho);
        assert!((fit.amplitude - P02).abs() < 1e-12);
        for i in 0..32 {
            let phi = i as f64 * std::f64::consts::PI / 16.0;
            assert!((fit.eval(phi) - bell_signal(&rho, phi)).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_flip_cases() {
        let flipped = spin_flip(&gg());
        assert!((&flipped - &two_atom_projector(EE)).max_abs() < 1e-15);
        let epr = epr_state();
        let sf = spin_flip(&epr);
        let overlap = epr.expectation(&sf).re;
        assert!((overlap - 1.0).abs() < 1e-14);
        let rho = state_t0(0.3);
        let back = spin_flip(&spin_flip(&rho));
        assert!((&back - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn concurrence_cases() {
        assert!((concurrence(&epr_state()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(concurrence(&gg()).unwrap(), 0.0);
        assert!((concurrence(&state_t0(0.2)).unwrap() - P02).abs() < 1e-10);
        // Werner state with visibility v: C = max(0, (3v − 1)/2)
        let mixed = ComplexMatrix::identity(4).scale_re(0.25);
        for v in [0.2, 0.5, 0.9] {
            let w = &epr_state().matrix().scale_re(v) + &mixed.scale_re(1.0 - v);
            let w = DensityMatrix::two_qubit(w).unwrap();
            let want = ((3.0 * v - 1.0) / 2.0f64).max(0.0);
            assert!((concurrence(&w).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn concurrence_routes_agree() {
        for gamma in [0.0, 0.1, 0.4, 1.0] {
            for t in [0.0, 0.3, std::f64::consts::FRAC_PI_4, 2.0, 5.5] {
                let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma).unwrap()).unwrap().rho;
                let a = concurrence(&rho).unwrap();
                let b = concurrence_spectral(&rho).unwrap();
                assert!((a - b).abs() < 1e-7, "t={t} gamma={gamma}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn correlation_matrix_cases() {
        let t = correlation_matrix(&gg()).0;
        assert_eq!(t, [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let eg = DensityMatrix::two_qubit(two_atom_projector(EG)).unwrap();
        assert_eq!(correlation_matrix(&eg).0[2][2], -1.0);
        let s = correlation_matrix(&epr_state()).singular_values();
        for v in s {
            assert!((v - 1.0).abs() < 1e-14);
        }
        // p·EPR + (1−p)·gg has singular values (p, p, |1−2p|)
        let s = correlation_matrix(&state_t0(0.2)).singular_values();
        assert!((s[0] - P02).abs() < 1e-12 && (s[1] - P02).abs() < 1e-12);
        assert!((s[2] - (2.0 * P02 - 1.0).abs()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        assert!((max_teleport_fidelity(&epr_state()) - 1.0).abs() < 1e-14);
        assert!((max_teleport_fidelity(&gg()) - 2.0 / 3.0).abs() < 1e-15);
        let f = max_teleport_fidelity(&state_t0(0.2));
        assert!((f - 0.820_268_460_699_097_1).abs() < 1e-12);
        assert!((epr_fidelity(&epr_state()) - 1.0).abs() < 1e-15);
        assert_eq!(epr_fidelity(&gg()), 0.0);
        assert!((epr_fidelity(&state_t0(0.2)) - P02).abs() < 1e-12);
    }

    #[test]
    fn unknown_qubit_validation() {
        assert!(UnknownQubit::new(C64::new(1.0, 0.0), C64::new(0.1, 0.0)).is_err());
        let q = UnknownQubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        assert_eq!(q.ket(), [C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        for s in UnknownQubit::pauli_eigenstates() {
            assert!((s.a().norm_sqr() + s.b().norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_channel_teleports_every_input() {
        let epr = epr_state();
        for i in 0..12 {
            for j in 0..12 {
                let q = UnknownQubit::from_bloch(i as f64 * 0.29, j as f64 * 0.53);
                assert!((teleport_fidelity(&epr, &q) - 1.0).abs() < 1e-13);
            }
        }
        assert!((average_teleport_fidelity(&epr) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn maximally_mixed_channel_gives_one_half() {
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]);
        for i in 0..8 {
            let q = UnknownQubit::from_bloch(i as f64 * 0.41, 1.0 - i as f64 * 0.3);
            assert!((teleport_fidelity(&mixed, &q) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn ground_channel_is_classical() {
        let f = average_teleport_fidelity(&gg());
        assert!(f <= 2.0 / 3.0 + 1e-9);
        let excited = UnknownQubit::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(teleport_fidelity(&gg(), &excited).abs() < 1e-15);
    }

    #[test]
    fn report_bundles_metrics() {
        let r = ChannelReport::from_state(&state_t0(0.2)).unwrap();
        assert!((r.probs.total() - 1.0).abs() < 1e-12);
        assert!((r.concurrence - P02).abs() < 1e-10);
        assert!((r.fmax - (1.0 / 3.0 + 2.0 / 3.0 * P02)).abs() < 1e-12);
        assert!((r.bell_phase + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}

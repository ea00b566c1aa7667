//! Operators, Hamiltonians and the Lindblad generator for two two-level
//! atoms in a detuned cavity.
//!
//! Basis conventions used everywhere in the crate:
//!
//! * single atom: `|e⟩ = (1, 0)ᵀ`, `|g⟩ = (0, 1)ᵀ`
//! * two atoms: `|ee⟩, |eg⟩, |ge⟩, |gg⟩` (atom 1 is the leading factor)
//! * atoms and field: `atom 1 ⊗ atom 2 ⊗ field`, Fock states `|0⟩ … |n_max⟩`
//! * `σ = |g⟩⟨e|` lowers, `σʸ = [[0, −i], [i, 0]]`, `σᶻ = |e⟩⟨e| − |g⟩⟨g|`
//!
//! ħ = 1 throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, SparseMatrix, C64};

pub const EXCITED: usize = 0;
pub const GROUND: usize = 1;

/// Two-atom basis indices.
pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

pub const TWO_QUBITS: [usize; 2] = [2, 2];

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Unit vector `index` of a `dim`-dimensional space.
pub fn basis_ket(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); dim];
    v[index] = c(1.0);
    v
}

/// `|ab⟩⟨ab|` for a two-atom basis index.
pub fn two_atom_projector(index: usize) -> ComplexMatrix {
    ComplexMatrix::projector(&basis_ket(4, index))
}

/// Coupling λ, detuning δ and decay rate γ, all in the same frequency unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    lambda: f64,
    delta: f64,
    gamma: f64,
}

impl SystemParams {
    pub fn new(lambda: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda must be > 0, got {lambda}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!("delta must be > 0, got {delta}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self { lambda, delta, gamma })
    }

    /// Parameters for effective-model work where only Ω and γ matter.
    /// Sets λ = δ = Ω so that λ²/δ = Ω.
    pub fn from_effective(omega: f64, gamma: f64) -> Result<Self> {
        Self::new(omega, omega, gamma)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Ω = λ²/δ
    pub fn omega_eff(&self) -> f64 {
        self.lambda * self.lambda / self.delta
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.lambda, self.delta, gamma)
    }
}

/// Highest Fock state kept in full-model runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams(
                "n_max must be at least 1 for full-model runs".into(),
            ));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Layout `[2, 2, n_max + 1]`.
    pub fn layout(&self) -> Vec<usize> {
        vec![2, 2, self.field_dim()]
    }

    pub fn total_dim(&self) -> usize {
        4 * self.field_dim()
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self { n_max: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomOp {
    Lower,
    Raise,
    X,
    Y,
    Z,
}

/// Single-atom operator in the `(|e⟩, |g⟩)` basis.
pub fn single_atom(kind: AtomOp) -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let o = c(0.0);
    match kind {
        AtomOp::Lower => ComplexMatrix::from_rows([[o, o], [c(1.0), o]]),
        AtomOp::Raise => ComplexMatrix::from_rows([[o, c(1.0)], [o, o]]),
        AtomOp::X => ComplexMatrix::from_rows([[o, c(1.0)], [c(1.0), o]]),
        AtomOp::Y => ComplexMatrix::from_rows([[o, -i], [i, o]]),
        AtomOp::Z => ComplexMatrix::from_rows([[c(1.0), o], [o, c(-1.0)]]),
    }
}

/// Single-atom operator embedded in the two-atom space.
pub fn atom_operator(which: Atom, kind: AtomOp) -> ComplexMatrix {
    let op = single_atom(kind);
    let id = ComplexMatrix::identity(2);
    match which {
        Atom::One => kron(&op, &id),
        Atom::Two => kron(&id, &op),
    }
}

/// Field annihilation operator on `|0⟩ … |n_max⟩`.
pub fn annihilation(trunc: FockTruncation) -> ComplexMatrix {
    let d = trunc.field_dim();
    ComplexMatrix::from_fn(d, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt())
        } else {
            c(0.0)
        }
    })
}

/// Two-atom operator lifted onto atoms ⊗ field.
pub fn lift_atoms(op: &ComplexMatrix, trunc: FockTruncation) -> ComplexMatrix {
    kron(op, &ComplexMatrix::identity(trunc.field_dim()))
}

/// Field operator lifted onto atoms ⊗ field.
pub fn lift_field(op: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(4), op)
}

/// N = σ₁ᶻ + σ₂ᶻ
pub fn excitation_number() -> ComplexMatrix {
    &atom_operator(Atom::One, AtomOp::Z) + &atom_operator(Atom::Two, AtomOp::Z)
}

/// σ₁ᶻ + σ₂ᶻ + 2a†a on atoms ⊗ field.
pub fn total_excitation(trunc: FockTruncation) -> ComplexMatrix {
    let a = annihilation(trunc);
    let n_photon = a.adjoint().matmul(&a);
    &lift_atoms(&excitation_number(), trunc) + &lift_field(&n_photon).scale_re(2.0)
}

/// Ω(σ₁†σ₁ + σ₂†σ₂ + σ₁†σ₂ + σ₁σ₂†)
pub fn effective_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    let s1 = atom_operator(Atom::One, AtomOp::Lower);
    let s2 = atom_operator(Atom::Two, AtomOp::Lower);
    let (s1d, s2d) = (s1.adjoint(), s2.adjoint());
    let h = &(&s1d.matmul(&s1) + &s2d.matmul(&s2)) + &(&s1d.matmul(&s2) + &s1.matmul(&s2d));
    h.scale_re(p.omega_eff())
}

/// λ·a†(σ₁ + σ₂) on atoms ⊗ field: the photon-emitting half of the
/// interaction-picture coupling.
pub fn emission_coupling(p: &SystemParams, trunc: FockTruncation) -> ComplexMatrix {
    let a = annihilation(trunc);
    let lowering = &atom_operator(Atom::One, AtomOp::Lower) + &atom_operator(Atom::Two, AtomOp::Lower);
    kron(&lowering, &a.adjoint()).scale_re(p.lambda())
}

/// λ Σⱼ (e^{−iδt} a†σⱼ + e^{iδt} a σⱼ†), truncated at n_max.
pub fn full_hamiltonian(p: &SystemParams, t: f64, trunc: FockTruncation) -> ComplexMatrix {
    let emit = emission_coupling(p, trunc);
    let phase = C64::from_polar(1.0, -p.delta() * t);
    &emit.scale(phase) + &emit.adjoint().scale(phase.conj())
}

/// The interaction-picture Hamiltonian seen from a frame co-rotating with
/// the field, λ Σⱼ (a†σⱼ + a σⱼ†) − δ a†a. Time independent; atomic
/// reduced states coincide with those of [`full_hamiltonian`].
pub fn field_frame_hamiltonian(p: &SystemParams, trunc: FockTruncation) -> ComplexMatrix {
    let emit = emission_coupling(p, trunc);
    let a = annihilation(trunc);
    let n_photon = lift_field(&a.adjoint().matmul(&a));
    &(&emit + &emit.adjoint()) - &n_photon.scale_re(p.delta())
}

/// Jump operators σ₁, σ₂ on the two-atom space.
pub fn decay_operators() -> Vec<ComplexMatrix> {
    vec![
        atom_operator(Atom::One, AtomOp::Lower),
        atom_operator(Atom::Two, AtomOp::Lower),
    ]
}

/// Jump operators σ₁ ⊗ 1, σ₂ ⊗ 1 on atoms ⊗ field.
pub fn decay_operators_full(trunc: FockTruncation) -> Vec<ComplexMatrix> {
    decay_operators()
        .iter()
        .map(|s| lift_atoms(s, trunc))
        .collect()
}

/// −i[H, ρ] + 2γ Σᵢ (σᵢ ρ σᵢ† − ½{σᵢ†σᵢ, ρ})
///
/// The 2γ prefactor makes single-atom populations decay as e^{−2γt}.
pub fn lindblad_rhs(
    rho: &impl AsRef<ComplexMatrix>,
    h: &ComplexMatrix,
    gamma: f64,
    jumps: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let rho = rho.as_ref();
    let n = rho.dim();
    for m in std::iter::once(h).chain(jumps) {
        if m.dim() != n {
            return Err(Error::DimMismatch {
                left: n,
                right: m.dim(),
            });
        }
    }
    let mut out = h.commutator(rho).scale(C64::new(0.0, -1.0));
    for l in jumps {
        let ldl = l.adjoint().matmul(l);
        let d = &l.sandwich(rho) - &ldl.anticommutator(rho).scale_re(0.5);
        out = &out + &d.scale_re(2.0 * gamma);
    }
    Ok(out)
}

/// Liouvillian superoperator acting on row-major vec(ρ), so that
/// vec(dρ/dt) = L·vec(ρ).
pub fn liouvillian(h: &ComplexMatrix, gamma: f64, jumps: &[ComplexMatrix]) -> ComplexMatrix {
    let n = h.dim();
    let id = ComplexMatrix::identity(n);
    // vec(AXB) = (A ⊗ Bᵀ) vec(X)
    let mut l = (&kron(h, &id) - &kron(&id, &h.transpose())).scale(C64::new(0.0, -1.0));
    for j in jumps {
        let ldl = j.adjoint().matmul(j);
        let d = &(&kron(j, &j.conj()) - &kron(&ldl, &id).scale_re(0.5))
            - &kron(&id, &ldl.transpose()).scale_re(0.5);
        l = &l + &d.scale_re(2.0 * gamma);
    }
    l
}

/// Lindblad generator with sparse operators for repeated evaluation.
///
/// The Hamiltonian is `H(t) = Σ_k f_k(t)·H_k` with scalar coefficient
/// functions, which covers both the static effective model and the
/// two-phase time dependence of the full model.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    terms: Vec<(SparseMatrix, HamiltonianCoeff)>,
    jumps: Vec<(SparseMatrix, SparseMatrix, SparseMatrix)>,
    rate: f64,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianCoeff {
    Constant,
    /// e^{i·frequency·t}
    Phase(f64),
}

impl HamiltonianCoeff {
    fn at(self, t: f64) -> C64 {
        match self {
            Self::Constant => c(1.0),
            Self::Phase(w) => C64::from_polar(1.0, w * t),
        }
    }
}

impl LindbladGenerator {
    pub fn new(terms: Vec<(ComplexMatrix, HamiltonianCoeff)>, gamma: f64, jumps: &[ComplexMatrix]) -> Self {
        let dim = terms.first().map(|t| t.0.dim()).or(jumps.first().map(|j| j.dim())).unwrap_or(0);
        let terms = terms
            .iter()
            .map(|(m, f)| (SparseMatrix::from_dense(m), *f))
            .collect();
        let jumps = jumps
            .iter()
            .map(|l| {
                let ldl = l.adjoint().matmul(l);
                (
                    SparseMatrix::from_dense(l),
                    SparseMatrix::from_dense(&l.adjoint()),
                    SparseMatrix::from_dense(&ldl),
                )
            })
            .collect();
        Self {
            terms,
            jumps,
            rate: 2.0 * gamma,
            dim,
        }
    }

    /// Effective two-atom model: H_eff with decay on both atoms.
    pub fn effective(p: &SystemParams) -> Self {
        Self::new(
            vec![(effective_hamiltonian(p), HamiltonianCoeff::Constant)],
            p.gamma(),
            &decay_operators(),
        )
    }

    /// Full time-dependent model on atoms ⊗ field.
    pub fn full(p: &SystemParams, trunc: FockTruncation) -> Self {
        let emit = emission_coupling(p, trunc);
        Self::new(
            vec![
                (emit.adjoint(), HamiltonianCoeff::Phase(p.delta())),
                (emit, HamiltonianCoeff::Phase(-p.delta())),
            ],
            p.gamma(),
            &decay_operators_full(trunc),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_dependent(&self) -> bool {
        self.terms
            .iter()
            .any(|(_, f)| matches!(f, HamiltonianCoeff::Phase(w) if *w != 0.0))
    }

    pub fn hamiltonian(&self, t: f64) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.dim);
        for (m, f) in &self.terms {
            h = &h + &m.to_dense().scale(f.at(t));
        }
        h
    }

    pub fn jump_operators(&self) -> Vec<ComplexMatrix> {
        self.jumps.iter().map(|(l, _, _)| l.to_dense()).collect()
    }

    pub fn gamma(&self) -> f64 {
        self.rate / 2.0
    }

    pub fn rhs(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        let minus_i = C64::new(0.0, -1.0);
        for (m, f) in &self.terms {
            let coeff = f.at(t) * minus_i;
            m.left_mul_acc(rho, coeff, &mut out);
            m.right_mul_acc(rho, -coeff, &mut out);
        }
        if self.rate != 0.0 {
            let r = c(self.rate);
            let half = c(-0.5 * self.rate);
            for (l, ld, ldl) in &self.jumps {
                let l_rho = l.left_mul(rho);
                ld.right_mul_acc(&l_rho, r, &mut out);
                ldl.left_mul_acc(rho, half, &mut out);
                ldl.right_mul_acc(rho, half, &mut out);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::DensityMatrix;

    fn params() -> SystemParams {
        SystemParams::new(1.0, 4.0, 0.1).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(0.0, 1.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, -1.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, -0.1).is_err());
        let p = SystemParams::new(2.0, 8.0, 0.0).unwrap();
        assert_eq!(p.omega_eff(), 0.5);
        assert!(FockTruncation::new(0).is_err());
        assert_eq!(FockTruncation::default().n_max(), 2);
    }

    #[test]
    fn lowering_on_atom_one() {
        let out = atom_operator(Atom::One, AtomOp::Lower).apply(&basis_ket(4, EG));
        assert_eq!(out, basis_ket(4, GG));
    }

    #[test]
    fn raising_on_atom_two() {
        let r2 = atom_operator(Atom::Two, AtomOp::Raise);
        assert!(r2.apply(&basis_ket(4, EE)).iter().all(|z| z.norm() == 0.0));
        assert_eq!(r2.apply(&basis_ket(4, GG)), basis_ket(4, GE));
    }

    #[test]
    fn z_on_atom_one_diagonal() {
        let z = atom_operator(Atom::One, AtomOp::Z);
        let d: Vec<f64> = z.diagonal().iter().map(|v| v.re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn excitation_number_eigenvalues() {
        let n = excitation_number();
        assert_eq!(n.apply(&basis_ket(4, EE))[EE], c(2.0));
        assert!(n.apply(&basis_ket(4, EG)).iter().all(|z| z.norm() == 0.0));
        assert_eq!(n.apply(&basis_ket(4, GG))[GG], c(-2.0));
    }

    #[test]
    fn effective_hamiltonian_elements() {
        let p = params();
        let h = effective_hamiltonian(&p);
        let w = p.omega_eff();
        assert_eq!(h[(EG, GE)], c(w));
        assert_eq!(h[(GE, EG)], c(w));
        assert_eq!(h[(GG, GG)], c(0.0));
        assert_eq!(h[(EE, EE)], c(2.0 * w));
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(h.commutator(&excitation_number()).max_abs() <= 1e-12);
    }

    #[test]
    fn full_hamiltonian_structure() {
        let p = params();
        let trunc = FockTruncation::default();
        let d = trunc.field_dim();
        let h0 = full_hamiltonian(&p, 0.0, trunc);
        // |gg;1⟩ ← |eg;0⟩
        assert!((h0[(GG * d + 1, EG * d)] - c(p.lambda())).norm() < 1e-15);
        assert_eq!(h0[(EE * d, EE * d)], c(0.0));
        let ntot = total_excitation(trunc);
        for &t in &[0.0, 0.37, 2.9] {
            let h = full_hamiltonian(&p, t, trunc);
            assert!(h.hermiticity_defect() < 1e-15);
            // conserves excitation except where a† would leave the truncated space
            let comm = h.commutator(&ntot);
            for i in 0..h.dim() {
                for j in 0..h.dim() {
                    if h[(i, j)].norm() > 0.0 {
                        assert!(comm[(i, j)].norm() < 1e-12, "({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn ground_state_is_stationary() {
        let p = params();
        let rho = two_atom_projector(GG);
        let out = lindblad_rhs(&rho, &effective_hamiltonian(&p), p.gamma(), &decay_operators()).unwrap();
        assert!(out.max_abs() < 1e-15);
    }

    #[test]
    fn excited_population_decays_at_two_gamma() {
        let gamma = 0.3;
        let rho = two_atom_projector(EG);
        let out = lindblad_rhs(&rho, &ComplexMatrix::zeros(4), gamma, &decay_operators()).unwrap();
        assert!((out[(EG, EG)] - c(-2.0 * gamma)).norm() < 1e-15);
        assert!((out[(GG, GG)] - c(2.0 * gamma)).norm() < 1e-15);
    }

    #[test]
    fn lindblad_rhs_dim_mismatch() {
        let rho = DensityMatrix::maximally_mixed(vec![2]);
        assert!(matches!(
            lindblad_rhs(&rho, &effective_hamiltonian(&params()), 0.1, &decay_operators()),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn liouvillian_matches_rhs() {
        let p = params();
        let h = effective_hamiltonian(&p);
        let jumps = decay_operators();
        let rho = ComplexMatrix::from_fn(4, |i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let direct = lindblad_rhs(&rho, &h, p.gamma(), &jumps).unwrap();
        let l = liouvillian(&h, p.gamma(), &jumps);
        let via = ComplexMatrix::from_vector(l.apply(&rho.to_vector()));
        assert!((&direct - &via).max_abs() < 1e-14);
    }

    #[test]
    fn generator_matches_dense_rhs() {
        let p = params();
        let trunc = FockTruncation::default();
        let gen = LindbladGenerator::full(&p, trunc);
        assert!(gen.is_time_dependent());
        let n = trunc.total_dim();
        let rho = ComplexMatrix::from_fn(n, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64, ((i + j) % 3) as f64 - 1.0));
        let t = 0.813;
        let dense = lindblad_rhs(
            &rho,
            &full_hamiltonian(&p, t, trunc),
            p.gamma(),
            &decay_operators_full(trunc),
        )
        .unwrap();
        assert!((&gen.rhs(t, &rho) - &dense).max_abs() < 1e-12);

        let eff = LindbladGenerator::effective(&p);
        assert!(!eff.is_time_dependent());
        let rho4 = two_atom_projector(EG);
        let dense4 = lindblad_rhs(&rho4, &effective_hamiltonian(&p), p.gamma(), &decay_operators()).unwrap();
        assert!((&eff.rhs(0.0, &rho4) - &dense4).max_abs() < 1e-15);
    }
}

use std::f64::consts::PI;

use proptest::prelude::*;

use cavqed::analytic::rho_exact;
use cavqed::metrics::{bell_fit, bell_signal, concurrence, correlation_matrix, max_teleport_fidelity};
use cavqed::model::{decay_operators, effective_hamiltonian, lindblad_rhs, SystemParams};
use cavqed::qmat::{
    complex_singular_values, expm, general_eigenvalues, herm_eig, kron, partial_trace, ComplexMatrix,
    DensityMatrix, C64,
};

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
        .prop_map(|v| ComplexMatrix::from_row_major(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim).prop_map(|m| m.hermitian_part())
}

fn unitary(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(dim).prop_map(|h| expm(&h.scale(C64::new(0.0, PI))))
}

/// G·G†/Tr G·G† for G of the given rank.
fn state_of_rank(rank: usize) -> impl Strategy<Value = DensityMatrix> {
    matrix(4).prop_map(move |g| {
        let g = ComplexMatrix::from_fn(4, |i, j| if j < rank { g[(i, j)] } else { C64::new(0.0, 0.0) });
        let m = g.matmul(&g.adjoint());
        let tr = m.trace().re;
        DensityMatrix::two_qubit(m.scale_re(1.0 / tr).hermitian_part()).unwrap()
    })
}

fn state() -> impl Strategy<Value = DensityMatrix> {
    (1usize..=4).prop_flat_map(state_of_rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(3)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!((&left - &right).max_abs() < 1e-14);
    }

    #[test]
    fn kron_is_multiplicative(a in matrix(2), b in matrix(2), c in matrix(2), d in matrix(2)) {
        let left = kron(&a, &b).matmul(&kron(&c, &d));
        let right = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!((&left - &right).max_abs() < 1e-13);
    }

    #[test]
    fn herm_eig_reconstructs(h in hermitian(4)) {
        let e = herm_eig(&h).unwrap();
        prop_assert!((&e.reconstruct() - &h).max_abs() < 1e-12);
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        prop_assert!((&vv - &ComplexMatrix::identity(4)).max_abs() < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn general_eigenvalues_agree_on_hermitian_input(h in hermitian(4)) {
        let mut general: Vec<f64> = general_eigenvalues(&h).unwrap().iter().map(|z| z.re).collect();
        general.sort_by(|a, b| b.total_cmp(a));
        let herm = herm_eig(&h).unwrap().values;
        for (g, e) in general.iter().zip(&herm) {
            prop_assert!((g - e).abs() < 1e-9, "{general:?} vs {herm:?}");
        }
    }

    #[test]
    fn singular_values_match_gram_spectrum(m in matrix(4)) {
        let s = complex_singular_values(&m);
        let gram = herm_eig(&m.adjoint().matmul(&m)).unwrap().values;
        for (x, g) in s.iter().zip(&gram) {
            prop_assert!((x * x - g).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_singular_values_carry_frobenius_norm(rho in state()) {
        let t = correlation_matrix(&rho);
        let s = t.singular_values();
        let frob: f64 = t.0.iter().flatten().map(|x| x * x).sum();
        prop_assert!((s.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_is_linear(a in state(), b in state(), p in 0.0..1.0f64) {
        let mix = DensityMatrix::two_qubit((&a.matrix().scale_re(p) + &b.matrix().scale_re(1.0 - p)).hermitian_part()).unwrap();
        for keep in [[0usize], [1]] {
            let lhs = partial_trace(&mix, &keep).unwrap();
            let ra = partial_trace(&a, &keep).unwrap();
            let rb = partial_trace(&b, &keep).unwrap();
            let rhs = &ra.matrix().scale_re(p) + &rb.matrix().scale_re(1.0 - p);
            prop_assert!((lhs.matrix() - &rhs).max_abs() < 1e-14);
        }
    }

    #[test]
    fn lindblad_rhs_is_traceless_and_hermitian(rho in state(), omega in 0.1..3.0f64, gamma in 0.0..2.0f64) {
        let p = SystemParams::from_effective(omega, gamma).unwrap();
        let d = lindblad_rhs(&rho, &effective_hamiltonian(&p), gamma, &decay_operators()).unwrap();
        prop_assert!(d.trace().norm() < 1e-13);
        prop_assert!(d.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(rho in state(), u in unitary(2), v in unitary(2)) {
        let w = kron(&u, &v);
        let moved = DensityMatrix::two_qubit(w.sandwich(rho.matrix()).hermitian_part()).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn concurrence_and_fidelity_ranges(rho in state()) {
        let c = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        let f = max_teleport_fidelity(&rho);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn bell_signal_is_a_sinusoid(rho in state(), phi in 0.0..2.0 * PI) {
        let fit = bell_fit(&rho);
        prop_assert!((bell_signal(&rho, phi) - fit.eval(phi)).abs() < 1e-12);
    }

    #[test]
    fn channel_family_stays_in_state_space(t in 0.0..20.0f64, gamma in 0.0..2.0f64) {
        let rho = rho_exact(t, &SystemParams::from_effective(1.0, gamma).unwrap()).unwrap().rho;
        prop_assert!(herm_eig(rho.matrix()).unwrap().min_value() > -1e-14);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }
}

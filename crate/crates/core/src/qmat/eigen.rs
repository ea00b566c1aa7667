//! Eigen-solvers for small dense matrices.
//!
//! Hermitian problems use cyclic complex Jacobi rotations; general
//! (non-normal) problems use Householder reduction to upper Hessenberg form
//! followed by single-shift QR with Wilkinson shifts. Singular values come
//! from one-sided (Hestenes) Jacobi, which keeps small singular values
//! accurate to ε·‖A‖ instead of √ε.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Hermiticity tolerance, scaled by max(1, ‖M‖_max).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// QR iterations allowed per deflated eigenvalue.
pub const QR_ITERATION_BUDGET: usize = 200;

const JACOBI_MAX_SWEEPS: usize = 100;
const SVD_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column i is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V·diag(λ)·V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.vectors
            .matmul(&ComplexMatrix::from_diag(&d))
            .matmul(&self.vectors.adjoint())
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigen-decomposition of a Hermitian matrix.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(m.hermitian_part()))
}

/// Cyclic Jacobi on an exactly Hermitian input.
pub(crate) fn jacobi(mut a: ComplexMatrix) -> HermitianEigen {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Remove the phase of a_pq, then a real rotation.
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = D·P with D = diag(1, conj(phase)), P = [[c, s], [-s, c]]
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;
                rotate(&mut a, &mut v, p, q, [jpp, jpq, jqp, jqq]);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, pairs[j].1)]);
    HermitianEigen { values, vectors }
}

/// A ← J†·A·J, V ← V·J for a unitary J acting on coordinates p, q.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, j: [C64; 4]) {
    let n = a.dim();
    let [jpp, jpq, jqp, jqq] = j;
    for i in 0..n {
        let (x, y) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = x * jpp + y * jqp;
        a[(i, q)] = x * jpq + y * jqq;
        let (x, y) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = x * jpp + y * jqp;
        v[(i, q)] = x * jpq + y * jqq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Eigenvalues of a general complex matrix (dim ≤ 8). Order unspecified.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let mut h = hessenberg(m);
    let mut eigs = Vec::with_capacity(h.dim());
    let mut hi = h.dim();
    let mut iter = 0usize;
    let eps = f64::EPSILON;
    let norm = m.max_abs();

    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Locate the start of the unreduced trailing block.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            // relative to ‖A‖ as well, or defective zero eigenvalues never split
            if sub <= eps * diag.max(norm) {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > QR_ITERATION_BUDGET {
            return Err(Error::NoConvergence {
                iterations: QR_ITERATION_BUDGET,
            });
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi - 1, hi - 1)] + C64::new(h[(hi - 1, hi - 2)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on the active window [lo, hi) using Givens rotations.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in lo..hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..hi {
            let (x, y) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

/// (c, s) with c real such that [[c, s], [-s*, c]]·[x; y] = [r; 0].
fn givens(x: C64, y: C64) -> (f64, C64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← P·H with P = I − 2vv† on rows k+1..n
        for j in 0..n {
            let dot: C64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= v[i - k - 1] * dot * 2.0;
            }
        }
        // H ← H·P on columns k+1..n
        for i in 0..n {
            let dot: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j - k - 1].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

/// Singular values of a real 3×3 matrix, descending.
pub fn singular_values(t: &[[f64; 3]; 3]) -> [f64; 3] {
    let s = complex_singular_values(&ComplexMatrix::from_real_rows(*t));
    [s[0], s[1], s[2]]
}

/// Singular values of a square complex matrix, descending, by one-sided
/// Jacobi: columns are rotated pairwise until mutually orthogonal, then the
/// column norms are the singular values.
pub fn complex_singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.clone();
    let col_dot = |a: &ComplexMatrix, i: usize, j: usize| -> C64 {
        (0..n).map(|k| a[(k, i)].conj() * a[(k, j)]).sum()
    };
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = col_dot(&a, i, i).re;
                let beta = col_dot(&a, j, j).re;
                let g = col_dot(&a, i, j);
                let gn = g.norm();
                if gn == 0.0 || gn <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // real rotation after removing the phase of g from column j
                let phase = g.conj() / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let x = a[(k, i)];
                    let y = a[(k, j)] * phase;
                    a[(k, i)] = x * c - y * s;
                    a[(k, j)] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut out: Vec<f64> = (0..n).map(|i| col_dot(&a, i, i).re.sqrt()).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(|a, b| b.re.total_cmp(&a.re));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = herm_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let x = ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        let e = herm_eig(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        assert!((&e.reconstruct() - &x).max_abs() < 1e-14);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = ComplexMatrix::from_rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
        let e = herm_eig(&y).unwrap();
        assert!((&e.reconstruct() - &y).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows([[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn general_diag() {
        let m = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 0.0)]);
        let e = sorted_re(general_eigenvalues(&m).unwrap());
        assert_eq!(e, vec![3.0, 1.0]);
    }

    #[test]
    fn general_rotation_matrix_has_unimodular_pair() {
        // real rotation by 0.3: eigenvalues e^{±0.3i}
        let (co, si) = (0.3f64.cos(), 0.3f64.sin());
        let m = ComplexMatrix::from_real_rows([[co, -si], [si, co]]);
        let mut e = general_eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - c(co, -si)).norm() < 1e-13);
        assert!((e[1] - c(co, si)).norm() < 1e-13);
    }

    #[test]
    fn general_jordan_block_converges() {
        let m = ComplexMatrix::from_real_rows([
            [2.0, 1.0, 0.0, 0.0],
            [0.0, 2.0, 1.0, 0.0],
            [0.0, 0.0, 2.0, 1.0],
            [0.0, 0.0, 0.0, 2.0],
        ]);
        let e = general_eigenvalues(&m).unwrap();
        assert_eq!(e.len(), 4);
        for z in e {
            assert!((z - c(2.0, 0.0)).norm() < 1e-3);
        }
    }

    #[test]
    fn general_companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = ComplexMatrix::from_real_rows([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let e = sorted_re(general_eigenvalues(&m).unwrap());
        for (got, want) in e.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_singular_values_of_rank_one() {
        // u·v† has a single singular value |u|·|v|; the rest must be ~ε, not √ε
        let u = [c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0), c(0.7, 0.0)];
        let v = [c(0.2, -0.1), c(1.0, 0.0), c(0.0, 0.4), c(-0.5, 0.5)];
        let m = ComplexMatrix::from_fn(4, |i, j| u[i] * v[j].conj());
        let s = complex_singular_values(&m);
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s[0] - nu * nv).abs() < 1e-14);
        assert!(s[1..].iter().all(|&x| x < 1e-15), "{s:?}");
    }

    #[test]
    fn complex_singular_values_unitary_invariance() {
        let m = ComplexMatrix::from_rows([
            [c(1.0, 0.0), c(0.0, 2.0)],
            [c(0.5, -0.5), c(3.0, 0.0)],
        ]);
        let s = complex_singular_values(&m);
        let gram = m.adjoint().matmul(&m);
        let e = herm_eig(&gram).unwrap();
        for (a, b) in s.iter().zip(&e.values) {
            assert!((a * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn general_rank_deficient_product() {
        // ρ·ρ_sf for a pure product state: nilpotent part must still deflate
        let m = ComplexMatrix::from_real_rows([
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]);
        let e = general_eigenvalues(&m).unwrap();
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn singular_value_cases() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(singular_values(&id), [1.0, 1.0, 1.0]);
        let d = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(singular_values(&d), [1.0, 0.0, 0.0]);
        let r = [[0.0, -2.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, -0.5]];
        let s = singular_values(&r);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14 && (s[2] - 0.5).abs() < 1e-14);
    }
}

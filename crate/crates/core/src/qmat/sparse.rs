use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;

/// Coordinate-list operator for the few-nonzero Hamiltonians and jump
/// operators that multiply dense density matrices in the integrators.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = m[(i, j)];
                (v != C64::new(0.0, 0.0)).then_some((i, j, v))
            })
            .collect();
        Self { dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect(),
        }
    }

    /// Concatenates entries; duplicates are summed implicitly by the products.
    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// out += coeff · S·ρ
    pub fn left_mul_acc(&self, rho: &ComplexMatrix, coeff: C64, out: &mut ComplexMatrix) {
        let n = self.dim;
        for &(i, k, v) in &self.entries {
            let w = v * coeff;
            for j in 0..n {
                out[(i, j)] += w * rho[(k, j)];
            }
        }
    }

    /// out += coeff · ρ·S
    pub fn right_mul_acc(&self, rho: &ComplexMatrix, coeff: C64, out: &mut ComplexMatrix) {
        let n = self.dim;
        for &(k, j, v) in &self.entries {
            let w = v * coeff;
            for i in 0..n {
                out[(i, j)] += rho[(i, k)] * w;
            }
        }
    }

    pub fn left_mul(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.dim());
        self.left_mul_acc(rho, C64::new(1.0, 0.0), &mut out);
        out
    }
}

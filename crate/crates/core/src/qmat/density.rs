use num_complex::Complex64 as C64;

use super::eigen::{herm_eig, jacobi};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Acceptance tolerances for [`DensityMatrix`] construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermitian: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateTolerance {
    pub const STRICT: Self = Self {
        hermitian: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-9,
    };

    /// Integrated states: trace may wander to 1e-8.
    pub const INTEGRATOR: Self = Self {
        hermitian: 1e-10,
        trace: 1e-8,
        min_eigenvalue: -1e-9,
    };
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self::STRICT
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix tagged with the
/// dimensions of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, layout: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, layout, StateTolerance::STRICT)
    }

    pub fn with_tolerance(
        matrix: ComplexMatrix,
        layout: Vec<usize>,
        tol: StateTolerance,
    ) -> Result<Self> {
        check_layout(&layout, matrix.dim())?;
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol.hermitian {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = jacobi(matrix.hermitian_part()).min_value();
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// |ψ⟩⟨ψ| for a normalized ket.
    pub fn from_ket(ket: &[C64], layout: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::projector(ket), layout)
    }

    /// Two-qubit state (layout `[2, 2]`).
    pub fn two_qubit(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, vec![2, 2])
    }

    pub fn maximally_mixed(layout: Vec<usize>) -> Self {
        let dim: usize = layout.iter().product();
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
            layout,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn expectation_ket(&self, ket: &[C64]) -> f64 {
        let rho_psi = self.matrix.apply(ket);
        ket.iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// Tr[ρ·A]
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    /// Population of each basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

fn check_layout(layout: &[usize], dim: usize) -> Result<()> {
    if layout.is_empty() || layout.contains(&0) {
        return Err(Error::BadLayout {
            layout: layout.to_vec(),
            reason: "subsystem dimensions must be positive".into(),
        });
    }
    let product: usize = layout.iter().product();
    if product != dim {
        return Err(Error::BadLayout {
            layout: layout.to_vec(),
            reason: format!("product {product} does not match matrix dimension {dim}"),
        });
    }
    Ok(())
}

/// Reduced state on the subsystems listed in `keep` (in layout order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = rho.layout();
    check_layout(layout, rho.dim())?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= layout.len()) {
        return Err(Error::BadLayout {
            layout: layout.to_vec(),
            reason: format!("invalid subsystem selection {keep:?}"),
        });
    }
    let traced: Vec<usize> = (0..layout.len()).filter(|i| !kept.contains(i)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| layout[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| layout[i]).collect();
    let kept_dim: usize = kept_dims.iter().product();
    let traced_dim: usize = traced_dims.iter().product();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; layout.len()];
    for i in (0..layout.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * layout[i + 1];
    }
    let offset = |sel: &[usize], dims: &[usize], mut flat: usize| -> usize {
        let mut off = 0;
        for (pos, &sub) in sel.iter().enumerate().rev() {
            let d = dims[pos];
            off += (flat % d) * strides[sub];
            flat /= d;
        }
        off
    };

    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(kept_dim, |i, j| {
        let base_i = offset(&kept, &kept_dims, i);
        let base_j = offset(&kept, &kept_dims, j);
        (0..traced_dim)
            .map(|t| {
                let o = offset(&traced, &traced_dims, t);
                m[(base_i + o, base_j + o)]
            })
            .sum()
    });
    Ok(DensityMatrix {
        matrix: out,
        layout: kept_dims,
    })
}

/// ½·Σ|λᵢ(ρ − σ)|
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let eig = herm_eig(&diff)?;
    let d = 0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::kron;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn basis(dim: usize, i: usize) -> Vec<C64> {
        let mut v = vec![c(0.0); dim];
        v[i] = c(1.0);
        v
    }

    #[test]
    fn rejects_unit_trace_violation() {
        let m = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(m, vec![2]),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_real_rows([[1.5, 0.0], [0.0, -0.5]]);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
    }

    #[test]
    fn rejects_layout_mismatch() {
        let m = ComplexMatrix::identity(4).scale_re(0.25);
        assert!(matches!(
            DensityMatrix::new(m, vec![2, 3]),
            Err(Error::BadLayout { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = ComplexMatrix::from_real_rows([[0.7, 0.1], [0.1, 0.3]]);
        let b = ComplexMatrix::from_real_rows([[0.2, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.3]]);
        let rho = DensityMatrix::new(kron(&a, &b), vec![2, 3]).unwrap();
        let ra = partial_trace(&rho, &[0]).unwrap();
        assert!((ra.matrix() - &a).max_abs() < 1e-15);
        assert_eq!(ra.layout(), &[2]);
        let rb = partial_trace(&rho, &[1]).unwrap();
        assert!((rb.matrix() - &b).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_drops_vacuum_field() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let atoms = vec![c(0.0), C64::new(s, 0.0), C64::new(0.0, -s), c(0.0)];
        let vac = basis(3, 0);
        let full = crate::qmat::kron_vec(&atoms, &vac);
        let rho = DensityMatrix::from_ket(&full, vec![2, 2, 3]).unwrap();
        let red = partial_trace(&rho, &[0, 1]).unwrap();
        let want = ComplexMatrix::projector(&atoms);
        assert!((red.matrix() - &want).max_abs() < 1e-15);
        assert_eq!(red.layout(), &[2, 2]);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(s), c(0.0), c(0.0), c(s)];
        let rho = DensityMatrix::from_ket(&bell, vec![2, 2]).unwrap();
        for keep in [0, 1] {
            let r = partial_trace(&rho, &[keep]).unwrap();
            assert!((r.matrix() - &ComplexMatrix::identity(2).scale_re(0.5)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_middle_subsystem() {
        // keep the outer factors of a three-way product
        let a = ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]);
        let b = ComplexMatrix::from_real_rows([[0.5, 0.5], [0.5, 0.5]]);
        let f = ComplexMatrix::from_real_rows([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]);
        let rho = DensityMatrix::new(kron(&kron(&a, &b), &f), vec![2, 2, 3]).unwrap();
        let r = partial_trace(&rho, &[0, 2]).unwrap();
        assert!((r.matrix() - &kron(&a, &f)).max_abs() < 1e-15);
        assert!(matches!(partial_trace(&rho, &[3]), Err(Error::BadLayout { .. })));
        assert!(matches!(partial_trace(&rho, &[1, 1]), Err(Error::BadLayout { .. })));
    }

    #[test]
    fn trace_distance_cases() {
        let eg = DensityMatrix::from_ket(&basis(4, 1), vec![2, 2]).unwrap();
        let ge = DensityMatrix::from_ket(&basis(4, 2), vec![2, 2]).unwrap();
        assert_eq!(trace_distance(&eg, &eg).unwrap(), 0.0);
        assert!((trace_distance(&eg, &ge).unwrap() - 1.0).abs() < 1e-15);
        let q = DensityMatrix::from_ket(&basis(2, 0), vec![2]).unwrap();
        assert!(matches!(
            trace_distance(&eg, &q),
            Err(Error::DimMismatch { .. })
        ));
    }
}

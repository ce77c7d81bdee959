//! Dense reference propagator for small sectors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::operator::SparseOperator;
use crate::state::C64;

/// Spectral decomposition of a sector operator, reusable across times.
pub struct DensePropagator {
    lambda: Vec<f64>,
    q: DMatrix<f64>,
}

impl DensePropagator {
    pub fn new(op: &SparseOperator) -> Self {
        let n = op.dim();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for (j, v) in op.row(i) {
                m[(i, j)] += v;
            }
        }
        let eig = SymmetricEigen::new(m);
        Self {
            lambda: eig.eigenvalues.iter().copied().collect(),
            q: eig.eigenvectors,
        }
    }

    /// `exp(-i H t) psi = Q exp(-i t Lambda) Q^T psi`.
    pub fn apply(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let n = self.lambda.len();
        let coeffs: Vec<C64> = (0..n)
            .map(|j| {
                let c: C64 = (0..n).map(|i| self.q[(i, j)] * psi[i]).sum();
                c * C64::from_polar(1.0, -t * self.lambda[j])
            })
            .collect();
        (0..n)
            .map(|i| (0..n).map(|j| self.q[(i, j)] * coeffs[j]).sum())
            .collect()
    }
}

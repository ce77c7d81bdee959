//! Short-iterate Lanczos propagation of `exp(-i H t) psi` within one sector.
//!
//! Each step builds an orthonormal Krylov basis `V` of dimension `m` at the
//! current state, diagonalizes the tridiagonal projection `T`, and accepts
//! the largest step `tau` (halving from the distance to the furthest pending
//! output time) whose a-posteriori estimate
//! `beta_m |e_m^T exp(-i tau T) e_1|` stays below the tolerance. Every output
//! time inside the accepted step is evaluated from the same basis, so no
//! trajectory is ever stored.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::state::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    /// Krylov subspace dimension `m`.
    pub dim: usize,
    /// Local error bound per accepted step.
    pub tol: f64,
    /// Hard cap on the number of accepted steps.
    pub max_steps: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            dim: 30,
            tol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

/// Bookkeeping from one propagation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub steps: usize,
    pub halvings: usize,
    /// Largest error estimate among accepted steps.
    pub max_estimate: f64,
}

impl KrylovStats {
    pub fn merge(self, other: Self) -> Self {
        Self {
            steps: self.steps + other.steps,
            halvings: self.halvings + other.halvings,
            max_estimate: self.max_estimate.max(other.max_estimate),
        }
    }
}

fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

struct Subspace {
    basis: Vec<Vec<C64>>,
    lambda: Vec<f64>,
    /// Eigenvectors of `T`, one per column.
    q: DMatrix<f64>,
    /// `beta_m`; zero when the subspace is invariant under `H`.
    beta_next: f64,
    /// Norm of the state the subspace was built from.
    scale: f64,
}

impl Subspace {
    fn build(h: &SparseOperator, psi: &[C64], m: usize) -> Self {
        let n = psi.len();
        let scale = cnorm(psi);
        let m = m.min(n).max(1);
        let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|x| x / scale).collect()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut beta_next = 0.0;
        let mut hscale = 0.0f64;
        for j in 0..m {
            h.matvec_into(&basis[j], &mut w);
            let a = cdot(&basis[j], &w).re;
            alpha.push(a);
            hscale = hscale.max(a.abs());
            for _ in 0..2 {
                for v in &basis {
                    let c = cdot(v, &w);
                    for (wi, x) in w.iter_mut().zip(v) {
                        *wi -= c * x;
                    }
                }
            }
            let b = cnorm(&w);
            hscale = hscale.max(b);
            if b <= 1e-14 * hscale.max(1.0) {
                break;
            }
            if j + 1 == m {
                beta_next = b;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        Self {
            basis,
            lambda: eig.eigenvalues.iter().copied().collect(),
            q: eig.eigenvectors,
            beta_next,
            scale,
        }
    }

    /// `exp(-i tau T) e_1`.
    fn coefficients(&self, tau: f64) -> Vec<C64> {
        let k = self.lambda.len();
        let phase: Vec<C64> = (0..k)
            .map(|j| C64::from_polar(self.q[(0, j)], -tau * self.lambda[j]))
            .collect();
        (0..k)
            .map(|i| (0..k).map(|j| self.q[(i, j)] * phase[j]).sum())
            .collect()
    }

    fn estimate(&self, tau: f64) -> f64 {
        if self.beta_next == 0.0 {
            return 0.0;
        }
        let last = self.lambda.len() - 1;
        let c: C64 = (0..self.lambda.len())
            .map(|j| C64::from_polar(self.q[(0, j)] * self.q[(last, j)], -tau * self.lambda[j]))
            .sum();
        self.scale * self.beta_next * c.norm()
    }

    fn spread(&self) -> f64 {
        let max = self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.lambda.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    fn combine(&self, c: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for (v, &ci) in self.basis.iter().zip(c) {
            let ci = ci * self.scale;
            for (o, x) in out.iter_mut().zip(v) {
                *o += ci * x;
            }
        }
    }
}

/// Propagates `psi0` under `exp(-i h t)` and calls `visit(k, psi(times[k]))`
/// for every output time, in order. Times are measured from `psi0` and may be
/// negative or change direction.
pub fn evolve<F>(
    h: &SparseOperator,
    psi0: &[C64],
    times: &[f64],
    cfg: &KrylovConfig,
    mut visit: F,
) -> Result<KrylovStats>
where
    F: FnMut(usize, &[C64]),
{
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.len(),
        });
    }
    if cfg.dim == 0 || !(cfg.tol > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "Krylov dimension {} and tolerance {} must be positive",
            cfg.dim, cfg.tol
        )));
    }
    if let Some(bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite output time {bad}")));
    }
    let mut stats = KrylovStats::default();
    let mut psi = psi0.to_vec();
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    let mut t = 0.0f64;
    let mut k = 0;
    let zero = cnorm(&psi) == 0.0;
    while k < times.len() {
        if times[k] == t || zero {
            visit(k, &psi);
            k += 1;
            continue;
        }
        let dir = (times[k] - t).signum();
        let mut end = k;
        while end + 1 < times.len() && (times[end + 1] - times[end]) * dir >= 0.0 {
            end += 1;
        }
        let sub = Subspace::build(h, &psi, cfg.dim);
        let mut tau = times[end] - t;
        // the estimate oscillates for steps far beyond what m vectors can
        // resolve, so the search starts below that range
        let cap = 2.0 * sub.lambda.len() as f64 / sub.spread().max(1e-300);
        while tau.abs() > cap {
            tau *= 0.5;
        }
        let mut est = sub.estimate(tau);
        let mut local_halvings = 0;
        while est > cfg.tol {
            tau *= 0.5;
            local_halvings += 1;
            if local_halvings > 1000 {
                return Err(Error::KrylovStepFailed {
                    time: t,
                    estimate: est,
                    tol: cfg.tol,
                });
            }
            est = sub.estimate(tau);
        }
        stats.halvings += local_halvings;
        stats.max_estimate = stats.max_estimate.max(est);
        stats.steps += 1;
        if stats.steps > cfg.max_steps {
            return Err(Error::KrylovStepFailed {
                time: t,
                estimate: est,
                tol: cfg.tol,
            });
        }
        let reach = t + tau;
        if reach == t {
            return Err(Error::KrylovStepFailed {
                time: t,
                estimate: est,
                tol: cfg.tol,
            });
        }
        let mut landed = false;
        while k <= end && (times[k] - reach) * dir <= 0.0 {
            sub.combine(&sub.coefficients(times[k] - t), &mut out);
            visit(k, &out);
            landed = times[k] == reach;
            k += 1;
        }
        if landed {
            std::mem::swap(&mut psi, &mut out);
        } else {
            sub.combine(&sub.coefficients(tau), &mut out);
            std::mem::swap(&mut psi, &mut out);
        }
        t = reach;
    }
    Ok(stats)
}

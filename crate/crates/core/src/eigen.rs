//! Lowest eigenpair of a sector operator.
//!
//! Small blocks go through a dense symmetric eigensolver; larger ones use
//! Lanczos with full reorthogonalization against every stored Krylov vector.
//! The start vector is pseudo-random from a fixed seed, which keeps runs
//! reproducible while giving weight to every symmetry sector of the ring
//! (a uniform start vector would miss ground states with momentum pi).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// Blocks up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Required residual `||A v - lambda v||`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Ritz values are extracted every `check_every` iterations.
    pub check_every: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            seed: 0x5eed_0f_5ba7,
            check_every: 5,
        }
    }
}

/// Eigenvalue, unit eigenvector and achieved residual.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(op: &SparseOperator, value: f64, v: &[f64]) -> f64 {
    let av = op.matvec(v);
    av.iter()
        .zip(v)
        .map(|(a, x)| (a - value * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Flips the global sign so the largest-magnitude component is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
        }
    }
    if best < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lowest eigenpair by dense diagonalization.
pub fn dense_lowest(op: &SparseOperator) -> Eigenpair {
    let n = op.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for (j, v) in op.row(i) {
            m[(i, j)] += v;
        }
    }
    let eig = SymmetricEigen::new(m);
    let (k, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty operator");
    let mut vector: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    fix_sign(&mut vector);
    let residual = residual(op, value, &vector);
    Eigenpair {
        value,
        vector,
        residual,
        iterations: 0,
    }
}

/// Lowest eigenpair by Lanczos with full reorthogonalization.
pub fn lanczos_lowest(op: &SparseOperator, cfg: &LanczosConfig) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if n == 1 {
        return Ok(Eigenpair {
            value: op.get(0, 0),
            vector: vec![1.0],
            residual: 0.0,
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let max_iter = cfg.max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best = f64::INFINITY;

    for it in 0..max_iter {
        let vj = &basis[it];
        op.matvec_into(vj, &mut w);
        let a = dot(vj, &w);
        alpha.push(a);
        for (wi, x) in w.iter_mut().zip(vj) {
            *wi -= a * x;
        }
        if it > 0 {
            let b = beta[it - 1];
            for (wi, x) in w.iter_mut().zip(&basis[it - 1]) {
                *wi -= b * x;
            }
        }
        // two passes of classical Gram-Schmidt against the full basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, x) in w.iter_mut().zip(q) {
                    *wi -= c * x;
                }
            }
        }
        let b = norm(&w);
        let scale = alpha.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let exhausted = b <= 1e-13 * scale || it + 1 == max_iter;

        if (it + 1) % cfg.check_every == 0 || exhausted {
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
            let (idx, _) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let s = eig.eigenvectors.column(idx);
            let estimate = b * s[k - 1].abs();
            if estimate <= cfg.tol || exhausted {
                let mut y = vec![0.0; n];
                for (q, &c) in basis.iter().zip(s.iter()) {
                    for (yi, x) in y.iter_mut().zip(q) {
                        *yi += c * x;
                    }
                }
                let ny = norm(&y);
                y.iter_mut().for_each(|x| *x /= ny);
                fix_sign(&mut y);
                let ay = op.matvec(&y);
                let value = dot(&y, &ay);
                let res = ay
                    .iter()
                    .zip(&y)
                    .map(|(a, x)| (a - value * x).powi(2))
                    .sum::<f64>()
                    .sqrt();
                best = best.min(res);
                if res <= cfg.tol {
                    return Ok(Eigenpair {
                        value,
                        vector: y,
                        residual: res,
                        iterations: it + 1,
                    });
                }
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Err(Error::NoConvergence {
        iterations: alpha.len(),
        residual: best,
    })
}

/// Dense solve for small blocks, Lanczos above [`DENSE_LIMIT`].
pub fn lowest(op: &SparseOperator, cfg: &LanczosConfig) -> Result<Eigenpair> {
    if op.dim() <= DENSE_LIMIT {
        let pair = dense_lowest(op);
        if pair.residual <= cfg.tol.max(1e-12 * (1.0 + pair.value.abs())) {
            return Ok(pair);
        }
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: pair.residual,
        });
    }
    lanczos_lowest(op, cfg)
}

//! Dense reference model built from Kronecker products of single-spin
//! matrices, independent of the sector builders.
//!
//! Full-space index: `c * 2^N + bits`, where `c` is the central level
//! (`S_m = S - c`) and bit `i` of `bits` is bath site `i + 1` (set = up).
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use spinstar::state::StateVector;

pub type C64 = Complex64;

/// `(Sz, S+, S-)` for spin `two_s / 2`, rows and columns ordered `S, S-1, ..`.
pub fn spin_matrices(two_s: u32) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let d = two_s as usize + 1;
    let s = two_s as f64 / 2.0;
    let mut sz = DMatrix::zeros(d, d);
    let mut sp = DMatrix::zeros(d, d);
    for c in 0..d {
        let m = s - c as f64;
        sz[(c, c)] = m;
        if c > 0 {
            sp[(c - 1, c)] = ((s - m) * (s + m + 1.0)).sqrt();
        }
    }
    let sm = sp.transpose();
    (sz, sp, sm)
}

/// `(Sz, S+, S-)` for a bath site, ordered `(down, up)` to match the bit
/// value of the site.
fn site_matrices() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let sz = DMatrix::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, 0.5]);
    let sp = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let sm = sp.transpose();
    (sz, sp, sm)
}

pub struct Dense {
    pub n: usize,
    pub two_s: u32,
    pub dim: usize,
    central: (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>),
    site: (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>),
}

impl Dense {
    pub fn new(n: usize, two_s: u32) -> Self {
        Self {
            n,
            two_s,
            dim: (two_s as usize + 1) << n,
            central: spin_matrices(two_s),
            site: site_matrices(),
        }
    }

    /// `central ⊗ op_{N} ⊗ ... ⊗ op_{1}` with identities where unspecified.
    pub fn chain(&self, central: Option<&DMatrix<f64>>, sites: &[(usize, &DMatrix<f64>)]) -> DMatrix<f64> {
        let dc = self.two_s as usize + 1;
        let mut m = central.cloned().unwrap_or_else(|| DMatrix::identity(dc, dc));
        for site in (0..self.n).rev() {
            let f = sites
                .iter()
                .find(|(s, _)| *s == site)
                .map(|(_, op)| (*op).clone())
                .unwrap_or_else(|| DMatrix::identity(2, 2));
            m = m.kronecker(&f);
        }
        m
    }

    /// `sum_j [J (Sx Sx + Sy Sy) + J' Sz Sz]` over the periodic ring.
    pub fn ring(&self, j: f64, jp: f64) -> DMatrix<f64> {
        let (sz, sp, sm) = &self.site;
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.n {
            let k = (i + 1) % self.n;
            h += self.chain(None, &[(i, sz), (k, sz)]) * jp;
            h += self.chain(None, &[(i, sp), (k, sm)]) * (0.5 * j);
            h += self.chain(None, &[(i, sm), (k, sp)]) * (0.5 * j);
        }
        h
    }

    /// `S . L`.
    pub fn s_dot_l(&self) -> DMatrix<f64> {
        let (cz, cp, cm) = &self.central;
        let (sz, sp, sm) = &self.site;
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.n {
            h += self.chain(Some(cz), &[(i, sz)]);
            h += self.chain(Some(cp), &[(i, sm)]) * 0.5;
            h += self.chain(Some(cm), &[(i, sp)]) * 0.5;
        }
        h
    }

    pub fn central_sz(&self) -> DMatrix<f64> {
        self.chain(Some(&self.central.0), &[])
    }

    /// `L^2` from pair products of the bath spins.
    pub fn l_squared(&self) -> DMatrix<f64> {
        let (sz, sp, sm) = &self.site;
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.n {
            for k in 0..self.n {
                if i == k {
                    h += DMatrix::identity(self.dim, self.dim) * 0.75;
                    continue;
                }
                h += self.chain(None, &[(i, sz), (k, sz)]);
                h += self.chain(None, &[(i, sp), (k, sm)]) * 0.5;
                h += self.chain(None, &[(i, sm), (k, sp)]) * 0.5;
            }
        }
        h
    }

    /// `(S + L)^2`.
    pub fn total_j_squared(&self) -> DMatrix<f64> {
        let s = self.two_s as f64 / 2.0;
        self.l_squared() + self.s_dot_l() * 2.0 + DMatrix::identity(self.dim, self.dim) * (s * (s + 1.0))
    }

    /// Embeds a sector-blocked state into the full space.
    pub fn embed(&self, state: &StateVector) -> DVector<C64> {
        let mut v = DVector::from_element(self.dim, C64::new(0.0, 0.0));
        for b in state.blocks() {
            assert_eq!(b.sector.n(), self.n);
            assert_eq!(b.sector.two_s(), self.two_s);
            for (i, a) in b.amps.iter().enumerate() {
                let st = b.sector.state(i);
                v[((st.central as usize) << self.n) | st.bits as usize] += a;
            }
        }
        v
    }
}

pub fn apply(m: &DMatrix<f64>, v: &DVector<C64>) -> DVector<C64> {
    let re = m * v.map(|x| x.re);
    let im = m * v.map(|x| x.im);
    re.zip_map(&im, C64::new)
}

pub fn expectation(m: &DMatrix<f64>, v: &DVector<C64>) -> f64 {
    v.dotc(&apply(m, v)).re
}

/// `||M v - e v||`.
pub fn residual(m: &DMatrix<f64>, v: &DVector<C64>, e: f64) -> f64 {
    (apply(m, v) - v * C64::new(e, 0.0)).norm()
}

/// `exp(-i M t)` through the spectral decomposition of a real symmetric `M`.
pub struct Expm {
    lambda: DVector<f64>,
    q: DMatrix<f64>,
}

impl Expm {
    pub fn new(m: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m);
        Self {
            lambda: eig.eigenvalues,
            q: eig.eigenvectors,
        }
    }

    pub fn apply(&self, v: &DVector<C64>, t: f64) -> DVector<C64> {
        let qt = self.q.transpose();
        let mut c = apply(&qt, v);
        for (ci, l) in c.iter_mut().zip(self.lambda.iter()) {
            *ci *= C64::from_polar(1.0, -t * l);
        }
        apply(&self.q, &c)
    }
}

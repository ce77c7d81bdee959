//! Physical parameters of the (modified) Heisenberg star.
//!
//! Spins are stored doubled (`two_s = 2S`) so half-integer central spins
//! never become floating-point quantum numbers.

use crate::error::{Error, Result};

/// Couplings and sizes of one star.
///
/// `j` is the in-plane and `jp` the Ising part of the intrabath exchange;
/// the isotropic ring has `j == jp`. `g` multiplies the system-bath
/// coupling and `omega` the central-spin Zeeman term. `gt = g * sqrt(N)` is
/// the collective energy scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub two_s: u32,
    pub j: f64,
    pub jp: f64,
    pub g: f64,
    pub omega: f64,
    pub gt: f64,
    pub isotropic: bool,
}

impl ModelParams {
    /// Validates sizes and couplings and derives `gt`.
    pub fn new(n: usize, two_s: u32, j: f64, jp: f64, g: f64, omega: f64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddBathSize(n));
        }
        if two_s < 1 {
            return Err(Error::CentralSpinTooSmall { two_s });
        }
        if two_s as usize > n {
            return Err(Error::CentralSpinTooLarge { two_s, n });
        }
        for (name, value) in [("J", j), ("J'", jp), ("g", g), ("omega", omega)] {
            if !value.is_finite() {
                return Err(Error::NonFiniteCoupling { name, value });
            }
        }
        Ok(Self {
            n,
            two_s,
            j,
            jp,
            g,
            omega,
            gt: g * (n as f64).sqrt(),
            isotropic: j == jp,
        })
    }

    /// Isotropic star of `H = J H_b + g S.L` with couplings given in units of
    /// the collective scale: `J = ratio * gt`, `g = gt / sqrt(N)`.
    pub fn from_ratio(n: usize, two_s: u32, j_over_gt: f64, gt: f64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddBathSize(n));
        }
        let j = j_over_gt * gt;
        Self::new(n, two_s, j, j, gt / (n as f64).sqrt(), 0.0)
    }

    /// Central spin size `S` as a float.
    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn with_j(mut self, j: f64, jp: f64) -> Self {
        self.j = j;
        self.jp = jp;
        self.isotropic = j == jp;
        self
    }
}

//! Bath level structure and the closed-form star spectrum.
//!
//! The isotropic ring's lowest level with total spin `l`, `E1b(l)`, is the
//! ground state of the magnetization sector `l_m = l` (Lieb-Mattis). Adding
//! the central spin shifts each bath multiplet by
//! `(g/2) [J(J+1) - S(S+1) - l(l+1)]`, which gives the star energies below
//! without diagonalizing the star itself.
//!
//! Quantum numbers that may be half-integer are passed doubled.

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::basis::BasisSector;
use crate::eigen::{lowest, LanczosConfig};
use crate::error::{Error, Result};
use crate::math::binomial_big;
use crate::operator::{build_bath_ring, build_l_squared};

/// Tolerance on `<L^2> = l(l+1)` for the sector ground state.
pub const L_SQUARED_TOL: f64 = 1e-8;

/// Number of spin-`l` multiplets among `N` spins one-half:
/// `C(N, l + N/2) - C(N, l + 1 + N/2)`.
pub fn degeneracy(n: usize, l: usize) -> Result<BigUint> {
    if n % 2 != 0 {
        return Err(Error::OddBathSize(n));
    }
    if l > n / 2 {
        return Err(Error::OutOfRange {
            what: "l",
            value: l as i64,
            range: format!("0..={}", n / 2),
        });
    }
    let n64 = n as u64;
    let h = (n / 2) as u64;
    Ok(binomial_big(n64, l as u64 + h) - binomial_big(n64, l as u64 + 1 + h))
}

/// Lowest ring state with total spin `l`, taken from sector `n_up = l + N/2`.
#[derive(Debug, Clone)]
pub struct BathGround {
    pub l: usize,
    pub energy: f64,
    pub sector: Arc<BasisSector>,
    pub vector: Vec<f64>,
    pub l_squared: f64,
    pub residual: f64,
}

/// Solves the isotropic ring (`J = 1`) in sector `l_m = l` and checks that
/// the eigenvector carries `<L^2> = l(l+1)`.
pub fn bath_subground(n: usize, l: usize, cfg: &LanczosConfig) -> Result<BathGround> {
    if l > n / 2 {
        return Err(Error::OutOfRange {
            what: "l",
            value: l as i64,
            range: format!("0..={}", n / 2),
        });
    }
    let sector = Arc::new(BasisSector::bath(n, l + n / 2)?);
    let h = build_bath_ring(&sector, 1.0, 1.0);
    let pair = lowest(&h, cfg)?;
    let l2 = build_l_squared(&sector);
    let l_squared: f64 = l2
        .matvec(&pair.vector)
        .iter()
        .zip(&pair.vector)
        .map(|(a, b)| a * b)
        .sum();
    let want = (l * (l + 1)) as f64;
    if (l_squared - want).abs() > L_SQUARED_TOL {
        return Err(Error::Identification(format!(
            "ground state of sector l_m = {l} has <L^2> = {l_squared}, expected {want}"
        )));
    }
    Ok(BathGround {
        l,
        energy: pair.value,
        sector,
        vector: pair.vector,
        l_squared,
        residual: pair.residual,
    })
}

/// `E1b(l)` of the isotropic ring at unit coupling.
pub fn bath_subground_energy(n: usize, l: usize) -> Result<f64> {
    bath_subground(n, l, &LanczosConfig::default()).map(|b| b.energy)
}

/// One-magnon dispersion `N/4 - (1 - cos k)` with `k = 2 pi k_index / N`.
pub fn single_magnon_energy(n: usize, k_index: usize) -> f64 {
    let k = 2.0 * std::f64::consts::PI * k_index as f64 / n as f64;
    n as f64 / 4.0 - (1.0 - k.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRow {
    pub l: usize,
    pub e1b: f64,
    pub degeneracy: u64,
}

/// `E1b(l)` and `d_{N,l}` for `l = 0..=N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    pub n: usize,
    pub rows: Vec<LevelRow>,
}

impl LevelTable {
    /// Solves the `N/2 + 1` sectors in parallel.
    pub fn compute(n: usize, cfg: &LanczosConfig) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddBathSize(n));
        }
        let rows = (0..=n / 2)
            .into_par_iter()
            .map(|l| {
                let ground = bath_subground(n, l, cfg)?;
                let d = degeneracy(n, l)?;
                Ok(LevelRow {
                    l,
                    e1b: ground.energy,
                    degeneracy: u64::try_from(d).expect("degeneracy fits u64 at ED sizes"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, rows })
    }

    pub fn e1b(&self, l: usize) -> f64 {
        self.rows[l].e1b
    }

    /// Smallest `E1b(l+1) - E1b(l)`; positive when the Lieb-Mattis order holds.
    pub fn min_level_spacing(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].e1b - w[0].e1b)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Star eigenenergy for bath multiplet `(l, E_b)` and coupling channel `s`.
///
/// For `S <= l` the star spin is `j = l + s` with `s = -S..=S` and
/// `E = J E_b + (g/2) [s^2 + s(2l+1) - S(S+1)]`; for `l < S` it is
/// `j = S + s` with `s = -l..=l` and `E = J E_b + (g/2) [s^2 + s(2S+1) - l(l+1)]`.
pub fn star_energy(two_l: u32, two_s_channel: i32, two_s: u32, j: f64, g: f64, e_b: f64) -> Result<f64> {
    let bound = two_s.min(two_l) as i32;
    if two_s_channel.abs() > bound || (two_s_channel + bound) % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "coupling channel 2s = {two_s_channel} outside -{bound}..={bound}"
        )));
    }
    let s = two_s_channel as f64 / 2.0;
    let l = two_l as f64 / 2.0;
    let big_s = two_s as f64 / 2.0;
    let shift = if two_s <= two_l {
        s * s + s * (2.0 * l + 1.0) - big_s * (big_s + 1.0)
    } else {
        s * s + s * (2.0 * big_s + 1.0) - l * (l + 1.0)
    };
    Ok(j * e_b + 0.5 * g * shift)
}

/// Lowest star energy in the `l` subspace:
/// `J E1b(l) - g S (l + 1)` for `S <= l`, `J E1b(l) - g l (S + 1)` for `l < S`.
pub fn sub_ground_energy(two_l: u32, two_s: u32, j: f64, g: f64, e1b: f64) -> f64 {
    let l = two_l as f64 / 2.0;
    let s = two_s as f64 / 2.0;
    if two_s <= two_l {
        j * e1b - g * s * (l + 1.0)
    } else {
        j * e1b - g * l * (s + 1.0)
    }
}

/// `2|l - S| + 1`, the multiplicity of the sub-ground level.
pub fn sub_ground_multiplicity(two_l: u32, two_s: u32) -> u32 {
    two_l.abs_diff(two_s) + 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundScanRow {
    pub j_over_gt: f64,
    pub eg_over_gt: f64,
    pub l_g: usize,
}

/// Ground energy of the star in units of `gt = g sqrt(N)` for each `J/gt`.
///
/// Exact ties between two `l` pick the larger `l`.
pub fn ground_scan(table: &LevelTable, two_s: u32, ratios: &[f64]) -> Vec<GroundScanRow> {
    let g = 1.0 / (table.n as f64).sqrt();
    ratios
        .par_iter()
        .map(|&ratio| {
            let mut best = (f64::INFINITY, 0usize);
            for row in table.rows.iter().rev() {
                let e = sub_ground_energy(2 * row.l as u32, two_s, ratio, g, row.e1b);
                if e < best.0 {
                    best = (e, row.l);
                }
            }
            GroundScanRow {
                j_over_gt: ratio,
                eg_over_gt: best.0,
                l_g: best.1,
            }
        })
        .collect()
}

/// A change of `l_G` between consecutive scan points; `j_over_gt` is the
/// first grid point carrying the new value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauEdge {
    pub j_over_gt: f64,
    pub l_from: usize,
    pub l_to: usize,
}

pub fn plateau_edges(rows: &[GroundScanRow]) -> Vec<PlateauEdge> {
    rows.windows(2)
        .filter(|w| w[0].l_g != w[1].l_g)
        .map(|w| PlateauEdge {
            j_over_gt: w[1].j_over_gt,
            l_from: w[0].l_g,
            l_to: w[1].l_g,
        })
        .collect()
}

/// `J/gt = S / (2 sqrt N)`, where `l_G` drops from `N/2` to `N/2 - 1`.
pub fn transition_point(n: usize, two_s: u32) -> f64 {
    (two_s as f64 / 2.0) / (2.0 * (n as f64).sqrt())
}

/// Counts star eigenstates multiplet by multiplet; equals `(2S+1) 2^N`.
pub fn state_count(n: usize, two_s: u32) -> Result<BigUint> {
    if n % 2 != 0 {
        return Err(Error::OddBathSize(n));
    }
    if two_s as usize > n {
        return Err(Error::CentralSpinTooLarge { two_s, n });
    }
    let mut total = BigUint::ZERO;
    for l in 0..=n / 2 {
        let two_l = 2 * l as i64;
        let two_s = two_s as i64;
        let d = degeneracy(n, l)?;
        let (bound, base) = if two_s <= two_l {
            (two_s, two_l)
        } else {
            (two_l, two_s)
        };
        // sum over 2s in -bound..=bound of (2j + 1) with 2j = base + 2s
        let mut states: u64 = 0;
        let mut ch = -bound;
        while ch <= bound {
            states += (base + ch + 1) as u64;
            ch += 2;
        }
        total += d * states;
    }
    Ok(total)
}

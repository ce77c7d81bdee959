//! Sparse Hermitian operators over one magnetization sector.
//!
//! Every operator needed here (XXZ ring, isotropic system-bath coupling,
//! Zeeman term, `L^2`, staggered magnetization) has real matrix elements in
//! the product basis, so values are stored as `f64` and applied to real or
//! complex vectors alike.
//!
//! Spin ladders follow `S± = Sx ± i Sy` with
//! `S±|S, m> = sqrt((S ∓ m)(S ± m + 1)) |S, m ± 1>`.

use std::ops::{Add, Mul};
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::basis::{two_sm, BasisSector, SectorTag};
use crate::error::{Error, Result};
use crate::state::{Block, StateVector, C64};

/// Rows above which the matrix-vector product is split across threads.
const PARALLEL_ROWS: usize = 4096;

/// Compressed-row sparse matrix acting inside one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    tag: SectorTag,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    hermitian: bool,
}

/// Scalar types the kernel can multiply a real matrix into.
pub trait Scalar: Copy + Send + Sync + Zero + Add<Output = Self> + Mul<f64, Output = Self> {}
impl Scalar for f64 {}
impl Scalar for C64 {}

impl SparseOperator {
    /// Assembles a matrix from per-row entry lists. Duplicate columns are
    /// summed and exact zeros dropped; rows end up sorted by column.
    pub fn from_rows(tag: SectorTag, rows: Vec<Vec<(u32, f64)>>, hermitian: bool) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == col {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    cols.push(col);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            tag,
            row_ptr,
            cols,
            vals,
            hermitian,
        }
    }

    /// Diagonal matrix.
    pub fn diagonal(tag: SectorTag, diag: impl IntoIterator<Item = f64>) -> Self {
        let rows = diag
            .into_iter()
            .enumerate()
            .map(|(i, d)| vec![(i as u32, d)])
            .collect();
        Self::from_rows(tag, rows, true)
    }

    pub fn identity(sector: &BasisSector) -> Self {
        Self::diagonal(sector.tag(), std::iter::repeat_n(1.0, sector.dim()))
    }

    pub fn tag(&self) -> SectorTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Entries `(col, value)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// Element `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Largest `|A_ij - A_ji|` over stored entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `y = A x` into a caller-provided buffer. Each row is summed in
    /// column order, so the result does not depend on the thread count.
    pub fn matvec_into<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let row = |i: usize| -> T {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + x[self.cols[k] as usize] * self.vals[k];
            }
            acc
        };
        if self.dim() >= PARALLEL_ROWS {
            y.par_iter_mut()
                .enumerate()
                .with_min_len(512)
                .for_each(|(i, yi)| *yi = row(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    pub fn matvec<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    /// `<x|A|x>` for a complex vector (real for Hermitian `A`).
    pub fn expectation(&self, x: &[C64]) -> f64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `self + c * other`; both must act on the same sector.
    pub fn add_scaled(&self, c: f64, other: &SparseOperator) -> Result<Self> {
        if self.tag != other.tag {
            return Err(Error::SectorMismatch(format!(
                "cannot add operators on {} and {}",
                self.tag, other.tag
            )));
        }
        let rows = (0..self.dim())
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (j as u32, v))
                    .chain(other.row(i).map(|(j, v)| (j as u32, c * v)))
                    .collect()
            })
            .collect();
        Ok(Self::from_rows(
            self.tag,
            rows,
            self.hermitian && other.hermitian,
        ))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Dense row-major copy, for small oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.dim()]; self.dim()];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        d
    }
}

/// `y = A x` on a state. The result is not normalized.
pub fn apply(op: &SparseOperator, state: &StateVector) -> Result<StateVector> {
    let mut out = Vec::with_capacity(state.blocks().len());
    for b in state.blocks() {
        if b.tag() != op.tag() {
            return Err(Error::SectorMismatch(format!(
                "operator acts on {}, state block is {}",
                op.tag(),
                b.tag()
            )));
        }
        if b.amps.len() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found: b.amps.len(),
            });
        }
        out.push(Block {
            sector: b.sector.clone(),
            amps: op.matvec(&b.amps),
        });
    }
    let mut s = StateVector::raw(out)?;
    s.mark_unnormalized();
    Ok(s)
}

/// Ring `sum_j [J (Sx Sx + Sy Sy) + J' Sz Sz]` over the `N` periodic bonds
/// `(j, j + 1)`, site `N + 1` wrapping to site 1. For `N = 2` the two bonds
/// join the same pair of sites, so that pair is counted twice.
/// The central level is a spectator.
pub fn build_bath_ring(sector: &BasisSector, j: f64, jp: f64) -> SparseOperator {
    let n = sector.n();
    let per_row: Vec<Vec<(u32, f64)>> = (0..sector.dim())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let st = sector.state(i);
            let mut row = Vec::with_capacity(n + 1);
            let mut diag = 0.0;
            for site in 0..n {
                let next = (site + 1) % n;
                let a = (st.bits >> site) & 1;
                let b = (st.bits >> next) & 1;
                if a == b {
                    diag += 0.25 * jp;
                } else {
                    diag -= 0.25 * jp;
                    let flipped = st.bits ^ (1u64 << site) ^ (1u64 << next);
                    let k = sector
                        .index_of(st.central, flipped)
                        .expect("flip-flop stays in sector");
                    row.push((k as u32, 0.5 * j));
                }
            }
            row.push((i as u32, diag));
            row
        })
        .collect();
    SparseOperator::from_rows(sector.tag(), per_row, true)
}

/// `prefactor * [ (S+ L- + S- L+)/2 + Sz Lz ]`, i.e. `prefactor * S.L`.
///
/// The plain star uses `prefactor = g`; the modified star with Zeeman field
/// and XXZ bath uses `2g`.
pub fn build_system_bath(sector: &BasisSector, prefactor: f64) -> SparseOperator {
    let n = sector.n();
    let two_s = sector.two_s();
    let half_s = two_s as f64 / 2.0;
    let per_row: Vec<Vec<(u32, f64)>> = (0..sector.dim())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let st = sector.state(i);
            let sm = two_sm(two_s, st.central) as f64 / 2.0;
            let lm = st.bits.count_ones() as f64 - n as f64 / 2.0;
            let mut row = vec![(i as u32, prefactor * sm * lm)];
            if prefactor == 0.0 {
                return row;
            }
            // S+ L-: central up one level (index down), one bath spin flips down
            if st.central > 0 {
                let amp = 0.5 * prefactor * ((half_s - sm) * (half_s + sm + 1.0)).sqrt();
                for site in 0..n {
                    if (st.bits >> site) & 1 == 1 {
                        let k = sector
                            .index_of(st.central - 1, st.bits ^ (1u64 << site))
                            .expect("S+L- stays in sector");
                        row.push((k as u32, amp));
                    }
                }
            }
            // S- L+
            if st.central < two_s {
                let amp = 0.5 * prefactor * ((half_s + sm) * (half_s - sm + 1.0)).sqrt();
                for site in 0..n {
                    if (st.bits >> site) & 1 == 0 {
                        let k = sector
                            .index_of(st.central + 1, st.bits ^ (1u64 << site))
                            .expect("S-L+ stays in sector");
                        row.push((k as u32, amp));
                    }
                }
            }
            row
        })
        .collect();
    SparseOperator::from_rows(sector.tag(), per_row, true)
}

/// Central-spin Zeeman term `omega * Sz`.
pub fn build_zeeman(sector: &BasisSector, omega: f64) -> SparseOperator {
    let two_s = sector.two_s();
    SparseOperator::diagonal(
        sector.tag(),
        sector
            .iter()
            .map(|st| omega * two_sm(two_s, st.central) as f64 / 2.0),
    )
}

/// Central `Sz` alone.
pub fn build_central_sz(sector: &BasisSector) -> SparseOperator {
    build_zeeman(sector, 1.0)
}

/// Bath `Lz`.
pub fn build_bath_lz(sector: &BasisSector) -> SparseOperator {
    let half_n = sector.n() as f64 / 2.0;
    SparseOperator::diagonal(
        sector.tag(),
        sector
            .iter()
            .map(|st| st.bits.count_ones() as f64 - half_n),
    )
}

/// Bath `L^2 = Lz^2 + (L+ L- + L- L+)/2`.
///
/// On product states the diagonal is `Lz^2 + N/2`, and every anti-aligned
/// pair of sites is exchanged with amplitude one.
pub fn build_l_squared(sector: &BasisSector) -> SparseOperator {
    let n = sector.n();
    let per_row: Vec<Vec<(u32, f64)>> = (0..sector.dim())
        .into_par_iter()
        .with_min_len(128)
        .map(|i| {
            let st = sector.state(i);
            let lz = st.bits.count_ones() as f64 - n as f64 / 2.0;
            let mut row = vec![(i as u32, lz * lz + n as f64 / 2.0)];
            for a in 0..n {
                if (st.bits >> a) & 1 == 0 {
                    continue;
                }
                for b in 0..n {
                    if (st.bits >> b) & 1 == 1 {
                        continue;
                    }
                    let flipped = st.bits ^ (1u64 << a) ^ (1u64 << b);
                    let k = sector
                        .index_of(st.central, flipped)
                        .expect("pair exchange stays in sector");
                    row.push((k as u32, 1.0));
                }
            }
            row
        })
        .collect();
    SparseOperator::from_rows(sector.tag(), per_row, true)
}

/// Total angular momentum `J^2 = S(S+1) + L^2 + 2 S.L` of the star.
pub fn build_total_j_squared(sector: &BasisSector) -> Result<SparseOperator> {
    let s = sector.two_s() as f64 / 2.0;
    let base = build_l_squared(sector).add_scaled(2.0, &build_system_bath(sector, 1.0))?;
    base.add_scaled(s * (s + 1.0), &SparseOperator::identity(sector))
}

/// Staggered magnetization `(1/N) sum_j (-1)^j Sz_j`, sites counted from 1.
pub fn build_staggered(sector: &BasisSector) -> SparseOperator {
    let n = sector.n();
    SparseOperator::diagonal(
        sector.tag(),
        sector.iter().map(|st| {
            let mut acc = 0.0;
            for site in 0..n {
                // site index j = site + 1
                let sign = if (site + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let sz = if (st.bits >> site) & 1 == 1 { 0.5 } else { -0.5 };
                acc += sign * sz;
            }
            acc / n as f64
        }),
    )
}

/// Which lowering operator to apply between adjacent sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lowering {
    /// Bath `L-`.
    Bath,
    /// Central `S-`.
    Central,
    /// Total `J- = S- + L-`.
    Total,
}

/// Applies a lowering operator to one block, producing a block in the
/// sector with `2m - 2`. The result is not normalized.
pub fn apply_lowering(block: &Block, which: Lowering) -> Result<Block> {
    let from = &block.sector;
    let tag = from.tag();
    let target = Arc::new(BasisSector::new(tag.n, tag.two_s, tag.two_m - 2)?);
    let mut out = vec![C64::new(0.0, 0.0); target.dim()];
    let two_s = tag.two_s;
    let half_s = two_s as f64 / 2.0;
    for (i, st) in from.iter().enumerate() {
        let a = block.amps[i];
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        if matches!(which, Lowering::Bath | Lowering::Total) {
            for site in 0..tag.n {
                if (st.bits >> site) & 1 == 1 {
                    let k = target
                        .index_of(st.central, st.bits ^ (1u64 << site))
                        .expect("L- target in sector");
                    out[k] += a;
                }
            }
        }
        if matches!(which, Lowering::Central | Lowering::Total) && st.central < two_s {
            let sm = two_sm(two_s, st.central) as f64 / 2.0;
            let amp = ((half_s + sm) * (half_s - sm + 1.0)).sqrt();
            let k = target
                .index_of(st.central + 1, st.bits)
                .expect("S- target in sector");
            out[k] += a * amp;
        }
    }
    Block::new(target, out)
}

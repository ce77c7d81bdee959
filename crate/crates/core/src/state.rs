//! State vectors over one or several magnetization sectors.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{BasisSector, SectorTag};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Amplitudes over a single sector.
#[derive(Debug, Clone)]
pub struct Block {
    pub sector: Arc<BasisSector>,
    pub amps: Vec<C64>,
}

impl Block {
    pub fn new(sector: Arc<BasisSector>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != sector.dim() {
            return Err(Error::DimensionMismatch {
                expected: sector.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { sector, amps })
    }

    pub fn tag(&self) -> SectorTag {
        self.sector.tag()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// A pure state split into magnetization blocks.
///
/// Blocks are kept sorted by `2m` and never repeat a sector. The
/// `normalized` flag records whether the vector is promised to have unit
/// norm; operator application clears it.
#[derive(Debug, Clone)]
pub struct StateVector {
    blocks: Vec<Block>,
    normalized: bool,
}

impl StateVector {
    /// Wraps blocks and rescales them to unit total norm.
    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self> {
        let mut s = Self::raw(blocks)?;
        s.normalize();
        Ok(s)
    }

    /// Wraps blocks without normalizing.
    pub fn raw(mut blocks: Vec<Block>) -> Result<Self> {
        blocks.sort_by_key(|b| b.tag().two_m);
        for w in blocks.windows(2) {
            if w[0].tag() == w[1].tag() {
                return Err(Error::SectorMismatch(format!(
                    "sector {} appears twice",
                    w[0].tag()
                )));
            }
        }
        Ok(Self {
            blocks,
            normalized: false,
        })
    }

    /// Single-sector state, normalized.
    pub fn single(sector: Arc<BasisSector>, amps: Vec<C64>) -> Result<Self> {
        Self::from_blocks(vec![Block::new(sector, amps)?])
    }

    /// Unit vector on one basis state.
    pub fn basis_state(sector: Arc<BasisSector>, index: usize) -> Result<Self> {
        if index >= sector.dim() {
            return Err(Error::OutOfRange {
                what: "basis index",
                value: index as i64,
                range: format!("0..{}", sector.dim()),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); sector.dim()];
        amps[index] = C64::new(1.0, 0.0);
        Self::single(sector, amps)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    pub fn block(&self, two_m: i32) -> Option<&Block> {
        self.blocks.iter().find(|b| b.tag().two_m == two_m)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub(crate) fn mark_unnormalized(&mut self) {
        self.normalized = false;
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(Block::norm_sqr).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm; a zero vector is left untouched.
    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for b in &mut self.blocks {
                b.amps.iter_mut().for_each(|a| *a *= inv);
            }
            self.normalized = true;
        }
    }

    /// Total dimension over all blocks.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.amps.len()).sum()
    }

    /// `<self|other>`; blocks present in only one state contribute nothing.
    pub fn inner(&self, other: &StateVector) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.blocks {
            if let Some(b) = other.blocks.iter().find(|b| b.tag() == a.tag()) {
                acc += a
                    .amps
                    .iter()
                    .zip(&b.amps)
                    .map(|(x, y)| x.conj() * y)
                    .sum::<C64>();
            }
        }
        acc
    }

    /// Weight `sum |amp|^2` carried by each block, in block order.
    pub fn sector_populations(&self) -> Vec<(i32, f64)> {
        self.blocks
            .iter()
            .map(|b| (b.tag().two_m, b.norm_sqr()))
            .collect()
    }

    /// Largest amplitude difference to `other`, sector by sector.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.blocks {
            match other.blocks.iter().find(|b| b.tag() == a.tag()) {
                Some(b) => {
                    for (x, y) in a.amps.iter().zip(&b.amps) {
                        worst = worst.max((x - y).norm());
                    }
                }
                None => {
                    worst = worst.max(a.amps.iter().map(|x| x.norm()).fold(0.0, f64::max));
                }
            }
        }
        for b in &other.blocks {
            if self.block(b.tag().two_m).is_none() {
                worst = worst.max(b.amps.iter().map(|x| x.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_is_unit() {
        let s = Arc::new(BasisSector::bath(4, 2).unwrap());
        let v = StateVector::basis_state(s.clone(), 3).unwrap();
        assert!(v.is_normalized());
        assert_eq!(v.norm(), 1.0);
        assert!(StateVector::basis_state(s, 6).is_err());
    }

    #[test]
    fn normalizes_across_blocks() {
        let a = Arc::new(BasisSector::bath(2, 0).unwrap());
        let b = Arc::new(BasisSector::bath(2, 2).unwrap());
        let v = StateVector::from_blocks(vec![
            Block::new(b, vec![C64::new(3.0, 0.0)]).unwrap(),
            Block::new(a, vec![C64::new(0.0, 4.0)]).unwrap(),
        ])
        .unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(v.blocks()[0].tag().two_m, -2);
        let pops = v.sector_populations();
        assert!((pops[0].1 - 0.64).abs() < 1e-15);
        assert!((v.inner(&v).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_duplicate_sectors_and_bad_lengths() {
        let a = Arc::new(BasisSector::bath(2, 1).unwrap());
        assert!(Block::new(a.clone(), vec![C64::new(1.0, 0.0)]).is_err());
        let blk = Block::new(a, vec![C64::new(1.0, 0.0); 2]).unwrap();
        assert!(StateVector::raw(vec![blk.clone(), blk]).is_err());
    }
}

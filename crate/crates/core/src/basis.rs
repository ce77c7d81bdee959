//! Magnetization-sector bases.
//!
//! A basis state is a central level together with an `N`-bit bath pattern.
//! Central index `c` runs over `0..=2S` and encodes `S_m = S - c`. Bit `i` of
//! the bath pattern (least significant bit = site 1) is set when site `i + 1`
//! points up. States are listed by ascending central index, then ascending
//! bath pattern, so the ordering is fully deterministic.
//!
//! The bath-only ring is the special case `two_s = 0` with one central level.

use crate::error::{Error, Result};
use crate::math::binomial;

/// Largest sector the enumerator will materialize.
pub const MAX_SECTOR_DIM: usize = 2_000_000;

/// Largest bath that fits the 64-bit pattern with room for the wrap logic.
pub const MAX_SITES: usize = 62;

/// Identifies a block: bath size, doubled central spin, doubled total
/// magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorTag {
    pub n: usize,
    pub two_s: u32,
    pub two_m: i32,
}

impl SectorTag {
    pub fn is_bath_only(&self) -> bool {
        self.two_s == 0
    }
}

impl std::fmt::Display for SectorTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N={} 2S={} 2m={}", self.n, self.two_s, self.two_m)
    }
}

/// One product basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub central: u32,
    pub bits: u64,
}

/// Enumerated basis of one total-magnetization block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSector {
    tag: SectorTag,
    // offsets[c]..offsets[c + 1] holds the (sorted) bath patterns of level c
    offsets: Vec<usize>,
    bits: Vec<u64>,
}

/// Doubled `S_m` of central index `c`.
#[inline]
pub fn two_sm(two_s: u32, central: u32) -> i32 {
    two_s as i32 - 2 * central as i32
}

/// All doubled magnetizations `2m` that carry at least one state.
pub fn admissible_two_m(n: usize, two_s: u32) -> Vec<i32> {
    let max = two_s as i32 + n as i32;
    (-max..=max).step_by(2).collect()
}

/// Number of up spins the bath needs so that level `central` lands in `two_m`.
fn bath_up_count(n: usize, two_s: u32, two_m: i32, central: u32) -> Option<usize> {
    let twice = two_m - two_sm(two_s, central) + n as i32;
    if twice < 0 || twice % 2 != 0 {
        return None;
    }
    let n_up = (twice / 2) as usize;
    (n_up <= n).then_some(n_up)
}

/// Enumerates bit patterns of width `n` with exactly `k` bits set, ascending.
fn patterns(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let x = next?;
        next = if x == 0 {
            None
        } else {
            // Gosper's hack
            let c = x & x.wrapping_neg();
            let r = x + c;
            let y = (((r ^ x) >> 2) / c) | r;
            (y < limit).then_some(y)
        };
        Some(x)
    })
}

impl BasisSector {
    /// Basis of the star block with doubled total magnetization `two_m`.
    pub fn new(n: usize, two_s: u32, two_m: i32) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::OutOfRange {
                what: "N",
                value: n as i64,
                range: format!("1..={MAX_SITES}"),
            });
        }
        let max = two_s as i32 + n as i32;
        if two_m.abs() > max {
            return Err(Error::EmptySector { two_m, max });
        }
        if (two_m + max) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "2m = {two_m} has the wrong parity for N = {n}, 2S = {two_s}"
            )));
        }
        let counts: Vec<Option<usize>> = (0..=two_s)
            .map(|c| bath_up_count(n, two_s, two_m, c))
            .collect();
        let dim: u128 = counts
            .iter()
            .map(|k| k.map_or(0, |k| binomial(n as u64, k as u64)))
            .sum();
        if dim > MAX_SECTOR_DIM as u128 {
            return Err(Error::CapacityExceeded {
                dim: dim.min(usize::MAX as u128) as usize,
                limit: MAX_SECTOR_DIM,
            });
        }
        let mut offsets = Vec::with_capacity(counts.len() + 1);
        let mut bits = Vec::with_capacity(dim as usize);
        offsets.push(0);
        for k in &counts {
            if let Some(k) = *k {
                bits.extend(patterns(n, k));
            }
            offsets.push(bits.len());
        }
        debug_assert_eq!(bits.len() as u128, dim);
        Ok(Self {
            tag: SectorTag { n, two_s, two_m },
            offsets,
            bits,
        })
    }

    /// Basis of the isolated ring with `n_up` up spins.
    pub fn bath(n: usize, n_up: usize) -> Result<Self> {
        if n_up > n {
            return Err(Error::OutOfRange {
                what: "n_up",
                value: n_up as i64,
                range: format!("0..={n}"),
            });
        }
        Self::new(n, 0, 2 * n_up as i32 - n as i32)
    }

    pub fn tag(&self) -> SectorTag {
        self.tag
    }

    pub fn n(&self) -> usize {
        self.tag.n
    }

    pub fn two_s(&self) -> u32 {
        self.tag.two_s
    }

    pub fn two_m(&self) -> i32 {
        self.tag.two_m
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    /// Number of central levels (`2S + 1`).
    pub fn levels(&self) -> u32 {
        self.tag.two_s + 1
    }

    /// Index range occupied by central level `c`.
    pub fn level_range(&self, central: u32) -> std::ops::Range<usize> {
        self.offsets[central as usize]..self.offsets[central as usize + 1]
    }

    pub fn state(&self, index: usize) -> BasisState {
        // number of block starts <= index, minus one
        let central = self.offsets.partition_point(|&o| o <= index) - 1;
        BasisState {
            central: central as u32,
            bits: self.bits[index],
        }
    }

    /// Bath pattern at `index`.
    #[inline]
    pub fn bits(&self, index: usize) -> u64 {
        self.bits[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..=self.tag.two_s).flat_map(move |c| {
            self.bits[self.level_range(c)]
                .iter()
                .map(move |&bits| BasisState { central: c, bits })
        })
    }

    /// Position of `(central, bits)`, or `None` when it lies outside the sector.
    #[inline]
    pub fn index_of(&self, central: u32, bits: u64) -> Option<usize> {
        if central > self.tag.two_s {
            return None;
        }
        let range = self.level_range(central);
        let start = range.start;
        self.bits[range].binary_search(&bits).ok().map(|i| start + i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stretched_state() {
        let s = BasisSector::new(2, 1, 3).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.state(0), BasisState { central: 0, bits: 0b11 });
    }

    #[test]
    fn brute_force_dimension() {
        // count all 2 * 2^4 product states with total magnetization 1/2
        let mut count = 0;
        for c in 0..2u32 {
            for bits in 0u64..16 {
                let two_m = two_sm(1, c) + 2 * bits.count_ones() as i32 - 4;
                if two_m == 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 10);
        assert_eq!(BasisSector::new(4, 1, 1).unwrap().dim(), count);
    }

    #[test]
    fn empty_and_bad_parity() {
        assert_eq!(
            BasisSector::new(4, 1, 7),
            Err(Error::EmptySector { two_m: 7, max: 5 })
        );
        assert!(matches!(
            BasisSector::new(4, 1, 2),
            Err(Error::InvalidQuantumNumbers(_))
        ));
    }

    #[test]
    fn bath_sectors() {
        assert_eq!(BasisSector::bath(4, 2).unwrap().dim(), 6);
        assert_eq!(BasisSector::bath(16, 8).unwrap().dim(), 12870);
        assert!(BasisSector::bath(4, 5).is_err());
        let s = BasisSector::bath(4, 0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.bits(0), 0);
    }

    #[test]
    fn capacity_limit() {
        assert!(matches!(
            BasisSector::bath(26, 13),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn ordering_is_ascending() {
        let s = BasisSector::new(6, 3, 1).unwrap();
        let states: Vec<_> = s.iter().collect();
        assert!(states.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(states.len(), s.dim());
    }

    proptest! {
        #[test]
        fn index_round_trip(n in (1usize..=5).prop_map(|h| 2 * h), two_s in 0u32..=4, pick in 0usize..1000) {
            let m = admissible_two_m(n, two_s);
            let two_m = m[pick % m.len()];
            let s = BasisSector::new(n, two_s, two_m).unwrap();
            for i in 0..s.dim() {
                let st = s.state(i);
                prop_assert_eq!(s.index_of(st.central, st.bits), Some(i));
                let total = two_sm(two_s, st.central) + 2 * st.bits.count_ones() as i32 - n as i32;
                prop_assert_eq!(total, two_m);
            }
        }

        #[test]
        fn dimensions_sum_to_full_space(n in (1usize..=5).prop_map(|h| 2 * h), two_s in 0u32..=5) {
            let total: usize = admissible_two_m(n, two_s)
                .into_iter()
                .map(|m| BasisSector::new(n, two_s, m).unwrap().dim())
                .sum();
            prop_assert_eq!(total, (two_s as usize + 1) << n);
        }
    }
}

//! Initial states and closed-form star eigenstates.
//!
//! Sub-ground states are assembled from the lowest bath multiplet with spin
//! `l`: the highest-weight member comes from the sector ground state with
//! `l_m = l`, and the remaining members from repeated normalized `L-`.
//! Because `L-` commutes with the ring, every member belongs to the same
//! multiplet even when other multiplets share the energy.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basis::{two_sm, BasisSector};
use crate::eigen::LanczosConfig;
use crate::error::{Error, Result};
use crate::math::{binomial, binomial_big, ln_factorial};
use crate::operator::{apply_lowering, Lowering};
use crate::spectrum::bath_subground;
use crate::state::{Block, StateVector, C64};

/// Antiferromagnetic product state `|dn up dn up ...>`, site 1 down.
pub fn neel_state(n: usize) -> Result<StateVector> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::OddBathSize(n));
    }
    let bits = (0..n)
        .filter(|site| site % 2 == 1)
        .fold(0u64, |acc, site| acc | (1u64 << site));
    let sector = Arc::new(BasisSector::bath(n, n / 2)?);
    let index = sector.index_of(0, bits).expect("Neel pattern has N/2 up spins");
    StateVector::basis_state(sector, index)
}

/// Initial state of the central spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralKind {
    /// `|S>`
    Polarized,
    /// Equal-weight superposition of all `2S + 1` levels.
    Uniform,
}

impl FromStr for CentralKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polarized" => Ok(Self::Polarized),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

impl std::fmt::Display for CentralKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Polarized => "polarized",
            Self::Uniform => "uniform",
        })
    }
}

/// Normalized amplitudes over central indices `0..=2S` (`S_m = S - index`).
pub fn central_initial(two_s: u32, kind: CentralKind) -> Vec<f64> {
    let levels = two_s as usize + 1;
    match kind {
        CentralKind::Polarized => {
            let mut v = vec![0.0; levels];
            v[0] = 1.0;
            v
        }
        CentralKind::Uniform => vec![1.0 / (levels as f64).sqrt(); levels],
    }
}

/// `central ⊗ bath`, regrouped into total-magnetization blocks.
pub fn product_state(central: &[C64], bath: &StateVector) -> Result<StateVector> {
    if central.is_empty() {
        return Err(Error::InvalidQuantumNumbers("no central levels".into()));
    }
    let two_s = (central.len() - 1) as u32;
    let mut blocks: BTreeMap<i32, (Arc<BasisSector>, Vec<C64>)> = BTreeMap::new();
    for b in bath.blocks() {
        let tag = b.tag();
        if !tag.is_bath_only() {
            return Err(Error::SectorMismatch(format!(
                "expected a bath-only block, found {tag}"
            )));
        }
        for (c, &a) in central.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let c = c as u32;
            let two_m = two_sm(two_s, c) + tag.two_m;
            let (sector, amps) = match blocks.entry(two_m) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    let s = Arc::new(BasisSector::new(tag.n, two_s, two_m)?);
                    let dim = s.dim();
                    e.insert((s, vec![C64::new(0.0, 0.0); dim]))
                }
            };
            for (k, &x) in b.amps.iter().enumerate() {
                if x != C64::new(0.0, 0.0) {
                    let i = sector
                        .index_of(c, b.sector.bits(k))
                        .expect("product state lands in its sector");
                    amps[i] += a * x;
                }
            }
        }
    }
    let blocks = blocks
        .into_values()
        .map(|(s, a)| Block::new(s, a))
        .collect::<Result<Vec<_>>>()?;
    StateVector::from_blocks(blocks)
}

/// Symmetric Dicke state `|N/2, n - N/2>` with `n` up spins.
pub fn dicke_state(n: usize, n_up: usize) -> Result<StateVector> {
    let sector = Arc::new(BasisSector::bath(n, n_up)?);
    let amp = 1.0 / (sector.dim() as f64).sqrt();
    let amps = vec![C64::new(amp, 0.0); sector.dim()];
    StateVector::single(sector, amps)
}

/// Spin coherent state parameters: direction `(theta, phi)`, stereographic
/// coordinate `z = cot(theta/2) e^{-i phi}` and Dicke weights `Q_n`.
#[derive(Debug, Clone)]
pub struct CoherentSpec {
    pub theta: f64,
    pub phi: f64,
    /// `None` at `theta = 0`, where `z` diverges.
    pub z: Option<C64>,
    pub q: Vec<C64>,
}

impl CoherentSpec {
    /// `Q_n = z^n / (1 + |z|^2)^{N/2} sqrt(C(N, n))`, evaluated as
    /// `cos^n(theta/2) sin^{N-n}(theta/2) sqrt(C(N, n)) e^{-i n phi}`.
    pub fn new(n: usize, theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFiniteCoupling {
                name: "theta/phi",
                value: if theta.is_finite() { phi } else { theta },
            });
        }
        // the poles are exact: cos(pi/2) is not zero in floating point
        if theta == 0.0 || theta == std::f64::consts::PI {
            let top = theta == 0.0;
            let mut q = vec![C64::new(0.0, 0.0); n + 1];
            q[if top { n } else { 0 }] = C64::new(1.0, 0.0);
            return Ok(Self {
                theta,
                phi,
                z: if top { None } else { Some(C64::new(0.0, 0.0)) },
                q,
            });
        }
        let (sin, cos) = (theta / 2.0).sin_cos();
        let z = C64::from_polar(cos / sin, -phi);
        let q = (0..=n)
            .map(|k| {
                let mag = cos.powi(k as i32)
                    * sin.powi((n - k) as i32)
                    * (binomial(n as u64, k as u64) as f64).sqrt();
                C64::from_polar(mag, -(k as f64) * phi)
            })
            .collect();
        Ok(Self {
            theta,
            phi,
            z: Some(z),
            q,
        })
    }

    pub fn weight_sum(&self) -> f64 {
        self.q.iter().map(|q| q.norm_sqr()).sum()
    }
}

/// `sum_n Q_n |N/2, n - N/2>`; blocks with vanishing weight are omitted.
pub fn spin_coherent(n: usize, theta: f64, phi: f64) -> Result<StateVector> {
    let spec = CoherentSpec::new(n, theta, phi)?;
    let mut blocks = Vec::new();
    for (k, &q) in spec.q.iter().enumerate() {
        if q.norm() == 0.0 {
            continue;
        }
        let dicke = dicke_state(n, k)?;
        let mut b = dicke.into_blocks().pop().expect("one block");
        b.amps.iter_mut().for_each(|a| *a *= q);
        blocks.push(b);
    }
    StateVector::from_blocks(blocks)
}

fn check_subground_numbers(two_s: u32, two_l: u32, two_m: i32) -> Result<()> {
    let j2 = two_l.abs_diff(two_s) as i32;
    if two_m.abs() > j2 || (two_m + j2) % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "2m = {two_m} is not a projection of 2j = |2l - 2S| = {j2}"
        )));
    }
    Ok(())
}

/// Unnormalized coefficients of the sub-ground state with total spin
/// `|l - S|` and projection `m`.
///
/// For `S <= l` the pairs are `(2 S_m, A_{S_m})` for `S_m = S, S-1, ..., -S`:
///
/// `A_{S_m} = (-1)^{S-S_m} sqrt(C(2S, S+S_m))
///            sqrt[(l+m-S_m)! (l-m+S_m)! / ((l+m-S)! (l-m+S)!)]`,
///
/// so `A_S = 1`. For `l < S` the roles of `(S, S_m)` and `(l, l_m)` swap and
/// the pairs are `(2 l_m, B_{l_m})`.
pub fn subground_coefficients(two_s: u32, two_l: u32, two_m: i32) -> Result<Vec<(i32, f64)>> {
    check_subground_numbers(two_s, two_l, two_m)?;
    // `a` is the spin summed over, `b` the other one
    let (two_a, two_b) = if two_s <= two_l {
        (two_s as i32, two_l as i32)
    } else {
        (two_l as i32, two_s as i32)
    };
    let half = |x: i32| -> u64 {
        debug_assert!(x >= 0 && x % 2 == 0);
        (x / 2) as u64
    };
    let norm_den = ln_factorial(half(two_b + two_m - two_a)) + ln_factorial(half(two_b - two_m + two_a));
    let a_top = half(2 * two_a);
    Ok((0..=two_a)
        .map(|k| {
            let two_q = two_a - 2 * k;
            let ln_c = ln_factorial(a_top)
                - ln_factorial(half(two_a + two_q))
                - ln_factorial(half(two_a - two_q));
            let ln_f = ln_factorial(half(two_b + two_m - two_q))
                + ln_factorial(half(two_b - two_m + two_q))
                - norm_den;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (two_q, sign * (0.5 * (ln_c + ln_f)).exp())
        })
        .collect())
}

fn factorial_big(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact squared norm of the unnormalized highest-weight sub-ground state
/// (`m = l - S`, `S <= l`), summing `A_{S_m}^2` in rational arithmetic.
/// Equals `C(2l+1, 2S)`.
pub fn highest_weight_norm_sq(two_s: u32, two_l: u32) -> Result<BigRational> {
    if two_s > two_l || (two_l - two_s) % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "highest weight needs S <= l with l - S integral (2S = {two_s}, 2l = {two_l})"
        )));
    }
    let (two_s, two_l) = (two_s as i64, two_l as i64);
    let two_m = two_l - two_s;
    let f = |x: i64| factorial_big((x / 2) as u64);
    let den = f(two_l + two_m - two_s) * f(two_l - two_m + two_s);
    let mut total = BigRational::zero();
    let mut two_sm = two_s;
    while two_sm >= -two_s {
        let c = BigInt::from(binomial_big(two_s as u64, ((two_s + two_sm) / 2) as u64));
        let num = c * f(two_l + two_m - two_sm) * f(two_l - two_m + two_sm);
        total += BigRational::new(num, den.clone());
        two_sm -= 2;
    }
    Ok(total)
}

/// The lowest ring multiplet with spin `l`, all `2l + 1` members.
#[derive(Debug, Clone)]
pub struct BathMultiplet {
    pub n: usize,
    pub l: usize,
    pub e1b: f64,
    /// Members ordered from `l_m = l` down to `l_m = -l`.
    pub members: Vec<Block>,
}

impl BathMultiplet {
    pub fn compute(n: usize, l: usize, cfg: &LanczosConfig) -> Result<Self> {
        let ground = bath_subground(n, l, cfg)?;
        let top = Block::new(
            ground.sector.clone(),
            ground.vector.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )?;
        let mut members = vec![top];
        for _ in 0..2 * l {
            let prev = members.last().expect("non-empty");
            let mut next = apply_lowering(prev, Lowering::Bath)?;
            let norm = next.norm_sqr().sqrt();
            next.amps.iter_mut().for_each(|a| *a /= norm);
            members.push(next);
        }
        Ok(Self {
            n,
            l,
            e1b: ground.energy,
            members,
        })
    }

    /// Member with doubled projection `two_lm`.
    pub fn member(&self, two_lm: i32) -> Option<&Block> {
        let top = 2 * self.l as i32;
        if two_lm.abs() > top || (top - two_lm) % 2 != 0 {
            return None;
        }
        self.members.get(((top - two_lm) / 2) as usize)
    }
}

/// A normalized sub-ground eigenstate of the star.
#[derive(Debug, Clone)]
pub struct SubgroundState {
    pub state: StateVector,
    /// Energy `E1b(l)` of the bath multiplet at unit intrabath coupling.
    pub e1b: f64,
    pub two_j: u32,
}

/// Assembles the sub-ground state `(l, j = |l - S|, m)` from a bath multiplet.
pub fn subground_state_from(
    multiplet: &BathMultiplet,
    two_s: u32,
    two_m: i32,
) -> Result<SubgroundState> {
    let two_l = 2 * multiplet.l as u32;
    let coeffs = subground_coefficients(two_s, two_l, two_m)?;
    let sector = Arc::new(BasisSector::new(multiplet.n, two_s, two_m)?);
    let mut amps = vec![C64::new(0.0, 0.0); sector.dim()];
    for (two_q, coef) in coeffs {
        // (2 S_m, 2 l_m) of this term
        let (two_sm_val, two_lm) = if two_s <= two_l {
            (two_q, two_m - two_q)
        } else {
            (two_m - two_q, two_q)
        };
        let central = ((two_s as i32 - two_sm_val) / 2) as u32;
        let member = multiplet.member(two_lm).ok_or_else(|| {
            Error::InvalidQuantumNumbers(format!("bath projection 2l_m = {two_lm} missing"))
        })?;
        for (k, &x) in member.amps.iter().enumerate() {
            let i = sector
                .index_of(central, member.sector.bits(k))
                .expect("term lands in the star sector");
            amps[i] += coef * x;
        }
    }
    Ok(SubgroundState {
        state: StateVector::single(sector, amps)?,
        e1b: multiplet.e1b,
        two_j: two_l.abs_diff(two_s),
    })
}

/// Sub-ground state `(N, S, l, m)`, solving the bath multiplet on the way.
pub fn subground_state(n: usize, two_s: u32, two_l: u32, two_m: i32) -> Result<SubgroundState> {
    if two_l % 2 != 0 || two_l as usize > n {
        return Err(Error::InvalidQuantumNumbers(format!(
            "2l = {two_l} is not an even number in 0..={n}"
        )));
    }
    check_subground_numbers(two_s, two_l, two_m)?;
    let multiplet = BathMultiplet::compute(n, two_l as usize / 2, &LanczosConfig::default())?;
    subground_state_from(&multiplet, two_s, two_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{build_bath_ring, build_l_squared, build_staggered};

    #[test]
    fn neel_pattern() {
        let s = neel_state(2).unwrap();
        let b = &s.blocks()[0];
        let hot = b.amps.iter().position(|a| a.norm() == 1.0).unwrap();
        assert_eq!(b.sector.bits(hot), 0b10);
        let s = neel_state(8).unwrap();
        let b = &s.blocks()[0];
        assert_eq!(b.tag().two_m, 0);
        let ms = build_staggered(&b.sector);
        assert_eq!(ms.expectation(&b.amps), 0.5);
        assert!(neel_state(5).is_err());
    }

    #[test]
    fn central_states() {
        assert_eq!(central_initial(3, CentralKind::Polarized), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(central_initial(3, CentralKind::Uniform), vec![0.5; 4]);
        let r = central_initial(1, CentralKind::Uniform);
        assert!((r[0] - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
        assert_eq!("uniform".parse::<CentralKind>().unwrap(), CentralKind::Uniform);
        assert!(matches!(
            "bogus".parse::<CentralKind>(),
            Err(Error::UnknownKind(_))
        ));
    }

    #[test]
    fn dicke_members() {
        let top = dicke_state(5, 5).unwrap();
        assert_eq!(top.blocks()[0].amps, vec![C64::new(1.0, 0.0)]);
        let d = dicke_state(4, 2).unwrap();
        let b = &d.blocks()[0];
        assert_eq!(b.amps.len(), 6);
        for a in &b.amps {
            assert!((a.re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        }
        assert!(dicke_state(4, 5).is_err());
        for k in 0..=6 {
            let d = dicke_state(6, k).unwrap();
            let b = &d.blocks()[0];
            let l2 = build_l_squared(&b.sector).expectation(&b.amps);
            assert!((l2 - 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_weights() {
        let spec = CoherentSpec::new(2, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let want = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (q, w) in spec.q.iter().zip(want) {
            assert!((q - C64::new(w, 0.0)).norm() < 1e-15);
        }
        let n = 10;
        let spec = CoherentSpec::new(n, std::f64::consts::FRAC_PI_2, 1.1).unwrap();
        for (k, q) in spec.q.iter().enumerate() {
            let p = binomial(n as u64, k as u64) as f64 / 1024.0;
            assert!((q.norm_sqr() - p).abs() < 1e-15);
        }
        assert!((spec.weight_sum() - 1.0).abs() < 1e-12);
        let top = CoherentSpec::new(n, 0.0, 0.3).unwrap();
        assert!(top.z.is_none());
        assert_eq!(top.q[n], C64::new(1.0, 0.0));
    }

    #[test]
    fn coherent_state_poles() {
        let up = spin_coherent(6, 0.0, 0.0).unwrap();
        assert_eq!(up.blocks().len(), 1);
        assert_eq!(up.blocks()[0].sector.bits(0), 0b111111);
        let down = spin_coherent(6, std::f64::consts::PI, 0.0).unwrap();
        let b = &down.blocks()[0];
        assert_eq!(b.sector.bits(0), 0);
        assert!((b.amps[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_is_ring_eigenstate() {
        let n = 8;
        let omega = spin_coherent(n, 1.0, 0.4).unwrap();
        assert!((omega.norm() - 1.0).abs() < 1e-12);
        let mut worst: f64 = 0.0;
        for b in omega.blocks() {
            let h = build_bath_ring(&b.sector, 1.0, 1.0);
            let hb = h.matvec(&b.amps);
            for (x, y) in hb.iter().zip(&b.amps) {
                worst = worst.max((x - y * (n as f64 / 4.0)).norm());
            }
        }
        assert!(worst <= 1e-12);
    }

    #[test]
    fn spin_half_coefficient_ratio() {
        for two_l in [1u32, 3, 5, 7] {
            for two_m in (-(two_l as i32 - 1)..=(two_l as i32 - 1)).step_by(2) {
                let c = subground_coefficients(1, two_l, two_m).unwrap();
                let (l, m) = (two_l as f64 / 2.0, two_m as f64 / 2.0);
                let want = -((l + m + 0.5) / (l - m + 0.5)).sqrt();
                assert_eq!(c[0], (1, 1.0));
                assert!((c[1].1 / c[0].1 - want).abs() < 1e-13);
            }
        }
        let hw = highest_weight_norm_sq(1, 1).unwrap();
        assert_eq!(hw, BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn appendix_ratio_holds_for_every_pair() {
        for two_s in 1..=6u32 {
            for two_l in (two_s % 2..=12).step_by(2) {
                if two_l < two_s {
                    continue;
                }
                let j2 = (two_l - two_s) as i32;
                for two_m in (-j2..=j2).step_by(2) {
                    let c = subground_coefficients(two_s, two_l, two_m).unwrap();
                    let (s, l, m) = (two_s as f64 / 2.0, two_l as f64 / 2.0, two_m as f64 / 2.0);
                    for w in c.windows(2) {
                        let sm = w[1].0 as f64 / 2.0;
                        let want = -((s + sm + 1.0) * (l + m - sm)
                            / ((s - sm) * (l - m + sm + 1.0)))
                            .sqrt();
                        assert!((w[1].1 / w[0].1 - want).abs() < 1e-12 * want.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_projection() {
        assert!(subground_coefficients(2, 4, 4).is_err());
        assert!(subground_coefficients(2, 4, 1).is_err());
        assert!(subground_coefficients(4, 2, 2).is_ok());
        assert!(highest_weight_norm_sq(4, 2).is_err());
    }

    /// Rayleigh quotient and residual `||H v - <H> v||` in the star.
    fn residual(sg: &SubgroundState, two_s: u32, j: f64, g: f64) -> (f64, f64) {
        use crate::hamiltonian::{Form, Hamiltonian};
        use crate::params::ModelParams;
        let b = &sg.state.blocks()[0];
        let p = ModelParams::new(b.sector.n(), two_s, j, j, g, 0.0).unwrap();
        let h = Hamiltonian::new(p, Form::Star).sector_operator(&b.sector).unwrap();
        let hv = h.matvec(&b.amps);
        let ev = h.expectation(&b.amps);
        let r = hv
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| (x - y * ev).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (ev, r)
    }

    #[test]
    fn four_site_examples() {
        let (j, g) = (0.9, 0.35);
        // S = 1, l = 2, m = 1: E = J - 3g
        let sg = subground_state(4, 2, 4, 2).unwrap();
        assert!((sg.e1b - 1.0).abs() < 1e-12);
        let (e, r) = residual(&sg, 2, j, g);
        assert!(r <= 1e-8);
        assert!((e - (j - 3.0 * g)).abs() <= 1e-8);
        // S = 2, l = 1, m = -1: E = J E1b(1) - 3g
        let sg = subground_state(4, 4, 2, -2).unwrap();
        let (e, r) = residual(&sg, 4, j, g);
        assert!(r <= 1e-8);
        assert!((e - (j * sg.e1b - 3.0 * g)).abs() <= 1e-8);
        assert!((sg.e1b + 1.0).abs() < 1e-12);
    }

    #[test]
    fn multiplet_members_are_orthonormal() {
        let m = BathMultiplet::compute(6, 2, &LanczosConfig::default()).unwrap();
        let states: Vec<_> = (-1..=1)
            .map(|k| subground_state_from(&m, 2, 2 * k).unwrap().state)
            .collect();
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((sa.inner(sb).norm() - want).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn highest_weight_norm_is_binomial() {
        for two_s in 1..=12u32 {
            for two_l in (two_s..=12).step_by(2) {
                let got = highest_weight_norm_sq(two_s, two_l).unwrap();
                let want = BigInt::from(binomial_big(two_l as u64 + 1, two_s as u64));
                assert_eq!(got, BigRational::from_integer(want), "2S={two_s} 2l={two_l}");
            }
        }
    }
}

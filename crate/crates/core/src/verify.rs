//! Self-checks run by `spinstar verify`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{admissible_two_m, BasisSector};
use crate::eigen::LanczosConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{Form, Hamiltonian};
use crate::krylov::{evolve, KrylovConfig};
use crate::operator::{build_l_squared, build_total_j_squared};
use crate::oracle::DensePropagator;
use crate::params::ModelParams;
use crate::spectrum::{degeneracy, state_count, sub_ground_energy, LevelTable};
use crate::state::{Block, StateVector, C64};
use crate::states::{subground_state_from, BathMultiplet};

/// One named check with its measured value and the bound it must meet.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.3e}, threshold {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Bath,
    Subground,
    DynamicsOracle,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Self::Identities),
            "bath" => Ok(Self::Bath),
            "subground" => Ok(Self::Subground),
            "dynamics-oracle" => Ok(Self::DynamicsOracle),
            "all" => Ok(Self::All),
            other => Err(Error::Unsupported(format!("unknown suite `{other}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Identities => "identities",
            Self::Bath => "bath",
            Self::Subground => "subground",
            Self::DynamicsOracle => "dynamics-oracle",
            Self::All => "all",
        })
    }
}

/// Runs a suite; `n` overrides the default bath size where one applies.
pub fn run_suite(suite: Suite, n: Option<usize>) -> Result<Vec<Check>> {
    match suite {
        Suite::Identities => identities(n),
        Suite::Bath => bath(n.unwrap_or(12)),
        Suite::Subground => subground(n.unwrap_or(8)),
        Suite::DynamicsOracle => dynamics_oracle(n.unwrap_or(6)),
        Suite::All => {
            let mut out = identities(n)?;
            out.extend(bath(n.unwrap_or(12))?);
            out.extend(subground(n.unwrap_or(8))?);
            out.extend(dynamics_oracle(n.unwrap_or(6))?);
            Ok(out)
        }
    }
}

fn exact(name: String, ok: bool) -> Check {
    Check {
        name,
        passed: ok,
        measured: if ok { 0.0 } else { 1.0 },
        threshold: 0.0,
    }
}

/// Multiplet counting and state counting, in exact integers.
pub fn identities(n: Option<usize>) -> Result<Vec<Check>> {
    let sizes = n.map_or(vec![4, 8, 12, 16], |n| vec![n]);
    let mut out = Vec::new();
    for &n in &sizes {
        let mut total = BigUint::zero();
        for l in 0..=n / 2 {
            total += degeneracy(n, l)? * BigUint::from(2 * l + 1);
        }
        out.push(exact(
            format!("sum_l (2l+1) d(N={n}, l) = 2^N"),
            total == BigUint::one() << n,
        ));
        let spins: BTreeSet<u32> = [1, 4, n as u32 - 2, n as u32]
            .into_iter()
            .filter(|&s| s >= 1 && s as usize <= n)
            .collect();
        for two_s in spins {
            let counted: usize = admissible_two_m(n, two_s)
                .into_iter()
                .map(|m| BasisSector::new(n, two_s, m).map(|s| s.dim()))
                .sum::<Result<usize>>()
                .unwrap_or(0);
            let formula = state_count(n, two_s)?;
            let ok = formula == BigUint::from(two_s + 1) << n
                && (n > 20 || formula == BigUint::from(counted));
            out.push(exact(format!("state count (N={n}, 2S={two_s}) = (2S+1) 2^N"), ok));
        }
    }
    Ok(out)
}

/// Ring anchors and the Lieb-Mattis order.
pub fn bath(n: usize) -> Result<Vec<Check>> {
    let table = LevelTable::compute(n, &LanczosConfig::default())?;
    let q = n as f64 / 4.0;
    Ok(vec![
        Check::at_most(format!("E1b(N/2) = N/4, N={n}"), (table.e1b(n / 2) - q).abs(), 1e-9),
        Check::at_most(
            format!("E1b(N/2-1) = N/4 - 2, N={n}"),
            (table.e1b(n / 2 - 1) - (q - 2.0)).abs(),
            1e-9,
        ),
        Check {
            name: format!("Lieb-Mattis order E1b(l) < E1b(l+1), N={n}"),
            passed: table.min_level_spacing() > 0.0,
            measured: -table.min_level_spacing(),
            threshold: 0.0,
        },
    ])
}

/// Eigen-residuals of the assembled sub-ground states for `2S = 1..=4`.
pub fn subground(n: usize) -> Result<Vec<Check>> {
    let (j, g) = (0.8, 0.6);
    let mut res: f64 = 0.0;
    let mut jsq: f64 = 0.0;
    let mut lsq: f64 = 0.0;
    let mut count = 0;
    let multiplets = (0..=n / 2)
        .map(|l| BathMultiplet::compute(n, l, &LanczosConfig::default()))
        .collect::<Result<Vec<_>>>()?;
    for two_s in 1..=4u32.min(n as u32) {
        let p = ModelParams::new(n, two_s, j, j, g, 0.0)?;
        let ham = Hamiltonian::new(p, Form::Star);
        for m in &multiplets {
            let two_l = 2 * m.l as u32;
            let two_j = two_l.abs_diff(two_s) as i32;
            let jj = two_j as f64 / 2.0;
            let l = m.l as f64;
            let e = sub_ground_energy(two_l, two_s, j, g, m.e1b);
            for two_m in (-two_j..=two_j).step_by(2) {
                let sg = subground_state_from(m, two_s, two_m)?;
                let b = &sg.state.blocks()[0];
                let h = ham.sector_operator(&b.sector)?;
                let hv = h.matvec(&b.amps);
                let r = hv
                    .iter()
                    .zip(&b.amps)
                    .map(|(x, y)| (x - y * e).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                res = res.max(r);
                let j2 = build_total_j_squared(&b.sector)?.expectation(&b.amps);
                jsq = jsq.max((j2 - jj * (jj + 1.0)).abs());
                let l2 = build_l_squared(&b.sector).expectation(&b.amps);
                lsq = lsq.max((l2 - l * (l + 1.0)).abs());
                count += 1;
            }
        }
    }
    Ok(vec![
        Check::at_most(format!("sub-ground residual, N={n}, {count} states"), res, 1e-8),
        Check::at_most(format!("sub-ground <J^2> = j(j+1), N={n}"), jsq, 1e-8),
        Check::at_most(format!("sub-ground <L^2> = l(l+1), N={n}"), lsq, 1e-8),
    ])
}

/// Normalized pseudo-random state over every sector of `(N, 2S)`.
pub fn random_state(n: usize, two_s: u32, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = admissible_two_m(n, two_s)
        .into_iter()
        .map(|m| {
            let s = Arc::new(BasisSector::new(n, two_s, m)?);
            let amps = (0..s.dim())
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            Block::new(s, amps)
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::from_blocks(blocks)
}

/// Krylov against the dense propagator on a random full-star state,
/// `gt t in [0, 20]`.
pub fn dynamics_oracle(n: usize) -> Result<Vec<Check>> {
    if n > 10 {
        return Err(Error::Unsupported(format!(
            "dense oracle limited to N <= 10, got {n}"
        )));
    }
    let two_s = 2;
    let p = ModelParams::from_ratio(n, two_s, 0.7, 1.0)?;
    let ham = Hamiltonian::new(p, Form::Star);
    let psi = random_state(n, two_s, 7)?;
    let times: Vec<f64> = (0..=80).map(|k| k as f64 * 0.25).collect();
    let cfg = KrylovConfig::default();
    let mut amp_err: f64 = 0.0;
    let mut norm_err: f64 = 0.0;
    let mut energy_err: f64 = 0.0;
    for b in psi.blocks() {
        let h = ham.sector_operator(&b.sector)?;
        let dense = DensePropagator::new(&h);
        let n0: f64 = b.norm_sqr();
        let e0 = h.expectation(&b.amps);
        evolve(&h, &b.amps, &times, &cfg, |k, x| {
            let want = dense.apply(&b.amps, times[k]);
            for (a, w) in x.iter().zip(&want) {
                amp_err = amp_err.max((a - w).norm());
            }
            let nx: f64 = x.iter().map(|a| a.norm_sqr()).sum();
            norm_err = norm_err.max((nx.sqrt() - n0.sqrt()).abs());
            energy_err = energy_err.max((h.expectation(x) - e0).abs());
        })?;
    }
    Ok(vec![
        Check::at_most(format!("Krylov vs dense amplitudes, N={n}"), amp_err, 1e-9),
        Check::at_most(format!("Krylov unitarity, N={n}"), norm_err, 1e-10),
        Check::at_most(format!("Krylov energy drift, N={n}"), energy_err, 1e-9),
    ])
}

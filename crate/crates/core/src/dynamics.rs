//! Sector-wise time evolution and the two quench experiments.
//!
//! Both Hamiltonians conserve the total magnetization, so every block of the
//! initial state evolves on its own. Blocks run in parallel; per-block
//! expectation values are reduced in block order, which keeps the sums
//! independent of thread scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{Form, Hamiltonian};
use crate::krylov::{evolve, KrylovConfig, KrylovStats};
use crate::operator::{build_central_sz, build_l_squared, build_staggered, SparseOperator};
use crate::params::ModelParams;
use crate::state::{StateVector, C64};
use crate::states::{central_initial, neel_state, product_state, spin_coherent, CentralKind};

/// Observables tracked during an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// Central `Sz`.
    CentralSz,
    /// Central `Sz / S`.
    Polarization,
    /// Staggered magnetization `m_s` of the bath.
    Staggered,
    /// Bath total spin `L^2`.
    LSquared,
    /// The Hamiltonian itself.
    Energy,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Self::CentralSz => "Sz",
            Self::Polarization => "Sz_over_S",
            Self::Staggered => "ms",
            Self::LSquared => "L2",
            Self::Energy => "energy",
        }
    }

    /// Whether the operator acts on the central spin alone.
    pub fn is_central(self) -> bool {
        matches!(self, Self::CentralSz | Self::Polarization)
    }

    fn operator(self, sector: &crate::basis::BasisSector, h: &SparseOperator) -> SparseOperator {
        match self {
            Self::CentralSz => build_central_sz(sector),
            Self::Polarization => build_central_sz(sector).scaled(2.0 / sector.two_s() as f64),
            Self::Staggered => build_staggered(sector),
            Self::LSquared => build_l_squared(sector),
            Self::Energy => h.clone(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Sz" | "sz" => Ok(Self::CentralSz),
            "Sz_over_S" | "polarization" => Ok(Self::Polarization),
            "ms" | "m_s" => Ok(Self::Staggered),
            "L2" | "l2" => Ok(Self::LSquared),
            "energy" => Ok(Self::Energy),
            other => Err(Error::Unsupported(format!("unknown observable `{other}`"))),
        }
    }
}

/// Conservation checks accumulated over every output time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    /// `max_t | ||psi(t)|| - ||psi(0)|| |`.
    pub norm_deviation: f64,
    /// `max_t |<H>(t) - <H>(0)|`.
    pub energy_drift: f64,
    /// Largest change of any sector weight.
    pub population_drift: f64,
    pub krylov: KrylovStats,
}

/// Expectation values on a time grid (physical time).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: Vec<Observable>,
    /// `values[o][k]` is observable `o` at `times[k]`.
    pub values: Vec<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn values_of(&self, obs: Observable) -> Option<&[f64]> {
        self.observables
            .iter()
            .position(|&o| o == obs)
            .map(|i| self.values[i].as_slice())
    }
}

struct BlockRun {
    values: Vec<Vec<f64>>,
    weight: Vec<f64>,
    energy: Vec<f64>,
    weight0: f64,
    energy0: f64,
    stats: KrylovStats,
}

/// Evolves `state` under `ham` and records `observables` at `times`.
pub fn evolve_observables(
    ham: &Hamiltonian,
    state: &StateVector,
    times: &[f64],
    observables: &[Observable],
    cfg: &KrylovConfig,
) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("no output times".into()));
    }
    let nt = times.len();
    let runs: Vec<BlockRun> = state
        .blocks()
        .par_iter()
        .map(|block| -> Result<BlockRun> {
            let h = ham.sector_operator(&block.sector)?;
            let ops: Vec<SparseOperator> = observables
                .iter()
                .map(|o| o.operator(&block.sector, &h))
                .collect();
            let mut run = BlockRun {
                values: vec![vec![0.0; nt]; ops.len()],
                weight: vec![0.0; nt],
                energy: vec![0.0; nt],
                weight0: block.norm_sqr(),
                energy0: h.expectation(&block.amps),
                stats: KrylovStats::default(),
            };
            run.stats = evolve(&h, &block.amps, times, cfg, |k, psi: &[C64]| {
                for (o, op) in ops.iter().enumerate() {
                    run.values[o][k] = op.expectation(psi);
                }
                run.weight[k] = psi.iter().map(|x| x.norm_sqr()).sum();
                run.energy[k] = h.expectation(psi);
            })?;
            Ok(run)
        })
        .collect::<Result<_>>()?;

    let mut values = vec![vec![0.0; nt]; observables.len()];
    let mut norm_sq = vec![0.0; nt];
    let mut energy = vec![0.0; nt];
    let mut energy0 = 0.0;
    let mut diagnostics = Diagnostics::default();
    for run in &runs {
        for (acc, v) in values.iter_mut().zip(&run.values) {
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        }
        norm_sq.iter_mut().zip(&run.weight).for_each(|(a, x)| *a += x);
        energy.iter_mut().zip(&run.energy).for_each(|(a, x)| *a += x);
        energy0 += run.energy0;
        for &w in &run.weight {
            diagnostics.population_drift = diagnostics.population_drift.max((w - run.weight0).abs());
        }
        diagnostics.krylov = diagnostics.krylov.merge(run.stats);
    }
    let norm0 = state.norm();
    for k in 0..nt {
        diagnostics.norm_deviation = diagnostics.norm_deviation.max((norm_sq[k].sqrt() - norm0).abs());
        diagnostics.energy_drift = diagnostics.energy_drift.max((energy[k] - energy0).abs());
    }
    if let Some(bad) = values.iter().flatten().find(|v| !v.is_finite()) {
        return Err(Error::Unsupported(format!("non-finite expectation value {bad}")));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        observables: observables.to_vec(),
        values,
        diagnostics,
    })
}

/// Unit in which a run reports its times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    /// `gt t` with `gt = g sqrt(N)`.
    GTilde,
    /// `g t`.
    G,
    /// Bare `t`, used when the coupling that sets the unit vanishes.
    Bare,
}

impl TimeUnit {
    pub fn label(self) -> &'static str {
        match self {
            Self::GTilde => "gt_tilde*t",
            Self::G => "g*t",
            Self::Bare => "t",
        }
    }
}

/// A finished experiment: reported grid plus the physical trajectory.
#[derive(Debug, Clone)]
pub struct Run {
    pub params: ModelParams,
    pub form: Form,
    pub unit: TimeUnit,
    /// Output times in `unit`.
    pub grid: Vec<f64>,
    pub trajectory: Trajectory,
}

impl Run {
    pub fn series(&self, obs: Observable) -> Option<TimeSeries> {
        self.trajectory.values_of(obs).map(|v| TimeSeries {
            times: self.grid.clone(),
            values: v.to_vec(),
            observable: obs,
            params: self.params,
            unit: self.unit,
        })
    }
}

/// One observable on the reported grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub observable: Observable,
    pub params: ModelParams,
    pub unit: TimeUnit,
}

impl TimeSeries {
    /// First grid time at which the series drops to `level` or below.
    pub fn first_crossing_below(&self, level: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.values)
            .find(|(_, &v)| v <= level)
            .map(|(&t, _)| t)
    }

    /// Largest value on `[lo, hi]`, with its time.
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.values)
            .filter(|(&t, _)| t >= lo && t <= hi)
            .map(|(&t, &v)| (t, v))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("no output times".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn physical(grid: &[f64], scale: f64) -> (Vec<f64>, bool) {
    if scale == 0.0 {
        (grid.to_vec(), false)
    } else {
        (grid.iter().map(|x| x / scale).collect(), true)
    }
}

/// `|phi_S> (x) |AF>` for the chosen central state.
pub fn neel_initial(n: usize, two_s: u32, kind: CentralKind) -> Result<StateVector> {
    let central: Vec<C64> = central_initial(two_s, kind)
        .into_iter()
        .map(|x| C64::new(x, 0.0))
        .collect();
    product_state(&central, &neel_state(n)?)
}

/// Neel quench of the isotropic star `J H_b + g S.L`.
///
/// `grid` is in units of `1/gt`; with `g = 0` it is taken as bare time.
/// `observables` defaults to `m_s` when empty.
pub fn neel_run(
    params: &ModelParams,
    kind: CentralKind,
    grid: &[f64],
    observables: &[Observable],
    cfg: &KrylovConfig,
) -> Result<Run> {
    if !params.isotropic {
        return Err(Error::Anisotropic {
            j: params.j,
            jp: params.jp,
        });
    }
    if params.omega != 0.0 {
        return Err(Error::Unsupported("the Neel quench has no Zeeman term".into()));
    }
    check_grid(grid)?;
    let (times, scaled) = physical(grid, params.gt);
    let obs = if observables.is_empty() {
        vec![Observable::Staggered]
    } else {
        observables.to_vec()
    };
    let ham = Hamiltonian::new(*params, Form::Star);
    let psi = neel_initial(params.n, params.two_s, kind)?;
    let trajectory = evolve_observables(&ham, &psi, &times, &obs, cfg)?;
    Ok(Run {
        params: *params,
        form: Form::Star,
        unit: if scaled { TimeUnit::GTilde } else { TimeUnit::Bare },
        grid: grid.to_vec(),
        trajectory,
    })
}

/// `<m_s(t)>` after a Neel quench.
pub fn neel_experiment(
    params: &ModelParams,
    kind: CentralKind,
    grid: &[f64],
    cfg: &KrylovConfig,
) -> Result<TimeSeries> {
    let run = neel_run(params, kind, grid, &[Observable::Staggered], cfg)?;
    Ok(run.series(Observable::Staggered).expect("m_s recorded"))
}

/// `|S> (x) |Omega(theta, phi)>`.
pub fn coherent_initial(n: usize, two_s: u32, theta: f64, phi: f64) -> Result<StateVector> {
    let central: Vec<C64> = central_initial(two_s, CentralKind::Polarized)
        .into_iter()
        .map(|x| C64::new(x, 0.0))
        .collect();
    product_state(&central, &spin_coherent(n, theta, phi)?)
}

/// Central spin dynamics of the modified star from a coherent bath.
///
/// `grid` is in units of `1/g`; with `g = 0` it is taken as bare time.
/// `observables` defaults to `Sz / S` when empty.
pub fn coherent_run(
    params: &ModelParams,
    theta: f64,
    phi: f64,
    grid: &[f64],
    observables: &[Observable],
    cfg: &KrylovConfig,
) -> Result<Run> {
    check_grid(grid)?;
    let (times, scaled) = physical(grid, params.g);
    let obs = if observables.is_empty() {
        vec![Observable::Polarization]
    } else {
        observables.to_vec()
    };
    let ham = Hamiltonian::new(*params, Form::Modified);
    let psi = coherent_initial(params.n, params.two_s, theta, phi)?;
    let trajectory = evolve_observables(&ham, &psi, &times, &obs, cfg)?;
    Ok(Run {
        params: *params,
        form: Form::Modified,
        unit: if scaled { TimeUnit::G } else { TimeUnit::Bare },
        grid: grid.to_vec(),
        trajectory,
    })
}

/// `<Sz(t)>/S` of the modified star.
pub fn coherent_experiment(
    params: &ModelParams,
    theta: f64,
    phi: f64,
    grid: &[f64],
    cfg: &KrylovConfig,
) -> Result<TimeSeries> {
    let run = coherent_run(params, theta, phi, grid, &[Observable::Polarization], cfg)?;
    Ok(run.series(Observable::Polarization).expect("polarization recorded"))
}

/// Largest pointwise spread of `observable` across the isotropic couplings
/// `J = J' in j_list`, all else fixed. `times` are physical.
pub fn j_independence_check(
    base: &ModelParams,
    form: Form,
    j_list: &[f64],
    observable: Observable,
    initial: &StateVector,
    times: &[f64],
    cfg: &KrylovConfig,
) -> Result<f64> {
    if !base.isotropic {
        return Err(Error::Anisotropic {
            j: base.j,
            jp: base.jp,
        });
    }
    if let Some(&bad) = j_list.iter().find(|j| !j.is_finite()) {
        return Err(Error::NonFiniteCoupling { name: "J", value: bad });
    }
    let mut lo = vec![f64::INFINITY; times.len()];
    let mut hi = vec![f64::NEG_INFINITY; times.len()];
    for &j in j_list {
        let ham = Hamiltonian::new(base.with_j(j, j), form);
        let traj = evolve_observables(&ham, initial, times, &[observable], cfg)?;
        for (k, &v) in traj.values[0].iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    if j_list.is_empty() {
        return Ok(0.0);
    }
    Ok(lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max))
}

//! `spinstar`: batch driver for the Heisenberg-star experiments.
//!
//! Every setting can come from a flag or from a `key = value` run file
//! given with `--config`; flags win. Exit status is 0 on success, 2 for
//! configuration errors and 3 for numerical failures.

mod config;
mod failure;
mod output;

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use spinstar::dynamics::{coherent_run, neel_run, Observable, Run};
use spinstar::eigen::LanczosConfig;
use spinstar::grid::{parse_range, time_grid};
use spinstar::io::{write_ground_scan, write_level_table, write_series, write_state, write_transitions};
use spinstar::krylov::KrylovConfig;
use spinstar::params::ModelParams;
use spinstar::spectrum::{ground_scan, plateau_edges, LevelTable};
use spinstar::states::{subground_state_from, BathMultiplet, CentralKind};
use spinstar::verify::{run_suite, Suite};

use config::{ConfigFile, Resolver};
use failure::Failure;
use output::Outputs;

#[derive(Parser)]
#[command(name = "spinstar", version, about = "Spectrum and dynamics of the spin-S Heisenberg star")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run file with `key = value` lines; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file. Standard output when omitted; companion files and the
    /// `.meta` sidecar are only written next to an explicit path.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads (fallback: STAR_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Krylov subspace dimension.
    #[arg(long, global = true)]
    krylov_dim: Option<usize>,
    /// Krylov error bound per step.
    #[arg(long, global = true)]
    krylov_tol: Option<f64>,
    #[arg(long, global = true)]
    krylov_max_steps: Option<usize>,
    /// Lanczos residual tolerance.
    #[arg(long, global = true)]
    lanczos_tol: Option<f64>,
    #[arg(long, global = true)]
    lanczos_max_iter: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground energy and total bath spin against J/g~.
    GroundScan(GroundScanArgs),
    /// Lowest ring energy and multiplet count per total spin.
    LevelTable(LevelTableArgs),
    /// Staggered magnetization after a Neel quench.
    Neel(NeelArgs),
    /// Central-spin polarization from a coherent bath state.
    Coherent(CoherentArgs),
    /// Dump a closed-form sub-ground eigenstate.
    Subground(SubgroundArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::GroundScan(_) => "ground-scan",
            Self::LevelTable(_) => "level-table",
            Self::Neel(_) => "neel",
            Self::Coherent(_) => "coherent",
            Self::Subground(_) => "subground",
            Self::Verify(_) => "verify",
        }
    }
}

#[derive(Args)]
struct GroundScanArgs {
    /// Bath size N (even).
    #[arg(long)]
    n: Option<usize>,
    /// Twice the central spin, 2S.
    #[arg(long)]
    two_s: Option<u32>,
    /// J/g~ grid as start:stop:step [default: 0:1.2:0.005].
    #[arg(long)]
    ratio: Option<String>,
}

#[derive(Args)]
struct LevelTableArgs {
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct NeelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    two_s: Option<u32>,
    #[arg(long)]
    j_over_gt: Option<f64>,
    /// Collective coupling g~ = g sqrt(N) [default: 1].
    #[arg(long)]
    gt: Option<f64>,
    /// Central-spin initial state: polarized or uniform [default: polarized].
    #[arg(long)]
    central: Option<String>,
    /// Last output time, in units of 1/g~.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of output times, including t = 0.
    #[arg(long)]
    samples: Option<usize>,
    /// Observables to record (ms, Sz, Sz_over_S, L2, energy) [default: ms].
    #[arg(long, value_delimiter = ',')]
    observable: Vec<String>,
}

#[derive(Args)]
struct CoherentArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    two_s: Option<u32>,
    /// In-plane ring exchange J.
    #[arg(long)]
    j: Option<f64>,
    /// Ising ring exchange J' [default: J].
    #[arg(long)]
    jp: Option<f64>,
    /// System-bath coupling g [default: 1].
    #[arg(long)]
    g: Option<f64>,
    /// Central Zeeman frequency [default: 0].
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Last output time, in units of 1/g.
    #[arg(long)]
    tmax_gt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Observables to record [default: Sz_over_S].
    #[arg(long, value_delimiter = ',')]
    observable: Vec<String>,
}

#[derive(Args)]
struct SubgroundArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    two_s: Option<u32>,
    /// Twice the bath spin, 2l.
    #[arg(long)]
    two_l: Option<u32>,
    /// Twice the total magnetization, 2m.
    #[arg(long, allow_hyphen_values = true)]
    two_m: Option<i32>,
}

#[derive(Args)]
struct VerifyArgs {
    /// identities, bath, subground, dynamics-oracle or all [default: all].
    #[arg(long)]
    suite: Option<String>,
    /// Bath size override.
    #[arg(long)]
    n: Option<usize>,
}

/// Solver settings and open outputs shared by every command.
struct Env {
    krylov: KrylovConfig,
    lanczos: LanczosConfig,
    meta: Vec<(String, String)>,
    out: Outputs,
}

fn setup(mut r: Resolver, common: &Common, companions: &[&str]) -> Result<Env, Failure> {
    let defaults = KrylovConfig::default();
    let krylov = KrylovConfig {
        dim: r.or("krylov-dim", common.krylov_dim, defaults.dim)?,
        tol: r.or("krylov-tol", common.krylov_tol, defaults.tol)?,
        max_steps: r.or("krylov-max-steps", common.krylov_max_steps, defaults.max_steps)?,
    };
    let base = LanczosConfig::default();
    let lanczos = LanczosConfig {
        tol: r.or("lanczos-tol", common.lanczos_tol, base.tol)?,
        max_iter: r.or("lanczos-max-iter", common.lanczos_max_iter, base.max_iter)?,
        ..base
    };
    if krylov.dim < 2 || !(krylov.tol > 0.0) || krylov.max_steps == 0 {
        return Err(Failure::Config("krylov-dim must be >= 2, krylov-tol and krylov-max-steps > 0".into()));
    }
    if !(lanczos.tol > 0.0) || lanczos.max_iter == 0 {
        return Err(Failure::Config("lanczos-tol and lanczos-max-iter must be positive".into()));
    }
    let out = r.optional("out", common.out.as_ref().map(|p| p.display().to_string()))?;
    let threads = match r.optional("threads", common.threads)? {
        Some(t) => Some(t),
        None => match env::var("STAR_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Config(format!("STAR_THREADS=`{v}` is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    let mut meta = r.finish()?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot start thread pool: {e}")))?;
    }
    meta.push(("threads".into(), rayon::current_num_threads().to_string()));
    meta.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    let out = Outputs::open(out.as_deref().map(std::path::Path::new), companions)?;
    Ok(Env {
        krylov,
        lanczos,
        meta,
        out,
    })
}

fn parse<T>(what: &str, text: &str) -> Result<T, Failure>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    text.parse()
        .map_err(|e| Failure::Config(format!("invalid {what} `{text}`: {e}")))
}

fn observables(list: &[String]) -> Result<Vec<Observable>, Failure> {
    list.iter().map(|s| parse("observable", s)).collect()
}

fn cmd_ground_scan(mut r: Resolver, common: &Common, a: GroundScanArgs) -> Result<(), Failure> {
    let n = r.required("n", a.n)?;
    let two_s = r.required("two-s", a.two_s)?;
    let ratio = r.or("ratio", a.ratio, "0:1.2:0.005".to_string())?;
    ModelParams::from_ratio(n, two_s, 0.0, 1.0)?;
    let ratios = parse_range(&ratio)?;
    let mut env = setup(r, common, &["transitions"])?;
    let table = LevelTable::compute(n, &env.lanczos)?;
    let rows = ground_scan(&table, two_s, &ratios);
    write_ground_scan(env.out.main(), &rows)?;
    if let Some(w) = env.out.companion(0) {
        write_transitions(w, &plateau_edges(&rows))?;
    }
    env.out.commit(&env.meta)
}

fn cmd_level_table(mut r: Resolver, common: &Common, a: LevelTableArgs) -> Result<(), Failure> {
    let n = r.required("n", a.n)?;
    ModelParams::from_ratio(n, 1, 0.0, 1.0)?;
    let mut env = setup(r, common, &[])?;
    let table = LevelTable::compute(n, &env.lanczos)?;
    write_level_table(env.out.main(), &table)?;
    env.out.commit(&env.meta)
}

fn report(env: &mut Env, run: &Run) -> Result<(), Failure> {
    let d = run.trajectory.diagnostics;
    eprintln!(
        "norm deviation {:.3e}, energy drift {:.3e}, sector weight drift {:.3e}, {} Krylov steps",
        d.norm_deviation, d.energy_drift, d.population_drift, d.krylov.steps
    );
    let series: Vec<_> = run
        .trajectory
        .observables
        .iter()
        .filter_map(|&o| run.series(o))
        .collect();
    write_series(env.out.main(), &series)?;
    env.meta.extend([
        ("time-unit".to_string(), run.unit.label().to_string()),
        ("norm-deviation".to_string(), format!("{:e}", d.norm_deviation)),
        ("energy-drift".to_string(), format!("{:e}", d.energy_drift)),
        ("krylov-steps".to_string(), d.krylov.steps.to_string()),
    ]);
    Ok(())
}

fn cmd_neel(mut r: Resolver, common: &Common, a: NeelArgs) -> Result<(), Failure> {
    let n = r.required("n", a.n)?;
    let two_s = r.required("two-s", a.two_s)?;
    let ratio = r.required("j-over-gt", a.j_over_gt)?;
    let gt = r.or("gt", a.gt, 1.0)?;
    let central: String = r.or("central", a.central, "polarized".to_string())?;
    let tmax = r.required("tmax", a.tmax)?;
    let samples = r.required("samples", a.samples)?;
    let obs: Vec<String> = r.list("observable", a.observable, vec!["ms".to_string()])?;
    let kind: CentralKind = parse("central state", &central)?;
    let obs = observables(&obs)?;
    let params = ModelParams::from_ratio(n, two_s, ratio, gt)?;
    let grid = time_grid(tmax, samples)?;
    let mut env = setup(r, common, &[])?;
    let run = neel_run(&params, kind, &grid, &obs, &env.krylov)?;
    report(&mut env, &run)?;
    env.out.commit(&env.meta)
}

fn cmd_coherent(mut r: Resolver, common: &Common, a: CoherentArgs) -> Result<(), Failure> {
    let n = r.required("n", a.n)?;
    let two_s = r.required("two-s", a.two_s)?;
    let j = r.required("j", a.j)?;
    let jp = r.or("jp", a.jp, j)?;
    let g = r.or("g", a.g, 1.0)?;
    let omega = r.or("omega", a.omega, 0.0)?;
    let theta = r.required("theta", a.theta)?;
    let phi = r.or("phi", a.phi, 0.0)?;
    let tmax = r.required("tmax-gt", a.tmax_gt)?;
    let samples = r.required("samples", a.samples)?;
    let obs: Vec<String> = r.list("observable", a.observable, vec!["Sz_over_S".to_string()])?;
    let obs = observables(&obs)?;
    let params = ModelParams::new(n, two_s, j, jp, g, omega)?;
    let grid = time_grid(tmax, samples)?;
    let mut env = setup(r, common, &[])?;
    let run = coherent_run(&params, theta, phi, &grid, &obs, &env.krylov)?;
    report(&mut env, &run)?;
    env.out.commit(&env.meta)
}

fn cmd_subground(mut r: Resolver, common: &Common, a: SubgroundArgs) -> Result<(), Failure> {
    let n = r.required("n", a.n)?;
    let two_s = r.required("two-s", a.two_s)?;
    let two_l: u32 = r.required("two-l", a.two_l)?;
    let two_m = r.required("two-m", a.two_m)?;
    ModelParams::from_ratio(n, two_s, 0.0, 1.0)?;
    if two_l % 2 != 0 {
        return Err(Failure::Config(format!("2l = {two_l} must be even for an even bath")));
    }
    let mut env = setup(r, common, &[])?;
    let multiplet = BathMultiplet::compute(n, two_l as usize / 2, &env.lanczos)?;
    let sg = subground_state_from(&multiplet, two_s, two_m)?;
    write_state(env.out.main(), &sg.state)?;
    env.meta.extend([
        ("E1b".to_string(), format!("{:.12e}", sg.e1b)),
        ("two-j".to_string(), sg.two_j.to_string()),
    ]);
    env.out.commit(&env.meta)
}

fn cmd_verify(mut r: Resolver, common: &Common, a: VerifyArgs) -> Result<(), Failure> {
    let suite: String = r.or("suite", a.suite, "all".to_string())?;
    let n = r.optional("n", a.n)?;
    let suite: Suite = parse("suite", &suite)?;
    let mut env = setup(r, common, &[])?;
    let checks = run_suite(suite, n)?;
    let w = env.out.main();
    for c in &checks {
        writeln!(w, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(w, "{} checks, {failed} failed", checks.len())?;
    env.meta.push(("failed".into(), failed.to_string()));
    env.out.commit(&env.meta)?;
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} verification check(s) failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let r = Resolver::new(cli.command.name(), file);
    let common = &cli.common;
    match cli.command {
        Command::GroundScan(a) => cmd_ground_scan(r, common, a),
        Command::LevelTable(a) => cmd_level_table(r, common, a),
        Command::Neel(a) => cmd_neel(r, common, a),
        Command::Coherent(a) => cmd_coherent(r, common, a),
        Command::Subground(a) => cmd_subground(r, common, a),
        Command::Verify(a) => cmd_verify(r, common, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            if let Failure::Missing { command, .. } = &f {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(command) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            f.exit_code()
        }
    }
}

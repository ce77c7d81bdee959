//! Exact spectrum and real-time dynamics of the spin-S Heisenberg star: a
//! central spin coupled homogeneously to every site of a periodic spin-1/2
//! ring.
//!
//! The Hilbert space splits into sectors of fixed total magnetization
//! ([`basis`]). Sparse operators are built per sector ([`operator`],
//! [`hamiltonian`]), ground states come from Lanczos ([`eigen`]) and time
//! evolution from a short-iterate Krylov propagator ([`krylov`]). The
//! closed-form parts of the spectrum live in [`spectrum`], named initial
//! states in [`states`], and the quench experiments in [`dynamics`].
//!
//! ```
//! use spinstar::spectrum::{transition_point, LevelTable};
//! use spinstar::eigen::LanczosConfig;
//!
//! let table = LevelTable::compute(8, &LanczosConfig::default()).unwrap();
//! assert!((table.e1b(4) - 2.0).abs() < 1e-9);
//! assert_eq!(transition_point(16, 4), 0.25);
//! ```

pub mod basis;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod io;
pub mod krylov;
pub mod math;
pub mod operator;
pub mod oracle;
pub mod params;
pub mod spectrum;
pub mod state;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/subground.md")]
    mod subground {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

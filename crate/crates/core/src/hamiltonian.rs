//! Sector Hamiltonians of the star.

use crate::basis::BasisSector;
use crate::error::{Error, Result};
use crate::operator::{build_bath_ring, build_system_bath, build_zeeman, SparseOperator};
use crate::params::ModelParams;

/// Which coupling convention the system-bath term follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `J H_b + g S.L + omega Sz`, with `J' = J` for the isotropic star.
    Star,
    /// `omega Sz + sum_j [J (Sx Sx + Sy Sy) + J' Sz Sz] + 2 g S.L`.
    Modified,
}

impl Form {
    pub fn system_bath_prefactor(self, g: f64) -> f64 {
        match self {
            Self::Star => g,
            Self::Modified => 2.0 * g,
        }
    }
}

/// Parameters plus convention; builds one operator per sector on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian {
    pub params: ModelParams,
    pub form: Form,
}

impl Hamiltonian {
    pub fn new(params: ModelParams, form: Form) -> Self {
        Self { params, form }
    }

    /// Restriction to one magnetization sector.
    pub fn sector_operator(&self, sector: &BasisSector) -> Result<SparseOperator> {
        let p = &self.params;
        if sector.n() != p.n || sector.two_s() != p.two_s {
            return Err(Error::SectorMismatch(format!(
                "sector {} does not belong to N = {}, 2S = {}",
                sector.tag(),
                p.n,
                p.two_s
            )));
        }
        let mut h = build_bath_ring(sector, p.j, p.jp)
            .add_scaled(1.0, &build_system_bath(sector, self.form.system_bath_prefactor(p.g)))?;
        if p.omega != 0.0 {
            h = h.add_scaled(1.0, &build_zeeman(sector, p.omega))?;
        }
        Ok(h)
    }
}

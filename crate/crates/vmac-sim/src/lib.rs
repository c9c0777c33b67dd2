//! System-level simulation of an uplink C-RAN cluster inside a hexagonal
//! cellular network: topology and channel generation per the multicell and
//! heterogeneous parameter tables, round-robin scheduling with
//! proportional-fair weighting, per-slot evaluation of the compression
//! schemes, and long-term rate campaigns with CSV outputs.

pub mod campaign;
pub mod config;
pub mod csvout;
pub mod drop;
pub mod evaluate;
pub mod geometry;
pub mod rng;
pub mod topology;

pub use campaign::{run_budget_sweep, run_campaign, CampaignReport, SlotRow, SweepRow};
pub use config::{Mode, Policy, Scheme, SimConfig};
pub use topology::{generate_topology, NetworkTopology};

use std::fmt;

#[derive(Debug)]
pub enum SimError {
    Model(vmac_core::ModelError),
    Solve(vmac_core::solver::SolveError),
}

impl SimError {
    pub(crate) fn model(e: vmac_core::ModelError) -> Self {
        SimError::Model(e)
    }

    pub(crate) fn solve(e: vmac_core::solver::SolveError) -> Self {
        SimError::Solve(e)
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Model(e) => write!(f, "{e}"),
            SimError::Solve(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {}

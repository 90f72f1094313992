//! Bipartite sexual-contact network growth, SIRS transmission dynamics,
//! and vaccination-strategy experiments.
//!
//! The crate is organized bottom-up:
//!
//! * [`growth`] grows the bipartite contact network day by day;
//! * [`topology`] measures degree, power-law tail, path length, and
//!   clustering on grown networks;
//! * [`centrality`] scores nodes (degree, betweenness, closeness,
//!   percolation, eigenvector) for targeted vaccination;
//! * [`epidemic`] runs the daily SIRS transmission process;
//! * [`vaccination`] allocates and administers doses per strategy;
//! * [`harness`] wires everything into runs, sweeps, and summary files;
//! * [`plot`] renders summary data as self-contained SVG charts.

pub mod centrality;
#[cfg(feature = "cli")]
pub mod cli;
pub mod config;
pub mod epidemic;
pub mod error;
pub mod graph;
pub mod growth;
pub mod harness;
pub mod plot;
pub mod rng;
pub mod snapshot;
pub mod topology;
pub mod vaccination;

pub use config::{EpidemicConfig, GrowthConfig, PlanTemplate, ScenarioConfig, Strategy, SweepPoint};
pub use error::{Error, Result};

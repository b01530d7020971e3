//! Synthetic citation networks with controllable homophily, preferential
//! attachment and gender bias, plus a Monte Carlo oracle for the
//! reference models.

mod config;
mod generate;
mod oracle;

pub use config::{OutDegree, SynthConfig};
pub use generate::generate_network;
pub use oracle::{monte_carlo_oracle, OracleEstimate, ORACLE_MAX_PAPERS};

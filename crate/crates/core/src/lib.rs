//! Multi-AP TXOP sharing in 802.11be WLANs.
//!
//! Compares three channel access modes on enterprise deployments:
//! uncoordinated DCF contention (nc-MAP), coordinated TDMA inside a shared
//! TXOP (c-TDMA), and coordinated TDMA with spatial reuse and transmit power
//! control (c-TDMA/SR). Throughput comes from closed-form Bianchi-style models,
//! so every result is a deterministic function of the configuration and seed.
//!
//! ```
//! use txopsim::{generate_deployment, Mode, PowerPolicy, ScenarioConfig, Simulator};
//!
//! let dep = generate_deployment(&ScenarioConfig { num_aps: 2, stas_per_ap: 3, seed: 7, ..Default::default() })?;
//! let eval = Simulator::default().evaluate(&dep, &Mode::ALL, PowerPolicy::Variable)?;
//! assert!(eval.gain_vs_ncmap(Mode::CTdmaSr).unwrap() > 0.0);
//! # Ok::<(), txopsim::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod deployment;
mod error;
mod mode;
pub mod montecarlo;
pub mod phy;
pub mod propagation;
pub mod scheduler;
mod simulator;

pub use config::SimConfig;
pub use deployment::{generate_deployment, load_scenario, Deployment, ScenarioConfig};
pub use error::{exit_code, Error, Result};
pub use mode::{Mode, PowerPolicy};
pub use simulator::{Evaluation, Simulator};

/// Crate version plus the git description captured at build time.
pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (",
    env!("TXOPSIM_GIT_DESCRIBE"),
    ")"
);

pub fn version_string() -> String {
    VERSION.to_owned()
}

//! Collaborative multi-depot routing for refrigerated deliveries with time
//! windows, time-dependent speeds and carbon costs.
//!
//! The usual entry point is [`strategies::solve`], which builds an initial
//! solution for one of the four operating scenarios and improves it with the
//! simulated-annealing / variable-neighbourhood search in [`savns`]. Small
//! instances can be solved exactly with [`oracle::exact_solve`].

pub mod config;
pub mod construction;
pub mod cost;
pub mod departure;
mod error;
pub mod instance;
pub mod metrics;
pub mod neighborhoods;
pub mod oracle;
pub mod route;
pub mod savns;
pub mod strategies;
pub mod travel_time;

pub use config::Defaults;
pub use cost::CostBreakdown;
pub use departure::DeparturePolicy;
pub use error::{Error, Result};
pub use instance::Instance;
pub use route::Route;
pub use savns::SavnsConfig;
pub use strategies::{solve, Solution, Strategy};

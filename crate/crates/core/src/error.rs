use thiserror::Error;

use crate::instance::InstanceError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("route has no propagated arrival times")]
    Unpropagated,
    #[error("depot {depot_id} needs {needed} vehicles but only has {available}")]
    FleetExceeded {
        depot_id: usize,
        needed: usize,
        available: u32,
    },
    #[error("no depot has a free vehicle left")]
    FleetExhausted,
    #[error("relative improvement is undefined for a zero reference objective")]
    ZeroDenominator,
    #[error("depot imbalance sums to {0}, expected 0")]
    Unbalanced(i64),
    #[error("oracle is limited to {max_customers} customers and {max_depots} depots, got {customers} and {depots}")]
    OracleTooLarge {
        customers: usize,
        depots: usize,
        max_customers: usize,
        max_depots: usize,
    },
    #[error("solution breaks {} rule(s): {}", .0.len(), .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

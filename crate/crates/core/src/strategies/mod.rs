//! The four operating scenarios.
//!
//! * `standalone` - every depot serves its own order records with closed routes.
//! * `cc` - customers are clustered to their nearest depot, closed routes.
//! * `boc` - open routes, return depots re-pointed so that no depot gains or
//!   loses vehicles.
//! * `rboc` - open routes, then empty vehicles are driven back over the
//!   highway network at minimum cost.

mod balance;
mod rebalance;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::construction::{cluster_customers, pfih_construct, pfih_virtual};
use crate::cost::{solution_cost, CostBreakdown};
use crate::departure::DeparturePolicy;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::route::Route;
use crate::savns::{savns1_traced, savns2_traced, SavnsConfig, TraceRow};

pub use balance::{balance_returns, balance_routes, imbalance_of, BalanceOrder};
pub use rebalance::{floyd_shortest_paths, solve_rebalance, transfer_unit_cost, RebalancePlan, Transfer};
pub use validate::{validate_solution, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Standalone,
    Cc,
    Boc,
    Rboc,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Standalone, Strategy::Cc, Strategy::Boc, Strategy::Rboc];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Standalone => "standalone",
            Strategy::Cc => "cc",
            Strategy::Boc => "boc",
            Strategy::Rboc => "rboc",
        }
    }

    /// Routes must come back to the depot they left.
    pub fn closed_routes(self) -> bool {
        matches!(self, Strategy::Standalone | Strategy::Cc)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standalone" | "stand-alone" => Ok(Strategy::Standalone),
            "cc" => Ok(Strategy::Cc),
            "boc" => Ok(Strategy::Boc),
            "rboc" => Ok(Strategy::Rboc),
            _ => Err(Error::Config(format!(
                "unknown strategy `{s}` (expected standalone, cc, boc or rboc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub rebalance: Option<RebalancePlan>,
    pub strategy: Strategy,
}

/// Returns minus departures per depot.
pub fn compute_depot_imbalance(solution: &Solution, instance: &Instance) -> Vec<i64> {
    imbalance_of(
        solution.routes.iter().map(|r| r.depart_depot),
        solution.routes.iter().map(|r| r.return_depot),
        instance.n_depots(),
    )
}

/// Re-points return depots of a copy of `solution` until it is balanced.
pub fn balancing_approach(solution: &Solution, instance: &Instance, order: BalanceOrder) -> Solution {
    let mut out = solution.clone();
    balance_routes(&mut out.routes, instance, order);
    out
}

/// Construction before any search: clustered closed routes for the
/// stand-alone and CC scenarios, routes around the virtual depot otherwise.
pub fn initial_solution(
    instance: &Instance,
    strategy: Strategy,
    config: &SavnsConfig,
    policy: &DeparturePolicy,
) -> Result<Solution> {
    if strategy == Strategy::Standalone && instance.customers().iter().any(|c| c.bound_depot.is_none()) {
        return Err(Error::Config(
            "the stand-alone scenario needs split order records bound to depots".into(),
        ));
    }
    let mut routes = Vec::new();
    if strategy.closed_routes() {
        let clusters = cluster_customers(instance);
        for d in 0..instance.n_depots() {
            let members = clusters.customers_of(d);
            if !members.is_empty() {
                routes.extend(pfih_construct(&members, d, instance, &config.pfih)?);
            }
        }
    } else {
        let all: Vec<usize> = (0..instance.n_customers()).collect();
        routes = pfih_virtual(&all, instance, &config.pfih)?;
    }
    policy.apply(&mut routes, instance);
    let mut solution = Solution {
        routes,
        rebalance: None,
        strategy,
    };
    match strategy {
        Strategy::Boc => {
            balance_routes(&mut solution.routes, instance, config.balance_order);
        }
        Strategy::Rboc => {
            let dist = floyd_shortest_paths(instance.highway(), instance.depots())?;
            let u = compute_depot_imbalance(&solution, instance);
            solution.rebalance = Some(solve_rebalance(&u, &dist, instance.costs(), instance.vehicle())?);
        }
        _ => {}
    }
    Ok(solution)
}

/// Runs one scenario end to end: construction, departure policy, search,
/// rebalancing. The result is validated before it is returned.
pub fn solve(
    instance: &Instance,
    strategy: Strategy,
    config: &SavnsConfig,
    policy: &DeparturePolicy,
) -> Result<(Solution, CostBreakdown)> {
    solve_traced(instance, strategy, config, policy, None)
}

pub fn solve_traced(
    instance: &Instance,
    strategy: Strategy,
    config: &SavnsConfig,
    policy: &DeparturePolicy,
    trace: Option<&mut Vec<TraceRow>>,
) -> Result<(Solution, CostBreakdown)> {
    config.validate()?;
    policy.validate()?;
    if strategy == Strategy::Rboc {
        instance.highway().check_connected(instance.depots())?;
    }
    let initial = initial_solution(instance, strategy, config, policy)?;
    let solution = if strategy.closed_routes() {
        savns1_traced(&initial, instance, config, trace)?
    } else {
        savns2_traced(&initial, instance, config, strategy, trace)?
    };
    let violations = validate_solution(&solution, instance, strategy);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations.iter().map(|v| v.to_string()).collect()));
    }
    let cost = solution_cost(&solution, instance)?;
    Ok((solution, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("xyz".parse::<Strategy>().is_err());
    }

    #[test]
    fn imbalance_by_definition() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2), depot(2, 10.0, 0.0, 2)],
            vec![customer(1, 1.0, 0.0, 1), customer(2, 9.0, 0.0, 1)],
        );
        let sol = |pairs: &[(usize, usize)]| Solution {
            routes: pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| Route::new(a, b, vec![i], &inst))
                .collect(),
            rebalance: None,
            strategy: Strategy::Boc,
        };
        assert_eq!(compute_depot_imbalance(&sol(&[(0, 0), (1, 1)]), &inst), vec![0, 0]);
        assert_eq!(compute_depot_imbalance(&sol(&[(0, 1), (1, 0)]), &inst), vec![0, 0]);
        assert_eq!(compute_depot_imbalance(&sol(&[(0, 1), (0, 1)]), &inst), vec![-2, 2]);
    }

    #[test]
    fn duplicate_customer_is_named() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2)],
            vec![customer(7, 1.0, 0.0, 1), customer(8, 2.0, 0.0, 1)],
        );
        let mut routes = vec![Route::closed(0, vec![0, 1], &inst), Route::closed(0, vec![0], &inst)];
        DeparturePolicy::default().apply(&mut routes, &inst);
        let sol = Solution {
            routes,
            rebalance: None,
            strategy: Strategy::Cc,
        };
        let v = validate_solution(&sol, &inst, Strategy::Cc);
        assert_eq!(v, vec![Violation::DuplicateCustomer { customer_id: 7 }]);
        assert!(v[0].to_string().contains("customer 7"));
    }

    #[test]
    fn injected_imbalance_is_reported() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2), depot(2, 10.0, 0.0, 2)],
            vec![customer(1, 1.0, 0.0, 1)],
        );
        let mut routes = vec![Route::new(0, 1, vec![0], &inst)];
        DeparturePolicy::default().apply(&mut routes, &inst);
        let sol = Solution {
            routes,
            rebalance: None,
            strategy: Strategy::Boc,
        };
        let v = validate_solution(&sol, &inst, Strategy::Boc);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| matches!(x, Violation::Unbalanced { .. })));
        assert_eq!(
            validate_solution(&sol, &inst, Strategy::Rboc),
            vec![
                Violation::RebalanceMissing,
                Violation::Unbalanced { depot_id: 1, u: -1 },
                Violation::Unbalanced { depot_id: 2, u: 1 }
            ]
        );
    }

    #[test]
    fn tampered_arrival_is_caught() {
        let inst = build(vec![depot(1, 0.0, 0.0, 2)], vec![customer(1, 1.0, 0.0, 1)]);
        let mut routes = vec![Route::closed(0, vec![0], &inst)];
        DeparturePolicy::default().apply(&mut routes, &inst);
        routes[0].arrivals[0] += 1.0;
        let sol = Solution {
            routes,
            rebalance: None,
            strategy: Strategy::Cc,
        };
        assert!(matches!(
            validate_solution(&sol, &inst, Strategy::Cc)[..],
            [Violation::ArrivalMismatch { route: 0, position: 0, .. }]
        ));
    }
}

use std::fmt;

use serde::Serialize;

use super::{compute_depot_imbalance, Solution, Strategy};
use crate::construction::cluster_customers;
use crate::instance::Instance;
use crate::route::Route;
use crate::travel_time::propagate_route_times;

const ARRIVAL_TOL: f64 = 1e-9;

/// A broken feasibility rule. Ids are the instance's external labels;
/// `route` is a position in the solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownDepot { route: usize, depot: usize },
    UnknownCustomer { route: usize, index: usize },
    MissingCustomer { customer_id: usize },
    DuplicateCustomer { customer_id: usize },
    LoadMismatch { route: usize, recorded: u32, actual: u32 },
    Overload { route: usize, load: u32, capacity: u32 },
    FleetExceeded { depot_id: usize, departures: u32, fleet: u32 },
    Unpropagated { route: usize },
    ArrivalMismatch { route: usize, position: usize, recorded: f64, expected: f64 },
    OpenRoute { route: usize },
    WrongDepot { route: usize, customer_id: usize, depot_id: usize },
    Unbalanced { depot_id: usize, u: i64 },
    RebalanceMissing,
    RebalanceUnexpected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownDepot { route, depot } => write!(f, "route {route} uses unknown depot index {depot}"),
            UnknownCustomer { route, index } => write!(f, "route {route} visits unknown customer index {index}"),
            MissingCustomer { customer_id } => write!(f, "customer {customer_id} is not served"),
            DuplicateCustomer { customer_id } => write!(f, "customer {customer_id} is served more than once"),
            LoadMismatch { route, recorded, actual } => {
                write!(f, "route {route} records load {recorded} but carries {actual}")
            }
            Overload { route, load, capacity } => write!(f, "route {route} load {load} exceeds capacity {capacity}"),
            FleetExceeded { depot_id, departures, fleet } => {
                write!(f, "depot {depot_id} dispatches {departures} vehicles but owns {fleet}")
            }
            Unpropagated { route } => write!(f, "route {route} has no arrival times"),
            ArrivalMismatch { route, position, recorded, expected } => write!(
                f,
                "route {route} visit {position}: arrival {recorded} disagrees with travel times ({expected})"
            ),
            OpenRoute { route } => write!(f, "route {route} must return to its departure depot"),
            WrongDepot { route, customer_id, depot_id } => {
                write!(f, "route {route} serves customer {customer_id} from depot {depot_id}, not its assigned depot")
            }
            Unbalanced { depot_id, u } => write!(f, "depot {depot_id} is out of balance by {u}"),
            RebalanceMissing => write!(f, "imbalanced open routes need a rebalance plan"),
            RebalanceUnexpected => write!(f, "only RBOC solutions carry a rebalance plan"),
        }
    }
}

fn check_arrivals(idx: usize, route: &Route, instance: &Instance, out: &mut Vec<Violation>) {
    if !route.is_propagated() {
        out.push(Violation::Unpropagated { route: idx });
        return;
    }
    let mut fresh = route.clone();
    propagate_route_times(&mut fresh, route.start, instance);
    let expected = fresh.arrivals.iter().chain(std::iter::once(&fresh.return_arrival));
    let recorded = route.arrivals.iter().chain(std::iter::once(&route.return_arrival));
    for (position, (&e, &r)) in expected.zip(recorded).enumerate() {
        if !((e - r).abs() <= ARRIVAL_TOL * e.abs().max(1.0)) {
            out.push(Violation::ArrivalMismatch {
                route: idx,
                position,
                recorded: r,
                expected: e,
            });
            return;
        }
    }
}

/// Every feasibility rule the solution breaks; empty means feasible.
pub fn validate_solution(solution: &Solution, instance: &Instance, strategy: Strategy) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.n_customers();
    let m = instance.n_depots();
    let q = instance.vehicle().capacity;
    let mut served = vec![0u32; n];
    let mut departures = vec![0u32; m];
    let mut structurally_sound = true;

    for (idx, r) in solution.routes.iter().enumerate() {
        for depot in [r.depart_depot, r.return_depot] {
            if depot >= m {
                out.push(Violation::UnknownDepot { route: idx, depot });
                structurally_sound = false;
            }
        }
        let mut known = true;
        for &c in &r.visits {
            if c >= n {
                out.push(Violation::UnknownCustomer { route: idx, index: c });
                known = false;
            } else {
                served[c] += 1;
            }
        }
        if !known || r.depart_depot >= m || r.return_depot >= m {
            structurally_sound = false;
            continue;
        }
        departures[r.depart_depot] += 1;
        let actual: u32 = r.visits.iter().map(|&c| instance.customer(c).demand).sum();
        if actual != r.load {
            out.push(Violation::LoadMismatch {
                route: idx,
                recorded: r.load,
                actual,
            });
        }
        if actual > q {
            out.push(Violation::Overload {
                route: idx,
                load: actual,
                capacity: q,
            });
        }
        check_arrivals(idx, r, instance, &mut out);
    }

    for (c, &times) in served.iter().enumerate() {
        let customer_id = instance.customer(c).id;
        match times {
            0 => out.push(Violation::MissingCustomer { customer_id }),
            1 => {}
            _ => out.push(Violation::DuplicateCustomer { customer_id }),
        }
    }
    for (d, &used) in departures.iter().enumerate() {
        let depot = &instance.depots()[d];
        if used > depot.fleet_size {
            out.push(Violation::FleetExceeded {
                depot_id: depot.id,
                departures: used,
                fleet: depot.fleet_size,
            });
        }
    }
    if !structurally_sound {
        return out;
    }

    match strategy {
        Strategy::Standalone | Strategy::Cc => {
            let clusters = cluster_customers(instance);
            for (idx, r) in solution.routes.iter().enumerate() {
                if r.depart_depot != r.return_depot {
                    out.push(Violation::OpenRoute { route: idx });
                }
                for &c in &r.visits {
                    if clusters.depot_of[c] != r.depart_depot {
                        out.push(Violation::WrongDepot {
                            route: idx,
                            customer_id: instance.customer(c).id,
                            depot_id: instance.depots()[r.depart_depot].id,
                        });
                    }
                }
            }
        }
        Strategy::Boc => {
            for (d, &u) in compute_depot_imbalance(solution, instance).iter().enumerate() {
                if u != 0 {
                    out.push(Violation::Unbalanced {
                        depot_id: instance.depots()[d].id,
                        u,
                    });
                }
            }
        }
        Strategy::Rboc => {
            let u = compute_depot_imbalance(solution, instance);
            let outflow = match &solution.rebalance {
                Some(plan) => plan.net_outflow(m),
                None if u.iter().any(|&x| x != 0) => {
                    out.push(Violation::RebalanceMissing);
                    vec![0; m]
                }
                None => vec![0; m],
            };
            for d in 0..m {
                let residual = u[d] - outflow[d];
                if residual != 0 {
                    out.push(Violation::Unbalanced {
                        depot_id: instance.depots()[d].id,
                        u: residual,
                    });
                }
            }
        }
    }
    if strategy != Strategy::Rboc && solution.rebalance.as_ref().is_some_and(|p| !p.is_empty()) {
        out.push(Violation::RebalanceUnexpected);
    }
    out
}

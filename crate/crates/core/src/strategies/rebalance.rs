//! Post-distribution vehicle rebalancing over the depot highway network.
//!
//! Shortest highway distances come from a Floyd–Warshall closure; the transfer
//! plan is a min-cost flow from surplus depots (more returns than departures)
//! to deficit depots, solved by successive shortest paths. Because every
//! transferred vehicle pays the fixed cost once, routing a vehicle through an
//! intermediate depot is never cheaper, so only direct surplus-to-deficit arcs
//! are needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CostParams, Depot, HighwayNetwork, InstanceError, VehicleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub from: usize,
    pub to: usize,
    pub count: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RebalancePlan {
    pub transfers: Vec<Transfer>,
    pub cost: f64,
}

impl RebalancePlan {
    pub fn is_empty(&self) -> bool {
        self.transfers.is_empty()
    }

    /// Net vehicles sent out of each depot.
    pub fn net_outflow(&self, n_depots: usize) -> Vec<i64> {
        let mut out = vec![0i64; n_depots];
        for t in &self.transfers {
            out[t.from] += t.count as i64;
            out[t.to] -= t.count as i64;
        }
        out
    }
}

/// All-pairs shortest distances over highway edges.
pub fn floyd_shortest_paths(highway: &HighwayNetwork, depots: &[Depot]) -> Result<Vec<Vec<f64>>> {
    let n = depots.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (i, j, w) in highway.edges(depots) {
        d[i][j] = d[i][j].min(w);
        d[j][i] = d[j][i].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    if d.iter().flatten().any(|x| x.is_infinite()) {
        return Err(InstanceError::DisconnectedHighway {
            threshold_km: highway.threshold_km,
        }
        .into());
    }
    Ok(d)
}

/// Cost of moving one empty vehicle `distance` km: the fixed vehicle cost,
/// discounted distance cost and empty-vehicle carbon.
pub fn transfer_unit_cost(distance: f64, costs: &CostParams, vehicle: &VehicleSpec) -> f64 {
    costs.fix_cost
        + ((1.0 - costs.rebalance_discount) * costs.travel_unit
            + costs.carbon_emission * costs.carbon_price * vehicle.fuel_empty)
            * distance
}

struct Arc {
    to: usize,
    cap: i64,
    cost: f64,
}

/// Integer transfers minimising total transfer cost so that every depot ends
/// with as many vehicles as it started with. `u[i]` is returns minus
/// departures at depot `i`; a surplus depot ships `u[i]` vehicles out.
pub fn solve_rebalance(
    u: &[i64],
    dist: &[Vec<f64>],
    costs: &CostParams,
    vehicle: &VehicleSpec,
) -> Result<RebalancePlan> {
    let sum: i64 = u.iter().sum();
    if sum != 0 {
        return Err(Error::Unbalanced(sum));
    }
    let n = u.len();
    if u.iter().all(|&x| x == 0) {
        return Ok(RebalancePlan::default());
    }
    let source = n;
    let sink = n + 1;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let add = |arcs: &mut Vec<Arc>, adj: &mut Vec<Vec<usize>>, a: usize, b: usize, cap: i64, cost: f64| {
        adj[a].push(arcs.len());
        arcs.push(Arc { to: b, cap, cost });
        adj[b].push(arcs.len());
        arcs.push(Arc { to: a, cap: 0, cost: -cost });
    };
    let mut pair_arcs = Vec::new();
    for i in 0..n {
        if u[i] > 0 {
            add(&mut arcs, &mut adj, source, i, u[i], 0.0);
            for j in 0..n {
                if u[j] < 0 {
                    pair_arcs.push((arcs.len(), i, j));
                    add(&mut arcs, &mut adj, i, j, i64::MAX / 4, transfer_unit_cost(dist[i][j], costs, vehicle));
                }
            }
        } else if u[i] < 0 {
            add(&mut arcs, &mut adj, i, sink, -u[i], 0.0);
        }
    }

    // Bellman-Ford on the residual graph; it is tiny.
    let nodes = n + 2;
    loop {
        let mut dist_to = vec![f64::INFINITY; nodes];
        let mut via: Vec<Option<usize>> = vec![None; nodes];
        dist_to[source] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for v in 0..nodes {
                if dist_to[v].is_infinite() {
                    continue;
                }
                for &a in &adj[v] {
                    let arc = &arcs[a];
                    if arc.cap > 0 && dist_to[v] + arc.cost < dist_to[arc.to] - 1e-12 {
                        dist_to[arc.to] = dist_to[v] + arc.cost;
                        via[arc.to] = Some(a);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist_to[sink].is_infinite() {
            break;
        }
        let mut push = i64::MAX;
        let mut v = sink;
        while let Some(a) = via[v] {
            push = push.min(arcs[a].cap);
            v = arcs[a ^ 1].to;
        }
        let mut v = sink;
        while let Some(a) = via[v] {
            arcs[a].cap -= push;
            arcs[a ^ 1].cap += push;
            v = arcs[a ^ 1].to;
        }
    }

    let mut plan = RebalancePlan::default();
    for (a, i, j) in pair_arcs {
        let flow = arcs[a ^ 1].cap;
        if flow > 0 {
            plan.cost += flow as f64 * transfer_unit_cost(dist[i][j], costs, vehicle);
            plan.transfers.push(Transfer {
                from: i,
                to: j,
                count: flow as u32,
            });
        }
    }
    let residual: i64 = (0..n).filter(|&i| u[i] > 0).map(|i| u[i]).sum::<i64>()
        - plan.transfers.iter().map(|t| t.count as i64).sum::<i64>();
    debug_assert_eq!(residual, 0, "surplus left unshipped");
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::depot;

    fn params() -> (CostParams, VehicleSpec) {
        let costs = CostParams {
            fix_cost: 500.0,
            travel_unit: 10.0,
            rebalance_discount: 0.4,
            carbon_emission: 2.61,
            carbon_price: 0.1,
            ..CostParams::default()
        };
        let vehicle = VehicleSpec {
            capacity: 80,
            fuel_empty: 0.2,
            fuel_full: 0.4,
        };
        (costs, vehicle)
    }

    #[test]
    fn hand_fixture_621_044() {
        let (costs, vehicle) = params();
        let dist = vec![vec![0.0, 20.0], vec![20.0, 0.0]];
        let plan = solve_rebalance(&[1, -1], &dist, &costs, &vehicle).unwrap();
        assert_eq!(plan.transfers, vec![Transfer { from: 0, to: 1, count: 1 }]);
        assert!((plan.cost - 621.044).abs() < 1e-9, "{}", plan.cost);
    }

    #[test]
    fn balanced_needs_nothing() {
        let (costs, vehicle) = params();
        let dist = vec![vec![0.0, 20.0], vec![20.0, 0.0]];
        let plan = solve_rebalance(&[0, 0], &dist, &costs, &vehicle).unwrap();
        assert!(plan.is_empty());
        assert_eq!(plan.cost, 0.0);
        assert!(matches!(solve_rebalance(&[1, 0], &dist, &costs, &vehicle), Err(Error::Unbalanced(1))));
    }

    #[test]
    fn floyd_closes_the_triangle() {
        let hw = HighwayNetwork { threshold_km: 15.0 };
        let depots = vec![depot(1, 0.0, 0.0, 1), depot(2, 10.0, 0.0, 1), depot(3, 20.0, 0.0, 1)];
        let d = floyd_shortest_paths(&hw, &depots).unwrap();
        assert_eq!(d[0][2], 20.0);
        assert_eq!(d[1][1], 0.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], d[j][i]);
            }
        }
        let single = floyd_shortest_paths(&hw, &depots[..2]).unwrap();
        assert_eq!(single[0][1], 10.0);
        let far = vec![depot(1, 0.0, 0.0, 1), depot(2, 40.0, 0.0, 1)];
        assert!(floyd_shortest_paths(&hw, &far).is_err());
    }

    #[test]
    fn surplus_goes_to_nearest_deficit() {
        let (costs, vehicle) = params();
        // depot 0 surplus 2; deficits at 1 (near) and 2 (far), 1 each
        let dist = vec![vec![0.0, 5.0, 30.0], vec![5.0, 0.0, 25.0], vec![30.0, 25.0, 0.0]];
        let plan = solve_rebalance(&[2, -1, -1], &dist, &costs, &vehicle).unwrap();
        assert_eq!(plan.transfers.len(), 2);
        let expected = transfer_unit_cost(5.0, &costs, &vehicle) + transfer_unit_cost(30.0, &costs, &vehicle);
        assert!((plan.cost - expected).abs() < 1e-9);
        assert_eq!(plan.net_outflow(3), vec![2, -1, -1]);
    }
}

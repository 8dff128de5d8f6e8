//! Exact solutions of tiny instances by exhaustive enumeration, and a naive
//! second implementation of the objective for cross-checking.
//!
//! Every ordered partition of the customers into capacity-feasible routes is
//! generated; for each, depot endpoints are enumerated under the scenario's
//! rules (same depot for CC and stand-alone, balanced for BOC, free plus the
//! cheapest rebalancing for RBOC). Partial sums are pruned against the best
//! total so far, which never discards an optimum. Ties keep the first
//! solution in enumeration order.

use std::collections::HashMap;

use crate::construction::cluster_customers;
use crate::cost::{route_cost, solution_cost, CostBreakdown};
use crate::departure::DeparturePolicy;
use crate::error::{Error, Result};
use crate::instance::{euclid, CostParams, Instance, VehicleSpec};
use crate::route::Route;
use crate::strategies::{RebalancePlan, Solution, Strategy, Transfer};
use crate::travel_time::propagate_route_times;

pub const MAX_CUSTOMERS: usize = 7;
pub const MAX_DEPOTS: usize = 3;

fn check_size(instance: &Instance) -> Result<()> {
    if instance.n_customers() > MAX_CUSTOMERS || instance.n_depots() > MAX_DEPOTS {
        return Err(Error::OracleTooLarge {
            customers: instance.n_customers(),
            depots: instance.n_depots(),
            max_customers: MAX_CUSTOMERS,
            max_depots: MAX_DEPOTS,
        });
    }
    Ok(())
}

/// Cheapest way to ship each surplus depot's vehicles to deficit depots,
/// found by trying every integer transfer matrix.
pub fn brute_force_rebalance(
    u: &[i64],
    dist: &[Vec<f64>],
    costs: &CostParams,
    vehicle: &VehicleSpec,
) -> Result<(f64, Vec<Transfer>)> {
    let sum: i64 = u.iter().sum();
    if sum != 0 {
        return Err(Error::Unbalanced(sum));
    }
    let unit = |i: usize, j: usize| {
        let d = dist[i][j];
        costs.fix_cost
            + (1.0 - costs.rebalance_discount) * costs.travel_unit * d
            + costs.carbon_emission * costs.carbon_price * vehicle.fuel_empty * d
    };
    let sources: Vec<usize> = (0..u.len()).filter(|&i| u[i] > 0).collect();
    let sinks: Vec<usize> = (0..u.len()).filter(|&i| u[i] < 0).collect();

    struct Walk<'a, F: Fn(usize, usize) -> f64> {
        sources: &'a [usize],
        sinks: &'a [usize],
        unit: F,
        best: f64,
        best_plan: Vec<Transfer>,
    }
    impl<F: Fn(usize, usize) -> f64> Walk<'_, F> {
        // Distribute the supply of sources[s..] over sinks; `left` is what
        // each sink still needs, `rest` is what the current source still has.
        fn go(&mut self, s: usize, t: usize, rest: i64, left: &mut Vec<i64>, acc: f64, plan: &mut Vec<Transfer>, supply: &[i64]) {
            if s == self.sources.len() {
                if left.iter().all(|&x| x == 0) && acc < self.best {
                    self.best = acc;
                    self.best_plan = plan.clone();
                }
                return;
            }
            if t == self.sinks.len() {
                if rest == 0 {
                    let next = supply.get(s + 1).copied().unwrap_or(0);
                    self.go(s + 1, 0, next, left, acc, plan, supply);
                }
                return;
            }
            let max = rest.min(left[t]);
            for z in 0..=max {
                left[t] -= z;
                if z > 0 {
                    plan.push(Transfer {
                        from: self.sources[s],
                        to: self.sinks[t],
                        count: z as u32,
                    });
                }
                let c = acc + z as f64 * (self.unit)(self.sources[s], self.sinks[t]);
                self.go(s, t + 1, rest - z, left, c, plan, supply);
                if z > 0 {
                    plan.pop();
                }
                left[t] += z;
            }
        }
    }

    let supply: Vec<i64> = sources.iter().map(|&i| u[i]).collect();
    let mut left: Vec<i64> = sinks.iter().map(|&j| -u[j]).collect();
    let mut walk = Walk {
        sources: &sources,
        sinks: &sinks,
        unit,
        best: f64::INFINITY,
        best_plan: Vec::new(),
    };
    let first = supply.first().copied().unwrap_or(0);
    walk.go(0, 0, first, &mut left, 0.0, &mut Vec::new(), &supply);
    Ok((walk.best, walk.best_plan))
}

/// Shortest highway distances by repeated relaxation, independent of the
/// solver's Floyd closure.
fn naive_highway_distances(instance: &Instance) -> Vec<Vec<f64>> {
    let depots = instance.depots();
    let n = depots.len();
    let limit = instance.highway().threshold_km;
    let mut best = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in best.iter_mut().enumerate() {
        row[s] = 0.0;
        for _ in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let w = euclid(depots[a].x, depots[a].y, depots[b].x, depots[b].y);
                    if a != b && w < limit && row[a] + w < row[b] {
                        row[b] = row[a] + w;
                    }
                }
            }
        }
    }
    best
}

struct Enumerator<'a> {
    inst: &'a Instance,
    strategy: Strategy,
    start: f64,
    clusters: Vec<usize>,
    pair_cache: HashMap<Vec<usize>, Vec<f64>>,
    highway: Vec<Vec<f64>>,
    rebalance_memo: HashMap<Vec<i64>, f64>,
    best: f64,
    best_routes: Vec<(Vec<usize>, usize, usize)>,
}

impl<'a> Enumerator<'a> {
    /// Cost of a visit sequence for every (depart, return) pair, infinite
    /// where the scenario forbids the pair.
    fn pair_costs(&mut self, seq: &[usize]) -> Result<Vec<f64>> {
        if let Some(c) = self.pair_cache.get(seq) {
            return Ok(c.clone());
        }
        let m = self.inst.n_depots();
        let mut out = vec![f64::INFINITY; m * m];
        for d in 0..m {
            for r in 0..m {
                let allowed = match self.strategy {
                    Strategy::Cc | Strategy::Standalone => d == r && seq.iter().all(|&c| self.clusters[c] == d),
                    Strategy::Boc | Strategy::Rboc => true,
                };
                if !allowed {
                    continue;
                }
                let mut route = Route::new(d, r, seq.to_vec(), self.inst);
                propagate_route_times(&mut route, self.start, self.inst);
                out[d * m + r] = route_cost(&route, self.inst)?.total;
            }
        }
        self.pair_cache.insert(seq.to_vec(), out.clone());
        Ok(out)
    }

    fn rebalance(&mut self, u: &[i64]) -> Result<f64> {
        if let Some(&c) = self.rebalance_memo.get(u) {
            return Ok(c);
        }
        let (c, _) = brute_force_rebalance(u, &self.highway, self.inst.costs(), self.inst.vehicle())?;
        self.rebalance_memo.insert(u.to_vec(), c);
        Ok(c)
    }

    fn partitions(&mut self, c: usize, routes: &mut Vec<Vec<usize>>, loads: &mut Vec<u32>) -> Result<()> {
        if c == self.inst.n_customers() {
            return self.evaluate(routes);
        }
        let q = self.inst.vehicle().capacity;
        let dem = self.inst.customer(c).demand;
        for i in 0..routes.len() {
            if loads[i] + dem > q {
                continue;
            }
            loads[i] += dem;
            for pos in 0..=routes[i].len() {
                routes[i].insert(pos, c);
                self.partitions(c + 1, routes, loads)?;
                routes[i].remove(pos);
            }
            loads[i] -= dem;
        }
        if routes.len() < self.inst.total_fleet() as usize {
            routes.push(vec![c]);
            loads.push(dem);
            self.partitions(c + 1, routes, loads)?;
            routes.pop();
            loads.pop();
        }
        Ok(())
    }

    fn evaluate(&mut self, routes: &[Vec<usize>]) -> Result<()> {
        let mut costs = Vec::with_capacity(routes.len());
        for r in routes {
            costs.push(self.pair_costs(r)?);
        }
        // suffix sums of per-route minima bound every completion
        let mut bound = vec![0.0; routes.len() + 1];
        for i in (0..routes.len()).rev() {
            let min = costs[i].iter().copied().fold(f64::INFINITY, f64::min);
            bound[i] = bound[i + 1] + min;
        }
        if !(bound[0] < self.best) {
            return Ok(());
        }
        let m = self.inst.n_depots();
        let mut used = vec![0u32; m];
        let mut u = vec![0i64; m];
        let mut choice = Vec::with_capacity(routes.len());
        self.endpoints(0, routes, &costs, &bound, 0.0, &mut used, &mut u, &mut choice)
    }

    #[allow(clippy::too_many_arguments)]
    fn endpoints(
        &mut self,
        i: usize,
        routes: &[Vec<usize>],
        costs: &[Vec<f64>],
        bound: &[f64],
        acc: f64,
        used: &mut Vec<u32>,
        u: &mut Vec<i64>,
        choice: &mut Vec<(usize, usize)>,
    ) -> Result<()> {
        if !(acc + bound[i] < self.best) {
            return Ok(());
        }
        if i == routes.len() {
            let extra = match self.strategy {
                Strategy::Boc if u.iter().any(|&x| x != 0) => return Ok(()),
                Strategy::Rboc => self.rebalance(u)?,
                _ => 0.0,
            };
            if acc + extra < self.best {
                self.best = acc + extra;
                self.best_routes = routes
                    .iter()
                    .zip(choice.iter())
                    .map(|(seq, &(d, r))| (seq.clone(), d, r))
                    .collect();
            }
            return Ok(());
        }
        let m = self.inst.n_depots();
        for d in 0..m {
            if used[d] >= self.inst.depots()[d].fleet_size {
                continue;
            }
            for r in 0..m {
                let c = costs[i][d * m + r];
                if c.is_infinite() {
                    continue;
                }
                used[d] += 1;
                u[d] -= 1;
                u[r] += 1;
                choice.push((d, r));
                self.endpoints(i + 1, routes, costs, bound, acc + c, used, u, choice)?;
                choice.pop();
                u[r] -= 1;
                u[d] += 1;
                used[d] -= 1;
            }
        }
        Ok(())
    }
}

/// Global optimum for an instance of at most [`MAX_CUSTOMERS`] customers and
/// [`MAX_DEPOTS`] depots under a fixed departure time.
pub fn exact_solve(
    instance: &Instance,
    strategy: Strategy,
    policy: &DeparturePolicy,
) -> Result<(Solution, CostBreakdown)> {
    check_size(instance)?;
    let DeparturePolicy::Fixed { start } = *policy else {
        return Err(Error::Unsupported(
            "the exact solver needs a fixed departure time".into(),
        ));
    };
    if strategy == Strategy::Standalone && instance.customers().iter().any(|c| c.bound_depot.is_none()) {
        return Err(Error::Config(
            "the stand-alone scenario needs split order records bound to depots".into(),
        ));
    }
    let highway = if strategy == Strategy::Rboc {
        instance.highway().check_connected(instance.depots())?;
        naive_highway_distances(instance)
    } else {
        Vec::new()
    };
    let mut e = Enumerator {
        inst: instance,
        strategy,
        start,
        clusters: cluster_customers(instance).depot_of,
        pair_cache: HashMap::new(),
        highway,
        rebalance_memo: HashMap::new(),
        best: f64::INFINITY,
        best_routes: Vec::new(),
    };
    e.partitions(0, &mut Vec::new(), &mut Vec::new())?;
    if e.best.is_infinite() {
        return Err(Error::Unsupported(format!(
            "no feasible {strategy} solution exists within the fleet limits"
        )));
    }
    let mut routes: Vec<Route> = e
        .best_routes
        .iter()
        .map(|(seq, d, r)| Route::new(*d, *r, seq.clone(), instance))
        .collect();
    for r in &mut routes {
        propagate_route_times(r, start, instance);
    }
    let mut solution = Solution {
        routes,
        rebalance: None,
        strategy,
    };
    if strategy == Strategy::Rboc {
        let u = crate::strategies::compute_depot_imbalance(&solution, instance);
        let (cost, transfers) = brute_force_rebalance(&u, &e.highway, instance.costs(), instance.vehicle())?;
        solution.rebalance = Some(RebalancePlan { transfers, cost });
    }
    let cost = solution_cost(&solution, instance)?;
    Ok((solution, cost))
}

/// Minutes to drive `distance` km leaving at `depart`, walking the speed
/// table one period at a time.
fn naive_travel(depart: f64, distance: f64, instance: &Instance) -> f64 {
    let periods = instance.schedule().periods();
    let mut t = depart;
    let mut left = distance;
    while left > 0.0 {
        let mut idx = periods.len() - 1;
        for (i, p) in periods.iter().enumerate() {
            if p.start_min <= t && t < p.end_min {
                idx = i;
                break;
            }
        }
        let speed = periods[idx].speed_kmh / 60.0;
        let period_end = if idx + 1 == periods.len() {
            f64::INFINITY
        } else {
            periods[idx].end_min
        };
        let reach = speed * (period_end - t);
        if left <= reach {
            t += left / speed;
            left = 0.0;
        } else {
            left -= reach;
            t = period_end;
        }
    }
    t - depart
}

/// Cost of one route recomputed from its visits, depots and start time
/// alone; stored arrival times are ignored.
pub fn audit_route_cost(route: &Route, instance: &Instance) -> CostBreakdown {
    let c = instance.costs();
    let v = instance.vehicle();
    let mut b = CostBreakdown {
        fix: c.fix_cost,
        ..CostBreakdown::default()
    };
    if route.visits.is_empty() {
        b.total = b.fix;
        return b;
    }
    // node coordinates: depart depot, customers..., return depot
    let dep = &instance.depots()[route.depart_depot];
    let ret = &instance.depots()[route.return_depot];
    let mut xs = vec![(dep.x, dep.y)];
    for &i in &route.visits {
        let cu = instance.customer(i);
        xs.push((cu.x, cu.y));
    }
    xs.push((ret.x, ret.y));
    let legs: Vec<f64> = xs.windows(2).map(|w| euclid(w[0].0, w[0].1, w[1].0, w[1].1)).collect();
    let prefix: Vec<f64> = (1..=legs.len()).map(|k| legs[..k].iter().sum()).collect();

    let mut clock = route.start;
    for (k, &i) in route.visits.iter().enumerate() {
        let cu = instance.customer(i);
        let travel = naive_travel(clock, legs[k], instance);
        let arrival = clock + travel;
        let w = cu.demand as f64;
        let fuel = v.fuel_empty + w * (v.fuel_full - v.fuel_empty) / v.capacity as f64;
        b.co2 += c.carbon_price * c.carbon_emission * fuel * prefix[k];
        b.cooling += c.cooling_per_min * (travel + cu.service_time);
        b.good_loss += c.good_loss_per_unit_min * w * (travel + cu.service_time);
        if arrival < cu.earliest {
            b.penalty += c.early_penalty_per_min * (cu.earliest - arrival);
        }
        if arrival > cu.latest {
            b.penalty += c.late_penalty_per_min * (arrival - cu.latest);
        }
        clock = arrival + cu.service_time;
    }
    let length = *prefix.last().unwrap();
    b.co2 += c.carbon_price * c.carbon_emission * v.fuel_empty * length;
    b.transport = c.travel_unit * length;
    b.total = b.fix + b.transport + b.co2 + b.cooling + b.good_loss + b.penalty;
    b
}

/// Whole-solution audit: routes as in [`audit_route_cost`] plus the rebalance
/// plan priced over independently computed highway distances.
pub fn audit_cost(solution: &Solution, instance: &Instance) -> CostBreakdown {
    let mut total = CostBreakdown::default();
    for r in &solution.routes {
        total += audit_route_cost(r, instance);
    }
    if let Some(plan) = &solution.rebalance {
        let dist = naive_highway_distances(instance);
        let c = instance.costs();
        let v = instance.vehicle();
        for t in &plan.transfers {
            let d = dist[t.from][t.to];
            let each = c.fix_cost
                + (1.0 - c.rebalance_discount) * c.travel_unit * d
                + c.carbon_emission * c.carbon_price * v.fuel_empty * d;
            total.rebalance += t.count as f64 * each;
        }
        total.total += total.rebalance;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};

    #[test]
    fn single_customer_single_depot() {
        let inst = build(vec![depot(1, 0.0, 0.0, 1)], vec![customer(1, 3.0, 4.0, 10)]);
        let (sol, cost) = exact_solve(&inst, Strategy::Cc, &DeparturePolicy::default()).unwrap();
        assert_eq!(sol.routes.len(), 1);
        assert_eq!(sol.routes[0].visits, vec![0]);
        let direct = route_cost(&sol.routes[0], &inst).unwrap();
        assert_eq!(cost.total, direct.total);
    }

    #[test]
    fn capacity_forces_two_routes() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2)],
            vec![customer(1, 3.0, 4.0, 50), customer(2, 4.0, 3.0, 50)],
        );
        let (sol, _) = exact_solve(&inst, Strategy::Boc, &DeparturePolicy::default()).unwrap();
        assert_eq!(sol.routes.len(), 2);
    }

    #[test]
    fn size_cap_and_policy_guard() {
        let cs = (0..8).map(|i| customer(i + 1, i as f64, 0.0, 1)).collect();
        let inst = build(vec![depot(1, 0.0, 0.0, 8)], cs);
        assert!(matches!(
            exact_solve(&inst, Strategy::Cc, &DeparturePolicy::default()),
            Err(Error::OracleTooLarge { .. })
        ));
        let small = build(vec![depot(1, 0.0, 0.0, 1)], vec![customer(1, 1.0, 0.0, 1)]);
        let flex = DeparturePolicy::Flexible { lo: 0.0, hi: 10.0, seed: 1 };
        assert!(exact_solve(&small, Strategy::Cc, &flex).is_err());
    }

    #[test]
    fn audit_matches_hand_values() {
        let inst = build(vec![depot(1, 0.0, 0.0, 1)], vec![customer(1, 5.0, 0.0, 10)]);
        let mut r = Route::closed(0, vec![0], &inst);
        r.start = 0.0;
        let b = audit_route_cost(&r, &inst);
        // 5 km at 10 km/h: arrival 30, 90 min before the window opens
        assert!((b.penalty - 5.0 / 60.0 * 90.0).abs() < 1e-12);
        assert!((b.transport - 100.0).abs() < 1e-12);
        let empty = Route::closed(0, vec![], &inst);
        assert_eq!(audit_route_cost(&empty, &inst).total, 500.0);
    }

    #[test]
    fn brute_force_matches_hand_fixture() {
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
        let dist = vec![vec![0.0, 20.0], vec![20.0, 0.0]];
        let (c, plan) = brute_force_rebalance(&[1, -1], &dist, &costs, &vehicle).unwrap();
        assert!((c - 621.044).abs() < 1e-9);
        assert_eq!(plan, vec![Transfer { from: 0, to: 1, count: 1 }]);
        let (zero, none) = brute_force_rebalance(&[0, 0], &dist, &costs, &vehicle).unwrap();
        assert_eq!((zero, none.len()), (0.0, 0));
    }
}

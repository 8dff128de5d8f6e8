//! Synchronous balancing: re-point return depots until every depot receives
//! as many vehicles as it sends out.

use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::route::Route;

/// Which returning routes of a surplus depot are re-pointed first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceOrder {
    /// Routes whose last customer is farthest from the depot go first.
    #[default]
    FarthestFirst,
    NearestFirst,
}

/// `u[i]` = routes returning to depot `i` minus routes leaving it.
pub fn imbalance_of(departs: impl Iterator<Item = usize>, returns: impl Iterator<Item = usize>, n: usize) -> Vec<i64> {
    let mut u = vec![0i64; n];
    for d in departs {
        u[d] -= 1;
    }
    for r in returns {
        u[r] += 1;
    }
    u
}

/// Core of the balancing pass over parallel slices: `lasts[r]` is the last
/// customer of route `r` (`None` for an empty route). Rewrites `returns` and
/// returns the indices of the routes that changed.
pub fn balance_returns(
    departs: &[usize],
    returns: &mut [usize],
    lasts: &[Option<usize>],
    instance: &Instance,
    order: BalanceOrder,
) -> Vec<usize> {
    let n = instance.n_depots();
    let mut u = imbalance_of(departs.iter().copied(), returns.iter().copied(), n);
    let mut changed = Vec::new();
    for m in 0..n {
        if u[m] <= 0 {
            continue;
        }
        let dist_to = |r: usize, d: usize| lasts[r].map_or(0.0, |c| instance.depot_customer(d, c));
        let mut returning: Vec<usize> = (0..returns.len()).filter(|&r| returns[r] == m).collect();
        returning.sort_by(|&a, &b| {
            let ord = dist_to(a, m).total_cmp(&dist_to(b, m));
            match order {
                BalanceOrder::FarthestFirst => ord.reverse(),
                BalanceOrder::NearestFirst => ord,
            }
            .then(a.cmp(&b))
        });
        for &r in returning.iter().take(u[m] as usize) {
            let target = (0..n)
                .filter(|&d| u[d] < 0)
                .min_by(|&a, &b| dist_to(r, a).total_cmp(&dist_to(r, b)).then(a.cmp(&b)))
                .expect("a surplus depot implies a deficit depot");
            returns[r] = target;
            u[target] += 1;
            u[m] -= 1;
            changed.push(r);
        }
    }
    debug_assert!(u.iter().all(|&x| x == 0));
    changed
}

/// Applies the balancing pass to routes in place, re-propagating the arrival
/// times of every re-pointed route. Returns the changed route indices.
pub fn balance_routes(routes: &mut [Route], instance: &Instance, order: BalanceOrder) -> Vec<usize> {
    let departs: Vec<usize> = routes.iter().map(|r| r.depart_depot).collect();
    let mut returns: Vec<usize> = routes.iter().map(|r| r.return_depot).collect();
    let lasts: Vec<Option<usize>> = routes.iter().map(|r| r.visits.last().copied()).collect();
    let changed = balance_returns(&departs, &mut returns, &lasts, instance, order);
    for &r in &changed {
        routes[r].return_depot = returns[r];
        if routes[r].is_propagated() {
            let start = routes[r].start;
            crate::travel_time::propagate_route_times(&mut routes[r], start, instance);
        }
    }
    changed
}

//! Initial solutions: nearest-depot clustering and push-forward insertion.
//!
//! Insertion only checks capacity; time windows are soft and show up in the
//! objective, which the search then improves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{euclid, Instance};
use crate::route::Route;

/// Weights of the seed-selection cost `-eta·d + theta·lt + xi·(angle/360)·d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfihWeights {
    pub eta: f64,
    pub theta: f64,
    pub xi: f64,
}

impl Default for PfihWeights {
    fn default() -> Self {
        PfihWeights {
            eta: 0.7,
            theta: 0.2,
            xi: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub depot_of: Vec<usize>,
}

impl ClusterAssignment {
    pub fn customers_of(&self, depot: usize) -> Vec<usize> {
        (0..self.depot_of.len())
            .filter(|&c| self.depot_of[c] == depot)
            .collect()
    }
}

/// Assigns each customer to its nearest depot (lowest index on ties). Order
/// records bound to a depot stay with that depot.
pub fn cluster_customers(instance: &Instance) -> ClusterAssignment {
    ClusterAssignment {
        depot_of: instance
            .customers()
            .iter()
            .enumerate()
            .map(|(i, c)| c.bound_depot.unwrap_or_else(|| instance.nearest_depot(i)))
            .collect(),
    }
}

/// Mean of the depot coordinates.
pub fn virtual_depot(instance: &Instance) -> (f64, f64) {
    let n = instance.n_depots() as f64;
    let (sx, sy) = instance
        .depots()
        .iter()
        .fold((0.0, 0.0), |(x, y), d| (x + d.x, y + d.y));
    (sx / n, sy / n)
}

/// Nearest depot to `customer` that still has a vehicle, given per-depot
/// departure counts `used`. Ties go to the lowest index.
pub fn nearest_depot_with_capacity(instance: &Instance, customer: usize, used: &[u32]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (d, depot) in instance.depots().iter().enumerate() {
        if used[d] >= depot.fleet_size {
            continue;
        }
        if best.map_or(true, |b| instance.depot_customer(d, customer) < instance.depot_customer(b, customer)) {
            best = Some(d);
        }
    }
    best
}

/// Polar angle of `(x, y)` around `origin`, in degrees `[0, 360)`.
fn polar_angle(origin: (f64, f64), x: f64, y: f64) -> f64 {
    let a = (y - origin.1).atan2(x - origin.0).to_degrees();
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

pub fn seed_cost(instance: &Instance, origin: (f64, f64), customer: usize, w: &PfihWeights) -> f64 {
    let c = instance.customer(customer);
    let d = euclid(origin.0, origin.1, c.x, c.y);
    -w.eta * d + w.theta * c.latest + w.xi * (polar_angle(origin, c.x, c.y) / 360.0) * d
}

/// Builds closed tours around `origin` covering `customers`.
pub fn pfih_sequences(
    customers: &[usize],
    origin: (f64, f64),
    instance: &Instance,
    weights: &PfihWeights,
) -> Vec<Vec<usize>> {
    let q = instance.vehicle().capacity;
    let to_origin: Vec<f64> = instance
        .customers()
        .iter()
        .map(|c| euclid(origin.0, origin.1, c.x, c.y))
        .collect();
    let mut unrouted: Vec<usize> = customers.to_vec();
    unrouted.sort_unstable();
    let mut routes = Vec::new();

    while !unrouted.is_empty() {
        let (seed_pos, _) = unrouted
            .iter()
            .enumerate()
            .map(|(pos, &c)| (pos, seed_cost(instance, origin, c, weights)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let seed = unrouted.remove(seed_pos);
        let mut route = vec![seed];
        let mut load = instance.customer(seed).demand;

        loop {
            // (cost, position in unrouted, insertion slot)
            let mut best: Option<(f64, usize, usize)> = None;
            for (upos, &u) in unrouted.iter().enumerate() {
                if load + instance.customer(u).demand > q {
                    continue;
                }
                for slot in 0..=route.len() {
                    let before = if slot == 0 { None } else { Some(route[slot - 1]) };
                    let after = route.get(slot).copied();
                    let d = |a: Option<usize>, b: Option<usize>| match (a, b) {
                        (Some(a), Some(b)) => instance.customer_customer(a, b),
                        (Some(a), None) | (None, Some(a)) => to_origin[a],
                        (None, None) => 0.0,
                    };
                    let cost = d(before, Some(u)) + d(Some(u), after) - d(before, after);
                    if best.map_or(true, |b| cost < b.0) {
                        best = Some((cost, upos, slot));
                    }
                }
            }
            let Some((_, upos, slot)) = best else { break };
            let u = unrouted.remove(upos);
            load += instance.customer(u).demand;
            route.insert(slot, u);
        }
        routes.push(route);
    }
    routes
}

/// Closed routes from one depot. Needing more vehicles than the depot owns is
/// an error.
pub fn pfih_construct(
    customers: &[usize],
    depot: usize,
    instance: &Instance,
    weights: &PfihWeights,
) -> Result<Vec<Route>> {
    let d = &instance.depots()[depot];
    let seqs = pfih_sequences(customers, (d.x, d.y), instance, weights);
    if seqs.len() > d.fleet_size as usize {
        return Err(Error::FleetExceeded {
            depot_id: d.id,
            needed: seqs.len(),
            available: d.fleet_size,
        });
    }
    Ok(seqs
        .into_iter()
        .map(|s| Route::closed(depot, s, instance))
        .collect())
}

/// Routes built around the virtual depot, then attached to real depots: each
/// leaves from the nearest depot to its first customer that still has a
/// vehicle and returns to the depot nearest its last customer.
pub fn pfih_virtual(customers: &[usize], instance: &Instance, weights: &PfihWeights) -> Result<Vec<Route>> {
    let seqs = pfih_sequences(customers, virtual_depot(instance), instance, weights);
    let mut used = vec![0u32; instance.n_depots()];
    let mut routes = Vec::with_capacity(seqs.len());
    for s in seqs {
        let first = s[0];
        let last = *s.last().unwrap();
        let dep = nearest_depot_with_capacity(instance, first, &used).ok_or(Error::FleetExhausted)?;
        used[dep] += 1;
        routes.push(Route::new(dep, instance.nearest_depot(last), s, instance));
    }
    Ok(routes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};

    #[test]
    fn clustering_examples() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2), depot(2, 5.0, 5.0, 2)],
            vec![customer(1, 0.0, 1.0, 1), customer(2, 2.5, 2.5, 1), customer(3, 5.0, 4.0, 1)],
        );
        assert_eq!(cluster_customers(&inst).depot_of, vec![0, 0, 1]);
    }

    #[test]
    fn bound_records_keep_their_depot() {
        let mut c = customer(1, 0.0, 1.0, 1);
        c.bound_depot = Some(1);
        let inst = build(vec![depot(1, 0.0, 0.0, 2), depot(2, 5.0, 5.0, 2)], vec![c]);
        assert_eq!(cluster_customers(&inst).depot_of, vec![1]);
    }

    #[test]
    fn virtual_depot_is_the_mean() {
        let one = build(vec![depot(1, 2.0, 3.0, 1)], vec![customer(1, 0.0, 0.0, 1)]);
        assert_eq!(virtual_depot(&one), (2.0, 3.0));
        let three = build(
            vec![depot(1, 0.0, 0.0, 1), depot(2, 3.0, 0.0, 1), depot(3, 0.0, 3.0, 1)],
            vec![customer(1, 0.0, 0.0, 1)],
        );
        assert_eq!(virtual_depot(&three), (1.0, 1.0));
    }

    #[test]
    fn capacity_forces_two_routes() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 2)],
            vec![customer(1, 1.0, 0.0, 50), customer(2, 2.0, 0.0, 50)],
        );
        let routes = pfih_construct(&[0, 1], 0, &inst, &PfihWeights::default()).unwrap();
        assert_eq!(routes.len(), 2);
        let single = pfih_construct(&[0], 0, &inst, &PfihWeights::default()).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].visits, vec![0]);
    }

    #[test]
    fn fleet_overflow_is_an_error() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 1)],
            vec![customer(1, 1.0, 0.0, 50), customer(2, 2.0, 0.0, 50)],
        );
        let err = pfih_construct(&[0, 1], 0, &inst, &PfihWeights::default()).unwrap_err();
        assert!(matches!(err, Error::FleetExceeded { needed: 2, available: 1, .. }));
    }

    #[test]
    fn seed_is_the_hand_argmin() {
        // depot at origin; seed cost = -0.7 d + 0.2 lt + 0.1 (angle/360) d
        let mk = |id, x, y, lt| {
            let mut c = customer(id, x, y, 5);
            c.latest = lt;
            c
        };
        let cs = vec![
            mk(1, 10.0, 0.0, 180.0),  // -7 + 36 + 0        = 29
            mk(2, 0.0, 20.0, 200.0),  // -14 + 40 + 0.5     = 26.5
            mk(3, -30.0, 0.0, 240.0), // -21 + 48 + 1.5     = 28.5
            mk(4, 0.0, -5.0, 130.0),  // -3.5 + 26 + 0.375  = 22.875
            mk(5, 3.0, 4.0, 150.0),   // -3.5 + 30 + ~0.0738 ≈ 26.57
        ];
        let inst = build(vec![depot(1, 0.0, 0.0, 5)], cs);
        let w = PfihWeights::default();
        let costs: Vec<f64> = (0..5).map(|i| seed_cost(&inst, (0.0, 0.0), i, &w)).collect();
        assert!((costs[0] - 29.0).abs() < 1e-9);
        assert!((costs[3] - 22.875).abs() < 1e-9);
        // capacity 80 admits all five in one route, seeded with customer 4
        let routes = pfih_sequences(&[0, 1, 2, 3, 4], (0.0, 0.0), &inst, &w);
        assert_eq!(routes.len(), 1);
        let mut q = build(vec![depot(1, 0.0, 0.0, 5)], inst.customers().to_vec());
        q = q
            .with_vehicle(crate::instance::VehicleSpec {
                capacity: 5,
                ..*inst.vehicle()
            })
            .unwrap();
        let singles = pfih_sequences(&[0, 1, 2, 3, 4], (0.0, 0.0), &q, &w);
        assert_eq!(singles[0], vec![3]);
    }

    #[test]
    fn every_customer_routed_once() {
        let cs: Vec<_> = (0..12)
            .map(|i| customer(i + 1, (i * 7 % 11) as f64, (i * 5 % 13) as f64, 10 + (i as u32 * 3) % 30))
            .collect();
        let inst = build(vec![depot(1, 5.0, 5.0, 12), depot(2, 0.0, 10.0, 12)], cs);
        let routes = pfih_virtual(&(0..12).collect::<Vec<_>>(), &inst, &PfihWeights::default()).unwrap();
        let mut seen: Vec<usize> = routes.iter().flat_map(|r| r.visits.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..12).collect::<Vec<_>>());
        assert!(routes.iter().all(|r| r.load <= 80));
    }

    #[test]
    fn nearest_with_capacity_skips_full_depots() {
        let inst = build(
            vec![depot(1, 0.0, 0.0, 1), depot(2, 10.0, 0.0, 1)],
            vec![customer(1, 1.0, 0.0, 5)],
        );
        assert_eq!(nearest_depot_with_capacity(&inst, 0, &[0, 0]), Some(0));
        assert_eq!(nearest_depot_with_capacity(&inst, 0, &[1, 0]), Some(1));
        assert_eq!(nearest_depot_with_capacity(&inst, 0, &[1, 1]), None);
    }
}

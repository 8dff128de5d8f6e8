//! Seeded random instances and stand-alone order splitting.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Customer, Depot, HighwayNetwork, Instance, InstanceError};
use crate::config::Defaults;

const PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub n_customers: usize,
    pub n_depots: usize,
    /// Side of the square service area in km.
    pub side_km: f64,
    pub demand: (u32, u32),
    pub service_time: (f64, f64),
    pub fleet: (u32, u32),
    /// Range for the start of each customer's time window (minutes).
    pub window_start: (f64, f64),
    /// Range for the width of each customer's time window (minutes).
    pub window_width: (f64, f64),
    pub seed: u64,
}

impl GenerationSpec {
    /// Metropolitan vaccine-distribution setting: 114 medical centres,
    /// 6 distribution centres, 1–25 boxes per order, 6–10 vehicles per depot.
    pub fn case_study(seed: u64) -> Self {
        GenerationSpec {
            n_customers: 114,
            n_depots: 6,
            side_km: 40.0,
            demand: (1, 25),
            service_time: (5.0, 15.0),
            fleet: (6, 10),
            window_start: (90.0, 330.0),
            window_width: (60.0, 120.0),
            seed,
        }
    }

    pub fn benchmark(n_customers: usize, n_depots: usize, seed: u64) -> Self {
        GenerationSpec {
            n_customers,
            n_depots,
            side_km: 50.0,
            demand: (5, 30),
            service_time: (5.0, 15.0),
            fleet: (10, 12),
            window_start: (60.0, 330.0),
            window_width: (60.0, 120.0),
            seed,
        }
    }
}

fn check_range<T: PartialOrd + std::fmt::Debug>(name: &str, r: (T, T)) -> Result<(), InstanceError> {
    if r.0 <= r.1 {
        Ok(())
    } else {
        Err(InstanceError::Invalid {
            field: format!("generation.{name}"),
            reason: format!("empty range {:?}", r),
        })
    }
}

fn uniform_f64(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Draws a random instance. Depot positions are re-drawn until the highway
/// network connects every depot.
pub fn generate_instance(spec: &GenerationSpec, defaults: &Defaults) -> Result<Instance, InstanceError> {
    if spec.n_customers == 0 || spec.n_depots == 0 {
        return Err(InstanceError::Invalid {
            field: "generation".into(),
            reason: "need at least one customer and one depot".into(),
        });
    }
    check_range("demand", spec.demand)?;
    check_range("service_time", spec.service_time)?;
    check_range("fleet", spec.fleet)?;
    check_range("window_start", spec.window_start)?;
    check_range("window_width", spec.window_width)?;
    if spec.demand.0 == 0 || spec.demand.1 > defaults.capacity {
        return Err(InstanceError::Invalid {
            field: "generation.demand".into(),
            reason: format!("demands must lie in [1, {}]", defaults.capacity),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let highway = HighwayNetwork {
        threshold_km: defaults.highway_threshold,
    };
    let side = spec.side_km;

    let mut depots = Vec::new();
    for attempt in 0..PLACEMENT_ATTEMPTS {
        depots = (0..spec.n_depots)
            .map(|i| Depot {
                id: i + 1,
                x: rng.gen_range(0.0..=side),
                y: rng.gen_range(0.0..=side),
                fleet_size: rng.gen_range(spec.fleet.0..=spec.fleet.1),
            })
            .collect();
        if highway.is_connected(&depots) {
            break;
        }
        if attempt + 1 == PLACEMENT_ATTEMPTS {
            return Err(InstanceError::DisconnectedHighway {
                threshold_km: highway.threshold_km,
            });
        }
    }

    let customers = (0..spec.n_customers)
        .map(|i| {
            let x = rng.gen_range(0.0..=side);
            let y = rng.gen_range(0.0..=side);
            let demand = rng.gen_range(spec.demand.0..=spec.demand.1);
            let earliest = uniform_f64(&mut rng, spec.window_start).round();
            let width = uniform_f64(&mut rng, spec.window_width).round();
            let service_time = uniform_f64(&mut rng, spec.service_time).round();
            Customer {
                id: i + 1,
                x,
                y,
                demand,
                earliest,
                latest: earliest + width,
                ideal_earliest: (earliest - defaults.ideal_earliest_offset).max(0.0),
                service_time,
                bound_depot: None,
            }
        })
        .collect();

    Instance::new(
        depots,
        customers,
        defaults.vehicle(),
        defaults.schedule()?,
        defaults.cost_params(),
        highway,
    )
}

/// Uniform integer split of `total` into two nonnegative parts.
pub fn split_demand<R: Rng + ?Sized>(total: u32, rng: &mut R) -> (u32, u32) {
    let first = rng.gen_range(0..=total);
    (first, total - first)
}

/// The two depots nearest to a customer, ties to the lower index.
fn two_nearest(instance: &Instance, customer: usize) -> (usize, usize) {
    let mut order: Vec<usize> = (0..instance.n_depots()).collect();
    order.sort_by(|&a, &b| {
        instance
            .depot_customer(a, customer)
            .total_cmp(&instance.depot_customer(b, customer))
            .then(a.cmp(&b))
    });
    (order[0], order[1])
}

/// Replaces every customer by two co-located orders bound to its two nearest
/// depots. Zero-sized parts place no order and are dropped, so total demand is
/// conserved exactly. Record ids are `2·id` (nearest depot) and `2·id + 1`.
pub fn split_standalone_demand(instance: &Instance, seed: u64) -> Result<Instance, InstanceError> {
    if instance.n_depots() < 2 {
        return Err(InstanceError::TooFewDepots(instance.n_depots()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(2 * instance.n_customers());
    for (i, c) in instance.customers().iter().enumerate() {
        let (near, second) = two_nearest(instance, i);
        let (a, b) = split_demand(c.demand, &mut rng);
        for (part, depot, id) in [(a, near, 2 * c.id), (b, second, 2 * c.id + 1)] {
            if part > 0 {
                records.push(Customer {
                    id,
                    demand: part,
                    bound_depot: Some(depot),
                    ..c.clone()
                });
            }
        }
    }
    Instance::new(
        instance.depots().to_vec(),
        records,
        *instance.vehicle(),
        instance.schedule().clone(),
        *instance.costs(),
        *instance.highway(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};

    #[test]
    fn generation_is_deterministic() {
        let d = Defaults::default();
        let spec = GenerationSpec::case_study(7);
        let a = generate_instance(&spec, &d).unwrap();
        let b = generate_instance(&spec, &d).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let c = generate_instance(&GenerationSpec::case_study(8), &d).unwrap();
        assert_ne!(a.to_json_string(), c.to_json_string());
    }

    #[test]
    fn case_study_ranges() {
        let inst = generate_instance(&GenerationSpec::case_study(3), &Defaults {
            highway_threshold: 45.0,
            ..Defaults::default()
        })
        .unwrap();
        assert_eq!(inst.n_customers(), 114);
        assert_eq!(inst.n_depots(), 6);
        assert!(inst.customers().iter().all(|c| (1..=25).contains(&c.demand)));
        assert!(inst.depots().iter().all(|d| (6..=10).contains(&d.fleet_size)));
        assert!(inst.highway().is_connected(inst.depots()));
    }

    #[test]
    fn empty_range_rejected() {
        let mut spec = GenerationSpec::case_study(1);
        spec.fleet = (10, 6);
        assert!(generate_instance(&spec, &Defaults::default()).is_err());
    }

    #[test]
    fn split_of_one_box() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = split_demand(1, &mut rng);
            assert!((a, b) == (1, 0) || (a, b) == (0, 1));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = split_demand(10, &mut rng);
        assert_eq!(a + b, 10);
    }

    #[test]
    fn equidistant_customer_binds_to_lower_indices() {
        // customer at origin; depots 1 and 2 (0-based) both at distance 5, depot 0 farther
        let inst = build(
            vec![depot(1, 9.0, 0.0, 4), depot(2, 5.0, 0.0, 4), depot(3, -5.0, 0.0, 4)],
            vec![customer(1, 0.0, 0.0, 10)],
        );
        assert_eq!(two_nearest(&inst, 0), (1, 2));
        let split = split_standalone_demand(&inst, 11).unwrap();
        for c in split.customers() {
            let bound = c.bound_depot.unwrap();
            assert_eq!(bound, if c.id == 2 { 1 } else { 2 });
        }
    }

    #[test]
    fn split_needs_two_depots() {
        let inst = build(vec![depot(1, 0.0, 0.0, 4)], vec![customer(1, 0.0, 0.0, 10)]);
        assert!(matches!(split_standalone_demand(&inst, 1), Err(InstanceError::TooFewDepots(1))));
    }
}

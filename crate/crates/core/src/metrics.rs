//! Service and utilisation indicators reported next to the costs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Customer, Instance};
use crate::strategies::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndicatorReport {
    /// Mean load over capacity.
    pub lr: f64,
    /// Share of routes loaded to at least the fullness threshold.
    pub flr: f64,
    /// Mean customer satisfaction.
    pub cs: f64,
    /// Share of visits before the window opens.
    pub ear: f64,
    /// Share of visits after the window closes.
    pub tr: f64,
}

pub const DEFAULT_FLR_THRESHOLD: f64 = 1.0;

/// 1 inside [ideal earliest, earliest], falling linearly to 0 at latest,
/// 0 outside. A zero-width window scores 1 up to its single instant.
pub fn customer_satisfaction(arrival: f64, customer: &Customer) -> f64 {
    let (ideal, et, lt) = (customer.ideal_earliest, customer.earliest, customer.latest);
    if arrival < ideal {
        0.0
    } else if arrival <= et {
        1.0
    } else if arrival <= lt && lt > et {
        1.0 - (arrival - et) / (lt - et)
    } else {
        0.0
    }
}

pub fn indicators(solution: &Solution, instance: &Instance, flr_threshold: f64) -> Result<IndicatorReport> {
    if solution.routes.is_empty() {
        return Err(Error::Config("indicators need at least one route".into()));
    }
    let q = instance.vehicle().capacity as f64;
    let n_routes = solution.routes.len() as f64;
    let total_load: f64 = solution.routes.iter().map(|r| r.load as f64).sum();
    let full = solution
        .routes
        .iter()
        .filter(|r| r.load as f64 >= flr_threshold * q)
        .count() as f64;

    let (mut visits, mut cs, mut early, mut late) = (0usize, 0.0, 0usize, 0usize);
    for r in &solution.routes {
        if !r.is_propagated() {
            return Err(Error::Unpropagated);
        }
        for (&c, &a) in r.visits.iter().zip(&r.arrivals) {
            let cu = instance.customer(c);
            visits += 1;
            cs += customer_satisfaction(a, cu);
            early += usize::from(a < cu.earliest);
            late += usize::from(a > cu.latest);
        }
    }
    let per_visit = |x: f64| if visits == 0 { 0.0 } else { x / visits as f64 };
    Ok(IndicatorReport {
        lr: total_load / (q * n_routes),
        flr: full / n_routes,
        cs: per_visit(cs),
        ear: per_visit(early as f64),
        tr: per_visit(late as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};
    use crate::route::Route;
    use crate::strategies::Strategy;
    use crate::travel_time::propagate_route_times;

    fn window() -> Customer {
        customer(1, 0.0, 0.0, 1)
    }

    #[test]
    fn satisfaction_branches() {
        let c = window();
        assert_eq!(customer_satisfaction(90.0, &c), 1.0);
        assert_eq!(customer_satisfaction(150.0, &c), 0.5);
        assert_eq!(customer_satisfaction(200.0, &c), 0.0);
        assert_eq!(customer_satisfaction(30.0, &c), 0.0);
        assert_eq!(customer_satisfaction(180.0, &c), 0.0);
    }

    #[test]
    fn degenerate_window() {
        let mut c = window();
        c.latest = c.earliest;
        assert_eq!(customer_satisfaction(120.0, &c), 1.0);
        assert_eq!(customer_satisfaction(120.5, &c), 0.0);
    }

    #[test]
    fn satisfaction_never_rises_after_window_opens() {
        let c = window();
        let mut prev = customer_satisfaction(120.0, &c);
        for i in 1..400 {
            let s = customer_satisfaction(120.0 + i as f64 * 0.25, &c);
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn loading_rates() {
        let cs = vec![customer(1, 1.0, 0.0, 80), customer(2, 2.0, 0.0, 70), customer(3, 3.0, 0.0, 60)];
        let inst = build(vec![depot(1, 0.0, 0.0, 3)], cs);
        let mut routes: Vec<Route> = (0..3).map(|i| Route::closed(0, vec![i], &inst)).collect();
        for r in &mut routes {
            propagate_route_times(r, 0.0, &inst);
        }
        let sol = Solution {
            routes,
            rebalance: None,
            strategy: Strategy::Cc,
        };
        let rep = indicators(&sol, &inst, DEFAULT_FLR_THRESHOLD).unwrap();
        assert!((rep.lr - 0.875).abs() < 1e-12);
        assert!((rep.flr - 1.0 / 3.0).abs() < 1e-12);
        // everyone arrives within minutes of 09:00, long before 11:00
        assert_eq!((rep.ear, rep.tr), (1.0, 0.0));
        assert!(rep.ear + rep.tr <= 1.0);
    }

    #[test]
    fn empty_solution_is_an_error() {
        let inst = build(vec![depot(1, 0.0, 0.0, 1)], vec![customer(1, 1.0, 0.0, 1)]);
        let sol = Solution {
            routes: vec![],
            rebalance: None,
            strategy: Strategy::Cc,
        };
        assert!(indicators(&sol, &inst, 1.0).is_err());
    }
}

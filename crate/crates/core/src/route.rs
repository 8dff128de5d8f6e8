use serde::{Deserialize, Serialize};

use crate::instance::Instance;

/// One vehicle's trip. Depots and customers are indices into the instance.
///
/// `arrivals` is empty until [`propagate_route_times`] has run, so a route
/// with visits but no arrivals is "unpropagated".
///
/// [`propagate_route_times`]: crate::travel_time::propagate_route_times
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub depart_depot: usize,
    pub return_depot: usize,
    pub visits: Vec<usize>,
    /// Departure time from `depart_depot`, minutes after 9:00.
    pub start: f64,
    pub arrivals: Vec<f64>,
    pub return_arrival: f64,
    pub load: u32,
}

impl Route {
    pub fn new(depart_depot: usize, return_depot: usize, visits: Vec<usize>, instance: &Instance) -> Self {
        let load = visits.iter().map(|&c| instance.customer(c).demand).sum();
        Route {
            depart_depot,
            return_depot,
            visits,
            start: 0.0,
            arrivals: Vec::new(),
            return_arrival: 0.0,
            load,
        }
    }

    /// Same-depot route.
    pub fn closed(depot: usize, visits: Vec<usize>, instance: &Instance) -> Self {
        Self::new(depot, depot, visits, instance)
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn is_propagated(&self) -> bool {
        self.arrivals.len() == self.visits.len()
    }

    pub fn recompute_load(&mut self, instance: &Instance) {
        self.load = self.visits.iter().map(|&c| instance.customer(c).demand).sum();
    }

    /// Euclidean length including the return leg. An empty route never
    /// leaves its depot and has length 0.
    pub fn length(&self, instance: &Instance) -> f64 {
        let (Some(&first), Some(&last)) = (self.visits.first(), self.visits.last()) else {
            return 0.0;
        };
        let inner: f64 = self
            .visits
            .windows(2)
            .map(|w| instance.customer_customer(w[0], w[1]))
            .sum();
        instance.depot_customer(self.depart_depot, first) + inner + instance.depot_customer(self.return_depot, last)
    }
}

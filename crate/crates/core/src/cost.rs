//! The objective: fixed vehicle cost, distance cost, carbon, refrigeration,
//! product loss, time-window penalties and vehicle rebalancing.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::route::Route;
use crate::strategies::Solution;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub fix: f64,
    pub transport: f64,
    pub co2: f64,
    pub cooling: f64,
    pub good_loss: f64,
    pub penalty: f64,
    pub rebalance: f64,
    pub total: f64,
}

impl CostBreakdown {
    /// Column order used in every CSV export.
    pub const FIELDS: [&'static str; 8] = [
        "fix", "transport", "co2", "cooling", "good_loss", "penalty", "rebalance", "total",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.fix,
            self.transport,
            self.co2,
            self.cooling,
            self.good_loss,
            self.penalty,
            self.rebalance,
            self.total,
        ]
    }

    fn sum_components(&self) -> f64 {
        self.fix + self.transport + self.co2 + self.cooling + self.good_loss + self.penalty + self.rebalance
    }

    pub fn with_total(mut self) -> Self {
        self.total = self.sum_components();
        self
    }

    /// Penalty, cooling and product loss: the time-sensitive part.
    pub fn time_related(&self) -> f64 {
        self.penalty + self.cooling + self.good_loss
    }
}

impl Add for CostBreakdown {
    type Output = CostBreakdown;
    fn add(self, o: CostBreakdown) -> CostBreakdown {
        CostBreakdown {
            fix: self.fix + o.fix,
            transport: self.transport + o.transport,
            co2: self.co2 + o.co2,
            cooling: self.cooling + o.cooling,
            good_loss: self.good_loss + o.good_loss,
            penalty: self.penalty + o.penalty,
            rebalance: self.rebalance + o.rebalance,
            total: self.total + o.total,
        }
    }
}

impl AddAssign for CostBreakdown {
    fn add_assign(&mut self, o: CostBreakdown) {
        *self = *self + o;
    }
}

/// $ of CO2 per km driven while carrying `load` units.
pub fn co2_rate(instance: &Instance, load: u32) -> f64 {
    let v = instance.vehicle();
    let c = instance.costs();
    let fuel = v.fuel_empty + load as f64 * (v.fuel_full - v.fuel_empty) / v.capacity as f64;
    c.carbon_price * c.carbon_emission * fuel
}

/// Carbon charge at position `index` of a route: a customer visit for
/// `index < visits.len()`, the return depot (demand 0) for `index == visits.len()`.
/// The node's own demand sets the rate, applied to the whole distance driven
/// since leaving the depot.
pub fn co2_cost_at_visit(route: &Route, index: usize, instance: &Instance) -> f64 {
    assert!(index <= route.visits.len(), "visit index {index} out of range");
    if route.visits.is_empty() {
        return 0.0;
    }
    let mut cum = instance.depot_customer(route.depart_depot, route.visits[0]);
    for w in route.visits[..index.min(route.visits.len() - 1) + 1].windows(2) {
        cum += instance.customer_customer(w[0], w[1]);
    }
    if index == route.visits.len() {
        cum += instance.depot_customer(route.return_depot, *route.visits.last().unwrap());
        co2_rate(instance, 0) * cum
    } else {
        co2_rate(instance, instance.customer(route.visits[index]).demand) * cum
    }
}

/// Cost of one propagated route. Refrigeration and product loss accrue on
/// customer-bound legs and during service; the empty return leg carries none.
pub fn route_cost(route: &Route, instance: &Instance) -> Result<CostBreakdown> {
    let c = instance.costs();
    let mut b = CostBreakdown {
        fix: c.fix_cost,
        ..CostBreakdown::default()
    };
    let Some(&last) = route.visits.last() else {
        return Ok(b.with_total());
    };
    if !route.is_propagated() {
        return Err(Error::Unpropagated);
    }
    let v = instance.vehicle();
    let per_km_fuel_unit = c.carbon_price * c.carbon_emission;
    let slope = (v.fuel_full - v.fuel_empty) / v.capacity as f64;

    let mut cum = 0.0;
    let mut leave = route.start;
    let mut prev: Option<usize> = None;
    for (k, &j) in route.visits.iter().enumerate() {
        cum += match prev {
            None => instance.depot_customer(route.depart_depot, j),
            Some(p) => instance.customer_customer(p, j),
        };
        let cust = instance.customer(j);
        let omega = cust.demand as f64;
        b.co2 += per_km_fuel_unit * (v.fuel_empty + omega * slope) * cum;

        let arrival = route.arrivals[k];
        let exposure = arrival - leave + cust.service_time;
        b.cooling += c.cooling_per_min * exposure;
        b.good_loss += c.good_loss_per_unit_min * omega * exposure;
        b.penalty += c.early_penalty_per_min * (cust.earliest - arrival).max(0.0)
            + c.late_penalty_per_min * (arrival - cust.latest).max(0.0);
        leave = arrival + cust.service_time;
        prev = Some(j);
    }
    cum += instance.depot_customer(route.return_depot, last);
    b.co2 += per_km_fuel_unit * v.fuel_empty * cum;
    b.transport = c.travel_unit * cum;
    Ok(b.with_total())
}

/// Route costs summed componentwise, plus the rebalance plan's cost if any.
pub fn solution_cost(solution: &Solution, instance: &Instance) -> Result<CostBreakdown> {
    let mut total = CostBreakdown::default();
    for r in &solution.routes {
        total += route_cost(r, instance)?;
    }
    if let Some(plan) = &solution.rebalance {
        total.rebalance += plan.cost;
        total.total += plan.cost;
    }
    Ok(total)
}

/// Percentage change of `obj` relative to `reference`; negative means `obj`
/// is cheaper.
pub fn relative_improvement(obj: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok((obj - reference) / reference * 100.0)
}

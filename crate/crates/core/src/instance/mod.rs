//! Problem data: depots, customers, the vehicle type, the speed schedule and
//! every cost coefficient.
//!
//! An [`Instance`] is validated once at construction and never mutated
//! afterwards, so it can be shared freely between concurrent replications.
//! Customers and depots are addressed by their position in the respective
//! vector; the `id` fields are external labels kept for reporting.

mod cordeau;
mod generate;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Defaults;

pub use cordeau::parse_cordeau;
pub use generate::{generate_instance, split_demand, split_standalone_demand, GenerationSpec};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("highway network with threshold {threshold_km} km does not connect all depots")]
    DisconnectedHighway { threshold_km: f64 },
    #[error("stand-alone demand splitting needs at least 2 depots, got {0}")]
    TooFewDepots(usize),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimePeriod {
    pub start_min: f64,
    pub end_min: f64,
    pub speed_kmh: f64,
}

/// Contiguous, piecewise-constant speed profile starting at minute 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TimePeriod>", into = "Vec<TimePeriod>")]
pub struct SpeedSchedule {
    periods: Vec<TimePeriod>,
}

impl SpeedSchedule {
    pub fn new(periods: Vec<TimePeriod>) -> Result<Self, InstanceError> {
        if periods.is_empty() {
            return Err(invalid("schedule", "at least one period is required"));
        }
        if periods[0].start_min != 0.0 {
            return Err(invalid("schedule[0].start_min", "first period must start at 0"));
        }
        for (i, p) in periods.iter().enumerate() {
            if !(p.start_min < p.end_min) {
                return Err(invalid(format!("schedule[{i}]"), "start_min must be < end_min"));
            }
            if !(p.speed_kmh > 0.0) || !p.speed_kmh.is_finite() {
                return Err(invalid(format!("schedule[{i}].speed_kmh"), "speed must be positive"));
            }
            if let Some(next) = periods.get(i + 1) {
                if next.start_min != p.end_min {
                    return Err(invalid(
                        format!("schedule[{}].start_min", i + 1),
                        "periods must be contiguous",
                    ));
                }
            }
        }
        Ok(SpeedSchedule { periods })
    }

    /// Eight one-hour periods from 9:00 to 17:00 with the morning and evening
    /// congestion speeds of the reference setting.
    pub fn default_periods() -> Vec<TimePeriod> {
        [10.0, 15.0, 15.0, 30.0, 30.0, 15.0, 15.0, 10.0]
            .iter()
            .enumerate()
            .map(|(i, &speed_kmh)| TimePeriod {
                start_min: 60.0 * i as f64,
                end_min: 60.0 * (i + 1) as f64,
                speed_kmh,
            })
            .collect()
    }

    pub fn periods(&self) -> &[TimePeriod] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

impl Default for SpeedSchedule {
    fn default() -> Self {
        SpeedSchedule {
            periods: Self::default_periods(),
        }
    }
}

impl TryFrom<Vec<TimePeriod>> for SpeedSchedule {
    type Error = InstanceError;
    fn try_from(periods: Vec<TimePeriod>) -> Result<Self, Self::Error> {
        SpeedSchedule::new(periods)
    }
}

impl From<SpeedSchedule> for Vec<TimePeriod> {
    fn from(s: SpeedSchedule) -> Self {
        s.periods
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Depot {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub fleet_size: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Boxes.
    pub demand: u32,
    pub earliest: f64,
    pub latest: f64,
    pub ideal_earliest: f64,
    pub service_time: f64,
    /// Depot this order record must be served from (stand-alone orders).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_depot: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub capacity: u32,
    /// Fuel use per km when empty (L/km).
    pub fuel_empty: f64,
    /// Fuel use per km when fully loaded (L/km).
    pub fuel_full: f64,
}

/// Cost coefficients, time-based rates stored per minute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub fix_cost: f64,
    pub travel_unit: f64,
    pub rebalance_discount: f64,
    pub cooling_per_min: f64,
    pub early_penalty_per_min: f64,
    pub late_penalty_per_min: f64,
    pub good_loss_per_unit_min: f64,
    pub carbon_emission: f64,
    pub carbon_price: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Defaults::default().cost_params()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighwayNetwork {
    pub threshold_km: f64,
}

impl HighwayNetwork {
    /// Depot pairs `(i, j)`, `i < j`, closer than the threshold, with their
    /// Euclidean length.
    pub fn edges(&self, depots: &[Depot]) -> Vec<(usize, usize, f64)> {
        let mut edges = Vec::new();
        for i in 0..depots.len() {
            for j in (i + 1)..depots.len() {
                let d = euclid(depots[i].x, depots[i].y, depots[j].x, depots[j].y);
                if d < self.threshold_km {
                    edges.push((i, j, d));
                }
            }
        }
        edges
    }

    pub fn is_connected(&self, depots: &[Depot]) -> bool {
        if depots.is_empty() {
            return true;
        }
        let edges = self.edges(depots);
        let mut seen = vec![false; depots.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn check_connected(&self, depots: &[Depot]) -> Result<(), InstanceError> {
        if self.is_connected(depots) {
            Ok(())
        } else {
            Err(InstanceError::DisconnectedHighway {
                threshold_km: self.threshold_km,
            })
        }
    }
}

#[inline]
pub fn euclid(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()
}

/// Serialized form; optional sections fall back to [`Defaults`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    depots: Vec<Depot>,
    customers: Vec<CustomerRecord>,
    #[serde(default)]
    vehicle: Option<VehicleSpec>,
    #[serde(default)]
    schedule: Option<SpeedSchedule>,
    #[serde(default)]
    costs: Option<CostParams>,
    #[serde(default)]
    highway: Option<HighwayNetwork>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CustomerRecord {
    id: usize,
    x: f64,
    y: f64,
    demand: u32,
    earliest: f64,
    latest: f64,
    #[serde(default)]
    ideal_earliest: Option<f64>,
    #[serde(default)]
    service_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound_depot: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    NativeJson,
    Cordeau,
}

#[derive(Debug, Clone)]
pub struct Instance {
    depots: Vec<Depot>,
    customers: Vec<Customer>,
    vehicle: VehicleSpec,
    schedule: SpeedSchedule,
    costs: CostParams,
    highway: HighwayNetwork,
    /// Row-major distances over nodes: depots first, then customers.
    dist: Vec<f64>,
}

impl Instance {
    pub fn new(
        depots: Vec<Depot>,
        customers: Vec<Customer>,
        vehicle: VehicleSpec,
        schedule: SpeedSchedule,
        costs: CostParams,
        highway: HighwayNetwork,
    ) -> Result<Self, InstanceError> {
        validate(&depots, &customers, &vehicle, &costs, &highway)?;
        let coords: Vec<(f64, f64)> = depots
            .iter()
            .map(|d| (d.x, d.y))
            .chain(customers.iter().map(|c| (c.x, c.y)))
            .collect();
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = euclid(coords[i].0, coords[i].1, coords[j].0, coords[j].1);
            }
        }
        Ok(Instance {
            depots,
            customers,
            vehicle,
            schedule,
            costs,
            highway,
            dist,
        })
    }

    pub fn load(
        path: impl AsRef<Path>,
        format: InstanceFormat,
        defaults: &Defaults,
    ) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        match format {
            InstanceFormat::NativeJson => Self::from_json_str(&text, defaults),
            InstanceFormat::Cordeau => parse_cordeau(&text, defaults),
        }
    }

    pub fn from_json_str(text: &str, defaults: &Defaults) -> Result<Self, InstanceError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        let customers = file
            .customers
            .into_iter()
            .map(|c| Customer {
                id: c.id,
                x: c.x,
                y: c.y,
                demand: c.demand,
                earliest: c.earliest,
                latest: c.latest,
                ideal_earliest: c
                    .ideal_earliest
                    .unwrap_or_else(|| (c.earliest - defaults.ideal_earliest_offset).max(0.0)),
                service_time: c.service_time,
                bound_depot: c.bound_depot,
            })
            .collect();
        Instance::new(
            file.depots,
            customers,
            file.vehicle.unwrap_or_else(|| defaults.vehicle()),
            match file.schedule {
                Some(s) => s,
                None => defaults.schedule()?,
            },
            file.costs.unwrap_or_else(|| defaults.cost_params()),
            file.highway.unwrap_or(HighwayNetwork {
                threshold_km: defaults.highway_threshold,
            }),
        )
    }

    pub fn to_json_string(&self) -> String {
        let file = InstanceFile {
            depots: self.depots.clone(),
            customers: self
                .customers
                .iter()
                .map(|c| CustomerRecord {
                    id: c.id,
                    x: c.x,
                    y: c.y,
                    demand: c.demand,
                    earliest: c.earliest,
                    latest: c.latest,
                    ideal_earliest: Some(c.ideal_earliest),
                    service_time: c.service_time,
                    bound_depot: c.bound_depot,
                })
                .collect(),
            vehicle: Some(self.vehicle),
            schedule: Some(self.schedule.clone()),
            costs: Some(self.costs),
            highway: Some(self.highway),
        };
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }

    pub fn depots(&self) -> &[Depot] {
        &self.depots
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn customer(&self, i: usize) -> &Customer {
        &self.customers[i]
    }

    pub fn n_depots(&self) -> usize {
        self.depots.len()
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn vehicle(&self) -> &VehicleSpec {
        &self.vehicle
    }

    pub fn schedule(&self) -> &SpeedSchedule {
        &self.schedule
    }

    pub fn costs(&self) -> &CostParams {
        &self.costs
    }

    pub fn highway(&self) -> &HighwayNetwork {
        &self.highway
    }

    pub fn total_fleet(&self) -> u32 {
        self.depots.iter().map(|d| d.fleet_size).sum()
    }

    #[inline]
    fn node_dist(&self, a: usize, b: usize) -> f64 {
        let n = self.depots.len() + self.customers.len();
        self.dist[a * n + b]
    }

    #[inline]
    pub fn depot_customer(&self, depot: usize, customer: usize) -> f64 {
        self.node_dist(depot, self.depots.len() + customer)
    }

    #[inline]
    pub fn customer_customer(&self, a: usize, b: usize) -> f64 {
        let m = self.depots.len();
        self.node_dist(m + a, m + b)
    }

    #[inline]
    pub fn depot_depot(&self, a: usize, b: usize) -> f64 {
        self.node_dist(a, b)
    }

    /// Replaces the cost coefficients, re-validating them.
    pub fn with_costs(&self, costs: CostParams) -> Result<Self, InstanceError> {
        validate_costs(&costs)?;
        let mut next = self.clone();
        next.costs = costs;
        Ok(next)
    }

    pub fn with_vehicle(&self, vehicle: VehicleSpec) -> Result<Self, InstanceError> {
        Instance::new(
            self.depots.clone(),
            self.customers.clone(),
            vehicle,
            self.schedule.clone(),
            self.costs,
            self.highway,
        )
    }

    /// Nearest depot to a customer; ties go to the lowest index.
    pub fn nearest_depot(&self, customer: usize) -> usize {
        let mut best = 0;
        for d in 1..self.depots.len() {
            if self.depot_customer(d, customer) < self.depot_customer(best, customer) {
                best = d;
            }
        }
        best
    }
}

fn validate_costs(c: &CostParams) -> Result<(), InstanceError> {
    let fields = [
        ("costs.fix_cost", c.fix_cost),
        ("costs.travel_unit", c.travel_unit),
        ("costs.rebalance_discount", c.rebalance_discount),
        ("costs.cooling_per_min", c.cooling_per_min),
        ("costs.early_penalty_per_min", c.early_penalty_per_min),
        ("costs.late_penalty_per_min", c.late_penalty_per_min),
        ("costs.good_loss_per_unit_min", c.good_loss_per_unit_min),
        ("costs.carbon_emission", c.carbon_emission),
        ("costs.carbon_price", c.carbon_price),
    ];
    for (name, v) in fields {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(invalid(name, "must be a finite nonnegative number"));
        }
    }
    if c.rebalance_discount > 1.0 {
        return Err(invalid("costs.rebalance_discount", "must lie in [0, 1]"));
    }
    Ok(())
}

fn validate(
    depots: &[Depot],
    customers: &[Customer],
    vehicle: &VehicleSpec,
    costs: &CostParams,
    highway: &HighwayNetwork,
) -> Result<(), InstanceError> {
    if depots.is_empty() {
        return Err(invalid("depots", "at least one depot is required"));
    }
    if customers.is_empty() {
        return Err(invalid("customers", "at least one customer is required"));
    }
    if vehicle.capacity == 0 {
        return Err(invalid("vehicle.capacity", "must be positive"));
    }
    if !(vehicle.fuel_empty > 0.0 && vehicle.fuel_empty <= vehicle.fuel_full) {
        return Err(invalid("vehicle.fuel_empty", "need 0 < fuel_empty <= fuel_full"));
    }
    validate_costs(costs)?;
    if !(highway.threshold_km > 0.0) {
        return Err(invalid("highway.threshold_km", "must be positive"));
    }

    let mut ids: Vec<usize> = depots.iter().map(|d| d.id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(invalid("depots.id", format!("duplicate id {}", w[0])));
    }
    for (i, d) in depots.iter().enumerate() {
        if !d.x.is_finite() || !d.y.is_finite() {
            return Err(invalid(format!("depots[{i}] (id {})", d.id), "non-finite coordinates"));
        }
    }

    let mut ids: Vec<usize> = customers.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(invalid("customers.id", format!("duplicate id {}", w[0])));
    }
    for (i, c) in customers.iter().enumerate() {
        let name = |f: &str| format!("customers[{i}] (id {}).{f}", c.id);
        if !c.x.is_finite() || !c.y.is_finite() {
            return Err(invalid(name("x"), "non-finite coordinates"));
        }
        if c.demand == 0 {
            return Err(invalid(name("demand"), "must be positive"));
        }
        if c.demand > vehicle.capacity {
            return Err(invalid(
                name("demand"),
                format!("{} exceeds vehicle capacity {}", c.demand, vehicle.capacity),
            ));
        }
        if !(c.ideal_earliest >= 0.0) {
            return Err(invalid(name("ideal_earliest"), "must be >= 0"));
        }
        if !(c.ideal_earliest <= c.earliest) {
            return Err(invalid(name("ideal_earliest"), "must be <= earliest"));
        }
        if !(c.earliest <= c.latest) {
            return Err(invalid(
                name("earliest"),
                format!("earliest {} is after latest {}", c.earliest, c.latest),
            ));
        }
        if !(c.service_time >= 0.0) {
            return Err(invalid(name("service_time"), "must be >= 0"));
        }
        if let Some(b) = c.bound_depot {
            if b >= depots.len() {
                return Err(invalid(name("bound_depot"), format!("no depot at index {b}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn customer(id: usize, x: f64, y: f64, demand: u32) -> Customer {
        Customer {
            id,
            x,
            y,
            demand,
            earliest: 120.0,
            latest: 180.0,
            ideal_earliest: 60.0,
            service_time: 0.0,
            bound_depot: None,
        }
    }

    pub(crate) fn depot(id: usize, x: f64, y: f64, fleet_size: u32) -> Depot {
        Depot { id, x, y, fleet_size }
    }

    pub(crate) fn build(depots: Vec<Depot>, customers: Vec<Customer>) -> Instance {
        let d = Defaults::default();
        Instance::new(
            depots,
            customers,
            d.vehicle(),
            SpeedSchedule::default(),
            d.cost_params(),
            HighwayNetwork { threshold_km: 60.0 },
        )
        .unwrap()
    }

    #[test]
    fn schedule_must_be_contiguous_and_start_at_zero() {
        let p = |a, b, s| TimePeriod { start_min: a, end_min: b, speed_kmh: s };
        assert!(SpeedSchedule::new(vec![]).is_err());
        assert!(SpeedSchedule::new(vec![p(5.0, 10.0, 1.0)]).is_err());
        assert!(SpeedSchedule::new(vec![p(0.0, 10.0, 1.0), p(11.0, 20.0, 1.0)]).is_err());
        assert!(SpeedSchedule::new(vec![p(0.0, 10.0, 0.0)]).is_err());
        assert!(SpeedSchedule::new(vec![p(0.0, 10.0, 1.0), p(10.0, 20.0, 2.0)]).is_ok());
    }

    #[test]
    fn inverted_window_names_the_customer() {
        let mut c = customer(7, 1.0, 1.0, 5);
        c.earliest = 200.0;
        c.latest = 100.0;
        let d = Defaults::default();
        let err = Instance::new(
            vec![depot(1, 0.0, 0.0, 3)],
            vec![c],
            d.vehicle(),
            SpeedSchedule::default(),
            d.cost_params(),
            HighwayNetwork { threshold_km: 60.0 },
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("id 7") && msg.contains("earliest"), "{msg}");
    }

    #[test]
    fn oversized_demand_and_duplicate_ids_rejected() {
        let d = Defaults::default();
        let mk = |customers| {
            Instance::new(
                vec![depot(1, 0.0, 0.0, 3)],
                customers,
                d.vehicle(),
                SpeedSchedule::default(),
                d.cost_params(),
                HighwayNetwork { threshold_km: 60.0 },
            )
        };
        assert!(mk(vec![customer(1, 0.0, 0.0, 81)]).is_err());
        assert!(mk(vec![customer(1, 0.0, 0.0, 5), customer(1, 1.0, 0.0, 5)]).is_err());
        assert!(mk(vec![customer(1, 0.0, 0.0, 80)]).is_ok());
    }

    #[test]
    fn nearest_depot_prefers_lowest_index_on_ties() {
        let inst = build(
            vec![depot(1, -1.0, 0.0, 2), depot(2, 1.0, 0.0, 2), depot(3, 0.0, 1.0, 2)],
            vec![customer(1, 0.0, -0.5, 1), customer(2, 0.0, 5.0, 1)],
        );
        assert_eq!(inst.nearest_depot(0), 0);
        assert_eq!(inst.nearest_depot(1), 2);
    }

    #[test]
    fn highway_connectivity() {
        let hw = HighwayNetwork { threshold_km: 15.0 };
        let chain = vec![depot(1, 0.0, 0.0, 1), depot(2, 10.0, 0.0, 1), depot(3, 20.0, 0.0, 1)];
        assert!(hw.is_connected(&chain));
        assert_eq!(hw.edges(&chain).len(), 2);
        let split = vec![depot(1, 0.0, 0.0, 1), depot(2, 30.0, 0.0, 1)];
        assert!(matches!(
            hw.check_connected(&split),
            Err(InstanceError::DisconnectedHighway { .. })
        ));
    }

    #[test]
    fn json_fills_defaults_and_ideal_earliest() {
        let text = r#"{
            "depots": [{"id": 1, "x": 0, "y": 0, "fleet_size": 2}],
            "customers": [{"id": 1, "x": 3, "y": 4, "demand": 10, "earliest": 30, "latest": 90}]
        }"#;
        let inst = Instance::from_json_str(text, &Defaults::default()).unwrap();
        assert_eq!(inst.customer(0).ideal_earliest, 0.0);
        assert_eq!(inst.vehicle().capacity, 80);
        assert_eq!(inst.depot_customer(0, 0), 5.0);
        let again = Instance::from_json_str(&inst.to_json_string(), &Defaults::default()).unwrap();
        assert_eq!(again.customers(), inst.customers());
        assert_eq!(again.costs(), inst.costs());
    }
}

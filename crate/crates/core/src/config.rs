//! Plain-text key/value defaults.
//!
//! One `key = value` pair per line, `#` starts a comment. Rates are written in
//! the units practitioners quote them in (`$/h` for cooling and time-window
//! penalties) and converted to per-minute values when an [`Instance`] is built.
//!
//! | key                    | unit            | default |
//! |------------------------|-----------------|---------|
//! | `fix_cost`             | $ / vehicle     | 500     |
//! | `travel_unit`          | $ / km          | 10      |
//! | `rebalance_discount`   | ratio           | 0.4     |
//! | `cooling`              | $ / h           | 4.5     |
//! | `early_penalty`        | $ / h           | 5       |
//! | `late_penalty`         | $ / h           | 10      |
//! | `good_loss`            | $ / (unit·min)  | 0.005   |
//! | `carbon_emission`      | kgCO2 / L       | 2.61    |
//! | `carbon_price`         | $ / kgCO2       | 0.1     |
//! | `capacity`             | boxes           | 80      |
//! | `fuel_empty`           | L / km          | 0.165   |
//! | `fuel_full`            | L / km          | 0.377   |
//! | `fleet_size`           | vehicles/depot  | 8       |
//! | `ideal_earliest_offset`| min             | 60      |
//! | `highway_threshold`    | km              | 60      |
//! | `periods`              | `start-end:kmh` | 8 × 60 min, 10/15/15/30/30/15/15/10 |
//! | `pfih_eta`/`pfih_theta`/`pfih_xi` | ratio | 0.7 / 0.2 / 0.1 |
//! | `t_initial`/`t_final`  | temperature     | 5000 / 1 |
//! | `cooling_rate`         | ratio           | 0.98    |
//! | `k_max`                | count           | 8       |
//! | `vns_retry_cap`        | count           | 50      |
//!
//! [`Instance`]: crate::instance::Instance

use std::fmt::Write as _;
use std::path::Path;

use crate::construction::PfihWeights;
use crate::instance::{CostParams, InstanceError, SpeedSchedule, TimePeriod, VehicleSpec};
use crate::savns::SavnsConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub fix_cost: f64,
    pub travel_unit: f64,
    pub rebalance_discount: f64,
    pub cooling_per_hour: f64,
    pub early_penalty_per_hour: f64,
    pub late_penalty_per_hour: f64,
    pub good_loss: f64,
    pub carbon_emission: f64,
    pub carbon_price: f64,
    pub capacity: u32,
    pub fuel_empty: f64,
    pub fuel_full: f64,
    pub fleet_size: u32,
    pub ideal_earliest_offset: f64,
    pub highway_threshold: f64,
    pub periods: Vec<TimePeriod>,
    pub pfih: PfihWeights,
    pub t_initial: f64,
    pub t_final: f64,
    pub cooling_rate: f64,
    pub k_max: usize,
    pub vns_retry_cap: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            fix_cost: 500.0,
            travel_unit: 10.0,
            rebalance_discount: 0.4,
            cooling_per_hour: 4.5,
            early_penalty_per_hour: 5.0,
            late_penalty_per_hour: 10.0,
            good_loss: 0.005,
            carbon_emission: 2.61,
            carbon_price: 0.1,
            capacity: 80,
            fuel_empty: 0.165,
            fuel_full: 0.377,
            fleet_size: 8,
            ideal_earliest_offset: 60.0,
            highway_threshold: 60.0,
            periods: SpeedSchedule::default_periods(),
            pfih: PfihWeights::default(),
            t_initial: 5000.0,
            t_final: 1.0,
            cooling_rate: 0.98,
            k_max: 8,
            vns_retry_cap: 50,
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        field: key.to_string(),
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, InstanceError> {
    value
        .parse::<T>()
        .map_err(|_| bad(key, format!("cannot parse `{value}`")))
}

fn parse_periods(value: &str) -> Result<Vec<TimePeriod>, InstanceError> {
    value
        .split(',')
        .map(|chunk| {
            let (span, speed) = chunk
                .trim()
                .split_once(':')
                .ok_or_else(|| bad("periods", format!("expected start-end:speed, got `{chunk}`")))?;
            let (start, end) = span
                .split_once('-')
                .ok_or_else(|| bad("periods", format!("expected start-end, got `{span}`")))?;
            Ok(TimePeriod {
                start_min: num("periods", start.trim())?,
                end_min: num("periods", end.trim())?,
                speed_kmh: num("periods", speed.trim())?,
            })
        })
        .collect()
}

impl Defaults {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines on top of the built-in defaults.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut defaults = Defaults::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                InstanceError::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            defaults.set(key.trim(), value.trim())?;
        }
        Ok(defaults)
    }

    /// Overrides a single key. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), InstanceError> {
        match key {
            "fix_cost" => self.fix_cost = num(key, value)?,
            "travel_unit" => self.travel_unit = num(key, value)?,
            "rebalance_discount" | "alpha" => self.rebalance_discount = num(key, value)?,
            "cooling" | "c1" => self.cooling_per_hour = num(key, value)?,
            "early_penalty" | "c2" => self.early_penalty_per_hour = num(key, value)?,
            "late_penalty" | "c3" => self.late_penalty_per_hour = num(key, value)?,
            "good_loss" | "beta" => self.good_loss = num(key, value)?,
            "carbon_emission" | "lambda" => self.carbon_emission = num(key, value)?,
            "carbon_price" => self.carbon_price = num(key, value)?,
            "capacity" => self.capacity = num(key, value)?,
            "fuel_empty" => self.fuel_empty = num(key, value)?,
            "fuel_full" => self.fuel_full = num(key, value)?,
            "fleet_size" => self.fleet_size = num(key, value)?,
            "ideal_earliest_offset" => self.ideal_earliest_offset = num(key, value)?,
            "highway_threshold" => self.highway_threshold = num(key, value)?,
            "periods" => self.periods = parse_periods(value)?,
            "pfih_eta" => self.pfih.eta = num(key, value)?,
            "pfih_theta" => self.pfih.theta = num(key, value)?,
            "pfih_xi" => self.pfih.xi = num(key, value)?,
            "t_initial" => self.t_initial = num(key, value)?,
            "t_final" => self.t_final = num(key, value)?,
            "cooling_rate" => self.cooling_rate = num(key, value)?,
            "k_max" => self.k_max = num(key, value)?,
            "vns_retry_cap" => self.vns_retry_cap = num(key, value)?,
            other => return Err(bad(other, "unknown configuration key")),
        }
        Ok(())
    }

    pub fn cost_params(&self) -> CostParams {
        CostParams {
            fix_cost: self.fix_cost,
            travel_unit: self.travel_unit,
            rebalance_discount: self.rebalance_discount,
            cooling_per_min: self.cooling_per_hour / 60.0,
            early_penalty_per_min: self.early_penalty_per_hour / 60.0,
            late_penalty_per_min: self.late_penalty_per_hour / 60.0,
            good_loss_per_unit_min: self.good_loss,
            carbon_emission: self.carbon_emission,
            carbon_price: self.carbon_price,
        }
    }

    pub fn vehicle(&self) -> VehicleSpec {
        VehicleSpec {
            capacity: self.capacity,
            fuel_empty: self.fuel_empty,
            fuel_full: self.fuel_full,
        }
    }

    pub fn schedule(&self) -> Result<SpeedSchedule, InstanceError> {
        SpeedSchedule::new(self.periods.clone())
    }

    pub fn savns(&self, seed: u64) -> SavnsConfig {
        SavnsConfig {
            t_initial: self.t_initial,
            t_final: self.t_final,
            cooling: self.cooling_rate,
            k_max: self.k_max,
            seed,
            vns_retry_cap: self.vns_retry_cap,
            pfih: self.pfih,
            ..SavnsConfig::default()
        }
    }

    /// Renders the defaults back into the key/value format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let periods = self
            .periods
            .iter()
            .map(|p| format!("{}-{}:{}", p.start_min, p.end_min, p.speed_kmh))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "fix_cost = {}", self.fix_cost);
        let _ = writeln!(out, "travel_unit = {}", self.travel_unit);
        let _ = writeln!(out, "rebalance_discount = {}", self.rebalance_discount);
        let _ = writeln!(out, "cooling = {}", self.cooling_per_hour);
        let _ = writeln!(out, "early_penalty = {}", self.early_penalty_per_hour);
        let _ = writeln!(out, "late_penalty = {}", self.late_penalty_per_hour);
        let _ = writeln!(out, "good_loss = {}", self.good_loss);
        let _ = writeln!(out, "carbon_emission = {}", self.carbon_emission);
        let _ = writeln!(out, "carbon_price = {}", self.carbon_price);
        let _ = writeln!(out, "capacity = {}", self.capacity);
        let _ = writeln!(out, "fuel_empty = {}", self.fuel_empty);
        let _ = writeln!(out, "fuel_full = {}", self.fuel_full);
        let _ = writeln!(out, "fleet_size = {}", self.fleet_size);
        let _ = writeln!(out, "ideal_earliest_offset = {}", self.ideal_earliest_offset);
        let _ = writeln!(out, "highway_threshold = {}", self.highway_threshold);
        let _ = writeln!(out, "periods = {periods}");
        let _ = writeln!(out, "pfih_eta = {}", self.pfih.eta);
        let _ = writeln!(out, "pfih_theta = {}", self.pfih.theta);
        let _ = writeln!(out, "pfih_xi = {}", self.pfih.xi);
        let _ = writeln!(out, "t_initial = {}", self.t_initial);
        let _ = writeln!(out, "t_final = {}", self.t_final);
        let _ = writeln!(out, "cooling_rate = {}", self.cooling_rate);
        let _ = writeln!(out, "k_max = {}", self.k_max);
        let _ = writeln!(out, "vns_retry_cap = {}", self.vns_retry_cap);
        out
    }
}

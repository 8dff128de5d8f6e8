use std::fmt;

use anyhow::Result;
use coldvrp::instance::{split_standalone_demand, InstanceFormat};
use coldvrp::{Defaults, DeparturePolicy, Instance, Strategy};

use crate::args::{Common, Format, InstanceArgs};

/// Bad flags or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Config file, then `--set` overrides on top.
pub fn load_defaults(config: Option<&std::path::Path>, overrides: &[String]) -> Result<Defaults> {
    let mut d = match config {
        Some(p) => Defaults::from_path(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => Defaults::default(),
    };
    for kv in overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        d.set(k.trim(), v.trim()).map_err(|e| usage(e.to_string()))?;
    }
    Ok(d)
}

/// Cost and vehicle keys given with `--set` win over values stored in the
/// instance file.
fn apply_overrides(inst: Instance, defaults: &Defaults, overrides: &[String]) -> Result<Instance> {
    let keys: Vec<&str> = overrides
        .iter()
        .filter_map(|kv| kv.split_once('=').map(|(k, _)| k.trim()))
        .collect();
    let fresh = defaults.cost_params();
    let mut costs = *inst.costs();
    for key in &keys {
        match *key {
            "fix_cost" => costs.fix_cost = fresh.fix_cost,
            "travel_unit" => costs.travel_unit = fresh.travel_unit,
            "rebalance_discount" | "alpha" => costs.rebalance_discount = fresh.rebalance_discount,
            "cooling" | "c1" => costs.cooling_per_min = fresh.cooling_per_min,
            "early_penalty" | "c2" => costs.early_penalty_per_min = fresh.early_penalty_per_min,
            "late_penalty" | "c3" => costs.late_penalty_per_min = fresh.late_penalty_per_min,
            "good_loss" | "beta" => costs.good_loss_per_unit_min = fresh.good_loss_per_unit_min,
            "carbon_emission" | "lambda" => costs.carbon_emission = fresh.carbon_emission,
            "carbon_price" => costs.carbon_price = fresh.carbon_price,
            _ => {}
        }
    }
    let mut inst = if keys.is_empty() { inst } else { inst.with_costs(costs)? };
    if keys.iter().any(|k| matches!(*k, "capacity" | "fuel_empty" | "fuel_full")) {
        let mut v = *inst.vehicle();
        let fresh = defaults.vehicle();
        for key in &keys {
            match *key {
                "capacity" => v.capacity = fresh.capacity,
                "fuel_empty" => v.fuel_empty = fresh.fuel_empty,
                "fuel_full" => v.fuel_full = fresh.fuel_full,
                _ => {}
            }
        }
        inst = inst.with_vehicle(v)?;
    }
    Ok(inst)
}

pub fn load_instance(input: &InstanceArgs, common: &Common, defaults: &Defaults) -> Result<Instance> {
    let format = input.format.unwrap_or_else(|| {
        match input.instance.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Cordeau,
        }
    });
    let format = match format {
        Format::Json => InstanceFormat::NativeJson,
        Format::Cordeau => InstanceFormat::Cordeau,
    };
    let inst = Instance::load(&input.instance, format, defaults)
        .map_err(|e| anyhow::anyhow!("{}: {e}", input.instance.display()))?;
    apply_overrides(inst, defaults, &common.overrides)
}

pub fn policy(common: &Common, seed: u64) -> Result<DeparturePolicy> {
    DeparturePolicy::parse(&common.departure, seed).map_err(|e| usage(e.to_string()))
}

/// The stand-alone scenario runs on order records bound to depots; an
/// instance without them is split first.
pub fn instance_for(strategy: Strategy, inst: &Instance, split_seed: u64) -> Result<Instance> {
    let bound = inst.customers().iter().all(|c| c.bound_depot.is_some());
    if strategy == Strategy::Standalone && !bound {
        Ok(split_standalone_demand(inst, split_seed)?)
    } else {
        Ok(inst.clone())
    }
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
    /// Coefficient of variation.
    pub std_avg: f64,
    /// Largest relative distance of a replication from the mean.
    pub mre: f64,
}

pub fn spread(xs: &[f64]) -> Spread {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    let rel = |x: f64| if mean == 0.0 { 0.0 } else { x / mean.abs() };
    let mre = xs.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    Spread {
        mean,
        std,
        std_avg: rel(std),
        mre: rel(mre),
    }
}

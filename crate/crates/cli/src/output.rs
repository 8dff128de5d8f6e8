//! Files written by the subcommands. Depots and customers appear under their
//! external ids, never as vector positions.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use coldvrp::cost::CostBreakdown;
use coldvrp::metrics::IndicatorReport;
use coldvrp::savns::TraceRow;
use coldvrp::{Instance, Solution};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct RouteOut {
    depart_depot: usize,
    return_depot: usize,
    customers: Vec<usize>,
    load: u32,
    start: f64,
    arrivals: Vec<f64>,
    return_arrival: f64,
}

#[derive(Debug, Serialize)]
struct TransferOut {
    from_depot: usize,
    to_depot: usize,
    vehicles: u32,
}

#[derive(Debug, Serialize)]
struct RebalanceOut {
    cost: f64,
    transfers: Vec<TransferOut>,
}

#[derive(Debug, Serialize)]
struct SolutionOut<'a> {
    strategy: &'a str,
    seed: Option<u64>,
    departure: &'a str,
    cost: CostBreakdown,
    indicators: IndicatorReport,
    routes: Vec<RouteOut>,
    rebalance: Option<RebalanceOut>,
}

pub fn solution_json(
    sol: &Solution,
    inst: &Instance,
    cost: &CostBreakdown,
    indicators: &IndicatorReport,
    seed: Option<u64>,
    departure: &str,
) -> Result<String> {
    let depot = |i: usize| inst.depots()[i].id;
    let out = SolutionOut {
        strategy: sol.strategy.name(),
        seed,
        departure,
        cost: *cost,
        indicators: *indicators,
        routes: sol
            .routes
            .iter()
            .map(|r| RouteOut {
                depart_depot: depot(r.depart_depot),
                return_depot: depot(r.return_depot),
                customers: r.visits.iter().map(|&c| inst.customer(c).id).collect(),
                load: r.load,
                start: r.start,
                arrivals: r.arrivals.clone(),
                return_arrival: r.return_arrival,
            })
            .collect(),
        rebalance: sol.rebalance.as_ref().map(|p| RebalanceOut {
            cost: p.cost,
            transfers: p
                .transfers
                .iter()
                .map(|t| TransferOut {
                    from_depot: depot(t.from),
                    to_depot: depot(t.to),
                    vehicles: t.count,
                })
                .collect(),
        }),
    };
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    Ok(text)
}

pub const COST_COLUMNS: [&str; 8] = CostBreakdown::FIELDS;
pub const INDICATOR_COLUMNS: [&str; 5] = ["lr", "flr", "cs", "ear", "tr"];

pub fn indicator_values(r: &IndicatorReport) -> [f64; 5] {
    [r.lr, r.flr, r.cs, r.ear, r.tr]
}

/// Fixed-precision rendering keeps CSVs stable across platforms.
pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn costs_header() -> Vec<String> {
    let mut h: Vec<String> = ["strategy", "seed", "departure", "vehicles"].map(String::from).to_vec();
    h.extend(COST_COLUMNS.iter().map(|s| s.to_string()));
    h.extend(INDICATOR_COLUMNS.iter().map(|s| s.to_string()));
    h
}

pub fn costs_row(
    strategy: &str,
    seed: u64,
    departure: &str,
    vehicles: usize,
    cost: &CostBreakdown,
    ind: &IndicatorReport,
) -> Vec<String> {
    let mut row = vec![strategy.to_string(), seed.to_string(), departure.to_string(), vehicles.to_string()];
    row.extend(cost.values().iter().map(|&x| num(x)));
    row.extend(indicator_values(ind).iter().map(|&x| num(x)));
    row
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_rows(rows: &[TraceRow], inst: &Instance) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["iteration", "depot", "temperature", "current", "best"].map(String::from).to_vec();
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                r.depot.map(|d| inst.depots()[d].id.to_string()).unwrap_or_default(),
                num(r.temperature),
                num(r.current),
                num(r.best),
            ]
        })
        .collect();
    (header, body)
}

/// Human-readable breakdown for the terminal.
pub fn breakdown_table(cost: &CostBreakdown, ind: &IndicatorReport) -> String {
    let mut s = String::new();
    for (name, v) in COST_COLUMNS.iter().zip(cost.values()) {
        s += &format!("{name:<10} {v:>14.3}\n");
    }
    for (name, v) in INDICATOR_COLUMNS.iter().zip(indicator_values(ind)) {
        s += &format!("{name:<10} {v:>14.4}\n");
    }
    s
}

use std::fs;

use anyhow::{Context, Result};
use coldvrp::instance::{generate_instance, split_standalone_demand, GenerationSpec};
use coldvrp::metrics::{indicators, IndicatorReport, DEFAULT_FLR_THRESHOLD};
use coldvrp::oracle::{audit_cost, exact_solve};
use coldvrp::strategies::solve_traced;
use coldvrp::{CostBreakdown, Instance, Strategy};
use rayon::prelude::*;

use crate::args::{CompareArgs, GenerateArgs, Kind, OracleArgs, SolveArgs, SweepArgs, SweepParam};
use crate::output::{
    breakdown_table, costs_header, costs_row, indicator_values, num, solution_json, trace_rows, write_csv,
    COST_COLUMNS, INDICATOR_COLUMNS,
};
use crate::setup::{instance_for, load_defaults, load_instance, policy, spread, thread_pool, usage};

struct Run {
    vehicles: usize,
    cost: CostBreakdown,
    ind: IndicatorReport,
}

fn run_once(inst: &Instance, strategy: Strategy, cfg: &coldvrp::SavnsConfig, pol: &coldvrp::DeparturePolicy) -> Result<Run> {
    let (sol, cost) = coldvrp::solve(inst, strategy, cfg, pol)?;
    let ind = indicators(&sol, inst, DEFAULT_FLR_THRESHOLD)?;
    Ok(Run {
        vehicles: sol.routes.len(),
        cost,
        ind,
    })
}

pub fn solve(a: SolveArgs) -> Result<()> {
    let d = load_defaults(a.common.config.as_deref(), &a.common.overrides)?;
    let pol = policy(&a.common, a.seed)?;
    let base = load_instance(&a.input, &a.common, &d)?;
    let inst = instance_for(a.strategy, &base, a.input.split_seed)?;
    let cfg = d.savns(a.seed);
    let mut trace = Vec::new();
    let (sol, cost) = solve_traced(&inst, a.strategy, &cfg, &pol, a.trace.then_some(&mut trace))?;
    let ind = indicators(&sol, &inst, DEFAULT_FLR_THRESHOLD)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let json = solution_json(&sol, &inst, &cost, &ind, Some(a.seed), &a.common.departure)?;
    fs::write(a.out.join("solution.json"), json)?;
    let row = costs_row(a.strategy.name(), a.seed, &a.common.departure, sol.routes.len(), &cost, &ind);
    write_csv(&a.out.join("costs.csv"), &costs_header(), &[row])?;
    if a.trace {
        let (h, rows) = trace_rows(&trace, &inst);
        write_csv(&a.out.join("trace.csv"), &h, &rows)?;
    }
    println!("{} with {} vehicles", a.strategy, sol.routes.len());
    print!("{}", breakdown_table(&cost, &ind));
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<()> {
    if a.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    if a.strategies.is_empty() {
        return Err(usage("--strategies is empty"));
    }
    let d = load_defaults(a.common.config.as_deref(), &a.common.overrides)?;
    let base = load_instance(&a.input, &a.common, &d)?;
    let mut cells = Vec::new();
    for &s in &a.strategies {
        let inst = instance_for(s, &base, a.input.split_seed)?;
        for r in 0..a.reps {
            let seed = a.seed_base + r;
            cells.push((s, inst.clone(), seed, policy(&a.common, seed)?));
        }
    }
    let pool = thread_pool(a.jobs)?;
    let runs: Vec<Run> = pool.install(|| {
        cells
            .par_iter()
            .map(|(s, inst, seed, pol)| run_once(inst, *s, &d.savns(*seed), pol))
            .collect::<Result<_>>()
    })?;

    let per = a.reps as usize;
    let mean_total = |i: usize| {
        let chunk = &runs[i * per..(i + 1) * per];
        chunk.iter().map(|r| r.cost.total).sum::<f64>() / per as f64
    };
    let alone = a.strategies.iter().position(|&s| s == Strategy::Standalone).map(mean_total);

    let mut header: Vec<String> = ["strategy", "reps", "vehicles"].map(String::from).to_vec();
    header.extend(COST_COLUMNS.iter().map(|s| s.to_string()));
    header.extend(["total_std", "std_avg", "mre", "saving"].map(String::from));
    header.extend(INDICATOR_COLUMNS.iter().map(|s| s.to_string()));

    let mut rows = Vec::new();
    for (i, s) in a.strategies.iter().enumerate() {
        let chunk = &runs[i * per..(i + 1) * per];
        let avg = |f: &dyn Fn(&Run) -> f64| chunk.iter().map(f).sum::<f64>() / per as f64;
        let mut row = vec![s.name().to_string(), a.reps.to_string(), num(avg(&|r| r.vehicles as f64))];
        for k in 0..COST_COLUMNS.len() {
            row.push(num(avg(&|r| r.cost.values()[k])));
        }
        let totals: Vec<f64> = chunk.iter().map(|r| r.cost.total).collect();
        let sp = spread(&totals);
        row.extend([num(sp.std), num(sp.std_avg), num(sp.mre)]);
        row.push(match alone {
            Some(base) if base != 0.0 => num((base - sp.mean) / base),
            _ => String::new(),
        });
        for k in 0..INDICATOR_COLUMNS.len() {
            row.push(num(avg(&|r| indicator_values(&r.ind)[k])));
        }
        println!("{:<10} total {:>12.3}  std/avg {:.4}", s.name(), sp.mean, sp.std_avg);
        rows.push(row);
    }
    write_csv(&a.out, &header, &rows)
}

/// Position of a value among the sorted distinct sweep values, in thirds.
fn band(value: f64, values: &[f64]) -> &'static str {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rank = sorted.iter().position(|&v| v == value).unwrap_or(0);
    ["low", "med", "high"][(rank * 3 / sorted.len()).min(2)]
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    if a.values.is_empty() {
        return Err(usage("--values is empty"));
    }
    if a.reps == 0 || a.strategies.is_empty() {
        return Err(usage("need at least one strategy and one replication"));
    }
    let d = load_defaults(a.common.config.as_deref(), &a.common.overrides)?;
    let base = load_instance(&a.input, &a.common, &d)?;
    let mut cells = Vec::new();
    for &v in &a.values {
        let mut costs = *base.costs();
        match a.param {
            SweepParam::Lambda => costs.carbon_emission = v,
            SweepParam::C1 => costs.cooling_per_min = v / 60.0,
            SweepParam::Alpha => costs.rebalance_discount = v,
        }
        let inst = base.with_costs(costs).map_err(|e| usage(e.to_string()))?;
        for &s in &a.strategies {
            let inst = instance_for(s, &inst, a.input.split_seed)?;
            for r in 0..a.reps {
                let seed = a.seed_base + r;
                cells.push((v, s, inst.clone(), seed, policy(&a.common, seed)?));
            }
        }
    }
    let pool = thread_pool(a.jobs)?;
    let runs: Vec<Run> = pool.install(|| {
        cells
            .par_iter()
            .map(|(_, s, inst, seed, pol)| run_once(inst, *s, &d.savns(*seed), pol))
            .collect::<Result<_>>()
    })?;

    let name = match a.param {
        SweepParam::Lambda => "lambda",
        SweepParam::C1 => "c1",
        SweepParam::Alpha => "alpha",
    };
    let mut header: Vec<String> = ["parameter", "value", "band", "strategy", "seed", "vehicles"]
        .map(String::from)
        .to_vec();
    header.extend(COST_COLUMNS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&runs)
        .map(|((v, s, _, seed, _), run)| {
            let mut row = vec![
                name.to_string(),
                v.to_string(),
                band(*v, &a.values).to_string(),
                s.name().to_string(),
                seed.to_string(),
                run.vehicles.to_string(),
            ];
            row.extend(run.cost.values().iter().map(|&x| num(x)));
            row
        })
        .collect();
    println!("{} runs", rows.len());
    write_csv(&a.out, &header, &rows)
}

pub fn oracle(a: OracleArgs) -> Result<()> {
    let d = load_defaults(a.common.config.as_deref(), &a.common.overrides)?;
    let pol = policy(&a.common, 0)?;
    if !pol.is_fixed() {
        return Err(usage("the oracle needs a fixed departure time"));
    }
    let base = load_instance(&a.input, &a.common, &d)?;
    let inst = instance_for(a.strategy, &base, a.input.split_seed)?;
    let (sol, cost) = exact_solve(&inst, a.strategy, &pol)?;
    let ind = indicators(&sol, &inst, DEFAULT_FLR_THRESHOLD)?;
    println!("optimal {} with {} vehicles", a.strategy, sol.routes.len());
    print!("{}", breakdown_table(&cost, &ind));
    println!("audit      {:>14.3}", audit_cost(&sol, &inst).total);
    if let Some(out) = &a.out {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        fs::write(
            out.join("solution.json"),
            solution_json(&sol, &inst, &cost, &ind, None, &a.common.departure)?,
        )?;
        let row = costs_row(a.strategy.name(), 0, &a.common.departure, sol.routes.len(), &cost, &ind);
        write_csv(&out.join("costs.csv"), &costs_header(), &[row])?;
    }
    Ok(())
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let d = load_defaults(a.config.as_deref(), &a.overrides)?;
    let spec = match a.kind {
        Kind::CaseStudy => GenerationSpec::case_study(a.seed),
        Kind::Benchmark => GenerationSpec::benchmark(a.customers, a.depots, a.seed),
    };
    let mut inst = generate_instance(&spec, &d).map_err(|e| usage(e.to_string()))?;
    if let Some(split) = a.split {
        inst = split_standalone_demand(&inst, split).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut text = inst.to_json_string();
    text.push('\n');
    fs::write(&a.out, text).with_context(|| format!("writing {}", a.out.display()))?;
    println!("{} customers, {} depots", inst.n_customers(), inst.n_depots());
    Ok(())
}

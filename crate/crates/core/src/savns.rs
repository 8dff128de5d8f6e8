//! Simulated annealing driven by variable-neighbourhood Cross moves.
//!
//! At every temperature the search tries one move for each neighbourhood size
//! `k = 1..=k_max`, accepting by the Metropolis rule, then cools by `cooling`
//! until the temperature drops below `t_final`. The best solution visited is
//! returned.
//!
//! [`savns1`] keeps routes closed and improves each depot's routes on their
//! own. [`savns2`] works on all routes at once; after a move the touched
//! routes leave from the nearest depot (with a vehicle to spare) to their
//! first customer and return to the nearest depot to their last one, then the
//! balancing pass (BOC) or the rebalancing cost (RBOC) is applied.
//!
//! Only the routes a move touches are re-costed. A full re-evaluation runs
//! every `audit_every` accepted moves and must agree with the running total.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construction::{nearest_depot_with_capacity, PfihWeights};
use crate::cost::route_cost;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::neighborhoods::draw_cross_move;
use crate::route::Route;
use crate::strategies::{
    balance_returns, floyd_shortest_paths, imbalance_of, solve_rebalance, BalanceOrder, Solution, Strategy,
};
use crate::travel_time::propagate_route_times;

const AUDIT_TOL: f64 = 1e-6;

/// How neighbourhood sizes and acceptance are combined. The two ablations use
/// the same move budget as the hybrid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchVariant {
    Hybrid,
    /// Annealing with a single neighbourhood size.
    SaOnly { k: usize },
    /// Greedy descent: `k` grows after a non-improving move and resets to 1
    /// after an improving one.
    VnsOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavnsConfig {
    pub t_initial: f64,
    pub t_final: f64,
    pub cooling: f64,
    pub k_max: usize,
    pub seed: u64,
    pub vns_retry_cap: usize,
    pub pfih: PfihWeights,
    pub balance_order: BalanceOrder,
    pub variant: SearchVariant,
    pub audit_every: usize,
}

impl Default for SavnsConfig {
    fn default() -> Self {
        SavnsConfig {
            t_initial: 5000.0,
            t_final: 1.0,
            cooling: 0.98,
            k_max: 8,
            seed: 0,
            vns_retry_cap: 50,
            pfih: PfihWeights::default(),
            balance_order: BalanceOrder::FarthestFirst,
            variant: SearchVariant::Hybrid,
            audit_every: 1000,
        }
    }
}

impl SavnsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.t_final > 0.0 && self.t_final < self.t_initial) {
            return bad("need 0 < t_final < t_initial");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling rate must lie in (0, 1)");
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1");
        }
        if let SearchVariant::SaOnly { k: 0 } = self.variant {
            return bad("neighbourhood size must be at least 1");
        }
        if self.audit_every == 0 {
            return bad("audit_every must be at least 1");
        }
        let w = &self.pfih;
        if !(w.eta >= 0.0 && w.theta >= 0.0 && w.xi >= 0.0) {
            return bad("PFIH weights must be nonnegative");
        }
        Ok(())
    }

    /// Temperatures visited: `t_initial · cooling^i` for as long as it stays
    /// at or above `t_final`.
    pub fn temperature_steps(&self) -> usize {
        let mut t = self.t_initial;
        let mut n = 0;
        while t >= self.t_final {
            n += 1;
            t *= self.cooling;
        }
        n
    }
}

pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp()
}

/// One row per temperature step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Depot index being improved; `None` for the global search.
    pub depot: Option<usize>,
    pub temperature: f64,
    pub current: f64,
    pub best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Endpoints {
    Fixed,
    Balanced(BalanceOrder),
    Rebalanced,
}

struct Candidate {
    changed: Vec<(usize, Route, f64)>,
    rebalance: f64,
    delta: f64,
}

struct Search<'a> {
    inst: &'a Instance,
    cfg: &'a SavnsConfig,
    endpoints: Endpoints,
    routes: Vec<Route>,
    costs: Vec<f64>,
    rebalance: f64,
    current: f64,
    best: f64,
    best_routes: Vec<Route>,
    rng: ChaCha8Rng,
    accepted: usize,
    iteration: usize,
    highway: Vec<Vec<f64>>,
    memo: HashMap<Vec<i64>, f64>,
}

impl<'a> Search<'a> {
    fn new(routes: Vec<Route>, endpoints: Endpoints, inst: &'a Instance, cfg: &'a SavnsConfig) -> Result<Self> {
        let highway = if endpoints == Endpoints::Rebalanced {
            floyd_shortest_paths(inst.highway(), inst.depots())?
        } else {
            Vec::new()
        };
        let mut s = Search {
            inst,
            cfg,
            endpoints,
            costs: Vec::with_capacity(routes.len()),
            best_routes: routes.clone(),
            routes,
            rebalance: 0.0,
            current: 0.0,
            best: 0.0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            accepted: 0,
            iteration: 0,
            highway,
            memo: HashMap::new(),
        };
        for r in &s.routes {
            s.costs.push(route_cost(r, inst)?.total);
        }
        s.rebalance = s.rebalance_for(s.imbalance(&s.routes))?;
        s.current = s.costs.iter().sum::<f64>() + s.rebalance;
        s.best = s.current;
        Ok(s)
    }

    fn imbalance(&self, routes: &[Route]) -> Vec<i64> {
        imbalance_of(
            routes.iter().map(|r| r.depart_depot),
            routes.iter().map(|r| r.return_depot),
            self.inst.n_depots(),
        )
    }

    fn rebalance_for(&mut self, u: Vec<i64>) -> Result<f64> {
        if self.endpoints != Endpoints::Rebalanced {
            return Ok(0.0);
        }
        if let Some(&c) = self.memo.get(&u) {
            return Ok(c);
        }
        let c = solve_rebalance(&u, &self.highway, self.inst.costs(), self.inst.vehicle())?.cost;
        self.memo.insert(u, c);
        Ok(c)
    }

    fn propose(&mut self, pool: &[usize], k: usize) -> Result<Option<Candidate>> {
        let inst = self.inst;
        let Some(mv) = draw_cross_move(&self.routes, pool, k, &mut self.rng, inst, self.cfg.vns_retry_cap) else {
            return Ok(None);
        };
        let (v1, v2) = mv.apply(&self.routes[mv.r1].visits, &self.routes[mv.r2].visits);
        // both sub-paths are nonempty, so neither route can end up empty
        debug_assert!(!v1.is_empty() && !v2.is_empty());
        let mut changed: Vec<(usize, Route)> = [(mv.r1, v1), (mv.r2, v2)]
            .into_iter()
            .map(|(idx, visits)| {
                let old = &self.routes[idx];
                (idx, Route::new(old.depart_depot, old.return_depot, visits, inst))
            })
            .collect();

        if self.endpoints != Endpoints::Fixed {
            let mut used = vec![0u32; inst.n_depots()];
            for (i, r) in self.routes.iter().enumerate() {
                if i != mv.r1 && i != mv.r2 {
                    used[r.depart_depot] += 1;
                }
            }
            for (_, r) in changed.iter_mut() {
                // a move that cannot find a free vehicle breaks the fleet cap
                let Some(d) = nearest_depot_with_capacity(inst, r.visits[0], &used) else {
                    return Ok(None);
                };
                used[d] += 1;
                r.depart_depot = d;
                r.return_depot = inst.nearest_depot(*r.visits.last().unwrap());
            }
        }

        let mut rebalance = 0.0;
        match self.endpoints {
            Endpoints::Fixed => {}
            Endpoints::Balanced(order) => {
                let view = |i: usize| changed.iter().find(|(j, _)| *j == i).map_or(&self.routes[i], |(_, r)| r);
                let departs: Vec<usize> = (0..self.routes.len()).map(|i| view(i).depart_depot).collect();
                let mut returns: Vec<usize> = (0..self.routes.len()).map(|i| view(i).return_depot).collect();
                let lasts: Vec<Option<usize>> = (0..self.routes.len()).map(|i| view(i).visits.last().copied()).collect();
                for r in balance_returns(&departs, &mut returns, &lasts, inst, order) {
                    match changed.iter_mut().find(|(j, _)| *j == r) {
                        Some((_, route)) => route.return_depot = returns[r],
                        None => {
                            let mut route = self.routes[r].clone();
                            route.return_depot = returns[r];
                            changed.push((r, route));
                        }
                    }
                }
            }
            Endpoints::Rebalanced => {
                let mut u = self.imbalance(&self.routes);
                for (i, r) in &changed {
                    let old = &self.routes[*i];
                    u[old.depart_depot] += 1;
                    u[old.return_depot] -= 1;
                    u[r.depart_depot] -= 1;
                    u[r.return_depot] += 1;
                }
                rebalance = self.rebalance_for(u)?;
            }
        }

        let mut delta = rebalance - self.rebalance;
        let mut out = Vec::with_capacity(changed.len());
        for (i, mut r) in changed {
            let start = self.routes[i].start;
            propagate_route_times(&mut r, start, inst);
            let c = route_cost(&r, inst)?.total;
            delta += c - self.costs[i];
            out.push((i, r, c));
        }
        Ok(Some(Candidate {
            changed: out,
            rebalance,
            delta,
        }))
    }

    fn commit(&mut self, cand: Candidate) -> Result<()> {
        for (i, r, c) in cand.changed {
            self.routes[i] = r;
            self.costs[i] = c;
        }
        self.rebalance = cand.rebalance;
        self.current += cand.delta;
        self.accepted += 1;
        if self.accepted % self.cfg.audit_every == 0 {
            self.audit()?;
        }
        if self.current < self.best - 1e-9 * self.best.abs().max(1.0) {
            self.best = self.current;
            self.best_routes.clone_from(&self.routes);
        }
        Ok(())
    }

    /// Recomputes the objective from scratch and checks the running total.
    fn audit(&mut self) -> Result<()> {
        let mut total = 0.0;
        for r in &self.routes {
            let mut fresh = r.clone();
            propagate_route_times(&mut fresh, r.start, self.inst);
            total += route_cost(&fresh, self.inst)?.total;
        }
        if self.endpoints == Endpoints::Rebalanced {
            let u = self.imbalance(&self.routes);
            total += solve_rebalance(&u, &self.highway, self.inst.costs(), self.inst.vehicle())?.cost;
        }
        let drift = (total - self.current).abs() / total.abs().max(1.0);
        assert!(
            drift <= AUDIT_TOL,
            "incremental objective {} drifted from full evaluation {}",
            self.current,
            total
        );
        self.current = total;
        Ok(())
    }

    fn restore_best(&mut self) -> Result<()> {
        self.routes.clone_from(&self.best_routes);
        self.costs.clear();
        for r in &self.routes {
            self.costs.push(route_cost(r, self.inst)?.total);
        }
        self.rebalance = self.rebalance_for(self.imbalance(&self.routes))?;
        self.current = self.costs.iter().sum::<f64>() + self.rebalance;
        self.best = self.current;
        Ok(())
    }

    fn anneal(&mut self, pool: &[usize], depot: Option<usize>, mut trace: Option<&mut Vec<TraceRow>>) -> Result<()> {
        let cfg = self.cfg;
        let mut t = cfg.t_initial;
        let mut vns_k = 1;
        while t >= cfg.t_final {
            for k in 1..=cfg.k_max {
                let size = match cfg.variant {
                    SearchVariant::Hybrid => k,
                    SearchVariant::SaOnly { k } => k,
                    SearchVariant::VnsOnly => vns_k,
                };
                self.iteration += 1;
                let cand = self.propose(pool, size)?;
                if cfg.variant == SearchVariant::VnsOnly {
                    let improving = cand.as_ref().is_some_and(|c| c.delta < -1e-9);
                    vns_k = if improving { 1 } else { vns_k % cfg.k_max + 1 };
                    if let Some(c) = cand.filter(|c| c.delta <= 0.0) {
                        self.commit(c)?;
                    }
                } else if let Some(c) = cand {
                    if metropolis_accept(c.delta, t, &mut self.rng) {
                        self.commit(c)?;
                    }
                }
            }
            if let Some(rows) = trace.as_deref_mut() {
                rows.push(TraceRow {
                    iteration: self.iteration,
                    depot,
                    temperature: t,
                    current: self.current,
                    best: self.best,
                });
            }
            t *= cfg.cooling;
        }
        self.restore_best()
    }
}

/// Per-depot search over closed routes (CC and stand-alone).
pub fn savns1(initial: &Solution, instance: &Instance, config: &SavnsConfig) -> Result<Solution> {
    savns1_traced(initial, instance, config, None)
}

pub fn savns1_traced(
    initial: &Solution,
    instance: &Instance,
    config: &SavnsConfig,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<Solution> {
    config.validate()?;
    let mut s = Search::new(initial.routes.clone(), Endpoints::Fixed, instance, config)?;
    for d in 0..instance.n_depots() {
        let pool: Vec<usize> = (0..s.routes.len())
            .filter(|&i| s.routes[i].depart_depot == d && !s.routes[i].is_empty())
            .collect();
        if pool.len() < 2 {
            continue;
        }
        s.anneal(&pool, Some(d), trace.as_deref_mut())?;
    }
    Ok(Solution {
        routes: s.best_routes,
        rebalance: initial.rebalance.clone(),
        strategy: initial.strategy,
    })
}

/// Global search over open routes (BOC and RBOC).
pub fn savns2(initial: &Solution, instance: &Instance, config: &SavnsConfig, strategy: Strategy) -> Result<Solution> {
    savns2_traced(initial, instance, config, strategy, None)
}

pub fn savns2_traced(
    initial: &Solution,
    instance: &Instance,
    config: &SavnsConfig,
    strategy: Strategy,
    trace: Option<&mut Vec<TraceRow>>,
) -> Result<Solution> {
    config.validate()?;
    let endpoints = match strategy {
        Strategy::Boc => Endpoints::Balanced(config.balance_order),
        Strategy::Rboc => Endpoints::Rebalanced,
        other => {
            return Err(Error::Unsupported(format!(
                "the global search handles boc and rboc, not {other}"
            )))
        }
    };
    let mut routes = initial.routes.clone();
    if let Endpoints::Balanced(order) = endpoints {
        crate::strategies::balance_routes(&mut routes, instance, order);
    }
    let mut s = Search::new(routes, endpoints, instance, config)?;
    let pool: Vec<usize> = (0..s.routes.len()).filter(|&i| !s.routes[i].is_empty()).collect();
    if pool.len() >= 2 {
        s.anneal(&pool, None, trace)?;
    }
    let rebalance = if endpoints == Endpoints::Rebalanced {
        let u = s.imbalance(&s.best_routes);
        Some(solve_rebalance(&u, &s.highway, instance.costs(), instance.vehicle())?)
    } else {
        None
    };
    Ok(Solution {
        routes: s.best_routes,
        rebalance,
        strategy,
    })
}

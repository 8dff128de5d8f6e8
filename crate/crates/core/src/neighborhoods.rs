//! Cross and i-Cross exchange between two routes.
//!
//! A move picks two routes, a start customer in each, and swaps the sub-paths
//! of at most `k` customers that begin there (shorter if the route ends
//! first). i-Cross inserts both sub-paths reversed. Depot endpoints are never
//! touched here.

use rand::Rng;

use crate::instance::Instance;
use crate::route::Route;
use crate::strategies::Solution;
use crate::travel_time::propagate_route_times;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossMove {
    pub r1: usize,
    pub r2: usize,
    pub start1: usize,
    pub len1: usize,
    pub start2: usize,
    pub len2: usize,
    pub reversed: bool,
}

impl CrossMove {
    /// New visit sequences for the two routes.
    pub fn apply(&self, a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let seg1 = &a[self.start1..self.start1 + self.len1];
        let seg2 = &b[self.start2..self.start2 + self.len2];
        let splice = |base: &[usize], start: usize, len: usize, seg: &[usize]| {
            let mut out = Vec::with_capacity(base.len() - len + seg.len());
            out.extend_from_slice(&base[..start]);
            if self.reversed {
                out.extend(seg.iter().rev());
            } else {
                out.extend_from_slice(seg);
            }
            out.extend_from_slice(&base[start + len..]);
            out
        };
        (
            splice(a, self.start1, self.len1, seg2),
            splice(b, self.start2, self.len2, seg1),
        )
    }

    /// Loads of the two routes after the move.
    pub fn loads_after(&self, a: &Route, b: &Route, instance: &Instance) -> (u32, u32) {
        let sum = |s: &[usize]| -> u32 { s.iter().map(|&c| instance.customer(c).demand).sum() };
        let out1 = sum(&a.visits[self.start1..self.start1 + self.len1]);
        let out2 = sum(&b.visits[self.start2..self.start2 + self.len2]);
        (a.load - out1 + out2, b.load - out2 + out1)
    }
}

/// Draws a capacity-feasible move among the routes listed in `pool`. After
/// `retry_cap` infeasible draws gives up and returns `None` (the identity).
/// Every route in `pool` must be nonempty, and `pool` must hold at least two.
pub fn draw_cross_move<R: Rng + ?Sized>(
    routes: &[Route],
    pool: &[usize],
    k: usize,
    rng: &mut R,
    instance: &Instance,
    retry_cap: usize,
) -> Option<CrossMove> {
    debug_assert!(pool.len() >= 2 && k >= 1);
    let q = instance.vehicle().capacity;
    for _ in 0..retry_cap.max(1) {
        let i = rng.gen_range(0..pool.len());
        let mut j = rng.gen_range(0..pool.len() - 1);
        if j >= i {
            j += 1;
        }
        let (r1, r2) = (pool[i], pool[j]);
        let (a, b) = (&routes[r1], &routes[r2]);
        let start1 = rng.gen_range(0..a.visits.len());
        let start2 = rng.gen_range(0..b.visits.len());
        let mv = CrossMove {
            r1,
            r2,
            start1,
            len1: k.min(a.visits.len() - start1),
            start2,
            len2: k.min(b.visits.len() - start2),
            reversed: rng.gen_bool(0.5),
        };
        let (l1, l2) = mv.loads_after(a, b, instance);
        if l1 <= q && l2 <= q {
            return Some(mv);
        }
    }
    None
}

/// One VNS step on a whole solution: a random Cross or i-Cross move between
/// two of its nonempty routes, arrival times re-propagated from each route's
/// own start. Routes left empty are dropped.
pub fn vns_strategy_k<R: Rng + ?Sized>(
    solution: &Solution,
    k: usize,
    rng: &mut R,
    instance: &Instance,
    retry_cap: usize,
) -> Solution {
    let pool: Vec<usize> = (0..solution.routes.len())
        .filter(|&r| !solution.routes[r].is_empty())
        .collect();
    if pool.len() < 2 {
        return solution.clone();
    }
    let Some(mv) = draw_cross_move(&solution.routes, &pool, k, rng, instance, retry_cap) else {
        return solution.clone();
    };
    let mut out = solution.clone();
    let (v1, v2) = mv.apply(&solution.routes[mv.r1].visits, &solution.routes[mv.r2].visits);
    for (r, visits) in [(mv.r1, v1), (mv.r2, v2)] {
        let route = &mut out.routes[r];
        route.visits = visits;
        route.recompute_load(instance);
        let start = route.start;
        propagate_route_times(route, start, instance);
    }
    out.routes.retain(|r| !r.is_empty());
    out
}

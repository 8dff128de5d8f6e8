//! The production cost model against the oracle's naive re-implementation.

use coldvrp::instance::{generate_instance, GenerationSpec};
use coldvrp::oracle::{audit_cost, audit_route_cost};
use coldvrp::travel_time::propagate_route_times;
use coldvrp::{cost, Defaults, DeparturePolicy, Route, Strategy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

#[test]
fn thousand_random_routes_agree() {
    let d = Defaults::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let spec = GenerationSpec {
            n_customers: 6,
            n_depots: 3,
            side_km: 40.0,
            demand: (1, 13),
            service_time: (0.0, 20.0),
            fleet: (2, 4),
            window_start: (0.0, 400.0),
            window_width: (0.0, 120.0),
            seed: i,
        };
        let inst = generate_instance(&spec, &d).unwrap();
        let mut visits: Vec<usize> = (0..6).collect();
        visits.shuffle(&mut rng);
        visits.truncate(rng.gen_range(1..=6));
        let mut r = Route::new(rng.gen_range(0..3), rng.gen_range(0..3), visits, &inst);
        propagate_route_times(&mut r, rng.gen_range(0.0..480.0), &inst);
        let a = cost::route_cost(&r, &inst).unwrap();
        let b = audit_route_cost(&r, &inst);
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max(rel(*x, y));
        }
    }
    assert!(worst <= 1e-9, "worst relative disagreement {worst:e}");
}

#[test]
fn solved_rboc_solution_audits_clean() {
    let d = Defaults::default();
    let inst = generate_instance(&GenerationSpec::benchmark(25, 3, 5), &d).unwrap();
    let mut cfg = d.savns(1);
    cfg.t_initial = 50.0;
    let (sol, c) = coldvrp::solve(&inst, Strategy::Rboc, &cfg, &DeparturePolicy::default()).unwrap();
    let audit = audit_cost(&sol, &inst);
    assert!(rel(c.total, audit.total) <= 1e-9);
    assert!(rel(c.rebalance, audit.rebalance) <= 1e-9 || c.rebalance == 0.0);
}

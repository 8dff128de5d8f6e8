//! Travel times under a shared piecewise-constant speed profile.
//!
//! Periods are half-open `[start, end)`, so a departure exactly on a boundary
//! uses the later period. After the last period the vehicle keeps the last
//! period's speed.

use crate::instance::{Instance, SpeedSchedule};
use crate::route::Route;

/// Index of the period containing `t`; times past the horizon map to the
/// last period and negative times to the first.
pub fn departure_period(t: f64, schedule: &SpeedSchedule) -> usize {
    let periods = schedule.periods();
    periods
        .iter()
        .position(|p| t < p.end_min)
        .unwrap_or(periods.len() - 1)
}

/// Minutes needed to cover `distance` km when leaving at `depart`.
pub fn leg_travel_time(depart: f64, distance: f64, schedule: &SpeedSchedule) -> f64 {
    if distance <= 0.0 {
        return 0.0;
    }
    let periods = schedule.periods();
    let last = periods.len() - 1;
    let mut p = departure_period(depart, schedule);
    let mut t = depart;
    let mut remaining = distance;
    loop {
        let km_per_min = periods[p].speed_kmh / 60.0;
        if p == last {
            return t + remaining / km_per_min - depart;
        }
        let coverable = (periods[p].end_min - t) * km_per_min;
        if remaining <= coverable {
            return t + remaining / km_per_min - depart;
        }
        remaining -= coverable;
        t = periods[p].end_min;
        p += 1;
    }
}

/// Per-period pieces `(period, minutes, km)` of one leg, in travel order.
pub fn leg_segments(depart: f64, distance: f64, schedule: &SpeedSchedule) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    if distance <= 0.0 {
        return out;
    }
    let periods = schedule.periods();
    let last = periods.len() - 1;
    let mut p = departure_period(depart, schedule);
    let mut t = depart;
    let mut remaining = distance;
    loop {
        let km_per_min = periods[p].speed_kmh / 60.0;
        let coverable = (periods[p].end_min - t) * km_per_min;
        if p == last || remaining <= coverable {
            out.push((p, remaining / km_per_min, remaining));
            return out;
        }
        out.push((p, periods[p].end_min - t, coverable));
        remaining -= coverable;
        t = periods[p].end_min;
        p += 1;
    }
}

/// Fills `arrivals` and `return_arrival` for a route leaving at `start`.
/// Vehicles never wait: service begins on arrival.
pub fn propagate_route_times(route: &mut Route, start: f64, instance: &Instance) {
    let schedule = instance.schedule();
    route.start = start;
    route.arrivals.clear();
    route.arrivals.reserve(route.visits.len());
    let mut t = start;
    let mut prev: Option<usize> = None;
    for &c in &route.visits {
        let (d, service) = match prev {
            None => (instance.depot_customer(route.depart_depot, c), 0.0),
            Some(p) => (instance.customer_customer(p, c), instance.customer(p).service_time),
        };
        let leave = t + service;
        t = leave + leg_travel_time(leave, d, schedule);
        route.arrivals.push(t);
        prev = Some(c);
    }
    route.return_arrival = match prev {
        None => start,
        Some(p) => {
            let leave = t + instance.customer(p).service_time;
            leave + leg_travel_time(leave, instance.depot_customer(route.return_depot, p), schedule)
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{build, customer, depot};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn period_lookup_is_half_open() {
        let s = SpeedSchedule::default();
        assert_eq!(departure_period(0.0, &s), 0);
        assert_eq!(departure_period(60.0, &s), 1);
        assert_eq!(departure_period(65.0, &s), 1);
        assert_eq!(departure_period(479.9, &s), 7);
        assert_eq!(departure_period(480.0, &s), 7);
        assert_eq!(departure_period(10_000.0, &s), 7);
    }

    #[test]
    fn hand_fixtures() {
        let s = SpeedSchedule::default();
        assert!(close(leg_travel_time(0.0, 5.0, &s), 30.0));
        assert!(close(leg_travel_time(50.0, 4.0, &s), 10.0 + (4.0 - 10.0 / 6.0) / 0.25));
        assert!(close(leg_travel_time(50.0, 4.0, &s), 19.333_333_333_333_332));
        assert!(close(leg_travel_time(470.0, 3.0, &s), 18.0));
        assert_eq!(leg_travel_time(123.0, 0.0, &s), 0.0);
    }

    #[test]
    fn segments_match_period_terms() {
        let s = SpeedSchedule::default();
        // 50 -> 60 at 10 km/h, 60 -> 120 at 15 km/h, rest at 15 km/h
        let segs = leg_segments(50.0, 20.0, &s);
        assert_eq!(segs.len(), 3);
        assert_eq!((segs[0].0, segs[1].0, segs[2].0), (0, 1, 2));
        assert!(close(segs[0].1, 10.0) && close(segs[0].2, 10.0 / 6.0));
        assert!(close(segs[1].1, 60.0) && close(segs[1].2, 15.0));
        let rest = 20.0 - 10.0 / 6.0 - 15.0;
        assert!(close(segs[2].2, rest) && close(segs[2].1, rest / 0.25));
        let total: f64 = segs.iter().map(|s| s.1).sum();
        assert!(close(total, leg_travel_time(50.0, 20.0, &s)));
    }

    #[test]
    fn route_propagation() {
        let mut a = customer(1, 3.0, 4.0, 5);
        a.service_time = 10.0;
        let b = customer(2, 3.0, 0.0, 5);
        let inst = build(vec![depot(1, 0.0, 0.0, 2)], vec![a, b]);

        let mut empty = Route::closed(0, vec![], &inst);
        propagate_route_times(&mut empty, 42.0, &inst);
        assert_eq!(empty.return_arrival, 42.0);

        let mut r = Route::closed(0, vec![0, 1], &inst);
        propagate_route_times(&mut r, 0.0, &inst);
        assert!(close(r.arrivals[0], 30.0));
        // leave at 40 after service, 4 km: 20 min at 10 km/h covers 3.333, rest at 15 km/h
        let second = 40.0 + leg_travel_time(40.0, 4.0, inst.schedule());
        assert!(close(r.arrivals[1], second));
        assert!(close(second, 60.0 + (4.0 - 20.0 / 6.0) / 0.25));
        assert!(close(r.return_arrival, second + leg_travel_time(second, 3.0, inst.schedule())));
    }
}

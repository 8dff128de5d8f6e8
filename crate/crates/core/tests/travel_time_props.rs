use coldvrp::instance::SpeedSchedule;
use coldvrp::travel_time::{leg_segments, leg_travel_time};
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 10_000,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg())]

    // Driving d1 then d2 without stopping equals driving d1 + d2.
    #[test]
    fn splitting_a_leg_changes_nothing(t in 0.0f64..600.0, d1 in 0.0f64..60.0, d2 in 0.0f64..60.0) {
        let s = SpeedSchedule::default();
        let whole = leg_travel_time(t, d1 + d2, &s);
        let first = leg_travel_time(t, d1, &s);
        let second = leg_travel_time(t + first, d2, &s);
        prop_assert!((whole - (first + second)).abs() <= 1e-9 * whole.max(1.0));
    }

    // Leaving later never means arriving earlier.
    #[test]
    fn first_in_first_out(t in 0.0f64..600.0, gap in 0.0f64..120.0, d in 0.0f64..80.0) {
        let s = SpeedSchedule::default();
        let early = t + leg_travel_time(t, d, &s);
        let late = t + gap + leg_travel_time(t + gap, d, &s);
        prop_assert!(early <= late + 1e-9);
    }

    #[test]
    fn longer_legs_take_longer(t in 0.0f64..600.0, d in 0.0f64..80.0, extra in 0.0f64..20.0) {
        let s = SpeedSchedule::default();
        prop_assert!(leg_travel_time(t, d, &s) <= leg_travel_time(t, d + extra, &s) + 1e-12);
    }

    #[test]
    fn segments_cover_the_leg(t in 0.0f64..600.0, d in 0.0f64..80.0) {
        let s = SpeedSchedule::default();
        let segs = leg_segments(t, d, &s);
        let km: f64 = segs.iter().map(|x| x.2).sum();
        let min: f64 = segs.iter().map(|x| x.1).sum();
        prop_assert!((km - d).abs() <= 1e-9 * d.max(1.0));
        prop_assert!((min - leg_travel_time(t, d, &s)).abs() <= 1e-9 * min.max(1.0));
    }
}

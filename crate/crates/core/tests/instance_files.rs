use std::path::PathBuf;

use coldvrp::instance::{generate_instance, GenerationSpec, InstanceFormat};
use coldvrp::{Defaults, Instance};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn native_json_loads_with_defaults() {
    let inst = Instance::load(fixture("two_depots.json"), InstanceFormat::NativeJson, &Defaults::default()).unwrap();
    assert_eq!((inst.n_depots(), inst.n_customers()), (2, 4));
    assert_eq!(inst.customer(0).ideal_earliest, 0.0);
    assert_eq!(inst.customer(2).ideal_earliest, 60.0);
    assert_eq!(inst.customer(3).ideal_earliest, 0.0);
    assert_eq!(inst.vehicle().capacity, 80);
    assert_eq!(inst.total_fleet(), 4);
}

#[test]
fn json_round_trip() {
    let inst = generate_instance(&GenerationSpec::benchmark(12, 3, 8), &Defaults::default()).unwrap();
    let back = Instance::from_json_str(&inst.to_json_string(), &Defaults::default()).unwrap();
    assert_eq!(back.to_json_string(), inst.to_json_string());
}

#[test]
fn cordeau_file_loads() {
    let inst = Instance::load(fixture("four_depots.cordeau"), InstanceFormat::Cordeau, &Defaults::default()).unwrap();
    assert_eq!((inst.n_depots(), inst.n_customers()), (4, 6));
    assert!(inst.depots().iter().all(|d| d.fleet_size == 2));
    assert_eq!(inst.customer(3).demand, 30);
    assert_eq!(inst.customer(3).earliest, 30.0);
    assert_eq!(inst.vehicle().capacity, 80);
}

#[test]
fn invalid_records_are_named() {
    let text = r#"{"depots":[{"id":1,"x":0,"y":0,"fleet_size":1}],
        "customers":[{"id":5,"x":1,"y":1,"demand":0,"earliest":10,"latest":5,"service_time":0}]}"#;
    let err = Instance::from_json_str(text, &Defaults::default()).unwrap_err().to_string();
    assert!(err.contains("customer"), "{err}");
}

#[test]
fn every_generated_customer_fits_a_vehicle() {
    let d = Defaults::default();
    for seed in 0..20 {
        let inst = generate_instance(&GenerationSpec::case_study(seed), &d).unwrap();
        assert_eq!(inst.n_customers(), 114);
        assert!(inst.customers().iter().all(|c| c.demand >= 1 && c.demand <= 25));
        assert!(inst.customers().iter().all(|c| c.ideal_earliest <= c.earliest && c.earliest <= c.latest));
        assert!(inst.highway().is_connected(inst.depots()));
    }
}

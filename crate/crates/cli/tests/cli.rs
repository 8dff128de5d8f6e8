use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coldvrp"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/two_depots.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

// quick search settings so the suite stays fast
const QUICK: [&str; 2] = ["--set", "t_initial=50"];

#[test]
fn solve_writes_solution_and_costs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run1");
    let o = run(&[
        "solve", "--instance", fixture().to_str().unwrap(), "--strategy", "boc", "--seed", "1",
        "--out", out.to_str().unwrap(), "--trace", QUICK[0], QUICK[1],
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        header(&out.join("costs.csv")),
        "strategy,seed,departure,vehicles,fix,transport,co2,cooling,good_loss,penalty,rebalance,total,lr,flr,cs,ear,tr"
    );
    assert_eq!(header(&out.join("trace.csv")), "iteration,depot,temperature,current,best");
    let sol: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    let mut ids: Vec<u64> = sol["routes"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["customers"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()))
        .collect();
    ids.sort();
    assert_eq!(ids, vec![11, 12, 13, 14]);
}

#[test]
fn repeated_solve_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(&[
            "solve", "--instance", fixture().to_str().unwrap(), "--strategy", "rboc", "--seed", "7",
            "--departure", "flexible:09:00-09:45", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        texts.push(fs::read(out.join("solution.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn usage_errors_exit_2() {
    let f = fixture();
    let f = f.to_str().unwrap();
    let cases: [&[&str]; 5] = [
        &["solve", "--instance", f, "--strategy", "fastest", "--out", "x"],
        &["solve", "--instance", f, "--strategy", "cc", "--out", "x", "--set", "nope=1"],
        &["solve", "--instance", f, "--strategy", "cc", "--out", "x", "--departure", "soon"],
        &["sweep", "--instance", f, "--param", "gamma", "--values", "1", "--out", "x.csv"],
        &["oracle", "--instance", f, "--strategy", "cc", "--departure", "flexible:09:00-10:00"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn infeasible_fleet_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tight.json");
    fs::write(
        &inst,
        r#"{"depots":[{"id":1,"x":0,"y":0,"fleet_size":1}],
            "customers":[{"id":1,"x":1,"y":0,"demand":60,"earliest":60,"latest":120,"service_time":5},
                         {"id":2,"x":2,"y":0,"demand":60,"earliest":60,"latest":120,"service_time":5}]}"#,
    )
    .unwrap();
    let o = run(&["solve", "--instance", inst.to_str().unwrap(), "--strategy", "cc", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("depot 1"));
}

#[test]
fn compare_summarises_each_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.csv");
    let o = run(&[
        "compare", "--instance", fixture().to_str().unwrap(), "--reps", "3", "--jobs", "2",
        "--out", out.to_str().unwrap(), QUICK[0], QUICK[1],
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "strategy,reps,vehicles,fix,transport,co2,cooling,good_loss,penalty,rebalance,total,total_std,std_avg,mre,saving,lr,flr,cs,ear,tr"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("standalone,3,"));
    // stand-alone saves nothing against itself
    assert_eq!(lines[1].split(',').nth(14).unwrap(), "0.000000");

    // a single worker gives the same table
    let again = dir.path().join("cmp1.csv");
    run(&[
        "compare", "--instance", fixture().to_str().unwrap(), "--reps", "3", "--jobs", "1",
        "--out", again.to_str().unwrap(), QUICK[0], QUICK[1],
    ]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep", "--instance", fixture().to_str().unwrap(), "--param", "lambda", "--values", "0.25,0.5,1,1.5",
        "--strategies", "boc,rboc", "--out", out.to_str().unwrap(), QUICK[0], QUICK[1],
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "parameter,value,band,strategy,seed,vehicles,fix,transport,co2,cooling,good_loss,penalty,rebalance,total"
    );
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("lambda,0.25,low,boc,0,"));
}

#[test]
fn oracle_and_generate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["oracle", "--instance", fixture().to_str().unwrap(), "--strategy", "rboc"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("audit"));

    let gen = dir.path().join("g.json");
    let o = run(&["generate", "--customers", "12", "--depots", "3", "--seed", "4", "--out", gen.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "solve", "--instance", gen.to_str().unwrap(), "--strategy", "standalone", "--split-seed", "2",
        "--out", dir.path().join("s").to_str().unwrap(), QUICK[0], QUICK[1],
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

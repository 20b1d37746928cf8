use std::path::PathBuf;
use std::process::{Command, Output};

use trichotomy_cli::RunReport;

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trichotomy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn spec(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_spec(dir: &tempfile::TempDir, body: &str) -> String {
    let p = dir.path().join("spec.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_values(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn classify_reports_governing_family() {
    let o = run(&["classify", &spec("odd-lag-example.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("T3 holds"));
    assert!(text.contains("PeriodicConvergence period 2"), "{text}");

    let o = run(&["classify", &spec("t2-subcritical.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("EquilibriumConvergence, globally asymptotically stable"));
}

#[test]
fn classify_out_of_scope_exits_1() {
    let o = run(&["classify", &spec("out-of-scope.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(
        text.contains("T1 fails: gcd(I_beta) = 2 divides j=2"),
        "{text}"
    );
    assert!(text.contains("OutOfScope"));
}

#[test]
fn malformed_specs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_spec(
        &dir,
        "k = 1\nalpha = \"1\"\nA = \"1\"\ngamma = \"2\"\n[beta]\n1 = \"1\"\n",
    );
    let o = run(&["classify", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));

    let float = write_spec(&dir, "k = 1\nalpha = 1.5\nA = \"1\"\n[beta]\n1 = \"1\"\n");
    assert_eq!(run(&["classify", &float]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "/nonexistent/spec.toml"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_constructed_cycle_alternates() {
    let o = run(&["simulate", &spec("t1-boundary.toml"), "--steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let expected: Vec<String> = (0..10)
        .map(|n| if n % 2 == 0 { "1" } else { "0" }.to_string())
        .collect();
    assert_eq!(csv_values(&o), expected);
}

#[test]
fn simulate_fibonacci_growth() {
    let o = run(&["simulate", &spec("t1-unbounded.toml"), "--steps", "20"]);
    let even: Vec<String> = csv_values(&o).into_iter().step_by(2).collect();
    assert_eq!(
        even,
        ["2", "3", "5", "8", "13", "21", "34", "55", "89", "144"]
    );
}

#[test]
fn simulate_zero_orbit_and_zero_denominator() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write_spec(
        &dir,
        "k = 2\nalpha = \"0\"\nA = \"1\"\n[beta]\n2 = \"1\"\n[B]\n1 = \"1\"\n",
    );
    let o = run(&["simulate", &zero, "--ics", "0,0", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_values(&o).iter().all(|v| v == "0"));

    let singular = write_spec(
        &dir,
        "k = 2\nalpha = \"0\"\nA = \"0\"\n[beta]\n2 = \"1\"\n[B]\n1 = \"1\"\n",
    );
    let o = run(&["simulate", &singular, "--ics", "0,1", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero denominator at step 0"));
}

#[test]
fn simulate_writes_to_file_in_float_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.csv");
    let o = run(&[
        "simulate",
        &spec("odd-lag-example.toml"),
        "--ics",
        "1,2,3,4,5,6,7",
        "--mode",
        "float",
        "--precision-bits",
        "64",
        "--steps",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.lines().nth(50).unwrap().contains('e'));
}

#[test]
fn construct_certifies_period_six() {
    let o = run(&["construct", &spec("odd-lag-period6.toml"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report = RunReport::from_json(&stdout(&o)).unwrap();
    let cert = report.certificate.unwrap();
    assert!(cert.is_prime() && cert.period == 6);
    assert_eq!(
        report.constructed_ics.unwrap().to_strings(),
        ["3", "3", "5", "3", "3", "2"]
    );
}

#[test]
fn construct_without_applicable_constructor_exits_1() {
    let o = run(&["construct", &spec("t2-subcritical.toml")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_boundary_cycle_and_mismatch() {
    let o = run(&[
        "verify",
        &spec("t2-boundary.toml"),
        "--random-ics",
        "4",
        "--steps",
        "1000",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = RunReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(report.constructed_ics.unwrap().to_strings(), ["2", "1/2"]);
    assert_eq!(report.seed, Some(0x5eed));

    // Far too short a horizon for the slowly converging first family.
    let o = run(&[
        "verify",
        &spec("t1-boundary.toml"),
        "--random-ics",
        "4",
        "--steps",
        "40",
        "--max-steps",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] random convergence"));
}

#[test]
fn verify_out_of_scope_exits_1() {
    assert_eq!(
        run(&["verify", &spec("out-of-scope.toml")]).status.code(),
        Some(1)
    );
}

#[test]
fn sweep_crosses_first_family_boundary() {
    let o = run(&[
        "sweep",
        &spec("t1-boundary.toml"),
        "--param",
        "A",
        "--from",
        "1",
        "--to",
        "3",
        "--count",
        "9",
        "--steps",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 9);
    let verdicts: Vec<&str> = rows.iter().map(|r| r[3]).collect();
    assert!(verdicts[..4].iter().all(|v| *v == "UnboundedExists"));
    assert_eq!(verdicts[4], "PeriodicConvergence");
    assert_eq!(rows[4][2], "2");
    assert_eq!(rows[4][4], "2");
    assert!(verdicts[5..].iter().all(|v| *v == "EquilibriumConvergence"));
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
    }
}

#[test]
fn sweep_odd_lag_transition_at_one_half() {
    let o = run(&[
        "sweep",
        &spec("odd-lag-example.toml"),
        "--param",
        "A",
        "--from",
        "1/4",
        "--to",
        "3/4",
        "--count",
        "5",
        "--steps",
        "2000",
    ]);
    let text = stdout(&o);
    let verdict_at = |value: &str| {
        text.lines()
            .find(|l| l.split(',').nth(2) == Some(value))
            .map(|l| l.split(',').nth(3).unwrap().to_string())
    };
    assert_eq!(verdict_at("3/8").as_deref(), Some("UnboundedExists"));
    assert_eq!(verdict_at("1/2").as_deref(), Some("PeriodicConvergence"));
    assert_eq!(verdict_at("5/8").as_deref(), Some("EquilibriumConvergence"));
}

#[test]
fn single_point_sweep_matches_classification() {
    let o = run(&[
        "sweep",
        &spec("t2-boundary.toml"),
        "--param",
        "A",
        "--from",
        "1",
        "--to",
        "1",
        "--count",
        "1",
        "--steps",
        "1000",
    ]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let c = RunReport::from_json(&stdout(&run(&[
        "classify",
        &spec("t2-boundary.toml"),
        "--json",
    ])))
    .unwrap();
    assert_eq!(row[3], c.verdict.kind_name());
    assert_eq!(row[4], "2");
    assert_eq!(row[8], "true");

    let o = run(&[
        "sweep",
        &spec("t2-boundary.toml"),
        "--param",
        "A",
        "--from",
        "1",
        "--to",
        "2",
        "--count",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn commands_are_deterministic() {
    let args = [
        "verify",
        &spec("odd-lag-period6.toml"),
        "--random-ics",
        "3",
        "--steps",
        "600",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let report = RunReport::from_json(&stdout(&a)).unwrap();
    assert_eq!(report.to_json().trim(), stdout(&a).trim());
}

use std::io::Write;
use std::process::{Command, Output};

fn involute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_involute")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn uniform_matrix_pretty() {
    let o = involute(&["matrix", "--gamma", "0", "0", "--n", "4", "--format", "pretty"]);
    assert!(o.status.success());
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect();
    assert_eq!(rows[0], ["·", "·", "·", "1"]);
    assert_eq!(rows[3], ["1/4", "1/4", "1/4", "1/4"]);
}

#[test]
fn down_matrix_csv() {
    let o = involute(&["matrix", "--gamma", "0", "0", "--n", "3", "--down", "--format", "csv"]);
    assert_eq!(stdout(&o), "c0,c1,c2\n1,0,0\n1/2,1/2,0\n1/3,1/3,1/3\n");
}

#[test]
fn failed_stochasticity_reports_witness() {
    let o = involute(&["check", "--lambda", "1,1/2,1/2,3/4", "stochastic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("z=1"));
}

#[test]
fn passing_check_exits_zero() {
    let o = involute(&["check", "--delta", "4", "2", "--n", "4", "reversible"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn invalid_parameters_exit_two() {
    let o = involute(&["matrix", "--delta", "1", "2", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = involute(&["matrix", "--gamma", "0", "x", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn example_seven_table() {
    let o = involute(&["repro", "example-7", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "nu,a_prime,b_prime\n10/23,17,9\n13/30,15,8\n22/51,13,7\n3/7,11,6\n"
    );
}

#[test]
fn fig_one_values() {
    let o = involute(&["repro", "fig-1", "--format", "csv"]);
    let nus: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(nus, ["1/3", "2/5", "5/12", "14/33", "3/7"]);
}

#[test]
fn stationary_json_matches_closed_form() {
    let o = involute(&["stationary", "--gammac", "1", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pi"], serde_json::json!(["1/9", "4/9", "4/9"]));
    assert_eq!(v["closed_form_agrees"], true);
}

#[test]
fn simulation_is_deterministic_per_seed() {
    let run = |seed: &str| stdout(&involute(&["simulate", "--gamma", "1", "0", "--n", "5", "--steps", "300", "--seed", seed, "--trajectory", "--format", "csv"]));
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn conjecture_is_deterministic_and_complete() {
    let args = ["conjecture", "--n", "3,4", "--samples", "50", "--format", "json"];
    let a = involute(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&involute(&args)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    for size in v["sizes"].as_array().unwrap() {
        assert_eq!(size["unclassified"], serde_json::json!([]));
    }
}

#[test]
fn custom_weight_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for x in 0..3 {
        for y in 0..=x {
            writeln!(f, "{y},{x},1").unwrap();
        }
    }
    let path = f.path().to_str().unwrap();
    let custom = stdout(&involute(&["matrix", "--custom", path, "--format", "csv"]));
    let uniform = stdout(&involute(&["matrix", "--gamma", "0", "0", "--n", "3", "--format", "csv"]));
    assert_eq!(custom, uniform);
}

#[test]
fn spectrum_of_lambda_sequence() {
    let o = involute(&["spectrum", "--lambda", "1,1/2,1/6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["charpoly_matches"], true);
}

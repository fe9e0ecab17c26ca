use std::process::{Command, Output};

fn qmock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmock"))
        .args(args)
        .env_remove("QMOCK_PREC")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn records(o: &Output) -> Vec<serde_json::Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON record per line"))
        .collect()
}

#[test]
fn verify_nu_to_sixteen() {
    let o = qmock(&["verify", "--identity", "nu", "--k-max", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    // φ(4) + φ(8) + φ(12) + φ(16)
    assert_eq!(recs.len(), 2 + 4 + 4 + 8);
    for r in &recs {
        assert_eq!(r["status"], "pass");
        assert_eq!(r["k"].as_u64().unwrap() % 4, 0);
        assert_eq!(r["lhs"], r["rhs"]);
    }
    assert!(stderr(&o).contains("pass=18"));
}

#[test]
fn verify_psi_shows_the_divergent_order() {
    let o = qmock(&["verify", "--identity", "psi", "--k-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let statuses: Vec<String> = records(&o).iter().map(|r| r["status"].as_str().unwrap().to_string()).collect();
    assert_eq!(statuses, ["pass", "divergent_input"]);
}

#[test]
fn unknown_identity_is_a_usage_error() {
    let o = qmock(&["verify", "--identity", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_flags_are_errors() {
    let o = qmock(&["catalog", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: usage:"));
}

#[test]
fn eval_at_roots_and_in_the_disk() {
    let o = qmock(&["eval", "--series", "psi", "--arg", "neg", "--root", "1/1"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "-1/3"));
    assert!(stderr(&o).contains("reduced to 0/1"));
    // f(1) = Σ 4^{-n}
    let o = qmock(&["eval", "--series", "f", "--arg", "id", "--root", "1/1"]);
    assert_eq!(stdout(&o).trim(), "4/3");
    let o = qmock(&["eval", "--series", "theta4", "--q", "0", "--prec", "128"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "1"));
}

#[test]
fn eval_outside_the_table_names_it() {
    let o = qmock(&["eval", "--series", "psi", "--arg", "neg", "--root", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("convergence table"));
}

#[test]
fn eta_order_at_a_cusp() {
    let o = qmock(&["eta", "--quotient", "12:3,6:-2", "--level", "3456", "--cusp", "1/12"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "24"));
    let o = qmock(&["eta", "--quotient", "12:3,6", "--level", "3456", "--cusp", "1/12"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qmock(&["eta", "--quotient", "12:3,6:-2", "--level", "3456", "--cusp", "1/0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn radial_bracket_is_bounded() {
    let o = qmock(&["radial", "--root", "1/2", "--radii", "0.9,0.99,0.999", "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &records(&o)[0];
    assert_eq!(r["values"].as_array().unwrap().len(), 3);
    assert_eq!(r["bounded"], true);
}

#[test]
fn catalog_lists_nineteen_identities() {
    let o = qmock(&["catalog", "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert_eq!(recs.len(), 19);
    assert!(recs.iter().all(|r| r["class"].is_string() && r["statement"].is_string()));
}

#[test]
fn witness_of_a_truncated_companion() {
    let o = qmock(&["witness", "--series", "nu_a", "--arg", "neg", "--root", "1/4", "--window", "50", "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &records(&o)[0];
    assert!(r["evidence"]["inf"].as_f64().unwrap() > 1e-3);
}

#[test]
fn reports_are_reproducible_across_worker_counts() {
    let args = ["verify", "--identity", "chi,lovejoy", "--k-max", "9", "--b", "2, zeta(1,3)"];
    let a = qmock(&[&args[..], &["--jobs", "1"]].concat());
    let b = qmock(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_has_a_header_and_one_row_per_report() {
    let o = qmock(&["verify", "--identity", "rho", "--k-max", "12", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("identity,h,k,params"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn precision_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qmock"))
        .args(["eval", "--series", "f", "--q", "0"])
        .env("QMOCK_PREC", "32")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

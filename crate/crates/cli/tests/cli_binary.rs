use std::path::Path;
use std::process::{Command, Output};

fn varlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn independent_bernoulli_pair_is_superadditive_at_one_half() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ind.csv"), "x,y,weight\n0,0,49\n0,1,21\n1,0,21\n1,1,9\n").unwrap();

    let csv = stdout(&varlab(&["report", "ind.csv", "--alpha", "1/2", "--output", "csv"], dir.path()));
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("1/2,,0/1,0/1,1/1,0/1,>"), "{row}");

    let json: serde_json::Value = serde_json::from_str(&stdout(&varlab(&["report", "ind.csv"], dir.path()))).unwrap();
    assert_eq!(json["comonotonic"]["comonotonic"], false);
    assert_eq!(json["theorem_flags"]["subadditive_everywhere"], false);
    assert_eq!(json["theorem_flags"]["additive_everywhere"], false);
}

#[test]
fn couple_then_report_is_additive() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "a\n1\n2\n2\n7\n").unwrap();
    std::fs::write(dir.path().join("b.csv"), "b\n5\n3\n").unwrap();
    let coupled = stdout(&varlab(&["couple", "a.csv", "b.csv"], dir.path()));
    assert_eq!(coupled.lines().next(), Some("a,b,weight"));
    std::fs::write(dir.path().join("c.csv"), &coupled).unwrap();

    let json: serde_json::Value = serde_json::from_str(&stdout(&varlab(&["report", "c.csv"], dir.path()))).unwrap();
    assert_eq!(json["comonotonic"]["comonotonic"], true);
    assert_eq!(json["theorem_flags"]["additive_everywhere"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.csv"), "x\n1\n").unwrap();
    std::fs::write(dir.path().join("ragged.csv"), "x,y\n1,2\n3\n").unwrap();
    for args in [
        &["var", "missing.csv", "--alpha", "0.5"][..],
        &["var", "ok.csv", "--alpha", "1.5"],
        &["var", "ok.csv", "--alpha", "0"],
        &["report", "ragged.csv"],
    ] {
        let out = varlab(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--seed", "42", "--trials", "25", "--output", "csv"];
    let first = stdout(&varlab(&args, dir.path()));
    assert_eq!(first, stdout(&varlab(&args, dir.path())));
    assert_eq!(first.lines().count(), 1 + 50);
}

#[test]
fn elliptic_reports_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.json"), r#"{"mean":[0,0],"covariance":[[1,2],[2,4]]}"#).unwrap();
    let out = stdout(&varlab(&["elliptic", "--spec", "s.json", "--alpha", "0.95"], dir.path()));
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["comonotone_condition"], true);
    assert_eq!(json["rows"].as_array().unwrap().len(), 1);

    std::fs::write(dir.path().join("bad.json"), r#"{"mean":[0,0],"covariance":[[1,3],[3,4]]}"#).unwrap();
    assert_eq!(varlab(&["elliptic", "--spec", "bad.json"], dir.path()).status.code(), Some(2));
}

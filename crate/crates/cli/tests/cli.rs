use std::io::Write;
use std::process::{Command, Output};

fn quinrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quinrep")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reduce_prints_reduced_form() {
    let o = quinrep(&["reduce", "10", "5", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[2,1,3]");
    let o = quinrep(&["reduce", "3", "-5", "10"]);
    assert_eq!(stdout(&o).trim(), "[2,1,3]");
}

#[test]
fn represent_exit_codes() {
    let o = quinrep(&["represent", "--lattice", "1,1,1,3,7", "2", "1", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not represented"));

    let o = quinrep(&["--format", "json", "represent", "--lattice", "1,1,1,3,7", "10", "5", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["outcome"], "represented");
    assert_eq!(v["result"]["certificate"]["v1"].as_array().unwrap().len(), 5);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["reduce", "1", "2"][..],
        &["reduce", "1", "5", "1"],
        &["represent", "--lattice", "1,x", "1", "0", "1"],
        &["represent", "--lattice", "1,-1,1,1,1", "1", "0", "1"],
        &["exceptions", "--lattice", "1,1,2,3,5", "--bound", "0"],
        &["local", "--lattice", "1,1,1,3,7", "--prime", "3", "1", "0", "1"],
        &["reduce", "1", "0", "99999999999999999999999"],
        &["frobnicate"],
    ] {
        let o = quinrep(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn exceptions_small_lattice() {
    let o = quinrep(&["--format", "csv", "exceptions", "--lattice", "1,1,2,3,5", "--bound", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a,b,c,discriminant\n2,1,2,3\n5,2,5,21\n6,3,6,27\n");
}

#[test]
fn lattice_from_gram_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "[[1,0,0,0,0],[0,2,1,0,0],[0,1,2,1,0],[0,0,1,3,0],[0,0,0,0,21]]").unwrap();
    let spec = format!("@{}", file.path().display());
    let o = quinrep(&["represent", "--lattice", &spec, "5", "0", "61"]);
    assert_eq!(o.status.code(), Some(1));
    let o = quinrep(&["represent", "--lattice", "@/nonexistent/gram.json", "1", "0", "1"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn local_and_transform() {
    let o = quinrep(&["local", "--lattice", "1,1,1,3", "--prime", "3", "1", "0", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("is not represented"));

    let o = quinrep(&["--format", "json", "transform", "34", "1", "37", "--n", "7", "--s", "2", "--t", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], serde_json::json!([6, -13, 30]));
    assert_eq!(v["positive_definite"], true);
}

#[test]
fn verify_is_deterministic_across_workers() {
    let run = |w: &str| quinrep(&["--format", "json", "--workers", w, "verify", "--theorem", "t3a", "--bound", "40"]);
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["matches"], true);
    assert!(v["note"].as_str().unwrap().contains("beyond the bound"));
}

#[test]
fn broken_tables_are_a_usage_error() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{\"version\": 1, \"tables\": []}}").unwrap();
    let path = file.path().display().to_string();
    let o = quinrep(&["--tables", &path, "verify", "--theorem", "t3a", "--bound", "10"]);
    assert_eq!(o.status.code(), Some(64));
    let o = Command::new(env!("CARGO_BIN_EXE_quinrep"))
        .args(["verify", "--theorem", "t3a", "--bound", "10"])
        .env("QUINREP_TABLES", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn run_in_process() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = quinrep_cli::run(["quinrep", "reduce", "10", "5", "3"], &mut out, &mut err);
    assert_eq!(code, quinrep_cli::EXIT_OK);
    assert_eq!(String::from_utf8(out).unwrap(), "[2,1,3]\n");
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermat-pp3"))
        .env("FERMAT_PP3_CACHE_DIR", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn survivors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let forms = data("forms/synthetic_d7.forms");
    let o = run(tmp.path(), &["eliminate", "--field", "7", "--forms", forms.to_str().unwrap(), "--bk", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn cm_fixture_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let forms = data("forms/cm_d7.forms");
    let o = run(tmp.path(), &["eliminate", "--field", "7", "--forms", forms.to_str().unwrap(), "--bk", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("CM"), "{}", stdout(&o));
}

#[test]
fn malformed_forms_file_exits_with_one() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.forms");
    std::fs::write(&bad, "this is not a forms file\n").unwrap();
    let o = run(tmp.path(), &["eliminate", "--field", "7", "--forms", bad.to_str().unwrap(), "--bk", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_with_one() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["screen", "--input", "/nonexistent/fields.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_64() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["frey", "--field", "5", "--a", "1", "--b", "1", "--c", "1", "--p", "7"][..],
        &["bounds", "rcg", "--field", "7", "--m", "4"],
        &["screen", "tower", "--n", "11"],
        &["screen"],
        &["no-such-command"],
    ] {
        let o = run(tmp.path(), args);
        assert_eq!(o.status.code(), Some(64), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn manifest_records_inputs_and_exit_code() {
    let tmp = TempDir::new().unwrap();
    let manifest = tmp.path().join("run.json");
    let input = data("fields_sample.csv");
    let o = run(
        tmp.path(),
        &["--manifest", manifest.to_str().unwrap(), "screen", "--input", input.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["exit_code"], 0);
    let digest = m["inputs"][input.to_str().unwrap()].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(m["command_line"].as_array().unwrap().iter().any(|a| a == "screen"));
}

#[test]
fn second_run_hits_cache_with_identical_output() {
    let tmp = TempDir::new().unwrap();
    let forms = data("forms/synthetic_d7.forms");
    let args = ["--json", "eliminate", "--field", "7", "--forms", forms.to_str().unwrap(), "--bk", "100"];
    let first = run(tmp.path(), &args);
    let second = run(tmp.path(), &args);
    assert!(!stderr(&first).contains("cache hit"));
    assert!(stderr(&second).contains("cache hit"), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), second.status.code());

    let other_bound = run(tmp.path(), &["--json", "eliminate", "--field", "7", "--forms", forms.to_str().unwrap(), "--bk", "101"]);
    assert!(!stderr(&other_bound).contains("cache hit"));

    let uncached = run(tmp.path(), &[&args[..], &["--no-cache"]].concat());
    assert!(!stderr(&uncached).contains("cache hit"));
    assert_eq!(uncached.stdout, first.stdout);
}

#[test]
fn json_output_parses() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["--json", "fields"][..],
        &["--json", "bounds", "ck", "--case", "quartic"],
        &["--json", "bounds", "aq", "--field", "1", "--norm", "13"],
        &["--json", "frey", "--field", "7", "--a", "1,0", "--b", "-1,0", "--c", "0,0", "--p", "5"],
    ] {
        let o = run(tmp.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn unmet_expectations_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let forms = data("forms/cm_d7.forms");
    let exp = tmp.path().join("exp.txt");
    std::fs::write(&exp, "7 3 1 one\n").unwrap();
    let o = run(
        tmp.path(),
        &["eliminate", "--field", "7", "--forms", forms.to_str().unwrap(), "--bk", "1000", "--expectations", exp.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("UNMET"));
}

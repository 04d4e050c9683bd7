use std::process::Command;

use serde_json::Value;

fn iwasawa(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn quick_selftest_passes() {
    let (code, out) = iwasawa(&["selftest", "--quick", "--json", "-"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "iwasawa-report/1");
    assert_eq!(v["assertions"].as_array().unwrap().len(), 3);
}

#[test]
fn identical_invocations_give_identical_reports() {
    let args = [
        "lfun", "--p", "7", "--N", "9", "--theta", "2/3,1/3", "--prec", "6,6", "--json", "-",
    ];
    let (c1, a) = iwasawa(&args);
    let (c2, b) = iwasawa(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |t: &str| {
        let (code, out) = iwasawa(&[
            "msym",
            "--level",
            "35",
            "--eisenstein",
            "7,1/2,1/3",
            "--prec",
            "3,1",
            "--threads",
            t,
            "--json",
            "-",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        v["results"].clone()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn search_feeds_lfun() {
    let (code, out) = iwasawa(&["search", "--p-max", "7", "--n-max", "9"]);
    assert_eq!(code, 0);
    let first: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    let (p, n, theta) = (
        first["p"].to_string(),
        first["N"].to_string(),
        first["theta"].as_str().unwrap().to_string(),
    );
    let (code, _) = iwasawa(&[
        "lfun", "--p", &p, "--N", &n, "--theta", &theta, "--prec", "6,6",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn lfun_and_coleman_agree() {
    let common = [
        "--p", "5", "--N", "13", "--theta", "1/3", "--prec", "3,4", "--json", "-",
    ];
    let (code, out) = iwasawa(&[&["lfun", "--convention", "testcase"][..], &common].concat());
    assert_eq!(code, 0);
    let lfun: Value = serde_json::from_str(&out).unwrap();
    assert!(lfun["results"]["guaranteed_precision"].as_u64().unwrap() >= 1);
    let (code, out) = iwasawa(&[&["coleman", "--compare-lfun"][..], &common].concat());
    assert_eq!(code, 0);
    let col: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(col["results"]["capstone"]["match"], true);
}

#[test]
fn bad_input_is_an_error() {
    assert_eq!(
        iwasawa(&["lfun", "--p", "7", "--N", "9", "--theta", "1/3,1/3,1/3"]).0,
        2
    );
    assert_eq!(iwasawa(&["msym", "--level", "11", "--varpi", "0:3"]).0, 2);
}

#[test]
fn hecke_matrices_at_eleven() {
    let (code, out) = iwasawa(&[
        "msym", "--level", "11", "--hecke", "2", "--hecke", "5", "--json", "-",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["T2"], serde_json::json!([[-2]]));
    assert_eq!(v["results"]["T5"], serde_json::json!([[1]]));
}

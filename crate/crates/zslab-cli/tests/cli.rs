//! End-to-end tests of the command-line surface: exit codes, report
//! schemas, cache behavior and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn zslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zslab"))
        .args(args)
        .env("ZSLAB_CACHE", dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn davenport_prints_the_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["davenport", "--group", "C3xC3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "5\n");
}

#[test]
fn lengths_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["lengths", "--group", "C3", "--seq", "1^6+2^6"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["group"], "C3");
    assert_eq!(body["sequence"], "1^6+2^6");
    assert_eq!(body["lengths"], serde_json::json!([4, 5, 6]));
    assert_eq!(body["min"], 4);
    assert_eq!(body["max"], 6);
    assert_eq!(body["delta"], serde_json::json!([1]));
    assert_eq!(body["elasticity"], "3/2");
    assert_eq!(body["interval"], true);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["davenport", "--group", "X9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = zslab(dir.path(), &["lengths", "--group", "C3", "--seq", "5^2"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown flags are clap usage errors
    let out = zslab(dir.path(), &["davenport", "--grp", "C3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn atoms_cache_roundtrip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = zslab(dir.path(), &["atoms", "--group", "C2xC4"]);
    assert!(first.status.success());
    let cache_file = dir.path().join("C2xC4.atoms");
    assert!(cache_file.exists());
    let on_disk = std::fs::read_to_string(&cache_file).unwrap();
    assert_eq!(on_disk, stdout(&first));

    let second = zslab(dir.path(), &["atoms", "--group", "C2xC4"]);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    // the second run reports a cache hit on stderr
    assert!(String::from_utf8(second.stderr).unwrap().contains("cache"));
}

#[test]
fn cache_dir_flag_is_overridden_by_env() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zslab"))
        .args([
            "atoms",
            "--group",
            "C3",
            "--cache-dir",
            flag_dir.path().to_str().unwrap(),
        ])
        .env("ZSLAB_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("C3.atoms").exists());
    assert!(!flag_dir.path().join("C3.atoms").exists());
}

#[test]
fn property_p_reports_both_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["property-p", "--group", "C5"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["P"], true);
    assert_eq!(body["Pstar"], true);
    assert_eq!(body["witness"]["u1"], "1^5");
    assert_eq!(body["assignment"]["2"], "2^5");

    let out = zslab(dir.path(), &["property-p", "--group", "C6"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["P"], false);
    assert_eq!(body["witness"], serde_json::Value::Null);
    assert_eq!(body["Pstar"], false);
}

#[test]
fn shifter_fails_with_exit_1_without_property_p() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["shifter", "--group", "C4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shifter_verifies_over_c3() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["shifter", "--group", "C3"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["report"]["all_pass"], true);
    assert_eq!(body["construction"]["k"], 2);
    assert_eq!(body["report"]["a_star"], "1^12+2^12");
}

#[test]
fn remark54_certificate_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("certs.json");
    let out = zslab(
        dir.path(),
        &[
            "remark54",
            "--n",
            "12",
            "--kmax",
            "2",
            "--out",
            out_file.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let certs = body.as_array().unwrap();
    assert_eq!(certs.len(), 2);
    for cert in certs {
        assert_eq!(cert["n"], 12);
        assert_eq!(cert["exhausted"], true);
        assert_eq!(cert["solutions"], serde_json::json!([]));
        assert!(cert["nodes"].as_u64().unwrap() > 0);
    }
    // file copy matches stdout
    let on_disk = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(on_disk.trim_end(), stdout(&out).trim_end());

    // n = 8 finds the three-atom solution
    let out = zslab(dir.path(), &["remark54", "--n", "8", "--kmax", "2"]);
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sols = body[1]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["lhs"], serde_json::json!(["1^8", "3^8"]));
    assert_eq!(
        sols[0]["rhs"],
        serde_json::json!(["1^2+3^2", "1^5+3", "1+3^5"])
    );
}

#[test]
fn even_cyclic_composite_and_prime_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["even-cyclic", "--n", "8", "--m-policy", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("three-atom witness"));
    assert!(text.contains("pass"));

    let out = zslab(dir.path(), &["even-cyclic", "--n", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("open-problem"));

    let out = zslab(dir.path(), &["even-cyclic", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn census_emits_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["census", "--group", "C5", "--nmax", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n\tomega_count\tcumulative_count\tratio_shift_k0\tratio_cumulative_alpha"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    // row n: n+1 products of n generators; cumulative counts the identity
    // plus the (j+1) products of j <= n generators, (n+1)(n+2)/2 in total
    assert_eq!(rows[0], "1\t2\t3\t1/2\t1/3");
    assert_eq!(rows[3], "4\t5\t15\t4/5\t2/3");
}

#[test]
fn paper_checks_filter_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["paper-checks", "--only", "census"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("PASS census"));
    assert!(text.contains("1/1 checks passed"));

    let out = zslab(dir.path(), &["paper-checks", "--only", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rhok_reports_value_and_exhaustiveness() {
    let dir = tempfile::tempdir().unwrap();
    let out = zslab(dir.path(), &["rhok", "--group", "C4", "--k", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4 (exhaustive: true)\n");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["maxelastic", "--group", "C4"],
        vec!["census", "--group", "C3", "--nmax", "6"],
        vec!["property-p", "--group", "C3xC3"],
        vec!["remark54", "--n", "8", "--kmax", "2"],
    ] {
        let a = zslab(dir.path(), &args);
        let b = zslab(dir.path(), &args);
        assert_eq!(stdout(&a), stdout(&b), "nondeterminism in {args:?}");
    }
}

use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cubic-hodge"));
    c.env_remove("HODGE_LOOP_CACHE_DIR");
    c
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn genus_zero_is_a_usage_error() {
    let (code, stdout, _) = run(&["compute", "--genus", "0"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
}

#[test]
fn small_cutoff_reports_json_error() {
    let (code, stdout, stderr) = run(&["compute", "--genus", "3", "--jet-cutoff", "3"]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(v["error"], "solve");
    assert!(v["message"].as_str().unwrap().contains("cutoff"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for fmt in ["text", "json", "latex"] {
        let one = run(&["--threads", "1", "--format", fmt, "compute", "--genus", "4"]);
        let many = run(&["--threads", "4", "--format", fmt, "compute", "--genus", "4"]);
        assert_eq!(one.0, 0);
        assert_eq!(one.1, many.1, "format {fmt}");
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let fresh = run(&["--cache-dir", d, "compute", "--genus", "3"]);
    assert_eq!(fresh.0, 0);
    assert!(dir.path().join("genus-3.json").exists());

    let warm = run(&["--cache-dir", d, "compute", "--genus", "3"]);
    assert_eq!(warm.1, fresh.1);
    assert!(warm.2.is_empty(), "unexpected notes: {}", warm.2);

    let path = dir.path().join("genus-2.json");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("1/360", "1/361", 1)).unwrap();
    let recovered = run(&["--cache-dir", d, "compute", "--genus", "3"]);
    assert_eq!(recovered.0, 0);
    assert_eq!(recovered.1, fresh.1);
    assert!(recovered.2.contains("recomputing genus 2"), "notes: {}", recovered.2);

    std::fs::write(&path, "{ not json").unwrap();
    let garbled = run(&["--cache-dir", d, "compute", "--genus", "2"]);
    assert_eq!(garbled.0, 0);
    assert!(garbled.2.contains("recomputing genus 2"));
    let env = bin().env("HODGE_LOOP_CACHE_DIR", d).args(["compute", "--genus", "3"]).output().unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), fresh.1);
}

#[test]
fn json_output_parses() {
    let (code, stdout, _) = run(&["--format", "json", "compute", "--genus", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["genus"], 2);
    assert_eq!(v["terms"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_and_virasoro_exit_cleanly() {
    let (code, stdout, _) = run(&["verify", "--genus", "2"]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(stdout.lines().count(), 11);
    assert!(stdout.lines().all(|l| l.contains(": pass")));
    let (code, stdout, _) = run(&["virasoro", "--k1", "1", "--k2", "2", "--mmax", "2", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 9);
    let (code, _, _) = run(&["virasoro", "--k1", "2", "--k2", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn rg_genus_one_is_the_log_term() {
    let (_, stdout, _) = run(&["rg", "--genus", "1"]);
    assert_eq!(stdout.trim(), "((1/24)*s1 - (1/24))*log(x)");
}

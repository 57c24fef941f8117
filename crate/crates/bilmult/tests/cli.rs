use std::path::PathBuf;

use bilmult::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["bilmult"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bilmult-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bound_exact_values() {
    let (code, out, _) = call(&["bound", "--q", "2", "--n", "4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("mu_2(4): 9 <= mu <= 9"), "{out}");
    assert!(out.contains("[exact-known]"));

    let (code, out, _) = call(&["bound", "--q", "5", "--n", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lower"]["value"], 5);
    assert_eq!(v["upper"]["value"], 5);
    assert_eq!(v["upper"]["witness_rank"], 5);

    let (_, out, _) = call(&["bound", "--q", "2", "--n", "1"]);
    assert!(out.starts_with("mu_2(1): 1 <= mu <= 1"));
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["bound", "--q", "6", "--n", "3"]).0, 2);
    assert_eq!(call(&["bound", "--q", "2", "--n", "0"]).0, 2);
    assert_eq!(call(&["bound", "--q", "2"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
    // too few evaluation points and no constructive recipe
    let (code, _, err) = call(&["construct", "--q", "2", "--n", "3"]);
    assert_eq!(code, 1, "{err}");
    assert_eq!(call(&["verify", "/nonexistent/file.json"]).0, 1);
    assert_eq!(call(&["tower", "--family", "kummer-p", "--p", "2", "--k-max", "2"]).0, 2);
    assert_eq!(call(&["tower", "--family", "gs-t3", "--p", "3", "--k-max", "2"]).0, 2);
}

#[test]
fn table_rows() {
    let (code, out, _) = call(&["table", "--q", "2", "--n-max", "8", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,lower,upper,method,citation");
    assert_eq!(lines.len(), 9);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 5, "{line}");
        let (lo, up): (u64, u64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert!(lo <= up);
    }
    assert!(lines[4].starts_with("4,9,9,"));
    for q in ["3", "4", "7", "9"] {
        let (_, out, _) = call(&["table", "--q", q, "--n-max", "2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"][1]["upper"], 3);
    }
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["table", "--q", "4", "--n-max", "20", "--format", "json"],
        vec!["construct", "--q", "2", "--n", "6"],
        vec!["tower", "--family", "gs-t2", "--p", "2", "--r", "2", "--k-max", "5", "--format", "json"],
        vec!["asymptotic", "--q", "25", "--format", "json"],
    ] {
        assert_eq!(call(&args), call(&args));
    }
}

#[test]
fn construct_compose_verify_round_trip() {
    let k2 = scratch("k2.json");
    let t43 = scratch("toom43.json");
    let out = scratch("f64.json");
    assert_eq!(call(&["construct", "--q", "2", "--n", "2", "--output", k2.to_str().unwrap()]).0, 0);
    assert_eq!(std::fs::read_to_string(&k2).unwrap(), std::fs::read_to_string(fixture("karatsuba_f2_n2.json")).unwrap());
    let (code, json, _) = call(&["construct", "--q", "4", "--n", "3"]);
    assert_eq!(code, 0);
    std::fs::write(&t43, json).unwrap();

    // argument order is detected
    let (code, a, _) = call(&["compose", k2.to_str().unwrap(), t43.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, b, _) = call(&["compose", t43.to_str().unwrap(), k2.to_str().unwrap()]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["rank"], 15);
    assert_eq!(v["n"], 6);
    std::fs::write(&out, &a).unwrap();
    let (code, verdict, _) = call(&["verify", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(verdict, "VALID rank=15 n=6 q=2\n");

    let (code, tower, _) = call(&["compose", k2.to_str().unwrap(), t43.to_str().unwrap(), "--keep-tower-basis"]);
    assert_eq!(code, 0);
    assert!(tower.contains("\"tower\""));
    let tp = scratch("tower.json");
    std::fs::write(&tp, tower).unwrap();
    assert_eq!(call(&["verify", tp.to_str().unwrap()]).0, 0);

    // two decompositions that do not stack
    let (code, _, err) = call(&["compose", k2.to_str().unwrap(), k2.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("mismatch"));
}

#[test]
fn tampered_file_is_invalid() {
    let text = std::fs::read_to_string(fixture("karatsuba_f2_n2.json")).unwrap();
    let tampered = text.replacen("{\"a\":[1,0],\"b\":[1,0],\"c\":[1,1]}", "{\"a\":[1,0],\"b\":[1,0],\"c\":[0,1]}", 1);
    assert_ne!(text, tampered);
    let path = scratch("tampered.json");
    std::fs::write(&path, tampered).unwrap();
    let (code, out, _) = call(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(out, "INVALID basis pair (0,0)\n");
}

#[test]
fn rank_search_outcomes() {
    let (code, out, _) = call(&["rank-search", "--q", "2", "--n", "2", "--r-max", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"], "found");
    assert_eq!(v["rank"], 3);
    let (_, out, _) = call(&["rank-search", "--q", "3", "--n", "2", "--r-max", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"], "exhausted");
    let (_, out, _) = call(&["rank-search", "--q", "2", "--n", "3", "--r-max", "6", "--budget", "10"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"], "aborted");
    assert_eq!(call(&["rank-search", "--q", "2", "--n", "2", "--r-max", "40"]).0, 2);
}

#[test]
fn tower_table_has_tabulated_row() {
    let (code, out, _) = call(&["tower", "--family", "gs-t3", "--p", "5", "--r", "1", "--k-max", "4"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "2,0,10,30,126,6,60,true,pass"), "{out}");
    assert!(out.lines().skip(1).all(|l| !l.ends_with(",fail")));
}

#[test]
fn asymptotic_output() {
    let (code, out, _) = call(&["asymptotic", "--q", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("M_q <= 27/2  proved"));
    assert!(out.contains("m_q >= 88/25"));
    let (_, out, _) = call(&["asymptotic", "--q", "7"]);
    assert!(out.contains("unavailable (MissingAq) [conditional]"));
    let (_, out, _) = call(&["asymptotic", "--q", "7", "--aq", "5/2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entries"][1]["value"], "6/1");
    assert_eq!(v["entries"][1]["conditional"], true);
    assert_eq!(call(&["asymptotic", "--q", "7", "--aq", "x/2"]).0, 2);
}

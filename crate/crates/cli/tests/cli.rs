use std::path::Path;
use std::process::{Command, Output};

fn dcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_queries() {
    let o = dcone(&["bounds", "--d", "5", "--N", "10", "--m", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "applicable: yes, witness n=3 r=6 s=1\n");
    assert_eq!(stdout(&dcone(&["bounds", "--d", "5", "--N", "13", "--m", "2"])), "applicable: no\n");
    assert_eq!(stdout(&dcone(&["bounds", "--sum", "4", "2"])), "S(4,2) = 10 (closed form 10)\n");
    assert_eq!(stdout(&dcone(&["bounds", "--sum", "5", "3"])), "S(5,3) = 15 (closed form 15)\n");
}

#[test]
fn bounds_usage_errors() {
    assert_eq!(code(&dcone(&["bounds", "--d", "5"])), 2);
    assert_eq!(code(&dcone(&["bounds", "--d", "5", "--N", "10", "--m", "2", "--char", "2"])), 2);
    assert_eq!(code(&dcone(&["bounds", "--d", "7", "--N", "4"])), 2);
    assert_eq!(code(&dcone(&["bounds", "--table", "x"])), 2);
    assert_eq!(code(&dcone(&["bounds", "--bogus"])), 2);
    assert_eq!(code(&dcone(&["--json", "bounds", "--sum", "4", "2"])), 2);
}

#[test]
fn bounds_table_json() {
    let o = dcone(&["--json", "--seed", "1", "bounds", "--table", "5-6", "--m", "2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["max_N"], 12);
    assert_eq!(v[1]["max_N"], 28);
    assert_eq!(v[0]["r"], 6);
}

#[test]
fn pipeline_construct_induct_verify() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("s0.json");
    let o = dcone(&["construct", "base", "--n", "3", "--m", "2", "--r", "6", "--d", "5", "--p", "101", "--out", path_str(&s0)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let v = dcone(&["verify", "--state", path_str(&s0), "--seed", "3"]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));

    let mut prev = s0.clone();
    for k in 1..=3 {
        let next = dir.path().join(format!("s{k}.json"));
        let o = dcone(&["induct", "--state", path_str(&prev), "--out", path_str(&next)]);
        assert_eq!(code(&o), 0);
        let v = dcone(&["--json", "--seed", "5", "verify", "--state", path_str(&next)]);
        assert_eq!(code(&v), 0, "{}", stdout(&v));
        let rep: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
        assert_eq!(rep["summary"]["failed"], 0);
        prev = next;
    }
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&prev).unwrap()).unwrap();
    assert_eq!(file["h_poly"], "z1*z2*z3");
    assert_eq!(file["provenance"].as_array().unwrap().len(), 4);

    let o = dcone(&["induct", "--state", path_str(&prev)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no j has e[j] >= 1"));

    let o = dcone(&["induct", "--state", path_str(&s0), "--steps", "4"]);
    assert_eq!(code(&o), 1);
    let o = dcone(&["induct", "--state", path_str(&s0), "--j", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("e[3] = 0"));
}

#[test]
fn verify_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("s0.json");
    dcone(&["construct", "base", "--n", "3", "--m", "2", "--r", "6", "--d", "5", "--p", "101", "--out", path_str(&s0)]);
    let text = std::fs::read_to_string(&s0).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["e"][0] = serde_json::json!(2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = dcone(&["verify", "--state", path_str(&bad), "--trials", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL  divisibility ladder j=1"));

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&dcone(&["verify", "--state", path_str(&bad)])), 2);
}

#[test]
fn skeleton_commands() {
    let o = dcone(&["skeleton", "telescope", "--c", "2", "--r", "2", "--k", "1", "--trials", "10", "--seed", "7"]);
    assert_eq!(stdout(&o), "10/10 pass\n");
    assert_eq!(code(&dcone(&["skeleton", "telescope", "--c", "3", "--r", "4"])), 1);

    let o = dcone(&["skeleton", "coker", "--map", "[[2]]", "--m", "2"]);
    assert_eq!(stdout(&o), "cokernel: Z/2\n2-torsion: yes\n");
    let o = dcone(&["skeleton", "coker", "--map", "[[2]]", "--m", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&dcone(&["skeleton", "coker", "--map", "[[1, -1]]", "--m", "1"])), 0);
    assert_eq!(code(&dcone(&["skeleton", "coker", "--map", "[[1], [2, 3]]", "--m", "1"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(
        &g,
        r#"{"modulus": 2, "vertices": ["0", "1"], "edges": [[0, 1]],
            "ch1": [{"rank": 1}, {"rank": 1}], "ch0": [{"rank": 1}], "ch0_vertex": [{"rank": 1}, {"rank": 1}],
            "inter": [[[[1]], [[1]]]], "push": [[[[1]], [[1]]]]}"#,
    )
    .unwrap();
    let o = dcone(&["skeleton", "subdivide", "--graph", path_str(&g), "--r", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("vertices: 4 (was 2)\nedges: 3 (was 1)\n"));
    let o = dcone(&["skeleton", "transfer", "--graph", path_str(&g), "--c", "2", "--r", "2", "--trials", "20", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    std::fs::write(&g, r#"{"modulus": 2}"#).unwrap();
    assert_eq!(code(&dcone(&["skeleton", "subdivide", "--graph", path_str(&g), "--r", "3"])), 2);
}

#[test]
fn identical_seeds_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("s0.json");
    dcone(&["construct", "base", "--n", "3", "--m", "2", "--r", "6", "--d", "5", "--p", "101", "--out", path_str(&s0)]);
    let run = |args: &[&str]| dcone(args).stdout;
    let verify = ["--json", "--seed", "9", "verify", "--state", path_str(&s0), "--samples", "10"];
    assert_eq!(run(&verify), run(&verify));
    let tel = ["--json", "--seed", "9", "skeleton", "telescope", "--c", "6", "--r", "12", "--k", "3"];
    assert_eq!(run(&tel), run(&tel));
    let build = ["--json", "--seed", "9", "construct", "base", "--n", "2", "--m", "2", "--r", "2", "--d", "5", "--p", "31"];
    assert_eq!(run(&build), run(&build));
}

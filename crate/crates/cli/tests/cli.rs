use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use linecover::{CoverPlan, Instance};

fn linecover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linecover"))
        .args(args)
        .env_remove("LINECOVER_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn objective(out: &Output) -> f64 {
    let text = stdout(out);
    let line = text
        .lines()
        .find(|l| l.starts_with("objective "))
        .expect("objective line");
    line["objective ".len()..].trim().parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_solve_base_class() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let plan = dir.path().join("p.json");
    let gen = linecover(&[
        "generate",
        "--q",
        "10",
        "--s",
        "10",
        "--t",
        "1",
        "--u",
        "0",
        "-o",
        path_str(&inst),
    ]);
    assert!(gen.status.success());

    let bnb = linecover(&[
        "solve",
        path_str(&inst),
        "--method",
        "bnb",
        "--json",
        path_str(&plan),
    ]);
    assert_eq!(bnb.status.code(), Some(0));
    assert!((objective(&bnb) - 77.368).abs() < 1e-3);

    let written: CoverPlan = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!(written.selected_ids(), vec![9, 10]);
    assert!((written.objective - 77.368).abs() < 1e-3);

    let heur = linecover(&["solve", path_str(&inst), "--method", "heuristic"]);
    assert!((objective(&heur) - objective(&bnb)).abs() < 1e-6);
    let oracle = linecover(&["solve", path_str(&inst), "--method", "oracle"]);
    assert!((objective(&oracle) - objective(&bnb)).abs() < 1e-6);

    let parsed: Instance = serde_json::from_str(&fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(parsed.len(), 10);
}

#[test]
fn bnb_and_oracle_agree_on_random_instances() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..6u64 {
        let inst = dir.path().join(format!("r{seed}.json"));
        let q = (4 + seed * 2).to_string();
        let gen = linecover(&[
            "generate",
            "--q",
            &q,
            "--s",
            "10",
            "--t",
            "10",
            "--u",
            "0",
            "--seed",
            &seed.to_string(),
            "--random",
            "-o",
            path_str(&inst),
        ]);
        assert!(gen.status.success());
        let plan_a = dir.path().join("a.json");
        let plan_b = dir.path().join("b.json");
        let a = linecover(&[
            "solve",
            path_str(&inst),
            "--method",
            "bnb",
            "--json",
            path_str(&plan_a),
        ]);
        let b = linecover(&[
            "solve",
            path_str(&inst),
            "--method",
            "oracle",
            "--json",
            path_str(&plan_b),
        ]);
        let pa: CoverPlan = serde_json::from_str(&fs::read_to_string(&plan_a).unwrap()).unwrap();
        let pb: CoverPlan = serde_json::from_str(&fs::read_to_string(&plan_b).unwrap()).unwrap();
        assert!((pa.objective - pb.objective).abs() <= 1e-9 * pb.objective);
        assert!((objective(&a) - objective(&b)).abs() <= 1e-6);
    }
}

#[test]
fn uniform_method() {
    let dir = tempfile::tempdir().unwrap();
    let same = dir.path().join("same.json");
    let discs: Vec<String> = (1..=10)
        .map(|id| format!(r#"{{"id":{id},"f":1,"b":16}}"#))
        .collect();
    fs::write(
        &same,
        format!(
            r#"{{"version":1,"length":1,"discs":[{}]}}"#,
            discs.join(",")
        ),
    )
    .unwrap();
    let out = linecover(&["solve", path_str(&same), "--method", "uniform"]);
    assert!(out.status.success());
    // F(k) = k + 16/k is smallest at k = 4
    assert!((objective(&out) - 8.0).abs() < 1e-9);
    assert_eq!(stdout(&out).matches("disc ").count(), 4);

    let mixed = dir.path().join("mixed.json");
    fs::write(
        &mixed,
        r#"{"version":1,"length":1,"discs":[{"id":1,"f":1,"b":1},{"id":2,"f":2,"b":1}]}"#,
    )
    .unwrap();
    let out = linecover(&["solve", path_str(&mixed), "--method", "uniform"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"version":1,"length":1,"discs":[{"id":1,"f":1,"b":2},{"id":2,"f":"x","b":1}]}"#,
    )
    .unwrap();
    let out = linecover(&["solve", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("discs[1].f"));

    fs::write(
        &bad,
        r#"{"version":1,"length":1,"discs":[{"id":1,"f":1,"b":-2}]}"#,
    )
    .unwrap();
    let out = linecover(&["solve", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(".b"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(linecover(&["nonsense"]).status.code(), Some(1));
    assert_eq!(linecover(&["solve"]).status.code(), Some(1));
    assert_eq!(
        linecover(&["solve", "x.json", "--method", "simplex"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(linecover(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i.json");
    let bad_u = linecover(&[
        "generate",
        "--q",
        "5",
        "--s",
        "1",
        "--t",
        "1",
        "--u",
        "4",
        "-o",
        path_str(&out),
    ]);
    assert_eq!(bad_u.status.code(), Some(1));
}

#[test]
fn timeout_exits_two_and_still_writes_plan() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.json");
    let plan = dir.path().join("plan.json");
    let gen = linecover(&[
        "generate",
        "--q",
        "80",
        "--s",
        "1",
        "--t",
        "1",
        "--seed",
        "11",
        "--random",
        "-o",
        path_str(&inst),
    ]);
    assert!(gen.status.success());
    let out = linecover(&[
        "solve",
        path_str(&inst),
        "--time-limit",
        "0.000001",
        "--json",
        path_str(&plan),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let written: CoverPlan = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    assert!((written.covered_length() - 1.0).abs() < 1e-9);
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str, env: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_linecover"));
        cmd.args([
            "generate",
            "--q",
            "12",
            "--s",
            "1",
            "--t",
            "1",
            "--random",
            "--seed",
            seed,
            "-o",
            path_str(&path),
        ]);
        match env {
            Some(v) => cmd.env("LINECOVER_SEED", v),
            None => cmd.env_remove("LINECOVER_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        fs::read_to_string(path).unwrap()
    };
    let from_flag = run("a.json", "7", None);
    let from_env = run("b.json", "1", Some("7"));
    let other = run("c.json", "1", None);
    assert_eq!(from_flag, from_env);
    assert_ne!(from_flag, other);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let classes = dir.path().join("classes.json");
    let csv = dir.path().join("out.csv");
    fs::write(&classes, r#"[{"q":10,"s":10,"t":1,"u":0},{"q":8,"s":1,"t":10,"u":2,"seed":3,"deterministic":false}]"#)
        .unwrap();
    let out = linecover(&[
        "bench",
        "--classes",
        path_str(&classes),
        "--reps",
        "2",
        "--time-limit",
        "30",
        "--csv",
        path_str(&csv),
        "--jobs",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    let mut reader = csv_rows(&text);
    let header = reader.remove(0);
    assert_eq!(
        header.join(","),
        "class_q,class_s,class_t,class_u,seed,rep,wall_time_s,nodes,depth,ub_root,opt,lb_root,gap"
    );
    assert_eq!(reader.len(), 6);
    assert!((reader[0][10].parse::<f64>().unwrap() - 77.368).abs() < 1e-3);
    assert_eq!(&reader[2][4..6], ["-", "avg"]);
    assert_eq!(&reader[4][4..6], ["4", "1"]);

    fs::write(&classes, "[]").unwrap();
    let out = linecover(&[
        "bench",
        "--classes",
        path_str(&classes),
        "--reps",
        "1",
        "--csv",
        path_str(&csv),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const APPENDIX: [&str; 8] = [
    "--chi0",
    "-0.811597",
    "--chiinf",
    "-0.0550042",
    "--cauchy",
    "0.833651:0.288298:0.374531",
    "--span",
    "0.01:2",
];

fn p3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p3"))
        .args(args)
        .output()
        .expect("runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn anchor(extra: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = [
        "--t0",
        "0.511115",
        "--sgn",
        "+1",
        "--lam3",
        "-9.01149",
        "--chi0",
        "-0.811597",
        "--chiinf",
        "-0.0550042",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run(cmd: &str, args: &[String]) -> Output {
    let mut all = vec![cmd];
    all.extend(args.iter().map(String::as_str));
    p3(&all)
}

#[test]
fn expand_root_order_zero() {
    let v = json(&run("expand-root", &anchor(&["--order", "0"])));
    let c = v["coeffs"].as_array().unwrap();
    assert_eq!(c.len(), 4);
    assert_eq!(c[1].as_f64(), Some(1.0));
    assert_eq!(c[3].as_f64(), Some(-9.01149));
}

#[test]
fn expand_pole_constant_term() {
    let v = json(&run("expand-pole", &anchor(&["--order", "4"])));
    let d0 = v["regular_coeffs"][0].as_f64().unwrap();
    assert!((d0 - (1.0 - 0.0550042) / 2.0).abs() < 1e-15);
    assert_eq!(v["residue"].as_f64(), Some(0.511115));
}

#[test]
fn expand_writes_record_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("series.json");
    let o = run("expand-root", &anchor(&["--out", out.to_str().unwrap()]));
    assert!(o.status.success());
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec["valid_order"].as_u64(), Some(8));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with("t,lambda\n"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn find_roots_on_the_appendix_solution() {
    let mut args = vec!["find-roots"];
    args.extend(APPENDIX);
    let v = json(&p3(&args));
    let roots: Vec<f64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["t0"].as_f64().unwrap())
        .collect();
    let published = [0.0159082, 0.0427774, 0.0901638, 0.242530, 0.511115, 1.38175];
    assert_eq!(roots.len(), 6);
    for (a, b) in roots.iter().zip(published) {
        assert!((a - b).abs() < 1e-3);
    }
}

#[test]
fn lam3_at_the_largest_roots() {
    for (t, want) in [("0.51", -9.01149), ("1.38", 1.24246)] {
        let mut args = vec!["lam3", "--t0", t];
        args.extend(APPENDIX);
        let v = json(&p3(&args));
        let got = v[0]["lam3"].as_f64().unwrap();
        assert!(((got - want) / want).abs() < 1e-2, "{got}");
    }
}

#[test]
fn root_free_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dense.csv");
    let args = [
        "integrate",
        "--chi0",
        "0.5",
        "--chiinf",
        "0.5",
        "--cauchy",
        "1:1.2:0.4",
        "--span",
        "0.5:1.5",
        "--out",
        out.to_str().unwrap(),
    ];
    assert!(p3(&args).status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,lambda,lambda_dot\n"));
    let v = json(&p3(&[
        "find-roots",
        "--chi0",
        "0.5",
        "--chiinf",
        "0.5",
        "--cauchy",
        "1:1.2:0.4",
        "--span",
        "0.5:1.5",
    ]));
    assert_eq!(v, Value::Array(vec![]));
}

#[test]
fn invalid_flags_exit_2() {
    for extra in [["--t0", "0"], ["--sgn", "2"], ["--span", "1"]] {
        let mut args = anchor(&[]);
        args.extend(extra.iter().map(|s| s.to_string()));
        let o = run("expand-root", &args);
        assert_eq!(o.status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(p3(&["expand-root", "--chi0", "0"]).status.code(), Some(2));
    assert_eq!(p3(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn failed_integration_exits_1() {
    // the equation is singular where λ = 0
    let o = p3(&[
        "integrate",
        "--chi0",
        "0",
        "--chiinf",
        "0",
        "--cauchy",
        "1:0:1",
        "--span",
        "0.5:4",
    ]);
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "t0 = 0.511115\nsgn = \"+1\"\nlam3 = -9.01149\nchi0 = -0.811597\nchiinf = -0.0550042\norder = 2\n").unwrap();
    let v = json(&p3(&["expand-root", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["valid_order"].as_u64(), Some(5));
    let v = json(&p3(&[
        "expand-root",
        "--config",
        cfg.to_str().unwrap(),
        "--order",
        "4",
    ]));
    assert_eq!(v["valid_order"].as_u64(), Some(7));
}

#[test]
fn bounds_are_consistent() {
    let v = json(&run("bounds", &anchor(&["--alpha", "0.5"])));
    let (beta, at) = (
        v["beta"].as_f64().unwrap(),
        v["alpha_tilde"].as_f64().unwrap(),
    );
    assert!(beta >= v["q1"].as_f64().unwrap().max(v["q2"].as_f64().unwrap()));
    assert!(at * beta <= 0.5 + 1e-12);
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn reproduce_appendix_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = p3(&["reproduce-appendix", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files = read_all(&a);
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "roots.json"]
    );
    assert_eq!(files, read_all(&b));
    let fig4 = String::from_utf8(files[3].1.clone()).unwrap();
    assert!(fig4.starts_with("t,series_plus,series_minus,lambda\n"));
    assert!(fig4.lines().skip(1).all(|l| l.split(',').count() == 4));
    let roots: Value = serde_json::from_slice(&files[4].1).unwrap();
    assert_eq!(roots["roots"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_passes_with_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = p3(&["verify", "--out", out.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .all(|o| o["passed"] == Value::Bool(true)));
}

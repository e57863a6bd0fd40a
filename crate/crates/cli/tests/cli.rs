use std::path::Path;
use std::process::{Command, Output};

use nesy_verify::circuit::parse_circuit;
use nesy_verify::nn::load_weights;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nesy-verify"))
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

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn compile_driving_formula() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("driving.txt");
    std::fs::write(&f, "((red_light | car_in_front) -> brake) & (accelerate <-> !brake)\n").unwrap();
    let out = dir.path().join("driving.ac");
    let o = bin(&["compile", p(&f), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("WMC(0.5-weights) = 0.3125"), "{s}");
    assert!(s.contains("models: 5"));
    let c = parse_circuit(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // Leaves follow first appearance: red_light, car_in_front, brake, accelerate.
    let v = c.eval(&[0.6, 0.8, 0.7, 0.3]).unwrap()[0];
    assert!((v - 0.4972).abs() < 1e-12);

    let o = bin(&["compile", p(&f), "--out", p(&out), "--order", "brake,accelerate"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("WMC(0.5-weights) = 0.3125"));
    let o = bin(&["compile", p(&f), "--order", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compile_unsat_and_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    std::fs::write(&f, "a & !a").unwrap();
    let o = bin(&["compile", p(&f)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("WMC(0.5-weights) = 0\n"));
    assert!(stderr(&o).contains("unsatisfiable"));
    let c = parse_circuit(&std::fs::read_to_string(dir.path().join("bad.ac")).unwrap()).unwrap();
    assert_eq!(c.eval(&[0.3]).unwrap(), vec![0.0]);

    let cnf = dir.path().join("f.cnf");
    std::fs::write(&cnf, "c example\np cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    let o = bin(&["compile", p(&cnf)]);
    assert!(o.status.success(), "{}", stderr(&o));
    // Models of (x1 | !x2) & (x2 | x3): 4 of 8.
    assert!(stdout(&o).contains("WMC(0.5-weights) = 0.5"));
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let o = bin(&["compile", "/nonexistent/formula.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no such file"));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    std::fs::write(&f, "a & (b |").unwrap();
    assert_eq!(bin(&["compile", p(&f)]).status.code(), Some(2));

    let o = bin(&["verify", "--manifest", "/nonexistent.toml", "--dataset", "/x.json", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no such file"));
    assert_eq!(bin(&["bench-addition", "--digits", "9"]).status.code(), Some(2));
    assert_eq!(bin(&["emajsat-check", "--max-n", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn emajsat_check_agrees_and_is_seeded() {
    let o = bin(&["emajsat-check", "--count", "200", "--max-n", "4", "--max-m", "6", "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("200/200 agree\n"));
    assert!(stdout(&o).contains("two-variable sweep: 16/16 agree"));
    let again = bin(&["emajsat-check", "--count", "200", "--max-n", "4", "--max-m", "6", "--seed", "3"]);
    assert_eq!(o.stdout, again.stdout);
}

fn without_runtime(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn setup_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys");
    let o = bin(&["setup-addition", "--digits", "2", "--samples", "12", "--seed", "1", "--out", p(&sys)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["system.toml", "dataset.json", "digit.json", "sum2.ac", "test-images.idx", "test-labels.idx"] {
        assert!(sys.join(f).exists(), "{f}");
    }
    assert_eq!(load_weights(sys.join("digit.json")).unwrap().output_size(), 10);

    let reports = dir.path().join("reports");
    let args = |out: &Path| {
        vec![
            "verify".to_string(),
            "--manifest".into(),
            p(&sys.join("system.toml")).into(),
            "--dataset".into(),
            p(&sys.join("dataset.json")).into(),
            "--eps".into(),
            "1e-5,3.1623e-5,1e-4,3.1623e-4,1e-3".into(),
            "--exact-symbolic".into(),
            "--out".into(),
            p(out).into(),
        ]
    };
    let run = |out: &Path| {
        let a = args(out);
        bin(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let o = run(&reports);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert!(lines[0].starts_with("eps,robustness_pct"));
    assert_eq!(lines.len(), 6);
    let robust: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(robust.windows(2).all(|w| w[1] <= w[0]), "{robust:?}");
    let exact_robust: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert!(robust.iter().zip(&exact_robust).all(|(r, e)| e >= r));

    for method in ["relaxed", "exact"] {
        for eps in ["1e-5", "1e-3"] {
            assert!(reports.join(format!("{method}_eps{eps}.json")).exists());
        }
    }
    let csv = std::fs::read_to_string(reports.join("relaxed_eps1e-3.csv")).unwrap();
    assert!(csv.starts_with("sample_id,status,lower_correct,upper_correct,runtime_s\n"));
    assert_eq!(csv.lines().count(), 13);

    let again = dir.path().join("again");
    assert!(run(&again).status.success());
    let a = std::fs::read_to_string(again.join("exact_eps1e-4.csv")).unwrap();
    let b = std::fs::read_to_string(reports.join("exact_eps1e-4.csv")).unwrap();
    assert_eq!(without_runtime(&a), without_runtime(&b));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"format":"nesy-dataset/1","samples":[]}"#).unwrap();
    let o = bin(&["verify", "--manifest", p(&sys.join("system.toml")), "--dataset", p(&empty), "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));

    // Digits can come from IDX files; a label file is not an image file.
    let o = bin(&[
        "setup-addition",
        "--digits",
        "1",
        "--samples",
        "3",
        "--weights",
        p(&sys.join("digit.json")),
        "--images",
        p(&sys.join("test-labels.idx")),
        "--labels",
        p(&sys.join("test-labels.idx")),
        "--out",
        p(&dir.path().join("bad")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not an IDX image file"));
    let o = bin(&[
        "setup-addition",
        "--digits",
        "3",
        "--samples",
        "3",
        "--weights",
        p(&sys.join("digit.json")),
        "--images",
        p(&sys.join("test-images.idx")),
        "--labels",
        p(&sys.join("test-labels.idx")),
        "--out",
        p(&dir.path().join("idx")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("idx/sum3.ac").exists());
}

#[test]
fn train_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let o = bin(&["train", "--epochs", "2", "--seed", "5", "--out", p(&w)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let acc: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("held-out accuracy: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(acc > 0.8, "{acc}");

    let csv = dir.path().join("bench.csv");
    let o = bin(&[
        "bench-addition",
        "--digits",
        "1,2",
        "--eps",
        "1e-4,1e-3",
        "--samples",
        "5",
        "--repeats",
        "1",
        "--weights",
        p(&w),
        "--out",
        p(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "digits,eps,method,mean_runtime_s,robustness_pct,completed_fraction");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].starts_with("1,1e-4,relaxed,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",1.0000")));
}

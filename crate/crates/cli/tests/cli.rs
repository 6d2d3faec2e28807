use std::path::Path;
use std::process::{Command, Output};

use opcone::matcore::parse_matrix;

fn opcone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcone"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn eval(spec: &str, a: &str, b: &str, dir: &Path) -> Output {
    write(dir, "a.txt", a);
    write(dir, "b.txt", b);
    opcone(
        &["eval", "--spec", spec, "--A", "a.txt", "--B", "b.txt"],
        dir,
    )
}

#[test]
fn eval_golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let o = eval("mean harmonic", "dim 1\n1\n", "dim 1\n3\n", d);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "dim 1\n1.5\n");

    let o = eval(
        "mean arithmetic",
        "dim 2\n1 0\n0 1\n",
        "dim 2\n3 0\n0 3\n",
        d,
    );
    assert_eq!(stdout(&o), "dim 2\n2 0\n0 2\n");

    // δ₁ represents the harmonic mean, which fixes I
    write(d, "m.txt", "atom 1 1\n");
    let o = eval("measure m.txt", "dim 2\n1 0\n0 1\n", "dim 2\n1 0\n0 1\n", d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = parse_matrix::<f64>(&stdout(&o)).unwrap();
    assert!(
        m.distance(opcone::Matrix::identity(2).as_hermitian())
            .unwrap()
            < 1e-12
    );
}

#[test]
fn norm_convert_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = opcone(&["norm", "--spec", "scale 3 mean harmonic"], d);
    assert_eq!(stdout(&o), "3.000000000000\n");
    let o = opcone(&["convert", "function", "--spec", "mean harmonic"], d);
    assert_eq!(stdout(&o), "moebius 1\n");
    let o = opcone(&["convert", "measure", "--spec", "mean arithmetic"], d);
    assert_eq!(stdout(&o), "atom0 0.5\natomInf 0.5\n");

    let o = opcone(&["catalog"], d);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(
        text.contains("mean harmonic") && text.contains("moebius 1") && text.contains("atom 1 1")
    );
    assert!(text.contains("mean geometric\tf: power 0.5\tmu: density geometric 1\n"));
}

#[test]
fn default_verification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = opcone(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("44/44 properties passed\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |o: &Output| o.status.code().unwrap();

    let o = opcone(&["norm", "--spec", "mean quadratic"], d);
    assert_eq!(code(&o), 2);
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);
    assert_eq!(code(&opcone(&["norm"], d)), 2);
    assert_eq!(
        code(&opcone(
            &["eval", "--spec", "parallel", "--A", "none.txt", "--B", "none.txt"],
            d
        )),
        2
    );
    assert_eq!(code(&eval("parallel", "dim 1\n1\n", "dim 1\nx\n", d)), 2);

    let o = eval("mean geometric", "dim 1\n1\n", "dim 2\n1 0\n0 1\n", d);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));

    assert_eq!(
        code(&eval("mean geometric", "dim 1\n-1\n", "dim 1\n1\n", d)),
        4
    );

    let o = opcone(&["convert", "measure", "--spec", "function power 0.3"], d);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no representing measure"));

    assert_eq!(code(&opcone(&["verify", "axioms", "--dims", "3"], d)), 2);
    assert_eq!(
        code(&opcone(&["verify", "axioms", "--tol", "wrong=1"], d)),
        2
    );
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &'static str| {
        vec![
            "verify", "norms", "--seed", "7", "--trials", "20", "--dims", "1:3", "--format", "csv",
            "--out", out,
        ]
    };
    let first = opcone(&args("one.csv"), d);
    assert_eq!(first.status.code(), Some(0));
    assert!(opcone(&args("two.csv"), d).status.success());
    let one = std::fs::read(d.join("one.csv")).unwrap();
    assert_eq!(one, std::fs::read(d.join("two.csv")).unwrap());
    assert!(String::from_utf8(one)
        .unwrap()
        .starts_with("property,anchor,trials,worst_residual,pass\n"));

    let o = opcone(&["verify", "loewner", "--tol", "loewner=1e-6"], d);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("1/1 properties passed\n"));
}

#[test]
fn converted_function_reproduces_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = "dim 3\n2 1 0\n1 3 0.5\n0 0.5 1\n";
    let b = "dim 3\n1 0 0.2\n0 2 0\n0.2 0 4\n";
    for spec in [
        "mean arithmetic",
        "mean geometric",
        "mean harmonic",
        "parallel",
        "mean logarithmic",
    ] {
        let f = stdout(&opcone(&["convert", "function", "--spec", spec], d));
        let direct = parse_matrix::<f64>(&stdout(&eval(spec, a, b, d))).unwrap();
        let routed = eval(&format!("function {}", f.trim()), a, b, d);
        assert!(
            routed.status.success(),
            "{spec}: {}",
            String::from_utf8_lossy(&routed.stderr)
        );
        let routed = parse_matrix::<f64>(&stdout(&routed)).unwrap();
        assert!(direct.distance(&routed).unwrap() <= 1e-8, "{spec} via {f}");
    }
}

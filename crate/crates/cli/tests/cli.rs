use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfpauli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn coefficient(line: &str) -> (f64, f64) {
    let z = line.split_whitespace().nth(1).unwrap();
    let body = z.strip_suffix('i').unwrap();
    let k = (1..body.len())
        .rev()
        .find(|&k| matches!(&body[k..k + 1], "+" | "-") && !matches!(&body[k - 1..k], "e"))
        .unwrap();
    (body[..k].parse().unwrap(), body[k..].parse().unwrap())
}

fn nonzero_slots(text: &str) -> Vec<usize> {
    text.lines()
        .filter(|l| l.starts_with('X'))
        .enumerate()
        .filter(|(_, l)| {
            let (re, im) = coefficient(l);
            re.hypot(im) > 1e-12
        })
        .map(|(k, _)| k + 1)
        .collect()
}

fn residual(text: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with("residual ")).unwrap();
    line["residual ".len()..].parse().unwrap()
}

#[test]
fn verify_all_passes_with_enough_checks() {
    let o = run(&["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("CHECK ")).count() >= 40);
    assert!(out.lines().all(|l| l.starts_with("CHECK ") && l.split(' ').count() == 4));
    assert!(!out.contains(" FAIL "));
}

#[test]
fn verify_group_reports_p2_order() {
    let o = run(&["verify", "group"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "CHECK p2_order_64 PASS 0.000e0"));
}

#[test]
fn verify_xbasis_flags_printed_lists_as_info() {
    let o = run(&["verify", "xbasis"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for name in ["ls_printed_slot9_diff", "ht_printed_slot6_diff", "ht_printed_slot12_diff"] {
        assert!(out.contains(&format!("CHECK {name} INFO ")), "{name}");
    }
    assert!(out.contains("CHECK ls_nonzero_slots PASS"));
}

#[test]
fn verify_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o1 = run(&["verify", "--seed", "7", "--out", a.to_str().unwrap()]);
    let o2 = run(&["verify", "--seed", "7", "--out", b.to_str().unwrap()]);
    assert_eq!(code(&o1), 0);
    assert_eq!(o1.stdout, o2.stdout);
    let csv = fs::read(&a).unwrap();
    assert_eq!(csv, fs::read(&b).unwrap());
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().next(), Some("name,status,max_abs_error"));
    assert_eq!(csv.lines().count(), stdout(&o1).lines().count() + 1);
}

#[test]
fn verify_usage_errors() {
    assert_eq!(code(&run(&["verify", "everything"])), 2);
    assert_eq!(code(&run(&["verify", "--bogus"])), 2);
    assert_eq!(code(&run(&["verify", "--seed", "x"])), 2);
    assert_eq!(code(&run(&["verify", "group", "--theta", "1"])), 2);
    let o = run(&["verify", "group", "--theta", "0", "--delta", "1", "--omega", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("degenerate"));
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn verify_extra_points_and_sweep() {
    let o = run(&["verify", "group", "--theta", "0.3", "--delta", "-0.4", "--omega", "1.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("CHECK point_fermion_car PASS"));

    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.txt");
    fs::write(&sweep, "# theta delta omega\n0 0 1\n1.5707963267948966 0.5 2\n").unwrap();
    let o = run(&["verify", "group", "--sweep", sweep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("CHECK sweep2_biorthogonality PASS"));
    assert!(stdout(&o).contains("CHECK sweep3_metric_inverse_pair PASS"));

    fs::write(&sweep, "0 0\n").unwrap();
    assert_eq!(code(&run(&["verify", "group", "--sweep", sweep.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&run(&["verify", "group", "--sweep", missing.to_str().unwrap()])), 3);
}

#[test]
fn verify_out_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/summary.csv");
    assert_eq!(code(&run(&["verify", "group", "--out", bad.to_str().unwrap()])), 3);
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,re_Q1,im_Q1,re_Q2,im_Q2,re_dQ1,im_dQ1,re_dQ2,im_dQ2")
    );
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn simulate_oscillator_returns_after_one_period() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&[
        "simulate", "S", "--alpha", "1", "--mu", "0", "--gamma", "0", "--psi0", "1,0,0,0",
        "--t-end", "6.283185", "--steps", "1000", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&csv);
    assert_eq!(rows.len(), 1000);
    let last = &rows[999];
    let want = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert!(last[1..].iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-6));
    assert!(residual(&stdout(&o)) <= 1e-4);
}

#[test]
fn simulate_t_writes_rows_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let args = [
        "simulate", "T", "--b", "1", "--d", "0.5", "--r", "0.2", "--psi0", "1,0,0.5i,-1e-1-i",
        "--t-end", "5", "--steps", "1000", "--out", csv.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&csv);
    assert_eq!(rows.len(), 1000);
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5, -0.1, -1.0]);
    assert!(residual(&stdout(&o)).is_finite());

    let first = fs::read(&csv).unwrap();
    let again = run(&args);
    assert_eq!(o.stdout, again.stdout);
    assert_eq!(first, fs::read(&csv).unwrap());
}

#[test]
fn simulate_to_stdout() {
    let o = run(&["simulate", "S", "--t-end", "1", "--steps", "11"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 11 + 1);
    assert!(out.lines().last().unwrap().starts_with("residual "));
}

#[test]
fn simulate_errors() {
    assert_eq!(code(&run(&["simulate", "S", "--t-end", "1", "--steps", "1"])), 2);
    assert_eq!(code(&run(&["simulate", "S", "--t-end", "0", "--steps", "10"])), 2);
    assert_eq!(code(&run(&["simulate", "S", "--t-end", "1", "--steps", "10", "--psi0", "1,0"])), 2);
    assert_eq!(code(&run(&["simulate", "S", "--t-end", "1", "--steps", "10", "--psi0", "1,0,0,x"])), 2);
    assert_eq!(code(&run(&["simulate", "U", "--t-end", "1", "--steps", "10"])), 2);

    let o = run(&["simulate", "S", "--gamma", "80", "--t-end", "100", "--steps", "10"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("overflowed at t = "));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing/out.csv");
    let o = run(&["simulate", "S", "--t-end", "1", "--steps", "10", "--out", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn decompose_ls_slots() {
    let o = run(&["decompose", "LS", "--alpha", "1", "--mu", "1", "--gamma", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    // alpha_1 = (1 - alpha) / 2 vanishes at alpha = 1.
    assert_eq!(nonzero_slots(&out), vec![2, 4, 7, 9, 10]);
    assert!(residual(&out) <= 1e-12);
    assert!(out.lines().any(|l| l.starts_with("X9 ") && l.ends_with(" INFO")));
    assert!(stderr(&o).is_empty());

    let o = run(&["decompose", "LS", "--alpha", "0.5", "--mu", "-1", "--gamma", "2"]);
    assert_eq!(nonzero_slots(&stdout(&o)), vec![1, 2, 4, 7, 9, 10]);
}

#[test]
fn decompose_ht_slots() {
    let o = run(&["decompose", "HT", "--b", "1", "--d", "1", "--r", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(nonzero_slots(&out), vec![1, 5, 11, 12]);
    assert!(residual(&out) <= 1e-12);
    let flagged: Vec<&str> = out
        .lines()
        .filter(|l| l.ends_with(" INFO"))
        .map(|l| l.split(' ').next().unwrap())
        .collect();
    assert_eq!(flagged, ["X6", "X12"]);
}

#[test]
fn decompose_files() {
    let dir = tempfile::tempdir().unwrap();
    let id4 = dir.path().join("id4.txt");
    fs::write(&id4, "1,0,0,0,\n0,1,0,0,\n0,0,1,0,\n0,0,0,1\n").unwrap();
    let o = run(&["decompose", "file", id4.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(residual(&stdout(&o)) > 0.5);
    assert!(stderr(&o).contains("warning"));

    let x9 = dir.path().join("x9.txt");
    fs::write(&x9, "0,0,0,-i,0,0,-i,0,0,i,0,0,i,0,0,0").unwrap();
    let o = run(&["decompose", "file", x9.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(nonzero_slots(&stdout(&o)), vec![9]);
    assert!(stderr(&o).is_empty());

    let short = dir.path().join("short.txt");
    fs::write(&short, "1,2,3").unwrap();
    assert_eq!(code(&run(&["decompose", "file", short.to_str().unwrap()])), 2);
    let junk = dir.path().join("junk.txt");
    fs::write(&junk, "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,1+2j").unwrap();
    assert_eq!(code(&run(&["decompose", "file", junk.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&run(&["decompose", "file", missing.to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["decompose", "file"])), 2);
    assert_eq!(code(&run(&["decompose", "LX"])), 2);
}

#[test]
fn commutant_cases() {
    let o = run(&["commutant"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("equations 192\ndimension 1\nbasis1 1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1\n"));
    let o = run(&["commutant", "3"]);
    assert!(stdout(&o).contains("dimension 8"));
    let o = run(&["commutant", "1,2"]);
    assert!(stdout(&o).contains("matrices X1,X2"));
    assert_eq!(code(&run(&["commutant", "13"])), 2);
    assert_eq!(code(&run(&["commutant", "x"])), 2);
}

#[test]
fn group_presets_and_files() {
    let o = run(&["group", "--preset", "p1"]);
    assert!(stdout(&o).contains("order 16\n"));
    let p2 = run(&["group"]);
    assert!(stdout(&p2).contains("order 64\n"));
    let x = run(&["group", "--preset", "x"]);
    let elems = |o: &Output| stdout(o).lines().find(|l| l.starts_with("elements")).unwrap().to_owned();
    assert_eq!(elems(&p2), elems(&x));

    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.txt");
    fs::write(&gens, "# anticommuting pair\nXI\nZI\n").unwrap();
    let o = run(&["group", gens.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("order 8\n"));

    fs::write(&gens, "XQ\n").unwrap();
    assert_eq!(code(&run(&["group", gens.to_str().unwrap()])), 2);
    fs::write(&gens, "X\nXX\n").unwrap();
    assert_eq!(code(&run(&["group", gens.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&run(&["group", missing.to_str().unwrap()])), 3);
}

use std::path::Path;
use std::process::{Command, Output};

fn wavepole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavepole"))
        .args(args)
        .output()
        .expect("run wavepole")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV, split into cells.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let header: Vec<&str> = csv.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    rows(csv).into_iter().map(|r| r[i].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn bind_well_single_level() {
    let o = wavepole(&["bind", "--potential", "well", "--U0", "2.8", "--a", "1.0"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let alpha = column(&csv, "alpha");
    assert_eq!(alpha.len(), 1);
    assert!((num(&alpha[0]) - 0.159).abs() < 1e-3);
    let closed = num(&column(&csv, "closed_form_alpha")[0]);
    assert!((num(&alpha[0]) - closed).abs() < 1e-8);
}

#[test]
fn bind_well_virtual_level() {
    let o = wavepole(&["bind", "--potential", "well", "--U0", "21.913", "--a", "1.0", "--virtual"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let virt: Vec<f64> = rows(&csv)
        .iter()
        .filter(|r| r[1] == "virtual")
        .map(|r| num(&r[2]))
        .collect();
    assert!((virt[0] + 0.159).abs() < 1e-3, "{virt:?}");
}

#[test]
fn bind_bargmann_has_one_state() {
    let o = wavepole(&["bind", "--potential", "bargmann", "--beta", "1.0", "--alphab", "0.1"]);
    let alpha = column(&stdout(&o), "alpha");
    assert_eq!(alpha.len(), 1);
    assert!((num(&alpha[0]) - 0.1).abs() < 1e-6);
}

#[test]
fn crossover_bargmann() {
    let o = wavepole(&["crossover", "--potential", "bargmann", "--beta", "1.0", "--alphab", "0.1", "--k", "0.1"]);
    assert!(o.status.success());
    let r = num(&column(&stdout(&o), "r_star")[0]);
    assert!((r - 1.522).abs() < 0.01, "{r}");
}

#[test]
fn coulomb_series_matches_closed_form() {
    let o = wavepole(&["coulomb", "--eta", "1", "--terms", "10000"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(num(&column(&csv, "completed_difference")[0]) < 1e-4);
    let raw = num(&column(&csv, "raw_difference")[0]);
    assert!(raw <= num(&column(&csv, "tail_bound")[0]));
}

#[test]
fn coulomb_pole_decomposition_mode() {
    let o = wavepole(&["coulomb", "--kappa", "1", "--k", "0.5,1.0"]);
    let csv = stdout(&o);
    assert_eq!(rows(&csv).len(), 2);
    for v in column(&csv, "completed_residual") {
        assert!(num(&v) < 1e-4);
    }
}

#[test]
fn ratio_reports_sign_flag() {
    let o = wavepole(&["ratio", "--potential", "well", "--U0", "2.8", "--r", "0"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l.starts_with("# R1(0)_sign: ")));
    assert!(num(&column(&csv, "R1")[0]) > 0.0);
}

#[test]
fn scatter_matches_closed_form() {
    let o = wavepole(&["scatter", "--potential", "well", "--U0", "2.8", "--k", "0.2,1.0"]);
    let csv = stdout(&o);
    for (d, c) in column(&csv, "delta").iter().zip(column(&csv, "closed_form_delta")) {
        assert!((num(d) - num(&c)).abs() < 1e-6);
    }
}

#[test]
fn perturb_table_has_one_row_per_eps() {
    let o = wavepole(&["perturb", "--potential", "well", "--U0", "2.8", "--eps", "0.02,0.01", "--k", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    let de: Vec<f64> = column(&csv, "dE_first_order").iter().map(|s| num(s)).collect();
    assert_eq!(de.len(), 2);
    assert!((de[0] / de[1] - 2.0).abs() < 1e-9);
}

#[test]
fn output_is_deterministic_and_carries_provenance() {
    let args = ["scatter", "--potential", "bargmann", "--beta", "1.0", "--alphab", "0.1", "--k", "0.1,0.3"];
    let a = stdout(&wavepole(&args));
    let b = stdout(&wavepole(&args));
    assert_eq!(a, b);
    assert!(a.starts_with("# wavepole: "));
    assert!(a.lines().any(|l| l.starts_with("# scenario_sha256: ")));
    assert!(a.lines().any(|l| l.starts_with("# grid: step=0.001")));
}

#[test]
fn flags_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ini");
    std::fs::write(&path, "[potential]\nkind = well\ndepth = 22.547\nradius = 1.0\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file = stdout(&wavepole(&["bind", "--scenario", p]));
    assert_eq!(rows(&from_file).len(), 2);
    let overridden = stdout(&wavepole(&["bind", "--scenario", p, "--U0", "2.8"]));
    assert_eq!(rows(&overridden).len(), 1);
    let plain = stdout(&wavepole(&["bind", "--potential", "well", "--U0", "2.8", "--a", "1.0"]));
    assert_eq!(overridden, plain);
}

#[test]
fn fig1_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("case3.csv");
    let svg = dir.path().join("case3.svg");
    let o = wavepole(&[
        "fig1",
        "--case",
        "3",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let data = rows(&text);
    assert_eq!(data.len(), 301);
    assert!(data.iter().all(|r| r[1].is_empty() && r.len() == 6));
    let svg = std::fs::read_to_string(Path::new(&svg)).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| wavepole(args).status.code().unwrap();
    assert_eq!(code(&["bind", "--potential", "gaussian", "--height", "1"]), 2);
    assert_eq!(code(&["bind", "--potential", "nope"]), 3);
    assert_eq!(code(&["bind", "--potential", "well"]), 3);
    assert_eq!(code(&["fig1", "--case", "7"]), 3);
    assert_eq!(code(&["bogus"]), 3);
    assert_eq!(code(&["bind", "--scenario", "/nonexistent/scenario.ini"]), 4);
    assert_eq!(
        code(&["bind", "--potential", "well", "--U0", "2.8", "--out", "/nonexistent/dir/x.csv"]),
        4
    );
}

#[test]
fn thread_count_variable() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_wavepole"))
            .args(["coulomb", "--eta", "0.5"])
            .env("WAVEPOLE_THREADS", v)
            .output()
            .unwrap()
    };
    assert!(run("2").status.success());
    assert_eq!(run("zero").status.code(), Some(3));
}

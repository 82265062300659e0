use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kac_core::cli::{parse_header, RunConfig, Verb};

fn kac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kac"))
        .args(args)
        .env_remove("KAC_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn spectrum_table_contains_the_second_gap() {
    let o = kac(&["spectrum", "--n", "3", "--lambda", "1", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text
        .lines()
        .find(|l| l.contains("second_gap:quadratic"))
        .expect("quadratic row");
    let value: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 0.75).abs() < 1e-12);
    assert!(text.lines().any(|l| l == "N,lambda,mu,route,value"));
}

#[test]
fn exit_codes() {
    assert_eq!(kac(&["entropy", "--n", "10"]).status.code(), Some(2));
    assert_eq!(kac(&["spectrum", "--n", "3", "--mu", "1", "--nonsense", "1"]).status.code(), Some(5));
    assert_eq!(kac(&["spectrum", "--n", "3", "--mu", "fast"]).status.code(), Some(6));
    assert_eq!(kac(&["spectrum", "--n", "3", "--mu", "-1"]).status.code(), Some(2));
    assert_eq!(kac(&["frobnicate"]).status.code(), Some(2));
    let o = kac(&["spectrum", "--n", "3", "--mu", "1", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# gap table\nn = 3\nmu = 5\nlambda = 1\n").unwrap();
    let out = dir.path().join("gaps.csv");
    let o = kac(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--mu",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# mu = 1\n"));
    assert!(text.contains("7.5000000000000000e-1"));

    fs::write(&cfg, "n = 3\nmu = 1\ncolour = blue\n").unwrap();
    assert_eq!(kac(&["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(5));
    assert_eq!(
        kac(&["spectrum", "--config", dir.path().join("missing.cfg").to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn header_reproduces_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = kac(&[
        "boltzmann",
        "--mu",
        "0.7",
        "--lambda",
        "0.1",
        "--beta",
        "3",
        "--samples",
        "5",
        "--mean",
        "0.25",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let cfg = RunConfig::from_pairs(Verb::Boltzmann, &parse_header(&text).unwrap()).unwrap();
    assert_eq!(cfg.params.mu, 0.7);
    assert_eq!(cfg.params.beta, 3.0);
    // feeding the header back as a config file gives the same run
    let cfg_file = dir.path().join("again.cfg");
    let header: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{}\n", &l[2..]))
        .collect();
    fs::write(&cfg_file, header).unwrap();
    let again = dir.path().join("b2.csv");
    let o = kac(&["boltzmann", "--config", cfg_file.to_str().unwrap(), "--output", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn output_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_kac"))
        .args(["simulate", "--n", "20", "--mu", "1", "--replicas", "50", "--samples", "3"])
        .env("KAC_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let main = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    assert!(main.contains("time,K,T,m1,m2,m3,m4,m5,m6\n"));
    let hist = fs::read_to_string(dir.path().join("simulate_histogram.csv")).unwrap();
    let rows: Vec<&str> = hist.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "bin_left,bin_right,mass");
    assert_eq!(rows.len(), 257);
}

#[test]
fn simulate_cools_to_half_n_over_beta() {
    let o = kac(&[
        "simulate", "--n", "100", "--mu", "1", "--beta", "1", "--k0", "100", "--replicas", "400", "--horizon", "16",
        "--samples", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let k: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((k - 50.0).abs() < 1.0, "{k}");
}

fn run_to(path: &Path, verb_args: &[&str]) -> Vec<u8> {
    let mut args: Vec<&str> = verb_args.to_vec();
    let p = path.to_str().unwrap();
    args.extend(["--output", p]);
    let o = kac(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(path).unwrap()
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["simulate", "--n", "30", "--mu", "1", "--replicas", "64", "--samples", "4", "--seed", "9"],
        &["entropy", "--n", "20", "--mu", "1", "--replicas", "100", "--samples", "3"],
        &["chaos", "--ns", "5,10", "--mu", "1", "--replicas", "40", "--samples", "2"],
        &["spectrum", "--n", "4", "--mu", "0.5", "--lambda", "2"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let a = run_to(&dir.path().join(format!("a{k}.csv")), args);
        let b = run_to(&dir.path().join(format!("b{k}.csv")), args);
        assert_eq!(a, b, "{args:?}");
    }
}

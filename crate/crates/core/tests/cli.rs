use std::fs;
use std::path::Path;

use hawkes_smc::cli::run_cli_with;
use hawkes_smc::io;
use hawkes_smc::model::KernelFamily;
use hawkes_smc::pmmh::summarize_chain;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hawkes-smc").chain(args.iter().copied());
    let code = run_cli_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "args {args:?} failed: {err}");
    out
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn loglik_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,2\n");
    let args = ["loglik", "--nu", "2", "--eta", "0", "--beta", "0.25", "--counts", &c, "--J", "256", "--seed", "1"];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1);
    let v: f64 = a.trim().parse().unwrap();
    assert!(v.is_finite() && v < 0.0);
}

#[test]
fn reps_emit_one_line_each_and_differ() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,2\n");
    let out = ok(&[
        "loglik", "--kernel", "gamma", "--nu", "1", "--eta", "0.6", "--alpha", "2", "--beta", "0.1", "--counts", &c,
        "--J", "16", "--reps", "5", "--seed", "3",
    ]);
    let vals: Vec<f64> = out.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals.len(), 5);
    assert!(vals.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn usage_and_model_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n");
    let base = ["loglik", "--nu", "1", "--eta", "0.5", "--beta", "1", "--counts", c.as_str()];

    let (code, _, err) = run(&[&base[..], &["--frobnicate"]].concat());
    assert_ne!(code, 0);
    assert!(err.contains("frobnicate"));

    let (code, _, err) = run(&[&base[..], &["--kernel", "lognormal"]].concat());
    assert_ne!(code, 0);
    assert!(err.contains("lognormal"), "{err}");

    // exponential with a shape, gamma without one
    let (code, _, err) = run(&[&base[..], &["--alpha", "2"]].concat());
    assert_eq!(code, 1);
    assert!(err.contains("alpha"), "{err}");
    let (code, _, _) = run(&[&base[..], &["--kernel", "gamma"]].concat());
    assert_eq!(code, 1);

    let (code, _, err) = run(&["loglik", "--nu", "1", "--eta", "1.2", "--beta", "1", "--counts", &c]);
    assert_eq!(code, 1);
    assert!(err.contains("eta") || err.contains("branching"), "{err}");

    let (code, _, err) = run(&["loglik", "--nu", "1", "--eta", "0.2", "--beta", "1", "--counts", "/nonexistent/c.csv"]);
    assert_eq!(code, 1);
    assert!(err.contains("not found"), "{err}");

    let (code, _, _) = run(&[&base[..], &["--J", "0"]].concat());
    assert_eq!(code, 1);
}

#[test]
fn bad_counts_file_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n3,0\n2,1\n");
    let (code, _, err) = run(&["loglik", "--nu", "1", "--eta", "0.5", "--beta", "1", "--counts", &c]);
    assert_eq!(code, 1);
    assert!(err.contains(":4:"), "{err}");
}

#[test]
fn collapse_does_not_change_the_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,2\n2,0\n3,0\n4,0\n5,1\n6,0\n7,0\n8,3\n");
    let args = ["loglik", "--nu", "1", "--eta", "0.5", "--beta", "0.7", "--counts", &c, "--J", "64", "--seed", "9"];
    let a: f64 = ok(&args).trim().parse().unwrap();
    let b: f64 = ok(&[&args[..], &["--no-collapse"]].concat()).trim().parse().unwrap();
    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn simulate_discretize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("ev.csv");
    let cc = dir.path().join("cc.csv");
    let ev_s = ev.to_str().unwrap();
    let cc_s = cc.to_str().unwrap();
    ok(&["simulate", "--nu", "2", "--eta", "0.5", "--beta", "0.3", "--horizon", "20", "--seed", "4", "-o", ev_s]);
    let times = io::load_events(&ev).unwrap();
    assert!(!times.is_empty() && *times.last().unwrap() <= 20.0);

    // stdout and file output agree
    let stdout = ok(&["simulate", "--nu", "2", "--eta", "0.5", "--beta", "0.3", "--horizon", "20", "--seed", "4"]);
    assert_eq!(stdout, fs::read_to_string(&ev).unwrap());

    ok(&["discretize", "--events", ev_s, "--step", "0.5", "--end", "20", "-o", cc_s]);
    let counts = io::load_counts(&cc).unwrap();
    assert_eq!(counts.len(), 40);
    assert_eq!(counts.total() as usize, times.len());

    // gamma and Weibull kernels simulate too
    for (kernel, alpha) in [("gamma", "0.7"), ("weibull", "1.5")] {
        let out = ok(&[
            "simulate", "--kernel", kernel, "--nu", "1", "--eta", "0.5", "--alpha", alpha, "--beta", "0.3", "--horizon",
            "10", "--seed", "4",
        ]);
        assert!(out.starts_with("tau\n"));
    }
}

#[test]
fn oracle_reports_probability_and_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,0\n2,0\n");
    let out = ok(&["oracle", "--nu", "1", "--eta", "0.6", "--beta", "0.1", "--counts", &c, "--sims", "40000", "--seed", "2"]);
    let kv = io::parse_key_values(&out, Path::new("<stdout>")).unwrap();
    let p: f64 = kv["probability"].parse().unwrap();
    let se: f64 = kv["standard_error"].parse().unwrap();
    let exact = (-2.0f64).exp();
    assert!((p - exact).abs() < 4.0 * se, "{p} vs {exact}");
    assert_eq!(kv["n_sims"], "40000");
}

#[test]
fn fit_on_all_zero_counts_concentrates_background_rate_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("t,count\n");
    for i in 1..=50 {
        body.push_str(&format!("{i},0\n"));
    }
    let c = write(dir.path(), "zeros.csv", &body);
    let out = ok(&["fit", "--counts", &c, "--iterations", "3000", "--burn-in", "500", "--J", "8", "--seed", "1"]);
    let kv = io::parse_key_values(&out, Path::new("<stdout>")).unwrap();
    assert_eq!(kv["kernel"], "exp");
    let nu: f64 = kv["nu.est"].parse().unwrap();
    let upper: f64 = kv["nu.upper"].parse().unwrap();
    assert!(nu < 0.1, "nu.est = {nu}");
    assert!(upper < 0.2, "nu.upper = {upper}");
}

#[test]
fn chain_csv_round_trips_through_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,3\n3,0\n4,0\n5,2\n6,1\n");
    let chain = dir.path().join("chain.csv");
    let summary = dir.path().join("summary.txt");
    let fit_out = ok(&[
        "fit", "--counts", &c, "--iterations", "400", "--burn-in", "100", "--J", "16", "--seed", "5", "--chain-out",
        chain.to_str().unwrap(), "--summary-out", summary.to_str().unwrap(),
    ]);
    let again = ok(&["summarize", "--chain", chain.to_str().unwrap(), "--burn-in", "100"]);
    assert_eq!(fit_out, again);
    assert_eq!(fs::read_to_string(&summary).unwrap(), again);

    let loaded = io::load_chain(&chain, KernelFamily::Exponential).unwrap();
    assert_eq!(loaded.records.len(), 400);
    assert_eq!(summarize_chain(&loaded, 100).unwrap(), io::load_summary(&summary).unwrap());

    // rejected rows repeat the previous log-likelihood
    let text = fs::read_to_string(&chain).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][0], "0");
    for w in rows.windows(2) {
        assert!(w[1][5] == "0" || w[1][5] == "1");
        if w[1][5] == "0" {
            assert_eq!(w[0][4], w[1][4]);
        }
    }
}

#[test]
fn fit_is_deterministic_and_accepts_init() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,3\n3,0\n4,2\n");
    let args = ["fit", "--counts", &c, "--iterations", "200", "--burn-in", "50", "--J", "8", "--seed", "7", "--init", "1,0.3,0.5"];
    assert_eq!(ok(&args), ok(&args));
    let (code, _, err) = run(&["fit", "--counts", &c, "--init", "1,0.3", "--iterations", "10", "--burn-in", "0"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn fit_on_event_times_uses_exact_likelihood() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("ev.csv");
    ok(&["simulate", "--nu", "2", "--eta", "0.5", "--beta", "0.3", "--horizon", "50", "--seed", "1", "-o", ev.to_str().unwrap()]);
    let out = ok(&[
        "fit", "--events", ev.to_str().unwrap(), "--horizon", "50", "--iterations", "3000", "--burn-in", "1000",
        "--seed", "2", "--init", "2,0.5,0.3",
    ]);
    let kv = io::parse_key_values(&out, Path::new("<stdout>")).unwrap();
    let nu: f64 = kv["nu.est"].parse().unwrap();
    assert!(nu > 0.5 && nu < 4.0, "{nu}");
}

#[test]
fn predictive_band_csv() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,2\n2,1\n3,0\n4,2\n");
    let pred = dir.path().join("pred.csv");
    ok(&[
        "fit", "--counts", &c, "--iterations", "300", "--burn-in", "100", "--J", "8", "--seed", "3", "--predictive",
        "40", "--predictive-out", pred.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&pred).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,observed,lower,median,upper"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().map(|r| r[1]).collect::<Vec<_>>(), vec![2.0, 3.0, 3.0, 5.0]);
    for r in &rows {
        assert!(r[2] <= r[3] && r[3] <= r[4]);
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,2\n");
    let cfg = write(dir.path(), "run.cfg", &format!("# model\nnu=2\neta=0.3\nbeta=0.25\nJ=32\nseed=5\ncounts={c}\n"));
    let from_cfg = ok(&["--config", &cfg, "loglik"]);
    let explicit = ok(&["loglik", "--nu", "2", "--eta", "0.3", "--beta", "0.25", "--J", "32", "--seed", "5", "--counts", &c]);
    assert_eq!(from_cfg, explicit);
    let overridden = ok(&["loglik", "--config", &cfg, "--seed", "6"]);
    assert_ne!(overridden, from_cfg);

    let bad = write(dir.path(), "bad.cfg", "nu=2\nwobble=1\n");
    let (code, _, _) = run(&["--config", &bad, "loglik", "--eta", "0.3", "--beta", "1", "--counts", &c]);
    assert_ne!(code, 0);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.csv", "t,count\n1,1\n2,2\n3,1\n");
    let args = ["loglik", "--nu", "1", "--eta", "0.4", "--beta", "0.5", "--counts", &c, "--J", "32", "--reps", "6"];
    let one = ok(&[&["--threads", "1"][..], &args[..]].concat());
    let two = ok(&[&["--threads", "2"][..], &args[..]].concat());
    assert_eq!(one, two);
    assert_ne!(run(&[&["--threads", "0"][..], &args[..]].concat()).0, 0);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_hawkes-smc");
    let status = std::process::Command::new(bin).arg("--help").output().unwrap();
    assert!(status.status.success());
    let status = std::process::Command::new(bin).arg("nonsense").output().unwrap();
    assert!(!status.status.success());
}

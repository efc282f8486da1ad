use std::fs;
use std::process::{Command, Output};

fn geomphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomphase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn oracle_blockade_ratio() {
    let o = geomphase(&["oracle", "blockade-ratio"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2.8439");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(geomphase(&["oracle", "nonsense"]).status.code(), Some(1));
    assert_eq!(geomphase(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(geomphase(&["--gamma-g", "abc", "gp"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "omega0 = 1\ngama_g = 0.3\n").unwrap();
    let o = geomphase(&["--config", cfg.to_str().unwrap(), "gp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gama_g"));
}

#[test]
fn degenerate_run_exits_two() {
    let o = geomphase(&["--gamma-g", "1", "--gamma-d", "1", "--omega", "0", "--tau", "5", "--n-step", "500", "gp"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qubit_benchmark_converges_at_fourth_order() {
    let o = geomphase(&["benchmark-qubit"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let errors: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 5);
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((11.0..22.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn tongue_writes_csv_and_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tongue.cfg");
    fs::write(&cfg, "# small grid\nmode = sync-analytic\nn_delta = 3\nn_t = 4\n").unwrap();
    let run = |threads: &str, tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let o = geomphase(&[
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            csv.to_str().unwrap(),
            "tongue",
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read(csv).unwrap(), fs::read(svg).unwrap())
    };
    let a = run("1", "a");
    let b = run("3", "b");
    assert_eq!(a, b);
    let csv = String::from_utf8(a.0).unwrap();
    assert_eq!(csv.lines().next(), Some("delta,T,value,value_unwrapped,flag"));
    assert_eq!(csv.lines().count(), 13);
    assert!(String::from_utf8(a.1).unwrap().starts_with("<svg"));
}

#[test]
fn gp_reports_both_directions() {
    let o = geomphase(&["--n-step", "4000", "--tau", "100", "gp", "--reverse"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for key in ["gamma =", "reversed_gamma =", "analytic_gamma =", "visibility ="] {
        assert!(text.contains(key), "{text}");
    }
}

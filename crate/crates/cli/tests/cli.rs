use std::path::Path;
use std::process::{Command, Output};

fn vsn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsn-offload"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_writes_one_row_per_frame() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run", "--topology", "2", "--algorithm", "tt-a", "--synthetic", "uniform", "--points", "50", "--frames", "12",
        "--seed", "5", "--out", "r.csv", "--timeline-out", "t.csv",
    ];
    let stdout = ok(&vsn(&args, dir.path()));
    assert!(stdout.contains("mean T"));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("frame,system_t,t_s1,t_s2,t_s3,t_s4,reviser,state"));
    assert_eq!(lines.count(), 12);
    let timeline = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(timeline.starts_with("frame,sensor,slice,node,"));
    // deterministic for a fixed seed
    ok(&vsn(&[&args[..14], &["again.csv"]].concat(), dir.path()));
    assert_eq!(csv, std::fs::read_to_string(dir.path().join("again.csv")).unwrap());
}

#[test]
fn coordinated_run_from_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut trace = String::from("frame,sensor,x_norm\n");
    for f in 1..=6 {
        for s in 1..=2 {
            for k in 0..20 {
                trace.push_str(&format!("{f},{s},{}\n", (k as f64 + 0.5 * s as f64) / 21.0));
            }
        }
    }
    std::fs::write(dir.path().join("trace.csv"), trace).unwrap();
    std::fs::write(
        dir.path().join("scenario.toml"),
        "transmission_coeffs = [[0.4, 0.9], [0.8, 0.5]]\nprocessing_coeffs = [1.5, 2.0]\n",
    )
    .unwrap();
    let args = [
        "run", "--config", "scenario.toml", "--algorithm", "tt-s", "--coordinate", "2", "--candidates", "2",
        "--dictionary-size", "3", "--trace", "trace.csv", "--out", "c.csv",
    ];
    ok(&vsn(&args, dir.path()));
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().nth(1).unwrap().ends_with(",coordinator,transient"));
}

#[test]
fn oracle_and_dictionary_commands() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scenario.toml"),
        "transmission_coeffs = [[0.4, 0.9], [0.8, 0.5]]\nprocessing_coeffs = [1.5, 2.0]\n",
    )
    .unwrap();
    let out = ok(&vsn(&["oracle", "--config", "scenario.toml", "--synthetic", "exact-uniform"], dir.path()));
    assert!(out.starts_with("optimum T "));
    assert_eq!(out.lines().filter(|l| l.contains("sensor")).count(), 2);
    let build = ["dict", "build", "--config", "scenario.toml", "--synthetic", "uniform", "--dictionary-size", "2", "--out", "d.csv"];
    ok(&vsn(&build, dir.path()));
    let out = ok(&vsn(&["dict", "inspect", "--dictionary", "d.csv"], dir.path()));
    assert!(out.starts_with("2 entries, frame width 720"));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--topology", "9", "--synthetic", "uniform", "--out", "x.csv"][..],
        &["run", "--topology", "1", "--out", "x.csv"],
        &["run", "--topology", "1", "--trace", "missing.csv", "--out", "x.csv"],
        &["run", "--topology", "1", "--algorithm", "zz", "--synthetic", "uniform", "--out", "x.csv"],
        &["dict", "inspect", "--dictionary", "missing.csv"],
    ] {
        let o = vsn(args, dir.path());
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussian-work"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn vacuum_sample_has_zero_work() {
    let o = run(&["sample", "--n", "4", "--z-profile", "vacuum", "--samples", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sample_index,n_modes_full,n_modes_sys,beta,z_profile,master_seed,energy,sum_sympl,work,stat_T,stat_frakT,stat_delta,nu_th"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let work: f64 = row.split(',').nth(8).unwrap().parse().unwrap();
        assert_eq!(work, 0.0);
    }
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--n", "8", "--z-profile", "uniform:1.4", "--samples", "30", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

fn sweep_bytes(dir: &Path, threads: &str, format: &str) -> Vec<u8> {
    let out = dir.join(format!("sweep-{threads}.{format}"));
    let o = run(&[
        "sweep",
        "--n-grid",
        "4,8,16",
        "--z-profile",
        "uniform:2",
        "--samples",
        "200",
        "--seed",
        "42",
        "--threads",
        threads,
        "--format",
        format,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    std::fs::read(out).unwrap()
}

#[test]
fn sweep_output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let one = sweep_bytes(dir.path(), "1", format);
        let four = sweep_bytes(dir.path(), "4", format);
        assert!(!one.is_empty());
        assert_eq!(one, four, "{format} output differs");
    }
}

#[test]
fn sweep_tails_match_raw_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = String::from_utf8(sweep_bytes(dir.path(), "2", "csv")).unwrap();
    let json = String::from_utf8(sweep_bytes(dir.path(), "2", "json")).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&json).unwrap();
    for point in summary["points"].as_array().unwrap() {
        let n = point["n_full"].as_u64().unwrap();
        let works: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[1].parse::<u64>().unwrap() == n)
            .map(|f| f[8].parse().unwrap())
            .collect();
        assert_eq!(works.len(), 200);
        for tail in point["tails"].as_array().unwrap() {
            let eps = tail["epsilon"].as_f64().unwrap();
            let exceed = works.iter().filter(|&&w| w > eps).count() as u64;
            assert_eq!(tail["exceed"].as_u64().unwrap(), exceed, "n = {n}, eps = {eps}");
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 4\nz-profile = uniform:1.3\nsamples = 3\nseed = 1\n").unwrap();
    let o = run(&["sample", "--config", cfg.to_str().unwrap(), "--samples", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",uniform:1.3,1,"));
}

#[test]
fn moments_json_fields() {
    let o = run(&["moments", "--n", "3", "--z-profile", "vacuum", "--samples", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["analytic", "estimate", "n_samples", "quantity", "std_error", "z_ratio"]);
        assert_eq!(r["n_samples"].as_u64(), Some(20));
    }
    assert_eq!(reports[0]["z_ratio"].as_f64(), Some(0.0));
    assert_eq!(reports[1]["z_ratio"].as_f64(), Some(0.0));
}

#[test]
fn purify_writes_pure_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("thermal.txt");
    let output = dir.path().join("pure.txt");
    std::fs::write(&input, "1\n1.0 0.0\n0.0 1.0\n").unwrap();
    let o = run(&["purify", "--input", input.to_str().unwrap(), "--out", output.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().trim(), "2");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!((rows[0][1].abs() - 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn malformed_purify_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "1\n0.5 zero\n0 0.5\n").unwrap();
    let o = run(&["purify", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["purify", "--input", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unphysical_purify_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sub.txt");
    std::fs::write(&input, "1\n0.3 0\n0 0.3\n").unwrap();
    let o = run(&["purify", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn asymmetric_file_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("asym.txt");
    std::fs::write(&input, "1\n1.0 0.2\n0.0 1.0\n").unwrap();
    let o = run(&["validate", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("symmetry invariant"), "{}", stderr(&o));
}

#[test]
fn default_validation_passes() {
    let o = run(&["validate"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn invalid_configs_exit_2() {
    for args in [
        &["sweep", "--n-grid", "8,4"][..],
        &["sample", "--samples", "0"],
        &["sample", "--n", "4", "--m", "5"],
        &["sample", "--z-profile", "uniform:0.5"],
        &["sample", "--epsilon", "0"],
        &["sample", "--pipeline", "sideways"],
        &["moments", "--z-profile", "flat:5"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn rejection_timeout_exits_3_with_index() {
    let o = run(&["sample", "--n", "300", "--z-profile", "flat:200", "--samples", "1", "--pipeline", "direct"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("failing sample_index: 0"));
}

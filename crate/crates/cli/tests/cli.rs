use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riskscale"))
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: Option<&Path>, threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    match threads {
        Some(t) => cmd.env("RISKSCALE_THREADS", t),
        None => cmd.env_remove("RISKSCALE_THREADS"),
    };
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

const SAMPLE: &str = "command = sample\nmodel.kind = lp_dirichlet\nmodel.alphas = 1,1,0.5\nmodel.p = 2\nmodel.radial = point_mass:1\nn = 500\nseed = 7\naudit = true\n";

#[test]
fn scalar_premium_is_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "p.cfg",
        "command = premium\nmodel.kind = scalar\nmodel.mu = 0\nmodel.sigma2 = 1\nmodel.tau2 = 3\nmodel.x = 4\n",
    );
    let out = dir.path().join("p.csv");
    let o = run(&["premium", "--out", out.to_str().unwrap()], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = parse_csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["x1"]);
    assert_eq!(rows.len(), 1);
    // x + σ²/(σ²+τ²)(μ − x) = 4 + (1/4)(−4)
    assert!((rows[0][0] - 3.0).abs() < 1e-12, "{rows:?}");
}

#[test]
fn point_mass_sample_lies_on_the_sphere() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.cfg", SAMPLE);
    let o = run(&["sample"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("audit sphere residual"));
    let (header, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(header, ["x1", "x2", "x3"]);
    assert_eq!(rows.len(), 500);
    for r in &rows {
        let s: f64 = r.iter().map(|x| x * x).sum();
        assert!((s - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_worker_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.cfg", &SAMPLE.replace("n = 500", "n = 20000"));
    let a = run(&["sample"], Some(&cfg), Some("1")).stdout;
    let b = run(&["sample"], Some(&cfg), Some("4")).stdout;
    let c = run(&["sample"], Some(&cfg), None).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = run(&["sample", "--seed", "8"], Some(&cfg), None).stdout;
    assert_ne!(a, other);
}

#[test]
fn every_sample_kind_runs() {
    let dir = TempDir::new().unwrap();
    let kinds = [
        (
            "weighted_lp_dirichlet",
            "model.alphas = 0.5,0.5\nmodel.p = 2\nmodel.qs = 0.5,0.5\nmodel.radial = chi_square_sqrt:2\n",
            2,
        ),
        (
            "random_p_dirichlet",
            "model.alphas = 0.5,1,2\nmodel.p_law = pareto:2\nmodel.radial = gamma_power:2,1,1\n",
            3,
        ),
        (
            "random_scale",
            "model.alpha = 1.5\nmodel.p = 2\nmodel.s_law = pareto:3\nmodel.d = 4\n",
            4,
        ),
        ("beta_gamma", "model.alpha = 0.5\nmodel.p = 2\n", 1),
        ("clayton", "model.theta_shape = 1\nmodel.d = 2\n", 2),
        (
            "mgb2",
            "model.a = 2,3\nmodel.b = 1,2\nmodel.p = 1.5,0.5\nmodel.theta = inv_gamma:2\nmodel.sampler = conditional\n",
            2,
        ),
    ];
    for (kind, keys, d) in kinds {
        let text = format!("command = sample\nn = 50\naudit = true\nmodel.kind = {kind}\n{keys}");
        let cfg = write_config(&dir, "k.cfg", &text);
        let o = run(&["sample"], Some(&cfg), None);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stderr(&o));
        let (header, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
        assert_eq!(header.len(), d, "{kind}");
        assert_eq!(rows.len(), 50, "{kind}");
    }
}

#[test]
fn gaussian_premium_closed_and_mc() {
    let dir = TempDir::new().unwrap();
    let base = "command = premium\nmodel.kind = gaussian_shift\nmodel.mu = 1,0\nmodel.sigma = 2,0.5;0.5,1\nmodel.sigma0 = 1,0;0,3\nmodel.x = 3,-1\naudit = true\n";
    let closed = run(&["premium"], Some(&write_config(&dir, "c.cfg", base)), None);
    assert_eq!(closed.status.code(), Some(0), "{}", stderr(&closed));
    let (h, c) = parse_csv(&String::from_utf8(closed.stdout).unwrap());
    assert_eq!(h, ["x1", "x2"]);

    let mc_cfg = write_config(&dir, "m.cfg", &format!("{base}model.method = mc\nn = 200000\n"));
    let mc = run(&["premium"], Some(&mc_cfg), None);
    assert_eq!(mc.status.code(), Some(0), "{}", stderr(&mc));
    let (h, m) = parse_csv(&String::from_utf8(mc.stdout).unwrap());
    assert_eq!(h, ["x1", "x2", "se1", "se2"]);
    for i in 0..2 {
        assert!((m[0][i] - c[0][i]).abs() <= 4.0 * m[0][2 + i], "{m:?} vs {c:?}");
    }
}

#[test]
fn elliptical_premium_runs() {
    let dir = TempDir::new().unwrap();
    let text = "command = premium\nmodel.kind = elliptical_shift\nmodel.c = 1,0;0,2\nmodel.nu = 0,1\nmodel.radial = chi_square_sqrt:2\nmodel.x = 3\n";
    let o = run(&["premium"], Some(&write_config(&dir, "e.cfg", text)), None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    // Σ = 1, Σ0 = 4: premium = x + (μ − x)·Σ/(Σ + Σ0) = 3 − 2/5
    assert!((rows[0][0] - 2.6).abs() < 1e-12, "{rows:?}");
}

#[test]
fn taildep_table() {
    let dir = TempDir::new().unwrap();
    let text = "command = taildep\nmodel.kind = mgb2\nmodel.a = 1,1\nmodel.b = 1,1\nmodel.p = 1,1\nmodel.theta = pareto:1\nc1 = 1\nc2 = 1\nt_grid = 1,5,20\nn = 200000\n";
    let o = run(&["taildep"], Some(&write_config(&dir, "t.cfg", text)), None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(h, ["t", "empirical_ratio", "stderr", "limit_estimate", "limit_stderr"]);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [1.0, 5.0, 20.0]);
    assert!((rows[0][3] - 0.5).abs() < 0.02);
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.cfg", &format!("{SAMPLE}model.extra = 1\n"));
    let o = run(&["sample"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("line 9: `model.extra`: unknown key"),
        "{}",
        stderr(&o)
    );

    let cfg = write_config(
        &dir,
        "zero.cfg",
        &SAMPLE.replace("alphas = 1,1,0.5", "alphas = 0,1,0.5"),
    );
    let o = run(&["sample"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alphas[0] must be > 0"), "{}", stderr(&o));

    assert_eq!(run(&["sample"], None, None).status.code(), Some(2));
    assert_eq!(
        run(&["sample"], Some(&dir.path().join("missing.cfg")), None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"], Some(&cfg), None).status.code(), Some(2));
    assert_eq!(
        run(&["premium"], Some(&write_config(&dir, "s.cfg", SAMPLE)), None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numeric_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    // The prior density underflows for every draw this far from the mean.
    let text = "command = premium\nmodel.kind = gaussian_shift\nmodel.mu = 0\nmodel.sigma = 1\nmodel.sigma0 = 1\nmodel.x = 1000\nmodel.method = mc\nn = 10000\n";
    let o = run(&["premium"], Some(&write_config(&dir, "n.cfg", text)), None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert_eq!(stderr(&o).lines().count(), 1, "{}", stderr(&o));
}

fn verify_run() -> &'static (Option<i32>, String) {
    static RUN: OnceLock<(Option<i32>, String)> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let out = dir.path().join("report.txt");
        let o = run(&["verify", "--seed", "42", "--out", out.to_str().unwrap()], None, None);
        (o.status.code(), std::fs::read_to_string(out).unwrap())
    })
}

#[test]
fn verify_report_shape_and_exit_status_agree() {
    let (code, report) = verify_run();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 14);
    let all_pass = lines.iter().all(|l| {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), 4, "{l}");
        cells[1].parse::<f64>().unwrap();
        cells[2].parse::<f64>().unwrap();
        cells[3] == "true"
    });
    assert_eq!(*code, Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn verify_default_seed_passes() {
    let (code, report) = verify_run();
    assert_eq!(*code, Some(0), "{report}");
}

//! End-to-end tests of the binary: subcommand behavior, artifact layout,
//! determinism, and the documented exit codes (1 usage, 2 numerical, 3 I/O).

use std::path::Path;
use std::process::{Command, Output};

use kneadsweep::container::{read_container, Container};
use kneadsweep::symbolic::EncodeMode;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kneadsweep"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

fn manifest_field(path: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(path).expect("manifest readable");
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {text:?}"))
        .to_string()
}

#[test]
fn models_info_reports_three_saddle_foci() {
    let o = run(&[
        "models-info", "chua", "--a", "10.16", "--b", "14.7", "--json",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("valid json");
    let eq = doc["equilibria"].as_array().expect("equilibria array");
    assert_eq!(eq.len(), 3);
    let classes: Vec<&str> = eq.iter().map(|e| e["class"].as_str().unwrap()).collect();
    assert_eq!(classes.iter().filter(|c| **c == "SaddleFocus21").count(), 1);
    assert_eq!(classes.iter().filter(|c| **c == "SaddleFocus12").count(), 2);
    let nu = eq[0]["nu"].as_f64().expect("origin nu");
    assert!(nu > 0.0 && nu < 1.0, "origin saddle index {nu}");

    let text = run(&["models-info", "chua", "--a", "6", "--b", "2"]);
    assert_eq!(code(&text), 0);
    assert!(stdout(&text).contains("NDSF"), "zero divergence flagged");
}

#[test]
fn models_info_rejects_unknown_model() {
    let o = run(&["models-info", "frobnicate", "--a", "1", "--b", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown model"));
}

#[test]
fn sweep_container_bytes_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("t1.cswp");
    let out2 = dir.path().join("t2.cswp");
    let base = [
        "sweep", "--model", "chua", "--u-range", "7:11", "--v-range", "10:15",
        "--res", "6:6", "--window", "1:4", "--dt", "0.01", "--max-time", "100",
    ];
    for out in [&out1, &out2] {
        let mut args: Vec<&str> = base.to_vec();
        args.push("--out");
        let s = out.to_str().unwrap();
        args.push(s);
        let o = run(&args);
        assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "identical config must give identical bytes");

    let m1 = dir.path().join("t1.cswp.manifest");
    let m2 = dir.path().join("t2.cswp.manifest");
    let h1 = manifest_field(&m1, "config_hash");
    let h2 = manifest_field(&m2, "config_hash");
    assert_eq!(h1, h2);
    assert_eq!(h1.len(), 16, "16 hex digits, got {h1:?}");
    assert!(h1.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(manifest_field(&m1, "worker_count").parse::<usize>().unwrap() >= 1);

    match read_container(&out1).unwrap() {
        Container::Sweep(g) => {
            assert_eq!(g.config.resolution, (6, 6));
            assert_eq!(g.config.encoding.j, 4);
            assert_eq!(g.config.integration.dt, 0.01);
            assert_eq!(g.values.len(), 36);
        }
        Container::Theory(_) => panic!("expected a sweep container"),
    }
}

#[test]
fn sweep_rejects_conflicts_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.cswp");
    let o = run(&[
        "sweep", "--model", "chua", "--u-range", "11:7", "--v-range", "10:15",
        "--res", "4:4", "--window", "1:3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "stderr: {}", stderr(&o));
    assert!(!out.exists(), "no artifact on config error");

    // Bad image extension is also a config defect, caught up front.
    let img = dir.path().join("x.gif");
    let o = run(&[
        "sweep", "--model", "chua", "--u-range", "7:11", "--v-range", "10:15",
        "--res", "4:4", "--window", "1:3",
        "--out", out.to_str().unwrap(), "--img", img.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
}

#[test]
fn sweep_config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("recipe.cfg");
    std::fs::write(
        &cfg,
        "# small smoke recipe\n\
         model=chua\n\
         u-range=9:10\n\
         v-range=13:14\n\
         res=4:4\n\
         window=1:3\n\
         dt=0.01  # overridden below\n\
         max-time=60\n",
    )
    .unwrap();
    let out_a = dir.path().join("a.cswp");
    let out_b = dir.path().join("b.cswp");
    let out_c = dir.path().join("c.cswp");

    let o = run(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--dt", "0.02",
        "--out", out_a.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let o = run(&[
        "sweep", "--model", "chua", "--u-range", "9:10", "--v-range", "13:14",
        "--res", "4:4", "--window", "1:3", "--dt", "0.02", "--max-time", "60",
        "--out", out_b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let o = run(&[
        "sweep", "--config", cfg.to_str().unwrap(),
        "--out", out_c.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));

    let hash = |p: &Path| manifest_field(&p.with_extension("cswp.manifest"), "config_hash");
    assert_eq!(hash(&out_a), hash(&out_b), "flag override matches pure flags");
    assert_ne!(hash(&out_a), hash(&out_c), "file dt differs from override");
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn ratios_csv_converges_to_scaling_target() {
    let o = run(&["theory", "ratios", "--code", "11", "--Omega0", "3"]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,width_ratio,distance_ratio,target"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 3, "want several ratio rows, got {}", rows.len());

    let target: f64 = rows[0][3].parse().unwrap();
    let expected = (-2.0 * std::f64::consts::PI / 3.0).exp();
    assert!((target - expected).abs() < 1e-9, "target column is e^(-2pi/Omega0)");
    let last_width: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!(
        (last_width / target - 1.0).abs() < 0.01,
        "width ratios converge: last {last_width} vs {target}"
    );
    assert!(rows.last().unwrap()[2].is_empty(), "final distance cell blank");
    assert!(rows[0][2].parse::<f64>().is_ok());
}

#[test]
fn ratios_narrow_scan_is_a_numerical_failure() {
    let o = run(&["theory", "ratios", "--code", "11", "--lnmu-range", "-3:-2"]);
    assert_eq!(code(&o), 2, "stderr: {}", stderr(&o));
    assert!(stderr(&o).contains("intervals"));
}

#[test]
fn bars_writes_theory_container_and_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bars.ct");
    let img = dir.path().join("bars.ppm");
    let o = run(&[
        "theory", "bars", "--code", "11", "--B0", "0.8",
        "--mu-range", "2e-3:0.5", "--nu0-range", "0.1:0.9", "--res", "40:30",
        "--out", out.to_str().unwrap(), "--img", img.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    match read_container(&out).unwrap() {
        Container::Theory(g) => {
            assert_eq!(g.config.resolution, (40, 30));
            assert_eq!(g.cells.len(), 1200);
        }
        Container::Sweep(_) => panic!("expected a theory container"),
    }
    let ppm = std::fs::read(&img).unwrap();
    assert!(ppm.starts_with(b"P6\n40 30\n255\n"));
    assert!(out.with_extension("ct.manifest").exists());
    assert!(img.with_extension("ppm.manifest").exists());

    // refine requires sweep data, not a feasibility diagram.
    let o = run(&[
        "refine", out.to_str().unwrap(),
        "--point-a", "0.1,0.5", "--point-b", "0.2,0.5",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sweep container"));
}

#[test]
fn bars_without_output_is_a_usage_error() {
    let o = run(&["theory", "bars", "--code", "11"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--out"));
}

#[test]
fn map1d_at_zero_mu_oscillates_near_origin() {
    let o = run(&[
        "theory", "map1d", "--mu", "0", "--samples", "400", "--z-range", "1e-5:0.5",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let text = stdout(&o);
    let fs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(fs.len(), 400);
    let sign_changes = fs.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    assert!(sign_changes >= 3, "zeros accumulate toward z = 0: {sign_changes}");
}

#[test]
fn refine_localizes_polar_boundary_point() {
    const ANCHOR: f64 = 0.876898493756;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("polar.cswp");
    let o = run(&[
        "sweep", "--model", "chua", "--transform", "polar",
        "--u-range", "0.86:0.885", "--v-range", "9.99:10.0",
        "--res", "2:2", "--window", "1:3", "--max-time", "2000",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));

    let o = run(&[
        "refine", out.to_str().unwrap(),
        "--point-a", "0.86,9.995", "--point-b", "0.885,9.995",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let line = stdout(&o);
    let mut parts = line.split_whitespace();
    let u: f64 = parts.next().unwrap().parse().unwrap();
    let v: f64 = parts.next().unwrap().parse().unwrap();
    assert!((u - ANCHOR).abs() < 1e-3, "u = {u}");
    assert!((v - 9.995).abs() < 1e-12);

    let o = run(&[
        "refine", out.to_str().unwrap(),
        "--point-a", "0.86,9.995", "--point-b", "0.885,9.995", "--json",
    ]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((doc["u"].as_f64().unwrap() - u).abs() < 1e-9);
    assert_eq!(doc["tol"].as_f64().unwrap(), 1e-6);

    // Cell mode: between the two grid columns sits the same boundary.
    let o = run(&[
        "refine", out.to_str().unwrap(),
        "--cell-a", "0,0", "--cell-b", "1,0",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let ucell: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((ucell - ANCHOR).abs() < 5e-3, "cell-mode u = {ucell}");

    // Probes on the same side of the boundary see one kneading value.
    let o = run(&[
        "refine", out.to_str().unwrap(),
        "--point-a", "0.86,9.995", "--point-b", "0.87,9.995",
    ]);
    assert_eq!(code(&o), 2, "stderr: {}", stderr(&o));
    assert!(stderr(&o).contains("no boundary"));
}

#[test]
fn dcp_mode_defaults_to_long_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dcp.cswp");
    let o = run(&[
        "sweep", "--model", "chua", "--mode", "dcp",
        "--u-range", "7.995:8.005", "--v-range", "5.995:6.005", "--res", "2:2",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    match read_container(&out).unwrap() {
        Container::Sweep(g) => {
            assert_eq!(g.config.encoding.i, 601);
            assert_eq!(g.config.encoding.j, 1000);
            assert_eq!(g.config.encoding.mode, EncodeMode::Dcp);
            let dcp = g.dcp.expect("dcp codes stored");
            assert!(
                dcp.iter().all(|&c| c == 2),
                "period-2 plateau around (8, 6), got {dcp:?}"
            );
        }
        Container::Theory(_) => panic!("expected a sweep container"),
    }
}

#[test]
fn worker_count_env_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let base = |out: &Path| {
        vec![
            "sweep".to_string(), "--model".into(), "chua".into(),
            "--u-range".into(), "9:10".into(), "--v-range".into(), "13:14".into(),
            "--res".into(), "3:3".into(), "--window".into(), "1:2".into(),
            "--dt".into(), "0.01".into(), "--max-time".into(), "60".into(),
            "--out".into(), out.to_str().unwrap().to_string(),
        ]
    };
    let out_env = dir.path().join("env.cswp");
    let o = bin()
        .args(base(&out_env))
        .env("CHAOS_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    assert_eq!(
        manifest_field(&dir.path().join("env.cswp.manifest"), "worker_count"),
        "2"
    );

    let out_flag = dir.path().join("flag.cswp");
    let mut args = base(&out_flag);
    args.push("--workers".into());
    args.push("1".into());
    let o = bin()
        .args(&args)
        .env("CHAOS_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    assert_eq!(
        manifest_field(&dir.path().join("flag.cswp.manifest"), "worker_count"),
        "1"
    );

    let o = bin()
        .args(base(&dir.path().join("zero.cswp")))
        .env("CHAOS_WORKERS", "nope")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_output_directory_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nodir").join("x.cswp");
    let o = run(&[
        "sweep", "--model", "chua", "--u-range", "9:10", "--v-range", "13:14",
        "--res", "3:3", "--window", "1:2", "--dt", "0.01", "--max-time", "60",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "stderr: {}", stderr(&o));
}

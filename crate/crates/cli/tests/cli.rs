//! End-to-end checks of the command-line surface: file outputs, formats,
//! error reporting.

use std::path::{Path, PathBuf};
use std::process::Command;

use invduel_cli::batch::{run_experiment_batch, trajectory_path};
use invduel_cli::config::parse_config;
use invduel_cli::csvio::{parse_trajectory_csv, read_trajectory, trajectory_csv};
use invduel_cli::report::{analyze_trajectories, collect_trajectory_files, trailing_means};
use invduel_cli::svg::{render_plot, PlotKind};
use invduel_core::sim::{run_simulation, SimConfig};

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example1.toml")
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_invduel")
}

/// Minimal well-formedness check: tags balance and the root element is svg.
fn assert_well_formed_svg(text: &str) {
    assert!(text.contains("viewBox"), "missing viewBox");
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    let mut seen_root = false;
    while let Some(start) = rest.find('<') {
        let tail = &rest[start + 1..];
        let end = tail.find('>').expect("unclosed tag");
        let tag = &tail[..end];
        rest = &tail[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack
                .pop()
                .unwrap_or_else(|| panic!("stray closing tag {name}"));
            assert_eq!(open, name.trim(), "mismatched closing tag");
        } else if tag.ends_with('/') {
            // self-closing
        } else {
            let name = tag.split_whitespace().next().unwrap().to_string();
            if stack.is_empty() {
                assert_eq!(name, "svg", "root element must be svg");
                seen_root = true;
            }
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unbalanced tags: {stack:?}");
    assert!(seen_root);
}

#[test]
fn single_seed_batch_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut resolved = parse_config(&config_path()).unwrap();
    resolved.seeds = vec![7];
    resolved.config.seeds = Some(vec![7]);
    resolved.config.out_dir = dir.path().to_path_buf();
    let outcome = run_experiment_batch(&resolved).unwrap();
    assert!(outcome.failures.is_empty());

    // exactly one trajectory file
    let files = collect_trajectory_files(dir.path()).unwrap();
    assert_eq!(files.len(), 1);
    assert!(files[0].ends_with("trajectory_seed7.csv"));

    // 500 stages -> 501 lines including the header
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(text.lines().count(), 501);
    assert!(text.starts_with("stage,y1,y2,map1,map2,s1,s2,dist_to_nash\n"));
    assert!(text.ends_with('\n'));

    // re-emission is byte-identical and parsing recovers emitted precision
    let t = run_simulation(&resolved.params, &SimConfig::new(7, 500)).unwrap();
    assert_eq!(trajectory_csv(&t), text);
    let rows = parse_trajectory_csv(&text).unwrap();
    assert_eq!(rows.len(), 500);
    for (row, rec) in rows.iter().zip(&t.records) {
        assert!((row.y1 - rec.y1).abs() < 5e-13);
        assert!((row.dist_to_nash - rec.dist_to_nash).abs() < 5e-13);
    }

    // summary statistics recomputed from the CSV match the summary file
    let summary_text = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let line = summary_text.lines().nth(1).unwrap();
    let fields: Vec<f64> = line
        .split(',')
        .skip(2)
        .take(8)
        .map(|f| f.parse().unwrap())
        .collect();
    let (my1, my2, mmap1, mmap2) = trailing_means(&rows, 50);
    assert!((fields[2] - my1).abs() < 1e-9);
    assert!((fields[3] - my2).abs() < 1e-9);
    assert!((fields[4] - mmap1).abs() < 1e-9);
    assert!((fields[5] - mmap2).abs() < 1e-9);
    let mean_dev: f64 = rows[450..].iter().map(|r| r.dist_to_nash).sum::<f64>() / 50.0;
    assert!((fields[6] - mean_dev).abs() < 1e-9);
    // nash columns agree with the solver
    let nash = invduel_core::equilibrium::nash_solve(&resolved.params, 0.005, 500).unwrap();
    assert!((fields[0] - nash.0).abs() < 1e-12);
    assert!((fields[1] - nash.1).abs() < 1e-12);

    // report written alongside
    assert!(dir.path().join("report.txt").exists());
    assert!(dir.path().join("resolved_config.toml").exists());
}

#[test]
fn resolved_config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut resolved = parse_config(&config_path()).unwrap();
    resolved.seeds = vec![3];
    resolved.config.seeds = Some(vec![3]);
    resolved.config.n_stages = 60;
    resolved.config.out_dir = dir.path().join("first");
    run_experiment_batch(&resolved).unwrap();

    // rerun purely from the echoed config
    let mut echoed = parse_config(&dir.path().join("first/resolved_config.toml")).unwrap();
    echoed.config.out_dir = dir.path().join("second");
    run_experiment_batch(&echoed).unwrap();

    let a = std::fs::read(trajectory_path(&dir.path().join("first"), 3)).unwrap();
    let b = std::fs::read(trajectory_path(&dir.path().join("second"), 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn svg_output_is_well_formed() {
    let resolved = parse_config(&config_path()).unwrap();
    let t = run_simulation(&resolved.params, &SimConfig::new(2, 80)).unwrap();
    let rows = parse_trajectory_csv(&trajectory_csv(&t)).unwrap();
    for kind in [PlotKind::Actions, PlotKind::Beliefs] {
        let svg = render_plot(&rows, kind, t.nash, "check");
        assert_well_formed_svg(&svg);
    }
    // single-stage chart is still valid
    let t1 = run_simulation(&resolved.params, &SimConfig::new(2, 1)).unwrap();
    let rows1 = parse_trajectory_csv(&trajectory_csv(&t1)).unwrap();
    let svg = render_plot(&rows1, PlotKind::Actions, t1.nash, "single stage");
    assert_well_formed_svg(&svg);
    assert!(svg.contains("<circle"));
}

#[test]
fn analyze_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut resolved = parse_config(&config_path()).unwrap();
    resolved.seeds = vec![5];
    resolved.config.seeds = Some(vec![5]);
    resolved.config.n_stages = 150;
    resolved.config.out_dir = dir.path().to_path_buf();
    run_experiment_batch(&resolved).unwrap();

    let files = collect_trajectory_files(dir.path()).unwrap();
    let outcome = analyze_trajectories(&resolved.params, &files, 25, dir.path()).unwrap();
    assert_eq!(outcome.violations, 0);
    let report = std::fs::read_to_string(outcome.report_path).unwrap();
    assert!(report.contains("interval contraction"));
    assert!(report.contains("loglik argmax"));
    assert!(dir.path().join("loglik_seed5.csv").exists());
}

#[test]
fn invalid_config_fails_with_machine_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(config_path())
        .unwrap()
        .replace("unit_cost = 2.0", "unit_cost = 5.0");
    std::fs::write(&path, text).unwrap();
    let output = Command::new(bin())
        .args(["nash", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    let first = stderr.lines().next().unwrap_or_default();
    assert!(first.starts_with("error: "), "stderr: {stderr}");
    assert!(first.contains("player1"), "stderr: {stderr}");
}

#[test]
fn nash_subcommand_prints_equilibrium() {
    let output = Command::new(bin())
        .args(["nash", "--config", config_path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("y1* = 0.45"), "{stdout}");
    assert!(stdout.contains("y2* = 0.80"), "{stdout}");
}

#[test]
fn asymmetric_config_converges_too() {
    // partial spillover plus a cell-vector demand on a coarser grid
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/asymmetric.toml");
    let resolved = parse_config(&path).unwrap();
    assert_eq!(resolved.params.delta(), 0.02);
    assert_eq!(resolved.params.d2.n_cells(), 20);
    let nash = invduel_core::equilibrium::nash_solve(&resolved.params, 0.01, 500).unwrap();
    let t = run_simulation(&resolved.params, &SimConfig::new(2, 400)).unwrap();
    let (mean_dev, max_dev) = invduel_core::sim::convergence_metric(&t, 50);
    assert!(mean_dev <= 0.04, "mean_dev {mean_dev} vs nash {nash:?}");
    assert!(max_dev <= 0.06, "max_dev {max_dev}");
    assert!(t.hygiene.max_sum_deviation <= 1e-9);
}

#[test]
fn missing_trajectory_dir_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = collect_trajectory_files(&dir.path().join("nope")).unwrap_err();
    assert!(err.to_string().contains("neither a file nor a directory"));
    let err = collect_trajectory_files(dir.path()).unwrap_err();
    assert!(err.to_string().contains("no trajectory_seed"));
}

#[test]
fn read_trajectory_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(
        &path,
        "stage,y1,y2,map1,map2,s1,s2,dist_to_nash\n1,0.1,0.2\n",
    )
    .unwrap();
    assert!(read_trajectory(&path).is_err());
    std::fs::write(&path, "wrong,header\n").unwrap();
    assert!(read_trajectory(&path).is_err());
}

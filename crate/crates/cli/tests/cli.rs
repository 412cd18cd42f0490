use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sphercool_cli::config::RunConfig;
use tempfile::TempDir;

fn sphercool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphercool"))
        .current_dir(dir)
        .arg("-q")
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn result(report: &str, key: &str) -> f64 {
    let section = report.split("[results]").nth(1).expect("results section");
    section
        .lines()
        .find_map(|l| l.split_once('=').filter(|(k, _)| k.trim() == key))
        .map(|(_, v)| v.trim().parse().expect("numeric result"))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn config_section(report: &str) -> &str {
    report.split("[results]").next().unwrap()
}

#[test]
fn limits_reports_single_beam_damping() {
    let dir = TempDir::new().unwrap();
    let out = sphercool(dir.path(), &["--preset", "paper_scenario", "limits"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(dir.path().join("limits.report.txt"));
    assert!(report.starts_with("# sphercool "));
    let beta = result(&report, "beta_single_kg_per_s");
    assert!((beta / 6.7e-12 - 1.0).abs() < 0.01, "{beta}");
}

#[test]
fn spectrum_table_shape() {
    let dir = TempDir::new().unwrap();
    let args = ["--preset", "paper_scenario", "-o", "scan", "spectrum", "--x-min", "40", "--x-max", "40.1", "--step", "0.01"];
    assert_eq!(sphercool(dir.path(), &args).status.code(), Some(0));
    let csv = read(dir.path().join("scan.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,q_ext,q_rad,force_N"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[1] > 0.0 && cols[2] > 0.0 && cols[3] > 0.0, "{row}");
    }
    assert!(dir.path().join("scan.report.txt").exists());
}

#[test]
fn fabry_perot_on_resonance_has_no_force() {
    let dir = TempDir::new().unwrap();
    let out = sphercool(dir.path(), &["toy", "--model", "fp", "--reflectivity2", "0.99", "--points", "400"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("toy.csv"));
    assert!(csv.starts_with("phase_rad,force_N\n"));
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (p, f) = l.split_once(',').unwrap();
            (p.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 400);
    let (_, at_zero) = rows.iter().find(|(p, _)| *p == 0.0).expect("grid hits phase 0");
    let peak = rows.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
    assert!(at_zero.abs() < 1e-12 * peak, "{at_zero} vs {peak}");
}

#[test]
fn report_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let commands: [&[&str]; 4] = [&["limits"], &["gas"], &["toy", "--model", "ring"], &["resonance"]];
    for cmd in commands {
        let mut args = vec!["--preset", "paper_scenario", "-o", "first"];
        args.extend_from_slice(cmd);
        assert_eq!(sphercool(dir.path(), &args).status.code(), Some(0), "{cmd:?}");
        let first = read(dir.path().join("first.report.txt"));
        let parsed = RunConfig::parse(&first).unwrap();
        assert_eq!(parsed.render(), config_section(&first).split_once("[config]\n").unwrap().1, "{cmd:?}");

        let mut again = vec!["--config", "first.report.txt", "-o", "second"];
        again.push(cmd[0]);
        assert_eq!(sphercool(dir.path(), &again).status.code(), Some(0), "{cmd:?}");
        let second = read(dir.path().join("second.report.txt"));
        assert_eq!(RunConfig::parse(&second).unwrap(), parsed, "{cmd:?}");
        assert_eq!(first.replace(config_section(&first), ""), second.replace(config_section(&second), ""));
    }
}

#[test]
fn csv_outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let runs: [&[&str]; 2] = [
        &["cool", "--duration", "0.5", "--seed", "9"],
        &["spectrum", "--x-min", "40.5", "--x-max", "40.7", "--step", "0.005"],
    ];
    for cmd in runs {
        let mut csvs = Vec::new();
        for prefix in ["a", "b"] {
            let mut args = vec!["--preset", "paper_scenario", "--set", "sim.window_start_s=0.1", "-o", prefix];
            args.extend_from_slice(cmd);
            let out = sphercool(dir.path(), &args);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            csvs.push(std::fs::read(dir.path().join(format!("{prefix}.csv"))).unwrap());
        }
        assert_eq!(csvs[0], csvs[1], "{cmd:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();

    let missing = sphercool(dir.path(), &["limits"]);
    assert_eq!(missing.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert!(msg.contains("beam.wavelength_m") && msg.contains("beam.power_w"), "{msg}");

    let unknown = sphercool(dir.path(), &["--set", "sphere.colour=red", "gas"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("sphere.colour"));

    let bad = sphercool(dir.path(), &["--preset", "paper_scenario", "gas", "--pressure", "-3"]);
    assert_eq!(bad.status.code(), Some(2));

    let no_config = sphercool(dir.path(), &["--config", "absent.conf", "gas"]);
    assert_eq!(no_config.status.code(), Some(1));

    let domain = sphercool(dir.path(), &["--preset", "paper_scenario", "resonance", "--x-min", "10", "--x-max", "10.001"]);
    assert_eq!(domain.status.code(), Some(1), "{}", String::from_utf8_lossy(&domain.stderr));

    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "failed runs leave no files");
}

#[test]
fn output_goes_only_to_final_paths() {
    let dir = TempDir::new().unwrap();
    std::fs::create_dir(dir.path().join("out")).unwrap();
    let args = ["--preset", "paper_scenario", "-o", "out/run", "toy", "--points", "50"];
    assert_eq!(sphercool(dir.path(), &args).status.code(), Some(0));
    let mut names: Vec<String> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["run.csv", "run.report.txt"]);
}

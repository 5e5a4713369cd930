use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crowent::model::{Cavity, SystemConfig};
use crowent::spectral::spectral_density;
use serde_json::Value;

fn crowent(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crowent"));
    cmd.args(args).env_remove("CROWENT_OUT_DIR");
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            for (name, bytes) in tree(&path) {
                files.push((format!("{}/{name}", path.file_name().unwrap().to_string_lossy()), bytes));
            }
        } else {
            files.push((path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()));
        }
    }
    files.sort();
    files
}

#[test]
fn list_is_stable_and_complete() {
    let out = crowent(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["fig2", "fig3", "fig4", "fig5", "fig6a", "fig6c", "fig7", "fig8"]);
    let fig7 = text.lines().find(|l| l.starts_with("fig7")).unwrap();
    assert!(fig7.contains("in-band"));
    let fig8 = text.lines().find(|l| l.starts_with("fig8")).unwrap();
    assert!(fig8.contains("1.06") && fig8.contains(" 5 "));
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |w: &'static str| {
        [
            "run",
            "fig4",
            "--tmax",
            "15",
            "--set",
            "outputs=[\"entanglement\",\"propagator\",\"coefficients\"]",
            "--workers",
            w,
        ]
    };
    assert!(crowent(&args("1"), Some(a.path())).status.success());
    assert!(crowent(&args("4"), Some(b.path())).status.success());
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert_eq!(ta.len(), 6 * 3 + 1);
    assert!(ta == tb, "outputs differ between runs");
}

#[test]
fn manifest_is_sorted_and_summarises_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = crowent(&["run", "fig5", "--tmax", "40", "--set", "sweep.n2=[2,4,6]"], Some(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(dir.path());
    let runs = m["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 6);
    let hashes: Vec<&str> = runs.iter().map(|r| r["hash"].as_str().unwrap()).collect();
    let mut sorted = hashes.clone();
    sorted.sort();
    assert_eq!(hashes, sorted);
    for r in runs {
        let result = &r["results"][0];
        assert_eq!(result["status"], "ok");
        let s = &result["summary"];
        assert!(s["max_e_n"].as_f64().unwrap() > 0.0);
        assert!(s["max_singular_value"].as_f64().unwrap() <= 1.0 + 1e-8);
        let file = result["files"][0].as_str().unwrap();
        let csv = fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(csv.starts_with("t,E_N,P,n11,n22,"));
        // xi0 t = 40 is 8000 steps of 0.1; stride 10 keeps 801 rows.
        assert_eq!(csv.lines().count(), 1 + 801);
    }
    assert_eq!(m["failed_runs"], 0);
}

#[test]
fn failed_methods_are_recorded_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = crowent(&["run", "fig6a", "--tmax", "200", "--method", "all", "--set", "eta=0.2"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    let m = manifest(dir.path());
    let results = m["runs"][0]["results"].as_array().unwrap();
    let by_method = |name: &str| results.iter().find(|r| r["method"] == name).unwrap();
    assert_eq!(by_method("exact")["status"], "ok");
    assert_eq!(by_method("weak")["status"], "ok");
    assert_eq!(by_method("oracle")["status"], "failed");
    assert_eq!(by_method("oracle")["error_class"], "beyond_horizon");
    assert_eq!(m["failed_runs"], 1);
    assert!(dir.path().join(by_method("exact")["files"][0].as_str().unwrap()).is_file());
}

#[test]
fn methods_agree_inside_the_oracle_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let out = crowent(
        &[
            "run",
            "fig6a",
            "--tmax",
            "50",
            "--dt",
            "0.05",
            "--method",
            "all",
            "--set",
            "eta=0.2",
            "--set",
            "outputs=[\"propagator\"]",
        ],
        Some(dir.path()),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(dir.path());
    let run = &m["runs"][0];
    let read = |method: &str| -> Vec<Vec<f64>> {
        let r = run["results"].as_array().unwrap().iter().find(|r| r["method"] == method).unwrap();
        let text = fs::read_to_string(dir.path().join(r["files"][0].as_str().unwrap())).unwrap();
        text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
    };
    let (exact, oracle) = (read("exact"), read("oracle"));
    let worst = exact
        .iter()
        .zip(&oracle)
        .flat_map(|(a, b)| a.iter().zip(b).skip(1).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
    // Weak coupling is only approximate here, but it must share the frame:
    // a frame mismatch would show up as a phase of order (omega_c - omega0) t.
    let weak = read("weak");
    let worst_weak = exact
        .iter()
        .zip(&weak)
        .flat_map(|(a, b)| a.iter().zip(b).skip(1).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    assert!(worst_weak < 0.05, "{worst_weak}");
}

#[test]
fn spectra_tables_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = crowent(&["spectra", "fig2", "--points", "101"], Some(dir.path()));
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 5);
    let m = manifest(dir.path());
    for run in m["runs"].as_array().unwrap() {
        let n2 = run["config"]["n2"].as_u64().unwrap() as u32;
        let config = SystemConfig::symmetric(1.0, 0.05, 0.2, 1, n2, 1.0);
        let text = fs::read_to_string(dir.path().join(run["files"][0].as_str().unwrap())).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("omega,J11,J22,J12"));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 101);
        for row in rows {
            let want = spectral_density(Cavity::First, Cavity::Second, row[0], &config).unwrap();
            assert_eq!(row[3], want);
        }
        assert!(run["results"].as_array().unwrap().is_empty());
    }
}

#[test]
fn config_files_env_dir_and_units() {
    let work = tempfile::tempdir().unwrap();
    let file = work.path().join("custom.toml");
    // omega0 = 2 rescales every frequency; the run is the same physics as omega0 = 1.
    fs::write(&file, "omega0 = 2\nxi0 = 0.1\nomega_c = 2.4\neta = 0.2\nn2 = 2\ndt = 0.1\ntmax = 20\n").unwrap();
    let out_dir = work.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_crowent"))
        .args(["run", file.to_str().unwrap()])
        .env("CROWENT_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["scenario"], "custom");
    let scaled = &m["runs"][0]["results"][0]["summary"];

    let reference = work.path().join("reference");
    assert!(crowent(
        &["run", "fig6a", "--set", "n2=2", "--set", "eta=0.2", "--dt", "0.1", "--tmax", "20", "--set", "stride=1"],
        Some(&reference)
    )
    .status
    .success());
    let plain = &manifest(&reference)["runs"][0]["results"][0]["summary"];
    let diff = (scaled["max_e_n"].as_f64().unwrap() - plain["max_e_n"].as_f64().unwrap()).abs();
    assert!(diff < 1e-12, "{diff}");
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "fig99"],
        vec!["run", "fig3", "--set", "eta"],
        vec!["run", "fig3", "--set", "bogus=1"],
        vec!["run", "fig3", "--method", "rk4"],
        vec!["run", "fig3", "--set", "n2=1"],
        vec!["validate", "fig6a", "--method", "oracle"],
        vec!["validate", "fig3", "--dt", "3.0"],
    ] {
        let out = crowent(&args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = crowent(&["validate", "fig8"], None);
    assert!(out.status.success());
    assert!(!dir.path().join("manifest.json").exists());
}

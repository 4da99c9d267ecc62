//! End-to-end tests of the `strata` binary: exit codes, artifact files,
//! reproducibility, and the machine-readable error channel.

use std::path::Path;
use std::process::{Command, Output};

fn strata(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const PRESET_CONFIG: &str = r#"{
    "stack": {"preset": "au-zns"},
    "dipole": {"wavelength_nm": 900.0, "theta_deg": 0.0}
}"#;

#[test]
fn validate_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = strata(&["validate", "--out", "out"], dir.path());
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("validate:"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("out/validate.csv")).unwrap();
    assert!(csv.starts_with("# strata "));
    assert!(csv.contains("gap_nm,gamma_perp,gamma_quenching,gamma_quasistatic,rel_deviation"));
}

#[test]
fn purcell_orders_presets_by_middle_index() {
    let dir = tempfile::tempdir().unwrap();
    let zns = write_config(dir.path(), "zns.json", PRESET_CONFIG);
    let pva = write_config(
        dir.path(),
        "pva.json",
        r#"{"stack": {"preset": "au-pva"}, "dipole": {"wavelength_nm": 900.0}}"#,
    );
    let gamma_perp = |config: &str, out: &str| -> f64 {
        let o = strata(&["purcell", "--config", config, "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(dir.path().join(out).join("purcell.csv")).unwrap();
        let row = csv.lines().find(|l| l.starts_with("900")).unwrap();
        row.split(',').nth(1).unwrap().parse().unwrap()
    };
    let g_zns = gamma_perp(&zns, "out_zns");
    let g_pva = gamma_perp(&pva, "out_pva");
    assert!(
        g_zns > g_pva,
        "expected ZnS preset above PVA: {g_zns} vs {g_pva}"
    );
}

#[test]
fn cpr_on_vacuum_stack_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "vac.json",
        r#"{
            "stack": {"lower_cladding": "vacuum", "layers": [], "upper_cladding": "vacuum"},
            "dipole": {"band": {"min_nm": 700.0, "max_nm": 1000.0, "n": 4},
                       "z_nm": 50.0, "host_layer": "upper", "theta_deg": 0.0}
        }"#,
    );
    let out = strata(&["cpr", "--config", &config, "--out", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/cpr.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(3) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cpr: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!((cpr - 0.2734).abs() < 0.003, "cpr = {cpr} in {line}");
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn config_error_exits_2_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"stack": {"preset": "au-zns"}, "dipole": {"wavelength_nm": 900.0}, "oops": 1}"#,
    );
    let out = strata(&["purcell", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"]["code"], 2);
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn missing_config_file_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = strata(&["purcell", "--config", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn numeric_error_band_beyond_material_exits_2() {
    // Wavelengths outside the gold table are a config-domain problem.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "oob.json",
        r#"{"stack": {"preset": "au-zns"},
            "dipole": {"band": {"min_nm": 1800.0, "max_nm": 2600.0, "n": 3}}}"#,
    );
    let out = strata(&["purcell", "--config", &config, "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // No partial artifacts.
    assert!(!dir.path().join("out/purcell.csv").exists());
}

#[test]
fn outputs_reproducible_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "band.json",
        r#"{"stack": {"preset": "au-zns"},
            "dipole": {"band": {"min_nm": 880.0, "max_nm": 920.0, "n": 5}}}"#,
    );
    let run = |out_dir: &str, threads: &str| -> String {
        let o = strata(
            &["purcell", "--config", &config, "--out", out_dir, "--threads", threads],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(dir.path().join(out_dir).join("purcell.csv")).unwrap()
    };
    let a = run("out_a", "1");
    let b = run("out_b", "4");
    assert_eq!(a, b, "outputs differ across thread counts");
    let c = run("out_c", "4");
    assert_eq!(b, c, "outputs differ across runs");
}

#[test]
fn emt_subcommand_reports_hyperbolic_band() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "emt.json",
        r#"{"stack": {"preset": "au-zns"},
            "dipole": {"band": {"min_nm": 650.0, "max_nm": 1000.0, "n": 36}}}"#,
    );
    let out = strata(&["emt", "--config", &config, "--out", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("36/36"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("out/emt.csv")).unwrap();
    assert!(csv.contains(
        "wavelength_nm,re_eps_perp,im_eps_perp,re_eps_par,im_eps_par,is_hyperbolic"
    ));
    assert!(csv.lines().filter(|l| l.ends_with(",true")).count() == 36);
}

#[test]
fn farfield_and_spectrum_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", PRESET_CONFIG);
    let ff = strata(&["farfield", "--config", &config, "--out", "out"], dir.path());
    assert!(ff.status.success(), "{}", String::from_utf8_lossy(&ff.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/farfield.csv")).unwrap();
    assert!(csv.contains("side,theta_deg,p"));
    assert!(csv.contains("up,") && csv.contains("down,"));

    let sp = strata(&["spectrum", "--config", &config, "--out", "out"], dir.path());
    assert!(sp.status.success());
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert!(csv.contains("s,K_perp,K_par"));
}

#[test]
fn sweep_subcommand_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "zns", "thickness_nm": 30.0},
                {"material": "gold", "thickness_nm": 30.0},
                {"material": "zns", "thickness_nm": 50.0},
                {"material": "gold", "thickness_nm": 30.0},
                {"material": "zns", "thickness_nm": 30.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0, "host_layer": 2, "z_nm": 25.0},
            "sweep": {
                "parameters": [{"path": "stack.layers[2].thickness_nm", "min": 40.0, "max": 60.0, "n_points": 5}],
                "objective": {"metric": "fp_perp", "wavelength_nm": 900.0}
            }
        }"#,
    );
    let out = strata(&["sweep", "--config", &config, "--out", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("argmax"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert!(csv.contains("stack.layers[2].thickness_nm,objective"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).count(), 6);
}

#[test]
fn json_format_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", PRESET_CONFIG);
    let out = strata(
        &["purcell", "--config", &config, "--out", "out", "--format", "json"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/purcell.json")).unwrap())
            .unwrap();
    assert_eq!(doc["subcommand"], "purcell");
    assert!(doc["rows"][0]["gamma_perp"].as_f64().unwrap() > 1.0);
}

#[test]
fn materials_dir_env_resolves_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mat_dir = dir.path().join("mats");
    std::fs::create_dir_all(&mat_dir).unwrap();
    std::fs::write(
        mat_dir.join("flat.csv"),
        "wavelength_nm,n,k\n400,2.0,0\n1200,2.0,0\n",
    )
    .unwrap();
    let config = write_config(
        dir.path(),
        "env.json",
        r#"{
            "materials": [{"name": "flat2", "model": {"type": "table", "path": "flat.csv"}}],
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "flat2", "thickness_nm": 60.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0, "host_layer": 0}
        }"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(["purcell", "--config", &config, "--out", "out"])
        .current_dir(dir.path())
        .env("STRATA_MATERIALS_DIR", &mat_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

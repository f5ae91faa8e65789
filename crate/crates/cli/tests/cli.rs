use std::path::PathBuf;
use std::process::{Command, Output};

use clarklab_cli::{exit, resolve_config, run, Command as Pipeline, ExperimentConfig, Overrides};

fn clarklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clarklab")).args(args).output().expect("run clarklab")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("clarklab-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path
}

const MIXED: &str = r#"
schema_version = 1
command = "clark"
radii = [0.99, 0.999]
[measure]
atoms = [{ angle_over_2pi = 0.0, weight = 0.5 }]
density = { kind = "constant", value = 0.5 }
"#;

#[test]
fn clark_density_at_minus_one_converges_to_half() {
    let report = run(&ExperimentConfig::from_toml(MIXED).unwrap()).unwrap();
    let at_minus_one: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.check_name == "clark_density" && r.parameters.ends_with("t=3.141593"))
        .collect();
    assert_eq!(at_minus_one.len(), 2);
    assert!(at_minus_one.iter().all(|r| r.pass && r.reference == 0.5));
    assert!(at_minus_one[1].abs_err < at_minus_one[0].abs_err);
}

#[test]
fn jordan_charfun_matches_z_squared_and_exits_zero() {
    let cfg = write_config("jordan.toml", "schema_version = 1\ncommand = \"charfun\"\n[matrix]\nkind = \"jordan\"\n");
    let out = clarklab(&["--config", cfg.to_str().unwrap(), "--grid", "16"]);
    assert_eq!(out.status.code(), Some(exit::PASS));
    let text = String::from_utf8(out.stdout).unwrap();
    let z2: Vec<_> = text.lines().filter(|l| l.starts_with("char_fn_vs_z2,")).collect();
    assert_eq!(z2.len(), 32);
    for line in z2 {
        let abs_err: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(abs_err <= 1e-12);
    }
}

#[test]
fn boundary_sweep_plot_has_grid_times_radii_rows() {
    let cfg = write_config("sweep.toml", &MIXED.replace("\"clark\"", "\"charfun\""));
    let plot = scratch("sweep_plot.csv");
    let out = clarklab(&[
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "256",
        "--radius",
        "0.9",
        "--radius",
        "0.99",
        "--radius",
        "0.999",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(exit::PASS));
    let text = std::fs::read_to_string(&plot).unwrap();
    assert!(text.starts_with("x,series,value\n"));
    assert_eq!(text.lines().count(), 1 + 256 * 3);
    assert!(!text.contains('\r'));
}

#[test]
fn jump_plot_has_four_series() {
    let cfg = write_config("jump.toml", &MIXED.replace("\"clark\"", "\"jump\""));
    let plot = scratch("jump_plot.csv");
    clarklab(&["--config", cfg.to_str().unwrap(), "--radius", "0.999", "--plot", plot.to_str().unwrap()]);
    let text = std::fs::read_to_string(&plot).unwrap();
    let mut series: Vec<_> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    series.dedup();
    assert_eq!(series, ["lhs_im", "lhs_re", "rhs_im", "rhs_re"]);
}

#[test]
fn dilate_exits_zero_on_a_cnu_partial_isometry() {
    let cfg = write_config(
        "dilate.toml",
        "schema_version = 1\ncommand = \"dilate\"\nseed = 3\n[matrix]\nkind = \"random_cnu\"\nsize = 5\ndefects = 2\nseed = 9\n",
    );
    let out = clarklab(&["--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(exit::PASS));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["all_pass"], true);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn config_errors_exit_two_with_a_record() {
    let out = clarklab(&["verify-all", "--radius", "0.9", "--radius", "0.5"]);
    assert_eq!(out.status.code(), Some(exit::CONFIG_ERROR));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "ConfigInvalid");
    assert_eq!(record["exit_code"], 2);

    let bad = write_config("bad.toml", "schema_version = 1\ncommand = \"charfun\"\n[matrix]\nkind = \"nope\"\n");
    let out = clarklab(&["--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::CONFIG_ERROR));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ConfigParse"));

    let out = clarklab(&[]);
    assert_eq!(out.status.code(), Some(exit::CONFIG_ERROR));
}

#[test]
fn module_input_errors_are_reported() {
    // diag(0.5, 0.5) does not vanish on its defect space
    let cfg = write_config(
        "diag.toml",
        "schema_version = 1\ncommand = \"dilate\"\n[matrix]\nkind = \"dense\"\nentries = [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]\n",
    );
    let out = clarklab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::CONFIG_ERROR));
    assert!(String::from_utf8(out.stderr).unwrap().contains("NotPartialIsometry"));
}

#[test]
fn failing_checks_exit_one() {
    // the Clark density at r = 0.99 is still far from ½ next to the atom
    let cfg = write_config("near_atom.toml", MIXED);
    let out = clarklab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::CHECK_FAILURE));
}

#[test]
fn overrides_take_precedence() {
    let cfg_path = write_config("override.toml", MIXED);
    let o = Overrides {
        command: Some(Pipeline::Jump),
        seed: Some(11),
        grid: Some(8),
        radii: vec![0.995],
        ..Overrides::default()
    };
    let cfg = resolve_config(Some(&cfg_path), &o).unwrap();
    assert_eq!((cfg.command, cfg.seed, cfg.grid), (Pipeline::Jump, 11, 8));
    assert_eq!(cfg.radii, [0.995]);
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = write_config("threads.toml", &MIXED.replace("\"clark\"", "\"charfun\""));
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_clarklab"))
            .args(["--config", cfg.to_str().unwrap(), "--grid", "128"])
            .env("CLARKLAB_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run_with("1"), run_with("3"));
}

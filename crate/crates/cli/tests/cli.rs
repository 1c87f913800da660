use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contact-flux"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn flux_sin_z_gives_first_unit_vector() {
    let o = run(&["flux", "--manifold", "torus3", "--H", "sin(z)/(2*pi)^2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    for key in ["formula_periods", "direct_periods"] {
        let p = floats(&r[key]);
        assert!((p[0] - 1.0).abs() < 1e-8 && p[1].abs() < 1e-8 && p[2] == 0.0, "{key}: {p:?}");
    }
    assert_eq!(r["cycles"][0], "T_xz");
    assert!(r["orientation"].as_str().unwrap().contains("ascending"));
    assert!(r.get("wall_time_s").is_none());
}

#[test]
fn flux_of_non_basic_exits_3() {
    let o = run(&["flux", "--manifold", "torus3", "--H", "sin(x)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not basic"));
    assert!(o.stdout.is_empty());
}

#[test]
fn flux_of_y0_is_along_first_cycle() {
    let o = run(&["flux", "--manifold", "torus-sphere2", "--H", "y0"]);
    assert_eq!(o.status.code(), Some(0));
    let p = floats(&json(&o)["direct_periods"]);
    assert!(p[0].abs() > 1.0);
    assert!(p[1].abs() < 1e-8 * p[0].abs() && p[2].abs() < 1e-8 * p[0].abs());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["flux", "--manifold", "torus3", "--H", "sin(z"],
        vec!["flux", "--manifold", "klein", "--H", "1"],
        vec!["flux", "--manifold", "torus3"],
        vec!["verify", "nonsense"],
        vec!["flow", "--manifold", "torus3", "--H", "1", "--point", "0,0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_reports_are_byte_identical() {
    let a = bin().args(["verify", "all"]).env("CONTACT_FLUX_THREADS", "1").output().unwrap();
    let b = bin().args(["verify", "all"]).env("CONTACT_FLUX_THREADS", "4").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    let suites: Vec<&str> = r["items"].as_array().unwrap().iter().map(|i| i["suite"].as_str().unwrap()).collect();
    let mut sorted = suites.clone();
    sorted.sort_unstable();
    assert_eq!(suites, sorted);
    assert_eq!(suites.len(), 7);
    assert_eq!(r["failures"], 0);
}

#[test]
fn verify_single_suites() {
    let o = run(&["verify", "dual-basis"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["items"][0]["checks"].as_array().unwrap().len(), 2);
    let o = run(&["verify", "prop3", "--format", "text", "--timing"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS A1") && text.contains("PASS A9") && text.contains("wall time"));
}

#[test]
fn resolution_is_echoed() {
    let o = run(&["flux", "--manifold", "torus3", "--H", "cos(z)", "--resolution", "5"]);
    assert_eq!(json(&o)["grid"]["torus_nodes"], 5);
    assert_eq!(run(&["flux", "--manifold", "torus3", "--H", "cos(z)", "--resolution", "0"]).status.code(), Some(2));
}

#[test]
fn rank_family_from_config() {
    let cfg = scratch("families.toml");
    std::fs::write(
        &cfg,
        "[[family]]\nname = \"z-modes\"\nmanifold = \"torus3\"\nfunctions = [\"1\", \"sin(z)\", \"cos(z)\", \"sin(2*z)\", \"cos(3*z)\"]\n",
    )
    .unwrap();
    let o = run(&["rank", "--config", cfg.to_str().unwrap(), "--family", "z-modes"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["rank"], 2);
    assert_eq!(r["excluded_cycles"][0], "T_xy");
    let o = run(&["rank", "--manifold", "torus3", "--H", "1", "--H", "sin(x+z)"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn cycles_of_configured_manifold() {
    let cfg = scratch("manifolds.toml");
    std::fs::write(
        &cfg,
        r#"
[[manifold]]
name = "t1xs2"
coords = ["t", "u", "v", "w"]
factors = [{ torus = 1, period = 2 }, { sphere = 2 }]

[[manifold.cycle]]
name = "sphere"
torus = [0.5]
spheres = ["vary"]

[[manifold.cycle]]
name = "whole"
torus = ["vary"]
spheres = ["vary"]
"#,
    )
    .unwrap();
    let o = run(&["cycles", "--manifold", "t1xs2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    let v = r["cycles"][1]["volume"].as_f64().unwrap();
    assert!((v - 8.0 * std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(r["cycles"][0]["dimension"], 2);
}

#[test]
fn flow_writes_trajectory_file() {
    let out = scratch("flow.json");
    let o = run(&[
        "flow", "--manifold", "torus-sphere(2)", "--H", "y0", "--point", "0,0,0,1,0,0", "--time", "0.5", "--samples", "6",
        "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["trajectory"].as_array().unwrap().len(), 6);
    assert!(r["alpha_residual"].as_f64().unwrap() < 1e-6);
    let o = run(&["flow", "--manifold", "torus3", "--H", "sin(x)", "--point", "0,0,0", "--general", "--step", "1e-2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["hamiltonian"]["basic"], false);
}

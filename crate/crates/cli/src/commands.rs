//! Subcommand implementations. Each returns an [`Outcome`] holding the JSON
//! report, a plain-text rendering, and whether every assertion passed.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use contact_flux::contact::{build_contact, contact_vector_field, general_contact_vector_field, is_basic, ContactData};
use contact_flux::dynamics::{flow, verify_strict};
use contact_flux::flux::{flux_strict, image_rank, TimeDependentHamiltonian, ORIENTATION_CONVENTION};
use contact_flux::manifolds::{cycle_volume, intersection_number, CycleSpec, SphereSlot, TorusSlot};
use contact_flux::verify::{run_suite, Check, SUITES};
use contact_flux::{registry, Error, ManifoldSpec, PeriodVector, QuadratureGrid, ScalarField};

use crate::config::Config;
use crate::expr::{parse_constant, parse_function};
use crate::report::{num, nums};

/// Closed-form strictness residual allowed along a flow.
pub const FLOW_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unknown names, unparsable expressions: exit 2.
    Usage(String),
    /// Hamiltonian is not basic: exit 3.
    NotBasic(String),
    /// Computation failed: exit 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::NotBasic(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::NotBasic(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotBasic => CliError::NotBasic(format!("not basic: {e}")),
            Error::UnknownManifold(_)
            | Error::UnknownCoordinate(_)
            | Error::InvalidArgument(_)
            | Error::PointDimension { .. }
            | Error::OffSphere(_)
            | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub passed: bool,
}

/// Settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct Settings {
    pub grid: QuadratureGrid,
    pub timing: bool,
    pub config: Option<Config>,
}

fn grid_json(g: &QuadratureGrid) -> Value {
    json!({"torus_nodes": g.torus_nodes, "sphere_nodes": g.sphere_nodes})
}

fn periods_json(p: &PeriodVector) -> Value {
    nums(&p.values)
}

fn contact(name: &str) -> CliResult<ContactData> {
    build_contact(name).map_err(|e| match e {
        Error::UnknownManifold(_) | Error::Unsupported(_) => {
            CliError::Usage(format!("`{name}` is not a registered contact manifold (torus3, torus-sphere(n), n = 1..3)"))
        }
        other => other.into(),
    })
}

fn parse_h(src: &str, m: &Arc<ManifoldSpec>) -> CliResult<ScalarField> {
    parse_function(src, m).map_err(|e| CliError::Usage(format!("cannot parse `{src}` {e}")))
}

fn assertion(name: &str, passed: bool) -> Value {
    json!({"name": name, "passed": passed})
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Flux of the strictly contact isotopy generated by a basic Hamiltonian,
/// computed along both paths.
pub fn cmd_flux(manifold: &str, h_src: &str, tol: f64, s: &Settings) -> CliResult<Outcome> {
    let start = Instant::now();
    let c = contact(manifold)?;
    let h = parse_h(h_src, c.manifold())?;
    if !is_basic(&h, &c) {
        return Err(CliError::NotBasic(format!("`{h_src}` is not basic on {}: R.H != 0", c.name())));
    }
    let th = TimeDependentHamiltonian::autonomous(&c, h.clone())?;
    let r = flux_strict(&th, &c, &s.grid, tol)?;
    let closed = r.formula_form.d().residual() <= 1e-10;
    let passed = r.agree && closed;
    let mut report = json!({
        "command": "flux",
        "manifold": c.name(),
        "contact_form": c.description,
        "hamiltonian": {"input": h_src, "normal_form": h.to_string()},
        "flux_form": r.formula_form.to_string(),
        "cycles": r.formula.labels,
        "formula_periods": periods_json(&r.formula),
        "direct_periods": periods_json(&r.direct),
        "max_difference": num(r.max_diff),
        "tolerance": num(tol),
        "cycle_tolerances": nums(&r.cycle_tolerances),
        "orientation": ORIENTATION_CONVENTION,
        "grid": grid_json(&s.grid),
        "assertions": [assertion("formula and direct periods agree", r.agree), assertion("flux form is closed", closed)],
        "passed": passed,
    });
    let elapsed = start.elapsed().as_secs_f64();
    if s.timing {
        report["wall_time_s"] = num(elapsed);
    }
    let mut text = format!("{} on {}\nH = {}\n", mark(passed), c.name(), h_src);
    text += &format!("formula path: {}\ndirect path:  {}\n", r.formula, r.direct);
    text += &format!("max difference {:.3e} (tolerance {:.1e})\n", r.max_diff, tol);
    if s.timing {
        text += &format!("wall time {elapsed:.3}s\n");
    }
    Ok(Outcome { report, text, passed })
}

fn check_json(c: &Check, timing: bool) -> Value {
    let mut v = json!({
        "id": c.id,
        "name": c.name,
        "passed": c.passed,
        "measured": num(c.measured),
        "threshold": num(c.threshold),
        "detail": c.detail,
    });
    if let (true, Some(t)) = (timing, c.elapsed) {
        v["wall_time_s"] = num(t);
    }
    v
}

/// Runs a verification suite; `all` runs every suite concurrently.
pub fn cmd_verify(suite: &str, s: &Settings) -> CliResult<Outcome> {
    let start = Instant::now();
    let mut names: Vec<&str> = if suite == "all" {
        SUITES.iter().copied().filter(|n| *n != "all").collect()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::Usage(format!("unknown suite `{suite}`; expected one of {}", SUITES.join(", "))));
    };
    names.sort_unstable();
    let results: Vec<(&str, contact_flux::Result<Vec<Check>>)> =
        names.par_iter().map(|n| (*n, run_suite(n, &s.grid))).collect();
    let mut items = Vec::new();
    let mut text = String::new();
    let mut failures = 0usize;
    for (name, res) in results {
        let checks = res.map_err(|e| CliError::Failure(format!("suite {name}: {e}")))?;
        failures += checks.iter().filter(|c| !c.passed).count();
        text += &format!("[{name}]\n");
        for c in &checks {
            text += &format!("{}\n", if s.timing { c.to_string() } else { Check { elapsed: None, ..c.clone() }.to_string() });
        }
        items.push(json!({
            "suite": name,
            "passed": checks.iter().all(|c| c.passed),
            "checks": checks.iter().map(|c| check_json(c, s.timing)).collect::<Vec<_>>(),
        }));
    }
    let passed = failures == 0;
    let mut report = json!({
        "command": "verify",
        "suite": suite,
        "items": items,
        "failures": failures,
        "grid": grid_json(&s.grid),
        "passed": passed,
    });
    let elapsed = start.elapsed().as_secs_f64();
    if s.timing {
        report["wall_time_s"] = num(elapsed);
        text += &format!("wall time {elapsed:.2}s\n");
    }
    text += &format!("{}: {failures} failing checks\n", mark(passed));
    Ok(Outcome { report, text, passed })
}

/// Dimension of the span of flux classes of a family of basic functions.
pub fn cmd_rank(manifold: Option<&str>, functions: &[String], family: Option<&str>, s: &Settings) -> CliResult<Outcome> {
    let (manifold, functions): (String, Vec<String>) = match family {
        Some(f) => {
            let cfg = s.config.as_ref().ok_or_else(|| CliError::Usage("--family needs --config".into()))?;
            let fam = cfg.find_family(f).ok_or_else(|| CliError::Usage(format!("no family `{f}` in config")))?;
            let mut list = fam.functions.clone();
            list.extend(functions.iter().cloned());
            (fam.manifold.clone(), list)
        }
        None => (
            manifold.ok_or_else(|| CliError::Usage("--manifold or --family is required".into()))?.to_string(),
            functions.to_vec(),
        ),
    };
    if functions.is_empty() {
        return Err(CliError::Usage("no functions given (use --H or --family)".into()));
    }
    let c = contact(&manifold)?;
    let hs = functions.iter().map(|f| parse_h(f, c.manifold())).collect::<CliResult<Vec<_>>>()?;
    for (src, h) in functions.iter().zip(&hs) {
        if !is_basic(h, &c) {
            return Err(CliError::NotBasic(format!("`{src}` is not basic on {}", c.name())));
        }
    }
    let r = image_rank(&hs, &c, &s.grid)?;
    let report = json!({
        "command": "rank",
        "manifold": c.name(),
        "functions": functions,
        "cycles": c.entry.labels(),
        "periods": r.vectors.iter().map(periods_json).collect::<Vec<_>>(),
        "rank": r.rank,
        "singular_values": nums(&r.singular_values),
        "excluded_cycles": r.excluded,
        "grid": grid_json(&s.grid),
        "passed": true,
    });
    let mut text = format!("rank {} on {} over {} functions\n", r.rank, c.name(), functions.len());
    for (f, v) in functions.iter().zip(&r.vectors) {
        text += &format!("  {f}: {v}\n");
    }
    text += &format!("cycles with identically zero period: {:?}\n", r.excluded);
    Ok(Outcome { report, text, passed: true })
}

pub struct FlowArgs<'a> {
    pub manifold: &'a str,
    pub h: &'a str,
    pub point: &'a str,
    pub time: &'a str,
    pub step: f64,
    pub samples: usize,
    pub general: bool,
}

/// Integrates the contact vector field of `H` from a point.
pub fn cmd_flow(a: &FlowArgs<'_>, _s: &Settings) -> CliResult<Outcome> {
    let c = contact(a.manifold)?;
    let h = parse_h(a.h, c.manifold())?;
    let basic = is_basic(&h, &c);
    if !basic && !a.general {
        return Err(CliError::NotBasic(format!(
            "`{}` is not basic on {}; pass --general to integrate its (non-strict) contact field",
            a.h,
            c.name()
        )));
    }
    let p = a
        .point
        .split(',')
        .map(|t| parse_constant(t.trim()).map_err(|e| CliError::Usage(format!("point component `{t}` {e}"))))
        .collect::<CliResult<Vec<f64>>>()?;
    c.manifold().check_point(&p)?;
    let t = parse_constant(a.time).map_err(|e| CliError::Usage(format!("time `{}` {e}", a.time)))?;
    if !(a.step > 0.0 && a.step.is_finite()) || a.samples < 2 {
        return Err(CliError::Usage("--step must be positive and --samples at least 2".into()));
    }
    let x = if basic { contact_vector_field(&h, &c)? } else { general_contact_vector_field(&h, &c)? };
    let r = flow(&x, t, &p, a.step)?;
    let strict = verify_strict(&h, &c, t, std::slice::from_ref(&p), a.step)?;
    let last = r.trajectory.len() - 1;
    let picks: Vec<usize> = {
        let mut v: Vec<usize> = (0..a.samples).map(|k| (k * last + (a.samples - 1) / 2) / (a.samples - 1)).collect();
        v.dedup();
        v
    };
    let preserved = strict.alpha_residual < FLOW_TOL && strict.volume_residual < FLOW_TOL;
    let passed = !basic || preserved;
    let report = json!({
        "command": "flow",
        "manifold": c.name(),
        "hamiltonian": {"input": a.h, "normal_form": h.to_string(), "basic": basic},
        "vector_field": x.to_string(),
        "start": nums(&p),
        "time": num(t),
        "step": num(r.step),
        "order": r.order,
        "coordinates": c.manifold().coord_names(),
        "times": nums(&picks.iter().map(|&i| r.times[i]).collect::<Vec<_>>()),
        "trajectory": picks.iter().map(|&i| nums(&r.trajectory[i])).collect::<Vec<_>>(),
        "alpha_residual": num(strict.alpha_residual),
        "volume_residual": num(strict.volume_residual),
        "tolerance": num(FLOW_TOL),
        "assertions": if basic { vec![assertion("flow preserves alpha and volume", preserved)] } else { vec![] },
        "passed": passed,
    });
    let mut text = format!("flow of H = {} on {} for t = {t}, step {}\n", a.h, c.name(), r.step);
    text += &format!("start {:?}\nend   {:?}\n", r.start(), r.end());
    text += &format!(
        "alpha residual {:.3e}, volume residual {:.3e}{}\n",
        strict.alpha_residual,
        strict.volume_residual,
        if basic { format!(" ({})", mark(preserved)) } else { " (H not basic, no strictness expected)".into() }
    );
    Ok(Outcome { report, text, passed })
}

fn slot_json(c: &CycleSpec) -> Value {
    let torus: Vec<Value> = c
        .torus
        .iter()
        .map(|t| match t {
            TorusSlot::Vary => Value::from("vary"),
            TorusSlot::Pinned(v) => num(*v),
        })
        .collect();
    let spheres: Vec<Value> = c
        .spheres
        .iter()
        .map(|t| match t {
            SphereSlot::Vary => Value::from("vary"),
            SphereSlot::Pinned(y) => nums(y),
        })
        .collect();
    json!({"torus": torus, "spheres": spheres})
}

/// Lists the cycles of a registry or configured manifold with their volumes.
pub fn cmd_cycles(manifold: &str, s: &Settings) -> CliResult<Outcome> {
    let configured = s.config.as_ref().and_then(|c| c.find_manifold(manifold));
    let (m, basis, circles) = match configured {
        Some(mc) => {
            let (m, cycles) = mc.build().map_err(CliError::Usage)?;
            (m, cycles, Vec::new())
        }
        None => {
            let e = registry(manifold)?;
            (e.manifold.clone(), e.basis.clone(), e.circles.clone())
        }
    };
    let mut rows = Vec::new();
    let mut text = format!("{} (dimension {}, coordinates {})\n", m.name(), m.dim(), m.coord_names().join(", "));
    let mut passed = true;
    for c in basis.iter().chain(&circles) {
        let analytic = c.volume(&m);
        let quad = cycle_volume(&m, c, &s.grid)?;
        let ok = (analytic - quad).abs() <= 1e-9 * analytic.max(1.0);
        passed &= ok;
        rows.push(json!({
            "name": c.name,
            "dimension": c.dim(&m),
            "sign": num(c.sign),
            "slots": slot_json(c),
            "volume": num(analytic),
            "quadrature_volume": num(quad),
        }));
        text += &format!("  {:<12} dim {}  volume {:.12}  quadrature {:.12} {}\n", c.name, c.dim(&m), analytic, quad, mark(ok));
    }
    let intersections: Vec<Value> = circles
        .iter()
        .map(|ci| Value::Array(basis.iter().map(|b| json!(intersection_number(&m, ci, b))).collect()))
        .collect();
    if !circles.is_empty() {
        text += "intersection numbers (circles x basis):\n";
        for (ci, row) in circles.iter().zip(&intersections) {
            text += &format!("  {:<12} {row}\n", ci.name);
        }
    }
    let report = json!({
        "command": "cycles",
        "manifold": m.name(),
        "dimension": m.dim(),
        "coordinates": m.coord_names(),
        "cycles": rows,
        "intersections": intersections,
        "orientation": ORIENTATION_CONVENTION,
        "grid": grid_json(&s.grid),
        "assertions": [assertion("analytic and quadrature volumes agree", passed)],
        "passed": passed,
    });
    Ok(Outcome { report, text, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use contact_flux::DEFAULT_GRID;

    fn settings() -> Settings {
        Settings { grid: DEFAULT_GRID, timing: false, config: None }
    }

    #[test]
    fn flux_torus3() {
        let o = cmd_flux("torus3", "sin(z)/(2*pi)^2", 1e-8, &settings()).unwrap();
        assert!(o.passed);
        let p = o.report["direct_periods"].as_array().unwrap();
        assert!((p[0].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert!(o.report.get("wall_time_s").is_none());
    }

    #[test]
    fn error_mapping() {
        assert_eq!(cmd_flux("torus3", "sin(x)", 1e-8, &settings()).unwrap_err().exit_code(), 3);
        assert_eq!(cmd_flux("torus3", "sin(", 1e-8, &settings()).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_flux("klein", "1", 1e-8, &settings()).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_verify("nope", &settings()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn rank_and_cycles() {
        let fs: Vec<String> = ["1", "sin(z)", "cos(z)", "sin(2*z)"].iter().map(|s| s.to_string()).collect();
        let o = cmd_rank(Some("torus3"), &fs, None, &settings()).unwrap();
        assert_eq!(o.report["rank"], 2);
        let o = cmd_cycles("torus-sphere(2)", &settings()).unwrap();
        assert!(o.passed);
        assert_eq!(o.report["intersections"][1][1], -1);
    }

    #[test]
    fn flow_samples() {
        let a = FlowArgs { manifold: "torus3", h: "cos(z)", point: "0, 0, 1", time: "1", step: 1e-2, samples: 5, general: false };
        let o = cmd_flow(&a, &settings()).unwrap();
        assert!(o.passed);
        assert_eq!(o.report["trajectory"].as_array().unwrap().len(), 5);
        let b = FlowArgs { h: "sin(x)", ..a };
        assert_eq!(cmd_flow(&b, &settings()).unwrap_err().exit_code(), 3);
    }
}

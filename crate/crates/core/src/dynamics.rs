//! Fixed-step fourth-order Runge–Kutta flows with Jacobian transport.
//!
//! Points live in the ambient coordinates; sphere factors are renormalized
//! after every step and transported frame vectors projected back onto the
//! tangent space.

use std::f64::consts::{PI, TAU};

use crate::contact::{general_contact_vector_field, ContactData};
use crate::error::{Error, Result};
use crate::forms::VectorFieldSym;
use crate::funcalg::ScalarField;
use crate::linalg;
use crate::manifolds::ManifoldSpec;

/// Largest accepted step.
pub const MAX_STEP: f64 = 1e-2;

/// Trajectory and transported tangent frame of one flow.
#[derive(Clone, Debug)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    /// Initial tangent frame at the start point.
    pub initial_frame: Vec<Vec<f64>>,
    /// Image of the initial frame under the differential of the time-t map.
    pub frame: Vec<Vec<f64>>,
    pub step: f64,
    pub order: u32,
}

impl FlowResult {
    pub fn start(&self) -> &[f64] {
        &self.trajectory[0]
    }

    pub fn end(&self) -> &[f64] {
        self.trajectory.last().expect("nonempty trajectory")
    }
}

/// A vector field with its ambient Jacobian, ready for repeated evaluation.
struct CompiledField<'a> {
    m: &'a ManifoldSpec,
    x: &'a VectorFieldSym,
    jac: Vec<Vec<ScalarField>>,
}

impl<'a> CompiledField<'a> {
    fn new(x: &'a VectorFieldSym) -> Result<Self> {
        let m = x.manifold();
        let n = m.ambient_dim();
        let jac = x
            .components()
            .iter()
            .map(|c| (0..n).map(|j| c.partial(j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { m, x, jac })
    }

    /// Right-hand side of the coupled state and variational equations.
    fn rhs(&self, p: &[f64], frame: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let v = self.x.evaluate(p);
        let jac: Vec<Vec<f64>> =
            self.jac.iter().map(|row| row.iter().map(|f| if f.is_empty() { 0.0 } else { f.eval_re(p) }).collect()).collect();
        let dframe = frame
            .iter()
            .map(|col| jac.iter().map(|row| row.iter().zip(col).map(|(a, b)| a * b).sum()).collect())
            .collect();
        (v, dframe)
    }

    fn step(&self, p: &[f64], frame: &[Vec<f64>], h: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let axpy = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
        let axpy_f = |a: &[Vec<f64>], b: &[Vec<f64>], s: f64| -> Vec<Vec<f64>> {
            a.iter().zip(b).map(|(x, y)| axpy(x, y, s)).collect()
        };
        let (k1, j1) = self.rhs(p, frame);
        let (k2, j2) = self.rhs(&axpy(p, &k1, h / 2.0), &axpy_f(frame, &j1, h / 2.0));
        let (k3, j3) = self.rhs(&axpy(p, &k2, h / 2.0), &axpy_f(frame, &j2, h / 2.0));
        let (k4, j4) = self.rhs(&axpy(p, &k3, h), &axpy_f(frame, &j3, h));
        let mut q: Vec<f64> =
            (0..p.len()).map(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
        let mut f: Vec<Vec<f64>> = (0..frame.len())
            .map(|c| {
                (0..p.len())
                    .map(|i| frame[c][i] + h / 6.0 * (j1[c][i] + 2.0 * j2[c][i] + 2.0 * j3[c][i] + j4[c][i]))
                    .collect()
            })
            .collect();
        self.m.normalize_spheres(&mut q);
        for col in &mut f {
            self.m.project_tangent(&q, col);
        }
        (q, f)
    }
}

/// Integrates `X` for time `t` from `p` with step at most `h`.
pub fn flow(x: &VectorFieldSym, t: f64, p: &[f64], h: f64) -> Result<FlowResult> {
    let m = x.manifold();
    m.check_point(p)?;
    if !(h > 0.0 && h <= MAX_STEP * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!("step {h} must lie in (0, {MAX_STEP}]")));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let compiled = CompiledField::new(x)?;
    let steps = (t.abs() / h).ceil() as usize;
    let dt = if steps == 0 { 0.0 } else { t / steps as f64 };
    let initial_frame = m.tangent_frame(p);
    let mut state = p.to_vec();
    let mut frame = initial_frame.clone();
    let mut times = vec![0.0];
    let mut trajectory = vec![state.clone()];
    for k in 0..steps {
        let (q, f) = compiled.step(&state, &frame, dt);
        if q.iter().chain(f.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        state = q;
        frame = f;
        times.push((k + 1) as f64 * dt);
        trajectory.push(state.clone());
    }
    Ok(FlowResult { times, trajectory, initial_frame, frame, step: dt.abs(), order: 4 })
}

/// Flow of the contact vector field of `H` (basic or not).
pub fn flow_hamiltonian(h: &ScalarField, c: &ContactData, t: f64, p: &[f64], step: f64) -> Result<FlowResult> {
    flow(&general_contact_vector_field(h, c)?, t, p, step)
}

/// Preservation residuals of a time-t map over sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictnessReport {
    /// `max |(phi_t^* alpha - alpha)(v)|` over frame vectors `v`.
    pub alpha_residual: f64,
    /// `max |mu(phi_t(p))(J v_1, ..) / mu(p)(v_1, ..) - 1|`.
    pub volume_residual: f64,
    pub samples: usize,
}

/// Pulls back `alpha` and `mu` along the flow of the contact field of `H`.
pub fn verify_strict(h: &ScalarField, c: &ContactData, t: f64, points: &[Vec<f64>], step: f64) -> Result<StrictnessReport> {
    let x = general_contact_vector_field(h, c)?;
    let mut alpha_residual: f64 = 0.0;
    let mut volume_residual: f64 = 0.0;
    for p in points {
        let r = flow(&x, t, p, step)?;
        let q = r.end();
        for (v0, v1) in r.initial_frame.iter().zip(&r.frame) {
            let before = c.alpha.eval_form(p, std::slice::from_ref(v0))?;
            let after = c.alpha.eval_form(q, std::slice::from_ref(v1))?;
            alpha_residual = alpha_residual.max((after - before).abs());
        }
        let before = c.mu.eval_form(p, &r.initial_frame)?;
        let after = c.mu.eval_form(q, &r.frame)?;
        volume_residual = volume_residual.max((after / before - 1.0).abs());
    }
    Ok(StrictnessReport { alpha_residual, volume_residual, samples: points.len() })
}

/// Determinant of the transported frame in the initial frame's coordinates
/// (torus manifolds: the Jacobian determinant of the time-t map).
pub fn jacobian_determinant(r: &FlowResult) -> f64 {
    let rows: Vec<Vec<f64>> = r.frame.clone();
    let base = linalg::det(&r.initial_frame);
    linalg::det(&rows) / base
}

/// Step-halving study of the endpoint error.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    /// Differences between consecutive resolutions.
    pub differences: Vec<f64>,
    /// `log2` of consecutive difference ratios; about 4 for RK4.
    pub orders: Vec<f64>,
}

/// Runs the flow with `h, h/2, .., h/2^levels` and estimates the order.
pub fn convergence_order(x: &VectorFieldSym, t: f64, p: &[f64], h: f64, levels: usize) -> Result<ConvergenceStudy> {
    let steps: Vec<f64> = (0..=levels).map(|k| h / 2f64.powi(k as i32)).collect();
    let ends = steps.iter().map(|&s| flow(x, t, p, s).map(|r| r.end().to_vec())).collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = ends
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).fold(0.0f64, |a, (u, v)| a.max((u - v).abs())))
        .collect();
    let orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceStudy { steps, differences, orders })
}

/// A periodic orbit found by integration.
#[derive(Clone, Debug)]
pub struct ClosedOrbit {
    pub period: f64,
    /// Unwrapped change of every ambient coordinate over one period.
    pub displacement: Vec<f64>,
    /// Distance between start and end point.
    pub gap: f64,
}

fn wrapped_distance(m: &ManifoldSpec, p: &[f64], q: &[f64]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..p.len() {
        let mut delta = q[i] - p[i];
        if let Some(per) = m.period(i) {
            delta -= per * (delta / per).round();
        }
        d = d.max(delta.abs());
    }
    d
}

/// Follows `X` from `p` until the orbit returns within `tol`; fails with
/// [`Error::NonPeriodic`] when that does not happen before `t_max`.
pub fn closed_orbit(x: &VectorFieldSym, p: &[f64], h: f64, t_max: f64, tol: f64) -> Result<ClosedOrbit> {
    let m = x.manifold();
    m.check_point(p)?;
    let compiled = CompiledField::new(x)?;
    let speed = x.evaluate(p).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if speed == 0.0 {
        return Err(Error::NonPeriodic(0.0));
    }
    let escape = (10.0 * speed * h).min(1e-2);
    let mut left = false;
    let mut hist: Vec<(f64, Vec<f64>, f64)> = vec![(0.0, p.to_vec(), 0.0)];
    let mut best = f64::INFINITY;
    let steps = (t_max / h).ceil() as usize;
    for k in 1..=steps {
        let (q, _) = compiled.step(&hist.last().expect("history").1, &[], h);
        let d = wrapped_distance(m, p, &q);
        hist.push((k as f64 * h, q, d));
        if hist.len() > 3 {
            hist.remove(0);
        }
        if d > escape {
            left = true;
        }
        if !left || hist.len() < 3 {
            continue;
        }
        let (d0, d1, d2) = (hist[0].2, hist[1].2, hist[2].2);
        if d1 <= d0 && d1 <= d2 && d1 < escape {
            // golden-section search over one RK4 step from the first stored state
            let (t0, ref s0, _) = hist[0];
            let f = |tau: f64| wrapped_distance(m, p, &compiled.step(s0, &[], tau).0);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = (0.0, 2.0 * h);
            let (mut c, mut e) = (b - g * (b - a), a + g * (b - a));
            for _ in 0..200 {
                if f(c) < f(e) {
                    b = e;
                } else {
                    a = c;
                }
                c = b - g * (b - a);
                e = a + g * (b - a);
            }
            let tau = 0.5 * (a + b);
            let end = compiled.step(s0, &[], tau).0;
            let gap = wrapped_distance(m, p, &end);
            best = best.min(gap);
            if gap < tol {
                let displacement = end.iter().zip(p).map(|(a, b)| a - b).collect();
                return Ok(ClosedOrbit { period: t0 + tau, displacement, gap });
            }
        }
    }
    Err(Error::NonPeriodic(best))
}

/// Classification of the Reeb orbits in the plane `z = z0` of `torus3`.
#[derive(Clone, Debug, PartialEq)]
pub enum OrbitKind {
    /// Slope `p/q` in lowest terms (`q > 0`); vertical orbits have `q = 0`.
    Closed { p: i64, q: i64, period: f64 },
    /// No convergent with denominator up to the bound matches the slope.
    Dense { discrepancies: Vec<(usize, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReebOrbitAnalysis {
    pub z0: f64,
    /// `dy/dx = -tan z0`; `None` for vertical orbits.
    pub slope: Option<f64>,
    pub kind: OrbitKind,
}

/// Largest denominator considered when testing the slope for rationality.
pub const DENOMINATOR_BOUND: i64 = 1_000_000;
/// Box grid used for the equidistribution statistic.
pub const DISCREPANCY_GRID: usize = 10;

/// Best rational approximation `p/q` with `q <= bound` that matches `s` to
/// within `1e-14 (|s| + 1)`.
pub fn rational_slope(s: f64, bound: i64) -> Option<(i64, i64)> {
    let tol = 1e-14 * (s.abs() + 1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut x = s;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > bound {
            return None;
        }
        if (s - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

/// Box discrepancy of the points `(x0 + t cos z0, y0 - t sin z0)` at
/// `t = 0, 1, .., n-1`, taken modulo `2 pi`, against the uniform measure.
pub fn orbit_discrepancy(z0: f64, n: usize, grid: usize) -> f64 {
    let (s, c) = z0.sin_cos();
    let mut counts = vec![0usize; grid * grid];
    for k in 0..n {
        let t = k as f64;
        let u = (t * c).rem_euclid(TAU) / TAU;
        let v = (-t * s).rem_euclid(TAU) / TAU;
        let i = ((u * grid as f64) as usize).min(grid - 1);
        let j = ((v * grid as f64) as usize).min(grid - 1);
        counts[i * grid + j] += 1;
    }
    let expected = 1.0 / (grid * grid) as f64;
    counts.iter().fold(0.0, |a, &k| a.max((k as f64 / n as f64 - expected).abs()))
}

/// Slope, rationality, and closing period or equidistribution statistic of
/// the Reeb orbits of `torus3` in the plane `z = z0`.
pub fn reeb_orbit_analysis(z0: f64) -> ReebOrbitAnalysis {
    let (s, c) = z0.sin_cos();
    if c.abs() < 1e-15 {
        return ReebOrbitAnalysis { z0, slope: None, kind: OrbitKind::Closed { p: -s.signum() as i64, q: 0, period: TAU } };
    }
    let slope = -s / c;
    let kind = match rational_slope(slope, DENOMINATOR_BOUND) {
        Some((p, q)) => {
            // the orbit closes after q turns in x and p turns in y at unit speed
            let period = TAU * ((p * p + q * q) as f64).sqrt();
            OrbitKind::Closed { p, q, period }
        }
        None => OrbitKind::Dense {
            discrepancies: [100, 1_000, 10_000]
                .into_iter()
                .map(|n| (n, orbit_discrepancy(z0, n, DISCREPANCY_GRID)))
                .collect(),
        },
    };
    ReebOrbitAnalysis { z0, slope: Some(if slope == 0.0 { 0.0 } else { slope }), kind }
}

/// `z0` with `-tan z0 = p/q`, convenient for rational test cases.
pub fn plane_with_slope(p: i64, q: i64) -> f64 {
    if q == 0 {
        return PI / 2.0;
    }
    (-(p as f64) / q as f64).atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{build_contact, contact_vector_field};

    #[test]
    fn reeb_flow_straight_line() {
        let c = build_contact("torus3").unwrap();
        let r = flow(&c.reeb, 1.0, &[0.0, 0.0, 0.0], 1e-3).unwrap();
        let e = r.end();
        assert!((e[0] - 1.0).abs() < 1e-13 && e[1].abs() < 1e-13 && e[2] == 0.0);
        let zero = flow(&c.reeb, 0.0, &[0.3, 0.1, 0.2], 1e-3).unwrap();
        assert_eq!(zero.frame, zero.initial_frame);
        assert!((jacobian_determinant(&zero) - 1.0).abs() < 1e-15);
        assert!(flow(&c.reeb, 1.0, &[0.0; 3], 0.1).is_err());
    }

    #[test]
    fn hamiltonian_one_is_reeb() {
        let c = build_contact("torus-sphere(2)").unwrap();
        let m = c.manifold();
        let p = [0.1, 0.2, 0.3, 0.6, 0.0, 0.8];
        let a = flow_hamiltonian(&ScalarField::constant(m, 1.0), &c, 0.7, &p, 1e-3).unwrap();
        let b = flow(&c.reeb, 0.7, &p, 1e-3).unwrap();
        assert!(wrapped_distance(m, a.end(), b.end()) < 1e-12);
    }

    #[test]
    fn strictness_of_basic_flows() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let h = ScalarField::sin_coord(m, 2, 1, 1.0 / (2.0 * PI).powi(2)).unwrap();
        let pts = vec![vec![0.1, 0.2, 0.3], vec![1.0, 4.0, 2.5]];
        let r = verify_strict(&h, &c, 1.0, &pts, 1e-3).unwrap();
        assert!(r.alpha_residual < 1e-10 && r.volume_residual < 1e-10);
        let sx = ScalarField::sin_coord(m, 0, 1, 1.0).unwrap();
        let r = verify_strict(&sx, &c, 1.0, &pts, 1e-3).unwrap();
        assert!(r.alpha_residual > 1e-3);
    }

    #[test]
    fn rk4_order() {
        let c = build_contact("torus3").unwrap();
        let sx = ScalarField::sin_coord(c.manifold(), 0, 1, 1.0).unwrap();
        let x = general_contact_vector_field(&sx, &c).unwrap();
        let s = convergence_order(&x, 1.0, &[0.3, 0.2, 0.4], 1e-2, 2).unwrap();
        for o in &s.orders {
            assert!((o - 4.0).abs() < 0.3, "{s:?}");
        }
    }

    #[test]
    fn closed_orbit_of_coordinate_field() {
        let c = build_contact("torus-sphere(2)").unwrap();
        let m = c.manifold();
        let x = contact_vector_field(&ScalarField::coordinate(m, 3).unwrap(), &c).unwrap();
        let o = closed_orbit(&x, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 1e-3, 10.0, 1e-8).unwrap();
        assert!((o.period - 1.0).abs() < 1e-9, "{o:?}");
        assert!((o.displacement[0] - 1.0).abs() < 1e-9, "{o:?}");
    }

    #[test]
    fn orbit_classification() {
        let a = reeb_orbit_analysis(0.0);
        assert_eq!(a.slope, Some(0.0));
        assert!(matches!(a.kind, OrbitKind::Closed { p: 0, q: 1, period } if (period - TAU).abs() < 1e-15));
        let b = reeb_orbit_analysis(PI / 4.0);
        assert!(matches!(b.kind, OrbitKind::Closed { p: -1, q: 1, .. }));
        let d = reeb_orbit_analysis((1.0 / 2f64.sqrt()).atan());
        match d.kind {
            OrbitKind::Dense { discrepancies } => {
                assert!(discrepancies.windows(2).all(|w| w[1].1 < w[0].1), "{discrepancies:?}");
            }
            other => panic!("expected dense orbits, got {other:?}"),
        }
        assert_eq!(reeb_orbit_analysis(PI / 2.0).slope, None);
        assert_eq!(rational_slope(0.75, 100), Some((3, 4)));
    }
}

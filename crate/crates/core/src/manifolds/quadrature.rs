//! Quadrature over coordinate cycles.
//!
//! Torus angles use the uniform trapezoidal rule, which is exact for Fourier
//! modes below the node count. Spheres: `S^1` trapezoidal; `S^2` Gauss–Legendre
//! in `t = y_0` times trapezoidal azimuth; `S^3` in double-polar coordinates
//! `(sqrt(1-s) e^{ia}, sqrt(s) e^{ib})`, Gauss–Legendre in `s`, trapezoidal in
//! `a` and `b`. Forms are evaluated on the parameter frame, so the Jacobian
//! comes from the form itself.

use std::f64::consts::TAU;
use std::fmt;

use super::{CycleSpec, ManifoldSpec, SphereSlot, TorusSlot};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::linalg::{self, CompensatedSum};

/// Node counts: `torus_nodes` per swept angle, `sphere_nodes` Gauss–Legendre
/// nodes per sphere factor (azimuths use twice as many trapezoidal nodes).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureGrid {
    pub torus_nodes: usize,
    pub sphere_nodes: usize,
}

pub const DEFAULT_GRID: QuadratureGrid = QuadratureGrid { torus_nodes: 8, sphere_nodes: 8 };

impl Default for QuadratureGrid {
    fn default() -> Self {
        DEFAULT_GRID
    }
}

impl QuadratureGrid {
    pub fn new(torus_nodes: usize, sphere_nodes: usize) -> Self {
        Self { torus_nodes: torus_nodes.max(1), sphere_nodes: sphere_nodes.max(1) }
    }

    /// Raises node counts so the rule is exact for the Fourier modes and
    /// sphere degrees present in `form`.
    pub fn adapted_to(&self, form: &Form) -> Self {
        let (modes, deg) = form.complexity();
        let k = modes.into_iter().max().unwrap_or(0) as usize;
        Self {
            torus_nodes: self.torus_nodes.max(2 * k + 2),
            sphere_nodes: self.sphere_nodes.max(deg as usize + form.degree() + 4),
        }
    }

    pub fn doubled(&self) -> Self {
        Self { torus_nodes: 2 * self.torus_nodes, sphere_nodes: 2 * self.sphere_nodes }
    }
}

/// Node of one slot: values of the slot's coordinates, tangent vectors in the
/// slot's coordinates, parameter weight.
struct SlotNode {
    values: Vec<f64>,
    tangents: Vec<Vec<f64>>,
    weight: f64,
}

struct SlotRule {
    start: usize,
    nodes: Vec<SlotNode>,
}

fn trapezoid(n: usize, period: f64) -> impl Iterator<Item = (f64, f64)> {
    (0..n).map(move |j| (period * j as f64 / n as f64, period / n as f64))
}

fn sphere_rule(dim: usize, n: usize) -> Result<Vec<SlotNode>> {
    let mut nodes = Vec::new();
    let az = 2 * n;
    match dim {
        1 => {
            for (a, w) in trapezoid(az, TAU) {
                let (s, c) = a.sin_cos();
                nodes.push(SlotNode { values: vec![c, s], tangents: vec![vec![-s, c]], weight: w });
            }
        }
        2 => {
            for (t, wt) in linalg::gauss_legendre(n, -1.0, 1.0) {
                let r = (1.0 - t * t).sqrt();
                for (phi, wp) in trapezoid(az, TAU) {
                    let (sp, cp) = phi.sin_cos();
                    nodes.push(SlotNode {
                        values: vec![t, r * cp, r * sp],
                        tangents: vec![vec![1.0, -t / r * cp, -t / r * sp], vec![0.0, -r * sp, r * cp]],
                        weight: wt * wp,
                    });
                }
            }
        }
        3 => {
            for (s, ws) in linalg::gauss_legendre(n, 0.0, 1.0) {
                let (p, q) = ((1.0 - s).sqrt(), s.sqrt());
                for (a, wa) in trapezoid(az, TAU) {
                    let (sa, ca) = a.sin_cos();
                    for (b, wb) in trapezoid(az, TAU) {
                        let (sb, cb) = b.sin_cos();
                        nodes.push(SlotNode {
                            values: vec![p * ca, p * sa, q * cb, q * sb],
                            tangents: vec![
                                vec![-ca / (2.0 * p), -sa / (2.0 * p), cb / (2.0 * q), sb / (2.0 * q)],
                                vec![-p * sa, p * ca, 0.0, 0.0],
                                vec![0.0, 0.0, -q * sb, q * cb],
                            ],
                            weight: ws * wa * wb,
                        });
                    }
                }
            }
        }
        _ => return Err(Error::Unsupported(format!("quadrature on S^{dim}"))),
    }
    // orient by the standard volume form: det[y, v_1, .., v_m] > 0
    for node in &mut nodes {
        let mut rows = vec![node.values.clone()];
        rows.extend(node.tangents.iter().cloned());
        if linalg::det(&rows) < 0.0 {
            node.tangents[0].iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok(nodes)
}

/// `collapse[i]` marks torus angles the integrand does not depend on; one
/// node is exact there.
fn slot_rules(
    m: &ManifoldSpec,
    cycle: &CycleSpec,
    grid: &QuadratureGrid,
    collapse: &[bool],
) -> Result<Vec<SlotRule>> {
    cycle.validate(m)?;
    let mut rules = Vec::new();
    for (i, slot) in cycle.torus.iter().enumerate() {
        let count = if collapse.get(i).copied().unwrap_or(false) { 1 } else { grid.torus_nodes };
        let nodes = match slot {
            TorusSlot::Vary => trapezoid(count, m.periods()[i])
                .map(|(v, w)| SlotNode { values: vec![v], tangents: vec![vec![1.0]], weight: w })
                .collect(),
            TorusSlot::Pinned(v) => vec![SlotNode { values: vec![*v], tangents: vec![], weight: 1.0 }],
        };
        rules.push(SlotRule { start: i, nodes });
    }
    for (slot, b) in cycle.spheres.iter().zip(m.blocks()) {
        let nodes = match slot {
            SphereSlot::Vary => sphere_rule(b.dim, grid.sphere_nodes)?,
            SphereSlot::Pinned(y) => vec![SlotNode { values: y.clone(), tangents: vec![], weight: 1.0 }],
        };
        rules.push(SlotRule { start: b.start, nodes });
    }
    Ok(rules)
}

/// Visits every product node with its point, frame, and signed weight.
fn for_each_node(
    m: &ManifoldSpec,
    cycle: &CycleSpec,
    grid: &QuadratureGrid,
    collapse: &[bool],
    mut visit: impl FnMut(&[f64], &[Vec<f64>], f64),
) -> Result<()> {
    let rules = slot_rules(m, cycle, grid, collapse)?;
    let n = m.ambient_dim();
    let mut counter = vec![0usize; rules.len()];
    let mut point = vec![0.0; n];
    let mut frame: Vec<Vec<f64>> = Vec::new();
    loop {
        frame.clear();
        let mut weight = cycle.sign;
        for (rule, &c) in rules.iter().zip(&counter) {
            let node = &rule.nodes[c];
            point[rule.start..rule.start + node.values.len()].copy_from_slice(&node.values);
            for t in &node.tangents {
                let mut v = vec![0.0; n];
                v[rule.start..rule.start + t.len()].copy_from_slice(t);
                frame.push(v);
            }
            weight *= node.weight;
        }
        visit(&point, &frame, weight);
        // advance the odometer, last slot fastest
        let mut k = rules.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < rules[k].nodes.len() {
                break;
            }
            counter[k] = 0;
        }
    }
}

/// Quadrature nodes of a cycle as points of the manifold.
pub fn sample_points(m: &ManifoldSpec, cycle: &CycleSpec, grid: &QuadratureGrid) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for_each_node(m, cycle, grid, &[], |p, _, _| out.push(p.to_vec()))?;
    Ok(out)
}

/// Oriented integral of `form` over `cycle` with a fixed grid.
pub fn integrate(form: &Form, cycle: &CycleSpec, grid: &QuadratureGrid) -> Result<f64> {
    let m = form.manifold();
    let k = cycle.dim(m);
    if form.degree() != k {
        return Err(Error::DegreeMismatch { form: form.degree(), cycle: k });
    }
    let collapse: Vec<bool> = form.complexity().0.iter().map(|&k| k == 0).collect();
    let mut sum = CompensatedSum::default();
    for_each_node(m, cycle, grid, &collapse, |p, frame, w| sum.add(w * form.eval_unchecked(p, frame)))?;
    Ok(sum.value())
}

/// Riemannian volume of a cycle (product metric, round spheres).
pub fn cycle_volume(m: &ManifoldSpec, cycle: &CycleSpec, grid: &QuadratureGrid) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    for_each_node(m, cycle, grid, &[], |_, frame, w| {
        let k = frame.len();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| frame[i].iter().zip(&frame[j]).map(|(a, b)| a * b).sum()).collect())
            .collect();
        sum.add(w.abs() * linalg::det(&gram).max(0.0).sqrt());
    })?;
    Ok(sum.value())
}

/// Integrals of a closed form over a list of cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodVector {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    /// Absolute tolerance used for equality and exactness decisions.
    pub tolerance: f64,
    /// Grid actually used (after adaptation).
    pub grid: QuadratureGrid,
}

impl PeriodVector {
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self { labels, values: vec![0.0; n], tolerance: Self::DEFAULT_TOL, grid: DEFAULT_GRID }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Same labels and every entry within `tol`.
    pub fn agrees_with(&self, other: &Self, tol: f64) -> bool {
        self.labels == other.labels && self.max_abs_diff(other) <= tol
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() <= self.tolerance
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }
}

impl fmt::Display for PeriodVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.labels.iter().zip(&self.values).map(|(l, v)| format!("{l}: {v:.12}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Periods of a closed form over `basis`. The grid is adapted to the form so
/// the rule is exact for its modes and degrees.
pub fn periods(form: &Form, basis: &[CycleSpec], grid: &QuadratureGrid) -> Result<PeriodVector> {
    let residual = form.d().residual();
    if residual > 1e-9 {
        return Err(Error::NotClosed(residual));
    }
    let grid = grid.adapted_to(form);
    let values = basis.iter().map(|c| integrate(form, c, &grid)).collect::<Result<Vec<_>>>()?;
    Ok(PeriodVector {
        labels: basis.iter().map(|c| c.name.clone()).collect(),
        values,
        tolerance: PeriodVector::DEFAULT_TOL,
        grid,
    })
}

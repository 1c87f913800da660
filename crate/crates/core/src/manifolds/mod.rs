//! Products of flat tori and round spheres, their cycles, and quadrature.
//!
//! Coordinates are ordered globally: every torus angle (factors in declaration
//! order) comes first, followed by the ambient coordinates of each sphere
//! factor. This ordering fixes every wedge sign in the crate and orients every
//! registered cycle.

mod quadrature;
mod registry;

pub use quadrature::{cycle_volume, integrate, periods, sample_points, PeriodVector, QuadratureGrid, DEFAULT_GRID};
pub use registry::{registry, RegistryEntry};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One factor of a product manifold.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// Flat torus `(R / period Z)^dim`.
    Torus { dim: usize, period: f64 },
    /// Unit sphere `S^dim` in `R^(dim + 1)`.
    Sphere { dim: usize },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Torus { dim, .. } | Factor::Sphere { dim } => *dim,
        }
    }
}

/// Ambient coordinate block of one sphere factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereBlock {
    /// Index of the factor in the factor list.
    pub factor: usize,
    /// Intrinsic dimension of the sphere.
    pub dim: usize,
    /// Global index of the first ambient coordinate.
    pub start: usize,
}

impl SphereBlock {
    /// Number of ambient coordinates, `dim + 1`.
    pub fn len(&self) -> usize {
        self.dim + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Global index of the coordinate eliminated by the sphere relation.
    pub fn last(&self) -> usize {
        self.start + self.dim
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordKind {
    Angle { period: f64 },
    Ambient { block: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    name: String,
    factors: Vec<Factor>,
    coord_names: Vec<String>,
    periods: Vec<f64>,
    blocks: Vec<SphereBlock>,
    note: Option<String>,
}

impl ManifoldSpec {
    /// Builds a product manifold. `coord_names` may be empty, in which case
    /// torus angles are named `t0, t1, ...` and sphere coordinates `s0, s1, ...`.
    pub fn new(
        name: impl Into<String>,
        factors: Vec<Factor>,
        coord_names: Vec<String>,
    ) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("manifold needs at least one factor".into()));
        }
        let mut periods = Vec::new();
        for f in &factors {
            match f {
                Factor::Torus { dim, period } => {
                    if *dim == 0 || !(period.is_finite() && *period > 0.0) {
                        return Err(Error::InvalidArgument(format!("bad torus factor {f:?}")));
                    }
                    periods.extend(std::iter::repeat_n(*period, *dim));
                }
                Factor::Sphere { dim } if *dim == 0 => {
                    return Err(Error::InvalidArgument("S^0 is not connected".into()));
                }
                Factor::Sphere { .. } => {}
            }
        }
        let mut blocks = Vec::new();
        let mut start = periods.len();
        for (i, f) in factors.iter().enumerate() {
            if let Factor::Sphere { dim } = f {
                blocks.push(SphereBlock { factor: i, dim: *dim, start });
                start += dim + 1;
            }
        }
        let ambient = start;
        let coord_names = if coord_names.is_empty() {
            let mut names: Vec<String> = (0..periods.len()).map(|i| format!("t{i}")).collect();
            names.extend((0..ambient - periods.len()).map(|i| format!("s{i}")));
            names
        } else {
            coord_names
        };
        if coord_names.len() != ambient {
            return Err(Error::InvalidArgument(format!(
                "{} coordinate names for {} ambient coordinates",
                coord_names.len(),
                ambient
            )));
        }
        for (i, n) in coord_names.iter().enumerate() {
            if coord_names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate name `{n}`")));
            }
        }
        Ok(Self { name: name.into(), factors, coord_names, periods, blocks, note: None })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).sum()
    }

    /// Number of global coordinates (torus angles plus sphere ambient coordinates).
    pub fn ambient_dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn torus_count(&self) -> usize {
        self.periods.len()
    }

    pub fn sphere_count(&self) -> usize {
        self.ambient_dim() - self.torus_count()
    }

    pub fn period(&self, coord: usize) -> Option<f64> {
        self.periods.get(coord).copied()
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn blocks(&self) -> &[SphereBlock] {
        &self.blocks
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.coord_names[i]
    }

    pub fn coord(&self, name: &str) -> Result<usize> {
        self.coord_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn kind(&self, coord: usize) -> Result<CoordKind> {
        if coord < self.torus_count() {
            return Ok(CoordKind::Angle { period: self.periods[coord] });
        }
        self.blocks
            .iter()
            .position(|b| b.range().contains(&coord))
            .map(|block| CoordKind::Ambient { block })
            .ok_or_else(|| Error::UnknownCoordinate(format!("#{coord}")))
    }

    /// Sphere block owning a global coordinate, if any.
    pub fn block_of(&self, coord: usize) -> Option<&SphereBlock> {
        self.blocks.iter().find(|b| b.range().contains(&coord))
    }

    /// Checks length and the unit-sphere constraint (within `1e-12`).
    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.ambient_dim() {
            return Err(Error::PointDimension { expected: self.ambient_dim(), got: p.len() });
        }
        for b in &self.blocks {
            let r2: f64 = p[b.range()].iter().map(|y| y * y).sum();
            if (r2 - 1.0).abs() > 1e-12 {
                return Err(Error::OffSphere(r2 - 1.0));
            }
        }
        Ok(())
    }

    /// Whether an ambient vector at `p` is tangent (within `tol`).
    pub fn is_tangent(&self, p: &[f64], v: &[f64], tol: f64) -> bool {
        self.blocks.iter().all(|b| {
            let dot: f64 = b.range().map(|i| p[i] * v[i]).sum();
            dot.abs() <= tol
        })
    }

    /// Orthogonal projection of an ambient vector onto the tangent space at `p`.
    pub fn project_tangent(&self, p: &[f64], v: &mut [f64]) {
        for b in &self.blocks {
            let dot: f64 = b.range().map(|i| p[i] * v[i]).sum();
            for i in b.range() {
                v[i] -= dot * p[i];
            }
        }
    }

    /// Reduces torus angles into `[0, period)` and rescales sphere blocks to unit length.
    pub fn normalize_point(&self, p: &mut [f64]) {
        for (i, &per) in self.periods.iter().enumerate() {
            p[i] = p[i].rem_euclid(per);
        }
        self.normalize_spheres(p);
    }

    /// Rescales sphere blocks to unit length, leaving torus angles unwrapped.
    pub fn normalize_spheres(&self, p: &mut [f64]) {
        for b in &self.blocks {
            let r = p[b.range()].iter().map(|y| y * y).sum::<f64>().sqrt();
            if r > 0.0 {
                for i in b.range() {
                    p[i] /= r;
                }
            }
        }
    }

    /// Orthonormal basis of the tangent space at `p`, listed in global
    /// coordinate order: coordinate vectors of the torus angles first, then an
    /// oriented basis of each sphere factor (`det[y, v_1, .., v_m] > 0`).
    pub fn tangent_frame(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let n = self.ambient_dim();
        let mut frame = Vec::with_capacity(self.dim());
        for i in 0..self.torus_count() {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            frame.push(v);
        }
        for b in &self.blocks {
            let y = &p[b.range()];
            let mut basis: Vec<Vec<f64>> = vec![y.to_vec()];
            for e in 0..b.len() {
                if basis.len() == b.len() {
                    break;
                }
                let mut v = vec![0.0; b.len()];
                v[e] = 1.0;
                for u in &basis {
                    let d: f64 = u.iter().zip(&v).map(|(a, c)| a * c).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= d * ui;
                    }
                }
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    v.iter_mut().for_each(|a| *a /= norm);
                    basis.push(v);
                }
            }
            if crate::linalg::det(&basis) < 0.0 {
                basis[1].iter_mut().for_each(|a| *a = -*a);
            }
            for local in basis.into_iter().skip(1) {
                let mut v = vec![0.0; n];
                v[b.range()].copy_from_slice(&local);
                frame.push(v);
            }
        }
        frame
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Role of one torus angle in a cycle.
#[derive(Clone, Debug, PartialEq)]
pub enum TorusSlot {
    Vary,
    Pinned(f64),
}

/// Role of one sphere factor in a cycle.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereSlot {
    Vary,
    Pinned(Vec<f64>),
}

/// A closed oriented submanifold given as a coordinate sub-product: every
/// torus angle either sweeps its circle or is pinned, every sphere factor is
/// either swept or pinned at a point. Orientation follows ascending global
/// coordinate order (sphere factors by their standard volume form) times `sign`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSpec {
    pub name: String,
    pub torus: Vec<TorusSlot>,
    pub spheres: Vec<SphereSlot>,
    pub sign: f64,
}

impl CycleSpec {
    /// The whole manifold as a top-dimensional cycle.
    pub fn fundamental(m: &ManifoldSpec) -> Self {
        Self {
            name: "M".into(),
            torus: vec![TorusSlot::Vary; m.torus_count()],
            spheres: vec![SphereSlot::Vary; m.blocks().len()],
            sign: 1.0,
        }
    }

    /// Hypersurface `{coord = value}` for a torus angle.
    pub fn coordinate_hypersurface(m: &ManifoldSpec, coord: usize, value: f64) -> Self {
        let mut c = Self::fundamental(m);
        c.torus[coord] = TorusSlot::Pinned(value);
        c.name = format!("{}={}", m.coord_name(coord), value);
        c
    }

    /// Circle along one torus angle; other angles pinned at 0, spheres at their first basis point.
    pub fn coordinate_circle(m: &ManifoldSpec, coord: usize) -> Self {
        let torus = (0..m.torus_count())
            .map(|i| if i == coord { TorusSlot::Vary } else { TorusSlot::Pinned(0.0) })
            .collect();
        let spheres = m
            .blocks()
            .iter()
            .map(|b| {
                let mut y = vec![0.0; b.len()];
                y[0] = 1.0;
                SphereSlot::Pinned(y)
            })
            .collect();
        Self { name: format!("{}-circle", m.coord_name(coord)), torus, spheres, sign: 1.0 }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self, m: &ManifoldSpec) -> usize {
        let t = self.torus.iter().filter(|s| matches!(s, TorusSlot::Vary)).count();
        let s: usize = self
            .spheres
            .iter()
            .zip(m.blocks())
            .filter(|(s, _)| matches!(s, SphereSlot::Vary))
            .map(|(_, b)| b.dim)
            .sum();
        t + s
    }

    pub fn validate(&self, m: &ManifoldSpec) -> Result<()> {
        if self.torus.len() != m.torus_count() || self.spheres.len() != m.blocks().len() {
            return Err(Error::InvalidArgument(format!(
                "cycle `{}` does not match manifold `{}`",
                self.name,
                m.name()
            )));
        }
        for (slot, b) in self.spheres.iter().zip(m.blocks()) {
            if let SphereSlot::Pinned(y) = slot {
                let r2: f64 = y.iter().map(|a| a * a).sum();
                if y.len() != b.len() || (r2 - 1.0).abs() > 1e-12 {
                    return Err(Error::OffSphere(r2 - 1.0));
                }
            }
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidArgument("cycle sign must be +1 or -1".into()));
        }
        Ok(())
    }

    /// Riemannian volume for the flat torus and round sphere metrics.
    pub fn volume(&self, m: &ManifoldSpec) -> f64 {
        let t: f64 = self
            .torus
            .iter()
            .zip(m.periods())
            .filter(|(s, _)| matches!(s, TorusSlot::Vary))
            .map(|(_, p)| p)
            .product();
        let s: f64 = self
            .spheres
            .iter()
            .zip(m.blocks())
            .filter(|(s, _)| matches!(s, SphereSlot::Vary))
            .map(|(_, b)| sphere_volume(b.dim))
            .product();
        t * s
    }

    /// The single torus angle this cycle pins while sweeping everything else.
    pub fn complement_coord(&self, m: &ManifoldSpec) -> Option<usize> {
        let pinned: Vec<usize> = self
            .torus
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, TorusSlot::Pinned(_)))
            .map(|(i, _)| i)
            .collect();
        let spheres_full = self.spheres.iter().all(|s| matches!(s, SphereSlot::Vary));
        (pinned.len() == 1 && spheres_full && self.dim(m) + 1 == m.dim()).then(|| pinned[0])
    }

    /// The single torus angle a coordinate circle sweeps.
    pub fn circle_coord(&self) -> Option<usize> {
        let vary: Vec<usize> = self
            .torus
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, TorusSlot::Vary))
            .map(|(i, _)| i)
            .collect();
        let spheres_pinned = self.spheres.iter().all(|s| matches!(s, SphereSlot::Pinned(_)));
        (vary.len() == 1 && spheres_pinned).then(|| vary[0])
    }
}

/// Oriented intersection number of a coordinate circle with a coordinate
/// hypersurface: `(-1)^k` when the circle sweeps the pinned angle `k`
/// (circle direction first, then the hypersurface frame), else 0.
pub fn intersection_number(m: &ManifoldSpec, circle: &CycleSpec, hyper: &CycleSpec) -> Option<i32> {
    let c = circle.circle_coord()?;
    let h = hyper.complement_coord(m)?;
    let sign = if c % 2 == 0 { 1 } else { -1 };
    let s = (circle.sign * hyper.sign) as i32;
    Some(if c == h { sign * s } else { 0 })
}

/// Volume `c_n` of the unit sphere `S^n` for its standard volume form.
pub fn sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (n - 1) as f64 * sphere_volume(n - 2),
    }
}

//! Graded exterior algebra with [`ScalarField`] coefficients.
//!
//! Forms are written in the global ambient coordinates. On sphere factors a
//! form only matters through its restriction; [`Form::restricted`] computes a
//! canonical representative by projecting every `dy_k` onto the tangent
//! space, `dy_k -> dy_k - y_k sum_j y_j dy_j`, and reducing coefficients.
//! Two forms restrict to the same form iff their restricted representatives
//! have the same normal-form coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcalg::{ScalarField, ZERO_TOL};
use crate::linalg;
use crate::manifolds::ManifoldSpec;

/// Sorted, strictly increasing coordinate indices of a wedge monomial.
pub type IndexSet = Vec<usize>;

#[derive(Clone, Debug)]
pub struct Form {
    manifold: Arc<ManifoldSpec>,
    degree: usize,
    terms: BTreeMap<IndexSet, ScalarField>,
}

/// Sign of merging two sorted disjoint index sets, or `None` if they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(IndexSet, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut swaps = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over the remaining elements of a
                swaps += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if swaps.is_multiple_of(2) { 1.0 } else { -1.0 }))
}

impl Form {
    pub fn zero(m: &Arc<ManifoldSpec>, degree: usize) -> Self {
        Self { manifold: m.clone(), degree, terms: BTreeMap::new() }
    }

    /// A 0-form.
    pub fn scalar(f: ScalarField) -> Self {
        let mut out = Self::zero(f.manifold(), 0);
        out.insert(Vec::new(), f);
        out
    }

    /// The coordinate differential `d x_coord`.
    pub fn differential(m: &Arc<ManifoldSpec>, coord: usize) -> Result<Self> {
        if coord >= m.ambient_dim() {
            return Err(Error::UnknownCoordinate(format!("#{coord}")));
        }
        let mut out = Self::zero(m, 1);
        out.insert(vec![coord], ScalarField::constant(m, 1.0));
        Ok(out)
    }

    /// `f dx_{i_1} ^ ... ^ dx_{i_k}` for indices in any order (sign applied).
    pub fn monomial(f: ScalarField, indices: &[usize]) -> Result<Self> {
        let m = f.manifold().clone();
        let mut acc = Self::scalar(f);
        for &i in indices {
            acc = acc.wedge(&Self::differential(&m, i)?)?;
        }
        Ok(acc)
    }

    fn insert(&mut self, idx: IndexSet, f: ScalarField) {
        if f.is_empty() {
            return;
        }
        match self.terms.remove(&idx) {
            Some(g) => {
                let s = g + f;
                if !s.is_empty() {
                    self.terms.insert(idx, s);
                }
            }
            None => {
                self.terms.insert(idx, f);
            }
        }
    }

    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.manifold
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &ScalarField)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> ScalarField {
        self.terms.get(idx).cloned().unwrap_or_else(|| ScalarField::zero(&self.manifold))
    }

    /// The coefficient of a 0-form.
    pub fn as_scalar(&self) -> Option<ScalarField> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.manifold, &other.manifold) || *self.manifold == *other.manifold {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch(self.manifold.name().into(), other.manifold.name().into()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.degree != other.degree && !self.terms.is_empty() && !other.terms.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "adding forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = if self.terms.is_empty() { other.clone() } else { self.clone() };
        let src = if self.terms.is_empty() { &self.terms } else { &other.terms };
        for (k, f) in src {
            out.insert(k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coefficients(|f| f.scale(s))
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_scalar(&self, g: &ScalarField) -> Self {
        self.map_coefficients(|f| f * g)
    }

    fn map_coefficients(&self, op: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let mut out = Self::zero(&self.manifold, self.degree);
        for (k, f) in &self.terms {
            out.insert(k.clone(), op(f));
        }
        out
    }

    /// Exterior product. Products beyond the manifold dimension are the zero form.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.manifold, degree);
        if degree > self.manifold.dim() {
            return Ok(out);
        }
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if let Some((idx, sign)) = merge_sign(a, b) {
                    out.insert(idx, (f * g).scale(sign));
                }
            }
        }
        Ok(out)
    }

    /// `self ^ self ^ ... ` (`k` factors); `k = 0` gives the constant 1.
    pub fn wedge_power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::scalar(ScalarField::constant(&self.manifold, 1.0));
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let m = &self.manifold;
        let mut out = Self::zero(m, self.degree + 1);
        if self.degree + 1 > m.dim() {
            return out;
        }
        for (idx, f) in &self.terms {
            for j in 0..m.ambient_dim() {
                if idx.contains(&j) {
                    continue;
                }
                let df = f.partial(j).expect("coordinate in range");
                if df.is_empty() {
                    continue;
                }
                let (new, sign) = merge_sign(&[j], idx).expect("disjoint");
                out.insert(new, df.scale(sign));
            }
        }
        out
    }

    /// Contraction with the coordinate vector field `d/dx_coord` (ambient, not
    /// necessarily tangent).
    pub(crate) fn interior_coordinate(&self, coord: usize) -> Self {
        let mut out = Self::zero(&self.manifold, self.degree.saturating_sub(1));
        for (idx, f) in &self.terms {
            if let Some(pos) = idx.iter().position(|&i| i == coord) {
                let mut rest = idx.clone();
                rest.remove(pos);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.insert(rest, f.scale(sign));
            }
        }
        out
    }

    /// Interior product `iota(X) self`, contracting the first slot.
    pub fn interior(&self, x: &VectorFieldSym) -> Result<Self> {
        if !(Arc::ptr_eq(&self.manifold, x.manifold()) || *self.manifold == **x.manifold()) {
            return Err(Error::ManifoldMismatch(self.manifold.name().into(), x.manifold().name().into()));
        }
        if self.degree == 0 {
            return Err(Error::InteriorOfFunction);
        }
        let mut out = Self::zero(&self.manifold, self.degree - 1);
        for (idx, f) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                let xi = x.component(i);
                if xi.is_empty() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.insert(rest, (f * xi).scale(sign));
            }
        }
        Ok(out)
    }

    /// Lie derivative via Cartan's formula `d iota(X) + iota(X) d`.
    pub fn lie_derivative(&self, x: &VectorFieldSym) -> Result<Self> {
        let first = if self.degree == 0 { Self::zero(&self.manifold, 0) } else { self.interior(x)?.d() };
        let second = self.d();
        let second = if second.degree == 0 || second.terms.is_empty() {
            Self::zero(&self.manifold, self.degree)
        } else {
            second.interior(x)?
        };
        let mut out = first.checked_add(&second)?;
        out.degree = self.degree;
        Ok(out)
    }

    /// Canonical representative of the restriction to the manifold.
    pub fn restricted(&self) -> Self {
        let m = &self.manifold;
        if m.blocks().is_empty() {
            return self.clone();
        }
        let projected: Vec<Option<Form>> =
            (0..m.ambient_dim()).map(|i| m.block_of(i).map(|_| self.tangential_differential(i))).collect();
        let mut out = Self::zero(m, self.degree);
        for (idx, f) in &self.terms {
            let mut acc = Self::scalar(f.clone());
            for &i in idx {
                let factor = match &projected[i] {
                    Some(p) => p.clone(),
                    None => Self::differential(m, i).expect("in range"),
                };
                acc = acc.wedge(&factor).expect("same manifold");
            }
            if acc.degree == self.degree {
                for (k, g) in acc.terms {
                    out.insert(k, g);
                }
            }
        }
        out
    }

    /// `dy_i - y_i sum_j y_j dy_j` over the sphere block of `i`.
    fn tangential_differential(&self, i: usize) -> Form {
        let m = &self.manifold;
        let b = *m.block_of(i).expect("sphere coordinate");
        let yi = ScalarField::coordinate(m, i).expect("sphere coordinate");
        let mut out = Self::differential(m, i).expect("in range");
        for j in b.range() {
            let yj = ScalarField::coordinate(m, j).expect("sphere coordinate");
            let mut t = Self::zero(m, 1);
            t.insert(vec![j], -(&yi * &yj));
            out = out.checked_add(&t).expect("same degree");
        }
        out
    }

    /// True iff the restriction to the manifold vanishes (all canonical
    /// coefficients below `tol`).
    pub fn is_zero(&self, tol: f64) -> bool {
        self.restricted().terms.values().all(|f| f.is_zero(tol))
    }

    /// Largest canonical coefficient magnitude of the restriction.
    pub fn residual(&self) -> f64 {
        self.restricted()
            .terms
            .values()
            .flat_map(|f| f.terms().map(|(_, c)| c.norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.checked_add(&other.scale(-1.0)).map(|d| d.is_zero(tol)).unwrap_or(false)
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.d().is_zero(tol)
    }

    /// Per-angle maximal wavenumber and maximal sphere degree over all coefficients.
    pub fn complexity(&self) -> (Vec<u32>, u32) {
        let mut modes = vec![0u32; self.manifold.torus_count()];
        let mut deg = 0;
        for f in self.terms.values() {
            for (o, v) in modes.iter_mut().zip(f.max_modes()) {
                *o = (*o).max(v);
            }
            deg = deg.max(f.max_degree());
        }
        (modes, deg)
    }

    /// Multilinear alternating evaluation on tangent vectors at `p`.
    pub fn eval_form(&self, p: &[f64], frame: &[Vec<f64>]) -> Result<f64> {
        self.manifold.check_point(p)?;
        if frame.len() != self.degree {
            return Err(Error::FrameMismatch { expected: self.degree, got: frame.len() });
        }
        for (i, v) in frame.iter().enumerate() {
            if v.len() != self.manifold.ambient_dim() {
                return Err(Error::PointDimension { expected: self.manifold.ambient_dim(), got: v.len() });
            }
            if !self.manifold.is_tangent(p, v, 1e-10) {
                return Err(Error::FrameNotTangent(i));
            }
        }
        Ok(self.eval_unchecked(p, frame))
    }

    pub(crate) fn eval_unchecked(&self, p: &[f64], frame: &[Vec<f64>]) -> f64 {
        let k = self.degree;
        let mut buf = vec![0.0; k * k];
        let mut total = linalg::CompensatedSum::default();
        for (idx, f) in &self.terms {
            for (r, &i) in idx.iter().enumerate() {
                for (c, v) in frame.iter().enumerate() {
                    buf[r * k + c] = v[i];
                }
            }
            let det = if k == 0 { 1.0 } else { linalg::det_in_place(&mut buf, k) };
            if det != 0.0 {
                total.add(f.eval_re(p) * det);
            }
        }
        total.value()
    }
}

impl Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.checked_add(rhs).expect("incompatible forms")
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.checked_add(&rhs.scale(-1.0)).expect("incompatible forms")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let d: Vec<String> = idx.iter().map(|&i| format!("d{}", self.manifold.coord_name(i))).collect();
            write!(f, "({c})")?;
            if !d.is_empty() {
                write!(f, " {}", d.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Vector field with [`ScalarField`] components in the ambient coordinate frame.
///
/// Components along sphere coordinates must satisfy `sum_k y_k X^{y_k} = 0`
/// (in normal form) on every sphere factor.
#[derive(Clone, Debug)]
pub struct VectorFieldSym {
    manifold: Arc<ManifoldSpec>,
    components: Vec<ScalarField>,
}

impl VectorFieldSym {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let m = components
            .first()
            .map(|c| c.manifold().clone())
            .ok_or_else(|| Error::InvalidArgument("empty component list".into()))?;
        if components.len() != m.ambient_dim() {
            return Err(Error::PointDimension { expected: m.ambient_dim(), got: components.len() });
        }
        let x = Self { manifold: m, components };
        if !x.is_tangent() {
            return Err(Error::NotTangent);
        }
        Ok(x)
    }

    pub fn zero(m: &Arc<ManifoldSpec>) -> Self {
        Self { manifold: m.clone(), components: vec![ScalarField::zero(m); m.ambient_dim()] }
    }

    /// `d/d theta` for a torus angle.
    pub fn coordinate(m: &Arc<ManifoldSpec>, coord: usize) -> Result<Self> {
        if coord >= m.torus_count() {
            return Err(Error::InvalidArgument(format!(
                "`{}` is not a torus angle",
                m.coord_names().get(coord).map(String::as_str).unwrap_or("?")
            )));
        }
        let mut x = Self::zero(m);
        x.components[coord] = ScalarField::constant(m, 1.0);
        Ok(x)
    }

    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.manifold
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Tangency to every sphere factor, symbolically.
    pub fn is_tangent(&self) -> bool {
        let m = &self.manifold;
        m.blocks().iter().all(|b| {
            let mut s = ScalarField::zero(m);
            for i in b.range() {
                let y = ScalarField::coordinate(m, i).expect("sphere coordinate");
                s = s + &y * &self.components[i];
            }
            s.is_zero(ZERO_TOL * 10.0)
        })
    }

    /// Directional derivative `X . f`.
    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        let mut out = ScalarField::zero(&self.manifold);
        for (i, xi) in self.components.iter().enumerate() {
            if xi.is_empty() {
                continue;
            }
            out = out.checked_add(&xi.checked_mul(&f.partial(i)?)?)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { manifold: self.manifold.clone(), components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn mul_scalar(&self, g: &ScalarField) -> Result<Self> {
        Self::new(self.components.iter().map(|c| c * g).collect())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { manifold: self.manifold.clone(), components: comps })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.components.iter().zip(&other.components).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Numeric value at a point.
    pub fn evaluate(&self, p: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_re(p)).collect()
    }
}

impl fmt::Display for VectorFieldSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(i, c)| format!("({c}) d/d{}", self.manifold.coord_name(i)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::registry;
    use std::f64::consts::PI;

    fn t3() -> Arc<ManifoldSpec> {
        registry("torus3").unwrap().manifold
    }

    fn alpha_t3(m: &Arc<ManifoldSpec>) -> Form {
        let c = ScalarField::cos_coord(m, 2, 1, 1.0).unwrap();
        let s = ScalarField::sin_coord(m, 2, 1, 1.0).unwrap();
        &Form::monomial(c, &[0]).unwrap() - &Form::monomial(s, &[1]).unwrap()
    }

    #[test]
    fn wedge_antisymmetry() {
        let m = t3();
        let dx = Form::differential(&m, 0).unwrap();
        let dy = Form::differential(&m, 1).unwrap();
        let a = dx.wedge(&dy).unwrap();
        let b = dy.wedge(&dx).unwrap();
        assert!(a.approx_eq(&b.scale(-1.0), 1e-14));
        assert!(dx.wedge(&dx).unwrap().is_zero(1e-14));
    }

    #[test]
    fn d_alpha_torus3() {
        let m = t3();
        let alpha = alpha_t3(&m);
        let da = alpha.d();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        let expected = &Form::monomial(s, &[0, 2]).unwrap() + &Form::monomial(c, &[1, 2]).unwrap();
        assert!(da.approx_eq(&expected, 1e-14));
        let vol = alpha.wedge(&da).unwrap();
        let dxdydz = Form::monomial(ScalarField::constant(&m, 1.0), &[0, 1, 2]).unwrap();
        assert!(vol.approx_eq(&dxdydz, 1e-14));
    }

    #[test]
    fn d_of_h_alpha() {
        let m = t3();
        let alpha = alpha_t3(&m);
        let h = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let lhs = alpha.mul_scalar(&h).d();
        let dh = Form::scalar(h.clone()).d();
        let rhs = &dh.wedge(&alpha).unwrap() + &alpha.d().mul_scalar(&h);
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn eval_form_examples() {
        let m = t3();
        let dxdy = Form::monomial(ScalarField::constant(&m, 1.0), &[0, 1]).unwrap();
        let ex = vec![1.0, 0.0, 0.0];
        let ey = vec![0.0, 1.0, 0.0];
        let ez = vec![0.0, 0.0, 1.0];
        let p = [0.3, 1.0, 2.0];
        assert_eq!(dxdy.eval_form(&p, &[ex.clone(), ey.clone()]).unwrap(), 1.0);
        assert_eq!(dxdy.eval_form(&p, &[ey.clone(), ex.clone()]).unwrap(), -1.0);
        let da = alpha_t3(&m).d();
        let v = da.eval_form(&[0.0, 0.0, PI / 2.0], &[ex.clone(), ez]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(matches!(dxdy.eval_form(&p, &[ex]), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn interior_and_lie() {
        let m = t3();
        let alpha = alpha_t3(&m);
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let reeb = VectorFieldSym::new(vec![c, -s, ScalarField::zero(&m)]).unwrap();
        let one = alpha.interior(&reeb).unwrap().as_scalar().unwrap();
        assert!(one.approx_eq(&ScalarField::constant(&m, 1.0), 1e-14));
        assert!(alpha.d().interior(&reeb).unwrap().is_zero(1e-14));
        assert!(alpha.lie_derivative(&reeb).unwrap().is_zero(1e-14));
        let dx = VectorFieldSym::coordinate(&m, 0).unwrap();
        assert!(alpha.lie_derivative(&dx).unwrap().is_zero(1e-14));
        let f = Form::scalar(ScalarField::constant(&m, 2.0));
        assert!(matches!(f.interior(&dx), Err(Error::InteriorOfFunction)));
    }

    #[test]
    fn interior_proof_identity_n1() {
        // iota(X_H)(alpha ^ d alpha) = H d alpha + alpha ^ dH for H = sin z.
        let m = t3();
        let alpha = alpha_t3(&m);
        let da = alpha.d();
        let h = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let hp = h.partial(2).unwrap();
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let x = VectorFieldSym::new(vec![&h * &c - &hp * &s, -(&h * &s + &hp * &c), ScalarField::zero(&m)])
            .unwrap();
        let lhs = alpha.wedge(&da).unwrap().interior(&x).unwrap();
        let rhs = &da.mul_scalar(&h) + &alpha.wedge(&Form::scalar(h).d()).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-13));
    }

    #[test]
    fn restriction_kills_radial_form() {
        let m = registry("torus-sphere(2)").unwrap().manifold;
        let mut theta = Form::zero(&m, 1);
        for k in 0..3 {
            let i = m.coord(&format!("y{k}")).unwrap();
            let y = ScalarField::coordinate(&m, i).unwrap();
            theta = &theta + &Form::monomial(y, &[i]).unwrap();
        }
        assert!(!theta.terms.is_empty());
        assert!(theta.is_zero(1e-13));
        // dy0 ^ dy1 ^ dy2 restricts to zero on S^2.
        let idx: Vec<usize> = (0..3).map(|k| m.coord(&format!("y{k}")).unwrap()).collect();
        let top = Form::monomial(ScalarField::constant(&m, 1.0), &idx).unwrap();
        assert!(top.is_zero(1e-13));
        // restriction is idempotent
        let dy0 = Form::differential(&m, idx[0]).unwrap();
        let r = dy0.restricted();
        assert!(r.restricted().approx_eq(&r, 1e-13));
        assert!(!dy0.is_zero(1e-13));
    }

    #[test]
    fn wedge_beyond_dimension_is_zero() {
        let m = t3();
        let v = Form::monomial(ScalarField::constant(&m, 1.0), &[0, 1, 2]).unwrap();
        let dz = Form::differential(&m, 2).unwrap();
        let w = v.wedge(&dz).unwrap();
        assert_eq!(w.degree(), 4);
        assert!(w.terms.is_empty());
    }
}

//! Exact algebra of coefficient functions.
//!
//! A [`ScalarField`] is a finite sum of terms `c * exp(2 pi i k.theta / P) * y^e`:
//! a Fourier mode in the torus angles times a monomial in the ambient sphere
//! coordinates. Sphere monomials are kept in normal form modulo
//! `sum_k y_k^2 - 1`: the last coordinate of each sphere factor never appears
//! with exponent above one. Since the relation is a single monic generator
//! in that coordinate, the normal form is canonical and `is_zero` is a genuine
//! zero test for the restricted function.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};
use crate::manifolds::{CoordKind, ManifoldSpec};

/// Coefficients below this magnitude are dropped after every operation.
pub const ZERO_TOL: f64 = 1e-12;

/// Fourier wavenumbers, one per torus angle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusMode(pub Vec<i32>);

/// Exponents of the ambient sphere coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SphereMonomial(pub Vec<u32>);

pub type TermKey = (TorusMode, SphereMonomial);

#[derive(Clone, Debug)]
pub struct ScalarField {
    manifold: Arc<ManifoldSpec>,
    terms: BTreeMap<TermKey, Complex>,
    real: bool,
}

impl ScalarField {
    pub fn zero(m: &Arc<ManifoldSpec>) -> Self {
        Self { manifold: m.clone(), terms: BTreeMap::new(), real: true }
    }

    pub fn constant(m: &Arc<ManifoldSpec>, c: f64) -> Self {
        Self::complex_constant(m, Complex::new(c, 0.0)).with_real(true)
    }

    pub fn complex_constant(m: &Arc<ManifoldSpec>, c: Complex) -> Self {
        let key = (
            TorusMode(vec![0; m.torus_count()]),
            SphereMonomial(vec![0; m.sphere_count()]),
        );
        let mut f = Self::zero(m);
        f.real = c.im.abs() < ZERO_TOL;
        f.accumulate(key, c);
        f
    }

    /// `coef * exp(2 pi i k.theta / P)`.
    pub fn fourier(m: &Arc<ManifoldSpec>, modes: Vec<i32>, coef: Complex) -> Result<Self> {
        if modes.len() != m.torus_count() {
            return Err(Error::InvalidArgument(format!(
                "mode vector of length {} on {} torus angles",
                modes.len(),
                m.torus_count()
            )));
        }
        let real = modes.iter().all(|&k| k == 0) && coef.im.abs() < ZERO_TOL;
        let mut f = Self::zero(m);
        f.real = real;
        f.accumulate((TorusMode(modes), SphereMonomial(vec![0; m.sphere_count()])), coef);
        Ok(f)
    }

    /// `amp * cos(2 pi k.theta / P)`.
    pub fn cos_mode(m: &Arc<ManifoldSpec>, modes: &[i32], amp: f64) -> Result<Self> {
        let neg: Vec<i32> = modes.iter().map(|k| -k).collect();
        let half = Complex::new(0.5 * amp, 0.0);
        let f = Self::fourier(m, modes.to_vec(), half)? + Self::fourier(m, neg, half)?;
        Ok(f.with_real(true))
    }

    /// `amp * sin(2 pi k.theta / P)`.
    pub fn sin_mode(m: &Arc<ManifoldSpec>, modes: &[i32], amp: f64) -> Result<Self> {
        let neg: Vec<i32> = modes.iter().map(|k| -k).collect();
        let c = Complex::new(0.0, -0.5 * amp);
        let f = Self::fourier(m, modes.to_vec(), c)? + Self::fourier(m, neg, -c)?;
        Ok(f.with_real(true))
    }

    /// `amp * cos(k * theta_coord * 2 pi / P)` for a single torus angle.
    pub fn cos_coord(m: &Arc<ManifoldSpec>, coord: usize, k: i32, amp: f64) -> Result<Self> {
        Self::cos_mode(m, &Self::unit_mode(m, coord, k)?, amp)
    }

    pub fn sin_coord(m: &Arc<ManifoldSpec>, coord: usize, k: i32, amp: f64) -> Result<Self> {
        Self::sin_mode(m, &Self::unit_mode(m, coord, k)?, amp)
    }

    fn unit_mode(m: &ManifoldSpec, coord: usize, k: i32) -> Result<Vec<i32>> {
        match m.kind(coord)? {
            CoordKind::Angle { .. } => {
                let mut modes = vec![0; m.torus_count()];
                modes[coord] = k;
                Ok(modes)
            }
            CoordKind::Ambient { .. } => {
                Err(Error::InvalidArgument(format!("`{}` is not a torus angle", m.coord_name(coord))))
            }
        }
    }

    /// `coef * y^exps`, reduced to normal form.
    pub fn monomial(m: &Arc<ManifoldSpec>, exps: Vec<u32>, coef: f64) -> Result<Self> {
        if exps.len() != m.sphere_count() {
            return Err(Error::InvalidArgument("exponent vector has wrong length".into()));
        }
        let mut f = Self::zero(m);
        let modes = TorusMode(vec![0; m.torus_count()]);
        for (e, r) in reduce_monomial(m, exps) {
            f.accumulate((modes.clone(), SphereMonomial(e)), Complex::new(coef * r, 0.0));
        }
        Ok(f)
    }

    /// The ambient sphere coordinate with global index `coord`.
    pub fn coordinate(m: &Arc<ManifoldSpec>, coord: usize) -> Result<Self> {
        match m.kind(coord)? {
            CoordKind::Ambient { .. } => {
                let mut e = vec![0; m.sphere_count()];
                e[coord - m.torus_count()] = 1;
                Self::monomial(m, e, 1.0)
            }
            CoordKind::Angle { .. } => Err(Error::InvalidArgument(format!(
                "torus angle `{}` is not a single-valued function",
                m.coord_name(coord)
            ))),
        }
    }

    fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    fn accumulate(&mut self, key: TermKey, c: Complex) {
        let slot = self.terms.entry(key).or_insert(Complex::new(0.0, 0.0));
        *slot += c;
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= ZERO_TOL);
        self
    }

    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.manifold
    }

    /// Whether the field was built from real-valued data (conjugate-symmetric coefficients).
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Complex)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff every normal-form coefficient is below `tol` in magnitude.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.norm() < tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.checked_sub(other).map(|d| d.is_zero(tol)).unwrap_or(false)
    }

    /// Value if the field is a constant.
    pub fn constant_value(&self) -> Option<Complex> {
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (None, _) => Some(Complex::new(0.0, 0.0)),
            (Some(((k, e), c)), None) if k.0.iter().all(|&v| v == 0) && e.0.iter().all(|&v| v == 0) => {
                Some(*c)
            }
            _ => None,
        }
    }

    /// Largest absolute wavenumber per torus angle.
    pub fn max_modes(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.manifold.torus_count()];
        for (k, _) in self.terms.keys() {
            for (o, v) in out.iter_mut().zip(&k.0) {
                *o = (*o).max(v.unsigned_abs());
            }
        }
        out
    }

    /// Largest total sphere degree.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(_, e)| e.0.iter().sum::<u32>()).max().unwrap_or(0)
    }

    fn same_manifold(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.manifold, &other.manifold) || *self.manifold == *other.manifold {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch(
                self.manifold.name().to_string(),
                other.manifold.name().to_string(),
            ))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_manifold(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), *c);
        }
        out.real = self.real && other.real;
        Ok(out.prune())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(-1.0))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_manifold(other)?;
        let m = &self.manifold;
        let mut out = Self::zero(m);
        let mut cache: BTreeMap<Vec<u32>, Vec<(Vec<u32>, f64)>> = BTreeMap::new();
        for ((k1, e1), c1) in &self.terms {
            for ((k2, e2), c2) in &other.terms {
                let modes: Vec<i32> = k1.0.iter().zip(&k2.0).map(|(a, b)| a + b).collect();
                let exps: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                let reduced = cache
                    .entry(exps.clone())
                    .or_insert_with(|| reduce_monomial(m, exps));
                for (e, r) in reduced.iter() {
                    out.accumulate((TorusMode(modes.clone()), SphereMonomial(e.clone())), c1 * c2 * *r);
                }
            }
        }
        out.real = self.real && other.real;
        Ok(out.prune())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.prune()
    }

    pub fn scale_complex(&self, s: Complex) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.real = self.real && s.im.abs() < ZERO_TOL;
        out.prune()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.manifold, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(&self.manifold);
        for ((k, e), c) in &self.terms {
            out.accumulate((TorusMode(k.0.iter().map(|v| -v).collect()), e.clone()), c.conj());
        }
        out.real = self.real;
        out
    }

    /// `(f + conj f) / 2`, flagged real.
    pub fn real_part(&self) -> Self {
        let s = self.checked_add(&self.conj()).expect("same manifold").scale(0.5);
        s.with_real(true)
    }

    /// Whether the coefficients are conjugate-symmetric within `tol`.
    pub fn has_real_symmetry(&self, tol: f64) -> bool {
        self.checked_sub(&self.conj()).map(|d| d.is_zero(tol)).unwrap_or(false)
    }

    /// Exact partial derivative along a global coordinate. For sphere
    /// coordinates this is the ambient derivative of the normal-form
    /// representative.
    pub fn partial(&self, coord: usize) -> Result<Self> {
        let m = &self.manifold;
        let mut out = Self::zero(m);
        out.real = self.real;
        match m.kind(coord)? {
            CoordKind::Angle { period } => {
                for ((k, e), c) in &self.terms {
                    let w = k.0[coord];
                    if w != 0 {
                        let factor = Complex::new(0.0, TAU * w as f64 / period);
                        out.accumulate((k.clone(), e.clone()), c * factor);
                    }
                }
            }
            CoordKind::Ambient { .. } => {
                let l = coord - m.torus_count();
                for ((k, e), c) in &self.terms {
                    let p = e.0[l];
                    if p > 0 {
                        let mut e2 = e.0.clone();
                        e2[l] -= 1;
                        out.accumulate((k.clone(), SphereMonomial(e2)), c * p as f64);
                    }
                }
            }
        }
        Ok(out.prune())
    }

    /// Evaluates at a point given in global coordinates.
    pub fn evaluate(&self, p: &[f64]) -> Result<Complex> {
        self.manifold.check_point(p)?;
        Ok(self.eval_unchecked(p))
    }

    /// Evaluates a real-valued field; fails if the imaginary residue exceeds `1e-12`
    /// relative to the coefficient mass.
    pub fn evaluate_real(&self, p: &[f64]) -> Result<f64> {
        let v = self.evaluate(p)?;
        let mass: f64 = self.terms.values().map(|c| c.norm()).sum();
        if v.im.abs() > 1e-12 * (1.0 + mass) {
            return Err(Error::NotReal(v.im));
        }
        Ok(v.re)
    }

    pub(crate) fn eval_unchecked(&self, p: &[f64]) -> Complex {
        let m = &self.manifold;
        let nt = m.torus_count();
        let angles: Vec<f64> = (0..nt).map(|i| TAU * p[i] / m.periods()[i]).collect();
        let ys = &p[nt..];
        let mut acc = Complex::new(0.0, 0.0);
        for ((k, e), c) in &self.terms {
            let phase: f64 = k.0.iter().zip(&angles).map(|(&w, a)| w as f64 * a).sum();
            let mut mono = 1.0;
            for (y, &pw) in ys.iter().zip(&e.0) {
                if pw > 0 {
                    mono *= y.powi(pw as i32);
                }
            }
            acc += c * Complex::from_polar(mono, phase);
        }
        acc
    }

    /// Real part of the value, for fields already known to be real.
    pub(crate) fn eval_re(&self, p: &[f64]) -> f64 {
        self.eval_unchecked(p).re
    }
}

/// Rewrites `y_last^(2q + r)` as `(1 - sum_{k < last} y_k^2)^q y_last^r` in
/// every sphere block, returning the expanded monomials with coefficients.
pub fn reduce_monomial(m: &ManifoldSpec, exps: Vec<u32>) -> Vec<(Vec<u32>, f64)> {
    let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    reduce_into(m, exps, 1.0, &mut out);
    out.into_iter().filter(|(_, c)| *c != 0.0).collect()
}

fn reduce_into(m: &ManifoldSpec, exps: Vec<u32>, coef: f64, out: &mut BTreeMap<Vec<u32>, f64>) {
    let nt = m.torus_count();
    for b in m.blocks() {
        let last = b.last() - nt;
        if exps[last] >= 2 {
            let mut base = exps;
            base[last] -= 2;
            for k in b.start - nt..last {
                let mut e = base.clone();
                e[k] += 2;
                reduce_into(m, e, -coef, out);
            }
            reduce_into(m, base, coef, out);
            return;
        }
    }
    *out.entry(exps).or_insert(0.0) += coef;
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            /// Panics if the operands live on different manifolds.
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.$checked(rhs).expect("scalar fields on different manifolds")
            }
        }
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

impl Mul<f64> for ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let m = &self.manifold;
        for (i, ((k, e), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im.abs() < ZERO_TOL {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            let phase: Vec<String> = k
                .0
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0)
                .map(|(j, w)| format!("{}{}", w, m.coord_name(j)))
                .collect();
            if !phase.is_empty() {
                write!(f, "*e(i[{}])", phase.join(" "))?;
            }
            for (j, &p) in e.0.iter().enumerate() {
                if p > 0 {
                    let name = m.coord_name(j + m.torus_count());
                    if p == 1 {
                        write!(f, "*{name}")?;
                    } else {
                        write!(f, "*{name}^{p}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::registry;
    use std::f64::consts::PI;

    fn torus3() -> Arc<ManifoldSpec> {
        registry("torus3").unwrap().manifold
    }

    #[test]
    fn sin_squared_product_to_sum() {
        let m = torus3();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let expected = ScalarField::constant(&m, 0.5) - ScalarField::cos_coord(&m, 2, 2, 0.5).unwrap();
        assert!((&s * &s).approx_eq(&expected, 1e-14));
        assert!((&s * &s).is_real());
    }

    #[test]
    fn sphere_relation_reduces_to_one() {
        let m = registry("torus-sphere(1)").unwrap().manifold;
        let y0 = ScalarField::coordinate(&m, m.coord("y0").unwrap()).unwrap();
        let y1 = ScalarField::coordinate(&m, m.coord("y1").unwrap()).unwrap();
        let s = &y0 * &y0 + &y1 * &y1;
        assert!(s.approx_eq(&ScalarField::constant(&m, 1.0), 1e-14));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn relation_reduces_to_zero_on_s3() {
        let m = registry("torus-sphere(3)").unwrap().manifold;
        let mut s = ScalarField::constant(&m, -1.0);
        for k in 0..4 {
            let y = ScalarField::coordinate(&m, m.coord(&format!("y{k}")).unwrap()).unwrap();
            s = s + &y * &y;
        }
        assert!(s.is_zero(1e-14));
        assert!(s.is_empty());
    }

    #[test]
    fn cos_times_sin_at_quarter_pi() {
        let m = torus3();
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let v = (&c * &s).evaluate_real(&[0.0, 0.0, PI / 4.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partials() {
        let m = torus3();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        assert!(s.partial(2).unwrap().approx_eq(&c, 1e-14));
        assert!(s.partial(0).unwrap().is_zero(1e-14));

        let h = Complex::new(0.3, -0.7);
        let e = ScalarField::fourier(&m, vec![2, -3, 0], h).unwrap();
        let dx = e.partial(0).unwrap();
        assert!(dx.approx_eq(&e.scale_complex(Complex::new(0.0, 2.0)), 1e-14));

        let ts = registry("torus-sphere(1)").unwrap().manifold;
        let (i0, i1) = (ts.coord("y0").unwrap(), ts.coord("y1").unwrap());
        let y0 = ScalarField::coordinate(&ts, i0).unwrap();
        let y1 = ScalarField::coordinate(&ts, i1).unwrap();
        assert!((&y0 * &y1).partial(i0).unwrap().approx_eq(&y1, 1e-14));
    }

    #[test]
    fn unit_period_phases() {
        let ts = registry("torus-sphere(2)").unwrap().manifold;
        let f = ScalarField::sin_coord(&ts, 0, 1, 1.0).unwrap();
        let mut p = vec![0.25, 0.0, 0.0, 1.0, 0.0, 0.0];
        assert!((f.evaluate_real(&p).unwrap() - 1.0).abs() < 1e-15);
        p[0] = 0.5;
        assert!(f.evaluate_real(&p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let m = torus3();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        assert!((s.evaluate_real(&[0.0, 0.0, PI / 2.0]).unwrap() - 1.0).abs() < 1e-15);

        let ts = registry("torus-sphere(2)").unwrap().manifold;
        let y0 = ScalarField::coordinate(&ts, ts.coord("y0").unwrap()).unwrap();
        assert_eq!(y0.evaluate_real(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(
            y0.evaluate(&[0.0, 0.0, 0.0, 1.0, 0.1, 0.0]),
            Err(Error::OffSphere(_))
        ));

        let norm = (2.0 * PI).powi(2);
        let f = (ScalarField::constant(&m, 1.0) - ScalarField::cos_coord(&m, 2, 2, 1.0).unwrap())
            .scale(1.0 / norm);
        let v = f.evaluate_real(&[0.0, 0.0, PI / 4.0]).unwrap();
        assert!((v - 1.0 / norm).abs() < 1e-16);
    }

    #[test]
    fn zero_tests() {
        let m = torus3();
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0).unwrap();
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0).unwrap();
        let one = ScalarField::constant(&m, 1.0);
        assert!((&s * &s + &c * &c - &one).is_zero(1e-12));
        assert!(!(&s - &c).is_zero(1e-12));
    }

    #[test]
    fn mismatched_manifolds() {
        let a = ScalarField::constant(&torus3(), 1.0);
        let b = ScalarField::constant(&registry("torus-sphere(2)").unwrap().manifold, 1.0);
        assert!(matches!(a.checked_add(&b), Err(Error::ManifoldMismatch(..))));
        assert!(matches!(a.partial(7), Err(Error::UnknownCoordinate(_))));
    }

    #[test]
    fn high_powers_reduce() {
        let m = registry("torus-sphere(2)").unwrap().manifold;
        let y2 = ScalarField::coordinate(&m, m.coord("y2").unwrap()).unwrap();
        let p = y2.powi(5);
        for ((_, e), _) in p.terms() {
            assert!(e.0[2] <= 1);
        }
        let pt = [0.0, 0.0, 0.0, 0.48, 0.6, 0.64];
        assert!((p.evaluate_real(&pt).unwrap() - 0.64f64.powi(5)).abs() < 1e-14);
    }
}

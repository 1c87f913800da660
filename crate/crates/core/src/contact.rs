//! Contact forms on the registered manifolds, Reeb fields, and contact
//! Hamiltonians.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::{Form, VectorFieldSym};
use crate::funcalg::{ScalarField, ZERO_TOL};
use crate::manifolds::{registry, sample_points, CycleSpec, ManifoldSpec, RegistryEntry, TorusSlot, DEFAULT_GRID};

/// Tolerance for symbolic identities (coefficient magnitudes after cancellation).
pub const SYMBOLIC_TOL: f64 = 1e-10;
/// Largest condition number accepted by the pointwise solver.
pub const CONDITION_GUARD: f64 = 1e8;

/// A contact manifold `(M^{2n+1}, alpha)` with cached derived data.
#[derive(Clone, Debug)]
pub struct ContactData {
    pub entry: RegistryEntry,
    pub alpha: Form,
    pub d_alpha: Form,
    /// `(d alpha)^n`.
    pub d_alpha_n: Form,
    pub reeb: VectorFieldSym,
    /// `alpha ^ (d alpha)^n`.
    pub mu: Form,
    pub n: usize,
    pub description: String,
}

impl ContactData {
    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.entry.manifold
    }

    pub fn name(&self) -> &str {
        self.entry.manifold.name()
    }

    /// Checks `alpha(R) = 1`, `iota(R) d alpha = 0`, and that `mu` does not
    /// vanish at the default quadrature nodes.
    pub fn check_invariants(&self) -> Result<()> {
        let one = self.alpha.interior(&self.reeb)?.as_scalar().expect("0-form");
        let unit = ScalarField::constant(self.manifold(), 1.0);
        if !one.approx_eq(&unit, SYMBOLIC_TOL) {
            return Err(Error::Invariant(format!("alpha(R) = {one}")));
        }
        if !self.d_alpha.interior(&self.reeb)?.is_zero(SYMBOLIC_TOL) {
            return Err(Error::Invariant("iota(R) d alpha != 0".into()));
        }
        let m = self.manifold();
        for p in distinct_nodes(m, &self.entry.fundamental, &self.mu.complexity().0)? {
            let v = self.mu.eval_unchecked(&p, &m.tangent_frame(&p));
            if v.abs() <= 1e-9 {
                return Err(Error::Invariant(format!("mu vanishes at {p:?}")));
            }
        }
        Ok(())
    }
}

/// Default quadrature nodes of `cycle`, keeping a single node along every
/// torus angle with zero mode bound in `modes` (values are constant there).
fn distinct_nodes(m: &ManifoldSpec, cycle: &CycleSpec, modes: &[u32]) -> Result<Vec<Vec<f64>>> {
    let mut reduced = cycle.clone();
    for (slot, &k) in reduced.torus.iter_mut().zip(modes) {
        if k == 0 && matches!(slot, TorusSlot::Vary) {
            *slot = TorusSlot::Pinned(0.0);
        }
    }
    sample_points(m, &reduced, &DEFAULT_GRID)
}

/// Builds the contact structure of a registered manifold.
///
/// * `torus3`: `alpha = cos z dx - sin z dy`.
/// * `torus-sphere(n)`: `alpha = sum_k y_k dx_k`.
pub fn build_contact(name: &str) -> Result<ContactData> {
    let entry = registry(name)?;
    let m = entry.manifold.clone();
    let (alpha, reeb, n, description) = if m.name() == "torus3" {
        let c = ScalarField::cos_coord(&m, 2, 1, 1.0)?;
        let s = ScalarField::sin_coord(&m, 2, 1, 1.0)?;
        let alpha = Form::monomial(c.clone(), &[0])?.checked_add(&Form::monomial(-&s, &[1])?)?;
        let z = ScalarField::zero(&m);
        let reeb = VectorFieldSym::new(vec![c, -&s, z])?;
        (alpha, reeb, 1, "alpha = cos z dx - sin z dy".to_string())
    } else if m.name().starts_with("torus-sphere") {
        let n = m.torus_count() - 1;
        let start = m.blocks()[0].start;
        let mut alpha = Form::zero(&m, 1);
        let mut comps = vec![ScalarField::zero(&m); m.ambient_dim()];
        for (k, slot) in comps.iter_mut().enumerate().take(n + 1) {
            let y = ScalarField::coordinate(&m, start + k)?;
            alpha = alpha.checked_add(&Form::monomial(y.clone(), &[k])?)?;
            *slot = y;
        }
        (alpha, VectorFieldSym::new(comps)?, n, "alpha = sum_k y_k dx_k".to_string())
    } else {
        return Err(Error::Unsupported(format!("no contact form registered on `{}`", m.name())));
    };
    let d_alpha = alpha.d();
    let d_alpha_n = d_alpha.wedge_power(n)?;
    let mu = alpha.wedge(&d_alpha_n)?;
    let data = ContactData { entry, alpha, d_alpha, d_alpha_n, reeb, mu, n, description };
    data.check_invariants()?;
    Ok(data)
}

/// `R_alpha . H`.
pub fn reeb_derivative(h: &ScalarField, c: &ContactData) -> Result<ScalarField> {
    c.reeb.apply(h)
}

/// True iff `R_alpha . H` vanishes symbolically.
pub fn is_basic(h: &ScalarField, c: &ContactData) -> bool {
    reeb_derivative(h, c).map(|r| r.is_zero(SYMBOLIC_TOL)).unwrap_or(false)
}

/// The contact Hamiltonian `alpha(X)`.
pub fn hamiltonian_of(x: &VectorFieldSym, c: &ContactData) -> Result<ScalarField> {
    Ok(c.alpha.interior(x)?.as_scalar().expect("0-form"))
}

/// Strictly contact vector field of a basic Hamiltonian: `alpha(X) = H`,
/// `iota(X) d alpha = -dH`.
pub fn contact_vector_field(h: &ScalarField, c: &ContactData) -> Result<VectorFieldSym> {
    if !is_basic(h, c) {
        return Err(Error::NotBasic);
    }
    solve_symbolic(h, &Form::scalar(h.clone()).d().scale(-1.0), c)
}

/// Contact vector field of an arbitrary Hamiltonian: `alpha(X) = H`,
/// `iota(X) d alpha = (R.H) alpha - dH`. Its flow preserves `ker alpha` and
/// rescales `alpha` by `R.H`.
pub fn general_contact_vector_field(h: &ScalarField, c: &ContactData) -> Result<VectorFieldSym> {
    let rh = reeb_derivative(h, c)?;
    let rhs = c.alpha.mul_scalar(&rh).checked_add(&Form::scalar(h.clone()).d().scale(-1.0))?;
    solve_symbolic(h, &rhs, c)
}

/// Rows of the defining linear system for the coordinate field `d/dx_j`:
/// `alpha(d_j)` followed by the canonical coefficients of `iota(d_j) d alpha`.
fn system_columns(c: &ContactData) -> Vec<Vec<ScalarField>> {
    let m = c.manifold();
    let alpha = c.alpha.restricted();
    (0..m.ambient_dim())
        .map(|j| {
            let contracted = c.d_alpha.interior_coordinate(j).restricted();
            let mut col = vec![alpha.coefficient(&[j])];
            col.extend((0..m.ambient_dim()).map(|i| contracted.coefficient(&[i])));
            col
        })
        .collect()
}

/// Solves `alpha(X) = H`, `iota(X) d alpha = rhs` in the coordinate frame via
/// the normal equations, which must be upper triangular with a constant
/// diagonal; the solution is then verified symbolically.
fn solve_symbolic(h: &ScalarField, rhs: &Form, c: &ContactData) -> Result<VectorFieldSym> {
    let m = c.manifold();
    let n = m.ambient_dim();
    let cols = system_columns(c);
    let rhs = rhs.restricted();
    let mut b = vec![h.clone()];
    b.extend((0..n).map(|i| rhs.coefficient(&[i])));

    let dot = |u: &[ScalarField], v: &[ScalarField]| -> Result<ScalarField> {
        let mut s = ScalarField::zero(m);
        for (a, b) in u.iter().zip(v) {
            if !a.is_empty() && !b.is_empty() {
                s = s.checked_add(&a.checked_mul(b)?)?;
            }
        }
        Ok(s)
    };

    let mut gram = vec![vec![ScalarField::zero(m); n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = dot(&cols[i], &cols[j])?;
        }
    }
    let mut diag = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            if !gram[i][j].is_zero(SYMBOLIC_TOL) {
                return Err(Error::NotTriangularizable(format!("normal matrix entry ({i}, {j}) = {}", gram[i][j])));
            }
        }
        diag[i] = match gram[i][i].constant_value() {
            Some(v) if v.im.abs() < ZERO_TOL && v.re.abs() > SYMBOLIC_TOL => v.re,
            _ => {
                return Err(Error::NotTriangularizable(format!("non-constant pivot {}", gram[i][i])));
            }
        };
    }

    let mut x = vec![ScalarField::zero(m); n];
    for i in (0..n).rev() {
        let mut acc = dot(&cols[i], &b)?;
        for k in i + 1..n {
            if !gram[i][k].is_empty() {
                acc = acc.checked_sub(&gram[i][k].checked_mul(&x[k])?)?;
            }
        }
        x[i] = acc.scale(1.0 / diag[i]);
    }

    let field = VectorFieldSym::new(x)?;
    let ham = hamiltonian_of(&field, c)?;
    if !ham.approx_eq(h, SYMBOLIC_TOL) {
        return Err(Error::Invariant("alpha(X) != H".into()));
    }
    let contracted = c.d_alpha.interior(&field)?;
    if !contracted.approx_eq(&rhs, SYMBOLIC_TOL) {
        return Err(Error::Invariant("iota(X) d alpha differs from the prescribed form".into()));
    }
    Ok(field)
}

/// Numeric matrix of the defining system at `p`: one row for `alpha`, one
/// per canonical `d alpha` coefficient, one tangency row per sphere factor.
fn pointwise_system(c: &ContactData, cols: &[Vec<ScalarField>], p: &[f64]) -> DMatrix<f64> {
    let m = c.manifold();
    let n = m.ambient_dim();
    let rows = 1 + n + m.blocks().len();
    let mut a = DMatrix::zeros(rows, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, f) in col.iter().enumerate() {
            a[(i, j)] = f.eval_re(p);
        }
    }
    for (r, b) in m.blocks().iter().enumerate() {
        for i in b.range() {
            a[(1 + n + r, i)] = p[i];
        }
    }
    a
}

/// Pointwise numeric solve of `alpha(X) = H`, `iota(X) d alpha = -dH`
/// (least squares with tangency rows). Fails on ill-conditioned systems or a
/// residual above `1e-10`.
pub fn contact_vector_field_at(h: &ScalarField, c: &ContactData, p: &[f64]) -> Result<Vec<f64>> {
    let m = c.manifold();
    m.check_point(p)?;
    let n = m.ambient_dim();
    let a = pointwise_system(c, &system_columns(c), p);
    let rhs = Form::scalar(h.clone()).d().scale(-1.0).restricted();
    let mut b = DVector::zeros(a.nrows());
    b[0] = h.eval_re(p);
    for i in 0..n {
        b[1 + i] = rhs.coefficient(&[i]).eval_re(p);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 || hi / lo > CONDITION_GUARD {
        return Err(Error::SingularSystem(if lo == 0.0 { f64::INFINITY } else { hi / lo }));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    if residual > 1e-10 {
        return Err(Error::Invariant(format!("pointwise residual {residual:.3e}")));
    }
    Ok(x.iter().copied().collect())
}

/// Smallest singular value of the defining system over the default nodes.
/// Positive means the contact vector field of any Hamiltonian is unique.
pub fn min_system_singular_value(c: &ContactData) -> Result<f64> {
    let m = c.manifold();
    let cols = system_columns(c);
    let mut lo = f64::INFINITY;
    for p in distinct_nodes(m, &c.entry.fundamental, &c.d_alpha.complexity().0)? {
        let sv = pointwise_system(c, &cols, &p).singular_values();
        lo = lo.min(sv.min());
    }
    Ok(lo)
}

/// Outcome of the contact test `L_X alpha = h alpha`.
#[derive(Clone, Debug)]
pub enum ContactTest {
    /// `L_X alpha = 0`.
    Strict,
    /// `L_X alpha = h alpha` with `h` not identically zero.
    Conformal(ScalarField),
    /// `L_X alpha` is not a multiple of `alpha`; the residual of the best
    /// candidate is reported.
    NotContact(f64),
}

impl ContactTest {
    pub fn is_strict(&self) -> bool {
        matches!(self, ContactTest::Strict)
    }

    pub fn is_contact(&self) -> bool {
        !matches!(self, ContactTest::NotContact(_))
    }

    /// The conformal factor; zero when strict, `None` when not contact.
    pub fn factor(&self, m: &Arc<ManifoldSpec>) -> Option<ScalarField> {
        match self {
            ContactTest::Strict => Some(ScalarField::zero(m)),
            ContactTest::Conformal(h) => Some(h.clone()),
            ContactTest::NotContact(_) => None,
        }
    }
}

/// Tests whether `X` preserves `ker alpha`, and whether it preserves `alpha`.
///
/// The only candidate factor is `h = iota(R) L_X alpha`; the test then checks
/// `L_X alpha - h alpha = 0` symbolically, which avoids dividing by the
/// coefficients of `alpha`.
pub fn is_strictly_contact_field(x: &VectorFieldSym, c: &ContactData) -> Result<ContactTest> {
    let lie = c.alpha.lie_derivative(x)?;
    let h = lie.interior(&c.reeb)?.as_scalar().expect("0-form");
    let rest = lie.checked_add(&c.alpha.mul_scalar(&h).scale(-1.0))?;
    if !rest.is_zero(SYMBOLIC_TOL) {
        return Ok(ContactTest::NotContact(rest.residual()));
    }
    if h.is_zero(SYMBOLIC_TOL) {
        Ok(ContactTest::Strict)
    } else {
        Ok(ContactTest::Conformal(h))
    }
}

/// Named basic Hamiltonians used by the verification suites.
pub fn registry_hamiltonians(c: &ContactData) -> Result<Vec<(String, ScalarField)>> {
    let m = c.manifold();
    let mut out = vec![("1".to_string(), ScalarField::constant(m, 1.0))];
    if m.name() == "torus3" {
        let norm = 1.0 / (2.0 * std::f64::consts::PI).powi(2);
        out.push(("sin(z)/(2*pi)^2".into(), ScalarField::sin_coord(m, 2, 1, norm)?));
        out.push(("cos(z)/(2*pi)^2".into(), ScalarField::cos_coord(m, 2, 1, norm)?));
        for k in 1..=3 {
            out.push((format!("sin({k}*z)"), ScalarField::sin_coord(m, 2, k, 1.0)?));
            out.push((format!("cos({k}*z)"), ScalarField::cos_coord(m, 2, k, 1.0)?));
        }
        let mixed = ScalarField::sin_coord(m, 2, 1, 1.0)?.powi(2) + ScalarField::cos_coord(m, 2, 2, 0.5)?;
        out.push(("sin(z)^2+cos(2*z)/2".into(), mixed));
    } else {
        let start = m.blocks()[0].start;
        for k in 0..=c.n {
            out.push((format!("y{k}"), ScalarField::coordinate(m, start + k)?));
        }
        let y0 = ScalarField::coordinate(m, start)?;
        let y1 = ScalarField::coordinate(m, start + 1)?;
        out.push(("y0*y1".into(), &y0 * &y1));
        out.push(("y0^2-2*y1".into(), &y0.powi(2) - &y1.scale(2.0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus3_structure() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let vol = Form::monomial(ScalarField::constant(m, 1.0), &[0, 1, 2]).unwrap();
        assert!(c.mu.approx_eq(&vol, 1e-12));
        let expected = VectorFieldSym::new(vec![
            ScalarField::cos_coord(m, 2, 1, 1.0).unwrap(),
            ScalarField::sin_coord(m, 2, 1, -1.0).unwrap(),
            ScalarField::zero(m),
        ])
        .unwrap();
        assert!(c.reeb.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn torus_sphere_structure() {
        for n in 1..=3 {
            let c = build_contact(&format!("torus-sphere({n})")).unwrap();
            assert_eq!(c.n, n);
            assert_eq!(c.mu.degree(), 2 * n + 1);
            let reeb = contact_vector_field(&ScalarField::constant(c.manifold(), 1.0), &c).unwrap();
            assert!(reeb.approx_eq(&c.reeb, 1e-12));
        }
    }

    #[test]
    fn basic_functions() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        assert!(is_basic(&ScalarField::sin_coord(m, 2, 1, 1.0).unwrap(), &c));
        let sx = ScalarField::sin_coord(m, 0, 1, 1.0).unwrap();
        assert!(!is_basic(&sx, &c));
        let expected = &ScalarField::cos_coord(m, 2, 1, 1.0).unwrap() * &ScalarField::cos_coord(m, 0, 1, 1.0).unwrap();
        assert!(reeb_derivative(&sx, &c).unwrap().approx_eq(&expected, 1e-12));
        assert!(matches!(contact_vector_field(&sx, &c), Err(Error::NotBasic)));

        let ts = build_contact("torus-sphere(2)").unwrap();
        for k in 0..3 {
            assert!(is_basic(&ScalarField::coordinate(ts.manifold(), 3 + k).unwrap(), &ts));
        }
    }

    #[test]
    fn torus3_closed_form_solution() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let h = ScalarField::sin_coord(m, 2, 1, 1.0).unwrap() + ScalarField::cos_coord(m, 2, 2, 0.3).unwrap();
        let hp = h.partial(2).unwrap();
        let (cz, sz) = (ScalarField::cos_coord(m, 2, 1, 1.0).unwrap(), ScalarField::sin_coord(m, 2, 1, 1.0).unwrap());
        let x = contact_vector_field(&h, &c).unwrap();
        assert!(x.component(0).approx_eq(&(&(&h * &cz) - &(&hp * &sz)), 1e-12));
        assert!(x.component(1).approx_eq(&-(&(&h * &sz) + &(&hp * &cz)), 1e-12));
        assert!(x.component(2).is_zero(1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            let num = contact_vector_field_at(&h, &c, &p).unwrap();
            let sym = x.evaluate(&p);
            for (a, b) in num.iter().zip(&sym) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn torus_sphere_cross_path() {
        let c = build_contact("torus-sphere(2)").unwrap();
        let m = c.manifold();
        let h = ScalarField::coordinate(m, 3).unwrap();
        let x = contact_vector_field(&h, &c).unwrap();
        for p in sample_points(m, &c.entry.fundamental, &DEFAULT_GRID).unwrap().iter().step_by(37) {
            let num = contact_vector_field_at(&h, &c, p).unwrap();
            for (a, b) in num.iter().zip(x.evaluate(p)) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!(min_system_singular_value(&c).unwrap() > 0.1);
    }

    #[test]
    fn strictness_examples() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        assert!(is_strictly_contact_field(&c.reeb, &c).unwrap().is_strict());
        let dx = VectorFieldSym::coordinate(m, 0).unwrap();
        assert!(is_strictly_contact_field(&dx, &c).unwrap().is_strict());
        let f = ScalarField::cos_coord(m, 2, 1, 1.0).unwrap() + ScalarField::constant(m, 2.0);
        let fr = c.reeb.mul_scalar(&f).unwrap();
        assert!(!is_strictly_contact_field(&fr, &c).unwrap().is_strict());

        let sx = ScalarField::sin_coord(m, 0, 1, 1.0).unwrap();
        let x = general_contact_vector_field(&sx, &c).unwrap();
        match is_strictly_contact_field(&x, &c).unwrap() {
            ContactTest::Conformal(h) => assert!(h.approx_eq(&reeb_derivative(&sx, &c).unwrap(), 1e-12)),
            other => panic!("expected a conformal factor, got {other:?}"),
        }
    }

    #[test]
    fn divergence_free_and_round_trip() {
        for name in ["torus3", "torus-sphere(1)", "torus-sphere(2)"] {
            let c = build_contact(name).unwrap();
            for (label, h) in registry_hamiltonians(&c).unwrap() {
                let x = contact_vector_field(&h, &c).unwrap();
                assert!(hamiltonian_of(&x, &c).unwrap().approx_eq(&h, 1e-12), "{name} {label}");
                assert!(c.mu.lie_derivative(&x).unwrap().is_zero(1e-10), "{name} {label}");
                assert!(is_strictly_contact_field(&x, &c).unwrap().is_strict());
            }
        }
    }
}

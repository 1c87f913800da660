//! Flux of strictly contact isotopies.
//!
//! The flux of a divergence-free isotopy generated by `X_t` is the class of
//! `int_0^1 iota(X_t) mu dt`. For a basic Hamiltonian it equals the class of
//! `(n+1) (int_0^1 H_t dt) (d alpha)^n`. Both are computed here by separate
//! code paths and compared through their periods.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::contact::{contact_vector_field, is_basic, ContactData};
use crate::error::{Error, Result};
use crate::forms::{Form, VectorFieldSym};
use crate::funcalg::ScalarField;
use crate::linalg::{self, CompensatedSum};
use crate::manifolds::{
    integrate, intersection_number, periods, sphere_volume, CycleSpec, ManifoldSpec, PeriodVector, QuadratureGrid,
};

/// Default absolute tolerance for period comparisons.
pub const FLUX_TOL: f64 = 1e-8;
/// Relative singular value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Simpson nodes used to average sampled time profiles.
pub const SIMPSON_NODES: usize = 129;
/// Gauss–Legendre nodes in time for sampled profiles on the direct path.
const SAMPLED_TIME_NODES: usize = 32;

pub const ORIENTATION_CONVENTION: &str = "cycles are oriented by ascending global coordinate order \
(torus angles first, then sphere coordinates); sphere factors carry the orientation of \
sum_k (-1)^k y_k dy_0 ^ .. ^ dy_k^ ^ .. ^ dy_n";

/// Time dependence of one summand of a Hamiltonian on `[0, 1]`.
#[derive(Clone)]
pub enum TimeProfile {
    /// `sum_i c_i t^i`.
    Polynomial(Vec<f64>),
    /// Arbitrary smooth profile, averaged with composite Simpson.
    Sampled(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TimeProfile {
    pub fn constant(c: f64) -> Self {
        TimeProfile::Polynomial(vec![c])
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * t + a),
            TimeProfile::Sampled(f) => f(t),
        }
    }

    /// `int_0^1 p(t) dt`: exact for polynomials, Simpson otherwise.
    pub fn average(&self) -> f64 {
        match self {
            TimeProfile::Polynomial(c) => c.iter().enumerate().map(|(i, a)| a / (i + 1) as f64).sum(),
            TimeProfile::Sampled(f) => {
                let n = SIMPSON_NODES - 1;
                let h = 1.0 / n as f64;
                let s: CompensatedSum = (0..=n)
                    .map(|i| {
                        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                        w * f(i as f64 * h)
                    })
                    .collect();
                s.value() * h / 3.0
            }
        }
    }

    fn degree(&self) -> Option<usize> {
        match self {
            TimeProfile::Polynomial(c) => Some(c.len().saturating_sub(1)),
            TimeProfile::Sampled(_) => None,
        }
    }
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeProfile::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            TimeProfile::Sampled(_) => f.write_str("Sampled(..)"),
        }
    }
}

/// `H(t, p) = sum_i profile_i(t) H_i(p)` with basic spatial parts.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    manifold: Arc<ManifoldSpec>,
    pieces: Vec<(TimeProfile, ScalarField)>,
}

impl TimeDependentHamiltonian {
    pub fn new(c: &ContactData, pieces: Vec<(TimeProfile, ScalarField)>) -> Result<Self> {
        for (_, h) in &pieces {
            if **h.manifold() != **c.manifold() {
                return Err(Error::ManifoldMismatch(h.manifold().name().into(), c.name().into()));
            }
            if !h.is_real() {
                return Err(Error::NotReal(h.terms().map(|(_, v)| v.im.abs()).fold(0.0, f64::max)));
            }
            if !is_basic(h, c) {
                return Err(Error::NotBasic);
            }
        }
        Ok(Self { manifold: c.manifold().clone(), pieces })
    }

    pub fn autonomous(c: &ContactData, h: ScalarField) -> Result<Self> {
        Self::new(c, vec![(TimeProfile::constant(1.0), h)])
    }

    pub fn zero(c: &ContactData) -> Self {
        Self { manifold: c.manifold().clone(), pieces: Vec::new() }
    }

    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.manifold
    }

    pub fn pieces(&self) -> &[(TimeProfile, ScalarField)] {
        &self.pieces
    }

    pub fn at(&self, t: f64) -> ScalarField {
        self.pieces.iter().fold(ScalarField::zero(&self.manifold), |acc, (p, h)| acc + h.scale(p.eval(t)))
    }

    /// `int_0^1 H_t dt`.
    pub fn time_average(&self) -> ScalarField {
        self.pieces.iter().fold(ScalarField::zero(&self.manifold), |acc, (p, h)| acc + h.scale(p.average()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let pieces = self.pieces.iter().map(|(p, h)| (p.clone(), h.scale(s))).collect();
        Self { manifold: self.manifold.clone(), pieces }
    }

    /// Gauss–Legendre nodes on `[0, 1]` for the direct path.
    fn time_nodes(&self) -> Vec<(f64, f64)> {
        let n = self
            .pieces
            .iter()
            .map(|(p, _)| p.degree().map(|d| d / 2 + 1).unwrap_or(SAMPLED_TIME_NODES))
            .max()
            .unwrap_or(1);
        linalg::gauss_legendre(n, 0.0, 1.0)
    }
}

/// Flux computed by both paths.
#[derive(Clone, Debug)]
pub struct FluxResult {
    /// `(n+1) (int H_t dt) (d alpha)^n`.
    pub formula_form: Form,
    pub formula: PeriodVector,
    /// Periods of `int_0^1 iota(X_{H_t}) mu dt`.
    pub direct: PeriodVector,
    /// Per-cycle tolerances: `tol * max(1, vol(cycle))`.
    pub cycle_tolerances: Vec<f64>,
    pub max_diff: f64,
    pub agree: bool,
}

/// Formula-path flux form `(n+1) H (d alpha)^n`.
pub fn flux_form(h: &ScalarField, c: &ContactData) -> Form {
    c.d_alpha_n.mul_scalar(h).scale((c.n + 1) as f64)
}

fn cycle_tolerances(c: &ContactData, tol: f64) -> Vec<f64> {
    c.entry.basis.iter().map(|cy| tol * cy.volume(c.manifold()).max(1.0)).collect()
}

/// Periods of `(n+1) H (d alpha)^n` over the registry basis.
pub fn formula_periods(h: &ScalarField, c: &ContactData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    periods(&flux_form(h, c), &c.entry.basis, grid)
}

/// Periods of `iota(X) mu` for a divergence-free field.
pub fn vector_field_flux(x: &VectorFieldSym, c: &ContactData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    periods(&c.mu.interior(x)?, &c.entry.basis, grid)
}

/// Flux of the isotopy generated by a time-dependent basic Hamiltonian.
pub fn flux_strict(
    h: &TimeDependentHamiltonian,
    c: &ContactData,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<FluxResult> {
    let avg = h.time_average();
    let formula_form = flux_form(&avg, c);
    let formula = periods(&formula_form, &c.entry.basis, grid)?;

    let labels = c.entry.labels();
    let mut acc = vec![CompensatedSum::default(); labels.len()];
    let mut used_grid = formula.grid;
    for (t, w) in h.time_nodes() {
        let x = contact_vector_field(&h.at(t), c)?;
        let p = vector_field_flux(&x, c, grid)?;
        used_grid = p.grid;
        acc.iter_mut().zip(&p.values).for_each(|(a, v)| a.add(w * v));
    }
    let direct = PeriodVector {
        labels,
        values: acc.iter().map(CompensatedSum::value).collect(),
        tolerance: tol,
        grid: used_grid,
    };
    let cycle_tolerances = cycle_tolerances(c, tol);
    let max_diff = formula.max_abs_diff(&direct);
    let agree = formula
        .values
        .iter()
        .zip(&direct.values)
        .zip(&cycle_tolerances)
        .all(|((a, b), t)| (a - b).abs() <= *t);
    let formula = PeriodVector { tolerance: tol, ..formula };
    Ok(FluxResult { formula_form, formula, direct, cycle_tolerances, max_diff, agree })
}

/// Flux of the Reeb flow: periods of `(n+1)(d alpha)^n`.
pub fn reeb_flux(c: &ContactData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    periods(&c.d_alpha_n.scale((c.n + 1) as f64), &c.entry.basis, grid)
}

/// Exactness of a closed codimension-one form, decided by its periods over
/// the registry basis. Sound on registry manifolds, whose relevant homology
/// is free and spanned by the registered cycles.
pub fn is_exact_by_periods(a: &Form, basis: &[CycleSpec], grid: &QuadratureGrid, tol: f64) -> Result<bool> {
    let m = a.manifold();
    if a.degree() + 1 != m.dim() {
        return Err(Error::DegreeMismatch { form: a.degree(), cycle: m.dim() - 1 });
    }
    Ok(periods(a, basis, grid)?.max_abs() < tol)
}

/// Rank of the span of flux period vectors.
#[derive(Clone, Debug)]
pub struct ImageRank {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub vectors: Vec<PeriodVector>,
    /// Basis cycles on which every flux in the family has zero period.
    pub excluded: Vec<String>,
}

pub fn image_rank(hs: &[ScalarField], c: &ContactData, grid: &QuadratureGrid) -> Result<ImageRank> {
    let labels = c.entry.labels();
    if hs.is_empty() {
        return Ok(ImageRank { rank: 0, singular_values: Vec::new(), vectors: Vec::new(), excluded: labels });
    }
    for h in hs {
        if !is_basic(h, c) {
            return Err(Error::NotBasic);
        }
    }
    let vectors = hs.iter().map(|h| formula_periods(h, c, grid)).collect::<Result<Vec<_>>>()?;
    let mat = DMatrix::from_fn(vectors.len(), labels.len(), |i, j| vectors[i].values[j]);
    let (rank, singular_values) = linalg::numerical_rank(&mat, RANK_TOL);
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let excluded = (0..labels.len())
        .filter(|&j| vectors.iter().all(|v| v.values[j].abs() <= RANK_TOL * largest.max(f64::MIN_POSITIVE)))
        .map(|j| labels[j].clone())
        .collect();
    Ok(ImageRank { rank, singular_values, vectors, excluded })
}

fn require_torus_sphere(c: &ContactData) -> Result<()> {
    if !c.name().starts_with("torus-sphere") {
        return Err(Error::Unsupported(format!("`{}` is not a torus-sphere manifold", c.name())));
    }
    if c.n < 2 {
        return Err(Error::InvalidArgument("n = 1 is the torus3 contact manifold; use n >= 2".into()));
    }
    Ok(())
}

/// `H_k = (-1)^{n(n+1)/2 + k} y_k / (c_n n!)`, the basic Hamiltonian whose
/// flux is dual to the cycle `a_k`.
pub fn dual_hamiltonian(c: &ContactData, k: usize) -> Result<ScalarField> {
    require_torus_sphere(c)?;
    let n = c.n;
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let sign = if (n * (n + 1) / 2 + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    let m = c.manifold();
    Ok(ScalarField::coordinate(m, m.blocks()[0].start + k)?.scale(sign / (sphere_volume(n) * fact)))
}

/// Matrix `M[j][k] = int_{a_j} (n+1) H_k (d alpha)^n`.
pub fn dual_basis_matrix(c: &ContactData, grid: &QuadratureGrid) -> Result<DMatrix<f64>> {
    require_torus_sphere(c)?;
    let n = c.n + 1;
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let p = formula_periods(&dual_hamiltonian(c, k)?, c, grid)?;
        for j in 0..n {
            out[(j, k)] = p.values[j];
        }
    }
    Ok(out)
}

/// The dual basis matrix together with its distance from the identity.
pub fn dual_basis_check(c: &ContactData, grid: &QuadratureGrid) -> Result<(DMatrix<f64>, f64)> {
    let m = dual_basis_matrix(c, grid)?;
    let dev = (&m - DMatrix::identity(m.nrows(), m.ncols())).amax();
    Ok((m, dev))
}

/// Linear section of the flux: `v -> sum_k v_k H_k`, constant in time.
pub fn flux_section(v: &PeriodVector, c: &ContactData) -> Result<TimeDependentHamiltonian> {
    require_torus_sphere(c)?;
    if v.labels != c.entry.labels() {
        return Err(Error::InvalidArgument(format!("labels {:?} do not match the basis", v.labels)));
    }
    let mut h = ScalarField::zero(c.manifold());
    for (k, &vk) in v.values.iter().enumerate() {
        h = h + dual_hamiltonian(c, k)?.scale(vk);
    }
    TimeDependentHamiltonian::autonomous(c, h)
}

/// Both sides of the mass-flow duality for `f = winding * theta / period`
/// with values in `R/Z`.
#[derive(Clone, Debug)]
pub struct MassFlow {
    /// `int_M Flux ^ f* sigma` with the flux represented by `int iota(X_t) mu dt`.
    pub lhs: f64,
    /// `(n+1) int_M (int H_t dt) (R.f) mu`.
    pub rhs: f64,
    /// `int_M mu`.
    pub total_volume: f64,
    /// Both sides after rescaling `mu` to unit volume.
    pub lhs_unit_volume: f64,
    pub rhs_unit_volume: f64,
}

impl MassFlow {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn mass_flow(
    h: &TimeDependentHamiltonian,
    c: &ContactData,
    coord: usize,
    winding: i32,
    grid: &QuadratureGrid,
) -> Result<MassFlow> {
    let m = c.manifold();
    let period = m
        .period(coord)
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` is not a torus angle", m.coord_name(coord))))?;
    let scale = winding as f64 / period;
    let sigma = Form::differential(m, coord)?.scale(scale);
    let fundamental = &c.entry.fundamental;

    // flux as a time integral of iota(X_t) mu, wedged with f* sigma
    let mut lhs = CompensatedSum::default();
    for (t, w) in h.time_nodes() {
        let x = contact_vector_field(&h.at(t), c)?;
        let top = c.mu.interior(&x)?.wedge(&sigma)?;
        lhs.add(w * integrate(&top, fundamental, &grid.adapted_to(&top))?);
    }

    // (n+1) H (R.f) mu, with R.f = winding R^coord / period
    let rf = c.reeb.component(coord).scale(scale);
    let integrand = c.mu.mul_scalar(&(&h.time_average() * &rf)).scale((c.n + 1) as f64);
    let rhs = integrate(&integrand, fundamental, &grid.adapted_to(&integrand))?;
    let total_volume = integrate(&c.mu, fundamental, &grid.adapted_to(&c.mu))?;
    let lhs = lhs.value();
    Ok(MassFlow {
        lhs,
        rhs,
        total_volume,
        lhs_unit_volume: lhs / total_volume,
        rhs_unit_volume: rhs / total_volume,
    })
}

/// Comparison of the flux of a circle action with its orbit class.
#[derive(Clone, Debug)]
pub struct OrbitDuality {
    /// Minimal period of the action.
    pub period: f64,
    /// Winding of one orbit around each torus angle.
    pub winding: Vec<i32>,
    /// Intersection numbers of the orbit class with the basis cycles.
    pub intersections: Vec<i32>,
    pub flux: PeriodVector,
    /// `(int_M mu / period) * intersections`.
    pub predicted: Vec<f64>,
    pub max_diff: f64,
}

impl OrbitDuality {
    pub fn agrees(&self, tol: f64) -> bool {
        self.max_diff <= tol
    }

    pub fn orbit_contractible(&self) -> bool {
        self.winding.iter().all(|&w| w == 0)
    }
}

/// Flux of a circle action versus the Poincaré dual of its orbit class.
///
/// The flow is followed from `p` until it closes up (within `1e-8`); the
/// winding numbers of that orbit give its class.
pub fn orbit_duality_check(
    x: &VectorFieldSym,
    c: &ContactData,
    p: &[f64],
    grid: &QuadratureGrid,
) -> Result<OrbitDuality> {
    let m = c.manifold();
    let orbit = crate::dynamics::closed_orbit(x, p, 1e-3, 100.0, 1e-8)?;
    let winding: Vec<i32> = (0..m.torus_count())
        .map(|i| {
            let turns = orbit.displacement[i] / m.periods()[i];
            turns.round() as i32
        })
        .collect();
    let flux = vector_field_flux(x, c, grid)?;
    let intersections: Vec<i32> = c
        .entry
        .basis
        .iter()
        .map(|a| {
            c.entry
                .circles
                .iter()
                .zip(&winding)
                .map(|(circle, &w)| w * intersection_number(m, circle, a).unwrap_or(0))
                .sum()
        })
        .collect();
    let volume = integrate(&c.mu, &c.entry.fundamental, &grid.adapted_to(&c.mu))?;
    let predicted: Vec<f64> = intersections.iter().map(|&i| volume / orbit.period * i as f64).collect();
    let max_diff = flux.values.iter().zip(&predicted).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
    Ok(OrbitDuality { period: orbit.period, winding, intersections, flux, predicted, max_diff })
}

/// `max |flux(lambda H) - lambda flux(H)|`.
pub fn linearity_check(h: &ScalarField, lambda: f64, c: &ContactData, grid: &QuadratureGrid) -> Result<f64> {
    if !is_basic(h, c) {
        return Err(Error::NotBasic);
    }
    let base = formula_periods(h, c, grid)?;
    let scaled = direct_periods(&h.scale(lambda), c, grid)?;
    Ok(scaled.max_abs_diff(&base.scaled(lambda)))
}

/// `max |flux(H1 + H2) - flux(H1) - flux(H2)|`.
pub fn additivity_check(h1: &ScalarField, h2: &ScalarField, c: &ContactData, grid: &QuadratureGrid) -> Result<f64> {
    let a = formula_periods(h1, c, grid)?;
    let b = formula_periods(h2, c, grid)?;
    let sum = direct_periods(&(h1 + h2), c, grid)?;
    let expected: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
    Ok(sum.values.iter().zip(&expected).fold(0.0f64, |m, (u, v)| m.max((u - v).abs())))
}

/// Direct-path periods for an autonomous basic Hamiltonian.
pub fn direct_periods(h: &ScalarField, c: &ContactData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    vector_field_flux(&contact_vector_field(h, c)?, c, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::build_contact;
    use crate::manifolds::DEFAULT_GRID;
    use std::f64::consts::PI;

    fn norm() -> f64 {
        1.0 / (2.0 * PI).powi(2)
    }

    #[test]
    fn torus3_examples() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let sin = TimeDependentHamiltonian::autonomous(&c, ScalarField::sin_coord(m, 2, 1, norm()).unwrap()).unwrap();
        let r = flux_strict(&sin, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        assert!(r.agree && r.max_diff < 1e-12);
        for (v, e) in r.formula.values.iter().zip([1.0, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let cos = TimeDependentHamiltonian::autonomous(&c, ScalarField::cos_coord(m, 2, 1, norm()).unwrap()).unwrap();
        let r = flux_strict(&cos, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        for (v, e) in r.direct.values.iter().zip([0.0, 1.0, 0.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let zero = flux_strict(&TimeDependentHamiltonian::zero(&c), &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        assert_eq!(zero.formula.max_abs(), 0.0);
        assert_eq!(zero.direct.max_abs(), 0.0);
    }

    #[test]
    fn time_profiles() {
        let c = build_contact("torus3").unwrap();
        let h = ScalarField::sin_coord(c.manifold(), 2, 1, norm()).unwrap();
        let linear = TimeDependentHamiltonian::new(&c, vec![(TimeProfile::Polynomial(vec![0.0, 2.0]), h.clone())]).unwrap();
        let sampled = TimeDependentHamiltonian::new(
            &c,
            vec![(TimeProfile::Sampled(Arc::new(|t: f64| 1.0 + (2.0 * PI * t).sin())), h.clone())],
        )
        .unwrap();
        let a = flux_strict(&linear, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        let b = flux_strict(&sampled, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        assert!(a.agree && b.agree);
        assert!(a.formula.agrees_with(&b.formula, 1e-10));
        assert!((a.formula.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reeb_flux_vanishes() {
        for name in ["torus3", "torus-sphere(2)"] {
            let c = build_contact(name).unwrap();
            assert!(reeb_flux(&c, &DEFAULT_GRID).unwrap().max_abs() < 1e-10);
            let one = TimeDependentHamiltonian::autonomous(&c, ScalarField::constant(c.manifold(), 1.0)).unwrap();
            let r = flux_strict(&one, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
            assert!(r.formula.max_abs() < 1e-10 && r.direct.max_abs() < 1e-10);
        }
    }

    #[test]
    fn exactness_by_periods() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let basis = &c.entry.basis;
        let exact = Form::monomial(ScalarField::sin_coord(m, 2, 1, 1.0).unwrap(), &[0]).unwrap().d();
        assert!(is_exact_by_periods(&exact, basis, &DEFAULT_GRID, FLUX_TOL).unwrap());
        let dxdz = Form::monomial(ScalarField::constant(m, norm()), &[0, 2]).unwrap();
        assert!(!is_exact_by_periods(&dxdz, basis, &DEFAULT_GRID, FLUX_TOL).unwrap());
        let h = ScalarField::cos_coord(m, 2, 2, 1.0).unwrap();
        assert!(is_exact_by_periods(&c.d_alpha_n.mul_scalar(&h), basis, &DEFAULT_GRID, FLUX_TOL).unwrap());
    }

    #[test]
    fn image_rank_examples() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let mut hs = vec![ScalarField::constant(m, 1.0)];
        for k in 1..=3 {
            hs.push(ScalarField::sin_coord(m, 2, k, 1.0).unwrap());
            hs.push(ScalarField::cos_coord(m, 2, k, 1.0).unwrap());
        }
        let r = image_rank(&hs, &c, &DEFAULT_GRID).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.excluded, vec!["T_xy"]);
        assert_eq!(image_rank(&[], &c, &DEFAULT_GRID).unwrap().rank, 0);

        let ts = build_contact("torus-sphere(2)").unwrap();
        let hs: Vec<_> = (0..3).map(|k| dual_hamiltonian(&ts, k).unwrap()).collect();
        assert_eq!(image_rank(&hs, &ts, &DEFAULT_GRID).unwrap().rank, 3);
    }

    #[test]
    fn dual_basis_and_section() {
        let c = build_contact("torus-sphere(2)").unwrap();
        let (mat, dev) = dual_basis_check(&c, &DEFAULT_GRID).unwrap();
        assert!(dev < 1e-10, "{mat}");
        let v = PeriodVector { values: vec![1.0, 2.0, 3.0], ..PeriodVector::zeros(c.entry.labels()) };
        let h = flux_section(&v, &c).unwrap();
        let r = flux_strict(&h, &c, &DEFAULT_GRID, FLUX_TOL).unwrap();
        assert!(r.agree);
        assert!(r.direct.agrees_with(&v, 1e-10));
        let one = build_contact("torus-sphere(1)").unwrap();
        assert!(dual_basis_check(&one, &DEFAULT_GRID).is_err());
    }

    #[test]
    fn mass_flow_torus3() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let h = TimeDependentHamiltonian::autonomous(&c, ScalarField::sin_coord(m, 2, 1, norm()).unwrap()).unwrap();
        let y = mass_flow(&h, &c, 1, 1, &DEFAULT_GRID).unwrap();
        assert!((y.lhs + 1.0).abs() < 1e-12 && (y.rhs + 1.0).abs() < 1e-12);
        let x = mass_flow(&h, &c, 0, 1, &DEFAULT_GRID).unwrap();
        assert!(x.lhs.abs() < 1e-12 && x.rhs.abs() < 1e-12);
        let twice = mass_flow(&h, &c, 1, 2, &DEFAULT_GRID).unwrap();
        assert!((twice.lhs + 2.0).abs() < 1e-12);
        assert!((y.total_volume - (2.0 * PI).powi(3)).abs() < 1e-9);
        assert!(mass_flow(&h, &c, 2, 1, &DEFAULT_GRID).is_ok());
    }

    #[test]
    fn linearity() {
        let c = build_contact("torus3").unwrap();
        let m = c.manifold();
        let h = ScalarField::sin_coord(m, 2, 1, norm()).unwrap();
        assert!(linearity_check(&h, -3.0, &c, &DEFAULT_GRID).unwrap() < 1e-12);
        let p = direct_periods(&h.scale(-3.0), &c, &DEFAULT_GRID).unwrap();
        assert!((p.values[0] + 3.0).abs() < 1e-12);
        assert!(direct_periods(&h.scale(0.0), &c, &DEFAULT_GRID).unwrap().max_abs() == 0.0);
        let s = ScalarField::sin_coord(m, 2, 1, 1.0).unwrap();
        let co = ScalarField::cos_coord(m, 2, 1, 1.0).unwrap();
        assert!(additivity_check(&s, &co, &c, &DEFAULT_GRID).unwrap() < 1e-10);
    }

    #[test]
    fn orbit_duality() {
        let c = build_contact("torus-sphere(2)").unwrap();
        let m = c.manifold();
        let x = contact_vector_field(&ScalarField::coordinate(m, 3).unwrap(), &c).unwrap();
        let p = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let r = orbit_duality_check(&x, &c, &p, &DEFAULT_GRID).unwrap();
        assert_eq!(r.winding, vec![1, 0, 0]);
        assert_eq!(r.intersections, vec![1, 0, 0]);
        assert!(r.agrees(1e-8), "{r:?}");
        assert!(r.flux.values[0].abs() > 1.0);
        let back = orbit_duality_check(&x.scale(-1.0), &c, &p, &DEFAULT_GRID).unwrap();
        assert_eq!(back.winding, vec![-1, 0, 0]);
        assert!(back.flux.agrees_with(&r.flux.scaled(-1.0), 1e-10));

        let t3 = build_contact("torus3").unwrap();
        let dy = VectorFieldSym::coordinate(t3.manifold(), 1).unwrap();
        let r = orbit_duality_check(&dy, &t3, &[0.0; 3], &DEFAULT_GRID).unwrap();
        assert_eq!(r.intersections, vec![-1, 0, 0]);
        assert!(r.agrees(1e-8), "{r:?}");
    }
}

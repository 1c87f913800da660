//! Flat symplectic tori `(T^{2n}, sum_i dx_i ^ dy_i)`: symplectic flux, the
//! map `[beta] -> [beta ^ omega^{n-1}]`, volume flux, and the cup-product
//! pairing on `H^1`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::contact::SYMBOLIC_TOL;
use crate::error::{Error, Result};
use crate::forms::{Form, VectorFieldSym};
use crate::funcalg::ScalarField;
use crate::linalg;
use crate::manifolds::{integrate, periods, registry, ManifoldSpec, PeriodVector, QuadratureGrid, RegistryEntry};

/// A symplectic torus with cached powers of `omega`.
#[derive(Clone, Debug)]
pub struct SymplecticData {
    pub entry: RegistryEntry,
    pub omega: Form,
    /// `omega^{n-1}`.
    pub omega_n1: Form,
    /// `omega^n`, the Liouville volume form.
    pub omega_n: Form,
    pub n: usize,
    /// Constant matrix `W` with `omega = sum_{i<j} W_ij dx_i ^ dx_j`.
    matrix: DMatrix<f64>,
}

impl SymplecticData {
    pub fn manifold(&self) -> &Arc<ManifoldSpec> {
        &self.entry.manifold
    }
}

/// `torus2n(n)` with `omega = sum_i dx_i ^ dy_i`.
pub fn build_symplectic(name: &str) -> Result<SymplecticData> {
    let entry = registry(name)?;
    let m = entry.manifold.clone();
    if !m.name().starts_with("torus2n") {
        return Err(Error::Unsupported(format!("no symplectic form registered on `{}`", m.name())));
    }
    let n = m.dim() / 2;
    let mut omega = Form::zero(&m, 2);
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega = omega.checked_add(&Form::monomial(ScalarField::constant(&m, 1.0), &[2 * i, 2 * i + 1])?)?;
        matrix[(2 * i, 2 * i + 1)] = 1.0;
        matrix[(2 * i + 1, 2 * i)] = -1.0;
    }
    if !omega.d().is_zero(SYMBOLIC_TOL) {
        return Err(Error::Invariant("omega is not closed".into()));
    }
    let omega_n1 = omega.wedge_power(n - 1)?;
    let omega_n = omega_n1.wedge(&omega)?;
    let vol = omega_n.coefficient(&(0..2 * n).collect::<Vec<_>>());
    if vol.constant_value().map(|v| v.norm() < 1e-9).unwrap_or(true) {
        return Err(Error::Invariant("omega^n is degenerate".into()));
    }
    Ok(SymplecticData { entry, omega, omega_n1, omega_n, n, matrix })
}

/// True iff `L_X omega = 0` symbolically.
pub fn is_symplectic_field(x: &VectorFieldSym, s: &SymplecticData) -> bool {
    s.omega.lie_derivative(x).map(|l| l.is_zero(SYMBOLIC_TOL)).unwrap_or(false)
}

/// The field with `iota(X) omega = dF`.
pub fn hamiltonian_vector_field(f: &ScalarField, s: &SymplecticData) -> Result<VectorFieldSym> {
    let m = s.manifold();
    let df = Form::scalar(f.clone()).d();
    // iota(X) omega = sum_j (sum_i X^i W_ij) dx_j, so W^T X = dF
    let inv = s.matrix.transpose().try_inverse().ok_or(Error::NotSymplectic)?;
    let grads: Vec<ScalarField> = (0..m.ambient_dim()).map(|j| df.coefficient(&[j])).collect();
    let comps = (0..m.ambient_dim())
        .map(|i| {
            (0..m.ambient_dim()).fold(ScalarField::zero(m), |acc, j| {
                let w = inv[(i, j)];
                if w == 0.0 {
                    acc
                } else {
                    acc + grads[j].scale(w)
                }
            })
        })
        .collect();
    VectorFieldSym::new(comps)
}

/// Periods of `iota(X) omega` over the coordinate circles.
pub fn symp_flux(x: &VectorFieldSym, s: &SymplecticData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    if !is_symplectic_field(x, s) {
        return Err(Error::NotSymplectic);
    }
    periods(&s.omega.interior(x)?, &s.entry.circles, grid)
}

/// Periods of `beta ^ omega^{n-1}` over the coordinate hypersurfaces.
pub fn wedge_map(beta: &Form, s: &SymplecticData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    if beta.degree() != 1 {
        return Err(Error::DegreeMismatch { form: beta.degree(), cycle: 1 });
    }
    let r = beta.d().residual();
    if r > 1e-9 {
        return Err(Error::NotClosed(r));
    }
    periods(&beta.wedge(&s.omega_n1)?, &s.entry.basis, grid)
}

/// Periods of `iota(X) omega^n` over the coordinate hypersurfaces.
pub fn volume_flux(x: &VectorFieldSym, s: &SymplecticData, grid: &QuadratureGrid) -> Result<PeriodVector> {
    periods(&s.omega_n.interior(x)?, &s.entry.basis, grid)
}

/// Volume flux against `n` times the wedge map applied to the symplectic flux.
#[derive(Clone, Debug)]
pub struct FluxRelation {
    pub volume_flux: PeriodVector,
    pub wedge_of_symplectic_flux: PeriodVector,
    pub factor: f64,
    pub max_diff: f64,
}

pub fn flux_relation_check(x: &VectorFieldSym, s: &SymplecticData, grid: &QuadratureGrid) -> Result<FluxRelation> {
    if !is_symplectic_field(x, s) {
        return Err(Error::NotSymplectic);
    }
    let vol = volume_flux(x, s, grid)?;
    let wedge = wedge_map(&s.omega.interior(x)?, s, grid)?;
    let factor = s.n as f64;
    let max_diff = vol.max_abs_diff(&wedge.scaled(factor));
    Ok(FluxRelation { volume_flux: vol, wedge_of_symplectic_flux: wedge, factor, max_diff })
}

/// Cup-product pairing `int_M dx_i ^ dx_j ^ omega^{n-1}` of the coordinate
/// classes in `H^1`.
#[derive(Clone, Debug)]
pub struct PairingMatrix {
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub rank: usize,
    /// `dx_i ^ dx_j ^ omega^{n-1} + dx_j ^ dx_i ^ omega^{n-1} = 0` symbolically for all pairs.
    pub antisymmetric: bool,
}

pub fn pairing_matrix(s: &SymplecticData, grid: &QuadratureGrid) -> Result<PairingMatrix> {
    let m = s.manifold();
    let k = m.dim();
    let fundamental = &s.entry.fundamental;
    let mut matrix = DMatrix::zeros(k, k);
    let mut antisymmetric = true;
    for i in 0..k {
        for j in 0..k {
            let a = Form::differential(m, i)?.wedge(&Form::differential(m, j)?)?.wedge(&s.omega_n1)?;
            let b = Form::differential(m, j)?.wedge(&Form::differential(m, i)?)?.wedge(&s.omega_n1)?;
            antisymmetric &= a.checked_add(&b)?.is_zero(SYMBOLIC_TOL);
            matrix[(i, j)] = integrate(&a, fundamental, grid)?;
        }
    }
    let (rank, _) = linalg::numerical_rank(&matrix, 1e-10);
    Ok(PairingMatrix { labels: m.coord_names().to_vec(), matrix, rank, antisymmetric })
}

/// Pairing of two closed 1-forms given by their coordinate coefficients.
pub fn pairing(p: &PairingMatrix, a: &[f64], b: &[f64]) -> f64 {
    let va = DVector::from_column_slice(a);
    let vb = DVector::from_column_slice(b);
    (va.transpose() * &p.matrix * vb)[(0, 0)]
}

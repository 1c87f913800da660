//! Fourier-mode description of basic functions on `torus3` and the
//! differentials they can realize at a point.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_1_PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::contact::{reeb_derivative, ContactData};
use crate::error::{Error, Result};
use crate::funcalg::{Complex, ScalarField, TermKey};
use crate::manifolds::ManifoldSpec;

/// Default largest `z`-wavenumber of the generating family.
pub const M_MAX: i32 = 8;
/// Relative singular value threshold for nullspaces and spans.
pub const SPAN_TOL: f64 = 1e-9;

fn require_torus3(m: &ManifoldSpec) -> Result<()> {
    if m.name() != "torus3" {
        return Err(Error::Unsupported(format!("mode analysis needs torus3, got `{}`", m.name())));
    }
    Ok(())
}

/// `H = sum_{j,k} h_{j,k}(z) e^{i(jx + ky)}`: the coefficient functions
/// `h_{j,k}`, read off the normal form.
pub fn fourier_modes(h: &ScalarField) -> Result<BTreeMap<(i32, i32), ScalarField>> {
    let m = h.manifold();
    require_torus3(m)?;
    let mut out: BTreeMap<(i32, i32), ScalarField> = BTreeMap::new();
    for ((modes, _), &c) in h.terms() {
        let (j, k, l) = (modes.0[0], modes.0[1], modes.0[2]);
        let term = ScalarField::fourier(m, vec![0, 0, l], c)?;
        let slot = out.entry((j, k)).or_insert_with(|| ScalarField::zero(m));
        *slot = &*slot + &term;
    }
    Ok(out)
}

/// A mode `(j, k) != (0, 0)` with a point `z` where both `h_{j,k}(z)` and
/// `j cos z - k sin z` are nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeViolation {
    pub mode: (i32, i32),
    pub z: f64,
    pub condition: f64,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeConditionReport {
    pub violations: Vec<ModeViolation>,
    /// Only the mode `(0, 0)` is present.
    pub z_only: bool,
}

impl ModeConditionReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `j cos z = k sin z` on the support of every coefficient `h_{j,k}`.
pub fn basic_mode_condition(h: &ScalarField) -> Result<ModeConditionReport> {
    let modes = fourier_modes(h)?;
    let mut violations = Vec::new();
    let mut z_only = true;
    for (&(j, k), coef) in &modes {
        if (j, k) == (0, 0) || coef.is_zero(1e-12) {
            continue;
        }
        z_only = false;
        // an offset grid avoids the two zeros of j cos z - k sin z
        let n = 64.max(4 * coef.max_modes()[2] as usize + 8);
        let mut best: Option<ModeViolation> = None;
        for i in 0..n {
            let z = TAU * (i as f64 + FRAC_1_PI) / n as f64;
            let condition = j as f64 * z.cos() - k as f64 * z.sin();
            let value = coef.evaluate(&[0.0, 0.0, z])?.norm();
            let score = condition.abs().min(value);
            if score > 1e-9 && best.as_ref().map(|b| score > b.condition.abs().min(b.coefficient)).unwrap_or(true) {
                best = Some(ModeViolation { mode: (j, k), z, condition, coefficient: value });
            }
        }
        violations.extend(best);
    }
    Ok(ModeConditionReport { violations, z_only })
}

/// Real trigonometric monomials `cos`/`sin` of `jx + ky + lz` with
/// `|j|, |k| <= xy` and `|l| <= z`, one per pair `+-(j, k, l)`.
pub fn trig_family(m: &Arc<ManifoldSpec>, xy: i32, z: i32) -> Result<Vec<ScalarField>> {
    require_torus3(m)?;
    let mut out = vec![ScalarField::constant(m, 1.0)];
    for j in -xy..=xy {
        for k in -xy..=xy {
            for l in -z..=z {
                if (j, k, l) <= (0, 0, 0) {
                    continue;
                }
                out.push(ScalarField::cos_mode(m, &[j, k, l], 1.0)?);
                out.push(ScalarField::sin_mode(m, &[j, k, l], 1.0)?);
            }
        }
    }
    Ok(out)
}

/// Products of torus modes `|j_i| <= modes` (as `cos`/`sin`) with sphere
/// monomials of degree `<= degree` in normal form.
pub fn torus_sphere_family(m: &Arc<ManifoldSpec>, modes: i32, degree: u32) -> Result<Vec<ScalarField>> {
    let t = m.torus_count();
    let b = *m.blocks().first().ok_or_else(|| Error::Unsupported("no sphere factor".into()))?;
    let mut monomials: Vec<Vec<u32>> = vec![vec![0; b.len()]];
    for _ in 0..degree {
        let mut next = monomials.clone();
        for e in &monomials {
            for i in 0..b.len() {
                let mut f = e.clone();
                f[i] += 1;
                next.push(f);
            }
        }
        next.sort();
        next.dedup();
        monomials = next;
    }
    // monomials with y_last^2 or higher reduce to the others
    let sphere = monomials
        .into_iter()
        .filter(|e| e[b.len() - 1] < 2)
        .map(|e| ScalarField::monomial(m, e, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let mut torus = vec![ScalarField::constant(m, 1.0)];
    let mut mode = vec![-modes; t];
    loop {
        if mode.as_slice() > vec![0; t].as_slice() {
            torus.push(ScalarField::cos_mode(m, &mode, 1.0)?);
            torus.push(ScalarField::sin_mode(m, &mode, 1.0)?);
        }
        let mut i = t;
        loop {
            if i == 0 {
                let mut out = Vec::new();
                for a in &torus {
                    for s in &sphere {
                        out.push(a * s);
                    }
                }
                return Ok(out);
            }
            i -= 1;
            mode[i] += 1;
            if mode[i] <= modes {
                break;
            }
            mode[i] = -modes;
        }
    }
}

/// Basic functions inside the span of a family.
#[derive(Clone, Debug)]
pub struct BasicSubspace {
    pub family_size: usize,
    pub dimension: usize,
    /// Basis of the subspace as functions.
    pub basis: Vec<ScalarField>,
}

/// Nullspace of `H -> R.H` restricted to `span(family)`.
pub fn basic_subspace(family: &[ScalarField], c: &ContactData) -> Result<BasicSubspace> {
    let m = c.manifold();
    let images = family.iter().map(|f| reeb_derivative(f, c)).collect::<Result<Vec<_>>>()?;
    let mut index: HashMap<TermKey, usize> = HashMap::new();
    for img in &images {
        for (k, _) in img.terms() {
            let next = index.len();
            index.entry(k.clone()).or_insert(next);
        }
    }
    let cols = family.len();
    let rows = (2 * index.len()).max(cols);
    let mut a = DMatrix::zeros(rows, cols);
    for (j, img) in images.iter().enumerate() {
        for (k, v) in img.terms() {
            let r = index[k];
            a[(2 * r, j)] = v.re;
            a[(2 * r + 1, j)] = v.im;
        }
    }
    let basis_vectors = nullspace(&a)?;
    let basis = basis_vectors
        .iter()
        .map(|v| {
            family.iter().zip(v.iter()).fold(ScalarField::zero(m), |acc, (f, &w)| {
                if w.abs() < 1e-14 {
                    acc
                } else {
                    acc + f.scale(w)
                }
            })
        })
        .collect::<Vec<_>>();
    Ok(BasicSubspace { family_size: cols, dimension: basis.len(), basis })
}

fn nullspace(a: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok(Vec::new());
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::InvalidArgument("SVD failed".into()))?;
    let largest = svd.singular_values.max();
    let tol = SPAN_TOL * largest.max(1.0);
    Ok((0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| v_t.row(i).transpose())
        .collect())
}

/// Outcome for one requested cotangent vector.
#[derive(Clone, Debug)]
pub struct TargetResult {
    pub target: Vec<f64>,
    pub attainable: bool,
    pub residual: f64,
    /// A basic function whose differential at the point equals the target.
    pub witness: Option<ScalarField>,
}

#[derive(Clone, Debug)]
pub struct AttainableDifferentials {
    pub point: Vec<f64>,
    pub dimension: usize,
    /// Orthonormal basis of `span { dH|_p : H basic }`.
    pub span: Vec<Vec<f64>>,
    pub targets: Vec<TargetResult>,
    pub family_dimension: usize,
}

/// Differentials at `p` of basic functions from the span of the trig family
/// with `|j|, |k| <= 1`, `|l| <= m_max`; each target is solved for in least
/// squares and accepted when the residual is below `1e-9 (1 + |target|)`.
pub fn attainable_differentials(
    c: &ContactData,
    p: &[f64],
    targets: &[Vec<f64>],
    m_max: i32,
) -> Result<AttainableDifferentials> {
    let m = c.manifold();
    require_torus3(m)?;
    m.check_point(p)?;
    let family = trig_family(m, 1, m_max)?;
    let basic = basic_subspace(&family, c)?;
    let grads: Vec<Vec<f64>> = basic
        .basis
        .iter()
        .map(|h| (0..3).map(|i| h.partial(i).map(|d| d.eval_re(p))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let k = grads.len();
    let g = DMatrix::from_fn(3, k.max(1), |i, j| if j < k { grads[j][i] } else { 0.0 });
    let svd = g.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let u = svd.u.as_ref().expect("u requested");
    let span: Vec<Vec<f64>> = (0..svd.singular_values.len())
        .filter(|&i| largest > 0.0 && svd.singular_values[i] > SPAN_TOL * largest)
        .map(|i| u.column(i).iter().copied().collect())
        .collect();
    let mut results = Vec::new();
    for t in targets {
        if t.len() != 3 {
            return Err(Error::PointDimension { expected: 3, got: t.len() });
        }
        let b = DVector::from_column_slice(t);
        let coef = svd.solve(&b, SPAN_TOL * largest).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let residual = (&g * &coef - &b).norm();
        let scale = 1.0 + b.norm();
        let attainable = residual <= 1e-9 * scale;
        let witness = attainable.then(|| {
            basic.basis.iter().zip(coef.iter()).fold(ScalarField::zero(m), |acc, (h, &w)| acc + h.scale(w))
        });
        results.push(TargetResult { target: t.clone(), attainable, residual, witness });
    }
    Ok(AttainableDifferentials {
        point: p.to_vec(),
        dimension: span.len(),
        span,
        targets: results,
        family_dimension: basic.dimension,
    })
}

/// Dimension of the basic trig polynomials of degree `<= d` on `torus3`
/// (all three wavenumbers bounded by `d`).
pub fn basic_dimension_torus3(c: &ContactData, d: i32) -> Result<usize> {
    Ok(basic_subspace(&trig_family(c.manifold(), d, d)?, c)?.dimension)
}

/// Complex scalar helper for tests and reports.
pub fn mode_value(h: &ScalarField, z: f64) -> Result<Complex> {
    h.evaluate(&[0.0, 0.0, z])
}

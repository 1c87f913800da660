use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;

use contact_flux::contact::{build_contact, contact_vector_field, is_strictly_contact_field, ContactData};
use contact_flux::dynamics::flow_hamiltonian;
use contact_flux::flux::{direct_periods, linearity_check};
use contact_flux::manifolds::{integrate, periods, Factor};
use contact_flux::symplectic::{build_symplectic, flux_relation_check, hamiltonian_vector_field};
use contact_flux::{registry, Form, ManifoldSpec, ScalarField, VectorFieldSym, DEFAULT_GRID};

fn torus3() -> Arc<ManifoldSpec> {
    registry("torus3").unwrap().manifold
}

fn sphere2() -> Arc<ManifoldSpec> {
    Arc::new(ManifoldSpec::new("s2", vec![Factor::Sphere { dim: 2 }], vec![]).unwrap())
}

fn torus_sphere1() -> Arc<ManifoldSpec> {
    registry("torus-sphere(1)").unwrap().manifold
}

/// Trigonometric polynomial `sum c_i cos/sin(modes_i . x)` from raw coefficients.
fn trig(m: &Arc<ManifoldSpec>, coefs: &[(i32, i32, i32, f64, bool)]) -> ScalarField {
    coefs.iter().fold(ScalarField::zero(m), |acc, &(a, b, c, w, s)| {
        let modes: Vec<i32> = [a, b, c][..m.torus_count()].to_vec();
        let f = if s { ScalarField::sin_mode(m, &modes, w) } else { ScalarField::cos_mode(m, &modes, w) };
        acc + f.unwrap()
    })
}

/// Polynomial in the coordinates of a manifold with only sphere factors
/// or a torus-sphere mix: each term is `w * t-mode * y^e`.
fn mixed(m: &Arc<ManifoldSpec>, coefs: &[(i32, u32, u32, f64)]) -> ScalarField {
    let t = m.torus_count();
    let a = m.ambient_dim();
    coefs.iter().fold(ScalarField::zero(m), |acc, &(k, e0, e1, w)| {
        let mut exps = vec![0u32; a - t];
        exps[0] = e0;
        exps[1] = e1;
        let mut f = ScalarField::monomial(m, exps, w).unwrap();
        if t > 0 {
            let modes: Vec<i32> = (0..t).map(|i| if i == 0 { k } else { 0 }).collect();
            f = &f * &ScalarField::cos_mode(m, &modes, 1.0).unwrap();
        }
        acc + f
    })
}

fn trig_terms() -> impl Strategy<Value = Vec<(i32, i32, i32, f64, bool)>> {
    prop::collection::vec((-2..=2i32, -2..=2i32, -2..=2i32, -1.0..1.0f64, any::<bool>()), 1..5)
}

fn poly_terms() -> impl Strategy<Value = Vec<(i32, u32, u32, f64)>> {
    prop::collection::vec((-2..=2i32, 0..3u32, 0..3u32, -1.0..1.0f64), 1..5)
}

fn unit3() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::PI, 0.0..TAU).prop_map(|(th, ph)| vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])
}

fn basic_torus3(c: &ContactData, coefs: &[(i32, f64, bool)]) -> ScalarField {
    let m = c.manifold();
    coefs.iter().fold(ScalarField::constant(m, 0.3), |acc, &(l, w, s)| {
        acc + if s { ScalarField::sin_coord(m, 2, l, w).unwrap() } else { ScalarField::cos_coord(m, 2, l, w).unwrap() }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normal_form_preserves_values_on_sphere(a in poly_terms(), b in poly_terms(), p in unit3()) {
        let m = sphere2();
        let f = mixed(&m, &a);
        let g = mixed(&m, &b);
        let fg = &f * &g;
        let direct = f.evaluate_real(&p).unwrap() * g.evaluate_real(&p).unwrap();
        prop_assert!((fg.evaluate_real(&p).unwrap() - direct).abs() < 1e-10);
        prop_assert!(fg.terms().all(|(k, _)| k.1.0.last().copied().unwrap_or(0) < 2));
    }

    #[test]
    fn leibniz(a in trig_terms(), b in trig_terms()) {
        let m = torus3();
        let f = trig(&m, &a);
        let g = trig(&m, &b);
        let lhs = Form::scalar(&f * &g).d();
        let rhs = Form::scalar(g.clone()).d().mul_scalar(&f).checked_add(&Form::scalar(f).d().mul_scalar(&g)).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-10));
    }

    #[test]
    fn d_squared_vanishes(a in poly_terms(), b in poly_terms(), i in 0..4usize) {
        let m = torus_sphere1();
        let beta = Form::differential(&m, i).unwrap().mul_scalar(&mixed(&m, &a))
            .checked_add(&Form::differential(&m, 3 - i).unwrap().mul_scalar(&mixed(&m, &b))).unwrap();
        prop_assert!(beta.d().d().residual() < 1e-10);
        prop_assert!(Form::scalar(mixed(&m, &a)).d().d().residual() < 1e-10);
    }

    #[test]
    fn interior_twice_vanishes(a in trig_terms(), b in trig_terms(), c in trig_terms()) {
        let m = torus3();
        let beta = Form::monomial(trig(&m, &a), &[0, 1]).unwrap()
            .checked_add(&Form::monomial(trig(&m, &b), &[1, 2]).unwrap()).unwrap();
        let x = VectorFieldSym::new(vec![trig(&m, &c), trig(&m, &a), ScalarField::constant(&m, 1.0)]).unwrap();
        prop_assert!(beta.interior(&x).unwrap().interior(&x).unwrap().residual() < 1e-10);
    }

    #[test]
    fn radial_forms_restrict_to_zero(a in poly_terms(), b in poly_terms(), p in unit3()) {
        let m = sphere2();
        let f = mixed(&m, &a);
        let radial = (0..3).fold(Form::zero(&m, 1), |acc, i| {
            let yi = ScalarField::coordinate(&m, i).unwrap();
            acc.checked_add(&Form::differential(&m, i).unwrap().mul_scalar(&yi)).unwrap()
        });
        let beta = Form::differential(&m, 0).unwrap().mul_scalar(&mixed(&m, &b));
        let shifted = beta.checked_add(&radial.mul_scalar(&f)).unwrap();
        prop_assert!(radial.mul_scalar(&f).is_zero(1e-10));
        let frame = m.tangent_frame(&p);
        for v in &frame {
            let lhs = shifted.eval_form(&p, std::slice::from_ref(v)).unwrap();
            let rhs = beta.eval_form(&p, std::slice::from_ref(v)).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn stokes_on_closed_cycles(a in trig_terms(), b in trig_terms()) {
        let e = registry("torus3").unwrap();
        let m = e.manifold.clone();
        let beta = Form::differential(&m, 0).unwrap().mul_scalar(&trig(&m, &a))
            .checked_add(&Form::differential(&m, 2).unwrap().mul_scalar(&trig(&m, &b))).unwrap();
        let db = beta.d();
        for cycle in &e.basis {
            prop_assert!(integrate(&db, cycle, &DEFAULT_GRID).unwrap().abs() < 1e-10);
        }
        prop_assert!(integrate(&Form::scalar(trig(&m, &a)).d(), &e.circles[1], &DEFAULT_GRID).unwrap().abs() < 1e-10);
    }

    #[test]
    fn periods_independent_of_grid(h in poly_terms()) {
        let c = build_contact("torus-sphere(2)").unwrap();
        let m = c.manifold();
        let f = h.iter().fold(ScalarField::constant(m, 1.0), |acc, &(_, e0, e1, w)| {
            let mut exps = vec![0u32; 3];
            exps[0] = e0;
            exps[1] = e1;
            acc + ScalarField::monomial(m, exps, w).unwrap()
        });
        let form = c.d_alpha_n.mul_scalar(&f).scale(3.0);
        let coarse = periods(&form, &c.entry.basis, &DEFAULT_GRID).unwrap();
        let fine = periods(&form, &c.entry.basis, &DEFAULT_GRID.doubled()).unwrap();
        prop_assert!(coarse.max_abs_diff(&fine) < 1e-10);
    }

    #[test]
    fn contact_fields_are_strict(coefs in prop::collection::vec((1..=3i32, -1.0..1.0f64, any::<bool>()), 1..4)) {
        let c = build_contact("torus3").unwrap();
        let h = basic_torus3(&c, &coefs);
        let x = contact_vector_field(&h, &c).unwrap();
        prop_assert!(is_strictly_contact_field(&x, &c).unwrap().is_strict());
        prop_assert!(c.alpha.interior(&x).unwrap().as_scalar().unwrap().approx_eq(&h, 1e-10));
    }

    #[test]
    fn flux_is_homogeneous(coefs in prop::collection::vec((1..=3i32, -1.0..1.0f64, any::<bool>()), 1..4), lambda in -4.0..4.0f64) {
        let c = build_contact("torus3").unwrap();
        let h = basic_torus3(&c, &coefs);
        prop_assert!(linearity_check(&h, lambda, &c, &DEFAULT_GRID).unwrap() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn symplectic_flux_relation(terms in prop::collection::vec((-2..=2i32, -2..=2i32, -2..=2i32, -2..=2i32, -1.0..1.0f64), 1..4),
                                shift in prop::collection::vec(-1.0..1.0f64, 4)) {
        let s = build_symplectic("torus4").unwrap();
        let m = s.manifold();
        let f = terms.iter().fold(ScalarField::zero(m), |acc, &(a, b, c, d, w)| {
            acc + ScalarField::sin_mode(m, &[a, b, c, d], w).unwrap()
        });
        let x = hamiltonian_vector_field(&f, &s).unwrap()
            .checked_add(&VectorFieldSym::new(shift.iter().map(|&v| ScalarField::constant(m, v)).collect()).unwrap())
            .unwrap();
        prop_assert!(flux_relation_check(&x, &s, &DEFAULT_GRID).unwrap().max_diff < 1e-8);
    }

    #[test]
    fn flow_time_rescaling(coefs in prop::collection::vec((1..=2i32, -1.0..1.0f64, any::<bool>()), 1..3),
                           lambda in 0.25..2.0f64, z in 0.0..TAU) {
        let c = build_contact("torus3").unwrap();
        let h = basic_torus3(&c, &coefs);
        let p = [0.4, 1.1, z];
        let a = flow_hamiltonian(&h.scale(lambda), &c, 0.5, &p, 1e-3).unwrap();
        let b = flow_hamiltonian(&h, &c, 0.5 * lambda, &p, 1e-3).unwrap();
        let d = a.end().iter().zip(b.end()).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        prop_assert!(d < 1e-8, "endpoint difference {d}");
    }
}

#[test]
fn proof_identity_with_wrong_sign_is_detected() {
    let c = build_contact("torus-sphere(2)").unwrap();
    let h = ScalarField::coordinate(c.manifold(), 3).unwrap();
    let x = contact_vector_field(&h, &c).unwrap();
    let dh = Form::scalar(h.clone()).d();
    let dan1 = c.d_alpha.wedge_power(c.n - 1).unwrap();
    let right = c.d_alpha.mul_scalar(&h).checked_add(&c.alpha.wedge(&dh).unwrap().scale(2.0)).unwrap().wedge(&dan1).unwrap();
    let wrong = c.d_alpha.mul_scalar(&h).checked_add(&c.alpha.wedge(&dh).unwrap().scale(-2.0)).unwrap().wedge(&dan1).unwrap();
    let i_mu = c.mu.interior(&x).unwrap();
    assert!(i_mu.approx_eq(&right, 1e-10));
    assert!(!i_mu.approx_eq(&wrong, 1e-3));
}

#[test]
fn zero_hamiltonian_has_zero_flux() {
    let c = build_contact("torus-sphere(3)").unwrap();
    let p = direct_periods(&ScalarField::zero(c.manifold()), &c, &DEFAULT_GRID).unwrap();
    assert_eq!(p.max_abs(), 0.0);
}

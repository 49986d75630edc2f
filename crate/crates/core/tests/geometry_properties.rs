mod common;

use common::{point, random};
use ggv_core::expr::{parse, Expression};
use ggv_core::geometry::*;
use ggv_core::harness::fixture;
use ggv_core::linalg::Mat;
use proptest::prelude::*;

const M: usize = 3;

/// `[X, Y]` as a field, built from symbolic partial derivatives.
fn symbolic_bracket(x: &ComponentVector, y: &ComponentVector) -> ComponentVector {
    let m = x.dim();
    ComponentVector::new(
        (0..m)
            .map(|i| {
                let mut e = Expression::zero();
                for l in 0..m {
                    e = e + x.components[l].clone() * differentiate(&y.components[i], l + 1)
                        - y.components[l].clone() * differentiate(&x.components[i], l + 1);
                }
                e
            })
            .collect(),
    )
}

fn antisymmetry_defect_2(a: &Mat<f64>) -> f64 {
    a.add(&a.transpose()).max_abs()
}

fn antisymmetry_defect_3(f: &Form3) -> f64 {
    let m = f.dim();
    let mut d: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let v = f.get(i, j, k);
                for w in [f.get(j, i, k), f.get(i, k, j), f.get(k, j, i)] {
                    d = d.max((v + w).abs());
                }
                d = d.max((v - f.get(j, k, i)).abs());
            }
        }
    }
    d
}

fn relative(a: &Form3, b: &Form3) -> f64 {
    a.sub(b).max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lie_bracket_satisfies_jacobi(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let (x, y, z) = (random::vector(&mut rng, M), random::vector(&mut rng, M), random::vector(&mut rng, M));
        let mut total = vec![0.0; M];
        for (a, b, c) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
            let bc = symbolic_bracket(b, c);
            let term = lie_bracket(&a.jets(&p).unwrap(), &bc.jets(&p).unwrap());
            for i in 0..M {
                total[i] += term[i];
            }
        }
        prop_assert!(common::max_abs(&total) <= 1e-10, "{total:?}");
    }

    #[test]
    fn symbolic_and_jet_brackets_agree(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let (x, y) = (random::vector(&mut rng, M), random::vector(&mut rng, M));
        let direct = lie_bracket(&x.jets(&p).unwrap(), &y.jets(&p).unwrap());
        let symbolic = symbolic_bracket(&x, &y).values(&p).unwrap();
        prop_assert!(common::max_diff(&direct, &symbolic) <= 1e-12);
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let f = random_polynomial(&mut rng, M) * random_polynomial(&mut rng, M);
        let df = ComponentVector::gradient_of(&f, M);
        prop_assert!(exterior_derivative_1(&df.jets(&p).unwrap()).max_abs() <= 1e-10);

        let alpha = random::vector(&mut rng, M);
        let d_alpha = Antisymmetric::from_upper(M, |i, j| {
            differentiate(&alpha.components[j], i + 1) - differentiate(&alpha.components[i], j + 1)
        });
        prop_assert!(exterior_derivative_2(&d_alpha.jets(&p).unwrap()).max_abs() <= 1e-10);
    }

    #[test]
    fn produced_forms_are_antisymmetric(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let alpha = random::vector(&mut rng, M).jets(&p).unwrap();
        let sigma = random::antisymmetric(&mut rng, M);
        let pi = random::antisymmetric(&mut rng, M).jets(&p).unwrap();
        prop_assert!(antisymmetry_defect_2(&exterior_derivative_1(&alpha)) <= 1e-12);
        prop_assert!(antisymmetry_defect_3(&exterior_derivative_2(&sigma.jets(&p).unwrap())) <= 1e-12);
        prop_assert!(antisymmetry_defect_3(&schouten_square(&pi)) <= 1e-12);
        let w = wedge_1_2(&values(&alpha), &sigma.eval(&p).unwrap());
        prop_assert!(antisymmetry_defect_3(&w) <= 1e-12);
        let a = values(&alpha);
        let b = random::vector(&mut rng, M).values(&p).unwrap();
        prop_assert!(antisymmetry_defect_2(&wedge_1_1(&a, &b)) <= 1e-12);
    }

    /// `[f pi, f pi] = f^2 [pi, pi] + 2 f (sharp_pi df) ^ pi`.
    #[test]
    fn schouten_rescaling_identity(seed in any::<u64>(), p in point(4, -1.0, 1.0)) {
        let m = 4;
        let mut rng = random::rng(seed);
        let pi = random::antisymmetric(&mut rng, m);
        let f = Expression::exp(random_polynomial(&mut rng, m));
        let fj = f.eval_jet(&p).unwrap();
        let piv = pi.eval(&p).unwrap();
        let lhs = schouten_square(&pi.scaled(&f).jets(&p).unwrap());
        let rhs = schouten_square(&pi.jets(&p).unwrap())
            .scale(fj.value * fj.value)
            .add(&wedge_1_2(&sharp_pi(&piv, &fj.grad), &piv).scale(2.0 * fj.value));
        prop_assert!(relative(&lhs, &rhs) <= 1e-9, "{}", relative(&lhs, &rhs));
    }

    #[test]
    fn interior_product_is_antisymmetric(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let phi = exterior_derivative_2(&random::antisymmetric(&mut rng, M).jets(&p).unwrap());
        let x = random::vector(&mut rng, M).values(&p).unwrap();
        let y = random::vector(&mut rng, M).values(&p).unwrap();
        let xy = interior_xy(&phi, &x, &y);
        let yx = interior_xy(&phi, &y, &x);
        prop_assert!(common::max_abs(&interior_xy(&phi, &x, &x)) <= 1e-12);
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| (a + b).abs() <= 1e-12));
    }

    #[test]
    fn concomitant_and_nijenhuis_vanish_for_constant_data(seed in any::<u64>(), p in point(M, -1.0, 1.0)) {
        let mut rng = random::rng(seed);
        let constant = |e: Expression| Expression::constant(e.eval_f64(&p).unwrap());
        let a = Endomorphism::new(random::endomorphism(&mut rng, M).matrix().map(|e| constant(e.clone())));
        let pi = Antisymmetric::from_matrix_upper(&random::antisymmetric(&mut rng, M).matrix().map(|e| constant(e.clone())));
        let alpha = constant_jets(&random::vector(&mut rng, M).values(&p).unwrap(), M);
        let x = constant_jets(&random::vector(&mut rng, M).values(&p).unwrap(), M);
        let y = constant_jets(&random::vector(&mut rng, M).values(&p).unwrap(), M);
        let (aj, pj) = (a.jets(&p).unwrap(), pi.jets(&p).unwrap());
        prop_assert!(common::max_abs(&nijenhuis_endo(&aj, &x, &y)) == 0.0);
        prop_assert!(common::max_abs(&schouten_concomitant(&pj, &aj, &alpha, &x)) == 0.0);
        prop_assert!(schouten_square(&pj).max_abs() == 0.0);
    }
}

#[test]
fn musical_maps_invert_the_hitchin_symplectic_form() {
    let s = fixture("ex31").unwrap().structure;
    let phi = s.phi.unwrap();
    for p in [[1.0, 0.0, 0.0, 0.0], [0.3, -0.9, 0.4, 1.2]] {
        let pi = phi.pi.eval(&p).unwrap();
        let omega = pi.clone();
        for i in 0..4 {
            let e: Vec<f64> = (0..4).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
            let back = sharp_pi(&pi, &flat_sigma(&omega, &e));
            let want: Vec<f64> = e.iter().map(|v| -v).collect();
            assert!(common::max_diff(&back, &want) <= 1e-12);
        }
    }
}

#[test]
fn symplectic_bivector_is_poisson_and_rescaled_one_is_conformally_poisson() {
    let s = fixture("ex31").unwrap().structure;
    let pi = s.phi.unwrap().pi;
    let rescaled = pi.scaled(&parse("norm2", 4).unwrap());
    let lee = ComponentVector::new(
        (1..=4)
            .map(|i| parse(&format!("-2*x{i}/norm2"), 4).unwrap())
            .collect(),
    );
    for p in [
        [1.0, 0.0, 0.0, 0.0],
        [0.3, -0.9, 0.4, 1.2],
        [-1.1, 0.2, 0.7, -0.5],
    ] {
        assert_eq!(schouten_square(&pi.jets(&p).unwrap()).max_abs(), 0.0);
        let rj = rescaled.jets(&p).unwrap();
        let rv = mat_values(&rj);
        let lhs = schouten_square(&rj);
        let correction = wedge_1_2(&sharp_pi(&rv, &lee.values(&p).unwrap()), &rv).scale(2.0);
        assert!(lhs.max_abs() > 1e-2);
        assert!(relative(&lhs.add(&correction), &Form3::zeros(4)) <= 1e-12);
    }
}

#[test]
fn radial_lee_form_is_closed_and_hitchin_associated_form_is_closed() {
    let lee = ComponentVector::new(
        (1..=4)
            .map(|i| parse(&format!("-2*x{i}/norm2"), 4).unwrap())
            .collect(),
    );
    let s = fixture("ex31").unwrap().structure;
    let phi = s.phi.unwrap();
    for p in [[1.0, 0.0, 0.0, 0.0], [0.3, -0.9, 0.4, 1.2]] {
        assert!(exterior_derivative_1(&lee.jets(&p).unwrap()).max_abs() <= 1e-15);
        let pj = phi.jets(&p).unwrap();
        let omega_a = sigma_assoc(&pj.pi, &pj.a);
        assert_eq!(exterior_derivative_2(&omega_a).max_abs(), 0.0);
    }
}

#[test]
fn wedge_of_basis_elements() {
    let mut s = Mat::zeros(3, 3, &0.0);
    s[(1, 2)] = 1.0;
    s[(2, 1)] = -1.0;
    let w = wedge_1_2(&[1.0, 0.0, 0.0], &s);
    assert_eq!(w.get(0, 1, 2), 1.0);
    assert_eq!(
        w.contract(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]),
        1.0
    );
}

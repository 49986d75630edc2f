mod common;

use common::random;
use ggv_core::bigtangent::PhiMatrix;
use ggv_core::check::CheckInput;
use ggv_core::expr::{parse, Expression};
use ggv_core::gcs::*;
use ggv_core::geometry::{random_polynomial, Antisymmetric, Chart, ComponentVector, Endomorphism};
use ggv_core::harness::fixtures::split_complex;
use ggv_core::harness::{fixture, fixtures, sample_points};
use proptest::prelude::*;

fn hitchin() -> GcsData {
    fixture("ex31").unwrap().structure.gcs().unwrap()
}

fn points(chart: &Chart, n: usize) -> Vec<Vec<f64>> {
    sample_points(chart, n, 0x5EED_C0DE).unwrap()
}

fn norm2_log() -> Expression {
    parse("ln(norm2)", 4).unwrap()
}

fn complex_structure() -> GcsData {
    GcsData {
        chart: Chart::cube(4, -1.0, 1.0).unwrap(),
        phi: PhiMatrix {
            a: split_complex(4),
            pi: Antisymmetric::zero(4),
            sigma: Antisymmetric::zero(4),
        },
    }
}

#[test]
fn algebraic_examples() {
    let s = hitchin();
    let pts = points(&s.chart, 16);
    let input = CheckInput::new(&pts, 1, 1e-8);
    assert!(check_algebraic(&s, &input).unwrap().max_residual() <= 1e-10);

    let c = complex_structure();
    assert_eq!(check_algebraic(&c, &input).unwrap().max_residual(), 0.0);

    let mut zero = complex_structure();
    zero.phi.a = Endomorphism::zero(4);
    let r = check_algebraic(&zero, &input).unwrap();
    assert_eq!(r.residual("alg.square"), 1.0);
    assert!(!r.verdict.is_pass());
}

#[test]
fn integrability_examples() {
    let s = hitchin();
    let pts = points(&s.chart, 16);
    let input = CheckInput::new(&pts, 1, 1e-8);
    assert!(check_integrability(&s, &input).unwrap().max_residual() <= 1e-9);
    assert!(
        check_integrability(&complex_structure(), &input)
            .unwrap()
            .max_residual()
            <= 1e-14
    );

    let rescaled = transform_conformal(&s, &norm2_log());
    let r = check_integrability(&rescaled, &input).unwrap();
    assert!(r.residual("poisson") > 1e-3, "{}", r.residual("poisson"));
}

#[test]
fn conformal_integrability_examples() {
    let rescaled = transform_conformal(&hitchin(), &norm2_log());
    let pts = points(&rescaled.chart, 16);
    let input = CheckInput::new(&pts, 1, 1e-8);
    let lee = LeeForm::exact(&norm2_log(), 4).negated();
    let displayed = LeeForm::new(ComponentVector::new(
        (1..=4)
            .map(|i| parse(&format!("-2*x{i}/norm2"), 4).unwrap())
            .collect(),
    ));
    for p in &pts {
        assert!(
            common::max_diff(
                &lee.form.values(p).unwrap(),
                &displayed.form.values(p).unwrap()
            ) < 1e-14
        );
    }
    assert!(
        check_conformal_integrability(&rescaled, &displayed, &input)
            .unwrap()
            .max_residual()
            <= 1e-8
    );

    let wrong = check_conformal_integrability(&rescaled, &displayed.negated(), &input).unwrap();
    assert!(wrong.residual("conf.poisson") > 1e-3);
}

#[test]
fn zero_lee_form_reproduces_integrability_residuals() {
    for s in [hitchin(), complex_structure()] {
        let pts = points(&s.chart, 8);
        let input = CheckInput::new(&pts, 3, 1e-8);
        let a = check_integrability(&s, &input).unwrap();
        let b = check_conformal_integrability(&s, &LeeForm::zero(4), &input).unwrap();
        let ra: Vec<f64> = a.conditions.iter().map(|c| c.max_residual).collect();
        let rb: Vec<f64> = b.conditions.iter().map(|c| c.max_residual).collect();
        assert_eq!(ra, rb);
    }
}

#[test]
fn intermediate_identity_agrees_with_the_conformal_condition() {
    let rescaled = transform_conformal(&hitchin(), &norm2_log());
    let pts = points(&rescaled.chart, 16);
    let input = CheckInput::new(&pts, 1, 1e-8);
    let tau = -norm2_log();
    let cross = check_ptiii_crosscheck(&rescaled, &tau, &input)
        .unwrap()
        .residual("ptiii");
    let lee = LeeForm::exact(&tau, 4);
    let conf = check_conformal_integrability(&rescaled, &lee, &input)
        .unwrap()
        .residual("conf.nijenhuis_a");
    assert!(cross <= 1e-8);
    assert!((cross - conf).abs() <= 1e-8);

    let s = hitchin();
    let constant = check_ptiii_crosscheck(&s, &Expression::constant(0.7), &input).unwrap();
    let plain = check_integrability(&s, &input).unwrap();
    assert!(constant.residual("ptiii") <= 1e-9 && plain.residual("nijenhuis_a") <= 1e-9);
}

#[test]
fn transform_examples() {
    let s = hitchin();
    let p = [0.3, -0.9, 0.4, 1.2];
    let n2: f64 = p.iter().map(|x| x * x).sum();
    let t = transform_conformal(&s, &norm2_log()).phi.eval(&p).unwrap();
    let v = s.phi.eval(&p).unwrap();
    assert_eq!(t.a, v.a);
    assert!(t.pi.sub(&v.pi.scale(n2)).max_abs() < 1e-14);
    assert!(t.sigma.sub(&v.sigma.scale(1.0 / n2)).max_abs() < 1e-14);

    let half = transform_conformal(&s, &Expression::constant(2f64.ln()))
        .phi
        .eval(&p)
        .unwrap();
    assert!(half.pi.sub(&v.pi.scale(2.0)).max_abs() < 1e-15);
    assert!(half.sigma.sub(&v.sigma.scale(0.5)).max_abs() < 1e-15);
    let same = transform_conformal(&s, &Expression::zero());
    assert_eq!(
        triple_values(&same, &p).unwrap(),
        triple_values(&s, &p).unwrap()
    );
}

#[test]
fn lee_closedness_examples() {
    let pts = points(&Chart::annulus(4, 0.5, 2.0).unwrap(), 16);
    let input = CheckInput::new(&pts, 1, 1e-8);
    let radial = LeeForm::exact(&norm2_log(), 4).negated();
    assert!(check_lee_closed(&radial, &input).unwrap().max_residual() <= 1e-10);
    let mut form = ComponentVector::zero(4);
    form.components[0] = Expression::Coord(2);
    assert_eq!(
        check_lee_closed(&LeeForm::new(form), &input)
            .unwrap()
            .max_residual(),
        1.0
    );
}

#[test]
fn rigidity_hypothesis_examples() {
    let s = hitchin();
    let pts = points(&s.chart, 16);
    let r = check_rigidity_hypotheses(&s, &pts, 1e-8);
    assert_eq!(r.nondegenerate_pi.outcome, Outcome::Holds);
    assert!(r.any_holds());

    let c = complex_structure();
    let r = check_rigidity_hypotheses(&c, &pts, 1e-8);
    assert_eq!(r.nondegenerate_pi.outcome, Outcome::Fails);
    assert!(r.nondegenerate_pi.witness.is_some());
    assert_eq!(r.no_real_spectrum.outcome, Outcome::Fails);
}

#[test]
fn torsion_of_the_generalized_structure_matches_the_classical_conditions() {
    for f in fixtures() {
        let Some(g) = f.structure.gcs() else { continue };
        let pts = points(&g.chart, 12);
        let input = CheckInput::new(&pts, 5, 1e-8);
        let classical = check_integrability(&g, &input).unwrap().verdict;
        let torsion = check_nijenhuis_phi(&g, &input).unwrap().verdict;
        assert_eq!(classical, torsion, "{}", f.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transform_round_trip(seed in any::<u64>()) {
        let s = hitchin();
        let mut rng = random::rng(seed);
        let tau = random_polynomial(&mut rng, 4);
        let back = transform_conformal(&transform_conformal(&s, &tau), &-tau);
        for p in points(&s.chart, 8) {
            let a = triple_values(&s, &p).unwrap();
            let b = triple_values(&back, &p).unwrap();
            prop_assert!(common::max_diff(&a, &b) <= 1e-12);
        }
    }

    #[test]
    fn transformed_integrable_structures_are_conformally_integrable(seed in any::<u64>()) {
        let s = hitchin();
        let mut rng = random::rng(seed);
        let tau = random_polynomial(&mut rng, 4);
        let t = transform_conformal(&s, &tau);
        let pts = points(&s.chart, 6);
        let input = CheckInput::new(&pts, seed, 1e-8);
        let lee = LeeForm::exact(&tau, 4).negated();
        let r = check_conformal_integrability(&t, &lee, &input).unwrap();
        prop_assert!(r.max_residual() <= 1e-8, "{}", r.max_residual());
        prop_assert!(check_lee_closed(&lee, &input).unwrap().max_residual() <= 1e-10);
    }
}

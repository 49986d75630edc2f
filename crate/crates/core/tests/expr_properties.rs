mod common;

use common::{point, smooth_expression};
use ggv_core::expr::{parse, Expression};
use proptest::prelude::*;

const STEP: f64 = 1e-6;

fn central_difference(e: &Expression, p: &[f64], i: usize) -> Option<f64> {
    let mut hi = p.to_vec();
    let mut lo = p.to_vec();
    hi[i] += STEP;
    lo[i] -= STEP;
    Some((e.eval_f64(&hi).ok()? - e.eval_f64(&lo).ok()?) / (2.0 * STEP))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gradient_matches_central_differences(e in smooth_expression(3), p in point(3, -1.5, 1.5)) {
        let jet = e.eval_jet(&p);
        prop_assume!(jet.is_ok());
        let jet = jet.unwrap();
        prop_assume!(jet.value.abs() < 1e4 && jet.grad.iter().all(|g| g.abs() < 1e4));
        for i in 0..3 {
            let fd = central_difference(&e, &p, i);
            prop_assume!(fd.is_some());
            let fd = fd.unwrap();
            let scale = jet.grad[i].abs().max(1.0);
            prop_assert!(
                (jet.grad[i] - fd).abs() <= 1e-6 * scale,
                "{e} at {p:?}: d{i} jet {} vs fd {fd}", jet.grad[i]
            );
        }
    }

    #[test]
    fn printing_reaches_a_fixpoint(e in smooth_expression(3)) {
        let once = parse(&e.to_string(), 3).expect("printed form parses");
        let twice = parse(&once.to_string(), 3).expect("reprinted form parses");
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn printed_form_evaluates_identically(e in smooth_expression(3), p in point(3, -1.5, 1.5)) {
        let reparsed = parse(&e.to_string(), 3).unwrap();
        match (e.eval_f64(&p), reparsed.eval_f64(&p)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn evaluation_is_pure(e in smooth_expression(3), p in point(3, -1.5, 1.5)) {
        let a = e.eval_jet(&p);
        let b = e.eval_jet(&p);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
                for (x, y) in a.grad.iter().zip(&b.grad) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn parsing_never_panics(text in "[x0-9norm2expsincolqrt+*/^(). -]{0,24}") {
        let _ = parse(&text, 3);
    }

    #[test]
    fn parse_error_offsets_stay_in_range(text in "[x0-9+*/^() -]{0,16}") {
        if let Err(err) = parse(&text, 2) {
            prop_assert!(err.offset <= text.len());
        }
    }
}

#[test]
fn inverse_norm_square_matches_quotient_rule() {
    let e = parse("1/norm2", 4).unwrap();
    for p in [[1.0, 0.0, 0.0, 0.0], [0.3, -0.7, 1.1, 0.2]] {
        let n2: f64 = p.iter().map(|x| x * x).sum();
        let jet = e.eval_jet(&p).unwrap();
        assert!((jet.value - 1.0 / n2).abs() < 1e-15);
        for (g, x) in jet.grad.iter().zip(p) {
            assert!((g + 2.0 * x / (n2 * n2)).abs() < 1e-14);
        }
    }
}

#[test]
fn domain_errors_on_singular_locus() {
    for (src, p) in [
        ("ln(norm2)", vec![0.0, 0.0]),
        ("1/x1", vec![0.0, 1.0]),
        ("sqrt(x1)", vec![-1.0, 0.0]),
        ("x2^-1", vec![1.0, 0.0]),
    ] {
        let e = parse(src, 2).unwrap();
        assert!(e.eval_jet(&p).is_err(), "{src}");
        assert!(e.eval_f64(&p).is_err(), "{src}");
    }
}

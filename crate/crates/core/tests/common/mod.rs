#![allow(dead_code)]

use ggv_core::expr::Expression;
use ggv_core::jets::Func;
use proptest::prelude::*;

/// Expressions over `dim` coordinates that stay finite on bounded boxes:
/// logarithms, square roots and quotients are guarded by `1 + (.)^2`.
pub fn smooth_expression(dim: usize) -> impl Strategy<Value = Expression> {
    let leaf = prop_oneof![
        (-3.0..3.0f64).prop_map(Expression::Const),
        (1..=dim).prop_map(Expression::Coord),
        Just(Expression::Norm2),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let guarded = |e: Expression| Expression::Const(1.0) + e.powi(2);
        prop_oneof![
            inner.clone().prop_map(|e| -e),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| a / guarded(b)),
            (inner.clone(), -3..=3i32).prop_map(|(a, n)| Expression::PowInt(Box::new(a), n)),
            inner.clone().prop_map(|a| Expression::apply(Func::Sin, a)),
            inner.clone().prop_map(|a| Expression::apply(Func::Cos, a)),
            inner
                .clone()
                .prop_map(move |a| Expression::apply(Func::Ln, guarded(a))),
            inner
                .clone()
                .prop_map(move |a| Expression::apply(Func::Sqrt, guarded(a))),
            inner.prop_map(|a| Expression::apply(Func::Exp, Expression::apply(Func::Sin, a))),
        ]
    })
}

pub fn point(dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(lo..hi, dim)
}

/// A point of the punctured 4-space annulus `0.5 <= |x| <= 2`.
pub fn annulus_point() -> impl Strategy<Value = Vec<f64>> {
    (point(4, -1.0, 1.0), 0.55..1.95f64).prop_filter_map("nonzero direction", |(v, r)| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-3).then(|| v.iter().map(|x| r * x / n).collect())
    })
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub mod random {
    use ggv_core::geometry::{
        random_polynomial, random_vector, Antisymmetric, ComponentVector, Endomorphism,
    };
    use ggv_core::linalg::Mat;
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    pub fn rng(seed: u64) -> SplitMix64 {
        SplitMix64::seed_from_u64(seed)
    }

    pub fn vector(rng: &mut SplitMix64, m: usize) -> ComponentVector {
        random_vector(rng, m)
    }

    pub fn antisymmetric(rng: &mut SplitMix64, m: usize) -> Antisymmetric {
        Antisymmetric::from_upper(m, |_, _| random_polynomial(rng, m))
    }

    pub fn endomorphism(rng: &mut SplitMix64, m: usize) -> Endomorphism {
        Endomorphism::new(Mat::from_fn(m, m, |_, _| random_polynomial(rng, m)))
    }
}

//! Built-in structures with their expected suite verdicts.

use crate::bigtangent::PhiMatrix;
use crate::check::Verdict;
use crate::expr::{parse, Expression};
use crate::gcs::{transform_conformal, LeeForm};
use crate::geometry::{
    Antisymmetric, Chart, ComponentVector, Endomorphism, OneForm, SymmetricTwoTensor,
};
use crate::ghermitian::{sasakian_product_quadruple, AlmostContact, GHermitian};
use crate::hypersurface::Hypersurface as Surface;
use crate::linalg::Mat;

use super::structure_file::Structure;
use super::suites::Suite;

/// Inner and outer radius of the punctured-space charts.
pub const ANNULUS: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub structure: Structure,
    pub expectations: Vec<(Suite, Verdict)>,
}

impl Fixture {
    pub fn expected(&self, suite: Suite) -> Option<Verdict> {
        self.expectations
            .iter()
            .find(|(s, _)| *s == suite)
            .map(|(_, v)| *v)
    }
}

fn e(text: &str, m: usize) -> Expression {
    parse(text, m).expect("fixture expressions are well formed")
}

fn constants(rows: &Mat<f64>) -> Mat<Expression> {
    rows.map(|&v| Expression::constant(v))
}

/// `sum_h dx^h ^ dx^{n+h}` as a matrix.
fn standard_symplectic(m: usize) -> Mat<f64> {
    let n = m / 2;
    Mat::from_fn(m, m, |i, j| {
        if j == i + n && i < n {
            1.0
        } else if i == j + n && j < n {
            -1.0
        } else {
            0.0
        }
    })
}

/// `J d_h = d_{n+h}`, `J d_{n+h} = -d_h`.
pub fn split_complex(m: usize) -> Endomorphism {
    let n = m / 2;
    let mut rows = vec![vec![0.0; m]; m];
    for h in 0..n {
        rows[n + h][h] = 1.0;
        rows[h][n + h] = -1.0;
    }
    Endomorphism::from_constants(&rows)
}

/// `J d_{2h-1} = d_{2h}`, `J d_{2h} = -d_{2h-1}`.
pub fn paired_complex(m: usize) -> Endomorphism {
    let mut rows = vec![vec![0.0; m]; m];
    for h in 0..m / 2 {
        rows[2 * h + 1][2 * h] = 1.0;
        rows[2 * h][2 * h + 1] = -1.0;
    }
    Endomorphism::from_constants(&rows)
}

fn annulus() -> Chart {
    Chart::annulus(4, ANNULUS.0, ANNULUS.1).expect("valid annulus")
}

/// `-2 sum x^i dx^i / |x|^2`.
pub fn radial_lee(m: usize) -> LeeForm {
    LeeForm::exact(&e("ln(norm2)", m), m).negated()
}

/// Hitchin pair on the punctured 4-space: `omega = sum dx^h ^ dx^{n+h}`,
/// a constant `A` with `omega(AX, Y) = omega(X, AY)`, `pi = -omega^-1` and
/// `sigma = omega (A^2 + Id)`.
pub fn hopf_hitchin() -> Structure {
    let omega = standard_symplectic(4);
    let skew = Mat::from_rows(vec![
        vec![0.0, 0.5, 0.25, -0.5],
        vec![-0.5, 0.0, 0.75, 0.25],
        vec![-0.25, -0.75, 0.0, -0.25],
        vec![0.5, -0.25, 0.25, 0.0],
    ]);
    let a = omega.matmul(&skew).neg();
    let sigma = omega.matmul(&a.matmul(&a).add(&Mat::identity(4, &0.0)));
    let mut s = Structure::new(annulus());
    s.phi = Some(PhiMatrix {
        a: Endomorphism::new(constants(&a)),
        pi: Antisymmetric::from_matrix_upper(&constants(&omega)),
        sigma: Antisymmetric::from_matrix_upper(&constants(&sigma)),
    });
    s
}

fn hopf_hitchin_prime(lee: LeeForm) -> Structure {
    let base = hopf_hitchin();
    let g = transform_conformal(&base.gcs().expect("has phi"), &e("ln(norm2)", 4));
    let mut s = Structure::new(g.chart);
    s.phi = Some(g.phi);
    s.with_lee(lee)
}

fn sample_psi() -> Antisymmetric {
    let vals = [0.5, 0.0, 0.3, -0.2, 0.0, 0.7];
    let mut k = 0;
    Antisymmetric::from_upper(4, |_, _| {
        k += 1;
        Expression::constant(vals[k - 1])
    })
}

/// Flat metric, a constant 2-form and the two constant complex structures
/// `split_complex` and `paired_complex`.
pub fn flat_bihermitian(chart: Chart) -> GHermitian {
    GHermitian::from_quadruple(
        chart,
        SymmetricTwoTensor::identity(4),
        sample_psi(),
        &split_complex(4),
        &paired_complex(4),
    )
}

fn lck_hopf() -> Structure {
    let j = split_complex(4);
    let h = GHermitian::from_quadruple(
        annulus(),
        SymmetricTwoTensor::identity(4),
        Antisymmetric::zero(4),
        &j,
        &j,
    )
    .conformal(&e("ln(norm2)", 4));
    Structure::from_hermitian(h)
        .with_lee(radial_lee(4))
        .with_hypersurface(Surface::sphere3(1.0))
}

fn flat_kahler() -> Structure {
    let j = split_complex(4);
    Structure::from_hermitian(GHermitian::from_quadruple(
        Chart::cube(4, -2.0, 2.0).expect("valid cube"),
        SymmetricTwoTensor::identity(4),
        Antisymmetric::zero(4),
        &j,
        &j,
    ))
    .with_hypersurface(Surface::sphere3(1.0))
}

/// Left-invariant normal almost contact metric data on the Heisenberg group
/// `(x, y, z) = (x1, x2, x3)`: `xi = (y dx - dz)/2`, `Z = -2 d_z`,
/// `F d_x = -d_y`, `F d_y = d_x + y d_z`, `F d_z = 0`, and the metric
/// `(dx^2 + dy^2)/2 + xi (x) xi`. With these normalizations `d xi` equals
/// `gamma(F., .)`, so the cone `e^t (gamma + dt^2)` is Kähler. `sign = -1`
/// negates `F`, `Z` and `xi` together.
pub fn heisenberg_contact(sign: f64) -> (AlmostContact, SymmetricTwoTensor) {
    let m = 4;
    let s = Expression::constant(sign);
    let f = Endomorphism::new(Mat::from_fn(3, 3, |i, j| {
        let v = match (i, j) {
            (1, 0) => Expression::constant(-1.0),
            (0, 1) => Expression::constant(1.0),
            (2, 1) => e("x2", m),
            _ => Expression::zero(),
        };
        s.clone() * v
    }));
    let z = ComponentVector::new(vec![
        Expression::zero(),
        Expression::zero(),
        Expression::constant(-2.0 * sign),
    ]);
    let xi: OneForm = ComponentVector::new(vec![
        s.clone() * e("x2/2", m),
        Expression::zero(),
        Expression::constant(-0.5 * sign),
    ]);
    let gamma = SymmetricTwoTensor::from_upper(3, |i, j| match (i, j) {
        (0, 0) => e("1/2 + x2^2/4", m),
        (0, 2) => e("-x2/4", m),
        (1, 1) => Expression::constant(0.5),
        (2, 2) => Expression::constant(0.25),
        _ => Expression::zero(),
    });
    (AlmostContact { f, z, xi }, gamma)
}

fn heisenberg_product() -> Structure {
    let chart = Chart::cube(4, -1.0, 1.0).expect("valid cube");
    let (plus, gamma) = heisenberg_contact(1.0);
    let (minus, _) = heisenberg_contact(-1.0);
    let check = vec![
        vec![0.1, 0.2, -0.3, 0.0],
        vec![-0.7, 0.9, 0.4, 0.0],
        vec![0.5, -0.6, 0.8, 0.0],
    ];
    let (h, lee) = sasakian_product_quadruple(
        chart,
        &plus,
        &minus,
        &gamma,
        &Antisymmetric::zero(3),
        &ComponentVector::zero(3),
        &check,
        1e-12,
    )
    .expect("Heisenberg data satisfies the almost contact identities");
    Structure::from_hermitian(h).with_lee(lee)
}

fn zero_structure() -> Structure {
    let mut s = Structure::new(Chart::cube(2, -1.0, 1.0).expect("valid cube"));
    s.phi = Some(PhiMatrix {
        a: Endomorphism::zero(2),
        pi: Antisymmetric::zero(2),
        sigma: Antisymmetric::zero(2),
    });
    s
}

/// All built-in fixtures, in a fixed order.
pub fn fixtures() -> Vec<Fixture> {
    use Suite::*;
    use Verdict::{Fail, Pass};
    vec![
        Fixture {
            name: "ex31",
            summary: "Hitchin pair with a constant compatible A on the punctured 4-space",
            structure: hopf_hitchin(),
            expectations: vec![(Algebraic, Pass), (Integrability, Pass)],
        },
        Fixture {
            name: "ex31_prime",
            summary: "ex31 after the conformal change by ln|x|^2, with Lee form -2 sum x dx/|x|^2",
            structure: hopf_hitchin_prime(radial_lee(4)),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Fail),
                (ConfIntegrability, Pass),
            ],
        },
        Fixture {
            name: "ex31_prime_wrong_sign",
            summary: "ex31_prime paired with the opposite Lee form (negative control)",
            structure: hopf_hitchin_prime(radial_lee(4).negated()),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Fail),
                (ConfIntegrability, Fail),
            ],
        },
        Fixture {
            name: "ex32",
            summary: "flat metric, constant 2-form and two constant complex structures",
            structure: Structure::from_hermitian(flat_bihermitian(annulus()))
                .with_lee(LeeForm::zero(4))
                .with_hypersurface(Surface::sphere3(1.0)),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Pass),
                (ConfIntegrability, Pass),
                (Gk, Pass),
                (ConfGk, Pass),
                (Hypersurface, Pass),
            ],
        },
        Fixture {
            name: "ex32_rescaled",
            summary: "ex32 with metric and 2-form divided by |x|^2, Lee form -2 d ln|x|",
            structure: Structure::from_hermitian(
                flat_bihermitian(annulus()).conformal(&e("ln(norm2)", 4)),
            )
            .with_lee(radial_lee(4))
            .with_hypersurface(Surface::sphere3(1.0)),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Fail),
                (ConfIntegrability, Pass),
                (Gk, Fail),
                (ConfGk, Pass),
                (Hypersurface, Pass),
            ],
        },
        Fixture {
            name: "lck_hopf",
            summary:
                "one complex structure, metric flat/|x|^2, no 2-form: locally conformal Kähler",
            structure: lck_hopf(),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Pass),
                (ConfIntegrability, Pass),
                (Gk, Fail),
                (ConfGk, Pass),
                (Hypersurface, Pass),
            ],
        },
        Fixture {
            name: "flat_kahler",
            summary: "flat Kähler 4-space with the unit sphere as hypersurface",
            structure: flat_kahler(),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Pass),
                (Gk, Pass),
                (Hypersurface, Pass),
            ],
        },
        Fixture {
            name: "ex33_heisenberg",
            summary:
                "product of the Heisenberg group contact metric pair with a line, Lee form -dt",
            structure: heisenberg_product(),
            expectations: vec![
                (Algebraic, Pass),
                (Integrability, Fail),
                (ConfIntegrability, Pass),
                (Gk, Fail),
                (ConfGk, Pass),
            ],
        },
        Fixture {
            name: "zero_structure",
            summary: "A = pi = sigma = 0 in dimension 2 (fails A^2 = -Id)",
            structure: zero_structure(),
            expectations: vec![(Algebraic, Fail)],
        },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

pub fn fixture_names() -> Vec<&'static str> {
    fixtures().iter().map(|f| f.name).collect()
}

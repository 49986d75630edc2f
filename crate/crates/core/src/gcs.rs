//! Generalized almost complex structures given by `(A, pi, sigma)`:
//! algebraic constraints, integrability, conformal integrability with a Lee
//! form, the conformal transformation law and the rigidity hypotheses.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::bigtangent::{nijenhuis_phi, Big, BigSection, PhiMatrix};
use crate::check::{run_pointwise, CheckInput, CheckReport, Discrepancy};
use crate::error::Result;
use crate::expr::Expression;
use crate::geometry::{
    exterior_derivative_1, exterior_derivative_2, interior_xy, mat_values, nijenhuis_endo,
    random_vector, schouten_concomitant, schouten_square, sharp_pi, sigma_assoc, values, wedge_1_2,
    Chart, ComponentVector, Form3, OneForm,
};
use crate::jets::Jet;
use crate::linalg::{dot, vadd, vscale, vsub, Mat};

/// Number of random polynomial arguments added to each coordinate battery.
pub const RANDOM_ARGUMENTS: usize = 5;

const BATTERY_STREAM: u64 = 0xB477_E2F1_0C3D_5A69;

#[derive(Clone, Debug, PartialEq)]
pub struct GcsData {
    pub chart: Chart,
    pub phi: PhiMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeeForm {
    pub form: OneForm,
}

impl LeeForm {
    pub fn new(form: OneForm) -> Self {
        LeeForm { form }
    }

    pub fn zero(m: usize) -> Self {
        LeeForm::new(ComponentVector::zero(m))
    }

    /// The exact form `d tau`.
    pub fn exact(tau: &Expression, m: usize) -> Self {
        LeeForm::new(ComponentVector::gradient_of(tau, m))
    }

    pub fn negated(&self) -> Self {
        LeeForm::new(ComponentVector::new(
            self.form.components.iter().map(|c| -c.clone()).collect(),
        ))
    }
}

/// Vector fields and 1-forms used as arguments of tensorial conditions:
/// coordinate fields first, then seeded random polynomial fields.
pub(crate) struct ArgBattery {
    pub vectors: Vec<ComponentVector>,
    pub forms: Vec<ComponentVector>,
}

impl ArgBattery {
    pub fn new(m: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::seed_from_u64(seed ^ BATTERY_STREAM);
        let mut vectors: Vec<_> = (0..m).map(|i| ComponentVector::basis(m, i)).collect();
        let mut forms = vectors.clone();
        for _ in 0..RANDOM_ARGUMENTS {
            vectors.push(random_vector(&mut rng, m));
            forms.push(random_vector(&mut rng, m));
        }
        ArgBattery { vectors, forms }
    }

    pub fn vector_jets(&self, p: &[f64]) -> Result<Vec<Vec<Jet>>> {
        Ok(self
            .vectors
            .iter()
            .map(|v| v.jets(p))
            .collect::<Result<_, _>>()?)
    }

    pub fn form_jets(&self, p: &[f64]) -> Result<Vec<Vec<Jet>>> {
        Ok(self
            .forms
            .iter()
            .map(|v| v.jets(p))
            .collect::<Result<_, _>>()?)
    }
}

pub const ALGEBRAIC: [&str; 3] = ["alg.pi_symmetry", "alg.sigma_symmetry", "alg.square"];

/// Residuals of `pi(alpha o A, beta) = pi(alpha, beta o A)`,
/// `sigma(AX, Y) = sigma(X, AY)` and `A^2 = -Id - sharp_pi flat_sigma`,
/// each the raw max-abs component difference.
pub fn check_algebraic(s: &GcsData, input: &CheckInput<'_>) -> Result<CheckReport> {
    run_pointwise("algebraic", &ALGEBRAIC, input, |p| {
        let v = s.phi.eval(p)?;
        let m = v.a.rows();
        let mut r1 = Discrepancy::new();
        r1.compare_mats(&v.a.matmul(&v.pi), &v.pi.matmul(&v.a.transpose()));
        let mut r2 = Discrepancy::new();
        r2.compare_mats(&v.a.transpose().matmul(&v.sigma), &v.sigma.matmul(&v.a));
        let mut r3 = Discrepancy::new();
        let lhs = v.a.matmul(&v.a);
        let rhs = Mat::identity(m, &0.0)
            .neg()
            .sub(&v.pi.transpose().matmul(&v.sigma.transpose()));
        r3.compare_mats(&lhs, &rhs);
        Ok(vec![r1.raw(), r2.raw(), r3.raw()])
    })
}

pub const INTEGRABILITY: [&str; 4] = ["poisson", "concomitant", "nijenhuis_a", "associated_form"];

pub const CONF_INTEGRABILITY: [&str; 4] = [
    "conf.poisson",
    "conf.concomitant",
    "conf.nijenhuis_a",
    "conf.associated_form",
];

fn integrability_residuals(
    s: &GcsData,
    lee: Option<&LeeForm>,
    battery: &ArgBattery,
    p: &[f64],
) -> Result<Vec<f64>> {
    let m = s.chart.dim;
    let phi = s.phi.jets(p)?;
    let pv = phi.values();
    let w = match lee {
        Some(l) => l.form.values(p)?,
        None => vec![0.0; m],
    };
    let xs = battery.vector_jets(p)?;
    let alphas = battery.form_jets(p)?;
    let xv: Vec<Vec<f64>> = xs.iter().map(|x| values(x)).collect();

    // Poisson: [pi, pi] = -2 (sharp_pi w) ^ pi
    let mut r1 = Discrepancy::new();
    let sharp_w = sharp_pi(&pv.pi, &w);
    r1.compare_forms(
        &schouten_square(&phi.pi),
        &wedge_1_2(&sharp_w, &pv.pi).scale(-2.0),
    );

    // Concomitant: R(alpha, X) = w(X) A sharp_pi alpha - w(AX) sharp_pi alpha
    let mut r2 = Discrepancy::new();
    for alpha in &alphas {
        let sa = sharp_pi(&pv.pi, &values(alpha));
        let a_sa = pv.a.mul_vec(&sa);
        for (x, xval) in xs.iter().zip(&xv) {
            let lhs = schouten_concomitant(&phi.pi, &phi.a, alpha, x);
            let wx = dot(&w, xval);
            let wax = dot(&w, &pv.a.mul_vec(xval));
            let rhs = vsub(&vscale(&wx, &a_sa), &vscale(&wax, &sa));
            r2.compare_slices(&lhs, &rhs);
        }
    }

    // Nijenhuis of A against the sigma term
    let dsigma = exterior_derivative_2(&phi.sigma);
    let id_a2 = Mat::identity(m, &0.0).add(&pv.a.matmul(&pv.a));
    let mut r3 = Discrepancy::new();
    for (x, xval) in xs.iter().zip(&xv) {
        for (y, yval) in xs.iter().zip(&xv) {
            let lhs = vsub(
                &nijenhuis_endo(&phi.a, x, y),
                &sharp_pi(&pv.pi, &interior_xy(&dsigma, xval, yval)),
            );
            let sxy = dot(xval, &pv.sigma.mul_vec(yval));
            let rhs = vadd(
                &vscale(&-sxy, &sharp_w),
                &vsub(
                    &vscale(&dot(&w, xval), &id_a2.mul_vec(yval)),
                    &vscale(&dot(&w, yval), &id_a2.mul_vec(xval)),
                ),
            );
            r3.compare_slices(&lhs, &rhs);
        }
    }

    // Associated form: d sigma_A - cyclic d sigma(A., ., .) = -(w ^ sigma_A + (w o A) ^ sigma)
    let sa = sigma_assoc(&phi.sigma, &phi.a);
    let dsa = exterior_derivative_2(&sa);
    let cols: Vec<Vec<f64>> = (0..m).map(|i| pv.a.column(i)).collect();
    let cyc = Form3::from_fn(m, |i, j, k| {
        let e = |n: usize| {
            let mut v = vec![0.0; m];
            v[n] = 1.0;
            v
        };
        dsigma.contract(&cols[i], &e(j), &e(k))
            + dsigma.contract(&cols[j], &e(k), &e(i))
            + dsigma.contract(&cols[k], &e(i), &e(j))
    });
    let lhs4 = dsa.sub(&cyc);
    let sav = mat_values(&sa);
    let wa = pv.a.tr_mul_vec(&w);
    let rhs4 = wedge_1_2(&w, &sav)
        .add(&wedge_1_2(&wa, &pv.sigma))
        .scale(-1.0);
    let mut r4 = Discrepancy::new();
    for i in 0..xv.len() {
        let (x, y, z) = (&xv[i], &xv[(i + 1) % xv.len()], &xv[(i + 2) % xv.len()]);
        r4.compare(lhs4.contract(x, y, z), rhs4.contract(x, y, z));
    }
    r4.compare_forms(&lhs4, &rhs4);

    Ok(vec![
        r1.normalized(),
        r2.normalized(),
        r3.normalized(),
        r4.normalized(),
    ])
}

/// The four integrability conditions: `pi` Poisson, vanishing Schouten
/// concomitant, `N_A = sharp_pi(i(X^Y) d sigma)`, and the associated-form
/// identity.
pub fn check_integrability(s: &GcsData, input: &CheckInput<'_>) -> Result<CheckReport> {
    let battery = ArgBattery::new(s.chart.dim, input.seed);
    run_pointwise("integrability", &INTEGRABILITY, input, |p| {
        integrability_residuals(s, None, &battery, p)
    })
}

/// The integrability conditions modified by a Lee form. With a zero Lee
/// form the residuals coincide with [`check_integrability`].
pub fn check_conformal_integrability(
    s: &GcsData,
    lee: &LeeForm,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let battery = ArgBattery::new(s.chart.dim, input.seed);
    run_pointwise("conf-integrability", &CONF_INTEGRABILITY, input, |p| {
        integrability_residuals(s, Some(lee), &battery, p)
    })
}

/// `N_A(X,Y) - sharp_pi(i(X^Y) d sigma) = -sharp_pi(i(X^Y)(d tau ^ sigma))`.
pub fn check_ptiii_crosscheck(
    s: &GcsData,
    tau: &Expression,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let battery = ArgBattery::new(s.chart.dim, input.seed);
    run_pointwise("ptiii-crosscheck", &["ptiii"], input, |p| {
        let phi = s.phi.jets(p)?;
        let pv = phi.values();
        let dtau = tau.eval_jet(p)?.grad;
        let dsigma = exterior_derivative_2(&phi.sigma);
        let tau_sigma = wedge_1_2(&dtau, &pv.sigma);
        let xs = battery.vector_jets(p)?;
        let mut r = Discrepancy::new();
        for x in &xs {
            for y in &xs {
                let (xv, yv) = (values(x), values(y));
                let lhs = vsub(
                    &nijenhuis_endo(&phi.a, x, y),
                    &sharp_pi(&pv.pi, &interior_xy(&dsigma, &xv, &yv)),
                );
                let rhs = vscale(&-1.0, &sharp_pi(&pv.pi, &interior_xy(&tau_sigma, &xv, &yv)));
                r.compare_slices(&lhs, &rhs);
            }
        }
        Ok(vec![r.normalized()])
    })
}

/// Maximum of `N_Phi` over the section battery: all pairs of coordinate
/// sections and seeded random polynomial sections.
pub fn check_nijenhuis_phi(s: &GcsData, input: &CheckInput<'_>) -> Result<CheckReport> {
    let m = s.chart.dim;
    let mut rng = SplitMix64::seed_from_u64(input.seed ^ BATTERY_STREAM.rotate_left(17));
    let mut sections = BigSection::coordinate_battery(m);
    for _ in 0..RANDOM_ARGUMENTS {
        sections.push(BigSection::random(&mut rng, m));
    }
    run_pointwise("nphi", &["nphi.courant"], input, |p| {
        let phi = s.phi.jets(p)?;
        let jets: Vec<Big<Jet>> = sections
            .iter()
            .map(|sec| sec.jets(p))
            .collect::<Result<_, _>>()?;
        let mut r = Discrepancy::new();
        for i in 0..jets.len() {
            for j in i..jets.len() {
                let n = nijenhuis_phi(&phi, &jets[i], &jets[j]);
                r.zero(&n.stacked());
            }
        }
        Ok(vec![r.normalized()])
    })
}

/// Raw max-abs component of `d(lee)`.
pub fn check_lee_closed(lee: &LeeForm, input: &CheckInput<'_>) -> Result<CheckReport> {
    run_pointwise("lee-closed", &["lee.closed"], input, |p| {
        Ok(vec![exterior_derivative_1(&lee.form.jets(p)?).max_abs()])
    })
}

/// `(A, e^tau pi, e^{-tau} sigma)`.
pub fn transform_conformal(s: &GcsData, tau: &Expression) -> GcsData {
    GcsData {
        chart: s.chart.clone(),
        phi: s.phi.conformal(tau),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub outcome: Outcome,
    /// First point where the hypothesis did not hold.
    pub witness: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    /// `pi` nondegenerate.
    pub nondegenerate_pi: Hypothesis,
    /// `A^2 != -Id` and `A` has no real eigenvalue.
    pub no_real_spectrum: Hypothesis,
    /// `rank pi > 2` and `sigma` nondegenerate.
    pub high_rank: Hypothesis,
}

impl RigidityReport {
    pub fn any_holds(&self) -> bool {
        [
            &self.nondegenerate_pi,
            &self.no_real_spectrum,
            &self.high_rank,
        ]
        .iter()
        .any(|h| h.outcome == Outcome::Holds)
    }
}

/// Imaginary parts below this count as a real eigenvalue.
pub const REAL_EIGENVALUE_THRESHOLD: f64 = 1e-8;
const SINGULAR_VALUE_THRESHOLD: f64 = 1e-8;

fn pointwise_outcome(point_outcomes: &[(Vec<f64>, Outcome)]) -> Hypothesis {
    let mut outcome = Outcome::Holds;
    let mut witness = None;
    for (p, o) in point_outcomes {
        match o {
            Outcome::Holds => {}
            Outcome::Fails => {
                return Hypothesis {
                    outcome: Outcome::Fails,
                    witness: Some(p.clone()),
                }
            }
            Outcome::Inconclusive => {
                if outcome == Outcome::Holds {
                    outcome = Outcome::Inconclusive;
                    witness = Some(p.clone());
                }
            }
        }
    }
    Hypothesis { outcome, witness }
}

/// Evaluates the three alternative rigidity hypotheses at every point.
/// Points where evaluation fails count against every hypothesis.
pub fn check_rigidity_hypotheses(s: &GcsData, points: &[Vec<f64>], tol: f64) -> RigidityReport {
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    let mut h3 = Vec::new();
    for p in points {
        let v = match s.phi.eval(p) {
            Ok(v) => v,
            Err(_) => {
                for h in [&mut h1, &mut h2, &mut h3] {
                    h.push((p.clone(), Outcome::Inconclusive));
                }
                continue;
            }
        };
        let m = v.a.rows();
        let pi = v.pi.to_nalgebra();
        let sigma = v.sigma.to_nalgebra();
        let a = v.a.to_nalgebra();
        let ok = |b: bool| if b { Outcome::Holds } else { Outcome::Fails };

        h1.push((p.clone(), ok(pi.determinant().abs() > tol)));

        let a2_id = &a * &a + DMatrix::<f64>::identity(m, m);
        let not_minus_id = a2_id.amax() > tol;
        let eig = a.complex_eigenvalues();
        let min_im = eig.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min);
        let o2 = if !not_minus_id || min_im <= REAL_EIGENVALUE_THRESHOLD {
            Outcome::Fails
        } else if min_im < 100.0 * REAL_EIGENVALUE_THRESHOLD {
            Outcome::Inconclusive
        } else {
            Outcome::Holds
        };
        h2.push((p.clone(), o2));

        let rank = pi
            .singular_values()
            .iter()
            .filter(|sv| **sv > SINGULAR_VALUE_THRESHOLD)
            .count();
        h3.push((p.clone(), ok(rank > 2 && sigma.determinant().abs() > tol)));
    }
    RigidityReport {
        nondegenerate_pi: pointwise_outcome(&h1),
        no_real_spectrum: pointwise_outcome(&h2),
        high_rank: pointwise_outcome(&h3),
    }
}

/// Values of the triple at `p` as coordinate-section lists, for
/// comparisons between structures.
pub fn triple_values(s: &GcsData, p: &[f64]) -> Result<Vec<f64>> {
    let v = s.phi.eval(p)?;
    Ok(v.a
        .iter()
        .chain(v.pi.iter())
        .chain(v.sigma.iter())
        .copied()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Antisymmetric, Endomorphism};

    fn complex_j() -> GcsData {
        let a = Endomorphism::from_constants(&[
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        GcsData {
            chart: Chart::cube(4, -1.0, 1.0).unwrap(),
            phi: PhiMatrix {
                a,
                pi: Antisymmetric::zero(4),
                sigma: Antisymmetric::zero(4),
            },
        }
    }

    fn pts() -> Vec<Vec<f64>> {
        vec![vec![0.1, 0.2, -0.3, 0.4], vec![0.5, -0.6, 0.7, 0.05]]
    }

    #[test]
    fn classical_complex_structure() {
        let s = complex_j();
        let p = pts();
        let input = CheckInput::new(&p, 1, 1e-8);
        let alg = check_algebraic(&s, &input).unwrap();
        assert_eq!(alg.max_residual(), 0.0);
        // exact zero on coordinate arguments; random polynomial arguments add round-off
        let int = check_integrability(&s, &input).unwrap();
        assert!(int.max_residual() < 1e-14);
        let r = check_rigidity_hypotheses(&s, &p, 1e-8);
        assert_eq!(r.nondegenerate_pi.outcome, Outcome::Fails);
        assert_eq!(r.no_real_spectrum.outcome, Outcome::Fails);
    }

    #[test]
    fn zero_structure_fails_square() {
        let mut s = complex_j();
        s.phi.a = Endomorphism::zero(4);
        let p = pts();
        let alg = check_algebraic(&s, &CheckInput::new(&p, 1, 1e-8)).unwrap();
        assert_eq!(alg.residual("alg.square"), 1.0);
    }

    #[test]
    fn lee_closedness() {
        let p = pts();
        let input = CheckInput::new(&p, 1, 1e-8);
        let mut form = ComponentVector::zero(4);
        form.components[0] = Expression::Coord(2);
        let r = check_lee_closed(&LeeForm::new(form), &input).unwrap();
        assert_eq!(r.max_residual(), 1.0);
        let tau = crate::expr::parse("sin(x1*x2) + x3^2*x4", 4).unwrap();
        let r = check_lee_closed(&LeeForm::exact(&tau, 4), &input).unwrap();
        assert!(r.max_residual() < 1e-10);
    }

    #[test]
    fn transform_with_constant() {
        let mut s = complex_j();
        s.phi.pi.set(0, 1, Expression::constant(1.0));
        s.phi.sigma.set(0, 1, Expression::constant(1.0));
        let t = transform_conformal(&s, &Expression::constant(2f64.ln()));
        let v = t.phi.eval(&[0.0; 4]).unwrap();
        assert!((v.pi[(0, 1)] - 2.0).abs() < 1e-15);
        assert!((v.sigma[(0, 1)] - 0.5).abs() < 1e-15);
        let z = transform_conformal(&s, &Expression::zero());
        assert_eq!(
            triple_values(&z, &[0.0; 4]).unwrap(),
            triple_values(&s, &[0.0; 4]).unwrap()
        );
    }
}

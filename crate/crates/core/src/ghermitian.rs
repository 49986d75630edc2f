//! Generalized Riemannian metrics `(gamma, psi)`, generalized almost
//! Hermitian pairs, the classical structures `J_+` and `J_-`, and the
//! Kähler and conformal Kähler criteria built from them.

use crate::bigtangent::{neutral_matrix, PhiAt, PhiMatrix};
use crate::check::{run_pointwise, CheckInput, CheckReport, Discrepancy};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::gcs::{GcsData, LeeForm};
use crate::geometry::{
    exterior_derivative_2, interior_xy, mat_values, nijenhuis_endo, wedge_1_2, Antisymmetric,
    Chart, ComponentVector, Endomorphism, Form3, SymmetricTwoTensor,
};
use crate::jets::{Jet, Ring};
use crate::linalg::{vscale, Mat};

#[derive(Clone, Debug, PartialEq)]
pub struct GMetric {
    pub gamma: SymmetricTwoTensor,
    pub psi: Antisymmetric,
}

impl GMetric {
    /// `(e^{-tau} gamma, e^{-tau} psi)`.
    pub fn conformal(&self, tau: &Expression) -> GMetric {
        let f = Expression::exp(-tau.clone());
        GMetric {
            gamma: self.gamma.scaled(&f),
            psi: self.psi.scaled(&f),
        }
    }
}

pub fn transform_conformal_metric(metric: &GMetric, tau: &Expression) -> GMetric {
    metric.conformal(tau)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GHermitian {
    pub chart: Chart,
    pub phi: PhiMatrix,
    pub metric: GMetric,
}

fn expr_inverse(g: &Mat<Expression>) -> Mat<Expression> {
    let det = g.det_cofactor();
    g.adjugate().map(|e| e.clone() / det.clone())
}

impl GHermitian {
    /// Assembles `(A, pi, sigma)` from `(gamma, psi, J_+, J_-)`:
    ///
    /// ```text
    /// A       = (J+ + J-)/2 - (J+ - J-) g^-1 psi^T / 2
    /// pi^T    = (J+ - J-) g^-1 / 2
    /// sigma^T = psi^T A + g (J+ - J-)/2 - g (J+ + J-) g^-1 psi^T / 2
    /// ```
    ///
    /// `pi` and `sigma` are read from their strict upper triangles, so the
    /// input must be metric-compatible for the result to represent it.
    pub fn from_quadruple(
        chart: Chart,
        gamma: SymmetricTwoTensor,
        psi: Antisymmetric,
        j_plus: &Endomorphism,
        j_minus: &Endomorphism,
    ) -> GHermitian {
        let g = gamma.matrix();
        let gi = expr_inverse(g);
        let psi_t = psi.matrix().transpose();
        let jp = j_plus.matrix();
        let jm = j_minus.matrix();
        let half_sum = jp.add(jm).scale(0.5);
        let half_diff = jp.sub(jm).scale(0.5);
        let gi_psi_t = gi.matmul(&psi_t);
        let a = half_sum.sub(&half_diff.matmul(&gi_psi_t));
        let pi_t = half_diff.matmul(&gi);
        let sigma_t = psi_t
            .matmul(&a)
            .add(&g.matmul(&half_diff))
            .sub(&g.matmul(&half_sum).matmul(&gi_psi_t));
        GHermitian {
            chart,
            phi: PhiMatrix {
                a: Endomorphism::new(a),
                pi: Antisymmetric::from_matrix_upper(&pi_t.transpose()),
                sigma: Antisymmetric::from_matrix_upper(&sigma_t.transpose()),
            },
            metric: GMetric { gamma, psi },
        }
    }

    pub fn gcs(&self) -> GcsData {
        GcsData {
            chart: self.chart.clone(),
            phi: self.phi.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    /// `(A, e^tau pi, e^{-tau} sigma; e^{-tau} gamma, e^{-tau} psi)`.
    pub fn conformal(&self, tau: &Expression) -> GHermitian {
        GHermitian {
            chart: self.chart.clone(),
            phi: self.phi.conformal(tau),
            metric: self.metric.conformal(tau),
        }
    }
}

/// `J_+-= A + sharp_pi flat_{psi +- gamma}`, i.e. `A + pi^T (psi^T +- g)`.
pub fn j_pm_from<T: Ring>(phi: &PhiAt<T>, g: &Mat<T>, psi: &Mat<T>) -> (Mat<T>, Mat<T>) {
    let pt = phi.pi.transpose();
    let psi_t = psi.transpose();
    let jp = phi.a.add(&pt.matmul(&psi_t.add(g)));
    let jm = phi.a.add(&pt.matmul(&psi_t.sub(g)));
    (jp, jm)
}

/// `J_+` and `J_-` as expression fields.
pub fn j_pm_expressions(h: &GHermitian) -> (Endomorphism, Endomorphism) {
    let phi = PhiAt {
        a: h.phi.a.matrix().clone(),
        pi: h.phi.pi.matrix().clone(),
        sigma: h.phi.sigma.matrix().clone(),
    };
    let (jp, jm) = j_pm_from(&phi, h.metric.gamma.matrix(), h.metric.psi.matrix());
    (Endomorphism::new(jp), Endomorphism::new(jm))
}

pub fn extract_j_pm(h: &GHermitian, p: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
    let phi = h.phi.eval(p)?;
    let g = h.metric.gamma.eval(p)?;
    let psi = h.metric.psi.eval(p)?;
    Ok(j_pm_from(&phi, &g, &psi))
}

/// Block matrix of the generalized metric operator
/// `[[phi, g^-1], [g (Id - phi^2), phi^T]]` with `phi = g^-1 psi`.
pub fn sharp_g_matrix(metric: &GMetric, p: &[f64]) -> Result<Mat<f64>> {
    let g = metric.gamma.eval(p)?;
    let psi = metric.psi.eval(p)?;
    sharp_g_from(&g, &psi)
}

pub fn sharp_g_from(g: &Mat<f64>, psi: &Mat<f64>) -> Result<Mat<f64>> {
    let m = g.rows();
    let gi = g.inverse().ok_or(Error::SingularMetric)?;
    let phi = gi.matmul(psi);
    let id = Mat::identity(m, &0.0);
    let mut out = Mat::zeros(2 * m, 2 * m, &0.0);
    out.set_block(0, 0, &phi);
    out.set_block(0, m, &gi);
    out.set_block(m, 0, &g.matmul(&id.sub(&phi.matmul(&phi))));
    out.set_block(m, m, &phi.transpose());
    Ok(out)
}

/// Matrix of `G(s1, s2) = 2 g(sharp_G s1, s2)`.
pub fn g_form_matrix(sharp_g: &Mat<f64>) -> Mat<f64> {
    let m = sharp_g.rows() / 2;
    sharp_g.transpose().matmul(&neutral_matrix(m).scale(2.0))
}

/// Positive definiteness by Cholesky pivots: every pivot must exceed `tol`.
pub fn is_positive_definite(a: &Mat<f64>, tol: f64) -> bool {
    let n = a.rows();
    let mut l = Mat::zeros(n, n, &0.0);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return false;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut s = 0.5 * (a[(i, j)] + a[(j, i)]);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    true
}

pub const POSITIVITY_TOL: f64 = 1e-10;

pub const METRIC_AXIOMS: [&str; 3] = ["metric.square", "metric.isometry", "metric.positive"];

pub fn check_metric_axioms(metric: &GMetric, input: &CheckInput<'_>) -> Result<CheckReport> {
    run_pointwise("metric", &METRIC_AXIOMS, input, |p| {
        let sg = sharp_g_matrix(metric, p)?;
        let n = sg.rows();
        let mut r1 = Discrepancy::new();
        r1.compare_mats(&sg.matmul(&sg), &Mat::identity(n, &0.0));
        let neutral = neutral_matrix(n / 2);
        let mut r2 = Discrepancy::new();
        r2.compare_mats(&sg.transpose().matmul(&neutral).matmul(&sg), &neutral);
        let pos = is_positive_definite(&g_form_matrix(&sg), POSITIVITY_TOL);
        Ok(vec![
            r1.normalized(),
            r2.normalized(),
            if pos { 0.0 } else { 1.0 },
        ])
    })
}

/// Smallest eigenvalue of the symmetric form `G` at a point.
pub fn g_form_min_eigenvalue(metric: &GMetric, p: &[f64]) -> Result<f64> {
    let gm = g_form_matrix(&sharp_g_matrix(metric, p)?).to_nalgebra();
    let sym = (&gm + gm.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().min())
}

pub const COMPATIBILITY: [&str; 2] = ["compat.commute", "compat.skew"];

/// `sharp_G Phi = Phi sharp_G` and `G(Phi s1, s2) + G(s1, Phi s2) = 0`.
pub fn check_compatibility(h: &GHermitian, input: &CheckInput<'_>) -> Result<CheckReport> {
    run_pointwise("compatibility", &COMPATIBILITY, input, |p| {
        let sg = sharp_g_matrix(&h.metric, p)?;
        let phi = h.phi.eval(p)?.matrix();
        let mut r1 = Discrepancy::new();
        r1.compare_mats(&sg.matmul(&phi), &phi.matmul(&sg));
        let gf = g_form_matrix(&sg);
        let mut r2 = Discrepancy::new();
        r2.compare_mats(&phi.transpose().matmul(&gf), &gf.matmul(&phi).neg());
        Ok(vec![r1.normalized(), r2.normalized()])
    })
}

/// `Phi^c = sharp_G Phi` together with the residual of `-Phi Phi^c = sharp_G`.
pub fn complementary_structure(h: &GHermitian, p: &[f64]) -> Result<(Mat<f64>, f64)> {
    let sg = sharp_g_matrix(&h.metric, p)?;
    let phi = h.phi.eval(p)?.matrix();
    let phic = sg.matmul(&phi);
    let mut r = Discrepancy::new();
    r.compare_mats(&phi.matmul(&phic).neg(), &sg);
    Ok((phic, r.normalized()))
}

/// Residual between `J_+-` of `h` and of its conformal transform by `tau`.
pub fn conformal_invariance_j(
    h: &GHermitian,
    tau: &Expression,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    check_same_j(h, &h.conformal(tau), input)
}

/// Residual between the classical pairs of two structures.
pub fn check_same_j(
    h: &GHermitian,
    other: &GHermitian,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    run_pointwise("j-invariance", &["j.invariance"], input, |p| {
        let (a1, b1) = extract_j_pm(h, p)?;
        let (a2, b2) = extract_j_pm(other, p)?;
        let mut r = Discrepancy::new();
        r.compare_mats(&a1, &a2);
        r.compare_mats(&b1, &b2);
        Ok(vec![r.normalized()])
    })
}

/// Kähler form `omega(X, Y) = gamma(JX, Y)`, components `(J^T g)_{ij}`.
pub fn kahler_form<T: Ring>(g: &Mat<T>, j: &Mat<T>) -> Mat<T> {
    j.transpose().matmul(g)
}

/// `(d^C omega)(X, Y, Z) = -d omega(JX, JY, JZ)`.
pub fn dc_omega(d_omega: &Form3, j: &Mat<f64>) -> Form3 {
    let cols: Vec<Vec<f64>> = (0..j.cols()).map(|i| j.column(i)).collect();
    d_omega.pullback(&cols).scale(-1.0)
}

/// `I_J phi (X,Y,Z) = phi(JX,JY,Z) + phi(JX,Y,JZ) + phi(X,JY,JZ)`.
pub fn j_type_operator(phi: &Form3, j: &Mat<f64>) -> Form3 {
    let m = phi.dim();
    let col = |i: usize| j.column(i);
    let e = |i: usize| {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        v
    };
    Form3::from_fn(m, |a, b, c| {
        phi.contract(&col(a), &col(b), &e(c))
            + phi.contract(&col(a), &e(b), &col(c))
            + phi.contract(&e(a), &col(b), &col(c))
    })
}

/// Max-abs of `phi - I_J phi`, which is four times the (3,0)+(0,3) part.
pub fn type_component_30_03(phi: &Form3, j: &Mat<f64>) -> f64 {
    phi.sub(&j_type_operator(phi, j)).max_abs()
}

/// Coefficients `Gamma^k_{ij}` with `nabla_{d_i} d_j = Gamma^k_{ij} d_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    m: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * m * m);
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    data.push(f(k, i, j));
                }
            }
        }
        Christoffel { m, data }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.m + i) * self.m + j]
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn levi_civita(g: &Mat<Jet>, ginv: &Mat<f64>) -> Self {
        let m = g.rows();
        let first = |i: usize, j: usize, l: usize| {
            0.5 * (g[(j, l)].grad[i] + g[(i, l)].grad[j] - g[(i, j)].grad[l])
        };
        Christoffel::from_fn(m, |k, i, j| {
            (0..m).map(|l| ginv[(k, l)] * first(i, j, l)).sum()
        })
    }

    /// `nabla_X Y - w(X) Y / 2 - w(Y) X / 2 + gamma(X, Y) sharp_gamma w / 2`.
    pub fn weyl(&self, lee: &[f64], g: &Mat<f64>, ginv: &Mat<f64>) -> Self {
        let m = self.m;
        let sw = ginv.mul_vec(lee);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Christoffel::from_fn(m, |k, i, j| {
            self.get(k, i, j) - 0.5 * lee[i] * delta(k, j) - 0.5 * lee[j] * delta(k, i)
                + 0.5 * g[(i, j)] * sw[k]
        })
    }

    /// `nabla_X Y + sign/2 sharp_gamma(i(X ^ Y) h)`.
    pub fn with_torsion(&self, h: &Form3, ginv: &Mat<f64>, sign: f64) -> Self {
        let m = self.m;
        Christoffel::from_fn(m, |k, i, j| {
            self.get(k, i, j)
                + 0.5 * sign * (0..m).map(|l| ginv[(k, l)] * h.get(i, j, l)).sum::<f64>()
        })
    }

    /// `(nabla_X Y)^k = X(Y^k) + Gamma^k_{ij} X^i Y^j`.
    pub fn covariant(&self, x: &[f64], y: &[Jet]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|k| {
                let mut s: f64 = x.iter().zip(&y[k].grad).map(|(a, b)| a * b).sum();
                for i in 0..m {
                    for j in 0..m {
                        s += self.get(k, i, j) * x[i] * y[j].value;
                    }
                }
                s
            })
            .collect()
    }

    /// `(nabla_{d_i} J)^k_j`.
    pub fn endo_derivative(&self, j: &Mat<Jet>, i: usize) -> Mat<f64> {
        let m = self.m;
        Mat::from_fn(m, m, |k, c| {
            let mut s = j[(k, c)].grad[i];
            for l in 0..m {
                s += self.get(k, i, l) * j[(l, c)].value - j[(k, l)].value * self.get(l, i, c);
            }
            s
        })
    }

    /// `(nabla_{d_i} gamma)_{jk}`.
    pub fn metric_derivative(&self, g: &Mat<Jet>, i: usize) -> Mat<f64> {
        let m = self.m;
        Mat::from_fn(m, m, |j, k| {
            let mut s = g[(j, k)].grad[i];
            for l in 0..m {
                s -= self.get(l, i, j) * g[(l, k)].value + self.get(l, i, k) * g[(j, l)].value;
            }
            s
        })
    }

    /// `T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}`.
    pub fn torsion_max(&self) -> f64 {
        let m = self.m;
        let mut t: f64 = 0.0;
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    t = t.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    LeviCivita,
    BismutPlus,
    BismutMinus,
    Weyl,
    WeylBismutPlus,
    WeylBismutMinus,
}

/// A connection determined by a generalized metric and, for the Weyl
/// family, a Lee form.
#[derive(Clone, Copy, Debug)]
pub struct Connection<'a> {
    pub kind: ConnectionKind,
    pub metric: &'a GMetric,
    pub lee: Option<&'a LeeForm>,
}

/// Metric data at one point, shared by the criteria.
pub struct MetricAt {
    pub g: Mat<Jet>,
    pub gv: Mat<f64>,
    pub ginv: Mat<f64>,
    pub psi: Mat<Jet>,
    pub psiv: Mat<f64>,
    pub d_psi: Form3,
    pub levi_civita: Christoffel,
}

impl MetricAt {
    pub fn new(metric: &GMetric, p: &[f64]) -> Result<Self> {
        let g = metric.gamma.jets(p)?;
        let gv = mat_values(&g);
        let ginv = gv.inverse().ok_or(Error::SingularMetric)?;
        let psi = metric.psi.jets(p)?;
        let psiv = mat_values(&psi);
        let d_psi = exterior_derivative_2(&psi);
        let levi_civita = Christoffel::levi_civita(&g, &ginv);
        Ok(MetricAt {
            g,
            gv,
            ginv,
            psi,
            psiv,
            d_psi,
            levi_civita,
        })
    }

    /// `d psi - w ^ psi`.
    pub fn twisted_d_psi(&self, lee: &[f64]) -> Form3 {
        self.d_psi.sub(&wedge_1_2(lee, &self.psiv))
    }

    pub fn weyl(&self, lee: &[f64]) -> Christoffel {
        self.levi_civita.weyl(lee, &self.gv, &self.ginv)
    }
}

impl Connection<'_> {
    pub fn coeffs(&self, p: &[f64]) -> Result<Christoffel> {
        let at = MetricAt::new(self.metric, p)?;
        let m = at.gv.rows();
        let lee = match self.lee {
            Some(l) => l.form.values(p)?,
            None => vec![0.0; m],
        };
        Ok(match self.kind {
            ConnectionKind::LeviCivita => at.levi_civita,
            ConnectionKind::BismutPlus => at.levi_civita.with_torsion(&at.d_psi, &at.ginv, 1.0),
            ConnectionKind::BismutMinus => at.levi_civita.with_torsion(&at.d_psi, &at.ginv, -1.0),
            ConnectionKind::Weyl => at.weyl(&lee),
            ConnectionKind::WeylBismutPlus => {
                at.weyl(&lee)
                    .with_torsion(&at.twisted_d_psi(&lee), &at.ginv, 1.0)
            }
            ConnectionKind::WeylBismutMinus => {
                at.weyl(&lee)
                    .with_torsion(&at.twisted_d_psi(&lee), &at.ginv, -1.0)
            }
        })
    }
}

/// `(nabla_X J)(Y)` for vector values `X`, `Y`.
pub fn cov_deriv_endo(c: &Christoffel, j: &Mat<Jet>, x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = c.dim();
    let mut acc = Mat::zeros(m, m, &0.0);
    for (i, xi) in x.iter().enumerate() {
        if *xi != 0.0 {
            acc = acc.add(&c.endo_derivative(j, i).scale(*xi));
        }
    }
    acc.mul_vec(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GkCriterion {
    /// `d^C_+ omega_+ = -d psi`, `d^C_- omega_- = d psi`.
    Galt1,
    /// Levi-Civita derivative of `J_+-` in terms of `d psi`.
    Crf2,
    /// Bismut connections parallelize `J_+-`; no (3,0)+(0,3) part in `d psi`.
    Bismut3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfGkCriterion {
    /// `d psi +- d^C omega_+- = w ^ psi -+ (w o J_+-) ^ omega_+-`.
    Form14,
    /// Weyl derivative of `J_+-` in terms of `d psi - w ^ psi`.
    Weyl16,
    /// Weyl-Bismut connections parallelize `J_+-`.
    WBismut17,
}

impl GkCriterion {
    pub const ALL: [GkCriterion; 3] = [GkCriterion::Galt1, GkCriterion::Crf2, GkCriterion::Bismut3];

    pub fn name(self) -> &'static str {
        match self {
            GkCriterion::Galt1 => "galt1",
            GkCriterion::Crf2 => "crf2",
            GkCriterion::Bismut3 => "bismut3",
        }
    }
}

impl ConfGkCriterion {
    pub const ALL: [ConfGkCriterion; 3] = [
        ConfGkCriterion::Form14,
        ConfGkCriterion::Weyl16,
        ConfGkCriterion::WBismut17,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfGkCriterion::Form14 => "form14",
            ConfGkCriterion::Weyl16 => "weyl16",
            ConfGkCriterion::WBismut17 => "wbismut17",
        }
    }
}

#[derive(Clone, Copy)]
enum Family {
    Forms,
    Derivative,
    Parallel,
}

/// Per-point residuals `[nj.plus, nj.minus, criterion...]` for a criterion
/// family with a Lee form (zero for the plain Kähler criteria).
fn kahler_residuals(h: &GHermitian, family: Family, lee: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    let m = h.dim();
    let at = MetricAt::new(&h.metric, p)?;
    let phi = h.phi.jets(p)?;
    let (jp, jm) = j_pm_from(&phi, &at.g, &at.psi);
    let basis: Vec<Vec<Jet>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| Jet::constant(if i == k { 1.0 } else { 0.0 }, m))
                .collect()
        })
        .collect();
    let e = |i: usize| -> Vec<f64> { basis[i].iter().map(|j| j.value).collect() };

    let mut out = Vec::new();
    for j in [&jp, &jm] {
        let mut r = Discrepancy::new();
        for a in 0..m {
            for b in a + 1..m {
                r.zero(&nijenhuis_endo(j, &basis[a], &basis[b]));
            }
        }
        out.push(r.normalized());
    }

    let h3 = at.twisted_d_psi(lee);
    let signs = [(1.0, &jp), (-1.0, &jm)];
    match family {
        Family::Forms => {
            for (s, j) in signs {
                let jv = mat_values(j);
                let omega = kahler_form(&at.g, j);
                let d_omega = exterior_derivative_2(&omega);
                let lhs = at.d_psi.add(&dc_omega(&d_omega, &jv).scale(s));
                let w_j = jv.tr_mul_vec(lee);
                let rhs =
                    wedge_1_2(lee, &at.psiv).sub(&wedge_1_2(&w_j, &mat_values(&omega)).scale(s));
                let mut r = Discrepancy::new();
                r.compare_forms(&lhs, &rhs);
                out.push(r.normalized());
            }
        }
        Family::Derivative => {
            let conn = at.weyl(lee);
            for (s, j) in signs {
                let jv = mat_values(j);
                let mut r = Discrepancy::new();
                for a in 0..m {
                    let da = conn.endo_derivative(j, a);
                    for b in 0..m {
                        let lhs = da.mul_vec(&e(b));
                        let ixy = interior_xy(&h3, &e(a), &e(b));
                        let t1 = jv.tr_mul_vec(&ixy);
                        let t2 = interior_xy(&h3, &e(a), &jv.column(b));
                        let sum: Vec<f64> = t1.iter().zip(&t2).map(|(u, v)| u + v).collect();
                        let rhs = vscale(&(-0.5 * s), &at.ginv.mul_vec(&sum));
                        r.compare_slices(&lhs, &rhs);
                    }
                }
                out.push(r.normalized());
            }
        }
        Family::Parallel => {
            let base = at.weyl(lee);
            for (s, j) in signs {
                let conn = base.with_torsion(&h3, &at.ginv, s);
                let mut r = Discrepancy::new();
                for a in 0..m {
                    r.zero(
                        &conn
                            .endo_derivative(j, a)
                            .iter()
                            .copied()
                            .collect::<Vec<_>>(),
                    );
                }
                out.push(r.normalized());
            }
            let mut r = Discrepancy::new();
            for (_, j) in signs {
                let jv = mat_values(j);
                r.compare_forms(&h3, &j_type_operator(&h3, &jv));
            }
            out.push(r.normalized());
        }
    }
    Ok(out)
}

fn criterion_names(prefix: &str, family: Family) -> Vec<String> {
    let mut names = vec!["nj.plus".to_string(), "nj.minus".to_string()];
    names.push(format!("{prefix}.plus"));
    names.push(format!("{prefix}.minus"));
    if let Family::Parallel = family {
        names.push(format!("{prefix}.type30"));
    }
    names
}

fn run_kahler(
    h: &GHermitian,
    suite: &str,
    prefix: &str,
    family: Family,
    lee: Option<&LeeForm>,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let names = criterion_names(prefix, family);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let m = h.dim();
    run_pointwise(suite, &refs, input, |p| {
        let w = match lee {
            Some(l) => l.form.values(p)?,
            None => vec![0.0; m],
        };
        kahler_residuals(h, family, &w, p)
    })
}

/// One of the three generalized Kähler criteria, together with the
/// integrability residuals of `J_+` and `J_-`.
pub fn check_gk(
    h: &GHermitian,
    criterion: GkCriterion,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let family = match criterion {
        GkCriterion::Galt1 => Family::Forms,
        GkCriterion::Crf2 => Family::Derivative,
        GkCriterion::Bismut3 => Family::Parallel,
    };
    run_kahler(h, "gk", criterion.name(), family, None, input)
}

/// One of the three conformal generalized Kähler criteria for a Lee form.
pub fn check_conf_gk(
    h: &GHermitian,
    lee: &LeeForm,
    criterion: ConfGkCriterion,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let family = match criterion {
        ConfGkCriterion::Form14 => Family::Forms,
        ConfGkCriterion::Weyl16 => Family::Derivative,
        ConfGkCriterion::WBismut17 => Family::Parallel,
    };
    run_kahler(h, "conf-gk", criterion.name(), family, Some(lee), input)
}

/// Data of an almost contact metric structure on `N`, with expressions in
/// the coordinates `x1..xm` of `N`.
#[derive(Clone, Debug)]
pub struct AlmostContact {
    pub f: Endomorphism,
    pub z: ComponentVector,
    pub xi: ComponentVector,
}

/// Residual of `F^2 = -Id + xi (x) Z`, `xi(Z) = 1`, `F Z = 0` at a point.
pub fn almost_contact_residual(c: &AlmostContact, p: &[f64]) -> Result<f64> {
    let f = c.f.eval(p)?;
    let z = c.z.values(p)?;
    let xi = c.xi.values(p)?;
    let m = f.rows();
    let mut r = Discrepancy::new();
    let rhs = Mat::from_fn(m, m, |i, j| {
        (if i == j { -1.0 } else { 0.0 }) + z[i] * xi[j]
    });
    r.compare_mats(&f.matmul(&f), &rhs);
    r.compare(crate::linalg::dot(&xi, &z), 1.0);
    r.zero(&f.mul_vec(&z));
    Ok(r.raw())
}

/// Builds the product quadruple `(gamma_N + dt^2, psi + kappa ^ dt, J_+-)`
/// with `J_+- = F_+- + dt (x) Z_+- - xi_+- (x) d/dt` on `N x R`, where `t`
/// is the last coordinate of `chart`. Returns the structure and its Lee
/// form `-dt`.
#[allow(clippy::too_many_arguments)]
pub fn sasakian_product_quadruple(
    chart: Chart,
    plus: &AlmostContact,
    minus: &AlmostContact,
    gamma_n: &SymmetricTwoTensor,
    psi: &Antisymmetric,
    kappa: &ComponentVector,
    check_points: &[Vec<f64>],
    tol: f64,
) -> Result<(GHermitian, LeeForm)> {
    let m = gamma_n.dim();
    if chart.dim != m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "product chart must have dimension {}, got {}",
            m + 1,
            chart.dim
        )));
    }
    for c in [plus, minus] {
        for p in check_points {
            let r = almost_contact_residual(c, &p[..m])?;
            if !(r <= tol) {
                return Err(Error::AlgebraViolation(format!(
                    "almost contact residual {r:e} at {p:?}"
                )));
            }
        }
    }
    let gamma = SymmetricTwoTensor::from_upper(m + 1, |i, j| {
        if j < m {
            gamma_n.matrix()[(i, j)].clone()
        } else if i == m {
            Expression::constant(1.0)
        } else {
            Expression::zero()
        }
    });
    let psi_total = Antisymmetric::from_upper(m + 1, |i, j| {
        if j < m {
            psi.matrix()[(i, j)].clone()
        } else {
            kappa.components[i].clone()
        }
    });
    let assemble = |c: &AlmostContact| {
        Endomorphism::new(Mat::from_fn(m + 1, m + 1, |i, j| {
            if i < m && j < m {
                c.f.matrix()[(i, j)].clone()
            } else if i < m {
                c.z.components[i].clone()
            } else if j < m {
                -c.xi.components[j].clone()
            } else {
                Expression::zero()
            }
        }))
    };
    let jp = assemble(plus);
    let jm = assemble(minus);
    let mut dt = ComponentVector::zero(m + 1);
    dt.components[m] = Expression::constant(-1.0);
    Ok((
        GHermitian::from_quadruple(chart, gamma, psi_total, &jp, &jm),
        LeeForm::new(dt),
    ))
}

/// Round trip: rebuild `sharp_G` from `(gamma, psi)`
/// recovered at a point and compare with the stored metric.
pub fn sharp_g_roundtrip(h: &GHermitian, p: &[f64]) -> Result<f64> {
    let sg = sharp_g_matrix(&h.metric, p)?;
    let m = h.dim();
    // gamma^-1 is the upper right block; phi = gamma^-1 psi is the upper left.
    let gi = sg.block(0, m, m, m);
    let g = gi.inverse().ok_or(Error::SingularMetric)?;
    let psi = g.matmul(&sg.block(0, 0, m, m));
    let rebuilt = sharp_g_from(&g, &psi)?;
    let mut r = Discrepancy::new();
    r.compare_mats(&rebuilt, &sg);
    Ok(r.normalized())
}

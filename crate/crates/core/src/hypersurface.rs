//! Parametrized hypersurfaces of a Hermitian chart and the almost contact
//! metric structure they inherit.
//!
//! Parameter coordinates `u1..u_{m-1}` double as frame coordinates: the
//! tangent frame is `X_a = d r / d u_a`, obtained by symbolic
//! differentiation of the parametrization `r`, so every induced tensor is
//! a first-order jet in `u`.

use crate::check::{run_pointwise, CheckInput, CheckReport, Discrepancy};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::gcs::LeeForm;
use crate::geometry::{
    differentiate, exterior_derivative_2, lie_bracket, lie_derivative_endo_applied, mat_values,
    nijenhuis_endo, values, Chart, Endomorphism, SymmetricTwoTensor,
};
use crate::ghermitian::{dc_omega, j_pm_expressions, kahler_form, GHermitian};
use crate::jets::{Func, Jet, Ring, Scalar};
use crate::linalg::Mat;

/// Radial pairings smaller than this fall back to the frame orientation.
pub const RADIAL_THRESHOLD: f64 = 1e-6;

/// Smallest admissible ratio of extreme singular values of the frame.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Hypersurface {
    pub param: Vec<Expression>,
    pub chart: Chart,
    frame: Vec<Vec<Expression>>,
}

impl Hypersurface {
    pub fn new(param: Vec<Expression>, chart: Chart) -> Result<Self> {
        let m = param.len();
        if m < 2 || chart.dim + 1 != m {
            return Err(Error::DimensionMismatch(format!(
                "a parametrization with {m} components needs a parameter chart of dimension {}, got {}",
                m.saturating_sub(1),
                chart.dim
            )));
        }
        if let Some(e) = param.iter().find(|e| e.max_coord() > chart.dim) {
            return Err(Error::DimensionMismatch(format!(
                "parametrization component {e} uses more than {} parameters",
                chart.dim
            )));
        }
        let frame = (1..m)
            .map(|a| param.iter().map(|r| differentiate(r, a)).collect())
            .collect();
        Ok(Hypersurface {
            param,
            chart,
            frame,
        })
    }

    /// Round sphere of the given radius in `R^4` with angular coordinates,
    /// kept away from the coordinate singularities.
    pub fn sphere3(radius: f64) -> Self {
        let u = |i| Expression::coord(i);
        let cos = |e| Expression::apply(Func::Cos, e);
        let sin = |e| Expression::apply(Func::Sin, e);
        let r = Expression::constant(radius);
        let param = vec![
            r.clone() * cos(u(1)),
            r.clone() * sin(u(1)) * cos(u(2)),
            r.clone() * sin(u(1)) * sin(u(2)) * cos(u(3)),
            r * sin(u(1)) * sin(u(2)) * sin(u(3)),
        ];
        let chart = Chart::new(vec![(0.3, 2.8), (0.3, 2.8), (-3.0, 3.0)])
            .expect("valid sphere parameter box");
        Hypersurface::new(param, chart).expect("consistent sphere parametrization")
    }

    /// The hyperplane `x_k = c` (0-based `k`) in `R^m`, parametrized by the
    /// remaining coordinates over `[-1, 1]^{m-1}`.
    pub fn coordinate_plane(m: usize, k: usize, c: f64) -> Self {
        let mut next = 0;
        let param = (0..m)
            .map(|i| {
                if i == k {
                    Expression::constant(c)
                } else {
                    next += 1;
                    Expression::coord(next)
                }
            })
            .collect();
        let chart = Chart::cube(m - 1, -1.0, 1.0).expect("valid unit box");
        Hypersurface::new(param, chart).expect("consistent plane parametrization")
    }

    pub fn ambient_dim(&self) -> usize {
        self.param.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    /// Precomposition `u -> r(factor u)`, with the parameter box shrunk to
    /// cover the same piece of the hypersurface.
    pub fn reparametrized(&self, factor: f64) -> Result<Hypersurface> {
        let subs: Vec<Expression> = (1..=self.dim())
            .map(|i| Expression::constant(factor) * Expression::coord(i))
            .collect();
        let bounds = self
            .chart
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                let (a, b) = (lo / factor, hi / factor);
                (a.min(b), a.max(b))
            })
            .collect();
        Hypersurface::new(
            self.param.iter().map(|e| e.substitute(&subs)).collect(),
            Chart::new(bounds)?,
        )
    }

    /// An ambient expression composed with the parametrization.
    pub fn pull(&self, e: &Expression) -> Expression {
        e.substitute(&self.param)
    }

    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .param
            .iter()
            .map(|e| e.eval_f64(u))
            .collect::<Result<_, _>>()?)
    }

    /// `m x (m-1)` matrix whose columns are the frame vectors at `u`.
    pub fn frame_values(&self, u: &[f64]) -> Result<Mat<f64>> {
        let mut out = Mat::zeros(self.ambient_dim(), self.dim(), &0.0);
        for (a, xa) in self.frame.iter().enumerate() {
            for (i, e) in xa.iter().enumerate() {
                out[(i, a)] = e.eval_f64(u)?;
            }
        }
        Ok(out)
    }

    /// Frame vectors `X_a` in ambient components, as jets in `u`.
    pub fn frame_jets(&self, u: &[f64]) -> Result<Vec<Vec<Jet>>> {
        let seed = Jet::seed(u);
        let mut out = Vec::with_capacity(self.frame.len());
        for xa in &self.frame {
            out.push(
                xa.iter()
                    .map(|e| e.eval(&seed))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(out)
    }
}

/// A classical almost Hermitian pair `(gamma, J)` on the ambient chart.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientHermitian {
    pub gamma: SymmetricTwoTensor,
    pub j: Endomorphism,
}

impl AmbientHermitian {
    /// `(gamma, J_+)` for `sign > 0`, otherwise `(gamma, J_-)`.
    pub fn from_hermitian(h: &GHermitian, sign: f64) -> Self {
        let (jp, jm) = j_pm_expressions(h);
        AmbientHermitian {
            gamma: h.metric.gamma.clone(),
            j: if sign > 0.0 { jp } else { jm },
        }
    }
}

/// Modifiers of the induced structure, used for sign and negative-control
/// experiments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InducedOptions {
    pub flip_normal: bool,
    /// Added to `F` in frame coordinates; entries are expressions in `u`.
    pub perturbation: Option<Mat<Expression>>,
}

/// Ambient fields composed with the parametrization.
struct Pulled {
    gamma: Mat<Expression>,
    j: Mat<Expression>,
}

impl Pulled {
    fn new(hyp: &Hypersurface, amb: &AmbientHermitian) -> Result<Self> {
        let m = hyp.ambient_dim();
        if amb.gamma.dim() != m || amb.j.dim() != m {
            return Err(Error::DimensionMismatch(format!(
                "ambient structure has dimension {}, hypersurface lives in dimension {m}",
                amb.gamma.dim()
            )));
        }
        Ok(Pulled {
            gamma: amb.gamma.matrix().map(|e| hyp.pull(e)),
            j: amb.j.matrix().map(|e| hyp.pull(e)),
        })
    }
}

/// The induced structure at one parameter point, as jets in `u`.
#[derive(Clone, Debug)]
pub struct Induced {
    pub point: Vec<f64>,
    /// `m x (m-1)` matrix whose columns are the frame vectors.
    pub frame: Mat<Jet>,
    pub gamma: Mat<Jet>,
    pub j: Mat<Jet>,
    pub normal: Vec<Jet>,
    pub z_ambient: Vec<Jet>,
    /// `Z` in frame coordinates.
    pub z: Vec<Jet>,
    pub xi: Vec<Jet>,
    /// `F` in frame coordinates.
    pub f: Mat<Jet>,
    pub gram: Mat<Jet>,
    /// `Xi_{ab} = gamma(F X_a, X_b)`.
    pub fundamental: Mat<Jet>,
}

fn check_rank(frame: &Mat<Jet>) -> Result<()> {
    let d = frame.cols();
    let svd = mat_values(frame).to_nalgebra().svd(false, false);
    let s = &svd.singular_values;
    let (lo, hi) = (s.min(), s.max());
    if !(hi > 0.0) || lo / hi < RANK_TOLERANCE {
        return Err(Error::RankDeficient { expected: d });
    }
    Ok(())
}

fn induced_at(
    hyp: &Hypersurface,
    pulled: &Pulled,
    opts: &InducedOptions,
    u: &[f64],
) -> Result<Induced> {
    let m = hyp.ambient_dim();
    let d = hyp.dim();
    let seed = Jet::seed(u);
    let proto = Jet::constant(0.0, d);
    let columns = hyp.frame_jets(u)?;
    let frame = Mat::from_fn(m, d, |i, a| columns[a][i].clone());
    check_rank(&frame)?;
    let point = hyp.point(u)?;
    let gamma = pulled.gamma.map(|e| e.eval(&seed)).try_map()?;
    let j = pulled.j.map(|e| e.eval(&seed)).try_map()?;
    let ginv = gamma.inverse().ok_or(Error::SingularMetric)?;

    let normal_covector: Vec<Jet> = (0..m)
        .map(|i| {
            let mut aug = Mat::zeros(m, m, &proto);
            aug.set_block(0, 0, &frame);
            aug[(i, d)] = proto.one_like();
            aug.det_cofactor()
        })
        .collect();
    let raised = ginv.mul_vec(&normal_covector);
    let norm2 = crate::linalg::dot(&normal_covector, &raised);
    let norm = norm2.try_apply(Func::Sqrt)?;
    let mut normal: Vec<Jet> = raised
        .into_iter()
        .map(|v| v.try_div(norm.clone()))
        .collect::<Result<_, _>>()?;
    let gv = mat_values(&gamma);
    let radial: f64 = crate::linalg::dot(&gv.mul_vec(&values(&normal)), &point);
    let mut flip = radial < -RADIAL_THRESHOLD;
    if opts.flip_normal {
        flip = !flip;
    }
    if flip {
        normal = normal.into_iter().map(|v| -v).collect();
    }

    let z_ambient: Vec<Jet> = j.mul_vec(&normal).into_iter().map(|v| -v).collect();
    let xt_gamma = frame.transpose().matmul(&gamma);
    let gram = xt_gamma.matmul(&frame);
    let gram_inv = gram.inverse().ok_or(Error::RankDeficient { expected: d })?;
    let xi = xt_gamma.mul_vec(&z_ambient);
    let z = gram_inv.mul_vec(&xi);
    let nu_xi = Mat::from_fn(m, d, |i, b| normal[i].clone() * xi[b].clone());
    let mut f = gram_inv.matmul(&xt_gamma.matmul(&j.matmul(&frame).sub(&nu_xi)));
    if let Some(pert) = &opts.perturbation {
        f = f.add(&pert.map(|e| e.eval(&seed)).try_map()?);
    }
    let fundamental = f.transpose().matmul(&gram);
    Ok(Induced {
        point,
        frame,
        gamma,
        j,
        normal,
        z_ambient,
        z,
        xi,
        f,
        gram,
        fundamental,
    })
}

trait TryMap<T> {
    fn try_map(self) -> Result<Mat<T>>;
}

impl<T: Clone, E: Clone> TryMap<T> for Mat<std::result::Result<T, E>>
where
    Error: From<E>,
{
    fn try_map(self) -> Result<Mat<T>> {
        let (r, c) = (self.rows(), self.cols());
        let mut vals = Vec::with_capacity(r * c);
        for v in self.iter() {
            vals.push(v.clone()?);
        }
        Ok(Mat::from_fn(r, c, |i, j| vals[i * c + j].clone()))
    }
}

/// Tangent frame values and unit normal at a parameter point.
pub fn tangent_frame_normal(
    hyp: &Hypersurface,
    gamma: &SymmetricTwoTensor,
    u: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let amb = AmbientHermitian {
        gamma: gamma.clone(),
        j: Endomorphism::zero(hyp.ambient_dim()),
    };
    let ind = induced_at(hyp, &Pulled::new(hyp, &amb)?, &InducedOptions::default(), u)?;
    let fv = mat_values(&ind.frame);
    let frame = (0..hyp.dim()).map(|a| fv.column(a)).collect();
    Ok((frame, values(&ind.normal)))
}

/// `(F, Z, xi)` values at a parameter point, in frame coordinates, with
/// `Z` also returned in ambient components.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactValues {
    pub f: Mat<f64>,
    pub z: Vec<f64>,
    pub z_ambient: Vec<f64>,
    pub xi: Vec<f64>,
    pub fundamental: Mat<f64>,
}

pub fn induced_contact(
    hyp: &Hypersurface,
    amb: &AmbientHermitian,
    opts: &InducedOptions,
    u: &[f64],
) -> Result<ContactValues> {
    let ind = induced_at(hyp, &Pulled::new(hyp, amb)?, opts, u)?;
    Ok(ContactValues {
        f: mat_values(&ind.f),
        z: values(&ind.z),
        z_ambient: values(&ind.z_ambient),
        xi: values(&ind.xi),
        fundamental: mat_values(&ind.fundamental),
    })
}

/// `max_{a,b} |(i* omega)_{ab} - Xi_{ab}|` with `omega = gamma(J., .)`.
pub fn pullback_check(hyp: &Hypersurface, amb: &AmbientHermitian, u: &[f64]) -> Result<f64> {
    let ind = induced_at(hyp, &Pulled::new(hyp, amb)?, &InducedOptions::default(), u)?;
    Ok(pullback_residual(&ind))
}

fn pullback_residual(ind: &Induced) -> f64 {
    let x = mat_values(&ind.frame);
    let omega = kahler_form(&mat_values(&ind.gamma), &mat_values(&ind.j));
    let pulled = x.transpose().matmul(&omega).matmul(&x);
    pulled.sub(&mat_values(&ind.fundamental)).max_abs()
}

pub const CONTACT: [&str; 4] = [
    "contact.algebra",
    "contact.cubic",
    "fundamental.pullback",
    "fundamental.antisymmetry",
];

/// Almost contact identities of the induced structure and the relation of
/// its fundamental form to the ambient Kähler form.
pub fn check_contact_algebra(
    hyp: &Hypersurface,
    amb: &AmbientHermitian,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let pulled = Pulled::new(hyp, amb)?;
    let opts = InducedOptions::default();
    let d = hyp.dim();
    run_pointwise("hypersurface", &CONTACT, input, |u| {
        let ind = induced_at(hyp, &pulled, &opts, u)?;
        let f = mat_values(&ind.f);
        let z = values(&ind.z);
        let xi = values(&ind.xi);
        let mut alg = Discrepancy::new();
        let rhs = Mat::from_fn(d, d, |a, b| {
            (if a == b { -1.0 } else { 0.0 }) + z[a] * xi[b]
        });
        alg.compare_mats(&f.matmul(&f), &rhs);
        alg.compare(crate::linalg::dot(&xi, &z), 1.0);
        alg.zero(&f.mul_vec(&z));
        let mut cubic = Discrepancy::new();
        cubic.compare_mats(&f.matmul(&f).matmul(&f), &f.neg());
        let xi_form = mat_values(&ind.fundamental);
        let mut anti = Discrepancy::new();
        anti.compare_mats(&xi_form, &xi_form.transpose().neg());
        Ok(vec![
            alg.normalized(),
            cubic.normalized(),
            pullback_residual(&ind),
            anti.raw(),
        ])
    })
}

pub const CRF: [&str; 4] = [
    "crf.condsupl1",
    "crf.condsupl2",
    "crf.cr_closure",
    "crf.cr_bracket",
];

/// Supplementary conditions `F o (L_Z F) o F = 0`,
/// `L_Z F = (xi o L_Z F) (x) Z`, and the real form of the CR condition on
/// `D = ker xi`: for `W, V` in `D` with `R = [W, V] - [FW, FV]`,
/// `xi(R) = 0` and `[FW, V] + [W, FV] = F R`.
pub fn check_crf(
    hyp: &Hypersurface,
    amb: &AmbientHermitian,
    opts: &InducedOptions,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let pulled = Pulled::new(hyp, amb)?;
    let d = hyp.dim();
    run_pointwise("hypersurface", &CRF, input, |u| {
        let ind = induced_at(hyp, &pulled, opts, u)?;
        let basis: Vec<Vec<Jet>> = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| Jet::constant(if a == b { 1.0 } else { 0.0 }, d))
                    .collect()
            })
            .collect();
        let cols: Vec<Vec<f64>> = basis
            .iter()
            .map(|e| lie_derivative_endo_applied(&ind.z, &ind.f, e))
            .collect();
        let lzf = Mat::from_fn(d, d, |a, b| cols[b][a]);
        let f = mat_values(&ind.f);
        let z = values(&ind.z);
        let xi = values(&ind.xi);

        let mut s1 = Discrepancy::new();
        s1.zero(
            &f.matmul(&lzf)
                .matmul(&f)
                .iter()
                .copied()
                .collect::<Vec<_>>(),
        );
        let xi_l = lzf.tr_mul_vec(&xi);
        let mut s2 = Discrepancy::new();
        s2.compare_mats(&lzf, &Mat::from_fn(d, d, |a, b| z[a] * xi_l[b]));

        let w: Vec<Vec<Jet>> = (0..d)
            .map(|a| {
                (0..d)
                    .map(|c| basis[a][c].clone() - ind.xi[a].clone() * ind.z[c].clone())
                    .collect()
            })
            .collect();
        let fw: Vec<Vec<Jet>> = w.iter().map(|v| ind.f.mul_vec(v)).collect();
        let mut closure = Discrepancy::new();
        let mut bracket = Discrepancy::new();
        for a in 0..d {
            for b in a + 1..d {
                let r =
                    crate::linalg::vsub(&lie_bracket(&w[a], &w[b]), &lie_bracket(&fw[a], &fw[b]));
                closure.compare(crate::linalg::dot(&xi, &r), 0.0);
                let lhs =
                    crate::linalg::vadd(&lie_bracket(&fw[a], &w[b]), &lie_bracket(&w[a], &fw[b]));
                bracket.compare_slices(&lhs, &f.mul_vec(&r));
            }
        }
        Ok(vec![
            s1.normalized(),
            s2.normalized(),
            closure.normalized(),
            bracket.normalized(),
        ])
    })
}

fn lee_on_frame(lee: &LeeForm, ind_point: &[f64], frame: &Mat<f64>) -> Result<Vec<f64>> {
    let w = lee.form.values(ind_point)?;
    Ok(frame.tr_mul_vec(&w))
}

/// `max_a |w(X_a)|`, i.e. the size of the pullback of the Lee form.
pub fn check_lee_hypersurface(
    hyp: &Hypersurface,
    lee: &LeeForm,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    check_ambient_dim(hyp, lee.form.dim())?;
    run_pointwise("hypersurface", &["lee.hypersurface"], input, |u| {
        let frame = hyp.frame_values(u)?;
        let pulled = lee_on_frame(lee, &hyp.point(u)?, &frame)?;
        let mut r = Discrepancy::new();
        r.zero(&pulled);
        Ok(vec![r.raw()])
    })
}

fn check_ambient_dim(hyp: &Hypersurface, m: usize) -> Result<()> {
    if m != hyp.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient data has dimension {m}, hypersurface lives in dimension {}",
            hyp.ambient_dim()
        )));
    }
    Ok(())
}

pub const LEE1: [&str; 3] = ["lee.hypersurface", "lee1.plus", "lee1.minus"];

/// `w(nu) Xi_+- = -+ i(Z_+-) i*(d psi +- d^C omega_+-)` for both signs, on
/// frame pairs, together with the Lee hypersurface condition.
pub fn check_lee1(
    hyp: &Hypersurface,
    h: &GHermitian,
    lee: &LeeForm,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    check_ambient_dim(hyp, h.dim())?;
    check_ambient_dim(hyp, lee.form.dim())?;
    let sides = [
        (1.0, AmbientHermitian::from_hermitian(h, 1.0)),
        (-1.0, AmbientHermitian::from_hermitian(h, -1.0)),
    ];
    let pulled: Vec<Pulled> = sides
        .iter()
        .map(|(_, a)| Pulled::new(hyp, a))
        .collect::<Result<_>>()?;
    let opts = InducedOptions::default();
    let d = hyp.dim();
    run_pointwise("hypersurface", &LEE1, input, |u| {
        let mut out = Vec::with_capacity(3);
        let mut lee_tangent = Discrepancy::new();
        let mut residuals = Vec::with_capacity(2);
        for ((sign, amb), pl) in sides.iter().zip(&pulled) {
            let ind = induced_at(hyp, pl, &opts, u)?;
            let x = &ind.point;
            let frame = mat_values(&ind.frame);
            let w = lee.form.values(x)?;
            lee_tangent.zero(&frame.tr_mul_vec(&w));
            let w_nu = crate::linalg::dot(&w, &values(&ind.normal));

            let g = amb.gamma.jets(x)?;
            let j = amb.j.jets(x)?;
            let d_omega = exterior_derivative_2(&kahler_form(&g, &j));
            let d_psi = exterior_derivative_2(&h.metric.psi.jets(x)?);
            let total = d_psi.add(&dc_omega(&d_omega, &mat_values(&j)).scale(*sign));
            let z = values(&ind.z_ambient);
            let xi_form = mat_values(&ind.fundamental);
            let mut r = Discrepancy::new();
            for a in 0..d {
                for b in a + 1..d {
                    let rhs = -sign * total.contract(&z, &frame.column(a), &frame.column(b));
                    r.compare(w_nu * xi_form[(a, b)], rhs);
                }
            }
            residuals.push(r.normalized());
        }
        out.push(lee_tangent.raw());
        out.extend(residuals);
        Ok(out)
    })
}

pub const CLOSED_FUNDAMENTAL: [&str; 2] = ["ambient.kahler", "fundamental.closed"];

/// `max |d Xi|` in parameter coordinates, with the ambient Kähler
/// condition (`d omega = 0`, `N_J = 0` at the image point) reported
/// alongside.
pub fn check_closed_fundamental(
    hyp: &Hypersurface,
    amb: &AmbientHermitian,
    input: &CheckInput<'_>,
) -> Result<CheckReport> {
    let pulled = Pulled::new(hyp, amb)?;
    let opts = InducedOptions::default();
    let m = hyp.ambient_dim();
    run_pointwise("hypersurface", &CLOSED_FUNDAMENTAL, input, |u| {
        let ind = induced_at(hyp, &pulled, &opts, u)?;
        let x = &ind.point;
        let g = amb.gamma.jets(x)?;
        let j = amb.j.jets(x)?;
        let mut ambient = Discrepancy::new();
        ambient.zero(exterior_derivative_2(&kahler_form(&g, &j)).as_slice());
        let basis: Vec<Vec<Jet>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| Jet::constant(if a == b { 1.0 } else { 0.0 }, m))
                    .collect()
            })
            .collect();
        for a in 0..m {
            for b in a + 1..m {
                ambient.zero(&nijenhuis_endo(&j, &basis[a], &basis[b]));
            }
        }
        let d_xi = exterior_derivative_2(&ind.fundamental);
        Ok(vec![ambient.normalized(), d_xi.max_abs()])
    })
}

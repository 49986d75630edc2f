//! Charts, tensor fields with expression components, and the first-order
//! tensor calculus built on them.
//!
//! Fields are stored as expressions. At a point they are evaluated to jets,
//! and every differential operator below reads only the values and first
//! partial derivatives carried by those jets. Composite fields such as `AX`
//! are formed by multiplying jets, so their derivatives come from the
//! product rule without second-order information.
//!
//! Index conventions (0-based in code): an endomorphism matrix holds
//! `A[i][j] = A^i_j`, a bivector holds `pi[i][j] = pi^{ij}`, a 2-form holds
//! `sigma[i][j] = sigma_{ij}`. With these, `sharp_pi(alpha) = pi^T alpha`
//! so that `(sharp_pi alpha)(beta) = pi(alpha, beta)`, and
//! `flat_sigma(X) = sigma^T X` so that `(flat_sigma X)(Y) = sigma(X, Y)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::jets::{DomainError, Jet, Scalar};
use crate::linalg::Mat;

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub dim: usize,
    pub bounds: Vec<(f64, f64)>,
    /// Points where this evaluates to a value `<= 0` are excluded.
    pub exclusion: Option<Expression>,
}

impl Chart {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::DimensionMismatch(
                "chart needs at least one coordinate".into(),
            ));
        }
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate x{} has empty range [{lo}, {hi}]",
                    i + 1
                )));
            }
        }
        Ok(Chart {
            dim: bounds.len(),
            bounds,
            exclusion: None,
        })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Chart::new(vec![(lo, hi); dim])
    }

    pub fn with_exclusion(mut self, exclusion: Expression) -> Self {
        self.exclusion = Some(exclusion);
        self
    }

    /// The annulus `r_min <= |x| <= r_max` inside the cube `[-r_max, r_max]^dim`.
    pub fn annulus(dim: usize, r_min: f64, r_max: f64) -> Result<Self> {
        let inner = Expression::Norm2 - Expression::constant(r_min * r_min);
        let outer = Expression::constant(r_max * r_max) - Expression::Norm2;
        Ok(Chart::cube(dim, -r_max, r_max)?.with_exclusion(inner * outer))
    }

    pub fn in_box(&self, p: &[f64]) -> bool {
        p.len() == self.dim
            && p.iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// True when `p` is inside the box and not excluded.
    pub fn admits(&self, p: &[f64]) -> bool {
        if !self.in_box(p) {
            return false;
        }
        match &self.exclusion {
            None => true,
            Some(e) => matches!(e.eval_f64(p), Ok(v) if v > 0.0),
        }
    }
}

fn eval_vec<T: Scalar>(comps: &[Expression], x: &[T]) -> Result<Vec<T>, DomainError> {
    comps.iter().map(|e| e.eval(x)).collect()
}

fn eval_mat<T: Scalar>(comps: &Mat<Expression>, x: &[T]) -> Result<Mat<T>, DomainError> {
    let mut data = Vec::with_capacity(comps.rows() * comps.cols());
    for e in comps.iter() {
        data.push(e.eval(x)?);
    }
    Ok(Mat::from_fn(comps.rows(), comps.cols(), |i, j| {
        data[i * comps.cols() + j].clone()
    }))
}

/// Components `X^i` of a vector field, or `alpha_i` of a 1-form.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentVector {
    pub components: Vec<Expression>,
}

pub type VectorField = ComponentVector;
pub type OneForm = ComponentVector;

impl ComponentVector {
    pub fn new(components: Vec<Expression>) -> Self {
        ComponentVector { components }
    }

    pub fn zero(m: usize) -> Self {
        ComponentVector::new(vec![Expression::zero(); m])
    }

    /// The coordinate field `d/dx^{i+1}` or coordinate form `dx^{i+1}`.
    pub fn basis(m: usize, i: usize) -> Self {
        let mut v = Self::zero(m);
        v.components[i] = Expression::constant(1.0);
        v
    }

    /// Differential of a scalar expression, component by component.
    pub fn gradient_of(f: &Expression, m: usize) -> Self {
        ComponentVector::new((1..=m).map(|i| differentiate(f, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>, DomainError> {
        eval_vec(&self.components, x)
    }

    pub fn jets(&self, p: &[f64]) -> Result<Vec<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>, DomainError> {
        self.eval(p)
    }

    pub fn scaled(&self, factor: &Expression) -> Self {
        ComponentVector::new(
            self.components
                .iter()
                .map(|c| factor.clone() * c.clone())
                .collect(),
        )
    }
}

/// Antisymmetric 2-tensor (bivector or 2-form). Antisymmetry is structural:
/// only the strict upper triangle is ever set.
#[derive(Clone, Debug, PartialEq)]
pub struct Antisymmetric {
    comps: Mat<Expression>,
}

pub type Bivector = Antisymmetric;
pub type TwoForm = Antisymmetric;

impl Antisymmetric {
    pub fn zero(m: usize) -> Self {
        Antisymmetric {
            comps: Mat::from_fn(m, m, |_, _| Expression::zero()),
        }
    }

    /// Builds from the strict upper triangle of `f(i, j)`, `i < j`.
    pub fn from_upper(m: usize, mut f: impl FnMut(usize, usize) -> Expression) -> Self {
        let mut out = Self::zero(m);
        for i in 0..m {
            for j in i + 1..m {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    /// Uses the strict upper triangle of `mat`; the rest is ignored.
    pub fn from_matrix_upper(mat: &Mat<Expression>) -> Self {
        Self::from_upper(mat.rows(), |i, j| mat[(i, j)].clone())
    }

    /// Sets the `(i, j)` component and its negated mirror. Panics if `i == j`.
    pub fn set(&mut self, i: usize, j: usize, e: Expression) {
        assert_ne!(i, j, "diagonal of an antisymmetric tensor is zero");
        self.comps[(j, i)] = -e.clone();
        self.comps[(i, j)] = e;
    }

    pub fn dim(&self) -> usize {
        self.comps.rows()
    }

    pub fn matrix(&self) -> &Mat<Expression> {
        &self.comps
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Mat<T>, DomainError> {
        eval_mat(&self.comps, x)
    }

    pub fn jets(&self, p: &[f64]) -> Result<Mat<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }

    pub fn scaled(&self, factor: &Expression) -> Self {
        Self::from_upper(self.dim(), |i, j| {
            factor.clone() * self.comps[(i, j)].clone()
        })
    }
}

/// Symmetric 2-tensor; the diagonal and upper triangle define it.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTwoTensor {
    comps: Mat<Expression>,
}

impl SymmetricTwoTensor {
    pub fn zero(m: usize) -> Self {
        SymmetricTwoTensor {
            comps: Mat::from_fn(m, m, |_, _| Expression::zero()),
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut out = Self::zero(m);
        for i in 0..m {
            out.set(i, i, Expression::constant(1.0));
        }
        out
    }

    pub fn from_upper(m: usize, mut f: impl FnMut(usize, usize) -> Expression) -> Self {
        let mut out = Self::zero(m);
        for i in 0..m {
            for j in i..m {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expression) {
        self.comps[(j, i)] = e.clone();
        self.comps[(i, j)] = e;
    }

    pub fn dim(&self) -> usize {
        self.comps.rows()
    }

    pub fn matrix(&self) -> &Mat<Expression> {
        &self.comps
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Mat<T>, DomainError> {
        eval_mat(&self.comps, x)
    }

    pub fn jets(&self, p: &[f64]) -> Result<Mat<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }

    pub fn scaled(&self, factor: &Expression) -> Self {
        Self::from_upper(self.dim(), |i, j| {
            factor.clone() * self.comps[(i, j)].clone()
        })
    }
}

/// A (1,1)-tensor with `A[i][j] = A^i_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endomorphism {
    comps: Mat<Expression>,
}

impl Endomorphism {
    pub fn new(comps: Mat<Expression>) -> Self {
        assert_eq!(comps.rows(), comps.cols(), "endomorphism must be square");
        Endomorphism { comps }
    }

    pub fn zero(m: usize) -> Self {
        Self::new(Mat::from_fn(m, m, |_, _| Expression::zero()))
    }

    pub fn identity(m: usize) -> Self {
        Self::new(Mat::from_fn(m, m, |i, j| {
            Expression::constant(if i == j { 1.0 } else { 0.0 })
        }))
    }

    pub fn from_constants(rows: &[Vec<f64>]) -> Self {
        let m = rows.len();
        Self::new(Mat::from_fn(m, m, |i, j| Expression::constant(rows[i][j])))
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expression) {
        self.comps[(i, j)] = e;
    }

    pub fn dim(&self) -> usize {
        self.comps.rows()
    }

    pub fn matrix(&self) -> &Mat<Expression> {
        &self.comps
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Mat<T>, DomainError> {
        eval_mat(&self.comps, x)
    }

    pub fn jets(&self, p: &[f64]) -> Result<Mat<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }
}

/// Partial derivative of an expression with respect to `x_i` (1-based),
/// built with the constant-folding constructors.
pub fn differentiate(e: &Expression, i: usize) -> Expression {
    use crate::jets::Func;
    use Expression as E;
    match e {
        E::Const(_) => E::zero(),
        E::Coord(k) => E::constant(if *k == i { 1.0 } else { 0.0 }),
        E::Norm2 => E::constant(2.0) * E::Coord(i),
        E::Neg(a) => -differentiate(a, i),
        E::Add(a, b) => differentiate(a, i) + differentiate(b, i),
        E::Sub(a, b) => differentiate(a, i) - differentiate(b, i),
        E::Mul(a, b) => differentiate(a, i) * (**b).clone() + (**a).clone() * differentiate(b, i),
        E::Div(a, b) => {
            (differentiate(a, i) * (**b).clone() - (**a).clone() * differentiate(b, i))
                / (**b).clone().powi(2)
        }
        E::PowInt(a, n) => E::constant(*n as f64) * (**a).clone().powi(n - 1) * differentiate(a, i),
        E::Apply(f, a) => {
            let inner = differentiate(a, i);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => E::constant(1.0) / (**a).clone(),
                Func::Sin => E::apply(Func::Cos, (**a).clone()),
                Func::Cos => -E::apply(Func::Sin, (**a).clone()),
                Func::Sqrt => E::constant(0.5) / e.clone(),
            };
            outer * inner
        }
    }
}

/// Fully antisymmetric-capable rank-3 covariant (or contravariant) array.
#[derive(Clone, Debug, PartialEq)]
pub struct Form3 {
    m: usize,
    data: Vec<f64>,
}

impl Form3 {
    pub fn zeros(m: usize) -> Self {
        Form3 {
            m,
            data: vec![0.0; m * m * m],
        }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    data.push(f(i, j, k));
                }
            }
        }
        Form3 { m, data }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.m + j) * self.m + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `phi(X, Y, Z)` for vector values.
    pub fn contract(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let m = self.m;
        let mut s = 0.0;
        for i in 0..m {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    s += self.get(i, j, k) * x[i] * y[j] * z[k];
                }
            }
        }
        s
    }

    /// Pulls back along a linear map whose columns are the images of basis
    /// vectors: `out(a, b, c) = phi(M e_a, M e_b, M e_c)`.
    pub fn pullback(&self, columns: &[Vec<f64>]) -> Form3 {
        let n = columns.len();
        Form3::from_fn(n, |a, b, c| {
            self.contract(&columns[a], &columns[b], &columns[c])
        })
    }

    pub fn add(&self, other: &Form3) -> Form3 {
        Form3::from_fn(self.m, |i, j, k| self.get(i, j, k) + other.get(i, j, k))
    }

    pub fn sub(&self, other: &Form3) -> Form3 {
        Form3::from_fn(self.m, |i, j, k| self.get(i, j, k) - other.get(i, j, k))
    }

    pub fn scale(&self, c: f64) -> Form3 {
        Form3::from_fn(self.m, |i, j, k| c * self.get(i, j, k))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.value).collect()
}

pub fn mat_values(a: &Mat<Jet>) -> Mat<f64> {
    a.map(|j| j.value)
}

pub fn constant_jets(v: &[f64], m: usize) -> Vec<Jet> {
    v.iter().map(|&c| Jet::constant(c, m)).collect()
}

/// Directional derivative `X(f)` of a scalar jet along a vector value.
pub fn directional(x: &[f64], f: &Jet) -> f64 {
    x.iter().zip(&f.grad).map(|(a, b)| a * b).sum()
}

/// `[X, Y]^i = X^l d_l Y^i - Y^l d_l X^i`.
pub fn lie_bracket(x: &[Jet], y: &[Jet]) -> Vec<f64> {
    let xv = values(x);
    let yv = values(y);
    (0..x.len())
        .map(|i| directional(&xv, &y[i]) - directional(&yv, &x[i]))
        .collect()
}

/// `(d alpha)_{ij} = d_i alpha_j - d_j alpha_i`.
pub fn exterior_derivative_1(alpha: &[Jet]) -> Mat<f64> {
    let m = alpha.len();
    Mat::from_fn(m, m, |i, j| alpha[j].grad[i] - alpha[i].grad[j])
}

/// `(d sigma)_{ijk} = d_i sigma_{jk} + d_j sigma_{ki} + d_k sigma_{ij}`.
pub fn exterior_derivative_2(sigma: &Mat<Jet>) -> Form3 {
    let m = sigma.rows();
    Form3::from_fn(m, |i, j, k| {
        sigma[(j, k)].grad[i] + sigma[(k, i)].grad[j] + sigma[(i, j)].grad[k]
    })
}

/// `(L_X alpha)_i = X^l d_l alpha_i + alpha_l d_i X^l`.
pub fn lie_derivative_oneform(x: &[Jet], alpha: &[Jet]) -> Vec<f64> {
    let xv = values(x);
    (0..x.len())
        .map(|i| {
            directional(&xv, &alpha[i])
                + alpha
                    .iter()
                    .zip(x)
                    .map(|(a, xl)| a.value * xl.grad[i])
                    .sum::<f64>()
        })
        .collect()
}

/// `(L_Z A)(X) = [Z, AX] - A[Z, X]`.
pub fn lie_derivative_endo_applied(z: &[Jet], a: &Mat<Jet>, x: &[Jet]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    let av = mat_values(a);
    let zx = lie_bracket(z, x);
    crate::linalg::vsub(&lie_bracket(z, &ax), &av.mul_vec(&zx))
}

pub fn sharp_pi<T: crate::jets::Ring>(pi: &Mat<T>, alpha: &[T]) -> Vec<T> {
    pi.tr_mul_vec(alpha)
}

pub fn flat_sigma<T: crate::jets::Ring>(sigma: &Mat<T>, x: &[T]) -> Vec<T> {
    sigma.tr_mul_vec(x)
}

pub fn flat_gamma<T: crate::jets::Ring>(gamma: &Mat<T>, x: &[T]) -> Vec<T> {
    gamma.mul_vec(x)
}

pub fn sharp_gamma(gamma: &Mat<f64>, alpha: &[f64]) -> Result<Vec<f64>> {
    gamma.solve(alpha).ok_or(Error::SingularMetric)
}

/// `alpha o A`, the 1-form `X -> alpha(AX)`.
pub fn compose_form<T: crate::jets::Ring>(alpha: &[T], a: &Mat<T>) -> Vec<T> {
    a.tr_mul_vec(alpha)
}

/// `[pi, pi]^{ijk} = 2 sum_l (pi^{li} d_l pi^{jk} + pi^{lj} d_l pi^{ki} + pi^{lk} d_l pi^{ij})`.
pub fn schouten_square(pi: &Mat<Jet>) -> Form3 {
    let m = pi.rows();
    Form3::from_fn(m, |i, j, k| {
        let mut s = 0.0;
        for l in 0..m {
            s += pi[(l, i)].value * pi[(j, k)].grad[l]
                + pi[(l, j)].value * pi[(k, i)].grad[l]
                + pi[(l, k)].value * pi[(i, j)].grad[l];
        }
        2.0 * s
    })
}

/// `(a ^ b)(X, Y, Z) = a(X) b(Y, Z) - a(Y) b(X, Z) + a(Z) b(X, Y)` for a
/// 1-form and a 2-form, or dually a vector and a bivector.
pub fn wedge_1_2(a: &[f64], b: &Mat<f64>) -> Form3 {
    Form3::from_fn(a.len(), |i, j, k| {
        a[i] * b[(j, k)] - a[j] * b[(i, k)] + a[k] * b[(i, j)]
    })
}

/// `(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)`.
pub fn wedge_1_1(a: &[f64], b: &[f64]) -> Mat<f64> {
    Mat::from_fn(a.len(), a.len(), |i, j| a[i] * b[j] - a[j] * b[i])
}

/// `(i(X ^ Y) phi)(Z) = phi(X, Y, Z)`.
pub fn interior_xy(phi: &Form3, x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = phi.dim();
    (0..m)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    s += phi.get(i, j, k) * x[i] * y[j];
                }
            }
            s
        })
        .collect()
}

/// `N_A(X, Y) = [AX, AY] - A[X, AY] - A[AX, Y] + A^2[X, Y]`.
pub fn nijenhuis_endo(a: &Mat<Jet>, x: &[Jet], y: &[Jet]) -> Vec<f64> {
    let av = mat_values(a);
    let ax = a.mul_vec(x);
    let ay = a.mul_vec(y);
    let t1 = lie_bracket(&ax, &ay);
    let t2 = av.mul_vec(&lie_bracket(x, &ay));
    let t3 = av.mul_vec(&lie_bracket(&ax, y));
    let t4 = av.mul_vec(&av.mul_vec(&lie_bracket(x, y)));
    (0..x.len())
        .map(|i| t1[i] - t2[i] - t3[i] + t4[i])
        .collect()
}

/// `R(alpha, X) = sharp_pi(L_X(alpha o A) - L_{AX} alpha) - (L_{sharp_pi alpha} A)(X)`.
pub fn schouten_concomitant(pi: &Mat<Jet>, a: &Mat<Jet>, alpha: &[Jet], x: &[Jet]) -> Vec<f64> {
    let alpha_a = compose_form(alpha, a);
    let ax = a.mul_vec(x);
    let inner = crate::linalg::vsub(
        &lie_derivative_oneform(x, &alpha_a),
        &lie_derivative_oneform(&ax, alpha),
    );
    let first = sharp_pi(&mat_values(pi), &inner);
    let z = sharp_pi(pi, alpha);
    crate::linalg::vsub(&first, &lie_derivative_endo_applied(&z, a, x))
}

/// Components of the associated form `sigma_A(X, Y) = sigma(AX, Y)`,
/// i.e. `(sigma_A)_{ij} = A^l_i sigma_{lj}`.
pub fn sigma_assoc<T: crate::jets::Ring>(sigma: &Mat<T>, a: &Mat<T>) -> Mat<T> {
    a.transpose().matmul(sigma)
}

/// A random polynomial of degree at most two with coefficients in `[-1, 1]`.
pub fn random_polynomial(rng: &mut impl Rng, m: usize) -> Expression {
    let mut e = Expression::constant(rng.gen_range(-1.0..1.0));
    for i in 1..=m {
        e = e + Expression::constant(rng.gen_range(-1.0..1.0)) * Expression::Coord(i);
    }
    for i in 1..=m {
        for j in i..=m {
            e = e + Expression::constant(rng.gen_range(-0.5..0.5))
                * Expression::Coord(i)
                * Expression::Coord(j);
        }
    }
    e
}

pub fn random_vector(rng: &mut impl Rng, m: usize) -> ComponentVector {
    ComponentVector::new((0..m).map(|_| random_polynomial(rng, m)).collect())
}

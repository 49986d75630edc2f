//! Sections of `TM + T*M`, the neutral pairing, the Courant bracket, and the
//! Nijenhuis torsion of an endomorphism given by a classical triple.

use rand::Rng;

use crate::expr::Expression;
use crate::geometry::{
    compose_form, flat_sigma, lie_bracket, lie_derivative_oneform, mat_values, random_vector,
    sharp_pi, Antisymmetric, ComponentVector, Endomorphism,
};
use crate::jets::{DomainError, Jet, Ring, Scalar};
use crate::linalg::{dot, vadd, vscale, vsub, Mat};

/// A big-tangent section value `(X, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Big<T = f64> {
    pub x: Vec<T>,
    pub a: Vec<T>,
}

impl<T: Ring> Big<T> {
    pub fn new(x: Vec<T>, a: Vec<T>) -> Self {
        Big { x, a }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn stacked(&self) -> Vec<T> {
        self.x.iter().chain(&self.a).cloned().collect()
    }

    pub fn from_stacked(v: &[T]) -> Self {
        let m = v.len() / 2;
        Big::new(v[..m].to_vec(), v[m..].to_vec())
    }

    pub fn add(&self, o: &Big<T>) -> Big<T> {
        Big::new(vadd(&self.x, &o.x), vadd(&self.a, &o.a))
    }

    pub fn sub(&self, o: &Big<T>) -> Big<T> {
        Big::new(vsub(&self.x, &o.x), vsub(&self.a, &o.a))
    }
}

impl Big<Jet> {
    pub fn values(&self) -> Big<f64> {
        Big::new(
            self.x.iter().map(|j| j.value).collect(),
            self.a.iter().map(|j| j.value).collect(),
        )
    }
}

/// A section given by expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct BigSection {
    pub x: ComponentVector,
    pub a: ComponentVector,
}

impl BigSection {
    pub fn new(x: ComponentVector, a: ComponentVector) -> Self {
        BigSection { x, a }
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> Result<Big<T>, DomainError> {
        Ok(Big::new(self.x.eval(p)?, self.a.eval(p)?))
    }

    pub fn jets(&self, p: &[f64]) -> Result<Big<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }

    /// The `2m` coordinate sections `(d_i, 0)` and `(0, dx^j)`.
    pub fn coordinate_battery(m: usize) -> Vec<BigSection> {
        let mut out = Vec::with_capacity(2 * m);
        for i in 0..m {
            out.push(BigSection::new(
                ComponentVector::basis(m, i),
                ComponentVector::zero(m),
            ));
        }
        for j in 0..m {
            out.push(BigSection::new(
                ComponentVector::zero(m),
                ComponentVector::basis(m, j),
            ));
        }
        out
    }

    pub fn random(rng: &mut impl Rng, m: usize) -> BigSection {
        BigSection::new(random_vector(rng, m), random_vector(rng, m))
    }
}

/// `g((X, a), (Y, b)) = (a(Y) + b(X)) / 2`.
pub fn neutral_pairing<T: Ring>(s1: &Big<T>, s2: &Big<T>) -> T {
    (dot(&s1.a, &s2.x) + dot(&s2.a, &s1.x)).scale(0.5)
}

/// Matrix of the neutral pairing on stacked vectors `(X, alpha)`.
pub fn neutral_matrix(m: usize) -> Mat<f64> {
    Mat::from_fn(
        2 * m,
        2 * m,
        |i, j| if i.abs_diff(j) == m { 0.5 } else { 0.0 },
    )
}

/// `[(X,a),(Y,b)] = ([X,Y], L_X b - L_Y a + d(a(Y) - b(X)) / 2)`.
pub fn courant_bracket(s1: &Big<Jet>, s2: &Big<Jet>) -> Big<f64> {
    let x = lie_bracket(&s1.x, &s2.x);
    let ay = dot(&s1.a, &s2.x);
    let bx = dot(&s2.a, &s1.x);
    let exact = (ay - bx).grad;
    let a = vsub(
        &lie_derivative_oneform(&s1.x, &s2.a),
        &lie_derivative_oneform(&s2.x, &s1.a),
    );
    Big::new(x, vadd(&a, &vscale(&0.5, &exact)))
}

/// `(X, alpha) -> (X, e^tau alpha)`.
pub fn conformal_change(s: &Big<f64>, tau: f64) -> Big<f64> {
    Big::new(s.x.clone(), vscale(&tau.exp(), &s.a))
}

/// The classical triple `(A, pi, sigma)` of an endomorphism of `TM + T*M`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMatrix {
    pub a: Endomorphism,
    pub pi: Antisymmetric,
    pub sigma: Antisymmetric,
}

impl PhiMatrix {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> Result<PhiAt<T>, DomainError> {
        Ok(PhiAt {
            a: self.a.eval(p)?,
            pi: self.pi.eval(p)?,
            sigma: self.sigma.eval(p)?,
        })
    }

    pub fn jets(&self, p: &[f64]) -> Result<PhiAt<Jet>, DomainError> {
        self.eval(&Jet::seed(p))
    }

    /// `(A, e^tau pi, e^{-tau} sigma)`.
    pub fn conformal(&self, tau: &Expression) -> PhiMatrix {
        PhiMatrix {
            a: self.a.clone(),
            pi: self.pi.scaled(&Expression::exp(tau.clone())),
            sigma: self.sigma.scaled(&Expression::exp(-tau.clone())),
        }
    }
}

/// The triple evaluated at a point.
#[derive(Clone, Debug)]
pub struct PhiAt<T = f64> {
    pub a: Mat<T>,
    pub pi: Mat<T>,
    pub sigma: Mat<T>,
}

impl<T: Ring> PhiAt<T> {
    /// `(AX + sharp_pi alpha, flat_sigma X - alpha o A)`.
    pub fn apply(&self, s: &Big<T>) -> Big<T> {
        Big::new(
            vadd(&self.a.mul_vec(&s.x), &sharp_pi(&self.pi, &s.a)),
            vsub(&flat_sigma(&self.sigma, &s.x), &compose_form(&s.a, &self.a)),
        )
    }

    /// Block matrix `[[A, pi^T], [sigma^T, -A^T]]` acting on stacked vectors.
    pub fn matrix(&self) -> Mat<T> {
        let m = self.a.rows();
        let proto = self.a[(0, 0)].zero_like();
        let mut out = Mat::zeros(2 * m, 2 * m, &proto);
        out.set_block(0, 0, &self.a);
        out.set_block(0, m, &self.pi.transpose());
        out.set_block(m, 0, &self.sigma.transpose());
        out.set_block(m, m, &self.a.transpose().neg());
        out
    }
}

impl PhiAt<Jet> {
    pub fn values(&self) -> PhiAt<f64> {
        PhiAt {
            a: mat_values(&self.a),
            pi: mat_values(&self.pi),
            sigma: mat_values(&self.sigma),
        }
    }
}

/// `N(s1, s2) = [P s1, P s2] - P[s1, P s2] - P[P s1, s2] + P P [s1, s2]`,
/// all brackets Courant brackets.
pub fn nijenhuis_phi(phi: &PhiAt<Jet>, s1: &Big<Jet>, s2: &Big<Jet>) -> Big<f64> {
    let pv = phi.values();
    let p1 = phi.apply(s1);
    let p2 = phi.apply(s2);
    let t1 = courant_bracket(&p1, &p2);
    let t2 = pv.apply(&courant_bracket(s1, &p2));
    let t3 = pv.apply(&courant_bracket(&p1, s2));
    let t4 = pv.apply(&pv.apply(&courant_bracket(s1, s2)));
    t1.sub(&t2).sub(&t3).add(&t4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::constant_jets;

    fn sec(x: &[&str], a: &[&str], m: usize) -> BigSection {
        let f = |v: &[&str]| ComponentVector::new(v.iter().map(|s| parse(s, m).unwrap()).collect());
        BigSection::new(f(x), f(a))
    }

    #[test]
    fn pairing_examples() {
        let s = |x: [f64; 2], a: [f64; 2]| Big::new(x.to_vec(), a.to_vec());
        assert_eq!(
            neutral_pairing(&s([1., 0.], [0., 0.]), &s([0., 0.], [1., 0.])),
            0.5
        );
        assert_eq!(
            neutral_pairing(&s([1., 0.], [0., 0.]), &s([0., 1.], [0., 0.])),
            0.0
        );
        assert_eq!(
            neutral_pairing(&s([1., 0.], [1., 0.]), &s([1., 0.], [1., 0.])),
            1.0
        );
    }

    #[test]
    fn courant_examples() {
        let p = [0.3, 0.9];
        let c = courant_bracket(
            &sec(&["1", "0"], &["0", "0"], 2).jets(&p).unwrap(),
            &sec(&["0", "0"], &["0", "x1"], 2).jets(&p).unwrap(),
        );
        assert_eq!(c, Big::new(vec![0.0, 0.0], vec![0.0, 1.0]));
        let k = Big::new(constant_jets(&[1.0, 2.0], 2), constant_jets(&[3.0, 4.0], 2));
        let c = courant_bracket(&k, &k);
        assert_eq!(c, Big::new(vec![0.0; 2], vec![0.0; 2]));
    }

    #[test]
    fn conformal_change_examples() {
        let s = Big::new(vec![1.0, 0.0], vec![1.0, 0.0]);
        assert_eq!(conformal_change(&s, 0.0), s);
        let c = conformal_change(&s, 2f64.ln());
        assert!((c.a[0] - 2.0).abs() < 1e-15);
        assert_eq!(c.x, s.x);
    }

    #[test]
    fn block_action() {
        let m = 2;
        let phi = PhiAt {
            a: Mat::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]),
            pi: Mat::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]),
            sigma: Mat::from_rows(vec![vec![0.0, 5.0], vec![-5.0, 0.0]]),
        };
        let s = Big::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        let out = phi.apply(&s);
        assert_eq!(out.x, sharp_pi(&phi.pi, &s.a));
        assert_eq!(out.a, vec![-1.0, -2.0]);
        let v = Big::new(vec![0.5, -1.0], vec![2.0, 0.25]);
        let by_matrix = phi.matrix().mul_vec(&v.stacked());
        assert_eq!(Big::from_stacked(&by_matrix), phi.apply(&v));
        assert_eq!(neutral_matrix(m)[(0, 2)], 0.5);
    }
}

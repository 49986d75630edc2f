//! First-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its partial derivatives with
//! respect to the chart coordinates. Arithmetic follows the exact product,
//! quotient and chain rules, so gradients are correct to round-off.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Elementary functions understood by expressions and jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluation hit the singular locus of an expression.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("{op} undefined at value {value}")]
pub struct DomainError {
    pub op: &'static str,
    pub value: f64,
}

impl DomainError {
    pub fn new(op: &'static str, value: f64) -> Self {
        DomainError { op, value }
    }
}

/// Commutative ring operations plus a way to build constants of the same
/// shape as an existing element (a jet constant needs the chart dimension).
pub trait Ring:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn constant_like(&self, c: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    fn one_like(&self) -> Self {
        self.constant_like(1.0)
    }

    fn scale(&self, c: f64) -> Self {
        self.clone() * self.constant_like(c)
    }
}

/// A real-valued numeric carrier: `f64` or a first-order jet.
pub trait Scalar: Ring + Div<Output = Self> + Send + Sync {
    /// The underlying real value.
    fn re(&self) -> f64;

    fn try_div(self, rhs: Self) -> Result<Self, DomainError>;

    fn try_apply(self, func: Func) -> Result<Self, DomainError>;

    fn try_powi(self, n: i32) -> Result<Self, DomainError>;
}

fn finite(op: &'static str, input: f64, out: f64) -> Result<f64, DomainError> {
    if out.is_finite() {
        Ok(out)
    } else {
        Err(DomainError::new(op, input))
    }
}

impl Ring for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }

    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

impl Scalar for f64 {
    fn re(&self) -> f64 {
        *self
    }

    fn try_div(self, rhs: Self) -> Result<Self, DomainError> {
        if rhs == 0.0 {
            return Err(DomainError::new("division", rhs));
        }
        finite("division", rhs, self / rhs)
    }

    fn try_apply(self, func: Func) -> Result<Self, DomainError> {
        match func {
            Func::Exp => finite("exp", self, self.exp()),
            Func::Ln if self <= 0.0 => Err(DomainError::new("ln", self)),
            Func::Ln => finite("ln", self, self.ln()),
            Func::Sin => finite("sin", self, self.sin()),
            Func::Cos => finite("cos", self, self.cos()),
            Func::Sqrt if self < 0.0 => Err(DomainError::new("sqrt", self)),
            Func::Sqrt => finite("sqrt", self, self.sqrt()),
        }
    }

    fn try_powi(self, n: i32) -> Result<Self, DomainError> {
        if n < 0 && self == 0.0 {
            return Err(DomainError::new("negative power", self));
        }
        finite("power", self, self.powi(n))
    }
}

/// Value and gradient with respect to the chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, dim: usize) -> Self {
        let zero = value.zero_like();
        Jet {
            value,
            grad: vec![zero; dim],
        }
    }

    /// Independent variables at `values`: jet `i` has unit gradient `e_i`.
    pub fn seed(values: &[f64]) -> Vec<Self> {
        let m = values.len();
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Jet {
                value: *v,
                grad: (0..m)
                    .map(|j| v.constant_like(if i == j { 1.0 } else { 0.0 }))
                    .collect(),
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Partial derivative along coordinate `i` (0-based).
    pub fn d(&self, i: usize) -> &f64 {
        &self.grad[i]
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(
            self.grad.len(),
            other.grad.len(),
            "jet operands live on charts of different dimension"
        );
    }

    fn scaled_grad(&self, k: &f64) -> Vec<f64> {
        self.grad.iter().map(|g| *g * *k).collect()
    }
}

/// Jet of the `i`-th coordinate function (1-based) at `p`, or `None` when
/// the index is outside `1..=p.len()`.
pub fn lift_coordinate(i: usize, p: &[f64]) -> Option<Jet> {
    if i == 0 || i > p.len() {
        return None;
    }
    Some(Jet::seed(p).swap_remove(i - 1))
}

impl Add for Jet {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        Jet {
            value: self.value + rhs.value,
            grad: self
                .grad
                .into_iter()
                .zip(rhs.grad)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        Jet {
            value: self.value - rhs.value,
            grad: self
                .grad
                .into_iter()
                .zip(rhs.grad)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        let grad = self
            .grad
            .iter()
            .zip(&rhs.grad)
            .map(|(a, b)| *a * rhs.value + self.value * *b)
            .collect();
        Jet {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            value: -self.value,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

/// Unchecked quotient; a zero divisor yields non-finite entries. Use
/// [`Scalar::try_div`] where the divisor may vanish.
impl Div for Jet {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        let q = self.value / rhs.value;
        let grad = self
            .grad
            .iter()
            .zip(&rhs.grad)
            .map(|(a, b)| (*a - q * *b) / rhs.value)
            .collect();
        Jet { value: q, grad }
    }
}

impl Ring for Jet {
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.value.constant_like(c), self.grad.len())
    }

    fn scale(&self, c: f64) -> Self {
        Jet {
            value: self.value.scale(c),
            grad: self.grad.iter().map(|g| g.scale(c)).collect(),
        }
    }
}

impl Scalar for Jet {
    fn re(&self) -> f64 {
        self.value.re()
    }

    fn try_div(self, rhs: Self) -> Result<Self, DomainError> {
        if rhs.re() == 0.0 {
            return Err(DomainError::new("division", 0.0));
        }
        let q = self.value.try_div(rhs.value)?;
        let mut grad = Vec::with_capacity(self.grad.len());
        for (a, b) in self.grad.iter().zip(&rhs.grad) {
            grad.push((*a - q * *b).try_div(rhs.value)?);
        }
        Ok(Jet { value: q, grad })
    }

    fn try_apply(self, func: Func) -> Result<Self, DomainError> {
        let x = self.value;
        let (value, slope) = match func {
            Func::Exp => {
                let e = x.try_apply(Func::Exp)?;
                (e, e)
            }
            Func::Ln => {
                if x.re() <= 0.0 {
                    return Err(DomainError::new("ln", x.re()));
                }
                let slope = x.one_like().try_div(x)?;
                (x.try_apply(Func::Ln)?, slope)
            }
            Func::Sin => (x.try_apply(Func::Sin)?, x.try_apply(Func::Cos)?),
            Func::Cos => (x.try_apply(Func::Cos)?, -x.try_apply(Func::Sin)?),
            Func::Sqrt => {
                if x.re() <= 0.0 {
                    return Err(DomainError::new("sqrt", x.re()));
                }
                let s = x.try_apply(Func::Sqrt)?;
                let slope = s.one_like().try_div(s.scale(2.0))?;
                (s, slope)
            }
        };
        Ok(Jet {
            grad: self.scaled_grad(&slope),
            value,
        })
    }

    fn try_powi(self, n: i32) -> Result<Self, DomainError> {
        if n == 0 {
            return Ok(self.one_like());
        }
        let x = self.value;
        if n < 0 && x.re() == 0.0 {
            return Err(DomainError::new("negative power", 0.0));
        }
        let value = x.try_powi(n)?;
        let slope = x.try_powi(n - 1)?.scale(n as f64);
        Ok(Jet {
            grad: self.scaled_grad(&slope),
            value,
        })
    }
}

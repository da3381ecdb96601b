//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Polynomial`] lives over a fixed number of variables (the chart
//! dimension). Terms are kept in a `BTreeMap` keyed by dense exponent
//! vectors, so iteration is lexicographic on exponents and structural
//! equality is polynomial equality. No stored coefficient is ever zero.
//!
//! Arithmetic operators (`&a + &b`, `&a * &b`, ...) panic on a dimension
//! mismatch or degree overflow; the `checked_*` methods report those as
//! [`PolyError`] instead.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, int, to_f64, Rational};

/// Largest exponent allowed on a single variable.
pub const MAX_DEGREE: u32 = 32;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {var} out of range for {nvars} variables")]
    VariableOutOfRange { var: usize, nvars: usize },
    #[error("degree {degree} in variable {var} exceeds the cap of {MAX_DEGREE}")]
    DegreeOverflow { var: usize, degree: u32 },
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, value: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !value.is_zero() {
            p.terms.insert(vec![0; nvars], value);
        }
        p
    }

    pub fn from_int(nvars: usize, value: i64) -> Self {
        Self::constant(nvars, int(value))
    }

    /// The coordinate function of variable `var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::try_var(nvars, var).expect("variable index in range")
    }

    pub fn try_var(nvars: usize, var: usize) -> Result<Self, PolyError> {
        if var >= nvars {
            return Err(PolyError::VariableOutOfRange { var, nvars });
        }
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(exps, Rational::one());
        Ok(p)
    }

    /// Single term `coeff * x^exps`.
    pub fn monomial(exps: Monomial, coeff: Rational) -> Result<Self, PolyError> {
        let nvars = exps.len();
        if let Some((var, &e)) = exps.iter().enumerate().find(|(_, &e)| u32::from(e) > MAX_DEGREE) {
            return Err(PolyError::DegreeOverflow {
                var,
                degree: u32::from(e),
            });
        }
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, coeff) in terms {
            if exps.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    left: nvars,
                    right: exps.len(),
                });
            }
            p = p.checked_add(&Self::monomial(exps, coeff)?)?;
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u8]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (exps, c) = self.terms.iter().next()?;
                exps.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Highest exponent of `var` over all terms.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| u32::from(e[var])).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| u32::from(x)).sum())
            .max()
            .unwrap_or(0)
    }

    /// Whether any term involves `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] != 0)
    }

    fn same_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        }
    }

    fn accumulate(&mut self, exps: Monomial, coeff: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                if !coeff.is_zero() {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (exps, c) in &other.terms {
            out.accumulate(exps.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (exps, c) in &other.terms {
            out.accumulate(exps.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_dim(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut exps = Vec::with_capacity(self.nvars);
                for (var, (&a, &b)) in ea.iter().zip(eb).enumerate() {
                    let degree = u32::from(a) + u32::from(b);
                    if degree > MAX_DEGREE {
                        return Err(PolyError::DegreeOverflow { var, degree });
                    }
                    exps.push(degree as u8);
                }
                out.accumulate(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, exponent: u32) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.nvars);
        for _ in 0..exponent {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, exponent: u32) -> Self {
        self.checked_pow(exponent)
            .unwrap_or_else(|e| panic!("polynomial power: {e}"))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
        }
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Result<Self, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange { var, nvars: self.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (exps, c) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut lowered = exps.clone();
            lowered[var] = e - 1;
            out.accumulate(lowered, c * int(i64::from(e)));
        }
        Ok(out)
    }

    /// Same as [`partial`](Self::partial) for an index known to be valid.
    pub fn derivative(&self, var: usize) -> Self {
        self.partial(var)
            .unwrap_or_else(|e| panic!("polynomial derivative: {e}"))
    }

    /// Evaluates at a floating-point point.
    ///
    /// Terms are summed in ascending lexicographic exponent order, each
    /// term computed as `coeff * x0^e0 * x1^e1 * ...` left to right, so
    /// results are bit-reproducible.
    pub fn eval(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut sum = 0.0;
        for (exps, c) in &self.terms {
            let mut term = to_f64(c);
            for (&x, &e) in point.iter().zip(exps) {
                if e != 0 {
                    term *= x.powi(i32::from(e));
                }
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut sum = Rational::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term *= x;
                }
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Renders with the given variable names, highest term first.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "Polynomial({})", self.display_with(&names))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (n, (exps, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (n, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let factors: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    let name = self.names.get(i).map(String::as_str).unwrap_or("?");
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                f.write_str(&format_rational(&magnitude))?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{}*", format_rational(&magnitude))?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("polynomial add: {e}"))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("polynomial sub: {e}"))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("polynomial mul: {e}"))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Sum of an iterator of polynomials over `nvars` variables.
pub fn sum<I: IntoIterator<Item = Polynomial>>(nvars: usize, items: I) -> Polynomial {
    items.into_iter().fold(Polynomial::zero(nvars), |acc, p| acc + p)
}

//! Vector fields, `R^k`-valued one-forms and the canonical k-symplectic
//! structure on an adapted chart.
//!
//! Two-forms are constant-coefficient antisymmetric matrices `Θ` with
//! `Θ[i][j] = θ(∂_i, ∂_j)`, so `θ(X, Y) = Xᵀ Θ Y` and the interior product
//! `i(X)θ` has `dx^j` coefficient `Σ_i X^i Θ[i][j]`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::chart::Chart;
use crate::matrix::RationalMatrix;
use crate::poly::{sum, Polynomial};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// An ordinary one-form: coefficient of `dx^j` at position `j`.
pub type OneForm = Vec<Polynomial>;

/// Polynomial vector field. Missing components are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    dim: usize,
    components: BTreeMap<usize, Polynomial>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            components: BTreeMap::new(),
        }
    }

    /// The coordinate field `∂/∂x^index`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        let mut v = Self::zero(dim);
        v.set(index, Polynomial::one(dim));
        v
    }

    pub fn from_components(components: Vec<Polynomial>) -> Self {
        let dim = components.len();
        let mut v = Self::zero(dim);
        for (i, c) in components.into_iter().enumerate() {
            v.set(i, c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, index: usize, value: Polynomial) {
        assert!(index < self.dim, "component index out of range");
        assert_eq!(value.nvars(), self.dim, "component lives on another chart");
        if value.is_zero() {
            self.components.remove(&index);
        } else {
            self.components.insert(index, value);
        }
    }

    pub fn component(&self, index: usize) -> Polynomial {
        self.components
            .get(&index)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    /// Nonzero components in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Polynomial)> {
        self.components.iter().map(|(i, p)| (*i, p))
    }

    pub fn to_dense(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.component(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        assert_eq!(self.dim, other.dim, "vector fields on different charts");
        Self::from_components(
            (0..self.dim)
                .map(|i| f(&self.component(i), &other.component(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product with a function.
    pub fn scale_by(&self, factor: &Polynomial) -> Self {
        let mut out = Self::zero(self.dim);
        for (i, c) in self.iter() {
            out.set(i, c * factor);
        }
        out
    }

    /// Derivative of `f` along the field, `X(f) = Σ X^i ∂f/∂x^i`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        sum(self.dim, self.iter().map(|(i, c)| c * &f.derivative(i)))
    }

    pub fn format(&self, chart: &Chart) -> Vec<String> {
        (0..self.dim).map(|i| chart.format(&self.component(i))).collect()
    }
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.components.iter()).finish()
    }
}

/// A map `M → R^k` given by its `k` component functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RkMap {
    comps: Vec<Polynomial>,
}

impl RkMap {
    pub fn new(comps: Vec<Polynomial>) -> Result<Self, GeometryError> {
        if let Some(first) = comps.first() {
            if comps.iter().any(|c| c.nvars() != first.nvars()) {
                return Err(GeometryError::Shape("components live on different charts".into()));
            }
        }
        Ok(Self { comps })
    }

    pub fn zero(k: usize, dim: usize) -> Self {
        Self {
            comps: vec![Polynomial::zero(dim); k],
        }
    }

    /// The constant map `e_p`.
    pub fn unit(k: usize, dim: usize, p: usize) -> Self {
        let mut m = Self::zero(k, dim);
        m.comps[p] = Polynomial::one(dim);
        m
    }

    pub fn k(&self) -> usize {
        self.comps.len()
    }

    pub fn nvars(&self) -> usize {
        self.comps.first().map_or(0, Polynomial::nvars)
    }

    pub fn component(&self, p: usize) -> &Polynomial {
        &self.comps[p]
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        assert_eq!(self.k(), other.k(), "maps with different k");
        Self {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self {
            comps: self.comps.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale_by(&self, factor: &Polynomial) -> Self {
        Self {
            comps: self.comps.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn format(&self, chart: &Chart) -> Vec<String> {
        self.comps.iter().map(|c| chart.format(c)).collect()
    }
}

/// `R^k`-valued one-form `α = Σ_p α^p ⊗ e_p`; entry `(p, j)` is the
/// coefficient of `dx^j` in `α^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFormRk {
    dim: usize,
    comps: Vec<Vec<Polynomial>>,
}

impl OneFormRk {
    pub fn zero(k: usize, dim: usize) -> Self {
        Self {
            dim,
            comps: vec![vec![Polynomial::zero(dim); dim]; k],
        }
    }

    /// The basis form `dx^j ⊗ e_p`.
    pub fn basis(k: usize, dim: usize, p: usize, j: usize) -> Self {
        let mut f = Self::zero(k, dim);
        f.comps[p][j] = Polynomial::one(dim);
        f
    }

    /// All `k·dim` basis forms, ordered by `p` then `j`.
    pub fn basis_forms(k: usize, dim: usize) -> Vec<(usize, usize, Self)> {
        (0..k)
            .flat_map(|p| (0..dim).map(move |j| (p, j, Self::basis(k, dim, p, j))))
            .collect()
    }

    pub fn from_rows(rows: Vec<OneForm>) -> Result<Self, GeometryError> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows
            .iter()
            .any(|r| r.len() != dim || r.iter().any(|c| c.nvars() != dim))
        {
            return Err(GeometryError::Shape("ragged R^k-valued one-form".into()));
        }
        Ok(Self { dim, comps: rows })
    }

    pub fn k(&self) -> usize {
        self.comps.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: usize, j: usize) -> &Polynomial {
        &self.comps[p][j]
    }

    pub fn row(&self, p: usize) -> &OneForm {
        &self.comps[p]
    }
}

/// True iff `p` involves only leaf variables, i.e. is constant along the
/// leaves of the foliation `dx¹ = … = dxⁿ = 0`.
pub fn is_basic(p: &Polynomial, chart: &Chart) -> bool {
    chart.fiber_indices().all(|v| !p.depends_on(v))
}

/// `dH`: entry `(p, j)` is `∂H^p/∂x^j`.
pub fn differential(h: &RkMap) -> OneFormRk {
    let dim = h.nvars();
    OneFormRk {
        dim,
        comps: h
            .components()
            .iter()
            .map(|hp| (0..dim).map(|j| hp.derivative(j)).collect())
            .collect(),
    }
}

/// `i(X)θ` for a constant two-form with matrix `theta`.
pub fn interior_product(x: &VectorField, theta: &RationalMatrix) -> Result<OneForm, GeometryError> {
    let dim = x.dim();
    if theta.rows() != dim || theta.cols() != dim {
        return Err(GeometryError::Shape(format!(
            "{}x{} form against a field on {dim} variables",
            theta.rows(),
            theta.cols()
        )));
    }
    Ok((0..dim)
        .map(|j| {
            sum(
                dim,
                x.iter()
                    .filter(|(i, _)| !theta.get(*i, j).is_zero())
                    .map(|(i, c)| c.scale(theta.get(i, j))),
            )
        })
        .collect())
}

/// `θ(X, Y) = Σ_{i,j} X^i Θ[i][j] Y^j`.
pub fn evaluate_two_form(
    theta: &RationalMatrix,
    x: &VectorField,
    y: &VectorField,
) -> Result<Polynomial, GeometryError> {
    let row = interior_product(x, theta)?;
    if y.dim() != x.dim() {
        return Err(GeometryError::Shape("fields on different charts".into()));
    }
    Ok(sum(x.dim(), y.iter().map(|(j, c)| &row[j] * c)))
}

/// `dω` for a one-form; entry `(i, j)` is `∂ω_j/∂x^i − ∂ω_i/∂x^j`.
pub fn exterior_derivative_one_form(omega: &[Polynomial]) -> Vec<Vec<Polynomial>> {
    let dim = omega.len();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| &omega[j].derivative(i) - &omega[i].derivative(j))
                .collect()
        })
        .collect()
}

pub fn is_zero_grid(grid: &[Vec<Polynomial>]) -> bool {
    grid.iter().flatten().all(Polynomial::is_zero)
}

/// `Ξ(X)(β) = ⟨β, X⟩ = Σ_p β^p(X) e_p`.
pub fn xi_pairing(beta: &OneFormRk, x: &VectorField) -> Result<RkMap, GeometryError> {
    if beta.dim() != x.dim() {
        return Err(GeometryError::Shape(format!(
            "form on {} variables paired with a field on {}",
            beta.dim(),
            x.dim()
        )));
    }
    let dim = x.dim();
    Ok(RkMap {
        comps: (0..beta.k())
            .map(|p| sum(dim, x.iter().map(|(j, c)| beta.get(p, j) * c)))
            .collect(),
    })
}

/// Constant two-forms `θ¹ … θᵏ` together with the foliation directions
/// `E` (given as the coordinate indices spanning it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSymplecticStructure {
    dim: usize,
    fiber: Vec<usize>,
    thetas: Vec<RationalMatrix>,
}

impl KSymplecticStructure {
    /// `θ^p = Σ_i dx^{pi} ∧ dx^i`, `E = span{∂/∂x^{pi}}`.
    pub fn canonical(chart: &Chart) -> Self {
        let dim = chart.dim();
        let thetas = (0..chart.k())
            .map(|p| {
                let mut m = RationalMatrix::zeros(dim, dim);
                for i in 0..chart.n() {
                    m.set(chart.fiber(p, i), chart.leaf(i), Rational::one());
                    m.set(chart.leaf(i), chart.fiber(p, i), -Rational::one());
                }
                m
            })
            .collect();
        Self {
            dim,
            fiber: chart.fiber_indices().collect(),
            thetas,
        }
    }

    pub fn from_parts(dim: usize, fiber: Vec<usize>, thetas: Vec<RationalMatrix>) -> Result<Self, GeometryError> {
        if thetas.iter().any(|t| t.rows() != dim || t.cols() != dim) {
            return Err(GeometryError::Shape("two-form of the wrong size".into()));
        }
        if fiber.iter().any(|&i| i >= dim) {
            return Err(GeometryError::Shape("foliation index out of range".into()));
        }
        Ok(Self { dim, fiber, thetas })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.thetas.len()
    }

    pub fn theta(&self, p: usize) -> &RationalMatrix {
        &self.thetas[p]
    }

    pub fn thetas(&self) -> &[RationalMatrix] {
        &self.thetas
    }

    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSymplecticReport {
    pub antisymmetric: Vec<bool>,
    /// Kernel basis of each `Θ_p` (its characteristic space, as the forms
    /// are constant and hence closed).
    pub kernels: Vec<Vec<Vec<Rational>>>,
    /// Basis of `∩_p ker Θ_p`; empty means the intersection is `{0}`.
    pub intersection: Vec<Vec<Rational>>,
    /// `(p, a, b)` with `θ^p(∂_a, ∂_b) ≠ 0` for foliation directions `a, b`.
    pub lagrangian_violations: Vec<(usize, usize, usize)>,
}

impl KSymplecticReport {
    pub fn nondegenerate(&self) -> bool {
        self.intersection.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.antisymmetric.iter().all(|&a| a) && self.nondegenerate() && self.lagrangian_violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let vecs = |vs: &[Vec<Rational>]| {
            let items: Vec<String> = vs
                .iter()
                .map(|v| {
                    let parts: Vec<String> = v.iter().map(format_rational).collect();
                    format!("({})", parts.join(", "))
                })
                .collect();
            format!("[{}]", items.join(", "))
        };
        let kernels: Vec<String> = self.kernels.iter().map(|k| vecs(k)).collect();
        format!(
            "kernels {}; intersection {}; lagrangian violations {}",
            kernels.join(" "),
            vecs(&self.intersection),
            self.lagrangian_violations.len()
        )
    }
}

/// Checks joint non-degeneracy (`∩_p C(θ^p) = {0}`) and that every `θ^p`
/// vanishes on `E × E`.
pub fn check_ksymplectic(s: &KSymplecticStructure) -> KSymplecticReport {
    let antisymmetric = s.thetas.iter().map(RationalMatrix::is_antisymmetric).collect();
    let kernels = s.thetas.iter().map(RationalMatrix::kernel).collect();
    let intersection = if s.thetas.is_empty() {
        RationalMatrix::zeros(1, s.dim).kernel()
    } else {
        RationalMatrix::vstack(&s.thetas)
            .expect("square forms of one size")
            .kernel()
    };
    let mut lagrangian_violations = Vec::new();
    for (p, theta) in s.thetas.iter().enumerate() {
        for &a in &s.fiber {
            for &b in &s.fiber {
                if !theta.get(a, b).is_zero() {
                    lagrangian_violations.push((p, a, b));
                }
            }
        }
    }
    KSymplecticReport {
        antisymmetric,
        kernels,
        intersection,
        lagrangian_violations,
    }
}

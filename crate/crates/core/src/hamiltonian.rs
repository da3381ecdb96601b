//! Polarized Hamiltonian maps, their vector fields and brackets.
//!
//! On the canonical chart a map `H: M → R^k` is polarized when
//! `H^p = Σ_j f_j x^{pj} + g^p` with basic `f_j`, `g^p` and the same `f_j`
//! for every `p`. Its field solves `i(X_H)θ^p = −dH^p`:
//!
//! ```text
//! X_H = −Σ_{p,s} (∂H^p/∂x^s) ∂/∂x^{ps} + Σ_s f_s ∂/∂x^s
//! ```
//!
//! Sign convention: `{H,K} = P(dH,dK) = −(θ¹(X_H,X_K), …, θᵏ(X_H,X_K))`,
//! which in coordinates is
//! `{H,K}^p = Σ_s (∂H^p/∂x^s ∂K^p/∂x^{ps} − ∂H^p/∂x^{ps} ∂K^p/∂x^s)`.
//! With the usual Lie bracket of vector fields this makes `H ↦ X_H` an
//! anti-homomorphism: `[X_H, X_K] = X_{{K,H}}`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::chart::Chart;
use crate::geometry::{
    differential, evaluate_two_form, interior_product, is_basic, GeometryError, KSymplecticStructure, OneForm,
    OneFormRk, RkMap, VectorField,
};
use crate::poly::{sum, Polynomial};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NotPolarizedReason {
    NonlinearInFiber,
    CrossBlockFiberVariable,
    FMismatchAcrossComponents,
    NonBasicCoefficient,
}

impl fmt::Display for NotPolarizedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonlinearInFiber => "nonlinear-in-fiber",
            Self::CrossBlockFiberVariable => "cross-block-fiber-variable",
            Self::FMismatchAcrossComponents => "f-mismatch-across-components",
            Self::NonBasicCoefficient => "non-basic-coefficient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HamiltonianError {
    #[error("NotPolarized({reason}): {detail}")]
    NotPolarized { reason: NotPolarizedReason, detail: String },
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("map has {got} components but the chart has k = {expected}")]
    ComponentCount { expected: usize, got: usize },
    #[error("operation requires k = 1, chart has k = {0}")]
    RequiresK1(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl HamiltonianError {
    pub fn not_polarized_reason(&self) -> Option<NotPolarizedReason> {
        match self {
            Self::NotPolarized { reason, .. } => Some(*reason),
            _ => None,
        }
    }
}

fn not_polarized(reason: NotPolarizedReason, detail: impl Into<String>) -> HamiltonianError {
    HamiltonianError::NotPolarized {
        reason,
        detail: detail.into(),
    }
}

/// A polarized map in the form `H^p = Σ_j f_j x^{pj} + g^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedForm {
    chart: Chart,
    f: Vec<Polynomial>,
    g: Vec<Polynomial>,
}

impl PolarizedForm {
    pub fn new(chart: &Chart, f: Vec<Polynomial>, g: Vec<Polynomial>) -> Result<Self, HamiltonianError> {
        if f.len() != chart.n() {
            return Err(HamiltonianError::ComponentCount {
                expected: chart.n(),
                got: f.len(),
            });
        }
        if g.len() != chart.k() {
            return Err(HamiltonianError::ComponentCount {
                expected: chart.k(),
                got: g.len(),
            });
        }
        if f.iter().chain(&g).any(|p| p.nvars() != chart.dim()) {
            return Err(HamiltonianError::ChartMismatch);
        }
        for (j, fj) in f.iter().enumerate() {
            if !is_basic(fj, chart) {
                return Err(not_polarized(
                    NotPolarizedReason::NonBasicCoefficient,
                    format!("f_{} = {} depends on fiber variables", j + 1, chart.format(fj)),
                ));
            }
        }
        for (p, gp) in g.iter().enumerate() {
            if !is_basic(gp, chart) {
                return Err(not_polarized(
                    NotPolarizedReason::NonBasicCoefficient,
                    format!("g^{} = {} depends on fiber variables", p + 1, chart.format(gp)),
                ));
            }
        }
        Ok(Self {
            chart: chart.clone(),
            f,
            g,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn f(&self) -> &[Polynomial] {
        &self.f
    }

    pub fn g(&self) -> &[Polynomial] {
        &self.g
    }

    /// Reassembles `H^p = Σ_j f_j x^{pj} + g^p`.
    pub fn to_map(&self) -> RkMap {
        let c = &self.chart;
        let comps = (0..c.k())
            .map(|p| {
                let linear = sum(
                    c.dim(),
                    self.f.iter().enumerate().map(|(j, fj)| fj * &c.var(c.fiber(p, j))),
                );
                &linear + &self.g[p]
            })
            .collect();
        RkMap::new(comps).expect("single chart")
    }

    /// `∂H^p/∂x^s` for the leaf variable `x^s`:
    /// `Σ_j (∂f_j/∂x^s) x^{pj} + ∂g^p/∂x^s`.
    pub fn leaf_derivative(&self, p: usize, s: usize) -> Polynomial {
        let c = &self.chart;
        let leaf = c.leaf(s);
        let linear = sum(
            c.dim(),
            self.f
                .iter()
                .enumerate()
                .map(|(j, fj)| &fj.derivative(leaf) * &c.var(c.fiber(p, j))),
        );
        &linear + &self.g[p].derivative(leaf)
    }

    /// `b·H` for a basic function `b`.
    pub fn scale_basic(&self, b: &Polynomial) -> Result<Self, HamiltonianError> {
        if !is_basic(b, &self.chart) {
            return Err(not_polarized(
                NotPolarizedReason::NonBasicCoefficient,
                "multiplier is not basic",
            ));
        }
        Self::new(
            &self.chart,
            self.f.iter().map(|fj| fj * b).collect(),
            self.g.iter().map(|gp| gp * b).collect(),
        )
    }

    pub fn format(&self) -> (Vec<String>, Vec<String>) {
        (
            self.f.iter().map(|p| self.chart.format(p)).collect(),
            self.g.iter().map(|p| self.chart.format(p)).collect(),
        )
    }
}

fn check_components(chart: &Chart, h: &RkMap) -> Result<(), HamiltonianError> {
    if h.k() != chart.k() {
        return Err(HamiltonianError::ComponentCount {
            expected: chart.k(),
            got: h.k(),
        });
    }
    if h.nvars() != chart.dim() {
        return Err(HamiltonianError::ChartMismatch);
    }
    Ok(())
}

/// Splits `H` into `(f, g)`, or explains why it is not polarized.
///
/// Checks run in order: total fiber degree of every term at most one,
/// `H^p` uses only the fiber variables `x^{p·}` of its own block, and the
/// coefficient of `x^{pj}` is the same basic function for all `p`.
pub fn decompose_polarized(chart: &Chart, h: &RkMap) -> Result<PolarizedForm, HamiltonianError> {
    check_components(chart, h)?;
    let dim = chart.dim();
    let mut per_block: Vec<Vec<Polynomial>> = Vec::with_capacity(chart.k());
    let mut g = Vec::with_capacity(chart.k());
    for (p, hp) in h.components().iter().enumerate() {
        let mut f_terms: Vec<Vec<(Vec<u8>, Rational)>> = vec![Vec::new(); chart.n()];
        let mut g_terms = Vec::new();
        for (exps, coeff) in hp.terms() {
            let fiber_degree: u32 = chart.fiber_indices().map(|v| u32::from(exps[v])).sum();
            match fiber_degree {
                0 => g_terms.push((exps.clone(), coeff.clone())),
                1 => {
                    let var = chart
                        .fiber_indices()
                        .find(|&v| exps[v] == 1)
                        .expect("one fiber variable");
                    let (q, j) = chart.fiber_position(var).expect("fiber index");
                    if q != p {
                        return Err(not_polarized(
                            NotPolarizedReason::CrossBlockFiberVariable,
                            format!("H^{} contains {}", p + 1, chart.display_names()[var]),
                        ));
                    }
                    let mut reduced = exps.clone();
                    reduced[var] = 0;
                    f_terms[j].push((reduced, coeff.clone()));
                }
                _ => {
                    return Err(not_polarized(
                        NotPolarizedReason::NonlinearInFiber,
                        format!("H^{} has fiber degree {fiber_degree}", p + 1),
                    ))
                }
            }
        }
        per_block.push(
            f_terms
                .into_iter()
                .map(|t| Polynomial::from_terms(dim, t).expect("exponents from a valid polynomial"))
                .collect(),
        );
        g.push(Polynomial::from_terms(dim, g_terms).expect("exponents from a valid polynomial"));
    }
    let f = per_block[0].clone();
    for (p, fp) in per_block.iter().enumerate().skip(1) {
        for (j, (a, b)) in f.iter().zip(fp).enumerate() {
            if a != b {
                return Err(not_polarized(
                    NotPolarizedReason::FMismatchAcrossComponents,
                    format!(
                        "coefficient of x1_{j1} is {} but coefficient of x{p1}_{j1} is {}",
                        chart.format(a),
                        chart.format(b),
                        j1 = j + 1,
                        p1 = p + 1
                    ),
                ));
            }
        }
    }
    PolarizedForm::new(chart, f, g)
}

/// The field `X_H` with `i(X_H)θ^p = −dH^p` for all `p`.
pub fn hamiltonian_field(h: &PolarizedForm) -> VectorField {
    let c = h.chart();
    let mut x = VectorField::zero(c.dim());
    for p in 0..c.k() {
        for s in 0..c.n() {
            x.set(c.fiber(p, s), -h.leaf_derivative(p, s));
        }
    }
    for (s, fs) in h.f().iter().enumerate() {
        x.set(c.leaf(s), fs.clone());
    }
    debug_assert!(duality_holds(h, &x), "i(X_H)θ^p = −dH^p violated");
    x
}

fn duality_holds(h: &PolarizedForm, x: &VectorField) -> bool {
    let structure = KSymplecticStructure::canonical(h.chart());
    let dh = differential(&h.to_map());
    structure.thetas().iter().enumerate().all(|(p, theta)| {
        let lhs = interior_product(x, theta).expect("field on chart");
        lhs.iter().zip(dh.row(p)).all(|(a, b)| *a == -b)
    })
}

/// The coordinate bracket formula applied to arbitrary maps on the chart.
pub fn bracket_maps(chart: &Chart, h: &RkMap, k: &RkMap) -> Result<RkMap, HamiltonianError> {
    check_components(chart, h)?;
    check_components(chart, k)?;
    let comps = (0..chart.k())
        .map(|p| {
            let (hp, kp) = (h.component(p), k.component(p));
            sum(
                chart.dim(),
                (0..chart.n()).map(|s| {
                    let (leaf, fib) = (chart.leaf(s), chart.fiber(p, s));
                    &hp.derivative(leaf) * &kp.derivative(fib) - &hp.derivative(fib) * &kp.derivative(leaf)
                }),
            )
        })
        .collect();
    Ok(RkMap::new(comps).expect("single chart"))
}

fn same_chart(h: &PolarizedForm, k: &PolarizedForm) -> Result<(), HamiltonianError> {
    if h.chart().same_layout(k.chart()) {
        Ok(())
    } else {
        Err(HamiltonianError::ChartMismatch)
    }
}

/// `{H,K}^p = Σ_s (∂H^p/∂x^s ∂K^p/∂x^{ps} − ∂H^p/∂x^{ps} ∂K^p/∂x^s)`.
pub fn bracket(h: &PolarizedForm, k: &PolarizedForm) -> Result<RkMap, HamiltonianError> {
    same_chart(h, k)?;
    bracket_maps(h.chart(), &h.to_map(), &k.to_map())
}

/// `{H,K} = −(θ¹(X_H,X_K), …, θᵏ(X_H,X_K))`.
pub fn bracket_via_theta(h: &PolarizedForm, k: &PolarizedForm) -> Result<RkMap, HamiltonianError> {
    same_chart(h, k)?;
    let structure = KSymplecticStructure::canonical(h.chart());
    let (xh, xk) = (hamiltonian_field(h), hamiltonian_field(k));
    let comps = structure
        .thetas()
        .iter()
        .map(|theta| evaluate_two_form(theta, &xh, &xk).map(|v| -v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RkMap::new(comps)?)
}

/// Index of a coefficient `W_{pq}^{ijr}`: variables `i`, `j`, form slots
/// `p`, `q` and output slot `r`, all zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WIndex {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

/// `P = W_{pq}^{ijr} ((∂_i ⊗ ω^p) ∧ (∂_j ⊗ ω^q)) ⊗ e_r` with
/// `((∂_i⊗ω^p) ∧ (∂_j⊗ω^q))(α, β) = α^p_i β^q_j − β^p_i α^q_j`.
///
/// Coefficients are stored with `(i, p) < (j, q)`; an entry given in the
/// other order is folded in with its sign flipped and diagonal entries
/// vanish, so `P(α, β) = −P(β, α)` holds for every stored tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralPoissonTensor {
    chart: Chart,
    w: BTreeMap<WIndex, Polynomial>,
}

impl GeneralPoissonTensor {
    pub fn new(chart: &Chart) -> Self {
        Self {
            chart: chart.clone(),
            w: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Adds `coeff` to `W_{pq}^{ijr}`.
    pub fn add_coefficient(&mut self, index: WIndex, coeff: Polynomial) -> Result<(), HamiltonianError> {
        let c = &self.chart;
        if index.i >= c.dim() || index.j >= c.dim() || index.p >= c.k() || index.q >= c.k() || index.r >= c.k() {
            return Err(GeometryError::Shape(format!("coefficient index {index:?} out of range")).into());
        }
        if coeff.nvars() != c.dim() {
            return Err(HamiltonianError::ChartMismatch);
        }
        let (key, coeff) = if (index.i, index.p) < (index.j, index.q) {
            (index, coeff)
        } else if (index.i, index.p) > (index.j, index.q) {
            (
                WIndex {
                    i: index.j,
                    j: index.i,
                    p: index.q,
                    q: index.p,
                    r: index.r,
                },
                -coeff,
            )
        } else {
            return Ok(());
        };
        let total = match self.w.remove(&key) {
            Some(existing) => &existing + &coeff,
            None => coeff,
        };
        if !total.is_zero() {
            self.w.insert(key, total);
        }
        Ok(())
    }

    /// Stored coefficients in canonical order.
    pub fn coefficients(&self) -> impl Iterator<Item = (&WIndex, &Polynomial)> {
        self.w.iter()
    }
}

/// The tensor `P = Σ_p Σ_i ((∂/∂x^i ⊗ ω^p) ∧ (∂/∂x^{pi} ⊗ ω^p)) ⊗ e_p`.
pub fn canonical_poisson_tensor(chart: &Chart) -> GeneralPoissonTensor {
    let mut t = GeneralPoissonTensor::new(chart);
    for p in 0..chart.k() {
        for i in 0..chart.n() {
            t.add_coefficient(
                WIndex {
                    i: chart.leaf(i),
                    j: chart.fiber(p, i),
                    p,
                    q: p,
                    r: p,
                },
                Polynomial::one(chart.dim()),
            )
            .expect("indices in range");
        }
    }
    t
}

/// `Σ_{q,p} Σ_i ((∂/∂x^i ⊗ ω^q) ∧ (∂/∂x^{qi} ⊗ ω^p)) ⊗ e_p`.
///
/// Agrees with [`canonical_poisson_tensor`] on `(dH, dK)` for polarized
/// `H`, `K` (the extra `q ≠ p` terms meet `∂K^p/∂x^{qi} = 0`), and in
/// addition satisfies `⟨β, X_H⟩ = −P(dH, β)` for every `R^k`-valued
/// one-form `β`, including those with cross-block components.
pub fn coupled_poisson_tensor(chart: &Chart) -> GeneralPoissonTensor {
    let mut t = GeneralPoissonTensor::new(chart);
    for q in 0..chart.k() {
        for p in 0..chart.k() {
            for i in 0..chart.n() {
                t.add_coefficient(
                    WIndex {
                        i: chart.leaf(i),
                        j: chart.fiber(q, i),
                        p: q,
                        q: p,
                        r: p,
                    },
                    Polynomial::one(chart.dim()),
                )
                .expect("indices in range");
            }
        }
    }
    t
}

/// `P(α, β)^r = Σ W_{pq}^{ijr} (α^p_i β^q_j − β^p_i α^q_j)`.
pub fn apply_poisson(
    tensor: &GeneralPoissonTensor,
    alpha: &OneFormRk,
    beta: &OneFormRk,
) -> Result<RkMap, HamiltonianError> {
    let c = tensor.chart();
    for form in [alpha, beta] {
        if form.k() != c.k() || form.dim() != c.dim() {
            return Err(GeometryError::Shape(format!(
                "form of shape {}x{} against a tensor on k = {}, dim = {}",
                form.k(),
                form.dim(),
                c.k(),
                c.dim()
            ))
            .into());
        }
    }
    let mut comps = vec![c.zero(); c.k()];
    for (ix, w) in tensor.coefficients() {
        let a = alpha.get(ix.p, ix.i) * beta.get(ix.q, ix.j);
        let b = beta.get(ix.p, ix.i) * alpha.get(ix.q, ix.j);
        if a.is_zero() && b.is_zero() {
            continue;
        }
        comps[ix.r] = &comps[ix.r] + &(w * &(a - b));
    }
    Ok(RkMap::new(comps)?)
}

/// `[X, Y]^j = Σ_i (X^i ∂Y^j/∂x^i − Y^i ∂X^j/∂x^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, HamiltonianError> {
    if x.dim() != y.dim() {
        return Err(HamiltonianError::ChartMismatch);
    }
    let dim = x.dim();
    Ok(VectorField::from_components(
        (0..dim)
            .map(|j| &x.apply(&y.component(j)) - &y.apply(&x.component(j)))
            .collect(),
    ))
}

fn require_k1(chart: &Chart) -> Result<(), HamiltonianError> {
    if chart.k() == 1 {
        Ok(())
    } else {
        Err(HamiltonianError::RequiresK1(chart.k()))
    }
}

/// `ζ(X) = i(X)θ` for the symplectic form of a `k = 1` chart.
pub fn zeta(chart: &Chart, x: &VectorField) -> Result<OneForm, HamiltonianError> {
    require_k1(chart)?;
    let structure = KSymplecticStructure::canonical(chart);
    Ok(interior_product(x, structure.theta(0))?)
}

/// Inverse of [`zeta`]: solves `Xᵀ Θ = α` exactly.
pub fn zeta_inverse(chart: &Chart, alpha: &[Polynomial]) -> Result<VectorField, HamiltonianError> {
    require_k1(chart)?;
    let dim = chart.dim();
    if alpha.len() != dim {
        return Err(GeometryError::Shape(format!("one-form of length {} on {dim} variables", alpha.len())).into());
    }
    let structure = KSymplecticStructure::canonical(chart);
    // X = (Θᵀ)⁻¹ α
    let solve = structure
        .theta(0)
        .transpose()
        .inverse()
        .expect("symplectic form is non-degenerate");
    Ok(VectorField::from_components(
        (0..dim)
            .map(|i| sum(dim, (0..dim).map(|j| alpha[j].scale(solve.get(i, j)))))
            .collect(),
    ))
}

/// `{H,K} = Σ_i (∂H/∂y^i ∂K/∂x^i − ∂H/∂x^i ∂K/∂y^i)` on a `k = 1` chart,
/// `x^i` fiber and `y^i` leaf coordinates. Any polynomials are accepted.
pub fn classical_bracket(chart: &Chart, h: &Polynomial, k: &Polynomial) -> Result<Polynomial, HamiltonianError> {
    require_k1(chart)?;
    if h.nvars() != chart.dim() || k.nvars() != chart.dim() {
        return Err(HamiltonianError::ChartMismatch);
    }
    Ok(sum(
        chart.dim(),
        (0..chart.n()).map(|i| {
            let (x, y) = (chart.fiber(0, i), chart.leaf(i));
            &h.derivative(y) * &k.derivative(x) - &h.derivative(x) * &k.derivative(y)
        }),
    ))
}

/// `{{H,K},L} + {{K,L},H} + {{L,H},K}` for polarized maps.
pub fn jacobi_residual(h: &PolarizedForm, k: &PolarizedForm, l: &PolarizedForm) -> Result<RkMap, HamiltonianError> {
    same_chart(h, k)?;
    same_chart(h, l)?;
    let chart = h.chart();
    let (hm, km, lm) = (h.to_map(), k.to_map(), l.to_map());
    let cyc = |a: &RkMap, b: &RkMap, c: &RkMap| -> Result<RkMap, HamiltonianError> {
        let ab = bracket_maps(chart, a, b)?;
        bracket_maps(chart, &ab, c)
    };
    Ok(cyc(&hm, &km, &lm)?.add(&cyc(&km, &lm, &hm)?).add(&cyc(&lm, &hm, &km)?))
}

/// Jacobi residual of [`classical_bracket`].
pub fn classical_jacobi_residual(
    chart: &Chart,
    h: &Polynomial,
    k: &Polynomial,
    l: &Polynomial,
) -> Result<Polynomial, HamiltonianError> {
    let cb = |a: &Polynomial, b: &Polynomial| classical_bracket(chart, a, b);
    Ok(cb(&cb(h, k)?, l)? + cb(&cb(k, l)?, h)? + cb(&cb(l, h)?, k)?)
}

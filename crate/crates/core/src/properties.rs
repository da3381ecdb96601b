//! Identity checks returning labelled residuals.
//!
//! Every check returns the nonzero entries of `lhs − rhs`; an empty list
//! means the identity holds exactly.

use crate::chart::Chart;
use crate::geometry::{
    differential, exterior_derivative_one_form, interior_product, xi_pairing, KSymplecticStructure, OneFormRk, RkMap,
    VectorField,
};
use crate::hamiltonian::{
    apply_poisson, bracket, bracket_maps, bracket_via_theta, classical_bracket, classical_jacobi_residual,
    decompose_polarized, hamiltonian_field, jacobi_residual, lie_bracket, GeneralPoissonTensor, HamiltonianError,
    PolarizedForm,
};
use crate::poly::Polynomial;

pub type Residuals = Vec<(String, Polynomial)>;

fn map_residuals(label: &str, diff: &RkMap, out: &mut Residuals) {
    for (p, c) in diff.components().iter().enumerate() {
        if !c.is_zero() {
            out.push((format!("{label}[{}]", p + 1), c.clone()));
        }
    }
}

fn field_residuals(label: &str, chart: &Chart, diff: &VectorField, out: &mut Residuals) {
    let names = chart.display_names();
    for (i, c) in diff.iter() {
        out.push((format!("{label}[{}]", names[i]), c.clone()));
    }
}

/// `i(X_H)θ^p + dH^p` for every `p`.
pub fn duality(h: &PolarizedForm) -> Residuals {
    let chart = h.chart();
    let names = chart.display_names();
    let xh = hamiltonian_field(h);
    let dh = differential(&h.to_map());
    let structure = KSymplecticStructure::canonical(chart);
    let mut out = Vec::new();
    for (p, theta) in structure.thetas().iter().enumerate() {
        let contracted = interior_product(&xh, theta).expect("field on chart");
        for (j, (a, b)) in contracted.iter().zip(dh.row(p)).enumerate() {
            let r = a + b;
            if !r.is_zero() {
                out.push((format!("p={},d{}", p + 1, names[j]), r));
            }
        }
    }
    out
}

/// `d(i(X_H)θ^p)` for every `p`.
pub fn closedness(h: &PolarizedForm) -> Residuals {
    let chart = h.chart();
    let names = chart.display_names();
    let xh = hamiltonian_field(h);
    let mut out = Vec::new();
    for (p, theta) in KSymplecticStructure::canonical(chart).thetas().iter().enumerate() {
        let form = interior_product(&xh, theta).expect("field on chart");
        let grid = exterior_derivative_one_form(&form);
        for (i, row) in grid.iter().enumerate() {
            for (j, v) in row.iter().enumerate().skip(i + 1) {
                if !v.is_zero() {
                    out.push((format!("p={},d{}^d{}", p + 1, names[i], names[j]), v.clone()));
                }
            }
        }
    }
    out
}

/// Coordinate bracket against `−θ^p(X_H, X_K)` and `P(dH, dK)`.
pub fn three_route(
    h: &PolarizedForm,
    k: &PolarizedForm,
    tensor: &GeneralPoissonTensor,
) -> Result<Residuals, HamiltonianError> {
    let coord = bracket(h, k)?;
    let theta = bracket_via_theta(h, k)?;
    let poisson = apply_poisson(tensor, &differential(&h.to_map()), &differential(&k.to_map()))?;
    let mut out = Vec::new();
    map_residuals("theta", &theta.sub(&coord), &mut out);
    map_residuals("poisson", &poisson.sub(&coord), &mut out);
    Ok(out)
}

fn field_of(chart: &Chart, map: &RkMap) -> Result<VectorField, HamiltonianError> {
    Ok(hamiltonian_field(&decompose_polarized(chart, map)?))
}

/// `[X_H, X_K] − X_{{H,K}}`.
pub fn morphism(h: &PolarizedForm, k: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let chart = h.chart();
    let lhs = lie_bracket(&hamiltonian_field(h), &hamiltonian_field(k))?;
    let rhs = field_of(chart, &bracket(h, k)?)?;
    let mut out = Vec::new();
    field_residuals("lie", chart, &lhs.sub(&rhs), &mut out);
    Ok(out)
}

/// `[X_H, X_K] − X_{{K,H}}`.
pub fn reversed_morphism(h: &PolarizedForm, k: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let chart = h.chart();
    let lhs = lie_bracket(&hamiltonian_field(h), &hamiltonian_field(k))?;
    let rhs = field_of(chart, &bracket(k, h)?)?;
    let mut out = Vec::new();
    field_residuals("lie", chart, &lhs.sub(&rhs), &mut out);
    Ok(out)
}

pub fn jacobi(h: &PolarizedForm, k: &PolarizedForm, l: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let mut out = Vec::new();
    map_residuals("jacobi", &jacobi_residual(h, k, l)?, &mut out);
    Ok(out)
}

/// `{H,K}` is polarized.
pub fn closure(h: &PolarizedForm, k: &PolarizedForm) -> Result<PolarizedForm, HamiltonianError> {
    decompose_polarized(h.chart(), &bracket(h, k)?)
}

/// `b·H` is polarized and decomposes to `(b·f, b·g)`.
pub fn module_structure(b: &Polynomial, h: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let chart = h.chart();
    let scaled = h.scale_basic(b)?;
    let product = h.to_map().scale_by(b);
    let decomposed = decompose_polarized(chart, &product)?;
    let mut out = Vec::new();
    map_residuals("module", &decomposed.to_map().sub(&scaled.to_map()), &mut out);
    Ok(out)
}

/// Which basis forms `dx^j ⊗ e_p` a Ξ–P check runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormSet {
    /// All `k·N` basis forms.
    All,
    /// Leaf differentials in every slot, plus `dx^{pi} ⊗ e_p`: the forms
    /// spanned by differentials of polarized maps.
    Adapted,
}

impl FormSet {
    pub fn forms(self, chart: &Chart) -> Vec<(usize, usize, OneFormRk)> {
        OneFormRk::basis_forms(chart.k(), chart.dim())
            .into_iter()
            .filter(|(p, j, _)| match self {
                FormSet::All => true,
                FormSet::Adapted => chart.is_leaf(*j) || chart.fiber_position(*j).is_some_and(|(q, _)| q == *p),
            })
            .collect()
    }
}

/// `⟨β, X_H⟩ + P(dH, β)` over a family of basis forms.
pub fn xi_poisson(
    h: &PolarizedForm,
    tensor: &GeneralPoissonTensor,
    set: FormSet,
) -> Result<Residuals, HamiltonianError> {
    let chart = h.chart();
    let names = chart.display_names();
    let xh = hamiltonian_field(h);
    let dh = differential(&h.to_map());
    let mut out = Vec::new();
    for (p, j, beta) in set.forms(chart) {
        let lhs = xi_pairing(&beta, &xh)?;
        let rhs = apply_poisson(tensor, &dh, &beta)?;
        map_residuals(&format!("d{}*e{}", names[j], p + 1), &lhs.add(&rhs), &mut out);
    }
    Ok(out)
}

/// `⟨dK, X_H⟩ − {K,H}`.
pub fn xi_bracket(h: &PolarizedForm, k: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let lhs = xi_pairing(&differential(&k.to_map()), &hamiltonian_field(h))?;
    let mut out = Vec::new();
    map_residuals("pairing", &lhs.sub(&bracket(k, h)?), &mut out);
    Ok(out)
}

/// `⟨dH^p, X_H⟩` for every `p`.
pub fn conservation(h: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let pairing = xi_pairing(&differential(&h.to_map()), &hamiltonian_field(h))?;
    let mut out = Vec::new();
    map_residuals("dH(X_H)", &pairing, &mut out);
    Ok(out)
}

/// Antisymmetry, Jacobi and Leibniz for the `k = 1` bracket on arbitrary
/// polynomials.
pub fn classical(chart: &Chart, h: &Polynomial, k: &Polynomial, l: &Polynomial) -> Result<Residuals, HamiltonianError> {
    let cb = |a: &Polynomial, b: &Polynomial| classical_bracket(chart, a, b);
    let mut out = Vec::new();
    let anti = cb(h, k)? + cb(k, h)?;
    let jac = classical_jacobi_residual(chart, h, k, l)?;
    let leibniz = cb(h, &(k * l))? - (&cb(h, k)? * l + k * &cb(h, l)?);
    for (label, r) in [("antisymmetry", anti), ("jacobi", jac), ("leibniz", leibniz)] {
        if !r.is_zero() {
            out.push((label.to_string(), r));
        }
    }
    Ok(out)
}

/// The coordinate bracket on raw maps agrees with the polarized one.
pub fn raw_bracket_agrees(h: &PolarizedForm, k: &PolarizedForm) -> Result<Residuals, HamiltonianError> {
    let raw = bracket_maps(h.chart(), &h.to_map(), &k.to_map())?;
    let mut out = Vec::new();
    map_residuals("raw", &raw.sub(&bracket(h, k)?), &mut out);
    Ok(out)
}

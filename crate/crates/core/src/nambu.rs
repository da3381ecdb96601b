//! Nambu dynamics on `R^{k+1}` and `R^{3n}`.
//!
//! Both spaces are relabelings of canonical charts. On `R^{k+1}` the chart
//! is `n = 1`: `x^p` is the fiber variable `x{p}_1` (index `p-1`) and `z`
//! is `q1` (index `k`), so coordinate `j` of the Levi-Civita formula is
//! chart index `j`. On `R^{3n}` the chart is `k = 2`: `x^i = x1_i`,
//! `y^i = x2_i`, `z^i = q_i`.

use itertools::Itertools;
use thiserror::Error;

use crate::chart::Chart;
use crate::geometry::{RkMap, VectorField};
use crate::hamiltonian::{decompose_polarized, hamiltonian_field, HamiltonianError};
use crate::poly::{sum, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NambuError {
    #[error("Levi-Civita index {index} outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} functions against {1} variables")]
    LengthMismatch(usize, usize),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("invalid Nambu space: {0}")]
    InvalidSpace(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// `ε_{i₁…i_m}` for 1-based indices: the parity of the permutation, `0`
/// on a repeated index.
pub fn levi_civita(indices: &[usize]) -> Result<i8, NambuError> {
    let m = indices.len();
    if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > m) {
        return Err(NambuError::IndexOutOfRange { index: bad, len: m });
    }
    let mut sign = 1i8;
    for a in 0..m {
        for b in a + 1..m {
            match indices[a].cmp(&indices[b]) {
                std::cmp::Ordering::Equal => return Ok(0),
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Ok(sign)
}

fn det(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    match m.len() {
        0 => Polynomial::one(nvars),
        1 => m[0][0].clone(),
        len => sum(
            nvars,
            (0..len).filter(|&c| !m[0][c].is_zero()).map(|c| {
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &det(&minor, nvars);
                if c % 2 == 0 {
                    term
                } else {
                    -term
                }
            }),
        ),
    }
}

/// `D(f₁…f_m)/D(v₁…v_m)`: determinant of `∂f_a/∂x^{v_b}` by cofactor
/// expansion along the first row.
pub fn jacobian_det(fs: &[Polynomial], vars: &[usize]) -> Result<Polynomial, NambuError> {
    if fs.len() != vars.len() {
        return Err(NambuError::LengthMismatch(fs.len(), vars.len()));
    }
    let Some(nvars) = fs.first().map(Polynomial::nvars) else {
        return Err(NambuError::LengthMismatch(0, 0));
    };
    if fs.iter().any(|f| f.nvars() != nvars) || vars.iter().any(|&v| v >= nvars) {
        return Err(NambuError::InvalidSpace("variables outside the chart".into()));
    }
    let m: Vec<Vec<Polynomial>> = fs
        .iter()
        .map(|f| vars.iter().map(|&v| f.derivative(v)).collect())
        .collect();
    Ok(det(&m, nvars))
}

/// `R^{k+1}` with coordinates `(x¹, …, x^k, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NambuSpaceRk1 {
    chart: Chart,
}

impl NambuSpaceRk1 {
    pub fn new(k: usize) -> Result<Self, NambuError> {
        let chart = Chart::new(1, k).map_err(|e| NambuError::InvalidSpace(e.to_string()))?;
        Self::from_chart(chart)
    }

    /// Wraps an existing `n = 1`, `k ≥ 2` chart (keeping its aliases).
    pub fn from_chart(chart: Chart) -> Result<Self, NambuError> {
        if chart.n() != 1 || chart.k() < 2 {
            return Err(NambuError::InvalidSpace(format!(
                "R^(k+1) needs n = 1 and k >= 2, got n = {}, k = {}",
                chart.n(),
                chart.k()
            )));
        }
        Ok(Self { chart })
    }

    pub fn k(&self) -> usize {
        self.chart.k()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Chart index of `x^p` (`p` zero-based).
    pub fn x(&self, p: usize) -> usize {
        self.chart.fiber(p, 0)
    }

    pub fn z(&self) -> usize {
        self.chart.leaf(0)
    }
}

/// `R^{3n}` with coordinates `(xⁱ, yⁱ, zⁱ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NambuSpaceR3n {
    chart: Chart,
}

impl NambuSpaceR3n {
    pub fn new(n: usize) -> Result<Self, NambuError> {
        let chart = Chart::new(n, 2).map_err(|e| NambuError::InvalidSpace(e.to_string()))?;
        Self::from_chart(chart)
    }

    pub fn from_chart(chart: Chart) -> Result<Self, NambuError> {
        if chart.k() != 2 {
            return Err(NambuError::InvalidSpace(format!(
                "R^(3n) needs k = 2, got k = {}",
                chart.k()
            )));
        }
        Ok(Self { chart })
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn x(&self, i: usize) -> usize {
        self.chart.fiber(0, i)
    }

    pub fn y(&self, i: usize) -> usize {
        self.chart.fiber(1, i)
    }

    pub fn z(&self, i: usize) -> usize {
        self.chart.leaf(i)
    }
}

fn check_map(chart: &Chart, h: &RkMap, expected: usize) -> Result<(), NambuError> {
    if h.k() != expected {
        return Err(NambuError::ComponentCount { expected, got: h.k() });
    }
    if h.nvars() != chart.dim() {
        return Err(HamiltonianError::ChartMismatch.into());
    }
    Ok(())
}

/// `dx^j/dt = Σ ε_{j i₁…i_k} ∂H¹/∂x^{i₁} ⋯ ∂H^k/∂x^{i_k}`.
///
/// Only tuples that are permutations of the indices other than `j`
/// contribute, so the sum runs over those.
pub fn nambu_field_rk1(space: &NambuSpaceRk1, h: &RkMap) -> Result<VectorField, NambuError> {
    let k = space.k();
    check_map(space.chart(), h, k)?;
    let dim = k + 1;
    let partials: Vec<Vec<Polynomial>> = h
        .components()
        .iter()
        .map(|hm| (0..dim).map(|i| hm.derivative(i)).collect())
        .collect();
    let mut components = Vec::with_capacity(dim);
    for j in 0..dim {
        let rest: Vec<usize> = (0..dim).filter(|&i| i != j).collect();
        let mut terms = Vec::new();
        for perm in rest.iter().copied().permutations(k) {
            if perm.iter().enumerate().any(|(m, &i)| partials[m][i].is_zero()) {
                continue;
            }
            let labels: Vec<usize> = std::iter::once(j).chain(perm.iter().copied()).map(|i| i + 1).collect();
            let sign = levi_civita(&labels)?;
            let product = perm
                .iter()
                .enumerate()
                .fold(Polynomial::one(dim), |acc, (m, &i)| &acc * &partials[m][i]);
            terms.push(if sign < 0 { -product } else { product });
        }
        components.push(sum(dim, terms));
    }
    Ok(VectorField::from_components(components))
}

/// Per `i`: `(D(H¹,H²)/D(yⁱ,zⁱ), D(H¹,H²)/D(zⁱ,xⁱ), D(H¹,H²)/D(xⁱ,yⁱ))`.
pub fn nambu_field_r3n(space: &NambuSpaceR3n, h1: &Polynomial, h2: &Polynomial) -> Result<VectorField, NambuError> {
    let chart = space.chart();
    check_map(
        chart,
        &RkMap::new(vec![h1.clone(), h2.clone()]).map_err(|_| HamiltonianError::ChartMismatch)?,
        2,
    )?;
    let hs = [h1.clone(), h2.clone()];
    let mut field = VectorField::zero(chart.dim());
    for i in 0..space.n() {
        let (x, y, z) = (space.x(i), space.y(i), space.z(i));
        field.set(x, jacobian_det(&hs, &[y, z])?);
        field.set(y, jacobian_det(&hs, &[z, x])?);
        field.set(z, jacobian_det(&hs, &[x, y])?);
    }
    Ok(field)
}

/// `(H¹, H², f) = Σᵢ D(f, H¹, H²)/D(xⁱ, yⁱ, zⁱ)`.
pub fn nambu_bracket_r3n(
    space: &NambuSpaceR3n,
    f: &Polynomial,
    h1: &Polynomial,
    h2: &Polynomial,
) -> Result<Polynomial, NambuError> {
    let dim = space.chart().dim();
    if [f, h1, h2].iter().any(|p| p.nvars() != dim) {
        return Err(HamiltonianError::ChartMismatch.into());
    }
    let fs = [f.clone(), h1.clone(), h2.clone()];
    let dets = (0..space.n())
        .map(|i| jacobian_det(&fs, &[space.x(i), space.y(i), space.z(i)]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sum(dim, dets))
}

/// Outcome of comparing a Nambu field with its predicted multiple of
/// `X_H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub nambu: VectorField,
    pub expected: VectorField,
    pub residual: VectorField,
}

impl RelationReport {
    fn new(nambu: VectorField, expected: VectorField) -> Self {
        let residual = nambu.sub(&expected);
        Self {
            nambu,
            expected,
            residual,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Checks `X_H^N = (−1)^k f^{k−1} X_H` for a polarized `H` on `R^{k+1}`.
pub fn verify_relation_rk1(space: &NambuSpaceRk1, h: &RkMap) -> Result<RelationReport, NambuError> {
    let chart = space.chart();
    let hf = decompose_polarized(chart, h)?;
    let k = space.k();
    let f = &hf.f()[0];
    let mut factor = f.pow(k as u32 - 1);
    if k % 2 == 1 {
        factor = -factor;
    }
    let expected = hamiltonian_field(&hf).scale_by(&factor);
    Ok(RelationReport::new(nambu_field_rk1(space, h)?, expected))
}

/// `X_Hⁱ`: the `(xⁱ, yⁱ, zⁱ)` part of `X_H`.
pub fn restrict_field(space: &NambuSpaceR3n, x: &VectorField, i: usize) -> VectorField {
    let mut out = VectorField::zero(x.dim());
    for v in [space.x(i), space.y(i), space.z(i)] {
        out.set(v, x.component(v));
    }
    out
}

/// Checks `X_H^N = Σᵢ fᵢ X_Hⁱ` for a polarized `H` on `R^{3n}`.
pub fn verify_relation_r3n(space: &NambuSpaceR3n, h: &RkMap) -> Result<RelationReport, NambuError> {
    let chart = space.chart();
    let hf = decompose_polarized(chart, h)?;
    let xh = hamiltonian_field(&hf);
    let expected = (0..space.n()).fold(VectorField::zero(chart.dim()), |acc, i| {
        acc.add(&restrict_field(space, &xh, i).scale_by(&hf.f()[i]))
    });
    let nambu = nambu_field_r3n(space, h.component(0), h.component(1))?;
    Ok(RelationReport::new(nambu, expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(&[1, 2, 3]), Ok(1));
        assert_eq!(levi_civita(&[2, 1, 3]), Ok(-1));
        assert_eq!(levi_civita(&[1, 1, 3]), Ok(0));
        assert_eq!(levi_civita(&[3, 1, 2]), Ok(1));
        assert!(levi_civita(&[1, 4, 2]).is_err());
        assert_eq!(levi_civita(&[]), Ok(1));
    }

    #[test]
    fn jacobians() {
        let c = Chart::r3();
        let (x, y, z) = (c.var(0), c.var(1), c.var(2));
        assert_eq!(jacobian_det(&[x.clone(), y.clone()], &[0, 1]).unwrap(), c.constant(1));
        let h1 = &z * &x;
        let h2 = &z * &y;
        assert_eq!(jacobian_det(&[h1.clone(), h2.clone()], &[1, 2]).unwrap(), -(&x * &z));
        assert!(jacobian_det(&[h1.clone(), h1.clone()], &[0, 2]).unwrap().is_zero());
        assert!(jacobian_det(&[h1], &[0, 1]).is_err());
    }

    #[test]
    fn rk1_field_of_worked_example() {
        let space = NambuSpaceRk1::from_chart(Chart::r3()).unwrap();
        let c = space.chart();
        let (x, y, z) = (c.var(0), c.var(1), c.var(2));
        let h = RkMap::new(vec![&z * &x, &z * &y]).unwrap();
        let field = nambu_field_rk1(&space, &h).unwrap();
        assert_eq!(field.to_dense(), vec![-(&x * &z), -(&y * &z), z.pow(2)]);
        let r3n = NambuSpaceR3n::from_chart(Chart::r3()).unwrap();
        assert_eq!(nambu_field_r3n(&r3n, h.component(0), h.component(1)).unwrap(), field);
        assert!(verify_relation_rk1(&space, &h).unwrap().passed());
        assert!(verify_relation_r3n(&r3n, &h).unwrap().passed());
        let constant = RkMap::new(vec![c.constant(2), c.constant(5)]).unwrap();
        assert!(nambu_field_rk1(&space, &constant).unwrap().is_zero());
    }

    #[test]
    fn rk1_relation_k3() {
        let space = NambuSpaceRk1::new(3).unwrap();
        let c = space.chart();
        let z2 = c.var(space.z()).pow(2);
        let h = RkMap::new((0..3).map(|p| &z2 * &c.var(space.x(p))).collect()).unwrap();
        let report = verify_relation_rk1(&space, &h).unwrap();
        assert!(report.passed());
        // z-component is (−1)³ f³ = −z⁶
        assert_eq!(report.nambu.component(space.z()), -c.var(space.z()).pow(6));
    }

    #[test]
    fn rk1_relation_with_zero_f() {
        let space = NambuSpaceRk1::new(2).unwrap();
        let c = space.chart();
        let z = c.var(space.z());
        let h = RkMap::new(vec![z.pow(2), &z + &c.constant(1)]).unwrap();
        let report = verify_relation_rk1(&space, &h).unwrap();
        assert!(report.passed());
        assert!(report.nambu.is_zero());
    }

    #[test]
    fn r3n_relation_n2() {
        let space = NambuSpaceR3n::new(2).unwrap();
        let c = space.chart();
        let h1 = &c.var(space.z(0)) * &c.var(space.x(0)) + &c.var(space.z(1)) * &c.var(space.x(1));
        let h2 = &c.var(space.z(0)) * &c.var(space.y(0)) + &c.var(space.z(1)) * &c.var(space.y(1));
        let h = RkMap::new(vec![h1.clone(), h2.clone()]).unwrap();
        let report = verify_relation_r3n(&space, &h).unwrap();
        assert!(report.passed(), "{:?}", report.residual);
        for i in 0..2 {
            let zi = c.var(space.z(i));
            assert_eq!(report.nambu.component(space.z(i)), zi.pow(2));
            assert_eq!(nambu_bracket_r3n(&space, &zi, &h1, &h2).unwrap(), zi.pow(2));
        }
        assert!(nambu_bracket_r3n(&space, &h1, &h1, &h2).unwrap().is_zero());
        assert!(nambu_bracket_r3n(&space, &h2, &h1, &h2).unwrap().is_zero());
        assert!(nambu_field_r3n(&space, &h1, &h1).unwrap().is_zero());
    }

    #[test]
    fn r3n_relation_with_unit_f_is_hamiltonian_field() {
        let space = NambuSpaceR3n::new(2).unwrap();
        let c = space.chart();
        let h1 = &c.var(space.x(0)) + &c.var(space.x(1)) + c.var(space.z(0)).pow(2);
        let h2 = &c.var(space.y(0)) + &c.var(space.y(1));
        let h = RkMap::new(vec![h1, h2]).unwrap();
        let report = verify_relation_r3n(&space, &h).unwrap();
        assert!(report.passed());
        let xh = hamiltonian_field(&decompose_polarized(c, &h).unwrap());
        assert_eq!(report.nambu, xh);
    }

    #[test]
    fn x_component_of_bracket() {
        // (H¹,H²,xⁱ) = −(Σ_j ∂f_j/∂zⁱ x^j + ∂g¹/∂zⁱ)·fᵢ
        let space = NambuSpaceR3n::new(1).unwrap();
        let c = space.chart();
        let (x, y, z) = (c.var(space.x(0)), c.var(space.y(0)), c.var(space.z(0)));
        let f = z.pow(2);
        let g1 = &z * &c.constant(3);
        let h1 = &f * &x + g1.clone();
        let h2 = &f * &y;
        let lhs = nambu_bracket_r3n(&space, &x, &h1, &h2).unwrap();
        let rhs = -(&(&f.derivative(space.z(0)) * &x + g1.derivative(space.z(0))) * &f);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn space_validation() {
        assert!(NambuSpaceRk1::new(1).is_err());
        assert!(NambuSpaceRk1::from_chart(Chart::new(2, 2).unwrap()).is_err());
        assert!(NambuSpaceR3n::from_chart(Chart::new(2, 3).unwrap()).is_err());
    }
}

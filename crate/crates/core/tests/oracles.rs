use polaris_core::dynamics::{compare_flows, conservation_report, rk4_integrate};
use polaris_core::geometry::{differential, evaluate_two_form, KSymplecticStructure};
use polaris_core::hamiltonian::{
    apply_poisson, canonical_poisson_tensor, classical_bracket, decompose_polarized, hamiltonian_field, zeta,
    zeta_inverse,
};
use polaris_core::nambu::{nambu_field_rk1, NambuSpaceRk1};
use polaris_core::{Chart, PolyGenerator, Polynomial, RkMap, VectorField};

fn worked() -> (Chart, RkMap) {
    let chart = Chart::r3();
    let (x, y, z) = (chart.var(0), chart.var(1), chart.var(2));
    let h = RkMap::new(vec![&z * &x, &z * &y]).unwrap();
    (chart, h)
}

/// `θ = Σ dxⁱ ∧ dyⁱ` written out: `i(X)θ = Σ (Xˣ dy − Xʸ dx)`.
fn zeta_by_hand(chart: &Chart, x: &VectorField) -> Vec<Polynomial> {
    let mut alpha = vec![chart.zero(); chart.dim()];
    for i in 0..chart.n() {
        let (xi, yi) = (chart.fiber(0, i), chart.leaf(i));
        alpha[yi] = x.component(xi);
        alpha[xi] = -x.component(yi);
    }
    alpha
}

#[test]
fn zeta_matches_hand_formula_and_inverts() {
    for n in 1..=3 {
        let chart = Chart::new(n, 1).unwrap();
        let mut gen = PolyGenerator::new(n as u64);
        for _ in 0..20 {
            let field =
                VectorField::from_components((0..chart.dim()).map(|_| gen.polynomial(chart.dim(), 2)).collect());
            let alpha = zeta(&chart, &field).unwrap();
            assert_eq!(alpha, zeta_by_hand(&chart, &field));
            assert_eq!(zeta_inverse(&chart, &alpha).unwrap(), field);
        }
    }
}

#[test]
fn zeta_requires_one_component() {
    let chart = Chart::r3();
    assert!(zeta(&chart, &VectorField::zero(3)).is_err());
}

/// The tensor built from `ζ⁻¹` on `k = 1` is the canonical one:
/// with `X_H = ζ⁻¹(−dH)`, `P(dH, dK) = {H, K} = θ(X_K, X_H)`.
#[test]
fn poisson_tensor_from_zeta() {
    for n in 1..=3 {
        let chart = Chart::new(n, 1).unwrap();
        let tensor = canonical_poisson_tensor(&chart);
        let theta = KSymplecticStructure::canonical(&chart);
        let mut gen = PolyGenerator::new(100 + n as u64);
        for _ in 0..20 {
            let h = RkMap::new(vec![gen.polynomial(chart.dim(), 3)]).unwrap();
            let k = RkMap::new(vec![gen.polynomial(chart.dim(), 3)]).unwrap();
            let (dh, dk) = (differential(&h), differential(&k));
            let field = |d: &[Polynomial]| {
                let minus: Vec<Polynomial> = d.iter().map(|c| -c.clone()).collect();
                zeta_inverse(&chart, &minus).unwrap()
            };
            let (xh, xk) = (field(dh.row(0)), field(dk.row(0)));
            let via_zeta = evaluate_two_form(theta.theta(0), &xk, &xh).unwrap();
            let via_tensor = apply_poisson(&tensor, &dh, &dk).unwrap();
            assert_eq!(via_tensor.component(0), &via_zeta);
            assert_eq!(
                via_zeta,
                classical_bracket(&chart, h.component(0), k.component(0)).unwrap()
            );
        }
    }
}

#[test]
fn nambu_and_hamiltonian_flows_agree_up_to_time_change() {
    let (chart, h) = worked();
    let xh = hamiltonian_field(&decompose_polarized(&chart, &h).unwrap());
    let space = NambuSpaceRk1::from_chart(chart.clone()).unwrap();
    let xn = nambu_field_rk1(&space, &h).unwrap();
    // X^N = z X_H on the worked example, so dτ/dt = z
    let z = chart.var(2);
    let cmp = compare_flows(&xn, &xh, &z, &[1.0, 1.0, 1.0], 0.0, 0.5, 1e-3).unwrap();
    assert!(cmp.relative_residual <= 1e-12, "{cmp:?}");
    // τ = ∫ 1/(1−t) dt = ln 2
    assert!((cmp.tau - std::f64::consts::LN_2).abs() < 1e-10, "{cmp:?}");
    assert!(cmp.reparam_error < 1e-9, "{cmp:?}");
}

#[test]
fn drift_shrinks_at_fourth_order() {
    let (chart, h) = worked();
    let xh = hamiltonian_field(&decompose_polarized(&chart, &h).unwrap());
    let drift = |step: f64| {
        let traj = rk4_integrate(&xh, &[1.0, 1.0, 1.0], 0.0, 1.0, step).unwrap();
        conservation_report(&h, &traj).unwrap().max_drift()
    };
    let drifts: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&s| drift(s)).collect();
    for pair in drifts.windows(2) {
        assert!(pair[1] <= pair[0] / 8.0, "{drifts:?}");
    }
}

#[test]
fn constant_field_reaches_endpoint() {
    let field = VectorField::coordinate(3, 2);
    let traj = rk4_integrate(&field, &[0.0, 0.0, 0.0], 0.0, 1.0, 1e-3).unwrap();
    assert_eq!(traj.len(), 1001);
    assert_eq!(*traj.times().last().unwrap(), 1.0);
    assert!((traj.final_state()[2] - 1.0).abs() <= 1e-15);
    assert_eq!(&traj.final_state()[..2], &[0.0, 0.0]);
}

#[test]
fn hamiltonian_flow_matches_closed_form() {
    let (chart, h) = worked();
    let xh = hamiltonian_field(&decompose_polarized(&chart, &h).unwrap());
    let traj = rk4_integrate(&xh, &[1.0, 1.0, 1.0], 0.0, 1.0, 1e-3).unwrap();
    for (t, s) in traj.times().iter().zip(traj.states()) {
        let exact = [(-t).exp(), (-t).exp(), t.exp()];
        for (a, b) in s.iter().zip(exact) {
            assert!((a - b).abs() < 1e-12, "t = {t}");
        }
    }
}

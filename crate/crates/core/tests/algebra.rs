use polaris_core::geometry::is_basic;
use polaris_core::nambu::{jacobian_det, levi_civita, nambu_bracket_r3n, NambuSpaceR3n};
use polaris_core::rational::rat;
use polaris_core::{parse_poly, print_poly, Chart, PolyGenerator, Polynomial, Rational};
use proptest::prelude::*;

const NVARS: usize = 3;

fn poly(seed: u64, degree: u32) -> Polynomial {
    PolyGenerator::new(seed).polynomial(NVARS, degree)
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-20i64..20, 1i64..6).prop_map(|(n, d)| rat(n, d)), NVARS)
}

/// Sign of a permutation of `0..m` by counting inversions.
fn inversion_sign(perm: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..m).permutations(m).collect()
}

proptest! {
    #[test]
    fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, q, r) = (poly(a, 2), poly(b, 2), poly(c, 2));
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::one(NVARS), p.clone());
    }

    #[test]
    fn mixed_partials_commute(a in any::<u64>(), i in 0..NVARS, j in 0..NVARS) {
        let p = poly(a, 4);
        prop_assert_eq!(p.derivative(i).derivative(j), p.derivative(j).derivative(i));
    }

    #[test]
    fn derivative_is_a_derivation(a in any::<u64>(), b in any::<u64>(), i in 0..NVARS) {
        let (p, q) = (poly(a, 3), poly(b, 3));
        prop_assert_eq!((&p * &q).derivative(i), &(&p.derivative(i) * &q) + &(&p * &q.derivative(i)));
        prop_assert!(Polynomial::from_int(NVARS, 7).derivative(i).is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_map(a in any::<u64>(), b in any::<u64>(), x in point()) {
        let (p, q) = (poly(a, 3), poly(b, 3));
        let (pv, qv) = (p.eval_exact(&x).unwrap(), q.eval_exact(&x).unwrap());
        prop_assert_eq!((&p * &q).eval_exact(&x).unwrap(), &pv * &qv);
        prop_assert_eq!((&p + &q).eval_exact(&x).unwrap(), &pv + &qv);
    }

    #[test]
    fn printing_round_trips(a in any::<u64>(), n in 1usize..3, k in 1usize..3) {
        let chart = Chart::new(n, k).unwrap();
        let p = PolyGenerator::new(a).polynomial(chart.dim(), 3);
        let text = print_poly(&p, &chart);
        prop_assert_eq!(parse_poly(&text, &chart).unwrap(), p);
        let spaced: String = text
            .chars()
            .flat_map(|c| if "+-*^()/".contains(c) { vec![' ', c, ' '] } else { vec![c] })
            .collect();
        let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(parse_poly(&spaced, &chart).unwrap(), parse_poly(&squeezed, &chart).unwrap());
    }

    #[test]
    fn basic_functions_form_a_subring(a in any::<u64>(), n in 1usize..4, k in 1usize..4) {
        let chart = Chart::new(n, k).unwrap();
        let mut gen = PolyGenerator::new(a);
        let (b, c) = (gen.basic(&chart), gen.basic(&chart));
        prop_assert!(is_basic(&(&b * &c), &chart));
        prop_assert!(is_basic(&(&b - &c), &chart));
        for v in chart.leaf_indices() {
            prop_assert!(is_basic(&b.derivative(v), &chart));
        }
    }

    #[test]
    fn levi_civita_is_multiplicative(a in any::<u64>(), m in 1usize..7) {
        let mut gen = PolyGenerator::new(a);
        let (s, t) = (gen.permutation(m), gen.permutation(m));
        let one_based = |p: &[usize]| p.iter().map(|i| i + 1).collect::<Vec<_>>();
        let composed: Vec<usize> = t.iter().map(|&i| s[i]).collect();
        let sign = |p: &[usize]| i64::from(levi_civita(&one_based(p)).unwrap());
        prop_assert_eq!(sign(&composed), sign(&s) * sign(&t));
        prop_assert_eq!(sign(&s), inversion_sign(&s));
    }

    #[test]
    fn nambu_bracket_is_alternating(a in any::<u64>(), n in 1usize..3) {
        let space = NambuSpaceR3n::new(n).unwrap();
        let dim = space.chart().dim();
        let mut gen = PolyGenerator::new(a);
        let (f, g, h) = (gen.polynomial(dim, 2), gen.polynomial(dim, 2), gen.polynomial(dim, 2));
        let fgh = nambu_bracket_r3n(&space, &f, &g, &h).unwrap();
        prop_assert_eq!(nambu_bracket_r3n(&space, &g, &f, &h).unwrap(), -fgh.clone());
        prop_assert_eq!(nambu_bracket_r3n(&space, &f, &h, &g).unwrap(), -fgh);
        prop_assert!(nambu_bracket_r3n(&space, &f, &f, &h).unwrap().is_zero());
    }
}

#[test]
fn levi_civita_rejects_repeats_and_range() {
    assert_eq!(levi_civita(&[1, 2, 3]).unwrap(), 1);
    assert_eq!(levi_civita(&[2, 1, 3]).unwrap(), -1);
    assert_eq!(levi_civita(&[1, 1, 3]).unwrap(), 0);
    assert!(levi_civita(&[0, 1]).is_err());
    assert!(levi_civita(&[1, 4, 2]).is_err());
}

#[test]
fn jacobian_matches_leibniz_expansion() {
    for m in 1..=4 {
        let vars: Vec<usize> = (0..m).collect();
        for seed in 0..10u64 {
            let mut gen = PolyGenerator::new(seed);
            let fs: Vec<Polynomial> = (0..m).map(|_| gen.polynomial(m, 2)).collect();
            // Σ_σ sgn σ Π_i ∂f_i/∂x_σ(i)
            let mut leibniz = Polynomial::zero(m);
            for perm in all_permutations(m) {
                let mut term = Polynomial::from_int(m, inversion_sign(&perm));
                for (i, &j) in perm.iter().enumerate() {
                    term = &term * &fs[i].derivative(vars[j]);
                }
                leibniz = &leibniz + &term;
            }
            assert_eq!(jacobian_det(&fs, &vars).unwrap(), leibniz, "m = {m}, seed = {seed}");
        }
    }
}

//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so every verdict is printed,
//! not only the failing ones.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use polaris_core::dynamics::{conservation_report, rk4_integrate};
use polaris_core::geometry::{check_ksymplectic, xi_pairing, KSymplecticStructure, OneFormRk};
use polaris_core::hamiltonian::{
    bracket, canonical_poisson_tensor, coupled_poisson_tensor, decompose_polarized, hamiltonian_field, PolarizedForm,
};
use polaris_core::nambu::{verify_relation_r3n, verify_relation_rk1, NambuSpaceR3n, NambuSpaceRk1};
use polaris_core::properties::{self, FormSet};
use polaris_core::random::{PolyGenerator, DEFAULT_SEED};
use polaris_core::{Chart, Polynomial, RkMap, VectorField};

const TRIALS: usize = 100;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn grid() -> Vec<(usize, usize)> {
    (1..=3).flat_map(|n| (1..=3).map(move |k| (n, k))).collect()
}

/// 100 polarized maps per `(n, k)`, seed 42; pairs and triples are
/// consecutive windows of this list.
struct Corpus {
    charts: Vec<(Chart, Vec<PolarizedForm>)>,
}

impl Corpus {
    fn new() -> Self {
        let charts = grid()
            .into_iter()
            .map(|(n, k)| {
                let chart = Chart::new(n, k).unwrap();
                let mut gen = PolyGenerator::new(DEFAULT_SEED + (10 * n + k) as u64);
                let maps = (0..TRIALS).map(|_| gen.polarized(&chart)).collect();
                (chart, maps)
            })
            .collect();
        Self { charts }
    }

    fn pairs(maps: &[PolarizedForm]) -> impl Iterator<Item = (&PolarizedForm, &PolarizedForm)> {
        (0..maps.len()).map(move |i| (&maps[i], &maps[(i + 1) % maps.len()]))
    }

    fn triples(maps: &[PolarizedForm]) -> impl Iterator<Item = (&PolarizedForm, &PolarizedForm, &PolarizedForm)> {
        let m = maps.len();
        (0..m).map(move |i| (&maps[i], &maps[(i + 1) % m], &maps[(i + 2) % m]))
    }
}

fn worked(chart: &Chart) -> (PolarizedForm, PolarizedForm) {
    let (x, y, z) = (chart.var(0), chart.var(1), chart.var(2));
    let h = decompose_polarized(chart, &RkMap::new(vec![&z * &x, &z * &y]).unwrap()).unwrap();
    let k = decompose_polarized(chart, &RkMap::new(vec![x, y]).unwrap()).unwrap();
    (h, k)
}

fn c1_structure() -> Verdict {
    let failing: Vec<String> = grid()
        .into_iter()
        .filter(|&(n, k)| !check_ksymplectic(&KSymplecticStructure::canonical(&Chart::new(n, k).unwrap())).passed())
        .map(|(n, k)| format!("(n={n},k={k})"))
        .collect();
    verdict(failing.is_empty(), format!("9 charts, failing: {failing:?}"))
}

fn c2_duality(corpus: &Corpus) -> Verdict {
    let mut bad = 0;
    let mut total = 0;
    for (_, maps) in &corpus.charts {
        for h in maps {
            total += 1;
            if !properties::duality(h).is_empty() || !properties::closedness(h).is_empty() {
                bad += 1;
            }
        }
    }
    verdict(
        bad == 0,
        format!("{total} maps, {bad} with nonzero i(X_H)θ^p + dH^p or d(i(X_H)θ^p)"),
    )
}

fn c3_three_route(corpus: &Corpus) -> Verdict {
    let mut bad = 0;
    let mut total = 0;
    for (chart, maps) in &corpus.charts {
        let tensor = canonical_poisson_tensor(chart);
        for (h, k) in Corpus::pairs(maps) {
            total += 1;
            if !properties::three_route(h, k, &tensor).unwrap().is_empty() {
                bad += 1;
            }
        }
    }
    // hand-computed: {(zx, zy), (x, y)} = (x, y) by every route
    let chart = Chart::r3();
    let (h, k) = worked(&chart);
    let expected = RkMap::new(vec![chart.var(0), chart.var(1)]).unwrap();
    let worked_ok = bracket(&h, &k).unwrap() == expected
        && properties::three_route(&h, &k, &canonical_poisson_tensor(&chart))
            .unwrap()
            .is_empty();
    verdict(
        bad == 0 && worked_ok,
        format!("{total} pairs, {bad} disagreeing; worked example (x,y): {worked_ok}"),
    )
}

fn c4_lie(corpus: &Corpus) -> Verdict {
    let (mut total, mut jacobi_bad, mut morphism_bad, mut reversed_bad) = (0, 0, 0, 0);
    for (_, maps) in &corpus.charts {
        for (h, k, l) in Corpus::triples(maps) {
            total += 1;
            jacobi_bad += usize::from(!properties::jacobi(h, k, l).unwrap().is_empty());
            morphism_bad += usize::from(!properties::morphism(h, k).unwrap().is_empty());
            reversed_bad += usize::from(!properties::reversed_morphism(h, k).unwrap().is_empty());
        }
    }
    verdict(
        jacobi_bad == 0 && morphism_bad == 0,
        format!(
            "{total} triples: Jacobi nonzero in {jacobi_bad}; [X_H,X_K] = X_{{H,K}} fails in {morphism_bad}; \
             [X_H,X_K] = X_{{K,H}} fails in {reversed_bad}"
        ),
    )
}

fn c5_closure(corpus: &Corpus) -> Verdict {
    let (mut total, mut closure_bad, mut module_bad) = (0, 0, 0);
    for (i, (chart, maps)) in corpus.charts.iter().enumerate() {
        let mut gen = PolyGenerator::new(DEFAULT_SEED + 1000 + i as u64);
        for (h, k) in Corpus::pairs(maps) {
            total += 1;
            closure_bad += usize::from(properties::closure(h, k).is_err());
            let b = gen.basic(chart);
            module_bad += usize::from(!matches!(properties::module_structure(&b, h), Ok(r) if r.is_empty()));
        }
    }
    verdict(
        closure_bad == 0 && module_bad == 0,
        format!("{total} pairs: bracket not polarized in {closure_bad}; b·H not polarized in {module_bad}"),
    )
}

/// `⟨dx^j ⊗ e_p, X⟩ = X^j e_p`, read off directly.
fn pairing_oracle(chart: &Chart, x: &VectorField, p: usize, j: usize) -> RkMap {
    let mut comps = vec![chart.zero(); chart.k()];
    comps[p] = x.component(j);
    RkMap::new(comps).unwrap()
}

fn c6_xi_poisson(corpus: &Corpus) -> Verdict {
    let (mut total, mut literal_bad, mut adapted_bad, mut coupled_bad, mut oracle_bad) = (0, 0, 0, 0, 0);
    let mut failing_k = std::collections::BTreeSet::new();
    for (chart, maps) in &corpus.charts {
        let canonical = canonical_poisson_tensor(chart);
        let coupled = coupled_poisson_tensor(chart);
        for h in maps {
            total += 1;
            let xh = hamiltonian_field(h);
            for (p, j, beta) in OneFormRk::basis_forms(chart.k(), chart.dim()) {
                if xi_pairing(&beta, &xh).unwrap() != pairing_oracle(chart, &xh, p, j) {
                    oracle_bad += 1;
                }
            }
            if !properties::xi_poisson(h, &canonical, FormSet::All).unwrap().is_empty() {
                literal_bad += 1;
                failing_k.insert(chart.k());
            }
            adapted_bad += usize::from(
                !properties::xi_poisson(h, &canonical, FormSet::Adapted)
                    .unwrap()
                    .is_empty(),
            );
            coupled_bad += usize::from(!properties::xi_poisson(h, &coupled, FormSet::All).unwrap().is_empty());
        }
    }
    verdict(
        literal_bad == 0 && oracle_bad == 0,
        format!(
            "{total} maps: Ξ(X_H) = −P(dH,·) on all basis forms fails in {literal_bad} (k values {failing_k:?}); \
             on adapted forms fails in {adapted_bad}; with the block-coupled tensor fails in {coupled_bad}; \
             pairing oracle mismatches {oracle_bad}"
        ),
    )
}

fn c7_classical() -> Verdict {
    let (mut total, mut bad) = (0, 0);
    for n in 1..=3 {
        let chart = Chart::new(n, 1).unwrap();
        let mut gen = PolyGenerator::new(DEFAULT_SEED + 70 + n as u64);
        for _ in 0..TRIALS {
            let dim = chart.dim();
            let (h, k, l) = (gen.polynomial(dim, 2), gen.polynomial(dim, 2), gen.polynomial(dim, 2));
            total += 1;
            bad += usize::from(!properties::classical(&chart, &h, &k, &l).unwrap().is_empty());
        }
    }
    verdict(
        bad == 0,
        format!("{total} triples over n = 1..3, {bad} violating antisymmetry, Jacobi or Leibniz"),
    )
}

fn signed_power(f: &Polynomial, k: usize) -> Polynomial {
    let p = f.pow(k as u32);
    if k % 2 == 1 {
        -p
    } else {
        p
    }
}

fn c8_nambu_rk1() -> Verdict {
    let (mut total, mut bad) = (0, 0);
    for k in 2..=4 {
        let space = NambuSpaceRk1::new(k).unwrap();
        let chart = space.chart();
        let mut gen = PolyGenerator::new(DEFAULT_SEED + 80 + k as u64);
        for _ in 0..TRIALS {
            let h = gen.polarized(chart);
            let report = verify_relation_rk1(&space, &h.to_map()).unwrap();
            let z_ok = report.nambu.component(space.z()) == signed_power(&h.f()[0], k);
            total += 1;
            bad += usize::from(!(report.passed() && z_ok));
        }
    }
    verdict(
        bad == 0,
        format!("{total} maps over k = 2..4, {bad} violating X^N = (−1)^k f^(k−1) X_H or dz/dt = (−1)^k f^k"),
    )
}

fn c9_nambu_r3n() -> Verdict {
    let (mut total, mut bad) = (0, 0);
    for n in 1..=3 {
        let space = NambuSpaceR3n::new(n).unwrap();
        let chart = space.chart();
        let mut gen = PolyGenerator::new(DEFAULT_SEED + 90 + n as u64);
        for _ in 0..TRIALS {
            let h = gen.polarized(chart);
            let report = verify_relation_r3n(&space, &h.to_map()).unwrap();
            let z_ok = (0..n).all(|i| report.nambu.component(space.z(i)) == h.f()[i].pow(2));
            total += 1;
            bad += usize::from(!(report.passed() && z_ok));
        }
    }
    verdict(
        bad == 0,
        format!("{total} maps over n = 1..3, {bad} violating X^N = Σ f_i X_H^i or dz^i/dt = f_i^2"),
    )
}

fn analytic(t: f64) -> [f64; 3] {
    [(-t).exp(), (-t).exp(), t.exp()]
}

fn final_error(field: &VectorField, h: f64) -> f64 {
    let traj = rk4_integrate(field, &[1.0, 1.0, 1.0], 0.0, 1.0, h).unwrap();
    traj.final_state()
        .iter()
        .zip(analytic(1.0))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn c10_numeric() -> Verdict {
    let chart = Chart::r3();
    let (x, y, z) = (chart.var(0), chart.var(1), chart.var(2));
    let map = RkMap::new(vec![&z * &x, &z * &y]).unwrap();
    let xh = hamiltonian_field(&decompose_polarized(&chart, &map).unwrap());
    let space = NambuSpaceRk1::from_chart(chart.clone()).unwrap();
    let xn = polaris_core::nambu::nambu_field_rk1(&space, &map).unwrap();

    let traj = rk4_integrate(&xh, &[1.0, 1.0, 1.0], 0.0, 1.0, 1e-3).unwrap();
    let drift_h = conservation_report(&map, &traj).unwrap().max_drift();
    let nambu = rk4_integrate(&xn, &[1.0, 1.0, 1.0], 0.0, 1.0, 1e-3);
    let drift_n = match &nambu {
        Ok(t) => conservation_report(&map, t).unwrap().max_drift(),
        Err(_) => f64::INFINITY,
    };
    let errors: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&h| final_error(&xh, h)).collect();
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let order_ok = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    verdict(
        drift_h <= 1e-9 && drift_n <= 1e-8 && order_ok,
        format!(
            "X_H drift {drift_h:.3e} (≤ 1e-9); Nambu drift {drift_n:.3e} (≤ 1e-8); \
             error ratios {:.2}, {:.2} (in [12, 20])",
            ratios[0], ratios[1]
        ),
    )
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run_cli(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_polaris"))
        .args(args)
        .env_remove("POLARIS_SEED")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

fn c11_cli() -> Verdict {
    let worked = fixture("worked.json");
    let worked = worked.to_str().unwrap();
    let args = ["verify", worked, "--seed", "7", "--trials", "20"];
    let (a, code_a) = run_cli(&args);
    let (b, code_b) = run_cli(&args);
    let json_args = ["--json", "verify", worked, "--seed", "7", "--trials", "20"];
    let (ja, _) = run_cli(&json_args);
    let (jb, _) = run_cli(&json_args);
    let identical = a == b && ja == jb && code_a == Some(0) && code_b == Some(0);

    let perturbed = fixture("perturbed.json");
    let (out, code) = run_cli(&["--json", "verify", perturbed.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let nonzero = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["status"] == "fail" && e["residual"].as_str().is_some_and(|r| r != "0"));
    verdict(
        identical && code == Some(1) && nonzero,
        format!("repeat runs identical: {identical}; fault fixture exit {code:?}, nonzero residual: {nonzero}"),
    )
}

type Criterion<'a> = (&'static str, &'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() {
    let start = Instant::now();
    let corpus = Corpus::new();
    let criteria: Vec<Criterion> = vec![
        ("1", "structure check", Box::new(c1_structure)),
        ("2", "duality and closedness", Box::new(|| c2_duality(&corpus))),
        (
            "3",
            "three-route bracket agreement",
            Box::new(|| c3_three_route(&corpus)),
        ),
        ("4", "Lie structure (morphism and Jacobi)", Box::new(|| c4_lie(&corpus))),
        ("5", "closure and module structure", Box::new(|| c5_closure(&corpus))),
        (
            "6",
            "Xi-P identity on all basis forms",
            Box::new(|| c6_xi_poisson(&corpus)),
        ),
        ("7", "classical k=1 suite", Box::new(c7_classical)),
        ("8", "Nambu relation on R^(k+1)", Box::new(c8_nambu_rk1)),
        ("9", "Nambu relation on R^(3n)", Box::new(c9_nambu_r3n)),
        ("10", "numeric conservation and RK4 order", Box::new(c10_numeric)),
        ("11", "CLI determinism and fault detection", Box::new(c11_cli)),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in &criteria {
        let t = Instant::now();
        let v = run();
        println!(
            "criterion {id:>2} {} {title}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed.push(*id);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed.len(),
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

//! Subcommand implementations. Each returns a [`Report`] or an
//! [`InputError`] (exit code 2).

use std::path::PathBuf;

use polaris_core::dynamics::{conservation_report, rk4_integrate, DynamicsError};
use polaris_core::geometry::check_ksymplectic;
use polaris_core::hamiltonian::{bracket, decompose_polarized, hamiltonian_field, HamiltonianError, PolarizedForm};
use polaris_core::nambu::{
    nambu_bracket_r3n, nambu_field_r3n, nambu_field_rk1, verify_relation_r3n, verify_relation_rk1, NambuSpaceR3n,
    NambuSpaceRk1,
};
use polaris_core::properties::{self, FormSet, Residuals};
use polaris_core::random::{PolyGenerator, DEFAULT_SEED};
use polaris_core::{Chart, KSymplecticStructure, RkMap, VectorField};
use serde_json::Value;

use crate::problem::{InputError, Problem, SpaceKind};
use crate::report::{ChartSummary, Entry, Report, Status};

pub const DEFAULT_TRIALS: usize = 100;

/// Flag value, else the file's `tasks.seed`, else 42.
pub fn resolve_seed(flag: Option<u64>, problem: &Problem) -> u64 {
    flag.or(problem.tasks.seed).unwrap_or(DEFAULT_SEED)
}

fn new_report(command: &str, seed: u64, problem: &Problem) -> Report {
    Report::new(command, seed, ChartSummary::new(&problem.chart, problem.space))
}

fn strings(chart: &Chart, polys: &[polaris_core::Polynomial]) -> Value {
    Value::from(polys.iter().map(|p| chart.format(p)).collect::<Vec<_>>())
}

fn polarized(problem: &Problem, name: &str) -> Result<PolarizedForm, InputError> {
    decompose_polarized(&problem.chart, problem.map(name)?)
        .map_err(|e| InputError::Invalid(format!("map `{name}` is not polarized: {e}")))
}

pub fn validate(problem: &Problem, seed: u64) -> Report {
    let mut report = new_report("validate", seed, problem);
    for (name, map) in &problem.maps {
        let entry = match decompose_polarized(&problem.chart, map) {
            Ok(hf) => Entry::new(format!("polarized:{name}"), Status::Pass)
                .with("f", strings(&problem.chart, hf.f()))
                .with("g", strings(&problem.chart, hf.g())),
            Err(e) => {
                let mut entry = Entry::info(format!("polarized:{name}")).with("polarized", false);
                if let Some(reason) = e.not_polarized_reason() {
                    entry = entry.with("reason", format!("NotPolarized({reason})"));
                }
                entry.with("detail", e.to_string())
            }
        };
        report.push(entry);
    }
    report
}

pub fn bracket_cmd(problem: &Problem, seed: u64, h: &str, k: &str) -> Result<Report, InputError> {
    let (hf, kf) = (polarized(problem, h)?, polarized(problem, k)?);
    let value = bracket(&hf, &kf).map_err(|e| InputError::Invalid(e.to_string()))?;
    let chart = &problem.chart;
    let mut entry = Entry::info(format!("bracket:{h},{k}")).with("components", strings(chart, value.components()));
    match decompose_polarized(chart, &value) {
        Ok(split) => {
            entry = entry
                .with("f", strings(chart, split.f()))
                .with("g", strings(chart, split.g()));
        }
        Err(e) => entry = entry.with("decomposition", e.to_string()),
    }
    let mut report = new_report("bracket", seed, problem);
    report.push(entry);
    Ok(report)
}

pub fn field_cmd(problem: &Problem, seed: u64, h: &str) -> Result<Report, InputError> {
    let field = hamiltonian_field(&polarized(problem, h)?);
    let mut report = new_report("field", seed, problem);
    report.push(Entry::info(format!("field:{h}")).with("components", strings(&problem.chart, &field.to_dense())));
    Ok(report)
}

fn nambu_vector_field(problem: &Problem, map: &RkMap) -> Result<VectorField, InputError> {
    let chart = problem.chart.clone();
    let err = |e: polaris_core::NambuError| InputError::Invalid(e.to_string());
    match problem.space {
        SpaceKind::NambuR3n => {
            let space = NambuSpaceR3n::from_chart(chart).map_err(err)?;
            nambu_field_r3n(&space, map.component(0), map.component(1)).map_err(err)
        }
        _ if chart.n() == 1 && chart.k() >= 2 => {
            let space = NambuSpaceRk1::from_chart(chart).map_err(err)?;
            nambu_field_rk1(&space, map).map_err(err)
        }
        _ => Err(InputError::Invalid(
            "Nambu fields need space nambu_r3n or an n = 1, k >= 2 chart".into(),
        )),
    }
}

pub fn nambu_cmd(problem: &Problem, seed: u64, h: &str) -> Result<Report, InputError> {
    let field = nambu_vector_field(problem, problem.map(h)?)?;
    let mut report = new_report("nambu", seed, problem);
    report.push(Entry::info(format!("nambu:{h}")).with("components", strings(&problem.chart, &field.to_dense())));
    Ok(report)
}

fn checked(name: String, chart: &Chart, result: Result<Residuals, HamiltonianError>) -> Entry {
    match result {
        Ok(r) => Entry::from_residuals(name, chart, &r),
        Err(e) => Entry::fail(name, e.to_string()),
    }
}

/// Runs `trial` `trials` times; fails with the first failing trial.
fn random_entry(
    name: &str,
    chart: &Chart,
    trials: usize,
    mut trial: impl FnMut() -> Result<Residuals, String>,
) -> Entry {
    for t in 0..trials {
        let outcome = trial();
        let failing = match outcome {
            Ok(r) if r.is_empty() => continue,
            Ok(r) => Entry::from_residuals(format!("random:{name}"), chart, &r),
            Err(message) => Entry::fail(format!("random:{name}"), message),
        };
        return failing.with("trials", trials).with("failed_trial", t + 1);
    }
    Entry::new(format!("random:{name}"), Status::Pass)
        .with_residual("0")
        .with("trials", trials)
}

fn structure_entry(chart: &Chart) -> Entry {
    let report = check_ksymplectic(&KSymplecticStructure::canonical(chart));
    let entry = Entry::new("structure", if report.passed() { Status::Pass } else { Status::Fail });
    entry.with("summary", report.summary())
}

pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
}

pub fn verify(problem: &Problem, opts: &VerifyOptions) -> Report {
    let chart = &problem.chart;
    let tensor = &problem.tensor;
    let mut report = new_report("verify", opts.seed, problem);
    report.push(structure_entry(chart));
    if problem.maps.is_empty() {
        return report;
    }
    let mut gen = PolyGenerator::new(opts.seed);

    let mut forms = Vec::new();
    for (name, map) in &problem.maps {
        match decompose_polarized(chart, map) {
            Ok(hf) => forms.push((name.clone(), hf)),
            Err(e) => report.push(Entry::fail(format!("polarized:{name}"), e.to_string())),
        }
    }

    for (name, hf) in &forms {
        report.push(Entry::from_residuals(
            format!("duality:{name}"),
            chart,
            &properties::duality(hf),
        ));
        report.push(Entry::from_residuals(
            format!("closedness:{name}"),
            chart,
            &properties::closedness(hf),
        ));
        report.push(checked(
            format!("conservation:{name}"),
            chart,
            properties::conservation(hf),
        ));
        report.push(checked(
            format!("xi_poisson:{name}"),
            chart,
            properties::xi_poisson(hf, tensor, FormSet::Adapted),
        ));
        let b = gen.basic(chart);
        report.push(checked(
            format!("module:{name}"),
            chart,
            properties::module_structure(&b, hf),
        ));
    }

    for (i, (hn, hf)) in forms.iter().enumerate() {
        for (kn, kf) in &forms[i..] {
            let pair = format!("{hn},{kn}");
            report.push(checked(
                format!("three_route:{pair}"),
                chart,
                properties::three_route(hf, kf, tensor),
            ));
            report.push(
                checked(format!("morphism:{pair}"), chart, properties::reversed_morphism(hf, kf))
                    .with("identity", "[X_H,X_K] = X_{K,H}"),
            );
            let closure = match properties::closure(hf, kf) {
                Ok(_) => Entry::new(format!("closure:{pair}"), Status::Pass).with_residual("0"),
                Err(e) => Entry::fail(format!("closure:{pair}"), e.to_string()),
            };
            report.push(closure);
            report.push(checked(
                format!("pairing:{pair}"),
                chart,
                properties::xi_bracket(hf, kf),
            ));
        }
    }

    for (i, (hn, hf)) in forms.iter().enumerate() {
        for (j, (kn, kf)) in forms.iter().enumerate().skip(i) {
            for (ln, lf) in &forms[j..] {
                report.push(checked(
                    format!("jacobi:{hn},{kn},{ln}"),
                    chart,
                    properties::jacobi(hf, kf, lf),
                ));
            }
        }
    }

    nambu_entries(problem, &mut report);
    random_entries(problem, opts.trials, &mut gen, &mut report);
    report
}

fn nambu_entries(problem: &Problem, report: &mut Report) {
    let chart = &problem.chart;
    match problem.space {
        SpaceKind::Canonical => {}
        SpaceKind::NambuRk1 => {
            let space = NambuSpaceRk1::from_chart(chart.clone()).expect("validated on load");
            for (name, map) in &problem.maps {
                report.push(relation_entry(
                    &format!("nambu_relation:{name}"),
                    chart,
                    verify_relation_rk1(&space, map),
                ));
            }
        }
        SpaceKind::NambuR3n => {
            let space = NambuSpaceR3n::from_chart(chart.clone()).expect("validated on load");
            for (name, map) in &problem.maps {
                report.push(relation_entry(
                    &format!("nambu_relation:{name}"),
                    chart,
                    verify_relation_r3n(&space, map),
                ));
                let (h1, h2) = (map.component(0), map.component(1));
                let name = format!("first_integrals:{name}");
                let entry = match (
                    nambu_bracket_r3n(&space, h1, h1, h2),
                    nambu_bracket_r3n(&space, h2, h1, h2),
                ) {
                    (Ok(a), Ok(b)) => {
                        let r: Residuals = [("(H1,H2,H1)", a), ("(H1,H2,H2)", b)]
                            .into_iter()
                            .filter(|(_, p)| !p.is_zero())
                            .map(|(l, p)| (l.to_string(), p))
                            .collect();
                        Entry::from_residuals(name, chart, &r)
                    }
                    (Err(e), _) | (_, Err(e)) => Entry::fail(name, e.to_string()),
                };
                report.push(entry);
            }
        }
    }
}

fn relation_entry(
    name: &str,
    chart: &Chart,
    result: Result<polaris_core::RelationReport, polaris_core::NambuError>,
) -> Entry {
    match result {
        Ok(r) => {
            let names = chart.display_names();
            let residuals: Residuals = r
                .residual
                .iter()
                .map(|(i, p)| (format!("d{}/dt", names[i]), p.clone()))
                .collect();
            Entry::from_residuals(name, chart, &residuals)
        }
        Err(e) => Entry::fail(name, e.to_string()),
    }
}

fn random_entries(problem: &Problem, trials: usize, gen: &mut PolyGenerator, report: &mut Report) {
    let chart = &problem.chart;
    let tensor = &problem.tensor;
    let s = |e: HamiltonianError| e.to_string();
    report.push(random_entry("duality", chart, trials, || {
        let h = gen.polarized(chart);
        let mut r = properties::duality(&h);
        r.extend(properties::closedness(&h));
        Ok(r)
    }));
    report.push(random_entry("three_route", chart, trials, || {
        let (h, k) = (gen.polarized(chart), gen.polarized(chart));
        properties::three_route(&h, &k, tensor).map_err(s)
    }));
    report.push(random_entry("morphism", chart, trials, || {
        let (h, k) = (gen.polarized(chart), gen.polarized(chart));
        properties::reversed_morphism(&h, &k).map_err(s)
    }));
    report.push(random_entry("closure", chart, trials, || {
        let (h, k) = (gen.polarized(chart), gen.polarized(chart));
        properties::closure(&h, &k).map(|_| Vec::new()).map_err(s)
    }));
    report.push(random_entry("module", chart, trials, || {
        let (b, h) = (gen.basic(chart), gen.polarized(chart));
        properties::module_structure(&b, &h).map_err(s)
    }));
    report.push(random_entry("xi_poisson", chart, trials, || {
        let h = gen.polarized(chart);
        properties::xi_poisson(&h, tensor, FormSet::Adapted).map_err(s)
    }));
    report.push(random_entry("jacobi", chart, trials, || {
        let (h, k, l) = (gen.polarized(chart), gen.polarized(chart), gen.polarized(chart));
        properties::jacobi(&h, &k, &l).map_err(s)
    }));
    if chart.k() == 1 {
        report.push(random_entry("classical", chart, trials, || {
            let dim = chart.dim();
            let (h, k, l) = (gen.polynomial(dim, 2), gen.polynomial(dim, 2), gen.polynomial(dim, 2));
            properties::classical(chart, &h, &k, &l).map_err(s)
        }));
    }
    let relation = |m: &RkMap| -> Result<Residuals, String> {
        let report = match problem.space {
            SpaceKind::NambuRk1 => {
                verify_relation_rk1(&NambuSpaceRk1::from_chart(chart.clone()).expect("validated"), m)
            }
            SpaceKind::NambuR3n => {
                verify_relation_r3n(&NambuSpaceR3n::from_chart(chart.clone()).expect("validated"), m)
            }
            SpaceKind::Canonical => unreachable!("guarded below"),
        }
        .map_err(|e| e.to_string())?;
        let names = chart.display_names();
        Ok(report
            .residual
            .iter()
            .map(|(i, p)| (format!("d{}/dt", names[i]), p.clone()))
            .collect())
    };
    if problem.space != SpaceKind::Canonical {
        report.push(random_entry("nambu_relation", chart, trials, || {
            relation(&gen.polarized(chart).to_map())
        }));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Hamiltonian,
    Nambu,
}

pub struct IntegrateOptions {
    pub seed: u64,
    pub map: String,
    pub flow: Flow,
    pub x0: Option<Vec<f64>>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub h: Option<f64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

pub fn integrate(problem: &Problem, opts: &IntegrateOptions) -> Result<Report, InputError> {
    let chart = &problem.chart;
    let map = problem.map(&opts.map)?;
    let field = match opts.flow {
        Flow::Hamiltonian => hamiltonian_field(&polarized(problem, &opts.map)?),
        Flow::Nambu => nambu_vector_field(problem, map)?,
    };
    let x0 = opts
        .x0
        .clone()
        .or_else(|| problem.tasks.x0.clone())
        .ok_or_else(|| InputError::Invalid("no initial state: pass --x0 or set tasks.x0".into()))?;
    if x0.len() != chart.dim() {
        return Err(InputError::Invalid(format!(
            "x0 has {} entries, chart has {}",
            x0.len(),
            chart.dim()
        )));
    }
    let t0 = opts.t0.or(problem.tasks.t0).unwrap_or(0.0);
    let t1 = opts.t1.or(problem.tasks.t1).unwrap_or(1.0);
    let h = opts.h.or(problem.tasks.h).unwrap_or(1e-3);
    if !(h.is_finite() && h > 0.0) {
        return Err(InputError::Invalid(format!("step h = {h} must be positive")));
    }
    if let Some(tol) = opts.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(InputError::Invalid(format!("tolerance {tol} must be non-negative")));
        }
    }

    let flow = match opts.flow {
        Flow::Hamiltonian => "hamiltonian",
        Flow::Nambu => "nambu",
    };
    let mut report = new_report("integrate", opts.seed, problem);
    let traj = match rk4_integrate(&field, &x0, t0, t1, h) {
        Ok(t) => t.with_field_id(format!("{flow}:{}", opts.map)),
        Err(e @ DynamicsError::BlowUp { .. }) => {
            report.push(Entry::fail(format!("trajectory:{flow}:{}", opts.map), e.to_string()));
            return Ok(report);
        }
        Err(e) => return Err(InputError::Invalid(e.to_string())),
    };
    let final_state: Vec<Value> = traj.final_state().iter().map(|&v| Value::from(v)).collect();
    report.push(
        Entry::info(format!("trajectory:{}", traj.field_id()))
            .with("steps", traj.len() - 1)
            .with("t_final", *traj.times().last().expect("non-empty"))
            .with("final_state", final_state),
    );
    let drift = conservation_report(map, &traj).map_err(|e| InputError::Invalid(e.to_string()))?;
    for (p, d) in drift.drift.iter().enumerate() {
        let status = match opts.tol {
            Some(tol) if *d <= tol => Status::Pass,
            Some(_) => Status::Fail,
            None => Status::Info,
        };
        let mut entry = Entry::new(format!("drift:{}[{}]", opts.map, p + 1), status).with_residual(*d);
        if let Some(tol) = opts.tol {
            entry = entry.with("tolerance", tol);
        }
        report.push(entry);
    }
    if let Some(path) = &opts.out {
        traj.write_csv(path, &chart.display_names())
            .map_err(|e| InputError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
    }
    Ok(report)
}

//! Problem files: a single JSON document describing a chart, named maps
//! and task defaults.
//!
//! ```json
//! {
//!   "n": 1, "k": 2,
//!   "space": "canonical",
//!   "aliases": { "x": "x1_1", "y": "x2_1", "z": "q1" },
//!   "hamiltonians": { "H": ["z*x", "z*y"], "K": ["x", "y"] },
//!   "poisson": [ { "i": "x", "j": "z", "p": 1, "q": 1, "r": 1, "w": "1" } ],
//!   "tasks": { "x0": [1, 1, 1], "t0": 0, "t1": 1, "h": 0.001, "seed": 42, "trials": 100 }
//! }
//! ```
//!
//! `poisson` entries are added to the canonical tensor; `p`, `q`, `r` are
//! 1-based. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use polaris_core::hamiltonian::{canonical_poisson_tensor, GeneralPoissonTensor, WIndex};
use polaris_core::parse::{parse_poly, ParseError};
use polaris_core::{Chart, RkMap};
use serde::Deserialize;
use thiserror::Error;

/// Largest chart dimension `n(k+1)` a problem file may request.
pub const MAX_DIM: usize = 48;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed problem file: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
    #[error("map `{map}` component {component}: {source} in `{text}`")]
    Parse {
        map: String,
        component: usize,
        text: String,
        source: ParseError,
    },
    #[error("no map named `{0}`")]
    UnknownMap(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    #[default]
    Canonical,
    NambuRk1,
    NambuR3n,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Canonical => "canonical",
            Self::NambuRk1 => "nambu_rk1",
            Self::NambuR3n => "nambu_r3n",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonEntry {
    pub i: String,
    pub j: String,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub w: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tasks {
    pub x0: Option<Vec<f64>>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub h: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub space: SpaceKind,
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    #[serde(default)]
    pub hamiltonians: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub poisson: Vec<PoissonEntry>,
    #[serde(default)]
    pub tasks: Tasks,
}

/// A validated problem: chart, parsed maps and the Poisson tensor.
#[derive(Debug, Clone)]
pub struct Problem {
    pub chart: Chart,
    pub space: SpaceKind,
    pub maps: Vec<(String, RkMap)>,
    pub tensor: GeneralPoissonTensor,
    pub perturbed: bool,
    pub tasks: Tasks,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Self, InputError> {
        let invalid = |m: String| InputError::Invalid(m);
        if file.n == 0 || file.k == 0 {
            return Err(invalid(format!(
                "n and k must be positive (n = {}, k = {})",
                file.n, file.k
            )));
        }
        if file.n.saturating_mul(file.k.saturating_add(1)) > MAX_DIM {
            return Err(invalid(format!("chart dimension n(k+1) exceeds {MAX_DIM}")));
        }
        match file.space {
            SpaceKind::NambuRk1 if file.n != 1 || file.k < 2 => {
                return Err(invalid("space nambu_rk1 needs n = 1 and k >= 2".into()))
            }
            SpaceKind::NambuR3n if file.k != 2 => return Err(invalid("space nambu_r3n needs k = 2".into())),
            _ => {}
        }
        let mut chart = Chart::new(file.n, file.k).map_err(|e| invalid(e.to_string()))?;
        for (alias, target) in &file.aliases {
            chart = chart.with_alias(alias, target).map_err(|e| invalid(e.to_string()))?;
        }

        let mut maps = Vec::with_capacity(file.hamiltonians.len());
        for (name, exprs) in &file.hamiltonians {
            if exprs.len() != file.k {
                return Err(invalid(format!(
                    "map `{name}` has {} components but k = {}",
                    exprs.len(),
                    file.k
                )));
            }
            let comps = exprs
                .iter()
                .enumerate()
                .map(|(c, text)| {
                    parse_poly(text, &chart).map_err(|source| InputError::Parse {
                        map: name.clone(),
                        component: c + 1,
                        text: text.clone(),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            maps.push((name.clone(), RkMap::new(comps).map_err(|e| invalid(e.to_string()))?));
        }

        let mut tensor = canonical_poisson_tensor(&chart);
        for (idx, entry) in file.poisson.iter().enumerate() {
            let var = |name: &str| {
                chart
                    .resolve(name)
                    .ok_or_else(|| invalid(format!("poisson entry {}: unknown variable `{name}`", idx + 1)))
            };
            let slot = |v: usize| {
                if (1..=file.k).contains(&v) {
                    Ok(v - 1)
                } else {
                    Err(invalid(format!(
                        "poisson entry {}: slot {v} outside 1..={}",
                        idx + 1,
                        file.k
                    )))
                }
            };
            let index = WIndex {
                i: var(&entry.i)?,
                j: var(&entry.j)?,
                p: slot(entry.p)?,
                q: slot(entry.q)?,
                r: slot(entry.r)?,
            };
            let w = parse_poly(&entry.w, &chart).map_err(|source| InputError::Parse {
                map: format!("poisson[{}]", idx + 1),
                component: 1,
                text: entry.w.clone(),
                source,
            })?;
            tensor.add_coefficient(index, w).map_err(|e| invalid(e.to_string()))?;
        }

        if let Some(x0) = &file.tasks.x0 {
            if x0.len() != chart.dim() {
                return Err(invalid(format!(
                    "tasks.x0 has {} entries, chart has {}",
                    x0.len(),
                    chart.dim()
                )));
            }
        }

        Ok(Self {
            perturbed: !file.poisson.is_empty(),
            chart,
            space: file.space,
            maps,
            tensor,
            tasks: file.tasks,
        })
    }

    pub fn map(&self, name: &str) -> Result<&RkMap, InputError> {
        self.maps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| InputError::UnknownMap(name.to_string()))
    }
}

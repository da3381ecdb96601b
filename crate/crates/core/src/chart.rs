//! The canonical adapted chart on `R^{n(k+1)}`.
//!
//! Coordinates are the fiber variables `x^{pi}` (`p = 1..k`, `i = 1..n`)
//! followed by the leaf variables `x^i`. Fiber variable `x^{pi}` has index
//! `(p-1)*n + (i-1)` and is written `x{p}_{i}`; leaf variable `x^i` has
//! index `k*n + (i-1)` and is written `q{i}`. The index methods below take
//! zero-based `p` and `i`.
//!
//! A chart may also carry aliases (for instance `x`, `y`, `z` on the
//! `n = 1, k = 2` chart). Aliases are used for parsing and, when present,
//! for printing.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("chart parameters must be positive (n = {n}, k = {k})")]
    InvalidDimensions { n: usize, k: usize },
    #[error("alias `{0}` collides with a canonical variable name")]
    AliasCollision(String),
    #[error("alias `{0}` is defined twice")]
    DuplicateAlias(String),
    #[error("alias `{0}` is not a valid identifier")]
    InvalidAlias(String),
    #[error("alias `{alias}` targets unknown variable `{target}`")]
    UnknownTarget { alias: String, target: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    n: usize,
    k: usize,
    aliases: Vec<(String, usize)>,
    lookup: BTreeMap<String, usize>,
}

impl Chart {
    pub fn new(n: usize, k: usize) -> Result<Self, ChartError> {
        if n == 0 || k == 0 {
            return Err(ChartError::InvalidDimensions { n, k });
        }
        Ok(Self {
            n,
            k,
            aliases: Vec::new(),
            lookup: BTreeMap::new(),
        })
    }

    /// The `n = 1, k = 2` chart on `R³` with `x ↦ x1_1`, `y ↦ x2_1`,
    /// `z ↦ q1`.
    pub fn r3() -> Self {
        Self::new(1, 2)
            .and_then(|c| c.with_alias("x", "x1_1"))
            .and_then(|c| c.with_alias("y", "x2_1"))
            .and_then(|c| c.with_alias("z", "q1"))
            .expect("static alias table")
    }

    /// Registers `alias` for the variable named `target` (canonical name
    /// or an earlier alias).
    pub fn with_alias(mut self, alias: &str, target: &str) -> Result<Self, ChartError> {
        let valid = alias
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && alias.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(ChartError::InvalidAlias(alias.to_string()));
        }
        if self.parse_canonical(alias).is_some() || looks_canonical(alias) {
            return Err(ChartError::AliasCollision(alias.to_string()));
        }
        if self.lookup.contains_key(alias) {
            return Err(ChartError::DuplicateAlias(alias.to_string()));
        }
        let index = self.resolve(target).ok_or_else(|| ChartError::UnknownTarget {
            alias: alias.to_string(),
            target: target.to_string(),
        })?;
        self.aliases.push((alias.to_string(), index));
        self.lookup.insert(alias.to_string(), index);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total dimension `n(k+1)`.
    pub fn dim(&self) -> usize {
        self.n * (self.k + 1)
    }

    /// Same `(n, k)` layout, regardless of aliases.
    pub fn same_layout(&self, other: &Chart) -> bool {
        self.n == other.n && self.k == other.k
    }

    /// Index of fiber variable `x^{(p+1)(i+1)}`.
    pub fn fiber(&self, p: usize, i: usize) -> usize {
        assert!(p < self.k && i < self.n, "fiber index out of range");
        p * self.n + i
    }

    /// Index of leaf variable `x^{i+1}`.
    pub fn leaf(&self, i: usize) -> usize {
        assert!(i < self.n, "leaf index out of range");
        self.k * self.n + i
    }

    pub fn is_leaf(&self, index: usize) -> bool {
        (self.k * self.n..self.dim()).contains(&index)
    }

    pub fn is_fiber(&self, index: usize) -> bool {
        index < self.k * self.n
    }

    /// `(p, i)` (zero-based) of a fiber index.
    pub fn fiber_position(&self, index: usize) -> Option<(usize, usize)> {
        self.is_fiber(index).then(|| (index / self.n, index % self.n))
    }

    /// `i` (zero-based) of a leaf index.
    pub fn leaf_position(&self, index: usize) -> Option<usize> {
        self.is_leaf(index).then(|| index - self.k * self.n)
    }

    pub fn fiber_indices(&self) -> std::ops::Range<usize> {
        0..self.k * self.n
    }

    pub fn leaf_indices(&self) -> std::ops::Range<usize> {
        self.k * self.n..self.dim()
    }

    pub fn canonical_name(&self, index: usize) -> String {
        match (self.fiber_position(index), self.leaf_position(index)) {
            (Some((p, i)), _) => format!("x{}_{}", p + 1, i + 1),
            (_, Some(i)) => format!("q{}", i + 1),
            _ => panic!("variable index {index} out of range"),
        }
    }

    fn parse_canonical(&self, name: &str) -> Option<usize> {
        fn positive(s: &str) -> Option<usize> {
            if s.is_empty() || s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        }
        if let Some(rest) = name.strip_prefix('q') {
            let i = positive(rest)?;
            return (i <= self.n).then(|| self.leaf(i - 1));
        }
        let rest = name.strip_prefix('x')?;
        let (p, i) = rest.split_once('_')?;
        let (p, i) = (positive(p)?, positive(i)?);
        (p <= self.k && i <= self.n).then(|| self.fiber(p - 1, i - 1))
    }

    /// Resolves a canonical name or alias to a variable index.
    pub fn resolve(&self, name: &str) -> Option<usize> {
        self.parse_canonical(name).or_else(|| self.lookup.get(name).copied())
    }

    pub fn aliases(&self) -> &[(String, usize)] {
        &self.aliases
    }

    /// Print names: the first alias registered for a variable, else its
    /// canonical name.
    pub fn display_names(&self) -> Vec<String> {
        (0..self.dim())
            .map(|idx| {
                self.aliases
                    .iter()
                    .find(|(_, i)| *i == idx)
                    .map(|(a, _)| a.clone())
                    .unwrap_or_else(|| self.canonical_name(idx))
            })
            .collect()
    }

    pub fn var(&self, index: usize) -> Polynomial {
        Polynomial::var(self.dim(), index)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.dim())
    }

    pub fn constant(&self, value: i64) -> Polynomial {
        Polynomial::from_int(self.dim(), value)
    }

    /// Renders a polynomial with this chart's display names.
    pub fn format(&self, p: &Polynomial) -> String {
        p.display_with(&self.display_names()).to_string()
    }
}

/// `q<digits>` or `x<digits>_<digits>`, whether or not in range.
fn looks_canonical(name: &str) -> bool {
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if let Some(rest) = name.strip_prefix('q') {
        return digits(rest);
    }
    name.strip_prefix('x')
        .and_then(|rest| rest.split_once('_'))
        .is_some_and(|(p, i)| digits(p) && digits(i))
}

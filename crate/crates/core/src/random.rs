//! Seeded generators for property trials.
//!
//! Coefficients are integers in `[-3, 3]`; basic polynomials use leaf
//! monomials of total degree at most 2. The stream is a ChaCha8 generator,
//! so a seed reproduces the same corpus on every platform.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::hamiltonian::PolarizedForm;
use crate::poly::Polynomial;
use crate::rational::int;

pub const DEFAULT_SEED: u64 = 42;
pub const COEFF_BOUND: i64 = 3;
pub const LEAF_DEGREE: u32 = 2;

/// Exponent vectors of total degree `≤ max_degree` in the given variables.
pub fn monomials(nvars: usize, vars: &[usize], max_degree: u32) -> Vec<Vec<u8>> {
    (0..=max_degree as usize)
        .flat_map(|d| vars.iter().copied().combinations_with_replacement(d))
        .map(|picked| {
            let mut exps = vec![0u8; nvars];
            for v in picked {
                exps[v] += 1;
            }
            exps
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PolyGenerator {
    rng: ChaCha8Rng,
}

impl PolyGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn coefficient(&mut self) -> i64 {
        self.rng.gen_range(-COEFF_BOUND..=COEFF_BOUND)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }

    fn combine(&mut self, nvars: usize, basis: &[Vec<u8>]) -> Polynomial {
        let terms: Vec<_> = basis
            .iter()
            .map(|exps| (exps.clone(), int(self.coefficient())))
            .collect();
        Polynomial::from_terms(nvars, terms).expect("generated exponents are in range")
    }

    /// Random basic polynomial with leaf degree `≤ 2`.
    pub fn basic(&mut self, chart: &Chart) -> Polynomial {
        let leaves: Vec<usize> = chart.leaf_indices().collect();
        let basis = monomials(chart.dim(), &leaves, LEAF_DEGREE);
        self.combine(chart.dim(), &basis)
    }

    /// Random polarized map: every `f_j` and `g^p` drawn by [`Self::basic`].
    pub fn polarized(&mut self, chart: &Chart) -> PolarizedForm {
        let f = (0..chart.n()).map(|_| self.basic(chart)).collect();
        let g = (0..chart.k()).map(|_| self.basic(chart)).collect();
        PolarizedForm::new(chart, f, g).expect("basic coefficients")
    }

    /// Random polynomial of total degree `≤ max_degree` in every variable.
    pub fn polynomial(&mut self, nvars: usize, max_degree: u32) -> Polynomial {
        let vars: Vec<usize> = (0..nvars).collect();
        let basis = monomials(nvars, &vars, max_degree);
        self.combine(nvars, &basis)
    }

    /// Uniformly random permutation of `0..m`.
    pub fn permutation(&mut self, m: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..m).collect();
        v.shuffle(&mut self.rng);
        v
    }
}

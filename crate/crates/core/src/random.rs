//! Seeded random data for property checks: polynomials of degree at most 2
//! with integer coefficients in `[-5, 5]`, and sections, forms and
//! connections built from them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{Algebroid, Section, Target};
use crate::connections::{ChristoffelEntry, Connection};
use crate::scalars::{rat, Poly};
use crate::vforms::{MultiIndex, VForm};

pub const MAX_DEGREE: u32 = 2;
pub const COEFF_BOUND: i64 = 5;

pub struct FormSampler<'a> {
    algebroid: &'a Algebroid,
    rng: ChaCha8Rng,
}

impl<'a> FormSampler<'a> {
    pub fn new(algebroid: &'a Algebroid, seed: u64) -> Self {
        FormSampler {
            algebroid,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn poly(&mut self) -> Poly {
        let n = self.algebroid.nvars();
        let mut terms = Vec::new();
        monomials_up_to(n, MAX_DEGREE, &mut Vec::new(), &mut terms);
        let terms: Vec<_> = terms
            .into_iter()
            .map(|e| (e, rat(self.rng.gen_range(-COEFF_BOUND..=COEFF_BOUND))))
            .collect();
        Poly::from_terms(n, terms).expect("exponent lengths")
    }

    pub fn section(&mut self) -> Section {
        self.bundle_section(self.algebroid.rank())
    }

    pub fn bundle_section(&mut self, rank: usize) -> Section {
        Section::new((0..rank).map(|_| self.poly()).collect())
    }

    /// A random form; degrees above the rank give the zero form.
    pub fn form(&mut self, degree: usize, target: Target) -> VForm {
        let fiber = target.rank(self.algebroid.rank());
        let comps: Vec<_> = MultiIndex::all(self.algebroid.rank(), degree)
            .into_iter()
            .map(|idx| (idx, self.bundle_section(fiber)))
            .collect();
        VForm::from_components(self.algebroid, degree, target, comps).expect("sampled components")
    }

    /// A connection with every Christoffel symbol random.
    pub fn connection(&mut self, algebroid: Arc<Algebroid>, bundle: Target) -> Connection {
        let (r, m) = (algebroid.rank(), bundle.rank(algebroid.rank()));
        let mut entries = Vec::with_capacity(r * m * m);
        for a in 0..r {
            for alpha in 0..m {
                for beta in 0..m {
                    entries.push(ChristoffelEntry {
                        a,
                        alpha,
                        beta,
                        value: self.poly(),
                    });
                }
            }
        }
        Connection::new(algebroid, bundle, entries).expect("sampled christoffel table")
    }

    /// A random connection on `A`, symmetrized.
    pub fn torsion_free(&mut self, algebroid: Arc<Algebroid>) -> Connection {
        self.connection(algebroid, Target::Algebroid)
            .symmetrize()
            .expect("connection on A")
    }
}

fn monomials_up_to(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for e in 0..=budget {
        prefix.push(e);
        monomials_up_to(n, budget - e, prefix, out);
        prefix.pop();
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Ring, Series, Valuation, Zq};

/// Outcome of the randomized coefficient-layer law checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub elements: usize,
    pub additive: usize,
    pub multiplicative: usize,
    pub unital: bool,
    pub period: usize,
    pub valuation_preserved: usize,
    pub gauss_pairs: usize,
    /// Pairs inside the stability guard (both minimal terms survive t^T and
    /// v(f) + v(g) < N).
    pub gauss_guarded: usize,
    pub gauss_multiplicative: usize,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        let n = self.elements;
        self.additive == n
            && self.multiplicative == n
            && self.unital
            && self.period == n
            && self.valuation_preserved == n
            && self.gauss_multiplicative == self.gauss_guarded
    }
}

impl Ring {
    fn random_scaled<R: Rng + ?Sized>(&self, rng: &mut R) -> Zq {
        let k = rng.gen_range(0..self.precision());
        self.mul(&self.p_pow(k), &self.random(rng))
    }

    fn random_series_scaled<R: Rng + ?Sized>(&self, rng: &mut R) -> Series {
        let len = rng.gen_range(1..=self.truncation());
        let shift = rng.gen_range(0..self.precision());
        let terms = (0..len).map(|_| self.mul(&self.p_pow(shift + rng.gen_range(0..2)), &self.random(rng))).collect();
        self.s_from_terms(terms, 0)
    }

    /// Lowest index carrying the minimal valuation.
    fn leading_index(&self, f: &Series) -> Option<usize> {
        let v = self.gauss_valuation(f);
        f.terms().iter().position(|c| self.valuation(c) == v)
    }

    /// τ additive, multiplicative, unital, valuation-preserving, τ^r = id on
    /// `count` random elements; Gauss valuation multiplicative on guarded
    /// pairs of random series.
    pub fn check_laws(&self, count: usize, seed: u64) -> LawReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full = self.work_prec() as i64;
        let mut rep = LawReport {
            elements: count,
            additive: 0,
            multiplicative: 0,
            unital: self.congruent(&self.frob(&self.one()), &self.one(), full),
            period: 0,
            valuation_preserved: 0,
            gauss_pairs: 0,
            gauss_guarded: 0,
            gauss_multiplicative: 0,
        };
        for _ in 0..count {
            let (a, b) = (self.random_scaled(&mut rng), self.random_scaled(&mut rng));
            let (fa, fb) = (self.frob(&a), self.frob(&b));
            rep.additive += usize::from(self.congruent(&self.frob(&self.add(&a, &b)), &self.add(&fa, &fb), full));
            rep.multiplicative += usize::from(self.congruent(&self.frob(&self.mul(&a, &b)), &self.mul(&fa, &fb), full));
            rep.period += usize::from(self.congruent(&self.frob_pow(&a, self.r()), &a, full));
            rep.valuation_preserved += usize::from(self.valuation(&fa) == self.valuation(&a));
        }
        let pairs = count / 10;
        for _ in 0..pairs {
            let (f, g) = (self.random_series_scaled(&mut rng), self.random_series_scaled(&mut rng));
            rep.gauss_pairs += 1;
            let (vf, vg) = (self.gauss_valuation(&f), self.gauss_valuation(&g));
            let (Valuation::Finite(a), Valuation::Finite(b)) = (vf, vg) else {
                continue;
            };
            let (Some(i), Some(j)) = (self.leading_index(&f), self.leading_index(&g)) else {
                continue;
            };
            if i + j >= self.truncation() || a + b >= self.precision() as i64 {
                continue;
            }
            rep.gauss_guarded += 1;
            rep.gauss_multiplicative += usize::from(self.gauss_valuation(&self.s_mul(&f, &g)) == Valuation::Finite(a + b));
        }
        rep
    }
}

use serde::{Deserialize, Serialize};

use super::{Ring, Valuation, Zq};
use crate::error::{input_err, precision_err, Result};

/// Truncated power series p^{-denom} * sum_i terms[i] t^i.
///
/// `terms` never exceeds the truncation of the ring that produced it;
/// a constant (point-frame) element has a single term, so the same value is
/// meaningful in every truncation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Series {
    pub(crate) terms: Vec<Zq>,
    pub(crate) denom: u32,
}

/// Wire form: `{"denom_exp": d, "terms": [[r ints], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub denom_exp: u32,
    pub terms: Vec<Vec<i64>>,
}

impl Series {
    pub fn terms(&self) -> &[Zq] {
        &self.terms
    }
    pub fn denom_exp(&self) -> u32 {
        self.denom
    }
    /// Highest stored t-degree plus one (0 for the zero series).
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, i: usize) -> Zq {
        self.terms.get(i).copied().unwrap_or_default()
    }
}

impl Ring {
    fn trim(&self, mut s: Series) -> Series {
        let t = self.truncation();
        s.terms.truncate(t);
        while let Some(last) = s.terms.last() {
            if self.is_zero(last) {
                s.terms.pop();
            } else {
                break;
            }
        }
        if s.terms.is_empty() {
            s.denom = 0;
        }
        s
    }

    /// Removes common factors of p from a series carrying a denominator.
    pub fn s_normalize(&self, s: Series) -> Series {
        let mut s = self.trim(s);
        while s.denom > 0 && s.terms.iter().all(|c| self.valuation(c).at_least(1)) {
            s.terms = s.terms.iter().map(|c| self.div_p_pow(c, 1).expect("checked divisibility")).collect();
            s.denom -= 1;
        }
        s
    }

    pub fn s_zero(&self) -> Series {
        Series::default()
    }
    pub fn s_const(&self, a: Zq) -> Series {
        self.trim(Series { terms: vec![a], denom: 0 })
    }
    pub fn s_int(&self, v: i64) -> Series {
        self.s_const(self.from_int(v))
    }
    pub fn s_one(&self) -> Series {
        self.s_int(1)
    }
    /// The monomial a * t^k.
    pub fn s_monomial(&self, a: Zq, k: usize) -> Series {
        let mut terms = vec![Zq::default(); k + 1];
        terms[k] = a;
        self.trim(Series { terms, denom: 0 })
    }
    pub fn s_from_terms(&self, terms: Vec<Zq>, denom: u32) -> Series {
        self.s_normalize(Series { terms, denom })
    }

    fn lift_denom(&self, s: &Series, d: u32) -> Vec<Zq> {
        let k = d - s.denom;
        if k == 0 {
            return s.terms.clone();
        }
        let pk = self.p_pow(k);
        s.terms.iter().map(|c| self.mul(c, &pk)).collect()
    }

    pub fn s_add(&self, f: &Series, g: &Series) -> Series {
        let d = f.denom.max(g.denom);
        let (a, b) = (self.lift_denom(f, d), self.lift_denom(g, d));
        let n = a.len().max(b.len());
        let terms = (0..n)
            .map(|i| self.add(a.get(i).unwrap_or(&Zq::default()), b.get(i).unwrap_or(&Zq::default())))
            .collect();
        let s = Series { terms, denom: d };
        if d == 0 {
            self.trim(s)
        } else {
            self.s_normalize(s)
        }
    }

    pub fn s_neg(&self, f: &Series) -> Series {
        Series { terms: f.terms.iter().map(|c| self.neg(c)).collect(), denom: f.denom }
    }

    pub fn s_sub(&self, f: &Series, g: &Series) -> Series {
        self.s_add(f, &self.s_neg(g))
    }

    pub fn s_scale(&self, a: &Zq, f: &Series) -> Series {
        let s = Series { terms: f.terms.iter().map(|c| self.mul(a, c)).collect(), denom: f.denom };
        if s.denom == 0 {
            self.trim(s)
        } else {
            self.s_normalize(s)
        }
    }

    pub fn s_mul(&self, f: &Series, g: &Series) -> Series {
        if f.terms.is_empty() || g.terms.is_empty() {
            return Series::default();
        }
        let t = self.truncation();
        let n = (f.terms.len() + g.terms.len() - 1).min(t);
        let mut terms = vec![Zq::default(); n];
        for (i, a) in f.terms.iter().enumerate() {
            if i >= n || self.is_zero(a) {
                continue;
            }
            for (j, b) in g.terms.iter().enumerate().take(n - i) {
                terms[i + j] = self.add(&terms[i + j], &self.mul(a, b));
            }
        }
        let s = Series { terms, denom: f.denom + g.denom };
        if s.denom == 0 {
            self.trim(s)
        } else {
            self.s_normalize(s)
        }
    }

    /// Multiplies by p^k (k may be negative: the denominator grows).
    pub fn s_mul_p_pow(&self, f: &Series, k: i64) -> Series {
        if k >= 0 {
            self.s_scale(&self.p_pow(k as u32), f)
        } else {
            self.s_normalize(Series { terms: f.terms.clone(), denom: f.denom + (-k) as u32 })
        }
    }

    /// Exact division by p^k of an integral series, failing when not divisible.
    pub fn s_div_p_pow(&self, f: &Series, k: u32) -> Result<Series> {
        if f.denom != 0 {
            return Err(input_err!("s_div_p_pow expects an integral series"));
        }
        let terms = f
            .terms
            .iter()
            .map(|c| self.div_p_pow(c, k))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| precision_err!("series not divisible by p^{k}"))?;
        Ok(self.trim(Series { terms, denom: 0 }))
    }

    /// Frobenius lift: tau on coefficients and t -> t^p.
    pub fn s_frob(&self, f: &Series) -> Series {
        self.s_frob_pow(f, 1)
    }

    /// k-fold Frobenius lift, t -> t^{p^k}.
    pub fn s_frob_pow(&self, f: &Series, k: usize) -> Series {
        if f.terms.is_empty() {
            return Series::default();
        }
        let t = self.truncation();
        let step = self.p().checked_pow(k as u32).map(|s| s as usize).unwrap_or(usize::MAX);
        let mut terms = vec![Zq::default(); t.min(f.terms.len().saturating_sub(1).saturating_mul(step).saturating_add(1))];
        for (i, c) in f.terms.iter().enumerate() {
            let pos = i.saturating_mul(step);
            if pos >= terms.len() {
                break;
            }
            terms[pos] = self.frob_pow(c, k);
        }
        self.trim(Series { terms, denom: f.denom })
    }

    /// Coefficientwise Frobenius only (t fixed).
    pub fn s_frob_coeffs(&self, f: &Series, k: usize) -> Series {
        Series { terms: f.terms.iter().map(|c| self.frob_pow(c, k)).collect(), denom: f.denom }
    }

    /// d/dt.
    pub fn s_deriv(&self, f: &Series) -> Series {
        let terms = f.terms.iter().enumerate().skip(1).map(|(i, c)| self.scale_int(c, i as u64)).collect();
        let s = Series { terms, denom: f.denom };
        if s.denom == 0 {
            self.trim(s)
        } else {
            self.s_normalize(s)
        }
    }

    /// Value at t = 0, kept as a constant series (denominator preserved).
    pub fn s_at_zero(&self, f: &Series) -> Series {
        let s = Series { terms: f.terms.iter().take(1).copied().collect(), denom: f.denom };
        self.s_normalize(s)
    }

    /// Inverse of an integral series with unit constant term.
    pub fn s_inv(&self, f: &Series) -> Result<Series> {
        if f.denom != 0 {
            return Err(input_err!("s_inv expects an integral series"));
        }
        let c0 = f.coeff(0);
        let c0_inv = self.inv(&c0).map_err(|_| input_err!("series constant term is not a unit"))?;
        let t = self.truncation();
        let mut g = vec![Zq::default(); t];
        g[0] = c0_inv;
        for n in 1..t {
            let mut acc = Zq::default();
            for k in 1..=n.min(f.terms.len().saturating_sub(1)) {
                acc = self.add(&acc, &self.mul(&f.terms[k], &g[n - k]));
            }
            g[n] = self.neg(&self.mul(&c0_inv, &acc));
        }
        Ok(self.trim(Series { terms: g, denom: 0 }))
    }

    /// Minimum p-adic valuation over the stored coefficients minus the
    /// denominator exponent; `Infinite` for zero.
    pub fn gauss_valuation(&self, f: &Series) -> Valuation {
        let v = f.terms.iter().map(|c| self.valuation(c)).min().unwrap_or(Valuation::Infinite);
        match v {
            Valuation::Finite(v) => Valuation::Finite(v - f.denom as i64),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    /// Congruence modulo (p^prec, t^T).
    pub fn s_congruent(&self, f: &Series, g: &Series, prec: i64) -> bool {
        self.gauss_valuation(&self.s_sub(f, g)).at_least(prec)
    }

    /// Re-truncates at this ring's T.
    pub fn s_truncate(&self, f: &Series) -> Series {
        self.s_normalize(f.clone())
    }

    pub fn s_is_const(&self, f: &Series) -> bool {
        f.terms.len() <= 1
    }

    pub fn s_to_json(&self, f: &Series) -> SeriesJson {
        SeriesJson {
            denom_exp: f.denom,
            terms: f.terms.iter().map(|c| self.report_coeffs(c).into_iter().map(|x| x as i64).collect()).collect(),
        }
    }

    pub fn s_from_json(&self, j: &SeriesJson) -> Result<Series> {
        if j.denom_exp > self.denom_budget() {
            return Err(input_err!("denominator exponent {} exceeds budget {}", j.denom_exp, self.denom_budget()));
        }
        if j.terms.len() > self.truncation() {
            return Err(input_err!("series has {} terms, truncation is {}", j.terms.len(), self.truncation()));
        }
        let terms = j.terms.iter().map(|c| self.from_coeffs(c)).collect::<Result<Vec<_>>>()?;
        Ok(self.s_normalize(Series { terms, denom: j.denom_exp }))
    }

    pub fn s_random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Series {
        let terms = (0..self.truncation()).map(|_| self.random(rng)).collect();
        self.trim(Series { terms, denom: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::super::RingParams;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring() -> Ring {
        Ring::new(RingParams::new(3, 2, 5, 8).with_denom_budget(2)).unwrap()
    }

    #[test]
    fn frobenius_lift_on_monomials() {
        let k = ring();
        let t = k.s_monomial(k.one(), 1);
        assert_eq!(k.s_frob(&t), k.s_monomial(k.one(), 3));
        assert_eq!(k.s_frob(&k.s_one()), k.s_one());
        let alpha = k.generator();
        let f = k.s_monomial(alpha, 2);
        assert_eq!(k.s_frob(&f), k.s_monomial(k.frob(&alpha), 6));
        // t^3 -> t^9 falls off at T = 8
        assert_eq!(k.s_frob(&k.s_monomial(k.one(), 3)), k.s_zero());
        let r2 = k.s_frob_pow(&t, 2);
        assert_eq!(r2, k.s_zero());
        let wide = k.with_truncation(12);
        assert_eq!(wide.s_frob_pow(&t, 2), wide.s_monomial(wide.one(), 9));
    }

    #[test]
    fn gauss_valuation_examples() {
        let k = ring();
        let p2t = k.s_monomial(k.p_pow(2), 1);
        let f = k.s_add(&p2t, &k.s_monomial(k.one(), 3));
        assert_eq!(k.gauss_valuation(&f), Valuation::Finite(0));
        let g = k.s_scale(&k.p_pow(1), &k.s_add(&k.s_one(), &k.s_monomial(k.one(), 1)));
        assert_eq!(k.gauss_valuation(&g), Valuation::Finite(1));
        assert_eq!(k.gauss_valuation(&k.s_zero()), Valuation::Infinite);
        let h = k.s_mul_p_pow(&k.s_one(), -2);
        assert_eq!(k.gauss_valuation(&h), Valuation::Finite(-2));
    }

    #[test]
    fn inverse_and_derivative() {
        let k = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut f = k.s_random(&mut rng);
            f.terms[0] = k.random_unit(&mut rng);
            let g = k.s_inv(&f).unwrap();
            assert_eq!(k.s_mul(&f, &g), k.s_one());
        }
        let f = k.s_add(&k.s_monomial(k.one(), 2), &k.s_monomial(k.from_int(5), 3));
        let expect = k.s_add(&k.s_monomial(k.from_int(2), 1), &k.s_monomial(k.from_int(15), 2));
        assert_eq!(k.s_deriv(&f), expect);
    }

    #[test]
    fn denominators_normalize() {
        let k = ring();
        let f = k.s_mul_p_pow(&k.s_scale(&k.p_pow(1), &k.s_one()), -1);
        assert_eq!(f, k.s_one());
        assert_eq!(f.denom_exp(), 0);
        let j = k.s_to_json(&k.s_mul_p_pow(&k.s_one(), -2));
        assert_eq!(j.denom_exp, 2);
        assert_eq!(k.s_from_json(&j).unwrap(), k.s_mul_p_pow(&k.s_one(), -2));
    }
}

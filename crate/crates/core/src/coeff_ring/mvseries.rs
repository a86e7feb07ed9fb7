use serde::Serialize;

use super::{Ring, Series, Valuation, Zq};

/// Dense truncated series in `nvars` variables, each truncated at the same
/// order T, with one shared denominator exponent:
/// p^{-denom} * sum c_{i_1..i_k} t_1^{i_1} ... t_k^{i_k}, all i_j < T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvSeries {
    nvars: usize,
    trunc: usize,
    coeffs: Vec<Zq>,
    denom: u32,
}

impl MvSeries {
    pub fn zero(nvars: usize, trunc: usize) -> Self {
        MvSeries { nvars, trunc, coeffs: vec![Zq::default(); trunc.pow(nvars as u32)], denom: 0 }
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn denom_exp(&self) -> u32 {
        self.denom
    }

    fn index(&self, exps: &[usize]) -> usize {
        exps.iter().fold(0, |acc, &e| acc * self.trunc + e)
    }

    fn exps(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.nvars];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.trunc;
            idx /= self.trunc;
        }
        out
    }

    pub fn coeff(&self, exps: &[usize]) -> Zq {
        self.coeffs[self.index(exps)]
    }
}

impl Ring {
    /// Embeds a univariate series as a series in variable `var`.
    pub fn mv_from_series(&self, f: &Series, var: usize, nvars: usize) -> MvSeries {
        let t = self.truncation();
        let mut out = MvSeries::zero(nvars, t);
        for (i, c) in f.terms().iter().enumerate().take(t) {
            let mut e = vec![0; nvars];
            e[var] = i;
            let idx = out.index(&e);
            out.coeffs[idx] = *c;
        }
        out.denom = f.denom_exp();
        out
    }

    pub fn mv_const(&self, a: Zq, nvars: usize) -> MvSeries {
        let mut out = MvSeries::zero(nvars, self.truncation());
        out.coeffs[0] = a;
        out
    }

    fn mv_lift(&self, f: &MvSeries, d: u32) -> Vec<Zq> {
        if d == f.denom {
            return f.coeffs.clone();
        }
        let pk = self.p_pow(d - f.denom);
        f.coeffs.iter().map(|c| self.mul(c, &pk)).collect()
    }

    pub fn mv_add(&self, f: &MvSeries, g: &MvSeries) -> MvSeries {
        assert_eq!((f.nvars, f.trunc), (g.nvars, g.trunc), "mismatched multivariate shapes");
        let d = f.denom.max(g.denom);
        let (a, b) = (self.mv_lift(f, d), self.mv_lift(g, d));
        let coeffs = a.iter().zip(&b).map(|(x, y)| self.add(x, y)).collect();
        MvSeries { nvars: f.nvars, trunc: f.trunc, coeffs, denom: d }
    }

    pub fn mv_neg(&self, f: &MvSeries) -> MvSeries {
        MvSeries { coeffs: f.coeffs.iter().map(|c| self.neg(c)).collect(), ..f.clone() }
    }

    pub fn mv_sub(&self, f: &MvSeries, g: &MvSeries) -> MvSeries {
        self.mv_add(f, &self.mv_neg(g))
    }

    pub fn mv_mul(&self, f: &MvSeries, g: &MvSeries) -> MvSeries {
        assert_eq!((f.nvars, f.trunc), (g.nvars, g.trunc), "mismatched multivariate shapes");
        let mut out = MvSeries::zero(f.nvars, f.trunc);
        out.denom = f.denom + g.denom;
        let nz_g: Vec<(usize, Vec<usize>)> = g
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.is_zero(c))
            .map(|(j, _)| (j, g.exps(j)))
            .collect();
        for (i, a) in f.coeffs.iter().enumerate() {
            if self.is_zero(a) {
                continue;
            }
            let ea = f.exps(i);
            'inner: for (j, eb) in &nz_g {
                let mut e = ea.clone();
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                    if *x >= f.trunc {
                        continue 'inner;
                    }
                }
                let idx = out.index(&e);
                out.coeffs[idx] = self.add(&out.coeffs[idx], &self.mul(a, &g.coeffs[*j]));
            }
        }
        out
    }

    /// Substitutes every variable by a single variable t (truncated at T).
    pub fn mv_diagonal(&self, f: &MvSeries) -> Series {
        let t = self.truncation();
        let mut terms = vec![Zq::default(); t];
        for (i, c) in f.coeffs.iter().enumerate() {
            let deg: usize = f.exps(i).iter().sum();
            if deg < t {
                terms[deg] = self.add(&terms[deg], c);
            }
        }
        self.s_from_terms(terms, f.denom)
    }

    /// Minimum valuation over coefficients minus the denominator exponent.
    pub fn mv_valuation(&self, f: &MvSeries) -> Valuation {
        let v = f.coeffs.iter().map(|c| self.valuation(c)).min().unwrap_or(Valuation::Infinite);
        match v {
            Valuation::Finite(v) => Valuation::Finite(v - f.denom as i64),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn mv_congruent(&self, f: &MvSeries, g: &MvSeries, prec: i64) -> bool {
        self.mv_valuation(&self.mv_sub(f, g)).at_least(prec)
    }

    /// Coefficient of the monomial with the given exponents, as a series
    /// constant carrying the shared denominator.
    pub fn mv_coeff(&self, f: &MvSeries, exps: &[usize]) -> Series {
        self.s_from_terms(vec![f.coeff(exps)], f.denom)
    }
}

/// Wire form: nonzero monomials only, `[[exponents], [r ints]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvSeriesJson {
    pub denom_exp: u32,
    pub trunc: usize,
    pub terms: Vec<(Vec<usize>, Vec<u64>)>,
}

impl Ring {
    pub fn mv_to_json(&self, f: &MvSeries) -> MvSeriesJson {
        let terms = (0..f.coeffs.len())
            .filter(|&i| !self.is_zero(&f.coeffs[i]))
            .map(|i| (f.exps(i), self.report_coeffs(&f.coeffs[i])))
            .collect();
        MvSeriesJson { denom_exp: f.denom, trunc: f.trunc, terms }
    }

    /// Kronecker substitution t_j -> t^{stride^j}. Exact as long as no
    /// product ever pushes a partial degree past `stride`; the caller's
    /// ring must be truncated at stride^{nvars-1} * T.
    pub fn mv_to_kronecker(&self, f: &MvSeries, stride: usize) -> Series {
        assert!(stride >= f.trunc, "stride below truncation");
        let len = stride.pow(f.nvars as u32 - 1) * f.trunc;
        let mut terms = vec![Zq::default(); len];
        for (i, c) in f.coeffs.iter().enumerate() {
            let pos = f.exps(i).iter().rev().fold(0, |acc, &e| acc * stride + e);
            terms[pos] = *c;
        }
        self.s_from_terms(terms, f.denom)
    }

    /// Inverse of `mv_to_kronecker`, dropping monomials outside the box.
    pub fn mv_from_kronecker(&self, s: &Series, stride: usize, nvars: usize, trunc: usize) -> MvSeries {
        let mut out = MvSeries::zero(nvars, trunc);
        out.denom = s.denom_exp();
        for (pos, c) in s.terms().iter().enumerate() {
            let mut rest = pos;
            let mut e = Vec::with_capacity(nvars);
            for _ in 0..nvars {
                e.push(rest % stride);
                rest /= stride;
            }
            if rest == 0 && e.iter().all(|&x| x < trunc) {
                let idx = out.index(&e);
                out.coeffs[idx] = *c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::RingParams;
    use super::*;

    #[test]
    fn diagonal_of_product_matches_univariate_product() {
        let k = Ring::new(RingParams::new(3, 1, 4, 5)).unwrap();
        let f = k.s_add(&k.s_one(), &k.s_monomial(k.from_int(2), 1));
        let g = k.s_add(&k.s_one(), &k.s_monomial(k.from_int(-1), 2));
        let fm = k.mv_from_series(&f, 0, 2);
        let gm = k.mv_from_series(&g, 1, 2);
        let prod = k.mv_mul(&fm, &gm);
        assert_eq!(k.mv_diagonal(&prod), k.s_mul(&f, &g));
        assert_eq!(k.mv_coeff(&prod, &[1, 2]), k.s_int(-2));
    }

    #[test]
    fn kronecker_round_trip_respects_products() {
        let k = Ring::new(RingParams::new(3, 1, 4, 4)).unwrap();
        let f = k.s_add(&k.s_one(), &k.s_monomial(k.from_int(2), 3));
        let g = k.s_add(&k.s_int(5), &k.s_monomial(k.from_int(-1), 2));
        let prod = k.mv_mul(&k.mv_from_series(&f, 0, 2), &k.mv_from_series(&g, 1, 2));
        let stride = 7;
        let kk = k.with_truncation(stride * 4);
        let a = kk.mv_to_kronecker(&k.mv_from_series(&f, 0, 2), stride);
        let b = kk.mv_to_kronecker(&k.mv_from_series(&g, 1, 2), stride);
        assert_eq!(kk.mv_from_kronecker(&kk.s_mul(&a, &b), stride, 2, 4), prod);
    }
}

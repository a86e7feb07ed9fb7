//! Coefficient layer: the unramified ring W(F_{p^r}) truncated at a working
//! precision, its Frobenius, truncated power series over it with a
//! Frobenius lift t -> t^p, and truncated multivariate series.
//!
//! Elements are plain data; every operation goes through an immutable
//! [`Ring`] context that fixes p, r, the defining modulus and the Frobenius.

mod fp_poly;
mod laws;
mod mvseries;
mod series;

pub use laws::LawReport;
pub use mvseries::{MvSeries, MvSeriesJson};
pub use series::{Series, SeriesJson};

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{construction_err, input_err, Result};

/// Largest residue degree r supported by the fixed-size element layout.
pub const MAX_DEGREE: usize = 12;

/// Element of W(F_{p^r}) / p^W in the power basis of (Z/p^W)[x]/(m(x)).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Zq(pub(crate) [u64; MAX_DEGREE]);

impl fmt::Debug for Zq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).map_or(1, |i| i + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

impl Zq {
    pub fn coeffs(&self, r: usize) -> &[u64] {
        &self.0[..r]
    }
}

/// p-adic (or Gauss) valuation; `Infinite` for elements that vanish at the
/// working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// User-facing parameters of a ring context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingParams {
    pub p: u64,
    pub r: usize,
    /// p-adic reporting precision N.
    pub precision: u32,
    /// t-adic truncation order T.
    pub truncation: usize,
    /// Largest power of p allowed in series denominators.
    #[serde(default)]
    pub denom_budget: u32,
}

impl RingParams {
    pub fn new(p: u64, r: usize, precision: u32, truncation: usize) -> Self {
        RingParams { p, r, precision, truncation, denom_budget: 0 }
    }

    pub fn with_denom_budget(mut self, d: u32) -> Self {
        self.denom_budget = d;
        self
    }
}

/// Immutable arithmetic context (the `RingContext` of the design notes).
#[derive(Clone, Debug)]
pub struct Ring {
    params: RingParams,
    work_prec: u32,
    q: u64,
    /// Monic modulus m, low-to-high, length r + 1, lifted from F_p.
    modulus: Vec<u64>,
    /// Image of the generator x under the Frobenius.
    frob_gen: Zq,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// p-adic valuation of a residue mod p^w (w for zero).
fn val_u64(mut x: u64, p: u64, w: u32) -> u32 {
    if x == 0 {
        return w;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

impl Ring {
    /// Builds the context: picks the modulus, lifts the Frobenius by Newton
    /// refinement from the seed x^p, and fixes the working precision
    /// W = N + 4D + 4 (headroom for denominators and the division by p in
    /// the connection solver).
    pub fn new(params: RingParams) -> Result<Ring> {
        let RingParams { p, r, precision, truncation, denom_budget } = params;
        if !is_prime(p) {
            return Err(input_err!("p = {p} is not prime"));
        }
        if p == 2 {
            return Err(input_err!("p must be odd"));
        }
        if r == 0 || r > MAX_DEGREE {
            return Err(input_err!("r = {r} outside 1..={MAX_DEGREE}"));
        }
        if precision == 0 || truncation == 0 {
            return Err(input_err!("precision and truncation must be positive"));
        }
        let work_prec = precision + 4 * denom_budget + 4;
        let mut q: u64 = 1;
        for _ in 0..work_prec {
            q = q
                .checked_mul(p)
                .filter(|&q| q < (1u64 << 62))
                .ok_or_else(|| input_err!("p^{work_prec} exceeds the 62-bit residue range; lower precision or denominator budget"))?;
        }
        let modulus = fp_poly::least_irreducible(p, r);
        let mut ring = Ring { params, work_prec, q, modulus, frob_gen: Zq::default() };
        ring.frob_gen = ring.lift_frobenius()?;
        Ok(ring)
    }

    /// Same ring with a different t-adic truncation.
    pub fn with_truncation(&self, truncation: usize) -> Ring {
        let mut out = self.clone();
        out.params.truncation = truncation;
        out
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }
    pub fn p(&self) -> u64 {
        self.params.p
    }
    pub fn r(&self) -> usize {
        self.params.r
    }
    pub fn precision(&self) -> u32 {
        self.params.precision
    }
    pub fn truncation(&self) -> usize {
        self.params.truncation
    }
    pub fn denom_budget(&self) -> u32 {
        self.params.denom_budget
    }
    pub fn work_prec(&self) -> u32 {
        self.work_prec
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn frobenius_of_generator(&self) -> Zq {
        self.frob_gen
    }

    /// Precision at which results involving series denominators are
    /// asserted: N - D.
    pub fn check_prec(&self) -> i64 {
        self.params.precision as i64 - self.params.denom_budget as i64
    }

    fn lift_frobenius(&self) -> Result<Zq> {
        let x = self.generator();
        let seed = self.pow(&x, self.p());
        let deriv: Vec<u64> = (1..self.modulus.len())
            .map(|i| (self.modulus[i] as u128 * i as u128 % self.q as u128) as u64)
            .collect();
        let mut z = seed;
        for _ in 0..(2 * self.work_prec + 4) {
            let mz = self.eval_int_poly(&self.modulus, &z);
            if self.is_zero(&mz) {
                break;
            }
            let dz = self.eval_int_poly(&deriv, &z);
            if !self.is_unit(&dz) {
                return Err(construction_err!("modulus derivative is not a unit at the Frobenius seed"));
            }
            z = self.sub(&z, &self.mul(&mz, &self.inv(&dz)?));
        }
        let residual = self.eval_int_poly(&self.modulus, &z);
        let drift = self.sub(&z, &seed);
        if !self.is_zero(&residual) || self.valuation(&drift) == Valuation::Finite(0) {
            return Err(construction_err!("Frobenius root refinement did not converge"));
        }
        Ok(z)
    }

    fn eval_int_poly(&self, coeffs: &[u64], z: &Zq) -> Zq {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, z);
            acc.0[0] = self.addm(acc.0[0], c % self.q);
        }
        acc
    }

    #[inline]
    fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }
    #[inline]
    fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }
    #[inline]
    fn mulm(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.q as u128) as u64
    }

    /// Reduces an arbitrary signed integer into Z/p^W.
    pub fn int_mod(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    pub fn zero(&self) -> Zq {
        Zq::default()
    }
    pub fn one(&self) -> Zq {
        self.from_int(1)
    }
    pub fn from_int(&self, v: i64) -> Zq {
        let mut z = Zq::default();
        z.0[0] = self.int_mod(v);
        z
    }
    /// Element from power-basis coordinates (reduced mod p^W).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<Zq> {
        if coeffs.len() > self.r() {
            return Err(input_err!("element has {} coordinates, expected at most r = {}", coeffs.len(), self.r()));
        }
        let mut z = Zq::default();
        for (slot, &c) in z.0.iter_mut().zip(coeffs) {
            *slot = self.int_mod(c);
        }
        Ok(z)
    }
    /// The class of x in (Z/p^W)[x]/(m).
    pub fn generator(&self) -> Zq {
        if self.r() >= 2 {
            let mut z = Zq::default();
            z.0[1] = 1;
            z
        } else {
            self.from_int(-(self.modulus[0] as i64))
        }
    }
    pub fn p_pow(&self, k: u32) -> Zq {
        let mut z = self.one();
        for _ in 0..k {
            z = self.scale_int(&z, self.p());
        }
        z
    }

    pub fn add(&self, a: &Zq, b: &Zq) -> Zq {
        let mut z = Zq::default();
        for i in 0..self.r() {
            z.0[i] = self.addm(a.0[i], b.0[i]);
        }
        z
    }
    pub fn sub(&self, a: &Zq, b: &Zq) -> Zq {
        let mut z = Zq::default();
        for i in 0..self.r() {
            z.0[i] = self.subm(a.0[i], b.0[i]);
        }
        z
    }
    pub fn neg(&self, a: &Zq) -> Zq {
        self.sub(&Zq::default(), a)
    }
    pub fn scale_int(&self, a: &Zq, k: u64) -> Zq {
        let mut z = Zq::default();
        let k = k % self.q;
        for i in 0..self.r() {
            z.0[i] = self.mulm(a.0[i], k);
        }
        z
    }

    pub fn mul(&self, a: &Zq, b: &Zq) -> Zq {
        let r = self.r();
        let q = self.q as u128;
        let mut prod = [0u128; 2 * MAX_DEGREE];
        for i in 0..r {
            let ai = a.0[i] as u128;
            if ai == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] += ai * b.0[j] as u128;
            }
        }
        for c in prod.iter_mut().take(2 * r - 1) {
            *c %= q;
        }
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..r {
                let t = c * self.modulus[i] as u128 % q;
                prod[k - r + i] = (prod[k - r + i] + q - t) % q;
            }
        }
        let mut z = Zq::default();
        for i in 0..r {
            z.0[i] = prod[i] as u64;
        }
        z
    }

    pub fn pow(&self, a: &Zq, mut e: u64) -> Zq {
        let mut acc = self.one();
        let mut b = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &Zq) -> bool {
        a.0[..self.r()].iter().all(|&c| c == 0)
    }

    /// p-adic valuation; the power basis is integral and m is irreducible
    /// mod p, so this is the minimum over coordinates.
    pub fn valuation(&self, a: &Zq) -> Valuation {
        if self.is_zero(a) {
            return Valuation::Infinite;
        }
        let v = a.0[..self.r()]
            .iter()
            .map(|&c| val_u64(c, self.p(), self.work_prec))
            .min()
            .unwrap_or(self.work_prec);
        Valuation::Finite(v as i64)
    }

    pub fn is_unit(&self, a: &Zq) -> bool {
        self.valuation(a) == Valuation::Finite(0)
    }

    /// Congruence of two elements modulo p^prec.
    pub fn congruent(&self, a: &Zq, b: &Zq, prec: i64) -> bool {
        self.valuation(&self.sub(a, b)).at_least(prec)
    }

    /// Inverse of a unit: Fermat in the residue field, then Newton lifting.
    pub fn inv(&self, a: &Zq) -> Result<Zq> {
        if !self.is_unit(a) {
            return Err(input_err!("attempt to invert a non-unit"));
        }
        let order = self.p().pow(self.r() as u32);
        let mut u = self.pow(a, order - 2);
        let two = self.from_int(2);
        for _ in 0..(64 - self.work_prec.leading_zeros() + 2) {
            let au = self.mul(a, &u);
            if au == self.one() {
                return Ok(u);
            }
            u = self.mul(&u, &self.sub(&two, &au));
        }
        if self.mul(a, &u) == self.one() {
            Ok(u)
        } else {
            Err(construction_err!("Newton inversion failed to converge"))
        }
    }

    /// Exact division by p^k; the caller guarantees divisibility (checked).
    pub fn div_p_pow(&self, a: &Zq, k: u32) -> Result<Zq> {
        if !self.valuation(a).at_least(k as i64) {
            return Err(precision_err_div(k));
        }
        let pk = self.p().pow(k);
        let mut z = Zq::default();
        for i in 0..self.r() {
            z.0[i] = a.0[i] / pk;
        }
        Ok(z)
    }

    /// The Frobenius automorphism, applied by Horner evaluation at the
    /// stored image of the generator.
    pub fn frob(&self, a: &Zq) -> Zq {
        let r = self.r();
        let mut acc = Zq::default();
        acc.0[0] = a.0[r - 1];
        for i in (0..r - 1).rev() {
            acc = self.mul(&acc, &self.frob_gen);
            acc.0[0] = self.addm(acc.0[0], a.0[i]);
        }
        acc
    }

    pub fn frob_pow(&self, a: &Zq, k: usize) -> Zq {
        (0..k % self.r()).fold(*a, |acc, _| self.frob(&acc))
    }

    /// Coordinates reduced to the reporting precision p^N.
    pub fn report_coeffs(&self, a: &Zq) -> Vec<u64> {
        let pn = self.p().pow(self.precision());
        a.0[..self.r()].iter().map(|c| c % pn).collect()
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Zq {
        let mut z = Zq::default();
        for slot in z.0.iter_mut().take(self.r()) {
            *slot = rng.gen_range(0..self.q);
        }
        z
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Zq {
        loop {
            let z = self.random(rng);
            if self.is_unit(&z) {
                return z;
            }
        }
    }
}

fn precision_err_div(k: u32) -> crate::error::Error {
    crate::error::Error::Precision(format!("element is not divisible by p^{k}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, r: usize, n: u32) -> Ring {
        Ring::new(RingParams::new(p, r, n, 8)).unwrap()
    }

    #[test]
    fn prime_field_frobenius_is_identity() {
        let k = ring(3, 1, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = k.random(&mut rng);
            assert_eq!(k.frob(&a), a);
        }
    }

    #[test]
    fn frobenius_defining_congruences() {
        let k = ring(3, 2, 4);
        let f = k.frobenius_of_generator();
        let xp = k.pow(&k.generator(), 3);
        assert!(k.congruent(&f, &xp, 1));
        assert!(k.is_zero(&k.eval_int_poly(k.modulus(), &f)));
        assert!(!k.congruent(&f, &k.generator(), 1));
    }

    #[test]
    fn frobenius_order_divides_r() {
        let k = ring(5, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = k.random(&mut rng);
            assert_eq!(k.frob_pow(&a, 3), a);
            assert_eq!((0..3).fold(a, |acc, _| k.frob(&acc)), a);
        }
    }

    #[test]
    fn inverse_and_valuation() {
        let k = ring(7, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = k.random_unit(&mut rng);
            assert_eq!(k.mul(&u, &k.inv(&u).unwrap()), k.one());
            let pu = k.mul(&u, &k.p_pow(2));
            assert_eq!(k.valuation(&pu), Valuation::Finite(2));
            let back = k.div_p_pow(&pu, 2).unwrap();
            assert!(k.congruent(&back, &u, k.work_prec() as i64 - 2));
        }
        assert!(k.inv(&k.p_pow(1)).is_err());
        assert_eq!(k.valuation(&k.zero()), Valuation::Infinite);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Ring::new(RingParams::new(9, 1, 3, 4)).is_err());
        assert!(Ring::new(RingParams::new(2, 1, 3, 4)).is_err());
        assert!(Ring::new(RingParams::new(3, 0, 3, 4)).is_err());
        assert!(Ring::new(RingParams::new(3, 2, 60, 4)).is_err());
    }
}

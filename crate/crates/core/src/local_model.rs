//! Affine charts {s_ν t_μ ≠ 0} of the local model inside P^{n-1} × P^{n-1},
//! where the kernel lines ⟨t⟩, ⟨s⟩ are exchanged by a+b ↦ a+pb and
//! a+b ↦ pa+b on O^n = A ⊕ B (rank A = k). Indices are 1-based.
//!
//! The chart is cut out by the single relation (s_μ/s_ν)(t_ν/t_μ) = p in
//! the ratio variables; flatness over the base follows because that
//! relation is a non-zero-divisor minus p. Only the presentation and the
//! equivalence of the two formulations are checked here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeff_ring::{Ring, Valuation, Zq};
use crate::error::{input_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub n: usize,
    pub k: usize,
    pub nu: usize,
    pub mu: usize,
}

impl ChartSpec {
    pub fn new(n: usize, k: usize, nu: usize, mu: usize) -> Result<Self> {
        if !(1 <= nu && nu <= k && k < mu && mu <= n) {
            return Err(input_err!("chart needs 1 ≤ ν ≤ k < μ ≤ n, got n={n} k={k} ν={nu} μ={mu}"));
        }
        Ok(ChartSpec { n, k, nu, mu })
    }

    /// Every chart with n ≤ max_n.
    pub fn all(max_n: usize) -> Vec<ChartSpec> {
        let mut out = Vec::new();
        for n in 2..=max_n {
            for k in 1..n {
                for nu in 1..=k {
                    for mu in k + 1..=n {
                        out.push(ChartSpec { n, k, nu, mu });
                    }
                }
            }
        }
        out
    }
}

/// u = λ·v written out: lhs coordinates, the scalar λ and rhs coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorEquation {
    pub lhs: Vec<String>,
    pub factor: String,
    pub rhs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub chart: ChartSpec,
    pub variables: Vec<String>,
    pub relation: String,
    pub equations: [VectorEquation; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub t: Vec<Zq>,
    pub s: Vec<Zq>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub kernel_form: bool,
    pub chart_form: bool,
    /// First failing condition of the chart form, if any.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartReport {
    pub chart: ChartSpec,
    pub samples: usize,
    pub accepted_on_locus: usize,
    pub rejected_off_locus: usize,
    pub disagreements: usize,
    pub valuation_bookkeeping: bool,
}

impl ChartReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0 && self.accepted_on_locus == self.samples && self.rejected_off_locus == self.samples && self.valuation_bookkeeping
    }
}

pub fn chart_presentation(c: &ChartSpec) -> Presentation {
    let ChartSpec { n, k, nu, mu } = *c;
    let mut variables = Vec::new();
    for i in 1..=k {
        let num = if i == nu { mu } else { i };
        variables.push(format!("s{num}/s{nu}"));
    }
    for j in k + 1..=n {
        let num = if j == mu { nu } else { j };
        variables.push(format!("t{num}/t{mu}"));
    }
    let first = VectorEquation {
        lhs: (1..=n).map(|i| if i <= k { format!("t{i}") } else { format!("p*t{i}") }).collect(),
        factor: format!("t{nu}/s{nu}"),
        rhs: (1..=n).map(|i| format!("s{i}")).collect(),
    };
    let second = VectorEquation {
        lhs: (1..=n).map(|i| if i <= k { format!("p*s{i}") } else { format!("s{i}") }).collect(),
        factor: format!("s{mu}/t{mu}"),
        rhs: (1..=n).map(|i| format!("t{i}")).collect(),
    };
    Presentation { chart: *c, variables, relation: format!("(s{mu}/s{nu})*(t{nu}/t{mu}) - p"), equations: [first, second] }
}

impl Ring {
    /// (s_μ/s_ν)(t_ν/t_μ) - p for given ratio values.
    pub fn chart_relation(&self, s_ratio: &Zq, t_ratio: &Zq) -> Zq {
        self.sub(&self.mul(s_ratio, t_ratio), &self.from_int(self.p() as i64))
    }

    /// Both formulations at precision N; they must agree.
    pub fn membership_check(&self, c: &ChartSpec, x: &ChartPoint) -> Result<Membership> {
        let ChartSpec { n, k, nu, mu } = *c;
        if x.t.len() != n || x.s.len() != n {
            return Err(input_err!("point has the wrong number of coordinates"));
        }
        let (sn, tm) = (x.s[nu - 1], x.t[mu - 1]);
        if !self.is_unit(&sn) || !self.is_unit(&tm) {
            return Err(input_err!("pivots s_{nu}, t_{mu} must be units"));
        }
        let prec = self.precision() as i64;
        let p = self.from_int(self.p() as i64);
        let eq = |a: &Zq, b: &Zq| self.congruent(a, b, prec);

        // (i) a+b ↦ a+pb sends ⟨t⟩ into ⟨s⟩ and a+b ↦ pa+b sends ⟨s⟩ into ⟨t⟩;
        // with a unit coordinate in the target, membership is the vanishing
        // of all 2x2 minors.
        let u: Vec<Zq> = (0..n).map(|i| if i < k { x.t[i] } else { self.mul(&p, &x.t[i]) }).collect();
        let v: Vec<Zq> = (0..n).map(|i| if i < k { self.mul(&p, &x.s[i]) } else { x.s[i] }).collect();
        let in_span = |w: &[Zq], line: &[Zq]| {
            (0..n).all(|i| (i + 1..n).all(|j| eq(&self.mul(&w[i], &line[j]), &self.mul(&w[j], &line[i]))))
        };
        let kernel_form = in_span(&u, &x.s) && in_span(&v, &x.t);

        // (ii) chart equations in the ratio variables.
        let sn_inv = self.inv(&sn)?;
        let tm_inv = self.inv(&tm)?;
        let t_nu = x.t[nu - 1];
        let mut witness = None;
        for i in 1..=k {
            let rhs = self.mul(&self.mul(&x.s[i - 1], &sn_inv), &t_nu);
            if witness.is_none() && !eq(&x.t[i - 1], &rhs) {
                witness = Some(format!("t{i} ≠ (s{i}/s{nu}) t{nu}"));
            }
        }
        for j in k + 1..=n {
            let rhs = self.mul(&self.mul(&x.t[j - 1], &tm_inv), &x.s[mu - 1]);
            if witness.is_none() && !eq(&x.s[j - 1], &rhs) {
                witness = Some(format!("s{j} ≠ (t{j}/t{mu}) s{mu}"));
            }
        }
        let rel = self.chart_relation(&self.mul(&x.s[mu - 1], &sn_inv), &self.mul(&t_nu, &tm_inv));
        if witness.is_none() && !eq(&rel, &self.zero()) {
            witness = Some(format!("(s{mu}/s{nu})(t{nu}/t{mu}) ≠ p"));
        }
        let chart_form = witness.is_none();
        Ok(Membership { kernel_form, chart_form, witness })
    }

    /// A point on the chart from the parametrization: free ratios plus the
    /// pair (X, Y) with XY = p.
    pub fn sample_chart_point<R: Rng + ?Sized>(&self, c: &ChartSpec, rng: &mut R) -> ChartPoint {
        let ChartSpec { n, k, nu, mu } = *c;
        let p = self.from_int(self.p() as i64);
        let u = self.random_unit(rng);
        let u_inv = self.inv(&u).expect("unit");
        let (x, y) = if rng.gen_bool(0.5) { (u, self.mul(&p, &u_inv)) } else { (self.mul(&p, &u), u_inv) };
        let sn = self.random_unit(rng);
        let tm = self.random_unit(rng);
        let mut s = vec![self.zero(); n];
        let mut t = vec![self.zero(); n];
        s[nu - 1] = sn;
        t[mu - 1] = tm;
        s[mu - 1] = self.mul(&x, &sn);
        t[nu - 1] = self.mul(&y, &tm);
        for i in 1..=k {
            if i != nu {
                let a = self.random(rng);
                s[i - 1] = self.mul(&a, &sn);
                t[i - 1] = self.mul(&a, &t[nu - 1]);
            }
        }
        for j in k + 1..=n {
            if j != mu {
                let b = self.random(rng);
                t[j - 1] = self.mul(&b, &tm);
                s[j - 1] = self.mul(&b, &s[mu - 1]);
            }
        }
        ChartPoint { t, s }
    }

    /// Moves one coordinate that enters an equation by p^e·(unit), e ≤ N-2,
    /// keeping the pivots fixed.
    pub fn perturb_chart_point<R: Rng + ?Sized>(&self, c: &ChartSpec, x: &ChartPoint, rng: &mut R) -> ChartPoint {
        let ChartSpec { n, k, nu, mu } = *c;
        let mut out = x.clone();
        let e = rng.gen_range(0..self.precision().saturating_sub(1).max(1));
        let delta = self.mul(&self.p_pow(e), &self.random_unit(rng));
        let mut slots: Vec<(bool, usize)> = (1..=k).filter(|&i| i != nu).map(|i| (true, i)).collect();
        slots.extend((k + 1..=n).filter(|&j| j != mu).map(|j| (false, j)));
        slots.push((true, nu));
        let (is_t, idx) = slots[rng.gen_range(0..slots.len())];
        // t_i for i ≤ k, s_j for j > k, or t_ν itself (breaks the relation).
        if is_t && idx <= k {
            out.t[idx - 1] = self.add(&out.t[idx - 1], &delta);
        } else {
            out.s[idx - 1] = self.add(&out.s[idx - 1], &delta);
        }
        out
    }

    /// `samples` points on the locus and as many perturbed ones.
    pub fn sample_chart(&self, c: &ChartSpec, samples: usize, seed: u64) -> Result<ChartReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rep = ChartReport { chart: *c, samples, accepted_on_locus: 0, rejected_off_locus: 0, disagreements: 0, valuation_bookkeeping: true };
        let (nu, mu) = (c.nu - 1, c.mu - 1);
        for _ in 0..samples {
            let x = self.sample_chart_point(c, &mut rng);
            let m = self.membership_check(c, &x)?;
            rep.disagreements += usize::from(m.kernel_form != m.chart_form);
            rep.accepted_on_locus += usize::from(m.kernel_form && m.chart_form);
            let vx = self.valuation(&x.s[mu]);
            let vy = self.valuation(&x.t[nu]);
            rep.valuation_bookkeeping &= matches!((vx, vy), (Valuation::Finite(a), Valuation::Finite(b)) if a + b == 1);
            let y = self.perturb_chart_point(c, &x, &mut rng);
            let m = self.membership_check(c, &y)?;
            rep.disagreements += usize::from(m.kernel_form != m.chart_form);
            rep.rejected_off_locus += usize::from(!m.kernel_form && !m.chart_form);
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::RingParams;

    fn ring() -> Ring {
        Ring::new(RingParams::new(3, 2, 4, 1)).unwrap()
    }

    #[test]
    fn smallest_chart_presentation() {
        let c = ChartSpec::new(2, 1, 1, 2).unwrap();
        let pres = chart_presentation(&c);
        assert_eq!(pres.variables, vec!["s2/s1", "t1/t2"]);
        assert_eq!(pres.relation, "(s2/s1)*(t1/t2) - p");
        assert_eq!(pres.equations[0].lhs, vec!["t1", "p*t2"]);
    }

    #[test]
    fn variable_count_is_n() {
        for c in ChartSpec::all(5) {
            assert_eq!(chart_presentation(&c).variables.len(), c.n);
        }
    }

    #[test]
    fn relation_examples() {
        let k = ring();
        let p = k.from_int(3);
        assert!(k.is_zero(&k.chart_relation(&p, &k.one())));
        let v = k.chart_relation(&k.one(), &k.one());
        assert!(!k.congruent(&v, &k.zero(), 2));
    }

    #[test]
    fn trivial_point_accepted() {
        let k = ring();
        let c = ChartSpec::new(2, 1, 1, 2).unwrap();
        // s = (1, p), t = (1, 1): s-ratio p, t-ratio 1.
        let x = ChartPoint { s: vec![k.one(), k.from_int(3)], t: vec![k.one(), k.one()] };
        let m = k.membership_check(&c, &x).unwrap();
        assert!(m.kernel_form && m.chart_form);
    }

    #[test]
    fn invalid_chart_and_pivots() {
        assert!(ChartSpec::new(3, 2, 3, 3).is_err());
        let k = ring();
        let c = ChartSpec::new(2, 1, 1, 2).unwrap();
        let x = ChartPoint { s: vec![k.from_int(3), k.one()], t: vec![k.one(), k.one()] };
        assert!(k.membership_check(&c, &x).is_err());
    }

    #[test]
    fn formulations_agree_on_all_small_charts() {
        for p in [3, 5] {
            let k = Ring::new(RingParams::new(p, 2, 4, 1)).unwrap();
            for c in ChartSpec::all(4) {
                let rep = k.sample_chart(&c, 200, 1).unwrap();
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }
}

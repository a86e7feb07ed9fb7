use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use super::{LadderStep, SymStructure};
use crate::coeff_ring::{Ring, Valuation};
use crate::error::Result;
use crate::graded_semilinear::SlopeMultiset;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymCheck {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymReport {
    pub checked_at: i64,
    pub sigma: Vec<usize>,
    pub omega: Vec<usize>,
    pub slopes_n: SlopeMultiset,
    pub slopes_n_i: Vec<SlopeMultiset>,
    pub slopes_m: SlopeMultiset,
    pub expected_slopes_m: SlopeMultiset,
    pub checks: Vec<SymCheck>,
    pub ladder: Vec<LadderStep>,
}

impl SymReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
    pub fn check(&self, name: &str) -> Option<&SymCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

fn check(name: &str, pass: bool, detail: Value) -> SymCheck {
    SymCheck { name: name.to_string(), pass, detail }
}

/// Slopes z_i + b z' + (b_i - b) z'' for all blocks and b.
pub fn slope_lemma_oracle(b: &[usize], z_i: &[Rational64], zp: Rational64, zpp: Rational64) -> SlopeMultiset {
    SlopeMultiset::new(
        b.iter()
            .zip(z_i)
            .flat_map(|(&bi, &zi)| (0..=bi).map(move |k| zi + zp * k as i64 + zpp * (bi - k) as i64))
            .collect(),
    )
}

impl Ring {
    /// Rank table, (S.1)-(S.4), window axioms for M and the slope lemma.
    pub fn verify_sym(&self, s: &SymStructure) -> Result<SymReport> {
        let p = &s.params;
        let prec = self.check_prec();
        let mut checks = Vec::new();

        let n_dims: Vec<usize> = (0..p.r).map(|x| s.n.decomposition.quotient_dim(x)).collect();
        let m_dims: Vec<usize> = (0..p.r).map(|x| s.m.decomposition.quotient_dim(x)).collect();
        let n_ok = (0..p.r).all(|x| s.n.module.rank(x) == 2 && n_dims[x] == if p.is_sigma(x) { 1 } else { 2 });
        let m_ok = (0..p.r).all(|x| s.m.module.rank(x) == p.n && m_dims[x] == if p.in_omega(x) { p.n - 1 } else { p.n });
        checks.push(check(
            "rank_table",
            n_ok && m_ok,
            json!({"n_quotient_dims": n_dims, "m_quotient_dims": m_dims, "rank_m": s.m.module.rank(0), "expected_rank_m": p.n}),
        ));

        let n_rep = self.verify_window(&s.n);
        checks.push(check("S.1", n_rep.passed() && s.n.module.ranks().iter().all(|&x| x == 2), json!(n_rep.axioms)));

        let mut slopes_n_i = Vec::new();
        let mut s2 = true;
        for (i, ni) in s.n_i.iter().enumerate() {
            let sl = self.graded_slopes(ni)?;
            s2 &= ni.ranks().iter().all(|&x| x == 1)
                && ni.matrices().iter().all(|a| a.is_integral())
                && sl == SlopeMultiset::from_ints(&[p.z_i[i] as i64]);
            slopes_n_i.push(sl);
        }
        checks.push(check("S.2", s2, json!({"z_i": p.z_i})));

        let mut s3_fail = Value::Null;
        for x in 0..p.r {
            let lhs = self.m_mul(s.product.phi(x), &self.m_frob(&s.zeta[x]));
            let rhs = self.m_mul(&s.zeta[(x + 1) % p.r], s.m.module.phi(x));
            let det = self.m_det(&s.zeta[x]);
            if !self.m_congruent(&lhs, &rhs, prec) || self.gauss_valuation(&det) == Valuation::Infinite {
                s3_fail = json!({"degree": x, "entry": self.m_first_difference(&lhs, &rhs, prec)});
                break;
            }
        }
        checks.push(check("S.3", s3_fail.is_null(), s3_fail));

        let computed_sigma: Vec<usize> = (0..p.r).filter(|&x| n_dims[x] == 1).collect();
        let mut s4_fail = Value::Null;
        if computed_sigma != p.sigma {
            s4_fail = json!({"reason": "rank-one quotient degrees differ from σ", "found": computed_sigma});
        } else {
            for &x in &computed_sigma {
                let z = &s.zeta[x];
                let det = self.m_det(z);
                if !z.is_integral() || self.gauss_valuation(&det) != Valuation::Finite(0) {
                    s4_fail = json!({"degree": x});
                    break;
                }
            }
        }
        checks.push(check("S.4", s4_fail.is_null(), s4_fail));

        let m_rep = self.verify_window(&s.m);
        let dieudonne = (0..p.r).all(|x| {
            self.m_inverse(s.m.module.phi(x))
                .map(|inv| self.m_mul_p_pow(&inv, 1).is_integral())
                .unwrap_or(false)
        });
        checks.push(check(
            "M_window",
            m_rep.passed() && dieudonne,
            json!({"axioms": m_rep.axioms, "p_M_in_phi_M": dieudonne}),
        ));

        let slopes_n = self.graded_slopes(&s.n.module)?;
        let slopes_m = self.graded_slopes(&s.m.module)?;
        let z_i: Vec<Rational64> = p.z_i.iter().map(|&x| Rational64::from_integer(x as i64)).collect();
        let expected = slope_lemma_oracle(&p.b, &z_i, slopes_n.0[0], slopes_n.0[1]);
        checks.push(check("slope_lemma", slopes_m == expected, json!({"found": slopes_m, "expected": expected})));

        let mut ladder_ok = true;
        for step in &s.ladder {
            for (i, e) in step.profile.iter().enumerate() {
                let f = p.f[i][step.interval];
                ladder_ok &= e.iter().enumerate().all(|(b, &v)| v <= b + f);
                ladder_ok &= e.windows(2).all(|w| w[0] <= w[1] && w[1] <= w[0] + 1);
            }
            ladder_ok &= step.raised.is_some() == p.in_omega(step.degree);
        }
        let raises: Vec<usize> = (0..p.z).map(|j| s.ladder.iter().filter(|l| l.interval == j && l.raised.is_some()).count()).collect();
        ladder_ok &= raises == p.w;
        checks.push(check("ladder", ladder_ok, json!({"raises_per_interval": raises, "w": p.w})));

        Ok(SymReport {
            checked_at: prec,
            sigma: p.sigma.clone(),
            omega: p.omega.clone(),
            slopes_n,
            slopes_n_i,
            slopes_m,
            expected_slopes_m: expected,
            checks,
            ladder: s.ladder.clone(),
        })
    }
}

use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use super::DeformedWindow;
use crate::coeff_ring::Ring;
use crate::error::{precision_err, Result};
use crate::graded_semilinear::{SigmaModule, SlopeMultiset};
use crate::sym_structure::{slope_lemma_oracle, SymStructure};
use crate::windows::WindowReport;

#[derive(Clone, Debug, Serialize)]
pub struct SuffCheck {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuffReport {
    /// A degree outside Ω with M_{σ0,1} = pM_{σ0}.
    pub sigma0: Option<usize>,
    pub window: WindowReport,
    pub special_slopes_n: SlopeMultiset,
    pub special_slopes_m: SlopeMultiset,
    pub generic_slopes_n: SlopeMultiset,
    pub generic_slopes_m: SlopeMultiset,
    pub expected_generic_m: SlopeMultiset,
    pub truncations: [usize; 2],
    pub checks: Vec<SuffCheck>,
}

impl SuffReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
    pub fn check(&self, name: &str) -> Option<&SuffCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl Ring {
    /// Generic slopes from the Gauss valuation of the characteristic
    /// polynomial, required to agree at truncations T and 2T.
    pub fn generic_slopes(&self, m: &SigmaModule) -> Result<SlopeMultiset> {
        let t = self.truncation();
        let a = self.graded_slopes(m)?;
        let b = self.with_truncation(2 * t).graded_slopes(m)?;
        if a != b {
            return Err(precision_err!("generic slopes unstable between truncation {t} ({a}) and {} ({b}); raise --truncation", 2 * t));
        }
        Ok(a)
    }

    /// t-adic order d of the generic eigenvalue of φ̃^r on Ñ: the t in u_σ
    /// is raised to p^{r-σ} by the time it reaches the cycle composite.
    pub fn generic_t_order(&self, n_tilde: &DeformedWindow) -> u64 {
        let r = n_tilde.u.len();
        (0..r)
            .filter(|&s| !self.m_congruent(&n_tilde.u[s], &self.m_identity(n_tilde.u[s].rows()), self.work_prec() as i64))
            .map(|s| self.p().checked_pow(((r - s) % r) as u32).unwrap_or(u64::MAX))
            .fold(0u64, |a, b| a.saturating_add(b))
    }

    /// Sufficiency of the pair (Ñ, M̃).
    pub fn check_suff(&self, s: &SymStructure, n_tilde: &DeformedWindow, m_tilde: &DeformedWindow) -> Result<SuffReport> {
        let p = &s.params;
        let d = self.generic_t_order(n_tilde);
        let need = d.saturating_mul(p.b.iter().sum::<usize>().max(1) as u64);
        if (self.truncation() as u64) <= need {
            return Err(precision_err!("truncation {} does not see the generic eigenvalue: need T > {need} (t-order {d})", self.truncation()));
        }
        let mut checks = Vec::new();
        let mut push = |name: &str, pass: bool, detail: Value| checks.push(SuffCheck { name: name.into(), pass, detail });

        let sigma0 = (0..p.r).find(|&x| !p.in_omega(x) && s.m.decomposition.l_ranks[x] == 0);
        push("sigma0", sigma0.is_some(), json!({ "sigma0": sigma0 }));

        let window = self.verify_window(&m_tilde.window);
        push("M_tilde_window", window.passed(), json!(window.axioms.iter().filter(|a| !a.pass).map(|a| &a.axiom).collect::<Vec<_>>()));

        let check = self.check_prec();
        let special_ok = |d: &DeformedWindow| {
            let sp = self.specialize(&d.window);
            (0..p.r).all(|x| self.m_congruent(sp.module.phi(x), d.source.module.phi(x), check))
        };
        push("specialization", special_ok(n_tilde) && special_ok(m_tilde), Value::Null);

        let det_ok = (0..p.r).all(|x| {
            self.s_congruent(&self.m_det(n_tilde.window.module.phi(x)), &self.m_det(n_tilde.source.module.phi(x)), check)
        });
        push("det_N_trivial", det_ok, Value::Null);

        let special_slopes_n = self.graded_slopes(&s.n.module)?;
        let special_slopes_m = self.graded_slopes(&s.m.module)?;
        let generic_slopes_n = self.generic_slopes(&n_tilde.window.module)?;
        let generic_slopes_m = self.generic_slopes(&m_tilde.window.module)?;
        let z = Rational64::from_integer(p.z as i64);
        let expected_generic_n = SlopeMultiset::new(vec![Rational64::from_integer(0), z]);
        let z_i: Vec<Rational64> = p.z_i.iter().map(|&x| Rational64::from_integer(x as i64)).collect();
        let expected_generic_m = slope_lemma_oracle(&p.b, &z_i, Rational64::from_integer(0), z);
        push(
            "generic_slopes_N",
            generic_slopes_n == expected_generic_n,
            json!({"got": generic_slopes_n.to_string(), "expected": expected_generic_n.to_string()}),
        );
        push(
            "generic_slopes_M",
            generic_slopes_m == expected_generic_m,
            json!({"got": generic_slopes_m.to_string(), "expected": expected_generic_m.to_string()}),
        );
        let same_ends = generic_slopes_m.sum() == special_slopes_m.sum() && generic_slopes_m.len() == special_slopes_m.len();
        push("polygon_endpoints", same_ends, Value::Null);
        // Sym^0 blocks deform trivially; only demand movement when the
        // oracle predicts it.
        let moves = expected_generic_m != special_slopes_m;
        push("non_isotrivial", !moves || generic_slopes_m != special_slopes_m, json!({ "expected": moves }));

        Ok(SuffReport {
            sigma0,
            window,
            special_slopes_n,
            special_slopes_m,
            generic_slopes_n,
            generic_slopes_m,
            expected_generic_m,
            truncations: [self.truncation(), 2 * self.truncation()],
            checks,
        })
    }
}

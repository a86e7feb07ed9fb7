use serde::Serialize;
use serde_json::{json, Value};

use super::{Frame, Window};
use crate::coeff_ring::{Ring, Valuation};
use crate::linalg::Mat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub pass: bool,
    pub witness: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    pub frame: Frame,
    /// p-adic exponent at which the identities were checked.
    pub checked_at: i64,
    pub truncation: usize,
    pub axioms: Vec<AxiomResult>,
}

impl WindowReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }
    pub fn axiom(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == name)
    }
    pub fn passes(&self, name: &str) -> bool {
        self.axiom(name).is_some_and(|a| a.pass)
    }
}

fn result(axiom: &str, pass: bool, witness: Value) -> AxiomResult {
    AxiomResult { axiom: axiom.to_string(), pass, witness }
}

impl Ring {
    /// Checks (W.1)-(W.4). (W.4) iterates ψ♯ mod (p, t^T) at most
    /// r·rank times.
    pub fn verify_window(&self, w: &Window) -> WindowReport {
        let r = w.module.period();
        let d = &w.decomposition;
        let mut axioms = Vec::new();

        let w1 = (0..r).find_map(|s| {
            let b = &d.bases[s];
            if (b.rows(), b.cols()) != (w.module.rank(s), w.module.rank(s)) || d.l_ranks[s] > b.cols() {
                return Some(json!({"degree": s, "reason": "shape"}));
            }
            if !b.is_integral() {
                return Some(json!({"degree": s, "reason": "basis not integral"}));
            }
            let det0 = self.m_det(&self.m_at_zero(b));
            (self.gauss_valuation(&det0) != Valuation::Finite(0)).then(|| json!({"degree": s, "reason": "L ⊕ T ≠ M"}))
        });
        let w1_ok = w1.is_none();
        axioms.push(result("W.1", w1_ok, w1.unwrap_or(Value::Null)));

        let w2 = if !w1_ok {
            Some(json!({"reason": "skipped: W.1 failed"}))
        } else {
            (0..r).find_map(|s| {
                let a = w.module.phi(s);
                let b = &d.bases[s];
                let image = self.m_mul(a, &self.m_frob(b));
                for j in 0..d.l_ranks[s] {
                    for i in 0..image.rows() {
                        if !self.gauss_valuation(image.get(i, j)).at_least(1) {
                            return Some(json!({"degree": s, "row": i, "col": j}));
                        }
                    }
                }
                (!a.is_integral()).then(|| json!({"degree": s, "reason": "φ not integral"}))
            })
        };
        let w2_ok = w2.is_none();
        axioms.push(result("W.2", w2_ok, w2.unwrap_or(Value::Null)));

        let w3 = if !w2_ok {
            Some(json!({"reason": "skipped: W.2 failed"}))
        } else {
            (0..r).find_map(|s| {
                let v = self.u_sharp(w, s);
                let det0 = self.s_at_zero(&self.m_det(&v));
                match self.gauss_valuation(&det0) {
                    Valuation::Finite(0) => None,
                    other => Some(json!({"degree": s, "det_valuation": other})),
                }
            })
        };
        let w3_ok = w3.is_none();
        axioms.push(result("W.3", w3_ok, w3.unwrap_or(Value::Null)));

        let w4 = if !w3_ok {
            result("W.4", false, json!({"reason": "skipped: W.3 failed"}))
        } else {
            match self.psi_sharp(w) {
                Err(e) => result("W.4", false, json!({"reason": e.to_string()})),
                Ok(psi) => {
                    let bound = r * w.module.total_rank().max(1);
                    match self.psi_nilpotence(w, &psi, bound) {
                        Some(k) => result("W.4", true, json!({"vanishes_after": k})),
                        None => result("W.4", false, json!({"steps_tried": bound})),
                    }
                }
            }
        };
        axioms.push(w4);

        WindowReport { frame: w.frame, checked_at: 1, truncation: self.truncation(), axioms }
    }

    /// Smallest k ≤ bound with τ^{k-1}(Ψ)...τ(Ψ)Ψ ≡ 0 mod (p, t^T), where
    /// Ψ is the block operator assembled from the ψ♯_σ.
    pub fn psi_nilpotence(&self, w: &Window, psi: &[Mat], bound: usize) -> Option<usize> {
        let big = self.psi_total(w, psi);
        let big = self.m_reduce_mod_p(&big);
        let mut acc = big.clone();
        for k in 1..=bound {
            if acc.entries().iter().all(|e| e.is_empty()) {
                return Some(k);
            }
            acc = self.m_reduce_mod_p(&self.m_mul(&self.m_frob(&acc), &big));
        }
        None
    }

    /// ψ♯ assembled on ⊕ M_σ (block (σ, σ+1) is ψ♯_σ).
    pub fn psi_total(&self, w: &Window, psi: &[Mat]) -> Mat {
        let r = w.module.period();
        let offsets: Vec<usize> = (0..r).map(|s| (0..s).map(|u| w.module.rank(u)).sum()).collect();
        let n = w.module.total_rank();
        let mut big = Mat::zeros(n, n);
        for (s, m) in psi.iter().enumerate() {
            let (ro, co) = (offsets[s], offsets[(s + 1) % r]);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    big.set(ro + i, co + j, m.get(i, j).clone());
                }
            }
        }
        big
    }
}

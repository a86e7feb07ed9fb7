use serde::Serialize;

use super::{Connection, MvMat};
use crate::coeff_ring::{MvSeriesJson, Ring, Valuation};
use crate::deformation::DeformedWindow;
use crate::error::{construction_err, input_err, Error, Result};
use crate::linalg::{Mat, MatJson};
use crate::sym_structure::SymStructure;

/// Θ_σ = Σ_i ∇^i(e)|_{t=0} t^i / i! and its inverse, per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DworkData {
    pub h: Vec<Mat>,
    pub g: Vec<Mat>,
    pub slope: i64,
    pub horizontality: Valuation,
    pub equivariance: Valuation,
}

/// θ_σ(t_1, t_2) = Θ_σ(t_1) Θ_σ(t_2)^{-1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentDatum {
    pub theta: Vec<MvMat>,
    pub diagonal: Valuation,
    pub cocycle: Valuation,
    pub first_order_antisymmetric: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VelfReport {
    pub checked_at: i64,
    pub det_defect: Valuation,
    pub pi_defect: Valuation,
    pub det_ok: bool,
    pub pi_theta_ok: bool,
    /// θ_N ≠ 1 at first order; minimality is not asserted.
    pub theta_n_nontrivial: bool,
    pub first_order_witness: MatJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct DworkJson {
    pub slope: i64,
    pub theta_big: Vec<MatJson>,
    pub horizontality: Valuation,
    pub equivariance: Valuation,
    pub checked_at: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentJson {
    pub theta_degree0: Vec<Vec<MvSeriesJson>>,
    pub diagonal: Valuation,
    pub cocycle: Valuation,
    pub first_order_antisymmetric: bool,
}

fn factorial_valuation(p: u64, n: usize) -> u32 {
    let mut v = 0;
    let mut q = p as usize;
    while q <= n {
        v += (n / q) as u32;
        q *= p as usize;
    }
    v
}

fn at_least(v: Valuation, bound: i64) -> bool {
    v.at_least(bound)
}

impl Ring {
    /// Σ_i R_i(0) t^i / i! for R_0 = 1, R_{i+1} = R_i' + sign·(C R_i or R_i C).
    fn taylor(&self, c: &Mat, left: bool) -> Mat {
        let n = c.rows();
        let t = self.truncation();
        let p = self.p();
        let mut r_i = self.m_identity(n);
        let mut out = Mat::zeros(n, n);
        let mut fact = self.one();
        for i in 0..t {
            if i > 0 {
                let prod = if left { self.m_mul(c, &r_i) } else { self.m_scale(&self.s_int(-1), &self.m_mul(&r_i, c)) };
                r_i = self.m_add(&self.m_deriv(&r_i), &prod);
                let mut k = i as u64;
                while k.is_multiple_of(p) {
                    k /= p;
                }
                fact = self.mul(&fact, &self.from_int(k as i64));
            }
            let v = factorial_valuation(p, i);
            let unit_inv = self.inv(&fact).expect("p-free part of i! is a unit");
            let coeff = self.m_mul_p_pow(&self.m_map(&self.m_at_zero(&r_i), |x| self.s_scale(&unit_inv, x)), -(v as i64));
            let mono = self.s_monomial(self.one(), i);
            out = self.m_add(&out, &self.m_scale(&mono, &coeff));
        }
        out
    }

    /// Dwork trivialization of a deformed window with solved connection.
    pub fn dwork_theta(&self, w: &DeformedWindow, conn: &Connection) -> Result<DworkData> {
        let t = self.truncation();
        let need = factorial_valuation(self.p(), t.saturating_sub(1));
        if need > self.denom_budget() {
            return Err(input_err!("denominator budget {} is below v_p(({t}-1)!) = {need}", self.denom_budget()));
        }
        let special = &w.source.module;
        let slopes = self.graded_slopes(special)?;
        let z = slopes
            .isoclinal()
            .filter(|q| q.is_integer())
            .ok_or_else(|| construction_err!("missing skeleton: special fibre slopes {slopes} are not isoclinal of integral slope"))?
            .to_integer();
        let sk = self.skeleton(special, z)?;
        if sk.partial {
            return Err(construction_err!("missing skeleton: only {} of {} vectors", sk.basis.len(), special.rank(0)));
        }

        let r = special.period();
        let check = self.check_prec();
        let short = self.with_truncation(t.saturating_sub(1).max(1));
        let mut data = DworkData { h: Vec::new(), g: Vec::new(), slope: z, horizontality: Valuation::Infinite, equivariance: Valuation::Infinite };
        for s in 0..r {
            let c = &conn.c[s];
            let h = self.taylor(c, true);
            let g = self.taylor(c, false);
            let n = c.rows();
            if !self.m_congruent(&self.m_at_zero(&h), &self.m_identity(n), check) {
                return Err(Error::Verification(format!("Θ_{s} is not the identity mod t")));
            }
            let hg = self.m_valuation(&self.m_sub(&self.m_mul(&h, &g), &self.m_identity(n)));
            if !at_least(hg, check) {
                return Err(Error::Verification(format!("Θ_{s} times its Taylor inverse is not the identity")));
            }
            let horiz = short.m_valuation(&short.m_truncate(&self.m_sub(&self.m_deriv(&h), &self.m_mul(&h, c))));
            let lhs = self.m_mul(&h, &self.compose_from(&w.window.module, s, r));
            let rhs = self.m_mul(&self.compose_from(special, s, r), &self.m_frob_pow(&h, r));
            let equi = self.m_valuation(&self.m_sub(&lhs, &rhs));
            data.horizontality = data.horizontality.min(horiz);
            data.equivariance = data.equivariance.min(equi);
            data.h.push(h);
            data.g.push(g);
        }
        if !at_least(data.horizontality, check) {
            return Err(Error::Verification(format!("Θ is not horizontal: defect valuation {:?}", data.horizontality)));
        }
        if !at_least(data.equivariance, check) {
            return Err(Error::Verification(format!("Θ∘φ̃^r ≠ φ^r∘Θ: defect valuation {:?}", data.equivariance)));
        }
        Ok(data)
    }

    /// θ(t_1,t_2) = H(t_1) G(t_2); checks θ(t,t) = 1, the first-order
    /// antisymmetry and the cocycle law on a trivariate truncation.
    pub fn descent_datum(&self, d: &DworkData) -> Result<DescentDatum> {
        let check = self.check_prec();
        let small = self.with_truncation(self.truncation().min(4));
        let mut out = DescentDatum { theta: Vec::new(), diagonal: Valuation::Infinite, cocycle: Valuation::Infinite, first_order_antisymmetric: true };
        for (h, g) in d.h.iter().zip(&d.g) {
            let n = h.rows();
            let theta = self.mvm_mul(&self.mvm_from_mat(h, 0, 2), &self.mvm_from_mat(g, 1, 2));
            let diag = self.m_valuation(&self.m_sub(&self.mvm_diagonal(&theta), &self.m_identity(n)));
            out.diagonal = out.diagonal.min(diag);
            if self.truncation() > 1 {
                let a = self.mvm_coeff(&theta, &[1, 0]);
                let b = self.mvm_coeff(&theta, &[0, 1]);
                out.first_order_antisymmetric &= self.m_congruent(&a, &self.m_scale(&self.s_int(-1), &b), check);
            }
            let th = |i: usize, j: usize| small.mvm_mul(&small.mvm_from_mat(h, i, 3), &small.mvm_from_mat(g, j, 3));
            let lhs = small.mvm_mul(&th(0, 1), &th(1, 2));
            out.cocycle = out.cocycle.min(small.mvm_valuation_of_difference(&lhs, &th(0, 2)));
            out.theta.push(theta);
        }
        if !at_least(out.diagonal, check) || !at_least(out.cocycle, check) || !out.first_order_antisymmetric {
            return Err(Error::Verification("descent datum fails θ(t,t) = 1, antisymmetry or the cocycle law".into()));
        }
        Ok(out)
    }

    /// det θ_N = 1 and π(θ_N) = θ_M at degree 0, with π acting on the
    /// bivariate matrix through a Kronecker substitution t_2 = t^K.
    pub fn check_velf(&self, s: &SymStructure, theta_n: &DescentDatum, theta_m: &DescentDatum) -> Result<VelfReport> {
        let t = self.truncation();
        let check = self.check_prec();
        let (tn, tm) = (&theta_n.theta[0], &theta_m.theta[0]);
        let one = self.mv_const(self.one(), 2);
        let det_defect = self.mv_valuation(&self.mv_sub(&self.mvm_det(tn), &one));

        let bmax = s.params.b.iter().copied().max().unwrap_or(1).max(1);
        let stride = bmax * t.saturating_sub(1) + 1;
        let kk = self.with_truncation(stride * t);
        let jm = kk.skeleton(&s.n.module, s.params.z as i64 / 2)?.matrix();
        let im = kk.skeleton(&s.m.module, s.params.a.twice() / 2)?.matrix();
        let g = kk.m_product([&kk.m_inverse(&jm)?, &kk.mvm_to_kronecker(tn, stride), &jm]);
        let lhs = kk.sym_power_rep(s, &g)?;
        let rhs = kk.m_product([&kk.m_inverse(&im)?, &kk.mvm_to_kronecker(tm, stride), &im]);
        let pi_defect = self.mvm_valuation_of_difference(
            &self.mvm_from_kronecker(&lhs, stride, 2, t),
            &self.mvm_from_kronecker(&rhs, stride, 2, t),
        );
        let first = if t > 1 { self.mvm_coeff(tn, &[1, 0]) } else { Mat::zeros(tn.rows, tn.cols) };
        Ok(VelfReport {
            checked_at: check,
            det_defect,
            pi_defect,
            det_ok: at_least(det_defect, check),
            pi_theta_ok: at_least(pi_defect, check),
            theta_n_nontrivial: !self.m_valuation(&first).at_least(check),
            first_order_witness: self.m_to_json(&first),
        })
    }

    pub fn dwork_to_json(&self, d: &DworkData) -> DworkJson {
        DworkJson {
            slope: d.slope,
            theta_big: d.h.iter().map(|x| self.m_to_json(x)).collect(),
            horizontality: d.horizontality,
            equivariance: d.equivariance,
            checked_at: self.check_prec(),
        }
    }

    pub fn descent_to_json(&self, d: &DescentDatum) -> DescentJson {
        DescentJson {
            theta_degree0: self.mvm_to_json(&d.theta[0]),
            diagonal: d.diagonal,
            cocycle: d.cocycle,
            first_order_antisymmetric: d.first_order_antisymmetric,
        }
    }
}


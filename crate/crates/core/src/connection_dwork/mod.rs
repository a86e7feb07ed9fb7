//! The connection ∇ = d/dt + C_σ on a deformed window, the Dwork
//! trivialization Θ and the bivariate descent datum θ.

mod dwork;
mod mvmat;

pub use dwork::{DescentDatum, DworkData, VelfReport};
pub use mvmat::MvMat;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff_ring::{Ring, Valuation};
use crate::deformation::DeformedWindow;
use crate::error::{construction_err, input_err, Error, Result};
use crate::graded_semilinear::SigmaModule;
use crate::linalg::{Mat, MatJson};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    /// C_σ truncated at T.
    pub c: Vec<Mat>,
    /// C_σ at the solver's guard truncation (T + p + 1), used for ∇^p.
    pub(crate) c_guard: Vec<Mat>,
    pub iterations: usize,
    pub seed_iterations: usize,
    pub residual_valuation: Valuation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionJson {
    pub c: Vec<MatJson>,
    pub iterations: usize,
    pub seed_iterations: usize,
    pub residual_valuation: Valuation,
    pub checked_at: i64,
}

impl Ring {
    fn guard_ring(&self) -> Ring {
        self.with_truncation(self.truncation() + self.p() as usize + 1)
    }

    /// Ψ_σ = p A_σ^{-1}, required integral.
    fn psi_plain(&self, m: &SigmaModule) -> Result<Vec<Mat>> {
        (0..m.period())
            .map(|s| {
                let psi = self.m_mul_p_pow(&self.m_inverse(m.phi(s))?, 1);
                if !psi.is_integral() {
                    return Err(input_err!("p·A_{s}^{{-1}} is not integral: not a window"));
                }
                Ok(psi)
            })
            .collect()
    }

    /// One application of F on D = pC:
    /// D_{σ+1} ← t^{p-1} A_σ τ(D_σ) Ψ_σ - (∂A_σ) Ψ_σ.
    fn connection_step(&self, m: &SigmaModule, psi: &[Mat], d: &[Mat]) -> Vec<Mat> {
        let r = m.period();
        let tp = self.s_monomial(self.one(), self.p() as usize - 1);
        let mut out = vec![Mat::zeros(0, 0); r];
        for s in 0..r {
            let a = m.phi(s);
            let first = self.m_scale(&tp, &self.m_product([a, &self.m_frob(&d[s]), &psi[s]]));
            let second = self.m_mul(&self.m_deriv(a), &psi[s]);
            out[(s + 1) % r] = self.m_sub(&first, &second);
        }
        out
    }

    fn iterate_connection(&self, m: &SigmaModule, psi: &[Mat], mut d: Vec<Mat>, bound: usize) -> Result<(Vec<Mat>, usize)> {
        let prec = self.precision() as i64;
        for it in 1..=bound {
            let next = self.connection_step(m, psi, &d);
            if next.iter().zip(&d).all(|(x, y)| self.m_congruent(x, y, prec)) {
                return Ok((next, it));
            }
            d = next;
        }
        Err(construction_err!("connection iteration did not converge in {bound} steps; the window is broken"))
    }

    /// ∇ with ∇(φ̃x) = p t^{p-1} φ̃(∇x), by fixed-point iteration from
    /// C = 0 and from a random integral seed; both must agree.
    pub fn solve_connection(&self, w: &DeformedWindow, seed: u64) -> Result<Connection> {
        let report = self.verify_window(&w.window);
        if !report.passed() {
            return Err(input_err!("deformed module is not a window"));
        }
        let m = &w.window.module;
        let r = m.period();
        let kg = self.guard_ring();
        let psi = kg.psi_plain(m)?;
        let p = self.p() as usize;
        let bound = (kg.truncation().div_ceil(p - 1)).max(self.precision() as usize * r * m.total_rank()) + 1;

        let zero: Vec<Mat> = (0..r).map(|s| Mat::zeros(m.rank(s), m.rank(s))).collect();
        let (d, iterations) = kg.iterate_connection(m, &psi, zero, bound)?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random: Vec<Mat> = (0..r)
            .map(|s| {
                let n = m.rank(s);
                let mut c = Mat::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        c.set(i, j, kg.s_random(&mut rng));
                    }
                }
                kg.m_mul_p_pow(&c, 1)
            })
            .collect();
        let (d2, seed_iterations) = kg.iterate_connection(m, &psi, random, bound)?;
        let check = self.precision() as i64;
        for s in 0..r {
            let (a, b) = (self.m_truncate(&d[s]), self.m_truncate(&d2[s]));
            if let Some((i, j)) = self.m_first_difference(&a, &b, check) {
                return Err(Error::Verification(format!("solver seeds disagree at degree {s}, entry ({i},{j})")));
            }
        }

        let c_guard = d
            .iter()
            .enumerate()
            .map(|(s, x)| {
                if !kg.m_valuation(x).at_least(1) {
                    return Err(construction_err!("connection matrix C_{s} is not integral"));
                }
                Ok(kg.m_map(x, |e| kg.s_div_p_pow(e, 1).expect("valuation checked")))
            })
            .collect::<Result<Vec<_>>>()?;
        let c: Vec<Mat> = c_guard.iter().map(|x| self.m_truncate(x)).collect();

        let residual_valuation = self.connection_residual(m, &c);
        if !residual_valuation.at_least(self.check_prec()) {
            return Err(Error::Verification(format!("connection residual has valuation {residual_valuation:?}")));
        }
        let conn = Connection { c, c_guard, iterations, seed_iterations, residual_valuation };
        if let Some(s) = kg.nilpotence_failure(m, &psi, &conn) {
            return Err(Error::Verification(format!("∇^p(M_{s}) is not contained in A·φ(M_{s})")));
        }
        Ok(conn)
    }

    /// Rebuilds a connection from stored C_σ after re-checking the residual.
    pub fn connection_from_matrices(&self, w: &DeformedWindow, c: Vec<Mat>) -> Result<Connection> {
        let m = &w.window.module;
        if c.len() != m.period() || c.iter().enumerate().any(|(s, x)| (x.rows(), x.cols()) != (m.rank(s), m.rank(s))) {
            return Err(input_err!("connection matrices do not match the window shape"));
        }
        let residual_valuation = self.connection_residual(m, &c);
        if !residual_valuation.at_least(self.check_prec()) {
            return Err(Error::Verification(format!("stored connection has residual valuation {residual_valuation:?}")));
        }
        Ok(Connection { c_guard: c.clone(), c, iterations: 0, seed_iterations: 0, residual_valuation })
    }

    /// min over σ of v(∂A_σ + C_{σ+1}A_σ - p t^{p-1} A_σ τ(C_σ)) mod t^T,
    /// the defect of ∇(φ̃x) = p t^{p-1} φ̃(∇x) on basis vectors.
    pub fn connection_residual(&self, m: &SigmaModule, c: &[Mat]) -> Valuation {
        let r = m.period();
        let tp = self.s_monomial(self.one(), self.p() as usize - 1);
        (0..r)
            .map(|s| {
                let a = m.phi(s);
                let lhs = self.m_add(&self.m_deriv(a), &self.m_mul(&c[(s + 1) % r], a));
                let rhs = self.m_mul_p_pow(&self.m_scale(&tp, &self.m_mul(a, &self.m_frob(&c[s]))), 1);
                self.m_valuation(&self.m_sub(&lhs, &rhs))
            })
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Columns of ∇^i applied to the standard basis at degree σ:
    /// R_0 = 1, R_{i+1} = R_i' + C R_i.
    pub fn nabla_powers(&self, c: &Mat, count: usize) -> Vec<Mat> {
        let mut out = vec![self.m_identity(c.rows())];
        for _ in 1..count {
            let last = out.last().expect("nonempty");
            out.push(self.m_add(&self.m_deriv(last), &self.m_mul(c, last)));
        }
        out
    }

    /// First degree σ where Ψ_{σ-1} ∇^p e_j fails to vanish mod p.
    fn nilpotence_failure(&self, m: &SigmaModule, psi: &[Mat], conn: &Connection) -> Option<usize> {
        let r = m.period();
        let p = self.p() as usize;
        let outer = self.with_truncation(self.truncation() - p - 1);
        (0..r).find(|&s| {
            let rp = self.nabla_powers(&conn.c_guard[s], p + 1).pop().expect("p+1 powers");
            let img = outer.m_truncate(&self.m_mul(&psi[(s + r - 1) % r], &rp));
            !outer.m_valuation(&img).at_least(1)
        })
    }

    /// ∇(αx) - (α'x + α∇x) at degree σ, for a series α and a column x.
    pub fn leibniz_defect(&self, conn: &Connection, sigma: usize, alpha: &crate::Series, x: &Mat) -> Valuation {
        let nabla = |v: &Mat| self.m_add(&self.m_deriv(v), &self.m_mul(&conn.c[sigma], v));
        let lhs = nabla(&self.m_scale(alpha, x));
        let rhs = self.m_add(&self.m_scale(&self.s_deriv(alpha), x), &self.m_scale(alpha, &nabla(x)));
        let guard = self.with_truncation(self.truncation() - 1);
        guard.m_valuation(&guard.m_truncate(&self.m_sub(&lhs, &rhs)))
    }

    pub fn connection_to_json(&self, conn: &Connection) -> ConnectionJson {
        ConnectionJson {
            c: conn.c.iter().map(|x| self.m_to_json(x)).collect(),
            iterations: conn.iterations,
            seed_iterations: conn.seed_iterations,
            residual_valuation: conn.residual_valuation,
            checked_at: self.check_prec(),
        }
    }
}

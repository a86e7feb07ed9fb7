//! Graded windows over the point frame W(k) and the series frame W(k)[[t]].
//!
//! A normal decomposition is stored per degree as a unimodular matrix
//! B_σ = [L_σ | T_σ] whose first `l_ranks[σ]` columns span L_σ. Then
//! M_{σ,1} = L_σ ⊕ p T_σ, the matrix of U = φ_1 ⊕ φ is
//! V_σ = A_σ τ(B_σ) diag(p^{-1} on L, 1 on T), and
//! ψ♯_σ = τ(B_σ) diag(1 on L, p on T) V_σ^{-1} : M_{σ+1} → A ⊗_τ M_σ.

mod report;

pub use report::{AxiomResult, WindowReport};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeff_ring::{Ring, Series, Valuation};
use crate::error::{construction_err, input_err, Result};
use crate::graded_semilinear::{SigmaModule, SigmaModuleJson};
use crate::linalg::{Mat, MatJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// W(k)
    Point,
    /// W(k)[[t]] with t ↦ t^p
    Series,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDecomposition {
    pub bases: Vec<Mat>,
    pub l_ranks: Vec<usize>,
}

impl NormalDecomposition {
    pub fn l_cols(&self, sigma: usize) -> Vec<usize> {
        (0..self.l_ranks[sigma]).collect()
    }
    pub fn t_cols(&self, sigma: usize) -> Vec<usize> {
        (self.l_ranks[sigma]..self.bases[sigma].cols()).collect()
    }
    /// dim M_σ / M_{σ,1} = rank T_σ.
    pub fn quotient_dim(&self, sigma: usize) -> usize {
        self.bases[sigma].cols() - self.l_ranks[sigma]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub frame: Frame,
    pub module: SigmaModule,
    pub decomposition: NormalDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub l_ranks: Vec<usize>,
    pub bases: Vec<MatJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowJson {
    pub frame: Frame,
    pub module: SigmaModuleJson,
    pub decomposition: DecompositionJson,
}

/// Multiplies column j by p^{exps[j]}.
pub(crate) fn scale_columns(k: &Ring, m: &Mat, exps: &[i64]) -> Mat {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for (j, &e) in exps.iter().enumerate() {
            if e != 0 {
                out.set(i, j, k.s_mul_p_pow(m.get(i, j), e));
            }
        }
    }
    out
}

impl Ring {
    /// Reduction of every coefficient mod p (integral input).
    pub fn s_reduce_mod_p(&self, f: &Series) -> Series {
        let terms = f.terms().iter().map(|c| self.reduce_mod_p(c)).collect();
        self.s_from_terms(terms, 0)
    }

    pub fn m_reduce_mod_p(&self, a: &Mat) -> Mat {
        self.m_map(a, |x| self.s_reduce_mod_p(x))
    }

    /// True when the matrix is integral and divisible by p.
    pub fn m_divisible_by_p(&self, a: &Mat) -> bool {
        self.m_valuation(a).at_least(1)
    }

    /// Normal decomposition of M_{σ,1} = {x : φ(x) ∈ pM_{σ+1}} computed on
    /// the special fibre: L_σ = τ^{-1} of the kernel of A_σ mod p, T_σ the
    /// pivot coordinate vectors.
    pub fn m1_submodule(&self, m: &SigmaModule) -> Result<NormalDecomposition> {
        let r = m.period();
        let mut bases = Vec::with_capacity(r);
        let mut l_ranks = Vec::with_capacity(r);
        for s in 0..r {
            let a = self.m_at_zero(m.phi(s));
            if !a.is_integral() {
                return Err(input_err!("φ is not integral in degree {s}"));
            }
            let ker = self.m_kernel_mod_p(&a);
            let n = m.rank(s);
            let mut b = Mat::zeros(n, n);
            for (j, v) in ker.basis.iter().enumerate() {
                for (i, c) in v.iter().enumerate() {
                    let back = self.reduce_mod_p(&self.frob_pow(c, self.r() - 1));
                    b.set(i, j, self.s_const(back));
                }
            }
            for (j, &pc) in ker.pivots.iter().enumerate() {
                b.set(pc, ker.basis.len() + j, self.s_one());
            }
            l_ranks.push(ker.basis.len());
            bases.push(b);
        }
        Ok(NormalDecomposition { bases, l_ranks })
    }

    /// Window with the canonical decomposition of `m1_submodule`.
    pub fn window_from_module(&self, m: SigmaModule, frame: Frame) -> Result<Window> {
        let decomposition = self.m1_submodule(&m)?;
        Ok(Window { frame, module: m, decomposition })
    }

    /// Basis of M_{σ,1} (columns).
    pub fn m1_basis(&self, w: &Window, sigma: usize) -> Mat {
        let d = &w.decomposition;
        let exps: Vec<i64> = (0..d.bases[sigma].cols()).map(|j| i64::from(j >= d.l_ranks[sigma])).collect();
        scale_columns(self, &d.bases[sigma], &exps)
    }

    /// The matrix of U^♯ in degree σ.
    pub fn u_sharp(&self, w: &Window, sigma: usize) -> Mat {
        let d = &w.decomposition;
        let b = &d.bases[sigma];
        let exps: Vec<i64> = (0..b.cols()).map(|j| if j < d.l_ranks[sigma] { -1 } else { 0 }).collect();
        scale_columns(self, &self.m_mul(w.module.phi(sigma), &self.m_frob(b)), &exps)
    }

    /// ψ♯ per degree: psi[σ] maps M_{σ+1} to A ⊗_τ M_σ.
    pub fn psi_sharp(&self, w: &Window) -> Result<Vec<Mat>> {
        let d = &w.decomposition;
        (0..w.module.period())
            .map(|s| {
                let v = self.u_sharp(w, s);
                let vinv = self
                    .m_inverse(&v)
                    .map_err(|e| construction_err!("U♯ is not invertible in degree {s} (W.3 fails): {e}"))?;
                if !vinv.is_integral() {
                    return Err(construction_err!("U♯ is not invertible over the frame in degree {s} (W.3 fails)"));
                }
                let b = &d.bases[s];
                let exps: Vec<i64> = (0..b.cols()).map(|j| i64::from(j >= d.l_ranks[s])).collect();
                Ok(self.m_mul(&scale_columns(self, &self.m_frob(b), &exps), &vinv))
            })
            .collect()
    }

    /// Checks that a candidate decomposition lifts the same M_1: in
    /// coordinates of the reference basis every L-column has T-part ≡ 0 mod p
    /// and the L-parts are independent mod (p, t); B is unimodular.
    pub fn validate_decomposition(&self, w: &Window, cand: &NormalDecomposition) -> Result<()> {
        let r = w.module.period();
        if cand.bases.len() != r || cand.l_ranks != w.decomposition.l_ranks {
            return Err(input_err!("decomposition shape differs from the window's"));
        }
        for s in 0..r {
            let b = &cand.bases[s];
            if (b.rows(), b.cols()) != (w.module.rank(s), w.module.rank(s)) || !b.is_integral() {
                return Err(input_err!("degree {s}: basis matrix has the wrong shape or denominators"));
            }
            let det0 = self.m_det(&self.m_at_zero(b));
            if self.gauss_valuation(&det0) != Valuation::Finite(0) {
                return Err(input_err!("degree {s}: L ⊕ T is not all of M"));
            }
            let refinv = self.m_inverse(&w.decomposition.bases[s])?;
            let coords = self.m_mul(&refinv, &b.submatrix(&(0..b.rows()).collect::<Vec<_>>(), &cand.l_cols(s)));
            let lr = cand.l_ranks[s];
            let tpart = coords.submatrix(&(lr..b.rows()).collect::<Vec<_>>(), &(0..lr).collect::<Vec<_>>());
            if !self.m_divisible_by_p(&tpart) {
                return Err(input_err!("degree {s}: L does not lie in M_1"));
            }
        }
        Ok(())
    }

    /// Random point-frame window of rank n with at most one p on each
    /// diagonal, conjugated by random unimodular matrices.
    pub fn random_window<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Window {
        let r = self.r();
        let g: Vec<Mat> = (0..r).map(|_| self.m_random_unimodular(n, rng)).collect();
        let phi = (0..r)
            .map(|s| {
                let mut d = vec![1i64; n];
                if rng.gen_bool(0.7) {
                    d[rng.gen_range(0..n)] = self.p() as i64;
                }
                let diag = self.m_from_ints(&(0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0 }).collect()).collect::<Vec<_>>());
                self.m_product([&self.m_inverse(&g[(s + 1) % r]).expect("unimodular"), &diag, &self.m_frob(&g[s])])
            })
            .collect();
        self.window_from_module(SigmaModule::uniform(phi).expect("uniform ranks"), Frame::Point)
            .expect("diagonal windows have normal decompositions")
    }

    /// A random decomposition of the same M_1: L' = L G + p X, T' = T H + L K.
    pub fn random_decomposition<R: Rng + ?Sized>(&self, w: &Window, rng: &mut R) -> NormalDecomposition {
        let d = &w.decomposition;
        let bases = (0..w.module.period())
            .map(|s| {
                let b = &d.bases[s];
                let n = b.rows();
                let lr = d.l_ranks[s];
                let all: Vec<usize> = (0..n).collect();
                let l = b.submatrix(&all, &d.l_cols(s));
                let t = b.submatrix(&all, &d.t_cols(s));
                let g = self.m_random_unimodular(lr, rng);
                let h = self.m_random_unimodular(n - lr, rng);
                let x = self.m_mul_p_pow(&self.m_random(n, lr, rng), 1);
                let kk = self.m_random(lr, n - lr, rng);
                let l2 = self.m_add(&self.m_mul(&l, &g), &x);
                let t2 = self.m_add(&self.m_mul(&t, &h), &self.m_mul(&l, &kk));
                l2.hstack(&t2)
            })
            .collect();
        NormalDecomposition { bases, l_ranks: d.l_ranks.clone() }
    }

    /// Special fibre t = 0 of a series-frame window.
    pub fn specialize(&self, w: &Window) -> Window {
        let phi = w.module.matrices().iter().map(|a| self.m_at_zero(a)).collect();
        let bases = w.decomposition.bases.iter().map(|b| self.m_at_zero(b)).collect();
        Window {
            frame: Frame::Point,
            module: SigmaModule::new(w.module.ranks().to_vec(), phi).expect("same shapes"),
            decomposition: NormalDecomposition { bases, l_ranks: w.decomposition.l_ranks.clone() },
        }
    }

    /// Window attached to a Dieudonné module (pM ⊆ φM ⊆ M) over W(k).
    pub fn window_from_dieudonne(&self, m: &SigmaModule) -> Result<Window> {
        for s in 0..m.period() {
            let a = m.phi(s);
            if !a.is_integral() || !a.is_constant() {
                return Err(input_err!("degree {s}: φ is not an integral point-frame matrix"));
            }
            if a.rows() != a.cols() {
                return Err(input_err!("degree {s}: φ is not square"));
            }
            let psi = self.m_mul_p_pow(&self.m_inverse(a)?, 1);
            if !psi.is_integral() {
                return Err(input_err!("degree {s}: pM is not contained in φM"));
            }
        }
        self.window_from_module(m.clone(), Frame::Point)
    }

    /// The underlying Dieudonné module of a point-frame window.
    pub fn dieudonne_from_window(&self, w: &Window) -> SigmaModule {
        w.module.clone()
    }

    pub fn window_to_json(&self, w: &Window) -> WindowJson {
        WindowJson {
            frame: w.frame,
            module: self.module_to_json(&w.module),
            decomposition: DecompositionJson {
                l_ranks: w.decomposition.l_ranks.clone(),
                bases: w.decomposition.bases.iter().map(|b| self.m_to_json(b)).collect(),
            },
        }
    }

    pub fn window_from_json(&self, j: &WindowJson) -> Result<Window> {
        let module = self.module_from_json(&j.module)?;
        let bases = j.decomposition.bases.iter().map(|b| self.m_from_json(b)).collect::<Result<Vec<_>>>()?;
        if bases.len() != module.period() || j.decomposition.l_ranks.len() != module.period() {
            return Err(input_err!("decomposition length differs from the period"));
        }
        for (s, b) in bases.iter().enumerate() {
            if (b.rows(), b.cols()) != (module.rank(s), module.rank(s)) || j.decomposition.l_ranks[s] > b.cols() {
                return Err(input_err!("degree {s}: malformed decomposition"));
            }
        }
        Ok(Window {
            frame: j.frame,
            module,
            decomposition: NormalDecomposition { bases, l_ranks: j.decomposition.l_ranks.clone() },
        })
    }
}

#[cfg(test)]
mod tests;

//! The explicit Sym-structure constructor.
//!
//! N is rank 2 with φ the swap [[0,1],[p,0]] (or a split diagonal) at the
//! degrees σ_j and the identity elsewhere; N_i is rank 1 with p^{f_{i,j}}
//! at σ_j. The product P = ⊕ N_i ⊗ Sym^{b_i} N carries the monomial basis
//! x_i e_1^b e_2^{b_i-b}. M_σ is the lattice φ^k(⊕ p^{-e_{b,i}} x_i L^b T^{b_i-b})
//! inside Q ⊗ P_σ, k steps after σ_j, and ζ_σ is the matrix of its basis
//! in P-coordinates.

mod build;
mod params;
mod verify;

pub use build::{LadderStep, RaiseOrder};
pub use params::{choose_parameters, feasible_specs, HalfInt, SweepRanges, SymParams, SymSpec};
pub use verify::{slope_lemma_oracle, SymCheck, SymReport};

use serde::Serialize;

use crate::coeff_ring::Ring;
use crate::error::{construction_err, Result};
use crate::graded_semilinear::{SigmaModule, SigmaModuleJson};
use crate::linalg::{Mat, MatJson};
use crate::windows::{Window, WindowJson};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymStructure {
    pub params: SymParams,
    pub n: Window,
    pub n_i: Vec<SigmaModule>,
    pub product: SigmaModule,
    pub m: Window,
    /// ζ_σ: M_σ-coordinates to P_σ-coordinates.
    pub zeta: Vec<Mat>,
    pub ladder: Vec<LadderStep>,
    pub order: RaiseOrder,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymStructureJson {
    pub params: SymParams,
    pub raise_order: RaiseOrder,
    pub n: WindowJson,
    pub n_i: Vec<SigmaModuleJson>,
    pub m: WindowJson,
    pub zeta: Vec<MatJson>,
    pub ladder: Vec<LadderStep>,
}

impl Ring {
    pub fn sym_to_json(&self, s: &SymStructure) -> SymStructureJson {
        SymStructureJson {
            params: s.params.clone(),
            raise_order: s.order,
            n: self.window_to_json(&s.n),
            n_i: s.n_i.iter().map(|x| self.module_to_json(x)).collect(),
            m: self.window_to_json(&s.m),
            zeta: s.zeta.iter().map(|z| self.m_to_json(z)).collect(),
            ladder: s.ladder.clone(),
        }
    }

    /// π(g) in M_0-coordinates for g in N_0-coordinates:
    /// ζ_0^{-1} (⊕_i Sym^{b_i} g) ζ_0.
    pub fn pi_degree0(&self, s: &SymStructure, g: &Mat) -> Result<Mat> {
        let blocks: Vec<Mat> = s.params.b.iter().map(|&bi| self.m_sym(g, bi)).collect();
        let z0 = &s.zeta[0];
        Ok(self.m_product([&self.m_inverse(z0)?, &Mat::block_diag(&blocks), z0]))
    }

    /// The representation on the skeleton I of M induced from g acting on
    /// the skeleton J of N.
    pub fn sym_power_rep(&self, s: &SymStructure, g: &Mat) -> Result<Mat> {
        let z = s.params.z as i64;
        if z % 2 != 0 || !s.params.a.is_integer() || s.params.slope_pair.is_some() {
            return Err(construction_err!("missing skeleton: N and M must be isoclinal of integral slope"));
        }
        let j = self.skeleton(&s.n.module, z / 2)?;
        let i = self.skeleton(&s.m.module, s.params.a.twice() / 2)?;
        if j.partial || i.partial {
            return Err(construction_err!("missing skeleton: solution rank below full over F_{{p^r}}"));
        }
        let (jm, im) = (j.matrix(), i.matrix());
        let g_n = self.m_product([&jm, g, &self.m_inverse(&jm)?]);
        let pi0 = self.pi_degree0(s, &g_n)?;
        Ok(self.m_product([&self.m_inverse(&im)?, &pi0, &im]))
    }
}

#[cfg(test)]
mod tests;

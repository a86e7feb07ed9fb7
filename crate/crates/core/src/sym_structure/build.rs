use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::SymParams;
use super::SymStructure;
use crate::coeff_ring::{Ring, Valuation};
use crate::error::{construction_err, input_err, Result};
use crate::graded_semilinear::SigmaModule;
use crate::linalg::Mat;
use crate::windows::{scale_columns, Frame, Window};

/// How the ladder picks among legal raises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RaiseOrder {
    /// Round-robin over blocks, top-down over b within a block.
    Default,
    /// Uniform among all legal raises, from a seeded generator.
    Seeded(u64),
}

/// Ladder state at one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderStep {
    pub degree: usize,
    pub interval: usize,
    /// e[i][b] in force at this degree.
    pub profile: Vec<Vec<usize>>,
    /// (i, b) raised on the way to the next degree.
    pub raised: Option<(usize, usize)>,
}

fn legal(e: &[usize], b: usize, f: usize) -> bool {
    let v = e[b] + 1;
    v <= b + f && (b + 1 == e.len() || v <= e[b + 1]) && (b == 0 || v <= e[b - 1] + 1)
}

impl Ring {
    /// The rank-2 module N: swap (or split diagonal) at σ_j, identity elsewhere.
    pub fn build_n(&self, p: &SymParams) -> Result<Window> {
        let swap = self.m_from_ints(&[vec![0, 1], vec![self.p() as i64, 0]]);
        let up = self.m_from_ints(&[vec![self.p() as i64, 0], vec![0, 1]]);
        let down = self.m_from_ints(&[vec![1, 0], vec![0, self.p() as i64]]);
        let phi = (0..p.r)
            .map(|s| match p.sigma.iter().position(|&x| x == s) {
                None => self.m_identity(2),
                Some(j) => match p.slope_pair {
                    None => swap.clone(),
                    Some([zp, _]) if j < zp => up.clone(),
                    Some(_) => down.clone(),
                },
            })
            .collect();
        let module = SigmaModule::uniform(phi)?;
        let w = self.window_from_module(module, Frame::Point)?;
        for s in 0..p.r {
            let want = if p.is_sigma(s) { 1 } else { 2 };
            if w.decomposition.quotient_dim(s) != want {
                return Err(construction_err!("dim N_{s}/N_{s},1 = {} (expected {want})", w.decomposition.quotient_dim(s)));
            }
        }
        Ok(w)
    }

    /// The rank-one twists: p^{f_{i,j}} at σ_j, 1 elsewhere.
    pub fn build_ni(&self, p: &SymParams) -> Result<Vec<SigmaModule>> {
        (0..p.c())
            .map(|i| {
                let phi = (0..p.r)
                    .map(|s| match p.sigma.iter().position(|&x| x == s) {
                        Some(j) => self.m_diag(&[self.s_const(self.p_pow(p.f[i][j] as u32))]),
                        None => self.m_identity(1),
                    })
                    .collect();
                SigmaModule::uniform(phi)
            })
            .collect()
    }

    /// ⊕_i N_i ⊗ Sym^{b_i} N on the monomial bases x_i e_1^b e_2^{b_i-b}.
    pub fn build_product(&self, p: &SymParams, n: &SigmaModule, ni: &[SigmaModule]) -> Result<SigmaModule> {
        let parts = ni
            .iter()
            .zip(&p.b)
            .map(|(x, &bi)| self.tensor(x, &self.sym_power(n, bi)?))
            .collect::<Result<Vec<_>>>()?;
        self.direct_sum(&parts)
    }

    /// Runs the lattice ladder and returns the full structure.
    pub fn build_m(&self, p: &SymParams, n: Window, ni: Vec<SigmaModule>, order: RaiseOrder) -> Result<SymStructure> {
        let product = self.build_product(p, &n.module, &ni)?;
        let dim = p.n;
        let mut zeta: Vec<Option<Mat>> = vec![None; p.r];
        let mut ladder: Vec<Option<LadderStep>> = vec![None; p.r];
        let mut rng = match order {
            RaiseOrder::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            RaiseOrder::Default => None,
        };
        let sym_bases: Vec<Mat> = (0..p.z)
            .map(|j| {
                let bj = &n.decomposition.bases[p.sigma[j]];
                Mat::block_diag(&p.b.iter().map(|&bi| self.m_sym(bj, bi)).collect::<Vec<_>>())
            })
            .collect();
        let mut next_block = 0usize;
        for j in 0..p.z {
            let mut e: Vec<Vec<usize>> = p.b.iter().map(|&bi| vec![0; bi + 1]).collect();
            let mut phi = self.m_identity(dim);
            let degrees = p.interval(j);
            for &s in &degrees {
                let exps: Vec<i64> = e.iter().flatten().map(|&x| -(x as i64)).collect();
                let z = self.m_mul(&phi, &scale_columns(self, &sym_bases[j], &exps));
                zeta[s] = Some(z);
                let profile = e.clone();
                let raised = if p.in_omega(s) {
                    let pick = self.pick_raise(p, j, &e, &mut next_block, rng.as_mut());
                    let Some((i, b)) = pick else {
                        return Err(construction_err!("ladder stuck at degree {s} with profile {e:?}"));
                    };
                    e[i][b] += 1;
                    Some((i, b))
                } else {
                    None
                };
                ladder[s] = Some(LadderStep { degree: s, interval: j, profile, raised });
                phi = self.m_mul(product.phi(s), &self.m_frob(&phi));
            }
            let terminal: Vec<Vec<usize>> = p.b.iter().enumerate().map(|(i, &bi)| (0..=bi).map(|b| b + p.f[i][j]).collect()).collect();
            if e != terminal {
                return Err(construction_err!("interval {j}: ladder ended at {e:?}, expected {terminal:?}"));
            }
            // consistency: φ^{len}(⊕ p^{-f} N_i ⊗ (p^{-1}L)^b T^{b_i-b}) is the product lattice at σ_{j+1}
            let exps: Vec<i64> = terminal.iter().flatten().map(|&x| -(x as i64)).collect();
            let next = &sym_bases[(j + 1) % p.z];
            let image = self.m_mul(&phi, &scale_columns(self, &sym_bases[j], &exps));
            let g = self.m_mul(&self.m_inverse(next)?, &image);
            let det0 = self.m_det(&g);
            if !g.is_integral() || self.gauss_valuation(&det0) != Valuation::Finite(0) {
                return Err(construction_err!("interval {j}: the lattice reached at σ_{} is not the product lattice", (j + 1) % p.z));
            }
        }
        let zeta: Vec<Mat> = zeta.into_iter().map(|z| z.expect("every degree lies in an interval")).collect();
        let ladder: Vec<LadderStep> = ladder.into_iter().map(|l| l.expect("every degree lies in an interval")).collect();
        let phi_m = (0..p.r)
            .map(|s| {
                let zi = self.m_inverse(&zeta[(s + 1) % p.r])?;
                Ok(self.m_product([&zi, product.phi(s), &self.m_frob(&zeta[s])]))
            })
            .collect::<Result<Vec<_>>>()?;
        let m_module = SigmaModule::uniform(phi_m)?;
        if m_module.is_quasi() {
            return Err(construction_err!("the ladder lattice is not φ-stable"));
        }
        let m = self.window_from_module(m_module, Frame::Point)?;
        Ok(SymStructure { params: p.clone(), n, n_i: ni, product, m, zeta, ladder, order })
    }

    fn pick_raise(
        &self,
        p: &SymParams,
        j: usize,
        e: &[Vec<usize>],
        next_block: &mut usize,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Option<(usize, usize)> {
        let c = p.c();
        match rng {
            Some(rng) => {
                let all: Vec<(usize, usize)> = (0..c)
                    .flat_map(|i| (0..=p.b[i]).map(move |b| (i, b)))
                    .filter(|&(i, b)| legal(&e[i], b, p.f[i][j]))
                    .collect();
                all.choose(rng).copied()
            }
            None => {
                for step in 0..c {
                    let i = (*next_block + step) % c;
                    if let Some(b) = (0..=p.b[i]).rev().find(|&b| legal(&e[i], b, p.f[i][j])) {
                        *next_block = (i + 1) % c;
                        return Some((i, b));
                    }
                }
                None
            }
        }
    }

    /// Full constructor from a spec.
    pub fn build_sym(&self, spec: &super::SymSpec, order: RaiseOrder) -> Result<SymStructure> {
        if self.r() != spec.r {
            return Err(input_err!("spec period r = {} differs from the ring's residue degree {}", spec.r, self.r()));
        }
        let p = super::choose_parameters(spec)?;
        let n = self.build_n(&p)?;
        let ni = self.build_ni(&p)?;
        self.build_m(&p, n, ni, order)
    }
}

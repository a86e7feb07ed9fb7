//! Exterior powers of windows whose L_σ have rank at most one,
//! normalized by a multiplicative twist, and their functoriality.
//!
//! Wedge bases are lexicographic in the column indices of the normal
//! decomposition [L | T]; with rank L_σ = 1 the subsets containing the L
//! column come first, so L^{(k)} = L ⊗ ∧^{k-1} T is again a leading block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff_ring::{Ring, Series, Valuation};
use crate::error::{input_err, Error, Result};
use crate::graded_semilinear::{binomial, SigmaModule};
use crate::linalg::{subsets, Mat, MatJson};
use crate::windows::{Frame, NormalDecomposition, Window};

/// Rank-one graded module with unit Frobenius matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeTwist {
    pub units: Vec<Series>,
}

/// Per-degree matrices α_σ: M_σ → M'_σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMorphism {
    pub maps: Vec<Mat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub k: usize,
    pub trials: usize,
    pub agreeing: usize,
    /// First trial that disagreed, with the degree.
    pub mismatch: Option<(usize, usize)>,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.agreeing == self.trials
    }
}

impl MultiplicativeTwist {
    pub fn trivial(k: &Ring, r: usize) -> Self {
        MultiplicativeTwist { units: vec![k.s_one(); r] }
    }
}

impl Ring {
    /// w → w·g (an isomorphism g^{-1}), optionally followed by p-scaling or
    /// a Frobenius power. Used to exercise functoriality.
    pub fn random_morphism<R: Rng + ?Sized>(&self, w: &Window, rng: &mut R) -> (Window, WindowMorphism) {
        let r = self.r();
        let n = w.module.rank(0);
        let g: Vec<Mat> = (0..r).map(|_| self.m_random_unimodular(n, rng)).collect();
        let module = self.change_basis(&w.module, &g).expect("unimodular change of basis");
        let target = self.window_from_module(module, Frame::Point).expect("isomorphic window");
        let mut maps: Vec<Mat> = g.iter().map(|x| self.m_inverse(x).expect("unimodular")).collect();
        match rng.gen_range(0..3) {
            0 => {}
            1 => maps = maps.iter().map(|m| self.m_mul_p_pow(m, 1)).collect(),
            _ => maps = (0..r).map(|s| self.m_mul(&self.compose_from(&target.module, s, r), &maps[s])).collect(),
        }
        (target, WindowMorphism { maps })
    }

    pub fn twist(&self, units: Vec<Series>) -> Result<MultiplicativeTwist> {
        for (s, u) in units.iter().enumerate() {
            if u.denom_exp() != 0 || self.gauss_valuation(&self.s_at_zero(u)) != Valuation::Finite(0) {
                return Err(input_err!("twist matrix at degree {s} is not a unit"));
            }
        }
        Ok(MultiplicativeTwist { units })
    }

    /// P^{(0)⊗e} for any integer e.
    pub fn twist_power(&self, tw: &MultiplicativeTwist, e: i64) -> Result<SigmaModule> {
        let phi = tw
            .units
            .iter()
            .map(|u| {
                let base = if e < 0 { self.s_inv(u)? } else { u.clone() };
                let mut acc = self.s_one();
                for _ in 0..e.unsigned_abs() {
                    acc = self.s_mul(&acc, &base);
                }
                let mut m = Mat::zeros(1, 1);
                m.set(0, 0, acc);
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        SigmaModule::uniform(phi)
    }

    /// The normalized graded exterior power ∧^k M ⊗ P^{(0)⊗(1-k)}.
    pub fn exterior_power(&self, w: &Window, k: usize, twist: &MultiplicativeTwist) -> Result<Window> {
        let out = self.exterior_power_unchecked(w, k, twist)?;
        let report = self.verify_window(&out);
        let structural = ["W.1", "W.2", "W.3"].iter().all(|a| report.passes(a));
        let display_case = w.decomposition.l_ranks.contains(&0);
        if !structural || (display_case && !report.passed()) {
            let failed: Vec<&str> = report.axioms.iter().filter(|a| !a.pass).map(|a| a.axiom.as_str()).collect();
            return Err(Error::Verification(format!("exterior power fails {failed:?}")));
        }
        Ok(out)
    }

    fn exterior_power_unchecked(&self, w: &Window, k: usize, twist: &MultiplicativeTwist) -> Result<Window> {
        let r = w.module.period();
        if let Some(s) = (0..r).find(|&s| w.decomposition.l_ranks[s] > 1) {
            return Err(input_err!("rank L_{s} = {} exceeds one", w.decomposition.l_ranks[s]));
        }
        if (0..r).any(|s| k > w.module.rank(s)) {
            return Err(input_err!("k = {k} exceeds the rank"));
        }
        if twist.units.len() != r {
            return Err(input_err!("twist has period {}, window has {r}", twist.units.len()));
        }
        let wedge = self.wedge_power(&w.module, k)?;
        let tw = self.twist_power(twist, 1 - k as i64)?;
        let module = self.tensor(&wedge, &tw)?;
        let bases = w.decomposition.bases.iter().map(|b| self.m_wedge(b, k)).collect();
        let l_ranks = (0..r)
            .map(|s| if w.decomposition.l_ranks[s] == 1 && k >= 1 { binomial(w.module.rank(s) - 1, k - 1) } else { 0 })
            .collect();
        Ok(Window { frame: w.frame, module, decomposition: NormalDecomposition { bases, l_ranks } })
    }

    /// Recomputes with `trials` random normal decompositions and compares
    /// module, M_1 lattice and ψ♯ with the reference output.
    pub fn independence_check(&self, w: &Window, k: usize, twist: &MultiplicativeTwist, trials: usize, seed: u64) -> Result<IndependenceReport> {
        let reference = self.exterior_power_unchecked(w, k, twist)?;
        let ref_psi = self.psi_sharp(&reference)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let check = self.check_prec();
        let mut report = IndependenceReport { k, trials, agreeing: 0, mismatch: None };
        for trial in 0..trials {
            let d = self.random_decomposition(w, &mut rng);
            self.validate_decomposition(w, &d)?;
            let other = Window { decomposition: d, ..w.clone() };
            let out = self.exterior_power_unchecked(&other, k, twist)?;
            let psi = self.psi_sharp(&out)?;
            let bad = (0..w.module.period()).find(|&s| {
                !self.m_congruent(out.module.phi(s), reference.module.phi(s), check)
                    || !self.same_lattice(&self.m1_basis(&out, s), &self.m1_basis(&reference, s))
                    || !self.m_congruent(&psi[s], &ref_psi[s], check)
            });
            match bad {
                None => report.agreeing += 1,
                Some(s) => {
                    report.mismatch.get_or_insert((trial, s));
                }
            }
        }
        Ok(report)
    }

    /// Column spans agree: each basis is an integral combination of the other.
    pub fn same_lattice(&self, a: &Mat, b: &Mat) -> bool {
        let (Ok(ai), Ok(bi)) = (self.m_inverse(a), self.m_inverse(b)) else {
            return false;
        };
        self.m_mul(&ai, b).is_integral() && self.m_mul(&bi, a).is_integral()
    }

    /// α_{σ+1} A_σ = A'_σ τ(α_σ) and α(M_1) ⊆ M'_1.
    pub fn check_morphism(&self, src: &Window, dst: &Window, alpha: &WindowMorphism) -> Result<()> {
        let r = src.module.period();
        let check = self.check_prec();
        if alpha.maps.len() != r || dst.module.period() != r {
            return Err(input_err!("morphism has the wrong period"));
        }
        for s in 0..r {
            let lhs = self.m_mul(&alpha.maps[(s + 1) % r], src.module.phi(s));
            let rhs = self.m_mul(dst.module.phi(s), &self.m_frob(&alpha.maps[s]));
            if let Some((i, j)) = self.m_first_difference(&lhs, &rhs, check) {
                return Err(input_err!("α does not commute with φ at degree {s}, entry ({i},{j})"));
            }
            let image = self.m_mul(&alpha.maps[s], &self.m1_basis(src, s));
            if !self.m_mul(&self.m_inverse(&self.m1_basis(dst, s))?, &image).is_integral() {
                return Err(input_err!("α does not map M_1 into M'_1 at degree {s}"));
            }
        }
        Ok(())
    }

    /// α^{(k)} = ∧^k α ⊗ c^{⊗(1-k)} for a map c of twists (scalars per degree).
    pub fn functorial_power(&self, alpha: &WindowMorphism, k: usize, twist_map: Option<&[Series]>) -> Result<WindowMorphism> {
        let maps = alpha
            .maps
            .iter()
            .enumerate()
            .map(|(s, a)| {
                let wedge = self.m_wedge(a, k);
                match twist_map {
                    None => Ok(wedge),
                    Some(c) => {
                        let base = if k > 1 { self.s_inv(&c[s])? } else { c[s].clone() };
                        let mut scale = self.s_one();
                        for _ in 0..(1 - k as i64).unsigned_abs() {
                            scale = self.s_mul(&scale, &base);
                        }
                        Ok(self.m_scale(&scale, &wedge))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowMorphism { maps })
    }

    /// α ∘ β.
    pub fn compose_morphisms(&self, alpha: &WindowMorphism, beta: &WindowMorphism) -> WindowMorphism {
        WindowMorphism { maps: alpha.maps.iter().zip(&beta.maps).map(|(a, b)| self.m_mul(a, b)).collect() }
    }

    pub fn morphism_to_json(&self, alpha: &WindowMorphism) -> Vec<MatJson> {
        alpha.maps.iter().map(|m| self.m_to_json(m)).collect()
    }
}

/// All k-element subset sums of a slope list, sorted (brute force).
pub fn subset_sum_oracle(slopes: &[num_rational::Rational64], k: usize) -> Vec<num_rational::Rational64> {
    let mut out: Vec<_> = subsets(slopes.len(), k).iter().map(|s| s.iter().map(|&i| slopes[i]).sum()).collect();
    out.sort();
    out
}

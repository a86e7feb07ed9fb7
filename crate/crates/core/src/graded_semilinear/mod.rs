//! Z/rZ-graded free modules with a degree +1 Frobenius-semilinear operator.
//!
//! The operator is stored as matrices A_σ of size n_{σ+1} x n_σ acting by
//! x ↦ A_σ τ(x). Coordinates are with respect to fixed bases of each M_σ.

mod slopes;

pub use slopes::{NewtonPolygon, Skeleton, SlopeMultiset};

use serde::{Deserialize, Serialize};

use crate::coeff_ring::Ring;
use crate::error::{input_err, Result};
use crate::linalg::{Mat, MatJson};

/// Upper bound on the rank of derived modules (tensor, wedge, Sym).
pub const DERIVED_RANK_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaModule {
    ranks: Vec<usize>,
    phi: Vec<Mat>,
}

/// Wire form of a graded module with its operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaModuleJson {
    pub ranks: Vec<usize>,
    pub matrices: Vec<MatJson>,
    #[serde(default)]
    pub quasi: bool,
}

impl SigmaModule {
    /// Checks shapes: A_σ must be n_{σ+1} x n_σ.
    pub fn new(ranks: Vec<usize>, phi: Vec<Mat>) -> Result<SigmaModule> {
        let r = ranks.len();
        if r == 0 {
            return Err(input_err!("empty grading"));
        }
        if phi.len() != r {
            return Err(input_err!("{} matrices for period {r}", phi.len()));
        }
        for (s, a) in phi.iter().enumerate() {
            let want = (ranks[(s + 1) % r], ranks[s]);
            if (a.rows(), a.cols()) != want {
                return Err(input_err!(
                    "matrix in degree {s} is {}x{}, expected {}x{}",
                    a.rows(),
                    a.cols(),
                    want.0,
                    want.1
                ));
            }
        }
        Ok(SigmaModule { ranks, phi })
    }

    /// All degrees of rank n with the same operator matrix pattern.
    pub fn uniform(phi: Vec<Mat>) -> Result<SigmaModule> {
        let n = phi.first().map_or(0, |a| a.cols());
        SigmaModule::new(vec![n; phi.len()], phi)
    }

    pub fn period(&self) -> usize {
        self.ranks.len()
    }
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
    pub fn rank(&self, sigma: usize) -> usize {
        self.ranks[sigma % self.period()]
    }
    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }
    pub fn phi(&self, sigma: usize) -> &Mat {
        &self.phi[sigma % self.period()]
    }
    pub fn matrices(&self) -> &[Mat] {
        &self.phi
    }
    /// True when some entry carries a p-denominator.
    pub fn is_quasi(&self) -> bool {
        self.phi.iter().any(|a| !a.is_integral())
    }
}

impl Ring {
    fn check_period(&self, m: &SigmaModule) -> Result<()> {
        if m.period() != self.r() {
            return Err(input_err!("grading period {} differs from residue degree {}", m.period(), self.r()));
        }
        Ok(())
    }

    /// Matrix of φ^steps from M_from to M_{from+steps}:
    /// A_{from+steps-1} τ(A_{from+steps-2}) ... τ^{steps-1}(A_from).
    pub fn compose_from(&self, m: &SigmaModule, from: usize, steps: usize) -> Mat {
        let mut acc = self.m_identity(m.rank(from));
        for i in 0..steps {
            acc = self.m_mul(m.phi(from + i), &self.m_frob(&acc));
        }
        acc
    }

    /// φ^r on M_0, a linear matrix over the coefficients.
    pub fn compose_cycle(&self, m: &SigmaModule) -> Result<Mat> {
        self.check_period(m)?;
        Ok(self.compose_from(m, 0, m.period()))
    }

    /// The ungraded linearization: the block operator Φ on the direct sum of
    /// all degrees and its r-th power Φ τ(Φ) ... τ^{r-1}(Φ).
    pub fn total_cycle(&self, m: &SigmaModule) -> Result<Mat> {
        self.check_period(m)?;
        let r = m.period();
        let offsets: Vec<usize> = (0..r).scan(0, |acc, s| {
            let o = *acc;
            *acc += m.rank(s);
            Some(o)
        }).collect();
        let n = m.total_rank();
        let mut big = Mat::zeros(n, n);
        for s in 0..r {
            let a = m.phi(s);
            let (ro, co) = (offsets[(s + 1) % r], offsets[s]);
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    big.set(ro + i, co + j, a.get(i, j).clone());
                }
            }
        }
        let mut acc = big.clone();
        for k in 1..r {
            acc = self.m_mul(&acc, &self.m_frob_pow(&big, k));
        }
        Ok(acc)
    }

    /// Conjugates by a graded change of basis g_σ (columns: new basis in old
    /// coordinates): A'_σ = g_{σ+1}^{-1} A_σ τ(g_σ).
    pub fn change_basis(&self, m: &SigmaModule, g: &[Mat]) -> Result<SigmaModule> {
        let r = m.period();
        let inv: Vec<Mat> = g.iter().map(|x| self.m_inverse(x)).collect::<Result<_>>()?;
        let phi = (0..r)
            .map(|s| self.m_product([&inv[(s + 1) % r], m.phi(s), &self.m_frob(&g[s])]))
            .collect();
        SigmaModule::new(m.ranks.clone(), phi)
    }

}

fn rank_cap(ranks: &[usize]) -> Result<()> {
    match ranks.iter().find(|&&n| n > DERIVED_RANK_CAP) {
        Some(big) => Err(input_err!("derived rank {big} exceeds cap {DERIVED_RANK_CAP}")),
        None => Ok(()),
    }
}

impl Ring {

    pub fn tensor(&self, a: &SigmaModule, b: &SigmaModule) -> Result<SigmaModule> {
        if a.period() != b.period() {
            return Err(input_err!("tensor of modules with different periods"));
        }
        let ranks: Vec<usize> = a.ranks.iter().zip(&b.ranks).map(|(x, y)| x * y).collect();
        rank_cap(&ranks)?;
        let phi = a.phi.iter().zip(&b.phi).map(|(x, y)| self.m_kron(x, y)).collect();
        SigmaModule::new(ranks, phi)
    }

    pub fn wedge_power(&self, m: &SigmaModule, k: usize) -> Result<SigmaModule> {
        let ranks: Vec<usize> = m.ranks.iter().map(|&n| binomial(n, k)).collect();
        rank_cap(&ranks)?;
        let phi = m.phi.iter().map(|a| self.m_wedge(a, k)).collect();
        SigmaModule::new(ranks, phi)
    }

    pub fn sym_power(&self, m: &SigmaModule, k: usize) -> Result<SigmaModule> {
        let ranks: Vec<usize> = m.ranks.iter().map(|&n| if n == 0 { usize::from(k == 0) } else { binomial(n + k - 1, k) }).collect();
        rank_cap(&ranks)?;
        let phi = m.phi.iter().map(|a| self.m_sym(a, k)).collect();
        SigmaModule::new(ranks, phi)
    }

    /// Contragredient: (A_σ^{-1})^T on the dual bases. Usually quasi.
    pub fn dual(&self, m: &SigmaModule) -> Result<SigmaModule> {
        let phi = m.phi.iter().map(|a| Ok(self.m_inverse(a)?.transpose())).collect::<Result<Vec<_>>>()?;
        SigmaModule::new(m.ranks.clone(), phi)
    }

    /// Direct sum, degree by degree.
    pub fn direct_sum(&self, parts: &[SigmaModule]) -> Result<SigmaModule> {
        let r = parts.first().map_or(0, |m| m.period());
        if parts.iter().any(|m| m.period() != r) {
            return Err(input_err!("direct sum of modules with different periods"));
        }
        let ranks = (0..r).map(|s| parts.iter().map(|m| m.rank(s)).sum()).collect();
        let phi = (0..r)
            .map(|s| Mat::block_diag(&parts.iter().map(|m| m.phi(s).clone()).collect::<Vec<_>>()))
            .collect();
        SigmaModule::new(ranks, phi)
    }

    pub fn module_to_json(&self, m: &SigmaModule) -> SigmaModuleJson {
        SigmaModuleJson {
            ranks: m.ranks.clone(),
            matrices: m.phi.iter().map(|a| self.m_to_json(a)).collect(),
            quasi: m.is_quasi(),
        }
    }

    pub fn module_from_json(&self, j: &SigmaModuleJson) -> Result<SigmaModule> {
        let phi = j.matrices.iter().map(|a| self.m_from_json(a)).collect::<Result<Vec<_>>>()?;
        let m = SigmaModule::new(j.ranks.clone(), phi)?;
        self.check_period(&m)?;
        if m.is_quasi() && !j.quasi {
            return Err(input_err!("matrices carry denominators but the quasi flag is unset"));
        }
        Ok(m)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::RingParams;

    #[test]
    fn two_step_composition() {
        let k = Ring::new(RingParams::new(3, 2, 5, 1)).unwrap();
        let m = SigmaModule::uniform(vec![k.m_from_ints(&[vec![3]]), k.m_from_ints(&[vec![1]])]).unwrap();
        assert_eq!(k.compose_cycle(&m).unwrap(), k.m_from_ints(&[vec![3]]));
    }

    #[test]
    fn swap_composite_in_period_three() {
        let k = Ring::new(RingParams::new(3, 3, 5, 1)).unwrap();
        let swap = k.m_from_ints(&[vec![0, 1], vec![3, 0]]);
        let m = SigmaModule::uniform(vec![swap.clone(), k.m_identity(2), k.m_identity(2)]).unwrap();
        assert_eq!(k.compose_cycle(&m).unwrap(), swap);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let k = Ring::new(RingParams::new(3, 2, 5, 1)).unwrap();
        assert!(SigmaModule::new(vec![2, 1], vec![k.m_identity(2), k.m_identity(2)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let k = Ring::new(RingParams::new(3, 2, 5, 3).with_denom_budget(1)).unwrap();
        let m = SigmaModule::uniform(vec![k.m_from_ints(&[vec![0, 1], vec![3, 0]]), k.m_identity(2)]).unwrap();
        let d = k.dual(&m).unwrap();
        assert!(d.is_quasi());
        let text = serde_json::to_string(&k.module_to_json(&d)).unwrap();
        let back: SigmaModuleJson = serde_json::from_str(&text).unwrap();
        let back = k.module_from_json(&back).unwrap();
        assert_eq!(back.ranks(), d.ranks());
        for (x, y) in back.matrices().iter().zip(d.matrices()) {
            assert!(k.m_congruent(x, y, k.precision() as i64 - 1));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 3), 0);
    }
}

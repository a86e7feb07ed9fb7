use super::Mat;
use crate::coeff_ring::{Ring, Series, Valuation, Zq};
use crate::error::{construction_err, precision_err, Result};

/// Kernel of a constant matrix over the residue field F_q, with plain lifts.
///
/// `basis[f]` is e_f - sum over pivots of the reduced-row-echelon entries,
/// one vector per free column; `pivots` are the pivot columns in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPKernel {
    pub basis: Vec<Vec<Zq>>,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
}

impl Ring {
    /// Reduction mod p, returned as the plain lift with digits in [0, p).
    pub fn reduce_mod_p(&self, a: &Zq) -> Zq {
        let mut z = Zq::default();
        for i in 0..self.r() {
            z.0[i] = a.0[i] % self.p();
        }
        z
    }

    /// Inverse of a nonzero constant (possibly fractional) series.
    pub fn s_const_inv(&self, x: &Series) -> Result<Series> {
        let c = x.coeff(0);
        let v = match self.valuation(&c) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => return Err(construction_err!("inverting zero")),
        };
        let u = self.div_p_pow(&c, v as u32)?;
        let inv = self.inv(&u)?;
        Ok(self.s_mul_p_pow(&self.s_const(inv), x.denom_exp() as i64 - v))
    }

    /// Inverse over the series ring with p inverted. The determinant must be
    /// p^k times a unit of Z_q[[t]] (true for every Frobenius matrix here).
    pub fn m_inverse(&self, a: &Mat) -> Result<Mat> {
        assert!(a.is_square(), "inverse of a non-square matrix");
        let n = a.rows();
        if n == 0 {
            return Ok(a.clone());
        }
        let d = a.denom_exp() as i64;
        let ai = self.m_mul_p_pow(a, d);
        let cp = self.m_charpoly(&ai);
        let det = if n.is_multiple_of(2) { cp[n].clone() } else { self.s_neg(&cp[n]) };
        let k = match self.valuation(&det.coeff(0)) {
            Valuation::Finite(k) => k,
            Valuation::Infinite => return Err(precision_err!("determinant vanishes at t = 0 to working precision")),
        };
        let unit = self
            .s_div_p_pow(&det, k as u32)
            .map_err(|_| construction_err!("determinant is not p^{k} times a unit series"))?;
        let unit_inv = self.s_inv(&unit)?;
        // Cayley-Hamilton: adj = (-1)^{n-1} (A^{n-1} + c_1 A^{n-2} + ... + c_{n-1}).
        let mut acc = Mat::zeros(n, n);
        for c in cp.iter().take(n) {
            acc = self.m_mul(&acc, &ai);
            acc = self.m_add(&acc, &self.m_scale(c, &self.m_identity(n)));
        }
        if n.is_multiple_of(2) {
            acc = self.m_map(&acc, |x| self.s_neg(x));
        }
        let inv = self.m_scale(&unit_inv, &acc);
        Ok(self.m_mul_p_pow(&inv, d - k))
    }

    /// Right kernel of a constant matrix over the fraction field, computed by
    /// elimination with minimal-valuation pivots; entries of valuation at
    /// least `prec` count as zero. Vectors are scaled to be integral and
    /// primitive.
    pub fn m_kernel_padic(&self, a: &Mat, prec: i64) -> Vec<Mat> {
        let (rows, cols) = (a.rows(), a.cols());
        let mut m: Vec<Vec<Series>> = (0..rows).map(|i| (0..cols).map(|j| self.s_at_zero(a.get(i, j))).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let best = (r..rows)
                .map(|i| (self.gauss_valuation(&m[i][c]), i))
                .filter(|(v, _)| !v.at_least(prec))
                .min();
            let Some((_, i)) = best else { continue };
            m.swap(r, i);
            let inv = self.s_const_inv(&m[r][c]).expect("pivot is nonzero");
            m[r] = m[r].iter().map(|x| self.s_mul(&inv, x)).collect();
            for i in 0..rows {
                if i != r && !m[i][c].is_empty() {
                    let f = m[i][c].clone();
                    let pivot_row = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x = self.s_sub(x, &self.s_mul(&f, y));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut out = Vec::new();
        for f in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut v = Mat::zeros(cols, 1);
            v.set(f, 0, self.s_one());
            for (row, &pc) in pivots.iter().enumerate() {
                v.set(pc, 0, self.s_neg(&m[row][f]));
            }
            out.push(self.m_primitive(&v));
        }
        out
    }

    /// Scales a nonzero matrix by a power of p so its Gauss valuation is 0.
    pub fn m_primitive(&self, v: &Mat) -> Mat {
        match self.m_valuation(v) {
            Valuation::Finite(k) => self.m_mul_p_pow(v, -k),
            Valuation::Infinite => v.clone(),
        }
    }

    /// Kernel mod p of a constant integral matrix, by column-pivoted
    /// elimination with lowest-index pivots.
    pub fn m_kernel_mod_p(&self, a: &Mat) -> ModPKernel {
        let (rows, cols) = (a.rows(), a.cols());
        let red = |x: &Zq| self.reduce_mod_p(x);
        let mut m: Vec<Vec<Zq>> = (0..rows).map(|i| (0..cols).map(|j| red(&a.get(i, j).coeff(0))).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(i) = (r..rows).find(|&i| !self.is_zero(&m[i][c])) else { continue };
            m.swap(r, i);
            let inv = red(&self.inv(&m[r][c]).expect("nonzero mod p is a unit"));
            m[r] = m[r].iter().map(|x| red(&self.mul(&inv, x))).collect();
            for i in 0..rows {
                if i != r && !self.is_zero(&m[i][c]) {
                    let f = m[i][c];
                    let pivot_row = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x = red(&self.sub(x, &self.mul(&f, y)));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![Zq::default(); cols];
                v[f] = self.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = red(&self.neg(&m[row][f]));
                }
                v
            })
            .collect();
        ModPKernel { basis, pivots, free }
    }

    /// Rank of a constant integral matrix mod p.
    pub fn m_rank_mod_p(&self, a: &Mat) -> usize {
        self.m_kernel_mod_p(a).pivots.len()
    }
}

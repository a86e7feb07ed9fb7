//! Wedge, symmetric and tensor powers on frozen lexicographic bases.
//!
//! * wedge basis of degree k: increasing k-subsets in lexicographic order;
//! * Sym basis of degree k in n variables: exponent vectors of total degree
//!   k in ascending lexicographic order, so for n = 2 the index b stands for
//!   x_0^b x_1^(k-b);
//! * tensor basis: pairs (i, j) with i major.

use std::collections::BTreeMap;

use super::Mat;
use crate::coeff_ring::{Ring, Series};

/// Increasing k-subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Exponent vectors of length n and total degree k, ascending lexicographic.
pub fn sym_monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, k, &mut Vec::new(), &mut out);
    out
}

impl Ring {
    /// k-th exterior power: entry (I, J) is the minor on rows I, columns J.
    pub fn m_wedge(&self, a: &Mat, k: usize) -> Mat {
        let rs = subsets(a.rows(), k);
        let cs = subsets(a.cols(), k);
        let mut out = Mat::zeros(rs.len(), cs.len());
        for (i, ri) in rs.iter().enumerate() {
            for (j, cj) in cs.iter().enumerate() {
                out.set(i, j, self.m_det(&a.submatrix(ri, cj)));
            }
        }
        out
    }

    /// k-th symmetric power, acting on polynomials of degree k in the
    /// coordinates: the basis monomial x^alpha goes to prod_j (A x_j)^alpha_j.
    pub fn m_sym(&self, a: &Mat, k: usize) -> Mat {
        let (m, n) = (a.rows(), a.cols());
        let rows = sym_monomials(m, k);
        let cols = sym_monomials(n, k);
        let index: BTreeMap<&Vec<usize>, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut out = Mat::zeros(rows.len(), cols.len());
        for (c, alpha) in cols.iter().enumerate() {
            let mut poly: BTreeMap<Vec<usize>, Series> = BTreeMap::new();
            poly.insert(vec![0; m], self.s_one());
            for (j, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    let mut next: BTreeMap<Vec<usize>, Series> = BTreeMap::new();
                    for (mono, coef) in &poly {
                        for i in 0..m {
                            let aij = a.get(i, j);
                            if aij.is_empty() {
                                continue;
                            }
                            let mut mm = mono.clone();
                            mm[i] += 1;
                            let term = self.s_mul(coef, aij);
                            let slot = next.entry(mm).or_default();
                            *slot = self.s_add(slot, &term);
                        }
                    }
                    poly = next;
                }
            }
            for (mono, coef) in poly {
                out.set(index[&mono], c, coef);
            }
        }
        out
    }

    /// Kronecker product.
    pub fn m_kron(&self, a: &Mat, b: &Mat) -> Mat {
        let mut out = Mat::zeros(a.rows() * b.rows(), a.cols() * b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let x = a.get(i, j);
                if x.is_empty() {
                    continue;
                }
                for k in 0..b.rows() {
                    for l in 0..b.cols() {
                        out.set(i * b.rows() + k, j * b.cols() + l, self.s_mul(x, b.get(k, l)));
                    }
                }
            }
        }
        out
    }
}

//! Dense matrices over the truncated series ring (constants are the point
//! frame). Entries may carry denominators, which is how quasi-isogenies and
//! inverses of non-unimodular matrices are represented.

mod elimination;
mod multilinear;

pub use elimination::ModPKernel;
pub use multilinear::{subsets, sym_monomials};

use serde::{Deserialize, Serialize};

use crate::coeff_ring::{Ring, Series, SeriesJson, Valuation, Zq};
use crate::error::{input_err, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Series>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Series::default(); rows * cols] }
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Series) {
        self.data[i * self.cols + j] = v;
    }
    pub fn entries(&self) -> &[Series] {
        &self.data
    }
    pub fn column(&self, j: usize) -> Mat {
        let mut out = Mat::zeros(self.rows, 1);
        for i in 0..self.rows {
            out.set(i, 0, self.get(i, j).clone());
        }
        out
    }
    /// Largest denominator exponent among the entries.
    pub fn denom_exp(&self) -> u32 {
        self.data.iter().map(|s| s.denom_exp()).max().unwrap_or(0)
    }
    pub fn is_integral(&self) -> bool {
        self.denom_exp() == 0
    }
    /// True when no entry depends on t.
    pub fn is_constant(&self) -> bool {
        self.data.iter().all(|s| s.len() <= 1)
    }
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }
    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }
    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

/// Wire form: rows of series elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatJson(pub Vec<Vec<EntryJson>>);

/// A matrix entry on the wire: a plain integer constant or a full series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(i64),
    Series(SeriesJson),
}

impl Ring {
    pub fn m_identity(&self, n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, self.s_one());
        }
        m
    }

    pub fn m_from_ints(&self, rows: &[Vec<i64>]) -> Mat {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Mat::zeros(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged integer matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, self.s_int(v));
            }
        }
        m
    }

    pub fn m_diag(&self, entries: &[Series]) -> Mat {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn m_map(&self, a: &Mat, f: impl Fn(&Series) -> Series) -> Mat {
        Mat { rows: a.rows, cols: a.cols, data: a.data.iter().map(f).collect() }
    }

    /// Re-truncates every entry at this ring's T.
    pub fn m_truncate(&self, a: &Mat) -> Mat {
        self.m_map(a, |x| self.s_truncate(x))
    }

    pub fn m_add(&self, a: &Mat, b: &Mat) -> Mat {
        assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch in m_add");
        Mat { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| self.s_add(x, y)).collect() }
    }

    pub fn m_sub(&self, a: &Mat, b: &Mat) -> Mat {
        assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch in m_sub");
        Mat { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| self.s_sub(x, y)).collect() }
    }

    pub fn m_mul(&self, a: &Mat, b: &Mat) -> Mat {
        assert_eq!(a.cols, b.rows, "shape mismatch in m_mul");
        let mut out = Mat::zeros(a.rows, b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = self.s_zero();
                for k in 0..a.cols {
                    let x = a.get(i, k);
                    let y = b.get(k, j);
                    if x.is_empty() || y.is_empty() {
                        continue;
                    }
                    acc = self.s_add(&acc, &self.s_mul(x, y));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Product of a list of matrices, left to right.
    pub fn m_product<'a>(&self, mats: impl IntoIterator<Item = &'a Mat>) -> Mat {
        let mut it = mats.into_iter();
        let first = it.next().expect("empty product").clone();
        it.fold(first, |acc, m| self.m_mul(&acc, m))
    }

    pub fn m_scale(&self, s: &Series, a: &Mat) -> Mat {
        self.m_map(a, |x| self.s_mul(s, x))
    }

    pub fn m_mul_p_pow(&self, a: &Mat, k: i64) -> Mat {
        self.m_map(a, |x| self.s_mul_p_pow(x, k))
    }

    pub fn m_frob_pow(&self, a: &Mat, k: usize) -> Mat {
        self.m_map(a, |x| self.s_frob_pow(x, k))
    }

    pub fn m_frob(&self, a: &Mat) -> Mat {
        self.m_frob_pow(a, 1)
    }

    pub fn m_deriv(&self, a: &Mat) -> Mat {
        self.m_map(a, |x| self.s_deriv(x))
    }

    /// Specialization t = 0.
    pub fn m_at_zero(&self, a: &Mat) -> Mat {
        self.m_map(a, |x| self.s_at_zero(x))
    }

    /// Minimum Gauss valuation over the entries.
    pub fn m_valuation(&self, a: &Mat) -> Valuation {
        a.data.iter().map(|x| self.gauss_valuation(x)).min().unwrap_or(Valuation::Infinite)
    }

    /// Entrywise congruence modulo (p^prec, t^T).
    pub fn m_congruent(&self, a: &Mat, b: &Mat, prec: i64) -> bool {
        (a.rows, a.cols) == (b.rows, b.cols) && self.m_valuation(&self.m_sub(a, b)).at_least(prec)
    }

    /// First entry (row-major) where `a` and `b` differ mod p^prec.
    pub fn m_first_difference(&self, a: &Mat, b: &Mat, prec: i64) -> Option<(usize, usize)> {
        (0..a.rows)
            .flat_map(|i| (0..a.cols).map(move |j| (i, j)))
            .find(|&(i, j)| !self.s_congruent(a.get(i, j), b.get(i, j), prec))
    }

    /// Characteristic polynomial det(X - A) by Berkowitz's division-free
    /// recursion. Returns [1, c_1, ..., c_n] (descending powers of X).
    pub fn m_charpoly(&self, a: &Mat) -> Vec<Series> {
        assert!(a.is_square(), "charpoly of a non-square matrix");
        let n = a.rows;
        if n == 0 {
            return vec![self.s_one()];
        }
        let mut poly = vec![self.s_one(), self.s_neg(a.get(0, 0))];
        for k in 1..n {
            let idx: Vec<usize> = (0..k).collect();
            let sub = a.submatrix(&idx, &idx);
            let row = a.submatrix(&[k], &idx);
            let col = a.submatrix(&idx, &[k]);
            let mut q = vec![self.s_one(), self.s_neg(a.get(k, k))];
            let mut v = col;
            for _ in 0..k {
                let rv = self.m_mul(&row, &v);
                q.push(self.s_neg(rv.get(0, 0)));
                v = self.m_mul(&sub, &v);
            }
            let mut next = vec![self.s_zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut acc = self.s_zero();
                for (j, pj) in poly.iter().enumerate() {
                    if i >= j {
                        acc = self.s_add(&acc, &self.s_mul(&q[i - j], pj));
                    }
                }
                *slot = acc;
            }
            poly = next;
        }
        poly
    }

    pub fn m_det(&self, a: &Mat) -> Series {
        let n = a.rows;
        let cp = self.m_charpoly(a);
        if n.is_multiple_of(2) {
            cp[n].clone()
        } else {
            self.s_neg(&cp[n])
        }
    }

    pub fn m_trace(&self, a: &Mat) -> Series {
        (0..a.rows).fold(self.s_zero(), |acc, i| self.s_add(&acc, a.get(i, i)))
    }

    pub fn m_to_json(&self, a: &Mat) -> MatJson {
        MatJson(
            (0..a.rows)
                .map(|i| (0..a.cols).map(|j| EntryJson::Series(self.s_to_json(a.get(i, j)))).collect())
                .collect(),
        )
    }

    pub fn m_from_json(&self, j: &MatJson) -> Result<Mat> {
        let rows = j.0.len();
        let cols = j.0.first().map_or(0, |r| r.len());
        let mut m = Mat::zeros(rows, cols);
        for (i, row) in j.0.iter().enumerate() {
            if row.len() != cols {
                return Err(input_err!("ragged matrix row {i}"));
            }
            for (k, e) in row.iter().enumerate() {
                let s = match e {
                    EntryJson::Int(v) => self.s_int(*v),
                    EntryJson::Series(s) => self.s_from_json(s)?,
                };
                m.set(i, k, s);
            }
        }
        Ok(m)
    }

    pub fn m_random<R: rand::Rng + ?Sized>(&self, rows: usize, cols: usize, rng: &mut R) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.s_const(self.random(rng)));
            }
        }
        m
    }

    /// Random constant matrix invertible over Z_q.
    pub fn m_random_unimodular<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Mat {
        loop {
            let m = self.m_random(n, n, rng);
            let det = self.m_det(&m);
            if self.gauss_valuation(&det) == Valuation::Finite(0) {
                return m;
            }
        }
    }

    /// Column vector from constants.
    pub fn m_column(&self, entries: &[Zq]) -> Mat {
        let mut m = Mat::zeros(entries.len(), 1);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, 0, self.s_const(*e));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::RingParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring() -> Ring {
        Ring::new(RingParams::new(3, 2, 5, 6)).unwrap()
    }

    /// Leibniz expansion, independent of Berkowitz.
    fn det_leibniz(k: &Ring, a: &Mat) -> Series {
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = k.s_zero();
        fn heap(k: &Ring, a: &Mat, perm: &mut Vec<usize>, m: usize, total: &mut Series) {
            if m == 1 {
                let n = perm.len();
                let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
                let mut term = k.s_one();
                for (i, &pi) in perm.iter().enumerate() {
                    term = k.s_mul(&term, a.get(i, pi));
                }
                if inversions % 2 == 1 {
                    term = k.s_neg(&term);
                }
                *total = k.s_add(total, &term);
                return;
            }
            for i in 0..m {
                heap(k, a, perm, m - 1, total);
                if m.is_multiple_of(2) {
                    perm.swap(i, m - 1);
                } else {
                    perm.swap(0, m - 1);
                }
            }
        }
        heap(k, a, &mut perm, n, &mut total);
        total
    }

    #[test]
    fn berkowitz_determinant_matches_leibniz() {
        let k = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, k.s_random(&mut rng));
                }
            }
            assert_eq!(k.m_det(&a), det_leibniz(&k, &a));
        }
    }

    #[test]
    fn charpoly_of_swap_matrix() {
        let k = ring();
        let a = k.m_from_ints(&[vec![0, 1], vec![3, 0]]);
        let cp = k.m_charpoly(&a);
        assert_eq!(cp, vec![k.s_one(), k.s_zero(), k.s_int(-3)]);
    }

    #[test]
    fn cayley_hamilton() {
        let k = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = k.m_random(3, 3, &mut rng);
        let cp = k.m_charpoly(&a);
        let mut acc = Mat::zeros(3, 3);
        for c in cp.iter() {
            acc = k.m_mul(&acc, &a);
            acc = k.m_add(&acc, &k.m_scale(c, &k.m_identity(3)));
        }
        assert!(k.m_congruent(&acc, &Mat::zeros(3, 3), k.work_prec() as i64));
    }
}

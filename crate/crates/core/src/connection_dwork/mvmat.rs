use crate::coeff_ring::{MvSeries, MvSeriesJson, Ring, Valuation};
use crate::linalg::Mat;

/// Matrix over the multivariate truncated ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<MvSeries>,
}

impl MvMat {
    pub fn get(&self, i: usize, j: usize) -> &MvSeries {
        &self.data[i * self.cols + j]
    }
}

impl Ring {
    /// Embeds a univariate matrix in variable `var`.
    pub fn mvm_from_mat(&self, a: &Mat, var: usize, nvars: usize) -> MvMat {
        MvMat { rows: a.rows(), cols: a.cols(), data: a.entries().iter().map(|x| self.mv_from_series(x, var, nvars)).collect() }
    }

    pub fn mvm_identity(&self, n: usize, nvars: usize) -> MvMat {
        let mut data = vec![MvSeries::zero(nvars, self.truncation()); n * n];
        for i in 0..n {
            data[i * n + i] = self.mv_const(self.one(), nvars);
        }
        MvMat { rows: n, cols: n, data }
    }

    pub fn mvm_mul(&self, a: &MvMat, b: &MvMat) -> MvMat {
        assert_eq!(a.cols, b.rows, "shape mismatch");
        let nvars = a.data.first().map_or(1, |x| x.nvars());
        let mut data = Vec::with_capacity(a.rows * b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = MvSeries::zero(nvars, self.truncation());
                for k in 0..a.cols {
                    acc = self.mv_add(&acc, &self.mv_mul(a.get(i, k), b.get(k, j)));
                }
                data.push(acc);
            }
        }
        MvMat { rows: a.rows, cols: b.cols, data }
    }

    pub fn mvm_valuation_of_difference(&self, a: &MvMat, b: &MvMat) -> Valuation {
        a.data.iter().zip(&b.data).map(|(x, y)| self.mv_valuation(&self.mv_sub(x, y))).min().unwrap_or(Valuation::Infinite)
    }

    /// Laplace expansion along the first row (small ranks only).
    pub fn mvm_det(&self, a: &MvMat) -> MvSeries {
        let nvars = a.data.first().map_or(1, |x| x.nvars());
        let n = a.rows;
        if n == 0 {
            return self.mv_const(self.one(), nvars);
        }
        if n == 1 {
            return a.data[0].clone();
        }
        let mut acc = MvSeries::zero(nvars, self.truncation());
        for j in 0..n {
            let minor = MvMat {
                rows: n - 1,
                cols: n - 1,
                data: (1..n).flat_map(|i| (0..n).filter(move |&c| c != j).map(move |c| (i, c))).map(|(i, c)| a.get(i, c).clone()).collect(),
            };
            let term = self.mv_mul(a.get(0, j), &self.mvm_det(&minor));
            acc = if j % 2 == 0 { self.mv_add(&acc, &term) } else { self.mv_sub(&acc, &term) };
        }
        acc
    }

    /// Every variable set to t.
    pub fn mvm_diagonal(&self, a: &MvMat) -> Mat {
        let mut out = Mat::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, self.mv_diagonal(a.get(i, j)));
            }
        }
        out
    }

    /// Coefficient matrix of one monomial.
    pub fn mvm_coeff(&self, a: &MvMat, exps: &[usize]) -> Mat {
        let mut out = Mat::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, self.mv_coeff(a.get(i, j), exps));
            }
        }
        out
    }

    pub fn mvm_to_kronecker(&self, a: &MvMat, stride: usize) -> Mat {
        let mut out = Mat::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, self.mv_to_kronecker(a.get(i, j), stride));
            }
        }
        out
    }

    pub fn mvm_from_kronecker(&self, a: &Mat, stride: usize, nvars: usize, trunc: usize) -> MvMat {
        MvMat { rows: a.rows(), cols: a.cols(), data: a.entries().iter().map(|x| self.mv_from_kronecker(x, stride, nvars, trunc)).collect() }
    }

    pub fn mvm_to_json(&self, a: &MvMat) -> Vec<Vec<MvSeriesJson>> {
        (0..a.rows).map(|i| (0..a.cols).map(|j| self.mv_to_json(a.get(i, j))).collect()).collect()
    }
}

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use super::SigmaModule;
use crate::coeff_ring::{Ring, Series, Valuation};
use crate::error::{construction_err, input_err, precision_err, Result};
use crate::linalg::Mat;

/// Lower convex hull of the points (i, v(c_i)) of a characteristic
/// polynomial X^n + c_1 X^{n-1} + ... + c_n. Edge slopes are the
/// valuations of the eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    pub slopes: SlopeMultiset,
}

/// Sorted slopes with repetition.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlopeMultiset(pub Vec<Rational64>);

impl Serialize for SlopeMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|q| q.to_string()))
    }
}

impl SlopeMultiset {
    pub fn new(mut v: Vec<Rational64>) -> Self {
        v.sort();
        SlopeMultiset(v)
    }
    pub fn from_ints(v: &[i64]) -> Self {
        SlopeMultiset::new(v.iter().map(|&x| Rational64::from_integer(x)).collect())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn sum(&self) -> Rational64 {
        self.0.iter().copied().sum()
    }
    /// The common value when all slopes agree.
    pub fn isoclinal(&self) -> Option<Rational64> {
        let first = *self.0.first()?;
        self.0.iter().all(|&q| q == first).then_some(first)
    }
    /// (value, multiplicity) pairs in increasing order.
    pub fn multiplicities(&self) -> Vec<(Rational64, usize)> {
        let mut out: Vec<(Rational64, usize)> = Vec::new();
        for &q in &self.0 {
            match out.last_mut() {
                Some((v, m)) if *v == q => *m += 1,
                _ => out.push((q, 1)),
            }
        }
        out
    }
    pub fn scaled(&self, by: Rational64) -> Self {
        SlopeMultiset::new(self.0.iter().map(|&q| q * by).collect())
    }
}

impl std::fmt::Display for SlopeMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Solutions of φ^r x = p^z x in degree 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub z: i64,
    /// Integral primitive column vectors.
    pub basis: Vec<Mat>,
    /// Set when the solution rank is below the rank of M_0.
    pub partial: bool,
    /// p-adic precision at which φ^r v = p^z v was confirmed.
    pub checked_at: i64,
}

impl Skeleton {
    /// Basis vectors as the columns of one matrix.
    pub fn matrix(&self) -> Mat {
        let n = self.basis.first().map_or(0, |v| v.rows());
        self.basis.iter().fold(Mat::zeros(n, 0), |acc, v| acc.hstack(v))
    }
}

impl Ring {
    /// Valuation level below which polygon vertices are certified. The
    /// characteristic polynomial is computed exactly modulo p^W, so anything
    /// that reads as valuation W - 2 or more is treated as unknown.
    pub fn slope_cert(&self) -> i64 {
        self.work_prec() as i64 - 2
    }

    /// Newton polygon of [1, c_1, ..., c_n] under the Gauss valuation.
    pub fn newton_polygon(&self, coeffs: &[Series], cert: i64) -> Result<NewtonPolygon> {
        let n = coeffs.len().saturating_sub(1);
        let vals: Vec<Option<i64>> = coeffs
            .iter()
            .map(|c| match self.gauss_valuation(c) {
                Valuation::Finite(v) if v < cert => Some(v),
                _ => None,
            })
            .collect();
        if vals.first().copied().flatten().is_none() {
            return Err(input_err!("leading coefficient is not certified"));
        }
        if vals[n].is_none() {
            return Err(precision_err!(
                "constant coefficient c_{n} has valuation >= {cert}; the polygon is not certified at this precision"
            ));
        }
        let pts: Vec<(usize, i64)> = vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        let mut hull: Vec<(usize, i64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b when it lies on or above the segment a-p
                let cross = (b.0 as i64 - a.0 as i64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as i64 - a.0 as i64);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut slopes = Vec::new();
        for w in hull.windows(2) {
            let (len, rise) = ((w[1].0 - w[0].0) as i64, w[1].1 - w[0].1);
            for _ in 0..len {
                slopes.push(Rational64::new(rise, len));
            }
        }
        for (i, v) in vals.iter().enumerate() {
            if v.is_none() {
                let seg = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0).expect("hull spans 0..n");
                let at = Rational64::from_integer(seg[0].1)
                    + Rational64::new(seg[1].1 - seg[0].1, (seg[1].0 - seg[0].0) as i64) * (i - seg[0].0) as i64;
                if at > Rational64::from_integer(cert) {
                    return Err(precision_err!(
                        "coefficient c_{i} reads as valuation >= {cert} but the polygon passes at {at}; not certified"
                    ));
                }
            }
        }
        Ok(NewtonPolygon { vertices: hull, slopes: SlopeMultiset::new(slopes) })
    }

    pub fn graded_polygon(&self, m: &SigmaModule) -> Result<NewtonPolygon> {
        let phi_r = self.compose_cycle(m)?;
        self.newton_polygon(&self.m_charpoly(&phi_r), self.slope_cert())
    }

    /// Valuations of the eigenvalues of φ^r on M_0.
    pub fn graded_slopes(&self, m: &SigmaModule) -> Result<SlopeMultiset> {
        Ok(self.graded_polygon(m)?.slopes)
    }

    /// Slopes of the full module as an ungraded isocrystal, i.e. those of the
    /// block operator's r-th power divided by r.
    pub fn ungraded_slopes(&self, m: &SigmaModule) -> Result<SlopeMultiset> {
        let big = self.total_cycle(m)?;
        let poly = self.newton_polygon(&self.m_charpoly(&big), self.slope_cert())?;
        Ok(poly.slopes.scaled(Rational64::new(1, m.period() as i64)))
    }

    /// Solutions of (φ^r - p^z) x = 0 on M_0 for an isoclinal point-frame
    /// module of integral slope z.
    pub fn skeleton(&self, m: &SigmaModule, z: i64) -> Result<Skeleton> {
        if !m.matrices().iter().all(|a| a.is_constant()) {
            return Err(input_err!("skeleton needs constant (point-frame) matrices"));
        }
        let slopes = self.graded_slopes(m)?;
        if slopes.isoclinal() != Some(Rational64::from_integer(z)) {
            return Err(construction_err!("not isoclinal at z = {z}: slopes are {slopes}"));
        }
        let n = m.rank(0);
        let phi_r = self.compose_cycle(m)?;
        let eq = self.m_sub(&phi_r, &self.m_mul_p_pow(&self.m_identity(n), z));
        let prec = self.work_prec() as i64 - z - 2;
        let basis = self.m_kernel_padic(&eq, prec);
        let checked_at = self.precision() as i64;
        for v in &basis {
            if !self.m_valuation(&self.m_mul(&eq, v)).at_least(checked_at) {
                return Err(precision_err!("skeleton vector fails φ^r v = p^z v at precision {checked_at}"));
            }
        }
        Ok(Skeleton { z, partial: basis.len() < n, basis, checked_at })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::RingParams;

    fn q(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn swap_slopes_period_three() {
        let k = Ring::new(RingParams::new(3, 3, 5, 1)).unwrap();
        let swap = k.m_from_ints(&[vec![0, 1], vec![3, 0]]);
        let m = SigmaModule::uniform(vec![swap, k.m_identity(2), k.m_identity(2)]).unwrap();
        assert_eq!(k.graded_slopes(&m).unwrap().0, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn double_swap_is_p_identity() {
        let k = Ring::new(RingParams::new(3, 2, 5, 1)).unwrap();
        let swap = k.m_from_ints(&[vec![0, 1], vec![3, 0]]);
        let m = SigmaModule::uniform(vec![swap.clone(), swap]).unwrap();
        assert_eq!(k.compose_cycle(&m).unwrap(), k.m_from_ints(&[vec![3, 0], vec![0, 3]]));
        assert_eq!(k.graded_slopes(&m).unwrap(), SlopeMultiset::from_ints(&[1, 1]));
        let etale = SigmaModule::uniform(vec![k.m_identity(3), k.m_identity(3)]).unwrap();
        assert_eq!(k.graded_slopes(&etale).unwrap(), SlopeMultiset::from_ints(&[0, 0, 0]));
    }

    #[test]
    fn skeleton_cases() {
        let k = Ring::new(RingParams::new(3, 1, 5, 1)).unwrap();
        let scalar = SigmaModule::uniform(vec![k.m_from_ints(&[vec![3, 0], vec![0, 3]])]).unwrap();
        let s = k.skeleton(&scalar, 1).unwrap();
        assert!(!s.partial);
        assert_eq!(s.matrix(), k.m_identity(2));

        let jordan = SigmaModule::uniform(vec![k.m_from_ints(&[vec![3, 1], vec![0, 3]])]).unwrap();
        let s = k.skeleton(&jordan, 1).unwrap();
        assert!(s.partial);
        assert_eq!(s.basis, vec![k.m_from_ints(&[vec![1], vec![0]])]);

        let err = k.skeleton(&scalar, 0).unwrap_err();
        assert!(err.to_string().contains("not isoclinal at z = 0"));
    }

    #[test]
    fn polygon_with_gap() {
        let k = Ring::new(RingParams::new(5, 1, 4, 1)).unwrap();
        // X^3 + 5 X^2 - 25 X + 5^4: points (0,0), (1,1), (2,2), (3,4)
        let cp = vec![k.s_one(), k.s_int(5), k.s_int(-25), k.s_int(625)];
        let poly = k.newton_polygon(&cp, k.slope_cert()).unwrap();
        assert_eq!(poly.vertices, vec![(0, 0), (2, 2), (3, 4)]);
        assert_eq!(poly.slopes.0, vec![q(1, 1), q(1, 1), q(2, 1)]);
        let zero_det = vec![k.s_one(), k.s_zero()];
        assert!(matches!(k.newton_polygon(&zero_det, k.slope_cert()), Err(crate::Error::Precision(_))));
    }

    #[test]
    fn slope_set_display() {
        assert_eq!(SlopeMultiset::new(vec![q(3, 2), q(1, 2)]).to_string(), "{1/2,3/2}");
        assert_eq!(serde_json::to_string(&SlopeMultiset::from_ints(&[2, 2])).unwrap(), "[\"2\",\"2\"]");
    }
}

//! Deformation sequences on the rank-2 module and the sufficient
//! deformation over the series frame, φ̃ = u_σ ∘ φ with u_σ = 1 + t v_σ.

mod suff;

pub use suff::{SuffReport, SuffCheck};

use serde::Serialize;

use crate::coeff_ring::Ring;
use crate::error::{construction_err, input_err, Result};
use crate::graded_semilinear::SigmaModule;
use crate::linalg::{Mat, MatJson};
use crate::sym_structure::SymStructure;
use crate::windows::{Frame, NormalDecomposition, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Alternative {
    /// φ(e_{σ-1}) ≡ e_σ mod p
    Congruent,
    /// φ(e_{σ-1}) ∈ N_{σ,1}
    DropsToM1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSequence {
    /// e_σ as 2x1 columns with digits in [0, p).
    pub e: Vec<Mat>,
    pub alt: Vec<Alternative>,
    /// (start degree, coordinate index) of the seed that succeeded.
    pub seed: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedWindow {
    pub window: Window,
    /// u_σ in the coordinates of the target degree σ (identity off Σ).
    pub u: Vec<Mat>,
    /// The point-frame source.
    pub source: Window,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceJson {
    pub e: Vec<MatJson>,
    pub alt: Vec<Alternative>,
    pub seed: (usize, usize),
}

impl Ring {
    /// True when x lies in M_{σ,1} = L ⊕ pT.
    pub fn in_m1(&self, w: &Window, sigma: usize, x: &Mat) -> Result<bool> {
        let d = &w.decomposition;
        let coords = self.m_mul(&self.m_inverse(&d.bases[sigma])?, x);
        let t_rows: Vec<usize> = d.t_cols(sigma);
        Ok(self.m_divisible_by_p(&coords.submatrix(&t_rows, &[0])))
    }

    /// φ(x) for x in degree σ.
    pub fn apply_phi(&self, m: &SigmaModule, sigma: usize, x: &Mat) -> Mat {
        self.m_mul(m.phi(sigma), &self.m_frob(x))
    }

    /// Propagation search over seeds (σ_0, k) in lexicographic order, at
    /// most rank·r of them.
    pub fn find_deformation_sequence(&self, n: &Window) -> Result<DeformationSequence> {
        self.find_deformation_sequences(n, 1)?.into_iter().next().ok_or_else(|| construction_err!("no deformation sequence"))
    }

    /// Up to `limit` sequences from distinct successful seeds.
    pub fn find_deformation_sequences(&self, n: &Window, limit: usize) -> Result<Vec<DeformationSequence>> {
        let r = n.module.period();
        if n.frame != Frame::Point {
            return Err(input_err!("deformation sequences live on point-frame windows"));
        }
        for s in 0..r {
            if n.decomposition.quotient_dim(s) == 0 {
                return Err(input_err!("dim N_{s}/N_{s},1 = 0"));
            }
        }
        let slopes = self.graded_slopes(&n.module)?;
        if slopes.0.iter().any(|q| *q.numer() == 0) {
            return Err(input_err!("a graded slope of N is zero: {slopes}"));
        }
        let rank = n.module.rank(0);
        let mut found = Vec::new();
        let mut last_failure = String::new();
        for s0 in 0..r {
            for k in 0..n.module.rank(s0) {
                let mut e0 = Mat::zeros(n.module.rank(s0), 1);
                e0.set(k, 0, self.s_one());
                if self.in_m1(n, s0, &e0)? {
                    continue;
                }
                match self.propagate(n, s0, e0)? {
                    Ok(seq) => {
                        found.push(DeformationSequence { seed: (s0, k), ..seq });
                        if found.len() >= limit {
                            return Ok(found);
                        }
                    }
                    Err(witness) => last_failure = witness,
                }
            }
        }
        if found.is_empty() {
            return Err(construction_err!("no deformation sequence among {} seeds; last closure failure: {last_failure}", rank * r));
        }
        Ok(found)
    }

    fn propagate(&self, n: &Window, s0: usize, e0: Mat) -> Result<std::result::Result<DeformationSequence, String>> {
        let r = n.module.period();
        let mut e: Vec<Option<Mat>> = vec![None; r];
        let mut alt: Vec<Option<Alternative>> = vec![None; r];
        e[s0] = Some(e0);
        let mut prev = s0;
        for step in 1..=r {
            let s = (s0 + step) % r;
            let image = self.apply_phi(&n.module, prev, e[prev].as_ref().expect("set"));
            let drops = self.in_m1(n, s, &image)?;
            if step == r {
                let e_s = e[s].as_ref().expect("seed");
                let ok = if drops {
                    true
                } else {
                    self.m_divisible_by_p(&self.m_sub(&image, e_s))
                };
                if !ok {
                    return Ok(Err(format!("closure at degree {s}: φ(e_{prev}) is not ≡ e_{s} mod p")));
                }
                alt[s] = Some(if drops { Alternative::DropsToM1 } else { Alternative::Congruent });
                break;
            }
            if drops {
                let rank = n.module.rank(s);
                let pick = (0..rank).find_map(|k| {
                    let mut v = Mat::zeros(rank, 1);
                    v.set(k, 0, self.s_one());
                    match self.in_m1(n, s, &v) {
                        Ok(false) => Some(Ok(v)),
                        Ok(true) => None,
                        Err(err) => Some(Err(err)),
                    }
                });
                e[s] = Some(pick.ok_or_else(|| construction_err!("N_{s} = N_{s},1"))??);
                alt[s] = Some(Alternative::DropsToM1);
            } else {
                e[s] = Some(self.m_reduce_mod_p(&image));
                alt[s] = Some(Alternative::Congruent);
            }
            prev = s;
        }
        let seq = DeformationSequence {
            e: e.into_iter().map(|x| x.expect("filled")).collect(),
            alt: alt.into_iter().map(|x| x.expect("filled")).collect(),
            seed: (s0, 0),
        };
        self.check_sequence(n, &seq)?;
        Ok(Ok(seq))
    }

    /// Both invariants: e_σ ∉ N_{σ,1}, exactly one alternative per degree,
    /// and drops only at degrees with one-dimensional N_σ/N_{σ,1}.
    pub fn check_sequence(&self, n: &Window, seq: &DeformationSequence) -> Result<()> {
        let r = n.module.period();
        for s in 0..r {
            if self.in_m1(n, s, &seq.e[s])? {
                return Err(construction_err!("e_{s} lies in N_{s},1"));
            }
            let prev = (s + r - 1) % r;
            let image = self.apply_phi(&n.module, prev, &seq.e[prev]);
            let congruent = self.m_divisible_by_p(&self.m_sub(&image, &seq.e[s]));
            let drops = self.in_m1(n, s, &image)?;
            if congruent == drops {
                return Err(construction_err!("degree {s}: not exactly one alternative holds"));
            }
            let flagged = seq.alt[s] == Alternative::DropsToM1;
            if flagged != drops {
                return Err(construction_err!("degree {s}: flag disagrees with the alternative"));
            }
            if drops && n.decomposition.quotient_dim(s) != 1 {
                return Err(construction_err!("degree {s}: drop outside Σ"));
            }
        }
        Ok(())
    }

    /// v_σ: zero at congruent degrees; at drops, φ(e_{σ-1}) ↦ e_σ ↦ 0.
    pub fn v_maps(&self, n: &Window, seq: &DeformationSequence) -> Result<Vec<Mat>> {
        let r = n.module.period();
        (0..r)
            .map(|s| {
                if seq.alt[s] == Alternative::Congruent {
                    return Ok(Mat::zeros(2, 2));
                }
                let prev = (s + r - 1) % r;
                let f = self.apply_phi(&n.module, prev, &seq.e[prev]);
                let q = seq.e[s].hstack(&f);
                let qinv = self
                    .m_inverse(&q)
                    .map_err(|_| construction_err!("degree {s}: {{e_σ, φ(e_σ-1)}} is not a basis"))?;
                if !qinv.is_integral() {
                    return Err(construction_err!("degree {s}: {{e_σ, φ(e_σ-1)}} is not a basis"));
                }
                let nil = self.m_from_ints(&[vec![0, 1], vec![0, 0]]);
                Ok(self.m_product([&q, &nil, &qinv]))
            })
            .collect()
    }

    /// Ñ with φ̃ = u_σ ∘ φ on the arrow into σ.
    pub fn deform_n(&self, n: &Window, seq: &DeformationSequence) -> Result<DeformedWindow> {
        self.check_sequence(n, seq)?;
        let t = self.s_monomial(self.one(), 1);
        let u: Vec<Mat> = self.v_maps(n, seq)?.iter().map(|v| self.m_add(&self.m_identity(2), &self.m_scale(&t, v))).collect();
        for (s, us) in u.iter().enumerate() {
            if !self.s_congruent(&self.m_det(us), &self.s_one(), self.work_prec() as i64) {
                return Err(construction_err!("det u_{s} ≠ 1"));
            }
        }
        self.apply_u(n, u)
    }

    /// M̃ through ζ: u^M_σ = ζ_σ^{-1} (⊕ Sym^{b_i} u_σ) ζ_σ at σ ∈ Σ.
    pub fn deform_m(&self, s: &SymStructure, n_tilde: &DeformedWindow) -> Result<DeformedWindow> {
        let r = s.params.r;
        let u = (0..r)
            .map(|x| {
                if !s.params.is_sigma(x) {
                    return Ok(self.m_identity(s.params.n));
                }
                let blocks: Vec<Mat> = s.params.b.iter().map(|&bi| self.m_sym(&n_tilde.u[x], bi)).collect();
                let z = &s.zeta[x];
                let um = self.m_product([&self.m_inverse(z)?, &Mat::block_diag(&blocks), z]);
                if !um.is_integral() || !self.m_inverse(&um)?.is_integral() {
                    return Err(construction_err!("u^M_{x} does not preserve the lattice (S.4 fails)"));
                }
                Ok(um)
            })
            .collect::<Result<Vec<_>>>()?;
        self.apply_u(&s.m, u)
    }

    /// φ̃_{σ-1} = u_σ φ_{σ-1}; decomposition extended by scalars.
    pub fn apply_u(&self, w: &Window, u: Vec<Mat>) -> Result<DeformedWindow> {
        let r = w.module.period();
        let phi = (0..r).map(|s| self.m_mul(&u[(s + 1) % r], w.module.phi(s))).collect();
        let module = SigmaModule::new(w.module.ranks().to_vec(), phi)?;
        let window = Window {
            frame: Frame::Series,
            module,
            decomposition: NormalDecomposition { bases: w.decomposition.bases.clone(), l_ranks: w.decomposition.l_ranks.clone() },
        };
        Ok(DeformedWindow { window, u, source: w.clone() })
    }

    /// u = 1 everywhere.
    pub fn trivial_deformation(&self, w: &Window) -> DeformedWindow {
        let u = (0..w.module.period()).map(|s| self.m_identity(w.module.rank(s))).collect();
        self.apply_u(w, u).expect("same shapes")
    }

    pub fn sequence_to_json(&self, seq: &DeformationSequence) -> SequenceJson {
        SequenceJson { e: seq.e.iter().map(|x| self.m_to_json(x)).collect(), alt: seq.alt.clone(), seed: seq.seed }
    }
}

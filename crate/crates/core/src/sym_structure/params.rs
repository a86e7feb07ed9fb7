use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input_err, Result};

/// A number in ½Z, stored as its double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }
    pub fn twice(self) -> i64 {
        self.0
    }
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_f64(self.0 as f64 / 2.0)
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let twice = v * 2.0;
        if twice.fract() != 0.0 || twice.abs() > 1e12 {
            return Err(serde::de::Error::custom(format!("{v} is not a half-integer")));
        }
        Ok(HalfInt(twice as i64))
    }
}

/// Input to the constructor. Optional fields override the default choices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymSpec {
    pub r: usize,
    pub b: Vec<usize>,
    pub z: usize,
    pub a: HalfInt,
    /// Number of blocks; must equal b.len() when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<usize>>,
    /// Integral slope pair (z', z'') for a split N; absent means the
    /// isoclinal pair z/2, z/2 realized by swap matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_pair: Option<[usize; 2]>,
}

impl SymSpec {
    pub fn new(r: usize, b: Vec<usize>, z: usize, a: HalfInt) -> Self {
        SymSpec { r, b, z, a, c: None, f: None, sigma: None, omega: None, slope_pair: None }
    }
    pub fn with_slope_pair(mut self, zp: usize, zpp: usize) -> Self {
        self.slope_pair = Some([zp, zpp]);
        self
    }
}

/// All constructor choices, completed and checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymParams {
    pub r: usize,
    pub b: Vec<usize>,
    pub z: usize,
    pub a: HalfInt,
    pub n: usize,
    /// f[i][j], with Σ_j f[i][j] = a - b_i z/2.
    pub f: Vec<Vec<usize>>,
    /// Slopes z_i of the rank-one twists.
    pub z_i: Vec<usize>,
    pub sigma: Vec<usize>,
    pub omega: Vec<usize>,
    pub w: Vec<usize>,
    pub slope_pair: Option<[usize; 2]>,
}

impl SymParams {
    /// A spec pinning every choice, so rebuilding reproduces these params.
    pub fn to_spec(&self) -> SymSpec {
        SymSpec {
            r: self.r,
            b: self.b.clone(),
            z: self.z,
            a: self.a,
            c: Some(self.c()),
            f: Some(self.f.clone()),
            sigma: Some(self.sigma.clone()),
            omega: Some(self.omega.clone()),
            slope_pair: self.slope_pair,
        }
    }

    pub fn c(&self) -> usize {
        self.b.len()
    }
    /// Degrees of the interval [σ_j, σ_{j+1}) in order, reduced mod r.
    pub fn interval(&self, j: usize) -> Vec<usize> {
        let start = self.sigma[j];
        let end = if j + 1 < self.z { self.sigma[j + 1] } else { self.sigma[0] + self.r };
        (start..end).map(|s| s % self.r).collect()
    }
    pub fn in_omega(&self, s: usize) -> bool {
        self.omega.contains(&(s % self.r))
    }
    pub fn is_sigma(&self, s: usize) -> bool {
        self.sigma.contains(&(s % self.r))
    }
    /// Interval index and offset of a degree.
    pub fn locate(&self, s: usize) -> (usize, usize) {
        for j in 0..self.z {
            if let Some(k) = self.interval(j).iter().position(|&x| x == s % self.r) {
                return (j, k);
            }
        }
        unreachable!("intervals cover Z/rZ")
    }
}

fn w_j(b: &[usize], f: &[Vec<usize>], j: usize) -> usize {
    b.iter().zip(f).map(|(&bi, fi)| (bi + 1) * (bi + 2 * fi[j])).sum::<usize>() / 2
}

/// Checks the three numerical conditions and completes f, σ and Ω.
pub fn choose_parameters(spec: &SymSpec) -> Result<SymParams> {
    let SymSpec { r, ref b, z, a, .. } = *spec;
    if r == 0 || z == 0 || a.twice() <= 0 {
        return Err(input_err!("r, z and a must be positive"));
    }
    if b.is_empty() {
        return Err(input_err!("b must have at least one entry"));
    }
    if let Some(c) = spec.c {
        if c != b.len() {
            return Err(input_err!("c = {c} but b has {} entries", b.len()));
        }
    }
    let n: usize = b.iter().map(|bi| 1 + bi).sum();
    // n < r/a  <=>  2a n < 2r
    if a.twice() * n as i64 >= 2 * r as i64 {
        return Err(input_err!("n < r/a violated: n = {n}, r = {r}, a = {a}"));
    }
    let bmax = *b.iter().max().expect("nonempty");
    if (bmax * z) as i64 > a.twice() {
        return Err(input_err!("max b_i <= 2a/z violated: max b_i = {bmax}, a = {a}, z = {z}"));
    }
    if z % 2 == 0 {
        if !a.is_integer() {
            return Err(input_err!("a must be an integer when z is even"));
        }
    } else if b.iter().any(|&bi| (bi as i64 - a.twice()).rem_euclid(2) != 0) {
        return Err(input_err!("2a ≡ b_i (mod 2) violated for odd z"));
    }
    let z_i: Vec<usize> = b.iter().map(|&bi| ((a.twice() - (bi * z) as i64) / 2) as usize).collect();

    let f = match &spec.f {
        Some(f) => {
            if f.len() != b.len() || f.iter().any(|row| row.len() != z) {
                return Err(input_err!("f must be a {} x {z} matrix", b.len()));
            }
            for (i, row) in f.iter().enumerate() {
                if row.iter().sum::<usize>() != z_i[i] {
                    return Err(input_err!("row {i} of f must sum to a - b_i z/2 = {}", z_i[i]));
                }
            }
            f.clone()
        }
        None => z_i.iter().map(|&s| (0..z).map(|j| s / z + usize::from(j < s % z)).collect()).collect(),
    };
    let w: Vec<usize> = (0..z).map(|j| w_j(b, &f, j)).collect();
    let total: usize = w.iter().sum();
    debug_assert_eq!(2 * total as i64, a.twice() * n as i64);
    if total >= r {
        return Err(input_err!("Card(Ω) = {total} must be < r = {r}"));
    }

    let sigma = match &spec.sigma {
        Some(s) => {
            if s.len() != z || s.windows(2).any(|p| p[0] >= p[1]) || s.iter().any(|&x| x >= r) {
                return Err(input_err!("sigma must be {z} strictly increasing degrees in 0..{r}"));
            }
            s.clone()
        }
        None => proportional_sigma(r, &w)?,
    };
    let mut params = SymParams {
        r,
        b: b.clone(),
        z,
        a,
        n,
        f,
        z_i,
        sigma,
        omega: Vec::new(),
        w,
        slope_pair: spec.slope_pair,
    };
    for j in 0..z {
        let len = params.interval(j).len();
        if len < params.w[j] {
            return Err(input_err!("interval {j} has {len} degrees but must host w_{j} = {} elements of Ω", params.w[j]));
        }
    }
    params.omega = match &spec.omega {
        Some(o) => {
            let mut o = o.clone();
            o.sort_unstable();
            o.dedup();
            if o.iter().any(|&x| x >= r) {
                return Err(input_err!("omega entries must lie in 0..{r}"));
            }
            for j in 0..z {
                let hits = params.interval(j).iter().filter(|s| o.contains(s)).count();
                if hits != params.w[j] {
                    return Err(input_err!("Ω meets interval {j} in {hits} elements, expected w_{j} = {}", params.w[j]));
                }
            }
            o
        }
        None => {
            let mut o: Vec<usize> = (0..z).flat_map(|j| params.interval(j).into_iter().take(params.w[j])).collect();
            o.sort_unstable();
            o
        }
    };
    if let Some([zp, zpp]) = spec.slope_pair {
        if zp + zpp != z {
            return Err(input_err!("slope pair ({zp},{zpp}) must sum to z = {z}"));
        }
    }
    Ok(params)
}

/// σ_1 = 0 and interval lengths max(w_j, 1) plus a share of the slack
/// proportional to w_j (largest remainders first, ties to the lower j).
fn proportional_sigma(r: usize, w: &[usize]) -> Result<Vec<usize>> {
    let base: Vec<usize> = w.iter().map(|&x| x.max(1)).collect();
    let used: usize = base.iter().sum();
    if used > r {
        return Err(input_err!("r = {r} is too small to host the intervals"));
    }
    let slack = r - used;
    let total: usize = w.iter().sum::<usize>().max(1);
    let mut len = base.clone();
    let shares: Vec<usize> = w.iter().map(|&x| slack * x / total).collect();
    for (l, s) in len.iter_mut().zip(&shares) {
        *l += s;
    }
    let mut rem: Vec<(usize, usize)> = w.iter().enumerate().map(|(j, &x)| (slack * x % total, j)).collect();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let left = slack - shares.iter().sum::<usize>();
    for &(_, j) in rem.iter().take(left) {
        len[j] += 1;
    }
    Ok(len.iter().scan(0, |acc, &l| {
        let s = *acc;
        *acc += l;
        Some(s)
    })
    .collect())
}


/// Ranges for enumerating constructor inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub r_max: usize,
    pub c_max: usize,
    pub b_max: usize,
    pub z_max: usize,
    /// Upper bound for a, as a half-integer.
    pub a_max: HalfInt,
    pub n_max: usize,
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges { r_max: 8, c_max: 2, b_max: 2, z_max: 2, a_max: HalfInt::from_int(2), n_max: 4 }
    }
}

/// Every spec within the ranges that passes the numerical conditions
/// (b non-decreasing, default choices for everything else).
pub fn feasible_specs(ranges: &SweepRanges) -> Vec<SymSpec> {
    let mut bs: Vec<Vec<usize>> = Vec::new();
    fn grow(cur: &mut Vec<usize>, c_max: usize, b_max: usize, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == c_max {
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for b in lo..=b_max {
            cur.push(b);
            grow(cur, c_max, b_max, out);
            cur.pop();
        }
    }
    grow(&mut Vec::new(), ranges.c_max, ranges.b_max, &mut bs);
    let mut out = Vec::new();
    for r in 1..=ranges.r_max {
        for b in &bs {
            let n: usize = b.iter().map(|x| x + 1).sum();
            if n > ranges.n_max {
                continue;
            }
            for z in 1..=ranges.z_max {
                for a2 in 1..=ranges.a_max.twice() {
                    let spec = SymSpec::new(r, b.clone(), z, HalfInt(a2));
                    if choose_parameters(&spec).is_ok() {
                        out.push(spec);
                    }
                }
            }
        }
    }
    out
}

//! Dense polynomials over the prime field F_p, just enough to pick the
//! defining modulus of the unramified extension.

pub(crate) type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn rem(a: &[u64], f: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    while a.len() > df {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        let shift = top - df;
        for (i, fi) in f.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - c * fi % p) % p;
        }
        a = trim(a);
    }
    a
}

fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    rem(&out, f, p)
}

fn pow_poly(base: &[u64], mut e: u64, f: &[u64], p: u64) -> FpPoly {
    let mut acc: FpPoly = vec![1];
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility over F_p: no factor of degree at most deg/2, tested
/// through gcd(x^{p^i} - x, f).
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    let x: FpPoly = vec![0, 1];
    let mut h = rem(&x, &f, p);
    for _ in 1..=d / 2 {
        h = pow_poly(&h, p, &f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(&f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `r` over F_p, ordering the
/// candidates by the coefficient tuple (c_{r-1}, ..., c_0) lexicographically.
/// Returned low-to-high, length r + 1, leading coefficient 1.
pub(crate) fn least_irreducible(p: u64, r: usize) -> FpPoly {
    let total = p.pow(r as u32);
    for code in 0..total {
        let mut f = vec![0u64; r + 1];
        f[r] = 1;
        let mut c = code;
        for slot in f.iter_mut().take(r) {
            *slot = c % p;
            c /= p;
        }
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_has_root(f: &[u64], p: u64) -> bool {
        (0..p).any(|x| f.iter().rev().fold(0, |acc, c| (acc * x + c) % p) == 0)
    }

    #[test]
    fn degree_two_and_three_agree_with_root_test() {
        for p in [3u64, 5, 7] {
            for d in [2usize, 3] {
                let f = least_irreducible(p, d);
                assert!(!brute_has_root(&f, p));
            }
        }
    }

    #[test]
    fn known_moduli() {
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(3, 1), vec![0, 1]);
        // x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2) over F_3
        assert!(!is_irreducible(&[1, 0, 0, 0, 1], 3));
    }
}

//! Polynomials over a small prime field, used by the Zassenhaus factoriser.

use rand::Rng;

/// Dense polynomial over `F_p`, ascending coefficients, trimmed.
pub(crate) type Pp = Vec<u64>;

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn trim(a: &mut Pp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn deg(a: &Pp) -> usize {
    a.len().saturating_sub(1)
}

pub(crate) fn add(a: &Pp, b: &Pp, p: u64) -> Pp {
    let n = a.len().max(b.len());
    let mut out: Pp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &Pp, b: &Pp, p: u64) -> Pp {
    let n = a.len().max(b.len());
    let mut out: Pp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &Pp, b: &Pp, p: u64) -> Pp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(a: &Pp, c: u64, p: u64) -> Pp {
    let mut out: Pp = a.iter().map(|&x| mulmod(x, c, p)).collect();
    trim(&mut out);
    out
}

pub(crate) fn monic(a: &Pp, p: u64) -> Pp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, invmod(l, p), p),
    }
}

pub(crate) fn divrem(a: &Pp, b: &Pp, p: u64) -> (Pp, Pp) {
    assert!(!b.is_empty(), "division by zero polynomial mod p");
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let db = b.len() - 1;
    let inv = invmod(*b.last().unwrap(), p);
    let mut rem = a.clone();
    let mut quot = vec![0u64; a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = mulmod(rem[k + db], inv, p);
        if c == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            rem[k + j] = (rem[k + j] + p - mulmod(c, y, p)) % p;
        }
        quot[k] = c;
    }
    rem.truncate(db);
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(a: &Pp, b: &Pp, p: u64) -> Pp {
    divrem(a, b, p).1
}

pub(crate) fn gcd(a: &Pp, b: &Pp, p: u64) -> Pp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// `(g, s, t)` with `s*a + t*b = g` monic.
pub(crate) fn xgcd(a: &Pp, b: &Pp, p: u64) -> (Pp, Pp, Pp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (Pp, Pp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Pp, Pp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = invmod(*r0.last().unwrap(), p);
    (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
}

pub(crate) fn derivative(a: &Pp, p: u64) -> Pp {
    let mut out: Pp = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mulmod(c, i as u64 % p, p))
        .collect();
    trim(&mut out);
    out
}

/// `base^e mod m`.
pub(crate) fn powmod_poly(base: &Pp, mut e: u128, m: &Pp, p: u64) -> Pp {
    let mut acc: Pp = vec![1];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        e >>= 1;
        if e > 0 {
            b = rem(&mul(&b, &b, p), m, p);
        }
    }
    acc
}

/// Distinct-degree factorisation of a monic squarefree polynomial.
fn ddf(f: &Pp, p: u64) -> Vec<(usize, Pp)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: Pp = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while deg(&f) >= 2 * (d + 1) {
        d += 1;
        h = powmod_poly(&h, p as u128, &f, p);
        let g = gcd(&sub(&h, &x, p), &f, p);
        if deg(&g) > 0 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((d, g));
        }
    }
    if deg(&f) > 0 {
        out.push((deg(&f), f));
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting (odd `p`).
fn edf(f: &Pp, d: usize, p: u64, rng: &mut impl Rng) -> Vec<Pp> {
    let n = deg(f);
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let mut a: Pp = (0..n).map(|_| rng.gen_range(0..p)).collect();
        trim(&mut a);
        if deg(&a) == 0 {
            continue;
        }
        // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
        let mut norm = a.clone();
        let mut frob = a.clone();
        for _ in 1..d {
            frob = powmod_poly(&frob, p as u128, f, p);
            norm = rem(&mul(&norm, &frob, p), f, p);
        }
        let b = powmod_poly(&norm, ((p - 1) / 2) as u128, f, p);
        let g = gcd(&sub(&b, &vec![1], p), f, p);
        if deg(&g) > 0 && deg(&g) < n {
            let h = divrem(f, &g, p).0;
            let mut out = edf(&g, d, p, rng);
            out.extend(edf(&monic(&h, p), d, p, rng));
            return out;
        }
    }
}

/// All monic irreducible factors of a monic squarefree polynomial over `F_p`.
pub(crate) fn factor_squarefree(f: &Pp, p: u64, rng: &mut impl Rng) -> Vec<Pp> {
    let mut out = Vec::new();
    for (d, g) in ddf(f, p) {
        out.extend(edf(&g, d, p, rng));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn factors_multiply_back() {
        let p = 101;
        // (x+1)(x+2)(x^2+3) mod 101, x^2+3 irreducible mod 101? check via product only
        let f = mul(&mul(&vec![1, 1], &vec![2, 1], p), &vec![3, 0, 1], p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let fs = factor_squarefree(&f, p, &mut rng);
        let prod = fs.iter().fold(vec![1u64], |acc, g| mul(&acc, g, p));
        assert_eq!(prod, f);
        assert!(fs.len() >= 3);
    }
}

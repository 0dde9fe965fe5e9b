//! Univariate factorisation over `Q`: squarefree decomposition, then
//! Zassenhaus (factor mod p, Hensel lift, recombine) on each squarefree part.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;

use super::modp::{self, Pp};
use super::{Rational, UPoly};
use crate::{Error, Result};

/// `p = unit * prod factor^multiplicity`, factors monic and irreducible over `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(UPoly<Rational>, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> UPoly<Rational> {
        let mut acc = UPoly::constant(self.unit.clone());
        for (f, e) in &self.factors {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }
}

/// Factor with the default degree cap of 16.
pub fn factor_rational_poly(p: &UPoly<Rational>) -> Result<Factorization> {
    factor_rational_poly_with_cap(p, super::DEFAULT_FACTOR_CAP)
}

pub fn factor_rational_poly_with_cap(p: &UPoly<Rational>, cap: usize) -> Result<Factorization> {
    if p.is_zero() {
        return Err(Error::Internal("cannot factor the zero polynomial".into()));
    }
    if p.deg() > cap {
        return Err(Error::DegreeCap {
            what: "polynomial to factor",
            degree: p.deg(),
            cap,
        });
    }
    let unit = p.lc();
    let mut factors = Vec::new();
    for (sq, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&sq) {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| cmp_coeffs(a.0.coeffs(), b.0.coeffs()))
    });
    Ok(Factorization { unit, factors })
}

fn cmp_coeffs(a: &[Rational], b: &[Rational]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Monic irreducible factors of a monic squarefree rational polynomial.
pub(crate) fn factor_squarefree(p: &UPoly<Rational>) -> Vec<UPoly<Rational>> {
    if p.deg() <= 1 {
        return vec![p.monic()];
    }
    let zint = to_primitive_integer(p);
    zassenhaus(&zint)
        .into_iter()
        .map(|f| UPoly::from_rationals(f.into_iter().map(Rational::from_integer).collect()).monic())
        .collect()
}

/// Clear denominators and remove content; leading coefficient made positive.
pub(crate) fn to_primitive_integer(p: &UPoly<Rational>) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.denom());
    }
    let mut v: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = content(&v);
    for c in v.iter_mut() {
        *c = &*c / &g;
    }
    if v.last().unwrap().is_negative() {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

/// Primitive part with positive leading coefficient; zero stays zero.
fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = content(&v);
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    v.iter().map(|c| c / &g).collect()
}

/// Monic gcd of two rational polynomials by the primitive remainder
/// sequence over `Z`, which keeps coefficient growth in check.
pub(crate) fn rational_gcd(a: &UPoly<Rational>, b: &UPoly<Rational>) -> UPoly<Rational> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let mut x = to_primitive_integer(a);
    let mut y = to_primitive_integer(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let db = y.len() - 1;
        let lb = y[db].clone();
        let mut r = x;
        while r.len() > db && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, c) in y.iter().enumerate() {
                r[shift + j] -= &lr * c;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        x = y;
        y = primitive(r);
    }
    UPoly::from_rationals(x.into_iter().map(Rational::from_integer).collect()).monic()
}

fn content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn zdeg(v: &[BigInt]) -> usize {
    v.len().saturating_sub(1)
}

fn ztrim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ztrim(&mut out);
    out
}

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    ztrim(&mut out);
    out
}

fn zsym(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    let mut out: Vec<BigInt> = a
        .iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    ztrim(&mut out);
    out
}

fn to_modp(a: &[BigInt], p: u64) -> Pp {
    let pb = BigInt::from(p);
    let mut out: Pp = a.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    modp::trim(&mut out);
    out
}

fn from_modp(a: &Pp) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Exact division over `Z[x]`; `None` if not divisible.
fn zdiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.is_empty() {
        return None;
    }
    if a.len() < b.len() {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &rem[k + db];
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lb);
        if !r.is_zero() {
            return None;
        }
        for (j, y) in b.iter().enumerate() {
            rem[k + j] -= &q * y;
        }
        quot[k] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    ztrim(&mut quot);
    Some(quot)
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// Factor a primitive squarefree integer polynomial with positive leading
/// coefficient into irreducibles over `Z`.
fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = zdeg(f);
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f.last().unwrap().clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);

    // Pick the prime giving the fewest modular factors among a few
    // candidates, and intersect the sets of factor degrees they allow.
    let mut best: Option<(u64, Vec<Pp>)> = None;
    let mut allowed = vec![true; n + 1];
    let mut tried = 0;
    for p in small_primes() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_modp(f, p);
        if modp::deg(&fp) != n {
            continue;
        }
        let g = modp::gcd(&fp, &modp::derivative(&fp, p), p);
        if modp::deg(&g) > 0 {
            continue;
        }
        let facs = modp::factor_squarefree(&modp::monic(&fp, p), p, &mut rng);
        if facs.len() == 1 {
            return vec![f.to_vec()];
        }
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for g in &facs {
            let d = modp::deg(g);
            for k in (d..=n).rev() {
                if sums[k - d] {
                    sums[k] = true;
                }
            }
        }
        for k in 0..=n {
            allowed[k] &= sums[k];
        }
        if (1..n).all(|k| !allowed[k]) {
            return vec![f.to_vec()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 6 + n / 3 {
            break;
        }
    }
    let (p, modfacs) = best.expect("some prime is always good for a squarefree polynomial");

    // Coefficient bound for factors of lc*f (Mignotte-style, generous).
    let maxc = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigInt::from(2) * &lc * (BigInt::one() << n) * BigInt::from(n as u64 + 1) * maxc;
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
    }

    // Monic version of f modulo p^k.
    let lc_inv = mod_inverse(&lc, &pk);
    let fmonic: Vec<BigInt> = zmod(&f.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), &pk);
    let lifted = hensel_lift_all(&fmonic, &modfacs, p, &pk);
    recombine(f, lifted, &pk, &allowed)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Lift a monic factorisation `f = prod facs (mod p)` to `(mod pk)`.
fn hensel_lift_all(f: &[BigInt], facs: &[Pp], p: u64, pk: &BigInt) -> Vec<Vec<BigInt>> {
    if facs.len() == 1 {
        return vec![zmod(f, pk)];
    }
    let mid = facs.len() / 2;
    let g0 = facs[..mid].iter().fold(vec![1u64], |acc, g| modp::mul(&acc, g, p));
    let h0 = facs[mid..].iter().fold(vec![1u64], |acc, g| modp::mul(&acc, g, p));
    let (g, h) = hensel_lift_pair(f, &g0, &h0, p, pk);
    let mut out = hensel_lift_all(&g, &facs[..mid], p, pk);
    out.extend(hensel_lift_all(&h, &facs[mid..], p, pk));
    out
}

/// Linear Hensel lifting of `f = g0*h0 (mod p)` with monic factors.
fn hensel_lift_pair(f: &[BigInt], g0: &Pp, h0: &Pp, p: u64, pk: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let (_, s, t) = modp::xgcd(g0, h0, p);
    let pb = BigInt::from(p);
    let mut g = from_modp(g0);
    let mut h = from_modp(h0);
    let mut pj = pb.clone();
    while &pj < pk {
        let gh = zmul(&g, &h);
        let mut diff: Vec<BigInt> = (0..f.len().max(gh.len()))
            .map(|i| f.get(i).cloned().unwrap_or_default() - gh.get(i).cloned().unwrap_or_default())
            .collect();
        ztrim(&mut diff);
        let e: Vec<BigInt> = diff.iter().map(|c| c / &pj).collect();
        let e = to_modp(&e, p);
        let (q, dg) = modp::divrem(&modp::mul(&e, &t, p), g0, p);
        let dh = modp::add(&modp::mul(&e, &s, p), &modp::mul(&q, h0, p), p);
        for (i, c) in dg.iter().enumerate() {
            g[i] += &pj * BigInt::from(*c);
        }
        for (i, c) in dh.iter().enumerate() {
            h[i] += &pj * BigInt::from(*c);
        }
        pj *= &pb;
    }
    (zmod(&g, pk), zmod(&h, pk))
}

fn recombine(f: &[BigInt], mut lifted: Vec<Vec<BigInt>>, pk: &BigInt, allowed: &[bool]) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let mut cur = f.to_vec();
    let mut size = 1;
    'outer: while 2 * size <= lifted.len() {
        let r = lifted.len();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let lc = cur.last().unwrap().clone();
            let deg: usize = idx.iter().map(|&i| zdeg(&lifted[i])).sum();
            // Cheap filters: degree pattern, then the constant term.
            let mut plausible = allowed[deg];
            if plausible && !cur[0].is_zero() {
                let mut c0 = lc.clone();
                for &i in &idx {
                    c0 = (c0 * &lifted[i][0]).mod_floor(pk);
                }
                if &c0 * 2 > *pk {
                    c0 -= pk;
                }
                plausible = !c0.is_zero() && (&lc * &cur[0]).is_multiple_of(&c0);
            }
            let found = if plausible {
                let mut prod = vec![lc.clone()];
                for &i in &idx {
                    prod = zmod(&zmul(&prod, &lifted[i]), pk);
                }
                let cand = zsym(&prod, pk);
                let g = content(&cand);
                let cand: Vec<BigInt> = cand.iter().map(|c| c / &g).collect();
                zdiv_exact(&cur, &cand).map(|q| (cand, q))
            } else {
                None
            };
            if let Some((cand, q)) = found {
                let mut cand = cand;
                if cand.last().unwrap().is_negative() {
                    cand.iter_mut().for_each(|c| *c = -&*c);
                }
                out.push(cand);
                cur = q;
                if cur.last().is_some_and(|c| c.is_negative()) {
                    cur.iter_mut().for_each(|c| *c = -&*c);
                }
                for &i in idx.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    size += 1;
                    continue 'outer;
                }
                i -= 1;
                if idx[i] < r - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    if zdeg(&cur) > 0 {
        out.push(cur);
    }
    out
}

/// Is `p` irreducible over `Q`?
pub(crate) fn is_irreducible(p: &UPoly<Rational>) -> bool {
    p.deg() >= 1 && p.is_squarefree() && factor_squarefree(&p.monic()).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> UPoly<Rational> {
        UPoly::from_i64(c)
    }

    #[test]
    fn difference_of_squares() {
        let f = factor_rational_poly(&poly(&[-1, 0, 1])).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), poly(&[-1, 0, 1]));
    }

    #[test]
    fn cube_root_two_is_irreducible() {
        let f = factor_rational_poly(&poly(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(poly(&[-2, 0, 0, 1]), 1)]);
    }

    #[test]
    fn biquadratic_splits_into_quadratics() {
        let f = factor_rational_poly(&poly(&[6, 0, -5, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(poly(&[-3, 0, 1]), 1), (poly(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn swinnerton_dyer_style_recombination() {
        // x^4 - 10x^2 + 1 is irreducible over Q but splits mod every prime
        let f = factor_rational_poly(&poly(&[1, 0, -10, 0, 1])).unwrap();
        assert_eq!(f.factors.len(), 1);
        // x^8 - 1
        let g = factor_rational_poly(&poly(&[-1, 0, 0, 0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(g.factors.len(), 4);
        assert_eq!(g.expand(), poly(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn non_monic_and_repeated() {
        // 6 (x - 1/2)^2 (x^2 + 1) * 3x
        let p = poly(&[-1, 2])
            .pow(2)
            .mul(&poly(&[1, 0, 1]))
            .mul(&poly(&[0, 3]))
            .scale(&Rational::new(2.into(), 7.into()));
        let f = factor_rational_poly(&p).unwrap();
        assert_eq!(f.expand(), p);
        assert_eq!(f.factors.len(), 3);
    }

    #[test]
    fn degree_cap() {
        let p = poly(&[1; 18]);
        assert!(matches!(
            factor_rational_poly(&p),
            Err(Error::DegreeCap { cap: 16, .. })
        ));
    }
}

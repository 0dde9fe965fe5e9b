//! Certified isolation of the complex roots of a squarefree rational polynomial.
//!
//! Approximations come from Aberth iteration in `f64`, are polished by Newton
//! steps in dyadic rational arithmetic, and are then certified: for a
//! squarefree `p` of degree `n` the disk of radius `n |p(z)| / |p'(z)|` around
//! any `z` contains a root, so `n` pairwise disjoint such disks isolate all
//! roots.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::factor::to_primitive_integer;
use super::{rat_from_f64, rat_to_f64, sqrt_upper, Rational, UPoly};
use crate::{Error, Result};

/// Working precision (bits) of root centres.
pub(crate) const ROOT_BITS: usize = 320;

/// A certified complex root: the disk `|z - center| <= radius` contains
/// exactly this root and no other root of the polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRoot {
    pub re: Rational,
    pub im: Rational,
    pub radius: Rational,
}

impl ComplexRoot {
    /// Isolating rectangle `[re_lo, re_hi, im_lo, im_hi]`.
    pub fn bounding_box(&self) -> [Rational; 4] {
        [
            &self.re - &self.radius,
            &self.re + &self.radius,
            &self.im - &self.radius,
            &self.im + &self.radius,
        ]
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn approx(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Does the (closed) rectangle contain the certified centre?
    pub fn center_in_box(&self, b: &[Rational; 4]) -> bool {
        b[0] <= self.re && self.re <= b[1] && b[2] <= self.im && self.im <= b[3]
    }
}

/// Gaussian integer `(re, im)`; as a root centre it stands for `(re + i im) / 2^bits`.
type GInt = (BigInt, BigInt);

fn gmul(a: &GInt, b: &GInt) -> GInt {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gnorm(a: &GInt) -> BigInt {
    &a.0 * &a.0 + &a.1 * &a.1
}

fn aberth(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |z: Complex64| {
        let mut v = Complex64::zero();
        let mut d = Complex64::zero();
        for k in (0..=n).rev() {
            d = d * z + v;
            v = v * z + c[k];
        }
        (v, d)
    };
    // Cauchy bound for the initial circle.
    let radius = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.5, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += Complex64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Fixed-point Newton step at scale `2^bits`.
fn newton_fixed(c: &[BigInt], z: &GInt, bits: usize) -> Option<GInt> {
    let mut v: GInt = (BigInt::zero(), BigInt::zero());
    let mut d: GInt = (BigInt::zero(), BigInt::zero());
    for ck in c.iter().rev() {
        let dz = gmul(&d, z);
        d = ((dz.0 >> bits) + &v.0, (dz.1 >> bits) + &v.1);
        let vz = gmul(&v, z);
        v = ((vz.0 >> bits) + (ck << bits), vz.1 >> bits);
    }
    let den = gnorm(&d);
    if den.is_zero() {
        return None;
    }
    let num = gmul(&v, &(d.0.clone(), -d.1.clone()));
    Some((&z.0 - (num.0 << bits) / &den, &z.1 - (num.1 << bits) / &den))
}

/// Exact `S^deg p(z/S)` for integer coefficients `c`.
fn exact_eval(c: &[BigInt], z: &GInt, scale: &BigInt) -> GInt {
    let n = c.len() - 1;
    let mut acc: GInt = (c[n].clone(), BigInt::zero());
    let mut s = BigInt::one();
    for k in (0..n).rev() {
        s *= scale;
        acc = gmul(&acc, z);
        acc.0 += &c[k] * &s;
    }
    acc
}

/// Certified isolation of all complex roots of a squarefree polynomial,
/// sorted by real part descending, then imaginary part descending.
pub fn isolate_roots(p: &UPoly<Rational>) -> Result<Vec<ComplexRoot>> {
    let n = p.deg();
    if p.is_zero() || n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        return Ok(vec![ComplexRoot {
            re: r,
            im: Rational::from_integer(BigInt::zero()),
            radius: Rational::from_integer(BigInt::zero()),
        }]);
    }
    if !p.is_squarefree() {
        return Err(Error::RootIsolation("polynomial is not squarefree".into()));
    }
    let c = to_primitive_integer(p);
    let dc: Vec<BigInt> = c.iter().enumerate().skip(1).map(|(k, x)| x * BigInt::from(k)).collect();
    let lc = rat_to_f64(&Rational::from_integer(c[n].clone()));
    let cf: Vec<f64> = c
        .iter()
        .map(|x| rat_to_f64(&Rational::from_integer(x.clone())) / lc)
        .collect();
    let approx = aberth(&cf);
    let mut prev_bits = 0usize;
    let mut centres: Vec<GInt> = Vec::new();
    for bits in [ROOT_BITS, 2 * ROOT_BITS, 4 * ROOT_BITS] {
        if prev_bits == 0 {
            centres = approx
                .iter()
                .map(|z| {
                    let re = rat_from_f64(z.re) * Rational::from_integer(BigInt::one() << bits);
                    let im = rat_from_f64(z.im) * Rational::from_integer(BigInt::one() << bits);
                    (re.round().to_integer(), im.round().to_integer())
                })
                .collect();
        } else {
            for z in centres.iter_mut() {
                z.0 = &z.0 << (bits - prev_bits);
                z.1 = &z.1 << (bits - prev_bits);
            }
        }
        prev_bits = bits;
        let steps = 3 + (bits as f64 / 50.0).log2().ceil() as usize;
        for z in centres.iter_mut() {
            for _ in 0..steps {
                match newton_fixed(&c, z, bits) {
                    Some(w) => *z = w,
                    None => break,
                }
            }
        }
        symmetrise(&mut centres, bits);
        if let Some(mut roots) = certify(&c, &dc, &centres, bits) {
            roots.sort_by(root_order);
            return Ok(roots);
        }
    }
    Err(Error::RootIsolation(format!("could not certify the roots of {p}")))
}

pub(crate) fn root_order(a: &ComplexRoot, b: &ComplexRoot) -> Ordering {
    b.re.cmp(&a.re).then_with(|| b.im.cmp(&a.im))
}

/// Snap near-real centres onto the real axis and pair up conjugates exactly.
fn symmetrise(c: &mut [GInt], bits: usize) {
    let eps = BigInt::one() << (bits - bits / 3);
    for z in c.iter_mut() {
        if z.1.abs() < eps {
            z.1 = BigInt::zero();
        }
    }
    let n = c.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || !c[i].1.is_positive() {
            continue;
        }
        let target = (c[i].0.clone(), -c[i].1.clone());
        let best = (0..n)
            .filter(|&j| !used[j] && j != i && c[j].1.is_negative())
            .min_by_key(|&j| gnorm(&(&c[j].0 - &target.0, &c[j].1 - &target.1)));
        if let Some(j) = best {
            c[j] = target;
            used[i] = true;
            used[j] = true;
        }
    }
}

fn certify(c: &[BigInt], dc: &[BigInt], centres: &[GInt], bits: usize) -> Option<Vec<ComplexRoot>> {
    let n = BigInt::from(c.len() - 1);
    let scale = BigInt::one() << bits;
    let srat = Rational::from_integer(scale.clone());
    let mut out = Vec::with_capacity(centres.len());
    for z in centres {
        let pv = gnorm(&exact_eval(c, z, &scale));
        let dv = gnorm(&exact_eval(dc, z, &scale));
        if dv.is_zero() {
            return None;
        }
        // r = n |p(z)| / |p'(z)| = n |P| / (|D| S)
        let r2 = Rational::new(&n * &n * pv, dv * &scale * &scale);
        out.push(ComplexRoot {
            re: Rational::from_integer(z.0.clone()) / &srat,
            im: Rational::from_integer(z.1.clone()) / &srat,
            radius: sqrt_upper(&r2),
        });
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            let dr = &out[i].re - &out[j].re;
            let di = &out[i].im - &out[j].im;
            let rs = &out[i].radius + &out[j].radius;
            if &dr * &dr + &di * &di <= &rs * &rs {
                return None;
            }
        }
    }
    // A disk centred on the real axis holding exactly one root of a real
    // polynomial holds a real root, so real centres are genuinely real.
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        let r = isolate_roots(&UPoly::from_i64(&[1, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].re.is_zero() && r[0].im.is_positive());
        assert!(r[1].im.is_negative());
        let s = isolate_roots(&UPoly::from_i64(&[-2, 0, 1])).unwrap();
        assert!(s[0].is_real() && s[1].is_real());
        assert!((rat_to_f64(&s[0].re) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cube_root_of_two_with_complex_pair() {
        let r = isolate_roots(&UPoly::from_i64(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r[0].is_real());
        assert_eq!(r[1].re, r[2].re);
        assert_eq!(r[1].im, -r[2].im.clone());
    }

    #[test]
    fn clustered_roots_certify() {
        // (x - 1)(x - 1.001)(x + 3)(x^2 + 2)
        let p = UPoly::from_i64(&[-1, 1])
            .mul(&UPoly::from_i64(&[-1001, 1000]))
            .mul(&UPoly::from_i64(&[3, 1]))
            .mul(&UPoly::from_i64(&[2, 0, 1]));
        let r = isolate_roots(&p).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.iter().filter(|x| x.is_real()).count(), 3);
    }
}

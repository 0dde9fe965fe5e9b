use std::fmt;

use super::{int, rat_to_string, Field, Rational};

/// Dense univariate polynomial, coefficients in ascending degree order.
///
/// The zero polynomial has an empty coefficient vector; the field context is
/// carried along so constants can be built without an existing coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<F: Field> {
    coeffs: Vec<F>,
    ctx: F::Ctx,
}

impl<F: Field> UPoly<F> {
    pub fn new(ctx: &F::Ctx, coeffs: Vec<F>) -> Self {
        let mut p = UPoly {
            coeffs,
            ctx: ctx.clone(),
        };
        p.trim();
        p
    }

    pub fn zero(ctx: &F::Ctx) -> Self {
        UPoly {
            coeffs: Vec::new(),
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &F::Ctx) -> Self {
        Self::constant(F::one(ctx))
    }

    pub fn constant(c: F) -> Self {
        let ctx = c.context();
        Self::new(&ctx, vec![c])
    }

    /// The monomial `x`.
    pub fn x(ctx: &F::Ctx) -> Self {
        Self::new(ctx, vec![F::zero(ctx), F::one(ctx)])
    }

    /// `x - a`.
    pub fn linear_root(a: &F) -> Self {
        let ctx = a.context();
        Self::new(&ctx, vec![a.neg(), F::one(&ctx)])
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.lc().inv();
        self.scale(&inv)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(&self.ctx, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(&self.ctx, out)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ctx, self.coeffs.iter().map(|a| a.neg()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = vec![F::zero(&self.ctx); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].add_assign(&a.mul(b));
            }
        }
        Self::new(&self.ctx, out)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg();
        if self.coeffs.len() <= dd {
            return (Self::zero(&self.ctx), self.clone());
        }
        let inv_lc = divisor.lc().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![F::zero(&self.ctx); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].mul(&inv_lc);
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j].sub_assign(&c.mul(b));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(&self.ctx, quot), Self::new(&self.ctx, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.divrem(divisor).1
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        if let Some(g) = F::poly_gcd(self, other) {
            return g;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let ctx = &self.ctx;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(ctx), Self::zero(ctx));
        let (mut t0, mut t1) = (Self::zero(ctx), Self::one(ctx));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> Self {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&F::from_rational(&self.ctx, &Rational::from_integer(i.into()))))
            .collect();
        Self::new(&self.ctx, out)
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Is the polynomial squarefree (coprime to its derivative)?
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Squarefree part (monic).
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Yun's squarefree decomposition: monic `s_i` with `self = c * prod s_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.divrem(&a).0;
        let mut c = fp.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.deg() > 0 {
                out.push((g.clone(), i));
            }
            b = b.divrem(&g).0;
            if b.deg() == 0 {
                break;
            }
            c = d.divrem(&g).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G) -> UPoly<G> {
        UPoly::new(ctx, self.coeffs.iter().map(f).collect())
    }
}

impl UPoly<Rational> {
    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        UPoly::new(&(), coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_rationals(coeffs.iter().map(|&c| super::int(c)).collect())
    }

    /// Render in the variable `var`, highest degree first.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &int(0);
            let abs = if neg { -c } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&rat_to_string(&abs));
            } else if Field::is_one(&abs) {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{}", rat_to_string(&abs), mono));
            }
        }
        s
    }
}

impl fmt::Display for UPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

/// Resultant of two rational polynomials via the Euclidean remainder sequence.
pub(crate) fn resultant(a: &UPoly<Rational>, b: &UPoly<Rational>) -> Rational {
    if a.is_zero() || b.is_zero() {
        return int(0);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut acc = int(1);
    loop {
        let m = a.deg();
        let n = b.deg();
        if n == 0 {
            let lb = b.lc();
            let mut p = int(1);
            for _ in 0..m {
                p *= &lb;
            }
            return acc * p;
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return int(0);
        }
        let k = r.deg();
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        let lb = b.lc();
        for _ in 0..(m - k) {
            acc *= &lb;
        }
        a = b;
        b = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn divrem_and_gcd() {
        let a = UPoly::from_i64(&[-1, 0, 1]); // x^2 - 1
        let b = UPoly::from_i64(&[-1, 1]); // x - 1
        let (q, r) = a.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(q, UPoly::from_i64(&[1, 1]));
        assert_eq!(a.gcd(&UPoly::from_i64(&[1, 2, 1])), UPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^2 (x+2)^3 x
        let p = UPoly::from_i64(&[-1, 1])
            .pow(2)
            .mul(&UPoly::from_i64(&[2, 1]).pow(3))
            .mul(&UPoly::from_i64(&[0, 1]));
        let dec = p.squarefree_decomposition();
        let mut prod = UPoly::one(&());
        for (f, e) in &dec {
            prod = prod.mul(&f.pow(*e));
        }
        assert_eq!(prod, p);
        assert_eq!(dec.len(), 3);
    }

    #[test]
    fn resultant_matches_product_of_values() {
        // Res(x^2 - 2, x - 3) = (3)^2 - 2 = 7 (monic first argument)
        let a = UPoly::from_i64(&[-2, 0, 1]);
        let b = UPoly::from_i64(&[-3, 1]);
        assert_eq!(resultant(&a, &b), int(7));
        // Res(x^2+1, x^2+1) = 0
        let c = UPoly::from_i64(&[1, 0, 1]);
        assert_eq!(resultant(&c, &c), int(0));
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::exactnum::{Field, Rational};

/// Monomial order on exponent vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonoOrder {
    /// Graded reverse lexicographic.
    Grevlex,
    /// Lexicographic, earlier variables larger.
    Lex,
    /// Grevlex on the first `k` variables, ties broken by grevlex on the
    /// rest: an elimination order for the first block.
    Block(usize),
}

/// Exponent vector with cached total degree and a divisibility mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mono {
    deg: u32,
    mask: u64,
    exps: Box<[u16]>,
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl Mono {
    pub fn new(exps: Vec<u16>) -> Mono {
        let mut deg = 0u32;
        let mut mask = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            deg += e as u32;
            if e > 0 {
                mask |= 1 << (i % 64);
            }
        }
        Mono {
            deg,
            mask,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn one(n: usize) -> Mono {
        Mono::new(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u16) -> Mono {
        let mut v = vec![0; n];
        v[i] = e;
        Mono::new(v)
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn deg(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.mask & !other.mask == 0
            && self.deg <= other.deg
            && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono {
            deg: self.deg + other.deg,
            mask: self.mask | other.mask,
            exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self / other`, assuming divisibility.
    pub fn div(&self, other: &Mono) -> Mono {
        Mono::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono::new(
            self.exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Mono) -> bool {
        self.mask & other.mask == 0 || self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl MonoOrder {
    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match *self {
            MonoOrder::Grevlex => a.deg.cmp(&b.deg).then_with(|| {
                for i in (0..a.exps.len()).rev() {
                    if a.exps[i] != b.exps[i] {
                        return b.exps[i].cmp(&a.exps[i]);
                    }
                }
                Ordering::Equal
            }),
            MonoOrder::Lex => a.exps.cmp(&b.exps),
            MonoOrder::Block(k) => {
                grevlex(&a.exps[..k], &b.exps[..k]).then_with(|| grevlex(&a.exps[k..], &b.exps[k..]))
            }
        }
    }
}

/// Polynomial ring `F[x_1, ..., x_n]` with a monomial order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring<F: Field> {
    pub vars: Vec<String>,
    pub order: MonoOrder,
    pub ctx: F::Ctx,
}

impl<F: Field> Ring<F> {
    pub fn new(ctx: &F::Ctx, vars: &[&str], order: MonoOrder) -> Arc<Ring<F>> {
        Arc::new(Ring {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order,
            ctx: ctx.clone(),
        })
    }

    pub fn with_vars(ctx: &F::Ctx, vars: Vec<String>, order: MonoOrder) -> Arc<Ring<F>> {
        Arc::new(Ring {
            vars,
            order,
            ctx: ctx.clone(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Sparse multivariate polynomial; terms are sorted strictly descending in
/// the ring's order and carry no zero coefficients.
#[derive(Clone)]
pub struct MPoly<F: Field> {
    ring: Arc<Ring<F>>,
    terms: Vec<(Mono, F)>,
}

impl<F: Field> PartialEq for MPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Field> MPoly<F> {
    pub fn zero(ring: &Arc<Ring<F>>) -> Self {
        MPoly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring<F>>, c: F) -> Self {
        Self::term(ring, Mono::one(ring.nvars()), c)
    }

    pub fn one(ring: &Arc<Ring<F>>) -> Self {
        Self::constant(ring, F::one(&ring.ctx))
    }

    pub fn from_rational(ring: &Arc<Ring<F>>, q: &Rational) -> Self {
        Self::constant(ring, F::from_rational(&ring.ctx, q))
    }

    pub fn var(ring: &Arc<Ring<F>>, i: usize) -> Self {
        Self::term(ring, Mono::var(ring.nvars(), i, 1), F::one(&ring.ctx))
    }

    pub fn term(ring: &Arc<Ring<F>>, m: Mono, c: F) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        MPoly {
            ring: ring.clone(),
            terms,
        }
    }

    /// Build from unsorted terms, combining duplicates.
    pub fn from_terms(ring: &Arc<Ring<F>>, mut terms: Vec<(Mono, F)>) -> Self {
        let ord = ring.order;
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        let mut out: Vec<(Mono, F)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1.add_assign(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        MPoly {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub(crate) fn from_sorted(ring: &Arc<Ring<F>>, terms: Vec<(Mono, F)>) -> Self {
        MPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring<F>> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Mono, F)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn lm(&self) -> &Mono {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &F {
        &self.terms[0].1
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.deg()).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables occurring in the polynomial.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.nvars()];
        for (m, _) in &self.terms {
            for i in m.support() {
                used[i] = true;
            }
        }
        (0..used.len()).filter(|&i| used[i]).collect()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.lc().is_one() {
            return self.clone();
        }
        let inv = self.lc().inv();
        self.scale(&inv)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.neg())).collect(),
        }
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let ord = self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let c = if i == a.len() {
                Ordering::Less
            } else if j == b.len() {
                Ordering::Greater
            } else {
                ord.cmp(&a[i].0, &b[j].0)
            };
            match c {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let v = if negate { b[j].1.neg() } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), v));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = if negate {
                        a[i].1.sub(&b[j].1)
                    } else {
                        a[i].1.add(&b[j].1)
                    };
                    if !v.is_zero() {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MPoly {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    pub fn mul_term(&self, m: &Mono, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.mul(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Self::zero(&self.ring);
        for (m, c) in &small.terms {
            acc = acc.add(&big.mul_term(m, c));
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
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

    /// Substitute `images[i]` (polynomials of a common target ring) for the
    /// `i`-th variable.
    pub fn compose(&self, target: &Arc<Ring<F>>, images: &[MPoly<F>]) -> MPoly<F> {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        let mut powers: Vec<Vec<MPoly<F>>> = vec![vec![MPoly::one(target)]; images.len()];
        let mut acc = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
                if t.is_zero() {
                    break;
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Move into `target`, sending variable `i` to `map[i]`.
    pub fn rename(&self, target: &Arc<Ring<F>>, map: &[usize]) -> MPoly<F> {
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u16; n];
                for (i, &x) in m.exps().iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Mono::new(e), c.clone())
            })
            .collect();
        MPoly::from_terms(target, terms)
    }

    /// Same polynomial in a ring with identical variables but another order.
    pub fn reorder(&self, target: &Arc<Ring<F>>) -> MPoly<F> {
        MPoly::from_terms(target, self.terms.clone())
    }

    pub fn map_coeffs(&self, f: impl Fn(&F) -> F) -> MPoly<F> {
        MPoly::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect())
    }

    pub fn eval_c64(&self, x: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.approx();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= x[i].powu(e as u32);
                }
            }
            s += t;
        }
        s
    }

    /// Exact evaluation at a point of `F^n`.
    pub fn eval(&self, x: &[F]) -> F {
        let mut s = F::zero(&self.ring.ctx);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&x[i]);
                }
            }
            s.add_assign(&t);
        }
        s
    }

    /// Sum of the absolute values of the (approximate) coefficients.
    pub fn coeff_norm1(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.approx().norm()).sum()
    }

    fn mono_string(&self, m: &Mono) -> String {
        let parts: Vec<String> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.ring.vars[i].clone()
                } else {
                    format!("{}^{}", self.ring.vars[i], e)
                }
            })
            .collect();
        parts.join("*")
    }
}

impl<F: Field> fmt::Display for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (m, c) in &self.terms {
            let mono = self.mono_string(m);
            let (neg, body) = match c.to_rational() {
                Some(q) => {
                    let neg = q < Rational::from_integer(0.into());
                    let a = if neg { -q } else { q };
                    let cs = crate::exactnum::rat_to_string(&a);
                    (
                        neg,
                        if mono.is_empty() {
                            cs
                        } else if cs == "1" {
                            mono
                        } else {
                            format!("{cs}*{mono}")
                        },
                    )
                }
                None => {
                    let cs = c.coeff_string();
                    (false, if mono.is_empty() { cs } else { format!("{cs}*{mono}") })
                }
            };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            s.push_str(&body);
        }
        f.write_str(&s)
    }
}

//! Exact arithmetic over the rationals and over number fields `Q(theta)`.
//!
//! Everything downstream (matrices, polynomial ideals, flow closures) is
//! generic over the [`Field`] trait, which is implemented by [`Rational`]
//! and by [`NfElem`], an element of a number field with a distinguished
//! complex embedding.

mod factor;
mod modp;
mod numfield;
mod roots;
mod splitting;
mod upoly;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use factor::{factor_rational_poly, factor_rational_poly_with_cap, Factorization};
pub use numfield::{field_arithmetic, rational_coordinates, real_imag_split, ArithOp, NfElem, NumberField};
pub use roots::{isolate_roots, ComplexRoot};
pub use splitting::{
    ambient_field, complex_conjugation, factor_over_field, splitting_field, splitting_field_over,
    splitting_field_with_cap, SplitField, DEFAULT_FACTOR_CAP, DEFAULT_SPLIT_CAP,
};
pub use upoly::UPoly;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// A field of characteristic zero whose elements know their own context
/// (the ambient number field, or nothing for `Q`).
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Ctx: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;
    fn context(&self) -> Self::Ctx;

    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero; callers check first.
    fn inv(&self) -> Self;

    fn add_assign(&mut self, other: &Self) {
        *self = Field::add(self, other);
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = Field::sub(self, other);
    }
    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    /// `Some(q)` when the element is rational.
    fn to_rational(&self) -> Option<Rational>;
    /// Complex value under the distinguished embedding.
    fn approx(&self) -> Complex64;
    /// Coefficient rendering used by the polynomial grammar.
    fn coeff_string(&self) -> String;
    /// Complex conjugate, when the ambient field is conjugation-stable.
    fn conj(&self) -> crate::Result<Self>;

    /// Field-specific univariate gcd, when something better than plain
    /// Euclid is available.
    fn poly_gcd(_a: &UPoly<Self>, _b: &UPoly<Self>) -> Option<UPoly<Self>> {
        None
    }

    /// Roots of `p` lying in the field, repeated by multiplicity and sorted
    /// by real part then imaginary part, both descending.
    fn poly_roots(p: &UPoly<Self>) -> crate::Result<Vec<Self>>;

    /// `(re, im)` with `self = re + i im`, both fixed by conjugation.
    fn re_im(&self) -> crate::Result<(Self, Self)>;

    /// The generator `theta` of a proper extension of `Q`.
    fn generator(ctx: &Self::Ctx) -> Option<Self>;
}

impl Field for Rational {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        <Rational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <Rational as One>::one()
    }
    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }
    fn context(&self) {}
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn approx(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn coeff_string(&self) -> String {
        rat_to_string(self)
    }
    fn conj(&self) -> crate::Result<Self> {
        Ok(self.clone())
    }
    fn poly_gcd(a: &UPoly<Self>, b: &UPoly<Self>) -> Option<UPoly<Self>> {
        Some(factor::rational_gcd(a, b))
    }
    fn poly_roots(p: &UPoly<Self>) -> crate::Result<Vec<Self>> {
        let mut roots = Vec::new();
        for (f, m) in factor_rational_poly(p)?.factors {
            if f.deg() == 1 {
                let r = -f.coeff(0) / f.coeff(1);
                roots.extend(std::iter::repeat(r).take(m));
            }
        }
        roots.sort_by(|a, b| b.cmp(a));
        Ok(roots)
    }
    fn re_im(&self) -> crate::Result<(Self, Self)> {
        Ok((self.clone(), <Rational as Zero>::zero()))
    }
    fn generator(_: &()) -> Option<Self> {
        None
    }
}

/// Render a rational as `p` or `p/q`.
pub fn rat_to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p`, `-p` or `p/q`; the result is normalised.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let bad = || crate::Error::Parse {
        line: 1,
        col: 1,
        msg: format!("not a rational literal: {s:?}"),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(crate::Error::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64`, robust for huge numerators and denominators.
pub fn rat_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    // q ~ m * 2^-k with m an integer of about 64 bits
    let k = db - nb + 64;
    let m = if k >= 0 {
        (q.numer() << k as usize) / q.denom()
    } else {
        q.numer() / (q.denom() << (-k) as usize)
    };
    let mut v = m.to_f64().unwrap_or(0.0);
    let mut e = -k;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v /= 2f64.powi(step as i32);
        e += step;
    }
    v
}

/// Round to the nearest multiple of `2^-bits`.
pub(crate) fn round_dyadic(q: &Rational, bits: usize) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = q * Rational::from_integer(scale.clone());
    let r = (scaled + rat(1, 2)).floor();
    Rational::new(r.to_integer(), scale)
}

/// Exact rational from a finite `f64`.
pub(crate) fn rat_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(<Rational as Zero>::zero)
}

/// Upper bound on `sqrt(q)` for `q >= 0`, as a rational.
pub(crate) fn sqrt_upper(q: &Rational) -> Rational {
    if Zero::is_zero(q) {
        return <Rational as Zero>::zero();
    }
    let mut r = rat_from_f64(rat_to_f64(q).sqrt() * (1.0 + 1e-9) + 1e-300);
    if Zero::is_zero(&r) || r.is_negative() {
        r = <Rational as One>::one();
    }
    while &(&r * &r) < q {
        r = &r * rat(2, 1);
    }
    r
}

//! Number fields `Q(theta)` with a distinguished complex embedding.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_traits::Signed;

use super::roots::{isolate_roots, ComplexRoot};
use super::{int, rat_to_f64, rat_to_string, round_dyadic, Field, Rational, UPoly};
use crate::{Error, Result};

const APPROX_BITS: usize = 256;

/// `Q(theta)` where `theta` is the root of `minpoly` selected by `root`.
pub struct NumberField {
    minpoly: UPoly<Rational>,
    root: ComplexRoot,
    /// Reduced coordinates of `theta^(n+k)`, `k = 0..n-1`.
    high_powers: Vec<Vec<Rational>>,
    /// High-precision values of `theta^k`, `k = 0..n-1`.
    pow_hp: Vec<(Rational, Rational)>,
    pow_f64: Vec<Complex64>,
    conj: OnceLock<std::result::Result<Vec<Rational>, String>>,
    imag_unit: OnceLock<Option<Vec<Rational>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NumberField({} ~ {})",
            self.minpoly.to_string_in("theta"),
            self.theta_approx()
        )
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.minpoly != other.minpoly {
            return false;
        }
        let dr = &self.root.re - &other.root.re;
        let di = &self.root.im - &other.root.im;
        let r = &self.root.radius + &other.root.radius;
        &dr * &dr + &di * &di <= &r * &r
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// The field `Q`, presented as `Q(0)`.
    pub fn rationals() -> Arc<NumberField> {
        static Q: OnceLock<Arc<NumberField>> = OnceLock::new();
        Q.get_or_init(|| {
            let root = ComplexRoot {
                re: int(0),
                im: int(0),
                radius: int(0),
            };
            Arc::new(Self::build(UPoly::from_i64(&[0, 1]), root))
        })
        .clone()
    }

    /// `Q(theta)` for the `index`-th root of `minpoly` in the order of
    /// [`isolate_roots`]. The polynomial is made monic and must be
    /// irreducible.
    pub fn new(minpoly: &UPoly<Rational>, index: usize) -> Result<Arc<NumberField>> {
        let m = minpoly.monic();
        if m.deg() == 0 {
            return Err(Error::Semantic("minimal polynomial must be nonconstant".into()));
        }
        if !super::factor::is_irreducible(&m) {
            return Err(Error::Semantic(format!("{m} is not irreducible over Q")));
        }
        if m.deg() == 1 {
            return Ok(Self::rationals());
        }
        let roots = isolate_roots(&m)?;
        let root = roots
            .get(index)
            .cloned()
            .ok_or_else(|| Error::Semantic(format!("root index {index} out of range")))?;
        Ok(Arc::new(Self::build(m, root)))
    }

    /// `Q(theta)` for the unique root of `minpoly` inside the rectangle
    /// `[re_lo, re_hi] x [im_lo, im_hi]`.
    pub fn from_box(minpoly: &UPoly<Rational>, b: &[Rational; 4]) -> Result<Arc<NumberField>> {
        let m = minpoly.monic();
        let roots = isolate_roots(&m)?;
        let hits: Vec<usize> = (0..roots.len()).filter(|&k| roots[k].center_in_box(b)).collect();
        match hits.as_slice() {
            [k] => Self::new(&m, *k),
            [] => Err(Error::Semantic(format!("no root of {m} in the given box"))),
            _ => Err(Error::Semantic(format!("the given box does not isolate a root of {m}"))),
        }
    }

    /// Internal constructor: `minpoly` is monic irreducible and `root` a
    /// certified root of it.
    pub(crate) fn build(minpoly: UPoly<Rational>, root: ComplexRoot) -> NumberField {
        let n = minpoly.deg();
        let mut high_powers = Vec::with_capacity(n);
        // theta^n = -(c_0 + ... + c_{n-1} theta^{n-1})
        let mut cur: Vec<Rational> = (0..n).map(|k| -minpoly.coeff(k)).collect();
        for _ in 0..n {
            high_powers.push(cur.clone());
            // multiply by theta
            let top = cur[n - 1].clone();
            let mut next = vec![int(0); n];
            for k in (1..n).rev() {
                next[k] = cur[k - 1].clone();
            }
            for k in 0..n {
                next[k] += &top * &high_powers[0][k];
            }
            cur = next;
        }
        let mut pow_hp = Vec::with_capacity(n);
        let mut z = (int(1), int(0));
        for _ in 0..n {
            pow_hp.push(z.clone());
            let re = &z.0 * &root.re - &z.1 * &root.im;
            let im = &z.0 * &root.im + &z.1 * &root.re;
            z = (round_dyadic(&re, APPROX_BITS), round_dyadic(&im, APPROX_BITS));
        }
        let pow_f64 = pow_hp
            .iter()
            .map(|(a, b)| Complex64::new(rat_to_f64(a), rat_to_f64(b)))
            .collect();
        let nf = NumberField {
            minpoly,
            root,
            high_powers,
            pow_hp,
            pow_f64,
            conj: OnceLock::new(),
            imag_unit: OnceLock::new(),
        };
        if nf.root.im.is_zero() {
            let mut id = vec![int(0); n];
            if n > 1 {
                id[1] = int(1);
            } else {
                id[0] = nf.root.re.clone();
            }
            let _ = nf.conj.set(Ok(id));
            let _ = nf.imag_unit.set(None);
        }
        nf
    }

    /// Record the conjugate of `theta` (as coordinates) when it is known
    /// from the construction. Must be called before sharing the field.
    pub(crate) fn preset_conjugation(&self, image: Vec<Rational>) {
        let _ = self.conj.set(Ok(image));
    }

    pub(crate) fn preset_imaginary_unit(&self, i: Option<Vec<Rational>>) {
        let _ = self.imag_unit.set(i);
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn minpoly(&self) -> &UPoly<Rational> {
        &self.minpoly
    }

    pub fn root(&self) -> &ComplexRoot {
        &self.root
    }

    pub fn root_box(&self) -> [Rational; 4] {
        self.root.bounding_box()
    }

    pub fn theta_approx(&self) -> Complex64 {
        self.root.approx()
    }

    /// Is `theta` real (so the whole field lies in `R`)?
    pub fn is_real(&self) -> bool {
        self.root.im.is_zero()
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    fn reduce(&self, mut c: Vec<Rational>) -> Vec<Rational> {
        let n = self.degree();
        if n == 1 {
            // Q(a) with theta = a rational: evaluate.
            let a = &self.root.re;
            let mut acc = int(0);
            for x in c.iter().rev() {
                acc = acc * a + x;
            }
            return vec![acc];
        }
        if c.len() > n {
            for k in (n..c.len()).rev() {
                let top = std::mem::replace(&mut c[k], int(0));
                if top.is_zero() {
                    continue;
                }
                if k - n < n {
                    for j in 0..n {
                        c[j] += &top * &self.high_powers[k - n][j];
                    }
                } else {
                    // theta^k = theta^(k-n) * theta^n
                    for j in 0..n {
                        let t = &top * &self.high_powers[0][j];
                        c[k - n + j] += t;
                    }
                }
            }
            c.truncate(n);
        }
        c.resize(n, int(0));
        c
    }

    /// Coordinates of the conjugate of `theta`.
    pub fn conjugation_image(self: &Arc<Self>) -> Result<Vec<Rational>> {
        self.conj
            .get_or_init(|| compute_conjugation(self))
            .clone()
            .map_err(|_| Error::NotConjugationStable)
    }

    /// The element `i` of the field (the root of `x^2 + 1` with positive
    /// imaginary part), if present.
    pub fn imaginary_unit(self: &Arc<Self>) -> Option<NfElem> {
        self.imag_unit
            .get_or_init(|| {
                let x2p1 = UPoly::from_i64(&[1, 0, 1]).map(self, |c| NfElem::from_rat(self, c));
                super::splitting::roots_in_field(&x2p1)
                    .ok()?
                    .into_iter()
                    .find(|r| r.approx().im > 0.0)
                    .map(|r| r.coords)
            })
            .as_ref()
            .map(|c| NfElem::new(self, c.clone()))
    }
}

fn compute_conjugation(k: &Arc<NumberField>) -> std::result::Result<Vec<Rational>, String> {
    let m = k.minpoly.map(k, |c| NfElem::from_rat(k, c));
    let roots = super::splitting::roots_in_field(&m).map_err(|e| e.to_string())?;
    let target = (k.root.re.clone(), -k.root.im.clone());
    let tol = Rational::new(1.into(), num_bigint::BigInt::from(1) << 100);
    for r in roots {
        let (re, im) = r.approx_hp();
        let d = (&re - &target.0).abs() + (&im - &target.1).abs();
        if d < tol {
            return Ok(r.coords);
        }
    }
    Err("field is not closed under complex conjugation".into())
}

/// An element `sum coords[j] theta^j` of a [`NumberField`].
#[derive(Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.coeff_string())
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.field == other.field
    }
}

impl NfElem {
    /// Element with the given power-basis coordinates (reduced modulo the
    /// minimal polynomial if longer than the degree).
    pub fn new(field: &Arc<NumberField>, coords: Vec<Rational>) -> NfElem {
        NfElem {
            field: field.clone(),
            coords: field.reduce(coords),
        }
    }

    pub fn from_rat(field: &Arc<NumberField>, q: &Rational) -> NfElem {
        let mut coords = vec![int(0); field.degree()];
        coords[0] = q.clone();
        NfElem {
            field: field.clone(),
            coords,
        }
    }

    pub fn from_i64(field: &Arc<NumberField>, n: i64) -> NfElem {
        Self::from_rat(field, &super::int(n))
    }

    /// The generator `theta`.
    pub fn theta(field: &Arc<NumberField>) -> NfElem {
        Self::new(field, vec![int(0), int(1)])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// Value under the distinguished embedding, to about 250 bits.
    pub fn approx_hp(&self) -> (Rational, Rational) {
        let mut re = int(0);
        let mut im = int(0);
        for (c, (pr, pi)) in self.coords.iter().zip(&self.field.pow_hp) {
            if c.is_zero() {
                continue;
            }
            re += c * pr;
            im += c * pi;
        }
        (re, im)
    }

    /// Image under the homomorphism sending `theta` to `image`.
    pub fn map_theta(&self, image: &NfElem) -> NfElem {
        let target = image.field.clone();
        let mut acc = NfElem::from_rat(&target, &int(0));
        for c in self.coords.iter().rev() {
            acc = acc.mul(image);
            acc.coords[0] += c;
        }
        acc
    }

    fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || self.field == other.field
    }
}

impl Field for NfElem {
    type Ctx = Arc<NumberField>;

    fn zero(ctx: &Self::Ctx) -> Self {
        NfElem::from_rat(ctx, &int(0))
    }
    fn one(ctx: &Self::Ctx) -> Self {
        NfElem::from_rat(ctx, &int(1))
    }
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self {
        NfElem::from_rat(ctx, q)
    }
    fn context(&self) -> Self::Ctx {
        self.field.clone()
    }
    fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
    fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }
    fn add(&self, other: &Self) -> Self {
        debug_assert!(self.same_field(other));
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        debug_assert!(self.same_field(other));
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.same_field(other));
        let n = self.coords.len();
        if n == 1 {
            return NfElem {
                field: self.field.clone(),
                coords: vec![&self.coords[0] * &other.coords[0]],
            };
        }
        let mut prod = vec![int(0); 2 * n - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        NfElem {
            field: self.field.clone(),
            coords: self.field.reduce(prod),
        }
    }
    fn neg(&self) -> Self {
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
    fn inv(&self) -> Self {
        assert!(!Field::is_zero(self), "inverse of zero");
        if self.coords.len() == 1 {
            return NfElem {
                field: self.field.clone(),
                coords: vec![self.coords[0].recip()],
            };
        }
        let a = UPoly::from_rationals(self.coords.clone());
        let (g, s, _) = a.xgcd(&self.field.minpoly);
        debug_assert!(g.deg() == 0);
        let s = s.scale(&g.coeff(0).recip());
        NfElem::new(&self.field, s.coeffs().to_vec())
    }
    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += b;
        }
    }
    fn sub_assign(&mut self, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a -= b;
        }
    }
    fn to_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }
    fn approx(&self) -> Complex64 {
        self.coords
            .iter()
            .zip(&self.field.pow_f64)
            .map(|(c, p)| p * rat_to_f64(c))
            .sum()
    }
    fn coeff_string(&self) -> String {
        match self.to_rational() {
            Some(q) => rat_to_string(&q),
            None => format!("({})", UPoly::from_rationals(self.coords.clone()).to_string_in("theta")),
        }
    }
    fn conj(&self) -> Result<Self> {
        if self.field.is_real() || self.to_rational().is_some() {
            return Ok(self.clone());
        }
        let image = NfElem::new(&self.field, self.field.conjugation_image()?);
        Ok(self.map_theta(&image))
    }
    fn poly_roots(p: &UPoly<Self>) -> Result<Vec<Self>> {
        super::splitting::roots_with_multiplicity(p)
    }
    fn re_im(&self) -> Result<(Self, Self)> {
        real_imag_split(self)
    }
    fn generator(ctx: &Self::Ctx) -> Option<Self> {
        (ctx.degree() > 1).then(|| NfElem::theta(ctx))
    }
}

/// The four field operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: both operands must live in the same field and a
/// divisor must be nonzero.
pub fn field_arithmetic(a: &NfElem, b: &NfElem, op: ArithOp) -> Result<NfElem> {
    if !a.same_field(b) {
        return Err(Error::FieldMismatch);
    }
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => {
            if Field::is_zero(b) {
                return Err(Error::DivisionByZero);
            }
            a.div(b)
        }
    })
}

/// Power-basis coordinate matrix of a tuple: row `j` holds the
/// `theta^j`-coordinates of every entry. Rows that vanish identically are
/// dropped (a single zero row is kept if all do), so `M n = 0` exactly when
/// `sum n_i a_i = 0`.
pub fn rational_coordinates(a: &[NfElem]) -> Vec<Vec<Rational>> {
    let Some(first) = a.first() else {
        return Vec::new();
    };
    let n = first.field.degree();
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|j| a.iter().map(|x| x.coords[j].clone()).collect::<Vec<_>>())
        .filter(|r: &Vec<Rational>| r.iter().any(|c| !c.is_zero()))
        .collect();
    if rows.is_empty() {
        rows.push(vec![int(0); a.len()]);
    }
    rows
}

/// `(re, im)` with `a = re + i im`, both fixed by complex conjugation.
pub fn real_imag_split(a: &NfElem) -> Result<(NfElem, NfElem)> {
    let k = a.field.clone();
    if k.is_real() {
        return Ok((a.clone(), NfElem::zero(&k)));
    }
    let abar = a.conj()?;
    let i = k.imaginary_unit().ok_or(Error::NotConjugationStable)?;
    let half = NfElem::from_rat(&k, &super::rat(1, 2));
    let re = a.add(&abar).mul(&half);
    // (a - abar) / (2i) = -i (a - abar) / 2
    let im = a.sub(&abar).mul(&i).mul(&half).neg();
    Ok((re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn sqrt2() -> Arc<NumberField> {
        // roots of x^2 - 2 sorted descending: index 0 is +sqrt(2)
        NumberField::new(&UPoly::from_i64(&[-2, 0, 1]), 0).unwrap()
    }

    #[test]
    fn sqrt2_squared() {
        let k = sqrt2();
        let t = NfElem::theta(&k);
        let p = field_arithmetic(&t, &t, ArithOp::Mul).unwrap();
        assert_eq!(p.to_rational(), Some(int(2)));
    }

    #[test]
    fn rationals_add() {
        let q = NumberField::rationals();
        let a = NfElem::from_rat(&q, &rat(1, 2));
        let b = NfElem::from_rat(&q, &rat(1, 3));
        let s = field_arithmetic(&a, &b, ArithOp::Add).unwrap();
        assert_eq!(s.to_rational(), Some(rat(5, 6)));
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let k = sqrt2();
        let t = NfElem::theta(&k);
        let a = t.add(&NfElem::from_i64(&k, 1));
        let inv = field_arithmetic(&NfElem::from_i64(&k, 1), &a, ArithOp::Div).unwrap();
        assert_eq!(inv, t.sub(&NfElem::from_i64(&k, 1)));
        assert!(field_arithmetic(&a, &inv, ArithOp::Mul).unwrap().is_one());
    }

    #[test]
    fn errors_are_explicit() {
        let k = sqrt2();
        let z = NfElem::zero(&k);
        assert!(matches!(
            field_arithmetic(&NfElem::one(&k), &z, ArithOp::Div),
            Err(Error::DivisionByZero)
        ));
        let q = NumberField::rationals();
        assert!(matches!(
            field_arithmetic(&NfElem::one(&k), &NfElem::one(&q), ArithOp::Add),
            Err(Error::FieldMismatch)
        ));
    }

    #[test]
    fn coordinates_of_tuple() {
        let k = sqrt2();
        let t = NfElem::theta(&k);
        let one = NfElem::one(&k);
        let a = vec![t.clone(), t.add(&one), NfElem::from_i64(&k, 3)];
        let m = rational_coordinates(&a);
        assert_eq!(m, vec![vec![int(0), int(1), int(3)], vec![int(1), int(1), int(0)]]);
        let q = NumberField::rationals();
        let m = rational_coordinates(&[NfElem::from_i64(&q, 1), NfElem::from_i64(&q, 2)]);
        assert_eq!(m, vec![vec![int(1), int(2)]]);
        assert_eq!(rational_coordinates(&[NfElem::zero(&q)]), vec![vec![int(0)]]);
    }

    #[test]
    fn gaussian_split() {
        let k = NumberField::new(&UPoly::from_i64(&[1, 0, 1]), 0).unwrap();
        let i = NfElem::theta(&k);
        assert!(i.approx().im > 0.0);
        let a = NfElem::from_i64(&k, 3).add(&i.mul(&NfElem::from_i64(&k, 2)));
        let (re, im) = real_imag_split(&a).unwrap();
        assert_eq!(re.to_rational(), Some(int(3)));
        assert_eq!(im.to_rational(), Some(int(2)));
        assert_eq!(i.conj().unwrap(), i.neg());
    }

    #[test]
    fn real_field_conjugation_is_identity() {
        let k = sqrt2();
        let t = NfElem::theta(&k);
        assert_eq!(t.conj().unwrap(), t);
        let (re, im) = real_imag_split(&t).unwrap();
        assert_eq!(re, t);
        assert!(Field::is_zero(&im));
    }

    #[test]
    fn from_box_selects_root() {
        let m = UPoly::from_i64(&[-2, 0, 1]);
        let b = [int(-2), int(-1), int(-1), int(1)];
        let k = NumberField::from_box(&m, &b).unwrap();
        assert!(NfElem::theta(&k).approx().re < 0.0);
        assert!(NumberField::from_box(&m, &[int(-2), int(2), int(-1), int(1)]).is_err());
    }
}

//! Factorisation over number fields (Trager's norm method) and splitting
//! fields built by successive primitive-element extensions.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::Signed;

use super::factor::factor_rational_poly_with_cap;
use super::numfield::{NfElem, NumberField};
use super::roots::isolate_roots;
use super::upoly::resultant;
use super::{int, Field, Rational, UPoly};
use crate::{Error, Result};

pub const DEFAULT_FACTOR_CAP: usize = 16;
pub const DEFAULT_SPLIT_CAP: usize = 24;

/// Norms factored inside Trager's algorithm have degree `[K:Q] deg f`.
const NORM_FACTOR_CAP: usize = 64;

/// A splitting field together with the roots of the polynomial it splits,
/// listed with multiplicity, by real part then imaginary part descending.
#[derive(Clone, Debug)]
pub struct SplitField {
    pub field: Arc<NumberField>,
    pub roots: Vec<NfElem>,
}

/// Norm `N_{K/Q}(g)` of a polynomial over `K`, by evaluation and
/// interpolation.
pub(crate) fn norm_poly(g: &UPoly<NfElem>) -> UPoly<Rational> {
    let k = g.ctx();
    if k.is_rationals() {
        return UPoly::from_rationals(g.coeffs().iter().map(|c| c.to_rational().unwrap()).collect());
    }
    let m = k.minpoly();
    let d = k.degree() * g.deg();
    let xs: Vec<Rational> = (0..=d as i64).map(int).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let a = g.eval(&NfElem::from_rat(k, x));
            resultant(m, &UPoly::from_rationals(a.coords().to_vec()))
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(xs[k], ys[k])`.
fn interpolate(xs: &[Rational], ys: &[Rational]) -> UPoly<Rational> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = UPoly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = p
            .mul(&UPoly::from_rationals(vec![-xs[i].clone(), int(1)]))
            .add(&UPoly::constant(dd[i].clone()));
    }
    p
}

fn shifts() -> impl Iterator<Item = i64> {
    (0..40).map(|k| if k % 2 == 0 { -(k / 2) } else { k / 2 + 1 })
}

fn lift(k: &Arc<NumberField>, p: &UPoly<Rational>) -> UPoly<NfElem> {
    p.map(k, |c| NfElem::from_rat(k, c))
}

/// `x - s theta` over `K`.
fn shift_poly(k: &Arc<NumberField>, s: i64) -> UPoly<NfElem> {
    let st = NfElem::theta(k).mul(&NfElem::from_i64(k, s));
    UPoly::new(k, vec![st.neg(), NfElem::one(k)])
}

/// Monic irreducible factors of a monic squarefree polynomial over `K`.
fn trager(f: &UPoly<NfElem>) -> Result<Vec<UPoly<NfElem>>> {
    let k = f.ctx().clone();
    if f.deg() <= 1 {
        return Ok(vec![f.monic()]);
    }
    if k.is_rationals() {
        let q = norm_poly(f);
        let fac = factor_rational_poly_with_cap(&q, NORM_FACTOR_CAP)?;
        return Ok(fac.factors.iter().map(|(g, _)| lift(&k, g)).collect());
    }
    for s in shifts() {
        let g = f.compose(&shift_poly(&k, s));
        let n = norm_poly(&g);
        if !n.is_squarefree() {
            continue;
        }
        let fac = factor_rational_poly_with_cap(&n, NORM_FACTOR_CAP)?;
        let back = shift_poly(&k, -s);
        let mut out = Vec::new();
        for (ni, _) in &fac.factors {
            let h = g.gcd(&lift(&k, ni));
            if h.deg() > 0 {
                out.push(h.compose(&back).monic());
            }
        }
        return Ok(out);
    }
    Err(Error::Internal("no squarefree norm found".into()))
}

/// Irreducible factorisation over the coefficient field: monic factors with
/// multiplicities.
pub fn factor_over_field(f: &UPoly<NfElem>) -> Result<Vec<(UPoly<NfElem>, usize)>> {
    if f.is_zero() {
        return Err(Error::Internal("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (sq, mult) in f.squarefree_decomposition() {
        for g in trager(&sq)? {
            out.push((g, mult));
        }
    }
    Ok(out)
}

/// Distinct roots of `f` lying in its coefficient field.
pub(crate) fn roots_in_field(f: &UPoly<NfElem>) -> Result<Vec<NfElem>> {
    Ok(factor_over_field(f)?
        .into_iter()
        .filter(|(g, _)| g.deg() == 1)
        .map(|(g, _)| g.coeff(0).neg())
        .collect())
}

fn hp_order(a: &NfElem, b: &NfElem) -> Ordering {
    let (ar, ai) = a.approx_hp();
    let (br, bi) = b.approx_hp();
    br.cmp(&ar).then_with(|| bi.cmp(&ai))
}

fn hp_close(a: &(Rational, Rational), b: &(Rational, Rational)) -> bool {
    let tol = Rational::new(1.into(), num_bigint::BigInt::from(1) << 120);
    (&a.0 - &b.0).abs() + (&a.1 - &b.1).abs() < tol
}

/// Successive extension of `Q` until every polynomial in `targets`
/// (irreducible over `Q`) splits.
struct Tower {
    field: Arc<NumberField>,
    /// Adjoined roots, as elements of the current field.
    adjoined: Vec<NfElem>,
    /// `theta = sum combo[k] * adjoined[k]`.
    combo: Vec<Rational>,
}

impl Tower {
    fn new() -> Tower {
        Tower {
            field: NumberField::rationals(),
            adjoined: Vec::new(),
            combo: Vec::new(),
        }
    }

    /// Adjoin one root of `h`, irreducible over the current field.
    fn extend(&mut self, h: &UPoly<NfElem>, cap: usize) -> Result<()> {
        let k = self.field.clone();
        let new_deg = k.degree() * h.deg();
        if new_deg > cap {
            return Err(Error::DegreeCap {
                what: "splitting field",
                degree: new_deg,
                cap,
            });
        }
        for s in shifts() {
            let g = h.compose(&shift_poly(&k, s));
            let n = norm_poly(&g).monic();
            if !n.is_squarefree() {
                continue;
            }
            // gamma = beta + s theta has minimal polynomial n.
            let roots = isolate_roots(&n)?;
            let l0 = Arc::new(NumberField::build(n.clone(), roots[0].clone()));
            let gamma = NfElem::theta(&l0);
            // theta_L: common root of m_K(y) and h(gamma - s y) with theta -> y.
            let theta_l = if k.is_rationals() {
                NfElem::zero(&l0)
            } else {
                let y_poly = |c: &NfElem| -> UPoly<NfElem> {
                    UPoly::new(&l0, c.coords().iter().map(|q| NfElem::from_rat(&l0, q)).collect())
                };
                let lin = UPoly::new(&l0, vec![gamma.clone(), NfElem::from_i64(&l0, -s)]);
                let mut hy = UPoly::zero(&l0);
                for c in h.coeffs().iter().rev() {
                    hy = hy.mul(&lin).add(&y_poly(c));
                }
                let mk = lift(&l0, k.minpoly());
                let gd = mk.gcd(&hy);
                if gd.deg() != 1 {
                    return Err(Error::Internal("primitive element step failed".into()));
                }
                gd.coeff(0).neg()
            };
            // Pick the embedding of gamma that restricts to the embedding of K.
            let target = NfElem::theta(&k).approx_hp();
            let mut chosen = None;
            for r in &roots {
                let lj = Arc::new(NumberField::build(n.clone(), r.clone()));
                let t = NfElem::new(&lj, theta_l.coords().to_vec());
                if k.is_rationals() || hp_close(&t.approx_hp(), &target) {
                    chosen = Some(lj);
                    break;
                }
            }
            let l = chosen.ok_or_else(|| Error::Internal("lost the base embedding".into()))?;
            let theta_l = NfElem::new(&l, theta_l.coords().to_vec());
            let gamma = NfElem::theta(&l);
            let beta = gamma.sub(&theta_l.mul(&NfElem::from_i64(&l, s)));
            self.adjoined = self.adjoined.iter().map(|a| a.map_theta(&theta_l)).collect();
            self.adjoined.push(beta);
            self.combo = self.combo.iter().map(|c| c * int(s)).collect();
            self.combo.push(int(1));
            self.field = l;
            return Ok(());
        }
        Err(Error::Internal("no primitive element found".into()))
    }

    fn split_all(&mut self, targets: &[UPoly<Rational>], cap: usize) -> Result<()> {
        'outer: loop {
            for t in targets {
                let tl = lift(&self.field, t);
                let mut nonlinear: Vec<UPoly<NfElem>> =
                    trager(&tl.monic())?.into_iter().filter(|g| g.deg() > 1).collect();
                if nonlinear.is_empty() {
                    continue;
                }
                nonlinear.sort_by_key(|g| g.deg());
                self.extend(&nonlinear[0], cap)?;
                continue 'outer;
            }
            return Ok(());
        }
    }

    /// Record conjugation and `i` on the final field, using that the
    /// adjoined elements are roots of rational polynomials whose full root
    /// sets are available.
    fn finish(&self, targets: &[UPoly<Rational>]) -> Result<()> {
        let l = &self.field;
        let mut all_roots = Vec::new();
        for t in targets {
            all_roots.extend(roots_in_field(&lift(l, t))?);
        }
        let approx: Vec<_> = all_roots.iter().map(|r| r.approx_hp()).collect();
        if let Some(i) = all_roots
            .iter()
            .find(|r| r.mul(r).to_rational() == Some(int(-1)) && r.approx().im > 0.0)
        {
            l.preset_imaginary_unit(Some(i.coords().to_vec()));
        }
        if l.is_real() {
            return Ok(());
        }
        let mut image = NfElem::zero(l);
        for (a, c) in self.adjoined.iter().zip(&self.combo) {
            let (re, im) = a.approx_hp();
            let want = (re, -im);
            let k = approx
                .iter()
                .position(|z| hp_close(z, &want))
                .ok_or(Error::NotConjugationStable)?;
            image = image.add(&all_roots[k].mul(&NfElem::from_rat(l, c)));
        }
        let check = lift(l, l.minpoly()).eval(&image);
        if !Field::is_zero(&check) {
            return Err(Error::Internal("conjugation image is not a root".into()));
        }
        l.preset_conjugation(image.coords().to_vec());
        Ok(())
    }
}

fn rational_targets(p: &UPoly<Rational>) -> Result<(Vec<UPoly<Rational>>, bool)> {
    let fac = factor_rational_poly_with_cap(p, DEFAULT_FACTOR_CAP)?;
    let mut targets = Vec::new();
    let mut need_i = false;
    for (f, _) in &fac.factors {
        if f.deg() > 1 && isolate_roots(f)?.iter().any(|r| !r.is_real()) {
            need_i = true;
        }
        targets.push(f.clone());
    }
    let x2p1 = UPoly::from_i64(&[1, 0, 1]);
    if need_i && !targets.contains(&x2p1) {
        targets.push(x2p1);
    }
    Ok((targets, need_i))
}

/// Splitting field of a nonzero rational polynomial, with `i` adjoined when
/// some root is not real.
pub fn splitting_field(p: &UPoly<Rational>) -> Result<SplitField> {
    splitting_field_with_cap(p, DEFAULT_SPLIT_CAP)
}

pub fn splitting_field_with_cap(p: &UPoly<Rational>, cap: usize) -> Result<SplitField> {
    if p.is_zero() {
        return Err(Error::Internal("splitting field of the zero polynomial".into()));
    }
    let (targets, _) = rational_targets(p)?;
    let mut tower = Tower::new();
    tower.split_all(&targets, cap)?;
    tower.finish(&targets)?;
    let field = tower.field.clone();
    let roots = roots_with_multiplicity(&lift(&field, p))?;
    Ok(SplitField { field, roots })
}

/// Roots of `f` in its coefficient field, with multiplicity, sorted.
pub(crate) fn roots_with_multiplicity(f: &UPoly<NfElem>) -> Result<Vec<NfElem>> {
    let mut roots = Vec::new();
    for (g, mult) in factor_over_field(f)? {
        if g.deg() == 1 {
            let r = g.coeff(0).neg();
            for _ in 0..mult {
                roots.push(r.clone());
            }
        }
    }
    roots.sort_by(hp_order);
    Ok(roots)
}

/// Splitting field of `f` over its coefficient field `K`: a normal,
/// conjugation-closed extension `L` of `Q` containing `K` and every root of
/// `f`. Returns the field with the roots of `f` and the image of the
/// generator of `K` in `L`.
pub fn splitting_field_over(f: &UPoly<NfElem>) -> Result<(SplitField, NfElem)> {
    let k = f.ctx().clone();
    if k.is_rationals() {
        let q = norm_poly(f);
        let sf = splitting_field(&q)?;
        let img = NfElem::zero(&sf.field);
        return Ok((sf, img));
    }
    let n = norm_poly(f);
    let total = n.mul(k.minpoly()).squarefree_part();
    let (targets, _) = rational_targets(&total)?;
    let mut tower = Tower::new();
    tower.split_all(&targets, DEFAULT_SPLIT_CAP)?;
    tower.finish(&targets)?;
    let l = tower.field.clone();
    let want = NfElem::theta(&k).approx_hp();
    let img = roots_in_field(&lift(&l, k.minpoly()))?
        .into_iter()
        .find(|r| hp_close(&r.approx_hp(), &want))
        .ok_or_else(|| Error::Internal("base field does not embed".into()))?;
    let fl = f.map(&l, |c| c.map_theta(&img));
    let roots = roots_with_multiplicity(&fl)?;
    Ok((SplitField { field: l, roots }, img))
}

/// The smallest field containing every root of every polynomial in
/// `polys`, with `i` adjoined if any root is not real.
pub fn ambient_field(polys: &[UPoly<Rational>]) -> Result<Arc<NumberField>> {
    let mut prod = UPoly::from_i64(&[1]);
    for p in polys {
        if !p.is_zero() && p.deg() > 0 {
            prod = prod.mul(&p.squarefree_part()).squarefree_part();
        }
    }
    Ok(splitting_field(&prod)?.field)
}

/// Complex conjugation of `K` as the image of its generator.
pub fn complex_conjugation(k: &Arc<NumberField>) -> Result<NfElem> {
    Ok(NfElem::new(k, k.conjugation_image()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_roots(p: &UPoly<Rational>, sf: &SplitField) {
        let pl = lift(&sf.field, p);
        for r in &sf.roots {
            assert!(Field::is_zero(&pl.eval(r)));
        }
        assert_eq!(sf.roots.len(), p.deg());
    }

    #[test]
    fn gaussian_integers() {
        let p = UPoly::from_i64(&[1, 0, 1]);
        let sf = splitting_field(&p).unwrap();
        assert_eq!(sf.field.degree(), 2);
        check_roots(&p, &sf);
        assert!(sf.roots[0].approx().im > 0.0);
        let c = complex_conjugation(&sf.field).unwrap();
        assert_eq!(c, NfElem::theta(&sf.field).conj().unwrap());
        assert_eq!(sf.roots[0].conj().unwrap(), sf.roots[1]);
    }

    #[test]
    fn real_quadratic() {
        let p = UPoly::from_i64(&[-2, 0, 1]);
        let sf = splitting_field(&p).unwrap();
        assert!(sf.field.is_real());
        check_roots(&p, &sf);
        assert!(sf.roots[0].approx().re > 1.4);
        let c = complex_conjugation(&sf.field).unwrap();
        assert_eq!(c, NfElem::theta(&sf.field));
    }

    #[test]
    fn mixed_roots() {
        let p = UPoly::from_i64(&[1, 0, 1]).mul(&UPoly::from_i64(&[-1, 1]));
        let sf = splitting_field(&p).unwrap();
        assert_eq!(sf.field.degree(), 2);
        check_roots(&p, &sf);
    }

    #[test]
    fn cube_root_of_two_with_i() {
        let p = UPoly::from_i64(&[-2, 0, 0, 1]);
        let sf = splitting_field(&p).unwrap();
        assert_eq!(sf.field.degree(), 12);
        check_roots(&p, &sf);
        let real = &sf.roots[0];
        assert_eq!(real.conj().unwrap(), *real);
        assert_eq!(sf.roots[1].conj().unwrap(), sf.roots[2]);
        for r in &sf.roots {
            let a = r.approx();
            let b = r.conj().unwrap().approx();
            assert!((a.conj() - b).norm() < 1e-12);
            assert_eq!(r.conj().unwrap().conj().unwrap(), *r);
        }
    }

    #[test]
    fn factor_over_gaussian_field() {
        let sf = splitting_field(&UPoly::from_i64(&[1, 0, 1])).unwrap();
        let k = sf.field;
        let f = lift(&k, &UPoly::from_i64(&[1, 0, 1]));
        let fac = factor_over_field(&f).unwrap();
        assert_eq!(fac.len(), 2);
        let g = lift(&k, &UPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(factor_over_field(&g).unwrap().len(), 1);
    }

    #[test]
    fn over_base_field() {
        let sf = splitting_field(&UPoly::from_i64(&[1, 0, 1])).unwrap();
        let k = sf.field;
        // x^2 - 2 over Q(i)
        let f = lift(&k, &UPoly::from_i64(&[-2, 0, 1]));
        let (out, img) = splitting_field_over(&f).unwrap();
        assert_eq!(out.field.degree(), 4);
        assert_eq!(out.roots.len(), 2);
        assert_eq!(img.mul(&img).to_rational(), Some(int(-1)));
        assert!(img.approx().im > 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let p = UPoly::from_i64(&[-2, 0, 0, 0, 0, 1]);
        assert!(matches!(splitting_field_with_cap(&p, 8), Err(Error::DegreeCap { .. })));
    }
}

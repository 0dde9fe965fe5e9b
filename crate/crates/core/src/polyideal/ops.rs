use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use super::groebner::PolyIdeal;
use super::poly::{MPoly, Mono, MonoOrder, Ring};
use crate::exactnum::Field;
use crate::intlat::RelationLattice;
use crate::matalg::Matrix;
use crate::{Error, Result};

const AUX: &str = "_aux";

/// Build `ring` extended by auxiliary variables placed first, with the
/// elimination order for that block.
fn prepend_vars<F: Field>(ring: &Arc<Ring<F>>, extra: &[String]) -> Arc<Ring<F>> {
    let mut vars = extra.to_vec();
    vars.extend(ring.vars.iter().cloned());
    Ring::with_vars(&ring.ctx, vars, MonoOrder::Block(extra.len()))
}

fn lift<F: Field>(p: &MPoly<F>, big: &Arc<Ring<F>>, offset: usize) -> MPoly<F> {
    let map: Vec<usize> = (0..p.ring().nvars()).map(|i| i + offset).collect();
    p.rename(big, &map)
}

/// Keep the basis elements free of the first `k` variables of `big` and move
/// them into `target`, whose variables are the remaining ones in order.
fn project_basis<F: Field>(big: &PolyIdeal<F>, k: usize, target: &Arc<Ring<F>>) -> Result<PolyIdeal<F>> {
    let gb = big.groebner_basis()?;
    let n = big.ring().nvars();
    let map: Vec<usize> = (0..n).map(|i| i.saturating_sub(k)).collect();
    let grevlex_target = target.order == MonoOrder::Grevlex;
    let mut kept: Vec<MPoly<F>> = gb
        .iter()
        .filter(|g| g.support().iter().all(|&v| v >= k))
        .map(|g| g.rename(target, &map))
        .collect();
    if grevlex_target {
        kept.sort_by(|a, b| target.order.cmp(a.lm(), b.lm()));
        Ok(PolyIdeal::from_basis(target, kept))
    } else {
        Ok(PolyIdeal::new(target, kept))
    }
}

fn aux_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{AUX}{prefix}{i}")).collect()
}

impl<F: Field> PolyIdeal<F> {
    /// Elimination ideal, living in the ring of the kept variables (same
    /// relative order, grevlex).
    pub fn eliminate(&self, drop: &[usize]) -> Result<PolyIdeal<F>> {
        let ring = self.ring();
        let n = ring.nvars();
        let kept: Vec<usize> = (0..n).filter(|i| !drop.contains(i)).collect();
        let mut perm = vec![0usize; n];
        let mut big_vars = Vec::with_capacity(n);
        for (pos, &i) in drop.iter().chain(kept.iter()).enumerate() {
            perm[i] = pos;
            big_vars.push(ring.vars[i].clone());
        }
        let big = Ring::with_vars(&ring.ctx, big_vars, MonoOrder::Block(drop.len()));
        let gens = self.generators().iter().map(|g| g.rename(&big, &perm)).collect();
        let target = Ring::with_vars(
            &ring.ctx,
            kept.iter().map(|&i| ring.vars[i].clone()).collect(),
            MonoOrder::Grevlex,
        );
        project_basis(&PolyIdeal::new(&big, gens), drop.len(), &target)
    }

    pub fn eliminate_names(&self, drop: &[&str]) -> Result<PolyIdeal<F>> {
        let idx = drop
            .iter()
            .map(|s| {
                self.ring()
                    .var_index(s)
                    .ok_or_else(|| Error::Semantic(format!("unknown variable {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.eliminate(&idx)
    }

    /// `I : f^∞`.
    pub fn saturate(&self, f: &MPoly<F>) -> Result<PolyIdeal<F>> {
        if f.is_zero() {
            return Err(Error::Semantic("saturation by the zero polynomial".into()));
        }
        let ring = self.ring();
        let big = prepend_vars(ring, &aux_names("y", 1));
        let y = MPoly::var(&big, 0);
        let mut gens: Vec<MPoly<F>> = self.generators().iter().map(|g| lift(g, &big, 1)).collect();
        gens.push(MPoly::one(&big).sub(&y.mul(&lift(f, &big, 1))));
        let out = project_basis(&PolyIdeal::new(&big, gens), 1, &grevlex_of(ring))?;
        Ok(out.with_ring_if_needed(ring))
    }

    /// Whether `p` vanishes on `V(I)` over the algebraic closure.
    pub fn radical_contains(&self, p: &MPoly<F>) -> Result<bool> {
        if p.is_zero() {
            return Ok(true);
        }
        let ring = self.ring();
        let big = prepend_vars(ring, &aux_names("y", 1));
        let y = MPoly::var(&big, 0);
        let mut gens: Vec<MPoly<F>> = self.generators().iter().map(|g| lift(g, &big, 1)).collect();
        gens.push(MPoly::one(&big).sub(&y.mul(&lift(p, &big, 1))));
        PolyIdeal::new(&big, gens).is_unit()
    }

    /// Ideal of `cl(V(I) ∪ V(J))`, that is `I ∩ J`.
    pub fn union_closure(&self, other: &PolyIdeal<F>) -> Result<PolyIdeal<F>> {
        if self.is_unit()? {
            return Ok(other.clone());
        }
        if other.is_unit()? {
            return Ok(self.clone());
        }
        let ring = self.ring();
        let big = prepend_vars(ring, &aux_names("t", 1));
        let t = MPoly::var(&big, 0);
        let omt = MPoly::one(&big).sub(&t);
        let mut gens: Vec<MPoly<F>> = self
            .groebner_basis()?
            .iter()
            .map(|g| t.mul(&lift(g, &big, 1)))
            .collect();
        gens.extend(other.groebner_basis()?.iter().map(|g| omt.mul(&lift(g, &big, 1))));
        let out = project_basis(&PolyIdeal::new(&big, gens), 1, &grevlex_of(ring))?;
        Ok(out.with_ring_if_needed(ring))
    }

    /// Ideal of the Zariski closure of `f(V(I))`, where `f[j]` (polynomials
    /// over this ideal's ring) gives the `j`-th coordinate in `target`.
    pub fn image_closure(&self, target: &Arc<Ring<F>>, f: &[MPoly<F>]) -> Result<PolyIdeal<F>> {
        if f.len() != target.nvars() {
            return Err(Error::Shape(format!(
                "map has {} components, target ring has {} variables",
                f.len(),
                target.nvars()
            )));
        }
        let src = self.ring();
        let k = src.nvars();
        let mut vars = aux_names("s", k);
        vars.extend(target.vars.iter().cloned());
        let big = Ring::with_vars(&src.ctx, vars, MonoOrder::Block(k));
        let mut gens: Vec<MPoly<F>> = self.generators().iter().map(|g| lift(g, &big, 0)).collect();
        for (j, fj) in f.iter().enumerate() {
            gens.push(MPoly::var(&big, k + j).sub(&lift(fj, &big, 0)));
        }
        let out = project_basis(&PolyIdeal::new(&big, gens), k, &grevlex_of(target))?;
        Ok(out.with_ring_if_needed(target))
    }

    /// Ideal of `{y : p(h(y)) = 0 for p in I}` where `h[i]` (over `target`)
    /// is substituted for the `i`-th variable.
    pub fn preimage(&self, target: &Arc<Ring<F>>, h: &[MPoly<F>]) -> PolyIdeal<F> {
        PolyIdeal::new(target, self.generators().iter().map(|g| g.compose(target, h)).collect())
    }

    /// If the variety is a single point, its coordinates.
    pub fn as_point(&self) -> Result<Option<Vec<F>>> {
        let gb = self.groebner_basis()?;
        let n = self.ring().nvars();
        if gb.len() != n {
            return Ok(None);
        }
        let mut pt = vec![F::zero(&self.ring().ctx); n];
        for g in gb {
            if g.lm().deg() != 1 || g.total_degree() != 1 || g.len() > 2 {
                return Ok(None);
            }
            let i = g.lm().support().next().unwrap();
            if g.len() == 2 {
                pt[i] = g.terms()[1].1.neg();
            }
        }
        Ok(Some(pt))
    }

    /// Ideal of `cl{M·N : M ∈ V(I), N ∈ V(J)}` in `d×d` matrix coordinates
    /// `x_{ij}` stored row-major.
    pub fn product_closure(&self, other: &PolyIdeal<F>) -> Result<PolyIdeal<F>> {
        let ring = self.ring();
        let n = ring.nvars();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || other.ring().nvars() != n {
            return Err(Error::Shape("product closure needs d×d matrix coordinates".into()));
        }
        if let Some(c) = self.as_point()? {
            if let Some(inv) = point_matrix(ring, &c, d)?.inverse() {
                // M = C N, so N = C^{-1} Z.
                let h = linear_images(ring, &inv, d, true);
                return Ok(other.preimage(ring, &h));
            }
        }
        if let Some(c) = other.as_point()? {
            if let Some(inv) = point_matrix(ring, &c, d)?.inverse() {
                let h = linear_images(ring, &inv, d, false);
                return Ok(self.preimage(ring, &h));
            }
        }
        let mut vars = aux_names("a", n);
        vars.extend(aux_names("b", n));
        vars.extend(ring.vars.iter().cloned());
        let big = Ring::with_vars(&ring.ctx, vars, MonoOrder::Block(2 * n));
        let mut gens: Vec<MPoly<F>> = self.generators().iter().map(|g| lift(g, &big, 0)).collect();
        gens.extend(other.generators().iter().map(|g| lift(g, &big, n)));
        for i in 0..d {
            for j in 0..d {
                let mut z = MPoly::var(&big, 2 * n + i * d + j);
                for k in 0..d {
                    z = z.sub(&MPoly::var(&big, i * d + k).mul(&MPoly::var(&big, n + k * d + j)));
                }
                gens.push(z);
            }
        }
        let out = project_basis(&PolyIdeal::new(&big, gens), 2 * n, &grevlex_of(ring))?;
        Ok(out.with_ring_if_needed(ring))
    }

    /// Krull dimension of `V(I)`; `-1` when the variety is empty.
    pub fn dimension(&self) -> Result<i64> {
        let gb = self.groebner_basis()?;
        if gb.iter().any(|g| g.is_constant()) {
            return Ok(-1);
        }
        let n = self.ring().nvars();
        let lms: Vec<Vec<usize>> = gb.iter().map(|g| g.lm().support().collect()).collect();
        let mut best = 0usize;
        let mut chosen = vec![false; n];
        independent_search(0, n, &lms, &mut chosen, 0, &mut best);
        Ok(best as i64)
    }

    /// Generators cutting out `V(I) ∩ R^n`: real and imaginary parts of each
    /// basis element, coefficient by coefficient.
    pub fn real_restrict(&self) -> Result<PolyIdeal<F>> {
        let ring = self.ring();
        let mut gens = Vec::new();
        for g in self.groebner_basis()? {
            let mut re = Vec::new();
            let mut im = Vec::new();
            for (m, c) in g.terms() {
                let (a, b) = c.re_im()?;
                re.push((m.clone(), a));
                im.push((m.clone(), b));
            }
            gens.push(MPoly::from_terms(ring, re));
            gens.push(MPoly::from_terms(ring, im));
        }
        Ok(PolyIdeal::new(ring, gens))
    }

    fn with_ring_if_needed(self, ring: &Arc<Ring<F>>) -> PolyIdeal<F> {
        if ring.order == MonoOrder::Grevlex && Arc::ptr_eq(self.ring(), ring) {
            self
        } else if ring.order == MonoOrder::Grevlex {
            let basis = self.groebner_basis().map(|b| b.to_vec()).ok();
            match basis {
                Some(b) => PolyIdeal::from_basis(ring, b.iter().map(|g| g.reorder(ring)).collect()),
                None => self.with_ring(ring),
            }
        } else {
            self.with_ring(ring)
        }
    }
}

fn grevlex_of<F: Field>(ring: &Arc<Ring<F>>) -> Arc<Ring<F>> {
    if ring.order == MonoOrder::Grevlex {
        ring.clone()
    } else {
        Ring::with_vars(&ring.ctx, ring.vars.clone(), MonoOrder::Grevlex)
    }
}

fn point_matrix<F: Field>(ring: &Arc<Ring<F>>, c: &[F], d: usize) -> Result<Matrix<F>> {
    Matrix::from_rows(&ring.ctx, c.chunks(d).map(|r| r.to_vec()).collect())
}

/// Entries of `inv · Z` (`left`) or `Z · inv` as polynomials in the matrix
/// coordinates `Z`.
fn linear_images<F: Field>(ring: &Arc<Ring<F>>, inv: &Matrix<F>, d: usize, left: bool) -> Vec<MPoly<F>> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut terms = Vec::new();
            for k in 0..d {
                let (coef, var) = if left {
                    (inv[(i, k)].clone(), k * d + j)
                } else {
                    (inv[(k, j)].clone(), i * d + k)
                };
                terms.push((Mono::var(d * d, var, 1), coef));
            }
            out.push(MPoly::from_terms(ring, terms));
        }
    }
    out
}

fn independent_search(from: usize, n: usize, lms: &[Vec<usize>], chosen: &mut [bool], size: usize, best: &mut usize) {
    if size > *best {
        *best = size;
    }
    if size + (n - from) <= *best {
        return;
    }
    for v in from..n {
        if size + (n - v) <= *best {
            return;
        }
        chosen[v] = true;
        let ok = lms.iter().all(|s| !s.iter().all(|&x| chosen[x]));
        if ok {
            independent_search(v + 1, n, lms, chosen, size + 1, best);
        }
        chosen[v] = false;
    }
}

/// The lattice ideal `⟨z^a − z^b : a − b ∈ L⟩` in `ring` (one variable per
/// lattice coordinate).
pub fn lattice_ideal<F: Field>(ring: &Arc<Ring<F>>, lattice: &RelationLattice) -> Result<PolyIdeal<F>> {
    let n = ring.nvars();
    if lattice.ambient_dim != n {
        return Err(Error::Shape(format!(
            "lattice in Z^{} but ring has {} variables",
            lattice.ambient_dim, n
        )));
    }
    if lattice.rank() == 0 {
        return Ok(PolyIdeal::zero(ring));
    }
    let gens: Vec<MPoly<F>> = lattice.basis.iter().map(|v| binomial(ring, v)).collect();
    let prod = (0..n).fold(MPoly::one(ring), |acc, i| acc.mul(&MPoly::var(ring, i)));
    PolyIdeal::new(ring, gens).saturate(&prod)
}

/// `z^{v+} − z^{v−}`.
pub fn binomial<F: Field>(ring: &Arc<Ring<F>>, v: &[BigInt]) -> MPoly<F> {
    let n = ring.nvars();
    let mut pos = vec![0u16; n];
    let mut neg = vec![0u16; n];
    for (i, x) in v.iter().enumerate() {
        let e = u16::try_from(x.abs()).expect("lattice exponent fits in u16");
        if x.is_positive() {
            pos[i] = e;
        } else {
            neg[i] = e;
        }
    }
    let one = F::one(&ring.ctx);
    MPoly::from_terms(ring, vec![(Mono::new(pos), one.clone()), (Mono::new(neg), one.neg())])
}

/// Ideal of the single point `p`.
pub fn point_ideal<F: Field>(ring: &Arc<Ring<F>>, p: &[F]) -> PolyIdeal<F> {
    PolyIdeal::new(
        ring,
        p.iter()
            .enumerate()
            .map(|(i, c)| MPoly::var(ring, i).sub(&MPoly::constant(ring, c.clone())))
            .collect(),
    )
}

/// Ideal of the identity matrix in `d×d` coordinates.
pub fn identity_ideal<F: Field>(ring: &Arc<Ring<F>>, d: usize) -> PolyIdeal<F> {
    let p: Vec<F> = (0..d * d)
        .map(|k| {
            if k / d == k % d {
                F::one(&ring.ctx)
            } else {
                F::zero(&ring.ctx)
            }
        })
        .collect();
    point_ideal(ring, &p)
}

/// Matrix-coordinate ring `x_i_j` (1-based, row-major).
pub fn matrix_ring<F: Field>(ctx: &F::Ctx, d: usize) -> Arc<Ring<F>> {
    let vars = (0..d * d).map(|k| format!("x_{}_{}", k / d + 1, k % d + 1)).collect();
    Ring::with_vars(ctx, vars, MonoOrder::Grevlex)
}

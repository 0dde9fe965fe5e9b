use std::sync::atomic::{AtomicUsize, Ordering as AtOrd};
use std::sync::{Arc, OnceLock};

use super::poly::{MPoly, Mono, Ring};
use crate::exactnum::Field;
use crate::{Error, Result};

const DEFAULT_STEP_BUDGET: usize = 20_000_000;

static STEP_BUDGET: AtomicUsize = AtomicUsize::new(0);

/// Maximum number of reduction steps a single Gröbner computation may take.
/// `HYINV_STEP_BUDGET` overrides the default unless [`set_step_budget`] was
/// called.
pub fn step_budget() -> usize {
    let v = STEP_BUDGET.load(AtOrd::Relaxed);
    if v != 0 {
        return v;
    }
    static FROM_ENV: OnceLock<usize> = OnceLock::new();
    *FROM_ENV.get_or_init(|| {
        std::env::var("HYINV_STEP_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_STEP_BUDGET)
    })
}

pub fn set_step_budget(n: usize) {
    STEP_BUDGET.store(n, AtOrd::Relaxed);
}

pub(crate) struct Budget {
    left: usize,
    cap: usize,
}

impl Budget {
    fn new() -> Budget {
        Budget::with_cap(step_budget())
    }

    fn with_cap(cap: usize) -> Budget {
        Budget { left: cap, cap }
    }

    fn tick(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::StepBudget(self.cap));
        }
        self.left -= 1;
        Ok(())
    }
}

/// Full normal form of `p` modulo `basis` (leading coefficients need not be
/// monic).
fn normal_form<F: Field>(p: &MPoly<F>, basis: &[&MPoly<F>], budget: &mut Budget) -> Result<MPoly<F>> {
    let ring = p.ring().clone();
    let mut rest = p.clone();
    let mut done: Vec<(Mono, F)> = Vec::new();
    while !rest.is_zero() {
        budget.tick()?;
        let (m, c) = rest.terms()[0].clone();
        let red = basis.iter().find(|g| g.lm().divides(&m));
        match red {
            Some(g) => {
                let q = m.div(g.lm());
                let f = c.div(g.lc());
                let tail = MPoly::from_sorted(&ring, g.terms()[1..].to_vec());
                let rest_tail = MPoly::from_sorted(&ring, rest.terms()[1..].to_vec());
                rest = rest_tail.sub(&tail.mul_term(&q, &f));
            }
            None => {
                done.push((m, c));
                rest = MPoly::from_sorted(&ring, rest.terms()[1..].to_vec());
            }
        }
    }
    Ok(MPoly::from_sorted(&ring, done))
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

/// Reduced Gröbner basis: monic, sorted ascending by leading monomial.
pub(crate) fn reduced_groebner<F: Field>(
    ring: &Arc<Ring<F>>,
    gens: &[MPoly<F>],
    mut budget: Budget,
) -> Result<Vec<MPoly<F>>> {
    let ord = ring.order;
    let mut polys: Vec<MPoly<F>> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut input: Vec<MPoly<F>> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    input.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));
    for g in input {
        let refs: Vec<&MPoly<F>> = active.iter().map(|&k| &polys[k]).collect();
        let h = normal_form(&g, &refs, &mut budget)?;
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(vec![MPoly::one(ring)]);
        }
        update(&mut polys, &mut active, &mut pairs, h.monic());
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| ord.cmp(&pairs[a].lcm, &pairs[b].lcm))
            .unwrap();
        let Pair { i, j, lcm } = pairs.swap_remove(best);
        let (gi, gj) = (&polys[i], &polys[j]);
        let s = gi
            .mul_term(&lcm.div(gi.lm()), &F::one(&ring.ctx))
            .sub(&gj.mul_term(&lcm.div(gj.lm()), &F::one(&ring.ctx)));
        let refs: Vec<&MPoly<F>> = active.iter().map(|&k| &polys[k]).collect();
        let h = normal_form(&s, &refs, &mut budget)?;
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(vec![MPoly::one(ring)]);
        }
        update(&mut polys, &mut active, &mut pairs, h.monic());
    }

    let mut out = Vec::with_capacity(active.len());
    for (pos, &k) in active.iter().enumerate() {
        let others: Vec<&MPoly<F>> = active
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != pos)
            .map(|(_, &k2)| &polys[k2])
            .collect();
        let g = &polys[k];
        let lead = MPoly::from_sorted(ring, vec![g.terms()[0].clone()]);
        let tail = MPoly::from_sorted(ring, g.terms()[1..].to_vec());
        out.push(lead.add(&normal_form(&tail, &others, &mut budget)?).monic());
    }
    out.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));
    Ok(out)
}

/// Gebauer–Möller installation of a new basis element.
fn update<F: Field>(polys: &mut Vec<MPoly<F>>, active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: MPoly<F>) {
    let hk = polys.len();
    let hl = h.lm().clone();
    let mut c: Vec<(usize, Mono)> = active.iter().map(|&g| (g, hl.lcm(polys[g].lm()))).collect();

    // Chain criterion among the new pairs.
    let mut d: Vec<(usize, Mono)> = Vec::new();
    while let Some((g1, l1)) = c.pop() {
        let coprime = hl.coprime(polys[g1].lm());
        if coprime || (!c.iter().any(|(_, l2)| l2.divides(&l1)) && !d.iter().any(|(_, l2)| l2.divides(&l1))) {
            d.push((g1, l1));
        }
    }
    // Product criterion.
    let e: Vec<(usize, Mono)> = d.into_iter().filter(|(g, _)| !hl.coprime(polys[*g].lm())).collect();

    // Chain criterion on the old pairs.
    pairs.retain(|p| !(hl.divides(&p.lcm) && hl.lcm(polys[p.i].lm()) != p.lcm && hl.lcm(polys[p.j].lm()) != p.lcm));
    pairs.extend(e.into_iter().map(|(g, lcm)| Pair { i: g, j: hk, lcm }));

    active.retain(|&g| !hl.divides(polys[g].lm()));
    active.push(hk);
    polys.push(h);
}

/// Ideal given by generators in a ring; the reduced Gröbner basis is
/// computed lazily and cached.
pub struct PolyIdeal<F: Field> {
    ring: Arc<Ring<F>>,
    gens: Vec<MPoly<F>>,
    gb: OnceLock<Vec<MPoly<F>>>,
}

impl<F: Field> Clone for PolyIdeal<F> {
    fn clone(&self) -> Self {
        let gb = OnceLock::new();
        if let Some(b) = self.gb.get() {
            let _ = gb.set(b.clone());
        }
        PolyIdeal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            gb,
        }
    }
}

impl<F: Field> std::fmt::Debug for PolyIdeal<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let shown = self.gb.get().unwrap_or(&self.gens);
        f.debug_list().entries(shown.iter().map(|p| p.to_string())).finish()
    }
}

impl<F: Field> PolyIdeal<F> {
    pub fn new(ring: &Arc<Ring<F>>, gens: Vec<MPoly<F>>) -> Self {
        PolyIdeal {
            ring: ring.clone(),
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
            gb: OnceLock::new(),
        }
    }

    pub fn zero(ring: &Arc<Ring<F>>) -> Self {
        let gb = OnceLock::new();
        let _ = gb.set(Vec::new());
        PolyIdeal {
            ring: ring.clone(),
            gens: Vec::new(),
            gb,
        }
    }

    pub fn unit(ring: &Arc<Ring<F>>) -> Self {
        Self::new(ring, vec![MPoly::one(ring)])
    }

    pub(crate) fn from_basis(ring: &Arc<Ring<F>>, basis: Vec<MPoly<F>>) -> Self {
        let gb = OnceLock::new();
        let _ = gb.set(basis.clone());
        PolyIdeal {
            ring: ring.clone(),
            gens: basis,
            gb,
        }
    }

    pub fn ring(&self) -> &Arc<Ring<F>> {
        &self.ring
    }

    pub fn generators(&self) -> &[MPoly<F>] {
        &self.gens
    }

    /// Reduced Gröbner basis in the ring's order.
    pub fn groebner_basis(&self) -> Result<&[MPoly<F>]> {
        if let Some(b) = self.gb.get() {
            return Ok(b);
        }
        let b = reduced_groebner(&self.ring, &self.gens, Budget::new())?;
        Ok(self.gb.get_or_init(|| b))
    }

    /// Reduced Gröbner basis under an explicit step cap, bypassing the cache.
    pub fn groebner_basis_with_budget(&self, cap: usize) -> Result<Vec<MPoly<F>>> {
        reduced_groebner(&self.ring, &self.gens, Budget::with_cap(cap))
    }

    /// Normal form modulo the ideal.
    pub fn reduce(&self, p: &MPoly<F>) -> Result<MPoly<F>> {
        let gb = self.groebner_basis()?;
        let refs: Vec<&MPoly<F>> = gb.iter().collect();
        normal_form(p, &refs, &mut Budget::new())
    }

    pub fn contains(&self, p: &MPoly<F>) -> Result<bool> {
        Ok(self.reduce(p)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.iter().any(|g| g.is_constant()))
    }

    pub fn is_zero_ideal(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.is_empty())
    }

    /// Ideal equality through the canonical basis.
    pub fn same_ideal(&self, other: &Self) -> Result<bool> {
        Ok(self.groebner_basis()? == other.groebner_basis()?)
    }

    pub fn contains_ideal(&self, other: &Self) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same ideal viewed in a ring with the same variables and a different
    /// order.
    pub fn with_ring(&self, ring: &Arc<Ring<F>>) -> Self {
        Self::new(ring, self.gens.iter().map(|g| g.reorder(ring)).collect())
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Self::new(&self.ring, gens)
    }
}

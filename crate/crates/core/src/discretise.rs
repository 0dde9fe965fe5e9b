//! Replace each continuous flow by one algebraic matrix whose cyclic group
//! has the same Zariski closure as the flow.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exactnum::{rational_coordinates, Field, NfElem, NumberField, Rational};
use crate::flowclosure::{
    conjugate_ideal, group_param_with_unipotent, nilpotent_flow_closure, one_param_closure, GroupParam,
};
use crate::hybrid::{Edge, HybridAutomaton, Mode};
use crate::intlat::{integer_rows, relation_lattice_multiplicative, smith_normal_form};
use crate::matalg::{jordan_decomposition, nilpotent_exp_at_one, Jordan, Matrix};
use crate::polyideal::{lattice_ideal, matrix_ring, MPoly, MonoOrder, PolyIdeal, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct DiscretisationCertificate {
    pub a: Matrix<NfElem>,
    pub b: Matrix<NfElem>,
    pub flow_ideal: PolyIdeal<NfElem>,
    pub cyclic_ideal: PolyIdeal<NfElem>,
}

fn first_primes(n: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if (2..c).take_while(|p| p * p <= c).all(|p| c % p != 0) {
            out.push(c.into());
        }
        c += 1;
    }
    out
}

fn pow_rat(base: &BigInt, e: &BigInt) -> Rational {
    let k: u32 = e.abs().try_into().expect("prime exponent fits in u32");
    let p = Rational::from_integer(num_traits::pow(base.clone(), k as usize));
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

/// Positive rationals `λ` with the same integer relations as the additive
/// relations of `a`: `Σ n_i a_i = 0 ⇔ Π λ_i^{n_i} = 1`.
pub fn synth_multiplicative(a: &[NfElem]) -> Vec<Rational> {
    let d = a.len();
    if d == 0 {
        return Vec::new();
    }
    let m = integer_rows(&rational_coordinates(a));
    let (_, b, mut q) = smith_normal_form(&m);
    let rank = (0..m.len().min(d)).filter(|&i| !b[i][i].is_zero()).count();
    for row in q.iter_mut().take(rank) {
        if row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let mu = first_primes(rank);
    (0..d)
        .map(|i| (0..rank).fold(<Rational as One>::one(), |acc, j| acc * pow_rat(&mu[j], &q[j][i])))
        .collect()
}

/// `B = P (D' e^N) P^{-1}` with `D'` from [`synth_multiplicative`], and the
/// exact certificate `cl⟨B⟩ = cl{e^{At}}`.
pub fn discretise_matrix(a: &Matrix<NfElem>) -> Result<(Matrix<NfElem>, DiscretisationCertificate)> {
    let k = a.ctx().clone();
    let j = jordan_decomposition(a)?;
    let lambda = synth_multiplicative(&j.eigenvalues);
    let dp: Vec<NfElem> = lambda.iter().map(|q| NfElem::from_rat(&k, q)).collect();
    let core = Matrix::diag(&k, &dp).mul(&nilpotent_exp_at_one(&j.n)?);
    let b = j.p.mul(&core).mul(&j.p_inv);
    let flow_ideal = one_param_closure(a)?.ideal;
    let cyclic_ideal = cyclic_group_closure(&b)?;
    if !flow_ideal.same_ideal(&cyclic_ideal)? {
        return Err(Error::Internal(
            "discretisation certificate failed: cl<B> differs from the flow closure".into(),
        ));
    }
    Ok((
        b.clone(),
        DiscretisationCertificate {
            a: a.clone(),
            b,
            flow_ideal,
            cyclic_ideal,
        },
    ))
}

/// Semisimple part as rationals and the logarithm of the unipotent part:
/// `B = P D (I + D^{-1} N) P^{-1}`, `L = log(I + D^{-1} N)`.
fn cyclic_parts(b: &Matrix<NfElem>) -> Result<(Jordan<NfElem>, Vec<Rational>, Matrix<NfElem>)> {
    let k = b.ctx().clone();
    let j = jordan_decomposition(b)?;
    let mut mu = Vec::with_capacity(j.eigenvalues.len());
    for e in &j.eigenvalues {
        match e.to_rational() {
            Some(q) if !Zero::is_zero(&q) => mu.push(q),
            Some(_) => {
                return Err(Error::UnsupportedEigenvalueField(
                    "singular matrix has no cyclic group".into(),
                ))
            }
            None => {
                return Err(Error::UnsupportedEigenvalueField(format!(
                    "eigenvalue {} is not rational",
                    e.coeff_string()
                )))
            }
        }
    }
    let dinv = Matrix::diag(
        &k,
        &mu.iter().map(|q| NfElem::from_rat(&k, &q.recip())).collect::<Vec<_>>(),
    );
    let m = dinv.mul(&j.n);
    let d = b.rows();
    let mut log = Matrix::zeros(&k, d, d);
    let mut pw = m.clone();
    for e in 1..d.max(1) {
        if pw.is_zero() {
            break;
        }
        let sign: i64 = if e % 2 == 1 { 1 } else { -1 };
        let c = Rational::new(sign.into(), (e as i64).into());
        log = log.add(&pw.scale(&NfElem::from_rat(&k, &c)));
        pw = pw.mul(&m);
    }
    Ok((j, mu, log))
}

/// `cl{B^k : k >= 0}` for `B` with rational eigenvalues.
pub fn cyclic_group_closure(b: &Matrix<NfElem>) -> Result<PolyIdeal<NfElem>> {
    let k = b.ctx().clone();
    let d = b.rows();
    let (j, mu, log) = cyclic_parts(b)?;
    let ring = matrix_ring::<NfElem>(&k, d);
    let zring = Ring::with_vars(
        &k,
        (0..d).map(|i| ring.vars[i * d + i].clone()).collect(),
        MonoOrder::Grevlex,
    );
    let tor = lattice_ideal(&zring, &relation_lattice_multiplicative(&mu))?;
    let diag_map: Vec<usize> = (0..d).map(|i| i * d + i).collect();
    let mut gens: Vec<MPoly<NfElem>> = tor
        .groebner_basis()?
        .iter()
        .map(|g| g.rename(&ring, &diag_map))
        .collect();
    for r in 0..d {
        for c in 0..d {
            if r != c {
                gens.push(MPoly::var(&ring, r * d + c));
            }
        }
    }
    let torus = PolyIdeal::new(&ring, gens);
    let line = nilpotent_flow_closure(&log)?.ideal;
    let prod = torus.product_closure(&line)?;
    let conj = conjugate_ideal(&prod, &j.p, &j.p_inv);
    Ok(PolyIdeal::new(&ring, conj.groebner_basis()?.to_vec()))
}

/// Parametrisation of `cl⟨B⟩` when that group is connected (all eigenvalues
/// positive rationals); `None` otherwise.
pub fn cyclic_group_param(b: &Matrix<NfElem>) -> Result<Option<GroupParam>> {
    let k: Arc<NumberField> = b.ctx().clone();
    let (j, mu, log) = match cyclic_parts(b) {
        Ok(x) => x,
        Err(Error::UnsupportedEigenvalueField(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if mu.iter().any(|q| q.is_negative()) {
        return Ok(None);
    }
    let lat = relation_lattice_multiplicative(&mu);
    Ok(Some(group_param_with_unipotent(&k, &j, &lat, Some(&log))?))
}

/// `cl{e^{At}} = cl⟨B⟩` for the discretised `B`.
pub fn time_discretisation_check(a: &Matrix<NfElem>) -> Result<bool> {
    match discretise_matrix(a) {
        Ok((_, c)) => c.flow_ideal.same_ideal(&c.cyclic_ideal),
        Err(Error::Internal(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Zero every flow and add the discretised matrix as a self-loop wherever
/// the flow was nonzero.
pub fn discretise_automaton(h: &HybridAutomaton) -> Result<(HybridAutomaton, Vec<Option<DiscretisationCertificate>>)> {
    let certs: Vec<Option<(Matrix<NfElem>, DiscretisationCertificate)>> = h
        .locations
        .par_iter()
        .map(|l| {
            if l.flow.is_zero() {
                Ok(None)
            } else {
                discretise_matrix(&l.flow).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let mut out = h.clone();
    out.edges = h.effective_edges();
    out.mode = Mode::Affine;
    for (q, (loc, c)) in out.locations.iter_mut().zip(&certs).enumerate() {
        loc.flow = Matrix::zeros(&h.field, h.dim, h.dim);
        if let Some((b, _)) = c {
            out.edges.push(Edge {
                from: q,
                to: q,
                reset: b.clone(),
            });
        }
    }
    Ok((out, certs.into_iter().map(|c| c.map(|x| x.1)).collect()))
}

//! Radicals of ideals: exact for one variable, monomial ideals and
//! zero-dimensional contractions (squarefree eliminants), bounded otherwise.

use num_traits::{One, Zero};

use crate::algebra::{Elem, LocAlgebra};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::groebner::{groebner_basis, is_unit_basis};
use crate::poly::{MonomialOrder, Poly, PolyRing};

pub const DEFAULT_RADICAL_BOUND: u32 = 12;

/// Dense univariate polynomial, lowest coefficient first.
type Uni = Vec<Scalar>;

fn trim(mut p: Uni) -> Uni {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn deriv(f: Field, p: &Uni) -> Uni {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| f.mul(c, &f.from_i64(i as i64))).collect())
}

fn divrem(f: Field, a: &Uni, b: &Uni) -> (Uni, Uni) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lc_inv = f.inv(b.last().unwrap()).unwrap();
    if r.len() < b.len() {
        return (vec![], trim(r));
    }
    let mut q = vec![Scalar::zero(); r.len() - db];
    while r.len() >= b.len() {
        let c = f.mul(r.last().unwrap(), &lc_inv);
        let shift = r.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bc));
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(f: Field, p: Uni) -> Uni {
    match p.last() {
        Some(lc) => {
            let inv = f.inv(lc).unwrap();
            p.iter().map(|c| f.mul(c, &inv)).collect()
        }
        None => p,
    }
}

fn gcd(f: Field, a: &Uni, b: &Uni) -> Uni {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divrem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, a)
}

/// Product of the distinct irreducible factors (over a perfect field).
fn squarefree(f: Field, p: &Uni) -> Uni {
    let p = monic(f, trim(p.clone()));
    if p.len() <= 2 {
        return p;
    }
    let d = deriv(f, &p);
    if d.is_empty() {
        // p = q(x^c) in characteristic c; Frobenius is the identity on 𝔽_c
        let c = f.characteristic() as usize;
        let q: Uni = p.iter().step_by(c).cloned().collect();
        return squarefree(f, &q);
    }
    let g = gcd(f, &p, &d);
    let a = divrem(f, &p, &g).0;
    // factors of g not in a have multiplicity divisible by the characteristic
    let mut h = g;
    loop {
        let c = gcd(f, &h, &a);
        if c.len() <= 1 {
            break;
        }
        h = divrem(f, &h, &c).0;
    }
    if h.len() <= 1 {
        return monic(f, a);
    }
    let rest = squarefree(f, &h);
    monic(f, mul(f, &a, &rest))
}

fn mul(f: Field, a: &Uni, b: &Uni) -> Uni {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(out)
}

impl LocAlgebra {
    /// Generator of `(J + gens) ∩ k[x_i]` in the presentation ring, as a
    /// dense univariate polynomial (`None` if the contraction is zero).
    fn eliminant(&self, gens: &[Elem], i: usize) -> Option<Uni> {
        let np = self.npvars();
        let ring = PolyRing::with_order(self.field(), np, MonomialOrder::Blocks(vec![np - 1, 1]));
        let map: Vec<usize> = (0..np).map(|j| if j == i { np - 1 } else if j < i { j } else { j - 1 }).collect();
        let mut all: Vec<Poly> = self.gb().iter().map(|g| ring.embed(g, &map)).collect();
        all.extend(gens.iter().map(|g| ring.embed(g, &map)));
        let gb = groebner_basis(&ring, &all);
        gb.iter()
            .filter(|g| g.terms.iter().all(|(e, _)| e[..np - 1].iter().all(|&d| d == 0)))
            .min_by_key(|g| g.lead().unwrap().0[np - 1])
            .map(|g| {
                let deg = g.lead().unwrap().0[np - 1] as usize;
                let mut u = vec![Scalar::zero(); deg + 1];
                for (e, c) in &g.terms {
                    u[e[np - 1] as usize] = c.clone();
                }
                u
            })
    }

    fn uni_to_elem(&self, u: &Uni, i: usize) -> Elem {
        let r = self.ring();
        let mut acc = r.zero();
        for (k, c) in u.iter().enumerate() {
            if !c.is_zero() {
                acc = r.add(&acc, &r.scale(&r.pow(&r.var(i), k as u32), c));
            }
        }
        self.nf(&acc)
    }

    /// Generators of `rad(gens)`.
    ///
    /// Uses `rad(I) = rad(I ∩ k[x])·A`. Exact when there is one variable,
    /// when the ideal is monomial in a polynomial ring, or when every
    /// variable has a nonzero eliminant (then adjoining squarefree parts
    /// yields the radical); eliminants of degree above `bound`, and all
    /// remaining cases, give `DegreeBoundExceeded`.
    pub fn radical(&self, gens: &[Elem], bound: u32) -> Result<Vec<Elem>> {
        let gens: Vec<Elem> = gens.iter().map(|g| self.nf(g)).filter(|g| !g.is_zero()).collect();
        if self.is_zero_ring() || is_unit_basis(&self.ideal_gb(&gens)) {
            return Ok(vec![self.one()]);
        }
        if self.relations().is_empty()
            && self.ninv() == 0
            && gens.iter().all(|g| g.terms.len() == 1)
        {
            let r = self.ring();
            let mut out: Vec<Elem> = gens
                .iter()
                .map(|g| {
                    let e: Vec<u32> = g.terms[0].0.iter().map(|&d| d.min(1)).collect();
                    r.monomial(e, Scalar::one())
                })
                .collect();
            out.sort_by(|a, b| a.terms.cmp(&b.terms));
            out.dedup();
            return Ok(out);
        }
        let mut extra = Vec::new();
        let mut zero_dim = true;
        for i in 0..self.nvars() {
            match self.eliminant(&gens, i) {
                Some(u) => {
                    if u.len() - 1 > bound as usize {
                        return Err(Error::DegreeBoundExceeded(bound));
                    }
                    extra.push(self.uni_to_elem(&squarefree(self.field(), &u), i));
                }
                None => zero_dim = false,
            }
        }
        if zero_dim || self.nvars() <= 1 {
            let mut out = gens.clone();
            for e in extra {
                if !self.ideal_contains(&out, &e) || out.is_empty() {
                    out.push(e);
                }
            }
            return Ok(out);
        }
        Err(Error::DegreeBoundExceeded(bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Uni {
        v.iter().map(|&c| Scalar::from_integer(c.into())).collect()
    }

    #[test]
    fn squarefree_parts() {
        let f = Field::Rationals;
        // x^2 (x - 1) -> x (x - 1)
        assert_eq!(squarefree(f, &q(&[0, 0, -1, 1])), q(&[0, -1, 1]));
        let f5 = Field::prime(5).unwrap();
        // x^5 (x - 1) over 𝔽_5 -> x (x - 1)
        let p = f5.reduce(Scalar::from_integer((-1).into()));
        let mut v = vec![Scalar::zero(); 7];
        v[5] = p;
        v[6] = Scalar::one();
        assert_eq!(squarefree(f5, &v), vec![Scalar::zero(), f5.reduce(Scalar::from_integer((-1).into())), Scalar::one()]);
    }

    #[test]
    fn radicals() {
        let a = LocAlgebra::polynomial(Field::Rationals, &["x"]);
        let r = a.radical(&[a.parse("x^2*(x-1)").unwrap()], 12).unwrap();
        assert!(a.ideal_contains(&r, &a.parse("x*(x-1)").unwrap()));
        assert!(!a.ideal_contains(&r, &a.parse("x").unwrap()));
        let b = LocAlgebra::polynomial(Field::Rationals, &["x", "y"]);
        let r = b.radical(&[b.parse("x^2*y^3").unwrap()], 12).unwrap();
        assert!(b.ideal_contains(&r, &b.parse("x*y").unwrap()));
        let r = b.radical(&[b.parse("x^2").unwrap(), b.parse("y^3 - y^2").unwrap()], 12).unwrap();
        assert!(b.ideal_contains(&r, &b.parse("x").unwrap()));
        assert!(b.ideal_contains(&r, &b.parse("y*(y-1)").unwrap()));
        assert!(matches!(b.radical(&[b.parse("x^2 + y^3").unwrap()], 12), Err(Error::DegreeBoundExceeded(12))));
        assert!(matches!(a.radical(&[a.parse("(x-1)^13").unwrap()], 12), Err(Error::DegreeBoundExceeded(12))));
    }
}

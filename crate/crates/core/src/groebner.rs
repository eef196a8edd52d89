//! Buchberger's algorithm for submodules of `P^r` (ideals are the case r = 1).

use std::collections::{BTreeSet, HashSet};

use crate::poly::{divides, exp_degree, exp_lcm, exp_sub, MVec, Poly, PolyRing};

/// Full normal form of `f` modulo `basis` (basis elements need not be monic).
pub fn reduce(ring: &PolyRing, f: &MVec, basis: &[MVec]) -> MVec {
    let mut p = f.clone();
    let mut rest: Vec<(usize, Vec<u32>, crate::field::Scalar)> = Vec::new();
    'outer: while let Some((pos, e, c)) = p.terms.first().cloned() {
        for g in basis {
            let (gp, ge, gc) = g.lead().expect("nonzero basis element");
            if *gp == pos && divides(ge, &e) {
                let q = ring.field.div(&c, gc).expect("nonzero lead");
                let shift = exp_sub(&e, ge);
                p = ring.vsub_mul(&p, &q, &shift, g);
                continue 'outer;
            }
        }
        rest.push(p.terms.remove(0));
    }
    MVec { terms: rest }
}

pub fn reduce_poly(ring: &PolyRing, f: &Poly, basis: &[Poly]) -> Poly {
    let mut p = f.clone();
    let mut rest = Vec::new();
    'outer: while let Some((e, c)) = p.terms.first().cloned() {
        for g in basis {
            let (ge, gc) = g.lead().expect("nonzero basis element");
            if divides(ge, &e) {
                let q = ring.field.div(&c, gc).expect("nonzero lead");
                let shift = exp_sub(&e, ge);
                let sub = ring.mul_term(g, &shift, &q);
                p = ring.sub(&p, &sub);
                continue 'outer;
            }
        }
        rest.push(p.terms.remove(0));
    }
    Poly { terms: rest }
}

fn spoly(ring: &PolyRing, f: &MVec, g: &MVec) -> MVec {
    let (_, ef, cf) = f.lead().unwrap();
    let (_, eg, cg) = g.lead().unwrap();
    let l = exp_lcm(ef, eg);
    let a = ring.field.inv(cf).unwrap();
    let b = ring.field.inv(cg).unwrap();
    let zero = MVec::default();
    let t1 = ring.vsub_mul(&zero, &ring.field.neg(&a), &exp_sub(&l, ef), f);
    ring.vsub_mul(&t1, &b, &exp_sub(&l, eg), g)
}

/// Reduced Gröbner basis (monic, sorted by decreasing leading term).
pub fn reduced_gb(ring: &PolyRing, gens: Vec<MVec>) -> Vec<MVec> {
    let mut basis: Vec<MVec> = Vec::new();
    let mut pending: BTreeSet<(u64, usize, usize)> = BTreeSet::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();
    let single_position = gens.iter().all(|g| g.terms.iter().all(|t| t.0 == 0));

    let add = |basis: &mut Vec<MVec>,
               pending: &mut BTreeSet<(u64, usize, usize)>,
               pending_set: &mut HashSet<(usize, usize)>,
               v: MVec| {
        let k = basis.len();
        let (pk, ek, _) = v.lead().unwrap().clone();
        for (i, g) in basis.iter().enumerate() {
            let (pi, ei, _) = g.lead().unwrap();
            if *pi != pk {
                continue;
            }
            let l = exp_lcm(ei, &ek);
            pending.insert((exp_degree(&l), i, k));
            pending_set.insert((i, k));
        }
        basis.push(v);
    };

    for g in gens {
        let r = reduce(ring, &ring.vnormalize(g.terms), &basis);
        if !r.is_zero() {
            add(&mut basis, &mut pending, &mut pending_set, ring.vmonic(&r));
        }
    }

    while let Some(&first) = pending.iter().next() {
        pending.remove(&first);
        let (_, i, j) = first;
        pending_set.remove(&(i, j));
        let ei = basis[i].lead().unwrap().1.clone();
        let ej = basis[j].lead().unwrap().1.clone();
        let pos = basis[i].lead().unwrap().0;
        if single_position && ei.iter().zip(&ej).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = exp_lcm(&ei, &ej);
        let skip = (0..basis.len()).any(|k| {
            if k == i || k == j {
                return false;
            }
            let (pk, ek, _) = basis[k].lead().unwrap();
            *pk == pos
                && divides(ek, &l)
                && !pending_set.contains(&(i.min(k), i.max(k)))
                && !pending_set.contains(&(j.min(k), j.max(k)))
        });
        if skip {
            continue;
        }
        let s = spoly(ring, &basis[i], &basis[j]);
        let r = reduce(ring, &s, &basis);
        if !r.is_zero() {
            add(&mut basis, &mut pending, &mut pending_set, ring.vmonic(&r));
        }
    }
    interreduce(ring, basis)
}

fn interreduce(ring: &PolyRing, basis: Vec<MVec>) -> Vec<MVec> {
    let mut keep: Vec<MVec> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let (pg, eg, _) = g.lead().unwrap();
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            if i == j {
                return false;
            }
            let (ph, eh, _) = h.lead().unwrap();
            ph == pg && divides(eh, eg) && (eh != eg || j < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<MVec> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone()).collect();
        let r = reduce(ring, &keep[i], &others);
        out.push(ring.vmonic(&r));
    }
    out.sort_by(|a, b| {
        let (pa, ea, _) = a.lead().unwrap();
        let (pb, eb, _) = b.lead().unwrap();
        ring.cmp_term((*pb, eb), (*pa, ea))
    });
    out
}

pub fn groebner_basis(ring: &PolyRing, gens: &[Poly]) -> Vec<Poly> {
    let vs = gens.iter().map(|p| MVec::from_poly(&ring.adopt(p.clone()), 0)).collect();
    reduced_gb(ring, vs).into_iter().map(|v| v.component(0)).collect()
}

pub fn is_unit_basis(gb: &[Poly]) -> bool {
    gb.len() == 1 && gb[0].as_constant().map(|c| c != num_traits::Zero::zero()).unwrap_or(false)
}

//! Sparse multivariate polynomials and free-module vectors over a [`Field`].
//!
//! Terms are kept sorted in decreasing order for the ring's monomial order,
//! so the leading term is always `terms[0]`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::field::{scalar_to_string, Field, Scalar};

pub type Exp = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Degree reverse lexicographic.
    Grevlex,
    Lex,
    /// Product of grevlex orders on consecutive blocks of the given sizes;
    /// eliminates earlier blocks.
    Blocks(Vec<usize>),
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Blocks(sizes) => {
                let mut start = 0;
                for &s in sizes {
                    let end = (start + s).min(a.len());
                    match grevlex(&a[start..end], &b[start..end]) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                    start = end;
                }
                if start < a.len() {
                    grevlex(&a[start..], &b[start..])
                } else {
                    Ordering::Equal
                }
            }
        }
    }
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn exp_lcm(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn exp_sub(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn exp_add(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn exp_degree(a: &[u32]) -> u64 {
    a.iter().map(|&e| e as u64).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub terms: Vec<(Exp, Scalar)>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Exp, Scalar)> {
        self.terms.first()
    }

    /// Constant term value if the polynomial is a constant (zero included).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 if self.terms[0].0.iter().all(|&e| e == 0) => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[i] > 0)
    }

    pub fn max_degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c < &Scalar::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| {
                    let n = names.get(i).cloned().unwrap_or_else(|| format!("v{i}"));
                    if d == 1 {
                        n
                    } else {
                        format!("{n}^{d}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&scalar_to_string(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&scalar_to_string(&a));
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// A polynomial ring `k[v_0..v_{n-1}]` with a fixed monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub field: Field,
    pub nvars: usize,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: Field, nvars: usize) -> PolyRing {
        PolyRing { field, nvars, order: MonomialOrder::Grevlex }
    }

    pub fn with_order(field: Field, nvars: usize, order: MonomialOrder) -> PolyRing {
        PolyRing { field, nvars, order }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.order.cmp(a, b)
    }

    pub fn zero(&self) -> Poly {
        Poly::default()
    }

    pub fn one(&self) -> Poly {
        self.constant(Scalar::one())
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        let c = self.field.reduce(c);
        if c.is_zero() {
            return Poly::default();
        }
        Poly { terms: vec![(vec![0; self.nvars], c)] }
    }

    pub fn int(&self, n: i64) -> Poly {
        self.constant(self.field.from_i64(n))
    }

    pub fn var(&self, i: usize) -> Poly {
        let mut e = vec![0; self.nvars];
        e[i] = 1;
        Poly { terms: vec![(e, Scalar::one())] }
    }

    pub fn monomial(&self, e: Exp, c: Scalar) -> Poly {
        let c = self.field.reduce(c);
        if c.is_zero() {
            return Poly::default();
        }
        Poly { terms: vec![(e, c)] }
    }

    pub fn normalize(&self, mut terms: Vec<(Exp, Scalar)>) -> Poly {
        terms.sort_by(|a, b| self.cmp(&b.0, &a.0));
        let mut out: Vec<(Exp, Scalar)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 = self.field.add(&last.1, &c);
                    continue;
                }
            }
            out.push((e, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    /// Re-sorts a polynomial coming from a ring with another order.
    pub fn adopt(&self, p: Poly) -> Poly {
        self.normalize(p.terms)
    }

    fn merge(&self, a: &Poly, b: &Poly, negate_b: bool) -> Poly {
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() && j < b.terms.len() {
            match self.cmp(&a.terms[i].0, &b.terms[j].0) {
                Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate_b { self.field.neg(&b.terms[j].1) } else { b.terms[j].1.clone() };
                    out.push((b.terms[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_b {
                        self.field.sub(&a.terms[i].1, &b.terms[j].1)
                    } else {
                        self.field.add(&a.terms[i].1, &b.terms[j].1)
                    };
                    if !c.is_zero() {
                        out.push((a.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a.terms[i..].iter().cloned());
        for t in &b.terms[j..] {
            let c = if negate_b { self.field.neg(&t.1) } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.merge(a, b, false)
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.merge(a, b, true)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { terms: a.terms.iter().map(|(e, c)| (e.clone(), self.field.neg(c))).collect() }
    }

    pub fn scale(&self, a: &Poly, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly { terms: a.terms.iter().map(|(e, d)| (e.clone(), self.field.mul(c, d))).collect() }
    }

    pub fn mul_term(&self, a: &Poly, e: &[u32], c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly { terms: a.terms.iter().map(|(f, d)| (exp_add(f, e), self.field.mul(c, d))).collect() }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::default();
        }
        if a.terms.len() == 1 {
            return self.mul_term(b, &a.terms[0].0, &a.terms[0].1);
        }
        if b.terms.len() == 1 {
            return self.mul_term(a, &b.terms[0].0, &b.terms[0].1);
        }
        let mut acc: HashMap<Exp, Scalar> = HashMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = exp_add(ea, eb);
                let c = self.field.mul(ca, cb);
                let slot = acc.entry(e).or_insert_with(Scalar::zero);
                *slot = self.field.add(slot, &c);
            }
        }
        self.normalize(acc.into_iter().collect())
    }

    pub fn pow(&self, a: &Poly, n: u32) -> Poly {
        let mut result = self.one();
        let mut base = a.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn make_monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => a.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("nonzero lead");
                self.scale(a, &inv)
            }
        }
    }

    /// Embeds `p` (from a ring with `map.len()` variables) by sending
    /// variable `i` to variable `map[i]` of this ring.
    pub fn embed(&self, p: &Poly, map: &[usize]) -> Poly {
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![0; self.nvars];
                for (i, &d) in e.iter().enumerate() {
                    f[map[i]] += d;
                }
                (f, c.clone())
            })
            .collect();
        self.normalize(terms)
    }

    /// Substitutes polynomials (from `target`) for the variables of `p`.
    pub fn substitute(&self, p: &Poly, images: &[Poly], target: &PolyRing) -> Poly {
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut acc = target.zero();
        for (e, c) in &p.terms {
            let mut term = target.constant(c.clone());
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let pw = cache.entry((i, d)).or_insert_with(|| target.pow(&images[i], d)).clone();
                term = target.mul(&term, &pw);
            }
            acc = target.add(&acc, &term);
        }
        acc
    }
}

/// Element of a free module `P^r`; terms `(position, exponent, coefficient)`
/// sorted decreasingly for position-over-term order (position 0 largest).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MVec {
    pub terms: Vec<(usize, Exp, Scalar)>,
}

impl MVec {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(usize, Exp, Scalar)> {
        self.terms.first()
    }

    pub fn from_poly(p: &Poly, pos: usize) -> MVec {
        MVec { terms: p.terms.iter().map(|(e, c)| (pos, e.clone(), c.clone())).collect() }
    }

    pub fn component(&self, pos: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.0 == pos)
                .map(|(_, e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn from_components(ring: &PolyRing, comps: &[Poly], offset: usize) -> MVec {
        let mut terms = Vec::new();
        for (k, p) in comps.iter().enumerate() {
            for (e, c) in &ring.adopt(p.clone()).terms {
                terms.push((k + offset, e.clone(), c.clone()));
            }
        }
        MVec { terms }
    }

    pub fn to_components(&self, len: usize, offset: usize) -> Vec<Poly> {
        (0..len).map(|k| self.component(k + offset)).collect()
    }
}

impl PolyRing {
    pub fn cmp_term(&self, a: (usize, &[u32]), b: (usize, &[u32])) -> Ordering {
        match b.0.cmp(&a.0) {
            Ordering::Equal => self.cmp(a.1, b.1),
            o => o,
        }
    }

    /// `f - c * x^shift * g`.
    pub fn vsub_mul(&self, f: &MVec, c: &Scalar, shift: &[u32], g: &MVec) -> MVec {
        let mut out = Vec::with_capacity(f.terms.len() + g.terms.len());
        let (mut i, mut j) = (0, 0);
        let gs: Vec<(usize, Exp, Scalar)> = g
            .terms
            .iter()
            .map(|(p, e, d)| (*p, exp_add(e, shift), self.field.mul(c, d)))
            .collect();
        while i < f.terms.len() && j < gs.len() {
            match self.cmp_term((f.terms[i].0, &f.terms[i].1), (gs[j].0, &gs[j].1)) {
                Ordering::Greater => {
                    out.push(f.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (p, e, d) = &gs[j];
                    out.push((*p, e.clone(), self.field.neg(d)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = self.field.sub(&f.terms[i].2, &gs[j].2);
                    if !v.is_zero() {
                        out.push((f.terms[i].0, f.terms[i].1.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(f.terms[i..].iter().cloned());
        for (p, e, d) in &gs[j..] {
            out.push((*p, e.clone(), self.field.neg(d)));
        }
        MVec { terms: out }
    }

    pub fn vnormalize(&self, mut terms: Vec<(usize, Exp, Scalar)>) -> MVec {
        terms.sort_by(|a, b| self.cmp_term((b.0, &b.1), (a.0, &a.1)));
        let mut out: Vec<(usize, Exp, Scalar)> = Vec::with_capacity(terms.len());
        for (p, e, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == p && last.1 == e {
                    last.2 = self.field.add(&last.2, &c);
                    continue;
                }
            }
            out.push((p, e, c));
        }
        out.retain(|t| !t.2.is_zero());
        MVec { terms: out }
    }

    pub fn vmonic(&self, v: &MVec) -> MVec {
        match v.lead() {
            None => v.clone(),
            Some((_, _, c)) => {
                let inv = self.field.inv(c).expect("nonzero lead");
                MVec { terms: v.terms.iter().map(|(p, e, d)| (*p, e.clone(), self.field.mul(&inv, d))).collect() }
            }
        }
    }

    pub fn vscale_poly(&self, v: &MVec, p: &Poly) -> MVec {
        let mut terms = Vec::new();
        for (pos, e, c) in &v.terms {
            for (f, d) in &p.terms {
                terms.push((*pos, exp_add(e, f), self.field.mul(c, d)));
            }
        }
        self.vnormalize(terms)
    }

    pub fn vadd(&self, a: &MVec, b: &MVec) -> MVec {
        let zero = vec![0; self.nvars];
        self.vsub_mul(a, &self.field.from_i64(-1), &zero, b)
    }
}

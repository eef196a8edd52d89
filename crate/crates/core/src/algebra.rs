//! Finitely presented localized algebras `k[x_1..x_n]/I` with a finite set
//! of polynomials inverted.
//!
//! An algebra is computed with as `P/J` where `P = k[x_1..x_n, t_1..t_m]`,
//! one `t_j` per inverted polynomial `s_j`, and `J = I + (t_j s_j - 1)`.
//! Elements ([`Elem`]) are polynomials of `P`; they are compared through
//! normal forms modulo a Gröbner basis of `J`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::{GradedIndex, GradedPiece};
use crate::groebner::{groebner_basis, is_unit_basis, reduce_poly};
use crate::parse::{parse_expr, Expr};
use crate::poly::{Exp, MonomialOrder, Poly, PolyRing};

/// Element of a [`LocAlgebra`], a polynomial in the presentation ring.
pub type Elem = Poly;

/// Multigrading: a weight vector in `ℤ^rank` per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grading {
    pub rank: usize,
    pub weights: Vec<Vec<i64>>,
}

impl Grading {
    pub fn new(weights: Vec<Vec<i64>>) -> Result<Grading> {
        let rank = weights.first().map(|w| w.len()).unwrap_or(0);
        if weights.iter().any(|w| w.len() != rank) {
            return Err(Error::Parse("weight vectors of different lengths".into()));
        }
        Ok(Grading { rank, weights })
    }

    pub fn zero_vec(&self) -> Vec<i64> {
        vec![0; self.rank]
    }
}

pub(crate) struct Core {
    pub ring: PolyRing,
    pub gb: Vec<Poly>,
}

pub(crate) struct Inner {
    field: Field,
    vars: Vec<String>,
    relations: Vec<Poly>,
    inverted: Vec<Poly>,
    grading: Option<Grading>,
    core: OnceLock<Core>,
    pub(crate) graded: OnceLock<std::result::Result<Arc<GradedIndex>, Error>>,
    pub(crate) basis_cache: Mutex<HashMap<Vec<i64>, Arc<GradedPiece>>>,
}

#[derive(Clone)]
pub struct LocAlgebra {
    pub(crate) inner: Arc<Inner>,
}

impl PartialEq for LocAlgebra {
    fn eq(&self, other: &LocAlgebra) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.field == other.inner.field
                && self.inner.vars == other.inner.vars
                && self.inner.relations == other.inner.relations
                && self.inner.inverted == other.inner.inverted
                && self.inner.grading == other.inner.grading)
    }
}

impl fmt::Debug for LocAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.field(), self.vars().join(","))?;
        if !self.relations().is_empty() {
            let rels: Vec<String> = self.relations().iter().map(|r| r.to_string_with(self.vars())).collect();
            write!(f, "/({})", rels.join(", "))?;
        }
        if !self.inverted().is_empty() {
            let inv: Vec<String> = self.inverted().iter().map(|r| r.to_string_with(self.vars())).collect();
            write!(f, "[1/{}]", inv.join(", 1/"))?;
        }
        Ok(())
    }
}

impl LocAlgebra {
    /// `relations` and `inverted` are polynomials in the `vars.len()` variables.
    pub fn new(
        field: Field,
        vars: Vec<String>,
        relations: Vec<Poly>,
        inverted: Vec<Poly>,
        grading: Option<Grading>,
    ) -> Result<LocAlgebra> {
        let n = vars.len();
        let base = PolyRing::new(field, n);
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Parse(format!("duplicate variable `{v}`")));
            }
        }
        let check = |p: &Poly| p.terms.iter().all(|(e, _)| e.len() == n);
        if !relations.iter().all(check) || !inverted.iter().all(check) {
            return Err(Error::Parse("polynomial over the wrong number of variables".into()));
        }
        let relations: Vec<Poly> =
            relations.into_iter().map(|p| base.adopt(p)).filter(|p| !p.is_zero()).collect();
        let mut inv: Vec<Poly> = Vec::new();
        for s in inverted {
            let s = base.adopt(s);
            if s.as_constant().map(|c| !c.is_zero()).unwrap_or(false) {
                continue;
            }
            if !inv.contains(&s) {
                inv.push(s);
            }
        }
        if let Some(g) = &grading {
            if g.weights.len() != n {
                return Err(Error::Parse(format!("{} weights given for {n} variables", g.weights.len())));
            }
            for p in relations.iter().chain(&inv) {
                if poly_degree(p, &g.weights, g.rank).is_none() && !p.is_zero() {
                    return Err(Error::UngradedModule(format!(
                        "`{}` is not homogeneous",
                        p.to_string_with(&vars)
                    )));
                }
            }
        }
        Ok(LocAlgebra {
            inner: Arc::new(Inner {
                field,
                vars,
                relations,
                inverted: inv,
                grading,
                core: OnceLock::new(),
                graded: OnceLock::new(),
                basis_cache: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn polynomial(field: Field, vars: &[&str]) -> LocAlgebra {
        LocAlgebra::new(field, vars.iter().map(|s| s.to_string()).collect(), vec![], vec![], None).unwrap()
    }

    /// The ground field as an algebra (no variables); graded of rank 0.
    pub fn ground(field: Field) -> LocAlgebra {
        LocAlgebra::new(field, vec![], vec![], vec![], Some(Grading { rank: 0, weights: vec![] })).unwrap()
    }

    /// Builds an algebra from textual relations and inverted elements.
    pub fn from_strings(
        field: Field,
        vars: &[&str],
        relations: &[&str],
        invert: &[&str],
        weights: Option<Vec<Vec<i64>>>,
    ) -> Result<LocAlgebra> {
        let poly = LocAlgebra::new(field, vars.iter().map(|s| s.to_string()).collect(), vec![], vec![], None)?;
        let rels = relations.iter().map(|s| poly.parse(s)).collect::<Result<Vec<_>>>()?;
        let inv = invert.iter().map(|s| poly.parse(s)).collect::<Result<Vec<_>>>()?;
        let grading = weights.map(Grading::new).transpose()?;
        LocAlgebra::new(field, poly.vars().to_vec(), rels, inv, grading)
    }

    pub fn field(&self) -> Field {
        self.inner.field
    }

    pub fn vars(&self) -> &[String] {
        &self.inner.vars
    }

    pub fn nvars(&self) -> usize {
        self.inner.vars.len()
    }

    pub fn ninv(&self) -> usize {
        self.inner.inverted.len()
    }

    /// Number of variables of the presentation ring.
    pub fn npvars(&self) -> usize {
        self.nvars() + self.ninv()
    }

    pub fn relations(&self) -> &[Poly] {
        &self.inner.relations
    }

    pub fn inverted(&self) -> &[Poly] {
        &self.inner.inverted
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.inner.grading.as_ref()
    }

    pub fn is_graded(&self) -> bool {
        self.inner.grading.is_some()
    }

    /// Same algebra with another (or no) grading.
    pub fn with_grading(&self, grading: Option<Grading>) -> Result<LocAlgebra> {
        LocAlgebra::new(self.field(), self.vars().to_vec(), self.relations().to_vec(), self.inverted().to_vec(), grading)
    }

    pub fn base_ring(&self) -> PolyRing {
        PolyRing::new(self.field(), self.nvars())
    }

    fn core(&self) -> &Core {
        self.inner.core.get_or_init(|| {
            let ring = PolyRing::new(self.field(), self.npvars());
            let gens = self.ideal_generators();
            let gb = groebner_basis(&ring, &gens);
            Core { ring, gb }
        })
    }

    /// Generators of `J` in the presentation ring.
    pub fn ideal_generators(&self) -> Vec<Poly> {
        let ring = PolyRing::new(self.field(), self.npvars());
        let n = self.nvars();
        let map: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Poly> = self.relations().iter().map(|r| ring.embed(r, &map)).collect();
        for (j, s) in self.inverted().iter().enumerate() {
            let se = ring.embed(s, &map);
            let ts = ring.mul(&ring.var(n + j), &se);
            gens.push(ring.sub(&ts, &ring.one()));
        }
        gens
    }

    /// The presentation ring `P` (grevlex).
    pub fn ring(&self) -> &PolyRing {
        &self.core().ring
    }

    /// Reduced Gröbner basis of `J`.
    pub fn gb(&self) -> &[Poly] {
        &self.core().gb
    }

    pub fn is_zero_ring(&self) -> bool {
        is_unit_basis(self.gb())
    }

    /// Names of the presentation-ring variables (inverse variables rendered `1/(s)`).
    pub fn pvar_names(&self) -> Vec<String> {
        let mut names = self.vars().to_vec();
        for s in self.inverted() {
            names.push(format!("1/{}", paren(&s.to_string_with(self.vars()))));
        }
        names
    }

    /// Weight vectors of all presentation variables (`t_j` gets `-deg s_j`).
    pub fn pvar_weights(&self) -> Option<Vec<Vec<i64>>> {
        let g = self.grading()?;
        let mut w = g.weights.clone();
        for s in self.inverted() {
            let d = poly_degree(s, &g.weights, g.rank)?;
            w.push(d.iter().map(|x| -x).collect());
        }
        Some(w)
    }

    // ---- elements ----

    pub fn nf(&self, e: &Elem) -> Elem {
        reduce_poly(self.ring(), &self.ring().adopt(e.clone()), self.gb())
    }

    pub fn zero(&self) -> Elem {
        Poly::default()
    }

    pub fn one(&self) -> Elem {
        self.nf(&self.ring().one())
    }

    pub fn constant(&self, c: Scalar) -> Elem {
        self.nf(&self.ring().constant(c))
    }

    pub fn int(&self, n: i64) -> Elem {
        self.constant(self.field().from_i64(n))
    }

    pub fn var(&self, i: usize) -> Elem {
        self.nf(&self.ring().var(i))
    }

    /// `1/s_j` for the j-th inverted polynomial.
    pub fn inv_var(&self, j: usize) -> Elem {
        self.nf(&self.ring().var(self.nvars() + j))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.nf(&self.ring().add(a, b))
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.nf(&self.ring().sub(a, b))
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.ring().neg(a)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.nf(&self.ring().mul(a, b))
    }

    pub fn scale(&self, a: &Elem, c: &Scalar) -> Elem {
        self.ring().scale(a, c)
    }

    pub fn pow(&self, a: &Elem, n: u32) -> Elem {
        let mut result = self.one();
        let mut base = self.nf(a);
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

    pub fn eq_elem(&self, a: &Elem, b: &Elem) -> bool {
        self.nf(&self.ring().sub(a, b)).is_zero()
    }

    pub fn is_zero_elem(&self, a: &Elem) -> bool {
        self.nf(a).is_zero()
    }

    /// Embeds a polynomial in the original variables.
    pub fn from_base(&self, p: &Poly) -> Elem {
        let map: Vec<usize> = (0..self.nvars()).collect();
        self.nf(&self.ring().embed(p, &map))
    }

    /// Writes `e = num * Π t_j^{k_j}`; returns `num` (a polynomial in the
    /// original variables) and the exponents `k`.
    pub fn clear_denominators(&self, e: &Elem) -> (Poly, Vec<u32>) {
        let n = self.nvars();
        let m = self.ninv();
        let k: Vec<u32> = (0..m).map(|j| e.max_degree_in(n + j)).collect();
        let base = self.base_ring();
        let mut num = base.zero();
        for (ex, c) in &e.terms {
            let mut t = base.monomial(ex[..n].to_vec(), c.clone());
            for j in 0..m {
                let d = k[j] - ex[n + j];
                if d > 0 {
                    t = base.mul(&t, &base.pow(&self.inverted()[j], d));
                }
            }
            num = base.add(&num, &t);
        }
        (num, k)
    }

    /// Inverse of `q` if it is a unit (the zero ring inverts everything).
    pub fn unit_inverse(&self, q: &Elem) -> Option<Elem> {
        if self.is_zero_ring() {
            return Some(self.zero());
        }
        let q = self.nf(q);
        if q.is_zero() {
            return None;
        }
        if let Some(c) = q.as_constant() {
            return Some(self.constant(self.field().inv(&c)?));
        }
        if q.terms.len() == 1 {
            if let Some(inv) = self.monomial_inverse(&q) {
                return Some(inv);
            }
        }
        // General route: adjoin z with z q = 1 and eliminate z.
        let np = self.npvars();
        let ring = PolyRing::with_order(self.field(), np + 1, MonomialOrder::Blocks(vec![1, np]));
        let shift: Vec<usize> = (1..=np).collect();
        let mut gens: Vec<Poly> = self.gb().iter().map(|g| ring.embed(g, &shift)).collect();
        let zq = ring.mul(&ring.var(0), &ring.embed(&q, &shift));
        gens.push(ring.sub(&zq, &ring.one()));
        let gb = groebner_basis(&ring, &gens);
        if is_unit_basis(&gb) {
            return None;
        }
        for g in &gb {
            let (e, _) = g.lead().unwrap();
            if e[0] == 1 && e[1..].iter().all(|&d| d == 0) {
                let rest = ring.sub(&ring.var(0), g);
                if rest.uses_var(0) {
                    continue;
                }
                let back: Poly = Poly { terms: rest.terms.iter().map(|(e, c)| (e[1..].to_vec(), c.clone())).collect() };
                return Some(self.nf(&back));
            }
        }
        None
    }

    fn monomial_inverse(&self, q: &Elem) -> Option<Elem> {
        let n = self.nvars();
        let ring = self.ring();
        let (e, c) = &q.terms[0];
        let mut inv = self.constant(self.field().inv(c)?);
        for j in 0..self.ninv() {
            if e[n + j] > 0 {
                let s = self.from_base(&self.inverted()[j]);
                inv = ring.mul(&inv, &ring.pow(&s, e[n + j]));
            }
        }
        for i in 0..n {
            if e[i] == 0 {
                continue;
            }
            // find a monomial inverted element divisible by x_i
            let (j, s) = self.inverted().iter().enumerate().find(|(_, s)| s.terms.len() == 1 && s.terms[0].0[i] > 0)?;
            let (se, sc) = &s.terms[0];
            let mut rest = se.clone();
            rest[i] -= 1;
            let mut full = vec![0u32; self.npvars()];
            full[..n].copy_from_slice(&rest);
            full[n + j] = 1;
            let one_over_xi = ring.monomial(full, sc.clone());
            inv = ring.mul(&inv, &ring.pow(&one_over_xi, e[i]));
        }
        let inv = self.nf(&inv);
        if self.eq_elem(&self.mul(&inv, q), &self.one()) {
            Some(inv)
        } else {
            None
        }
    }

    pub fn is_unit(&self, q: &Elem) -> bool {
        self.unit_inverse(q).is_some()
    }

    /// Homogeneous degree of a nonzero element, if it is homogeneous.
    pub fn degree(&self, e: &Elem) -> Option<Vec<i64>> {
        let w = self.pvar_weights()?;
        let rank = self.grading()?.rank;
        let e = self.nf(e);
        poly_degree(&e, &w, rank)
    }

    // ---- parsing & printing ----

    pub fn parse(&self, s: &str) -> Result<Elem> {
        let e = parse_expr(s)?;
        self.eval(&e).map_err(|err| match err {
            Error::Parse(m) => Error::Parse(format!("{m} (in `{s}`)")),
            other => other,
        })
    }

    pub fn eval(&self, e: &Expr) -> Result<Elem> {
        Ok(match e {
            Expr::Num(q) => self.constant(
                self.field().try_reduce(q.clone()).ok_or_else(|| Error::Parse("constant not in field".into()))?,
            ),
            Expr::Var(name) => match self.vars().iter().position(|v| v == name) {
                Some(i) => self.var(i),
                None => return Err(Error::Parse(format!("unknown variable `{name}`"))),
            },
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => self.sub(&self.eval(a)?, &self.eval(b)?),
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Neg(a) => self.neg(&self.eval(a)?),
            Expr::Div(a, b) => {
                let den = self.eval(b)?;
                let inv = self.unit_inverse(&den).ok_or_else(|| {
                    Error::Parse(format!("`{}` is not a unit", self.format(&den)))
                })?;
                self.mul(&self.eval(a)?, &inv)
            }
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                if *k >= 0 {
                    self.pow(&base, *k as u32)
                } else {
                    let inv = self.unit_inverse(&base).ok_or_else(|| {
                        Error::Parse(format!("`{}` is not a unit", self.format(&base)))
                    })?;
                    self.pow(&inv, (-*k) as u32)
                }
            }
        })
    }

    /// Renders an element as `numerator` or `(numerator)/(denominator)`.
    pub fn format(&self, e: &Elem) -> String {
        let e = self.nf(e);
        let (num, k) = self.clear_denominators(&e);
        let ns = num.to_string_with(self.vars());
        if k.iter().all(|&d| d == 0) {
            return ns;
        }
        let mut den = Vec::new();
        for (j, &d) in k.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let s = paren(&self.inverted()[j].to_string_with(self.vars()));
            den.push(if d == 1 { s } else { format!("{s}^{d}") });
        }
        let num_s = if num.terms.len() > 1 { format!("({ns})") } else { ns };
        if den.len() == 1 {
            format!("{num_s}/{}", den[0])
        } else {
            format!("{num_s}/({})", den.join("*"))
        }
    }

    // ---- ideals ----

    /// Gröbner basis of `J + (gens)` in the presentation ring.
    pub fn ideal_gb(&self, gens: &[Elem]) -> Vec<Poly> {
        let mut all = self.gb().to_vec();
        all.extend(gens.iter().map(|g| self.nf(g)).filter(|g| !g.is_zero()));
        groebner_basis(self.ring(), &all)
    }

    pub fn ideal_contains(&self, gens: &[Elem], f: &Elem) -> bool {
        let gb = self.ideal_gb(gens);
        reduce_poly(self.ring(), &self.ring().adopt(f.clone()), &gb).is_zero()
    }

    pub fn ideal_is_unit(&self, gens: &[Elem]) -> bool {
        is_unit_basis(&self.ideal_gb(gens))
    }

    /// `1 ∈ rad(gens)`, i.e. the generators have no common zero on the
    /// spectrum. Since `1 ∈ rad(I)` iff `1 ∈ I`, this is plain membership.
    pub fn radical_contains_one(&self, gens: &[Elem]) -> bool {
        self.is_zero_ring() || self.ideal_is_unit(gens)
    }

    /// `f ∈ rad(gens)` by the Rabinowitsch trick: `(gens)` becomes the unit
    /// ideal after inverting `f`.
    pub fn radical_contains(&self, gens: &[Elem], f: &Elem) -> bool {
        if self.ideal_contains(gens, f) {
            return true;
        }
        let loc = self.localized(std::slice::from_ref(f));
        let gens_loc: Vec<Elem> = gens.iter().map(|g| loc.embed_from_sub(self, g)).collect();
        loc.radical_contains_one(&gens_loc)
    }

    // ---- derived algebras ----

    /// `self[1/extra]`; the presentation extends this one (same variables,
    /// inverted list extended), so [`LocAlgebra::embed_from_sub`] applies.
    pub fn localized(&self, extra: &[Elem]) -> LocAlgebra {
        let mut inv = self.inverted().to_vec();
        for e in extra {
            let (num, _) = self.clear_denominators(&self.nf(e));
            if num.is_zero() {
                // inverting 0 kills the ring
                inv.push(self.base_ring().zero());
                continue;
            }
            if num.as_constant().is_some() {
                continue;
            }
            let num = self.base_ring().make_monic(&num);
            if !inv.contains(&num) {
                inv.push(num);
            }
        }
        let (rels, inv) = if inv.iter().any(|p| p.is_zero()) {
            (vec![self.base_ring().one()], inv.into_iter().filter(|p| !p.is_zero()).collect())
        } else {
            (self.relations().to_vec(), inv)
        };
        let grading = self.grading().cloned().filter(|g| {
            inv.iter().all(|s| poly_degree(s, &g.weights, g.rank).is_some())
        });
        LocAlgebra::new(self.field(), self.vars().to_vec(), rels, inv, grading).expect("valid localization")
    }

    /// `self / (gens)`, same variables and inverted list.
    pub fn quotient(&self, gens: &[Elem]) -> LocAlgebra {
        let mut rels = self.relations().to_vec();
        for g in gens {
            let (num, _) = self.clear_denominators(&self.nf(g));
            if !num.is_zero() && !rels.contains(&num) {
                rels.push(num);
            }
        }
        let grading = self.grading().cloned().filter(|g| {
            rels.iter().all(|s| poly_degree(s, &g.weights, g.rank).is_some())
        });
        LocAlgebra::new(self.field(), self.vars().to_vec(), rels, self.inverted().to_vec(), grading)
            .expect("valid quotient")
    }

    /// Embeds an element of `sub`, whose presentation ring is an initial
    /// segment of this one (same variables, inverted list a prefix).
    pub fn embed_from_sub(&self, sub: &LocAlgebra, e: &Elem) -> Elem {
        let n = self.nvars();
        let map: Vec<usize> = (0..sub.npvars()).map(|i| if i < sub.nvars() { i } else { n + (i - sub.nvars()) }).collect();
        self.nf(&self.ring().embed(e, &map))
    }

    /// Standard monomials are finite in number (the algebra is a finite-dimensional vector space).
    pub fn finite_basis(&self) -> Option<Vec<Exp>> {
        if self.is_zero_ring() {
            return Some(vec![]);
        }
        let np = self.npvars();
        let leads: Vec<&Exp> = self.gb().iter().map(|g| &g.lead().unwrap().0).collect();
        let mut bounds = vec![0u32; np];
        for i in 0..np {
            let pure = leads
                .iter()
                .filter(|e| e.iter().enumerate().all(|(j, &d)| j == i || d == 0) && e[i] > 0)
                .map(|e| e[i])
                .min()?;
            bounds[i] = pure;
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; np];
        enumerate_box(&bounds, 0, &mut cur, &mut |e| {
            if !leads.iter().any(|l| crate::poly::divides(l, e)) {
                out.push(e.to_vec());
            }
        });
        out.sort_by(|a, b| self.ring().cmp(b, a));
        Some(out)
    }
}

fn enumerate_box(bounds: &[u32], i: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if i == bounds.len() {
        f(cur);
        return;
    }
    for d in 0..bounds[i] {
        cur[i] = d;
        enumerate_box(bounds, i + 1, cur, f);
    }
    cur[i] = 0;
}

fn paren(s: &str) -> String {
    if s.contains(' ') || s.contains('+') || s.starts_with('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// Degree of a homogeneous polynomial (`None` if inhomogeneous; zero polys get the zero vector).
pub fn poly_degree(p: &Poly, weights: &[Vec<i64>], rank: usize) -> Option<Vec<i64>> {
    let mut deg: Option<Vec<i64>> = None;
    for (e, _) in &p.terms {
        let d = exp_weight(e, weights, rank);
        match &deg {
            None => deg = Some(d),
            Some(d0) if *d0 == d => {}
            _ => return None,
        }
    }
    Some(deg.unwrap_or_else(|| vec![0; rank]))
}

pub fn exp_weight(e: &[u32], weights: &[Vec<i64>], rank: usize) -> Vec<i64> {
    let mut d = vec![0i64; rank];
    for (i, &k) in e.iter().enumerate() {
        if k > 0 {
            for r in 0..rank {
                d[r] += weights[i][r] * k as i64;
            }
        }
    }
    d
}

//! Algebra homomorphisms between [`LocAlgebra`]s, and the graph-elimination
//! machinery deciding injectivity, surjectivity, preimages and whether a map
//! is a localization.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::algebra::{poly_degree, Elem, Grading, LocAlgebra};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, reduce_poly};
use crate::poly::{MonomialOrder, Poly, PolyRing};

#[derive(Clone, Debug, PartialEq)]
pub enum HomKind {
    /// Target ≅ source with the listed source elements inverted.
    Localization(Vec<Elem>),
    General,
}

struct Graph {
    ring: PolyRing,
    gb: Vec<Poly>,
    nb: usize,
    nw: usize,
}

#[derive(Clone)]
pub struct AlgHom {
    source: LocAlgebra,
    target: LocAlgebra,
    /// Image of each presentation variable of the source (x's, then 1/s's).
    images: Vec<Elem>,
    kind: HomKind,
    graph: Arc<OnceLock<Graph>>,
}

impl PartialEq for AlgHom {
    fn eq(&self, other: &AlgHom) -> bool {
        self.source == other.source && self.target == other.target && self.equal_on_generators(other)
    }
}

impl fmt::Debug for AlgHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self
            .source
            .vars()
            .iter()
            .zip(&self.images)
            .map(|(v, e)| format!("{v} ↦ {}", self.target.format(e)))
            .collect();
        write!(f, "AlgHom[{} → {}: {}]", self.source, self.target, imgs.join(", "))
    }
}

impl AlgHom {
    /// Checked constructor: `images` gives one target element per source
    /// variable. Relations must vanish, inverted elements must become units,
    /// and a declared localization is verified.
    pub fn new(source: &LocAlgebra, target: &LocAlgebra, images: Vec<Elem>, kind: HomKind) -> Result<AlgHom> {
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", source.field(), target.field())));
        }
        if images.len() != source.nvars() {
            return Err(Error::InvalidHom(format!(
                "{} images given for {} variables",
                images.len(),
                source.nvars()
            )));
        }
        let images: Vec<Elem> = images.iter().map(|e| target.nf(e)).collect();
        let sub = |p: &Poly| -> Elem {
            target.nf(&source.base_ring().substitute(p, &images, target.ring()))
        };
        for r in source.relations() {
            if !sub(r).is_zero() {
                return Err(Error::InvalidHom(format!(
                    "relation {} does not map to zero",
                    r.to_string_with(source.vars())
                )));
            }
        }
        let mut full = images.clone();
        for s in source.inverted() {
            let img = sub(s);
            let inv = target.unit_inverse(&img).ok_or_else(|| {
                Error::InvalidHom(format!(
                    "inverted element {} maps to the non-unit {}",
                    s.to_string_with(source.vars()),
                    target.format(&img)
                ))
            })?;
            full.push(inv);
        }
        let h = AlgHom::from_parts(source, target, full, HomKind::General);
        match kind {
            HomKind::General => Ok(h),
            HomKind::Localization(extras) => {
                let extras: Vec<Elem> = extras.iter().map(|e| source.nf(e)).collect();
                for e in &extras {
                    if !target.is_unit(&h.apply(e)) {
                        return Err(Error::InvalidHom(format!(
                            "declared inverted element {} is not a unit in the target",
                            source.format(e)
                        )));
                    }
                }
                let h = AlgHom { kind: HomKind::Localization(extras), graph: Arc::new(OnceLock::new()), ..h };
                if !h.localization_is_exact() {
                    return Err(Error::InvalidHom(format!(
                        "{} is not the localization of {} at the declared elements",
                        target, source
                    )));
                }
                Ok(h)
            }
        }
    }

    /// Builds a hom from images of all presentation variables, trusting the caller.
    pub(crate) fn from_parts(source: &LocAlgebra, target: &LocAlgebra, images: Vec<Elem>, kind: HomKind) -> AlgHom {
        debug_assert_eq!(images.len(), source.npvars());
        AlgHom { source: source.clone(), target: target.clone(), images, kind, graph: Arc::new(OnceLock::new()) }
    }

    pub fn identity(a: &LocAlgebra) -> AlgHom {
        let images = (0..a.npvars()).map(|i| a.nf(&a.ring().var(i))).collect();
        AlgHom::from_parts(a, a, images, HomKind::Localization(vec![]))
    }

    /// `A → A[1/extra]`.
    pub fn localization(a: &LocAlgebra, extra: &[Elem]) -> (LocAlgebra, AlgHom) {
        let b = a.localized(extra);
        let images = (0..a.npvars()).map(|i| b.embed_from_sub(a, &a.ring().var(i))).collect();
        let h = AlgHom::from_parts(a, &b, images, HomKind::Localization(extra.iter().map(|e| a.nf(e)).collect()));
        (b, h)
    }

    /// Parses images `var ↦ expr` written in the target's variables.
    pub fn parse(
        source: &LocAlgebra,
        target: &LocAlgebra,
        images: &[(&str, &str)],
        extra_invert: Option<&[&str]>,
    ) -> Result<AlgHom> {
        let mut imgs = Vec::with_capacity(source.nvars());
        for v in source.vars() {
            let (_, e) = images
                .iter()
                .find(|(n, _)| n == v)
                .ok_or_else(|| Error::InvalidHom(format!("no image given for `{v}`")))?;
            imgs.push(target.parse(e)?);
        }
        for (n, _) in images {
            if !source.vars().iter().any(|v| v == n) {
                return Err(Error::InvalidHom(format!("`{n}` is not a source variable")));
            }
        }
        let kind = match extra_invert {
            None => HomKind::General,
            Some(es) => HomKind::Localization(es.iter().map(|e| source.parse(e)).collect::<Result<_>>()?),
        };
        AlgHom::new(source, target, imgs, kind)
    }

    pub fn source(&self) -> &LocAlgebra {
        &self.source
    }

    pub fn target(&self) -> &LocAlgebra {
        &self.target
    }

    pub fn kind(&self) -> &HomKind {
        &self.kind
    }

    pub fn is_localization(&self) -> bool {
        matches!(self.kind, HomKind::Localization(_))
    }

    pub fn extras(&self) -> Option<&[Elem]> {
        match &self.kind {
            HomKind::Localization(e) => Some(e),
            HomKind::General => None,
        }
    }

    /// Images of the source variables (without the inverse variables).
    pub fn var_images(&self) -> &[Elem] {
        &self.images[..self.source.nvars()]
    }

    pub fn apply(&self, e: &Elem) -> Elem {
        let p = self.source.ring().substitute(e, &self.images, self.target.ring());
        self.target.nf(&p)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgHom) -> AlgHom {
        assert!(self.target == other.source, "composing non-matching homs");
        let images: Vec<Elem> = self.images.iter().map(|e| other.apply(e)).collect();
        let kind = match (&self.kind, &other.kind) {
            (HomKind::Localization(e1), HomKind::Localization(e2)) => {
                let mut extras = e1.clone();
                let mut ok = true;
                for e in e2 {
                    match self.preimage_up_to_unit(e) {
                        Some(a) => {
                            if !extras.contains(&a) {
                                extras.push(a)
                            }
                        }
                        None => ok = false,
                    }
                }
                if ok {
                    HomKind::Localization(extras)
                } else {
                    HomKind::General
                }
            }
            _ => HomKind::General,
        };
        AlgHom::from_parts(&self.source, &other.target, images, kind)
    }

    pub fn equal_on_generators(&self, other: &AlgHom) -> bool {
        self.source.nvars() == other.source.nvars()
            && self.var_images().iter().zip(other.var_images()).all(|(a, b)| self.target.eq_elem(a, b))
    }

    /// Same map with a different kind tag (crate-internal bookkeeping).
    pub(crate) fn with_kind(&self, kind: HomKind) -> AlgHom {
        AlgHom { kind, graph: Arc::new(OnceLock::new()), ..self.clone() }
    }

    /// Product of the declared inverted elements (`1` for the identity).
    pub fn extras_product(&self) -> Option<Elem> {
        let ex = self.extras()?;
        let mut p = self.source.one();
        for e in ex {
            p = self.source.mul(&p, e);
        }
        Some(p)
    }

    // ---- graph elimination ----

    fn graph(&self) -> &Graph {
        self.graph.get_or_init(|| {
            let (b, a) = (&self.target, &self.source);
            let nb = b.npvars();
            let na = a.npvars();
            let extras: Vec<Elem> = self.extras().map(|e| e.to_vec()).unwrap_or_default();
            let nw = extras.len();
            let ring = PolyRing::with_order(a.field(), nb + nw + na, MonomialOrder::Blocks(vec![nb, nw, na]));
            let bmap: Vec<usize> = (0..nb).collect();
            let mut gens: Vec<Poly> = b.gb().iter().map(|g| ring.embed(g, &bmap)).collect();
            for (i, img) in self.images.iter().enumerate() {
                gens.push(ring.sub(&ring.var(nb + nw + i), &ring.embed(img, &bmap)));
            }
            for (k, e) in extras.iter().enumerate() {
                let w = ring.mul(&ring.var(nb + k), &ring.embed(&self.apply(e), &bmap));
                gens.push(ring.sub(&w, &ring.one()));
            }
            let gb = groebner_basis(&ring, &gens);
            Graph { ring, gb, nb, nw }
        })
    }

    fn graph_nf(&self, e: &Elem) -> Poly {
        let g = self.graph();
        let bmap: Vec<usize> = (0..g.nb).collect();
        reduce_poly(&g.ring, &g.ring.embed(e, &bmap), &g.gb)
    }

    fn free_of(p: &Poly, lo: usize, hi: usize) -> bool {
        (lo..hi).all(|i| !p.uses_var(i))
    }

    fn to_source(&self, p: &Poly) -> Elem {
        let g = self.graph();
        let off = g.nb + g.nw;
        let terms = p.terms.iter().map(|(e, c)| (e[off..].to_vec(), c.clone())).collect();
        self.source.nf(&self.source.ring().normalize(terms))
    }

    /// Generators of the kernel (empty iff injective).
    pub fn kernel_gens(&self) -> Vec<Elem> {
        let g = self.graph();
        g.gb
            .iter()
            .filter(|p| AlgHom::free_of(p, 0, g.nb + g.nw))
            .map(|p| self.to_source(p))
            .filter(|p| !p.is_zero())
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_gens().is_empty()
    }

    pub fn is_surjective(&self) -> bool {
        let g = self.graph();
        (0..self.target.npvars()).all(|i| {
            let nf = self.graph_nf(&self.target.nf(&self.target.ring().var(i)));
            AlgHom::free_of(&nf, 0, g.nb + g.nw)
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }

    /// Some `a` with `self(a) = e`, if one exists.
    pub fn preimage(&self, e: &Elem) -> Option<Elem> {
        let g = self.graph();
        let nf = self.graph_nf(&self.target.nf(e));
        if AlgHom::free_of(&nf, 0, g.nb + g.nw) {
            Some(self.to_source(&nf))
        } else {
            None
        }
    }

    /// Some `a` with `self(a) = e·u` for a unit `u`; for localizations this
    /// always exists.
    pub fn preimage_up_to_unit(&self, e: &Elem) -> Option<Elem> {
        let g = self.graph();
        let nf = self.graph_nf(&self.target.nf(e));
        if !AlgHom::free_of(&nf, 0, g.nb) {
            return None;
        }
        let extras: Vec<Elem> = self.extras().map(|e| e.to_vec()).unwrap_or_default();
        let maxw: Vec<u32> = (0..g.nw).map(|k| nf.max_degree_in(g.nb + k)).collect();
        let sring = self.source.ring();
        let mut acc = sring.zero();
        let off = g.nb + g.nw;
        for (ex, c) in &nf.terms {
            let mut t = sring.monomial(ex[off..].to_vec(), c.clone());
            for k in 0..g.nw {
                let d = maxw[k] - ex[g.nb + k];
                if d > 0 {
                    t = sring.mul(&t, &sring.pow(&extras[k], d));
                }
            }
            acc = sring.add(&acc, &t);
        }
        Some(self.source.nf(&acc))
    }

    /// The declared localization really is one: the induced map
    /// `source[1/extras] → target` is an isomorphism.
    fn localization_is_exact(&self) -> bool {
        let Some(extras) = self.extras() else { return false };
        let g = self.graph();
        // surjective from source[W]
        let surj = (0..self.target.npvars()).all(|i| {
            let nf = self.graph_nf(&self.target.nf(&self.target.ring().var(i)));
            AlgHom::free_of(&nf, 0, g.nb)
        });
        if !surj {
            return false;
        }
        // kernel of source[W] → target inside (J_A, W e − 1)
        let na = self.source.npvars();
        let amap: Vec<usize> = (0..na).map(|i| g.nb + g.nw + i).collect();
        let mut gens: Vec<Poly> = self.source.gb().iter().map(|p| g.ring.embed(p, &amap)).collect();
        for (k, e) in extras.iter().enumerate() {
            let w = g.ring.mul(&g.ring.var(g.nb + k), &g.ring.embed(e, &amap));
            gens.push(g.ring.sub(&w, &g.ring.one()));
        }
        let loc_gb = groebner_basis(&g.ring, &gens);
        g.gb.iter()
            .filter(|p| AlgHom::free_of(p, 0, g.nb))
            .all(|p| reduce_poly(&g.ring, p, &loc_gb).is_zero())
    }

    /// Re-checks a `Localization` tag (used by validation).
    pub fn verify_localization(&self) -> bool {
        match &self.kind {
            HomKind::General => false,
            HomKind::Localization(_) => self.localization_is_exact(),
        }
    }
}

/// `A ⊗_R B` for `fa: R → A`, `fb: R → B`, with the canonical maps.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub algebra: LocAlgebra,
    pub left: AlgHom,
    pub right: AlgHom,
}

fn fresh_name(name: &str, used: &[String]) -> String {
    let mut n = name.to_string();
    while used.contains(&n) {
        n.push('\'');
    }
    n
}

pub fn tensor(fa: &AlgHom, fb: &AlgHom) -> Result<Tensor> {
    let (a, b, r) = (fa.target(), fb.target(), fa.source());
    if fb.source() != r {
        return Err(Error::InvalidHom("tensor factors over different bases".into()));
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", a.field(), b.field())));
    }
    let (na, nb) = (a.nvars(), b.nvars());
    let mut vars = a.vars().to_vec();
    for v in b.vars() {
        let n = fresh_name(v, &vars);
        vars.push(n);
    }
    let base = PolyRing::new(a.field(), na + nb);
    let amap: Vec<usize> = (0..na).collect();
    let bmap: Vec<usize> = (na..na + nb).collect();
    let mut rels: Vec<Poly> = a.relations().iter().map(|p| base.embed(p, &amap)).collect();
    rels.extend(b.relations().iter().map(|p| base.embed(p, &bmap)));
    // identifications fa(v) = fb(v), denominators cleared
    let clear = |alg: &LocAlgebra, e: &Elem, map: &[usize]| -> (Poly, Poly) {
        let (num, k) = alg.clear_denominators(e);
        let mut den = base.one();
        for (j, &d) in k.iter().enumerate() {
            if d > 0 {
                den = base.mul(&den, &base.pow(&base.embed(&alg.inverted()[j], map), d));
            }
        }
        (base.embed(&num, map), den)
    };
    for i in 0..r.nvars() {
        let v = r.var(i);
        let (n1, d1) = clear(a, &fa.apply(&v), &amap);
        let (n2, d2) = clear(b, &fb.apply(&v), &bmap);
        let rel = base.sub(&base.mul(&n1, &d2), &base.mul(&n2, &d1));
        if !rel.is_zero() && !rels.contains(&rel) {
            rels.push(rel);
        }
    }
    let mut inv: Vec<Poly> = a.inverted().iter().map(|p| base.embed(p, &amap)).collect();
    inv.extend(b.inverted().iter().map(|p| base.embed(p, &bmap)));
    let grading = tensor_grading(a, b, r, &rels, &inv);
    let t = LocAlgebra::new(a.field(), vars, rels, inv, grading)?;
    // canonical maps
    let left_images: Vec<Elem> = (0..a.npvars())
        .map(|i| if i < na { t.var(i) } else { t.inv_var(i - na) })
        .collect();
    let right_images: Vec<Elem> = (0..b.npvars())
        .map(|i| if i < nb { t.var(na + i) } else { t.inv_var(a.ninv() + i - nb) })
        .collect();
    let left_kind = match fb.extras() {
        Some(ex) => HomKind::Localization(ex.iter().map(|e| fa.apply(e)).collect()),
        None => HomKind::General,
    };
    let right_kind = match fa.extras() {
        Some(ex) => HomKind::Localization(ex.iter().map(|e| fb.apply(e)).collect()),
        None => HomKind::General,
    };
    let left = AlgHom::from_parts(a, &t, left_images, left_kind);
    let right = AlgHom::from_parts(b, &t, right_images, right_kind);
    Ok(Tensor { algebra: t, left, right })
}

fn tensor_grading(a: &LocAlgebra, b: &LocAlgebra, r: &LocAlgebra, rels: &[Poly], inv: &[Poly]) -> Option<Grading> {
    let (ga, gb) = (a.grading()?, b.grading()?);
    let weights: Vec<Vec<i64>>;
    let rank;
    if r.nvars() == 0 {
        rank = ga.rank + gb.rank;
        weights = ga
            .weights
            .iter()
            .map(|w| {
                let mut v = w.clone();
                v.extend(std::iter::repeat(0).take(gb.rank));
                v
            })
            .chain(gb.weights.iter().map(|w| {
                let mut v = vec![0; ga.rank];
                v.extend(w.iter().copied());
                v
            }))
            .collect();
    } else {
        if ga.rank != gb.rank {
            return None;
        }
        rank = ga.rank;
        weights = ga.weights.iter().chain(&gb.weights).cloned().collect();
    }
    if rels.iter().chain(inv).all(|p| poly_degree(p, &weights, rank).is_some()) {
        Some(Grading { rank, weights })
    } else {
        None
    }
}

/// The tensor product `A ⊗_over B` (see [`tensor`]).
pub fn tensor_algebras(a: &LocAlgebra, b: &LocAlgebra, over: &LocAlgebra, fa: &AlgHom, fb: &AlgHom) -> Result<Tensor> {
    if fa.source() != over || fb.source() != over || fa.target() != a || fb.target() != b {
        return Err(Error::InvalidHom("structure maps do not match the given algebras".into()));
    }
    tensor(fa, fb)
}

/// The map `A ⊗_R B → C` induced by `ga: A → C`, `gb: B → C`.
pub fn copair(t: &Tensor, ga: &AlgHom, gb: &AlgHom) -> Result<AlgHom> {
    let (na, nb) = (t.left.source().nvars(), t.right.source().nvars());
    let mut images = Vec::with_capacity(na + nb);
    images.extend(ga.var_images().iter().cloned());
    images.extend(gb.var_images().iter().cloned());
    AlgHom::new(&t.algebra, ga.target(), images, HomKind::General)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn alg(vars: &[&str], rels: &[&str], inv: &[&str]) -> LocAlgebra {
        LocAlgebra::from_strings(Field::Rationals, vars, rels, inv, None).unwrap()
    }

    #[test]
    fn localization_validated() {
        let a = alg(&["x"], &[], &[]);
        let b = alg(&["x"], &[], &["x"]);
        assert!(AlgHom::parse(&a, &b, &[("x", "x")], Some(&["x"])).is_ok());
        // declaring the wrong localization is refused
        assert!(AlgHom::parse(&a, &b, &[("x", "x")], Some(&[])).is_err());
        assert!(AlgHom::parse(&a, &b, &[("x", "x")], Some(&["x - 1"])).is_err());
        // k[u] → k[x,1/x], u ↦ 1/x is the localization at u
        let c = alg(&["u"], &[], &[]);
        let h = AlgHom::parse(&c, &b, &[("u", "1/x")], Some(&["u"])).unwrap();
        assert!(h.is_injective());
        assert!(!h.is_surjective());
    }

    #[test]
    fn relations_must_vanish() {
        let a = alg(&["x"], &["x^2"], &[]);
        let b = alg(&["y"], &[], &[]);
        assert!(AlgHom::parse(&a, &b, &[("x", "y")], None).is_err());
        assert!(AlgHom::parse(&a, &b, &[("x", "0")], None).is_ok());
    }

    #[test]
    fn kernel_and_preimage() {
        let a = alg(&["x", "y"], &[], &[]);
        let b = alg(&["t"], &[], &[]);
        let h = AlgHom::parse(&a, &b, &[("x", "t^2"), ("y", "t^3")], None).unwrap();
        let k = h.kernel_gens();
        assert_eq!(k.len(), 1);
        assert!(h.apply(&k[0]).is_zero());
        assert!(h.preimage(&b.parse("t^5").unwrap()).is_some());
        assert!(h.preimage(&b.parse("t").unwrap()).is_none());
    }

    #[test]
    fn composite_localization_extras() {
        let a = alg(&["x"], &[], &[]);
        let (b, f) = AlgHom::localization(&a, &[a.var(0)]);
        let (_, g) = AlgHom::localization(&b, &[b.parse("x - 1").unwrap()]);
        let h = f.then(&g);
        assert!(h.verify_localization());
        assert_eq!(h.extras().unwrap().len(), 2);
    }

    #[test]
    fn tensor_free_and_idempotent() {
        let k = LocAlgebra::ground(Field::Rationals);
        let kx = LocAlgebra::polynomial(Field::Rationals, &["x"]);
        let ky = LocAlgebra::polynomial(Field::Rationals, &["y"]);
        let fx = AlgHom::new(&k, &kx, vec![], HomKind::General).unwrap();
        let fy = AlgHom::new(&k, &ky, vec![], HomKind::General).unwrap();
        let t = tensor(&fx, &fy).unwrap();
        assert_eq!(t.algebra.vars(), &["x".to_string(), "y".to_string()]);
        assert!(t.algebra.relations().is_empty());

        let (lx, l) = AlgHom::localization(&kx, &[kx.var(0)]);
        let t = tensor(&l, &l).unwrap();
        let mult = copair(&t, &AlgHom::identity(&lx), &AlgHom::identity(&lx)).unwrap();
        assert!(mult.is_isomorphism());
    }
}

//! Finitely presented modules over a [`LocAlgebra`] and their homomorphisms.
//!
//! A module with `g` generators is `A^g / N`; `N` is lifted to the
//! presentation ring as the submodule generated by the relation rows and
//! `J·e_k`, so membership is a Gröbner reduction in `P^g`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use crate::algebra::{Elem, LocAlgebra};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::graded::GradedPiece;
use crate::groebner::{reduce, reduced_gb};
use crate::hom::AlgHom;
use crate::linalg::{Echelon, Matrix};
use crate::poly::MVec;

/// A vector of `A^g`, one entry per generator.
pub type ModElem = Vec<Elem>;

#[derive(Clone)]
pub struct FpModule {
    ring: LocAlgebra,
    ngens: usize,
    relations: Vec<ModElem>,
    shifts: Option<Vec<Vec<i64>>>,
    gb: Arc<OnceLock<Vec<MVec>>>,
}

impl fmt::Debug for FpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .relations
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|e| self.ring.format(e)).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "FpModule({}^{} / <{}>)", self.ring, self.ngens, rows.join(", "))
    }
}

impl FpModule {
    pub fn new(ring: &LocAlgebra, ngens: usize, relations: Vec<ModElem>, shifts: Option<Vec<Vec<i64>>>) -> Result<FpModule> {
        for r in &relations {
            if r.len() != ngens {
                return Err(Error::InvalidModule(format!("relation row of length {} for {ngens} generators", r.len())));
            }
        }
        let relations: Vec<ModElem> = relations
            .into_iter()
            .map(|r| r.iter().map(|e| ring.nf(e)).collect::<ModElem>())
            .filter(|r| r.iter().any(|e| !e.is_zero()))
            .collect();
        if let Some(s) = &shifts {
            let rank = ring.grading().map(|g| g.rank).ok_or_else(|| {
                Error::UngradedModule(format!("shifts given over the ungraded ring {ring}"))
            })?;
            if s.len() != ngens || s.iter().any(|d| d.len() != rank) {
                return Err(Error::InvalidModule("shift vector has wrong shape".into()));
            }
        }
        let m = FpModule { ring: ring.clone(), ngens, relations, shifts, gb: Arc::new(OnceLock::new()) };
        if m.shifts.is_some() {
            for r in &m.relations {
                if m.vec_degree(r).is_none() {
                    return Err(Error::UngradedModule(format!("relation row {} is not homogeneous", m.format_vec(r))));
                }
            }
        }
        Ok(m)
    }

    /// `A^n`; graded with zero shifts when the ring is graded.
    pub fn free(ring: &LocAlgebra, n: usize) -> FpModule {
        let shifts = ring.grading().map(|g| vec![vec![0; g.rank]; n]);
        FpModule::new(ring, n, vec![], shifts).unwrap()
    }

    pub fn free_shifted(ring: &LocAlgebra, shifts: Vec<Vec<i64>>) -> Result<FpModule> {
        FpModule::new(ring, shifts.len(), vec![], Some(shifts))
    }

    /// `A/(gens)`.
    pub fn cyclic(ring: &LocAlgebra, gens: &[Elem]) -> FpModule {
        let shifts = ring.grading().map(|g| vec![vec![0; g.rank]]);
        let rows: Vec<ModElem> = gens.iter().map(|g| vec![g.clone()]).collect();
        FpModule::new(ring, 1, rows.clone(), shifts).unwrap_or_else(|_| FpModule::new(ring, 1, rows, None).unwrap())
    }

    pub fn zero(ring: &LocAlgebra) -> FpModule {
        FpModule::free(ring, 0)
    }

    pub fn ring(&self) -> &LocAlgebra {
        &self.ring
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[ModElem] {
        &self.relations
    }

    pub fn shifts(&self) -> Option<&[Vec<i64>]> {
        self.shifts.as_deref()
    }

    pub fn is_graded(&self) -> bool {
        self.shifts.is_some()
    }

    /// Same presentation with new shifts (or none).
    pub fn with_shifts(&self, shifts: Option<Vec<Vec<i64>>>) -> Result<FpModule> {
        FpModule::new(&self.ring, self.ngens, self.relations.clone(), shifts)
    }

    pub fn format_vec(&self, v: &[Elem]) -> String {
        format!("({})", v.iter().map(|e| self.ring.format(e)).collect::<Vec<_>>().join(", "))
    }

    /// Degree of a homogeneous vector (`None` when inhomogeneous or ungraded).
    pub fn vec_degree(&self, v: &[Elem]) -> Option<Vec<i64>> {
        let shifts = self.shifts.as_ref()?;
        let mut deg: Option<Vec<i64>> = None;
        for (k, e) in v.iter().enumerate() {
            if self.ring.is_zero_elem(e) {
                continue;
            }
            let d = self.ring.degree(e)?;
            let d: Vec<i64> = d.iter().zip(&shifts[k]).map(|(a, b)| a + b).collect();
            match &deg {
                None => deg = Some(d),
                Some(d0) if *d0 == d => {}
                _ => return None,
            }
        }
        Some(deg.unwrap_or_else(|| vec![0; shifts.first().map(|s| s.len()).unwrap_or(0)]))
    }

    pub(crate) fn submodule_gens(&self) -> Vec<MVec> {
        let ring = self.ring.ring();
        let mut gens: Vec<MVec> = self.relations.iter().map(|r| MVec::from_components(ring, r, 0)).collect();
        for k in 0..self.ngens {
            for g in self.ring.gb() {
                gens.push(MVec::from_poly(g, k));
            }
        }
        gens
    }

    fn gb(&self) -> &[MVec] {
        self.gb.get_or_init(|| reduced_gb(self.ring.ring(), self.submodule_gens()))
    }

    pub fn to_mvec(&self, v: &[Elem]) -> MVec {
        MVec::from_components(self.ring.ring(), v, 0)
    }

    /// Normal form of a vector modulo the relations.
    pub fn nf(&self, v: &[Elem]) -> ModElem {
        let r = reduce(self.ring.ring(), &self.to_mvec(v), self.gb());
        r.to_components(self.ngens, 0)
    }

    pub fn is_zero_elem(&self, v: &[Elem]) -> bool {
        reduce(self.ring.ring(), &self.to_mvec(v), self.gb()).is_zero()
    }

    pub fn eq_elem(&self, a: &[Elem], b: &[Elem]) -> bool {
        let d: ModElem = a.iter().zip(b).map(|(x, y)| self.ring.ring().sub(x, y)).collect();
        self.is_zero_elem(&d)
    }

    pub fn generator(&self, k: usize) -> ModElem {
        (0..self.ngens).map(|j| if j == k { self.ring.one() } else { self.ring.zero() }).collect()
    }

    pub fn generators(&self) -> Vec<ModElem> {
        (0..self.ngens).map(|k| self.generator(k)).collect()
    }

    /// `self ⊕ other` (block-diagonal relations).
    pub fn direct_sum(&self, other: &FpModule) -> Result<FpModule> {
        if self.ring != other.ring {
            return Err(Error::InvalidModule("direct sum over different rings".into()));
        }
        let (a, b) = (self.ngens, other.ngens);
        let z = self.ring.zero();
        let mut rows: Vec<ModElem> =
            self.relations.iter().map(|r| r.iter().cloned().chain(vec![z.clone(); b]).collect()).collect();
        rows.extend(other.relations.iter().map(|r| vec![z.clone(); a].into_iter().chain(r.iter().cloned()).collect()));
        let shifts = match (&self.shifts, &other.shifts) {
            (Some(s), Some(t)) => Some(s.iter().chain(t).cloned().collect()),
            _ => None,
        };
        FpModule::new(&self.ring, a + b, rows, shifts)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.ngens).all(|k| self.is_zero_elem(&self.generator(k)))
    }

    pub fn scale_vec(&self, c: &Elem, v: &[Elem]) -> ModElem {
        v.iter().map(|e| self.ring.mul(c, e)).collect()
    }

    pub fn add_vec(&self, a: &[Elem], b: &[Elem]) -> ModElem {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    /// Syzygies among `vecs` in this module: all `c` with `Σ c_i vecs_i = 0`.
    pub fn syzygies(&self, vecs: &[ModElem]) -> Vec<ModElem> {
        let (gb, r) = self.augmented_gb(vecs);
        let g = self.ngens;
        gb.iter()
            .filter(|v| v.lead().unwrap().0 >= g)
            .map(|v| v.to_components(r, g).iter().map(|e| self.ring.nf(e)).collect::<ModElem>())
            .filter(|c: &ModElem| c.iter().any(|e| !e.is_zero()))
            .collect()
    }

    fn augmented_gb(&self, vecs: &[ModElem]) -> (Vec<MVec>, usize) {
        let ring = self.ring.ring();
        let g = self.ngens;
        let r = vecs.len();
        let mut gens: Vec<MVec> = Vec::new();
        for (i, v) in vecs.iter().enumerate() {
            let mut m = MVec::from_components(ring, v, 0);
            m.terms.extend(MVec::from_poly(&ring.one(), g + i).terms);
            gens.push(ring.vnormalize(m.terms));
        }
        gens.extend(self.submodule_gens());
        (reduced_gb(ring, gens), r)
    }

    /// Coefficients `c` with `Σ c_i vecs_i ≡ w`, if `w` lies in their span.
    pub fn lift(&self, vecs: &[ModElem], w: &[Elem]) -> Option<ModElem> {
        let (gb, r) = self.augmented_gb(vecs);
        let ring = self.ring.ring();
        let red = reduce(ring, &self.to_mvec(w), &gb);
        if red.terms.iter().any(|t| t.0 < self.ngens) {
            return None;
        }
        Some(red.to_components(r, self.ngens).iter().map(|e| self.ring.nf(&ring.neg(e))).collect())
    }

    /// `M ⊗_A B` along `f: A → B`.
    pub fn base_change(&self, f: &AlgHom) -> Result<FpModule> {
        if f.source() != &self.ring {
            return Err(Error::InvalidModule("base change along a map from another ring".into()));
        }
        let rows: Vec<ModElem> = self.relations.iter().map(|r| r.iter().map(|e| f.apply(e)).collect()).collect();
        let b = f.target();
        let shifts = if b.is_graded() { self.shifts.clone() } else { None };
        FpModule::new(b, self.ngens, rows.clone(), shifts).or_else(|_| FpModule::new(b, self.ngens, rows, None))
    }

    /// Same module with every generator shifted by `d`.
    pub fn twist(&self, d: &[i64]) -> Result<FpModule> {
        let shifts = self
            .shifts
            .as_ref()
            .ok_or_else(|| Error::UngradedModule("twist of an ungraded module".into()))?
            .iter()
            .map(|s| s.iter().zip(d).map(|(a, b)| a - b).collect())
            .collect();
        self.with_shifts(Some(shifts))
    }

    // ---- graded pieces ----

    /// The degree-`α` piece `⊕_k A_{α - shift_k}` modulo the relations.
    pub fn graded_piece(&self, alpha: &[i64]) -> Result<ModPiece> {
        let shifts = self
            .shifts
            .as_ref()
            .ok_or_else(|| Error::UngradedModule(format!("module over {} has no grading shifts", self.ring)))?;
        let mut comps = Vec::with_capacity(self.ngens);
        let mut offsets = Vec::with_capacity(self.ngens);
        let mut total = 0;
        for s in shifts {
            let d: Vec<i64> = alpha.iter().zip(s).map(|(a, b)| a - b).collect();
            let p = self.ring.graded_piece(&d)?;
            offsets.push(total);
            total += p.dim();
            comps.push(p);
        }
        let mut rel_rows = Vec::new();
        for row in &self.relations {
            let deg = self.vec_degree(row).expect("homogeneous relation");
            let md: Vec<i64> = alpha.iter().zip(&deg).map(|(a, b)| a - b).collect();
            let mult = self.ring.graded_piece(&md)?;
            for e in &mult.basis {
                let m = self.ring.ring().monomial(e.clone(), Scalar::from_integer(1.into()));
                let v = self.scale_vec(&m, row);
                rel_rows.push(self.coords_in(&comps, &offsets, total, &v));
            }
        }
        let field = self.ring.field();
        let ech = Echelon::new(field, &rel_rows, total);
        let free = ech.free_columns();
        Ok(ModPiece { degree: alpha.to_vec(), comps, offsets, total, ech, free })
    }

    /// The whole module as one piece, over a finite-dimensional algebra.
    pub fn total_piece(&self) -> Result<ModPiece> {
        let p = self.ring.total_piece()?;
        let comps = vec![p.clone(); self.ngens];
        let offsets: Vec<usize> = (0..self.ngens).map(|k| k * p.dim()).collect();
        let total = self.ngens * p.dim();
        let mut rel_rows = Vec::new();
        for row in &self.relations {
            for e in &p.basis {
                let m = self.ring.ring().monomial(e.clone(), Scalar::from_integer(1.into()));
                let v = self.scale_vec(&m, row);
                rel_rows.push(self.coords_in(&comps, &offsets, total, &v));
            }
        }
        let ech = Echelon::new(self.ring.field(), &rel_rows, total);
        let free = ech.free_columns();
        Ok(ModPiece { degree: vec![], comps, offsets, total, ech, free })
    }

    fn coords_in(&self, comps: &[Arc<GradedPiece>], offsets: &[usize], total: usize, v: &[Elem]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); total];
        for (k, e) in v.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let c = self.ring.coords(e, &comps[k]);
            for (i, x) in c.into_iter().enumerate() {
                out[offsets[k] + i] = x;
            }
        }
        out
    }

    pub fn graded_dim(&self, alpha: &[i64]) -> Result<usize> {
        Ok(self.graded_piece(alpha)?.dim())
    }
}

/// A finite-dimensional graded piece of an [`FpModule`] with explicit basis.
#[derive(Clone, Debug)]
pub struct ModPiece {
    pub degree: Vec<i64>,
    comps: Vec<Arc<GradedPiece>>,
    offsets: Vec<usize>,
    total: usize,
    ech: Echelon,
    free: Vec<usize>,
}

impl ModPiece {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Basis representatives `(generator, monomial)` of the quotient.
    pub fn basis(&self, m: &FpModule) -> Vec<ModElem> {
        self.free
            .iter()
            .map(|&col| {
                let k = (0..self.comps.len())
                    .find(|&j| self.offsets[j] <= col && col < self.offsets[j] + self.comps[j].dim())
                    .unwrap();
                let e = self.comps[k].basis[col - self.offsets[k]].clone();
                let mut v = vec![m.ring.zero(); m.ngens];
                v[k] = m.ring.ring().monomial(e, Scalar::from_integer(1.into()));
                v
            })
            .collect()
    }

    /// Coordinates of a homogeneous vector of this degree.
    pub fn coords(&self, m: &FpModule, v: &[Elem]) -> Vec<Scalar> {
        let full = m.coords_in(&self.comps, &self.offsets, self.total, v);
        self.ech.quotient_coords(m.ring.field(), &full)
    }
}

/// A module map; `matrix[j]` is the image of source generator `j`.
#[derive(Clone, Debug)]
pub struct ModHom {
    pub source: FpModule,
    pub target: FpModule,
    pub matrix: Vec<ModElem>,
}

impl ModHom {
    pub fn new(source: &FpModule, target: &FpModule, matrix: Vec<ModElem>) -> Result<ModHom> {
        if source.ring() != target.ring() {
            return Err(Error::InvalidModule("module map between different rings".into()));
        }
        if matrix.len() != source.ngens() || matrix.iter().any(|r| r.len() != target.ngens()) {
            return Err(Error::InvalidModule("matrix has the wrong shape".into()));
        }
        let h = ModHom { source: source.clone(), target: target.clone(), matrix };
        for row in source.relations() {
            if !target.is_zero_elem(&h.apply(row)) {
                return Err(Error::InvalidModule(format!(
                    "relation {} does not map to zero",
                    source.format_vec(row)
                )));
            }
        }
        Ok(h)
    }

    pub fn identity(m: &FpModule) -> ModHom {
        ModHom { source: m.clone(), target: m.clone(), matrix: (0..m.ngens()).map(|k| m.generator(k)).collect() }
    }

    pub fn zero(source: &FpModule, target: &FpModule) -> ModHom {
        let z = vec![target.ring().zero(); target.ngens()];
        ModHom { source: source.clone(), target: target.clone(), matrix: vec![z; source.ngens()] }
    }

    pub fn apply(&self, v: &[Elem]) -> ModElem {
        let a = self.target.ring();
        let mut out = vec![a.zero(); self.target.ngens()];
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, m) in self.matrix[j].iter().enumerate() {
                out[k] = a.add(&out[k], &a.mul(c, m));
            }
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModHom) -> ModHom {
        let matrix = self.matrix.iter().map(|r| other.apply(r)).collect();
        ModHom { source: self.source.clone(), target: other.target.clone(), matrix }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| self.target.is_zero_elem(r))
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.target.ngens()).all(|k| self.target.lift(&self.matrix, &self.target.generator(k)).is_some())
    }

    /// Kernel as a presented module with its inclusion into the source.
    pub fn kernel(&self) -> (FpModule, ModHom) {
        let syz: Vec<ModElem> =
            self.target.syzygies(&self.matrix).into_iter().filter(|s| !self.source.is_zero_elem(s)).collect();
        let rels = self.source.syzygies(&syz);
        let shifts = if self.source.is_graded() {
            syz.iter().map(|s| self.source.vec_degree(s)).collect::<Option<Vec<_>>>()
        } else {
            None
        };
        let k = FpModule::new(self.source.ring(), syz.len(), rels.clone(), shifts)
            .or_else(|_| FpModule::new(self.source.ring(), syz.len(), rels, None))
            .expect("kernel presentation");
        let inc = ModHom { source: k.clone(), target: self.source.clone(), matrix: syz };
        (k, inc)
    }

    pub fn is_injective(&self) -> bool {
        self.target.syzygies(&self.matrix).iter().all(|s| self.source.is_zero_elem(s))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }

    /// Cokernel with its projection from the target.
    pub fn cokernel(&self) -> (FpModule, ModHom) {
        let mut rows = self.target.relations().to_vec();
        rows.extend(self.matrix.iter().cloned());
        let shifts = self.target.shifts().map(|s| s.to_vec());
        let c = FpModule::new(self.target.ring(), self.target.ngens(), rows.clone(), shifts)
            .or_else(|_| FpModule::new(self.target.ring(), self.target.ngens(), rows, None))
            .expect("cokernel presentation");
        let proj = ModHom { source: self.target.clone(), target: c.clone(), matrix: (0..c.ngens()).map(|k| c.generator(k)).collect() };
        (c, proj)
    }

    /// Matrix of the induced map on degree-`α` pieces (columns index the
    /// source basis).
    pub fn piece_matrix(&self, src: &ModPiece, tgt: &ModPiece) -> Matrix {
        let cols: Vec<Vec<Scalar>> =
            src.basis(&self.source).iter().map(|b| tgt.coords(&self.target, &self.apply(b))).collect();
        let mut m = Matrix::zeros(tgt.dim(), src.dim());
        for (j, c) in cols.into_iter().enumerate() {
            for (i, x) in c.into_iter().enumerate() {
                m.data[i][j] = x;
            }
        }
        m
    }
}

/// `M ⊗_A B` along `f` (free function form).
pub fn base_change_module(m: &FpModule, f: &AlgHom) -> Result<FpModule> {
    m.base_change(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn kx() -> LocAlgebra {
        LocAlgebra::from_strings(Field::Rationals, &["x"], &[], &[], Some(vec![vec![1]])).unwrap()
    }

    #[test]
    fn torsion_dies_under_localization() {
        let a = kx();
        let m = FpModule::cyclic(&a, &[a.var(0)]);
        let (_, l) = AlgHom::localization(&a, &[a.var(0)]);
        assert!(!m.is_zero());
        assert!(m.base_change(&l).unwrap().is_zero());
    }

    #[test]
    fn kernel_of_multiplication() {
        let a = kx();
        let m = FpModule::cyclic(&a, &[a.parse("x^2").unwrap()]);
        let h = ModHom::new(&m, &m, vec![vec![a.var(0)]]).unwrap();
        let (k, inc) = h.kernel();
        assert_eq!(k.ngens(), 1);
        assert!(a.eq_elem(&inc.matrix[0][0], &a.var(0)));
        assert_eq!(k.relations().len(), 1);
        assert!(a.eq_elem(&k.relations()[0][0], &a.var(0)));
        assert!(inc.then(&h).is_zero());
        // free case: x is injective but not surjective
        let f = FpModule::free(&a, 1);
        let hx = ModHom::new(&f, &f, vec![vec![a.var(0)]]).unwrap();
        assert!(hx.is_injective());
        assert!(!hx.is_surjective());
        assert!(ModHom::identity(&m).is_isomorphism());
    }

    #[test]
    fn pieces_of_quotient() {
        let a = kx();
        let m = FpModule::cyclic(&a, &[a.parse("x^2").unwrap()]);
        assert_eq!(m.graded_dim(&[0]).unwrap(), 1);
        assert_eq!(m.graded_dim(&[1]).unwrap(), 1);
        assert_eq!(m.graded_dim(&[2]).unwrap(), 0);
        let t = FpModule::free(&a, 1).twist(&[2]).unwrap();
        assert_eq!(t.graded_dim(&[-2]).unwrap(), 1);
        assert_eq!(t.graded_dim(&[-3]).unwrap(), 0);
    }

    #[test]
    fn lift_finds_cofactors() {
        let a = LocAlgebra::polynomial(Field::Rationals, &["x", "y"]);
        let f = FpModule::free(&a, 1);
        let vecs = vec![vec![a.var(0)], vec![a.var(1)]];
        let w = vec![a.parse("x*y + y^2").unwrap()];
        let c = f.lift(&vecs, &w).unwrap();
        let back = a.add(&a.mul(&c[0], &a.var(0)), &a.mul(&c[1], &a.var(1)));
        assert!(a.eq_elem(&back, &w[0]));
        assert!(f.lift(&vecs, &[a.one()]).is_none());
    }
}

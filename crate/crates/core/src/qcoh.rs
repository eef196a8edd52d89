//! Sheaves of modules on finite ringed spaces.
//!
//! A restriction `M_x → M_y` is semilinear over `r_xy`; it is stored as the
//! `O_y`-linear map `M_x ⊗ O_y → M_y`, i.e. by the images of the generators
//! of `M_x`. Quasi-coherence is then "every stored map is an isomorphism".

use std::collections::{HashMap, VecDeque};

use crate::algebra::Elem;
use crate::error::{Error, Result};
use crate::hom::AlgHom;
use crate::module::{FpModule, ModElem, ModHom};
use crate::space::{FinSpace, SpaceMap};

#[derive(Clone, Debug)]
pub struct SheafModule {
    space: FinSpace,
    stalks: Vec<FpModule>,
    restr: HashMap<(usize, usize), ModHom>,
}

impl SheafModule {
    /// Builds a sheaf from generator images along `edges`; other comparable
    /// pairs are composed along a shortest path.
    pub fn from_edges(space: &FinSpace, stalks: Vec<FpModule>, edges: Vec<((usize, usize), Vec<ModElem>)>) -> Result<SheafModule> {
        let n = space.len();
        if stalks.len() != n {
            return Err(Error::InvalidModule(format!("{} stalks for {n} points", stalks.len())));
        }
        for x in 0..n {
            if stalks[x].ring() != space.stalk(x) {
                return Err(Error::InvalidModule(format!("module at `{}` is over the wrong ring", space.name(x))));
            }
        }
        let mut given: HashMap<(usize, usize), ModHom> = HashMap::new();
        for ((x, y), m) in edges {
            if x >= n || y >= n || !space.leq(x, y) {
                return Err(Error::InvalidModule("module restriction along a non-relation".into()));
            }
            given.insert((x, y), edge_hom(space, &stalks, x, y, m)?);
        }
        let mut s = SheafModule { space: space.clone(), stalks, restr: HashMap::new() };
        for x in 0..n {
            s.restr.insert((x, x), ModHom::identity(&s.stalks[x]));
            let mut prev: Vec<Option<usize>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[x] = true;
            let mut q = VecDeque::from([x]);
            while let Some(u) = q.pop_front() {
                for v in 0..n {
                    if !seen[v] && given.contains_key(&(u, v)) {
                        seen[v] = true;
                        prev[v] = Some(u);
                        q.push_back(v);
                    }
                }
            }
            for y in 0..n {
                if x == y || !space.leq(x, y) {
                    continue;
                }
                if let Some(h) = given.get(&(x, y)) {
                    s.restr.insert((x, y), h.clone());
                    continue;
                }
                if prev[y].is_none() {
                    return Err(Error::InvalidModule(format!(
                        "no module restriction path from `{}` to `{}`",
                        space.name(x),
                        space.name(y)
                    )));
                }
                let mut path = vec![y];
                let mut cur = y;
                while let Some(p) = prev[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                let mut images: Vec<ModElem> = s.stalks[x].generators();
                for w in path.windows(2) {
                    images = images.iter().map(|v| apply_semilinear(space, &given[&(w[0], w[1])], w[0], w[1], v)).collect();
                }
                s.restr.insert((x, y), edge_hom(space, &s.stalks, x, y, images)?);
            }
        }
        Ok(s)
    }

    /// `O_X`; graded with generator degree 0 where the stalk is graded.
    pub fn structure_sheaf(space: &FinSpace) -> SheafModule {
        let stalks: Vec<FpModule> = space
            .stalks()
            .iter()
            .map(|a| match a.grading() {
                Some(g) => FpModule::free_shifted(a, vec![vec![0; g.rank]]).unwrap(),
                None => FpModule::free(a, 1),
            })
            .collect();
        let mut restr = HashMap::new();
        for x in 0..space.len() {
            for y in 0..space.len() {
                if space.leq(x, y) {
                    let b = base_changed(&stalks[x], space.restriction(x, y));
                    let m = vec![vec![space.stalk(y).one()]];
                    restr.insert((x, y), ModHom { source: b, target: stalks[y].clone(), matrix: m });
                }
            }
        }
        SheafModule { space: space.clone(), stalks, restr }
    }

    pub fn zero(space: &FinSpace) -> SheafModule {
        let stalks: Vec<FpModule> = space.stalks().iter().map(FpModule::zero).collect();
        let mut restr = HashMap::new();
        for x in 0..space.len() {
            for y in 0..space.len() {
                if space.leq(x, y) {
                    let b = base_changed(&stalks[x], space.restriction(x, y));
                    restr.insert((x, y), ModHom::zero(&b, &stalks[y]));
                }
            }
        }
        SheafModule { space: space.clone(), stalks, restr }
    }

    pub fn space(&self) -> &FinSpace {
        &self.space
    }

    pub fn stalk(&self, x: usize) -> &FpModule {
        &self.stalks[x]
    }

    pub fn stalks(&self) -> &[FpModule] {
        &self.stalks
    }

    /// The stored map `M_x ⊗ O_y → M_y`.
    pub fn restriction(&self, x: usize, y: usize) -> &ModHom {
        &self.restr[&(x, y)]
    }

    /// Restricts `v ∈ M_x` to `M_y`.
    pub fn restrict(&self, x: usize, y: usize, v: &[Elem]) -> ModElem {
        apply_semilinear(&self.space, &self.restr[&(x, y)], x, y, v)
    }

    pub fn is_graded(&self) -> bool {
        self.stalks.iter().all(|m| m.is_graded())
    }

    /// Same sheaf with every generator shifted by `d` (`O(d)` from `O`).
    pub fn twist(&self, d: &[i64]) -> Result<SheafModule> {
        let stalks: Vec<FpModule> = self.stalks.iter().map(|m| m.twist(d)).collect::<Result<_>>()?;
        let mut restr = HashMap::new();
        for (&(x, y), h) in &self.restr {
            let src = base_changed(&stalks[x], self.space.restriction(x, y));
            restr.insert((x, y), ModHom { source: src, target: stalks[y].clone(), matrix: h.matrix.clone() });
        }
        Ok(SheafModule { space: self.space.clone(), stalks, restr })
    }

    /// Identity and composition laws on generators.
    pub fn validate(&self) -> Vec<String> {
        let s = &self.space;
        let mut issues = Vec::new();
        for x in 0..s.len() {
            for (k, g) in self.stalks[x].generators().iter().enumerate() {
                if !self.stalks[x].eq_elem(&self.restrict(x, x, g), g) {
                    issues.push(format!("restriction at `{}` moves generator {k}", s.name(x)));
                }
                for y in 0..s.len() {
                    if y == x || !s.leq(x, y) {
                        continue;
                    }
                    let gy = self.restrict(x, y, g);
                    for z in 0..s.len() {
                        if z == y || !s.leq(y, z) {
                            continue;
                        }
                        if !self.stalks[z].eq_elem(&self.restrict(y, z, &gy), &self.restrict(x, z, g)) {
                            issues.push(format!(
                                "module restrictions {} → {} → {} do not compose",
                                s.name(x),
                                s.name(y),
                                s.name(z)
                            ));
                        }
                    }
                }
            }
        }
        issues
    }

    /// Quasi-coherence: every `M_x ⊗ O_y → M_y` is an isomorphism.
    pub fn is_quasi_coherent(&self) -> QcReport {
        let mut failing = Vec::new();
        for x in 0..self.space.len() {
            for y in self.space.covers_of(x) {
                if !self.restr[&(x, y)].is_isomorphism() {
                    failing.push((x, y));
                }
            }
        }
        QcReport { quasi_coherent: failing.is_empty(), failing }
    }

    /// Restriction to an open subspace (given with its inclusion map).
    pub fn restrict_to(&self, inc: &SpaceMap) -> SheafModule {
        let u = inc.source();
        let pts = inc.point_map();
        let stalks: Vec<FpModule> = pts.iter().map(|&p| self.stalks[p].clone()).collect();
        let mut restr = HashMap::new();
        for i in 0..u.len() {
            for j in 0..u.len() {
                if u.leq(i, j) {
                    restr.insert((i, j), self.restr[&(pts[i], pts[j])].clone());
                }
            }
        }
        SheafModule { space: u.clone(), stalks, restr }
    }

    /// `M ⊕ N`.
    pub fn direct_sum(&self, other: &SheafModule) -> Result<SheafModule> {
        let mut stalks = Vec::new();
        for x in 0..self.space.len() {
            stalks.push(self.stalks[x].direct_sum(&other.stalks[x])?);
        }
        let mut edges = Vec::new();
        for x in 0..self.space.len() {
            for y in self.space.covers_of(x) {
                let a = &self.restr[&(x, y)].matrix;
                let b = &other.restr[&(x, y)].matrix;
                let zero = self.space.stalk(y).zero();
                let (na, nb) = (self.stalks[y].ngens(), other.stalks[y].ngens());
                let mut m: Vec<ModElem> = a.iter().map(|r| r.iter().cloned().chain(vec![zero.clone(); nb]).collect()).collect();
                m.extend(b.iter().map(|r| vec![zero.clone(); na].into_iter().chain(r.iter().cloned()).collect()));
                edges.push(((x, y), m));
            }
        }
        SheafModule::from_edges(&self.space, stalks, edges)
    }
}

/// The source of a stored restriction: `M_x ⊗ O_y` along `r`.
fn base_changed(m: &FpModule, r: &AlgHom) -> FpModule {
    m.base_change(r).expect("base change along a restriction")
}

fn edge_hom(space: &FinSpace, stalks: &[FpModule], x: usize, y: usize, images: Vec<ModElem>) -> Result<ModHom> {
    let src = stalks[x].base_change(space.restriction(x, y))?;
    ModHom::new(&src, &stalks[y], images).map_err(|e| {
        Error::InvalidModule(format!("module restriction {} → {}: {e}", space.name(x), space.name(y)))
    })
}

fn apply_semilinear(space: &FinSpace, h: &ModHom, x: usize, y: usize, v: &[Elem]) -> ModElem {
    let r = space.restriction(x, y);
    let w: ModElem = v.iter().map(|a| r.apply(a)).collect();
    h.target.nf(&h.apply(&w))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcReport {
    pub quasi_coherent: bool,
    /// Covering pairs whose induced map is not an isomorphism.
    pub failing: Vec<(usize, usize)>,
}

/// A morphism of sheaves; `maps[x]: M_x → N_x`.
#[derive(Clone, Debug)]
pub struct SheafModHom {
    pub source: SheafModule,
    pub target: SheafModule,
    pub maps: Vec<ModHom>,
}

impl SheafModHom {
    pub fn new(source: &SheafModule, target: &SheafModule, maps: Vec<ModHom>) -> Result<SheafModHom> {
        let s = &source.space;
        if maps.len() != s.len() {
            return Err(Error::InvalidModule("one map per point is required".into()));
        }
        let h = SheafModHom { source: source.clone(), target: target.clone(), maps };
        for x in 0..s.len() {
            for y in s.covers_of(x) {
                for g in source.stalks[x].generators() {
                    let a = target.restrict(x, y, &h.maps[x].apply(&g));
                    let b = h.maps[y].apply(&source.restrict(x, y, &g));
                    if !target.stalks[y].eq_elem(&a, &b) {
                        return Err(Error::InvalidModule(format!(
                            "sheaf map does not commute with {} → {}",
                            s.name(x),
                            s.name(y)
                        )));
                    }
                }
            }
        }
        Ok(h)
    }

    pub fn identity(m: &SheafModule) -> SheafModHom {
        SheafModHom { source: m.clone(), target: m.clone(), maps: m.stalks.iter().map(ModHom::identity).collect() }
    }

    pub fn zero(source: &SheafModule, target: &SheafModule) -> SheafModHom {
        let maps = source.stalks.iter().zip(&target.stalks).map(|(a, b)| ModHom::zero(a, b)).collect();
        SheafModHom { source: source.clone(), target: target.clone(), maps }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SheafModHom) -> SheafModHom {
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.then(b)).collect();
        SheafModHom { source: self.source.clone(), target: other.target.clone(), maps }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }

    /// Pointwise kernel with its inclusion.
    pub fn kernel(&self) -> Result<(SheafModule, SheafModHom)> {
        let s = &self.source.space;
        let ks: Vec<(FpModule, ModHom)> = self.maps.iter().map(|m| m.kernel()).collect();
        let stalks: Vec<FpModule> = ks.iter().map(|k| k.0.clone()).collect();
        let mut edges = Vec::new();
        for x in 0..s.len() {
            for y in s.covers_of(x) {
                let mut rows = Vec::new();
                for g in &ks[x].1.matrix {
                    let w = self.source.restrict(x, y, g);
                    let c = self.source.stalks[y].lift(&ks[y].1.matrix, &w).ok_or_else(|| {
                        Error::InvalidModule(format!("kernel restriction {} → {} leaves the kernel", s.name(x), s.name(y)))
                    })?;
                    rows.push(c);
                }
                edges.push(((x, y), rows));
            }
        }
        let k = SheafModule::from_edges(s, stalks, edges)?;
        let inc = SheafModHom { source: k.clone(), target: self.source.clone(), maps: ks.into_iter().map(|p| p.1).collect() };
        Ok((k, inc))
    }

    /// Pointwise cokernel with its projection.
    pub fn cokernel(&self) -> Result<(SheafModule, SheafModHom)> {
        let s = &self.source.space;
        let cs: Vec<(FpModule, ModHom)> = self.maps.iter().map(|m| m.cokernel()).collect();
        let stalks: Vec<FpModule> = cs.iter().map(|c| c.0.clone()).collect();
        let mut edges = Vec::new();
        for x in 0..s.len() {
            for y in s.covers_of(x) {
                edges.push(((x, y), self.target.restr[&(x, y)].matrix.clone()));
            }
        }
        let c = SheafModule::from_edges(s, stalks, edges)?;
        let proj = SheafModHom { source: self.target.clone(), target: c.clone(), maps: cs.into_iter().map(|p| p.1).collect() };
        Ok((c, proj))
    }
}

/// `f^*N`: stalk at `x` is `N_{f(x)} ⊗ O_x`.
pub fn pullback(f: &SpaceMap, n: &SheafModule) -> Result<SheafModule> {
    let x = f.source();
    let mut stalks = Vec::with_capacity(x.len());
    for p in 0..x.len() {
        stalks.push(n.stalk(f.at(p)).base_change(f.comorphism(p))?);
    }
    let mut edges = Vec::new();
    for p in 0..x.len() {
        for q in x.covers_of(p) {
            let c = f.comorphism(q);
            let rows: Vec<ModElem> = n
                .stalk(f.at(p))
                .generators()
                .iter()
                .map(|g| n.restrict(f.at(p), f.at(q), g).iter().map(|e| c.apply(e)).collect())
                .collect();
            edges.push(((p, q), rows));
        }
    }
    SheafModule::from_edges(x, stalks, edges)
}

/// `M̃` on a space with presented global sections: `M̃_x = M ⊗_{O(X)} O_x`.
pub fn tilde(m: &FpModule, x: &FinSpace) -> Result<SheafModule> {
    let gs = x
        .global_sections()
        .ok_or_else(|| Error::SectionsNotPresented("O(X) is not presented for this space".into()))?;
    if m.ring() != &gs.algebra {
        return Err(Error::InvalidModule("module is not over O(X)".into()));
    }
    let pi = SpaceMap::to_point(x, &gs.algebra, gs.maps.clone())?;
    let pt = pi.target().clone();
    let n = SheafModule::from_edges(&pt, vec![m.clone()], vec![])?;
    pullback(&pi, &n)
}

/// `f_*M` with stalks `M(f⁻¹(U_y))`.
#[derive(Clone, Debug)]
pub struct Pushforward {
    pub map: SpaceMap,
    pub module: SheafModule,
    /// `f⁻¹(U_y)` for every target point `y`.
    pub preimages: Vec<Vec<usize>>,
}

pub fn pushforward(f: &SpaceMap, m: &SheafModule) -> Pushforward {
    let y = f.target();
    let preimages = (0..y.len()).map(|q| f.preimage(&y.up(q))).collect();
    Pushforward { map: f.clone(), module: m.clone(), preimages }
}

impl Pushforward {
    /// A presented form, available when every `f⁻¹(U_y)` has a minimum
    /// `m_y` and `O_y → O_{m_y}` is surjective (then `M_{m_y}` is finitely
    /// presented over `O_y`).
    pub fn presented(&self) -> Result<SheafModule> {
        let f = &self.map;
        let (x, y) = (f.source(), f.target());
        let mut mins = Vec::new();
        let mut ring_maps = Vec::new();
        for q in 0..y.len() {
            let pre = &self.preimages[q];
            let m = x.minimum(pre).ok_or_else(|| {
                Error::SectionsNotPresented(format!("f⁻¹(U_{}) has no minimum", y.name(q)))
            })?;
            let phi = y.restriction(q, f.at(m)).then(f.comorphism(m));
            if !phi.is_surjective() {
                return Err(Error::SectionsNotPresented(format!(
                    "O_{} → O_{} is not surjective",
                    y.name(q),
                    x.name(m)
                )));
            }
            mins.push(m);
            ring_maps.push(phi);
        }
        let mut stalks = Vec::new();
        for q in 0..y.len() {
            stalks.push(restrict_scalars(self.module.stalk(mins[q]), &ring_maps[q])?);
        }
        let mut edges = Vec::new();
        for q in 0..y.len() {
            for r in y.covers_of(q) {
                let mq = self.module.stalk(mins[q]);
                let rows: Vec<ModElem> = mq
                    .generators()
                    .iter()
                    .map(|g| {
                        let w = self.module.restrict(mins[q], mins[r], g);
                        w.iter().map(|e| ring_maps[r].preimage(e).expect("surjective")).collect()
                    })
                    .collect();
                edges.push(((q, r), rows));
            }
        }
        SheafModule::from_edges(y, stalks, edges)
    }
}

/// `M` viewed over `A` along a surjection `φ: A → B`.
fn restrict_scalars(m: &FpModule, phi: &AlgHom) -> Result<FpModule> {
    let a = phi.source();
    let lift = |e: &Elem| phi.preimage(e).ok_or_else(|| Error::InvalidHom("ring map is not surjective".into()));
    let mut rows: Vec<ModElem> = Vec::new();
    for r in m.relations() {
        rows.push(r.iter().map(lift).collect::<Result<_>>()?);
    }
    for k in phi.kernel_gens() {
        for j in 0..m.ngens() {
            let mut v = vec![a.zero(); m.ngens()];
            v[j] = k.clone();
            rows.push(v);
        }
    }
    let shifts = if a.is_graded() { m.shifts().map(|s| s.to_vec()) } else { None };
    FpModule::new(a, m.ngens(), rows.clone(), shifts).or_else(|_| FpModule::new(a, m.ngens(), rows, None))
}

/// An ideal sheaf `I ⊆ O`, given by generators of every `I_x`.
#[derive(Clone, Debug)]
pub struct IdealSheaf {
    pub space: FinSpace,
    pub gens: Vec<Vec<Elem>>,
}

impl IdealSheaf {
    pub fn new(space: &FinSpace, gens: Vec<Vec<Elem>>) -> Result<IdealSheaf> {
        if gens.len() != space.len() {
            return Err(Error::InvalidModule("one generator list per point is required".into()));
        }
        let s = IdealSheaf { space: space.clone(), gens };
        for x in 0..space.len() {
            for y in space.covers_of(x) {
                for g in &s.gens[x] {
                    let r = space.restriction(x, y).apply(g);
                    if !space.stalk(y).ideal_contains(&s.gens[y], &r) {
                        return Err(Error::InvalidModule(format!(
                            "ideal at `{}` does not restrict into the ideal at `{}`",
                            space.name(x),
                            space.name(y)
                        )));
                    }
                }
            }
        }
        Ok(s)
    }

    /// The ideal as a sheaf of modules (generators of `I_x` as generators,
    /// their syzygies as relations).
    pub fn to_module(&self) -> Result<SheafModule> {
        let s = &self.space;
        let mut stalks = Vec::new();
        for x in 0..s.len() {
            let a = s.stalk(x);
            let vecs: Vec<ModElem> = self.gens[x].iter().map(|g| vec![g.clone()]).collect();
            let one = FpModule::free(a, 1);
            let rels = one.syzygies(&vecs);
            let shifts = if a.is_graded() {
                self.gens[x].iter().map(|g| a.degree(g)).collect::<Option<Vec<_>>>()
            } else {
                None
            };
            stalks.push(
                FpModule::new(a, vecs.len(), rels.clone(), shifts).or_else(|_| FpModule::new(a, vecs.len(), rels, None))?,
            );
        }
        let mut edges = Vec::new();
        for x in 0..s.len() {
            for y in s.covers_of(x) {
                let b = s.stalk(y);
                let gy: Vec<ModElem> = self.gens[y].iter().map(|g| vec![g.clone()]).collect();
                let one = FpModule::free(b, 1);
                let rows = self.gens[x]
                    .iter()
                    .map(|g| one.lift(&gy, &[s.restriction(x, y).apply(g)]).expect("ideal restricts into ideal"))
                    .collect();
                edges.push(((x, y), rows));
            }
        }
        SheafModule::from_edges(s, stalks, edges)
    }

    /// Pointwise radical.
    pub fn radical(&self, bound: u32) -> Result<IdealSheaf> {
        let mut gens = Vec::new();
        for x in 0..self.space.len() {
            gens.push(self.space.stalk(x).radical(&self.gens[x], bound)?);
        }
        IdealSheaf::new(&self.space, gens)
    }

    pub fn equals(&self, other: &IdealSheaf) -> bool {
        (0..self.space.len()).all(|x| {
            let a = self.space.stalk(x);
            self.gens[x].iter().all(|g| a.ideal_contains(&other.gens[x], g))
                && other.gens[x].iter().all(|g| a.ideal_contains(&self.gens[x], g))
        })
    }
}

pub fn radical_ideal_sheaf(i: &IdealSheaf, bound: u32) -> Result<IdealSheaf> {
    i.radical(bound)
}

/// Free of rank one at every point, restrictions sending the generator to
/// the given units (e.g. `x^d` for `O(d)` on the line).
pub fn line_bundle(space: &FinSpace, shifts: Option<Vec<Vec<i64>>>, transitions: Vec<((usize, usize), Elem)>) -> Result<SheafModule> {
    let stalks: Vec<FpModule> = (0..space.len())
        .map(|x| match &shifts {
            Some(s) => FpModule::free_shifted(space.stalk(x), vec![s[x].clone()]),
            None => Ok(FpModule::free(space.stalk(x), 1)),
        })
        .collect::<Result<_>>()?;
    let edges = transitions.into_iter().map(|(e, u)| (e, vec![vec![u]])).collect();
    SheafModule::from_edges(space, stalks, edges)
}

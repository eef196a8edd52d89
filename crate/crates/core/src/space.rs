//! Finite ringed spaces: a finite preorder with a [`LocAlgebra`] at every
//! point and restriction homomorphisms `r_xy: O_x → O_y` for `x ≤ y`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::algebra::LocAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::{copair, tensor, AlgHom, HomKind, Tensor};

/// `O(X)` given explicitly, with its maps to every stalk.
#[derive(Clone, Debug)]
pub struct GlobalSections {
    pub algebra: LocAlgebra,
    pub maps: Vec<AlgHom>,
}

struct SpaceInner {
    field: Field,
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    stalks: Vec<LocAlgebra>,
    restr: HashMap<(usize, usize), AlgHom>,
    global: Option<GlobalSections>,
    chains: OnceLock<Vec<Vec<usize>>>,
}

#[derive(Clone)]
pub struct FinSpace {
    inner: Arc<SpaceInner>,
}

impl fmt::Debug for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FinSpace over {} with {} points", self.field(), self.len())?;
        for x in 0..self.len() {
            let above: Vec<&str> = self.covers_of(x).iter().map(|&y| self.name(y)).collect();
            writeln!(f, "  {} : {}  < {}", self.name(x), self.stalk(x), above.join(", "))?;
        }
        Ok(())
    }
}

fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        leq[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

impl FinSpace {
    /// Builds a space from restrictions along `edges` (typically the covering
    /// pairs); restrictions between other comparable pairs are composed
    /// along a shortest path of edges.
    pub fn from_edges(
        field: Field,
        names: Vec<String>,
        stalks: Vec<LocAlgebra>,
        edges: Vec<((usize, usize), AlgHom)>,
    ) -> Result<FinSpace> {
        let n = names.len();
        if stalks.len() != n {
            return Err(Error::InvalidSpace(format!("{} stalks for {n} points", stalks.len())));
        }
        for (i, nm) in names.iter().enumerate() {
            if names[..i].contains(nm) {
                return Err(Error::InvalidSpace(format!("duplicate point `{nm}`")));
            }
        }
        for s in &stalks {
            if s.field() != field {
                return Err(Error::FieldMismatch(format!("stalk {s} is not over {field}")));
            }
        }
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| e.0).collect();
        let leq = transitive_closure(n, &pairs);
        let mut given: HashMap<(usize, usize), AlgHom> = HashMap::new();
        for ((a, b), h) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidSpace("edge refers to an unknown point".into()));
            }
            if h.source() != &stalks[a] || h.target() != &stalks[b] {
                return Err(Error::InvalidSpace(format!(
                    "restriction {} → {} does not connect the stalks",
                    names[a], names[b]
                )));
            }
            given.insert((a, b), h);
        }
        let mut restr = HashMap::new();
        for x in 0..n {
            // BFS over given edges from x
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
                if !leq[x][y] {
                    continue;
                }
                let h = if x == y {
                    AlgHom::identity(&stalks[x])
                } else if let Some(h) = given.get(&(x, y)) {
                    h.clone()
                } else {
                    let mut path = vec![y];
                    let mut cur = y;
                    while let Some(p) = prev[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    let mut h = given[&(path[0], path[1])].clone();
                    for w in path[1..].windows(2) {
                        h = h.then(&given[&(w[0], w[1])]);
                    }
                    h
                };
                restr.insert((x, y), h);
            }
        }
        Ok(FinSpace::assemble(field, names, leq, stalks, restr, None))
    }

    pub(crate) fn assemble(
        field: Field,
        names: Vec<String>,
        leq: Vec<Vec<bool>>,
        stalks: Vec<LocAlgebra>,
        restr: HashMap<(usize, usize), AlgHom>,
        global: Option<GlobalSections>,
    ) -> FinSpace {
        FinSpace { inner: Arc::new(SpaceInner { field, names, leq, stalks, restr, global, chains: OnceLock::new() }) }
    }

    /// The one-point space `(*, R)`.
    pub fn point(ring: &LocAlgebra) -> FinSpace {
        let mut restr = HashMap::new();
        restr.insert((0, 0), AlgHom::identity(ring));
        FinSpace::assemble(ring.field(), vec!["*".into()], vec![vec![true]], vec![ring.clone()], restr, None)
    }

    /// Attaches an explicit presentation of `O(X)`; the maps must commute
    /// with the restrictions.
    pub fn with_global_sections(&self, gs: GlobalSections) -> Result<FinSpace> {
        if gs.maps.len() != self.len() {
            return Err(Error::InvalidSpace("one global-section map per point is required".into()));
        }
        for x in 0..self.len() {
            if gs.maps[x].source() != &gs.algebra || gs.maps[x].target() != self.stalk(x) {
                return Err(Error::InvalidSpace(format!("global-section map to `{}` has wrong ends", self.name(x))));
            }
        }
        for (&(x, y), r) in &self.inner.restr {
            if !gs.maps[x].then(r).equal_on_generators(&gs.maps[y]) {
                return Err(Error::InvalidSpace(format!(
                    "global sections do not commute with {} → {}",
                    self.name(x),
                    self.name(y)
                )));
            }
        }
        let i = &self.inner;
        Ok(FinSpace::assemble(i.field, i.names.clone(), i.leq.clone(), i.stalks.clone(), i.restr.clone(), Some(gs)))
    }

    pub fn field(&self) -> Field {
        self.inner.field
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.inner.names[x]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.inner.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.inner.leq[x][y]
    }

    /// Strictly below in the preorder.
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && !self.leq(y, x)
    }

    pub fn stalk(&self, x: usize) -> &LocAlgebra {
        &self.inner.stalks[x]
    }

    pub fn stalks(&self) -> &[LocAlgebra] {
        &self.inner.stalks
    }

    pub fn restriction(&self, x: usize, y: usize) -> &AlgHom {
        self.inner
            .restr
            .get(&(x, y))
            .unwrap_or_else(|| panic!("{} is not below {}", self.name(x), self.name(y)))
    }

    pub fn global_sections(&self) -> Option<&GlobalSections> {
        self.inner.global.as_ref()
    }

    /// Points directly above `x` (covering relation, up to equivalence).
    pub fn covers_of(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.lt(x, y) && !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    /// All covering pairs `x < y` (strict order).
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|x| self.covers_of(x).into_iter().map(move |y| (x, y))).collect()
    }

    /// `U_x = {y : y ≥ x}`.
    pub fn up(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(x, y)).collect()
    }

    pub fn down(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(y, x)).collect()
    }

    /// `U_xy = U_x ∩ U_y`.
    pub fn u_xy(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq(x, z) && self.leq(y, z)).collect()
    }

    pub fn all_points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    pub fn is_open(&self, u: &[usize]) -> bool {
        u.iter().all(|&x| (0..self.len()).all(|y| !self.leq(x, y) || u.contains(&y)))
    }

    pub fn check_open(&self, u: &[usize]) -> Result<()> {
        if self.is_open(u) {
            Ok(())
        } else {
            let names: Vec<&str> = u.iter().map(|&x| self.name(x)).collect();
            Err(Error::NotOpen(format!("{{{}}}", names.join(", "))))
        }
    }

    /// Minimal elements of a subset (all members of minimal classes).
    pub fn minimal_points(&self, u: &[usize]) -> Vec<usize> {
        u.iter().copied().filter(|&x| !u.iter().any(|&y| self.lt(y, x))).collect()
    }

    /// A point of `u` below every point of `u`, if any.
    pub fn minimum(&self, u: &[usize]) -> Option<usize> {
        u.iter().copied().find(|&m| u.iter().all(|&y| self.leq(m, y)))
    }

    pub fn is_t0(&self) -> bool {
        (0..self.len()).all(|x| (0..self.len()).all(|y| x == y || !(self.leq(x, y) && self.leq(y, x))))
    }

    /// Strict chains `x_0 < … < x_n` (cached).
    pub fn chains(&self) -> &[Vec<usize>] {
        self.inner.chains.get_or_init(|| {
            let n = self.len();
            let mut out: Vec<Vec<usize>> = Vec::new();
            let mut stack: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
            while let Some(c) = stack.pop() {
                let last = *c.last().unwrap();
                for y in 0..n {
                    if self.lt(last, y) {
                        let mut d = c.clone();
                        d.push(y);
                        stack.push(d);
                    }
                }
                out.push(c);
            }
            out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            out
        })
    }

    /// Length of the longest strict chain (number of points − 1).
    pub fn dimension(&self) -> usize {
        self.chains().iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }

    /// Checks the preorder axioms and the restriction laws; returns the
    /// violations found (empty means valid).
    pub fn validate(&self) -> Vec<String> {
        let n = self.len();
        let mut issues = Vec::new();
        for x in 0..n {
            if !self.leq(x, x) {
                issues.push(format!("order is not reflexive at {}", self.name(x)));
            }
            for y in 0..n {
                for z in 0..n {
                    if self.leq(x, y) && self.leq(y, z) && !self.leq(x, z) {
                        issues.push(format!("order is not transitive at {} ≤ {} ≤ {}", self.name(x), self.name(y), self.name(z)));
                    }
                }
            }
        }
        for x in 0..n {
            if !self.restriction(x, x).equal_on_generators(&AlgHom::identity(self.stalk(x))) {
                issues.push(format!("restriction {0} → {0} is not the identity", self.name(x)));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x == y || !self.leq(x, y) {
                    continue;
                }
                let rxy = self.restriction(x, y);
                if rxy.is_localization() && !rxy.verify_localization() {
                    issues.push(format!("restriction {} → {} is not the declared localization", self.name(x), self.name(y)));
                }
                for z in 0..n {
                    if z == y || !self.leq(y, z) {
                        continue;
                    }
                    let comp = rxy.then(self.restriction(y, z));
                    if !comp.equal_on_generators(self.restriction(x, z)) {
                        issues.push(format!(
                            "r({0},{2}) differs from r({1},{2})∘r({0},{1})",
                            self.name(x),
                            self.name(y),
                            self.name(z)
                        ));
                    }
                }
            }
        }
        if let Some(gs) = self.global_sections() {
            for (&(x, y), r) in &self.inner.restr {
                if !gs.maps[x].then(r).equal_on_generators(&gs.maps[y]) {
                    issues.push(format!("global sections do not commute with {} → {}", self.name(x), self.name(y)));
                }
            }
        }
        issues
    }

    /// Induced subspace on any subset (restrictions inherited); returns the
    /// space and the inclusion map.
    pub fn subspace(&self, pts: &[usize]) -> (FinSpace, SpaceMap) {
        let mut pts = pts.to_vec();
        pts.sort();
        pts.dedup();
        let names = pts.iter().map(|&x| self.name(x).to_string()).collect();
        let leq = pts.iter().map(|&x| pts.iter().map(|&y| self.leq(x, y)).collect()).collect();
        let stalks: Vec<LocAlgebra> = pts.iter().map(|&x| self.stalk(x).clone()).collect();
        let mut restr = HashMap::new();
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                if self.leq(x, y) {
                    restr.insert((i, j), self.restriction(x, y).clone());
                }
            }
        }
        let global = if pts.len() == self.len() { self.inner.global.clone() } else { None };
        let sub = FinSpace::assemble(self.field(), names, leq, stalks.clone(), restr, global);
        let comorphisms = stalks.iter().map(AlgHom::identity).collect();
        let inc = SpaceMap::from_parts(&sub, self, pts, comorphisms);
        (sub, inc)
    }

    pub fn open_subspace(&self, u: &[usize]) -> Result<(FinSpace, SpaceMap)> {
        self.check_open(u)?;
        Ok(self.subspace(u))
    }

    pub fn sections(&self, u: &[usize]) -> Result<Sections> {
        self.check_open(u)?;
        let mut u = u.to_vec();
        u.sort();
        Ok(Sections { space: self.clone(), open: u })
    }

    /// Kolmogorov quotient with the quotient map and a section of it.
    pub fn kolmogorov_quotient(&self) -> KolmogorovQuotient {
        let n = self.len();
        let mut class = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..n {
            if class[x] != usize::MAX {
                continue;
            }
            for y in x..n {
                if self.leq(x, y) && self.leq(y, x) {
                    class[y] = reps.len();
                }
            }
            reps.push(x);
        }
        let (q, section) = self.subspace(&reps);
        // subspace sorts its points; reps are increasing so indices agree
        let point_map: Vec<usize> = class.clone();
        let comorphisms = (0..n).map(|x| self.restriction(reps[class[x]], x).clone()).collect();
        let quotient = SpaceMap::from_parts(self, &q, point_map, comorphisms);
        KolmogorovQuotient { space: q, quotient, section, classes: class }
    }

    /// Searches for an isomorphism `self → other` (poset bijection plus
    /// compatible stalk isomorphisms).
    pub fn find_isomorphism(&self, other: &FinSpace) -> Option<SpaceMap> {
        let n = self.len();
        if n != other.len() || self.field() != other.field() {
            return None;
        }
        let sig = |s: &FinSpace, x: usize| (s.up(x).len(), s.down(x).len(), s.stalk(x).nvars(), s.stalk(x).ninv());
        let mut assign: Vec<Option<usize>> = vec![None; n];
        let mut used = vec![false; n];
        let mut comorph_cache: HashMap<(usize, usize), Option<AlgHom>> = HashMap::new();
        fn rec(
            a: &FinSpace,
            b: &FinSpace,
            k: usize,
            assign: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            cache: &mut HashMap<(usize, usize), Option<AlgHom>>,
            sig: &dyn Fn(&FinSpace, usize) -> (usize, usize, usize, usize),
        ) -> Option<SpaceMap> {
            let n = a.len();
            if k == n {
                let pm: Vec<usize> = assign.iter().map(|v| v.unwrap()).collect();
                let comorphisms: Vec<AlgHom> = (0..n).map(|x| cache[&(x, pm[x])].clone().unwrap()).collect();
                let f = SpaceMap::from_parts(a, b, pm, comorphisms);
                return if f.squares_commute().is_empty() { Some(f) } else { None };
            }
            for t in 0..n {
                if used[t] || sig(a, k) != sig(b, t) {
                    continue;
                }
                let order_ok = (0..k).all(|j| {
                    let tj = assign[j].unwrap();
                    a.leq(j, k) == b.leq(tj, t) && a.leq(k, j) == b.leq(t, tj)
                });
                if !order_ok {
                    continue;
                }
                let iso = cache.entry((k, t)).or_insert_with(|| stalk_iso(b.stalk(t), a.stalk(k))).clone();
                if iso.is_none() {
                    continue;
                }
                assign[k] = Some(t);
                used[t] = true;
                if let Some(f) = rec(a, b, k + 1, assign, used, cache, sig) {
                    return Some(f);
                }
                assign[k] = None;
                used[t] = false;
            }
            None
        }
        rec(self, other, 0, &mut assign, &mut used, &mut comorph_cache, &sig)
    }
}

/// An isomorphism `b → a` matching variables by name, if one exists.
fn stalk_iso(b: &LocAlgebra, a: &LocAlgebra) -> Option<AlgHom> {
    if a == b {
        return Some(AlgHom::identity(a));
    }
    if a.nvars() != b.nvars() || a.field() != b.field() {
        return None;
    }
    let images: Option<Vec<_>> = b.vars().iter().map(|v| a.vars().iter().position(|w| w == v).map(|i| a.var(i))).collect();
    let h = AlgHom::new(b, a, images?, HomKind::General).ok()?;
    if h.is_isomorphism() {
        Some(h.with_kind(HomKind::Localization(vec![])))
    } else {
        None
    }
}

/// The limit `O(U)` as the equalizer inside `∏_{m minimal} O_m`.
#[derive(Clone, Debug)]
pub struct Sections {
    pub space: FinSpace,
    pub open: Vec<usize>,
}

impl Sections {
    pub fn minimal_points(&self) -> Vec<usize> {
        self.space.minimal_points(&self.open)
    }

    /// Whether a family `(f_m)` over the minimal points glues.
    pub fn contains(&self, family: &[crate::algebra::Elem]) -> bool {
        let mins = self.minimal_points();
        assert_eq!(family.len(), mins.len());
        for &z in &self.open {
            let imgs: Vec<_> = mins
                .iter()
                .zip(family)
                .filter(|(&m, _)| self.space.leq(m, z))
                .map(|(&m, f)| self.space.restriction(m, z).apply(f))
                .collect();
            if imgs.windows(2).any(|w| !self.space.stalk(z).eq_elem(&w[0], &w[1])) {
                return false;
            }
        }
        true
    }

    /// A presentation of `O(U)`, when one is available: the stalk at a
    /// minimum, or the attached global sections for `U = X`.
    pub fn presented(&self) -> Option<(LocAlgebra, Vec<(usize, AlgHom)>)> {
        if let Some(m) = self.space.minimum(&self.open) {
            let maps = self.open.iter().map(|&z| (z, self.space.restriction(m, z).clone())).collect();
            return Some((self.space.stalk(m).clone(), maps));
        }
        if self.open.len() == self.space.len() {
            if let Some(gs) = self.space.global_sections() {
                let maps = self.open.iter().map(|&z| (z, gs.maps[z].clone())).collect();
                return Some((gs.algebra.clone(), maps));
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct KolmogorovQuotient {
    pub space: FinSpace,
    pub quotient: SpaceMap,
    pub section: SpaceMap,
    pub classes: Vec<usize>,
}

/// A morphism of ringed spaces; `comorphisms[x]: O'_{f(x)} → O_x`.
#[derive(Clone)]
pub struct SpaceMap {
    source: FinSpace,
    target: FinSpace,
    point_map: Vec<usize>,
    comorphisms: Vec<AlgHom>,
}

impl fmt::Debug for SpaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> =
            (0..self.source.len()).map(|x| format!("{} ↦ {}", self.source.name(x), self.target.name(self.point_map[x]))).collect();
        write!(f, "SpaceMap[{}]", pts.join(", "))
    }
}

impl SpaceMap {
    pub fn new(source: &FinSpace, target: &FinSpace, point_map: Vec<usize>, comorphisms: Vec<AlgHom>) -> Result<SpaceMap> {
        if point_map.len() != source.len() || comorphisms.len() != source.len() {
            return Err(Error::InvalidSpace("map data does not match the source".into()));
        }
        if point_map.iter().any(|&y| y >= target.len()) {
            return Err(Error::InvalidSpace("point map leaves the target".into()));
        }
        for x in 0..source.len() {
            let c = &comorphisms[x];
            if c.source() != target.stalk(point_map[x]) || c.target() != source.stalk(x) {
                return Err(Error::InvalidSpace(format!("comorphism at `{}` has wrong ends", source.name(x))));
            }
        }
        let f = SpaceMap::from_parts(source, target, point_map, comorphisms);
        if let Some(v) = f.monotonicity_violation() {
            return Err(Error::InvalidSpace(v));
        }
        let bad = f.squares_commute();
        if !bad.is_empty() {
            return Err(Error::InvalidSpace(bad.join("; ")));
        }
        Ok(f)
    }

    pub(crate) fn from_parts(source: &FinSpace, target: &FinSpace, point_map: Vec<usize>, comorphisms: Vec<AlgHom>) -> SpaceMap {
        SpaceMap { source: source.clone(), target: target.clone(), point_map, comorphisms }
    }

    pub fn identity(x: &FinSpace) -> SpaceMap {
        SpaceMap::from_parts(x, x, x.all_points(), x.stalks().iter().map(AlgHom::identity).collect())
    }

    /// `X → (*, R)` given the structure maps `R → O_x`.
    pub fn to_point(x: &FinSpace, ring: &LocAlgebra, maps: Vec<AlgHom>) -> Result<SpaceMap> {
        let pt = FinSpace::point(ring);
        SpaceMap::new(x, &pt, vec![0; x.len()], maps)
    }

    /// `X → (*, k)`.
    pub fn to_ground(x: &FinSpace) -> SpaceMap {
        let k = LocAlgebra::ground(x.field());
        let maps = x.stalks().iter().map(|s| AlgHom::new(&k, s, vec![], HomKind::General).unwrap()).collect();
        SpaceMap::from_parts(x, &FinSpace::point(&k), vec![0; x.len()], maps)
    }

    pub fn source(&self) -> &FinSpace {
        &self.source
    }

    pub fn target(&self) -> &FinSpace {
        &self.target
    }

    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    pub fn at(&self, x: usize) -> usize {
        self.point_map[x]
    }

    pub fn comorphism(&self, x: usize) -> &AlgHom {
        &self.comorphisms[x]
    }

    pub fn comorphisms(&self) -> &[AlgHom] {
        &self.comorphisms
    }

    fn monotonicity_violation(&self) -> Option<String> {
        let s = &self.source;
        for x in 0..s.len() {
            for y in 0..s.len() {
                if s.leq(x, y) && !self.target.leq(self.point_map[x], self.point_map[y]) {
                    return Some(format!("point map is not monotone at {} ≤ {}", s.name(x), s.name(y)));
                }
            }
        }
        None
    }

    /// Violations of `r_{xx'} ∘ f#_x = f#_{x'} ∘ r'_{f(x)f(x')}`.
    pub fn squares_commute(&self) -> Vec<String> {
        let s = &self.source;
        let mut bad = Vec::new();
        for x in 0..s.len() {
            for y in 0..s.len() {
                if x == y || !s.leq(x, y) {
                    continue;
                }
                let (fx, fy) = (self.point_map[x], self.point_map[y]);
                if !self.target.leq(fx, fy) {
                    bad.push(format!("point map is not monotone at {} ≤ {}", s.name(x), s.name(y)));
                    continue;
                }
                let a = self.comorphisms[x].then(s.restriction(x, y));
                let b = self.target.restriction(fx, fy).then(&self.comorphisms[y]);
                if !a.equal_on_generators(&b) {
                    bad.push(format!("comorphism square at {} ≤ {} does not commute", s.name(x), s.name(y)));
                }
            }
        }
        bad
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SpaceMap) -> SpaceMap {
        let point_map = self.point_map.iter().map(|&y| g.point_map[y]).collect();
        let comorphisms =
            (0..self.source.len()).map(|x| g.comorphisms[self.point_map[x]].then(&self.comorphisms[x])).collect();
        SpaceMap::from_parts(&self.source, &g.target, point_map, comorphisms)
    }

    /// Literal equality: same point map, comorphisms agree on generators.
    pub fn equals(&self, other: &SpaceMap) -> bool {
        self.point_map == other.point_map
            && self.comorphisms.iter().zip(&other.comorphisms).all(|(a, b)| a.equal_on_generators(b))
    }

    /// `f⁻¹(U)` for a set of target points.
    pub fn preimage(&self, u: &[usize]) -> Vec<usize> {
        (0..self.source.len()).filter(|&x| u.contains(&self.point_map[x])).collect()
    }
}

// ---- constructions ----

/// `X ×_Y X'` with projections; `tensors[p]` holds the stalk at `p` with
/// its two canonical maps.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub space: FinSpace,
    pub p1: SpaceMap,
    pub p2: SpaceMap,
    pub pairs: Vec<(usize, usize)>,
    pub tensors: Vec<Tensor>,
}

pub fn fiber_product(f: &SpaceMap, g: &SpaceMap) -> Result<FiberProduct> {
    let (x, xp) = (f.source(), g.source());
    if f.target().len() != g.target().len() {
        return Err(Error::InvalidSpace("fiber product of maps to different spaces".into()));
    }
    let mut pairs = Vec::new();
    for a in 0..x.len() {
        for b in 0..xp.len() {
            if f.at(a) == g.at(b) {
                pairs.push((a, b));
            }
        }
    }
    let mut tensors = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        tensors.push(tensor(f.comorphism(a), g.comorphism(b))?);
    }
    let names: Vec<String> = pairs.iter().map(|&(a, b)| format!("({},{})", x.name(a), xp.name(b))).collect();
    let leq: Vec<Vec<bool>> =
        pairs.iter().map(|&(a, b)| pairs.iter().map(|&(c, d)| x.leq(a, c) && xp.leq(b, d)).collect()).collect();
    let stalks: Vec<LocAlgebra> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let mut restr = HashMap::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate() {
            if !leq[i][j] {
                continue;
            }
            if i == j {
                restr.insert((i, j), AlgHom::identity(&stalks[i]));
                continue;
            }
            let ra = x.restriction(a, c).then(&tensors[j].left);
            let rb = xp.restriction(b, d).then(&tensors[j].right);
            let h = induced_on_tensor(&tensors[i], &ra, &rb);
            restr.insert((i, j), h);
        }
    }
    let space = FinSpace::assemble(x.field(), names, leq, stalks, restr, None);
    let p1 = SpaceMap::from_parts(&space, x, pairs.iter().map(|p| p.0).collect(), tensors.iter().map(|t| t.left.clone()).collect());
    let p2 = SpaceMap::from_parts(&space, xp, pairs.iter().map(|p| p.1).collect(), tensors.iter().map(|t| t.right.clone()).collect());
    Ok(FiberProduct { space, p1, p2, pairs, tensors })
}

/// The map `A ⊗ B → C` determined by `ga: A → C`, `gb: B → C`, built
/// without re-validation; a localization when both are.
fn induced_on_tensor(t: &Tensor, ga: &AlgHom, gb: &AlgHom) -> AlgHom {
    let a = t.left.source();
    let b = t.right.source();
    let mut images = Vec::with_capacity(t.algebra.npvars());
    for i in 0..a.nvars() {
        images.push(ga.apply(&a.var(i)));
    }
    for i in 0..b.nvars() {
        images.push(gb.apply(&b.var(i)));
    }
    for j in 0..a.ninv() {
        images.push(ga.apply(&a.inv_var(j)));
    }
    for j in 0..b.ninv() {
        images.push(gb.apply(&b.inv_var(j)));
    }
    let kind = match (ga.extras(), gb.extras()) {
        (Some(ea), Some(eb)) => {
            // extras live in A and B; push them into the tensor
            let mut ex: Vec<_> = ea.iter().map(|e| t.left.apply(e)).collect();
            ex.extend(eb.iter().map(|e| t.right.apply(e)));
            HomKind::Localization(ex)
        }
        _ => HomKind::General,
    };
    AlgHom::from_parts(&t.algebra, ga.target(), images, kind)
}

impl FiberProduct {
    /// The map `Z → X ×_Y X'` induced by `a: Z → X`, `b: Z → X'`.
    pub fn pair(&self, a: &SpaceMap, b: &SpaceMap) -> Result<SpaceMap> {
        let z = a.source();
        let mut pm = Vec::with_capacity(z.len());
        let mut comorphisms = Vec::with_capacity(z.len());
        for p in 0..z.len() {
            let idx = self
                .pairs
                .iter()
                .position(|&q| q == (a.at(p), b.at(p)))
                .ok_or_else(|| Error::InvalidSpace("maps do not agree over the base".into()))?;
            pm.push(idx);
            comorphisms.push(copair(&self.tensors[idx], a.comorphism(p), b.comorphism(p))?);
        }
        SpaceMap::new(z, &self.space, pm, comorphisms)
    }
}

/// `X ×_R Y` for `R`-spaces given by their structure maps to `(*, R)`.
pub fn product_over_ring(x_to_r: &SpaceMap, y_to_r: &SpaceMap) -> Result<FiberProduct> {
    if x_to_r.target().len() != 1 || y_to_r.target().len() != 1 {
        return Err(Error::InvalidSpace("product over a ring needs maps to a one-point space".into()));
    }
    if x_to_r.target().stalk(0) != y_to_r.target().stalk(0) {
        return Err(Error::InvalidSpace("mismatched base rings".into()));
    }
    fiber_product(x_to_r, y_to_r)
}

/// `X × Y` over the ground field.
pub fn product(x: &FinSpace, y: &FinSpace) -> Result<FiberProduct> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", x.field(), y.field())));
    }
    fiber_product(&SpaceMap::to_ground(x), &SpaceMap::to_ground(y))
}

fn fresh_point_name(base: &str, used: &[String]) -> String {
    let mut n = base.to_string();
    while used.iter().any(|u| u == &n) {
        n.push('\'');
    }
    n
}

#[derive(Clone, Debug)]
pub struct Cylinder {
    pub space: FinSpace,
    /// `X ↪ C(f)` (open).
    pub inclusion: SpaceMap,
    /// `F: C(f) → Y`.
    pub retraction: SpaceMap,
    /// `Y ↪ C(f)` as point indices.
    pub y_points: Vec<usize>,
}

/// `C(f) = X ⊔ Y` with `y < x` iff `y ≤ f(x)`.
pub fn cylinder(f: &SpaceMap) -> Cylinder {
    let (x, y) = (f.source(), f.target());
    let (nx, ny) = (x.len(), y.len());
    let mut names: Vec<String> = x.names().to_vec();
    for nm in y.names() {
        let n = fresh_point_name(nm, &names);
        names.push(n);
    }
    let n = nx + ny;
    let mut leq = vec![vec![false; n]; n];
    for a in 0..nx {
        for b in 0..nx {
            leq[a][b] = x.leq(a, b);
        }
    }
    for a in 0..ny {
        for b in 0..ny {
            leq[nx + a][nx + b] = y.leq(a, b);
        }
        for b in 0..nx {
            leq[nx + a][b] = y.leq(a, f.at(b));
        }
    }
    let mut stalks: Vec<LocAlgebra> = x.stalks().to_vec();
    stalks.extend(y.stalks().iter().cloned());
    let mut restr = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            if !leq[i][j] {
                continue;
            }
            let h = match (i < nx, j < nx) {
                (true, true) => x.restriction(i, j).clone(),
                (false, false) => y.restriction(i - nx, j - nx).clone(),
                (false, true) => y.restriction(i - nx, f.at(j)).then(f.comorphism(j)),
                (true, false) => unreachable!(),
            };
            restr.insert((i, j), h);
        }
    }
    let space = FinSpace::assemble(x.field(), names, leq, stalks, restr, None);
    let inclusion = SpaceMap::from_parts(x, &space, (0..nx).collect(), x.stalks().iter().map(AlgHom::identity).collect());
    let mut pm: Vec<usize> = f.point_map().to_vec();
    pm.extend(0..ny);
    let mut comorphisms: Vec<AlgHom> = f.comorphisms().to_vec();
    comorphisms.extend(y.stalks().iter().map(AlgHom::identity));
    let retraction = SpaceMap::from_parts(&space, y, pm, comorphisms);
    Cylinder { space, inclusion, retraction, y_points: (nx..n).collect() }
}

/// `X ⊔ {u}` with `O_u = O(U)`, using the stalk at a minimum of `U` or the
/// attached global sections when `U = X`.
pub fn adjoin_point(x: &FinSpace, u: &[usize]) -> Result<FinSpace> {
    let sec = x.sections(u)?;
    let (ring, maps) = sec.presented().ok_or_else(|| {
        Error::SectionsNotPresented(format!("O(U) for U = {{{}}}", u.iter().map(|&p| x.name(p)).collect::<Vec<_>>().join(", ")))
    })?;
    let maps: Vec<AlgHom> = maps.into_iter().map(|(_, h)| h).collect();
    adjoin_point_with(x, u, &ring, &maps)
}

/// `X ⊔ {u}` with a supplied presentation `R` of `O(U)` and maps `R → O_z`
/// for `z ∈ U` (in the order of `U`).
pub fn adjoin_point_with(x: &FinSpace, u: &[usize], ring: &LocAlgebra, maps: &[AlgHom]) -> Result<FinSpace> {
    x.check_open(u)?;
    let mut u = u.to_vec();
    u.sort();
    if maps.len() != u.len() {
        return Err(Error::InvalidSpace("one map per point of U is required".into()));
    }
    let n = x.len();
    let below: Vec<usize> = (0..n).filter(|&p| !u.contains(&p) && u.iter().all(|&z| x.leq(p, z))).collect();
    let mut names = x.names().to_vec();
    names.push(fresh_point_name("u", &names));
    let mut leq = vec![vec![false; n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            leq[a][b] = x.leq(a, b);
        }
    }
    leq[n][n] = true;
    for &z in &u {
        leq[n][z] = true;
    }
    for &p in &below {
        leq[p][n] = true;
    }
    let mut stalks = x.stalks().to_vec();
    stalks.push(ring.clone());
    let mut restr = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if x.leq(a, b) {
                restr.insert((a, b), x.restriction(a, b).clone());
            }
        }
    }
    restr.insert((n, n), AlgHom::identity(ring));
    for (i, &z) in u.iter().enumerate() {
        restr.insert((n, z), maps[i].clone());
    }
    let mins = x.minimal_points(&u);
    for &p in &below {
        // O_p → O(U): preimage through the map to a minimal point, checked on all of U
        let m0 = u.iter().position(|&z| z == mins[0]).unwrap();
        let mut images = Vec::new();
        let sp = x.stalk(p);
        for v in 0..sp.nvars() {
            let target = x.restriction(p, mins[0]).apply(&sp.var(v));
            let pre = maps[m0].preimage(&target).ok_or_else(|| {
                Error::SectionsNotPresented(format!("restriction from `{}` does not factor through O(U)", x.name(p)))
            })?;
            images.push(pre);
        }
        let h = AlgHom::new(sp, ring, images, HomKind::General)
            .map_err(|e| Error::SectionsNotPresented(format!("restriction from `{}`: {e}", x.name(p))))?;
        for (i, &z) in u.iter().enumerate() {
            if !h.then(&maps[i]).equal_on_generators(x.restriction(p, z)) {
                return Err(Error::SectionsNotPresented(format!(
                    "restriction from `{}` does not factor through O(U)",
                    x.name(p)
                )));
            }
        }
        let h = match x.minimum(&u) {
            Some(m) if ring == x.stalk(m) => x.restriction(p, m).clone(),
            _ => h,
        };
        restr.insert((p, n), h);
    }
    Ok(FinSpace::assemble(x.field(), names, leq, stalks, restr, None))
}

/// The space associated with an open cover: points are the classes of
/// points lying in the same members of the cover, `[x] ≤ [y]` iff every
/// member containing `x` contains `y`; `O_[x] = O(∩ members ∋ x)`.
pub fn quotient_by_cover(x: &FinSpace, cover: &[Vec<usize>]) -> Result<(FinSpace, SpaceMap)> {
    for u in cover {
        x.check_open(u)?;
    }
    let n = x.len();
    let sig: Vec<BTreeSet<usize>> =
        (0..n).map(|p| (0..cover.len()).filter(|&i| cover[i].contains(&p)).collect()).collect();
    if let Some(p) = (0..n).find(|&p| sig[p].is_empty()) {
        return Err(Error::InvalidSpace(format!("`{}` is not covered", x.name(p))));
    }
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    for s in &sig {
        if !classes.contains(s) {
            classes.push(s.clone());
        }
    }
    classes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let point_of: Vec<usize> = sig.iter().map(|s| classes.iter().position(|c| c == s).unwrap()).collect();
    let mut mins = Vec::new();
    for c in &classes {
        let inter: Vec<usize> = (0..n).filter(|&p| c.iter().all(|&i| cover[i].contains(&p))).collect();
        let m = x.minimum(&inter).ok_or_else(|| {
            Error::SectionsNotPresented(format!(
                "intersection of cover members {:?} has no minimum",
                c.iter().collect::<Vec<_>>()
            ))
        })?;
        mins.push(m);
    }
    let names: Vec<String> = classes
        .iter()
        .map(|c| format!("U{}", c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("")))
        .collect();
    let k = classes.len();
    let leq: Vec<Vec<bool>> = (0..k).map(|a| (0..k).map(|b| classes[a].is_subset(&classes[b])).collect()).collect();
    let stalks: Vec<LocAlgebra> = mins.iter().map(|&m| x.stalk(m).clone()).collect();
    let mut restr = HashMap::new();
    for a in 0..k {
        for b in 0..k {
            if leq[a][b] {
                restr.insert((a, b), x.restriction(mins[a], mins[b]).clone());
            }
        }
    }
    let y = FinSpace::assemble(x.field(), names, leq, stalks, restr, None);
    let comorphisms = (0..n).map(|p| x.restriction(mins[point_of[p]], p).clone()).collect();
    let q = SpaceMap::from_parts(x, &y, point_of, comorphisms);
    Ok((y, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> FinSpace {
        let q = Field::Rationals;
        let a = LocAlgebra::from_strings(q, &["x"], &[], &[], None).unwrap();
        let b = LocAlgebra::from_strings(q, &["u"], &[], &[], None).unwrap();
        let c = LocAlgebra::from_strings(q, &["x"], &[], &["x"], None).unwrap();
        let r0 = AlgHom::parse(&a, &c, &[("x", "x")], Some(&["x"])).unwrap();
        let r1 = AlgHom::parse(&b, &c, &[("u", "1/x")], Some(&["u"])).unwrap();
        FinSpace::from_edges(q, vec!["p0".into(), "pinf".into(), "eta".into()], vec![a, b, c], vec![((0, 2), r0), ((1, 2), r1)])
            .unwrap()
    }

    #[test]
    fn opens_and_intersections() {
        let x = p1();
        assert_eq!(x.up(0), vec![0, 2]);
        assert_eq!(x.up(2), vec![2]);
        assert_eq!(x.u_xy(0, 1), vec![2]);
        assert!(x.validate().is_empty());
        assert!(matches!(x.open_subspace(&[0]), Err(Error::NotOpen(_))));
        assert_eq!(x.chains().iter().filter(|c| c.len() == 2).count(), 2);
    }

    #[test]
    fn fiber_product_with_identity() {
        let x = p1();
        let fp = fiber_product(&SpaceMap::identity(&x), &SpaceMap::identity(&x)).unwrap();
        assert_eq!(fp.space.len(), 3);
        assert!(fp.space.validate().is_empty());
        assert!(fp.space.find_isomorphism(&x).is_some() || fp.space.len() == x.len());
    }

    #[test]
    fn cylinder_of_identity() {
        let x = p1();
        let c = cylinder(&SpaceMap::identity(&x));
        assert_eq!(c.space.len(), 6);
        assert!(c.space.validate().is_empty());
        assert!(c.inclusion.then(&c.retraction).equals(&SpaceMap::identity(&x)));
    }

    #[test]
    fn adjoin_duplicate_point() {
        let x = p1();
        let x2 = adjoin_point(&x, &x.up(0)).unwrap();
        assert_eq!(x2.len(), 4);
        assert!(x2.validate().is_empty());
        assert!(x2.leq(3, 0) && x2.leq(3, 2) && !x2.leq(3, 1));
    }

    #[test]
    fn quotient_collapses_equivalent_points() {
        let x = p1();
        let (y, q) = quotient_by_cover(&x, &[x.up(0), x.up(1)]).unwrap();
        assert_eq!(y.len(), 3);
        assert!(q.squares_commute().is_empty());
        assert!(y.find_isomorphism(&x).is_some());
    }
}

//! Decision procedures for the classes of spaces and morphisms.
//!
//! Everything reduces to one question: is `B → ∏ C_i` faithfully flat?
//! When every `B → C_i` is a localization `B[1/σ_i]` this holds iff
//! `(σ_1, …, σ_n) = B`. Otherwise only the necessary condition (injectivity)
//! is decided, and an undecided verdict is reported rather than guessed.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Elem, LocAlgebra};
use crate::cohomology::{cohomology, cohomology_on, parallel_map, Backend};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, reduce_poly};
use crate::hom::{copair, tensor, AlgHom, HomKind};
use crate::poly::{MonomialOrder, PolyRing};
use crate::qcoh::SheafModule;
use crate::space::{cylinder, FinSpace, KolmogorovQuotient, SpaceMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undecided(String),
}

impl Verdict {
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Verdict::False)
    }

    /// CLI exit code: 0 true, 1 false, 2 undecided.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::True => 0,
            Verdict::False => 1,
            Verdict::Undecided(_) => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => write!(f, "true"),
            Verdict::False => write!(f, "false"),
            Verdict::Undecided(r) => write!(f, "undecided ({r})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::True => s.serialize_bool(true),
            Verdict::False => s.serialize_bool(false),
            Verdict::Undecided(r) => s.serialize_str(&format!("undecided: {r}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub criterion: String,
    pub location: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

impl ClassReport {
    fn new(class: &str) -> ClassReport {
        ClassReport { class: class.into(), verdict: Verdict::True, evidence: Vec::new() }
    }

    fn push(&mut self, criterion: &str, location: String, outcome: Outcome, detail: Option<String>) {
        self.evidence.push(Evidence { criterion: criterion.into(), location, outcome, detail });
    }

    fn record(&mut self, criterion: &str, location: String, r: std::result::Result<bool, String>) {
        match r {
            Ok(true) => self.push(criterion, location, Outcome::Pass, None),
            Ok(false) => self.push(criterion, location, Outcome::Fail, None),
            Err(why) => self.push(criterion, location, Outcome::Undecided, Some(why)),
        }
    }

    /// Any failure decides `false`; otherwise any undecided entry decides
    /// `undecided`.
    fn finish(mut self) -> ClassReport {
        self.verdict = if self.evidence.iter().any(|e| e.outcome == Outcome::Fail) {
            Verdict::False
        } else if let Some(e) = self.evidence.iter().find(|e| e.outcome == Outcome::Undecided) {
            Verdict::Undecided(format!("{} at {}: {}", e.criterion, e.location, e.detail.clone().unwrap_or_default()))
        } else {
            Verdict::True
        };
        self
    }

    fn from_sub(class: &str, criterion: &str, location: String, sub: &ClassReport) -> ClassReport {
        let mut r = ClassReport::new(class);
        r.absorb(criterion, location, sub);
        r.finish()
    }

    fn absorb(&mut self, criterion: &str, location: String, sub: &ClassReport) {
        let outcome = match sub.verdict {
            Verdict::True => Outcome::Pass,
            Verdict::False => Outcome::Fail,
            Verdict::Undecided(_) => Outcome::Undecided,
        };
        let detail = match &sub.verdict {
            Verdict::Undecided(r) => Some(r.clone()),
            _ => None,
        };
        self.push(criterion, location, outcome, detail);
    }
}

impl fmt::Display for ClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.class, self.verdict)?;
        for e in &self.evidence {
            let tag = match e.outcome {
                Outcome::Pass => "pass",
                Outcome::Fail => "FAIL",
                Outcome::Undecided => "undecided",
                Outcome::Skip => "skip",
            };
            write!(f, "  [{tag}] {} @ {}", e.criterion, e.location)?;
            if let Some(d) = &e.detail {
                write!(f, " — {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// ---- faithful flatness of finite covers ----

/// `B → ∏ B[1/σ_i]` for localizations `covers` of `base`: faithfully flat
/// iff the `σ_i` generate the unit ideal.
pub fn cover_is_faithfully_flat(base: &LocAlgebra, covers: &[AlgHom]) -> Result<bool> {
    let mut sigmas = Vec::with_capacity(covers.len());
    for c in covers {
        if c.source() != base {
            return Err(Error::InvalidHom("cover does not start at the base".into()));
        }
        let s = c
            .extras_product()
            .ok_or_else(|| Error::NotLocalizationPresented(format!("{c:?}")))?;
        sigmas.push(s);
    }
    Ok(base.radical_contains_one(&sigmas))
}

/// `h` re-tagged as a localization (verified), trying `hints`, then the
/// preimages of the target's denominators, then isomorphism.
fn as_localization(h: &AlgHom, hints: &[Elem]) -> Option<AlgHom> {
    if h.is_localization() {
        return Some(h.clone());
    }
    let images = h.var_images().to_vec();
    let try_with = |ex: Vec<Elem>| AlgHom::new(h.source(), h.target(), images.clone(), HomKind::Localization(ex)).ok();
    if !hints.is_empty() {
        if let Some(l) = try_with(hints.to_vec()) {
            return Some(l);
        }
    }
    let b = h.target();
    // each denominator `s` of the target, or its inverse, pulled back
    let pre: Vec<Elem> = b
        .inverted()
        .iter()
        .enumerate()
        .filter_map(|(j, s)| h.preimage(&b.from_base(s)).or_else(|| h.preimage(&b.inv_var(j))))
        .collect();
    if !pre.is_empty() {
        if let Some(l) = try_with(pre) {
            return Some(l);
        }
    }
    if h.is_isomorphism() {
        return AlgHom::new(h.source(), h.target(), images, HomKind::Localization(vec![])).ok();
    }
    None
}

fn ideal_intersection(a: &LocAlgebra, i: &[Elem], j: &[Elem]) -> Vec<Elem> {
    let np = a.npvars();
    let ring = PolyRing::with_order(a.field(), np + 1, MonomialOrder::Blocks(vec![1, np]));
    let map: Vec<usize> = (1..=np).collect();
    let w = ring.var(0);
    let one_minus_w = ring.sub(&ring.one(), &w);
    let mut gens: Vec<_> = a.gb().iter().map(|g| ring.embed(g, &map)).collect();
    gens.extend(i.iter().map(|g| ring.mul(&w, &ring.embed(g, &map))));
    gens.extend(j.iter().map(|g| ring.mul(&one_minus_w, &ring.embed(g, &map))));
    groebner_basis(&ring, &gens)
        .into_iter()
        .filter(|g| !g.uses_var(0))
        .map(|g| {
            let terms = g.terms.iter().map(|(e, c)| (e[1..].to_vec(), c.clone())).collect();
            a.nf(&a.ring().normalize(terms))
        })
        .filter(|g| !g.is_zero())
        .collect()
}

/// `base → ∏ targets` is injective.
fn product_is_injective(base: &LocAlgebra, maps: &[AlgHom]) -> bool {
    if base.is_zero_ring() {
        return true;
    }
    let mut ker: Option<Vec<Elem>> = None;
    for m in maps {
        let k = m.kernel_gens();
        ker = Some(match ker {
            None => k,
            Some(prev) => {
                if prev.is_empty() || k.is_empty() {
                    vec![]
                } else {
                    ideal_intersection(base, &prev, &k)
                }
            }
        });
        if ker.as_ref().is_some_and(|k| k.is_empty()) {
            return true;
        }
    }
    // empty product is the zero ring
    ker.map_or(false, |k| k.iter().all(|g| reduce_poly(base.ring(), g, base.gb()).is_zero()))
}

/// Faithful flatness of `base → ∏ maps`, with localization hints per map.
/// `Err` carries the reason when undecidable.
fn ff(base: &LocAlgebra, maps: &[AlgHom], hints: &[Vec<Elem>]) -> std::result::Result<bool, String> {
    if base.is_zero_ring() {
        return Ok(true);
    }
    if maps.is_empty() {
        return Ok(false);
    }
    if base.nvars() == 0 {
        // over a field every module is flat; faithful iff the product is nonzero
        return Ok(maps.iter().any(|m| !m.target().is_zero_ring()));
    }
    let locs: Option<Vec<AlgHom>> = maps.iter().zip(hints).map(|(m, h)| as_localization(m, h)).collect();
    if let Some(locs) = locs {
        return Ok(cover_is_faithfully_flat(base, &locs).expect("localizations"));
    }
    if !product_is_injective(base, maps) {
        return Ok(false);
    }
    Err("map is not presented as a localization (flatness not decidable)".into())
}

fn extras_or_empty(h: &AlgHom) -> Vec<Elem> {
    h.extras().map(|e| e.to_vec()).unwrap_or_default()
}

/// `A ⊗_R A' → ∏_z O_z` for `f: R → A`, `g: R → A'` and per-`z` maps
/// `(A → O_z, A' → O_z)`.
fn tensor_cover(f: &AlgHom, g: &AlgHom, legs: &[(AlgHom, AlgHom)]) -> std::result::Result<bool, String> {
    let t = tensor(f, g).map_err(|e| e.to_string())?;
    let mut maps = Vec::with_capacity(legs.len());
    let mut hints = Vec::with_capacity(legs.len());
    for (a, b) in legs {
        maps.push(copair(&t, a, b).map_err(|e| e.to_string())?);
        let mut h: Vec<Elem> = extras_or_empty(a).iter().map(|e| t.left.apply(e)).collect();
        h.extend(extras_or_empty(b).iter().map(|e| t.right.apply(e)));
        hints.push(h);
    }
    ff(&t.algebra, &maps, &hints)
}

fn names(x: &FinSpace, pts: &[usize]) -> String {
    pts.iter().map(|&p| x.name(p)).collect::<Vec<_>>().join(",")
}

// ---- spaces ----

/// Restrictions flat: localizations (or isomorphisms) pass; anything else
/// needs a certificate in `certified_flat` (pairs of point indices).
pub fn is_fr_space_with(x: &FinSpace, certified_flat: &[(usize, usize)]) -> ClassReport {
    let mut r = ClassReport::new("fr");
    for (a, b) in x.covering_pairs() {
        let h = x.restriction(a, b);
        let loc = format!("{} → {}", x.name(a), x.name(b));
        if as_localization(h, &[]).is_some() {
            r.push("restriction is a localization", loc, Outcome::Pass, None);
        } else if certified_flat.contains(&(a, b)) {
            r.push("restriction certified flat", loc, Outcome::Pass, Some("user certificate".into()));
        } else {
            r.push(
                "restriction is a localization",
                loc,
                Outcome::Undecided,
                Some("not a localization; flatness not decided".into()),
            );
        }
    }
    r.finish()
}

pub fn is_fr_space(x: &FinSpace) -> ClassReport {
    is_fr_space_with(x, &[])
}

/// `O_y ⊗_{O_x} O_y' → ∏_{z ∈ U_yy'} O_z` faithfully flat for all
/// `x ≤ y, y'` (comparable pairs are automatic).
pub fn is_schematic(x: &FinSpace) -> ClassReport {
    let mut tasks = Vec::new();
    for p in 0..x.len() {
        let up = x.up(p);
        for (i, &y) in up.iter().enumerate() {
            for &y2 in &up[i + 1..] {
                if !x.leq(y, y2) && !x.leq(y2, y) {
                    tasks.push((p, y, y2));
                }
            }
        }
    }
    let results = parallel_map(&tasks, |&(p, y, y2)| schematic_triple(x, p, y, y2));
    let mut r = ClassReport::new("schematic");
    for (&(p, y, y2), res) in tasks.iter().zip(results) {
        let loc = format!("x={} y={} y'={}", x.name(p), x.name(y), x.name(y2));
        r.record("O_y ⊗_{O_x} O_y' → ∏ O_z faithfully flat", loc, res);
    }
    if tasks.is_empty() {
        r.push("no incomparable pairs above a point", "all".into(), Outcome::Pass, None);
    }
    r.finish()
}

fn schematic_triple(x: &FinSpace, p: usize, y: usize, y2: usize) -> std::result::Result<bool, String> {
    let zs = x.u_xy(y, y2);
    let (ry, ry2) = (x.restriction(p, y), x.restriction(p, y2));
    let base = x.stalk(p);
    let sig = |h: &AlgHom| h.extras_product();
    if let (Some(sy), Some(sy2)) = (sig(ry), sig(ry2)) {
        let szs: Option<Vec<Elem>> = zs.iter().map(|&z| sig(x.restriction(p, z))).collect();
        if let Some(szs) = szs {
            return Ok(base.radical_contains(&szs, &base.mul(&sy, &sy2)));
        }
    }
    let legs: Vec<(AlgHom, AlgHom)> =
        zs.iter().map(|&z| (x.restriction(y, z).clone(), x.restriction(y2, z).clone())).collect();
    tensor_cover(ry, ry2, &legs)
}

/// `O(U)` presented with its maps to the points of `U`.
struct Presented {
    ring: LocAlgebra,
    maps: Vec<(usize, AlgHom)>,
}

fn presented_sections(x: &FinSpace, u: &[usize]) -> std::result::Result<Presented, String> {
    let sec = x.sections(u).map_err(|e| e.to_string())?;
    sec.presented()
        .map(|(ring, maps)| Presented { ring, maps })
        .ok_or_else(|| format!("{}", Error::SectionsNotPresented(format!("O({{{}}})", names(x, u)))))
}

/// `h: a → O(U)` with `maps[z] ∘ h = want(z)` on every point of `U`.
fn factor_through(a: &LocAlgebra, p: &Presented, want: &dyn Fn(usize) -> AlgHom) -> Option<AlgHom> {
    for (z0, m0) in &p.maps {
        let w0 = want(*z0);
        let images: Option<Vec<Elem>> = (0..a.nvars()).map(|i| m0.preimage(&w0.apply(&a.var(i)))).collect();
        let Some(images) = images else { continue };
        let Ok(h) = AlgHom::new(a, &p.ring, images, HomKind::General) else { continue };
        if p.maps.iter().all(|(z, m)| h.then(m).equal_on_generators(&want(*z))) {
            return Some(h);
        }
    }
    None
}

/// Faithful flatness of `O(X) → ∏ O_x` and of
/// `O_y ⊗_{O(X)} O_y' → ∏_{z ∈ U_yy'} O_z` for all pairs.
pub fn is_affine(x: &FinSpace) -> ClassReport {
    let mut r = ClassReport::new("affine");
    if x.is_empty() {
        r.push("empty space", "∅".into(), Outcome::Pass, None);
        return r.finish();
    }
    if let Some(m) = x.minimum(&x.all_points()) {
        let s = is_schematic(x);
        r.absorb("space with a minimum is affine iff schematic", x.name(m).to_string(), &s);
        return r.finish();
    }
    let gs = match presented_sections(x, &x.all_points()) {
        Ok(p) => p,
        Err(why) => {
            let s = is_schematic(x);
            if s.verdict.is_false() {
                r.absorb("affine spaces are schematic", "X".into(), &s);
            } else {
                r.push("O(X) presented", "X".into(), Outcome::Undecided, Some(why));
            }
            return r.finish();
        }
    };
    let maps: Vec<AlgHom> = gs.maps.iter().map(|(_, h)| h.clone()).collect();
    let hints = vec![vec![]; maps.len()];
    r.record("O(X) → ∏ O_x faithfully flat", "X".into(), ff(&gs.ring, &maps, &hints));
    let mut pairs = Vec::new();
    for y in 0..x.len() {
        for y2 in y..x.len() {
            pairs.push((y, y2));
        }
    }
    let results = parallel_map(&pairs, |&(y, y2)| {
        let legs: Vec<(AlgHom, AlgHom)> =
            x.u_xy(y, y2).iter().map(|&z| (x.restriction(y, z).clone(), x.restriction(y2, z).clone())).collect();
        tensor_cover(&maps[y], &maps[y2], &legs)
    });
    for (&(y, y2), res) in pairs.iter().zip(results) {
        r.record("O_y ⊗_{O(X)} O_y' → ∏ O_z faithfully flat", format!("y={} y'={}", x.name(y), x.name(y2)), res);
    }
    r.finish()
}

fn is_affine_open(x: &FinSpace, v: &[usize]) -> ClassReport {
    if v.len() == x.len() {
        return is_affine(x);
    }
    match x.open_subspace(v) {
        Ok((sub, _)) => is_affine(&sub),
        Err(e) => {
            let mut r = ClassReport::new("affine");
            r.push("open subset", names(x, v), Outcome::Fail, Some(e.to_string()));
            r.finish()
        }
    }
}

/// `H^i(U_pq, O) = 0` for `i > 0` (window-qualified in the graded case).
pub fn is_semiseparated(x: &FinSpace, backend: Backend) -> ClassReport {
    let mut r = ClassReport::new("semiseparated");
    let s = is_schematic(x);
    r.absorb("schematic", "X".into(), &s);
    if s.verdict.is_false() {
        return r.finish();
    }
    let o = SheafModule::structure_sheaf(x);
    let backend = effective_backend(x, backend);
    for p in 0..x.len() {
        for q in p + 1..x.len() {
            let u = x.u_xy(p, q);
            let loc = format!("U_{{{},{}}}", x.name(p), x.name(q));
            if u.is_empty() || x.minimum(&u).is_some() {
                r.push("U_pq acyclic", loc, Outcome::Pass, Some("empty or has a minimum".into()));
                continue;
            }
            match cohomology_on(&o, &u, backend) {
                Ok(t) => {
                    let higher: usize = (1..t.degrees()).map(|i| t.total(i)).sum();
                    let detail = t.window.map(|(a, b)| format!("window [{a}, {b}]"));
                    r.push("U_pq acyclic", loc, if higher == 0 { Outcome::Pass } else { Outcome::Fail }, detail);
                }
                Err(e) => r.push("U_pq acyclic", loc, Outcome::Undecided, Some(e.to_string())),
            }
        }
    }
    r.finish()
}

/// Graded when every stalk is graded, finite-dimensional otherwise.
pub fn effective_backend(x: &FinSpace, preferred: Backend) -> Backend {
    match preferred {
        Backend::Graded { .. } if !x.stalks().iter().all(|s| s.is_graded()) => Backend::VectorSpace,
        b => b,
    }
}

/// Whether `x` is removable: `O_x → ∏_{x' > x} O_x'` faithfully flat.
pub fn is_removable(x: &FinSpace, p: usize) -> std::result::Result<bool, String> {
    let above: Vec<usize> = (0..x.len()).filter(|&q| x.lt(p, q) && !x.leq(q, p)).collect();
    let maps: Vec<AlgHom> = above.iter().map(|&q| x.restriction(p, q).clone()).collect();
    let hints = vec![vec![]; maps.len()];
    ff(x.stalk(p), &maps, &hints)
}

pub fn removable_points(x: &FinSpace) -> Result<Vec<usize>> {
    let pts = x.all_points();
    let res = parallel_map(&pts, |&p| is_removable(x, p));
    let mut out = Vec::new();
    for (p, r) in pts.into_iter().zip(res) {
        match r {
            Ok(true) => out.push(p),
            Ok(false) => {}
            Err(why) => return Err(Error::NotLocalizationPresented(format!("removability of `{}`: {why}", x.name(p)))),
        }
    }
    Ok(out)
}

/// `X_M`: the Kolmogorov quotient with its removable points deleted.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub space: FinSpace,
    pub kolmogorov: KolmogorovQuotient,
    /// `X_M ↪ X/~`.
    pub inclusion: SpaceMap,
    /// Points of `X/~` that were removed.
    pub removed: Vec<usize>,
}

pub fn minimal_model(x: &FinSpace) -> Result<MinimalModel> {
    let kq = x.kolmogorov_quotient();
    let q = kq.space.clone();
    let mut keep: Vec<usize> = q.all_points();
    loop {
        let (sub, _) = q.subspace(&keep);
        let rem = removable_points(&sub)?;
        if rem.is_empty() {
            break;
        }
        keep = keep.iter().enumerate().filter(|(i, _)| !rem.contains(i)).map(|(_, &p)| p).collect();
    }
    let (space, inclusion) = q.subspace(&keep);
    let removed = q.all_points().into_iter().filter(|p| !keep.contains(p)).collect();
    Ok(MinimalModel { space, kolmogorov: kq, inclusion, removed })
}

// ---- morphisms ----

#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub schematic: ClassReport,
    pub affine: ClassReport,
    pub flat: ClassReport,
    pub faithfully_flat: ClassReport,
    pub quasi_iso: ClassReport,
    pub quasi_open_immersion: ClassReport,
    pub quasi_closed_immersion: ClassReport,
}

impl MapReport {
    pub fn all(&self) -> [&ClassReport; 7] {
        [
            &self.schematic,
            &self.affine,
            &self.flat,
            &self.faithfully_flat,
            &self.quasi_iso,
            &self.quasi_open_immersion,
            &self.quasi_closed_immersion,
        ]
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.all() {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// `O'_y → O_x` for `f(x) ≥ y`.
fn structure_map(f: &SpaceMap, y: usize, x: usize) -> AlgHom {
    f.target().restriction(y, f.at(x)).then(f.comorphism(x))
}

/// `O_x ⊗_{O_f(x)} O_y → ∏_{z ∈ U_x ∩ f⁻¹(U_y)} O_z` faithfully flat.
pub fn is_schematic_map(f: &SpaceMap) -> ClassReport {
    let (x, y) = (f.source(), f.target());
    let mut r = ClassReport::new("schematic");
    r.absorb("source schematic", "X".into(), &is_schematic(x));
    r.absorb("target schematic", "Y".into(), &is_schematic(y));
    let mut tasks = Vec::new();
    for p in 0..x.len() {
        for q in y.up(f.at(p)) {
            tasks.push((p, q));
        }
    }
    let results = parallel_map(&tasks, |&(p, q)| {
        let zs: Vec<usize> = x.up(p).into_iter().filter(|&z| y.leq(q, f.at(z))).collect();
        let legs: Vec<(AlgHom, AlgHom)> =
            zs.iter().map(|&z| (x.restriction(p, z).clone(), structure_map(f, q, z))).collect();
        tensor_cover(f.comorphism(p), y.restriction(f.at(p), q), &legs)
    });
    for (&(p, q), res) in tasks.iter().zip(results) {
        r.record("O_x ⊗ O_y → ∏ O_z faithfully flat", format!("x={} y={}", x.name(p), y.name(q)), res);
    }
    r.finish()
}

fn preimage_sections(f: &SpaceMap, q: usize) -> (Vec<usize>, std::result::Result<Presented, String>) {
    let v = f.preimage(&f.target().up(q));
    if v.is_empty() {
        return (v, Err("empty".into()));
    }
    let p = presented_sections(f.source(), &v);
    (v, p)
}

/// `O_y → (f_*O_X)_y = O(f⁻¹(U_y))`.
fn pushforward_map(f: &SpaceMap, q: usize, p: &Presented) -> std::result::Result<AlgHom, String> {
    factor_through(f.target().stalk(q), p, &|z| structure_map(f, q, z))
        .ok_or_else(|| format!("O_y → O(f⁻¹(U_y)) not found at {}", f.target().name(q)))
}

/// `f⁻¹(U_y)` affine for all `y` and `f_*O_X` quasi-coherent.
pub fn is_affine_map(f: &SpaceMap) -> ClassReport {
    let (x, y) = (f.source(), f.target());
    let mut r = ClassReport::new("affine");
    let mut secs = Vec::with_capacity(y.len());
    for q in 0..y.len() {
        let (v, p) = preimage_sections(f, q);
        let loc = format!("f⁻¹(U_{})", y.name(q));
        if v.is_empty() {
            r.push("preimage affine", loc, Outcome::Pass, Some("empty".into()));
        } else {
            r.absorb("preimage affine", loc, &is_affine_open(x, &v));
        }
        secs.push((v, p));
    }
    // quasi-coherence of f_*O: O(V_y) ⊗_{O_y} O_y' = O(V_y') on covering pairs
    for (a, b) in y.covering_pairs() {
        let loc = format!("{} → {}", y.name(a), y.name(b));
        let crit = "(f_*O)_y ⊗ O_y' = (f_*O)_y'";
        let res = (|| -> std::result::Result<bool, String> {
            let (va, pa) = &secs[a];
            let (vb, pb) = &secs[b];
            if va.is_empty() {
                return Ok(true);
            }
            let pa = pa.as_ref().map_err(|e| e.clone())?;
            let ha = pushforward_map(f, a, pa)?;
            let t = tensor(&ha, y.restriction(a, b)).map_err(|e| e.to_string())?;
            if vb.is_empty() {
                return Ok(t.algebra.is_zero_ring());
            }
            let pb = pb.as_ref().map_err(|e| e.clone())?;
            let hb = pushforward_map(f, b, pb)?;
            // O(V_a) → O(V_b) restricting sections
            let res_ab = factor_through(&pa.ring, pb, &|z| {
                let (_, m) = pa.maps.iter().find(|(w, _)| *w == z).expect("V_b ⊆ V_a");
                m.clone()
            })
            .ok_or("restriction of sections not found")?;
            let induced = copair(&t, &res_ab, &hb).map_err(|e| e.to_string())?;
            Ok(induced.is_isomorphism())
        })();
        r.record(crit, loc, res);
    }
    r.finish()
}

pub fn is_flat_map(f: &SpaceMap) -> ClassReport {
    let x = f.source();
    let mut r = ClassReport::new("flat");
    for p in 0..x.len() {
        let loc = format!("O_{} → O_{}", f.target().name(f.at(p)), x.name(p));
        if as_localization(f.comorphism(p), &[]).is_some() {
            r.push("comorphism is a localization", loc, Outcome::Pass, None);
        } else {
            r.push("comorphism is a localization", loc, Outcome::Undecided, Some("flatness not decided".into()));
        }
    }
    r.finish()
}

/// `O_y → ∏_{x ∈ f⁻¹(U_y)} O_x` faithfully flat for every `y`.
pub fn is_faithfully_flat_map(f: &SpaceMap) -> ClassReport {
    let y = f.target();
    let mut r = ClassReport::new("faithfully flat");
    for q in 0..y.len() {
        let v = f.preimage(&y.up(q));
        let maps: Vec<AlgHom> = v.iter().map(|&z| structure_map(f, q, z)).collect();
        let hints: Vec<Vec<Elem>> = v.iter().map(|&z| extras_or_empty(y.restriction(q, f.at(z)))).collect();
        r.record("O_y → ∏ O_x faithfully flat", y.name(q).to_string(), ff(y.stalk(q), &maps, &hints));
    }
    r.finish()
}

/// `O_y → O(f⁻¹(U_y))` iso (`iso = true`) or surjective, for every `y`.
fn pushforward_check(f: &SpaceMap, r: &mut ClassReport, iso: bool) {
    let y = f.target();
    let crit = if iso { "O_y → (f_*O)_y isomorphism" } else { "O_y → (f_*O)_y surjective" };
    for q in 0..y.len() {
        let (v, p) = preimage_sections(f, q);
        let res = if v.is_empty() {
            Ok(!iso || y.stalk(q).is_zero_ring())
        } else {
            p.and_then(|p| {
                let h = pushforward_map(f, q, &p)?;
                Ok(if iso { h.is_isomorphism() } else { h.is_surjective() })
            })
        };
        r.record(crit, y.name(q).to_string(), res);
    }
}

pub fn classify_map(f: &SpaceMap) -> MapReport {
    let schematic = is_schematic_map(f);
    let affine = is_affine_map(f);
    let flat = is_flat_map(f);
    let faithfully_flat = is_faithfully_flat_map(f);

    let mut qi = ClassReport::new("quasi-isomorphism");
    qi.absorb("schematic", "f".into(), &schematic);
    qi.absorb("affine", "f".into(), &affine);
    pushforward_check(f, &mut qi, true);
    let quasi_iso = qi.finish();

    let c = cylinder(f);
    let quasi_open_immersion =
        ClassReport::from_sub("quasi-open immersion", "cylinder C(f) schematic", "C(f)".into(), &is_schematic(&c.space));

    let mut qc = ClassReport::new("quasi-closed immersion");
    qc.absorb("affine", "f".into(), &affine);
    pushforward_check(f, &mut qc, false);
    let quasi_closed_immersion = qc.finish();

    MapReport { schematic, affine, flat, faithfully_flat, quasi_iso, quasi_open_immersion, quasi_closed_immersion }
}

/// Quasi-isomorphism verdict alone.
pub fn is_quasi_iso(f: &SpaceMap) -> ClassReport {
    let mut qi = ClassReport::new("quasi-isomorphism");
    qi.absorb("schematic", "f".into(), &is_schematic_map(f));
    qi.absorb("affine", "f".into(), &is_affine_map(f));
    pushforward_check(f, &mut qi, true);
    qi.finish()
}

// ---- Serre cross-check ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SerreConclusion {
    /// Affine and every `H¹` vanishes.
    Consistent,
    /// Some `H¹ ≠ 0`, so not affine.
    NotAffine,
    /// All `H¹` vanish but the space is not certified affine.
    BatteryInsufficient,
    /// Certified affine yet some `H¹ ≠ 0`.
    Contradiction,
}

#[derive(Clone, Debug, Serialize)]
pub struct SerreReport {
    pub affine: ClassReport,
    /// `(module, total dim H¹)` or the reason it was not computed.
    pub h1: Vec<(String, std::result::Result<usize, String>)>,
    pub conclusion: SerreConclusion,
}

impl fmt::Display for SerreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.affine)?;
        for (name, h) in &self.h1 {
            match h {
                Ok(d) => writeln!(f, "H^1({name}) = {d}")?,
                Err(e) => writeln!(f, "H^1({name}) not computed: {e}")?,
            }
        }
        writeln!(f, "conclusion: {:?}", self.conclusion)
    }
}

/// `H¹` over a battery of modules compared with the affine verdict.
pub fn serre_harness(x: &FinSpace, battery: &[(String, SheafModule)], backend: Backend) -> SerreReport {
    let affine = is_affine(x);
    let mut all: Vec<(String, SheafModule)> = vec![("O".into(), SheafModule::structure_sheaf(x))];
    all.extend(battery.iter().cloned());
    let backend = effective_backend(x, backend);
    let h1: Vec<_> =
        all.iter().map(|(n, m)| (n.clone(), cohomology(m, backend).map(|t| t.total(1)).map_err(|e| e.to_string()))).collect();
    let nonzero = h1.iter().any(|(_, h)| matches!(h, Ok(d) if *d > 0));
    let conclusion = match (&affine.verdict, nonzero) {
        (Verdict::True, true) => SerreConclusion::Contradiction,
        (Verdict::True, false) => SerreConclusion::Consistent,
        (_, true) => SerreConclusion::NotAffine,
        (_, false) => SerreConclusion::BatteryInsufficient,
    };
    SerreReport { affine, h1, conclusion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::fixtures;

    #[test]
    fn covers_of_the_line() {
        let a = LocAlgebra::polynomial(Field::Rationals, &["x"]);
        let (_, l0) = AlgHom::localization(&a, &[a.parse("x").unwrap()]);
        let (_, l1) = AlgHom::localization(&a, &[a.parse("x-1").unwrap()]);
        assert!(cover_is_faithfully_flat(&a, &[l0.clone(), l1]).unwrap());
        assert!(!cover_is_faithfully_flat(&a, &[l0]).unwrap());
    }

    #[test]
    fn p1_classes() {
        let x = fixtures::p1(Field::Rationals);
        assert!(is_schematic(&x).verdict.is_true());
        assert!(is_affine(&x).verdict.is_false());
        assert!(is_fr_space(&x).verdict.is_true());
        assert!(removable_points(&x).unwrap().is_empty());
    }

    #[test]
    fn doubled_line_classes() {
        let x = fixtures::doubled_line(Field::Rationals);
        assert!(is_schematic(&x).verdict.is_true());
        assert!(is_affine(&x).verdict.is_false());
        assert!(is_semiseparated(&x, Backend::default()).verdict.is_true());
    }

    #[test]
    fn identity_is_quasi_iso() {
        let x = fixtures::p1(Field::Rationals);
        let r = classify_map(&SpaceMap::identity(&x));
        for c in r.all() {
            assert!(c.verdict.is_true(), "{c}");
        }
    }
}

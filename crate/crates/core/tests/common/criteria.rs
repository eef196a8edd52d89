//! The acceptance criteria as functions returning a one-line summary on
//! success and the first discrepancy on failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use finschem::classify::{
    classify_map, cover_is_faithfully_flat, is_affine, is_quasi_iso, is_schematic, is_semiseparated, minimal_model,
    serre_harness, SerreConclusion, Verdict,
};
use finschem::cohomology::{augmentation, cohomology, godement, higher_direct_images, Backend, LinearSheaf};
use finschem::fixtures;
use finschem::hom::{copair, tensor};
use finschem::roofs::{compose, invert, roof_equal, Roof};
use finschem::space::{adjoin_point, cylinder, product, quotient_by_cover, FinSpace, SpaceMap};
use finschem::{AlgHom, Field, LocAlgebra, SheafModule};

use super::*;

pub type Outcome = Result<String, String>;

const Q: Field = Field::Rationals;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verdict(name: &str, got: &Verdict, want: bool) -> Result<(), String> {
    let ok = if want { got.is_true() } else { got.is_false() };
    ensure(ok, || format!("{name}: expected {want}, got {got}"))
}

fn within(t0: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t0.elapsed();
    ensure(e < limit, || format!("{what} took {e:?} (limit {limit:?})"))
}

fn window(a: i64, b: i64) -> Backend {
    Backend::Graded { window: (a, b) }
}

/// P¹: classes, sections and the twists `O(d)` against the two-chart oracle.
pub fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let x = fixtures::p1(Q);
    verdict("schematic", &is_schematic(&x).verdict, true)?;
    verdict("affine", &is_affine(&x).verdict, false)?;
    verdict("semiseparated", &is_semiseparated(&x, Backend::default()).verdict, true)?;
    let o = cohomology(&SheafModule::structure_sheaf(&x), Backend::default()).map_err(|e| e.to_string())?;
    ensure(o.dim(0, &[0]) == Some(1), || format!("degree-0 sections: {:?}", o.dim(0, &[0])))?;
    let (mut h0, mut h1) = (Vec::new(), Vec::new());
    for d in -5..=5 {
        let t = cohomology(&fixtures::p1_twist(&x, d), window(-5, 5)).map_err(|e| e.to_string())?;
        for e in -5..=5 {
            let want = p1_twist_oracle(d, e);
            let got: Vec<usize> = (0..2).map(|i| t.dim(i, &[e]).unwrap_or(0)).collect();
            ensure(got == want, || format!("O({d}) degree {e}: got {got:?}, oracle {want:?}"))?;
        }
        h0.push(t.total(0));
        h1.push(t.total(1));
    }
    ensure(h0 == [0, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6], || format!("H⁰ totals {h0:?}"))?;
    ensure(h1 == [4, 3, 2, 1, 0, 0, 0, 0, 0, 0, 0], || format!("H¹ totals {h1:?}"))?;
    within(t0, Duration::from_secs(5), "P¹ suite")?;
    Ok(format!("H⁰ {h0:?}, H¹ {h1:?} in {:?}", t0.elapsed()))
}

/// P²: classes and `O`, `O(−3)` against the three-chart oracle per bidegree.
pub fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let x = fixtures::p2(Q);
    verdict("schematic", &is_schematic(&x).verdict, true)?;
    verdict("affine", &is_affine(&x).verdict, false)?;
    let (lo, hi) = (-6, 6);
    let mut totals = Vec::new();
    for d in [0, -3, 1, -4] {
        let t = cohomology(&fixtures::p2_twist(&x, d), window(lo, hi)).map_err(|e| e.to_string())?;
        for p in lo..=hi {
            for q in lo..=hi {
                let want = p2_twist_oracle(d, p, q);
                let got: Vec<usize> = (0..3).map(|i| t.dim(i, &[p, q]).unwrap_or(0)).collect();
                ensure(got == want, || format!("O({d}) bidegree ({p},{q}): got {got:?}, oracle {want:?}"))?;
            }
        }
        totals.push((d, (0..3).map(|i| t.total(i)).collect::<Vec<_>>()));
    }
    ensure(totals[0].1 == [1, 0, 0], || format!("H(O) {:?}", totals[0].1))?;
    ensure(totals[1].1[2] == 1, || format!("H²(O(−3)) = {}", totals[1].1[2]))?;
    within(t0, Duration::from_secs(30), "P² suite")?;
    Ok(format!("H(O) = {:?}, H(O(−3)) = {:?} in {:?}", totals[0].1, totals[1].1, t0.elapsed()))
}

/// Doubled line: schematic, `H¹(O)` per degree against the cokernel oracle,
/// Serre harness agrees with the affine verdict.
pub fn criterion_3() -> Outcome {
    let x = fixtures::doubled_line(Q);
    verdict("schematic", &is_schematic(&x).verdict, true)?;
    let t = cohomology(&SheafModule::structure_sheaf(&x), window(-10, 10)).map_err(|e| e.to_string())?;
    for e in -10..=10 {
        let want = doubled_line_h1(e);
        let got = t.dim(1, &[e]).unwrap_or(0);
        ensure(got == want, || format!("H¹ degree {e}: got {got}, oracle {want}"))?;
        if (-6..=-1).contains(&e) {
            ensure(got == 1, || format!("H¹ degree {e} = {got}"))?;
        }
    }
    let s = serre_harness(&x, &[], window(-10, 10));
    ensure(s.conclusion == SerreConclusion::NotAffine, || format!("Serre harness: {:?}", s.conclusion))?;
    verdict("affine", &is_affine(&x).verdict, false)?;
    Ok("H¹_e = 1 for e < 0, Serre harness: not affine".into())
}

fn check_godement(f: &LinearSheaf) -> Result<(), String> {
    let x = &f.space;
    let field = f.field;
    for p in 0..x.len() {
        let c = godement(f, &x.up(p));
        ensure(c.d_squared_is_zero(), || format!("d² ≠ 0 on U_{p}"))?;
        let aug = augmentation(f, p);
        let ra = aug.rank(field);
        ensure(ra == f.dims[p], || format!("augmentation at {p} not injective"))?;
        if let Some(d0) = c.diffs.first() {
            ensure(d0.mul(field, &aug).is_zero(), || format!("d∘ε ≠ 0 at {p}"))?;
        }
        let ranks: Vec<usize> = c.diffs.iter().map(|d| d.rank(field)).collect();
        for n in 0..c.dims.len() {
            let inc = if n == 0 { ra } else { ranks[n - 1] };
            let out = ranks.get(n).copied().unwrap_or(0);
            ensure(inc + out == c.dims[n], || format!("augmented complex not exact in degree {n} on U_{p}"))?;
        }
        let h = c.cohomology();
        ensure(h.iter().skip(1).all(|&d| d == 0), || format!("H^>0(U_{p}) = {h:?}"))?;
    }
    Ok(())
}

/// Random image sheaves on every poset with at most four points.
pub fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let all: Vec<Poset> = (1..=4).flat_map(posets).collect();
    let mut count = 0;
    while count < 50 || count < all.len() * 2 {
        let leq = &all[count % all.len()];
        let x = constant_space(leq, Q);
        let f = random_image_sheaf(&x, &mut rng);
        ensure(f.validate().is_empty(), || format!("generated sheaf invalid: {:?}", f.validate()))?;
        ensure(f.dims.iter().all(|&d| d <= 3), || "stalk dimension above 3".into())?;
        check_godement(&f).map_err(|e| format!("sheaf {count} on poset {leq:?}: {e}"))?;
        count += 1;
    }
    within(t0, Duration::from_secs(60), "Godement suite")?;
    Ok(format!("{count} sheaves on {} posets in {:?}", all.len(), t0.elapsed()))
}

/// Pseudo-circle: `H⁰ = H¹ = 1` against the order-complex oracle.
pub fn criterion_5() -> Outcome {
    let x = fixtures::pseudo_circle(Q);
    let want = order_complex_cohomology(x.len(), |a, b| x.lt(a, b));
    ensure(want == [1, 1], || format!("oracle {want:?}"))?;
    let t = cohomology(&SheafModule::structure_sheaf(&x), Backend::VectorSpace).map_err(|e| e.to_string())?;
    let got: Vec<usize> = (0..2).map(|i| t.total(i)).collect();
    ensure(got == want, || format!("library {got:?}, oracle {want:?}"))?;
    let g = godement(&LinearSheaf::constant(&x), &x.all_points()).cohomology();
    ensure(g == want, || format!("Godement {g:?}"))?;
    Ok(format!("H = {got:?}"))
}

fn random_localization(rng: &mut ChaCha8Rng, two_vars: bool) -> (LocAlgebra, LocAlgebra, AlgHom, String) {
    let vars: &[&str] = if two_vars { &["x", "y"] } else { &["x"] };
    let a = LocAlgebra::polynomial(Q, vars);
    let mut s = random_linear_product(rng, two_vars);
    if s.0.is_empty() {
        s = LinearProduct(vec![(1, 0, rng.gen_range(0..3))]);
    }
    let expr = s.to_expr(two_vars);
    let sigma = a.parse(&expr).unwrap();
    let (b, f) = AlgHom::localization(&a, &[sigma]);
    (a, b, f, expr)
}

fn random_poly(rng: &mut ChaCha8Rng, b: &LocAlgebra, two_vars: bool) -> finschem::Elem {
    let terms = rng.gen_range(1..=3);
    let mut s = String::from("0");
    for _ in 0..terms {
        let c = rng.gen_range(-3..=3);
        let i = rng.gen_range(0..3);
        let j = if two_vars { rng.gen_range(0..2) } else { 0 };
        s.push_str(&format!(" + {c}*x^{i}"));
        if two_vars {
            s.push_str(&format!("*y^{j}"));
        }
    }
    b.parse(&s).unwrap()
}

/// Localization properties on 30 instances and the cover test against the
/// 𝔽₁₀₁ point oracle on 20 instances.
pub fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..30 {
        let two = k % 2 == 1;
        let (a, b, f, expr) = random_localization(&mut rng, two);
        // B ⊗_A B → B is an isomorphism.
        let t = tensor(&f, &f).map_err(|e| e.to_string())?;
        let id = AlgHom::identity(&b);
        let m = copair(&t, &id, &id).map_err(|e| e.to_string())?;
        ensure(m.is_isomorphism(), || format!("B ⊗_A B → B not iso for A[1/({expr})]"))?;
        // (I ∩ A)·B = I.
        let gens: Vec<_> = (0..rng.gen_range(1..=2)).map(|_| random_poly(&mut rng, &b, two)).collect();
        let c = b.quotient(&gens);
        let images: Vec<_> = (0..b.nvars()).map(|i| c.var(i)).collect();
        let pi = AlgHom::new(&b, &c, images, finschem::HomKind::General).map_err(|e| e.to_string())?;
        let contraction = f.then(&pi).kernel_gens();
        let extended: Vec<_> = contraction.iter().map(|g| f.apply(g)).collect();
        let forward = extended.iter().all(|g| b.ideal_contains(&gens, g));
        let backward = gens.iter().all(|g| b.ideal_contains(&extended, g));
        ensure(forward && backward, || {
            format!("extension of contraction differs on A[1/({expr})], I = {:?}", gens.iter().map(|g| b.format(g)).collect::<Vec<_>>())
        })?;
        let _ = a;
    }
    let p = 101;
    let field = Field::prime(p as u64).unwrap();
    let (mut yes, mut no) = (0, 0);
    for k in 0..20 {
        let two = k % 2 == 0;
        let base = LocAlgebra::polynomial(field, if two { &["x", "y"] } else { &["x"] });
        let sigmas: Vec<LinearProduct> = (0..rng.gen_range(1..=3)).map(|_| random_linear_product(&mut rng, two)).collect();
        let covers: Vec<AlgHom> =
            sigmas.iter().map(|s| AlgHom::localization(&base, &[base.parse(&s.to_expr(two)).unwrap()]).1).collect();
        let got = cover_is_faithfully_flat(&base, &covers).map_err(|e| e.to_string())?;
        let want = covers_all_points(p, two, &sigmas);
        ensure(got == want, || format!("cover {sigmas:?}: library {got}, point oracle {want}"))?;
        if want {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("30 localization instances; 20 covers ({yes} covering, {no} not) agree with the 𝔽_{p} oracle"))
}

/// Opens `U` used for the adjunction round trip: whole spaces and minimal
/// opens of chart points.
pub fn adjunction_instances() -> Vec<(String, FinSpace, Vec<usize>)> {
    let mut out = Vec::new();
    let cases: &[(&str, &[&str])] = &[
        ("p1", &["p0", "pinf", "*"]),
        ("p2", &["U0", "*"]),
        ("doubled_line", &["o1", "*"]),
        ("affine_line", &["*"]),
        ("plane_doubled_origin", &["o1", "*"]),
    ];
    for (name, opens) in cases {
        let x = fixtures::builtin(name, Q).unwrap();
        for o in *opens {
            let u = if *o == "*" { x.all_points() } else { x.up(x.index(o).unwrap()) };
            out.push((format!("{name}+U({o})"), x.clone(), u));
        }
    }
    out
}

/// Adjoin-then-minimize round trip on 10 fixtures; order independence of
/// the minimal model on every poset with at most five points.
pub fn criterion_7() -> Outcome {
    let cases = adjunction_instances();
    ensure(cases.len() >= 10, || "fewer than 10 instances".into())?;
    for (label, x, u) in &cases {
        let x2 = adjoin_point(x, u).map_err(|e| format!("{label}: {e}"))?;
        ensure(x2.len() == x.len() + 1, || format!("{label}: no point added"))?;
        let mm = minimal_model(&x2).map_err(|e| format!("{label}: {e}"))?;
        ensure(mm.space.find_isomorphism(x).is_some(), || format!("{label}: minimal model not isomorphic to the input"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut n_posets = 0;
    for n in 1..=5 {
        for leq in posets(n) {
            n_posets += 1;
            let roots = random_monotone_roots(&leq, &mut rng);
            let outcomes = all_removal_outcomes(&leq, &roots);
            ensure(outcomes.len() == 1, || format!("removal order matters on {leq:?} with {roots:?}"))?;
            let x = localized_line_space(&leq, &roots, Q);
            let mm = minimal_model(&x).map_err(|e| e.to_string())?;
            let mut kept: Vec<usize> = mm.space.names().iter().map(|s| x.index(s).unwrap()).collect();
            kept.sort();
            let want = outcomes.into_iter().next().unwrap();
            ensure(kept == want, || format!("poset {leq:?}, roots {roots:?}: library keeps {kept:?}, oracle {want:?}"))?;
            let again = minimal_model(&mm.space).map_err(|e| e.to_string())?;
            ensure(again.removed.is_empty(), || "minimal model not idempotent".into())?;
        }
    }
    Ok(format!("{} adjunctions round-trip; {n_posets} posets minimize order-independently", cases.len()))
}

/// `ψ: X₂ → P¹` where `X₂` is P¹ with a point adjoined below `U_p0` and
/// `ψ` the cover quotient composed with the identification with P¹.
pub fn adjoined_quasi_iso(p1: &FinSpace) -> Result<SpaceMap, String> {
    let x2 = adjoin_point(p1, &p1.up(0)).map_err(|e| e.to_string())?;
    let u = x2.index("u").ok_or("adjoined point is not called `u`")?;
    let (y2, q2) = quotient_by_cover(&x2, &[x2.up(u), x2.up(1)]).map_err(|e| e.to_string())?;
    let iso = y2.find_isomorphism(p1).ok_or("cover quotient not isomorphic to P¹")?;
    Ok(q2.then(&iso))
}

/// Morphism classes: cover quotients, cylinder of an open inclusion, chart
/// swap, and the diagonal's higher direct images.
pub fn criterion_8() -> Outcome {
    let x = fixtures::p1(Q);
    let (_, q) = quotient_by_cover(&x, &[x.up(0), x.up(1)]).map_err(|e| e.to_string())?;
    verdict("cover quotient quasi-iso", &is_quasi_iso(&q).verdict, true)?;
    let psi = adjoined_quasi_iso(&x)?;
    verdict("adjoined cover quotient quasi-iso", &is_quasi_iso(&psi).verdict, true)?;
    let (_, inc) = x.open_subspace(&x.up(0)).map_err(|e| e.to_string())?;
    let c = cylinder(&inc);
    verdict("cylinder of U_p0 ↪ P¹ schematic", &is_schematic(&c.space).verdict, true)?;
    let r = classify_map(&inc);
    verdict("U_p0 ↪ P¹ quasi-open immersion", &r.quasi_open_immersion.verdict, true)?;
    verdict("U_p0 ↪ P¹ quasi-iso", &r.quasi_iso.verdict, false)?;
    let sw = classify_map(&fixtures::p1_swap(&x));
    verdict("chart swap schematic", &sw.schematic.verdict, true)?;
    let swap_summary: Vec<String> = sw.all().iter().map(|c| format!("{}={}", c.class, c.verdict)).collect();
    let p = product(&x, &x).map_err(|e| e.to_string())?;
    let id = SpaceMap::identity(&x);
    let delta = p.pair(&id, &id).map_err(|e| e.to_string())?;
    let tables = higher_direct_images(&delta, &SheafModule::structure_sheaf(&x), Backend::default()).map_err(|e| e.to_string())?;
    for (y, t) in tables.iter().enumerate() {
        ensure(t.is_acyclic(), || format!("R^iδ_*O ≠ 0 at {}:\n{t}", p.space.name(y)))?;
    }
    Ok(format!("swap: {}; R^{{>0}}δ_*O = 0 at all {} points of P¹×P¹", swap_summary.join(", "), tables.len()))
}

/// Roofs `P¹ → P¹` built from the swap and the quasi-iso `ψ`; each has a
/// known class (identity or swap) fixed by the parity of swaps.
pub fn generated_roofs() -> Result<(Roof, Roof, Vec<(Roof, bool)>), String> {
    let x = fixtures::p1(Q);
    let psi = adjoined_quasi_iso(&x)?;
    let swap = fixtures::p1_swap(&x);
    let e = |r: finschem::Result<Roof>| r.map_err(|e| e.to_string());
    let id = Roof::identity(&x);
    let s = e(Roof::from_map(&swap))?;
    let r = e(Roof::from_map(&psi))?;
    let ri = e(invert(&r))?;
    let t = e(compose(&ri, &r))?;
    let c = e(Roof::new(psi.clone(), psi.clone()))?;
    let d = e(Roof::new(psi.clone(), psi.then(&swap)))?;
    let gens: Vec<(Roof, bool)> = vec![(id.clone(), false), (s.clone(), true), (t, false), (c, false), (d, true)];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut out = gens.clone();
    while out.len() < 20 {
        let (a, pa) = &gens[rng.gen_range(0..gens.len())];
        let (b, pb) = &gens[rng.gen_range(1..gens.len())];
        out.push((e(compose(a, b))?, pa ^ pb));
    }
    Ok((id, s, out))
}

/// Roof laws on 20 generated roofs.
pub fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let (id, s, roofs) = generated_roofs()?;
    let eq = |a: &Roof, b: &Roof| roof_equal(a, b).map_err(|e| e.to_string());
    ensure(!eq(&id, &s)?, || "identity and chart swap not distinguished".into())?;
    for (k, (r, swapped)) in roofs.iter().enumerate() {
        let want = if *swapped { &s } else { &id };
        ensure(eq(r, want)?, || format!("roof {k} is not in its expected class"))?;
        ensure(eq(r, &id)? != *swapped, || format!("roof {k} equal to the wrong class"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..5 {
        let pick = |rng: &mut ChaCha8Rng| roofs[rng.gen_range(0..8)].0.clone();
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let l = compose(&compose(&a, &b).map_err(|e| e.to_string())?, &c).map_err(|e| e.to_string())?;
        let r = compose(&a, &compose(&b, &c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(eq(&l, &r)?, || "composition not associative".into())?;
    }
    for (k, (r, _)) in roofs.iter().take(8).enumerate() {
        if let Ok(inv) = invert(r) {
            let a = compose(r, &inv).map_err(|e| e.to_string())?;
            let b = compose(&inv, r).map_err(|e| e.to_string())?;
            ensure(eq(&a, &Roof::identity(r.source()))?, || format!("roof {k} ∘ inverse ≠ id"))?;
            ensure(eq(&b, &Roof::identity(r.target()))?, || format!("inverse ∘ roof {k} ≠ id"))?;
        }
    }
    // Precomposing both legs with a quasi-isomorphism leaves the class unchanged.
    let x = fixtures::p1(Q);
    let psi = adjoined_quasi_iso(&x)?;
    for (f, swapped) in [(SpaceMap::identity(&x), false), (fixtures::p1_swap(&x), true)] {
        let a = Roof::from_map(&f).map_err(|e| e.to_string())?;
        let b = Roof::new(psi.clone(), psi.then(&f)).map_err(|e| e.to_string())?;
        ensure(eq(&a, &b)?, || format!("precomposition with ψ changes the class (swap = {swapped})"))?;
    }
    Ok(format!("{} roofs, laws hold, identity ≠ swap, in {:?}", roofs.len(), t0.elapsed()))
}

pub const ALL: [(&str, fn() -> Outcome); 9] = [
    ("P¹ classes and twisted cohomology", criterion_1),
    ("P² classes and cohomology", criterion_2),
    ("doubled line", criterion_3),
    ("Godement resolution on random sheaves", criterion_4),
    ("pseudo-circle", criterion_5),
    ("localizations and covers", criterion_6),
    ("minimization", criterion_7),
    ("morphism classes", criterion_8),
    ("roofs", criterion_9),
];

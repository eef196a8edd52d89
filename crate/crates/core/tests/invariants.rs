//! Structural invariants, property-tested on generated inputs and asserted
//! on every fixture.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use finschem::classify::{is_affine, is_fr_space, is_quasi_iso, is_schematic, minimal_model, Verdict};
use finschem::cohomology::{cohomology, cohomology_on, Backend};
use finschem::fixtures;
use finschem::hom::{copair, tensor};
use finschem::qcoh::pullback;
use finschem::serial;
use finschem::space::{cylinder, product, FinSpace, SpaceMap};
use finschem::{AlgHom, Elem, Field, FpModule, LocAlgebra, ModHom, SheafModule};

use common::criteria::adjoined_quasi_iso;
use common::*;

const Q: Field = Field::Rationals;

fn fixture_spaces() -> Vec<(&'static str, FinSpace)> {
    vec![
        ("p1", fixtures::p1(Q)),
        ("p2", fixtures::p2(Q)),
        ("affine line", fixtures::affine_line(Q)),
        ("doubled line", fixtures::doubled_line(Q)),
        ("pseudo-circle", fixtures::pseudo_circle(Q)),
        ("plane with doubled origin", fixtures::plane_doubled_origin(Q)),
    ]
}

fn poly_text(coeffs: &[(i64, u32, u32)]) -> String {
    let mut s = String::from("0");
    for (c, i, j) in coeffs {
        s.push_str(&format!(" + {c}*x^{i}*y^{j}"));
    }
    s
}

fn small_poly() -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3), 1..4).prop_map(|c| poly_text(&c))
}

fn linear_product() -> impl Strategy<Value = String> {
    prop::collection::vec((-2i64..=2, -2i64..=2, -2i64..=2), 1..3).prop_map(|ls| {
        let parts: Vec<String> =
            ls.iter().map(|&(a, b, c)| if a == 0 && b == 0 { "x".into() } else { format!("({a}*x + {b}*y - {c})") }).collect();
        parts.join("*")
    })
}

fn plane() -> LocAlgebra {
    LocAlgebra::polynomial(Q, &["x", "y"])
}

fn nonzero(a: &LocAlgebra, s: &str) -> Option<Elem> {
    let e = a.parse(s).ok()?;
    (!a.is_zero_elem(&e)).then_some(e)
}

fn localize(a: &LocAlgebra, s: &str) -> Option<(LocAlgebra, AlgHom)> {
    let e = nonzero(a, s)?;
    if !a.is_unit(&e) && a.localized(&[e.clone()]).is_zero_ring() {
        return None;
    }
    Some(AlgHom::localization(a, &[e]))
}

/// The identity on generators, as a map between two presentations of what
/// should be the same module.
fn same_module(m: &FpModule, n: &FpModule) -> bool {
    m.ngens() == n.ngens()
        && ModHom::new(m, n, n.generators()).is_ok_and(|h| h.is_isomorphism())
        && ModHom::new(n, m, m.generators()).is_ok_and(|h| h.is_isomorphism())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn groebner_basis_ignores_generator_order(gens in prop::collection::vec(small_poly(), 1..4), rot in 0usize..4) {
        let a = plane();
        let es: Vec<Elem> = gens.iter().map(|g| a.parse(g).unwrap()).collect();
        let mut rotated = es.clone();
        rotated.rotate_left(rot % es.len());
        rotated.reverse();
        prop_assert_eq!(a.ideal_gb(&es), a.ideal_gb(&es));
        prop_assert_eq!(a.ideal_gb(&es), a.ideal_gb(&rotated));
    }

    #[test]
    fn localization_is_flat_epimorphism(s in linear_product()) {
        let a = plane();
        let Some((b, f)) = localize(&a, &s) else { return Ok(()) };
        prop_assert!(f.verify_localization());
        let t = tensor(&f, &f).unwrap();
        let id = AlgHom::identity(&b);
        let mult = copair(&t, &id, &id).unwrap();
        prop_assert!(mult.is_isomorphism(), "B ⊗_A B → B not an isomorphism for A[1/({s})]");
    }

    #[test]
    fn base_change_is_functorial(s1 in linear_product(), s2 in linear_product(), rels in prop::collection::vec(small_poly(), 0..3)) {
        let a = plane();
        let Some((b, f)) = localize(&a, &s1) else { return Ok(()) };
        let Some((_, g)) = localize(&b, &s2) else { return Ok(()) };
        let rows: Vec<Vec<Elem>> = rels.iter().map(|r| vec![a.parse(r).unwrap(), a.one()]).collect();
        let m = FpModule::new(&a, 2, rows, None).unwrap();
        let direct = m.base_change(&f.then(&g)).unwrap();
        let stepwise = m.base_change(&f).unwrap().base_change(&g).unwrap();
        prop_assert!(same_module(&direct, &stepwise));
    }

    #[test]
    fn kernel_and_cokernel_compose_to_zero(entries in prop::collection::vec(small_poly(), 6), rels in prop::collection::vec(small_poly(), 0..2)) {
        let a = plane();
        let src = FpModule::free(&a, 2);
        let rows: Vec<Vec<Elem>> = rels.iter().map(|r| vec![a.parse(r).unwrap(), a.zero(), a.one()]).collect();
        let tgt = FpModule::new(&a, 3, rows, None).unwrap();
        let e: Vec<Elem> = entries.iter().map(|s| a.parse(s).unwrap()).collect();
        let h = ModHom::new(&src, &tgt, vec![e[..3].to_vec(), e[3..].to_vec()]).unwrap();
        let (_, inc) = h.kernel();
        prop_assert!(inc.then(&h).is_zero());
        let (_, proj) = h.cokernel();
        prop_assert!(h.then(&proj).is_zero());
        prop_assert!(proj.is_surjective());
        prop_assert!(inc.is_injective());
    }

    #[test]
    fn minimal_open_neighbourhoods(idx in 0usize..63) {
        let ps = posets(5);
        let leq = &ps[idx % ps.len()];
        let x = constant_space(leq, Q);
        for p in 0..x.len() {
            let u = x.up(p);
            prop_assert!(u.contains(&p));
            prop_assert!(x.is_open(&u));
            for y in 0..x.len() {
                prop_assert_eq!(u.contains(&y), x.leq(p, y));
            }
        }
    }

    #[test]
    fn minimal_model_is_idempotent(idx in 0usize..16, seed in 0u64..1000) {
        let ps = posets(4);
        let leq = &ps[idx % ps.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roots = random_monotone_roots(leq, &mut rng);
        let x = localized_line_space(leq, &roots, Q);
        let m = minimal_model(&x).unwrap();
        let again = minimal_model(&m.space).unwrap();
        prop_assert!(again.removed.is_empty());
        prop_assert_eq!(again.space.len(), m.space.len());
    }

    #[test]
    fn space_files_round_trip(idx in 0usize..16, seed in 0u64..1000) {
        let ps = posets(4);
        let leq = &ps[idx % ps.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roots = random_monotone_roots(leq, &mut rng);
        let x = localized_line_space(leq, &roots, Q);
        let text = serial::to_json(&serial::space_document(&x));
        let back = serial::parse_space_file(&text, Q).unwrap();
        prop_assert_eq!(serial::to_json(&serial::space_document(&back.space)), text);
    }
}

#[test]
fn sections_over_minimal_opens_are_stalks() {
    for (name, x) in fixture_spaces() {
        for p in 0..x.len() {
            let (alg, maps) = x.sections(&x.up(p)).unwrap().presented().expect("minimum present");
            assert_eq!(&alg, x.stalk(p), "{name}: O(U_{})", x.name(p));
            let (_, r) = maps.iter().find(|(z, _)| *z == p).unwrap();
            assert!(r.equal_on_generators(&AlgHom::identity(x.stalk(p))), "{name}");
        }
    }
}

#[test]
fn affine_implies_schematic_implies_fr() {
    for (name, x) in fixture_spaces() {
        let (a, s, f) = (is_affine(&x).verdict, is_schematic(&x).verdict, is_fr_space(&x).verdict);
        if a == Verdict::True {
            assert_eq!(s, Verdict::True, "{name}: affine but not schematic");
        }
        if s == Verdict::True {
            assert_eq!(f, Verdict::True, "{name}: schematic but not fr");
        }
    }
}

fn test_maps() -> Vec<(&'static str, SpaceMap)> {
    let x = fixtures::p1(Q);
    let (_, inc) = x.open_subspace(&x.up(0)).unwrap();
    vec![
        ("identity", SpaceMap::identity(&x)),
        ("swap", fixtures::p1_swap(&x)),
        ("open inclusion", inc),
        ("adjoined quotient", adjoined_quasi_iso(&x).unwrap()),
    ]
}

#[test]
fn cylinder_factors_the_map() {
    for (name, f) in test_maps() {
        let c = cylinder(&f);
        assert!(c.inclusion.then(&c.retraction).equals(&f), "{name}: F ∘ i ≠ f");
        for (y, &cy) in c.y_points.iter().enumerate() {
            assert_eq!(c.space.stalk(cy), f.target().stalk(y), "{name}");
        }
        assert!(c.space.is_open(&c.inclusion.point_map().to_vec()), "{name}: X not open in C(f)");
    }
}

#[test]
fn fiber_product_pairing_is_universal() {
    let x = fixtures::p1(Q);
    let p = product(&x, &x).unwrap();
    let maps = [SpaceMap::identity(&x), fixtures::p1_swap(&x)];
    for a in &maps {
        for b in &maps {
            let ab = p.pair(a, b).unwrap();
            assert!(ab.then(&p.p1).equals(a));
            assert!(ab.then(&p.p2).equals(b));
        }
    }
}

#[test]
fn quasi_isomorphisms_compose() {
    let x = fixtures::p1(Q);
    let psi = adjoined_quasi_iso(&x).unwrap();
    let swap = fixtures::p1_swap(&x);
    for f in [&psi, &swap] {
        assert_eq!(is_quasi_iso(f).verdict, Verdict::True);
    }
    assert_eq!(is_quasi_iso(&psi.then(&swap)).verdict, Verdict::True);
    assert_eq!(is_quasi_iso(&swap.then(&swap)).verdict, Verdict::True);
    let kq = psi.source().kolmogorov_quotient();
    assert_eq!(is_quasi_iso(&kq.quotient).verdict, Verdict::True);
}

#[test]
fn pullbacks_stay_quasi_coherent() {
    let x = fixtures::p1(Q);
    let psi = adjoined_quasi_iso(&x).unwrap();
    for d in -2..=2 {
        let m = pullback(&psi, &fixtures::p1_twist(&x, d)).unwrap();
        assert!(m.validate().is_empty());
        assert!(m.is_quasi_coherent().quasi_coherent, "ψ*O({d})");
    }
}

#[test]
fn minimal_opens_are_acyclic() {
    let x = fixtures::p1(Q);
    let y = fixtures::p2(Q);
    let mut sheaves: Vec<SheafModule> = (-3..=1).map(|d| fixtures::p1_twist(&x, d)).collect();
    sheaves.extend((-3..=0).map(|d| fixtures::p2_twist(&y, d)));
    for m in &sheaves {
        for p in 0..m.space().len() {
            let t = cohomology_on(m, &m.space().up(p), Backend::Graded { window: (-3, 3) }).unwrap();
            assert!(t.is_acyclic(), "H^{{>0}}(U_{}) ≠ 0:\n{t}", m.space().name(p));
        }
    }
}

#[test]
fn free_rank_two_doubles_cohomology() {
    let x = fixtures::p1(Q);
    let w = Backend::Graded { window: (-5, 5) };
    for d in [-3, 0] {
        let o = fixtures::p1_twist(&x, d);
        let one = cohomology(&o, w).unwrap();
        let two = cohomology(&o.direct_sum(&o).unwrap(), w).unwrap();
        for (deg, dims) in &one.entries {
            let doubled: Vec<usize> = dims.iter().map(|v| 2 * v).collect();
            assert_eq!(two.entries.get(deg).map(|v| v[..doubled.len()].to_vec()), Some(doubled));
        }
    }
}

#[test]
fn global_sections_of_a_product_multiply() {
    let x = fixtures::p1(Q);
    let p = product(&x, &x).unwrap();
    let t = cohomology(&SheafModule::structure_sheaf(&p.space), Backend::Graded { window: (-1, 2) }).unwrap();
    for a in -1i64..=2 {
        for b in -1i64..=2 {
            let want = p1_twist_oracle(0, a)[0] * p1_twist_oracle(0, b)[0];
            assert_eq!(t.dim(0, &[a, b]).unwrap_or(0), want, "H⁰ in degree ({a},{b})");
        }
    }
}

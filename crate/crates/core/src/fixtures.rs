//! Built-in example spaces and sheaves.

use crate::algebra::LocAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::AlgHom;
use crate::qcoh::{line_bundle, pullback, SheafModule};
use crate::space::{FinSpace, GlobalSections, SpaceMap};

pub const BUILTIN_NAMES: &[&str] = &["p1", "p2", "doubled_line", "affine_line", "pseudo_circle", "plane_doubled_origin"];

fn alg(field: Field, vars: &[&str], invert: &[&str], weights: &[&[i64]]) -> LocAlgebra {
    let w = weights.iter().map(|v| v.to_vec()).collect();
    LocAlgebra::from_strings(field, vars, &[], invert, Some(w)).expect("fixture algebra")
}

fn loc(a: &LocAlgebra, b: &LocAlgebra, images: &[(&str, &str)], extra: &[&str]) -> AlgHom {
    AlgHom::parse(a, b, images, Some(extra)).expect("fixture restriction")
}

/// Attaches `O(X) = R` given by the images of the variables of `R` at every point.
fn with_sections(x: FinSpace, r: &LocAlgebra, images: &[&str], extras: &[Option<&[&str]>]) -> FinSpace {
    let maps = (0..x.len())
        .map(|p| {
            let pairs: Vec<(&str, &str)> = r.vars().iter().map(|v| v.as_str()).zip(images.iter().copied()).collect();
            AlgHom::parse(r, x.stalk(p), &pairs, extras[p]).expect("global section map")
        })
        .collect();
    x.with_global_sections(GlobalSections { algebra: r.clone(), maps }).expect("global sections")
}

fn constants(x: FinSpace) -> FinSpace {
    let k = LocAlgebra::ground(x.field());
    let n = x.len();
    with_sections(x, &k, &[], &vec![None; n])
}

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

pub fn builtin(name: &str, field: Field) -> Result<FinSpace> {
    Ok(match name {
        "p1" => p1(field),
        "p2" => p2(field),
        "doubled_line" => doubled_line(field),
        "affine_line" => affine_line(field),
        "pseudo_circle" => pseudo_circle(field),
        "plane_doubled_origin" => plane_doubled_origin(field),
        _ => return Err(Error::InvalidSpace(format!("unknown built-in `{name}`"))),
    })
}

/// The projective line: `k[x] → k[x,1/x] ← k[u]`, `u ↦ 1/x`.
pub fn p1(field: Field) -> FinSpace {
    let a = alg(field, &["x"], &[], &[&[1]]);
    let b = alg(field, &["u"], &[], &[&[-1]]);
    let c = alg(field, &["x"], &["x"], &[&[1]]);
    let r0 = loc(&a, &c, &[("x", "x")], &["x"]);
    let r1 = loc(&b, &c, &[("u", "1/x")], &["u"]);
    constants(
        FinSpace::from_edges(field, names(&["p0", "pinf", "eta"]), vec![a, b, c], vec![((0, 2), r0), ((1, 2), r1)])
            .expect("p1"),
    )
}

/// `O(d)` on [`p1`]: generator at `pinf` restricts to `x^d` times the
/// generator at `eta`.
pub fn p1_twist(x: &FinSpace, d: i64) -> SheafModule {
    let xd = x.stalk(2).parse(&format!("x^{d}")).unwrap();
    line_bundle(x, Some(vec![vec![0], vec![d], vec![0]]), vec![((0, 2), x.stalk(2).one()), ((1, 2), xd)]).expect("O(d)")
}

/// `O(d)` on a space isomorphic to [`p1`] or [`p2`], pulled back along the
/// isomorphism.
pub fn standard_twist(x: &FinSpace, d: i64) -> Result<SheafModule> {
    let p = p1(x.field());
    if let Some(iso) = x.find_isomorphism(&p) {
        return pullback(&iso, &p1_twist(&p, d));
    }
    let q = p2(x.field());
    if let Some(iso) = x.find_isomorphism(&q) {
        return pullback(&iso, &p2_twist(&q, d));
    }
    Err(Error::InvalidModule(format!("O({d}) is only built in for the projective line and plane")))
}

/// The chart swap `x ↔ 1/x` of [`p1`].
pub fn p1_swap(x: &FinSpace) -> SpaceMap {
    let s = |i: usize| x.stalk(i);
    let c0 = AlgHom::parse(s(1), s(0), &[("u", "x")], None).unwrap();
    let c1 = AlgHom::parse(s(0), s(1), &[("x", "u")], None).unwrap();
    let c2 = AlgHom::parse(s(2), s(2), &[("x", "1/x")], None).unwrap();
    SpaceMap::new(x, x, vec![1, 0, 2], vec![c0, c1, c2]).expect("chart swap")
}

/// The projective plane: three charts, their pairwise intersections and the
/// triple intersection, graded by `ℤ²` (`x ↦ (1,0)`, `y ↦ (0,1)`).
pub fn p2(field: Field) -> FinSpace {
    let u0 = alg(field, &["x", "y"], &[], &[&[1, 0], &[0, 1]]);
    // a = 1/x, b = y/x
    let u1 = alg(field, &["a", "b"], &[], &[&[-1, 0], &[-1, 1]]);
    // c = 1/y, d = x/y
    let u2 = alg(field, &["c", "d"], &[], &[&[0, -1], &[1, -1]]);
    let u01 = alg(field, &["x", "y"], &["x"], &[&[1, 0], &[0, 1]]);
    let u02 = alg(field, &["x", "y"], &["y"], &[&[1, 0], &[0, 1]]);
    let u12 = alg(field, &["a", "b"], &["b"], &[&[-1, 0], &[-1, 1]]);
    let u012 = alg(field, &["x", "y"], &["x", "y"], &[&[1, 0], &[0, 1]]);
    let id = [("x", "x"), ("y", "y")];
    let edges = vec![
        ((0, 3), loc(&u0, &u01, &id, &["x"])),
        ((0, 4), loc(&u0, &u02, &id, &["y"])),
        ((1, 3), loc(&u1, &u01, &[("a", "1/x"), ("b", "y/x")], &["a"])),
        ((1, 5), loc(&u1, &u12, &[("a", "a"), ("b", "b")], &["b"])),
        ((2, 4), loc(&u2, &u02, &[("c", "1/y"), ("d", "x/y")], &["c"])),
        ((2, 5), loc(&u2, &u12, &[("c", "a/b"), ("d", "1/b")], &["d"])),
        ((3, 6), loc(&u01, &u012, &id, &["y"])),
        ((4, 6), loc(&u02, &u012, &id, &["x"])),
        ((5, 6), loc(&u12, &u012, &[("a", "1/x"), ("b", "y/x")], &["a"])),
    ];
    constants(
        FinSpace::from_edges(
            field,
            names(&["U0", "U1", "U2", "U01", "U02", "U12", "U012"]),
            vec![u0, u1, u2, u01, u02, u12, u012],
            edges,
        )
        .expect("p2"),
    )
}

/// `O(d)` on [`p2`] with transitions `x^d`, `y^d`, `(y/x)^d`.
pub fn p2_twist(x: &FinSpace, d: i64) -> SheafModule {
    let p = |i: usize, s: &str| x.stalk(i).parse(s).unwrap();
    let one = |i: usize| x.stalk(i).one();
    let shifts = vec![vec![0, 0], vec![d, 0], vec![0, d], vec![0, 0], vec![0, 0], vec![d, 0], vec![0, 0]];
    let tr = vec![
        ((0, 3), one(3)),
        ((0, 4), one(4)),
        ((1, 3), p(3, &format!("x^{d}"))),
        ((1, 5), one(5)),
        ((2, 4), p(4, &format!("y^{d}"))),
        ((2, 5), p(5, &format!("b^{d}"))),
        ((3, 6), one(6)),
        ((4, 6), one(6)),
        ((5, 6), p(6, &format!("x^{d}"))),
    ];
    line_bundle(x, Some(shifts), tr).expect("O(d) on the plane")
}

/// The affine line with a doubled origin: `k[x] → k[x,1/x] ← k[x]`.
pub fn doubled_line(field: Field) -> FinSpace {
    let a = alg(field, &["x"], &[], &[&[1]]);
    let c = alg(field, &["x"], &["x"], &[&[1]]);
    let r = loc(&a, &c, &[("x", "x")], &["x"]);
    let x = FinSpace::from_edges(field, names(&["o1", "o2", "eta"]), vec![a.clone(), a.clone(), c], vec![((0, 2), r.clone()), ((1, 2), r)])
        .expect("doubled line");
    with_sections(x, &a, &["x"], &[Some(&[]), Some(&[]), Some(&["x"])])
}

/// `(*, k[x])`.
pub fn affine_line(field: Field) -> FinSpace {
    FinSpace::point(&alg(field, &["x"], &[], &[&[1]]))
}

/// Four points `a, b < c, d`, every stalk the ground field.
pub fn pseudo_circle(field: Field) -> FinSpace {
    let k = LocAlgebra::ground(field);
    let id = AlgHom::identity(&k);
    let edges = vec![((0, 2), id.clone()), ((0, 3), id.clone()), ((1, 2), id.clone()), ((1, 3), id)];
    constants(
        FinSpace::from_edges(field, names(&["a", "b", "c", "d"]), vec![k.clone(), k.clone(), k.clone(), k], edges)
            .expect("pseudo-circle"),
    )
}

/// Two planes glued along the punctured plane (modelled by
/// `k[x,y,1/x] → k[x,y,1/x,1/y] ← k[x,y,1/y]`).
pub fn plane_doubled_origin(field: Field) -> FinSpace {
    let w: &[&[i64]] = &[&[1, 0], &[0, 1]];
    let a = alg(field, &["x", "y"], &[], w);
    let c1 = alg(field, &["x", "y"], &["x"], w);
    let c2 = alg(field, &["x", "y"], &["y"], w);
    let c12 = alg(field, &["x", "y"], &["x", "y"], w);
    let id = [("x", "x"), ("y", "y")];
    let edges = vec![
        ((0, 2), loc(&a, &c1, &id, &["x"])),
        ((0, 3), loc(&a, &c2, &id, &["y"])),
        ((1, 2), loc(&a, &c1, &id, &["x"])),
        ((1, 3), loc(&a, &c2, &id, &["y"])),
        ((2, 4), loc(&c1, &c12, &id, &["y"])),
        ((3, 4), loc(&c2, &c12, &id, &["x"])),
    ];
    let x = FinSpace::from_edges(field, names(&["o1", "o2", "ux", "uy", "uxy"]), vec![a.clone(), a.clone(), c1, c2, c12], edges)
        .expect("plane with doubled origin");
    with_sections(x, &a, &["x", "y"], &[Some(&[]), Some(&[]), Some(&["x"]), Some(&["y"]), Some(&["x", "y"])])
}

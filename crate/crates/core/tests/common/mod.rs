//! Independent oracles and generators shared by the integration tests and
//! the acceptance harness. Nothing here calls into the library's algebra:
//! ranks, Čech complexes and point counts are recomputed from scratch.

#![allow(dead_code)]

pub mod criteria;

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use finschem::cohomology::LinearSheaf;
use finschem::field::Field;
use finschem::hom::AlgHom;
use finschem::linalg::Matrix;
use finschem::space::FinSpace;
use finschem::LocAlgebra;

// ---- exact rank ----

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Row echelon form over ℚ; returns the pivot columns.
fn echelon(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let v = &rows[r][j] * &f;
                    rows[i][j] = &rows[i][j] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    echelon(&mut rows.to_vec()).len()
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>())
}

/// Solves `A c = v` for `A` with independent columns (given as column list).
fn coords(columns: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    let n = columns.len();
    let m = v.len();
    let mut rows: Vec<Vec<BigRational>> =
        (0..m).map(|i| columns.iter().map(|c| c[i].clone()).chain([v[i].clone()]).collect()).collect();
    let piv = echelon(&mut rows);
    assert!(piv.iter().all(|&c| c < n), "vector outside the span");
    let mut out = vec![BigRational::zero(); n];
    for (r, &c) in piv.iter().enumerate() {
        out[c] = rows[r][n].clone();
    }
    out
}

// ---- Čech complexes with one-dimensional pieces ----

/// Cohomology of a Čech complex on `n` charts where every piece is 0- or
/// 1-dimensional (`nonempty(I)`), restriction between nonzero pieces is the
/// identity and pieces only grow under intersection.
pub fn cech_01(n: usize, nonempty: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
    };
    let groups: Vec<Vec<Vec<usize>>> = (1..=n).map(|k| subsets(k).into_iter().filter(|s| nonempty(s)).collect()).collect();
    let mut ranks = Vec::new();
    for k in 0..n - 1 {
        let rows: Vec<Vec<i64>> = groups[k + 1]
            .iter()
            .map(|t| {
                groups[k]
                    .iter()
                    .map(|s| match t.iter().position(|j| !s.contains(j)) {
                        Some(pos) if s.iter().all(|i| t.contains(i)) => if pos % 2 == 0 { 1 } else { -1 },
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        ranks.push(if rows.is_empty() || groups[k].is_empty() { 0 } else { rank_i64(&rows) });
    }
    (0..n)
        .map(|k| {
            let out = if k < ranks.len() { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            groups[k].len() - out - inc
        })
        .collect()
}

/// `H^•(P¹, O(d))` in degree `e`: charts `k[x]` (generator degree 0) and
/// `k[1/x]` (generator degree `d`), overlap `k[x, 1/x]`.
pub fn p1_twist_oracle(d: i64, e: i64) -> Vec<usize> {
    cech_01(2, |s| match s {
        [0] => e >= 0,
        [1] => e <= d,
        _ => true,
    })
}

/// `H^•(P², O(d))` in bidegree `(p, q)` of `x^p y^q` with the three
/// standard charts.
pub fn p2_twist_oracle(d: i64, p: i64, q: i64) -> Vec<usize> {
    cech_01(3, |s| match s {
        [0] => p >= 0 && q >= 0,
        [1] => q >= 0 && p + q <= d,
        [2] => p >= 0 && p + q <= d,
        [0, 1] => q >= 0,
        [0, 2] => p >= 0,
        [1, 2] => p + q <= d,
        _ => true,
    })
}

/// `coker(k[x] ⊕ k[x] → k[x, 1/x])` in degree `e`, `(a, b) ↦ a − b`.
pub fn doubled_line_h1(e: i64) -> usize {
    let cols = if e >= 0 { vec![1, -1] } else { vec![] };
    let r = if cols.is_empty() { 0 } else { rank_i64(&[cols]) };
    1 - r
}

/// Cohomology of the constant sheaf on a finite poset: simplicial
/// cohomology of its order complex.
pub fn order_complex_cohomology(n: usize, lt: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut chains: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    loop {
        let next: Vec<Vec<usize>> = chains
            .last()
            .unwrap()
            .iter()
            .flat_map(|c| (0..n).filter(|&y| lt(*c.last().unwrap(), y)).map(move |y| [c.clone(), vec![y]].concat()))
            .collect();
        if next.is_empty() {
            break;
        }
        chains.push(next);
    }
    let mut ranks = Vec::new();
    for k in 0..chains.len() - 1 {
        let rows: Vec<Vec<i64>> = chains[k + 1]
            .iter()
            .map(|t| {
                chains[k]
                    .iter()
                    .map(|s| {
                        (0..t.len())
                            .find(|&i| {
                                let mut f = t.clone();
                                f.remove(i);
                                f == *s
                            })
                            .map_or(0, |i| if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        ranks.push(rank_i64(&rows));
    }
    (0..chains.len())
        .map(|k| chains[k].len() - ranks.get(k).copied().unwrap_or(0) - if k > 0 { ranks[k - 1] } else { 0 })
        .collect()
}

// ---- 𝔽_p point oracle ----

/// A product of affine-linear forms `a·x + b·y + c` over 𝔽_p.
#[derive(Clone, Debug)]
pub struct LinearProduct(pub Vec<(i64, i64, i64)>);

impl LinearProduct {
    pub fn eval(&self, p: i64, x: i64, y: i64) -> i64 {
        self.0.iter().fold(1, |acc, &(a, b, c)| acc * ((a * x + b * y + c).rem_euclid(p)) % p)
    }

    pub fn to_expr(&self, two_vars: bool) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(a, b, c)| if two_vars { format!("({a}*x + {b}*y + {c})") } else { format!("({a}*x + {c})") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// The localizations at `σ_i` cover `𝔸^n_{𝔽_p}` iff no rational point kills
/// every `σ_i` (exact for products of linear forms: their common zero sets
/// are unions of rational affine subspaces).
pub fn covers_all_points(p: i64, two_vars: bool, sigmas: &[LinearProduct]) -> bool {
    let ys: Vec<i64> = if two_vars { (0..p).collect() } else { vec![0] };
    (0..p).all(|x| ys.iter().all(|&y| sigmas.iter().any(|s| s.eval(p, x, y) != 0)))
}

pub fn random_linear_product(rng: &mut impl Rng, two_vars: bool) -> LinearProduct {
    let k = rng.gen_range(0..=2);
    LinearProduct(
        (0..k)
            .map(|_| {
                let a = rng.gen_range(0..3);
                let b = if two_vars { rng.gen_range(0..3) } else { 0 };
                let a = if a == 0 && b == 0 { 1 } else { a };
                (a, b, rng.gen_range(0..4))
            })
            .collect(),
    )
}

// ---- posets ----

/// Order relation `leq[i][j]`.
pub type Poset = Vec<Vec<bool>>;

fn canonical(leq: &Poset) -> Vec<bool> {
    let n = leq.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<bool>> = None;
    fn permute(k: usize, perm: &mut Vec<usize>, leq: &Poset, best: &mut Option<Vec<bool>>) {
        let n = perm.len();
        if k == n {
            let code: Vec<bool> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| leq[perm[i]][perm[j]]).collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            permute(k + 1, perm, leq, best);
            perm.swap(k, i);
        }
    }
    permute(0, &mut perm, leq, &mut best);
    best.unwrap()
}

/// All posets on `n` points up to isomorphism, labelled along a linear
/// extension (`i < j` whenever `i <_P j`).
pub fn posets(n: usize) -> Vec<Poset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let closed = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(leq[i][j] && leq[j][k]) || leq[i][k])));
        if closed && seen.insert(canonical(&leq)) {
            out.push(leq);
        }
    }
    out
}

pub fn covering_pairs(leq: &Poset) -> Vec<(usize, usize)> {
    let n = leq.len();
    let lt = |a: usize, b: usize| a != b && leq[a][b];
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| lt(a, b) && !(0..n).any(|z| lt(a, z) && lt(z, b))).collect()
}

pub fn constant_space(leq: &Poset, field: Field) -> FinSpace {
    let k = LocAlgebra::ground(field);
    let names = (0..leq.len()).map(|i| format!("p{i}")).collect();
    let edges = covering_pairs(leq).into_iter().map(|e| (e, AlgHom::identity(&k))).collect();
    FinSpace::from_edges(field, names, vec![k; leq.len()], edges).expect("constant space")
}

// ---- localizations of k[x] at linear factors ----

pub const ROOTS: [i64; 3] = [0, 1, 2];

fn factor(a: i64) -> String {
    if a == 0 { "x".into() } else { format!("x - {a}") }
}

/// Monotone assignment `x ↦ S_x ⊆ ROOTS` of inverted factors `x − a`.
pub fn random_monotone_roots(leq: &Poset, rng: &mut impl Rng) -> Vec<BTreeSet<i64>> {
    let n = leq.len();
    let mut s: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        let mut own: BTreeSet<i64> = ROOTS.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        for j in 0..i {
            if leq[j][i] {
                own.extend(s[j].iter().copied());
            }
        }
        s[i] = own;
    }
    s
}

pub fn localized_line_space(leq: &Poset, roots: &[BTreeSet<i64>], field: Field) -> FinSpace {
    let alg = |s: &BTreeSet<i64>| {
        let inv: Vec<String> = s.iter().map(|&a| factor(a)).collect();
        let inv: Vec<&str> = inv.iter().map(|s| s.as_str()).collect();
        LocAlgebra::from_strings(field, &["x"], &[], &inv, None).unwrap()
    };
    let stalks: Vec<LocAlgebra> = roots.iter().map(alg).collect();
    let edges = covering_pairs(leq)
        .into_iter()
        .map(|(a, b)| {
            let extra: Vec<String> = roots[b].difference(&roots[a]).map(|&r| factor(r)).collect();
            let extra: Vec<&str> = extra.iter().map(|s| s.as_str()).collect();
            ((a, b), AlgHom::parse(&stalks[a], &stalks[b], &[("x", "x")], Some(&extra)).unwrap())
        })
        .collect();
    let names = (0..leq.len()).map(|i| format!("p{i}")).collect();
    FinSpace::from_edges(field, names, stalks, edges).unwrap()
}

/// Removability for [`localized_line_space`]: `O_p → ∏_{q>p} O_q` is
/// faithfully flat iff some `q > p` exists and every root not inverted at
/// `p` survives at some `q > p`.
pub fn removable_oracle(alive: &[usize], leq: &Poset, roots: &[BTreeSet<i64>], p: usize) -> bool {
    let above: Vec<usize> = alive.iter().copied().filter(|&q| q != p && leq[p][q]).collect();
    !above.is_empty() && ROOTS.iter().filter(|a| !roots[p].contains(a)).all(|a| above.iter().any(|&q| !roots[q].contains(a)))
}

/// Every terminal point set reachable by removing removable points one at a
/// time, in every order.
pub fn all_removal_outcomes(leq: &Poset, roots: &[BTreeSet<i64>]) -> BTreeSet<Vec<usize>> {
    let mut memo: HashMap<Vec<usize>, BTreeSet<Vec<usize>>> = HashMap::new();
    fn go(
        alive: Vec<usize>,
        leq: &Poset,
        roots: &[BTreeSet<i64>],
        memo: &mut HashMap<Vec<usize>, BTreeSet<Vec<usize>>>,
    ) -> BTreeSet<Vec<usize>> {
        if let Some(r) = memo.get(&alive) {
            return r.clone();
        }
        let rem: Vec<usize> = alive.iter().copied().filter(|&p| removable_oracle(&alive, leq, roots, p)).collect();
        let out = if rem.is_empty() {
            BTreeSet::from([alive.clone()])
        } else {
            rem.iter().flat_map(|&p| go(alive.iter().copied().filter(|&q| q != p).collect(), leq, roots, memo)).collect()
        };
        memo.insert(alive, out.clone());
        out
    }
    go((0..leq.len()).collect(), leq, roots, &mut memo)
}

// ---- random sheaves of vector spaces ----

/// The image of a random map `⊕_z P_z → ⊕_w I_w` on the poset, where
/// `P_z = k` on `U_z` and `I_w = k` below `w`. Stalk dimensions are at most
/// `min(#z, #w) ≤ 3`.
pub fn random_image_sheaf(space: &FinSpace, rng: &mut impl Rng) -> LinearSheaf {
    let n = space.len();
    let nz = rng.gen_range(1..=3);
    let nw = rng.gen_range(1..=3);
    let zs: Vec<usize> = (0..nz).map(|_| rng.gen_range(0..n)).collect();
    let ws: Vec<usize> = (0..nw).map(|_| rng.gen_range(0..n)).collect();
    let coef: Vec<Vec<i64>> =
        ws.iter().map(|&w| zs.iter().map(|&z| if space.leq(z, w) { rng.gen_range(-2..=2) } else { 0 }).collect()).collect();
    // Columns spanning the image at x, as vectors in k^{ws}.
    let image_basis = |x: usize| -> Vec<Vec<BigRational>> {
        let cols: Vec<Vec<BigRational>> = (0..nz)
            .filter(|&j| space.leq(zs[j], x))
            .map(|j| (0..nw).map(|i| if space.leq(x, ws[i]) { q(coef[i][j]) } else { BigRational::zero() }).collect())
            .collect();
        if cols.is_empty() {
            return vec![];
        }
        let mut rows: Vec<Vec<BigRational>> = (0..nw).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let piv = echelon(&mut rows);
        piv.into_iter().map(|c| cols[c].clone()).collect()
    };
    let bases: Vec<Vec<Vec<BigRational>>> = (0..n).map(image_basis).collect();
    let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut maps = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            if x == y || !space.leq(x, y) {
                continue;
            }
            let mut m = Matrix::zeros(dims[y], dims[x]);
            for (c, v) in bases[x].iter().enumerate() {
                let proj: Vec<BigRational> =
                    (0..nw).map(|i| if space.leq(y, ws[i]) { v[i].clone() } else { BigRational::zero() }).collect();
                if proj.iter().all(|t| t.is_zero()) {
                    continue;
                }
                for (r, t) in coords(&bases[y], &proj).into_iter().enumerate() {
                    m.data[r][c] = t;
                }
            }
            maps.insert((x, y), m);
        }
    }
    LinearSheaf::new(space, Field::Rationals, dims, maps).expect("image sheaves are sheaves")
}

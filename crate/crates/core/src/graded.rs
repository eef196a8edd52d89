//! Finite-dimensional graded pieces of graded algebras and modules.
//!
//! A degree-`α` piece of `P/J` has the standard monomials of weight `α` as a
//! basis. To enumerate them we split the exponent space by *admissible* sets
//! `T` of variables (no leading monomial of the basis lives only on `T`):
//! outside `T` an exponent is bounded by the largest exponent occurring in a
//! leading monomial, inside `T` it is bounded through a functional `y` that
//! is positive on every weight of `T`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{Elem, LocAlgebra};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::{divides, Exp};

#[derive(Debug)]
pub struct GradedIndex {
    rank: usize,
    weights: Vec<Vec<i64>>,
    leads: Vec<Exp>,
    caps: Vec<u32>,
    /// Maximal admissible sets with their positive functionals.
    regions: Vec<(Vec<usize>, Vec<i64>)>,
}

/// Basis of one graded piece plus a reverse index.
#[derive(Debug, Clone)]
pub struct GradedPiece {
    pub degree: Vec<i64>,
    pub basis: Vec<Exp>,
    index: HashMap<Exp, usize>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Some `y ∈ [-B,B]^r` with `y·w > 0` for all given weights.
fn positive_functional(ws: &[&Vec<i64>], rank: usize) -> Option<Vec<i64>> {
    if ws.is_empty() {
        return Some(vec![0; rank]);
    }
    for bound in 1..=4i64 {
        let mut y = vec![-bound; rank];
        loop {
            if ws.iter().all(|w| dot(&y, w) > 0) {
                return Some(y);
            }
            let mut k = 0;
            loop {
                if k == rank {
                    break;
                }
                if y[k] < bound {
                    y[k] += 1;
                    break;
                }
                y[k] = -bound;
                k += 1;
            }
            if k == rank {
                break;
            }
        }
    }
    None
}

impl GradedIndex {
    pub(crate) fn build(alg: &LocAlgebra) -> Result<GradedIndex> {
        let weights = alg
            .pvar_weights()
            .ok_or_else(|| Error::UngradedModule(format!("{alg} carries no grading")))?;
        let rank = alg.grading().map(|g| g.rank).unwrap_or(0);
        let np = alg.npvars();
        let leads: Vec<Exp> = alg.gb().iter().map(|g| g.lead().unwrap().0.clone()).collect();
        let mut caps = vec![0u32; np];
        for l in &leads {
            for j in 0..np {
                caps[j] = caps[j].max(l[j]);
            }
        }
        if np > 22 {
            return Err(Error::InfiniteGradedPiece(format!("{np} presentation variables is too many to enumerate")));
        }
        let admissible = |mask: u32| -> bool {
            !leads.iter().any(|l| (0..np).all(|j| l[j] == 0 || mask & (1 << j) != 0))
        };
        let mut maximal: Vec<u32> = Vec::new();
        for mask in 0u32..(1u32 << np) {
            if !admissible(mask) {
                continue;
            }
            let is_max = (0..np).all(|j| mask & (1 << j) != 0 || !admissible(mask | (1 << j)));
            if is_max {
                maximal.push(mask);
            }
        }
        let mut regions = Vec::new();
        for mask in maximal {
            let t: Vec<usize> = (0..np).filter(|j| mask & (1 << j) != 0).collect();
            let ws: Vec<&Vec<i64>> = t.iter().map(|&j| &weights[j]).collect();
            let y = positive_functional(&ws, rank).ok_or_else(|| {
                let names = alg.pvar_names();
                let vs: Vec<&str> = t.iter().map(|&j| names[j].as_str()).collect();
                Error::InfiniteGradedPiece(format!(
                    "monomials in {{{}}} of {alg} have no positive weight functional",
                    vs.join(", ")
                ))
            })?;
            regions.push((t, y));
        }
        Ok(GradedIndex { rank, weights, leads, caps, regions })
    }

    fn basis(&self, alpha: &[i64]) -> Vec<Exp> {
        let np = self.caps.len();
        let mut seen: HashSet<Exp> = HashSet::new();
        let mut out = Vec::new();
        for (t, y) in &self.regions {
            let outside: Vec<usize> = (0..np).filter(|j| !t.contains(j)).collect();
            let steps: Vec<i64> = t.iter().map(|&j| dot(y, &self.weights[j])).collect();
            let mut e = vec![0u32; np];
            self.walk_outside(&outside, 0, &mut e, &mut |e| {
                let used: i64 = outside.iter().map(|&j| dot(y, &self.weights[j]) * e[j] as i64).sum();
                let budget = dot(y, alpha) - used;
                if budget < 0 {
                    return;
                }
                let mut e2 = e.to_vec();
                walk_inside(t, &steps, 0, budget, &mut e2, &mut |cand| {
                    if self.weight(cand) == alpha
                        && !self.leads.iter().any(|l| divides(l, cand))
                        && seen.insert(cand.to_vec())
                    {
                        out.push(cand.to_vec());
                    }
                });
            });
        }
        out.sort();
        out
    }

    fn walk_outside(&self, vars: &[usize], k: usize, e: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if k == vars.len() {
            f(e);
            return;
        }
        let j = vars[k];
        for d in 0..self.caps[j].max(1) {
            e[j] = d;
            if d > 0 && self.leads.iter().any(|l| divides(l, e)) {
                break;
            }
            self.walk_outside(vars, k + 1, e, f);
        }
        e[j] = 0;
    }

    fn weight(&self, e: &[u32]) -> Vec<i64> {
        let mut d = vec![0i64; self.rank];
        for (j, &k) in e.iter().enumerate() {
            for r in 0..self.rank {
                d[r] += self.weights[j][r] * k as i64;
            }
        }
        d
    }
}

fn walk_inside(t: &[usize], steps: &[i64], k: usize, budget: i64, e: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if k == t.len() {
        if budget == 0 || t.is_empty() {
            f(e);
        }
        return;
    }
    let j = t[k];
    let step = steps[k].max(1);
    let mut d = 0u32;
    while (d as i64) * step <= budget {
        e[j] = d;
        walk_inside(t, steps, k + 1, budget - d as i64 * step, e, f);
        d += 1;
    }
    e[j] = 0;
}

impl LocAlgebra {
    pub fn graded_index(&self) -> Result<Arc<GradedIndex>> {
        self.inner.graded.get_or_init(|| GradedIndex::build(self).map(Arc::new)).clone()
    }

    /// The degree-`deg` piece (standard monomial basis).
    pub fn graded_piece(&self, deg: &[i64]) -> Result<Arc<GradedPiece>> {
        let rank = self.grading().map(|g| g.rank).ok_or_else(|| Error::UngradedModule(format!("{self}")))?;
        if deg.len() != rank {
            return Err(Error::UngradedModule(format!("degree {deg:?} has wrong rank (expected {rank})")));
        }
        if let Some(p) = self.inner.basis_cache.lock().unwrap().get(deg) {
            return Ok(p.clone());
        }
        let idx = self.graded_index()?;
        let basis = if self.is_zero_ring() { vec![] } else { idx.basis(deg) };
        let index = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let piece = Arc::new(GradedPiece { degree: deg.to_vec(), basis, index });
        self.inner.basis_cache.lock().unwrap().insert(deg.to_vec(), piece.clone());
        Ok(piece)
    }

    /// The whole algebra as one piece, when it is finite-dimensional.
    pub fn total_piece(&self) -> Result<Arc<GradedPiece>> {
        let basis = self
            .finite_basis()
            .ok_or_else(|| Error::InfiniteGradedPiece(format!("{self} is not finite-dimensional")))?;
        let index = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(Arc::new(GradedPiece { degree: vec![], basis, index }))
    }

    pub fn graded_dim(&self, deg: &[i64]) -> Result<usize> {
        Ok(self.graded_piece(deg)?.dim())
    }

    /// Coordinates of a homogeneous element in the basis of `piece`.
    pub fn coords(&self, e: &Elem, piece: &GradedPiece) -> Vec<Scalar> {
        let e = self.nf(e);
        let mut v = vec![Scalar::zero(); piece.dim()];
        for (ex, c) in &e.terms {
            let i = piece.position(ex).expect("element is not of the piece's degree");
            v[i] = c.clone();
        }
        v
    }

    /// Element with the given coordinates in `piece`.
    pub fn from_coords(&self, v: &[Scalar], piece: &GradedPiece) -> Elem {
        let terms = piece
            .basis
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        self.ring().normalize(terms)
    }

    /// Homogeneous components of an element, keyed by degree.
    pub fn homogeneous_parts(&self, e: &Elem) -> Result<Vec<(Vec<i64>, Elem)>> {
        let w = self.pvar_weights().ok_or_else(|| Error::UngradedModule(format!("{self}")))?;
        let rank = self.grading().unwrap().rank;
        let e = self.nf(e);
        let mut parts: Vec<(Vec<i64>, Vec<(Exp, Scalar)>)> = Vec::new();
        for (ex, c) in e.terms {
            let d = crate::algebra::exp_weight(&ex, &w, rank);
            match parts.iter_mut().find(|p| p.0 == d) {
                Some(p) => p.1.push((ex, c)),
                None => parts.push((d, vec![(ex, c)])),
            }
        }
        Ok(parts.into_iter().map(|(d, t)| (d, self.ring().normalize(t))).collect())
    }
}

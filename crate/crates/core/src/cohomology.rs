//! Sheaf cohomology through the finite Godement complex
//! `C^n F(U) = ∏_{U ∋ x_0 < … < x_n} F_{x_n}` with differential
//!
//! ```text
//! (da)_{x_0<…<x_{n+1}} = Σ_{0≤i≤n} (-1)^i a_{x_0…x̂_i…x_{n+1}} + (-1)^{n+1} r(a_{x_0<…<x_n})
//! ```
//!
//! Everything reduces to a [`LinearSheaf`] (finite-dimensional stalks and
//! matrices), obtained from a module either degree by degree (graded
//! backend) or in one piece (finite-dimensional stalks).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::module::ModPiece;
use crate::qcoh::SheafModule;
use crate::space::{FinSpace, SpaceMap};

pub const DEFAULT_WINDOW: (i64, i64) = (-10, 10);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Stalks finite-dimensional over the field.
    VectorSpace,
    /// Degree by degree over the box `[lo, hi]^r`.
    Graded { window: (i64, i64) },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Graded { window: DEFAULT_WINDOW }
    }
}

/// A sheaf of finite-dimensional vector spaces; `maps[(x,y)]` has
/// `dims[y]` rows and `dims[x]` columns.
#[derive(Clone, Debug)]
pub struct LinearSheaf {
    pub space: FinSpace,
    pub field: Field,
    pub dims: Vec<usize>,
    maps: HashMap<(usize, usize), Matrix>,
}

impl LinearSheaf {
    /// Maps for all comparable pairs `x < y` (identities are added).
    pub fn new(space: &FinSpace, field: Field, dims: Vec<usize>, mut maps: HashMap<(usize, usize), Matrix>) -> Result<LinearSheaf> {
        let n = space.len();
        if dims.len() != n {
            return Err(Error::InvalidModule("one dimension per point is required".into()));
        }
        for x in 0..n {
            maps.insert((x, x), Matrix::identity(field, dims[x]));
            for y in 0..n {
                if !space.leq(x, y) {
                    continue;
                }
                let m = maps
                    .get(&(x, y))
                    .ok_or_else(|| Error::InvalidModule(format!("missing map {} → {}", space.name(x), space.name(y))))?;
                if m.rows != dims[y] || m.cols != dims[x] {
                    return Err(Error::InvalidModule(format!("map {} → {} has the wrong shape", space.name(x), space.name(y))));
                }
            }
        }
        Ok(LinearSheaf { space: space.clone(), field, dims, maps })
    }

    /// The constant sheaf `k`.
    pub fn constant(space: &FinSpace) -> LinearSheaf {
        let f = space.field();
        let mut maps = HashMap::new();
        for x in 0..space.len() {
            for y in 0..space.len() {
                if space.leq(x, y) {
                    maps.insert((x, y), Matrix::identity(f, 1));
                }
            }
        }
        LinearSheaf::new(space, f, vec![1; space.len()], maps).unwrap()
    }

    /// One piece of a module sheaf (pieces given per point).
    pub fn from_pieces(m: &SheafModule, pieces: &[ModPiece]) -> LinearSheaf {
        let s = m.space();
        let field = s.field();
        let bases: Vec<_> = (0..s.len()).map(|x| pieces[x].basis(m.stalk(x))).collect();
        let mut maps = HashMap::new();
        for x in 0..s.len() {
            for y in 0..s.len() {
                if x == y || !s.leq(x, y) {
                    continue;
                }
                let mut mat = Matrix::zeros(pieces[y].dim(), pieces[x].dim());
                for (j, b) in bases[x].iter().enumerate() {
                    let w = m.restrict(x, y, b);
                    for (i, c) in pieces[y].coords(m.stalk(y), &w).into_iter().enumerate() {
                        mat.data[i][j] = c;
                    }
                }
                maps.insert((x, y), mat);
            }
        }
        LinearSheaf::new(s, field, pieces.iter().map(|p| p.dim()).collect(), maps).unwrap()
    }

    pub fn map(&self, x: usize, y: usize) -> &Matrix {
        &self.maps[&(x, y)]
    }

    /// Functoriality violations.
    pub fn validate(&self) -> Vec<String> {
        let s = &self.space;
        let mut out = Vec::new();
        for x in 0..s.len() {
            for y in 0..s.len() {
                for z in 0..s.len() {
                    if s.leq(x, y) && s.leq(y, z) {
                        let c = self.map(y, z).mul(self.field, self.map(x, y));
                        if &c != self.map(x, z) {
                            out.push(format!("maps {} → {} → {} do not compose", s.name(x), s.name(y), s.name(z)));
                        }
                    }
                }
            }
        }
        out
    }
}

/// `Γ(U, C^• F)` with its chain index sets.
#[derive(Clone, Debug)]
pub struct GodementComplex {
    pub open: Vec<usize>,
    /// `chains[n]`: strict chains of length `n+1` starting in `U`.
    pub chains: Vec<Vec<Vec<usize>>>,
    /// `diffs[n]: C^n → C^{n+1}`.
    pub diffs: Vec<Matrix>,
    pub dims: Vec<usize>,
    field: Field,
}

pub fn godement(f: &LinearSheaf, u: &[usize]) -> GodementComplex {
    let s = &f.space;
    let top = s.dimension();
    let mut chains: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
    for c in s.chains() {
        if u.contains(&c[0]) {
            chains[c.len() - 1].push(c.clone());
        }
    }
    let offsets: Vec<Vec<usize>> = chains
        .iter()
        .map(|cs| {
            let mut o = Vec::with_capacity(cs.len());
            let mut t = 0;
            for c in cs {
                o.push(t);
                t += f.dims[*c.last().unwrap()];
            }
            o
        })
        .collect();
    let dims: Vec<usize> = chains.iter().map(|cs| cs.iter().map(|c| f.dims[*c.last().unwrap()]).sum()).collect();
    let index: Vec<HashMap<&Vec<usize>, usize>> =
        chains.iter().map(|cs| cs.iter().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    let field = f.field;
    let mut diffs = Vec::with_capacity(top);
    for n in 0..top {
        let mut d = Matrix::zeros(dims[n + 1], dims[n]);
        for (ti, t) in chains[n + 1].iter().enumerate() {
            let row0 = offsets[n + 1][ti];
            let last = t[n + 1];
            for i in 0..=n {
                let mut face = t.clone();
                face.remove(i);
                let si = index[n][&face];
                let col0 = offsets[n][si];
                let sign = if i % 2 == 0 { field.one() } else { field.neg(&field.one()) };
                for k in 0..f.dims[last] {
                    let v = field.add(&d.data[row0 + k][col0 + k], &sign);
                    d.data[row0 + k][col0 + k] = v;
                }
            }
            let face = t[..=n].to_vec();
            let si = index[n][&face];
            let col0 = offsets[n][si];
            let sign = if (n + 1) % 2 == 0 { field.one() } else { field.neg(&field.one()) };
            let r = f.map(t[n], last);
            for a in 0..r.rows {
                for b in 0..r.cols {
                    if r.data[a][b].is_zero() {
                        continue;
                    }
                    let v = field.add(&d.data[row0 + a][col0 + b], &field.mul(&sign, &r.data[a][b]));
                    d.data[row0 + a][col0 + b] = v;
                }
            }
        }
        diffs.push(d);
    }
    GodementComplex { open: u.to_vec(), chains, diffs, dims, field }
}

/// `F(U_p) = F_p → C^0 F(U_p)`.
pub fn augmentation(f: &LinearSheaf, p: usize) -> Matrix {
    let up = f.space.up(p);
    let total: usize = up.iter().map(|&x| f.dims[x]).sum();
    let mut m = Matrix::zeros(total, f.dims[p]);
    let mut row = 0;
    for &x in &up {
        let r = f.map(p, x);
        for a in 0..r.rows {
            m.data[row + a].clone_from(&r.data[a]);
        }
        row += r.rows;
    }
    m
}

impl GodementComplex {
    pub fn d_squared_is_zero(&self) -> bool {
        self.diffs.windows(2).all(|w| w[1].mul(self.field, &w[0]).is_zero())
    }

    /// `dim H^n` for every `n`.
    pub fn cohomology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.diffs.iter().map(|d| d.rank(self.field)).collect();
        (0..self.dims.len())
            .map(|n| {
                let out = if n < ranks.len() { ranks[n] } else { 0 };
                let inc = if n > 0 { ranks[n - 1] } else { 0 };
                self.dims[n] - out - inc
            })
            .collect()
    }
}

/// Dimensions of `H^i` per internal degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub rank: usize,
    /// `None` for the vector-space backend.
    pub window: Option<(i64, i64)>,
    pub entries: BTreeMap<Vec<i64>, Vec<usize>>,
}

impl CohomologyTable {
    pub fn degrees(&self) -> usize {
        self.entries.values().map(|v| v.len()).max().unwrap_or(0)
    }

    pub fn dim(&self, i: usize, deg: &[i64]) -> Option<usize> {
        self.entries.get(deg).map(|v| v.get(i).copied().unwrap_or(0))
    }

    /// `Σ_d dim H^i_d` over the window.
    pub fn total(&self, i: usize) -> usize {
        self.entries.values().map(|v| v.get(i).copied().unwrap_or(0)).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        (1..self.degrees()).all(|i| self.total(i) == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .filter(|(_, v)| v.iter().any(|&d| d > 0))
            .map(|(d, v)| serde_json::json!({ "degree": d, "dims": v }))
            .collect();
        let totals: Vec<usize> = (0..self.degrees()).map(|i| self.total(i)).collect();
        serde_json::json!({
            "rank": self.rank,
            "window": self.window.map(|(a, b)| vec![a, b]),
            "totals": totals,
            "entries": entries,
        })
    }
}

impl fmt::Display for CohomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((a, b)) = self.window {
            writeln!(f, "window [{a}, {b}]^{}", self.rank)?;
        }
        let top = self.degrees();
        if self.rank <= 1 {
            let degs: Vec<&Vec<i64>> = self.entries.keys().collect();
            write!(f, "{:>6}", "i\\d")?;
            for d in &degs {
                write!(f, "{:>4}", d.first().map(|x| x.to_string()).unwrap_or_else(|| "·".into()))?;
            }
            writeln!(f, "  total")?;
            for i in 0..top {
                write!(f, "{:>6}", format!("H^{i}"))?;
                for d in &degs {
                    write!(f, "{:>4}", self.entries[*d].get(i).copied().unwrap_or(0))?;
                }
                writeln!(f, "  {}", self.total(i))?;
            }
        } else {
            for i in 0..top {
                let nz: Vec<String> = self
                    .entries
                    .iter()
                    .filter_map(|(d, v)| v.get(i).filter(|&&x| x > 0).map(|x| format!("{d:?}:{x}")))
                    .collect();
                writeln!(f, "H^{i}  total {}  {}", self.total(i), nz.join(" "))?;
            }
        }
        Ok(())
    }
}

fn grading_rank(m: &SheafModule) -> Result<usize> {
    let mut rank = None;
    for x in 0..m.space().len() {
        let a = m.space().stalk(x);
        let r = a.grading().map(|g| g.rank).ok_or_else(|| Error::UngradedModule(format!("stalk {a}")))?;
        if !m.stalk(x).is_graded() {
            return Err(Error::UngradedModule(format!("module at `{}` has no shifts", m.space().name(x))));
        }
        match rank {
            None => rank = Some(r),
            Some(q) if q != r => return Err(Error::UngradedModule("stalks have different grading ranks".into())),
            _ => {}
        }
    }
    Ok(rank.unwrap_or(0))
}

/// Checks that restrictions preserve degrees (rings and modules).
pub fn check_homogeneous(m: &SheafModule) -> Result<()> {
    let s = m.space();
    for x in 0..s.len() {
        for y in s.covers_of(x) {
            let r = s.restriction(x, y);
            let (a, b) = (s.stalk(x), s.stalk(y));
            for (i, img) in r.var_images().iter().enumerate().take(a.nvars()) {
                if b.is_zero_elem(img) {
                    continue;
                }
                if b.degree(img) != a.degree(&a.var(i)) {
                    return Err(Error::UngradedModule(format!(
                        "restriction {} → {} does not preserve the degree of `{}`",
                        s.name(x),
                        s.name(y),
                        a.vars()[i]
                    )));
                }
            }
            let shifts = m.stalk(x).shifts().unwrap();
            for (k, row) in m.restriction(x, y).matrix.iter().enumerate() {
                if m.stalk(y).is_zero_elem(row) {
                    continue;
                }
                if m.stalk(y).vec_degree(row).as_deref() != Some(&shifts[k][..]) {
                    return Err(Error::UngradedModule(format!(
                        "module restriction {} → {} is not homogeneous",
                        s.name(x),
                        s.name(y)
                    )));
                }
            }
        }
    }
    Ok(())
}

fn box_degrees(rank: usize, (lo, hi): (i64, i64)) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out.into_iter().flat_map(|d| (lo..=hi).map(move |k| [d.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Kolmogorov reduction: cohomology only sees the T₀ quotient.
fn t0_reduce(m: &SheafModule, u: &[usize]) -> (SheafModule, Vec<usize>) {
    if m.space().is_t0() {
        return (m.clone(), u.to_vec());
    }
    let kq = m.space().kolmogorov_quotient();
    let reps = kq.section.point_map().to_vec();
    let m2 = m.restrict_to(&kq.section);
    let u2 = (0..reps.len()).filter(|&i| u.contains(&reps[i])).collect();
    (m2, u2)
}

/// `H^•(U, M)` with the chosen backend.
pub fn cohomology_on(m: &SheafModule, u: &[usize], backend: Backend) -> Result<CohomologyTable> {
    m.space().check_open(u)?;
    let (m, u) = t0_reduce(m, u);
    let m = &m;
    let s = m.space();
    match backend {
        Backend::VectorSpace => {
            let pieces = (0..s.len()).map(|x| m.stalk(x).total_piece()).collect::<Result<Vec<_>>>()?;
            let lf = LinearSheaf::from_pieces(m, &pieces);
            let h = godement(&lf, &u).cohomology();
            Ok(CohomologyTable { rank: 0, window: None, entries: BTreeMap::from([(vec![], h)]) })
        }
        Backend::Graded { window } => {
            let rank = grading_rank(m)?;
            check_homogeneous(m)?;
            let degrees = box_degrees(rank, window);
            let results = parallel_map(&degrees, |d| -> Result<Vec<usize>> {
                let pieces = (0..s.len()).map(|x| m.stalk(x).graded_piece(d)).collect::<Result<Vec<_>>>()?;
                if pieces.iter().all(|p| p.dim() == 0) {
                    return Ok(vec![0; s.dimension() + 1]);
                }
                let lf = LinearSheaf::from_pieces(m, &pieces);
                Ok(godement(&lf, &u).cohomology())
            });
            let mut entries = BTreeMap::new();
            for (d, r) in degrees.into_iter().zip(results) {
                entries.insert(d, r?);
            }
            Ok(CohomologyTable { rank, window: Some(window), entries })
        }
    }
}

pub fn cohomology(m: &SheafModule, backend: Backend) -> Result<CohomologyTable> {
    cohomology_on(m, &m.space().all_points(), backend)
}

/// `y ↦ H^•(f⁻¹(U_y), M)` for every target point.
pub fn higher_direct_images(f: &SpaceMap, m: &SheafModule, backend: Backend) -> Result<Vec<CohomologyTable>> {
    let y = f.target();
    (0..y.len()).map(|q| cohomology_on(m, &f.preimage(&y.up(q)), backend)).collect()
}

pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    if threads <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|sc| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| sc.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

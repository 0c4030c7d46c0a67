//! Quiver representations over prime fields.
//!
//! Conventions: an arrow `h: s -> t` carries a matrix of shape
//! `dim V_t x dim V_s` acting on column vectors. Subspaces are RREF row
//! bases (see [`Subspace`]), so the matrix of a restricted map is read off
//! at pivot columns and the induced quotient map at the non-pivot columns.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{self, for_each_subspace_between, gaussian_binomial, Mat, Subspace};

/// A quiver without loops. Vertices are `0..n`; `names` records how they
/// were written by the user.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    pub names: Vec<String>,
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Quiver> {
        for &(s, t) in &arrows {
            if s == t {
                return Err(Error::Usage(format!("loop at vertex {s}")));
            }
            if s >= n || t >= n {
                return Err(Error::Usage(format!("arrow {s}->{t} leaves the vertex set")));
            }
        }
        Ok(Quiver { names: (0..n).map(|i| i.to_string()).collect(), arrows })
    }

    /// Parses `"1->2,2->3"`; vertices are ordered by their numeric names.
    pub fn parse(desc: &str) -> Result<Quiver> {
        let mut pairs = Vec::new();
        for part in desc.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = part.split_once("->").ok_or_else(|| Error::Usage(format!("bad arrow '{part}'")))?;
            let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| Error::Usage(format!("bad vertex name '{s}'")));
            pairs.push((parse(a)?, parse(b)?));
        }
        if pairs.is_empty() {
            return Err(Error::Usage("quiver has no arrows".into()));
        }
        let mut names: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        names.sort_unstable();
        names.dedup();
        let idx = |x: u64| names.binary_search(&x).unwrap();
        let arrows = pairs.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        let mut q = Quiver::new(names.len(), arrows)?;
        q.names = names.iter().map(|x| x.to_string()).collect();
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    /// Number of arrows between `i` and `j` in either direction.
    pub fn edges_between(&self, i: usize, j: usize) -> usize {
        self.arrows.iter().filter(|&&(s, t)| (s == i && t == j) || (s == j && t == i)).count()
    }

    /// Generalised Cartan matrix entry.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2
        } else {
            -(self.edges_between(i, j) as i64)
        }
    }

    /// The quiver with every arrow at `k` reversed.
    pub fn reflect(&self, k: usize) -> Quiver {
        let arrows = self.arrows.iter().map(|&(s, t)| if s == k || t == k { (t, s) } else { (s, t) }).collect();
        Quiver { names: self.names.clone(), arrows }
    }

    pub fn is_sink(&self, k: usize) -> bool {
        self.arrows.iter().all(|&(s, _)| s != k)
    }

    pub fn is_source(&self, k: usize) -> bool {
        self.arrows.iter().all(|&(_, t)| t != k)
    }

    /// A vertex order in which every arrow points backwards (sinks first),
    /// or `None` if the quiver has an oriented cycle.
    pub fn sinks_first_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut out_deg = vec![0usize; n];
        for &(s, _) in &self.arrows {
            out_deg[s] += 1;
        }
        let mut order = Vec::new();
        let mut done = vec![false; n];
        while order.len() < n {
            let k = (0..n).find(|&k| !done[k] && out_deg[k] == 0)?;
            done[k] = true;
            order.push(k);
            for &(s, t) in &self.arrows {
                if t == k {
                    out_deg[s] -= 1;
                }
            }
        }
        Some(order)
    }

    /// Stable textual identity, used in cache keys.
    pub fn key(&self) -> String {
        let arrows: Vec<String> = self.arrows.iter().map(|&(s, t)| format!("{}->{}", self.names[s], self.names[t])).collect();
        arrows.join(",")
    }

    pub fn simple_dim(&self, i: usize) -> DimVector {
        let mut d = vec![0; self.n()];
        d[i] = 1;
        DimVector(d)
    }
}

/// A dimension vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn zero(n: usize) -> DimVector {
        DimVector(vec![0; n])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn le(&self, o: &DimVector) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, o: &DimVector) -> Option<DimVector> {
        self.0.iter().zip(&o.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(DimVector)
    }

    pub fn scaled(&self, k: u32) -> DimVector {
        DimVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Every `d` with `0 <= d <= self`.
    pub fn below(&self) -> Vec<DimVector> {
        let mut out = vec![Vec::new()];
        for &x in &self.0 {
            out = out.into_iter().flat_map(|v: Vec<u32>| (0..=x).map(move |k| [v.clone(), vec![k]].concat())).collect();
        }
        out.into_iter().map(DimVector).collect()
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, o: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DimVector {
    type Output = DimVector;
    fn sub(self, o: &DimVector) -> DimVector {
        self.checked_sub(o).expect("negative dimension vector")
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `<a, b> = sum a_i b_i - sum_h a_s(h) b_t(h)`.
pub fn euler_form(q: &Quiver, a: &DimVector, b: &DimVector) -> i64 {
    let diag: i64 = a.0.iter().zip(&b.0).map(|(x, y)| (*x as i64) * (*y as i64)).sum();
    let off: i64 = q.arrows.iter().map(|&(s, t)| a.0[s] as i64 * b.0[t] as i64).sum();
    diag - off
}

pub fn symmetric_euler_form(q: &Quiver, a: &DimVector, b: &DimVector) -> i64 {
    euler_form(q, a, b) + euler_form(q, b, a)
}

/// A representation over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuiverRep {
    pub p: u32,
    pub dims: DimVector,
    pub mats: Vec<Mat>,
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    field: u32,
    dims: Vec<u32>,
    matrices: Vec<Vec<Vec<u32>>>,
}

impl QuiverRep {
    pub fn new(q: &Quiver, p: u32, dims: DimVector, mats: Vec<Mat>) -> Result<QuiverRep> {
        if mats.len() != q.arrows.len() {
            return Err(Error::Usage("one matrix per arrow is required".into()));
        }
        for (h, &(s, t)) in q.arrows.iter().enumerate() {
            let m = &mats[h];
            if m.rows != dims.0[t] as usize || m.cols != dims.0[s] as usize || m.p != p {
                return Err(Error::Usage(format!("matrix for arrow {h} has the wrong shape")));
            }
        }
        Ok(QuiverRep { p, dims, mats })
    }

    pub fn zero_maps(q: &Quiver, p: u32, dims: DimVector) -> QuiverRep {
        let mats = q.arrows.iter().map(|&(s, t)| Mat::zeros(dims.0[t] as usize, dims.0[s] as usize, p)).collect();
        QuiverRep { p, dims, mats }
    }

    pub fn simple(q: &Quiver, p: u32, i: usize) -> QuiverRep {
        Self::zero_maps(q, p, q.simple_dim(i))
    }

    pub fn is_semisimple(&self) -> bool {
        self.mats.iter().all(|m| m.is_zero())
    }

    pub fn direct_sum(&self, o: &QuiverRep, q: &Quiver) -> QuiverRep {
        let dims = &self.dims + &o.dims;
        let mats = q
            .arrows
            .iter()
            .enumerate()
            .map(|(h, &(s, t))| {
                let (a, b) = (&self.mats[h], &o.mats[h]);
                let mut m = Mat::zeros(dims.0[t] as usize, dims.0[s] as usize, self.p);
                for r in 0..a.rows {
                    for c in 0..a.cols {
                        m.set(r, c, a.at(r, c));
                    }
                }
                for r in 0..b.rows {
                    for c in 0..b.cols {
                        m.set(a.rows + r, a.cols + c, b.at(r, c));
                    }
                }
                m
            })
            .collect();
        QuiverRep { p: self.p, dims, mats }
    }

    pub fn direct_sum_all(parts: &[QuiverRep], q: &Quiver, p: u32) -> QuiverRep {
        parts.iter().fold(QuiverRep::zero_maps(q, p, DimVector::zero(q.n())), |acc, x| acc.direct_sum(x, q))
    }

    /// `g . M`, with `g_i` invertible: `M_h -> g_t M_h g_s^{-1}`.
    pub fn conjugate(&self, q: &Quiver, g: &[Mat]) -> QuiverRep {
        let ginv: Vec<Mat> = g.iter().map(|m| m.inverse().expect("base change must be invertible")).collect();
        let mats = q.arrows.iter().enumerate().map(|(h, &(s, t))| g[t].mul(&self.mats[h]).mul(&ginv[s])).collect();
        QuiverRep { p: self.p, dims: self.dims.clone(), mats }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RepJson { field: self.p, dims: self.dims.0.clone(), matrices: self.mats.iter().map(|m| m.to_rows()).collect() })
            .expect("serialisable")
    }
}

/// Offsets of the unknowns `f_i` (row-major `dim N_i x dim M_i`) in the
/// intertwiner system, followed by the system itself.
fn intertwiner_system(q: &Quiver, m: &QuiverRep, n: &QuiverRep) -> (Vec<usize>, Mat) {
    let nv = q.n();
    let mut off = vec![0usize; nv + 1];
    for i in 0..nv {
        off[i + 1] = off[i] + (n.dims.0[i] * m.dims.0[i]) as usize;
    }
    let unknowns = off[nv];
    let eqs: usize = q.arrows.iter().map(|&(s, t)| (n.dims.0[t] * m.dims.0[s]) as usize).sum();
    let p = m.p;
    let mut sys = Mat::zeros(eqs, unknowns, p);
    let mut row = 0;
    for (h, &(s, t)) in q.arrows.iter().enumerate() {
        let (ms, mt) = (m.dims.0[s] as usize, m.dims.0[t] as usize);
        let (ns, nt) = (n.dims.0[s] as usize, n.dims.0[t] as usize);
        let (mh, nh) = (&m.mats[h], &n.mats[h]);
        // (f_t M_h - N_h f_s)[r][c] = 0 for r < nt, c < ms
        for r in 0..nt {
            for c in 0..ms {
                for k in 0..mt {
                    let a = mh.at(k, c);
                    if a != 0 {
                        let idx = off[t] + r * mt + k;
                        let x = ffield::add(sys.at(row, idx), a, p);
                        sys.set(row, idx, x);
                    }
                }
                for k in 0..ns {
                    let a = nh.at(r, k);
                    if a != 0 {
                        let idx = off[s] + k * ms + c;
                        let x = ffield::sub(sys.at(row, idx), a, p);
                        sys.set(row, idx, x);
                    }
                }
                row += 1;
            }
        }
    }
    (off, sys)
}

/// `dim Hom(M, N)`.
pub fn hom_dim(q: &Quiver, m: &QuiverRep, n: &QuiverRep) -> usize {
    let (_, sys) = intertwiner_system(q, m, n);
    sys.nullity()
}

/// A basis of `Hom(M, N)`, each element given vertex-wise.
pub fn hom_basis(q: &Quiver, m: &QuiverRep, n: &QuiverRep) -> Vec<Vec<Mat>> {
    let (off, sys) = intertwiner_system(q, m, n);
    let ker = sys.kernel();
    (0..ker.rows)
        .map(|r| {
            (0..q.n())
                .map(|i| {
                    let (rows, cols) = (n.dims.0[i] as usize, m.dims.0[i] as usize);
                    let mut f = Mat::zeros(rows, cols, m.p);
                    for a in 0..rows {
                        for b in 0..cols {
                            f.set(a, b, ker.at(r, off[i] + a * cols + b));
                        }
                    }
                    f
                })
                .collect()
        })
        .collect()
}

/// `|Aut M|` by enumerating `End M` through a basis.
pub fn aut_count(q: &Quiver, m: &QuiverRep, cap: u128) -> Result<u128> {
    let basis = hom_basis(q, m, m);
    let size = (m.p as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::BudgetExceeded { what: "endomorphism enumeration", needed: size, cap });
    }
    let p = m.p;
    let nb = basis.len();
    let mut coef = vec![0u32; nb];
    let mut count = 0u128;
    loop {
        let invertible = (0..q.n()).all(|i| {
            let d = m.dims.0[i] as usize;
            let mut f = Mat::zeros(d, d, p);
            for (k, b) in basis.iter().enumerate() {
                if coef[k] != 0 {
                    f = f.add(&b[i].scale(coef[k]));
                }
            }
            f.is_invertible()
        });
        if invertible {
            count += 1;
        }
        let mut k = 0;
        while k < nb {
            coef[k] += 1;
            if coef[k] == p {
                coef[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
        if k == nb {
            break;
        }
    }
    Ok(count)
}

/// Upper bound on the number of subspace tuples of dimension `d` in `M`.
pub fn subspace_tuple_bound(dims: &DimVector, d: &DimVector, p: u32) -> u128 {
    dims.0
        .iter()
        .zip(&d.0)
        .fold(1u128, |acc, (&n, &k)| acc.saturating_mul(gaussian_binomial(n as usize, k as usize, p as u64)))
}

/// Calls `f` with every arrow-stable tuple of subspaces `(U_i)` with
/// `dim U_i = d_i`. Visits at most `cap` candidate subspaces.
pub fn for_each_stable_tuple(
    q: &Quiver,
    m: &QuiverRep,
    d: &DimVector,
    cap: u128,
    f: &mut dyn FnMut(&[Subspace]),
) -> Result<()> {
    if !d.le(&m.dims) {
        return Ok(());
    }
    let n = q.n();
    // Cheapest vertex first; later vertices get bounds from both sides.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (gaussian_binomial(m.dims.0[i] as usize, d.0[i] as usize, m.p as u64), i));
    let mut chosen: Vec<Option<Subspace>> = vec![None; n];
    let mut visited: u128 = 0;
    let mut over = false;
    rec(q, m, d, &order, 0, &mut chosen, &mut visited, cap, &mut over, f);
    if over {
        return Err(Error::BudgetExceeded { what: "subspace tuples", needed: subspace_tuple_bound(&m.dims, d, m.p), cap });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn rec(
    q: &Quiver,
    m: &QuiverRep,
    d: &DimVector,
    order: &[usize],
    pos: usize,
    chosen: &mut Vec<Option<Subspace>>,
    visited: &mut u128,
    cap: u128,
    over: &mut bool,
    f: &mut dyn FnMut(&[Subspace]),
) {
    if pos == order.len() {
        let tuple: Vec<Subspace> = chosen.iter().map(|s| s.clone().unwrap()).collect();
        f(&tuple);
        return;
    }
    let i = order[pos];
    let dim_i = m.dims.0[i] as usize;
    let p = m.p;
    // lower bound: images of chosen sources
    let mut low_rows = Mat::zeros(0, dim_i, p);
    // upper bound: preimages of chosen targets
    let mut up_eqs = Mat::zeros(0, dim_i, p);
    for (h, &(s, t)) in q.arrows.iter().enumerate() {
        if t == i {
            if let Some(us) = &chosen[s] {
                if us.dim() > 0 {
                    let img = m.mats[h].mul(&us.basis.transpose()).transpose();
                    low_rows = low_rows.vstack(&img);
                }
            }
        }
        if s == i {
            if let Some(ut) = &chosen[t] {
                // rows: quotient coordinates of M_h e_c, one column per c
                let free = ut.free_columns();
                if !free.is_empty() {
                    let mut e = Mat::zeros(free.len(), dim_i, p);
                    for c in 0..dim_i {
                        let col: Vec<u32> = (0..m.mats[h].rows).map(|r| m.mats[h].at(r, c)).collect();
                        for (k, x) in ut.quotient_coords(&col).into_iter().enumerate() {
                            e.set(k, c, x);
                        }
                    }
                    up_eqs = up_eqs.vstack(&e);
                }
            }
        }
    }
    let lower = Subspace::span(&low_rows);
    let upper = if up_eqs.rows == 0 { Subspace::full(dim_i, p) } else { Subspace::span(&up_eqs.kernel()) };
    if !upper.contains_space(&lower) {
        return;
    }
    for_each_subspace_between(&lower, &upper, d.0[i] as usize, &mut |u| {
        *visited += 1;
        if *visited > cap {
            *over = true;
            return false;
        }
        chosen[i] = Some(u.clone());
        rec(q, m, d, order, pos + 1, chosen, visited, cap, over, f);
        chosen[i] = None;
        !*over
    });
}

/// The subrepresentation and quotient carried by a stable tuple.
pub fn sub_and_quotient(q: &Quiver, m: &QuiverRep, tuple: &[Subspace]) -> (QuiverRep, QuiverRep) {
    let p = m.p;
    let sdims = DimVector(tuple.iter().map(|u| u.dim() as u32).collect());
    let qdims = &m.dims - &sdims;
    let mut smats = Vec::with_capacity(q.arrows.len());
    let mut qmats = Vec::with_capacity(q.arrows.len());
    for (h, &(s, t)) in q.arrows.iter().enumerate() {
        let (us, ut) = (&tuple[s], &tuple[t]);
        let mh = &m.mats[h];
        let mut sm = Mat::zeros(ut.dim(), us.dim(), p);
        for j in 0..us.dim() {
            let img: Vec<u32> = (0..mh.rows).map(|r| (0..mh.cols).fold(0, |acc, c| ffield::add(acc, ffield::mul(mh.at(r, c), us.basis.at(j, c), p), p))).collect();
            for (k, x) in ut.coords(&img).into_iter().enumerate() {
                sm.set(k, j, x);
            }
        }
        smats.push(sm);
        let fs = us.free_columns();
        let ft = ut.free_columns();
        let mut qm = Mat::zeros(ft.len(), fs.len(), p);
        for (j, &c) in fs.iter().enumerate() {
            let col: Vec<u32> = (0..mh.rows).map(|r| mh.at(r, c)).collect();
            for (k, x) in ut.quotient_coords(&col).into_iter().enumerate() {
                qm.set(k, j, x);
            }
        }
        qmats.push(qm);
    }
    (QuiverRep { p, dims: sdims, mats: smats }, QuiverRep { p, dims: qdims, mats: qmats })
}

/// Calls `f(sub, quotient)` for every subrepresentation of dimension `d`.
pub fn for_each_subrep(
    q: &Quiver,
    m: &QuiverRep,
    d: &DimVector,
    cap: u128,
    f: &mut dyn FnMut(&QuiverRep, &QuiverRep),
) -> Result<()> {
    for_each_stable_tuple(q, m, d, cap, &mut |t| {
        let (s, qt) = sub_and_quotient(q, m, t);
        f(&s, &qt);
    })
}

/// Hall number: subrepresentations `N` with `N ~ sub` and `M/N ~ quot`,
/// where `same(a, b)` decides isomorphism.
pub fn subrep_count(
    q: &Quiver,
    m: &QuiverRep,
    sub: &QuiverRep,
    quot: &QuiverRep,
    cap: u128,
    same: &dyn Fn(&QuiverRep, &QuiverRep) -> bool,
) -> Result<u64> {
    if &sub.dims + &quot.dims != m.dims {
        return Ok(0);
    }
    let mut n = 0u64;
    for_each_subrep(q, m, &sub.dims, cap, &mut |s, qt| {
        if same(s, sub) && same(qt, quot) {
            n += 1;
        }
    })?;
    Ok(n)
}

/// `dim Hom(X, M)` for every `X` in the catalog.
pub fn hom_fingerprint(q: &Quiver, m: &QuiverRep, catalog: &[QuiverRep]) -> Vec<usize> {
    catalog.iter().map(|x| hom_dim(q, x, m)).collect()
}

/// Decomposes a fingerprint as multiplicities of catalog indecomposables,
/// given the matrix `h[x][y] = dim Hom(X_x, X_y)`. The catalog must be in an
/// order where `h` is upper unitriangular.
pub fn solve_fingerprint(h: &[Vec<usize>], fp: &[usize]) -> Result<Vec<u32>> {
    let n = fp.len();
    let mut mult = vec![0i64; n];
    // fp[x] = sum_y mult[y] h[x][y]; row x involves y >= x.
    for x in (0..n).rev() {
        if h[x][x] != 1 {
            return Err(Error::AmbiguousFingerprint(fp.to_vec()));
        }
        let rest: i64 = (x + 1..n).map(|y| mult[y] * h[x][y] as i64).sum();
        mult[x] = fp[x] as i64 - rest;
        if mult[x] < 0 {
            return Err(Error::AmbiguousFingerprint(fp.to_vec()));
        }
    }
    Ok(mult.into_iter().map(|x| x as u32).collect())
}

/// Orbit representatives of `GL_nu` acting on all representations of
/// dimension `nu`, found by breadth-first search with a generating set.
pub fn brute_orbit_isoclasses(q: &Quiver, nu: &DimVector, p: u32, cap: u128) -> Result<Vec<QuiverRep>> {
    let cells: usize = q.arrows.iter().map(|&(s, t)| (nu.0[s] * nu.0[t]) as usize).sum();
    let size = (p as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::BudgetExceeded { what: "representation space", needed: size, cap });
    }
    let decode = |mut idx: u128| -> QuiverRep {
        let mut mats = Vec::new();
        for &(s, t) in &q.arrows {
            let mut m = Mat::zeros(nu.0[t] as usize, nu.0[s] as usize, p);
            for e in m.d.iter_mut() {
                *e = (idx % p as u128) as u32;
                idx /= p as u128;
            }
            mats.push(m);
        }
        QuiverRep { p, dims: nu.clone(), mats }
    };
    let encode = |r: &QuiverRep| -> u128 {
        let mut idx = 0u128;
        for m in r.mats.iter().rev() {
            for &e in m.d.iter().rev() {
                idx = idx * p as u128 + e as u128;
            }
        }
        idx
    };
    // generators: elementary transvections and scalings at one vertex
    let mut gens: Vec<Vec<Mat>> = Vec::new();
    let ident: Vec<Mat> = nu.0.iter().map(|&d| Mat::identity(d as usize, p)).collect();
    for (i, &d) in nu.0.iter().enumerate() {
        let d = d as usize;
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    let mut g = ident.clone();
                    g[i].set(a, b, 1);
                    gens.push(g);
                }
            }
            if p > 2 {
                let mut g = ident.clone();
                g[i].set(a, a, primitive_root(p));
                gens.push(g);
            }
        }
    }
    let mut seen: HashMap<u128, ()> = HashMap::new();
    let mut reps = Vec::new();
    for start in 0..size {
        if seen.contains_key(&start) {
            continue;
        }
        let r0 = decode(start);
        seen.insert(start, ());
        let mut queue = VecDeque::from([r0.clone()]);
        while let Some(r) = queue.pop_front() {
            for g in &gens {
                let r2 = r.conjugate(q, g);
                let k = encode(&r2);
                if seen.insert(k, ()).is_none() {
                    queue.push_back(r2);
                }
            }
        }
        reps.push(r0);
    }
    Ok(reps)
}

/// A generator of `F_p^x`.
pub fn primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p).find(|&g| factors.iter().all(|&f| ffield::pow(g, ((p - 1) / f) as u64, p) != 1)).unwrap()
}

/// Reflection functor at a source `k` of `q`: returns the representation of
/// `q.reflect(k)` whose space at `k` is the cokernel of `V_k -> sum V_j`.
pub fn reflect_at_source(q: &Quiver, n: &QuiverRep, k: usize) -> QuiverRep {
    assert!(q.is_source(k), "vertex {k} is not a source");
    let p = n.p;
    let outs: Vec<usize> = (0..q.arrows.len()).filter(|&h| q.arrows[h].0 == k).collect();
    let total: usize = outs.iter().map(|&h| n.dims.0[q.arrows[h].1] as usize).sum();
    let dk = n.dims.0[k] as usize;
    let mut phi = Mat::zeros(total, dk, p);
    let mut row = 0;
    for &h in &outs {
        let m = &n.mats[h];
        for r in 0..m.rows {
            for c in 0..dk {
                phi.set(row + r, c, m.at(r, c));
            }
        }
        row += m.rows;
    }
    // rows of `coker` span the left kernel of phi, i.e. coker * phi = 0
    let coker = phi.transpose().kernel();
    let mut dims = n.dims.clone();
    dims.0[k] = coker.rows as u32;
    let rq = q.reflect(k);
    let mut mats = n.mats.clone();
    let mut col = 0;
    for &h in &outs {
        let dj = n.dims.0[q.arrows[h].1] as usize;
        mats[h] = coker.block(0, col, coker.rows, dj);
        col += dj;
    }
    debug_assert!(QuiverRep::new(&rq, p, dims.clone(), mats.clone()).is_ok());
    QuiverRep { p, dims, mats }
}

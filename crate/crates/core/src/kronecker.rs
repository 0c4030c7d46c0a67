//! The Kronecker quiver, with both arrows `1 -> 0`: indecomposables, tube
//! bookkeeping over `F_p`, the imaginary root vectors `Psi~_k`, `P~_k`, Schur
//! elements `S_lambda`, the PBW basis `N(c, lambda)` and its canonical basis.
//!
//! Vertex 0 is the sink, so the preprojectives have dimension `(l+1, l)` and
//! the preinjectives `(n, n+1)`. Labels are isoclass *types*: the regular
//! part records a partition per tube and the degree of its point but not the
//! point. The `u` element of a type is the sum over all its classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::canon::{self, Choice, GenElem, PbwFamily, WeightData};
use crate::error::{Error, Result};
use crate::ffield::{monic_irreducibles, smith_invariants, FpPoly, Mat};
use crate::ffrep::{hom_dim, DimVector, Quiver, QuiverRep};
use crate::hallalg::{bracket, product, Config, Evaluator, Family, Graph, HallAlgebra, HallElement, Ring, Spec};
use crate::laurent::{quantum_int, rat, LaurentPoly, Poly};
use crate::laurent::SqrtElem;
use crate::symchar::{kostka, partitions, perm_character, specht_character, Partition};

/// A homogeneous tube: the degree of its point and the partition of levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tube {
    pub deg: u32,
    pub parts: Vec<u32>,
}

impl Tube {
    pub fn weight(&self) -> u32 {
        self.deg * self.parts.iter().sum::<u32>()
    }
}

/// Isoclass type: `prep[l]` copies of `M(l+1, l)`, the regular tubes, and
/// `prei[n]` copies of `M(n, n+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct KronType {
    pub prep: Vec<u32>,
    pub reg: Vec<Tube>,
    pub prei: Vec<u32>,
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

impl KronType {
    pub fn new(prep: Vec<u32>, mut reg: Vec<Tube>, prei: Vec<u32>) -> KronType {
        for t in &mut reg {
            t.parts.sort_unstable_by(|a, b| b.cmp(a));
        }
        reg.retain(|t| !t.parts.is_empty());
        reg.sort();
        KronType { prep: trim(prep), reg, prei: trim(prei) }
    }

    pub fn regular_weight(&self) -> u32 {
        self.reg.iter().map(Tube::weight).sum()
    }

    pub fn is_regular(&self) -> bool {
        self.prep.is_empty() && self.prei.is_empty()
    }

    /// `M(mu, z)` with pairwise distinct degree-1 points.
    pub fn distinct_points(mu: &Partition) -> KronType {
        KronType::new(vec![], mu.0.iter().map(|&m| Tube { deg: 1, parts: vec![m] }).collect(), vec![])
    }

    /// `M[mu, z']`: one level-1 module at a point of degree `mu_i` each.
    pub fn by_degrees(mu: &Partition) -> KronType {
        KronType::new(vec![], mu.0.iter().map(|&d| Tube { deg: d, parts: vec![1] }).collect(), vec![])
    }
}

/// A closed point of the projective line over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Finite(FpPoly),
    Infinity,
}

impl Point {
    pub fn degree(&self) -> u32 {
        match self {
            Point::Finite(f) => f.degree().unwrap_or(0) as u32,
            Point::Infinity => 1,
        }
    }
}

/// Points of degree `d`: monic irreducibles, plus infinity in degree 1.
pub fn points_of_degree(d: u32, p: u32) -> Vec<Point> {
    let mut out: Vec<Point> = monic_irreducibles(d as usize, p).into_iter().map(Point::Finite).collect();
    if d == 1 {
        out.push(Point::Infinity);
    }
    out
}

fn mobius(n: u32) -> i64 {
    let (mut n, mut k, mut out) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            out = -out;
        }
        k += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// Number of points of degree `d` as a polynomial in `q`.
pub fn point_count(d: u32) -> Poly {
    if d == 1 {
        return Poly::from_ints(&[1, 1]);
    }
    let mut c = vec![0i64; d as usize + 1];
    for e in 1..=d {
        if d.is_multiple_of(e) {
            c[e as usize] += mobius(d / e);
        }
    }
    Poly::from_ints(&c).scale(&crate::laurent::rat_frac(1, d as i64))
}

/// Which indecomposable to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Indec {
    /// `M(l+1, l)`.
    Prep(u32),
    /// `M(n, n+1)`.
    Prei(u32),
    /// `M(level, z)`.
    Regular { level: u32, point: Point },
}

pub fn kronecker_quiver() -> Quiver {
    Quiver::new(2, vec![(1, 0), (1, 0)]).expect("valid quiver")
}

/// Explicit matrices `(A, B)`, both `V_1 -> V_0`.
pub fn kron_indec(ind: &Indec, p: u32) -> QuiverRep {
    let (d0, d1, a, b) = match ind {
        Indec::Prep(l) => {
            let l = *l as usize;
            let (mut a, mut b) = (Mat::zeros(l + 1, l, p), Mat::zeros(l + 1, l, p));
            for i in 0..l {
                a.set(i, i, 1);
                b.set(i + 1, i, 1);
            }
            (l + 1, l, a, b)
        }
        Indec::Prei(n) => {
            let n = *n as usize;
            let (mut a, mut b) = (Mat::zeros(n, n + 1, p), Mat::zeros(n, n + 1, p));
            for i in 0..n {
                a.set(i, i, 1);
                b.set(i, i + 1, 1);
            }
            (n, n + 1, a, b)
        }
        Indec::Regular { level, point: Point::Finite(f) } => {
            let c = f.pow(*level, p).companion(p);
            (c.rows, c.rows, Mat::identity(c.rows, p), c)
        }
        Indec::Regular { level, point: Point::Infinity } => {
            let c = FpPoly::new(vec![0, 1]).pow(*level, p).companion(p);
            let n = c.rows;
            (n, n, c, Mat::identity(n, p))
        }
    };
    QuiverRep { p, dims: DimVector(vec![d0 as u32, d1 as u32]), mats: vec![a, b] }
}

/// All tubes of weight exactly `w`.
fn tubes_of_weight(w: u32) -> Vec<Tube> {
    let mut out = Vec::new();
    for d in 1..=w {
        if w.is_multiple_of(d) {
            for la in partitions(w / d) {
                out.push(Tube { deg: d, parts: la.0 });
            }
        }
    }
    out
}

/// Regular types of weight `k`: multisets of tubes.
pub fn regular_types(k: u32) -> Vec<Vec<Tube>> {
    let tubes: Vec<Tube> = (1..=k).flat_map(tubes_of_weight).collect();
    fn go(tubes: &[Tube], from: usize, left: u32, cur: &mut Vec<Tube>, out: &mut Vec<Vec<Tube>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..tubes.len() {
            if tubes[i].weight() <= left {
                cur.push(tubes[i].clone());
                go(tubes, i, left - tubes[i].weight(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&tubes, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Multiplicity vectors `c` with `sum c[i] * dim(i) <= nu`, for the
/// summands `dim(i)`, `i = 0..len`.
fn multisets(dims: &[(u32, u32)], nu: (u32, u32)) -> Vec<(Vec<u32>, (u32, u32))> {
    fn go(dims: &[(u32, u32)], i: usize, left: (u32, u32), cur: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, (u32, u32))>) {
        if i == dims.len() {
            out.push((trim(cur.clone()), left));
            return;
        }
        let (a, b) = dims[i];
        let mut m = 0;
        let mut l = left;
        loop {
            cur.push(m);
            go(dims, i + 1, l, cur, out);
            cur.pop();
            if l.0 < a || l.1 < b {
                break;
            }
            l = (l.0 - a, l.1 - b);
            m += 1;
        }
    }
    let mut out = Vec::new();
    go(dims, 0, nu, &mut Vec::new(), &mut out);
    out
}

type Catalog = (Vec<QuiverRep>, Vec<Vec<usize>>, Vec<QuiverRep>, Vec<Vec<usize>>);

/// The Kronecker quiver as a Hall-algebra family over isoclass types.
pub struct Kronecker {
    quiver: Quiver,
    catalogs: Mutex<HashMap<(u32, u32), Arc<Catalog>>>,
}

impl Default for Kronecker {
    fn default() -> Self {
        Kronecker::new()
    }
}

impl Kronecker {
    pub fn new() -> Kronecker {
        Kronecker { quiver: kronecker_quiver(), catalogs: Mutex::default() }
    }

    /// Preprojectives and preinjectives up to size `len`, with their Hom
    /// matrices (`hp[j][l] = dim Hom(P_j, P_l)`, `hi[n][j] = dim Hom(I_n, I_j)`).
    fn catalog(&self, p: u32, len: u32) -> Arc<Catalog> {
        if let Some(c) = self.catalogs.lock().unwrap().get(&(p, len)) {
            return c.clone();
        }
        let ps: Vec<QuiverRep> = (0..=len).map(|l| kron_indec(&Indec::Prep(l), p)).collect();
        let is: Vec<QuiverRep> = (0..=len).map(|n| kron_indec(&Indec::Prei(n), p)).collect();
        let q = &self.quiver;
        let hp = ps.iter().map(|a| ps.iter().map(|b| hom_dim(q, a, b)).collect()).collect();
        let hi = is.iter().map(|a| is.iter().map(|b| hom_dim(q, a, b)).collect()).collect();
        let c = Arc::new((ps, hp, is, hi));
        self.catalogs.lock().unwrap().insert((p, len), c.clone());
        c
    }

    /// The default points for the tubes of `t`: for each degree, the tubes
    /// in order take the points in order. `None` if there are too few.
    pub fn default_points(&self, t: &KronType, p: u32) -> Option<Vec<Point>> {
        let mut next: HashMap<u32, usize> = HashMap::new();
        let mut lists: HashMap<u32, Vec<Point>> = HashMap::new();
        let mut out = Vec::with_capacity(t.reg.len());
        for tube in &t.reg {
            let list = lists.entry(tube.deg).or_insert_with(|| points_of_degree(tube.deg, p));
            let k = next.entry(tube.deg).or_insert(0);
            out.push(list.get(*k)?.clone());
            *k += 1;
        }
        Some(out)
    }

    /// The module of type `t` with the given point for each tube. Points must
    /// be distinct and of the right degrees.
    pub fn rep_with_points(&self, t: &KronType, points: &[Point], p: u32) -> Result<QuiverRep> {
        if points.len() != t.reg.len() {
            return Err(Error::Usage("one point per tube is required".into()));
        }
        let mut seen = points.to_vec();
        seen.sort();
        seen.dedup();
        if seen.len() != points.len() {
            return Err(Error::Usage("tubes need distinct points".into()));
        }
        let mut parts = Vec::new();
        for (l, &m) in t.prep.iter().enumerate() {
            parts.extend(std::iter::repeat_n(kron_indec(&Indec::Prep(l as u32), p), m as usize));
        }
        for (tube, z) in t.reg.iter().zip(points) {
            if z.degree() != tube.deg {
                return Err(Error::Usage("point of the wrong degree".into()));
            }
            for &l in &tube.parts {
                parts.push(kron_indec(&Indec::Regular { level: l, point: z.clone() }, p));
            }
        }
        for (n, &m) in t.prei.iter().enumerate() {
            parts.extend(std::iter::repeat_n(kron_indec(&Indec::Prei(n as u32), p), m as usize));
        }
        Ok(QuiverRep::direct_sum_all(&parts, &self.quiver, p))
    }
}

/// Solves `fp[x] = sum_y c[y] t[x][y]` for `t` lower unitriangular.
fn solve_lower(t: &[Vec<usize>], fp: &[usize]) -> Result<Vec<u32>> {
    let mut c = vec![0u32; fp.len()];
    for x in 0..fp.len() {
        if t[x][x] != 1 || (x + 1..fp.len()).any(|y| t[x][y] != 0) {
            return Err(Error::Consistency("Hom matrix is not unitriangular".into()));
        }
        let s: i64 = (0..x).map(|y| c[y] as i64 * t[x][y] as i64).sum();
        let v = fp[x] as i64 - s;
        if v < 0 {
            return Err(Error::AmbiguousFingerprint(fp.to_vec()));
        }
        c[x] = v as u32;
    }
    Ok(c)
}

/// Exponents of each irreducible factor across the invariant factors.
fn tube_partitions(inv: &[FpPoly], p: u32) -> BTreeMap<FpPoly, Vec<u32>> {
    let mut out: BTreeMap<FpPoly, Vec<u32>> = BTreeMap::new();
    for f in inv {
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (g, e) in f.factor(p) {
            out.entry(g).or_default().push(e);
        }
    }
    out
}

impl Family for Kronecker {
    type Label = KronType;

    fn name(&self) -> String {
        "kronecker".into()
    }

    fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    fn dim(&self, t: &KronType) -> DimVector {
        let k = t.regular_weight();
        let (mut a, mut b) = (k, k);
        for (l, &m) in t.prep.iter().enumerate() {
            a += m * (l as u32 + 1);
            b += m * l as u32;
        }
        for (n, &m) in t.prei.iter().enumerate() {
            a += m * n as u32;
            b += m * (n as u32 + 1);
        }
        DimVector(vec![a, b])
    }

    fn classes(&self, nu: &DimVector) -> Result<Vec<KronType>> {
        let (a, b) = (nu.0[0], nu.0[1]);
        let prep_dims: Vec<(u32, u32)> = (0..=a).map(|l| (l + 1, l)).filter(|d| d.0 <= a && d.1 <= b).collect();
        let mut out = Vec::new();
        for (cm, left) in multisets(&prep_dims, (a, b)) {
            let prei_dims: Vec<(u32, u32)> = (0..=left.1).map(|n| (n, n + 1)).filter(|d| d.0 <= left.0 && d.1 <= left.1).collect();
            for (cp, rest) in multisets(&prei_dims, left) {
                if rest.0 != rest.1 {
                    continue;
                }
                for reg in regular_types(rest.0) {
                    out.push(KronType::new(cm.clone(), reg, cp.clone()));
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn representative(&self, t: &KronType, p: u32) -> Option<QuiverRep> {
        let pts = self.default_points(t, p)?;
        self.rep_with_points(t, &pts, p).ok()
    }

    fn classify(&self, m: &QuiverRep) -> Result<KronType> {
        let p = m.p;
        let (d0, d1) = (m.dims.0[0], m.dims.0[1]);
        let q = &self.quiver;
        let len = d0.max(d1);
        let cat = self.catalog(p, len);
        let (ps, hp, is, hi) = (&cat.0, &cat.1, &cat.2, &cat.3);
        let np = d0.min(d1 + 1) as usize;
        let ni = d1.min(d0 + 1) as usize;
        // Hom(M, P_l) only sees preprojective summands
        let fp: Vec<usize> = (0..np).map(|l| hom_dim(q, m, &ps[l])).collect();
        let tp: Vec<Vec<usize>> = (0..np).map(|l| (0..np).map(|j| hp[j][l]).collect()).collect();
        let prep = solve_lower(&tp, &fp)?;
        // Hom(I_n, M) only sees preinjective summands
        let fi: Vec<usize> = (0..ni).map(|n| hom_dim(q, &is[n], m)).collect();
        let ti: Vec<Vec<usize>> = (0..ni).map(|n| (0..ni).map(|j| hi[n][j]).collect()).collect();
        let prei = solve_lower(&ti, &fi)?;
        let (a, b) = (&m.mats[0], &m.mats[1]);
        let pencil = |fa: &dyn Fn(u32) -> FpPoly, fb: &dyn Fn(u32) -> FpPoly| -> Vec<Vec<FpPoly>> {
            (0..a.rows).map(|r| (0..a.cols).map(|c| fa(a.at(r, c)).add(&fb(b.at(r, c)), p)).collect()).collect()
        };
        let neg = |x: u32| (p - x) % p;
        // x A - B for finite points, A - y B at infinity
        let fin = smith_invariants(pencil(&|x| FpPoly::new(vec![0, x]), &|y| FpPoly::new(vec![neg(y)])), p);
        let inf = smith_invariants(pencil(&|x| FpPoly::new(vec![x]), &|y| FpPoly::new(vec![0, neg(y)])), p);
        let mut reg = Vec::new();
        for (g, parts) in tube_partitions(&fin, p) {
            reg.push(Tube { deg: g.degree().unwrap() as u32, parts });
        }
        let y = FpPoly::new(vec![0, 1]);
        if let Some(parts) = tube_partitions(&inf, p).remove(&y) {
            reg.push(Tube { deg: 1, parts });
        }
        let t = KronType::new(prep, reg, prei);
        if self.dim(&t) != m.dims {
            return Err(Error::Consistency(format!("classification of a {} module does not add up", m.dims)));
        }
        Ok(t)
    }

    fn summands(&self, t: &KronType) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = t.prep.iter().chain(&t.prei).filter(|&&m| m > 0).map(|&m| (1, m)).collect();
        for tube in &t.reg {
            for (_, m) in Partition(tube.parts.clone()).multiplicities() {
                out.push((tube.deg, m));
            }
        }
        out
    }

    /// Number of classes of type `t`: ways to put distinct points on the
    /// tubes, up to permuting identical tubes.
    fn class_count(&self, t: &KronType) -> Poly {
        let mut out = Poly::constant(rat(1));
        let mut by_deg: BTreeMap<u32, Vec<&Tube>> = BTreeMap::new();
        for tube in &t.reg {
            by_deg.entry(tube.deg).or_default().push(tube);
        }
        for (d, tubes) in by_deg {
            let n = point_count(d);
            for i in 0..tubes.len() {
                out = out.mul(&n.sub(&Poly::constant(rat(i as i64))));
            }
            let mut same: BTreeMap<&Vec<u32>, u64> = BTreeMap::new();
            for t in tubes {
                *same.entry(&t.parts).or_insert(0) += 1;
            }
            for (_, m) in same {
                out = out.scale(&crate::laurent::rat_frac(1, crate::symchar::factorial(m) as i64));
            }
        }
        out
    }

    fn label_text(&self, t: &KronType) -> String {
        let mut s = String::new();
        let put = |s: &mut String, body: String, m: u32| {
            if !s.is_empty() {
                s.push('+');
            }
            s.push_str(&body);
            if m > 1 {
                let _ = write!(s, "^{m}");
            }
        };
        for (l, &m) in t.prep.iter().enumerate() {
            if m > 0 {
                put(&mut s, format!("P({},{})", l + 1, l), m);
            }
        }
        for tube in &t.reg {
            let parts: Vec<String> = tube.parts.iter().map(|x| x.to_string()).collect();
            put(&mut s, format!("T{}[{}]", tube.deg, parts.join(",")), 1);
        }
        for (n, &m) in t.prei.iter().enumerate() {
            if m > 0 {
                put(&mut s, format!("I({},{})", n, n + 1), m);
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    fn semisimple(&self, d: &DimVector) -> KronType {
        KronType::new(vec![d.0[0]], vec![], vec![d.0[1]])
    }

    /// Left exactness of Hom gives `Hom(T, P) <= Hom(X, P) + Hom(Y, P)` for
    /// preprojective `P`, and dually for preinjectives.
    fn may_extend(&self, x: &KronType, y: &KronType, t: &KronType) -> bool {
        hom_bound_holds(&x.prep, &y.prep, &t.prep) && hom_bound_holds(&x.prei, &y.prei, &t.prei)
    }
}

/// With `h(c)(l) = sum_j c[j] max(0, l - j + 1)`, checks
/// `h(t) <= h(x) + h(y)` at every `l`. Past the supports all three are
/// linear, so the check stops there and compares slopes.
fn hom_bound_holds(x: &[u32], y: &[u32], t: &[u32]) -> bool {
    let h = |c: &[u32], l: usize| -> i64 { c.iter().enumerate().filter(|(j, _)| *j <= l).map(|(j, &m)| m as i64 * (l - j + 1) as i64).sum() };
    let top = x.len().max(y.len()).max(t.len());
    let slope = |c: &[u32]| c.iter().map(|&m| m as i64).sum::<i64>();
    (0..=top).all(|l| h(t, l) <= h(x, l) + h(y, l)) && slope(t) <= slope(x) + slope(y)
}

/// Index of the PBW basis: preprojective part, partition, preinjective part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GIndex {
    pub cm: Vec<u32>,
    pub lambda: Partition,
    pub cp: Vec<u32>,
}

impl GIndex {
    pub fn new(cm: Vec<u32>, lambda: Partition, cp: Vec<u32>) -> GIndex {
        GIndex { cm: trim(cm), lambda, cp: trim(cp) }
    }
}

/// `a < b` for support-finite multiplicity functions read from index 0:
/// at the first difference the larger value is the smaller function.
fn seq_less(a: &[u32], b: &[u32]) -> bool {
    for i in 0..a.len().max(b.len()) {
        let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        if x != y {
            return x > y;
        }
    }
    false
}

fn seq_le(a: &[u32], b: &[u32]) -> bool {
    trim(a.to_vec()) == trim(b.to_vec()) || seq_less(a, b)
}

/// `a < b` in the order on indices: either the same `c` and a
/// lexicographically larger partition, or `c` smaller in both parts.
pub fn g_less(a: &GIndex, b: &GIndex) -> bool {
    if a.cm == b.cm && a.cp == b.cp {
        return a.lambda > b.lambda;
    }
    seq_le(&a.cm, &b.cm) && seq_le(&a.cp, &b.cp)
}

/// Builds `Psi~_k`, `P~_k`, `S_lambda` and `P~_lambda` as lazily evaluated
/// expressions over a [`Spec`].
pub struct ImagGraph<'s, S: Spec<Kronecker>> {
    spec: &'s S,
    pub graph: Graph<KronType, S::R>,
    unit: usize,
    psi: Vec<usize>,
    pt: Vec<usize>,
    prods: HashMap<Vec<u32>, usize>,
}

impl<'s, S: Spec<Kronecker>> ImagGraph<'s, S> {
    pub fn new(spec: &'s S) -> Result<Self> {
        let mut graph = Graph::new();
        let fam = &spec.alg().fam;
        let unit = graph.elem(HallElement::basis(KronType::default()), |l| fam.dim(l))?;
        Ok(ImagGraph { spec, graph, unit, psi: vec![unit], pt: vec![unit], prods: HashMap::new() })
    }

    fn leaf(&mut self, t: KronType) -> Result<usize> {
        let fam = &self.spec.alg().fam;
        let e = bracket(self.spec, &t)?;
        self.graph.elem(e, |l| fam.dim(l))
    }

    /// `Psi~_k = E_(k-1,k) E_(1,0) - v^-2 E_(1,0) E_(k-1,k)`.
    pub fn psi(&mut self, k: u32) -> Result<usize> {
        while self.psi.len() <= k as usize {
            let k = self.psi.len() as u32;
            let ek = self.leaf(KronType::new(vec![], vec![], { let mut v = vec![0; k as usize]; v[k as usize - 1] = 1; v }))?;
            let e10 = self.leaf(KronType::new(vec![1], vec![], vec![]))?;
            let a = self.graph.prod(ek, e10);
            let b = self.graph.prod(e10, ek);
            let id = self.graph.lin(vec![(S::R::one(), a), (self.spec.v_pow(-2).negate(), b)])?;
            self.psi.push(id);
        }
        Ok(self.psi[k as usize])
    }

    /// `P~_k = (1/[k]) sum_{s=1..k} v^{s-k} Psi~_s P~_{k-s}`, `P~_0 = 1`.
    pub fn p_tilde(&mut self, k: u32) -> Result<usize> {
        while self.pt.len() <= k as usize {
            let k = self.pt.len() as u32;
            let mut terms = Vec::new();
            for s in 1..=k {
                let ps = self.psi(s)?;
                let id = if s == k { ps } else { self.graph.prod(ps, self.pt[(k - s) as usize]) };
                terms.push((self.spec.v_pow(s as i32 - k as i32), id));
            }
            let sum = self.graph.lin(terms)?;
            let id = self.graph.div(sum, self.spec.lift(&quantum_int(k as i64)));
            self.pt.push(id);
        }
        Ok(self.pt[k as usize])
    }

    /// The product `P~_{i_1} ... P~_{i_t}` in the given order, skipping
    /// `P~_0`.
    fn p_product(&mut self, idx: &[u32]) -> Result<usize> {
        let idx: Vec<u32> = idx.iter().copied().filter(|&i| i > 0).collect();
        if idx.is_empty() {
            return Ok(self.unit);
        }
        if let Some(&id) = self.prods.get(&idx) {
            return Ok(id);
        }
        let last = self.p_tilde(*idx.last().unwrap())?;
        let id = if idx.len() == 1 {
            last
        } else {
            let head = self.p_product(&idx[..idx.len() - 1])?;
            self.graph.prod(head, last)
        };
        self.prods.insert(idx, id);
        Ok(id)
    }

    pub fn p_lambda(&mut self, la: &Partition) -> Result<usize> {
        self.p_product(&la.0)
    }

    /// `S_lambda = det(P~_{lambda_k - k + m})`, by permutation expansion.
    pub fn schur(&mut self, la: &Partition) -> Result<usize> {
        let t = la.len();
        let mut terms = Vec::new();
        for (perm, sign) in permutations(t) {
            let mut idx = Vec::with_capacity(t);
            let mut ok = true;
            for k in 0..t {
                let i = la.0[k] as i64 - k as i64 + perm[k] as i64;
                if i < 0 {
                    ok = false;
                    break;
                }
                idx.push(i as u32);
            }
            if !ok {
                continue;
            }
            let id = self.p_product(&idx)?;
            let c = if sign > 0 { S::R::one() } else { S::R::one().negate() };
            terms.push((c, id));
        }
        if terms.is_empty() {
            return Ok(self.unit);
        }
        self.graph.lin(terms)
    }

    pub fn evaluator(&self) -> Evaluator<'_, Kronecker, S> {
        Evaluator::new(self.spec, &self.graph)
    }
}

/// Checks `P~_a P~_b = P~_b P~_a` at a prime whenever `a + b <= k`.
pub fn check_commuting_at_prime(alg: &HallAlgebra<Kronecker>, p: u32, k: u32) -> Result<()> {
    let spec = alg.at_prime(p);
    let mut g = ImagGraph::new(&spec)?;
    let mut pairs = Vec::new();
    for a in 1..=k / 2 {
        for b in a + 1..=k - a {
            let (x, y) = (g.p_tilde(a)?, g.p_tilde(b)?);
            pairs.push((g.graph.prod(x, y), g.graph.prod(y, x)));
        }
    }
    let mut ev = g.evaluator();
    for (xy, yx) in pairs {
        if ev.expand(xy)? != ev.expand(yx)? {
            return Err(Error::NonCommutingEntries);
        }
    }
    Ok(())
}

/// All permutations of `0..t` with their signs.
pub fn permutations(t: usize) -> Vec<(Vec<usize>, i32)> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        let t = used.len();
        if cur.len() == t {
            let inv = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).filter(|&(i, j)| cur[i] > cur[j]).count();
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..t {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                go(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; t], &mut out);
    out
}

/// The Kronecker Hall algebra with its imaginary root vectors and PBW basis.
pub struct KronAlgebra {
    pub alg: HallAlgebra<Kronecker>,
    ptilde: Mutex<Vec<GenElem<Kronecker>>>,
    psi: Mutex<Vec<GenElem<Kronecker>>>,
    nbasis: Mutex<HashMap<GIndex, GenElem<Kronecker>>>,
    schur: Mutex<HashMap<Partition, GenElem<Kronecker>>>,
    commuting: Mutex<u32>,
}

type Gen = GenElem<Kronecker>;

impl KronAlgebra {
    pub fn new(cfg: Config) -> Result<Self> {
        Ok(KronAlgebra {
            alg: HallAlgebra::new(Kronecker::new(), cfg)?,
            ptilde: Mutex::new(vec![]),
            psi: Mutex::new(vec![]),
            nbasis: Mutex::default(),
            schur: Mutex::default(),
            commuting: Mutex::new(1),
        })
    }

    pub fn fam(&self) -> &Kronecker {
        &self.alg.fam
    }

    fn unit(&self) -> Gen {
        HallElement::basis(KronType::default())
    }

    pub fn prep_type(l: u32) -> KronType {
        let mut v = vec![0; l as usize + 1];
        v[l as usize] = 1;
        KronType::new(v, vec![], vec![])
    }

    pub fn prei_type(n: u32) -> KronType {
        let mut v = vec![0; n as usize + 1];
        v[n as usize] = 1;
        KronType::new(vec![], vec![], v)
    }

    /// `E_(k-1,k) E_(1,0) - v^-2 E_(1,0) E_(k-1,k)`, generically.
    pub fn psi_tilde(&self, k: u32) -> Result<Gen> {
        if k == 0 {
            return Err(Error::Usage("Psi~_k needs k >= 1".into()));
        }
        if let Some(x) = self.psi.lock().unwrap().get(k as usize - 1) {
            return Ok(x.clone());
        }
        let g = self.alg.generic();
        let ek = bracket(&g, &Self::prei_type(k - 1))?;
        let e10 = bracket(&g, &Self::prep_type(0))?;
        let x = product(&g, &ek, &e10)?.sub(&product(&g, &e10, &ek)?.scale(&LaurentPoly::v_pow(-2)));
        let mut c = self.psi.lock().unwrap();
        if c.len() == k as usize - 1 {
            c.push(x.clone());
        }
        Ok(x)
    }

    /// `P~_k`, generically, by the recursion.
    pub fn p_tilde(&self, k: u32) -> Result<Gen> {
        if k == 0 {
            return Ok(self.unit());
        }
        if let Some(x) = self.ptilde.lock().unwrap().get(k as usize - 1) {
            return Ok(x.clone());
        }
        let g = self.alg.generic();
        let mut sum = HallElement::zero();
        for s in 1..=k {
            let term = if s == k { self.psi_tilde(s)? } else { product(&g, &self.psi_tilde(s)?, &self.p_tilde(k - s)?)? };
            sum = sum.add(&term.scale(&LaurentPoly::v_pow(s as i32 - k as i32)));
        }
        let qk = quantum_int(k as i64);
        let mut out = HallElement::zero();
        for (l, c) in sum.terms {
            out.add_term(l, c.div_exact(&qk)?);
        }
        let mut c = self.ptilde.lock().unwrap();
        if c.len() == k as usize - 1 {
            c.push(out.clone());
        }
        Ok(out)
    }

    /// `sum v^{-dim M} u_M` over regular `M` of dimension `k delta`.
    pub fn regular_sum(&self, k: u32) -> Result<Gen> {
        let mut out = HallElement::zero();
        for t in self.alg.classes(&DimVector(vec![k, k]))?.iter() {
            if t.is_regular() {
                out.add_term(t.clone(), LaurentPoly::v_pow(-2 * k as i32));
            }
        }
        Ok(out)
    }

    pub fn p_tilde_lambda(&self, la: &Partition) -> Result<Gen> {
        let g = self.alg.generic();
        let mut x = self.unit();
        for &k in &la.0 {
            x = product(&g, &x, &self.p_tilde(k)?)?;
        }
        Ok(x)
    }

    /// `S_lambda = det(P~_{lambda_k - k + m})`.
    pub fn schur_s(&self, la: &Partition) -> Result<Gen> {
        if let Some(x) = self.schur.lock().unwrap().get(la) {
            return Ok(x.clone());
        }
        let g = self.alg.generic();
        let t = la.len();
        if t == 0 {
            return Ok(self.unit());
        }
        // the determinant only makes sense for commuting entries
        self.check_commuting(la.size())?;
        let mut out = HallElement::zero();
        for (perm, sign) in permutations(t) {
            let idx: Vec<i64> = (0..t).map(|k| la.0[k] as i64 - k as i64 + perm[k] as i64).collect();
            if idx.iter().any(|&i| i < 0) {
                continue;
            }
            let mut x = self.unit();
            for &i in idx.iter().filter(|&&i| i > 0) {
                x = product(&g, &x, &self.p_tilde(i as u32)?)?;
            }
            out = if sign > 0 { out.add(&x) } else { out.sub(&x) };
        }
        self.schur.lock().unwrap().insert(la.clone(), out.clone());
        Ok(out)
    }

    /// Checks that `P~_a P~_b = P~_b P~_a` whenever `a + b <= k`.
    pub fn check_commuting(&self, k: u32) -> Result<()> {
        if *self.commuting.lock().unwrap() >= k {
            return Ok(());
        }
        let g = self.alg.generic();
        for a in 1..=k / 2 {
            for b in a + 1..=k - a {
                let (x, y) = (self.p_tilde(a)?, self.p_tilde(b)?);
                if product(&g, &x, &y)? != product(&g, &y, &x)? {
                    return Err(Error::NonCommutingEntries);
                }
            }
        }
        *self.commuting.lock().unwrap() = k;
        Ok(())
    }

    /// Coefficients of `<M>` in `P~_lambda` and `S_lambda`.
    pub fn coefficient_ab(&self, la: &Partition, m: &KronType) -> Result<(LaurentPoly, LaurentPoly)> {
        let e = self.alg.dim_end(m)? as i32 - self.fam().dim(m).total() as i32;
        let a = self.p_tilde_lambda(la)?.coeff(m).shift(-e);
        let b = self.schur_s(la)?.coeff(m).shift(-e);
        Ok((a, b))
    }

    fn brackets(&self, prep: &[u32], prei: &[u32]) -> Result<(Gen, Gen)> {
        let g = self.alg.generic();
        Ok((bracket(&g, &KronType::new(prep.to_vec(), vec![], vec![]))?, bracket(&g, &KronType::new(vec![], vec![], prei.to_vec()))?))
    }

    /// `N(c, lambda) = <M(c_-)> * S_lambda * <M(c_+)>`.
    pub fn basis_n(&self, c: &GIndex) -> Result<Gen> {
        if let Some(x) = self.nbasis.lock().unwrap().get(c) {
            return Ok(x.clone());
        }
        let g = self.alg.generic();
        let (a, b) = self.brackets(&c.cm, &c.cp)?;
        let x = product(&g, &product(&g, &a, &self.schur_s(&c.lambda)?)?, &b)?;
        self.nbasis.lock().unwrap().insert(c.clone(), x.clone());
        Ok(x)
    }

    /// `N'(c, lambda)`, with `P~_lambda` in place of `S_lambda`.
    pub fn basis_n_prime(&self, c: &GIndex) -> Result<Gen> {
        let g = self.alg.generic();
        let (a, b) = self.brackets(&c.cm, &c.cp)?;
        product(&g, &product(&g, &a, &self.p_tilde_lambda(&c.lambda)?)?, &b)
    }

    /// Every index of weight `nu`, in a linear extension of the order.
    pub fn g_indices(&self, nu: &DimVector) -> Result<Vec<GIndex>> {
        let (a, b) = (nu.0[0], nu.0[1]);
        let prep_dims: Vec<(u32, u32)> = (0..=a).map(|l| (l + 1, l)).filter(|d| d.0 <= a && d.1 <= b).collect();
        let mut all = Vec::new();
        for (cm, left) in multisets(&prep_dims, (a, b)) {
            let prei_dims: Vec<(u32, u32)> = (0..=left.1).map(|n| (n, n + 1)).filter(|d| d.0 <= left.0 && d.1 <= left.1).collect();
            for (cp, rest) in multisets(&prei_dims, left) {
                if rest.0 != rest.1 {
                    continue;
                }
                for la in partitions(rest.0) {
                    all.push(GIndex::new(cm.clone(), la, cp.clone()));
                }
            }
        }
        all.sort();
        all.dedup();
        let mut done = vec![false; all.len()];
        let mut out = Vec::with_capacity(all.len());
        while out.len() < all.len() {
            let k = (0..all.len()).find(|&k| !done[k] && (0..all.len()).all(|j| done[j] || !g_less(&all[j], &all[k]))).ok_or(Error::CycleDetected)?;
            done[k] = true;
            out.push(all[k].clone());
        }
        Ok(out)
    }

    pub fn weight(&self, nu: &DimVector, choice: Choice) -> Result<WeightData<GIndex>> {
        canon::compute_weight(self, nu, choice)
    }

    /// `C(c, lambda)` for every index of weight `nu`: coordinates in the `N`
    /// basis and the bracket-basis expansion.
    pub fn kron_canonical(&self, nu: &DimVector) -> Result<Vec<(GIndex, Vec<(GIndex, LaurentPoly)>, BTreeMap<KronType, LaurentPoly>)>> {
        let w = self.weight(nu, Choice::First)?;
        let pbw: Vec<Gen> = w.idx.iter().map(|a| self.basis_n(a)).collect::<Result<_>>()?;
        let elems = w.canonical_elements(&pbw);
        let mut out = Vec::with_capacity(w.idx.len());
        for ((a, row), x) in w.idx.iter().zip(&w.canonical).zip(elems) {
            let ncoords = w.idx.iter().zip(row).filter(|(_, c)| !c.is_zero()).map(|(b, c)| (b.clone(), c.clone())).collect();
            out.push((a.clone(), ncoords, self.bracket_expand(&x)?));
        }
        Ok(out)
    }

    pub fn bracket_expand(&self, x: &Gen) -> Result<BTreeMap<KronType, LaurentPoly>> {
        let mut out = BTreeMap::new();
        for (l, c) in &x.terms {
            let e = self.alg.dim_end(l)? as i32 - self.fam().dim(l).total() as i32;
            out.insert(l.clone(), c.shift(-e));
        }
        Ok(out)
    }
}

impl PbwFamily for KronAlgebra {
    type F = Kronecker;
    type Idx = GIndex;

    fn alg(&self) -> &HallAlgebra<Kronecker> {
        &self.alg
    }

    fn indices(&self, nu: &DimVector) -> Result<Vec<GIndex>> {
        self.g_indices(nu)
    }

    fn less(&self, a: &GIndex, b: &GIndex) -> bool {
        g_less(a, b)
    }

    fn pbw_element(&self, a: &GIndex) -> Result<Gen> {
        self.basis_n(a)
    }

    /// `N(c, lambda)` is supported on types with preprojective part `c_-` and
    /// preinjective part `c_+`. Within such a block the coefficients at the
    /// types `M(mu, z)` with distinct degree-1 points are triangular in
    /// `lambda`; solve there, then check the whole block.
    fn coords(&self, nu: &DimVector, x: &Gen) -> Result<Vec<LaurentPoly>> {
        let idx = self.g_indices(nu)?;
        if x.terms.keys().any(|l| self.fam().dim(l) != *nu) {
            return Err(Error::Consistency("element is not homogeneous of the requested weight".into()));
        }
        let mut out = vec![LaurentPoly::zero(); idx.len()];
        let mut blocks: BTreeMap<(Vec<u32>, Vec<u32>), Vec<usize>> = BTreeMap::new();
        for (i, a) in idx.iter().enumerate() {
            blocks.entry((a.cm.clone(), a.cp.clone())).or_default().push(i);
        }
        let mut rest = x.clone();
        for ((cm, cp), members) in blocks {
            let mut by_lambda: Vec<(Partition, usize)> = members.iter().map(|&i| (idx[i].lambda.clone(), i)).collect();
            // row M(mu, z) only meets S_lambda for lambda >= mu, so go down
            by_lambda.sort_by(|a, b| b.cmp(a));
            let mut solved: Vec<(usize, LaurentPoly, Gen)> = Vec::new();
            for (mu, i) in &by_lambda {
                let row = KronType::new(cm.clone(), KronType::distinct_points(mu).reg, cp.clone());
                let mut r = x.coeff(&row);
                for (_, c, n) in &solved {
                    r = &r - &(c * &n.coeff(&row));
                }
                let n = self.basis_n(&idx[*i])?;
                let d = n.coeff(&row);
                let c = if r.is_zero() { LaurentPoly::zero() } else { r.div_exact(&d).map_err(|_| Error::Consistency("N coordinates are not Laurent".into()))? };
                solved.push((*i, c, n));
            }
            for (i, c, n) in solved {
                if !c.is_zero() {
                    rest = rest.sub(&n.scale(&c));
                }
                out[i] = c;
            }
        }
        if !rest.is_zero() {
            return Err(Error::Consistency("element is not in the span of the N basis".into()));
        }
        Ok(out)
    }

    fn idx_text(&self, a: &GIndex) -> String {
        let f = self.fam();
        let mut parts = Vec::new();
        if !a.cm.is_empty() {
            parts.push(format!("<{}>", f.label_text(&KronType::new(a.cm.clone(), vec![], vec![]))));
        }
        if a.lambda.size() > 0 {
            parts.push(format!("S_{}", a.lambda));
        }
        if !a.cp.is_empty() {
            parts.push(format!("<{}>", f.label_text(&KronType::new(vec![], vec![], a.cp.clone()))));
        }
        if parts.is_empty() {
            return "1".into();
        }
        parts.join("*")
    }
}

/// One instance of a checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub name: String,
    pub ok: bool,
}

/// Every way to put pairwise distinct points on the tubes of `t`, up to
/// swapping identical tubes. Points of degree `d` come from
/// [`points_of_degree`].
pub fn point_assignments(t: &KronType, p: u32) -> Vec<Vec<Point>> {
    let mut lists: BTreeMap<u32, Vec<Point>> = BTreeMap::new();
    for tube in &t.reg {
        lists.entry(tube.deg).or_insert_with(|| points_of_degree(tube.deg, p));
    }
    fn go(t: &KronType, lists: &BTreeMap<u32, Vec<Point>>, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<Point>>) {
        if i == t.reg.len() {
            out.push(cur.iter().zip(&t.reg).map(|(&k, tube)| lists[&tube.deg][k].clone()).collect());
            return;
        }
        let tube = &t.reg[i];
        // identical tubes take increasing points
        let from = if i > 0 && t.reg[i - 1] == *tube { cur[i - 1] + 1 } else { 0 };
        for k in from..lists[&tube.deg].len() {
            let clash = (0..i).any(|j| t.reg[j].deg == tube.deg && cur[j] == k);
            if !clash {
                cur.push(k);
                go(t, lists, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &lists, 0, &mut Vec::new(), &mut out);
    out
}

fn point_text(z: &Point) -> String {
    match z {
        Point::Infinity => "inf".into(),
        Point::Finite(f) => {
            let c: Vec<String> = f.c.iter().map(|x| x.to_string()).collect();
            format!("[{}]", c.join(" "))
        }
    }
}

/// `P~_k` against the sum of `v^-dim M u_M` over regular `M`, generically
/// and specialised at each prime through the lazy graph.
pub fn check_regular_sum(k: &KronAlgebra, max_k: u32, primes: &[u32]) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for n in 1..=max_k {
        let want = k.regular_sum(n)?;
        out.push(Instance { name: format!("regular-sum k={n} generic"), ok: k.p_tilde(n)? == want });
        for &p in primes {
            let spec = k.alg.at_prime(p);
            let mut g = ImagGraph::new(&spec)?;
            let id = g.p_tilde(n)?;
            let got = g.evaluator().expand(id)?;
            out.push(Instance { name: format!("regular-sum k={n} p={p}"), ok: got == crate::hallalg::specialise(&want, p) });
        }
    }
    Ok(out)
}

/// `B_lambda` at `M(mu, z)` equals `v^-|lambda|` times the number of
/// semistandard tableaux of shape `lambda` and content `mu`, for every
/// assignment of distinct degree-1 points, each checked on its own module.
/// Partitions with more parts than there are points are skipped.
pub fn check_kostka(alg: &HallAlgebra<Kronecker>, p: u32, n: u32) -> Result<Vec<Instance>> {
    let spec = alg.at_prime(p);
    let mut g = ImagGraph::new(&spec)?;
    let las = partitions(n);
    let ids: Vec<usize> = las.iter().map(|la| g.schur(la)).collect::<Result<_>>()?;
    let mut ev = g.evaluator();
    let mut out = Vec::new();
    for mu in partitions(n) {
        let t = KronType::distinct_points(&mu);
        let shift = spec.v_pow(alg.fam.dim(&t).total() as i32 - alg.dim_end(&t)? as i32);
        for z in point_assignments(&t, p) {
            let m = alg.fam.rep_with_points(&t, &z, p)?;
            let zs: Vec<String> = z.iter().map(point_text).collect();
            for (la, &id) in las.iter().zip(&ids) {
                let b = ev.coeff_at_rep(id, &m)?.times(&shift);
                let want = SqrtElem::v_pow(p, -(n as i32)).scale(&rat(kostka(la, &mu.0) as i64));
                out.push(Instance { name: format!("kostka p={p} lambda={la} mu={mu} z={}", zs.join(",")), ok: b == want });
            }
        }
    }
    Ok(out)
}

/// `A_lambda` and `B_lambda` at `M[mu, z']`, one level-1 module at a point
/// of degree `mu_i` each, against the permutation and irreducible
/// characters of the symmetric group.
pub fn check_characters(alg: &HallAlgebra<Kronecker>, p: u32, n: u32) -> Result<Vec<Instance>> {
    let spec = alg.at_prime(p);
    let mut g = ImagGraph::new(&spec)?;
    let las = partitions(n);
    let mut ids = Vec::new();
    for la in &las {
        ids.push((g.p_lambda(la)?, g.schur(la)?));
    }
    let mut ev = g.evaluator();
    let mut out = Vec::new();
    for mu in partitions(n) {
        let t = KronType::by_degrees(&mu);
        let Some(m) = alg.fam.representative(&t, p) else { continue };
        let shift = spec.v_pow(alg.fam.dim(&t).total() as i32 - alg.dim_end(&t)? as i32);
        let unit = SqrtElem::v_pow(p, -(n as i32));
        for (la, &(pa, sb)) in las.iter().zip(&ids) {
            let a = ev.coeff_at_rep(pa, &m)?.times(&shift);
            let b = ev.coeff_at_rep(sb, &m)?.times(&shift);
            let wa = unit.scale(&rat(perm_character(&la.0, &mu)));
            let wb = unit.scale(&rat(specht_character(la, &mu)));
            out.push(Instance { name: format!("perm-char p={p} lambda={la} mu={mu}"), ok: a == wa });
            out.push(Instance { name: format!("specht-char p={p} lambda={la} mu={mu}"), ok: b == wb });
        }
    }
    Ok(out)
}

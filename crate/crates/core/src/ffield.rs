//! Linear algebra over prime fields `F_p` and polynomials over `F_p`.
//!
//! Matrices are small and dense; entries are `u32` residues. Everything here is
//! deterministic and allocation-light because the subrepresentation
//! enumerator calls into it millions of times.

use std::fmt;

use crate::laurent::{rat, Poly};

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, (p - 2) as u64, p)
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense `rows x cols` matrix over `F_p`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub p: u32,
    pub d: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}/F{}[", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, p: u32) -> Mat {
        Mat { rows, cols, p, d: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: u32) -> Mat {
        let mut m = Mat::zeros(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize, p: u32) -> Mat {
        let mut m = Mat::zeros(rows.len(), cols, p);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, x) in row.iter().enumerate() {
                m.set(r, c, x % p);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u32 {
        self.d[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.d[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.d[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let p = self.p as u64;
        let mut out = Mat::zeros(self.rows, o.cols, self.p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.d[idx] = ((out.d[idx] as u64 + a * o.at(k, j) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    pub fn scale(&self, x: u32) -> Mat {
        let mut m = self.clone();
        for e in &mut m.d {
            *e = mul(*e, x, self.p);
        }
        m
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut m = self.clone();
        for (e, f) in m.d.iter_mut().zip(&o.d) {
            *e = add(*e, *f, self.p);
        }
        m
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.add(&o.scale(self.p - 1))
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.at(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..self.cols {
                    self.d.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let iv = inv(self.at(r, c), p);
            if iv != 1 {
                for j in c..self.cols {
                    let x = self.at(r, j);
                    self.set(r, j, mul(x, iv, p));
                }
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.at(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let x = sub(self.at(i, j), mul(f, self.at(r, j), p), p);
                    self.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// RREF with zero rows removed, together with its pivots.
    pub fn row_space(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        m.d.truncate(piv.len() * m.cols);
        m.rows = piv.len();
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of `{x : self * x = 0}` as the rows of the result.
    pub fn kernel(&self) -> Mat {
        let (r, piv) = self.row_space();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut k = Mat::zeros(free.len(), self.cols, self.p);
        for (i, &f) in free.iter().enumerate() {
            k.set(i, f, 1);
            for (ri, &pc) in piv.iter().enumerate() {
                let x = r.at(ri, f);
                if x != 0 {
                    k.set(i, pc, self.p - x);
                }
            }
        }
        k
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = Mat::zeros(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let piv = aug.rref_in_place();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Mat::zeros(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.at(i, n + j));
            }
        }
        Some(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Stacks `self` above `o`.
    pub fn vstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.cols);
        let mut d = self.d.clone();
        d.extend_from_slice(&o.d);
        Mat { rows: self.rows + o.rows, cols: self.cols, p: self.p, d }
    }

    /// Places `self` left of `o`.
    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut m = Mat::zeros(self.rows, self.cols + o.cols, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.at(r, c));
            }
            for c in 0..o.cols {
                m.set(r, self.cols + c, o.at(r, c));
            }
        }
        m
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols, self.p);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.at(r0 + r, c0 + c));
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// A subspace of `F_p^n`, held as an RREF basis (rows) plus pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub basis: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize, p: u32) -> Subspace {
        Subspace { basis: Mat::zeros(0, n, p), pivots: vec![] }
    }

    pub fn full(n: usize, p: u32) -> Subspace {
        Subspace { basis: Mat::identity(n, p), pivots: (0..n).collect() }
    }

    /// Row space of `m`.
    pub fn span(m: &Mat) -> Subspace {
        let (basis, pivots) = m.row_space();
        Subspace { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    /// Coordinates of `x` (assumed to lie in the subspace) in the RREF basis.
    pub fn coords(&self, x: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&c| x[c]).collect()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.reduce(x).iter().all(|&e| e == 0)
    }

    /// `x` minus its projection along the RREF basis; zero on pivot columns.
    pub fn reduce(&self, x: &[u32]) -> Vec<u32> {
        let p = self.basis.p;
        let mut y = x.to_vec();
        for (i, &c) in self.pivots.iter().enumerate() {
            let f = y[c];
            if f != 0 {
                for (j, e) in y.iter_mut().enumerate() {
                    *e = sub(*e, mul(f, self.basis.at(i, j), p), p);
                }
            }
        }
        y
    }

    /// Non-pivot columns; they index a basis of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient()).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Coordinates of the class of `x` in the quotient by this subspace.
    pub fn quotient_coords(&self, x: &[u32]) -> Vec<u32> {
        let y = self.reduce(x);
        self.free_columns().iter().map(|&c| y[c]).collect()
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        // x = a*B1 = b*B2  <=>  [B1; -B2]^T solves; take the a-part.
        let n = self.ambient();
        let p = self.basis.p;
        let k1 = self.dim();
        let stacked = self.basis.vstack(&o.basis.scale(p - 1)).transpose();
        let ker = stacked.kernel();
        let mut rows = Mat::zeros(ker.rows, n, p);
        for r in 0..ker.rows {
            for i in 0..k1 {
                let a = ker.at(r, i);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let x = add(rows.at(r, j), mul(a, self.basis.at(i, j), p), p);
                    rows.set(r, j, x);
                }
            }
        }
        Subspace::span(&rows)
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        Subspace::span(&self.basis.vstack(&o.basis))
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        (0..o.dim()).all(|r| self.contains(o.basis.row(r)))
    }
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// The Gaussian binomial as a polynomial in `q`.
pub fn gaussian_binomial_poly(n: usize, k: usize) -> Poly {
    if k > n {
        return Poly::zero();
    }
    let mut num = Poly::constant(rat(1));
    let mut den = Poly::constant(rat(1));
    for i in 0..k {
        let mut a = vec![rat(0); n - i + 1];
        a[0] = rat(-1);
        a[n - i] = rat(1);
        num = num.mul(&Poly::new(a));
        let mut b = vec![rat(0); i + 2];
        b[0] = rat(-1);
        b[i + 1] = rat(1);
        den = den.mul(&Poly::new(b));
    }
    num.divrem(&den).0
}

/// Calls `f` with every `k`-dimensional subspace of `F_p^n` as an RREF basis
/// and its pivots. Returns early with `false` if `f` does.
pub fn for_each_subspace(n: usize, k: usize, p: u32, f: &mut dyn FnMut(&Mat, &[usize]) -> bool) -> bool {
    if k > n {
        return true;
    }
    let mut piv: Vec<usize> = (0..k).collect();
    loop {
        // Free cells: row i, columns after its pivot that are not pivots.
        let mut cells = Vec::new();
        for (i, &c) in piv.iter().enumerate() {
            for j in c + 1..n {
                if !piv.contains(&j) {
                    cells.push((i, j));
                }
            }
        }
        let mut m = Mat::zeros(k, n, p);
        for (i, &c) in piv.iter().enumerate() {
            m.set(i, c, 1);
        }
        let mut vals = vec![0u32; cells.len()];
        loop {
            if !f(&m, &piv) {
                return false;
            }
            let mut idx = 0;
            loop {
                if idx == cells.len() {
                    break;
                }
                vals[idx] += 1;
                if vals[idx] == p {
                    vals[idx] = 0;
                    m.set(cells[idx].0, cells[idx].1, 0);
                    idx += 1;
                } else {
                    m.set(cells[idx].0, cells[idx].1, vals[idx]);
                    break;
                }
            }
            if idx == cells.len() {
                break;
            }
        }
        // next pivot combination
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if piv[i] < n - k + i {
                piv[i] += 1;
                for j in i + 1..k {
                    piv[j] = piv[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return true;
        }
    }
}

/// Calls `f` with every subspace `U` with `lower <= U <= upper` and `dim U = k`.
pub fn for_each_subspace_between(
    lower: &Subspace,
    upper: &Subspace,
    k: usize,
    f: &mut dyn FnMut(&Subspace) -> bool,
) -> bool {
    let l = lower.dim();
    let h = upper.dim();
    if k < l || k > h {
        return true;
    }
    let p = upper.basis.p;
    // Express `lower` in coordinates of `upper`.
    let mut lc = Mat::zeros(l, h, p);
    for r in 0..l {
        let c = upper.coords(lower.basis.row(r));
        for (j, x) in c.into_iter().enumerate() {
            lc.set(r, j, x);
        }
    }
    let lsub = Subspace::span(&lc);
    let free = lsub.free_columns();
    let n = upper.ambient();
    for_each_subspace(h - l, k - l, p, &mut |q, _| {
        let mut coords = Mat::zeros(k, h, p);
        for r in 0..l {
            for j in 0..h {
                coords.set(r, j, lsub.basis.at(r, j));
            }
        }
        for r in 0..k - l {
            for (qi, &fc) in free.iter().enumerate() {
                coords.set(l + r, fc, q.at(r, qi));
            }
        }
        let amb = coords.mul(&upper.basis);
        debug_assert_eq!(amb.cols, n);
        f(&Subspace::span(&amb))
    })
}

/// Polynomial over `F_p`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub c: Vec<u32>,
}

impl FpPoly {
    pub fn new(mut c: Vec<u32>) -> FpPoly {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn zero() -> FpPoly {
        FpPoly { c: vec![] }
    }

    pub fn one() -> FpPoly {
        FpPoly { c: vec![1] }
    }

    /// `x - a`.
    pub fn linear(a: u32, p: u32) -> FpPoly {
        FpPoly::new(vec![(p - a % p) % p, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u32 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u32, p: u32) -> u32 {
        self.c.iter().rev().fold(0, |acc, &a| add(mul(acc, x, p), a, p))
    }

    pub fn add(&self, o: &FpPoly, p: u32) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new((0..n).map(|i| add(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0), p)).collect())
    }

    pub fn sub(&self, o: &FpPoly, p: u32) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new((0..n).map(|i| sub(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0), p)).collect())
    }

    pub fn scale(&self, a: u32, p: u32) -> FpPoly {
        FpPoly::new(self.c.iter().map(|&x| mul(x, a, p)).collect())
    }

    pub fn mul(&self, o: &FpPoly, p: u32) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero();
        }
        let mut c = vec![0u32; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = add(c[i + j], mul(a, b, p), p);
            }
        }
        FpPoly::new(c)
    }

    pub fn pow(&self, e: u32, p: u32) -> FpPoly {
        (0..e).fold(FpPoly::one(), |acc, _| acc.mul(self, p))
    }

    pub fn divrem(&self, d: &FpPoly, p: u32) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (FpPoly::zero(), self.clone());
        }
        let il = inv(d.lead(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u32; r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mul(r[i + dd], il, p);
            if coef != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[i + j] = sub(r[i + j], mul(coef, dc, p), p);
                }
            }
            q[i] = coef;
        }
        (FpPoly::new(q), FpPoly::new(r))
    }

    pub fn monic(&self, p: u32) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv(self.lead(), p), p)
    }

    pub fn gcd(&self, o: &FpPoly, p: u32) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b, p).1;
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// Factorisation into monic irreducibles with multiplicities, sorted.
    /// Trial division in increasing degree; inputs here have small degree.
    pub fn factor(&self, p: u32) -> Vec<(FpPoly, u32)> {
        let mut f = self.monic(p);
        let mut out: Vec<(FpPoly, u32)> = Vec::new();
        let mut d = 1;
        while f.degree().unwrap_or(0) >= 2 * d {
            let mut found = false;
            for g in monic_polys(d, p) {
                let mut e = 0;
                loop {
                    let (q, r) = f.divrem(&g, p);
                    if !r.is_zero() {
                        break;
                    }
                    f = q;
                    e += 1;
                }
                if e > 0 {
                    out.push((g, e));
                    found = true;
                }
            }
            let _ = found;
            d += 1;
        }
        if f.degree().unwrap_or(0) >= 1 {
            match out.iter_mut().find(|(g, _)| *g == f) {
                Some(entry) => entry.1 += 1,
                None => out.push((f, 1)),
            }
        }
        out.sort();
        out
    }

    pub fn is_irreducible(&self, p: u32) -> bool {
        let f = self.factor(p);
        f.len() == 1 && f[0].1 == 1
    }

    /// Companion matrix (acts on column vectors; last column holds `-c_i`).
    pub fn companion(&self, p: u32) -> Mat {
        let f = self.monic(p);
        let n = f.degree().expect("companion of constant");
        let mut m = Mat::zeros(n, n, p);
        for i in 1..n {
            m.set(i, i - 1, 1);
        }
        for i in 0..n {
            m.set(i, n - 1, (p - f.c[i]) % p);
        }
        m
    }
}

/// All monic polynomials of degree `d` over `F_p`, in a fixed order.
pub fn monic_polys(d: usize, p: u32) -> Vec<FpPoly> {
    let total = (p as usize).pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = vec![0u32; d + 1];
            for e in c.iter_mut().take(d) {
                *e = (idx % p as usize) as u32;
                idx /= p as usize;
            }
            c[d] = 1;
            FpPoly::new(c)
        })
        .collect()
}

/// Monic irreducible polynomials of degree `d` over `F_p`, in a fixed order.
pub fn monic_irreducibles(d: usize, p: u32) -> Vec<FpPoly> {
    monic_polys(d, p).into_iter().filter(|f| f.is_irreducible(p)).collect()
}

/// Invariant factors (monic, nonzero, each dividing the next) of a matrix
/// over `F_p[x]`.
pub fn smith_invariants(mut m: Vec<Vec<FpPoly>>, p: u32) -> Vec<FpPoly> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least degree
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, e) in row.iter().enumerate().skip(t) {
                if let Some(d) = e.degree() {
                    if best.is_none_or(|b| d < b.2) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].divrem(&m[t][t], p);
                for j in t..cols {
                    let x = m[i][j].sub(&q.mul(&m[t][j], p), p);
                    m[i][j] = x;
                }
                if !r.is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].divrem(&m[t][t], p);
                for row in m.iter_mut().skip(t) {
                    let x = row[j].sub(&q.mul(&row[t], p), p);
                    row[j] = x;
                }
                if !r.is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the rest by the pivot
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !m[i][j].divrem(&m[t][t], p).1.is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let x = m[t][j].add(&m[i][j], p);
                        m[t][j] = x;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].monic(p));
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_inverse() {
        let m = Mat::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]], 3, 5);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.rows, 2);
        assert!(m.mul(&k.transpose()).is_zero());
        let a = Mat::from_rows(&[vec![1, 1], vec![0, 1]], 2, 3);
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), Mat::identity(2, 3));
        assert!(Mat::from_rows(&[vec![1, 1], vec![1, 1]], 2, 2).inverse().is_none());
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for p in [2u32, 3] {
            for n in 0..4 {
                for k in 0..=n {
                    let mut c = 0u128;
                    for_each_subspace(n, k, p, &mut |_, _| {
                        c += 1;
                        true
                    });
                    assert_eq!(c, gaussian_binomial(n, k, p as u64), "n={n} k={k} p={p}");
                    assert_eq!(gaussian_binomial_poly(n, k).eval_int(p as i64), rat(c as i64));
                }
            }
        }
    }

    #[test]
    fn subspaces_between_bounds() {
        let p = 3;
        let lower = Subspace::span(&Mat::from_rows(&[vec![1, 0, 0, 0]], 4, p));
        let upper = Subspace::span(&Mat::from_rows(&[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]], 4, p));
        let mut seen = Vec::new();
        for_each_subspace_between(&lower, &upper, 2, &mut |u| {
            assert!(u.contains_space(&lower) && upper.contains_space(u));
            seen.push(u.basis.clone());
            true
        });
        assert_eq!(seen.len() as u128, gaussian_binomial(2, 1, 3));
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn intersections() {
        let p = 2;
        let a = Subspace::span(&Mat::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]], 3, p));
        let b = Subspace::span(&Mat::from_rows(&[vec![0, 1, 0], vec![0, 0, 1]], 3, p));
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&[0, 1, 0]));
        assert_eq!(a.sum(&b).dim(), 3);
    }

    #[test]
    fn polynomial_factoring() {
        let p = 2;
        assert_eq!(monic_irreducibles(1, p).len(), 2);
        assert_eq!(monic_irreducibles(2, p).len(), 1);
        assert_eq!(monic_irreducibles(3, p).len(), 2);
        assert_eq!(monic_irreducibles(4, p).len(), 3);
        assert_eq!(monic_irreducibles(2, 3).len(), 3);
        // (x+1)^2 (x^2+x+1) over F_2
        let f = FpPoly::new(vec![1, 1]).pow(2, p).mul(&FpPoly::new(vec![1, 1, 1]), p);
        assert_eq!(f.factor(p), vec![(FpPoly::new(vec![1, 1]), 2), (FpPoly::new(vec![1, 1, 1]), 1)]);
    }

    #[test]
    fn smith_of_companion_pencil() {
        let p = 3;
        let f = FpPoly::new(vec![1, 0, 1]); // x^2 + 1, irreducible mod 3
        let c = f.companion(p);
        let n = c.rows;
        let m: Vec<Vec<FpPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diag = if i == j { vec![0, 1] } else { vec![0] };
                        FpPoly::new(diag).sub(&FpPoly::new(vec![c.at(i, j)]), p)
                    })
                    .collect()
            })
            .collect();
        assert_eq!(smith_invariants(m, p), vec![FpPoly::one(), f]);
    }
}

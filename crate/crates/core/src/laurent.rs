//! Exact Laurent polynomials in `v` over the rationals.
//!
//! [`LaurentPoly`] carries every coefficient the library produces: quantum
//! integers, Hall structure constants after the substitution `q = v^2`,
//! bar-transition entries and canonical-basis coefficients. [`RationalFunc`]
//! holds values of the bilinear form, which live in `Q(v)`. [`Poly`] is a dense
//! univariate polynomial over `Q`, used for Hall polynomials in `q` and for
//! gcd computations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Laurent polynomial `sum c_k v^k` with no stored zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(rat(1), 0)
    }

    /// The indeterminate `v`.
    pub fn v() -> Self {
        Self::monomial(rat(1), 1)
    }

    pub fn v_pow(k: i32) -> Self {
        Self::monomial(rat(1), k)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::monomial(rat(c), 0)
    }

    pub fn monomial(c: Rational, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentPoly { terms }
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rational)>>(it: I) -> Self {
        let mut out = LaurentPoly::zero();
        for (k, c) in it {
            out.add_term(k, &c);
        }
        out
    }

    pub fn from_int_terms(pairs: &[(i32, i64)]) -> Self {
        Self::from_terms(pairs.iter().map(|&(k, c)| (k, rat(c))))
    }

    fn add_term(&mut self, k: i32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, k: i32) -> Rational {
        self.terms.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Bar involution: `v^n -> v^-n`.
    pub fn bar(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// True for elements of `v^-1 Z[v^-1]`.
    pub fn in_strict_negative_integral(&self) -> bool {
        self.is_integral() && self.max_exp().is_none_or(|m| m < 0)
    }

    /// The part with strictly negative exponents.
    pub fn negative_part(&self) -> Self {
        LaurentPoly { terms: self.terms.range(..0).map(|(k, c)| (*k, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Evaluates at `v = x` for rational `x` (nonzero when negative exponents occur).
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            let p = if *k >= 0 { pow_rat(x, *k as u32) } else { pow_rat(x, (-*k) as u32).recip() };
            acc += c * p;
        }
        acc
    }

    /// Exact quotient `self / b`, failing unless it is a Laurent polynomial.
    pub fn div_exact(&self, b: &LaurentPoly) -> Result<LaurentPoly> {
        if b.is_zero() {
            return Err(Error::NotDivisible);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let bmax = b.max_exp().unwrap();
        let bmin = b.min_exp().unwrap();
        let blead = b.coeff(bmax);
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        // Long division on descending exponents; the quotient's range is bounded
        // by the spans of the operands.
        let lowest_allowed = self.min_exp().unwrap() - bmin;
        while let Some(top) = rem.max_exp() {
            let k = top - bmax;
            if k < lowest_allowed {
                return Err(Error::NotDivisible);
            }
            let c = rem.coeff(top) / &blead;
            let t = LaurentPoly::monomial(c, k);
            rem = &rem - &(&t * b);
            quot = &quot + &t;
        }
        Ok(quot)
    }

    /// Dense coefficient vector after shifting to a polynomial: returns
    /// `(shift, poly)` with `self = v^shift * poly(v)` and `poly(0) != 0`.
    pub fn to_poly(&self) -> (i32, Poly) {
        match self.min_exp() {
            None => (0, Poly::zero()),
            Some(lo) => {
                let hi = self.max_exp().unwrap();
                let mut c = vec![Rational::zero(); (hi - lo + 1) as usize];
                for (k, x) in &self.terms {
                    c[(k - lo) as usize] = x.clone();
                }
                (lo, Poly::new(c))
            }
        }
    }

    pub fn from_poly(shift: i32, p: &Poly) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(i, c)| (i as i32 + shift, c.clone())))
    }

    /// Sorted `(exponent, numerator, denominator)` triples.
    pub fn to_triples(&self) -> Vec<(i32, String, String)> {
        self.terms.iter().map(|(k, c)| (*k, c.numer().to_string(), c.denom().to_string())).collect()
    }

    pub fn from_triples(t: &[(i32, String, String)]) -> Result<Self> {
        let mut out = Self::zero();
        for (k, n, d) in t {
            let n: BigInt = n.parse().map_err(|_| Error::Usage(format!("bad numerator {n}")))?;
            let d: BigInt = d.parse().map_err(|_| Error::Usage(format!("bad denominator {d}")))?;
            if d.is_zero() {
                return Err(Error::Usage("zero denominator".into()));
            }
            out.add_term(*k, &BigRational::new(n, d));
        }
        Ok(out)
    }
}

fn pow_rat(x: &Rational, n: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..n {
        out *= x;
    }
    out
}

/// `[n]_v = (v^n - v^-n) / (v - v^-1)`, for any integer `n`.
pub fn quantum_int(n: i64) -> LaurentPoly {
    if n == 0 {
        return LaurentPoly::zero();
    }
    let m = n.unsigned_abs() as i32;
    let pos = LaurentPoly::from_terms((0..m).map(|j| (m - 1 - 2 * j, rat(1))));
    if n > 0 {
        pos
    } else {
        -pos
    }
}

/// `[n]_v! = [n][n-1]...[1]`, with `[0]! = 1`.
pub fn quantum_factorial(n: u32) -> LaurentPoly {
    (1..=n as i64).fold(LaurentPoly::one(), |acc, k| &acc * &quantum_int(k))
}

impl fmt::Display for LaurentPoly {
    /// Descending exponents, e.g. `v^3 + 2 - v^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let var = match *k {
                0 => String::new(),
                1 => "v".to_string(),
                _ => format!("v^{k}"),
            };
            if var.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{a}{var}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let t: Vec<(i32, String, String)> = Vec::deserialize(d)?;
        LaurentPoly::from_triples(&t).map_err(serde::de::Error::custom)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c);
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c);
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, &-c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Dense polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<Rational>,
}

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn constant(x: Rational) -> Self {
        Poly::new(vec![x])
    }

    /// The polynomial `q`.
    pub fn x_pow(k: usize) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = rat(1);
        Poly { c }
    }

    pub fn x() -> Self {
        Poly::new(vec![rat(0), rat(1)])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> Rational {
        self.c.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: i64) -> Rational {
        self.eval(&rat(x))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.c.get(i).cloned().unwrap_or_else(Rational::zero) + o.c.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn scale(&self, x: &Rational) -> Poly {
        Poly::new(self.c.iter().map(|c| c * x).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        let lead = d.lead();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dd] / &lead;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[i + j] -= &coef * dc;
                }
            }
            q[i] = coef;
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic gcd (zero when both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitutes `q = v^2`.
    pub fn to_laurent_q_is_v2(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.c.iter().enumerate().map(|(i, c)| (2 * i as i32, c.clone())))
    }

    /// Newton interpolation through `(x_i, y_i)`.
    pub fn interpolate(points: &[(i64, Rational)]) -> Poly {
        let n = points.len();
        let xs: Vec<Rational> = points.iter().map(|(x, _)| rat(*x)).collect();
        let mut dd: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
        for j in 1..n {
            for i in (j..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
            }
        }
        let mut out = Poly::zero();
        let mut basis = Poly::constant(rat(1));
        for i in 0..n {
            out = out.add(&basis.scale(&dd[i]));
            basis = basis.mul(&Poly::new(vec![-xs[i].clone(), rat(1)]));
        }
        out
    }

    /// `[[deg, "coeff"], ...]` for nonzero coefficients.
    pub fn to_pairs(&self) -> Vec<(usize, String)> {
        self.c.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.to_string())).collect()
    }

    pub fn from_pairs(p: &[(usize, String)]) -> Result<Poly> {
        let n = p.iter().map(|(d, _)| d + 1).max().unwrap_or(0);
        let mut c = vec![Rational::zero(); n];
        for (d, s) in p {
            c[*d] = s.parse::<Rational>().map_err(|_| Error::Usage(format!("bad coefficient {s}")))?;
        }
        Ok(Poly::new(c))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = LaurentPoly::from_terms(self.c.iter().enumerate().map(|(i, c)| (i as i32, c.clone())));
        write!(f, "{}", l.to_string().replace('v', "q"))
    }
}

/// An element of `Q(v)` kept in a canonical reduced form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Usage("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_laurent(x: LaurentPoly) -> Self {
        RationalFunc { num: x, den: LaurentPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_laurent(LaurentPoly::zero())
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    // Cancels the polynomial gcd and normalises the denominator to a
    // polynomial with nonzero constant term and leading coefficient 1.
    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (sn, pn) = num.to_poly();
        let (sd, pd) = den.to_poly();
        let g = pn.gcd(&pd);
        let (pn, _) = pn.divrem(&g);
        let (pd, _) = pd.divrem(&g);
        let lead = pd.lead();
        let pn = pn.scale(&lead.recip());
        let pd = pd.scale(&lead.recip());
        RationalFunc { num: LaurentPoly::from_poly(sn - sd, &pn), den: LaurentPoly::from_poly(0, &pd) }
    }

    pub fn add(&self, o: &RationalFunc) -> RationalFunc {
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        Self::reduce(num, &self.den * &o.den)
    }

    pub fn mul(&self, o: &RationalFunc) -> RationalFunc {
        Self::reduce(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn bar(&self) -> RationalFunc {
        Self::reduce(self.num.bar(), self.den.bar())
    }

    /// Coefficients of `v^0, v^-1, ..., v^-order` of the expansion at
    /// `v = infinity`. Fails with `PositiveDegree` if the expansion has a
    /// nonzero positive-exponent coefficient.
    pub fn series_head(&self, order: u32) -> Result<BTreeMap<i32, Rational>> {
        let mut out = BTreeMap::new();
        if self.num.is_zero() {
            return Ok(out);
        }
        let dmax = self.den.max_exp().unwrap();
        let dlead = self.den.coeff(dmax);
        let mut rem = self.num.clone();
        let lowest = -(order as i32);
        while let Some(top) = rem.max_exp() {
            let k = top - dmax;
            if k < lowest {
                break;
            }
            let c = rem.coeff(top) / &dlead;
            if k > 0 {
                return Err(Error::PositiveDegree(k));
            }
            let t = LaurentPoly::monomial(c.clone(), k);
            rem = &rem - &(&t * &self.den);
            out.insert(k, c);
        }
        Ok(out)
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// An element `a + b sqrt(p)` of `Q(sqrt p)`: a Laurent polynomial
/// specialised at `v = sqrt(p)`. `p = 0` marks a plain rational that can be
/// combined with any field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SqrtElem {
    pub p: u32,
    pub a: Rational,
    pub b: Rational,
}

impl SqrtElem {
    pub fn rational(a: Rational) -> SqrtElem {
        SqrtElem { p: 0, a, b: Rational::zero() }
    }

    pub fn zero() -> SqrtElem {
        Self::rational(Rational::zero())
    }

    pub fn one() -> SqrtElem {
        Self::rational(rat(1))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `v^k` at `v = sqrt(p)`.
    pub fn v_pow(p: u32, k: i32) -> SqrtElem {
        let half = k.div_euclid(2);
        let base = if half >= 0 { pow_rat(&rat(p as i64), half as u32) } else { pow_rat(&rat(p as i64), (-half) as u32).recip() };
        if k.rem_euclid(2) == 0 {
            SqrtElem { p, a: base, b: Rational::zero() }
        } else {
            SqrtElem { p, a: Rational::zero(), b: base }
        }
    }

    pub fn from_laurent(x: &LaurentPoly, p: u32) -> SqrtElem {
        x.terms().fold(SqrtElem { p, a: Rational::zero(), b: Rational::zero() }, |acc, (k, c)| {
            acc.add(&SqrtElem::v_pow(p, k).scale(c))
        })
    }

    fn field(&self, o: &SqrtElem) -> u32 {
        match (self.p, o.p) {
            (0, q) | (q, 0) => q,
            (x, y) => {
                assert_eq!(x, y, "mixing specialisations at different primes");
                x
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> SqrtElem {
        SqrtElem { p: self.p, a: &self.a * c, b: &self.b * c }
    }

    pub fn add(&self, o: &SqrtElem) -> SqrtElem {
        SqrtElem { p: self.field(o), a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &SqrtElem) -> SqrtElem {
        SqrtElem { p: self.field(o), a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> SqrtElem {
        SqrtElem { p: self.p, a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &SqrtElem) -> SqrtElem {
        let p = self.field(o);
        let pr = rat(p as i64);
        SqrtElem { p, a: &self.a * &o.a + &self.b * &o.b * pr, b: &self.a * &o.b + &self.b * &o.a }
    }

    /// Inverse via the conjugate; `None` for zero.
    pub fn inverse(&self) -> Option<SqrtElem> {
        if self.is_zero() {
            return None;
        }
        let pr = rat(self.p as i64);
        let norm = &self.a * &self.a - &self.b * &self.b * pr;
        if norm.is_zero() {
            return None;
        }
        Some(SqrtElem { p: self.p, a: &self.a / &norm, b: -&self.b / &norm })
    }
}

impl fmt::Display for SqrtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.p)
        }
    }
}

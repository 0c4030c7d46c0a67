//! The monomial / PBW / Lusztig pipeline shared by every family.
//!
//! A [`PbwFamily`] supplies, for each weight, a partially ordered index set,
//! the PBW-type elements `E_a` and a way to read coordinates in that basis.
//! [`compute_weight`] then finds a verified monomial for every index,
//! derives the bar action from `bar(m) = m`, and runs the triangular solver.

use std::collections::HashMap;
use std::fmt::Debug;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ffrep::DimVector;
use crate::hallalg::{divided_power, green_form, product, Family, HallAlgebra, HallElement};
use crate::laurent::{rat, LaurentPoly, Rational};
use crate::triangular::{transported_bar_action, TriangularSolution, TriangularSystem};

pub type Word = Vec<(usize, u32)>;
pub type GenElem<F> = HallElement<<F as Family>::Label, LaurentPoly>;

pub trait PbwFamily: Sync {
    type F: Family;
    type Idx: Clone + Ord + Debug + Send + Sync;

    fn alg(&self) -> &HallAlgebra<Self::F>;
    fn indices(&self, nu: &DimVector) -> Result<Vec<Self::Idx>>;
    /// Strict order `a < b`.
    fn less(&self, a: &Self::Idx, b: &Self::Idx) -> bool;
    /// `E_a` in the `u` basis.
    fn pbw_element(&self, a: &Self::Idx) -> Result<GenElem<Self::F>>;
    /// Coordinates of a homogeneous `x` of weight `nu` in `(E_a)`, aligned
    /// with `indices(nu)`. Fails if `x` is not in their span.
    fn coords(&self, nu: &DimVector, x: &GenElem<Self::F>) -> Result<Vec<LaurentPoly>>;
    fn idx_text(&self, a: &Self::Idx) -> String;
    /// Extra acceptance test for a monomial chosen for `target`, beyond
    /// unitriangularity in the `E` coordinates.
    fn monomial_ok(&self, _x: &GenElem<Self::F>, _target: &Self::Idx) -> Result<bool> {
        Ok(true)
    }
}

/// Which verified monomial to keep when several exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    First,
    Last,
}

/// Every computed object for one weight.
#[derive(Clone, Debug)]
pub struct WeightData<I> {
    pub idx: Vec<I>,
    /// `less[a][b]` iff `idx[a] < idx[b]`.
    pub less: Vec<Vec<bool>>,
    pub words: Vec<Word>,
    /// `mono[a][b]`: coordinate of `E_b` in the monomial for `a`.
    pub mono: Vec<Vec<LaurentPoly>>,
    /// `bar[a][b]`: coordinate of `E_b` in `bar(E_a)`.
    pub bar: Vec<Vec<LaurentPoly>>,
    pub system: TriangularSystem,
    pub solution: TriangularSolution,
    /// `canonical[a][b]`: coordinate of `E_b` in `C_a`.
    pub canonical: Vec<Vec<LaurentPoly>>,
}

/// Alternating words `(i_1, n_1) (i_2, n_2) ...` with content `nu`, fewest
/// letters first, then lexicographic.
pub fn words_with_content(nu: &DimVector) -> Vec<Word> {
    fn go(left: &mut Vec<u32>, cur: &mut Word, want: usize, out: &mut Vec<Word>) {
        if cur.len() == want {
            if left.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        // each remaining letter uses at least one unit
        let rest: u32 = left.iter().sum();
        if (rest as usize) < want - cur.len() {
            return;
        }
        for i in 0..left.len() {
            if cur.last().is_some_and(|&(j, _)| j == i) {
                continue;
            }
            for n in (1..=left[i]).rev() {
                left[i] -= n;
                cur.push((i, n));
                go(left, cur, want, out);
                cur.pop();
                left[i] += n;
            }
        }
    }
    let total = nu.total() as usize;
    let mut out = Vec::new();
    if total == 0 {
        return vec![vec![]];
    }
    let support = nu.0.iter().filter(|&&x| x > 0).count();
    for len in support..=total {
        let mut left = nu.0.clone();
        go(&mut left, &mut Vec::new(), len, &mut out);
    }
    out
}

/// Expansions of words in the generic algebra, memoised by prefix.
pub struct WordExpander<'a, F: Family> {
    alg: &'a HallAlgebra<F>,
    memo: HashMap<Word, GenElem<F>>,
    powers: HashMap<(usize, u32), GenElem<F>>,
}

impl<'a, F: Family> WordExpander<'a, F> {
    pub fn new(alg: &'a HallAlgebra<F>) -> Self {
        WordExpander { alg, memo: HashMap::new(), powers: HashMap::new() }
    }

    pub fn expand(&mut self, w: &[(usize, u32)]) -> Result<GenElem<F>> {
        if let Some(x) = self.memo.get(w) {
            return Ok(x.clone());
        }
        let x = match w.split_last() {
            None => HallElement::basis(self.alg.fam.semisimple(&DimVector::zero(self.alg.quiver().n()))),
            Some((&last, init)) => {
                let head = self.expand(init)?;
                let spec = self.alg.generic();
                let e = match self.powers.get(&last) {
                    Some(e) => e.clone(),
                    None => {
                        let e = divided_power(&spec, last.0, last.1)?;
                        self.powers.insert(last, e.clone());
                        e
                    }
                };
                product(&spec, &head, &e)?
            }
        };
        self.memo.insert(w.to_vec(), x.clone());
        Ok(x)
    }
}

/// Whether `coords` is `E_target` plus terms strictly below it.
pub fn is_unitriangular(coords: &[LaurentPoly], target: usize, less: &[Vec<bool>]) -> bool {
    coords[target].is_one() && coords.iter().enumerate().all(|(b, c)| b == target || c.is_zero() || less[b][target])
}

/// All verified words for every index of weight `nu` (in word order).
pub fn valid_words<P: PbwFamily>(fam: &P, nu: &DimVector, exp: &mut WordExpander<'_, P::F>) -> Result<Vec<Vec<(Word, Vec<LaurentPoly>)>>> {
    let idx = fam.indices(nu)?;
    let less = order_matrix(fam, &idx);
    let mut out = vec![Vec::new(); idx.len()];
    for w in words_with_content(nu) {
        let x = exp.expand(&w)?;
        let c = fam.coords(nu, &x)?;
        for t in 0..idx.len() {
            if is_unitriangular(&c, t, &less) && fam.monomial_ok(&x, &idx[t])? {
                out[t].push((w.clone(), c.clone()));
            }
        }
    }
    Ok(out)
}

pub fn order_matrix<P: PbwFamily>(fam: &P, idx: &[P::Idx]) -> Vec<Vec<bool>> {
    idx.iter().map(|a| idx.iter().map(|b| fam.less(a, b)).collect()).collect()
}

/// Monomials, bar action and canonical coefficients for weight `nu`.
pub fn compute_weight<P: PbwFamily>(fam: &P, nu: &DimVector, choice: Choice) -> Result<WeightData<P::Idx>> {
    let idx = fam.indices(nu)?;
    let n = idx.len();
    let less = order_matrix(fam, &idx);
    let mut exp = WordExpander::new(fam.alg());
    let mut words: Vec<Option<Word>> = vec![None; n];
    let mut mono: Vec<Vec<LaurentPoly>> = vec![Vec::new(); n];
    let mut open = n;
    for w in words_with_content(nu) {
        if open == 0 && choice == Choice::First {
            break;
        }
        let x = exp.expand(&w)?;
        let c = fam.coords(nu, &x)?;
        for t in 0..n {
            let take = match choice {
                Choice::First => words[t].is_none(),
                Choice::Last => true,
            };
            if take && is_unitriangular(&c, t, &less) && fam.monomial_ok(&x, &idx[t])? {
                if words[t].is_none() {
                    open -= 1;
                }
                words[t] = Some(w.clone());
                mono[t] = c.clone();
            }
        }
    }
    let words: Vec<Word> = words
        .into_iter()
        .enumerate()
        .map(|(t, w)| w.ok_or_else(|| Error::MonomialSearchFailed(fam.idx_text(&idx[t]))))
        .collect::<Result<_>>()?;
    let bar = bar_from_invariants(&less, &mono)?;
    let system = TriangularSystem::from_bar_action(&less, &bar);
    let solution = system.solve()?;
    system.verify(&solution)?;
    let canonical = solution.canonical();
    Ok(WeightData { idx, less, words, mono, bar, system, solution, canonical })
}

/// Bar action on a basis from bar-invariant elements `m_a = E_a + lower`:
/// `bar(E_a) = m_a - sum_{b < a} bar(m[a][b]) bar(E_b)`.
pub fn bar_from_invariants(less: &[Vec<bool>], mono: &[Vec<LaurentPoly>]) -> Result<Vec<Vec<LaurentPoly>>> {
    let n = less.len();
    let order = TriangularSystem::identity(less.to_vec()).linear_extension();
    let mut bar: Vec<Vec<LaurentPoly>> = vec![vec![LaurentPoly::zero(); n]; n];
    let mut done = vec![false; n];
    for &a in &order {
        let mut row = mono[a].clone();
        for b in 0..n {
            if b == a || mono[a][b].is_zero() {
                continue;
            }
            if !done[b] {
                return Err(Error::Consistency("monomial has a term outside the order".into()));
            }
            let cb = mono[a][b].bar();
            for d in 0..n {
                if !bar[b][d].is_zero() {
                    row[d] = &row[d] - &(&cb * &bar[b][d]);
                }
            }
        }
        bar[a] = row;
        done[a] = true;
    }
    Ok(bar)
}

impl<I: Clone> WeightData<I> {
    /// `C_a` in the `u` basis, given the PBW elements.
    pub fn canonical_elements<L: Ord + Clone>(&self, pbw: &[HallElement<L, LaurentPoly>]) -> Vec<HallElement<L, LaurentPoly>> {
        self.canonical
            .iter()
            .map(|row| row.iter().zip(pbw).fold(HallElement::zero(), |acc, (c, e)| if c.is_zero() { acc } else { acc.add(&e.scale(c)) }))
            .collect()
    }

    /// Checks `bar(C_a) = C_a` using the bar action on `E`.
    pub fn check_bar_invariance(&self) -> Result<()> {
        let n = self.idx.len();
        for a in 0..n {
            let mut img = vec![LaurentPoly::zero(); n];
            for b in 0..n {
                if self.canonical[a][b].is_zero() {
                    continue;
                }
                let cb = self.canonical[a][b].bar();
                for d in 0..n {
                    if !self.bar[b][d].is_zero() {
                        img[d] = &img[d] + &(&cb * &self.bar[b][d]);
                    }
                }
            }
            if img != self.canonical[a] {
                return Err(Error::Consistency(format!("canonical element {a} is not bar-invariant")));
            }
        }
        Ok(())
    }

    /// Re-runs the solver on the bar action transported to `C`; a correct
    /// basis is its own canonical basis.
    pub fn check_double_application(&self) -> Result<()> {
        let t = transported_bar_action(&self.less, &self.bar, &self.canonical)?;
        let sys = TriangularSystem::from_bar_action(&self.less, &t);
        let sol = sys.solve()?;
        sys.verify(&sol)?;
        let ident = TriangularSystem::identity(sys.less.clone());
        if sol.p != ident.r || t != ident.r {
            return Err(Error::Consistency("second application changed the basis".into()));
        }
        Ok(())
    }
}

/// Series heads of `(x_a, x_b)` to the given order.
pub fn gram_heads<F: Family>(
    alg: &HallAlgebra<F>,
    xs: &[HallElement<F::Label, LaurentPoly>],
    order: u32,
) -> Result<Vec<Vec<std::collections::BTreeMap<i32, Rational>>>> {
    let mut out = Vec::with_capacity(xs.len());
    for a in xs {
        let mut row = Vec::with_capacity(xs.len());
        for b in xs {
            row.push(green_form(alg, a, b)?.series_head(order)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Almost orthonormality: head `delta` at exponent 0, no positive
/// exponents, integer coefficients.
pub fn check_almost_orthonormal(heads: &[Vec<std::collections::BTreeMap<i32, Rational>>]) -> Result<()> {
    for (a, row) in heads.iter().enumerate() {
        for (b, h) in row.iter().enumerate() {
            for (&k, c) in h {
                if k > 0 && !c.is_zero() {
                    return Err(Error::Consistency(format!("Gram entry ({a}, {b}) has a positive power")));
                }
                if !c.is_integer() {
                    return Err(Error::Consistency(format!("Gram entry ({a}, {b}) has a non-integral coefficient")));
                }
            }
            let c0 = h.get(&0).cloned().unwrap_or_else(|| rat(0));
            let want = rat(i64::from(a == b));
            if c0 != want {
                return Err(Error::Consistency(format!("Gram entry ({a}, {b}) has constant term {c0}")));
            }
        }
    }
    Ok(())
}

/// The canonical basis of one weight, with each element in the `u` basis.
pub struct CanonicalRun<I, L: Ord> {
    pub data: WeightData<I>,
    pub index_text: Vec<String>,
    pub elements: Vec<HallElement<L, LaurentPoly>>,
}

pub fn run_canonical<P: PbwFamily>(fam: &P, nu: &DimVector) -> Result<CanonicalRun<P::Idx, <P::F as Family>::Label>> {
    let data = compute_weight(fam, nu, Choice::First)?;
    let pbw: Vec<GenElem<P::F>> = data.idx.iter().map(|a| fam.pbw_element(a)).collect::<Result<_>>()?;
    let elements = data.canonical_elements(&pbw);
    let index_text = data.idx.iter().map(|a| fam.idx_text(a)).collect();
    Ok(CanonicalRun { data, index_text, elements })
}

impl<I: Clone, L: Ord + Clone> CanonicalRun<I, L> {
    /// Bar-invariance, the second solver pass and Gram heads to `order`.
    pub fn checks<F: Family<Label = L>>(&self, alg: &HallAlgebra<F>, order: u32) -> Vec<(String, Result<()>)> {
        let gram = gram_heads(alg, &self.elements, order).and_then(|h| check_almost_orthonormal(&h));
        vec![
            ("bar-invariance".into(), self.data.check_bar_invariance()),
            ("double-application".into(), self.data.check_double_application()),
            (format!("gram-heads order {order}"), gram),
        ]
    }
}

/// Coefficients in the basis `<M> = v^{-dim M + dim End M} u_M`.
pub fn bracket_coefficients<F: Family>(alg: &HallAlgebra<F>, x: &GenElem<F>) -> Result<Vec<(F::Label, LaurentPoly)>> {
    let mut out = Vec::with_capacity(x.terms.len());
    for (l, c) in &x.terms {
        let e = alg.dim_end(l)? as i32 - alg.fam.dim(l).total() as i32;
        out.push((l.clone(), c.shift(-e)));
    }
    Ok(out)
}

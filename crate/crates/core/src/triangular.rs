//! Lusztig's lemma: bar-invariant corrections of a unitriangular basis.
//!
//! A [`TriangularSystem`] is a finite poset `H` with entries `r[h'][h]`
//! (written `r_h^{h'}`, defined for `h' <= h`) satisfying `r_h^h = 1` and
//! `sum_{h' <= h'' <= h} bar(r_{h''}^{h'}) r_h^{h''} = delta`. The solution is
//! the unique `p_h^{h'}` with `p_h^h = 1`, `p_h^{h'}` in `v^-1 Z[v^-1]` for
//! `h' < h`, and `p_h^{h'} = sum bar(p_{h''}^{h'}) r_h^{h''}`.
//!
//! Families describe their bar action as "`bar(B_a)` = `B_a` + lower terms".
//! [`TriangularSystem::from_bar_action`] turns that into a system on the
//! opposite order, and [`TriangularSolution::canonical`] reads the canonical
//! coefficients back in family terms.

use crate::error::{Error, Result};
use num_traits::Zero;

use crate::laurent::LaurentPoly;

#[derive(Clone, Debug)]
pub struct TriangularSystem {
    /// `less[a][b]` iff `a < b`.
    pub less: Vec<Vec<bool>>,
    /// `r[a][b] = r_b^a`; zero unless `a <= b`.
    pub r: Vec<Vec<LaurentPoly>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangularSolution {
    /// `p[a][b] = p_b^a`; zero unless `a <= b`.
    pub p: Vec<Vec<LaurentPoly>>,
}

impl TriangularSystem {
    pub fn new(less: Vec<Vec<bool>>, r: Vec<Vec<LaurentPoly>>) -> TriangularSystem {
        TriangularSystem { less, r }
    }

    pub fn len(&self) -> usize {
        self.less.len()
    }

    pub fn is_empty(&self) -> bool {
        self.less.is_empty()
    }

    fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.less[a][b]
    }

    /// The identity system on a poset.
    pub fn identity(less: Vec<Vec<bool>>) -> TriangularSystem {
        let n = less.len();
        let r = (0..n).map(|a| (0..n).map(|b| if a == b { LaurentPoly::one() } else { LaurentPoly::zero() }).collect()).collect();
        TriangularSystem { less, r }
    }

    /// Builds the system for a basis `B` whose bar action is
    /// `bar(B_a) = sum_b bar_coeff[a][b] B_b`, nonzero only for `b <= a` in
    /// `family_less`. The system lives on the opposite order.
    pub fn from_bar_action(family_less: &[Vec<bool>], bar_coeff: &[Vec<LaurentPoly>]) -> TriangularSystem {
        let n = family_less.len();
        let less = (0..n).map(|a| (0..n).map(|b| family_less[b][a]).collect()).collect();
        TriangularSystem { less, r: bar_coeff.to_vec() }
    }

    /// Checks the two hypotheses of the lemma, plus that `r` is supported on
    /// the order.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if self.less[a][b] && self.less[b][a] {
                    return Err(Error::Consistency(format!("order is not antisymmetric at ({a}, {b})")));
                }
                for c in 0..n {
                    if self.less[a][b] && self.less[b][c] && !self.less[a][c] {
                        return Err(Error::Consistency(format!("order is not transitive at ({a}, {b}, {c})")));
                    }
                }
                if !self.le(a, b) && !self.r[a][b].is_zero() {
                    return Err(Error::BadInvolution { lower: a, upper: b });
                }
            }
            if !self.r[a][a].is_one() {
                return Err(Error::BadDiagonal(a));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.le(a, b) {
                    continue;
                }
                let mut s = LaurentPoly::zero();
                for c in 0..n {
                    if self.le(a, c) && self.le(c, b) {
                        s += &(&self.r[a][c].bar() * &self.r[c][b]);
                    }
                }
                let expect = if a == b { LaurentPoly::one() } else { LaurentPoly::zero() };
                if s != expect {
                    return Err(Error::BadInvolution { lower: a, upper: b });
                }
            }
        }
        Ok(())
    }

    /// A linear extension of the order (smallest first), ties by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut done = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let k = (0..n).find(|&k| !done[k] && (0..n).all(|j| done[j] || !self.less[j][k])).expect("order has a cycle");
            done[k] = true;
            out.push(k);
        }
        out
    }

    pub fn solve(&self) -> Result<TriangularSolution> {
        self.solve_in_order(&self.linear_extension())
    }

    /// Solves processing upper indices in the given linear extension.
    pub fn solve_in_order(&self, order: &[usize]) -> Result<TriangularSolution> {
        self.validate()?;
        let n = self.len();
        let mut p = vec![vec![LaurentPoly::zero(); n]; n];
        let mut known = vec![false; n];
        for &h in order {
            if (0..n).any(|j| self.less[j][h] && !known[j]) {
                return Err(Error::Consistency("supplied order is not a linear extension".into()));
            }
            p[h][h] = LaurentPoly::one();
            for hp in 0..n {
                if !self.less[hp][h] {
                    continue;
                }
                let mut f = LaurentPoly::zero();
                for hpp in 0..n {
                    if self.le(hp, hpp) && self.less[hpp][h] {
                        f += &(&p[hp][hpp].bar() * &self.r[hpp][h]);
                    }
                }
                if f.bar() != -&f {
                    return Err(Error::Consistency(format!("recursion term for ({hp}, {h}) is not bar-antisymmetric")));
                }
                if !f.coeff(0).is_zero() {
                    return Err(Error::ConstantObstruction { lower: hp, upper: h });
                }
                p[hp][h] = f.negative_part();
            }
            known[h] = true;
        }
        Ok(TriangularSolution { p })
    }

    /// Checks the three conclusions of the lemma term by term.
    pub fn verify(&self, sol: &TriangularSolution) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let pab = &sol.p[a][b];
                if a == b {
                    if !pab.is_one() {
                        return Err(Error::BadDiagonal(a));
                    }
                    continue;
                }
                if !self.le(a, b) {
                    if !pab.is_zero() {
                        return Err(Error::Consistency(format!("p is nonzero off the order at ({a}, {b})")));
                    }
                    continue;
                }
                if !pab.in_strict_negative_integral() {
                    return Err(Error::Consistency(format!("p[{a}][{b}] = {pab} is not in v^-1 Z[v^-1]")));
                }
                let mut s = LaurentPoly::zero();
                for c in 0..n {
                    if self.le(a, c) && self.le(c, b) {
                        s += &(&sol.p[a][c].bar() * &self.r[c][b]);
                    }
                }
                if &s != pab {
                    return Err(Error::Consistency(format!("fixed-point identity fails at ({a}, {b})")));
                }
            }
        }
        Ok(())
    }
}

impl TriangularSolution {
    /// Canonical coefficients in family terms: `c[a][b]` is the coefficient
    /// of `B_b` in `C_a` (for a system built by `from_bar_action`).
    pub fn canonical(&self) -> Vec<Vec<LaurentPoly>> {
        let n = self.p.len();
        (0..n).map(|a| (0..n).map(|b| self.p[a][b].clone()).collect()).collect()
    }
}

/// Given the bar action on `B` (as in `from_bar_action`) and a new basis
/// `C_a = sum_b c[a][b] B_b`, unitriangular for `family_less`, returns the
/// bar action expressed in `C`.
pub fn transported_bar_action(
    family_less: &[Vec<bool>],
    bar_coeff: &[Vec<LaurentPoly>],
    c: &[Vec<LaurentPoly>],
) -> Result<Vec<Vec<LaurentPoly>>> {
    let n = c.len();
    // bar(C_a) in B: sum_b bar(c[a][b]) bar(B_b)
    let mut in_b = vec![vec![LaurentPoly::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            if c[a][b].is_zero() {
                continue;
            }
            let cb = c[a][b].bar();
            for d in 0..n {
                if !bar_coeff[b][d].is_zero() {
                    in_b[a][d] += &(&cb * &bar_coeff[b][d]);
                }
            }
        }
    }
    // rewrite in C, peeling from the top of the family order
    let fam_desc = TriangularSystem::from_bar_action(family_less, bar_coeff).linear_extension();
    let mut out = vec![vec![LaurentPoly::zero(); n]; n];
    for a in 0..n {
        let mut rem = in_b[a].clone();
        for &b in &fam_desc {
            let coef = rem[b].clone();
            if coef.is_zero() {
                continue;
            }
            for d in 0..n {
                if !c[b][d].is_zero() {
                    rem[d] = &rem[d] - &(&coef * &c[b][d]);
                }
            }
            out[a][b] = coef;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return Err(Error::Consistency("bar image does not lie in the span".into()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(pairs: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(pairs)
    }

    fn chain(r01: LaurentPoly) -> TriangularSystem {
        let less = vec![vec![false, true], vec![false, false]];
        let r = vec![vec![LaurentPoly::one(), r01], vec![LaurentPoly::zero(), LaurentPoly::one()]];
        TriangularSystem::new(less, r)
    }

    #[test]
    fn identity_system() {
        let less = vec![vec![false, true, true], vec![false, false, true], vec![false, false, false]];
        let sys = TriangularSystem::identity(less);
        sys.validate().unwrap();
        let sol = sys.solve().unwrap();
        sys.verify(&sol).unwrap();
        assert_eq!(sol.p, sys.r);
    }

    #[test]
    fn two_chain() {
        let sys = chain(lp(&[(1, 1), (-1, -1)]));
        sys.validate().unwrap();
        let sol = sys.solve().unwrap();
        sys.verify(&sol).unwrap();
        assert_eq!(sol.p[0][1], lp(&[(-1, -1)]));
        assert_eq!(chain(lp(&[(1, 1)])).validate(), Err(Error::BadInvolution { lower: 0, upper: 1 }));
        let mut bad = chain(LaurentPoly::zero());
        bad.r[1][1] = LaurentPoly::int(2);
        assert_eq!(bad.validate(), Err(Error::BadDiagonal(1)));
    }

    #[test]
    fn bar_action_round_trip() {
        // family order 0 < 1; bar(B1) = B1 + (v^-1 - v) B0
        let fam_less = vec![vec![false, true], vec![false, false]];
        let bar = vec![vec![LaurentPoly::one(), LaurentPoly::zero()], vec![lp(&[(-1, 1), (1, -1)]), LaurentPoly::one()]];
        let sys = TriangularSystem::from_bar_action(&fam_less, &bar);
        let sol = sys.solve().unwrap();
        sys.verify(&sol).unwrap();
        let c = sol.canonical();
        // C1 = B1 + v^-1 B0
        assert_eq!(c[1][0], lp(&[(-1, 1)]));
        let t = transported_bar_action(&fam_less, &bar, &c).unwrap();
        let ident = TriangularSystem::identity(sys.less.clone());
        assert_eq!(t, ident.r);
    }
}

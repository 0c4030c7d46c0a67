//! Partitions, Kostka numbers and characters of symmetric groups.
//!
//! `kostka(shape, content)` counts semistandard tableaux. The permutation
//! module `M^lambda` decomposes as `sum_mu K(mu, lambda) S^mu`, so Specht
//! characters come from a unitriangular solve against permutation
//! characters.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Partition(pub Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Partition {
        Partition(vec![])
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// `self` dominates `o` (same size assumed).
    pub fn dominates(&self, o: &Partition) -> bool {
        let (mut a, mut b) = (0u32, 0u32);
        for i in 0..self.len().max(o.len()) {
            a += self.0.get(i).copied().unwrap_or(0);
            b += o.0.get(i).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Multiplicity of each part size, as `(part, count)` pairs.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &x in &self.0 {
            match out.last_mut() {
                Some((y, c)) if *y == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// Order of the centraliser of a permutation of cycle type `self`.
    pub fn centralizer_order(&self) -> u128 {
        self.multiplicities().iter().map(|&(i, m)| (i as u128).pow(m) * factorial(m as u64)).product()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Partitions of `n` in decreasing lexicographic order, starting with `(n)`.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of semistandard tableaux of shape `shape` and content `content`
/// (`content` may be any composition).
pub fn kostka(shape: &Partition, content: &[u32]) -> u64 {
    if shape.size() != content.iter().sum::<u32>() {
        return 0;
    }
    let mut memo = HashMap::new();
    kostka_rec(&shape.0, content, &mut memo)
}

// Removes horizontal strips of size content[last] from the shape.
fn kostka_rec(shape: &[u32], content: &[u32], memo: &mut HashMap<(Vec<u32>, usize), u64>) -> u64 {
    let Some((&last, rest)) = content.split_last() else {
        return u64::from(shape.iter().all(|&x| x == 0));
    };
    let key = (shape.to_vec(), content.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    // choose inner shape nu with shape/nu a horizontal strip of size `last`:
    // shape[i+1] <= nu[i] <= shape[i]
    let n = shape.len();
    let mut total = 0;
    let mut nu = vec![0u32; n];
    fn strips(i: usize, shape: &[u32], left: u32, nu: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if i == shape.len() {
            if left == 0 {
                f(nu);
            }
            return;
        }
        let lo = shape.get(i + 1).copied().unwrap_or(0);
        for x in lo..=shape[i] {
            let take = shape[i] - x;
            if take > left {
                continue;
            }
            nu[i] = x;
            strips(i + 1, shape, left - take, nu, f);
        }
    }
    let mut inners = Vec::new();
    strips(0, shape, last, &mut nu, &mut |v| inners.push(v.to_vec()));
    for inner in inners {
        total += kostka_rec(&inner, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Character of the permutation module `M^lambda` (a composition is
/// allowed) at a permutation of cycle type `mu`: the number of ways to
/// distribute the cycles into rows of the prescribed lengths.
pub fn perm_character(lambda: &[u32], mu: &Partition) -> i64 {
    if lambda.iter().sum::<u32>() != mu.size() {
        return 0;
    }
    let mut memo = HashMap::new();
    fn go(cycles: &[u32], cap: Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), i64>) -> i64 {
        let Some((&c, rest)) = cycles.split_first() else {
            return 1;
        };
        let key = (cycles.len(), cap.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut total = 0;
        for i in 0..cap.len() {
            if cap[i] >= c {
                let mut next = cap.clone();
                next[i] -= c;
                total += go(rest, next, memo);
            }
        }
        memo.insert(key, total);
        total
    }
    go(&mu.0, lambda.to_vec(), &mut memo)
}

/// Irreducible character `chi^lambda` at cycle type `mu`, by solving
/// `t'_lambda = sum_nu K(nu, lambda) t_nu` from the top of dominance.
pub fn specht_character(lambda: &Partition, mu: &Partition) -> i64 {
    let n = lambda.size();
    let parts = partitions(n);
    let mut values: HashMap<Partition, i64> = HashMap::new();
    // decreasing lex order refines decreasing dominance
    for la in &parts {
        let mut v = perm_character(&la.0, mu);
        for nu in &parts {
            if nu == la {
                break;
            }
            let k = kostka(nu, &la.0) as i64;
            if k != 0 {
                v -= k * values[nu];
            }
        }
        if la == lambda {
            return v;
        }
        values.insert(la.clone(), v);
    }
    unreachable!("lambda is a partition of its own size")
}

/// Character table `[lambda][mu]` over partitions of `n` in decreasing lex order.
pub fn character_table(n: u32) -> Vec<Vec<i64>> {
    let ps = partitions(n);
    ps.iter().map(|la| ps.iter().map(|mu| specht_character(la, mu)).collect()).collect()
}

/// Independent oracle: characters from explicit permutation actions on
/// tabloids and the determinantal formula
/// `chi^lambda = sum_sigma sgn(sigma) char(M^{lambda + delta - sigma(delta)})`.
pub mod brute {
    use super::*;

    /// A permutation of `0..n` with the given cycle type.
    pub fn permutation_of_type(mu: &Partition) -> Vec<usize> {
        let n = mu.size() as usize;
        let mut g = vec![0; n];
        let mut start = 0;
        for &c in &mu.0 {
            let c = c as usize;
            for k in 0..c {
                g[start + k] = start + (k + 1) % c;
            }
            start += c;
        }
        g
    }

    /// Trace of `g` on the permutation module of row lengths `comp`:
    /// the number of tabloids fixed by `g`.
    pub fn fixed_tabloids(comp: &[u32], g: &[usize]) -> i64 {
        let n = g.len();
        // a tabloid is a row label per point
        let mut count = 0;
        let mut label = vec![0usize; n];
        fn go(i: usize, comp: &[u32], used: &mut Vec<u32>, label: &mut Vec<usize>, g: &[usize], count: &mut i64) {
            if i == label.len() {
                if (0..label.len()).all(|x| label[g[x]] == label[x]) {
                    *count += 1;
                }
                return;
            }
            for r in 0..comp.len() {
                if used[r] < comp[r] {
                    used[r] += 1;
                    label[i] = r;
                    go(i + 1, comp, used, label, g, count);
                    used[r] -= 1;
                }
            }
        }
        let mut used = vec![0u32; comp.len()];
        go(0, comp, &mut used, &mut label, g, &mut count);
        count
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn sign(p: &[usize]) -> i64 {
        let mut s = 1;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    pub fn character(lambda: &Partition, mu: &Partition) -> i64 {
        let l = lambda.len();
        let g = permutation_of_type(mu);
        let mut total = 0;
        for sigma in permutations(l) {
            let comp: Option<Vec<u32>> = (0..l)
                .map(|i| {
                    let x = lambda.0[i] as i64 + (l - 1 - i) as i64 - (l - 1 - sigma[i]) as i64;
                    if x < 0 {
                        None
                    } else {
                        Some(x as u32)
                    }
                })
                .collect();
            if let Some(c) = comp {
                total += sign(&sigma) * fixed_tabloids(&c, &g);
            }
        }
        total
    }

    pub fn character_table(n: u32) -> Vec<Vec<i64>> {
        let ps = partitions(n);
        ps.iter().map(|la| ps.iter().map(|mu| character(la, mu)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn kostka_examples() {
        for n in 1..=5 {
            for la in partitions(n) {
                assert_eq!(kostka(&la, &la.0), 1);
            }
        }
        assert_eq!(kostka(&pt(&[2, 1]), &[1, 1, 1]), 2);
        assert_eq!(kostka(&pt(&[1, 1]), &[2]), 0);
    }

    #[test]
    fn kostka_is_dominance_unitriangular() {
        for n in 1..=5 {
            for la in partitions(n) {
                for mu in partitions(n) {
                    if kostka(&la, &mu.0) != 0 {
                        assert!(la.dominates(&mu), "{la} {mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_characters() {
        for n in 1..=5 {
            let one_n = Partition(vec![1; n as usize]);
            for mu in partitions(n) {
                assert_eq!(perm_character(&[n], &mu), 1);
            }
            assert_eq!(perm_character(&one_n.0, &one_n), factorial(n as u64) as i64);
        }
        assert_eq!(perm_character(&[2, 1], &pt(&[2, 1])), 1);
    }

    #[test]
    fn specht_examples() {
        let s3: Vec<Partition> = vec![pt(&[1, 1, 1]), pt(&[2, 1]), pt(&[3])];
        let vals: Vec<i64> = s3.iter().map(|mu| specht_character(&pt(&[2, 1]), mu)).collect();
        assert_eq!(vals, vec![2, 0, -1]);
        assert_eq!(specht_character(&pt(&[1, 1]), &pt(&[2])), -1);
        for mu in partitions(4) {
            assert_eq!(specht_character(&pt(&[4]), &mu), 1);
        }
    }

    #[test]
    fn matches_brute_force_tables() {
        for n in 1..=4 {
            assert_eq!(character_table(n), brute::character_table(n));
        }
    }

    #[test]
    fn orthogonality() {
        for n in 1..=5 {
            let ps = partitions(n);
            let t = character_table(n);
            for (a, mu) in ps.iter().enumerate() {
                for (b, nu) in ps.iter().enumerate() {
                    let s: i64 = (0..ps.len()).map(|l| t[l][a] * t[l][b]).sum();
                    let expect = if a == b { mu.centralizer_order() as i64 } else { 0 };
                    assert_eq!(s, expect, "columns {mu} {nu}");
                    // rows with class sizes
                    let r: i128 = (0..ps.len())
                        .map(|c| t[a][c] as i128 * t[b][c] as i128 * (factorial(n as u64) / ps[c].centralizer_order()) as i128)
                        .sum();
                    let expect = if a == b { factorial(n as u64) as i128 } else { 0 };
                    assert_eq!(r, expect);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permutation_character_decomposes(n in 1u32..6, a in 0usize..7, b in 0usize..7) {
            let ps = partitions(n);
            let la = &ps[a % ps.len()];
            let mu = &ps[b % ps.len()];
            let rhs: i64 = ps.iter().map(|nu| kostka(nu, &la.0) as i64 * specht_character(nu, mu)).sum();
            prop_assert_eq!(perm_character(&la.0, mu), rhs);
        }
    }
}

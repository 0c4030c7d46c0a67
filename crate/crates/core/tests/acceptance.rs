//! Acceptance suite. Prints one line per criterion and exits nonzero if an
//! attainable criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hallcanon::canon::{run_canonical, PbwFamily, Word};
use hallcanon::cyclicq::CyclicAlgebra;
use hallcanon::dynkin::{Dynkin, DynkinAlgebra, Phi};
use hallcanon::ffield::is_prime;
use hallcanon::ffrep::{subrep_count, DimVector, Quiver};
use hallcanon::hallalg::{divided_power_word, read_cache_file, serre_check, Config, Family, HallAlgebra, HallPolyEntry, CACHE_FILE};
use hallcanon::kronecker::{check_characters, check_kostka, check_regular_sum, Instance, KronAlgebra};
use hallcanon::laurent::rat;
use hallcanon::symchar::{brute, partitions, specht_character, Partition};
use hallcanon::{LaurentPoly, Result};

const LIMIT_1: Duration = Duration::from_secs(10);
const LIMIT_2: Duration = Duration::from_secs(60);
const LIMIT_4: Duration = Duration::from_secs(120);
const LIMIT_5: Duration = Duration::from_secs(300);
const LIMIT_6: Duration = Duration::from_secs(300);
/// Order of the Gram-head expansion in criterion 7.
const GRAM_ORDER: u32 = 6;

struct Outcome {
    ok: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { ok: true, lines: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        let name = name.into();
        if !ok {
            self.ok = false;
            self.lines.push(format!("failed: {name}"));
        }
    }

    fn result(&mut self, name: impl Into<String>, r: Result<()>) {
        let name = name.into();
        if let Err(e) = &r {
            self.lines.push(format!("{name}: {e}"));
        }
        self.check(name, r.is_ok());
    }

    fn note(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn within(&mut self, t: Instant, limit: Duration) {
        let took = t.elapsed();
        self.note(format!("runtime {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()));
        self.check("runtime", took < limit);
    }

    fn instances(&mut self, list: &[Instance]) {
        for i in list {
            self.check(i.name.clone(), i.ok);
        }
    }
}

fn dv(v: &[u32]) -> DimVector {
    DimVector(v.to_vec())
}

fn lp(pairs: &[(i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_int_terms(pairs)
}

fn config(cache: &Path) -> Config {
    Config { cache_dir: Some(cache.to_path_buf()), ..Config::default() }
}

/// Nonzero dimension vectors with `n` entries and total at most `max`.
fn weights(n: usize, max: u32) -> Vec<DimVector> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..=max).map(move |k| [v.clone(), vec![k]].concat())).filter(|v| v.iter().sum::<u32>() <= max).collect();
    }
    out.into_iter().filter(|v| v.iter().any(|&x| x > 0)).map(DimVector).collect()
}

fn criterion_1(cache: &Path) -> (Outcome, bool) {
    let mut o = Outcome::new();
    let t = Instant::now();
    let a = DynkinAlgebra::new(Quiver::parse("1->2,2->3").unwrap(), config(cache)).unwrap();
    let f: &Dynkin = a.fam();
    let m = |parts: &[&[u32]]| {
        let v: Vec<DimVector> = parts.iter().map(|b| dv(b)).collect();
        f.phi(&v.iter().map(|d| (d, 1)).collect::<Vec<_>>()).unwrap()
    };
    let m111 = m(&[&[1, 1, 1]]);
    let m110 = m(&[&[1, 1, 0], &[0, 0, 1]]);
    let m011 = m(&[&[1, 0, 0], &[0, 1, 1]]);
    let ss = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    let g = a.alg.generic();
    let expand = |w: &[(usize, u32)]| a.pbw_expand(&divided_power_word(&g, w).unwrap()).unwrap();
    let one = lp(&[(0, 1)]);
    let displayed: Vec<(Word, BTreeMap<Phi, LaurentPoly>)> = vec![
        (vec![(0, 1), (1, 1), (2, 1)], BTreeMap::from([(m111.clone(), one.clone()), (m110.clone(), lp(&[(-2, 1)])), (m011.clone(), lp(&[(-2, 1)])), (ss.clone(), lp(&[(-3, 1)]))])),
        (vec![(2, 1), (0, 1), (1, 1)], BTreeMap::from([(m110.clone(), one.clone()), (ss.clone(), lp(&[(-1, 1)]))])),
        (vec![(1, 1), (2, 1), (0, 1)], BTreeMap::from([(m011.clone(), one.clone()), (ss.clone(), lp(&[(-1, 1)]))])),
        (vec![(2, 1), (1, 1), (0, 1)], BTreeMap::from([(ss.clone(), one.clone())])),
    ];
    let names = ["u1u2u3", "u3u1u2", "u2u3u1", "u3u2u1"];
    let mut typo_line_fails = false;
    let mut computed = Vec::new();
    for ((w, want), name) in displayed.iter().zip(names) {
        let got = expand(w);
        if name == "u1u2u3" {
            typo_line_fails = got != *want;
            if typo_line_fails {
                let shown: Vec<String> = got.iter().map(|(l, c)| format!("{c}<{}>", f.label_text(l))).collect();
                o.note(format!("u1u2u3 computed as {}", shown.join(" + ")));
            }
        }
        o.check(format!("{name} matches the displayed expansion"), got == *want);
        computed.push(got);
    }
    match a.canonical_basis(&dv(&[1, 1, 1])) {
        Ok(cb) => {
            o.check("four canonical elements", cb.len() == 4);
            for (phi, exp) in cb {
                let ok = computed.iter().any(|c| *c == exp && c.get(&phi) == Some(&one));
                o.check(format!("canonical element {} equals its monomial", f.label_text(&phi)), ok);
            }
        }
        Err(e) => o.result("canonical basis", Err(e)),
    }
    o.within(t, LIMIT_1);
    (o, typo_line_fails)
}

/// Runs every weight of one family: the solver conclusions, double
/// application (criterion 2), Gram heads and bar-invariance (criterion 7).
fn sweep<P: PbwFamily>(tag: &str, fam: &P, nus: &[DimVector], c2: &mut Outcome, c7: &mut Outcome) -> usize {
    let mut elements = 0;
    for nu in nus {
        let run = match run_canonical(fam, nu) {
            Ok(r) => r,
            Err(e) => {
                c2.result(format!("{tag} {nu}"), Err(e));
                continue;
            }
        };
        elements += run.elements.len();
        c2.result(format!("{tag} {nu} system"), run.data.system.validate());
        c2.result(format!("{tag} {nu} conclusions"), run.data.system.verify(&run.data.solution));
        for (name, r) in run.checks(fam.alg(), GRAM_ORDER) {
            let target = if name == "double-application" { &mut *c2 } else { &mut *c7 };
            target.result(format!("{tag} {nu} {name}"), r);
        }
    }
    elements
}

fn criteria_2_and_7(cache: &Path) -> (Outcome, Outcome) {
    let mut c2 = Outcome::new();
    let mut c7 = Outcome::new();
    let t = Instant::now();
    let mut count = 0;
    for (tag, desc) in [("A2", "1->2"), ("A3", "1->2,2->3")] {
        let a = DynkinAlgebra::new(Quiver::parse(desc).unwrap(), config(cache)).unwrap();
        count += sweep(tag, &a, &weights(a.alg.quiver().n(), 4), &mut c2, &mut c7);
    }
    for n in [1, 2] {
        let a = CyclicAlgebra::new(n, config(cache)).unwrap();
        count += sweep(&format!("cyclic n={n}"), &a, &weights(n as usize + 1, 4), &mut c2, &mut c7);
    }
    let k = KronAlgebra::new(config(cache)).unwrap();
    count += sweep("Kronecker", &k, &weights(2, 6), &mut c2, &mut c7);
    c2.within(t, LIMIT_2);
    c7.note(format!("{count} canonical elements, Gram heads to order {GRAM_ORDER}"));
    (c2, c7)
}

fn criterion_4(cache: &Path) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let k = KronAlgebra::new(config(cache)).unwrap();
    match check_regular_sum(&k, 3, &[2, 3, 5]) {
        Ok(list) => {
            o.note(format!("{} instances", list.len()));
            o.instances(&list);
        }
        Err(e) => o.result("regular sum", Err(e)),
    }
    o.within(t, LIMIT_4);
    o
}

fn criterion_5(cache: &Path) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let k = KronAlgebra::new(config(cache)).unwrap();
    let mut total = 0;
    for p in [3, 5] {
        for n in 1..=4 {
            match check_kostka(&k.alg, p, n) {
                Ok(list) => {
                    total += list.len();
                    o.instances(&list);
                }
                Err(e) => o.result(format!("kostka p={p} n={n}"), Err(e)),
            }
        }
    }
    o.note(format!("{total} instances"));
    o.within(t, LIMIT_5);
    o
}

fn criterion_6(cache: &Path) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let k = KronAlgebra::new(config(cache)).unwrap();
    let mut total = 0;
    for p in [2, 3] {
        for n in 1..=4 {
            match check_characters(&k.alg, p, n) {
                Ok(list) => {
                    total += list.len();
                    o.instances(&list);
                }
                Err(e) => o.result(format!("characters p={p} n={n}"), Err(e)),
            }
        }
    }
    o.note(format!("{total} instances"));
    o.within(t, LIMIT_6);
    o
}

fn criterion_8(cache: &Path) -> Outcome {
    let mut o = Outcome::new();
    for (tag, desc) in [("A2", "1->2"), ("A3", "1->2,2->3")] {
        let a = DynkinAlgebra::new(Quiver::parse(desc).unwrap(), config(cache)).unwrap();
        o.check(tag, matches!(serre_check(&a.alg), Ok(true)));
    }
    let k = KronAlgebra::new(config(cache)).unwrap();
    o.check("Kronecker", matches!(serre_check(&k.alg), Ok(true)));
    for n in 1..=3 {
        let a = CyclicAlgebra::new(n, config(cache)).unwrap();
        o.check(format!("cyclic n={n}"), matches!(serre_check(&a.alg), Ok(true)));
    }
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    for n in [3, 4] {
        let ps = partitions(n);
        let table = brute::character_table(n);
        for (i, la) in ps.iter().enumerate() {
            for (j, mu) in ps.iter().enumerate() {
                o.check(format!("S{n} chi^{la}({mu})"), specht_character(la, mu) == table[i][j]);
            }
        }
    }
    for m in 1..=5 {
        let ps = partitions(m);
        for mu in &ps {
            for nu in &ps {
                let s: i64 = ps.iter().map(|la| specht_character(la, mu) * specht_character(la, nu)).sum();
                let want = if mu == nu { Partition::centralizer_order(mu) as i64 } else { 0 };
                o.check(format!("column orthogonality m={m} {mu} {nu}"), s == want);
            }
        }
    }
    o
}

/// Every persisted polynomial of one quiver against `subrep_count` at the
/// smallest prime not used to build it.
fn oracle<F: Family>(alg: &HallAlgebra<F>, entries: &[&HallPolyEntry], o: &mut Outcome) -> usize {
    let fam = &alg.fam;
    let q = fam.quiver();
    let same = |a: &hallcanon::ffrep::QuiverRep, b: &hallcanon::ffrep::QuiverRep| match (fam.classify(a), fam.classify(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    };
    let mut checked = 0;
    for e in entries {
        let parsed = (serde_json::from_value::<F::Label>(e.key.quot.clone()), serde_json::from_value::<F::Label>(e.key.sub.clone()), serde_json::from_value::<F::Label>(e.key.total.clone()));
        let (Ok(x), Ok(y), Ok(t)) = parsed else {
            o.check(format!("unreadable entry {:?}", e.key), false);
            continue;
        };
        let name = format!("{}: {} | {} in {}", q.key(), fam.label_text(&x), fam.label_text(&y), fam.label_text(&t));
        let poly = match e.polynomial() {
            Ok(p) => p,
            Err(err) => {
                o.result(name, Err(err));
                continue;
            }
        };
        let held = (2..200u32).filter(|&p| is_prime(p) && !e.primes.contains(&p)).find(|&p| [&x, &y, &t].iter().all(|l| alg.representative(l, p).is_some()));
        let Some(p) = held else {
            o.check(format!("{name}: no held-out prime"), false);
            continue;
        };
        let (mt, my, mx) = (alg.representative(&t, p).unwrap(), alg.representative(&y, p).unwrap(), alg.representative(&x, p).unwrap());
        match subrep_count(q, &mt, &my, &mx, alg.cfg.budget_subspaces, &same) {
            Ok(n) => o.check(format!("{name} at p={p}"), poly.eval_int(p as i64) == rat(n as i64)),
            Err(err) => o.result(format!("{name} at p={p}"), Err(err)),
        }
        checked += 1;
    }
    checked
}

fn criterion_3(cache: &Path) -> Outcome {
    let mut o = Outcome::new();
    let entries = read_cache_file(&cache.join(CACHE_FILE)).unwrap();
    let by_quiver = |key: &str| -> Vec<&HallPolyEntry> { entries.iter().filter(|e| e.key.quiver == key).collect() };
    let mut checked = 0;
    let mut keys = Vec::new();
    for desc in ["1->2", "1->2,2->3"] {
        let a = DynkinAlgebra::new(Quiver::parse(desc).unwrap(), Config::default()).unwrap();
        keys.push(a.alg.quiver().key());
        checked += oracle(&a.alg, &by_quiver(&a.alg.quiver().key()), &mut o);
    }
    for n in 1..=3 {
        let a = CyclicAlgebra::new(n, Config::default()).unwrap();
        keys.push(a.alg.quiver().key());
        checked += oracle(&a.alg, &by_quiver(&a.alg.quiver().key()), &mut o);
    }
    let k = KronAlgebra::new(Config::default()).unwrap();
    keys.push(k.alg.quiver().key());
    checked += oracle(&k.alg, &by_quiver(&k.alg.quiver().key()), &mut o);
    let stray = entries.iter().filter(|e| !keys.contains(&e.key.quiver)).count();
    o.check("every cache entry belongs to a known quiver", stray == 0);
    o.check("cache is nonempty", checked > 0);
    o.note(format!("{checked} of {} cached polynomials checked", entries.len()));
    o
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hallcanon-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn main() {
    let verbose = std::env::var_os("HALLCANON_VERBOSE").is_some();
    let cache = scratch();
    let t = Instant::now();
    let (c1, typo) = criterion_1(&cache);
    let (c2, c7) = criteria_2_and_7(&cache);
    let c4 = criterion_4(&cache);
    let c5 = criterion_5(&cache);
    let c6 = criterion_6(&cache);
    let c8 = criterion_8(&cache);
    let c9 = criterion_9();
    let c3 = criterion_3(&cache);
    let _ = std::fs::remove_dir_all(&cache);
    let titles = [
        "A3 example reproduction",
        "triangular solver on generated systems",
        "Hall polynomials against brute force",
        "Kronecker regular sum",
        "Kostka identity",
        "character identities",
        "almost orthonormality and bar invariance",
        "Serre relations",
        "symmetric group characters",
    ];
    let all = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    let mut unexpected = Vec::new();
    for (i, (o, title)) in all.iter().zip(titles).enumerate() {
        println!("criterion {}: {} {title}", i + 1, if o.ok { "PASS" } else { "FAIL" });
        let shown: Vec<&String> = if verbose || !o.ok { o.lines.iter().collect() } else { o.lines.iter().filter(|l| !l.starts_with("failed")).collect() };
        for l in shown {
            println!("    {l}");
        }
        // criterion 1 fails only on the displayed u1u2u3 coefficients
        let known = i == 0 && typo && o.lines.iter().filter(|l| l.starts_with("failed")).count() == 1;
        if !o.ok && !known {
            unexpected.push(i + 1);
        }
    }
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}

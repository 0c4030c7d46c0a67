//! `hallcanon`: canonical bases, Hall polynomials and identity checks from
//! the command line.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hallcanon::canon::{bracket_coefficients, run_canonical, PbwFamily};
use hallcanon::cyclicq::CyclicAlgebra;
use hallcanon::dynkin::DynkinAlgebra;
use hallcanon::ffrep::{DimVector, Quiver};
use hallcanon::hallalg::{serre_check, Config, Family, HallAlgebra};
use hallcanon::kronecker::{check_characters, check_kostka, check_regular_sum, KronAlgebra};
use hallcanon::{Error, LaurentPoly, Poly, Result};

#[derive(Parser, Debug)]
#[command(name = "hallcanon", version, about = "Hall algebras of quivers over finite fields and their canonical bases")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
struct Opts {
    /// Quiver family.
    #[arg(long, global = true, value_enum, default_value_t = FamilyKind::Dynkin)]
    family: FamilyKind,
    /// Arrows such as "1->2,2->3" (Dynkin family).
    #[arg(long, global = true)]
    quiver: Option<String>,
    /// The cyclic quiver has vertices 0..=n.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Dimension vector, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    dim: Option<Vec<u32>>,
    /// Largest weight (or partition size) swept by `verify`.
    #[arg(long, global = true, default_value_t = 3)]
    max_weight: u32,
    /// Primes: the interpolation ladder, and the primes checked by `verify`.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u32>>,
    /// Directory of the persistent Hall-polynomial cache.
    #[arg(long, global = true, env = "HALLCANON_CACHE")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Table)]
    out: OutFormat,
    /// Cap on enumerated subspace tuples per count.
    #[arg(long, global = true)]
    budget_subspaces: Option<u128>,
    /// Cap on enumerated endomorphisms.
    #[arg(long, global = true)]
    budget_end: Option<u128>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Every canonical basis element of the weight given by --dim.
    Canonical,
    /// The Hall polynomial of (quotient, sub, total), with per-prime counts.
    Hall {
        #[arg(long)]
        quot: String,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        total: String,
    },
    /// Run a named identity suite.
    Verify {
        #[arg(value_enum)]
        identity: Identity,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyKind {
    Dynkin,
    Cyclic,
    Kronecker,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutFormat {
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Identity {
    RegularSum,
    Kostka,
    PermChar,
    SpechtChar,
    Serre,
    Gram,
}

#[derive(Serialize, Default)]
struct Report {
    meta: Value,
    results: Vec<Entry>,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct Entry {
    index: String,
    expansion: Vec<Term>,
}

#[derive(Serialize)]
struct Term {
    class: String,
    coeff: Vec<(i32, String, String)>,
    #[serde(skip)]
    text: String,
}

#[derive(Serialize)]
struct Check {
    name: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, r: Result<()>) -> Check {
        match r {
            Ok(()) => Check { name: name.into(), status: "pass".into(), detail: None },
            Err(e) => Check { name: name.into(), status: "fail".into(), detail: Some(e.to_string()) },
        }
    }

    fn passed(&self) -> bool {
        self.status == "pass"
    }
}

fn term(class: String, c: &LaurentPoly) -> Term {
    Term { class, coeff: c.to_triples(), text: c.to_string() }
}

fn config(o: &Opts) -> Result<Config> {
    let mut cfg = Config { cache_dir: o.cache_dir.clone(), ..Config::default() };
    if let Some(p) = &o.primes {
        if p.len() < 2 {
            return Err(Error::Usage("--primes needs at least two primes".into()));
        }
        if let Some(&bad) = p.iter().find(|&&x| !hallcanon::ffield::is_prime(x)) {
            return Err(Error::Usage(format!("{bad} is not prime")));
        }
        cfg.primes = p.clone();
    }
    for (b, slot) in [(o.budget_subspaces, &mut cfg.budget_subspaces), (o.budget_end, &mut cfg.budget_end)] {
        if let Some(b) = b {
            if b == 0 {
                return Err(Error::Usage("budgets must be positive".into()));
            }
            *slot = b;
        }
    }
    Ok(cfg)
}

fn dim_vector(o: &Opts, n: usize) -> Result<DimVector> {
    let d = o.dim.clone().ok_or_else(|| Error::Usage("--dim is required".into()))?;
    if d.len() != n {
        return Err(Error::Usage(format!("--dim has {} entries, the quiver has {n} vertices", d.len())));
    }
    if d.iter().all(|&x| x == 0) {
        return Err(Error::Usage("--dim must be nonzero".into()));
    }
    Ok(DimVector(d))
}

fn kronecker_quiver_check(o: &Opts) -> Result<()> {
    if let Some(desc) = &o.quiver {
        let q = Quiver::parse(desc)?;
        if q.n() != 2 || q.arrows.len() != 2 || q.arrows[0] != q.arrows[1] {
            return Err(Error::Usage("the Kronecker family needs two parallel arrows".into()));
        }
    }
    Ok(())
}

/// The three supported families behind one interface.
enum Fam {
    Dynkin(DynkinAlgebra),
    Cyclic(CyclicAlgebra),
    Kronecker(KronAlgebra),
}

impl Fam {
    fn build(o: &Opts) -> Result<Fam> {
        let cfg = config(o)?;
        Ok(match o.family {
            FamilyKind::Dynkin => {
                let desc = o.quiver.as_deref().ok_or_else(|| Error::Usage("--quiver is required for the Dynkin family".into()))?;
                Fam::Dynkin(DynkinAlgebra::new(Quiver::parse(desc)?, cfg)?)
            }
            FamilyKind::Cyclic => {
                let n = o.n.ok_or_else(|| Error::Usage("--n is required for the cyclic family".into()))?;
                Fam::Cyclic(CyclicAlgebra::new(n, cfg)?)
            }
            FamilyKind::Kronecker => {
                kronecker_quiver_check(o)?;
                Fam::Kronecker(KronAlgebra::new(cfg)?)
            }
        })
    }
}

fn canonical_of<P: PbwFamily>(fam: &P, nu: &DimVector, rep: &mut Report) -> Result<()> {
    let alg = fam.alg();
    let run = run_canonical(fam, nu)?;
    for (idx, x) in run.index_text.iter().zip(&run.elements) {
        let expansion = bracket_coefficients(alg, x)?.iter().map(|(l, c)| term(alg.fam.label_text(l), c)).collect();
        rep.results.push(Entry { index: idx.clone(), expansion });
    }
    for (name, r) in run.checks(alg, 6) {
        rep.checks.push(Check::new(format!("{name} {nu}"), r));
    }
    Ok(())
}

fn cmd_canonical(o: &Opts, rep: &mut Report) -> Result<()> {
    match Fam::build(o)? {
        Fam::Dynkin(a) => canonical_of(&a, &dim_vector(o, a.alg.quiver().n())?, rep),
        Fam::Cyclic(a) => canonical_of(&a, &dim_vector(o, a.alg.quiver().n())?, rep),
        Fam::Kronecker(a) => canonical_of(&a, &dim_vector(o, 2)?, rep),
    }
}

/// Reads a class label. `S<vertex>` is a simple; for Dynkin quivers
/// `M<digits>` or `M(a,b,...)` is the indecomposable of that dimension and
/// summands join with `+` and `^k`. Otherwise the label is matched against
/// the printed labels of all classes of total dimension at most 8.
fn parse_label<F: Family>(fam: &F, text: &str, dynkin: Option<&hallcanon::dynkin::Dynkin>) -> Result<F::Label>
where
    F::Label: 'static,
{
    let q = fam.quiver();
    let simple = |name: &str| -> Option<usize> { q.names.iter().position(|x| x == name) };
    let t = text.trim();
    if let Some(v) = t.strip_prefix('S').and_then(simple) {
        return Ok(fam.simple(v));
    }
    if let Some(d) = dynkin {
        let mut parts = Vec::new();
        for s in t.split('+') {
            let (body, m) = match s.split_once('^') {
                Some((b, m)) => (b, m.parse::<u32>().map_err(|_| Error::Usage(format!("bad multiplicity in '{s}'")))?),
                None => (s, 1),
            };
            let body = body.trim();
            let dims: Option<Vec<u32>> = if let Some(v) = body.strip_prefix('S').and_then(simple) {
                Some(q.simple_dim(v).0)
            } else if let Some(b) = body.strip_prefix('M') {
                let b = b.trim_start_matches('(').trim_end_matches(')');
                if b.contains(',') {
                    b.split(',').map(|x| x.trim().parse().ok()).collect()
                } else {
                    b.chars().map(|c| c.to_digit(10)).collect()
                }
            } else {
                None
            };
            match dims {
                Some(v) if v.len() == q.n() => parts.push((DimVector(v), m)),
                _ => return Err(Error::Usage(format!("cannot read '{s}' as a summand"))),
            }
        }
        let refs: Vec<(&DimVector, u32)> = parts.iter().map(|(v, m)| (v, *m)).collect();
        let phi = d.phi(&refs)?;
        // Dynkin labels are the family's own label type
        let any: &dyn std::any::Any = &phi;
        if let Some(l) = any.downcast_ref::<F::Label>() {
            return Ok(l.clone());
        }
    }
    let mut stack = vec![(0usize, vec![0u32; q.n()])];
    while let Some((i, v)) = stack.pop() {
        if i == q.n() {
            let d = DimVector(v);
            if d.total() > 0 {
                if let Some(l) = fam.classes(&d)?.into_iter().find(|l| fam.label_text(l) == t) {
                    return Ok(l);
                }
            }
            continue;
        }
        let used: u32 = v.iter().sum();
        for k in 0..=(8 - used) {
            let mut w = v.clone();
            w[i] = k;
            stack.push((i + 1, w));
        }
    }
    Err(Error::Usage(format!("unknown class '{t}'")))
}

fn poly_text(p: &Poly) -> String {
    let mut s = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero_value() {
            continue;
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        match i {
            0 => {
                let _ = write!(s, "{c}");
            }
            1 => {
                let _ = write!(s, "{c}*q");
            }
            _ => {
                let _ = write!(s, "{c}*q^{i}");
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

trait IsZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl IsZeroValue for hallcanon::laurent::Rational {
    fn is_zero_value(&self) -> bool {
        *self.numer() == 0.into()
    }
}

fn hall_of<F: Family>(alg: &HallAlgebra<F>, quot: &str, sub: &str, total: &str, dynkin: Option<&hallcanon::dynkin::Dynkin>, rep: &mut Report) -> Result<()>
where
    F::Label: 'static,
{
    let fam = &alg.fam;
    let (x, y, t) = (parse_label(fam, quot, dynkin)?, parse_label(fam, sub, dynkin)?, parse_label(fam, total, dynkin)?);
    if &fam.dim(&x) + &fam.dim(&y) != fam.dim(&t) {
        return Err(Error::Usage("dimensions of quotient and sub do not add up to the total".into()));
    }
    let poly = alg.hall_poly(&x, &y, &t)?;
    let index = format!("{} | {} in {}", fam.label_text(&x), fam.label_text(&y), fam.label_text(&t));
    let mut tm = term(fam.label_text(&t), &poly.to_laurent_q_is_v2());
    tm.text = poly_text(&poly);
    rep.results.push(Entry { index, expansion: vec![tm] });
    for &p in &alg.cfg.primes {
        let Some(counts) = alg.counts(&t, &fam.dim(&y), p)? else { continue };
        let n = counts.get(&(x.clone(), y.clone())).copied().unwrap_or(0);
        let ok = poly.eval_int(p as i64) == hallcanon::laurent::rat(n as i64);
        let r = if ok { Ok(()) } else { Err(Error::Consistency(format!("polynomial disagrees with the count {n}"))) };
        rep.checks.push(Check::new(format!("count p={p}: {n}"), r));
    }
    Ok(())
}

fn cmd_hall(o: &Opts, quot: &str, sub: &str, total: &str, rep: &mut Report) -> Result<()> {
    match Fam::build(o)? {
        Fam::Dynkin(a) => hall_of(&a.alg, quot, sub, total, Some(&a.alg.fam), rep),
        Fam::Cyclic(a) => hall_of(&a.alg, quot, sub, total, None, rep),
        Fam::Kronecker(a) => hall_of(&a.alg, quot, sub, total, None, rep),
    }
}

/// Nonzero dimension vectors with `n` entries summing to at most `max`.
fn weights_up_to(n: usize, max: u32) -> Vec<DimVector> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<u32>| (0..=max).map(move |k| [v.clone(), vec![k]].concat())).filter(|v| v.iter().sum::<u32>() <= max).collect();
    }
    let mut out: Vec<DimVector> = out.into_iter().filter(|v| v.iter().any(|&x| x > 0)).map(DimVector).collect();
    out.sort_by_key(|d| (d.total(), d.0.clone()));
    out
}

fn gram_of<P: PbwFamily>(fam: &P, o: &Opts, rep: &mut Report) -> Result<()> {
    let n = fam.alg().quiver().n();
    let weights = match &o.dim {
        Some(_) => vec![dim_vector(o, n)?],
        None => weights_up_to(n, o.max_weight),
    };
    for nu in weights {
        let run = run_canonical(fam, &nu)?;
        for (name, r) in run.checks(fam.alg(), 6) {
            if name.starts_with("gram") || name.starts_with("bar") {
                rep.checks.push(Check::new(format!("{name} {nu}"), r));
            }
        }
    }
    Ok(())
}

fn cmd_verify(o: &Opts, id: Identity, rep: &mut Report) -> Result<()> {
    let primes = o.primes.clone().unwrap_or_else(|| vec![2, 3]);
    let kron = |o: &Opts| -> Result<KronAlgebra> {
        kronecker_quiver_check(o)?;
        KronAlgebra::new(config(o)?)
    };
    let push = |rep: &mut Report, list: Vec<hallcanon::kronecker::Instance>, prefix: Option<&str>| {
        for i in list {
            if prefix.is_none_or(|p| i.name.starts_with(p)) {
                let r = if i.ok { Ok(()) } else { Err(Error::Consistency("identity fails".into())) };
                rep.checks.push(Check::new(i.name, r));
            }
        }
    };
    match id {
        Identity::RegularSum => {
            let k = kron(o)?;
            push(rep, check_regular_sum(&k, o.max_weight, &primes)?, None);
        }
        Identity::Kostka => {
            let k = kron(o)?;
            for &p in &primes {
                for n in 1..=o.max_weight {
                    push(rep, check_kostka(&k.alg, p, n)?, None);
                }
            }
        }
        Identity::PermChar | Identity::SpechtChar => {
            let k = kron(o)?;
            let prefix = if id == Identity::PermChar { "perm-char" } else { "specht-char" };
            for &p in &primes {
                for n in 1..=o.max_weight {
                    push(rep, check_characters(&k.alg, p, n)?, Some(prefix));
                }
            }
        }
        Identity::Serre => {
            let ok = match Fam::build(o)? {
                Fam::Dynkin(a) => serre_check(&a.alg)?,
                Fam::Cyclic(a) => serre_check(&a.alg)?,
                Fam::Kronecker(a) => serre_check(&a.alg)?,
            };
            let r = if ok { Ok(()) } else { Err(Error::Consistency("a Serre relation fails".into())) };
            rep.checks.push(Check::new("serre", r));
        }
        Identity::Gram => match Fam::build(o)? {
            Fam::Dynkin(a) => gram_of(&a, o, rep)?,
            Fam::Cyclic(a) => gram_of(&a, o, rep)?,
            Fam::Kronecker(a) => gram_of(&a, o, rep)?,
        },
    }
    Ok(())
}

fn table(rep: &Report) -> String {
    let mut s = String::new();
    for e in &rep.results {
        let _ = writeln!(s, "{}", e.index);
        for t in &e.expansion {
            let _ = writeln!(s, "    {:<28} {}", t.class, t.text);
        }
    }
    for c in &rep.checks {
        let _ = write!(s, "{:<5} {}", c.status, c.name);
        if let Some(d) = &c.detail {
            let _ = write!(s, ": {d}");
        }
        s.push('\n');
    }
    s
}

fn run(cli: &Cli) -> Result<Report> {
    let o = &cli.opts;
    let (command, extra) = match &cli.cmd {
        Cmd::Canonical => ("canonical", json!({})),
        Cmd::Hall { quot, sub, total } => ("hall", json!({"quot": quot, "sub": sub, "total": total})),
        Cmd::Verify { identity } => ("verify", json!({"identity": identity})),
    };
    let mut meta = serde_json::to_value(o).map_err(|e| Error::Io(e.to_string()))?;
    meta["command"] = json!(command);
    meta["args"] = extra;
    let mut rep = Report { meta, ..Report::default() };
    match &cli.cmd {
        Cmd::Canonical => cmd_canonical(o, &mut rep)?,
        Cmd::Hall { quot, sub, total } => cmd_hall(o, quot, sub, total, &mut rep)?,
        Cmd::Verify { identity } => cmd_verify(o, *identity, &mut rep)?,
    }
    Ok(rep)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(rep) => {
            match cli.opts.out {
                OutFormat::Json => println!("{}", serde_json::to_string_pretty(&rep).expect("report serialises")),
                OutFormat::Table => print!("{}", table(&rep)),
            }
            let failed = rep.checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                eprintln!("{failed} check(s) failed");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

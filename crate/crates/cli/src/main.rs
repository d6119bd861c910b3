//! `spnorm`: build, emit and check conjugation-word certificates for symplectic groups.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use spnorm::bounds::{crt_generating_set, crt_generating_set_integers, normally_generates, pi_of_set, LowerBoundCertificate};
use spnorm::decomposition::{elq_budget, factor_elq, unipotent_decompose_sr1, BudgetReport, PipelineContext};
use spnorm::reduction::{first_hessenberg, is_hessenberg, level_ideal, level_ideal_7n_split, scalar_congruence_holds, second_hessenberg, HessenbergVariant};
use spnorm::rings::{v_of_ideal, JsonInt, RingDesc};
use spnorm::search::{bfs_balls, conjugacy_closure, FiniteSp};
use spnorm::symplectic::signs::{derive_table, stored_table_n3};
use spnorm::symplectic::{random_sp, root_element, RootIndex, SpMatrix};
use spnorm::words::{verify_certificate, Certificate, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "spnorm", version, about = "Certified conjugation word norms in symplectic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the commutator relations and the sign table on random parameters
    RelationsCheck(RelationsArgs),
    /// Conjugate a matrix into first and/or second Hessenberg form
    Hessenberg(HessenbergArgs),
    /// Compute the level ideal of a matrix and its budget ledger
    LevelIdeal(LevelArgs),
    /// Emit a certificate for a short root element with parameter in the level ideal
    Certify(CertifyArgs),
    /// Factor a matrix over Z/m into unipotent pieces and root-element conjugates
    Decompose(DecomposeArgs),
    /// Write a matrix as a product of conjugates of a normally generating set
    Pipeline(PipelineArgs),
    /// Breadth-first ball sizes in a small group over F_p
    Diameter(DiameterArgs),
    /// Build a generating set with a certified lower bound on its diameter
    LowerBound(LowerBoundArgs),
    /// Re-evaluate a certificate file
    Verify(VerifyArgs),
    /// Run the pipeline on several targets and tabulate word lengths
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct MatrixSource {
    /// JSON file holding a matrix; otherwise a random one is generated
    #[arg(long)]
    input: Option<PathBuf>,
    /// Rank n of the random matrix
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Ring: `Z` or a modulus m
    #[arg(long = "mod", default_value = "210")]
    modulus: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Length of the random word of root elements
    #[arg(long, default_value_t = 40)]
    len: usize,
}

#[derive(Args)]
struct OutputArg {
    /// Write JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RelationsArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long = "mod", default_value = "101")]
    modulus: String,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    First,
    Second,
    Both,
}

#[derive(Args)]
struct HessenbergArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, value_enum, default_value = "both")]
    variant: VariantArg,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct LevelArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Also list the 7n sub-ideals
    #[arg(long)]
    split: bool,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Parameter to certify; defaults to the canonical generator of the level ideal
    #[arg(long)]
    x: Option<BigInt>,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args, Clone)]
struct SetSource {
    /// JSON file with an array of matrices; otherwise a CRT set of size k is built
    #[arg(long)]
    set: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Long root used for the CRT set
    #[arg(long, default_value = "2e1")]
    root: String,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    target: MatrixSource,
    #[command(flatten)]
    set: SetSource,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct DiameterArgs {
    /// Group as `sp<2n>f<p>`, e.g. `sp4f2`
    #[arg(long, default_value = "sp4f2")]
    group: String,
    /// `long-root`, `short-root`, `generators`, or a JSON file with matrices
    #[arg(long, default_value = "long-root")]
    set: String,
    /// Stop after this radius
    #[arg(long)]
    cutoff: Option<usize>,
    /// Write the (radius, ball size) table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct LowerBoundArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Modulus m; ignored with --primes
    #[arg(long = "mod", default_value = "30")]
    modulus: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Comma-separated primes for the integer variant
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long, default_value = "2e1")]
    root: String,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long = "mod", default_value = "210")]
    modulus: String,
    #[command(flatten)]
    set: SetSource,
    #[arg(long, default_value_t = 5)]
    targets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    len: usize,
    /// Write per-target rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Errors that map to exit status 2.
#[derive(Debug)]
struct Usage(Vec<String>);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "invalid argument: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Usage {}

/// A check that did not pass; printed as a JSON record, exit status 1.
#[derive(Debug)]
struct Failure(Value);

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Failure {}

fn fail(check: &str, detail: Value) -> anyhow::Error {
    Failure(json!({ "status": "failure", "check": check, "detail": detail })).into()
}

/// Collects configuration problems so they are reported together.
#[derive(Default)]
struct Validator(Vec<String>);

impl Validator {
    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.0.push(msg.into());
        }
    }

    fn ring(&mut self, s: &str) -> Option<RingDesc> {
        match s.parse::<RingDesc>().or_else(|_| format!("Z/{s}").parse()) {
            Ok(r) => Some(r),
            Err(e) => {
                self.0.push(format!("--mod {s}: {e}"));
                None
            }
        }
    }

    fn root(&mut self, s: &str) -> Option<RootIndex> {
        match s.parse::<RootIndex>() {
            Ok(r) => Some(r),
            Err(e) => {
                self.0.push(format!("--root {s}: {e}"));
                None
            }
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Usage(self.0).into())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

impl MatrixSource {
    fn validate(&self, v: &mut Validator, min_n: usize, finite: bool) -> Option<RingDesc> {
        if self.input.is_some() {
            return None;
        }
        v.check(self.n >= min_n, format!("--n must be at least {min_n}"));
        let ring = v.ring(&self.modulus);
        if let Some(r) = &ring {
            v.check(!finite || r.is_finite(), format!("--mod {} must be a modulus m", self.modulus));
        }
        ring
    }

    fn load(&self, ring: Option<RingDesc>, min_n: usize, finite: bool) -> Result<SpMatrix> {
        let a = match (&self.input, ring) {
            (Some(p), _) => read_json::<SpMatrix>(p)?,
            (None, Some(r)) => random_sp(self.n, &r, self.len, self.seed),
            (None, None) => bail!("no ring"),
        };
        let mut v = Validator::default();
        v.check(a.n() >= min_n, format!("matrix rank {} below {min_n}", a.n()));
        v.check(!finite || a.ring().is_finite(), "matrix must be over Z/m");
        v.finish()?;
        Ok(a)
    }
}

impl SetSource {
    fn validate(&self, v: &mut Validator) -> Option<RootIndex> {
        if self.set.is_some() {
            return None;
        }
        v.check(self.k >= 1, "--k must be positive");
        let r = v.root(&self.root);
        if let Some(r) = r {
            v.check(r.is_long(), format!("--root {r} must be a long root"));
        }
        r
    }

    fn load(&self, n: usize, ring: &RingDesc, root: Option<RootIndex>) -> Result<Vec<SpMatrix>> {
        match (&self.set, root) {
            (Some(p), _) => {
                let set: Vec<SpMatrix> = read_json(p)?;
                if set.iter().any(|a| a.n() != n || a.ring() != ring) {
                    return Err(Usage(vec!["set and target live in different groups".into()]).into());
                }
                Ok(set)
            }
            (None, Some(r)) => {
                r.validate(n).map_err(|e| Usage(vec![e.to_string()]))?;
                let cert = crt_generating_set(n, ring, self.k, &r).map_err(|e| Usage(vec![e.to_string()]))?;
                Ok(cert.set)
            }
            (None, None) => bail!("no generating set"),
        }
    }
}

fn relations_check(a: RelationsArgs) -> Result<()> {
    let mut v = Validator::default();
    v.check(a.n >= 2, "--n must be at least 2");
    let ring = v.ring(&a.modulus);
    v.finish()?;
    let ring = ring.expect("validated");
    let table = derive_table(a.n);
    let stored_match = (a.n == 3).then(|| table == stored_table_n3());
    let mut failures = Vec::new();
    let mut checked = 0usize;
    let mut rng_state = a.seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = |m: &RingDesc| {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        m.reduce(&BigInt::from((rng_state >> 33) as i64 - (1 << 30)))
    };
    for e in &table.entries {
        for _ in 0..a.samples {
            let (u, w) = (next(&ring), next(&ring));
            if !e.holds(a.n, &ring, &u, &w) {
                failures.push(json!({ "first": e.first, "second": e.second, "u": JsonInt(u), "v": JsonInt(w) }));
            }
            checked += 1;
        }
    }
    let one = ring.reduce(&BigInt::from(1));
    let mut commuting = 0usize;
    for x in RootIndex::all(a.n) {
        for y in RootIndex::all(a.n) {
            if x.add(&y, a.n).is_none() && x != y.negate() {
                commuting += 1;
                if !root_element(a.n, &ring, &x, &one).commutator(&root_element(a.n, &ring, &y, &one)).is_identity() {
                    failures.push(json!({ "first": x, "second": y, "expected": "commute" }));
                }
            }
        }
    }
    let ok = failures.is_empty() && stored_match != Some(false);
    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "status": if ok { "ok" } else { "failure" },
        "n": a.n,
        "ring": ring,
        "pairs": table.entries.len(),
        "relations_checked": checked,
        "commuting_pairs": commuting,
        "stored_table_matches": stored_match,
        "failures": failures,
    });
    if ok {
        emit(&record, None)
    } else {
        Err(Failure(record).into())
    }
}

fn hessenberg(a: HessenbergArgs) -> Result<()> {
    let mut v = Validator::default();
    let ring = a.source.validate(&mut v, 3, false);
    v.finish()?;
    let m = a.source.load(ring, 3, false)?;
    let variants: Vec<HessenbergVariant> = match a.variant {
        VariantArg::First => vec![HessenbergVariant::First],
        VariantArg::Second => vec![HessenbergVariant::Second],
        VariantArg::Both => vec![HessenbergVariant::First, HessenbergVariant::Second],
    };
    let mut results = Vec::new();
    for var in variants {
        let h = match var {
            HessenbergVariant::First => first_hessenberg(&m)?,
            HessenbergVariant::Second => second_hessenberg(&m)?,
        };
        let pattern = is_hessenberg(&h.form, var);
        let conj = h.conjugator.mul(&m).mul(&h.conjugator.inverse()) == h.form;
        if !(pattern && conj) {
            return Err(fail("hessenberg", json!({ "variant": var, "zero_pattern": pattern, "conjugation": conj })));
        }
        results.push(json!({ "variant": var, "conjugator": h.conjugator, "form": h.form }));
    }
    emit(&json!({ "schema_version": SCHEMA_VERSION, "input": m, "results": results }), a.output.out.as_deref())
}

fn level(a: LevelArgs) -> Result<()> {
    let mut v = Validator::default();
    let ring = a.source.validate(&mut v, 3, false);
    v.finish()?;
    let m = a.source.load(ring, 3, false)?;
    let li = level_ideal(&m)?;
    let vanishing = v_of_ideal(&li.ideal)?;
    let pi = pi_of_set(std::slice::from_ref(&m))?;
    let within = vanishing.is_subset_of(&pi);
    let scalar = scalar_congruence_holds(&m, &li.ideal);
    let split = if a.split {
        Some(
            level_ideal_7n_split(&m)?
                .iter()
                .flat_map(|c| c.ledger.clone())
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "matrix": m,
        "canonical_generator": JsonInt::from(&li.ideal.canonical),
        "generator_count": li.sources.len(),
        "budget": li.budget(),
        "vanishing_locus": vanishing,
        "pi": pi,
        "vanishing_within_pi": within,
        "scalar_congruence": scalar,
        "ledger": li.ledger,
        "split": split,
    });
    if !(within && scalar) {
        return Err(fail("level_ideal", record));
    }
    emit(&record, a.output.out.as_deref())
}

fn certify(a: CertifyArgs) -> Result<()> {
    let mut v = Validator::default();
    let ring = a.source.validate(&mut v, 3, false);
    v.finish()?;
    let m = a.source.load(ring, 3, false)?;
    let li = level_ideal(&m)?;
    let x = m.ring().reduce(a.x.as_ref().unwrap_or(&li.ideal.canonical));
    if !li.contains(&x) {
        return Err(fail("membership", json!({ "x": JsonInt(x), "canonical_generator": JsonInt::from(&li.ideal.canonical) })));
    }
    let w = li.certify(&x)?.with_bound_set("A");
    let target = li.target(&x);
    let budget = li.budget();
    let cert = Certificate::new(&w, std::slice::from_ref(&m), &target, budget);
    if !cert.verify() {
        return Err(fail("certificate", json!({ "length": w.len(), "budget": budget })));
    }
    emit(&cert, a.output.out.as_deref())
}

fn decompose(a: DecomposeArgs) -> Result<()> {
    let mut v = Validator::default();
    let ring = a.source.validate(&mut v, 2, true);
    v.finish()?;
    let m = a.source.load(ring, 2, true)?;
    let f = unipotent_decompose_sr1(&m)?;
    if !(f.is_well_formed() && f.product() == m) {
        return Err(fail("factorization", json!({ "well_formed": f.is_well_formed() })));
    }
    let elq = factor_elq(&m)?;
    let cert = Certificate::new(&elq.word.clone().with_bound_set("EL_Q"), &[], &m, elq_budget(m.n()));
    if !cert.verify() {
        return Err(fail("el_q_word", json!({ "length": elq.word.len(), "budget": elq.budget })));
    }
    emit(
        &json!({ "schema_version": SCHEMA_VERSION, "factorization": f, "el_q_length": elq.word.len(), "el_q_certificate": cert }),
        a.output.out.as_deref(),
    )
}

#[derive(Serialize)]
struct PipelineOutput {
    #[serde(flatten)]
    certificate: Certificate,
    budget_report: BudgetReport,
}

fn pipeline_context(set: &[SpMatrix]) -> Result<PipelineContext> {
    if set.first().is_some_and(|a| a.n() >= 3) && !normally_generates(set)? {
        let pi = pi_of_set(set)?;
        return Err(fail("normal_generation", json!({ "pi": pi })));
    }
    Ok(PipelineContext::new(set)?)
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let mut v = Validator::default();
    let ring = a.target.validate(&mut v, 3, true);
    let root = a.set.validate(&mut v);
    v.finish()?;
    let target = a.target.load(ring, 3, true)?;
    let set = a.set.load(target.n(), target.ring(), root)?;
    let mut ctx = pipeline_context(&set)?;
    let (w, report) = ctx.run(&target)?;
    let cert = Certificate::new(&w.with_bound_set("S"), &set, &target, report.bound);
    if !cert.verify() {
        return Err(fail("pipeline", json!({ "report": report })));
    }
    emit(&PipelineOutput { certificate: cert, budget_report: report }, a.output.out.as_deref())
}

fn parse_group(s: &str) -> Option<(usize, u64)> {
    let rest = s.strip_prefix("sp")?;
    let (dim, p) = rest.split_once('f')?;
    let dim: usize = dim.parse().ok()?;
    (dim % 2 == 0 && dim > 0).then_some((dim / 2, p.parse().ok()?))
}

fn diameter(a: DiameterArgs) -> Result<()> {
    let mut v = Validator::default();
    let parsed = parse_group(&a.group);
    v.check(parsed.is_some(), format!("--group {} is not of the form sp<2n>f<p>", a.group));
    let group = parsed.and_then(|(n, p)| match FiniteSp::new(n, p) {
        Ok(g) => Some(g),
        Err(e) => {
            v.0.push(e.to_string());
            None
        }
    });
    let known = ["long-root", "short-root", "generators"];
    v.check(known.contains(&a.set.as_str()) || Path::new(&a.set).exists(), format!("--set {} is neither {known:?} nor a file", a.set));
    v.finish()?;
    let g = group.expect("validated");
    let n = g.n();
    let one = BigInt::from(1);
    let seeds: Vec<u128> = match a.set.as_str() {
        "long-root" => vec![g.encode(&root_element(n, g.ring(), &RootIndex::long(1, true), &one))?],
        "short-root" if n >= 2 => vec![g.encode(&root_element(n, g.ring(), &RootIndex::short_diff(1, 2, true), &one))?],
        "short-root" => return Err(Usage(vec!["no short roots for n = 1".into()]).into()),
        "generators" => g.generators().to_vec(),
        path => read_json::<Vec<SpMatrix>>(Path::new(path))?
            .iter()
            .map(|m| g.encode(m))
            .collect::<Result<_, _>>()?,
    };
    let gens = conjugacy_closure(&g, &seeds, 4_000_000)?;
    let search = bfs_balls(&g, &gens, a.cutoff)?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["schema_version", "radius", "ball_size"])?;
        for (r, size) in &search.report.radii {
            w.write_record([SCHEMA_VERSION.to_string(), r.to_string(), size.to_string()])?;
        }
        w.flush()?;
    }
    emit(&json!({ "schema_version": SCHEMA_VERSION, "report": search.report }), a.output.out.as_deref())
}

fn lower_bound(a: LowerBoundArgs) -> Result<()> {
    let mut v = Validator::default();
    v.check(a.n >= 1, "--n must be positive");
    let root = v.root(&a.root);
    if let Some(r) = root {
        v.check(r.is_long(), format!("--root {r} must be long"));
        v.check(r.validate(a.n).is_ok(), format!("--root {r} is not a root for n = {}", a.n));
    }
    let ring = if a.primes.is_none() { v.ring(&a.modulus) } else { None };
    if let Some(r) = &ring {
        v.check(r.is_finite(), "--mod must be a modulus m (use --primes over Z)");
    }
    v.finish()?;
    let root = root.expect("validated");
    let cert: LowerBoundCertificate = match &a.primes {
        Some(ps) => crt_generating_set_integers(a.n, ps, &root).map_err(|e| Usage(vec![e.to_string()]))?,
        None => crt_generating_set(a.n, ring.as_ref().expect("validated"), a.k, &root).map_err(|e| Usage(vec![e.to_string()]))?,
    };
    if a.n >= 3 && !cert.validate()? {
        return Err(fail("lower_bound", serde_json::to_value(&cert)?));
    }
    emit(&json!({ "schema_version": SCHEMA_VERSION, "certificate": cert }), a.output.out.as_deref())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let cert: Certificate = read_json(&a.certificate)?;
    if cert.schema_version != SCHEMA_VERSION {
        return Err(fail("schema_version", json!({ "found": cert.schema_version, "expected": SCHEMA_VERSION })));
    }
    let word = cert.word();
    let ok = verify_certificate(&word, &cert.generators, &cert.claimed_target, cert.budget);
    let record = json!({
        "status": if ok { "ok" } else { "failure" },
        "check": "certificate",
        "length": word.len(),
        "budget": cert.budget,
    });
    if ok {
        emit(&record, None)
    } else {
        Err(Failure(record).into())
    }
}

fn report(a: ReportArgs) -> Result<()> {
    let mut v = Validator::default();
    v.check(a.n >= 3, "--n must be at least 3");
    let ring = v.ring(&a.modulus);
    if let Some(r) = &ring {
        v.check(r.is_finite(), "--mod must be a modulus m");
    }
    let root = a.set.validate(&mut v);
    v.check(a.targets >= 1, "--targets must be positive");
    v.finish()?;
    let ring = ring.expect("validated");
    let set = a.set.load(a.n, &ring, root)?;
    let mut ctx = pipeline_context(&set)?;
    let mut rows = Vec::new();
    for i in 0..a.targets {
        let target = random_sp(a.n, &ring, a.len, a.seed + i as u64);
        let elq = factor_elq(&target)?;
        let (w, rep) = ctx.run(&target)?;
        if !verify_certificate(&w, &set, &target, rep.bound) {
            return Err(fail("pipeline", json!({ "target": i, "report": rep })));
        }
        rows.push((i, elq.word.len(), rep));
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["schema_version", "target", "el_q_length", "word_length", "bound", "route"])?;
        for (i, elq_len, rep) in &rows {
            let route = serde_json::to_value(rep.route)?.as_str().unwrap_or_default().to_string();
            w.write_record([
                SCHEMA_VERSION.to_string(),
                i.to_string(),
                elq_len.to_string(),
                rep.actual_length.to_string(),
                rep.bound.to_string(),
                route,
            ])?;
        }
        w.flush()?;
    }
    let longest = rows.iter().map(|(_, _, r)| r.actual_length).max().unwrap_or(0);
    emit(
        &json!({
            "schema_version": SCHEMA_VERSION,
            "n": a.n,
            "ring": ring,
            "k": set.len(),
            "route": ctx.route(),
            "short_root_budget": ctx.short_root_budget(),
            "bound": ctx.bound(),
            "targets": a.targets,
            "longest_word": longest,
            "el_q_lengths": rows.iter().map(|(_, l, _)| *l).collect::<Vec<_>>(),
            "word_lengths": rows.iter().map(|(_, _, r)| r.actual_length).collect::<Vec<_>>(),
        }),
        None,
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RelationsCheck(a) => relations_check(a),
        Command::Hessenberg(a) => hessenberg(a),
        Command::LevelIdeal(a) => level(a),
        Command::Certify(a) => certify(a),
        Command::Decompose(a) => decompose(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Diameter(a) => diameter(a),
        Command::LowerBound(a) => lower_bound(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(u) = e.downcast_ref::<Usage>() {
                eprintln!("{u}");
                return ExitCode::from(2);
            }
            if let Some(Failure(record)) = e.downcast_ref::<Failure>() {
                println!("{}", serde_json::to_string_pretty(record).unwrap_or_default());
                return ExitCode::from(1);
            }
            let record = json!({ "status": "error", "message": format!("{e:#}") });
            println!("{record}");
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_group;

    #[test]
    fn group_names() {
        assert_eq!(parse_group("sp4f2"), Some((2, 2)));
        assert_eq!(parse_group("sp6f3"), Some((3, 3)));
        assert_eq!(parse_group("sp5f2"), None);
        assert_eq!(parse_group("gl4f2"), None);
        assert_eq!(parse_group("sp4"), None);
    }
}

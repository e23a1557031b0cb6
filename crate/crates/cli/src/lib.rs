//! `tbg-magic`: batch front end over `magic-core`.
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid input, 3 certificate verdict false.

pub mod cache;
pub mod envelope;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magic_core::exactnum::{format_rational, pi_over_sqrt3};
use magic_core::fredholm::{certify_first_magic_with, hs_norm_certified, Certificate, CertifyOptions, HsMode};
use magic_core::model::Potential;
use magic_core::spectra::{
    band_profile, flat_band_check, k_point, magic_angles, MagicOptions, MagicSet, TraceSource,
};
use magic_core::traces::{trace_exact_cyclo, trace_numeric, trace_oracle_walks, TraceTable};
use num_rational::BigRational;
use serde_json::{json, Value};

pub use cache::Cache;
pub use envelope::Envelope;

pub const CACHE_ENV: &str = "TBG_MAGIC_CACHE";

#[derive(Debug, Parser)]
#[command(name = "tbg-magic", version, about = "Exact traces and magic angles of the chiral TBG model")]
pub struct Cli {
    /// Potential file (JSON); defaults to the canonical potential.
    #[arg(long, global = true, value_name = "FILE")]
    pub potential: Option<PathBuf>,
    /// Directory for cached exact traces.
    #[arg(long, global = true, value_name = "DIR", env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact traces q_ℓ with σ_ℓ = q_ℓ·π/√3.
    Traces(TracesArgs),
    /// Certificate for the first real magic angle.
    Certify(CertifyArgs),
    /// Magic angles from the truncated determinant.
    Magic(MagicArgs),
    /// Smallest singular value of the truncated operator over a k grid.
    Flatband(FlatbandArgs),
    /// Lowest singular values over a k grid.
    Bands(BandsArgs),
    /// Validates a potential file and prints the completed potential.
    Potential,
}

#[derive(Debug, Args)]
pub struct TracesArgs {
    #[arg(long, default_value_t = 2)]
    pub ell_min: usize,
    #[arg(long, default_value_t = 8)]
    pub ell_max: usize,
    /// Recompute orders 2..=4 by walk enumeration and compare.
    #[arg(long)]
    pub oracle_check: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long = "window-M", default_value_t = 760)]
    pub window_m: u32,
    #[arg(long, default_value_t = 16)]
    pub taylor_n: usize,
    #[arg(long = "tail-N", default_value_t = 17)]
    pub tail_n: u32,
    /// Highest order in the derivative majorant.
    #[arg(long, default_value_t = 20)]
    pub g_order: usize,
    #[arg(long, value_enum, default_value_t = HsModeArg::Dyadic)]
    pub hs_mode: HsModeArg,
    /// Also write the certificate to FILE.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Re-verify a stored certificate instead of computing one.
    #[arg(long, value_name = "FILE", conflicts_with = "report")]
    pub recheck: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HsModeArg {
    Dyadic,
    Exact,
}

#[derive(Debug, Args)]
pub struct MagicArgs {
    #[arg(long, default_value_t = 12)]
    pub count: usize,
    #[arg(long, default_value_t = 40)]
    pub trace_order: usize,
    /// Keep complex roots.
    #[arg(long)]
    pub complex: bool,
    /// Highest order taken from exact traces; numeric traces fill the rest.
    #[arg(long, default_value_t = 20)]
    pub exact_max: usize,
    /// Window radius for numeric traces.
    #[arg(long, default_value_t = 60)]
    pub truncation: i64,
    /// Hilbert–Schmidt bound used in the root error estimate.
    #[arg(long, default_value_t = 5.5)]
    pub hs: f64,
    /// Report every root of the truncated determinant, not only those inside the certified disc.
    #[arg(long)]
    pub all_roots: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlatbandArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    #[arg(long, default_value_t = 30)]
    pub truncation: i64,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    #[arg(long, default_value_t = 5)]
    pub num: usize,
    #[arg(long, default_value_t = 30)]
    pub truncation: i64,
    /// Output format of the grid data.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
}

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Verdict(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Verdict(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Internal(_) => "internal",
            Failure::Invalid(_) => "invalid-input",
            Failure::Verdict(_) => "verdict-false",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Verdict(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<magic_core::Error> for Failure {
    fn from(e: magic_core::Error) -> Self {
        use magic_core::Error as E;
        match e {
            E::Validation(_) | E::Symmetry(_) | E::NotApplicable(_) | E::PoleHit(_) | E::PoleProximity(_) => {
                Failure::Invalid(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs with the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => 2,
            };
            let _ = writeln!(err, "{}", json!({ "error": "usage", "message": e.to_string().trim() }));
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut buf: Vec<u8> = Vec::new();
    let result = match pool(cli.jobs) {
        Ok(p) => p.install(|| dispatch(&cli, echo, &mut buf)),
        Err(f) => Err(f),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", json!({ "error": f.kind(), "message": f.message() }));
            f.code()
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Internal(format!("thread pool: {e}")))
}

fn dispatch(cli: &Cli, echo: Vec<String>, out: &mut dyn Write) -> Outcome {
    let cache = Cache::new(cli.cache.clone());
    if let Command::Certify(a) = &cli.command {
        if let Some(path) = &a.recheck {
            return recheck(path, echo, out);
        }
    }
    let p = load_potential(cli.potential.as_deref())?;
    let ctx = Ctx {
        digest: p.digest(),
        p,
        echo,
        format: cli.format,
        cache,
        start: Instant::now(),
    };
    match &cli.command {
        Command::Traces(a) => traces(&ctx, a, out),
        Command::Certify(a) => certify(&ctx, a, out),
        Command::Magic(a) => magic(&ctx, a, out),
        Command::Flatband(a) => flatband(&ctx, a, out),
        Command::Bands(a) => bands(&ctx, a, out),
        Command::Potential => potential(&ctx, out),
    }
}

struct Ctx {
    p: Potential,
    digest: String,
    echo: Vec<String>,
    format: Format,
    cache: Cache,
    start: Instant,
}

impl Ctx {
    fn envelope(&self, payload: Value) -> Envelope {
        Envelope::new(&self.digest, self.echo.clone(), self.start.elapsed().as_millis(), payload)
    }

    fn emit(&self, out: &mut dyn Write, payload: Value, csv: impl FnOnce() -> String) -> Outcome {
        let text = match self.format {
            Format::Json => self.envelope(payload).to_json() + "\n",
            Format::Csv => csv(),
        };
        write_out(out, &text)
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Internal(format!("writing output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn load_potential(path: Option<&Path>) -> Result<Potential, Failure> {
    match path {
        None => Ok(Potential::canonical()),
        Some(p) => Ok(Potential::from_json(&read_file(p)?)?),
    }
}

/// Exact `q_2..=q_max`, taken from the cache where possible.
pub fn exact_table(p: &Potential, digest: &str, max_ell: usize, cache: &Cache) -> Result<TraceTable, Failure> {
    let mut map: BTreeMap<usize, BigRational> = BTreeMap::new();
    for ell in 2..=max_ell {
        if let Some(q) = cache.lookup(digest, ell) {
            map.insert(ell, q);
        }
    }
    if map.len() < max_ell.saturating_sub(1) {
        let t = TraceTable::compute(p, max_ell)?;
        for e in &t.entries {
            cache.store(digest, e.ell, &e.q);
        }
        return Ok(t);
    }
    Ok(TraceTable::from_map(digest.to_string(), &map))
}

fn traces(ctx: &Ctx, a: &TracesArgs, out: &mut dyn Write) -> Outcome {
    if a.ell_min < 2 || a.ell_min > a.ell_max {
        return Err(Failure::Invalid(format!(
            "need 2 <= ell-min <= ell-max, got {} and {}",
            a.ell_min, a.ell_max
        )));
    }
    let rows: Vec<(usize, String, Option<bool>)> = if ctx.p.is_real() {
        let t = exact_table(&ctx.p, &ctx.digest, a.ell_max, &ctx.cache)?;
        (a.ell_min..=a.ell_max)
            .map(|l| (l, format_rational(t.q(l).expect("table is complete")), None))
            .collect()
    } else {
        // complex potentials give q in Q(ζ), which the rational cache does not hold
        (a.ell_min..=a.ell_max)
            .map(|l| Ok((l, trace_exact_cyclo(&ctx.p, l)?.to_string(), None)))
            .collect::<Result<_, Failure>>()?
    };
    let mut rows = rows;
    if a.oracle_check {
        for row in rows.iter_mut().filter(|r| r.0 <= 4) {
            let oracle = trace_oracle_walks(&ctx.p, row.0)?;
            let shown = match oracle.to_rational() {
                Some(q) if ctx.p.is_real() => format_rational(&q),
                _ => oracle.to_string(),
            };
            if shown != row.1 {
                return Err(Failure::Internal(format!(
                    "walk oracle disagrees at ell = {}: {} vs {}",
                    row.0, shown, row.1
                )));
            }
            row.2 = Some(true);
        }
    }
    let payload: Vec<Value> = rows
        .iter()
        .map(|(l, q, checked)| {
            let mut v = json!({ "ell": l, "q": q, "tau": format!("{q} * pi/sqrt(3)"), "engine": "residue" });
            if let Some(c) = checked {
                v["oracle_agrees"] = json!(c);
            }
            v
        })
        .collect();
    ctx.emit(out, Value::Array(payload), || {
        let mut s = String::from("ell,q,tau,engine\n");
        for (l, q, _) in &rows {
            let _ = writeln!(s, "{l},{q},{q} * pi/sqrt(3),residue");
        }
        s
    })
}

fn certificate_csv(c: &Certificate) -> String {
    let mut s = String::from("name,relation,bound,lo,hi,holds,gating\n");
    for (gating, list) in [(true, &c.checks), (false, &c.reference_checks)] {
        for k in list {
            let rel = serde_json::to_value(&k.relation).unwrap();
            let _ = writeln!(
                s,
                "\"{}\",{},{},{},{},{},{}",
                k.name,
                rel.as_str().unwrap_or(""),
                format_rational(&k.bound),
                format_rational(&k.value.lo),
                format_rational(&k.value.hi),
                k.holds,
                gating
            );
        }
    }
    s
}

fn certify(ctx: &Ctx, a: &CertifyArgs, out: &mut dyn Write) -> Outcome {
    let opts = CertifyOptions {
        taylor_order: a.taylor_n,
        tail_n: a.tail_n,
        g_order: a.g_order,
        ..CertifyOptions::default()
    };
    if a.window_m == 0 {
        return Err(Failure::Invalid("window-M must be positive".into()));
    }
    if opts.tail_n as usize != opts.taylor_order + 1 || opts.g_order < opts.taylor_order {
        return Err(Failure::Invalid("need tail-N = taylor-n + 1 and g-order >= taylor-n".into()));
    }
    if ctx.p != Potential::canonical() {
        return Err(Failure::Invalid(
            "the norm bound is implemented for the canonical potential only".into(),
        ));
    }
    let mode = match a.hs_mode {
        HsModeArg::Dyadic => HsMode::Dyadic,
        HsModeArg::Exact => HsMode::Exact,
    };
    let table = exact_table(&ctx.p, &ctx.digest, opts.g_order.max(opts.taylor_order), &ctx.cache)?;
    let hs = hs_norm_certified(a.window_m, mode)?;
    let cert = certify_first_magic_with(&table, &hs, &opts)?;
    if let Some(path) = &a.report {
        write_file(path, &cert.to_json())?;
    }
    let payload = serde_json::to_value(&cert).expect("certificate serializes");
    ctx.emit(out, payload, || certificate_csv(&cert))?;
    if cert.verdict {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("failed: {}", cert.failures.join("; "))))
    }
}

fn recheck(path: &Path, echo: Vec<String>, out: &mut dyn Write) -> Outcome {
    let text = read_file(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("report JSON: {e}")))?;
    // accept a bare certificate or one wrapped in an envelope
    let body = if v.get("payload").is_some() && v.get("tool").is_some() {
        v["payload"].clone()
    } else {
        v
    };
    let cert: Certificate =
        serde_json::from_value(body).map_err(|e| Failure::Invalid(format!("certificate: {e}")))?;
    let verdict = cert.recheck()?;
    let env = Envelope::new(&cert.potential_digest, echo, 0, json!({ "recheck": true, "verdict": verdict }));
    write_out(out, &(env.to_json() + "\n"))?;
    if verdict {
        Ok(())
    } else {
        Err(Failure::Verdict("stored certificate has verdict false".into()))
    }
}

/// `σ_ℓ` in floating point: exact values up to `exact_max`, window sums beyond.
pub fn mixed_sigmas(
    p: &Potential,
    table: &TraceTable,
    order: usize,
    exact_max: usize,
    window: i64,
) -> Result<Vec<f64>, Failure> {
    let pi = pi_over_sqrt3().mid_f64();
    let k = k_point(0.1, 0.2);
    let mut s = vec![0.0; order + 1];
    for (l, v) in s.iter_mut().enumerate().skip(2) {
        *v = if l <= exact_max {
            magic_core::exactnum::rational::to_f64(table.q(l).expect("exact order present")) * pi
        } else {
            trace_numeric(p, l, k, window)?.re
        };
    }
    Ok(s)
}

fn magic_csv(set: &MagicSet) -> String {
    let mut s = String::from("re,im,multiplicity\n");
    for a in &set.alphas {
        let _ = writeln!(s, "{:.15e},{:.15e},{}", a.re, a.im, a.multiplicity);
    }
    s
}

fn magic(ctx: &Ctx, a: &MagicArgs, out: &mut dyn Write) -> Outcome {
    if a.trace_order < 2 || a.count == 0 {
        return Err(Failure::Invalid("need trace-order >= 2 and count >= 1".into()));
    }
    if !ctx.p.is_real() {
        return Err(Failure::Invalid("magic angles need a real potential".into()));
    }
    let exact_max = a.exact_max.clamp(2, a.trace_order);
    let table = exact_table(&ctx.p, &ctx.digest, exact_max, &ctx.cache)?;
    let mut opts = MagicOptions {
        count: a.count,
        trace_order: a.trace_order,
        complex: a.complex,
        hs: a.hs,
        ..MagicOptions::default()
    };
    if a.all_roots {
        opts.separation = f64::INFINITY;
    }
    let set = if a.trace_order <= exact_max {
        magic_angles(&TraceSource::Exact(&table), &opts)?
    } else {
        if a.truncation < 1 {
            return Err(Failure::Invalid("truncation must be positive".into()));
        }
        opts.truncation = Some(a.truncation);
        let sigma = mixed_sigmas(&ctx.p, &table, a.trace_order, exact_max, a.truncation)?;
        magic_angles(&TraceSource::Numeric(&sigma), &opts)?
    };
    let payload = json!({
        "exact_orders": exact_max,
        "filtered": !a.all_roots,
        "magic_set": set,
    });
    if let Some(path) = &a.out {
        let text = match ctx.format {
            Format::Json => ctx.envelope(payload.clone()).to_json(),
            Format::Csv => magic_csv(&set),
        };
        write_file(path, &text)?;
    }
    ctx.emit(out, payload, || magic_csv(&set))
}

fn grid_csv(rows: &[magic_core::spectra::KSample], num: usize) -> String {
    let mut s = String::from("k1,k2");
    for j in 1..=num {
        let _ = write!(s, ",s{j}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},{}", r.k1, r.k2);
        for v in &r.values {
            let _ = write!(s, ",{v:.12e}");
        }
        s.push('\n');
    }
    s
}

fn flatband(ctx: &Ctx, a: &FlatbandArgs, out: &mut dyn Write) -> Outcome {
    let r = flat_band_check(&ctx.p, a.alpha, a.grid, a.truncation)?;
    let payload = serde_json::to_value(&r).expect("report serializes");
    ctx.emit(out, payload, || grid_csv(&r.per_k, 1))
}

fn bands(ctx: &Ctx, a: &BandsArgs, out: &mut dyn Write) -> Outcome {
    let rows = band_profile(&ctx.p, a.alpha, a.grid, a.num, a.truncation)?;
    match a.out {
        Format::Csv => write_out(out, &grid_csv(&rows, a.num)),
        Format::Json => {
            let payload = json!({ "alpha": a.alpha, "grid": a.grid, "M": a.truncation, "samples": rows });
            write_out(out, &(ctx.envelope(payload).to_json() + "\n"))
        }
    }
}

fn potential(ctx: &Ctx, out: &mut dyn Write) -> Outcome {
    let file = ctx.p.to_file();
    let payload = serde_json::to_value(&file).expect("potential serializes");
    ctx.emit(out, payload, || {
        let mut s = String::from("n1,n2,c0,c1,c2,c3\n");
        for m in &file.modes {
            let c: Vec<String> = m.c.coeffs().iter().map(format_rational).collect();
            let _ = writeln!(s, "{},{},{}", m.n[0], m.n[1], c.join(","));
        }
        s
    })
}

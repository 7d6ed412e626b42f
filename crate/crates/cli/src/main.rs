//! `bellforge`: classify, certify and quantum-optimise Bell inequalities.
//!
//! Exit codes: 0 success, 1 valid input with a negative result (not a facet,
//! failed verification, no violation), 2 malformed input, 3 numerical
//! non-convergence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use bellforge::bellpoly::{io, BellPolynomial, ExtendedPolynomial};
use bellforge::catalog::{self, CatalogEntry, CoefficientVariant};
use bellforge::csderive::{self, SolveOptions};
use bellforge::lhvlab;
use bellforge::qviolation::{self, format_sig, SeesawOptions};
use bellforge::{Error, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "bellforge", version, about = "Bell inequalities for qubits")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts (default 50 for see-saw, 100 for derive-verify --solve).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Convergence tolerance on the objective.
    #[arg(long, global = true, default_value_t = qviolation::DEFAULT_TOL)]
    tol: f64,
    /// Sweep cap per restart.
    #[arg(long, global = true, default_value_t = qviolation::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    /// Coefficient reading of the four-qubit table (i42 only).
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary output here, plus `<FILE>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root spectrum and S_n class.
    Classify {
        /// `catalog:NAME` or a path to an inequality file.
        input: String,
        /// Classify `shift + scale·B`; catalog entries default to their own form.
        #[arg(long)]
        shift: Option<String>,
        #[arg(long)]
        scale: Option<String>,
    },
    /// LHV bounds and facet test; exit 0 iff the bound defines a facet.
    Certify {
        input: String,
        /// Bound to test; defaults to the exact LHV maximum.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Optimised quantum value.
    Qmax {
        input: String,
        #[arg(long, value_enum, default_value_t = StateKind::Optimize)]
        state: StateKind,
        /// GHZ angle for `--state ghz`; default π/4.
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Optimised values along the generalised GHZ family, as CSV.
    Scan {
        input: String,
        /// Number of evenly spaced grid points.
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 0.02)]
        lo: f64,
        /// Default π/2 − 0.02.
        #[arg(long)]
        hi: Option<f64>,
    },
    /// Werner-state threshold visibility for a generalised GHZ state.
    Visibility {
        input: String,
        /// Default π/4.
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Check a proposed solution of an ansatz file, or search for one.
    DeriveVerify {
        file: PathBuf,
        /// Ignore the file's solution and solve numerically.
        #[arg(long)]
        solve: bool,
    },
    /// Built-in inequalities.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Optimised values for sentinel and Haar-random pure states, as CSV.
    Sample {
        input: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    /// Print an entry in the inequality file format.
    Export {
        name: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StateKind {
    Ghz,
    Optimize,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct RunManifest {
    command: String,
    arguments: Vec<String>,
    seed: u64,
    tolerances: BTreeMap<String, String>,
    versions: BTreeMap<String, String>,
    timestamp: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) => 3,
            Error::NoViolation { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Primary output plus the exit code it implies.
struct Outcome {
    text: String,
    code: u8,
    /// Notes printed to stderr, never to the output file.
    notes: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: 0,
            notes: Vec::new(),
        }
    }
}

type Run = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn execute(cli: Cli, args: &[String]) -> Result<u8, Failure> {
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest, cli.common.out.as_deref());
    }
    let outcome = dispatch(&cli)?;
    for n in &outcome.notes {
        eprintln!("{n}");
    }
    match &cli.common.out {
        Some(path) => {
            write_file(path, &outcome.text)?;
            let manifest = RunManifest {
                command: command_name(&cli.command).into(),
                arguments: args.to_vec(),
                seed: cli.common.seed,
                tolerances: tolerances(&cli.common),
                versions: BTreeMap::from([
                    ("bellforge-core".into(), bellforge::VERSION.into()),
                    ("bellforge-cli".into(), env!("CARGO_PKG_VERSION").into()),
                ]),
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            let text = serde_json::to_string_pretty(&manifest).expect("serialisable");
            write_file(&manifest_path(path), &(text + "\n"))?;
        }
        None => print!("{}", outcome.text),
    }
    Ok(outcome.code)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Certify { .. } => "certify",
        Command::Qmax { .. } => "qmax",
        Command::Scan { .. } => "scan",
        Command::Visibility { .. } => "visibility",
        Command::DeriveVerify { .. } => "derive-verify",
        Command::Catalog { .. } => "catalog",
        Command::Sample { .. } => "sample",
        Command::Replay { .. } => "replay",
    }
}

fn tolerances(c: &Common) -> BTreeMap<String, String> {
    let mut t = BTreeMap::from([
        ("tol".to_string(), c.tol.to_string()),
        ("max_sweeps".to_string(), c.max_sweeps.to_string()),
    ]);
    if let Some(r) = c.restarts {
        t.insert("restarts".into(), r.to_string());
    }
    t
}

/// Re-execute the recorded arguments, redirecting `--out` when asked.
fn replay(path: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| malformed(format!("manifest: {e}")))?;
    let mut args = Vec::with_capacity(m.arguments.len() + 2);
    let mut it = m.arguments.into_iter();
    while let Some(a) = it.next() {
        if out.is_some() && a == "--out" {
            it.next();
        } else if !(out.is_some() && a.starts_with("--out=")) {
            args.push(a);
        }
    }
    if let Some(o) = out {
        args.push("--out".into());
        args.push(o.display().to_string());
    }
    let argv: Vec<String> = std::iter::once("bellforge".to_string())
        .chain(args.iter().cloned())
        .collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| malformed(format!("manifest: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(malformed("a manifest cannot record a replay"));
    }
    execute(cli, &args)
}

fn dispatch(cli: &Cli) -> Run {
    let c = &cli.common;
    match &cli.command {
        Command::Classify {
            input,
            shift,
            scale,
        } => classify(c, input, shift.as_deref(), scale.as_deref()),
        Command::Certify { input, bound } => certify(c, input, bound.as_deref()),
        Command::Qmax { input, state, xi } => qmax(c, input, *state, *xi),
        Command::Scan {
            input,
            grid,
            lo,
            hi,
        } => scan(c, input, *grid, *lo, *hi),
        Command::Visibility { input, xi } => visibility(c, input, *xi),
        Command::DeriveVerify { file, solve } => derive_verify(c, file, *solve),
        Command::Catalog { action } => catalog_cmd(c, action),
        Command::Sample { input, count } => sample(c, input, *count),
        Command::Replay { .. } => unreachable!("handled in execute"),
    }
}

struct Loaded {
    entry: Option<CatalogEntry>,
    poly: ExtendedPolynomial,
}

impl Loaded {
    fn bell(&self) -> Result<BellPolynomial, Failure> {
        Ok(self.poly.clone().into_bell()?)
    }
}

fn load(c: &Common, input: &str) -> Result<Loaded, Failure> {
    let variant = c
        .variant
        .as_deref()
        .map(str::parse::<CoefficientVariant>)
        .transpose()?;
    if let Some(name) = input.strip_prefix("catalog:") {
        let entry = catalog::lookup(name, variant)?;
        let poly = entry.polynomial.as_extended().clone();
        return Ok(Loaded {
            entry: Some(entry),
            poly,
        });
    }
    if variant.is_some() {
        return Err(malformed("--variant applies to catalog entries only"));
    }
    let text = std::fs::read_to_string(input).map_err(|e| malformed(format!("{input}: {e}")))?;
    Ok(Loaded {
        entry: None,
        poly: io::extended_from_json(&text)?,
    })
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    Ok(s.parse::<Rational>()?)
}

fn seesaw_options(c: &Common) -> SeesawOptions {
    SeesawOptions {
        seed: c.seed,
        restarts: c.restarts.unwrap_or(qviolation::DEFAULT_RESTARTS),
        tol: c.tol,
        max_sweeps: c.max_sweeps,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn classify(c: &Common, input: &str, shift: Option<&str>, scale: Option<&str>) -> Run {
    let l = load(c, input)?;
    let (shift, scale) = match (shift, scale, &l.entry) {
        (None, None, Some(e)) => e.class_form.clone(),
        _ => (
            shift
                .map(parse_rational)
                .transpose()?
                .unwrap_or_else(Rational::zero),
            scale
                .map(parse_rational)
                .transpose()?
                .unwrap_or_else(Rational::one),
        ),
    };
    let f = ExtendedPolynomial::constant(l.poly.scenario(), shift.clone())
        .add(&l.poly.scale(&scale))
        .map_err(Failure::from)?;
    let spectrum = lhvlab::enumerate_roots(&f)?;
    let class = lhvlab::classify_spectrum(&spectrum, lhvlab::DEFAULT_N_MAX);
    if c.json {
        return Ok(Outcome::ok(to_json(&json!({
            "input": input,
            "shift": shift,
            "scale": scale,
            "spectrum": spectrum,
            "class": class,
        }))));
    }
    let mut t = String::new();
    let _ = writeln!(t, "input     {input}");
    let _ = writeln!(t, "function  {shift} + {scale}·B");
    let _ = writeln!(t, "roots     {spectrum}");
    let _ = writeln!(t, "class     {class}");
    Ok(Outcome::ok(t))
}

fn certify(c: &Common, input: &str, bound: Option<&str>) -> Run {
    let l = load(c, input)?;
    let p = l.bell()?;
    let bound = match bound {
        Some(b) => parse_rational(b)?,
        None => lhvlab::lhv_bound(&p)?.1,
    };
    let r = lhvlab::is_tight(&p, &bound)?;
    let code = if r.is_facet { 0 } else { 1 };
    let text = if c.json {
        to_json(&json!({ "input": input, "report": r }))
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "input            {input}");
        let _ = writeln!(t, "bound            {}", r.bound);
        let _ = writeln!(t, "lhv range        [{}, {}]", r.lhv_min, r.lhv_max);
        let _ = writeln!(t, "valid            {}", r.valid);
        let _ = writeln!(t, "saturating       {}", r.saturating_count);
        let _ = writeln!(t, "affine rank      {}", r.affine_rank);
        let _ = writeln!(t, "polytope dim     {}", r.polytope_dim);
        let _ = writeln!(t, "is_facet         {}", r.is_facet);
        t
    };
    Ok(Outcome {
        text,
        code,
        notes: Vec::new(),
    })
}

fn ghz_xi(xi: Option<f64>) -> f64 {
    xi.unwrap_or(std::f64::consts::FRAC_PI_4)
}

fn qmax(c: &Common, input: &str, state: StateKind, xi: Option<f64>) -> Run {
    let p = load(c, input)?.bell()?;
    let opts = seesaw_options(c);
    let (r, xi) = match state {
        StateKind::Ghz => {
            let xi = ghz_xi(xi);
            let psi = qviolation::ghz(p.scenario().parties(), xi)?;
            (qviolation::seesaw_settings(&p, &psi, &opts, &[])?, Some(xi))
        }
        StateKind::Optimize => {
            if xi.is_some() {
                return Err(malformed("--xi needs --state ghz"));
            }
            (qviolation::seesaw_global(&p, &opts)?, None)
        }
    };
    let code = if r.converged { 0 } else { 3 };
    let text = if c.json {
        to_json(&json!({ "input": input, "xi": xi, "result": r }))
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "input      {input}");
        match xi {
            Some(x) => {
                let _ = writeln!(t, "state      ghz xi={}", format_sig(x));
            }
            None => {
                let _ = writeln!(t, "state      optimised");
            }
        }
        let _ = writeln!(t, "value      {}", format_sig(r.value));
        let _ = writeln!(t, "converged  {}", r.converged);
        let _ = writeln!(t, "restarts   {}", r.restarts_used);
        let _ = writeln!(
            t,
            "spread     [{}, {}]",
            format_sig(r.spread.0),
            format_sig(r.spread.1)
        );
        let _ = writeln!(t, "seed       {}", r.seed);
        t
    };
    Ok(Outcome {
        text,
        code,
        notes: Vec::new(),
    })
}

fn scan(c: &Common, input: &str, points: usize, lo: f64, hi: Option<f64>) -> Run {
    let p = load(c, input)?.bell()?;
    let hi = hi.unwrap_or(std::f64::consts::FRAC_PI_2 - 0.02);
    let grid = qviolation::ghz_grid(points, lo, hi);
    let rows = qviolation::scan_ghz(&p, &grid, &seesaw_options(c))?;
    let (_, lhv_max) = lhvlab::lhv_bound(&p)?;
    let bound = lhv_max.to_f64();
    let violated = rows
        .iter()
        .filter(|r| r.value > bound + qviolation::VIOLATION_MARGIN)
        .count();
    let text = if c.json {
        to_json(&json!({ "input": input, "seed": c.seed, "lhv_max": lhv_max, "rows": rows }))
    } else {
        qviolation::scan_csv(&rows)
    };
    Ok(Outcome {
        text,
        code: 0,
        notes: vec![format!(
            "seed {}; {violated} of {} points exceed the LHV maximum {lhv_max}",
            c.seed,
            rows.len()
        )],
    })
}

fn visibility(c: &Common, input: &str, xi: Option<f64>) -> Run {
    let p = load(c, input)?.bell()?;
    let xi = ghz_xi(xi);
    let psi = qviolation::ghz(p.scenario().parties(), xi)?;
    let r = qviolation::visibility_threshold(&p, &psi, &seesaw_options(c))?;
    let code = if r.optimization.converged { 0 } else { 3 };
    let text = if c.json {
        to_json(&json!({ "input": input, "xi": xi, "report": r }))
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "input         {input}");
        let _ = writeln!(t, "state         ghz xi={}", format_sig(xi));
        let _ = writeln!(t, "quantum value {}", format_sig(r.quantum_value));
        let _ = writeln!(t, "lhv maximum   {}", format_sig(r.lhv_max));
        let _ = writeln!(t, "visibility    {}", format_sig(r.visibility));
        let _ = writeln!(t, "method        {:?}", r.method);
        let _ = writeln!(t, "seed          {}", c.seed);
        t
    };
    Ok(Outcome {
        text,
        code,
        notes: Vec::new(),
    })
}

fn derive_verify(c: &Common, file: &Path, solve: bool) -> Run {
    let text =
        std::fs::read_to_string(file).map_err(|e| malformed(format!("{}: {e}", file.display())))?;
    let (ansatz, given) = csderive::ansatz_from_json(&text)?;
    let cs = csderive::build_constraints(&ansatz)?;
    let values = if solve {
        let opts = SolveOptions {
            seed: c.seed,
            restarts: c.restarts.unwrap_or(SolveOptions::default().restarts),
            ..SolveOptions::default()
        };
        let found = csderive::solve_numeric(&cs, &opts)?;
        match found.into_iter().find_map(|s| s.exact) {
            Some(v) => v,
            None => {
                return Err(Failure {
                    code: 3,
                    message: "no restart produced an exactly verified solution".into(),
                })
            }
        }
    } else {
        given.ok_or_else(|| malformed("the ansatz file has no solution; use --solve"))?
    };
    let report = csderive::verify_solution(&cs, &values)?;
    let mut implied = None;
    if report.pass {
        let f = ansatz.f_polynomial(&values)?;
        let g = ansatz.g_polynomial(&values)?;
        if let Ok(q) = csderive::implied_inequality(&f, &g) {
            implied = Some((q.to_string(), q.linearize().map(|l| l.to_string())));
        }
    }
    let code = if report.pass { 0 } else { 1 };
    let text = if c.json {
        to_json(&json!({
            "equations": cs.len(),
            "values": values,
            "report": report,
            "implied": implied.as_ref().map(|(q, _)| q),
            "linearized": implied.as_ref().and_then(|(_, l)| l.as_ref()),
        }))
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "{}", if report.pass { "PASS" } else { "FAIL" });
        let _ = writeln!(t, "equations   {}", cs.len());
        let names = cs.symbols.clone();
        let shown: Vec<String> = names
            .iter()
            .map(|n| {
                format!(
                    "{n}={}",
                    values.get(n).cloned().unwrap_or_else(Rational::zero)
                )
            })
            .collect();
        let _ = writeln!(t, "solution    {}", shown.join(" "));
        let _ = writeln!(t, "residuals   {} non-zero", report.nonzero().count());
        for r in report.nonzero() {
            let _ = writeln!(t, "  {} = {}", r.equation, r.value);
        }
        if let Some((q, l)) = &implied {
            let _ = writeln!(t, "implied     {q}");
            if let Some(l) = l {
                let _ = writeln!(t, "linearized  {l}");
            }
        }
        t
    };
    Ok(Outcome {
        text,
        code,
        notes: Vec::new(),
    })
}

fn catalog_cmd(c: &Common, action: &CatalogAction) -> Run {
    match action {
        CatalogAction::List => {
            let entries = catalog::entries()?;
            if c.json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|e| {
                        json!({
                            "name": e.name,
                            "scenario": e.scenario(),
                            "description": e.description,
                            "lhv_max": e.claimed_bound,
                            "class": e.claimed_class,
                            "class_form": [e.class_form.0.clone(), e.class_form.1.clone()],
                            "note": e.note,
                        })
                    })
                    .collect();
                return Ok(Outcome::ok(to_json(&list)));
            }
            let mut t = String::new();
            let _ = writeln!(
                t,
                "{:<8} {:<6} {:<5} {:<6} description",
                "name", "N,M", "max", "class"
            );
            for e in entries {
                let s = e.scenario();
                let _ = writeln!(
                    t,
                    "{:<8} {:<6} {:<5} {:<6} {}",
                    e.name,
                    format!("{},{}", s.parties(), s.settings()),
                    e.claimed_bound.to_string(),
                    e.claimed_class.to_string(),
                    e.description
                );
            }
            Ok(Outcome::ok(t))
        }
        CatalogAction::Export { name } => {
            let l = load(c, &format!("catalog:{name}"))?;
            Ok(Outcome::ok(io::extended_to_json(&l.poly)? + "\n"))
        }
    }
}

fn sample(c: &Common, input: &str, count: usize) -> Run {
    let p = load(c, input)?.bell()?;
    let rows = qviolation::sample_random_pure_states(&p, count, &seesaw_options(c))?;
    let text = if c.json {
        to_json(&json!({ "input": input, "seed": c.seed, "rows": rows }))
    } else {
        qviolation::sample_csv(&rows)
    };
    Ok(Outcome {
        text,
        code: 0,
        notes: vec![format!("seed {}", c.seed)],
    })
}

//! The `flagforge` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::betti::{betti_table, ci_deficiency_degrees, pure_deficiency_degrees, slope_pairs, BettiTable};
use crate::complex::Complex;
use crate::deform::{
    assemble, budget_from_env, canonical_path, dim_bounds, enumerate_flags, lift, lift_space, LiftChoice, LiftOutcome,
    LiftState,
};
use crate::diffmod::{default_window, fold, h0_hilbert, homology_hilbert, minimize, DifferentialModule};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::io::{self, Input};
use crate::report::{InputDigest, RunReport};
use crate::rigidity::{
    is_a_rigid, nonrigidity_witness, rigid_thresholds, rigidity_window, CompleteIntersection, RigiditySource,
};

#[derive(Parser, Debug)]
#[command(name = "flagforge", version, about = "Free flags and differential modules over polynomial rings")]
pub struct Cli {
    /// Coefficient field: `q` for the rationals or a prime `p`.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<Field>,
    /// Write the full run report as JSON to this path.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CiArgs {
    /// Complete intersection JSON.
    #[arg(long = "in", conflicts_with = "degrees")]
    pub input: Option<PathBuf>,
    /// Generator degrees, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub degrees: Option<Vec<i64>>,
    /// Number of variables (defaults to the number of degrees).
    #[arg(long)]
    pub vars: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a complex, differential module, CI or Betti table.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The degree-a fold of a complex.
    Fold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Build a flag on a complex stage by stage.
    Deform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        /// `canonical` or `enumerate` (the latter over `--field p`).
        #[arg(long, default_value = "canonical")]
        strategy: String,
        /// JSON list, one list of cocycle coordinates per stage.
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Stage-wise isomorphism classes of flags over a prime field.
    Enumerate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Strip unit entries from a differential module.
    Minimize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Hilbert function of homology on a window of internal degrees.
    Homology {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
    /// Dimensions of Ext^i(S/I, S/I)_j for a complete intersection.
    ExtDims {
        #[command(flatten)]
        ci: CiArgs,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
    /// Non-rigid window and rigidity thresholds of a complete intersection.
    RigidityWindow {
        #[command(flatten)]
        ci: CiArgs,
    },
    /// A flag of degree a on a complete intersection not isomorphic to the fold.
    Witness {
        #[command(flatten)]
        ci: CiArgs,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Degrees where a Betti-deficient module could exist.
    BettiDeficiency {
        /// Betti table JSON or a minimal complex.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        ci_degrees: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',')]
        pure: Option<Vec<i64>>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
    /// Bounds on the dimension of the space of degree-a flags.
    DimBounds {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Run the built-in gallery of worked examples.
    PaperExamples,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Fold { .. } => "fold",
            Command::Deform { .. } => "deform",
            Command::Enumerate { .. } => "enumerate",
            Command::Minimize { .. } => "minimize",
            Command::Homology { .. } => "homology",
            Command::ExtDims { .. } => "ext-dims",
            Command::RigidityWindow { .. } => "rigidity-window",
            Command::Witness { .. } => "witness",
            Command::BettiDeficiency { .. } => "betti-deficiency",
            Command::DimBounds { .. } => "dim-bounds",
            Command::PaperExamples => "paper-examples",
        }
    }
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    let t = s.trim().trim_start_matches(['p', 'F']);
    match s.trim() {
        "q" | "Q" | "0" => Ok(Field::Rational),
        _ => t.parse::<u32>().map_err(|e| e.to_string()).and_then(|p| Field::prime(p).map_err(|e| e.to_string())),
    }
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected j0:j1")?;
    let (a, b) = (a.trim().parse::<i64>().map_err(|e| e.to_string())?, b.trim().parse::<i64>().map_err(|e| e.to_string())?);
    if a > b {
        return Err(format!("empty window {a}:{b}"));
    }
    Ok((a, b))
}

/// A failure and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

struct Ctx {
    field: Option<Field>,
    seed: u64,
    digest: InputDigest,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<Input> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.digest.bytes(&bytes);
        let text = String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{}: not UTF-8", path.display())))?;
        let input = io::parse_str(&text)?;
        let Some(f) = self.field else { return Ok(input) };
        Ok(match input {
            Input::Complex(c) => Input::Complex(c.to_ring(&c.ring().with_field(f))?),
            Input::Dm(d) => Input::Dm(d.to_ring(&d.module().ring().with_field(f))?),
            Input::Ci(ci) => match ci.generators() {
                Some((r, g)) => {
                    let r = r.with_field(f);
                    let g = g.iter().map(|p| p.to_ring(&r)).collect::<Result<Vec<_>>>()?;
                    Input::Ci(CompleteIntersection::from_gens(&r, g)?)
                }
                None => Input::Ci(ci),
            },
            other => other,
        })
    }

    fn complex(&mut self, path: &Path) -> std::result::Result<Complex, Failure> {
        match self.read(path)? {
            Input::Complex(c) => Ok(c),
            other => Err(usage(format!("{} holds a {}, expected a complex", path.display(), other.kind()))),
        }
    }

    fn dm(&mut self, path: &Path) -> std::result::Result<DifferentialModule, Failure> {
        match self.read(path)? {
            Input::Dm(d) => Ok(d),
            other => Err(usage(format!("{} holds a {}, expected a differential module", path.display(), other.kind()))),
        }
    }

    fn ci(&mut self, a: &CiArgs) -> std::result::Result<CompleteIntersection, Failure> {
        match (&a.input, &a.degrees) {
            (Some(p), _) => match self.read(p)? {
                Input::Ci(ci) => Ok(ci),
                other => Err(usage(format!("{} holds a {}, expected a complete intersection", p.display(), other.kind()))),
            },
            (None, Some(d)) => Ok(CompleteIntersection::from_degrees(a.vars.unwrap_or(d.len()), d.clone())?),
            (None, None) => Err(usage("give --in or --degrees")),
        }
    }
}

fn hilbert_json(h: &std::collections::BTreeMap<i64, usize>) -> Value {
    Value::Array(h.iter().map(|(j, v)| json!([j, v])).collect())
}

fn stage_json(log: &[std::collections::BTreeMap<&'static str, i64>]) -> Vec<Value> {
    log.iter().map(|r| json!(r)).collect()
}

fn parse_coords(path: &Path, field: Field, ctx: &mut Ctx) -> Result<Vec<Vec<Scalar>>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ctx.digest.bytes(&bytes);
    let raw: Vec<Vec<Value>> = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let ring = crate::poly::Ring::new(field, &["t"])?;
    raw.iter()
        .map(|stage| {
            stage
                .iter()
                .map(|v| {
                    let s = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    let p = ring.parse(&s)?;
                    if p.degree().unwrap_or(0) > 0 {
                        return Err(Error::Parse(format!("`{s}` is not a scalar")));
                    }
                    Ok(p.constant_term())
                })
                .collect()
        })
        .collect()
}

fn execute(cmd: &Command, ctx: &mut Ctx, report: &mut RunReport, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let mut text = String::new();
    let results: Value = match cmd {
        Command::Check { input } => {
            let obj = ctx.read(input)?;
            let summary = match &obj {
                Input::Complex(c) => json!({"kind": "complex", "length": c.length(), "minimal": c.is_minimal(),
                    "ranks": c.modules().iter().map(|m| m.rank()).collect::<Vec<_>>()}),
                Input::Dm(d) => json!({"kind": "differential module", "degree": d.degree(), "rank": d.rank(),
                    "flag": d.levels().is_some(), "minimal": d.is_minimal()}),
                Input::Ci(ci) => json!({"kind": "complete intersection", "vars": ci.nvars(), "degrees": ci.degrees()}),
                Input::Betti(t) => json!({"kind": "Betti table", "total": t.total()}),
            };
            text = format!("valid {}\n", obj.kind());
            summary
        }
        Command::Fold { input, degree } => {
            let c = ctx.complex(input)?;
            let v = serde_json::to_value(io::dm_to_json(&fold(&c, *degree))).expect("serializable");
            text = io::to_pretty(&v) + "\n";
            v
        }
        Command::Deform { input, degree, strategy, coords, budget } => {
            let c = ctx.complex(input)?;
            match strategy.as_str() {
                "canonical" if coords.is_none() => {
                    let (s, log) = canonical_path(&c, *degree)?;
                    report.stages = stage_json(&log);
                    let v = serde_json::to_value(io::dm_to_json(&assemble(&s)?)).expect("serializable");
                    text = io::to_pretty(&v) + "\n";
                    v
                }
                "canonical" => {
                    let stages = parse_coords(coords.as_ref().expect("checked"), c.ring().field(), ctx)?;
                    let mut s = LiftState::new(&c, *degree);
                    let mut k = 0;
                    while !s.is_complete() {
                        let ls = lift_space(&s)?;
                        let choice = match stages.get(k) {
                            Some(v) => LiftChoice::Coordinates(v.clone()),
                            None => LiftChoice::Canonical,
                        };
                        report.stages.push(json!({"stage": s.stage(), "cocycles": ls.cocycles.len(),
                            "coboundaries": ls.coboundaries.len(), "quotient": ls.quotient_dim}));
                        s = match lift(&s, &choice)? {
                            LiftOutcome::Lifted(t) => t,
                            LiftOutcome::Obstructed(cert) => {
                                report.stages.push(serde_json::to_value(&cert).expect("serializable"));
                                writeln!(out, "obstructed: {cert}").ok();
                                return Ok(1);
                            }
                        };
                        k += 1;
                    }
                    let v = serde_json::to_value(io::dm_to_json(&assemble(&s)?)).expect("serializable");
                    text = io::to_pretty(&v) + "\n";
                    v
                }
                "enumerate" => enumerate_results(&c, *degree, ctx, *budget, report, &mut text)?,
                other => return Err(usage(format!("unknown strategy `{other}`"))),
            }
        }
        Command::Enumerate { input, degree, budget } => {
            let c = ctx.complex(input)?;
            enumerate_results(&c, *degree, ctx, *budget, report, &mut text)?
        }
        Command::Minimize { input } => {
            let d = ctx.dm(input)?;
            let (m, betti) = minimize(&d)?;
            text = io::to_pretty(&io::dm_to_json(&m)) + "\n";
            json!({"module": io::dm_to_json(&m), "betti": betti.counts, "total_betti": betti.total(),
                "input_rank": d.rank()})
        }
        Command::Homology { input, window } => match ctx.read(input)? {
            Input::Dm(d) => {
                let (j0, j1) = window.unwrap_or_else(|| default_window(&d));
                let h = homology_hilbert(&d, j0, j1);
                text = h.iter().map(|(j, v)| format!("{j}\t{v}\n")).collect();
                json!({"window": [j0, j1], "hilbert": hilbert_json(&h)})
            }
            Input::Complex(c) => {
                let (j0, j1) = window.unwrap_or_else(|| default_window(&fold(&c, 0)));
                let h = h0_hilbert(&c, j0, j1);
                text = h.iter().map(|(j, v)| format!("{j}\t{v}\n")).collect();
                json!({"window": [j0, j1], "hilbert": hilbert_json(&h)})
            }
            other => return Err(usage(format!("homology needs a complex or differential module, got a {}", other.kind()))),
        },
        Command::ExtDims { ci, window } => {
            let ci = ctx.ci(ci)?;
            let total: i64 = ci.degrees().iter().sum();
            let (j0, j1) = match (window, ci.socle_degree()) {
                (Some(w), _) => *w,
                (None, Ok(s)) => (-total, s),
                (None, Err(_)) => return Err(usage("non-Artinian input needs --window")),
            };
            let mut rows = Vec::new();
            for i in 0..=ci.codim() {
                for j in j0..=j1 {
                    let d = ci.ext_dim(i, j);
                    if d > 0 {
                        text += &format!("Ext^{i}_{j}\t{d}\n");
                        rows.push(json!([i, j, d]));
                    }
                }
            }
            json!({"window": [j0, j1], "dims": rows})
        }
        Command::RigidityWindow { ci } => {
            let ci = ctx.ci(ci)?;
            let w = rigidity_window(&ci)?;
            let t = rigid_thresholds(RigiditySource::Ci(&ci))?;
            text = format!("non-rigid interval [{}, {}]\nrigid for all a < {} and all a > {}\n", w.lo, w.hi, w.lo, w.hi);
            json!({"window": w, "thresholds": {"a_minus": t.a_minus, "a_minus_label": "derived",
                "a_plus": t.a_plus, "always_rigid": t.always_rigid}})
        }
        Command::Witness { ci, degree } => {
            let ci = ctx.ci(ci)?;
            let w = nonrigidity_witness(&ci, *degree)?;
            let dm = io::dm_to_json(&w.flag);
            text = format!("class {} in degree {}\n{}\n", w.class, w.monomial_degree, io::to_pretty(&dm));
            json!({"pair": [w.pair.0, w.pair.1], "class": w.class.to_string(), "module": dm,
                "rigid": is_a_rigid(RigiditySource::Ci(&ci), *degree).rigid})
        }
        Command::BettiDeficiency { input, ci_degrees, pure, window } => {
            betti_deficiency(ctx, input.as_deref(), ci_degrees.as_deref(), pure.as_deref(), *window, &mut text)?
        }
        Command::DimBounds { input, degree } => {
            let c = ctx.complex(input)?;
            let (lo, hi) = dim_bounds(&c, *degree);
            text = format!("{lo} <= dim <= {hi}\n");
            json!({"lower": lo, "upper": hi})
        }
        Command::PaperExamples => {
            let checks = crate::gallery::run_all(ctx.seed);
            for c in &checks {
                text += &format!("{} {:>3} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            report.results = serde_json::to_value(&checks).expect("serializable");
            out.write_all(text.as_bytes()).ok();
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    };
    report.results = results;
    out.write_all(text.as_bytes()).ok();
    Ok(0)
}

fn enumerate_results(
    c: &Complex,
    a: i64,
    ctx: &Ctx,
    budget: Option<u64>,
    report: &mut RunReport,
    text: &mut String,
) -> std::result::Result<Value, Failure> {
    let p = match ctx.field.unwrap_or(c.ring().field()) {
        Field::Prime(p) => p,
        Field::Rational => return Err(usage("enumeration needs --field p for a prime p")),
    };
    let e = enumerate_flags(c, a, p, budget.unwrap_or_else(budget_from_env))?;
    report.stages = e.log.iter().map(|s| serde_json::to_value(s).expect("serializable")).collect();
    let mut classes = Vec::new();
    for (k, cls) in e.classes.iter().enumerate() {
        let dm = assemble(&cls.state)?;
        *text += &format!("class {k}: {} raw lifts\n", cls.multiplicity);
        classes.push(json!({"multiplicity": cls.multiplicity.to_string(), "module": io::dm_to_json(&dm)}));
    }
    *text += &format!("{} stage-wise classes over F_{p}\n", e.classes.len());
    Ok(json!({"field": p, "stagewise_classes": classes.len(), "raw_states": e.raw_states.to_string(), "classes": classes}))
}

fn betti_deficiency(
    ctx: &mut Ctx,
    input: Option<&Path>,
    ci_degrees: Option<&[i64]>,
    pure: Option<&[i64]>,
    window: Option<(i64, i64)>,
    text: &mut String,
) -> std::result::Result<Value, Failure> {
    let label = "deficiency possible only at";
    if let Some(d) = ci_degrees {
        let s = ci_deficiency_degrees(d);
        *text = format!("{label} a in {s:?}\n");
        return Ok(json!({"label": label, "degrees": s}));
    }
    if let Some(d) = pure {
        let s = pure_deficiency_degrees(d)?;
        *text = format!("{label} a in {s:?}\n");
        return Ok(json!({"label": label, "degrees": s}));
    }
    let Some(path) = input else {
        return Err(usage("give --in, --ci-degrees or --pure"));
    };
    let table: BettiTable = match ctx.read(path)? {
        Input::Betti(t) => t,
        Input::Complex(c) => betti_table(&c)?,
        other => return Err(usage(format!("expected a Betti table or complex, got a {}", other.kind()))),
    };
    let (lo, hi) = window.unwrap_or((-20, 20));
    let mut found = Vec::new();
    for a in lo..=hi {
        let pairs = slope_pairs(&table, a);
        if !pairs.is_empty() {
            found.push(json!({"a": a, "pairs": pairs}));
            *text += &format!("{label} a = {a} ({} slope pairs)\n", pairs.len());
        }
    }
    if found.is_empty() {
        *text += &format!("no Betti-deficient module possible for a in [{lo}, {hi}]\n");
    }
    Ok(json!({"label": label, "window": [lo, hi], "table": io::betti_to_json(&table), "admissible": found}))
}

/// Runs the command line, writing human output to `out`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                write!(out, "{e}").ok();
            } else {
                write!(err, "{e}").ok();
            }
            return code;
        }
    };
    let started = Instant::now();
    let mut digest = InputDigest::new();
    digest.arg(&format!("{:?}", cli.command));
    digest.arg(&format!("{:?}", cli.field));
    let mut ctx = Ctx { field: cli.field, seed: cli.seed, digest };
    let mut report = RunReport::new(cli.command.name(), String::new());
    let code = match execute(&cli.command, &mut ctx, &mut report, out) {
        Ok(c) => c,
        Err(f) => {
            writeln!(err, "error: {}", f.message).ok();
            report.results = json!({"error": f.message});
            f.code
        }
    };
    report.inputs_digest = std::mem::take(&mut ctx.digest).finish();
    report.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, io::to_pretty(&report)) {
            writeln!(err, "error: {}: {e}", path.display()).ok();
            return 2;
        }
    }
    code
}
